//! Display rounding for index values.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundingPolicy {
    #[default]
    ThreeDecimal,
    OneDecimal,
    /// As many decimals as the confidence interval supports (1 to 3).
    ErrorAware,
}

impl RoundingPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            RoundingPolicy::ThreeDecimal => "3dp",
            RoundingPolicy::OneDecimal => "1dp",
            RoundingPolicy::ErrorAware => "error-aware",
        }
    }
}

impl fmt::Display for RoundingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoundingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3dp" => Ok(RoundingPolicy::ThreeDecimal),
            "1dp" => Ok(RoundingPolicy::OneDecimal),
            "error-aware" => Ok(RoundingPolicy::ErrorAware),
            other => Err(format!(
                "unknown rounding policy {other:?} (3dp, 1dp, error-aware)"
            )),
        }
    }
}

const MAX_DECIMALS: u32 = 3;

/// Round half away from zero to `decimals` places.
pub fn round_half_away(value: Rational64, decimals: u32) -> Rational64 {
    let scale = 10i64.pow(decimals);
    let scaled = value * scale;
    let (num, den) = (*scaled.numer(), *scaled.denom());
    let (q, r) = (num.abs() / den, num.abs() % den);
    let mag = if 2 * r >= den { q + 1 } else { q };
    Rational64::new(if num < 0 { -mag } else { mag }, scale)
}

/// Fixed-point text for `value` rounded half away from zero.
pub fn format_decimal(value: Rational64, decimals: u32) -> String {
    let rounded = round_half_away(value, decimals);
    let scale = 10i64.pow(decimals);
    // exact: rounded * scale is an integer
    let units = (rounded * scale).to_integer();
    let sign = if units < 0 { "-" } else { "" };
    let units = units.unsigned_abs();
    if decimals == 0 {
        return format!("{sign}{units}");
    }
    let scale = scale as u64;
    format!(
        "{sign}{}.{:0width$}",
        units / scale,
        units % scale,
        width = decimals as usize
    )
}

/// Number of decimals a policy shows for `value`.
pub fn display_decimals(policy: RoundingPolicy, ci: Option<(Rational64, Rational64)>) -> u32 {
    match policy {
        RoundingPolicy::ThreeDecimal => 3,
        RoundingPolicy::OneDecimal => 1,
        RoundingPolicy::ErrorAware => {
            let Some((low, high)) = ci else {
                return 1;
            };
            let half_width = (high - low).abs() / 2;
            if half_width.is_zero() {
                return MAX_DECIMALS;
            }
            // first place whose half-unit is smaller than the uncertainty
            (0..=MAX_DECIMALS)
                .find(|&k| half_width > Rational64::new(1, 2 * 10i64.pow(k)))
                .unwrap_or(MAX_DECIMALS)
                .max(1)
        }
    }
}

pub fn round_display(
    value: Rational64,
    policy: RoundingPolicy,
    ci: Option<(Rational64, Rational64)>,
) -> String {
    format_decimal(value, display_decimals(policy, ci))
}
