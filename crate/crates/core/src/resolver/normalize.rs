/// Canonical form of a cited work's title: uppercase, punctuation removed,
/// whitespace collapsed, cut to `truncation_length` characters.
///
/// Citation databases store truncated uppercase work titles
/// (`"MODELLING FOREST GRO"`), so both sides of a comparison go through here.
pub fn normalize_work_title(title: &str, truncation_length: usize) -> String {
    let mut out = String::with_capacity(title.len());
    for word in title.split_whitespace() {
        let cleaned: String = word
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_uppercase)
            .collect();
        if cleaned.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&cleaned);
    }
    if let Some((cut, _)) = out.char_indices().nth(truncation_length) {
        out.truncate(cut);
    }
    out.truncate(out.trim_end().len());
    out
}

pub(crate) fn edit_distance(a: &str, b: &str) -> usize {
    strsim::levenshtein(a, b)
}

/// Edit distance if it is at most `max`, skipping the DP when lengths alone rule it out.
pub(crate) fn bounded_distance(a: &str, b: &str, max: usize) -> Option<usize> {
    let (la, lb) = (a.chars().count(), b.chars().count());
    if la.abs_diff(lb) > max {
        return None;
    }
    let d = edit_distance(a, b);
    (d <= max).then_some(d)
}
