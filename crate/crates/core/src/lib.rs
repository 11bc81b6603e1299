//! Citation-index computation over a journal/document corpus: ingest,
//! reference resolution, index variants, distribution statistics and audits.

pub mod audit;
pub mod corpus;
pub mod indices;
pub mod pipeline;
pub mod report;
pub mod resolver;
pub mod stats;
pub mod synth;
