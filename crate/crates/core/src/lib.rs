//! Linguistic complexity of full-text scientific articles versus their
//! citation impact.
//!
//! The crate is organised as a chain of stages, each usable on its own:
//!
//! - [`ingest`]: JATS-style XML to plain paragraphs, abbreviation expansion.
//! - [`pipeline`]: sentences, tokens, part-of-speech tags and clause counts.
//! - [`metrics`]: the twelve complexity variables per article.
//! - [`impact`]: field/year-normalized citations and impact groups.
//! - [`stats`]: ECDFs, two-sample KS tests, bootstrap intervals, regressions.
//! - [`compare`]: the group comparison and regression tables.
//! - [`report`] and [`run`]: CSV interchange files and the staged pipeline.

pub mod compare;
pub mod impact;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod run;
pub mod stats;
