//! Cross-lingual readability assessment for closely related languages.
//!
//! The pipeline reads leveled corpora, extracts surface features and
//! cross-lingual n-gram overlap features, and trains random forests on
//! every combination of training languages.

pub mod corpus;
pub mod error;
pub mod experiments;
pub mod features;
pub mod forest;
pub mod intelligibility;
pub mod ngram;
pub mod orthography;
pub mod par;
pub mod stats;

pub use error::{Error, Result};
