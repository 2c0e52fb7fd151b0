//! Bilingual word embeddings from cheap monolingual signals.

pub mod candidates;
pub mod csls;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod lexicon;
pub mod mapping;
pub mod matcher;
pub mod pipeline;
pub mod rng;
pub mod romanizer;
pub mod synthetic;

pub use error::{Error, Result};
