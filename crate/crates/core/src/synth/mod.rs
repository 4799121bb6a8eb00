//! Seeded synthetic discharge extracts and the naive reference implementations the
//! engine is checked against.

mod generate;
pub mod oracle;
mod profile;

use thiserror::Error;

pub use generate::{generate, generate_to_vec, Corruption, GenerationLedger, LedgerCell, HEADER, MAX_GENERATED_CENTS};
pub use profile::{CohortProfile, Stratum, MAX_DIRTY_ROW_RATE};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("profile I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV write error: {0}")]
    Csv(#[from] csv::Error),
}
