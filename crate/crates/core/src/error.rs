use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    /// Invalid or inconsistent configuration. Maps to CLI exit code 2.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("percentile of an empty series")]
    EmptySeries,

    #[error("result table is empty")]
    EmptyTable,

    #[error("drop {drop}: could not fill every sector with {per_sector} users after {attempts} attempts")]
    InfeasibleDrop {
        drop: u64,
        per_sector: usize,
        attempts: u32,
    },
}

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    /// Process exit code for this error: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
