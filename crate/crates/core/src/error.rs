use alloc::string::String;

/// Errors raised by model construction, decoding and verification.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{kernel} has invalid shape: {detail}")]
    Shape { kernel: &'static str, detail: String },

    #[error("{kernel} row {row} sums to {sum} (expected 1 within 1e-12)")]
    RowSum {
        kernel: &'static str,
        row: String,
        sum: f64,
    },

    #[error("{kernel} has an invalid entry {value} at {row}")]
    Entry {
        kernel: &'static str,
        row: String,
        value: f64,
    },

    #[error("initial {which} state {index} is out of range for {size} states")]
    InitialState {
        which: &'static str,
        index: usize,
        size: usize,
    },

    #[error("induced kernel violates positivity (pi_min = {pi_min})")]
    PositivityViolation { pi_min: f64 },

    #[error("conditioning on a sequence of probability zero")]
    ConditioningOnNull,

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("{what}: size {size} exceeds enumeration limit {limit}")]
    TooLarge {
        what: &'static str,
        size: f64,
        limit: f64,
    },

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("degenerate estimation setup: {0}")]
    Degenerate(String),

    #[error("capacity formula requires single-state source and channels")]
    NotMemoryless,

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
