use thiserror::Error;

#[derive(Debug, Error)]
pub enum CgpError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("gene {gene_index} has value {value}, permissible range is [{lo}, {hi})")]
    GeneOutOfRange {
        gene_index: usize,
        value: usize,
        lo: usize,
        hi: usize,
    },
    #[error("genotype has {actual} genes, geometry requires {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("function set kind mismatch: expected {expected}, got {actual}")]
    KindMismatch {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CgpError>;
