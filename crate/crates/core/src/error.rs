use thiserror::Error;

/// Errors raised by the processing pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("image dimensions mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("block size {block} does not divide image dimensions {width}x{height}")]
    NotDivisible { block: usize, width: usize, height: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("image {width}x{height} is smaller than the {window}x{window} window")]
    ImageTooSmall { width: usize, height: usize, window: usize },

    #[error("expected a square {expected}x{expected} block, got {rows}x{cols}")]
    NonSquareBlock { expected: usize, rows: usize, cols: usize },

    #[error("coefficient grid does not match the image block grid")]
    BlockGridMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
