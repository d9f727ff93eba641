use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("lg_u = {0} exceeds the supported maximum of {max}", max = crate::morton::MAX_LG_U)]
    GridTooLarge(u32),

    #[error("point ({x}, {y}) lies outside the {side}x{side} grid")]
    PointOutOfRange { x: u64, y: u64, side: u64 },

    #[error("label has {got} bits, grid expects {expected}")]
    LabelLength { got: u32, expected: u32 },

    #[error("invalid rectangle [{x0}, {x1}) x [{y0}, {y1}) for a grid of side {side}")]
    InvalidRect {
        x0: u64,
        y0: u64,
        x1: u64,
        y1: u64,
        side: u64,
    },

    #[error("node position {pos} out of range (|H| = {len})")]
    NodeOutOfRange { pos: usize, len: usize },

    #[error("malformed index: {0}")]
    MalformedIndex(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
