use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("grid too large for the reference transform: {nodes} nodes (cap {cap})")]
    GridTooLarge { nodes: usize, cap: usize },
    #[error("shearlet fails the QFT commutation condition (max violation {violation:.3e}); transform refused")]
    CommutationRefused { violation: f64 },
    #[error("generator `{0}` is a Fourier multiplier and cannot be sampled in space directly")]
    NotMaterializable(String),
    #[error("admissibility integral unresolved or divergent: innermost |lambda_1| shell carries {fraction:.3} of the total")]
    NonAdmissibleOrUnresolved { fraction: f64 },
    #[error("invalid admissibility constant {0}")]
    InvalidConstant(f64),
    #[error("zero input: {0}")]
    ZeroInput(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("truncated file: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("shape overflows addressable size")]
    ShapeOverflow,
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("not an RGB image: {0}")]
    NotRgb(String),
    #[error(transparent)]
    Os(#[from] std::io::Error),
}
