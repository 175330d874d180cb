use thiserror::Error;

use crate::zeroset::ZeroWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("symbol not pointwise-defined for variable-coefficient tube operators; use the fiberwise solver")]
    SymbolNotPointwise,

    #[error("degenerate operator: the symbol is identically zero")]
    DegenerateOperator,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("division by vanishing symbol at k = {}, xi = {}", .0.k, .0.xi)]
    VanishingSymbol(ZeroWitness),

    #[error("unsolvable fiber: compatibility defect {defect:.3e}")]
    UnsolvableFiber { defect: f64 },

    #[error("unsolvable fibers at xi bins {bins:?}")]
    UnsolvableFibers { bins: Vec<i64> },

    #[error("exponent {exponent:.3e} exceeds the overflow guard")]
    ExponentOverflow { exponent: f64 },

    #[error("periodicity condition violated: defect {defect:.3e}")]
    Periodicity { defect: f64 },

    #[error("decay fit window has {points} usable points, at least 6 required")]
    WindowTooSmall { points: usize },

    #[error("decay fit window is identically zero")]
    ZeroWindow,

    #[error("function vanishes at t = {t}")]
    Vanishes { t: f64 },

    #[error("malformed data: {0}")]
    Malformed(String),
}
