use thiserror::Error;

/// Errors raised by the scattering library.
#[derive(Debug, Error)]
pub enum ZrpError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("prop function vanishes near r = {r}")]
    Pole { r: f64 },

    #[error("integration accuracy: estimated phase error {estimate:e} exceeds tolerance {tolerance:e}")]
    Accuracy { estimate: f64, tolerance: f64 },

    #[error("potential not negligible at matching radius {r_match}: |u| = {value:e}")]
    TailNotNegligible { r_match: f64, value: f64 },

    #[error("scattering length diverges (denominator {denominator:e})")]
    DivergentLength { denominator: f64 },

    #[error("phase equation has complex roots at k = {k} (discriminant {discriminant:e})")]
    ComplexRoots { k: f64, discriminant: f64 },

    #[error("root bracketing failed: found multiplicity {found} of {expected}, worst cell [{lo}, {hi}]")]
    Bracketing {
        found: usize,
        expected: usize,
        lo: f64,
        hi: f64,
    },

    #[error("no interior minimum in series")]
    NoMinimum,

    #[error("fit failed: no restart improved on its starting point")]
    FitFailure { trace: Vec<String> },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T, E = ZrpError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(ZrpError::Domain(msg.into()))
}
