use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("theta series cannot converge: {0}")]
    Convergence(String),

    #[error("term budget exceeded: {0}")]
    Budget(String),

    #[error("quadrature did not converge: residual {residual:e} after {doublings} doublings")]
    Accuracy { residual: f64, doublings: u32 },

    #[error("state norm underflow ({0:e})")]
    DegenerateState(f64),

    #[error("ideal GKP states (delta = 0) have no pointwise wavefunction; use the analytic reduced-state functions")]
    UnsupportedPointwise,

    #[error("phase factor aliases on the sampling grid: |t|*step = {0} > pi/4")]
    Aliasing(f64),

    #[error("formula produced a non-Hermitian logical matrix (asymmetry {0:e})")]
    FormulaInconsistency(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
