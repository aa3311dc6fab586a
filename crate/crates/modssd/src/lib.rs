//! Modular subsystem decomposition of continuous-variable states.
//!
//! A position eigenvalue `x = alpha*l + d*alpha*m + u` splits into a logical
//! qudit label `l`, a gauge bin `m` and a modular position `u`. Tracing out
//! the gauge mode gives a d x d logical state; for squeezed vacua, approximate
//! GKP states and their noisily teleported versions the trace has closed forms
//! in Jacobi and Siegel theta functions, which this crate evaluates and checks
//! against brute-force quadrature.

pub mod error;
pub mod gauge;
pub mod logical;
pub mod modular;
pub mod operators;
pub mod quad;
pub mod special;
pub mod states;
pub mod teleport;
pub mod wavefunction;

pub use error::{Error, Result};
pub use num_complex::Complex64;
