//! Squeezed vacuum and approximate GKP states and their reduced logical states.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::logical::{check_amplitudes, finish, LogicalKernel, Reduced, ThetaFamily};
use crate::modular::LogicalState;
use crate::special::{tau_factor, TauMatrix};
use crate::wavefunction::{ApproxGkpWf, Wavefunction};

/// Stand-in for a literal zero width in the ideal-GKP limits.
pub const IDEAL_REGULARIZER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedVacuumParams {
    pub zeta: f64,
}

impl SqueezedVacuumParams {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return domain(format!("squeezing factor must be positive, got {zeta}"));
        }
        Ok(SqueezedVacuumParams { zeta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxGkpParams {
    pub c0: Complex64,
    pub c1: Complex64,
    pub delta: f64,
    pub kappa: f64,
}

impl ApproxGkpParams {
    pub fn new(c0: Complex64, c1: Complex64, delta: f64, kappa: f64) -> Result<Self> {
        check_amplitudes(c0, c1)?;
        if !(delta >= 0.0 && kappa >= 0.0) || !delta.is_finite() || !kappa.is_finite() {
            return domain("delta and kappa must be finite and non-negative");
        }
        Ok(ApproxGkpParams { c0, c1, delta, kappa })
    }

    pub fn c(&self) -> [Complex64; 2] {
        [self.c0, self.c1]
    }
}

/// Amplitudes `(cos(theta/2), sin(theta/2) e^{i phi})`.
pub fn bloch_amplitudes(theta: f64, phi: f64) -> (Complex64, Complex64) {
    (Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi))
}

/// The qubit state the CV encoding is meant to carry.
pub fn intended_state(c0: Complex64, c1: Complex64) -> Result<LogicalState> {
    check_amplitudes(c0, c1)?;
    LogicalState::pure(&[c0, c1])
}

pub fn squeezed_vacuum_wf(params: SqueezedVacuumParams) -> Wavefunction {
    Wavefunction::SqueezedVacuum(params)
}

/// Reduced logical state of the position-envelope squeezed vacuum
/// `(zeta^2/pi)^{1/4} exp(-zeta^2 x^2 / 2)`.
pub fn squeezed_vacuum_logical(zeta: f64, alpha: f64) -> Result<Reduced> {
    SqueezedVacuumParams::new(zeta)?;
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    let tau = TauMatrix::diagonal(&[tau_factor(1.0 / zeta, alpha) / 2.0])?;
    let off = (-alpha * alpha * zeta * zeta / 4.0).exp();
    let one = Complex64::new(1.0, 0.0);
    let terms = vec![
        (one, vec![Complex64::new(0.0, 0.0)]),
        (Complex64::new(off, 0.0), vec![Complex64::new(0.25, 0.0)]),
        (one, vec![Complex64::new(0.5, 0.0)]),
    ];
    let family = ThetaFamily { alpha, tau, coeff: vec![1.0 / (2.0 * alpha)], terms };
    let (v, report) = family.integrate()?;
    let m = nalgebra::DMatrix::from_row_slice(2, 2, &[v[0], v[1], v[1], v[2]]);
    finish(m, report)
}

pub fn approx_gkp_wf(params: ApproxGkpParams, alpha: f64) -> Result<Wavefunction> {
    if params.delta == 0.0 {
        return Err(crate::error::Error::UnsupportedPointwise);
    }
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    Ok(Wavefunction::ApproxGkp(ApproxGkpWf::new(params, alpha)?))
}

fn regularized(v: f64) -> f64 {
    if v == 0.0 { IDEAL_REGULARIZER } else { v }
}

/// Kernel of the approximate-GKP reduced state; amplitudes enter only at
/// [`LogicalKernel::state`], so Bloch-sphere grids reuse one kernel.
pub fn approx_gkp_kernel(delta: f64, kappa: f64, alpha: f64) -> Result<LogicalKernel> {
    if !(delta >= 0.0 && kappa >= 0.0) {
        return domain("delta and kappa must be non-negative");
    }
    let (delta, kappa) = (regularized(delta), regularized(kappa));
    let tau = TauMatrix::diagonal(&[
        tau_factor(1.0 / kappa, alpha) / 2.0,
        tau_factor(delta, alpha),
        tau_factor(delta, alpha),
    ])?;
    LogicalKernel::general(kappa, &tau, [Complex64::new(0.0, 0.0); 3], alpha)
}

/// Zero `delta` or `kappa` is replaced by [`IDEAL_REGULARIZER`].
pub fn approx_gkp_logical(params: ApproxGkpParams, alpha: f64) -> Result<Reduced> {
    approx_gkp_kernel(params.delta, params.kappa, alpha)?.state(params.c0, params.c1)
}
