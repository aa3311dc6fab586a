//! Position shifts, momentum shifts and the Gaussian envelope in the
//! subsystem decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::modular::{decompose_real, split_integer, SsdLabels, SsdParams};
use crate::wavefunction::{Grid, Wavefunction};

/// `t = alpha*(d*n + k) + v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftDecomposition {
    pub n: i64,
    pub k: i64,
    pub v: f64,
}

pub fn split_shift(t: f64, params: SsdParams) -> ShiftDecomposition {
    let (m, v) = decompose_real(t, params.alpha);
    let (k, n) = split_integer(m, params.d);
    ShiftDecomposition { n, k, v }
}

/// Boundary terms of a position shift acting on a basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftCarries {
    /// `I_alpha(u + v)`: the modular positions overflow into the next bin.
    pub modular: i64,
    /// `floor((l + k) / d)`: the logical labels wrap.
    pub logical: i64,
    /// `floor((l + k + I_alpha(u + v)) / d)`: total carry into the gauge bin.
    pub total: i64,
}

pub fn shift_carries(t: f64, labels: SsdLabels, params: SsdParams) -> ShiftCarries {
    let s = split_shift(t, params);
    let (modular, _) = decompose_real(labels.u_g + s.v, params.alpha);
    ShiftCarries {
        modular,
        logical: (labels.ell + s.k).div_euclid(params.d),
        total: (labels.ell + s.k + modular).div_euclid(params.d),
    }
}

/// Label of the shifted basis state `X(t)|l>|m,u>`.
pub fn apply_x_shift_labels(t: f64, labels: SsdLabels, params: SsdParams) -> SsdLabels {
    let s = split_shift(t, params);
    let (carry_u, u_new) = decompose_real(labels.u_g + s.v, params.alpha);
    let l = labels.ell + s.k + carry_u;
    SsdLabels { ell: l.rem_euclid(params.d), m_g: s.n + labels.m_g + l.div_euclid(params.d), u_g: u_new }
}

fn check_aliasing(t: f64, step: f64) -> Result<()> {
    if t.abs() * step > PI / 4.0 {
        return Err(Error::Aliasing(t.abs() * step));
    }
    Ok(())
}

/// `exp(i t x) psi(x)` on the wavefunction's sampling grid.
pub fn apply_z_shift_wf(t: f64, psi: &Wavefunction) -> Result<Wavefunction> {
    let mut g = psi.to_grid()?;
    check_aliasing(t, g.step)?;
    let xs: Vec<f64> = g.xs().collect();
    for (v, x) in g.samples.iter_mut().zip(xs) {
        *v *= Complex64::from_polar(1.0, t * x);
    }
    Ok(Wavefunction::Grid(g))
}

/// `(alpha t, diag(1, e^{i alpha t}))`: the logical factor of `Z(t)` for d = 2.
pub fn z_shift_logical_part(t: f64, alpha: f64) -> (f64, DMatrix<Complex64>) {
    let theta = alpha * t;
    let mut m = DMatrix::identity(2, 2);
    m[(1, 1)] = Complex64::from_polar(1.0, theta);
    (theta, m)
}

/// Logical, gauge and interaction factors of `exp(-zeta^2 q^2 / 2)` (d = 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParts {
    pub zeta: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl EnvelopeParts {
    pub fn eps_l(&self) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [0.0, self.eta]]
    }

    pub fn eps_g(&self, m: i64, u: f64) -> f64 {
        let y = 2.0 * self.alpha * m as f64 + u;
        (-self.zeta * self.zeta * y * y / 2.0).exp()
    }

    pub fn eta_g(&self, m: i64, u: f64) -> f64 {
        let y = 2.0 * self.alpha * m as f64 + u;
        (-self.zeta * self.zeta * self.alpha * y).exp()
    }

    /// `eps_l[l][l] * eps_g(m,u) * eta_g(m,u)^l`.
    pub fn product(&self, labels: SsdLabels) -> f64 {
        let l = labels.ell as usize;
        self.eps_l()[l][l] * self.eps_g(labels.m_g, labels.u_g) * self.eta_g(labels.m_g, labels.u_g).powi(l as i32)
    }
}

pub fn envelope_parts(zeta: f64, params: SsdParams) -> Result<EnvelopeParts> {
    if !(zeta > 0.0) {
        return domain(format!("squeezing factor must be positive, got {zeta}"));
    }
    if params.d != 2 {
        return domain("envelope factorization is implemented for d = 2");
    }
    let alpha = params.alpha;
    Ok(EnvelopeParts { zeta, alpha, eta: (-zeta * zeta * alpha * alpha / 2.0).exp() })
}

/// `exp(-zeta^2 x^2 / 2) psi(x)`, renormalized.
pub fn apply_envelope_wf(zeta: f64, psi: &Wavefunction) -> Result<Wavefunction> {
    if !(zeta >= 0.0) {
        return domain("envelope squeezing must be non-negative");
    }
    let mut g: Grid = psi.to_grid()?;
    let xs: Vec<f64> = g.xs().collect();
    for (v, x) in g.samples.iter_mut().zip(xs) {
        *v *= (-zeta * zeta * x * x / 2.0).exp();
    }
    Ok(Wavefunction::Grid(g.normalized()?))
}
