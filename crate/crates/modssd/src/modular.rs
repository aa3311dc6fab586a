//! Modular label arithmetic and logical (qudit) states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsdParams {
    pub alpha: f64,
    pub d: i64,
}

impl Default for SsdParams {
    fn default() -> Self {
        SsdParams { alpha: PI.sqrt(), d: 2 }
    }
}

impl SsdParams {
    pub fn new(alpha: f64, d: i64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if d < 2 {
            return domain(format!("logical dimension must be at least 2, got {d}"));
        }
        Ok(SsdParams { alpha, d })
    }
}

/// Position of a real number in the logical / gauge-bin / modular-position
/// split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsdLabels {
    pub ell: i64,
    pub m_g: i64,
    pub u_g: f64,
}

/// Nearest multiple of `alpha` with ties rounded up: `x = alpha*m + u`,
/// `u` in `[-alpha/2, alpha/2)`.
pub fn decompose_real(x: f64, alpha: f64) -> (i64, f64) {
    let mut m = (x / alpha + 0.5).floor();
    let mut u = x - alpha * m;
    // rounding in x/alpha can leave u a hair outside the interval
    // and then the neighbouring bin can overshoot the other edge
    let half = alpha / 2.0;
    if u >= half {
        m += 1.0;
        u = (x - alpha * m).max(-half);
    } else if u < -half {
        m -= 1.0;
        u = (x - alpha * m).min(f64::from_bits(half.to_bits() - 1));
    }
    (m as i64, u)
}

/// Floor modulo and floor division: `m = d*m_g + ell`, `0 <= ell < d`.
pub fn split_integer(m: i64, d: i64) -> (i64, i64) {
    (m.rem_euclid(d), m.div_euclid(d))
}

pub fn ssd_labels(x: f64, params: SsdParams) -> SsdLabels {
    let (m, u) = decompose_real(x, params.alpha);
    let (ell, m_g) = split_integer(m, params.d);
    SsdLabels { ell, m_g, u_g: u }
}

pub fn recompose(labels: SsdLabels, params: SsdParams) -> f64 {
    params.alpha * (labels.ell + params.d * labels.m_g) as f64 + labels.u_g
}

/// A d x d density matrix on the logical qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalState {
    matrix: DMatrix<Complex64>,
}

impl LogicalState {
    /// Wraps a matrix after checking it is square, Hermitian (1e-12), unit
    /// trace (1e-10) and PSD (-1e-10).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let s = LogicalState { matrix };
        s.check(1e-12, 1e-10, 1e-10)?;
        Ok(s)
    }

    /// Hermitizes and divides by the trace.
    pub fn from_unnormalized(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return domain("density matrix must be square");
        }
        let herm = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = herm.trace().re;
        if !(tr.abs() > 1e-300) || !tr.is_finite() {
            return Err(crate::error::Error::DegenerateState(tr));
        }
        Self::new(herm / Complex64::new(tr, 0.0))
    }

    /// `|psi><psi|` for amplitudes `c`, normalized.
    pub fn pure(c: &[Complex64]) -> Result<Self> {
        let n2: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        if !(n2 > 0.0) {
            return domain("zero state vector");
        }
        let d = c.len();
        let m = DMatrix::from_fn(d, d, |i, j| c[i] * c[j].conj() / n2);
        Self::new(m)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        LogicalState { matrix: DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0) }
    }

    fn check(&self, herm_tol: f64, trace_tol: f64, psd_tol: f64) -> Result<()> {
        let m = &self.matrix;
        if !m.is_square() {
            return domain("density matrix must be square");
        }
        let asym = (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if asym > herm_tol {
            return domain(format!("density matrix not Hermitian (asymmetry {asym:e})"));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > trace_tol {
            return domain(format!("density matrix trace {tr} != 1"));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -psd_tol {
            return domain(format!("density matrix not PSD (eigenvalue {min:e})"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        Self::from_unnormalized(u * &self.matrix * u.adjoint())
    }

    pub fn trace_distance(&self, other: &LogicalState) -> f64 {
        let diff = &self.matrix - &other.matrix;
        let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        0.5 * herm.symmetric_eigen().eigenvalues.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &LogicalState) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2`.
pub fn logical_fidelity(rho: &LogicalState, sigma: &LogicalState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return domain("fidelity of states with different dimensions");
    }
    for s in [rho, sigma] {
        s.check(1e-9, 1e-9, 1e-8)?;
    }
    if rho.dim() == 2 {
        // Tr(rho sigma) + 2 sqrt(det rho det sigma) stays accurate for pure inputs
        let det = |m: &DMatrix<Complex64>| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
        let overlap = (rho.matrix() * sigma.matrix()).trace().re;
        return Ok((overlap + 2.0 * (det(rho.matrix()) * det(sigma.matrix())).sqrt()).clamp(0.0, 1.0));
    }
    let rs = psd_sqrt(sigma.matrix());
    let inner = &rs * rho.matrix() * &rs;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let t: f64 = inner.symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((t * t).clamp(0.0, 1.0))
}

/// `(2 Re rho_01, 2 Im rho_10, rho_00 - rho_11)`.
pub fn bloch_vector(rho: &LogicalState) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return domain(format!("Bloch vector needs a qubit, got d = {}", rho.dim()));
    }
    let m = rho.matrix();
    Ok([2.0 * m[(0, 1)].re, 2.0 * m[(1, 0)].im, (m[(0, 0)] - m[(1, 1)]).re])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Z,
}

/// Qudit shift `X|l> = |l+1 mod d>` or clock `Z = diag(exp(2 pi i l/d))`.
pub fn logical_pauli(which: Pauli, d: usize) -> Result<DMatrix<Complex64>> {
    if d < 2 {
        return domain("logical dimension must be at least 2");
    }
    Ok(match which {
        Pauli::X => DMatrix::from_fn(d, d, |i, j| {
            if i == (j + 1) % d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        }),
        Pauli::Z => DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 2.0 * PI * i as f64 / d as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
    })
}
