//! Numeric gauge traces: the quadrature oracle for every analytic reduced state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::modular::{LogicalState, SsdParams};
use crate::quad::{simpson_weights, QuadReport};
use crate::wavefunction::Wavefunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeTraceGrid {
    pub m_max: i64,
    pub points_per_bin: usize,
    pub rel_tol: f64,
}

impl Default for GaugeTraceGrid {
    fn default() -> Self {
        GaugeTraceGrid { m_max: 32, points_per_bin: 257, rel_tol: 1e-9 }
    }
}

impl GaugeTraceGrid {
    pub fn validate(&self) -> Result<()> {
        if self.m_max < 1 {
            return domain("m_max must be at least 1");
        }
        if self.points_per_bin < 9 || self.points_per_bin % 2 == 0 {
            return domain("points_per_bin must be odd and at least 9");
        }
        if !(self.rel_tol > 0.0) {
            return domain("rel_tol must be positive");
        }
        Ok(())
    }
}

const MAX_DOUBLINGS: u32 = 6;

/// `rho^{l l'} = sum_m int du psi(l,m,u) conj(psi(l',m,u))`, unit trace.
pub fn gauge_trace_numeric(psi: &Wavefunction, params: SsdParams, grid: GaugeTraceGrid) -> Result<LogicalState> {
    gauge_trace_numeric_report(psi, params, grid).map(|(s, _)| s)
}

pub fn gauge_trace_numeric_report(
    psi: &Wavefunction,
    params: SsdParams,
    grid: GaugeTraceGrid,
) -> Result<(LogicalState, QuadReport)> {
    let d = params.d as usize;
    gauge_trace_with(params, grid, |xs, out| {
        let mut vals = Vec::with_capacity(d);
        for x in xs {
            vals.push(psi.eval(*x)?);
        }
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = vals[i] * vals[j].conj();
            }
        }
        Ok(())
    })
}

/// Gauge trace of a position-space density kernel `rho(x, x')`.
pub fn gauge_trace_kernel<K>(kernel: K, params: SsdParams, grid: GaugeTraceGrid) -> Result<(LogicalState, QuadReport)>
where
    K: Fn(f64, f64) -> Result<Complex64>,
{
    let d = params.d as usize;
    gauge_trace_with(params, grid, |xs, out| {
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = kernel(xs[i], xs[j])?;
            }
        }
        Ok(())
    })
}

// `entries(xs, out)` fills the d*d integrand at the positions x_l = alpha*l + d*alpha*m + u.
fn gauge_trace_with<F>(params: SsdParams, grid: GaugeTraceGrid, entries: F) -> Result<(LogicalState, QuadReport)>
where
    F: Fn(&[f64], &mut [Complex64]) -> Result<()>,
{
    grid.validate()?;
    let (alpha, d) = (params.alpha, params.d as usize);
    let mut m_max = grid.m_max;
    let mut ppb = grid.points_per_bin;
    let mut doublings = 0u32;
    let mut xs = vec![0.0; d];
    let mut buf = vec![Complex64::new(0.0, 0.0); d * d];
    loop {
        let nf = 2 * ppb - 1;
        let h = alpha / (nf - 1) as f64;
        let wf = simpson_weights(nf, h);
        let wc = simpson_weights(ppb, 2.0 * h);
        let mut fine = vec![Complex64::new(0.0, 0.0); d * d];
        let mut coarse = fine.clone();
        let mut inner = fine.clone();
        for m in -m_max..=m_max {
            let mut bin_f = vec![Complex64::new(0.0, 0.0); d * d];
            let mut bin_c = bin_f.clone();
            for i in 0..nf {
                let u = -alpha / 2.0 + h * i as f64;
                for (l, x) in xs.iter_mut().enumerate() {
                    *x = alpha * l as f64 + (d as i64 * m) as f64 * alpha + u;
                }
                entries(&xs, &mut buf)?;
                for k in 0..d * d {
                    bin_f[k] += wf[i] * buf[k];
                    if i % 2 == 0 {
                        bin_c[k] += wc[i / 2] * buf[k];
                    }
                }
            }
            for k in 0..d * d {
                fine[k] += bin_f[k];
                coarse[k] += bin_c[k];
                if 2 * m.abs() <= m_max {
                    inner[k] += bin_f[k];
                }
            }
        }
        let norm: f64 = (0..d).map(|l| fine[l * d + l].re).sum();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::DegenerateState(norm));
        }
        let rel = |a: &[Complex64]| fine.iter().zip(a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / norm;
        let (point_err, tail_err) = (rel(&coarse), rel(&inner));
        let residual = point_err.max(tail_err);
        if residual < grid.rel_tol {
            let m = DMatrix::from_row_slice(d, d, &fine);
            let state = LogicalState::from_unnormalized(m)?;
            let nodes = (2 * m_max as usize + 1) * nf;
            return Ok((state, QuadReport { doublings, residual, nodes }));
        }
        if point_err >= grid.rel_tol {
            ppb = 2 * ppb - 1;
            doublings += 1;
        }
        if tail_err >= grid.rel_tol {
            m_max *= 2;
            doublings += 1;
        }
        if doublings > MAX_DOUBLINGS {
            return Err(Error::Accuracy { residual, doublings });
        }
    }
}

/// Gauge-mode density matrix on the flattened (m, u) grid of `grid`
/// (no refinement), weighted by `sqrt(w_i w_j)` so that its trace, purity and
/// spectrum are those of the operator.
#[derive(Debug, Clone)]
pub struct GaugeMatrix {
    pub m_max: i64,
    pub points_per_bin: usize,
    pub matrix: DMatrix<Complex64>,
}

impl GaugeMatrix {
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        // the Householder steps produce NaN on entries near the underflow limit
        let big = self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let m = self.matrix.map(|v| if v.norm() < 1e-100 * big { Complex64::new(0.0, 0.0) } else { v });
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }
}

pub const GAUGE_MATRIX_CAP: usize = 4096;

pub fn reduced_gauge_numeric(psi: &Wavefunction, params: SsdParams, grid: GaugeTraceGrid) -> Result<GaugeMatrix> {
    grid.validate()?;
    let (alpha, d) = (params.alpha, params.d as usize);
    let bins = (2 * grid.m_max + 1) as usize;
    let n = bins * grid.points_per_bin;
    if n > GAUGE_MATRIX_CAP {
        return Err(Error::Budget(format!("gauge grid of {n} points exceeds {GAUGE_MATRIX_CAP}")));
    }
    let h = alpha / (grid.points_per_bin - 1) as f64;
    let w = simpson_weights(grid.points_per_bin, h);
    let mut v = DMatrix::<Complex64>::zeros(n, d);
    for (b, m) in (-grid.m_max..=grid.m_max).enumerate() {
        for i in 0..grid.points_per_bin {
            let u = -alpha / 2.0 + h * i as f64;
            for l in 0..d {
                let x = alpha * l as f64 + (d as i64 * m) as f64 * alpha + u;
                v[(b * grid.points_per_bin + i, l)] = psi.eval(x)? * w[i].sqrt();
            }
        }
    }
    let sigma = &v * v.adjoint();
    let tr = sigma.trace().re;
    if !(tr > 1e-300) {
        return Err(Error::DegenerateState(tr));
    }
    Ok(GaugeMatrix { m_max: grid.m_max, points_per_bin: grid.points_per_bin, matrix: sigma / Complex64::new(tr, 0.0) })
}
