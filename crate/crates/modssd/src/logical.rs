//! The theta-function form shared by every analytic reduced logical state:
//! a prefactor times a u-integral of a Siegel theta with u-linear argument.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::modular::LogicalState;
use crate::quad::{graded_panels, integrate_vec, QuadReport};
use crate::special::{SiegelTheta, TauMatrix, ThetaTruncation};

/// Relative change between successive u-quadrature refinements.
pub const U_QUAD_TOL: f64 = 1e-10;
const U_QUAD_DOUBLINGS: u32 = 5;
const MAX_PANELS: usize = 200_000;

/// An analytic reduced state together with its quadrature diagnostics.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub state: LogicalState,
    pub report: QuadReport,
    /// `max |rho - rho^dagger| / tr rho` before Hermitization.
    pub asymmetry: f64,
    /// Set when parameters lie outside the regime where the formula is accurate.
    pub warning: Option<String>,
}

/// Integrals `pref_k * int_{-alpha/2}^{alpha/2} du Theta(z0_k + u*coeff, tau)`
/// for a family of offsets sharing one `tau`.
pub(crate) struct ThetaFamily {
    pub alpha: f64,
    pub tau: TauMatrix,
    pub coeff: Vec<f64>,
    pub terms: Vec<(Complex64, Vec<Complex64>)>,
}

impl ThetaFamily {
    pub fn integrate(&self) -> Result<(Vec<Complex64>, QuadReport)> {
        let trunc = ThetaTruncation::default();
        let theta = SiegelTheta::new(&self.tau, &trunc)?;
        let half = self.alpha / 2.0;
        let panels = self.panels(&theta, half)?;
        let n = self.coeff.len();
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        let (vals, report) = integrate_vec(
            |u, out| {
                for (k, (_, z0)) in self.terms.iter().enumerate() {
                    for i in 0..n {
                        z[i] = z0[i] + u * self.coeff[i];
                    }
                    out[k] = theta.eval(&z)?;
                }
                Ok(())
            },
            &panels,
            self.terms.len(),
            U_QUAD_TOL,
            U_QUAD_DOUBLINGS,
        )?;
        let out = vals.iter().zip(&self.terms).map(|(v, (p, _))| v * p).collect();
        Ok((out, report))
    }

    // Panel breakpoints from the shape of each theta block along u.
    fn panels(&self, theta: &SiegelTheta, half: f64) -> Result<Vec<f64>> {
        let r2 = (1.0 / ThetaTruncation::default().rel_tol).ln() / PI;
        let mut centres = Vec::new();
        let mut min_width = f64::INFINITY;
        let mut max_width = half / 2.0;
        for shape in theta.block_shapes() {
            let e: Vec<f64> = shape.axes.iter().map(|&i| self.coeff[i]).collect();
            if e.iter().all(|v| *v == 0.0) {
                continue;
            }
            let k = e.len();
            let form = &shape.form;
            if shape.dual {
                let q: f64 = (0..k).map(|i| (0..k).map(|j| e[i] * form[(i, j)] * e[j]).sum::<f64>()).sum();
                let width = 1.0 / (2.0 * PI * q).sqrt();
                if k == 1 {
                    let ax = shape.axes[0];
                    min_width = min_width.min(width / 4.0);
                    for (_, z0) in &self.terms {
                        let x0 = z0[ax].re;
                        let (lo, hi) = (x0 - half * e[0].abs(), x0 + half * e[0].abs());
                        for n in lo.floor() as i64..=hi.ceil() as i64 {
                            let u = (n as f64 - x0) / e[0];
                            if u >= -half - 1e-15 && u <= half + 1e-15 {
                                centres.push(u.clamp(-half, half));
                            }
                        }
                    }
                } else {
                    min_width = min_width.min(width / 4.0);
                    spike_centres(form, &e, &shape.axes, &self.terms, half, r2, width, &mut centres)?;
                }
            } else {
                let lam = form.clone().symmetric_eigen().eigenvalues.min();
                let n_max = (r2 / lam).sqrt() + 1.0;
                let norm_e = e.iter().map(|v| v * v).sum::<f64>().sqrt();
                max_width = max_width.min(1.0 / (n_max * norm_e));
            }
        }
        if (2.0 * half / max_width) as usize > MAX_PANELS {
            return Err(Error::Budget(format!("u-integral needs panels narrower than {max_width:e}")));
        }
        centres.sort_by(|a, b| a.partial_cmp(b).unwrap());
        centres.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let min_width = if min_width.is_finite() { min_width } else { max_width };
        Ok(graded_panels(-half, half, &centres, min_width, max_width))
    }
}

// Values of u where the Gaussian of lattice point n peaks along the line
// x0 + u e, kept when the Gaussian is not negligible there.
#[allow(clippy::too_many_arguments)]
fn spike_centres(
    form: &DMatrix<f64>,
    e: &[f64],
    axes: &[usize],
    terms: &[(Complex64, Vec<Complex64>)],
    half: f64,
    r2: f64,
    width: f64,
    centres: &mut Vec<f64>,
) -> Result<()> {
    let k = e.len();
    let fe: Vec<f64> = (0..k).map(|i| (0..k).map(|j| form[(i, j)] * e[j]).sum()).collect();
    let q: f64 = fe.iter().zip(e).map(|(a, b)| a * b).sum();
    let lam = form.clone().symmetric_eigen().eigenvalues.min();
    let reach = (r2 / lam).sqrt();
    let margin = half + 8.0 * width;
    for (_, z0) in terms {
        let x0: Vec<f64> = axes.iter().map(|&i| z0[i].re).collect();
        let lo: Vec<i64> = (0..k).map(|i| (x0[i] - margin * e[i].abs() - reach).floor() as i64).collect();
        let hi: Vec<i64> = (0..k).map(|i| (x0[i] + margin * e[i].abs() + reach).ceil() as i64).collect();
        let count: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
        if count > MAX_PANELS as f64 {
            return Err(Error::Budget(format!("u-integral spike search over {count} lattice points")));
        }
        let mut n = lo.clone();
        loop {
            let d: Vec<f64> = (0..k).map(|i| n[i] as f64 - x0[i]).collect();
            let fd: f64 = fe.iter().zip(&d).map(|(a, b)| a * b).sum();
            let full: f64 = (0..k).map(|i| (0..k).map(|j| d[i] * form[(i, j)] * d[j]).sum::<f64>()).sum();
            let u = fd / q;
            if full - fd * fd / q <= r2 && u.abs() <= margin {
                centres.push(u.clamp(-half, half));
            }
            let mut i = 0;
            while i < k {
                n[i] += 1;
                if n[i] <= hi[i] {
                    break;
                }
                n[i] = lo[i];
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(())
}

/// Parameters of the general reduced-state form.
#[derive(Debug, Clone)]
pub struct GeneralLogicalParams {
    pub k: f64,
    pub tau: TauMatrix,
    pub w: [Complex64; 3],
    pub c0: Complex64,
    pub c1: Complex64,
    pub alpha: f64,
}

/// The sixteen integrals `I[l][l'][j][j']`; a qubit state follows as
/// `rho^{l l'} = sum_{j j'} c_j conj(c_j') I[l][l'][j][j']`.
#[derive(Debug, Clone)]
pub struct LogicalKernel {
    entries: [[[[Complex64; 2]; 2]; 2]; 2],
    pub report: QuadReport,
}

pub(crate) fn idx(l: usize, lp: usize, j: usize, jp: usize) -> usize {
    ((l * 2 + lp) * 2 + j) * 2 + jp
}

impl LogicalKernel {
    pub(crate) fn from_family(family: &ThetaFamily) -> Result<Self> {
        let (vals, report) = family.integrate()?;
        let mut entries = [[[[Complex64::new(0.0, 0.0); 2]; 2]; 2]; 2];
        for l in 0..2 {
            for lp in 0..2 {
                for j in 0..2 {
                    for jp in 0..2 {
                        entries[l][lp][j][jp] = vals[idx(l, lp, j, jp)];
                    }
                }
            }
        }
        Ok(LogicalKernel { entries, report })
    }

    /// Kernel of the general form with damping `K`, matrix `tau` and shift `w`.
    pub fn general(k: f64, tau: &TauMatrix, w: [Complex64; 3], alpha: f64) -> Result<Self> {
        if tau.dim() != 3 {
            return domain("general logical form needs a 3x3 tau");
        }
        if !(alpha > 0.0) {
            return domain("alpha must be positive");
        }
        let mut terms = Vec::with_capacity(16);
        for l in 0..2 {
            for lp in 0..2 {
                let dl = l as f64 - lp as f64;
                let pref = Complex64::new((-k * k * alpha * alpha * dl * dl / 4.0).exp(), 0.0);
                for j in 0..2 {
                    for jp in 0..2 {
                        let z0 = vec![
                            Complex64::new((l + lp) as f64 / 4.0, 0.0) - w[0] / (2.0 * alpha),
                            Complex64::new((l as f64 - j as f64) / 2.0, 0.0) - w[1] / (2.0 * alpha),
                            Complex64::new((lp as f64 - jp as f64) / 2.0, 0.0) - w[2] / (2.0 * alpha),
                        ];
                        terms.push((pref, z0));
                    }
                }
            }
        }
        let coeff = vec![1.0 / (2.0 * alpha); 3];
        Self::from_family(&ThetaFamily { alpha, tau: tau.clone(), coeff, terms })
    }

    pub fn state(&self, c0: Complex64, c1: Complex64) -> Result<Reduced> {
        check_amplitudes(c0, c1)?;
        let c = [c0, c1];
        let m = DMatrix::from_fn(2, 2, |l, lp| {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                for jp in 0..2 {
                    s += c[j] * c[jp].conj() * self.entries[l][lp][j][jp];
                }
            }
            s
        });
        finish(m, self.report)
    }
}

pub(crate) fn check_amplitudes(c0: Complex64, c1: Complex64) -> Result<()> {
    let n = c0.norm_sqr() + c1.norm_sqr();
    if (n - 1.0).abs() > 1e-12 {
        return domain(format!("|c0|^2 + |c1|^2 = {n}, expected 1"));
    }
    Ok(())
}

/// Checks Hermiticity, then Hermitizes and normalizes.
pub(crate) fn finish(m: DMatrix<Complex64>, report: QuadReport) -> Result<Reduced> {
    let tr = m.trace().re;
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::DegenerateState(tr));
    }
    let asymmetry = (&m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max) / tr;
    if asymmetry > 1e-6 {
        return Err(Error::FormulaInconsistency(asymmetry));
    }
    let state = LogicalState::from_unnormalized(m)?;
    Ok(Reduced { state, report, asymmetry, warning: None })
}

pub fn general_logical_state(p: &GeneralLogicalParams) -> Result<Reduced> {
    LogicalKernel::general(p.k, &p.tau, p.w, p.alpha)?.state(p.c0, p.c1)
}
