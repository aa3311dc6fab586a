//! Gaussians, Jacobi and Siegel theta functions, and squeezing conversions.
//!
//! Theta series are truncated relative to their largest term. For purely
//! imaginary `tau` the Poisson-dual lattice sum is also available and is used
//! whenever it needs fewer terms, which keeps very narrow spikes (small
//! `Im tau`) cheap and accurate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTruncation {
    pub rel_tol: f64,
    pub max_terms_per_axis: usize,
    pub min_im_tau: f64,
}

impl Default for ThetaTruncation {
    fn default() -> Self {
        ThetaTruncation { rel_tol: 1e-15, max_terms_per_axis: 4096, min_im_tau: 1e-6 }
    }
}

impl ThetaTruncation {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return domain(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        if self.max_terms_per_axis < 8 {
            return domain("max_terms_per_axis must be at least 8");
        }
        Ok(())
    }

    /// Squared radius (in units of the quadratic form) inside which terms exceed
    /// `rel_tol` times the peak term.
    fn radius2(&self) -> f64 {
        (1.0 / self.rel_tol).ln() / PI
    }
}

/// Normalized Gaussian of variance `sigma2`.
pub fn gaussian(x: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return domain(format!("gaussian variance must be positive, got {sigma2}"));
    }
    Ok((-x * x / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt())
}

/// `i pi sigma^2 / (2 alpha^2)`.
pub fn tau_factor(sigma: f64, alpha: f64) -> Complex64 {
    Complex64::new(0.0, PI * sigma * sigma / (2.0 * alpha * alpha))
}

pub fn zeta_to_db(zeta: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return domain(format!("squeezing factor must be positive, got {zeta}"));
    }
    Ok(-10.0 * (zeta * zeta).log10())
}

pub fn db_to_zeta(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

pub fn jacobi_theta(z: Complex64, tau: Complex64) -> Result<Complex64> {
    jacobi_theta_with(z, tau, &ThetaTruncation::default())
}

/// Third-kind Jacobi theta `sum_m exp(i pi m^2 tau + 2 pi i m z)`.
pub fn jacobi_theta_with(z: Complex64, tau: Complex64, trunc: &ThetaTruncation) -> Result<Complex64> {
    trunc.validate()?;
    let b = tau.im;
    if !(b > 0.0) {
        return domain(format!("Im(tau) must be positive, got {b}"));
    }
    let r2 = trunc.radius2();
    let y = z.im;
    if tau.re == 0.0 && b < 1.0 && PI * y * y / b < 200.0 {
        return Ok(theta_dual_1d(z, b, r2));
    }
    if b < trunc.min_im_tau {
        return Err(Error::Convergence(format!(
            "Im(tau) = {b:e} below min_im_tau = {:e}",
            trunc.min_im_tau
        )));
    }
    let n = ((r2 / b).sqrt() + y.abs() / b).ceil() as usize + 2;
    if n > trunc.max_terms_per_axis {
        return Err(Error::Budget(format!("theta needs {n} terms per side")));
    }
    let centre = y.abs() / b;
    let term = |m: f64| (Complex64::i() * PI * (m * m * tau + 2.0 * m * z)).exp();
    let mut sum = Complex64::new(1.0, 0.0);
    for m in 1..=n {
        let mf = m as f64;
        let pair = term(mf) + term(-mf);
        sum += pair;
        if mf > centre + 1.0 && pair.norm() < trunc.rel_tol * sum.norm() {
            break;
        }
    }
    Ok(sum)
}

// theta(z, i b) = b^{-1/2} sum_n exp(-pi (z + n)^2 / b)
fn theta_dual_1d(z: Complex64, b: f64, r2: f64) -> Complex64 {
    let half = (r2 * b).sqrt();
    let lo = (-z.re - half).floor() as i64;
    let hi = (-z.re + half).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in lo..=hi {
        let v = z + n as f64;
        sum += (-PI * v * v / b).exp();
    }
    sum / b.sqrt()
}

/// Complex symmetric matrix with positive-definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl TauMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return domain(format!("tau needs {} entries for N = {n}", n * n));
        }
        let scale = entries.iter().map(|e| e.norm()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..i {
                if (entries[i * n + j] - entries[j * n + i]).norm() > 1e-14 * scale {
                    return domain("tau is not symmetric");
                }
            }
        }
        let im = DMatrix::from_fn(n, n, |i, j| entries[i * n + j].im);
        if im.cholesky().is_none() {
            return domain("Im(tau) is not positive definite");
        }
        Ok(TauMatrix { n, entries })
    }

    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = *d;
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }
}

pub fn siegel_theta(z: &[Complex64], tau: &TauMatrix, trunc: &ThetaTruncation) -> Result<Complex64> {
    SiegelTheta::new(tau, trunc)?.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Representation {
    Direct,
    Dual,
}

#[derive(Debug, Clone)]
struct Block {
    axes: Vec<usize>,
    rep: Representation,
    // complex tau restricted to the block (direct sums)
    tau: Vec<Complex64>,
    // quadratic form of the enumeration: Im tau (direct) or its inverse (dual)
    form: DMatrix<f64>,
    // inverse of `form`, used to centre the direct-sum ellipsoid
    form_inv: DMatrix<f64>,
    enumerator: Ellipsoid,
    prefactor: f64,
}

/// Siegel theta with the representation choice and factorizations done once,
/// for repeated evaluation at many `z`.
#[derive(Debug, Clone)]
pub struct SiegelTheta {
    n: usize,
    blocks: Vec<Block>,
    r2: f64,
}

/// How the block containing an axis is summed and how sharply it varies.
#[derive(Debug, Clone)]
pub struct BlockShape {
    pub axes: Vec<usize>,
    pub dual: bool,
    /// Quadratic form of the summed Gaussians (dual) or Im tau (direct).
    pub form: DMatrix<f64>,
}

impl SiegelTheta {
    pub fn new(tau: &TauMatrix, trunc: &ThetaTruncation) -> Result<Self> {
        trunc.validate()?;
        let n = tau.dim();
        let r2 = trunc.radius2();
        let mut blocks = Vec::new();
        for axes in connected_blocks(tau) {
            let k = axes.len();
            let tb: Vec<Complex64> =
                axes.iter().flat_map(|&i| axes.iter().map(move |&j| tau.get(i, j))).collect();
            let im = DMatrix::from_fn(k, k, |i, j| tb[i * k + j].im);
            let im_inv = im
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Domain("Im(tau) block is singular".into()))?;
            let purely_imag = tb.iter().all(|t| t.re == 0.0);
            let direct_cost = box_cost(&im_inv, r2);
            let dual_cost = box_cost(&im, r2);
            let rep = if purely_imag && dual_cost < direct_cost {
                Representation::Dual
            } else {
                let min_eig = im.clone().symmetric_eigen().eigenvalues.min();
                if !purely_imag && min_eig < trunc.min_im_tau {
                    return Err(Error::Convergence(format!(
                        "smallest eigenvalue of Im(tau) = {min_eig:e} below min_im_tau"
                    )));
                }
                Representation::Direct
            };
            let (form, form_inv, prefactor) = match rep {
                Representation::Direct => (im, im_inv, 1.0),
                Representation::Dual => {
                    let det = im.determinant();
                    (im_inv, im, det.powf(-0.5))
                }
            };
            for i in 0..k {
                let half = (r2 * form_inv[(i, i)]).sqrt();
                if half > trunc.max_terms_per_axis as f64 {
                    return Err(Error::Budget(format!(
                        "lattice half-width {half:.0} on axis {} exceeds {}",
                        axes[i], trunc.max_terms_per_axis
                    )));
                }
            }
            let enumerator = Ellipsoid::new(&form)?;
            blocks.push(Block { axes, rep, tau: tb, form, form_inv, enumerator, prefactor });
        }
        Ok(SiegelTheta { n, blocks, r2 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn block_shapes(&self) -> Vec<BlockShape> {
        self.blocks
            .iter()
            .map(|b| BlockShape { axes: b.axes.clone(), dual: b.rep == Representation::Dual, form: b.form.clone() })
            .collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return domain(format!("z has length {}, tau is {}x{}", z.len(), self.n, self.n));
        }
        let mut total = Complex64::new(1.0, 0.0);
        for block in &self.blocks {
            let zb: Vec<Complex64> = block.axes.iter().map(|&i| z[i]).collect();
            total *= self.eval_block(block, &zb);
        }
        Ok(total)
    }

    fn eval_block(&self, b: &Block, z: &[Complex64]) -> Complex64 {
        let k = z.len();
        let mut sum = Complex64::new(0.0, 0.0);
        match b.rep {
            Representation::Direct => {
                let centre: Vec<f64> = (0..k)
                    .map(|i| -(0..k).map(|j| b.form_inv[(i, j)] * z[j].im).sum::<f64>())
                    .collect();
                b.enumerator.visit(&centre, self.r2, &mut |n| {
                    let mut q = Complex64::new(0.0, 0.0);
                    for i in 0..k {
                        let ni = n[i] as f64;
                        let mut row = Complex64::new(0.0, 0.0);
                        for j in 0..k {
                            row += b.tau[i * k + j] * n[j] as f64;
                        }
                        q += ni * (0.5 * row + z[i]);
                    }
                    sum += (Complex64::i() * 2.0 * PI * q).exp();
                });
            }
            Representation::Dual => {
                let centre: Vec<f64> = z.iter().map(|zi| -zi.re).collect();
                let mut v = vec![Complex64::new(0.0, 0.0); k];
                b.enumerator.visit(&centre, self.r2, &mut |n| {
                    for i in 0..k {
                        v[i] = z[i] + n[i] as f64;
                    }
                    let mut q = Complex64::new(0.0, 0.0);
                    for i in 0..k {
                        let mut row = Complex64::new(0.0, 0.0);
                        for j in 0..k {
                            row += b.form[(i, j)] * v[j];
                        }
                        q += v[i] * row;
                    }
                    sum += (-PI * q).exp();
                });
                sum *= b.prefactor;
            }
        }
        sum
    }
}

fn box_cost(form_inv: &DMatrix<f64>, r2: f64) -> f64 {
    (0..form_inv.nrows()).map(|i| 2.0 * (r2 * form_inv[(i, i)]).sqrt() + 1.0).product()
}

fn connected_blocks(tau: &TauMatrix) -> Vec<Vec<usize>> {
    let n = tau.dim();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start].is_some() {
            continue;
        }
        let id = blocks.len();
        let mut stack = vec![start];
        let mut axes = Vec::new();
        label[start] = Some(id);
        while let Some(i) = stack.pop() {
            axes.push(i);
            for j in 0..n {
                if label[j].is_none() && tau.get(i, j) != Complex64::new(0.0, 0.0) {
                    label[j] = Some(id);
                    stack.push(j);
                }
            }
        }
        axes.sort_unstable();
        blocks.push(axes);
    }
    blocks
}

/// Enumerates integer points with `(n - c)^T A (n - c) <= r2`, A = R^T R.
#[derive(Debug, Clone)]
struct Ellipsoid {
    k: usize,
    // R[i][i]^2 and R[i][j] / R[i][i] for j > i
    diag: Vec<f64>,
    coupling: Vec<f64>,
}

impl Ellipsoid {
    fn new(a: &DMatrix<f64>) -> Result<Self> {
        let k = a.nrows();
        let chol = a
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Domain("lattice form is not positive definite".into()))?;
        let r = chol.l().transpose();
        let diag = (0..k).map(|i| r[(i, i)] * r[(i, i)]).collect();
        let coupling = (0..k * k)
            .map(|ij| {
                let (i, j) = (ij / k, ij % k);
                if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 }
            })
            .collect();
        Ok(Ellipsoid { k, diag, coupling })
    }

    fn visit(&self, centre: &[f64], r2: f64, f: &mut dyn FnMut(&[i64])) {
        let mut n = vec![0i64; self.k];
        self.level(self.k, centre, r2, &mut n, f);
    }

    fn level(&self, level: usize, c: &[f64], rem: f64, n: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if level == 0 {
            f(n);
            return;
        }
        let i = level - 1;
        let mut shift = 0.0;
        for j in level..self.k {
            shift += self.coupling[i * self.k + j] * (n[j] as f64 - c[j]);
        }
        let mid = c[i] - shift;
        let half = (rem.max(0.0) / self.diag[i]).sqrt();
        let lo = (mid - half).ceil() as i64;
        let hi = (mid + half).floor() as i64;
        for ni in lo..=hi {
            let d = ni as f64 - mid;
            let left = rem - self.diag[i] * d * d;
            if left < 0.0 {
                continue;
            }
            n[i] = ni;
            self.level(i, c, left, n, f);
        }
    }
}
