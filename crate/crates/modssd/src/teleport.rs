//! Noisy two-node cluster-state teleportation of GKP states.
//!
//! Kraus operator for outcomes (s, t) with squeezing zeta:
//! `psi_out(x) = sqrt(2) G(x - t; 1/zeta) int dy e^{isy} G(y; zeta) psi(y - x)`,
//! with `G(.; sd)` a unit-normalized Gaussian. The `sqrt(2)` makes the outcome
//! density `int |psi_out|^2` integrate to one over (s, t).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::logical::{check_amplitudes, LogicalKernel, Reduced, ThetaFamily};
use crate::quad::{gauss_legendre, graded_panels, integrate_vec, QuadReport};
use crate::special::{tau_factor, SiegelTheta, TauMatrix, ThetaTruncation};
use crate::states::ApproxGkpParams;
use crate::wavefunction::{Grid, TeleportedGkpWf, Wavefunction};

pub use crate::logical::{general_logical_state, GeneralLogicalParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportOutcome {
    pub s: f64,
    pub t: f64,
    pub zeta: f64,
}

impl TeleportOutcome {
    pub fn new(s: f64, t: f64, zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) || !s.is_finite() || !t.is_finite() {
            return domain(format!("invalid outcome (s={s}, t={t}, zeta={zeta})"));
        }
        Ok(TeleportOutcome { s, t, zeta })
    }
}

fn gauss_sd(x: f64, sd: f64) -> f64 {
    (-0.5 * (x / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt())
}

/// `int dy e^{isy} G(y; zeta) psi(y - x)`, plus `int |.|` as a scale.
fn y_integral(psi: &Wavefunction, s: f64, zeta: f64, x: f64) -> Result<(Complex64, QuadReport)> {
    let half = 10.0 * zeta;
    let res = psi.resolution();
    let mut max_width = (res.min(zeta) / 2.0).min(half / 4.0);
    if s != 0.0 {
        max_width = max_width.min(1.0 / s.abs());
    }
    let (centres, min_width) = match psi {
        Wavefunction::ApproxGkp(w) => {
            let a = w.alpha;
            let lo = ((-half + x) / a).floor() as i64;
            let hi = ((half + x) / a).ceil() as i64;
            max_width = (zeta.min(a) / 2.0).min(half / 4.0);
            if s != 0.0 {
                max_width = max_width.min(1.0 / s.abs());
            }
            ((lo..=hi).map(|k| x + a * k as f64).collect::<Vec<_>>(), w.params.delta / 4.0)
        }
        _ => (Vec::new(), max_width),
    };
    // psi is cut off outside its support
    let (a, b) = psi.support();
    let (lo, hi) = ((a + x).max(-half), (b + x).min(half));
    if !(hi > lo) {
        return Ok((Complex64::new(0.0, 0.0), QuadReport::default()));
    }
    let panels = graded_panels(lo, hi, &centres, min_width, max_width);
    let (v, report) = integrate_vec(
        |y, out| {
            let f = Complex64::from_polar(gauss_sd(y, zeta), s * y) * psi.eval(y - x)?;
            out[0] = f;
            out[1] = Complex64::new(f.norm(), 0.0);
            Ok(())
        },
        &panels,
        2,
        1e-10,
        6,
    )?;
    Ok((v[0], report))
}

/// Teleported amplitude at one position.
pub fn teleported_amplitude(psi: &Wavefunction, out: TeleportOutcome, x: f64) -> Result<Complex64> {
    let (y, _) = y_integral(psi, out.s, out.zeta, x)?;
    Ok(y * (2f64.sqrt() * gauss_sd(x - out.t, 1.0 / out.zeta)))
}

/// Unnormalized teleported wavefunction on a grid, and the outcome density.
#[derive(Debug, Clone)]
pub struct TeleportResult {
    pub grid: Grid,
    pub probability: f64,
    pub report: QuadReport,
}

const MAX_TELEPORT_SAMPLES: usize = 400_000;

pub fn teleport_wf(psi: &Wavefunction, out: TeleportOutcome) -> Result<TeleportResult> {
    let (a, b) = psi.support();
    let zeta = out.zeta;
    let lo = (-b - 10.0 * zeta).max(out.t - 10.0 / zeta);
    let hi = (-a + 10.0 * zeta).min(out.t + 10.0 / zeta);
    if !(hi > lo) {
        return Err(Error::DegenerateState(0.0));
    }
    // the y-integral smooths input features over a width zeta
    let res = psi.resolution();
    let mut scale = (res * res + zeta * zeta).sqrt().min(1.0 / zeta);
    if out.s != 0.0 {
        scale = scale.min(1.0 / out.s.abs());
    }
    let step = scale / 8.0;
    let n = ((hi - lo) / step).ceil() as usize + 1;
    if n > MAX_TELEPORT_SAMPLES {
        return Err(Error::Budget(format!("teleported grid needs {n} samples")));
    }
    let mut samples = Vec::with_capacity(n);
    let mut report = QuadReport::default();
    for i in 0..n {
        let x = lo + step * i as f64;
        let (y, r) = y_integral(psi, out.s, zeta, x)?;
        report.doublings = report.doublings.max(r.doublings);
        report.residual = report.residual.max(r.residual);
        report.nodes += r.nodes;
        samples.push(y * (2f64.sqrt() * gauss_sd(x - out.t, 1.0 / zeta)));
    }
    let grid = Grid::new(lo, step, samples)?;
    let probability = grid.norm2();
    Ok(TeleportResult { grid, probability, report })
}

/// Closed-form teleported ideal GKP wavefunction (unnormalized).
pub fn teleported_ideal_gkp_wf(c0: Complex64, c1: Complex64, out: TeleportOutcome, alpha: f64) -> Result<Wavefunction> {
    teleported_approx_gkp_wf(ApproxGkpParams::new(c0, c1, 0.0, 0.0)?, out, alpha)
}

/// Closed-form teleported approximate GKP wavefunction (unnormalized).
pub fn teleported_approx_gkp_wf(params: ApproxGkpParams, out: TeleportOutcome, alpha: f64) -> Result<Wavefunction> {
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    Ok(Wavefunction::TeleportedGkp(TeleportedGkpWf {
        c: params.c(),
        zeta: out.zeta,
        s: out.s,
        t: out.t,
        delta: params.delta,
        kappa: params.kappa,
        alpha,
    }))
}

fn i(v: f64) -> Complex64 {
    Complex64::new(0.0, v)
}

pub fn teleported_ideal_gkp_kernel(out: TeleportOutcome, alpha: f64) -> Result<LogicalKernel> {
    let z = out.zeta;
    let tau = TauMatrix::diagonal(&[tau_factor(1.0 / z, alpha) / 2.0, tau_factor(z, alpha), tau_factor(z, alpha)])?;
    let w = [Complex64::new(out.t, 0.0), i(out.s * z * z), i(-out.s * z * z)];
    LogicalKernel::general(z, &tau, w, alpha)
}

pub fn teleported_ideal_gkp_logical(c0: Complex64, c1: Complex64, out: TeleportOutcome, alpha: f64) -> Result<Reduced> {
    teleported_ideal_gkp_kernel(out, alpha)?.state(c0, c1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportedGkpParams {
    pub delta: f64,
    pub kappa: f64,
    pub out: TeleportOutcome,
    pub alpha: f64,
}

/// `K1^2 = zeta^2 + kappa^2 + zeta^4 kappa^2`, `K2^2 = 1 + zeta^2 kappa^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixAux {
    pub k1_sq: f64,
    pub k2_sq: f64,
}

impl AppendixAux {
    pub fn new(kappa: f64, zeta: f64) -> Self {
        let (k2, z2) = (kappa * kappa, zeta * zeta);
        AppendixAux { k1_sq: z2 + k2 + z2 * z2 * k2, k2_sq: 1.0 + z2 * k2 }
    }
}

fn check_quality(delta: f64, kappa: f64) -> Result<()> {
    if !(delta > 0.0 && kappa > 0.0) {
        return domain("delta and kappa must be positive");
    }
    Ok(())
}

/// Kernel of the full (no small-parameter approximation) teleported
/// approximate-GKP reduced state.
pub fn teleported_approx_gkp_kernel_full(p: TeleportedGkpParams) -> Result<LogicalKernel> {
    check_quality(p.delta, p.kappa)?;
    let (a, z, kap, dl) = (p.alpha, p.out.zeta, p.kappa, p.delta);
    let (s, t) = (p.out.s, p.out.t);
    let AppendixAux { k1_sq: k1, k2_sq: k2 } = AppendixAux::new(kap, z);
    let z2 = z * z;
    let diag = 1.0 + 2.0 * k1 * (k2 * dl * dl + z2);
    let m = [k2 * k2, -k2, -k2, -k2, diag, 1.0, -k2, 1.0, diag];
    let scale = PI / (4.0 * a * a * k1 * k2);
    let tau = TauMatrix::new(3, m.iter().map(|v| i(scale * v)).collect())?;
    let mut terms = Vec::with_capacity(16);
    for l in 0..2 {
        for lp in 0..2 {
            let d = l as f64 - lp as f64;
            let pref = Complex64::new(-a * a * (kap * kap + z2 * k2) * d * d / (4.0 * k2), s * a * kap * kap * z2 * d / k2).exp();
            for j in 0..2 {
                for jp in 0..2 {
                    let shift = t * z2 / (2.0 * a * k1);
                    let im = s * z2 / (2.0 * a * k2);
                    let z0 = vec![
                        Complex64::new((l + lp) as f64 / 4.0 - t * k2 * z2 / (2.0 * a * k1), 0.0),
                        Complex64::new(shift + d / (4.0 * k2) - j as f64 / 2.0, -im),
                        Complex64::new(shift - d / (4.0 * k2) - jp as f64 / 2.0, im),
                    ];
                    terms.push((pref, z0));
                }
            }
        }
    }
    let coeff = vec![1.0 / (2.0 * a), 0.0, 0.0];
    LogicalKernel::from_family(&ThetaFamily { alpha: a, tau, coeff, terms })
}

pub fn teleported_approx_gkp_logical_full(p: TeleportedGkpParams, c0: Complex64, c1: Complex64) -> Result<Reduced> {
    teleported_approx_gkp_kernel_full(p)?.state(c0, c1)
}

/// Largest quality parameter for which the high-squeezing form is advertised.
pub const HQ_REGIME_MAX: f64 = 0.4;

pub fn teleported_approx_gkp_kernel_hq(p: TeleportedGkpParams) -> Result<LogicalKernel> {
    if !(p.delta >= 0.0 && p.kappa >= 0.0) {
        return domain("delta and kappa must be non-negative");
    }
    let (a, z) = (p.alpha, p.out.zeta);
    let k_sq = p.kappa * p.kappa + z * z;
    let k = k_sq.sqrt();
    let spike = tau_factor(p.delta, a) + tau_factor(z, a);
    let tau = TauMatrix::diagonal(&[tau_factor(1.0 / k, a) / 2.0, spike, spike])?;
    let sz = p.out.s * z * z;
    let w = [Complex64::new(z * z * p.out.t / k_sq, 0.0), i(sz), i(-sz)];
    LogicalKernel::general(k, &tau, w, a)
}

pub fn teleported_approx_gkp_logical_hq(p: TeleportedGkpParams, c0: Complex64, c1: Complex64) -> Result<Reduced> {
    let mut r = teleported_approx_gkp_kernel_hq(p)?.state(c0, c1)?;
    let worst = p.delta.max(p.kappa).max(p.out.zeta);
    if worst > HQ_REGIME_MAX {
        r.warning = Some(format!("high-squeezing form used with quality parameter {worst} > {HQ_REGIME_MAX}"));
    }
    Ok(r)
}

pub fn averaged_teleported_gkp_kernel(delta: f64, zeta: f64, alpha: f64) -> Result<LogicalKernel> {
    if !(delta > 0.0 && zeta > 0.0) {
        return domain("delta and zeta must be positive");
    }
    let (td, tz) = (tau_factor(delta, alpha), tau_factor(zeta, alpha) / 2.0);
    let zero = Complex64::new(0.0, 0.0);
    let tau = TauMatrix::new(
        3,
        vec![tau_factor(1.0 / delta, alpha) / 2.0, zero, zero, zero, td + tz, tz, zero, tz, td + tz],
    )?;
    LogicalKernel::general((zeta * zeta + delta * delta).sqrt(), &tau, [zero; 3], alpha)
}

/// Reduced state averaged over all teleportation outcomes (kappa = delta).
pub fn averaged_teleported_gkp_logical(delta: f64, zeta: f64, c0: Complex64, c1: Complex64, alpha: f64) -> Result<Reduced> {
    averaged_teleported_gkp_kernel(delta, zeta, alpha)?.state(c0, c1)
}

/// Closed-form position density matrix of the outcome-averaged teleported
/// approximate GKP state, normalized by its diagonal integral.
#[derive(Debug, Clone)]
pub struct AveragedPositionMatrix {
    pub delta: f64,
    pub zeta: f64,
    pub c: [Complex64; 2],
    pub alpha: f64,
    theta: SiegelTheta,
    norm: f64,
}

pub fn averaged_teleported_gkp_position_matrix(
    delta: f64,
    zeta: f64,
    c0: Complex64,
    c1: Complex64,
    alpha: f64,
) -> Result<AveragedPositionMatrix> {
    check_amplitudes(c0, c1)?;
    if !(delta > 0.0 && zeta > 0.0 && alpha > 0.0) {
        return domain("delta, zeta and alpha must be positive");
    }
    let (td, tz) = (tau_factor(delta, alpha), tau_factor(zeta, alpha) / 2.0);
    let tau = TauMatrix::new(2, vec![td + tz, tz, tz, td + tz])?;
    let theta = SiegelTheta::new(&tau, &ThetaTruncation::default())?;
    let mut m = AveragedPositionMatrix { delta, zeta, c: [c0, c1], alpha, theta, norm: 1.0 };
    m.norm = m.diagonal_integral()?;
    if !(m.norm > 1e-300) {
        return Err(Error::DegenerateState(m.norm));
    }
    Ok(m)
}

impl AveragedPositionMatrix {
    fn periodic(&self, x: f64, xp: f64) -> Result<Complex64> {
        let a = self.alpha;
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..2 {
            for jp in 0..2 {
                let c = self.c[j] * self.c[jp].conj();
                if c != Complex64::new(0.0, 0.0) {
                    let z = [
                        Complex64::new(x / (2.0 * a) - j as f64 / 2.0, 0.0),
                        Complex64::new(xp / (2.0 * a) - jp as f64 / 2.0, 0.0),
                    ];
                    s += c * self.theta.eval(&z)?;
                }
            }
        }
        Ok(s)
    }

    fn raw(&self, x: f64, xp: f64) -> Result<Complex64> {
        let env = gauss_sd(x - xp, 2f64.sqrt() / self.zeta)
            * gauss_sd(x, 1.0 / self.delta)
            * gauss_sd(xp, 1.0 / self.delta);
        Ok(self.periodic(x, xp)? * env)
    }

    pub fn eval(&self, x: f64, xp: f64) -> Result<Complex64> {
        Ok(self.raw(x, xp)? / self.norm)
    }

    // Folded onto one period as for the approximate GKP norm.
    fn diagonal_integral(&self) -> Result<f64> {
        let a = self.alpha;
        let dl = self.delta;
        let b = PI / (4.0 * a * a * dl * dl);
        let constant = gauss_sd(0.0, 2f64.sqrt() / self.zeta) * (dl * dl / (2.0 * PI));
        let width = (dl * dl + self.zeta * self.zeta / 2.0).sqrt();
        let panels = graded_panels(-a, a, &[-a, 0.0, a], width / 4.0, a / 4.0);
        let env = crate::special::jacobi_theta;
        let (v, _) = integrate_vec(
            |x, out| {
                let e = env(Complex64::new(x / (2.0 * a), 0.0), Complex64::new(0.0, b))?.re * b.sqrt();
                out[0] = self.periodic(x, x)? * (e * constant);
                Ok(())
            },
            &panels,
            1,
            1e-12,
            6,
        )?;
        Ok(v[0].re)
    }
}

/// Position density matrix averaged over outcomes by direct quadrature over
/// (s, t): the oracle for [`AveragedPositionMatrix`].
pub fn averaged_teleport_density(psi: &Wavefunction, zeta: f64, x: f64, xp: f64) -> Result<(Complex64, QuadReport)> {
    if !(zeta > 0.0) {
        return domain("zeta must be positive");
    }
    // t enters only through G(x-t)G(x'-t); s through the y-integrals.
    let sd_t = 1.0 / zeta;
    let sigma_s = 1.0 / zeta.min(psi.resolution());
    let (t_lo, t_hi) = (0.5 * (x + xp) - 8.0 * sd_t, 0.5 * (x + xp) + 8.0 * sd_t);
    let (s_lo, s_hi) = (-8.0 * sigma_s, 8.0 * sigma_s);
    let mut nodes = 96usize;
    let mut prev: Option<Complex64> = None;
    let mut doublings = 0u32;
    loop {
        let (gx, gw) = gauss_legendre(nodes);
        let map = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
            gx.iter().zip(&gw).map(|(u, w)| (0.5 * (lo + hi) + 0.5 * (hi - lo) * u, 0.5 * (hi - lo) * w)).collect()
        };
        let mut t_part = 0.0;
        for (t, w) in map(t_lo, t_hi) {
            t_part += w * gauss_sd(x - t, sd_t) * gauss_sd(xp - t, sd_t);
        }
        let mut s_part = Complex64::new(0.0, 0.0);
        for (s, w) in map(s_lo, s_hi) {
            let (a, _) = y_integral(psi, s, zeta, x)?;
            let (b, _) = y_integral(psi, s, zeta, xp)?;
            s_part += w * a * b.conj();
        }
        let val = s_part * (2.0 * t_part);
        if let Some(p) = prev {
            let residual = (val - p).norm() / val.norm().max(1e-300);
            if residual < 1e-4 || (val - p).norm() < 1e-10 {
                return Ok((val, QuadReport { doublings, residual, nodes: nodes * nodes }));
            }
            if doublings >= 4 {
                return Err(Error::Accuracy { residual, doublings });
            }
        }
        prev = Some(val);
        nodes *= 2;
        doublings += 1;
    }
}
