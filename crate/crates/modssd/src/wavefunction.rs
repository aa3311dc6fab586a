//! Position wavefunctions: analytic families and sampled grids.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::modular::{recompose, SsdLabels, SsdParams};
use crate::quad::{graded_panels, integrate_vec, simpson_weights};
use crate::special::{jacobi_theta, tau_factor};
use crate::states::{ApproxGkpParams, SqueezedVacuumParams};

/// Samples `psi(x_min + i*step)`; evaluated between samples by 4-point
/// Lagrange interpolation and as zero outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub step: f64,
    pub samples: Vec<Complex64>,
}

impl Grid {
    pub fn new(x_min: f64, step: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0) || samples.len() < 2 {
            return domain("grid needs step > 0 and at least 2 samples");
        }
        Ok(Grid { x_min, step, samples })
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.step * (self.samples.len() - 1) as f64
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| self.x_min + self.step * i as f64)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.samples.len();
        let s = (x - self.x_min) / self.step;
        if !(s >= -1e-9 && s <= (n - 1) as f64 + 1e-9) {
            return Complex64::new(0.0, 0.0);
        }
        if n < 4 {
            let i = (s.floor() as usize).min(n - 2);
            let f = s - i as f64;
            return self.samples[i] * (1.0 - f) + self.samples[i + 1] * f;
        }
        let i0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut out = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let mut l = 1.0;
            for b in 0..4 {
                if a != b {
                    l *= (s - (i0 + b) as f64) / (a as f64 - b as f64);
                }
            }
            out += self.samples[i0 + a] * l;
        }
        out
    }

    /// Integral of |psi|^2 (composite Simpson, trapezoid on a trailing odd interval).
    pub fn norm2(&self) -> f64 {
        let n = self.samples.len();
        let vals: Vec<f64> = self.samples.iter().map(|v| v.norm_sqr()).collect();
        if n < 3 {
            return 0.5 * self.step * (vals[0] + vals[1]);
        }
        let m = if n % 2 == 1 { n } else { n - 1 };
        let w = simpson_weights(m, self.step);
        let mut s: f64 = vals[..m].iter().zip(&w).map(|(v, w)| v * w).sum();
        if m < n {
            s += 0.5 * self.step * (vals[n - 2] + vals[n - 1]);
        }
        s
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm2();
        if !(n2 > 1e-300) {
            return Err(Error::DegenerateState(n2));
        }
        let k = 1.0 / n2.sqrt();
        for v in &mut self.samples {
            *v *= k;
        }
        Ok(self)
    }
}

/// Normalized approximate GKP codeword superposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxGkpWf {
    pub params: ApproxGkpParams,
    pub alpha: f64,
    scale: f64,
}

impl ApproxGkpWf {
    pub(crate) fn new(params: ApproxGkpParams, alpha: f64) -> Result<Self> {
        let mut wf = ApproxGkpWf { params, alpha, scale: 1.0 };
        let n2 = wf.norm2_raw()?;
        if !(n2 > 1e-300) || !n2.is_finite() {
            return Err(Error::DegenerateState(n2));
        }
        wf.scale = 1.0 / n2.sqrt();
        Ok(wf)
    }

    pub fn window(&self) -> f64 {
        10.0 / self.params.kappa.max(1e-3)
    }

    fn comb(&self, x: f64) -> Result<Complex64> {
        let tau = tau_factor(self.params.delta, self.alpha);
        let mut s = Complex64::new(0.0, 0.0);
        for (j, c) in self.params.c().iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                let z = Complex64::new(x / (2.0 * self.alpha) - j as f64 / 2.0, 0.0);
                s += c * jacobi_theta(z, tau)?;
            }
        }
        Ok(s)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        if x.abs() > self.window() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let k = self.params.kappa;
        Ok(self.comb(x)? * (self.scale * (-0.5 * k * k * x * x).exp()))
    }

    // Folds the window onto one period [-alpha, alpha): the comb factor is
    // 2 alpha periodic, the envelope sums to a theta function.
    fn norm2_raw(&self) -> Result<f64> {
        let a = self.alpha;
        let (delta, kappa) = (self.params.delta, self.params.kappa);
        if kappa == 0.0 {
            return domain("approximate GKP wavefunction needs kappa > 0 to be normalizable");
        }
        let b = PI / (4.0 * a * a * kappa * kappa);
        let panels = graded_panels(-a, a, &[-a, 0.0, a], delta / 4.0, a / 4.0);
        let (v, _) = integrate_vec(
            |x, out| {
                let env = jacobi_theta(Complex64::new(x / (2.0 * a), 0.0), Complex64::new(0.0, b))?.re * b.sqrt();
                out[0] = Complex64::new(self.comb(x)?.norm_sqr() * env, 0.0);
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

/// Closed-form output of the noisy teleportation channel acting on an
/// approximate (or, with delta = kappa = 0, ideal) GKP state. Unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportedGkpWf {
    pub c: [Complex64; 2],
    pub zeta: f64,
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    pub kappa: f64,
    pub alpha: f64,
}

impl TeleportedGkpWf {
    fn k2_sq(&self) -> f64 {
        1.0 + self.zeta * self.zeta * self.kappa * self.kappa
    }

    // Gaussian precision of |psi|^2 envelope and its centre
    fn envelope(&self) -> (f64, f64) {
        let z2 = self.zeta * self.zeta;
        let prec = z2 + self.kappa * self.kappa / self.k2_sq();
        (prec, self.t * z2 / prec)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let (a, z2, k2) = (self.alpha, self.zeta * self.zeta, self.k2_sq());
        let xc = Complex64::new(x, -self.s * z2);
        let env_t = ((-0.5 * z2 * (x - self.t).powi(2)).exp()) * self.zeta / (2.0 * PI).sqrt();
        let env_k = (-(self.kappa * self.kappa) * xc * xc / (2.0 * k2)).exp();
        let tau = Complex64::new(0.0, PI * (z2 + self.delta * self.delta * k2) / (2.0 * a * a * k2));
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, c) in self.c.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                sum += c * jacobi_theta(xc / (2.0 * a * k2) - j as f64 / 2.0, tau)?;
            }
        }
        Ok(sum * env_k * env_t)
    }

    fn resolution(&self) -> f64 {
        let k2 = self.k2_sq();
        let spike = k2.sqrt() * (self.zeta * self.zeta + self.delta * self.delta * k2).sqrt();
        spike.min(1.0 / self.envelope().0.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Wavefunction {
    SqueezedVacuum(SqueezedVacuumParams),
    ApproxGkp(ApproxGkpWf),
    TeleportedGkp(TeleportedGkpWf),
    Grid(Grid),
}

impl Wavefunction {
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        match self {
            Wavefunction::SqueezedVacuum(p) => {
                let z = p.zeta;
                Ok(Complex64::new((z * z / PI).powf(0.25) * (-0.5 * z * z * x * x).exp(), 0.0))
            }
            Wavefunction::ApproxGkp(w) => w.eval(x),
            Wavefunction::TeleportedGkp(w) => w.eval(x),
            Wavefunction::Grid(g) => Ok(g.eval(x)),
        }
    }

    pub fn eval_subsystem(&self, labels: SsdLabels, params: SsdParams) -> Result<Complex64> {
        self.eval(recompose(labels, params))
    }

    /// Interval outside which the wavefunction is negligible (or zero).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Wavefunction::SqueezedVacuum(p) => (-9.0 / p.zeta, 9.0 / p.zeta),
            Wavefunction::ApproxGkp(w) => (-w.window(), w.window()),
            Wavefunction::TeleportedGkp(w) => {
                let (prec, centre) = w.envelope();
                let half = 9.0 / prec.sqrt();
                (centre - half, centre + half)
            }
            Wavefunction::Grid(g) => (g.x_min, g.x_max()),
        }
    }

    /// Smallest length scale of the wavefunction's features.
    pub fn resolution(&self) -> f64 {
        match self {
            Wavefunction::SqueezedVacuum(p) => 1.0 / p.zeta,
            Wavefunction::ApproxGkp(w) => w.params.delta.min(1.0 / w.params.kappa),
            Wavefunction::TeleportedGkp(w) => w.resolution(),
            Wavefunction::Grid(g) => 16.0 * g.step,
        }
    }

    /// Samples on the wavefunction's own grid (support, step = resolution/16).
    pub fn to_grid(&self) -> Result<Grid> {
        if let Wavefunction::Grid(g) = self {
            return Ok(g.clone());
        }
        let (lo, hi) = self.support();
        let step = self.resolution() / 16.0;
        self.sample(lo, step, ((hi - lo) / step).ceil() as usize + 1)
    }

    pub fn sample(&self, x_min: f64, step: f64, n: usize) -> Result<Grid> {
        if n > 50_000_000 {
            return Err(Error::Budget(format!("{n} grid samples")));
        }
        let samples = (0..n).map(|i| self.eval(x_min + step * i as f64)).collect::<Result<Vec<_>>>()?;
        Grid::new(x_min, step, samples)
    }
}
