//! One function per subcommand; each returns rows in output order.

use std::f64::consts::PI;

use modssd::gauge::{gauge_trace_numeric, GaugeTraceGrid};
use modssd::logical::Reduced;
use modssd::modular::{bloch_vector, logical_fidelity, recompose, ssd_labels, LogicalState, SsdParams};
use modssd::quad::QuadReport;
use modssd::special::{db_to_zeta, zeta_to_db};
use modssd::states::*;
use modssd::teleport::*;
use modssd::wavefunction::Wavefunction;
use modssd::Complex64;
use rayon::prelude::*;

use crate::config::Settings;
use crate::output::Row;
use crate::CliError;

/// `start:stop:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    let v = match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|e| format!("count {n:?}: {e}"))?;
            linspace(a, b, n)?
        }
        [_] => s.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("expected start:stop:count or a comma list, got {s:?}")),
    };
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(format!("empty or non-finite list {s:?}"));
    }
    Ok(v)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, String> {
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err("ranges need a count of at least 1 and finite ends".into());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
}

/// Named states, `re,im` pairs are handled by [`parse_complex`].
pub fn named_amplitudes(s: &str) -> Option<(Complex64, Complex64)> {
    let h = 0.5f64.sqrt();
    let c = Complex64::new;
    Some(match s {
        "zero" => (c(1.0, 0.0), c(0.0, 0.0)),
        "one" => (c(0.0, 0.0), c(1.0, 0.0)),
        "plus" => (c(h, 0.0), c(h, 0.0)),
        "minus" => (c(h, 0.0), c(-h, 0.0)),
        "plus-i" => (c(h, 0.0), c(0.0, h)),
        "minus-i" => (c(h, 0.0), c(0.0, -h)),
        _ => return None,
    })
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(num(re)?, num(im)?)),
        None => Ok(Complex64::new(num(s)?, 0.0)),
    }
}

/// Amplitudes are rescaled to unit norm.
pub fn normalize(c0: Complex64, c1: Complex64) -> Result<(Complex64, Complex64), CliError> {
    let n = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(CliError::Args("amplitudes must not both be zero".into()));
    }
    Ok((c0 / n, c1 / n))
}

/// `theta:phi` pairs or names, comma separated.
pub fn parse_states(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if let Some((c0, c1)) = named_amplitudes(t) {
                let theta = 2.0 * c1.norm().atan2(c0.norm());
                let phi = if c1.norm() == 0.0 { 0.0 } else { (c1 / c0).arg().rem_euclid(2.0 * PI) };
                return Ok((theta, phi));
            }
            let (a, b) = t.split_once(':').ok_or_else(|| format!("state {t:?}: expected theta:phi or a name"))?;
            let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn intended(c0: Complex64, c1: Complex64) -> LogicalState {
    LogicalState::pure(&[c0, c1]).expect("normalized amplitudes")
}

fn zero() -> LogicalState {
    intended(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
}

fn plus() -> LogicalState {
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    intended(h, h)
}

fn status(report: &QuadReport, warning: Option<&str>, set: &Settings) -> &'static str {
    if !(report.residual <= set.tolerance) {
        "unconverged"
    } else if warning.is_some() {
        "outside_regime"
    } else {
        "ok"
    }
}

fn logical_columns(row: &mut Row, r: &LogicalState) -> Result<(), CliError> {
    let b = bloch_vector(r)?;
    row.state("rho", r).float("bloch_x", b[0]).float("bloch_y", b[1]).float("bloch_z", b[2]).float("purity", r.purity());
    Ok(())
}

fn diagnostics(row: &mut Row, red: &Reduced, set: &Settings) {
    row.int("doublings", red.report.doublings as i64)
        .float("residual", red.report.residual)
        .text("status", status(&red.report, red.warning.as_deref(), set));
}

fn check_qubit(set: &Settings) -> Result<(), CliError> {
    if set.d != 2 {
        return Err(CliError::Args(format!("logical states are implemented for d = 2, got d = {}", set.d)));
    }
    Ok(())
}

/// Runs `f` on every input in a pool of `jobs` threads, keeping input order.
/// The first failing row is reported with its index.
pub fn par_rows<T, F>(inputs: &[T], set: &Settings, f: F) -> Result<Vec<Row>, CliError>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Row>, CliError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(set.jobs)
        .build()
        .map_err(|e| CliError::Args(format!("worker pool: {e}")))?;
    let results: Vec<Result<Vec<Row>, CliError>> = pool.install(|| inputs.par_iter().map(&f).collect());
    let mut rows = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        rows.extend(r.map_err(|e| e.at_row(i))?);
    }
    Ok(rows)
}

pub fn decompose(x: f64, set: &Settings) -> Result<Vec<Row>, CliError> {
    let p = SsdParams::new(set.alpha, set.d)?;
    let l = ssd_labels(x, p);
    let back = recompose(l, p);
    let err = (back - x).abs() / x.abs().max(1.0);
    let mut row = Row::default();
    row.float("x", x)
        .float("alpha", set.alpha)
        .int("d", set.d)
        .int("ell", l.ell)
        .int("m_g", l.m_g)
        .float("u_g", l.u_g)
        .float("recomposed", back)
        .int("doublings", 0)
        .float("residual", err)
        .text("status", if err <= 1e-12 { "ok" } else { "round_trip_failed" });
    Ok(vec![row])
}

pub enum StateKind {
    Squeezed { zeta: f64 },
    Gkp { delta: f64, kappa: f64, c0: Complex64, c1: Complex64 },
}

pub fn logical_state(kind: &StateKind, set: &Settings) -> Result<Vec<Row>, CliError> {
    check_qubit(set)?;
    let mut row = Row::default();
    let red = match *kind {
        StateKind::Squeezed { zeta } => {
            row.text("kind", "squeezed_vacuum").float("zeta", zeta).float("db", zeta_to_db(zeta)?);
            squeezed_vacuum_logical(zeta, set.alpha)?
        }
        StateKind::Gkp { delta, kappa, c0, c1 } => {
            row.text("kind", "approx_gkp").float("delta", delta).float("kappa", kappa).complex("c0", c0).complex("c1", c1);
            approx_gkp_logical(ApproxGkpParams::new(c0, c1, delta, kappa)?, set.alpha)?
        }
    };
    row.float("alpha", set.alpha);
    logical_columns(&mut row, &red.state)?;
    if let StateKind::Gkp { c0, c1, .. } = *kind {
        row.float("fidelity_intended", logical_fidelity(&red.state, &intended(c0, c1))?);
    }
    row.float("fidelity_zero", logical_fidelity(&red.state, &zero())?)
        .float("fidelity_plus", logical_fidelity(&red.state, &plus())?);
    diagnostics(&mut row, &red, set);
    Ok(vec![row])
}

pub fn squeeze_sweep(dbs: &[f64], set: &Settings) -> Result<Vec<Row>, CliError> {
    check_qubit(set)?;
    par_rows(dbs, set, |&db| {
        let zeta = db_to_zeta(db);
        let red = squeezed_vacuum_logical(zeta, set.alpha)?;
        let mut row = Row::default();
        row.float("db", db).float("zeta", zeta).float("alpha", set.alpha);
        logical_columns(&mut row, &red.state)?;
        row.float("fidelity_plus", logical_fidelity(&red.state, &plus())?)
            .float("fidelity_zero", logical_fidelity(&red.state, &zero())?);
        diagnostics(&mut row, &red, set);
        Ok(vec![row])
    })
}

pub fn gkp_fidelity_grid(db: f64, theta_steps: usize, phi_steps: usize, set: &Settings) -> Result<Vec<Row>, CliError> {
    check_qubit(set)?;
    if theta_steps == 0 || phi_steps == 0 {
        return Err(CliError::Args("theta and phi steps must be at least 1".into()));
    }
    let q = db_to_zeta(db);
    let kernel = approx_gkp_kernel(q, q, set.alpha)?;
    let thetas = linspace(0.0, PI, theta_steps).map_err(CliError::Args)?;
    let points: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| (0..phi_steps).map(move |j| (t, 2.0 * PI * j as f64 / phi_steps as f64)))
        .collect();
    par_rows(&points, set, |&(theta, phi)| {
        let (c0, c1) = bloch_amplitudes(theta, phi);
        let red = kernel.state(c0, c1)?;
        let mut row = Row::default();
        row.float("db", db).float("delta", q).float("kappa", q).float("theta", theta).float("phi", phi);
        row.float("fidelity", logical_fidelity(&red.state, &intended(c0, c1))?);
        diagnostics(&mut row, &red, set);
        Ok(vec![row])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    Full,
    Hq,
    Ideal,
}

impl Formula {
    fn name(self) -> &'static str {
        match self {
            Formula::Full => "full",
            Formula::Hq => "hq",
            Formula::Ideal => "ideal",
        }
    }
}

pub struct TeleportPoint {
    pub delta: f64,
    pub kappa: f64,
    pub out: TeleportOutcome,
    pub c0: Complex64,
    pub c1: Complex64,
    pub formula: Formula,
    pub check_oracle: bool,
}

// Gauge trace of the numerically teleported input (or of the closed
// teleported wavefunction when the input is an ideal comb).
fn teleport_oracle(p: &TeleportPoint, set: &Settings) -> Result<LogicalState, CliError> {
    let grid = GaugeTraceGrid { m_max: set.m_max, points_per_bin: set.points_per_bin, ..Default::default() };
    let ssd = SsdParams::new(set.alpha, set.d)?;
    let wf = match p.formula {
        Formula::Ideal => teleported_ideal_gkp_wf(p.c0, p.c1, p.out, set.alpha)?,
        _ => {
            let input = approx_gkp_wf(ApproxGkpParams::new(p.c0, p.c1, p.delta, p.kappa)?, set.alpha)?;
            Wavefunction::Grid(teleport_wf(&input, p.out)?.grid)
        }
    };
    Ok(gauge_trace_numeric(&wf, ssd, grid)?)
}

pub fn teleport_point(p: &TeleportPoint, set: &Settings) -> Result<Vec<Row>, CliError> {
    check_qubit(set)?;
    let params = TeleportedGkpParams { delta: p.delta, kappa: p.kappa, out: p.out, alpha: set.alpha };
    let red = match p.formula {
        Formula::Full => teleported_approx_gkp_logical_full(params, p.c0, p.c1)?,
        Formula::Hq => teleported_approx_gkp_logical_hq(params, p.c0, p.c1)?,
        Formula::Ideal => teleported_ideal_gkp_logical(p.c0, p.c1, p.out, set.alpha)?,
    };
    let (delta, kappa) = if p.formula == Formula::Ideal { (0.0, 0.0) } else { (p.delta, p.kappa) };
    let mut row = Row::default();
    row.text("formula", p.formula.name())
        .float("delta", delta)
        .float("kappa", kappa)
        .float("zeta", p.out.zeta)
        .float("s", p.out.s)
        .float("t", p.out.t)
        .complex("c0", p.c0)
        .complex("c1", p.c1)
        .float("alpha", set.alpha);
    logical_columns(&mut row, &red.state)?;
    row.float("fidelity_intended", logical_fidelity(&red.state, &intended(p.c0, p.c1))?);
    row.int("doublings", red.report.doublings as i64).float("residual", red.report.residual);
    let mut st = status(&red.report, red.warning.as_deref(), set);
    if p.check_oracle {
        let oracle = teleport_oracle(p, set)?;
        let d = red.state.trace_distance(&oracle);
        row.float("oracle_trace_distance", d);
        if st == "ok" && !(d <= set.oracle_tolerance) {
            st = "oracle_mismatch";
        }
    }
    row.text("warning", red.warning.clone().unwrap_or_default()).text("status", st);
    Ok(vec![row])
}

pub fn teleport_avg_sweep(delta_db: &[f64], zeta_db: &[f64], states: &[(f64, f64)], set: &Settings) -> Result<Vec<Row>, CliError> {
    check_qubit(set)?;
    let grid: Vec<(f64, f64)> = delta_db.iter().flat_map(|&d| zeta_db.iter().map(move |&z| (d, z))).collect();
    par_rows(&grid, set, |&(ddb, zdb)| {
        let (delta, zeta) = (db_to_zeta(ddb), db_to_zeta(zdb));
        let kernel = averaged_teleported_gkp_kernel(delta, zeta, set.alpha)?;
        let mut rows = Vec::with_capacity(states.len());
        for &(theta, phi) in states {
            let (c0, c1) = bloch_amplitudes(theta, phi);
            let red = kernel.state(c0, c1)?;
            let mut row = Row::default();
            row.float("delta_db", ddb).float("zeta_db", zdb).float("delta", delta).float("zeta", zeta);
            row.float("theta", theta).float("phi", phi);
            row.float("infidelity", 1.0 - logical_fidelity(&red.state, &intended(c0, c1))?);
            logical_columns(&mut row, &red.state)?;
            diagnostics(&mut row, &red, set);
            rows.push(row);
        }
        Ok(rows)
    })
}
