//! wasm-bindgen bindings for the static demo page in `www/`. Every export
//! returns a JSON string; errors come back as a JS exception.

use std::f64::consts::PI;

use modssd::modular::{bloch_vector, logical_fidelity, LogicalState};
use modssd::special::db_to_zeta;
use modssd::states::{approx_gkp_kernel, bloch_amplitudes, squeezed_vacuum_logical};
use modssd::teleport::{teleported_approx_gkp_logical_full, TeleportOutcome, TeleportedGkpParams};
use modssd::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn alpha() -> f64 {
    PI.sqrt()
}

fn plus() -> LogicalState {
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    LogicalState::pure(&[h, h]).expect("unit vector")
}

fn zero() -> LogicalState {
    LogicalState::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).expect("unit vector")
}

fn matrix(s: &LogicalState) -> Value {
    let part = |f: fn(Complex64) -> f64| -> Value { (0..2).map(|i| (0..2).map(|j| f(s.get(i, j))).collect::<Vec<_>>()).collect() };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

/// Bloch vectors and fidelities of squeezed vacua from `db_min` to `db_max`.
pub fn squeeze_sweep_json(db_min: f64, db_max: f64, steps: usize) -> modssd::Result<Value> {
    let mut rows = Vec::new();
    for i in 0..steps.max(1) {
        let db = if steps <= 1 { db_min } else { db_min + (db_max - db_min) * i as f64 / (steps - 1) as f64 };
        let r = squeezed_vacuum_logical(db_to_zeta(db), alpha())?;
        rows.push(json!({
            "db": db,
            "bloch": bloch_vector(&r.state)?,
            "fidelity_plus": logical_fidelity(&r.state, &plus())?,
            "fidelity_zero": logical_fidelity(&r.state, &zero())?,
        }));
    }
    Ok(Value::Array(rows))
}

/// Fidelity with the intended state on a theta x phi grid at `db` (delta = kappa).
pub fn gkp_fidelity_grid_json(db: f64, theta_steps: usize, phi_steps: usize) -> modssd::Result<Value> {
    let q = db_to_zeta(db);
    let k = approx_gkp_kernel(q, q, alpha())?;
    let (nt, np) = (theta_steps.max(2), phi_steps.max(1));
    let mut grid = Vec::with_capacity(nt);
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        let mut row = Vec::with_capacity(np);
        for j in 0..np {
            let (c0, c1) = bloch_amplitudes(theta, 2.0 * PI * j as f64 / np as f64);
            let r = k.state(c0, c1)?;
            row.push(logical_fidelity(&r.state, &LogicalState::pure(&[c0, c1])?)?);
        }
        grid.push(row);
    }
    Ok(json!({ "db": db, "theta_steps": nt, "phi_steps": np, "fidelity": grid }))
}

/// Logical state after teleporting an approximate GKP state `(theta, phi)`.
#[allow(clippy::too_many_arguments)]
pub fn teleport_point_json(delta: f64, kappa: f64, zeta: f64, s: f64, t: f64, theta: f64, phi: f64) -> modssd::Result<Value> {
    let out = TeleportOutcome::new(s, t, zeta)?;
    let (c0, c1) = bloch_amplitudes(theta, phi);
    let r = teleported_approx_gkp_logical_full(TeleportedGkpParams { delta, kappa, out, alpha: alpha() }, c0, c1)?;
    Ok(json!({
        "rho": matrix(&r.state),
        "bloch": bloch_vector(&r.state)?,
        "fidelity": logical_fidelity(&r.state, &LogicalState::pure(&[c0, c1])?)?,
        "purity": r.state.purity(),
        "residual": r.report.residual,
    }))
}

fn js(v: modssd::Result<Value>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn squeeze_sweep(db_min: f64, db_max: f64, steps: usize) -> Result<String, JsValue> {
    js(squeeze_sweep_json(db_min, db_max, steps))
}

#[wasm_bindgen]
pub fn gkp_fidelity_grid(db: f64, theta_steps: usize, phi_steps: usize) -> Result<String, JsValue> {
    js(gkp_fidelity_grid_json(db, theta_steps, phi_steps))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn teleport_point(delta: f64, kappa: f64, zeta: f64, s: f64, t: f64, theta: f64, phi: f64) -> Result<String, JsValue> {
    js(teleport_point_json(delta, kappa, zeta, s, t, theta, phi))
}
