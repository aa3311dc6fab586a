use modssd::gauge::*;
use modssd::modular::*;
use modssd::special::db_to_zeta;
use modssd::states::*;
use modssd::Complex64 as C;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn h() -> f64 {
    0.5f64.sqrt()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let step = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + step * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * step / 3.0
}

fn plus() -> LogicalState {
    LogicalState::pure(&[c(h(), 0.0), c(h(), 0.0)]).unwrap()
}

fn zero() -> LogicalState {
    LogicalState::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
}

#[test]
fn squeezed_vacuum_moments() {
    for zeta in [0.5, 1.0, 2.0] {
        let wf = squeezed_vacuum_wf(SqueezedVacuumParams::new(zeta).unwrap());
        let w = 14.0 / zeta;
        let norm = simpson(|x| wf.eval(x).unwrap().norm_sqr(), -w, w, 20_000);
        let q2 = simpson(|x| x * x * wf.eval(x).unwrap().norm_sqr(), -w, w, 20_000);
        assert!((norm - 1.0).abs() < 1e-10);
        assert!((q2 - 1.0 / (2.0 * zeta * zeta)).abs() < 1e-8, "zeta={zeta}: {q2}");
    }
    assert!(SqueezedVacuumParams::new(0.0).is_err());
    assert!(SqueezedVacuumParams::new(-1.0).is_err());
}

#[test]
fn squeezed_vacuum_logical_matches_gauge_trace() {
    let p = SsdParams::default();
    for zeta in [0.3, 1.0, 3.0] {
        let an = squeezed_vacuum_logical(zeta, p.alpha).unwrap();
        let wf = squeezed_vacuum_wf(SqueezedVacuumParams::new(zeta).unwrap());
        let num = gauge_trace_numeric(&wf, p, GaugeTraceGrid::default()).unwrap();
        assert!(an.state.max_abs_diff(&num) < 1e-7, "zeta={zeta}");
        assert!(an.state.trace_distance(&num) < 1e-6);
    }
}

#[test]
fn squeezed_vacuum_logical_limits_and_plane() {
    let a = PI.sqrt();
    let rho = squeezed_vacuum_logical(1e-3, a).unwrap().state;
    assert!(rho.trace_distance(&plus()) < 1e-4);
    let vac = squeezed_vacuum_logical(1.0, a).unwrap().state;
    assert!(logical_fidelity(&vac, &zero()).unwrap() > logical_fidelity(&vac, &plus()).unwrap());
    for db in (-18..=18).step_by(2) {
        let rho = squeezed_vacuum_logical(db_to_zeta(db as f64), a).unwrap().state;
        assert!(rho.matrix().iter().all(|v| v.im.abs() <= 1e-12));
        assert!(bloch_vector(&rho).unwrap()[1].abs() <= 1e-12);
    }
}

#[test]
fn squeezed_vacuum_plus_fidelity_monotone() {
    let a = PI.sqrt();
    let mut last = f64::INFINITY;
    for db in (0..=18).rev().step_by(2) {
        let rho = squeezed_vacuum_logical(db_to_zeta(db as f64), a).unwrap().state;
        let f = logical_fidelity(&rho, &plus()).unwrap();
        assert!(f <= last + 1e-12, "{db} dB: {f} > {last}");
        last = f;
    }
}

#[test]
fn approx_gkp_wavefunction_shape() {
    let a = PI.sqrt();
    let wf = approx_gkp_wf(ApproxGkpParams::new(c(1.0, 0.0), c(0.0, 0.0), 0.1, 0.1).unwrap(), a).unwrap();
    let ratio = wf.eval(a).unwrap().norm() / wf.eval(0.0).unwrap().norm();
    assert!(ratio < 1e-10, "{ratio}");
    for k in [-2.0, 2.0, 4.0] {
        assert!(wf.eval(k * a).unwrap().norm() > 0.3 * wf.eval(0.0).unwrap().norm());
    }
    for (delta, kappa) in [(0.1, 0.1), (0.3, 0.2), (0.05, 0.4)] {
        let wf = approx_gkp_wf(ApproxGkpParams::new(c(h(), 0.0), c(0.0, h()), delta, kappa).unwrap(), a).unwrap();
        let w = 12.0 / kappa;
        let n = ((2.0 * w / (delta / 20.0)) as usize) & !1;
        let norm = simpson(|x| wf.eval(x).unwrap().norm_sqr(), -w, w, n);
        assert!((norm - 1.0).abs() < 1e-9, "{delta} {kappa}: {norm}");
    }
    let wf = approx_gkp_wf(ApproxGkpParams::new(c(h(), 0.0), c(h(), 0.0), 0.1, 0.1).unwrap(), a).unwrap();
    let peak = wf.eval(0.0).unwrap().norm();
    for k in -3..=3 {
        assert!(wf.eval(k as f64 * a).unwrap().norm() > 0.5 * peak);
        assert!(wf.eval((k as f64 + 0.5) * a).unwrap().norm() < 1e-6 * peak);
    }
}

#[test]
fn approx_gkp_wavefunction_errors() {
    let a = PI.sqrt();
    let p = ApproxGkpParams::new(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.1).unwrap();
    assert!(matches!(approx_gkp_wf(p, a), Err(modssd::Error::UnsupportedPointwise)));
    assert!(ApproxGkpParams::new(c(1.0, 0.0), c(0.1, 0.0), 0.1, 0.1).is_err());
    assert!(ApproxGkpParams::new(c(1.0, 0.0), c(0.0, 0.0), -0.1, 0.1).is_err());
}

#[test]
fn approx_gkp_logical_matches_gauge_trace() {
    let p = SsdParams::default();
    let cs = [(c(1.0, 0.0), c(0.0, 0.0)), (c(h(), 0.0), c(h(), 0.0)), (c(h(), 0.0), c(0.0, h())), (c(0.6, 0.0), c(0.0, -0.8))];
    for delta in [0.15, 0.3] {
        let kernel = approx_gkp_kernel(delta, delta, p.alpha).unwrap();
        for (c0, c1) in cs {
            let params = ApproxGkpParams::new(c0, c1, delta, delta).unwrap();
            let an = kernel.state(c0, c1).unwrap();
            let num = gauge_trace_numeric(&approx_gkp_wf(params, p.alpha).unwrap(), p, GaugeTraceGrid::default()).unwrap();
            assert!(an.state.trace_distance(&num) < 1e-6, "delta={delta} c=({c0},{c1})");
        }
    }
    // unequal widths
    let params = ApproxGkpParams::new(c(0.6, 0.0), c(0.0, 0.8), 0.2, 0.35).unwrap();
    let an = approx_gkp_logical(params, p.alpha).unwrap();
    let num = gauge_trace_numeric(&approx_gkp_wf(params, p.alpha).unwrap(), p, GaugeTraceGrid::default()).unwrap();
    assert!(an.state.trace_distance(&num) < 1e-6);
}

#[test]
fn approx_gkp_ideal_limit() {
    let a = PI.sqrt();
    for (c0, c1) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(h(), 0.0), c(0.0, h())), (c(0.6, 0.0), c(0.48, 0.64))] {
        let rho = approx_gkp_logical(ApproxGkpParams::new(c0, c1, 0.0, 0.0).unwrap(), a).unwrap().state;
        let target = intended_state(c0, c1).unwrap();
        assert!(rho.max_abs_diff(&target) < 1e-6, "{}", rho.max_abs_diff(&target));
        let rho = approx_gkp_logical(ApproxGkpParams::new(c0, c1, 1e-6, 1e-6).unwrap(), a).unwrap().state;
        assert!(rho.max_abs_diff(&target) < 1e-6);
    }
}

#[test]
fn approx_gkp_poles_beat_equator_at_10_db() {
    let a = PI.sqrt();
    let q = db_to_zeta(10.0);
    let k = approx_gkp_kernel(q, q, a).unwrap();
    let f = |c0: C, c1: C| logical_fidelity(&k.state(c0, c1).unwrap().state, &intended_state(c0, c1).unwrap()).unwrap();
    assert!(f(c(1.0, 0.0), c(0.0, 0.0)) > f(c(h(), 0.0), c(h(), 0.0)));
}

#[test]
fn approx_gkp_phase_and_conjugation() {
    let a = PI.sqrt();
    let k = approx_gkp_kernel(0.25, 0.25, a).unwrap();
    let (c0, c1) = (c(0.6, 0.0), c(0.0, 0.8) * C::from_polar(1.0, 0.3));
    let base = k.state(c0, c1).unwrap().state;
    let ph = C::from_polar(1.0, 2.1);
    assert!(base.max_abs_diff(&k.state(c0 * ph, c1 * ph).unwrap().state) < 1e-13);
    let conj = k.state(c0.conj(), c1.conj()).unwrap().state;
    let transposed = base.matrix().transpose();
    assert!((conj.matrix() - transposed).iter().all(|v| v.norm() < 1e-13));
}

#[test]
fn bloch_amplitude_parameterization() {
    let (c0, c1) = bloch_amplitudes(PI / 2.0, PI / 2.0);
    assert!((c0 - c(h(), 0.0)).norm() < 1e-15 && (c1 - c(0.0, h())).norm() < 1e-15);
    for (th, ph) in [(0.3, 1.0), (2.0, 5.5)] {
        let (c0, c1) = bloch_amplitudes(th, ph);
        let b = bloch_vector(&intended_state(c0, c1).unwrap()).unwrap();
        let expect = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        assert!(b.iter().zip(&expect).all(|(x, y)| (x - y).abs() < 1e-12));
    }
}
