use modssd::special::*;
use modssd::Complex64 as C;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

// Plain symmetric partial sums, no tricks.
fn theta_brute(z: C, tau: C, half: i64) -> C {
    (-half..=half)
        .map(|m| {
            let m = m as f64;
            (C::i() * PI * (m * m * tau + 2.0 * m * z)).exp()
        })
        .sum()
}

fn siegel_brute(z: &[C], tau: &[[C; 2]; 2], half: i64) -> C {
    let mut s = c(0.0, 0.0);
    for a in -half..=half {
        for b in -half..=half {
            let n = [a as f64, b as f64];
            let mut q = c(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    q += n[i] * tau[i][j] * n[j];
                }
            }
            s += (C::i() * PI * (q + 2.0 * (n[0] * z[0] + n[1] * z[1]))).exp();
        }
    }
    s
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn gaussian_values() {
    assert!((gaussian(0.0, 1.0).unwrap() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    for x in [0.1, 1.3, 7.0] {
        assert_eq!(gaussian(x, 0.7).unwrap(), gaussian(-x, 0.7).unwrap());
    }
    let s = 0.4f64;
    let total = simpson(|x| gaussian(x, s * s).unwrap(), -12.0 * s, 12.0 * s, 4000);
    assert!((total - 1.0).abs() < 1e-12, "{total}");
    assert!(gaussian(1.0, 0.0).is_err());
    assert!(gaussian(1.0, -1.0).is_err());
}

#[test]
fn tau_factor_values() {
    assert_eq!(tau_factor(0.0, 2.0), c(0.0, 0.0));
    assert!((tau_factor(1.0, PI.sqrt()) - c(0.0, 0.5)).norm() < 1e-15);
    for s in [1e-3, 0.2, 5.0] {
        let t = tau_factor(s, 1.3);
        assert_eq!(t.re, 0.0);
        assert!(t.im > 0.0);
    }
}

#[test]
fn db_conversions() {
    assert_eq!(zeta_to_db(1.0).unwrap(), 0.0);
    assert!((zeta_to_db(0.1).unwrap() - 20.0).abs() < 1e-12);
    assert!((db_to_zeta(zeta_to_db(0.37).unwrap()) - 0.37).abs() < 1e-14);
    assert!(zeta_to_db(0.0).is_err());
    assert!(zeta_to_db(-1.0).is_err());
}

#[test]
fn jacobi_theta_at_i() {
    let v = jacobi_theta(c(0.0, 0.0), c(0.0, 1.0)).unwrap();
    let oracle = theta_brute(c(0.0, 0.0), c(0.0, 1.0), 30);
    assert!((v - oracle).norm() < 1e-12);
    assert!((v.re - 1.08643481).abs() < 1e-8);
    assert!(v.im.abs() < 1e-15);
}

#[test]
fn jacobi_theta_matches_partial_sums() {
    let taus = [c(0.0, 0.3), c(0.4, 0.8), c(-0.2, 2.5), c(0.0, 0.05), c(0.1, 0.02)];
    let zs = [c(0.0, 0.0), c(0.3, 0.0), c(0.17, 0.05), c(-0.4, -0.2), c(1.7, 0.1)];
    for tau in taus {
        for z in zs {
            let v = jacobi_theta(z, tau).unwrap();
            let o = theta_brute(z, tau, 400);
            assert!((v - o).norm() < 1e-12 * o.norm().max(1.0), "z={z} tau={tau}: {v} vs {o}");
        }
    }
}

#[test]
fn jacobi_theta_periodic_and_even() {
    let tau = c(0.1, 0.6);
    for z in [c(0.2, 0.0), c(-0.35, 0.1), c(0.05, -0.3)] {
        let a = jacobi_theta(z, tau).unwrap();
        let b = jacobi_theta(z + 1.0, tau).unwrap();
        let e = jacobi_theta(-z, tau).unwrap();
        assert!((a - b).norm() < 1e-13 * a.norm());
        assert!((a - e).norm() < 1e-13 * a.norm());
    }
}

#[test]
fn jacobi_theta_errors() {
    assert!(jacobi_theta(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    assert!(jacobi_theta(c(0.0, 0.0), c(0.3, -1.0)).is_err());
    // small Im tau with a real part has no dual form to fall back on
    assert!(matches!(jacobi_theta(c(0.0, 0.0), c(0.5, 1e-7)), Err(modssd::Error::Convergence(_))));
    let tight = ThetaTruncation { max_terms_per_axis: 8, ..Default::default() };
    assert!(matches!(jacobi_theta_with(c(0.0, 5.0), c(0.5, 1.0), &tight), Err(modssd::Error::Budget(_))));
}

fn pulse_train_case(t_period: f64, sigma: f64, x: f64) -> (f64, f64) {
    let lhs = jacobi_theta(c(x / t_period, 0.0), c(0.0, 2.0 * PI * sigma * sigma / (t_period * t_period)))
        .unwrap()
        / t_period;
    let rhs: f64 = (-200..=200).map(|n| gaussian(x - n as f64 * t_period, sigma * sigma).unwrap()).sum();
    (lhs.re, rhs)
}

#[test]
fn pulse_train_identity() {
    let period = 2.0 * PI.sqrt();
    let (l, r) = pulse_train_case(period, 0.2, 0.3);
    assert!((l - r).abs() < 1e-12, "{l} vs {r}");
    for sigma in [0.1, 0.5] {
        for i in 0..100 {
            let x = -5.0 + 10.0 * i as f64 / 99.0;
            let (l, r) = pulse_train_case(period, sigma, x);
            assert!((l - r).abs() < 1e-10, "sigma={sigma} x={x}: {l} vs {r}");
        }
    }
}

#[test]
fn truncation_stable_under_doubling() {
    let base = ThetaTruncation::default();
    let doubled = ThetaTruncation { max_terms_per_axis: 2 * base.max_terms_per_axis, ..base };
    for (z, tau) in [(c(0.3, 0.1), c(0.2, 0.01)), (c(0.0, 2.0), c(0.0, 1.5)), (c(0.1, 0.0), c(0.0, 1e-4))] {
        let a = jacobi_theta_with(z, tau, &base).unwrap();
        let b = jacobi_theta_with(z, tau, &doubled).unwrap();
        assert!((a - b).norm() <= base.rel_tol * a.norm());
    }
    let tau = TauMatrix::new(2, vec![c(0.1, 0.3), c(0.0, 0.1), c(0.0, 0.1), c(0.0, 0.2)]).unwrap();
    let z = [c(0.2, 0.05), c(-0.1, 0.0)];
    let a = siegel_theta(&z, &tau, &base).unwrap();
    let b = siegel_theta(&z, &tau, &doubled).unwrap();
    assert!((a - b).norm() <= base.rel_tol * a.norm());
}

#[test]
fn siegel_one_dimensional() {
    let trunc = ThetaTruncation::default();
    for (z, t) in [(c(0.3, 0.0), c(0.0, 0.7)), (c(0.1, 0.2), c(0.3, 1.1)), (c(-0.2, 0.0), c(0.0, 0.01))] {
        let tau = TauMatrix::diagonal(&[t]).unwrap();
        let s = siegel_theta(&[z], &tau, &trunc).unwrap();
        let j = jacobi_theta(z, t).unwrap();
        assert!((s - j).norm() < 1e-14 * j.norm().max(1.0));
    }
}

#[test]
fn siegel_diagonal_factorizes() {
    let trunc = ThetaTruncation::default();
    let d = [c(0.0, 0.4), c(0.2, 0.9), c(0.0, 0.05)];
    let z = [c(0.1, 0.0), c(-0.3, 0.1), c(0.45, 0.0)];
    let tau = TauMatrix::diagonal(&d).unwrap();
    let s = siegel_theta(&z, &tau, &trunc).unwrap();
    let p: C = (0..3).map(|i| jacobi_theta(z[i], d[i]).unwrap()).product();
    assert!((s - p).norm() < 1e-13 * p.norm());
}

#[test]
fn siegel_block_diagonal_factorizes() {
    let trunc = ThetaTruncation::default();
    let t = [c(0.0, 0.7), c(0.1, 0.2), c(0.0, 0.4)];
    let tau = TauMatrix::new(3, vec![t[0], t[1], c(0.0, 0.0), t[1], t[2], c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.3)])
        .unwrap();
    let z = [c(0.2, 0.0), c(0.1, -0.05), c(-0.3, 0.0)];
    let s = siegel_theta(&z, &tau, &trunc).unwrap();
    let block = siegel_brute(&z[..2], &[[t[0], t[1]], [t[1], t[2]]], 40);
    let p = block * jacobi_theta(z[2], c(0.0, 0.3)).unwrap();
    assert!((s - p).norm() < 1e-12 * p.norm());
}

#[test]
fn siegel_two_dimensional_brute_force() {
    let trunc = ThetaTruncation::default();
    let t = [[c(0.0, 1.0), c(0.0, 0.5)], [c(0.0, 0.5), c(0.0, 1.0)]];
    let tau = TauMatrix::new(2, vec![t[0][0], t[0][1], t[1][0], t[1][1]]).unwrap();
    let z = [c(0.0, 0.0), c(0.0, 0.0)];
    let s = siegel_theta(&z, &tau, &trunc).unwrap();
    let o = siegel_brute(&z, &t, 60);
    assert!((s - o).norm() < 1e-12, "{s} vs {o}");

    // coupled, complex, narrow-ish: dual and direct sums must agree with brute force
    let t = [[c(0.0, 0.08), c(0.0, 0.03)], [c(0.0, 0.03), c(0.0, 0.08)]];
    let tau = TauMatrix::new(2, vec![t[0][0], t[0][1], t[1][0], t[1][1]]).unwrap();
    for z in [[c(0.1, 0.0), c(0.3, 0.0)], [c(0.25, 0.02), c(-0.1, -0.01)]] {
        let s = siegel_theta(&z, &tau, &trunc).unwrap();
        let o = siegel_brute(&z, &t, 60);
        assert!((s - o).norm() < 1e-12 * o.norm(), "{s} vs {o}");
    }
}

#[test]
fn tau_matrix_validation() {
    assert!(TauMatrix::new(2, vec![c(0.0, 1.0), c(0.0, 0.5), c(0.0, 0.4), c(0.0, 1.0)]).is_err());
    assert!(TauMatrix::new(2, vec![c(0.0, 1.0), c(0.0, 2.0), c(0.0, 2.0), c(0.0, 1.0)]).is_err());
    assert!(TauMatrix::diagonal(&[c(1.0, 0.0)]).is_err());
    assert!(TauMatrix::new(2, vec![c(0.0, 1.0)]).is_err());
}
