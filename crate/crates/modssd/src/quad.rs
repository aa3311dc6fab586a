//! Gauss-Legendre and Simpson rules, and the panel integrator used for the
//! u-integrals of the analytic reduced states.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Simpson weights for `n` (odd) equally spaced nodes with spacing `h`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    debug_assert!(n >= 3 && n % 2 == 1);
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadReport {
    pub doublings: u32,
    pub residual: f64,
    pub nodes: usize,
}

/// Breakpoints on [a, b]: the ends, every centre inside, geometric grading
/// around each centre from `min_width` upward, and no panel wider than
/// `max_width`.
pub fn graded_panels(a: f64, b: f64, centres: &[f64], min_width: f64, max_width: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    let len = b - a;
    let min_width = min_width.max(len * 1e-14);
    for &c in centres {
        if c <= a || c >= b {
            if c == a || c == b {
                let mut h = min_width;
                while h < len {
                    pts.push(if c == a { a + h } else { b - h });
                    h *= 2.0;
                }
            }
            continue;
        }
        pts.push(c);
        let mut h = min_width;
        while h < len {
            pts.push(c - h);
            pts.push(c + h);
            h *= 2.0;
        }
    }
    pts.retain(|p| *p >= a && *p <= b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < min_width * 0.25);
    if let Some(last) = pts.last_mut() {
        *last = b;
    }
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        for p in 1..=pieces {
            out.push(lo + (hi - lo) * p as f64 / pieces as f64);
        }
    }
    out
}

fn rule_on_panels(panels: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity((panels.len() - 1) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in panels.windows(2) {
        let (mid, half) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

/// Integrates a vector-valued `f` over the panels, comparing 16- and 32-point
/// rules per panel and bisecting all panels until the change relative to the
/// largest component is below `rel_tol`.
pub fn integrate_vec<F>(mut f: F, panels: &[f64], len: usize, rel_tol: f64, max_doublings: u32) -> Result<(Vec<Complex64>, QuadReport)>
where
    F: FnMut(f64, &mut [Complex64]) -> Result<()>,
{
    let mut panels = panels.to_vec();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut residual = f64::INFINITY;
    for doubling in 0..=max_doublings {
        let mut coarse = vec![Complex64::new(0.0, 0.0); len];
        let mut fine = vec![Complex64::new(0.0, 0.0); len];
        for (order, acc) in [(16usize, &mut coarse), (32, &mut fine)] {
            let (nodes, weights) = rule_on_panels(&panels, order);
            for (x, w) in nodes.iter().zip(&weights) {
                f(*x, &mut buf)?;
                for (a, v) in acc.iter_mut().zip(&buf) {
                    *a += *w * *v;
                }
            }
        }
        let scale = fine.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = fine.iter().zip(&coarse).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        residual = if scale > 0.0 { diff / scale } else { 0.0 };
        if residual < rel_tol {
            let nodes = (panels.len() - 1) * 48;
            return Ok((fine, QuadReport { doublings: doubling, residual, nodes }));
        }
        let mut split = Vec::with_capacity(2 * panels.len());
        split.push(panels[0]);
        for p in panels.windows(2) {
            split.push(0.5 * (p[0] + p[1]));
            split.push(p[1]);
        }
        panels = split;
    }
    Err(Error::Accuracy { residual, doublings: max_doublings })
}
