//! Tensor-product Gauss–Legendre quadrature on rectangles and disks.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x1 > x0 && y1 > y0;
        if !ok {
            return Err(invalid("rect", format!("[{x0}, {x1}] x [{y0}, {y1}] is empty or unbounded")));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn unit_square() -> Self {
        Self { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }
    }

    /// Square of half-width `h` centred at the origin.
    pub fn centered(h: f64) -> Result<Self> {
        Self::new(-h, h, -h, h)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }
}

/// Closed disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("{radius} is not a positive radius")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Rect(Rect),
    Disk(Disk),
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Rect(r) => r.contains(z),
            Domain::Disk(d) => d.contains(z),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gl_rule(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(2)).expect("n >= 2");
    let rule = GaussLegendre::new(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// `∫_a^b f` with an `n`-point rule.
pub fn integrate_1d<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    gl_rule(n, a, b).iter().map(|&(x, w)| w * f(x)).sum()
}

/// Weighted sample points `(z, w)` covering the domain with `n` points per direction.
/// The disk uses polar coordinates, with the Jacobian folded into the weights.
pub fn tensor_points(domain: &Domain, n: usize) -> Vec<(Complex64, f64)> {
    match domain {
        Domain::Rect(r) => {
            let xs = gl_rule(n, r.x0, r.x1);
            let ys = gl_rule(n, r.y0, r.y1);
            let mut out = Vec::with_capacity(n * n);
            for &(x, wx) in &xs {
                for &(y, wy) in &ys {
                    out.push((Complex64::new(x, y), wx * wy));
                }
            }
            out
        }
        Domain::Disk(d) => {
            let rs = gl_rule(n, 0.0, d.radius);
            let m = 2 * n;
            let dth = std::f64::consts::TAU / m as f64;
            let mut out = Vec::with_capacity(n * m);
            for &(r, wr) in &rs {
                for k in 0..m {
                    let th = (k as f64 + 0.5) * dth;
                    out.push((d.center + Complex64::from_polar(r, th), wr * r * dth));
                }
            }
            out
        }
    }
}

/// `∬ f dA_euc` with `n` points per direction, evaluated in parallel.
pub fn integrate_2d<F>(domain: &Domain, n: usize, f: F) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    tensor_points(domain, n).par_iter().map(|&(z, w)| w * f(z)).sum()
}

/// Doubles the order from `n0` until two successive values agree to
/// `tol · max(1, |I|)`; fails once `n_max` is exceeded.
pub fn integrate_2d_converged<F>(domain: &Domain, f: F, tol: f64, n0: usize, n_max: usize) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let mut n = n0.max(2);
    let mut prev = integrate_2d(domain, n, &f);
    loop {
        let next_n = 2 * n;
        let cur = integrate_2d(domain, next_n, &f);
        if !cur.is_finite() {
            return Err(Error::QuadratureDiverged { coarse: prev, fine: cur, tolerance: tol });
        }
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        if next_n >= n_max {
            return Err(Error::QuadratureDiverged { coarse: prev, fine: cur, tolerance: tol });
        }
        prev = cur;
        n = next_n;
    }
}

/// Same doubling scheme in one dimension.
pub fn integrate_1d_converged<F: Fn(f64) -> f64>(a: f64, b: f64, f: F, tol: f64, n0: usize, n_max: usize) -> Result<f64> {
    let mut n = n0.max(2);
    let mut prev = integrate_1d(a, b, n, &f);
    loop {
        let cur = integrate_1d(a, b, 2 * n, &f);
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        if 2 * n >= n_max || !cur.is_finite() {
            return Err(Error::QuadratureDiverged { coarse: prev, fine: cur, tolerance: tol });
        }
        prev = cur;
        n *= 2;
    }
}
