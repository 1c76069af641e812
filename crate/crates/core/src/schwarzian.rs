//! Schwarzian derivatives, quadratic differentials and their norms.

use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::holomorphic::Holomorphic;
use crate::quadrature::{integrate_2d_converged, Domain};

/// `S(f) = f'''/f' − (3/2)(f''/f')²` at `z`.
pub fn schwarzian<H: Holomorphic + ?Sized>(f: &H, z: Complex64) -> Result<Complex64> {
    let a = f.taylor(z, 3)?;
    let scale = a.iter().map(|c| c.norm()).fold(f64::MIN_POSITIVE, f64::max);
    if a[1].norm() <= 1e-14 * scale {
        return Err(Error::CriticalPoint { re: z.re, im: z.im });
    }
    // f' = a1, f'' = 2a2, f''' = 6a3
    let r2 = a[2] / a[1];
    Ok(6.0 * a[3] / a[1] - 6.0 * r2 * r2)
}

/// `|S(g∘f)(z) − (S(g)(f(z)) f'(z)² + S(f)(z))|`.
pub fn cocycle_residual<F, G>(f: &F, g: &G, z: Complex64) -> Result<f64>
where
    F: Holomorphic + ?Sized,
    G: Holomorphic + ?Sized,
{
    let composed = |w: Complex64| g.eval(f.eval(w));
    let lhs = schwarzian(&composed, z)?;
    let fz = f.taylor(z, 1)?;
    let rhs = schwarzian(g, fz[0])? * fz[1] * fz[1] + schwarzian(f, z)?;
    Ok((lhs - rhs).norm())
}

/// `|S(f)(z)| (1 − |z|²)² / 4`: the pointwise norm of `S(f)` against the
/// hyperbolic metric `4|dz|²/(1 − |z|²)²` of the unit disk.
pub fn nehari_ratio<H: Holomorphic + ?Sized>(f: &H, z: Complex64) -> Result<f64> {
    let s = schwarzian(f, z)?;
    Ok(s.norm() * (1.0 - z.norm_sqr()).powi(2) / 4.0)
}

/// Largest [`nehari_ratio`] over a polar grid of the disk `|z| ≤ r_max`.
pub fn nehari_sup<H: Holomorphic + ?Sized>(f: &H, r_max: f64, n_radii: usize, n_angles: usize) -> Result<f64> {
    let mut best = nehari_ratio(f, Complex64::new(0.0, 0.0))?;
    for i in 1..=n_radii {
        let r = r_max * i as f64 / n_radii as f64;
        for k in 0..n_angles {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n_angles as f64);
            best = best.max(nehari_ratio(f, z)?);
        }
    }
    Ok(best)
}

type ComplexFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;
type DensityFn = dyn Fn(Complex64) -> f64 + Send + Sync;

/// Holomorphic quadratic differential `φ dz²` on a chart domain.
#[derive(Clone)]
pub struct QuadDiff {
    phi: Arc<ComplexFn>,
    pub domain: Domain,
}

impl std::fmt::Debug for QuadDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadDiff").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl QuadDiff {
    pub fn new<F>(phi: F, domain: Domain) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { phi: Arc::new(phi), domain }
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        (self.phi)(z)
    }

    pub fn scaled(&self, c: Complex64) -> QuadDiff {
        let phi = self.phi.clone();
        QuadDiff { phi: Arc::new(move |z| c * phi(z)), domain: self.domain }
    }

    /// Largest relative Cauchy–Riemann defect `|∂φ/∂z̄|` over an `n × n` grid,
    /// from centred differences with step `h`.
    pub fn holomorphy_residual(&self, n: usize) -> f64 {
        let pts = crate::quadrature::tensor_points(&self.domain, n);
        let h = 1e-5;
        pts.par_iter()
            .map(|&(z, _)| {
                let fx = (self.phi(z + h) - self.phi(z - h)) / (2.0 * h);
                let fy = (self.phi(z + Complex64::new(0.0, h)) - self.phi(z - Complex64::new(0.0, h))) / (2.0 * h);
                let dzbar = 0.5 * (fx + Complex64::i() * fy);
                dzbar.norm() / (1.0 + fx.norm() + self.phi(z).norm())
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Fails with [`Error::NotHolomorphic`] if the residual exceeds `1e-8`.
    pub fn check_holomorphic(&self, n: usize) -> Result<()> {
        let r = self.holomorphy_residual(n);
        if r > 1e-8 {
            let c = match self.domain {
                Domain::Rect(r) => Complex64::new(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)),
                Domain::Disk(d) => d.center,
            };
            return Err(Error::NotHolomorphic { re: c.re, im: c.im, residual: r });
        }
        Ok(())
    }
}

/// Conformal metric `ρ |dz|²`.
#[derive(Clone)]
pub struct ConformalMetric {
    rho: Arc<DensityFn>,
}

impl std::fmt::Debug for ConformalMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConformalMetric").finish_non_exhaustive()
    }
}

impl ConformalMetric {
    pub fn new<F>(rho: F) -> Self
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        Self { rho: Arc::new(rho) }
    }

    pub fn constant(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::NonPositiveDensity(k));
        }
        Ok(Self::new(move |_| k))
    }

    /// `4 / (1 − |z|²)²` on the unit disk.
    pub fn hyperbolic_disk() -> Self {
        Self::new(|z| 4.0 / (1.0 - z.norm_sqr()).powi(2))
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(invalid("k", format!("{k} is not positive")));
        }
        let rho = self.rho.clone();
        Ok(Self::new(move |z| k * rho(z)))
    }

    pub fn rho(&self, z: Complex64) -> f64 {
        (self.rho)(z)
    }

    pub fn checked_rho(&self, z: Complex64) -> Result<f64> {
        let r = self.rho(z);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NonPositiveDensity(r));
        }
        Ok(r)
    }
}

/// `|φ(z)| / ρ(z)`.
pub fn qd_pointwise_norm(phi: &QuadDiff, g: &ConformalMetric, z: Complex64) -> Result<f64> {
    Ok(phi.phi(z).norm() / g.checked_rho(z)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpExponent {
    Two,
    Infinity,
}

/// Quadrature and refinement tolerances for [`qd_lp_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub tolerance: f64,
    pub max_order: usize,
    pub sup_tolerance: f64,
    pub max_grid: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_order: 1024, sup_tolerance: 1e-6, max_grid: 1024 }
    }
}

/// `‖Φ‖_{ĝ,p}` over `domain`.
///
/// For `p = 2` this is `(∬ |φ|²/ρ dA_euc)^{1/2}`. For `p = ∞` the grid is
/// halved until the maximum moves by less than `sup_tolerance` (relative);
/// this is a heuristic, not a certified bound.
pub fn qd_lp_norm(phi: &QuadDiff, g: &ConformalMetric, p: LpExponent, domain: &Domain, opts: NormOptions) -> Result<f64> {
    let bad: Mutex<Option<f64>> = Mutex::new(None);
    let ratio = |z: Complex64| -> f64 {
        let r = g.rho(z);
        if !(r > 0.0) || !r.is_finite() {
            *bad.lock().unwrap() = Some(r);
            return 0.0;
        }
        phi.phi(z).norm() / r
    };
    let out = match p {
        LpExponent::Two => {
            let integral = integrate_2d_converged(
                domain,
                |z| {
                    let q = ratio(z);
                    q * q * g.rho(z)
                },
                opts.tolerance,
                8,
                opts.max_order,
            );
            integral.map(|v| v.max(0.0).sqrt())
        }
        LpExponent::Infinity => sup_refine(domain, &ratio, opts),
    };
    if let Some(r) = *bad.lock().unwrap() {
        return Err(Error::NonPositiveDensity(r));
    }
    out
}

fn grid_points(domain: &Domain, n: usize) -> Vec<Complex64> {
    match domain {
        Domain::Rect(r) => {
            let mut v = Vec::with_capacity((n + 1) * (n + 1));
            for i in 0..=n {
                for j in 0..=n {
                    let x = r.x0 + (r.x1 - r.x0) * i as f64 / n as f64;
                    let y = r.y0 + (r.y1 - r.y0) * j as f64 / n as f64;
                    v.push(Complex64::new(x, y));
                }
            }
            v
        }
        Domain::Disk(d) => {
            let mut v = vec![d.center];
            for i in 1..=n {
                let r = d.radius * i as f64 / n as f64;
                for k in 0..4 * n {
                    v.push(d.center + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / (4 * n) as f64));
                }
            }
            v
        }
    }
}

fn sup_refine<F>(domain: &Domain, f: &F, opts: NormOptions) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let eval = |n: usize| grid_points(domain, n).par_iter().map(|&z| f(z)).reduce(|| 0.0, f64::max);
    let mut n = 16;
    let mut prev = eval(n);
    while 2 * n <= opts.max_grid {
        let cur = eval(2 * n);
        if (cur - prev).abs() <= opts.sup_tolerance * cur.abs().max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
        n *= 2;
    }
    Err(Error::QuadratureDiverged { coarse: prev, fine: eval(n), tolerance: opts.sup_tolerance })
}
