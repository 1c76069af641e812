//! The model deformation `ω_Φ = φ 𝔭 dz` on an end.
//!
//! Forms live on `chart × (0, 1]` with coordinates `(x, y, t)` and metric
//! `g_t + dt²/t²`. Their coefficients are `sl2(C)`-valued in the flat
//! trivialization, so `ω_Φ` has the `t`-independent coefficient `φ(z) 𝔭(z)`.
//!
//! Pointwise quantities that need the fiber metric are evaluated in the
//! adapted chart at the point, under the model assumption that the end map
//! sends `(0, t)` to `(0, t)` in upper half-space with derivative `diag(Id + t²B̂, 1)`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epstein::{beta_from_mu, mu_t, real_matrix, AdaptedChart, EndFrame};
use crate::error::{invalid, Error, Result};
use crate::holomorphic::cauchy_taylor;
use crate::quadrature::{gl_rule, tensor_points, Domain};
use crate::schwarzian::QuadDiff;
use crate::sl2::{
    fiber_norm_sq, parabolic_section, parabolic_section_dz, translation_section, HalfSpacePoint, Sl2Matrix,
    TangentVectorH3,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Constant `c` in the integrand `c t² ‖Φ‖²_ĝ (1 + 2t⁴|μ_t|²/(1 − t⁴|μ_t|²))`.
///
/// With `|𝔭(0, t)|² = t²/2` and `|dz|² = |dx|² + |dy|²` the wedge
/// `ω_Φ ∧ ⋆ω_Φ^♯` against `dA_ĝ ∧ dt/t` comes out with `c = 4`.
pub const INTEGRAND_CONSTANT: f64 = 4.0;

/// Constant `c` in `lim ‖ω_Φ‖²_t / t² = c ‖Φ‖²_{ĝ,2}`, i.e. `INTEGRAND_CONSTANT / 2`.
pub const ENERGY_LIMIT_CONSTANT: f64 = INTEGRAND_CONSTANT / 2.0;

/// `E`-valued 1-form `c_z dz + c_z̄ dz̄ + c_t dt`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartOneForm {
    pub dz: Sl2Matrix,
    pub dzbar: Sl2Matrix,
    pub dt: Sl2Matrix,
}

/// `E`-valued 2-form `a dz∧dt/t + b dz̄∧dt/t + c dz∧dz̄`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartTwoForm {
    pub dz_dt: Sl2Matrix,
    pub dzbar_dt: Sl2Matrix,
    pub dz_dzbar: Sl2Matrix,
}

/// `ω_Φ(z) = φ(z) 𝔭(z) dz`.
pub fn omega_phi(phi: &QuadDiff, z: Complex64) -> ChartOneForm {
    ChartOneForm { dz: phi.phi(z) * parabolic_section(z), ..Default::default() }
}

/// `‖Φ‖²_ĝ` at `z` times the correction factor, scaled by `INTEGRAND_CONSTANT t²`.
pub fn integrand_from_parts(phi_norm: f64, mu: Complex64, t: f64) -> Result<f64> {
    let m2 = t.powi(4) * mu.norm_sqr();
    if !(m2 < 1.0) {
        return Err(Error::BeltramiOutOfRange(m2.sqrt()));
    }
    Ok(INTEGRAND_CONSTANT * t * t * phi_norm * phi_norm * (1.0 + 2.0 * m2 / (1.0 - m2)))
}

/// Density of `ω_Φ ∧ ⋆ω_Φ^♯` against `dA_ĝ ∧ dt/t` at `(z, t)`.
pub fn omega_phi_integrand(phi: &QuadDiff, frame: &EndFrame, z: Complex64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHeight(t));
    }
    let norm = phi.phi(z).norm() / frame.metric.checked_rho(z)?;
    integrand_from_parts(norm, mu_t(frame, z, t)?, t)
}

/// `⋆ω_Φ = −iφ𝔭 dz∧dt/t − 2it²φ𝔭 (t²β₀ dz + β₁ dz̄)∧dt/t`.
pub fn star_omega_phi(phi: &QuadDiff, frame: &EndFrame, z: Complex64, t: f64) -> Result<ChartTwoForm> {
    let (b0, b1) = beta_from_mu(mu_t(frame, z, t)?, t)?;
    Ok(star_from_parts(phi.phi(z) * parabolic_section(z), b0, b1, t))
}

fn star_from_parts(s: Sl2Matrix, b0: f64, b1: Complex64, t: f64) -> ChartTwoForm {
    let t2 = t * t;
    ChartTwoForm {
        dz_dt: (-I * (1.0 + 2.0 * t2 * t2 * b0)) * s,
        dzbar_dt: (-2.0 * I * t2 * b1) * s,
        dz_dzbar: Sl2Matrix::ZERO,
    }
}

/// Quadrature settings for [`end_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub tolerance: f64,
    pub initial_order: usize,
    pub max_order: usize,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, initial_order: 8, max_order: 128 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndEnergyResult {
    pub t: f64,
    pub energy: f64,
    /// Difference between the last two quadrature orders.
    pub error: f64,
}

/// `‖ω_Φ‖²_t = ∫₀ᵗ ∫ integrand dA_ĝ ds/s`.
///
/// With `u = s²` the measure `ds/s` becomes `du/2u`, which cancels the `s²`
/// in the integrand; the remaining integrand is smooth on `[0, t²]`.
pub fn end_energy(phi: &QuadDiff, frame: &EndFrame, t: f64, cfg: EnergyConfig) -> Result<EndEnergyResult> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(invalid("t", format!("{t} is not in (0, 1]")));
    }
    let domain = Domain::Rect(frame.domain);
    let eval = |n: usize| -> Result<f64> {
        let xy = tensor_points(&domain, n);
        let us = gl_rule(n, 0.0, t * t);
        let parts: Result<Vec<f64>> = xy
            .par_iter()
            .map(|&(z, wxy)| {
                let rho = frame.metric.checked_rho(z)?;
                let q = phi.phi(z).norm() / rho;
                let mut acc = 0.0;
                for &(u, wu) in &us {
                    let s = u.sqrt();
                    let m2 = s.powi(4) * mu_t(frame, z, s)?.norm_sqr();
                    if !(m2 < 1.0) {
                        return Err(Error::BeltramiOutOfRange(m2.sqrt()));
                    }
                    acc += wu * 0.5 * INTEGRAND_CONSTANT * q * q * (1.0 + 2.0 * m2 / (1.0 - m2));
                }
                Ok(wxy * rho * acc)
            })
            .collect();
        Ok(parts?.iter().sum())
    };
    let mut n = cfg.initial_order.max(2);
    let mut prev = eval(n)?;
    loop {
        let cur = eval(2 * n)?;
        let err = (cur - prev).abs();
        if err <= cfg.tolerance * cur.abs().max(t * t) {
            return Ok(EndEnergyResult { t, energy: cur, error: err });
        }
        if 2 * n >= cfg.max_order {
            return Err(Error::QuadratureDiverged { coarse: prev, fine: cur, tolerance: cfg.tolerance });
        }
        prev = cur;
        n *= 2;
    }
}

/// `‖Φ‖²_{ĝ,2} ≤ ‖ω‖²_{t₀} / (8t₀²)`.
pub fn hodge_limit_bound(omega_energy_t0: f64, t0: f64) -> Result<f64> {
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(invalid("t0", format!("{t0} is not in (0, 1]")));
    }
    if !(omega_energy_t0 >= 0.0) {
        return Err(invalid("omega_energy_t0", format!("{omega_energy_t0} is negative")));
    }
    Ok(omega_energy_t0 / (8.0 * t0 * t0))
}

/// Central difference with two Richardson levels.
fn richardson<F: Fn(f64) -> Complex64>(f: F, h: f64) -> Complex64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// `(∂_z f, ∂_z̄ f)` at `w`.
fn wirtinger<F: Fn(Complex64) -> Complex64>(f: F, w: Complex64, h: f64) -> (Complex64, Complex64) {
    let fx = richardson(|s| f(w + s), h);
    let fy = richardson(|s| f(w + I * s), h);
    (0.5 * (fx - I * fy), 0.5 * (fx + I * fy))
}

/// `|δω_Φ|` at `(z, t)`.
///
/// Writing `⋆ω_Φ = A dz∧dt/t + B dz̄∧dt/t`,
/// `(d − 2T)⋆ω_Φ = (∂_z B − 2[B, ∂̂_z] − ∂_z̄ A + 2[A, ∂̂_z̄]) dz∧dz̄∧dt/t`
/// and `|dz∧dz̄∧dt/t| = 8t² / (ρ det(Id + t²B̂))`.
pub fn delta_omega_norm(phi: &QuadDiff, frame: &EndFrame, z: Complex64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHeight(t));
    }
    let chart = AdaptedChart::new(frame, z)?;
    let w0 = ZERO;
    let phi_w = |w: Complex64| chart.pull_quadratic(phi.phi(chart.to_original(w)), w);
    let betas = |w: Complex64| -> Result<(f64, Complex64)> {
        let (bz, bzb) = (chart.b_z(w), chart.b_zbar(w));
        let den = 1.0 + t * t * bz;
        if den.norm() <= 1e-300 {
            return Err(Error::DegenerateSurface { t });
        }
        beta_from_mu(bzb / den, t)
    };
    let (b0, b1) = betas(w0)?;
    let h = 1e-3;
    // surface must stay non-degenerate on the stencil
    for s in [h, -h] {
        betas(Complex64::new(s, 0.0))?;
        betas(Complex64::new(0.0, s))?;
    }
    let beta0_of = |w: Complex64| Complex64::new(betas(w).map(|b| b.0).unwrap_or(f64::NAN), 0.0);
    let beta1_of = |w: Complex64| betas(w).map(|b| b.1).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let (_, dzbar_b0) = wirtinger(beta0_of, w0, h);
    let (dz_b1, _) = wirtinger(beta1_of, w0, h);

    let taylor = cauchy_taylor(phi_w, w0, 1)?;
    let (f0, f1) = (taylor[0], taylor[1]);
    let p0 = parabolic_section(w0);
    let s0 = f0 * p0;
    let ds0 = f1 * p0 + f0 * parabolic_section_dz(w0);

    let t2 = t * t;
    let a = (-I * (1.0 + 2.0 * t2 * t2 * b0)) * s0;
    let b = (-2.0 * I * t2 * b1) * s0;
    let dzbar_a = (-2.0 * I * t2 * t2 * dzbar_b0) * s0;
    let dz_b = (-2.0 * I * t2) * (b1 * ds0 + dz_b1 * s0);

    let p = HalfSpacePoint::on_axis(t)?;
    let m = real_matrix(1.0 + t2 * chart.b_z(w0), t2 * chart.b_zbar(w0));
    let (hat_z, hat_zbar) = image_sections(&m, p);

    let c = dz_b - 2.0 * b.bracket(hat_z) - dzbar_a + 2.0 * a.bracket(hat_zbar);
    let rho = chart.rho(w0)?;
    let det = m.determinant();
    if det <= 0.0 {
        return Err(Error::DegenerateSurface { t });
    }
    Ok(fiber_norm_sq(c, p).max(0.0).sqrt() * 8.0 * t2 / (rho * det))
}

/// `(∂̂_z, ∂̂_z̄)` for the image frame `dΨ(∂_x) = M e_x`, `dΨ(∂_y) = M e_y`.
fn image_sections(m: &Matrix2<f64>, p: HalfSpacePoint) -> (Sl2Matrix, Sl2Matrix) {
    let vx = translation_section(TangentVectorH3::new(m[(0, 0)], m[(1, 0)], 0.0), p);
    let vy = translation_section(TangentVectorH3::new(m[(0, 1)], m[(1, 1)], 0.0), p);
    (0.5 * (vx - vy.times_i()), 0.5 * (vx + vy.times_i()))
}

/// Volume density `√det(g_t + dt²/t²)` in `(x, y, t)` coordinates.
fn volume_density(frame: &EndFrame, z: Complex64, t: f64) -> Result<f64> {
    let g = crate::epstein::end_metric(frame, z, t)?;
    Ok(g.determinant().max(0.0).sqrt() / t)
}

/// `‖δω_Φ‖²_t = ∫₀ᵗ ∫ |δω_Φ|² dV`, with orders doubled until two agree to `tol`.
pub fn delta_omega_energy(phi: &QuadDiff, frame: &EndFrame, t: f64, tol: f64) -> Result<f64> {
    let domain = Domain::Rect(frame.domain);
    let eval = |n: usize| -> Result<f64> {
        let xy = tensor_points(&domain, n);
        let ss = gl_rule(n, 0.0, t);
        let parts: Result<Vec<f64>> = xy
            .par_iter()
            .map(|&(z, wxy)| {
                let mut acc = 0.0;
                for &(s, ws) in &ss {
                    let d = delta_omega_norm(phi, frame, z, s)?;
                    acc += ws * d * d * volume_density(frame, z, s)?;
                }
                Ok(wxy * acc)
            })
            .collect();
        Ok(parts?.iter().sum())
    };
    let mut n = 6;
    let mut prev = eval(n)?;
    loop {
        let cur = eval(2 * n)?;
        if (cur - prev).abs() <= tol * cur.abs() || cur == 0.0 {
            return Ok(cur);
        }
        if n >= 24 {
            return Err(Error::QuadratureDiverged { coarse: prev, fine: cur, tolerance: tol });
        }
        prev = cur;
        n *= 2;
    }
}

/// Least-squares fit `y ≈ prefactor · t^exponent` in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of `log y`.
    pub residual: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// Largest sampled value; a zero here means the quantity vanished identically.
    pub max_value: f64,
}

impl DecayFit {
    pub const RESIDUAL_THRESHOLD: f64 = 0.05;

    pub fn reliable(&self) -> bool {
        self.residual < Self::RESIDUAL_THRESHOLD
    }
}

/// `n` logarithmically spaced heights in `[t_min, t_max]`.
pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

pub fn fit_power_law(ts: &[f64], ys: &[f64]) -> Result<DecayFit> {
    if ts.len() != ys.len() || ts.len() < 2 {
        return Err(invalid("samples", "need at least two (t, y) pairs"));
    }
    let t_min = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = ts.iter().cloned().fold(0.0, f64::max);
    let max_value = ys.iter().cloned().fold(0.0, f64::max);
    if ys.iter().any(|&y| y <= 0.0) {
        // zero samples carry no slope information
        return Ok(DecayFit { exponent: f64::INFINITY, prefactor: max_value, residual: 0.0, t_min, t_max, max_value });
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ls.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ls).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    Ok(DecayFit { exponent: slope, prefactor: icept.exp(), residual: (rss / n).sqrt(), t_min, t_max, max_value })
}

fn check_range(ts: &[f64]) -> Result<()> {
    if ts.len() < 8 {
        return Err(invalid("t_range", "need at least 8 heights"));
    }
    if ts.iter().any(|&t| !(t > 0.0 && t <= 0.5)) {
        return Err(invalid("t_range", "heights must lie in (0, 0.5]"));
    }
    Ok(())
}

/// Fit of `t ↦ |δω_Φ|(z, t)` over the given heights.
pub fn delta_omega_decay(phi: &QuadDiff, frame: &EndFrame, z: Complex64, ts: &[f64]) -> Result<DecayFit> {
    check_range(ts)?;
    let ys: Result<Vec<f64>> = ts.iter().map(|&t| delta_omega_norm(phi, frame, z, t)).collect();
    fit_power_law(ts, &ys?)
}

/// Fit of `t ↦ ‖δω_Φ‖²_t` over the given heights.
pub fn delta_omega_energy_decay(phi: &QuadDiff, frame: &EndFrame, ts: &[f64], tol: f64) -> Result<DecayFit> {
    check_range(ts)?;
    let ys: Result<Vec<f64>> = ts.iter().map(|&t| delta_omega_energy(phi, frame, t, tol)).collect();
    fit_power_law(ts, &ys?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epstein::end_metric;
    use crate::quadrature::Rect;
    use crate::schwarzian::{qd_lp_norm, ConformalMetric, LpExponent, NormOptions};
    use nalgebra::{Matrix3, Vector3};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn frame() -> EndFrame {
        EndFrame::new(
            ConformalMetric::new(|z| 4.0 + 0.5 * z.re - 0.3 * z.im * z.im),
            |z| c(0.4 + 0.2 * z.re, 0.0),
            |z| c(0.3, -0.1) + z * c(0.1, 0.2),
            Rect::centered(0.5).unwrap(),
        )
    }

    fn quad(r: Rect) -> QuadDiff {
        QuadDiff::new(|z| c(1.0, 0.5) + z * c(0.3, -0.2) + z * z, Domain::Rect(r))
    }

    #[test]
    fn integrand_examples() {
        assert_eq!(integrand_from_parts(1.0, ZERO, 0.3).unwrap(), INTEGRAND_CONSTANT * 0.09);
        let v = integrand_from_parts(1.0, c(0.5, 0.0), 1.0).unwrap();
        assert!((v - INTEGRAND_CONSTANT * 5.0 / 3.0).abs() < 1e-14);
        assert!(integrand_from_parts(1.0, c(1.0, 0.0), 1.0).is_err());
    }

    /// `|ω|² dV / (dA_ĝ ∧ dt/t)` from the metric and the fiber norm, in the adapted chart.
    fn wedge_oracle(phi: &QuadDiff, f: &EndFrame, z: Complex64, t: f64) -> f64 {
        let ch = AdaptedChart::new(f, z).unwrap();
        let w = ZERO;
        let phi_w = ch.pull_quadratic(phi.phi(z), w);
        let g = (1.0 / (4.0 * t * t))
            * real_matrix(1.0 + t * t * ch.b_z(w), t * t * ch.b_zbar(w)).transpose()
            * real_matrix(1.0 + t * t * ch.b_z(w), t * t * ch.b_zbar(w))
            * ch.rho(w).unwrap();
        let mut g3 = Matrix3::zeros();
        g3.fixed_view_mut::<2, 2>(0, 0).copy_from(&g);
        g3[(2, 2)] = 1.0 / (t * t);
        let gi = g3.try_inverse().unwrap();
        let dz_sq = gi[(0, 0)] + gi[(1, 1)];
        let pnorm = fiber_norm_sq(parabolic_section(ZERO), HalfSpacePoint::on_axis(t).unwrap());
        let dv = g3.determinant().sqrt();
        let area_dt = ch.rho(w).unwrap() / t;
        phi_w.norm_sqr() * pnorm * dz_sq * dv / area_dt
    }

    #[test]
    fn integrand_matches_wedge_oracle() {
        let f = frame();
        let phi = quad(f.domain);
        for &(z, t) in &[(c(0.1, -0.2), 0.3), (c(-0.4, 0.35), 0.8), (c(0.0, 0.0), 0.05)] {
            let a = omega_phi_integrand(&phi, &f, z, t).unwrap();
            let b = wedge_oracle(&phi, &f, z, t);
            assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
        }
    }

    /// `⋆` on 1-forms from the full 3×3 metric, as 2-form components on
    /// `(dy∧dt, dt∧dx, dx∧dy)`.
    fn star_components(g3: &Matrix3<f64>, v: Vector3<Complex64>) -> Vector3<Complex64> {
        let gi = g3.try_inverse().unwrap().map(|x| c(x, 0.0));
        gi * v * c(g3.determinant().sqrt(), 0.0)
    }

    #[test]
    fn star_matches_metric_hodge() {
        let f = frame();
        let phi = quad(f.domain);
        let (z, t) = (c(0.2, 0.1), 0.6);
        let star = star_omega_phi(&phi, &f, z, t).unwrap();
        let g = end_metric(&f, z, t).unwrap();
        let mut g3 = Matrix3::zeros();
        g3.fixed_view_mut::<2, 2>(0, 0).copy_from(&g);
        g3[(2, 2)] = 1.0 / (t * t);
        let w = star_components(&g3, Vector3::new(c(1.0, 0.0), I, ZERO));
        // dz∧dt/t ↦ (i, −1, 0)/t and dz̄∧dt/t ↦ (−i, −1, 0)/t; compare via the dz coefficient
        let s = phi.phi(z) * parabolic_section(z);
        let ka = star.dz_dt.b / s.b;
        let kb = star.dzbar_dt.b / s.b;
        let rebuilt = Vector3::new(I * ka - I * kb, -ka - kb, ZERO) * c(1.0 / t, 0.0);
        assert!((rebuilt - w).norm() < 1e-12 * w.norm(), "{rebuilt} vs {w}");
    }

    #[test]
    fn star_without_beltrami() {
        let f = EndFrame::fuchsian(ConformalMetric::constant(2.0).unwrap(), Rect::unit_square());
        let phi = quad(f.domain);
        let z = c(0.3, 0.3);
        let s = star_omega_phi(&phi, &f, z, 0.4).unwrap();
        assert_eq!(s.dzbar_dt, Sl2Matrix::ZERO);
        assert!((s.dz_dt - (-I * phi.phi(z)) * parabolic_section(z)).max_abs() < 1e-15);
    }

    #[test]
    fn leading_star_term_is_closed() {
        // ∂_z̄ (φ𝔭) = 0 numerically
        let phi = quad(Rect::unit_square());
        let f = |w: Complex64| {
            let s = phi.phi(w) * parabolic_section(w);
            s.a + s.b * 0.7 + s.c * c(0.1, 0.9)
        };
        let (_, dzbar) = wirtinger(f, c(0.4, 0.2), 1e-3);
        assert!(dzbar.norm() < 1e-8);
    }

    #[test]
    fn fuchsian_energy_is_exact() {
        let r = Rect::unit_square();
        let f = EndFrame::fuchsian(ConformalMetric::constant(3.0).unwrap(), r);
        let phi = quad(r);
        let l2 = qd_lp_norm(&phi, &f.metric, LpExponent::Two, &Domain::Rect(r), NormOptions::default()).unwrap();
        for t in [1e-2, 0.1, 0.7] {
            let e = end_energy(&phi, &f, t, EnergyConfig::default()).unwrap();
            let ratio = e.energy / (t * t);
            assert!((ratio - ENERGY_LIMIT_CONSTANT * l2 * l2).abs() < 1e-10 * ratio);
        }
        let zero = QuadDiff::new(|_| ZERO, Domain::Rect(r));
        assert_eq!(end_energy(&zero, &f, 0.5, EnergyConfig::default()).unwrap().energy, 0.0);
    }

    #[test]
    fn energy_ratio_increases() {
        let f = frame();
        let phi = quad(f.domain);
        let mut last = 0.0;
        for t in [0.05, 0.2, 0.5, 1.0] {
            let e = end_energy(&phi, &f, t, EnergyConfig::default()).unwrap();
            let r = e.energy / (t * t);
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn hodge_limit_examples() {
        assert_eq!(hodge_limit_bound(8.0, 1.0).unwrap(), 1.0);
        let eta = 1.0 / (2f64.sqrt() + 3f64.sqrt());
        assert!((eta * eta - 0.101020).abs() < 1e-6);
        assert!((hodge_limit_bound(1.0, eta).unwrap() - 1.0 / (8.0 * eta * eta)).abs() < 1e-12);
        assert!(hodge_limit_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn flat_end_is_harmonic() {
        let r = Rect::centered(0.5).unwrap();
        let f = EndFrame::fuchsian(ConformalMetric::constant(4.0).unwrap(), r);
        let phi = quad(r);
        for t in [0.01, 0.1, 0.5] {
            assert!(delta_omega_norm(&phi, &f, c(0.1, -0.3), t).unwrap() < 1e-12);
        }
    }

    #[test]
    fn generic_end_decays_like_t4() {
        let f = frame();
        let phi = quad(f.domain);
        let fit = delta_omega_decay(&phi, &f, c(0.1, 0.05), &log_spaced(0.01, 0.3, 8)).unwrap();
        assert!(fit.exponent >= 3.9 && fit.reliable(), "{fit:?}");
    }

    #[test]
    fn fit_recovers_power() {
        let ts = log_spaced(0.01, 0.5, 8);
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 * t.powi(5)).collect();
        let fit = fit_power_law(&ts, &ys).unwrap();
        assert!((fit.exponent - 5.0).abs() < 1e-12 && (fit.prefactor - 3.0).abs() < 1e-10);
        assert!(delta_omega_decay(&quad(Rect::unit_square()), &frame(), ZERO, &ts[..4]).is_err());
    }
}
