//! Ends of hyperbolic 3-manifolds described by data at infinity.
//!
//! Endomorphisms of the tangent plane are carried in the complex frame: a
//! real-linear map `B` acts on `v = v_x + i v_y` by `B v = B_z v + B_z̄ v̄`.
//! [`complex_frame`] and [`real_matrix`] convert between the two pictures.

use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quadrature::Rect;
use crate::schwarzian::ConformalMetric;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(A_z, A_z̄)` for a real 2×2 matrix acting on `(x, y)`.
pub fn complex_frame(a: &Matrix2<f64>) -> (Complex64, Complex64) {
    let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    (Complex64::new(0.5 * (p + s), 0.5 * (r - q)), Complex64::new(0.5 * (p - s), 0.5 * (r + q)))
}

/// Inverse of [`complex_frame`].
pub fn real_matrix(b_z: Complex64, b_zbar: Complex64) -> Matrix2<f64> {
    let sum = b_z + b_zbar;
    let diff = b_z - b_zbar;
    Matrix2::new(sum.re, -diff.im, sum.im, diff.re)
}

/// `μ = A_z̄ / A_z` of an orientation-preserving linear map.
pub fn beltrami_of(a: &Matrix2<f64>) -> Result<Complex64> {
    let (az, azbar) = complex_frame(a);
    if az.norm() == 0.0 {
        return Err(invalid("A", "A_z vanishes"));
    }
    let mu = azbar / az;
    if mu.norm() >= 1.0 {
        return Err(Error::NotOrientationPreserving(a.determinant()));
    }
    Ok(mu)
}

/// Hodge star on 1-forms of the metric `A* g_euc`, where `A` has Beltrami
/// coefficient `μ`. Row `k` holds the `(dz, dz̄)` coefficients of `⋆` applied
/// to the `k`-th basis form, so `⋆dz = H₀₀ dz + H₀₁ dz̄`.
pub fn hodge_star_matrix(mu: Complex64) -> Result<Matrix2<Complex64>> {
    let m2 = mu.norm_sqr();
    if m2 >= 1.0 || !m2.is_finite() {
        return Err(Error::BeltramiOutOfRange(mu.norm()));
    }
    let k = -I / (1.0 - m2);
    Ok(Matrix2::new(
        k * (1.0 + m2),
        k * 2.0 * mu,
        k * (-2.0 * mu.conj()),
        k * (-1.0 - m2),
    ))
}

/// Coefficients of `⋆(c_z dz + c_z̄ dz̄)`.
pub fn apply_hodge(h: &Matrix2<Complex64>, c_z: Complex64, c_zbar: Complex64) -> (Complex64, Complex64) {
    let out = h.transpose() * Vector2::new(c_z, c_zbar);
    (out[0], out[1])
}

/// Cayley transform `(Id + M)⁻¹ (Id − M)`; an involution.
fn cayley(m: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let id = Matrix2::identity();
    let inv = (id + m).try_inverse().ok_or(Error::SingularEndomorphism)?;
    Ok(inv * (id - m))
}

/// Metric and shape operator of a convex surface translated to data at
/// infinity: `B̂ = (Id + B)⁻¹(Id − B)` and `ĝ = (Id + B)* g`.
pub fn shape_to_infinity(g: &Matrix2<f64>, b: &Matrix2<f64>) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let tr = b.trace();
    let det = b.determinant();
    let disc = tr * tr - 4.0 * det;
    if disc < -1e-12 * (1.0 + tr * tr) {
        return Err(invalid("B", "eigenvalues are not real"));
    }
    let lo = 0.5 * (tr - disc.max(0.0).sqrt());
    if lo < -1e-14 {
        return Err(Error::NotConvex(lo));
    }
    let a0 = Matrix2::identity() + b;
    Ok((a0.transpose() * g * a0, cayley(b)?))
}

/// Inverse of [`shape_to_infinity`].
pub fn infinity_to_shape(g_hat: &Matrix2<f64>, b_hat: &Matrix2<f64>) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let b = cayley(b_hat)?;
    let a0_inv = (Matrix2::identity() + b).try_inverse().ok_or(Error::SingularEndomorphism)?;
    Ok((a0_inv.transpose() * g_hat * a0_inv, b))
}

/// `log √(1 + 2‖Σ‖∞)`: beyond this distance the equidistant surfaces are convex.
pub fn epstein_threshold(sigma_inf_norm: f64) -> Result<f64> {
    if !(sigma_inf_norm >= 0.0) {
        return Err(invalid("sigma_inf_norm", format!("{sigma_inf_norm} is negative")));
    }
    Ok(0.5 * (2.0 * sigma_inf_norm).ln_1p())
}

type ComplexFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// Conformal metric `ĝ` and endomorphism `B̂` at infinity on a chart.
#[derive(Clone)]
pub struct EndFrame {
    pub metric: ConformalMetric,
    b_z: Arc<ComplexFn>,
    b_zbar: Arc<ComplexFn>,
    pub domain: Rect,
}

impl std::fmt::Debug for EndFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndFrame").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl EndFrame {
    pub fn new<F, G>(metric: ConformalMetric, b_z: F, b_zbar: G, domain: Rect) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        G: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { metric, b_z: Arc::new(b_z), b_zbar: Arc::new(b_zbar), domain }
    }

    /// `B̂ = 0`.
    pub fn fuchsian(metric: ConformalMetric, domain: Rect) -> Self {
        Self::new(metric, |_| Complex64::new(0.0, 0.0), |_| Complex64::new(0.0, 0.0), domain)
    }

    pub fn b_z(&self, z: Complex64) -> Complex64 {
        (self.b_z)(z)
    }

    pub fn b_zbar(&self, z: Complex64) -> Complex64 {
        (self.b_zbar)(z)
    }

    pub fn b_hat(&self, z: Complex64) -> Matrix2<f64> {
        real_matrix(self.b_z(z), self.b_zbar(z))
    }

    /// `B̂` is symmetric for `ĝ` exactly when `B̂_z` is real.
    pub fn self_adjoint_defect(&self, z: Complex64) -> f64 {
        self.b_z(z).im.abs()
    }

    /// Smallest `det(Id + t²B̂)` over an `n × n` grid and `n` heights in `(0, 1]`.
    /// Positive means every surface in the family is non-degenerate.
    pub fn min_surface_determinant(&self, n: usize) -> f64 {
        let r = &self.domain;
        let mut worst = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=n {
                let z = Complex64::new(
                    r.x0 + (r.x1 - r.x0) * i as f64 / n as f64,
                    r.y0 + (r.y1 - r.y0) * j as f64 / n as f64,
                );
                let b = self.b_hat(z);
                for k in 1..=n {
                    let t = k as f64 / n as f64;
                    worst = worst.min((Matrix2::identity() + t * t * b).determinant());
                }
            }
        }
        worst
    }
}

/// `g_t = (1/4t²)(Id + t²B̂)* ĝ` at `z`, in the `(x, y)` basis.
pub fn end_metric(frame: &EndFrame, z: Complex64, t: f64) -> Result<Matrix2<f64>> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHeight(t));
    }
    let rho = frame.metric.checked_rho(z)?;
    let m = Matrix2::identity() + t * t * frame.b_hat(z);
    if m.determinant() <= 1e-14 {
        return Err(Error::DegenerateSurface { t });
    }
    Ok(m.transpose() * m * (rho / (4.0 * t * t)))
}

/// `μ_t = B̂_z̄ / (1 + t²B̂_z)`; `t²μ_t` is the Beltrami coefficient of `g_t`.
pub fn mu_t(frame: &EndFrame, z: Complex64, t: f64) -> Result<Complex64> {
    let den = 1.0 + t * t * frame.b_z(z);
    if den.norm() <= 1e-300 {
        return Err(Error::DegenerateSurface { t });
    }
    Ok(frame.b_zbar(z) / den)
}

/// `(β₀, β₁) = (|μ_t|², μ_t) / (1 − t⁴|μ_t|²)`.
pub fn beta_coeffs(frame: &EndFrame, z: Complex64, t: f64) -> Result<(f64, Complex64)> {
    beta_from_mu(mu_t(frame, z, t)?, t)
}

pub fn beta_from_mu(mu: Complex64, t: f64) -> Result<(f64, Complex64)> {
    let den = 1.0 - t.powi(4) * mu.norm_sqr();
    if !(den > 0.0) {
        return Err(Error::BeltramiOutOfRange(t * t * mu.norm()));
    }
    Ok((mu.norm_sqr() / den, mu / den))
}

/// `|dz|_ĝ = √(2/ρ)`: the norm of the complex form `dz = dx + i dy`, with
/// `|dz|² = |dx|² + |dy|²`.
pub fn dz_norm(rho: f64) -> f64 {
    (2.0 / rho).sqrt()
}

/// `|dw_t|_{g_t} = 2t |dz|_ĝ / |1 + t²B̂_z|`.
pub fn dw_norm(frame: &EndFrame, z: Complex64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHeight(t));
    }
    let rho = frame.metric.checked_rho(z)?;
    let den = (1.0 + t * t * frame.b_z(z)).norm();
    if den <= 1e-300 {
        return Err(Error::DegenerateSurface { t });
    }
    Ok(2.0 * t * dz_norm(rho) / den)
}

/// Coordinates adapted to a point: `ρ(0) = 4` and `∇ρ(0) = 0`.
///
/// The chart is `z = z₀ + h(w)/k` with `k = √ρ(z₀)/2` and `h(w) = w/(1 + cw)`,
/// where `c = ½ ∂_u log ρ_u(0)` in the rescaled coordinate `u`.
#[derive(Clone, Debug)]
pub struct AdaptedChart {
    pub frame: EndFrame,
    pub z0: Complex64,
    k: f64,
    c: Complex64,
}

impl AdaptedChart {
    pub fn new(frame: &EndFrame, z0: Complex64) -> Result<Self> {
        let rho0 = frame.metric.checked_rho(z0)?;
        let k = rho0.sqrt() / 2.0;
        // ∂_z log ρ = ½(∂_x − i∂_y) log ρ, by central differences
        let h = 1e-5 * (1.0 + z0.norm());
        let lr = |z: Complex64| frame.metric.checked_rho(z).map(f64::ln);
        let dx = (lr(z0 + h)? - lr(z0 - h)?) / (2.0 * h);
        let dy = (lr(z0 + I * h)? - lr(z0 - I * h)?) / (2.0 * h);
        let dlog_z = 0.5 * Complex64::new(dx, -dy);
        Ok(Self { frame: frame.clone(), z0, k, c: 0.5 * dlog_z / k })
    }

    /// Original coordinate of `w`.
    pub fn to_original(&self, w: Complex64) -> Complex64 {
        self.z0 + w / (1.0 + self.c * w) / self.k
    }

    /// `dz/dw`.
    pub fn jacobian(&self, w: Complex64) -> Complex64 {
        let d = 1.0 + self.c * w;
        1.0 / (d * d) / self.k
    }

    pub fn rho(&self, w: Complex64) -> Result<f64> {
        Ok(self.frame.metric.checked_rho(self.to_original(w))? * self.jacobian(w).norm_sqr())
    }

    /// `φ(z(w)) (dz/dw)²`.
    pub fn pull_quadratic(&self, phi: Complex64, w: Complex64) -> Complex64 {
        let j = self.jacobian(w);
        phi * j * j
    }

    pub fn b_z(&self, w: Complex64) -> Complex64 {
        self.frame.b_z(self.to_original(w))
    }

    pub fn b_zbar(&self, w: Complex64) -> Complex64 {
        let j = self.jacobian(w);
        self.frame.b_zbar(self.to_original(w)) * j.conj() / j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &Matrix2<f64>, b: &Matrix2<f64>, tol: f64) -> bool {
        (a - b).abs().max() < tol
    }

    #[test]
    fn shape_examples() {
        let g = Matrix2::new(1.3, 0.2, 0.2, 0.8);
        let (gh, bh) = shape_to_infinity(&g, &Matrix2::identity()).unwrap();
        assert!(close(&bh, &Matrix2::zeros(), 1e-15));
        assert!(close(&gh, &(4.0 * g), 1e-15));
        let (_, bh) = shape_to_infinity(&g, &Matrix2::zeros()).unwrap();
        assert!(close(&bh, &Matrix2::identity(), 1e-15));
        let (_, bh) = shape_to_infinity(&g, &Matrix2::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(close(&bh, &Matrix2::new(0.0, 0.0, 0.0, 1.0), 1e-15));
        let err = shape_to_infinity(&g, &Matrix2::new(-0.5, 0.0, 0.0, 1.0));
        assert!(matches!(err, Err(Error::NotConvex(_))));
    }

    #[test]
    fn frame_conversion() {
        let (az, azb) = complex_frame(&Matrix2::new(2.0, 0.0, 0.0, 1.0));
        assert_eq!((az, azb), (c(1.5, 0.0), c(0.5, 0.0)));
        assert_eq!(complex_frame(&Matrix2::new(1.0, 0.0, 0.0, 0.0)), (c(0.5, 0.0), c(0.5, 0.0)));
        assert_eq!(complex_frame(&Matrix2::new(0.0, 0.0, 0.0, 1.0)), (c(0.5, 0.0), c(-0.5, 0.0)));
        let m = Matrix2::new(0.3, -1.2, 0.7, 2.5);
        let (bz, bzb) = complex_frame(&m);
        assert!(close(&real_matrix(bz, bzb), &m, 1e-15));
        // B v = B_z v + B_z̄ v̄
        let v = c(0.4, -0.9);
        let bv = m * Vector2::new(v.re, v.im);
        let w = bz * v + bzb * v.conj();
        assert!((w - c(bv[0], bv[1])).norm() < 1e-15);
    }

    #[test]
    fn end_metric_examples() {
        let r = Rect::unit_square();
        let f = EndFrame::fuchsian(ConformalMetric::constant(4.0).unwrap(), r);
        let g = end_metric(&f, c(0.5, 0.5), 0.5).unwrap();
        assert!(close(&g, &(4.0 * Matrix2::identity()), 1e-15));
        let t: f64 = 0.13;
        let g = end_metric(&f, c(0.5, 0.5), t).unwrap();
        assert!(close(&g, &(Matrix2::identity() * (4.0 / (4.0 * t * t))), 1e-12));

        let rho = 2.7;
        let id = EndFrame::new(ConformalMetric::constant(rho).unwrap(), |_| c(1.0, 0.0), |_| c(0.0, 0.0), r);
        let g = end_metric(&id, c(0.1, 0.1), 1.0).unwrap();
        assert!(close(&g, &(rho * Matrix2::identity()), 1e-14));

        let neg = EndFrame::new(ConformalMetric::constant(1.0).unwrap(), |_| c(-1.0, 0.0), |_| c(0.0, 0.0), r);
        assert!(matches!(end_metric(&neg, c(0.0, 0.0), 1.0), Err(Error::DegenerateSurface { .. })));
    }

    #[test]
    fn beltrami_examples() {
        assert_eq!(beltrami_of(&Matrix2::identity()).unwrap(), c(0.0, 0.0));
        let mu = beltrami_of(&Matrix2::new(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert!((mu - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let th: f64 = 0.8;
        let rot = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos());
        assert!(beltrami_of(&rot).unwrap().norm() < 1e-15);
        assert!(beltrami_of(&Matrix2::new(1.0, 0.0, 0.0, -1.0)).is_err());
    }

    #[test]
    fn hodge_examples() {
        let h = hodge_star_matrix(c(0.0, 0.0)).unwrap();
        assert_eq!(h, Matrix2::new(-I, c(0.0, 0.0), c(0.0, 0.0), I));
        let h = hodge_star_matrix(c(1.0 / 3.0, 0.0)).unwrap();
        let k = -I / (8.0 / 9.0);
        let ex = Matrix2::new(k * (10.0 / 9.0), k * (2.0 / 3.0), k * (-2.0 / 3.0), k * (-10.0 / 9.0));
        assert!((h - ex).norm() < 1e-15);
        assert!(hodge_star_matrix(c(0.6, 0.8)).is_err());
    }

    #[test]
    fn mu_and_beta_examples() {
        let r = Rect::unit_square();
        let g = ConformalMetric::constant(4.0).unwrap();
        let zero = EndFrame::fuchsian(g.clone(), r);
        assert_eq!(mu_t(&zero, c(0.2, 0.2), 0.7).unwrap(), c(0.0, 0.0));
        assert_eq!(beta_coeffs(&zero, c(0.2, 0.2), 0.7).unwrap(), (0.0, c(0.0, 0.0)));
        let k = c(0.3, -0.1);
        let f = EndFrame::new(g.clone(), |_| c(0.0, 0.0), move |_| k, r);
        for t in [0.1, 0.5, 1.0] {
            assert_eq!(mu_t(&f, c(0.0, 0.0), t).unwrap(), k);
        }
        // B̂ = diag(1, 0): (B̂_z, B̂_z̄) = (½, ½)
        let d = EndFrame::new(g.clone(), |_| c(0.5, 0.0), |_| c(0.5, 0.0), r);
        let t: f64 = 0.6;
        assert!((mu_t(&d, c(0.0, 0.0), t).unwrap() - c(0.5 / (1.0 + t * t / 2.0), 0.0)).norm() < 1e-15);

        let (b0, b1) = beta_from_mu(c(0.5, 0.0), 1.0).unwrap();
        assert!((b0 - 1.0 / 3.0).abs() < 1e-15 && (b1 - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        let (b0, b1) = beta_from_mu(c(0.3, 0.4), 1e-6).unwrap();
        assert!((b0 - 0.25).abs() < 1e-15 && (b1 - c(0.3, 0.4)).norm() < 1e-15);
        assert!(beta_from_mu(c(1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn dw_norm_examples() {
        let r = Rect::unit_square();
        let f = EndFrame::fuchsian(ConformalMetric::constant(4.0).unwrap(), r);
        let t: f64 = 0.37;
        assert!((dw_norm(&f, c(0.5, 0.5), t).unwrap() - 2f64.sqrt() * t).abs() < 1e-15);
        assert!(dw_norm(&f, c(0.5, 0.5), 1e-12).unwrap() < 1e-11);

        let g = EndFrame::new(
            ConformalMetric::new(|z| 3.0 + z.re),
            |z| c(0.4 + z.re, 0.2),
            |z| z * 0.3,
            r,
        );
        let z = c(0.3, 0.6);
        let ts: Vec<f64> = (0..8).map(|k| 1e-4 * 2f64.powi(k)).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| dw_norm(&g, z, t).unwrap().ln()).collect();
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let slope = (ys[7] - ys[0]) / (xs[7] - xs[0]);
        assert!((slope - 1.0).abs() < 1e-3);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(epstein_threshold(0.0).unwrap(), 0.0);
        assert!((epstein_threshold(1.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(epstein_threshold(2.0).unwrap() > epstein_threshold(1.9).unwrap());
        assert!(epstein_threshold(-0.1).is_err());
    }

    #[test]
    fn adapted_chart_for_the_disk() {
        let r = Rect::centered(0.9).unwrap();
        let f = EndFrame::new(ConformalMetric::hyperbolic_disk(), |_| c(0.2, 0.0), |z| z, r);
        let z0 = c(0.3, -0.4);
        let ch = AdaptedChart::new(&f, z0).unwrap();
        assert!((ch.rho(c(0.0, 0.0)).unwrap() - 4.0).abs() < 1e-12);
        let h = 1e-4;
        let gx = (ch.rho(c(h, 0.0)).unwrap() - ch.rho(c(-h, 0.0)).unwrap()) / (2.0 * h);
        let gy = (ch.rho(c(0.0, h)).unwrap() - ch.rho(c(0.0, -h)).unwrap()) / (2.0 * h);
        assert!(gx.abs() < 1e-7 && gy.abs() < 1e-7, "{gx} {gy}");
        assert_eq!(ch.to_original(c(0.0, 0.0)), z0);
        assert!((ch.b_zbar(c(0.0, 0.0)).norm() - z0.norm()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trip(l1 in 0.0..3.0f64, l2 in 0.0..3.0f64, th in 0.0..3.2f64, g11 in 0.5..2.0f64, g22 in 0.5..2.0f64, g12 in -0.3..0.3f64) {
            // B self-adjoint for g: B = g⁻¹ S with S symmetric positive semidefinite relative to g
            let g = Matrix2::new(g11, g12, g12, g22);
            let rot = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos());
            let s = rot * Matrix2::new(l1, 0.0, 0.0, l2) * rot.transpose();
            let gh = g.cholesky().unwrap().l();
            let gh_inv = gh.try_inverse().unwrap();
            let b = gh_inv.transpose() * s * gh.transpose();
            let (ginf, binf) = shape_to_infinity(&g, &b).unwrap();
            let (g2, b2) = infinity_to_shape(&ginf, &binf).unwrap();
            prop_assert!(close(&g, &g2, 1e-10));
            prop_assert!(close(&b, &b2, 1e-10));
        }

        #[test]
        fn star_squares_to_minus_one(r in 0.0..0.99f64, th in 0.0..6.3f64) {
            let h = hodge_star_matrix(Complex64::from_polar(r, th)).unwrap();
            let hh = h * h + Matrix2::identity();
            prop_assert!(hh.norm() < 1e-10 / (1.0 - r));
        }

        #[test]
        fn convex_data_gives_positive_metrics(l1 in 0.0..5.0f64, l2 in 0.0..5.0f64, th in 0.0..3.2f64, t in 0.01..1.0f64) {
            let rot = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos());
            let b = rot * Matrix2::new(l1, 0.0, 0.0, l2) * rot.transpose();
            let (_, bh) = shape_to_infinity(&Matrix2::identity(), &b).unwrap();
            let (bz, bzb) = complex_frame(&bh);
            let f = EndFrame::new(ConformalMetric::constant(1.0).unwrap(), move |_| bz, move |_| bzb, Rect::unit_square());
            let g = end_metric(&f, c(0.5, 0.5), t).unwrap();
            prop_assert!(g[(0, 0)] > 0.0 && g.determinant() > 0.0);
        }
    }
}
