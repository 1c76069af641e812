//! sl2(C) as infinitesimal isometries of upper half-space.
//!
//! A traceless matrix `[[a, b], [c, -a]]` generates the one-parameter group
//! `exp(s m)` acting on the Riemann sphere by Möbius maps and on upper
//! half-space `{(z, t) : t > 0}` by their isometric (Poincaré) extension.
//!
//! Two normalizations are in play and are kept apart on purpose:
//!
//! * [`projective_field`] returns the coefficient `f` in the convention where
//!   the real vector field is `Re(f ∂/∂z)`, so the flow velocity of `z` is `f / 2`.
//! * [`killing_field`] returns the actual velocity `d/ds exp(s m) · p` at `s = 0`.
//!
//! The bundle metric on a fiber is `|s|² = |s(p)|² + |(is)(p)|²`, with both
//! vectors measured in the hyperbolic metric at `p`. On the axis `(0, t)` it is
//! the Hermitian form `4|a|² + 2|b|²/t² + 2t²|c|²`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Traceless 2×2 complex matrix `[[a, b], [c, -a]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sl2Matrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl Sl2Matrix {
    pub const ZERO: Sl2Matrix = Sl2Matrix { a: ZERO, b: ZERO, c: ZERO };

    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    /// Builds from real parts only.
    pub fn real(a: f64, b: f64, c: f64) -> Self {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn to_matrix(self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [self.c, -self.a]]
    }

    /// Reads a 2×2 matrix, rejecting a nonzero trace.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let tr = m[0][0] + m[1][1];
        let scale = m.iter().flatten().map(|x| x.norm()).fold(1.0, f64::max);
        if tr.norm() > 1e-12 * scale {
            return Err(crate::error::invalid("m", format!("trace {tr} is not zero")));
        }
        Ok(Self::new(0.5 * (m[0][0] - m[1][1]), m[0][1], m[1][0]))
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::new(k * self.a, k * self.b, k * self.c)
    }

    pub fn times_i(self) -> Self {
        self.scale(I)
    }

    /// `-det = a² + bc`; the square of the eigenvalues.
    pub fn eigen_square(self) -> Complex64 {
        self.a * self.a + self.b * self.c
    }

    /// Max-entry magnitude.
    pub fn max_abs(self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm())
    }

    /// Matrix commutator `self · other − other · self`.
    pub fn bracket(self, other: Sl2Matrix) -> Sl2Matrix {
        let (a1, b1, c1) = (self.a, self.b, self.c);
        let (a2, b2, c2) = (other.a, other.b, other.c);
        Sl2Matrix::new(b1 * c2 - c1 * b2, 2.0 * (a1 * b2 - b1 * a2), 2.0 * (c1 * a2 - a1 * c2))
    }

    /// `exp(s · self)` in closed form: `cosh(sλ) I + sinh(sλ)/λ · m` with `λ² = a² + bc`.
    pub fn exp(self, s: f64) -> Mobius {
        let lam2 = self.eigen_square() * s * s;
        let lam = lam2.sqrt();
        let (ch, sh_over) = if lam.norm() < 1e-4 {
            // series for cosh(x) and sinh(x)/x in x² = lam2
            (
                ONE + lam2 / 2.0 + lam2 * lam2 / 24.0 + lam2 * lam2 * lam2 / 720.0,
                ONE + lam2 / 6.0 + lam2 * lam2 / 120.0 + lam2 * lam2 * lam2 / 5040.0,
            )
        } else {
            (lam.cosh(), lam.sinh() / lam)
        };
        let k = sh_over * s;
        Mobius {
            a: ch + k * self.a,
            b: k * self.b,
            c: k * self.c,
            d: ch - k * self.a,
        }
    }

    /// Conjugation `g m g⁻¹` by an element of SL2(C).
    pub fn conjugate(self, g: &Mobius) -> Sl2Matrix {
        let m = self.to_matrix();
        let gm = [
            [g.a * m[0][0] + g.b * m[1][0], g.a * m[0][1] + g.b * m[1][1]],
            [g.c * m[0][0] + g.d * m[1][0], g.c * m[0][1] + g.d * m[1][1]],
        ];
        // g⁻¹ = [[d, -b], [-c, a]] / det
        let det = g.a * g.d - g.b * g.c;
        let inv = [[g.d / det, -g.b / det], [-g.c / det, g.a / det]];
        let r00 = gm[0][0] * inv[0][0] + gm[0][1] * inv[1][0];
        let r01 = gm[0][0] * inv[0][1] + gm[0][1] * inv[1][1];
        let r10 = gm[1][0] * inv[0][0] + gm[1][1] * inv[1][0];
        let r11 = gm[1][0] * inv[0][1] + gm[1][1] * inv[1][1];
        Sl2Matrix::new(0.5 * (r00 - r11), r01, r10)
    }
}

impl Add for Sl2Matrix {
    type Output = Sl2Matrix;
    fn add(self, o: Sl2Matrix) -> Sl2Matrix {
        Sl2Matrix::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for Sl2Matrix {
    type Output = Sl2Matrix;
    fn sub(self, o: Sl2Matrix) -> Sl2Matrix {
        Sl2Matrix::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Neg for Sl2Matrix {
    type Output = Sl2Matrix;
    fn neg(self) -> Sl2Matrix {
        Sl2Matrix::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<Sl2Matrix> for Complex64 {
    type Output = Sl2Matrix;
    fn mul(self, m: Sl2Matrix) -> Sl2Matrix {
        m.scale(self)
    }
}

impl Mul<Sl2Matrix> for f64 {
    type Output = Sl2Matrix;
    fn mul(self, m: Sl2Matrix) -> Sl2Matrix {
        m.scale(Complex64::new(self, 0.0))
    }
}

/// A Möbius map `z ↦ (az + b)/(cz + d)`; also acts on upper half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    pub fn translation(w: Complex64) -> Self {
        Mobius { a: ONE, b: w, c: ZERO, d: ONE }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        let det = self.det();
        Mobius { a: self.d / det, b: -self.b / det, c: -self.c / det, d: self.a / det }
    }

    /// Isometric extension to upper half-space. Writing `q = z + t j` as a
    /// quaternion, `q ↦ (aq + b)(cq + d)⁻¹`, which for `ad − bc = 1` gives
    ///
    /// ```text
    /// z' = ((az + b) conj(cz + d) + a conj(c) t²) / (|cz + d|² + |c|² t²)
    /// t' = t / (|cz + d|² + |c|² t²)
    /// ```
    ///
    /// The map is normalized to determinant one first.
    pub fn apply_halfspace(&self, p: HalfSpacePoint) -> HalfSpacePoint {
        let s = self.det().sqrt();
        let (a, b, c, d) = (self.a / s, self.b / s, self.c / s, self.d / s);
        let z = p.z;
        let t2 = p.t * p.t;
        let czd = c * z + d;
        let denom = czd.norm_sqr() + c.norm_sqr() * t2;
        let zn = ((a * z + b) * czd.conj() + a * c.conj() * t2) / denom;
        HalfSpacePoint { z: zn, t: p.t / denom }
    }
}

/// Point `(z, t)` of upper half-space, `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub z: Complex64,
    pub t: f64,
}

impl HalfSpacePoint {
    pub fn new(z: Complex64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveHeight(t));
        }
        Ok(Self { z, t })
    }

    /// The axis point `(0, t)`.
    pub fn on_axis(t: f64) -> Result<Self> {
        Self::new(ZERO, t)
    }

    pub fn distance(&self, o: &HalfSpacePoint) -> f64 {
        let num = (self.z - o.z).norm_sqr() + (self.t - o.t).powi(2);
        let x = num / (2.0 * self.t * o.t);
        // acosh(1 + x) without cancellation
        (x + (x * (x + 2.0)).sqrt()).ln_1p()
    }
}

/// Tangent vector `(v_x, v_y, v_t)` in the coordinate basis at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TangentVectorH3 {
    pub vx: f64,
    pub vy: f64,
    pub vt: f64,
}

impl TangentVectorH3 {
    pub fn new(vx: f64, vy: f64, vt: f64) -> Self {
        Self { vx, vy, vt }
    }

    pub fn euclidean_norm(&self) -> f64 {
        (self.vx * self.vx + self.vy * self.vy + self.vt * self.vt).sqrt()
    }

    /// Hyperbolic length at `p`: euclidean length over height.
    pub fn hyperbolic_norm(&self, p: HalfSpacePoint) -> f64 {
        self.euclidean_norm() / p.t
    }

    pub fn max_abs_diff(&self, o: &TangentVectorH3) -> f64 {
        (self.vx - o.vx).abs().max((self.vy - o.vy).abs()).max((self.vt - o.vt).abs())
    }
}

/// Coefficient of `∂/∂z` of the projective vector field of `m`: `2(−cz² + 2az + b)`.
pub fn projective_field(m: Sl2Matrix, z: Complex64) -> Complex64 {
    2.0 * (-m.c * z * z + 2.0 * m.a * z + m.b)
}

/// Velocity of the flow `exp(s m)` at `p`, from differentiating the extended action:
/// `ż = b + 2az − cz² + conj(c) t²`, `ṫ = 2t Re(a − cz)`.
pub fn killing_field(m: Sl2Matrix, p: HalfSpacePoint) -> TangentVectorH3 {
    let z = p.z;
    let t2 = p.t * p.t;
    let zdot = m.b + 2.0 * m.a * z - m.c * z * z + m.c.conj() * t2;
    let tdot = 2.0 * p.t * (m.a - m.c * z).re;
    TangentVectorH3::new(zdot.re, zdot.im, tdot)
}

/// Same quantity as [`killing_field`], computed by central differences of
/// `exp(s m) · p` with two levels of Richardson extrapolation.
pub fn killing_field_numeric(m: Sl2Matrix, p: HalfSpacePoint) -> TangentVectorH3 {
    let scale = m.max_abs().max(1e-300);
    let h0 = 1e-2 / scale;
    let diff = |h: f64| {
        let fwd = m.exp(h).apply_halfspace(p);
        let bwd = m.exp(-h).apply_halfspace(p);
        let dz = (fwd.z - bwd.z) / (2.0 * h);
        let dt = (fwd.t - bwd.t) / (2.0 * h);
        [dz.re, dz.im, dt]
    };
    let d1 = diff(h0);
    let d2 = diff(h0 / 2.0);
    let d3 = diff(h0 / 4.0);
    let mut out = [0.0; 3];
    for k in 0..3 {
        let r1 = (4.0 * d2[k] - d1[k]) / 3.0;
        let r2 = (4.0 * d3[k] - d2[k]) / 3.0;
        out[k] = (16.0 * r2 - r1) / 15.0;
    }
    if m.max_abs() == 0.0 {
        return TangentVectorH3::default();
    }
    TangentVectorH3::new(out[0], out[1], out[2])
}

/// Squared bundle norm at the axis point `(0, t)`: `4|a|² + 2|b|²/t² + 2t²|c|²`.
pub fn norm_on_axis(m: Sl2Matrix, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHeight(t));
    }
    Ok(4.0 * m.a.norm_sqr() + 2.0 * m.b.norm_sqr() / (t * t) + 2.0 * t * t * m.c.norm_sqr())
}

/// Hermitian fiber product at `p`. Its real part is the real inner product
/// on `E_p ≅ T_p ⊕ T_p`; `fiber_hermitian(m, m, p)` is the squared norm.
pub fn fiber_hermitian(m1: Sl2Matrix, m2: Sl2Matrix, p: HalfSpacePoint) -> Complex64 {
    // move p to the axis by z ↦ z − p.z
    let shift = Mobius::translation(-p.z);
    let (u, v) = (m1.conjugate(&shift), m2.conjugate(&shift));
    let t2 = p.t * p.t;
    4.0 * u.a * v.a.conj() + 2.0 * u.b * v.b.conj() / t2 + 2.0 * t2 * u.c * v.c.conj()
}

pub fn fiber_norm_sq(m: Sl2Matrix, p: HalfSpacePoint) -> f64 {
    fiber_hermitian(m, m, p).re
}

/// The infinitesimal translation `v̂` with value `v` at `p` and zero curl.
pub fn translation_section(v: TangentVectorH3, p: HalfSpacePoint) -> Sl2Matrix {
    let t = p.t;
    let t2 = t * t;
    // on the axis: ∂̂x ↔ (0, 1/2, 1/(2t²)), ∂̂y ↔ (0, i/2, −i/(2t²)), ∂̂t ↔ (1/(2t), 0, 0)
    let on_axis = Sl2Matrix::new(
        Complex64::new(v.vt / (2.0 * t), 0.0),
        Complex64::new(0.5 * v.vx, 0.5 * v.vy),
        Complex64::new(v.vx / (2.0 * t2), -v.vy / (2.0 * t2)),
    );
    on_axis.conjugate(&Mobius::translation(p.z))
}

/// The section `𝔭(z) = (w − z)² ∂/∂w = ½ [[−z, z²], [−1, z]]`.
pub fn parabolic_section(z: Complex64) -> Sl2Matrix {
    Sl2Matrix::new(-0.5 * z, 0.5 * z * z, Complex64::new(-0.5, 0.0))
}

/// `∂𝔭/∂z = −2(w − z) ∂/∂w`.
pub fn parabolic_section_dz(z: Complex64) -> Sl2Matrix {
    Sl2Matrix::new(Complex64::new(-0.5, 0.0), z, ZERO)
}

/// Decomposition of `T𝔭` for the parabolic field `λ z² ∂/∂z` at an axis point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TParabolic {
    /// Coefficient of `ê_n ⊗ dz`, where `ê_n = t ∂̂/∂t` is the unit normal translation.
    pub normal_coeff: Complex64,
    /// `[𝔭, ∂̂/∂z̄]`; zero on the axis.
    pub dzbar_part: Sl2Matrix,
    /// Coefficient of `ω_n = dt/t`; equals `𝔭`.
    pub normal_form_part: Sl2Matrix,
    /// `|ω|` for `ω = normal_coeff · dz`.
    pub tangent_form_norm: f64,
    /// `|𝔭|` at the point.
    pub parabolic_norm: f64,
    /// Size of the non-normal component of `[𝔭, ∂̂/∂z]`; zero up to rounding.
    pub residual: f64,
}

/// `T𝔭 = [𝔭, ∂̂z] dz + [𝔭, ∂̂z̄] dz̄ + [𝔭, ∂̂t] dt` for `𝔭 = λ z² ∂/∂z` at `p = (0, t)`.
pub fn t_operator_parabolic(lambda: Complex64, p: HalfSpacePoint) -> Result<TParabolic> {
    if p.z.norm() > 1e-14 {
        return Err(crate::error::invalid("p", "point must lie on the vertical axis"));
    }
    let t = p.t;
    // λ z² ∂/∂z = 2(−c z²) ∂/∂z
    let par = Sl2Matrix::new(ZERO, ZERO, -0.5 * lambda);
    let dx = translation_section(TangentVectorH3::new(1.0, 0.0, 0.0), p);
    let dy = translation_section(TangentVectorH3::new(0.0, 1.0, 0.0), p);
    let dt = translation_section(TangentVectorH3::new(0.0, 0.0, 1.0), p);
    let dz_hat = 0.5 * (dx - dy.times_i());
    let dzbar_hat = 0.5 * (dx + dy.times_i());
    let unit_normal = t * dt;

    let along_dz = par.bracket(dz_hat);
    let normal_coeff = along_dz.a / unit_normal.a;
    let residual = (along_dz - normal_coeff * unit_normal).max_abs();
    let normal_form_part = t * par.bracket(dt);

    // |dz|² = |dx|² + |dy|² = 2t² in the hyperbolic metric
    let dz_norm = (2.0f64).sqrt() * t;
    Ok(TParabolic {
        normal_coeff,
        dzbar_part: par.bracket(dzbar_hat),
        normal_form_part,
        tangent_form_norm: normal_coeff.norm() * dz_norm,
        parabolic_norm: norm_on_axis(par, t)?.sqrt(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projective_field_examples() {
        assert_eq!(projective_field(Sl2Matrix::real(0.0, 1.0, 0.0), ZERO), c(2.0, 0.0));
        assert_eq!(projective_field(Sl2Matrix::ZERO, c(3.0, -1.0)), ZERO);
        let v = projective_field(Sl2Matrix::real(0.0, 0.0, 1.0), c(1.0, 1.0));
        assert!((v - c(0.0, -4.0)).norm() < 1e-15);
    }

    #[test]
    fn projective_field_is_twice_the_boundary_flow() {
        let m = Sl2Matrix::real(0.0, 0.0, 1.0);
        let z = c(1.0, 1.0);
        let h = 1e-4;
        let d = (m.exp(h).apply(z) - m.exp(-h).apply(z)) / (2.0 * h);
        assert!((projective_field(m, z) - 2.0 * d).norm() < 1e-7);
    }

    #[test]
    fn killing_field_examples() {
        let p = HalfSpacePoint::on_axis(1.0).unwrap();
        let v = killing_field(Sl2Matrix::real(1.0, 0.0, 0.0), p);
        assert!(v.max_abs_diff(&TangentVectorH3::new(0.0, 0.0, 2.0)) < 1e-15);
        let v = killing_field(Sl2Matrix::real(0.0, 1.0, 0.0), p);
        assert!(v.max_abs_diff(&TangentVectorH3::new(1.0, 0.0, 0.0)) < 1e-15);
        assert_eq!(killing_field(Sl2Matrix::ZERO, p), TangentVectorH3::default());
    }

    #[test]
    fn numeric_flow_matches_closed_form() {
        let m = Sl2Matrix::new(c(0.3, -0.2), c(1.1, 0.4), c(-0.7, 0.9));
        let p = HalfSpacePoint::new(c(0.2, -0.5), 0.8).unwrap();
        let exact = killing_field(m, p);
        let numeric = killing_field_numeric(m, p);
        assert!(exact.max_abs_diff(&numeric) < 1e-10, "{exact:?} vs {numeric:?}");
    }

    #[test]
    fn norm_on_axis_examples() {
        assert_eq!(norm_on_axis(Sl2Matrix::real(1.0, 0.0, 0.0), 7.0).unwrap(), 4.0);
        assert_eq!(norm_on_axis(Sl2Matrix::real(0.0, 1.0, 0.0), 1.0).unwrap(), 2.0);
        assert_eq!(norm_on_axis(Sl2Matrix::real(0.0, 0.0, 1.0), 0.5).unwrap(), 0.5);
        assert!(matches!(norm_on_axis(Sl2Matrix::ZERO, 0.0), Err(Error::NonPositiveHeight(_))));
        assert!(HalfSpacePoint::new(ZERO, -1.0).is_err());
    }

    #[test]
    fn bracket_examples() {
        let e = Sl2Matrix::real(0.0, 1.0, 0.0);
        let f = Sl2Matrix::real(0.0, 0.0, 1.0);
        assert_eq!(e.bracket(f), Sl2Matrix::real(1.0, 0.0, 0.0));
        let m = Sl2Matrix::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.0));
        assert_eq!(m.bracket(m), Sl2Matrix::ZERO);
    }

    #[test]
    fn translation_sections_have_the_right_value_and_no_curl() {
        let p = HalfSpacePoint::new(c(0.4, -1.3), 0.6).unwrap();
        let v = TangentVectorH3::new(0.3, -1.2, 0.7);
        let s = translation_section(v, p);
        assert!(killing_field(s, p).max_abs_diff(&v) < 1e-13);
        assert!(killing_field(s.times_i(), p).euclidean_norm() < 1e-13);
        let norm2 = fiber_norm_sq(s, p);
        assert!((norm2 - v.hyperbolic_norm(p).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn parabolic_anchor() {
        for k in 0..10 {
            let t = 1e-3 * (1e4f64).powf(k as f64 / 9.0);
            let n = norm_on_axis(parabolic_section(ZERO), t).unwrap();
            assert!((n - t * t / 2.0).abs() <= 1e-15 * (1.0 + t * t));
        }
    }

    #[test]
    fn t_parabolic_examples() {
        let tp = t_operator_parabolic(ONE, HalfSpacePoint::on_axis(1.0).unwrap()).unwrap();
        assert!((tp.normal_coeff - c(0.5, 0.0)).norm() < 1e-15);
        let r = 0.5f64.sqrt();
        assert!((tp.tangent_form_norm - r).abs() < 1e-15);
        assert!((tp.parabolic_norm - r).abs() < 1e-15);
        assert_eq!(tp.dzbar_part, Sl2Matrix::ZERO);
        assert!(tp.residual < 1e-15);
        // ω_n part is 𝔭 itself
        let par = Sl2Matrix::new(ZERO, ZERO, c(-0.5, 0.0));
        assert!((tp.normal_form_part - par).max_abs() < 1e-15);

        let tp = t_operator_parabolic(ZERO, HalfSpacePoint::on_axis(1.0).unwrap()).unwrap();
        assert_eq!(tp.normal_coeff, ZERO);
        assert_eq!(tp.tangent_form_norm, 0.0);
        assert_eq!(tp.parabolic_norm, 0.0);

        let tp = t_operator_parabolic(c(0.0, 2.0), HalfSpacePoint::on_axis(2.0).unwrap()).unwrap();
        assert!((tp.normal_coeff - c(0.0, 1.0)).norm() < 1e-15);
        assert!((tp.parabolic_norm - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((tp.tangent_form_norm - tp.parabolic_norm).abs() < 1e-14);
    }

    #[test]
    fn t_parabolic_rejects_off_axis() {
        let p = HalfSpacePoint::new(c(0.1, 0.0), 1.0).unwrap();
        assert!(t_operator_parabolic(ONE, p).is_err());
    }

    #[test]
    fn from_matrix_rejects_trace() {
        assert!(Sl2Matrix::from_matrix([[ONE, ZERO], [ZERO, ONE]]).is_err());
        let m = Sl2Matrix::from_matrix([[ONE, c(2.0, 0.0)], [c(3.0, 0.0), -ONE]]).unwrap();
        assert_eq!(m, Sl2Matrix::real(1.0, 2.0, 3.0));
    }

    #[test]
    fn halfspace_action_is_isometric() {
        let g = Sl2Matrix::new(c(0.3, 0.2), c(-0.4, 1.0), c(0.8, -0.1)).exp(1.0);
        let p = HalfSpacePoint::new(c(0.1, 0.2), 0.5).unwrap();
        let q = HalfSpacePoint::new(c(-0.7, 1.1), 2.0).unwrap();
        let d0 = p.distance(&q);
        let d1 = g.apply_halfspace(p).distance(&g.apply_halfspace(q));
        assert!((d0 - d1).abs() < 1e-12);
    }
}
