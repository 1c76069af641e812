//! Holomorphic evaluators and their Taylor coefficients.
//!
//! Polynomials and rational maps expand exactly. Anything else goes through
//! the Cauchy integral on a circle, sampled with the trapezoid rule, which is
//! spectrally accurate for functions holomorphic on a neighbourhood of the disk.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Something that can be evaluated and expanded near a point.
///
/// Implementations must be safe to call from several threads at once.
pub trait Holomorphic: Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Taylor coefficients `a_0, …, a_order` of `h ↦ f(z + h)`.
    fn taylor(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        cauchy_taylor(|w| self.eval(w), z, order)
    }
}

impl<F> Holomorphic for F
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// `k`-th derivative at `z`.
pub fn derivative<H: Holomorphic + ?Sized>(f: &H, z: Complex64, k: usize) -> Result<Complex64> {
    let a = f.taylor(z, k)?;
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    Ok(a[k] * fact)
}

/// Taylor coefficients from the trapezoid rule on `|w − z| = r`.
///
/// The radius starts at `0.5 (1 + |z|)` and halves until the sampled Fourier
/// series has decayed. Mass in the negative modes means the evaluator is not
/// holomorphic there and is reported as such.
pub fn cauchy_taylor<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
    let r0 = 0.5 * (1.0 + z.norm());
    let mut r = r0;
    let mut last_failure = None;
    while r >= 1e-7 * r0 {
        for &n in &[64usize, 256] {
            match circle_modes(&f, z, r, n) {
                None => break,
                Some(modes) => {
                    let scale = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    if scale == 0.0 {
                        return Ok(vec![ZERO; order + 1]);
                    }
                    let pos = |m: usize| modes[m];
                    let neg = |m: usize| modes[n - m];
                    let tail = (n / 4..n / 2).map(|m| pos(m).norm()).fold(0.0, f64::max);
                    if tail > 1e-12 * scale {
                        continue;
                    }
                    let negative = (1..n / 4).map(|m| neg(m).norm()).fold(0.0, f64::max);
                    if negative > 1e-8 * scale {
                        // could be an unresolved pole just outside the circle; retry smaller
                        last_failure = Some(Error::NotHolomorphic { re: z.re, im: z.im, residual: negative / scale });
                        break;
                    }
                    if order >= n / 4 {
                        return Err(Error::DerivativeDiverged { re: z.re, im: z.im });
                    }
                    return Ok((0..=order).map(|k| pos(k) / r.powi(k as i32)).collect());
                }
            }
        }
        r *= 0.5;
    }
    Err(last_failure.unwrap_or(Error::DerivativeDiverged { re: z.re, im: z.im }))
}

/// Fourier modes `c_m = (1/n) Σ f(z + r e^{iθ_j}) e^{−imθ_j}`, indexed mod `n`.
fn circle_modes<F: Fn(Complex64) -> Complex64>(f: &F, z: Complex64, r: f64, n: usize) -> Option<Vec<Complex64>> {
    let roots: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64)).collect();
    let mut samples = Vec::with_capacity(n);
    for w in &roots {
        let v = f(z + r * w);
        if !v.re.is_finite() || !v.im.is_finite() {
            return None;
        }
        samples.push(v);
    }
    let modes = (0..n)
        .map(|m| {
            let s: Complex64 = samples.iter().enumerate().map(|(j, v)| v * roots[(j * m) % n].conj()).sum();
            s / n as f64
        })
        .collect();
    Some(modes)
}

/// Polynomial with complex coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity `z`.
    pub fn z() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&ZERO) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(ZERO);
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::constant(ZERO);
        }
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or(ZERO);
        Polynomial::new((0..n).map(|k| get(self, k) + get(o, k)).collect())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut out = vec![ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, k: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn pow(&self, n: usize) -> Polynomial {
        (0..n).fold(Polynomial::constant(ONE), |acc, _| acc.mul(self))
    }

    /// Coefficients of `h ↦ p(z + h)`.
    pub fn shifted(&self, z: Complex64) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        // repeated synthetic division
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += z * next;
            }
        }
        c
    }
}

impl Holomorphic for Polynomial {
    fn eval(&self, z: Complex64) -> Complex64 {
        Polynomial::eval(self, z)
    }

    fn taylor(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let mut c = self.shifted(z);
        c.resize(order + 1, ZERO);
        Ok(c)
    }
}

/// Quotient of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Rational {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(crate::error::invalid("den", "denominator is the zero polynomial"));
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::constant(ONE) }
    }

    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if (a * d - b * c).norm() == 0.0 {
            return Err(crate::error::invalid("mobius", "ad − bc = 0"));
        }
        Self::new(Polynomial::new(vec![b, a]), Polynomial::new(vec![d, c]))
    }

    /// The Koebe function `z / (1 − z)²`.
    pub fn koebe() -> Self {
        Self {
            num: Polynomial::z(),
            den: Polynomial::from_real(&[1.0, -2.0, 1.0]),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `self ∘ inner`, by homogenizing in the degree of `self`.
    pub fn compose(&self, inner: &Rational) -> Rational {
        let d = self.num.degree().max(self.den.degree());
        let (n, q) = (&inner.num, &inner.den);
        let homog = |p: &Polynomial| {
            let mut acc = Polynomial::constant(ZERO);
            for (i, &c) in p.coeffs().iter().enumerate() {
                if c != ZERO {
                    acc = acc.add(&n.pow(i).mul(&q.pow(d - i)).scale(c));
                }
            }
            acc
        };
        Rational { num: homog(&self.num), den: homog(&self.den) }
    }
}

impl Holomorphic for Rational {
    fn eval(&self, z: Complex64) -> Complex64 {
        Rational::eval(self, z)
    }

    fn taylor(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let mut n = self.num.shifted(z);
        let mut d = self.den.shifted(z);
        n.resize(order + 1, ZERO);
        d.resize(order + 1, ZERO);
        let scale = d.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if d[0].norm() <= 1e-15 * scale {
            return Err(Error::DerivativeDiverged { re: z.re, im: z.im });
        }
        // series division n / d
        let mut q = vec![ZERO; order + 1];
        for k in 0..=order {
            let mut s = n[k];
            for j in 0..k {
                s -= q[j] * d[k - j];
            }
            q[k] = s / d[0];
        }
        Ok(q)
    }
}
