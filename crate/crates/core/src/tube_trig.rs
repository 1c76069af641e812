//! Trigonometry of cone tubes: packing radii, tube radii and the bending-length constant.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `acosh(1 + ε)` without cancellation for small `ε`.
pub fn acosh1p(eps: f64) -> f64 {
    (eps + (eps * (2.0 + eps)).sqrt()).ln_1p()
}

/// `R₀ = asinh √2`, the tube radius at which the packing arguments are run.
pub fn base_radius() -> f64 {
    2f64.sqrt().asinh()
}

/// Radius of the balls packed at the vertices of an equilateral arrangement on
/// a tube of radius `R`: `f(R) = acosh(2 cosh R / √(1 + 3cosh²R))`.
pub fn f_packing(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid("R", format!("{r} is not positive")));
    }
    if r > 350.0 {
        return Ok((2.0 / 3f64.sqrt()).acosh());
    }
    let c = r.cosh();
    let q = (1.0 + 3.0 * c * c).sqrt();
    let sh = r.sinh();
    Ok(acosh1p(sh * sh / (q * (2.0 * c + q))))
}

/// `sinh g(r) = min(1/√(2 + 24L₀), sinh(r)/√2)`.
pub fn g_floor(r: f64, l0: f64) -> Result<f64> {
    g_floor_with(r, l0, 24.0)
}

/// [`g_floor`] with `2π² coth(R₀)` in place of 24, which is the constant the
/// trigonometry actually delivers.
pub fn g_floor_conservative(r: f64, l0: f64) -> Result<f64> {
    g_floor_with(r, l0, exact_sinh_rp_constant())
}

fn g_floor_with(r: f64, l0: f64, k: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid("r", format!("{r} is not positive")));
    }
    check_l0(l0)?;
    let cap = 1.0 / (2.0 + k * l0).sqrt();
    Ok(cap.min(r.sinh() / 2f64.sqrt()).asinh())
}

fn check_l0(l0: f64) -> Result<()> {
    if !(l0 > 0.0 && l0 <= 1.0) {
        return Err(invalid("L0", format!("{l0} is not in (0, 1]")));
    }
    Ok(())
}

/// `2 f(g(f(R₀)/2))` for a given `L₀`.
pub fn bending_length_constant_for(l0: f64) -> Result<f64> {
    let r = f_packing(base_radius())? / 2.0;
    Ok(2.0 * f_packing(g_floor(r, l0)?)?)
}

/// `2 f(g(f(asinh √2)/2))`; the cap in `g` does not bind for `L₀ ≤ 1`.
pub fn bending_length_constant() -> f64 {
    bending_length_constant_for(1.0).expect("constant inputs are in range")
}

/// Axis of a cone singularity: length `L` and cone angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeAxisData {
    pub length: f64,
    pub angle: f64,
}

impl ConeAxisData {
    pub fn new(length: f64, angle: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid("length", format!("{length} is not positive")));
        }
        if !(angle > 0.0 && angle <= TAU) {
            return Err(invalid("angle", format!("{angle} is not in (0, 2π]")));
        }
        Ok(Self { length, angle })
    }
}

/// Solves `θL sinh(2R) = 1`.
pub fn margulis_tube_radius(axis: ConeAxisData) -> Result<f64> {
    let p = axis.angle * axis.length;
    if !(p > 0.0) {
        return Err(invalid("axis", "θL must be positive"));
    }
    Ok(0.5 * (1.0 / p).asinh())
}

/// Injectivity radius at distance `d` from the axis of a wedge of angle `θ`:
/// `sinh r = sinh d sin(θ/2)` for `θ ≤ π`, else `r = d`.
pub fn wedge_injectivity(d: f64, theta: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(invalid("d", format!("{d} is not positive")));
    }
    if !(theta > 0.0 && theta <= TAU) {
        return Err(invalid("theta", format!("{theta} is not in (0, 2π]")));
    }
    if theta >= PI {
        return Ok(d);
    }
    Ok((d.sinh() * (theta / 2.0).sin()).asinh())
}

/// Distance `d` from the axis at which the half-space spanned by a wedge face
/// stays inside the tube: `sinh l = sinh R sin(θ/2)`, `sinh d = tanh l / tan(θ/2)`.
pub fn halfspace_embedding_distance(r_c: f64, theta: f64) -> Result<f64> {
    if !(r_c > 0.0) {
        return Err(invalid("R_c", format!("{r_c} is not positive")));
    }
    if !(theta > 0.0 && theta <= PI / 2.0) {
        return Err(invalid("theta", format!("{theta} is not in (0, π/2]")));
    }
    let half = theta / 2.0;
    let l = (r_c.sinh() * half.sin()).asinh();
    Ok((l.tanh() / half.tan()).asinh())
}

/// Both sides of `1/√(2 + 2π² coth(R₀) L₀) ≥ 1/√(2 + 24 L₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinhRpBound {
    pub l0: f64,
    /// `2π² coth(R₀)`.
    pub exact_constant: f64,
    /// The rounded constant 24.
    pub rounded_constant: f64,
    /// `1/√(2 + 2π² coth(R₀) L₀)`.
    pub intermediate: f64,
    /// `1/√(2 + 24 L₀)`.
    pub rounded: f64,
    /// Whether `intermediate ≥ rounded`; false because `2π²√(3/2) > 24`.
    pub chain_holds: bool,
    /// The smaller, and hence valid, of the two lower bounds.
    pub conservative: f64,
}

/// `2π² coth(asinh √2) = 2π² √(3/2)`.
pub fn exact_sinh_rp_constant() -> f64 {
    2.0 * PI * PI * 1.5f64.sqrt()
}

pub fn sinh_rp_lower_bound(l0: f64) -> Result<SinhRpBound> {
    check_l0(l0)?;
    let exact = exact_sinh_rp_constant();
    let intermediate = 1.0 / (2.0 + exact * l0).sqrt();
    let rounded = 1.0 / (2.0 + 24.0 * l0).sqrt();
    Ok(SinhRpBound {
        l0,
        exact_constant: exact,
        rounded_constant: 24.0,
        intermediate,
        rounded,
        chain_holds: intermediate >= rounded,
        conservative: intermediate.min(rounded),
    })
}

/// Point on the spherical cone-surface `S_t`: longitude `theta ∈ [0, t)` and
/// height `z = cos(colatitude) ∈ [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpherePoint {
    pub theta: f64,
    pub z: f64,
}

/// Geodesic distance on the unit sphere wedge of angle `t` with its sides glued.
///
/// A shortest path between points off the cone points spans a longitude
/// interval of width at most `π`, so it lies in a lune that develops isometrically
/// onto the round sphere. Such a lune meets at most `⌈2π/t⌉ + 1` consecutive
/// copies of the wedge, so minimizing the great-circle distance over the
/// longitude offsets `Δθ + kt` with `|k| ≤ ⌈2π/t⌉ + 1` and `|Δθ + kt| ≤ π`
/// is exhaustive. Paths through a cone point are never shorter.
pub fn cone_sphere_distance(p1: ConeSpherePoint, p2: ConeSpherePoint, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= TAU) {
        return Err(invalid("t", format!("{t} is not in (0, 2π]")));
    }
    for p in [p1, p2] {
        if !(p.z.abs() <= 1.0) || !(p.theta >= 0.0 && p.theta < t) {
            return Err(invalid("point", format!("({}, {}) is not on S_t", p.theta, p.z)));
        }
    }
    let s1 = (1.0 - p1.z * p1.z).max(0.0).sqrt();
    let s2 = (1.0 - p2.z * p2.z).max(0.0).sqrt();
    let kmax = (TAU / t).ceil() as i64 + 1;
    let dth = p2.theta - p1.theta;
    let mut best = f64::INFINITY;
    for k in -kmax..=kmax {
        let delta = dth + k as f64 * t;
        if delta.abs() > PI {
            continue;
        }
        let u = [s1, 0.0, p1.z];
        let v = [s2 * delta.cos(), s2 * delta.sin(), p2.z];
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let cx = u[1] * v[2] - u[2] * v[1];
        let cy = u[2] * v[0] - u[0] * v[2];
        let cz = u[0] * v[1] - u[1] * v[0];
        best = best.min((cx * cx + cy * cy + cz * cz).sqrt().atan2(dot));
    }
    // through a pole: colatitudes add
    let (c1, c2) = (p1.z.clamp(-1.0, 1.0).acos(), p2.z.clamp(-1.0, 1.0).acos());
    best = best.min(c1 + c2).min(2.0 * PI - c1 - c2);
    Ok(best)
}

/// Smallest pairwise distance among three points of `S_t`.
pub fn min_pairwise_distance(pts: &[ConeSpherePoint; 3], t: f64) -> Result<f64> {
    let d01 = cone_sphere_distance(pts[0], pts[1], t)?;
    let d02 = cone_sphere_distance(pts[0], pts[2], t)?;
    let d12 = cone_sphere_distance(pts[1], pts[2], t)?;
    Ok(d01.min(d02).min(d12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use astro_float::{BigFloat, Consts, RoundingMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: usize = 256;
    const RM: RoundingMode = RoundingMode::ToEven;

    fn big(x: f64) -> BigFloat {
        BigFloat::from_f64(x, P)
    }

    fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
        let s = x.format(astro_float::Radix::Dec, RM, cc).unwrap();
        s.parse().unwrap()
    }

    /// `f(R)` at 256 bits, from `cosh R` given as a big float.
    fn f_big(cosh_r: &BigFloat, cc: &mut Consts) -> BigFloat {
        let three = big(3.0);
        let q = three.mul(cosh_r, P, RM).mul(cosh_r, P, RM).add(&big(1.0), P, RM).sqrt(P, RM);
        big(2.0).mul(cosh_r, P, RM).div(&q, P, RM).acosh(P, RM, cc)
    }

    /// `2 f(g(f(R₀)/2))` in 256-bit arithmetic.
    fn bending_big(cc: &mut Consts) -> BigFloat {
        // cosh R₀ = √3
        let f0 = f_big(&big(3.0).sqrt(P, RM), cc);
        let r = f0.div(&big(2.0), P, RM);
        let sinh_g = r.sinh(P, RM, cc).div(&big(2.0).sqrt(P, RM), P, RM);
        let g = sinh_g.asinh(P, RM, cc);
        big(2.0).mul(&f_big(&g.cosh(P, RM, cc), cc), P, RM)
    }

    #[test]
    fn f_examples() {
        assert!(f_packing(1e-9).unwrap() < 1e-8);
        let v = f_packing(base_radius()).unwrap();
        assert!((v - 0.433507363245283).abs() < 1e-14);
        // triangle construction: sinh l = sinh R sin(π/3), cosh r = cosh R / cosh l
        let r0 = base_radius();
        let l = (r0.sinh() * (PI / 3.0).sin()).asinh();
        assert!((v - (r0.cosh() / l.cosh()).acosh()).abs() < 1e-14);
        let lim = (2.0 / 3f64.sqrt()).acosh();
        assert!((f_packing(40.0).unwrap() - lim).abs() < 1e-15);
        assert!((lim - 0.549306).abs() < 1e-6);
        assert!(f_packing(0.0).is_err());
    }

    #[test]
    fn f_matches_extended_precision() {
        let mut cc = Consts::new().unwrap();
        let v = to_f64(&f_big(&big(3.0).sqrt(P, RM), &mut cc), &mut cc);
        assert!((f_packing(base_radius()).unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn g_examples() {
        let cap = 1.0 / 26f64.sqrt();
        assert!((cap - 0.196116).abs() < 1e-6);
        let small = g_floor(0.01, 1.0).unwrap();
        assert!((small - (0.01f64.sinh() / 2f64.sqrt()).asinh()).abs() < 1e-16);
        let r = f_packing(base_radius()).unwrap() / 2.0;
        assert!((r - 0.216753681622641).abs() < 1e-14);
        for l0 in [0.1, 0.5, 0.9, 1.0] {
            let g = g_floor(r, l0).unwrap();
            assert!((g - 0.153863155687114).abs() < 1e-14, "{g}");
        }
        assert!(g_floor(1e-12, 0.5).unwrap() < 1e-12);
        assert!(g_floor(0.1, 0.0).is_err());
        // the cap binds for large r
        assert!((g_floor(5.0, 1.0).unwrap() - cap.asinh()).abs() < 1e-16);
    }

    #[test]
    fn bending_constant() {
        let b = bending_length_constant();
        assert!((b - 0.152958).abs() < 1e-3);
        assert!((b - 0.152957887767167).abs() < 1e-14);
        let mut cc = Consts::new().unwrap();
        let hp = to_f64(&bending_big(&mut cc), &mut cc);
        assert!((b - hp).abs() < 1e-12, "{b} vs {hp}");
        // f(R) < R, so skipping the outer f increases the value
        let r = f_packing(base_radius()).unwrap() / 2.0;
        assert!(2.0 * g_floor(r, 1.0).unwrap() > b);
        for l0 in [0.05, 0.5, 0.99] {
            assert_eq!(bending_length_constant_for(l0).unwrap(), b);
        }
    }

    #[test]
    fn margulis_examples() {
        let a = ConeAxisData::new(0.01, TAU).unwrap();
        let r = margulis_tube_radius(a).unwrap();
        assert!((r - 0.5 * (1.0 / (TAU * 0.01)).asinh()).abs() < 1e-15);
        assert!((r - 1.730712901319393).abs() < 1e-14, "{r}");
        assert!((TAU * 0.01 * (2.0 * r).sinh() - 1.0).abs() < 1e-12);
        let r = margulis_tube_radius(ConeAxisData::new(1.0, 1.0).unwrap()).unwrap();
        assert!((r - 0.440687).abs() < 1e-6);
        assert!(ConeAxisData::new(0.0, 1.0).is_err());
        assert!(ConeAxisData::new(1.0, 7.0).is_err());
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_injectivity(0.7, PI).unwrap(), 0.7);
        let v = wedge_injectivity(1.0, PI / 2.0).unwrap();
        assert!((v - 0.756687003298252).abs() < 1e-14);
        assert_eq!(wedge_injectivity(2.0, 4.0).unwrap(), 2.0);
        let below = wedge_injectivity(1.3, PI - 1e-9).unwrap();
        assert!((below - 1.3).abs() < 1e-8);
    }

    #[test]
    fn halfspace_examples() {
        let d = halfspace_embedding_distance(base_radius(), PI / 2.0).unwrap();
        assert!((d - (1.0 / 2f64.sqrt()).asinh()).abs() < 1e-15);
        assert!((d - 0.658479).abs() < 1e-6);
        for i in 1..20 {
            for j in 1..20 {
                let r = 0.2 * i as f64;
                let th = PI / 2.0 * j as f64 / 19.0;
                assert!(halfspace_embedding_distance(r, th).unwrap() < r);
            }
        }
        // small angle: sinh d ≈ tanh(sinh R · θ/2) / (θ/2)
        let (r, th) = (1.0f64, 1e-4);
        let d = halfspace_embedding_distance(r, th).unwrap();
        let approx = ((r.sinh() * th / 2.0).tanh() / (th / 2.0)).asinh();
        assert!((d - approx).abs() < 1e-8);
        assert!(halfspace_embedding_distance(1.0, 2.0).is_err());
    }

    #[test]
    fn sinh_rp_chain() {
        let b = sinh_rp_lower_bound(1.0).unwrap();
        assert!((b.rounded - 0.196116).abs() < 1e-6);
        assert!(!b.chain_holds);
        assert!((b.exact_constant - 24.175494745796096).abs() < 1e-12);
        assert_eq!(b.conservative, b.intermediate);
        let tiny = sinh_rp_lower_bound(1e-12).unwrap();
        assert!((tiny.rounded - 1.0 / 2f64.sqrt()).abs() < 1e-10);
        // exact constant at extended precision
        let mut cc = Consts::new().unwrap();
        let pi = cc.pi(P, RM);
        let k = big(2.0).mul(&pi, P, RM).mul(&pi, P, RM).mul(&big(1.5).sqrt(P, RM), P, RM);
        assert!((to_f64(&k, &mut cc) - exact_sinh_rp_constant()).abs() < 1e-13);
        assert!(to_f64(&k.sub(&big(24.0), P, RM), &mut cc) > 0.17);
    }

    #[test]
    fn sphere_distance_examples() {
        let n = ConeSpherePoint { theta: 0.0, z: 1.0 };
        let s = ConeSpherePoint { theta: 1.0, z: -1.0 };
        assert!((cone_sphere_distance(n, s, TAU).unwrap() - PI).abs() < 1e-15);
        let a = ConeSpherePoint { theta: 0.0, z: 0.0 };
        let b = ConeSpherePoint { theta: PI, z: 0.0 };
        assert!((cone_sphere_distance(a, b, TAU).unwrap() - PI).abs() < 1e-15);
        // on S_π the same equatorial points coincide after one wedge turn
        let b = ConeSpherePoint { theta: 0.5, z: 0.0 };
        assert!((cone_sphere_distance(a, b, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let c = ConeSpherePoint { theta: 0.9, z: 0.0 };
        assert!((cone_sphere_distance(a, c, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(cone_sphere_distance(a, ConeSpherePoint { theta: 2.0, z: 0.0 }, 1.0).is_err());
    }

    #[test]
    fn packing_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in [TAU, 1.5 * PI, PI, PI / 2.0] {
            for _ in 0..2000 {
                let pts = [(); 3].map(|_| ConeSpherePoint { theta: rng.gen_range(0.0..t), z: rng.gen_range(-1.0..=1.0) });
                assert!(min_pairwise_distance(&pts, t).unwrap() <= 2.0 * PI / 3.0 + 1e-9);
            }
        }
    }

    #[test]
    fn monotone_on_grids() {
        let mut last = (0.0, 0.0);
        for k in 1..200 {
            let r = 0.05 * k as f64;
            let (f, g) = (f_packing(r).unwrap(), g_floor(r, 0.5).unwrap());
            assert!(f > last.0 && g >= last.1 && f < r);
            last = (f, g);
        }
    }
}
