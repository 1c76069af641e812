//! Pleated planes in the hyperboloid model of H³, `R^{3,1}` with
//! `⟨x, y⟩ = x₁y₁ + x₂y₂ + x₃y₃ − x₄y₄`. The plane H² sits in `{x₃ = 0}`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    average_bending_norm, crossing, disk_distance, exp_at, from_hyperboloid, minkowski, to_hyperboloid,
    BendingNormResult, Crossing, FiniteLamination, SupOptions, Vec3, Window,
};
use crate::error::{invalid, Error, Result};

fn j4() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0))
}

fn lift(v: &Vec3) -> Vector4<f64> {
    Vector4::new(v[0], v[1], 0.0, v[2])
}

pub fn minkowski4(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// H³ distance, accurate for nearby points.
pub fn h3_distance(p: &Vector4<f64>, q: &Vector4<f64>) -> f64 {
    let d = p - q;
    2.0 * (minkowski4(&d, &d).max(0.0).sqrt() / 2.0).asinh()
}

/// Rotation by `theta` about the geodesic `{⟨x, n⟩ = ⟨x, e₃⟩ = 0}`, turning `n` towards `e₃`.
fn rotation(n: &Vector4<f64>, theta: f64) -> Matrix4<f64> {
    let e = Vector4::new(0.0, 0.0, 1.0, 0.0);
    let j = j4();
    let nn = n * (n.transpose() * j);
    let ee = e * (e.transpose() * j);
    let en = e * (n.transpose() * j) - n * (e.transpose() * j);
    Matrix4::identity() + (nn + ee) * (theta.cos() - 1.0) + en * theta.sin()
}

/// Angle of an elliptic element from `tr = 2 + 2 cos θ`.
pub fn rotation_angle(m: &Matrix4<f64>) -> f64 {
    ((m.trace() - 2.0) / 2.0).clamp(-1.0, 1.0).acos()
}

/// Lorentz inverse `J Mᵀ J`.
pub fn lorentz_inverse(m: &Matrix4<f64>) -> Matrix4<f64> {
    let j = j4();
    j * m.transpose() * j
}

/// Convex pleated plane bent along a finite lamination, anchored at a base region.
#[derive(Debug, Clone)]
pub struct PleatedPlane {
    lam: FiniteLamination,
    base: Vec3,
    /// Leaf normals oriented away from the base point.
    far: Vec<Vec3>,
    rotations: Vec<Matrix4<f64>>,
}

impl PleatedPlane {
    pub fn new(lam: &FiniteLamination, basepoint: Complex64) -> Result<Self> {
        if let Some(&w) = lam.weights().iter().find(|&&w| !(w > 0.0 && w < PI)) {
            return Err(Error::BendingOutOfRange(w));
        }
        if !(basepoint.norm() < 1.0) {
            return Err(invalid("basepoint", "must lie in the open disk"));
        }
        let base = to_hyperboloid(basepoint);
        let mut far = vec![];
        for (i, n) in lam.normals().iter().enumerate() {
            let s = minkowski(&base, n);
            if s.abs() < 1e-12 {
                return Err(invalid("basepoint", format!("lies on leaf {i}")));
            }
            far.push(if s > 0.0 { [-n[0], -n[1], -n[2]] } else { *n });
        }
        let rotations = far.iter().zip(lam.weights()).map(|(f, &w)| rotation(&lift(f), w)).collect();
        Ok(Self { lam: lam.clone(), base, far, rotations })
    }

    /// A base point off every leaf, as close to `center` as a short spiral search finds.
    pub fn anchored_near(lam: &FiniteLamination, center: Complex64) -> Result<Self> {
        for k in 0..64 {
            let z = if k == 0 { center } else { exp_at(center, 1e-3 * k as f64, 1.0 + 0.7 * k as f64) };
            match Self::new(lam, z) {
                Err(Error::InvalidArgument { name: "basepoint", .. }) => continue,
                r => return r,
            }
        }
        Err(invalid("basepoint", "no point off the leaves near the centre"))
    }

    pub fn lamination(&self) -> &FiniteLamination {
        &self.lam
    }

    /// Leaves separating `x` from the base point, nearest first.
    pub fn separating(&self, x: &Vec3) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.far.len()).filter(|&i| minkowski(x, &self.far[i]) > 0.0).collect();
        if idx.len() > 1 {
            let d = -minkowski(&self.base, x);
            let dist = d.max(1.0).acosh();
            // unit tangent at the base point towards x
            let v = super::scale(&super::add(x, &super::scale(&self.base, -d)), 1.0 / dist.sinh());
            let param = |i: usize| match crossing(&self.base, &v, &self.far[i]) {
                Crossing::At(s) => s,
                _ => f64::INFINITY,
            };
            idx.sort_by(|&a, &b| param(a).total_cmp(&param(b)));
        }
        idx
    }

    fn isometry_for(&self, seps: &[usize]) -> Matrix4<f64> {
        seps.iter().fold(Matrix4::identity(), |acc, &i| acc * self.rotations[i])
    }

    /// Isometry of H³ carrying the region containing `z`.
    pub fn region_isometry(&self, z: Complex64) -> Matrix4<f64> {
        self.isometry_for(&self.separating(&to_hyperboloid(z)))
    }

    pub fn eval(&self, z: Complex64) -> Vector4<f64> {
        let x = to_hyperboloid(z);
        self.isometry_for(&self.separating(&x)) * lift(&x)
    }

    /// Isometry taking the image of the region of `z` to that of `w`.
    pub fn relative_isometry(&self, z: Complex64, w: Complex64) -> Matrix4<f64> {
        self.region_isometry(w) * lorentz_inverse(&self.region_isometry(z))
    }
}

/// Largest `d_H³(p(x), p(y)) / d_H²(x, y)` over the sample pairs.
pub fn lipschitz_check(plane: &PleatedPlane, samples: &[(Complex64, Complex64)]) -> f64 {
    samples
        .par_iter()
        .map(|&(a, b)| {
            let d2 = disk_distance(a, b);
            if d2 < 1e-9 {
                return 0.0;
            }
            h3_distance(&plane.eval(a), &plane.eval(b)) / d2
        })
        .reduce(|| 0.0, f64::max)
}

/// Bending norm at `L` with an embeddedness heuristic.
#[derive(Debug, Clone, Serialize)]
pub struct BendingCheck {
    pub norm: BendingNormResult,
    pub embedded_hint: bool,
    pub segments_tested: usize,
    pub finest_spacing: f64,
    pub heuristic: &'static str,
}

/// Sampled self-intersection test.
///
/// Each region maps into a totally geodesic plane. Geodesic segments joining
/// neighbouring grid points of one region are intersected exactly with the
/// planes of the other regions, and a hit is pulled back and tested for
/// membership in that region. Grids are refined until a hit is found.
fn find_self_intersection(plane: &PleatedPlane, win: &Window, spacings: &[f64]) -> (bool, usize) {
    let mut tested = 0;
    for &h in spacings {
        let m = (win.radius / h).ceil() as i64;
        let mut pts: HashMap<(i64, i64), (Vec<usize>, Vector4<f64>)> = HashMap::new();
        for i in -m..=m {
            for j in -m..=m {
                let (u, w) = (i as f64 * h, j as f64 * h);
                let r = (u * u + w * w).sqrt();
                if r > win.radius {
                    continue;
                }
                let z = exp_at(win.center, r, w.atan2(u));
                let x = to_hyperboloid(z);
                if plane.far.iter().any(|n| minkowski(&x, n).abs() < 1e-12) {
                    continue;
                }
                let seps = plane.separating(&x);
                let img = plane.isometry_for(&seps) * lift(&x);
                pts.insert((i, j), (seps, img));
            }
        }
        let mut regions: HashMap<Vec<usize>, (Matrix4<f64>, Vector4<f64>)> = HashMap::new();
        for (seps, _) in pts.values() {
            regions.entry(seps.clone()).or_insert_with(|| {
                let a = plane.isometry_for(seps);
                let normal = a * Vector4::new(0.0, 0.0, 1.0, 0.0);
                (a, normal)
            });
        }
        let mut segs = vec![];
        for (&(i, j), (s, p)) in &pts {
            for nb in [(i + 1, j), (i, j + 1)] {
                if let Some((s2, q)) = pts.get(&nb) {
                    if s2 == s {
                        segs.push((s.clone(), *p, *q));
                    }
                }
            }
        }
        // fixed order so the result does not depend on hashing
        segs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1[0].total_cmp(&b.1[0])).then(a.1[1].total_cmp(&b.1[1])));
        let mut region_list: Vec<_> = regions.into_iter().collect();
        region_list.sort_by(|a, b| a.0.cmp(&b.0));
        tested += segs.len();
        let hit = segs.par_iter().any(|(s, p, q)| {
            region_list.iter().any(|(key, (a, n))| key != s && segment_hits_region(plane, win, key, a, n, p, q))
        });
        if hit {
            return (true, tested);
        }
    }
    (false, tested)
}

fn segment_hits_region(
    plane: &PleatedPlane,
    win: &Window,
    key: &[usize],
    a: &Matrix4<f64>,
    n: &Vector4<f64>,
    p: &Vector4<f64>,
    q: &Vector4<f64>,
) -> bool {
    let (fp, fq) = (minkowski4(p, n), minkowski4(q, n));
    if fp * fq >= 0.0 || fp.abs() < 1e-12 || fq.abs() < 1e-12 {
        return false;
    }
    let d = -minkowski4(p, q);
    let dist = d.max(1.0).acosh();
    if dist <= 0.0 {
        return false;
    }
    let v = (q - p * d) / dist.sinh();
    let (alpha, beta) = (fp, minkowski4(&v, n));
    if alpha.abs() >= beta.abs() {
        return false;
    }
    let s = (-alpha / beta).atanh();
    let x = p * s.cosh() + v * s.sinh();
    let y = lorentz_inverse(a) * x;
    let y3 = [y[0], y[1], y[3]];
    if !(y3[2] > 0.0) {
        return false;
    }
    if plane.far.iter().any(|f| minkowski(&y3, f).abs() < 1e-9) {
        return false;
    }
    plane.separating(&y3) == key && disk_distance(from_hyperboloid(&y3), win.center) <= win.radius
}

/// Grid spacings of the embeddedness test, coarse to fine.
pub const EMBEDDING_SPACINGS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// `‖λ‖_L` at `L = 2 asinh 1` over the window, and whether the pleated image
/// looked embedded there. The hint is heuristic: a `false` is backed by an
/// explicit crossing, a `true` only by the absence of one at the sampled resolution.
pub fn bending_bound_check(lam: &FiniteLamination, win: &Window, opts: SupOptions) -> Result<BendingCheck> {
    let l = 2.0 * 1f64.asinh();
    let norm = average_bending_norm(lam, l, win, opts)?;
    let plane = PleatedPlane::anchored_near(lam, win.center)?;
    let (hit, segments_tested) = find_self_intersection(&plane, win, &EMBEDDING_SPACINGS);
    Ok(BendingCheck {
        norm,
        embedded_hint: !hit,
        segments_tested,
        finest_spacing: EMBEDDING_SPACINGS[EMBEDDING_SPACINGS.len() - 1],
        heuristic: "sampled self-intersection test; not a proof of embeddedness",
    })
}
