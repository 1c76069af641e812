//! Finite measured laminations of the hyperbolic plane.
//!
//! Points are given in the Poincaré disk and computed with in the hyperboloid
//! model `{X : ⟨X, X⟩ = −1, X₃ > 0}` of `R^{2,1}`, where a geodesic is the
//! zero set of `⟨·, N⟩` for a unit spacelike normal `N`.

pub mod pleated;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use pleated::{bending_bound_check, lipschitz_check, BendingCheck, PleatedPlane};

pub type Vec3 = [f64; 3];

/// `a₁b₁ + a₂b₂ − a₃b₃`.
pub fn minkowski(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

/// Lorentz cross product: `⟨a ×_L b, a⟩ = ⟨a ×_L b, b⟩ = 0`.
pub fn lorentz_cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        -(a[0] * b[1] - a[1] * b[0]),
    ]
}

fn scale(a: &Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Poincaré disk to hyperboloid.
pub fn to_hyperboloid(z: Complex64) -> Vec3 {
    let r2 = z.norm_sqr();
    let k = 1.0 / (1.0 - r2);
    [2.0 * z.re * k, 2.0 * z.im * k, (1.0 + r2) * k]
}

/// Hyperboloid to Poincaré disk.
pub fn from_hyperboloid(p: &Vec3) -> Complex64 {
    Complex64::new(p[0], p[1]) / (1.0 + p[2])
}

/// Ideal point at angle `θ`, as a null vector.
pub fn ideal_point(theta: f64) -> Vec3 {
    [theta.cos(), theta.sin(), 1.0]
}

/// Distance between hyperboloid points, accurate for nearby points.
pub fn hyperboloid_distance(p: &Vec3, q: &Vec3) -> f64 {
    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    let m = minkowski(&d, &d).max(0.0);
    2.0 * (m.sqrt() / 2.0).asinh()
}

pub fn disk_distance(a: Complex64, b: Complex64) -> f64 {
    hyperboloid_distance(&to_hyperboloid(a), &to_hyperboloid(b))
}

/// Boost taking the origin to `p` with no rotation.
fn boost(p: &Vec3) -> [[f64; 3]; 3] {
    let g = p[2];
    let k = 1.0 / (1.0 + g);
    [
        [1.0 + p[0] * p[0] * k, p[0] * p[1] * k, p[0]],
        [p[0] * p[1] * k, 1.0 + p[1] * p[1] * k, p[1]],
        [p[0], p[1], g],
    ]
}

fn apply(m: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// The point at hyperbolic distance `r` from `center` in direction `phi`.
pub fn exp_at(center: Complex64, r: f64, phi: f64) -> Complex64 {
    let v = [r.sinh() * phi.cos(), r.sinh() * phi.sin(), r.cosh()];
    from_hyperboloid(&apply(&boost(&to_hyperboloid(center)), &v))
}

/// A leaf: the geodesic between boundary angles `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub a: f64,
    pub b: f64,
}

impl Leaf {
    /// Unit normal `N ∝ u ×_L v`; the leaf is `{⟨X, N⟩ = 0}`.
    pub fn normal(&self) -> Vec3 {
        let n = lorentz_cross(&ideal_point(self.a), &ideal_point(self.b));
        scale(&n, 1.0 / minkowski(&n, &n).sqrt())
    }

    /// The leaf orthogonal to the real diameter at signed distance `d` from 0.
    pub fn perpendicular_to_axis(d: f64) -> Self {
        let a = d.tanh().acos();
        Self { a: wrap(-a), b: a }
    }
}

fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

fn angle_close(a: f64, b: f64) -> bool {
    let d = (wrap(a) - wrap(b)).abs();
    d.min(2.0 * PI - d) < 1e-12
}

/// Whether `x` lies strictly inside the counter-clockwise arc from `a` to `b`.
fn strictly_between(a: f64, b: f64, x: f64) -> bool {
    let span = wrap(b - a);
    let off = wrap(x - a);
    off > 1e-12 && off < span - 1e-12
}

fn linked(l1: &Leaf, l2: &Leaf) -> bool {
    strictly_between(l1.a, l1.b, l2.a) != strictly_between(l1.a, l1.b, l2.b)
        && !angle_close(l2.a, l1.a)
        && !angle_close(l2.a, l1.b)
        && !angle_close(l2.b, l1.a)
        && !angle_close(l2.b, l1.b)
}

/// Disjoint weighted leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLamination {
    leaves: Vec<Leaf>,
    weights: Vec<f64>,
    normals: Vec<Vec3>,
}

impl FiniteLamination {
    /// Validates distinct endpoints, positive weights and pairwise disjointness.
    /// Leaves may share one ideal endpoint.
    pub fn new(leaves: Vec<Leaf>, weights: Vec<f64>) -> Result<Self> {
        if leaves.len() != weights.len() {
            return Err(invalid("weights", "one weight per leaf"));
        }
        for (i, (l, &w)) in leaves.iter().zip(&weights).enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(invalid("weights", format!("leaf {i} has weight {w}")));
            }
            if !l.a.is_finite() || !l.b.is_finite() || angle_close(l.a, l.b) {
                return Err(invalid("leaves", format!("leaf {i} has coincident endpoints")));
            }
        }
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                let (p, q) = (&leaves[i], &leaves[j]);
                let same = (angle_close(p.a, q.a) && angle_close(p.b, q.b))
                    || (angle_close(p.a, q.b) && angle_close(p.b, q.a));
                if same || linked(p, q) {
                    return Err(Error::LeavesIntersect(i, j));
                }
            }
        }
        let normals = leaves.iter().map(Leaf::normal).collect();
        Ok(Self { leaves, weights, normals })
    }

    pub fn empty() -> Self {
        Self { leaves: vec![], weights: vec![], normals: vec![] }
    }

    pub fn single(leaf: Leaf, weight: f64) -> Result<Self> {
        Self::new(vec![leaf], vec![weight])
    }

    /// `count` leaves perpendicular to the real diameter, `spacing` apart and
    /// centred on the origin.
    pub fn fence(count: usize, spacing: f64, weight: f64) -> Result<Self> {
        let mid = (count as f64 - 1.0) / 2.0;
        let leaves = (0..count).map(|k| Leaf::perpendicular_to_axis((k as f64 - mid) * spacing)).collect();
        Self::new(leaves, vec![weight; count])
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.leaves.clone(), weights)
    }

    pub fn map(&self, g: &DiskMobius) -> Result<Self> {
        let leaves = self.leaves.iter().map(|l| Leaf { a: g.apply_angle(l.a), b: g.apply_angle(l.b) }).collect();
        Self::new(leaves, self.weights.clone())
    }

    /// Parses one leaf per line: `θ₁ θ₂ weight 0`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut leaves = vec![];
        let mut weights = vec![];
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
            let nums = nums.map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            if nums.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 numbers, got {}", n + 1, nums.len())));
            }
            if nums[3] != 0.0 {
                return Err(Error::Parse(format!("line {}: reserved field must be 0", n + 1)));
            }
            leaves.push(Leaf { a: nums[0], b: nums[1] });
            weights.push(nums[2]);
        }
        Self::new(leaves, weights)
    }

    pub fn to_text(&self) -> String {
        self.leaves
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| format!("{:.17} {:.17} {:.17} 0\n", l.a, l.b, w))
            .collect()
    }
}

/// Disk automorphism `z ↦ e^{iφ}(z − a)/(1 − āz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskMobius {
    pub a: Complex64,
    pub phase: f64,
}

impl DiskMobius {
    pub fn new(a: Complex64, phase: f64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(invalid("a", "must lie in the open disk"));
        }
        Ok(Self { a, phase })
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.phase) * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    pub fn apply_angle(&self, theta: f64) -> f64 {
        wrap(self.apply(Complex64::from_polar(1.0, theta)).arg())
    }
}

/// Open geodesic arc `s ↦ cosh(s) M + sinh(s) V` for `s ∈ (s0, s1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicArc {
    pub m: Vec3,
    pub v: Vec3,
    pub s0: f64,
    pub s1: f64,
}

impl GeodesicArc {
    /// The arc between two disk points.
    pub fn from_points(p: Complex64, q: Complex64) -> Result<Self> {
        let (a, b) = (to_hyperboloid(p), to_hyperboloid(q));
        let d = hyperboloid_distance(&a, &b);
        if !(d > 0.0) {
            return Err(invalid("arc", "endpoints coincide"));
        }
        // b = cosh d · a + sinh d · v
        let v = scale(&add(&b, &scale(&a, -d.cosh())), 1.0 / d.sinh());
        Ok(Self { m: a, v, s0: 0.0, s1: d })
    }

    /// Arc of the given length starting at `z` in disk direction `phi`.
    pub fn from_point_direction(z: Complex64, phi: f64, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(invalid("length", format!("{length} is not positive")));
        }
        let (m, v) = line_through(z, phi);
        Ok(Self { m, v, s0: 0.0, s1: length })
    }

    pub fn length(&self) -> f64 {
        self.s1 - self.s0
    }

    pub fn point_at(&self, s: f64) -> Vec3 {
        add(&scale(&self.m, s.cosh()), &scale(&self.v, s.sinh()))
    }

    pub fn start(&self) -> Complex64 {
        from_hyperboloid(&self.point_at(self.s0))
    }

    pub fn end(&self) -> Complex64 {
        from_hyperboloid(&self.point_at(self.s1))
    }

    pub fn map(&self, g: &DiskMobius) -> Result<Self> {
        Self::from_points(g.apply(self.start()), g.apply(self.end()))
    }

    /// The sub-arc `(s0 + a, s0 + b)`.
    pub fn sub_arc(&self, a: f64, b: f64) -> Self {
        Self { s0: self.s0 + a, s1: self.s0 + b, ..*self }
    }
}

/// Base point and unit tangent of the geodesic through `z` in disk direction `phi`.
pub fn line_through(z: Complex64, phi: f64) -> (Vec3, Vec3) {
    let b = boost(&to_hyperboloid(z));
    (apply(&b, &[0.0, 0.0, 1.0]), apply(&b, &[phi.cos(), phi.sin(), 0.0]))
}

/// Where a line crosses a leaf.
pub(crate) enum Crossing {
    At(f64),
    None,
    Contained,
}

pub(crate) fn crossing(m: &Vec3, v: &Vec3, n: &Vec3) -> Crossing {
    let a = minkowski(m, n);
    let b = minkowski(v, n);
    if a.abs() < 1e-14 && b.abs() < 1e-14 {
        return Crossing::Contained;
    }
    if a.abs() >= b.abs() {
        return Crossing::None;
    }
    Crossing::At((-a / b).atanh())
}

/// Total weight of leaves crossed by the open arc; leaves through an endpoint
/// do not count.
pub fn transverse_measure(lam: &FiniteLamination, arc: &GeodesicArc) -> Result<f64> {
    let mut total = 0.0;
    for (i, n) in lam.normals.iter().enumerate() {
        match crossing(&arc.m, &arc.v, n) {
            Crossing::Contained => return Err(Error::ArcInsideLeaf(i)),
            Crossing::At(s) if s > arc.s0 && s < arc.s1 => total += lam.weights[i],
            _ => {}
        }
    }
    Ok(total)
}

/// Hyperbolic disk `{d(z, center) ≤ radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Complex64,
    pub radius: f64,
}

impl Window {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !(center.norm() < 1.0) {
            return Err(invalid("window", "needs a center in the disk and positive radius"));
        }
        Ok(Self { center, radius })
    }

    /// Parameter interval of the line `cosh(s) M + sinh(s) V` inside the window.
    fn interval(&self, m: &Vec3, v: &Vec3) -> Option<(f64, f64)> {
        let c = to_hyperboloid(self.center);
        let alpha = -minkowski(m, &c);
        let beta = -minkowski(v, &c);
        let amp = (alpha * alpha - beta * beta).max(0.0).sqrt();
        let k = self.radius.cosh() / amp;
        if k < 1.0 {
            return None;
        }
        let sc = (beta / alpha).atanh();
        let w = k.acosh();
        Some((-sc - w, -sc + w))
    }
}

/// Sampling for the sup over arcs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupOptions {
    pub base_points: usize,
    pub directions: usize,
    pub refine_top: usize,
    pub refine_iterations: usize,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self { base_points: 64, directions: 64, refine_top: 10, refine_iterations: 40 }
    }
}

/// `‖λ‖_L` over arcs meeting a window. The value is attained by an explicit
/// arc, so it is a lower bound for the sup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BendingNormResult {
    pub value: f64,
    pub length: f64,
    pub lines_sampled: usize,
    pub base_points: usize,
    pub directions: usize,
    pub refined_lines: usize,
    /// A maximizing arc: start point and disk direction.
    pub arc_start: Complex64,
    pub arc_direction: f64,
}

/// Best open window of length `L` along one line, and where it starts.
fn line_sup(lam: &FiniteLamination, m: &Vec3, v: &Vec3, l: f64, win: &Window) -> (f64, f64) {
    let Some((s_in, s_out)) = win.interval(m, v) else {
        return (0.0, 0.0);
    };
    let mut pts: Vec<(f64, f64)> = lam
        .normals
        .iter()
        .zip(&lam.weights)
        .filter_map(|(n, &w)| match crossing(m, v, n) {
            Crossing::At(s) if s > s_in - l && s < s_out + l => Some((s, w)),
            _ => None,
        })
        .collect();
    if pts.is_empty() {
        return (0.0, s_in);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (0.0, s_in);
    let mut j = 0;
    let mut sum = 0.0;
    for i in 0..pts.len() {
        if j < i {
            j = i;
            sum = 0.0;
        }
        while j < pts.len() && pts[j].0 - pts[i].0 < l {
            sum += pts[j].1;
            j += 1;
        }
        if sum > best.0 {
            // centre the arc on the group, then slide it into the window
            let lo = (pts[j - 1].0 - l).max(s_in - l);
            let hi = pts[i].0.min(s_out);
            best = (sum, 0.5 * (lo + hi));
        }
        sum -= pts[i].1;
    }
    best
}

/// At least `n` base points of a square grid in geodesic polar coordinates
/// around the window centre.
fn base_grid(win: &Window, n: usize) -> Vec<Complex64> {
    let mut m = ((n as f64).sqrt().ceil() as usize).max(2);
    loop {
        let mut out = vec![];
        for i in 0..m {
            for j in 0..m {
                let u = win.radius * (2.0 * i as f64 / (m - 1) as f64 - 1.0);
                let w = win.radius * (2.0 * j as f64 / (m - 1) as f64 - 1.0);
                let r = (u * u + w * w).sqrt();
                if r <= win.radius {
                    out.push(exp_at(win.center, r, w.atan2(u)));
                }
            }
        }
        if out.len() >= n {
            return out;
        }
        m += 1;
    }
}

/// Sup of `transverse_measure` over open arcs of length `L` meeting the window.
///
/// Every line through a grid of base points and directions is scanned exactly
/// (all placements of the arc along the line), then the best lines are
/// improved by a pattern search over base point and direction.
pub fn average_bending_norm(lam: &FiniteLamination, l: f64, win: &Window, opts: SupOptions) -> Result<BendingNormResult> {
    if !(l > 0.0) {
        return Err(invalid("L", format!("{l} is not positive")));
    }
    let bases = base_grid(win, opts.base_points);
    if bases.is_empty() || opts.directions == 0 {
        return Err(invalid("window", "no sample points"));
    }
    let lines: Vec<(Complex64, f64)> = bases
        .iter()
        .flat_map(|&z| (0..opts.directions).map(move |k| (z, PI * k as f64 / opts.directions as f64)))
        .collect();
    let scored: Vec<(f64, f64)> = lines
        .par_iter()
        .map(|&(z, phi)| {
            let (m, v) = line_through(z, phi);
            line_sup(lam, &m, &v, l, win)
        })
        .collect();
    let mut order: Vec<usize> = (0..lines.len()).collect();
    // larger value first, lower index on ties
    order.sort_by(|&a, &b| scored[b].0.total_cmp(&scored[a].0).then(a.cmp(&b)));

    let dphi = PI / opts.directions as f64;
    let step0 = 2.0 * win.radius / ((opts.base_points as f64).sqrt().max(2.0));
    let refined: Vec<(f64, Complex64, f64, f64)> = order
        .iter()
        .take(opts.refine_top)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&idx| {
            let (z, phi) = lines[idx];
            refine_line(lam, l, win, z, phi, scored[idx], step0, dphi, opts.refine_iterations)
        })
        .collect();
    let mut best = (scored[order[0]].0, lines[order[0]].0, lines[order[0]].1, scored[order[0]].1);
    for r in refined {
        if r.0 > best.0 {
            best = r;
        }
    }
    let (m, v) = line_through(best.1, best.2);
    let start = GeodesicArc { m, v, s0: best.3, s1: best.3 + l }.start();
    Ok(BendingNormResult {
        value: best.0,
        length: l,
        lines_sampled: lines.len(),
        base_points: bases.len(),
        directions: opts.directions,
        refined_lines: opts.refine_top.min(lines.len()),
        arc_start: start,
        arc_direction: direction_at(&GeodesicArc { m, v, s0: best.3, s1: best.3 + l }),
    })
}

/// Disk direction of an arc at its start.
fn direction_at(arc: &GeodesicArc) -> f64 {
    let h = 1e-7 * arc.length();
    let a = from_hyperboloid(&arc.point_at(arc.s0));
    let b = from_hyperboloid(&arc.point_at(arc.s0 + h));
    (b - a).arg()
}

#[allow(clippy::too_many_arguments)]
fn refine_line(
    lam: &FiniteLamination,
    l: f64,
    win: &Window,
    z: Complex64,
    phi: f64,
    start: (f64, f64),
    step0: f64,
    dphi: f64,
    iters: usize,
) -> (f64, Complex64, f64, f64) {
    let mut best = (start.0, z, phi, start.1);
    let (mut step, mut dstep) = (step0, dphi);
    for _ in 0..iters {
        let mut improved = false;
        let cands = [
            (step, 0.0, 0.0),
            (-step, 0.0, 0.0),
            (0.0, step, 0.0),
            (0.0, -step, 0.0),
            (0.0, 0.0, dstep),
            (0.0, 0.0, -dstep),
        ];
        for (dx, dy, dp) in cands {
            let r = (dx * dx + dy * dy).sqrt();
            let zc = if r > 0.0 { exp_at(best.1, r, dy.atan2(dx)) } else { best.1 };
            if disk_distance(zc, win.center) > win.radius {
                continue;
            }
            let pc = best.2 + dp;
            let (m, v) = line_through(zc, pc);
            let (val, s) = line_sup(lam, &m, &v, l, win);
            if val > best.0 {
                best = (val, zc, pc, s);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            dstep *= 0.5;
        }
    }
    best
}
