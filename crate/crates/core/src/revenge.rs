//! The tri-hyperboloid solid
//!
//! ```text
//! x² + y² − z² ≤ 1,   y² + z² − x² ≤ 1,   z² + x² − y² ≤ 1
//! ```
//!
//! and its exact volume. The solid is symmetric under sign flips and the
//! cyclic permutation of coordinates, so it is eight copies of its
//! first-octant part. That part splits into two tetrahedra sharing the face
//! through the unit basis vectors (volumes 1/6 and 1/3) and three congruent
//! curved pieces of volume `log 2 / 3 − 1/6` each, giving `log 2` per octant
//! and `log 256` in total.
//!
//! Any two of the hyperboloids meet in four straight lines; the third one
//! clips them to the twelve edges of a stella octangula with vertices
//! `(±1, ±1, ±1)`. The curved pieces are ruled: from each point of a quarter
//! circle in a coordinate plane a straight segment runs to an edge.

use std::f64::consts::{FRAC_PI_2, LN_2};

use serde::{Deserialize, Serialize};

use crate::cubature::{integrate_1d, integrate_2d_iterated, volume_by_octree, QuadratureResult};
use crate::error::{Error, Result};
use crate::montecarlo::{self, VolumeEstimate};
use crate::quadric::{Aabb, AffineMap, ImplicitSolid, Point3, QuadricForm};

/// Hyperboloid `i` of the three, as the form `p(x,y,z) − 1`. Hyperboloid
/// `i` has its negative square on coordinate `(i + 2) % 3`.
pub fn hyperboloid(i: usize) -> QuadricForm {
    let mut d = [1.0; 3];
    d[(i + 2) % 3] = -1.0;
    QuadricForm::diagonal(d[0], d[1], d[2], -1.0)
}

/// The solid bounded by all three hyperboloids.
pub fn tri_hyperboloid() -> ImplicitSolid {
    ImplicitSolid::from_forms((0..3).map(hyperboloid)).expect("three constraints")
}

/// The tri-hyperboloid restricted to `x, y, z ≥ 0`.
pub fn first_octant_component() -> ImplicitSolid {
    let octant = ImplicitSolid::from_forms((0..3).map(|k| {
        let mut n = [0.0; 3];
        n[k] = -1.0;
        QuadricForm::linear(n, 0.0)
    }))
    .expect("three constraints");
    tri_hyperboloid()
        .intersect(&octant)
        .with_bbox(Aabb::new([0.0; 3], [1.0; 3]).expect("unit box"))
}

/// Straight line `point + t · direction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point3,
    pub direction: Point3,
    /// Endpoints of the part that satisfies the third constraint.
    pub clip_segment: Option<(Point3, Point3)>,
}

impl Line {
    pub fn at(&self, t: f64) -> Point3 {
        [0, 1, 2].map(|k| self.point[k] + t * self.direction[k])
    }
}

/// Two intersection lines lying in the same plane `coordinate = ±1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinePair {
    pub lines: [Line; 2],
}

/// Intersection of hyperboloids `i` and `j`: two pairs of lines, on the
/// planes where the third hyperboloid's negative coordinate equals `+1` and
/// `−1`. Each line is clipped to the part inside the third hyperboloid.
pub fn pairwise_intersection(i: usize, j: usize) -> Result<[LinePair; 2]> {
    if i == j || i > 2 || j > 2 {
        return Err(Error::InvalidArgument(format!(
            "need two distinct hyperboloid indices in 0..3, got ({i}, {j})"
        )));
    }
    let k = 3 - i - j;
    let third = hyperboloid(k);
    let fixed = (k + 2) % 3;
    let (a, b) = ((fixed + 1) % 3, (fixed + 2) % 3);
    let (a, b) = (a.min(b), a.max(b));

    let pair = |sign: f64| {
        let mut point = [0.0; 3];
        point[fixed] = sign;
        let lines = [1.0, -1.0].map(|s| {
            let mut direction = [0.0; 3];
            direction[a] = 1.0;
            direction[b] = s;
            let mut line = Line {
                point,
                direction,
                clip_segment: None,
            };
            line.clip_segment = clip_line(&third, &line);
            line
        });
        LinePair { lines }
    };
    Ok([pair(1.0), pair(-1.0)])
}

/// Segment of `line` where `q ≤ 0`, when that set is a bounded interval.
fn clip_line(q: &QuadricForm, line: &Line) -> Option<(Point3, Point3)> {
    let d = line.direction;
    let m = q.quadratic_part();
    let alpha: f64 = (0..3)
        .flat_map(|r| (0..3).map(move |c| (r, c)))
        .map(|(r, c)| m[r][c] * d[r] * d[c])
        .sum();
    let g = q.gradient(line.point);
    let beta: f64 = (0..3).map(|r| g[r] * d[r]).sum();
    let gamma = q.eval(line.point);
    if alpha <= 0.0 {
        return None;
    }
    let disc = beta * beta - 4.0 * alpha * gamma;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let t0 = (-beta - s) / (2.0 * alpha);
    let t1 = (-beta + s) / (2.0 * alpha);
    Some((line.at(t0), line.at(t1)))
}

/// Volume of the tetrahedron with the given vertices.
pub fn tetra_volume(p0: Point3, p1: Point3, p2: Point3, p3: Point3) -> f64 {
    let e = [p1, p2, p3].map(|p| [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]);
    let det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
        - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
        + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
    det.abs() / 6.0
}

pub const ORIGIN: Point3 = [0.0, 0.0, 0.0];
pub const STAR_VERTEX: Point3 = [1.0, 1.0, 1.0];
pub const BASIS: [Point3; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// The inner tetrahedron: origin and the three unit basis vectors.
pub fn inner_tetra_volume() -> f64 {
    tetra_volume(ORIGIN, BASIS[0], BASIS[1], BASIS[2])
}

/// The outer tetrahedron: `(1,1,1)` and the three unit basis vectors.
pub fn outer_tetra_volume() -> f64 {
    tetra_volume(STAR_VERTEX, BASIS[0], BASIS[1], BASIS[2])
}

/// `x, y, z ≥ 0` and `x + y + z ≤ 1`.
pub fn inner_tetra() -> ImplicitSolid {
    ImplicitSolid::from_forms([
        QuadricForm::linear([-1.0, 0.0, 0.0], 0.0),
        QuadricForm::linear([0.0, -1.0, 0.0], 0.0),
        QuadricForm::linear([0.0, 0.0, -1.0], 0.0),
        QuadricForm::linear([1.0, 1.0, 1.0], -1.0),
    ])
    .expect("four constraints")
}

/// `x + y + z ≥ 1` and `x + y + z − 2·coordinate ≤ 1` for each coordinate.
pub fn outer_tetra() -> ImplicitSolid {
    ImplicitSolid::from_forms([
        QuadricForm::linear([-1.0, -1.0, -1.0], 1.0),
        QuadricForm::linear([-1.0, 1.0, 1.0], -1.0),
        QuadricForm::linear([1.0, -1.0, 1.0], -1.0),
        QuadricForm::linear([1.0, 1.0, -1.0], -1.0),
    ])
    .expect("four constraints")
}

/// The three congruent curved pieces of the first octant. `S2` sits on the
/// face `x − y + z = 1` under the hyperboloid `z² + x² − y² = 1`; `S3` and
/// `S1` are its images under `(x, y, z) ↦ (y, z, x)` applied once and twice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvedPiece {
    S1,
    S2,
    S3,
}

impl CurvedPiece {
    pub const ALL: [CurvedPiece; 3] = [CurvedPiece::S1, CurvedPiece::S2, CurvedPiece::S3];

    /// Number of cyclic rotations taking `S2` onto this piece.
    pub fn rotations(&self) -> usize {
        match self {
            CurvedPiece::S2 => 0,
            CurvedPiece::S3 => 1,
            CurvedPiece::S1 => 2,
        }
    }
}

/// Applies `(x, y, z) ↦ (y, z, x)` `times` times.
pub fn rotate(p: Point3, times: usize) -> Point3 {
    (0..times % 3).fold(p, |[x, y, z], _| [y, z, x])
}

/// `0 ≤ y ≤ x ≤ 1`, `1 − x + y ≤ z`, `z² + x² − y² ≤ 1`.
pub fn curved_piece(piece: CurvedPiece) -> ImplicitSolid {
    let s2 = ImplicitSolid::from_forms([
        QuadricForm::linear([0.0, -1.0, 0.0], 0.0),
        QuadricForm::linear([-1.0, 1.0, 0.0], 0.0),
        QuadricForm::linear([1.0, 0.0, 0.0], -1.0),
        QuadricForm::linear([-1.0, 1.0, -1.0], 1.0),
        hyperboloid(2),
    ])
    .expect("five constraints")
    .with_bbox(Aabb::new([0.0; 3], [1.0; 3]).expect("unit box"));
    (0..piece.rotations()).fold(s2, |s, _| s.transform(&AffineMap::cyclic()))
}

/// `log 2 / 3 + 1/6`: the integral of `√(1 + y² − x²)` over `0 ≤ y ≤ x ≤ 1`.
pub fn roof_integral_closed_form() -> f64 {
    LN_2 / 3.0 + 1.0 / 6.0
}

/// `1/3`: the integral of the planar floor `1 − x + y` over the same triangle.
pub fn floor_integral_closed_form() -> f64 {
    1.0 / 3.0
}

/// Volume of one curved piece, `log 2 / 3 − 1/6`.
pub fn curved_piece_closed_form() -> f64 {
    LN_2 / 3.0 - 1.0 / 6.0
}

fn over_triangle<F: Fn(f64, f64) -> f64>(f: F, tol: f64) -> Result<QuadratureResult> {
    integrate_2d_iterated(f, (0.0, 1.0), |y| y, |_| 1.0, tol)
}

fn roof(x: f64, y: f64) -> f64 {
    (1.0 + y * y - x * x).max(0.0).sqrt()
}

fn floor(x: f64, y: f64) -> f64 {
    1.0 - x + y
}

pub fn roof_integral_quadrature(tol: f64) -> Result<QuadratureResult> {
    over_triangle(roof, tol)
}

pub fn floor_integral_quadrature(tol: f64) -> Result<QuadratureResult> {
    over_triangle(floor, tol)
}

/// Volume of a curved piece as the iterated integral of roof minus floor.
pub fn curved_piece_quadrature(tol: f64) -> Result<QuadratureResult> {
    over_triangle(|x, y| roof(x, y) - floor(x, y), tol)
}

/// `½ {(z² + 1)(π/2 − 2 arctan z) + z² − 1}`.
pub fn li_integrand(z: f64) -> f64 {
    0.5 * ((z * z + 1.0) * (FRAC_PI_2 - 2.0 * z.atan()) + z * z - 1.0)
}

/// `∫₀¹` of [`li_integrand`], which equals the curved-piece volume.
pub fn li_integral(tol: f64) -> Result<QuadratureResult> {
    integrate_1d(li_integrand, 0.0, 1.0, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RulingFamily {
    /// From `(sin θ, 0, cos θ)` to `(1, u, u)`.
    Theta,
    /// From `(cos φ, 0, sin φ)` to `(u, u, 1)`.
    Phi,
}

/// A straight segment on `z² + x² − y² = 1` from the unit quarter circle in
/// the `xz`-plane to an edge of the outer tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulingSegment {
    pub family: RulingFamily,
    /// Angle in `[0, π/2]`.
    pub parameter: f64,
    pub start: Point3,
    pub end: Point3,
}

/// `sec a − tan a`, evaluated as `cos a / (1 + sin a)` so it stays accurate
/// up to `a = π/2`.
pub fn ruling_length(angle: f64) -> f64 {
    angle.cos() / (1.0 + angle.sin())
}

impl RulingSegment {
    pub fn new(family: RulingFamily, angle: f64) -> Self {
        let u = ruling_length(angle);
        let mut seg = Self {
            family,
            parameter: angle,
            start: [0.0; 3],
            end: [0.0; 3],
        };
        seg.start = seg.at(0.0);
        seg.end = match family {
            RulingFamily::Theta => [1.0, u, u],
            RulingFamily::Phi => [u, u, 1.0],
        };
        seg
    }

    /// Point at ruling parameter `t ∈ [0, sec a − tan a]`. The second
    /// coordinate grows with `t`, which keeps the point on the hyperboloid.
    pub fn at(&self, t: f64) -> Point3 {
        let (s, c) = self.parameter.sin_cos();
        match self.family {
            RulingFamily::Theta => [s + t * c, t, c - t * s],
            RulingFamily::Phi => [c - t * s, t, s + t * c],
        }
    }

    /// Point at fraction `f ∈ [0, 1]` of the segment.
    pub fn at_fraction(&self, f: f64) -> Point3 {
        if f == 1.0 {
            return self.end;
        }
        self.at(f * ruling_length(self.parameter))
    }
}

/// `count` rulings at angles `k · (π/2) / (count + 1)`, `k = 1..=count`.
pub fn rulings(family: RulingFamily, count: usize) -> Vec<RulingSegment> {
    let step = FRAC_PI_2 / (count + 1) as f64;
    (1..=count)
        .map(|k| RulingSegment::new(family, k as f64 * step))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CrossCheck {
    pub fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            abs_diff,
            tolerance,
            pass: abs_diff <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub vol_pi1: f64,
    pub vol_pi2: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "V1")]
    pub v1: f64,
    pub total: f64,
    pub i_quadrature: QuadratureResult,
    pub i1_quadrature: QuadratureResult,
    pub i2_quadrature: QuadratureResult,
    pub li: QuadratureResult,
    pub monte_carlo: Option<VolumeEstimate>,
    pub octree: Option<QuadratureResult>,
    pub cross_checks: Vec<CrossCheck>,
    /// False when any numerical sub-result failed to converge.
    pub converged: bool,
}

impl DecompositionReport {
    pub fn all_checks_pass(&self) -> bool {
        self.converged && self.cross_checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub tol: f64,
    /// Monte Carlo sample count; 0 skips the sampling cross-check.
    pub mc_samples: u64,
    pub seed: u64,
    /// Octree tolerance; `None` skips the cubature cross-check.
    pub octree_tol: Option<f64>,
    pub octree_max_depth: u32,
}

impl ReportConfig {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            mc_samples: 1_000_000,
            seed: 42,
            octree_tol: Some(5e-3),
            octree_max_depth: 10,
        }
    }
}

/// Assembles the exact decomposition with the quadrature, Li-integral,
/// Monte Carlo and octree cross-checks.
pub fn full_report(tol: f64) -> Result<DecompositionReport> {
    full_report_with(&ReportConfig::new(tol))
}

pub fn full_report_with(cfg: &ReportConfig) -> Result<DecompositionReport> {
    let tol = cfg.tol;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let vol_pi1 = inner_tetra_volume();
    let vol_pi2 = outer_tetra_volume();
    let i = curved_piece_closed_form();
    let i1 = roof_integral_closed_form();
    let i2 = floor_integral_closed_form();
    let v1 = 3.0 * i + vol_pi1 + vol_pi2;
    let total = 8.0 * v1;

    let i_quadrature = curved_piece_quadrature(tol)?;
    let i1_quadrature = roof_integral_quadrature(tol)?;
    let i2_quadrature = floor_integral_quadrature(tol)?;
    let li = li_integral(tol.min(1e-10))?;

    let solid = tri_hyperboloid();
    let cube = Aabb::cube(1.0);
    let monte_carlo = match cfg.mc_samples {
        0 => None,
        n => Some(montecarlo::estimate(&solid, &cube, n, cfg.seed)?),
    };
    let octree = cfg
        .octree_tol
        .map(|t| volume_by_octree(&solid, &cube, t, cfg.octree_max_depth))
        .transpose()?;

    let mut cross_checks = vec![
        CrossCheck::new("tetra_total", vol_pi1 + vol_pi2, 0.5, 1e-15),
        CrossCheck::new("v1_equals_log2", v1, LN_2, 1e-12),
        CrossCheck::new("total_equals_log256", total, 256f64.ln(), 1e-12),
        CrossCheck::new("identity_chain", 8.0 * (3.0 * i + 0.5), 8.0 * LN_2, 1e-12),
        CrossCheck::new("quadrature_vs_closed", i_quadrature.value, i, tol),
        CrossCheck::new("i1_quadrature_vs_closed", i1_quadrature.value, i1, tol),
        CrossCheck::new("i2_quadrature_vs_closed", i2_quadrature.value, i2, tol),
        CrossCheck::new("li_equals_I", li.value, i, 1e-9),
    ];
    if let Some(mc) = &monte_carlo {
        cross_checks.push(CrossCheck::new("mc_4sigma", mc.value, total, 4.0 * mc.stderr));
    }
    if let Some(o) = &octree {
        cross_checks.push(CrossCheck::new("octree_vs_closed", o.value, total, o.abs_error_bound));
    }

    let converged = i_quadrature.converged
        && i1_quadrature.converged
        && i2_quadrature.converged
        && li.converged
        && octree.map_or(true, |o| o.converged);

    Ok(DecompositionReport {
        vol_pi1,
        vol_pi2,
        i,
        i1,
        i2,
        v1,
        total,
        i_quadrature,
        i1_quadrature,
        i2_quadrature,
        li,
        monte_carlo,
        octree,
        cross_checks,
        converged,
    })
}
