//! Quadric half-spaces in homogeneous form and solids built from them.
//!
//! A quadric is stored as a symmetric 4×4 matrix `M` so that
//! `p(x, y, z) = ṽᵀ M ṽ` with `ṽ = (x, y, z, 1)`. Affine maps then act on
//! every constraint through a single congruence `Gᵀ M G`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];
pub type Matrix3 = [[f64; 3]; 3];
pub type Matrix4 = [[f64; 4]; 4];

/// Axis-aligned box. `lo[i] <= hi[i]` on every axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Point3,
    pub hi: Point3,
}

impl Aabb {
    pub fn new(lo: Point3, hi: Point3) -> Result<Self> {
        for axis in 0..3 {
            if !lo[axis].is_finite() || !hi[axis].is_finite() {
                return Err(Error::InvalidBox(format!("non-finite bound on axis {axis}")));
            }
            if lo[axis] > hi[axis] {
                return Err(Error::InvalidBox(format!(
                    "lo > hi on axis {axis} ({} > {})",
                    lo[axis], hi[axis]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[-half, half]³`.
    pub fn cube(half: f64) -> Self {
        Self {
            lo: [-half; 3],
            hi: [half; 3],
        }
    }

    /// True when every axis has positive extent.
    pub fn is_solid(&self) -> bool {
        (0..3).all(|i| self.lo[i] < self.hi[i])
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.hi[i] - self.lo[i]).product()
    }

    pub fn center(&self) -> Point3 {
        [0, 1, 2].map(|i| 0.5 * (self.lo[i] + self.hi[i]))
    }

    pub fn half_widths(&self) -> Point3 {
        [0, 1, 2].map(|i| 0.5 * (self.hi[i] - self.lo[i]))
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }

    pub fn corners(&self) -> [Point3; 8] {
        std::array::from_fn(|k| {
            [0, 1, 2].map(|i| if k >> i & 1 == 0 { self.lo[i] } else { self.hi[i] })
        })
    }

    /// Child `k` (0..8) of an octree split at the center; bit `i` of `k`
    /// selects the upper half along axis `i`.
    pub fn octant(&self, k: usize) -> Self {
        let c = self.center();
        let mut lo = self.lo;
        let mut hi = self.hi;
        for i in 0..3 {
            if k >> i & 1 == 0 {
                hi[i] = c[i];
            } else {
                lo[i] = c[i];
            }
        }
        Self { lo, hi }
    }

    /// Smallest box holding all the points. `None` for an empty iterator.
    pub fn enclosing<I: IntoIterator<Item = Point3>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (lo, hi) = it.fold((first, first), |(mut lo, mut hi), p| {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
            (lo, hi)
        });
        Some(Self { lo, hi })
    }

    /// Point at fractional coordinates `u ∈ [0,1]³`.
    #[inline]
    pub fn lerp(&self, u: Point3) -> Point3 {
        [0, 1, 2].map(|i| self.lo[i] + (self.hi[i] - self.lo[i]) * u[i])
    }
}

/// Coefficients of a polynomial of total degree at most two in `x, y, z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub c: f64,
}

impl Polynomial {
    /// Coefficients in canonical order with their monomial names.
    pub fn terms(&self) -> [(&'static str, f64); 10] {
        [
            ("x^2", self.xx),
            ("y^2", self.yy),
            ("z^2", self.zz),
            ("x*y", self.xy),
            ("x*z", self.xz),
            ("y*z", self.yz),
            ("x", self.x),
            ("y", self.y),
            ("z", self.z),
            ("", self.c),
        ]
    }
}

impl std::ops::Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, o: Polynomial) -> Polynomial {
        Polynomial {
            xx: self.xx - o.xx,
            yy: self.yy - o.yy,
            zz: self.zz - o.zz,
            xy: self.xy - o.xy,
            xz: self.xz - o.xz,
            yz: self.yz - o.yz,
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
            c: self.c - o.c,
        }
    }
}

/// Symmetric homogeneous matrix of a quadratic polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadricForm {
    m: Matrix4,
}

impl QuadricForm {
    /// Builds a form from any 4×4 matrix, symmetrizing it.
    pub fn from_matrix(m: Matrix4) -> Self {
        let mut s = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                s[i][j] = 0.5 * (m[i][j] + m[j][i]);
            }
        }
        Self { m: s }
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        let m = [
            [p.xx, 0.5 * p.xy, 0.5 * p.xz, 0.5 * p.x],
            [0.5 * p.xy, p.yy, 0.5 * p.yz, 0.5 * p.y],
            [0.5 * p.xz, 0.5 * p.yz, p.zz, 0.5 * p.z],
            [0.5 * p.x, 0.5 * p.y, 0.5 * p.z, p.c],
        ];
        Self { m }
    }

    /// Diagonal quadric `a x² + b y² + c z² + d`.
    pub fn diagonal(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::from_polynomial(&Polynomial {
            xx: a,
            yy: b,
            zz: c,
            c: d,
            ..Default::default()
        })
    }

    /// Affine form `n·p + d`.
    pub fn linear(n: Point3, d: f64) -> Self {
        Self::from_polynomial(&Polynomial {
            x: n[0],
            y: n[1],
            z: n[2],
            c: d,
            ..Default::default()
        })
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.m
    }

    pub fn polynomial(&self) -> Polynomial {
        let m = &self.m;
        Polynomial {
            xx: m[0][0],
            yy: m[1][1],
            zz: m[2][2],
            xy: 2.0 * m[0][1],
            xz: 2.0 * m[0][2],
            yz: 2.0 * m[1][2],
            x: 2.0 * m[0][3],
            y: 2.0 * m[1][3],
            z: 2.0 * m[2][3],
            c: m[3][3],
        }
    }

    pub fn constant(&self) -> f64 {
        self.m[3][3]
    }

    /// The 3×3 block of second-order coefficients.
    pub fn quadratic_part(&self) -> Matrix3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j]))
    }

    /// Half the linear coefficients, `b` in `pᵀAp + 2bᵀp + e`.
    pub fn half_linear(&self) -> Point3 {
        [self.m[0][3], self.m[1][3], self.m[2][3]]
    }

    #[inline]
    pub fn eval(&self, p: Point3) -> f64 {
        let m = &self.m;
        let [x, y, z] = p;
        m[0][0] * x * x
            + m[1][1] * y * y
            + m[2][2] * z * z
            + 2.0 * (m[0][1] * x * y + m[0][2] * x * z + m[1][2] * y * z)
            + 2.0 * (m[0][3] * x + m[1][3] * y + m[2][3] * z)
            + m[3][3]
    }

    pub fn gradient(&self, p: Point3) -> Point3 {
        let m = &self.m;
        [0, 1, 2].map(|i| 2.0 * (m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3]))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: self.m.map(|row| row.map(|v| v * s)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j] + other.m[i][j])),
        }
    }

    /// Range of `dᵀ A d` for `|dᵢ| ≤ rᵢ`, bounding every monomial separately.
    pub fn quadratic_range(&self, r: Point3) -> (f64, f64) {
        let m = &self.m;
        let mut lo = 0.0;
        let mut hi = 0.0;
        for i in 0..3 {
            let t = m[i][i] * r[i] * r[i];
            if t < 0.0 {
                lo += t;
            } else {
                hi += t;
            }
            for j in i + 1..3 {
                let t = 2.0 * m[i][j].abs() * r[i] * r[j];
                lo -= t;
                hi += t;
            }
        }
        (lo, hi)
    }

    /// Interval enclosure of the form over a box, expanded about its center.
    pub fn range_over(&self, cell: &Aabb) -> (f64, f64) {
        let c = cell.center();
        let r = cell.half_widths();
        let v = self.eval(c);
        let g = self.gradient(c);
        let lin: f64 = (0..3).map(|i| g[i].abs() * r[i]).sum();
        let (qlo, qhi) = self.quadratic_range(r);
        (v - lin + qlo, v + lin + qhi)
    }

    /// Congruence `Gᵀ M G`.
    fn congruence(&self, g: &Matrix4) -> Self {
        let mut mg = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                mg[i][j] = (0..4).map(|k| self.m[i][k] * g[k][j]).sum();
            }
        }
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| g[k][i] * mg[k][j]).sum();
            }
        }
        Self::from_matrix(out)
    }

    /// Form whose zero set is the image of this one under `map`.
    pub fn transformed(&self, map: &AffineMap) -> Self {
        self.congruence(&map.inverse().homogeneous())
    }
}

/// Closed constraint `q(p) ≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub form: QuadricForm,
}

impl HalfSpace {
    pub fn new(form: QuadricForm) -> Self {
        Self { form }
    }

    #[inline]
    pub fn contains(&self, p: Point3) -> bool {
        self.form.eval(p) <= 0.0
    }
}

impl From<QuadricForm> for HalfSpace {
    fn from(form: QuadricForm) -> Self {
        Self { form }
    }
}

/// Intersection of finitely many quadric half-spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicitSolid {
    constraints: Vec<HalfSpace>,
    bbox: Option<Aabb>,
}

impl ImplicitSolid {
    pub fn new(constraints: Vec<HalfSpace>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::NoConstraints);
        }
        Ok(Self {
            constraints,
            bbox: None,
        })
    }

    pub fn from_forms<I: IntoIterator<Item = QuadricForm>>(forms: I) -> Result<Self> {
        Self::new(forms.into_iter().map(HalfSpace::new).collect())
    }

    /// Attaches a box the caller vouches for.
    pub fn with_bbox(mut self, bbox: Aabb) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn constraints(&self) -> &[HalfSpace] {
        &self.constraints
    }

    pub fn bbox(&self) -> Option<Aabb> {
        self.bbox
    }

    /// Attached box if any, otherwise a certified one.
    pub fn enclosure(&self) -> Option<Aabb> {
        self.bbox.or_else(|| self.certified_bbox())
    }

    #[inline]
    pub fn contains(&self, p: Point3) -> bool {
        self.constraints.iter().all(|h| h.contains(p))
    }

    /// Solid satisfying the constraints of both operands.
    pub fn intersect(&self, other: &ImplicitSolid) -> ImplicitSolid {
        let mut constraints = self.constraints.clone();
        constraints.extend_from_slice(&other.constraints);
        let bbox = match (self.bbox, other.bbox) {
            (Some(a), Some(b)) => {
                let lo = [0, 1, 2].map(|i| a.lo[i].max(b.lo[i]));
                let hi = [0, 1, 2].map(|i| a.hi[i].min(b.hi[i]));
                Aabb::new(lo, hi).ok()
            }
            (a, b) => a.or(b),
        };
        ImplicitSolid { constraints, bbox }
    }

    /// Image of the solid under `map`: `result.contains(map(p)) == self.contains(p)`.
    pub fn transform(&self, map: &AffineMap) -> ImplicitSolid {
        let inv = map.inverse().homogeneous();
        let constraints = self
            .constraints
            .iter()
            .map(|h| HalfSpace::new(h.form.congruence(&inv)))
            .collect();
        let bbox = self
            .bbox
            .and_then(|b| Aabb::enclosing(b.corners().map(|c| map.apply(c))));
        ImplicitSolid { constraints, bbox }
    }

    /// Box proven to contain the solid, derived from single constraints and
    /// nonnegative pairwise combinations of them. Sound but incomplete:
    /// `None` means boundedness could not be shown (or the solid was shown
    /// to be empty).
    pub fn certified_bbox(&self) -> Option<Aabb> {
        let forms: Vec<QuadricForm> = self.constraints.iter().map(|h| h.form).collect();
        let mut candidates = forms.clone();
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                let (a, b) = (&forms[i], &forms[j]);
                candidates.push(a.add(b));
                for m in 0..3 {
                    let (da, db) = (a.m[m][m], b.m[m][m]);
                    if da < 0.0 && db > 0.0 {
                        candidates.push(a.add(&b.scaled(-da / db)));
                    } else if db < 0.0 && da > 0.0 {
                        candidates.push(b.add(&a.scaled(-db / da)));
                    }
                }
            }
        }

        let mut lo = [f64::NEG_INFINITY; 3];
        let mut hi = [f64::INFINITY; 3];
        for q in &candidates {
            for k in 0..3 {
                match axis_bound(q, k) {
                    Some(AxisBound::Interval(a, b)) => {
                        lo[k] = lo[k].max(a);
                        hi[k] = hi[k].min(b);
                    }
                    Some(AxisBound::Empty) => return None,
                    None => {}
                }
            }
        }
        Aabb::new(lo, hi).ok()
    }
}

enum AxisBound {
    Interval(f64, f64),
    Empty,
}

/// Projection of `{q ≤ 0}` onto axis `k`, obtained by minimizing `q` over the
/// other coordinates in closed form (Schur complement). Requires the block of
/// the other involved coordinates to be positive definite.
fn axis_bound(q: &QuadricForm, k: usize) -> Option<AxisBound> {
    let m = &q.m;
    let others: Vec<usize> = (0..3)
        .filter(|&j| j != k)
        .filter(|&j| (0..4).any(|l| m[j][l] != 0.0))
        .collect();

    // a = cross terms with x_k, b = half-linear terms; Schur-complement them out.
    let (c2, c1, c0) = match others.as_slice() {
        [] => (m[k][k], m[k][3], m[3][3]),
        &[j] => {
            let d = m[j][j];
            if d <= 0.0 {
                return None;
            }
            (
                m[k][k] - m[j][k] * m[j][k] / d,
                m[k][3] - m[j][k] * m[j][3] / d,
                m[3][3] - m[j][3] * m[j][3] / d,
            )
        }
        &[i, j] => {
            let (a, b, d) = (m[i][i], m[i][j], m[j][j]);
            let det = a * d - b * b;
            if a <= 0.0 || det <= 0.0 {
                return None;
            }
            // inverse of [[a, b], [b, d]]
            let inv = [[d / det, -b / det], [-b / det, a / det]];
            let quad = |u: [f64; 2], v: [f64; 2]| {
                u[0] * (inv[0][0] * v[0] + inv[0][1] * v[1])
                    + u[1] * (inv[1][0] * v[0] + inv[1][1] * v[1])
            };
            let cross = [m[i][k], m[j][k]];
            let lin = [m[i][3], m[j][3]];
            (
                m[k][k] - quad(cross, cross),
                m[k][3] - quad(cross, lin),
                m[3][3] - quad(lin, lin),
            )
        }
        _ => unreachable!(),
    };
    if c2 <= 0.0 || !c2.is_finite() {
        return None;
    }
    // c2 t² + 2 c1 t + c0 ≤ 0
    let disc = c1 * c1 - c2 * c0;
    if disc < 0.0 {
        return Some(AxisBound::Empty);
    }
    let s = disc.sqrt();
    Some(AxisBound::Interval((-c1 - s) / c2, (-c1 + s) / c2))
}

/// Invertible affine map `p ↦ A p + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    a: Matrix3,
    b: Point3,
    det: f64,
}

fn det3(a: &Matrix3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

impl AffineMap {
    pub fn new(a: Matrix3, b: Point3) -> Result<Self> {
        let det = det3(&a);
        let scale = a.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
        if !det.is_finite() || det == 0.0 || det.abs() <= 1e-14 * scale.powi(3) {
            return Err(Error::SingularMap(det));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite translation".into()));
        }
        Ok(Self { a, b, det })
    }

    pub fn identity() -> Self {
        Self {
            a: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            b: [0.0; 3],
            det: 1.0,
        }
    }

    pub fn linear(a: Matrix3) -> Result<Self> {
        Self::new(a, [0.0; 3])
    }

    pub fn scale(s: Point3) -> Result<Self> {
        Self::linear([[s[0], 0.0, 0.0], [0.0, s[1], 0.0], [0.0, 0.0, s[2]]])
    }

    pub fn translation(t: Point3) -> Self {
        Self {
            b: t,
            ..Self::identity()
        }
    }

    /// The cyclic coordinate permutation `(x, y, z) ↦ (y, z, x)`.
    pub fn cyclic() -> Self {
        Self {
            a: [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
            b: [0.0; 3],
            det: 1.0,
        }
    }

    pub fn matrix(&self) -> &Matrix3 {
        &self.a
    }

    pub fn offset(&self) -> Point3 {
        self.b
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    #[inline]
    pub fn apply(&self, p: Point3) -> Point3 {
        let a = &self.a;
        [0, 1, 2].map(|i| a[i][0] * p[0] + a[i][1] * p[1] + a[i][2] * p[2] + self.b[i])
    }

    pub fn inverse(&self) -> AffineMap {
        let a = &self.a;
        let d = self.det;
        let inv: Matrix3 = [
            [
                (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d,
                (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / d,
                (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d,
            ],
            [
                (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / d,
                (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d,
                (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / d,
            ],
            [
                (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d,
                (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / d,
                (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d,
            ],
        ];
        let b = [0, 1, 2].map(|i| -(0..3).map(|j| inv[i][j] * self.b[j]).sum::<f64>());
        AffineMap {
            a: inv,
            b,
            det: 1.0 / d,
        }
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let a: Matrix3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| self.a[i][k] * inner.a[k][j]).sum())
        });
        let b = self.apply(inner.b);
        AffineMap {
            a,
            b,
            det: self.det * inner.det,
        }
    }

    pub fn homogeneous(&self) -> Matrix4 {
        let mut h = [[0.0; 4]; 4];
        for i in 0..3 {
            h[i][..3].copy_from_slice(&self.a[i]);
            h[i][3] = self.b[i];
        }
        h[3][3] = 1.0;
        h
    }
}
