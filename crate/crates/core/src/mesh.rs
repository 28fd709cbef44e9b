//! Wireframe and surface-patch geometry of the tri-hyperboloid boundary,
//! written as Wavefront OBJ.

use std::collections::{HashMap, HashSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::quadric::Point3;
use crate::revenge::{rotate, rulings, CurvedPiece, RulingFamily, RulingSegment};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WireMesh {
    pub vertices: Vec<Point3>,
    /// Vertex index pairs, 0-based.
    pub segments: Vec<[usize; 2]>,
    /// Vertex index triples, 0-based.
    pub faces: Vec<[usize; 3]>,
}

impl WireMesh {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.segments.is_empty() && self.faces.is_empty()
    }

    pub fn surface_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                let u = [0, 1, 2].map(|k| q[k] - p[k]);
                let v = [0, 1, 2].map(|k| r[k] - p[k]);
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
            })
            .sum()
    }

    /// Appends `other`, shifting its indices.
    pub fn append(&mut self, other: &WireMesh) {
        let base = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.segments.extend(other.segments.iter().map(|s| s.map(|i| i + base)));
        self.faces.extend(other.faces.iter().map(|f| f.map(|i| i + base)));
    }
}

/// Deduplicates vertices by bit pattern (with `-0` folded into `0`) and
/// segments by endpoint pair.
#[derive(Default)]
struct Builder {
    mesh: WireMesh,
    index: HashMap<[u64; 3], usize>,
    seen: HashSet<[usize; 2]>,
}

impl Builder {
    fn vertex(&mut self, p: Point3) -> usize {
        let p = p.map(|c| c + 0.0);
        let key = p.map(f64::to_bits);
        *self.index.entry(key).or_insert_with(|| {
            self.mesh.vertices.push(p);
            self.mesh.vertices.len() - 1
        })
    }

    fn segment(&mut self, a: Point3, b: Point3) {
        let (i, j) = (self.vertex(a), self.vertex(b));
        if i != j && self.seen.insert([i.min(j), i.max(j)]) {
            self.mesh.segments.push([i, j]);
        }
    }
}

/// The 24 maps generated by sign flips and the cyclic rotation, applied to `p`.
pub fn symmetry_orbit(p: Point3) -> [Point3; 24] {
    let mut out = [[0.0; 3]; 24];
    for r in 0..3 {
        let q = rotate(p, r);
        for signs in 0..8 {
            out[8 * r + signs] = [0, 1, 2].map(|k| if signs >> k & 1 == 1 { -q[k] } else { q[k] });
        }
    }
    out
}

fn corner(bits: usize) -> Point3 {
    [0, 1, 2].map(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 })
}

/// Stella octangula edges, boundary quarter circles, and `2 k` rulings on
/// each of the 24 curved pieces.
///
/// With `k = 0` only the 12 star edges are emitted. Otherwise each quarter
/// circle is split into `k + 1` arcs at the rulings' foot points.
pub fn build_wireframe(rulings_per_family: usize) -> WireMesh {
    let mut b = Builder::default();

    for i in 0..8usize {
        for j in i + 1..8 {
            if (i.count_ones() + j.count_ones()) % 2 == 0 {
                b.segment(corner(i), corner(j));
            }
        }
    }
    if rulings_per_family == 0 {
        return b.mesh;
    }

    // first-octant arcs and rulings of S2; the quarter circle lies in y = 0
    let k = rulings_per_family;
    let step = FRAC_PI_2 / (k + 1) as f64;
    let arc: Vec<Point3> = (0..=k + 1)
        .map(|j| match j {
            0 => [0.0, 0.0, 1.0],
            j if j == k + 1 => [1.0, 0.0, 0.0],
            j => RulingSegment::new(RulingFamily::Theta, j as f64 * step).start,
        })
        .collect();
    let mut base: Vec<(Point3, Point3)> = arc.windows(2).map(|w| (w[0], w[1])).collect();
    for (m, r) in rulings(RulingFamily::Theta, k).iter().enumerate() {
        base.push((arc[m + 1], r.end));
    }
    // phi foot at angle m·step is the theta foot at (k + 1 − m)·step
    for (m, r) in rulings(RulingFamily::Phi, k).iter().enumerate() {
        base.push((arc[k - m], r.end));
    }

    for (p, q) in base {
        for (a, c) in symmetry_orbit(p).into_iter().zip(symmetry_orbit(q)) {
            b.segment(a, c);
        }
    }
    b.mesh
}

/// Triangulated boundary patch of a curved piece over a `(θ, t)` grid of
/// theta-family rulings.
///
/// The grid has `resolution + 1` angles in `[0, π/2]` and as many points per
/// ruling; each cell is split into two triangles. The ruling at `θ = π/2`
/// has zero length, so the cells next to it each carry one triangle of zero
/// area.
pub fn triangulate_patch(piece: CurvedPiece, resolution: usize) -> WireMesh {
    let n = resolution.max(1);
    let mut mesh = WireMesh::default();
    for i in 0..=n {
        let ruling = RulingSegment::new(RulingFamily::Theta, i as f64 * FRAC_PI_2 / n as f64);
        for j in 0..=n {
            let p = ruling.at_fraction(j as f64 / n as f64);
            mesh.vertices.push(rotate(p, piece.rotations()).map(|c| c + 0.0));
        }
    }
    let id = |i: usize, j: usize| i * (n + 1) + j;
    for i in 0..n {
        for j in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            mesh.faces.push([a, b, c]);
            mesh.faces.push([a, c, d]);
        }
    }
    mesh
}

/// OBJ text: `v`, then `l`, then `f` lines with 1-based indices. Coordinates
/// use the shortest decimal form that reads back to the same `f64`.
pub fn write_obj(m: &WireMesh) -> String {
    let mut out = String::new();
    for v in &m.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for s in &m.segments {
        let _ = writeln!(out, "l {} {}", s[0] + 1, s[1] + 1);
    }
    for f in &m.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}
