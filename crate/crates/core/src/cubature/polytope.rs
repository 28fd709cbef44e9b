//! Convex polytopes as face lists, clipped by half-spaces.

use crate::quadric::Point3;

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Debug)]
pub(crate) struct ConvexPolytope {
    faces: Vec<Vec<Point3>>,
    /// Length scale for merging nearly coincident cap vertices.
    scale: f64,
}

impl ConvexPolytope {
    /// The box `[-r, r]` (per axis).
    pub fn centered_box(r: Point3) -> Self {
        let c = |sx: f64, sy: f64, sz: f64| [sx * r[0], sy * r[1], sz * r[2]];
        let faces = vec![
            vec![c(-1., -1., -1.), c(-1., 1., -1.), c(-1., 1., 1.), c(-1., -1., 1.)],
            vec![c(1., -1., -1.), c(1., 1., -1.), c(1., 1., 1.), c(1., -1., 1.)],
            vec![c(-1., -1., -1.), c(1., -1., -1.), c(1., -1., 1.), c(-1., -1., 1.)],
            vec![c(-1., 1., -1.), c(1., 1., -1.), c(1., 1., 1.), c(-1., 1., 1.)],
            vec![c(-1., -1., -1.), c(1., -1., -1.), c(1., 1., -1.), c(-1., 1., -1.)],
            vec![c(-1., -1., 1.), c(1., -1., 1.), c(1., 1., 1.), c(-1., 1., 1.)],
        ];
        Self {
            faces,
            scale: r[0].max(r[1]).max(r[2]),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Keeps the part where `n·p + c ≤ 0`.
    pub fn clip(&mut self, n: Point3, c: f64) {
        if self.is_empty() {
            return;
        }
        if norm(n) == 0.0 {
            if c > 0.0 {
                self.faces.clear();
            }
            return;
        }
        let side = |p: &Point3| dot(n, *p) + c;
        if self.faces.iter().flatten().all(|p| side(p) <= 0.0) {
            return;
        }
        if self.faces.iter().flatten().all(|p| side(p) >= 0.0) {
            // at most a face or edge survives
            self.faces.clear();
            return;
        }
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        let mut cap: Vec<Point3> = Vec::new();
        for face in &self.faces {
            let d: Vec<f64> = face.iter().map(|&p| dot(n, p) + c).collect();
            if d.iter().all(|&v| v <= 0.0) {
                cap.extend(face.iter().zip(&d).filter(|(_, v)| **v == 0.0).map(|(p, _)| *p));
                faces.push(face.clone());
                continue;
            }
            let mut out = Vec::with_capacity(face.len() + 1);
            for i in 0..face.len() {
                let j = (i + 1) % face.len();
                let (p, q, dp, dq) = (face[i], face[j], d[i], d[j]);
                if dp <= 0.0 {
                    out.push(p);
                    if dp == 0.0 {
                        cap.push(p);
                    }
                }
                if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
                    let t = dp / (dp - dq);
                    let x = [0, 1, 2].map(|k| p[k] + t * (q[k] - p[k]));
                    out.push(x);
                    cap.push(x);
                }
            }
            if out.len() >= 3 {
                faces.push(out);
            }
        }

        let eps = 1e-12 * self.scale;
        let mut uniq: Vec<Point3> = Vec::new();
        for p in cap {
            if !uniq.iter().any(|q| norm(sub(p, *q)) <= eps) {
                uniq.push(p);
            }
        }
        if uniq.len() >= 3 {
            let k = uniq.len() as f64;
            let centroid = [0, 1, 2].map(|i| uniq.iter().map(|p| p[i]).sum::<f64>() / k);
            let axis = if n[0].abs() < 0.9 * norm(n) { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let u = cross(n, axis);
            let v = cross(n, u);
            uniq.sort_by(|p, q| {
                let (a, b) = (sub(*p, centroid), sub(*q, centroid));
                dot(a, v).atan2(dot(a, u)).total_cmp(&dot(b, v).atan2(dot(b, u)))
            });
            faces.push(uniq);
        }
        if faces.len() < 4 {
            faces.clear();
        }
        self.faces = faces;
    }

    pub fn volume(&self) -> f64 {
        if self.faces.is_empty() {
            return 0.0;
        }
        let count: usize = self.faces.iter().map(Vec::len).sum();
        let reference = [0, 1, 2].map(|i| {
            self.faces.iter().flatten().map(|p| p[i]).sum::<f64>() / count as f64
        });
        self.faces
            .iter()
            .map(|f| {
                let mut area = [0.0; 3];
                for i in 0..f.len() {
                    let c = cross(f[i], f[(i + 1) % f.len()]);
                    for k in 0..3 {
                        area[k] += 0.5 * c[k];
                    }
                }
                dot(area, sub(f[0], reference)).abs() / 3.0
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_volume() {
        let p = ConvexPolytope::centered_box([0.5, 1.0, 2.0]);
        assert!((p.volume() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn axis_clip_halves() {
        let mut p = ConvexPolytope::centered_box([1.0; 3]);
        p.clip([1.0, 0.0, 0.0], 0.0);
        assert!((p.volume() - 4.0).abs() < 1e-14);
        p.clip([0.0, 1.0, 0.0], 0.5);
        assert!((p.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn corner_tetrahedron() {
        // x + y + z <= -2 cuts the corner tetrahedron at (-1,-1,-1) with legs 1
        let mut p = ConvexPolytope::centered_box([1.0; 3]);
        p.clip([1.0, 1.0, 1.0], 2.0);
        assert!((p.volume() - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_plane_halves_cube() {
        let mut p = ConvexPolytope::centered_box([1.0; 3]);
        p.clip([0.3, -0.7, 0.2], 0.0);
        assert!((p.volume() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn disjoint_and_trivial_planes() {
        let mut p = ConvexPolytope::centered_box([1.0; 3]);
        p.clip([1.0, 0.0, 0.0], -5.0);
        assert!((p.volume() - 8.0).abs() < 1e-14);
        p.clip([1.0, 1.0, 0.0], 5.0);
        assert!(p.is_empty());
        assert_eq!(p.volume(), 0.0);

        let mut q = ConvexPolytope::centered_box([1.0; 3]);
        q.clip([0.0; 3], -1.0);
        assert!((q.volume() - 8.0).abs() < 1e-14);
        q.clip([0.0; 3], 1.0);
        assert!(q.is_empty());
    }

    #[test]
    fn volume_matches_sampling() {
        // independent check: count lattice points of a fine grid
        let planes = [([1.0, 2.0, -0.5], -0.3), ([-0.4, 0.1, 1.0], 0.2), ([0.2, -1.0, 0.3], -0.1)];
        let mut p = ConvexPolytope::centered_box([1.0; 3]);
        for (n, c) in planes {
            p.clip(n, c);
        }
        let m = 200;
        let mut hits = 0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let q = [i, j, k].map(|t| -1.0 + (t as f64 + 0.5) * 2.0 / m as f64);
                    if planes.iter().all(|(n, c)| dot(*n, q) + c <= 0.0) {
                        hits += 1;
                    }
                }
            }
        }
        let grid = 8.0 * hits as f64 / (m * m * m) as f64;
        assert!((p.volume() - grid).abs() < 5e-3, "{} vs {grid}", p.volume());
    }
}
