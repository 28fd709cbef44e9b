//! Steinmetz solids: bicylinders (orthogonal or skewed) and the tricylinder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo;
use crate::quadric::{Aabb, AffineMap, ImplicitSolid, Point3, QuadricForm};

/// A solid circular cylinder through the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    axis: Point3,
    radius: f64,
}

impl CylinderSpec {
    pub fn new(axis: Point3, radius: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "cylinder axis must be a unit vector, |axis| = {norm}"
            )));
        }
        check_radius(radius)?;
        Ok(Self { axis, radius })
    }

    pub fn axis(&self) -> Point3 {
        self.axis
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `|p|² − (axis·p)² − r²`, the squared distance to the axis minus `r²`.
    pub fn form(&self) -> QuadricForm {
        let a = self.axis;
        let mut m = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = f64::from(u8::from(i == j)) - a[i] * a[j];
            }
        }
        m[3][3] = -self.radius * self.radius;
        QuadricForm::from_matrix(m)
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")))
    }
}

fn check_angle(angle: f64) -> Result<()> {
    if angle > 0.0 && angle <= std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "angle must lie in (0, pi/2], got {angle}"
        )))
    }
}

/// Two cylinders of radius `radius`, one along x and one along
/// `(cos angle, sin angle, 0)`.
pub fn bicylinder(radius: f64, angle: f64) -> Result<ImplicitSolid> {
    check_radius(radius)?;
    check_angle(angle)?;
    let (s, c) = angle.sin_cos();
    // at π/2 use the exact axis so the orthogonal case has integer coefficients
    let second = if angle == std::f64::consts::FRAC_PI_2 { [0.0, 1.0, 0.0] } else { [c, s, 0.0] };
    let x_cyl = CylinderSpec::new([1.0, 0.0, 0.0], radius)?;
    let u_cyl = CylinderSpec::new(second, radius)?;
    let half_x = radius * (1.0 + c.abs()) / s;
    let bbox = Aabb::new([-half_x, -radius, -radius], [half_x, radius, radius])?;
    Ok(ImplicitSolid::from_forms([x_cyl.form(), u_cyl.form()])?.with_bbox(bbox))
}

/// Linear map taking the orthogonal bicylinder onto `bicylinder(r, angle)`:
/// the y axis goes to `(cos angle, sin angle, 0) / sin angle`, x and z are fixed
/// up to the factor `1 / sin angle` on x.
pub fn skew_shear(angle: f64) -> Result<AffineMap> {
    check_angle(angle)?;
    let (s, c) = angle.sin_cos();
    AffineMap::linear([[1.0 / s, c / s, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
}

/// Volume of the shear image of the cube `[-r, r]³`: `8 r³ / sin angle`.
pub fn circumscribed_box_volume(radius: f64, angle: f64) -> Result<f64> {
    check_radius(radius)?;
    check_angle(angle)?;
    Ok(8.0 * radius.powi(3) / angle.sin())
}

/// Three cylinders of radius `radius` along the coordinate axes.
pub fn tricylinder(radius: f64) -> Result<ImplicitSolid> {
    check_radius(radius)?;
    let forms = crate::revenge::BASIS
        .iter()
        .map(|&axis| CylinderSpec::new(axis, radius).map(|c| c.form()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImplicitSolid::from_forms(forms)?.with_bbox(Aabb::cube(radius)))
}

/// Fraction of a sampling region occupied by a solid, with its binomial
/// standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub n: u64,
    pub hits: u64,
}

impl RatioEstimate {
    fn from_hits(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            ratio: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            hits,
        }
    }

    /// `|a − b| ≤ k · sqrt(σa² + σb²)`.
    pub fn agrees_with(&self, other: &RatioEstimate, k: f64) -> bool {
        (self.ratio - other.ratio).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

/// `Vol(s) / Vol(box)` and `Vol(A s) / Vol(A box)` by Monte Carlo.
///
/// The image box is a parallelepiped; it is sampled by drawing points `p`
/// from `box` and testing `A p` against the transformed solid, so both runs
/// use the same `n` and `seed`.
pub fn affine_ratio_check(
    s: &ImplicitSolid,
    sample_box: &Aabb,
    map: &AffineMap,
    n: u64,
    seed: u64,
) -> Result<(RatioEstimate, RatioEstimate)> {
    let before = montecarlo::count_hits(sample_box, n, seed, |p| s.contains(p))?;
    let image = s.transform(map);
    let after = montecarlo::count_hits(sample_box, n, seed, |p| image.contains(map.apply(p)))?;
    Ok((RatioEstimate::from_hits(before, n), RatioEstimate::from_hits(after, n)))
}

/// Ratio of `bicylinder(radius, angle)` to its circumscribed box, sampled
/// through the shear pullback of the cube `[-r, r]³`.
pub fn bicylinder_box_ratio(radius: f64, angle: f64, n: u64, seed: u64) -> Result<RatioEstimate> {
    let solid = bicylinder(radius, angle)?;
    let shear = skew_shear(angle)?;
    let hits = montecarlo::count_hits(&Aabb::cube(radius), n, seed, |p| {
        solid.contains(shear.apply(p))
    })?;
    Ok(RatioEstimate::from_hits(hits, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn cylinder_validation() {
        assert!(CylinderSpec::new([1.0, 1.0, 0.0], 1.0).is_err());
        assert!(CylinderSpec::new([1.0, 0.0, 0.0], 0.0).is_err());
        assert!(CylinderSpec::new([1.0, 0.0, 0.0], -2.0).is_err());
        let c = CylinderSpec::new([0.6, 0.8, 0.0], 2.0).unwrap();
        // distance from (0,0,2) to the axis is 2
        assert!(c.form().eval([0.0, 0.0, 2.0]).abs() < 1e-12);
        assert!(c.form().eval([1.6, -1.2, 0.0]).abs() < 1e-12);
        assert!((c.form().eval([3.0, 4.0, 0.0]) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn angle_validation() {
        assert!(bicylinder(1.0, 0.0).is_err());
        assert!(bicylinder(1.0, -0.1).is_err());
        assert!(bicylinder(1.0, 2.0).is_err());
        assert!(bicylinder(0.0, FRAC_PI_2).is_err());
        assert!(bicylinder(1.0, FRAC_PI_2).is_ok());
    }

    #[test]
    fn orthogonal_bicylinder_coefficients() {
        let b = bicylinder(1.0, FRAC_PI_2).unwrap();
        let p0 = b.constraints()[0].form.polynomial();
        let p1 = b.constraints()[1].form.polynomial();
        assert_eq!((p0.yy, p0.zz, p0.xx, p0.c), (1.0, 1.0, 0.0, -1.0));
        assert_eq!((p1.xx, p1.zz, p1.yy, p1.c), (1.0, 1.0, 0.0, -1.0));
        assert_eq!(b.bbox(), Some(Aabb::cube(1.0)));
    }

    #[test]
    fn shear_maps_orthogonal_onto_skewed() {
        let ortho = bicylinder(1.0, FRAC_PI_2).unwrap();
        for angle in [FRAC_PI_3, FRAC_PI_4, 0.3] {
            let skew = bicylinder(1.0, angle).unwrap();
            let a = skew_shear(angle).unwrap();
            for i in 0..2000 {
                let p = montecarlo::unit_sample(11, i).map(|u| 2.4 * u - 1.2);
                let q = a.apply(p);
                for (h, g) in ortho.constraints().iter().zip(skew.constraints()) {
                    assert!((h.form.eval(p) - g.form.eval(q)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn skewed_bbox_holds_members() {
        for angle in [FRAC_PI_3, 0.2] {
            let b = bicylinder(1.5, angle).unwrap();
            let bbox = b.bbox().unwrap();
            let a = skew_shear(angle).unwrap();
            for i in 0..5000 {
                let q = a.apply(montecarlo::unit_sample(3, i).map(|u| 3.0 * u - 1.5));
                if b.contains(q) {
                    assert!(bbox.contains(q), "{q:?}");
                }
            }
        }
    }

    #[test]
    fn box_volume_is_sheared_cube() {
        let v = circumscribed_box_volume(1.0, FRAC_PI_3).unwrap();
        let det = skew_shear(FRAC_PI_3).unwrap().det();
        assert!((v - 8.0 * det).abs() < 1e-14);
    }

    #[test]
    fn tricylinder_membership() {
        let t = tricylinder(1.0).unwrap();
        assert!(t.contains([1.0, 0.0, 0.0]));
        let d = 1.0 / 2f64.sqrt();
        // y² + z² = 1 on the diagonal point scaled by 1/√2
        let q = [d, d, d];
        let sum = q[1] * q[1] + q[2] * q[2];
        assert_eq!(t.contains(q), sum <= 1.0);
        assert!(!t.contains([0.9, 0.9, 0.0]));
    }

    #[test]
    fn identity_ratio_is_bit_identical() {
        let b = bicylinder(1.0, FRAC_PI_2).unwrap();
        let (r0, r1) = affine_ratio_check(&b, &Aabb::cube(1.0), &AffineMap::identity(), 50_000, 9).unwrap();
        assert_eq!(r0, r1);
    }

    #[test]
    fn orthogonal_ratio_near_two_thirds() {
        let r = bicylinder_box_ratio(1.0, FRAC_PI_2, 400_000, 1).unwrap();
        assert!((r.ratio - 2.0 / 3.0).abs() <= 4.0 * r.stderr, "{r:?}");
    }
}
