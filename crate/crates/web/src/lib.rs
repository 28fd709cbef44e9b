//! Browser bindings: solid volumes from DSL text, the bicylinder ratio as
//! the axes tilt, and the boundary wireframe for drawing.

use wasm_bindgen::prelude::*;

use quadsolid::classics::{bicylinder_box_ratio, circumscribed_box_volume};
use quadsolid::cubature::volume_by_octree;
use quadsolid::mesh::build_wireframe;
use quadsolid::montecarlo::estimate;
use quadsolid::{dsl, Aabb, ImplicitSolid};

fn enclosure(solid: &ImplicitSolid) -> Result<Aabb, String> {
    match solid.enclosure() {
        Some(b) if b.is_solid() => Ok(b),
        Some(_) => Err("the solid has no interior".into()),
        None => Err("could not prove the solid is bounded".into()),
    }
}

/// `[value, stderr, xlo, xhi, ylo, yhi, zlo, zhi]` for a Monte Carlo run.
pub fn mc_volume(src: &str, n: u32, seed: u32) -> Result<Vec<f64>, String> {
    let solid = dsl::parse(src).map_err(|e| e.to_string())?;
    let region = enclosure(&solid)?;
    let e = estimate(&solid, &region, u64::from(n.max(1)), u64::from(seed)).map_err(|e| e.to_string())?;
    Ok(with_box(e.value, e.stderr, &region))
}

/// `[value, bound, xlo, xhi, ylo, yhi, zlo, zhi]` for the octree.
pub fn octree_volume(src: &str, tol: f64, max_depth: u32) -> Result<Vec<f64>, String> {
    let solid = dsl::parse(src).map_err(|e| e.to_string())?;
    let region = enclosure(&solid)?;
    let q = volume_by_octree(&solid, &region, tol, max_depth.min(10)).map_err(|e| e.to_string())?;
    Ok(with_box(q.value, q.abs_error_bound, &region))
}

fn with_box(value: f64, err: f64, b: &Aabb) -> Vec<f64> {
    vec![value, err, b.lo[0], b.hi[0], b.lo[1], b.hi[1], b.lo[2], b.hi[2]]
}

/// `[ratio, stderr, volume]` for unit cylinders meeting at `angle_deg`.
pub fn bicylinder(angle_deg: f64, n: u32, seed: u32) -> Result<Vec<f64>, String> {
    let angle = angle_deg.to_radians();
    let r = bicylinder_box_ratio(1.0, angle, u64::from(n.max(1)), u64::from(seed)).map_err(|e| e.to_string())?;
    let box_volume = circumscribed_box_volume(1.0, angle).map_err(|e| e.to_string())?;
    Ok(vec![r.ratio, r.stderr, r.ratio * box_volume])
}

/// Segment endpoints, six numbers per segment.
pub fn wireframe(rulings: u32) -> Vec<f64> {
    let m = build_wireframe(rulings.min(60) as usize);
    m.segments
        .iter()
        .flat_map(|s| m.vertices[s[0]].into_iter().chain(m.vertices[s[1]]))
        .collect()
}

#[wasm_bindgen(js_name = mcVolume)]
pub fn js_mc_volume(src: &str, n: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    mc_volume(src, n, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = octreeVolume)]
pub fn js_octree_volume(src: &str, tol: f64, max_depth: u32) -> Result<Vec<f64>, JsError> {
    octree_volume(src, tol, max_depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bicylinderRatio)]
pub fn js_bicylinder(angle_deg: f64, n: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    bicylinder(angle_deg, n, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = wireframe)]
pub fn js_wireframe(rulings: u32) -> Vec<f64> {
    wireframe(rulings)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = "x^2+y^2-z^2<=1; y^2+z^2-x^2<=1; z^2+x^2-y^2<=1";

    #[test]
    fn volumes_from_text() {
        let mc = mc_volume(THREE, 200_000, 1).unwrap();
        assert!((mc[0] - 256f64.ln()).abs() <= 4.0 * mc[1]);
        assert_eq!(&mc[2..], &[-1.0, 1.0, -1.0, 1.0, -1.0, 1.0]);
        let oc = octree_volume(THREE, 5e-3, 10).unwrap();
        assert!((oc[0] - 256f64.ln()).abs() <= oc[1]);
    }

    #[test]
    fn errors_are_messages() {
        assert!(mc_volume("x^3 <= 1", 10, 0).unwrap_err().contains("degree"));
        assert!(mc_volume("x^2 + y^2 - z^2 <= 1", 10, 0).unwrap_err().contains("bounded"));
        assert!(bicylinder(0.0, 10, 0).is_err());
    }

    #[test]
    fn ratio_and_segments() {
        let r = bicylinder(60.0, 200_000, 2).unwrap();
        assert!((r[0] - 2.0 / 3.0).abs() <= 4.0 * r[1]);
        assert_eq!(wireframe(0).len(), 12 * 6);
        assert_eq!(wireframe(2).len(), (12 + 48 * 2 + 12 * 3) * 6);
    }
}
