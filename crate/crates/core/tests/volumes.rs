use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, LN_2, PI};

use quadsolid::classics::{
    affine_ratio_check, bicylinder, bicylinder_box_ratio, circumscribed_box_volume, tricylinder,
};
use quadsolid::cubature::volume_by_octree;
use quadsolid::montecarlo::estimate;
use quadsolid::revenge::{
    curved_piece, curved_piece_closed_form, first_octant_component, tri_hyperboloid, CurvedPiece,
};
use quadsolid::{parallel, Aabb, AffineMap, ImplicitSolid, QuadricForm};

const LOG_256: f64 = 5.545177444479562;

#[test]
fn octree_brackets_log_256() {
    let r = volume_by_octree(&tri_hyperboloid(), &Aabb::cube(1.0), 2e-3, 12).unwrap();
    assert!(r.converged, "{r:?}");
    assert!(r.abs_error_bound <= 2e-3);
    assert!((r.value - LOG_256).abs() <= r.abs_error_bound, "{r:?}");
}

#[test]
fn octree_bound_never_grows_with_depth() {
    let r = tri_hyperboloid();
    let mut last = f64::INFINITY;
    for depth in 0..=7 {
        let q = volume_by_octree(&r, &Aabb::cube(1.0), 1e-12, depth).unwrap();
        assert!(q.abs_error_bound <= last, "depth {depth}: {} > {last}", q.abs_error_bound);
        assert!((q.value - LOG_256).abs() <= q.abs_error_bound);
        last = q.abs_error_bound;
    }
}

#[test]
fn monte_carlo_matches_log_256() {
    let e = estimate(&tri_hyperboloid(), &Aabb::cube(1.0), 4_000_000, 42).unwrap();
    assert!((e.value - LOG_256).abs() <= 4.0 * e.stderr, "{e:?}");
    assert!((e.hit_rate() - LN_2).abs() <= 4.0 * e.stderr / 8.0);
}

#[test]
fn first_octant_fraction_is_log_2() {
    let box01 = Aabb::new([0.0; 3], [1.0; 3]).unwrap();
    let e = estimate(&first_octant_component(), &box01, 1_000_000, 3).unwrap();
    assert!((e.value - LN_2).abs() <= 4.0 * e.stderr, "{e:?}");
}

#[test]
fn curved_pieces_are_congruent() {
    let box01 = Aabb::new([0.0; 3], [1.0; 3]).unwrap();
    let exact = curved_piece_closed_form();
    for piece in CurvedPiece::ALL {
        let s = curved_piece(piece);
        let e = estimate(&s, &box01, 1_000_000, 17).unwrap();
        assert!((e.value - exact).abs() <= 4.0 * e.stderr, "{piece:?} {e:?}");
        let o = volume_by_octree(&s, &box01, 1e-3, 10).unwrap();
        assert!(o.converged && (o.value - exact).abs() <= o.abs_error_bound, "{piece:?} {o:?}");
    }
}

#[test]
fn orthogonal_bicylinder_two_thirds() {
    let b = bicylinder(1.0, FRAC_PI_2).unwrap();
    let o = volume_by_octree(&b, &b.bbox().unwrap(), 2e-3 * 8.0, 12).unwrap();
    assert!(o.converged, "{o:?}");
    let ratio = o.value / 8.0;
    assert!((ratio - 2.0 / 3.0).abs() <= 2e-3, "{o:?}");
    assert!((o.value - 16.0 / 3.0).abs() <= o.abs_error_bound);
}

#[test]
fn skewed_bicylinders_keep_the_ratio() {
    let ortho = bicylinder_box_ratio(1.0, FRAC_PI_2, 4_000_000, 5).unwrap();
    for angle in [FRAC_PI_3, FRAC_PI_4] {
        let r = bicylinder_box_ratio(1.0, angle, 4_000_000, 6).unwrap();
        assert!((r.ratio - 2.0 / 3.0).abs() <= 5e-3, "{angle}: {r:?}");
        assert!(r.agrees_with(&ortho, 4.0), "{angle}: {r:?} vs {ortho:?}");
        let volume = r.ratio * circumscribed_box_volume(1.0, angle).unwrap();
        assert!((volume - 16.0 / 3.0 / angle.sin()).abs() <= 4.0 * r.stderr * 8.0 / angle.sin());
    }
}

#[test]
fn tricylinder_oracles_agree() {
    let t = tricylinder(1.0).unwrap();
    let o = volume_by_octree(&t, &Aabb::cube(1.0), 2e-3, 12).unwrap();
    let e = estimate(&t, &Aabb::cube(1.0), 4_000_000, 42).unwrap();
    assert!(o.converged, "{o:?}");
    assert!((o.value - e.value).abs() <= o.abs_error_bound + 4.0 * e.stderr, "{o:?} {e:?}");
    let exact = 16.0 - 8.0 * 2f64.sqrt();
    assert!((o.value - exact).abs() <= o.abs_error_bound);
}

#[test]
fn volume_scales_cubically() {
    let t = tricylinder(1.0).unwrap();
    let base = estimate(&t, &Aabb::cube(1.0), 1_000_000, 8).unwrap();
    for c in [0.5, 2.0] {
        let scaled = t.transform(&AffineMap::scale([c; 3]).unwrap());
        let e = estimate(&scaled, &Aabb::cube(c), 1_000_000, 9).unwrap();
        let k = c * c * c;
        let combined = e.stderr.hypot(k * base.stderr);
        assert!((e.value - k * base.value).abs() <= 4.0 * combined, "{c}: {e:?}");
    }
    let big = estimate(&tricylinder(2.0).unwrap(), &Aabb::cube(2.0), 1_000_000, 10).unwrap();
    assert!((big.value - 8.0 * base.value).abs() <= 4.0 * big.stderr.hypot(8.0 * base.stderr));
}

#[test]
fn diagonal_scaling_multiplies_by_determinant() {
    let r = tri_hyperboloid();
    let a = AffineMap::scale([2.0, 0.5, 3.0]).unwrap();
    let base = estimate(&r, &Aabb::cube(1.0), 1_000_000, 11).unwrap();
    let image_box = Aabb::new([-2.0, -0.5, -3.0], [2.0, 0.5, 3.0]).unwrap();
    let e = estimate(&r.transform(&a), &image_box, 1_000_000, 12).unwrap();
    let d = a.det();
    assert!((e.value - d * base.value).abs() <= 4.0 * e.stderr.hypot(d * base.stderr));
}

#[test]
fn affine_ratio_is_preserved() {
    let r = tri_hyperboloid();
    let a = AffineMap::scale([2.0, 1.0, 1.0]).unwrap();
    let (before, after) = affine_ratio_check(&r, &Aabb::cube(1.0), &a, 1_000_000, 13).unwrap();
    assert!(before.agrees_with(&after, 4.0), "{before:?} {after:?}");
    assert!((before.ratio - LN_2).abs() <= 4.0 * before.stderr);

    let b = bicylinder(1.0, FRAC_PI_2).unwrap();
    let shear = AffineMap::linear([[1.0, 0.7, 0.0], [0.0, 1.0, 0.0], [0.2, 0.0, 1.0]]).unwrap();
    assert!((shear.det() - 1.0).abs() < 1e-15);
    let (before, after) = affine_ratio_check(&b, &Aabb::cube(1.0), &shear, 1_000_000, 14).unwrap();
    assert!(before.agrees_with(&after, 4.0));
    assert!((after.ratio - 2.0 / 3.0).abs() <= 4.0 * after.stderr);
}

#[test]
fn ball_estimates_cover_truth_at_two_sigma() {
    // 100 fixed seeds; a 2-sigma interval covers the truth about 95.4% of the time
    let ball = ImplicitSolid::from_forms([QuadricForm::diagonal(1.0, 1.0, 1.0, -1.0)]).unwrap();
    let exact = 4.0 * PI / 3.0;
    let covered = (0..100u64)
        .filter(|&seed| {
            let e = estimate(&ball, &Aabb::cube(1.0), 100_000, seed).unwrap();
            (e.value - exact).abs() <= 2.0 * e.stderr
        })
        .count();
    assert!(covered >= 95, "{covered} of 100 within 2 sigma");
}

#[cfg(feature = "parallel")]
#[test]
fn results_do_not_depend_on_thread_count() {
    let r = tri_hyperboloid();
    let run = |t| {
        parallel::with_threads(Some(t), || {
            (
                estimate(&r, &Aabb::cube(1.0), 1_000_000, 42).unwrap(),
                volume_by_octree(&r, &Aabb::cube(1.0), 5e-3, 10).unwrap(),
            )
        })
    };
    let (m1, o1) = run(1);
    let (m8, o8) = run(8);
    assert_eq!(m1, m8);
    assert_eq!(o1.value.to_bits(), o8.value.to_bits());
    assert_eq!(o1.abs_error_bound.to_bits(), o8.abs_error_bound.to_bits());
}
