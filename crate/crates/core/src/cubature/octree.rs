//! Indicator cubature: volume of an implicit solid by octree subdivision.
//!
//! Cells are classified with interval bounds of each constraint. Cells that
//! stay undecided carry an enclosure `[lo, hi]` of the solid's volume inside
//! them: each undecided quadric is sandwiched between two parallel planes
//! (its tangent plane at the cell center shifted by the range of the
//! second-order remainder), and the volume of the cell clipped by the inner
//! and outer planes bounds the true volume from below and above. For
//! planar constraints both planes coincide and the cell volume is exact.
//!
//! A boundary cell contributes `(lo + hi) / 2` and half its width to the
//! error bound; with no information (`lo = 0`, `hi = cell volume`) this is the
//! plain half-volume rule.

use serde::{Deserialize, Serialize};

use super::polytope::ConvexPolytope;
use super::quadrature::QuadratureResult;
use crate::error::{Error, Result};
use crate::parallel;
use crate::quadric::{Aabb, ImplicitSolid};

/// Deepest subdivision accepted by [`volume_by_octree`].
pub const MAX_DEPTH_LIMIT: u32 = 24;

/// Recursion levels that fan out over worker threads.
const PARALLEL_LEVELS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClassification {
    /// Every constraint is provably `≤ 0` on the whole cell.
    Inside,
    /// Some constraint is provably `> 0` on the whole cell.
    Outside,
    Boundary,
}

pub fn classify_cell(solid: &ImplicitSolid, cell: &Aabb) -> CellClassification {
    let mut inside = true;
    for h in solid.constraints() {
        let (lo, hi) = h.form.range_over(cell);
        if lo > 0.0 {
            return CellClassification::Outside;
        }
        if hi > 0.0 {
            inside = false;
        }
    }
    if inside {
        CellClassification::Inside
    } else {
        CellClassification::Boundary
    }
}

/// Lower and upper bounds on `vol(solid ∩ cell)`.
pub fn cell_enclosure(solid: &ImplicitSolid, cell: &Aabb) -> (f64, f64) {
    let center = cell.center();
    let r = cell.half_widths();
    let mut inner = ConvexPolytope::centered_box(r);
    let mut outer = ConvexPolytope::centered_box(r);
    for h in solid.constraints() {
        let (lo, hi) = h.form.range_over(cell);
        if lo > 0.0 {
            return (0.0, 0.0);
        }
        if hi <= 0.0 {
            continue;
        }
        // q(center + d) = v + g·d + dᵀAd with dᵀAd ∈ [qlo, qhi]
        let v = h.form.eval(center);
        let g = h.form.gradient(center);
        let (qlo, qhi) = h.form.quadratic_range(r);
        inner.clip(g, v + qhi);
        outer.clip(g, v + qlo);
    }
    let cell_volume = cell.volume();
    let lo = inner.volume().clamp(0.0, cell_volume);
    let hi = outer.volume().clamp(lo, cell_volume);
    (lo, hi)
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    lo: f64,
    hi: f64,
    cells: u64,
}

fn refine(solid: &ImplicitSolid, cell: &Aabb, depth_left: u32, fan_out: u32) -> Tally {
    let volume = cell.volume();
    match classify_cell(solid, cell) {
        CellClassification::Inside => Tally {
            lo: volume,
            hi: volume,
            cells: 1,
        },
        CellClassification::Outside => Tally {
            lo: 0.0,
            hi: 0.0,
            cells: 1,
        },
        CellClassification::Boundary => {
            let (lo, hi) = cell_enclosure(solid, cell);
            if depth_left == 0 || hi <= lo {
                return Tally { lo, hi, cells: 1 };
            }
            let child = |k: usize| refine(solid, &cell.octant(k), depth_left - 1, fan_out.saturating_sub(1));
            let kids: Vec<Tally> = if fan_out > 0 {
                parallel::map_range(8, child)
            } else {
                (0..8).map(child).collect()
            };
            let sum = kids.iter().fold(Tally::default(), |acc, t| Tally {
                lo: acc.lo + t.lo,
                hi: acc.hi + t.hi,
                cells: acc.cells + t.cells,
            });
            // never looser than the cell's own enclosure
            let lo = lo.max(sum.lo);
            let hi = hi.min(sum.hi).max(lo);
            Tally {
                lo,
                hi,
                cells: 1 + sum.cells,
            }
        }
    }
}

/// Volume of `solid` inside `region` to absolute accuracy `tol`.
///
/// Subdivision deepens one level at a time until half the width of the
/// volume enclosure drops to `tol`; `converged` is false when `max_depth`
/// is reached first. The result is independent of thread count.
pub fn volume_by_octree(
    solid: &ImplicitSolid,
    region: &Aabb,
    tol: f64,
    max_depth: u32,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !region.is_solid() {
        return Err(Error::InvalidBox("octree region needs lo < hi on every axis".into()));
    }
    if max_depth > MAX_DEPTH_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "max_depth {max_depth} exceeds {MAX_DEPTH_LIMIT}"
        )));
    }
    let mut evaluations = 0;
    for depth in 0..=max_depth {
        let t = refine(solid, region, depth, PARALLEL_LEVELS);
        evaluations += t.cells;
        let bound = 0.5 * (t.hi - t.lo);
        if bound <= tol || depth == max_depth {
            return Ok(QuadratureResult {
                value: 0.5 * (t.lo + t.hi),
                abs_error_bound: bound,
                evaluations,
                converged: bound <= tol,
            });
        }
    }
    unreachable!("loop returns at depth == max_depth")
}
