//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_bound: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Kronrod abscissae on [-1, 1], descending; odd indices are Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Upper bound on integrand evaluations for a single 1-D integral.
pub const MAX_EVALUATIONS: u64 = 300_000;

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * h;
    let roundoff = 50.0 * f64::EPSILON * abs * h.abs();
    let error = ((kronrod - gauss) * h).abs().max(roundoff);
    Segment { a, b, value, error }
}

/// Adaptive integral of `f` over `[a, b]`. The interval with the largest
/// error estimate is bisected until the summed estimate drops below `tol`
/// or the evaluation budget runs out.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_1d_budget(f, a, b, tol, MAX_EVALUATIONS)
}

pub fn integrate_1d_budget<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_evaluations: u64,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_bound: 0.0,
            evaluations: 0,
            converged: true,
        });
    }

    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut total_error = first.error;
    heap.push(first);

    while total_error > tol && evaluations + 30 <= max_evaluations {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(worst);
            break;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let mut segments = heap.into_vec();
    segments.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = segments.iter().map(|s| s.value).sum();
    let abs_error_bound: f64 = segments.iter().map(|s| s.error).sum();
    if !f64::is_finite(value) {
        return Err(Error::InvalidArgument("integrand is not finite on the interval".into()));
    }
    Ok(QuadratureResult {
        value,
        abs_error_bound,
        evaluations,
        converged: abs_error_bound <= tol,
    })
}

/// Iterated integral `∫_a^b ∫_{lo(y)}^{hi(y)} f(x, y) dx dy`.
///
/// Each inner integral runs at `tol / (2 (b - a))` and the outer one at
/// `tol / 2`. Outer weights are positive and sum to `b - a`, so the reported
/// bound `outer + (b - a) · max inner` covers both sources.
pub fn integrate_2d_iterated<F, L, H>(
    f: F,
    outer: (f64, f64),
    inner_lo: L,
    inner_hi: H,
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let (a, b) = outer;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let width = b - a;
    let inner_tol = if width > 0.0 { tol / (2.0 * width) } else { tol };
    let max_inner = Cell::new(0.0_f64);
    let inner_ok = Cell::new(true);
    let inner_evals = Cell::new(0_u64);
    let failure = Cell::new(None::<Error>);

    let g = |y: f64| {
        let (lo, hi) = (inner_lo(y), inner_hi(y));
        match integrate_1d(|x| f(x, y), lo, hi, inner_tol) {
            Ok(r) => {
                max_inner.set(max_inner.get().max(r.abs_error_bound));
                inner_ok.set(inner_ok.get() && r.converged);
                inner_evals.set(inner_evals.get() + r.evaluations);
                r.value
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer_result = integrate_1d(g, a, b, 0.5 * tol);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let o = outer_result?;
    let bound = o.abs_error_bound + width * max_inner.get();
    Ok(QuadratureResult {
        value: o.value,
        abs_error_bound: bound,
        evaluations: o.evaluations + inner_evals.get(),
        converged: o.converged && inner_ok.get() && bound <= tol,
    })
}
