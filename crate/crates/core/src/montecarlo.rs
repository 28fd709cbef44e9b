//! Seedable Monte Carlo volume estimation.
//!
//! Sample `i` of a run with seed `s` is a pure function of `(s, i)`: a
//! ChaCha8 stream keyed by `s` and positioned at word `6 i` supplies the
//! three coordinates. Chunks of the index range can therefore be processed
//! in any order and on any number of threads without changing a single hit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel;
use crate::quadric::{Aabb, ImplicitSolid, Point3};

/// 32-bit stream words consumed per sample (three `u64` draws).
const WORDS_PER_SAMPLE: u128 = 6;
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mc")]
    MonteCarlo,
    #[serde(rename = "cubature")]
    Cubature,
    #[serde(rename = "closed_form")]
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MonteCarlo => "mc",
            Method::Cubature => "cubature",
            Method::ClosedForm => "closed_form",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// One standard deviation of the estimator.
    pub stderr: f64,
    pub n: u64,
    pub hits: u64,
    pub method: Method,
    pub seed: Option<u64>,
}

impl VolumeEstimate {
    /// Estimate for `hits` out of `n` uniform samples in a region of volume
    /// `region_volume`, with the binomial plug-in standard error.
    pub fn from_hits(hits: u64, n: u64, region_volume: f64, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: region_volume * p,
            stderr: region_volume * (p * (1.0 - p) / n as f64).sqrt(),
            n,
            hits,
            method: Method::MonteCarlo,
            seed: Some(seed),
        }
    }

    pub fn hit_rate(&self) -> f64 {
        self.hits as f64 / self.n as f64
    }
}

fn stream_at(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(index as u128 * WORDS_PER_SAMPLE);
    rng
}

#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    // 53 high bits -> [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn next_unit_point(rng: &mut ChaCha8Rng) -> Point3 {
    let u = unit(rng);
    let v = unit(rng);
    let w = unit(rng);
    [u, v, w]
}

/// Fractional coordinates in `[0,1)³` of sample `index` for `seed`.
pub fn unit_sample(seed: u64, index: u64) -> Point3 {
    next_unit_point(&mut stream_at(seed, index))
}

fn validate(region: &Aabb, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if !region.is_solid() {
        return Err(Error::InvalidBox(
            "sampling box needs lo < hi on every axis".into(),
        ));
    }
    Ok(())
}

/// Counts how many of the first `n` samples of the unit cube satisfy `pred`.
/// The predicate receives fractional coordinates in `[0,1)³`.
pub fn count_unit_hits<F>(n: u64, seed: u64, pred: F) -> u64
where
    F: Fn(Point3) -> bool + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK) as usize;
    parallel::map_range(chunks, |c| {
        let start = c as u64 * CHUNK;
        let end = (start + CHUNK).min(n);
        let mut rng = stream_at(seed, start);
        (start..end)
            .filter(|_| pred(next_unit_point(&mut rng)))
            .count() as u64
    })
    .into_iter()
    .sum()
}

/// Number of the `n` uniform samples from `region` that satisfy `pred`.
pub fn count_hits<F>(region: &Aabb, n: u64, seed: u64, pred: F) -> Result<u64>
where
    F: Fn(Point3) -> bool + Sync + Send,
{
    validate(region, n)?;
    Ok(count_unit_hits(n, seed, |u| pred(region.lerp(u))))
}

/// Monte Carlo volume of `solid`, assuming it lies inside `region`.
pub fn estimate(solid: &ImplicitSolid, region: &Aabb, n: u64, seed: u64) -> Result<VolumeEstimate> {
    let hits = count_hits(region, n, seed, |p| solid.contains(p))?;
    Ok(VolumeEstimate::from_hits(hits, n, region.volume(), seed))
}

/// Fraction of samples from `region` that land in `solid`.
pub fn hit_rate(solid: &ImplicitSolid, region: &Aabb, n: u64, seed: u64) -> Result<f64> {
    let hits = count_hits(region, n, seed, |p| solid.contains(p))?;
    Ok(hits as f64 / n as f64)
}
