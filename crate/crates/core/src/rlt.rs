//! Relative living times, their mean over landmark draws, and the score.

use crate::error::{Error, Result};
use crate::persistence::{Barcode, PersistenceInterval};

/// Overflow mass above which a warning is logged.
pub const OVERFLOW_WARN_THRESHOLD: f64 = 0.01;

/// Fraction of `[0, α_max]` spent at each Betti level `0..i_max`.
///
/// Time spent at levels `≥ i_max` is kept in `overflow` rather than folded
/// into the last bin.
#[derive(Debug, Clone, PartialEq)]
pub struct RltVector {
    pub values: Vec<f64>,
    pub overflow: f64,
}

impl RltVector {
    /// All mass at zero holes.
    pub fn trivial(i_max: usize) -> Self {
        let mut values = vec![0.0; i_max];
        values[0] = 1.0;
        Self {
            values,
            overflow: 0.0,
        }
    }

    pub fn i_max(&self) -> usize {
        self.values.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() + self.overflow
    }
}

/// Column mean of a set of [`RltVector`]s; read as a distribution over hole
/// counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MrltDistribution {
    pub values: Vec<f64>,
    pub overflow: f64,
    pub n_experiments: usize,
}

impl MrltDistribution {
    pub fn i_max(&self) -> usize {
        self.values.len()
    }
}

/// Number of intervals whose closed span contains `alpha`.
pub fn betti_count(intervals: &[PersistenceInterval], alpha: f64) -> usize {
    intervals
        .iter()
        .filter(|i| i.birth <= alpha && alpha <= i.death)
        .count()
}

/// Relative living times of dimension-1 classes in `barcode`.
pub fn rlt_from_barcode(barcode: &Barcode, i_max: usize) -> Result<RltVector> {
    let intervals: Vec<PersistenceInterval> = barcode.intervals_in_dim(1);
    rlt_from_intervals(&intervals, barcode.alpha_max, i_max)
}

/// Event sweep over `[0, alpha_max]`: deaths are clamped to `alpha_max`,
/// each half-open segment between consecutive events adds its length to the
/// level active on it.
pub fn rlt_from_intervals(
    intervals: &[PersistenceInterval],
    alpha_max: f64,
    i_max: usize,
) -> Result<RltVector> {
    if i_max == 0 {
        return Err(Error::param("i_max must be at least 1"));
    }
    if !(alpha_max > 0.0 && alpha_max.is_finite()) {
        return Err(Error::param(format!(
            "alpha_max must be positive and finite, got {alpha_max}"
        )));
    }

    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * intervals.len());
    for iv in intervals {
        let start = iv.birth.max(0.0);
        let end = iv.death.min(alpha_max);
        if start < end {
            events.push((start, 1));
            events.push((end, -1));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut levels = vec![0.0f64; i_max];
    let mut overflow = 0.0;
    let mut add = |level: i32, len: f64| {
        if len > 0.0 {
            match levels.get_mut(level as usize) {
                Some(slot) => *slot += len,
                None => overflow += len,
            }
        }
    };

    let mut level = 0i32;
    let mut cursor = 0.0f64;
    let mut k = 0;
    while k < events.len() {
        let at = events[k].0;
        add(level, at - cursor);
        while k < events.len() && events[k].0 == at {
            level += events[k].1;
            k += 1;
        }
        cursor = at;
    }
    add(level, alpha_max - cursor);

    Ok(RltVector {
        values: levels.into_iter().map(|l| l / alpha_max).collect(),
        overflow: overflow / alpha_max,
    })
}

/// Entrywise mean of `rlts`.
pub fn mean_rlt(rlts: &[RltVector]) -> Result<MrltDistribution> {
    let first = rlts
        .first()
        .ok_or_else(|| Error::param("cannot average an empty set of RLT vectors"))?;
    let i_max = first.i_max();
    let mut sum = vec![0.0f64; i_max];
    let mut overflow = 0.0;
    for (row, r) in rlts.iter().enumerate() {
        if r.i_max() != i_max {
            return Err(Error::param(format!(
                "RLT vector {row} has length {}, expected {i_max}",
                r.i_max()
            )));
        }
        for (s, v) in sum.iter_mut().zip(&r.values) {
            *s += v;
        }
        overflow += r.overflow;
    }
    let n = rlts.len() as f64;
    let overflow = overflow / n;
    if overflow > OVERFLOW_WARN_THRESHOLD {
        log::warn!(
            "{:.2}% of the filtration range has at least {i_max} holes; consider a larger i_max",
            overflow * 100.0
        );
    }
    Ok(MrltDistribution {
        values: sum.into_iter().map(|s| s / n).collect(),
        overflow,
        n_experiments: rlts.len(),
    })
}

/// Squared L2 distance between two MRLT vectors of equal length.
pub fn geometry_score(a: &MrltDistribution, b: &MrltDistribution) -> Result<f64> {
    geometry_score_slices(&a.values, &b.values)
}

pub fn geometry_score_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::param(format!(
            "i_max mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Most likely number of one-dimensional holes; ties go to the smallest index.
pub fn map_betti(m: &MrltDistribution) -> usize {
    let mut best = 0;
    for (i, &v) in m.values.iter().enumerate() {
        if v > m.values[best] {
            best = i;
        }
    }
    best
}
