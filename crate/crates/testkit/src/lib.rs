//! Independent reference implementations used only by tests.
//!
//! Nothing here shares code paths with `gscore-core` beyond its plain data
//! types: every oracle recomputes from definitions, without pruning, sweeps
//! or matrix reduction tricks.

use gscore_core::{DistanceMatrix, FilteredSimplex, PersistenceInterval, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain double-loop Euclidean distance.
pub fn naive_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// A witness-complex test instance: `n_witnesses` points near a circle with
/// the first `n_landmarks` of them used as landmarks.
pub struct Instance {
    pub cloud: PointCloud,
    pub landmarks: Vec<usize>,
    pub distances: DistanceMatrix,
    pub alpha_max: f64,
}

pub fn noisy_circle_instance(seed: u64, n_landmarks: usize, n_witnesses: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = rng.random_range(0.0..0.3);
    let rows: Vec<[f64; 2]> = (0..n_witnesses)
        .map(|_| {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            [
                t.cos() + noise * rng.random_range(-1.0..1.0),
                t.sin() + noise * rng.random_range(-1.0..1.0),
            ]
        })
        .collect();
    let cloud = PointCloud::from_rows(&rows).unwrap();
    let landmarks: Vec<usize> = (0..n_landmarks).collect();
    let mut d = Vec::with_capacity(n_landmarks * n_witnesses);
    for &l in &landmarks {
        for w in 0..n_witnesses {
            d.push(naive_distance(cloud.row(l), cloud.row(w)));
        }
    }
    let distances = DistanceMatrix::from_raw(d, n_landmarks, n_witnesses).unwrap();
    let mut max_d = 0.0f64;
    for &a in &landmarks {
        for &b in &landmarks {
            max_d = max_d.max(naive_distance(cloud.row(a), cloud.row(b)));
        }
    }
    // Vary the cut-off so that some instances end mid-filtration.
    let alpha_max = max_d * rng.random_range(0.05..1.5);
    Instance {
        cloud,
        landmarks,
        distances,
        alpha_max,
    }
}

/// Every subset of `0..n` with 1 to 3 elements, increasing.
pub fn all_candidate_simplices(n: usize) -> Vec<Vec<u32>> {
    let n = n as u32;
    let mut out = Vec::new();
    for a in 0..n {
        out.push(vec![a]);
    }
    for a in 0..n {
        for b in a + 1..n {
            out.push(vec![a, b]);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// Witness filtration by exhaustive enumeration: for every candidate
/// simplex and every witness, the relaxation straight from the predicate,
/// minimized over witnesses, lifted over faces and cut at `alpha_max`.
/// Returned sorted by vertex list.
pub fn exhaustive_witness_filtration(d: &DistanceMatrix, alpha_max: f64) -> Vec<(Vec<u32>, f64)> {
    let n = d.n_landmarks();
    let candidates = all_candidate_simplices(n);
    let mut raw = std::collections::BTreeMap::new();
    for sigma in &candidates {
        let mut best = f64::INFINITY;
        for w in 0..d.n_witnesses() {
            let mut inside = f64::NEG_INFINITY;
            let mut outside = f64::INFINITY;
            for l in 0..n {
                let s = d.get(l, w) * d.get(l, w);
                if sigma.contains(&(l as u32)) {
                    inside = inside.max(s);
                } else {
                    outside = outside.min(s);
                }
            }
            best = best.min((inside - outside).max(0.0));
        }
        raw.insert(sigma.clone(), best);
    }
    // Candidates are ordered by size, so faces are final before cofaces.
    let mut lifted: std::collections::BTreeMap<Vec<u32>, f64> = Default::default();
    for sigma in &candidates {
        let mut t = raw[sigma];
        if sigma.len() > 1 {
            for skip in 0..sigma.len() {
                let face: Vec<u32> = sigma
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                t = t.max(lifted[&face]);
            }
        }
        lifted.insert(sigma.clone(), t);
    }
    lifted.into_iter().filter(|(_, t)| *t <= alpha_max).collect()
}

/// Rank over GF(2) by Gaussian elimination on dense rows.
pub fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let n_cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `(β₀, β₁)` of the complex made of the simplices present at `alpha`, from
/// the ranks of the full boundary matrices.
pub fn betti_by_rank(simplices: &[(Vec<u32>, f64)], alpha: f64) -> (usize, usize) {
    let present: Vec<&Vec<u32>> = simplices
        .iter()
        .filter(|(_, t)| *t <= alpha)
        .map(|(s, _)| s)
        .collect();
    let of_dim = |k: usize| -> Vec<&Vec<u32>> {
        present.iter().copied().filter(|s| s.len() == k + 1).collect()
    };
    let (v, e, t) = (of_dim(0), of_dim(1), of_dim(2));
    let boundary = |faces: &[&Vec<u32>], cells: &[&Vec<u32>]| -> usize {
        if faces.is_empty() || cells.is_empty() {
            return 0;
        }
        let rows: Vec<Vec<bool>> = cells
            .iter()
            .map(|cell| {
                faces
                    .iter()
                    .map(|f| f.iter().all(|x| cell.contains(x)))
                    .collect()
            })
            .collect();
        gf2_rank(rows)
    };
    let r1 = boundary(&v, &e);
    let r2 = boundary(&e, &t);
    (v.len() - r1, e.len() - r1 - r2)
}

/// Number of half-open intervals `[b, d)` of dimension `dim` alive at `alpha`.
pub fn alive_at(intervals: &[PersistenceInterval], dim: usize, alpha: f64) -> usize {
    intervals
        .iter()
        .filter(|i| i.dim == dim && i.birth <= alpha && alpha < i.death)
        .count()
}

/// Closed-interval membership count, one interval at a time.
pub fn membership_count(intervals: &[(f64, f64)], alpha: f64) -> usize {
    let mut count = 0;
    for &(b, d) in intervals {
        if b <= alpha && alpha <= d {
            count += 1;
        }
    }
    count
}

/// RLT by midpoint Riemann sum over `samples` uniform cells of `[0, alpha_max]`.
pub fn riemann_rlt(intervals: &[(f64, f64)], alpha_max: f64, i_max: usize, samples: usize) -> Vec<f64> {
    let mut out = vec![0.0; i_max];
    for k in 0..samples {
        let alpha = (k as f64 + 0.5) / samples as f64 * alpha_max;
        let level = intervals
            .iter()
            .filter(|&&(b, d)| b <= alpha && alpha < d.min(alpha_max))
            .count();
        if level < i_max {
            out[level] += 1.0 / samples as f64;
        }
    }
    out
}

/// Convenience: simplices of a filtration as `(vertices, appearance)`.
pub fn as_pairs(simplices: &[FilteredSimplex]) -> Vec<(Vec<u32>, f64)> {
    let mut v: Vec<(Vec<u32>, f64)> = simplices
        .iter()
        .map(|s| (s.simplex.vertices().to_vec(), s.appearance))
        .collect();
    v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    v
}

/// Sorted by size then vertices, matching [`as_pairs`].
pub fn sort_pairs(mut v: Vec<(Vec<u32>, f64)>) -> Vec<(Vec<u32>, f64)> {
    v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(gf2_rank(vec![vec![true, true], vec![true, true]]), 1);
        assert_eq!(gf2_rank(vec![vec![true, false], vec![false, true]]), 2);
        assert_eq!(gf2_rank(vec![]), 0);
    }

    #[test]
    fn betti_of_hollow_and_filled_triangle() {
        let mut s = vec![
            (vec![0], 0.0),
            (vec![1], 0.0),
            (vec![2], 0.0),
            (vec![0, 1], 1.0),
            (vec![0, 2], 1.0),
            (vec![1, 2], 1.0),
        ];
        assert_eq!(betti_by_rank(&s, 0.0), (3, 0));
        assert_eq!(betti_by_rank(&s, 1.0), (1, 1));
        s.push((vec![0, 1, 2], 2.0));
        assert_eq!(betti_by_rank(&s, 2.0), (1, 0));
    }

    #[test]
    fn candidate_count() {
        assert_eq!(all_candidate_simplices(8).len(), 8 + 28 + 56);
    }
}
