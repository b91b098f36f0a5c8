//! Point clouds, landmark sampling and the landmark-to-witness distance kernel.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};

/// `N × D` samples stored row-major in 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n_samples: usize,
    dim: usize,
}

impl PointCloud {
    pub fn new(data: Vec<f64>, n_samples: usize, dim: usize) -> Result<Self> {
        if n_samples == 0 || dim == 0 {
            return Err(Error::input(format!(
                "point cloud must have at least one sample and one feature, got {n_samples}x{dim}"
            )));
        }
        if data.len() != n_samples * dim {
            return Err(Error::input(format!(
                "buffer of length {} does not match shape {n_samples}x{dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite value {} at row {}, column {}",
                data[pos],
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            data,
            n_samples,
            dim,
        })
    }

    pub fn from_f32(data: &[f32], n_samples: usize, dim: usize) -> Result<Self> {
        Self::new(data.iter().map(|&v| v as f64).collect(), n_samples, dim)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::input(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(data, rows.len(), dim)
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// SHA-256 over the shape and the little-endian bytes of every entry.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update((self.n_samples as u64).to_le_bytes());
        hasher.update((self.dim as u64).to_le_bytes());
        for v in &self.data {
            hasher.update(v.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Distinct row indices into a [`PointCloud`], in draw order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkSet {
    indices: Vec<usize>,
}

impl LandmarkSet {
    pub fn new(indices: Vec<usize>, cloud: &PointCloud) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::param("landmark set is empty"));
        }
        let mut seen = std::collections::HashSet::with_capacity(indices.len());
        for &i in &indices {
            if i >= cloud.n_samples() {
                return Err(Error::param(format!(
                    "landmark index {i} out of range for {} samples",
                    cloud.n_samples()
                )));
            }
            if !seen.insert(i) {
                return Err(Error::param(format!("duplicate landmark index {i}")));
            }
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Unsquared Euclidean distances, `n_landmarks × n_witnesses`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    data: Vec<f64>,
    n_landmarks: usize,
    n_witnesses: usize,
}

impl DistanceMatrix {
    /// Builds a matrix from raw distances; entries must be finite and non-negative.
    pub fn from_raw(data: Vec<f64>, n_landmarks: usize, n_witnesses: usize) -> Result<Self> {
        if data.len() != n_landmarks * n_witnesses {
            return Err(Error::input(format!(
                "buffer of length {} does not match shape {n_landmarks}x{n_witnesses}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::input("distances must be finite and non-negative"));
        }
        Ok(Self {
            data,
            n_landmarks,
            n_witnesses,
        })
    }

    #[inline]
    pub fn n_landmarks(&self) -> usize {
        self.n_landmarks
    }

    #[inline]
    pub fn n_witnesses(&self) -> usize {
        self.n_witnesses
    }

    #[inline]
    pub fn get(&self, landmark: usize, witness: usize) -> f64 {
        self.data[landmark * self.n_witnesses + witness]
    }

    /// Distances from one landmark to every witness.
    #[inline]
    pub fn row(&self, landmark: usize) -> &[f64] {
        &self.data[landmark * self.n_witnesses..(landmark + 1) * self.n_witnesses]
    }
}

/// Squared Euclidean distance with four independent accumulators so the
/// loop vectorizes.
#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            let t = x[k] - y[k];
            acc[k] += t * t;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        let t = x - y;
        tail += t * t;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `d[l][w] = ‖x_{L[l]} − x_w‖₂` for every landmark `l` and every sample `w`.
///
/// Costs `Θ(N·D·L₀)`; the witness set is the whole cloud.
pub fn pairwise_distances(landmarks: &LandmarkSet, cloud: &PointCloud) -> Result<DistanceMatrix> {
    check_landmarks(landmarks, cloud)?;
    let n = cloud.n_samples();
    let mut data = vec![0.0; landmarks.len() * n];
    for (row, &l) in data.chunks_exact_mut(n).zip(landmarks.indices()) {
        let anchor = cloud.row(l);
        for (out, x) in row.iter_mut().zip(cloud.rows()) {
            *out = squared_euclidean(anchor, x).sqrt();
        }
    }
    Ok(DistanceMatrix {
        data,
        n_landmarks: landmarks.len(),
        n_witnesses: n,
    })
}

/// Largest Euclidean distance between two landmarks; zero for a single
/// landmark or when every landmark coincides.
pub fn max_pairwise_distance(landmarks: &LandmarkSet, cloud: &PointCloud) -> f64 {
    let idx = landmarks.indices();
    let mut best = 0.0f64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            best = best.max(squared_euclidean(cloud.row(i), cloud.row(j)));
        }
    }
    best.sqrt()
}

/// Draws `l0` distinct rows uniformly without replacement.
///
/// Partial Fisher–Yates over a virtual identity permutation; only displaced
/// slots are materialized, so extra memory is `O(l0)`.
pub fn sample_landmarks<R: Rng + ?Sized>(
    cloud: &PointCloud,
    l0: usize,
    rng: &mut R,
) -> Result<LandmarkSet> {
    let n = cloud.n_samples();
    if l0 == 0 {
        return Err(Error::param("number of landmarks must be at least 1"));
    }
    if l0 > n {
        return Err(Error::param(format!(
            "dataset has {n} samples, too few for {l0} landmarks"
        )));
    }
    let mut displaced: HashMap<usize, usize> = HashMap::with_capacity(2 * l0);
    let mut indices = Vec::with_capacity(l0);
    for i in 0..l0 {
        let j = rng.random_range(i..n);
        let at_j = *displaced.get(&j).unwrap_or(&j);
        let at_i = *displaced.get(&i).unwrap_or(&i);
        displaced.insert(j, at_i);
        indices.push(at_j);
    }
    Ok(LandmarkSet { indices })
}

fn check_landmarks(landmarks: &LandmarkSet, cloud: &PointCloud) -> Result<()> {
    match landmarks.indices().iter().find(|&&i| i >= cloud.n_samples()) {
        Some(i) => Err(Error::param(format!(
            "landmark index {i} out of range for {} samples",
            cloud.n_samples()
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_distance(a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..a.len() {
            s += (a[k] - b[k]) * (a[k] - b[k]);
        }
        s.sqrt()
    }

    fn random_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        PointCloud::new(data, n, d).unwrap()
    }

    #[test]
    fn three_four_five() {
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let lm = LandmarkSet::new(vec![0], &cloud).unwrap();
        let d = pairwise_distances(&lm, &cloud).unwrap();
        assert_eq!(d.row(0), &[0.0, 5.0]);
    }

    #[test]
    fn landmark_to_itself_is_zero() {
        let cloud = random_cloud(10, 3, 1);
        let lm = LandmarkSet::new((0..10).collect(), &cloud).unwrap();
        let d = pairwise_distances(&lm, &cloud).unwrap();
        for l in 0..10 {
            assert_eq!(d.get(l, lm.indices()[l]), 0.0);
        }
    }

    #[test]
    fn matches_naive_double_loop() {
        let cloud = random_cloud(16, 8, 2);
        let lm = LandmarkSet::new(vec![3, 7, 0, 15], &cloud).unwrap();
        let d = pairwise_distances(&lm, &cloud).unwrap();
        for (l, &li) in lm.indices().iter().enumerate() {
            for w in 0..16 {
                let expect = naive_distance(cloud.row(li), cloud.row(w));
                let got = d.get(l, w);
                if expect == 0.0 {
                    assert_eq!(got, 0.0);
                } else {
                    assert!(((got - expect) / expect).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn max_distance_cases() {
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]]).unwrap();
        let one = LandmarkSet::new(vec![1], &cloud).unwrap();
        assert_eq!(max_pairwise_distance(&one, &cloud), 0.0);
        let all = LandmarkSet::new(vec![0, 1, 2], &cloud).unwrap();
        assert_eq!(max_pairwise_distance(&all, &cloud), 5.0);

        let cloud = random_cloud(200, 5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let lm = sample_landmarks(&cloud, 64, &mut rng).unwrap();
        let mut expect = 0.0f64;
        for &a in lm.indices() {
            for &b in lm.indices() {
                expect = expect.max(naive_distance(cloud.row(a), cloud.row(b)));
            }
        }
        assert!((max_pairwise_distance(&lm, &cloud) - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            PointCloud::new(vec![0.0, f64::NAN], 1, 2),
            Err(Error::InvalidInput(_))
        ));
        assert!(PointCloud::new(vec![f64::INFINITY], 1, 1).is_err());
        assert!(PointCloud::new(vec![], 0, 1).is_err());
    }

    #[test]
    fn sampling_exhaustive_and_deterministic() {
        let cloud = random_cloud(50, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut all = sample_landmarks(&cloud, 50, &mut rng).unwrap().indices().to_vec();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());

        let a = sample_landmarks(&cloud, 10, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = sample_landmarks(&cloud, 10, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
        assert!(LandmarkSet::new(a.indices().to_vec(), &cloud).is_ok());
    }

    #[test]
    fn sampling_too_many_landmarks() {
        let cloud = random_cloud(5, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_landmarks(&cloud, 6, &mut rng),
            Err(Error::Parameter(_))
        ));
        assert!(sample_landmarks(&cloud, 0, &mut rng).is_err());
    }

    #[test]
    fn sampling_is_uniform() {
        let (n, l0, reps) = (1000usize, 64usize, 100_000usize);
        let cloud = PointCloud::new(vec![0.0; n], n, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = vec![0u32; n];
        for _ in 0..reps {
            for &i in sample_landmarks(&cloud, l0, &mut rng).unwrap().indices() {
                counts[i] += 1;
            }
        }
        let p = l0 as f64 / n as f64;
        let mean = reps as f64 * p;
        let sigma = (reps as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - mean).abs() <= 5.0 * sigma,
                "index {i} drawn {c} times, expected {mean} ± {sigma}"
            );
        }
    }

    #[test]
    fn symmetry_and_triangle_inequality() {
        let cloud = random_cloud(60, 7, 6);
        for t in 0..20 {
            let (a, b, c) = (cloud.row(t), cloud.row(t + 20), cloud.row(t + 40));
            let ab = squared_euclidean(a, b).sqrt();
            assert_eq!(ab, squared_euclidean(b, a).sqrt());
            let ac = squared_euclidean(a, c).sqrt();
            let bc = squared_euclidean(b, c).sqrt();
            assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn isometry_invariance() {
        let cloud = random_cloud(40, 2, 7);
        let (c, s) = (0.6f64, 0.8f64);
        let moved: Vec<f64> = cloud
            .rows()
            .flat_map(|r| [c * r[0] - s * r[1] + 3.0, s * r[0] + c * r[1] - 1.5])
            .collect();
        let moved = PointCloud::new(moved, 40, 2).unwrap();
        let lm = LandmarkSet::new(vec![0, 5, 9, 31], &cloud).unwrap();
        let d0 = pairwise_distances(&lm, &cloud).unwrap();
        let d1 = pairwise_distances(&lm, &moved).unwrap();
        for l in 0..4 {
            for w in 0..40 {
                let (x, y) = (d0.get(l, w), d1.get(l, w));
                assert!((x - y).abs() <= 1e-9 * x.max(1.0));
            }
        }
    }
}
