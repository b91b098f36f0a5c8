use std::path::Path;

use gscore_core::data::npy;
use gscore_core::{generate_synthetic, load_pointcloud, save_pointcloud, DataFormat, Error, PointCloud, SyntheticSpec};
use proptest::prelude::*;

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn expected_five_by_three() -> Vec<f64> {
    let mut v: Vec<f64> = (0..15).map(|k| (k as f64 - 7.0) / 3.0).collect();
    v[0] = 1e-300;
    v[14] = -2.5e10;
    v
}

// Fixtures were written by NumPy's own `np.save`.
#[test]
fn reads_numpy_f8_fixture_exactly() {
    let cloud = load_pointcloud(&fixture("five_by_three_f8.npy"), DataFormat::Npy).unwrap();
    assert_eq!((cloud.n_samples(), cloud.dim()), (5, 3));
    assert_eq!(cloud.as_slice(), expected_five_by_three().as_slice());
}

#[test]
fn writer_matches_numpy_bytes() {
    let golden = std::fs::read(fixture("five_by_three_f8.npy")).unwrap();
    let cloud = PointCloud::new(expected_five_by_three(), 5, 3).unwrap();
    assert_eq!(npy::encode(&cloud), golden);
}

#[test]
fn reads_f4_and_vectors() {
    let cloud = load_pointcloud(&fixture("five_by_three_f4.npy"), DataFormat::Npy).unwrap();
    let expect: Vec<f64> = expected_five_by_three()
        .into_iter()
        .map(|v| v as f32 as f64)
        .collect();
    assert_eq!(cloud.as_slice(), expect.as_slice());

    let v = load_pointcloud(&fixture("vector_f8.npy"), DataFormat::Npy).unwrap();
    assert_eq!((v.n_samples(), v.dim()), (3, 1));
    assert_eq!(v.as_slice(), &[0.5, -1.0, 2.0]);
}

#[test]
fn csv_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "0,0\n3,4\n").unwrap();
    let c = load_pointcloud(&path, DataFormat::Csv).unwrap();
    assert_eq!(c.as_slice(), &[0.0, 0.0, 3.0, 4.0]);

    std::fs::write(&path, "0,0\nnan,4\n").unwrap();
    assert!(matches!(load_pointcloud(&path, DataFormat::Csv), Err(Error::InvalidInput(_))));

    let missing = dir.path().join("missing.csv");
    assert!(matches!(load_pointcloud(&missing, DataFormat::Csv), Err(Error::Io { .. })));

    std::fs::write(&path, "garbage").unwrap();
    assert!(matches!(load_pointcloud(&path, DataFormat::Npy), Err(Error::Format { .. })));
}

/// Rank by Gaussian elimination with partial pivoting, relative tolerance.
fn numerical_rank(rows: &[&[f64]]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let cols = m[0].len();
    let scale = m.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()));
    let tol = 1e-9 * scale;
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())) else {
            break;
        };
        if m[p][c].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let f = m[r][c] / m[rank][c];
            for k in c..cols {
                m[r][k] -= f * m[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn hyperplane_has_rank_32() {
    let cloud = generate_synthetic(&SyntheticSpec::hyperplane(5000, 32, 784, 3)).unwrap();
    assert_eq!((cloud.n_samples(), cloud.dim()), (5000, 784));
    let sample: Vec<&[f64]> = cloud.rows().take(120).collect();
    assert_eq!(numerical_rank(&sample), 32);
}

fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
    (1usize..12, 1usize..6).prop_flat_map(|(n, d)| {
        proptest::collection::vec(-1e6f64..1e6, n * d)
            .prop_map(move |data| PointCloud::new(data, n, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_identity(cloud in cloud_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        for (format, name) in [(DataFormat::Csv, "a.csv"), (DataFormat::Npy, "a.npy")] {
            let path = dir.path().join(name);
            save_pointcloud(&cloud, &path, format).unwrap();
            let back = load_pointcloud(&path, format).unwrap();
            prop_assert_eq!(&back, &cloud);
        }
    }
}
