//! Topology estimation for point clouds with randomized witness complexes.
//!
//! The pipeline samples landmarks from a dataset, builds a relaxed witness
//! filtration on them, reduces its boundary matrix to obtain a barcode and
//! summarizes the first-homology barcode as relative living times (RLT): the
//! fraction of the filtration range during which exactly `i` one-dimensional
//! holes are alive. Averaging over many landmark draws yields the mean RLT
//! (MRLT), a probability distribution over hole counts, and the squared L2
//! distance between two MRLT vectors is the geometry score.
//!
//! ```
//! use gscore_core::{generate_synthetic, run_rlt_experiments, map_betti, ExperimentConfig, Gamma, SyntheticSpec};
//!
//! let cloud = generate_synthetic(&SyntheticSpec::circle(1000, 0.0, 7)).unwrap();
//! let config = ExperimentConfig {
//!     l0: 16,
//!     gamma: Gamma::Fixed(0.125),
//!     i_max: 3,
//!     n: 20,
//!     seed: 1,
//! };
//! let rlt = run_rlt_experiments(&cloud, &config).unwrap();
//! assert_eq!(map_betti(&rlt.mean()), 1);
//! ```

pub mod data;
pub mod error;
pub mod geometry;
pub mod persistence;
pub mod pipeline;
pub mod rlt;
pub mod witness;

pub use data::io::{load_pointcloud, save_pointcloud, DataFormat};
pub use data::synth::{
    generate_synthetic, Shape, SyntheticSpec, DEFAULT_NOISY_CIRCLE_SIGMA, TWO_CIRCLES_SEPARATION,
};
pub use error::{Error, Result};
pub use geometry::{
    max_pairwise_distance, pairwise_distances, sample_landmarks, DistanceMatrix, LandmarkSet,
    PointCloud,
};
pub use persistence::{compute_persistence, Barcode, PersistenceInterval};
pub use pipeline::{
    compare_datasets, compare_datasets_with, experiment_rng, run_experiment, run_rlt_experiments,
    run_rlt_experiments_with, ExperimentConfig, ExperimentOutcome, Gamma, ResolvedConfig,
    RltMatrix, RunOptions,
};
pub use rlt::{
    betti_count, geometry_score, geometry_score_slices, map_betti, mean_rlt, rlt_from_barcode, rlt_from_intervals, MrltDistribution,
    RltVector,
};
pub use witness::{build_witness_filtration, FilteredSimplex, WitnessFiltration};
