//! Small weighted ε-samples for halfplane ranges in the plane.
//!
//! A balanced partition with low crossing number is built over the input
//! (cutting-based builders or ham-sandwich trees) and one random point is
//! kept per cell, weighted by the cell size. The crate also ships the
//! pieces: cuttings of weighted lines, arrangement trees, test sets, an
//! exact error oracle and a scan statistic for planted anomalies.
//!
//! Everything geometric is generic over [`Scalar`] (`f32` or `f64`).
//!
//! ```
//! use epsample::{data, epsilon_sample, exact_error, PartitionParams, Presample, SampleMethod, Tolerance64};
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let pts: Vec<epsample::Point64> = data::generate(data::Generator::Uniform, 2000, &mut rng);
//! let tol = Tolerance64::default();
//! let s = epsilon_sample(&pts, 50, SampleMethod::Ham, &PartitionParams::default(), Presample::Never, &mut rng, &tol)
//!     .unwrap();
//! assert!(exact_error(&pts, &s).unwrap() < 0.2);
//! ```

pub mod anomaly;
pub mod arrangement;
pub mod cutting;
pub mod data;
pub mod error;
pub mod evaluate;
pub mod geometry;
pub mod hamtree;
pub mod partition;
pub mod region;
pub mod render;
pub mod sampling;
pub mod scalar;
pub mod testset;

pub use anomaly::{phi, plant_anomaly, sample_labeled, scan_discrepancy, HalfPlane, LabeledPoints, PlantParams, ScanResult};
pub use arrangement::{ArrangementTree, CellKind};
pub use cutting::{create_cutting, create_cutting_in, Cutting, CuttingMetrics, CuttingOptions, WeightedLine};
pub use error::{Error, Result};
pub use evaluate::{approx_error, exact_error, EXACT_LIMIT};
pub use geometry::{
    classify, dualize_line, dualize_point, dualize_segment, line_through, segment_intersection, DoubleWedge, Line,
    Mode, Point, Segment, Side,
};
pub use hamtree::{approx_ham_sandwich, double_ham_tree, ham_tree, HamParams, HamTree};
pub use partition::{
    build_partition, ChanParams, MatParams, Partition, PartitionCell, PartitionMethod, PartitionParams,
};
pub use region::ConvexRegion;
pub use sampling::{epsilon_sample, k_for_epsilon, partition_sample, Presample, SampleMethod, WeightedSample};
pub use scalar::{approx_eq, Scalar, Tolerance};
pub use testset::{build_test_set, TestSet, TestSetConstants, TestSetMethod};

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type Line64 = Line<f64>;
pub type Line32 = Line<f32>;
pub type Segment64 = Segment<f64>;
pub type Segment32 = Segment<f32>;
pub type Tolerance64 = Tolerance<f64>;
pub type Tolerance32 = Tolerance<f32>;
pub type Partition64 = Partition<f64>;
pub type Partition32 = Partition<f32>;
pub type WeightedSample64 = WeightedSample<f64>;
pub type WeightedSample32 = WeightedSample<f32>;
