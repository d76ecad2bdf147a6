//! 0th persistent homology of Euclidean point clouds.
//!
//! The pipeline is: pairwise distances, a sorted and graded edge filtration,
//! the graded vertex-by-edge boundary matrix, its column reduction, and the
//! barcode read off the surviving columns. [`oracle`] computes the same
//! barcode with Kruskal's algorithm, and [`parmodel`] predicts the pipeline's
//! step count on an abstract machine of configurable parallel width.
//!
//! ```
//! use phbar_core::{compute_barcode, PointCloud, ReductionOptions};
//!
//! let cloud = PointCloud::from_points(2, &[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]).unwrap();
//! let barcode = compute_barcode(&cloud, &ReductionOptions::default()).unwrap();
//! assert_eq!(barcode.death_lengths(), vec![1.0, 2.0]);
//! assert_eq!(barcode.essential_count, 1);
//! ```

pub mod barcode;
pub mod cloud;
pub mod error;
pub mod filtration;
pub mod oracle;
pub mod parmodel;
pub mod reduction;

pub use barcode::{Barcode, Interval};
pub use cloud::{generate_uniform_cloud, read_points, write_points, PointCloud};
pub use error::{Error, Result};
pub use filtration::{build_filtration, filtration_of, pairwise_distances, Edge, Filtration};
pub use oracle::{kruskal_barcode, mst_total_weight};
pub use parmodel::{
    classify_regime, count_actual_ops, predict_steps, regime_thresholds, simulate_steps,
    MachineProfile, Regime, StepCount,
};
pub use reduction::{
    build_boundary_matrix, extract_barcode, reduce, reduce_parallel, BoundaryMatrix,
    ReductionOptions,
};

/// Distances through barcode. Uses [`reduce_parallel`] when
/// `opts.workers > 1`.
pub fn compute_barcode(cloud: &PointCloud, opts: &ReductionOptions) -> Result<Barcode> {
    let f = filtration_of(cloud);
    let m = reduction::try_build_boundary_matrix(&f, cloud.len())?;
    let reduced = if opts.workers > 1 {
        reduce_parallel(m, opts)
    } else {
        reduce(m, opts)
    };
    Ok(extract_barcode(&reduced, &f))
}
