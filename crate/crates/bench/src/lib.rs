//! Benchmark harness for `phbar-core`: seeded sweeps, power-law fits,
//! speedups, and CSV/SVG reports.

pub mod fit;
pub mod report;
pub mod sweep;

pub use fit::{fit_exponent, speedup, FitResult};
pub use report::{
    aggregate, emit_csv, emit_plot, parse_csv, series_points, SeriesKey, SeriesPoint,
};
pub use sweep::{derive_seed, run_sweep, BenchRecord, Measurement, Mode, SweepConfig};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("fit domain: {0}")]
    FitDomain(String),
    #[error("nothing to plot")]
    EmptyInput,
    #[error("invalid sweep: {0}")]
    Config(String),
    #[error("parse: {0}")]
    Parse(String),
}
