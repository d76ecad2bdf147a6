//! Seeded benchmark sweeps over cloud sizes.
//!
//! Each `(n, workers, mode)` cell gets one untimed warm-up run, then `reps`
//! timed repetitions on fresh clouds. Timing covers the pipeline from pairwise
//! distances through barcode extraction; cloud generation is excluded.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use phbar_core::cloud::mix64;
use phbar_core::{
    compute_barcode, generate_uniform_cloud, predict_steps, MachineProfile, ReductionOptions,
};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Single-threaded reduction.
    Seq,
    /// Lane-parallel reduction with the configured worker count.
    Par,
    /// Step count predicted by the width-P cost model.
    Model,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Seq => "seq",
            Mode::Par => "par",
            Mode::Model => "model",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seq" => Ok(Mode::Seq),
            "par" => Ok(Mode::Par),
            "model" => Ok(Mode::Model),
            other => Err(BenchError::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    Seconds(f64),
    Steps(u64),
    /// The run could not complete (allocation failure, degenerate model input).
    Failed(String),
}

impl Measurement {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Measurement::Seconds(s) => Some(s),
            Measurement::Steps(s) => Some(s as f64),
            Measurement::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub workers: usize,
    pub mode: Mode,
    /// 1-based repetition index.
    pub rep: usize,
    pub seed: u64,
    pub value: Measurement,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub workers: usize,
    pub reps: usize,
    pub mode: Mode,
    pub seed: u64,
    pub dim: usize,
    pub pivoting: bool,
    pub profile: MachineProfile,
}

impl SweepConfig {
    pub fn new(n_values: Vec<usize>, workers: usize, reps: usize, mode: Mode, seed: u64) -> Self {
        Self {
            n_values,
            workers,
            reps,
            mode,
            seed,
            dim: 2,
            pivoting: true,
            profile: MachineProfile::default(),
        }
    }

    pub fn pivoting(mut self, pivoting: bool) -> Self {
        self.pivoting = pivoting;
        self
    }

    pub fn profile(mut self, profile: MachineProfile) -> Self {
        self.profile = profile;
        self
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.reps == 0 {
            return Err(BenchError::Config("reps must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(BenchError::Config("workers must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(BenchError::Config("n list is empty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BenchError::Config(
                "n list must be strictly ascending".into(),
            ));
        }
        Ok(())
    }
}

/// Per-repetition cloud seed.
pub fn derive_seed(seed: u64, n: usize, rep: usize) -> u64 {
    seed ^ mix64(((n as u64) << 32) | rep as u64)
}

fn run_once(cfg: &SweepConfig, n: usize, seed: u64) -> Measurement {
    if cfg.mode == Mode::Model {
        return match predict_steps(n, &cfg.profile) {
            Ok(steps) => Measurement::Steps(steps.total()),
            Err(e) => Measurement::Failed(e.to_string()),
        };
    }
    let cloud = match generate_uniform_cloud(n, cfg.dim, seed) {
        Ok(c) => c,
        Err(e) => return Measurement::Failed(e.to_string()),
    };
    let workers = if cfg.mode == Mode::Seq {
        1
    } else {
        cfg.workers
    };
    let opts = ReductionOptions::default()
        .with_pivoting(cfg.pivoting)
        .with_workers(workers);
    let start = Instant::now();
    let result = compute_barcode(black_box(&cloud), &opts);
    let elapsed = start.elapsed().as_secs_f64();
    match result {
        Ok(barcode) => {
            black_box(barcode);
            Measurement::Seconds(elapsed)
        }
        Err(e) => Measurement::Failed(e.to_string()),
    }
}

/// Runs the sweep and returns records in execution order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<BenchRecord>, BenchError> {
    cfg.validate()?;
    let workers = if cfg.mode == Mode::Seq {
        1
    } else {
        cfg.workers
    };
    let mut records = Vec::with_capacity(cfg.n_values.len() * cfg.reps);
    for &n in &cfg.n_values {
        if cfg.mode != Mode::Model {
            run_once(cfg, n, derive_seed(cfg.seed, n, 0));
        }
        for rep in 1..=cfg.reps {
            let seed = derive_seed(cfg.seed, n, rep);
            records.push(BenchRecord {
                n,
                workers,
                mode: cfg.mode,
                rep,
                seed,
                value: run_once(cfg, n, seed),
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_of_small_sweep() {
        let recs = run_sweep(&SweepConfig::new(vec![10], 1, 3, Mode::Seq, 5)).unwrap();
        assert_eq!(recs.len(), 3);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.n, 10);
            assert_eq!(r.rep, i + 1);
            assert!(matches!(r.value, Measurement::Seconds(s) if s > 0.0));
        }
        let seeds: std::collections::HashSet<_> = recs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 3);
    }

    #[test]
    fn model_mode_delegates() {
        let profile = MachineProfile::new(64).unwrap();
        let cfg = SweepConfig::new(vec![2, 16, 40], 1, 2, Mode::Model, 0).profile(profile);
        let recs = run_sweep(&cfg).unwrap();
        for r in &recs {
            let expect = predict_steps(r.n, &profile).unwrap().total();
            assert_eq!(r.value, Measurement::Steps(expect));
        }
        assert_eq!(run_sweep(&cfg).unwrap(), recs);
    }

    #[test]
    fn model_degenerate_is_a_failure_record() {
        let recs = run_sweep(&SweepConfig::new(vec![1, 3], 1, 1, Mode::Model, 0)).unwrap();
        assert!(matches!(recs[0].value, Measurement::Failed(_)));
        assert!(matches!(recs[1].value, Measurement::Steps(_)));
    }

    #[test]
    fn seq_records_one_worker() {
        let recs = run_sweep(&SweepConfig::new(vec![8], 4, 1, Mode::Seq, 0)).unwrap();
        assert_eq!(recs[0].workers, 1);
        let recs = run_sweep(&SweepConfig::new(vec![8], 3, 1, Mode::Par, 0)).unwrap();
        assert_eq!(recs[0].workers, 3);
    }

    #[test]
    fn bad_config() {
        let base = |n: Vec<usize>, reps| SweepConfig::new(n, 1, reps, Mode::Seq, 0);
        assert!(run_sweep(&base(vec![], 1)).is_err());
        assert!(run_sweep(&base(vec![5], 0)).is_err());
        assert!(run_sweep(&base(vec![5, 5], 1)).is_err());
        assert!(run_sweep(&base(vec![9, 5], 1)).is_err());
    }

    #[test]
    fn seeds_are_structural() {
        let a = run_sweep(&SweepConfig::new(vec![4, 6], 2, 2, Mode::Par, 11)).unwrap();
        let b = run_sweep(&SweepConfig::new(vec![4, 6], 2, 2, Mode::Par, 11)).unwrap();
        let key = |r: &BenchRecord| (r.n, r.workers, r.mode, r.rep, r.seed);
        assert_eq!(
            a.iter().map(key).collect::<Vec<_>>(),
            b.iter().map(key).collect::<Vec<_>>()
        );
        assert_eq!(a[0].seed, derive_seed(11, 4, 1));
    }
}
