//! Step counts of the barcode pipeline on an abstract machine that executes
//! `P` unit operations per step.
//!
//! The reduction is modeled as `n - 1` sequential pivot rounds, each touching
//! the whole `K x n` grid of the boundary matrix (`K = n(n-1)/2` columns).
//! How a round is dispatched depends on which slice of the grid fits in `P`:
//!
//! | regime       | fits              | dispatches per round        | round cost |
//! |--------------|-------------------|-----------------------------|------------|
//! | `Element`    | `P >= n*K`        | one grid                    | 1          |
//! | `Row`        | `P >= K`          | one per row (`K` ops)       | `n`        |
//! | `Column`     | `P >= n`          | one per column (`n` ops)    | `K`        |
//! | `Sequential` | otherwise         | one per column              | `K*ceil(n/P)` |
//!
//! giving `O(n)`, `O(n^2)`, `O(n^3)` and `O(n^4)` reduction time. Pivot
//! search is not charged. Sorting is `K` chains of `ceil(log2 K)` compare
//! rounds, i.e. `max(ceil(K*ceil(log2 K)/P), ceil(log2 K))` steps.

use std::fmt;

use crate::cloud::generate_uniform_cloud;
use crate::error::{Error, Result};
use crate::filtration::{filtration_of, pair_count};
use crate::reduction::{build_boundary_matrix, reduce_with_stats, ReductionOptions};

/// Default lane count: about 10 TFLOPS at a 1 GHz clock.
pub const DEFAULT_WIDTH: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MachineProfile {
    width: u64,
}

impl MachineProfile {
    pub fn new(width: u64) -> Option<Self> {
        (width >= 1).then_some(Self { width })
    }

    pub fn width(&self) -> u64 {
        self.width
    }
}

impl Default for MachineProfile {
    fn default() -> Self {
        Self {
            width: DEFAULT_WIDTH,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepCount {
    pub distance: u64,
    pub sort: u64,
    pub build: u64,
    pub reduce: u64,
    pub extract: u64,
}

impl StepCount {
    pub fn total(&self) -> u64 {
        self.distance + self.sort + self.build + self.reduce + self.extract
    }

    fn stages(&self) -> [u64; 5] {
        [
            self.distance,
            self.sort,
            self.build,
            self.reduce,
            self.extract,
        ]
    }

    /// Every stage is `<=` the corresponding stage of `other`.
    pub fn dominated_by(&self, other: &StepCount) -> bool {
        self.stages()
            .iter()
            .zip(other.stages())
            .all(|(a, b)| *a <= b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Element,
    Row,
    Column,
    Sequential,
}

impl Regime {
    /// Growth exponent of the pipeline's run time in this regime.
    pub fn exponent(self) -> u32 {
        match self {
            Regime::Element => 1,
            Regime::Row => 2,
            Regime::Column => 3,
            Regime::Sequential => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Element => "ELEMENT",
            Regime::Row => "ROW",
            Regime::Column => "COLUMN",
            Regime::Sequential => "SEQUENTIAL",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Largest `n` that still runs in the row and column regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub n_row: u64,
    pub n_col: u64,
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

fn ceil_log2(k: u64) -> u64 {
    if k <= 1 {
        0
    } else {
        u64::from(64 - (k - 1).leading_zeros())
    }
}

struct Shape {
    n: u64,
    k: u64,
}

impl Shape {
    fn of(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Degenerate(n));
        }
        let n64 = n as u64;
        let k = n64.checked_mul(n64 - 1).ok_or(Error::StepOverflow(n))? / 2;
        Ok(Self { n: n64, k })
    }

    fn grid(&self) -> Option<u64> {
        self.n.checked_mul(self.k)
    }
}

fn regime_of(shape: &Shape, width: u64) -> Regime {
    match shape.grid() {
        Some(grid) if width >= grid => Regime::Element,
        _ if width >= shape.k => Regime::Row,
        _ if width >= shape.n => Regime::Column,
        _ => Regime::Sequential,
    }
}

pub fn classify_regime(n: usize, profile: &MachineProfile) -> Result<Regime> {
    Ok(regime_of(&Shape::of(n)?, profile.width))
}

pub fn regime_thresholds(profile: &MachineProfile) -> Thresholds {
    let p = profile.width;
    let fits = |n: u64| {
        n.checked_mul(n.saturating_sub(1))
            .is_some_and(|x| x / 2 <= p)
    };
    // n(n-1)/2 <= p  <=>  n <= (1 + sqrt(1 + 8p)) / 2
    let mut n = ((1 + 8u128 * p as u128).isqrt() as u64).div_ceil(2);
    while !fits(n) {
        n -= 1;
    }
    while fits(n + 1) {
        n += 1;
    }
    Thresholds { n_row: n, n_col: p }
}

/// Closed-form step counts for an `n`-point cloud.
pub fn predict_steps(n: usize, profile: &MachineProfile) -> Result<StepCount> {
    let shape = Shape::of(n)?;
    let p = profile.width;
    let overflow = || Error::StepOverflow(n);
    let k = shape.k;
    let log_k = ceil_log2(k);

    let round = match regime_of(&shape, p) {
        Regime::Element => 1,
        Regime::Row => shape.n * ceil_div(k, p),
        Regime::Column | Regime::Sequential => {
            k.checked_mul(ceil_div(shape.n, p)).ok_or_else(overflow)?
        }
    };
    Ok(StepCount {
        distance: ceil_div(k, p),
        sort: ceil_div(k.checked_mul(log_k).ok_or_else(overflow)?, p).max(log_k),
        build: ceil_div(k, p),
        reduce: (shape.n - 1).checked_mul(round).ok_or_else(overflow)?,
        extract: ceil_div(shape.n, p),
    })
}

/// A unit of scheduled work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Task {
    /// Independent unit operations.
    Batch(u64),
    /// `count` independent chains of `length` dependent operations each.
    Chains { count: u64, length: u64 },
}

/// Executes a task on `width` lanes one step at a time and returns the number
/// of steps taken.
fn execute(task: Task, width: u64) -> u64 {
    match task {
        Task::Batch(mut remaining) => {
            let mut steps = 0;
            while remaining > 0 {
                remaining -= remaining.min(width);
                steps += 1;
            }
            steps
        }
        Task::Chains { count, length } => {
            // Longest-remaining-first list scheduling. `open[r]` is the number
            // of chains with `r` operations left.
            let mut open = vec![0u64; length as usize + 1];
            if count == 0 || length == 0 {
                return 0;
            }
            open[length as usize] = count;
            let mut steps = 0;
            while open[1..].iter().any(|&c| c > 0) {
                let mut lanes = width;
                let mut carried = 0;
                for r in (1..=length as usize).rev() {
                    // chains advanced this step move down one level only
                    // after the level below has picked its own chains
                    let take = open[r].min(lanes);
                    open[r] += carried;
                    open[r] -= take;
                    carried = take;
                    lanes -= take;
                }
                open[0] += carried;
                steps += 1;
            }
            steps
        }
    }
}

/// Runs the pipeline's dispatch schedule through the step executor.
///
/// The grid shape is read off a real boundary matrix built from a seeded
/// `n`-point cloud; the schedule charges the full grid every round, so the
/// result never depends on the seed and always equals [`predict_steps`].
pub fn simulate_steps(n: usize, profile: &MachineProfile, seed: u64) -> Result<StepCount> {
    if n < 2 {
        return Err(Error::Degenerate(n));
    }
    let cloud = generate_uniform_cloud(n, 2, seed)?;
    let f = filtration_of(&cloud);
    let m = build_boundary_matrix(&f, n);
    let (rows, cols) = (m.n_rows() as u64, m.n_cols() as u64);
    let shape = Shape { n: rows, k: cols };
    let p = profile.width;

    let run_all = |tasks: &mut dyn Iterator<Item = Task>| tasks.map(|t| execute(t, p)).sum::<u64>();

    let distance = run_all(&mut std::iter::once(Task::Batch(cols)));
    let sort = run_all(&mut std::iter::once(Task::Chains {
        count: cols,
        length: ceil_log2(cols),
    }));
    let build = run_all(&mut std::iter::once(Task::Batch(cols)));

    let regime = regime_of(&shape, p);
    let mut reduce = 0;
    for _round in 1..rows {
        reduce += match regime {
            Regime::Element => execute(Task::Batch(rows * cols), p),
            Regime::Row => run_all(&mut (0..rows).map(|_| Task::Batch(cols))),
            Regime::Column | Regime::Sequential => {
                run_all(&mut (0..cols).map(|_| Task::Batch(rows)))
            }
        };
    }
    let extract = run_all(&mut std::iter::once(Task::Batch(rows)));

    Ok(StepCount {
        distance,
        sort,
        build,
        reduce,
        extract,
    })
}

/// Unit operations performed by the real reduction (default options) on a
/// seeded uniform cloud in the unit square: rows touched by column additions
/// plus collision probes.
pub fn count_actual_ops(n: usize, seed: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Degenerate(n));
    }
    let f = filtration_of(&generate_uniform_cloud(n, 2, seed)?);
    let m = build_boundary_matrix(&f, n);
    let (_, stats) = reduce_with_stats(m, &ReductionOptions::default());
    Ok(stats.unit_ops())
}

pub fn pairs(n: usize) -> u64 {
    pair_count(n) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn width(p: u64) -> MachineProfile {
        MachineProfile::new(p).unwrap()
    }

    #[test]
    fn three_points_sequential() {
        let s = predict_steps(3, &width(1)).unwrap();
        assert_eq!(s.reduce, 18);
        assert_eq!(s.distance, 3);
        assert_eq!(s.build, 3);
        assert_eq!(s.sort, 6);
        assert_eq!(s.extract, 3);
        assert_eq!(s.total(), 33);
    }

    #[test]
    fn three_points_full_width() {
        for p in [9, 10, 1_000_000] {
            assert_eq!(predict_steps(3, &width(p)).unwrap().reduce, 2);
        }
    }

    #[test]
    fn two_points() {
        let s = predict_steps(2, &width(1)).unwrap();
        assert_eq!(s.sort, 0);
        assert_eq!(s.reduce, 2);
        assert_eq!(simulate_steps(2, &width(1), 0).unwrap(), s);
    }

    #[test]
    fn degenerate_inputs() {
        for n in [0, 1] {
            assert_eq!(predict_steps(n, &width(1)), Err(Error::Degenerate(n)));
            assert_eq!(classify_regime(n, &width(1)), Err(Error::Degenerate(n)));
            assert_eq!(simulate_steps(n, &width(1), 0), Err(Error::Degenerate(n)));
            assert_eq!(count_actual_ops(n, 0), Err(Error::Degenerate(n)));
        }
        assert!(MachineProfile::new(0).is_none());
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(500, &width(1000)).unwrap(), Regime::Column);
        assert_eq!(classify_regime(3, &width(1)).unwrap(), Regime::Sequential);
        assert_eq!(
            classify_regime(10, &width(1_000_000)).unwrap(),
            Regime::Element
        );
        assert_eq!(classify_regime(10, &width(450)).unwrap(), Regime::Element);
        assert_eq!(classify_regime(10, &width(449)).unwrap(), Regime::Row);
        assert_eq!(classify_regime(10, &width(45)).unwrap(), Regime::Row);
        assert_eq!(classify_regime(10, &width(44)).unwrap(), Regime::Column);
        assert_eq!(classify_regime(10, &width(9)).unwrap(), Regime::Sequential);
    }

    #[test]
    fn thresholds() {
        assert_eq!(
            regime_thresholds(&width(1000)),
            Thresholds {
                n_row: 45,
                n_col: 1000
            }
        );
        assert_eq!(regime_thresholds(&width(11_175)).n_row, 150);
        assert_eq!(regime_thresholds(&width(11_174)).n_row, 149);
        assert_eq!(regime_thresholds(&width(1)).n_row, 2);
        assert_eq!(regime_thresholds(&width(u64::MAX)).n_col, u64::MAX);
    }

    #[test]
    fn thresholds_match_brute_force() {
        for p in 1..3000u64 {
            let brute = (2..)
                .take_while(|&n: &u64| n * (n - 1) / 2 <= p)
                .last()
                .unwrap();
            assert_eq!(regime_thresholds(&width(p)).n_row, brute, "p = {p}");
        }
    }

    #[test]
    fn ceil_log2_values() {
        let cases = [
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (1024, 10),
            (1025, 11),
        ];
        for (k, l) in cases {
            assert_eq!(ceil_log2(k), l, "k = {k}");
        }
    }

    #[test]
    fn chain_scheduler_matches_bound() {
        for count in 0..20 {
            for length in 0..6 {
                for p in 1..25 {
                    let expect = if count == 0 || length == 0 {
                        0
                    } else {
                        ceil_div(count * length, p).max(length)
                    };
                    assert_eq!(execute(Task::Chains { count, length }, p), expect);
                }
            }
        }
    }

    #[test]
    fn actual_ops_two_points() {
        assert_eq!(count_actual_ops(2, 5).unwrap(), 1);
    }

    proptest! {
        #[test]
        fn monotone_in_width(n in 2usize..200, p in 1u64..100_000, q in 1u64..100_000) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            let narrow = predict_steps(n, &width(lo)).unwrap();
            let wide = predict_steps(n, &width(hi)).unwrap();
            prop_assert!(wide.dominated_by(&narrow));
        }

        #[test]
        fn full_width_reduces_in_n_minus_one(n in 2usize..2000) {
            let grid = pairs(n) * n as u64;
            let s = predict_steps(n, &width(grid)).unwrap();
            prop_assert_eq!(s.reduce, n as u64 - 1);
        }

        #[test]
        fn simulate_equals_predict(n in 2usize..20, p in 1u64..5000, seed: u64) {
            prop_assert_eq!(simulate_steps(n, &width(p), seed).unwrap(), predict_steps(n, &width(p)).unwrap());
        }
    }
}
