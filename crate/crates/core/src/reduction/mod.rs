//! Graded boundary matrix of the filtration's 1-skeleton and its column
//! reduction.
//!
//! Every vertex is born at grade 0, so column `j` of the vertex-by-edge matrix
//! has entries `t^a_j` exactly on the edge's two endpoints. Adding an earlier
//! column `k` to `j` scales it by `t^(a_j - a_k)` first, which keeps all of
//! column `j`'s entries at grade `a_j`. The polynomial entries therefore never
//! need to be stored: a column is its grade plus a GF(2) support set, packed
//! into `u64` words so symmetric difference is a word-wise xor.
//!
//! [`reduce`] is the standard left-to-right reduction: a column repeatedly
//! absorbs the earlier surviving column that shares its lowest nonzero row
//! until it is empty or its low is unclaimed. [`reduce_parallel`] performs the
//! same additions in the same order and splits each inner sweep (the xor over
//! row words and the collision scan) across worker lanes.

mod lanes;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::barcode::{Barcode, Interval};
use crate::error::{Error, Result};
use crate::filtration::Filtration;

use lanes::{lane_range, with_lanes, Lanes};

const WORD_BITS: usize = 64;
const NO_LOW: u32 = u32::MAX;

/// Owned view of one matrix column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryColumn {
    pub grade: usize,
    /// Row indices with a nonzero entry, ascending.
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    n_rows: usize,
    words_per_col: usize,
    grades: Vec<usize>,
    words: Vec<u64>,
}

impl BoundaryMatrix {
    /// Builds a matrix from explicit columns. Supports must lie in `0..n_rows`
    /// and grades must be nondecreasing.
    pub fn from_columns(n_rows: usize, columns: &[BoundaryColumn]) -> Self {
        let mut m = Self::with_shape(n_rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                assert!(
                    col.grade >= columns[j - 1].grade,
                    "grades must be nondecreasing"
                );
            }
            m.grades.push(col.grade);
            for &row in &col.support {
                assert!(row < n_rows, "row {row} out of range");
                m.col_words_mut(j)[row / WORD_BITS] ^= 1 << (row % WORD_BITS);
            }
        }
        m
    }

    fn with_shape(n_rows: usize, n_cols: usize) -> Self {
        let words_per_col = n_rows.div_ceil(WORD_BITS);
        Self {
            n_rows,
            words_per_col,
            grades: Vec::with_capacity(n_cols),
            words: vec![0; n_cols * words_per_col],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.grades.len()
    }

    pub fn grade(&self, j: usize) -> usize {
        self.grades[j]
    }

    pub fn grades(&self) -> &[usize] {
        &self.grades
    }

    fn col_words(&self, j: usize) -> &[u64] {
        &self.words[j * self.words_per_col..(j + 1) * self.words_per_col]
    }

    fn col_words_mut(&mut self, j: usize) -> &mut [u64] {
        &mut self.words[j * self.words_per_col..(j + 1) * self.words_per_col]
    }

    pub fn is_zero(&self, j: usize) -> bool {
        self.col_words(j).iter().all(|&w| w == 0)
    }

    /// Largest row index in the support of column `j`.
    pub fn low(&self, j: usize) -> Option<usize> {
        let words = self.col_words(j);
        words
            .iter()
            .rposition(|&w| w != 0)
            .map(|i| i * WORD_BITS + (WORD_BITS - 1 - words[i].leading_zeros() as usize))
    }

    pub fn support(&self, j: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.col_words(j).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * WORD_BITS + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> BoundaryColumn {
        BoundaryColumn {
            grade: self.grades[j],
            support: self.support(j),
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = BoundaryColumn> + '_ {
        (0..self.n_cols()).map(|j| self.column(j))
    }

    /// `(low row, column)` for every nonzero column.
    pub fn pivot_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_cols())
            .filter_map(|j| self.low(j).map(|low| (low, j)))
            .collect()
    }

    /// Adds column `src` into column `dst` (`src < dst`).
    fn add_column(&mut self, src: usize, dst: usize) {
        debug_assert!(src < dst);
        let wpc = self.words_per_col;
        let (head, tail) = self.words.split_at_mut(dst * wpc);
        let source = &head[src * wpc..(src + 1) * wpc];
        for (d, s) in tail[..wpc].iter_mut().zip(source) {
            *d ^= s;
        }
    }
}

/// One column per filtration edge with support `{u, v}` and the edge's grade.
pub fn build_boundary_matrix(f: &Filtration, n: usize) -> BoundaryMatrix {
    try_build_boundary_matrix(f, n).expect("boundary matrix allocation")
}

/// Like [`build_boundary_matrix`], but reports allocation failure instead of
/// aborting.
pub fn try_build_boundary_matrix(f: &Filtration, n: usize) -> Result<BoundaryMatrix> {
    let words_per_col = n.div_ceil(WORD_BITS);
    let n_cols = f.len();
    let oom = || Error::OutOfMemory { n };
    let total = n_cols.checked_mul(words_per_col).ok_or_else(oom)?;
    let mut words = Vec::new();
    words.try_reserve_exact(total).map_err(|_| oom())?;
    words.resize(total, 0);
    let mut grades = Vec::new();
    grades.try_reserve_exact(n_cols).map_err(|_| oom())?;

    let mut m = BoundaryMatrix {
        n_rows: n,
        words_per_col,
        grades,
        words,
    };
    for (j, e) in f.edges().iter().enumerate() {
        assert!(
            e.u < e.v && e.v < n,
            "edge ({}, {}) outside {n} vertices",
            e.u,
            e.v
        );
        m.grades.push(e.grade);
        let col = m.col_words_mut(j);
        col[e.u / WORD_BITS] |= 1 << (e.u % WORD_BITS);
        col[e.v / WORD_BITS] |= 1 << (e.v % WORD_BITS);
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionOptions {
    /// Look up colliding columns through the claimed-low table. When off,
    /// every lookup scans all earlier columns instead.
    pub pivoting: bool,
    /// Worker lanes used by [`reduce_parallel`]; at least 1.
    pub workers: usize,
    /// Sweeps shorter than this many elements run on the coordinating lane.
    pub sweep_grain: usize,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            pivoting: true,
            workers: 1,
            sweep_grain: 4096,
        }
    }
}

impl ReductionOptions {
    pub fn with_pivoting(mut self, pivoting: bool) -> Self {
        self.pivoting = pivoting;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_sweep_grain(mut self, grain: usize) -> Self {
        self.sweep_grain = grain.max(1);
        self
    }
}

/// Work performed by one reduction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReductionStats {
    /// Column additions.
    pub additions: u64,
    /// Rows touched by those additions (`additions * n_rows`).
    pub row_ops: u64,
    /// Columns examined while looking for a collision.
    pub probes: u64,
}

impl ReductionStats {
    pub fn unit_ops(&self) -> u64 {
        self.row_ops + self.probes
    }
}

/// Reduction state shared by the serial and lane-parallel drivers.
struct Reducer {
    m: BoundaryMatrix,
    pivoting: bool,
    /// Column that claimed each row as its low.
    owner: Vec<usize>,
    /// Final low of each processed column, `NO_LOW` for zero columns.
    lows: Vec<u32>,
    stats: ReductionStats,
}

impl Reducer {
    fn new(m: BoundaryMatrix, pivoting: bool) -> Self {
        assert!(m.n_rows < NO_LOW as usize);
        Self {
            owner: vec![usize::MAX; m.n_rows],
            lows: vec![NO_LOW; m.n_cols()],
            m,
            pivoting,
            stats: ReductionStats::default(),
        }
    }

    fn lookup(
        &mut self,
        j: usize,
        low: usize,
        lanes: Option<(&Lanes<'_>, usize)>,
    ) -> Option<usize> {
        if self.pivoting {
            self.stats.probes += 1;
            let k = self.owner[low];
            return (k != usize::MAX).then_some(k);
        }
        self.stats.probes += j as u64;
        let target = low as u32;
        match lanes {
            Some((lanes, grain)) if lanes.count() > 1 && j >= grain => {
                scan_lanes(lanes, &self.lows[..j], target)
            }
            _ => scan(&self.lows[..j], target),
        }
    }

    fn add(&mut self, src: usize, dst: usize, lanes: Option<(&Lanes<'_>, usize)>) {
        self.stats.additions += 1;
        self.stats.row_ops += self.m.n_rows as u64;
        match lanes {
            Some((lanes, grain)) if lanes.count() > 1 && self.m.words_per_col >= grain => {
                xor_lanes(lanes, &mut self.m, src, dst)
            }
            _ => self.m.add_column(src, dst),
        }
    }

    fn run(&mut self, lanes: Option<(&Lanes<'_>, usize)>) {
        for j in 0..self.m.n_cols() {
            while let Some(low) = self.m.low(j) {
                match self.lookup(j, low, lanes) {
                    Some(k) => self.add(k, j, lanes),
                    None => {
                        self.owner[low] = j;
                        self.lows[j] = low as u32;
                        break;
                    }
                }
            }
        }
    }
}

/// Position of `target` in `lows`. Probes every entry; lows of surviving
/// columns are distinct so at most one matches.
fn scan(lows: &[u32], target: u32) -> Option<usize> {
    const CHUNK: usize = 64;
    let mut hit = None;
    for (c, chunk) in lows.chunks(CHUNK).enumerate() {
        if chunk.iter().fold(false, |acc, &l| acc | (l == target)) {
            let i = chunk.iter().position(|&l| l == target).unwrap();
            hit = Some(c * CHUNK + i);
        }
    }
    hit
}

fn scan_lanes(lanes: &Lanes<'_>, lows: &[u32], target: u32) -> Option<usize> {
    let found: Vec<AtomicUsize> = (0..lanes.count())
        .map(|_| AtomicUsize::new(usize::MAX))
        .collect();
    lanes.run(&|lane| {
        let r = lane_range(lows.len(), lanes.count(), lane);
        if let Some(i) = scan(&lows[r.clone()], target) {
            found[lane].store(r.start + i, Ordering::Relaxed);
        }
    });
    found
        .into_iter()
        .map(AtomicUsize::into_inner)
        .find(|&k| k != usize::MAX)
}

fn xor_lanes(lanes: &Lanes<'_>, m: &mut BoundaryMatrix, src: usize, dst: usize) {
    let wpc = m.words_per_col;
    let (head, tail) = m.words.split_at_mut(dst * wpc);
    let source = &head[src * wpc..(src + 1) * wpc];
    let mut rest = &mut tail[..wpc];
    let mut parts = Vec::with_capacity(lanes.count());
    for lane in 0..lanes.count() {
        let r = lane_range(wpc, lanes.count(), lane);
        let (part, remaining) = rest.split_at_mut(r.len());
        parts.push(Mutex::new(part));
        rest = remaining;
    }
    lanes.run(&|lane| {
        let r = lane_range(wpc, lanes.count(), lane);
        let mut part = parts[lane].lock().unwrap();
        for (d, s) in part.iter_mut().zip(&source[r]) {
            *d ^= s;
        }
    });
}

/// Left-to-right column reduction on one thread. `opts.workers` is ignored.
pub fn reduce(m: BoundaryMatrix, opts: &ReductionOptions) -> BoundaryMatrix {
    reduce_with_stats(m, opts).0
}

pub fn reduce_with_stats(
    m: BoundaryMatrix,
    opts: &ReductionOptions,
) -> (BoundaryMatrix, ReductionStats) {
    let mut r = Reducer::new(m, opts.pivoting);
    r.run(None);
    (r.m, r.stats)
}

/// Same additions as [`reduce`], with each inner sweep split across
/// `opts.workers` lanes. The column loop stays sequential.
pub fn reduce_parallel(m: BoundaryMatrix, opts: &ReductionOptions) -> BoundaryMatrix {
    reduce_parallel_with_stats(m, opts).0
}

pub fn reduce_parallel_with_stats(
    m: BoundaryMatrix,
    opts: &ReductionOptions,
) -> (BoundaryMatrix, ReductionStats) {
    let workers = opts.workers.max(1);
    if workers == 1 {
        return reduce_with_stats(m, opts);
    }
    let mut r = Reducer::new(m, opts.pivoting);
    with_lanes(workers, |lanes| {
        r.run(Some((lanes, opts.sweep_grain.max(1))))
    });
    (r.m, r.stats)
}

/// One finite bar per nonzero column of a reduced matrix, at that column's
/// grade. Every vertex not paired this way is an essential class.
pub fn extract_barcode(reduced: &BoundaryMatrix, f: &Filtration) -> Barcode {
    let finite: Vec<Interval> = (0..reduced.n_cols())
        .filter(|&j| !reduced.is_zero(j))
        .map(|j| {
            let grade = reduced.grade(j);
            Interval {
                death_grade: grade,
                death_length: f.length_of_grade(grade),
            }
        })
        .collect();
    Barcode {
        essential_count: reduced.n_rows() - finite.len(),
        finite,
    }
}
