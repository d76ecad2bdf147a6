//! Point clouds: the input to the barcode pipeline.
//!
//! Clouds are either parsed from a small text format (one point per line,
//! comma or whitespace separated, `#` comments) or generated from a seeded
//! SplitMix64 stream so that every implementation of the pipeline sees the
//! same coordinates for the same seed.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// `n` points in `dim`-dimensional Euclidean space, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn empty(dim: usize) -> Result<Self> {
        Self::from_flat(dim, Vec::new())
    }

    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                line: coords.len() / dim + 1,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                line: pos / dim + 1,
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    line: i + 1,
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator (Steele, Lea and Flood).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on the open interval (0, 1): top 53 bits over 2^53, zeros skipped.
    pub fn next_open01(&mut self) -> f64 {
        loop {
            let bits = self.next_u64() >> 11;
            if bits != 0 {
                return bits as f64 * (1.0 / (1u64 << 53) as f64);
            }
        }
    }
}

/// The SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` points with i.i.d. uniform (0,1) coordinates, drawn point by point.
pub fn generate_uniform_cloud(n: usize, dim: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = SplitMix64::new(seed);
    let coords = (0..n * dim).map(|_| rng.next_open01()).collect();
    PointCloud::from_flat(dim, coords)
}

/// Parses the point text format. Blank lines and lines starting with `#` are
/// skipped; every other line must carry the same number of coordinates.
pub fn read_points<R: BufRead>(reader: R) -> Result<PointCloud> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut found = 0;
        for token in trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: lineno,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { line: lineno });
            }
            coords.push(value);
            found += 1;
        }
        match dim {
            None => dim = Some(found),
            Some(expected) if expected != found => {
                return Err(Error::DimensionMismatch {
                    line: lineno,
                    expected,
                    found,
                })
            }
            Some(_) => {}
        }
    }
    // An empty file carries no dimension; report it as a 1-d empty cloud.
    PointCloud::from_flat(dim.unwrap_or(1), coords)
}

pub fn read_points_str(text: &str) -> Result<PointCloud> {
    read_points(text.as_bytes())
}

/// Inverse of [`read_points`]. Uses the shortest representation that parses
/// back to the same `f64`.
pub fn write_points(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        for (i, c) in p.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{c:?}").unwrap();
        }
        out.push('\n');
    }
    out
}
