//! Dynamic time warping.
//!
//! Fills the cumulative-distance table
//! `D(i,j) = min(D(i-1,j), D(i-1,j-1), D(i,j-1)) + d(i,j)` with
//! `D(0,0) = d(0,0)` and reports `D(I-1,J-1)`, the cost of the optimal
//! monotone alignment. An optional Sakoe-Chiba band of half-width `r`
//! restricts the search to cells with `|i - j| <= r`.

use serde::Serialize;
use thiserror::Error;

use crate::mfcc::FeatureMatrix;

#[derive(Debug, Error)]
pub enum DtwError {
    #[error("empty input sequence")]
    EmptyInput,
    #[error("feature dimension mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },
    #[error("incompatible features: fingerprint {left:#018x} vs {right:#018x}")]
    IncompatibleFeatures { left: u64, right: u64 },
    #[error("band radius {radius} cannot reach the terminal cell of a {rows}x{cols} grid")]
    InfeasibleBand { radius: usize, rows: usize, cols: usize },
}

/// Per-frame-pair dissimilarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    SquaredEuclidean,
    Manhattan,
}

/// How the global distance is scaled before it is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    /// Raw `D(I,J)`; comparable across templates of similar length.
    None,
    /// `D(I,J) / (I + J)`; removes the bias toward short templates.
    PathLengthAverage,
}

#[derive(Debug, Clone)]
pub struct DtwOptions {
    pub metric: Metric,
    /// Sakoe-Chiba half-width in frames; `None` leaves the grid unconstrained.
    pub band_radius: Option<usize>,
    pub normalize: Normalize,
    pub return_path: bool,
}

impl Default for DtwOptions {
    fn default() -> Self {
        Self {
            metric: Metric::Euclidean,
            band_radius: None,
            normalize: Normalize::None,
            return_path: false,
        }
    }
}

/// Outcome of one alignment.
#[derive(Debug, Clone, Serialize)]
pub struct DtwResult {
    /// Global cumulative distance, normalized per the options.
    pub distance: f64,
    /// Warp path from `(0,0)` to `(I-1,J-1)`, present when requested.
    /// Each step increments the first index, the second, or both by one.
    pub path: Option<Vec<(usize, usize)>>,
    /// Number of grid cells whose local distance was computed.
    pub cells_evaluated: u64,
}

/// Distance between two equal-dimension feature vectors.
pub fn local_distance(x: &[f64], y: &[f64], metric: Metric) -> Result<f64, DtwError> {
    if x.len() != y.len() {
        return Err(DtwError::ShapeMismatch { left: x.len(), right: y.len() });
    }
    Ok(local_distance_unchecked(x, y, metric))
}

fn local_distance_unchecked(x: &[f64], y: &[f64], metric: Metric) -> f64 {
    match metric {
        Metric::Euclidean => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        Metric::SquaredEuclidean => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum(),
        Metric::Manhattan => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
    }
}

/// Aligns two feature matrices and returns the global distance.
///
/// The matrices must be non-empty, share their feature dimension, and carry
/// the same config fingerprint (hand-built matrices all carry 0).
pub fn dtw_distance(
    a: &FeatureMatrix,
    b: &FeatureMatrix,
    opts: &DtwOptions,
) -> Result<DtwResult, DtwError> {
    if a.is_empty() || b.is_empty() {
        return Err(DtwError::EmptyInput);
    }
    if a.num_ceps() != b.num_ceps() {
        return Err(DtwError::ShapeMismatch { left: a.num_ceps(), right: b.num_ceps() });
    }
    if a.fingerprint() != b.fingerprint() {
        return Err(DtwError::IncompatibleFeatures {
            left: a.fingerprint(),
            right: b.fingerprint(),
        });
    }
    let rows = a.num_frames();
    let cols = b.num_frames();
    if let Some(radius) = opts.band_radius {
        if rows.abs_diff(cols) > radius {
            return Err(DtwError::InfeasibleBand { radius, rows, cols });
        }
    }
    let local = |i: usize, j: usize| local_distance_unchecked(a.row(i), b.row(j), opts.metric);
    let (raw, path, cells) = if opts.return_path {
        full_matrix_pass(rows, cols, opts.band_radius, &local)
    } else {
        two_row_pass(rows, cols, opts.band_radius, &local)
    };
    let distance = match opts.normalize {
        Normalize::None => raw,
        Normalize::PathLengthAverage => raw / (rows + cols) as f64,
    };
    Ok(DtwResult { distance, path, cells_evaluated: cells })
}

fn band_bounds(i: usize, cols: usize, radius: Option<usize>) -> (usize, usize) {
    match radius {
        Some(r) => (i.saturating_sub(r), i.saturating_add(r).min(cols - 1)),
        None => (0, cols - 1),
    }
}

fn two_row_pass(
    rows: usize,
    cols: usize,
    radius: Option<usize>,
    local: &dyn Fn(usize, usize) -> f64,
) -> (f64, Option<Vec<(usize, usize)>>, u64) {
    let mut prev = vec![f64::INFINITY; cols];
    let mut cur = vec![f64::INFINITY; cols];
    let mut cells = 0u64;
    for i in 0..rows {
        cur.fill(f64::INFINITY);
        let (lo, hi) = band_bounds(i, cols, radius);
        for j in lo..=hi {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(prev[j - 1]);
                }
                if i > 0 {
                    best = best.min(prev[j]);
                }
                if j > 0 {
                    best = best.min(cur[j - 1]);
                }
                best
            };
            if best.is_finite() {
                cur[j] = best + local(i, j);
                cells += 1;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (prev[cols - 1], None, cells)
}

fn full_matrix_pass(
    rows: usize,
    cols: usize,
    radius: Option<usize>,
    local: &dyn Fn(usize, usize) -> f64,
) -> (f64, Option<Vec<(usize, usize)>>, u64) {
    let mut table = vec![f64::INFINITY; rows * cols];
    let mut cells = 0u64;
    for i in 0..rows {
        let (lo, hi) = band_bounds(i, cols, radius);
        for j in lo..=hi {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(table[(i - 1) * cols + j - 1]);
                }
                if i > 0 {
                    best = best.min(table[(i - 1) * cols + j]);
                }
                if j > 0 {
                    best = best.min(table[i * cols + j - 1]);
                }
                best
            };
            if best.is_finite() {
                table[i * cols + j] = best + local(i, j);
                cells += 1;
            }
        }
    }
    let path = backtrack(&table, rows, cols);
    (table[rows * cols - 1], Some(path), cells)
}

/// Recomputes the argmin at each cell, walking from the terminal cell back
/// to the origin. Ties prefer the diagonal predecessor, then `(i, j-1)`,
/// then `(i-1, j)`, which keeps paths deterministic.
fn backtrack(table: &[f64], rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let at = |i: usize, j: usize| table[i * cols + j];
    let mut path = Vec::with_capacity(rows + cols);
    let (mut i, mut j) = (rows - 1, cols - 1);
    path.push((i, j));
    while i > 0 || j > 0 {
        let diag = if i > 0 && j > 0 { at(i - 1, j - 1) } else { f64::INFINITY };
        let left = if j > 0 { at(i, j - 1) } else { f64::INFINITY };
        let down = if i > 0 { at(i - 1, j) } else { f64::INFINITY };
        if diag <= left && diag <= down {
            i -= 1;
            j -= 1;
        } else if left <= down {
            j -= 1;
        } else {
            i -= 1;
        }
        path.push((i, j));
    }
    path.reverse();
    path
}
