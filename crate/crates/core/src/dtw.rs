//! Dynamic time warping of feature sequences and minimum-distance word
//! classification.
//!
//! Grid point `(i, j)` pairs frame `i` of the first sequence `W` with frame
//! `j` of the second sequence `X`. Two recurrences are available:
//!
//! - [`DtwMode::Symmetric`]: predecessors `(i, j-1)`, `(i-1, j-1)` and
//!   `(i-1, j)`; the diagonal step adds twice the local distance.
//! - [`DtwMode::Asymmetric`]: every step advances `j` by one, from
//!   `(i, j-1)`, `(i-1, j-1)` or `(i-2, j-1)`, all with unit weight.
//!   Points `(i > 0, 0)` are unreachable.
//!
//! Both start at `(0, 0)` with the plain local distance. Among equal
//! candidates the first in the order listed wins.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::MelMatrix;
use crate::media_io::TemplateLibrary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DtwMode {
    #[default]
    Symmetric,
    Asymmetric,
}

/// Predecessor code stored per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// `(0, 0)`: path origin.
    Start,
    /// From `(i, j-1)`.
    Horizontal,
    /// From `(i-1, j-1)`.
    Diagonal,
    /// From `(i-1, j)`; symmetric mode only.
    Vertical,
    /// From `(i-2, j-1)`; asymmetric mode only.
    Skip,
    /// No legal path reaches this point.
    Unreachable,
}

impl Step {
    /// Predecessor of `(i, j)` under this step.
    pub fn predecessor(self, i: usize, j: usize) -> Option<(usize, usize)> {
        match self {
            Step::Horizontal => Some((i, j - 1)),
            Step::Diagonal => Some((i - 1, j - 1)),
            Step::Vertical => Some((i - 1, j)),
            Step::Skip => Some((i - 2, j - 1)),
            Step::Start | Step::Unreachable => None,
        }
    }

    /// Multiplier applied to the local distance of the destination point.
    pub fn weight(self, mode: DtwMode) -> f64 {
        match (self, mode) {
            (Step::Diagonal, DtwMode::Symmetric) => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtwResult {
    /// Accumulated distance at `(TW-1, TX-1)`; infinite if unreachable.
    pub distance: f64,
    /// Warping path from `(0, 0)` to `(TW-1, TX-1)`; empty if unreachable.
    pub path: Vec<(usize, usize)>,
    rows: usize,
    cols: usize,
    backpointers: Vec<Step>,
}

impl DtwResult {
    /// Predecessor code of grid point `(i, j)`.
    pub fn backpointer(&self, i: usize, j: usize) -> Step {
        self.backpointers[i * self.cols + j]
    }

    pub fn grid_size(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Euclidean distance between two feature vectors.
pub fn local_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::mismatch(
            format!("{} dimensions", a.len()),
            format!("{} dimensions", b.len()),
        ));
    }
    Ok(euclidean(a, b))
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Aligns `w` (rows, index `i`) against `x` (columns, index `j`).
pub fn dtw_distance(w: &MelMatrix, x: &MelMatrix, mode: DtwMode) -> Result<DtwResult> {
    if w.channels() != x.channels() {
        return Err(Error::mismatch(
            format!("{} channels", w.channels()),
            format!("{} channels", x.channels()),
        ));
    }
    let (rows, cols) = (w.frames(), x.frames());
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("DTW needs non-empty sequences"));
    }
    let d = |i: usize, j: usize| euclidean(w.frame(i), x.frame(j));

    let mut back = vec![Step::Unreachable; rows * cols];
    // two rolling columns of accumulated distance
    let mut prev = vec![f64::INFINITY; rows];
    let mut cur = vec![f64::INFINITY; rows];

    cur[0] = d(0, 0);
    back[0] = Step::Start;
    if mode == DtwMode::Symmetric {
        for i in 1..rows {
            cur[i] = cur[i - 1] + d(i, 0);
            back[i * cols] = Step::Vertical;
        }
    }

    for j in 1..cols {
        std::mem::swap(&mut prev, &mut cur);
        for i in 0..rows {
            let local = d(i, j);
            let mut best = (prev[i] + local, Step::Horizontal);
            let mut consider = |cost: f64, step: Step| {
                if cost < best.0 {
                    best = (cost, step);
                }
            };
            match mode {
                DtwMode::Symmetric => {
                    if i >= 1 {
                        consider(prev[i - 1] + 2.0 * local, Step::Diagonal);
                        consider(cur[i - 1] + local, Step::Vertical);
                    }
                }
                DtwMode::Asymmetric => {
                    if i >= 1 {
                        consider(prev[i - 1] + local, Step::Diagonal);
                    }
                    if i >= 2 {
                        consider(prev[i - 2] + local, Step::Skip);
                    }
                }
            }
            let (cost, step) = best;
            cur[i] = cost;
            back[i * cols + j] = if cost.is_finite() { step } else { Step::Unreachable };
        }
    }

    let distance = cur[rows - 1];
    let mut result = DtwResult {
        distance,
        path: Vec::new(),
        rows,
        cols,
        backpointers: back,
    };
    if distance.is_finite() {
        let (mut i, mut j) = (rows - 1, cols - 1);
        result.path.push((i, j));
        while let Some(p) = result.backpointer(i, j).predecessor(i, j) {
            (i, j) = p;
            result.path.push(p);
        }
        result.path.reverse();
        debug_assert_eq!(result.path[0], (0, 0));
    }
    Ok(result)
}

/// Outcome of matching one utterance against a template library.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: String,
    pub distance: f64,
    /// `(label, distance)` for every template, in library order.
    pub distances: Vec<(String, f64)>,
}

/// Nearest template by accumulated DTW distance; earlier library entries win
/// ties. The unknown utterance is the first DTW argument, the template the
/// second, so asymmetric mode consumes each template frame exactly once.
pub fn classify(unknown: &MelMatrix, library: &TemplateLibrary, mode: DtwMode) -> Result<Classification> {
    if library.is_empty() {
        return Err(Error::EmptyLibrary);
    }
    let distances = library
        .entries()
        .iter()
        .map(|(label, template)| {
            dtw_distance(unknown, template, mode).map(|r| (label.clone(), r.distance))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (k, (_, dist)) in distances.iter().enumerate() {
        if *dist < distances[best].1 {
            best = k;
        }
    }
    Ok(Classification {
        label: distances[best].0.clone(),
        distance: distances[best].1,
        distances,
    })
}
