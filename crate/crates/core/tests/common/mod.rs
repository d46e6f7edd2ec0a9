#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wheelsense::dtw::{local_distance, DtwMode};
use wheelsense::features::MelMatrix;

/// Legal moves `(di, dj, weight)` into a grid point, independent of the DP.
pub fn moves(mode: DtwMode) -> &'static [(usize, usize, f64)] {
    match mode {
        DtwMode::Symmetric => &[(0, 1, 1.0), (1, 1, 2.0), (1, 0, 1.0)],
        DtwMode::Asymmetric => &[(0, 1, 1.0), (1, 1, 1.0), (2, 1, 1.0)],
    }
}

/// Minimum weighted cost over every monotone path from `(0, 0)` to the far
/// corner, by exhaustive enumeration. Infinite if no legal path exists.
pub fn exhaustive_dtw(w: &MelMatrix, x: &MelMatrix, mode: DtwMode) -> f64 {
    fn walk(w: &MelMatrix, x: &MelMatrix, mode: DtwMode, i: usize, j: usize, acc: f64, best: &mut f64) {
        if (i, j) == (w.frames() - 1, x.frames() - 1) {
            *best = best.min(acc);
            return;
        }
        for &(di, dj, weight) in moves(mode) {
            let (ni, nj) = (i + di, j + dj);
            if ni < w.frames() && nj < x.frames() {
                let d = local_distance(w.frame(ni), x.frame(nj)).unwrap();
                walk(w, x, mode, ni, nj, acc + weight * d, best);
            }
        }
    }
    let mut best = f64::INFINITY;
    let start = local_distance(w.frame(0), x.frame(0)).unwrap();
    walk(w, x, mode, 0, 0, start, &mut best);
    best
}

/// Cost of a given path under `mode`, or `None` if a step is illegal.
pub fn path_cost(w: &MelMatrix, x: &MelMatrix, mode: DtwMode, path: &[(usize, usize)]) -> Option<f64> {
    if path.first() != Some(&(0, 0)) || path.last() != Some(&(w.frames() - 1, x.frames() - 1)) {
        return None;
    }
    let mut cost = local_distance(w.frame(0), x.frame(0)).unwrap();
    for pair in path.windows(2) {
        let ((i0, j0), (i1, j1)) = (pair[0], pair[1]);
        let step = moves(mode)
            .iter()
            .find(|&&(di, dj, _)| i1.checked_sub(i0) == Some(di) && j1.checked_sub(j0) == Some(dj))?;
        cost += step.2 * local_distance(w.frame(i1), x.frame(j1)).unwrap();
    }
    Some(cost)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, channels: usize, frames: usize) -> MelMatrix {
    MelMatrix::from_frames(
        channels,
        (0..frames)
            .map(|_| (0..channels).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn same(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite() && a.signum() == b.signum()) || (a - b).abs() <= tol
}
