//! Seeded Monte Carlo estimation of matrix-valued means with per-entry
//! error bars.
//!
//! Samples are indexed 0..count and generated from per-index ChaCha
//! streams, so the estimate is a pure function of (seed, count). Blocks of
//! fixed size are accumulated independently (in parallel via rayon) and
//! merged in index order. The reduction order is therefore fixed, and the
//! result is bitwise identical for any worker count.

use ndarray::Array2;
use rayon::prelude::*;

use crate::linalg::{frobenius_norm, zeros, CMat};

/// Fixed accumulation block; part of the determinism contract, so never
/// derive it from the thread count.
const BLOCK: usize = 4096;

/// Running per-entry mean and squared-deviation sums (Welford).
#[derive(Debug, Clone)]
struct Accumulator {
    count: usize,
    mean: CMat,
    m2_re: Array2<f64>,
    m2_im: Array2<f64>,
}

impl Accumulator {
    fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: zeros(dim),
            m2_re: Array2::zeros((dim, dim)),
            m2_im: Array2::zeros((dim, dim)),
        }
    }

    fn push(&mut self, sample: &CMat) {
        self.count += 1;
        let inv = 1.0 / self.count as f64;
        for ((i, j), m) in self.mean.indexed_iter_mut() {
            let x = sample[[i, j]];
            let delta = x - *m;
            *m += delta * inv;
            let delta2 = x - *m;
            self.m2_re[[i, j]] += delta.re * delta2.re;
            self.m2_im[[i, j]] += delta.im * delta2.im;
        }
    }

    /// Chan's pairwise merge; `self` takes the earlier index range.
    fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for ((i, j), m) in self.mean.indexed_iter_mut() {
            let delta = other.mean[[i, j]] - *m;
            *m += delta * (nb / n);
            self.m2_re[[i, j]] += other.m2_re[[i, j]] + delta.re * delta.re * na * nb / n;
            self.m2_im[[i, j]] += other.m2_im[[i, j]] + delta.im * delta.im * na * nb / n;
        }
        self.count = n as usize;
    }
}

/// Mean of a matrix-valued sampler together with per-entry standard
/// errors of the mean.
#[derive(Debug, Clone)]
pub struct MatrixEstimate {
    mean: CMat,
    se: Array2<f64>,
    count: usize,
}

impl MatrixEstimate {
    pub fn mean(&self) -> &CMat {
        &self.mean
    }

    /// Per-entry standard error: sqrt((var_re + var_im)/count).
    pub fn standard_errors(&self) -> &Array2<f64> {
        &self.se
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Largest per-entry deviation from `target` measured in units of the
    /// entry's standard error. Entries whose standard error vanishes only
    /// count when they actually deviate.
    pub fn max_sigma(&self, target: &CMat) -> f64 {
        let mut worst = 0.0f64;
        for ((i, j), m) in self.mean.indexed_iter() {
            let dev = (m - target[[i, j]]).norm();
            let se = self.se[[i, j]];
            if se > 0.0 {
                worst = worst.max(dev / se);
            } else if dev > 1e-14 {
                worst = f64::INFINITY;
            }
        }
        worst
    }

    /// Largest per-entry deviation from `target`.
    pub fn max_abs_deviation(&self, target: &CMat) -> f64 {
        crate::linalg::max_abs_diff(&self.mean, target)
    }

    /// Frobenius distance of the mean from `target`.
    pub fn frobenius_error(&self, target: &CMat) -> f64 {
        frobenius_norm(&(&self.mean - target))
    }

    /// Square root of the expected squared Frobenius error,
    /// sqrt(Σ_entries var/count).
    pub fn frobenius_se(&self) -> f64 {
        self.se.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

/// Averages `sampler(index)` over indices 0..count. The sampler must be a
/// pure function of the index (derive randomness from a per-index stream).
pub fn mean_of_matrix_samples<F>(dim: usize, count: usize, sampler: F) -> MatrixEstimate
where
    F: Fn(u64) -> CMat + Sync,
{
    let blocks = count.div_ceil(BLOCK);
    let partials: Vec<Accumulator> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Accumulator::new(dim);
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(count);
            for k in lo..hi {
                acc.push(&sampler(k as u64));
            }
            acc
        })
        .collect();

    let mut total = Accumulator::new(dim);
    for p in &partials {
        total.merge(p);
    }

    let n = total.count.max(1) as f64;
    let bessel = (total.count.max(2) - 1) as f64;
    let mut se = Array2::zeros((dim, dim));
    for ((i, j), s) in se.indexed_iter_mut() {
        let var = (total.m2_re[[i, j]] + total.m2_im[[i, j]]) / bessel;
        *s = (var / n).sqrt();
    }
    MatrixEstimate {
        mean: total.mean,
        se,
        count: total.count,
    }
}
