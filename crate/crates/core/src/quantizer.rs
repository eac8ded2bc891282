//! Scalar quantizers for precoder outputs.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// `M` reproduction levels separated by `M - 1` thresholds. Outer cells are unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer<T> {
    boundaries: Vec<T>,
    levels: Vec<T>,
}

impl<T: Real> Quantizer<T> {
    pub fn new(boundaries: Vec<T>, levels: Vec<T>) -> Result<Self> {
        if levels.is_empty() || boundaries.len() + 1 != levels.len() {
            return Err(invalid(format!(
                "{} levels need {} boundaries, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        if levels.iter().chain(&boundaries).any(|v| !v.is_finite()) {
            return Err(invalid("quantizer values must be finite"));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) || levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("boundaries and levels must be strictly increasing"));
        }
        for (i, &c) in levels.iter().enumerate() {
            let above_lower = i == 0 || c >= boundaries[i - 1];
            let below_upper = i == boundaries.len() || c < boundaries[i];
            if !(above_lower && below_upper) {
                return Err(invalid(format!("level {i} = {c} lies outside its cell")));
            }
        }
        Ok(Self { boundaries, levels })
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// Index of the cell containing `x`; a value on a boundary belongs to the upper cell.
    pub fn cell(&self, x: T) -> usize {
        self.boundaries.partition_point(|&b| b <= x)
    }

    pub fn quantize(&self, x: T) -> T {
        self.levels[self.cell(x)]
    }

    /// Largest distance from a point of an interior cell to its level.
    pub fn max_interior_error(&self) -> T {
        (1..self.levels.len().saturating_sub(1))
            .map(|i| {
                let c = self.levels[i];
                (c - self.boundaries[i - 1]).max(self.boundaries[i] - c)
            })
            .fold(T::zero(), T::max)
    }
}

/// `M` equal cells on `[lo, hi]` with midpoint levels; values outside saturate.
pub fn uniform_quantizer<T: Real>(lo: T, hi: T, m: usize) -> Result<Quantizer<T>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!(
            "uniform quantizer needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    if m == 0 {
        return Err(invalid("quantizer needs at least one level"));
    }
    let width = (hi - lo) / T::from_usize_lossy(m);
    let half = T::lit(0.5);
    let levels = (0..m)
        .map(|i| lo + width * (T::from_usize_lossy(i) + half))
        .collect();
    let boundaries = (1..m)
        .map(|i| lo + width * T::from_usize_lossy(i))
        .collect();
    Quantizer::new(boundaries, levels)
}

/// Mean squared quantization error over `samples`.
pub fn distortion<T: Real>(q: &Quantizer<T>, samples: &[T]) -> Result<T> {
    if samples.is_empty() {
        return Err(invalid("distortion needs at least one sample"));
    }
    let total: T = samples
        .iter()
        .map(|&x| {
            let e = x - q.quantize(x);
            e * e
        })
        .sum();
    Ok(total / T::from_usize_lossy(samples.len()))
}

pub const LLOYD_TOL: f64 = 1e-6;
pub const LLOYD_MAX_ITER: usize = 500;

/// Result of a Lloyd run with its distortion history.
#[derive(Debug, Clone)]
pub struct LloydOutcome<T> {
    pub quantizer: Quantizer<T>,
    /// Distortion of the initial uniform quantizer followed by one entry per iteration.
    pub history: Vec<T>,
    pub reseeds: usize,
}

/// Lloyd iteration on empirical samples, started from the uniform quantizer on the
/// sample range.
pub fn lloyd<T: Real>(samples: &[T], m: usize, tol: T, max_iter: usize) -> Result<Quantizer<T>> {
    lloyd_with_history(samples, m, tol, max_iter).map(|o| o.quantizer)
}

pub fn lloyd_with_history<T: Real>(
    samples: &[T],
    m: usize,
    tol: T,
    max_iter: usize,
) -> Result<LloydOutcome<T>> {
    if m == 0 {
        return Err(invalid("quantizer needs at least one level"));
    }
    if samples.len() < 10 * m {
        return Err(invalid(format!(
            "Lloyd with M = {m} needs at least {} samples, got {}",
            10 * m,
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(invalid("non-finite training sample"));
    }
    let mut sorted: Vec<f64> = samples.iter().map(|x| x.to_f64_lossy()).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    prefix_sq.push(0.0);
    for &x in &sorted {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + x);
        prefix_sq.push(prefix_sq.last().copied().unwrap_or(0.0) + x * x);
    }
    let (lo, hi) = (sorted[0], sorted[n - 1]);

    // Degenerate source: a single point is reproduced exactly by any level on it.
    if lo == hi || m == 1 {
        let mean = prefix[n] / n as f64;
        let q = Quantizer::new(Vec::new(), vec![T::lit(mean)])?;
        let d = distortion(&q, samples)?;
        return Ok(LloydOutcome {
            quantizer: if m == 1 { q } else { spread_levels(mean, m)? },
            history: vec![d],
            reseeds: 0,
        });
    }

    let width = (hi - lo) / m as f64;
    let mut levels: Vec<f64> = (0..m).map(|i| lo + width * (i as f64 + 0.5)).collect();
    let mut bounds: Vec<f64> = (1..m).map(|i| lo + width * i as f64).collect();
    let cell_cost = |a: usize, b: usize, c: f64| -> f64 {
        // sum over sorted[a..b] of (x - c)^2
        let cnt = (b - a) as f64;
        (prefix_sq[b] - prefix_sq[a]) - 2.0 * c * (prefix[b] - prefix[a]) + cnt * c * c
    };
    let edges = |bounds: &[f64]| -> Vec<usize> {
        let mut e = Vec::with_capacity(bounds.len() + 2);
        e.push(0);
        e.extend(bounds.iter().map(|&b| sorted.partition_point(|&x| x < b)));
        e.push(n);
        e
    };
    let total_cost = |levels: &[f64], e: &[usize]| -> f64 {
        (0..levels.len())
            .map(|i| cell_cost(e[i], e[i + 1], levels[i]).max(0.0))
            .sum::<f64>()
            / n as f64
    };

    let mut e = edges(&bounds);
    let mut history = vec![T::lit(total_cost(&levels, &e))];
    let mut prev = total_cost(&levels, &e);
    let mut reseeds = 0usize;
    let tol = tol.to_f64_lossy();
    for _ in 0..max_iter {
        // Centroid step.
        for i in 0..m {
            let (a, b) = (e[i], e[i + 1]);
            if b > a {
                levels[i] = (prefix[b] - prefix[a]) / (b - a) as f64;
            }
        }
        // Empty cells: move the level into the most populated cell's sample extent.
        for i in 0..m {
            if e[i + 1] > e[i] {
                continue;
            }
            let big = (0..m).max_by_key(|&j| e[j + 1] - e[j]).unwrap_or(0);
            let (a, b) = (e[big], e[big + 1]);
            let mid = 0.5 * (sorted[a] + sorted[b - 1]);
            log::warn!("Lloyd: empty cell {i} re-seeded at {mid:.6e}");
            levels[i] = mid;
            reseeds += 1;
        }
        levels.sort_by(f64::total_cmp);
        dedup_levels(&mut levels);
        for i in 0..m - 1 {
            bounds[i] = 0.5 * (levels[i] + levels[i + 1]);
        }
        e = edges(&bounds);
        let d = total_cost(&levels, &e);
        history.push(T::lit(d));
        let change = (prev - d).abs() / prev.max(f64::MIN_POSITIVE);
        prev = d;
        if change < tol {
            break;
        }
    }
    let quantizer = Quantizer::new(
        bounds.iter().map(|&b| T::lit(b)).collect(),
        levels.iter().map(|&c| T::lit(c)).collect(),
    )?;
    Ok(LloydOutcome {
        quantizer,
        history,
        reseeds,
    })
}

/// Nudges coincident levels apart so the reproduction set stays strictly increasing.
fn dedup_levels(levels: &mut [f64]) {
    for i in 1..levels.len() {
        if levels[i] <= levels[i - 1] {
            let step = levels[i - 1].abs().max(1.0) * 1e-9;
            levels[i] = levels[i - 1] + step;
        }
    }
}

fn spread_levels<T: Real>(center: f64, m: usize) -> Result<Quantizer<T>> {
    let step = center.abs().max(1.0) * 1e-9;
    let levels: Vec<f64> = (0..m)
        .map(|i| center + step * (i as f64 - (m - 1) as f64 / 2.0))
        .collect();
    let bounds = levels
        .windows(2)
        .map(|w| T::lit(0.5 * (w[0] + w[1])))
        .collect();
    Quantizer::new(bounds, levels.iter().map(|&c| T::lit(c)).collect())
}
