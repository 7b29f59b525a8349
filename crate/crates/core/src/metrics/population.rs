use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::MetricError;
use crate::levels::Level;
use crate::scalar::{mean, Scalar};

/// Least-squares line `y = slope * x + intercept` with its correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearFit<T = f64> {
    pub pcc: T,
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub n: usize,
}

impl<T: Scalar> LinearFit<T> {
    /// The fit of a variable against itself.
    pub fn identity(n: usize) -> Self {
        LinearFit {
            pcc: T::one(),
            slope: T::one(),
            intercept: T::zero(),
            r_squared: T::one(),
            n,
        }
    }
}

/// Generated-vs-source fit for one target level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PopulationFit<T = f64> {
    pub target_level: Level,
    #[serde(flatten)]
    pub fit: LinearFit<T>,
}

struct Moments<T> {
    mean_x: T,
    mean_y: T,
    sxx: T,
    syy: T,
    sxy: T,
}

fn moments<T: Scalar>(xs: &[T], ys: &[T]) -> Result<Moments<T>, MetricError> {
    if xs.len() != ys.len() {
        return Err(MetricError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(MetricError::DegenerateInput("fewer than two points"));
    }
    let mean_x = mean(xs);
    let mean_y = mean(ys);
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
        sxy = sxy + dx * dy;
    }
    if sxx <= T::zero() || xs.iter().all(|&x| x == xs[0]) {
        return Err(MetricError::DegenerateInput("x is constant"));
    }
    if syy <= T::zero() || ys.iter().all(|&y| y == ys[0]) {
        return Err(MetricError::DegenerateInput("y is constant"));
    }
    Ok(Moments { mean_x, mean_y, sxx, syy, sxy })
}

fn clamp_unit<T: Scalar>(v: T) -> T {
    v.max(-T::one()).min(T::one())
}

/// Pearson product-moment correlation.
pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T, MetricError> {
    let m = moments(xs, ys)?;
    Ok(clamp_unit(m.sxy / (m.sxx.sqrt() * m.syy.sqrt())))
}

/// Ordinary least squares fit of `ys` on `xs`.
pub fn ols_fit<T: Scalar>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>, MetricError> {
    let m = moments(xs, ys)?;
    let slope = m.sxy / m.sxx;
    let intercept = m.mean_y - slope * m.mean_x;
    let ss_res: T = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = (T::one() - ss_res / m.syy).max(T::zero()).min(T::one());
    Ok(LinearFit {
        pcc: clamp_unit(m.sxy / (m.sxx.sqrt() * m.syy.sqrt())),
        slope,
        intercept,
        r_squared,
        n: xs.len(),
    })
}

/// 1-based ranks with ties given the average of the positions they span.
pub fn average_ranks<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share the mean of ranks i+1..=j
        let avg = T::count(i + 1 + j) / T::lit(2.0);
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}
