//! Real amplitude vectors: simulated single-shot measurement and the
//! amplification step used by quantum repair.

use crate::error::Error;

/// Squared cap on an amplified amplitude; keeps 1% escape probability.
pub const AMPLIFY_CAP_SQ: f64 = 0.99;
/// Minimum amplitude an amplified entry is raised to.
pub const AMPLIFY_FLOOR: f64 = 0.5;
/// Multiplicative boost applied to the target amplitude.
pub const AMPLIFY_FACTOR: f64 = 10.0;

/// Tolerance for unit-norm checks.
pub const NORM_TOL: f64 = 1e-9;

/// Unit-norm vector of real amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(Vec<f64>);

impl AmplitudeVector {
    pub fn new(amplitudes: Vec<f64>) -> Result<Self, Error> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("amplitudes", "empty vector"));
        }
        let drift = (norm_sq(&amplitudes) - 1.0).abs();
        if drift.is_nan() || drift > NORM_TOL {
            return Err(Error::invalid(
                "amplitudes",
                format!("squared norm is off by {drift:e}"),
            ));
        }
        Ok(Self(amplitudes))
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        Self(vec![1.0 / (dim as f64).sqrt(); dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.0.iter().map(|a| a * a).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// Outcome of a simulated projective measurement with uniform draw `u`:
/// the smallest index whose cumulative probability reaches `u`. Zero-amplitude
/// entries are never returned, so `u = 0` picks the first supported index.
pub fn sample_index(v: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (j, a) in v.iter().enumerate() {
        let p = a * a;
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = j;
        if acc >= u {
            return j;
        }
    }
    // rounding left the total just under u
    last
}

/// Boosts `v[target]` to `min(max(10|a|, 1/2), sqrt(0.99))` and rescales the
/// other entries proportionally so the vector stays unit-norm. Vectors whose
/// target already meets the cap are left alone.
pub fn amplify_in_place(v: &mut [f64], target: usize) {
    let cap = AMPLIFY_CAP_SQ.sqrt();
    let a = v[target].abs();
    if a >= cap {
        return;
    }
    let boosted = (AMPLIFY_FACTOR * a).max(AMPLIFY_FLOOR).min(cap);
    let residual = 1.0 - boosted * boosted;
    let rest: f64 = v
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target)
        .map(|(_, x)| x * x)
        .sum();
    if rest > 0.0 {
        let scale = (residual / rest).sqrt();
        for (i, x) in v.iter_mut().enumerate() {
            if i != target {
                *x *= scale;
            }
        }
    } else if v.len() > 1 {
        let each = (residual / (v.len() - 1) as f64).sqrt();
        for (i, x) in v.iter_mut().enumerate() {
            if i != target {
                *x = each;
            }
        }
    }
    v[target] = boosted;
}

pub fn amplify(v: &AmplitudeVector, target: usize) -> AmplitudeVector {
    let mut out = v.clone();
    amplify_in_place(&mut out.0, target);
    out
}
