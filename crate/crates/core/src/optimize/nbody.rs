//! Factorized N-body optima and sampling checks against the `n·J` bound.

use rayon::prelude::*;
use serde::Serialize;

use super::{maximize_reduced, OptimizationResult, DEFAULT_STARTS, TRIAL_STREAMS};
use crate::channel::{Limits, LowNoiseChannel};
use crate::error::{Error, Result};
use crate::fisher::leading_fisher_nbody;
use crate::state::{task_rng, PureState};

/// Values above `bound + VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct FactorizedOptimum {
    pub n: usize,
    #[serde(skip)]
    pub state: PureState,
    /// Leading coefficient of the n-site channel at `state`.
    pub value: f64,
    /// `n` times the single-site reduced optimum.
    pub bound: f64,
    pub reduced: OptimizationResult,
}

/// Joint dimension `(d²)^n` of n system-ancilla pairs, checked against the caps.
fn nbody_dim(d: usize, n: usize, limits: &Limits) -> Result<usize> {
    if n == 0 || n > limits.max_sites {
        return Err(Error::Domain(format!(
            "site count must be in 1..={}, got {n}",
            limits.max_sites
        )));
    }
    (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(d * d))
        .filter(|&dim| dim <= limits.max_dim)
        .ok_or_else(|| {
            Error::Dimension(format!(
                "{n} sites of dimension {d}² exceed the cap of {}",
                limits.max_dim
            ))
        })
}

/// Purifies the reduced optimum `ρ̃_opt` and tensors the purification over
/// `n` sites.
pub fn factorized_optimum_nbody(
    ch: &LowNoiseChannel,
    n: usize,
    seed: u64,
) -> Result<FactorizedOptimum> {
    nbody_dim(ch.dim(), n, &Limits::default())?;
    let reduced = maximize_reduced(ch, DEFAULT_STARTS, seed)?;
    let state = reduced.optimizer_density().purify()?.tensor_power(n);
    let value = leading_fisher_nbody(ch, &state, n)?.total;
    Ok(FactorizedOptimum {
        n,
        state,
        value,
        bound: n as f64 * reduced.optimum_value,
        reduced,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NoGainReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Single-site reduced optimum.
    pub site_optimum: f64,
    pub bound: f64,
    pub factorized_value: f64,
    /// Largest value over the random trials.
    pub max_observed: f64,
    pub min_observed: f64,
    /// `bound − max_observed`.
    pub gap: f64,
    /// Trials, plus the factorized optimum, exceeding `bound + VIOLATION_TOL`.
    pub violations: usize,
}

/// Samples `trials` Haar-random pure states of n system-ancilla pairs and
/// counts those whose leading coefficient exceeds `n` times the single-site
/// optimum. The factorized optimum is checked as well.
pub fn verify_no_entanglement_gain(
    ch: &LowNoiseChannel,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<NoGainReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::Domain(format!(
            "no-gain sampling needs 2 ≤ n ≤ 3, got {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let dim = nbody_dim(ch.dim(), n, &Limits::default())?;
    let factorized = factorized_optimum_nbody(ch, n, seed)?;
    let bound = factorized.bound;
    let values = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let psi = PureState::haar_random(dim, &mut task_rng(seed, TRIAL_STREAMS + t));
            leading_fisher_nbody(ch, &psi, n).map(|r| r.total)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_observed = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_observed = values.iter().copied().fold(f64::INFINITY, f64::min);
    let violations = values
        .iter()
        .chain(std::iter::once(&factorized.value))
        .filter(|&&v| v > bound + VIOLATION_TOL)
        .count();
    Ok(NoGainReport {
        n,
        trials,
        seed,
        site_optimum: factorized.reduced.optimum_value,
        bound,
        factorized_value: factorized.value,
        max_observed,
        min_observed,
        gap: bound - max_observed,
        violations,
    })
}
