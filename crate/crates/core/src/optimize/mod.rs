//! Input-state optimization of the leading Fisher coefficient.
//!
//! [`maximize_reduced`] runs projected gradient ascent over density matrices
//! (the ancilla-assisted problem), [`maximize_pure`] runs Riemannian ascent
//! on the unit sphere (no ancilla). [`factorized_optimum_nbody`] builds the
//! factorized N-body optimum and [`verify_no_entanglement_gain`] samples
//! entangled inputs against the `n·J` bound.

mod nbody;
mod reduced;
mod sphere;

pub use nbody::{
    factorized_optimum_nbody, verify_no_entanglement_gain, FactorizedOptimum, NoGainReport,
};
pub use reduced::maximize_reduced;
pub use sphere::maximize_pure;

use serde::Serialize;

use crate::channel::LowNoiseChannel;
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, PureState};

/// Stop when the projected (or Riemannian) gradient norm falls below this.
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 10_000;
pub const DEFAULT_STARTS: usize = 32;

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-20;

/// Armijo test with a few ulps of slack, so steps near the optimum are not
/// rejected when the predicted increase is below rounding of the objective.
pub(crate) fn sufficient_increase(new: f64, old: f64, predicted: f64) -> bool {
    new >= old + ARMIJO * predicted - 16.0 * f64::EPSILON * (1.0 + old.abs())
}

/// Starts whose value is within this of the best count as ties; the first
/// converged one in start order is reported.
const TIE_TOL: f64 = 1e-12;

/// Pure optima at or below this leave the enhancement ratio undefined.
pub const RATIO_THRESHOLD: f64 = 1e-12;

// Random-number stream namespaces. Each task uses stream `namespace + index`.
pub(crate) const REDUCED_STREAMS: u64 = 0;
pub(crate) const PURE_STREAMS: u64 = 1 << 32;
pub(crate) const TRIAL_STREAMS: u64 = 2 << 32;

#[derive(Clone, Debug, PartialEq)]
pub enum OptimizerState {
    Mixed(DensityMatrix),
    Pure(PureState),
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    pub optimum_value: f64,
    #[serde(skip)]
    pub optimizer_state: OptimizerState,
    pub starts: usize,
    pub converged_starts: usize,
    pub iterations_per_start: Vec<usize>,
    /// Final value reached by each start.
    pub start_values: Vec<f64>,
    /// `max − min` of the final values over converged starts.
    pub value_spread: f64,
    pub gradient_norm_final: f64,
}

impl OptimizationResult {
    pub fn optimizer_density(&self) -> DensityMatrix {
        match &self.optimizer_state {
            OptimizerState::Mixed(rho) => rho.clone(),
            OptimizerState::Pure(phi) => phi.density(),
        }
    }
}

/// Outcome of a single start.
#[derive(Clone, Debug)]
pub(crate) struct StartRun<S> {
    pub state: S,
    pub value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

pub(crate) fn check_starts(starts: usize) -> Result<()> {
    if starts == 0 {
        return Err(Error::Domain(
            "at least one optimizer start is required".into(),
        ));
    }
    Ok(())
}

/// Collects per-start runs into a result. The best value wins; among ties the
/// first converged start is preferred.
pub(crate) fn summarize<S>(
    runs: Vec<StartRun<S>>,
    wrap: impl Fn(S) -> OptimizerState,
    evaluate: impl Fn(&OptimizerState) -> f64,
) -> OptimizationResult {
    let best = runs
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let chosen = runs
        .iter()
        .position(|r| r.converged && r.value >= best - TIE_TOL)
        .or_else(|| runs.iter().position(|r| r.value >= best - TIE_TOL))
        .unwrap_or(0);
    let converged: Vec<f64> = runs
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.value)
        .collect();
    let value_spread = if converged.is_empty() {
        0.0
    } else {
        converged.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - converged.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let starts = runs.len();
    let iterations_per_start = runs.iter().map(|r| r.iterations).collect();
    let start_values = runs.iter().map(|r| r.value).collect();
    let gradient_norm_final = runs[chosen].gradient_norm;
    let state = wrap(
        runs.into_iter()
            .nth(chosen)
            .expect("chosen index is in range")
            .state,
    );
    OptimizationResult {
        optimum_value: evaluate(&state),
        optimizer_state: state,
        starts,
        converged_starts: converged.len(),
        iterations_per_start,
        start_values,
        value_spread,
        gradient_norm_final,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnhancementReport {
    pub j_pure_max: f64,
    pub j_reduced_max: f64,
    /// `j_reduced_max / j_pure_max`, undefined when the pure optimum vanishes.
    pub ratio: Option<f64>,
}

/// Gain in the leading coefficient from an ancilla entangled with the probe.
pub fn enhancement_factor(
    ch: &LowNoiseChannel,
    starts: usize,
    seed: u64,
) -> Result<EnhancementReport> {
    let pure = maximize_pure(ch, starts, seed)?;
    let reduced = maximize_reduced(ch, starts, seed)?;
    Ok(enhancement_from(&pure, &reduced))
}

pub fn enhancement_from(
    pure: &OptimizationResult,
    reduced: &OptimizationResult,
) -> EnhancementReport {
    let (p, r) = (pure.optimum_value, reduced.optimum_value);
    EnhancementReport {
        j_pure_max: p,
        j_reduced_max: r,
        ratio: (p > RATIO_THRESHOLD).then(|| r / p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{catalog, CatalogName};

    fn ch(name: CatalogName) -> LowNoiseChannel {
        catalog(&name, 2, 6).unwrap()
    }

    #[test]
    fn enhancement_examples() {
        let r = enhancement_factor(&ch(CatalogName::Depolarizing), 8, 0).unwrap();
        assert!((r.j_pure_max - 2.0 / 3.0).abs() < 1e-9);
        assert!((r.j_reduced_max - 1.0).abs() < 1e-9);
        assert!((r.ratio.unwrap() - 1.5).abs() < 1e-9);

        let r = enhancement_factor(&ch(CatalogName::AmplitudeDamping), 8, 0).unwrap();
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-9);

        let r = enhancement_factor(&ch(CatalogName::Identity), 4, 0).unwrap();
        assert_eq!(r.ratio, None);
        assert_eq!(r.j_pure_max, 0.0);
    }

    #[test]
    fn zero_starts_is_rejected() {
        assert!(matches!(
            enhancement_factor(&ch(CatalogName::Depolarizing), 0, 0),
            Err(Error::Domain(_))
        ));
    }
}
