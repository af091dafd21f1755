//! Riemannian gradient ascent of `G(φ)` on the unit sphere.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    check_starts, sufficient_increase, summarize, OptimizationResult, OptimizerState, StartRun,
    CONVERGENCE_TOL, INITIAL_STEP, MAX_ITERATIONS, MIN_STEP, PURE_STREAMS, SHRINK,
};
use crate::channel::LowNoiseChannel;
use crate::error::Result;
use crate::fisher::LeadingFunctional;
use crate::state::{task_rng, PureState};

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Ambient gradient with the radial component removed.
fn tangent_gradient(f: &LeadingFunctional, phi: &[Complex64]) -> Vec<Complex64> {
    let g = f.pure_gradient(phi);
    let radial: f64 = phi.iter().zip(&g).map(|(a, b)| (a.conj() * b).re).sum();
    g.iter().zip(phi).map(|(gi, p)| gi - p * radial).collect()
}

fn ascend(f: &LeadingFunctional, start: PureState) -> StartRun<Vec<Complex64>> {
    let mut phi = start.amplitudes().to_vec();
    let mut value = f.pure(&phi);
    let mut gradient_norm = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let t = tangent_gradient(f, &phi);
        gradient_norm = norm(&t);
        if gradient_norm <= CONVERGENCE_TOL {
            break;
        }
        iterations += 1;
        let mut step = INITIAL_STEP;
        let accepted = loop {
            let moved: Vec<Complex64> = phi.iter().zip(&t).map(|(p, ti)| p + ti * step).collect();
            let scale = 1.0 / norm(&moved);
            let candidate: Vec<Complex64> = moved.into_iter().map(|z| z * scale).collect();
            let candidate_value = f.pure(&candidate);
            if sufficient_increase(candidate_value, value, step * gradient_norm * gradient_norm) {
                break Some((candidate, candidate_value));
            }
            step *= SHRINK;
            if step < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((candidate, candidate_value)) => {
                phi = candidate;
                value = candidate_value;
            }
            None => break,
        }
    }
    StartRun {
        state: phi,
        value,
        iterations,
        gradient_norm,
        converged: gradient_norm <= CONVERGENCE_TOL,
    }
}

/// Maximizes `G(φ) = Σ_β [⟨φ|M†M|φ⟩ − |⟨φ|M|φ⟩|²]` over unit vectors from
/// `starts` Haar-random initial states. `G` is not concave on the sphere, so
/// starts may end at different local optima.
pub fn maximize_pure(ch: &LowNoiseChannel, starts: usize, seed: u64) -> Result<OptimizationResult> {
    check_starts(starts)?;
    let f = LeadingFunctional::new(ch);
    let dim = ch.dim();
    let runs: Vec<_> = (0..starts as u64)
        .into_par_iter()
        .map(|s| {
            ascend(
                &f,
                PureState::haar_random(dim, &mut task_rng(seed, PURE_STREAMS + s)),
            )
        })
        .collect();
    Ok(summarize(
        runs,
        |v| OptimizerState::Pure(PureState::normalized(v).expect("ascent keeps unit vectors")),
        |s| match s {
            OptimizerState::Pure(phi) => f.pure(phi.amplitudes()),
            OptimizerState::Mixed(rho) => f.reduced(rho.matrix()),
        },
    ))
}
