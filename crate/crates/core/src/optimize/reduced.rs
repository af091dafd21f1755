//! Projected gradient ascent of `F(ρ̃)` over density matrices.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    check_starts, sufficient_increase, summarize, OptimizationResult, OptimizerState, StartRun,
    CONVERGENCE_TOL, INITIAL_STEP, MAX_ITERATIONS, MIN_STEP, REDUCED_STREAMS, SHRINK,
};
use crate::channel::LowNoiseChannel;
use crate::error::Result;
use crate::fisher::LeadingFunctional;
use crate::matrix::{project_to_density, ComplexMatrix, ONE};
use crate::state::{complex_gaussian, task_rng, DensityMatrix};

/// Ginibre-distributed density matrix `GG†/Tr(GG†)`.
fn random_density(dim: usize, seed: u64, stream: u64) -> ComplexMatrix {
    let mut rng = task_rng(seed, stream);
    let g = ComplexMatrix::from_vec_unchecked(dim, dim, complex_gaussian(dim * dim, &mut rng));
    let w = g.matmul(&g.adjoint());
    w.scale_real(1.0 / w.trace().re).hermitize()
}

fn ascend(f: &LeadingFunctional, start: ComplexMatrix) -> Result<StartRun<ComplexMatrix>> {
    let mut rho = start;
    let mut value = f.reduced(&rho);
    let mut gradient_norm = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let g = f.reduced_gradient(&rho);
        let mut shifted = rho.clone();
        shifted.add_scaled(&g, ONE);
        gradient_norm = project_to_density(&shifted)?.distance(&rho);
        if gradient_norm <= CONVERGENCE_TOL {
            break;
        }
        iterations += 1;
        let mut step = INITIAL_STEP;
        let accepted = loop {
            let mut trial = rho.clone();
            trial.add_scaled(&g, Complex64::new(step, 0.0));
            let candidate = project_to_density(&trial)?;
            let mut delta = candidate.clone();
            delta.add_scaled(&rho, Complex64::new(-1.0, 0.0));
            let candidate_value = f.reduced(&candidate);
            if sufficient_increase(candidate_value, value, g.real_inner(&delta)) {
                break Some((candidate, candidate_value));
            }
            step *= SHRINK;
            if step < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((candidate, candidate_value)) => {
                rho = candidate;
                value = candidate_value;
            }
            None => break,
        }
    }
    Ok(StartRun {
        state: rho,
        value,
        iterations,
        gradient_norm,
        converged: gradient_norm <= CONVERGENCE_TOL,
    })
}

/// Maximizes `F(ρ̃) = Σ_β [Tr(ρ̃M†M) − |Tr(ρ̃M)|²]` over density matrices of
/// the system. `F` is concave, so every converged start reaches the global
/// optimum; the spread across starts is reported as a diagnostic.
pub fn maximize_reduced(
    ch: &LowNoiseChannel,
    starts: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    check_starts(starts)?;
    let f = LeadingFunctional::new(ch);
    let dim = ch.dim();
    let runs = (0..starts as u64)
        .into_par_iter()
        .map(|s| ascend(&f, random_density(dim, seed, REDUCED_STREAMS + s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(
        runs,
        |m| OptimizerState::Mixed(DensityMatrix::from_matrix_unchecked(m)),
        |s| match s {
            OptimizerState::Mixed(rho) => f.reduced(rho.matrix()),
            OptimizerState::Pure(phi) => f.pure(phi.amplitudes()),
        },
    ))
}
