#![allow(dead_code)]

use lownoise::matrix::ComplexMatrix;
use lownoise::state::{complex_gaussian, task_rng, DensityMatrix, PureState};
use lownoise::{catalog, CatalogName, LowNoiseChannel};
use num_complex::Complex64;

pub mod bloch;

pub fn gaussian_matrix(dim: usize, seed: u64, stream: u64) -> ComplexMatrix {
    let mut rng = task_rng(seed, stream);
    ComplexMatrix::new(dim, dim, complex_gaussian(dim * dim, &mut rng)).unwrap()
}

pub fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    gaussian_matrix(dim, seed, 0).hermitize()
}

/// Full-rank Ginibre state.
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let g = gaussian_matrix(dim, seed, 1);
    let w = g.matmul(&g.adjoint());
    DensityMatrix::new(w.scale_real(1.0 / w.trace().re).hermitize()).unwrap()
}

pub fn random_pure(dim: usize, seed: u64) -> PureState {
    PureState::haar_random(dim, &mut task_rng(seed, 2))
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let h = random_hermitian(dim, seed);
    let eig = lownoise::matrix::hermitian_eig(&h).unwrap();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&x| Complex64::from_polar(1.0, x))
        .collect();
    let v = &eig.vectors;
    v.matmul(&ComplexMatrix::from_diag(&phases))
        .matmul(&v.adjoint())
}

pub const QUBIT_CATALOG: [CatalogName; 5] = [
    CatalogName::Identity,
    CatalogName::Depolarizing,
    CatalogName::AmplitudeDamping,
    CatalogName::PhaseFlip,
    CatalogName::RandomLowNoise { seed: 0 },
];

pub fn qubit_catalog() -> Vec<LowNoiseChannel> {
    QUBIT_CATALOG
        .iter()
        .map(|name| catalog(name, 2, 6).unwrap())
        .collect()
}
