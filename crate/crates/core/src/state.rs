//! Quantum states: validated density matrices and unit-norm kets.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, kron, kron_vec, partial_trace, ComplexMatrix, ONE, ZERO};

/// Tolerance on trace, norm and positivity when accepting user-supplied states.
pub const STATE_TOL: f64 = 1e-10;

/// Generator for task `stream` of a seeded experiment. Distinct streams are
/// independent, so results do not depend on execution order.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Vector of independent standard complex Gaussian entries.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_hermitian() {
            return Err(Error::Contract(format!(
                "density matrix is not Hermitian (defect {:.3e})",
                m.hermitian_defect()
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Contract(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let min_eig = hermitian_eig(&m)?.values.first().copied().unwrap_or(0.0);
        if min_eig < -STATE_TOL {
            return Err(Error::Contract(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(m.hermitize()))
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        Ok(PureState::basis(dim, k)?.density())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    /// ρ ⊗ σ
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self(kron(&self.0, &other.0)?))
    }

    /// Reduced state on the `keep` sites of a `dims`-factored space.
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        Ok(Self(partial_trace(&self.0, dims, keep)?.hermitize()))
    }

    /// Canonical purification Σ_k √λ_k |v_k⟩_S|k⟩_A on S⊗A, with the
    /// eigenpairs taken in descending eigenvalue order and an ancilla of the
    /// same dimension as the system.
    pub fn purify(&self) -> Result<PureState> {
        let d = self.dim();
        let eig = hermitian_eig(&self.0)?;
        let mut amplitudes = vec![ZERO; d * d];
        for (slot, k) in (0..d).rev().enumerate() {
            let weight = eig.values[k].max(0.0).sqrt();
            if weight == 0.0 {
                continue;
            }
            for s in 0..d {
                amplitudes[s * d + slot] += eig.vectors[(s, k)] * weight;
            }
        }
        PureState::normalized(amplitudes)
    }
}

/// Unit-norm complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<Complex64>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::Contract(format!(
                "state vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Self(amplitudes.into_iter().map(|z| z / norm).collect()))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Dimension(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        Ok(Self(v))
    }

    /// (1/√d) Σ_k |k⟩|k⟩ on a d×d bipartite space.
    pub fn maximally_entangled(dim: usize) -> Self {
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let mut v = vec![ZERO; dim * dim];
        for k in 0..dim {
            v[k * dim + k] = amp;
        }
        Self(v)
    }

    /// Haar-distributed state: normalized standard complex Gaussian vector.
    pub fn haar_random<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            if let Ok(s) = Self::normalized(complex_gaussian(dim, rng)) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(kron_vec(&self.0, &other.0))
    }

    /// `self` tensored with itself `n` times.
    pub fn tensor_power(&self, n: usize) -> Self {
        assert!(n >= 1, "tensor power requires n >= 1");
        (1..n).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&self.0))
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
