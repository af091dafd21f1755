//! Low-noise channels `Γ_ε[ρ] = Σ_α B_α ρ B_α† + ε Σ_β C_β ρ C_β†`, with every
//! Kraus factor held as a truncated polynomial in ε.
//!
//! The near-identity family `B_α(ε) = κ_α·1 − Σ_n N_α^{(n)} ε^n` and the noise
//! family `C_β(ε) = M_β + Σ_n M_β^{(n)} ε^n` are validated against the
//! completeness relation order by order (see [`LowNoiseChannel::validate`]).

mod catalog;
mod spec_file;

pub use catalog::{catalog, random_lownoise, CatalogName, CATALOG_NAMES};
pub use spec_file::{load_channel, BSeriesSpec, CSeriesSpec, ChannelSpecFile, MatrixSpec};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{kron, kron_all, ComplexMatrix, HERMITIAN_TOL, ONE};
use crate::series::OperatorSeries;
use crate::state::DensityMatrix;

/// Engineering limit on the size of each Kraus family.
pub const MAX_FAMILIES: usize = 64;

/// Tolerance on `|Σ|κ_α|² − 1|` and on `‖B_α(0) − κ_α·1‖_F`.
pub const KAPPA_TOL: f64 = 1e-10;

/// Largest ε accepted on a validation grid.
pub const MAX_VALIDATION_EPS: f64 = 0.1;

/// Grid used when a channel is validated implicitly (catalog, spec loader).
pub const DEFAULT_VALIDATION_GRID: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// Completeness tolerance `10·ε^{K+1} + 1e-12` at truncation order `order`.
pub fn completeness_tolerance(eps: f64, order: usize) -> f64 {
    10.0 * eps.powi(order as i32 + 1) + 1e-12
}

/// Caps applied when tensoring channels.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_sites: usize,
    pub max_dim: usize,
    pub max_families: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_sites: 3,
            max_dim: crate::matrix::DEFAULT_MAX_DIM,
            max_families: MAX_FAMILIES,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LowNoiseChannel {
    dim: usize,
    b_series: Vec<OperatorSeries>,
    c_series: Vec<OperatorSeries>,
    kappas: Vec<Complex64>,
    label: String,
    multi_defect_weight: Option<f64>,
}

/// Completeness residual at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub eps: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub label: String,
    pub truncation_order: usize,
    pub kappa_norm_defect: f64,
    pub identity_defects: Vec<f64>,
    pub completeness_residuals: Vec<ResidualPoint>,
    pub passed: bool,
}

/// Channel output with the pre-renormalization trace defect `|Tr − 1|`.
#[derive(Clone, Debug)]
pub struct ChannelOutput {
    pub state: DensityMatrix,
    pub trace_defect: f64,
}

impl LowNoiseChannel {
    /// Structural checks only (shapes, family counts); the physical
    /// conditions are reported by [`validate`](Self::validate).
    pub fn new(
        dim: usize,
        b_series: Vec<OperatorSeries>,
        c_series: Vec<OperatorSeries>,
        kappas: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension(
                "channel dimension must be positive".into(),
            ));
        }
        if b_series.is_empty() {
            return Err(Error::Dimension(
                "a low-noise channel needs at least one near-identity operator".into(),
            ));
        }
        if kappas.len() != b_series.len() {
            return Err(Error::Dimension(format!(
                "{} kappas supplied for {} near-identity operators",
                kappas.len(),
                b_series.len()
            )));
        }
        for (family, list) in [("b_series", &b_series), ("c_series", &c_series)] {
            if list.len() > MAX_FAMILIES {
                return Err(Error::Dimension(format!(
                    "{family} has {} operators, above the limit of {MAX_FAMILIES}",
                    list.len()
                )));
            }
            if let Some(i) = list.iter().position(|s| s.dim() != dim) {
                return Err(Error::Dimension(format!(
                    "{family}[{i}] has dimension {}, channel dimension is {dim}",
                    list[i].dim()
                )));
            }
        }
        Ok(Self {
            dim,
            b_series,
            c_series,
            kappas,
            label: label.into(),
            multi_defect_weight: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn b_series(&self) -> &[OperatorSeries] {
        &self.b_series
    }

    pub fn c_series(&self) -> &[OperatorSeries] {
        &self.c_series
    }

    pub fn kappas(&self) -> &[Complex64] {
        &self.kappas
    }

    /// Order-0 noise operators `M_β = C_β(0)`.
    pub fn noise_operators(&self) -> Vec<&ComplexMatrix> {
        self.c_series.iter().map(OperatorSeries::leading).collect()
    }

    /// Largest truncation order over all series.
    pub fn truncation_order(&self) -> usize {
        self.b_series
            .iter()
            .chain(&self.c_series)
            .map(OperatorSeries::order)
            .max()
            .unwrap_or(0)
    }

    /// For channels built by [`extend_nbody`](Self::extend_nbody): ‖c₂‖_F where
    /// `c₂ ε²` is the completeness mass of the dropped multi-defect Kraus terms.
    pub fn multi_defect_weight(&self) -> Option<f64> {
        self.multi_defect_weight
    }

    fn check_state_dim(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "state is {}x{}, channel `{}` acts on dimension {}",
                rho.rows(),
                rho.cols(),
                self.label,
                self.dim
            )));
        }
        Ok(())
    }

    /// `Σ B ρ B† + ε Σ C ρ C†` with no hermitization or renormalization.
    pub fn output_unnormalized(&self, rho: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix> {
        self.check_state_dim(rho)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.b_series {
            out.add_scaled(&b.evaluate(eps)?.sandwich(rho), ONE);
        }
        for c in &self.c_series {
            out.add_scaled(&c.evaluate(eps)?.sandwich(rho), Complex64::new(eps, 0.0));
        }
        Ok(out)
    }

    /// `ρ_out = Γ_ε[ρ]`, hermitized and renormalized to unit trace.
    pub fn apply(&self, rho: &DensityMatrix, eps: f64) -> Result<ChannelOutput> {
        let raw = self.output_unnormalized(rho.matrix(), eps)?.hermitize();
        let tr = raw.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::Numerical(format!(
                "channel output has non-positive trace {tr}"
            )));
        }
        Ok(ChannelOutput {
            state: DensityMatrix::from_matrix_unchecked(raw.scale_real(1.0 / tr)),
            trace_defect: (tr - 1.0).abs(),
        })
    }

    /// Exact ∂_ε of the truncated-series output, hermitized.
    pub fn derivative_output(&self, rho: &DensityMatrix, eps: f64) -> Result<ComplexMatrix> {
        let rho = rho.matrix();
        self.check_state_dim(rho)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.b_series {
            let (val, der) = (b.evaluate(eps)?, b.evaluate_derivative(eps)?);
            let term = der.sandwich_with(rho, &val);
            out.add_scaled(&term, ONE);
            out.add_scaled(&term.adjoint(), ONE);
        }
        let eps_c = Complex64::new(eps, 0.0);
        for c in &self.c_series {
            let (val, der) = (c.evaluate(eps)?, c.evaluate_derivative(eps)?);
            out.add_scaled(&val.sandwich(rho), ONE);
            let term = der.sandwich_with(rho, &val);
            out.add_scaled(&term, eps_c);
            out.add_scaled(&term.adjoint(), eps_c);
        }
        Ok(out.hermitize())
    }

    /// `‖Σ B†B + ε Σ C†C − 1‖_F`
    pub fn completeness_residual(&self, eps: f64) -> Result<f64> {
        let mut acc = ComplexMatrix::identity(self.dim).scale_real(-1.0);
        for b in &self.b_series {
            let v = b.evaluate(eps)?;
            acc.add_scaled(&v.adjoint().matmul(&v), ONE);
        }
        for c in &self.c_series {
            let v = c.evaluate(eps)?;
            acc.add_scaled(&v.adjoint().matmul(&v), Complex64::new(eps, 0.0));
        }
        Ok(acc.frobenius_norm())
    }

    /// Checks `Σ|κ_α|² = 1`, `B_α(0) = κ_α·1` and completeness on `eps_grid`.
    pub fn validate(&self, eps_grid: &[f64]) -> Result<ValidationReport> {
        if eps_grid.is_empty() {
            return Err(Error::Domain("validation grid is empty".into()));
        }
        if let Some(&bad) = eps_grid
            .iter()
            .find(|&&e| !(0.0..=MAX_VALIDATION_EPS).contains(&e))
        {
            return Err(Error::Domain(format!(
                "validation point {bad} outside [0, {MAX_VALIDATION_EPS}]"
            )));
        }
        let kappa_norm_defect = (self.kappas.iter().map(|k| k.norm_sqr()).sum::<f64>() - 1.0).abs();
        let id = ComplexMatrix::identity(self.dim);
        let identity_defects: Vec<f64> = self
            .b_series
            .iter()
            .zip(&self.kappas)
            .map(|(b, &k)| b.leading().distance(&id.scale(k)))
            .collect();
        let order = self.truncation_order();
        let completeness_residuals = eps_grid
            .iter()
            .map(|&eps| {
                Ok(ResidualPoint {
                    eps,
                    residual: self.completeness_residual(eps)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let passed = kappa_norm_defect <= KAPPA_TOL
            && identity_defects.iter().all(|&d| d <= KAPPA_TOL)
            && completeness_residuals
                .iter()
                .all(|p| p.residual <= completeness_tolerance(p.eps, order));
        Ok(ValidationReport {
            label: self.label.clone(),
            truncation_order: order,
            kappa_norm_defect,
            identity_defects,
            completeness_residuals,
            passed,
        })
    }

    /// `Γ_ε ⊗ id_A` with an ancilla of the same dimension: every coefficient X becomes X ⊗ 1_A.
    pub fn extend_ancilla(&self) -> Result<Self> {
        let id = ComplexMatrix::identity(self.dim);
        let lift = |s: &OperatorSeries| s.map_coefficients(|x| kron(x, &id));
        Ok(Self {
            dim: self.dim * self.dim,
            b_series: self.b_series.iter().map(lift).collect::<Result<_>>()?,
            c_series: self.c_series.iter().map(lift).collect::<Result<_>>()?,
            kappas: self.kappas.clone(),
            label: format!("{}+ancilla", self.label),
            multi_defect_weight: self.multi_defect_weight,
        })
    }

    pub fn extend_nbody(&self, n: usize) -> Result<Self> {
        self.extend_nbody_with(n, &Limits::default())
    }

    /// `Γ_ε^{⊗n}` in low-noise form. Near-identity operators are all n-fold
    /// products of B-series; the noise family collects the single-defect
    /// products with a C-series at one site and B-series elsewhere. Terms with
    /// two or more C factors are O(ε²) and are dropped; their weight is kept in
    /// [`multi_defect_weight`](Self::multi_defect_weight).
    pub fn extend_nbody_with(&self, n: usize, limits: &Limits) -> Result<Self> {
        if n == 0 || n > limits.max_sites {
            return Err(Error::Dimension(format!(
                "site count {n} outside 1..={}",
                limits.max_sites
            )));
        }
        let total_dim = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(self.dim));
        match total_dim {
            Some(d) if d <= limits.max_dim => {}
            _ => {
                return Err(Error::Dimension(format!(
                    "{}^{n} exceeds the dimension cap {}",
                    self.dim, limits.max_dim
                )))
            }
        }
        let n_b = self.b_series.len();
        let n_c = self.c_series.len();
        let b_count = n_b.pow(n as u32);
        let c_count = n * n_c * n_b.pow(n as u32 - 1);
        if b_count > limits.max_families || c_count > limits.max_families {
            return Err(Error::Dimension(format!(
                "{n}-site extension needs {b_count} near-identity and {c_count} noise operators, limit {}",
                limits.max_families
            )));
        }
        let order = self.truncation_order();
        let product = |factors: &[&OperatorSeries]| -> Result<OperatorSeries> {
            let mut acc = factors[0].with_order(order);
            for f in &factors[1..] {
                acc = acc.kron(f, order)?;
            }
            Ok(acc)
        };

        let mut b_series = Vec::with_capacity(b_count);
        let mut kappas = Vec::with_capacity(b_count);
        for tuple in index_tuples(n_b, n) {
            let factors: Vec<&OperatorSeries> = tuple.iter().map(|&a| &self.b_series[a]).collect();
            b_series.push(product(&factors)?);
            kappas.push(tuple.iter().map(|&a| self.kappas[a]).product());
        }

        let mut c_series = Vec::with_capacity(c_count);
        for site in 0..n {
            for beta in 0..n_c {
                for rest in index_tuples(n_b, n - 1) {
                    let mut others = rest.iter();
                    let factors: Vec<&OperatorSeries> = (0..n)
                        .map(|i| {
                            if i == site {
                                &self.c_series[beta]
                            } else {
                                &self.b_series[*others.next().expect("n−1 B indices")]
                            }
                        })
                        .collect();
                    c_series.push(product(&factors)?);
                }
            }
        }

        let mut nbody = Self::new(
            self.dim.pow(n as u32),
            b_series,
            c_series,
            kappas,
            format!("{}^{n}", self.label),
        )?;
        nbody.multi_defect_weight = Some(if n == 1 {
            0.0
        } else {
            self.pairwise_defect_weight(n)?
        });
        Ok(nbody)
    }

    /// ‖Σ_{i<j} P_i P_j‖_F with `P = Σ_β M_β†M_β` embedded at sites i and j.
    fn pairwise_defect_weight(&self, n: usize) -> Result<f64> {
        let id = ComplexMatrix::identity(self.dim);
        let mut p = ComplexMatrix::zeros(self.dim, self.dim);
        for m in self.noise_operators() {
            p.add_scaled(&m.adjoint().matmul(m), ONE);
        }
        let total = self.dim.pow(n as u32);
        let mut acc = ComplexMatrix::zeros(total, total);
        for i in 0..n {
            for j in (i + 1)..n {
                let factors: Vec<&ComplexMatrix> = (0..n)
                    .map(|k| if k == i || k == j { &p } else { &id })
                    .collect();
                acc.add_scaled(&kron_all(factors)?, ONE);
            }
        }
        Ok(acc.frobenius_norm())
    }

    /// Replaces the noise family by `C'_β = Σ_γ u_{βγ} C_γ` for a unitary `u`,
    /// an equivalent Kraus representation of the same channel.
    pub fn mix_noise_families(&self, u: &ComplexMatrix) -> Result<Self> {
        let k = self.c_series.len();
        if u.rows() != k || u.cols() != k {
            return Err(Error::Dimension(format!("mixing matrix must be {k}x{k}")));
        }
        let defect = u.adjoint().matmul(u).distance(&ComplexMatrix::identity(k));
        if defect > HERMITIAN_TOL * (k as f64).max(1.0) {
            return Err(Error::Contract(format!(
                "mixing matrix is not unitary (‖u†u − 1‖_F = {defect:.3e})"
            )));
        }
        let c_series = (0..k)
            .map(|beta| {
                let terms: Vec<(Complex64, &OperatorSeries)> = (0..k)
                    .map(|gamma| (u[(beta, gamma)], &self.c_series[gamma]))
                    .collect();
                OperatorSeries::linear_combination(&terms)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            c_series,
            ..self.clone()
        })
    }
}

/// All length-`len` tuples over `0..base`, first position slowest.
fn index_tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let count = base.pow(len as u32);
    (0..count)
        .map(|mut idx| {
            let mut t = vec![0; len];
            for slot in t.iter_mut().rev() {
                *slot = idx % base;
                idx /= base;
            }
            t
        })
        .collect()
}
