//! Fisher information of channel outputs.
//!
//! Exact values come from the symmetric logarithmic derivative (SLD) `L`
//! solving `∂_ε ρ = ½(Lρ + ρL)`, with `J = Tr[ρL²]`. Leading-order values are
//! the coefficient `c₁` of `J ≈ c₁/ε`, which depends only on the order-0 noise
//! operators `M_β` and the (reduced) input state:
//!
//! `c₁ = Σ_β [Tr(ρ̃ M_β†M_β) − |Tr(ρ̃ M_β)|²]`.

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::LowNoiseChannel;
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, partial_trace, partial_trace_pure, ComplexMatrix, ONE};
use crate::state::{DensityMatrix, PureState};

/// Pairs with `λ_i + λ_j ≤ SUPPORT_THRESHOLD·Tr ρ` are excluded from the SLD.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Largest admissible `|Tr ∂ρ|`.
pub const DRHO_TRACE_TOL: f64 = 1e-8;

/// Relative agreement required between the pair-sum and `Tr[ρL²]` forms of J.
pub const FORM_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SldResult {
    pub sld: ComplexMatrix,
    /// `Σ 2|⟨i|∂ρ|j⟩|²/(λ_i+λ_j)` over supported pairs.
    pub fisher: f64,
    /// `Tr[ρL²]`, computed independently from `sld`.
    pub fisher_trace_form: f64,
    pub support_dimension: usize,
    /// `‖∂ρ − ½(Lρ + ρL)‖_F` restricted to supported eigenpairs.
    pub residual: f64,
}

/// Symmetric logarithmic derivative of `rho` along `drho`.
pub fn sld(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<SldResult> {
    let rho_m = rho.matrix();
    if drho.rows() != rho.dim() || drho.cols() != rho.dim() {
        return Err(Error::Dimension(format!(
            "derivative is {}x{}, state has dimension {}",
            drho.rows(),
            drho.cols(),
            rho.dim()
        )));
    }
    if !drho.is_hermitian() {
        return Err(Error::Contract(format!(
            "state derivative is not Hermitian (defect {:.3e})",
            drho.hermitian_defect()
        )));
    }
    let tr = drho.trace().norm();
    if tr > DRHO_TRACE_TOL {
        return Err(Error::Contract(format!(
            "state derivative has trace {tr:.3e}; the family is not trace preserving"
        )));
    }

    let n = rho.dim();
    let eig = hermitian_eig(rho_m)?;
    let v = &eig.vectors;
    let tau = SUPPORT_THRESHOLD * rho_m.trace().re;
    // ∂ρ in the eigenbasis of ρ
    let d = v.adjoint().matmul(drho).matmul(v);

    let mut l_eig = ComplexMatrix::zeros(n, n);
    let mut fisher = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = eig.values[i] + eig.values[j];
            if s > tau {
                l_eig[(i, j)] = d[(i, j)] * (2.0 / s);
                fisher += 2.0 * d[(i, j)].norm_sqr() / s;
            }
        }
    }
    let sld = v.matmul(&l_eig).matmul(&v.adjoint()).hermitize();
    let fisher_trace_form = rho_m.trace_product(&sld.matmul(&sld)).re;

    let mut anti = sld.matmul(rho_m);
    anti.add_scaled(&rho_m.matmul(&sld), ONE);
    let mut mismatch = drho.clone();
    mismatch.add_scaled(&anti, Complex64::new(-0.5, 0.0));
    let mismatch = v.adjoint().matmul(&mismatch).matmul(v);
    let mut residual = 0.0;
    for i in 0..n {
        for j in 0..n {
            if eig.values[i] + eig.values[j] > tau {
                residual += mismatch[(i, j)].norm_sqr();
            }
        }
    }

    if (fisher - fisher_trace_form).abs() > FORM_AGREEMENT_TOL * fisher.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "SLD Fisher forms disagree: pair sum {fisher}, Tr[ρL²] {fisher_trace_form}"
        )));
    }

    Ok(SldResult {
        sld,
        fisher,
        fisher_trace_form,
        support_dimension: eig.values.iter().filter(|&&x| x > tau).count(),
        residual: residual.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FisherReport {
    pub eps: f64,
    pub exact_j: f64,
    /// Raw estimate `ε·J(ε)` of the leading coefficient.
    pub leading_coefficient: f64,
    /// `1/J`, absent when J vanishes.
    pub cramer_rao_bound: Option<f64>,
    pub trace_defect: f64,
}

/// Exact SLD Fisher information of `Γ_ε[input]` with respect to ε.
pub fn exact_fisher(ch: &LowNoiseChannel, input: &DensityMatrix, eps: f64) -> Result<FisherReport> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain(format!(
            "exact Fisher information needs ε > 0, got {eps}"
        )));
    }
    let out = ch.apply(input, eps)?;
    let drho = ch.derivative_output(input, eps)?;
    let j = sld(&out.state, &drho)?.fisher.max(0.0);
    Ok(FisherReport {
        eps,
        exact_j: j,
        leading_coefficient: eps * j,
        cramer_rao_bound: (j > 0.0).then(|| 1.0 / j),
        trace_defect: out.trace_defect,
    })
}

/// The leading-order functional `F(ρ) = Σ_β [Tr(ρ M_β†M_β) − |Tr(ρ M_β)|²]`
/// with the noise operators and `Σ M†M` cached.
#[derive(Clone, Debug)]
pub struct LeadingFunctional {
    ops: Vec<ComplexMatrix>,
    ops_adjoint: Vec<ComplexMatrix>,
    gram_sum: ComplexMatrix,
}

impl LeadingFunctional {
    pub fn new(ch: &LowNoiseChannel) -> Self {
        let ops: Vec<ComplexMatrix> = ch.noise_operators().into_iter().cloned().collect();
        let ops_adjoint: Vec<ComplexMatrix> = ops.iter().map(ComplexMatrix::adjoint).collect();
        let mut gram_sum = ComplexMatrix::zeros(ch.dim(), ch.dim());
        for (m, ma) in ops.iter().zip(&ops_adjoint) {
            gram_sum.add_scaled(&ma.matmul(m), ONE);
        }
        Self {
            ops,
            ops_adjoint,
            gram_sum: gram_sum.hermitize(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram_sum.rows()
    }

    pub fn is_trivial(&self) -> bool {
        self.ops.is_empty()
    }

    /// `F(ρ)` for a Hermitian matrix of matching dimension.
    pub fn reduced(&self, rho: &ComplexMatrix) -> f64 {
        let mut value = self.gram_sum.trace_product(rho).re;
        for m in &self.ops {
            value -= m.trace_product(rho).norm_sqr();
        }
        value
    }

    /// Euclidean gradient `Σ_β [M†M − (t̄_β M_β + t_β M_β†)]`, `t_β = Tr(ρ M_β)`.
    pub fn reduced_gradient(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut g = self.gram_sum.clone();
        for (m, ma) in self.ops.iter().zip(&self.ops_adjoint) {
            let t = m.trace_product(rho);
            g.add_scaled(m, -t.conj());
            g.add_scaled(ma, -t);
        }
        g.hermitize()
    }

    /// `G(φ) = Σ_β [⟨φ|M†M|φ⟩ − |⟨φ|M|φ⟩|²]` for a unit vector.
    pub fn pure(&self, phi: &[Complex64]) -> f64 {
        let mut value = self.gram_sum.expectation(phi, phi).re;
        for m in &self.ops {
            value -= m.expectation(phi, phi).norm_sqr();
        }
        value
    }

    /// Ambient gradient `2[Σ M†M φ − Σ_β (t̄_β M_β + t_β M_β†) φ]`, `t_β = ⟨φ|M_β|φ⟩`.
    pub fn pure_gradient(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let mut g = self.gram_sum.apply(phi);
        for (m, ma) in self.ops.iter().zip(&self.ops_adjoint) {
            let mphi = m.apply(phi);
            let t: Complex64 = phi.iter().zip(&mphi).map(|(a, b)| a.conj() * b).sum();
            let maphi = ma.apply(phi);
            for ((gi, a), b) in g.iter_mut().zip(&mphi).zip(&maphi) {
                *gi -= t.conj() * a + t * b;
            }
        }
        g.into_iter().map(|z| z * 2.0).collect()
    }
}

/// Leading coefficient for a pure input of the channel itself.
pub fn leading_fisher_pure(ch: &LowNoiseChannel, phi: &PureState) -> Result<f64> {
    if phi.dim() != ch.dim() {
        return Err(Error::Dimension(format!(
            "state has dimension {}, channel {}",
            phi.dim(),
            ch.dim()
        )));
    }
    Ok(LeadingFunctional::new(ch).pure(phi.amplitudes()))
}

/// Leading coefficient of the ancilla-assisted channel as a function of the
/// reduced system state `ρ̃ = Tr_A |Ψ⟩⟨Ψ|`.
pub fn leading_fisher_reduced(ch: &LowNoiseChannel, rho_tilde: &DensityMatrix) -> Result<f64> {
    if rho_tilde.dim() != ch.dim() {
        return Err(Error::Dimension(format!(
            "reduced state has dimension {}, channel {}",
            rho_tilde.dim(),
            ch.dim()
        )));
    }
    Ok(LeadingFunctional::new(ch).reduced(rho_tilde.matrix()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NBodyLeading {
    pub total: f64,
    pub per_site: Vec<f64>,
}

/// Per-site reduced system states `ρ̃_i` of a pure state on `(S⊗A)^{⊗n}`.
pub fn site_reduced_states(d: usize, psi: &PureState, n: usize) -> Result<Vec<DensityMatrix>> {
    let expected = (0..2 * n).try_fold(1usize, |acc, _| acc.checked_mul(d));
    if n == 0 || expected != Some(psi.dim()) {
        return Err(Error::Dimension(format!(
            "state of dimension {} does not live on (S⊗A)^{n} with dim S = dim A = {d}",
            psi.dim()
        )));
    }
    let dims = vec![d; 2 * n];
    (0..n)
        .map(|i| {
            let site = partial_trace_pure(psi.amplitudes(), &dims, &[2 * i, 2 * i + 1])?;
            let system = partial_trace(&site, &[d, d], &[0])?;
            Ok(DensityMatrix::from_matrix_unchecked(system.hermitize()))
        })
        .collect()
}

/// Leading coefficient of `(Γ_ε ⊗ id_A)^{⊗n}` for a pure input, as a sum of
/// single-site contributions.
pub fn leading_fisher_nbody(
    ch: &LowNoiseChannel,
    psi: &PureState,
    n: usize,
) -> Result<NBodyLeading> {
    let functional = LeadingFunctional::new(ch);
    let per_site: Vec<f64> = site_reduced_states(ch.dim(), psi, n)?
        .iter()
        .map(|rho| functional.reduced(rho.matrix()))
        .collect();
    Ok(NBodyLeading {
        total: per_site.iter().sum(),
        per_site,
    })
}

/// Extrapolates `ε·J(ε)` to ε → 0 with a least-squares line through the
/// sampled points, returning the intercept.
pub fn leading_from_exact(
    ch: &LowNoiseChannel,
    input: &DensityMatrix,
    eps_list: &[f64],
) -> Result<f64> {
    if eps_list.len() < 2 {
        return Err(Error::Domain(
            "extrapolation needs at least two ε values".into(),
        ));
    }
    if let Some(bad) = eps_list.iter().find(|&&e| !(e.is_finite() && e > 0.0)) {
        return Err(Error::Domain(format!(
            "extrapolation ε values must be positive, got {bad}"
        )));
    }
    let points = eps_list
        .iter()
        .map(|&eps| Ok((eps, exact_fisher(ch, input, eps)?.leading_coefficient)))
        .collect::<Result<Vec<_>>>()?;
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "extrapolation needs distinct ε values".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Ok(mean_y - (sxy / sxx) * mean_x)
}
