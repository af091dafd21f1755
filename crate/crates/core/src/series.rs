//! Matrix-valued polynomials in the noise parameter ε.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix};

/// `Σ_{n=0}^{K} X_n ε^n` with square coefficients of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSeries {
    coefficients: Vec<ComplexMatrix>,
}

impl OperatorSeries {
    pub fn new(coefficients: Vec<ComplexMatrix>) -> Result<Self> {
        let first = coefficients.first().ok_or_else(|| {
            Error::Dimension("operator series needs at least the order-0 coefficient".into())
        })?;
        if !first.is_square() {
            return Err(Error::Dimension(format!(
                "series coefficients must be square, got {}x{}",
                first.rows(),
                first.cols()
            )));
        }
        let shape = (first.rows(), first.cols());
        if let Some(n) = coefficients
            .iter()
            .position(|c| (c.rows(), c.cols()) != shape)
        {
            return Err(Error::Dimension(format!(
                "coefficient of order {n} does not match the order-0 shape {shape:?}"
            )));
        }
        Ok(Self { coefficients })
    }

    /// ε-independent series.
    pub fn constant(m: ComplexMatrix) -> Result<Self> {
        Self::new(vec![m])
    }

    /// `Σ_n scalars[n] ε^n · base`.
    pub fn scalar_times(base: &ComplexMatrix, scalars: &[Complex64]) -> Result<Self> {
        Self::new(scalars.iter().map(|&s| base.scale(s)).collect())
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        Self {
            coefficients: vec![ComplexMatrix::zeros(dim, dim); order + 1],
        }
    }

    /// Truncation order K.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].rows()
    }

    pub fn coefficients(&self) -> &[ComplexMatrix] {
        &self.coefficients
    }

    /// Coefficient of ε^n, or `None` beyond the truncation order.
    pub fn coefficient(&self, n: usize) -> Option<&ComplexMatrix> {
        self.coefficients.get(n)
    }

    /// Value at ε = 0.
    pub fn leading(&self) -> &ComplexMatrix {
        &self.coefficients[0]
    }

    fn check_eps(eps: f64) -> Result<()> {
        if eps.is_finite() && eps >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "noise parameter must be finite and non-negative, got {eps}"
            )))
        }
    }

    /// Horner evaluation at `eps ≥ 0`.
    pub fn evaluate(&self, eps: f64) -> Result<ComplexMatrix> {
        Self::check_eps(eps)?;
        let mut iter = self.coefficients.iter().rev();
        let mut acc = iter.next().expect("non-empty series").clone();
        for c in iter {
            acc = acc.scale_real(eps);
            acc.add_scaled(c, Complex64::new(1.0, 0.0));
        }
        Ok(acc)
    }

    /// d/dε of the truncated polynomial at `eps ≥ 0`.
    pub fn evaluate_derivative(&self, eps: f64) -> Result<ComplexMatrix> {
        Self::check_eps(eps)?;
        let k = self.order();
        if k == 0 {
            return Ok(ComplexMatrix::zeros(self.dim(), self.dim()));
        }
        let mut acc = self.coefficients[k].scale_real(k as f64);
        for n in (1..k).rev() {
            acc = acc.scale_real(eps);
            acc.add_scaled(&self.coefficients[n], Complex64::new(n as f64, 0.0));
        }
        Ok(acc)
    }

    /// Same polynomial, zero-padded or truncated to order `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let dim = self.dim();
        let mut coefficients: Vec<ComplexMatrix> =
            self.coefficients.iter().take(order + 1).cloned().collect();
        coefficients.resize(order + 1, ComplexMatrix::zeros(dim, dim));
        Self { coefficients }
    }

    /// Applies `f` to every coefficient, e.g. `X ↦ X ⊗ 1`.
    pub fn map_coefficients(
        &self,
        f: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        Self::new(self.coefficients.iter().map(f).collect::<Result<_>>()?)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|m| m.scale(c)).collect(),
        }
    }

    /// `Σ_i w_i S_i`, padded to the largest order among the terms.
    pub fn linear_combination(terms: &[(Complex64, &OperatorSeries)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Dimension("linear combination of no series".into()))?;
        let dim = first.dim();
        let order = terms.iter().map(|(_, s)| s.order()).max().unwrap_or(0);
        let mut out = Self::zero(dim, order);
        for (w, s) in terms {
            if s.dim() != dim {
                return Err(Error::Dimension(format!(
                    "series of dimension {} mixed with dimension {dim}",
                    s.dim()
                )));
            }
            for (acc, c) in out.coefficients.iter_mut().zip(&s.coefficients) {
                acc.add_scaled(c, *w);
            }
        }
        Ok(out)
    }

    /// Cauchy product of the Kronecker factors, `self(ε) ⊗ other(ε)`, truncated at `order`.
    pub fn kron(&self, other: &Self, order: usize) -> Result<Self> {
        let dim = self.dim() * other.dim();
        let mut out = Self::zero(dim, order);
        for (i, a) in self.coefficients.iter().enumerate().take(order + 1) {
            for (j, b) in other.coefficients.iter().enumerate().take(order + 1 - i) {
                out.coefficients[i + j].add_scaled(&kron(a, b)?, Complex64::new(1.0, 0.0));
            }
        }
        Ok(out)
    }
}
