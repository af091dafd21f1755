//! JSON channel spec files.
//!
//! ```json
//! {"dim": 2, "truncation_order": 1, "label": "example",
//!  "b_series": [{"kappa": [1, 0], "coefficients": [[[[1,0],[0,0]],[[0,0],[1,0]]], ...]}],
//!  "c_series": [{"coefficients": [[[[0,0],[1,0]],[[0,0],[0,0]]]]}]}
//! ```
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. A b-series may list
//! `truncation_order` coefficients instead of `truncation_order + 1`, in which
//! case the order-0 coefficient is implied to be `κ·1`. C-series shorter than
//! `truncation_order + 1` are zero-padded.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LowNoiseChannel, DEFAULT_VALIDATION_GRID};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::series::OperatorSeries;

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BSeriesSpec {
    pub kappa: [f64; 2],
    pub coefficients: Vec<MatrixSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CSeriesSpec {
    pub coefficients: Vec<MatrixSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecFile {
    pub dim: usize,
    pub truncation_order: usize,
    pub label: String,
    pub b_series: Vec<BSeriesSpec>,
    #[serde(default)]
    pub c_series: Vec<CSeriesSpec>,
}

fn spec_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec {
        path: path.into(),
        message: message.into(),
    }
}

fn matrix_from_spec(m: &MatrixSpec, dim: usize, path: &str) -> Result<ComplexMatrix> {
    if m.len() != dim {
        return Err(spec_err(
            path,
            format!("expected {dim} rows, found {}", m.len()),
        ));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            return Err(spec_err(
                format!("{path}[{i}]"),
                format!("expected {dim} entries, found {}", row.len()),
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(spec_err(format!("{path}[{i}][{j}]"), "non-finite entry"));
            }
            data.push(Complex64::new(re, im));
        }
    }
    ComplexMatrix::new(dim, dim, data)
}

fn matrix_to_spec(m: &ComplexMatrix) -> MatrixSpec {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

impl ChannelSpecFile {
    /// Parses JSON text; errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            spec_err(
                if path.is_empty() { ".".into() } else { path },
                e.into_inner().to_string(),
            )
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }

    /// Structural conversion; physical conditions are not checked here.
    pub fn to_channel(&self) -> Result<LowNoiseChannel> {
        let (d, k) = (self.dim, self.truncation_order);
        if d == 0 {
            return Err(spec_err("dim", "must be positive"));
        }
        let mut b_series = Vec::with_capacity(self.b_series.len());
        let mut kappas = Vec::with_capacity(self.b_series.len());
        for (a, b) in self.b_series.iter().enumerate() {
            let path = format!("b_series[{a}].coefficients");
            let kappa = Complex64::new(b.kappa[0], b.kappa[1]);
            let mut coefficients = Vec::with_capacity(k + 1);
            if b.coefficients.len() == k {
                coefficients.push(ComplexMatrix::identity(d).scale(kappa));
            } else if b.coefficients.len() != k + 1 {
                return Err(spec_err(
                    path,
                    format!(
                        "expected {} or {} coefficients, found {}",
                        k,
                        k + 1,
                        b.coefficients.len()
                    ),
                ));
            }
            for (n, m) in b.coefficients.iter().enumerate() {
                coefficients.push(matrix_from_spec(m, d, &format!("{path}[{n}]"))?);
            }
            b_series.push(OperatorSeries::new(coefficients)?);
            kappas.push(kappa);
        }
        let mut c_series = Vec::with_capacity(self.c_series.len());
        for (beta, c) in self.c_series.iter().enumerate() {
            let path = format!("c_series[{beta}].coefficients");
            if c.coefficients.is_empty() || c.coefficients.len() > k + 1 {
                return Err(spec_err(
                    path,
                    format!(
                        "expected 1 to {} coefficients, found {}",
                        k + 1,
                        c.coefficients.len()
                    ),
                ));
            }
            let coefficients = c
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, m)| matrix_from_spec(m, d, &format!("{path}[{n}]")))
                .collect::<Result<Vec<_>>>()?;
            c_series.push(OperatorSeries::new(coefficients)?.with_order(k));
        }
        if b_series.is_empty() {
            return Err(spec_err(
                "b_series",
                "at least one near-identity operator is required",
            ));
        }
        LowNoiseChannel::new(d, b_series, c_series, kappas, self.label.clone())
    }

    /// Full-order spec file for an existing channel.
    pub fn from_channel(ch: &LowNoiseChannel) -> Self {
        let k = ch.truncation_order();
        Self {
            dim: ch.dim(),
            truncation_order: k,
            label: ch.label().to_owned(),
            b_series: ch
                .b_series()
                .iter()
                .zip(ch.kappas())
                .map(|(s, kappa)| BSeriesSpec {
                    kappa: [kappa.re, kappa.im],
                    coefficients: s
                        .with_order(k)
                        .coefficients()
                        .iter()
                        .map(matrix_to_spec)
                        .collect(),
                })
                .collect(),
            c_series: ch
                .c_series()
                .iter()
                .map(|s| CSeriesSpec {
                    coefficients: s
                        .with_order(k)
                        .coefficients()
                        .iter()
                        .map(matrix_to_spec)
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Loads and validates a channel spec file. Files whose validation fails are
/// refused unless `allow_invalid` is set.
pub fn load_channel(path: impl AsRef<Path>, allow_invalid: bool) -> Result<LowNoiseChannel> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let ch = ChannelSpecFile::from_json(&text)?.to_channel()?;
    if !allow_invalid {
        let report = ch.validate(&DEFAULT_VALIDATION_GRID)?;
        if !report.passed {
            return Err(Error::Contract(format!(
                "channel `{}` fails validation (kappa defect {:.3e}, identity defects {:?})",
                ch.label(),
                report.kappa_norm_defect,
                report.identity_defects
            )));
        }
    }
    Ok(ch)
}
