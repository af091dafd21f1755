//! Run reports and their JSON/CSV encodings.
//!
//! Floating-point numbers are written with 17 significant digits so that
//! every value round-trips exactly. Wall-clock data lives in `metadata`,
//! apart from the numeric payload.

use std::io;
use std::time::Duration;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use lownoise::channel::ValidationReport;
use lownoise::optimize::{EnhancementReport, FactorizedOptimum};
use lownoise::{FisherReport, NoGainReport, OptimizationResult};

use crate::CommonArgs;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FisherSection {
    /// Whether the input was fed through the ancilla-extended channel.
    pub assisted: bool,
    pub rows: Vec<FisherReport>,
    /// Leading coefficient of the configured input.
    pub leading_coefficient: f64,
    /// `F(ρ̃)` on the system marginal of the input.
    pub reduced_state_coefficient: f64,
    pub extrapolated: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeSection {
    pub pure: OptimizationResult,
    pub reduced: OptimizationResult,
    pub enhancement: EnhancementReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct NBodySection {
    pub factorized: FactorizedOptimum,
    pub no_gain: NoGainReport,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub elapsed_seconds: f64,
}

impl Metadata {
    pub fn now(elapsed: Duration) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            elapsed_seconds: elapsed.as_secs_f64(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub config: CommonArgs,
    pub channel: String,
    pub validation: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fisher: Option<FisherSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbody: Option<NBodySection>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub metadata: Metadata,
}

impl RunReport {
    pub fn new(
        command: &'static str,
        config: CommonArgs,
        channel: &str,
        validation: ValidationReport,
    ) -> Self {
        Self {
            command,
            config,
            channel: channel.to_owned(),
            validation,
            fisher: None,
            optimization: None,
            nbody: None,
            checks: Vec::new(),
            passed: false,
            metadata: Metadata::default(),
        }
    }
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty printer that writes floats with 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| e.to_string())?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| e.to_string())
}

/// One CSV row: `channel,quantity,eps,value,seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub quantity: String,
    pub eps: Option<f64>,
    pub value: Option<f64>,
}

fn row(quantity: impl Into<String>, eps: Option<f64>, value: f64) -> CsvRow {
    CsvRow {
        quantity: quantity.into(),
        eps,
        value: value.is_finite().then_some(value),
    }
}

fn optimization_rows(prefix: &str, r: &OptimizationResult, rows: &mut Vec<CsvRow>) {
    rows.push(row(format!("{prefix}_optimum"), None, r.optimum_value));
    rows.push(row(format!("{prefix}_value_spread"), None, r.value_spread));
    rows.push(row(
        format!("{prefix}_converged_starts"),
        None,
        r.converged_starts as f64,
    ));
    rows.push(row(
        format!("{prefix}_gradient_norm_final"),
        None,
        r.gradient_norm_final,
    ));
}

/// Flattens the numeric payload of a report, in report order.
pub fn csv_rows(report: &RunReport) -> Vec<CsvRow> {
    let mut rows = Vec::new();
    let v = &report.validation;
    rows.push(row("kappa_norm_defect", None, v.kappa_norm_defect));
    for (alpha, d) in v.identity_defects.iter().enumerate() {
        rows.push(row(format!("identity_defect_{alpha}"), None, *d));
    }
    for p in &v.completeness_residuals {
        rows.push(row("completeness_residual", Some(p.eps), p.residual));
    }
    if let Some(f) = &report.fisher {
        for r in &f.rows {
            rows.push(row("exact_j", Some(r.eps), r.exact_j));
            rows.push(row("eps_times_j", Some(r.eps), r.leading_coefficient));
            rows.push(CsvRow {
                quantity: "cramer_rao_bound".into(),
                eps: Some(r.eps),
                value: r.cramer_rao_bound,
            });
            rows.push(row("trace_defect", Some(r.eps), r.trace_defect));
        }
        rows.push(row("leading_coefficient", None, f.leading_coefficient));
        rows.push(row(
            "reduced_state_coefficient",
            None,
            f.reduced_state_coefficient,
        ));
        if let Some(x) = f.extrapolated {
            rows.push(row("leading_coefficient_extrapolated", None, x));
        }
    }
    if let Some(o) = &report.optimization {
        optimization_rows("pure", &o.pure, &mut rows);
        optimization_rows("reduced", &o.reduced, &mut rows);
        rows.push(CsvRow {
            quantity: "enhancement_ratio".into(),
            eps: None,
            value: o.enhancement.ratio,
        });
    }
    if let Some(nb) = &report.nbody {
        rows.push(row("factorized_value", None, nb.factorized.value));
        rows.push(row("bound", None, nb.factorized.bound));
        rows.push(row("site_optimum", None, nb.no_gain.site_optimum));
        rows.push(row("max_observed", None, nb.no_gain.max_observed));
        rows.push(row("min_observed", None, nb.no_gain.min_observed));
        rows.push(row("gap", None, nb.no_gain.gap));
        rows.push(row("violations", None, nb.no_gain.violations as f64));
    }
    rows
}

pub fn to_csv(report: &RunReport) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["channel", "quantity", "eps", "value", "seed"])
        .map_err(|e| e.to_string())?;
    let seed = report.config.seed.to_string();
    for r in csv_rows(report) {
        let eps = r.eps.map(format_f64).unwrap_or_default();
        let value = r.value.map(format_f64).unwrap_or_default();
        w.write_record([report.channel.as_str(), &r.quantity, &eps, &value, &seed])
            .map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}
