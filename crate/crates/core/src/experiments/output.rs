//! Result rows and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentKind, OutputFormat};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 16] = [
    "kind", "r", "n", "m", "delta", "alpha", "T", "u", "spacing", "reps", "seed", "mc", "mc_se",
    "formula", "ratio", "flags",
];

/// One parameter point. Unused columns stay `None` and print empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub kind: ExperimentKind,
    pub r: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub u: Option<f64>,
    pub spacing: Option<f64>,
    pub reps: usize,
    pub seed: u64,
    pub mc: f64,
    pub mc_se: Option<f64>,
    pub formula: Option<f64>,
    pub ratio: Option<f64>,
    pub flags: Vec<String>,
    /// Outcome of a verification row; `None` for plain measurements.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

impl Row {
    pub fn new(kind: ExperimentKind, reps: usize, seed: u64, mc: f64) -> Self {
        Self {
            kind,
            r: None,
            n: None,
            m: None,
            delta: None,
            alpha: None,
            horizon: None,
            u: None,
            spacing: None,
            reps,
            seed,
            mc,
            mc_se: None,
            formula: None,
            ratio: None,
            flags: Vec::new(),
            verified: None,
        }
    }

    /// Attach the reference value; the ratio is set when it is positive.
    pub fn with_formula(mut self, formula: f64) -> Self {
        self.formula = Some(formula);
        self.ratio = (formula > 0.0).then(|| self.mc / formula);
        self
    }

    pub fn flag(mut self, f: impl Into<String>) -> Self {
        self.flags.push(f.into());
        self
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub rows: Vec<Row>,
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn opt_int(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentResult {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.verified == Some(false))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = CSV_COLUMNS.join(",");
        s.push('\n');
        for row in &self.rows {
            let fields = [
                row.kind.name().to_string(),
                opt_int(row.r),
                opt_int(row.n),
                opt_int(row.m),
                opt_num(row.delta),
                opt_num(row.alpha),
                opt_num(row.horizon),
                opt_num(row.u),
                opt_num(row.spacing),
                row.reps.to_string(),
                row.seed.to_string(),
                num(row.mc),
                opt_num(row.mc_se),
                opt_num(row.formula),
                opt_num(row.ratio),
                // Flags never contain commas or quotes; ';' separates them.
                row.flags.join(";"),
            ];
            let _ = writeln!(s, "{}", fields.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("rows serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        std::fs::write(path, self.render(format))
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
    }
}
