//! Report envelopes and CSV/JSON output.
//!
//! JSON reports are `{"schema_version", "study", "passed", "report"}` with
//! the study-specific body under `report`. Exponents `p = ∞` serialize as
//! the string `"inf"`. CSV reports are flat tables (one header row) whose
//! columns are listed by [`Tabular::header`]. Both are deterministic:
//! identical inputs give byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::convergence::ConvergenceReport;
use crate::counterexample::CounterexampleReport;
use crate::equivalence::EquivalenceReport;
use crate::error::Result;
use crate::reproduction::ReproductionReport;
use crate::smoothness::SmoothnessReport;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub fn serialize_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

pub fn serialize_exponents<S: Serializer>(
    ps: &[f64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(ps.len()))?;
    for p in ps {
        if p.is_infinite() {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element(p)?;
        }
    }
    seq.end()
}

pub fn exponent_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

#[derive(Serialize)]
struct Envelope<'a, B> {
    schema_version: u32,
    study: &'a str,
    passed: bool,
    report: &'a B,
}

/// A report that flattens to one CSV table.
pub trait Tabular {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn to_json<B: Serialize>(study: &str, passed: bool, body: &B) -> Result<String> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        study,
        passed,
        report: body,
    };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

pub fn to_csv<B: Tabular>(body: &B) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(body.header())?;
    for row in body.rows() {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Write to `path` (CSV if it ends in `.csv`, JSON otherwise) or, without
/// a path, JSON to stdout.
pub fn emit<B: Serialize + Tabular>(
    study: &str,
    passed: bool,
    body: &B,
    path: Option<&Path>,
) -> Result<()> {
    match path {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => std::fs::write(p, to_csv(body)?)?,
        Some(p) => std::fs::write(p, to_json(study, passed, body)?)?,
        None => std::io::stdout().write_all(to_json(study, passed, body)?.as_bytes())?,
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl Tabular for ConvergenceReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "interpolant",
            "function",
            "dim",
            "j",
            "p",
            "n",
            "h",
            "error",
            "slope",
            "expected_slope",
            "flagged",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let s = &self.study;
        self.rows
            .iter()
            .map(|r| {
                vec![
                    format!("{:?}", s.interpolant),
                    s.function.label().into(),
                    s.dim.to_string(),
                    s.j.to_string(),
                    exponent_label(s.p),
                    r.n.to_string(),
                    r.h.to_string(),
                    r.error.to_string(),
                    opt(self.slope),
                    self.expected_slope.to_string(),
                    self.flagged.to_string(),
                ]
            })
            .collect()
    }
}

impl Tabular for EquivalenceReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "p",
            "kind",
            "name",
            "description",
            "value_n",
            "value_2n",
            "violations",
            "stable",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for e in &self.exponents {
            let p = exponent_label(e.p);
            for b in &e.upper_bounds {
                out.push(vec![
                    p.clone(),
                    "upper_bound".into(),
                    b.name.into(),
                    b.description.into(),
                    b.worst_ratio.to_string(),
                    b.worst_ratio.to_string(),
                    b.violations.to_string(),
                    String::new(),
                ]);
            }
            for r in &e.ratios {
                out.push(vec![
                    p.clone(),
                    format!("{:?}", r.extreme).to_lowercase(),
                    r.name.into(),
                    r.description.into(),
                    r.value_n.to_string(),
                    r.value_2n.to_string(),
                    String::new(),
                    r.stable.to_string(),
                ]);
            }
        }
        out
    }
}

impl Tabular for CounterexampleReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["quantity", "value"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut out = vec![
            vec!["extended_hat_max".into(), self.extended_hat_max.to_string()],
            vec!["q1_max".into(), self.q1_max.to_string()],
            vec!["min_multiplier".into(), self.min_multiplier.to_string()],
            vec!["zero_modes".into(), self.zero_modes.len().to_string()],
            vec![
                "z4_nodal_passed".into(),
                self.audit.z4_nodal.passed.to_string(),
            ],
        ];
        for (k, m) in self.multiplier.iter().enumerate() {
            out.push(vec![format!("multiplier[{k}]"), m.to_string()]);
        }
        out
    }
}

impl Tabular for SmoothnessReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "k",
            "p",
            "norm",
            "deformation_residual",
            "peak_cell",
            "peak_value",
            "focus_fraction",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.k.to_string(),
            exponent_label(self.p),
            self.norm.to_string(),
            opt(self.deformation_residual),
            self.peak_cell
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            self.peak_value.to_string(),
            opt(self.focus_fraction),
        ]]
    }
}

impl Tabular for ReproductionReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "exponents",
            "degree",
            "quasi_residual",
            "preimage_residual",
            "expected_exact",
            "passed",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.exponents
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    r.degree.to_string(),
                    r.quasi_residual.to_string(),
                    opt(r.preimage_residual),
                    r.expected_exact.to_string(),
                    r.passed.to_string(),
                ]
            })
            .collect()
    }
}
