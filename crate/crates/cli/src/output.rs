//! Serialized forms of reports and tables. Everything here is a pure
//! function of its input so that repeated runs give identical bytes.

use std::io;
use std::path::Path;

use serde::Serialize;
use voa_core::models::ModelDescriptor;
use voa_core::report::SuiteReport;

use crate::lab::{DecayEntry, LabOutput};
use crate::suites::Built;

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn reports_json(reports: &[SuiteReport]) -> String {
    json(reports)
}

pub fn reports_csv(reports: &[SuiteReport]) -> String {
    let rows = reports.iter().flat_map(|r| {
        r.checks.iter().map(move |c| {
            vec![
                r.suite.clone(),
                r.model.clone(),
                r.depth.to_string(),
                c.name.clone(),
                c.status.to_string(),
                c.checked.to_string(),
                c.truncated.to_string(),
                c.failures.to_string(),
                c.witnesses.first().map(ToString::to_string).unwrap_or_default(),
            ]
        })
    });
    csv_string(&["suite", "model", "depth", "check", "status", "checked", "truncated", "failures", "first_witness"], rows)
}

/// One line per check, followed by the first witness of failing checks.
pub fn summary_lines(reports: &[SuiteReport]) -> Vec<String> {
    let mut out = Vec::new();
    for r in reports {
        for c in &r.checks {
            out.push(format!(
                "{}/{}: {} (checked {}, truncated {}, failures {})",
                r.suite, c.name, c.status, c.checked, c.truncated, c.failures
            ));
            if let Some(w) = c.witnesses.first() {
                out.push(format!("    {w}"));
            }
        }
        out.push(format!("{} [{} @ D={}]: {}", r.suite, r.model, r.depth, r.status));
    }
    out
}

#[derive(Serialize)]
pub struct BuildSummary {
    pub schema_version: u32,
    pub model: String,
    pub descriptor: ModelDescriptor,
    pub depth: usize,
    pub working_depth: usize,
    pub dims: Vec<usize>,
    pub basis: Vec<Vec<String>>,
    /// `(level, nullity)` of the universal form where it was singular.
    pub radical: Vec<(usize, usize)>,
    pub theta: &'static str,
    pub closure: Vec<String>,
    pub candidates_evaluated: usize,
}

pub fn build_summary(built: &Built) -> String {
    let m = &built.model;
    let s = BuildSummary {
        schema_version: voa_core::report::SCHEMA_VERSION,
        model: built.name(),
        descriptor: m.descriptor.clone(),
        depth: m.depth(),
        working_depth: m.working_depth(),
        dims: built.va.dims().to_vec(),
        basis: (0..=m.depth()).map(|n| m.space.labels(n).to_vec()).collect(),
        radical: m.radical.clone(),
        theta: m.descriptor.theta_rule(),
        closure: built.va.closure_origins.iter().map(ToString::to_string).collect(),
        candidates_evaluated: built.va.candidates_evaluated,
    };
    json(&s)
}

#[derive(Serialize)]
struct OrderSummary<'a> {
    state: &'a str,
    order: usize,
    exponent: Option<f64>,
}

#[derive(Serialize)]
struct GrowthSummary<'a> {
    u: &'a str,
    u_prime: &'a str,
    degree: Option<i64>,
    slope: Option<f64>,
    max_ratio: &'a [(u32, f64)],
}

#[derive(Serialize)]
struct SummabilitySummary {
    order: u32,
    cutoff: usize,
    tail: f64,
    tail_bound: f64,
    max_bound_ratio: f64,
    monotone: bool,
}

#[derive(Serialize)]
struct LabSummary<'a> {
    report: &'a SuiteReport,
    decay: &'a [DecayEntry],
    orders: Vec<OrderSummary<'a>>,
    growth: Vec<GrowthSummary<'a>>,
    summability: Vec<SummabilitySummary>,
}

pub fn lab_json(out: &LabOutput) -> String {
    json(&LabSummary {
        report: &out.report,
        decay: &out.decay,
        orders: out.orders.iter().map(|(s, e)| OrderSummary { state: s, order: e.order, exponent: e.exponent }).collect(),
        growth: out
            .growth
            .iter()
            .map(|(u, v, g)| GrowthSummary { u, u_prime: v, degree: g.degree, slope: g.slope, max_ratio: &g.max_ratio })
            .collect(),
        summability: out
            .summability
            .iter()
            .map(|d| SummabilitySummary {
                order: d.order,
                cutoff: d.cutoff,
                tail: d.tail,
                tail_bound: d.tail_bound,
                max_bound_ratio: d.max_bound_ratio,
                monotone: d.monotone,
            })
            .collect(),
    })
}

/// `(file name, contents)` for each lab table.
pub fn lab_csv(out: &LabOutput) -> Vec<(&'static str, String)> {
    let decay = csv_string(
        &["cutoff", "disjoint", "control", "truncated"],
        out.decay.iter().map(|e| vec![e.cutoff.to_string(), e.disjoint.to_string(), e.control.to_string(), e.truncated.to_string()]),
    );
    let orders = csv_string(
        &["state", "index", "value"],
        out.orders.iter().flat_map(|(s, e)| e.norms.iter().map(move |(n, v)| vec![s.clone(), n.to_string(), v.to_string()])),
    );
    let growth = csv_string(
        &["u", "u_prime", "index", "value"],
        out.growth.iter().flat_map(|(u, v, g)| {
            g.points.iter().map(move |(m, e)| vec![u.clone(), v.clone(), m.to_string(), e.to_string()])
        }),
    );
    let summability = csv_string(
        &["order", "cutoff", "value"],
        out.summability.iter().flat_map(|d| d.partial_sums.iter().map(move |(m, s)| vec![d.order.to_string(), m.to_string(), s.to_string()])),
    );
    vec![("decay.csv", decay), ("order.csv", orders), ("growth.csv", growth), ("summability.csv", summability)]
}

pub fn write(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)
}
