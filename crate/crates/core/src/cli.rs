//! Command-line front end: argument parsing, instance preparation, the five
//! analyses, and their CSV / JSON / plain-table renderings.
//!
//! Every command is a pure function of its [`RunConfig`]; output is rendered
//! into a buffer in a fixed order, so runs are byte-for-byte reproducible.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{load_system, InputFormat, LoadedNetwork};
use crate::network::{
    build_friedkin_johnsen, generate_graph, GraphModel, InfluenceSystem, StubbornnessProfile, UndirectedGraph,
};
use crate::solver::{heuristic_degree, heuristic_key_node, high_budget_threshold, phi, BudgetSchedule, SolveReport};
use crate::spectral::ResponseModel;

pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_LOWER_BOUND: f64 = 1.0;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const NOT_SCHUR_STABLE: i32 = 3;
    pub const NOT_IRREDUCIBLE: i32 = 4;
    pub const BUDGET_INFEASIBLE: i32 = 5;
    pub const NUMERICAL: i32 = 6;
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotSchurStable { .. } => exit::NOT_SCHUR_STABLE,
        Error::NotIrreducible { .. } => exit::NOT_IRREDUCIBLE,
        Error::BudgetInfeasible { .. } | Error::BudgetTooSmall { .. } | Error::NonPositiveBudget { .. } => {
            exit::BUDGET_INFEASIBLE
        }
        Error::DimensionMismatch(_)
        | Error::InvalidParameter(_)
        | Error::NegativeWeight { .. }
        | Error::ZeroDegreeNode { .. }
        | Error::InvalidStubbornness { .. }
        | Error::GenerationFailed { .. }
        | Error::Parse { .. }
        | Error::Asymmetry { .. }
        | Error::Io { .. }
        | Error::InvalidLowerBound { .. }
        | Error::DimensionTooLarge(_) => exit::CONFIG,
        _ => exit::NUMERICAL,
    }
}

// ---------------------------------------------------------------------------
// configuration

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkSource {
    File(PathBuf),
    Generate { model: GraphModel, n: usize, seed: u64 },
}

/// A scalar broadcast to every node, or explicit per-node values.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorSpec {
    Scalar(f64),
    Values(Vec<f64>),
}

impl VectorSpec {
    /// Parses a number, or else reads whitespace/comma separated numbers (or
    /// a JSON array) from the named file.
    pub fn parse(arg: &str) -> Result<Self> {
        if let Ok(v) = arg.trim().parse::<f64>() {
            return Ok(VectorSpec::Scalar(v));
        }
        let text = std::fs::read_to_string(arg).map_err(|e| Error::Io {
            path: arg.to_string(),
            message: e.to_string(),
        })?;
        let trimmed = text.trim();
        if trimmed.starts_with('[') {
            let values: Vec<f64> = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                location: format!("{arg}: line {}, column {}", e.line(), e.column()),
                message: e.to_string(),
            })?;
            return Ok(VectorSpec::Values(values));
        }
        let values = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(i, t)| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    location: format!("{arg}: entry {}", i + 1),
                    message: format!("'{t}' is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorSpec::Values(values))
    }

    pub fn resolve(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            VectorSpec::Scalar(v) => Ok(vec![*v; n]),
            VectorSpec::Values(v) if v.len() == n => Ok(v.clone()),
            VectorSpec::Values(v) => Err(Error::DimensionMismatch(format!(
                "{what} has {} entries, expected {n}",
                v.len()
            ))),
        }
    }

    fn scalar(&self, what: &str) -> Result<f64> {
        match self {
            VectorSpec::Scalar(v) => Ok(*v),
            VectorSpec::Values(_) => Err(Error::InvalidParameter(format!("{what} must be a scalar here"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BudgetSpec {
    Single(f64),
    Sweep { from: f64, to: f64, steps: usize },
}

impl BudgetSpec {
    /// Parses `from:to:steps`.
    pub fn parse_sweep(arg: &str) -> Result<Self> {
        let bad = |message: &str| Error::Parse {
            location: format!("--sweep '{arg}'"),
            message: message.to_string(),
        };
        let parts: Vec<&str> = arg.split(':').collect();
        let [from, to, steps] = parts.as_slice() else {
            return Err(bad("expected from:to:steps"));
        };
        let from: f64 = from.parse().map_err(|_| bad("'from' is not a number"))?;
        let to: f64 = to.parse().map_err(|_| bad("'to' is not a number"))?;
        let steps: usize = steps.parse().map_err(|_| bad("'steps' is not an integer"))?;
        let spec = BudgetSpec::Sweep { from, to, steps };
        spec.budgets()?;
        Ok(spec)
    }

    /// The budgets to evaluate, evenly spaced and inclusive of both ends.
    pub fn budgets(&self) -> Result<Vec<f64>> {
        match *self {
            BudgetSpec::Single(c) => Ok(vec![c]),
            BudgetSpec::Sweep { from, to, steps } => {
                if !(from < to) {
                    return Err(Error::InvalidParameter(format!(
                        "sweep needs from < to, got {from}:{to}"
                    )));
                }
                if steps < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "sweep needs at least 2 steps, got {steps}"
                    )));
                }
                let h = (to - from) / (steps - 1) as f64;
                Ok((0..steps)
                    .map(|k| if k + 1 == steps { to } else { from + h * k as f64 })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    /// Aligned columns, 6 significant digits.
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: NetworkSource,
    /// `None` keeps a file-provided profile, or falls back to 1/2.
    pub lambda: Option<VectorSpec>,
    pub lower: VectorSpec,
    pub budget: Option<BudgetSpec>,
    pub format: OutputFormat,
    pub heuristics: bool,
    pub seed: u64,
}

impl RunConfig {
    pub fn generated(model: GraphModel, n: usize, seed: u64) -> Self {
        Self {
            source: NetworkSource::Generate { model, n, seed },
            lambda: None,
            lower: VectorSpec::Scalar(DEFAULT_LOWER_BOUND),
            budget: None,
            format: OutputFormat::Csv,
            heuristics: false,
            seed,
        }
    }

    pub fn from_file(path: impl Into<PathBuf>) -> Self {
        Self {
            source: NetworkSource::File(path.into()),
            ..Self::generated(GraphModel::PreferentialAttachment, 2, 0)
        }
    }
}

// ---------------------------------------------------------------------------
// instance preparation

/// A validated network with its response model and lower bounds.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Option<UndirectedGraph>,
    pub system: InfluenceSystem,
    pub model: ResponseModel,
    pub lower: Vec<f64>,
}

impl Instance {
    pub fn prepare(config: &RunConfig) -> Result<Self> {
        let (graph, file_lambda, system) = match &config.source {
            NetworkSource::Generate { model, n, seed } => (Some(generate_graph(*model, *n, *seed)?), None, None),
            NetworkSource::File(path) => match load_system(path, InputFormat::from_path(path))? {
                LoadedNetwork::System(sys) => (None, None, Some(sys)),
                LoadedNetwork::Graph { graph, lambda } => (Some(graph), lambda, None),
            },
        };
        let system = match (system, &graph) {
            (Some(sys), _) => {
                if config.lambda.is_some() {
                    return Err(Error::InvalidParameter("--lambda applies only to graph inputs".into()));
                }
                sys
            }
            (None, Some(g)) => {
                let lambda = match (&config.lambda, file_lambda) {
                    (Some(spec), _) => StubbornnessProfile::new(spec.resolve(g.nodes(), "lambda")?)?,
                    (None, Some(profile)) => profile,
                    (None, None) => StubbornnessProfile::uniform(g.nodes(), DEFAULT_LAMBDA)?,
                };
                build_friedkin_johnsen(g, &lambda)?
            }
            (None, None) => unreachable!("every source yields a graph or a system"),
        };
        let model = ResponseModel::from_system(&system)?;
        let lower = config.lower.resolve(model.sources(), "lower bounds")?;
        crate::solver::check_lower_bounds(&lower, model.sources())?;
        Ok(Self {
            graph,
            system,
            model,
            lower,
        })
    }

    pub fn floor(&self) -> f64 {
        self.lower.iter().sum()
    }

    /// Degrees aligned with sources, when sources are Friedkin-Johnsen anchors.
    fn degrees(&self) -> Option<&[f64]> {
        self.graph.as_ref().map(UndirectedGraph::degrees)
    }
}

fn require_budgets(config: &RunConfig, floor: f64) -> Result<Vec<f64>> {
    let spec = config
        .budget
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("a budget (--budget or --sweep) is required".into()))?;
    let budgets = spec.budgets()?;
    if let Some(&c) = budgets.iter().find(|&&c| c < floor * (1.0 - 1e-12)) {
        return Err(Error::BudgetInfeasible { budget: c, floor });
    }
    Ok(budgets)
}

// ---------------------------------------------------------------------------
// commands

/// Anything a command can print.
pub trait Render {
    fn to_csv(&self) -> String;
    fn to_table(&self) -> String;
    fn to_json(&self) -> String;

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Table => self.to_table(),
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

/// Round-trip decimal for CSV.
fn num(v: f64) -> String {
    format!("{v}")
}

/// 6 significant digits for human-readable tables.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&exponent) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

fn opt(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn regime_index(regime: Option<usize>) -> i64 {
    regime.map_or(-1, |k| k as i64)
}

/// Space-separated, for sets already in 1-based form.
fn members(set: &[usize]) -> String {
    set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header, &mut out);
    for row in rows {
        line(row, &mut out);
    }
    out
}

fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CentralityRow {
    pub index: usize,
    pub centrality: f64,
    pub degree: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CentralityReport {
    pub sources: Vec<CentralityRow>,
    pub total_mass: f64,
    pub threshold: f64,
}

impl CentralityReport {
    fn cells(&self, f: fn(f64) -> String) -> (Vec<String>, Vec<Vec<String>>) {
        let header = ["index", "pi", "degree", "total_mass", "c0"].map(String::from).to_vec();
        let rows = self
            .sources
            .iter()
            .map(|r| {
                vec![
                    r.index.to_string(),
                    f(r.centrality),
                    opt(r.degree, f),
                    f(self.total_mass),
                    f(self.threshold),
                ]
            })
            .collect();
        (header, rows)
    }
}

impl Render for CentralityReport {
    fn to_csv(&self) -> String {
        let (h, r) = self.cells(num);
        csv(&h, &r)
    }
    fn to_table(&self) -> String {
        let (h, r) = self.cells(sig6);
        aligned(&h, &r)
    }
    fn to_json(&self) -> String {
        json(self)
    }
}

/// Per-source centrality, degree, `𝟙'H𝟙` and `c⁰` for the configured `d`.
pub fn cmd_centrality(config: &RunConfig) -> Result<CentralityReport> {
    let inst = Instance::prepare(config)?;
    let pi = inst.model.centrality();
    let threshold = high_budget_threshold(&inst.lower, pi)?;
    let degrees = inst.degrees();
    Ok(CentralityReport {
        sources: pi
            .iter()
            .enumerate()
            .map(|(i, &p)| CentralityRow {
                index: i + 1,
                centrality: p,
                degree: degrees.map(|w| w[i]),
            })
            .collect(),
        total_mass: inst.model.total_mass(),
        threshold,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolveOutput {
    pub budget: f64,
    pub value: f64,
    pub nu: Vec<f64>,
    pub lower: Vec<f64>,
    /// 1-based.
    pub active_set: Vec<usize>,
    /// `-1` in the high-budget regime.
    pub regime_index: i64,
    pub kkt_residual: f64,
    pub threshold: f64,
    pub attacker_response: Vec<f64>,
}

impl SolveOutput {
    fn from_report(report: SolveReport, lower: Vec<f64>, threshold: f64) -> Self {
        Self {
            budget: report.budget,
            value: report.value,
            nu: report.nu,
            lower,
            active_set: report.active_set.iter().map(|i| i + 1).collect(),
            regime_index: regime_index(report.regime),
            kkt_residual: report.kkt_residual,
            threshold,
            attacker_response: report.attacker_response,
        }
    }

    fn cells(&self, f: fn(f64) -> String) -> (Vec<String>, Vec<Vec<String>>) {
        let header = [
            "index",
            "nu",
            "lower",
            "active",
            "budget",
            "value",
            "regime",
            "kkt_residual",
        ]
        .map(String::from)
        .to_vec();
        let rows = (0..self.nu.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    f(self.nu[i]),
                    f(self.lower[i]),
                    self.active_set.contains(&(i + 1)).to_string(),
                    f(self.budget),
                    f(self.value),
                    self.regime_index.to_string(),
                    f(self.kkt_residual),
                ]
            })
            .collect();
        (header, rows)
    }
}

impl Render for SolveOutput {
    fn to_csv(&self) -> String {
        let (h, r) = self.cells(num);
        csv(&h, &r)
    }
    fn to_table(&self) -> String {
        let (h, r) = self.cells(sig6);
        aligned(&h, &r)
    }
    fn to_json(&self) -> String {
        json(self)
    }
}

/// Optimal protection at a single budget.
pub fn cmd_solve(config: &RunConfig) -> Result<SolveOutput> {
    let inst = Instance::prepare(config)?;
    let budgets = require_budgets(config, inst.floor())?;
    let [c] = budgets.as_slice() else {
        return Err(Error::InvalidParameter("solve takes a single --budget".into()));
    };
    let report = crate::solver::waterfill(&inst.lower, *c, &inst.model)?;
    let threshold = high_budget_threshold(&inst.lower, inst.model.centrality())?;
    Ok(SolveOutput::from_report(report, inst.lower, threshold))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepRow {
    pub budget: f64,
    pub value: f64,
    pub regime_index: i64,
    pub nu: Vec<f64>,
    /// `φ(ν^w(c)) / φ(ν*(c))`.
    pub degree_ratio: Option<f64>,
    /// `φ(ν^key(c)) / φ(ν*(c))`.
    pub key_node_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepReport {
    pub breakpoints: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    fn cells(&self, f: fn(f64) -> String) -> (Vec<String>, Vec<Vec<String>>) {
        let m = self.rows.first().map_or(0, |r| r.nu.len());
        let heuristics = self.rows.first().is_some_and(|r| r.degree_ratio.is_some());
        let mut header: Vec<String> = ["budget", "value", "regime"].map(String::from).to_vec();
        header.extend((1..=m).map(|i| format!("nu_{i}")));
        if heuristics {
            header.push("ratio_degree".into());
            header.push("ratio_key".into());
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![f(r.budget), f(r.value), r.regime_index.to_string()];
                cells.extend(r.nu.iter().map(|&v| f(v)));
                if heuristics {
                    cells.push(opt(r.degree_ratio, f));
                    cells.push(opt(r.key_node_ratio, f));
                }
                cells
            })
            .collect();
        (header, rows)
    }
}

impl Render for SweepReport {
    fn to_csv(&self) -> String {
        let (h, r) = self.cells(num);
        csv(&h, &r)
    }
    fn to_table(&self) -> String {
        let (h, r) = self.cells(sig6);
        let mut out = aligned(&h, &r);
        let bps: Vec<String> = self.breakpoints.iter().map(|&c| sig6(c)).collect();
        let _ = writeln!(out, "breakpoints: {}", bps.join(" "));
        out
    }
    fn to_json(&self) -> String {
        json(self)
    }
}

/// `φ(ν*(c))` and `ν*(c)` over a budget grid, optionally against the degree heuristics.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepReport> {
    let inst = Instance::prepare(config)?;
    let budgets = require_budgets(config, inst.floor())?;
    let graph = match (config.heuristics, &inst.graph) {
        (true, None) => {
            return Err(Error::InvalidParameter(
                "--heuristics needs a graph input (degrees are undefined for a direct A, B system)".into(),
            ))
        }
        (true, Some(g)) => Some(g),
        (false, _) => None,
    };
    let schedule = BudgetSchedule::build(&inst.model, &inst.lower)?;
    let rows = budgets
        .par_iter()
        .map(|&c| -> Result<SweepRow> {
            let (nu, regime) = schedule.evaluate(c)?;
            let value = phi(&nu, &inst.model)?.value;
            let (degree_ratio, key_node_ratio) = match graph {
                Some(g) => {
                    let w = phi(&heuristic_degree(c, g, &inst.lower)?.nu, &inst.model)?.value;
                    let key = phi(&heuristic_key_node(c, g, &inst.lower)?.nu, &inst.model)?.value;
                    (Some(w / value), Some(key / value))
                }
                None => (None, None),
            };
            Ok(SweepRow {
                budget: c,
                value,
                regime_index: regime_index(regime),
                nu,
                degree_ratio,
                key_node_ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        breakpoints: schedule.breakpoints().to_vec(),
        rows,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScheduleRow {
    pub k: usize,
    pub breakpoint: f64,
    /// 1-based members of the active set in force just above this breakpoint.
    pub active_set: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScheduleReport {
    pub floor: f64,
    pub rows: Vec<ScheduleRow>,
}

impl ScheduleReport {
    fn cells(&self, f: fn(f64) -> String) -> (Vec<String>, Vec<Vec<String>>) {
        let header = ["k", "breakpoint", "size", "members"].map(String::from).to_vec();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    f(r.breakpoint),
                    r.active_set.len().to_string(),
                    members(&r.active_set),
                ]
            })
            .collect();
        (header, rows)
    }
}

impl Render for ScheduleReport {
    fn to_csv(&self) -> String {
        let (h, r) = self.cells(num);
        csv(&h, &r)
    }
    fn to_table(&self) -> String {
        let (h, r) = self.cells(sig6);
        aligned(&h, &r)
    }
    fn to_json(&self) -> String {
        json(self)
    }
}

/// Breakpoints `c⁰ > … > 𝟙'd` and their active sets, descending in budget.
pub fn cmd_schedule(config: &RunConfig) -> Result<ScheduleReport> {
    let inst = Instance::prepare(config)?;
    let schedule = BudgetSchedule::build(&inst.model, &inst.lower)?;
    Ok(ScheduleReport {
        floor: schedule.floor(),
        rows: schedule
            .breakpoints()
            .iter()
            .zip(schedule.active_sets())
            .enumerate()
            .map(|(k, (&c, set))| ScheduleRow {
                k,
                breakpoint: c,
                active_set: set.iter().map(|i| i + 1).collect(),
            })
            .collect(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TopologySummary {
    pub name: String,
    pub generator: String,
    pub threshold: f64,
    pub total_mass: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TopologyRow {
    pub budget: f64,
    /// `φ(ν*(c))` per topology, in the order of `topologies`.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TopologyComparison {
    pub n: usize,
    pub seed: u64,
    pub topologies: Vec<TopologySummary>,
    pub rows: Vec<TopologyRow>,
    /// `c⁰_BA > c⁰_ER`.
    pub ba_threshold_exceeds_er: bool,
    /// `φ_BA(c) > φ_ER(c)` at every swept budget below both thresholds;
    /// `None` if no budget falls there.
    pub ba_costlier_at_low_budget: Option<bool>,
}

impl TopologyComparison {
    fn cells(&self, f: fn(f64) -> String) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = vec!["budget".to_string()];
        header.extend(self.topologies.iter().map(|t| format!("phi_{}", t.name)));
        header.extend(self.topologies.iter().map(|t| format!("c0_{}", t.name)));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![f(r.budget)];
                cells.extend(r.values.iter().map(|&v| f(v)));
                cells.extend(self.topologies.iter().map(|t| f(t.threshold)));
                cells
            })
            .collect();
        (header, rows)
    }
}

impl Render for TopologyComparison {
    fn to_csv(&self) -> String {
        let (h, r) = self.cells(num);
        csv(&h, &r)
    }
    fn to_table(&self) -> String {
        let (h, r) = self.cells(sig6);
        let mut out = aligned(&h, &r);
        let _ = writeln!(out, "c0_ba > c0_er: {}", self.ba_threshold_exceeds_er);
        let low = self
            .ba_costlier_at_low_budget
            .map_or("n/a".to_string(), |b| b.to_string());
        let _ = writeln!(out, "phi_ba > phi_er below both thresholds: {low}");
        out
    }
    fn to_json(&self) -> String {
        json(self)
    }
}

/// Regular, Erdős-Rényi and preferential-attachment networks of the same size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopologyParams {
    pub regular_degree: usize,
    pub er_probability: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        Self {
            regular_degree: 4,
            er_probability: 0.25,
        }
    }
}

/// Runs the three-topology comparison at `n` nodes. Without an explicit
/// sweep the budgets span `[n·d, 2n·d]` in 41 steps.
pub fn cmd_compare_topologies(config: &RunConfig, n: usize, params: TopologyParams) -> Result<TopologyComparison> {
    let lambda = config
        .lambda
        .as_ref()
        .map_or(Ok(DEFAULT_LAMBDA), |s| s.scalar("--lambda"))?;
    let d = config.lower.scalar("--d")?;
    let seed = config.seed;
    let topologies = [
        (
            "regular",
            GraphModel::Regular {
                degree: params.regular_degree,
            },
        ),
        (
            "er",
            GraphModel::ErdosRenyi {
                p: params.er_probability,
            },
        ),
        ("ba", GraphModel::PreferentialAttachment),
    ];
    let mut summaries = Vec::new();
    let mut schedules = Vec::new();
    let lower = vec![d; n];
    for (name, model) in topologies {
        let g = generate_graph(model, n, seed)?;
        let sys = build_friedkin_johnsen(&g, &StubbornnessProfile::uniform(n, lambda)?)?;
        let rm = ResponseModel::from_system(&sys)?;
        let schedule = BudgetSchedule::build(&rm, &lower)?;
        summaries.push(TopologySummary {
            name: name.to_string(),
            generator: model.to_string(),
            threshold: schedule.threshold(),
            total_mass: rm.total_mass(),
        });
        schedules.push((rm, schedule));
    }
    let floor = d * n as f64;
    let spec = config.budget.clone().unwrap_or(BudgetSpec::Sweep {
        from: floor,
        to: 2.0 * floor,
        steps: 41,
    });
    let budgets = spec.budgets()?;
    if let Some(&c) = budgets.iter().find(|&&c| c < floor * (1.0 - 1e-12)) {
        return Err(Error::BudgetInfeasible { budget: c, floor });
    }
    let rows = budgets
        .par_iter()
        .map(|&c| -> Result<TopologyRow> {
            let values = schedules
                .iter()
                .map(|(rm, s)| Ok(phi(&s.evaluate(c)?.0, rm)?.value))
                .collect::<Result<Vec<_>>>()?;
            Ok(TopologyRow { budget: c, values })
        })
        .collect::<Result<Vec<_>>>()?;
    let (c0_er, c0_ba) = (summaries[1].threshold, summaries[2].threshold);
    let low: Vec<&TopologyRow> = rows.iter().filter(|r| r.budget < c0_er.min(c0_ba)).collect();
    let ba_costlier_at_low_budget = if low.is_empty() {
        None
    } else {
        Some(low.iter().all(|r| r.values[2] > r.values[1]))
    };
    Ok(TopologyComparison {
        n,
        seed,
        topologies: summaries,
        rows,
        ba_threshold_exceeds_er: c0_ba > c0_er,
        ba_costlier_at_low_budget,
    })
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "opinion-shield",
    version,
    about = "Optimal budgeted protection of opinion networks against worst-case attacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Input centrality π, degrees, 𝟙'H𝟙 and the high-budget threshold c⁰.
    Centrality(CommonArgs),
    /// Optimal protection ν*(c) at one budget.
    Solve(CommonArgs),
    /// ν*(c) and φ(ν*(c)) over a budget sweep.
    Sweep(CommonArgs),
    /// Breakpoints of the regime structure with their active sets.
    Schedule(CommonArgs),
    /// Regular vs Erdős-Rényi vs preferential-attachment comparison.
    CompareTopologies(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Edge list, or a `.json` matrix document.
    #[arg(long, conflicts_with = "generate")]
    pub input: Option<PathBuf>,
    /// Random topology: regular:<k>, er:<p> or ba.
    #[arg(long)]
    pub generate: Option<String>,
    /// Node count for --generate.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Susceptibility λ: a scalar or a file of per-node values.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Lower bounds d: a scalar or a file of per-source values.
    #[arg(long, default_value = "1")]
    pub d: String,
    #[arg(long, conflicts_with = "sweep")]
    pub budget: Option<f64>,
    /// from:to:steps
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Add the degree-proportional and key-node ratios to a sweep.
    #[arg(long)]
    pub heuristics: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 4)]
    pub regular_degree: usize,
    #[arg(long, default_value_t = 0.25)]
    pub er_p: f64,
}

impl CommonArgs {
    pub fn to_config(&self, needs_source: bool) -> Result<RunConfig> {
        let source = match (&self.input, &self.generate) {
            (Some(path), _) => NetworkSource::File(path.clone()),
            (None, Some(spec)) => NetworkSource::Generate {
                model: spec.parse()?,
                n: self
                    .n
                    .ok_or_else(|| Error::InvalidParameter("--generate needs --n".into()))?,
                seed: self.seed,
            },
            (None, None) if !needs_source => NetworkSource::Generate {
                model: GraphModel::PreferentialAttachment,
                n: self.n.unwrap_or(2),
                seed: self.seed,
            },
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "one of --input or --generate is required".into(),
                ))
            }
        };
        let budget = match (self.budget, &self.sweep) {
            (Some(c), _) => Some(BudgetSpec::Single(c)),
            (None, Some(s)) => Some(BudgetSpec::parse_sweep(s)?),
            (None, None) => None,
        };
        Ok(RunConfig {
            source,
            lambda: self.lambda.as_deref().map(VectorSpec::parse).transpose()?,
            lower: VectorSpec::parse(&self.d)?,
            budget,
            format: self.format,
            heuristics: self.heuristics,
            seed: self.seed,
        })
    }
}

/// Executes a parsed command line and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    let (common, rendered) = match &cli.command {
        Command::Centrality(a) => (a, cmd_centrality(&a.to_config(true)?)?.render(a.format)),
        Command::Solve(a) => (a, cmd_solve(&a.to_config(true)?)?.render(a.format)),
        Command::Sweep(a) => (a, cmd_sweep(&a.to_config(true)?)?.render(a.format)),
        Command::Schedule(a) => (a, cmd_schedule(&a.to_config(true)?)?.render(a.format)),
        Command::CompareTopologies(a) => {
            let c = &a.common;
            let n =
                c.n.ok_or_else(|| Error::InvalidParameter("compare-topologies needs --n".into()))?;
            let params = TopologyParams {
                regular_degree: a.regular_degree,
                er_probability: a.er_p,
            };
            (
                c,
                cmd_compare_topologies(&c.to_config(false)?, n, params)?.render(c.format),
            )
        }
    };
    Ok((rendered, common.out.clone()))
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io {
                path: "stdout".into(),
                message: e.to_string(),
            })
        }
    }
}

/// Entry point for the binary; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::SUCCESS };
        }
    };
    match execute(&cli).and_then(|(text, out)| write_output(&text, out.as_deref())) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
