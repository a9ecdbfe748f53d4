//! The four subcommands as plain functions returning reports and files.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use qibench_core::closed_forms::DvPair;
use qibench_core::gaussian::is_physical;
use qibench_core::homodyne::{monte_carlo_roc, roc_homodyne, threshold_for_pfa, HomodyneChannel};
use qibench_core::protocols::{
    figure_grid, FigurePanel, PanelKind, ResolvedScenario, Scenario, FIGURE_IDS,
};
use qibench_core::qht_asymmetric::{
    check_probability_grid, log_grid, relative_entropy_stats, roc_from_dv, RocCurve, RocMeta,
};
use qibench_core::qht_symmetric::{qcb, BoundResult};
use qibench_core::scalar::rel_diff;
use qibench_core::validate::{run_all, ValidateOptions};
use qibench_core::{Dd, GaussianState};

use crate::error::CliResult;
use crate::output::{to_json, Table};
use crate::report::{MethodTag, Output, ResultRow, RunReport, TOOL_VERSION};

pub const ROC_HEADER: &str = "p_fa,p_md,scenario,method";
pub const SWEEP_HEADER: &str = "copies,p_err,scenario,method";

/// Relative closed-form/oracle gap above which `bound` warns.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Oracle,
    Both,
}

impl Method {
    fn closed(self) -> bool {
        self != Method::Oracle
    }

    fn oracle(self) -> bool {
        self != Method::Closed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Optimal,
    Homodyne,
}

/// Log-spaced false-alarm grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn default_for(detector: Detector) -> Self {
        match detector {
            Detector::Optimal => GridSpec {
                min: 1e-4,
                max: 0.9,
                points: 60,
            },
            Detector::Homodyne => GridSpec {
                min: 1e-6,
                max: 1.0 - 1e-3,
                points: 200,
            },
        }
    }

    /// Defaults for `detector` with any explicit overrides applied.
    pub fn with_overrides(
        detector: Detector,
        min: Option<f64>,
        max: Option<f64>,
        points: Option<usize>,
    ) -> Self {
        let d = GridSpec::default_for(detector);
        GridSpec {
            min: min.unwrap_or(d.min),
            max: max.unwrap_or(d.max),
            points: points.unwrap_or(d.points),
        }
    }

    pub fn values(&self) -> CliResult<Vec<f64>> {
        let grid = log_grid(self.min, self.max, self.points)?;
        check_probability_grid(&grid)?;
        Ok(grid)
    }
}

/// Overrides of the default false-alarm grids.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GridOverrides {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

impl GridOverrides {
    pub fn spec(&self, detector: Detector) -> GridSpec {
        GridSpec::with_overrides(detector, self.min, self.max, self.points)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocOptions {
    pub detector: Detector,
    pub method: Method,
    pub grid: GridOverrides,
    pub seed: u64,
    /// Monte Carlo samples per hypothesis (homodyne oracle only).
    pub trials: u64,
}

/// Rows, curves and warnings of one scenario.
#[derive(Default)]
struct Partial {
    rows: Vec<ResultRow>,
    curves: Vec<(MethodTag, RocCurve)>,
    warnings: Vec<String>,
}

impl Partial {
    fn row(&mut self, scenario: &str, method: MethodTag, output: Output) {
        self.rows.push(ResultRow {
            scenario: scenario.to_string(),
            method,
            output,
        });
    }

    fn curve(&mut self, scenario: &str, method: MethodTag, curve: RocCurve) {
        if curve.meta.clamped {
            self.warnings.push(format!(
                "{scenario} ({}): missed-detection probability clamped to 1 at some points",
                method.as_str()
            ));
        }
        if curve.meta.underflow {
            self.warnings.push(format!(
                "{scenario} ({}): missed-detection probability underflows at some points; ln_p_md is kept",
                method.as_str()
            ));
        }
        self.row(scenario, method, Output::curve(&curve));
        self.curves.push((method, curve));
    }
}

fn resolve_all(scenarios: &[Scenario]) -> CliResult<Vec<ResolvedScenario>> {
    let resolved = scenarios
        .iter()
        .map(|s| s.resolve())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(resolved)
}

fn scenario_warnings(r: &ResolvedScenario) -> Vec<String> {
    let mut w = Vec::new();
    if r.underflow {
        w.push(format!("{}: a Planck occupation underflowed to 0", r.id()));
    }
    w
}

fn pure_mode_warnings(id: &str, states: [&GaussianState<Dd>; 2]) -> Vec<String> {
    states
        .iter()
        .zip(["target-absent", "target-present"])
        .filter(|(s, _)| is_physical(*s).min_nu - 0.5 <= 1e-10)
        .map(|(_, name)| format!("{id}: {name} state is pure; the exact pure-mode limit is used"))
        .collect()
}

/// Runs `work` over the scenarios in parallel and merges the parts in
/// scenario order.
fn gather(
    report: &mut RunReport,
    resolved: &[ResolvedScenario],
    work: impl Fn(&ResolvedScenario) -> CliResult<Partial> + Sync,
) -> CliResult<Vec<Partial>> {
    let parts = resolved
        .par_iter()
        .map(&work)
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?;
    for (r, p) in resolved.iter().zip(&parts) {
        report.warnings.extend(scenario_warnings(r));
        report.warnings.extend(p.warnings.iter().cloned());
        report.results.extend(p.rows.iter().cloned());
    }
    report.scenarios = resolved.to_vec();
    Ok(parts)
}

fn oracle_bound(r: &ResolvedScenario, part: &mut Partial) -> CliResult<BoundResult> {
    let pair = r.hypothesis_pair::<Dd>()?;
    part.warnings
        .extend(pure_mode_warnings(r.id(), [&pair.rho0, &pair.rho1]));
    Ok(qcb(&pair.rho0, &pair.rho1, r.copies())?)
}

fn bound_one(r: &ResolvedScenario, method: Method) -> CliResult<Partial> {
    let mut part = Partial::default();
    let closed = if method.closed() {
        let b = r.closed_qcb()?;
        part.row(r.id(), MethodTag::QcbClosed, Output::Bound(b.clone()));
        Some(b)
    } else {
        None
    };
    if method.oracle() {
        let b = oracle_bound(r, &mut part)?;
        if let Some(c) = &closed {
            let gap = rel_diff(c.exponent, b.exponent);
            if gap > AGREEMENT_TOL {
                part.warnings.push(format!(
                    "{}: closed-form exponent differs from the oracle by {gap:.3e} (relative)",
                    r.id()
                ));
            }
        }
        part.row(r.id(), MethodTag::QcbOracle, Output::Bound(b));
    }
    Ok(part)
}

/// Chernoff-type bounds of every scenario.
pub fn bound(scenarios: &[Scenario], method: Method) -> CliResult<RunReport> {
    let mut report = RunReport::new("bound");
    let resolved = resolve_all(scenarios)?;
    gather(&mut report, &resolved, |r| bound_one(r, method))?;
    Ok(report)
}

fn roc_one(r: &ResolvedScenario, opts: &RocOptions, grid: &[f64]) -> CliResult<Partial> {
    let mut part = Partial::default();
    let id = r.id();
    let meta = |method: MethodTag| RocMeta {
        scenario: id.to_string(),
        method: method.as_str().to_string(),
        ..Default::default()
    };
    match opts.detector {
        Detector::Optimal => {
            if opts.method.closed() {
                let dv = r.closed_qre()?;
                let tag = MethodTag::QreClosed;
                part.row(id, tag, Output::RelativeEntropy(dv));
                let curve = roc_from_dv(dv.d, dv.v, r.copies(), grid, meta(tag))?;
                part.curve(id, tag, curve);
            }
            if opts.method.oracle() {
                let pair = r.hypothesis_pair::<Dd>()?;
                let st = relative_entropy_stats(&pair.rho0, &pair.rho1)?;
                let dv = DvPair { d: st.d, v: st.v };
                let tag = MethodTag::QreOracle;
                part.row(id, tag, Output::RelativeEntropy(dv));
                let curve = roc_from_dv(dv.d, dv.v, r.copies(), grid, meta(tag))?;
                part.curve(id, tag, curve);
            }
        }
        Detector::Homodyne => {
            let ch = HomodyneChannel::from_scenario(r)?;
            if opts.method.closed() {
                let mut curve = roc_homodyne(&ch, grid)?;
                curve.meta = RocMeta {
                    underflow: curve.meta.underflow,
                    ..meta(MethodTag::Homodyne)
                };
                part.curve(id, MethodTag::Homodyne, curve);
            }
            if opts.method.oracle() {
                let thresholds = grid
                    .iter()
                    .map(|&p| threshold_for_pfa(p, &ch))
                    .collect::<Result<Vec<_>, _>>()?;
                let mc = monte_carlo_roc(&ch, &thresholds, opts.trials, opts.seed)?;
                let mut curve = mc.to_curve(r.copies());
                curve.meta = meta(MethodTag::MonteCarlo);
                part.curve(id, MethodTag::MonteCarlo, curve);
            }
        }
    }
    Ok(part)
}

fn roc_table(parts: &[Partial], resolved: &[ResolvedScenario]) -> Table {
    let mut table = Table::new(ROC_HEADER);
    for (r, part) in resolved.iter().zip(parts) {
        for (tag, curve) in &part.curves {
            for p in &curve.points {
                table.push(p.p_fa, p.p_md, r.id(), tag.as_str());
            }
        }
    }
    table
}

/// ROC curves of every scenario and their CSV table.
pub fn roc(scenarios: &[Scenario], opts: &RocOptions) -> CliResult<(RunReport, Table)> {
    let grid = opts.grid.spec(opts.detector).values()?;
    let mut report = RunReport::new("roc");
    let resolved = resolve_all(scenarios)?;
    let parts = gather(&mut report, &resolved, |r| roc_one(r, opts, &grid))?;
    Ok((report, roc_table(&parts, &resolved)))
}

/// Panel ids named by a figure id: a panel id, `fig2`/`fig3`/`fig4`, or
/// `all`.
pub fn figure_panels(id: &str) -> CliResult<Vec<&'static str>> {
    let panels: Vec<&'static str> = match id {
        "all" => FIGURE_IDS.to_vec(),
        _ => FIGURE_IDS
            .iter()
            .copied()
            .filter(|p| *p == id || p.strip_prefix(id).is_some_and(|rest| rest.starts_with('_')))
            .collect(),
    };
    if panels.is_empty() {
        return Err(qibench_core::Error::UnknownFigure(id.to_string()).into());
    }
    Ok(panels)
}

/// Copies swept in the Chernoff panels: 81 log-spaced points from 1 to
/// 1e8, rounded to integers, duplicates dropped.
pub fn copies_sweep() -> Vec<f64> {
    let mut m: Vec<f64> = log_grid(1.0, 1e8, 81)
        .expect("fixed grid")
        .into_iter()
        .map(f64::round)
        .collect();
    m.dedup();
    m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureOptions {
    pub method: Method,
    pub grid: GridOverrides,
    pub seed: u64,
    pub trials: u64,
}

#[derive(Serialize)]
struct SweepSpec {
    min: f64,
    max: f64,
    points: usize,
}

#[derive(Serialize)]
struct PanelEntry {
    id: String,
    kind: PanelKind,
    file: String,
    rows: usize,
    sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    detector: Option<Detector>,
    x_grid: SweepSpec,
    scenarios: Vec<ResolvedScenario>,
}

#[derive(Serialize)]
struct Manifest {
    tool_version: &'static str,
    figure: String,
    method: Method,
    seed: u64,
    trials: u64,
    panels: Vec<PanelEntry>,
    warnings: Vec<String>,
}

struct PanelOutput {
    entry: PanelEntry,
    csv: String,
    warnings: Vec<String>,
}

fn sweep_panel(
    panel: &FigurePanel,
    method: Method,
) -> CliResult<(Table, Vec<ResolvedScenario>, Vec<String>)> {
    let resolved = resolve_all(&panel.scenarios)?;
    let mut report = RunReport::new("figure");
    let parts = gather(&mut report, &resolved, |r| bound_one(r, method))?;
    let copies = copies_sweep();
    let mut table = Table::new(SWEEP_HEADER);
    for (r, part) in resolved.iter().zip(&parts) {
        for row in &part.rows {
            if let Output::Bound(b) = &row.output {
                for &m in &copies {
                    table.push(m, b.with_copies(m).value, r.id(), row.method.as_str());
                }
            }
        }
    }
    Ok((table, resolved, report.warnings))
}

fn figure_panel(id: &str, opts: &FigureOptions) -> CliResult<PanelOutput> {
    let panel = figure_grid(id)?;
    let (table, scenarios, warnings, detector, x_grid) = match panel.kind {
        PanelKind::ChernoffVsCopies => {
            let (table, scenarios, warnings) = sweep_panel(&panel, opts.method)?;
            let sweep = copies_sweep();
            let spec = SweepSpec {
                min: sweep[0],
                max: sweep[sweep.len() - 1],
                points: sweep.len(),
            };
            (table, scenarios, warnings, None, spec)
        }
        PanelKind::RelativeEntropyRoc | PanelKind::HomodyneRoc => {
            let detector = if panel.kind == PanelKind::HomodyneRoc {
                Detector::Homodyne
            } else {
                Detector::Optimal
            };
            let roc_opts = RocOptions {
                detector,
                method: opts.method,
                grid: opts.grid,
                seed: opts.seed,
                trials: opts.trials,
            };
            let (report, table) = roc(&panel.scenarios, &roc_opts)?;
            let g = opts.grid.spec(detector);
            let spec = SweepSpec {
                min: g.min,
                max: g.max,
                points: g.points,
            };
            (
                table,
                report.scenarios,
                report.warnings,
                Some(detector),
                spec,
            )
        }
    };
    let csv = table.render();
    let entry = PanelEntry {
        id: id.to_string(),
        kind: panel.kind,
        file: format!("{id}.csv"),
        rows: table.rows(),
        sha256: hex::encode(Sha256::digest(csv.as_bytes())),
        detector,
        x_grid,
        scenarios,
    };
    Ok(PanelOutput {
        entry,
        csv,
        warnings,
    })
}

/// Files of a figure: one CSV per panel, then `manifest.json`.
pub fn figure(id: &str, opts: &FigureOptions) -> CliResult<Vec<(String, String)>> {
    let panels = figure_panels(id)?;
    let outputs = panels
        .par_iter()
        .map(|p| figure_panel(p, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?;
    let mut files = Vec::new();
    let mut manifest = Manifest {
        tool_version: TOOL_VERSION,
        figure: id.to_string(),
        method: opts.method,
        seed: opts.seed,
        trials: opts.trials,
        panels: Vec::new(),
        warnings: Vec::new(),
    };
    for out in outputs {
        files.push((out.entry.file.clone(), out.csv));
        manifest.warnings.extend(out.warnings);
        manifest.panels.push(out.entry);
    }
    files.push(("manifest.json".to_string(), to_json(&manifest)?));
    Ok(files)
}

/// Runs the validation suites; the caller decides how to treat failures.
pub fn validate(opts: &ValidateOptions) -> CliResult<RunReport> {
    let mut report = RunReport::new("validate");
    for suite in run_all(opts)? {
        let (scenario, method) = match suite.name.as_str() {
            "qre_closed_vs_oracle" => ("oracle_grid", MethodTag::QreOracle),
            "amp_noise_free_vs_optical" => ("limit_grid", MethodTag::QcbClosed),
            "hypothesis_pair_path_independence" => ("figure_scenarios", MethodTag::QreOracle),
            _ => ("oracle_grid", MethodTag::QcbOracle),
        };
        if !suite.passed {
            report.warnings.push(format!(
                "suite {} failed: max relative deviation {:.3e} > {:.0e} at {}",
                suite.name, suite.max_rel_dev, suite.tolerance, suite.worst_case
            ));
        }
        report.results.push(ResultRow {
            scenario: scenario.to_string(),
            method,
            output: Output::Suite(suite),
        });
    }
    Ok(report)
}

/// Suites in `report` that did not pass.
pub fn failed_suites(report: &RunReport) -> Vec<&str> {
    report
        .results
        .iter()
        .filter_map(|r| match &r.output {
            Output::Suite(s) if !s.passed => Some(s.name.as_str()),
            _ => None,
        })
        .collect()
}
