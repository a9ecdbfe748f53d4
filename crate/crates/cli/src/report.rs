use serde::Serialize;

use qibench_core::closed_forms::DvPair;
use qibench_core::protocols::ResolvedScenario;
use qibench_core::qht_asymmetric::{RocCurve, RocPoint};
use qibench_core::qht_symmetric::BoundResult;
use qibench_core::validate::SuiteReport;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which computation produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    QcbClosed,
    QcbOracle,
    QreClosed,
    QreOracle,
    Homodyne,
    MonteCarlo,
}

impl MethodTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::QcbClosed => "qcb_closed",
            MethodTag::QcbOracle => "qcb_oracle",
            MethodTag::QreClosed => "qre_closed",
            MethodTag::QreOracle => "qre_oracle",
            MethodTag::Homodyne => "homodyne",
            MethodTag::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Output {
    Bound(BoundResult),
    RelativeEntropy(DvPair),
    Curve {
        copies: f64,
        clamped: bool,
        underflow: bool,
        points: Vec<RocPoint>,
    },
    Suite(SuiteReport),
}

impl Output {
    pub fn curve(c: &RocCurve) -> Self {
        Output::Curve {
            copies: c.copies,
            clamped: c.meta.clamped,
            underflow: c.meta.underflow,
            points: c.points.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: String,
    pub method: MethodTag,
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool_version: &'static str,
    pub command: String,
    pub scenarios: Vec<ResolvedScenario>,
    pub results: Vec<ResultRow>,
    /// Clamping, underflow, pure-mode and disagreement notices.
    pub warnings: Vec<String>,
    /// Seconds; left out of files so that they stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            scenarios: Vec::new(),
            results: Vec::new(),
            warnings: Vec::new(),
            wall_time: None,
        }
    }

    pub fn find(&self, scenario: &str, method: MethodTag) -> Option<&Output> {
        self.results
            .iter()
            .find(|r| r.scenario == scenario && r.method == method)
            .map(|r| &r.output)
    }
}
