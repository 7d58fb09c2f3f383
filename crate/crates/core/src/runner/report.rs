//! Test reports and their two renderings.
//!
//! The machine-readable format is JSON lines. Every record has a `record`
//! key (`feature`, `scenario`, `step` or `summary`); the others are:
//!
//! | record     | keys                                                             |
//! |------------|------------------------------------------------------------------|
//! | `feature`  | `feature`, `tags`                                                |
//! | `scenario` | `feature`, `scenario`, `tags`, `status`, `trace`, `diagnostic`   |
//! | `step`     | `feature`, `scenario`, `keyword`, `kind`, `step`, `status`       |
//! | `summary`  | `scenarios`, `passed`, `failed`, `steps`, `wall_time_ms`         |
//!
//! Steps follow the scenario record they belong to.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gherkin::{Keyword, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Passed,
    Failed,
    Pending,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioStatus {
    Passed,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    /// Nothing selectable and nothing pending.
    Quiescent,
    /// Requests pending but blocked or delegated.
    Stuck,
    /// Step bound exhausted.
    StepBound,
    /// No binding for the step.
    Pending,
    Ambiguous,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub reason: FailureReason,
    pub message: String,
    /// The pattern an `eventually` step waited for.
    pub unmatched: Option<String>,
    pub pending_requests: Vec<String>,
    pub trace_tail: Vec<String>,
}

impl Diagnostic {
    pub fn new(reason: FailureReason, message: impl Into<String>) -> Self {
        Self {
            reason,
            message: message.into(),
            unmatched: None,
            pending_requests: Vec::new(),
            trace_tail: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub keyword: Keyword,
    pub kind: StepKind,
    pub text: String,
    pub status: StepStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub name: String,
    pub tags: Vec<String>,
    pub status: ScenarioStatus,
    pub steps: Vec<StepReport>,
    pub diagnostic: Option<Diagnostic>,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureReport {
    pub name: String,
    pub tags: Vec<String>,
    pub scenarios: Vec<ScenarioReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TestReport {
    pub features: Vec<FeatureReport>,
    pub wall_time_ms: u64,
}

impl TestReport {
    pub fn scenarios(&self) -> impl Iterator<Item = &ScenarioReport> {
        self.features.iter().flat_map(|f| &f.scenarios)
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios().count()
    }

    pub fn passed(&self) -> usize {
        self.scenarios().filter(|s| s.status == ScenarioStatus::Passed).count()
    }

    pub fn failed(&self) -> usize {
        self.scenarios().filter(|s| s.status == ScenarioStatus::Failed).count()
    }

    /// Scenarios with at least one pending step.
    pub fn pending(&self) -> usize {
        self.scenarios()
            .filter(|s| s.steps.iter().any(|st| st.status == StepStatus::Pending))
            .count()
    }

    pub fn step_count(&self) -> usize {
        self.scenarios().map(|s| s.steps.len()).sum()
    }

    pub fn is_success(&self) -> bool {
        self.failed() == 0 && self.pending() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Pretty,
    JsonLines,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pretty" => Ok(ReportFormat::Pretty),
            "json-lines" => Ok(ReportFormat::JsonLines),
            other => Err(format!("unknown report format '{other}' (expected pretty or json-lines)")),
        }
    }
}

pub fn write_report(report: &TestReport, format: ReportFormat, with_trace: bool) -> String {
    match format {
        ReportFormat::Pretty => pretty(report, with_trace),
        ReportFormat::JsonLines => json_lines(report),
    }
}

fn mark(status: StepStatus) -> &'static str {
    match status {
        StepStatus::Passed => "✔",
        StepStatus::Failed => "✘",
        StepStatus::Pending => "?",
        StepStatus::Skipped => "-",
    }
}

fn counts(total: usize, noun: &str, parts: &[(&str, usize)]) -> String {
    let parts: Vec<String> = parts
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(label, n)| format!("{n} {label}"))
        .collect();
    if parts.is_empty() {
        format!("{total} {noun}")
    } else {
        format!("{total} {noun} ({})", parts.join(", "))
    }
}

fn pretty(report: &TestReport, with_trace: bool) -> String {
    let mut out = String::new();
    for feature in &report.features {
        let _ = writeln!(out, "Feature: {}", feature.name);
        for scenario in &feature.scenarios {
            let head = if scenario.status == ScenarioStatus::Passed { "✔" } else { "✘" };
            let _ = writeln!(out, "  {head} Scenario: {}", scenario.name);
            for step in &scenario.steps {
                let _ = writeln!(out, "    {} {} {}", mark(step.status), step.keyword, step.text);
            }
            if let Some(d) = &scenario.diagnostic {
                let _ = writeln!(out, "      {}", d.message);
                if !d.pending_requests.is_empty() {
                    let _ = writeln!(out, "      pending requests:");
                    for p in &d.pending_requests {
                        let _ = writeln!(out, "        {p}");
                    }
                }
                if !d.trace_tail.is_empty() && !with_trace {
                    let _ = writeln!(out, "      last events:");
                    for e in &d.trace_tail {
                        let _ = writeln!(out, "        {e}");
                    }
                }
            }
            if with_trace {
                let _ = writeln!(out, "    trace:");
                for (i, e) in scenario.trace.iter().enumerate() {
                    let _ = writeln!(out, "    {i:>4}: {e}");
                }
            }
        }
        let _ = writeln!(out);
    }
    let steps = |status| report.scenarios().flat_map(|s| &s.steps).filter(|s| s.status == status).count();
    let _ = writeln!(
        out,
        "{}",
        counts(
            report.scenario_count(),
            "scenarios",
            &[("passed", report.passed()), ("failed", report.failed())]
        )
    );
    let _ = writeln!(
        out,
        "{}",
        counts(
            report.step_count(),
            "steps",
            &[
                ("passed", steps(StepStatus::Passed)),
                ("failed", steps(StepStatus::Failed)),
                ("pending", steps(StepStatus::Pending)),
                ("skipped", steps(StepStatus::Skipped)),
            ]
        )
    );
    let _ = writeln!(out, "finished in {} ms", report.wall_time_ms);
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Feature {
        feature: String,
        tags: Vec<String>,
    },
    Scenario {
        feature: String,
        scenario: String,
        tags: Vec<String>,
        status: ScenarioStatus,
        trace: Vec<String>,
        diagnostic: Option<Diagnostic>,
    },
    Step {
        feature: String,
        scenario: String,
        keyword: Keyword,
        kind: StepKind,
        step: String,
        status: StepStatus,
    },
    Summary {
        scenarios: usize,
        passed: usize,
        failed: usize,
        steps: usize,
        wall_time_ms: u64,
    },
}

fn json_lines(report: &TestReport) -> String {
    let mut records = Vec::new();
    for f in &report.features {
        records.push(Record::Feature {
            feature: f.name.clone(),
            tags: f.tags.clone(),
        });
        for s in &f.scenarios {
            records.push(Record::Scenario {
                feature: f.name.clone(),
                scenario: s.name.clone(),
                tags: s.tags.clone(),
                status: s.status,
                trace: s.trace.clone(),
                diagnostic: s.diagnostic.clone(),
            });
            for st in &s.steps {
                records.push(Record::Step {
                    feature: f.name.clone(),
                    scenario: s.name.clone(),
                    keyword: st.keyword,
                    kind: st.kind,
                    step: st.text.clone(),
                    status: st.status,
                });
            }
        }
    }
    records.push(Record::Summary {
        scenarios: report.scenario_count(),
        passed: report.passed(),
        failed: report.failed(),
        steps: report.step_count(),
        wall_time_ms: report.wall_time_ms,
    });
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r).expect("report records serialize"));
        out.push('\n');
    }
    out
}

/// Reads a JSON-lines report back.
pub fn parse_json_lines(text: &str) -> Result<TestReport> {
    let bad = |msg: String| Error::ReportFormat(msg);
    let mut report = TestReport::default();
    let mut summary = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let record: Record = serde_json::from_str(line).map_err(|e| bad(format!("line {}: {e}", i + 1)))?;
        if summary.is_some() {
            return Err(bad(format!("line {}: record after summary", i + 1)));
        }
        match record {
            Record::Feature { feature, tags } => report.features.push(FeatureReport {
                name: feature,
                tags,
                scenarios: Vec::new(),
            }),
            Record::Scenario {
                feature,
                scenario,
                tags,
                status,
                trace,
                diagnostic,
            } => {
                let f = report
                    .features
                    .last_mut()
                    .filter(|f| f.name == feature)
                    .ok_or_else(|| bad(format!("line {}: scenario outside its feature", i + 1)))?;
                f.scenarios.push(ScenarioReport {
                    name: scenario,
                    tags,
                    status,
                    steps: Vec::new(),
                    diagnostic,
                    trace,
                });
            }
            Record::Step {
                feature,
                scenario,
                keyword,
                kind,
                step,
                status,
            } => {
                let s = report
                    .features
                    .last_mut()
                    .filter(|f| f.name == feature)
                    .and_then(|f| f.scenarios.last_mut())
                    .filter(|s| s.name == scenario)
                    .ok_or_else(|| bad(format!("line {}: step outside its scenario", i + 1)))?;
                s.steps.push(StepReport {
                    keyword,
                    kind,
                    text: step,
                    status,
                });
            }
            Record::Summary {
                scenarios,
                passed,
                failed,
                steps,
                wall_time_ms,
            } => {
                report.wall_time_ms = wall_time_ms;
                summary = Some((scenarios, passed, failed, steps));
            }
        }
    }
    let expected = (
        report.scenario_count(),
        report.passed(),
        report.failed(),
        report.step_count(),
    );
    match summary {
        Some(s) if s == expected => Ok(report),
        Some(_) => Err(bad("summary counts disagree with the records".into())),
        None => Err(bad("missing summary record".into())),
    }
}
