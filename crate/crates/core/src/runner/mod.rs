//! Runs feature specifications against scenario engines.
//!
//! Every usage scenario gets a fresh engine. `Given`/`When` steps inject an
//! event and run the engine to quiescence; `Then` steps look for a matching
//! event after the last checkpoint, stepping further if needed.

mod action;
pub mod cli;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

pub use action::{capture, StepAction, StepContext};
pub use report::{
    parse_json_lines, write_report, Diagnostic, FailureReason, FeatureReport, ReportFormat,
    ScenarioReport, ScenarioStatus, StepReport, StepStatus, TestReport,
};

use crate::engine::{Engine, DEFAULT_STEP_BOUND};
use crate::error::{Error, Result};
use crate::gherkin::{filter_by_tags, match_step, parse_feature, FeatureSpec, StepRegistry, UsageScenario};

pub type EngineFactory = Arc<dyn Fn() -> Result<Engine> + Send + Sync>;

/// Named engine factories selectable from the command line.
#[derive(Clone, Default)]
pub struct EngineFactories {
    factories: BTreeMap<String, EngineFactory>,
}

impl EngineFactories {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn() -> Result<Engine> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Arc::new(factory));
    }

    pub fn get(&self, name: &str) -> Result<&EngineFactory> {
        self.factories
            .get(name)
            .ok_or_else(|| Error::UnknownEngine(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub features: Vec<PathBuf>,
    pub tags: String,
    /// Per usage scenario; at least 1.
    pub max_steps: usize,
    pub trace: bool,
    pub format: ReportFormat,
    pub engine: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            features: Vec::new(),
            tags: String::new(),
            max_steps: DEFAULT_STEP_BOUND,
            trace: false,
            format: ReportFormat::Pretty,
            engine: "composed".to_string(),
        }
    }
}

fn collect_feature_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if path.is_dir() {
        let mut entries = std::fs::read_dir(path)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(io)?;
        entries.sort();
        for entry in entries {
            if entry.is_dir() || entry.extension().is_some_and(|e| e == "feature") {
                collect_feature_files(&entry, out)?;
            }
        }
    } else {
        std::fs::metadata(path).map_err(io)?;
        out.push(path.to_path_buf());
    }
    Ok(())
}

/// Parses the given `.feature` files; directories are searched recursively
/// in name order.
pub fn load_features(paths: &[PathBuf]) -> Result<Vec<FeatureSpec>> {
    let mut files = Vec::new();
    for p in paths {
        collect_feature_files(p, &mut files)?;
    }
    files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).map_err(|source| Error::Io {
                path: f.clone(),
                source,
            })?;
            parse_feature(&text).map_err(|e| match e {
                Error::FeatureSyntax { line, message } => Error::FeatureSyntax {
                    line,
                    message: format!("{}: {message}", f.display()),
                },
                other => other,
            })
        })
        .collect()
}

fn run_scenario(
    scenario: &UsageScenario,
    tags: Vec<String>,
    factory: &(dyn Fn() -> Result<Engine> + Send + Sync),
    registry: &StepRegistry,
    max_steps: usize,
) -> ScenarioReport {
    let mut steps: Vec<StepReport> = scenario
        .steps
        .iter()
        .map(|s| StepReport {
            keyword: s.keyword,
            kind: s.kind,
            text: s.text.clone(),
            status: StepStatus::Skipped,
        })
        .collect();
    let report = |status: ScenarioStatus, steps: Vec<StepReport>, diagnostic, trace| ScenarioReport {
        name: scenario.name.clone(),
        tags: tags.clone(),
        status,
        steps,
        diagnostic,
        trace,
    };

    let mut engine = match factory() {
        Ok(engine) => engine.with_step_bound(max_steps),
        Err(e) => {
            let d = Diagnostic::new(FailureReason::Error, format!("engine construction failed: {e}"));
            return report(ScenarioStatus::Failed, steps, Some(d), Vec::new());
        }
    };
    let mut checkpoint = engine.trace().len();
    let mut diagnostic = None;

    for (i, step) in scenario.steps.iter().enumerate() {
        let outcome = match match_step(registry, step.kind, &step.text) {
            Err(e) => Err((StepStatus::Failed, Diagnostic::new(FailureReason::Ambiguous, e.to_string()))),
            Ok(None) => Err((
                StepStatus::Pending,
                Diagnostic::new(FailureReason::Pending, format!("no step binding for {} '{}'", step.kind, step.text)),
            )),
            Ok(Some(m)) => match m.binding.action() {
                StepAction::Pending { .. } => Err((
                    StepStatus::Pending,
                    Diagnostic::new(FailureReason::Pending, format!("step '{}' is not implemented yet", step.text)),
                )),
                action => {
                    let mut ctx = StepContext {
                        engine: &mut engine,
                        checkpoint: &mut checkpoint,
                        max_steps,
                    };
                    action::execute(action, &m.captures, &mut ctx).map_err(|d| (StepStatus::Failed, d))
                }
            },
        };
        match outcome {
            Ok(()) => steps[i].status = StepStatus::Passed,
            Err((status, d)) => {
                steps[i].status = status;
                diagnostic = Some(d);
                break;
            }
        }
    }

    let status = if diagnostic.is_none() {
        ScenarioStatus::Passed
    } else {
        ScenarioStatus::Failed
    };
    let trace = engine.trace().iter().map(|e| e.to_string()).collect();
    report(status, steps, diagnostic, trace)
}

/// Runs every usage scenario of `feature`, each on a fresh engine.
pub fn run_feature(
    feature: &FeatureSpec,
    factory: &(dyn Fn() -> Result<Engine> + Send + Sync),
    registry: &StepRegistry,
    config: &RunConfig,
) -> FeatureReport {
    let max_steps = config.max_steps.max(1);
    FeatureReport {
        name: feature.name.clone(),
        tags: feature.tags.iter().cloned().collect(),
        scenarios: feature
            .scenarios
            .iter()
            .map(|s| {
                let tags = s.tags.iter().cloned().collect();
                run_scenario(s, tags, factory, registry, max_steps)
            })
            .collect(),
    }
}

/// Tag-filters and runs already parsed features in order.
pub fn run_features(
    features: &[FeatureSpec],
    factory: &(dyn Fn() -> Result<Engine> + Send + Sync),
    registry: &StepRegistry,
    config: &RunConfig,
) -> Result<TestReport> {
    let started = Instant::now();
    let selected = filter_by_tags(features, &config.tags)?;
    let features = selected
        .iter()
        .map(|f| run_feature(f, factory, registry, config))
        .collect();
    Ok(TestReport {
        features,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// Loads the configured feature files and runs them against the configured engine.
pub fn run_suite(config: &RunConfig, factories: &EngineFactories, registry: &StepRegistry) -> Result<TestReport> {
    if config.max_steps == 0 {
        return Err(Error::ZeroStepBudget);
    }
    let factory = factories.get(&config.engine)?;
    let features = load_features(&config.features)?;
    run_features(&features, factory.as_ref(), registry, config)
}
