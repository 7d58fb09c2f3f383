use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::engine::program::Env;
use crate::engine::{Engine, EventTemplate, PatternTemplate, RunEnd, StepOutcome, Term};
use crate::error::{Error, Result};
use crate::event::{matches, Event, EventPattern, ParamValue};
use crate::gherkin::StepKind;

use super::report::{Diagnostic, FailureReason};

/// Refers to the `n`-th (1-based) capture group of the step pattern.
pub fn capture(n: usize) -> Term {
    Term::Var(format!("${n}"))
}

type CustomFn = dyn Fn(&[String], &mut StepContext<'_>) -> Result<(), Diagnostic> + Send + Sync;

/// What a bound step does when executed.
#[derive(Clone)]
pub enum StepAction {
    /// Inject the event, then run the engine to quiescence.
    Trigger(EventTemplate),
    /// Pass once a matching event is selected after the last checkpoint.
    Eventually(PatternTemplate),
    Custom { params: usize, run: Arc<CustomFn> },
    /// Placeholder body of a generated stub; reported as pending.
    Pending { params: usize },
}

impl fmt::Debug for StepAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepAction::Trigger(t) => f.debug_tuple("Trigger").field(t).finish(),
            StepAction::Eventually(p) => f.debug_tuple("Eventually").field(p).finish(),
            StepAction::Custom { params, .. } => f.debug_struct("Custom").field("params", params).finish(),
            StepAction::Pending { params } => f.debug_struct("Pending").field("params", params).finish(),
        }
    }
}

fn max_capture(term: &Term) -> usize {
    match term {
        Term::Lit(_) => 0,
        Term::Var(name) => name
            .strip_prefix('$')
            .and_then(|n| n.parse().ok())
            .unwrap_or(0),
        Term::Call(_, args) => args.iter().map(max_capture).max().unwrap_or(0),
    }
}

impl StepAction {
    pub fn trigger(event: impl Into<EventTemplate>) -> Self {
        StepAction::Trigger(event.into())
    }

    pub fn eventually(pattern: impl Into<PatternTemplate>) -> Self {
        StepAction::Eventually(pattern.into())
    }

    pub fn custom<F>(params: usize, run: F) -> Self
    where
        F: Fn(&[String], &mut StepContext<'_>) -> Result<(), Diagnostic> + Send + Sync + 'static,
    {
        StepAction::Custom {
            params,
            run: Arc::new(run),
        }
    }

    /// Number of captured strings the action consumes.
    pub fn params(&self) -> usize {
        match self {
            StepAction::Trigger(t) => t.params.iter().map(max_capture).max().unwrap_or(0),
            StepAction::Eventually(p) => p.params.iter().flatten().map(max_capture).max().unwrap_or(0),
            StepAction::Custom { params, .. } | StepAction::Pending { params } => *params,
        }
    }

    pub(crate) fn check_kind(&self, kind: StepKind) -> Result<()> {
        let misplaced = |action| {
            Err(Error::MisplacedAction {
                action,
                kind: kind.as_str(),
            })
        };
        match (self, kind) {
            (StepAction::Trigger(_), StepKind::Then) => misplaced("trigger"),
            (StepAction::Eventually(_), StepKind::Given | StepKind::When) => misplaced("eventually"),
            _ => Ok(()),
        }
    }
}

/// Engine access for step actions within one usage scenario.
pub struct StepContext<'a> {
    pub(crate) engine: &'a mut Engine,
    pub(crate) checkpoint: &'a mut usize,
    pub(crate) max_steps: usize,
}

fn trace_tail(engine: &Engine) -> Vec<String> {
    const TAIL: usize = 10;
    let trace = engine.trace();
    trace[trace.len().saturating_sub(TAIL)..]
        .iter()
        .map(|e| e.to_string())
        .collect()
}

impl StepContext<'_> {
    pub fn engine(&self) -> &Engine {
        self.engine
    }

    /// First trace position the next `eventually` may match at.
    pub fn checkpoint(&self) -> usize {
        *self.checkpoint
    }

    fn failure(&self, reason: FailureReason, message: String) -> Diagnostic {
        Diagnostic {
            reason,
            message,
            unmatched: None,
            pending_requests: Vec::new(),
            trace_tail: trace_tail(self.engine),
        }
    }

    fn engine_error(&self, err: Error) -> Diagnostic {
        match err {
            Error::StepBoundExceeded { bound } => self.failure(
                FailureReason::StepBound,
                format!("step bound of {bound} exceeded, possible livelock"),
            ),
            other => self.failure(FailureReason::Error, other.to_string()),
        }
    }

    /// Injects `event` and runs the engine until nothing is selectable.
    pub fn trigger(&mut self, event: Event) -> Result<(), Diagnostic> {
        self.engine.inject(event).map_err(|e| self.engine_error(e))?;
        match self.engine.run_to_quiescence(self.max_steps) {
            Ok(run) => match run.end {
                RunEnd::Quiescent(_) => Ok(()),
                RunEnd::BudgetExhausted => Err(self.failure(
                    FailureReason::StepBound,
                    format!("no quiescence within {} steps, possible livelock", self.max_steps),
                )),
            },
            Err(e) => Err(self.engine_error(e)),
        }
    }

    /// Waits for an event matching `pattern` at or after the checkpoint.
    pub fn eventually(&mut self, pattern: &EventPattern) -> Result<(), Diagnostic> {
        let start = *self.checkpoint;
        let roles = self.engine.roles();
        if let Some(offset) = self.engine.trace()[start..]
            .iter()
            .position(|e| matches(pattern, e, roles))
        {
            *self.checkpoint = start + offset + 1;
            return Ok(());
        }
        loop {
            match self.engine.step() {
                Ok(StepOutcome::Selected(e)) => {
                    if matches(pattern, &e, self.engine.roles()) {
                        *self.checkpoint = self.engine.trace().len();
                        return Ok(());
                    }
                }
                Ok(StepOutcome::Quiescent(q)) => {
                    let (reason, state) = if q.is_stuck() {
                        (FailureReason::Stuck, "stuck with pending requests")
                    } else {
                        (FailureReason::Quiescent, "quiescent")
                    };
                    let mut d = self.failure(
                        reason,
                        format!("expected {pattern} but the engine is {state}"),
                    );
                    d.unmatched = Some(pattern.to_string());
                    d.pending_requests = q.pending.iter().map(|p| p.to_string()).collect();
                    return Err(d);
                }
                Err(e) => {
                    let mut d = self.engine_error(e);
                    d.unmatched = Some(pattern.to_string());
                    return Err(d);
                }
            }
        }
    }
}

pub(crate) fn execute(
    action: &StepAction,
    captures: &[String],
    ctx: &mut StepContext<'_>,
) -> Result<(), Diagnostic> {
    let bindings: BTreeMap<String, ParamValue> = captures
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("${}", i + 1), ParamValue::Text(c.clone())))
        .collect();
    let env = Env {
        scenario: "step",
        bindings: &bindings,
    };
    match action {
        StepAction::Trigger(template) => {
            let event = template.instantiate(&env).map_err(|e| ctx.engine_error(e))?;
            ctx.trigger(event)
        }
        StepAction::Eventually(template) => {
            let pattern = template.instantiate(&env).map_err(|e| ctx.engine_error(e))?;
            ctx.eventually(&pattern)
        }
        StepAction::Custom { run, .. } => run(captures, ctx),
        StepAction::Pending { .. } => unreachable!("pending actions are not executed"),
    }
}
