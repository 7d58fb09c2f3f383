use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::event::{Event, EventPattern, ParamValue};

use super::program::{Env, ScenarioDefinition, Step};

/// What an instance publishes while suspended at a sync point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SyncDeclaration {
    /// Flexible requests carry `flexible = true` and their default parameters.
    pub requested: Vec<Event>,
    pub waited: Vec<EventPattern>,
    pub blocked: Vec<EventPattern>,
}

#[derive(Debug, Clone)]
struct Frame {
    steps: Arc<[Step]>,
    pc: usize,
    guard: Option<EventPattern>,
}

/// A live activation of a [`ScenarioDefinition`].
#[derive(Debug, Clone)]
pub struct ScenarioInstance {
    pub(crate) serial: u64,
    scenario: String,
    trigger_params: Vec<ParamValue>,
    bindings: BTreeMap<String, ParamValue>,
    frames: Vec<Frame>,
    sync: Option<SyncDeclaration>,
}

impl ScenarioInstance {
    pub(crate) fn new(
        serial: u64,
        definition: &ScenarioDefinition,
        trigger: Option<&Event>,
    ) -> Self {
        let trigger_params = trigger.map(|e| e.params.clone()).unwrap_or_default();
        let bindings = definition
            .parameters
            .iter()
            .cloned()
            .zip(trigger_params.iter().cloned())
            .collect();
        Self {
            serial,
            scenario: definition.id.clone(),
            trigger_params,
            bindings,
            frames: vec![Frame {
                steps: definition.body.clone(),
                pc: 0,
                guard: None,
            }],
            sync: None,
        }
    }

    pub fn scenario(&self) -> &str {
        &self.scenario
    }

    /// Activation serial number, unique within one engine.
    pub fn serial(&self) -> u64 {
        self.serial
    }

    /// Parameters of the triggering event, in order.
    pub fn trigger_params(&self) -> &[ParamValue] {
        &self.trigger_params
    }

    pub fn bindings(&self) -> &BTreeMap<String, ParamValue> {
        &self.bindings
    }

    /// `None` once terminated.
    pub fn sync(&self) -> Option<&SyncDeclaration> {
        self.sync.as_ref()
    }

    pub fn is_terminated(&self) -> bool {
        self.frames.is_empty()
    }

    /// Guards of the enclosing `before` regions, outermost first.
    pub fn active_blocks(&self) -> impl Iterator<Item = &EventPattern> {
        self.frames.iter().filter_map(|f| f.guard.as_ref())
    }

    /// Everything this instance currently blocks.
    pub fn blocked(&self) -> impl Iterator<Item = &EventPattern> {
        self.sync
            .iter()
            .flat_map(|s| s.blocked.iter())
            .chain(self.active_blocks())
    }

    /// Runs the body up to the next sync point or to termination.
    pub(crate) fn advance(&mut self, normalize: &dyn Fn(Event) -> Event) -> Result<()> {
        self.sync = None;
        while let Some(frame) = self.frames.last_mut() {
            let Some(step) = frame.steps.get(frame.pc).cloned() else {
                self.frames.pop();
                continue;
            };
            frame.pc += 1;
            let env = Env {
                scenario: &self.scenario,
                bindings: &self.bindings,
            };
            match step {
                Step::Let { var, value } => {
                    let value = value.eval(&env)?;
                    self.bindings.insert(var, value);
                }
                Step::Before { guard, body } => {
                    let guard = guard.instantiate(&env)?;
                    self.frames.push(Frame {
                        steps: body,
                        pc: 0,
                        guard: Some(guard),
                    });
                }
                Step::Sync(template) => {
                    if template.is_empty() {
                        return Err(Error::EmptySync {
                            scenario: self.scenario.clone(),
                        });
                    }
                    let mut requested = Vec::with_capacity(template.requests.len());
                    for r in &template.requests {
                        let mut event = normalize(r.event.instantiate(&env)?);
                        event.flexible = r.flexible;
                        requested.push(event);
                    }
                    let waited = template
                        .waits
                        .iter()
                        .map(|p| p.instantiate(&env))
                        .collect::<Result<_>>()?;
                    let blocked = template
                        .blocks
                        .iter()
                        .map(|p| p.instantiate(&env))
                        .collect::<Result<_>>()?;
                    self.sync = Some(SyncDeclaration {
                        requested,
                        waited,
                        blocked,
                    });
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}
