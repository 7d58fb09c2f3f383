//! Deterministic behavioral-programming engine.
//!
//! Scenarios synchronize at sync points by declaring requested, waited-for
//! and blocked events. At each step the engine selects one requested event
//! that no live scenario blocks, resumes every scenario that requested or
//! waited for it, and instantiates every triggered definition it matches.
//!
//! Selection order is fixed: live instances in activation order, each
//! instance's requests in declaration order. Internally requested events are
//! exhausted before the next injected event is consumed.

mod instance;
pub mod program;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

pub use instance::{ScenarioInstance, SyncDeclaration};
pub use program::{
    call, lit, send, var, Body, EventTemplate, Helper, Level, PatternTemplate, RequestTemplate,
    ScenarioDefinition, ScenarioProgram, Step, SyncTemplate, Term,
};

use crate::compose::unify;
use crate::error::{Error, Result};
use crate::event::{matches, Event, EventPattern, RoleRegistry};

pub const DEFAULT_STEP_BOUND: usize = 10_000;

/// Where a selected event came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Requested by the instance with this activation serial.
    Requested(u64),
    /// Head of the external queue.
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub event: Event,
    pub origin: Origin,
}

/// Snapshot of the sync state at one selection, for replay checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncSnapshot {
    pub selected: Event,
    pub requested: Vec<Event>,
    pub blocked: Vec<EventPattern>,
    pub external_head: Option<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PendingReason {
    Blocked,
    /// Flexible request reserved for a composed constituent-system program.
    Delegated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PendingRequest {
    /// Scenario id, or `None` for a queued external event.
    pub scenario: Option<String>,
    pub event: Event,
    pub reason: PendingReason,
}

impl fmt::Display for PendingRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let why = match self.reason {
            PendingReason::Blocked => "blocked",
            PendingReason::Delegated => "delegated, awaiting a concrete request",
        };
        let flex = if self.event.flexible { " (flexible)" } else { "" };
        match &self.scenario {
            Some(s) => write!(f, "{s}: {}{flex} [{why}]", self.event),
            None => write!(f, "external: {}{flex} [{why}]", self.event),
        }
    }
}

/// Reported when nothing is selectable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Quiescence {
    pub pending: Vec<PendingRequest>,
}

impl Quiescence {
    /// Requests remain but none can be selected.
    pub fn is_stuck(&self) -> bool {
        !self.pending.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Selected(Event),
    Quiescent(Quiescence),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunEnd {
    Quiescent(Quiescence),
    /// The per-call budget ran out while events were still selectable.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub events: Vec<Event>,
    pub end: RunEnd,
}

/// Inputs for building an engine; produced by [`Engine::start`] or by composition.
#[derive(Debug, Clone, Default)]
pub(crate) struct EngineSetup {
    pub roles: RoleRegistry,
    pub definitions: Vec<ScenarioDefinition>,
    /// Interface name to the concrete role standing in for it.
    pub aliases: BTreeMap<String, String>,
    /// Flexible requests touching these roles are delegated.
    pub delegated: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct Engine {
    roles: RoleRegistry,
    definitions: Vec<ScenarioDefinition>,
    aliases: BTreeMap<String, String>,
    delegated: BTreeSet<String>,
    instances: Vec<ScenarioInstance>,
    queue: VecDeque<Event>,
    trace: Vec<Event>,
    step_count: usize,
    step_bound: usize,
    next_serial: u64,
    snapshots: Option<Vec<SyncSnapshot>>,
}

impl Engine {
    /// Starts a standalone engine over one program.
    pub fn start(program: &ScenarioProgram) -> Result<Self> {
        Self::from_setup(EngineSetup {
            roles: program.roles.clone(),
            definitions: program.definitions().to_vec(),
            ..EngineSetup::default()
        })
    }

    pub(crate) fn from_setup(setup: EngineSetup) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for d in &setup.definitions {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateDefinition(d.id.clone()));
            }
        }
        let mut engine = Engine {
            roles: setup.roles,
            definitions: setup.definitions,
            aliases: setup.aliases,
            delegated: setup.delegated,
            instances: Vec::new(),
            queue: VecDeque::new(),
            trace: Vec::new(),
            step_count: 0,
            step_bound: DEFAULT_STEP_BOUND,
            next_serial: 0,
            snapshots: None,
        };
        for index in 0..engine.definitions.len() {
            if engine.definitions[index].trigger.is_none() {
                engine.spawn(index, None)?;
            }
        }
        Ok(engine)
    }

    /// Sets the total number of steps this engine may take.
    pub fn with_step_bound(mut self, bound: usize) -> Self {
        self.step_bound = bound;
        self
    }

    /// Records the sync state at every selection (see [`Engine::snapshots`]).
    pub fn record_snapshots(&mut self, on: bool) {
        self.snapshots = on.then(Vec::new);
    }

    pub fn snapshots(&self) -> &[SyncSnapshot] {
        self.snapshots.as_deref().unwrap_or(&[])
    }

    pub fn roles(&self) -> &RoleRegistry {
        &self.roles
    }

    pub fn instances(&self) -> &[ScenarioInstance] {
        &self.instances
    }

    pub fn trace(&self) -> &[Event] {
        &self.trace
    }

    pub fn queue(&self) -> impl Iterator<Item = &Event> {
        self.queue.iter()
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn step_bound(&self) -> usize {
        self.step_bound
    }

    /// Appends an environment event to the external queue.
    pub fn inject(&mut self, event: Event) -> Result<()> {
        if event.flexible {
            return Err(Error::FlexibleInjection(event.to_string()));
        }
        let event = self.normalize(event);
        self.queue.push_back(event);
        Ok(())
    }

    /// Rewrites bound interface endpoints to the concrete role.
    fn normalize(&self, event: Event) -> Event {
        normalize_with(&self.aliases, event)
    }

    fn is_delegated(&self, request: &Event) -> bool {
        request.flexible
            && (self.delegated.contains(&request.sender) || self.delegated.contains(&request.receiver))
    }

    fn is_blocked(&self, event: &Event) -> bool {
        self.instances
            .iter()
            .flat_map(|i| i.blocked())
            .any(|p| matches(p, event, &self.roles))
    }

    /// The event the next step would select, if any.
    pub fn select_event(&self) -> Option<Event> {
        self.select().map(|s| s.event)
    }

    pub fn select(&self) -> Option<Selection> {
        for instance in &self.instances {
            let Some(sync) = instance.sync() else { continue };
            for request in &sync.requested {
                if self.is_delegated(request) || self.is_blocked(request) {
                    continue;
                }
                return Some(Selection {
                    event: request.clone(),
                    origin: Origin::Requested(instance.serial),
                });
            }
        }
        let head = self.queue.front()?;
        (!self.is_blocked(head)).then(|| Selection {
            event: head.clone(),
            origin: Origin::External,
        })
    }

    fn quiescence(&self) -> Quiescence {
        let mut pending = Vec::new();
        for instance in &self.instances {
            let Some(sync) = instance.sync() else { continue };
            for request in &sync.requested {
                let reason = if self.is_delegated(request) {
                    PendingReason::Delegated
                } else {
                    PendingReason::Blocked
                };
                pending.push(PendingRequest {
                    scenario: Some(instance.scenario().to_string()),
                    event: request.clone(),
                    reason,
                });
            }
        }
        if let Some(head) = self.queue.front() {
            pending.push(PendingRequest {
                scenario: None,
                event: head.clone(),
                reason: PendingReason::Blocked,
            });
        }
        Quiescence { pending }
    }

    /// Selects one event and lets every affected scenario react to it.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let Some(selection) = self.select() else {
            return Ok(StepOutcome::Quiescent(self.quiescence()));
        };
        if self.step_count >= self.step_bound {
            return Err(Error::StepBoundExceeded {
                bound: self.step_bound,
            });
        }
        if let Some(snapshots) = self.snapshots.as_mut() {
            let snapshot = SyncSnapshot {
                selected: selection.event.clone(),
                requested: self
                    .instances
                    .iter()
                    .filter_map(|i| i.sync())
                    .flat_map(|s| s.requested.iter().cloned())
                    .collect(),
                blocked: self.instances.iter().flat_map(|i| i.blocked().cloned()).collect(),
                external_head: self.queue.front().cloned(),
            };
            snapshots.push(snapshot);
        }
        if selection.origin == Origin::External {
            self.queue.pop_front();
        }
        let event = selection.event;
        self.trace.push(event.clone());
        self.step_count += 1;

        let aliases = &self.aliases;
        let normalize = |e: Event| normalize_with(aliases, e);
        for instance in &mut self.instances {
            let Some(sync) = instance.sync() else { continue };
            if resumes(sync, &event, &self.roles) {
                instance.advance(&normalize)?;
            }
        }
        self.instances.retain(|i| !i.is_terminated());

        for index in 0..self.definitions.len() {
            let fires = self.definitions[index]
                .trigger
                .as_ref()
                .is_some_and(|t| matches(t, &event, &self.roles));
            if fires {
                self.spawn(index, Some(&event))?;
            }
        }
        Ok(StepOutcome::Selected(event))
    }

    fn spawn(&mut self, index: usize, trigger: Option<&Event>) -> Result<()> {
        let mut instance =
            ScenarioInstance::new(self.next_serial, &self.definitions[index], trigger);
        self.next_serial += 1;
        let aliases = &self.aliases;
        instance.advance(&|e| normalize_with(aliases, e))?;
        if !instance.is_terminated() {
            self.instances.push(instance);
        }
        Ok(())
    }

    /// Steps until nothing is selectable or `max_steps` steps were taken.
    pub fn run_to_quiescence(&mut self, max_steps: usize) -> Result<Run> {
        if max_steps == 0 {
            return Err(Error::ZeroStepBudget);
        }
        let mut events = Vec::new();
        while events.len() < max_steps {
            match self.step()? {
                StepOutcome::Selected(e) => events.push(e),
                StepOutcome::Quiescent(q) => {
                    return Ok(Run {
                        events,
                        end: RunEnd::Quiescent(q),
                    })
                }
            }
        }
        let end = match self.select() {
            None => RunEnd::Quiescent(self.quiescence()),
            Some(_) => RunEnd::BudgetExhausted,
        };
        Ok(Run { events, end })
    }
}

fn normalize_with(aliases: &BTreeMap<String, String>, mut event: Event) -> Event {
    if let Some(concrete) = aliases.get(&event.sender) {
        event.sender = concrete.clone();
    }
    if let Some(concrete) = aliases.get(&event.receiver) {
        event.receiver = concrete.clone();
    }
    event
}

/// Does selecting `event` release an instance suspended at `sync`?
fn resumes(sync: &SyncDeclaration, event: &Event, roles: &RoleRegistry) -> bool {
    sync.requested.iter().any(|r| {
        if r.flexible {
            unify(r, event, roles).is_some()
        } else {
            r == event
        }
    }) || sync.waited.iter().any(|p| matches(p, event, roles))
}
