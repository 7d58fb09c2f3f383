//! Scenario definitions as explicit resumable step programs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::event::{Endpoint, Event, EventPattern, Message, ParamValue, RoleRegistry};

/// Hierarchy level of a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// System-of-systems interactions between constituent systems.
    Inter,
    /// Internal behavior of one constituent system.
    Intra,
}

/// Named deterministic function used to derive parameter values inside a body.
#[derive(Clone)]
pub struct Helper {
    name: Arc<str>,
    f: fn(&[ParamValue]) -> ParamValue,
}

impl Helper {
    pub fn new(name: &str, f: fn(&[ParamValue]) -> ParamValue) -> Self {
        Self {
            name: name.into(),
            f,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn call(&self, args: &[ParamValue]) -> ParamValue {
        (self.f)(args)
    }
}

impl fmt::Debug for Helper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}()", self.name)
    }
}

/// Parameter expression evaluated against an instance's bindings.
#[derive(Debug, Clone)]
pub enum Term {
    Lit(ParamValue),
    Var(String),
    Call(Helper, Vec<Term>),
}

pub fn lit(value: impl Into<ParamValue>) -> Term {
    Term::Lit(value.into())
}

pub fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

pub fn call(helper: Helper, args: Vec<Term>) -> Term {
    Term::Call(helper, args)
}

impl From<ParamValue> for Term {
    fn from(v: ParamValue) -> Self {
        Term::Lit(v)
    }
}

impl Term {
    pub(crate) fn eval(&self, env: &Env<'_>) -> Result<ParamValue> {
        match self {
            Term::Lit(v) => Ok(v.clone()),
            Term::Var(name) => env.lookup(name),
            Term::Call(helper, args) => {
                let args = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>>>()?;
                Ok(helper.call(&args))
            }
        }
    }
}

pub(crate) struct Env<'a> {
    pub scenario: &'a str,
    pub bindings: &'a BTreeMap<String, ParamValue>,
}

impl Env<'_> {
    fn lookup(&self, name: &str) -> Result<ParamValue> {
        self.bindings
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable {
                scenario: self.scenario.to_string(),
                variable: name.to_string(),
            })
    }
}

/// An event whose parameters may refer to bound variables.
#[derive(Debug, Clone)]
pub struct EventTemplate {
    pub sender: String,
    pub receiver: String,
    pub message: String,
    pub params: Vec<Term>,
}

/// `sender sends receiver.message(params...)`
pub fn send(sender: &str, receiver: &str, message: &str, params: Vec<Term>) -> EventTemplate {
    EventTemplate {
        sender: sender.to_string(),
        receiver: receiver.to_string(),
        message: message.to_string(),
        params,
    }
}

impl From<Event> for EventTemplate {
    fn from(e: Event) -> Self {
        EventTemplate {
            sender: e.sender,
            receiver: e.receiver,
            message: e.message.name,
            params: e.params.into_iter().map(Term::Lit).collect(),
        }
    }
}

impl EventTemplate {
    pub(crate) fn instantiate(&self, env: &Env<'_>) -> Result<Event> {
        let params = self.params.iter().map(|t| t.eval(env)).collect::<Result<Vec<_>>>()?;
        Ok(Event {
            sender: self.sender.clone(),
            receiver: self.receiver.clone(),
            message: Message::new(self.message.clone(), params.len()),
            params,
            flexible: false,
        })
    }
}

/// An event pattern whose non-wildcard parameters may refer to variables.
#[derive(Debug, Clone)]
pub struct PatternTemplate {
    pub sender: Endpoint,
    pub receiver: Endpoint,
    pub message: String,
    pub params: Vec<Option<Term>>,
}

impl From<EventPattern> for PatternTemplate {
    fn from(p: EventPattern) -> Self {
        PatternTemplate {
            sender: p.sender,
            receiver: p.receiver,
            message: p.message.name,
            params: p.params.into_iter().map(|v| v.map(Term::Lit)).collect(),
        }
    }
}

impl From<EventTemplate> for PatternTemplate {
    fn from(t: EventTemplate) -> Self {
        PatternTemplate {
            sender: Endpoint::Named(t.sender),
            receiver: Endpoint::Named(t.receiver),
            message: t.message,
            params: t.params.into_iter().map(Some).collect(),
        }
    }
}

impl PatternTemplate {
    pub(crate) fn instantiate(&self, env: &Env<'_>) -> Result<EventPattern> {
        let params = self
            .params
            .iter()
            .map(|t| t.as_ref().map(|t| t.eval(env)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Ok(EventPattern {
            sender: self.sender.clone(),
            receiver: self.receiver.clone(),
            message: Message::new(self.message.clone(), params.len()),
            params,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RequestTemplate {
    pub event: EventTemplate,
    /// Also satisfied by events with the same endpoints and signature but
    /// different parameter values.
    pub flexible: bool,
}

/// The declarations published at one sync point.
#[derive(Debug, Clone, Default)]
pub struct SyncTemplate {
    pub requests: Vec<RequestTemplate>,
    pub waits: Vec<PatternTemplate>,
    pub blocks: Vec<PatternTemplate>,
}

impl SyncTemplate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn request(mut self, event: impl Into<EventTemplate>) -> Self {
        self.requests.push(RequestTemplate {
            event: event.into(),
            flexible: false,
        });
        self
    }

    pub fn request_flexible(mut self, event: impl Into<EventTemplate>) -> Self {
        self.requests.push(RequestTemplate {
            event: event.into(),
            flexible: true,
        });
        self
    }

    pub fn wait_for(mut self, pattern: impl Into<PatternTemplate>) -> Self {
        self.waits.push(pattern.into());
        self
    }

    pub fn block(mut self, pattern: impl Into<PatternTemplate>) -> Self {
        self.blocks.push(pattern.into());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty() && self.waits.is_empty() && self.blocks.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum Step {
    Sync(SyncTemplate),
    Let { var: String, value: Term },
    /// Run `body`, blocking `guard` until it terminates.
    Before { guard: PatternTemplate, body: Arc<[Step]> },
}

/// Builder for a scenario body.
#[derive(Debug, Clone, Default)]
pub struct Body {
    steps: Vec<Step>,
}

impl Body {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sync(mut self, sync: SyncTemplate) -> Self {
        self.steps.push(Step::Sync(sync));
        self
    }

    pub fn request(self, event: impl Into<EventTemplate>) -> Self {
        self.sync(SyncTemplate::new().request(event))
    }

    /// Request with default parameters that other parameter values may replace.
    pub fn request_flexible(self, event: impl Into<EventTemplate>) -> Self {
        self.sync(SyncTemplate::new().request_flexible(event))
    }

    pub fn wait_for(self, pattern: impl Into<PatternTemplate>) -> Self {
        self.sync(SyncTemplate::new().wait_for(pattern))
    }

    pub fn bind(mut self, var: &str, value: Term) -> Self {
        self.steps.push(Step::Let {
            var: var.to_string(),
            value,
        });
        self
    }

    /// Runs `inner` while blocking every event matching `guard`.
    pub fn before(mut self, guard: impl Into<PatternTemplate>, inner: Body) -> Self {
        self.steps.push(Step::Before {
            guard: guard.into(),
            body: inner.steps.into(),
        });
        self
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }
}

/// A reusable scenario: optional trigger plus a body.
#[derive(Debug, Clone)]
pub struct ScenarioDefinition {
    pub id: String,
    /// `None` means active from engine start.
    pub trigger: Option<EventPattern>,
    /// Variable names bound positionally to the trigger event's parameters.
    pub parameters: Vec<String>,
    pub body: Arc<[Step]>,
}

impl ScenarioDefinition {
    /// Active as soon as the engine starts.
    pub fn initial(id: &str, body: Body) -> Self {
        Self {
            id: id.to_string(),
            trigger: None,
            parameters: Vec::new(),
            body: body.steps.into(),
        }
    }

    /// Instantiated each time an event matching `trigger` is selected.
    pub fn triggered(id: &str, trigger: EventPattern, body: Body) -> Self {
        Self {
            id: id.to_string(),
            trigger: Some(trigger),
            parameters: Vec::new(),
            body: body.steps.into(),
        }
    }

    /// Names the trigger parameters, in order.
    pub fn with_parameters<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.parameters = names.into_iter().map(Into::into).collect();
        self
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioProgram {
    pub name: String,
    pub level: Level,
    pub roles: RoleRegistry,
    definitions: Vec<ScenarioDefinition>,
}

impl ScenarioProgram {
    pub fn new(name: &str, level: Level, roles: RoleRegistry) -> Self {
        Self {
            name: name.to_string(),
            level,
            roles,
            definitions: Vec::new(),
        }
    }

    pub fn add(&mut self, definition: ScenarioDefinition) -> Result<()> {
        if self.definitions.iter().any(|d| d.id == definition.id) {
            return Err(Error::DuplicateDefinition(definition.id));
        }
        self.definitions.push(definition);
        Ok(())
    }

    pub fn with(mut self, definition: ScenarioDefinition) -> Result<Self> {
        self.add(definition)?;
        Ok(self)
    }

    pub fn definitions(&self) -> &[ScenarioDefinition] {
        &self.definitions
    }
}
