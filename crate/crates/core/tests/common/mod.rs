//! Random small scenario programs, an independent brute-force enumerator of
//! legal traces over them, and a replay checker for engine snapshots.
//!
//! The enumerator works on its own flattened model of the programs and never
//! touches the engine; it only shares the event encoding.

#![allow(dead_code)]

pub mod features;

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scenarist::engine::{send, var, Body, SyncTemplate};
use scenarist::{
    Endpoint, Engine, Event, EventPattern, Level, ParamValue, RoleRegistry, ScenarioDefinition,
    ScenarioProgram,
};

pub const MESSAGES: [&str; 4] = ["a", "b", "c", "d"];
pub const SENDER: &str = "s";
pub const RECEIVER: &str = "r";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AEvent {
    pub msg: usize,
    pub param: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct APattern {
    pub msg: usize,
    /// `None` matches any parameter.
    pub param: Option<i64>,
}

impl APattern {
    pub fn matches(&self, e: &AEvent) -> bool {
        self.msg == e.msg && self.param.is_none_or(|p| p == e.param)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AParam {
    Lit(i64),
    /// The trigger event's parameter.
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ARequest {
    pub msg: usize,
    pub param: AParam,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ASync {
    pub req: Vec<ARequest>,
    pub wait: Vec<APattern>,
    pub block: Vec<APattern>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AItem {
    Sync(ASync),
    Before { guard: APattern, inner: Vec<AItem> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AScenario {
    /// Trigger message; any parameter matches.
    pub trigger: Option<usize>,
    pub body: Vec<AItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AProgram {
    pub scenarios: Vec<AScenario>,
    pub injections: Vec<AEvent>,
}

fn pattern(rng: &mut ChaCha8Rng) -> APattern {
    APattern {
        msg: rng.gen_range(0..MESSAGES.len()),
        param: if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(0..2)) },
    }
}

fn sync(rng: &mut ChaCha8Rng, triggered: bool) -> ASync {
    loop {
        let req = (0..rng.gen_range(0..=2))
            .map(|_| ARequest {
                msg: rng.gen_range(0..MESSAGES.len()),
                param: if triggered && rng.gen_bool(0.4) {
                    AParam::Bound
                } else {
                    AParam::Lit(rng.gen_range(0..2))
                },
            })
            .collect::<Vec<_>>();
        let wait = (0..rng.gen_range(0..=1)).map(|_| pattern(rng)).collect::<Vec<_>>();
        let block = (0..rng.gen_range(0..=2)).map(|_| pattern(rng)).collect::<Vec<_>>();
        let s = ASync { req, wait, block };
        if !s.req.is_empty() || !s.wait.is_empty() || (!s.block.is_empty() && rng.gen_bool(0.1)) {
            return s;
        }
    }
}

fn items(rng: &mut ChaCha8Rng, triggered: bool, depth: usize) -> Vec<AItem> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            if depth < 2 && rng.gen_bool(0.25) {
                AItem::Before {
                    guard: pattern(rng),
                    inner: items(rng, triggered, depth + 1),
                }
            } else {
                AItem::Sync(sync(rng, triggered))
            }
        })
        .collect()
}

/// A random program with at most 4 scenarios over an 8-event alphabet.
pub fn random_program(seed: u64) -> AProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let scenarios = (0..n)
        .map(|_| {
            let trigger = rng.gen_bool(0.4).then(|| rng.gen_range(0..MESSAGES.len()));
            AScenario {
                trigger,
                body: items(&mut rng, trigger.is_some(), 0),
            }
        })
        .collect();
    let injections = (0..rng.gen_range(0..=3))
        .map(|_| AEvent {
            msg: rng.gen_range(0..MESSAGES.len()),
            param: rng.gen_range(0..2),
        })
        .collect();
    AProgram { scenarios, injections }
}

pub fn roles() -> RoleRegistry {
    let mut roles = RoleRegistry::new();
    roles.register_role(SENDER, Vec::<String>::new()).unwrap();
    roles.register_role(RECEIVER, Vec::<String>::new()).unwrap();
    roles
}

pub fn to_event(e: &AEvent) -> Event {
    Event::new(SENDER, RECEIVER, MESSAGES[e.msg], [ParamValue::Int(e.param)])
}

pub fn from_event(e: &Event) -> AEvent {
    assert_eq!((e.sender.as_str(), e.receiver.as_str()), (SENDER, RECEIVER));
    let msg = MESSAGES.iter().position(|m| *m == e.message.name).expect("alphabet message");
    let [ParamValue::Int(param)] = e.params[..] else {
        panic!("unexpected params in {e}")
    };
    AEvent { msg, param }
}

fn to_pattern(p: &APattern) -> EventPattern {
    EventPattern::new(
        Endpoint::named(SENDER),
        Endpoint::named(RECEIVER),
        MESSAGES[p.msg],
        vec![p.param.map(ParamValue::Int)],
    )
}

fn to_body(items: &[AItem]) -> Body {
    let mut body = Body::new();
    for item in items {
        body = match item {
            AItem::Sync(s) => {
                let mut t = SyncTemplate::new();
                for r in &s.req {
                    let param = match r.param {
                        AParam::Lit(v) => scenarist::engine::lit(v),
                        AParam::Bound => var("p"),
                    };
                    t = t.request(send(SENDER, RECEIVER, MESSAGES[r.msg], vec![param]));
                }
                for w in &s.wait {
                    t = t.wait_for(to_pattern(w));
                }
                for b in &s.block {
                    t = t.block(to_pattern(b));
                }
                body.sync(t)
            }
            AItem::Before { guard, inner } => body.before(to_pattern(guard), to_body(inner)),
        };
    }
    body
}

pub fn to_program(p: &AProgram) -> ScenarioProgram {
    let mut program = ScenarioProgram::new("random", Level::Inter, roles());
    for (i, s) in p.scenarios.iter().enumerate() {
        let id = format!("s{i}");
        let body = to_body(&s.body);
        let def = match s.trigger {
            None => ScenarioDefinition::initial(&id, body),
            Some(m) => ScenarioDefinition::triggered(
                &id,
                to_pattern(&APattern { msg: m, param: None }),
                body,
            )
            .with_parameters(["p"]),
        };
        program.add(def).unwrap();
    }
    program
}

/// Engine for `p` with its injections queued.
pub fn to_engine(p: &AProgram) -> Engine {
    let mut engine = Engine::start(&to_program(p)).unwrap();
    for e in &p.injections {
        engine.inject(to_event(e)).unwrap();
    }
    engine
}

/// One sync point of a flattened body, with `before` guards folded into its blocks.
#[derive(Debug, Clone)]
struct FlatSync {
    req: Vec<ARequest>,
    wait: Vec<APattern>,
    block: Vec<APattern>,
}

fn flatten(items: &[AItem], guards: &mut Vec<APattern>, out: &mut Vec<FlatSync>) {
    for item in items {
        match item {
            AItem::Sync(s) => out.push(FlatSync {
                req: s.req.clone(),
                wait: s.wait.clone(),
                block: s.block.iter().chain(guards.iter()).copied().collect(),
            }),
            AItem::Before { guard, inner } => {
                guards.push(*guard);
                flatten(inner, guards, out);
                guards.pop();
            }
        }
    }
}

#[derive(Debug, Clone)]
struct OInstance {
    scenario: usize,
    pos: usize,
    bound: i64,
}

#[derive(Debug, Clone)]
struct OState {
    instances: Vec<OInstance>,
    queue: usize,
}

pub struct Oracle<'a> {
    program: &'a AProgram,
    flat: Vec<Vec<FlatSync>>,
}

impl<'a> Oracle<'a> {
    pub fn new(program: &'a AProgram) -> Self {
        let flat = program
            .scenarios
            .iter()
            .map(|s| {
                let mut out = Vec::new();
                flatten(&s.body, &mut Vec::new(), &mut out);
                out
            })
            .collect();
        Self { program, flat }
    }

    fn initial(&self) -> OState {
        let instances = (0..self.program.scenarios.len())
            .filter(|&i| self.program.scenarios[i].trigger.is_none() && !self.flat[i].is_empty())
            .map(|i| OInstance {
                scenario: i,
                pos: 0,
                bound: 0,
            })
            .collect();
        OState { instances, queue: 0 }
    }

    fn requested(&self, inst: &OInstance) -> Vec<AEvent> {
        self.flat[inst.scenario][inst.pos]
            .req
            .iter()
            .map(|r| AEvent {
                msg: r.msg,
                param: match r.param {
                    AParam::Lit(v) => v,
                    AParam::Bound => inst.bound,
                },
            })
            .collect()
    }

    fn blocked(&self, state: &OState, e: &AEvent) -> bool {
        state
            .instances
            .iter()
            .flat_map(|i| &self.flat[i.scenario][i.pos].block)
            .any(|p| p.matches(e))
    }

    /// Legal next events; the flag says whether the choice consumes the queue head.
    fn choices(&self, state: &OState) -> Vec<(AEvent, bool)> {
        let mut out = BTreeSet::new();
        for inst in &state.instances {
            for e in self.requested(inst) {
                if !self.blocked(state, &e) {
                    out.insert((e, false));
                }
            }
        }
        if let Some(head) = self.program.injections.get(state.queue) {
            if !self.blocked(state, head) {
                out.insert((*head, true));
            }
        }
        out.into_iter().collect()
    }

    fn apply(&self, state: &OState, e: &AEvent, external: bool) -> OState {
        let mut instances = Vec::new();
        for inst in &state.instances {
            let sync = &self.flat[inst.scenario][inst.pos];
            let resumes = self.requested(inst).contains(e) || sync.wait.iter().any(|p| p.matches(e));
            if !resumes {
                instances.push(inst.clone());
            } else if inst.pos + 1 < self.flat[inst.scenario].len() {
                instances.push(OInstance {
                    pos: inst.pos + 1,
                    ..inst.clone()
                });
            }
        }
        for (i, s) in self.program.scenarios.iter().enumerate() {
            if s.trigger == Some(e.msg) && !self.flat[i].is_empty() {
                instances.push(OInstance {
                    scenario: i,
                    pos: 0,
                    bound: e.param,
                });
            }
        }
        OState {
            instances,
            queue: state.queue + usize::from(external),
        }
    }

    /// Every legal trace that either reaches a state with no legal event or
    /// has exactly `depth` events. `None` if more than `budget` search nodes
    /// would be needed.
    pub fn legal_traces(&self, depth: usize, budget: usize) -> Option<BTreeSet<Vec<AEvent>>> {
        let mut out = BTreeSet::new();
        let mut nodes = 0usize;
        let mut stack = vec![(self.initial(), Vec::new())];
        while let Some((state, trace)) = stack.pop() {
            nodes += 1;
            if nodes > budget {
                return None;
            }
            let choices = self.choices(&state);
            if choices.is_empty() || trace.len() == depth {
                out.insert(trace);
                continue;
            }
            for (e, external) in choices {
                let mut next = trace.clone();
                next.push(e);
                stack.push((self.apply(&state, &e, external), next));
            }
        }
        Some(out)
    }

    /// Legal events at the start, ignoring the queue.
    pub fn initial_choices(&self) -> Vec<AEvent> {
        let state = self.initial();
        let mut out: Vec<AEvent> = self
            .choices(&OState {
                queue: usize::MAX,
                ..state
            })
            .into_iter()
            .map(|(e, _)| e)
            .collect();
        out.dedup();
        out
    }
}

/// Runs `engine` for at most `depth` steps, mapping the trace to the abstract alphabet.
pub fn engine_trace(engine: &mut Engine, depth: usize) -> Vec<AEvent> {
    let run = engine.run_to_quiescence(depth).unwrap();
    run.events.iter().map(from_event).collect()
}

fn pattern_matches(p: &EventPattern, e: &Event) -> bool {
    let endpoint = |ep: &Endpoint, name: &str| match ep {
        Endpoint::Any => true,
        Endpoint::Named(n) => n == name,
    };
    endpoint(&p.sender, &e.sender)
        && endpoint(&p.receiver, &e.receiver)
        && p.message == e.message
        && p.params.iter().zip(&e.params).all(|(p, v)| p.as_ref().is_none_or(|p| p == v))
}

/// Checks every recorded selection against its sync snapshot. Returns the
/// violations found.
pub fn replay_violations(engine: &Engine) -> Vec<String> {
    let mut violations = Vec::new();
    let snapshots = engine.snapshots();
    if snapshots.len() != engine.trace().len() {
        violations.push(format!(
            "{} snapshots for {} trace events",
            snapshots.len(),
            engine.trace().len()
        ));
    }
    for (i, (snap, event)) in snapshots.iter().zip(engine.trace()).enumerate() {
        if &snap.selected != event {
            violations.push(format!("step {i}: snapshot {} differs from trace {event}", snap.selected));
        }
        let requested = snap.requested.iter().any(|r| r == event);
        let external = snap.external_head.as_ref() == Some(event);
        if !requested && !external {
            violations.push(format!("step {i}: {event} neither requested nor queue head"));
        }
        if let Some(b) = snap.blocked.iter().find(|b| pattern_matches(b, event)) {
            violations.push(format!("step {i}: {event} selected while blocked by {b}"));
        }
    }
    violations
}
