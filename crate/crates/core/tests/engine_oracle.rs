mod common;

use common::*;
use scenarist::engine::{RunEnd, StepOutcome};

fn ev(msg: usize) -> AEvent {
    AEvent { msg, param: 0 }
}

fn req(msg: usize) -> ARequest {
    ARequest {
        msg,
        param: AParam::Lit(0),
    }
}

fn pat(msg: usize) -> APattern {
    APattern { msg, param: Some(0) }
}

fn sync(req_: &[usize], wait: &[usize], block: &[usize]) -> AItem {
    AItem::Sync(ASync {
        req: req_.iter().map(|&m| req(m)).collect(),
        wait: wait.iter().map(|&m| pat(m)).collect(),
        block: block.iter().map(|&m| pat(m)).collect(),
    })
}

fn initial(body: Vec<AItem>) -> AScenario {
    AScenario { trigger: None, body }
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

#[test]
fn earlier_activation_wins_among_legal_picks() {
    let program = AProgram {
        scenarios: vec![initial(vec![sync(&[A], &[], &[])]), initial(vec![sync(&[B], &[], &[])])],
        injections: vec![],
    };
    let legal = Oracle::new(&program).initial_choices();
    assert_eq!(legal, vec![ev(A), ev(B)]);
    let engine = to_engine(&program);
    assert_eq!(engine.select_event().map(|e| from_event(&e)), Some(ev(A)));
}

#[test]
fn permanently_blocked_request_is_stuck() {
    let program = AProgram {
        scenarios: vec![initial(vec![sync(&[B], &[], &[])]), initial(vec![sync(&[], &[], &[B])])],
        injections: vec![],
    };
    let traces = Oracle::new(&program).legal_traces(10, 1_000).unwrap();
    assert_eq!(traces.into_iter().collect::<Vec<_>>(), vec![Vec::<AEvent>::new()]);
    let mut engine = to_engine(&program);
    match engine.step().unwrap() {
        StepOutcome::Quiescent(q) => assert!(q.is_stuck()),
        other => panic!("expected quiescence, got {other:?}"),
    }
}

#[test]
fn blocks_force_strict_alternation() {
    let first = vec![
        sync(&[A], &[], &[]),
        sync(&[], &[B], &[A]),
        sync(&[A], &[], &[]),
        sync(&[], &[B], &[A]),
        sync(&[A], &[], &[]),
    ];
    let second = vec![
        sync(&[], &[A], &[B]),
        sync(&[B], &[], &[]),
        sync(&[], &[A], &[B]),
        sync(&[B], &[], &[]),
        sync(&[], &[A], &[B]),
        sync(&[B], &[], &[]),
    ];
    let program = AProgram {
        scenarios: vec![initial(first), initial(second)],
        injections: vec![],
    };
    let expected = vec![ev(A), ev(B), ev(A), ev(B), ev(A), ev(B)];
    let traces = Oracle::new(&program).legal_traces(20, 10_000).unwrap();
    assert_eq!(traces.into_iter().collect::<Vec<_>>(), vec![expected.clone()]);
    let mut engine = to_engine(&program);
    assert_eq!(engine_trace(&mut engine, 20), expected);
}

#[test]
fn guard_request_is_deferred_until_region_ends() {
    let program = AProgram {
        scenarios: vec![
            initial(vec![sync(&[C], &[], &[])]),
            initial(vec![AItem::Before {
                guard: pat(C),
                inner: vec![sync(&[A], &[], &[])],
            }]),
            initial(vec![sync(&[], &[C], &[]), sync(&[D], &[], &[])]),
        ],
        injections: vec![],
    };
    let expected = vec![ev(A), ev(C), ev(D)];
    let traces = Oracle::new(&program).legal_traces(10, 10_000).unwrap();
    assert_eq!(traces.into_iter().collect::<Vec<_>>(), vec![expected.clone()]);
    let mut engine = to_engine(&program);
    assert_eq!(engine_trace(&mut engine, 10), expected);
}

#[test]
fn empty_before_region_never_blocks() {
    let program = AProgram {
        scenarios: vec![
            initial(vec![
                AItem::Before {
                    guard: pat(A),
                    inner: vec![],
                },
                sync(&[], &[B], &[]),
            ]),
            initial(vec![sync(&[A], &[], &[])]),
        ],
        injections: vec![],
    };
    let mut engine = to_engine(&program);
    assert_eq!(engine_trace(&mut engine, 5), vec![ev(A)]);
}

#[test]
fn random_engine_traces_are_legal() {
    let mut checked = 0;
    for seed in 0..400u64 {
        let program = random_program(seed);
        let Some(traces) = Oracle::new(&program).legal_traces(10, 200_000) else {
            continue;
        };
        let mut engine = to_engine(&program);
        let trace = engine_trace(&mut engine, 10);
        assert!(traces.contains(&trace), "seed {seed}: {trace:?} not legal for {program:?}");
        checked += 1;
    }
    assert!(checked >= 200, "only {checked} programs within the search budget");
}

#[test]
fn random_engine_runs_replay_safely() {
    for seed in 0..300u64 {
        let program = random_program(seed);
        let mut engine = to_engine(&program);
        engine.record_snapshots(true);
        let run = engine.run_to_quiescence(10).unwrap();
        assert!(matches!(run.end, RunEnd::Quiescent(_) | RunEnd::BudgetExhausted));
        let violations = replay_violations(&engine);
        assert!(violations.is_empty(), "seed {seed}: {violations:?}");
    }
}
