//! Smart-charging case study: a user plans a trip in a smartphone app which
//! asks a route-planning service (rps) and a charging-station operation
//! service (csos) for data before showing an optimized route.
//!
//! Registered engine factories:
//!
//! | name                 | programs                                          |
//! |----------------------|---------------------------------------------------|
//! | `sos-empty`          | SoS program without scenarios                     |
//! | `sos`                | SoS program                                       |
//! | `rps-empty`          | rps program without scenarios                     |
//! | `rps`                | rps program                                       |
//! | `composed-empty-rps` | SoS program + rps program without scenarios       |
//! | `composed`           | SoS program + rps program                         |

use crate::compose::{Composition, RoleBinding};
use crate::engine::{call, send, var, Body, Engine, Helper, Level, ScenarioDefinition, ScenarioProgram};
use crate::error::Result;
use crate::event::{Endpoint, Event, EventPattern, ParamValue, RoleRegistry};
use crate::gherkin::{parse_feature, FeatureSpec, StepKind, StepRegistry};
use crate::runner::{EngineFactories, StepAction};

pub const SOS_FEATURE: &str = include_str!("../features/sos/sos.feature");
pub const RPS_FEATURE: &str = include_str!("../features/rps/rps.feature");

/// Inter-level roles without behavior of their own.
pub const PASSIVE_ROLES: [&str; 2] = ["bhs", "eis"];
pub const RPS_COMPONENTS: [&str; 3] = ["rpsController", "gpsService", "routePlaner"];

pub fn sos_roles() -> RoleRegistry {
    let mut roles = RoleRegistry::new();
    let none = Vec::<String>::new;
    roles.register_role("user", none()).expect("fresh registry");
    roles.register_role("app", ["routeRequester"]).expect("fresh registry");
    for name in ["rps", "csos", "bhs", "eis"] {
        roles.register_role(name, none()).expect("fresh registry");
    }
    roles
}

pub fn rps_roles() -> RoleRegistry {
    let mut roles = RoleRegistry::new();
    for name in ["routeRequester", "rps"].into_iter().chain(RPS_COMPONENTS) {
        roles
            .register_role(name, Vec::<String>::new())
            .expect("fresh registry");
    }
    roles
}

fn create_mock_route(_: &[ParamValue]) -> ParamValue {
    ParamValue::mock("route")
}

fn create_mock_charging_stations_list(_: &[ParamValue]) -> ParamValue {
    ParamValue::mock("chargingStationsList")
}

fn label(v: &ParamValue) -> String {
    match v {
        ParamValue::Text(s) => s.clone(),
        ParamValue::Int(n) => n.to_string(),
        ParamValue::Mock(l) => l.strip_prefix("loc-").unwrap_or(l).to_string(),
    }
}

/// `"Dortmund"` becomes `mock:loc-Dortmund`.
fn get_location(args: &[ParamValue]) -> ParamValue {
    ParamValue::mock(format!("loc-{}", args.first().map(label).unwrap_or_default()))
}

/// Two locations become `mock:route-<from>-<to>`.
fn calculate_route(args: &[ParamValue]) -> ParamValue {
    let parts: Vec<String> = args.iter().map(label).collect();
    ParamValue::mock(format!("route-{}", parts.join("-")))
}

fn travel_preferences_trigger() -> EventPattern {
    EventPattern::any_params("user", "app", "addTravelPreferences", 2)
}

fn optimize_route() -> EventPattern {
    EventPattern::exact(&Event::bare("app", "app", "optimizeRoute"))
}

pub fn empty_sos_program() -> ScenarioProgram {
    ScenarioProgram::new("sos", Level::Inter, sos_roles())
}

/// The two inter-system scenarios triggered by the user entering travel
/// preferences.
pub fn build_sos_program() -> ScenarioProgram {
    let route = ScenarioDefinition::triggered(
        "optimized-route",
        travel_preferences_trigger(),
        Body::new()
            .request(send("app", "rps", "calculateRoute", vec![var("fromLoc"), var("toLoc")]))
            .bind("route", call(Helper::new("createMockRoute", create_mock_route), vec![]))
            .request_flexible(send("rps", "app", "calculateRouteResponse", vec![var("route")]))
            .request(send("app", "app", "optimizeRoute", vec![]))
            .request(send("app", "user", "showMapWithOptimizedRoute", vec![])),
    )
    .with_parameters(["fromLoc", "toLoc"]);

    let charging = ScenarioDefinition::triggered(
        "charging-stations",
        travel_preferences_trigger(),
        Body::new().before(
            optimize_route(),
            Body::new()
                .request(send("app", "csos", "chargingStationGpsDataRequest", vec![]))
                .bind(
                    "chargingStationsList",
                    call(
                        Helper::new("createMockChargingStationsList", create_mock_charging_stations_list),
                        vec![],
                    ),
                )
                .request_flexible(send(
                    "csos",
                    "app",
                    "considerChargingStationLocations",
                    vec![var("chargingStationsList")],
                )),
        ),
    );

    let mut program = empty_sos_program();
    program.add(route).expect("unique ids");
    program.add(charging).expect("unique ids");
    program
}

pub fn empty_rps_program() -> ScenarioProgram {
    ScenarioProgram::new("rps", Level::Intra, rps_roles())
}

/// Internal route calculation of the rps.
pub fn build_rps_program() -> ScenarioProgram {
    let get_location = Helper::new("getLocation", get_location);
    let calculate = ScenarioDefinition::triggered(
        "calculate-route",
        EventPattern::new(
            Endpoint::named("routeRequester"),
            Endpoint::named("rps"),
            "calculateRoute",
            vec![None, None],
        ),
        Body::new()
            .request(send(
                "rpsController",
                "gpsService",
                "getLocations",
                vec![var("fromLocString"), var("toLocString")],
            ))
            .bind("fromLoc", call(get_location.clone(), vec![var("fromLocString")]))
            .bind("toLoc", call(get_location, vec![var("toLocString")]))
            .request(send("gpsService", "rpsController", "locations", vec![var("fromLoc"), var("toLoc")]))
            .request(send("rpsController", "routePlaner", "calculateRoute", vec![var("fromLoc"), var("toLoc")]))
            .bind(
                "route",
                call(Helper::new("calculateRoute", calculate_route), vec![var("fromLoc"), var("toLoc")]),
            )
            .request(send("routePlaner", "rpsController", "calculatedRoute", vec![var("route")]))
            .request(send("rps", "routeRequester", "calculateRouteResponse", vec![var("route")])),
    )
    .with_parameters(["fromLocString", "toLocString"]);

    let mut program = empty_rps_program();
    program.add(calculate).expect("unique ids");
    program
}

pub fn compose_case_study(sos: ScenarioProgram, rps: ScenarioProgram) -> Result<Engine> {
    Composition::new(sos)
        .with_intra(rps, "rps", vec![RoleBinding::new("routeRequester", "app")])
        .compose()
}

pub fn engine_factories() -> EngineFactories {
    let mut f = EngineFactories::new();
    f.register("sos-empty", || Engine::start(&empty_sos_program()));
    f.register("sos", || Engine::start(&build_sos_program()));
    f.register("rps-empty", || Engine::start(&empty_rps_program()));
    f.register("rps", || Engine::start(&build_rps_program()));
    f.register("composed-empty-rps", || {
        compose_case_study(build_sos_program(), empty_rps_program())
    });
    f.register("composed", || compose_case_study(build_sos_program(), build_rps_program()));
    f
}

/// Step bindings for both case-study features.
pub fn step_registry() -> StepRegistry {
    let dortmund_paderborn = || vec![ParamValue::text("Dortmund").into(), ParamValue::text("Paderborn").into()];
    let mut registry = StepRegistry::new();
    registry
        .bind(
            StepKind::When,
            "^the SoS user adds travel preferences to the app$",
            StepAction::trigger(send("user", "app", "addTravelPreferences", dortmund_paderborn())),
        )
        .and_then(|r| {
            r.bind(
                StepKind::Then,
                "^the app displays a set of optimized routes$",
                StepAction::eventually(EventPattern::any_params("app", "user", "showMapWithOptimizedRoute", 0)),
            )
        })
        .and_then(|r| {
            r.bind(
                StepKind::When,
                "^the app sends travel preferences to the rps$",
                StepAction::trigger(send("routeRequester", "rps", "calculateRoute", dortmund_paderborn())),
            )
        })
        .and_then(|r| {
            r.bind(
                StepKind::Then,
                "^the rps responds route information including gps data$",
                StepAction::eventually(EventPattern::new(
                    Endpoint::named("rps"),
                    Endpoint::named("routeRequester"),
                    "calculateRouteResponse",
                    vec![Some(ParamValue::mock("route-Dortmund-Paderborn"))],
                )),
            )
        })
        .expect("case-study step bindings are well formed");
    registry
}

pub fn sos_feature() -> FeatureSpec {
    parse_feature(SOS_FEATURE).expect("bundled feature parses")
}

pub fn rps_feature() -> FeatureSpec {
    parse_feature(RPS_FEATURE).expect("bundled feature parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inject_preferences(engine: &mut Engine) {
        engine
            .inject(Event::new("user", "app", "addTravelPreferences", ["Dortmund", "Paderborn"]))
            .unwrap();
    }

    fn trace(engine: &Engine) -> Vec<String> {
        engine.trace().iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn sos_program_has_two_triggered_scenarios() {
        let p = build_sos_program();
        assert_eq!(p.definitions().len(), 2);
        assert!(p.definitions().iter().all(|d| d.trigger.is_some()));
        assert!(Engine::start(&p).unwrap().instances().is_empty());
    }

    #[test]
    fn standalone_sos_run() {
        let mut engine = Engine::start(&build_sos_program()).unwrap();
        inject_preferences(&mut engine);
        engine.step().unwrap();
        assert_eq!(engine.instances().len(), 2);
        engine.run_to_quiescence(100).unwrap();
        assert_eq!(
            trace(&engine),
            [
                r#"user -> app . addTravelPreferences("Dortmund", "Paderborn")"#,
                r#"app -> rps . calculateRoute("Dortmund", "Paderborn")"#,
                "rps -> app . calculateRouteResponse(mock:route)",
                "app -> csos . chargingStationGpsDataRequest()",
                "csos -> app . considerChargingStationLocations(mock:chargingStationsList)",
                "app -> app . optimizeRoute()",
                "app -> user . showMapWithOptimizedRoute()",
            ]
        );
        assert!(engine.instances().is_empty());
    }

    #[test]
    fn no_injection_no_trace() {
        let mut engine = Engine::start(&build_sos_program()).unwrap();
        engine.run_to_quiescence(10).unwrap();
        assert!(engine.trace().is_empty());
    }

    #[test]
    fn standalone_rps_run() {
        let mut engine = Engine::start(&build_rps_program()).unwrap();
        engine
            .inject(Event::new("routeRequester", "rps", "calculateRoute", ["Dortmund", "Paderborn"]))
            .unwrap();
        engine.run_to_quiescence(100).unwrap();
        assert_eq!(
            trace(&engine),
            [
                r#"routeRequester -> rps . calculateRoute("Dortmund", "Paderborn")"#,
                r#"rpsController -> gpsService . getLocations("Dortmund", "Paderborn")"#,
                "gpsService -> rpsController . locations(mock:loc-Dortmund, mock:loc-Paderborn)",
                "rpsController -> routePlaner . calculateRoute(mock:loc-Dortmund, mock:loc-Paderborn)",
                "routePlaner -> rpsController . calculatedRoute(mock:route-Dortmund-Paderborn)",
                "rps -> routeRequester . calculateRouteResponse(mock:route-Dortmund-Paderborn)",
            ]
        );
    }

    #[test]
    fn unrelated_event_triggers_no_rps_scenario() {
        let mut engine = Engine::start(&build_rps_program()).unwrap();
        engine.inject(Event::bare("routeRequester", "rps", "ping")).unwrap();
        engine.run_to_quiescence(10).unwrap();
        assert_eq!(engine.trace().len(), 1);
        assert!(engine.instances().is_empty());
    }

    #[test]
    fn composed_run_refines_the_route() {
        let mut engine = compose_case_study(build_sos_program(), build_rps_program()).unwrap();
        inject_preferences(&mut engine);
        engine.run_to_quiescence(100).unwrap();
        let t = trace(&engine);
        assert!(t.contains(&"rps -> app . calculateRouteResponse(mock:route-Dortmund-Paderborn)".to_string()), "{t:#?}");
        assert!(!t.iter().any(|e| e.contains("calculateRouteResponse(mock:route)")));
        assert_eq!(t.last().unwrap(), "app -> user . showMapWithOptimizedRoute()");
    }

    #[test]
    fn composed_run_without_rps_internals_is_stuck() {
        let mut engine = compose_case_study(build_sos_program(), empty_rps_program()).unwrap();
        inject_preferences(&mut engine);
        let run = engine.run_to_quiescence(100).unwrap();
        let crate::engine::RunEnd::Quiescent(q) = run.end else { panic!() };
        assert!(q.is_stuck());
        assert_eq!(q.pending.len(), 1);
        assert_eq!(q.pending[0].reason, crate::engine::PendingReason::Delegated);
        assert_eq!(q.pending[0].event.message.name, "calculateRouteResponse");
    }

    #[test]
    fn factories_are_registered() {
        let f = engine_factories();
        let names: Vec<_> = f.names().collect();
        for n in ["sos", "rps", "composed"] {
            assert!(names.contains(&n));
        }
        for n in names {
            f.get(n).unwrap()().unwrap();
        }
    }

    #[test]
    fn bundled_features_parse() {
        assert_eq!(sos_feature().scenarios.len(), 1);
        assert!(rps_feature().scenarios[0].tags.contains("RpsSystem"));
    }
}
