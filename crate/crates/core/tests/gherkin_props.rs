mod common;

use proptest::prelude::*;

use common::features::{quoted_literals, random_feature};
use scenarist::emobility;
use scenarist::gherkin::{
    generate_skeletons, match_step, parse_feature, render_skeletons, FeatureSpec, Keyword, StepRegistry,
};

fn corpus() -> Vec<FeatureSpec> {
    vec![emobility::sos_feature(), emobility::rps_feature()]
}

fn assert_total(feature: &FeatureSpec) {
    let registry = StepRegistry::from_skeletons(&generate_skeletons(feature)).unwrap();
    for step in feature.scenarios.iter().flat_map(|s| &s.steps) {
        let m = match_step(&registry, step.kind, &step.text)
            .unwrap()
            .unwrap_or_else(|| panic!("no stub matches {:?}", step.text));
        assert_eq!(m.captures, quoted_literals(&step.text), "captures of {:?}", step.text);
    }
}

#[test]
fn corpus_round_trips() {
    for feature in corpus() {
        assert_eq!(parse_feature(&feature.to_string()).unwrap(), feature);
    }
}

#[test]
fn corpus_skeletons_are_total() {
    for feature in corpus() {
        assert_total(&feature);
    }
}

#[test]
fn skeletons_dedupe_repeated_steps() {
    let text = "Feature: f\n  Scenario: one\n    When go \"A\"\n  Scenario: two\n    When go \"B\"\n    Then done\n";
    let f = parse_feature(text).unwrap();
    let rendered = render_skeletons(&generate_skeletons(&f));
    assert_eq!(
        rendered,
        "When(\"^go \\\"([^\\\"]*)\\\"$\") {\n    //implement here\n}\nThen(\"^done$\") {\n    //implement here\n}\n"
    );
}

#[test]
fn syntax_errors_carry_line_numbers() {
    let text = "Feature: f\n\n  Scenario: s\n    When a\n    Whenever b\n";
    let err = parse_feature(text).unwrap_err();
    assert!(matches!(err, scenarist::Error::FeatureSyntax { line: 5, .. }), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_features_round_trip(seed in any::<u64>()) {
        let feature = random_feature(seed);
        let printed = feature.to_string();
        let parsed = parse_feature(&printed).unwrap();
        prop_assert_eq!(&parsed, &feature, "printed:\n{}", printed);
        prop_assert_eq!(parse_feature(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn random_features_have_total_skeletons(seed in any::<u64>()) {
        assert_total(&random_feature(seed));
    }

    #[test]
    fn and_steps_take_the_previous_kind(seed in any::<u64>()) {
        let parsed = parse_feature(&random_feature(seed).to_string()).unwrap();
        for s in &parsed.scenarios {
            prop_assert!(s.steps[0].keyword != Keyword::And);
            for w in s.steps.windows(2) {
                if w[1].keyword == Keyword::And {
                    prop_assert_eq!(w[1].kind, w[0].kind);
                }
            }
        }
    }
}
