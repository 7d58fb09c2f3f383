//! Random features in the supported Gherkin subset.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scenarist::gherkin::{FeatureSpec, GherkinStep, Keyword, StepKind, UsageScenario};

const WORDS: &[&str] = &[
    "the", "app", "user", "sends", "route", "to", "rps", "a", "list", "of", "stations", "(optional)",
    "1+1", "[x]", "cost?", "50%", "$total", "a.b", "Ω", "Straße", "{n}", "x|y", "*", "^",
];

const QUOTED: &[&str] = &["Dortmund", "Paderborn", "", "two words", "a.b*c", "(x)", "Köln", "42"];

fn words(rng: &mut ChaCha8Rng, n: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.gen_range(n);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn tags(rng: &mut ChaCha8Rng) -> BTreeSet<String> {
    (0..rng.gen_range(0..=2))
        .map(|_| format!("{}{}", ["Rps", "Csos", "wip", "slow_1"].choose(rng).unwrap(), rng.gen_range(0..3)))
        .collect()
}

fn step_text(rng: &mut ChaCha8Rng) -> String {
    let mut parts = vec![words(rng, 1..=4)];
    for _ in 0..rng.gen_range(0..=2) {
        parts.push(format!("\"{}\"", QUOTED.choose(rng).unwrap()));
        if rng.gen_bool(0.5) {
            parts.push(words(rng, 1..=2));
        }
    }
    parts.join(" ")
}

pub fn random_feature(seed: u64) -> FeatureSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenarios = (0..rng.gen_range(1..=3))
        .map(|i| {
            let mut steps: Vec<GherkinStep> = Vec::new();
            for j in 0..rng.gen_range(1..=5) {
                let keyword = if j == 0 {
                    *[Keyword::Given, Keyword::When, Keyword::Then].choose(&mut rng).unwrap()
                } else {
                    *[Keyword::Given, Keyword::When, Keyword::Then, Keyword::And]
                        .choose(&mut rng)
                        .unwrap()
                };
                let kind = match keyword {
                    Keyword::Given => StepKind::Given,
                    Keyword::When => StepKind::When,
                    Keyword::Then => StepKind::Then,
                    Keyword::And => steps.last().unwrap().kind,
                };
                steps.push(GherkinStep {
                    keyword,
                    kind,
                    text: step_text(&mut rng),
                });
            }
            UsageScenario {
                name: format!("{} {i}", words(&mut rng, 1..=4)),
                tags: tags(&mut rng),
                steps,
            }
        })
        .collect();
    FeatureSpec {
        name: words(&mut rng, 1..=5),
        tags: tags(&mut rng),
        scenarios,
    }
}

/// The quoted literals of a step text, in order.
pub fn quoted_literals(text: &str) -> Vec<String> {
    text.split('"').skip(1).step_by(2).map(str::to_string).collect()
}
