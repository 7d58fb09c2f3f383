//! A Gherkin subset: `Feature`, `Scenario`, `Given`/`When`/`Then`/`And`,
//! `@tag` lines and `#` comments.

mod parser;
mod registry;
mod skeleton;
mod tags;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::parse_feature;
pub use registry::{match_step, StepBinding, StepMatch, StepRegistry};
pub use skeleton::{generate_skeletons, render_skeletons, step_pattern, Skeleton};
pub use tags::{filter_by_tags, TagExpression};

/// Keyword as written in the feature file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Keyword {
    Given,
    When,
    Then,
    And,
}

impl Keyword {
    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Given => "Given",
            Keyword::When => "When",
            Keyword::Then => "Then",
            Keyword::And => "And",
        }
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Semantic kind of a step once `And` is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    Given,
    When,
    Then,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Given => "Given",
            StepKind::When => "When",
            StepKind::Then => "Then",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GherkinStep {
    pub keyword: Keyword,
    /// Never `And`: inherited from the nearest preceding step.
    pub kind: StepKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageScenario {
    pub name: String,
    pub tags: BTreeSet<String>,
    pub steps: Vec<GherkinStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    pub name: String,
    pub tags: BTreeSet<String>,
    pub scenarios: Vec<UsageScenario>,
}

impl FeatureSpec {
    /// Scenario tags united with the feature's tags.
    pub fn effective_tags(&self, scenario: &UsageScenario) -> BTreeSet<String> {
        scenario.tags.union(&self.tags).cloned().collect()
    }
}

fn write_tags(f: &mut fmt::Formatter<'_>, indent: &str, tags: &BTreeSet<String>) -> fmt::Result {
    if tags.is_empty() {
        return Ok(());
    }
    f.write_str(indent)?;
    for (i, t) in tags.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "@{t}")?;
    }
    writeln!(f)
}

/// Prints the feature back in the supported subset.
impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tags(f, "", &self.tags)?;
        writeln!(f, "Feature: {}", self.name)?;
        for scenario in &self.scenarios {
            writeln!(f)?;
            write_tags(f, "  ", &scenario.tags)?;
            writeln!(f, "  Scenario: {}", scenario.name)?;
            for step in &scenario.steps {
                writeln!(f, "    {} {}", step.keyword, step.text)?;
            }
        }
        Ok(())
    }
}
