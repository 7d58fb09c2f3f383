use std::collections::HashSet;
use std::fmt::Write as _;

use super::{FeatureSpec, StepKind};

/// Generated step stub: an anchored pattern with a placeholder body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Skeleton {
    pub kind: StepKind,
    pub pattern: String,
}

pub const PLACEHOLDER: &str = "//implement here";

/// Anchored pattern for a step; quoted strings become `"([^"]*)"` captures.
pub fn step_pattern(text: &str) -> String {
    let mut pattern = String::from("^");
    let mut rest = text;
    while let Some(open) = rest.find('"') {
        let Some(len) = rest[open + 1..].find('"') else {
            break;
        };
        pattern.push_str(&regex::escape(&rest[..open]));
        pattern.push_str("\"([^\"]*)\"");
        rest = &rest[open + len + 2..];
    }
    pattern.push_str(&regex::escape(rest));
    pattern.push('$');
    pattern
}

/// One stub per distinct step, in document order.
pub fn generate_skeletons(feature: &FeatureSpec) -> Vec<Skeleton> {
    let mut seen = HashSet::new();
    feature
        .scenarios
        .iter()
        .flat_map(|s| &s.steps)
        .map(|step| Skeleton {
            kind: step.kind,
            pattern: step_pattern(&step.text),
        })
        .filter(|s| seen.insert(s.clone()))
        .collect()
}

/// Renders stubs in the step-definition layout used by the harness.
pub fn render_skeletons(skeletons: &[Skeleton]) -> String {
    let mut out = String::new();
    for s in skeletons {
        let quoted = s.pattern.replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "{}(\"{}\") {{", s.kind, quoted);
        let _ = writeln!(out, "    {PLACEHOLDER}");
        let _ = writeln!(out, "}}");
    }
    out
}
