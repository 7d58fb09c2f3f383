use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::{FeatureSpec, GherkinStep, Keyword, StepKind, UsageScenario};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::FeatureSyntax {
        line,
        message: message.into(),
    }
}

fn keyword_line(line: &str) -> Option<(Keyword, &str)> {
    [
        (Keyword::Given, "Given"),
        (Keyword::When, "When"),
        (Keyword::Then, "Then"),
        (Keyword::And, "And"),
    ]
    .into_iter()
    .find_map(|(kw, word)| {
        let rest = line.strip_prefix(word)?;
        (rest.is_empty() || rest.starts_with(char::is_whitespace)).then(|| (kw, rest.trim()))
    })
}

fn parse_tags(line_no: usize, line: &str) -> Result<Vec<String>> {
    line.split_whitespace()
        .map(|token| match token.strip_prefix('@') {
            Some(tag) if !tag.is_empty() && !tag.contains('@') => Ok(tag.to_string()),
            _ => Err(syntax(line_no, format!("malformed tag '{token}'"))),
        })
        .collect()
}

/// Parses one feature file.
pub fn parse_feature(text: &str) -> Result<FeatureSpec> {
    let mut feature: Option<FeatureSpec> = None;
    let mut pending_tags: BTreeSet<String> = BTreeSet::new();
    let mut tag_line = 0;
    let mut last_line = 0;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('@') {
            pending_tags.extend(parse_tags(line_no, line)?);
            tag_line = line_no;
            continue;
        }
        if let Some(name) = line.strip_prefix("Feature:") {
            if feature.is_some() {
                return Err(syntax(line_no, "only one Feature per file is supported"));
            }
            feature = Some(FeatureSpec {
                name: name.trim().to_string(),
                tags: std::mem::take(&mut pending_tags),
                scenarios: Vec::new(),
            });
            continue;
        }
        if let Some(name) = line.strip_prefix("Scenario:") {
            let Some(feature) = feature.as_mut() else {
                return Err(syntax(line_no, "Scenario before Feature"));
            };
            feature.scenarios.push(UsageScenario {
                name: name.trim().to_string(),
                tags: std::mem::take(&mut pending_tags),
                steps: Vec::new(),
            });
            continue;
        }
        if let Some((keyword, step_text)) = keyword_line(line) {
            let Some(scenario) = feature.as_mut().and_then(|f| f.scenarios.last_mut()) else {
                return Err(syntax(line_no, format!("step before any Scenario: '{line}'")));
            };
            if !pending_tags.is_empty() {
                return Err(syntax(tag_line, "tags must precede a Feature or Scenario header"));
            }
            if step_text.is_empty() {
                return Err(syntax(line_no, format!("{keyword} step without text")));
            }
            let kind = match keyword {
                Keyword::Given => StepKind::Given,
                Keyword::When => StepKind::When,
                Keyword::Then => StepKind::Then,
                Keyword::And => match scenario.steps.last() {
                    Some(prev) => prev.kind,
                    None => return Err(syntax(line_no, "And without a preceding step")),
                },
            };
            scenario.steps.push(GherkinStep {
                keyword,
                kind,
                text: step_text.to_string(),
            });
            continue;
        }
        return Err(syntax(line_no, format!("unknown keyword line '{line}'")));
    }

    if !pending_tags.is_empty() {
        return Err(syntax(tag_line, "tags must precede a Feature or Scenario header"));
    }
    let feature = feature.ok_or_else(|| syntax(last_line.max(1), "no Feature found"))?;
    if feature.scenarios.is_empty() {
        return Err(syntax(last_line.max(1), format!("feature '{}' has no scenarios", feature.name)));
    }
    Ok(feature)
}
