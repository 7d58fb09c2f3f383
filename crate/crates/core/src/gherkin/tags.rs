use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::FeatureSpec;

/// A comma-separated list of `@tag`s; a scenario is selected if it carries
/// any of them. The empty expression selects everything.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagExpression {
    any_of: BTreeSet<String>,
}

impl TagExpression {
    pub fn is_empty(&self) -> bool {
        self.any_of.is_empty()
    }

    pub fn selects(&self, tags: &BTreeSet<String>) -> bool {
        self.is_empty() || !self.any_of.is_disjoint(tags)
    }
}

impl FromStr for TagExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self::default());
        }
        let any_of = s
            .split(',')
            .map(|item| {
                let item = item.trim();
                match item.strip_prefix('@') {
                    Some(tag)
                        if !tag.is_empty()
                            && !tag.contains(|c: char| c.is_whitespace() || c == '@') =>
                    {
                        Ok(tag.to_string())
                    }
                    _ => Err(Error::TagExpression(s.to_string())),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { any_of })
    }
}

/// Keeps scenarios whose effective tags intersect `expression`, dropping
/// features left without scenarios.
pub fn filter_by_tags(features: &[FeatureSpec], expression: &str) -> Result<Vec<FeatureSpec>> {
    let expr: TagExpression = expression.parse()?;
    Ok(features
        .iter()
        .filter_map(|f| {
            let scenarios: Vec<_> = f
                .scenarios
                .iter()
                .filter(|s| expr.selects(&f.effective_tags(s)))
                .cloned()
                .collect();
            (!scenarios.is_empty()).then(|| FeatureSpec {
                scenarios,
                ..f.clone()
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gherkin::parse_feature;

    fn features() -> Vec<FeatureSpec> {
        vec![
            parse_feature("Feature: SoS\n Scenario: a\n When x\n").unwrap(),
            parse_feature("Feature: RPS\n @RpsSystem\n Scenario: b\n When y\n Scenario: c\n When z\n")
                .unwrap(),
            parse_feature("@Csos\nFeature: CSOS\n Scenario: d\n When w\n").unwrap(),
        ]
    }

    #[test]
    fn single_tag_selects_tagged_scenarios() {
        let kept = filter_by_tags(&features(), "@RpsSystem").unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].name, "RPS");
        assert_eq!(kept[0].scenarios.len(), 1);
        assert_eq!(kept[0].scenarios[0].name, "b");
    }

    #[test]
    fn feature_tags_are_inherited() {
        let kept = filter_by_tags(&features(), "@Csos").unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].name, "CSOS");
    }

    #[test]
    fn comma_list_is_a_union() {
        let kept = filter_by_tags(&features(), "@RpsSystem, @Csos").unwrap();
        assert_eq!(kept.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["RPS", "CSOS"]);
    }

    #[test]
    fn empty_expression_keeps_everything() {
        assert_eq!(filter_by_tags(&features(), "").unwrap(), features());
    }

    #[test]
    fn unknown_tag_keeps_nothing() {
        assert!(filter_by_tags(&features(), "@nonexistent").unwrap().is_empty());
    }

    #[test]
    fn malformed_expressions() {
        for bad in ["RpsSystem", "@", "@a,", "@a b", ",@a", "@a@b"] {
            assert!(
                matches!(filter_by_tags(&features(), bad), Err(Error::TagExpression(_))),
                "{bad}"
            );
        }
    }
}
