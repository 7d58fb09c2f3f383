use regex::Regex;

use crate::error::{Error, Result};
use crate::runner::StepAction;

use super::skeleton::Skeleton;
use super::StepKind;

/// A step pattern bound to an action.
#[derive(Debug, Clone)]
pub struct StepBinding {
    kind: StepKind,
    pattern: String,
    regex: Regex,
    action: StepAction,
}

impl StepBinding {
    /// Fails if the pattern does not compile, if its capture count differs
    /// from the action's parameter count, or if the action does not suit the
    /// step kind.
    pub fn new(kind: StepKind, pattern: &str, action: StepAction) -> Result<Self> {
        let regex = Regex::new(&format!("^(?:{pattern})$")).map_err(|source| Error::StepPattern {
            pattern: pattern.to_string(),
            source,
        })?;
        let captures = regex.captures_len() - 1;
        if captures != action.params() {
            return Err(Error::CaptureArity {
                pattern: pattern.to_string(),
                captures,
                params: action.params(),
            });
        }
        action.check_kind(kind)?;
        Ok(Self {
            kind,
            pattern: pattern.to_string(),
            regex,
            action,
        })
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn action(&self) -> &StepAction {
        &self.action
    }

    fn captures(&self, text: &str) -> Option<Vec<String>> {
        let caps = self.regex.captures(text)?;
        Some(
            caps.iter()
                .skip(1)
                .map(|m| m.map_or_else(String::new, |m| m.as_str().to_string()))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct StepRegistry {
    bindings: Vec<StepBinding>,
}

#[derive(Debug, Clone)]
pub struct StepMatch<'a> {
    pub binding: &'a StepBinding,
    pub captures: Vec<String>,
}

impl StepRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, binding: StepBinding) {
        self.bindings.push(binding);
    }

    pub fn bind(&mut self, kind: StepKind, pattern: &str, action: StepAction) -> Result<&mut Self> {
        self.add(StepBinding::new(kind, pattern, action)?);
        Ok(self)
    }

    /// Registry whose bindings are the placeholder stubs themselves.
    pub fn from_skeletons(skeletons: &[Skeleton]) -> Result<Self> {
        let mut registry = Self::new();
        for s in skeletons {
            let params = regex::Regex::new(&s.pattern)
                .map_err(|source| Error::StepPattern {
                    pattern: s.pattern.clone(),
                    source,
                })?
                .captures_len()
                - 1;
            registry.bind(s.kind, &s.pattern, StepAction::Pending { params })?;
        }
        Ok(registry)
    }

    pub fn bindings(&self) -> &[StepBinding] {
        &self.bindings
    }
}

/// Finds the unique binding of `kind` matching the whole `text`.
/// `Ok(None)` marks an unbound (pending) step.
pub fn match_step<'a>(registry: &'a StepRegistry, kind: StepKind, text: &str) -> Result<Option<StepMatch<'a>>> {
    let mut found = registry
        .bindings
        .iter()
        .filter(|b| b.kind == kind)
        .filter_map(|b| b.captures(text).map(|captures| StepMatch { binding: b, captures }));
    let Some(first) = found.next() else {
        return Ok(None);
    };
    let others = found.count();
    if others > 0 {
        return Err(Error::AmbiguousStep {
            text: text.to_string(),
            count: others + 1,
        });
    }
    Ok(Some(first))
}
