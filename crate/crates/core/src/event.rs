//! Roles, messages, events and event patterns.
//!
//! Everything else in the crate speaks this vocabulary: scenario bodies
//! request [`Event`]s, wait for and block [`EventPattern`]s, and the
//! harness asserts on patterns over the selected trace.
//!
//! Events have a canonical text form used in traces and reports:
//!
//! ```text
//! user -> app . addTravelPreferences("Dortmund", "Paderborn")
//! rps -> app . calculateRouteResponse(mock:route)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A participant in interactions: a system, a user, or a component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    name: String,
    interfaces: BTreeSet<String>,
}

impl Role {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interfaces(&self) -> &BTreeSet<String> {
        &self.interfaces
    }

    pub fn implements(&self, interface: &str) -> bool {
        self.interfaces.contains(interface)
    }
}

/// Role and interface names share one namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleRegistry {
    roles: BTreeMap<String, Role>,
}

impl RoleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a role with the interfaces it implements.
    ///
    /// Fails if the name is already a role, or if any name collides across
    /// the role/interface namespace.
    pub fn register_role<I, S>(&mut self, name: &str, interfaces: I) -> Result<&Role>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        check_ident(name)?;
        if self.roles.contains_key(name) {
            return Err(Error::DuplicateRole(name.to_string()));
        }
        if self.is_interface(name) {
            return Err(Error::NameCollision(name.to_string()));
        }
        let interfaces: BTreeSet<String> = interfaces.into_iter().map(Into::into).collect();
        for iface in &interfaces {
            check_ident(iface)?;
            if self.roles.contains_key(iface) || iface == name {
                return Err(Error::NameCollision(iface.clone()));
            }
        }
        let role = Role {
            name: name.to_string(),
            interfaces,
        };
        Ok(self.roles.entry(name.to_string()).or_insert(role))
    }

    pub fn get(&self, name: &str) -> Option<&Role> {
        self.roles.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.roles.contains_key(name)
    }

    pub fn roles(&self) -> impl Iterator<Item = &Role> {
        self.roles.values()
    }

    pub fn is_interface(&self, name: &str) -> bool {
        self.roles.values().any(|r| r.implements(name))
    }

    /// True iff `role` is a registered role declaring `interface`.
    /// One level only: interfaces do not inherit from each other.
    pub fn implements(&self, role: &str, interface: &str) -> bool {
        self.roles.get(role).is_some_and(|r| r.implements(interface))
    }

    /// Does the pattern endpoint `name` designate the event endpoint `actual`?
    /// Resolved as a role first, then as an interface.
    pub fn designates(&self, name: &str, actual: &str) -> bool {
        name == actual || self.implements(actual, name)
    }
}

fn check_ident(name: &str) -> Result<()> {
    if is_ident(name) {
        Ok(())
    } else {
        Err(Error::InvalidIdentifier(name.to_string()))
    }
}

pub(crate) fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn is_mock_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// A message signature: name plus arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    pub name: String,
    pub arity: usize,
}

impl Message {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Parameter values carried by events.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum ParamValue {
    Text(String),
    Int(i64),
    /// Placeholder produced by a mock helper; equal iff labels are equal.
    Mock(String),
}

impl ParamValue {
    pub fn text(s: impl Into<String>) -> Self {
        ParamValue::Text(s.into())
    }

    pub fn mock(label: impl Into<String>) -> Self {
        ParamValue::Mock(label.into())
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            ParamValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_mock(&self) -> bool {
        matches!(self, ParamValue::Mock(_))
    }
}

impl From<&str> for ParamValue {
    fn from(s: &str) -> Self {
        ParamValue::Text(s.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(s: String) -> Self {
        ParamValue::Text(s)
    }
}

impl From<i64> for ParamValue {
    fn from(n: i64) -> Self {
        ParamValue::Int(n)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Text(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            ParamValue::Int(n) => write!(f, "{n}"),
            ParamValue::Mock(label) => write!(f, "mock:{label}"),
        }
    }
}

/// One interaction: `sender` sends `receiver` a message with parameters.
///
/// Equality ignores the `flexible` flag.
#[derive(Debug, Clone, Eq)]
pub struct Event {
    pub sender: String,
    pub receiver: String,
    pub message: Message,
    pub params: Vec<ParamValue>,
    /// Set only on events produced by a flexible request.
    pub flexible: bool,
}

impl Event {
    pub fn new<I, P>(sender: &str, receiver: &str, message: &str, params: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<ParamValue>,
    {
        let params: Vec<ParamValue> = params.into_iter().map(Into::into).collect();
        Self {
            sender: sender.to_string(),
            receiver: receiver.to_string(),
            message: Message::new(message, params.len()),
            params,
            flexible: false,
        }
    }

    /// An event with no parameters.
    pub fn bare(sender: &str, receiver: &str, message: &str) -> Self {
        Self::new::<_, ParamValue>(sender, receiver, message, [])
    }

    pub fn into_flexible(mut self) -> Self {
        self.flexible = true;
        self
    }

    pub fn concrete(mut self) -> Self {
        self.flexible = false;
        self
    }

    /// The canonical text form.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.sender == other.sender
            && self.receiver == other.receiver
            && self.message == other.message
            && self.params == other.params
    }
}

impl std::hash::Hash for Event {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.sender.hash(state);
        self.receiver.hash(state);
        self.message.hash(state);
        self.params.hash(state);
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} . {}(",
            self.sender, self.receiver, self.message.name
        )?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed = parse_canonical(s)?;
        let mut params = Vec::with_capacity(parsed.params.len());
        for p in parsed.params {
            match p {
                Some(v) => params.push(v),
                None => {
                    return Err(Error::EventSyntax {
                        input: s.to_string(),
                        reason: "wildcard parameter in a concrete event".into(),
                    })
                }
            }
        }
        match (parsed.sender, parsed.receiver) {
            (Endpoint::Named(sender), Endpoint::Named(receiver)) => Ok(Event {
                sender,
                receiver,
                message: Message::new(parsed.message, params.len()),
                params,
                flexible: false,
            }),
            _ => Err(Error::EventSyntax {
                input: s.to_string(),
                reason: "wildcard endpoint in a concrete event".into(),
            }),
        }
    }
}

/// Sender/receiver position of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Any,
    /// A role name or an interface name.
    Named(String),
}

impl Endpoint {
    pub fn named(name: &str) -> Self {
        Endpoint::Named(name.to_string())
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Any => f.write_str("*"),
            Endpoint::Named(n) => f.write_str(n),
        }
    }
}

/// Matcher over events. The message signature is always constrained.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventPattern {
    pub sender: Endpoint,
    pub receiver: Endpoint,
    pub message: Message,
    /// `None` is a wildcard.
    pub params: Vec<Option<ParamValue>>,
}

impl EventPattern {
    pub fn new(sender: Endpoint, receiver: Endpoint, message: &str, params: Vec<Option<ParamValue>>) -> Self {
        Self {
            sender,
            receiver,
            message: Message::new(message, params.len()),
            params,
        }
    }

    /// Pattern between two named endpoints with every parameter wildcarded.
    pub fn any_params(sender: &str, receiver: &str, message: &str, arity: usize) -> Self {
        Self::new(
            Endpoint::named(sender),
            Endpoint::named(receiver),
            message,
            vec![None; arity],
        )
    }

    /// Pattern matching exactly `event` (by role name, not by interface).
    pub fn exact(event: &Event) -> Self {
        Self {
            sender: Endpoint::Named(event.sender.clone()),
            receiver: Endpoint::Named(event.receiver.clone()),
            message: event.message.clone(),
            params: event.params.iter().cloned().map(Some).collect(),
        }
    }

    /// Matches any event with this signature.
    pub fn message_only(message: &str, arity: usize) -> Self {
        Self::new(Endpoint::Any, Endpoint::Any, message, vec![None; arity])
    }
}

impl fmt::Display for EventPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} . {}(", self.sender, self.receiver, self.message.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match p {
                Some(v) => write!(f, "{v}")?,
                None => f.write_str("*")?,
            }
        }
        f.write_str(")")
    }
}

impl FromStr for EventPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed = parse_canonical(s)?;
        Ok(EventPattern {
            sender: parsed.sender,
            receiver: parsed.receiver,
            message: Message::new(parsed.message, parsed.params.len()),
            params: parsed.params,
        })
    }
}

/// Does `pattern` match `event` under the interface declarations in `roles`?
pub fn matches(pattern: &EventPattern, event: &Event, roles: &RoleRegistry) -> bool {
    pattern.message == event.message
        && endpoint_matches(&pattern.sender, &event.sender, roles)
        && endpoint_matches(&pattern.receiver, &event.receiver, roles)
        && pattern
            .params
            .iter()
            .zip(&event.params)
            .all(|(p, v)| p.as_ref().is_none_or(|p| p == v))
}

fn endpoint_matches(endpoint: &Endpoint, actual: &str, roles: &RoleRegistry) -> bool {
    match endpoint {
        Endpoint::Any => true,
        Endpoint::Named(name) => roles.designates(name, actual),
    }
}

struct Canonical {
    sender: Endpoint,
    receiver: Endpoint,
    message: String,
    params: Vec<Option<ParamValue>>,
}

fn parse_canonical(input: &str) -> Result<Canonical> {
    let err = |reason: &str| Error::EventSyntax {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let (sender, rest) = input.split_once("->").ok_or_else(|| err("missing '->'"))?;
    let (receiver, rest) = rest.split_once('.').ok_or_else(|| err("missing '.'"))?;
    let (message, rest) = rest.split_once('(').ok_or_else(|| err("missing '('"))?;
    let body = rest
        .trim_end()
        .strip_suffix(')')
        .ok_or_else(|| err("missing closing ')'"))?;

    let endpoint = |raw: &str| -> Result<Endpoint> {
        let raw = raw.trim();
        if raw == "*" {
            Ok(Endpoint::Any)
        } else if is_ident(raw) {
            Ok(Endpoint::Named(raw.to_string()))
        } else {
            Err(err(&format!("bad endpoint '{raw}'")))
        }
    };
    let message = message.trim();
    if !is_ident(message) {
        return Err(err(&format!("bad message name '{message}'")));
    }

    Ok(Canonical {
        sender: endpoint(sender)?,
        receiver: endpoint(receiver)?,
        message: message.to_string(),
        params: parse_params(body).map_err(|r| err(&r))?,
    })
}

fn parse_params(body: &str) -> std::result::Result<Vec<Option<ParamValue>>, String> {
    let mut params = Vec::new();
    let mut chars = body.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            None if params.is_empty() => return Ok(params),
            None => return Err("trailing ','".into()),
            Some('"') => {
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('n') => text.push('\n'),
                            Some(c @ ('"' | '\\')) => text.push(c),
                            _ => return Err("bad escape".into()),
                        },
                        Some(c) => text.push(c),
                    }
                }
                params.push(Some(ParamValue::Text(text)));
            }
            Some(_) => {
                let mut token = String::new();
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    token.push(c);
                    chars.next();
                }
                let token = token.trim();
                if token == "*" {
                    params.push(None);
                } else if let Some(label) = token.strip_prefix("mock:") {
                    if !is_mock_label(label) {
                        return Err(format!("bad mock label '{label}'"));
                    }
                    params.push(Some(ParamValue::Mock(label.to_string())));
                } else if let Ok(n) = token.parse::<i64>() {
                    params.push(Some(ParamValue::Int(n)));
                } else {
                    return Err(format!("bad parameter '{token}'"));
                }
            }
        }
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            None => return Ok(params),
            Some(',') => continue,
            Some(c) => return Err(format!("unexpected '{c}'")),
        }
    }
}
