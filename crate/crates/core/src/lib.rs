//! Executable scenario-based requirements for systems of systems.
//!
//! - [`event`]: roles, interfaces, events and event patterns.
//! - [`engine`]: the behavioral-programming scenario engine.
//! - [`compose`]: joint execution of inter- and intra-system programs.
//! - [`gherkin`]: feature parsing, step skeletons and step matching.
//! - [`runner`]: runs features against engines and reports results.
//! - [`emobility`]: the e-mobility smart-charging case study.

pub mod compose;
pub mod emobility;
pub mod engine;
pub mod error;
pub mod event;
pub mod gherkin;
pub mod runner;

pub use compose::{compose, unify, Composition, RoleBinding};
pub use engine::{Engine, Level, ScenarioDefinition, ScenarioProgram};
pub use error::{Error, Result};
pub use event::{matches, Endpoint, Event, EventPattern, Message, ParamValue, Role, RoleRegistry};
