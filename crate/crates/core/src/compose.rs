//! Joint execution of an inter-level program with intra-level programs.
//!
//! An intra program describes one constituent system from the inside. It
//! talks to the outside world through abstract roles (interfaces such as
//! `routeRequester`) which are bound to concrete inter-level roles (`app`).
//! Once a system's intra program is composed, every inter-level flexible
//! request touching that system is delegated: it can only be fulfilled by a
//! concrete request the intra program makes.

use std::collections::BTreeSet;

use crate::engine::{Engine, EngineSetup, ScenarioProgram};
use crate::error::{Error, Result};
use crate::event::{Event, RoleRegistry};

/// Binds an intra-level interface to the inter-level role implementing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleBinding {
    pub interface: String,
    pub concrete: String,
}

impl RoleBinding {
    pub fn new(interface: &str, concrete: &str) -> Self {
        Self {
            interface: interface.to_string(),
            concrete: concrete.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct IntraPart {
    program: ScenarioProgram,
    system: String,
    bindings: Vec<RoleBinding>,
}

#[derive(Debug, Clone)]
pub struct Composition {
    inter: ScenarioProgram,
    intra: Vec<IntraPart>,
}

impl Composition {
    pub fn new(inter: ScenarioProgram) -> Self {
        Self {
            inter,
            intra: Vec::new(),
        }
    }

    /// Adds the internal program of the inter-level role `system`.
    pub fn with_intra(mut self, program: ScenarioProgram, system: &str, bindings: Vec<RoleBinding>) -> Self {
        self.intra.push(IntraPart {
            program,
            system: system.to_string(),
            bindings,
        });
        self
    }

    fn validate(&self) -> Result<()> {
        let inter_roles = &self.inter.roles;
        let mut systems = BTreeSet::new();
        for part in &self.intra {
            if !inter_roles.contains(&part.system) {
                return Err(Error::UnknownRole(part.system.clone()));
            }
            if !systems.insert(part.system.as_str()) {
                return Err(Error::NamespaceClash(part.system.clone()));
            }
            for b in &part.bindings {
                let role = inter_roles
                    .get(&b.concrete)
                    .ok_or_else(|| Error::UnknownRole(b.concrete.clone()))?;
                if !role.implements(&b.interface) {
                    return Err(Error::UnknownInterface {
                        role: b.concrete.clone(),
                        interface: b.interface.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn merged_roles(&self) -> Result<RoleRegistry> {
        let mut merged = self.inter.roles.clone();
        for part in &self.intra {
            let bound = |name: &str| name == part.system || part.bindings.iter().any(|b| b.interface == name);
            for role in part.program.roles.roles() {
                if bound(role.name()) {
                    continue;
                }
                if merged.contains(role.name()) || merged.is_interface(role.name()) {
                    return Err(Error::NamespaceClash(role.name().to_string()));
                }
                merged
                    .register_role(role.name(), role.interfaces().iter().cloned())
                    .map_err(|_| Error::NamespaceClash(role.name().to_string()))?;
            }
        }
        Ok(merged)
    }

    /// Builds one engine running every program. Activation order is the
    /// inter program's definitions, then each intra program in order.
    pub fn compose(&self) -> Result<Engine> {
        self.validate()?;
        let roles = self.merged_roles()?;
        let mut setup = EngineSetup {
            roles,
            definitions: self.inter.definitions().to_vec(),
            ..EngineSetup::default()
        };
        for part in &self.intra {
            setup.definitions.extend(part.program.definitions().iter().cloned());
            setup.delegated.insert(part.system.clone());
            for b in &part.bindings {
                setup.aliases.insert(b.interface.clone(), b.concrete.clone());
            }
        }
        Engine::from_setup(setup)
    }
}

/// Composes `inter` with `(program, system, bindings)` parts.
pub fn compose(
    inter: &ScenarioProgram,
    intra: &[(ScenarioProgram, String)],
    bindings: &[RoleBinding],
) -> Result<Engine> {
    let mut composition = Composition::new(inter.clone());
    for (program, system) in intra {
        let own: Vec<RoleBinding> = bindings
            .iter()
            .filter(|b| program.roles.contains(&b.interface))
            .cloned()
            .collect();
        composition = composition.with_intra(program.clone(), system, own);
    }
    for b in bindings {
        if !intra.iter().any(|(p, _)| p.roles.contains(&b.interface)) {
            return Err(Error::UnknownInterface {
                role: b.concrete.clone(),
                interface: b.interface.clone(),
            });
        }
    }
    composition.compose()
}

/// Fulfilment of a flexible request by another event: same endpoints (up to
/// interface binding) and signature; the other event's parameters win.
pub fn unify(flexible: &Event, concrete: &Event, roles: &RoleRegistry) -> Option<Event> {
    let same = |a: &str, b: &str| a == b || roles.implements(a, b) || roles.implements(b, a);
    (flexible.flexible
        && flexible.message == concrete.message
        && same(&flexible.sender, &concrete.sender)
        && same(&flexible.receiver, &concrete.receiver))
    .then(|| concrete.clone())
}
