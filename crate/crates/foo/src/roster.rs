//! Agent roster and run configuration, read from a single JSON document.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{FooError, Result};
use crate::mock::MockAgentModel;
use crate::policy::ConvergencePolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Specialist,
    Harmonizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Mock,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    pub role: Role,
    pub backend: BackendKind,
    pub model: String,
    /// Passed through to the backend untouched.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub instructions: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the bearer token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auth_env: Option<String>,
}

impl AgentSpec {
    pub fn mock(id: impl Into<String>, role: Role) -> Self {
        Self {
            id: id.into(),
            role,
            backend: BackendKind::Mock,
            model: "mock".into(),
            temperature: 0.0,
            instructions: String::new(),
            endpoint: None,
            auth_env: None,
        }
    }

    pub fn is_harmonizer(&self) -> bool {
        self.role == Role::Harmonizer
    }
}

/// Ids unique, at least one harmonizer and one specialist, remote agents
/// carry an endpoint.
pub fn validate_roster(agents: &[AgentSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for a in agents {
        if a.id.trim().is_empty() {
            return Err(FooError::Config("agent id must not be empty".into()));
        }
        if !seen.insert(a.id.as_str()) {
            return Err(FooError::Config(format!("duplicate agent id {:?}", a.id)));
        }
        if !(a.temperature.is_finite() && a.temperature >= 0.0) {
            return Err(FooError::Config(format!(
                "agent {:?}: temperature must be >= 0, got {}",
                a.id, a.temperature
            )));
        }
        if a.backend == BackendKind::Remote && a.endpoint.as_deref().is_none_or(str::is_empty) {
            return Err(FooError::Config(format!("remote agent {:?} needs an endpoint", a.id)));
        }
    }
    if !agents.iter().any(AgentSpec::is_harmonizer) {
        return Err(FooError::Config("roster needs at least one harmonizer".into()));
    }
    if agents.iter().all(AgentSpec::is_harmonizer) {
        return Err(FooError::Config("roster needs at least one specialist".into()));
    }
    Ok(())
}

/// Everything a run reads from disk besides the task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Deployment secret for every ledger of the run.
    pub salt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genesis_timestamp: Option<String>,
    /// Required when any agent uses the mock backend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mock: Option<MockAgentModel>,
    #[serde(default)]
    pub policy: ConvergencePolicy,
    pub agents: Vec<AgentSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| FooError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.salt.is_empty() {
            return Err(FooError::Config("salt must not be empty".into()));
        }
        validate_roster(&self.agents)?;
        self.policy.validate()?;
        let needs_mock = self.agents.iter().any(|a| a.backend == BackendKind::Mock);
        match &self.mock {
            Some(m) => m.validate()?,
            None if needs_mock => {
                return Err(FooError::Config(
                    "mock agents need a top-level \"mock\" model".into(),
                ))
            }
            None => {}
        }
        Ok(())
    }
}
