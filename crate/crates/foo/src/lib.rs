//! Flaws-of-Others consensus loop: agents answer, critique each other,
//! harmonizers merge the critiques into a judgement and specialists revise,
//! with every interaction sealed into a salted hash-chain ledger.

pub mod backend;
pub mod clock;
mod error;
pub mod estimate;
pub mod mock;
pub mod orchestrator;
pub mod policy;
pub mod record;
pub mod remote;
pub mod roster;
pub mod text;

pub use backend::{AgentBackend, Reply, Request, RevisionInput};
pub use clock::{Clock, LogicalClock, SystemClock};
pub use error::{BackendError, FooError, Result};
pub use estimate::{estimate_empirical_hazards, HazardEstimates};
pub use mock::{MockAgentModel, MockBackend};
pub use orchestrator::{build_agents, run_foo, Agent, FooOutcome, Orchestrator, RunStatus};
pub use policy::{ConvergencePolicy, RetryPolicy};
pub use record::{Answer, Critique, Flaw, History, Judgement, RoundRecord, StatementVerdict, SCHEMA_VERSION};
pub use roster::{AgentSpec, BackendKind, Role, RunConfig};
