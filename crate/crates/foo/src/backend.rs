//! Backend call contract shared by mock and remote agents.

use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::record::{Answer, Critique, Judgement};

/// Instruction prefixed to every cross-examination request.
pub const FLAW_INSTRUCTION: &str = "Find the flaws in the following answers.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionInput {
    pub own: Answer,
    pub judgement: Judgement,
}

/// One backend call. A specialist's consensus turn is a single `Review`
/// carrying both the revision under the previous judgement and the
/// critiques of its peers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Request {
    Broadcast {
        task: String,
    },
    Review {
        task: String,
        round: usize,
        revise: Option<RevisionInput>,
        /// Never contains the caller's own answer.
        peers: Vec<Answer>,
    },
    Harmonize {
        task: String,
        round: usize,
        answers: Vec<Answer>,
        critiques: Vec<Critique>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Reply {
    Answer(Answer),
    Review {
        revision: Option<Answer>,
        critiques: Vec<Critique>,
    },
    Judgement(Judgement),
}

pub trait AgentBackend: Send {
    fn call(&mut self, request: &Request) -> Result<Reply, BackendError>;

    /// Whether answers carry statement-level ground truth.
    fn has_ground_truth(&self) -> bool {
        false
    }
}

/// Checks that `reply` answers `request` on behalf of `agent`.
pub fn check_reply(agent: &str, request: &Request, reply: &Reply) -> Result<(), BackendError> {
    let bad = |m: String| Err(BackendError::Malformed(m));
    match (request, reply) {
        (Request::Broadcast { .. }, Reply::Answer(a)) => check_answer(agent, a),
        (Request::Review { revise, peers, .. }, Reply::Review { revision, critiques }) => {
            match (revise, revision) {
                (Some(_), Some(a)) => check_answer(agent, a)?,
                (None, None) => {}
                (Some(_), None) => return bad("revision requested but not returned".into()),
                (None, Some(_)) => return bad("unrequested revision".into()),
            }
            if critiques.len() != peers.len() {
                return bad(format!("{} critiques for {} peers", critiques.len(), peers.len()));
            }
            for (c, p) in critiques.iter().zip(peers) {
                if c.critic != agent || c.target != p.agent || c.target == c.critic {
                    return bad(format!("critique {} -> {} out of place", c.critic, c.target));
                }
                if c.text.trim().is_empty() {
                    return bad(format!("empty critique of {}", c.target));
                }
            }
            Ok(())
        }
        (Request::Harmonize { .. }, Reply::Judgement(j)) => {
            if j.harmonizer != agent {
                return bad(format!("judgement signed by {}", j.harmonizer));
            }
            Ok(())
        }
        _ => bad("reply does not match request kind".into()),
    }
}

fn check_answer(agent: &str, a: &Answer) -> Result<(), BackendError> {
    if a.agent != agent {
        return Err(BackendError::Malformed(format!("answer signed by {}", a.agent)));
    }
    if a.text.trim().is_empty() {
        return Err(BackendError::Malformed("empty answer".into()));
    }
    Ok(())
}
