//! Chat-completion style HTTP backend.
//!
//! Requests are `{model, temperature, messages: [{role, content}]}`. The
//! completion text is taken from whichever known provider field is present.
//! Review replies are split into `### REVISION` and `### CRITIQUE <id>`
//! sections; harmonizer replies are parsed as judgement JSON, falling back to
//! the raw text as the summary.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::backend::{AgentBackend, Reply, Request, RevisionInput, FLAW_INSTRUCTION};
use crate::error::BackendError;
use crate::record::{Answer, Critique, Flaw, Judgement};
use crate::roster::AgentSpec;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

const REVISION_HEADER: &str = "### REVISION";
const CRITIQUE_HEADER: &str = "### CRITIQUE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    fn new(role: &str, content: impl Into<String>) -> Self {
        Self { role: role.into(), content: content.into() }
    }
}

/// Wire body of one completion request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionRequest<'a> {
    pub model: &'a str,
    pub temperature: f64,
    pub messages: Vec<Message>,
}

pub struct RemoteBackend {
    agent: ureq::Agent,
    id: String,
    endpoint: String,
    model: String,
    temperature: f64,
    instructions: String,
    token: Option<String>,
}

impl RemoteBackend {
    /// Reads the token from `spec.auth_env` now so a missing credential
    /// fails before the run starts.
    pub fn from_spec(spec: &AgentSpec, timeout: Duration) -> Result<Self, BackendError> {
        let endpoint = spec
            .endpoint
            .clone()
            .ok_or_else(|| BackendError::Transport(format!("agent {} has no endpoint", spec.id)))?;
        let token = match &spec.auth_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                BackendError::Auth(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Ok(Self {
            agent,
            id: spec.id.clone(),
            endpoint,
            model: spec.model.clone(),
            temperature: spec.temperature,
            instructions: spec.instructions.clone(),
            token,
        })
    }

    fn complete(&self, user: String) -> Result<String, BackendError> {
        let mut messages = Vec::new();
        if !self.instructions.is_empty() {
            messages.push(Message::new("system", self.instructions.clone()));
        }
        messages.push(Message::new("user", user));
        let body = CompletionRequest {
            model: &self.model,
            temperature: self.temperature,
            messages,
        };
        let mut req = self.agent.post(&self.endpoint);
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| match e {
            ureq::Error::StatusCode(code) => BackendError::Status(code),
            other => BackendError::Transport(other.to_string()),
        })?;
        let value: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| BackendError::Malformed(e.to_string()))?;
        extract_completion(&value)
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| BackendError::Malformed("no completion text in response".into()))
    }
}

/// Completion text from the common provider response shapes.
pub fn extract_completion(v: &Value) -> Option<String> {
    let paths: [&[&str]; 6] = [
        &["choices", "0", "message", "content"],
        &["choices", "0", "text"],
        &["content", "0", "text"],
        &["output_text"],
        &["completion"],
        &["text"],
    ];
    paths.iter().find_map(|path| {
        let mut cur = v;
        for key in *path {
            cur = match key.parse::<usize>() {
                Ok(i) => cur.get(i)?,
                Err(_) => cur.get(*key)?,
            };
        }
        cur.as_str().map(str::to_owned)
    })
}

pub fn review_prompt(task: &str, revise: Option<&RevisionInput>, peers: &[Answer]) -> String {
    let mut p = format!("Task:\n{task}\n");
    if let Some(input) = revise {
        let judgement = serde_json::to_string_pretty(&input.judgement).unwrap_or_default();
        p.push_str(&format!(
            "\nYour previous answer:\n{}\n\nJudgement on the last round of critiques:\n{judgement}\n\n\
             Revise your answer in light of the judgement, rebutting any point you believe is wrong. \
             Put the full revised answer under a line reading \"{REVISION_HEADER}\".\n",
            input.own.text
        ));
    }
    if !peers.is_empty() {
        p.push_str(&format!(
            "\n{FLAW_INSTRUCTION} For each, write a section headed \"{CRITIQUE_HEADER} <id>\".\n"
        ));
        for a in peers {
            p.push_str(&format!("\n--- answer from {} ---\n{}\n", a.agent, a.text));
        }
    }
    p
}

pub fn harmonize_prompt(task: &str, round: usize, answers: &[Answer], critiques: &[crate::record::Critique]) -> String {
    let mut p = format!(
        "Task:\n{task}\n\nRound {round}. Aggregate the critiques below. Separate agreements from \
         contradictions and reply with a JSON object \
         {{\"summary\": string, \"agreed\": [{{\"target\": id, \"description\": string}}], \
         \"contested\": [{{\"target\": id, \"description\": string}}]}}.\n"
    );
    for a in answers {
        p.push_str(&format!("\n--- answer from {} ---\n{}\n", a.agent, a.text));
    }
    for c in critiques {
        p.push_str(&format!("\n--- critique by {} of {} ---\n{}\n", c.critic, c.target, c.text));
    }
    p
}

/// Splits a reply into `(header, body)` sections on lines starting `### `.
fn sections(text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if let Some(h) = line.strip_prefix("### ") {
            out.push((h.trim().to_owned(), String::new()));
        } else if let Some((_, body)) = out.last_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    for (_, body) in &mut out {
        *body = body.trim().to_owned();
    }
    out
}

pub fn parse_review(
    agent: &str,
    text: &str,
    revise: bool,
    peers: &[Answer],
) -> Result<(Option<Answer>, Vec<Critique>), BackendError> {
    let secs = sections(text);
    let find = |name: &str| {
        secs.iter()
            .find(|(h, _)| h.eq_ignore_ascii_case(name))
            .map(|(_, b)| b.clone())
    };
    let revision = if revise {
        let body = match find("REVISION") {
            Some(b) => b,
            None if peers.is_empty() => text.trim().to_owned(),
            None => return Err(BackendError::Malformed("missing revision section".into())),
        };
        Some(Answer { agent: agent.into(), text: body, truth: None })
    } else {
        None
    };
    let critiques = peers
        .iter()
        .map(|p| {
            let body = match find(&format!("CRITIQUE {}", p.agent)) {
                Some(b) => b,
                None if peers.len() == 1 && !revise => text.trim().to_owned(),
                None => {
                    return Err(BackendError::Malformed(format!("missing critique of {}", p.agent)))
                }
            };
            Ok(Critique {
                critic: agent.into(),
                target: p.agent.clone(),
                text: body,
                flags: Vec::new(),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok((revision, critiques))
}

#[derive(Deserialize)]
struct JudgementBody {
    #[serde(default)]
    summary: String,
    #[serde(default)]
    agreed: Vec<Flaw>,
    #[serde(default)]
    contested: Vec<Flaw>,
}

pub fn parse_judgement(harmonizer: &str, round: usize, text: &str) -> Judgement {
    let json = match (text.find('{'), text.rfind('}')) {
        (Some(a), Some(b)) if a < b => serde_json::from_str::<JudgementBody>(&text[a..=b]).ok(),
        _ => None,
    };
    match json {
        Some(body) => Judgement {
            round,
            harmonizer: harmonizer.into(),
            summary: if body.summary.is_empty() { text.trim().to_owned() } else { body.summary },
            agreed: body.agreed,
            contested: body.contested,
            verdicts: Vec::new(),
        },
        None => Judgement {
            round,
            harmonizer: harmonizer.into(),
            summary: text.trim().to_owned(),
            ..Judgement::default()
        },
    }
}

impl AgentBackend for RemoteBackend {
    fn call(&mut self, request: &Request) -> Result<Reply, BackendError> {
        match request {
            Request::Broadcast { task } => {
                let text = self.complete(task.clone())?;
                Ok(Reply::Answer(Answer { agent: self.id.clone(), text, truth: None }))
            }
            Request::Review { task, revise, peers, .. } => {
                let text = self.complete(review_prompt(task, revise.as_ref(), peers))?;
                let (revision, critiques) = parse_review(&self.id, &text, revise.is_some(), peers)?;
                Ok(Reply::Review { revision, critiques })
            }
            Request::Harmonize { task, round, answers, critiques } => {
                let text = self.complete(harmonize_prompt(task, *round, answers, critiques))?;
                Ok(Reply::Judgement(parse_judgement(&self.id, *round, &text)))
            }
        }
    }
}
