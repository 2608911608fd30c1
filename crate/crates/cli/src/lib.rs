//! `discursive` command-line front end.
//!
//! Exit codes: 0 success or VERIFIED, 1 usage, 2 invalid parameters or
//! input, 3 tamper verdict or replay mismatch, 4 backend failure, 5 I/O.

mod error;
mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use discursive_core::model::{
    consistency_lambda, cross_fixed_point, false_share_with_agents, fixed_point, invalidation_floor,
    min_agents, spectral_gap, DetectionParams, DualNetworkParams, FloorInputs, HazardParams,
};
use discursive_core::sim::{run_ensemble, to_csv, to_json, DualModel, Fabrication, Process, SimConfig};
use discursive_foo::{build_agents, BackendKind, Orchestrator, RunConfig, RunStatus, SystemClock};
use discursive_ledger::{save, Digest, Ledger, Salt, Timestamp, TAMPER_BANNER};
use serde::Serialize;
use serde_json::json;

pub use error::{CliError, Result};
pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "discursive",
    version,
    about = "Invalidation dynamics of discursive networks: equilibria, simulation, FOO runs and ledger audits",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form equilibria of the isolated and cross-detecting networks as JSON
    FixedPoint(FixedPointArgs),
    /// False-belief share against agent count, as CSV
    PlanAgents(PlanArgs),
    /// Lower bound on the invalid mass a trained model keeps
    Floor(FloorArgs),
    /// Monte Carlo ensemble of the single or dual network
    Simulate(SimulateArgs),
    /// Flaws-of-Others consensus runs
    #[command(subcommand)]
    Foo(FooCommand),
    /// Hash-chain ledger audits
    #[command(subcommand)]
    Ledger(LedgerCommand),
    /// Print the default calibration profile
    Calibration,
    /// Re-run a manifest and compare its outputs byte for byte
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HazardArgs {
    /// Per-step hazard that a true belief slips to false
    #[arg(long, default_value_t = HazardParams::CALIBRATED_P)]
    pub p: f64,
    /// Per-step hazard that a false belief is repaired
    #[arg(long, default_value_t = HazardParams::CALIBRATED_Q)]
    pub q: f64,
    /// Per-step fabrication hazard
    #[arg(long, default_value_t = HazardParams::CALIBRATED_LAMBDA)]
    pub lambda: f64,
    /// Probability that the partner network detects a false statement
    #[arg(long, default_value_t = DetectionParams::CALIBRATED_D)]
    pub d: f64,
}

impl HazardArgs {
    fn hazards(&self) -> Result<HazardParams> {
        Ok(HazardParams::new(self.p, self.q, self.lambda)?)
    }

    fn detection(&self) -> Result<DetectionParams> {
        Ok(DetectionParams::new(self.d)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Single,
    Cross,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FixedPointArgs {
    #[command(flatten)]
    pub hazards: HazardArgs,
    /// Which equilibria to report
    #[arg(long, value_enum, default_value_t = ModelKind::Both)]
    pub model: ModelKind,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlanArgs {
    #[command(flatten)]
    pub hazards: HazardArgs,
    /// Target false-belief share
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Largest agent count in the table (extended to reach the minimum)
    #[arg(long, default_value_t = 30)]
    pub max_n: u32,
    /// Write the CSV here instead of stdout, with a manifest alongside
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FloorArgs {
    /// Corpus mass on invalid sequences, in (0, 1]
    #[arg(long)]
    pub q: f64,
    /// KL divergence between corpus and model, in nats
    #[arg(long)]
    pub kl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    Single,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FabricationArg {
    /// Fabrication mean scales with the number of actors
    PerActor,
    /// Fabrication mean scales with the number of true believers
    PerTrueStatement,
}

impl From<FabricationArg> for Fabrication {
    fn from(f: FabricationArg) -> Self {
        match f {
            FabricationArg::PerActor => Fabrication::PerActor,
            FabricationArg::PerTrueStatement => Fabrication::PerTrueStatement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Network topology
    #[arg(value_enum)]
    pub network: NetworkKind,
    #[command(flatten)]
    pub hazards: HazardArgs,
    /// Independent replicate runs (at least 2)
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Steps per run
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Actors per network
    #[arg(long, default_value_t = 1000)]
    pub actors: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of actors holding a true belief at step 0
    #[arg(long, default_value_t = 1.0)]
    pub initial_true_fraction: f64,
    /// Fabrication scaling for the dual network
    #[arg(long, value_enum, default_value_t = FabricationArg::PerActor)]
    pub fabrication: FabricationArg,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the output here instead of stdout, with a manifest alongside
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FooCommand {
    /// Run the consensus loop over a roster
    Run(FooRunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FooRunArgs {
    /// Run configuration JSON (salt, roster, policy, mock model)
    #[arg(long)]
    pub config: PathBuf,
    /// File holding the task text
    #[arg(long)]
    pub task: PathBuf,
    /// Output directory for judgement, history, ledgers and manifest
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum LedgerCommand {
    /// Verify a ledger file; exits 0 on VERIFIED and 3 on TAMPERED
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("secret").required(true).args(["salt", "salt_env", "config"])))]
pub struct VerifyArgs {
    /// Ledger JSONL file
    #[arg(long)]
    pub file: PathBuf,
    /// Deployment salt
    #[arg(long)]
    pub salt: Option<String>,
    /// Environment variable holding the deployment salt
    #[arg(long)]
    pub salt_env: Option<String>,
    /// Run configuration whose salt sealed the ledger
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Expected block count, from a trusted record of the run
    #[arg(long, requires = "head")]
    pub length: Option<usize>,
    /// Expected chain hash of the last block, in hex
    #[arg(long, requires = "length")]
    pub head: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    #[arg(long)]
    pub manifest: PathBuf,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    argv: Vec<String>,
    /// Off during replay so the original manifest stays authoritative.
    write_manifest: bool,
}

impl Ctx<'_> {
    fn print(&mut self, text: &str) -> Result<()> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))
    }

    /// Writes `text` to `path`, or stdout when no path is given.
    fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<Vec<PathBuf>> {
        match path {
            Some(p) => {
                write_file(p, text)?;
                Ok(vec![p.to_owned()])
            }
            None => self.print(text).map(|()| Vec::new()),
        }
    }

    fn manifest(&self, path: &Path, sub: &str, params: impl Serialize, seed: Option<u64>, outputs: &[PathBuf]) -> Result<()> {
        if !self.write_manifest {
            return Ok(());
        }
        let params = serde_json::to_value(params).expect("arguments serialize");
        RunManifest::new(sub, params, seed, outputs.to_vec(), self.argv.clone()).write(path)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to `err` as single lines.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
                _ => {
                    let line = text.lines().next().unwrap_or("error: invalid arguments");
                    let _ = writeln!(err, "{line}");
                    1
                }
            };
        }
    };
    let mut ctx = Ctx {
        out,
        err,
        argv: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        write_manifest: true,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(_) => 0,
        Err(e) => {
            // Tamper verdicts are already on stdout.
            if !matches!(e, CliError::Tamper(_)) {
                let _ = writeln!(ctx.err, "error: {e}");
            }
            e.exit_code()
        }
    }
}

/// Returns the artifact paths written, in a stable order.
fn dispatch(command: Command, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    match command {
        Command::FixedPoint(a) => fixed_point_cmd(&a, ctx),
        Command::PlanAgents(a) => plan_agents_cmd(&a, ctx),
        Command::Floor(a) => floor_cmd(&a, ctx),
        Command::Simulate(a) => simulate_cmd(&a, ctx),
        Command::Foo(FooCommand::Run(a)) => foo_run_cmd(&a, ctx),
        Command::Ledger(LedgerCommand::Verify(a)) => verify_cmd(&a, ctx),
        Command::Calibration => calibration_cmd(ctx),
        Command::Replay(a) => replay_cmd(&a, ctx),
    }
}

fn fixed_point_cmd(a: &FixedPointArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let h = a.hazards.hazards()?;
    let mut v = json!({ "params": a.hazards });
    if a.model != ModelKind::Cross {
        let fp = fixed_point(&h);
        let sg = spectral_gap(&h);
        v["single"] = json!({
            "pi_r": fp.pi_r,
            "pi_f": fp.pi_f,
            "second_eigenvalue": sg.second_eigenvalue,
            "gap": sg.gap,
        });
    }
    if a.model != ModelKind::Single {
        let det = a.hazards.detection()?;
        v["cross"] = serde_json::to_value(cross_fixed_point(&h, &det)?).expect("serializes");
        v["consistency_lambda"] = json!(consistency_lambda(h.p(), h.q(), det.d()));
    }
    ctx.print(&pretty(&v))?;
    Ok(Vec::new())
}

fn plan_agents_cmd(a: &PlanArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let h = a.hazards.hazards()?;
    let det = a.hazards.detection()?;
    let min = min_agents(&h, &det, a.eps)?;
    let mut csv = String::from("n,pi_f,meets_eps\n");
    for n in 1..=a.max_n.max(min) {
        let share = false_share_with_agents(&h, &det, n)?;
        csv.push_str(&format!("{n},{share},{}\n", share <= a.eps));
    }
    writeln!(ctx.err, "min_agents={min}").map_err(|e| CliError::Io(format!("stderr: {e}")))?;
    let outputs = ctx.emit(a.out.as_deref(), &csv)?;
    if let Some(p) = &a.out {
        ctx.manifest(&RunManifest::path_for(p), "plan-agents", a, None, &outputs)?;
    }
    Ok(outputs)
}

fn floor_cmd(a: &FloorArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let floor = invalidation_floor(&FloorInputs { q_corpus: a.q, kl: a.kl })?;
    ctx.print(&pretty(&json!({ "q_corpus": a.q, "kl": a.kl, "floor": floor })))?;
    Ok(Vec::new())
}

fn simulate_cmd(a: &SimulateArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let h = a.hazards.hazards()?;
    let process = match a.network {
        NetworkKind::Single => Process::Single { params: h },
        NetworkKind::Dual => Process::Dual {
            model: DualModel::new(
                DualNetworkParams::symmetric(h, a.hazards.detection()?),
                a.fabrication.into(),
            ),
        },
    };
    let config = SimConfig {
        actors: a.actors,
        steps: a.steps,
        runs: a.runs,
        seed: a.seed,
        initial_true_fraction: a.initial_true_fraction,
    };
    let summary = run_ensemble(&config, &process)?;
    let text = match a.format {
        Format::Csv => to_csv(&summary),
        Format::Json => to_json(&summary)? + "\n",
    };
    let outputs = ctx.emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.out {
        ctx.manifest(&RunManifest::path_for(p), "simulate", a, Some(a.seed), &outputs)?;
    }
    Ok(outputs)
}

fn salt_of(s: &str) -> Result<Salt> {
    Salt::new(s.as_bytes().to_vec()).map_err(|e| CliError::Domain(e.to_string()))
}

fn foo_run_cmd(a: &FooRunArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let config = RunConfig::from_json(&read_file(&a.config)?)
        .map_err(|e| CliError::Domain(format!("{}: {e}", a.config.display())))?;
    let task = read_file(&a.task)?;
    let all_mock = config.agents.iter().all(|s| s.backend == BackendKind::Mock);
    let genesis = match &config.genesis_timestamp {
        Some(ts) => Timestamp::parse(ts)?,
        None if all_mock => Timestamp::epoch(),
        None => Timestamp::now(),
    };
    let ledger = Ledger::genesis(salt_of(&config.salt)?, genesis);
    let mut orch = Orchestrator::new(build_agents(&config)?, ledger)?;
    if !all_mock {
        orch = orch.with_clock(Box::new(SystemClock));
    }
    let outcome = orch.run(task.trim(), &config.policy)?;

    std::fs::create_dir_all(a.out.join("agents")).map_err(|e| CliError::io(&a.out, e))?;
    let head = outcome.ledger.head().map(Digest::to_hex);
    let summary = json!({
        "status": outcome.status,
        "calls": outcome.calls,
        "rounds": outcome.history.rounds.len(),
        "judgement": outcome.judgement,
        "final_answers": outcome.final_answers,
        "final_false_fraction": outcome.final_false_fraction(),
        "ledger_length": outcome.ledger.len(),
        "ledger_head": head,
    });
    let mut outputs = vec![a.out.join("judgement.json"), a.out.join("history.json"), a.out.join("ledger.jsonl")];
    write_file(&outputs[0], &pretty(&summary))?;
    write_file(&outputs[1], &pretty(&outcome.history))?;
    save(&outcome.ledger, &outputs[2])?;
    for (id, l) in &outcome.agent_ledgers {
        let p = a.out.join("agents").join(format!("{id}.jsonl"));
        save(l, &p)?;
        outputs.push(p);
    }
    // The salt is a deployment secret and never lands in artifacts.
    let mut params = serde_json::to_value(&config).expect("configs serialize");
    params["salt"] = json!("<redacted>");
    let params = json!({ "config": params, "config_path": a.config, "task_path": a.task, "out": a.out });
    ctx.manifest(&a.out.join("manifest.json"), "foo run", params, config.mock.map(|m| m.seed), &outputs)?;

    let status = match &outcome.status {
        RunStatus::Converged { round } => format!("converged at round {round}"),
        RunStatus::MaxRounds => "stopped at max_rounds".into(),
        RunStatus::Aborted { reason } => format!("aborted: {reason}"),
    };
    ctx.print(&format!(
        "status: {status}\ncalls: {}\nledger: {} blocks, {}\n",
        outcome.calls,
        outcome.ledger.len(),
        outcome.ledger.verify()
    ))?;
    if let RunStatus::Aborted { reason } = outcome.status {
        return Err(CliError::Backend(format!("run aborted ({reason}); partial outputs in {}", a.out.display())));
    }
    Ok(outputs)
}

fn verify_cmd(a: &VerifyArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let salt = match (&a.salt, &a.salt_env, &a.config) {
        (Some(s), _, _) => salt_of(s)?,
        (_, Some(var), _) => salt_of(
            &std::env::var(var).map_err(|_| CliError::Usage(format!("environment variable {var} is not set")))?,
        )?,
        (_, _, Some(path)) => salt_of(
            &RunConfig::from_json(&read_file(path)?)
                .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?
                .salt,
        )?,
        _ => return Err(CliError::Usage("one of --salt, --salt-env or --config is required".into())),
    };
    let (ledger, mut verdict) = discursive_ledger::load(&a.file, salt).map_err(|e| match e {
        discursive_ledger::LedgerError::Io(io) => CliError::io(&a.file, io),
        other => CliError::Domain(format!("{}: {other}", a.file.display())),
    })?;
    if let (true, Some(len), Some(head)) = (verdict.is_verified(), a.length, &a.head) {
        let digest: Digest = head.parse().map_err(CliError::Usage)?;
        verdict = ledger.verify_against_head(len, &digest);
    }
    ctx.print(&format!("{verdict}\n"))?;
    if !verdict.is_verified() {
        ctx.print(&format!("{TAMPER_BANNER}\n"))?;
        return Err(CliError::Tamper(verdict.to_string()));
    }
    Ok(Vec::new())
}

fn calibration_cmd(ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let v = json!({
        "p": HazardParams::CALIBRATED_P,
        "q": HazardParams::CALIBRATED_Q,
        "lambda": HazardParams::CALIBRATED_LAMBDA,
        "d": DetectionParams::CALIBRATED_D,
    });
    ctx.print(&pretty(&v))?;
    Ok(Vec::new())
}

fn replayed(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".replay");
    PathBuf::from(s)
}

fn replay_cmd(a: &ReplayArgs, ctx: &mut Ctx) -> Result<Vec<PathBuf>> {
    let m = RunManifest::read(&a.manifest)?;
    let argv = std::iter::once("discursive".to_owned()).chain(m.argv.iter().cloned());
    let mut command = Cli::try_parse_from(argv)
        .map_err(|e| CliError::Usage(format!("manifest argv does not parse: {}", e.kind())))?
        .command;
    match &mut command {
        Command::Simulate(SimulateArgs { out: Some(o), .. }) | Command::PlanAgents(PlanArgs { out: Some(o), .. }) => {
            *o = replayed(o);
        }
        Command::Foo(FooCommand::Run(r)) => {
            let config = RunConfig::from_json(&read_file(&r.config)?)?;
            if config.agents.iter().any(|s| s.backend != BackendKind::Mock) {
                return Err(CliError::Usage("runs with remote agents are not replayable".into()));
            }
            r.out = replayed(&r.out);
        }
        _ => return Err(CliError::Usage(format!("{} writes no replayable artifacts", m.subcommand))),
    }
    ctx.write_manifest = false;
    let fresh = dispatch(command, ctx)?;
    let mut same = fresh.len() == m.outputs.len();
    for (i, orig) in m.outputs.iter().enumerate() {
        let ok = match (std::fs::read(orig), fresh.get(i).map(std::fs::read)) {
            (Ok(x), Some(Ok(y))) => x == y,
            _ => false,
        };
        same &= ok;
        ctx.print(&format!("{} {}\n", if ok { "reproduced" } else { "differs" }, orig.display()))?;
    }
    if same {
        ctx.print(&format!("REPRODUCED: {} outputs byte-identical\n", m.outputs.len()))?;
        Ok(fresh)
    } else {
        ctx.print("DIFFERS: replay did not reproduce the recorded outputs\n")?;
        Err(CliError::Tamper("replay mismatch".into()))
    }
}
