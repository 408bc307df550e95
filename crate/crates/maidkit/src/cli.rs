//! The `maidkit` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use maidkit_core::correlation::{add_mediator, solve_ce, solve_maid_ce, MediatorMode, Objective};
use maidkit_core::equilibria::{
    best_response, find_mixed_ne_two_agent, find_pure_ne_sufficient_info, is_best_response, is_nash, mixed_nash_gaps,
    non_emptiness, NeMode, NonEmptiness, SolverConfig,
};
use maidkit_core::graphs::{
    build_mechanised_graph, classify_recall, compute_subdiagrams, relevance_order, treewidth_upper_bound, RelevanceOrder,
};
use maidkit_core::inference::expected_utilities;
use maidkit_core::policies::{mixed_expected_utility, BehaviouralProfile};
use maidkit_core::rational::{format_rational, parse_rational};
use maidkit_core::text::{parse_unvalidated, serialize_behavioural, serialize_kappa, serialize_maid, ParsedPolicy};
use maidkit_core::{AgentId, Error, Maid, Rational, DEFAULT_CAP};
use num_traits::Zero;
use serde_json::Value;
use thiserror::Error;

use crate::dot::{render_game, render_mechanised, render_mediated};
use crate::io::{self, IoError};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "maidkit", version, about = "Analyse multi-agent influence diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, clap::Args)]
pub struct Flags {
    /// Game file (`.maid`, or a `.nf` normal form imported on load)
    #[arg(long, global = true)]
    pub game: Option<PathBuf>,
    /// Policy file, or a κ file for `solve` checks
    #[arg(long, global = true)]
    pub policy: Option<PathBuf>,
    #[arg(long, global = true)]
    pub agent: Option<String>,
    /// feasible, welfare or agent:<name>
    #[arg(long, global = true, default_value = "feasible")]
    pub objective: String,
    /// Slack for inexact verdicts, as n/d
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[arg(long, global = true)]
    pub grid_depth: Option<u32>,
    /// Bound on every enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel candidate evaluation
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the game's structural invariants
    Validate,
    /// Recall and information classes, treewidth and relevance order
    Classify,
    /// Mechanism nodes and edges
    MechGraph,
    /// Expected utility of each agent under --policy
    Eu,
    /// Best response of --agent to the rules in --policy
    BestResponse {
        /// Exit 1 unless some policy earns strictly more than this value
        #[arg(long)]
        above: Option<String>,
    },
    /// Whether --policy is a Nash equilibrium
    IsNash,
    Solve {
        #[arg(value_enum)]
        problem: Problem,
    },
    NonEmptiness {
        #[arg(value_enum)]
        mode: Mode,
    },
    /// Print a `.nf` normal form as a game file
    ImportNf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Ce,
    MaidCe,
    PureNe,
    MixedNe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pure,
    Behavioural,
    Mixed,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0} (raise the limit with --cap)")]
    Cap(Error),
    #[error(transparent)]
    Solver(Error),
    #[error("invalid game:\n{0}")]
    Invalid(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => CliError::Cap(e),
            other => CliError::Solver(other),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a verb produced: the report (or DOT text) and the exit code.
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

impl Outcome {
    fn report(r: Report, fmt: Format, code: i32) -> Outcome {
        let output = if fmt == Format::Json { r.json() } else { r.text() };
        Outcome { output, code }
    }

    fn dot(output: String) -> Outcome {
        Outcome { output, code: EXIT_OK }
    }
}

/// Parses `argv` (program name first), runs the verb and writes its output.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.flags.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {k} threads: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(o) => {
            let _ = out.write_all(o.output.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let f = &cli.flags;
    let dot_only = |verb: &str| CliError::Usage(format!("--format dot is not available for {verb}"));
    match &cli.command {
        Command::Validate => validate(f),
        Command::ImportNf => import_nf(f),
        command => {
            let m = load_valid(f)?;
            let cfg = config(f)?;
            match command {
                Command::Classify => classify(&m, f),
                Command::MechGraph => mech_graph(&m, f),
                Command::Eu if f.format != Format::Dot => eu(&m, f, &cfg),
                Command::BestResponse { above } if f.format != Format::Dot => best_response_cmd(&m, f, &cfg, above.as_deref()),
                Command::IsNash if f.format != Format::Dot => is_nash_cmd(&m, f, &cfg),
                Command::Solve { problem } => solve(&m, f, &cfg, *problem),
                Command::NonEmptiness { mode } if f.format != Format::Dot => non_emptiness_cmd(&m, f, &cfg, *mode),
                Command::Eu => Err(dot_only("eu")),
                Command::BestResponse { .. } => Err(dot_only("best-response")),
                Command::IsNash => Err(dot_only("is-nash")),
                Command::NonEmptiness { .. } => Err(dot_only("non-emptiness")),
                Command::Validate | Command::ImportNf => unreachable!(),
            }
        }
    }
}

fn game_path(f: &Flags) -> CliResult<&Path> {
    f.game.as_deref().ok_or_else(|| CliError::Usage("--game is required".into()))
}

fn load_unvalidated(f: &Flags) -> CliResult<Maid> {
    let path = game_path(f)?;
    if io::is_normal_form(path) {
        return Ok(io::load_game(path)?);
    }
    let text = io::read(path)?;
    parse_unvalidated(&text).map_err(|source| CliError::Io(IoError::Parse { path: path.to_owned(), source }))
}

fn load_valid(f: &Flags) -> CliResult<Maid> {
    let m = load_unvalidated(f)?;
    let report = m.validate();
    if !report.is_ok() {
        return Err(CliError::Invalid(report.to_string()));
    }
    Ok(m)
}

fn config(f: &Flags) -> CliResult<SolverConfig> {
    let mut cfg = SolverConfig { cap: f.cap, ..SolverConfig::default() };
    if let Some(e) = &f.epsilon {
        cfg.epsilon = rational_flag("--epsilon", e)?;
    }
    if let Some(k) = f.grid_depth {
        cfg.grid_depth = k;
    }
    Ok(cfg)
}

fn rational_flag(flag: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).ok_or_else(|| CliError::Usage(format!("{flag} expects a rational such as 1/3, found {s:?}")))
}

fn agent_flag(m: &Maid, f: &Flags) -> CliResult<Option<AgentId>> {
    match &f.agent {
        None => Ok(None),
        Some(name) => m.agent_by_name(name).map(Some).ok_or_else(|| CliError::Usage(format!("unknown agent {name}"))),
    }
}

fn objective(m: &Maid, s: &str) -> CliResult<Objective> {
    match s {
        "feasible" => Ok(Objective::Feasible),
        "welfare" => Ok(Objective::Welfare),
        _ => match s.strip_prefix("agent:") {
            Some(name) => m.agent_by_name(name).map(Objective::Agent).ok_or_else(|| CliError::Usage(format!("unknown agent {name}"))),
            None => Err(CliError::Usage(format!("--objective expects feasible, welfare or agent:<name>, found {s:?}"))),
        },
    }
}

fn policy(m: &Maid, f: &Flags) -> CliResult<ParsedPolicy> {
    let path = f.policy.as_deref().ok_or_else(|| CliError::Usage("--policy is required".into()))?;
    Ok(io::load_policy(m, path)?)
}

fn q(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn per_agent(r: &mut Report, m: &Maid, prefix: &str, xs: &[Rational]) {
    for a in m.agent_ids() {
        r.push(format!("{prefix}.{}", m.agent_name(a)), q(&xs[a.0]));
    }
}

fn rules(m: &Maid, p: &BehaviouralProfile) -> Vec<String> {
    serialize_behavioural(m, p).lines().map(str::to_owned).collect()
}

fn validate(f: &Flags) -> CliResult<Outcome> {
    let m = load_unvalidated(f)?;
    let report = m.validate();
    if f.format == Format::Dot && report.is_ok() {
        return Ok(Outcome::dot(render_game(&m)));
    }
    let mut r = Report::new();
    r.push("valid", report.is_ok());
    if report.is_ok() {
        r.push("variables", m.len()).push("agents", m.agents().len()).push("decision_rules", m.units().len());
        Ok(Outcome::report(r, f.format, EXIT_OK))
    } else {
        r.list("violations", report.violations.iter().map(|v| v.to_string()));
        Ok(Outcome::report(r, f.format, EXIT_ERROR))
    }
}

fn import_nf(f: &Flags) -> CliResult<Outcome> {
    let path = game_path(f)?;
    let nf = io::load_normal_form(path)?;
    let m = maidkit_core::model::import_normal_form(&nf).map_err(|source| IoError::Import { path: path.to_owned(), source })?;
    match f.format {
        Format::Text => Ok(Outcome { output: serialize_maid(&m), code: EXIT_OK }),
        Format::Dot => Ok(Outcome::dot(render_game(&m))),
        Format::Json => {
            let mut r = Report::new();
            r.push("maid", serialize_maid(&m));
            Ok(Outcome::report(r, f.format, EXIT_OK))
        }
    }
}

fn classify(m: &Maid, f: &Flags) -> CliResult<Outcome> {
    if f.format == Format::Dot {
        return Ok(Outcome::dot(render_game(m)));
    }
    let recall = classify_recall(m);
    let mut r = Report::new();
    for a in &recall.agents {
        let name = m.agent_name(a.agent);
        r.push(format!("{name}.perfect_recall"), a.perfect_recall)
            .push(format!("{name}.imperfect_recall"), a.imperfect_recall)
            .push(format!("{name}.forgetful"), a.forgetful)
            .push(format!("{name}.absent_minded"), a.absent_minded)
            .push(format!("{name}.sufficient_recall"), a.sufficient_recall);
    }
    r.push("perfect_information", recall.perfect_information).push("sufficient_information", recall.sufficient_information);
    let (width, order) = treewidth_upper_bound(m);
    r.push("treewidth_bound", width).list("elimination_order", order.iter().map(|&v| m.name(v)));
    match relevance_order(m) {
        RelevanceOrder::Order(us) => r.list("relevance_order", us.iter().map(|&u| m.unit(u).name.clone())),
        RelevanceOrder::Cycle(us) => r.list("relevance_cycle", us.iter().map(|&u| m.unit(u).name.clone())),
    };
    r.push("subdiagrams", compute_subdiagrams(m).len());
    Ok(Outcome::report(r, f.format, EXIT_OK))
}

fn mech_graph(m: &Maid, f: &Flags) -> CliResult<Outcome> {
    let g = build_mechanised_graph(m);
    if f.format == Format::Dot {
        return Ok(Outcome::dot(render_mechanised(m, &g)));
    }
    let mut r = Report::new();
    r.list("mechanisms", (0..g.mechanisms.len()).map(|k| g.node_name(m, k)))
        .list("edges", g.named_mech_edges(m).into_iter().map(|(a, b)| format!("{a} -> {b}")));
    Ok(Outcome::report(r, f.format, EXIT_OK))
}

fn eu(m: &Maid, f: &Flags, cfg: &SolverConfig) -> CliResult<Outcome> {
    let only = agent_flag(m, f)?;
    let values: Vec<Rational> = match policy(m, f)? {
        ParsedPolicy::Behavioural(p) => expected_utilities(m, &p)?,
        ParsedPolicy::Mixture(p) => m.agent_ids().map(|a| mixed_expected_utility(m, &p, a, cfg.cap)).collect::<Result<_, _>>()?,
    };
    let mut r = Report::new();
    for a in m.agent_ids().filter(|a| only.is_none_or(|o| o == *a)) {
        r.push(format!("eu.{}", m.agent_name(a)), q(&values[a.0]));
    }
    Ok(Outcome::report(r, f.format, EXIT_OK))
}

fn behavioural_policy(m: &Maid, f: &Flags, verb: &str) -> CliResult<BehaviouralProfile> {
    if f.policy.is_none() {
        return Ok(BehaviouralProfile::empty(m));
    }
    match policy(m, f)? {
        ParsedPolicy::Behavioural(p) => Ok(p),
        ParsedPolicy::Mixture(_) => Err(CliError::Usage(format!("{verb} needs a policy without weight blocks"))),
    }
}

fn best_response_cmd(m: &Maid, f: &Flags, cfg: &SolverConfig, above: Option<&str>) -> CliResult<Outcome> {
    let a = agent_flag(m, f)?.ok_or_else(|| CliError::Usage("best-response needs --agent".into()))?;
    let opponents = behavioural_policy(m, f, "best-response")?.without(m, a);
    let mut r = Report::new();
    if let Some(s) = above {
        let threshold = rational_flag("--above", s)?;
        let v = is_best_response(m, a, &opponents, &threshold, cfg)?;
        r.push("improves", v.answer).push("exact", v.exact);
        return Ok(Outcome::report(r, f.format, if v.answer { EXIT_OK } else { EXIT_NO }));
    }
    let br = best_response(m, a, &opponents, cfg)?;
    r.push("value", q(&br.value)).push("exact", br.exact);
    if let Some(step) = &br.resolution {
        r.push("resolution", q(step));
    }
    r.list("rules", rules(m, &br.rules(m)));
    Ok(Outcome::report(r, f.format, EXIT_OK))
}

fn is_nash_cmd(m: &Maid, f: &Flags, cfg: &SolverConfig) -> CliResult<Outcome> {
    let mut r = Report::new();
    let ok = match policy(m, f)? {
        ParsedPolicy::Behavioural(p) => {
            let cert = is_nash(m, &p, &cfg.epsilon, cfg)?;
            r.push("is_nash", cert.is_nash).push("exact", cert.exact);
            per_agent(&mut r, m, "eu", &cert.values);
            per_agent(&mut r, m, "gap", &cert.gaps);
            cert.is_nash
        }
        ParsedPolicy::Mixture(p) => {
            let gaps = mixed_nash_gaps(m, &p, cfg)?;
            let ok = gaps.iter().all(|g| *g <= Rational::zero());
            r.push("is_nash", ok).push("exact", true);
            let values: Vec<Rational> = m.agent_ids().map(|a| mixed_expected_utility(m, &p, a, cfg.cap)).collect::<Result<_, _>>()?;
            per_agent(&mut r, m, "eu", &values);
            per_agent(&mut r, m, "gap", &gaps);
            ok
        }
    };
    Ok(Outcome::report(r, f.format, if ok { EXIT_OK } else { EXIT_NO }))
}

fn solve(m: &Maid, f: &Flags, cfg: &SolverConfig, problem: Problem) -> CliResult<Outcome> {
    let mut r = Report::new();
    match problem {
        Problem::Ce | Problem::MaidCe => {
            let mode = if problem == Problem::Ce { MediatorMode::Public } else { MediatorMode::Private };
            if f.format == Format::Dot {
                return Ok(Outcome::dot(render_mediated(&add_mediator(m, mode, cfg.cap)?)));
            }
            let obj = objective(m, &f.objective)?;
            let sol = if problem == Problem::Ce { solve_ce(m, obj, cfg)? } else { solve_maid_ce(m, obj, cfg)? };
            r.push("value", q(&sol.value));
            per_agent(&mut r, m, "eu", &sol.values);
            r.list("kappa", serialize_kappa(m, &sol.kappa).lines().map(str::to_owned));
        }
        Problem::PureNe if f.format != Format::Dot => {
            let p = find_pure_ne_sufficient_info(m, cfg)?;
            let b = p.to_behavioural(m);
            r.push("profile", p.label(m));
            per_agent(&mut r, m, "eu", &expected_utilities(m, &b)?);
            r.list("rules", rules(m, &b));
        }
        Problem::MixedNe if f.format != Format::Dot => {
            let ne = find_mixed_ne_two_agent(m, cfg)?;
            per_agent(&mut r, m, "eu", &ne.values);
            for pol in &ne.policies {
                let support = pol.support.iter().filter(|(_, w)| !w.is_zero()).map(|(p, w)| format!("{} @ {}", p.label(m), format_rational(w)));
                r.list(format!("mixed.{}", m.agent_name(pol.agent)), support);
            }
        }
        _ => return Err(CliError::Usage("--format dot is only available for solve ce and solve maid-ce".into())),
    }
    Ok(Outcome::report(r, f.format, EXIT_OK))
}

fn non_emptiness_cmd(m: &Maid, f: &Flags, cfg: &SolverConfig, mode: Mode) -> CliResult<Outcome> {
    let mode = match mode {
        Mode::Pure => NeMode::Pure,
        Mode::Behavioural => NeMode::Behavioural,
        Mode::Mixed => NeMode::Mixed,
    };
    let mut r = Report::new();
    let code = match non_emptiness(m, mode, cfg)? {
        NonEmptiness::GuaranteedYes(reason) => {
            r.push("answer", "yes").push("guaranteed", true).push("reason", reason);
            EXIT_OK
        }
        NonEmptiness::Yes { witness, exact } => {
            r.push("answer", "yes").push("exact", exact).list("witness", rules(m, &witness));
            EXIT_OK
        }
        NonEmptiness::No => {
            r.push("answer", "no");
            EXIT_NO
        }
        NonEmptiness::Unknown(reason) => {
            r.push("answer", "unknown").push("reason", reason);
            EXIT_OK
        }
    };
    Ok(Outcome::report(r, f.format, code))
}
