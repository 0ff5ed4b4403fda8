//! The `ibnls` command line: config merging, subcommand dispatch and the
//! output directory layout (`manifest.txt`, CSVs, `summary.txt`,
//! `fields/`).

mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

pub use config::{parse_config, ExperimentConfig, Source, SCHEMA};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ibnls", version, about = "Exponent calculus and spectral experiments for the inhomogeneous biharmonic NLS")]
pub struct Cli {
    /// Experiment file (`key = value` lines, `[section]` headers).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed of every randomized probe (overrides `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Any config key, e.g. `--set grid.m=1024`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub dim: Option<u32>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Criticality class and theorem hypotheses.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        theorem: Option<String>,
    },
    /// Exponent families of a lemma, with their identities.
    Pairs {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        lemma: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        eps: Option<String>,
    },
    /// Strang (or Picard) evolution with diagnostics and snapshots.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Picard iteration of the Duhamel map against a Strang reference.
    Picard {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// One mixed space-time norm of a run or of stored snapshots.
    Norm {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Strichartz-family norm of a run or of stored snapshots.
    Strichartz {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Static and dynamic scaling identities.
    ScalingTest {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Mass conservation and energy drift order between dt and dt/2.
    ConserveTest {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Pointwise, gradient, Hardy-Littlewood or Gagliardo-Nirenberg probe.
    EstimateProbe {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Empirical linear Strichartz constants on random data.
    StrichartzProbe {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Stability ladder under perturbed data and forcing.
    Perturb {
        #[command(flatten)]
        params: ParamArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Pairs { .. } => "pairs",
            Command::Simulate { .. } => "simulate",
            Command::Picard { .. } => "picard",
            Command::Norm { .. } => "norm",
            Command::Strichartz { .. } => "strichartz",
            Command::ScalingTest { .. } => "scaling-test",
            Command::ConserveTest { .. } => "conserve-test",
            Command::EstimateProbe { .. } => "estimate-probe",
            Command::StrichartzProbe { .. } => "strichartz-probe",
            Command::Perturb { .. } => "perturb",
        }
    }

    fn params(&self) -> &ParamArgs {
        match self {
            Command::Classify { params, .. }
            | Command::Pairs { params, .. }
            | Command::Simulate { params }
            | Command::Picard { params }
            | Command::Norm { params }
            | Command::Strichartz { params }
            | Command::ScalingTest { params }
            | Command::ConserveTest { params }
            | Command::EstimateProbe { params }
            | Command::StrichartzProbe { params }
            | Command::Perturb { params } => params,
        }
    }

    /// Flag values as config keys.
    fn flag_entries(&self) -> Vec<(&'static str, String)> {
        let p = self.params();
        let mut out = Vec::new();
        if let Some(d) = p.dim {
            out.push(("params.dim", d.to_string()));
        }
        for (k, v) in [("params.b", &p.b), ("params.alpha", &p.alpha), ("params.lambda", &p.lambda)] {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        }
        match self {
            Command::Classify { theorem: Some(t), .. } => out.push(("classify.theorem", t.clone())),
            Command::Pairs { lemma, theta, eps, .. } => {
                for (k, v) in [("lemma.id", lemma), ("lemma.theta", theta), ("lemma.eps", eps)] {
                    if let Some(v) = v {
                        out.push((k, v.clone()));
                    }
                }
            }
            _ => {}
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }

    pub fn from_pass(ok: bool) -> Self {
        if ok { Status::Pass } else { Status::Fail }
    }
}

/// Verdict of one subcommand run; `extra` lines go to the summary after
/// the verdict line.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub message: String,
    pub extra: Vec<String>,
}

impl Outcome {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self { status, message: message.into(), extra: Vec::new() }
    }
}

/// Output directory writer. Floats are printed with 17 significant digits
/// and exact rationals as `P/Q`.
pub struct Output {
    dir: PathBuf,
}

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn fields_dir(&self) -> Result<PathBuf> {
        let d = self.dir.join("fields");
        fs::create_dir_all(&d)?;
        Ok(d)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }
}

fn manifest(command: &str, cfg: &ExperimentConfig) -> String {
    let mut s = format!("ibnls {}\ncommand = {command}\n", env!("CARGO_PKG_VERSION"));
    for (k, v, src) in cfg.resolved() {
        let origin = match src {
            Source::File(l) => format!("line {l}"),
            Source::Flag => "flag".to_string(),
            Source::Default => "default".to_string(),
        };
        s.push_str(&format!("{k} = {v}  # {origin}\n"));
    }
    s
}

fn schema_help() -> String {
    let mut s = String::from("Config keys (section.key = default):\n");
    for (key, _, default, help) in SCHEMA {
        let d = if default.is_empty() { "(none)" } else { default };
        s.push_str(&format!("  {key} = {d}\n      {help}\n"));
    }
    s.push_str("\nExit status: 0 on PASS/INFO, 1 on FAIL, 2 on usage or config errors.\n");
    s
}

/// Merges the config file, `--set` values and subcommand flags, with later
/// sources winning.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => ExperimentConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Usage(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set_flag(k.trim(), v.trim())?;
    }
    for (k, v) in cli.command.flag_entries() {
        cfg.set_flag(k, &v)?;
    }
    if let Some(seed) = cli.seed {
        cfg.set_flag("seed", &seed.to_string())?;
    }
    if let Some(out) = &cli.out {
        cfg.set_flag("out", &out.to_string_lossy())?;
    }
    Ok(cfg)
}

/// Runs one subcommand and writes its outputs; returns the verdict.
pub fn run(command: &Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = Output::create(&cfg.out_dir()?)?;
    let result = commands::dispatch(command, cfg, &out);
    out.write_text("manifest.txt", &manifest(command.name(), cfg))?;
    let outcome = result?;
    let mut summary = format!("{} {}: {}\n", outcome.status.label(), command.name(), outcome.message);
    for e in &outcome.extra {
        summary.push_str(&format!("INFO {}: {e}\n", command.name()));
    }
    out.write_text("summary.txt", &summary)?;
    Ok(outcome)
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass | Status::Info => 0,
        Status::Fail => 1,
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = Cli::command().after_long_help(schema_help());
    let matches = match cmd.try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let outcome = resolve_config(&cli).and_then(|cfg| run(&cli.command, &cfg));
    match outcome {
        Ok(o) => {
            println!("{} {}: {}", o.status.label(), cli.command.name(), o.message);
            for e in &o.extra {
                println!("INFO {}: {e}", cli.command.name());
            }
            exit_code(o.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
