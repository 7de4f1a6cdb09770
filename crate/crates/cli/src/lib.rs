//! Command-line driver for `dimdrop-core`: seeded fixtures, certificate
//! pipelines and deterministic JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod fixtures;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::commands::{CommandError, FixtureFiles};
use crate::config::{BaseArg, ConfigError, RunConfig};
use crate::report::{is_config_error, Envelope, Exit, Format, TOOL_VERSION};

#[derive(Debug, Parser)]
#[command(name = "dimdrop", version, about = "Certified unitary homotopies into dimension drop algebras")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub boundary_tol: Option<f64>,
    /// Samples of the interval parameter (even).
    #[arg(long, global = true)]
    pub grid_t: Option<usize>,
    /// Samples of the circle.
    #[arg(long, global = true)]
    pub grid_g: Option<usize>,
    /// Slices per homotopy stage.
    #[arg(long, global = true)]
    pub grid_s: Option<usize>,
    #[arg(long, global = true)]
    pub step_budget: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report file; defaults to $DIMDROP_OUT_DIR/<command>.<format>, then stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// Read the demo inputs from this file instead of generating them.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Write the demo inputs to this file.
    #[arg(long)]
    pub dump_fixture: Option<PathBuf>,
}

impl FixtureArgs {
    fn files(&self) -> FixtureFiles {
        FixtureFiles { input: self.fixture.clone(), output: self.dump_fixture.clone() }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Endpoint and winding checks of the standard elementary map.
    VerifyElementary {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "scalars")]
        base: BaseArg,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Boundary, winding and dual-evaluation checks of a basic map, plus the
    /// homotopy to the unital embedding when k = 1.
    VerifyBasic {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "circle:1")]
        base: BaseArg,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        winding: i64,
        /// Skip the (slow) homotopy certificate.
        #[arg(long)]
        skip_homotopy: bool,
    },
    /// Certificates for both triangles of the amplification diagram.
    CertifyDiagram {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "scalars")]
        base: BaseArg,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        winding: i64,
    },
    /// Unitary equivalence of amplified projections, with the negative control.
    DemoLemma34 {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        winding: i64,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value = "circle:1")]
        base: BaseArg,
        #[command(flatten)]
        fixtures: FixtureArgs,
    },
    /// Intertwiner between amplified subprojections.
    DemoTheorem39 {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        p_rank: usize,
        #[arg(long, default_value_t = 3)]
        q_rank: usize,
        #[arg(long, default_value = "matrices:1")]
        base: BaseArg,
        #[command(flatten)]
        fixtures: FixtureArgs,
    },
    /// Completion of a partial isometry to a unitary in the identity component.
    DemoCorollary36 {
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        winding: i64,
        #[arg(long, default_value = "circle:1")]
        base: BaseArg,
        #[command(flatten)]
        fixtures: FixtureArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyElementary { .. } => "verify-elementary",
            Command::VerifyBasic { .. } => "verify-basic",
            Command::CertifyDiagram { .. } => "certify-diagram",
            Command::DemoLemma34 { .. } => "demo-lemma34",
            Command::DemoTheorem39 { .. } => "demo-theorem39",
            Command::DemoCorollary36 { .. } => "demo-corollary36",
        }
    }

    /// Arguments recorded in the report (fixture paths excluded).
    fn parameters(&self) -> Value {
        match self {
            Command::VerifyElementary { n, base, samples } => {
                json!({"n": n, "base": base.to_string(), "samples": samples})
            }
            Command::VerifyBasic { k, m, n, base, winding, skip_homotopy } => json!({
                "k": k, "m": m, "n": n, "base": base.to_string(), "winding": winding, "skip_homotopy": skip_homotopy,
            }),
            Command::CertifyDiagram { k, m, n, base, winding } => {
                json!({"k": k, "m": m, "n": n, "base": base.to_string(), "winding": winding})
            }
            Command::DemoLemma34 { m, n, rank, winding, d, base, fixtures } => json!({
                "m": m, "n": n, "rank": rank, "winding": winding, "d": d, "base": base.to_string(),
                "fixture_input": fixtures.fixture.is_some(),
            }),
            Command::DemoTheorem39 { m, n, d, p_rank, q_rank, base, fixtures } => json!({
                "m": m, "n": n, "d": d, "p_rank": p_rank, "q_rank": q_rank, "base": base.to_string(),
                "fixture_input": fixtures.fixture.is_some(),
            }),
            Command::DemoCorollary36 { d, rank, winding, base, fixtures } => json!({
                "d": d, "rank": rank, "winding": winding, "base": base.to_string(),
                "fixture_input": fixtures.fixture.is_some(),
            }),
        }
    }

    fn execute(&self, cfg: &RunConfig) -> commands::Outcome {
        match self {
            Command::VerifyElementary { n, base, samples } => commands::verify_elementary(cfg, *n, *base, *samples),
            Command::VerifyBasic { k, m, n, base, winding, skip_homotopy } => {
                commands::verify_basic(cfg, *k, *m, *n, *base, *winding, !skip_homotopy)
            }
            Command::CertifyDiagram { k, m, n, base, winding } => {
                commands::certify_diagram(cfg, *k, *m, *n, *base, *winding)
            }
            Command::DemoLemma34 { m, n, rank, winding, d, base, fixtures } => {
                commands::demo_lemma34(cfg, *m, *n, *rank, *winding, *d, *base, &fixtures.files())
            }
            Command::DemoTheorem39 { m, n, d, p_rank, q_rank, base, fixtures } => {
                commands::demo_theorem39(cfg, *m, *n, *d, *p_rank, *q_rank, *base, &fixtures.files())
            }
            Command::DemoCorollary36 { d, rank, winding, base, fixtures } => {
                commands::demo_corollary36(cfg, *d, *rank, *winding, *base, &fixtures.files())
            }
        }
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(common: &CommonArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    macro_rules! overlay {
        ($($field:ident),*) => { $( if let Some(v) = common.$field.clone() { cfg.$field = v; } )* };
    }
    overlay!(tol, boundary_tol, grid_t, grid_g, grid_s, step_budget, seed);
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one command and returns its report; `Err` carries a configuration
/// problem that prevented the run.
pub fn execute(cli: &Cli) -> Result<Envelope, ConfigError> {
    let cfg = resolve_config(&cli.common)?;
    let mut envelope = Envelope {
        tool_version: TOOL_VERSION,
        command: cli.command.name().to_string(),
        config: cfg.clone(),
        parameters: cli.command.parameters(),
        pass: false,
        error: None,
        report: Value::Null,
    };
    match cli.command.execute(&cfg) {
        Ok((report, pass)) => {
            envelope.report = report;
            envelope.pass = pass;
        }
        Err(CommandError::Library(e)) if is_config_error(&e) => return Err(ConfigError::Invalid(e.to_string())),
        Err(CommandError::Fixture(e)) => return Err(ConfigError::Invalid(e.to_string())),
        Err(CommandError::Library(e)) => envelope.error = Some(e.to_string()),
    }
    Ok(envelope)
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::ConfigError.code() } else { Exit::Pass.code() };
        }
    };
    let envelope = match execute(&cli) {
        Ok(env) => env,
        Err(e) => {
            eprintln!("dimdrop: configuration error: {e}");
            return Exit::ConfigError.code();
        }
    };
    let path = envelope.config.output_path(cli.command.name(), cli.common.format.extension());
    if let Err(e) = envelope.emit(cli.common.format, path.as_deref()) {
        eprintln!("dimdrop: cannot write report: {e}");
        return Exit::ConfigError.code();
    }
    eprintln!("dimdrop {}: {}", envelope.command, if envelope.pass { "pass" } else { "FAIL" });
    envelope.exit().code()
}
