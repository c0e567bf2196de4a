use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use contraction_core::falsifier::Target;
use contraction_core::parse_rational;
use contraction_lab::commands::{
    self, precision_from, FalsifyArgs, Globals, SpecInput, PRECISION_ENV,
};
use contraction_lab::corpus_run::{corpus_run, render_corpus, CorpusSettings};
use contraction_lab::{Rendered, Status};

/// Certify orbit-diameter contraction conditions on finite metric spaces and test their
/// fixed-point conclusions.
#[derive(Parser)]
#[command(name = "contraction-lab", version)]
struct Cli {
    /// Upper end of generated naturals windows.
    #[arg(long, global = true, value_name = "N")]
    window_max: Option<u64>,
    /// Step budget for orbits and iteration.
    #[arg(long, global = true, value_name = "N")]
    max_steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Same as `--format pretty`.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for the instance generator.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Args, Default)]
struct SpecFlags {
    /// type1, type2, type3, hardy-rogers, hegedus-szilagyi or tmmax.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    mu: Option<String>,
}

impl From<SpecFlags> for SpecInput {
    fn from(f: SpecFlags) -> Self {
        SpecInput {
            variant: f.variant,
            alpha: f.alpha,
            beta: f.beta,
            gamma: f.gamma,
            delta: f.delta,
            mu: f.mu,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms.
    CheckMetric { instance: PathBuf },
    /// Check that φ belongs to the comparison class.
    PhiCheck {
        /// ε values for the second property (repeatable).
        #[arg(long = "eps")]
        eps: Vec<String>,
        instance: PathBuf,
    },
    /// Print the orbit of a point.
    Orbit {
        #[arg(long)]
        point: String,
        instance: PathBuf,
    },
    /// Check a contraction inequality over every pair.
    Certify {
        #[command(flatten)]
        spec: SpecFlags,
        /// Also check type (I) over pairs of fixed points.
        #[arg(long)]
        include_fixed_points: bool,
        /// Certify even when φ fails the class checks.
        #[arg(long)]
        skip_phi_check: bool,
        /// List at most this many violations.
        #[arg(long, value_name = "N")]
        max_violations: Option<usize>,
        instance: PathBuf,
    },
    /// Run Picard iteration from a point.
    Iterate {
        #[arg(long)]
        from: String,
        instance: PathBuf,
    },
    /// List the fixed points.
    Fixpoints { instance: PathBuf },
    /// Certify, then test the fixed-point conclusion.
    Validate {
        #[command(flatten)]
        spec: SpecFlags,
        #[arg(long)]
        include_fixed_points: bool,
        #[arg(long, value_name = "N")]
        max_violations: Option<usize>,
        instance: PathBuf,
    },
    /// Look for a pair where condition A holds and condition B fails.
    Compare {
        /// Condition A as `variant[:name=value,...]`, e.g. `type2:delta=5/6`.
        #[arg(long)]
        a: String,
        /// Condition B, same syntax.
        #[arg(long)]
        b: String,
        instance: PathBuf,
    },
    /// Search random instances for theorem counterexamples or class separations.
    Falsify {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// `theorem:<variant>` or `separation:<variant>,<variant>`.
        #[arg(long)]
        target: Target,
        /// Directory for replayable finding files.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Corpus entry placed at the start of the stream (repeatable).
        #[arg(long)]
        inject: Vec<String>,
        #[arg(long)]
        min_points: Option<usize>,
        #[arg(long)]
        max_points: Option<usize>,
    },
    /// The built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Check every corpus entry against its expected outcome.
    Run {
        /// Run a single entry.
        #[arg(long)]
        name: Option<String>,
    },
}

fn run(cli: Cli, globals: &Globals) -> Result<Rendered> {
    let options = globals.certify_options();
    match cli.command {
        Command::CheckMetric { instance } => Ok(commands::check_metric(&globals.load(&instance)?)),
        Command::PhiCheck { eps, instance } => {
            let eps = eps
                .iter()
                .map(|e| parse_rational(e).map_err(|err| anyhow::anyhow!("--eps {e}: {err}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(commands::phi_check(&globals.load(&instance)?, &eps))
        }
        Command::Orbit { point, instance } => {
            commands::orbit(&globals.load(&instance)?, &point, globals.max_steps)
        }
        Command::Certify {
            spec,
            include_fixed_points,
            skip_phi_check,
            max_violations,
            instance,
        } => {
            let inst = globals.load(&instance)?;
            let spec = commands::resolve_spec(&inst, &spec.into())?;
            let options = contraction_core::CertifyOptions {
                include_fixed_points,
                skip_phi_check,
                ..options
            };
            commands::certify(&inst, &spec, options, max_violations)
        }
        Command::Iterate { from, instance } => {
            commands::iterate_from(&globals.load(&instance)?, &from, globals.max_steps)
        }
        Command::Fixpoints { instance } => Ok(commands::fixpoints(&globals.load(&instance)?)),
        Command::Validate {
            spec,
            include_fixed_points,
            max_violations,
            instance,
        } => {
            let inst = globals.load(&instance)?;
            let spec = commands::resolve_spec(&inst, &spec.into())?;
            let options = contraction_core::CertifyOptions {
                include_fixed_points,
                ..options
            };
            commands::validate(&inst, &spec, options, max_violations)
        }
        Command::Compare { a, b, instance } => {
            let inst = globals.load(&instance)?;
            commands::compare(
                &inst,
                &commands::parse_spec(&a)?,
                &commands::parse_spec(&b)?,
                options,
            )
        }
        Command::Falsify {
            trials,
            target,
            out,
            inject,
            min_points,
            max_points,
        } => {
            let points = match (min_points, max_points) {
                (None, None) => None,
                (lo, hi) => Some((lo.unwrap_or(1), hi.unwrap_or(8).max(lo.unwrap_or(1)))),
            };
            commands::falsify(
                globals,
                &FalsifyArgs {
                    trials,
                    target,
                    out_dir: out,
                    inject,
                    points,
                },
            )
        }
        Command::Corpus {
            action: CorpusAction::Run { name },
        } => {
            let mut settings = CorpusSettings {
                options,
                only: name,
                ..CorpusSettings::default()
            };
            if let Some(w) = globals.window_max {
                settings.window_max = w;
            }
            if let Some(only) = &settings.only {
                if !contraction_core::corpus::names().contains(only) {
                    anyhow::bail!("unknown corpus entry {only:?}");
                }
            }
            Ok(render_corpus(&corpus_run(&settings), &settings))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty || cli.format == Some(Format::Pretty);
    let precision = match precision_from(std::env::var(PRECISION_ENV).ok().as_deref()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(Status::Error.code() as u8);
        }
    };
    let globals = Globals {
        window_max: cli.window_max,
        max_steps: cli.max_steps,
        seed: cli.seed,
        precision,
    };
    match run(cli, &globals) {
        Ok(rendered) => {
            print!("{}", rendered.render(pretty));
            ExitCode::from(rendered.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Error.code() as u8)
        }
    }
}
