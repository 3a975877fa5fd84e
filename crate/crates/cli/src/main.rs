use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lamlab_core::harness::{
    analyze_run_dir, emit_analysis, emit_outputs, export_boundaries, parse_config, run_sequence, ExperimentConfig,
    Preset, RunOutcome, EXIT_CONFIG,
};

#[derive(Parser)]
#[command(name = "lamlab", version, about = "Minimal disks spanning helix-axis curves with concentrated winding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and analyze a single winding scale.
    Solve(RunArgs),
    /// Solve and analyze every winding scale of the config.
    Sequence(RunArgs),
    /// Re-run the analysis passes on the meshes of an existing run directory.
    Analyze {
        /// Run directory written by `solve` or `sequence`.
        run_dir: PathBuf,
        /// Write the refreshed tables and summary here instead of in place.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the boundary curves of the config without solving.
    Export(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named experiment.
    #[arg(long, value_parser = ["helicoid", "point", "cantor2", "interval"])]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Winding scale, replacing the config's list.
    #[arg(long)]
    n: Option<u32>,
}

enum Failure {
    Config(anyhow::Error),
    Other(anyhow::Error),
}

impl RunArgs {
    fn load(&self, single: bool) -> Result<(ExperimentConfig, String), Failure> {
        let (mut cfg, label) = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))
                    .map_err(Failure::Config)?;
                let cfg = parse_config(&text)
                    .with_context(|| format!("in {}", path.display()))
                    .map_err(Failure::Config)?;
                let label = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
                (cfg, label)
            }
            (None, Some(name)) => {
                let preset: Preset = name.parse().map_err(|e| Failure::Config(anyhow::Error::new(e)))?;
                (preset.config(), name.clone())
            }
            (None, None) => {
                return Err(Failure::Config(anyhow::anyhow!("one of --config or --preset is required")));
            }
        };
        if let Some(n) = self.n {
            cfg.n = vec![n];
        } else if single {
            cfg.n.truncate(1);
        }
        cfg.validate().map_err(|e| Failure::Config(e.into()))?;
        Ok((cfg, label))
    }

    fn out_dir(&self, cfg: &ExperimentConfig, label: &str) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .unwrap_or_else(|| Path::new("runs").join(label))
    }
}

fn fmt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.6}"))
}

fn report(outcome: &RunOutcome, dir: &Path) {
    for run in &outcome.summary.runs {
        match (&run.solve, &run.error) {
            (_, Some(e)) => println!("n={:<4} error: {e}", run.n),
            (Some(s), None) => println!(
                "n={:<4} {:<10} iterations={:<4} area={:.6} residual={:.3e}",
                run.n,
                s.status.as_str(),
                s.iterations,
                s.final_area,
                s.final_residual
            ),
            (None, None) => println!("n={:<4} analyzed", run.n),
        }
    }
    if let Some(b) = &outcome.summary.blowup {
        for s in &b.samples {
            println!("kappa_near(p={}) growth={}", s.p, fmt(s.growth));
        }
        if let Some(g) = b.gap_contrast {
            println!("gap contrast {g:.3}");
        }
    }
    for (pass, v) in &outcome.summary.verdicts {
        println!("{pass:<22} {}", v.as_str());
    }
    println!("wrote {}", dir.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(cli);
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Solve(args) => sequence(&args, true),
        Command::Sequence(args) => sequence(&args, false),
        Command::Analyze { run_dir, out } => {
            let outcome = analyze_run_dir(&run_dir).map_err(|e| match e {
                lamlab_core::Error::Config { .. } => Failure::Config(e.into()),
                _ => Failure::Other(e.into()),
            })?;
            let dir = out.unwrap_or(run_dir);
            emit_analysis(&outcome, &dir).map_err(|e| Failure::Other(e.into()))?;
            report(&outcome, &dir);
            Ok(outcome.summary.status.exit_code())
        }
        Command::Export(args) => {
            let (cfg, label) = args.load(false)?;
            let dir = args.out_dir(&cfg, &label);
            let files = export_boundaries(&cfg, &dir).map_err(|e| Failure::Other(e.into()))?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(0)
        }
    }
}

fn sequence(args: &RunArgs, single: bool) -> Result<i32, Failure> {
    let (cfg, label) = args.load(single)?;
    let dir = args.out_dir(&cfg, &label);
    let outcome = run_sequence(&cfg).map_err(|e| Failure::Config(e.into()))?;
    emit_outputs(&outcome, &dir)
        .with_context(|| format!("writing {}", dir.display()))
        .map_err(Failure::Other)?;
    report(&outcome, &dir);
    Ok(outcome.summary.status.exit_code())
}
