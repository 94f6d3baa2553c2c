use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use fogfed::data::{load_wsdream, write_wsdream, LoadOptions, Target, WsDreamPaths};
use fogfed::domain::QosTable;
use fogfed::experiment::{
    build_report, form, load_predictor, prepare_data, save_formation, save_trained, simulate, train_target,
    DataSource, Engine, RunLayout, ScenarioFile,
};
use fogfed::fl::Selection;

/// Run-directory root when neither `--run-dir` nor the variable is set.
const DEFAULT_RUN_ROOT: &str = "runs";
const RUN_ROOT_VAR: &str = "FOGFED_RUN_DIR";

#[derive(Parser, Debug)]
#[command(name = "fogfed", version, about = "Fog federation formation simulator")]
struct Cli {
    /// Scenario file; the bundled desk scenario when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Overrides the scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Run directory. Defaults to `<root>/<scenario>-s<seed>` where the root is
    /// $FOGFED_RUN_DIR or ./runs.
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load the QoS dataset and print a summary.
    Ingest {
        /// Directory with WS-Dream files; the scenario's data section when omitted.
        dir: Option<PathBuf>,
        #[arg(long)]
        max_users: Option<usize>,
        #[arg(long)]
        max_nodes: Option<usize>,
    },
    /// Train one federated QoS model.
    Train {
        #[arg(long)]
        target: Target,
        #[arg(long)]
        selection: Option<Selection>,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Form federations with one engine using the trained models.
    Form {
        #[arg(long)]
        engine: Engine,
    },
    /// Compare the engines whose outputs exist in the run directory.
    Report,
    /// Run every stage with one seed.
    Simulate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut file = match &cli.scenario {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::desk(),
    };
    if let Some(seed) = cli.seed {
        file.seed = seed;
    }
    let seed = file.seed;
    let layout = RunLayout::new(match cli.run_dir {
        Some(dir) => dir,
        None => {
            let root = std::env::var_os(RUN_ROOT_VAR).map_or_else(|| PathBuf::from(DEFAULT_RUN_ROOT), PathBuf::from);
            let name = if file.name.is_empty() { "scenario" } else { &file.name };
            root.join(format!("{name}-s{seed}"))
        }
    });

    match cli.command {
        Command::Ingest { dir, max_users, max_nodes } => {
            if let Some(dir) = dir {
                let opts = LoadOptions { max_users, max_nodes, ..Default::default() };
                let (_, s) = load_wsdream(&WsDreamPaths::in_dir(&dir), &opts).with_context(|| format!("ingest {}", dir.display()))?;
                println!("{} users, {} nodes, {} records ({} filtered)", s.n_users, s.n_nodes, s.records, s.filtered);
            } else {
                let prepared = prepare_data(&file, seed).context("ingest")?;
                let s = &prepared.summary;
                if s.source == DataSource::Synthetic {
                    write_wsdream(&prepared.dataset, layout.data_dir()).context("ingest")?;
                }
                println!(
                    "{} users, {} nodes, {} records ({} filtered), {} train / {} test",
                    s.n_users,
                    s.n_nodes,
                    s.records,
                    s.filtered,
                    prepared.train.len(),
                    prepared.test.len()
                );
            }
        }
        Command::Train { target, selection, rounds } => {
            if let Some(r) = rounds {
                file.train.rounds = r;
            }
            let prepared = prepare_data(&file, seed).context("ingest")?;
            let selection = selection.unwrap_or(file.train.selection);
            let trained = train_target(&file, &prepared, target, selection, seed).context("train")?;
            save_trained(&layout, &trained).context("train")?;
            println!(
                "{} after {} rounds: mse {:.6} mae {:.6} ({})",
                target.short_name(),
                file.train.rounds,
                trained.federated.mse,
                trained.federated.mae,
                layout.model(target).display()
            );
        }
        Command::Form { engine } => {
            let scenario = file.scenario().context("scenario")?;
            let predictor = load_predictor(&layout).context("form")?;
            let oracle = QosTable::tabulate(&scenario, &predictor);
            let f = form(engine, &file, &scenario, &oracle, seed, Some(&layout)).context("form")?;
            save_formation(&layout, &f, &scenario, &oracle).context("form")?;
            let last = f.trace.last().context("form: empty trace")?;
            print!("{}: {} steps, final payoff {:.4}", engine.name(), f.trace.len(), last.welfare);
            if let Some(s) = &f.stability {
                print!(", converged {} ({})", s.converged, s.deviation_check.label());
            }
            println!();
        }
        Command::Report => {
            let report = build_report(&file, &layout).context("report")?;
            print!("{}", report.summary());
        }
        Command::Simulate => {
            let report = simulate(&file, seed, &layout)?;
            print!("{}", report.summary());
            println!("artifacts in {}", layout.root.display());
        }
    }
    Ok(())
}
