//! Command-line front end: each subcommand reads a TOML run configuration,
//! runs one family of checks and writes CSV and JSON reports.
//!
//! Exit codes: 0 success, 2 invalid input, 3 a check failed, 64 usage
//! error, 66 unreadable config.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::CheckFailed;
use crate::config::Unreadable;
use crate::output::Reporter;

#[derive(Parser, Debug)]
#[command(
    name = "sobolev-groupoid",
    version,
    about = "Mollifiers, weak derivatives and finite groupoid algebras"
)]
struct Cli {
    /// TOML run configuration, layered over the bundled defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override any config key, e.g. `--set grid.nodes=1024`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CatalogArgs {
    /// `partial`, `full`, `power`, or a TOML file describing the catalog.
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mollifier mass and approximate-identity errors over an epsilon schedule.
    Mollify {
        #[arg(long)]
        function: Option<String>,
        /// Comma-separated, strictly decreasing.
        #[arg(long, visible_alias = "epsilon-list", value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        #[arg(long)]
        p: Option<f64>,
        /// Nodes per axis.
        #[arg(long, visible_alias = "grid")]
        nodes: Option<i64>,
        /// Fail unless every kernel has unit mass and no mass outside its ball.
        #[arg(long)]
        kernel_check: bool,
    },
    /// Verifies a weak-derivative candidate against a test-function panel.
    Weakderiv {
        #[arg(long, visible_alias = "f")]
        function: Option<String>,
        #[arg(long, visible_alias = "u")]
        candidate: Option<String>,
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<i64>>,
        #[arg(long)]
        panel_size: Option<i64>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Also run the piecewise-constant brute force.
        #[arg(long)]
        search: bool,
    },
    /// Sobolev norm and membership of one function.
    Sobolev {
        #[arg(long, visible_alias = "f")]
        function: Option<String>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        p: Option<f64>,
        /// `analytic` or `estimated`.
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Product relation of a catalog as a verdict matrix.
    Gamma {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// Matrix CSV, relative to the output directory.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Groupoid tables and axiom report.
    Groupoid {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// Where to write the tables, relative to the output directory.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Left invariance of a Haar system.
    Haar {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// `counting`, `constant` or a JSON file of arrow weights.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        panel_size: Option<i64>,
    },
    /// Checks on the left regular representation.
    Rep {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// Tables written by `groupoid`; defaults to the catalog's groupoid.
        #[arg(long)]
        groupoid: Option<PathBuf>,
        /// `unitary`, `hom`, `inverse` or `involution`.
        #[arg(long)]
        check: Option<String>,
    },
    /// Convolution with a net of sections.
    Dynamics {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// `delta`, `blend`, `identity` or `mollifier`.
        #[arg(long)]
        net: Option<String>,
        #[arg(long)]
        members: Option<i64>,
        /// JSON array with one value per arrow.
        #[arg(long)]
        section: Option<PathBuf>,
    },
    /// Runs the full acceptance suite.
    Acceptance,
}

type Flags = Vec<(String, toml::Value)>;

/// Placeholder key for `--catalog <file>`, expanded before loading.
const CATALOG_FILE: &str = "\0catalog-file";

fn push<T: Into<toml::Value>>(flags: &mut Flags, key: &str, v: Option<T>) {
    if let Some(v) = v {
        flags.push((key.to_string(), v.into()));
    }
}

fn path_value(p: Option<PathBuf>) -> Option<String> {
    p.map(|p| p.to_string_lossy().into_owned())
}

fn catalog_flags(flags: &mut Flags, c: CatalogArgs) {
    match c.catalog {
        Some(name) if Path::new(&name).is_file() || name.ends_with(".toml") => {
            flags.push((CATALOG_FILE.into(), name.into()))
        }
        other => push(flags, "catalog.demo", other),
    }
    push(flags, "catalog.p", c.p);
    push(flags, "catalog.k", c.k);
}

fn flags_of(command: Command) -> (&'static str, Flags) {
    let mut f = Flags::new();
    let name = match command {
        Command::Mollify {
            function,
            epsilons,
            p,
            nodes,
            kernel_check,
        } => {
            push(&mut f, "mollify.function", function);
            push(&mut f, "mollify.epsilons", epsilons);
            push(&mut f, "mollify.p", p);
            push(&mut f, "grid.nodes", nodes);
            push(&mut f, "mollify.kernel_check", kernel_check.then_some(true));
            "mollify"
        }
        Command::Weakderiv {
            function,
            candidate,
            alpha,
            panel_size,
            tolerance,
            search,
        } => {
            push(&mut f, "weakderiv.function", function);
            push(&mut f, "weakderiv.candidate", candidate);
            push(&mut f, "weakderiv.alpha", alpha);
            push(&mut f, "weakderiv.panel_size", panel_size);
            push(&mut f, "weakderiv.tolerance", tolerance);
            push(&mut f, "weakderiv.search", search.then_some(true));
            "weakderiv"
        }
        Command::Sobolev {
            function,
            k,
            p,
            source,
            epsilon,
        } => {
            push(&mut f, "sobolev.function", function);
            push(&mut f, "sobolev.k", k);
            push(&mut f, "sobolev.p", p);
            push(&mut f, "sobolev.source", source);
            push(&mut f, "sobolev.epsilon", epsilon);
            "sobolev"
        }
        Command::Gamma { catalog, emit } => {
            catalog_flags(&mut f, catalog);
            push(&mut f, "gamma.emit", path_value(emit));
            "gamma"
        }
        Command::Groupoid { catalog, emit } => {
            catalog_flags(&mut f, catalog);
            push(&mut f, "groupoid.emit", path_value(emit));
            "groupoid"
        }
        Command::Haar {
            catalog,
            weights,
            panel_size,
        } => {
            catalog_flags(&mut f, catalog);
            push(&mut f, "haar.weights", weights);
            push(&mut f, "haar.panel_size", panel_size);
            "haar"
        }
        Command::Rep {
            catalog,
            groupoid,
            check,
        } => {
            catalog_flags(&mut f, catalog);
            push(&mut f, "rep.groupoid", path_value(groupoid));
            push(&mut f, "rep.check", check);
            "rep"
        }
        Command::Dynamics {
            catalog,
            net,
            members,
            section,
        } => {
            catalog_flags(&mut f, catalog);
            push(&mut f, "dynamics.net", net);
            push(&mut f, "dynamics.members", members);
            push(&mut f, "dynamics.section", path_value(section));
            "dynamics"
        }
        Command::Acceptance => "acceptance",
    };
    (name, f)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (name, raw) = flags_of(cli.command);
    let mut flags = Flags::new();
    for (key, value) in raw {
        match (key.as_str(), value) {
            (CATALOG_FILE, toml::Value::String(path)) => {
                flags.extend(config::catalog_file_flags(Path::new(&path))?)
            }
            (_, value) => flags.push((key, value)),
        }
    }
    push(&mut flags, "output_dir", path_value(cli.out));
    if let Some(seed) = cli.seed {
        flags.push(("seed".into(), toml::Value::Integer(i64::try_from(seed)?)));
    }
    let cfg = config::load(cli.config.as_deref(), &cli.set, &flags)?;
    let mut out = Reporter::new(&cfg.output_dir, cfg.hash(), name)?;
    let result = match name {
        "mollify" => commands::mollify(&cfg, &mut out),
        "weakderiv" => commands::weakderiv(&cfg, &mut out),
        "sobolev" => commands::sobolev(&cfg, &mut out),
        "gamma" => commands::gamma(&cfg, &mut out),
        "groupoid" => commands::groupoid(&cfg, &mut out),
        "haar" => commands::haar(&cfg, &mut out),
        "rep" => commands::rep(&cfg, &mut out),
        "dynamics" => commands::dynamics(&cfg, &mut out),
        _ => commands::acceptance(&cfg, &mut out),
    };
    for p in &out.written {
        eprintln!("wrote {}", p.display());
    }
    result
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Unreadable>().is_some() {
        return 66;
    }
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 3;
    }
    if let Some(err) = e.downcast_ref::<sobolev_groupoid::Error>() {
        return if err.is_validation() { 2 } else { 3 };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return 1;
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
