use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cli::config::{parse_horizon, parse_semantics};
use cli::{analyze, catalog_command, hasse_command, verify, CatalogAction, CliError, LiftMode, Outcome, RunConfig};
use repgame::equilibria::DEFAULT_DEPTH;

#[derive(Parser)]
#[command(name = "repgame", version, about = "Analyse repeated games over finite and huge horizons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a finite horizon and list its subgame perfect equilibria.
    Analyze(Common),
    /// Verify a strategy family on its deviation suite.
    Verify(Common),
    /// Emit the Hasse diagram of a lifted preference as DOT.
    Hasse(Common),
    /// List, run or export the built-in games.
    Catalog {
        #[arg(value_enum, default_value = "list")]
        action: Action,
        /// Restrict to one catalog id.
        #[arg(long)]
        game: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Action {
    List,
    Run,
    Export,
}

#[derive(Args)]
struct Common {
    /// Catalog id or path to a game description.
    #[arg(long)]
    game: String,
    /// n=N, huge:perspective or huge:birdseye.
    #[arg(long, default_value = "n=2")]
    horizon: String,
    /// discounted:p/q, simple, overtaking, limit-of-means (or lifted for analyze).
    #[arg(long)]
    criterion: Option<String>,
    /// Strategy family such as spe or simple-sum(target=Rr).
    #[arg(long)]
    family: Option<String>,
    /// weak or strict.
    #[arg(long, default_value = "strict")]
    semantics: String,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    suite_depth: u64,
    /// Player whose preference `hasse` draws.
    #[arg(long)]
    player: Option<String>,
    /// plain, dynamic-consistency, swaps or sooner-better.
    #[arg(long, default_value = "plain")]
    lift: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write DOT here; `hasse` prints it to standard output otherwise.
    #[arg(long)]
    dot: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::new(&self.game, parse_horizon(&self.horizon)?);
        cfg.criterion = self.criterion.clone();
        cfg.family = self.family.clone();
        cfg.semantics = parse_semantics(&self.semantics)?;
        cfg.suite_depth = self.suite_depth;
        cfg.player = self.player.clone();
        cfg.lift = LiftMode::parse(&self.lift)?;
        Ok(cfg)
    }
}

fn write(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>, dot: Option<&PathBuf>, dot_to_stdout: bool) -> Result<(), CliError> {
    match (&outcome.dot, dot) {
        (Some(d), Some(path)) => {
            write(Some(path), d)?;
            write(out, &outcome.report)
        }
        (Some(d), None) if dot_to_stdout => {
            write(None, d)?;
            if out.is_some() {
                write(out, &outcome.report)?;
            }
            Ok(())
        }
        _ => write(out, &outcome.report),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (outcome, out, dot, dot_to_stdout) = match &cli.command {
        Command::Analyze(c) => (analyze(&c.config()?)?, c.out.as_ref(), c.dot.as_ref(), false),
        Command::Verify(c) => (verify(&c.config()?)?, c.out.as_ref(), c.dot.as_ref(), false),
        Command::Hasse(c) => (hasse_command(&c.config()?)?, c.out.as_ref(), c.dot.as_ref(), true),
        Command::Catalog { action, game, out } => {
            let action = match action {
                Action::List => CatalogAction::List,
                Action::Run => CatalogAction::Run,
                Action::Export => CatalogAction::Export,
            };
            (catalog_command(action, game.as_deref())?, out.as_ref(), None, false)
        }
    };
    emit(&outcome, out, dot, dot_to_stdout)?;
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("repgame: {e}");
            e.exit_code()
        }
    }
}
