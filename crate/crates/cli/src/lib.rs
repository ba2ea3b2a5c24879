//! Command implementations behind the `repgame` binary.
//!
//! Every command returns an [`Outcome`] whose status maps to the process
//! exit code: 0 for verified or passing, 1 for refuted or failing, 2 for
//! usage errors.

pub mod config;
pub mod describe;
pub mod report;

use std::process::ExitCode;

use repgame::catalog::{self, spe_summary};
use repgame::criteria::{simple_total, Criterion};
use repgame::equilibria::{default_suite, describe_result, finite_profile, verify_symbolic_spe, DEFAULT_DEPTH};
use repgame::game::{GameError, Profile, Semantics};
use repgame::repeated::{build_finite_repeated, hasse, lift_preferences, Horizon, LiftOptions};
use thiserror::Error;

use config::{build_family, horizon_name, parse_criterion, LoadedGame};
use describe::export;
use report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failed(_) => ExitCode::from(1),
        }
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub dot: Option<String>,
    pub status: Status,
}

impl Outcome {
    pub fn exit_code(&self) -> ExitCode {
        match self.status {
            Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(1),
        }
    }
}

/// How lifted preferences are generated for `hasse` and `analyze`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftMode {
    #[default]
    Plain,
    DynamicConsistency,
    Swaps,
    SoonerBetter,
}

impl LiftMode {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "plain" => Ok(LiftMode::Plain),
            "dynamic-consistency" => Ok(LiftMode::DynamicConsistency),
            "swaps" => Ok(LiftMode::Swaps),
            "sooner-better" => Ok(LiftMode::SoonerBetter),
            other => Err(CliError::Usage(format!(
                "lift {other:?}: expected plain, dynamic-consistency, swaps or sooner-better"
            ))),
        }
    }

    pub fn options(self) -> LiftOptions {
        let mut o = LiftOptions::default();
        match self {
            LiftMode::Plain => {}
            LiftMode::DynamicConsistency => o.dynamic_consistency = true,
            LiftMode::Swaps => o.identify_swaps = true,
            LiftMode::SoonerBetter => o.sooner_better = true,
        }
        o
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// Catalog id or description file.
    pub game: String,
    pub horizon: Horizon,
    /// A criterion, or `lifted` for the weak-separability lift (analyze only).
    pub criterion: Option<String>,
    pub family: Option<String>,
    pub semantics: Semantics,
    pub suite_depth: u64,
    pub player: Option<String>,
    pub lift: LiftMode,
}

impl RunConfig {
    pub fn new(game: &str, horizon: Horizon) -> Self {
        RunConfig {
            game: game.to_string(),
            horizon,
            criterion: None,
            family: None,
            semantics: Semantics::NoStrictImprovement,
            suite_depth: DEFAULT_DEPTH,
            player: None,
            lift: LiftMode::Plain,
        }
    }
}

fn finite_len(cfg: &RunConfig, command: &str) -> Result<u64, CliError> {
    match cfg.horizon {
        Horizon::Finite(n) => Ok(n),
        h => Err(CliError::Usage(format!("{command} needs a finite horizon n=N, got {}", horizon_name(h)))),
    }
}

fn game_section(r: &mut Report, game: &LoadedGame, cfg: &RunConfig) {
    let g = &game.description.game;
    let players: Vec<String> =
        g.players().iter().map(|p| format!("{}{}", p.name, if p.outside { " (outside)" } else { "" })).collect();
    r.set("game", "name", game.name());
    r.set("game", "players", players.join(", "));
    r.set("game", "connected", game.description.connected.join(" "));
    r.set("game", "horizon", horizon_name(cfg.horizon));
    if let Some(note) = game.entry.as_ref().and_then(|e| e.interpretation) {
        r.set("game", "interpretation", note);
    }
}

/// Expand a finite horizon, solve for subgame perfect profiles, and check
/// a family against the exhaustive answer.
pub fn analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = finite_len(cfg, "analyze")?;
    let game = LoadedGame::load(&cfg.game)?;
    let spec = game.spec(cfg.horizon)?;
    let criterion_text = cfg.criterion.clone().unwrap_or_else(|| "simple".into());
    let base = build_finite_repeated(&spec).map_err(failed)?;
    let criterion = if criterion_text == "lifted" { None } else { Some(parse_criterion(&criterion_text, cfg.horizon)?) };
    let form = match &criterion {
        Some(c) => base.with_criterion(&spec, c).map_err(failed)?,
        None => {
            let mut form = base;
            for p in spec.constituent.core_players() {
                let rel = lift_preferences(&spec, p, &cfg.lift.options()).map_err(failed)?;
                form = form.with_lifted(&spec, &rel).map_err(failed)?;
            }
            form
        }
    };
    let g = &form.game;
    let spe: Vec<Profile> = match g.all_profiles() {
        Ok(all) => all.into_iter().filter(|p| g.is_spe(p, cfg.semantics).is_ok()).collect(),
        Err(GameError::TooManyProfiles(_)) if cfg.semantics == Semantics::NoStrictImprovement => {
            g.backward_induction().map_err(failed)?
        }
        Err(e) => return Err(failed(e)),
    };

    let mut r = Report::new();
    game_section(&mut r, &game, cfg);
    r.set("analysis", "criterion", &criterion_text);
    if criterion.is_none() {
        r.set("analysis", "lift", format!("{:?}", cfg.lift).to_lowercase());
    }
    r.set("analysis", "semantics", cfg.semantics);
    r.set("analysis", "nodes", g.nodes().len());
    r.set("analysis", "terminals", g.leaves().len());
    r.set("analysis", "spe", spe_summary(g, &spe));
    let mut outcomes: Vec<String> = spe
        .iter()
        .map(|p| spec.whole_name(&form.leaf_components[g.leaf_index(g.outcome(p)).expect("leaf")]))
        .collect();
    outcomes.sort();
    outcomes.dedup();
    r.set("analysis", "spe_outcomes", outcomes.join(" "));

    if let Some(c) = &criterion {
        let model = spec.payoffs().map_err(failed)?;
        for seq in &form.leaf_components {
            let h = spec.finite_history(seq, n);
            let values = spec
                .constituent
                .core_players()
                .into_iter()
                .map(|p| match c {
                    Criterion::Overtaking => simple_total(&h, model, p).map(|v| v.to_string()),
                    _ => c.value(&h, model, p).map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(failed)?;
            r.set("terminals", &spec.whole_name(seq), values.join(", "));
        }
    }

    let mut status = if spe.is_empty() { Status::Fail } else { Status::Pass };
    if let Some(text) = &cfg.family {
        let fam = build_family(&game, &spec, text, criterion.as_ref())?;
        let profile = finite_profile(&form, &spec, &fam);
        r.set("family", "name", &fam.name);
        match g.is_spe(&profile, cfg.semantics) {
            Ok(()) => {
                r.set("family", "verdict", "subgame-perfect");
                status = Status::Pass;
            }
            Err(w) => {
                r.set("family", "verdict", "not-subgame-perfect");
                let who = &g.players()[w.player].name;
                r.set("family", "witness", format!("player {who} at {} reaches {}", g.history_string(w.subgame), spec.whole_name(&form.leaf_components[g.leaf_index(w.deviated).expect("leaf")])));
                status = Status::Fail;
            }
        }
    }
    Ok(Outcome { report: r.to_string(), dot: None, status })
}

/// Check a strategy family against its deviation suite.
pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let criterion_text = cfg.criterion.as_deref().ok_or_else(|| CliError::Usage("verify needs --criterion".into()))?;
    let family_text = cfg.family.as_deref().ok_or_else(|| CliError::Usage("verify needs --family".into()))?;
    let game = LoadedGame::load(&cfg.game)?;
    let criterion = parse_criterion(criterion_text, cfg.horizon)?;
    let spec = game.spec(cfg.horizon)?;
    let fam = build_family(&game, &spec, family_text, Some(&criterion))?;
    let suite = default_suite(&spec, &fam, cfg.suite_depth);
    let report = verify_symbolic_spe(&spec, &fam, &criterion, Some(&suite)).map_err(failed)?;

    let mut r = Report::new();
    game_section(&mut r, &game, cfg);
    r.set("result", "criterion", &report.criterion);
    r.set("result", "family", &report.family);
    r.set("result", "suite_depth", cfg.suite_depth);
    r.set("result", "verdict", report.verdict());
    r.set("result", "on_path", &report.on_path);
    r.set("result", "payoffs", report.on_path_payoffs.join(" "));
    if let Some(alt) = report.alternative {
        r.set("result", "alternative_fill", if alt { "verified-on-suite" } else { "refuted" });
    }
    for (k, note) in report.notes.iter().enumerate() {
        r.set("result", &format!("note_{k}"), note);
    }
    if let Some(w) = report.witness() {
        r.set("result", "witness", describe_result(&spec, w));
    }
    r.set("result", "deviations", report.results.len());
    let width = report.results.len().to_string().len();
    for (k, d) in report.results.iter().enumerate() {
        r.set("deviations", &format!("d{k:0width$}"), describe_result(&spec, d));
    }
    let status = if report.verified() { Status::Pass } else { Status::Fail };
    Ok(Outcome { report: r.to_string(), dot: None, status })
}

/// Cover graph of one player's lifted preference.
pub fn hasse_command(cfg: &RunConfig) -> Result<Outcome, CliError> {
    finite_len(cfg, "hasse")?;
    let game = LoadedGame::load(&cfg.game)?;
    let spec = game.spec(cfg.horizon)?;
    let name = cfg.player.as_deref().ok_or_else(|| CliError::Usage("hasse needs --player".into()))?;
    let player = spec
        .constituent
        .player_index(name)
        .ok_or_else(|| CliError::Usage(format!("unknown player {name:?}")))?;
    let rel = lift_preferences(&spec, player, &cfg.lift.options()).map_err(failed)?;
    let h = hasse(&rel).map_err(failed)?;

    let mut r = Report::new();
    game_section(&mut r, &game, cfg);
    r.set("hasse", "player", name);
    r.set("hasse", "lift", format!("{:?}", cfg.lift).to_lowercase());
    r.set("hasse", "nodes", h.labels.len());
    r.set("hasse", "edges", h.edges.len());
    let labels = h.edge_labels();
    let width = labels.len().to_string().len();
    for (k, (a, b)) in labels.iter().enumerate() {
        r.set("edges", &format!("e{k:0width$}"), format!("{a} -> {b}"));
    }
    let dot = h.to_dot(&format!("{} {name}", game.name()));
    Ok(Outcome { report: r.to_string(), dot: Some(dot), status: Status::Pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogAction {
    List,
    Run,
    Export,
}

/// List entries, run their golden expectations, or export one as text.
pub fn catalog_command(action: CatalogAction, id: Option<&str>) -> Result<Outcome, CliError> {
    let ids: Vec<&str> = match id {
        Some(i) => {
            catalog::get(i).map_err(|e| CliError::Usage(e.to_string()))?;
            catalog::IDS.iter().copied().filter(|x| *x == i).collect()
        }
        None => catalog::IDS.to_vec(),
    };
    let entries: Vec<_> = ids.iter().map(|i| catalog::get(i).expect("known id")).collect();
    match action {
        CatalogAction::List => {
            let mut r = Report::new();
            for e in &entries {
                r.set("catalog", e.id, e.title);
            }
            Ok(Outcome { report: r.to_string(), dot: None, status: Status::Pass })
        }
        CatalogAction::Export => {
            let [e] = entries.as_slice() else {
                return Err(CliError::Usage("catalog export needs --game ID".into()));
            };
            let text = export(&describe::GameDescription::from_entry(e));
            Ok(Outcome { report: text, dot: None, status: Status::Pass })
        }
        CatalogAction::Run => {
            let mut r = Report::new();
            let mut failures = 0;
            let mut total = 0;
            for e in &entries {
                for o in catalog::run_entry(e) {
                    total += 1;
                    let line = match &o.actual {
                        Ok(a) if *a == o.expected => "pass".to_string(),
                        Ok(a) => format!("FAIL expected {:?} actual {a:?}", o.expected),
                        Err(why) => format!("FAIL expected {:?} error {why}", o.expected),
                    };
                    if !o.passed() {
                        failures += 1;
                    }
                    r.set(o.entry, o.name, line);
                }
            }
            r.set("summary", "checks", total);
            r.set("summary", "failures", failures);
            let status = if failures == 0 { Status::Pass } else { Status::Fail };
            Ok(Outcome { report: r.to_string(), dot: None, status })
        }
    }
}
