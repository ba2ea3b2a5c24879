use std::path::Path;

use nonstd::{parse_rational, ViewKind};
use repgame::catalog::{self, CatalogEntry};
use repgame::criteria::Criterion;
use repgame::equilibria::{
    family_constant, family_discount, family_mixed, family_repeat_nash, family_repeat_spe, family_simple_sum,
    family_simple_sum_forced, StrategyFamily,
};
use repgame::game::Semantics;
use repgame::repeated::{Horizon, RepeatedGameSpec};

use crate::describe::{parse_game_description, GameDescription};
use crate::CliError;

/// A game from the catalog or from a description file.
#[derive(Debug, Clone)]
pub struct LoadedGame {
    pub description: GameDescription,
    pub entry: Option<CatalogEntry>,
}

impl LoadedGame {
    /// A catalog id, or a path to a description file.
    pub fn load(source: &str) -> Result<Self, CliError> {
        if let Ok(entry) = catalog::get(source) {
            return Ok(LoadedGame { description: GameDescription::from_entry(&entry), entry: Some(entry) });
        }
        let path = Path::new(source);
        if !path.is_file() {
            return Err(CliError::Usage(format!(
                "--game {source:?} is neither a catalog id ({}) nor a readable file",
                catalog::IDS.join(", ")
            )));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{source}: {e}")))?;
        let description = parse_game_description(&text).map_err(|e| CliError::Usage(format!("{source}: {e}")))?;
        Ok(LoadedGame { description, entry: None })
    }

    pub fn name(&self) -> String {
        self.description.name.clone().unwrap_or_else(|| "unnamed".into())
    }

    pub fn spec(&self, horizon: Horizon) -> Result<RepeatedGameSpec, CliError> {
        self.description.spec(horizon).map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn parse_horizon(text: &str) -> Result<Horizon, CliError> {
    let bad = || CliError::Usage(format!("horizon {text:?}: expected n=N, huge:perspective or huge:birdseye"));
    match text.trim() {
        "huge:perspective" => Ok(Horizon::Huge(ViewKind::Perspective)),
        "huge:birdseye" => Ok(Horizon::Huge(ViewKind::BirdsEye)),
        t => {
            let n: u64 = t.strip_prefix("n=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(Horizon::Finite(n))
        }
    }
}

pub fn horizon_name(h: Horizon) -> String {
    match h {
        Horizon::Finite(n) => format!("n={n}"),
        Horizon::Huge(v) => format!("huge:{v}"),
    }
}

pub fn parse_semantics(text: &str) -> Result<Semantics, CliError> {
    match text {
        "strict" => Ok(Semantics::NoStrictImprovement),
        "weak" => Ok(Semantics::RequiresWeakPreference),
        other => Err(CliError::Usage(format!("semantics {other:?}: expected weak or strict"))),
    }
}

/// Criterion string; the view must match the horizon.
pub fn parse_criterion(text: &str, horizon: Horizon) -> Result<Criterion, CliError> {
    let c: Criterion = text.parse().map_err(|e: repgame::criteria::CriterionError| CliError::Usage(e.to_string()))?;
    if c.view() != horizon.view() {
        return Err(CliError::Usage(format!(
            "criterion {c} needs a {} horizon, got {}",
            c.view(),
            horizon_name(horizon)
        )));
    }
    Ok(c)
}

/// `name` or `name(key=value, ...)`.
pub fn split_family(text: &str) -> Result<(String, Vec<(String, String)>), CliError> {
    let text = text.trim();
    let Some(open) = text.find('(') else { return Ok((text.to_string(), vec![])) };
    let body = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| CliError::Usage(format!("family {text:?}: missing ')'")))?;
    let mut params = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("family {text:?}: expected key=value, got {part:?}")))?;
        params.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok((text[..open].trim().to_string(), params))
}

fn param<'a>(params: &'a [(String, String)], key: &str, family: &str) -> Result<&'a str, CliError> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| CliError::Usage(format!("family {family} needs {key}=...")))
}

/// `=out;in=A`: history (actions joined by '.') and the action taken there.
fn parse_profile(spec: &RepeatedGameSpec, text: &str) -> Result<repgame::game::Profile, CliError> {
    let mut pairs: Vec<(Vec<&str>, &str)> = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (h, a) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("profile entry {part:?}: expected HISTORY=ACTION")))?;
        let history: Vec<&str> = h.split('.').map(str::trim).filter(|x| !x.is_empty()).collect();
        pairs.push((history, a.trim()));
    }
    let refs: Vec<(&[&str], &str)> = pairs.iter().map(|(h, a)| (h.as_slice(), *a)).collect();
    spec.constituent.profile_from_labels(&refs).map_err(|e| CliError::Usage(format!("profile {text:?}: {e}")))
}

const FAMILY_HELP: &str = "spe, simple-sum(target=T), simple-sum-forced(target=T), discount(delta=p/q), \
repeat-nash(profile=H=A;...), constant(profile=H=A;...), mixed, or a catalog family name";

/// Family by name; catalog games also offer their named families.
pub fn build_family(
    game: &LoadedGame,
    spec: &RepeatedGameSpec,
    text: &str,
    criterion: Option<&Criterion>,
) -> Result<StrategyFamily, CliError> {
    if let Some(entry) = &game.entry {
        if let Some(f) = entry.families(spec.horizon).into_iter().find(|f| f.name == text.trim()) {
            return Ok(f);
        }
    }
    let (name, params) = split_family(text)?;
    let failed = |e: repgame::equilibria::EquilibriumError| CliError::Failed(e.to_string());
    match name.as_str() {
        "spe" => family_repeat_spe(spec).map_err(failed),
        "simple-sum" => family_simple_sum(spec, param(&params, "target", &name)?).map_err(failed),
        "simple-sum-forced" => family_simple_sum_forced(spec, param(&params, "target", &name)?).map_err(failed),
        "discount" => {
            let delta = match (params.iter().find(|(k, _)| k == "delta"), criterion) {
                (Some((_, d)), _) => parse_rational(d).map_err(|e| CliError::Usage(e.to_string()))?,
                (None, Some(Criterion::Discounted(d))) => d.clone(),
                _ => return Err(CliError::Usage("family discount needs delta=p/q".into())),
            };
            family_discount(spec, &delta).map_err(failed)
        }
        "repeat-nash" => {
            let p = parse_profile(spec, param(&params, "profile", &name)?)?;
            family_repeat_nash(spec, &p).map_err(failed)
        }
        "constant" => {
            let p = parse_profile(spec, param(&params, "profile", &name)?)?;
            Ok(family_constant("constant", p))
        }
        "mixed" => {
            let sigma = game
                .description
                .mixed
                .as_ref()
                .ok_or_else(|| CliError::Usage("family mixed needs a 'mixed:' line in the game".into()))?;
            family_mixed(spec, sigma).map_err(failed)
        }
        _ => {
            let mut known = FAMILY_HELP.to_string();
            if let Some(entry) = &game.entry {
                let names: Vec<String> = entry.families(spec.horizon).into_iter().map(|f| f.name).collect();
                known = format!("{known}; {} offers: {}", entry.id, names.join(", "));
            }
            Err(CliError::Usage(format!("unknown family {text:?}; known: {known}")))
        }
    }
}
