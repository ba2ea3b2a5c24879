//! The built-in games and their expected results.

use std::fmt;

use nonstd::{rat, NonStdNum, Rational, Segment, Segmented, ViewKind};
use thiserror::Error;

use crate::criteria::{simple_total, Criterion, Extra, Payload, PayoffModel};
use crate::equilibria::{
    family_constant, family_discount, family_mixed, family_realize_terminal, family_repeat_nash, family_repeat_spe,
    family_simple_sum, family_simple_sum_forced, mixed_unit, strategic_profile, verify_symbolic_spe, StrategyFamily,
};
use crate::game::{strategic_as_extensive, GameForm, PayoffTable, Player, Profile, Semantics, StrategicGame, Tree};
use crate::repeated::{
    build_finite_repeated, check_dynamic_consistency, check_weak_separability, hasse, lift_preferences, Horizon,
    LiftOptions, LiftedPreference, RepeatedGameSpec,
};

pub const IDS: [&str; 7] = ["chain-store", "centipede", "pd-positive", "pd-negative", "investment", "lifestyle", "bos"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog id {0:?}; known: {ids}", ids = IDS.join(", "))]
    Unknown(String),
}

type Check = fn(&CatalogEntry) -> Result<String, String>;

/// A golden value and how to recompute it.
#[derive(Clone)]
pub struct Expectation {
    pub name: &'static str,
    pub expected: String,
    compute: Check,
}

impl fmt::Debug for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Expectation").field("name", &self.name).field("expected", &self.expected).finish()
    }
}

impl Expectation {
    fn new(name: &'static str, expected: &str, compute: Check) -> Self {
        Expectation { name, expected: expected.to_string(), compute }
    }

    pub fn evaluate(&self, entry: &CatalogEntry) -> Result<String, String> {
        (self.compute)(entry)
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub title: &'static str,
    /// Constituent without preferences; these come from `table`.
    pub game: GameForm,
    pub table: PayoffTable,
    pub extra: Option<Extra>,
    pub connected: Vec<&'static str>,
    /// Mixed equilibrium of strategic constituents.
    pub mixed: Option<Vec<Vec<Rational>>>,
    /// Modelling choices the source leaves open.
    pub interpretation: Option<&'static str>,
    pub expectations: Vec<Expectation>,
}

impl CatalogEntry {
    pub fn model(&self) -> PayoffModel {
        PayoffModel { table: self.table.clone(), extra: self.extra.clone() }
    }

    pub fn spec(&self, horizon: Horizon) -> RepeatedGameSpec {
        let g = self.game.clone().with_payoffs(&self.table).expect("catalog payoffs fit");
        RepeatedGameSpec::new(g, Some(self.model()), &self.connected, horizon).expect("catalog spec is valid")
    }

    /// Copy with one payoff replaced.
    pub fn with_payoff(&self, terminal: &str, player: usize, value: Rational) -> Self {
        let leaf = self.game.leaf_index(self.game.leaf_by_name(terminal).expect("terminal")).expect("leaf");
        let mut rows = self.table.rows().to_vec();
        rows[leaf][player] = value;
        CatalogEntry { table: PayoffTable::from_rows(rows), ..self.clone() }
    }

    /// The families built for this game, by horizon.
    pub fn families(&self, horizon: Horizon) -> Vec<StrategyFamily> {
        let spec = self.spec(horizon);
        let mut out: Vec<StrategyFamily> = family_repeat_spe(&spec).into_iter().collect();
        let g = &spec.constituent;
        let named = |name: &str, labels: &[(&[&str], &str)]| -> Option<StrategyFamily> {
            g.profile_from_labels(labels).ok().map(|p| family_constant(name, p))
        };
        match self.id {
            "centipede" => {
                out.extend(family_simple_sum(&spec, "Rr"));
                out.extend(family_discount(&spec, &rat(1, 5)));
                if let Horizon::Huge(view) = horizon {
                    out.extend(family_realize_terminal(&spec, &centipede_half_target(view)));
                }
            }
            "chain-store" => {
                out.extend(family_discount(&spec, &rat(1, 5)));
                if let Ok(p) = g.profile_from_labels(&[(&[], "out"), (&["in"], "A")]) {
                    out.extend(family_repeat_nash(&spec, &p));
                }
            }
            "pd-positive" => {
                out.extend(family_simple_sum(&spec, "SS"));
            }
            "pd-negative" => {
                out.extend(family_simple_sum_forced(&spec, "SS"));
            }
            "investment" => {
                out.extend(named("never-invest", &[(&[], "N")]));
                out.push(invest_while_unbroken(&spec));
            }
            "lifestyle" => {
                out.extend(named("always-eat", &[(&[], "E")]));
                out.push(avoid_until_end(&spec));
            }
            "bos" => {
                out.push(family_repeat_nash(&spec, &strategic_profile(g, &[0, 0])).expect("BB is Nash"));
                if let (Some(sigma), Horizon::Huge(ViewKind::BirdsEye)) = (&self.mixed, horizon) {
                    out.extend(family_mixed(&spec, sigma));
                }
            }
            _ => {}
        }
        out
    }
}

/// Centipede target: continue until half the horizon, then quit.
pub fn centipede_half_target(view: ViewKind) -> crate::criteria::WholeHistory {
    let half = NonStdNum::tau().scale(&rat(1, 2));
    Segmented::new(
        view,
        vec![
            Segment::new(half.clone(), Payload::Term(0)),
            Segment::new(NonStdNum::int(1), Payload::Term(2)),
            Segment::new(&half - &NonStdNum::int(1), Payload::Empty),
        ],
    )
    .expect("valid lengths")
}

/// Invest as long as every earlier period invested.
pub fn invest_while_unbroken(spec: &RepeatedGameSpec) -> StrategyFamily {
    let g = &spec.constituent;
    let invest = g.profile_from_labels(&[(&[], "I")]).expect("I");
    let skip = g.profile_from_labels(&[(&[], "N")]).expect("N");
    let i = g.leaf_index(g.leaf_by_name("I").expect("I")).expect("leaf");
    StrategyFamily::new("invest-while-unbroken", move |ctx| {
        if ctx.all(|z| z == i) {
            invest.clone()
        } else {
            skip.clone()
        }
    })
}

/// Avoid while the remaining horizon is huge, eat in the last finitely many periods.
pub fn avoid_until_end(spec: &RepeatedGameSpec) -> StrategyFamily {
    let g = &spec.constituent;
    let eat = g.profile_from_labels(&[(&[], "E")]).expect("E");
    let avoid = g.profile_from_labels(&[(&[], "A")]).expect("A");
    StrategyFamily::new("avoid-until-end", move |ctx| if ctx.remaining_finite() { eat.clone() } else { avoid.clone() })
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|x| rat(*x, 1)).collect()
}

fn single_player(actions: &[&str]) -> GameForm {
    let tree = Tree::node(0, actions.iter().map(|a| (*a, Tree::Leaf)).collect());
    GameForm::new(vec![Player::core("1")], tree).expect("valid tree")
}

fn table(g: &GameForm, rows: &[(&str, Vec<Rational>)]) -> PayoffTable {
    PayoffTable::from_named(g, rows).expect("catalog payoffs")
}

fn centipede_game() -> (GameForm, PayoffTable) {
    let tree = Tree::node(0, vec![("R", Tree::node(1, vec![("r", Tree::Leaf), ("d", Tree::Leaf)])), ("D", Tree::Leaf)]);
    let g = GameForm::new(vec![Player::core("1"), Player::core("2")], tree).expect("valid tree");
    let t = table(&g, &[("D", ints(&[0, 0])), ("Rd", ints(&[-1, 3])), ("Rr", ints(&[2, 2]))]);
    (g, t)
}

fn pd(shift: i64) -> (GameForm, PayoffTable) {
    let sg = StrategicGame {
        players: vec!["1".into(), "2".into()],
        actions: vec![vec!["S".into(), "C".into()], vec!["S".into(), "C".into()]],
        payoffs: vec![ints(&[3, 3]), ints(&[0, 4]), ints(&[4, 0]), ints(&[1, 1])],
    };
    let (g, t) = strategic_as_extensive(&sg).expect("valid strategic game");
    (g, t.shifted(&rat(shift, 1)))
}

fn bos_game() -> (GameForm, PayoffTable) {
    let sg = StrategicGame {
        players: vec!["1".into(), "2".into()],
        actions: vec![vec!["B".into(), "S".into()], vec!["B".into(), "S".into()]],
        payoffs: vec![ints(&[2, 1]), ints(&[0, 0]), ints(&[0, 0]), ints(&[1, 2])],
    };
    strategic_as_extensive(&sg).expect("valid strategic game")
}

fn chain_store_game() -> (GameForm, PayoffTable) {
    let tree = Tree::node(0, vec![("in", Tree::node(1, vec![("C", Tree::Leaf), ("A", Tree::Leaf)])), ("out", Tree::Leaf)]);
    let g = GameForm::new(vec![Player::outside("LS"), Player::core("CS")], tree).expect("valid tree");
    let t = table(&g, &[("(in,C)", ints(&[2, 2])), ("(in,A)", ints(&[0, 0])), ("(out)", ints(&[1, 5]))]);
    (g, t)
}

pub fn get(id: &str) -> Result<CatalogEntry, CatalogError> {
    let entry = match id {
        "chain-store" => {
            let (game, table) = chain_store_game();
            CatalogEntry {
                id: "chain-store",
                title: "Chain store game",
                game,
                table,
                extra: None,
                connected: vec!["(in,C)", "(in,A)", "(out)"],
                mixed: None,
                interpretation: Some("payoff numbers chosen to realise the stated orders"),
                expectations: chain_store_expectations(),
            }
        }
        "centipede" => {
            let (game, table) = centipede_game();
            CatalogEntry {
                id: "centipede",
                title: "Centipede game",
                game,
                table,
                extra: None,
                connected: vec!["Rr"],
                mixed: None,
                interpretation: None,
                expectations: centipede_expectations(),
            }
        }
        "pd-positive" | "pd-negative" => {
            let positive = id == "pd-positive";
            let (game, table) = pd(if positive { 0 } else { -4 });
            CatalogEntry {
                id: if positive { "pd-positive" } else { "pd-negative" },
                title: if positive { "Prisoner's dilemma" } else { "Prisoner's dilemma, payoffs reduced by 4" },
                game,
                table,
                extra: None,
                connected: vec!["SS", "SC", "CS", "CC"],
                mixed: None,
                interpretation: None,
                expectations: if positive { pd_positive_expectations() } else { pd_negative_expectations() },
            }
        }
        "investment" => {
            let game = single_player(&["I", "N"]);
            let table = table(&game, &[("I", ints(&[-1])), ("N", ints(&[0]))]);
            CatalogEntry {
                id: "investment",
                title: "Ultra long-term investment",
                game,
                table,
                extra: Some(Extra::CompletionBonus { leaf: 0, per_tau: rat(2, 1) }),
                connected: vec!["I", "N"],
                mixed: None,
                interpretation: Some("cost 1 per investing period; investing in every period of a huge horizon adds 2*tau"),
                expectations: investment_expectations(),
            }
        }
        "lifestyle" => {
            let game = single_player(&["E", "A"]);
            let table = table(&game, &[("E", ints(&[1])), ("A", ints(&[0]))]);
            CatalogEntry {
                id: "lifestyle",
                title: "Lifestyle disease",
                game,
                table,
                extra: Some(Extra::LatePenalty { leaf: 0, per_period: rat(2, 1) }),
                connected: vec!["E", "A"],
                mixed: None,
                interpretation: Some(
                    "eating pays 1 now and costs 2 in the distant future unless finitely many periods remain",
                ),
                expectations: lifestyle_expectations(),
            }
        }
        "bos" => {
            let (game, table) = bos_game();
            CatalogEntry {
                id: "bos",
                title: "Bach or Stravinsky",
                game,
                table,
                extra: None,
                connected: vec!["BB", "BS", "SB", "SS"],
                mixed: Some(vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]]),
                interpretation: None,
                expectations: bos_expectations(),
            }
        }
        other => return Err(CatalogError::Unknown(other.to_string())),
    };
    Ok(entry)
}

/// Sorted `above -> below` cover edges of a lifted relation.
pub fn hasse_edges(rel: &LiftedPreference) -> Result<String, String> {
    let h = hasse(rel).map_err(|e| e.to_string())?;
    Ok(h.edge_labels().into_iter().map(|(a, b)| format!("{a} -> {b}")).collect::<Vec<_>>().join("; "))
}

/// The subgame perfect profiles of an expanded game, summarised by the
/// actions each player ever uses.
pub fn spe_summary(game: &GameForm, profiles: &[Profile]) -> String {
    let mut parts = vec![format!("{} profile{}", profiles.len(), if profiles.len() == 1 { "" } else { "s" })];
    if let [only] = profiles {
        for (i, p) in game.players().iter().enumerate() {
            let mut actions: Vec<String> = game
                .owned(i)
                .into_iter()
                .map(|(n, s)| game.node(n).actions[s][only.choice(n, s)].clone())
                .collect();
            actions.sort();
            actions.dedup();
            parts.push(format!("{}: {}", p.name, actions.join("/")));
        }
    }
    parts.join("; ")
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn verdict(entry: &CatalogEntry, horizon: Horizon, family: &str, criterion: &Criterion) -> Result<String, String> {
    let spec = entry.spec(horizon);
    let fam = entry
        .families(horizon)
        .into_iter()
        .find(|f| f.name == family)
        .ok_or_else(|| format!("no family {family}"))?;
    let report = verify_symbolic_spe(&spec, &fam, criterion, None).map_err(err)?;
    Ok(format!("{} {}", report.verdict(), report.on_path_payoffs.join(" ")))
}

const PERSPECTIVE: Horizon = Horizon::Huge(ViewKind::Perspective);
const BIRDSEYE: Horizon = Horizon::Huge(ViewKind::BirdsEye);

fn discount() -> Criterion {
    Criterion::Discounted(rat(1, 5))
}

fn chain_store_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("constituent spe", "LS: ∅→in; CS: in→C", |e| {
            let s = e.spec(Horizon::Finite(1));
            Ok(s.constituent.describe_profile(&s.constituent.constituent_spe().map_err(err)?))
        }),
        Expectation::new("spe n=2 (lifted preferences)", "1 profile; LS@1: in; LS@2: in; CS: C", |e| {
            let spec = e.spec(Horizon::Finite(2));
            let rel = lift_preferences(&spec, 1, &LiftOptions::default()).map_err(err)?;
            let form = build_finite_repeated(&spec).map_err(err)?.with_lifted(&spec, &rel).map_err(err)?;
            let spe: Vec<Profile> = form
                .game
                .all_profiles()
                .map_err(err)?
                .into_iter()
                .filter(|p| form.game.is_spe(p, Semantics::NoStrictImprovement).is_ok())
                .collect();
            Ok(spe_summary(&form.game, &spe))
        }),
        Expectation::new(
            "hasse CS n=2",
            "((in,A), (in,C)) -> ((in,A), (in,A)); ((in,A), (out)) -> ((in,A), (in,C)); ((in,C), (in,A)) -> ((in,A), (in,A)); ((in,C), (in,C)) -> ((in,A), (in,C)); ((in,C), (in,C)) -> ((in,C), (in,A)); ((in,C), (out)) -> ((in,A), (out)); ((in,C), (out)) -> ((in,C), (in,C)); ((out), (in,A)) -> ((in,C), (in,A)); ((out), (in,C)) -> ((in,C), (in,C)); ((out), (in,C)) -> ((out), (in,A)); ((out), (out)) -> ((in,C), (out)); ((out), (out)) -> ((out), (in,C))",
            |e| hasse_edges(&lift_preferences(&e.spec(Horizon::Finite(2)), 1, &LiftOptions::default()).map_err(err)?),
        ),
        Expectation::new(
            "hasse LS n=2",
            "((in,A), (in,C)) -> ((in,A), (out)); ((in,A), (out)) -> ((in,A), (in,A)); ((in,C), (in,A)) -> ((out), (in,A)); ((in,C), (in,C)) -> ((in,C), (out)); ((in,C), (in,C)) -> ((out), (in,C)); ((in,C), (out)) -> ((in,C), (in,A)); ((in,C), (out)) -> ((out), (out)); ((out), (in,A)) -> ((in,A), (in,A)); ((out), (in,C)) -> ((in,A), (in,C)); ((out), (in,C)) -> ((out), (out)); ((out), (out)) -> ((in,A), (out)); ((out), (out)) -> ((out), (in,A))",
            |e| hasse_edges(&lift_preferences(&e.spec(Horizon::Finite(2)), 0, &LiftOptions::default()).map_err(err)?),
        ),
        Expectation::new("limit of means, repeat (out;A)", "verified-on-suite 5", |e| {
            verdict(e, BIRDSEYE, "repeat-nash((out))", &Criterion::LimitOfMeans)
        }),
        Expectation::new("discounted, discount family", "verified-on-suite 5/2", |e| {
            verdict(e, PERSPECTIVE, "discount(fill=first)", &discount())
        }),
    ]
}

fn centipede_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("spe n=5 simple", "1 profile; 1: D; 2: d", |e| {
            let spec = e.spec(Horizon::Finite(5));
            let form = build_finite_repeated(&spec).map_err(err)?.with_criterion(&spec, &Criterion::Simple).map_err(err)?;
            Ok(spe_summary(&form.game, &form.game.backward_induction().map_err(err)?))
        }),
        Expectation::new(
            "leaf payoffs n=5",
            "(0,0) (-1,3) (2,2) (1,5) (4,4) (3,7) (6,6) (5,9) (8,8) (7,11) (10,10)",
            |e| {
                let spec = e.spec(Horizon::Finite(5));
                Ok(centipede_leaf_payoffs(&spec, 5).join(" "))
            },
        ),
        Expectation::new("dynamic consistency, simple", "exact exact", |e| {
            let dc = check_dynamic_consistency(&e.spec(Horizon::Finite(2)), &Criterion::Simple).map_err(err)?;
            Ok(dc.iter().map(|(_, c)| c.to_string()).collect::<Vec<_>>().join(" "))
        }),
        Expectation::new(
            "hasse 1 n=2 (dynamic consistency)",
            "(D) -> (Rd); (Rr), (Rr, D) -> (D); (Rr), (Rr, D) -> (Rr, Rd); (Rr, Rr) -> (Rr), (Rr, D)",
            |e| hasse_edges(&lift_preferences(&e.spec(Horizon::Finite(2)), 0, &dc_options()).map_err(err)?),
        ),
        Expectation::new(
            "hasse 2 n=2 (dynamic consistency)",
            "(Rd) -> (Rr), (Rr, D); (Rr), (Rr, D) -> (D); (Rr, Rd) -> (Rr, Rr); (Rr, Rr) -> (Rr), (Rr, D)",
            |e| hasse_edges(&lift_preferences(&e.spec(Horizon::Finite(2)), 1, &dc_options()).map_err(err)?),
        ),
        Expectation::new("simple sum, always continue", "verified-on-suite +inf +inf", |e| {
            verdict(e, PERSPECTIVE, "simple-sum(target=Rr)", &Criterion::Simple)
        }),
        Expectation::new("overtaking, spe", "verified-on-suite 0 0", |e| {
            verdict(e, PERSPECTIVE, "spe", &Criterion::Overtaking)
        }),
        Expectation::new("overtaking, always continue", "refuted 2*tau 2*tau", |e| {
            verdict(e, PERSPECTIVE, "simple-sum(target=Rr)", &Criterion::Overtaking)
        }),
        Expectation::new("discounted, discount family", "verified-on-suite 0 0", |e| {
            verdict(e, PERSPECTIVE, "discount(fill=first)", &discount())
        }),
        Expectation::new("discounted, always continue", "refuted 5/2 5/2", |e| {
            verdict(e, PERSPECTIVE, "simple-sum(target=Rr)", &discount())
        }),
        Expectation::new("limit of means, quit at half", "verified-on-suite 1 1", |e| {
            verdict(e, BIRDSEYE, "realize-terminal", &Criterion::LimitOfMeans)
        }),
    ]
}

fn dc_options() -> LiftOptions {
    LiftOptions { dynamic_consistency: true, ..Default::default() }
}

/// Leaf payoffs ordered by quitting period, `D` before `Rd`, then `Rr^n`.
pub fn centipede_leaf_payoffs(spec: &RepeatedGameSpec, n: usize) -> Vec<String> {
    let model = spec.payoffs.as_ref().expect("payoffs");
    let mut seqs = Vec::new();
    for k in 0..n {
        for last in [2, 1] {
            let mut s = vec![0; k];
            s.push(last);
            seqs.push(s);
        }
    }
    seqs.push(vec![0; n]);
    seqs.iter()
        .map(|s| {
            let h = spec.finite_history(s, n as u64);
            let v: Vec<String> =
                (0..2).map(|p| simple_total(&h, model, p).expect("perspective history").to_string()).collect();
            format!("({})", v.join(","))
        })
        .collect()
}

fn pd_positive_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("constituent spe", "1: ∅→C; 2: ∅→C", |e| {
            let s = e.spec(Horizon::Finite(1));
            Ok(s.constituent.describe_profile(&s.constituent.constituent_spe().map_err(err)?))
        }),
        Expectation::new(
            "hasse 1 n=2 (simple sum with swaps)",
            "(CC, CC) -> (CC, SC), (SC, CC); (CC, CS), (CS, CC) -> (CC, SS), (SS, CC); (CC, CS), (CS, CC) -> (CS, SC), (SC, CS); (CC, SC), (SC, CC) -> (SC, SC); (CC, SS), (SS, CC) -> (CC, CC); (CC, SS), (SS, CC) -> (SC, SS), (SS, SC); (CS, CS) -> (CS, SS), (SS, CS); (CS, SC), (SC, CS) -> (SC, SS), (SS, SC); (CS, SS), (SS, CS) -> (CC, CS), (CS, CC); (CS, SS), (SS, CS) -> (SS, SS); (SC, SS), (SS, SC) -> (CC, SC), (SC, CC); (SS, SS) -> (CC, SS), (SS, CC)",
            |e| {
                let opts = LiftOptions { identify_swaps: true, ..Default::default() };
                hasse_edges(&lift_preferences(&e.spec(Horizon::Finite(2)), 0, &opts).map_err(err)?)
            },
        ),
        Expectation::new("simple sum, cooperate", "verified-on-suite +inf +inf", |e| {
            verdict(e, PERSPECTIVE, "simple-sum(target=SS)", &Criterion::Simple)
        }),
        Expectation::new("cooperate path", "SS*tau", |e| {
            let spec = e.spec(PERSPECTIVE);
            let fam = family_simple_sum(&spec, "SS").map_err(err)?;
            let path = crate::equilibria::on_path(&spec, &fam, crate::equilibria::DEFAULT_DEPTH);
            Ok(crate::equilibria::render_segments(&spec, path.canonicalize().map_err(err)?.segments()))
        }),
    ]
}

fn pd_negative_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("cooperate constructor", "precondition failed: payoffs not positive: 1 gets -1 at SS", |e| {
            match family_simple_sum(&e.spec(PERSPECTIVE), "SS") {
                Ok(_) => Ok("accepted".into()),
                Err(x) => Ok(x.to_string()),
            }
        }),
        Expectation::new("forced cooperate witness", "refuted -inf vs 0", |e| {
            let spec = e.spec(PERSPECTIVE);
            let fam = family_simple_sum_forced(&spec, "SS").map_err(err)?;
            let report = verify_symbolic_spe(&spec, &fam, &Criterion::Simple, None).map_err(err)?;
            match report.witness() {
                Some(w) => Ok(format!("refuted {} vs {}", w.baseline, w.deviant)),
                None => Ok("verified-on-suite".into()),
            }
        }),
    ]
}

fn investment_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("weak separability n=3", "violated at 1: (N, I, I) vs (I, I, I)", |e| {
            let rel = investment_relation(e, 3);
            match check_weak_separability(&rel, &e.spec(Horizon::Finite(3))) {
                Ok(()) => Ok("holds".into()),
                Err(v) => Ok(format!("violated at {}: {} vs {}", v.position + 1, v.better, v.worse)),
            }
        }),
        Expectation::new("finite n=3, never invest", "verified-on-suite 0", |e| {
            verdict(e, Horizon::Finite(3), "never-invest", &Criterion::Simple)
        }),
        Expectation::new("finite n=3, invest while unbroken", "refuted -3", |e| {
            verdict(e, Horizon::Finite(3), "invest-while-unbroken", &Criterion::Simple)
        }),
        Expectation::new("simple sum, invest while unbroken", "verified-on-suite +inf", |e| {
            verdict(e, PERSPECTIVE, "invest-while-unbroken", &Criterion::Simple)
        }),
        Expectation::new("discounted, never invest", "verified-on-suite 0", |e| {
            verdict(e, PERSPECTIVE, "never-invest", &discount())
        }),
        Expectation::new("discounted, invest while unbroken", "refuted -5/4", |e| {
            verdict(e, PERSPECTIVE, "invest-while-unbroken", &discount())
        }),
    ]
}

/// Finite relation with the completion bonus paid at `n`.
pub fn investment_relation(entry: &CatalogEntry, n: u64) -> LiftedPreference {
    let spec = entry.spec(Horizon::Finite(n));
    let elements = spec.whole_histories().expect("small horizon");
    let values: Vec<Rational> = elements
        .iter()
        .map(|e| {
            let base: Rational = e.iter().map(|l| entry.table.get(*l, 0).clone()).sum();
            let complete = e.len() as u64 == n && e.iter().all(|l| *l == 0);
            if complete {
                base + rat(2 * n as i64, 1)
            } else {
                base
            }
        })
        .collect();
    LiftedPreference::from_values(&spec, 0, elements, &values)
}

fn lifestyle_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("simple sum, avoid until the end", "verified-on-suite 4", |e| {
            verdict(e, PERSPECTIVE, "avoid-until-end", &Criterion::Simple)
        }),
        Expectation::new("simple sum, always eat", "refuted -inf", |e| {
            verdict(e, PERSPECTIVE, "always-eat", &Criterion::Simple)
        }),
        Expectation::new("discounted, always eat", "verified-on-suite 5/4", |e| {
            verdict(e, PERSPECTIVE, "always-eat", &discount())
        }),
        Expectation::new("discounted, avoid until the end", "refuted 0", |e| {
            verdict(e, PERSPECTIVE, "avoid-until-end", &discount())
        }),
    ]
}

fn bos_expectations() -> Vec<Expectation> {
    vec![
        Expectation::new("mixed equilibrium", "((2/3,1/3),(1/3,2/3))", |e| {
            let sigma = e.mixed.as_ref().ok_or("no mixed profile")?;
            let spec = e.spec(BIRDSEYE);
            if !crate::equilibria::is_mixed_nash(&spec, sigma).map_err(err)? {
                return Err("not a mixed equilibrium".into());
            }
            let parts: Vec<String> = sigma
                .iter()
                .map(|s| format!("({})", s.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            Ok(format!("({})", parts.join(",")))
        }),
        Expectation::new("mixed unit", "BB,BB,SB,BS,BS,SS,BS,BS,SS", |e| {
            let sigma = e.mixed.as_ref().ok_or("no mixed profile")?;
            let unit = mixed_unit(sigma).map_err(err)?;
            let actions = &e.game.node(e.game.root()).actions;
            let names: Vec<String> =
                unit.iter().map(|row| row.iter().enumerate().map(|(i, a)| actions[i][*a].clone()).collect()).collect();
            Ok(names.join(","))
        }),
        Expectation::new("limit of means, mixed", "verified-on-suite 2/3 2/3", |e| {
            verdict(e, BIRDSEYE, "mixed", &Criterion::LimitOfMeans)
        }),
        Expectation::new("limit of means, repeat (B,B)", "verified-on-suite 2 1", |e| {
            verdict(e, BIRDSEYE, "repeat-nash(BB)", &Criterion::LimitOfMeans)
        }),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub entry: &'static str,
    pub name: &'static str,
    pub expected: String,
    pub actual: Result<String, String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.actual.as_ref() == Ok(&self.expected)
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.entry, self.name)?;
        if !self.passed() {
            match &self.actual {
                Ok(a) => write!(f, "\n  expected: {}\n  actual:   {a}", self.expected)?,
                Err(e) => write!(f, "\n  expected: {}\n  error:    {e}", self.expected)?,
            }
        }
        Ok(())
    }
}

pub fn run_entry(entry: &CatalogEntry) -> Vec<CheckOutcome> {
    entry
        .expectations
        .iter()
        .map(|x| CheckOutcome { entry: entry.id, name: x.name, expected: x.expected.clone(), actual: x.evaluate(entry) })
        .collect()
}

/// Every expectation of every entry.
pub fn run_all() -> Vec<CheckOutcome> {
    IDS.iter().flat_map(|id| run_entry(&get(id).expect("known id"))).collect()
}

/// One finite-horizon comparison of the suite verdict with exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCase {
    pub entry: &'static str,
    pub n: u64,
    pub criterion: String,
    pub family: String,
    pub exhaustive: bool,
    pub symbolic: bool,
}

impl CrossCase {
    pub fn agrees(&self) -> bool {
        self.exhaustive == self.symbolic
    }
}

impl fmt::Display for CrossCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} {} {}: exhaustive {}, suite {}",
            self.entry, self.n, self.criterion, self.family, self.exhaustive, self.symbolic
        )
    }
}

/// Centipede targets for finite horizons: continue `k` times, then quit.
pub fn centipede_finite_targets(spec: &RepeatedGameSpec, n: u64) -> Vec<StrategyFamily> {
    (0..n)
        .filter_map(|k| {
            let seq: Vec<usize> = std::iter::repeat(0).take(k as usize).chain([2]).collect();
            family_realize_terminal(spec, &spec.finite_history(&seq, n)).ok()
        })
        .collect()
}

/// Checks every finite-horizon family of every entry against
/// [`GameForm::is_spe`] on the expanded game, under the simple sum and
/// discounting by 1/5.
pub fn cross_validate(horizons: std::ops::RangeInclusive<u64>) -> Result<Vec<CrossCase>, String> {
    let mut out = Vec::new();
    for id in IDS {
        let entry = get(id).map_err(err)?;
        for n in horizons.clone() {
            let spec = entry.spec(Horizon::Finite(n));
            let base = build_finite_repeated(&spec).map_err(err)?;
            let mut families = entry.families(Horizon::Finite(n));
            if id == "centipede" {
                families.extend(centipede_finite_targets(&spec, n));
            }
            for criterion in [Criterion::Simple, discount()] {
                let form = base.clone().with_criterion(&spec, &criterion).map_err(err)?;
                for fam in &families {
                    let profile = crate::equilibria::finite_profile(&form, &spec, fam);
                    let exhaustive = form.game.is_spe(&profile, Semantics::NoStrictImprovement).is_ok();
                    let symbolic = verify_symbolic_spe(&spec, fam, &criterion, None).map_err(err)?.verified();
                    out.push(CrossCase {
                        entry: id,
                        n,
                        criterion: criterion.to_string(),
                        family: fam.name.clone(),
                        exhaustive,
                        symbolic,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod test {
    use super::*;

    #[test]
    fn unknown_id() {
        assert!(matches!(get("go"), Err(CatalogError::Unknown(_))));
    }

    #[test]
    fn every_entry_builds() {
        for id in IDS {
            let e = get(id).unwrap();
            assert_eq!(e.id, id);
            let spec = e.spec(Horizon::Finite(1));
            assert!(build_finite_repeated(&spec).is_ok());
            assert!(!e.families(PERSPECTIVE).is_empty());
        }
    }

    #[test]
    fn perturbed_centipede_breaks_its_hasse_expectation() {
        let e = get("centipede").unwrap().with_payoff("Rd", 0, rat(0, 1));
        let x = e.expectations.iter().find(|x| x.name == "hasse 1 n=2 (dynamic consistency)").unwrap();
        assert_ne!(x.evaluate(&e).as_ref(), Ok(&x.expected));
    }

    #[test]
    fn every_expectation_holds() {
        let failed: Vec<String> = run_all().into_iter().filter(|o| !o.passed()).map(|o| o.to_string()).collect();
        assert!(failed.is_empty(), "{}", failed.join("\n"));
    }
}
