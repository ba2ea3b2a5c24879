//! Strategy families over huge horizons and their verification against
//! structured deviation suites.
//!
//! A family is a rule from a [`RuleContext`] (period, position class and the
//! completed prefix) to a constituent profile. The horizon is cut into slots:
//! unit periods where the view distinguishes single periods, and huge runs in
//! between. A huge run is evaluated at its first period and at one generic
//! period, whose outcome fills the rest of the run.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use nonstd::{birdseye_choice_point, rat, NonStdNum, PositionClass, Rational, Segment, Segmented, ViewKind};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::criteria::{simple_total, Criterion, CriterionError, Payload, WholeHistory};
use crate::game::{GameError, GameForm, NodeId, PlayerId, Profile, Semantics, Strategy};
use crate::repeated::{Horizon, RepeatedGameSpec};

/// Near-future and near-end positions probed by the default suite.
pub const DEFAULT_DEPTH: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("profile is not a Nash equilibrium of the constituent: {0}")]
    NotNash(String),
    #[error("bad mixed profile: {0}")]
    BadSigma(String),
    #[error("criterion view {criterion} does not match horizon view {horizon}")]
    ViewMismatch { criterion: ViewKind, horizon: ViewKind },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
}

/// What a rule may look at when choosing the current period's profile.
#[derive(Debug, Clone)]
pub struct RuleContext<'a> {
    pub t: NonStdNum,
    pub horizon: NonStdNum,
    pub class: PositionClass,
    /// Completed periods.
    pub prefix: &'a [Segment<Payload>],
    /// Position within the family's cycle.
    pub phase: usize,
    /// Bird's eye runs: the interval `[lo, hi]` of the horizon holding `t`.
    pub interval: Option<(Rational, Rational)>,
    /// Bird's eye: `t` is the single period patched at the start of an interval.
    pub boundary: bool,
}

impl RuleContext<'_> {
    pub fn remaining_finite(&self) -> bool {
        (&self.horizon - &self.t).is_limited()
    }

    /// Completed periods whose terminal satisfies `pred`.
    pub fn count(&self, pred: impl Fn(usize) -> bool) -> NonStdNum {
        self.prefix
            .iter()
            .filter(|s| matches!(s.payload, Payload::Term(l) if pred(l)))
            .map(|s| s.len.clone())
            .sum()
    }

    pub fn all(&self, pred: impl Fn(usize) -> bool) -> bool {
        self.prefix.iter().all(|s| matches!(s.payload, Payload::Term(l) if pred(l)))
    }
}

type Rule = Arc<dyn Fn(&RuleContext) -> Profile + Send + Sync>;

/// A strategy profile of the repeated game given by a decision rule.
#[derive(Clone)]
pub struct StrategyFamily {
    pub name: String,
    /// Bird's eye cut points in (0, 1).
    pub breakpoints: Vec<Rational>,
    /// Length of the play cycle; 1 for stationary rules.
    pub cycle: usize,
    pub notes: Vec<String>,
    /// The same family with its arbitrary choices filled differently.
    pub alternative: Option<Box<StrategyFamily>>,
    rule: Rule,
}

impl fmt::Debug for StrategyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrategyFamily")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .field("cycle", &self.cycle)
            .finish_non_exhaustive()
    }
}

impl StrategyFamily {
    pub fn new(name: &str, rule: impl Fn(&RuleContext) -> Profile + Send + Sync + 'static) -> Self {
        StrategyFamily {
            name: name.to_string(),
            breakpoints: vec![],
            cycle: 1,
            notes: vec![],
            alternative: None,
            rule: Arc::new(rule),
        }
    }

    pub fn with_breakpoints(mut self, mut cuts: Vec<Rational>) -> Self {
        cuts.retain(|c| c.is_positive() && c < &Rational::one());
        cuts.sort();
        cuts.dedup();
        self.breakpoints = cuts;
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }

    pub fn decide(&self, ctx: &RuleContext) -> Profile {
        (self.rule)(ctx)
    }
}

/// Profile that plays toward `leaf` on its path and `fallback` elsewhere.
pub fn path_profile(g: &GameForm, leaf: NodeId, fallback: &Profile) -> Profile {
    let mut p = fallback.clone();
    let mut child = leaf;
    while let Some(parent) = g.node(child).parent {
        for (slot, a) in g.joint_of(child).into_iter().enumerate() {
            p.set(parent, slot, a);
        }
        child = parent;
    }
    p
}

/// Profile of a strategic constituent (a single joint root).
pub fn strategic_profile(g: &GameForm, joint: &[usize]) -> Profile {
    let mut p = g.first_profile();
    for (slot, a) in joint.iter().enumerate() {
        p.set(g.root(), slot, *a);
    }
    p
}

fn constituent_spe(spec: &RepeatedGameSpec) -> Result<Profile, EquilibriumError> {
    Ok(spec.constituent.constituent_spe()?)
}

/// `s*^τ`: the constituent equilibrium in every period.
pub fn family_repeat_spe(spec: &RepeatedGameSpec) -> Result<StrategyFamily, EquilibriumError> {
    let s = constituent_spe(spec)?;
    Ok(StrategyFamily::new("spe", move |_| s.clone()))
}

/// The same constituent profile in every period.
pub fn family_constant(name: &str, profile: Profile) -> StrategyFamily {
    StrategyFamily::new(name, move |_| profile.clone())
}

fn is_strategic(g: &GameForm) -> bool {
    g.node(g.root()).movers.len() > 1 && g.node(g.root()).children.iter().all(|c| g.node(*c).is_leaf())
}

/// Play along `target` unless only finitely many periods remain and only
/// finitely many target periods were completed; then play `s*`.
pub fn family_simple_sum(spec: &RepeatedGameSpec, target: &str) -> Result<StrategyFamily, EquilibriumError> {
    let g = &spec.constituent;
    let leaf = g.leaf_by_name(target).ok_or_else(|| EquilibriumError::Precondition(format!("unknown terminal {target}")))?;
    let index = g.leaf_index(leaf).expect("leaf");
    if !spec.is_connected(index) {
        return Err(EquilibriumError::Precondition(format!("{target} is not connected")));
    }
    if g.players().iter().any(|p| p.outside) {
        return Err(EquilibriumError::Precondition("outside players present".into()));
    }
    let table = &spec.payoffs.as_ref().ok_or_else(|| EquilibriumError::Precondition("no payoffs".into()))?.table;
    if let Some(p) = g.core_players().into_iter().find(|p| !table.get(index, *p).is_positive()) {
        return Err(EquilibriumError::Precondition(format!(
            "payoffs not positive: {} gets {} at {target}",
            g.players()[p].name,
            table.get(index, p)
        )));
    }
    simple_sum(spec, target, "simple-sum")
}

/// [`family_simple_sum`] without its payoff precondition.
pub fn family_simple_sum_forced(spec: &RepeatedGameSpec, target: &str) -> Result<StrategyFamily, EquilibriumError> {
    simple_sum(spec, target, "simple-sum-forced")
}

fn simple_sum(spec: &RepeatedGameSpec, target: &str, label: &str) -> Result<StrategyFamily, EquilibriumError> {
    let g = spec.constituent.clone();
    let leaf = g.leaf_by_name(target).ok_or_else(|| EquilibriumError::Precondition(format!("unknown terminal {target}")))?;
    let index = g.leaf_index(leaf).expect("leaf");
    let s = constituent_spe(spec)?;
    let along = path_profile(&g, leaf, &s);
    // strategic constituents count a period when any player's component
    // matches the target's; extensive ones need the terminal itself
    let counts: Vec<bool> = if is_strategic(&g) {
        let want = g.joint_of(leaf);
        g.leaves().iter().map(|z| g.joint_of(*z).iter().zip(&want).any(|(a, b)| a == b)).collect()
    } else {
        (0..g.leaves().len()).map(|z| z == index).collect()
    };
    let name = format!("{label}(target={target})");
    Ok(StrategyFamily::new(&name, move |ctx| {
        if ctx.remaining_finite() && ctx.count(|z| counts[z]).is_limited() {
            s.clone()
        } else {
            along.clone()
        }
    }))
}

fn fill_profile(g: &GameForm, last: bool) -> Profile {
    g.profile_with(|_, _, actions| if last { actions.len() - 1 } else { 0 })
}

/// `s*` in the near future, a fixed arbitrary profile everywhere else.
pub fn family_discount(spec: &RepeatedGameSpec, delta: &Rational) -> Result<StrategyFamily, EquilibriumError> {
    Criterion::discounted(delta.clone())?;
    let s = constituent_spe(spec)?;
    let build = |fill: Profile, label: &str| {
        let s = s.clone();
        StrategyFamily::new(&format!("discount({label})"), move |ctx| match ctx.class {
            PositionClass::NearFuture(_) => s.clone(),
            _ => fill.clone(),
        })
    };
    let g = &spec.constituent;
    let mut family = build(fill_profile(g, false), "fill=first")
        .with_note("beyond the near future every node plays its first declared action");
    family.alternative = Some(Box::new(build(fill_profile(g, true), "fill=last")));
    Ok(family)
}

/// A constituent Nash profile in every period.
pub fn family_repeat_nash(spec: &RepeatedGameSpec, profile: &Profile) -> Result<StrategyFamily, EquilibriumError> {
    let g = &spec.constituent;
    if let Err(w) = g.is_nash(profile, Semantics::NoStrictImprovement) {
        return Err(EquilibriumError::NotNash(format!("{} improves", g.players()[w.player].name)));
    }
    if spec.connected.len() != g.leaves().len() {
        return Err(EquilibriumError::Precondition("every terminal must be connected".into()));
    }
    let name = format!("repeat-nash({})", g.terminal_name(g.outcome(profile)));
    Ok(family_constant(&name, profile.clone()))
}

/// `base` except at the listed bird's eye boundary points.
pub fn family_finite_switch(base: &StrategyFamily, switches: Vec<(Rational, Profile)>) -> StrategyFamily {
    let cuts: Vec<Rational> = base.breakpoints.iter().cloned().chain(switches.iter().map(|(q, _)| q.clone())).collect();
    let inner = base.clone();
    let mut family = StrategyFamily::new(&format!("{}+switch", base.name), move |ctx| {
        if ctx.boundary {
            if let Some((lo, _)) = &ctx.interval {
                if let Some((_, p)) = switches.iter().find(|(q, _)| q == lo) {
                    return p.clone();
                }
            }
        }
        inner.decide(ctx)
    })
    .with_breakpoints(cuts);
    family.cycle = base.cycle;
    family
}

/// Deterministic action cycle whose frequencies reproduce `sigma`, one row
/// of action indices per period.
pub fn mixed_unit(sigma: &[Vec<Rational>]) -> Result<Vec<Vec<usize>>, EquilibriumError> {
    for (i, s) in sigma.iter().enumerate() {
        let total: Rational = s.iter().cloned().sum();
        if total != Rational::one() || s.iter().any(|p| p.is_negative()) {
            return Err(EquilibriumError::BadSigma(format!("player {} sums to {total}", i + 1)));
        }
    }
    let m = sigma.iter().flatten().fold(num_bigint::BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let m = m.to_u64().ok_or_else(|| EquilibriumError::BadSigma("denominators too large".into()))?;
    let players = sigma.len() as u32;
    let len = m.checked_pow(players).filter(|l| *l <= 1 << 20).ok_or_else(|| EquilibriumError::BadSigma("unit too long".into()))?;
    let mut unit = Vec::with_capacity(len as usize);
    for t in 1..=len {
        let row = sigma
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let block = m.pow(i as u32 + 1);
                let repeats = (t - 1) / block;
                let x = rat(t as i64, block as i64) - Rational::from_integer(repeats.into());
                let mut below = Rational::zero();
                for (j, p) in s.iter().enumerate() {
                    if x > below && x <= &below + p {
                        return j;
                    }
                    below += p;
                }
                s.len() - 1
            })
            .collect();
        unit.push(row);
    }
    Ok(unit)
}

/// Expected payoffs of a strategic constituent under independent mixing.
pub fn expected_payoffs(spec: &RepeatedGameSpec, sigma: &[Vec<Rational>]) -> Result<Vec<Rational>, EquilibriumError> {
    let g = &spec.constituent;
    let table = &spec.payoffs.as_ref().ok_or_else(|| EquilibriumError::Precondition("no payoffs".into()))?.table;
    let root = g.node(g.root());
    let mut out = vec![Rational::zero(); g.players().len()];
    for child in &root.children {
        let joint = g.joint_of(*child);
        let weight: Rational = joint.iter().enumerate().map(|(slot, a)| sigma[slot][*a].clone()).product();
        let leaf = g.leaf_index(*child).expect("strategic child is terminal");
        for (slot, p) in root.movers.iter().enumerate() {
            out[slot] += &weight * table.get(leaf, *p);
        }
    }
    Ok(out)
}

/// Whether no player gains by a pure action against the others' mixing.
pub fn is_mixed_nash(spec: &RepeatedGameSpec, sigma: &[Vec<Rational>]) -> Result<bool, EquilibriumError> {
    let g = &spec.constituent;
    if !is_strategic(g) || sigma.len() != g.node(g.root()).movers.len() {
        return Err(EquilibriumError::Precondition("mixed profiles need a strategic constituent".into()));
    }
    let base = expected_payoffs(spec, sigma)?;
    for (slot, actions) in g.node(g.root()).actions.iter().enumerate() {
        if sigma[slot].len() != actions.len() {
            return Err(EquilibriumError::BadSigma(format!("player {} needs {} weights", slot + 1, actions.len())));
        }
        for a in 0..actions.len() {
            let mut pure = sigma.to_vec();
            pure[slot] = (0..actions.len()).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect();
            if expected_payoffs(spec, &pure)?[slot] > base[slot] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Cycle the mixed unit of `sigma` by period index.
pub fn family_mixed(spec: &RepeatedGameSpec, sigma: &[Vec<Rational>]) -> Result<StrategyFamily, EquilibriumError> {
    if !is_mixed_nash(spec, sigma)? {
        return Err(EquilibriumError::NotNash("mixed profile".into()));
    }
    let unit = mixed_unit(sigma)?;
    let g = spec.constituent.clone();
    let profiles: Vec<Profile> = unit.iter().map(|row| strategic_profile(&g, row)).collect();
    let mut family = StrategyFamily::new("mixed", move |ctx| profiles[ctx.phase % profiles.len()].clone());
    family.cycle = unit.len();
    Ok(family)
}

/// Payload of `target` at period `t`.
fn payload_at(target: &WholeHistory, t: &NonStdNum) -> Payload {
    for (seg, start) in target.segments().iter().zip(target.starts()) {
        if &start <= t && t < &(&start + &seg.len) {
            return seg.payload.clone();
        }
    }
    Payload::Empty
}

/// Whether the completed periods agree with `target`.
fn agrees(prefix: &[Segment<Payload>], target: &WholeHistory) -> bool {
    let mut at = NonStdNum::int(1);
    let runs: Vec<(NonStdNum, NonStdNum, &Payload)> = target
        .segments()
        .iter()
        .zip(target.starts())
        .map(|(s, start)| (start.clone(), &start + &s.len, &s.payload))
        .collect();
    for seg in prefix {
        let end = &at + &seg.len;
        for (lo, hi, p) in &runs {
            if lo < &end && &at < hi && *p != &seg.payload {
                return false;
            }
        }
        at = end;
    }
    true
}

/// Realize `target`: nodes on the path to its terminal of the current
/// period play along; any earlier departure, or the end of the target,
/// switches everyone to `s*`.
pub fn family_realize_terminal(spec: &RepeatedGameSpec, target: &WholeHistory) -> Result<StrategyFamily, EquilibriumError> {
    let g = spec.constituent.clone();
    let core = g.core_players();
    if core.len() < 2 {
        return Err(EquilibriumError::Precondition("needs two core players".into()));
    }
    if spec.connected.len() != 1 {
        return Err(EquilibriumError::Precondition("connected set must be a singleton".into()));
    }
    let c = g.leaves()[spec.connected[0]];
    for p in &core {
        let mut can_quit = false;
        let mut child = c;
        while let Some(parent) = g.node(child).parent {
            if g.node(parent).movers.contains(p) {
                can_quit |= g.node(parent).children.iter().any(|k| *k != child && g.node(*k).is_leaf());
            }
            child = parent;
        }
        if !can_quit {
            return Err(EquilibriumError::Precondition(format!("{} cannot terminate", g.players()[*p].name)));
        }
    }
    let table = &spec.payoffs.as_ref().ok_or_else(|| EquilibriumError::Precondition("no payoffs".into()))?.table;
    if core.iter().any(|p| !table.get(spec.connected[0], *p).is_positive()) {
        return Err(EquilibriumError::Precondition("payoffs on the connected terminal must be positive".into()));
    }
    let s = constituent_spe(spec)?;
    let along: Vec<Profile> = g.leaves().iter().map(|z| path_profile(&g, *z, &s)).collect();
    let cuts: Vec<Rational> = target.starts().iter().map(|t| t.tau_coef().clone()).collect();
    let target = target.clone();
    Ok(StrategyFamily::new("realize-terminal", move |ctx| {
        if !agrees(ctx.prefix, &target) {
            return s.clone();
        }
        match payload_at(&target, &ctx.t) {
            Payload::Term(z) => along[z].clone(),
            _ => s.clone(),
        }
    })
    .with_breakpoints(cuts))
}

/// A stretch of periods treated alike by the simulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub start: NonStdNum,
    pub len: NonStdNum,
    pub class: PositionClass,
    /// Class of the periods after the first.
    pub generic: PositionClass,
    pub interval: Option<(Rational, Rational)>,
    pub boundary: bool,
}

impl Slot {
    fn unit(start: NonStdNum, class: PositionClass) -> Self {
        Slot { start, len: NonStdNum::int(1), generic: class.clone(), class, interval: None, boundary: false }
    }
}

fn dyadic_point(q: &Rational) -> Option<PositionClass> {
    (0..=24u32).find_map(|i| {
        let den = if i < 2 { 1 } else { 1u64 << (i - 2) };
        (0..den).find(|j| birdseye_choice_point(i, *j).ok().as_ref() == Some(q)).map(|j| PositionClass::MonadPoint(i, j))
    })
}

/// The slot layout of a horizon for a family; `depth` is the number of
/// near-future and near-end positions beyond the first.
pub fn slots(horizon: Horizon, family: &StrategyFamily, depth: u64) -> Vec<Slot> {
    let k = depth + 1;
    let tau = NonStdNum::tau();
    match horizon {
        Horizon::Finite(n) => (1..=n).map(|t| Slot::unit(NonStdNum::int(t as i64), PositionClass::NearFuture(t - 1))).collect(),
        Horizon::Huge(ViewKind::Perspective) => {
            let half = tau.scale(&rat(1, 2));
            let kk = NonStdNum::int(k as i64);
            let mut out: Vec<Slot> = (1..=k).map(|t| Slot::unit(NonStdNum::int(t as i64), PositionClass::NearFuture(t - 1))).collect();
            out.push(Slot {
                start: NonStdNum::int(k as i64 + 1),
                len: &(&half - &kk) - &NonStdNum::int(1),
                class: PositionClass::NearFuture(k),
                generic: PositionClass::DistantFuture,
                interval: None,
                boundary: false,
            });
            out.push(Slot::unit(half.clone(), PositionClass::DistantFuture));
            out.push(Slot {
                start: &half + &NonStdNum::int(1),
                len: &half - &kk,
                class: PositionClass::DistantFuture,
                generic: PositionClass::DistantFuture,
                interval: None,
                boundary: false,
            });
            for j in (0..k).rev() {
                out.push(Slot::unit(&tau - &NonStdNum::int(j as i64), PositionClass::NearEnd(j)));
            }
            out
        }
        Horizon::Huge(ViewKind::BirdsEye) => {
            let mut cuts = vec![Rational::zero()];
            cuts.extend(family.breakpoints.iter().cloned());
            cuts.push(Rational::one());
            let mut out = Vec::new();
            let last = cuts.len() - 2;
            for (k, w) in cuts.windows(2).enumerate() {
                let (lo, hi) = (w[0].clone(), w[1].clone());
                let interval = Some((lo.clone(), hi.clone()));
                let patch = dyadic_point(&lo).unwrap_or(PositionClass::FractionInterval(lo.clone(), hi.clone()));
                let base = NonStdNum::affine(lo.clone(), Rational::zero());
                out.push(Slot {
                    start: &base + &NonStdNum::int(1),
                    len: NonStdNum::int(1),
                    class: patch.clone(),
                    generic: patch,
                    interval: interval.clone(),
                    boundary: true,
                });
                let trim = if k == last { 2 } else { 1 };
                let class = PositionClass::FractionInterval(lo.clone(), hi.clone());
                out.push(Slot {
                    start: &base + &NonStdNum::int(2),
                    len: &NonStdNum::affine(&hi - &lo, Rational::zero()) - &NonStdNum::int(trim),
                    class: class.clone(),
                    generic: class,
                    interval,
                    boundary: false,
                });
            }
            let lo = cuts[cuts.len() - 2].clone();
            out.push(Slot {
                start: tau.clone(),
                len: NonStdNum::int(1),
                class: PositionClass::MonadPoint(1, 0),
                generic: PositionClass::MonadPoint(1, 0),
                interval: Some((lo, Rational::one())),
                boundary: true,
            });
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// The deviating period only.
    OneShot,
    /// The deviating period and every later one.
    Tail,
    /// Every period from the root of the repeated game.
    Whole,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::OneShot => "one-shot",
            Scope::Tail => "tail",
            Scope::Whole => "whole",
        })
    }
}

/// One unilateral deviation from a subgame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub slot: usize,
    pub position: String,
    /// Completed periods before the subgame.
    pub prefix: Vec<Segment<Payload>>,
    /// Constituent node where the subgame starts within its period.
    pub node: NodeId,
    pub player: PlayerId,
    pub strategy: Strategy,
    pub scope: Scope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationSuite {
    pub depth: u64,
    pub deviations: Vec<Deviation>,
}

struct Engine<'a> {
    spec: &'a RepeatedGameSpec,
    family: &'a StrategyFamily,
    slots: Vec<Slot>,
    horizon: NonStdNum,
    view: ViewKind,
}

impl<'a> Engine<'a> {
    fn new(spec: &'a RepeatedGameSpec, family: &'a StrategyFamily, depth: u64) -> Self {
        Engine {
            spec,
            family,
            slots: slots(spec.horizon, family, depth),
            horizon: spec.horizon.length(),
            view: spec.horizon.view(),
        }
    }

    fn phase(&self, t: &NonStdNum) -> usize {
        let m = self.family.cycle as i64;
        let unit = t.unit_coef().to_integer().to_i64().unwrap_or(0);
        (unit - 1).rem_euclid(m) as usize
    }

    fn decide(&self, slot: &Slot, t: NonStdNum, class: PositionClass, prefix: &[Segment<Payload>], phase: usize) -> Profile {
        let ctx = RuleContext {
            t,
            horizon: self.horizon.clone(),
            class,
            prefix,
            phase,
            interval: slot.interval.clone(),
            boundary: slot.boundary,
        };
        self.family.decide(&ctx)
    }

    fn play(&self, profile: &Profile, from: NodeId, deviation: Option<&Strategy>) -> usize {
        let g = &self.spec.constituent;
        let profile = match deviation {
            Some(s) => profile.with_strategy(s),
            None => profile.clone(),
        };
        g.leaf_index(g.outcome_from(from, &profile)).expect("leaf")
    }

    /// Continue play from `slot` at constituent node `node`. With `force`,
    /// unconnected outcomes are replaced by a connected one, and play stops
    /// before slot `until`.
    fn run(
        &self,
        slot: usize,
        prefix: &[Segment<Payload>],
        node: NodeId,
        deviation: Option<(&Strategy, Scope)>,
        force: bool,
        until: usize,
    ) -> Vec<Segment<Payload>> {
        let root = self.spec.constituent.root();
        let mut segs = prefix.to_vec();
        let mut ended = false;
        for s in slot..until {
            let info = &self.slots[s];
            if ended {
                push(&mut segs, info.len.clone(), Payload::Empty);
                continue;
            }
            let active = |first: bool| match deviation {
                Some((strategy, Scope::OneShot)) if first && s == slot => Some(strategy),
                Some((strategy, Scope::Tail | Scope::Whole)) => Some(strategy),
                _ => None,
            };
            let from = if s == slot { node } else { root };
            let profile = self.decide(info, info.start.clone(), info.class.clone(), &segs, self.phase(&info.start));
            let mut leaf = self.play(&profile, from, active(true));
            if force && !self.spec.is_connected(leaf) {
                leaf = self.spec.connected[0];
            }
            push(&mut segs, NonStdNum::int(1), Payload::Term(leaf));
            let last_period = &info.start == &self.horizon;
            if !self.spec.is_connected(leaf) || last_period {
                ended = true;
            }
            let rest = &info.len - &NonStdNum::int(1);
            if rest == NonStdNum::zero() {
                continue;
            }
            if ended {
                push(&mut segs, rest, Payload::Empty);
                continue;
            }
            let t = &info.start + &NonStdNum::int(1);
            let phases = if rest.is_limited() { 1 } else { self.family.cycle };
            let first_phase = self.phase(&t);
            let mut leaves = Vec::with_capacity(phases);
            let snapshot = segs.clone();
            for p in 0..phases {
                let profile = self.decide(info, t.clone(), info.generic.clone(), &snapshot, (first_phase + p) % self.family.cycle);
                let mut z = self.play(&profile, root, active(false));
                if force && !self.spec.is_connected(z) {
                    z = self.spec.connected[0];
                }
                leaves.push(z);
            }
            match leaves.iter().find(|z| !self.spec.is_connected(**z)) {
                Some(z) => {
                    push(&mut segs, NonStdNum::int(1), Payload::Term(*z));
                    ended = true;
                    let left = &rest - &NonStdNum::int(1);
                    if left != NonStdNum::zero() {
                        push(&mut segs, left, Payload::Empty);
                    }
                }
                None if leaves.iter().all(|z| *z == leaves[0]) => push(&mut segs, rest, Payload::Term(leaves[0])),
                None => push(&mut segs, rest, Payload::Cycle(leaves)),
            }
        }
        segs
    }

    fn whole(&self, segs: Vec<Segment<Payload>>) -> WholeHistory {
        Segmented::with_horizon(self.view, self.horizon.clone(), segs).expect("valid run lengths")
    }

    /// Outcome of the deviating period alone.
    fn period_outcome(&self, d: &Deviation, deviation: Option<&Strategy>) -> usize {
        let info = &self.slots[d.slot];
        let profile = self.decide(info, info.start.clone(), info.class.clone(), &d.prefix, self.phase(&info.start));
        self.play(&profile, d.node, deviation)
    }
}

fn push(segs: &mut Vec<Segment<Payload>>, len: NonStdNum, payload: Payload) {
    match segs.last_mut() {
        Some(last) if last.payload == payload => last.len = &last.len + &len,
        _ => segs.push(Segment::new(len, payload)),
    }
}

/// Every sequence of `len` connected terminals.
fn connected_sequences(spec: &RepeatedGameSpec, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                spec.connected.iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(*c);
                    q
                })
            })
            .collect();
    }
    out
}

/// Deviations probing each slot of the layout from the forced on-path
/// prefix and from prefixes perturbed in the first period, plus whole-game
/// switches to every pure constituent strategy. Finite horizons use every
/// connected prefix instead.
pub fn default_suite(spec: &RepeatedGameSpec, family: &StrategyFamily, depth: u64) -> DeviationSuite {
    let engine = Engine::new(spec, family, depth);
    let g = &spec.constituent;
    let mut deviations = Vec::new();
    for (s, info) in engine.slots.iter().enumerate() {
        let mut prefixes: Vec<Vec<Segment<Payload>>> = match spec.horizon {
            Horizon::Finite(_) => connected_sequences(spec, s)
                .into_iter()
                .map(|seq| seq.into_iter().map(|l| Segment::new(NonStdNum::int(1), Payload::Term(l))).collect())
                .collect(),
            Horizon::Huge(_) => {
                let mut out = vec![engine.run(0, &[], g.root(), None, true, s)];
                if s > 0 {
                    for c in &spec.connected {
                        let first = vec![Segment::new(NonStdNum::int(1), Payload::Term(*c))];
                        let mut rest = engine.run(1, &first, g.root(), None, true, s);
                        rest.dedup();
                        out.push(rest);
                    }
                }
                out
            }
        };
        prefixes.sort_by_key(|p| format!("{p:?}"));
        prefixes.dedup();
        for prefix in prefixes {
            for node in g.nonterminals() {
                for (player, p) in g.players().iter().enumerate() {
                    let scopes: &[Scope] = if p.outside { &[Scope::OneShot] } else { &[Scope::OneShot, Scope::Tail] };
                    for strategy in g.pure_strategies(player) {
                        for scope in scopes {
                            deviations.push(Deviation {
                                slot: s,
                                position: info.class.to_string(),
                                prefix: prefix.clone(),
                                node,
                                player,
                                strategy: strategy.clone(),
                                scope: *scope,
                            });
                        }
                    }
                }
            }
        }
    }
    for player in g.core_players() {
        for strategy in g.pure_strategies(player) {
            deviations.push(Deviation {
                slot: 0,
                position: "root".into(),
                prefix: vec![],
                node: g.root(),
                player,
                strategy,
                scope: Scope::Whole,
            });
        }
    }
    DeviationSuite { depth, deviations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationResult {
    pub deviation: Deviation,
    pub baseline: String,
    pub deviant: String,
    /// Deviant against baseline, for the deviator.
    pub ordering: Ordering,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub family: String,
    pub criterion: String,
    pub horizon: String,
    pub on_path: String,
    pub on_path_payoffs: Vec<String>,
    pub results: Vec<DeviationResult>,
    /// Index of the first strictly improving deviation.
    pub witness: Option<usize>,
    /// Verdict of the alternative fill, when the family has one.
    pub alternative: Option<bool>,
    pub notes: Vec<String>,
}

impl EquilibriumReport {
    pub fn verified(&self) -> bool {
        self.witness.is_none()
    }

    pub fn verdict(&self) -> &'static str {
        if self.verified() {
            "verified-on-suite"
        } else {
            "refuted"
        }
    }

    pub fn witness(&self) -> Option<&DeviationResult> {
        self.witness.map(|k| &self.results[k])
    }

    pub fn summary(&self) -> String {
        match self.witness() {
            None => format!("{} {} under {}: {}", self.family, self.horizon, self.criterion, self.verdict()),
            Some(w) => format!(
                "{} {} under {}: refuted by player {} {} at {} ({} vs {})",
                self.family,
                self.horizon,
                self.criterion,
                w.deviation.player,
                w.deviation.scope,
                w.deviation.position,
                w.deviant,
                w.baseline
            ),
        }
    }

    /// Key-value text, one line per deviation.
    pub fn to_text(&self, spec: &RepeatedGameSpec) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "family: {}", self.family);
        let _ = writeln!(out, "criterion: {}", self.criterion);
        let _ = writeln!(out, "horizon: {}", self.horizon);
        let _ = writeln!(out, "verdict: {}", self.verdict());
        let _ = writeln!(out, "on_path: {}", self.on_path);
        let _ = writeln!(out, "payoffs: {}", self.on_path_payoffs.join(" "));
        if let Some(alt) = self.alternative {
            let _ = writeln!(out, "alternative_fill: {}", if alt { "verified-on-suite" } else { "refuted" });
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        if let Some(w) = self.witness() {
            let _ = writeln!(out, "witness: {}", describe_result(spec, w));
        }
        let _ = writeln!(out, "deviations: {}", self.results.len());
        for r in &self.results {
            let _ = writeln!(out, "  {}", describe_result(spec, r));
        }
        out
    }
}

/// One deviation result as `key=value` fields.
pub fn describe_result(spec: &RepeatedGameSpec, r: &DeviationResult) -> String {
    let g = &spec.constituent;
    let d = &r.deviation;
    let moves: Vec<String> =
        d.strategy.choices.iter().map(|(n, s, a)| format!("{}→{}", g.history_string(*n), g.node(*n).actions[*s][*a])).collect();
    let order = match r.ordering {
        Ordering::Greater => "better",
        Ordering::Equal => "equal",
        Ordering::Less => "worse",
    };
    format!(
        "position={} prefix={} node={} player={} strategy=[{}] scope={} baseline={} deviant={} order={}",
        d.position,
        render_segments(spec, &d.prefix),
        g.history_string(d.node),
        g.players()[d.player].name,
        moves.join(" "),
        d.scope,
        r.baseline,
        r.deviant,
        order
    )
}

/// `Rr*1/2*tau, D*1, -*1/2*tau - 1` style rendering.
pub fn render_segments(spec: &RepeatedGameSpec, segs: &[Segment<Payload>]) -> String {
    if segs.is_empty() {
        return "∅".into();
    }
    let parts: Vec<String> = segs
        .iter()
        .map(|s| {
            let name = match &s.payload {
                Payload::Empty => "-".to_string(),
                Payload::Term(l) => spec.leaf_name(*l),
                Payload::Cycle(ls) => format!("[{}]", ls.iter().map(|l| spec.leaf_name(*l)).collect::<Vec<_>>().join(" ")),
            };
            format!("{name}*{}", s.len)
        })
        .collect();
    parts.join(", ")
}

fn render_value(criterion: &Criterion, h: &WholeHistory, spec: &RepeatedGameSpec, player: PlayerId) -> Result<String, EquilibriumError> {
    let payoffs = spec.payoffs.as_ref().ok_or_else(|| EquilibriumError::Precondition("no payoffs".into()))?;
    Ok(match criterion.value(h, payoffs, player)? {
        Some(v) => v.to_string(),
        None => simple_total(h, payoffs, player)?.to_string(),
    })
}

/// Check `family` against a deviation suite under `criterion`.
pub fn verify_symbolic_spe(
    spec: &RepeatedGameSpec,
    family: &StrategyFamily,
    criterion: &Criterion,
    suite: Option<&DeviationSuite>,
) -> Result<EquilibriumReport, EquilibriumError> {
    let owned;
    let suite = match suite {
        Some(s) => s,
        None => {
            owned = default_suite(spec, family, DEFAULT_DEPTH);
            &owned
        }
    };
    let view = spec.horizon.view();
    if criterion.view() != view {
        return Err(EquilibriumError::ViewMismatch { criterion: criterion.view(), horizon: view });
    }
    let payoffs = spec.payoffs.as_ref().ok_or_else(|| EquilibriumError::Precondition("no payoffs".into()))?;
    let engine = Engine::new(spec, family, suite.depth);
    let g = &spec.constituent;
    let until = engine.slots.len();
    let path = engine.whole(engine.run(0, &[], g.root(), None, false, until));
    let on_path_payoffs = g
        .core_players()
        .into_iter()
        .map(|p| render_value(criterion, &path, spec, p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut results = Vec::with_capacity(suite.deviations.len());
    let mut witness = None;
    for d in &suite.deviations {
        if d.slot >= until {
            return Err(EquilibriumError::Precondition(format!("deviation slot {} outside the layout", d.slot)));
        }
        let result = if g.players()[d.player].outside {
            let base = engine.period_outcome(d, None);
            let dev = engine.period_outcome(d, Some(&d.strategy));
            let pref = g.preference(d.player);
            let ordering = match (pref.weakly(dev, base), pref.weakly(base, dev)) {
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                _ => Ordering::Equal,
            };
            DeviationResult { deviation: d.clone(), baseline: spec.leaf_name(base), deviant: spec.leaf_name(dev), ordering }
        } else {
            let base = engine.whole(engine.run(d.slot, &d.prefix, d.node, None, false, until));
            let dev = engine.whole(engine.run(d.slot, &d.prefix, d.node, Some((&d.strategy, d.scope)), false, until));
            let ordering = criterion.compare(&dev, &base, payoffs, d.player)?;
            DeviationResult {
                deviation: d.clone(),
                baseline: render_value(criterion, &base, spec, d.player)?,
                deviant: render_value(criterion, &dev, spec, d.player)?,
                ordering,
            }
        };
        if witness.is_none() && result.ordering == Ordering::Greater {
            witness = Some(results.len());
        }
        results.push(result);
    }
    let alternative = match &family.alternative {
        Some(alt) => {
            let alt_suite = default_suite(spec, alt, suite.depth);
            Some(verify_symbolic_spe(spec, alt, criterion, Some(&alt_suite))?.verified())
        }
        None => None,
    };
    let horizon = match spec.horizon {
        Horizon::Finite(n) => format!("n={n}"),
        Horizon::Huge(v) => format!("huge:{v}"),
    };
    Ok(EquilibriumReport {
        family: family.name.clone(),
        criterion: criterion.to_string(),
        horizon,
        on_path: render_segments(spec, path.segments()),
        on_path_payoffs,
        results,
        witness,
        alternative,
        notes: family.notes.clone(),
    })
}

/// On-path whole history of a family.
pub fn on_path(spec: &RepeatedGameSpec, family: &StrategyFamily, depth: u64) -> WholeHistory {
    let engine = Engine::new(spec, family, depth);
    let until = engine.slots.len();
    engine.whole(engine.run(0, &[], spec.constituent.root(), None, false, until))
}

/// The repeated-game profile a family induces on a finite expansion.
pub fn finite_profile(form: &crate::repeated::RepeatedForm, spec: &RepeatedGameSpec, family: &StrategyFamily) -> Profile {
    let g = &spec.constituent;
    let n = spec.horizon.length();
    form.game.profile_with(|node, player, _| {
        let (t, x, comps) = &form.position[node];
        let prefix: Vec<Segment<Payload>> =
            comps.iter().map(|l| Segment::new(NonStdNum::int(1), Payload::Term(*l))).collect();
        let ctx = RuleContext {
            t: NonStdNum::int(*t as i64),
            horizon: n.clone(),
            class: PositionClass::NearFuture(t - 1),
            prefix: &prefix,
            phase: ((t - 1) % family.cycle as u64) as usize,
            interval: None,
            boundary: false,
        };
        let profile = family.decide(&ctx);
        let slot = form.game.node(node).slot_of(player).expect("mover");
        let _ = g;
        profile.choice(*x, slot)
    })
}
