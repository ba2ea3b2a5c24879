//! Repeated games: finite expansion, lifted preferences, Hasse diagrams and
//! the separability, transitivity and consistency checks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use nonstd::{NonStdNum, Segment, Segmented, ViewKind};
use thiserror::Error;

use crate::criteria::{simple_total, Criterion, CriterionError, Payload, PayoffModel, WholeHistory};
use crate::game::{GameError, GameForm, NodeId, Player, PlayerId, Profile, Semantics, Tree};
use crate::order::Relation;

pub const NODE_GUARD: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepeatedError {
    #[error("connected terminal {0} is not a terminal of the constituent")]
    NotTerminal(String),
    #[error("connected set is empty")]
    EmptyConnected,
    #[error("expansion guard exceeded: {0} nodes")]
    TooLarge(usize),
    #[error("operation needs a finite horizon")]
    NeedsFinite,
    #[error("no payoff table attached")]
    NoPayoffs,
    #[error("strict cycle through {0}")]
    Cycle(String),
    #[error("hypotheses not met: {0}")]
    Hypotheses(String),
    #[error("chain step {0} does not satisfy the relation")]
    Precondition(usize),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Equilibrium(#[from] crate::equilibria::EquilibriumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizon {
    Finite(u64),
    Huge(ViewKind),
}

impl Horizon {
    pub fn length(&self) -> NonStdNum {
        match self {
            Horizon::Finite(n) => NonStdNum::int(*n as i64),
            Horizon::Huge(_) => NonStdNum::tau(),
        }
    }

    pub fn view(&self) -> ViewKind {
        match self {
            Horizon::Finite(_) => ViewKind::Perspective,
            Horizon::Huge(v) => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedGameSpec {
    pub constituent: GameForm,
    pub payoffs: Option<PayoffModel>,
    /// Leaf indices of the connected terminals, ascending.
    pub connected: Vec<usize>,
    pub horizon: Horizon,
}

impl RepeatedGameSpec {
    pub fn new(
        constituent: GameForm,
        payoffs: Option<PayoffModel>,
        connected: &[&str],
        horizon: Horizon,
    ) -> Result<Self, RepeatedError> {
        let mut leaves = Vec::new();
        for name in connected {
            let leaf = constituent.leaf_by_name(name).ok_or_else(|| RepeatedError::NotTerminal(name.to_string()))?;
            leaves.push(constituent.leaf_index(leaf).expect("leaf"));
        }
        Self::from_indices(constituent, payoffs, leaves, horizon)
    }

    pub fn from_indices(
        constituent: GameForm,
        payoffs: Option<PayoffModel>,
        mut connected: Vec<usize>,
        horizon: Horizon,
    ) -> Result<Self, RepeatedError> {
        connected.sort_unstable();
        connected.dedup();
        if let Some(bad) = connected.iter().find(|l| **l >= constituent.leaves().len()) {
            return Err(RepeatedError::NotTerminal(format!("#{bad}")));
        }
        let long = !matches!(horizon, Horizon::Finite(1));
        if long && connected.is_empty() {
            return Err(RepeatedError::EmptyConnected);
        }
        Ok(RepeatedGameSpec { constituent, payoffs, connected, horizon })
    }

    pub fn with_horizon(&self, horizon: Horizon) -> Self {
        RepeatedGameSpec { horizon, ..self.clone() }
    }

    pub fn is_connected(&self, leaf: usize) -> bool {
        self.connected.binary_search(&leaf).is_ok()
    }

    pub fn payoffs(&self) -> Result<&PayoffModel, RepeatedError> {
        self.payoffs.as_ref().ok_or(RepeatedError::NoPayoffs)
    }

    /// `(Rr, D)` style name of a sequence of constituent leaves.
    pub fn whole_name(&self, seq: &[usize]) -> String {
        let g = &self.constituent;
        let parts: Vec<String> = seq.iter().map(|l| g.terminal_name(g.leaves()[*l])).collect();
        format!("({})", parts.join(", "))
    }

    pub fn leaf_name(&self, leaf: usize) -> String {
        self.constituent.terminal_name(self.constituent.leaves()[leaf])
    }

    /// Terminal whole histories of the finite expansion, depth first.
    pub fn whole_histories(&self) -> Result<Vec<Vec<usize>>, RepeatedError> {
        let n = self.finite_len()?;
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(prefix) = stack.pop() {
            for leaf in (0..self.constituent.leaves().len()).rev() {
                let mut seq = prefix.clone();
                seq.push(leaf);
                if self.is_connected(leaf) && (seq.len() as u64) < n {
                    stack.push(seq);
                } else {
                    out.push(seq);
                }
            }
            if out.len() > NODE_GUARD {
                return Err(RepeatedError::TooLarge(out.len()));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Connected sequences of length `1..n`, the nonterminal period boundaries.
    pub fn connected_prefixes(&self) -> Result<Vec<Vec<usize>>, RepeatedError> {
        let n = self.finite_len()?;
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 1..n {
            layer = layer
                .iter()
                .flat_map(|p| {
                    self.connected.iter().map(move |c| {
                        let mut q = p.clone();
                        q.push(*c);
                        q
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        Ok(out)
    }

    pub fn finite_len(&self) -> Result<u64, RepeatedError> {
        match self.horizon {
            Horizon::Finite(n) => Ok(n),
            Horizon::Huge(_) => Err(RepeatedError::NeedsFinite),
        }
    }

    /// A finite sequence as a whole history over `horizon` periods, padded
    /// with empty periods.
    pub fn finite_history(&self, seq: &[usize], horizon: u64) -> WholeHistory {
        let mut segs: Vec<Segment<Payload>> =
            seq.iter().map(|l| Segment::new(NonStdNum::int(1), Payload::Term(*l))).collect();
        let rest = horizon - seq.len() as u64;
        if rest > 0 {
            segs.push(Segment::new(NonStdNum::int(rest as i64), Payload::Empty));
        }
        Segmented::finite(horizon, segs).expect("unit lengths").canonicalize().expect("lengths sum to horizon")
    }
}

/// Finite expansion with the bookkeeping that ties nodes back to periods.
#[derive(Debug, Clone)]
pub struct RepeatedForm {
    pub game: GameForm,
    /// Per repeated node: period (from 1), constituent node, completed components.
    pub position: Vec<(u64, NodeId, Vec<usize>)>,
    /// Per repeated leaf index: its constituent leaf sequence.
    pub leaf_components: Vec<Vec<usize>>,
    /// Repeated player of each (constituent player, period).
    player_map: Vec<Vec<PlayerId>>,
    /// Constituent player and period (outside players only) of every repeated player.
    pub origin: Vec<(PlayerId, Option<u64>)>,
}

impl RepeatedForm {
    pub fn player(&self, constituent_player: PlayerId, period: u64) -> PlayerId {
        let copies = &self.player_map[constituent_player];
        if copies.len() == 1 {
            copies[0]
        } else {
            copies[(period - 1) as usize]
        }
    }

    /// Lift a constituent profile to every period.
    pub fn repeat_profile(&self, constituent: &Profile) -> Profile {
        self.game.profile_with(|node, player, _| {
            let (_, x, _) = &self.position[node];
            let slot = self.game.node(node).slot_of(player).expect("mover");
            constituent.choice(*x, slot)
        })
    }

    /// Core preferences from a criterion over the padded whole histories.
    pub fn with_criterion(mut self, spec: &RepeatedGameSpec, criterion: &Criterion) -> Result<Self, RepeatedError> {
        let n = spec.finite_len()?;
        let payoffs = spec.payoffs()?;
        let histories: Vec<WholeHistory> =
            self.leaf_components.iter().map(|seq| spec.finite_history(seq, n)).collect();
        for p in spec.constituent.core_players() {
            let values: Vec<NonStdNum> = match criterion {
                Criterion::Overtaking => {
                    histories.iter().map(|h| simple_total(h, payoffs, p)).collect::<Result<_, _>>()?
                }
                _ => histories
                    .iter()
                    .map(|h| {
                        let v = criterion.value(h, payoffs, p)?.expect("valued criterion");
                        Ok(NonStdNum::finite(v.finite().cloned().unwrap_or_default()))
                    })
                    .collect::<Result<_, CriterionError>>()?,
            };
            let rel = values_relation(&values);
            let rp = self.player(p, 1);
            self.game.set_preference(rp, rel)?;
        }
        Ok(self)
    }

    pub fn with_lifted(mut self, spec: &RepeatedGameSpec, lifted: &LiftedPreference) -> Result<Self, RepeatedError> {
        let index: HashMap<&Vec<usize>, usize> = lifted.elements.iter().enumerate().map(|(k, e)| (e, k)).collect();
        let at: Vec<usize> = self.leaf_components.iter().map(|s| index[s]).collect();
        let size = at.len();
        let rel = Relation::from_fn(size + 1, |a, b| a == b || (a < size && b < size && lifted.relation.weakly(at[a], at[b])));
        let rp = self.player(lifted.player, 1);
        let _ = spec;
        self.game.set_preference(rp, rel)?;
        Ok(self)
    }
}

fn values_relation(values: &[NonStdNum]) -> Relation {
    let n = values.len();
    let mut rel = Relation::identity(n + 1);
    for a in 0..n {
        for b in 0..n {
            if values[a] >= values[b] {
                rel.insert(a, b);
            }
        }
    }
    rel
}

/// Expand a finitely repeated game into one tree.
pub fn build_finite_repeated(spec: &RepeatedGameSpec) -> Result<RepeatedForm, RepeatedError> {
    let n = spec.finite_len()?;
    let g = &spec.constituent;
    let size = expansion_size(spec, n)?;
    if size > NODE_GUARD {
        return Err(RepeatedError::TooLarge(size));
    }
    let mut players = Vec::new();
    let mut player_map = Vec::new();
    let mut origin = Vec::new();
    for (i, p) in g.players().iter().enumerate() {
        if p.outside {
            let copies: Vec<PlayerId> = (1..=n)
                .map(|t| {
                    players.push(Player::outside(&format!("{}@{t}", p.name)));
                    origin.push((i, Some(t)));
                    players.len() - 1
                })
                .collect();
            player_map.push(copies);
        } else {
            players.push(p.clone());
            origin.push((i, None));
            player_map.push(vec![players.len() - 1]);
        }
    }
    let lookup = |i: PlayerId, t: u64| -> PlayerId {
        let copies: &Vec<PlayerId> = &player_map[i];
        if copies.len() == 1 { copies[0] } else { copies[(t - 1) as usize] }
    };
    let tree = expand(spec, g.root(), 1, n, &lookup);
    let game = GameForm::new(players, tree)?;

    let mut position = vec![(0, 0, vec![]); game.nodes().len()];
    let mut stack = vec![(game.root(), 1u64, g.root(), Vec::<usize>::new())];
    while let Some((r, t, x, comps)) = stack.pop() {
        position[r] = (t, x, comps.clone());
        for (rc, xc) in game.node(r).children.iter().zip(&g.node(x).children) {
            let leaf = g.leaf_index(*xc);
            match leaf {
                Some(l) if spec.is_connected(l) && t < n => {
                    let mut next = comps.clone();
                    next.push(l);
                    stack.push((*rc, t + 1, g.root(), next));
                }
                _ => stack.push((*rc, t, *xc, comps.clone())),
            }
        }
    }
    let leaf_components: Vec<Vec<usize>> = game
        .leaves()
        .iter()
        .map(|r| {
            let (_, x, comps) = &position[*r];
            let mut seq = comps.clone();
            seq.push(g.leaf_index(*x).expect("terminal"));
            seq
        })
        .collect();

    let mut form = RepeatedForm { game, position, leaf_components, player_map, origin };
    // outside copies judge only their own period's component
    for rp in 0..form.origin.len() {
        if let (i, Some(t)) = form.origin[rp] {
            let base = g.preference(i);
            let empty = g.empty_index();
            let comp: Vec<usize> = form
                .leaf_components
                .iter()
                .map(|seq| seq.get((t - 1) as usize).copied().unwrap_or(empty))
                .collect();
            let size = comp.len();
            let rel = Relation::from_fn(size + 1, |a, b| {
                a == b || (a < size && b < size && base.weakly(comp[a], comp[b]))
            });
            form.game.set_preference(rp, rel)?;
        }
    }
    if n == 1 {
        for p in g.core_players() {
            let rp = form.player(p, 1);
            form.game.set_preference(rp, g.preference(p).clone())?;
        }
    }
    Ok(form)
}

fn expansion_size(spec: &RepeatedGameSpec, n: u64) -> Result<usize, RepeatedError> {
    let g = &spec.constituent;
    let connected = spec.connected.len();
    let per = g.nodes().len();
    let mut size: usize = per;
    for _ in 1..n {
        size = size
            .checked_sub(0)
            .and_then(|s| s.checked_mul(connected))
            .and_then(|s| s.checked_add(per))
            .ok_or(RepeatedError::TooLarge(usize::MAX))?;
        if size > NODE_GUARD {
            return Err(RepeatedError::TooLarge(size));
        }
    }
    Ok(size)
}

fn expand(spec: &RepeatedGameSpec, x: NodeId, t: u64, n: u64, lookup: &dyn Fn(PlayerId, u64) -> PlayerId) -> Tree {
    let g = &spec.constituent;
    let node = g.node(x);
    if node.is_leaf() {
        let l = g.leaf_index(x).expect("leaf");
        return if spec.is_connected(l) && t < n { expand(spec, g.root(), t + 1, n, lookup) } else { Tree::Leaf };
    }
    let children: Vec<Tree> = node.children.iter().map(|c| expand(spec, *c, t, n, lookup)).collect();
    let movers: Vec<PlayerId> = node.movers.iter().map(|m| lookup(*m, t)).collect();
    if movers.len() == 1 {
        let labels = node.children.iter().map(|c| g.node(*c).label.clone().unwrap_or_default());
        Tree::Move { player: movers[0], branches: labels.zip(children).collect() }
    } else {
        Tree::Joint { movers, actions: node.actions.clone(), children }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiftOptions {
    pub dynamic_consistency: bool,
    /// Constituent outcome appended by dynamic consistency; defaults to the
    /// backward-induction outcome.
    pub spe_outcome: Option<usize>,
    /// Adjacent swaps are indifferent.
    pub identify_swaps: bool,
    /// `(.., j, j', ..)` above `(.., j', j, ..)` whenever `j ≿ j'`.
    pub sooner_better: bool,
    /// Pairs that must stay strict.
    pub strict_pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

/// A preorder over sequences of constituent terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPreference {
    pub player: PlayerId,
    pub elements: Vec<Vec<usize>>,
    pub names: Vec<String>,
    pub relation: Relation,
    pub generators: Vec<(usize, usize)>,
    pub strict: Vec<(usize, usize)>,
}

impl LiftedPreference {
    /// Relation read off numeric values, higher preferred.
    pub fn from_values<V: Ord>(spec: &RepeatedGameSpec, player: PlayerId, elements: Vec<Vec<usize>>, values: &[V]) -> Self {
        let n = elements.len();
        let mut generators = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if values[a] >= values[b] {
                    generators.push((a, b));
                }
            }
        }
        let names = elements.iter().map(|e| spec.whole_name(e)).collect();
        let relation = Relation::from_pairs(n, generators.iter().copied());
        LiftedPreference { player, elements, names, relation, generators, strict: vec![] }
    }

    pub fn index_of(&self, seq: &[usize]) -> Option<usize> {
        self.elements.iter().position(|e| e == seq)
    }

    pub fn weakly(&self, a: &[usize], b: &[usize]) -> Option<bool> {
        Some(self.relation.weakly(self.index_of(a)?, self.index_of(b)?))
    }
}

/// Smallest preorder containing the weak-separability lifts of one
/// player's constituent preference, plus the optional identifications.
pub fn lift_preferences(spec: &RepeatedGameSpec, player: PlayerId, options: &LiftOptions) -> Result<LiftedPreference, RepeatedError> {
    let mut elements = spec.whole_histories()?;
    if options.dynamic_consistency {
        elements.extend(spec.connected_prefixes()?);
    }
    elements.sort();
    let index: HashMap<Vec<usize>, usize> = elements.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
    let base = spec.constituent.preference(player);
    let mut generators = Vec::new();

    for (a, ea) in elements.iter().enumerate() {
        for (b, eb) in elements.iter().enumerate() {
            if a == b || ea.len() != eb.len() {
                continue;
            }
            let diff: Vec<usize> = (0..ea.len()).filter(|p| ea[*p] != eb[*p]).collect();
            if diff.len() == 1 && base.weakly(ea[diff[0]], eb[diff[0]]) {
                generators.push((a, b));
            }
        }
    }
    if options.dynamic_consistency {
        let outcome = match options.spe_outcome {
            Some(o) => o,
            None => {
                let s = spec.constituent.constituent_spe()?;
                spec.constituent.leaf_index(spec.constituent.outcome(&s)).expect("leaf")
            }
        };
        for prefix in spec.connected_prefixes()? {
            let mut ext = prefix.clone();
            ext.push(outcome);
            if let Some(&e) = index.get(&ext) {
                let p = index[&prefix];
                generators.push((p, e));
                generators.push((e, p));
            }
        }
    }
    if options.identify_swaps || options.sooner_better {
        for (a, ea) in elements.iter().enumerate() {
            for p in 0..ea.len().saturating_sub(1) {
                let (j, k) = (ea[p], ea[p + 1]);
                if j == k {
                    continue;
                }
                let mut swapped = ea.clone();
                swapped.swap(p, p + 1);
                let Some(&b) = index.get(&swapped) else { continue };
                if options.identify_swaps {
                    generators.push((a, b));
                }
                if options.sooner_better && base.weakly(j, k) {
                    generators.push((a, b));
                }
            }
        }
    }
    let mut strict = Vec::new();
    for (x, y) in &options.strict_pairs {
        if let (Some(&a), Some(&b)) = (index.get(x), index.get(y)) {
            generators.push((a, b));
            strict.push((a, b));
        }
    }
    generators.sort_unstable();
    generators.dedup();
    let relation = Relation::from_pairs(elements.len(), generators.iter().copied());
    let names = elements.iter().map(|e| spec.whole_name(e)).collect();
    Ok(LiftedPreference { player, elements, names, relation, generators, strict })
}

/// Cover graph over indifference classes; edges point from better to worse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hasse {
    pub labels: Vec<String>,
    pub members: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl Hasse {
    pub fn edge_labels(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> =
            self.edges.iter().map(|(a, b)| (self.labels[*a].clone(), self.labels[*b].clone())).collect();
        out.sort();
        out
    }

    /// Longest path from a maximal class.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.labels.len()];
        for _ in 0..self.labels.len() {
            for (a, b) in &self.edges {
                depth[*b] = depth[*b].max(depth[*a] + 1);
            }
        }
        depth
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
        let _ = writeln!(out, "  rankdir=TB;");
        let depths = self.depths();
        for (k, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  n{k} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        let mut by_rank: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, d) in depths.iter().enumerate() {
            by_rank.entry(*d).or_default().push(k);
        }
        for nodes in by_rank.values() {
            let list: Vec<String> = nodes.iter().map(|k| format!("n{k}")).collect();
            let _ = writeln!(out, "  {{ rank=same; {}; }}", list.join("; "));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Quotient by indifference, then transitive reduction.
pub fn hasse(rel: &LiftedPreference) -> Result<Hasse, RepeatedError> {
    for (a, b) in &rel.strict {
        if rel.relation.weakly(*b, *a) {
            return Err(RepeatedError::Cycle(format!("{} and {}", rel.names[*a], rel.names[*b])));
        }
    }
    let (classes, _) = rel.relation.classes();
    let mut labelled: Vec<(String, Vec<usize>)> = classes
        .into_iter()
        .map(|members| {
            let mut names: Vec<&String> = members.iter().map(|m| &rel.names[*m]).collect();
            names.sort();
            let label = names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ");
            (label, members)
        })
        .collect();
    labelled.sort();
    let reps: Vec<usize> = labelled.iter().map(|(_, m)| m[0]).collect();
    let mut edges = rel.relation.covers(&reps);
    edges.sort_unstable();
    let (labels, members) = labelled.into_iter().unzip();
    Ok(Hasse { labels, members, edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparabilityViolation {
    pub position: usize,
    pub better: String,
    pub worse: String,
}

/// First lift `h'⌢(j)⌢h''' ≿ h'⌢(j')⌢h'''` with `j ≿ j'` missing from the relation.
pub fn check_weak_separability(rel: &LiftedPreference, spec: &RepeatedGameSpec) -> Result<(), SeparabilityViolation> {
    let base = spec.constituent.preference(rel.player);
    let leaves = spec.constituent.leaves().len();
    let index: HashMap<&Vec<usize>, usize> = rel.elements.iter().enumerate().map(|(k, e)| (e, k)).collect();
    let longest = rel.elements.iter().map(Vec::len).max().unwrap_or(0);
    for position in 0..longest {
        for j in 0..leaves {
            for jp in 0..leaves {
                if j == jp || !base.weakly(j, jp) {
                    continue;
                }
                let mut contexts: Vec<(Vec<usize>, usize)> = rel
                    .elements
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.len() > position && e[position] == j)
                    .map(|(k, e)| {
                        let mut ctx = e.clone();
                        ctx.remove(position);
                        (ctx, k)
                    })
                    .collect();
                contexts.sort();
                for (_, a) in contexts {
                    let mut other = rel.elements[a].clone();
                    other[position] = jp;
                    if let Some(&b) = index.get(&other) {
                        if !rel.relation.weakly(a, b) {
                            return Err(SeparabilityViolation {
                                position,
                                better: rel.names[a].clone(),
                                worse: rel.names[b].clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Whether a chain `samples[0] ≿ samples[1] ≿ ...` orders all its pairs.
/// `steps` are sampled consecutive links and must satisfy the relation.
/// Returns the first `(ℓ, m)` with `samples[ℓ] ≿ samples[m]` failing,
/// endpoints first.
pub fn check_huge_transitivity<T>(
    samples: &[T],
    steps: &[(T, T)],
    weakly: impl Fn(&T, &T) -> bool,
) -> Result<Option<(usize, usize)>, RepeatedError> {
    for (k, (a, b)) in steps.iter().enumerate() {
        if !weakly(a, b) {
            return Err(RepeatedError::Precondition(k));
        }
    }
    if samples.len() < 2 {
        return Ok(None);
    }
    let last = samples.len() - 1;
    if !weakly(&samples[0], &samples[last]) {
        return Ok(Some((0, last)));
    }
    for l in 0..samples.len() {
        for m in l + 1..samples.len() {
            if !weakly(&samples[l], &samples[m]) {
                return Ok(Some((l, m)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynamicConsistency {
    Exact,
    RelaxedWeaklyBetter,
    RelaxedWeaklyWorse,
    Fails,
}

impl std::fmt::Display for DynamicConsistency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DynamicConsistency::Exact => "exact",
            DynamicConsistency::RelaxedWeaklyBetter => "relaxed_weakly_better",
            DynamicConsistency::RelaxedWeaklyWorse => "relaxed_weakly_worse",
            DynamicConsistency::Fails => "fails",
        })
    }
}

/// Compare `(h_c)⌢O(s*)` with `(h_c)` for every connected `h_c`, per core player.
pub fn check_dynamic_consistency(
    spec: &RepeatedGameSpec,
    criterion: &Criterion,
) -> Result<Vec<(PlayerId, DynamicConsistency)>, RepeatedError> {
    let payoffs = spec.payoffs()?;
    let g = &spec.constituent;
    let s = g.constituent_spe()?;
    let outcome = g.leaf_index(g.outcome(&s)).expect("leaf");
    let in_c = spec.is_connected(outcome);
    let mut out = Vec::new();
    for p in g.core_players() {
        let mut orders = Vec::new();
        for c in &spec.connected {
            let extended = spec.finite_history(&[*c, outcome], 2);
            let alone = spec.finite_history(&[*c], 2);
            orders.push(criterion.compare(&extended, &alone, payoffs, p)?);
        }
        let class = if orders.iter().all(|o| *o == Ordering::Equal) {
            DynamicConsistency::Exact
        } else if in_c && orders.iter().all(|o| *o != Ordering::Less) {
            DynamicConsistency::RelaxedWeaklyBetter
        } else if !in_c && orders.iter().all(|o| *o != Ordering::Greater) {
            DynamicConsistency::RelaxedWeaklyWorse
        } else {
            DynamicConsistency::Fails
        };
        out.push((p, class));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropExtReport {
    pub holds: bool,
    /// Backward induction yields a single profile (finite horizons only).
    pub unique: Option<bool>,
    pub detail: String,
}

/// Whether repeating the constituent equilibrium is subgame perfect.
pub fn verify_prop_ext(spec: &RepeatedGameSpec, criterion: &Criterion) -> Result<PropExtReport, RepeatedError> {
    let flags = criterion.flags();
    if !flags.weak_separability || !flags.huge_transitivity {
        return Err(RepeatedError::Hypotheses(format!("{criterion} lacks weak separability or huge transitivity")));
    }
    let dc = check_dynamic_consistency(spec, criterion)?;
    if let Some((p, _)) = dc.iter().find(|(_, c)| *c == DynamicConsistency::Fails) {
        return Err(RepeatedError::Hypotheses(format!("dynamic consistency fails for player {p}")));
    }
    match spec.horizon {
        Horizon::Finite(_) => {
            let form = build_finite_repeated(spec)?.with_criterion(spec, criterion)?;
            let s = spec.constituent.constituent_spe()?;
            let repeated = form.repeat_profile(&s);
            let verdict = form.game.is_spe(&repeated, Semantics::NoStrictImprovement);
            let unique = match form.game.backward_induction() {
                Ok(all) => Some(all.len() == 1),
                Err(_) => None,
            };
            Ok(PropExtReport {
                holds: verdict.is_ok(),
                unique,
                detail: spec.constituent.describe_profile(&s),
            })
        }
        Horizon::Huge(_) => {
            let family = crate::equilibria::family_repeat_spe(spec)?;
            let report = crate::equilibria::verify_symbolic_spe(spec, &family, criterion, None)?;
            Ok(PropExtReport { holds: report.verified(), unique: None, detail: report.summary() })
        }
    }
}
