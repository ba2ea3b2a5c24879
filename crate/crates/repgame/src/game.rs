//! Finite extensive games with perfect information.
//!
//! A node may have several simultaneous movers; that is how one-shot
//! strategic games embed as depth-one trees. Outcomes are leaves, and each
//! player's preference is a preorder over the leaves plus the empty history.

use std::collections::BTreeSet;
use std::fmt;

use nonstd::Rational;
use thiserror::Error;

use crate::order::Relation;

pub type NodeId = usize;
pub type PlayerId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("no core player")]
    NoCorePlayer,
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
    #[error("history {0} has no actions")]
    NoActions(String),
    #[error("duplicate action {action} at history {history}")]
    DuplicateAction { history: String, action: String },
    #[error("joint node at {0} has the wrong number of children")]
    WrongArity(String),
    #[error("history {0} is terminal")]
    TerminalHistory(String),
    #[error("unknown history {0}")]
    UnknownHistory(String),
    #[error("unknown terminal {0}")]
    UnknownTerminal(String),
    #[error("preferences not total on subgame at {0}")]
    NotTotal(String),
    #[error("backward induction needs single-mover nodes; {0} is simultaneous")]
    Simultaneous(String),
    #[error("profile not total: no choice at {0}")]
    ProfileNotTotal(String),
    #[error("payoff table does not cover terminal {0}")]
    MissingPayoff(String),
    #[error("payoff for {terminal} has {found} entries, expected {expected}")]
    PayoffArity { terminal: String, expected: usize, found: usize },
    #[error("preference for player {0} has the wrong size or is not a preorder")]
    BadPreference(usize),
    #[error("more than {0} profiles to enumerate")]
    TooManyProfiles(usize),
    #[error("no subgame perfect equilibrium")]
    NoEquilibrium,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Player {
    pub name: String,
    pub outside: bool,
}

impl Player {
    pub fn core(name: &str) -> Self {
        Player { name: name.to_string(), outside: false }
    }

    pub fn outside(name: &str) -> Self {
        Player { name: name.to_string(), outside: true }
    }
}

/// Nested description of a game tree, consumed by [`GameForm::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf,
    Move { player: PlayerId, branches: Vec<(String, Tree)> },
    /// Simultaneous move; `children` are row-major over `actions`, the first
    /// mover varying slowest.
    Joint { movers: Vec<PlayerId>, actions: Vec<Vec<String>>, children: Vec<Tree> },
}

impl Tree {
    pub fn node(player: PlayerId, branches: Vec<(&str, Tree)>) -> Tree {
        Tree::Move {
            player,
            branches: branches.into_iter().map(|(a, t)| (a.to_string(), t)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<NodeId>,
    /// Joint label of the edge from the parent.
    pub label: Option<String>,
    /// Every per-mover component of `label` is a single character.
    pub compact: bool,
    pub movers: Vec<PlayerId>,
    pub actions: Vec<Vec<String>>,
    pub children: Vec<NodeId>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn slot_of(&self, player: PlayerId) -> Option<usize> {
        self.movers.iter().position(|m| *m == player)
    }
}

/// Choice of one action per mover at every nonterminal node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    choices: Vec<Vec<usize>>,
}

impl Profile {
    pub fn choice(&self, node: NodeId, slot: usize) -> usize {
        self.choices[node][slot]
    }

    pub fn set(&mut self, node: NodeId, slot: usize, action: usize) {
        self.choices[node][slot] = action;
    }

    pub fn strategy_of(&self, g: &GameForm, player: PlayerId) -> Strategy {
        let choices = g
            .owned(player)
            .into_iter()
            .map(|(node, slot)| (node, slot, self.choices[node][slot]))
            .collect();
        Strategy { player, choices }
    }

    pub fn with_strategy(&self, s: &Strategy) -> Profile {
        let mut out = self.clone();
        for (node, slot, a) in &s.choices {
            out.choices[*node][*slot] = *a;
        }
        out
    }
}

/// One player's part of a profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    pub player: PlayerId,
    pub choices: Vec<(NodeId, usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// `O(s) ≿ O(s')` must be in the relation for every deviation.
    RequiresWeakPreference,
    /// No deviation reaches a strictly preferred outcome.
    NoStrictImprovement,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::RequiresWeakPreference => "weak",
            Semantics::NoStrictImprovement => "strict",
        })
    }
}

/// A profitable (or not weakly dominated) deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub subgame: NodeId,
    pub player: PlayerId,
    pub deviation: Profile,
    pub outcome: NodeId,
    pub deviated: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameForm {
    players: Vec<Player>,
    nodes: Vec<Node>,
    leaves: Vec<NodeId>,
    leaf_index: Vec<Option<usize>>,
    prefs: Vec<Relation>,
}

const PROFILE_CAP: usize = 200_000;

impl GameForm {
    pub fn new(players: Vec<Player>, tree: Tree) -> Result<Self, GameError> {
        if !players.iter().any(|p| !p.outside) {
            return Err(GameError::NoCorePlayer);
        }
        let mut g = GameForm { players, nodes: vec![], leaves: vec![], leaf_index: vec![], prefs: vec![] };
        g.add(None, None, tree)?;
        g.leaf_index = vec![None; g.nodes.len()];
        for k in 0..g.nodes.len() {
            if g.nodes[k].is_leaf() {
                g.leaf_index[k] = Some(g.leaves.len());
                g.leaves.push(k);
            }
        }
        let size = g.leaves.len() + 1;
        g.prefs = vec![Relation::identity(size); g.players.len()];
        Ok(g)
    }

    fn add(&mut self, parent: Option<NodeId>, label: Option<String>, tree: Tree) -> Result<NodeId, GameError> {
        let id = self.nodes.len();
        let compact = label.as_ref().is_some_and(|l| l.chars().count() == 1);
        self.nodes.push(Node { parent, label, compact, movers: vec![], actions: vec![], children: vec![] });
        let (movers, actions, subtrees): (Vec<PlayerId>, Vec<Vec<String>>, Vec<(String, Tree)>) = match tree {
            Tree::Leaf => return Ok(id),
            Tree::Move { player, branches } => {
                let labels: Vec<String> = branches.iter().map(|(a, _)| a.clone()).collect();
                (vec![player], vec![labels], branches)
            }
            Tree::Joint { movers, actions, children } => {
                let expected: usize = actions.iter().map(Vec::len).product();
                if movers.len() != actions.len() || children.len() != expected || movers.is_empty() {
                    return Err(GameError::WrongArity(self.history_string(id)));
                }
                let labels = joint_labels(&actions);
                (movers, actions, labels.into_iter().zip(children).collect())
            }
        };
        for m in &movers {
            if *m >= self.players.len() {
                return Err(GameError::UnknownPlayer(*m));
            }
        }
        if subtrees.is_empty() || actions.iter().any(Vec::is_empty) {
            return Err(GameError::NoActions(self.history_string(id)));
        }
        for list in &actions {
            let mut seen = BTreeSet::new();
            for a in list {
                if !seen.insert(a) {
                    return Err(GameError::DuplicateAction {
                        history: self.history_string(id),
                        action: a.clone(),
                    });
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (label, _) in &subtrees {
            if !seen.insert(label.clone()) {
                return Err(GameError::DuplicateAction { history: self.history_string(id), action: label.clone() });
            }
        }
        self.nodes[id].movers = movers;
        self.nodes[id].actions = actions;
        let joint_compact = self.nodes[id].movers.len() > 1
            && self.nodes[id].actions.iter().flatten().all(|a| a.chars().count() == 1);
        for (label, sub) in subtrees {
            let child = self.add(Some(id), Some(label), sub)?;
            self.nodes[child].compact |= joint_compact;
            self.nodes[id].children.push(child);
        }
        Ok(id)
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn player_index(&self, name: &str) -> Option<PlayerId> {
        self.players.iter().position(|p| p.name == name)
    }

    pub fn core_players(&self) -> Vec<PlayerId> {
        (0..self.players.len()).filter(|i| !self.players[*i].outside).collect()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn leaf_index(&self, node: NodeId) -> Option<usize> {
        self.leaf_index[node]
    }

    /// Index of the empty history in preference relations.
    pub fn empty_index(&self) -> usize {
        self.leaves.len()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|n| !self.nodes[*n].is_leaf())
    }

    /// `(node, mover slot)` pairs where `player` moves.
    pub fn owned(&self, player: PlayerId) -> Vec<(NodeId, usize)> {
        self.nonterminals().filter_map(|n| self.nodes[n].slot_of(player).map(|s| (n, s))).collect()
    }

    pub fn history(&self, node: NodeId) -> Vec<String> {
        let mut out = Vec::new();
        let mut at = node;
        while let Some(p) = self.nodes[at].parent {
            out.push(self.nodes[at].label.clone().unwrap_or_default());
            at = p;
        }
        out.reverse();
        out
    }

    /// `"∅"` for the root, otherwise the labels joined by commas.
    pub fn history_string(&self, node: NodeId) -> String {
        if node >= self.nodes.len() {
            return format!("#{node}");
        }
        let h = self.history(node);
        if h.is_empty() {
            "∅".to_string()
        } else {
            h.join(",")
        }
    }

    /// Compact name: `Rr` when every action is one character, else `(in,C)`.
    pub fn terminal_name(&self, node: NodeId) -> String {
        let h = self.history(node);
        let mut path = Vec::new();
        let mut at = node;
        while let Some(p) = self.nodes[at].parent {
            path.push(self.nodes[at].compact);
            at = p;
        }
        if !h.is_empty() && path.iter().all(|c| *c) {
            h.concat()
        } else {
            format!("({})", h.join(","))
        }
    }

    pub fn find(&self, history: &[&str]) -> Option<NodeId> {
        let mut at = self.root();
        for a in history {
            at = *self.nodes[at]
                .children
                .iter()
                .find(|c| self.nodes[**c].label.as_deref() == Some(*a))?;
        }
        Some(at)
    }

    pub fn leaf_by_name(&self, name: &str) -> Option<NodeId> {
        self.leaves.iter().copied().find(|l| self.terminal_name(*l) == name)
    }

    /// Labels of the children of a nonterminal history.
    pub fn legal_actions(&self, node: NodeId) -> Result<Vec<String>, GameError> {
        let n = &self.nodes[node];
        if n.is_leaf() {
            return Err(GameError::TerminalHistory(self.history_string(node)));
        }
        Ok(n.children.iter().map(|c| self.nodes[*c].label.clone().unwrap_or_default()).collect())
    }

    pub fn is_ancestor(&self, anc: NodeId, mut node: NodeId) -> bool {
        loop {
            if node == anc {
                return true;
            }
            match self.nodes[node].parent {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    pub fn child(&self, node: NodeId, joint: &[usize]) -> NodeId {
        let n = &self.nodes[node];
        let mut index = 0;
        for (slot, a) in joint.iter().enumerate() {
            index = index * n.actions[slot].len() + a;
        }
        n.children[index]
    }

    /// Per-mover action indices leading from the parent to `child`.
    pub fn joint_of(&self, child: NodeId) -> Vec<usize> {
        let parent = self.nodes[child].parent.expect("child has a parent");
        let n = &self.nodes[parent];
        let mut index = n.children.iter().position(|c| *c == child).expect("listed child");
        let mut out = vec![0; n.actions.len()];
        for slot in (0..n.actions.len()).rev() {
            out[slot] = index % n.actions[slot].len();
            index /= n.actions[slot].len();
        }
        out
    }

    pub fn step(&self, node: NodeId, profile: &Profile) -> NodeId {
        let joint: Vec<usize> = profile.choices[node].clone();
        self.child(node, &joint)
    }

    pub fn outcome_from(&self, mut node: NodeId, profile: &Profile) -> NodeId {
        while !self.nodes[node].is_leaf() {
            node = self.step(node, profile);
        }
        node
    }

    pub fn outcome(&self, profile: &Profile) -> NodeId {
        self.outcome_from(self.root(), profile)
    }

    /// Profile choosing the first action everywhere.
    pub fn first_profile(&self) -> Profile {
        Profile { choices: self.nodes.iter().map(|n| vec![0; n.movers.len()]).collect() }
    }

    pub fn profile_with(&self, f: impl Fn(NodeId, PlayerId, &[String]) -> usize) -> Profile {
        let mut p = self.first_profile();
        for node in self.nonterminals() {
            for (slot, m) in self.nodes[node].movers.iter().enumerate() {
                p.choices[node][slot] = f(node, *m, &self.nodes[node].actions[slot]);
            }
        }
        p
    }

    /// Profile from `(history, action)` pairs. Every single-mover history
    /// must be listed; at joint nodes the action is the joint label.
    pub fn profile_from_labels(&self, spec: &[(&[&str], &str)]) -> Result<Profile, GameError> {
        let mut p = self.first_profile();
        let mut covered = vec![false; self.nodes.len()];
        for (history, action) in spec {
            let node = self.find(history).ok_or_else(|| GameError::UnknownHistory(history.join(",")))?;
            let child = self.nodes[node]
                .children
                .iter()
                .copied()
                .find(|c| self.nodes[*c].label.as_deref() == Some(*action))
                .ok_or_else(|| GameError::UnknownHistory(format!("{},{}", history.join(","), action)))?;
            p.choices[node] = self.joint_of(child);
            covered[node] = true;
        }
        if let Some(missing) = self.nonterminals().find(|n| !covered[*n]) {
            return Err(GameError::ProfileNotTotal(self.history_string(missing)));
        }
        Ok(p)
    }

    pub fn preference(&self, player: PlayerId) -> &Relation {
        &self.prefs[player]
    }

    pub fn set_preference(&mut self, player: PlayerId, rel: Relation) -> Result<(), GameError> {
        if rel.len() != self.leaves.len() + 1 || !rel.is_transitive() || player >= self.players.len() {
            return Err(GameError::BadPreference(player));
        }
        self.prefs[player] = rel;
        Ok(())
    }

    /// Preferences of every player induced by a payoff table; the empty
    /// history stays incomparable.
    pub fn with_payoffs(mut self, table: &PayoffTable) -> Result<Self, GameError> {
        for p in 0..self.players.len() {
            let rel = table.relation(&self, p);
            self.set_preference(p, rel)?;
        }
        Ok(self)
    }

    pub fn weakly_prefers(&self, player: PlayerId, a: NodeId, b: NodeId) -> bool {
        let (a, b) = (self.pref_index(a), self.pref_index(b));
        self.prefs[player].weakly(a, b)
    }

    pub fn strictly_prefers(&self, player: PlayerId, a: NodeId, b: NodeId) -> bool {
        let (a, b) = (self.pref_index(a), self.pref_index(b));
        self.prefs[player].strictly(a, b)
    }

    fn pref_index(&self, node: NodeId) -> usize {
        self.leaf_index[node].unwrap_or_else(|| panic!("{} is not terminal", self.history_string(node)))
    }

    /// Leaves `player` can reach from `node` when everyone else follows `profile`.
    pub fn reachable_leaves(&self, node: NodeId, profile: &Profile, player: PlayerId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(at) = stack.pop() {
            let n = &self.nodes[at];
            if n.is_leaf() {
                out.push(at);
                continue;
            }
            match n.slot_of(player) {
                None => stack.push(self.step(at, profile)),
                Some(slot) => {
                    for a in 0..n.actions[slot].len() {
                        let mut joint = profile.choices[at].clone();
                        joint[slot] = a;
                        stack.push(self.child(at, &joint));
                    }
                }
            }
        }
        out
    }

    /// `profile` changed so that `player` steers play from `from` to `target`.
    pub fn deviate_towards(&self, profile: &Profile, player: PlayerId, from: NodeId, target: NodeId) -> Profile {
        let mut out = profile.clone();
        let mut at = target;
        while at != from {
            let parent = self.nodes[at].parent.expect("target below the subgame root");
            if let Some(slot) = self.nodes[parent].slot_of(player) {
                out.choices[parent][slot] = self.joint_of(at)[slot];
            }
            at = parent;
        }
        out
    }

    pub fn is_nash_at(&self, node: NodeId, profile: &Profile, semantics: Semantics) -> Result<(), Box<Witness>> {
        let o = self.outcome_from(node, profile);
        for player in 0..self.players.len() {
            for z in self.reachable_leaves(node, profile, player) {
                let bad = match semantics {
                    Semantics::RequiresWeakPreference => !self.weakly_prefers(player, o, z),
                    Semantics::NoStrictImprovement => self.strictly_prefers(player, z, o),
                };
                if bad {
                    return Err(Box::new(Witness {
                        subgame: node,
                        player,
                        deviation: self.deviate_towards(profile, player, node, z),
                        outcome: o,
                        deviated: z,
                    }));
                }
            }
        }
        Ok(())
    }

    pub fn is_nash(&self, profile: &Profile, semantics: Semantics) -> Result<(), Box<Witness>> {
        self.is_nash_at(self.root(), profile, semantics)
    }

    pub fn is_spe(&self, profile: &Profile, semantics: Semantics) -> Result<(), Box<Witness>> {
        for node in self.nonterminals() {
            self.is_nash_at(node, profile, semantics)?;
        }
        Ok(())
    }

    /// All profiles surviving backward induction, ties kept.
    pub fn backward_induction(&self) -> Result<Vec<Profile>, GameError> {
        // For each node: partial profiles on its subtree with their outcome.
        type Partial = (Vec<(NodeId, usize)>, NodeId);
        let mut results: Vec<Vec<Partial>> = vec![vec![]; self.nodes.len()];
        for node in (0..self.nodes.len()).rev() {
            let n = &self.nodes[node];
            if n.is_leaf() {
                results[node] = vec![(vec![], node)];
                continue;
            }
            if n.movers.len() != 1 {
                return Err(GameError::Simultaneous(self.history_string(node)));
            }
            let player = n.movers[0];
            let candidates: Vec<(usize, usize)> = n
                .children
                .iter()
                .enumerate()
                .flat_map(|(k, c)| (0..results[*c].len()).map(move |r| (k, r)))
                .collect();
            let leaf = |(k, r): (usize, usize)| results[n.children[k]][r].1;
            let mut best = Vec::new();
            for &c in &candidates {
                let mut top = true;
                for &d in &candidates {
                    let (x, y) = (leaf(c), leaf(d));
                    let (xy, yx) = (self.weakly_prefers(player, x, y), self.weakly_prefers(player, y, x));
                    if !xy && !yx {
                        return Err(GameError::NotTotal(self.history_string(node)));
                    }
                    top &= xy;
                }
                if top {
                    best.push(c);
                }
            }
            let mut out: Vec<Partial> = Vec::new();
            for (k, r) in best {
                // every combination of the other children's solutions
                let mut combos: Vec<Vec<(NodeId, usize)>> = vec![vec![(node, k)]];
                for (j, c) in n.children.iter().enumerate() {
                    let options: Vec<&Vec<(NodeId, usize)>> = if j == k {
                        vec![&results[*c][r].0]
                    } else {
                        results[*c].iter().map(|p| &p.0).collect()
                    };
                    let mut next = Vec::new();
                    for base in &combos {
                        for opt in &options {
                            let mut v = base.clone();
                            v.extend(opt.iter().copied());
                            next.push(v);
                        }
                    }
                    if next.len() > PROFILE_CAP {
                        return Err(GameError::TooManyProfiles(PROFILE_CAP));
                    }
                    combos = next;
                }
                let o = results[n.children[k]][r].1;
                out.extend(combos.into_iter().map(|v| (v, o)));
            }
            results[node] = out;
        }
        let mut profiles: Vec<Profile> = results[self.root()]
            .iter()
            .map(|(assign, _)| {
                let mut p = self.first_profile();
                for (node, a) in assign {
                    p.choices[*node][0] = *a;
                }
                p
            })
            .collect();
        profiles.sort();
        profiles.dedup();
        Ok(profiles)
    }

    /// Every profile, for games small enough to enumerate.
    pub fn all_profiles(&self) -> Result<Vec<Profile>, GameError> {
        let slots: Vec<(NodeId, usize, usize)> = self
            .nonterminals()
            .flat_map(|n| {
                self.nodes[n].actions.iter().enumerate().map(move |(s, a)| (n, s, a.len()))
            })
            .collect();
        let total = slots.iter().try_fold(1usize, |acc, (_, _, k)| acc.checked_mul(*k).filter(|t| *t <= PROFILE_CAP));
        if total.is_none() {
            return Err(GameError::TooManyProfiles(PROFILE_CAP));
        }
        let mut out = vec![self.first_profile()];
        for (node, slot, k) in slots {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..k).map(move |a| {
                        let mut q = p.clone();
                        q.choices[node][slot] = a;
                        q
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// All pure strategies of one player.
    pub fn pure_strategies(&self, player: PlayerId) -> Vec<Strategy> {
        let owned = self.owned(player);
        let mut out = vec![Strategy { player, choices: vec![] }];
        for (node, slot) in owned {
            let k = self.nodes[node].actions[slot].len();
            out = out
                .into_iter()
                .flat_map(|s| {
                    (0..k).map(move |a| {
                        let mut t = s.clone();
                        t.choices.push((node, slot, a));
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// A subgame perfect profile: backward induction when every node has a
    /// single mover, otherwise the first enumerated equilibrium.
    pub fn constituent_spe(&self) -> Result<Profile, GameError> {
        match self.backward_induction() {
            Ok(ps) => ps.into_iter().next().ok_or(GameError::NoEquilibrium),
            Err(GameError::Simultaneous(_)) => self
                .all_profiles()?
                .into_iter()
                .find(|p| self.is_spe(p, Semantics::NoStrictImprovement).is_ok())
                .ok_or(GameError::NoEquilibrium),
            Err(e) => Err(e),
        }
    }

    /// Per player, `node -> action` lines such as `1: ∅→D`.
    pub fn describe_profile(&self, profile: &Profile) -> String {
        let mut parts = Vec::new();
        for (i, p) in self.players.iter().enumerate() {
            let moves: Vec<String> = self
                .owned(i)
                .into_iter()
                .map(|(n, s)| {
                    format!("{}→{}", self.history_string(n), self.nodes[n].actions[s][profile.choices[n][s]])
                })
                .collect();
            parts.push(format!("{}: {}", p.name, moves.join(" ")));
        }
        parts.join("; ")
    }
}

fn joint_labels(actions: &[Vec<String>]) -> Vec<String> {
    let mut out = vec![String::new()];
    for list in actions {
        out = out.iter().flat_map(|p| list.iter().map(move |a| format!("{p}{a}"))).collect();
    }
    out
}

/// Per-terminal, per-player payoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffTable {
    values: Vec<Vec<Rational>>,
}

impl PayoffTable {
    /// Payoffs keyed by terminal name; every terminal must be listed.
    pub fn from_named(g: &GameForm, rows: &[(&str, Vec<Rational>)]) -> Result<Self, GameError> {
        let mut values = vec![None; g.leaves().len()];
        for (name, v) in rows {
            let leaf = g.leaf_by_name(name).ok_or_else(|| GameError::UnknownTerminal(name.to_string()))?;
            if v.len() != g.players().len() {
                return Err(GameError::PayoffArity {
                    terminal: name.to_string(),
                    expected: g.players().len(),
                    found: v.len(),
                });
            }
            values[g.leaf_index(leaf).expect("leaf")] = Some(v.clone());
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| GameError::MissingPayoff(g.terminal_name(g.leaves()[k]))))
            .collect::<Result<_, _>>()?;
        Ok(PayoffTable { values })
    }

    pub fn from_rows(values: Vec<Vec<Rational>>) -> Self {
        PayoffTable { values }
    }

    /// Payoff of the terminal with leaf index `leaf`.
    pub fn get(&self, leaf: usize, player: PlayerId) -> &Rational {
        &self.values[leaf][player]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn num_leaves(&self) -> usize {
        self.values.len()
    }

    /// Weak order of one player over leaves; the empty history (last
    /// index) is left incomparable.
    pub fn relation(&self, g: &GameForm, player: PlayerId) -> Relation {
        let n = g.leaves().len();
        Relation::from_fn(n + 1, |a, b| {
            a == b || (a < n && b < n && self.values[a][player] >= self.values[b][player])
        })
    }

    pub fn shifted(&self, by: &Rational) -> Self {
        PayoffTable { values: self.values.iter().map(|r| r.iter().map(|v| v + by).collect()).collect() }
    }
}

/// A one-shot game in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategicGame {
    pub players: Vec<String>,
    pub actions: Vec<Vec<String>>,
    /// Row-major over `actions`, one payoff vector per profile.
    pub payoffs: Vec<Vec<Rational>>,
}

/// Depth-one tree whose single joint move is the action profile.
pub fn strategic_as_extensive(sg: &StrategicGame) -> Result<(GameForm, PayoffTable), GameError> {
    let players = sg.players.iter().map(|p| Player::core(p)).collect();
    let children = vec![Tree::Leaf; sg.actions.iter().map(Vec::len).product()];
    let tree = Tree::Joint { movers: (0..sg.players.len()).collect(), actions: sg.actions.clone(), children };
    let g = GameForm::new(players, tree)?;
    let table = PayoffTable::from_rows(sg.payoffs.clone());
    let g = g.with_payoffs(&table)?;
    Ok((g, table))
}

#[cfg(test)]
mod test {
    use super::*;
    use nonstd::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|x| rat(*x, 1)).collect()
    }

    fn centipede() -> GameForm {
        let tree = Tree::node(
            0,
            vec![("R", Tree::node(1, vec![("r", Tree::Leaf), ("d", Tree::Leaf)])), ("D", Tree::Leaf)],
        );
        let g = GameForm::new(vec![Player::core("1"), Player::core("2")], tree).unwrap();
        let t = PayoffTable::from_named(
            &g,
            &[("D", ints(&[0, 0])), ("Rd", ints(&[-1, 3])), ("Rr", ints(&[2, 2]))],
        )
        .unwrap();
        g.with_payoffs(&t).unwrap()
    }

    fn chain_store() -> GameForm {
        let tree = Tree::node(
            0,
            vec![("in", Tree::node(1, vec![("C", Tree::Leaf), ("A", Tree::Leaf)])), ("out", Tree::Leaf)],
        );
        let g = GameForm::new(vec![Player::outside("E"), Player::core("CS")], tree).unwrap();
        let t = PayoffTable::from_named(
            &g,
            &[("(in,C)", ints(&[2, 2])), ("(in,A)", ints(&[0, 0])), ("(out)", ints(&[1, 5]))],
        )
        .unwrap();
        g.with_payoffs(&t).unwrap()
    }

    fn pd() -> GameForm {
        let sg = StrategicGame {
            players: vec!["1".into(), "2".into()],
            actions: vec![vec!["S".into(), "C".into()], vec!["S".into(), "C".into()]],
            payoffs: vec![ints(&[3, 3]), ints(&[0, 4]), ints(&[4, 0]), ints(&[1, 1])],
        };
        strategic_as_extensive(&sg).unwrap().0
    }

    #[test]
    fn legal_actions_and_names() {
        let g = chain_store();
        assert_eq!(g.legal_actions(g.root()).unwrap(), vec!["in", "out"]);
        assert_eq!(g.legal_actions(g.find(&["in"]).unwrap()).unwrap(), vec!["C", "A"]);
        assert!(g.legal_actions(g.find(&["out"]).unwrap()).is_err());
        let c = centipede();
        assert_eq!(c.legal_actions(c.find(&["R"]).unwrap()).unwrap(), vec!["r", "d"]);
        assert_eq!(c.terminal_name(c.find(&["R", "r"]).unwrap()), "Rr");
        assert_eq!(g.terminal_name(g.find(&["in", "C"]).unwrap()), "(in,C)");
        assert_eq!(g.terminal_name(g.find(&["out"]).unwrap()), "(out)");
    }

    #[test]
    fn duplicate_actions_rejected() {
        let tree = Tree::node(0, vec![("a", Tree::Leaf), ("a", Tree::Leaf)]);
        let err = GameForm::new(vec![Player::core("1")], tree).unwrap_err();
        assert!(matches!(err, GameError::DuplicateAction { .. }));
        let tree = Tree::node(0, vec![("a", Tree::Leaf)]);
        assert_eq!(GameForm::new(vec![Player::outside("1")], tree).unwrap_err(), GameError::NoCorePlayer);
    }

    #[test]
    fn outcomes() {
        let c = centipede();
        let s = c.profile_from_labels(&[(&[], "D"), (&["R"], "d")]).unwrap();
        assert_eq!(c.terminal_name(c.outcome(&s)), "D");
        let g = chain_store();
        let s = g.profile_from_labels(&[(&[], "in"), (&["in"], "C")]).unwrap();
        assert_eq!(g.terminal_name(g.outcome(&s)), "(in,C)");
    }

    #[test]
    fn nash_examples() {
        let g = chain_store();
        let strict = Semantics::NoStrictImprovement;
        let in_c = g.profile_from_labels(&[(&[], "in"), (&["in"], "C")]).unwrap();
        assert!(g.is_nash(&in_c, strict).is_ok());
        let out_a = g.profile_from_labels(&[(&[], "out"), (&["in"], "A")]).unwrap();
        assert!(g.is_nash(&out_a, strict).is_ok());
        let w = g.is_spe(&out_a, strict).unwrap_err();
        assert_eq!(g.history_string(w.subgame), "in");
        assert_eq!(g.terminal_name(w.deviated), "(in,C)");

        let p = pd();
        let ss = p.profile_from_labels(&[(&[], "SS")]).unwrap();
        let w = p.is_nash(&ss, strict).unwrap_err();
        let deviated = p.terminal_name(w.deviated);
        assert!(deviated == "CS" || deviated == "SC");
        assert_eq!(p.outcome(&w.deviation), w.deviated);
    }

    #[test]
    fn spe_examples() {
        let c = centipede();
        let dd = c.profile_from_labels(&[(&[], "D"), (&["R"], "d")]).unwrap();
        for sem in [Semantics::NoStrictImprovement, Semantics::RequiresWeakPreference] {
            assert!(c.is_spe(&dd, sem).is_ok());
        }
        let rd = c.profile_from_labels(&[(&[], "R"), (&["R"], "d")]).unwrap();
        let w = c.is_spe(&rd, Semantics::NoStrictImprovement).unwrap_err();
        assert_eq!(w.subgame, c.root());
        assert_eq!(w.player, 0);
    }

    #[test]
    fn backward_induction_examples() {
        let c = centipede();
        let bi = c.backward_induction().unwrap();
        assert_eq!(bi, vec![c.profile_from_labels(&[(&[], "D"), (&["R"], "d")]).unwrap()]);
        let g = chain_store();
        let bi = g.backward_induction().unwrap();
        assert_eq!(bi, vec![g.profile_from_labels(&[(&[], "in"), (&["in"], "C")]).unwrap()]);

        let tree = Tree::node(0, vec![("a", Tree::Leaf), ("b", Tree::Leaf)]);
        let one = GameForm::new(vec![Player::core("1")], tree).unwrap();
        let flat = PayoffTable::from_named(&one, &[("a", ints(&[1])), ("b", ints(&[1]))]).unwrap();
        let one = one.with_payoffs(&flat).unwrap();
        assert_eq!(one.backward_induction().unwrap().len(), 2);
    }

    #[test]
    fn backward_induction_needs_comparable_candidates() {
        let tree = Tree::node(0, vec![("a", Tree::Leaf), ("b", Tree::Leaf)]);
        let g = GameForm::new(vec![Player::core("1")], tree).unwrap();
        assert_eq!(g.backward_induction().unwrap_err(), GameError::NotTotal("∅".into()));
        assert!(matches!(pd().backward_induction(), Err(GameError::Simultaneous(_))));
    }

    #[test]
    fn strategic_adapter() {
        let p = pd();
        assert_eq!(p.leaves().len(), 4);
        let names: Vec<String> = p.leaves().iter().map(|l| p.terminal_name(*l)).collect();
        assert_eq!(names, vec!["SS", "SC", "CS", "CC"]);
        let cc = p.profile_from_labels(&[(&[], "CC")]).unwrap();
        assert_eq!(p.outcome(&cc), p.leaf_by_name("CC").unwrap());
        assert_eq!(p.constituent_spe().unwrap(), cc);

        let sg = StrategicGame {
            players: vec!["1".into()],
            actions: vec![vec!["x".into(), "y".into()]],
            payoffs: vec![ints(&[0]), ints(&[1])],
        };
        assert_eq!(strategic_as_extensive(&sg).unwrap().0.leaves().len(), 2);
    }

    #[test]
    fn empty_history_is_incomparable_by_default() {
        let c = centipede();
        let e = c.empty_index();
        for z in 0..c.leaves().len() {
            assert!(!c.preference(0).comparable(e, z));
        }
        assert!(c.preference(0).weakly(e, e));
    }

    #[test]
    fn pure_strategies_enumerate_owned_nodes() {
        let c = centipede();
        assert_eq!(c.pure_strategies(0).len(), 2);
        assert_eq!(c.pure_strategies(1).len(), 2);
        let p = pd();
        assert_eq!(p.pure_strategies(1).len(), 2);
    }
}
