//! The plain-text game description format.
//!
//! ```text
//! game: chain-store
//! players: LS outside, CS core
//! tree:
//!   @LS
//!     in @CS
//!       C
//!       A
//!     out
//! payoffs:
//!   (in,C): 2 2
//!   (in,A): 0 0
//!   (out): 1 5
//! connected: (in,C) (in,A) (out)
//! ```
//!
//! A joint move is written `@1,2: S C | S C`; its children default to
//! leaves and only subtrees need a line. Optional keys are
//! `extra: completion-bonus <terminal> <p/q>`,
//! `extra: late-penalty <terminal> <p/q>` and `mixed: 2/3 1/3 | 1/3 2/3`.

use std::fmt::Write;

use nonstd::{parse_rational, Rational};
use repgame::catalog::CatalogEntry;
use repgame::criteria::{Extra, PayoffModel};
use repgame::order::Relation;
use repgame::game::{GameError, GameForm, NodeId, PayoffTable, Player, Tree};
use repgame::repeated::{Horizon, RepeatedGameSpec};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescribeError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{invariant} violated: {detail}")]
    Invalid { invariant: &'static str, detail: String },
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> DescribeError {
    DescribeError::Parse { line, column, message: message.into() }
}

fn invalid(invariant: &'static str, detail: impl Into<String>) -> DescribeError {
    DescribeError::Invalid { invariant, detail: detail.into() }
}

/// A constituent game with everything needed to repeat it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameDescription {
    pub name: Option<String>,
    /// Without preferences; they follow from `table`.
    pub game: GameForm,
    pub table: PayoffTable,
    pub extra: Option<Extra>,
    pub connected: Vec<String>,
    pub mixed: Option<Vec<Vec<Rational>>>,
}

impl GameDescription {
    pub fn from_entry(entry: &CatalogEntry) -> Self {
        let mut game = entry.game.clone();
        let size = game.leaves().len() + 1;
        for p in 0..game.players().len() {
            game.set_preference(p, Relation::identity(size)).expect("identity is a preorder");
        }
        GameDescription {
            name: Some(entry.id.to_string()),
            game,
            table: entry.table.clone(),
            extra: entry.extra.clone(),
            connected: entry.connected.iter().map(|s| s.to_string()).collect(),
            mixed: entry.mixed.clone(),
        }
    }

    pub fn model(&self) -> PayoffModel {
        PayoffModel { table: self.table.clone(), extra: self.extra.clone() }
    }

    pub fn spec(&self, horizon: Horizon) -> Result<RepeatedGameSpec, DescribeError> {
        let g = self.game.clone().with_payoffs(&self.table).map_err(|e| invalid("payoff totality", e.to_string()))?;
        let names: Vec<&str> = self.connected.iter().map(String::as_str).collect();
        RepeatedGameSpec::new(g, Some(self.model()), &names, horizon).map_err(|e| invalid("C ⊆ Z", e.to_string()))
    }
}

#[derive(Debug)]
struct Line<'a> {
    number: usize,
    indent: usize,
    text: &'a str,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(k, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim_end();
            let trimmed = body.trim_start();
            (!trimmed.is_empty()).then(|| Line { number: k + 1, indent: body.len() - trimmed.len(), text: trimmed })
        })
        .collect()
}

struct Header {
    movers: Vec<usize>,
    actions: Option<Vec<Vec<String>>>,
}

fn player_index(players: &[Player], name: &str, line: &Line) -> Result<usize, DescribeError> {
    players
        .iter()
        .position(|p| p.name == name)
        .ok_or_else(|| invalid("totality of the player function", format!("line {}: unknown player {name:?}", line.number)))
}

/// `@P` or `@P,Q: a b | c d`, starting at byte `at` of the line.
fn parse_header(players: &[Player], line: &Line, at: usize) -> Result<Header, DescribeError> {
    let body = &line.text[at..];
    let column = line.indent + at + 1;
    let body = body.strip_prefix('@').ok_or_else(|| parse_err(line.number, column, "expected '@' and a player"))?;
    let (who, lists) = match body.split_once(':') {
        Some((w, l)) => (w, Some(l)),
        None => (body, None),
    };
    let names: Vec<&str> = who.split(',').map(str::trim).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(parse_err(line.number, column + 1, "empty player name"));
    }
    let movers = names.iter().map(|n| player_index(players, n, line)).collect::<Result<Vec<_>, _>>()?;
    let actions = match lists {
        None if movers.len() > 1 => {
            return Err(parse_err(line.number, column, "a joint move lists its actions after ':'"));
        }
        None => None,
        Some(_) if movers.len() == 1 => {
            return Err(parse_err(line.number, column, "a single mover's actions are its child lines"));
        }
        Some(l) => {
            let lists: Vec<Vec<String>> =
                l.split('|').map(|a| a.split_whitespace().map(str::to_string).collect()).collect();
            if lists.len() != movers.len() || lists.iter().any(Vec::is_empty) {
                return Err(parse_err(line.number, column, "need one nonempty action list per mover"));
            }
            Some(lists)
        }
    };
    Ok(Header { movers, actions })
}

/// Children of the header on `lines[at]`, which sit one level deeper.
fn parse_subtree(players: &[Player], lines: &[Line], at: usize, header: Header) -> Result<(Tree, usize), DescribeError> {
    let parent = &lines[at];
    let mut next = at + 1;
    let mut children: Vec<(String, Tree)> = Vec::new();
    let child_indent = lines.get(next).map(|l| l.indent).filter(|i| *i > parent.indent);
    while let Some(indent) = child_indent {
        let Some(line) = lines.get(next) else { break };
        if line.indent <= parent.indent {
            break;
        }
        if line.indent != indent {
            return Err(invalid(
                "prefix-closure",
                format!("line {}: indentation matches no open history", line.number),
            ));
        }
        let (label, rest) = match line.text.find('@') {
            Some(k) => (line.text[..k].trim(), Some(k)),
            None => (line.text.trim(), None),
        };
        if label.is_empty() || label.contains(char::is_whitespace) {
            return Err(parse_err(line.number, line.indent + 1, "expected one action label"));
        }
        let (sub, after) = match rest {
            Some(k) => {
                let h = parse_header(players, line, k)?;
                parse_subtree(players, lines, next, h)?
            }
            None => {
                if lines.get(next + 1).is_some_and(|l| l.indent > line.indent) {
                    return Err(invalid(
                        "totality of the player function",
                        format!("line {}: history continues but no player moves", line.number),
                    ));
                }
                (Tree::Leaf, next + 1)
            }
        };
        children.push((label.to_string(), sub));
        next = after;
    }
    let tree = match header.actions {
        None => {
            if children.is_empty() {
                return Err(invalid("totality of the player function", format!("line {}: mover without actions", parent.number)));
            }
            Tree::Move { player: header.movers[0], branches: children }
        }
        Some(actions) => {
            let labels = joint_labels(&actions);
            let mut subtrees = vec![Tree::Leaf; labels.len()];
            for (label, sub) in children {
                let k = labels.iter().position(|l| *l == label).ok_or_else(|| {
                    invalid("prefix-closure", format!("line {}: {label:?} is not a joint action here", parent.number))
                })?;
                subtrees[k] = sub;
            }
            Tree::Joint { movers: header.movers, actions, children: subtrees }
        }
    };
    Ok((tree, next))
}

fn joint_labels(actions: &[Vec<String>]) -> Vec<String> {
    let mut out = vec![String::new()];
    for list in actions {
        out = out.iter().flat_map(|p| list.iter().map(move |a| format!("{p}{a}"))).collect();
    }
    out
}

fn rational(text: &str, line: &Line, column: usize) -> Result<Rational, DescribeError> {
    parse_rational(text).map_err(|e| parse_err(line.number, column, e.to_string()))
}

fn column_of(line: &Line, part: &str) -> usize {
    let offset = part.as_ptr() as usize - line.text.as_ptr() as usize;
    line.indent + offset + 1
}

pub fn parse_game_description(text: &str) -> Result<GameDescription, DescribeError> {
    let lines = lines(text);
    let mut name = None;
    let mut players: Option<Vec<Player>> = None;
    let mut tree: Option<Tree> = None;
    let mut payoff_rows: Vec<(String, Vec<Rational>, usize)> = Vec::new();
    let mut connected: Option<Vec<String>> = None;
    let mut extra_line: Option<(usize, Vec<String>)> = None;
    let mut mixed = None;
    let mut k = 0;
    while k < lines.len() {
        let line = &lines[k];
        if line.indent != 0 {
            return Err(parse_err(line.number, 1, "expected a key at the start of the line"));
        }
        let (key, value) = line
            .text
            .split_once(':')
            .ok_or_else(|| parse_err(line.number, 1, "expected 'key: value'"))?;
        let value = value.trim();
        k += 1;
        match key.trim() {
            "game" => name = Some(value.to_string()),
            "players" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    let words: Vec<&str> = part.split_whitespace().collect();
                    let p = match words.as_slice() {
                        [n] | [n, "core"] => Player::core(n),
                        [n, "outside"] => Player::outside(n),
                        _ => return Err(parse_err(line.number, column_of(line, part), "expected 'NAME [core|outside]'")),
                    };
                    list.push(p);
                }
                players = Some(list);
            }
            "tree" => {
                let ps = players.as_ref().ok_or_else(|| parse_err(line.number, 1, "players must precede the tree"))?;
                let root = lines.get(k).filter(|l| l.indent > 0).ok_or_else(|| parse_err(line.number, 1, "empty tree"))?;
                let header = parse_header(ps, root, 0)?;
                let (t, next) = parse_subtree(ps, &lines, k, header)?;
                if let Some(stray) = lines.get(next).filter(|l| l.indent > 0) {
                    return Err(invalid("prefix-closure", format!("line {}: more than one root", stray.number)));
                }
                tree = Some(t);
                k = next;
            }
            "payoffs" => {
                while let Some(row) = lines.get(k).filter(|l| l.indent > 0) {
                    let (terminal, values) = row
                        .text
                        .rsplit_once(':')
                        .ok_or_else(|| parse_err(row.number, row.indent + 1, "expected 'TERMINAL: v1 v2 ...'"))?;
                    let parsed = values
                        .split_whitespace()
                        .map(|v| rational(v, row, column_of(row, v)))
                        .collect::<Result<Vec<_>, _>>()?;
                    payoff_rows.push((terminal.trim().to_string(), parsed, row.number));
                    k += 1;
                }
            }
            "connected" => connected = Some(value.split_whitespace().map(str::to_string).collect()),
            "extra" => extra_line = Some((line.number, value.split_whitespace().map(str::to_string).collect())),
            "mixed" => {
                let rows = value
                    .split('|')
                    .map(|r| r.split_whitespace().map(|v| rational(v, line, column_of(line, v))).collect())
                    .collect::<Result<Vec<Vec<Rational>>, _>>()?;
                mixed = Some(rows);
            }
            other => return Err(parse_err(line.number, 1, format!("unknown key {other:?}"))),
        }
    }
    let players = players.ok_or_else(|| parse_err(1, 1, "missing 'players:'"))?;
    let tree = tree.ok_or_else(|| parse_err(1, 1, "missing 'tree:'"))?;
    let game = GameForm::new(players, tree).map_err(game_invalid)?;

    let rows: Vec<(&str, Vec<Rational>)> = payoff_rows.iter().map(|(n, v, _)| (n.as_str(), v.clone())).collect();
    let table = PayoffTable::from_named(&game, &rows).map_err(|e| invalid("payoff totality", e.to_string()))?;
    let connected = connected.ok_or_else(|| parse_err(1, 1, "missing 'connected:'"))?;
    for c in &connected {
        if game.leaf_by_name(c).is_none() {
            return Err(invalid("C ⊆ Z", format!("{c} is not a terminal history")));
        }
    }
    let extra = match extra_line {
        None => None,
        Some((number, words)) => Some(parse_extra(&game, number, &words)?),
    };
    Ok(GameDescription { name, game, table, extra, connected, mixed })
}

fn game_invalid(e: GameError) -> DescribeError {
    match e {
        GameError::DuplicateAction { .. } => invalid("distinct actions", e.to_string()),
        GameError::UnknownPlayer(_) | GameError::NoCorePlayer => invalid("totality of the player function", e.to_string()),
        other => invalid("tree structure", other.to_string()),
    }
}

fn parse_extra(game: &GameForm, number: usize, words: &[String]) -> Result<Extra, DescribeError> {
    let [kind, terminal, amount] = words else {
        return Err(parse_err(number, 1, "expected 'extra: KIND TERMINAL p/q'"));
    };
    let leaf = game
        .leaf_by_name(terminal)
        .and_then(|l| game.leaf_index(l))
        .ok_or_else(|| invalid("C ⊆ Z", format!("{terminal} is not a terminal history")))?;
    let value = parse_rational(amount).map_err(|e| parse_err(number, 1, e.to_string()))?;
    match kind.as_str() {
        "completion-bonus" => Ok(Extra::CompletionBonus { leaf, per_tau: value }),
        "late-penalty" => Ok(Extra::LatePenalty { leaf, per_period: value }),
        other => Err(parse_err(number, 1, format!("unknown extra {other:?}"))),
    }
}

fn write_node(out: &mut String, g: &GameForm, node: NodeId, depth: usize, label: Option<&str>) {
    let n = g.node(node);
    let pad = "  ".repeat(depth);
    let head = if n.is_leaf() {
        String::new()
    } else {
        let movers: Vec<&str> = n.movers.iter().map(|m| g.players()[*m].name.as_str()).collect();
        if n.movers.len() == 1 {
            format!("@{}", movers[0])
        } else {
            let lists: Vec<String> = n.actions.iter().map(|a| a.join(" ")).collect();
            format!("@{}: {}", movers.join(","), lists.join(" | "))
        }
    };
    let text = match label {
        Some(l) if head.is_empty() => l.to_string(),
        Some(l) => format!("{l} {head}"),
        None => head,
    };
    let _ = writeln!(out, "{pad}{text}");
    let joint = n.movers.len() > 1;
    for c in &n.children {
        if joint && g.node(*c).is_leaf() {
            continue;
        }
        write_node(out, g, *c, depth + 1, g.node(*c).label.as_deref());
    }
}

/// Canonical text; parsing it gives back an equal description.
pub fn export(d: &GameDescription) -> String {
    let g = &d.game;
    let mut out = String::new();
    if let Some(n) = &d.name {
        let _ = writeln!(out, "game: {n}");
    }
    let players: Vec<String> = g
        .players()
        .iter()
        .map(|p| format!("{} {}", p.name, if p.outside { "outside" } else { "core" }))
        .collect();
    let _ = writeln!(out, "players: {}", players.join(", "));
    let _ = writeln!(out, "tree:");
    write_node(&mut out, g, g.root(), 1, None);
    let _ = writeln!(out, "payoffs:");
    for (k, leaf) in g.leaves().iter().enumerate() {
        let values: Vec<String> = d.table.rows()[k].iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "  {}: {}", g.terminal_name(*leaf), values.join(" "));
    }
    let _ = writeln!(out, "connected: {}", d.connected.join(" "));
    match &d.extra {
        Some(Extra::CompletionBonus { leaf, per_tau }) => {
            let _ = writeln!(out, "extra: completion-bonus {} {per_tau}", g.terminal_name(g.leaves()[*leaf]));
        }
        Some(Extra::LatePenalty { leaf, per_period }) => {
            let _ = writeln!(out, "extra: late-penalty {} {per_period}", g.terminal_name(g.leaves()[*leaf]));
        }
        None => {}
    }
    if let Some(m) = &d.mixed {
        let rows: Vec<String> = m.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
        let _ = writeln!(out, "mixed: {}", rows.join(" | "));
    }
    out
}
