//! Payoff criteria over whole histories given as constant runs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nonstd::{
    geometric_sum, geometric_tail, parse_rational, ExtReal, NonStdError, NonStdNum, Rational, Segmented,
    ViewKind,
};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::game::{PayoffTable, PlayerId};

/// What happens in one period of a whole history.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    /// The game already ended.
    Empty,
    /// A constituent terminal, by leaf index.
    Term(usize),
    /// A repeating block of constituent terminals, for bird's eye runs.
    Cycle(Vec<usize>),
}

pub type WholeHistory = Segmented<Payload>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("criterion needs a {expected} history")]
    WrongView { expected: ViewKind },
    #[error("cycle payloads only make sense under limit of means")]
    CycleNotAllowed,
    #[error("discount factor must lie in (0,1), got {0}")]
    BadDelta(String),
    #[error("histories have different horizons")]
    MisalignedHorizons,
    #[error("unknown criterion {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Number(#[from] NonStdError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Criterion {
    Discounted(Rational),
    Simple,
    Overtaking,
    LimitOfMeans,
}

impl Criterion {
    pub fn discounted(delta: Rational) -> Result<Self, CriterionError> {
        if delta.is_positive() && delta < Rational::one() {
            Ok(Criterion::Discounted(delta))
        } else {
            Err(CriterionError::BadDelta(delta.to_string()))
        }
    }

    pub fn view(&self) -> ViewKind {
        match self {
            Criterion::LimitOfMeans => ViewKind::BirdsEye,
            _ => ViewKind::Perspective,
        }
    }

    /// Numeric value, where the criterion has one. Overtaking only compares.
    pub fn value(&self, h: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<Option<ExtReal>, CriterionError> {
        Ok(match self {
            Criterion::Discounted(d) => Some(eval_discounted(h, u, player, d)?),
            Criterion::Simple => Some(eval_simple(h, u, player)?),
            Criterion::Overtaking => None,
            Criterion::LimitOfMeans => Some(ExtReal::Finite(eval_limit_means(h, u, player)?)),
        })
    }

    /// How `a` ranks against `b` for `player`.
    pub fn compare(&self, a: &WholeHistory, b: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<Ordering, CriterionError> {
        match self {
            Criterion::Overtaking => cmp_overtaking(a, b, u, player),
            _ => Ok(self.value(a, u, player)?.cmp(&self.value(b, u, player)?)),
        }
    }

    pub fn flags(&self) -> Flags {
        criterion_flags(self)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Discounted(d) => write!(f, "discounted:{d}"),
            Criterion::Simple => f.write_str("simple"),
            Criterion::Overtaking => f.write_str("overtaking"),
            Criterion::LimitOfMeans => f.write_str("limit-of-means"),
        }
    }
}

impl FromStr for Criterion {
    type Err = CriterionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "simple" => Ok(Criterion::Simple),
            "overtaking" => Ok(Criterion::Overtaking),
            "limit-of-means" => Ok(Criterion::LimitOfMeans),
            other => match other.strip_prefix("discounted:") {
                Some(d) => Criterion::discounted(parse_rational(d)?),
                None => Err(CriterionError::Unknown(other.to_string())),
            },
        }
    }
}

/// Payoff terms that are not a per-period table lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extra {
    /// `per_tau * tau` on top when every period of a huge history plays `leaf`.
    CompletionBonus { leaf: usize, per_tau: Rational },
    /// Each `leaf` period not within finite distance of the end also costs
    /// `per_period`, charged in the distant future. Sums only.
    LatePenalty { leaf: usize, per_period: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffModel {
    pub table: PayoffTable,
    pub extra: Option<Extra>,
}

impl From<PayoffTable> for PayoffModel {
    fn from(table: PayoffTable) -> Self {
        PayoffModel { table, extra: None }
    }
}

impl PayoffModel {
    fn unit(&self, payload: &Payload, player: PlayerId) -> Result<Rational, CriterionError> {
        match payload {
            Payload::Empty => Ok(Rational::zero()),
            Payload::Term(l) => Ok(self.table.get(*l, player).clone()),
            Payload::Cycle(_) => Err(CriterionError::CycleNotAllowed),
        }
    }

    fn mean(&self, payload: &Payload, player: PlayerId) -> Rational {
        match payload {
            Payload::Empty => Rational::zero(),
            Payload::Term(l) => self.table.get(*l, player).clone(),
            Payload::Cycle(ls) => {
                let total: Rational = ls.iter().map(|l| self.table.get(*l, player).clone()).sum();
                total / Rational::from_integer((ls.len() as i64).into())
            }
        }
    }
}

fn require_view(h: &WholeHistory, view: ViewKind) -> Result<(), CriterionError> {
    if h.view() == view {
        Ok(())
    } else {
        Err(CriterionError::WrongView { expected: view })
    }
}

fn finite_exponent(x: &NonStdNum) -> u32 {
    x.unit_coef().to_integer().to_u32().expect("finite period index fits in u32")
}

/// Discounted sum with `delta` in (0,1). Runs starting at a huge period
/// weigh `delta^huge`, which collapses to zero.
pub fn eval_discounted(h: &WholeHistory, u: &PayoffModel, player: PlayerId, delta: &Rational) -> Result<ExtReal, CriterionError> {
    require_view(h, ViewKind::Perspective)?;
    if !delta.is_positive() || delta >= &Rational::one() {
        return Err(CriterionError::BadDelta(delta.to_string()));
    }
    let mut total = Rational::zero();
    for (seg, start) in h.segments().iter().zip(h.starts()) {
        let value = u.unit(&seg.payload, player)?;
        if !start.is_limited() || value.is_zero() {
            continue;
        }
        let first = finite_exponent(&start) - 1;
        let weight = if seg.len.is_limited() {
            geometric_sum(delta, first, finite_exponent(&seg.len))?
        } else {
            geometric_tail(delta, first)?
        };
        total += weight * value;
    }
    Ok(ExtReal::Finite(total))
}

/// Exact `sum u * length`, before collapsing.
pub fn simple_total(h: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<NonStdNum, CriterionError> {
    require_view(h, ViewKind::Perspective)?;
    let mut total = NonStdNum::zero();
    for (seg, start) in h.segments().iter().zip(h.starts()) {
        let value = u.unit(&seg.payload, player)?;
        total = &total + &(&seg.len * &value);
        if let Some(Extra::LatePenalty { leaf, per_period }) = &u.extra {
            let remaining = h.horizon() - &start;
            if seg.payload == Payload::Term(*leaf) && !remaining.is_limited() {
                total = &total - &(&seg.len * per_period);
            }
        }
    }
    if let Some(Extra::CompletionBonus { leaf, per_tau }) = &u.extra {
        let complete = h.is_huge() && h.segments().iter().all(|s| s.payload == Payload::Term(*leaf));
        if complete {
            total = &total + &(&NonStdNum::tau() * per_tau);
        }
    }
    Ok(total)
}

pub fn eval_simple(h: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<ExtReal, CriterionError> {
    Ok(simple_total(h, u, player)?.collapse())
}

/// Integral of the per-period differences `a - b`: its tau part comes from
/// the huge runs and its unit part from the finitely many remaining periods.
pub fn overtaking_difference(a: &WholeHistory, b: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<NonStdNum, CriterionError> {
    if a.horizon() != b.horizon() {
        return Err(CriterionError::MisalignedHorizons);
    }
    Ok(&simple_total(a, u, player)? - &simple_total(b, u, player)?)
}

pub fn cmp_overtaking(a: &WholeHistory, b: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<Ordering, CriterionError> {
    let diff = overtaking_difference(a, b, u, player)?;
    let zero = NonStdNum::zero();
    // the residue never arises from integer-length runs; compare coefficients
    Ok((diff.tau_coef(), diff.unit_coef()).cmp(&(zero.tau_coef(), zero.unit_coef())))
}

/// Fraction-weighted average; runs of finite length weigh nothing.
pub fn eval_limit_means(h: &WholeHistory, u: &PayoffModel, player: PlayerId) -> Result<Rational, CriterionError> {
    require_view(h, ViewKind::BirdsEye)?;
    let fraction_total = h.horizon().tau_coef().clone();
    if fraction_total.is_zero() {
        return Err(CriterionError::WrongView { expected: ViewKind::BirdsEye });
    }
    let total: Rational = h.segments().iter().map(|s| s.len.tau_coef() * u.mean(&s.payload, player)).sum();
    Ok(total / fraction_total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flags {
    pub weak_separability: bool,
    pub strict_separability: bool,
    pub huge_transitivity: bool,
    pub sooner_better: bool,
    pub commutativity: bool,
    /// Flags that are derived here rather than claimed by a lemma.
    pub derived: Vec<&'static str>,
}

pub fn criterion_flags(c: &Criterion) -> Flags {
    let (ws, ss, ht, sb, cm, derived): (bool, bool, bool, bool, bool, Vec<&'static str>) = match c {
        Criterion::Discounted(_) => (true, false, true, true, false, vec![]),
        Criterion::Simple => (true, false, true, false, true, vec!["sooner_better"]),
        Criterion::Overtaking => (true, true, true, false, true, vec!["sooner_better", "commutativity"]),
        Criterion::LimitOfMeans => (true, false, false, false, true, vec![]),
    };
    Flags {
        weak_separability: ws,
        strict_separability: ss,
        huge_transitivity: ht,
        sooner_better: sb,
        commutativity: cm,
        derived,
    }
}
