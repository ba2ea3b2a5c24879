use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number in lowest terms.
pub type Rational = BigRational;

/// Shorthand for the rational `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NonStdError {
    #[error("divergent tail")]
    DivergentTail,
    #[error("discount factor must be positive")]
    NonPositiveDelta,
    #[error("rationals must be p/q: {0:?}")]
    BadRational(String),
    #[error("cannot parse {0:?} as a nonstandard number")]
    BadNumber(String),
    #[error("cannot parse {0:?} as an extended real")]
    BadExtReal(String),
}

/// Parse `p/q` or a bare integer `p`. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, NonStdError> {
    let s = text.trim();
    let bad = || NonStdError::BadRational(s.to_string());
    let int = |part: &str| -> Result<BigInt, NonStdError> {
        let p = part.trim();
        let digits = p.strip_prefix(['-', '+']).unwrap_or(p);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        p.parse::<BigInt>().map_err(|_| bad())
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            Ok(Rational::new(int(n)?, d))
        }
        None => Ok(Rational::from_integer(int(s)?)),
    }
}

/// Sign class of an infinitesimal remainder.
///
/// Declaration order gives `NegEps < Zero < PosEps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Residue {
    NegEps,
    Zero,
    PosEps,
}

impl Residue {
    fn from_sign(x: &Rational) -> Residue {
        if x.is_positive() {
            Residue::PosEps
        } else if x.is_negative() {
            Residue::NegEps
        } else {
            Residue::Zero
        }
    }

    fn combine(self, other: Residue) -> Residue {
        use Residue::*;
        match (self, other) {
            (Zero, r) | (r, Zero) => r,
            (PosEps, PosEps) => PosEps,
            (NegEps, NegEps) => NegEps,
            _ => Zero,
        }
    }

    fn flip(self) -> Residue {
        match self {
            Residue::NegEps => Residue::PosEps,
            Residue::Zero => Residue::Zero,
            Residue::PosEps => Residue::NegEps,
        }
    }
}

/// The quantity `tau_coef * tau + unit_coef (+ residue)`.
///
/// Field order matters: the derived ordering is lexicographic in
/// `(tau_coef, unit_coef, residue)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonStdNum {
    tau_coef: Rational,
    unit_coef: Rational,
    residue: Residue,
}

impl NonStdNum {
    pub fn new(tau_coef: Rational, unit_coef: Rational, residue: Residue) -> Self {
        NonStdNum { tau_coef, unit_coef, residue }
    }

    pub fn zero() -> Self {
        Self::finite(Rational::zero())
    }

    pub fn finite(q: Rational) -> Self {
        NonStdNum::new(Rational::zero(), q, Residue::Zero)
    }

    pub fn int(n: i64) -> Self {
        Self::finite(Rational::from_integer(n.into()))
    }

    /// The huge parameter itself.
    pub fn tau() -> Self {
        NonStdNum::new(Rational::one(), Rational::zero(), Residue::Zero)
    }

    /// `a * tau + b` with no residue.
    pub fn affine(a: Rational, b: Rational) -> Self {
        NonStdNum::new(a, b, Residue::Zero)
    }

    pub fn eps() -> Self {
        NonStdNum::new(Rational::zero(), Rational::zero(), Residue::PosEps)
    }

    pub fn tau_coef(&self) -> &Rational {
        &self.tau_coef
    }

    pub fn unit_coef(&self) -> &Rational {
        &self.unit_coef
    }

    pub fn residue(&self) -> Residue {
        self.residue
    }

    /// True when the tau coefficient vanishes.
    pub fn is_limited(&self) -> bool {
        self.tau_coef.is_zero()
    }

    pub fn with_residue(mut self, residue: Residue) -> Self {
        self.residue = residue;
        self
    }

    /// Divide by tau: `(a*tau + b)/tau = a + b/tau`, where `b/tau` becomes a
    /// residue carrying the sign of `b`. An existing residue shrinks further
    /// and only survives when `b` is zero.
    pub fn over_tau(&self) -> Self {
        let residue = if self.unit_coef.is_zero() {
            self.residue
        } else {
            Residue::from_sign(&self.unit_coef)
        };
        NonStdNum::new(Rational::zero(), self.tau_coef.clone(), residue)
    }

    /// Numeric value at a concrete `tau`, ignoring the residue.
    pub fn eval_at(&self, tau: &Rational) -> Rational {
        &self.tau_coef * tau + &self.unit_coef
    }

    /// The monad this number belongs to, as an extended rational.
    pub fn collapse(&self) -> ExtReal {
        if self.tau_coef.is_positive() {
            ExtReal::PosInf
        } else if self.tau_coef.is_negative() {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(self.unit_coef.clone())
        }
    }

    pub fn indiscernible(&self, other: &NonStdNum) -> bool {
        self.collapse() == other.collapse()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let residue = if q.is_zero() {
            Residue::Zero
        } else if q.is_negative() {
            self.residue.flip()
        } else {
            self.residue
        };
        NonStdNum::new(&self.tau_coef * q, &self.unit_coef * q, residue)
    }
}

impl Add for &NonStdNum {
    type Output = NonStdNum;
    fn add(self, rhs: &NonStdNum) -> NonStdNum {
        NonStdNum::new(
            &self.tau_coef + &rhs.tau_coef,
            &self.unit_coef + &rhs.unit_coef,
            self.residue.combine(rhs.residue),
        )
    }
}

impl Add for NonStdNum {
    type Output = NonStdNum;
    fn add(self, rhs: NonStdNum) -> NonStdNum {
        &self + &rhs
    }
}

impl Neg for &NonStdNum {
    type Output = NonStdNum;
    fn neg(self) -> NonStdNum {
        NonStdNum::new(-&self.tau_coef, -&self.unit_coef, self.residue.flip())
    }
}

impl Neg for NonStdNum {
    type Output = NonStdNum;
    fn neg(self) -> NonStdNum {
        -&self
    }
}

impl Sub for &NonStdNum {
    type Output = NonStdNum;
    fn sub(self, rhs: &NonStdNum) -> NonStdNum {
        self + &(-rhs)
    }
}

impl Sub for NonStdNum {
    type Output = NonStdNum;
    fn sub(self, rhs: NonStdNum) -> NonStdNum {
        &self - &rhs
    }
}

impl Mul<&Rational> for &NonStdNum {
    type Output = NonStdNum;
    fn mul(self, q: &Rational) -> NonStdNum {
        self.scale(q)
    }
}

impl std::iter::Sum for NonStdNum {
    fn sum<I: Iterator<Item = NonStdNum>>(iter: I) -> NonStdNum {
        iter.fold(NonStdNum::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for NonStdNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.tau_coef.is_zero() {
            if self.tau_coef.is_one() {
                out.push_str("tau");
            } else if (-&self.tau_coef).is_one() {
                out.push_str("-tau");
            } else {
                out.push_str(&format!("{}*tau", self.tau_coef));
            }
            if self.unit_coef.is_positive() {
                out.push_str(&format!(" + {}", self.unit_coef));
            } else if self.unit_coef.is_negative() {
                out.push_str(&format!(" - {}", -&self.unit_coef));
            }
        } else {
            out.push_str(&self.unit_coef.to_string());
        }
        match self.residue {
            Residue::PosEps => out.push_str(" +eps"),
            Residue::NegEps => out.push_str(" -eps"),
            Residue::Zero => {}
        }
        f.write_str(&out)
    }
}

impl FromStr for NonStdNum {
    type Err = NonStdError;

    /// Accepts sums of terms such as `2*tau - 3/2 +eps`, `tau`, `-1/2*tau`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || NonStdError::BadNumber(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, c) in compact.char_indices() {
            if (c == '+' || c == '-') && i > 0 && !compact[..i].ends_with(['/', '*']) {
                terms.push((negative, std::mem::take(&mut current)));
                negative = c == '-';
            } else if (c == '+' || c == '-') && i == 0 {
                negative = c == '-';
            } else {
                current.push(c);
            }
        }
        terms.push((negative, current));

        let mut value = NonStdNum::zero();
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(bad());
            }
            let signed = |x: NonStdNum| if neg { -x } else { x };
            if term == "eps" {
                value = value + signed(NonStdNum::eps());
            } else if term == "tau" {
                value = value + signed(NonStdNum::tau());
            } else if let Some(coef) = term.strip_suffix("*tau") {
                let q = parse_rational(coef).map_err(|_| bad())?;
                value = value + signed(NonStdNum::affine(q, Rational::zero()));
            } else {
                let q = parse_rational(&term).map_err(|_| bad())?;
                value = value + signed(NonStdNum::finite(q));
            }
        }
        Ok(value)
    }
}

/// Rationals extended with two infinite endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtReal {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtReal {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtReal::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl From<Rational> for ExtReal {
    fn from(q: Rational) -> Self {
        ExtReal::Finite(q)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(q) => write!(f, "{q}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = NonStdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" => Ok(ExtReal::NegInf),
            "+inf" | "inf" => Ok(ExtReal::PosInf),
            other => parse_rational(other)
                .map(ExtReal::Finite)
                .map_err(|_| NonStdError::BadExtReal(s.to_string())),
        }
    }
}

fn pow(delta: &Rational, e: u32) -> Rational {
    num_traits::pow(delta.clone(), e as usize)
}

/// `sum_{j < count} delta^(first_exponent + j)`.
pub fn geometric_sum(
    delta: &Rational,
    first_exponent: u32,
    count: u32,
) -> Result<Rational, NonStdError> {
    if !delta.is_positive() {
        return Err(NonStdError::NonPositiveDelta);
    }
    if delta.is_one() {
        return Ok(Rational::from_integer(count.into()));
    }
    let one = Rational::one();
    Ok(pow(delta, first_exponent) * (&one - pow(delta, count)) / (&one - delta))
}

/// `delta^first_exponent / (1 - delta)`, the sum of the infinite tail.
pub fn geometric_tail(delta: &Rational, first_exponent: u32) -> Result<Rational, NonStdError> {
    if !delta.is_positive() {
        return Err(NonStdError::NonPositiveDelta);
    }
    if delta >= &Rational::one() {
        return Err(NonStdError::DivergentTail);
    }
    Ok(pow(delta, first_exponent) / (Rational::one() - delta))
}

/// Compare by monads: `Equal` whenever the two collapse to the same point.
pub fn cmp_collapsed(x: &NonStdNum, y: &NonStdNum) -> Ordering {
    x.collapse().cmp(&y.collapse())
}
