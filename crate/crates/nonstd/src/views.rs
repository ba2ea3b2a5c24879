//! Temporal views on `{1, ..., tau}` and whole histories presented as
//! finitely many constant runs.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::num::{ExtReal, NonStdNum, Rational, Residue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViewKind {
    Perspective,
    BirdsEye,
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViewKind::Perspective => "perspective",
            ViewKind::BirdsEye => "birdseye",
        })
    }
}

/// A monad of one of the two views, named by its choice point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PositionClass {
    /// Period `n + 1`.
    NearFuture(u64),
    DistantFuture,
    /// Period `tau - n`.
    NearEnd(u64),
    /// Bird's eye choice point `t_(i,j)`.
    MonadPoint(u32, u64),
    /// Open run of monads between two fractions of the horizon.
    FractionInterval(Rational, Rational),
}

impl PositionClass {
    pub fn view(&self) -> ViewKind {
        match self {
            PositionClass::NearFuture(_)
            | PositionClass::DistantFuture
            | PositionClass::NearEnd(_) => ViewKind::Perspective,
            PositionClass::MonadPoint(..) | PositionClass::FractionInterval(..) => {
                ViewKind::BirdsEye
            }
        }
    }
}

impl fmt::Display for PositionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionClass::NearFuture(n) => write!(f, "near-future({n})"),
            PositionClass::DistantFuture => f.write_str("distant-future"),
            PositionClass::NearEnd(n) => write!(f, "near-end({n})"),
            PositionClass::MonadPoint(i, j) => write!(f, "monad({i},{j})"),
            PositionClass::FractionInterval(lo, hi) => write!(f, "interval({lo},{hi})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("mixed views: expected {expected} classes only")]
    MixedView { expected: ViewKind },
    #[error("monad index out of range: ({i}, {j})")]
    OutOfRange { i: u32, j: u64 },
    #[error("bad interval [{lo}, {hi}]")]
    BadInterval { lo: Rational, hi: Rational },
    #[error("bad segment length {0}")]
    BadLength(String),
    #[error("segment lengths sum to {found}, expected {expected}")]
    SumMismatch { expected: String, found: String },
}

/// Choice point `t_i` of the perspective view.
pub fn perspective_choice_point(i: u64) -> PositionClass {
    if i == 0 {
        PositionClass::DistantFuture
    } else if i % 2 == 1 {
        PositionClass::NearEnd((i - 1) / 2)
    } else {
        PositionClass::NearFuture(i / 2 - 1)
    }
}

/// Class of the concrete period `t` of a horizon `horizon`, where "finite"
/// means closer than `cutoff` periods to either end.
pub fn perspective_class_of(t: u64, horizon: u64, cutoff: u64) -> PositionClass {
    assert!(t >= 1 && t <= horizon, "period {t} outside 1..={horizon}");
    if t <= cutoff {
        PositionClass::NearFuture(t - 1)
    } else if horizon - t < cutoff {
        PositionClass::NearEnd(horizon - t)
    } else {
        PositionClass::DistantFuture
    }
}

/// Perspective measure of a finite set of classes: infinite as soon as the
/// distant monad is included, otherwise the number of classes.
///
/// The measure is the limit of Borel approximating sequences. At a concrete
/// `tau = 2^20` the distant monad's generating sets `[2^k, tau - 2^k + 1]`
/// lose only `O(2^k)` points, so their sizes stay huge for every finite `k`:
///
/// ```
/// let tau: u64 = 1 << 20;
/// for k in 0..=20u32 {
///     let lo = 1u64 << k;
///     let hi = tau + 1 - lo;
///     let size = (1..=tau).filter(|t| *t == tau / 2 || (*t >= lo && *t <= hi)).count() as u64;
///     let shown = tau - if k >= 1 { 1 << k } else { 0 };
///     // direct count and displayed approximation agree up to 2^k
///     assert!(size.abs_diff(shown) <= (1 << k));
///     if k <= 1 { assert_eq!(size, shown); }
/// }
/// assert_eq!(
///     nonstd::perspective_measure(&[nonstd::PositionClass::DistantFuture]).unwrap(),
///     nonstd::ExtReal::PosInf
/// );
/// ```
pub fn perspective_measure(points: &[PositionClass]) -> Result<ExtReal, ViewError> {
    if points.iter().any(|p| p.view() != ViewKind::Perspective) {
        return Err(ViewError::MixedView { expected: ViewKind::Perspective });
    }
    let distinct: BTreeSet<&PositionClass> = points.iter().collect();
    if distinct.contains(&PositionClass::DistantFuture) {
        Ok(ExtReal::PosInf)
    } else {
        Ok(ExtReal::Finite(Rational::from_integer((distinct.len() as u64).into())))
    }
}

fn check_monad_index(i: u32, j: u64) -> Result<(), ViewError> {
    let ok = if i < 2 { j == 0 } else { i - 2 < 63 && j < (1u64 << (i - 2)) };
    if ok {
        Ok(())
    } else {
        Err(ViewError::OutOfRange { i, j })
    }
}

/// Position of the bird's eye choice point `t_(i,j)` as a fraction of tau.
pub fn birdseye_choice_point(i: u32, j: u64) -> Result<Rational, ViewError> {
    check_monad_index(i, j)?;
    Ok(match i {
        0 => Rational::zero(),
        1 => Rational::one(),
        _ => Rational::new((2 * j + 1).into(), num_bigint::BigInt::from(1u64) << (i - 1)),
    })
}

/// Bird's eye (probability) measure of an interval or of a single monad.
///
/// A monad has measure zero. Its generating sets at `tau = 2^20` have size
/// `tau / 2^(k - 1 + [i < 2])`, which vanishes relative to `tau`:
///
/// ```
/// let tau: i64 = 1 << 20;
/// for k in 2..=20u32 {
///     // interior point t_(2,0) = tau/2 and the end point t_(1,0) = tau
///     for (t, i) in [(tau / 2, 2u32), (tau, 1u32)] {
///         let radius = tau >> k;
///         let size = (1..=tau).filter(|b| (b - t).abs() < radius).count() as i64;
///         let shown = tau >> (k - 1 + u32::from(i < 2));
///         assert!((size - shown).abs() <= 1);
///     }
/// }
/// let p = nonstd::PositionClass::MonadPoint(2, 0);
/// assert_eq!(nonstd::birdseye_measure(&p).unwrap(), nonstd::rat(0, 1));
/// ```
pub fn birdseye_measure(class: &PositionClass) -> Result<Rational, ViewError> {
    match class {
        PositionClass::MonadPoint(i, j) => {
            check_monad_index(*i, *j)?;
            Ok(Rational::zero())
        }
        PositionClass::FractionInterval(lo, hi) => {
            if lo.is_negative() || hi > &Rational::one() || lo >= hi {
                return Err(ViewError::BadInterval { lo: lo.clone(), hi: hi.clone() });
            }
            Ok(hi - lo)
        }
        _ => Err(ViewError::MixedView { expected: ViewKind::BirdsEye }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment<P> {
    pub len: NonStdNum,
    pub payload: P,
}

impl<P> Segment<P> {
    pub fn new(len: NonStdNum, payload: P) -> Self {
        Segment { len, payload }
    }

    pub fn is_huge(&self) -> bool {
        self.len.tau_coef().is_positive()
    }
}

/// A whole history given as consecutive constant runs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segmented<P> {
    view: ViewKind,
    horizon: NonStdNum,
    segments: Vec<Segment<P>>,
}

fn check_len(len: &NonStdNum) -> Result<(), ViewError> {
    let tau = len.tau_coef();
    let ok = len.residue() == Residue::Zero
        && !tau.is_negative()
        && tau <= &Rational::one()
        && (tau.is_positive() || (len.unit_coef().is_integer() && len.unit_coef() >= &Rational::one()));
    if ok {
        Ok(())
    } else {
        Err(ViewError::BadLength(len.to_string()))
    }
}

impl<P: Clone + PartialEq> Segmented<P> {
    /// Runs over the huge horizon `tau`. The total is checked by
    /// [`Segmented::canonicalize`], not here.
    pub fn new(view: ViewKind, segments: Vec<Segment<P>>) -> Result<Self, ViewError> {
        Self::with_horizon(view, NonStdNum::tau(), segments)
    }

    /// Runs over a concrete horizon of `n` periods.
    pub fn finite(n: u64, segments: Vec<Segment<P>>) -> Result<Self, ViewError> {
        Self::with_horizon(ViewKind::Perspective, NonStdNum::int(n as i64), segments)
    }

    pub fn with_horizon(
        view: ViewKind,
        horizon: NonStdNum,
        segments: Vec<Segment<P>>,
    ) -> Result<Self, ViewError> {
        for s in &segments {
            check_len(&s.len)?;
        }
        Ok(Segmented { view, horizon, segments })
    }

    /// Build from `(length, payload)` pairs.
    pub fn from_runs(
        view: ViewKind,
        runs: impl IntoIterator<Item = (NonStdNum, P)>,
    ) -> Result<Self, ViewError> {
        Self::new(view, runs.into_iter().map(|(len, p)| Segment::new(len, p)).collect())
    }

    pub fn view(&self) -> ViewKind {
        self.view
    }

    pub fn horizon(&self) -> &NonStdNum {
        &self.horizon
    }

    pub fn segments(&self) -> &[Segment<P>] {
        &self.segments
    }

    pub fn is_huge(&self) -> bool {
        !self.horizon.is_limited()
    }

    pub fn total(&self) -> NonStdNum {
        self.segments.iter().map(|s| s.len.clone()).sum()
    }

    pub fn with_view(mut self, view: ViewKind) -> Self {
        self.view = view;
        self
    }

    /// Append a run, merging with the last one when payloads agree.
    pub fn push(&mut self, len: NonStdNum, payload: P) -> Result<(), ViewError> {
        check_len(&len)?;
        match self.segments.last_mut() {
            Some(last) if last.payload == payload => last.len = &last.len + &len,
            _ => self.segments.push(Segment::new(len, payload)),
        }
        Ok(())
    }

    /// First period of every segment (periods are numbered from 1).
    pub fn starts(&self) -> Vec<NonStdNum> {
        let mut at = NonStdNum::int(1);
        let mut out = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            out.push(at.clone());
            at = &at + &s.len;
        }
        out
    }

    /// Merge adjacent runs with equal payloads.
    pub fn canonicalize(&self) -> Result<Self, ViewError> {
        let total = self.total();
        if total != self.horizon {
            return Err(ViewError::SumMismatch {
                expected: self.horizon.to_string(),
                found: total.to_string(),
            });
        }
        let mut out = Segmented { view: self.view, horizon: self.horizon.clone(), segments: vec![] };
        for s in &self.segments {
            out.push(s.len.clone(), s.payload.clone())?;
        }
        Ok(out)
    }

    /// Perspective: a single huge run. Bird's eye: no finite runs at all.
    pub fn consistent_with_view(&self, view: ViewKind) -> bool {
        let huge = self.segments.iter().filter(|s| s.is_huge()).count();
        match view {
            ViewKind::Perspective => huge == 1,
            ViewKind::BirdsEye => huge == self.segments.len(),
        }
    }

    /// Expand at a concrete value of tau. Only meant for small test oracles.
    pub fn instantiate(&self, tau: u64) -> Vec<P> {
        let tau = Rational::from_integer(tau.into());
        let mut out = Vec::new();
        for s in &self.segments {
            let len = s.len.eval_at(&tau);
            assert!(len.is_integer() && !len.is_negative(), "length {} at tau", s.len);
            let count: u64 = len.to_integer().try_into().expect("length fits in u64");
            out.extend(std::iter::repeat_n(s.payload.clone(), count as usize));
        }
        out
    }

    pub fn map<Q: Clone + PartialEq>(&self, f: impl Fn(&P) -> Q) -> Segmented<Q> {
        Segmented {
            view: self.view,
            horizon: self.horizon.clone(),
            segments: self.segments.iter().map(|s| Segment::new(s.len.clone(), f(&s.payload))).collect(),
        }
    }
}

impl<P: fmt::Display> fmt::Display for Segmented<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.segments.iter().map(|s| format!("{}*{}", s.payload, s.len)).collect();
        f.write_str(&parts.join(", "))
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::num::rat;

    fn n(s: &str) -> NonStdNum {
        s.parse().unwrap()
    }

    fn hist(view: ViewKind, runs: &[(&str, char)]) -> Segmented<char> {
        Segmented::from_runs(view, runs.iter().map(|(l, p)| (n(l), *p))).unwrap()
    }

    #[test]
    fn perspective_choice_points() {
        assert_eq!(perspective_choice_point(0), PositionClass::DistantFuture);
        assert_eq!(perspective_choice_point(1), PositionClass::NearEnd(0));
        assert_eq!(perspective_choice_point(2), PositionClass::NearFuture(0));
        assert_eq!(perspective_choice_point(7), PositionClass::NearEnd(3));
        assert_eq!(perspective_choice_point(8), PositionClass::NearFuture(3));
    }

    #[test]
    fn perspective_measures() {
        use PositionClass::*;
        assert_eq!(perspective_measure(&[DistantFuture]).unwrap(), ExtReal::PosInf);
        assert_eq!(perspective_measure(&[]).unwrap(), ExtReal::Finite(rat(0, 1)));
        assert_eq!(
            perspective_measure(&[NearFuture(0), NearEnd(3)]).unwrap(),
            ExtReal::Finite(rat(2, 1))
        );
        assert!(perspective_measure(&[NearFuture(0), MonadPoint(0, 0)]).is_err());
    }

    #[test]
    fn birdseye_choice_points() {
        assert_eq!(birdseye_choice_point(0, 0).unwrap(), rat(0, 1));
        assert_eq!(birdseye_choice_point(1, 0).unwrap(), rat(1, 1));
        assert_eq!(birdseye_choice_point(2, 0).unwrap(), rat(1, 2));
        assert_eq!(birdseye_choice_point(4, 2).unwrap(), rat(5, 8));
        assert!(birdseye_choice_point(2, 1).is_err());
        assert!(birdseye_choice_point(1, 1).is_err());
        assert!(birdseye_choice_point(4, 4).is_err());
    }

    #[test]
    fn birdseye_choice_points_are_distinct_dyadics() {
        let mut seen = BTreeSet::new();
        for i in 0..10u32 {
            let js = if i < 2 { 1 } else { 1u64 << (i - 2) };
            for j in 0..js {
                assert!(seen.insert(birdseye_choice_point(i, j).unwrap()));
            }
        }
    }

    #[test]
    fn birdseye_measures() {
        let full = PositionClass::FractionInterval(rat(0, 1), rat(1, 1));
        assert_eq!(birdseye_measure(&full).unwrap(), rat(1, 1));
        let mid = PositionClass::FractionInterval(rat(1, 4), rat(3, 4));
        assert_eq!(birdseye_measure(&mid).unwrap(), rat(1, 2));
        assert_eq!(birdseye_measure(&PositionClass::MonadPoint(3, 1)).unwrap(), rat(0, 1));
        let empty = PositionClass::FractionInterval(rat(1, 2), rat(1, 2));
        assert!(birdseye_measure(&empty).is_err());
        assert!(birdseye_measure(&PositionClass::NearEnd(0)).is_err());
    }

    #[test]
    fn interval_measure_counts_periods() {
        let tau: u64 = 1 << 20;
        let (lo, hi) = (tau / 4, 3 * tau / 4);
        let count = (1..=tau).filter(|t| *t > lo && *t <= hi).count() as i64;
        let m = birdseye_measure(&PositionClass::FractionInterval(rat(1, 4), rat(3, 4))).unwrap();
        assert_eq!(m, rat(count, tau as i64));
    }

    #[test]
    fn canonical_forms() {
        let p = ViewKind::Perspective;
        let merged = hist(p, &[("1", 'h'), ("1", 'h'), ("tau - 2", 'h')]).canonicalize().unwrap();
        assert_eq!(merged, hist(p, &[("tau", 'h')]));
        let already = hist(p, &[("tau - 1", 'h'), ("1", 'j')]);
        assert_eq!(already.canonicalize().unwrap(), already);
        let tail = hist(p, &[("1", 'h'), ("tau - 2", 'j'), ("1", 'j')]);
        let canon = tail.canonicalize().unwrap();
        assert_eq!(canon, hist(p, &[("1", 'h'), ("tau - 1", 'j')]));
        assert_eq!(canon.instantiate(1 << 10), tail.instantiate(1 << 10));
        assert!(matches!(
            hist(p, &[("1", 'h'), ("tau", 'j')]).canonicalize(),
            Err(ViewError::SumMismatch { .. })
        ));
    }

    #[test]
    fn lengths_are_validated() {
        assert!(Segmented::from_runs(ViewKind::Perspective, [(n("0"), 'h')]).is_err());
        assert!(Segmented::from_runs(ViewKind::Perspective, [(n("1/2"), 'h')]).is_err());
        assert!(Segmented::from_runs(ViewKind::Perspective, [(n("2*tau"), 'h')]).is_err());
        assert!(Segmented::from_runs(ViewKind::Perspective, [(n("tau +eps"), 'h')]).is_err());
    }

    #[test]
    fn view_consistency() {
        let p = ViewKind::Perspective;
        let b = ViewKind::BirdsEye;
        let front = hist(p, &[("2", 'h'), ("tau - 2", 'j')]);
        assert!(front.consistent_with_view(p));
        let halves = hist(p, &[("1/2*tau", 'h'), ("1/2*tau", 'j')]);
        assert!(!halves.consistent_with_view(p));
        assert!(halves.consistent_with_view(b));
        assert!(!front.consistent_with_view(b));
    }

    #[test]
    fn two_huge_blocks_break_perspective_indiscernibility() {
        // At tau = 2^10 with cutoff 4, periods tau/4 and 3tau/4 are both
        // distant, yet the half/half history differs there.
        let tau = 1u64 << 10;
        let h = hist(ViewKind::Perspective, &[("1/2*tau", 'h'), ("1/2*tau", 'j')]).instantiate(tau);
        let distant: Vec<u64> = (1..=tau)
            .filter(|t| perspective_class_of(*t, tau, 4) == PositionClass::DistantFuture)
            .collect();
        let values: BTreeSet<char> = distant.iter().map(|t| h[*t as usize - 1]).collect();
        assert_eq!(values.len(), 2);
    }

    #[test]
    fn sigma_partition_of_concrete_horizons() {
        for e in 3..=12u32 {
            let tau = 1u64 << e;
            let cutoff = 1u64 << (e - 2);
            let mut seen = BTreeSet::new();
            let mut distant = 0;
            for t in 1..=tau {
                match perspective_class_of(t, tau, cutoff) {
                    PositionClass::DistantFuture => distant += 1,
                    c => assert!(seen.insert(c), "class met twice"),
                }
            }
            assert_eq!(seen.len() as u64 + distant, tau);
            assert_eq!(distant, tau - 2 * cutoff);
        }
        // the largest horizon only checks coverage counts
        let tau = 1u64 << 20;
        let counts = (1..=tau).fold([0u64; 3], |mut acc, t| {
            match perspective_class_of(t, tau, 8) {
                PositionClass::NearFuture(_) => acc[0] += 1,
                PositionClass::DistantFuture => acc[1] += 1,
                _ => acc[2] += 1,
            }
            acc
        });
        assert_eq!(counts, [8, tau - 16, 8]);
    }

    #[test]
    fn segment_starts() {
        let h = hist(ViewKind::Perspective, &[("1", 'a'), ("tau - 2", 'b'), ("1", 'c')]);
        assert_eq!(h.starts(), vec![n("1"), n("2"), n("tau")]);
    }
}
