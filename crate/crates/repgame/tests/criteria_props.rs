use std::cmp::Ordering;

use nonstd::{rat, ExtReal, NonStdNum, Rational, Segment, Segmented, ViewKind};
use proptest::prelude::*;
use repgame::criteria::{
    cmp_overtaking, eval_discounted, eval_limit_means, eval_simple, simple_total, Criterion, Payload, PayoffModel,
    WholeHistory,
};
use repgame::game::PayoffTable;

const CASES: u32 = 500;

fn model(values: &[Rational]) -> PayoffModel {
    PayoffTable::from_rows(values.iter().map(|v| vec![v.clone()]).collect()).into()
}

fn finite(seq: &[usize]) -> WholeHistory {
    let segs = seq.iter().map(|l| Segment::new(NonStdNum::int(1), Payload::Term(*l))).collect();
    Segmented::finite(seq.len() as u64, segs).unwrap().canonicalize().unwrap()
}

/// `head` period by period, then `tail` for the rest of a huge horizon.
fn huge(view: ViewKind, head: &[usize], tail: usize) -> WholeHistory {
    let mut runs: Vec<(NonStdNum, Payload)> = head.iter().map(|l| (NonStdNum::int(1), Payload::Term(*l))).collect();
    runs.push((&NonStdNum::tau() - &NonStdNum::int(head.len() as i64), Payload::Term(tail)));
    Segmented::from_runs(view, runs).unwrap().canonicalize().unwrap()
}

/// A huge run, then `end` period by period up to the horizon.
fn huge_then(lead: usize, end: &[usize]) -> WholeHistory {
    let mut runs = vec![(&NonStdNum::tau() - &NonStdNum::int(end.len() as i64), Payload::Term(lead))];
    runs.extend(end.iter().map(|l| (NonStdNum::int(1), Payload::Term(*l))));
    Segmented::from_runs(ViewKind::Perspective, runs).unwrap().canonicalize().unwrap()
}

fn value() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

/// Payoff table plus a context of leaf indices into it.
fn table_and_context() -> impl Strategy<Value = (Vec<Rational>, Vec<usize>, Vec<usize>, usize, usize)> {
    prop::collection::vec(value(), 2..6).prop_flat_map(|vals| {
        let n = vals.len();
        (
            Just(vals),
            prop::collection::vec(0..n, 0..4),
            prop::collection::vec(0..n, 0..4),
            0..n,
            0..n,
        )
    })
}

fn delta() -> impl Strategy<Value = Rational> {
    (1i64..=9, 2i64..=10).prop_filter_map("delta below one", |(n, d)| (n < d).then(|| rat(n, d)))
}

fn seq(prefix: &[usize], mid: &[usize], suffix: &[usize]) -> Vec<usize> {
    prefix.iter().chain(mid).chain(suffix).copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sooner_is_better_under_discounting((vals, pre, post, a, b) in table_and_context(), d in delta()) {
        let (j, k) = if vals[a] >= vals[b] { (a, b) } else { (b, a) };
        let u = model(&vals);
        let early = eval_discounted(&finite(&seq(&pre, &[j, k], &post)), &u, 0, &d).unwrap();
        let late = eval_discounted(&finite(&seq(&pre, &[k, j], &post)), &u, 0, &d).unwrap();
        prop_assert!(early >= late);
        let tail = post.first().copied().unwrap_or(a);
        let early = eval_discounted(&huge(ViewKind::Perspective, &seq(&pre, &[j, k], &[]), tail), &u, 0, &d).unwrap();
        let late = eval_discounted(&huge(ViewKind::Perspective, &seq(&pre, &[k, j], &[]), tail), &u, 0, &d).unwrap();
        prop_assert!(early >= late);
    }

    #[test]
    fn adjacent_swaps_commute_under_simple_sum((vals, pre, post, a, b) in table_and_context()) {
        let u = model(&vals);
        let x = finite(&seq(&pre, &[a, b], &post));
        let y = finite(&seq(&pre, &[b, a], &post));
        prop_assert_eq!(eval_simple(&x, &u, 0).unwrap(), eval_simple(&y, &u, 0).unwrap());
        prop_assert_eq!(cmp_overtaking(&x, &y, &u, 0).unwrap(), Ordering::Equal);
        let tail = pre.first().copied().unwrap_or(a);
        let x = huge(ViewKind::Perspective, &seq(&pre, &[a, b], &post), tail);
        let y = huge(ViewKind::Perspective, &seq(&pre, &[b, a], &post), tail);
        prop_assert_eq!(simple_total(&x, &u, 0).unwrap(), simple_total(&y, &u, 0).unwrap());
        let x = huge_then(tail, &seq(&pre, &[a, b], &post));
        let y = huge_then(tail, &seq(&pre, &[b, a], &post));
        prop_assert_eq!(simple_total(&x, &u, 0).unwrap(), simple_total(&y, &u, 0).unwrap());
    }

    #[test]
    fn improving_one_component_never_hurts((vals, pre, post, a, b) in table_and_context(), d in delta()) {
        let (j, k) = if vals[a] >= vals[b] { (a, b) } else { (b, a) };
        let u = model(&vals);
        let better = finite(&seq(&pre, &[j], &post));
        let worse = finite(&seq(&pre, &[k], &post));
        for c in [Criterion::Discounted(d.clone()), Criterion::Simple, Criterion::Overtaking] {
            prop_assert_ne!(c.compare(&better, &worse, &u, 0).unwrap(), Ordering::Less);
        }
        let tail = post.first().copied().unwrap_or(a);
        let better = huge(ViewKind::Perspective, &seq(&pre, &[j], &[]), tail);
        let worse = huge(ViewKind::Perspective, &seq(&pre, &[k], &[]), tail);
        for c in [Criterion::Discounted(d), Criterion::Simple, Criterion::Overtaking] {
            prop_assert_ne!(c.compare(&better, &worse, &u, 0).unwrap(), Ordering::Less);
        }
        let better = huge_then(tail, &seq(&pre, &[j], &post));
        let worse = huge_then(tail, &seq(&pre, &[k], &post));
        prop_assert_ne!(Criterion::Overtaking.compare(&better, &worse, &u, 0).unwrap(), Ordering::Less);
    }

    #[test]
    fn strict_improvement_is_seen_by_overtaking((vals, pre, post, a, b) in table_and_context()) {
        prop_assume!(vals[a] != vals[b]);
        let (j, k) = if vals[a] > vals[b] { (a, b) } else { (b, a) };
        let u = model(&vals);
        let tail = pre.first().copied().unwrap_or(a);
        let better = huge_then(tail, &seq(&pre, &[j], &post));
        let worse = huge_then(tail, &seq(&pre, &[k], &post));
        prop_assert_eq!(cmp_overtaking(&better, &worse, &u, 0).unwrap(), Ordering::Greater);
        // the simple sum collapses both to the same infinity unless the run's payoff is zero
        if vals[tail] != Rational::from_integer(0.into()) {
            prop_assert_eq!(eval_simple(&better, &u, 0).unwrap(), eval_simple(&worse, &u, 0).unwrap());
        }
    }

    #[test]
    fn overtaking_refines_simple_sum((vals, pre, post, a, b) in table_and_context()) {
        let u = model(&vals);
        let x = huge(ViewKind::Perspective, &seq(&pre, &[a], &[]), a);
        let y = huge(ViewKind::Perspective, &seq(&post, &[b], &[]), b);
        let simple = eval_simple(&x, &u, 0).unwrap().cmp(&eval_simple(&y, &u, 0).unwrap());
        if simple != Ordering::Equal {
            prop_assert_eq!(cmp_overtaking(&x, &y, &u, 0).unwrap(), simple);
        }
    }

    #[test]
    fn limit_of_means_ignores_monad_patches((vals, pre, post, a, b) in table_and_context()) {
        let u = model(&vals);
        let plain = Segmented::from_runs(
            ViewKind::BirdsEye,
            vec![(NonStdNum::tau().scale(&rat(1, 2)), Payload::Term(a)), (NonStdNum::tau().scale(&rat(1, 2)), Payload::Term(b))],
        )
        .unwrap();
        let mut runs: Vec<(NonStdNum, Payload)> = pre.iter().map(|l| (NonStdNum::int(1), Payload::Term(*l))).collect();
        runs.push((&NonStdNum::tau().scale(&rat(1, 2)) - &NonStdNum::int(pre.len() as i64), Payload::Term(a)));
        runs.push((&NonStdNum::tau().scale(&rat(1, 2)) - &NonStdNum::int(post.len() as i64), Payload::Term(b)));
        runs.extend(post.iter().map(|l| (NonStdNum::int(1), Payload::Term(*l))));
        let patched = Segmented::from_runs(ViewKind::BirdsEye, runs).unwrap();
        let difference = eval_limit_means(&patched, &u, 0).unwrap() - eval_limit_means(&plain, &u, 0).unwrap();
        prop_assert_eq!(difference, Rational::from_integer(0.into()));
    }
}

#[test]
fn discounted_values_are_finite_on_huge_histories() {
    let u = model(&[rat(3, 1), rat(-2, 1)]);
    for head in [vec![], vec![0], vec![1, 0, 1]] {
        let h = huge(ViewKind::Perspective, &head, 1);
        assert!(matches!(eval_discounted(&h, &u, 0, &rat(1, 2)).unwrap(), ExtReal::Finite(_)));
    }
}
