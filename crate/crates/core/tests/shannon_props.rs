mod common;

use common::*;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ciapprox::shannon::{
    check_lambda, min_lambda, saturate_conditionals, shannon_ei, verify_theorem_bound, BoundKind, EiOutcome,
    LambdaOutcome, LpCertificate, MinLambda,
};
use ciapprox::{CiSet, CiTriple, VarSet};

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

fn nontrivial(n: usize) -> impl Strategy<Value = CiTriple> {
    arb_triple(n).prop_filter("trivial", |t| !t.is_trivial())
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn certificates_verify_and_round_trip(s in arb_set(3, 3), t in nontrivial(3)) {
        if let MinLambda::Value { value, cert } = min_lambda(&s, &t).unwrap() {
            prop_assert_eq!(&cert.lambda, &value);
            prop_assert!(cert.verify(&s, &t));
            let text = cert.to_text(&names(3));
            prop_assert_eq!(LpCertificate::parse(&text, &names(3)).unwrap(), cert);
        }
    }

    #[test]
    fn min_lambda_bounds_every_polymatroid(
        s in arb_set(3, 3),
        t in nontrivial(3),
        (_, h) in arb_polymatroid(3),
    ) {
        if let Some(l) = min_lambda(&s, &t).unwrap().value() {
            prop_assert!(l * h.eval_sum(&s).unwrap() >= h.eval_mi(&t).unwrap());
        }
    }

    #[test]
    fn lambda_checks_agree_with_the_minimum(s in arb_set(3, 3), t in nontrivial(3), num in 0i64..12) {
        let lambda = BigRational::new(num.into(), 4.into());
        let expected = match min_lambda(&s, &t).unwrap() {
            MinLambda::Value { value, .. } => value <= lambda,
            MinLambda::Unbounded => false,
        };
        match check_lambda(&s, &t, &lambda).unwrap() {
            LambdaOutcome::Certified(cert) => {
                prop_assert!(expected);
                prop_assert!(cert.verify(&s, &t));
            }
            LambdaOutcome::Refuted(h) => {
                prop_assert!(!expected);
                let h = h.check_polymatroid().unwrap();
                prop_assert!(&lambda * h.eval_sum(&s).unwrap() < h.eval_mi(&t).unwrap());
            }
        }
    }

    #[test]
    fn finite_lambda_iff_exact_implication(s in arb_set(3, 3), t in nontrivial(3)) {
        let finite = min_lambda(&s, &t).unwrap().value().is_some();
        match shannon_ei(&s, &t).unwrap() {
            EiOutcome::Holds => prop_assert!(finite),
            EiOutcome::Counterexample(h) => {
                prop_assert!(!finite);
                let h = h.check_polymatroid().unwrap();
                prop_assert!(h.eval_sum(&s).unwrap().is_zero());
                prop_assert!(h.eval_mi(&t).unwrap() > BigRational::zero());
            }
        }
    }

    #[test]
    fn saturation_splits_each_conditional((_, h) in arb_polymatroid(3), picks in prop::collection::vec((0u32..8, 0u32..8), 1..4)) {
        let full = VarSet::full(3);
        let conds = picks.into_iter().filter_map(|(x, y)| {
            let (x, y) = (VarSet::from_bits(x), VarSet::from_bits(y) - VarSet::from_bits(x));
            (!y.is_empty()).then(|| CiTriple::conditional(x, y))
        });
        let s = CiSet::from_triples(3, conds).unwrap();
        let sat = saturate_conditionals(&s, 3).unwrap();
        prop_assert!(sat.iter().all(|t| t.vars() == full));
        for t in &s {
            let w = full - t.y() - t.z();
            let parts = CiSet::from_triples(3, [CiTriple::new(t.y(), w, t.z()), CiTriple::conditional(t.z() | w, t.y())]).unwrap();
            prop_assert!(parts.is_subset(&sat));
            prop_assert_eq!(h.eval_mi(t).unwrap(), h.eval_sum(&parts).unwrap());
            let l = min_lambda(&sat, t).unwrap();
            prop_assert!(l.value().is_some_and(|v| *v <= BigRational::one()));
        }
    }
}

#[test]
fn chain_rule_needs_factor_one() {
    // (A;B) and (A;C|B) give (A;BC)
    for n in 3..=5 {
        let s = CiSet::from_triples(n, [mi(&[0], &[1], &[]), mi(&[0], &[2], &[1])]).unwrap();
        let t = mi(&[0], &[1, 2], &[]);
        match min_lambda(&s, &t).unwrap() {
            MinLambda::Value { value, cert } => {
                assert_eq!(value, int(1));
                assert!(cert.verify(&s, &t));
            }
            MinLambda::Unbounded => panic!("chain rule not implied"),
        }
    }
}

#[test]
fn intersection_is_not_shannon_implied() {
    let s = CiSet::from_triples(3, [mi(&[0], &[1], &[2]), mi(&[0], &[2], &[1])]).unwrap();
    let t = mi(&[0], &[1, 2], &[]);
    assert_eq!(min_lambda(&s, &t).unwrap(), MinLambda::Unbounded);
    assert!(!shannon_ei(&s, &t).unwrap().holds());
    assert!(!check_lambda(&s, &t, &int(1_000_000)).unwrap().is_certified());
}

#[test]
fn saturated_bound_report() {
    let sigma = CiSet::from_triples(3, [mi(&[0], &[1], &[2]), mi(&[0], &[2], &[])]).unwrap();
    let r = verify_theorem_bound(&sigma, &mi(&[0], &[1, 2], &[]), BoundKind::Saturated);
    assert!(r.is_err(), "a marginal CI is not saturated");

    // (A;B|C) and H(C) => (A;B)
    let sigma = CiSet::from_triples(3, [mi(&[0], &[1], &[2]), CiTriple::conditional(VarSet::EMPTY, s(&[2]))]).unwrap();
    let r = verify_theorem_bound(&sigma, &mi(&[0], &[1], &[]), BoundKind::Saturated).unwrap();
    assert!(r.positive_implied && r.premise_holds && !r.violation);
    assert!(r.lambda.unwrap() <= r.bound);
}

#[test]
fn parity_marginals_are_refuted() {
    let s = CiSet::from_triples(3, [mi(&[0], &[1], &[]), mi(&[0], &[2], &[]), mi(&[1], &[2], &[])]).unwrap();
    let r = verify_theorem_bound(&s, &mi(&[0], &[1], &[2]), BoundKind::Marginal).unwrap();
    assert!(r.positive_implied);
    assert!(!r.shannon_implied && !r.premise_holds && !r.violation);
    assert_eq!(r.lambda, None);
}

#[test]
fn small_ambients_are_rejected() {
    let t = CiTriple::conditional(VarSet::EMPTY, s(&[0]));
    let sigma = CiSet::from_triples(1, [t]).unwrap();
    assert!(min_lambda(&sigma, &t).is_err());
}
