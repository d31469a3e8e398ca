mod common;

use common::*;
use ramsey_core::arrows::{copies_of, find_min_pi_arrow, verify_refutation, Outcome, PiArrowOutcome, SearchBudget};
use ramsey_core::gen::{gen_ordered_posets, gen_posets};
use ramsey_core::ordering_property::{
    antichain_coloring, build_b1, first_comparable_pair, op_witness_for_poset, op_witness_via_arrow, verify_op_prime,
    verify_op_witness,
};
use ramsey_core::structures::linear_extensions;
use ramsey_core::{pi, Error, FinitePoset, LinearlyOrderedPoset};

const LIMIT: u64 = 1_000_000;

/// Every linear extension of `a` has an order- and rank-preserving copy in
/// every linear extension of `b`, tested over all injections.
fn op_oracle(a: &FinitePoset, b: &FinitePoset) -> bool {
    let exts = |p: &FinitePoset| -> Vec<Vec<usize>> {
        permutations(p.len())
            .into_iter()
            .filter(|o| is_linear_extension(p, o))
            .collect()
    };
    exts(a).iter().all(|ao| {
        exts(b).iter().all(|bo| {
            let al = LinearlyOrderedPoset::new(a.clone(), ao.clone()).unwrap();
            let bl = LinearlyOrderedPoset::new(b.clone(), bo.clone()).unwrap();
            !brute_copies(&al, &bl).is_empty()
        })
    })
}

#[test]
fn op_verification_matches_oracle() {
    let small: Vec<FinitePoset> = (1..=3).flat_map(|n| gen_posets(n).unwrap()).collect();
    let hosts: Vec<FinitePoset> = (2..=4).flat_map(|n| gen_posets(n).unwrap()).collect();
    for a in &small {
        for b in &hosts {
            assert_eq!(verify_op_witness(a, b, LIMIT).verified(), op_oracle(a, b));
        }
    }
}

#[test]
fn failing_witness_reports_a_counterexample() {
    let a = FinitePoset::antichain(2);
    let b = FinitePoset::from_relations(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
    let r = verify_op_witness(&a, &b, LIMIT);
    assert_eq!(r.outcome, Outcome::Fails);
    let (ao, bo) = r.counterexample.unwrap();
    let al = LinearlyOrderedPoset::new(a.clone(), ao).unwrap();
    let bl = LinearlyOrderedPoset::new(b.clone(), bo).unwrap();
    assert!(brute_copies(&al, &bl).is_empty());
}

#[test]
fn antichains_witness_themselves() {
    for n in 0..=3 {
        let b = LinearlyOrderedPoset::antichain(n);
        let r = op_witness_via_arrow(&b, 3, &SearchBudget::default(), LIMIT).unwrap();
        assert_eq!(r.n, None);
        assert!(r.report.verified());
    }
}

#[test]
fn b1_is_b_plus_an_isolated_point_after_x() {
    for b in gen_ordered_posets(3).unwrap() {
        let Some((x, y)) = first_comparable_pair(b.poset()) else {
            continue;
        };
        let b1 = build_b1(&b, x, y).unwrap();
        let z = b.len();
        assert_eq!(b1.len(), z + 1);
        assert!((0..z).all(|e| !b1.poset().comparable(e, z)));
        assert_eq!(b1.rank(z), b.rank(x) + 1);
        let own: Vec<usize> = (0..z).collect();
        assert_eq!(b1.induced(&own).poset(), b.poset());
    }
}

#[test]
fn two_chain_needs_pi_four() {
    let b = LinearlyOrderedPoset::chain(2);
    let b1 = build_b1(&b, 0, 1).unwrap();
    let a = LinearlyOrderedPoset::antichain(2);
    match find_min_pi_arrow(&a, &b1, 2, 4, &SearchBudget::default()).unwrap() {
        PiArrowOutcome::Found { n, verdict } => {
            assert_eq!(n, 4);
            assert!(verdict.holds());
        }
        other => panic!("{other:?}"),
    }
    let host = pi(3).unwrap();
    let r = ramsey_core::arrows::check_arrow(&host, &a, &b1, 2, &SearchBudget::default()).unwrap();
    assert_eq!(r.outcome, Outcome::Fails);
    verify_refutation(&host, &a, &b1, 2, &copies_of(&a, &host), &r.refutation.unwrap()).unwrap();
}

#[test]
fn three_element_b1_does_not_arrow_from_small_pi() {
    let a = LinearlyOrderedPoset::antichain(2);
    for b in gen_ordered_posets(3).unwrap() {
        let Some((x, y)) = first_comparable_pair(b.poset()) else {
            continue;
        };
        let b1 = build_b1(&b, x, y).unwrap();
        match find_min_pi_arrow(&a, &b1, 2, 5, &SearchBudget::default()).unwrap() {
            PiArrowOutcome::NotFoundWithinBound { n_max, last_refutation } => {
                assert_eq!(n_max, 5);
                let (n, col) = last_refutation.unwrap();
                let host = pi(n).unwrap();
                verify_refutation(&host, &a, &b1, 2, &copies_of(&a, &host), &col).unwrap();
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            op_witness_via_arrow(&b, 5, &SearchBudget::default(), LIMIT),
            Err(Error::NotFoundWithinBound(_))
        ));
    }
}

#[test]
fn op_prime_against_pi_three_for_small_chains() {
    let w = pi(3).unwrap().poset().clone();
    assert!(verify_op_prime(&LinearlyOrderedPoset::point(), &w, LIMIT).verified());
    assert!(verify_op_prime(&LinearlyOrderedPoset::antichain(2), &w, LIMIT).verified());
}

#[test]
fn poset_level_witness_for_a_point() {
    let (n, report) = op_witness_for_poset(&FinitePoset::chain(1), 3, &SearchBudget::default(), LIMIT).unwrap();
    assert_eq!(n, None);
    assert!(report.verified());
}

#[test]
fn contradiction_on_the_triangle() {
    // x < z < y in the linear order with x ⊏ y. Coloring every 2-antichain
    // copy 1 means the second order reverses x,z and z,y, so y before x.
    let t = build_b1(&LinearlyOrderedPoset::chain(2), 0, 1).unwrap();
    for second in linear_extensions(t.poset()) {
        let (_, colors) = antichain_coloring(&t, second.order()).unwrap();
        assert!(colors.contains(&0));
    }
    let all_disagree: Vec<Vec<usize>> = permutations(3)
        .into_iter()
        .filter(|o| antichain_coloring(&t, o).unwrap().1.iter().all(|&c| c == 1))
        .collect();
    assert!(!all_disagree.is_empty());
    assert!(all_disagree.iter().all(|o| !is_linear_extension(t.poset(), o)));
}
