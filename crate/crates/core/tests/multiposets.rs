mod common;

use common::*;
use ramsey_core::multiposets::{
    find_multiposet_embedding, in_ordered_class, ordered_members, pairwise_conflict, validate_multiposet,
    verify_op_witness_multi,
};
use ramsey_core::structures::canonical_form;
use ramsey_core::{FinitePoset, Multiposet, Structure, Template, Violation};
use std::collections::HashSet;

fn poset(m: &[Vec<bool>]) -> FinitePoset {
    FinitePoset::from_matrix(m).unwrap()
}

fn common_extension(rels: &[&[Vec<bool>]]) -> bool {
    let n = rels[0].len();
    permutations(n)
        .iter()
        .any(|o| rels.iter().all(|r| is_linear_extension(&poset(r), o)))
}

#[test]
fn consistency_matches_common_extension_search() {
    let t = Template::new(FinitePoset::antichain(2)).unwrap();
    let rels = labeled_partial_orders(3);
    for r1 in &rels {
        for r2 in &rels {
            let m = Multiposet::new(vec![poset(r1), poset(r2)], None).unwrap();
            assert_eq!(validate_multiposet(&m, &t).is_ok(), common_extension(&[r1, r2]));
        }
    }
}

#[test]
fn pairwise_test_is_weaker_than_common_extension() {
    let r1 = FinitePoset::from_relations(4, &[(0, 1), (2, 3)]).unwrap();
    let r2 = FinitePoset::from_relations(4, &[(1, 2), (3, 0)]).unwrap();
    let m = Multiposet::new(vec![r1.clone(), r2.clone()], None).unwrap();
    assert!(pairwise_conflict(&m).is_none());
    assert!(!common_extension(&[&r1.to_matrix(), &r2.to_matrix()]));
    let t = Template::new(FinitePoset::antichain(2)).unwrap();
    assert!(matches!(
        validate_multiposet(&m, &t),
        Err(Violation::CyclicUnion { .. })
    ));
}

#[test]
fn conformance_follows_the_template() {
    let t = Template::new(FinitePoset::chain(2)).unwrap();
    let rels = labeled_partial_orders(3);
    for r1 in &rels {
        for r2 in &rels {
            let m = Multiposet::new(vec![poset(r1), poset(r2)], None).unwrap();
            let nested = (0..3).all(|a| (0..3).all(|b| !r1[a][b] || r2[a][b]));
            assert_eq!(
                validate_multiposet(&m, &t).is_ok(),
                nested && common_extension(&[r1, r2])
            );
        }
    }
}

#[test]
fn ordered_members_are_one_per_type() {
    let t = Template::new(FinitePoset::chain(2)).unwrap();
    let rels = labeled_partial_orders(3);
    let mut types = HashSet::new();
    for r1 in &rels {
        for r2 in &rels {
            for o in permutations(3) {
                if !(0..3).all(|a| (0..3).all(|b| !r1[a][b] || r2[a][b])) || !is_linear_extension(&poset(r2), &o) {
                    continue;
                }
                // relabel so that the linear order becomes the index order
                let key: Vec<bool> = [r1, r2]
                    .iter()
                    .flat_map(|r| {
                        (0..3)
                            .flat_map(move |i| (0..3).map(move |j| (i, j)))
                            .map(|(i, j)| r[o[i]][o[j]])
                    })
                    .collect();
                types.insert(key);
            }
        }
    }
    let members = ordered_members(&t, 3);
    assert_eq!(members.len(), types.len());
    let codes: HashSet<_> = members
        .iter()
        .map(|m| canonical_form(&Structure::Multiposet(m.clone())).encoding)
        .collect();
    assert_eq!(codes.len(), members.len());
    assert!(members.iter().all(|m| in_ordered_class(m, &t)));
}

#[test]
fn embeddings_match_injection_filter() {
    let t = Template::new(FinitePoset::antichain(2)).unwrap();
    let small = ordered_members(&t, 2);
    let big = ordered_members(&t, 3);
    for a in &small {
        for b in &big {
            let brute = injections(2, 3).into_iter().find(|f| {
                (0..2).all(|x| {
                    (0..2).all(|y| {
                        (0..2).all(|r| a.relation(r).leq(x, y) == b.relation(r).leq(f[x], f[y]))
                            && a.before(x, y) == b.before(f[x], f[y])
                    })
                })
            });
            assert_eq!(find_multiposet_embedding(a, b).unwrap().is_some(), brute.is_some());
        }
    }
}

#[test]
fn op_witness_for_multiposets_agrees_with_brute_force() {
    let t = Template::new(FinitePoset::antichain(2)).unwrap();
    let a = Multiposet::new(vec![FinitePoset::chain(2), FinitePoset::antichain(2)], None).unwrap();
    let candidates = [
        Multiposet::new(vec![FinitePoset::antichain(3), FinitePoset::antichain(3)], None).unwrap(),
        Multiposet::new(vec![FinitePoset::chain(3), FinitePoset::antichain(3)], None).unwrap(),
        Multiposet::new(
            vec![
                FinitePoset::from_relations(3, &[(0, 1)]).unwrap(),
                FinitePoset::antichain(3),
            ],
            None,
        )
        .unwrap(),
    ];
    for b in &candidates {
        let got = verify_op_witness_multi(&a, b, &t, 10_000).unwrap().verified();
        let union = |m: &Multiposet| m.union_closure().unwrap();
        let exts = |p: &FinitePoset| -> Vec<Vec<usize>> {
            permutations(p.len())
                .into_iter()
                .filter(|o| is_linear_extension(p, o))
                .collect()
        };
        let expected = exts(&union(&a)).iter().all(|ao| {
            exts(&union(b)).iter().all(|bo| {
                let am = a.with_order(ao.clone()).unwrap();
                let bm = b.with_order(bo.clone()).unwrap();
                injections(2, 3).iter().any(|f| {
                    (0..2).all(|x| {
                        (0..2).all(|y| {
                            (0..2).all(|r| am.relation(r).leq(x, y) == bm.relation(r).leq(f[x], f[y]))
                                && am.before(x, y) == bm.before(f[x], f[y])
                        })
                    })
                })
            })
        });
        assert_eq!(got, expected);
    }
}
