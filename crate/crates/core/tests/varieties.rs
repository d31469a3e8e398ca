mod common;

use common::*;
use ramsey_core::structures::{enumerate_embeddings, rel};
use ramsey_core::varieties::{
    check_ap, lattices_of_size, powerset_lattice, satisfies_identity, ApOutcome, Identity, LatticeTerm,
};
use ramsey_core::{FiniteLattice, MapMode, Structure};

fn holds(l: &FiniteLattice, id: &Identity) -> bool {
    satisfies_identity(l, &id.lhs, &id.rhs).holds()
}

/// Distributivity decided directly from the tables over all triples.
fn distributive_oracle(l: &FiniteLattice) -> bool {
    let n = l.len();
    (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| l.meet(x, l.join(y, z)) == l.join(l.meet(x, y), l.meet(x, z)))))
}

/// Modularity as `x ≤ z ⇒ x ∨ (y ∧ z) = (x ∨ y) ∧ z`.
fn modular_oracle(l: &FiniteLattice) -> bool {
    let n = l.len();
    (0..n).all(|x| {
        (0..n).all(|z| l.meet(x, z) != x || (0..n).all(|y| l.join(x, l.meet(y, z)) == l.meet(l.join(x, y), z)))
    })
}

#[test]
fn m3_and_n5() {
    let (d, m) = (Identity::distributive(), Identity::modular());
    let m3 = FiniteLattice::m3();
    let check = satisfies_identity(&m3, &d.lhs, &d.rhs);
    let cm = check.countermodel.expect("M3 is not distributive");
    let vars = check.variables;
    assert_ne!(d.lhs.eval(&m3, &vars, &cm), d.rhs.eval(&m3, &vars, &cm));
    assert!(holds(&m3, &m));
    assert!(!holds(&FiniteLattice::n5(), &m));
    assert!(!holds(&FiniteLattice::n5(), &d));
}

#[test]
fn boolean_lattices_are_distributive() {
    let d = Identity::distributive();
    for n in 0..=3 {
        let b = powerset_lattice(n).unwrap();
        let check = satisfies_identity(&b, &d.lhs, &d.rhs);
        assert!(check.holds());
        assert_eq!(check.assignments_checked, (b.len() as u64).pow(3));
    }
}

#[test]
fn identities_agree_with_table_oracles() {
    let (d, m) = (Identity::distributive(), Identity::modular());
    for n in 1..=6 {
        for l in lattices_of_size(n).unwrap() {
            assert_eq!(holds(&l, &d), distributive_oracle(&l));
            assert_eq!(holds(&l, &m), modular_oracle(&l));
        }
    }
}

#[test]
fn lattice_counts_by_size() {
    // Unlabeled lattices on 1..=6 elements.
    let counts: Vec<usize> = (1..=6).map(|n| lattices_of_size(n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 1, 2, 5, 15]);
}

#[test]
fn term_parsing() {
    let t = LatticeTerm::parse("x ∧ y ∨ z").unwrap();
    assert_eq!(
        t,
        LatticeTerm::join(
            LatticeTerm::meet(LatticeTerm::var("x"), LatticeTerm::var("y")),
            LatticeTerm::var("z")
        )
    );
    assert_eq!(
        LatticeTerm::parse("x & (y | z)").unwrap(),
        LatticeTerm::parse("x ∧ (y ∨ z)").unwrap()
    );
    assert!(LatticeTerm::parse("x ∧").is_err());
    assert!(Identity::parse("x ∧ y").is_err());
    assert_eq!(Identity::distributive().variables(), vec!["x", "y", "z"]);
}

#[test]
fn order_embeddings_outnumber_lattice_embeddings() {
    let (b2, b3) = (powerset_lattice(2).unwrap(), powerset_lattice(3).unwrap());
    let order = enumerate_embeddings(&Structure::Poset(rel(&b2)), &Structure::Poset(rel(&b3)), MapMode::Order).unwrap();
    let lattice = enumerate_embeddings(
        &Structure::Lattice(b2.clone()),
        &Structure::Lattice(b3.clone()),
        MapMode::Lattice,
    )
    .unwrap();
    let brute_order = injections(4, 8)
        .into_iter()
        .filter(|f| (0..4).all(|x| (0..4).all(|y| (x & y == x) == (f[x] & f[y] == f[x]))))
        .count();
    let brute_lattice = injections(4, 8)
        .into_iter()
        .filter(|f| (0..4).all(|x| (0..4).all(|y| f[x & y] == f[x] & f[y] && f[x | y] == f[x] | f[y])))
        .count();
    assert_eq!(order.len(), brute_order);
    assert_eq!(lattice.len(), brute_lattice);
    assert!(order.len() > lattice.len());
}

#[test]
fn amalgam_of_two_chains_over_a_point() {
    let point = FiniteLattice::chain(1);
    let c2 = FiniteLattice::chain(2);
    match check_ap(&point, &c2, &c2, &[0], &[1], None, 4).unwrap() {
        ApOutcome::Found(am) => {
            assert_eq!(am.g1[0], am.g2[1]);
            assert!(am.d.len() >= 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn distributive_amalgam_search_is_bounded() {
    let c2 = FiniteLattice::chain(2);
    let m3 = FiniteLattice::m3();
    let d = Identity::distributive();
    let r = check_ap(&c2, &m3, &m3, &[0, 4], &[0, 4], Some(&d), 5).unwrap();
    assert!(matches!(r, ApOutcome::NotFoundWithinBound { bound: 5, .. }));
}
