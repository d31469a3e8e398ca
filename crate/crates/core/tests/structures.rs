mod common;

use common::*;
use ramsey_core::gen::{gen_ordered_posets, gen_posets};
use ramsey_core::structures::{
    automorphisms, canonical_form, count_linear_extensions, enumerate_embeddings, generated_substructure, isomorphic,
    lattice_from_poset, linear_extensions, rel, validate_map,
};
use ramsey_core::varieties::powerset_lattice;
use ramsey_core::{
    Error, FiniteLattice, FinitePoset, LinearlyOrderedPoset, MapMode, Structure, StructureMap, Violation,
};

fn boolean_square() -> FinitePoset {
    FinitePoset::from_relations(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
}

#[test]
fn poset_counts_match_brute_force_classes() {
    for n in 0..=4 {
        let oracle = count_iso_classes(&labeled_partial_orders(n));
        assert_eq!(gen_posets(n).unwrap().len(), oracle, "n = {n}");
    }
}

#[test]
fn ordered_poset_counts_match_linear_extension_totals() {
    // Ordered posets on n points up to isomorphism are the labeled posets
    // whose index order is a linear extension.
    for n in 0..=4 {
        let natural = labeled_partial_orders(n)
            .into_iter()
            .filter(|m| (0..n).all(|a| (0..n).all(|b| !m[a][b] || a <= b)))
            .count();
        assert_eq!(gen_ordered_posets(n).unwrap().len(), natural, "n = {n}");
    }
}

#[test]
fn canonical_forms_agree_with_isomorphism_on_every_relabeling() {
    let p = boolean_square();
    let reference = canonical_form(&Structure::Poset(p.clone()));
    for perm in permutations(4) {
        let q = p.relabel(&perm);
        assert_eq!(
            canonical_form(&Structure::Poset(q.clone())).encoding,
            reference.encoding
        );
        assert!(isomorphic(&Structure::Poset(p.clone()), &Structure::Poset(q)));
    }
    let chain = Structure::Poset(FinitePoset::chain(4));
    assert_ne!(canonical_form(&chain).encoding, reference.encoding);
    assert!(!isomorphic(&chain, &Structure::Poset(p)));
}

#[test]
fn canonical_forms_separate_generated_posets() {
    for n in 0..=5 {
        let mut codes: Vec<_> = gen_posets(n)
            .unwrap()
            .into_iter()
            .map(|p| canonical_form(&Structure::Poset(p)).encoding)
            .collect();
        let total = codes.len();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), total);
    }
}

#[test]
fn linear_extensions_match_permutation_filter() {
    for p in gen_posets(4).unwrap() {
        let oracle: Vec<Vec<usize>> = permutations(4)
            .into_iter()
            .filter(|perm| is_linear_extension(&p, perm))
            .collect();
        let found: Vec<Vec<usize>> = linear_extensions(&p).into_iter().map(|l| l.order().to_vec()).collect();
        assert_eq!(found, oracle);
        assert_eq!(count_linear_extensions(&p, u64::MAX), oracle.len() as u64);
    }
}

#[test]
fn order_embeddings_of_two_chain_into_boolean_square() {
    let maps = enumerate_embeddings(
        &Structure::Poset(FinitePoset::chain(2)),
        &Structure::Poset(boolean_square()),
        MapMode::Order,
    )
    .unwrap();
    assert_eq!(maps.len(), 5);
    let oracle = injections(2, 4)
        .into_iter()
        .filter(|f| boolean_square().lt(f[0], f[1]))
        .count();
    assert_eq!(maps.len(), oracle);
}

#[test]
fn automorphism_counts() {
    assert_eq!(
        automorphisms(&Structure::Lattice(FiniteLattice::m3())).unwrap().order(),
        6
    );
    assert_eq!(
        automorphisms(&Structure::Lattice(FiniteLattice::n5())).unwrap().order(),
        1
    );
    assert_eq!(
        automorphisms(&Structure::Poset(FinitePoset::antichain(4)))
            .unwrap()
            .order(),
        24
    );
    assert_eq!(automorphisms(&Structure::Poset(boolean_square())).unwrap().order(), 2);
    let group = automorphisms(&Structure::Lattice(powerset_lattice(3).unwrap())).unwrap();
    assert_eq!(group.order(), 6);
    assert!(group.generators.len() <= 2);
}

#[test]
fn ordered_posets_are_rigid() {
    for p in ordered_corpus(4) {
        assert!(automorphisms(&Structure::OrderedPoset(p)).unwrap().is_rigid());
    }
}

#[test]
fn lattice_round_trip_through_its_order() {
    for l in [
        FiniteLattice::m3(),
        FiniteLattice::n5(),
        FiniteLattice::chain(4),
        powerset_lattice(3).unwrap(),
    ] {
        let back = lattice_from_poset(&rel(&l)).unwrap();
        assert_eq!(back.meet_table(), l.meet_table());
        assert_eq!(back.join_table(), l.join_table());
    }
}

#[test]
fn non_lattice_is_rejected() {
    let bowtie = FinitePoset::from_relations(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    assert!(matches!(lattice_from_poset(&bowtie), Err(Error::NotALattice { .. })));
}

#[test]
fn generated_sublattices() {
    let b3 = powerset_lattice(3).unwrap();
    let (sub, inclusion) = generated_substructure(&b3, &[1, 2]).unwrap();
    assert_eq!(inclusion, vec![0, 1, 2, 3]);
    assert_eq!(sub.len(), 4);
    let (whole, _) = generated_substructure(&b3, &[1, 2, 4]).unwrap();
    assert_eq!(whole.len(), 8);
    assert!(matches!(generated_substructure(&b3, &[]), Err(Error::EmptyGenerators)));
}

#[test]
fn invalid_orders_report_the_first_violation() {
    let cyclic = vec![vec![true, true], vec![true, true]];
    assert_eq!(
        FinitePoset::from_matrix(&cyclic),
        Err(Violation::Antisymmetry { a: 0, b: 1 })
    );
    let p = FinitePoset::chain(2);
    assert!(matches!(
        LinearlyOrderedPoset::new(p, vec![1, 0]),
        Err(Violation::OrderDoesNotExtend { .. })
    ));
}

#[test]
fn validate_map_rejects_non_embeddings() {
    let a = Structure::Poset(FinitePoset::chain(2));
    let b = Structure::Poset(FinitePoset::antichain(2));
    let m = StructureMap {
        map: vec![0, 1],
        mode: MapMode::Order,
    };
    assert!(validate_map(&a, &b, &m).is_err());
    assert!(validate_map(&a, &a, &m).is_ok());
}
