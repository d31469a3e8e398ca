//! Structures carrying several partial orders that conform to a template
//! poset, optionally with a common linear order.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::embed::{EmbeddingSearch, Relation};
use crate::error::{Error, Result, Violation};
use crate::ordering_property::{verify_orders, OpWitnessReport};
use crate::structures::{
    is_permutation, linear_rows, ranks_of, transitive_close, FinitePoset, LinearlyOrderedPoset, Structure,
};

/// A template poset on `0..n`; relation `i` of a conforming multiposet is
/// indexed by template element `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Template(FinitePoset);

impl Template {
    pub fn new(poset: FinitePoset) -> Result<Self> {
        if poset.is_empty() {
            return Err(Error::Precondition("a template needs at least one element".into()));
        }
        Ok(Template(poset))
    }

    /// The one-element template: multiposets over it are plain posets.
    pub fn trivial() -> Self {
        Template(FinitePoset::antichain(1))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct LinearOrder {
    order: Vec<usize>,
    rank: Vec<usize>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl LinearOrder {
    fn new(order: Vec<usize>) -> Self {
        let rank = ranks_of(&order);
        let (up, down) = linear_rows(&rank);
        LinearOrder { order, rank, up, down }
    }
}

/// Partial orders `⊑₁ … ⊑ₙ` on one element set, with an optional linear order
/// extending all of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multiposet {
    relations: Vec<FinitePoset>,
    linear: Option<LinearOrder>,
}

impl Multiposet {
    /// Fails if the relations disagree on size, or if `order` is present and
    /// does not extend every relation.
    pub fn new(relations: Vec<FinitePoset>, order: Option<Vec<usize>>) -> Result<Self, Violation> {
        let Some(first) = relations.first() else {
            return Err(Violation::Shape {
                detail: "a multiposet needs at least one relation".into(),
            });
        };
        let n = first.len();
        if let Some(r) = relations.iter().position(|r| r.len() != n) {
            return Err(Violation::Shape {
                detail: format!("relation {r} has {} elements, expected {n}", relations[r].len()),
            });
        }
        let linear = match order {
            None => None,
            Some(order) => {
                if !is_permutation(&order, n) {
                    return Err(Violation::OrderNotPermutation);
                }
                let lin = LinearOrder::new(order);
                for r in &relations {
                    for a in 0..n {
                        for b in r.up_set(a).ones() {
                            if a != b && lin.rank[a] > lin.rank[b] {
                                return Err(Violation::OrderDoesNotExtend { below: a, above: b });
                            }
                        }
                    }
                }
                Some(lin)
            }
        };
        Ok(Multiposet { relations, linear })
    }

    pub fn from_ordered_poset(p: &LinearlyOrderedPoset) -> Self {
        Multiposet::new(vec![p.poset().clone()], Some(p.order().to_vec())).expect("ordered poset")
    }

    pub fn from_poset(p: &FinitePoset) -> Self {
        Multiposet::new(vec![p.clone()], None).expect("poset")
    }

    /// The ordered poset when there is exactly one relation and an order.
    pub fn to_ordered_poset(&self) -> Option<LinearlyOrderedPoset> {
        match (&self.relations[..], &self.linear) {
            ([r], Some(lin)) => LinearlyOrderedPoset::new(r.clone(), lin.order.clone()).ok(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.relations[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn relation(&self, i: usize) -> &FinitePoset {
        &self.relations[i]
    }

    pub fn relations(&self) -> &[FinitePoset] {
        &self.relations
    }

    pub fn is_ordered(&self) -> bool {
        self.linear.is_some()
    }

    pub fn order(&self) -> Option<&[usize]> {
        self.linear.as_ref().map(|l| l.order.as_slice())
    }

    pub fn ranks(&self) -> Option<&[usize]> {
        self.linear.as_ref().map(|l| l.rank.as_slice())
    }

    /// `a < b` in the linear order; panics on unordered multiposets.
    pub fn before(&self, a: usize, b: usize) -> bool {
        let lin = self.linear.as_ref().expect("ordered multiposet");
        lin.rank[a] < lin.rank[b]
    }

    pub fn without_order(&self) -> Self {
        Multiposet {
            relations: self.relations.clone(),
            linear: None,
        }
    }

    pub fn with_order(&self, order: Vec<usize>) -> Result<Self, Violation> {
        Multiposet::new(self.relations.clone(), Some(order))
    }

    /// Induced substructure on `elements`, relabeled in the given sequence.
    pub fn induced(&self, elements: &[usize]) -> Self {
        let relations = self.relations.iter().map(|r| r.induced(elements)).collect();
        let order = self.linear.as_ref().map(|lin| {
            let mut o: Vec<usize> = (0..elements.len()).collect();
            o.sort_by_key(|&i| lin.rank[elements[i]]);
            o
        });
        Multiposet::new(relations, order).expect("induced multiposet")
    }

    /// For `x` before `y`: which relations put `x` strictly below `y`.
    pub fn pair_type(&self, x: usize, y: usize) -> Vec<bool> {
        self.relations.iter().map(|r| r.lt(x, y)).collect()
    }

    /// Ordered 2-element multiposet `0 < 1` with relation `i` holding iff `bits[i]`.
    pub fn ordered_pair(bits: &[bool]) -> Self {
        let relations = bits
            .iter()
            .map(|&b| {
                if b {
                    FinitePoset::chain(2)
                } else {
                    FinitePoset::antichain(2)
                }
            })
            .collect();
        Multiposet::new(relations, Some(vec![0, 1])).expect("ordered pair")
    }

    /// The union of all relations, closed transitively; a poset iff the
    /// relations have a common linear extension.
    pub fn union_closure(&self) -> Result<FinitePoset, (usize, usize)> {
        let n = self.len();
        let mut leq = vec![vec![false; n]; n];
        for r in &self.relations {
            for (a, row) in leq.iter_mut().enumerate() {
                for b in r.up_set(a).ones() {
                    row[b] = true;
                }
            }
        }
        transitive_close(&mut leq);
        for a in 0..n {
            for b in a + 1..n {
                if leq[a][b] && leq[b][a] {
                    return Err((a, b));
                }
            }
        }
        Ok(FinitePoset::from_matrix(&leq).expect("acyclic closure is a partial order"))
    }

    pub(crate) fn validate_relations(&self) -> Result<(), Violation> {
        for r in &self.relations {
            crate::structures::validate_leq(&r.to_matrix())?;
        }
        Multiposet::new(self.relations.clone(), self.order().map(<[usize]>::to_vec)).map(|_| ())
    }

    fn relation_views(&self) -> Vec<Relation<'_>> {
        let mut v: Vec<Relation<'_>> = self.relations.iter().map(FinitePoset::relation).collect();
        if let Some(lin) = &self.linear {
            v.push(Relation::new(&lin.up, &lin.down));
        }
        v
    }
}

/// Pairwise criterion: distinct `a, b` and distinct `i, j` with `a ⊏ᵢ b` and
/// `b ⊏ⱼ a`.
pub fn pairwise_conflict(m: &Multiposet) -> Option<Violation> {
    let n = m.len();
    let k = m.relation_count();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for i in 0..k {
                if !m.relation(i).lt(a, b) {
                    continue;
                }
                for j in 0..k {
                    if i != j && m.relation(j).lt(b, a) {
                        return Some(Violation::Inconsistent { a, b, i, j });
                    }
                }
            }
        }
    }
    None
}

/// Checks partial-order axioms, conformance to `t`, consistency (by both
/// criteria) and, when present, that the linear order extends each relation.
pub fn validate_multiposet(m: &Multiposet, t: &Template) -> Result<(), Violation> {
    if m.relation_count() != t.len() {
        return Err(Violation::RelationCount {
            expected: t.len(),
            found: m.relation_count(),
        });
    }
    m.validate_relations()?;
    let n = m.len();
    for lower in 0..t.len() {
        for upper in 0..t.len() {
            if lower == upper || !t.poset().leq(lower, upper) {
                continue;
            }
            for a in 0..n {
                for b in m.relation(lower).up_set(a).ones() {
                    if !m.relation(upper).leq(a, b) {
                        return Err(Violation::Conformance { lower, upper, a, b });
                    }
                }
            }
        }
    }
    if let Some(v) = pairwise_conflict(m) {
        return Err(v);
    }
    if let Err((a, b)) = m.union_closure() {
        return Err(Violation::CyclicUnion { a, b });
    }
    Ok(())
}

/// Membership in the ordered class over `t`.
pub fn in_ordered_class(m: &Multiposet, t: &Template) -> bool {
    m.is_ordered() && validate_multiposet(m, t).is_ok()
}

pub(crate) fn check_multiposet_map(a: &Multiposet, b: &Multiposet, f: &[usize]) -> Result<(), Violation> {
    if a.relation_count() != b.relation_count() {
        return Err(Violation::RelationCount {
            expected: a.relation_count(),
            found: b.relation_count(),
        });
    }
    for (ra, rb) in a.relations.iter().zip(&b.relations) {
        for x in 0..a.len() {
            for y in 0..a.len() {
                if ra.leq(x, y) != rb.leq(f[x], f[y]) {
                    return Err(Violation::NotPreserved {
                        relation: "partial order",
                        a: x,
                        b: y,
                    });
                }
            }
        }
    }
    if a.is_ordered() && b.is_ordered() {
        for x in 0..a.len() {
            for y in 0..a.len() {
                if a.before(x, y) != b.before(f[x], f[y]) {
                    return Err(Violation::NotPreserved {
                        relation: "linear order",
                        a: x,
                        b: y,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Streams maps preserving and reflecting each relation (and the linear
/// order when both sides carry one).
pub(crate) fn multiposet_embeddings<F>(a: &Multiposet, b: &Multiposet, visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if a.relation_count() != b.relation_count() || a.is_ordered() != b.is_ordered() {
        return Err(Error::ModeMismatch {
            mode: "multiposet",
            expected: "equal relation counts and matching order presence",
        });
    }
    let pairs = a.relation_views().into_iter().zip(b.relation_views()).collect();
    EmbeddingSearch::new(pairs, a.len(), b.len()).run(visit, |_, _| true);
    Ok(())
}

pub fn find_multiposet_embedding(a: &Multiposet, b: &Multiposet) -> Result<Option<Vec<usize>>> {
    let mut found = None;
    multiposet_embeddings(a, b, |m| {
        found = Some(m.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// `τ`: the ordered pair on which every relation is equality.
pub fn wtc_tau_for_template(t: &Template) -> Multiposet {
    Multiposet::ordered_pair(&vec![false; t.len()])
}

/// Strict relations on `0..size` contained in `<` on indices and closed
/// transitively, as posets. Order: by bitmask over the pairs `(i, j)`, `i < j`.
pub fn naturally_labeled_posets(size: usize) -> Vec<FinitePoset> {
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let chosen: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let closed = chosen.iter().all(|&(a, b)| {
            chosen
                .iter()
                .filter(|&&(c, _)| c == b)
                .all(|&(_, d)| chosen.contains(&(a, d)))
        });
        if closed {
            out.push(FinitePoset::from_relations(size, &chosen).expect("forward relation"));
        }
    }
    out
}

/// Every ordered member of the class over `t` on `size` elements with the
/// index order, which is one representative per isomorphism type.
pub fn ordered_members(t: &Template, size: usize) -> Vec<Multiposet> {
    let base = naturally_labeled_posets(size);
    let order: Vec<usize> = (0..size).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<FinitePoset> = Vec::with_capacity(t.len());
    fn rec(
        t: &Template,
        base: &[FinitePoset],
        order: &[usize],
        chosen: &mut Vec<FinitePoset>,
        out: &mut Vec<Multiposet>,
    ) {
        let j = chosen.len();
        if j == t.len() {
            out.push(Multiposet::new(chosen.clone(), Some(order.to_vec())).expect("member"));
            return;
        }
        for candidate in base {
            let conforms = (0..j).all(|i| {
                let below = t.poset().leq(i, j) && i != j;
                let above = t.poset().leq(j, i) && i != j;
                (!below || is_subrelation(&chosen[i], candidate)) && (!above || is_subrelation(candidate, &chosen[i]))
            });
            if conforms {
                chosen.push(candidate.clone());
                rec(t, base, order, chosen, out);
                chosen.pop();
            }
        }
    }
    rec(t, &base, &order, &mut chosen, &mut out);
    out
}

fn is_subrelation(small: &FinitePoset, big: &FinitePoset) -> bool {
    (0..small.len()).all(|a| small.up_set(a).is_subset(big.up_set(a)))
}

/// Exhaustive ordering-property check over the common linear extensions of
/// `a` and of `b`, with multiposet embeddings.
pub fn verify_op_witness_multi(
    a: &Multiposet,
    b: &Multiposet,
    t: &Template,
    extension_limit: u64,
) -> Result<OpWitnessReport> {
    let a = a.without_order();
    let b = b.without_order();
    validate_multiposet(&a, t)?;
    validate_multiposet(&b, t)?;
    let a_union = a
        .union_closure()
        .map_err(|(x, y)| Violation::CyclicUnion { a: x, b: y })?;
    let b_union = b
        .union_closure()
        .map_err(|(x, y)| Violation::CyclicUnion { a: x, b: y })?;
    let mut report = verify_orders(
        &a_union,
        &b_union,
        None,
        extension_limit,
        |bo| b.with_order(bo.to_vec()).expect("common extension"),
        |ao, bm| {
            let am = a.with_order(ao.to_vec()).expect("common extension");
            find_multiposet_embedding(&am, bm).expect("same shape").is_some()
        },
    );
    report.base = Structure::Multiposet(a);
    report.witness = Structure::Multiposet(b);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering_property::verify_op_witness;

    fn chain_template() -> Template {
        Template::new(FinitePoset::chain(2)).unwrap()
    }

    #[test]
    fn trivial_template_reduces_to_ordered_posets() {
        let t = Template::trivial();
        let p = LinearlyOrderedPoset::chain(3);
        assert!(validate_multiposet(&Multiposet::from_ordered_poset(&p), &t).is_ok());
        // a bad order is rejected exactly as for ordered posets
        assert_eq!(
            Multiposet::new(vec![FinitePoset::chain(2)], Some(vec![1, 0])).unwrap_err(),
            LinearlyOrderedPoset::new(FinitePoset::chain(2), vec![1, 0]).unwrap_err()
        );
    }

    #[test]
    fn opposite_strict_pairs_are_inconsistent() {
        let up = FinitePoset::from_relations(2, &[(0, 1)]).unwrap();
        let down = FinitePoset::from_relations(2, &[(1, 0)]).unwrap();
        let m = Multiposet::new(vec![up, down], None).unwrap();
        let t = Template::new(FinitePoset::antichain(2)).unwrap();
        assert!(matches!(
            validate_multiposet(&m, &t),
            Err(Violation::Inconsistent { .. })
        ));
    }

    #[test]
    fn chain_template_conformance() {
        let m = Multiposet::new(vec![FinitePoset::chain(2), FinitePoset::antichain(2)], None).unwrap();
        assert!(matches!(
            validate_multiposet(&m, &chain_template()),
            Err(Violation::Conformance {
                lower: 0,
                upper: 1,
                a: 0,
                b: 1
            })
        ));
        let ok = Multiposet::new(vec![FinitePoset::antichain(2), FinitePoset::chain(2)], None).unwrap();
        assert!(validate_multiposet(&ok, &chain_template()).is_ok());
    }

    #[test]
    fn pairwise_criterion_misses_alternating_cycles() {
        // 0 ⊏₁ 1 ⊏₂ 2 ⊏₁ 3 ⊏₂ 0: no conflicting pair, but no common extension.
        let r1 = FinitePoset::from_relations(4, &[(0, 1), (2, 3)]).unwrap();
        let r2 = FinitePoset::from_relations(4, &[(1, 2), (3, 0)]).unwrap();
        let m = Multiposet::new(vec![r1, r2], None).unwrap();
        assert!(pairwise_conflict(&m).is_none());
        assert!(m.union_closure().is_err());
        let t = Template::new(FinitePoset::antichain(2)).unwrap();
        assert!(matches!(
            validate_multiposet(&m, &t),
            Err(Violation::CyclicUnion { .. })
        ));
    }

    #[test]
    fn tau_is_fully_incomparable() {
        let t = Template::new(FinitePoset::chain(3)).unwrap();
        let tau = wtc_tau_for_template(&t);
        assert_eq!(tau.pair_type(0, 1), vec![false; 3]);
        assert!(in_ordered_class(&tau, &t));
    }

    #[test]
    fn naturally_labeled_counts() {
        // labeled posets on 3 points compatible with the index order
        assert_eq!(naturally_labeled_posets(2).len(), 2);
        assert_eq!(naturally_labeled_posets(3).len(), 7);
    }

    #[test]
    fn members_conform() {
        let t = chain_template();
        let members = ordered_members(&t, 3);
        assert!(!members.is_empty());
        assert!(members.iter().all(|m| in_ordered_class(m, &t)));
    }

    #[test]
    fn op_witness_multi_examples() {
        let t = Template::trivial();
        let pair = Multiposet::from_poset(&FinitePoset::antichain(2));
        let r = verify_op_witness_multi(&pair, &pair, &t, 1000).unwrap();
        assert!(r.verified());
        assert_eq!(r.checked_pairs, 4);

        let t2 = Template::new(FinitePoset::antichain(2)).unwrap();
        let only_first = Multiposet::new(vec![FinitePoset::chain(2), FinitePoset::antichain(2)], None).unwrap();
        let flat = Multiposet::new(vec![FinitePoset::antichain(3), FinitePoset::antichain(3)], None).unwrap();
        assert!(!verify_op_witness_multi(&only_first, &flat, &t2, 1000)
            .unwrap()
            .verified());

        for (a, b) in [
            (FinitePoset::antichain(2), FinitePoset::antichain(2)),
            (FinitePoset::chain(2), FinitePoset::antichain(3)),
            (FinitePoset::antichain(2), FinitePoset::chain(3)),
        ] {
            let multi =
                verify_op_witness_multi(&Multiposet::from_poset(&a), &Multiposet::from_poset(&b), &t, 1000).unwrap();
            let plain = verify_op_witness(&a, &b, 1000);
            assert_eq!(multi.verified(), plain.verified());
            assert_eq!(multi.checked_pairs, plain.checked_pairs);
        }
    }
}
