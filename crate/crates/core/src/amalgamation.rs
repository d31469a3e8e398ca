//! Free amalgamation of ordered (multi)posets, the `∇` construction and the
//! weak triangle condition.
//!
//! An ordered poset is handled as a one-relation ordered multiposet.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result, Violation};
use crate::multiposets::{check_multiposet_map, naturally_labeled_posets, Multiposet};
use crate::structures::{canonical_form, transitive_close, FinitePoset, LinearlyOrderedPoset, Structure};

/// Two embeddings `f1: a ↪ b1`, `f2: a ↪ b2` of ordered multiposets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamationInstance {
    pub a: Multiposet,
    pub b1: Multiposet,
    pub b2: Multiposet,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

/// `d` with `g1 ∘ f1 = g2 ∘ f2`. `g1` is always the identity on `b1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub d: Multiposet,
    pub g1: Vec<usize>,
    pub g2: Vec<usize>,
}

fn check_embedding(a: &Multiposet, b: &Multiposet, f: &[usize]) -> Result<(), Violation> {
    if f.len() != a.len() {
        return Err(Violation::MapLength {
            expected: a.len(),
            found: f.len(),
        });
    }
    for (i, &x) in f.iter().enumerate() {
        if x >= b.len() {
            return Err(Violation::MapOutOfRange { element: i });
        }
        if let Some(j) = f[..i].iter().position(|&y| y == x) {
            return Err(Violation::Injectivity { a: j, b: i });
        }
    }
    check_multiposet_map(a, b, f)
}

impl AmalgamationInstance {
    pub fn new(a: Multiposet, b1: Multiposet, b2: Multiposet, f1: Vec<usize>, f2: Vec<usize>) -> Result<Self> {
        for m in [&a, &b1, &b2] {
            if !m.is_ordered() {
                return Err(Error::Precondition(
                    "amalgamation inputs must be linearly ordered".into(),
                ));
            }
        }
        check_embedding(&a, &b1, &f1)?;
        check_embedding(&a, &b2, &f2)?;
        Ok(AmalgamationInstance { a, b1, b2, f1, f2 })
    }

    /// Ordered posets as one-relation multiposets.
    pub fn ordered_posets(
        a: &LinearlyOrderedPoset,
        b1: &LinearlyOrderedPoset,
        b2: &LinearlyOrderedPoset,
        f1: Vec<usize>,
        f2: Vec<usize>,
    ) -> Result<Self> {
        Self::new(
            Multiposet::from_ordered_poset(a),
            Multiposet::from_ordered_poset(b1),
            Multiposet::from_ordered_poset(b2),
            f1,
            f2,
        )
    }
}

/// Free amalgam. Elements of `b1` keep their indices and the elements of
/// `b2` outside `f2(a)` follow in index order; each relation is the
/// transitive closure of the union. The linear order is a greedy
/// topological sort of both input orders that prefers `b1` elements and then
/// the lower input rank.
pub fn amalgamate(inst: &AmalgamationInstance) -> Result<Amalgam> {
    let (b1, b2) = (&inst.b1, &inst.b2);
    let (n1, n2) = (b1.len(), b2.len());
    let mut g2 = vec![usize::MAX; n2];
    for (x, &y) in inst.f2.iter().enumerate() {
        g2[y] = inst.f1[x];
    }
    let mut next = n1;
    for slot in g2.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let n = next;
    let g1: Vec<usize> = (0..n1).collect();
    let mut relations = Vec::with_capacity(b1.relation_count());
    for (r1, r2) in b1.relations().iter().zip(b2.relations()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for a in 0..n1 {
            for b in r1.up_set(a).ones() {
                leq[a][b] = true;
            }
        }
        for a in 0..n2 {
            for b in r2.up_set(a).ones() {
                leq[g2[a]][g2[b]] = true;
            }
        }
        transitive_close(&mut leq);
        for a in 0..n {
            for b in a + 1..n {
                if leq[a][b] && leq[b][a] {
                    return Err(Error::ClosureViolation { a, b });
                }
            }
        }
        relations.push(FinitePoset::from_matrix(&leq).map_err(|v| Error::Internal(v.to_string()))?);
    }
    let order = merge_orders(b1, b2, &g2, &relations, n)?;
    let d = Multiposet::new(relations, Some(order)).map_err(|v| Error::Internal(format!("amalgam: {v}")))?;
    check_embedding(b1, &d, &g1).map_err(|v| Error::Internal(format!("first amalgam map: {v}")))?;
    check_embedding(b2, &d, &g2).map_err(|v| Error::Internal(format!("second amalgam map: {v}")))?;
    if inst.f1.iter().zip(&inst.f2).any(|(&x, &y)| g1[x] != g2[y]) {
        return Err(Error::Internal("amalgamation square does not commute".into()));
    }
    Ok(Amalgam { d, g1, g2 })
}

fn merge_orders(
    b1: &Multiposet,
    b2: &Multiposet,
    g2: &[usize],
    relations: &[FinitePoset],
    n: usize,
) -> Result<Vec<usize>> {
    let n1 = b1.len();
    let mut before = vec![vec![false; n]; n];
    let o1 = b1.order().expect("ordered");
    for w in o1.windows(2) {
        before[w[0]][w[1]] = true;
    }
    let o2 = b2.order().expect("ordered");
    for w in o2.windows(2) {
        before[g2[w[0]]][g2[w[1]]] = true;
    }
    for r in relations {
        for a in 0..n {
            for b in r.up_set(a).ones() {
                if a != b {
                    before[a][b] = true;
                }
            }
        }
    }
    let mut indegree: Vec<usize> = (0..n).map(|b| (0..n).filter(|&a| before[a][b]).count()).collect();
    let r1 = b1.ranks().expect("ordered");
    let r2 = b2.ranks().expect("ordered");
    let mut input_rank = vec![0; n];
    input_rank[..n1].copy_from_slice(&r1[..n1]);
    for (y, &d) in g2.iter().enumerate() {
        if d >= n1 {
            input_rank[d] = r2[y];
        }
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = (0..n)
            .filter(|&v| !placed[v] && indegree[v] == 0)
            .min_by_key(|&v| (v >= n1, input_rank[v], v))
            .ok_or_else(|| Error::Internal("the merged linear orders contain a cycle".into()))?;
        placed[pick] = true;
        order.push(pick);
        for b in 0..n {
            if before[pick][b] {
                indegree[b] -= 1;
            }
        }
    }
    Ok(order)
}

/// Ordered-poset wrapper around [`amalgamate`].
pub fn amalgamate_ordered_posets(
    a: &LinearlyOrderedPoset,
    b1: &LinearlyOrderedPoset,
    b2: &LinearlyOrderedPoset,
    f1: &[usize],
    f2: &[usize],
) -> Result<(LinearlyOrderedPoset, Vec<usize>, Vec<usize>)> {
    let inst = AmalgamationInstance::ordered_posets(a, b1, b2, f1.to_vec(), f2.to_vec())?;
    let am = amalgamate(&inst)?;
    let d = am.d.to_ordered_poset().expect("one relation, ordered");
    Ok((d, am.g1, am.g2))
}

/// The ordered pair `⟨x, y⟩` of an ordered multiposet, with `x` first.
pub fn pair_substructure(m: &Multiposet, x: usize, y: usize) -> Multiposet {
    if m.before(x, y) {
        m.induced(&[x, y])
    } else {
        m.induced(&[y, x])
    }
}

/// All 2-element substructures of the members, up to isomorphism, sorted by
/// canonical encoding. For relational signatures 2-generated means
/// 2-element.
pub fn two_generated(members: &[Multiposet]) -> Vec<Multiposet> {
    let mut seen: BTreeMap<Vec<u64>, Multiposet> = BTreeMap::new();
    for m in members {
        for x in 0..m.len() {
            for y in x + 1..m.len() {
                let p = pair_substructure(m, x, y);
                seen.entry(canonical_form(&Structure::Multiposet(p.clone())).encoding)
                    .or_insert(p);
            }
        }
    }
    seen.into_values().collect()
}

fn same_pair_type(p: &Multiposet, q: &Multiposet) -> bool {
    p.len() == 2
        && q.len() == 2
        && p.relation_count() == q.relation_count()
        && p.pair_type(p.order().expect("ordered")[0], p.order().expect("ordered")[1])
            == q.pair_type(q.order().expect("ordered")[0], q.order().expect("ordered")[1])
}

/// `D` with marked `x < y < z` for one `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleWitness {
    pub d: Multiposet,
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WtcInstance {
    pub sigmas: Vec<Multiposet>,
    pub tau: Multiposet,
    /// `witnesses[i]` serves `sigmas[i]`.
    pub witnesses: Vec<TriangleWitness>,
}

impl WtcInstance {
    /// Index of the witness whose `σ` has the same type as `pair`.
    pub fn witness_for(&self, pair: &Multiposet) -> Option<&TriangleWitness> {
        self.sigmas
            .iter()
            .position(|s| same_pair_type(s, pair))
            .map(|i| &self.witnesses[i])
    }
}

/// Ordered multiposets with `r` relations on `size` elements, ordered by
/// index, one per isomorphism type; relation `i` ranges over the naturally
/// labeled posets.
pub fn ordered_candidates(size: usize, r: usize) -> Vec<Multiposet> {
    let base = naturally_labeled_posets(size);
    let order: Vec<usize> = (0..size).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; r];
    if base.is_empty() || r == 0 {
        return out;
    }
    loop {
        let relations = idx.iter().map(|&i| base[i].clone()).collect();
        if let Ok(m) = Multiposet::new(relations, Some(order.clone())) {
            out.push(m);
        }
        let mut k = r;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < base.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Checks the three isomorphism conditions of a triangle witness.
pub fn check_triangle(w: &TriangleWitness, sigma: &Multiposet, tau: &Multiposet) -> Result<(), String> {
    let d = &w.d;
    let (x, y, z) = (w.x, w.y, w.z);
    if x >= d.len() || y >= d.len() || z >= d.len() {
        return Err("marked element out of range".into());
    }
    if !(d.before(x, y) && d.before(y, z)) {
        return Err("marked elements are not in the order x < y < z".into());
    }
    let (xz, xy, yz) = (d.induced(&[x, z]), d.induced(&[x, y]), d.induced(&[y, z]));
    for (what, pair, want) in [("⟨x,z⟩", &xz, sigma), ("⟨x,y⟩", &xy, tau), ("⟨y,z⟩", &yz, tau)] {
        let iso = crate::structures::isomorphic(
            &Structure::Multiposet(pair.clone()),
            &Structure::Multiposet(want.clone()),
        );
        if !iso {
            return Err(format!("{what} has the wrong type"));
        }
    }
    Ok(())
}

/// For each `σ`, searches ordered class members of size 3 up to `bound`
/// for a triple `x < y < z` with `⟨x,z⟩ ≅ σ` and `⟨x,y⟩ ≅ ⟨y,z⟩ ≅ τ`.
pub fn wtc_check<C>(sigmas: &[Multiposet], tau: &Multiposet, bound: usize, class: C) -> Result<WtcInstance>
where
    C: Fn(&Multiposet) -> bool + Sync,
{
    if sigmas.is_empty() {
        return Err(Error::Precondition("the set of pair types must be nonempty".into()));
    }
    let r = tau.relation_count();
    if tau.len() != 2 || !tau.is_ordered() {
        return Err(Error::Precondition("tau must be an ordered 2-element structure".into()));
    }
    for s in sigmas {
        if s.len() != 2 || !s.is_ordered() || s.relation_count() != r {
            return Err(Error::Precondition(
                "every sigma must be an ordered 2-element structure like tau".into(),
            ));
        }
    }
    let pools: Vec<Vec<Multiposet>> = (3..=bound.max(3))
        .map(|size| ordered_candidates(size, r).into_iter().filter(|d| class(d)).collect())
        .collect();
    let found: Vec<Option<TriangleWitness>> = sigmas
        .par_iter()
        .map(|sigma| {
            pools.iter().find_map(|pool| {
                pool.iter().find_map(|d| {
                    let n = d.len();
                    for x in 0..n {
                        for y in x + 1..n {
                            if !same_pair_type(&d.induced(&[x, y]), tau) {
                                continue;
                            }
                            for z in y + 1..n {
                                if same_pair_type(&d.induced(&[x, z]), sigma)
                                    && same_pair_type(&d.induced(&[y, z]), tau)
                                {
                                    return Some(TriangleWitness { d: d.clone(), x, y, z });
                                }
                            }
                        }
                    }
                    None
                })
            })
        })
        .collect();
    let mut witnesses = Vec::with_capacity(sigmas.len());
    for (i, (w, sigma)) in found.into_iter().zip(sigmas).enumerate() {
        let w = w.ok_or(Error::MissingSigma { sigma: i })?;
        check_triangle(&w, sigma, tau).map_err(|e| Error::Internal(format!("witness {i}: {e}")))?;
        witnesses.push(w);
    }
    Ok(WtcInstance {
        sigmas: sigmas.to_vec(),
        tau: tau.clone(),
        witnesses,
    })
}

/// Result of `∇`: the final amalgam and, for each pair `(aᵢ, bᵢ)`, the
/// inserted middle element `yᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nabla {
    pub d: Multiposet,
    pub middles: Vec<(usize, usize, usize)>,
}

/// The `∇` construction: one amalgamation with the matching triangle
/// witness per pair `aᵢ < bᵢ`, pairs taken in increasing (rank, rank)
/// order. Elements of `b` keep their indices throughout.
pub fn nabla(b: &Multiposet, wtc: &WtcInstance) -> Result<Nabla> {
    if !b.is_ordered() {
        return Err(Error::Precondition("nabla needs a linearly ordered structure".into()));
    }
    let order = b.order().expect("ordered").to_vec();
    let mut pairs = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            pairs.push((order[i], order[j]));
        }
    }
    let mut current = b.clone();
    let mut middles = Vec::with_capacity(pairs.len());
    for (i, &(ai, bi)) in pairs.iter().enumerate() {
        let sigma = b.induced(&[ai, bi]);
        let w = wtc.witness_for(&sigma).ok_or(Error::MissingSigma { sigma: i })?;
        let inst = AmalgamationInstance::new(sigma, current, w.d.clone(), vec![ai, bi], vec![w.x, w.z])?;
        let am = amalgamate(&inst)?;
        middles.push((ai, am.g2[w.y], bi));
        current = am.d;
    }
    let out = Nabla { d: current, middles };
    check_nabla(b, &wtc.tau, &out).map_err(Error::Internal)?;
    Ok(out)
}

/// Independent postcondition check: `b` sits on its own indices inside
/// `d`, and every pair `a < c` of `b` has some `y` of `d` with
/// `a < y < c` and `⟨a,y⟩ ≅ ⟨y,c⟩ ≅ τ`.
pub fn check_nabla(b: &Multiposet, tau: &Multiposet, out: &Nabla) -> Result<(), String> {
    let d = &out.d;
    let own: Vec<usize> = (0..b.len()).collect();
    if d.len() < b.len() || &d.induced(&own) != b {
        return Err("the input is not an induced substructure on its own indices".into());
    }
    for a in 0..b.len() {
        for c in 0..b.len() {
            if !b.before(a, c) {
                continue;
            }
            let ok = (0..d.len()).any(|y| {
                d.before(a, y)
                    && d.before(y, c)
                    && same_pair_type(&d.induced(&[a, y]), tau)
                    && same_pair_type(&d.induced(&[y, c]), tau)
            });
            if !ok {
                return Err(format!("no middle element for the pair ({a},{c})"));
            }
        }
    }
    Ok(())
}

/// Weak-triangle data for all ordered posets: both pair types, with the
/// ordered 2-antichain as `τ`.
pub fn ordered_poset_wtc() -> Result<WtcInstance> {
    let sigmas = vec![
        Multiposet::from_ordered_poset(&LinearlyOrderedPoset::chain(2)),
        Multiposet::from_ordered_poset(&LinearlyOrderedPoset::antichain(2)),
    ];
    let tau = Multiposet::from_ordered_poset(&LinearlyOrderedPoset::antichain(2));
    wtc_check(&sigmas, &tau, 3, |_| true)
}

/// `∇` for an ordered poset.
pub fn nabla_ordered(b: &LinearlyOrderedPoset, wtc: &WtcInstance) -> Result<(LinearlyOrderedPoset, Nabla)> {
    let out = nabla(&Multiposet::from_ordered_poset(b), wtc)?;
    let d = out.d.to_ordered_poset().expect("one relation, ordered");
    Ok((d, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lop(n: usize, pairs: &[(usize, usize)]) -> LinearlyOrderedPoset {
        LinearlyOrderedPoset::with_index_order(FinitePoset::from_relations(n, pairs).unwrap()).unwrap()
    }

    #[test]
    fn identity_amalgam() {
        let a = lop(3, &[(0, 2)]);
        let (d, g1, g2) = amalgamate_ordered_posets(&a, &a, &a, &[0, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(d, a);
        assert_eq!(g1, g2);
    }

    #[test]
    fn two_tops() {
        let p = LinearlyOrderedPoset::point();
        let c = LinearlyOrderedPoset::chain(2);
        let (d, g1, g2) = amalgamate_ordered_posets(&p, &c, &c, &[0], &[0]).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(g1, vec![0, 1]);
        assert_eq!(g2, vec![0, 2]);
        assert!(d.poset().lt(0, 1) && d.poset().lt(0, 2) && !d.poset().comparable(1, 2));
        assert_eq!(d.order(), &[0, 1, 2]);
    }

    #[test]
    fn middles_stay_incomparable() {
        let a = LinearlyOrderedPoset::chain(2);
        let b = LinearlyOrderedPoset::chain(3);
        let (d, _, g2) = amalgamate_ordered_posets(&a, &b, &b, &[0, 2], &[0, 2]).unwrap();
        assert_eq!(d.len(), 4);
        assert!(!d.poset().comparable(1, g2[1]));
    }

    #[test]
    fn pair_types_of_ordered_posets() {
        let members: Vec<Multiposet> = (1..=4)
            .flat_map(naturally_labeled_posets)
            .map(|p| Multiposet::from_ordered_poset(&LinearlyOrderedPoset::with_index_order(p).unwrap()))
            .collect();
        assert_eq!(two_generated(&members).len(), 2);
        let chains = vec![Multiposet::from_ordered_poset(&LinearlyOrderedPoset::chain(4))];
        assert_eq!(two_generated(&chains).len(), 1);
    }

    #[test]
    fn wtc_examples() {
        let inst = ordered_poset_wtc().unwrap();
        assert!(inst.witnesses.iter().all(|w| w.d.len() == 3));
        let chain = Multiposet::from_ordered_poset(&LinearlyOrderedPoset::chain(2));
        let is_chain = |m: &Multiposet| m.relation(0).is_chain();
        let w = wtc_check(std::slice::from_ref(&chain), &chain, 3, is_chain).unwrap();
        assert!(w.witnesses[0].d.relation(0).is_chain());
        let anti = Multiposet::from_ordered_poset(&LinearlyOrderedPoset::antichain(2));
        assert!(matches!(
            wtc_check(&[anti], &chain, 3, is_chain),
            Err(Error::MissingSigma { sigma: 0 })
        ));
    }

    #[test]
    fn nabla_examples() {
        let wtc = ordered_poset_wtc().unwrap();
        let (d, _) = nabla_ordered(&LinearlyOrderedPoset::chain(2), &wtc).unwrap();
        let triangle = lop(3, &[(0, 2)]);
        assert_eq!(d.normalized(), triangle);
        let (d, out) = nabla_ordered(&LinearlyOrderedPoset::antichain(2), &wtc).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(out.middles.len(), 1);
        assert!(d.poset().is_antichain());
        let (d, _) = nabla_ordered(&LinearlyOrderedPoset::point(), &wtc).unwrap();
        assert_eq!(d, LinearlyOrderedPoset::point());
    }
}
