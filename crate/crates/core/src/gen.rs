//! Corpora of small structures up to isomorphism.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits;
use crate::multiposets::naturally_labeled_posets;
use crate::powerset_pi::downset_profile;
use crate::structures::{
    canonical_form, for_each_linear_extension, lattice_from_poset, FinitePoset, LinearlyOrderedPoset, Structure,
};
use crate::varieties::{satisfies_identity, Identity};

fn check_bound(n: usize) -> Result<()> {
    if n > limits::GEN_MAX_N {
        return Err(Error::BoundExceeded {
            what: format!("poset generation on {n} elements"),
            limit: limits::GEN_MAX_N as u128,
        });
    }
    Ok(())
}

/// All posets on `n` elements up to isomorphism, each relabeled into its
/// canonical form and listed by increasing canonical encoding.
///
/// Every poset arises from one on `n − 1` elements by adding a maximal
/// element whose strict down-set is a downset, so that is how candidates are
/// produced before deduplication.
pub fn gen_posets(n: usize) -> Result<Vec<FinitePoset>> {
    check_bound(n)?;
    let mut level = vec![FinitePoset::antichain(0)];
    for size in 1..=n {
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut next: Vec<(Vec<u64>, FinitePoset)> = Vec::new();
        for p in &level {
            for below in downsets_with_empty(p)? {
                let mut pairs: Vec<(usize, usize)> = Vec::new();
                for a in 0..p.len() {
                    for b in p.up_set(a).ones() {
                        if a != b {
                            pairs.push((a, b));
                        }
                    }
                }
                pairs.extend(below.iter().map(|&d| (d, size - 1)));
                let q = FinitePoset::from_relations(size, &pairs).map_err(|v| Error::Internal(v.to_string()))?;
                let cf = canonical_form(&Structure::Poset(q.clone()));
                if seen.insert(cf.encoding.clone()) {
                    next.push((cf.encoding, q.relabel(&cf.relabeling)));
                }
            }
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        level = next.into_iter().map(|(_, q)| q).collect();
    }
    Ok(level)
}

/// Every downset of `p` (including the empty one) as a sorted element list.
fn downsets_with_empty(p: &FinitePoset) -> Result<Vec<Vec<usize>>> {
    if p.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    let mut first = Vec::new();
    for_each_linear_extension(p, |o| {
        first = o.to_vec();
        ControlFlow::Break(())
    });
    let order = LinearlyOrderedPoset::new(p.clone(), first).map_err(|v| Error::Internal(v.to_string()))?;
    let profile = downset_profile(&order)?;
    let mut out = vec![Vec::new()];
    for alpha in 0..profile.m() {
        let mut set: Vec<usize> = (0..p.len()).filter(|&e| profile.contains(alpha, e)).collect();
        set.sort_unstable();
        out.push(set);
    }
    Ok(out)
}

/// All linearly ordered posets on `n` elements up to isomorphism: the
/// naturally labeled posets, each ordered by index.
pub fn gen_ordered_posets(n: usize) -> Result<Vec<LinearlyOrderedPoset>> {
    if n > 5 {
        return Err(Error::BoundExceeded {
            what: format!("ordered poset generation on {n} elements"),
            limit: 5,
        });
    }
    Ok(naturally_labeled_posets(n)
        .into_iter()
        .map(|p| LinearlyOrderedPoset::with_index_order(p).expect("natural labeling"))
        .collect())
}

/// Counts per size of the standard corpora.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub n: usize,
    pub posets: usize,
    pub ordered_posets: Option<usize>,
    pub lattices: usize,
    pub modular_lattices: usize,
    pub distributive_lattices: usize,
}

pub fn census(n: usize) -> Result<CensusRow> {
    let posets = gen_posets(n)?;
    let lattices: Vec<_> = posets.iter().filter_map(|p| lattice_from_poset(p).ok()).collect();
    let (m, d) = (Identity::modular(), Identity::distributive());
    Ok(CensusRow {
        n,
        posets: posets.len(),
        ordered_posets: (n <= 5).then(|| naturally_labeled_posets(n).len()),
        lattices: lattices.len(),
        modular_lattices: lattices
            .iter()
            .filter(|l| satisfies_identity(l, &m.lhs, &m.rhs).holds())
            .count(),
        distributive_lattices: lattices
            .iter()
            .filter(|l| satisfies_identity(l, &d.lhs, &d.rhs).holds())
            .count(),
    })
}
