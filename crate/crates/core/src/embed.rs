//! Backtracking kernel for injective maps that preserve and reflect a list of
//! binary relations, with forward checking on bitset domains.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

/// Non-strict relation rows: `up[i]` = `{j : i R j}`, `down[i]` = `{j : j R i}`.
#[derive(Clone, Copy)]
pub(crate) struct Relation<'a> {
    up: &'a [FixedBitSet],
    down: &'a [FixedBitSet],
}

impl<'a> Relation<'a> {
    pub(crate) fn new(up: &'a [FixedBitSet], down: &'a [FixedBitSet]) -> Self {
        Relation { up, down }
    }
}

/// Source/target relation pairs; the map must satisfy `i R j ⇔ f(i) R' f(j)`
/// for each pair. Source elements are assigned in index order and target
/// candidates in increasing index order, so maps are produced in
/// lexicographic order.
pub(crate) struct EmbeddingSearch<'a> {
    relations: Vec<(Relation<'a>, Relation<'a>)>,
    n: usize,
    m: usize,
}

impl<'a> EmbeddingSearch<'a> {
    pub(crate) fn new(relations: Vec<(Relation<'a>, Relation<'a>)>, n: usize, m: usize) -> Self {
        EmbeddingSearch { relations, n, m }
    }

    /// `prune(partial, i)` is called right after element `i` is assigned and
    /// may reject the partial map.
    pub(crate) fn run<V, P>(&self, mut visit: V, prune: P)
    where
        V: FnMut(&[usize]) -> ControlFlow<()>,
        P: Fn(&[Option<usize>], usize) -> bool,
    {
        if self.n > self.m {
            return;
        }
        let mut full = FixedBitSet::with_capacity(self.m);
        full.insert_range(..);
        let domains = vec![full; self.n];
        let mut partial = vec![None; self.n];
        let mut image = vec![0; self.n];
        let _ = self.descend(0, domains, &mut partial, &mut image, &mut visit, &prune);
    }

    fn descend<V, P>(
        &self,
        i: usize,
        domains: Vec<FixedBitSet>,
        partial: &mut Vec<Option<usize>>,
        image: &mut Vec<usize>,
        visit: &mut V,
        prune: &P,
    ) -> ControlFlow<()>
    where
        V: FnMut(&[usize]) -> ControlFlow<()>,
        P: Fn(&[Option<usize>], usize) -> bool,
    {
        if i == self.n {
            return visit(image);
        }
        for x in domains[i].ones() {
            partial[i] = Some(x);
            image[i] = x;
            if prune(partial, i) {
                if let Some(next) = self.restrict(i, x, &domains) {
                    self.descend(i + 1, next, partial, image, visit, prune)?;
                }
            }
            partial[i] = None;
        }
        ControlFlow::Continue(())
    }

    /// Domains of the elements after `i` once `i ↦ x`; `None` on a wipe-out.
    fn restrict(&self, i: usize, x: usize, domains: &[FixedBitSet]) -> Option<Vec<FixedBitSet>> {
        let mut next = domains.to_vec();
        for (k, dom) in next.iter_mut().enumerate().skip(i + 1) {
            dom.set(x, false);
            for (src, tgt) in &self.relations {
                if src.up[i].contains(k) {
                    dom.intersect_with(&tgt.up[x]);
                } else {
                    dom.difference_with(&tgt.up[x]);
                }
                if src.down[i].contains(k) {
                    dom.intersect_with(&tgt.down[x]);
                } else {
                    dom.difference_with(&tgt.down[x]);
                }
            }
            if dom.is_clear() {
                return None;
            }
        }
        Some(next)
    }
}
