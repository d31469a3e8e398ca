//! Finite posets, linearly ordered posets and lattices, together with the
//! embedding, isomorphism and automorphism machinery shared by the rest of
//! the crate.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::canon;
use crate::embed::{EmbeddingSearch, Relation};
use crate::error::{Error, Result, Violation};
use crate::limits;
use crate::multiposets::Multiposet;

/// A partial order on `0..n`, stored as reflexive-transitive bitset rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    /// `up[i]` holds every `j` with `i ⊑ j`.
    up: Vec<FixedBitSet>,
    /// `down[i]` holds every `j` with `j ⊑ i`.
    down: Vec<FixedBitSet>,
}

/// Checks a raw `leq` matrix against the partial-order axioms.
pub fn validate_leq(leq: &[Vec<bool>]) -> Result<(), Violation> {
    let n = leq.len();
    for (i, row) in leq.iter().enumerate() {
        if row.len() != n {
            return Err(Violation::Shape {
                detail: format!("row {i} has {} entries, expected {n}", row.len()),
            });
        }
    }
    for (i, row) in leq.iter().enumerate() {
        if !row[i] {
            return Err(Violation::Reflexivity { element: i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if leq[i][j] && leq[j][i] {
                return Err(Violation::Antisymmetry { a: i, b: j });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a == b || !leq[a][b] {
                continue;
            }
            for c in 0..n {
                if leq[b][c] && !leq[a][c] {
                    return Err(Violation::Transitivity { a, b, c });
                }
            }
        }
    }
    Ok(())
}

impl FinitePoset {
    /// Builds a poset from a full `leq` matrix, rejecting invariant violations.
    pub fn from_matrix(leq: &[Vec<bool>]) -> Result<Self, Violation> {
        validate_leq(leq)?;
        Ok(Self::from_matrix_unchecked(leq))
    }

    fn from_matrix_unchecked(leq: &[Vec<bool>]) -> Self {
        let n = leq.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                if leq[i][j] {
                    up[i].insert(j);
                    down[j].insert(i);
                }
            }
        }
        FinitePoset { up, down }
    }

    /// Reflexive-transitive closure of the given strict pairs `(a, b)` meaning
    /// `a ⊑ b`. Fails if the closure is not antisymmetric.
    pub fn from_relations(n: usize, pairs: &[(usize, usize)]) -> Result<Self, Violation> {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Violation::Shape {
                    detail: format!("pair ({a},{b}) out of range for {n} elements"),
                });
            }
            leq[a][b] = true;
        }
        transitive_close(&mut leq);
        Self::from_matrix(&leq)
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relations(n, &[]).expect("antichain is a poset")
    }

    /// The chain `0 ⊑ 1 ⊑ … ⊑ n-1`.
    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relations(n, &pairs).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    /// `a ⊑ b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    /// `a ⊏ b`.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.up[a].contains(b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    pub fn down_set(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    pub(crate) fn up_rows(&self) -> &[FixedBitSet] {
        &self.up
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.leq(i, j)).collect()).collect()
    }

    pub fn is_antichain(&self) -> bool {
        self.up.iter().all(|row| row.count_ones(..) == 1)
    }

    pub fn is_chain(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.comparable(a, b)))
    }

    /// The order dual `a ⊑' b ⇔ b ⊑ a`.
    pub fn dual(&self) -> Self {
        FinitePoset {
            up: self.down.clone(),
            down: self.up.clone(),
        }
    }

    /// Induced subposet on `elements`, relabeled to `0..elements.len()` in
    /// the given order.
    pub fn induced(&self, elements: &[usize]) -> Self {
        let leq: Vec<Vec<bool>> = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| self.leq(a, b)).collect())
            .collect();
        Self::from_matrix_unchecked(&leq)
    }

    /// Relabels element `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in self.up[i].ones() {
                leq[perm[i]][perm[j]] = true;
            }
        }
        Self::from_matrix_unchecked(&leq)
    }

    /// Minimal elements in increasing index order.
    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.down[i].count_ones(..) == 1).collect()
    }

    pub(crate) fn relation(&self) -> Relation<'_> {
        Relation::new(&self.up, &self.down)
    }
}

pub(crate) fn transitive_close(leq: &mut [Vec<bool>]) {
    let n = leq.len();
    for k in 0..n {
        for i in 0..n {
            if !leq[i][k] {
                continue;
            }
            for j in 0..n {
                if leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
}

/// A poset together with a linear order `<` extending it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearlyOrderedPoset {
    poset: FinitePoset,
    /// `order[r]` is the element of rank `r`.
    order: Vec<usize>,
    rank: Vec<usize>,
    /// Non-strict linear order rows, kept for the embedding kernel.
    lin_up: Vec<FixedBitSet>,
    lin_down: Vec<FixedBitSet>,
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &e in order {
        if e >= n || seen[e] {
            return false;
        }
        seen[e] = true;
    }
    true
}

pub(crate) fn ranks_of(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &e) in order.iter().enumerate() {
        rank[e] = r;
    }
    rank
}

/// Non-strict rows of a linear order given by rank: (`up`, `down`).
pub(crate) fn linear_rows(rank: &[usize]) -> (Vec<FixedBitSet>, Vec<FixedBitSet>) {
    let n = rank.len();
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    let mut down = vec![FixedBitSet::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            if rank[i] <= rank[j] {
                up[i].insert(j);
                down[j].insert(i);
            }
        }
    }
    (up, down)
}

impl LinearlyOrderedPoset {
    /// `order` lists the elements from smallest to largest.
    pub fn new(poset: FinitePoset, order: Vec<usize>) -> Result<Self, Violation> {
        let n = poset.len();
        if !is_permutation(&order, n) {
            return Err(Violation::OrderNotPermutation);
        }
        let rank = ranks_of(&order);
        for a in 0..n {
            for b in poset.up[a].ones() {
                if a != b && rank[a] > rank[b] {
                    return Err(Violation::OrderDoesNotExtend { below: a, above: b });
                }
            }
        }
        let (lin_up, lin_down) = linear_rows(&rank);
        Ok(LinearlyOrderedPoset {
            poset,
            order,
            rank,
            lin_up,
            lin_down,
        })
    }

    /// Orders a poset by element index; fails unless indices extend `⊑`.
    pub fn with_index_order(poset: FinitePoset) -> Result<Self, Violation> {
        let n = poset.len();
        Self::new(poset, (0..n).collect())
    }

    /// The `n`-chain ordered along itself.
    pub fn chain(n: usize) -> Self {
        Self::with_index_order(FinitePoset::chain(n)).expect("chain order")
    }

    /// The `n`-antichain ordered by index.
    pub fn antichain(n: usize) -> Self {
        Self::with_index_order(FinitePoset::antichain(n)).expect("antichain order")
    }

    pub fn point() -> Self {
        Self::antichain(1)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rank(&self, a: usize) -> usize {
        self.rank[a]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    /// `a < b` in the linear order.
    pub fn before(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    /// Induced ordered subposet on `elements`, relabeled `0..k` in the
    /// given sequence.
    pub fn induced(&self, elements: &[usize]) -> Self {
        let poset = self.poset.induced(elements);
        let mut order: Vec<usize> = (0..elements.len()).collect();
        order.sort_by_key(|&i| self.rank[elements[i]]);
        Self::new(poset, order).expect("induced order extends induced poset")
    }

    /// Relabels so that element indices coincide with ranks.
    pub fn normalized(&self) -> Self {
        self.induced(&self.order)
    }

    pub(crate) fn linear_relation(&self) -> Relation<'_> {
        Relation::new(&self.lin_up, &self.lin_down)
    }
}

/// A finite lattice given by its meet and join tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteLattice {
    n: usize,
    meet: Vec<usize>,
    join: Vec<usize>,
}

/// Checks raw meet/join tables against the lattice axioms.
pub fn validate_lattice_tables(meet: &[Vec<usize>], join: &[Vec<usize>]) -> Result<(), Violation> {
    let n = meet.len();
    if join.len() != n {
        return Err(Violation::Shape {
            detail: format!("meet has {n} rows, join has {}", join.len()),
        });
    }
    for (name, table) in [("meet", meet), ("join", join)] {
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Violation::Shape {
                    detail: format!("{name} row {i} has {} entries, expected {n}", row.len()),
                });
            }
            if let Some(j) = row.iter().position(|&v| v >= n) {
                return Err(Violation::TableEntry { row: i, col: j });
            }
        }
    }
    for (law, t) in [("meet", meet), ("join", join)] {
        for a in 0..n {
            if t[a][a] != a {
                return Err(Violation::LatticeLaw {
                    law: if law == "meet" {
                        "meet idempotence"
                    } else {
                        "join idempotence"
                    },
                    a,
                    b: a,
                    c: None,
                });
            }
            for b in 0..n {
                if t[a][b] != t[b][a] {
                    return Err(Violation::LatticeLaw {
                        law: if law == "meet" {
                            "meet commutativity"
                        } else {
                            "join commutativity"
                        },
                        a,
                        b,
                        c: None,
                    });
                }
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return Err(Violation::LatticeLaw {
                            law: if law == "meet" {
                                "meet associativity"
                            } else {
                                "join associativity"
                            },
                            a,
                            b,
                            c: Some(c),
                        });
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if meet[a][join[a][b]] != a || join[a][meet[a][b]] != a {
                return Err(Violation::LatticeLaw {
                    law: "absorption",
                    a,
                    b,
                    c: None,
                });
            }
        }
    }
    Ok(())
}

impl FiniteLattice {
    pub fn new(meet: Vec<Vec<usize>>, join: Vec<Vec<usize>>) -> Result<Self, Violation> {
        validate_lattice_tables(&meet, &join)?;
        let n = meet.len();
        Ok(FiniteLattice {
            n,
            meet: meet.into_iter().flatten().collect(),
            join: join.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    pub fn meet_table(&self) -> Vec<Vec<usize>> {
        self.meet.chunks(self.n.max(1)).map(<[usize]>::to_vec).collect()
    }

    pub fn join_table(&self) -> Vec<Vec<usize>> {
        self.join.chunks(self.n.max(1)).map(<[usize]>::to_vec).collect()
    }

    /// Relabels element `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[perm[a]][perm[b]] = perm[self.meet(a, b)];
                join[perm[a]][perm[b]] = perm[self.join(a, b)];
            }
        }
        FiniteLattice::new(meet, join).expect("relabeling preserves lattice laws")
    }

    /// The `n`-element chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        let meet = (0..n).map(|a| (0..n).map(|b| a.min(b)).collect()).collect();
        let join = (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
        FiniteLattice::new(meet, join).expect("chain lattice")
    }

    /// `M₃`: bottom 0, atoms 1, 2, 3, top 4.
    pub fn m3() -> Self {
        lattice_from_poset(
            &FinitePoset::from_relations(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).expect("M3 poset"),
        )
        .expect("M3 is a lattice")
    }

    /// `N₅`: 0 < 1 < 2 < 4 and 0 < 3 < 4.
    pub fn n5() -> Self {
        lattice_from_poset(
            &FinitePoset::from_relations(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).expect("N5 poset"),
        )
        .expect("N5 is a lattice")
    }
}

/// The order of a lattice: `a ⊑ b` iff `a ∧ b = a`.
pub fn rel(l: &FiniteLattice) -> FinitePoset {
    let n = l.len();
    let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| l.meet(a, b) == a).collect()).collect();
    FinitePoset::from_matrix(&leq).expect("meet order of a lattice is a partial order")
}

/// Greatest element of `set` under `p` if it dominates all of `set`.
fn greatest_in(p: &FinitePoset, set: &FixedBitSet) -> Option<usize> {
    set.ones().find(|&g| set.is_subset(p.down_set(g)))
}

fn least_in(p: &FinitePoset, set: &FixedBitSet) -> Option<usize> {
    set.ones().find(|&g| set.is_subset(p.up_set(g)))
}

/// Inverse of [`rel`]: requires every pair to have a glb and a lub.
pub fn lattice_from_poset(p: &FinitePoset) -> Result<FiniteLattice> {
    let n = p.len();
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![0; n]; n];
    for a in 0..n {
        for b in a..n {
            let mut lower = p.down_set(a).clone();
            lower.intersect_with(p.down_set(b));
            let m = greatest_in(p, &lower).ok_or(Error::NotALattice {
                a,
                b,
                missing: "greatest lower bound",
            })?;
            let mut upper = p.up_set(a).clone();
            upper.intersect_with(p.up_set(b));
            let j = least_in(p, &upper).ok_or(Error::NotALattice {
                a,
                b,
                missing: "least upper bound",
            })?;
            meet[a][b] = m;
            meet[b][a] = m;
            join[a][b] = j;
            join[b][a] = j;
        }
    }
    Ok(FiniteLattice::new(meet, join)?)
}

/// Smallest sublattice containing `generators`, relabeled in increasing
/// index order, with its inclusion map into `l`.
pub fn generated_substructure(l: &FiniteLattice, generators: &[usize]) -> Result<(FiniteLattice, Vec<usize>)> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if let Some(&g) = generators.iter().find(|&&g| g >= l.len()) {
        return Err(Error::Precondition(format!("generator {g} out of range")));
    }
    let mut members: BTreeSet<usize> = generators.iter().copied().collect();
    let mut frontier: VecDeque<usize> = members.iter().copied().collect();
    while let Some(a) = frontier.pop_front() {
        let snapshot: Vec<usize> = members.iter().copied().collect();
        for b in snapshot {
            for c in [l.meet(a, b), l.join(a, b)] {
                if members.insert(c) {
                    frontier.push_back(c);
                }
            }
        }
    }
    let inclusion: Vec<usize> = members.into_iter().collect();
    let position = |x: usize| inclusion.binary_search(&x).expect("closed under operations");
    let meet = inclusion
        .iter()
        .map(|&a| inclusion.iter().map(|&b| position(l.meet(a, b))).collect())
        .collect();
    let join = inclusion
        .iter()
        .map(|&a| inclusion.iter().map(|&b| position(l.join(a, b))).collect())
        .collect();
    Ok((FiniteLattice::new(meet, join)?, inclusion))
}

/// What an injective map between structures must preserve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapMode {
    /// `i ⊑ j ⇔ f(i) ⊑ f(j)`.
    Order,
    /// Order embedding that is also monotone for both linear orders.
    OrderedOrder,
    /// Preserves meets and joins.
    Lattice,
}

impl MapMode {
    pub fn name(self) -> &'static str {
        match self {
            MapMode::Order => "order",
            MapMode::OrderedOrder => "ordered-order",
            MapMode::Lattice => "lattice",
        }
    }
}

/// An injective map `map[i]` from source element `i` into a target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructureMap {
    pub map: Vec<usize>,
    pub mode: MapMode,
}

impl StructureMap {
    pub fn image(&self) -> Vec<usize> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img
    }

    pub fn compose(&self, inner: &StructureMap) -> StructureMap {
        StructureMap {
            map: inner.map.iter().map(|&i| self.map[i]).collect(),
            mode: self.mode,
        }
    }
}

/// Any structure handled by the workbench.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Poset(FinitePoset),
    OrderedPoset(LinearlyOrderedPoset),
    Lattice(FiniteLattice),
    Multiposet(Multiposet),
}

impl Structure {
    pub fn len(&self) -> usize {
        match self {
            Structure::Poset(p) => p.len(),
            Structure::OrderedPoset(p) => p.len(),
            Structure::Lattice(l) => l.len(),
            Structure::Multiposet(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Poset(_) => "poset",
            Structure::OrderedPoset(_) => "ordered_poset",
            Structure::Lattice(_) => "lattice",
            Structure::Multiposet(_) => "multiposet",
        }
    }

    /// Re-checks every invariant from the raw tables.
    pub fn validate(&self) -> Result<(), Violation> {
        match self {
            Structure::Poset(p) => validate_leq(&p.to_matrix()),
            Structure::OrderedPoset(p) => {
                validate_leq(&p.poset.to_matrix())?;
                LinearlyOrderedPoset::new(p.poset.clone(), p.order.clone()).map(|_| ())
            }
            Structure::Lattice(l) => validate_lattice_tables(&l.meet_table(), &l.join_table()),
            Structure::Multiposet(m) => m.validate_relations(),
        }
    }

    /// The underlying order relation(s) seen as a poset, when there is exactly one.
    pub fn underlying_poset(&self) -> Option<FinitePoset> {
        match self {
            Structure::Poset(p) => Some(p.clone()),
            Structure::OrderedPoset(p) => Some(p.poset.clone()),
            Structure::Lattice(l) => Some(rel(l)),
            Structure::Multiposet(m) if m.relation_count() == 1 => Some(m.relation(0).clone()),
            Structure::Multiposet(_) => None,
        }
    }
}

/// All linear extensions of `p`, in lexicographic order of the permutations.
pub fn linear_extensions(p: &FinitePoset) -> Vec<LinearlyOrderedPoset> {
    let mut out = Vec::new();
    let _ = for_each_linear_extension(p, |order| {
        out.push(LinearlyOrderedPoset::new(p.clone(), order.to_vec()).expect("extension"));
        ControlFlow::Continue(())
    });
    out
}

/// Streams the linear extensions of `p` as element sequences (smallest
/// first), in lexicographic order. Returns the number visited.
pub fn for_each_linear_extension<F>(p: &FinitePoset, mut visit: F) -> u64
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = p.len();
    // Number of strict predecessors not yet placed.
    let mut pending: Vec<usize> = (0..n).map(|i| p.down_set(i).count_ones(..) - 1).collect();
    let mut placed = vec![false; n];
    let mut prefix = Vec::with_capacity(n);
    let mut count = 0u64;
    fn rec<F: FnMut(&[usize]) -> ControlFlow<()>>(
        p: &FinitePoset,
        pending: &mut [usize],
        placed: &mut [bool],
        prefix: &mut Vec<usize>,
        count: &mut u64,
        visit: &mut F,
    ) -> ControlFlow<()> {
        let n = p.len();
        if prefix.len() == n {
            *count += 1;
            return visit(prefix);
        }
        for e in 0..n {
            if placed[e] || pending[e] != 0 {
                continue;
            }
            placed[e] = true;
            prefix.push(e);
            for s in p.up_set(e).ones() {
                if s != e {
                    pending[s] -= 1;
                }
            }
            let flow = rec(p, pending, placed, prefix, count, visit);
            for s in p.up_set(e).ones() {
                if s != e {
                    pending[s] += 1;
                }
            }
            prefix.pop();
            placed[e] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
    let _ = rec(p, &mut pending, &mut placed, &mut prefix, &mut count, &mut visit);
    count
}

/// Counts linear extensions, stopping once `cap` is exceeded.
pub fn count_linear_extensions(p: &FinitePoset, cap: u64) -> u64 {
    let mut seen = 0u64;
    for_each_linear_extension(p, |_| {
        seen += 1;
        if seen > cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    seen
}

/// Validates `map` as an embedding of `a` into `b` under `mode`.
pub fn validate_map(a: &Structure, b: &Structure, map: &StructureMap) -> Result<(), Violation> {
    let (n, m) = (a.len(), b.len());
    if map.map.len() != n {
        return Err(Violation::MapLength {
            expected: n,
            found: map.map.len(),
        });
    }
    for (i, &x) in map.map.iter().enumerate() {
        if x >= m {
            return Err(Violation::MapOutOfRange { element: i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if map.map[i] == map.map[j] {
                return Err(Violation::Injectivity { a: i, b: j });
            }
        }
    }
    let f = &map.map;
    match (map.mode, a, b) {
        (MapMode::Lattice, Structure::Lattice(la), Structure::Lattice(lb)) => {
            for x in 0..n {
                for y in 0..n {
                    if f[la.meet(x, y)] != lb.meet(f[x], f[y]) {
                        return Err(Violation::NotPreserved {
                            relation: "meet",
                            a: x,
                            b: y,
                        });
                    }
                    if f[la.join(x, y)] != lb.join(f[x], f[y]) {
                        return Err(Violation::NotPreserved {
                            relation: "join",
                            a: x,
                            b: y,
                        });
                    }
                }
            }
            Ok(())
        }
        (MapMode::Lattice, _, _) => Err(Violation::Shape {
            detail: "lattice mode requires lattice source and target".into(),
        }),
        (MapMode::OrderedOrder, Structure::OrderedPoset(pa), Structure::OrderedPoset(pb)) => {
            check_order_preserved(pa.poset(), pb.poset(), f)?;
            for x in 0..n {
                for y in 0..n {
                    if pa.before(x, y) != pb.before(f[x], f[y]) {
                        return Err(Violation::NotPreserved {
                            relation: "linear order",
                            a: x,
                            b: y,
                        });
                    }
                }
            }
            Ok(())
        }
        (MapMode::OrderedOrder, Structure::Multiposet(ma), Structure::Multiposet(mb)) => {
            crate::multiposets::check_multiposet_map(ma, mb, f)
        }
        (MapMode::OrderedOrder, _, _) => Err(Violation::Shape {
            detail: "ordered-order mode requires ordered inputs".into(),
        }),
        (MapMode::Order, Structure::Multiposet(ma), Structure::Multiposet(mb)) => {
            crate::multiposets::check_multiposet_map(&ma.without_order(), &mb.without_order(), f)
        }
        (MapMode::Order, _, _) => {
            let (pa, pb) = match (a.underlying_poset(), b.underlying_poset()) {
                (Some(pa), Some(pb)) => (pa, pb),
                _ => {
                    return Err(Violation::Shape {
                        detail: "order mode requires single-relation inputs".into(),
                    })
                }
            };
            check_order_preserved(&pa, &pb, f)
        }
    }
}

fn check_order_preserved(a: &FinitePoset, b: &FinitePoset, f: &[usize]) -> Result<(), Violation> {
    for x in 0..a.len() {
        for y in 0..a.len() {
            if a.leq(x, y) != b.leq(f[x], f[y]) {
                return Err(Violation::NotPreserved {
                    relation: "partial order",
                    a: x,
                    b: y,
                });
            }
        }
    }
    Ok(())
}

/// Streams every embedding of `a` into `b` under `mode`, in lexicographic
/// order of the image sequences.
pub fn for_each_embedding<F>(a: &Structure, b: &Structure, mode: MapMode, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    match (mode, a, b) {
        (MapMode::Lattice, Structure::Lattice(la), Structure::Lattice(lb)) => {
            lattice_embeddings(la, lb, &mut visit);
            Ok(())
        }
        (MapMode::Lattice, _, _) => Err(Error::ModeMismatch {
            mode: "lattice",
            expected: "lattice",
        }),
        (MapMode::OrderedOrder, Structure::OrderedPoset(pa), Structure::OrderedPoset(pb)) => {
            ordered_embeddings(pa, pb, visit);
            Ok(())
        }
        (MapMode::OrderedOrder, Structure::Multiposet(ma), Structure::Multiposet(mb)) => {
            if !ma.is_ordered() || !mb.is_ordered() {
                return Err(Error::ModeMismatch {
                    mode: "ordered-order",
                    expected: "linearly ordered",
                });
            }
            crate::multiposets::multiposet_embeddings(ma, mb, visit)
        }
        (MapMode::OrderedOrder, _, _) => Err(Error::ModeMismatch {
            mode: "ordered-order",
            expected: "linearly ordered",
        }),
        (MapMode::Order, Structure::Multiposet(ma), Structure::Multiposet(mb)) => {
            crate::multiposets::multiposet_embeddings(&ma.without_order(), &mb.without_order(), visit)
        }
        (MapMode::Order, _, _) => {
            let (pa, pb) = match (a.underlying_poset(), b.underlying_poset()) {
                (Some(pa), Some(pb)) => (pa, pb),
                _ => {
                    return Err(Error::ModeMismatch {
                        mode: "order",
                        expected: "single-relation",
                    })
                }
            };
            order_embeddings(&pa, &pb, visit);
            Ok(())
        }
    }
}

/// Complete, duplicate-free list of embeddings of `a` into `b`.
pub fn enumerate_embeddings(a: &Structure, b: &Structure, mode: MapMode) -> Result<Vec<StructureMap>> {
    let mut out = Vec::new();
    for_each_embedding(a, b, mode, |m| {
        out.push(StructureMap { map: m.to_vec(), mode });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub(crate) fn order_embeddings<F>(a: &FinitePoset, b: &FinitePoset, visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    EmbeddingSearch::new(vec![(a.relation(), b.relation())], a.len(), b.len()).run(visit, |_, _| true);
}

pub(crate) fn ordered_embeddings<F>(a: &LinearlyOrderedPoset, b: &LinearlyOrderedPoset, visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    EmbeddingSearch::new(
        vec![
            (a.poset.relation(), b.poset.relation()),
            (a.linear_relation(), b.linear_relation()),
        ],
        a.len(),
        b.len(),
    )
    .run(visit, |_, _| true);
}

/// First ordered embedding of `a` into `b`, if any.
pub fn find_ordered_embedding(a: &LinearlyOrderedPoset, b: &LinearlyOrderedPoset) -> Option<Vec<usize>> {
    let mut found = None;
    ordered_embeddings(a, b, |m| {
        found = Some(m.to_vec());
        ControlFlow::Break(())
    });
    found
}

fn lattice_embeddings<F>(a: &FiniteLattice, b: &FiniteLattice, visit: &mut F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let (pa, pb) = (rel(a), rel(b));
    // A partial map is rejected as soon as some meet or join among assigned
    // elements has an assigned image that disagrees.
    let consistent = |map: &[Option<usize>], i: usize| -> bool {
        let fi = map[i].expect("just assigned");
        for (j, fj) in map.iter().enumerate() {
            let Some(fj) = *fj else { continue };
            if let Some(fm) = map[a.meet(i, j)] {
                if fm != b.meet(fi, fj) {
                    return false;
                }
            }
            if let Some(fx) = map[a.join(i, j)] {
                if fx != b.join(fi, fj) {
                    return false;
                }
            }
        }
        true
    };
    EmbeddingSearch::new(vec![(pa.relation(), pb.relation())], a.len(), b.len()).run(
        |m| {
            let ok = (0..a.len()).all(|x| {
                (0..a.len()).all(|y| m[a.meet(x, y)] == b.meet(m[x], m[y]) && m[a.join(x, y)] == b.join(m[x], m[y]))
            });
            if ok {
                visit(m)
            } else {
                ControlFlow::Continue(())
            }
        },
        consistent,
    );
}

/// Canonical relabeling and its encoding; isomorphic structures share the
/// encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    /// `relabeling[i]` is the canonical position of element `i`.
    pub relabeling: Vec<usize>,
    /// Kind tag, element count and the relabeled relation bits.
    pub encoding: Vec<u64>,
}

impl CanonicalForm {
    pub fn certificate(&self) -> String {
        self.encoding
            .iter()
            .map(|w| format!("{w:016x}"))
            .collect::<Vec<_>>()
            .join("")
    }
}

pub fn canonical_form(s: &Structure) -> CanonicalForm {
    match s {
        Structure::Poset(p) => canon::canonical(0, &[p.up_rows()]),
        Structure::Lattice(l) => {
            let p = rel(l);
            canon::canonical(2, &[p.up_rows()])
        }
        Structure::OrderedPoset(p) => canon::ordered(1, &[p.poset.up_rows()], &p.rank),
        Structure::Multiposet(m) => {
            let rows: Vec<&[FixedBitSet]> = m.relations().iter().map(FinitePoset::up_rows).collect();
            match m.ranks() {
                Some(rank) => canon::ordered(3, &rows, rank),
                None => canon::canonical(4, &rows),
            }
        }
    }
}

/// Is there an isomorphism `a ≅ b`? Decided by embedding search, independently
/// of [`canonical_form`].
pub fn isomorphic(a: &Structure, b: &Structure) -> bool {
    if a.len() != b.len() || a.kind() != b.kind() {
        return false;
    }
    let mode = match a {
        Structure::Lattice(_) => MapMode::Lattice,
        Structure::OrderedPoset(_) => MapMode::OrderedOrder,
        Structure::Multiposet(m) if m.is_ordered() => MapMode::OrderedOrder,
        _ => MapMode::Order,
    };
    let mut found = false;
    let _ = for_each_embedding(a, b, mode, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

/// Full automorphism group with a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub elements: Vec<Vec<usize>>,
    pub generators: Vec<Vec<usize>>,
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_rigid(&self) -> bool {
        self.elements.len() == 1
    }
}

pub fn automorphisms(s: &Structure) -> Result<AutomorphismGroup> {
    let n = s.len();
    if n > limits::AUTOMORPHISM_MAX_N {
        return Err(Error::BoundExceeded {
            what: format!("automorphism enumeration on {n} elements"),
            limit: limits::AUTOMORPHISM_MAX_N as u128,
        });
    }
    let mode = match s {
        Structure::Lattice(_) => MapMode::Lattice,
        Structure::OrderedPoset(_) => MapMode::OrderedOrder,
        Structure::Multiposet(m) if m.is_ordered() => MapMode::OrderedOrder,
        _ => MapMode::Order,
    };
    let elements: Vec<Vec<usize>> = enumerate_embeddings(s, s, mode)?.into_iter().map(|m| m.map).collect();
    let generators = generating_set(n, &elements);
    Ok(AutomorphismGroup { elements, generators })
}

pub fn is_rigid(s: &Structure) -> Result<bool> {
    Ok(automorphisms(s)?.is_rigid())
}

/// Greedy generating set: keep a permutation when it is not yet in the
/// group generated by those kept so far.
fn generating_set(n: usize, elements: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..n).collect();
    let mut generated: HashSet<Vec<usize>> = HashSet::from([identity]);
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for g in elements {
        if generated.contains(g) {
            continue;
        }
        gens.push(g.clone());
        let mut queue: VecDeque<Vec<usize>> = generated.iter().cloned().collect();
        while let Some(p) = queue.pop_front() {
            for h in &gens {
                let q: Vec<usize> = p.iter().map(|&x| h[x]).collect();
                if generated.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
    }
    gens
}
