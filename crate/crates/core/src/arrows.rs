//! Deciding `C ⟶ (B)^A_k` for linearly ordered posets.
//!
//! The arrow fails iff the copies of `A` in `C` can be `k`-colored so that no
//! copy of `B` has all of its `A`-copies in one color. That refutation search
//! is a constraint problem: one variable per `A`-copy, one not-all-equal
//! constraint per `B`-copy.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits;
use crate::powerset_pi::pi;
use crate::structures::{find_ordered_embedding, ordered_embeddings, LinearlyOrderedPoset};

/// Copies of a pattern inside a host, as sorted image index sets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CopySet {
    pub copies: Vec<Vec<usize>>,
}

impl CopySet {
    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }
}

/// All substructures of `host` isomorphic to `pattern`. Ordered posets are
/// rigid, so each image carries exactly one embedding.
pub fn copies_of(pattern: &LinearlyOrderedPoset, host: &LinearlyOrderedPoset) -> CopySet {
    let mut copies = Vec::new();
    ordered_embeddings(pattern, host, |m| {
        let mut img = m.to_vec();
        img.sort_unstable();
        copies.push(img);
        ControlFlow::Continue(())
    });
    copies.sort();
    copies.dedup();
    CopySet { copies }
}

/// Resource limits for a refutation search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Split the search over top-level branches on the rayon pool.
    pub parallel: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            node_limit: Some(limits::DEFAULT_NODE_LIMIT),
            time_limit: None,
            parallel: false,
        }
    }
}

impl SearchBudget {
    /// Single-threaded, node-bounded only: reproducible run to run.
    pub fn deterministic(node_limit: u64) -> Self {
        SearchBudget {
            node_limit: Some(node_limit),
            time_limit: None,
            parallel: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

/// Result of deciding `C ⟶ (B)^A_k`.
#[derive(Clone, Debug)]
pub struct ArrowVerdict {
    pub outcome: Outcome,
    pub k: usize,
    pub a_copies: CopySet,
    pub b_copy_count: usize,
    /// Color of each `A`-copy (indexed like `a_copies`) when the arrow fails.
    pub refutation: Option<Vec<usize>>,
    pub nodes: u64,
}

impl ArrowVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

/// Not-all-equal constraint system over `A`-copies.
#[derive(Clone, Debug)]
pub struct ArrowInstance {
    pub a_copies: CopySet,
    /// For each `B`-copy, the indices of the `A`-copies inside it.
    pub constraints: Vec<Vec<u32>>,
    pub b_copy_count: usize,
}

/// Builds the constraint system; `A`-copies inside a `B`-copy are found by
/// composing the embeddings `A ↪ B` with each copy `B ↪ C`.
pub fn arrow_instance(c: &LinearlyOrderedPoset, a: &LinearlyOrderedPoset, b: &LinearlyOrderedPoset) -> ArrowInstance {
    let a_copies = copies_of(a, c);
    let index: HashMap<&[usize], u32> = a_copies
        .copies
        .iter()
        .enumerate()
        .map(|(i, img)| (img.as_slice(), i as u32))
        .collect();
    let mut a_in_b: Vec<Vec<usize>> = Vec::new();
    ordered_embeddings(a, b, |m| {
        a_in_b.push(m.to_vec());
        ControlFlow::Continue(())
    });
    let mut constraints = Vec::new();
    let mut b_copy_count = 0usize;
    let mut img = Vec::with_capacity(a.len());
    ordered_embeddings(b, c, |g| {
        b_copy_count += 1;
        let mut vars: Vec<u32> = a_in_b
            .iter()
            .map(|h| {
                img.clear();
                img.extend(h.iter().map(|&x| g[x]));
                img.sort_unstable();
                index[img.as_slice()]
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        constraints.push(vars);
        ControlFlow::Continue(())
    });
    constraints.sort();
    constraints.dedup();
    ArrowInstance {
        a_copies,
        constraints,
        b_copy_count,
    }
}

fn check_inputs(a: &LinearlyOrderedPoset, b: &LinearlyOrderedPoset, k: usize) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("patterns must be nonempty".into()));
    }
    if !(2..=limits::MAX_COLORS).contains(&k) {
        return Err(Error::Precondition(format!(
            "color count must lie in 2..={}",
            limits::MAX_COLORS
        )));
    }
    if find_ordered_embedding(a, b).is_none() {
        return Err(Error::Precondition("the pattern does not embed into the target".into()));
    }
    Ok(())
}

/// Decides `c ⟶ (b)^a_k`. A returned refutation has been re-verified.
pub fn check_arrow(
    c: &LinearlyOrderedPoset,
    a: &LinearlyOrderedPoset,
    b: &LinearlyOrderedPoset,
    k: usize,
    budget: &SearchBudget,
) -> Result<ArrowVerdict> {
    check_inputs(a, b, k)?;
    let inst = arrow_instance(c, a, b);
    let solved = solve_coloring(inst.a_copies.len(), k, &inst.constraints, budget);
    let (outcome, refutation) = match solved.result {
        SolveResult::Coloring(col) => {
            verify_refutation(c, a, b, k, &inst.a_copies, &col).map_err(Error::Internal)?;
            (Outcome::Fails, Some(col))
        }
        SolveResult::Infeasible => (Outcome::Holds, None),
        SolveResult::OutOfBudget => (Outcome::Unknown, None),
    };
    Ok(ArrowVerdict {
        outcome,
        k,
        a_copies: inst.a_copies,
        b_copy_count: inst.b_copy_count,
        refutation,
        nodes: solved.nodes,
    })
}

/// Independent check of a refutation: every copy of `b` in `c` contains two
/// `a`-copies of different colors. `a`-copies inside a `b`-copy are found by
/// set inclusion rather than by composing embeddings.
pub fn verify_refutation(
    c: &LinearlyOrderedPoset,
    a: &LinearlyOrderedPoset,
    b: &LinearlyOrderedPoset,
    k: usize,
    a_copies: &CopySet,
    coloring: &[usize],
) -> std::result::Result<(), String> {
    if coloring.len() != a_copies.len() {
        return Err(format!(
            "coloring has {} entries for {} copies",
            coloring.len(),
            a_copies.len()
        ));
    }
    if let Some(&bad) = coloring.iter().find(|&&col| col >= k) {
        return Err(format!("color {bad} out of range"));
    }
    let reference = copies_of(a, c);
    if &reference != a_copies {
        return Err("copy list does not match the host".into());
    }
    for copy in copies_of(b, c).copies {
        let colors: Vec<usize> = a_copies
            .copies
            .iter()
            .zip(coloring)
            .filter(|(img, _)| img.iter().all(|x| copy.binary_search(x).is_ok()))
            .map(|(_, &col)| col)
            .collect();
        if colors.is_empty() {
            return Err(format!("copy {copy:?} contains no pattern copy"));
        }
        if colors.iter().all(|&col| col == colors[0]) {
            return Err(format!("copy {copy:?} is monochromatic in color {}", colors[0]));
        }
    }
    Ok(())
}

#[derive(Debug)]
enum SolveResult {
    Coloring(Vec<usize>),
    Infeasible,
    OutOfBudget,
}

struct Solved {
    result: SolveResult,
    nodes: u64,
}

const UNASSIGNED: u8 = u8::MAX;

/// Backtracking with forward propagation on not-all-equal constraints.
///
/// Value symmetry: colors not used by the current partial assignment are
/// interchangeable (propagation only ever removes used colors), so only the
/// lowest unused one is tried.
#[derive(Clone)]
struct Solver<'a> {
    k: usize,
    constraints: &'a [Vec<u32>],
    occurs: &'a [Vec<u32>],
    order: &'a [u32],
    color: Vec<u8>,
    dom: Vec<u32>,
    used: Vec<u32>,
    trail: Vec<(u32, u32)>,
    assigned: Vec<u32>,
}

struct Limits<'a> {
    nodes: &'a AtomicU64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    stop: &'a AtomicBool,
}

impl Limits<'_> {
    fn exhausted(&self, local: &mut u64) -> bool {
        *local += 1;
        let total = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.node_limit.is_some_and(|lim| total > lim) {
            return true;
        }
        if *local % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() > d) {
            return true;
        }
        false
    }
}

enum Step {
    Found,
    Exhausted,
    Budget,
    Stopped,
}

impl<'a> Solver<'a> {
    fn new(n: usize, k: usize, constraints: &'a [Vec<u32>], occurs: &'a [Vec<u32>], order: &'a [u32]) -> Self {
        Solver {
            k,
            constraints,
            occurs,
            order,
            color: vec![UNASSIGNED; n],
            dom: vec![(1u32 << k) - 1; n],
            used: vec![0; k],
            trail: Vec::new(),
            assigned: Vec::new(),
        }
    }

    fn mark(&self) -> (usize, usize) {
        (self.trail.len(), self.assigned.len())
    }

    fn undo(&mut self, (t, a): (usize, usize)) {
        while self.assigned.len() > a {
            let v = self.assigned.pop().expect("nonempty") as usize;
            self.used[self.color[v] as usize] -= 1;
            self.color[v] = UNASSIGNED;
        }
        while self.trail.len() > t {
            let (v, old) = self.trail.pop().expect("nonempty");
            self.dom[v as usize] = old;
        }
    }

    fn restrict(&mut self, v: usize, dom: u32) {
        if self.dom[v] != dom {
            self.trail.push((v as u32, self.dom[v]));
            self.dom[v] = dom;
        }
    }

    /// Assigns `v := c` and propagates; false on conflict.
    fn assign(&mut self, v: usize, c: usize) -> bool {
        let mut queue = vec![(v, c)];
        while let Some((v, c)) = queue.pop() {
            if self.color[v] != UNASSIGNED {
                if self.color[v] as usize != c {
                    return false;
                }
                continue;
            }
            if self.dom[v] & (1 << c) == 0 {
                return false;
            }
            self.color[v] = c as u8;
            self.used[c] += 1;
            self.assigned.push(v as u32);
            self.restrict(v, 1 << c);
            for &ci in &self.occurs[v] {
                let cons = &self.constraints[ci as usize];
                let mut free = None;
                let mut free_count = 0;
                let mut same = true;
                let mut first: Option<u8> = None;
                for &u in cons {
                    let col = self.color[u as usize];
                    if col == UNASSIGNED {
                        free_count += 1;
                        free = Some(u as usize);
                    } else {
                        match first {
                            None => first = Some(col),
                            Some(f) if f != col => same = false,
                            _ => {}
                        }
                    }
                }
                if !same {
                    continue;
                }
                let col = first.expect("v is assigned") as u32;
                match free_count {
                    0 => return false,
                    1 => {
                        let u = free.expect("one free variable");
                        let dom = self.dom[u] & !(1 << col);
                        if dom == 0 {
                            return false;
                        }
                        self.restrict(u, dom);
                        if dom.count_ones() == 1 {
                            queue.push((u, dom.trailing_zeros() as usize));
                        }
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn next_var(&self) -> Option<usize> {
        self.order
            .iter()
            .map(|&v| v as usize)
            .find(|&v| self.color[v] == UNASSIGNED)
    }

    /// Colors worth trying for `v`: used colors in its domain plus the lowest
    /// unused one.
    fn candidates(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.k)
            .filter(|&c| self.dom[v] & (1 << c) != 0 && self.used[c] > 0)
            .collect();
        if let Some(c) = (0..self.k).find(|&c| self.used[c] == 0 && self.dom[v] & (1 << c) != 0) {
            out.push(c);
        }
        out.sort_unstable();
        out
    }

    fn run(&mut self, limits: &Limits<'_>) -> Step {
        struct Frame {
            var: usize,
            colors: Vec<usize>,
            next: usize,
            mark: (usize, usize),
        }
        let mut local = 0u64;
        let mut stack: Vec<Frame> = Vec::new();
        let Some(v) = self.next_var() else {
            return Step::Found;
        };
        stack.push(Frame {
            var: v,
            colors: self.candidates(v),
            next: 0,
            mark: self.mark(),
        });
        while let Some(top) = stack.last_mut() {
            if top.next == top.colors.len() {
                let mark = top.mark;
                stack.pop();
                self.undo(mark);
                continue;
            }
            if limits.stop.load(Ordering::Relaxed) {
                return Step::Stopped;
            }
            if limits.exhausted(&mut local) {
                return Step::Budget;
            }
            let (var, color, mark) = (top.var, top.colors[top.next], top.mark);
            top.next += 1;
            self.undo(mark);
            if !self.assign(var, color) {
                continue;
            }
            match self.next_var() {
                None => return Step::Found,
                Some(v) => {
                    let colors = self.candidates(v);
                    let mark = self.mark();
                    stack.push(Frame {
                        var: v,
                        colors,
                        next: 0,
                        mark,
                    });
                }
            }
        }
        Step::Exhausted
    }

    fn coloring(&self) -> Vec<usize> {
        self.color.iter().map(|&c| c as usize).collect()
    }
}

fn solve_coloring(n: usize, k: usize, constraints: &[Vec<u32>], budget: &SearchBudget) -> Solved {
    if constraints.iter().any(|c| c.len() < 2) {
        // a B-copy with a single A-copy is monochromatic under every coloring
        return Solved {
            result: SolveResult::Infeasible,
            nodes: 0,
        };
    }
    let mut occurs: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (ci, cons) in constraints.iter().enumerate() {
        for &v in cons {
            occurs[v as usize].push(ci as u32);
        }
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(occurs[v as usize].len()), v));
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let limits = Limits {
        nodes: &nodes,
        node_limit: budget.node_limit,
        deadline: budget.time_limit.map(|d| Instant::now() + d),
        stop: &stop,
    };
    let root = Solver::new(n, k, constraints, &occurs, &order);
    let result = if budget.parallel && n > 8 {
        solve_parallel(root, &limits)
    } else {
        let mut s = root;
        match s.run(&limits) {
            Step::Found => SolveResult::Coloring(s.coloring()),
            Step::Exhausted => SolveResult::Infeasible,
            Step::Budget | Step::Stopped => SolveResult::OutOfBudget,
        }
    };
    Solved {
        result,
        nodes: nodes.load(Ordering::Relaxed),
    }
}

/// Expands the first few decisions breadth-first and solves the resulting
/// subproblems on the rayon pool; the first coloring found stops the rest.
fn solve_parallel(root: Solver<'_>, limits: &Limits<'_>) -> SolveResult {
    let target = rayon::current_num_threads().max(1) * 4;
    let mut frontier = vec![root];
    for _ in 0..12 {
        if frontier.len() >= target {
            break;
        }
        let mut next = Vec::new();
        for s in frontier {
            let Some(v) = s.next_var() else {
                return SolveResult::Coloring(s.coloring());
            };
            for c in s.candidates(v) {
                let mut child = s.clone();
                if child.assign(v, c) {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return SolveResult::Infeasible;
        }
        frontier = next;
    }
    let results: Vec<SolveResult> = frontier
        .into_par_iter()
        .map(|mut s| match s.run(limits) {
            Step::Found => {
                limits.stop.store(true, Ordering::Relaxed);
                SolveResult::Coloring(s.coloring())
            }
            Step::Exhausted => SolveResult::Infeasible,
            Step::Budget | Step::Stopped => SolveResult::OutOfBudget,
        })
        .collect();
    let mut unknown = false;
    for r in results {
        match r {
            SolveResult::Coloring(c) => return SolveResult::Coloring(c),
            SolveResult::OutOfBudget => unknown = true,
            SolveResult::Infeasible => {}
        }
    }
    if unknown {
        SolveResult::OutOfBudget
    } else {
        SolveResult::Infeasible
    }
}

/// Outcome of the bounded search for the least `n` with `Π_n ⟶ (B)^A_k`.
#[derive(Clone, Debug)]
pub enum PiArrowOutcome {
    Found {
        n: usize,
        verdict: ArrowVerdict,
    },
    /// Every `n ≤ n_max` fails; carries the refutation at `n_max`.
    NotFoundWithinBound {
        n_max: usize,
        last_refutation: Option<(usize, Vec<usize>)>,
    },
    Unknown {
        n: usize,
        nodes: u64,
    },
}

pub fn find_min_pi_arrow(
    a: &LinearlyOrderedPoset,
    b: &LinearlyOrderedPoset,
    k: usize,
    n_max: usize,
    budget: &SearchBudget,
) -> Result<PiArrowOutcome> {
    check_inputs(a, b, k)?;
    let mut last_refutation = None;
    for n in 0..=n_max {
        let host = pi(n)?;
        if host.len() < b.len() {
            let a_count = copies_of(a, &host).len();
            last_refutation = Some((n, vec![0; a_count]));
            continue;
        }
        let verdict = check_arrow(&host, a, b, k, budget)?;
        match verdict.outcome {
            Outcome::Holds => return Ok(PiArrowOutcome::Found { n, verdict }),
            Outcome::Fails => last_refutation = Some((n, verdict.refutation.expect("refutation"))),
            Outcome::Unknown => {
                return Ok(PiArrowOutcome::Unknown {
                    n,
                    nodes: verdict.nodes,
                })
            }
        }
    }
    Ok(PiArrowOutcome::NotFoundWithinBound { n_max, last_refutation })
}
