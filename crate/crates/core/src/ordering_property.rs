//! Ordering-property witnesses: exhaustive verification, and the construction
//! that turns an arrow into a witness by comparing two linear orders.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::arrows::{copies_of, find_min_pi_arrow, CopySet, Outcome, PiArrowOutcome, SearchBudget};
use crate::error::{Error, Result};
use crate::powerset_pi::pi;
use crate::structures::{
    find_ordered_embedding, for_each_linear_extension, is_permutation, linear_extensions, ranks_of, FinitePoset,
    LinearlyOrderedPoset, Structure,
};

const BATCH: usize = 4096;

/// Outcome of checking that every admissible order on `base` embeds into
/// every admissible order on `witness`.
#[derive(Clone, Debug)]
pub struct OpWitnessReport {
    pub base: Structure,
    pub witness: Structure,
    pub outcome: Outcome,
    /// Pairs (order on base, order on witness) checked, in enumeration order,
    /// up to and including the first failure.
    pub checked_pairs: u64,
    /// A pair of orders admitting no embedding, when the check fails.
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
}

impl OpWitnessReport {
    pub fn verified(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

/// Core loop shared with the multiposet variant. `a` and `b` are the
/// relations whose linear extensions are the admissible orders; `prepare`
/// builds the witness side once per order and `embeds` tests one pair.
/// Base orders are materialized; witness orders are streamed in batches and
/// checked in parallel, keeping the first failure in enumeration order.
pub(crate) fn verify_orders<T, P, E>(
    a: &FinitePoset,
    b: &FinitePoset,
    fixed_a: Option<&[usize]>,
    extension_limit: u64,
    prepare: P,
    embeds: E,
) -> OpWitnessReport
where
    T: Send,
    P: Fn(&[usize]) -> T + Sync,
    E: Fn(&[usize], &T) -> bool + Sync,
{
    let mut report = OpWitnessReport {
        base: Structure::Poset(a.clone()),
        witness: Structure::Poset(b.clone()),
        outcome: Outcome::Unknown,
        checked_pairs: 0,
        counterexample: None,
    };
    let a_orders: Vec<Vec<usize>> = match fixed_a {
        Some(order) => vec![order.to_vec()],
        None => {
            let mut orders = Vec::new();
            let mut over = false;
            for_each_linear_extension(a, |o| {
                if orders.len() as u64 >= extension_limit {
                    over = true;
                    return ControlFlow::Break(());
                }
                orders.push(o.to_vec());
                ControlFlow::Continue(())
            });
            if over {
                return report;
            }
            orders
        }
    };
    let per_b = a_orders.len() as u64;
    let mut batch: Vec<Vec<usize>> = Vec::with_capacity(BATCH);
    let mut seen_b = 0u64;
    let mut over = false;
    let mut failure: Option<(u64, usize, Vec<usize>)> = None;
    let run_batch = |batch: &mut Vec<Vec<usize>>, start: u64| -> Option<(u64, usize, Vec<usize>)> {
        let hit = batch
            .par_iter()
            .enumerate()
            .filter_map(|(i, bo)| {
                let prepared = prepare(bo);
                a_orders.iter().position(|ao| !embeds(ao, &prepared)).map(|j| (i, j))
            })
            .min();
        let out = hit.map(|(i, j)| (start + i as u64, j, batch[i].clone()));
        batch.clear();
        out
    };
    for_each_linear_extension(b, |o| {
        if seen_b >= extension_limit {
            over = true;
            return ControlFlow::Break(());
        }
        batch.push(o.to_vec());
        seen_b += 1;
        if batch.len() == BATCH {
            let start = seen_b - BATCH as u64;
            if let Some(hit) = run_batch(&mut batch, start) {
                failure = Some(hit);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if failure.is_none() && !batch.is_empty() {
        let start = seen_b - batch.len() as u64;
        failure = run_batch(&mut batch, start);
    }
    match failure {
        Some((bi, aj, bo)) => {
            report.outcome = Outcome::Fails;
            report.checked_pairs = bi * per_b + aj as u64 + 1;
            report.counterexample = Some((a_orders[aj].clone(), bo));
        }
        None if over => {
            report.checked_pairs = seen_b * per_b;
        }
        None => {
            report.outcome = Outcome::Holds;
            report.checked_pairs = seen_b * per_b;
        }
    }
    report
}

fn ordered_embeds(a: &FinitePoset, ao: &[usize], b: &LinearlyOrderedPoset) -> bool {
    let a = LinearlyOrderedPoset::new(a.clone(), ao.to_vec()).expect("linear extension");
    find_ordered_embedding(&a, b).is_some()
}

/// (OP) for a pair of posets: every linear extension of `a` embeds into every
/// linear extension of `b`. More than `extension_limit` extensions on either
/// side yields an Unknown outcome.
pub fn verify_op_witness(a: &FinitePoset, b: &FinitePoset, extension_limit: u64) -> OpWitnessReport {
    verify_orders(
        a,
        b,
        None,
        extension_limit,
        |bo| LinearlyOrderedPoset::new(b.clone(), bo.to_vec()).expect("linear extension"),
        |ao, bl| ordered_embeds(a, ao, bl),
    )
}

/// (OP′): the fixed ordered poset `a` embeds into every linear extension of `b`.
pub fn verify_op_prime(a: &LinearlyOrderedPoset, b: &FinitePoset, extension_limit: u64) -> OpWitnessReport {
    let mut report = verify_orders(
        a.poset(),
        b,
        Some(a.order()),
        extension_limit,
        |bo| LinearlyOrderedPoset::new(b.clone(), bo.to_vec()).expect("linear extension"),
        |ao, bl| ordered_embeds(a.poset(), ao, bl),
    );
    report.base = Structure::OrderedPoset(a.clone());
    report
}

/// The first pair `x ⊏ y` in index order.
pub fn first_comparable_pair(p: &FinitePoset) -> Option<(usize, usize)> {
    (0..p.len()).find_map(|x| (0..p.len()).find(|&y| p.lt(x, y)).map(|y| (x, y)))
}

/// `b` plus a fresh element `z = |B|`, incomparable to everything, placed in
/// the linear order immediately after `x`.
pub fn build_b1(b: &LinearlyOrderedPoset, x: usize, y: usize) -> Result<LinearlyOrderedPoset> {
    let n = b.len();
    if x >= n || y >= n || !b.poset().lt(x, y) {
        return Err(Error::Precondition(format!(
            "({x},{y}) is not a strictly comparable pair; an antichain is its own witness"
        )));
    }
    let mut leq = b.poset().to_matrix();
    for row in &mut leq {
        row.push(false);
    }
    let mut last = vec![false; n + 1];
    last[n] = true;
    leq.push(last);
    let poset = FinitePoset::from_matrix(&leq)?;
    let mut order = b.order().to_vec();
    let at = b.rank(x) + 1;
    order.insert(at, n);
    Ok(LinearlyOrderedPoset::new(poset, order)?)
}

/// Least `N ≤ n_max` with `Π_N ⟶ (b1)^A_2`, `A` the ordered 2-antichain.
fn min_arrow_n(b1: &LinearlyOrderedPoset, n_max: usize, budget: &SearchBudget) -> Result<usize> {
    match find_min_pi_arrow(&LinearlyOrderedPoset::antichain(2), b1, 2, n_max, budget)? {
        PiArrowOutcome::Found { n, .. } => Ok(n),
        PiArrowOutcome::NotFoundWithinBound { n_max, .. } => Err(Error::NotFoundWithinBound(format!(
            "no arrow into pi(n) for n <= {n_max}"
        ))),
        PiArrowOutcome::Unknown { n, nodes } => {
            Err(Error::Undecided(format!("arrow into pi({n}) after {nodes} nodes")))
        }
    }
}

/// Witness construction for an ordered poset, with its certification.
#[derive(Clone, Debug)]
pub struct ViaArrowReport {
    /// `N` with `Π_N ⟶ (B₁)^A_2`; `None` in the antichain case.
    pub n: Option<usize>,
    pub b1: Option<LinearlyOrderedPoset>,
    /// Certification of the candidate as an (OP′) witness for the input.
    pub report: OpWitnessReport,
}

/// Antichains are their own witnesses. Otherwise builds `B₁`, finds the
/// least `N ≤ n_max` with `Π_N ⟶ (B₁)^A_2` for the ordered 2-antichain `A`,
/// and certifies the poset of `Π_N` by exhaustive (OP′) verification.
pub fn op_witness_via_arrow(
    b: &LinearlyOrderedPoset,
    n_max: usize,
    budget: &SearchBudget,
    extension_limit: u64,
) -> Result<ViaArrowReport> {
    let Some((x, y)) = first_comparable_pair(b.poset()) else {
        return Ok(ViaArrowReport {
            n: None,
            b1: None,
            report: verify_op_prime(b, b.poset(), extension_limit),
        });
    };
    let b1 = build_b1(b, x, y)?;
    let n = min_arrow_n(&b1, n_max, budget)?;
    let witness = pi(n)?.poset().clone();
    Ok(ViaArrowReport {
        n: Some(n),
        b1: Some(b1),
        report: verify_op_prime(b, &witness, extension_limit),
    })
}

/// Poset-level witness: the largest `N` over all linear extensions of `p`,
/// certified by (OP) verification against the poset of `Π_N`.
pub fn op_witness_for_poset(
    p: &FinitePoset,
    n_max: usize,
    budget: &SearchBudget,
    extension_limit: u64,
) -> Result<(Option<usize>, OpWitnessReport)> {
    if p.is_antichain() {
        return Ok((None, verify_op_witness(p, p, extension_limit)));
    }
    let mut n = 0;
    for ext in linear_extensions(p) {
        let (x, y) = first_comparable_pair(ext.poset()).expect("not an antichain");
        n = n.max(min_arrow_n(&build_b1(&ext, x, y)?, n_max, budget)?);
    }
    let witness = pi(n)?.poset().clone();
    Ok((Some(n), verify_op_witness(p, &witness, extension_limit)))
}

/// Sierpinski coloring of 2-element copies: 0 where `host`'s linear order
/// and `second_order` agree on the pair, 1 where they disagree.
pub fn sierpinski_coloring(
    host: &LinearlyOrderedPoset,
    second_order: &[usize],
    tau_copies: &CopySet,
) -> Result<Vec<u8>> {
    if !is_permutation(second_order, host.len()) {
        return Err(Error::Precondition(
            "second order is not a permutation of the host".into(),
        ));
    }
    let second = ranks_of(second_order);
    tau_copies
        .copies
        .iter()
        .map(|c| match c.as_slice() {
            &[p, q] => Ok(u8::from(host.before(p, q) != (second[p] < second[q]))),
            _ => Err(Error::Precondition("copies must have two elements".into())),
        })
        .collect()
}

/// Convenience: the 2-antichain copies of `host` colored against `second_order`.
pub fn antichain_coloring(host: &LinearlyOrderedPoset, second_order: &[usize]) -> Result<(CopySet, Vec<u8>)> {
    let copies = copies_of(&LinearlyOrderedPoset::antichain(2), host);
    let colors = sierpinski_coloring(host, second_order, &copies)?;
    Ok((copies, colors))
}
