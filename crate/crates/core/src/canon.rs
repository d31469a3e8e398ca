//! Canonical labeling by partition refinement plus individualization.
//!
//! Cells are split by how many strict up- and down-neighbours each element
//! has in every other cell, until the partition is equitable. The search then
//! individualizes members of the first non-singleton cell; the smallest leaf
//! encoding wins. Cells made of mutual twins (swappable elements) are only
//! branched on once.

use fixedbitset::FixedBitSet;

use crate::structures::CanonicalForm;

type Rows<'a> = &'a [FixedBitSet];

pub(crate) fn canonical(tag: u64, rels: &[Rows<'_>]) -> CanonicalForm {
    let n = rels.first().map_or(0, |r| r.len());
    let mut best: Option<CanonicalForm> = None;
    let initial = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
    search(tag, rels, initial, &mut best);
    best.unwrap_or_else(|| CanonicalForm {
        relabeling: Vec::new(),
        encoding: encode(tag, rels, &[]),
    })
}

/// Linearly ordered structures are rigid: ranks are the canonical labels.
pub(crate) fn ordered(tag: u64, rels: &[Rows<'_>], rank: &[usize]) -> CanonicalForm {
    CanonicalForm {
        relabeling: rank.to_vec(),
        encoding: encode(tag, rels, rank),
    }
}

fn encode(tag: u64, rels: &[Rows<'_>], position: &[usize]) -> Vec<u64> {
    let n = position.len();
    let mut inverse = vec![0; n];
    for (v, &p) in position.iter().enumerate() {
        inverse[p] = v;
    }
    let mut words = vec![tag, n as u64, rels.len() as u64];
    let mut bit = 0usize;
    let mut current = 0u64;
    for rows in rels {
        for p in 0..n {
            for q in 0..n {
                if rows[inverse[p]].contains(inverse[q]) {
                    current |= 1 << (bit % 64);
                }
                bit += 1;
                if bit % 64 == 0 {
                    words.push(current);
                    current = 0;
                }
            }
        }
    }
    if bit % 64 != 0 {
        words.push(current);
    }
    words
}

fn search(tag: u64, rels: &[Rows<'_>], cells: Vec<Vec<usize>>, best: &mut Option<CanonicalForm>) {
    let cells = refine(rels, cells);
    let Some(target) = cells.iter().position(|c| c.len() > 1) else {
        let n = cells.len();
        let mut position = vec![0; n];
        for (p, cell) in cells.iter().enumerate() {
            position[cell[0]] = p;
        }
        let encoding = encode(tag, rels, &position);
        if best.as_ref().map_or(true, |b| encoding < b.encoding) {
            *best = Some(CanonicalForm {
                relabeling: position,
                encoding,
            });
        }
        return;
    };
    let cell = &cells[target];
    let branches: Vec<usize> = if mutual_twins(rels, cell) {
        vec![cell[0]]
    } else {
        cell.clone()
    };
    for v in branches {
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend(cells[..target].iter().cloned());
        next.push(vec![v]);
        next.push(cells[target].iter().copied().filter(|&u| u != v).collect());
        next.extend(cells[target + 1..].iter().cloned());
        search(tag, rels, next, best);
    }
}

fn refine(rels: &[Rows<'_>], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n: usize = cells.iter().map(Vec::len).sum();
    loop {
        let masks: Vec<FixedBitSet> = cells
            .iter()
            .map(|c| {
                let mut m = FixedBitSet::with_capacity(n);
                c.iter().for_each(|&v| m.insert(v));
                m
            })
            .collect();
        let signature = |v: usize| -> Vec<usize> {
            let mut sig = Vec::with_capacity(rels.len() * masks.len() * 2);
            for rows in rels {
                for m in &masks {
                    let up = rows[v].intersection(m).filter(|&u| u != v).count();
                    let down = m.ones().filter(|&u| u != v && rows[u].contains(v)).count();
                    sig.push(up);
                    sig.push(down);
                }
            }
            sig
        };
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<usize>, usize)> = cell.iter().map(|&v| (signature(v), v)).collect();
            keyed.sort();
            let mut group: Vec<usize> = Vec::new();
            let mut last: Option<&Vec<usize>> = None;
            for (sig, v) in &keyed {
                if last.is_some_and(|l| l != sig) {
                    next.push(std::mem::take(&mut group));
                }
                group.push(*v);
                last = Some(sig);
            }
            next.push(group);
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

/// Every pair in `cell` is incomparable in every relation and has the same
/// relations to all other elements, so any transposition within the cell is
/// an automorphism.
fn mutual_twins(rels: &[Rows<'_>], cell: &[usize]) -> bool {
    let first = cell[0];
    cell[1..].iter().all(|&b| {
        rels.iter().all(|rows| {
            let n = rows.len();
            let related = |x: usize, y: usize| rows[x].contains(y);
            if related(first, b) || related(b, first) {
                return false;
            }
            (0..n)
                .filter(|&c| c != first && c != b)
                .all(|c| related(first, c) == related(b, c) && related(c, first) == related(c, b))
        })
    })
}
