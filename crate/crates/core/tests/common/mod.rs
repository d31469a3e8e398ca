#![allow(dead_code)]

use ramsey_core::gen::gen_ordered_posets;
use ramsey_core::{FinitePoset, LinearlyOrderedPoset};

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// All injective maps `0..n → 0..m`.
pub fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..m {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, m, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, m, &mut cur, &mut out);
    out
}

/// Every reflexive, antisymmetric, transitive relation on `0..n`, found by
/// filtering all relations.
pub fn labeled_partial_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut m = vec![vec![false; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                m[a][b] = true;
            }
        }
        let anti = (0..n).all(|a| (0..n).all(|b| a == b || !(m[a][b] && m[b][a])));
        let trans = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(m[a][b] && m[b][c]) || m[a][c])));
        if anti && trans {
            out.push(m);
        }
    }
    out
}

pub fn iso_by_permutation(a: &[Vec<bool>], b: &[Vec<bool>]) -> bool {
    let n = a.len();
    n == b.len()
        && permutations(n)
            .iter()
            .any(|p| (0..n).all(|x| (0..n).all(|y| a[x][y] == b[p[x]][p[y]])))
}

/// Isomorphism classes by pairwise permutation search.
pub fn count_iso_classes(rels: &[Vec<Vec<bool>>]) -> usize {
    let mut reps: Vec<&Vec<Vec<bool>>> = Vec::new();
    for r in rels {
        if !reps.iter().any(|q| iso_by_permutation(q, r)) {
            reps.push(r);
        }
    }
    reps.len()
}

pub fn is_linear_extension(p: &FinitePoset, perm: &[usize]) -> bool {
    let mut rank = vec![0; perm.len()];
    for (r, &x) in perm.iter().enumerate() {
        rank[x] = r;
    }
    (0..p.len()).all(|a| (0..p.len()).all(|b| a == b || !p.leq(a, b) || rank[a] < rank[b]))
}

/// Ordered posets with at most `max` elements, one per isomorphism type.
pub fn ordered_corpus(max: usize) -> Vec<LinearlyOrderedPoset> {
    (0..=max).flat_map(|n| gen_ordered_posets(n).unwrap()).collect()
}

pub fn lop(n: usize, pairs: &[(usize, usize)]) -> LinearlyOrderedPoset {
    LinearlyOrderedPoset::with_index_order(FinitePoset::from_relations(n, pairs).unwrap()).unwrap()
}

/// Sets of `pattern` inside `host` found by testing every injection: images
/// whose induced ordered substructure matches `pattern`.
pub fn brute_copies(pattern: &LinearlyOrderedPoset, host: &LinearlyOrderedPoset) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = injections(pattern.len(), host.len())
        .into_iter()
        .filter(|f| {
            (0..f.len()).all(|x| {
                (0..f.len()).all(|y| {
                    pattern.poset().leq(x, y) == host.poset().leq(f[x], f[y])
                        && (pattern.rank(x) < pattern.rank(y)) == (host.rank(f[x]) < host.rank(f[y]))
                })
            })
        })
        .map(|mut f| {
            f.sort_unstable();
            f
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Decides `host → (target)^pattern_k` by trying all `k^|copies|` colorings.
pub fn brute_arrow(
    host: &LinearlyOrderedPoset,
    pattern: &LinearlyOrderedPoset,
    target: &LinearlyOrderedPoset,
    k: usize,
) -> bool {
    let a = brute_copies(pattern, host);
    let b = brute_copies(target, host);
    let inside: Vec<Vec<usize>> = b
        .iter()
        .map(|bc| {
            a.iter()
                .enumerate()
                .filter(|(_, ac)| ac.iter().all(|x| bc.contains(x)))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let total = (k as u64).pow(a.len() as u32);
    let mut col = vec![0usize; a.len()];
    for code in 0..total {
        let mut c = code;
        for slot in col.iter_mut() {
            *slot = (c % k as u64) as usize;
            c /= k as u64;
        }
        let refutes = inside.iter().all(|ids| ids.iter().any(|&i| col[i] != col[ids[0]]));
        if refutes {
            return false;
        }
    }
    true
}
