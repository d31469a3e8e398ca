//! The structures `Π_n`, the three subset orders and downset profiles.
//!
//! Subsets of `{1..n}` are bitmasks: bit `i − 1` stands for element `i`.

use std::cmp::Ordering;

use crate::error::{Error, Result, Violation};
use crate::limits;
use crate::structures::{FinitePoset, LinearlyOrderedPoset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsetOrder {
    /// `A ⊆ B`, or `min(B∖A) < min(A∖B)`.
    Lex,
    /// `A ⊆ B`, or `max(A∖B) < max(B∖A)`.
    Alex,
    /// `A ⊇ B`, or `min(A∖B) < min(B∖A)`; lex on complements.
    Clex,
}

fn lowest(m: u64) -> u32 {
    m.trailing_zeros()
}

fn highest(m: u64) -> u32 {
    63 - m.leading_zeros()
}

impl SubsetOrder {
    /// Strict comparison `a < b`.
    pub fn less(self, a: u64, b: u64) -> bool {
        if a == b {
            return false;
        }
        let (a_only, b_only) = (a & !b, b & !a);
        match self {
            SubsetOrder::Lex => a_only == 0 || (b_only != 0 && lowest(b_only) < lowest(a_only)),
            SubsetOrder::Alex => a_only == 0 || (b_only != 0 && highest(a_only) < highest(b_only)),
            SubsetOrder::Clex => b_only == 0 || (a_only != 0 && lowest(a_only) < lowest(b_only)),
        }
    }
}

/// Compares two subsets of `{1..n}` given as bitmasks.
pub fn compare(order: SubsetOrder, a: u64, b: u64, n: usize) -> Ordering {
    debug_assert!(n >= 64 || (a | b) >> n == 0);
    if a == b {
        Ordering::Equal
    } else if order.less(a, b) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Bitmask of a set of 1-based elements.
pub fn mask_of(elements: &[usize]) -> u64 {
    elements.iter().fold(0, |m, &e| m | 1 << (e - 1))
}

/// Sorted 1-based elements of a bitmask.
pub fn elements_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b as usize + 1).collect()
}

/// `Π_n = (P({1..n}), ⊇, <clex)`. Element `i` is the subset with mask `i`.
pub fn pi(n: usize) -> Result<LinearlyOrderedPoset> {
    if n > limits::PI_MAX_N {
        return Err(Error::BoundExceeded {
            what: format!("pi({n})"),
            limit: limits::PI_MAX_N as u128,
        });
    }
    let size = 1usize << n;
    let mut leq = vec![vec![false; size]; size];
    for (a, row) in leq.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = a & b == b;
        }
    }
    let poset = FinitePoset::from_matrix(&leq).map_err(|v| Error::Internal(v.to_string()))?;
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| compare(SubsetOrder::Clex, a as u64, b as u64, n));
    LinearlyOrderedPoset::new(poset, order).map_err(|v| Error::Internal(v.to_string()))
}

/// The nonempty downsets of an ordered poset, elements relabeled `1..n` by
/// rank, sorted by `<alex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownsetProfile {
    pub poset: LinearlyOrderedPoset,
    /// `downsets[α]` as a bitmask over ranks (bit `r` = element of rank `r`).
    pub downsets: Vec<u64>,
}

impl DownsetProfile {
    /// `m`, the number of nonempty downsets.
    pub fn m(&self) -> usize {
        self.downsets.len()
    }

    /// Whether the element `e` (original index) lies in `D_α` (0-based `α`).
    pub fn contains(&self, alpha: usize, e: usize) -> bool {
        self.downsets[alpha] >> self.poset.rank(e) & 1 == 1
    }

    /// `D_α` as sorted 1-based rank labels.
    pub fn labels(&self, alpha: usize) -> Vec<usize> {
        elements_of(self.downsets[alpha])
    }
}

pub fn downset_profile(a: &LinearlyOrderedPoset) -> Result<DownsetProfile> {
    let n = a.len();
    if n > 63 {
        return Err(Error::BoundExceeded {
            what: format!("downsets of a {n}-element poset"),
            limit: 63,
        });
    }
    // below[r]: ranks strictly below the element of rank r
    let below: Vec<u64> = a
        .order()
        .iter()
        .map(|&e| {
            a.poset()
                .down_set(e)
                .ones()
                .filter(|&d| d != e)
                .fold(0u64, |m, d| m | 1 << a.rank(d))
        })
        .collect();
    let mut sets = vec![0u64];
    for (r, &req) in below.iter().enumerate() {
        let extra: Vec<u64> = sets.iter().filter(|&&s| s & req == req).map(|&s| s | 1 << r).collect();
        sets.extend(extra);
        if sets.len() as u128 > limits::WORD_ENUM_LIMIT {
            return Err(Error::BoundExceeded {
                what: "downset count".into(),
                limit: limits::WORD_ENUM_LIMIT,
            });
        }
    }
    sets.retain(|&s| s != 0);
    sets.sort_by(|&x, &y| compare(SubsetOrder::Alex, x, y, n));
    Ok(DownsetProfile {
        poset: a.clone(),
        downsets: sets,
    })
}

/// Checks that the masks `images` form an ordered embedding of `a` into
/// `Π_n`, deciding inclusion and `<clex` directly on the masks.
pub fn check_pi_embedding(a: &LinearlyOrderedPoset, images: &[u64], n: usize) -> Result<(), Violation> {
    if images.len() != a.len() {
        return Err(Violation::MapLength {
            expected: a.len(),
            found: images.len(),
        });
    }
    for (x, &m) in images.iter().enumerate() {
        if n < 64 && m >> n != 0 {
            return Err(Violation::MapOutOfRange { element: x });
        }
    }
    for x in 0..a.len() {
        for y in 0..a.len() {
            if x == y {
                continue;
            }
            if images[x] == images[y] {
                return Err(Violation::Injectivity {
                    a: x.min(y),
                    b: x.max(y),
                });
            }
            if a.poset().leq(x, y) != (images[x] & images[y] == images[y]) {
                return Err(Violation::NotPreserved {
                    relation: "partial order",
                    a: x,
                    b: y,
                });
            }
            if a.before(x, y) && compare(SubsetOrder::Clex, images[x], images[y], n) != Ordering::Less {
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

/// Brute-force count of nonempty downward-closed subsets.
pub fn count_downsets_naive(p: &FinitePoset) -> usize {
    let n = p.len();
    (1u64..1 << n)
        .filter(|&s| {
            (0..n)
                .filter(|&x| s >> x & 1 == 1)
                .all(|x| p.down_set(x).ones().all(|y| s >> y & 1 == 1))
        })
        .count()
}
