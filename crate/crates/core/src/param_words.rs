//! Graham–Rothschild parameter words, their composition, and the embeddings
//! `Φ_{A,n}(u) : A → Π_n` built from them.

use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits;
use crate::powerset_pi::{downset_profile, DownsetProfile};
use crate::structures::{validate_map, LinearlyOrderedPoset, MapMode, Structure, StructureMap};

/// A finite alphabet of symbols, disjoint from the parameters `x1, x2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[String]>);

fn parameter_index(token: &str) -> Option<usize> {
    let digits = token.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::Format(format!(
                    "alphabet symbol {s:?} is empty or contains whitespace"
                )));
            }
            if parameter_index(s).is_some() {
                return Err(Error::Format(format!(
                    "alphabet symbol {s:?} collides with a parameter name"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Format(format!("alphabet symbol {s:?} repeated")));
            }
        }
        Ok(Alphabet(symbols.into()))
    }

    /// The one-letter alphabet `{0}`.
    pub fn zero() -> Self {
        Alphabet(vec!["0".to_string()].into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.0.iter().position(|s| s == symbol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// Index into the alphabet.
    Symbol(usize),
    /// Parameter `x_i`, 1-based.
    Param(usize),
}

/// An `m`-parameter word of length `n`: every `x_1..x_m` occurs, and first
/// occurrences appear in increasing order of the index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamWord {
    alphabet: Alphabet,
    letters: Vec<Letter>,
    m: usize,
}

impl ParamWord {
    pub fn new(alphabet: Alphabet, letters: Vec<Letter>) -> Result<Self> {
        let mut m = 0;
        for (pos, &l) in letters.iter().enumerate() {
            match l {
                Letter::Symbol(s) if s >= alphabet.len() => {
                    return Err(Error::Format(format!(
                        "symbol index {s} at position {} is not in the alphabet",
                        pos + 1
                    )))
                }
                Letter::Symbol(_) => {}
                Letter::Param(0) => return Err(Error::Format("parameters are numbered from 1".into())),
                Letter::Param(i) if i <= m => {}
                Letter::Param(i) if i == m + 1 => m = i,
                Letter::Param(i) => {
                    return Err(Error::Format(format!(
                        "x{i} first occurs at position {} before x{}",
                        pos + 1,
                        m + 1
                    )))
                }
            }
        }
        Ok(ParamWord { alphabet, letters, m })
    }

    /// `x_1 x_2 … x_m`, the identity for composition.
    pub fn identity(alphabet: Alphabet, m: usize) -> Self {
        ParamWord {
            alphabet,
            letters: (1..=m).map(Letter::Param).collect(),
            m,
        }
    }

    /// Parses whitespace-separated tokens: `x<k>` for parameters, alphabet
    /// symbols verbatim.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let letters = text
            .split_whitespace()
            .map(|tok| match parameter_index(tok) {
                Some(i) => Ok(Letter::Param(i)),
                None => alphabet
                    .index_of(tok)
                    .map(Letter::Symbol)
                    .ok_or_else(|| Error::Format(format!("unknown token {tok:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet.clone(), letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of parameters.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `X_i = u⁻¹(x_i)` as 1-based positions.
    pub fn positions(&self, i: usize) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == Letter::Param(i))
            .map(|(p, _)| p + 1)
            .collect()
    }

    /// `X_i` as a bitmask, bit `p − 1` for position `p`.
    pub fn position_mask(&self, i: usize) -> u64 {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == Letter::Param(i))
            .fold(0, |m, (p, _)| m | 1 << p)
    }
}

impl fmt::Display for ParamWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match *l {
                Letter::Symbol(s) => f.write_str(self.alphabet.symbol(s))?,
                Letter::Param(p) => write!(f, "x{p}")?,
            }
        }
        Ok(())
    }
}

/// `|W^n_m(A)|`, by dynamic programming over (position, parameters so far).
pub fn count_words(n: usize, m: usize, alphabet_len: usize) -> u128 {
    if m > n {
        return 0;
    }
    let mut ways = vec![0u128; m + 1];
    ways[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; m + 1];
        for p in 0..=m {
            if ways[p] == 0 {
                continue;
            }
            next[p] = next[p].saturating_add(ways[p].saturating_mul((p + alphabet_len) as u128));
            if p < m {
                next[p + 1] = next[p + 1].saturating_add(ways[p]);
            }
        }
        ways = next;
    }
    ways[m]
}

/// Streams `W^n_m(A)`. At each position the choices are tried in the order
/// `x_1..x_p`, the next new parameter, then the alphabet symbols.
pub fn for_each_word<F>(n: usize, m: usize, alphabet: &Alphabet, mut visit: F)
where
    F: FnMut(&ParamWord) -> ControlFlow<()>,
{
    fn rec<F>(n: usize, m: usize, p: usize, word: &mut ParamWord, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&ParamWord) -> ControlFlow<()>,
    {
        let pos = word.letters.len();
        if pos == n {
            return if p == m { visit(word) } else { ControlFlow::Continue(()) };
        }
        let slack = n - pos > m - p;
        let mut choices: Vec<Letter> = Vec::new();
        if slack {
            choices.extend((1..=p).map(Letter::Param));
        }
        if p < m {
            choices.push(Letter::Param(p + 1));
        }
        if slack {
            choices.extend((0..word.alphabet.len()).map(Letter::Symbol));
        }
        for l in choices {
            let np = if l == Letter::Param(p + 1) { p + 1 } else { p };
            word.letters.push(l);
            word.m = np;
            let r = rec(n, m, np, word, visit);
            word.letters.pop();
            r?;
        }
        ControlFlow::Continue(())
    }
    if m > n {
        return;
    }
    let mut word = ParamWord {
        alphabet: alphabet.clone(),
        letters: Vec::with_capacity(n),
        m: 0,
    };
    let _ = rec(n, m, 0, &mut word, &mut visit);
}

/// All of `W^n_m(A)`, refusing enumerations above the configured size.
pub fn enumerate_words(n: usize, m: usize, alphabet: &Alphabet) -> Result<Vec<ParamWord>> {
    let count = count_words(n, m, alphabet.len());
    if count > limits::WORD_ENUM_LIMIT {
        return Err(Error::BoundExceeded {
            what: format!("|W^{n}_{m}| = {count}"),
            limit: limits::WORD_ENUM_LIMIT,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_word(n, m, alphabet, |w| {
        out.push(w.clone());
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// `u · v`: every `x_i` in `u` replaced by `v_i`.
pub fn compose(u: &ParamWord, v: &ParamWord) -> Result<ParamWord> {
    if v.len() != u.m {
        return Err(Error::Dimension(format!(
            "u has {} parameters but v has length {}",
            u.m,
            v.len()
        )));
    }
    if u.alphabet != v.alphabet {
        return Err(Error::Dimension("alphabets differ".into()));
    }
    let letters = u
        .letters
        .iter()
        .map(|&l| match l {
            Letter::Symbol(_) => l,
            Letter::Param(i) => v.letters[i - 1],
        })
        .collect();
    let w = ParamWord::new(u.alphabet.clone(), letters).map_err(|e| Error::Internal(format!("composition: {e}")))?;
    debug_assert_eq!(w.m, v.m);
    Ok(w)
}

fn check_phi_input(profile: &DownsetProfile, u: &ParamWord) -> Result<()> {
    if u.m != profile.m() {
        return Err(Error::Dimension(format!(
            "the structure has {} nonempty downsets but the word has {} parameters",
            profile.m(),
            u.m
        )));
    }
    if u.len() > limits::PHI_MAX_LEN {
        return Err(Error::BoundExceeded {
            what: format!("word length {}", u.len()),
            limit: limits::PHI_MAX_LEN as u128,
        });
    }
    Ok(())
}

/// `Φ` images as masks of `Π_n` elements, given a precomputed profile.
pub fn phi_with_profile(profile: &DownsetProfile, u: &ParamWord) -> Result<Vec<usize>> {
    check_phi_input(profile, u)?;
    let x: Vec<u64> = (1..=u.m).map(|i| u.position_mask(i)).collect();
    Ok((0..profile.poset.len())
        .map(|e| {
            (0..profile.m())
                .filter(|&alpha| profile.contains(alpha, e))
                .fold(0u64, |acc, alpha| acc | x[alpha]) as usize
        })
        .collect())
}

/// `Φ_{A,n}(u) : i ↦ ⋃{X_α : i ∈ D_α}`, an ordered embedding of `a` into
/// `Π_n` where `n = |u|`. Element `S` of `Π_n` has index `mask(S)`.
pub fn phi(a: &LinearlyOrderedPoset, u: &ParamWord) -> Result<StructureMap> {
    let profile = downset_profile(a)?;
    Ok(StructureMap {
        map: phi_with_profile(&profile, u)?,
        mode: MapMode::OrderedOrder,
    })
}

/// Some `h ∈ W^{m_B}_{m_A}({0})` with `Φ_B(u) ∘ f = Φ_A(u · h)`, found by
/// exhaustive search and re-verified.
pub fn factor(
    a: &LinearlyOrderedPoset,
    b: &LinearlyOrderedPoset,
    f: &StructureMap,
    u: &ParamWord,
) -> Result<ParamWord> {
    validate_map(
        &Structure::OrderedPoset(a.clone()),
        &Structure::OrderedPoset(b.clone()),
        &StructureMap {
            map: f.map.clone(),
            mode: MapMode::OrderedOrder,
        },
    )?;
    let pa = downset_profile(a)?;
    let pb = downset_profile(b)?;
    let phi_b = phi_with_profile(&pb, u)?;
    let target: Vec<usize> = f.map.iter().map(|&i| phi_b[i]).collect();
    let mut found: Option<ParamWord> = None;
    let mut failure: Option<Error> = None;
    let count = count_words(pb.m(), pa.m(), u.alphabet.len());
    if count > limits::WORD_ENUM_LIMIT {
        return Err(Error::BoundExceeded {
            what: format!("|W^{}_{}| = {count}", pb.m(), pa.m()),
            limit: limits::WORD_ENUM_LIMIT,
        });
    }
    for_each_word(pb.m(), pa.m(), &u.alphabet, |h| {
        let uh = match compose(u, h) {
            Ok(w) => w,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        match phi_with_profile(&pa, &uh) {
            Ok(img) if img == target => {
                found = Some(h.clone());
                ControlFlow::Break(())
            }
            Ok(_) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let h = found.ok_or(Error::NoFactor)?;
    let check = phi(a, &compose(u, &h)?)?;
    if check.map != target {
        return Err(Error::Internal("factor identity failed on re-verification".into()));
    }
    Ok(h)
}
