//! Lattice identities, Boolean lattices, and a bounded search for amalgams
//! of finite lattices.

use std::fmt;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gen::gen_posets;
use crate::limits;
use crate::structures::{
    for_each_embedding, lattice_from_poset, validate_map, FiniteLattice, MapMode, Structure, StructureMap,
};

/// Term over variables with binary `∧` and `∨`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatticeTerm {
    Var(String),
    Meet(Box<LatticeTerm>, Box<LatticeTerm>),
    Join(Box<LatticeTerm>, Box<LatticeTerm>),
}

impl LatticeTerm {
    pub fn var(name: &str) -> Self {
        LatticeTerm::Var(name.to_string())
    }

    pub fn meet(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Join(Box::new(a), Box::new(b))
    }

    /// Parses `x ∧ (y ∨ z)`. `∧` may be written `&` or `/\`, `∨` as `|` or
    /// `\/`; meet binds tighter than join.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let t = parse_join(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Format(format!("unexpected {:?} in term", tokens[pos])));
        }
        Ok(t)
    }

    /// Variables in sorted order, without repetition.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            LatticeTerm::Var(v) => out.push(v.clone()),
            LatticeTerm::Meet(a, b) | LatticeTerm::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Value under `assignment`, indexed like `vars`.
    pub fn eval(&self, l: &FiniteLattice, vars: &[String], assignment: &[usize]) -> usize {
        match self {
            LatticeTerm::Var(v) => assignment[vars.iter().position(|w| w == v).expect("bound variable")],
            LatticeTerm::Meet(a, b) => l.meet(a.eval(l, vars, assignment), b.eval(l, vars, assignment)),
            LatticeTerm::Join(a, b) => l.join(a.eval(l, vars, assignment), b.eval(l, vars, assignment)),
        }
    }
}

impl fmt::Display for LatticeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeTerm::Var(v) => f.write_str(v),
            LatticeTerm::Meet(a, b) => write!(f, "({a} ∧ {b})"),
            LatticeTerm::Join(a, b) => write!(f, "({a} ∨ {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Var(String),
    Meet,
    Join,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '∧' | '&' => {
                out.push(Token::Meet);
                i += 1;
            }
            '∨' | '|' => {
                out.push(Token::Join);
                i += 1;
            }
            '/' if chars.get(i + 1) == Some(&'\\') => {
                out.push(Token::Meet);
                i += 2;
            }
            '\\' if chars.get(i + 1) == Some(&'/') => {
                out.push(Token::Join);
                i += 2;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Var(chars[start..i].iter().collect()));
            }
            c => return Err(Error::Format(format!("unexpected character {c:?} in term"))),
        }
    }
    Ok(out)
}

fn parse_join(t: &[Token], pos: &mut usize) -> Result<LatticeTerm> {
    let mut left = parse_meet(t, pos)?;
    while t.get(*pos) == Some(&Token::Join) {
        *pos += 1;
        left = LatticeTerm::join(left, parse_meet(t, pos)?);
    }
    Ok(left)
}

fn parse_meet(t: &[Token], pos: &mut usize) -> Result<LatticeTerm> {
    let mut left = parse_atom(t, pos)?;
    while t.get(*pos) == Some(&Token::Meet) {
        *pos += 1;
        left = LatticeTerm::meet(left, parse_atom(t, pos)?);
    }
    Ok(left)
}

fn parse_atom(t: &[Token], pos: &mut usize) -> Result<LatticeTerm> {
    match t.get(*pos) {
        Some(Token::Var(v)) => {
            *pos += 1;
            Ok(LatticeTerm::Var(v.clone()))
        }
        Some(Token::Open) => {
            *pos += 1;
            let inner = parse_join(t, pos)?;
            if t.get(*pos) != Some(&Token::Close) {
                return Err(Error::Format("missing ')' in term".into()));
            }
            *pos += 1;
            Ok(inner)
        }
        other => Err(Error::Format(format!("expected a variable or '(' but found {other:?}"))),
    }
}

/// An identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub lhs: LatticeTerm,
    pub rhs: LatticeTerm,
}

impl Identity {
    /// Parses `lhs = rhs`.
    pub fn parse(text: &str) -> Result<Self> {
        let (l, r) = text
            .split_once('=')
            .ok_or_else(|| Error::Format("identity must have the form lhs = rhs".into()))?;
        Ok(Identity {
            lhs: LatticeTerm::parse(l)?,
            rhs: LatticeTerm::parse(r)?,
        })
    }

    /// `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)`.
    pub fn distributive() -> Self {
        Self::parse("x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)").expect("fixed term")
    }

    /// `(x ∧ z) ∨ (y ∧ z) = ((x ∧ z) ∨ y) ∧ z`.
    pub fn modular() -> Self {
        Self::parse("(x ∧ z) ∨ (y ∧ z) = ((x ∧ z) ∨ y) ∧ z").expect("fixed term")
    }

    pub fn variables(&self) -> Vec<String> {
        let mut v = self.lhs.variables();
        v.extend(self.rhs.variables());
        v.sort();
        v.dedup();
        v
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Result of evaluating an identity over every assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub variables: Vec<String>,
    /// First failing assignment in lexicographic order, indexed like `variables`.
    pub countermodel: Option<Vec<usize>>,
    pub assignments_checked: u64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.countermodel.is_none()
    }
}

pub fn satisfies_identity(l: &FiniteLattice, lhs: &LatticeTerm, rhs: &LatticeTerm) -> IdentityCheck {
    let id = Identity {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
    };
    let vars = id.variables();
    let n = l.len();
    let k = vars.len();
    let mut assignment = vec![0; k];
    let mut checked = 0u64;
    if n == 0 && k > 0 {
        return IdentityCheck {
            variables: vars,
            countermodel: None,
            assignments_checked: 0,
        };
    }
    loop {
        checked += 1;
        if lhs.eval(l, &vars, &assignment) != rhs.eval(l, &vars, &assignment) {
            return IdentityCheck {
                variables: vars,
                countermodel: Some(assignment),
                assignments_checked: checked,
            };
        }
        let mut i = k;
        loop {
            if i == 0 {
                return IdentityCheck {
                    variables: vars,
                    countermodel: None,
                    assignments_checked: checked,
                };
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < n {
                break;
            }
            assignment[i] = 0;
        }
    }
}

/// `(P({1..n}), ∩, ∪)`; element `i` is the subset with bitmask `i`.
pub fn powerset_lattice(n: usize) -> Result<FiniteLattice> {
    if n > limits::POWERSET_LATTICE_MAX_N {
        return Err(Error::BoundExceeded {
            what: format!("powerset lattice of {n} points"),
            limit: limits::POWERSET_LATTICE_MAX_N as u128,
        });
    }
    let size = 1usize << n;
    let meet = (0..size).map(|a| (0..size).map(|b| a & b).collect()).collect();
    let join = (0..size).map(|a| (0..size).map(|b| a | b).collect()).collect();
    FiniteLattice::new(meet, join).map_err(|v| Error::Internal(v.to_string()))
}

/// A commuting square `g1 ∘ f1 = g2 ∘ f2` into an amalgam `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeAmalgam {
    pub d: FiniteLattice,
    pub g1: Vec<usize>,
    pub g2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApOutcome {
    Found(LatticeAmalgam),
    /// No amalgam among lattices of size at most `bound`. Not a proof that
    /// none exists.
    NotFoundWithinBound {
        bound: usize,
        candidates: usize,
    },
}

/// Lattices of each size up to isomorphism, via poset generation.
pub fn lattices_of_size(n: usize) -> Result<Vec<FiniteLattice>> {
    Ok(gen_posets(n)?
        .iter()
        .filter_map(|p| lattice_from_poset(p).ok())
        .collect())
}

/// Bounded search for an amalgam of `f1: a ↪ b1`, `f2: a ↪ b2` among
/// lattices of size at most `size_bound` satisfying `class`. Smaller
/// amalgams are preferred; within a size the first candidate in generation
/// order wins, with `g1` then `g2` lexicographically least.
pub fn check_ap(
    a: &FiniteLattice,
    b1: &FiniteLattice,
    b2: &FiniteLattice,
    f1: &[usize],
    f2: &[usize],
    class: Option<&Identity>,
    size_bound: usize,
) -> Result<ApOutcome> {
    let la = Structure::Lattice(a.clone());
    for (b, f) in [(b1, f1), (b2, f2)] {
        validate_map(
            &la,
            &Structure::Lattice(b.clone()),
            &StructureMap {
                map: f.to_vec(),
                mode: MapMode::Lattice,
            },
        )?;
    }
    if size_bound > limits::GEN_MAX_N {
        return Err(Error::BoundExceeded {
            what: format!("amalgam size bound {size_bound}"),
            limit: limits::GEN_MAX_N as u128,
        });
    }
    let mut candidates = 0;
    let start = b1.len().max(b2.len());
    for size in start..=size_bound {
        let pool: Vec<FiniteLattice> = lattices_of_size(size)?
            .into_iter()
            .filter(|d| class.map_or(true, |id| satisfies_identity(d, &id.lhs, &id.rhs).holds()))
            .collect();
        candidates += pool.len();
        let found = pool.par_iter().find_map_first(|d| amalgam_into(b1, b2, f1, f2, d));
        if let Some(found) = found {
            verify_amalgam(a, b1, b2, f1, f2, &found)?;
            return Ok(ApOutcome::Found(found));
        }
    }
    Ok(ApOutcome::NotFoundWithinBound {
        bound: size_bound,
        candidates,
    })
}

fn lattice_embeddings_into(b: &FiniteLattice, d: &FiniteLattice) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_embedding(
        &Structure::Lattice(b.clone()),
        &Structure::Lattice(d.clone()),
        MapMode::Lattice,
        |m| {
            out.push(m.to_vec());
            ControlFlow::Continue(())
        },
    )
    .expect("lattice inputs");
    out
}

fn amalgam_into(
    b1: &FiniteLattice,
    b2: &FiniteLattice,
    f1: &[usize],
    f2: &[usize],
    d: &FiniteLattice,
) -> Option<LatticeAmalgam> {
    let e1 = lattice_embeddings_into(b1, d);
    if e1.is_empty() {
        return None;
    }
    let e2 = lattice_embeddings_into(b2, d);
    for g1 in &e1 {
        for g2 in &e2 {
            if f1.iter().zip(f2).all(|(&x, &y)| g1[x] == g2[y]) {
                return Some(LatticeAmalgam {
                    d: d.clone(),
                    g1: g1.clone(),
                    g2: g2.clone(),
                });
            }
        }
    }
    None
}

/// Independent re-check of a returned square.
fn verify_amalgam(
    a: &FiniteLattice,
    b1: &FiniteLattice,
    b2: &FiniteLattice,
    f1: &[usize],
    f2: &[usize],
    am: &LatticeAmalgam,
) -> Result<()> {
    let ld = Structure::Lattice(am.d.clone());
    ld.validate()?;
    for (b, g) in [(b1, &am.g1), (b2, &am.g2)] {
        validate_map(
            &Structure::Lattice(b.clone()),
            &ld,
            &StructureMap {
                map: g.clone(),
                mode: MapMode::Lattice,
            },
        )?;
    }
    if (0..a.len()).any(|x| am.g1[f1[x]] != am.g2[f2[x]]) {
        return Err(Error::Internal("amalgamation square does not commute".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let t = LatticeTerm::parse("x & y | z").unwrap();
        assert_eq!(
            t,
            LatticeTerm::join(
                LatticeTerm::meet(LatticeTerm::var("x"), LatticeTerm::var("y")),
                LatticeTerm::var("z")
            )
        );
        assert_eq!(LatticeTerm::parse(&t.to_string()).unwrap(), t);
        assert!(LatticeTerm::parse("x ∧").is_err());
        assert!(LatticeTerm::parse("(x").is_err());
        assert_eq!(
            LatticeTerm::parse("a /\\ b").unwrap(),
            LatticeTerm::parse("a ∧ b").unwrap()
        );
    }

    #[test]
    fn m3_countermodel() {
        let d = Identity::distributive();
        let r = satisfies_identity(&FiniteLattice::m3(), &d.lhs, &d.rhs);
        assert_eq!(r.countermodel, Some(vec![1, 2, 3]));
        let m = Identity::modular();
        assert!(satisfies_identity(&FiniteLattice::m3(), &m.lhs, &m.rhs).holds());
        assert!(!satisfies_identity(&FiniteLattice::n5(), &m.lhs, &m.rhs).holds());
    }

    #[test]
    fn boolean_lattices_distributive() {
        let d = Identity::distributive();
        for n in 0..=3 {
            assert!(satisfies_identity(&powerset_lattice(n).unwrap(), &d.lhs, &d.rhs).holds());
        }
        assert_eq!(powerset_lattice(1).unwrap().len(), 2);
    }

    #[test]
    fn ap_identity_square() {
        let c2 = FiniteLattice::chain(2);
        let out = check_ap(&c2, &c2, &c2, &[0, 1], &[0, 1], None, 3).unwrap();
        match out {
            ApOutcome::Found(am) => assert_eq!(am.d.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ap_point_into_pairs() {
        let one = FiniteLattice::chain(1);
        let c2 = FiniteLattice::chain(2);
        match check_ap(&one, &c2, &c2, &[0], &[0], None, 4).unwrap() {
            ApOutcome::Found(am) => assert!(am.d.len() <= 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
