//! Elementary ribbons and ribbon words.
//!
//! An elementary `(x, y)`-ribbon is a group element conjugating `y` to `x`
//! of one of four shapes: the Garside element of an odd edge (which moves
//! between the two endpoints), the generator itself, the Garside element of
//! an even edge, or a commuting generator (all of which fix the endpoint).
//! A ribbon word is a sequence of such letters together with the chain of
//! generators it tracks; the empty word is the identity ribbon.
//!
//! Exponent signs never affect the chain — conjugation by a letter and by
//! its inverse move between the same pair of generators — so validation
//! ignores signs while composition and free reduction respect them.

use crate::graph::{DefiningGraph, Vertex};
use crate::word::{FormalWord, Letter};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RibbonError {
    #[error("letter {index}: {reason}")]
    InvalidLetter { index: usize, reason: String },
    #[error("chain ends at `{found}`, expected target `{expected}`")]
    WrongTarget { found: String, expected: String },
    #[error("endpoint mismatch: first word targets `{left}`, second starts at `{right}`")]
    EndpointMismatch { left: String, right: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

/// The four elementary shapes. Odd Garside pairs are stored sorted (the
/// group element does not depend on the order); the other kinds keep the
/// tracked vertex `x` first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RibbonLetterKind {
    /// `Delta_{a,b}` for an odd label `m >= 3`; moves the chain across.
    OddGarside { pair: (Vertex, Vertex) },
    /// The tracked generator itself.
    SelfGenerator { x: Vertex },
    /// `Delta_{x,t}` for an even label `m >= 4`; fixes `x`.
    EvenGarside { x: Vertex, t: Vertex },
    /// A generator `t` with `m_xt = 2`; fixes `x`.
    CommutingGenerator { x: Vertex, t: Vertex },
}

impl RibbonLetterKind {
    pub fn odd(a: impl Into<Vertex>, b: impl Into<Vertex>) -> Self {
        let (a, b) = (a.into(), b.into());
        let pair = if a <= b { (a, b) } else { (b, a) };
        RibbonLetterKind::OddGarside { pair }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RibbonLetter {
    #[serde(flatten)]
    pub kind: RibbonLetterKind,
    #[serde(default = "one")]
    pub exponent: i8,
}

fn one() -> i8 {
    1
}

impl RibbonLetter {
    pub fn new(kind: RibbonLetterKind, exponent: i8) -> Self {
        RibbonLetter { kind, exponent }
    }

    pub fn inverse(&self) -> Self {
        RibbonLetter {
            kind: self.kind.clone(),
            exponent: -self.exponent,
        }
    }

    /// The letter as a formal group word letter: Garside letters for the
    /// Garside kinds, generator letters otherwise.
    pub fn to_formal_letter(&self) -> Letter {
        match &self.kind {
            RibbonLetterKind::OddGarside { pair: (a, b) } => Letter::garside(
                BTreeSet::from([a.clone(), b.clone()]),
                self.exponent,
            ),
            RibbonLetterKind::EvenGarside { x, t } => Letter::garside(
                BTreeSet::from([x.clone(), t.clone()]),
                self.exponent,
            ),
            RibbonLetterKind::SelfGenerator { x } => Letter::gen(x.clone(), self.exponent),
            RibbonLetterKind::CommutingGenerator { t, .. } => {
                Letter::gen(t.clone(), self.exponent)
            }
        }
    }
}

/// A validated ribbon word: letters, endpoints, and the recomputed chain
/// `x_0, ..., x_n` with `x_0 = source` and `x_n = target`. The word, read
/// left to right, conjugates `target` to `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonWord {
    pub letters: Vec<RibbonLetter>,
    pub source: Vertex,
    pub target: Vertex,
    pub chain: Vec<Vertex>,
}

impl RibbonWord {
    pub fn to_formal_word(&self) -> FormalWord {
        FormalWord::from_letters(self.letters.iter().map(|l| l.to_formal_letter()))
    }

    /// Reverses the letters and flips exponents, swapping endpoints.
    pub fn inverse(&self) -> RibbonWord {
        RibbonWord {
            letters: self.letters.iter().rev().map(RibbonLetter::inverse).collect(),
            source: self.target.clone(),
            target: self.source.clone(),
            chain: self.chain.iter().rev().cloned().collect(),
        }
    }
}

/// Applies a single letter to the chain vertex `at`, returning the next
/// chain vertex, or an explanation of why the letter is not elementary there.
fn step(g: &DefiningGraph, at: &Vertex, letter: &RibbonLetter) -> Result<Vertex, String> {
    match &letter.kind {
        RibbonLetterKind::OddGarside { pair: (a, b) } => {
            match g.label(a, b) {
                Some(m) if m >= 3 && m % 2 == 1 => {}
                Some(m) => return Err(format!("label {m} on {{{a}, {b}}} is not odd >= 3")),
                None => return Err(format!("no edge between `{a}` and `{b}`")),
            }
            if at == a {
                Ok(b.clone())
            } else if at == b {
                Ok(a.clone())
            } else {
                Err(format!("chain is at `{at}`, not on the edge {{{a}, {b}}}"))
            }
        }
        RibbonLetterKind::SelfGenerator { x } => {
            if at == x {
                Ok(x.clone())
            } else {
                Err(format!("chain is at `{at}`, not `{x}`"))
            }
        }
        RibbonLetterKind::EvenGarside { x, t } => {
            match g.label(x, t) {
                Some(m) if m >= 4 && m % 2 == 0 => {}
                Some(m) => return Err(format!("label {m} on {{{x}, {t}}} is not even >= 4")),
                None => return Err(format!("no edge between `{x}` and `{t}`")),
            }
            if at == x {
                Ok(x.clone())
            } else {
                Err(format!("chain is at `{at}`, not `{x}`"))
            }
        }
        RibbonLetterKind::CommutingGenerator { x, t } => {
            match g.label(x, t) {
                Some(2) => {}
                Some(m) => return Err(format!("label {m} on {{{x}, {t}}} is not 2")),
                None => return Err(format!("no edge between `{x}` and `{t}`")),
            }
            if at == x {
                Ok(x.clone())
            } else {
                Err(format!("chain is at `{at}`, not `{x}`"))
            }
        }
    }
}

/// Recomputes the chain of `letters` from `source` and checks it ends at
/// `target`. Signs are ignored here.
pub fn validate_ribbon(
    g: &DefiningGraph,
    letters: &[RibbonLetter],
    source: &str,
    target: &str,
) -> Result<RibbonWord, RibbonError> {
    if !g.contains_vertex(source) {
        return Err(RibbonError::UnknownVertex(source.to_owned()));
    }
    if !g.contains_vertex(target) {
        return Err(RibbonError::UnknownVertex(target.to_owned()));
    }
    let mut chain = vec![source.to_owned()];
    for (index, letter) in letters.iter().enumerate() {
        let at = chain.last().unwrap();
        let next = step(g, at, letter).map_err(|reason| RibbonError::InvalidLetter {
            index,
            reason,
        })?;
        chain.push(next);
    }
    let last = chain.last().unwrap();
    if last != target {
        return Err(RibbonError::WrongTarget {
            found: last.clone(),
            expected: target.to_owned(),
        });
    }
    Ok(RibbonWord {
        letters: letters.to_vec(),
        source: source.to_owned(),
        target: target.to_owned(),
        chain,
    })
}

/// All elementary ribbon letters available at `x`, as `(target, letter)`
/// pairs, with both exponents.
pub fn elementary_ribbons(
    g: &DefiningGraph,
    x: &str,
) -> Result<Vec<(Vertex, RibbonLetter)>, RibbonError> {
    let xi = g
        .vertex_index(x)
        .ok_or_else(|| RibbonError::UnknownVertex(x.to_owned()))?;
    let mut kinds: Vec<(Vertex, RibbonLetterKind)> = vec![(
        x.to_owned(),
        RibbonLetterKind::SelfGenerator { x: x.to_owned() },
    )];
    for t_idx in g.neighbors_idx(xi) {
        let t = g.vertex_name(t_idx).to_owned();
        let m = g.label_idx(xi, t_idx).unwrap();
        if m == 2 {
            kinds.push((
                x.to_owned(),
                RibbonLetterKind::CommutingGenerator {
                    x: x.to_owned(),
                    t,
                },
            ));
        } else if m.is_multiple_of(2) {
            kinds.push((
                x.to_owned(),
                RibbonLetterKind::EvenGarside {
                    x: x.to_owned(),
                    t,
                },
            ));
        } else {
            kinds.push((t.clone(), RibbonLetterKind::odd(x, t)));
        }
    }
    let mut out = Vec::with_capacity(kinds.len() * 2);
    for (target, kind) in kinds {
        out.push((target.clone(), RibbonLetter::new(kind.clone(), 1)));
        out.push((target, RibbonLetter::new(kind, -1)));
    }
    Ok(out)
}

/// A ribbon word with source `t` and target `s` along a shortest odd path,
/// when `s` and `t` lie in the same odd component; such a word conjugates
/// `s` to `t`.
pub fn ribbon_witness(g: &DefiningGraph, s: &str, t: &str) -> Option<RibbonWord> {
    let path = g.odd_path(t, s)?;
    let letters: Vec<RibbonLetter> = path
        .windows(2)
        .map(|w| RibbonLetter::new(RibbonLetterKind::odd(w[0].clone(), w[1].clone()), 1))
        .collect();
    Some(validate_ribbon(g, &letters, t, s).expect("odd-path witness revalidates"))
}

/// Concatenation: an `(s, t)`-ribbon followed by a `(t, r)`-ribbon is an
/// `(s, r)`-ribbon. Errors unless the first word's target is the second's
/// source; the result is revalidated.
pub fn compose(
    g: &DefiningGraph,
    first: &RibbonWord,
    second: &RibbonWord,
) -> Result<RibbonWord, RibbonError> {
    if first.target != second.source {
        return Err(RibbonError::EndpointMismatch {
            left: first.target.clone(),
            right: second.source.clone(),
        });
    }
    let mut letters = first.letters.clone();
    letters.extend(second.letters.iter().cloned());
    validate_ribbon(g, &letters, &first.source, &second.target)
}

/// Free reduction at letter level: adjacent letters of the same kind and
/// opposite exponents cancel.
pub fn free_reduce(letters: &[RibbonLetter]) -> Vec<RibbonLetter> {
    let mut out: Vec<RibbonLetter> = Vec::with_capacity(letters.len());
    for l in letters {
        match out.last() {
            Some(last) if last.kind == l.kind && last.exponent == -l.exponent => {
                out.pop();
            }
            _ => out.push(l.clone()),
        }
    }
    out
}
