//! Formal words in generators and Garside letters.
//!
//! A [`FormalWord`] is a freely reduced sequence of letters, each a generator
//! or a Garside letter `Delta_J` for a vertex subset `J` (stored sorted; for a
//! pair `{a, b}` the defining relation makes `Delta_ab = Delta_ba`, so the
//! order carries no information). Garside letters for `|J| >= 3` stay
//! symbolic — nothing in this crate needs their expansion.

use crate::graph::Vertex;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LetterKind {
    /// A standard generator.
    Gen(Vertex),
    /// The Garside element of a spherical indecomposable subset, `|J| >= 2`.
    Garside(BTreeSet<Vertex>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Letter {
    pub kind: LetterKind,
    /// `+1` or `-1`.
    pub exponent: i8,
}

impl Letter {
    pub fn gen(v: impl Into<Vertex>, exponent: i8) -> Self {
        Letter {
            kind: LetterKind::Gen(v.into()),
            exponent,
        }
    }

    pub fn garside(set: BTreeSet<Vertex>, exponent: i8) -> Self {
        debug_assert!(set.len() >= 2);
        Letter {
            kind: LetterKind::Garside(set),
            exponent,
        }
    }

    pub fn inverse(&self) -> Letter {
        Letter {
            kind: self.kind.clone(),
            exponent: -self.exponent,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LetterKind::Gen(v) => write!(f, "{v}")?,
            LetterKind::Garside(set) => {
                let names: Vec<&str> = set.iter().map(|s| s.as_str()).collect();
                write!(f, "D[{}]", names.join(","))?
            }
        }
        if self.exponent < 0 {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A freely reduced word; adjacent inverse letters cancel on construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalWord {
    letters: Vec<Letter>,
}

impl FormalWord {
    pub fn identity() -> Self {
        FormalWord::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = FormalWord::identity();
        for l in letters {
            w.push_right(l);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Appends on the right, cancelling against the last letter.
    pub fn push_right(&mut self, letter: Letter) {
        match self.letters.last() {
            Some(last) if last.kind == letter.kind && last.exponent == -letter.exponent => {
                self.letters.pop();
            }
            _ => self.letters.push(letter),
        }
    }

    /// Prepends on the left, cancelling against the first letter.
    pub fn push_left(&mut self, letter: Letter) {
        match self.letters.first() {
            Some(first) if first.kind == letter.kind && first.exponent == -letter.exponent => {
                self.letters.remove(0);
            }
            _ => self.letters.insert(0, letter),
        }
    }

    /// `self * other`, freely reduced.
    pub fn concat(&self, other: &FormalWord) -> FormalWord {
        let mut out = self.clone();
        for l in &other.letters {
            out.push_right(l.clone());
        }
        out
    }

    pub fn inverse(&self) -> FormalWord {
        FormalWord {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }
}

impl fmt::Display for FormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"gen":"a","exp":1} | {"garside":["a","b"],"exp":-1}.

#[derive(Serialize, Deserialize)]
struct LetterDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    gen: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    garside: Option<Vec<String>>,
    exp: i8,
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = match &self.kind {
            LetterKind::Gen(v) => LetterDto {
                gen: Some(v.clone()),
                garside: None,
                exp: self.exponent,
            },
            LetterKind::Garside(set) => LetterDto {
                gen: None,
                garside: Some(set.iter().cloned().collect()),
                exp: self.exponent,
            },
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = LetterDto::deserialize(deserializer)?;
        if dto.exp != 1 && dto.exp != -1 {
            return Err(D::Error::custom("letter exponent must be +1 or -1"));
        }
        match (dto.gen, dto.garside) {
            (Some(v), None) => Ok(Letter::gen(v, dto.exp)),
            (None, Some(vs)) => {
                let set: BTreeSet<String> = vs.into_iter().collect();
                if set.len() < 2 {
                    return Err(D::Error::custom(
                        "garside letter needs at least two distinct vertices",
                    ));
                }
                Ok(Letter::garside(set, dto.exp))
            }
            _ => Err(D::Error::custom(
                "letter must have exactly one of `gen` or `garside`",
            )),
        }
    }
}

impl Serialize for FormalWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.letters.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FormalWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let letters = Vec::<Letter>::deserialize(deserializer)?;
        Ok(FormalWord::from_letters(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn garside_ab() -> Letter {
        Letter::garside(
            BTreeSet::from(["a".to_owned(), "b".to_owned()]),
            1,
        )
    }

    #[test]
    fn free_reduction_cancels_inverses() {
        let mut w = FormalWord::identity();
        w.push_right(Letter::gen("a", 1));
        w.push_right(Letter::gen("a", -1));
        assert!(w.is_identity());

        let mut w = FormalWord::identity();
        w.push_right(garside_ab());
        w.push_right(garside_ab().inverse());
        assert!(w.is_identity());
    }

    #[test]
    fn same_letter_does_not_cancel() {
        let mut w = FormalWord::identity();
        w.push_right(garside_ab());
        w.push_right(garside_ab());
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn word_times_inverse_is_identity() {
        let w = FormalWord::from_letters([
            Letter::gen("x", 1),
            garside_ab(),
            Letter::gen("y", -1),
        ]);
        assert!(w.concat(&w.inverse()).is_identity());
        assert!(w.inverse().concat(&w).is_identity());
    }

    #[test]
    fn json_round_trip() {
        let w = FormalWord::from_letters([Letter::gen("x", -1), garside_ab()]);
        let text = serde_json::to_string(&w).unwrap();
        let back: FormalWord = serde_json::from_str(&text).unwrap();
        assert_eq!(w, back);
    }
}
