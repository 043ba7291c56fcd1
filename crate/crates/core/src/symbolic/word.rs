use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A letter of the alphabet ℕ = {1, 2, ...}.
pub type Digit = u32;

/// Finite word over the positive integers. Digits are always ≥ 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Digit>);

impl Word {
    pub fn new(digits: Vec<Digit>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&d| d == 0) {
            return Err(Error::InvalidInput(format!("digit 0 at position {pos}")));
        }
        Ok(Word(digits))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Digit> {
        self.0
    }

    pub fn max_digit(&self) -> Digit {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl AsRef<[Digit]> for Word {
    fn as_ref(&self) -> &[Digit] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_digits(&self.0))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_digits(s).and_then(Word::new)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn format_digits(digits: &[Digit]) -> String {
    let mut out = String::with_capacity(digits.len() * 2);
    for (i, d) in digits.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&d.to_string());
    }
    out
}

/// Parses comma-separated decimal digits. The empty string is the empty word.
pub fn parse_digits(s: &str) -> Result<Vec<Digit>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<Digit>() {
                Ok(0) => Err(Error::Parse(format!("digit 0 in word {s:?}"))),
                Ok(d) => Ok(d),
                Err(e) => Err(Error::Parse(format!("bad digit {t:?}: {e}"))),
            }
        })
        .collect()
}

/// Index of a word over {1..cap} in lexicographic order among words of its length.
pub fn lex_index(word: &[Digit], cap: Digit) -> usize {
    word.iter()
        .fold(0usize, |acc, &d| acc * cap as usize + (d - 1) as usize)
}

/// Inverse of [`lex_index`].
pub fn word_at(mut index: usize, len: usize, cap: Digit, out: &mut Vec<Digit>) {
    out.clear();
    out.resize(len, 1);
    for slot in out.iter_mut().rev() {
        *slot = (index % cap as usize) as Digit + 1;
        index /= cap as usize;
    }
}
