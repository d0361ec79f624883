use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in x_1..x_n: letter `j` is x_j, `-j` is x_j^{-1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FreeWord(pub Vec<i32>);

impl FreeWord {
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        if let Some(&z) = letters.iter().find(|&&l| l == 0) {
            return Err(Error::IndexOutOfRange { index: z as i64, n: 0 });
        }
        Ok(FreeWord(letters))
    }

    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    /// x_j^e for e of either sign.
    pub fn power(j: i32, e: i64) -> Self {
        let l = if e >= 0 { j } else { -j };
        FreeWord(vec![l; e.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_rank(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > n) {
            Some(&l) => Err(Error::IndexOutOfRange { index: l as i64, n }),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Image under x_j -> x_j^{-1}.
    pub fn sigma(&self) -> Self {
        FreeWord(self.0.iter().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FreeWord(v)
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    /// Exponent sum of x_j.
    pub fn exponent_sum(&self, j: i32) -> i64 {
        self.0
            .iter()
            .map(|&l| {
                if l == j {
                    1
                } else if l == -j {
                    -1
                } else {
                    0
                }
            })
            .sum()
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .split_whitespace()
            .map(|t| t.parse::<i32>().map_err(|e| Error::Parse(format!("bad letter {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if letters.contains(&0) {
            return Err(Error::Parse("letter 0 is not allowed".into()));
        }
        Ok(FreeWord(letters))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Parses `;`-separated words, checking every index against `n`.
pub fn parse_relations(text: &str, n: usize) -> Result<Vec<FreeWord>> {
    text.split(';')
        .map(|chunk| {
            let w: FreeWord = chunk.parse()?;
            w.check_rank(n)?;
            Ok(w)
        })
        .collect()
}
