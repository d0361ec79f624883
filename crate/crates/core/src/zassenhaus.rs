//! Zassenhaus type of F_n / N_r read off from the relation ranks
//! m_i = rank of N_r D_i / D_i as a normal subgroup of F_n / D_i:
//! #{j : d_j < i} = m_i.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::magnus::{enumerate_group, DEFAULT_SIZE_CAP};
use crate::word::FreeWord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZassenhausType {
    pub max_depth: u32,
    /// m_i for i = 2..=max_depth
    pub relation_ranks: Vec<u32>,
    /// resolved d_j in increasing order, then None for "not below max_depth"
    pub entries: Vec<Option<u32>>,
}

impl ZassenhausType {
    pub fn resolved(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().flatten().copied()
    }
}

impl fmt::Display for ZassenhausType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| match e {
                Some(d) => d.to_string(),
                None => format!(">={}", self.max_depth),
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Computes the type from relation words. Every relation must be odd at each
/// level examined and lie in the Frattini subgroup.
pub fn zassenhaus_type(p: Prime, n: usize, relations: &[FreeWord], max_depth: u32) -> Result<ZassenhausType> {
    if relations.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} relations, got {}", relations.len())));
    }
    if max_depth < 2 {
        return Err(Error::InvalidArgument("max_depth must be at least 2".into()));
    }
    for r in relations {
        r.check_rank(n)?;
        if (1..=n as i32).any(|j| r.exponent_sum(j).rem_euclid(p.get() as i64) != 0) {
            return Err(Error::NotInFrattini(r.to_string()));
        }
    }
    let mut ranks = Vec::new();
    for i in 2..=max_depth {
        let f = enumerate_group(p, n, i as usize, DEFAULT_SIZE_CAP)?;
        let g = &f.group;
        let seeds = relations
            .iter()
            .map(|r| {
                let e = f.word_to_elem(r)?;
                if !g.is_odd(e) {
                    return Err(Error::NotOdd(r.to_string()));
                }
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        let nr = g.normal_closure(&seeds);
        ranks.push(g.relation_rank(&nr)?);
    }
    let mut entries = Vec::new();
    let mut prev = 0;
    for (k, &m) in ranks.iter().enumerate() {
        let i = k as u32 + 2;
        if m < prev {
            return Err(Error::Inconsistent(format!("relation rank decreased at depth {i}")));
        }
        entries.extend(std::iter::repeat_n(Some(i - 1), (m - prev) as usize));
        prev = m;
    }
    entries.extend(std::iter::repeat_n(None, n - prev as usize));
    Ok(ZassenhausType { max_depth, relation_ranks: ranks, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn cyclic_examples() {
        let t = zassenhaus_type(p3(), 1, &[FreeWord::power(1, 9)], 10).unwrap();
        assert_eq!(t.entries, vec![Some(9)]);
        assert_eq!(t.to_string(), "(9)");
        let t = zassenhaus_type(p3(), 1, &[FreeWord::power(1, 3)], 4).unwrap();
        assert_eq!(t.entries, vec![Some(3)]);
    }

    #[test]
    fn trivial_relations_unresolved() {
        let t = zassenhaus_type(p3(), 2, &[FreeWord::empty(), FreeWord::empty()], 4).unwrap();
        assert_eq!(t.entries, vec![None, None]);
        assert_eq!(t.to_string(), "(>=4, >=4)");
    }

    #[test]
    fn rejects_bad_relations() {
        assert!(matches!(zassenhaus_type(p3(), 1, &[FreeWord::power(1, 2)], 4), Err(Error::NotInFrattini(_))));
        // x1^3 x2^3 [x1, x2] lies in Fr but is even at depth 3
        let w = FreeWord::power(1, 3).concat(&FreeWord::power(2, 3));
        let ok = FreeWord::power(2, 3);
        assert!(matches!(
            zassenhaus_type(p3(), 2, &[w.concat(&FreeWord(vec![1, 2, -1, -2])), ok], 3),
            Err(Error::NotOdd(_))
        ));
    }

    #[test]
    fn two_generator_type() {
        let r = vec![FreeWord::power(1, 3), FreeWord::power(2, 3)];
        let t = zassenhaus_type(p3(), 2, &r, 4).unwrap();
        assert_eq!(t.entries, vec![Some(3), Some(3)]);
    }
}
