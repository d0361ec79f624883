//! Conjugacy representatives with prescribed parity, by exhaustive search.

use super::{Elem, SigmaGroup, Sign, SubgroupSet};
use crate::error::{Error, Result};

/// b = c a c^{-1} with b of the requested parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjugacyWitness {
    pub representative: Elem,
    pub conjugator: Elem,
}

/// c (x sigma) c^{-1} = b sigma in G x| {1, sigma}, with x = a or x = sigma(a).
/// `via_sigma` records whether the conjugating element of the semidirect
/// product is c or c*sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemidirectWitness {
    pub representative: Elem,
    pub conjugator: Elem,
    pub via_sigma: bool,
}

impl SigmaGroup {
    /// The conjugacy class of `a` as a bitset-backed set (not a subgroup).
    pub fn conjugacy_class(&self, a: Elem) -> Vec<Elem> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for g in self.elements() {
            let b = self.conj(g, a);
            if !seen[b as usize] {
                seen[b as usize] = true;
                out.push(b);
            }
        }
        out
    }

    /// Twisted class {c a sigma(c)^{-1}} u {c sigma(a) sigma(c)^{-1}}: the
    /// elements b with b sigma conjugate to a sigma in the semidirect product.
    pub fn twisted_class(&self, a: Elem) -> Vec<Elem> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for x in [a, self.sigma(a)] {
            for c in self.elements() {
                let b = self.mul(self.mul(c, x), self.inv(self.sigma(c)));
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    out.push(b);
                }
            }
        }
        out
    }

    pub fn are_conjugate(&self, a: Elem, b: Elem) -> bool {
        self.elements().any(|g| self.conj(g, a) == b)
    }

    /// Some b in G^eps conjugate to a. Requires sigma(a) ~ a^eps.
    pub fn odd_even_conjugacy_representative(&self, a: Elem, eps: Sign) -> Result<ConjugacyWitness> {
        self.check_elem(a)?;
        if self.in_part(a, eps) {
            return Ok(ConjugacyWitness { representative: a, conjugator: 0 });
        }
        let target = match eps {
            Sign::Plus => a,
            Sign::Minus => self.inv(a),
        };
        if !self.are_conjugate(self.sigma(a), target) {
            return Err(Error::PreconditionViolated(format!(
                "sigma({a}) is not conjugate to {a}^{}",
                if eps == Sign::Plus { "+1" } else { "-1" }
            )));
        }
        self.elements()
            .find_map(|g| {
                let b = self.conj(g, a);
                self.in_part(b, eps).then_some(ConjugacyWitness { representative: b, conjugator: g })
            })
            .ok_or_else(|| Error::Inconsistent(format!("no conjugate of {a} has the requested parity")))
    }

    /// Some b in G^+ with a sigma ~ b sigma in G x| {1, sigma}.
    pub fn even_sigma_representative(&self, a: Elem) -> Result<SemidirectWitness> {
        self.check_elem(a)?;
        for (via_sigma, x) in [(false, a), (true, self.sigma(a))] {
            for c in self.elements() {
                let b = self.mul(self.mul(c, x), self.inv(self.sigma(c)));
                if self.is_even(b) {
                    return Ok(SemidirectWitness { representative: b, conjugator: c, via_sigma });
                }
            }
        }
        Err(Error::Inconsistent(format!("no even representative for {a}*sigma")))
    }

    /// Orbit of `b` under conjugation by the even part.
    pub fn even_conjugation_orbit(&self, even: &SubgroupSet, b: Elem) -> Vec<Elem> {
        let mut v: Vec<Elem> = even.elements().iter().map(|&h| self.conj(h, b)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}
