//! Finite sigma-p-groups given by enumerated tables.
//!
//! A [`SigmaGroup`] stores the full multiplication table together with the
//! involution sigma, element inverses, element orders and parity flags. All
//! subgroup machinery (closures, commutators, the lower central series and the
//! Zassenhaus filtration) works on [`SubgroupSet`] bitsets over element indices.

mod conjugacy;
mod properties;
mod subgroup;

pub use conjugacy::{ConjugacyWitness, SemidirectWitness};
pub use properties::CheckOutcome;
pub use subgroup::SubgroupSet;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::Prime;

/// Element index into a [`SigmaGroup`]. The identity is always 0.
pub type Elem = u32;

const EVEN: u8 = 1;
const ODD: u8 = 2;

/// Parity class of an element with respect to sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    /// sigma(a) = a
    Even,
    /// sigma(a) = a^{-1}
    Odd,
    /// Both (only the identity).
    Both,
    Neither,
}

impl Parity {
    fn from_flags(f: u8) -> Self {
        match f {
            3 => Parity::Both,
            EVEN => Parity::Even,
            ODD => Parity::Odd,
            _ => Parity::Neither,
        }
    }

    pub fn code(self) -> char {
        match self {
            Parity::Even => 'e',
            Parity::Odd => 'o',
            Parity::Both => 'b',
            Parity::Neither => 'n',
        }
    }
}

/// Sign selector for the even (+1) and odd (-1) parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// A finite p-group with an involutive automorphism sigma, fully tabulated.
#[derive(Clone)]
pub struct SigmaGroup {
    p: Prime,
    order: usize,
    mul: Vec<Elem>,
    inv: Vec<Elem>,
    sigma: Vec<Elem>,
    generators: Vec<Elem>,
    parity: Vec<u8>,
    elem_order: Vec<u32>,
}

impl std::fmt::Debug for SigmaGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SigmaGroup")
            .field("p", &self.p)
            .field("order", &self.order)
            .field("generators", &self.generators)
            .finish()
    }
}

/// An n-tuple of odd elements read as relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationTuple {
    pub entries: Vec<Elem>,
}

impl RelationTuple {
    pub fn new(g: &SigmaGroup, entries: Vec<Elem>) -> Result<Self> {
        for &e in &entries {
            g.check_elem(e)?;
            if !g.is_odd(e) {
                return Err(Error::NotOdd(format!("element {e}")));
            }
        }
        Ok(RelationTuple { entries })
    }
}

impl SigmaGroup {
    /// Builds a group from a row-major multiplication table (identity at 0),
    /// a sigma permutation and a generator list. Checks the table has an
    /// identity and inverses, that sigma is an involutive automorphism and
    /// that the generators generate. Associativity is not checked here; see
    /// [`SigmaGroup::check_associativity`].
    pub fn from_tables(p: Prime, mul: Vec<Elem>, sigma: Vec<Elem>, generators: Vec<Elem>) -> Result<Self> {
        let order = (mul.len() as f64).sqrt().round() as usize;
        if order == 0 || order * order != mul.len() || sigma.len() != order {
            return Err(Error::InvalidArgument("table dimensions do not match".into()));
        }
        if !is_power_of(order as u64, p.get() as u64) {
            return Err(Error::InvalidArgument(format!("order {order} is not a power of {p}")));
        }
        for a in 0..order {
            if mul[a] as usize != a || mul[a * order] as usize != a {
                return Err(Error::InvalidArgument("element 0 is not the identity".into()));
            }
        }
        if mul.iter().any(|&x| x as usize >= order) || generators.iter().any(|&x| x as usize >= order) {
            return Err(Error::InvalidArgument("table entry out of range".into()));
        }
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            let row = &mul[a * order..(a + 1) * order];
            match row.iter().position(|&x| x == 0) {
                Some(b) => inv[a] = b as Elem,
                None => return Err(Error::InvalidArgument(format!("element {a} has no inverse"))),
            }
        }
        for a in 0..order {
            if sigma[sigma[a] as usize] as usize != a {
                return Err(Error::InvalidArgument("sigma is not an involution".into()));
            }
        }
        for a in 0..order {
            let sa = sigma[a] as usize;
            for b in 0..order {
                let lhs = sigma[mul[a * order + b] as usize];
                let rhs = mul[sa * order + sigma[b] as usize];
                if lhs != rhs {
                    return Err(Error::InvalidArgument("sigma is not a homomorphism".into()));
                }
            }
        }
        let mut g = SigmaGroup { p, order, mul, inv, sigma, generators, parity: Vec::new(), elem_order: Vec::new() };
        g.fill_caches();
        let closure = g.closure(&g.generators.clone());
        if closure.len() != order {
            return Err(Error::InvalidArgument("generators do not generate the group".into()));
        }
        Ok(g)
    }

    /// Same as [`SigmaGroup::from_tables`] without the O(|G|^2) checks; used for
    /// tables produced by trusted constructions (quotients, enumerations).
    pub(crate) fn from_trusted_tables(
        p: Prime,
        mul: Vec<Elem>,
        inv: Vec<Elem>,
        sigma: Vec<Elem>,
        generators: Vec<Elem>,
    ) -> Self {
        let order = inv.len();
        debug_assert_eq!(mul.len(), order * order);
        let mut g = SigmaGroup { p, order, mul, inv, sigma, generators, parity: Vec::new(), elem_order: Vec::new() };
        g.fill_caches();
        g
    }

    fn fill_caches(&mut self) {
        let n = self.order;
        self.parity = (0..n)
            .map(|a| {
                let s = self.sigma[a];
                let mut f = 0;
                if s as usize == a {
                    f |= EVEN;
                }
                if s == self.inv[a] {
                    f |= ODD;
                }
                f
            })
            .collect();
        self.elem_order = (0..n as Elem)
            .map(|a| {
                let mut k = 1u32;
                let mut x = a;
                while x != 0 {
                    x = self.mul(x, a);
                    k += 1;
                }
                k
            })
            .collect();
    }

    /// The trivial group.
    pub fn trivial(p: Prime) -> Self {
        Self::from_trusted_tables(p, vec![0], vec![0], vec![0], vec![])
    }

    /// Z/m for m a power of p, with sigma acting as inversion (`odd = true`)
    /// or trivially.
    pub fn cyclic(p: Prime, m: usize, odd: bool) -> Result<Self> {
        if !is_power_of(m as u64, p.get() as u64) {
            return Err(Error::InvalidArgument(format!("{m} is not a power of {p}")));
        }
        let mul = (0..m * m).map(|k| ((k / m + k % m) % m) as Elem).collect();
        let inv: Vec<Elem> = (0..m).map(|a| ((m - a) % m) as Elem).collect();
        let sigma = if odd { inv.clone() } else { (0..m as Elem).collect() };
        let generators = if m > 1 { vec![1] } else { vec![] };
        Ok(Self::from_trusted_tables(p, mul, inv, sigma, generators))
    }

    /// Direct product with component-wise sigma; element (a, b) has index a*|H| + b.
    pub fn direct_product(&self, other: &SigmaGroup) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidArgument("primes differ".into()));
        }
        let (m, k) = (self.order, other.order);
        let n = m * k;
        let idx = |a: usize, b: usize| (a * k + b) as Elem;
        let mut mul = vec![0; n * n];
        for x in 0..n {
            let (a1, b1) = (x / k, x % k);
            for y in 0..n {
                let (a2, b2) = (y / k, y % k);
                mul[x * n + y] =
                    idx(self.mul(a1 as Elem, a2 as Elem) as usize, other.mul(b1 as Elem, b2 as Elem) as usize);
            }
        }
        let inv = (0..n).map(|x| idx(self.inv[x / k] as usize, other.inv[x % k] as usize)).collect();
        let sigma = (0..n).map(|x| idx(self.sigma[x / k] as usize, other.sigma[x % k] as usize)).collect();
        let mut generators: Vec<Elem> = self.generators.iter().map(|&a| idx(a as usize, 0)).collect();
        generators.extend(other.generators.iter().map(|&b| idx(0, b as usize)));
        Ok(Self::from_trusted_tables(self.p, mul, inv, sigma, generators))
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> Elem {
        0
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    #[inline]
    pub fn sigma(&self, a: Elem) -> Elem {
        self.sigma[a as usize]
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    #[inline]
    pub fn elem_order(&self, a: Elem) -> u32 {
        self.elem_order[a as usize]
    }

    #[inline]
    pub fn is_even(&self, a: Elem) -> bool {
        self.parity[a as usize] & EVEN != 0
    }

    #[inline]
    pub fn is_odd(&self, a: Elem) -> bool {
        self.parity[a as usize] & ODD != 0
    }

    pub fn parity(&self, a: Elem) -> Parity {
        Parity::from_flags(self.parity[a as usize])
    }

    pub fn in_part(&self, a: Elem, sign: Sign) -> bool {
        match sign {
            Sign::Plus => self.is_even(a),
            Sign::Minus => self.is_odd(a),
        }
    }

    pub(crate) fn check_elem(&self, a: Elem) -> Result<()> {
        if (a as usize) < self.order {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("element index {a} out of range")))
        }
    }

    pub fn conj(&self, g: Elem, a: Elem) -> Elem {
        self.mul(self.mul(g, a), self.inv(g))
    }

    /// [a, b] = a b a^{-1} b^{-1}
    pub fn commutator_elem(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut acc = 0;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn odd_elements(&self) -> Vec<Elem> {
        self.elements().filter(|&a| self.is_odd(a)).collect()
    }

    pub fn even_elements(&self) -> Vec<Elem> {
        self.elements().filter(|&a| self.is_even(a)).collect()
    }

    /// Even part G^+ as a subgroup and odd part G^- as a sorted index list.
    pub fn parts(&self) -> (SubgroupSet, Vec<Elem>) {
        (self.closure(&self.even_elements()), self.odd_elements())
    }

    /// Full associativity check, O(|G|^3). For tests on small groups.
    pub fn check_associativity(&self) -> bool {
        let n = self.order as Elem;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))))
    }

    // ----- subgroups -----

    pub fn trivial_subgroup(&self) -> SubgroupSet {
        SubgroupSet::trivial(self.order)
    }

    pub fn whole(&self) -> SubgroupSet {
        let mut s = self.trivial_subgroup();
        for &g in &self.generators {
            self.extend(&mut s, g);
        }
        s
    }

    /// Adds `s` to the subgroup, closing under multiplication. Returns
    /// whether the subgroup grew.
    pub(crate) fn extend(&self, sub: &mut SubgroupSet, s: Elem) -> bool {
        if sub.contains(s) {
            return false;
        }
        sub.push_gen(s);
        let mut queue = VecDeque::new();
        let old: Vec<Elem> = sub.elements().to_vec();
        for &x in &old {
            let y = self.mul(x, s);
            if sub.insert(y) {
                queue.push_back(y);
            }
        }
        while let Some(x) = queue.pop_front() {
            for gi in 0..sub.gens().len() {
                let y = self.mul(x, sub.gens()[gi]);
                if sub.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        true
    }

    /// Subgroup generated by `seeds`.
    pub fn closure(&self, seeds: &[Elem]) -> SubgroupSet {
        let mut sub = self.trivial_subgroup();
        for &s in seeds {
            self.extend(&mut sub, s);
        }
        sub
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Elem]) -> SubgroupSet {
        let mut sub = self.trivial_subgroup();
        self.normal_extend(&mut sub, seeds);
        sub
    }

    /// Extends a normal subgroup by the normal closure of `seeds`.
    pub(crate) fn normal_extend(&self, sub: &mut SubgroupSet, seeds: &[Elem]) {
        let mut stack: Vec<Elem> = seeds.to_vec();
        while let Some(c) = stack.pop() {
            if self.extend(sub, c) {
                for &g in &self.generators {
                    let k = self.conj(g, c);
                    if !sub.contains(k) {
                        stack.push(k);
                    }
                }
            }
        }
    }

    pub fn is_subgroup_normal(&self, n: &SubgroupSet) -> bool {
        n.gens().iter().all(|&x| self.generators.iter().all(|&g| n.contains(self.conj(g, x))))
    }

    pub fn is_sigma_invariant(&self, n: &SubgroupSet) -> bool {
        n.gens().iter().all(|&x| n.contains(self.sigma(x)))
    }

    /// [A, B] for normal subgroups A, B: the normal closure of the commutators
    /// of their generators.
    pub fn commutator(&self, a: &SubgroupSet, b: &SubgroupSet) -> SubgroupSet {
        let mut seeds = Vec::new();
        for &x in a.gens() {
            for &y in b.gens() {
                let c = self.commutator_elem(x, y);
                if c != 0 {
                    seeds.push(c);
                }
            }
        }
        self.normal_closure(&seeds)
    }

    /// Subgroup generated by the q-th powers of the elements of `h`.
    pub fn power_subgroup(&self, h: &SubgroupSet, q: u64) -> SubgroupSet {
        let mut sub = self.trivial_subgroup();
        for &x in h.elements() {
            let y = self.pow(x, q);
            self.extend(&mut sub, y);
        }
        sub
    }

    /// gamma_1 = G, gamma_{k+1} = [gamma_k, G], until the series reaches {1}
    /// or stabilises.
    pub fn lower_central_series(&self) -> Vec<SubgroupSet> {
        let g = self.whole();
        let mut series = vec![g.clone()];
        loop {
            let next = self.commutator(series.last().unwrap(), &g);
            let done = next.len() == series.last().unwrap().len() || next.len() == 1;
            series.push(next);
            if done {
                break;
            }
        }
        series
    }

    /// D_i(G) = prod_{j p^k >= i} gamma_j(G)^{p^k}.
    pub fn dimension_subgroup(&self, i: u32) -> SubgroupSet {
        let lcs = self.lower_central_series();
        self.dimension_subgroup_with(&lcs, i)
    }

    pub(crate) fn dimension_subgroup_with(&self, lcs: &[SubgroupSet], i: u32) -> SubgroupSet {
        if i <= 1 {
            return self.whole();
        }
        let gamma = |j: u32| -> &SubgroupSet { lcs.get(j as usize - 1).unwrap_or_else(|| lcs.last().unwrap()) };
        let p = self.p.get() as u64;
        let mut result = self.trivial_subgroup();
        let mut pk = 1u64;
        loop {
            let j = (i as u64).div_ceil(pk) as u32;
            let term = if pk == 1 { gamma(j).clone() } else { self.power_subgroup(gamma(j), pk) };
            for &x in term.gens() {
                self.extend(&mut result, x);
            }
            if pk >= i as u64 {
                break;
            }
            pk *= p;
        }
        result
    }

    /// The full Zassenhaus filtration D_1 = G, D_2, ... down to {1}.
    pub fn dimension_series(&self) -> Vec<SubgroupSet> {
        let lcs = self.lower_central_series();
        let mut out = Vec::new();
        let mut i = 1;
        loop {
            let d = self.dimension_subgroup_with(&lcs, i);
            let last = d.len() == 1;
            out.push(d);
            if last {
                break;
            }
            i += 1;
            if i as usize > 4 * self.order + 4 {
                break;
            }
        }
        out
    }

    /// Fr(G) = G^p [G, G].
    pub fn frattini(&self) -> SubgroupSet {
        let g = self.whole();
        let mut fr = self.commutator(&g, &g);
        let pw = self.power_subgroup(&g, self.p.get() as u64);
        for &x in pw.gens() {
            self.extend(&mut fr, x);
        }
        fr
    }

    pub fn center(&self) -> SubgroupSet {
        let z: Vec<Elem> =
            self.elements().filter(|&a| self.generators.iter().all(|&g| self.mul(a, g) == self.mul(g, a))).collect();
        self.closure(&z)
    }

    /// d_G = log_p [G : Fr(G)].
    pub fn generator_rank(&self) -> u32 {
        log_p(self.order / self.frattini().len(), self.p.get() as usize)
    }

    /// Minimal number of normal generators of N, dim_{F_p} N/(N^p [G, N]).
    pub fn relation_rank(&self, n: &SubgroupSet) -> Result<u32> {
        if !self.is_subgroup_normal(n) {
            return Err(Error::NotNormal);
        }
        if !self.is_sigma_invariant(n) {
            return Err(Error::NotSigmaInvariant);
        }
        let g = self.whole();
        let mut k = self.commutator(&g, n);
        let pw = self.power_subgroup(n, self.p.get() as u64);
        for &x in pw.gens() {
            self.extend(&mut k, x);
        }
        Ok(log_p(n.len() / k.len(), self.p.get() as usize))
    }

    /// G/N with the induced sigma, plus the projection G -> G/N. Cosets are
    /// numbered by their smallest element, so the identity coset is 0.
    pub fn quotient(&self, n: &SubgroupSet) -> Result<(SigmaGroup, Vec<Elem>)> {
        if !self.is_subgroup_normal(n) {
            return Err(Error::NotNormal);
        }
        if !self.is_sigma_invariant(n) {
            return Err(Error::NotSigmaInvariant);
        }
        Ok(self.quotient_unchecked(n))
    }

    pub(crate) fn quotient_unchecked(&self, n: &SubgroupSet) -> (SigmaGroup, Vec<Elem>) {
        let mut label = vec![u32::MAX; self.order];
        let mut reps = Vec::with_capacity(self.order / n.len());
        for g in self.elements() {
            if label[g as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as Elem;
            reps.push(g);
            for &x in n.elements() {
                label[self.mul(g, x) as usize] = id;
            }
        }
        let q = reps.len();
        let mut mul = vec![0; q * q];
        for (a, &ra) in reps.iter().enumerate() {
            for (b, &rb) in reps.iter().enumerate() {
                mul[a * q + b] = label[self.mul(ra, rb) as usize];
            }
        }
        let inv = reps.iter().map(|&r| label[self.inv(r) as usize]).collect();
        let sigma = reps.iter().map(|&r| label[self.sigma(r) as usize]).collect();
        let generators = self.generators.iter().map(|&g| label[g as usize]).collect();
        (SigmaGroup::from_trusted_tables(self.p, mul, inv, sigma, generators), label)
    }

    /// All sigma-invariant normal subgroups contained in `within`.
    pub fn sigma_normal_subgroups_within(&self, within: &SubgroupSet) -> Vec<SubgroupSet> {
        let mut found: Vec<SubgroupSet> = vec![self.trivial_subgroup()];
        let mut seen: std::collections::HashSet<SubgroupSet> = found.iter().cloned().collect();
        let mut idx = 0;
        while idx < found.len() {
            let base = found[idx].clone();
            for &x in within.elements() {
                if base.contains(x) {
                    continue;
                }
                let mut s = base.clone();
                self.normal_extend(&mut s, &[x, self.sigma(x)]);
                if seen.insert(s.clone()) {
                    found.push(s);
                }
            }
            idx += 1;
        }
        found
    }
}

pub(crate) fn is_power_of(mut n: u64, p: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

pub(crate) fn log_p(mut n: usize, p: usize) -> u32 {
    let mut e = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0);
        n /= p;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests;
