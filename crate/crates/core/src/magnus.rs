//! The truncated Magnus representation x_j -> 1 + X_j of the free group in
//! the free associative F_p-algebra modulo monomials of degree >= depth.
//!
//! Units are stored densely: monomials of degree k over n letters are read as
//! base-n numbers and placed after all monomials of smaller degree.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fp::{witt_graded_dims, Prime};
use crate::group::{Elem, SigmaGroup};
use crate::word::FreeWord;

/// Default limit on the order of an enumerated group.
pub const DEFAULT_SIZE_CAP: u64 = 1_000_000;

/// Full multiplication tables are |G|^2 words; beyond this order they no
/// longer fit comfortably in memory.
pub const TABLE_LIMIT: u64 = 6561;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedElement {
    p: u32,
    n: usize,
    depth: usize,
    coeffs: Vec<u32>,
}

/// offsets[k] = number of monomials of degree < k.
fn offsets(n: usize, depth: usize) -> Vec<usize> {
    let mut off = vec![0usize; depth + 1];
    let mut pw = 1usize;
    for k in 0..depth {
        off[k + 1] = off[k] + pw;
        pw *= n;
    }
    off
}

impl TruncatedElement {
    pub fn one(p: Prime, n: usize, depth: usize) -> Self {
        let len = offsets(n, depth)[depth];
        let mut coeffs = vec![0; len];
        coeffs[0] = 1;
        TruncatedElement { p: p.get(), n, depth, coeffs }
    }

    /// 1 + X_j (`j` is 1-based).
    pub fn generator(p: Prime, n: usize, depth: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j as i64, n });
        }
        let mut e = Self::one(p, n, depth);
        if depth > 1 {
            e.coeffs[1 + j - 1] = 1;
        }
        Ok(e)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Coefficient of the monomial X_{w_1} ... X_{w_k} (1-based letters).
    pub fn coeff(&self, monomial: &[usize]) -> u32 {
        if monomial.len() >= self.depth {
            return 0;
        }
        let off = offsets(self.n, self.depth);
        let local = monomial.iter().fold(0usize, |acc, &l| acc * self.n + (l - 1));
        self.coeffs[off[monomial.len()] + local]
    }

    /// Nonzero terms as (monomial, coefficient), by degree then lexicographically.
    pub fn terms(&self) -> Vec<(Vec<usize>, u32)> {
        let off = offsets(self.n, self.depth);
        let mut out = Vec::new();
        for k in 0..self.depth {
            for local in 0..off[k + 1] - off[k] {
                let c = self.coeffs[off[k] + local];
                if c != 0 {
                    let mut m = vec![0; k];
                    let mut x = local;
                    for slot in m.iter_mut().rev() {
                        *slot = x % self.n + 1;
                        x /= self.n;
                    }
                    out.push((m, c));
                }
            }
        }
        out
    }

    fn compatible(&self, other: &Self) {
        assert!(self.p == other.p && self.n == other.n && self.depth == other.depth, "mismatched algebras");
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.compatible(other);
        let (n, depth, p) = (self.n, self.depth, self.p as u64);
        let off = offsets(n, depth);
        let mut acc = vec![0u64; self.coeffs.len()];
        let mut pw = vec![1usize; depth];
        for k in 1..depth {
            pw[k] = pw[k - 1] * n;
        }
        for da in 0..depth {
            for ia in 0..pw[da] {
                let a = self.coeffs[off[da] + ia] as u64;
                if a == 0 {
                    continue;
                }
                for db in 0..depth - da {
                    let base = off[da + db] + ia * pw[db];
                    let src = &other.coeffs[off[db]..off[db] + pw[db]];
                    for (ib, &b) in src.iter().enumerate() {
                        if b != 0 {
                            acc[base + ib] += a * b as u64;
                        }
                    }
                }
            }
            // keep the accumulator small
            if da % 4 == 3 {
                acc.iter_mut().for_each(|x| *x %= p);
            }
        }
        TruncatedElement { p: self.p, n, depth, coeffs: acc.into_iter().map(|x| (x % p) as u32).collect() }
    }

    /// (1 + x)^{-1} = sum_{k < depth} (-x)^k.
    pub fn inverse(&self) -> Self {
        let mut minus_x = self.clone();
        minus_x.coeffs[0] = 0;
        for c in minus_x.coeffs.iter_mut() {
            *c = (self.p - *c) % self.p;
        }
        let mut result = TruncatedElement::one(Prime::new_unchecked(self.p), self.n, self.depth);
        let mut term = result.clone();
        for _ in 1..self.depth {
            term = term.mul(&minus_x);
            result.add_assign(&term);
        }
        result
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = (*a + b) % self.p;
        }
    }

    /// Algebra substitution X_j -> (1 + X_j)^{-1} - 1, which realises
    /// x_j -> x_j^{-1} on group elements.
    pub fn sigma(&self) -> Self {
        let prime = Prime::new_unchecked(self.p);
        let images: Vec<TruncatedElement> = (1..=self.n)
            .map(|j| {
                let mut y = TruncatedElement::generator(prime, self.n, self.depth, j).unwrap().inverse();
                y.coeffs[0] = 0;
                y
            })
            .collect();
        let mut out = TruncatedElement::one(prime, self.n, self.depth);
        out.coeffs[0] = 0;
        for (mono, c) in self.terms() {
            let mut t = TruncatedElement::one(prime, self.n, self.depth);
            for &l in &mono {
                t = t.mul(&images[l - 1]);
            }
            for x in t.coeffs.iter_mut() {
                *x = (*x as u64 * c as u64 % self.p as u64) as u32;
            }
            out.add_assign(&t);
        }
        out
    }

    /// sigma(e) = e^{-1}, checked as sigma(e) e = 1.
    pub fn is_odd(&self) -> bool {
        self.sigma().mul(self).is_one()
    }

    /// Image in the algebra truncated at a smaller depth.
    pub fn truncate(&self, depth: usize) -> Self {
        assert!(depth <= self.depth && depth >= 1);
        let off = offsets(self.n, depth);
        TruncatedElement { p: self.p, n: self.n, depth, coeffs: self.coeffs[..off[depth]].to_vec() }
    }
}

/// Evaluates a word as a unit of the truncated algebra.
pub fn eval_word(w: &FreeWord, p: Prime, n: usize, depth: usize) -> Result<TruncatedElement> {
    w.check_rank(n)?;
    let gens: Vec<TruncatedElement> =
        (1..=n).map(|j| TruncatedElement::generator(p, n, depth, j)).collect::<Result<_>>()?;
    let invs: Vec<TruncatedElement> = gens.iter().map(|g| g.inverse()).collect();
    let mut acc = TruncatedElement::one(p, n, depth);
    for &l in w.letters() {
        let f = if l > 0 { &gens[l as usize - 1] } else { &invs[(-l) as usize - 1] };
        acc = acc.mul(f);
    }
    Ok(acc)
}

/// F_n / D_depth(F_n) enumerated through its Magnus image.
#[derive(Debug, Clone)]
pub struct MagnusGroup {
    pub group: SigmaGroup,
    n: usize,
    depth: usize,
    elements: Vec<TruncatedElement>,
    index: HashMap<Vec<u32>, Elem>,
    /// right multiplication by x_1, x_1^{-1}, ..., x_n, x_n^{-1}
    right: Vec<Elem>,
}

/// Breadth-first closure of {1} under right multiplication by the 2n
/// generator images. The order is checked against the Witt prediction.
pub fn enumerate_group(p: Prime, n: usize, depth: usize, size_cap: u64) -> Result<MagnusGroup> {
    if depth < 2 || n == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and depth >= 2".into()));
    }
    let dims = witt_graded_dims(p, n as u32, depth as u32)?;
    let predicted = dims.order();
    let cap = size_cap.min(TABLE_LIMIT);
    if predicted > num_bigint::BigUint::from(cap) {
        return Err(Error::CapExceeded { predicted: predicted.to_string(), cap });
    }
    let predicted = u64::try_from(&predicted).expect("fits below cap") as usize;

    let mut step = Vec::with_capacity(2 * n);
    for j in 1..=n {
        let g = TruncatedElement::generator(p, n, depth, j)?;
        step.push(g.inverse());
        step.push(g);
    }
    // step = [x1^-1, x1, x2^-1, x2, ...]; reorder to [x1, x1^-1, ...]
    for j in 0..n {
        step.swap(2 * j, 2 * j + 1);
    }

    let one = TruncatedElement::one(p, n, depth);
    let mut index: HashMap<Vec<u32>, Elem> = HashMap::new();
    index.insert(one.coeffs.clone(), 0);
    let mut elements = vec![one];
    let mut parent: Vec<(Elem, usize)> = vec![(0, usize::MAX)];
    let mut right: Vec<Elem> = Vec::new();
    let mut head = 0;
    while head < elements.len() {
        for (s, g) in step.iter().enumerate() {
            let y = elements[head].mul(g);
            let id = match index.get(&y.coeffs) {
                Some(&id) => id,
                None => {
                    let id = elements.len() as Elem;
                    if elements.len() >= predicted {
                        return Err(Error::Inconsistent(format!("closure exceeds the predicted order {predicted}")));
                    }
                    index.insert(y.coeffs.clone(), id);
                    elements.push(y);
                    parent.push((head as Elem, s));
                    id
                }
            };
            right.push(id);
        }
        head += 1;
    }
    if elements.len() != predicted {
        return Err(Error::Inconsistent(format!("closure has {} elements, predicted {predicted}", elements.len())));
    }

    let order = elements.len();
    let k = 2 * n;
    // Row a of the table is filled along the BFS tree: a * (parent s) = (a parent) s.
    let mut mul = vec![0 as Elem; order * order];
    for a in 0..order {
        let row = &mut mul[a * order..(a + 1) * order];
        row[0] = a as Elem;
        for c in 1..order {
            let (par, s) = parent[c];
            let ap = row[par as usize];
            row[c] = right[ap as usize * k + s];
        }
    }
    let mut inv = vec![0 as Elem; order];
    for a in 0..order {
        let pos = mul[a * order..(a + 1) * order].iter().position(|&x| x == 0).expect("group has inverses");
        inv[a] = pos as Elem;
    }
    // sigma(parent * s) = sigma(parent) * s^{-1}; s^{-1} is step s ^ 1.
    let mut sigma = vec![0 as Elem; order];
    for c in 1..order {
        let (par, s) = parent[c];
        sigma[c] = right[sigma[par as usize] as usize * k + (s ^ 1)];
    }
    let generators: Vec<Elem> = (0..n).map(|j| right[2 * j]).collect();
    let group = SigmaGroup::from_trusted_tables(p, mul, inv, sigma, generators);
    Ok(MagnusGroup { group, n, depth, elements, index, right })
}

impl MagnusGroup {
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn element(&self, a: Elem) -> &TruncatedElement {
        &self.elements[a as usize]
    }

    pub fn lookup(&self, e: &TruncatedElement) -> Option<Elem> {
        self.index.get(&e.coeffs).copied()
    }

    /// Index of the image of a word, computed with the generator action table.
    pub fn word_to_elem(&self, w: &FreeWord) -> Result<Elem> {
        w.check_rank(self.n)?;
        let k = 2 * self.n;
        Ok(w.letters().iter().fold(0, |acc, &l| {
            let s = 2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0);
            self.right[acc as usize * k + s]
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn empty_word_is_one() {
        assert!(eval_word(&FreeWord::empty(), p3(), 2, 3).unwrap().is_one());
    }

    #[test]
    fn inverse_generator_series() {
        let e = eval_word(&FreeWord(vec![-1]), p3(), 1, 3).unwrap();
        assert_eq!(e.terms(), vec![(vec![], 1), (vec![1], 2), (vec![1, 1], 1)]);
    }

    #[test]
    fn commutator_in_degree_two() {
        let e = eval_word(&FreeWord(vec![1, 2, -1, -2]), p3(), 2, 3).unwrap();
        assert_eq!(e.terms(), vec![(vec![], 1), (vec![1, 2], 1), (vec![2, 1], 2)]);
    }

    #[test]
    fn out_of_range_letter() {
        assert!(matches!(eval_word(&FreeWord(vec![3]), p3(), 2, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn sigma_on_generators() {
        let x = eval_word(&FreeWord(vec![1]), p3(), 2, 4).unwrap();
        let xi = eval_word(&FreeWord(vec![-1]), p3(), 2, 4).unwrap();
        assert_eq!(x.sigma(), xi);
        assert!(TruncatedElement::one(p3(), 2, 4).sigma().is_one());
    }

    #[test]
    fn oddness_examples() {
        let odd = |w: Vec<i32>| eval_word(&FreeWord(w), p3(), 2, 3).unwrap().is_odd();
        assert!(odd(vec![1]));
        assert!(odd(vec![2]));
        assert!(!odd(vec![1, 2]));
        assert!(odd(vec![1, 2, 1]));
    }

    #[test]
    fn enumerate_small_groups() {
        let g = enumerate_group(p3(), 1, 4, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(g.group.order(), 9);
        assert_eq!(g.group.odd_elements().len(), 9);
        let g = enumerate_group(p3(), 2, 3, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(g.group.order(), 27);
        assert!(g.group.check_associativity());
    }

    #[test]
    fn enumerate_order_2187() {
        let g = enumerate_group(p3(), 2, 4, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(g.group.order(), 2187);
        assert_eq!(g.group.odd_elements().len(), 729);
        assert_eq!(g.group.even_elements().len(), 3);
    }

    #[test]
    fn cap_reports_prediction() {
        match enumerate_group(p3(), 2, 4, 100) {
            Err(Error::CapExceeded { predicted, cap }) => {
                assert_eq!(predicted, "2187");
                assert_eq!(cap, 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn table_sigma_matches_substitution() {
        let g = enumerate_group(p3(), 2, 3, DEFAULT_SIZE_CAP).unwrap();
        for a in g.group.elements() {
            let s = g.element(a).sigma();
            assert_eq!(g.lookup(&s), Some(g.group.sigma(a)));
            assert_eq!(g.element(a).is_odd(), g.group.is_odd(a));
        }
    }

    #[test]
    fn word_lookup_matches_algebra() {
        let g = enumerate_group(p3(), 2, 4, DEFAULT_SIZE_CAP).unwrap();
        let w = FreeWord(vec![1, 2, -1, 2, 2, -2, 1]);
        let e = eval_word(&w, p3(), 2, 4).unwrap();
        assert_eq!(g.lookup(&e), Some(g.word_to_elem(&w).unwrap()));
    }
}
