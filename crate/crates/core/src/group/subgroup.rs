use std::hash::{Hash, Hasher};

use super::Elem;

/// A subgroup stored as a membership bitset plus its element list and the
/// generators used to build it.
#[derive(Clone, Debug)]
pub struct SubgroupSet {
    bits: Vec<u64>,
    elems: Vec<Elem>,
    gens: Vec<Elem>,
}

impl SubgroupSet {
    pub(crate) fn trivial(order: usize) -> Self {
        let mut bits = vec![0u64; order.div_ceil(64)];
        bits[0] = 1;
        SubgroupSet { bits, elems: vec![0], gens: Vec::new() }
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        let a = a as usize;
        self.bits[a >> 6] >> (a & 63) & 1 == 1
    }

    #[inline]
    pub(crate) fn insert(&mut self, a: Elem) -> bool {
        let i = a as usize;
        let w = &mut self.bits[i >> 6];
        let m = 1u64 << (i & 63);
        if *w & m != 0 {
            return false;
        }
        *w |= m;
        self.elems.push(a);
        true
    }

    pub(crate) fn push_gen(&mut self, g: Elem) {
        self.gens.push(g);
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_trivial(&self) -> bool {
        self.elems.len() == 1
    }

    /// Elements in insertion order.
    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn sorted_elements(&self) -> Vec<Elem> {
        let mut v = self.elems.clone();
        v.sort_unstable();
        v
    }

    pub fn gens(&self) -> &[Elem] {
        &self.gens
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn is_subset_of(&self, other: &SubgroupSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

impl PartialEq for SubgroupSet {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl Eq for SubgroupSet {}

impl Hash for SubgroupSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}
