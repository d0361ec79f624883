//! Sigma-isomorphism testing, sigma-automorphism enumeration and class
//! labelling.
//!
//! Maps are searched on a parity-typed minimal generating tuple: odd
//! generators must go to odd elements and even ones to even elements of the
//! same order, and the images must stay independent modulo the Frattini
//! subgroup. A complete assignment is accepted when it is consistent along
//! every Cayley edge, which makes it a homomorphism; surjectivity follows from
//! independence mod Frattini and equal orders give bijectivity.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::AbelianPType;
use crate::error::{Error, Result};
use crate::group::{Elem, SigmaGroup, Sign};

/// Default limit on the order of groups whose automorphisms are enumerated.
pub const DEFAULT_AUT_CAP: u64 = 2187;

/// Invariants that every sigma-isomorphism preserves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    pub even_size: usize,
    pub odd_size: usize,
    pub ab_even: AbelianPType,
    pub ab_odd: AbelianPType,
    pub dimension_orders: Vec<usize>,
    /// (element order, parity code, multiplicity)
    pub element_orders: Vec<(u32, char, usize)>,
}

impl Fingerprint {
    pub fn of(g: &SigmaGroup) -> Self {
        let whole = g.whole();
        let derived = g.commutator(&whole, &whole);
        let (ab, _) = g.quotient_unchecked(&derived);
        let ab_part = |sign: Sign| {
            AbelianPType::from_element_orders(
                g.prime(),
                ab.elements().filter(|&a| ab.in_part(a, sign)).map(|a| ab.elem_order(a) as u64),
            )
        };
        let dimension_orders = g.dimension_series().iter().skip(1).map(|d| d.len()).collect();
        let mut counts: BTreeMap<(u32, char), usize> = BTreeMap::new();
        for a in g.elements() {
            *counts.entry((g.elem_order(a), g.parity(a).code())).or_default() += 1;
        }
        Fingerprint {
            order: g.order(),
            even_size: g.even_elements().len(),
            odd_size: g.odd_elements().len(),
            ab_even: ab_part(Sign::Plus),
            ab_odd: ab_part(Sign::Minus),
            dimension_orders,
            element_orders: counts.into_iter().map(|((o, c), m)| (o, c, m)).collect(),
        }
    }

    /// Compact, deterministic text form used as the stem of class labels.
    pub fn serialize(&self) -> String {
        let mut s =
            format!("o{}:e{}:m{}:ab+{}:ab-{}:D", self.order, self.even_size, self.odd_size, self.ab_even, self.ab_odd);
        let dims: Vec<String> = self.dimension_orders.iter().map(|x| x.to_string()).collect();
        s.push_str(&dims.join(","));
        s.push_str(":el");
        for (o, c, m) in &self.element_orders {
            let _ = write!(s, "[{o}{c}{m}]");
        }
        s
    }
}

/// Coordinates of every element in G/Fr(G) over F_p.
#[derive(Debug, Clone)]
struct FrattiniCoords {
    p: u32,
    dim: usize,
    coords: Vec<Vec<u32>>,
}

impl FrattiniCoords {
    fn new(g: &SigmaGroup) -> Self {
        let p = g.prime().get();
        let fr = g.frattini();
        let (q, proj) = g.quotient_unchecked(&fr);
        // span elements of the elementary abelian quotient one basis vector at a time
        let mut qcoords: Vec<Option<Vec<u32>>> = vec![None; q.order()];
        qcoords[0] = Some(Vec::new());
        let mut spanned = vec![0 as Elem];
        let mut dim = 0;
        for b in q.elements() {
            if qcoords[b as usize].is_some() {
                continue;
            }
            dim += 1;
            let mut next = Vec::with_capacity(spanned.len() * p as usize);
            for &s in &spanned {
                let mut x = s;
                let base = qcoords[s as usize].clone().unwrap();
                for j in 0..p {
                    let mut c = base.clone();
                    c.push(j);
                    qcoords[x as usize] = Some(c);
                    next.push(x);
                    x = q.mul(x, b);
                }
            }
            spanned = next;
        }
        let coords = (0..g.order())
            .map(|a| {
                let mut c = qcoords[proj[a] as usize].clone().unwrap();
                c.resize(dim, 0);
                c
            })
            .collect();
        FrattiniCoords { p, dim, coords }
    }

    /// Reduces `v` against an echelon basis; returns the reduced vector.
    fn reduce(&self, basis: &[(usize, Vec<u32>)], v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut v = v.to_vec();
        for (pivot, row) in basis {
            let c = v[*pivot];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - c) * r) % p;
                }
            }
        }
        v
    }

    /// Adds `v` to the echelon basis if independent.
    fn try_extend(&self, basis: &[(usize, Vec<u32>)], v: &[u32]) -> Option<Vec<(usize, Vec<u32>)>> {
        let r = self.reduce(basis, v);
        let pivot = r.iter().position(|&x| x != 0)?;
        let inv = crate::fp::pow_mod(r[pivot], self.p - 2, self.p);
        let row: Vec<u32> = r.iter().map(|&x| x * inv % self.p).collect();
        let mut out: Vec<(usize, Vec<u32>)> = basis
            .iter()
            .map(|(pv, b)| {
                let c = b[pivot];
                let nb = b.iter().zip(&row).map(|(&x, &y)| (x + (self.p - c) * y) % self.p).collect();
                (*pv, nb)
            })
            .collect();
        out.push((pivot, row));
        Some(out)
    }
}

/// A parity-typed minimal generating tuple with its Cayley BFS tree.
#[derive(Debug, Clone)]
struct GenTuple {
    gens: Vec<Elem>,
    /// BFS order of elements and the (parent, generator) edge reaching each
    order: Vec<Elem>,
    parent: Vec<(Elem, u8)>,
}

impl GenTuple {
    fn new(g: &SigmaGroup, fc: &FrattiniCoords) -> Self {
        let mut gens = Vec::new();
        let mut basis: Vec<(usize, Vec<u32>)> = Vec::new();
        let odd_first = g.odd_elements().into_iter().chain(g.even_elements());
        for a in odd_first {
            if gens.len() == fc.dim {
                break;
            }
            if let Some(b) = fc.try_extend(&basis, &fc.coords[a as usize]) {
                basis = b;
                gens.push(a);
            }
        }
        let mut parent = vec![(u32::MAX, 0u8); g.order()];
        parent[0] = (0, 0);
        let mut order = vec![0];
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            for (k, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                if parent[y as usize].0 == u32::MAX {
                    parent[y as usize] = (x, k as u8);
                    order.push(y);
                }
            }
            head += 1;
        }
        debug_assert_eq!(order.len(), g.order());
        GenTuple { gens, order, parent }
    }
}

/// Everything needed to map out of G.
#[derive(Debug, Clone)]
struct Source<'a> {
    g: &'a SigmaGroup,
    tuple: GenTuple,
}

/// Candidate images in H for each generator of G.
struct Target<'a> {
    h: &'a SigmaGroup,
    fc: FrattiniCoords,
    candidates: Vec<Vec<Elem>>,
}

impl<'a> Source<'a> {
    fn new(g: &'a SigmaGroup) -> Self {
        let fc = FrattiniCoords::new(g);
        Source { g, tuple: GenTuple::new(g, &fc) }
    }

    fn target(&self, h: &'a SigmaGroup) -> Target<'a> {
        let fc = FrattiniCoords::new(h);
        let candidates = self
            .tuple
            .gens
            .iter()
            .map(|&s| {
                let odd = self.g.is_odd(s);
                let ord = self.g.elem_order(s);
                h.elements()
                    .filter(|&t| (if odd { h.is_odd(t) } else { h.is_even(t) }) && h.elem_order(t) == ord)
                    .collect()
            })
            .collect();
        Target { h, fc, candidates }
    }

    /// Extends generator images to a full map if it is a homomorphism.
    fn extend(&self, h: &SigmaGroup, images: &[Elem]) -> Option<Vec<Elem>> {
        let mut phi = vec![0 as Elem; self.g.order()];
        for &c in &self.tuple.order[1..] {
            let (par, k) = self.tuple.parent[c as usize];
            phi[c as usize] = h.mul(phi[par as usize], images[k as usize]);
        }
        for &x in &self.tuple.order {
            let fx = phi[x as usize];
            for (k, &s) in self.tuple.gens.iter().enumerate() {
                if phi[self.g.mul(x, s) as usize] != h.mul(fx, images[k]) {
                    return None;
                }
            }
        }
        Some(phi)
    }

    /// Depth-first search over candidate images with the first generator's
    /// candidate fixed; `visit` returns false to stop.
    fn search_from(&self, t: &Target<'_>, first: Elem, visit: &mut dyn FnMut(&[Elem], Vec<Elem>) -> bool) -> bool {
        let Some(basis) = t.fc.try_extend(&[], &t.fc.coords[first as usize]) else {
            return true;
        };
        let mut images = vec![first];
        self.dfs(t, &mut images, basis, visit)
    }

    fn dfs(
        &self,
        t: &Target<'_>,
        images: &mut Vec<Elem>,
        basis: Vec<(usize, Vec<u32>)>,
        visit: &mut dyn FnMut(&[Elem], Vec<Elem>) -> bool,
    ) -> bool {
        let k = images.len();
        if k == self.tuple.gens.len() {
            if let Some(phi) = self.extend(t.h, images) {
                return visit(images, phi);
            }
            return true;
        }
        for &c in &t.candidates[k] {
            if let Some(b) = t.fc.try_extend(&basis, &t.fc.coords[c as usize]) {
                images.push(c);
                let go_on = self.dfs(t, images, b, visit);
                images.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// Checks phi(gh) = phi(g)phi(h) and phi(sigma g) = sigma phi(g) for all g, h,
/// and bijectivity.
pub fn verify_sigma_isomorphism(g: &SigmaGroup, h: &SigmaGroup, phi: &[Elem]) -> bool {
    if g.order() != h.order() || phi.len() != g.order() {
        return false;
    }
    let mut hit = vec![false; h.order()];
    for &y in phi {
        if (y as usize) >= h.order() || std::mem::replace(&mut hit[y as usize], true) {
            return false;
        }
    }
    g.elements().all(|a| {
        phi[g.sigma(a) as usize] == h.sigma(phi[a as usize])
            && g.elements().all(|b| phi[g.mul(a, b) as usize] == h.mul(phi[a as usize], phi[b as usize]))
    })
}

/// A sigma-isomorphism G -> H as an index map, or None.
pub fn sigma_isomorphic(g: &SigmaGroup, h: &SigmaGroup) -> Option<Vec<Elem>> {
    if g.prime() != h.prime() || g.order() != h.order() {
        return None;
    }
    if g.order() == 1 {
        return Some(vec![0]);
    }
    if Fingerprint::of(g) != Fingerprint::of(h) {
        return None;
    }
    sigma_isomorphic_unchecked(g, h)
}

/// Search without fingerprint pruning (used when fingerprints already agree).
pub(crate) fn sigma_isomorphic_unchecked(g: &SigmaGroup, h: &SigmaGroup) -> Option<Vec<Elem>> {
    if g.order() == 1 {
        return (h.order() == 1).then(|| vec![0]);
    }
    let src = Source::new(g);
    let tgt = src.target(h);
    if FrattiniCoords::new(h).dim != src.tuple.gens.len() {
        return None;
    }
    let found = tgt.candidates[0].par_iter().find_map_first(|&first| {
        let mut result = None;
        src.search_from(&tgt, first, &mut |_, phi| {
            result = Some(phi);
            false
        });
        result
    })?;
    assert!(verify_sigma_isomorphism(g, h, &found), "search produced an invalid witness");
    Some(found)
}

/// All sigma-automorphisms, stored as images of a fixed generating tuple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaAutGroup {
    pub order: u64,
    pub generators: Vec<Elem>,
    pub elements: Vec<Vec<Elem>>,
}

impl SigmaAutGroup {
    /// Full index map of the automorphism with the given generator images.
    pub fn full_map(&self, g: &SigmaGroup, images: &[Elem]) -> Vec<Elem> {
        let src = Source::new(g);
        debug_assert_eq!(src.tuple.gens, self.generators);
        src.extend(g, images).expect("stored tuple defines an automorphism")
    }

    /// All automorphisms as full maps.
    pub fn full_maps(&self, g: &SigmaGroup) -> Vec<Vec<Elem>> {
        let src = Source::new(g);
        self.elements.iter().map(|im| src.extend(g, im).expect("automorphism")).collect()
    }

    /// Closure under composition on sampled pairs: (a o b) restricted to the
    /// generators must be a stored tuple.
    pub fn check_closure(&self, g: &SigmaGroup, samples: usize) -> bool {
        let maps = if self.elements.len() <= 4096 { Some(self.full_maps(g)) } else { None };
        let src = Source::new(g);
        let set: std::collections::HashSet<&Vec<Elem>> = self.elements.iter().collect();
        let n = self.elements.len();
        (0..samples.min(n * n)).all(|s| {
            let (i, j) = ((s * 7919) % n, (s * 104729 + 13) % n);
            let fa = match &maps {
                Some(m) => m[i].clone(),
                None => src.extend(g, &self.elements[i]).unwrap(),
            };
            let composed: Vec<Elem> = self.elements[j].iter().map(|&x| fa[x as usize]).collect();
            set.contains(&composed)
        })
    }
}

/// Enumerates Aut_sigma(G). Errors when |G| exceeds `cap`.
pub fn sigma_aut_group(g: &SigmaGroup, cap: u64) -> Result<SigmaAutGroup> {
    if g.order() as u64 > cap {
        return Err(Error::CapExceeded { predicted: g.order().to_string(), cap });
    }
    if g.order() == 1 {
        return Ok(SigmaAutGroup { order: 1, generators: vec![], elements: vec![vec![]] });
    }
    let src = Source::new(g);
    let tgt = src.target(g);
    let elements: Vec<Vec<Elem>> = tgt.candidates[0]
        .par_iter()
        .flat_map_iter(|&first| {
            let mut found = Vec::new();
            src.search_from(&tgt, first, &mut |images, _| {
                found.push(images.to_vec());
                true
            });
            found
        })
        .collect();
    Ok(SigmaAutGroup { order: elements.len() as u64, generators: src.tuple.gens.clone(), elements })
}

/// |Aut_sigma(G)| without storing the automorphisms.
pub fn sigma_aut_order(g: &SigmaGroup, cap: u64) -> Result<u64> {
    if g.order() as u64 > cap {
        return Err(Error::CapExceeded { predicted: g.order().to_string(), cap });
    }
    if g.order() == 1 {
        return Ok(1);
    }
    let src = Source::new(g);
    let tgt = src.target(g);
    Ok(tgt.candidates[0]
        .par_iter()
        .map(|&first| {
            let mut count = 0u64;
            src.search_from(&tgt, first, &mut |_, _| {
                count += 1;
                true
            });
            count
        })
        .sum())
}

/// One sigma-isomorphism class within a classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoClass {
    pub label: String,
    pub fingerprint: Fingerprint,
    /// index (into the classifier's input order) of the first member
    pub representative: usize,
    pub members: Vec<usize>,
}

/// Incremental classifier: groups are bucketed by fingerprint and refined by
/// explicit isomorphism search. Labels are the fingerprint text plus a
/// disambiguation index in order of first appearance within the bucket.
#[derive(Default)]
pub struct Classifier {
    reps: Vec<SigmaGroup>,
    classes: Vec<IsoClass>,
    buckets: HashMap<Fingerprint, Vec<usize>>,
    seen: usize,
}

impl Classifier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a group and returns its class index.
    pub fn insert(&mut self, g: SigmaGroup) -> usize {
        let fp = Fingerprint::of(&g);
        self.insert_with_fingerprint(g, fp)
    }

    pub fn insert_with_fingerprint(&mut self, g: SigmaGroup, fp: Fingerprint) -> usize {
        let idx = self.seen;
        self.seen += 1;
        let bucket = self.buckets.entry(fp.clone()).or_default();
        for &c in bucket.iter() {
            if sigma_isomorphic_unchecked(&self.reps[c], &g).is_some() {
                self.classes[c].members.push(idx);
                return c;
            }
        }
        let c = self.classes.len();
        let label = format!("{}#{}", fp.serialize(), bucket.len());
        bucket.push(c);
        self.classes.push(IsoClass { label, fingerprint: fp, representative: idx, members: vec![idx] });
        self.reps.push(g);
        c
    }

    pub fn classes(&self) -> &[IsoClass] {
        &self.classes
    }

    pub fn representative(&self, class: usize) -> &SigmaGroup {
        &self.reps[class]
    }

    pub fn into_parts(self) -> (Vec<IsoClass>, Vec<SigmaGroup>) {
        (self.classes, self.reps)
    }
}

/// Partitions `groups` into sigma-isomorphism classes.
pub fn classify(groups: &[SigmaGroup]) -> Vec<IsoClass> {
    let mut c = Classifier::new();
    for g in groups {
        c.insert(g.clone());
    }
    c.classes
}

/// |Stab(H)| in Aut_sigma(G) for a sigma-invariant normal subgroup H.
pub fn stabilizer_order(maps: &[Vec<Elem>], h: &crate::group::SubgroupSet) -> u64 {
    maps.iter().filter(|phi| h.gens().iter().all(|&x| h.contains(phi[x as usize]))).count() as u64
}

#[cfg(test)]
mod tests;
