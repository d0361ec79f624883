use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Sampler;
use crate::error::{Error, Result};
use crate::group::{Elem, SigmaGroup, SubgroupSet};
use crate::magnus::MagnusGroup;

/// Samples per RNG stream. Batch b draws from stream 2b (odd list) or
/// 2b + 1 (twisted) of ChaCha8 seeded with the master seed, so results do
/// not depend on how batches are spread over threads.
pub const BATCH_SIZE: u64 = 4096;

/// Distinct relation subgroups N_r in order of first appearance, with the
/// number of tuples giving each.
pub struct QuotientTally {
    pub free: MagnusGroup,
    pub subgroups: Vec<SubgroupSet>,
    pub counts: Vec<u64>,
    pub total: u64,
}

#[derive(Default)]
struct Interner {
    index: HashMap<Vec<u64>, usize>,
    subgroups: Vec<SubgroupSet>,
    counts: Vec<u64>,
}

impl Interner {
    fn add(&mut self, n: SubgroupSet, count: u64) {
        match self.index.get(n.bits()) {
            Some(&k) => self.counts[k] += count,
            None => {
                self.index.insert(n.bits().to_vec(), self.subgroups.len());
                self.subgroups.push(n);
                self.counts.push(count);
            }
        }
    }
}

/// Uniform element of G^- from the precomputed odd list.
pub fn sample_odd<R: Rng + ?Sized>(odd: &[Elem], rng: &mut R) -> Elem {
    odd[rng.random_range(0..odd.len())]
}

/// g sigma(g)^{-1} for uniform g; uniform on G^- since the fibres are the
/// cosets of G^+.
pub fn sample_twisted<R: Rng + ?Sized>(g: &SigmaGroup, rng: &mut R) -> Elem {
    let x = rng.random_range(0..g.order()) as Elem;
    g.mul(x, g.inv(g.sigma(x)))
}

/// Every tuple in (G^-)^n.
pub fn tally_exhaustive(free: &MagnusGroup, n: usize, tuple_cap: u64) -> Result<QuotientTally> {
    let g = &free.group;
    let odd = g.odd_elements();
    let space = (odd.len() as u64).checked_pow(n as u32).filter(|&s| s <= tuple_cap);
    let Some(space) = space else {
        return Err(Error::CapExceeded { predicted: format!("{}^{n} tuples", odd.len()), cap: tuple_cap });
    };
    let mut interner = Interner::default();
    let mut idx = vec![0usize; n];
    let mut tuple = vec![0 as Elem; n];
    for _ in 0..space {
        for (t, &i) in tuple.iter_mut().zip(&idx) {
            *t = odd[i];
        }
        interner.add(g.normal_closure(&tuple), 1);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < odd.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(QuotientTally { free: free.clone(), subgroups: interner.subgroups, counts: interner.counts, total: space })
}

/// First tuple and count for each distinct subgroup seen in one batch,
/// keyed by membership bits only to keep batches small.
#[derive(Default)]
struct BatchTally {
    index: HashMap<Vec<u64>, usize>,
    entries: Vec<(Vec<Elem>, u64)>,
}

/// `samples` random tuples, drawn in fixed-size batches on independent streams.
/// Batches are processed in waves and merged in batch order.
pub fn tally_monte_carlo(free: &MagnusGroup, n: usize, samples: u64, seed: u64, sampler: Sampler) -> QuotientTally {
    let g = &free.group;
    let odd = g.odd_elements();
    let batches = samples.div_ceil(BATCH_SIZE);
    let wave = 4 * rayon::current_num_threads() as u64;
    let mut merged = Interner::default();
    let mut start = 0;
    while start < batches {
        let end = (start + wave).min(batches);
        let partial: Vec<BatchTally> = (start..end)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(2 * b + u64::from(sampler == Sampler::Twisted));
                let size = BATCH_SIZE.min(samples - b * BATCH_SIZE);
                let mut local = BatchTally::default();
                let mut tuple = vec![0 as Elem; n];
                for _ in 0..size {
                    for t in tuple.iter_mut() {
                        *t = match sampler {
                            Sampler::OddList => sample_odd(&odd, &mut rng),
                            Sampler::Twisted => sample_twisted(g, &mut rng),
                        };
                    }
                    let bits = g.normal_closure(&tuple).bits().to_vec();
                    match local.index.get(&bits) {
                        Some(&k) => local.entries[k].1 += 1,
                        None => {
                            local.index.insert(bits, local.entries.len());
                            local.entries.push((tuple.clone(), 1));
                        }
                    }
                }
                local
            })
            .collect();
        for part in partial {
            let mut by_slot: Vec<Option<Vec<u64>>> = vec![None; part.entries.len()];
            for (bits, k) in part.index {
                by_slot[k] = Some(bits);
            }
            for ((tuple, count), bits) in part.entries.into_iter().zip(by_slot) {
                let bits = bits.expect("every entry is indexed");
                match merged.index.get(&bits) {
                    Some(&k) => merged.counts[k] += count,
                    None => merged.add(g.normal_closure(&tuple), count),
                }
            }
        }
        start = end;
    }
    QuotientTally { free: free.clone(), subgroups: merged.subgroups, counts: merged.counts, total: samples }
}
