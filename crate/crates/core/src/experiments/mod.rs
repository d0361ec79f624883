//! Relation-tuple experiments at finite depth: enumerate or sample tuples
//! r in (F_{n,i}^-)^n, classify F_{n,i} / N_r up to sigma-isomorphism and
//! compare class frequencies with the exact predictions.

mod report;
mod sampling;

pub use report::{compare, ClassRecord, Comparison, FrequencyReport, Prediction, Totals};
pub use sampling::{sample_odd, sample_twisted, tally_exhaustive, tally_monte_carlo, QuotientTally, BATCH_SIZE};

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::group::SigmaGroup;
use crate::iso::{sigma_aut_order, sigma_isomorphic, Classifier, IsoClass, DEFAULT_AUT_CAP};
use crate::magnus::{enumerate_group, MagnusGroup, DEFAULT_SIZE_CAP};
use crate::measure::{mu_n_class_count, mu_n_restriction_factor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    MonteCarlo,
}

/// How odd elements are drawn in Monte Carlo mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// uniform index into the list of odd elements
    OddList,
    /// g sigma(g)^{-1} for uniform g
    Twisted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub p: Prime,
    pub n: usize,
    pub depth: usize,
    pub mode: Mode,
    pub sample_count: u64,
    pub master_seed: u64,
    pub sampler: Sampler,
    pub size_cap: u64,
    pub aut_cap: u64,
    /// exhaustive mode refuses more tuples than this
    pub tuple_cap: u64,
}

impl ExperimentSpec {
    pub fn exhaustive(p: Prime, n: usize, depth: usize) -> Self {
        ExperimentSpec {
            p,
            n,
            depth,
            mode: Mode::Exhaustive,
            sample_count: 0,
            master_seed: 0,
            sampler: Sampler::OddList,
            size_cap: DEFAULT_SIZE_CAP,
            aut_cap: DEFAULT_AUT_CAP,
            tuple_cap: 1_000_000,
        }
    }

    pub fn monte_carlo(p: Prime, n: usize, depth: usize, samples: u64, seed: u64, sampler: Sampler) -> Self {
        ExperimentSpec {
            mode: Mode::MonteCarlo,
            sample_count: samples,
            master_seed: seed,
            sampler,
            ..Self::exhaustive(p, n, depth)
        }
    }
}

/// Distinct quotients of a tally grouped into sigma-isomorphism classes.
pub struct ClassTally {
    pub classes: Vec<IsoClass>,
    pub reps: Vec<SigmaGroup>,
    /// class index of each distinct relation subgroup
    pub class_of: Vec<usize>,
    pub counts: Vec<u64>,
}

pub fn classify_tally(t: &QuotientTally) -> ClassTally {
    let mut classifier = Classifier::new();
    let mut class_of = Vec::with_capacity(t.subgroups.len());
    for n in &t.subgroups {
        let (q, _) = t.free.group.quotient_unchecked(n);
        class_of.push(classifier.insert(q));
    }
    let (classes, reps) = classifier.into_parts();
    let mut counts = vec![0u64; classes.len()];
    for (k, &c) in class_of.iter().enumerate() {
        counts[c] += t.counts[k];
    }
    ClassTally { classes, reps, class_of, counts }
}

/// Mod-Frattini quotient totally odd: every even element lies in Fr.
pub fn is_weak_schur_shadow(g: &SigmaGroup) -> bool {
    let fr = g.frattini();
    g.elements().all(|a| !g.is_even(a) || fr.contains(a))
}

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Exact class counts of an exhaustive run at rank `m` and the same depth,
/// for classes with d = m. Used to predict lower-rank classes at rank n.
struct LowerLevel {
    odd_size: BigUint,
    classes: Vec<(SigmaGroup, u64)>,
}

fn lower_level<'a>(
    spec: &ExperimentSpec,
    m: usize,
    cache: &'a mut HashMap<usize, Result<LowerLevel>>,
) -> Result<&'a LowerLevel> {
    if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(m) {
        let value = if m == 0 {
            Ok(LowerLevel { odd_size: BigUint::from(1u32), classes: vec![(SigmaGroup::trivial(spec.p), 1)] })
        } else {
            (|| {
                let free = enumerate_group(spec.p, m, spec.depth, spec.size_cap)?;
                let odd_size = BigUint::from(free.group.odd_elements().len());
                let tally = tally_exhaustive(&free, m, spec.tuple_cap)?;
                let ct = classify_tally(&tally);
                let classes =
                    ct.reps.into_iter().zip(ct.counts).filter(|(g, _)| g.generator_rank() as usize == m).collect();
                Ok(LowerLevel { odd_size, classes })
            })()
        };
        e.insert(value);
    }
    cache[&m].as_ref().map_err(|e| e.clone())
}

/// Runs the experiment and attaches predictions to every class.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<FrequencyReport> {
    let free = enumerate_group(spec.p, spec.n, spec.depth, spec.size_cap)?;
    let tally = match spec.mode {
        Mode::Exhaustive => tally_exhaustive(&free, spec.n, spec.tuple_cap)?,
        Mode::MonteCarlo => tally_monte_carlo(&free, spec.n, spec.sample_count, spec.master_seed, spec.sampler),
    };
    build_report(spec, &free, &tally)
}

pub fn build_report(spec: &ExperimentSpec, free: &MagnusGroup, tally: &QuotientTally) -> Result<FrequencyReport> {
    let ct = classify_tally(tally);
    let f = &free.group;
    let odd_size = BigUint::from(f.odd_elements().len());
    let tuple_space = odd_size.pow(spec.n as u32);
    let mut lower: HashMap<usize, Result<LowerLevel>> = HashMap::new();
    let mut records = Vec::with_capacity(ct.classes.len());

    for (c, class) in ct.classes.iter().enumerate() {
        let rep = &ct.reps[c];
        let d = rep.generator_rank() as usize;
        let first_n = &tally.subgroups[class.representative];
        let m = f.relation_rank(first_n)?;
        // m must not depend on the relation subgroup chosen within the class
        for &k in &class.members {
            let mk = f.relation_rank(&tally.subgroups[k])?;
            if mk != m {
                return Err(Error::Inconsistent(format!("relation rank varies within class {}", class.label)));
            }
        }
        let mut aut_order = None;
        let prediction = if d == spec.n {
            match sigma_aut_order(rep, spec.aut_cap) {
                Ok(a) => {
                    aut_order = Some(a);
                    let count = mu_n_class_count(spec.p, spec.n as u32, &odd_size, m, &BigUint::from(a))?;
                    Prediction::ClassCount { count: rat(BigInt::from(count)) }
                }
                Err(e) => Prediction::Unavailable { reason: e.to_string() },
            }
        } else {
            match lower_level(spec, d, &mut lower) {
                Ok(level) => {
                    let base = level
                        .classes
                        .iter()
                        .find(|(h, _)| sigma_isomorphic(h, rep).is_some())
                        .map(|(_, k)| *k)
                        .unwrap_or(0);
                    let factor = mu_n_restriction_factor(spec.p, spec.n as u32, d as u32)?;
                    let scale =
                        rat(BigInt::from(tuple_space.clone())) / rat(BigInt::from(level.odd_size.pow(d as u32)));
                    Prediction::Restricted { from_rank: d, base_count: base, count: rat(base) * scale * factor }
                }
                Err(e) => Prediction::Unavailable { reason: e.to_string() },
            }
        };
        records.push(ClassRecord::new(
            class.label.clone(),
            rep.order(),
            d,
            ct.counts[c],
            m,
            aut_order,
            prediction,
            &tuple_space,
            tally.total,
            spec.mode,
            is_weak_schur_shadow(rep),
        ));
    }
    records.sort_by(|a, b| (a.order, &a.label).cmp(&(b.order, &b.label)));

    let expected_sum = records.iter().filter_map(|r| r.prediction.count()).fold(BigRational::zero(), |acc, x| acc + x);
    let totals = Totals {
        tuples: tally.total,
        tuple_space: tuple_space.to_string(),
        distinct_subgroups: tally.subgroups.len(),
        classes: records.len(),
        predicted_share: (expected_sum / rat(BigInt::from(tuple_space))).to_f64().unwrap_or(f64::NAN),
        depth: spec.depth,
    };
    Ok(FrequencyReport { spec: spec.clone(), classes: records, totals })
}

/// Per-class counts of two Monte Carlo tallies over the same group, with
/// classes matched by sigma-isomorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerRow {
    pub label: String,
    pub order: usize,
    pub first: u64,
    pub second: u64,
    /// (first - second) / sqrt(2 N q (1 - q)) with q the pooled frequency
    pub sigma_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerAgreement {
    pub samples: u64,
    pub rows: Vec<SamplerRow>,
}

impl SamplerAgreement {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn compare(&self, tolerance_sigma: f64) -> Comparison {
        let failures: Vec<String> = self
            .rows
            .iter()
            .filter(|r| !(r.sigma_dev.abs() <= tolerance_sigma))
            .map(|r| format!("{}: {} vs {} ({:.2} sigma)", r.label, r.first, r.second, r.sigma_dev))
            .collect();
        Comparison { passed: failures.is_empty(), failures }
    }
}

pub fn sampler_agreement(a: &QuotientTally, b: &QuotientTally) -> Result<SamplerAgreement> {
    if a.total != b.total {
        return Err(Error::InvalidArgument("tallies have different sample counts".into()));
    }
    let mut classifier = Classifier::new();
    let mut counts: Vec<[u64; 2]> = Vec::new();
    for (side, t) in [a, b].into_iter().enumerate() {
        for (n, &c) in t.subgroups.iter().zip(&t.counts) {
            let (q, _) = t.free.group.quotient_unchecked(n);
            let k = classifier.insert(q);
            if counts.len() <= k {
                counts.resize(k + 1, [0, 0]);
            }
            counts[k][side] += c;
        }
    }
    let total = a.total as f64;
    let (classes, reps) = classifier.into_parts();
    let mut rows: Vec<SamplerRow> = classes
        .iter()
        .zip(&reps)
        .zip(&counts)
        .map(|((class, rep), &[x, y])| {
            let q = (x + y) as f64 / (2.0 * total);
            let sd = (2.0 * total * q * (1.0 - q)).sqrt();
            let dev = x as f64 - y as f64;
            let sigma_dev = if sd > 0.0 { dev / sd } else { 0.0 };
            SamplerRow { label: class.label.clone(), order: rep.order(), first: x, second: y, sigma_dev }
        })
        .collect();
    rows.sort_by(|x, y| (x.order, &x.label).cmp(&(y.order, &y.label)));
    Ok(SamplerAgreement { samples: a.total, rows })
}

#[cfg(test)]
mod tests;
