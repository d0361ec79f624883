//! The numbered acceptance checks, each run at its stated tolerance and time
//! budget. Used by the `acceptance` test target and `schurbench verify-all`.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::class_groups::{c_infinity_gate, is_fundamental, reduced_forms, survey, FormClassGroup, SurveyFilters};
use crate::experiments::{
    build_report, compare, run_experiment, sample_odd, sampler_agreement, tally_exhaustive, tally_monte_carlo,
    ExperimentSpec, Prediction, Sampler,
};
use crate::fp::{c_finite, rank_count, rank_of_rows, witt_graded_dims, Prime};
use crate::free_subgroups::{character_check, index_formula_check, structure_check, CyclicKernelBasis, RowStatus};
use crate::group::SigmaGroup;
use crate::iso::{sigma_aut_group, sigma_aut_order, stabilizer_order, DEFAULT_AUT_CAP};
use crate::magnus::{enumerate_group, DEFAULT_SIZE_CAP};
use crate::measure::{limit_factor, mu_1_cyclic, mu_inf_cyclic, mu_inf_sch_n, mu_inf_zp, MeasureExpr};

/// Knobs for the slower checks; the defaults are the stated settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceConfig {
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub survey_bound: u64,
    pub random_quotients: usize,
    pub quotient_seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            mc_samples: 100_000,
            mc_seed: 42,
            survey_bound: 1_000_000,
            random_quotients: 100,
            quotient_seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} {} ({:.1} s): {}", self.id, self.name, self.seconds, self.detail)
    }
}

pub const CRITERIA: [(u32, &str, u64); 11] = [
    (1, "rank counts", 10),
    (2, "group orders", 30),
    (3, "sigma-automorphism orders", 120),
    (4, "stabilizer formula", 300),
    (5, "exhaustive n=1 depth 4", 10),
    (6, "exhaustive n=2 depth 3", 600),
    (7, "monte carlo n=2 depth 4", 1800),
    (8, "free subgroup characters", 60),
    (9, "measure identities", 1),
    (10, "class groups", 1200),
    (11, "sigma-structure properties", 1800),
];

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(x: u32) -> Prime {
    Prime::new(x).expect("small odd prime")
}

pub fn run_criterion(id: u32, cfg: &AcceptanceConfig) -> Option<CriterionResult> {
    let &(_, name, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = match id {
        1 => rank_counts(),
        2 => group_orders(),
        3 => aut_orders(),
        4 => stabilizers(),
        5 => exhaustive_rank_one(),
        6 => exhaustive_rank_two(),
        7 => monte_carlo(cfg),
        8 => characters(),
        9 => measures(),
        10 => class_groups(cfg),
        11 => properties(cfg),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > Duration::from_secs(budget) {
        passed = false;
        detail = format!("{detail}; exceeded {budget} s budget");
    }
    Some(CriterionResult { id, name: name.into(), passed, detail, seconds: elapsed.as_secs_f64() })
}

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, cfg)).collect()
}

/// Number of n x l matrices over F_p of each rank, by enumeration.
pub fn brute_rank_counts(p: Prime, n: usize, l: usize) -> Vec<u64> {
    let q = p.get();
    let cells = n * l;
    let mut counts = vec![0u64; n.min(l) + 1];
    let mut entries = vec![0u32; cells];
    loop {
        let rows: Vec<&[u32]> = entries.chunks(l).collect();
        counts[rank_of_rows(p, l, rows)] += 1;
        let mut k = 0;
        loop {
            if k == cells {
                return counts;
            }
            entries[k] += 1;
            if entries[k] < q {
                break;
            }
            entries[k] = 0;
            k += 1;
        }
    }
}

fn rank_counts() -> Check {
    let mut checked = 0;
    for q in [3, 5] {
        for n in 1..=3usize {
            for l in 1..=3usize {
                let brute = brute_rank_counts(p(q), n, l);
                for (k, &b) in brute.iter().enumerate() {
                    let f = rank_count(p(q), n as u32, l as u32, k as u32).map_err(|e| e.to_string())?;
                    ensure(f == BigUint::from(b), || format!("p={q} n={n} l={l} k={k}: formula {f}, brute {b}"))?;
                    checked += 1;
                }
            }
        }
    }
    let small = brute_rank_counts(p(3), 2, 2);
    ensure(small == [1, 32, 48], || format!("p=3 2x2 counts {small:?}"))?;
    Ok(format!("{checked} (p,n,l,k) cases exact; p=3 2x2 gives 1/32/48"))
}

fn group_orders() -> Check {
    let mut parts = Vec::new();
    for (n, i) in [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4)] {
        let dims = witt_graded_dims(p(3), n, i).map_err(|e| e.to_string())?;
        let f = enumerate_group(p(3), n as usize, i as usize, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?;
        let g = &f.group;
        ensure(BigUint::from(g.order()) == dims.order(), || format!("({n},{i}): order {}", g.order()))?;
        let odd = g.odd_elements().len();
        ensure(BigUint::from(odd) == p(3).pow(dims.odd_exponent() as u32), || format!("({n},{i}): |G-| = {odd}"))?;
        parts.push(format!("({n},{i}) {}/{odd}", g.order()));
    }
    Ok(format!("order/|G-|: {}", parts.join(", ")))
}

fn aut_orders() -> Check {
    let mut parts = Vec::new();
    for (n, i, expect) in [(1usize, 3usize, 2u64), (1, 4, 6), (2, 3, 48)] {
        let g = enumerate_group(p(3), n, i, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?.group;
        let aut = sigma_aut_order(&g, DEFAULT_AUT_CAP).map_err(|e| e.to_string())?;
        let odd = BigInt::from(g.odd_elements().len()).pow(n as u32);
        let predicted = c_finite(p(3), n as u32) * BigRational::from_integer(odd);
        ensure(BigRational::from_integer(aut.into()) == predicted && aut == expect, || {
            format!("({n},{i}): |Aut| = {aut}, C_n |G-|^n = {predicted}")
        })?;
        parts.push(format!("({n},{i}) {aut}"));
    }
    Ok(format!("|Aut_sigma| = C_n |G-|^n: {}", parts.join(", ")))
}

fn stabilizers() -> Check {
    let g = enumerate_group(p(3), 2, 3, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?.group;
    let aut = sigma_aut_group(&g, DEFAULT_AUT_CAP).map_err(|e| e.to_string())?;
    let maps = aut.full_maps(&g);
    let subgroups = g.sigma_normal_subgroups_within(&g.frattini());
    for h in &subgroups {
        let (q, _) = g.quotient(h).map_err(|e| e.to_string())?;
        let lhs = stabilizer_order(&maps, h);
        let h_odd = h.elements().iter().filter(|&&x| g.is_odd(x)).count() as u64;
        let rhs = sigma_aut_order(&q, DEFAULT_AUT_CAP).map_err(|e| e.to_string())? * h_odd.pow(2);
        ensure(lhs == rhs, || format!("|H| = {}: stabilizer {lhs} != {rhs}", h.len()))?;
    }
    Ok(format!("{} sigma-invariant normal H in Fr, all exact", subgroups.len()))
}

fn exhaustive_rank_one() -> Check {
    let r = run_experiment(&ExperimentSpec::exhaustive(p(3), 1, 4)).map_err(|e| e.to_string())?;
    let counts: Vec<(usize, u64)> = r.classes.iter().map(|c| (c.order, c.observed)).collect();
    ensure(counts == [(1, 6), (3, 2), (9, 1)], || format!("classes {counts:?}"))?;
    let trivial = &r.classes[0];
    let share = trivial.prediction.count().map(|c| c / BigRational::from_integer(9.into()));
    ensure(share == Some(BigRational::new(2.into(), 3.into())), || format!("trivial share {share:?}"))?;
    let verdict = compare(&r, 0.0);
    ensure(verdict.passed, || verdict.to_string())?;
    Ok("counts 6/2/1 match predictions exactly".into())
}

fn exhaustive_rank_two() -> Check {
    let r = run_experiment(&ExperimentSpec::exhaustive(p(3), 2, 3)).map_err(|e| e.to_string())?;
    let verdict = compare(&r, 0.0);
    ensure(verdict.passed, || verdict.to_string())?;
    let full = r.classes.iter().find(|c| c.order == 27).ok_or("full group class missing")?;
    ensure(full.observed == 1 && full.m == 0, || format!("full group class observed {}", full.observed))?;
    let d2 = r.classes.iter().filter(|c| matches!(c.prediction, Prediction::ClassCount { .. })).count();
    let parts: Vec<String> = r.classes.iter().map(|c| format!("{}:{}", c.order, c.observed)).collect();
    Ok(format!("{} classes ({d2} with d=2) exact over 81 tuples: {}", r.classes.len(), parts.join(" ")))
}

fn monte_carlo(cfg: &AcceptanceConfig) -> Check {
    let free = enumerate_group(p(3), 2, 4, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?;
    let mut tallies = Vec::new();
    let mut notes = Vec::new();
    for sampler in [Sampler::OddList, Sampler::Twisted] {
        let spec = ExperimentSpec::monte_carlo(p(3), 2, 4, cfg.mc_samples, cfg.mc_seed, sampler);
        let tally = tally_monte_carlo(&free, 2, spec.sample_count, spec.master_seed, sampler);
        let report = build_report(&spec, &free, &tally).map_err(|e| e.to_string())?;
        let verdict = compare(&report, 4.0);
        ensure(verdict.passed, || format!("{sampler:?}: {verdict}"))?;
        let worst = report.classes.iter().filter_map(|c| c.sigma_dev).fold(0.0f64, |m, d| m.max(d.abs()));
        notes.push(format!("{sampler:?} {} classes max {worst:.2} sigma", report.classes.len()));
        tallies.push(tally);
    }
    let agreement = sampler_agreement(&tallies[0], &tallies[1]).map_err(|e| e.to_string())?;
    let verdict = agreement.compare(4.0);
    ensure(verdict.passed, || format!("samplers disagree: {verdict}"))?;
    let worst = agreement.rows.iter().fold(0.0f64, |m, r| m.max(r.sigma_dev.abs()));
    Ok(format!(
        "{} samples, seed {}: {}; samplers agree (max {worst:.2} sigma)",
        cfg.mc_samples,
        cfg.mc_seed,
        notes.join("; ")
    ))
}

fn characters() -> Check {
    let mut parts = Vec::new();
    for (n, r) in [(2usize, 1u32), (3, 1), (2, 2)] {
        let b = CyclicKernelBasis::new(p(3), n, r).map_err(|e| e.to_string())?;
        let tag = format!("(3,{n},{r})");
        structure_check(&b).map_err(|e| format!("{tag}: {e}"))?;
        ensure(b.len() == 1 + 3usize.pow(r) * (n - 1), || format!("{tag}: rank {}", b.len()))?;
        let rows = character_check(&b).map_err(|e| e.to_string())?;
        for row in &rows[..3] {
            ensure(row.status == RowStatus::Match, || format!("{tag}: row {} {:?}", row.delta, row))?;
        }
        ensure(rows[3].status == RowStatus::Vacuous, || format!("{tag}: row 4 not vacuous"))?;
        let ix = index_formula_check(&b);
        ensure(ix.ok(), || format!("{tag}: i_N = {}, predicted {}", ix.i_n, ix.predicted))?;
        let v: Vec<String> = rows[..3].iter().map(|r| r.computed.unwrap_or_default().to_string()).collect();
        parts.push(format!("{tag} chi = {} i_N = {}", v.join("/"), ix.i_n));
    }
    Ok(format!("{}; row 4 vacuous", parts.join(", ")))
}

fn measures() -> Check {
    let q = p(3);
    for j in 1..=5 {
        let lhs = limit_factor(q, 1).scale(&mu_1_cyclic(q, j));
        let rhs = mu_inf_cyclic(q, j);
        ensure(lhs == rhs, || format!("j={j}: {lhs} != {rhs}"))?;
    }
    let zp = mu_inf_zp(q);
    ensure(zp.is_zero(), || format!("mu_inf([Z_p]) = {zp}"))?;
    let sum = (0..=6).fold(MeasureExpr::zero(q), |acc, n| acc + mu_inf_sch_n(q, n));
    let approx = sum.approx(1e-12);
    ensure((approx.value - 1.0).abs() < 1e-6, || format!("sum to n=6 is {}", approx.value))?;
    Ok(format!("cyclic limits exact for j<=5; mu_inf([Z_p]) = 0; sum to n=6 = {:.9}", approx.value))
}

fn class_groups(cfg: &AcceptanceConfig) -> Check {
    for (d, h) in [(-3, 1), (-23, 3), (-47, 5), (-71, 7)] {
        let got = reduced_forms(d).map_err(|e| e.to_string())?.len();
        ensure(got == h, || format!("h({d}) = {got}"))?;
    }
    let mut groups = 0;
    for m in 1..=10_000i64 {
        if is_fundamental(-m) {
            FormClassGroup::new(-m).map_err(|e| e.to_string())?.check_group_laws()?;
            groups += 1;
        }
    }
    let (computed, independent) = c_infinity_gate(p(3));
    ensure((computed - independent).abs() < 1e-8, || format!("C_inf {computed} vs product {independent}"))?;
    let (_, report) = survey(p(3), cfg.survey_bound, SurveyFilters::default());
    let t = &report.tally;
    Ok(format!(
        "h = 1,3,5,7; group laws on {groups} discriminants; C_inf = {computed:.10}; survey |D|<={}: trivial 3-part {:.4} vs {:.4} (diff {:+.4}, diagnostic)",
        cfg.survey_bound, t.trivial_observed, t.trivial_predicted, t.trivial_diff
    ))
}

fn structural_suite(g: &SigmaGroup, normals: &[crate::group::SubgroupSet]) -> std::result::Result<usize, String> {
    let mut instances = 0;
    for (name, out) in [
        ("product decomposition", g.check_product_decomposition()),
        ("parity conjugacy", g.check_parity_conjugacy()),
        ("semidirect conjugacy", g.check_semidirect_conjugacy()),
    ] {
        if let Some(v) = out.violation {
            return Err(format!("{name} on order {}: {v}", g.order()));
        }
        instances += out.instances;
    }
    for n in normals {
        let out = g.check_fibers(n);
        if let Some(v) = out.violation {
            return Err(format!("fibers on order {}: {v}", g.order()));
        }
        instances += out.instances;
    }
    Ok(instances)
}

/// Characteristic subgroups, all sigma-invariant and normal.
fn standard_normals(g: &SigmaGroup) -> Vec<crate::group::SubgroupSet> {
    let mut out = g.dimension_series();
    out.extend(g.lower_central_series());
    out.push(g.frattini());
    out.push(g.center());
    out
}

fn properties(cfg: &AcceptanceConfig) -> Check {
    let free = enumerate_group(p(3), 2, 3, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?;
    let tally = tally_exhaustive(&free, 2, 1_000_000).map_err(|e| e.to_string())?;
    let mut instances = structural_suite(&free.group, &tally.subgroups)?;
    for n in &tally.subgroups {
        let (q, _) = free.group.quotient(n).map_err(|e| e.to_string())?;
        let normals = q.sigma_normal_subgroups_within(&q.whole());
        instances += structural_suite(&q, &normals)?;
    }
    let small = tally.subgroups.len();

    let free = enumerate_group(p(3), 2, 4, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?;
    let g = &free.group;
    let odd = g.odd_elements();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.quotient_seed);
    let mut orders = std::collections::BTreeMap::new();
    for _ in 0..cfg.random_quotients {
        let tuple = [sample_odd(&odd, &mut rng), sample_odd(&odd, &mut rng)];
        // single relations give larger quotients than full tuples
        let seeds = if rng.random_bool(0.5) { &tuple[..1] } else { &tuple[..] };
        let n = g.normal_closure(seeds);
        instances += structural_suite(g, std::slice::from_ref(&n))?;
        let (q, _) = g.quotient(&n).map_err(|e| e.to_string())?;
        instances += structural_suite(&q, &standard_normals(&q))?;
        *orders.entry(q.order()).or_insert(0) += 1;
    }
    let spread: Vec<String> = orders.iter().map(|(o, c)| format!("{o}x{c}")).collect();
    Ok(format!(
        "{small} quotients at (3,2,3) with all sigma-normal subgroups, {} at (3,2,4) (orders {}); {instances} instances",
        cfg.random_quotients,
        spread.join(" ")
    ))
}
