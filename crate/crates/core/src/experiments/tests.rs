use super::*;
use crate::magnus::enumerate_group;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p3() -> Prime {
    Prime::new(3).unwrap()
}

fn counts_by_order(r: &FrequencyReport) -> Vec<(usize, u64)> {
    r.classes.iter().map(|c| (c.order, c.observed)).collect()
}

#[test]
fn odd_sampler_is_uniform_on_z9() {
    let z9 = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    let odd = z9.odd_elements();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 100_000u64;
    let mut hist = [0u64; 9];
    for _ in 0..n {
        hist[sample_odd(&odd, &mut rng) as usize] += 1;
    }
    let q = 1.0 / 9.0;
    let sd = (n as f64 * q * (1.0 - q)).sqrt();
    for h in hist {
        assert!((h as f64 - n as f64 * q).abs() <= 4.0 * sd);
    }
}

#[test]
fn samplers_return_odd_elements() {
    let g = enumerate_group(p3(), 2, 3, DEFAULT_SIZE_CAP).unwrap().group;
    let odd = g.odd_elements();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        assert!(g.is_odd(sample_odd(&odd, &mut rng)));
        assert!(g.is_odd(sample_twisted(&g, &mut rng)));
    }
    let t = SigmaGroup::trivial(p3());
    assert_eq!(sample_odd(&t.odd_elements(), &mut rng), 0);
}

#[test]
fn exhaustive_rank_one() {
    let r = run_experiment(&ExperimentSpec::exhaustive(p3(), 1, 4)).unwrap();
    assert_eq!(counts_by_order(&r), vec![(1, 6), (3, 2), (9, 1)]);
    assert_eq!(r.observed_sum(), 9);
    let cmp = compare(&r, 4.0);
    assert!(cmp.passed, "{cmp}");
    let trivial = &r.classes[0];
    assert_eq!(
        trivial.prediction,
        Prediction::Restricted { from_rank: 0, base_count: 1, count: BigRational::from_integer(6.into()) }
    );
}

#[test]
fn exhaustive_rank_two_depth_three() {
    let r = run_experiment(&ExperimentSpec::exhaustive(p3(), 2, 3)).unwrap();
    assert_eq!(r.observed_sum(), 81);
    let full = r.classes.iter().find(|c| c.order == 27).unwrap();
    assert_eq!((full.observed, full.m, full.aut_order), (1, 0, Some(48)));
    let cmp = compare(&r, 4.0);
    assert!(cmp.passed, "{cmp}");
    assert!(r.classes.iter().all(|c| c.weak_schur));
}

#[test]
fn compare_detects_off_by_one() {
    let mut r = run_experiment(&ExperimentSpec::exhaustive(p3(), 1, 4)).unwrap();
    r.classes[1].observed += 1;
    let cmp = compare(&r, 4.0);
    assert!(!cmp.passed);
    assert!(cmp.failures[0].starts_with(&r.classes[1].label));
}

#[test]
fn compare_bound_is_inclusive() {
    let spec = ExperimentSpec::monte_carlo(p3(), 1, 4, 100, 0, Sampler::OddList);
    let free = enumerate_group(p3(), 1, 4, DEFAULT_SIZE_CAP).unwrap();
    let tally = tally_monte_carlo(&free, 1, 100, 0, Sampler::OddList);
    let mut r = build_report(&spec, &free, &tally).unwrap();
    // q = 1/2 and N = 100 give sd = 5 exactly; 60 observed is 2 sigma out
    r.classes.truncate(1);
    r.classes[0].probability = Some(0.5);
    r.classes[0].observed = 60;
    assert!(compare(&r, 2.0).passed);
    assert!(!compare(&r, 1.999).passed);
}

#[test]
fn monte_carlo_is_deterministic_across_thread_counts() {
    let spec = ExperimentSpec::monte_carlo(p3(), 2, 3, 10_000, 42, Sampler::OddList);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_experiment(&spec).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    assert_eq!(a.observed_sum(), 10_000);
}

#[test]
fn report_json_roundtrip() {
    let r = run_experiment(&ExperimentSpec::exhaustive(p3(), 1, 4)).unwrap();
    assert_eq!(FrequencyReport::from_json(&r.to_json()).unwrap(), r);
    assert!(r.to_text().contains("order"));
}

#[test]
fn exhaustive_cap() {
    let mut spec = ExperimentSpec::exhaustive(p3(), 2, 3);
    spec.tuple_cap = 10;
    assert!(matches!(run_experiment(&spec), Err(Error::CapExceeded { .. })));
}
