use super::*;
use crate::magnus::{enumerate_group, DEFAULT_SIZE_CAP};
use crate::word::FreeWord;

fn p3() -> Prime {
    Prime::new(3).unwrap()
}

fn f(n: usize, depth: usize) -> crate::magnus::MagnusGroup {
    enumerate_group(p3(), n, depth, DEFAULT_SIZE_CAP).unwrap()
}

#[test]
fn from_tables_accepts_cyclic() {
    let c = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    let mul: Vec<Elem> = (0..81).map(|k| c.mul(k / 9, k % 9)).collect();
    let sigma: Vec<Elem> = c.elements().map(|a| c.sigma(a)).collect();
    let g = SigmaGroup::from_tables(p3(), mul, sigma, vec![1]).unwrap();
    assert_eq!(g.order(), 9);
    assert!(g.check_associativity());
}

#[test]
fn from_tables_rejects_bad_sigma() {
    let c = SigmaGroup::cyclic(p3(), 3, false).unwrap();
    let mul: Vec<Elem> = (0..9).map(|k| c.mul(k / 3, k % 3)).collect();
    // swapping 0 and 1 is not an automorphism
    assert!(SigmaGroup::from_tables(p3(), mul.clone(), vec![1, 0, 2], vec![1]).is_err());
    assert!(SigmaGroup::from_tables(p3(), mul, vec![0, 1, 2], vec![]).is_err());
}

#[test]
fn parts_examples() {
    let c = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    let (even, odd) = c.parts();
    assert_eq!(even.len(), 1);
    assert_eq!(odd.len(), 9);

    let g = f(2, 3).group;
    let (even, odd) = g.parts();
    assert_eq!((even.len(), odd.len()), (3, 9));

    let t = SigmaGroup::trivial(p3());
    let (even, odd) = t.parts();
    assert_eq!((even.len(), odd), (1, vec![0]));
}

#[test]
fn normal_closure_examples() {
    let m = f(2, 3);
    let g = &m.group;
    assert_eq!(g.normal_closure(&[]).len(), 1);
    let x1 = m.word_to_elem(&FreeWord(vec![1])).unwrap();
    let n = g.normal_closure(&[x1]);
    assert_eq!(n.len(), 9);
    let comm = m.word_to_elem(&FreeWord(vec![1, 2, -1, -2])).unwrap();
    assert!(n.contains(comm));
    let (q, _) = g.quotient(&n).unwrap();
    assert_eq!(q.order(), 3);
    // the commutator is central of order 3
    let z = g.normal_closure(&[comm]);
    assert_eq!(z.len(), 3);
    assert_eq!(z, g.closure(&[comm]));
}

#[test]
fn quotient_examples() {
    let c = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    let (q, _) = c.quotient(&c.trivial_subgroup()).unwrap();
    assert_eq!(q.order(), 9);
    let (q, _) = c.quotient(&c.whole()).unwrap();
    assert_eq!(q.order(), 1);
    let n = c.closure(&[3]);
    let (q, proj) = c.quotient(&n).unwrap();
    assert_eq!(q.order(), 3);
    for b in q.elements() {
        assert_eq!(proj.iter().filter(|&&x| x == b).count(), 3);
    }
    assert!(c.check_fibers(&n).ok());
}

#[test]
fn quotient_rejects_non_normal_and_non_invariant() {
    let g = f(2, 3).group;
    let x1 = g.generators()[0];
    let h = g.closure(&[x1]);
    assert_eq!(g.quotient(&h).unwrap_err(), Error::NotNormal);

    // Z/3 x Z/3 with sigma swapping the factors; the first factor is normal
    // but not sigma-invariant.
    let c = SigmaGroup::cyclic(p3(), 3, false).unwrap();
    let prod = c.direct_product(&c).unwrap();
    let swap: Vec<Elem> = prod.elements().map(|x| (x % 3) * 3 + x / 3).collect();
    let mul: Vec<Elem> = (0..81).map(|k| prod.mul(k / 9, k % 9)).collect();
    let s = SigmaGroup::from_tables(p3(), mul, swap, vec![3, 1]).unwrap();
    let first = s.closure(&[3]);
    assert_eq!(s.quotient(&first).unwrap_err(), Error::NotSigmaInvariant);
}

#[test]
fn dimension_subgroups() {
    let g = f(2, 3).group;
    assert_eq!(g.dimension_subgroup(1), g.whole());
    assert_eq!(g.dimension_subgroup(2), g.frattini());
    assert!(g.dimension_subgroup(3).is_trivial());

    let g = f(2, 4).group;
    assert_eq!(g.dimension_subgroup(2).len(), 2187 / 9);
    assert_eq!(g.dimension_subgroup(3).len(), 81);
    assert!(g.dimension_subgroup(4).is_trivial());
}

#[test]
fn dimension_series_matches_truncation() {
    // |D_i(F_{n,depth})| = |F_{n,depth}| / |F_{n,i}|
    for (n, depth) in [(1, 5), (2, 4)] {
        let g = f(n, depth).group;
        let series = g.dimension_series();
        for (k, d) in series.iter().enumerate() {
            let i = k + 1;
            let expected = if i >= depth {
                1
            } else if i == 1 {
                g.order()
            } else {
                g.order() / f(n, i).group.order()
            };
            assert_eq!(d.len(), expected, "n={n} depth={depth} i={i}");
        }
    }
}

#[test]
fn relation_rank_examples() {
    let m = f(2, 3);
    let g = &m.group;
    assert_eq!(g.relation_rank(&g.trivial_subgroup()).unwrap(), 0);
    let x1 = g.generators()[0];
    assert_eq!(g.relation_rank(&g.normal_closure(&[x1])).unwrap(), 1);
    assert_eq!(g.relation_rank(&g.whole()).unwrap(), 2);
    assert_eq!(g.generator_rank(), 2);
}

#[test]
fn relation_rank_zero_only_for_trivial() {
    let g = f(2, 3).group;
    for n in g.sigma_normal_subgroups_within(&g.whole()) {
        assert_eq!(g.relation_rank(&n).unwrap() == 0, n.is_trivial());
    }
}

#[test]
fn frattini_supplement_is_whole() {
    let g = f(2, 3).group;
    let fr = g.frattini();
    for a in g.elements() {
        for b in g.elements().step_by(5) {
            let mut seeds = vec![a, b];
            seeds.extend_from_slice(fr.gens());
            let h = g.closure(&seeds);
            let h_only = g.closure(&[a, b]);
            if h.len() == g.order() {
                assert_eq!(h_only.len(), g.order());
            }
        }
    }
}

#[test]
fn center_and_lcs() {
    let g = f(2, 3).group;
    assert_eq!(g.center().len(), 3);
    let lcs = g.lower_central_series();
    assert_eq!(lcs[0].len(), 27);
    assert_eq!(lcs[1].len(), 3);
    assert!(lcs.last().unwrap().is_trivial());
}

#[test]
fn even_sigma_representatives() {
    let c = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    for a in c.elements() {
        let w = c.even_sigma_representative(a).unwrap();
        assert_eq!(w.representative, 0);
    }
    let g = f(2, 3).group;
    for a in g.elements() {
        let w = g.even_sigma_representative(a).unwrap();
        assert!(g.is_even(w.representative));
        let x = if w.via_sigma { g.sigma(a) } else { a };
        let c = w.conjugator;
        assert_eq!(g.mul(g.mul(c, x), g.inv(g.sigma(c))), w.representative);
        if g.is_even(a) {
            assert!(g.twisted_class(a).contains(&a));
        }
    }
}

#[test]
fn parity_conjugacy_representatives() {
    let g = f(2, 3).group;
    let mut found = 0;
    for a in g.elements() {
        for sign in [Sign::Plus, Sign::Minus] {
            match g.odd_even_conjugacy_representative(a, sign) {
                Ok(w) => {
                    assert!(g.in_part(w.representative, sign));
                    assert_eq!(g.conj(w.conjugator, a), w.representative);
                    found += 1;
                }
                Err(e) => assert!(matches!(e, Error::PreconditionViolated(_))),
            }
        }
    }
    assert!(found > 0);
    let c = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    for a in c.elements() {
        let w = c.odd_even_conjugacy_representative(a, Sign::Minus).unwrap();
        assert_eq!(w.representative, a);
    }
}

#[test]
fn structural_checks_on_free_quotients() {
    for (n, depth) in [(1, 4), (2, 3), (2, 4)] {
        let g = f(n, depth).group;
        assert!(g.check_product_decomposition().ok());
        assert!(g.check_parity_conjugacy().ok());
        assert!(g.check_semidirect_conjugacy().ok());
        for i in 2..=depth as u32 {
            assert!(g.check_fibers(&g.dimension_subgroup(i)).ok());
        }
    }
}

#[test]
fn sigma_normal_subgroups_of_small_group() {
    let g = f(2, 3).group;
    let subs = g.sigma_normal_subgroups_within(&g.frattini());
    // Fr(F_{2,3}) has order 3, so only {1} and Fr itself occur.
    assert_eq!(g.frattini().len(), 3);
    assert_eq!(subs.len(), 2);
    assert!(subs.iter().any(|s| s.is_trivial()));
    assert!(subs.contains(&g.frattini()));
    for s in &subs {
        assert!(g.is_subgroup_normal(s) && g.is_sigma_invariant(s));
        assert!(g.check_fibers(s).ok());
    }
}
