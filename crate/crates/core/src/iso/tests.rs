use super::*;
use crate::fp::{c_finite, Prime};
use crate::magnus::{enumerate_group, DEFAULT_SIZE_CAP};
use num_bigint::BigInt;
use num_rational::BigRational;

fn p3() -> Prime {
    Prime::new(3).unwrap()
}

fn f(n: usize, depth: usize) -> SigmaGroup {
    enumerate_group(p3(), n, depth, DEFAULT_SIZE_CAP).unwrap().group
}

#[test]
fn self_isomorphism() {
    let g = f(2, 3);
    let phi = sigma_isomorphic(&g, &g).unwrap();
    assert!(verify_sigma_isomorphism(&g, &g, &phi));
}

#[test]
fn cyclic_vs_elementary() {
    let z9 = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    let z3 = SigmaGroup::cyclic(p3(), 3, true).unwrap();
    let e = z3.direct_product(&z3).unwrap();
    assert!(sigma_isomorphic(&z9, &e).is_none());
    // same abstract group, different sigma
    let z3_even = SigmaGroup::cyclic(p3(), 3, false).unwrap();
    assert!(sigma_isomorphic(&z3, &z3_even).is_none());
}

#[test]
fn truncation_functoriality() {
    let g = f(2, 3);
    let big = f(2, 4);
    let (q, _) = big.quotient(&big.dimension_subgroup(3)).unwrap();
    let phi = sigma_isomorphic(&g, &q).unwrap();
    assert!(verify_sigma_isomorphism(&g, &q, &phi));
}

fn free_quotient_aut(n: usize, depth: usize) -> (u64, BigRational) {
    let g = f(n, depth);
    let aut = sigma_aut_order(&g, DEFAULT_AUT_CAP).unwrap();
    let odd = g.odd_elements().len() as i64;
    let predicted = c_finite(p3(), n as u32) * BigRational::from_integer(BigInt::from(odd).pow(n as u32));
    (aut, predicted)
}

#[test]
fn aut_orders_of_free_quotients() {
    for (n, depth, expected) in [(1, 3, 2u64), (1, 4, 6), (2, 3, 48)] {
        let (aut, predicted) = free_quotient_aut(n, depth);
        assert_eq!(aut, expected);
        assert_eq!(BigRational::from_integer(aut.into()), predicted);
    }
    assert_eq!(sigma_aut_order(&SigmaGroup::trivial(p3()), 10).unwrap(), 1);
}

#[test]
fn aut_group_elements_and_closure() {
    let g = f(2, 3);
    let aut = sigma_aut_group(&g, DEFAULT_AUT_CAP).unwrap();
    assert_eq!(aut.order, 48);
    assert!(aut.check_closure(&g, 500));
    for phi in aut.full_maps(&g) {
        assert!(verify_sigma_isomorphism(&g, &g, &phi));
    }
}

#[test]
fn aut_cap() {
    let g = f(2, 3);
    assert!(matches!(sigma_aut_group(&g, 10), Err(Error::CapExceeded { .. })));
}

#[test]
fn classify_quotients_of_z9() {
    let z9 = SigmaGroup::cyclic(p3(), 9, true).unwrap();
    let groups: Vec<SigmaGroup> = z9.elements().map(|a| z9.quotient(&z9.normal_closure(&[a])).unwrap().0).collect();
    let classes = classify(&groups);
    let mut sizes: Vec<(usize, usize)> = classes.iter().map(|c| (c.fingerprint.order, c.members.len())).collect();
    sizes.sort();
    assert_eq!(sizes, vec![(1, 6), (3, 2), (9, 1)]);
}

#[test]
fn labels_are_deterministic() {
    let z3 = SigmaGroup::cyclic(p3(), 3, true).unwrap();
    let a = classify(&[z3.clone(), f(1, 3)]);
    let b = classify(&[f(1, 3), z3]);
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].label, b[0].label);
}

#[test]
fn stabilizer_formula_small() {
    let g = f(2, 3);
    let aut = sigma_aut_group(&g, DEFAULT_AUT_CAP).unwrap();
    let maps = aut.full_maps(&g);
    for h in g.sigma_normal_subgroups_within(&g.frattini()) {
        let (q, _) = g.quotient(&h).unwrap();
        let lhs = stabilizer_order(&maps, &h);
        let h_odd = h.elements().iter().filter(|&&x| g.is_odd(x)).count() as u64;
        let rhs = sigma_aut_order(&q, DEFAULT_AUT_CAP).unwrap() * h_odd.pow(2);
        assert_eq!(lhs, rhs);
    }
}

#[test]
#[ignore = "slow: enumerates 314928 automorphisms"]
fn aut_order_of_f24() {
    let (aut, predicted) = free_quotient_aut(2, 4);
    assert_eq!(BigRational::from_integer(aut.into()), predicted);
}
