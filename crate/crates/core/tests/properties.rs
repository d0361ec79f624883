use std::sync::OnceLock;

use num_bigint::BigUint;
use proptest::prelude::*;
use schurbench::abelian::AbelianPType;
use schurbench::class_groups::{compose, p_sylow_type, FormClassGroup};
use schurbench::fp::rank_count;
use schurbench::free_subgroups::{rewrite_in_kernel, CyclicKernelBasis};
use schurbench::magnus::{enumerate_group, eval_word, MagnusGroup, DEFAULT_SIZE_CAP};
use schurbench::word::FreeWord;
use schurbench::zassenhaus::zassenhaus_type;
use schurbench::Prime;

fn p3() -> Prime {
    Prime::new(3).unwrap()
}

fn f24() -> &'static MagnusGroup {
    static G: OnceLock<MagnusGroup> = OnceLock::new();
    G.get_or_init(|| enumerate_group(p3(), 2, 4, DEFAULT_SIZE_CAP).unwrap())
}

fn word(n: i32, max_len: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec((1..=n, any::<bool>()), 0..max_len)
        .prop_map(|v| FreeWord(v.into_iter().map(|(j, s)| if s { j } else { -j }).collect()))
}

/// w sigma(w)^{-1} with the exponent sums of w pushed to multiples of p, so
/// the result is odd and lies in the Frattini subgroup.
fn odd_frattini_word(p: i64, n: i32, max_len: usize) -> impl Strategy<Value = FreeWord> {
    word(n, max_len).prop_map(move |w| {
        let mut w = w;
        for j in 1..=n {
            let e = w.exponent_sum(j).rem_euclid(p);
            w = w.concat(&FreeWord::power(j, -e));
        }
        w.concat(&w.sigma().inverse())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_is_an_involution(w in word(3, 20)) {
        prop_assert_eq!(w.sigma().sigma(), w.clone());
        prop_assert_eq!(w.concat(&w.inverse()).reduced(), FreeWord::empty());
    }

    #[test]
    fn evaluation_is_a_homomorphism(u in word(2, 12), v in word(2, 12)) {
        let (p, n, d) = (p3(), 2, 4);
        let uv = eval_word(&u.concat(&v), p, n, d).unwrap();
        prop_assert_eq!(uv, eval_word(&u, p, n, d).unwrap().mul(&eval_word(&v, p, n, d).unwrap()));
        let su = eval_word(&u.sigma(), p, n, d).unwrap();
        prop_assert_eq!(su, eval_word(&u, p, n, d).unwrap().sigma());
    }

    #[test]
    fn truncation_commutes_with_evaluation(w in word(2, 16)) {
        let deep = eval_word(&w, p3(), 2, 5).unwrap();
        prop_assert_eq!(deep.truncate(3), eval_word(&w, p3(), 2, 3).unwrap());
    }

    #[test]
    fn group_table_matches_words(u in word(2, 10), v in word(2, 10)) {
        let f = f24();
        let g = &f.group;
        let (a, b) = (f.word_to_elem(&u).unwrap(), f.word_to_elem(&v).unwrap());
        prop_assert_eq!(f.word_to_elem(&u.concat(&v)).unwrap(), g.mul(a, b));
        prop_assert_eq!(f.word_to_elem(&u.sigma()).unwrap(), g.sigma(a));
        prop_assert_eq!(f.word_to_elem(&u.inverse()).unwrap(), g.inv(a));
    }

    #[test]
    fn twisted_words_are_odd(w in word(2, 12)) {
        let f = f24();
        let t = f.word_to_elem(&w.concat(&w.sigma().inverse())).unwrap();
        prop_assert!(f.group.is_odd(t));
    }

    #[test]
    fn zassenhaus_entries_are_odd(r1 in odd_frattini_word(3, 2, 8), r2 in odd_frattini_word(3, 2, 8)) {
        let t = zassenhaus_type(p3(), 2, &[r1, r2], 4).unwrap();
        let resolved: Vec<u32> = t.resolved().collect();
        prop_assert!(resolved.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(resolved.iter().all(|&d| d >= 3 && d % 2 == 1), "{}", t);
    }

    #[test]
    fn zassenhaus_entries_are_odd_at_five(r in odd_frattini_word(5, 1, 10)) {
        let t = zassenhaus_type(Prime::new(5).unwrap(), 1, &[r], 7).unwrap();
        prop_assert!(t.resolved().all(|d| d >= 3 && d % 2 == 1), "{}", t);
    }

    #[test]
    fn kernel_rewriting_is_additive(u in word(2, 10), v in word(2, 10)) {
        let b = CyclicKernelBasis::new(p3(), 2, 1).unwrap();
        let fix = |w: FreeWord| { let e = w.exponent_sum(1); w.concat(&FreeWord::power(1, -e)) };
        let (u, v) = (fix(u), fix(v));
        let ru = rewrite_in_kernel(&u, &b).unwrap();
        let rv = rewrite_in_kernel(&v, &b).unwrap();
        let ruv = rewrite_in_kernel(&u.concat(&v), &b).unwrap();
        prop_assert_eq!(ruv, ru.iter().zip(&rv).map(|(x, y)| x + y).collect::<Vec<_>>());
    }

    #[test]
    fn composition_is_commutative(m in 3i64..3000, i in 0usize..64, j in 0usize..64) {
        let d = -m;
        prop_assume!(schurbench::class_groups::is_fundamental(d));
        let g = FormClassGroup::new(d).unwrap();
        let f1 = g.forms[i % g.class_number()];
        let f2 = g.forms[j % g.class_number()];
        let c = compose(&f1, &f2).unwrap();
        prop_assert_eq!(c, compose(&f2, &f1).unwrap());
        prop_assert_eq!(c.discriminant(), d);
        prop_assert!(c.is_reduced());
    }

    #[test]
    fn sylow_type_ignores_form_order(m in 3i64..20000, seed in any::<u64>()) {
        let d = -m;
        prop_assume!(schurbench::class_groups::is_fundamental(d));
        let g = FormClassGroup::new(d).unwrap();
        let mut forms = g.forms.clone();
        let len = forms.len();
        for k in (1..len).rev() {
            forms.swap(k, (seed.wrapping_mul(k as u64 + 1) >> 7) as usize % (k + 1));
        }
        let shuffled = FormClassGroup::from_forms(d, forms);
        prop_assert_eq!(p_sylow_type(&g, p3()), p_sylow_type(&shuffled, p3()));
    }

    #[test]
    fn aut_formula_matches_count(parts in prop::collection::vec(1u32..=2, 0..3)) {
        let a = AbelianPType::new(parts);
        let exhaustive = a.aut_order_exhaustive(p3(), 10_000_000).unwrap();
        prop_assert_eq!(a.aut_order(p3()), BigUint::from(exhaustive));
    }
}

#[test]
fn rank_counts_sum_to_all_matrices() {
    for q in [3u32, 5, 7] {
        let p = Prime::new(q).unwrap();
        for n in 0..=4u32 {
            for l in 0..=4u32 {
                let total: BigUint = (0..=n.min(l)).map(|k| rank_count(p, n, l, k).unwrap()).sum();
                assert_eq!(total, BigUint::from(q).pow(n * l));
            }
        }
    }
}
