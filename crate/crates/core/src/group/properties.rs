//! Exact checks of the sigma-structure facts used throughout: constant fibers
//! of G^eps -> (G/N)^eps, the product decomposition G = G^+ G^-, and the
//! parity-constrained conjugacy representatives.

use super::{Elem, SigmaGroup, Sign, SubgroupSet};

/// Outcome of one structural check: how many instances were examined and the
/// first violation if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub instances: usize,
    pub violation: Option<String>,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }

    fn fail(instances: usize, msg: String) -> Self {
        CheckOutcome { instances, violation: Some(msg) }
    }

    fn pass(instances: usize) -> Self {
        CheckOutcome { instances, violation: None }
    }
}

impl SigmaGroup {
    /// For sigma-invariant normal N and each sign: G^eps -> (G/N)^eps is onto
    /// with every fiber of size |N^eps|.
    pub fn check_fibers(&self, n: &SubgroupSet) -> CheckOutcome {
        let (q, proj) = self.quotient_unchecked(n);
        for sign in [Sign::Plus, Sign::Minus] {
            let n_eps = n.elements().iter().filter(|&&x| self.in_part(x, sign)).count();
            let mut fiber = vec![0usize; q.order()];
            for a in self.elements().filter(|&a| self.in_part(a, sign)) {
                let b = proj[a as usize];
                if !q.in_part(b, sign) {
                    return CheckOutcome::fail(1, format!("{a} maps outside the {sign:?} part"));
                }
                fiber[b as usize] += 1;
            }
            for b in q.elements().filter(|&b| q.in_part(b, sign)) {
                if fiber[b as usize] != n_eps {
                    return CheckOutcome::fail(
                        1,
                        format!("{sign:?} fiber over {b} has size {} != |N^eps| = {n_eps}", fiber[b as usize]),
                    );
                }
            }
        }
        CheckOutcome::pass(1)
    }

    /// (a, b) -> ab and (b, a) -> ba from G^+ x G^- to G are bijections.
    pub fn check_product_decomposition(&self) -> CheckOutcome {
        let even = self.even_elements();
        let odd = self.odd_elements();
        if even.len() * odd.len() != self.order() {
            return CheckOutcome::fail(1, format!("|G+| |G-| = {} != {}", even.len() * odd.len(), self.order()));
        }
        for left_even in [true, false] {
            let mut hit = vec![false; self.order()];
            for &a in &even {
                for &b in &odd {
                    let g = if left_even { self.mul(a, b) } else { self.mul(b, a) };
                    if std::mem::replace(&mut hit[g as usize], true) {
                        return CheckOutcome::fail(1, format!("{g} has two decompositions"));
                    }
                }
            }
        }
        CheckOutcome::pass(1)
    }

    /// For every a and eps with sigma(a) ~ a^eps, the conjugates of a lying in
    /// G^eps form one nonempty G^+-orbit.
    pub fn check_parity_conjugacy(&self) -> CheckOutcome {
        let (even, _) = self.parts();
        let mut done = vec![false; self.order()];
        let mut instances = 0;
        for a in self.elements() {
            if done[a as usize] {
                continue;
            }
            let class = self.conjugacy_class(a);
            let mut in_class = vec![false; self.order()];
            for &c in &class {
                done[c as usize] = true;
                in_class[c as usize] = true;
            }
            for sign in [Sign::Plus, Sign::Minus] {
                let target = if sign == Sign::Plus { self.sigma(a) } else { self.inv(self.sigma(a)) };
                if !in_class[target as usize] {
                    continue;
                }
                instances += 1;
                let reps: Vec<Elem> = class.iter().copied().filter(|&c| self.in_part(c, sign)).collect();
                if let Some(v) = single_orbit_violation(self, &even, &reps) {
                    return CheckOutcome::fail(instances, format!("class of {a}, {sign:?}: {v}"));
                }
            }
        }
        CheckOutcome::pass(instances)
    }

    /// For every a, the b in G^+ with b sigma ~ a sigma form one nonempty
    /// G^+-orbit.
    pub fn check_semidirect_conjugacy(&self) -> CheckOutcome {
        let (even, _) = self.parts();
        let mut done = vec![false; self.order()];
        let mut instances = 0;
        for a in self.elements() {
            if done[a as usize] {
                continue;
            }
            instances += 1;
            let class = self.twisted_class(a);
            for &c in &class {
                done[c as usize] = true;
            }
            let reps: Vec<Elem> = class.iter().copied().filter(|&c| self.is_even(c)).collect();
            if let Some(v) = single_orbit_violation(self, &even, &reps) {
                return CheckOutcome::fail(instances, format!("twisted class of {a}: {v}"));
            }
        }
        CheckOutcome::pass(instances)
    }
}

fn single_orbit_violation(g: &SigmaGroup, even: &SubgroupSet, reps: &[Elem]) -> Option<String> {
    let Some(&first) = reps.first() else {
        return Some("no representative of the required parity".into());
    };
    let orbit = g.even_conjugation_orbit(even, first);
    let mut sorted = reps.to_vec();
    sorted.sort_unstable();
    (orbit != sorted).then(|| format!("{} representatives split into several G+-orbits", reps.len()))
}
