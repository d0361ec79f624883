//! Finite abelian p-groups described by partitions.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::fp::{rank_of_rows, Prime};

/// Z/p^{nu_1} + Z/p^{nu_2} + ... with nu_1 >= nu_2 >= ... >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct AbelianPType {
    pub partition: Vec<u32>,
}

impl AbelianPType {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        AbelianPType { partition: parts }
    }

    pub fn trivial() -> Self {
        AbelianPType::default()
    }

    pub fn is_trivial(&self) -> bool {
        self.partition.is_empty()
    }

    pub fn log_order(&self) -> u32 {
        self.partition.iter().sum()
    }

    /// Recovers the type from the multiset of element orders (each a power
    /// of p): log_p |A[p^k]| - log_p |A[p^{k-1}]| = #{i : nu_i >= k}.
    pub fn from_element_orders(p: Prime, orders: impl IntoIterator<Item = u64>) -> Self {
        let p = p.get() as u64;
        let mut by_exp: Vec<u64> = Vec::new();
        for o in orders {
            let mut e = 0usize;
            let mut x = o;
            while x > 1 {
                debug_assert_eq!(x % p, 0);
                x /= p;
                e += 1;
            }
            if by_exp.len() <= e {
                by_exp.resize(e + 1, 0);
            }
            by_exp[e] += 1;
        }
        let mut cumulative = 0u64;
        let mut logs = Vec::new();
        for c in &by_exp {
            cumulative += c;
            logs.push(log_exact(cumulative, p));
        }
        let jumps: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        // conjugate partition of the jump sequence
        let len = jumps.first().copied().unwrap_or(0);
        let parts = (1..=len).map(|i| jumps.iter().filter(|&&j| j >= i).count() as u32).collect();
        AbelianPType::new(parts)
    }

    /// |Aut(A)| by the closed formula of Hillar and Rhea.
    pub fn aut_order(&self, p: Prime) -> BigUint {
        let e: Vec<u32> = {
            let mut v = self.partition.clone();
            v.sort_unstable();
            v
        };
        let n = e.len();
        let pb = BigUint::from(p.get());
        let pw = |k: u64| pb.pow(k as u32);
        let mut total = BigUint::one();
        for k in 0..n {
            let d = (0..n).filter(|&l| e[l] == e[k]).max().unwrap() + 1;
            let c = (0..n).filter(|&l| e[l] == e[k]).min().unwrap() + 1;
            total *= pw(d as u64) - pw(k as u64);
            total *= pw(e[k] as u64 * (n - d) as u64);
            total *= pw((e[k] as u64 - 1) * (n - c + 1) as u64);
        }
        total
    }

    /// |Aut(A)| by counting generator images: z_i (of order p^{nu_i}) may go
    /// to any element of A[p^{nu_i}], and the map is bijective iff the images
    /// span A/pA. Returns None when the search space exceeds `limit`.
    pub fn aut_order_exhaustive(&self, p: Prime, limit: u64) -> Option<u64> {
        let q = p.get() as u64;
        let parts = &self.partition;
        let k = parts.len();
        let order: u64 = parts.iter().try_fold(1u64, |acc, &nu| acc.checked_mul(q.checked_pow(nu)?))?;
        // elements as mixed-radix coordinate vectors
        let elems: Vec<Vec<u64>> = (0..order)
            .map(|mut x| {
                parts
                    .iter()
                    .map(|&nu| {
                        let m = q.pow(nu);
                        let c = x % m;
                        x /= m;
                        c
                    })
                    .collect()
            })
            .collect();
        let pure_order = |v: &Vec<u64>| -> u32 {
            v.iter()
                .zip(parts)
                .map(|(&c, &nu)| {
                    let mut e = nu;
                    let mut c = c;
                    while c != 0 && c % q == 0 {
                        c /= q;
                        e -= 1;
                    }
                    if c == 0 {
                        0
                    } else {
                        e
                    }
                })
                .max()
                .unwrap_or(0)
        };
        let candidates: Vec<Vec<&Vec<u64>>> =
            parts.iter().map(|&nu| elems.iter().filter(|v| pure_order(v) <= nu).collect()).collect();
        let space = candidates.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))?;
        if space > limit {
            return None;
        }
        let mut count = 0u64;
        let mut idx = vec![0usize; k];
        if k == 0 {
            return Some(1);
        }
        loop {
            let rows: Vec<Vec<u32>> =
                (0..k).map(|i| candidates[i][idx[i]].iter().map(|&c| (c % q) as u32).collect()).collect();
            if rank_of_rows(p, k, rows.iter().map(|r| r.as_slice())) == k {
                count += 1;
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    return Some(count);
                }
                idx[pos] += 1;
                if idx[pos] < candidates[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn aut_order_u64(&self, p: Prime) -> Option<u64> {
        self.aut_order(p).to_u64()
    }
}

impl std::fmt::Display for AbelianPType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.partition.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn log_exact(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        n /= p;
        e += 1;
    }
    e
}
