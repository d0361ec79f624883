//! Kernels of the cyclic quotients F_n -> Z/p^r (x_1 -> 1, x_j -> 0 for
//! j >= 2), their Schreier bases, and the action of conjugation and sigma on
//! the abelianized kernel.
//!
//! Basis symbol 0 is x_1^{p^r}; symbol 1 + (j-2) p^r + i is x_1^i x_j x_1^{-i}.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::word::FreeWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicKernelBasis {
    pub p: Prime,
    pub n: usize,
    pub r: u32,
    /// p^r, the index of the kernel
    pub index: usize,
}

impl CyclicKernelBasis {
    pub fn new(p: Prime, n: usize, r: u32) -> Result<Self> {
        if n == 0 || r == 0 {
            return Err(Error::InvalidArgument("need n >= 1 and r >= 1".into()));
        }
        let index = p
            .pow_u64(r)
            .filter(|&q| q <= 1 << 16)
            .ok_or_else(|| Error::InvalidArgument(format!("{}^{r} is too large", p.get())))?;
        Ok(CyclicKernelBasis { p, n, r, index: index as usize })
    }

    /// 1 + p^r (n - 1)
    pub fn len(&self) -> usize {
        1 + self.index * (self.n - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn symbol(&self, j: usize, i: usize) -> usize {
        1 + (j - 2) * self.index + i
    }

    /// The basis element with index k as a word.
    pub fn word(&self, k: usize) -> FreeWord {
        if k == 0 {
            return FreeWord::power(1, self.index as i64);
        }
        let j = (k - 1) / self.index + 2;
        let i = ((k - 1) % self.index) as i64;
        FreeWord::power(1, i).concat(&FreeWord::power(j as i32, 1)).concat(&FreeWord::power(1, -i))
    }

    /// Coset of x_1^{p^r} Z containing w.
    pub fn coset(&self, w: &FreeWord) -> usize {
        w.exponent_sum(1).rem_euclid(self.index as i64) as usize
    }
}

/// Reidemeister-Schreier rewriting with transversal x_1^i, abelianized to
/// exponents over the basis.
pub fn rewrite_in_kernel(w: &FreeWord, basis: &CyclicKernelBasis) -> Result<Vec<i64>> {
    w.check_rank(basis.n)?;
    if basis.coset(w) != 0 {
        return Err(Error::NotInKernel(w.to_string()));
    }
    let q = basis.index;
    let mut out = vec![0i64; basis.len()];
    let mut c = 0usize;
    for &l in w.letters() {
        let j = l.unsigned_abs() as usize;
        if j == 1 {
            if l > 0 {
                if c == q - 1 {
                    out[0] += 1;
                }
                c = (c + 1) % q;
            } else {
                if c == 0 {
                    out[0] -= 1;
                }
                c = (c + q - 1) % q;
            }
        } else {
            out[basis.symbol(j, c)] += l.signum() as i64;
        }
    }
    Ok(out)
}

/// Dense square integer matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub size: usize,
    pub entries: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(size: usize) -> Self {
        let mut entries = vec![0; size * size];
        for k in 0..size {
            entries[k * size + k] = 1;
        }
        IntMatrix { size, entries }
    }

    fn from_columns(cols: Vec<Vec<i64>>) -> Self {
        let size = cols.len();
        let mut entries = vec![0; size * size];
        for (c, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                entries[r * size + c] = v;
            }
        }
        IntMatrix { size, entries }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.size + c]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let s = self.size;
        let mut entries = vec![0; s * s];
        for r in 0..s {
            for k in 0..s {
                let a = self.get(r, k);
                if a != 0 {
                    for c in 0..s {
                        entries[r * s + c] += a * other.get(k, c);
                    }
                }
            }
        }
        IntMatrix { size: s, entries }
    }

    pub fn pow(&self, e: usize) -> IntMatrix {
        (0..e).fold(IntMatrix::identity(self.size), |acc, _| acc.mul(self))
    }

    pub fn trace(&self) -> i64 {
        (0..self.size).map(|k| self.get(k, k)).sum()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.size)
    }
}

/// Matrices of conjugation by each x_j and of sigma on N_ab.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianizedAction {
    pub basis: CyclicKernelBasis,
    /// conj[j - 1] is b -> x_j b x_j^{-1}
    pub conj: Vec<IntMatrix>,
    pub sigma: IntMatrix,
}

impl AbelianizedAction {
    /// Action of conjugation by an arbitrary word.
    pub fn conj_by(&self, g: &FreeWord) -> Result<IntMatrix> {
        conjugation_matrix(&self.basis, g)
    }
}

fn conjugation_matrix(basis: &CyclicKernelBasis, g: &FreeWord) -> Result<IntMatrix> {
    g.check_rank(basis.n)?;
    let gi = g.inverse();
    let cols = (0..basis.len())
        .map(|k| rewrite_in_kernel(&g.concat(&basis.word(k)).concat(&gi), basis))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_columns(cols))
}

pub fn action_matrices(basis: &CyclicKernelBasis) -> AbelianizedAction {
    let conj = (1..=basis.n)
        .map(|j| conjugation_matrix(basis, &FreeWord::power(j as i32, 1)).expect("basis words lie in the kernel"))
        .collect();
    let cols = (0..basis.len())
        .map(|k| rewrite_in_kernel(&basis.word(k).sigma(), basis).expect("sigma preserves the kernel"))
        .collect();
    AbelianizedAction { basis: *basis, conj, sigma: IntMatrix::from_columns(cols) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Match,
    Mismatch,
    /// no element of the required kind exists
    Vacuous,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Match => "match",
            RowStatus::Mismatch => "MISMATCH",
            RowStatus::Vacuous => "vacuous",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRow {
    pub delta: String,
    pub computed: Option<i64>,
    pub predicted: Option<i64>,
    /// chi_0 + (d+ - 1) chi_+ + d- chi_- at this row
    pub module_side: Option<i64>,
    pub status: RowStatus,
}

/// Fixed points of x -> -x on Z/p^r, i.e. |(G/N)^+|.
fn quotient_even_count(basis: &CyclicKernelBasis) -> i64 {
    let q = basis.index;
    (0..q).filter(|&x| (q - x) % q == x).count() as i64
}

/// Character table rows for 1, [a] (a not in N), sigma and [a]sigma
/// (a in G^+ minus N). All generators of F_n are odd, so d+ = 0, d- = n.
///
/// Each row also checks the computed trace on every element of its type:
/// x_1^k and x_1^k x_2 with k != 0 mod p^r for [a], and every x_1^k sigma,
/// which is conjugate to sigma in the semidirect product, for sigma.
pub fn character_check(basis: &CyclicKernelBasis) -> Result<Vec<CharacterRow>> {
    let act = action_matrices(basis);
    let q = basis.index as i64;
    let (dp, dm) = (0i64, basis.n as i64);
    let even = quotient_even_count(basis);
    // chi_eps on the three defined rows
    let chi_eps = |row: usize, eps: i64| match row {
        0 => q,
        1 => 0,
        _ => eps * even,
    };
    let module_side = |row: usize| 1 + (dp - 1) * chi_eps(row, 1) + dm * chi_eps(row, -1);

    let m1 = &act.conj[0];
    let mut rows = Vec::new();

    let id = IntMatrix::identity(basis.len()).trace();
    let pred = 1 + q * (dp - 1 + dm);
    rows.push(row("1", vec![id], pred, module_side(0)));

    let mut traces = Vec::new();
    for k in 1..basis.index {
        traces.push(m1.pow(k).trace());
        if basis.n >= 2 {
            let a = FreeWord::power(1, k as i64).concat(&FreeWord::power(2, 1));
            traces.push(act.conj_by(&a)?.trace());
        }
    }
    rows.push(row("[a], a not in N", traces, 1, module_side(1)));

    let traces = (0..basis.index).map(|k| m1.pow(k).mul(&act.sigma).trace()).collect();
    let pred = 1 + even * (dp - 1 - dm);
    rows.push(row("sigma", traces, pred, module_side(2)));

    // the only even classes in Z/p^r are trivial, so G^+ lies in N
    debug_assert_eq!(even, 1);
    rows.push(CharacterRow {
        delta: "[a]sigma, a in G^+ \\ N".into(),
        computed: None,
        predicted: None,
        module_side: None,
        status: RowStatus::Vacuous,
    });
    Ok(rows)
}

/// chi_N = chi_0 + (d+ - 1) chi_+ + d- chi_-, i.e. the predicted value must
/// equal the module side after moving chi_+ across.
fn row(delta: &str, traces: Vec<i64>, predicted: i64, module_side: i64) -> CharacterRow {
    let computed = traces[0];
    let ok = traces.iter().all(|&t| t == predicted) && predicted == module_side;
    CharacterRow {
        delta: delta.into(),
        computed: Some(computed),
        predicted: Some(predicted),
        module_side: Some(module_side),
        status: if ok { RowStatus::Match } else { RowStatus::Mismatch },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCheck {
    /// trace of sigma on N_ab
    pub i_n: i64,
    pub i_g: i64,
    pub quotient_even: i64,
    /// |(G/N)^+| (i_G - 1) + 1
    pub predicted: i64,
}

impl IndexCheck {
    pub fn ok(&self) -> bool {
        self.i_n == self.predicted
    }
}

pub fn index_formula_check(basis: &CyclicKernelBasis) -> IndexCheck {
    let act = action_matrices(basis);
    let i_n = act.sigma.trace();
    let i_g = -(basis.n as i64);
    let quotient_even = quotient_even_count(basis);
    IndexCheck { i_n, i_g, quotient_even, predicted: quotient_even * (i_g - 1) + 1 }
}

/// Structural facts about the action: rank, M(x_1) of order p^r with
/// trace 1, sigma an involution inverting M(x_1), and x_j (j >= 2) acting
/// trivially since it lies in N.
pub fn structure_check(basis: &CyclicKernelBasis) -> std::result::Result<(), String> {
    let act = action_matrices(basis);
    let m1 = &act.conj[0];
    let s = &act.sigma;
    let size = basis.len();
    if size != 1 + basis.index * (basis.n - 1) {
        return Err(format!("basis has {size} symbols"));
    }
    if m1.trace() != 1 {
        return Err(format!("trace of x_1 action is {}", m1.trace()));
    }
    if !m1.pow(basis.index).is_identity() {
        return Err("x_1 action does not have order p^r".into());
    }
    if !s.mul(s).is_identity() {
        return Err("sigma action does not square to the identity".into());
    }
    if !s.mul(m1).mul(s).mul(m1).is_identity() {
        return Err("sigma M(x_1) sigma is not M(x_1)^{-1}".into());
    }
    for (j, m) in act.conj.iter().enumerate().skip(1) {
        if !m.is_identity() {
            return Err(format!("x_{} acts nontrivially", j + 1));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize, r: u32) -> CyclicKernelBasis {
        CyclicKernelBasis::new(Prime::new(3).unwrap(), n, r).unwrap()
    }

    fn unit(len: usize, k: usize) -> Vec<i64> {
        let mut v = vec![0; len];
        v[k] = 1;
        v
    }

    #[test]
    fn rewriting_basis_words() {
        let b = basis(2, 1);
        assert_eq!(b.len(), 4);
        assert_eq!(rewrite_in_kernel(&FreeWord::power(1, 3), &b).unwrap(), unit(4, 0));
        assert_eq!(rewrite_in_kernel(&FreeWord::power(2, 1), &b).unwrap(), unit(4, 1));
        let w = FreeWord::power(1, 3).concat(&FreeWord::power(2, 1)).concat(&FreeWord::power(1, -3));
        assert_eq!(rewrite_in_kernel(&w, &b).unwrap(), unit(4, 1));
        for k in 0..b.len() {
            assert_eq!(rewrite_in_kernel(&b.word(k), &b).unwrap(), unit(4, k));
        }
        assert!(matches!(rewrite_in_kernel(&FreeWord::power(1, 1), &b), Err(Error::NotInKernel(_))));
    }

    #[test]
    fn x1_action_permutes() {
        let b = basis(2, 1);
        let act = action_matrices(&b);
        let m = &act.conj[0];
        assert_eq!(m.get(0, 0), 1);
        // x_1 . x_1^i x_2 x_1^{-i} . x_1^{-1} is the next symbol, cyclically
        assert_eq!(m.get(2, 1), 1);
        assert_eq!(m.get(3, 2), 1);
        assert_eq!(m.get(1, 3), 1);
        assert_eq!(act.sigma.trace(), -2);
    }

    #[test]
    fn characters_at_small_cases() {
        for (n, r, one, sig) in [(2, 1, 4, -2), (3, 1, 7, -3), (2, 2, 10, -2)] {
            let b = basis(n, r);
            structure_check(&b).unwrap();
            let rows = character_check(&b).unwrap();
            assert_eq!(rows[0].computed, Some(one));
            assert_eq!(rows[1].computed, Some(1));
            assert_eq!(rows[2].computed, Some(sig));
            assert!(rows[..3].iter().all(|r| r.status == RowStatus::Match), "{rows:?}");
            assert_eq!(rows[3].status, RowStatus::Vacuous);
            let ix = index_formula_check(&b);
            assert!(ix.ok());
            assert_eq!(ix.i_n, sig);
        }
    }

    #[test]
    fn rank_one_kernel() {
        let b = basis(1, 2);
        assert_eq!(b.len(), 1);
        structure_check(&b).unwrap();
        assert_eq!(index_formula_check(&b).i_n, -1);
    }
}
