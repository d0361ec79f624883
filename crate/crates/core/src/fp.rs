//! Arithmetic over F_p, dense matrix rank, and the closed-form counting
//! functions (rank counts, the constants C_k, Witt dimensions) that the
//! rest of the crate consumes.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p as u64) {
            return Err(Error::InvalidPrime(p as u64));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub(crate) fn new_unchecked(p: u32) -> Self {
        Prime(p)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// p^e as an exact integer.
    pub fn pow(self, e: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.0), e as usize)
    }

    /// p^e as a machine integer, `None` on overflow.
    pub fn pow_u64(self, e: u32) -> Option<u64> {
        (self.0 as u64).checked_pow(e)
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue modulo an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: Prime,
}

impl FpScalar {
    pub fn new(value: i64, p: Prime) -> Self {
        let m = p.get() as i64;
        FpScalar { value: value.rem_euclid(m) as u32, p }
    }

    pub fn zero(p: Prime) -> Self {
        FpScalar { value: 0, p }
    }

    pub fn one(p: Prime) -> Self {
        FpScalar { value: 1, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn prime(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        Some(FpScalar { value: pow_mod(self.value, self.p.get() - 2, self.p.get()), p: self.p })
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FpScalar { value: (self.value + rhs.value) % self.p.get(), p: self.p }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FpScalar { value: (self.value + self.p.get() - rhs.value) % self.p.get(), p: self.p }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let v = (self.value as u64 * rhs.value as u64) % self.p.get() as u64;
        FpScalar { value: v as u32, p: self.p }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar { value: (self.p.get() - self.value) % self.p.get(), p: self.p }
    }
}

pub(crate) fn pow_mod(base: u32, mut exp: u32, m: u32) -> u32 {
    let m64 = m as u64;
    let mut acc = 1u64 % m64;
    let mut b = base as u64 % m64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m64;
        }
        b = b * b % m64;
        exp >>= 1;
    }
    acc as u32
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows(p: Prime, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        let m = p.get() as i64;
        let entries = rows.iter().flatten().map(|&v| v.rem_euclid(m) as u32).collect();
        Ok(FpMatrix { p, rows: r, cols: c, entries })
    }

    pub fn from_entries(p: Prime, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!("expected {} entries, got {}", rows * cols, entries.len())));
        }
        let q = p.get();
        Ok(FpMatrix { p, rows, cols, entries: entries.into_iter().map(|v| v % q).collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn get(&self, r: usize, c: usize) -> FpScalar {
        FpScalar::new(self.entries[r * self.cols + c] as i64, self.p)
    }

    pub fn set(&mut self, r: usize, c: usize, v: FpScalar) {
        self.entries[r * self.cols + c] = v.value();
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.entries[r * self.cols + c];
            }
        }
        t
    }

    /// Rank over F_p by Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.p, self.cols, self.entries.chunks(self.cols.max(1)).take(self.rows))
    }
}

/// Rank of a list of row vectors of a common length over F_p.
#[allow(clippy::needless_range_loop)]
pub fn rank_of_rows<'a, I>(p: Prime, cols: usize, rows: I) -> usize
where
    I: IntoIterator<Item = &'a [u32]>,
{
    let q = p.get() as u64;
    let mut m: Vec<Vec<u64>> = rows.into_iter().map(|r| r.iter().map(|&v| v as u64 % q).collect()).collect();
    if cols == 0 {
        return 0;
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = pow_mod(m[rank][col] as u32, p.get() - 2, p.get()) as u64;
        for v in m[rank].iter_mut() {
            *v = *v * inv % q;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..cols {
                    let sub = f * m[rank][c] % q;
                    m[r][c] = (m[r][c] + q - sub) % q;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Rank over F_p of a matrix (free function form).
pub fn rank(m: &FpMatrix) -> usize {
    m.rank()
}

/// Exact value of C_k = prod_{i=1..k} (1 - p^{-i}).
pub fn c_finite(p: Prime, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    let pb = p.big();
    let mut pi = BigInt::one();
    for _ in 0..k {
        pi *= &pb;
        acc *= BigRational::new(&pi - BigInt::one(), pi.clone());
    }
    acc
}

/// A float approximation of C_infinity with a rigorous error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CInfinity {
    pub value: f64,
    pub error_bound: f64,
    /// Number of factors multiplied.
    pub terms: u32,
}

/// C_infinity = prod_{i>=1} (1 - p^{-i}), truncated at the first index I with
/// p^{-I}/(1 - p^{-1}) < tolerance. The tail product lies in
/// [1 - p^{-I}/(1 - p^{-1}), 1], which bounds the truncation error.
pub fn c_infinity(p: Prime, tolerance: f64) -> CInfinity {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let pf = p.get() as f64;
    let denom = 1.0 - 1.0 / pf;
    let mut value = 1.0f64;
    let mut pinv = 1.0f64;
    let mut terms = 0u32;
    loop {
        // pinv == p^{-terms}
        if pinv / denom < tolerance {
            break;
        }
        pinv /= pf;
        value *= 1.0 - pinv;
        terms += 1;
    }
    let tail = pinv / denom;
    CInfinity { value, error_bound: tail + 4.0 * (terms as f64 + 1.0) * f64::EPSILON, terms }
}

/// Depth argument for [`c_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CDepth {
    Finite(u32),
    Infinite,
}

/// Result of [`c_constant`]: exact for finite k, a bounded float for k = infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum CValue {
    Exact(BigRational),
    Approx(CInfinity),
}

impl CValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            CValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            CValue::Approx(c) => c.value,
        }
    }
}

pub fn c_constant(p: Prime, k: CDepth, tolerance: f64) -> CValue {
    match k {
        CDepth::Finite(k) => CValue::Exact(c_finite(p, k)),
        CDepth::Infinite => CValue::Approx(c_infinity(p, tolerance)),
    }
}

/// Number of n x l matrices of rank k over F_p,
/// p^{(n+l-k)k} C_n C_l / (C_{n-k} C_{l-k} C_k).
pub fn rank_count(p: Prime, n: u32, l: u32, k: u32) -> Result<BigUint> {
    let (n, l) = if n >= l { (n, l) } else { (l, n) };
    if k > l {
        return Err(Error::InvalidArgument(format!("rank {k} exceeds min({n},{l})")));
    }
    let power = BigRational::from_integer(BigInt::from(p.pow((n + l - k) * k)));
    let value = power * c_finite(p, n) * c_finite(p, l) / (c_finite(p, n - k) * c_finite(p, l - k) * c_finite(p, k));
    if !value.is_integer() {
        return Err(Error::NonIntegral(value.to_string()));
    }
    value.to_integer().to_biguint().ok_or_else(|| Error::Inconsistent("negative rank count".into()))
}

/// Per-grade dimensions c_1, ..., c_{i-1} of the free restricted Lie algebra
/// on n generators over F_p; |F_n / D_i(F_n)| = p^{sum c_k}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDims {
    pub p: Prime,
    pub n: u32,
    pub dims: Vec<u64>,
}

impl GradedDims {
    /// Exponent e with |F_n/D_i| = p^e.
    pub fn order_exponent(&self) -> u64 {
        self.dims.iter().sum()
    }

    /// Exponent of |(F_n/D_i)^-|: sigma acts by (-1)^k on grade k.
    pub fn odd_exponent(&self) -> u64 {
        self.dims.iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(_, &c)| c).sum()
    }

    pub fn even_exponent(&self) -> u64 {
        self.order_exponent() - self.odd_exponent()
    }

    pub fn order(&self) -> BigUint {
        self.p.pow(self.order_exponent() as u32)
    }
}

fn mobius(mut m: u64) -> i64 {
    let mut result = 1i64;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if m > 1 {
        result = -result;
    }
    result
}

/// Witt number l_m(n) = (1/m) sum_{d | m} mu(d) n^{m/d}.
pub fn witt_number(m: u64, n: u64) -> BigUint {
    let mut total = BigInt::zero();
    for d in 1..=m {
        if m.is_multiple_of(d) {
            let mu = mobius(d);
            if mu != 0 {
                let term = BigInt::from(num_traits::pow(BigUint::from(n), (m / d) as usize));
                total += term * mu;
            }
        }
    }
    (total / BigInt::from(m)).to_biguint().unwrap_or_default()
}

/// Graded dimensions c_k for k < depth: c_k = sum over m p^j = k of l_m(n).
pub fn witt_graded_dims(p: Prime, n: u32, depth: u32) -> Result<GradedDims> {
    if depth < 2 || n < 1 {
        return Err(Error::InvalidArgument(format!("need depth >= 2 and n >= 1, got depth {depth}, n {n}")));
    }
    let pu = p.get() as u64;
    let mut dims = Vec::with_capacity(depth as usize - 1);
    for k in 1..depth as u64 {
        let mut c = BigUint::zero();
        let mut pj = 1u64;
        while pj <= k {
            if k % pj == 0 {
                c += witt_number(k / pj, n as u64);
            }
            pj *= pu;
        }
        dims.push(c.to_u64().ok_or_else(|| Error::InvalidArgument("dimension overflow".into()))?);
    }
    Ok(GradedDims { p, n, dims })
}
