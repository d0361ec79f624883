//! Measure values of the form (rational) * C_inf^e, kept exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fp::{c_finite, c_infinity, Prime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureExpr {
    pub coeff: BigRational,
    pub cinf_power: i32,
    pub p: Prime,
}

/// Float rendering with a bound on |approx - exact|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx {
    pub value: f64,
    pub error_bound: f64,
}

impl MeasureExpr {
    pub fn rational(p: Prime, coeff: BigRational) -> Self {
        MeasureExpr { coeff, cinf_power: 0, p }
    }

    pub fn cinf_times(p: Prime, coeff: BigRational) -> Self {
        MeasureExpr { coeff, cinf_power: 1, p }
    }

    pub fn zero(p: Prime) -> Self {
        MeasureExpr::cinf_times(p, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        MeasureExpr { coeff: &self.coeff * r, ..self.clone() }
    }

    /// Evaluates with C_inf computed to within `tolerance`.
    pub fn approx(&self, tolerance: f64) -> Approx {
        let c = c_infinity(self.p, tolerance);
        let k = self.cinf_power;
        let coeff = self.coeff.to_f64().unwrap_or(f64::NAN);
        let value = coeff * c.value.powi(k);
        // C_inf lies in [value - err, value + err]; x^k is monotone there
        let lo = (c.value - c.error_bound).max(0.0).powi(k);
        let hi = (c.value + c.error_bound).powi(k);
        let spread = (hi - c.value.powi(k)).abs().max((c.value.powi(k) - lo).abs());
        Approx { value, error_bound: coeff.abs() * spread + value.abs() * 4.0 * f64::EPSILON }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx(1e-15).value
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.p, other.p, "measure values at different primes");
        assert!(
            self.cinf_power == other.cinf_power || self.is_zero() || other.is_zero(),
            "cannot add values with different C_inf powers"
        );
    }
}

impl Add for MeasureExpr {
    type Output = MeasureExpr;
    fn add(self, rhs: Self) -> Self {
        self.same_shape(&rhs);
        let cinf_power = if self.is_zero() { rhs.cinf_power } else { self.cinf_power };
        MeasureExpr { coeff: self.coeff + rhs.coeff, cinf_power, p: self.p }
    }
}

impl Neg for MeasureExpr {
    type Output = MeasureExpr;
    fn neg(self) -> Self {
        MeasureExpr { coeff: -self.coeff, ..self }
    }
}

impl Sub for MeasureExpr {
    type Output = MeasureExpr;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for MeasureExpr {
    type Output = MeasureExpr;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p);
        MeasureExpr { coeff: self.coeff * rhs.coeff, cinf_power: self.cinf_power + rhs.cinf_power, p: self.p }
    }
}

impl fmt::Display for MeasureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.coeff.is_integer() { self.coeff.numer().to_string() } else { self.coeff.to_string() };
        let v = six_digits(self.approx(1e-12).value);
        match self.cinf_power {
            0 => write!(f, "{c} ≈ {v}"),
            1 if self.coeff.is_one() => write!(f, "C_inf ≈ {v}"),
            1 => write!(f, "{c}·C_inf ≈ {v}"),
            k => write!(f, "{c}·C_inf^{k} ≈ {v}"),
        }
    }
}

/// Six decimals, truncated rather than rounded.
fn six_digits(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.find('.') {
        Some(dot) => s[..dot + 7].to_string(),
        None => s,
    }
}

impl Serialize for MeasureExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let a = self.approx(1e-12);
        let mut st = s.serialize_struct("MeasureExpr", 4)?;
        st.serialize_field("coeff", &self.coeff.to_string())?;
        st.serialize_field("cinf_power", &self.cinf_power)?;
        st.serialize_field("value", &a.value)?;
        st.serialize_field("error_bound", &a.error_bound)?;
        st.end()
    }
}

fn p_pow(p: Prime, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p.get()));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

fn int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// mu_inf(Sch_n) = C_inf / C_n^2 * p^{-n^2}.
pub fn mu_inf_sch_n(p: Prime, n: u32) -> MeasureExpr {
    let cn = c_finite(p, n);
    MeasureExpr::cinf_times(p, p_pow(p, -((n as i64) * (n as i64))) / (&cn * &cn))
}

/// C_inf / (C_{n-m} |Aut_sigma(G_D)|).
pub fn mu_inf_udg(p: Prime, n: u32, m: u32, aut_order: &BigUint) -> Result<MeasureExpr> {
    if m > n {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds n = {n}")));
    }
    if aut_order.is_zero() {
        return Err(Error::InvalidArgument("automorphism group order must be positive".into()));
    }
    let denom = c_finite(p, n - m) * int(BigInt::from(aut_order.clone()));
    Ok(MeasureExpr::cinf_times(p, denom.recip()))
}

/// Number of tuples in (F_{n,D}^-)^n whose quotient lies in the class:
/// |F_{n,D}^-|^n C_n^2 / (C_{n-m} |Aut_sigma|). A non-integral value means
/// the inputs are inconsistent.
pub fn mu_n_class_count(p: Prime, n: u32, d_odd_size: &BigUint, m: u32, aut_order: &BigUint) -> Result<BigUint> {
    if m > n {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds n = {n}")));
    }
    let cn = c_finite(p, n);
    let value =
        int(BigInt::from(d_odd_size.pow(n))) * &cn * &cn / (c_finite(p, n - m) * int(BigInt::from(aut_order.clone())));
    if !value.is_integer() || value.is_negative() {
        return Err(Error::NonIntegral(value.to_string()));
    }
    Ok(value.to_integer().to_biguint().expect("nonnegative"))
}

/// C_n^2 / (C_m^2 C_{n-m}).
pub fn mu_n_restriction_factor(p: Prime, n: u32, m: u32) -> Result<BigRational> {
    if m > n {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds n = {n}")));
    }
    let cn = c_finite(p, n);
    let cm = c_finite(p, m);
    Ok(&cn * &cn / (&cm * &cm * c_finite(p, n - m)))
}

/// C_inf / |Aut(A)|.
pub fn mu_inf_abelianization(p: Prime, aut_a_order: &BigUint) -> Result<MeasureExpr> {
    if aut_a_order.is_zero() {
        return Err(Error::InvalidArgument("automorphism group order must be positive".into()));
    }
    Ok(MeasureExpr::cinf_times(p, int(BigInt::from(aut_a_order.clone())).recip()))
}

/// mu_1 of the class of Z/p^j: p^{-j} C_1.
pub fn mu_1_cyclic(p: Prime, j: u32) -> BigRational {
    p_pow(p, -(j as i64)) * c_finite(p, 1)
}

/// The factor C_inf / C_n^2 relating mu_n on Sch_n to mu_inf.
pub fn limit_factor(p: Prime, n: u32) -> MeasureExpr {
    let cn = c_finite(p, n);
    MeasureExpr::cinf_times(p, (&cn * &cn).recip())
}

/// sum_{j >= 1} first * ratio^{j-1} for |ratio| < 1, exactly.
pub fn geometric_sum(first: &MeasureExpr, ratio: &BigRational) -> MeasureExpr {
    assert!(ratio.abs() < BigRational::one());
    first.scale(&(BigRational::one() - ratio).recip())
}

/// mu_inf of the class of Z/p^j, C_inf / (p^{j-1}(p - 1)).
pub fn mu_inf_cyclic(p: Prime, j: u32) -> MeasureExpr {
    let aut = BigUint::from(p.get()).pow(j - 1) * BigUint::from(p.get() - 1);
    mu_inf_abelianization(p, &aut).expect("positive")
}

/// mu_inf([Z_p]) = mu_inf(Sch_1) - sum_j mu_inf([Z/p^j]).
pub fn mu_inf_zp(p: Prime) -> MeasureExpr {
    let ratio = BigRational::new(BigInt::one(), BigInt::from(p.get()));
    mu_inf_sch_n(p, 1) - geometric_sum(&mu_inf_cyclic(p, 1), &ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn sch_n_examples() {
        assert_eq!(mu_inf_sch_n(p3(), 0), MeasureExpr::cinf_times(p3(), q(1, 1)));
        let m1 = mu_inf_sch_n(p3(), 1);
        assert_eq!(m1.coeff, q(3, 4));
        assert!((m1.to_f64() - 0.420094).abs() < 1e-6);
        assert_eq!(m1.to_string(), "3/4·C_inf ≈ 0.420094");
        // C_2 = 16/27, so 1/(C_2^2 3^4) = 729/(256*81) = 9/256
        assert_eq!(mu_inf_sch_n(p3(), 2).coeff, q(9, 256));
    }

    #[test]
    fn udg_examples() {
        let m = mu_inf_udg(p3(), 2, 2, &BigUint::from(48u32)).unwrap();
        assert_eq!(m.coeff, q(1, 48));
        for j in 1..5 {
            let aut = BigUint::from(3u32.pow(j - 1) * 2);
            assert_eq!(mu_inf_udg(p3(), 1, 1, &aut).unwrap(), mu_inf_cyclic(p3(), j));
        }
        assert_eq!(mu_inf_udg(p3(), 0, 0, &BigUint::one()).unwrap().coeff, q(1, 1));
        assert!(mu_inf_udg(p3(), 1, 2, &BigUint::one()).is_err());
    }

    #[test]
    fn class_count_examples() {
        let b = |x: u32| BigUint::from(x);
        assert_eq!(mu_n_class_count(p3(), 2, &b(9), 0, &b(48)).unwrap(), b(1));
        assert_eq!(mu_n_class_count(p3(), 1, &b(9), 1, &b(2)).unwrap(), b(2));
        assert_eq!(mu_n_class_count(p3(), 1, &b(9), 0, &b(6)).unwrap(), b(1));
        assert!(matches!(mu_n_class_count(p3(), 1, &b(9), 0, &b(7)), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn restriction_factor_examples() {
        assert_eq!(mu_n_restriction_factor(p3(), 2, 2).unwrap(), q(1, 1));
        assert_eq!(mu_n_restriction_factor(p3(), 1, 0).unwrap(), q(2, 3));
        let c1 = q(2, 3);
        let c2 = q(16, 27);
        assert_eq!(mu_n_restriction_factor(p3(), 2, 1).unwrap(), &c2 * &c2 / (&c1 * &c1 * &c1));
    }

    #[test]
    fn abelianization_examples() {
        let m = mu_inf_abelianization(p3(), &BigUint::one()).unwrap();
        assert!((m.to_f64() - 0.560126).abs() < 1e-6);
        assert_eq!(mu_inf_abelianization(p3(), &BigUint::from(2u32)).unwrap().coeff, q(1, 2));
        assert_eq!(mu_inf_abelianization(p3(), &BigUint::from(48u32)).unwrap().coeff, q(1, 48));
    }

    #[test]
    fn cyclic_consistency_and_zp() {
        for p in [3u32, 5, 7] {
            let p = Prime::new(p).unwrap();
            for j in 1..=5 {
                let lhs = limit_factor(p, 1).scale(&mu_1_cyclic(p, j));
                assert_eq!(lhs, mu_inf_cyclic(p, j));
            }
            assert!(mu_inf_zp(p).is_zero());
        }
    }

    #[test]
    fn sch_n_sums_to_one() {
        for p in [3u32, 5] {
            let p = Prime::new(p).unwrap();
            let total = (0..=6).map(|n| mu_inf_sch_n(p, n)).fold(MeasureExpr::zero(p), |a, b| a + b);
            let a = total.approx(1e-12);
            assert!((a.value - 1.0).abs() < 1e-6 + a.error_bound);
        }
    }

    #[test]
    fn error_bound_covers_deeper_truncation() {
        let m = mu_inf_sch_n(p3(), 1);
        let rough = m.approx(1e-4);
        let fine = m.approx(1e-14);
        assert!((rough.value - fine.value).abs() <= rough.error_bound);
    }
}
