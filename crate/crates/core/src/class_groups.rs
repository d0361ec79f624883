//! Class groups of imaginary quadratic fields as groups of reduced positive
//! definite binary quadratic forms. With no real places the narrow and wide
//! class groups agree.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::AbelianPType;
use crate::error::{Error, Result};
use crate::fp::{c_infinity, Prime};

/// a x^2 + b xy + c y^2 with a > 0 and b^2 - 4ac < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        if a <= 0 || f.discriminant() >= 0 {
            return Err(Error::InvalidArgument(format!("{f} is not positive definite")));
        }
        Ok(f)
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The unique reduced form properly equivalent to this one.
    pub fn reduce(self) -> Self {
        let d = self.discriminant();
        let QuadForm { mut a, mut b, mut c } = self;
        loop {
            if !(-a < b && b <= a) {
                let m = 2 * a;
                let mut r = b.rem_euclid(m);
                if r > a {
                    r -= m;
                }
                b = r;
                c = (b * b - d) / (4 * a);
            }
            if a > c || (a == c && b < 0) {
                (a, b, c) = (c, -b, a);
                continue;
            }
            return QuadForm { a, b, c };
        }
    }

    /// x^2 + xy + ((1 - D)/4) y^2 or x^2 - (D/4) y^2.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        QuadForm { a: 1, b, c: (b - d) / 4 }
    }

    /// (a, -b, c), reduced.
    pub fn inverse(&self) -> Self {
        QuadForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

fn is_squarefree(mut m: u64) -> bool {
    let mut q = 2u64;
    while q * q <= m {
        if m.is_multiple_of(q * q) {
            return false;
        }
        if m.is_multiple_of(q) {
            m /= q;
        }
        q += 1;
    }
    true
}

/// D < 0 with D = 1 mod 4 squarefree, or D = 4m with m = 2, 3 mod 4 squarefree.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.unsigned_abs();
    match d.rem_euclid(4) {
        1 => is_squarefree(m),
        0 => {
            let k = d / 4;
            matches!(k.rem_euclid(4), 2 | 3) && is_squarefree(k.unsigned_abs())
        }
        _ => false,
    }
}

/// All reduced forms of discriminant D; their number is h(D).
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    if !is_fundamental(d) {
        return Err(Error::InvalidArgument(format!("{d} is not a negative fundamental discriminant")));
    }
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadForm { a, b, c };
            if f.is_reduced() {
                out.push(f);
            }
        }
        a += 1;
    }
    Ok(out)
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Dirichlet composition followed by reduction.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let d = f.discriminant();
    if g.discriminant() != d {
        return Err(Error::InvalidArgument(format!("discriminants of {f} and {g} differ")));
    }
    let (a1, b1, a2, b2) = (f.a as i128, f.b as i128, g.a as i128, g.b as i128);
    let dd = d as i128;
    let s = (b1 + b2) / 2;
    let (d1, x1, y1) = egcd(f.a, g.a);
    let (m, x2, y2) = egcd(d1, s as i64);
    let (u, v, w) = (x2 as i128 * x1 as i128, x2 as i128 * y1 as i128, y2 as i128);
    let m = m as i128;
    let a3 = a1 * a2 / (m * m);
    let b3 = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + dd) / 2) / m;
    let b3 = b3.rem_euclid(2 * a3);
    let c3 = (b3 * b3 - dd) / (4 * a3);
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, dd);
    Ok(QuadForm { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce())
}

/// Reduced forms of one discriminant with lookup by form.
#[derive(Debug, Clone)]
pub struct FormClassGroup {
    pub discriminant: i64,
    pub forms: Vec<QuadForm>,
    index: HashMap<QuadForm, usize>,
}

impl FormClassGroup {
    pub fn new(d: i64) -> Result<Self> {
        Ok(Self::from_forms(d, reduced_forms(d)?))
    }

    pub fn from_forms(discriminant: i64, forms: Vec<QuadForm>) -> Self {
        let index = forms.iter().enumerate().map(|(k, f)| (*f, k)).collect();
        FormClassGroup { discriminant, forms, index }
    }

    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn principal(&self) -> QuadForm {
        QuadForm::principal(self.discriminant)
    }

    /// Full composition table, row-major over `forms`.
    pub fn table(&self) -> Result<Vec<usize>> {
        let h = self.class_number();
        let mut t = Vec::with_capacity(h * h);
        for f in &self.forms {
            for g in &self.forms {
                let fg = compose(f, g)?;
                t.push(self.index_of(&fg).ok_or_else(|| Error::Inconsistent(format!("{f}*{g} = {fg} not reduced")))?);
            }
        }
        Ok(t)
    }

    /// Identity, inverses and associativity on every triple.
    pub fn check_group_laws(&self) -> std::result::Result<(), String> {
        let h = self.class_number();
        let t = self.table().map_err(|e| e.to_string())?;
        let e = self.index_of(&self.principal()).ok_or("principal form missing")?;
        for x in 0..h {
            if t[e * h + x] != x || t[x * h + e] != x {
                return Err(format!("principal form is not an identity for {}", self.forms[x]));
            }
            let inv = self.index_of(&self.forms[x].inverse()).ok_or("inverse not reduced")?;
            if t[x * h + inv] != e {
                return Err(format!("{} has no inverse", self.forms[x]));
            }
        }
        for x in 0..h {
            for y in 0..h {
                let xy = t[x * h + y];
                for z in 0..h {
                    if t[xy * h + z] != t[x * h + t[y * h + z]] {
                        return Err(format!("associativity fails at D = {}", self.discriminant));
                    }
                }
            }
        }
        Ok(())
    }
}

fn pow_generic<T: Copy, M: Fn(T, T) -> T>(mut x: T, mut e: u64, identity: T, mul: &M) -> T {
    let mut acc = identity;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, x);
        }
        x = mul(x, x);
        e >>= 1;
    }
    acc
}

/// Type of the p-Sylow subgroup of a finite abelian group of order h, given
/// its elements and multiplication. The Sylow subgroup is the image of
/// x -> x^{h / p^v}; it is grown from these images until it has order p^v,
/// and its type is read off from element order counts.
pub fn sylow_type<T, M>(p: Prime, h: u64, identity: T, elems: &[T], mul: M) -> AbelianPType
where
    T: Copy + Eq + Hash,
    M: Fn(T, T) -> T,
{
    let q = p.get() as u64;
    let mut target = 1u64;
    let mut m = h;
    while m.is_multiple_of(q) {
        m /= q;
        target *= q;
    }
    if target == 1 {
        return AbelianPType::trivial();
    }
    let mut set: HashSet<T> = HashSet::from([identity]);
    let mut list = vec![identity];
    for &x in elems {
        if list.len() as u64 == target {
            break;
        }
        let g = pow_generic(x, m, identity, &mul);
        let snapshot = list.clone();
        let mut cur = g;
        while !set.contains(&cur) {
            for &s in &snapshot {
                let y = mul(cur, s);
                if set.insert(y) {
                    list.push(y);
                }
            }
            cur = mul(cur, g);
        }
    }
    debug_assert_eq!(list.len() as u64, target);
    let orders = list.iter().map(|&x| {
        let mut o = 1u64;
        let mut y = x;
        while y != identity {
            y = pow_generic(y, q, identity, &mul);
            o *= q;
        }
        o
    });
    AbelianPType::from_element_orders(p, orders)
}

pub fn p_sylow_type(g: &FormClassGroup, p: Prime) -> AbelianPType {
    let h = g.class_number() as u64;
    if !h.is_multiple_of(p.get() as u64) {
        return AbelianPType::trivial();
    }
    let mul = |x: QuadForm, y: QuadForm| compose(&x, &y).expect("same discriminant");
    sylow_type(p, h, g.principal(), &g.forms, mul)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscRecord {
    pub discriminant: i64,
    pub class_number: u64,
    pub sylow: AbelianPType,
}

/// Which discriminants enter the tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SurveyFilters {
    /// drop D with p | D
    pub exclude_p_divisible: bool,
    /// keep only |D| = residue mod modulus
    pub congruence: Option<(u64, u64)>,
}

impl SurveyFilters {
    pub fn admits(&self, p: Prime, d: i64) -> bool {
        let m = d.unsigned_abs();
        if self.exclude_p_divisible && m.is_multiple_of(p.get() as u64) {
            return false;
        }
        match self.congruence {
            Some((modulus, residue)) => m % modulus == residue % modulus,
            None => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeRow {
    pub partition: AbelianPType,
    pub count: u64,
    pub frequency: f64,
    pub aut_order: String,
    /// C_inf / |Aut(A)|
    pub prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub discriminants: u64,
    pub types: Vec<TypeRow>,
    pub trivial_observed: f64,
    pub trivial_predicted: f64,
    /// observed - predicted for the trivial type
    pub trivial_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub p: Prime,
    #[serde(rename = "X")]
    pub bound: u64,
    pub filters: SurveyFilters,
    pub c_infinity: f64,
    #[serde(flatten)]
    pub tally: Tally,
    /// the same data restricted to p not dividing D
    pub p_coprime: Tally,
}

impl SurveyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

const CHUNK: u64 = 4096;

/// Forms of every fundamental discriminant with lo <= |D| < hi, by |D| - lo.
fn forms_in_range(lo: u64, hi: u64) -> Vec<Vec<QuadForm>> {
    let width = (hi - lo) as usize;
    let mut out = vec![Vec::new(); width];
    let fundamental: Vec<bool> = (lo..hi).map(|m| is_fundamental(-(m as i64))).collect();
    let (lo, hi) = (lo as i64, hi as i64);
    let mut a = 1i64;
    while 3 * a * a < hi {
        for b in -a + 1..=a {
            let bb = b * b;
            // |D| = 4ac - b^2 in [lo, hi)
            let c_min = ((lo + bb + 4 * a - 1) / (4 * a)).max(if b < 0 { a + 1 } else { a });
            let c_max = (hi - 1 + bb) / (4 * a);
            for c in c_min..=c_max {
                let m = 4 * a * c - bb;
                let k = (m - lo) as usize;
                if fundamental[k] {
                    out[k].push(QuadForm { a, b, c });
                }
            }
        }
        a += 1;
    }
    out
}

/// Class number and p-Sylow type for every fundamental D with 0 < |D| <= bound,
/// ordered by |D|.
pub fn survey_records(p: Prime, bound: u64) -> Vec<DiscRecord> {
    let chunks: Vec<u64> = (0..=bound / CHUNK).collect();
    let parts: Vec<Vec<DiscRecord>> = chunks
        .par_iter()
        .map(|&k| {
            let lo = (k * CHUNK).max(1);
            let hi = ((k + 1) * CHUNK).min(bound + 1);
            if lo >= hi {
                return Vec::new();
            }
            forms_in_range(lo, hi)
                .into_iter()
                .enumerate()
                .filter(|(_, f)| !f.is_empty())
                .map(|(i, forms)| {
                    let d = -((lo + i as u64) as i64);
                    let class_number = forms.len() as u64;
                    let sylow = p_sylow_type(&FormClassGroup::from_forms(d, forms), p);
                    DiscRecord { discriminant: d, class_number, sylow }
                })
                .collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

fn aut_order(p: Prime, a: &AbelianPType) -> BigUint {
    a.aut_order_exhaustive(p, 1_000_000).map(BigUint::from).unwrap_or_else(|| a.aut_order(p))
}

fn tally<'a>(p: Prime, cinf: f64, records: impl Iterator<Item = &'a DiscRecord>) -> Tally {
    let mut counts: HashMap<&AbelianPType, u64> = HashMap::new();
    let mut total = 0u64;
    for r in records {
        *counts.entry(&r.sylow).or_default() += 1;
        total += 1;
    }
    let mut types: Vec<TypeRow> = counts
        .into_iter()
        .map(|(a, count)| {
            let aut = aut_order(p, a);
            TypeRow {
                partition: a.clone(),
                count,
                frequency: count as f64 / total.max(1) as f64,
                prediction: cinf / aut.to_f64().unwrap_or(f64::INFINITY),
                aut_order: aut.to_string(),
            }
        })
        .collect();
    types.sort_by(|x, y| (x.partition.log_order(), &x.partition).cmp(&(y.partition.log_order(), &y.partition)));
    let trivial_observed = types.iter().find(|t| t.partition.is_trivial()).map_or(0.0, |t| t.frequency);
    Tally {
        discriminants: total,
        types,
        trivial_observed,
        trivial_predicted: cinf,
        trivial_diff: trivial_observed - cinf,
    }
}

/// Tallies Sylow types over fundamental discriminants -bound <= D < 0 and
/// attaches the predictions C_inf / |Aut(A)|.
pub fn summarize(p: Prime, bound: u64, filters: SurveyFilters, records: &[DiscRecord]) -> SurveyReport {
    let cinf = c_infinity(p, 1e-15).value;
    let kept: Vec<&DiscRecord> = records.iter().filter(|r| filters.admits(p, r.discriminant)).collect();
    let q = p.get() as u64;
    SurveyReport {
        p,
        bound,
        filters,
        c_infinity: cinf,
        tally: tally(p, cinf, kept.iter().copied()),
        p_coprime: tally(p, cinf, kept.iter().copied().filter(|r| r.discriminant.unsigned_abs() % q != 0)),
    }
}

pub fn survey(p: Prime, bound: u64, filters: SurveyFilters) -> (Vec<DiscRecord>, SurveyReport) {
    let records = survey_records(p, bound);
    let report = summarize(p, bound, filters, &records);
    let kept = records.into_iter().filter(|r| filters.admits(p, r.discriminant)).collect();
    (kept, report)
}

/// discriminant,h,partition
pub fn records_csv(records: &[DiscRecord]) -> String {
    let mut out = String::from("discriminant,h,partition\n");
    for r in records {
        let _ = writeln!(out, "{},{},\"{}\"", r.discriminant, r.class_number, r.sylow);
    }
    out
}

/// C_inf from [`c_infinity`] against a plain 200-factor product.
pub fn c_infinity_gate(p: Prime) -> (f64, f64) {
    let computed = c_infinity(p, 1e-15).value;
    let pf = p.get() as f64;
    let independent = (1..=200).fold(1.0f64, |acc, k| acc * (1.0 - pf.powi(-k)));
    (computed, independent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn small_class_numbers() {
        assert_eq!(reduced_forms(-3).unwrap(), vec![QuadForm { a: 1, b: 1, c: 1 }]);
        let f23 = reduced_forms(-23).unwrap();
        assert_eq!(f23.len(), 3);
        assert!(f23.contains(&QuadForm { a: 2, b: -1, c: 3 }));
        for (d, h) in [(-4, 1), (-47, 5), (-71, 7), (-3299, 27), (-4027, 9)] {
            assert_eq!(reduced_forms(d).unwrap().len(), h, "D = {d}");
        }
        assert!(reduced_forms(-12).is_err());
        assert!(reduced_forms(5).is_err());
    }

    #[test]
    fn composition_of_order_three() {
        let f = QuadForm { a: 2, b: 1, c: 3 };
        let f2 = compose(&f, &f).unwrap();
        assert_eq!(f2, QuadForm { a: 2, b: -1, c: 3 });
        assert_eq!(compose(&f2, &f).unwrap(), QuadForm::principal(-23));
        assert_eq!(f.inverse(), f2);
        assert!(compose(&f, &QuadForm::principal(-3)).is_err());
    }

    #[test]
    fn group_laws_small() {
        for d in [-23i64, -47, -71, -84, -420, -3299] {
            FormClassGroup::new(d).unwrap().check_group_laws().unwrap();
        }
    }

    #[test]
    fn sylow_types() {
        let p = p3();
        let t = |d| p_sylow_type(&FormClassGroup::new(d).unwrap(), p);
        assert!(t(-47).is_trivial());
        assert_eq!(t(-23).partition, vec![1]);
        assert_eq!(t(-3299).partition, vec![2, 1]);
        assert_eq!(t(-4027).partition, vec![1, 1]);
    }

    #[test]
    fn sylow_matches_table_order_counts() {
        // element orders read straight off the composition table
        for (d, cube_killed, expect) in [(-3299i64, 9usize, vec![2, 1]), (-4027, 9, vec![1, 1]), (-199, 3, vec![2])] {
            let g = FormClassGroup::new(d).unwrap();
            let h = g.class_number();
            let t = g.table().unwrap();
            let e = g.index_of(&g.principal()).unwrap();
            let killed = (0..h).filter(|&x| t[t[x * h + x] * h + x] == e).count();
            assert_eq!(killed, cube_killed, "D = {d}");
            assert_eq!(p_sylow_type(&g, p3()).partition, expect, "D = {d}");
        }
    }

    #[test]
    fn sylow_on_constructed_groups() {
        let p = p3();
        // Z/9 x Z/3 x Z/2 as triples, elements listed in a scrambled order
        let mut elems: Vec<(u8, u8, u8)> = Vec::new();
        for a in 0..9 {
            for b in 0..3 {
                for c in 0..2 {
                    elems.push(((a * 4) % 9, b, c));
                }
            }
        }
        elems.reverse();
        let mul = |x: (u8, u8, u8), y: (u8, u8, u8)| ((x.0 + y.0) % 9, (x.1 + y.1) % 3, (x.2 + y.2) % 2);
        let t = sylow_type(p, 54, (0, 0, 0), &elems, mul);
        assert_eq!(t.partition, vec![2, 1]);
        // (Z/3)^3 against Z/27
        let mut cube = Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    cube.push((a, b, c));
                }
            }
        }
        let add3 = |x: (u8, u8, u8), y: (u8, u8, u8)| ((x.0 + y.0) % 3, (x.1 + y.1) % 3, (x.2 + y.2) % 3);
        assert_eq!(sylow_type(p, 27, (0, 0, 0), &cube, add3).partition, vec![1, 1, 1]);
        let z27: Vec<u8> = (0..27).collect();
        assert_eq!(sylow_type(p, 27, 0, &z27, |x, y| (x + y) % 27).partition, vec![3]);
    }

    #[test]
    fn chunked_enumeration_matches_direct() {
        let records = survey_records(p3(), 3000);
        let mut direct = Vec::new();
        for m in 1..=3000i64 {
            if is_fundamental(-m) {
                direct.push((-m, reduced_forms(-m).unwrap().len() as u64));
            }
        }
        let chunked: Vec<(i64, u64)> = records.iter().map(|r| (r.discriminant, r.class_number)).collect();
        assert_eq!(chunked, direct);
    }

    #[test]
    fn survey_report_shape() {
        let p = p3();
        let (records, report) = survey(p, 2000, SurveyFilters::default());
        let s: f64 = report.tally.types.iter().map(|t| t.frequency).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(report.tally.discriminants as usize, records.len());
        let z3 = report.tally.types.iter().find(|t| t.partition.partition == vec![1]).unwrap();
        assert_eq!(z3.aut_order, "2");
        assert!((z3.prediction - report.c_infinity / 2.0).abs() < 1e-15);
        let filtered = summarize(p, 2000, SurveyFilters { exclude_p_divisible: true, congruence: None }, &records);
        assert_eq!(filtered.tally, report.p_coprime);
        assert!(records_csv(&records[..2]).starts_with("discriminant,h,partition\n-3,1,\"()\"\n-4,1,"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["X"], 2000);
        assert!(json["types"].is_array());
    }

    #[test]
    fn c_infinity_against_product() {
        let (a, b) = c_infinity_gate(p3());
        assert!((a - b).abs() < 1e-8);
        assert!((a - 0.5601).abs() < 1e-4);
    }
}
