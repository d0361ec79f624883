use std::fmt::{self, Write as _};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, Mode};

/// Where a class prediction comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Prediction {
    /// exact tuple count for a class with d = n
    ClassCount {
        #[serde(with = "rational_string")]
        count: BigRational,
    },
    /// count at rank `from_rank` rescaled by the restriction factor
    Restricted {
        from_rank: usize,
        base_count: u64,
        #[serde(with = "rational_string")]
        count: BigRational,
    },
    Unavailable {
        reason: String,
    },
}

impl Prediction {
    /// Predicted number of tuples out of the whole tuple space.
    pub fn count(&self) -> Option<BigRational> {
        match self {
            Prediction::ClassCount { count } | Prediction::Restricted { count, .. } => Some(count.clone()),
            Prediction::Unavailable { .. } => None,
        }
    }
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub label: String,
    pub order: usize,
    /// generator rank of the quotient
    pub d: usize,
    pub observed: u64,
    pub m: u32,
    pub aut_order: Option<u64>,
    pub prediction: Prediction,
    /// expected observations (exact in exhaustive mode)
    pub expected: Option<String>,
    pub probability: Option<f64>,
    pub sigma_dev: Option<f64>,
    pub weak_schur: bool,
}

impl ClassRecord {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        label: String,
        order: usize,
        d: usize,
        observed: u64,
        m: u32,
        aut_order: Option<u64>,
        prediction: Prediction,
        tuple_space: &BigUint,
        total: u64,
        mode: Mode,
        weak_schur: bool,
    ) -> Self {
        let space = BigRational::from_integer(BigInt::from(tuple_space.clone()));
        let (expected, probability, sigma_dev) = match prediction.count() {
            Some(count) => {
                let q = &count / &space;
                let qf = q.to_f64().unwrap_or(f64::NAN);
                let exp = match mode {
                    Mode::Exhaustive => count.clone(),
                    Mode::MonteCarlo => &q * BigRational::from_integer(BigInt::from(total)),
                };
                let expf = exp.to_f64().unwrap_or(f64::NAN);
                let sd = (total as f64 * qf * (1.0 - qf)).sqrt();
                let dev = observed as f64 - expf;
                let sigma_dev = if sd > 0.0 {
                    dev / sd
                } else if dev == 0.0 {
                    0.0
                } else {
                    f64::INFINITY.copysign(dev)
                };
                let expected = match mode {
                    Mode::Exhaustive => exp.to_string(),
                    Mode::MonteCarlo => format!("{expf:.3}"),
                };
                (Some(expected), Some(qf), Some(sigma_dev))
            }
            None => (None, None, None),
        };
        ClassRecord {
            label,
            order,
            d,
            observed,
            m,
            aut_order,
            prediction,
            expected,
            probability,
            sigma_dev,
            weak_schur,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub tuples: u64,
    pub tuple_space: String,
    pub distinct_subgroups: usize,
    pub classes: usize,
    /// sum of predicted probabilities over the observed classes
    pub predicted_share: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub spec: ExperimentSpec,
    pub classes: Vec<ClassRecord>,
    pub totals: Totals,
}

impl FrequencyReport {
    pub fn observed_sum(&self) -> u64 {
        self.classes.iter().map(|c| c.observed).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Aligned-column text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.spec;
        let _ = writeln!(
            out,
            "p={} n={} depth={} mode={:?} tuples={} seed={} sampler={:?}",
            s.p, s.n, s.depth, s.mode, self.totals.tuples, s.master_seed, s.sampler
        );
        let _ = writeln!(
            out,
            "{:>6} {:>2} {:>2} {:>9} {:>14} {:>8} {:>8}  label",
            "order", "d", "m", "|Aut|", "expected", "observed", "dev"
        );
        for c in &self.classes {
            let aut = c.aut_order.map(|a| a.to_string()).unwrap_or_else(|| "-".into());
            let exp = c.expected.clone().unwrap_or_else(|| "n/a".into());
            let dev = c.sigma_dev.map(|d| format!("{d:+.2}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:>6} {:>2} {:>2} {:>9} {:>14} {:>8} {:>8}  {}",
                c.order, c.d, c.m, aut, exp, c.observed, dev, c.label
            );
        }
        let _ = writeln!(
            out,
            "classes={} distinct N={} predicted share of observed classes={:.6}",
            self.totals.classes, self.totals.distinct_subgroups, self.totals.predicted_share
        );
        out
    }
}

/// Result of [`compare`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub passed: bool,
    pub failures: Vec<String>,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "PASS")
        } else {
            write!(f, "FAIL: {}", self.failures.join("; "))
        }
    }
}

/// Exhaustive reports need exact equality of observed and predicted counts
/// and predictions summing to the tuple space; Monte Carlo reports need
/// |observed - Nq| <= tolerance_sigma * sqrt(N q (1 - q)) for every class.
// negated comparisons so that a NaN deviation fails
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn compare(report: &FrequencyReport, tolerance_sigma: f64) -> Comparison {
    let mut failures = Vec::new();
    let total = report.totals.tuples;
    for c in &report.classes {
        let Some(count) = c.prediction.count() else {
            if let Prediction::Unavailable { reason } = &c.prediction {
                failures.push(format!("{}: no prediction ({reason})", c.label));
            }
            continue;
        };
        match report.spec.mode {
            Mode::Exhaustive => {
                if count != BigRational::from_integer(BigInt::from(c.observed)) {
                    failures.push(format!("{}: observed {} != predicted {}", c.label, c.observed, count));
                }
            }
            Mode::MonteCarlo => {
                let q = c.probability.unwrap_or(f64::NAN);
                let sd = (total as f64 * q * (1.0 - q)).sqrt();
                let dev = (c.observed as f64 - total as f64 * q).abs();
                if !(dev <= tolerance_sigma * sd) {
                    failures.push(format!(
                        "{}: observed {} vs expected {:.3} ({:.2} sigma)",
                        c.label,
                        c.observed,
                        total as f64 * q,
                        c.sigma_dev.unwrap_or(f64::NAN)
                    ));
                }
            }
        }
        if !c.weak_schur {
            failures.push(format!("{}: mod-Frattini quotient is not totally odd", c.label));
        }
    }
    if report.spec.mode == Mode::Exhaustive {
        let sum = report.classes.iter().filter_map(|c| c.prediction.count()).fold(BigRational::zero(), |a, b| a + b);
        if sum.to_string() != report.totals.tuple_space {
            failures.push(format!("predictions sum to {sum}, not {}", report.totals.tuple_space));
        }
    }
    Comparison { passed: failures.is_empty(), failures }
}
