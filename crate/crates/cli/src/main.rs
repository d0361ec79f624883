//! schurbench command line. Exit codes: 0 success, 1 a check failed,
//! 2 usage or configuration error, 3 a size cap was exceeded.

mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use schurbench::acceptance::{run_all, run_criterion, AcceptanceConfig, CRITERIA};
use schurbench::class_groups::{p_sylow_type, records_csv, survey, FormClassGroup, SurveyFilters};
use schurbench::experiments::{compare, run_experiment, ExperimentSpec, Sampler};
use schurbench::fp::{c_finite, c_infinity, rank_count, witt_graded_dims};
use schurbench::free_subgroups::{character_check, index_formula_check, structure_check, CyclicKernelBasis, RowStatus};
use schurbench::iso::{sigma_aut_order, Fingerprint};
use schurbench::magnus::{enumerate_group, MagnusGroup};
use schurbench::measure::{
    limit_factor, mu_1_cyclic, mu_inf_abelianization, mu_inf_cyclic, mu_inf_sch_n, mu_inf_udg, mu_inf_zp,
    mu_n_class_count, mu_n_restriction_factor, MeasureExpr,
};
use schurbench::word::parse_relations;
use schurbench::zassenhaus::zassenhaus_type;
use schurbench::{Error, Prime};

use config::Settings;

#[derive(Parser)]
#[command(
    name = "schurbench",
    version,
    about = "Finite sigma-p-groups, relation-tuple statistics and class-group surveys"
)]
struct Cli {
    /// key=value file (p, seed, size_cap, aut_cap, tuple_cap, samples, format, output)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    size_cap: Option<u64>,
    #[arg(long, global = true)]
    aut_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct GroupArgs {
    #[arg(short)]
    p: Option<u32>,
    /// number of generators
    #[arg(short)]
    n: usize,
    /// Zassenhaus depth: the group is F_n / D_i
    #[arg(short)]
    i: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Graded dimensions, order and parity sizes of F_n / D_i
    Witt(GroupArgs),
    /// Build F_n / D_i and print its invariants
    Group(GroupArgs),
    /// Invariants of F_n / D_i modulo the normal closure of relations
    Quotient {
        #[command(flatten)]
        group: GroupArgs,
        /// words like "1 1 1; 2 2 2" (letters are signed generator indices)
        #[arg(long)]
        relations: String,
        /// also count sigma-automorphisms
        #[arg(long)]
        aut: bool,
    },
    /// Order of the sigma-automorphism group of F_n / D_i or of a quotient
    Aut {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        relations: Option<String>,
    },
    /// Zassenhaus type of F_n / N_r from relation words
    Zassenhaus {
        #[arg(short)]
        p: Option<u32>,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        relations: String,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
    },
    /// Evaluate one of the closed-form measures
    Measure {
        #[arg(value_enum)]
        formula: Formula,
        #[arg(short)]
        p: Option<u32>,
        #[arg(short, default_value_t = 1)]
        n: u32,
        #[arg(short, default_value_t = 0)]
        m: u32,
        /// exponent j, or the column count l for rank-count
        #[arg(short, default_value_t = 1)]
        j: u32,
        /// |Aut| argument, or |G^-| of F_{n,D} for mu-n-class-count
        #[arg(long, default_value = "1")]
        aut: String,
        #[arg(long, default_value = "1")]
        odd_size: String,
    },
    /// Classify relation-tuple quotients and compare with predictions
    Classify {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "odd-list")]
        sampler: SamplerArg,
        #[arg(long, default_value_t = 4.0)]
        tolerance: f64,
    },
    /// Characters of the action on the abelianized kernel of F_n -> Z/p^r
    Character {
        #[arg(short)]
        p: Option<u32>,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: u32,
    },
    /// Class group of one imaginary quadratic discriminant
    Classgroup {
        #[arg(short = 'D', long, allow_hyphen_values = true)]
        discriminant: i64,
        #[arg(short)]
        p: Option<u32>,
    },
    /// Sylow-type frequencies over fundamental discriminants
    Survey {
        #[arg(short)]
        p: Option<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[arg(long)]
        exclude_p_divisible: bool,
        /// keep |D| = r mod m, given as m:r
        #[arg(long)]
        congruence: Option<String>,
        /// also write the per-discriminant CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the numbered acceptance checks
    VerifyAll {
        /// run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        survey_bound: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Formula {
    MuInfSchn,
    MuInfUdg,
    MuNClassCount,
    RestrictionFactor,
    MuInfAbelianization,
    Mu1Cyclic,
    MuInfCyclic,
    MuInfZp,
    LimitFactor,
    CInf,
    CN,
    RankCount,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    OddList,
    Twisted,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Check(String),
    Usage(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            Error::Inconsistent(_) | Error::NonIntegral(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A report: JSON always, text for humans, CSV where tabular.
struct Output {
    json: Value,
    text: String,
    csv: Option<String>,
    /// set when the report carries a failed check
    failed: Option<String>,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output { json, text, csv: None, failed: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match Settings::load(cli.config.as_deref()) {
        Ok(s) => s.with_overrides(cli.format, cli.output.clone(), cli.size_cap, cli.aut_cap),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = dispatch(&cli.command, &settings).and_then(|out| emit(&out, &settings).map(|_| out));
    match result {
        Ok(out) => match out.failed {
            Some(msg) => {
                eprintln!("check failed: {msg}");
                ExitCode::from(1)
            }
            None => ExitCode::SUCCESS,
        },
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn emit(out: &Output, s: &Settings) -> Result<(), Failure> {
    let body = match s.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json"),
        Format::Text => out.text.clone(),
        Format::Csv => out.csv.clone().ok_or_else(|| Failure::Usage("this command has no CSV output".into()))?,
    };
    match &s.output {
        Some(path) => fs::write(path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            if !body.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn prime(p: Option<u32>, s: &Settings) -> Result<Prime, Failure> {
    Ok(Prime::new(p.unwrap_or(s.p))?)
}

fn build(g: &GroupArgs, s: &Settings) -> Result<MagnusGroup, Failure> {
    Ok(enumerate_group(prime(g.p, s)?, g.n, g.i, s.size_cap)?)
}

fn dispatch(cmd: &Command, s: &Settings) -> Result<Output, Failure> {
    match cmd {
        Command::Witt(g) => witt(g, s),
        Command::Group(g) => group(g, s),
        Command::Quotient { group, relations, aut } => quotient(group, relations, *aut, s),
        Command::Aut { group, relations } => aut(group, relations.as_deref(), s),
        Command::Zassenhaus { p, n, relations, max_depth } => {
            let p = prime(*p, s)?;
            let words = parse_relations(relations, *n)?;
            let t = zassenhaus_type(p, *n, &words, *max_depth)?;
            let text = format!("type {t}\nrelation ranks m_2..m_{max_depth}: {:?}", t.relation_ranks);
            Ok(Output::new(json!({ "type": t.to_string(), "detail": t }), text))
        }
        Command::Measure { formula, p, n, m, j, aut, odd_size } => {
            measure(*formula, prime(*p, s)?, *n, *m, *j, aut, odd_size)
        }
        Command::Classify { group, exhaustive, samples, seed, sampler, tolerance } => {
            classify(group, *exhaustive, *samples, *seed, *sampler, *tolerance, s)
        }
        Command::Character { p, n, r } => character(prime(*p, s)?, *n, *r),
        Command::Classgroup { discriminant, p } => classgroup(*discriminant, prime(*p, s)?),
        Command::Survey { p, bound, exclude_p_divisible, congruence, csv } => {
            run_survey(prime(*p, s)?, *bound, *exclude_p_divisible, congruence.as_deref(), csv.as_ref())
        }
        Command::VerifyAll { only, samples, seed, survey_bound } => verify(only, *samples, *seed, *survey_bound, s),
    }
}

fn witt(g: &GroupArgs, s: &Settings) -> Result<Output, Failure> {
    let p = prime(g.p, s)?;
    let dims = witt_graded_dims(p, g.n as u32, g.i as u32)?;
    let order = dims.order();
    let odd = p.pow(dims.odd_exponent() as u32);
    let even = p.pow(dims.even_exponent() as u32);
    let shown: Vec<String> = dims.dims.iter().map(|d| d.to_string()).collect();
    let text = format!("dims ({})\norder {order}\n|G-| {odd}\n|G+| {even}", shown.join(","));
    let json = json!({
        "p": p, "n": g.n, "depth": g.i, "dims": dims.dims,
        "order": order.to_string(), "odd_size": odd.to_string(), "even_size": even.to_string(),
    });
    Ok(Output::new(json, text))
}

fn invariants(g: &schurbench::group::SigmaGroup) -> (Value, String) {
    let fp = Fingerprint::of(g);
    let center = g.center().len();
    let d = g.generator_rank();
    let text = format!(
        "order {}\n|G-| {}\n|G+| {}\ngenerator rank {d}\ncenter {center}\nabelianization + {} - {}\nD_2, D_3, ... orders {:?}\nfingerprint {}",
        fp.order,
        fp.odd_size,
        fp.even_size,
        fp.ab_even,
        fp.ab_odd,
        fp.dimension_orders,
        fp.serialize()
    );
    let json = json!({
        "order": fp.order, "odd_size": fp.odd_size, "even_size": fp.even_size,
        "generator_rank": d, "center": center, "fingerprint": fp.serialize(), "invariants": fp,
    });
    (json, text)
}

fn group(g: &GroupArgs, s: &Settings) -> Result<Output, Failure> {
    let f = build(g, s)?;
    let (json, text) = invariants(&f.group);
    Ok(Output::new(json, text))
}

fn relation_quotient(
    f: &MagnusGroup,
    n: usize,
    relations: &str,
) -> Result<(schurbench::group::SigmaGroup, u32), Failure> {
    let words = parse_relations(relations, n)?;
    let g = &f.group;
    let mut seeds = Vec::new();
    for w in &words {
        let e = f.word_to_elem(w)?;
        if !g.is_odd(e) {
            return Err(Error::NotOdd(w.to_string()).into());
        }
        seeds.push(e);
    }
    let nr = g.normal_closure(&seeds);
    let m = g.relation_rank(&nr)?;
    let (q, _) = g.quotient(&nr)?;
    Ok((q, m))
}

fn quotient(g: &GroupArgs, relations: &str, with_aut: bool, s: &Settings) -> Result<Output, Failure> {
    let f = build(g, s)?;
    let (q, m) = relation_quotient(&f, g.n, relations)?;
    let (mut json, mut text) = invariants(&q);
    let weak = schurbench::experiments::is_weak_schur_shadow(&q);
    json["relation_rank"] = json!(m);
    json["weak_schur"] = json!(weak);
    text.push_str(&format!("\nrelation rank m {m}\nmod-Frattini quotient totally odd {weak}"));
    if with_aut {
        let a = sigma_aut_order(&q, s.aut_cap)?;
        json["aut_order"] = json!(a);
        text.push_str(&format!("\n|Aut_sigma| {a}"));
    }
    Ok(Output::new(json, text))
}

fn aut(g: &GroupArgs, relations: Option<&str>, s: &Settings) -> Result<Output, Failure> {
    let f = build(g, s)?;
    let q = match relations {
        Some(r) => relation_quotient(&f, g.n, r)?.0,
        None => f.group.clone(),
    };
    let a = sigma_aut_order(&q, s.aut_cap)?;
    Ok(Output::new(
        json!({ "order": q.order(), "aut_order": a }),
        format!("|Aut_sigma| {a} (group order {})", q.order()),
    ))
}

fn big(s: &str) -> Result<num_bigint::BigUint, Failure> {
    s.parse().map_err(|_| Failure::Usage(format!("not a nonnegative integer: {s}")))
}

fn measure(formula: Formula, p: Prime, n: u32, m: u32, j: u32, aut: &str, odd: &str) -> Result<Output, Failure> {
    let expr = |e: MeasureExpr| {
        let json = json!({ "formula": format!("{formula:?}"), "value": e, "approx": e.to_f64() });
        Output::new(json, e.to_string())
    };
    let rational = |r: num_rational::BigRational| expr(MeasureExpr::rational(p, r));
    Ok(match formula {
        Formula::MuInfSchn => expr(mu_inf_sch_n(p, n)),
        Formula::MuInfUdg => expr(mu_inf_udg(p, n, m, &big(aut)?)?),
        Formula::MuNClassCount => {
            let c = mu_n_class_count(p, n, &big(odd)?, m, &big(aut)?)?;
            Output::new(json!({ "formula": "MuNClassCount", "count": c.to_string() }), c.to_string())
        }
        Formula::RestrictionFactor => rational(mu_n_restriction_factor(p, n, m)?),
        Formula::MuInfAbelianization => expr(mu_inf_abelianization(p, &big(aut)?)?),
        Formula::Mu1Cyclic => rational(mu_1_cyclic(p, j)),
        Formula::MuInfCyclic => {
            if j == 0 {
                return Err(Failure::Usage("j must be at least 1".into()));
            }
            expr(mu_inf_cyclic(p, j))
        }
        Formula::MuInfZp => expr(mu_inf_zp(p)),
        Formula::LimitFactor => expr(limit_factor(p, n)),
        Formula::CInf => {
            let c = c_infinity(p, 1e-15);
            Output::new(json!({ "formula": "CInf", "value": c }), format!("{:.12} (+- {:.1e})", c.value, c.error_bound))
        }
        Formula::CN => rational(c_finite(p, n)),
        Formula::RankCount => {
            let c = rank_count(p, n, j, m)?;
            Output::new(
                json!({ "formula": "RankCount", "n": n, "l": j, "k": m, "count": c.to_string() }),
                c.to_string(),
            )
        }
    })
}

fn classify(
    g: &GroupArgs,
    exhaustive: bool,
    samples: Option<u64>,
    seed: Option<u64>,
    sampler: SamplerArg,
    tolerance: f64,
    s: &Settings,
) -> Result<Output, Failure> {
    let p = prime(g.p, s)?;
    let sampler = match sampler {
        SamplerArg::OddList => Sampler::OddList,
        SamplerArg::Twisted => Sampler::Twisted,
    };
    let mut spec = if exhaustive {
        ExperimentSpec::exhaustive(p, g.n, g.i)
    } else {
        let samples = samples.or(s.samples).ok_or_else(|| Failure::Usage("give --exhaustive or --samples".into()))?;
        ExperimentSpec::monte_carlo(p, g.n, g.i, samples, seed.unwrap_or(s.seed), sampler)
    };
    spec.size_cap = s.size_cap;
    spec.aut_cap = s.aut_cap;
    spec.tuple_cap = s.tuple_cap;
    let report = run_experiment(&spec)?;
    let verdict = compare(&report, tolerance);
    let mut json = serde_json::to_value(&report).expect("json");
    json["verdict"] = json!(verdict);
    let text = format!("{}{verdict}", report.to_text());
    let mut csv = String::from("label,order,d,m,aut_order,expected,observed,sigma_dev\n");
    for c in &report.classes {
        let opt = |x: Option<String>| x.unwrap_or_default();
        csv.push_str(&format!(
            "\"{}\",{},{},{},{},{},{},{}\n",
            c.label,
            c.order,
            c.d,
            c.m,
            opt(c.aut_order.map(|a| a.to_string())),
            opt(c.expected.clone()),
            c.observed,
            opt(c.sigma_dev.map(|d| format!("{d:.4}")))
        ));
    }
    let failed = (!verdict.passed).then(|| verdict.failures.join("; "));
    Ok(Output { json, text, csv: Some(csv), failed })
}

fn character(p: Prime, n: usize, r: u32) -> Result<Output, Failure> {
    let basis = CyclicKernelBasis::new(p, n, r)?;
    let structure = structure_check(&basis);
    let rows = character_check(&basis)?;
    let ix = index_formula_check(&basis);
    let mut text = format!("rank of N_ab {}\n", basis.len());
    text.push_str(&format!("{:<26} {:>9} {:>9} {:>9}  {}\n", "delta", "computed", "predicted", "module", "status"));
    for row in &rows {
        let show = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        text.push_str(&format!(
            "{:<26} {:>9} {:>9} {:>9}  {}\n",
            row.delta,
            show(row.computed),
            show(row.predicted),
            show(row.module_side),
            row.status
        ));
    }
    text.push_str(&format!(
        "i_N {} vs |(G/N)+|(i_G - 1) + 1 = {}: {}\nstructure: {}",
        ix.i_n,
        ix.predicted,
        if ix.ok() { "match" } else { "MISMATCH" },
        structure.as_ref().map_or_else(|e| e.clone(), |_| "ok".into())
    ));
    let mut failures = Vec::new();
    if let Err(e) = &structure {
        failures.push(e.clone());
    }
    if rows.iter().any(|r| r.status == RowStatus::Mismatch) {
        failures.push("character mismatch".into());
    }
    if !ix.ok() {
        failures.push("index formula mismatch".into());
    }
    let json =
        json!({ "basis": basis, "rank": basis.len(), "rows": rows, "index": ix, "structure_ok": structure.is_ok() });
    let failed = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(Output { json, text, csv: None, failed })
}

fn classgroup(d: i64, p: Prime) -> Result<Output, Failure> {
    let g = FormClassGroup::new(d)?;
    let t = p_sylow_type(&g, p);
    let forms: Vec<String> = g.forms.iter().map(|f| f.to_string()).collect();
    let text = format!("D = {d}\nh = {}\n{}-part {t}\nforms {}", g.class_number(), p, forms.join(" "));
    let json = json!({ "discriminant": d, "h": g.class_number(), "p": p, "sylow": t, "forms": g.forms });
    Ok(Output::new(json, text))
}

fn run_survey(
    p: Prime,
    bound: u64,
    exclude: bool,
    congruence: Option<&str>,
    csv_path: Option<&PathBuf>,
) -> Result<Output, Failure> {
    let congruence = match congruence {
        None => None,
        Some(c) => {
            let (m, r) = c.split_once(':').ok_or_else(|| Failure::Usage(format!("congruence must be m:r, got {c}")))?;
            let parse = |x: &str| x.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("bad congruence {c}")));
            let m = parse(m)?;
            if m == 0 {
                return Err(Failure::Usage("congruence modulus must be positive".into()));
            }
            Some((m, parse(r)?))
        }
    };
    let filters = SurveyFilters { exclude_p_divisible: exclude, congruence };
    let (records, report) = survey(p, bound, filters);
    let csv = records_csv(&records);
    if let Some(path) = csv_path {
        fs::write(path, &csv).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let mut text =
        format!("p={} |D|<={bound} discriminants={} C_inf={:.6}\n", p, report.tally.discriminants, report.c_infinity);
    text.push_str(&format!("{:<10} {:>8} {:>10} {:>10}\n", "type", "count", "frequency", "predicted"));
    for t in &report.tally.types {
        text.push_str(&format!(
            "{:<10} {:>8} {:>10.6} {:>10.6}\n",
            t.partition.to_string(),
            t.count,
            t.frequency,
            t.prediction
        ));
    }
    text.push_str(&format!(
        "trivial part: observed {:.6}, predicted {:.6}, difference {:+.6}\np not dividing D: trivial part observed {:.6} over {} discriminants",
        report.tally.trivial_observed,
        report.tally.trivial_predicted,
        report.tally.trivial_diff,
        report.p_coprime.trivial_observed,
        report.p_coprime.discriminants
    ));
    let json = serde_json::to_value(&report).expect("json");
    Ok(Output { json, text, csv: Some(csv), failed: None })
}

fn verify(
    only: &[u32],
    samples: Option<u64>,
    seed: Option<u64>,
    bound: Option<u64>,
    s: &Settings,
) -> Result<Output, Failure> {
    let mut cfg = AcceptanceConfig::default();
    if let Some(x) = samples.or(s.samples) {
        cfg.mc_samples = x;
    }
    if let Some(x) = seed.or(s.seed_override) {
        cfg.mc_seed = x;
    }
    if let Some(x) = bound {
        cfg.survey_bound = x;
    }
    let results =
        if only.is_empty() {
            run_all(&cfg)
        } else {
            let mut out = Vec::new();
            for &id in only {
                out.push(run_criterion(id, &cfg).ok_or_else(|| {
                    Failure::Usage(format!("no criterion {id}; valid ids are 1..={}", CRITERIA.len()))
                })?);
            }
            out
        };
    let text = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
    let failed: Vec<String> =
        results.iter().filter(|r| !r.passed).map(|r| format!("criterion {} ({})", r.id, r.name)).collect();
    let json = json!({ "config": cfg, "results": results });
    Ok(Output { json, text, csv: None, failed: (!failed.is_empty()).then(|| failed.join(", ")) })
}
