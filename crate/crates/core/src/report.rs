//! Top-level runs: input handling, the two-prime protocol and the JSON,
//! table and CSV renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::check::{analyze, analyze_formulas, Analysis, CheckEntry, CheckOptions, CheckStatus, PhaseTiming};
use crate::error::AnalysisError;
use crate::field::{FieldConfig, FieldError, FieldKind, RationalField};
use crate::graded::{Coincidence, CurveEngine};
use crate::linalg::Strategy;
use crate::parse::parse_poly;
use crate::poly::HomogeneousPoly;
use crate::theory::NodalMetadata;

pub const SCHEMA: &str = "jacmod.analysis/1";

/// Primes tried before giving up on finding two that agree.
const MAX_PRIMES: usize = 6;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: FieldConfig,
    /// Above this degree the oracle only runs with `force_oracle`.
    pub max_degree_cap: usize,
    pub skip_oracle: bool,
    pub force_oracle: bool,
    pub exponents: Option<Vec<usize>>,
    pub tau: Option<usize>,
    pub nodal: Option<NodalMetadata>,
    pub strategy: Strategy,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            field: FieldConfig::default(),
            max_degree_cap: 40,
            skip_oracle: false,
            force_oracle: false,
            exponents: None,
            tau: None,
            nodal: None,
            strategy: Strategy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub polynomial: Option<String>,
    pub degree: usize,
    pub field: String,
    pub seed: u64,
    pub primes: Vec<u64>,
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTimings {
    pub prime: u64,
    pub timings: Vec<PhaseTiming>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub input: InputEcho,
    pub analysis: Analysis,
    pub runs: Vec<PrimeTimings>,
    pub status: CheckStatus,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    /// Process exit code: 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `k,n,source`, one row per degree `0..=T`; unknown values are left empty.
    pub fn to_csv(&self) -> String {
        let source = self.analysis.vector.source().as_str();
        let mut out = String::from("k,n,source\n");
        for (k, v) in self.analysis.vector.values().iter().enumerate() {
            match v {
                Some(v) => writeln!(out, "{k},{v},{source}").unwrap(),
                None => writeln!(out, "{k},,{source}").unwrap(),
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let a = &self.analysis;
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            writeln!(out, "{key:<16}{value}").unwrap();
        };
        if let Some(p) = &self.input.polynomial {
            line("curve", p.clone());
        }
        let primes = if self.input.primes.is_empty() {
            String::new()
        } else {
            let ps: Vec<String> = self.input.primes.iter().map(u64::to_string).collect();
            format!(" p = {}", ps.join(", "))
        };
        line("field", format!("{}{primes} (seed {})", self.input.field, self.input.seed));
        line("mode", self.input.mode.clone());
        line("degree", format!("d = {}, T = {}", a.d, a.t));
        line("tau", a.tau.to_string());
        line("mdr", a.r.to_string());
        line("exponents", format!("{} (m = {})", tuple(&a.exponents), a.m));
        if !a.second.is_empty() {
            line("second", format!("e = {}, eps = {}", tuple(&a.second), tuple(&a.eps)));
        }
        line("sigma", opt(a.sigma));
        line("nu", opt(a.nu));
        let mut flags = Vec::new();
        if a.class.maximal_tjurina {
            flags.push("maximal Tjurina");
        }
        if a.class.stable {
            flags.push("stable");
        } else if a.class.semistable {
            flags.push("semistable");
        }
        let class = if flags.is_empty() {
            a.class.tag.label()
        } else {
            format!("{} [{}]", a.class.tag.label(), flags.join(", "))
        };
        line("class", class);
        line("bundle", format!("c1 = {}, c2 = {}", a.bundle.c1, a.bundle.c2));
        line(
            "sigma bound",
            a.hartshorne_bound.map_or("n/a".to_string(), |b| format!("sigma >= {b}")),
        );
        if let Some(c) = a.coincidence {
            line(
                "ct(f)",
                match c {
                    Coincidence::Threshold(q) => q.to_string(),
                    Coincidence::BeyondRange => "beyond computed range".into(),
                },
            );
        }
        if let Some(m) = &a.milnor {
            line("m(f)", join(m.iter().map(|v| v.to_string())));
        }
        line(
            &format!("n(f) [{}]", a.vector.source().as_str()),
            join(a.vector.values().iter().map(|v| opt(*v))),
        );
        if a.extended_search {
            line("note", format!("generator search extended to degree {}", a.searched_to.unwrap_or(0)));
        }
        writeln!(out, "\nchecks").unwrap();
        for CheckEntry { name, status, detail } in &a.checks {
            let s = match status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::NotApplicable => "n/a ",
            };
            writeln!(out, "  {s}  {name:<28}{detail}").unwrap();
        }
        for run in &self.runs {
            let phases: Vec<String> = run
                .timings
                .iter()
                .map(|t| format!("{} {} ms", t.phase, t.millis))
                .collect();
            let label = if run.prime == 0 { "Q".to_string() } else { format!("p = {}", run.prime) };
            writeln!(out, "\ntimings {label}: {}", phases.join(", ")).unwrap();
        }
        writeln!(out, "\nstatus: {}", if self.passed() { "pass" } else { "FAIL" }).unwrap();
        out
    }
}

fn tuple(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("({})", parts.join(", "))
}

fn opt(v: Option<i64>) -> String {
    v.map_or("?".to_string(), |x| x.to_string())
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(" ")
}

fn field_label(cfg: &FieldConfig) -> String {
    match (cfg.kind, cfg.modulus) {
        (FieldKind::Rational, _) => "rational".into(),
        (FieldKind::PrimeField, Some(p)) => format!("gfp:{p}"),
        (FieldKind::PrimeField, None) => "gfp".into(),
    }
}

/// Runs one analysis request. `polynomial` may be absent for formula-only
/// runs, which then need `degree` and the exponents.
pub fn run(
    polynomial: Option<&str>,
    degree: Option<usize>,
    cfg: &RunConfig,
) -> Result<AnalysisReport, AnalysisError> {
    let options = CheckOptions { nodal: cfg.nodal };
    let f = polynomial.map(parse_poly).transpose()?;
    let d = match (&f, degree) {
        (Some(f), Some(d)) if f.degree() != d => {
            return Err(AnalysisError::Usage(format!(
                "--degree {d} but the polynomial has degree {}",
                f.degree()
            )))
        }
        (Some(f), _) => f.degree(),
        (None, Some(d)) => d,
        (None, None) => return Err(AnalysisError::Usage("give a polynomial or --degree".into())),
    };
    if d < 2 {
        return Err(AnalysisError::DegreeTooSmall(d));
    }
    let formula_only = f.is_none() || cfg.skip_oracle || (d > cfg.max_degree_cap && !cfg.force_oracle);
    let mut echo = InputEcho {
        polynomial: f.as_ref().map(|f| f.to_text(&RationalField)),
        degree: d,
        field: field_label(&cfg.field),
        seed: cfg.field.seed,
        primes: Vec::new(),
        mode: if formula_only { "formula-only" } else { "oracle" }.into(),
    };

    let (mut analysis, runs) = if formula_only {
        let Some(exponents) = &cfg.exponents else {
            return Err(if f.is_some() && !cfg.skip_oracle {
                AnalysisError::OracleSkipped {
                    degree: d,
                    cap: cfg.max_degree_cap,
                }
            } else {
                AnalysisError::Usage("formula-only runs need --exponents".into())
            });
        };
        let a = analyze_formulas(d, exponents, cfg.tau, &options)?;
        let runs = vec![PrimeTimings {
            prime: 0,
            timings: a.timings.clone(),
        }];
        (a, runs)
    } else {
        let f = f.expect("oracle runs have a polynomial");
        if cfg.field.kind == FieldKind::PrimeField {
            cfg.field.validate(d)?;
        }
        let (a, runs) = oracle_runs(&f, cfg, &options)?;
        echo.primes = runs.iter().map(|r| r.prime).filter(|&p| p != 0).collect();
        (a, runs)
    };
    if !formula_only {
        supplied_checks(&mut analysis, cfg);
    }
    let status = if analysis.all_pass() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(AnalysisReport {
        schema: SCHEMA.to_string(),
        input: echo,
        analysis,
        runs,
        status,
    })
}

/// Compares exponents or `τ` given on the command line with the computed ones.
fn supplied_checks(a: &mut Analysis, cfg: &RunConfig) {
    if let Some(e) = &cfg.exponents {
        let mut e = e.clone();
        e.sort_unstable();
        a.checks.push(CheckEntry {
            name: "supplied-exponents".into(),
            status: if e == a.exponents { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: format!("supplied {}, computed {}", tuple(&e), tuple(&a.exponents)),
        });
    }
    if let Some(t) = cfg.tau {
        a.checks.push(CheckEntry {
            name: "supplied-tau".into(),
            status: if t == a.tau { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: format!("supplied {t}, computed {}", a.tau),
        });
    }
}

/// Oracle runs until two primes give identical outcomes, or once over `Q`.
fn oracle_runs(
    f: &HomogeneousPoly<RationalField>,
    cfg: &RunConfig,
    options: &CheckOptions,
) -> Result<(Analysis, Vec<PrimeTimings>), AnalysisError> {
    if cfg.field.kind == FieldKind::Rational {
        let engine = CurveEngine::new(RationalField, f.clone())?.with_strategy(cfg.strategy);
        let a = analyze(&engine, options)?;
        let runs = vec![PrimeTimings {
            prime: 0,
            timings: a.timings.clone(),
        }];
        return Ok((a, runs));
    }
    let mut done: Vec<(u64, Analysis)> = Vec::new();
    let mut problems = Vec::new();
    for field in cfg.field.primes().take(MAX_PRIMES) {
        let p = field.modulus();
        let reduced = match f.reduce(&field) {
            Ok(g) => g,
            Err(FieldError::BadPrime { .. }) => {
                problems.push(format!("p = {p} divides a denominator"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let engine = CurveEngine::new(field, reduced)?.with_strategy(cfg.strategy);
        match analyze(&engine, options) {
            Ok(a) => {
                let outcome = a.outcome();
                if let Some((q, first)) = done.iter().find(|(_, b)| b.outcome() == outcome) {
                    let runs = vec![
                        PrimeTimings {
                            prime: *q,
                            timings: first.timings.clone(),
                        },
                        PrimeTimings {
                            prime: p,
                            timings: a.timings.clone(),
                        },
                    ];
                    return Ok((first.clone(), runs));
                }
                if !done.is_empty() {
                    problems.push(format!("p = {p} disagrees with earlier primes"));
                }
                done.push((p, a));
            }
            Err(e) if e.is_input_error() => return Err(e),
            Err(e) => problems.push(format!("p = {p}: {e}")),
        }
    }
    Err(AnalysisError::PrimeDisagreement(problems.join("; ")))
}
