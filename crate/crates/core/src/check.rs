//! Runs the oracle and every applicable closed-form description on one
//! curve over one field, and records each comparison as a check entry.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::field::Field;
use crate::graded::{coincidence_threshold, top_degree, Coincidence, CurveEngine, MilnorHilbert};
use crate::hilbert::{HilbertVector, Source};
use crate::poly::basis_dim;
use crate::syzygy::{
    second_syzygy_degrees, sigma_from_resolution, tau_from_resolution, HilbertNumerator, SearchHint,
};
use crate::theory::{
    self, bundle_invariants, classify, hartshorne_sigma_bound, BundleInvariants, CurveClass, CurveTag,
    FormulaError, NodalMetadata,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// A closed-form vector that was evaluated, kept for plotting and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaVector {
    pub name: String,
    pub values: Vec<Option<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub phase: String,
    pub millis: u64,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub nodal: Option<NodalMetadata>,
}

/// Everything known about one curve after a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub d: usize,
    pub t: usize,
    pub tau: usize,
    pub r: usize,
    pub m: usize,
    pub exponents: Vec<usize>,
    pub second: Vec<usize>,
    pub eps: Vec<usize>,
    pub sigma: Option<i64>,
    pub nu: Option<i64>,
    /// `m(f)_k` for `k = 0..=T+2`, absent in formula-only runs.
    pub milnor: Option<Vec<usize>>,
    /// The oracle vector, or the best formula vector in formula-only runs.
    pub vector: HilbertVector,
    pub class: CurveClass,
    pub bundle: BundleInvariants,
    pub hartshorne_bound: Option<i64>,
    pub coincidence: Option<Coincidence>,
    pub searched_to: Option<usize>,
    pub extended_search: bool,
    pub formulas: Vec<FormulaVector>,
    pub checks: Vec<CheckEntry>,
    pub timings: Vec<PhaseTiming>,
}

impl Analysis {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The analysis without timings; equal for two faithful primes.
    pub fn outcome(&self) -> Analysis {
        Analysis {
            timings: Vec::new(),
            ..self.clone()
        }
    }
}

#[derive(Default)]
struct Checks(Vec<CheckEntry>);

impl Checks {
    fn push(&mut self, name: &str, status: CheckStatus, detail: impl Into<String>) {
        self.0.push(CheckEntry {
            name: name.to_string(),
            status,
            detail: detail.into(),
        });
    }

    fn expect(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.push(name, status, detail);
    }

    fn skip(&mut self, name: &str, why: impl Into<String>) {
        self.push(name, CheckStatus::NotApplicable, why);
    }

    /// Compares a formula result with a reference vector.
    fn vector(
        &mut self,
        name: &str,
        formula: Result<HilbertVector, FormulaError>,
        reference: Option<&HilbertVector>,
        formulas: &mut Vec<FormulaVector>,
    ) -> Option<HilbertVector> {
        match formula {
            Err(FormulaError::Precondition(why)) => {
                self.skip(name, why);
                None
            }
            Err(e) => {
                self.expect(name, false, e.to_string());
                None
            }
            Ok(h) => {
                formulas.push(FormulaVector {
                    name: name.to_string(),
                    values: h.values().to_vec(),
                });
                match reference {
                    Some(r) => {
                        let bad = h.disagreements(r);
                        let detail = if bad.is_empty() {
                            format!("agrees in {} degrees", h.overlap(r))
                        } else {
                            let shown: Vec<String> = bad
                                .iter()
                                .take(5)
                                .map(|(k, a, b)| format!("n_{k}: formula {a}, reference {b}"))
                                .collect();
                            format!("{} disagreements: {}", bad.len(), shown.join("; "))
                        };
                        self.expect(name, bad.is_empty(), detail);
                    }
                    None => self.expect(name, true, "evaluated"),
                }
                Some(h)
            }
        }
    }
}

fn elapsed(timings: &mut Vec<PhaseTiming>, phase: &str, start: Instant) {
    timings.push(PhaseTiming {
        phase: phase.to_string(),
        millis: start.elapsed().as_millis() as u64,
    });
}

/// Oracle run plus every applicable comparison.
pub fn analyze<F: Field>(engine: &CurveEngine<F>, options: &CheckOptions) -> Result<Analysis, AnalysisError> {
    let d = engine.degree();
    let t = engine.t();
    let mut timings = Vec::new();

    let start = Instant::now();
    let oracle = engine.oracle()?;
    elapsed(&mut timings, "oracle", start);
    let milnor = oracle.milnor;
    let module = oracle.module;
    let tau = milnor.tau();
    let vector = module.to_hilbert_vector();
    let sigma = module.sigma().map(|s| s as i64);
    let nu = Some(module.nu() as i64);

    let start = Instant::now();
    let hint = match module.sigma() {
        Some(s) => SearchHint::Sigma(s),
        None => SearchHint::Free,
    };
    let profile = match engine.resolution(&milnor, hint) {
        Ok(p) => Some(p),
        Err(AnalysisError::PencilOfLines) => None,
        Err(e) => return Err(e),
    };
    elapsed(&mut timings, "resolution", start);

    let mut checks = Checks::default();
    let mut formulas = Vec::new();
    let coincidence = coincidence_threshold(&milnor);
    milnor_checks(&mut checks, &milnor);

    let Some(profile) = profile else {
        let class = CurveClass::pencil_of_lines(tau);
        checks.skip("resolution", "pencil of lines: a syzygy of degree 0");
        return Ok(Analysis {
            d,
            t,
            tau,
            r: 0,
            m: 0,
            exponents: Vec::new(),
            second: Vec::new(),
            eps: Vec::new(),
            sigma,
            nu,
            milnor: Some(milnor.values().to_vec()),
            vector,
            class,
            bundle: bundle_invariants(d, tau, 0),
            hartshorne_bound: None,
            coincidence: Some(coincidence),
            searched_to: None,
            extended_search: false,
            formulas,
            checks: checks.0,
            timings,
        });
    };

    let start = Instant::now();
    let lowest = engine.syzygy_piece(profile.mdr());
    checks.expect(
        "syzygy-equation",
        lowest.verify(engine),
        format!("{} syzygies of degree {} multiplied back", lowest.dimension(), profile.mdr()),
    );
    elapsed(&mut timings, "syzygy-verification", start);

    let start = Instant::now();
    let class = classify(d, &profile.exponents, &profile.second, tau)?;
    let r = profile.mdr();
    let numerator = HilbertNumerator::from_milnor(&milnor);
    checks.expect(
        "balance-identity",
        second_syzygy_degrees(d, &profile.exponents, &numerator).is_ok(),
        format!("e = {:?}, eps = {:?}", profile.second, profile.eps),
    );
    let tau_back = tau_from_resolution(d, &profile.exponents, &profile.second);
    checks.expect(
        "tau-from-resolution",
        tau_back.as_ref().ok() == Some(&tau),
        match &tau_back {
            Ok(v) => format!("{v} from the degrees, τ = {tau}"),
            Err(e) => e.to_string(),
        },
    );
    match (sigma_from_resolution(d, &profile.second), sigma) {
        (Some(a), Some(b)) => checks.expect("sigma-from-resolution", a == b, format!("3(d-1) - e = {a}, oracle {b}")),
        (None, None) => checks.expect("sigma-from-resolution", true, "free: no second syzygies and N(f) = 0"),
        (a, b) => checks.expect("sigma-from-resolution", false, format!("resolution {a:?}, oracle {b:?}")),
    }
    checks.expect(
        "free-iff-nu-zero",
        (profile.m == 2) == (module.nu() == 0),
        format!("m = {}, ν = {}", profile.m, module.nu()),
    );
    match coincidence {
        Coincidence::BeyondRange => checks.expect("coincidence-threshold-bound", true, "beyond computed range"),
        Coincidence::Threshold(q) => checks.expect(
            "coincidence-threshold-bound",
            q + 2 >= d + r,
            format!("ct = {q} >= d - 2 + r = {}", d + r - 2),
        ),
    }
    formula_checks(
        &mut checks,
        &mut formulas,
        FormulaInputs {
            d,
            tau,
            exponents: &profile.exponents,
            second: &profile.second,
            class: &class,
            sigma,
            nu,
            nodal: options.nodal.as_ref(),
        },
        Some(&vector),
    );
    elapsed(&mut timings, "formulas", start);

    Ok(Analysis {
        d,
        t,
        tau,
        r,
        m: profile.m,
        exponents: profile.exponents.clone(),
        second: profile.second.clone(),
        eps: profile.eps.clone(),
        sigma,
        nu,
        milnor: Some(milnor.values().to_vec()),
        vector,
        bundle: bundle_invariants(d, tau, r),
        hartshorne_bound: hartshorne_sigma_bound(d, r, tau),
        class,
        coincidence: Some(coincidence),
        searched_to: Some(profile.searched_to),
        extended_search: profile.extended,
        formulas,
        checks: checks.0,
        timings,
    })
}

/// Formula-only run from the exponents; `τ` is derived when there are three
/// generators and checked against `tau` if that is given too.
pub fn analyze_formulas(
    d: usize,
    exponents: &[usize],
    tau: Option<usize>,
    options: &CheckOptions,
) -> Result<Analysis, AnalysisError> {
    if d < 2 {
        return Err(AnalysisError::DegreeTooSmall(d));
    }
    let mut exponents = exponents.to_vec();
    exponents.sort_unstable();
    let t = top_degree(d);
    let start = Instant::now();
    let second: Vec<usize> = match exponents.len() {
        2 => Vec::new(),
        3 => vec![exponents.iter().sum()],
        m => {
            return Err(AnalysisError::BalanceViolation(format!(
                "formula-only runs need two or three exponents, got {m}"
            )))
        }
    };
    let derived = tau_from_resolution(d, &exponents, &second)?;
    let mut checks = Checks::default();
    if let Some(given) = tau {
        checks.expect("tau-from-resolution", given == derived, format!("given {given}, from exponents {derived}"));
    }
    let tau = tau.unwrap_or(derived);
    let class = classify(d, &exponents, &second, tau)?;
    let r = exponents[0];
    let sigma = sigma_from_resolution(d, &second);
    let eps: Vec<usize> = second
        .iter()
        .enumerate()
        .map(|(j, &e)| e as i64 - (d + exponents[j + 2]) as i64 + 1)
        .map(|x| x.max(0) as usize)
        .collect();
    checks.expect("second-syzygy-excess", eps.iter().all(|&x| x >= 1), format!("eps = {eps:?}"));

    let mut formulas = Vec::new();
    formula_checks(
        &mut checks,
        &mut formulas,
        FormulaInputs {
            d,
            tau,
            exponents: &exponents,
            second: &second,
            class: &class,
            sigma,
            nu: None,
            nodal: options.nodal.as_ref(),
        },
        None,
    );
    let vector = if class.m == 2 {
        HilbertVector::from_values(vec![0; t + 1], Source::Formula)
    } else {
        formulas
            .iter()
            .filter(|f| f.name != "central-window")
            .max_by_key(|f| f.values.iter().filter(|v| v.is_some()).count())
            .map(|f| {
                let mut h = HilbertVector::unknown(t, Source::Formula);
                for (k, v) in f.values.iter().enumerate() {
                    if let Some(v) = v {
                        h.set(k as i64, *v);
                    }
                }
                h
            })
            .unwrap_or_else(|| HilbertVector::unknown(t, Source::Formula))
    };
    let nu = vector.get((t / 2) as i64);
    if let (Some(s), Some(first)) = (sigma, vector.known_degrees().find(|&k| vector.get(k as i64) != Some(0))) {
        if vector.is_complete() {
            checks.expect("sigma-from-resolution", s == first as i64, format!("3(d-1) - e = {s}, formula vector starts at {first}"));
        }
    }
    let mut timings = Vec::new();
    elapsed(&mut timings, "formulas", start);
    Ok(Analysis {
        d,
        t,
        tau,
        r,
        m: exponents.len(),
        exponents,
        second,
        eps,
        sigma,
        nu,
        milnor: None,
        vector,
        bundle: bundle_invariants(d, tau, r),
        hartshorne_bound: hartshorne_sigma_bound(d, r, tau),
        class,
        coincidence: None,
        searched_to: None,
        extended_search: false,
        formulas,
        checks: checks.0,
        timings,
    })
}

fn milnor_checks(checks: &mut Checks, milnor: &MilnorHilbert) {
    let d = milnor.degree();
    let bad = (0..d - 1).find(|&k| milnor.value(k as i64) != basis_dim(k as i64));
    checks.expect(
        "milnor-initial-segment",
        bad.is_none(),
        match bad {
            None => format!("m(f)_k = dim S_k for k < {}", d - 1),
            Some(k) => format!("m(f)_{k} = {}", milnor.value(k as i64)),
        },
    );
}

struct FormulaInputs<'a> {
    d: usize,
    tau: usize,
    exponents: &'a [usize],
    second: &'a [usize],
    class: &'a CurveClass,
    sigma: Option<i64>,
    nu: Option<i64>,
    nodal: Option<&'a NodalMetadata>,
}

/// Evaluates every formula whose hypotheses hold. With a reference vector
/// (the oracle) each is compared to it; without one they are compared with
/// each other where they overlap.
fn formula_checks(
    checks: &mut Checks,
    formulas: &mut Vec<FormulaVector>,
    input: FormulaInputs<'_>,
    reference: Option<&HilbertVector>,
) {
    let FormulaInputs {
        d,
        tau,
        exponents,
        second,
        class,
        sigma,
        nu,
        nodal,
    } = input;
    let m = exponents.len();
    let r = exponents[0];
    let three = |e: &[usize]| -> Option<[usize; 3]> { e.try_into().ok() };

    if m == 3 {
        let e_sum: usize = exponents.iter().sum();
        checks.expect(
            "second-syzygy-sum",
            second == [e_sum],
            format!("e = {second:?}, d1 + d2 + d3 = {e_sum}"),
        );
    } else {
        checks.skip("second-syzygy-sum", format!("m = {m}"));
    }

    let three_syzygy = if let Some(ex) = three(exponents) {
        if ex[0] + ex[1] > d {
            checks.expect(
                "exponent-bounds",
                ex[2] < d,
                format!("d1 + d2 = {} > d, d3 = {} <= d - 1", ex[0] + ex[1], ex[2]),
            );
            checks.vector("three-syzygy-formula", theory::three_syzygy(d, ex, tau), reference, formulas)
        } else {
            checks.skip("exponent-bounds", "plus-one generated");
            checks.skip("three-syzygy-formula", "d1 + d2 = d");
            None
        }
    } else {
        checks.skip("exponent-bounds", format!("m = {m}"));
        checks.skip("three-syzygy-formula", format!("m = {m}"));
        None
    };

    let plus_one = match (class.tag, three(exponents)) {
        (CurveTag::NearlyFree | CurveTag::PlusOneGenerated { .. }, Some(ex)) => {
            let h = checks.vector("plus-one-formula", theory::plus_one(d, ex), reference, formulas);
            if class.tag == CurveTag::NearlyFree {
                let s = (d + ex[0] - 3) as i64;
                let ok = match (sigma, nu) {
                    (Some(a), Some(b)) => a == s && b == 1,
                    _ => h.as_ref().is_some_and(|h| h.get(s) == Some(1) && h.get(s - 1) == Some(0)),
                };
                checks.expect("nearly-free-shape", ok, format!("σ = d + d1 - 3 = {s}, ν = 1"));
            } else {
                checks.skip("nearly-free-shape", "not nearly free");
            }
            h
        }
        _ => {
            checks.skip("plus-one-formula", "not plus-one generated");
            checks.skip("nearly-free-shape", "not nearly free");
            None
        }
    };

    // The central description needs ν on the plateau; formula-only runs take
    // it from whichever full formula applies.
    let best = reference.cloned().or(three_syzygy.clone()).or(plus_one.clone());
    if m >= 3 {
        let t = top_degree(d);
        let nu_here = nu.or_else(|| best.as_ref().and_then(|h| h.get((t / 2) as i64)));
        let central = theory::central_window(d, r, tau, nu_here);
        if central.known_degrees().next().is_none() {
            checks.skip("central-window", "plateau height unknown");
        } else {
            let against = reference.or(best.as_ref());
            checks.vector("central-window", Ok(central), against, formulas);
        }
    } else {
        checks.skip("central-window", "free curve");
    }

    if class.maximal_tjurina {
        let h = checks.vector("maximal-tjurina-formula", theory::maximal_tjurina(d, r, tau), reference.or(best.as_ref()), formulas);
        let s = 2 * d as i64 - r as i64 - 3;
        let first = sigma.or_else(|| h.as_ref().and_then(|h| h.known_degrees().find(|&k| h.get(k as i64) != Some(0)).map(|k| k as i64)));
        checks.expect("maximal-tjurina-sigma", first == Some(s), format!("σ = {first:?}, 2d - r - 3 = {s}"));
        let bound = hartshorne_sigma_bound(d, r, tau);
        checks.expect("hartshorne-equality", bound == Some(s), format!("bound {bound:?}, σ = {s}"));
    } else {
        checks.skip("maximal-tjurina-formula", "not maximal Tjurina");
    }

    if let Some(meta) = nodal {
        checks.expect("nodal-node-count", meta.nodes == tau, format!("{} nodes, τ = {tau}", meta.nodes));
        checks.expect("nodal-mdr", r + 2 >= d, format!("r = {r} >= d - 2 = {}", d as i64 - 2));
        checks.vector("nodal-formula", theory::nodal(d, meta, tau), reference.or(best.as_ref()), formulas);
    }

    let sigma_known = sigma.or_else(|| {
        best.as_ref()
            .filter(|h| h.is_complete())
            .and_then(|h| h.known_degrees().find(|&k| h.get(k as i64) != Some(0)).map(|k| k as i64))
    });
    match (hartshorne_sigma_bound(d, r, tau), sigma_known) {
        (None, _) => checks.skip("hartshorne-bound", format!("r = {r} < (d-1)/2")),
        (Some(_), None) if m == 2 => checks.skip("hartshorne-bound", "free: N(f) = 0"),
        (Some(b), None) => checks.skip("hartshorne-bound", format!("bound {b}, σ unknown")),
        (Some(b), Some(s)) => checks.expect("hartshorne-bound", s >= b, format!("σ = {s} >= {b}")),
    }

    let bundle = bundle_invariants(d, tau, r);
    let nu_known = nu.or_else(|| best.as_ref().and_then(|h| h.get((top_degree(d) / 2) as i64)));
    match (bundle.stable, nu_known) {
        (true, Some(v)) => checks.expect("stable-c2-equals-nu", bundle.c2 == v, format!("c2 = {}, ν = {v}", bundle.c2)),
        (true, None) => checks.skip("stable-c2-equals-nu", "ν unknown"),
        (false, _) => checks.skip("stable-c2-equals-nu", format!("not stable: 2r = {} < d", 2 * r)),
    }
}
