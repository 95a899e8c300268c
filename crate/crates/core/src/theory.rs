//! Closed-form descriptions of `n(f)` and related numerical invariants.
//!
//! Every evaluator here is a pure integer function of the degree, the
//! exponents, `τ` and `r = mdr(f)`; none of them looks at the equation.
//! Half-plane formulas are evaluated on `0..=T/2` and mirrored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::AnalysisError;
use crate::graded::{top_degree, SmoothReferenceHilbert};
use crate::hilbert::{HilbertVector, Source};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula does not apply: {0}")]
    Precondition(String),
    #[error("formula gives the negative value {value} in degree {k}")]
    Negative { k: usize, value: i64 },
    #[error("formula branches disagree: {0}")]
    Inconsistent(String),
}

/// `C(n, 2)`, zero for `n < 2`.
pub fn binom2(n: i64) -> i64 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

/// Upper bound for `τ` of a non free curve with `2r >= d`; attained exactly
/// by maximal Tjurina curves.
pub fn tau_max(d: usize, r: usize) -> i64 {
    let (d, r) = (d as i64, r as i64);
    (d - 1) * (d - r - 1) + r * r - binom2(2 * r - d + 2)
}

/// The parabola through the center of `n(f)` for curves with `2r >= d`.
pub fn central_parabola(d: usize, tau: usize, j: i64) -> i64 {
    let h = (d / 2) as i64;
    let tau = tau as i64;
    if d % 2 == 1 {
        3 * h * h - (j - 3 * h + 2) * (j - 3 * h + 1) - tau
    } else {
        3 * h * h - 3 * h + 1 - (j - 3 * h + 3).pow(2) - tau
    }
}

/// Central values of `n(f)` for a non free curve.
///
/// For `2r >= d` the parabola on `[2d-4-r, d-2+r]`; otherwise `ν` on
/// `[d+r-3, 2d-r-3]` with `ν - 1` just outside. The plateau needs `ν`;
/// without it that case yields no values.
pub fn central_window(d: usize, r: usize, tau: usize, nu: Option<i64>) -> HilbertVector {
    let t = top_degree(d);
    let mut h = HilbertVector::unknown(t, Source::Formula);
    let (d, r) = (d as i64, r as i64);
    if 2 * r >= d {
        for j in (2 * d - 4 - r).max(0)..=(d - 2 + r).min(t as i64) {
            h.set(j, central_parabola(d as usize, tau, j));
        }
    } else if let Some(nu) = nu {
        for j in d + r - 3..=2 * d - r - 3 {
            h.set(j, nu);
        }
        h.set(d + r - 4, nu - 1);
        h.set(2 * d - r - 2, nu - 1);
    }
    h
}

fn check_sorted(exponents: &[usize]) -> Result<(), FormulaError> {
    if exponents.is_empty() || exponents[0] == 0 || exponents.windows(2).any(|w| w[0] > w[1]) {
        return Err(FormulaError::Precondition(format!(
            "exponents {exponents:?} must be positive and sorted"
        )));
    }
    Ok(())
}

fn finish(mut h: HilbertVector) -> Result<HilbertVector, FormulaError> {
    h.mirror_left_half();
    for k in 0..=h.t() {
        if let Some(v) = h.get(k as i64) {
            if v < 0 {
                return Err(FormulaError::Negative { k, value: v });
            }
        }
    }
    Ok(h)
}

/// Break points of the piecewise description of a three-syzygy curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeSyzygyShape {
    pub sigma: i64,
    pub k1: i64,
    pub k2: i64,
    pub k3: i64,
    /// First degree handled by the central description.
    pub t0: i64,
}

impl ThreeSyzygyShape {
    /// `σ = 3(d-1) - (d1+d2+d3)` and `k_i = 2(d-1) - d_i`.
    pub fn new(d: usize, exponents: [usize; 3]) -> Self {
        let di = d as i64;
        let k = |x: usize| 2 * (di - 1) - x as i64;
        let d1 = exponents[0];
        let k1 = k(d1);
        Self {
            sigma: 3 * (di - 1) - exponents.iter().sum::<usize>() as i64,
            k1,
            k2: k(exponents[1]),
            k3: k(exponents[2]),
            t0: if 2 * d1 >= d { k1 - 1 } else { di + d1 as i64 - 2 },
        }
    }

    /// `C(k-σ+2,2) - C(k-k3+2,2) - C(k-k2+2,2)`, valid below `t0`.
    pub fn binomial(&self, k: i64) -> i64 {
        binom2(k - self.sigma + 2) - binom2(k - self.k3 + 2) - binom2(k - self.k2 + 2)
    }
}

/// `n(f)` of a curve with three generators that is not plus-one generated.
///
/// Below `t0` the binomial expression of [`ThreeSyzygyShape`]; from `t0` to
/// `T/2` the central description. Where both apply they must agree.
pub fn three_syzygy(d: usize, exponents: [usize; 3], tau: usize) -> Result<HilbertVector, FormulaError> {
    check_sorted(&exponents)?;
    let [d1, d2, d3] = exponents;
    if d1 + d2 <= d || d3 > d - 1 {
        return Err(FormulaError::Precondition(format!(
            "need d1 + d2 > d and d3 <= d - 1, got {exponents:?} with d = {d}"
        )));
    }
    let t = top_degree(d) as i64;
    let shape = ThreeSyzygyShape::new(d, exponents);
    let nu = (2 * d1 < d).then(|| shape.binomial(shape.t0 - 1));
    let central = central_window(d, d1, tau, nu);

    let mut h = HilbertVector::unknown(t as usize, Source::Formula);
    for j in 0..=t / 2 {
        let value = if j < shape.t0 {
            let u = shape.binomial(j);
            if let Some(c) = central.get(j).filter(|&c| c != u) {
                return Err(FormulaError::Inconsistent(format!(
                    "degree {j}: binomial branch gives {u}, central description {c}"
                )));
            }
            u
        } else {
            central.get(j).ok_or_else(|| {
                FormulaError::Inconsistent(format!("no central value in degree {j}"))
            })?
        };
        h.set(j, value);
    }
    finish(h)
}

/// `n(f)` of a plus-one generated curve (`d1 + d2 = d`, `d3 >= d2`); nearly
/// free when `d2 = d3`.
pub fn plus_one(d: usize, exponents: [usize; 3]) -> Result<HilbertVector, FormulaError> {
    check_sorted(&exponents)?;
    let [d1, d2, d3] = exponents;
    if d1 + d2 != d {
        return Err(FormulaError::Precondition(format!(
            "need d1 + d2 = d, got {exponents:?} with d = {d}"
        )));
    }
    let t = top_degree(d) as i64;
    let k = |x: usize| 2 * d as i64 - x as i64 - 3;
    let (k2, k3) = (k(d2), k(d3));
    let nu = (d3 - d2 + 1) as i64;
    let mut h = HilbertVector::unknown(t as usize, Source::Formula);
    for j in 0..=t / 2 {
        let v = if j < k3 {
            0
        } else if j <= k2 {
            j - k3 + 1
        } else {
            nu
        };
        h.set(j, v);
    }
    finish(h)
}

/// `n(f)` of a maximal Tjurina curve with `2r >= d`: the parabola on
/// `[2d-3-r, d-3+r]` and zero elsewhere.
pub fn maximal_tjurina(d: usize, r: usize, tau: usize) -> Result<HilbertVector, FormulaError> {
    if 2 * r < d {
        return Err(FormulaError::Precondition(format!("need 2r >= d, got r = {r}, d = {d}")));
    }
    if tau as i64 != tau_max(d, r) {
        return Err(FormulaError::Precondition(format!(
            "τ = {tau} but a maximal Tjurina curve has τ = {}",
            tau_max(d, r)
        )));
    }
    let t = top_degree(d) as i64;
    let (lo, hi) = (2 * d as i64 - 3 - r as i64, d as i64 - 3 + r as i64);
    let mut h = HilbertVector::unknown(t as usize, Source::Formula);
    for j in 0..=t {
        let v = if (lo..=hi).contains(&j) { central_parabola(d, tau, j) } else { 0 };
        h.set(j, v);
    }
    if h.get(lo) <= Some(0) {
        return Err(FormulaError::Inconsistent(format!(
            "value at σ = {lo} is {:?}, expected positive",
            h.get(lo)
        )));
    }
    finish(h)
}

/// User-asserted facts about a nodal curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalMetadata {
    pub nodes: usize,
    pub components: usize,
    pub rational_components: bool,
}

/// `n(f)` of a nodal curve from the smooth reference `m(f_s)`.
///
/// Exact on `[d-3, T/2]`; below `d-3` zero when all components are
/// rational and unknown otherwise.
pub fn nodal(d: usize, meta: &NodalMetadata, tau: usize) -> Result<HilbertVector, FormulaError> {
    if d < 4 {
        return Err(FormulaError::Precondition(format!("need d >= 4, got {d}")));
    }
    if meta.nodes != tau {
        return Err(FormulaError::Precondition(format!(
            "{} nodes asserted but τ = {tau}",
            meta.nodes
        )));
    }
    if meta.components == 0 {
        return Err(FormulaError::Precondition("a curve has at least one component".into()));
    }
    let t = top_degree(d) as i64;
    let smooth = SmoothReferenceHilbert::new(d);
    let ms = |k: i64| smooth.value(k) as i64;
    let nodes = meta.nodes as i64;
    let edge = d as i64 - 3;
    let mut h = HilbertVector::unknown(t as usize, Source::Formula);
    h.set(edge, ms(edge) - nodes + meta.components as i64 - 1);
    for k in edge + 1..=t / 2 {
        h.set(k, ms(k) - nodes);
    }
    if meta.rational_components {
        if h.get(edge) != Some(0) {
            return Err(FormulaError::Inconsistent(format!(
                "rational components force n_{edge} = 0, the count gives {:?}",
                h.get(edge)
            )));
        }
        for k in 0..edge {
            h.set(k, 0);
        }
    }
    finish(h)
}

/// Numerical invariants of the normalized rank two bundle attached to the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleInvariants {
    pub d_prime: usize,
    pub c1: i64,
    pub c2: i64,
    pub stable: bool,
    pub semistable: bool,
}

pub fn bundle_invariants(d: usize, tau: usize, r: usize) -> BundleInvariants {
    let h = (d / 2) as i64;
    let tau = tau as i64;
    let (c1, c2) = if d % 2 == 1 {
        (0, 3 * h * h - tau)
    } else {
        (-1, 3 * h * h - 3 * h + 1 - tau)
    };
    BundleInvariants {
        d_prime: d / 2,
        c1,
        c2,
        stable: 2 * r >= d,
        semistable: 2 * r + 1 >= d,
    }
}

/// Lower bound for `σ(C)` when `2r >= d-1`; `None` otherwise.
pub fn hartshorne_sigma_bound(d: usize, r: usize, tau: usize) -> Option<i64> {
    if 2 * r + 1 < d {
        return None;
    }
    let (h, r, tau) = ((d / 2) as i64, r as i64, tau as i64);
    let base = tau - 2 * h * h - 2 * r * h + r * r;
    Some(if d % 2 == 1 {
        base + 3 * h - 1
    } else {
        base + 5 * h + r - 3
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CurveTag {
    PencilOfLines,
    Smooth,
    Free,
    NearlyFree,
    PlusOneGenerated { level: usize },
    ThreeSyzygy,
    MSyzygy { m: usize },
}

impl CurveTag {
    pub fn label(&self) -> String {
        match self {
            CurveTag::PencilOfLines => "pencil-of-lines".into(),
            CurveTag::Smooth => "smooth".into(),
            CurveTag::Free => "free".into(),
            CurveTag::NearlyFree => "nearly-free".into(),
            CurveTag::PlusOneGenerated { level } => format!("plus-one-generated(level {level})"),
            CurveTag::ThreeSyzygy => "three-syzygy".into(),
            CurveTag::MSyzygy { m } => format!("{m}-syzygy"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClass {
    pub tag: CurveTag,
    pub maximal_tjurina: bool,
    pub stable: bool,
    pub semistable: bool,
    pub exponents: Vec<usize>,
    pub m: usize,
    pub tau: usize,
    pub r: usize,
}

impl CurveClass {
    pub fn pencil_of_lines(tau: usize) -> Self {
        Self {
            tag: CurveTag::PencilOfLines,
            maximal_tjurina: false,
            stable: false,
            semistable: false,
            exponents: Vec::new(),
            m: 0,
            tau,
            r: 0,
        }
    }
}

/// Classifies from the resolution degrees. Both descriptions of maximal
/// Tjurina curves are evaluated; disagreement means the degrees are wrong.
pub fn classify(
    d: usize,
    exponents: &[usize],
    second: &[usize],
    tau: usize,
) -> Result<CurveClass, AnalysisError> {
    let m = exponents.len();
    if m < 2 || exponents.windows(2).any(|w| w[0] > w[1]) {
        return Err(AnalysisError::Inconsistent(format!(
            "exponents {exponents:?} are not a sorted list of at least two degrees"
        )));
    }
    let r = exponents[0];
    if r == 0 {
        return Ok(CurveClass::pencil_of_lines(tau));
    }
    let plus_one = m == 3 && exponents[0] + exponents[1] == d;
    let tag = if tau == 0 {
        CurveTag::Smooth
    } else if m == 2 {
        CurveTag::Free
    } else if plus_one && exponents[1] == exponents[2] {
        CurveTag::NearlyFree
    } else if plus_one {
        CurveTag::PlusOneGenerated { level: exponents[2] }
    } else if m == 3 {
        CurveTag::ThreeSyzygy
    } else {
        CurveTag::MSyzygy { m }
    };
    let mut maximal_tjurina = false;
    if 2 * r >= d && m >= 3 {
        let by_tau = tau as i64 == tau_max(d, r);
        let by_pattern = exponents.iter().all(|&x| x == r)
            && second.iter().all(|&e| e == d + r)
            && m == 2 * r + 3 - d;
        if by_tau != by_pattern {
            return Err(AnalysisError::Inconsistent(format!(
                "maximal Tjurina tests disagree: τ test {by_tau}, degree pattern {by_pattern}"
            )));
        }
        maximal_tjurina = by_tau;
    }
    Ok(CurveClass {
        tag,
        maximal_tjurina,
        stable: 2 * r >= d,
        semistable: 2 * r + 1 >= d,
        exponents: exponents.to_vec(),
        m,
        tau,
        r,
    })
}
