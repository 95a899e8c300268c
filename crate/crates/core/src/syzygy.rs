//! Jacobian syzygies `a f_x + b f_y + c f_z = 0`, the degrees of a minimal
//! generating set of `Syz(J_f)` and the second syzygy degrees forced by the
//! Hilbert series of `M(f)`.
//!
//! With `ℓ_i = d-1+d_i` the minimal resolution of the Milnor algebra gives
//!
//! ```text
//! (1-t)^3 HS(M(f)) = 1 - 3t^{d-1} + Σ t^{ℓ_i} - Σ t^{e_j}
//! ```
//!
//! so once the exponents `d_i` are known the `e_j` are read off the
//! difference, and a nonnegative difference with the right number of terms
//! certifies that no generator is missing.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::field::Field;
use crate::graded::{CurveEngine, MilnorHilbert};
use crate::linalg::{self, RrefResult};
use crate::poly::{basis_dim, monomial_basis, HomogeneousPoly, Monomial, Var};

/// A basis of `Syz(J_f)_k`, each element stored as the coordinates of
/// `(a, b, c)` in `S_k^3` (component-major).
#[derive(Debug, Clone)]
pub struct SyzygyPiece<F: Field> {
    k: usize,
    basis: Vec<Vec<F::Elem>>,
}

impl<F: Field> SyzygyPiece<F> {
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn vectors(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }

    /// Basis elements as polynomial triples `(a, b, c)`.
    pub fn triples(&self, field: &F) -> Vec<[HomogeneousPoly<F>; 3]> {
        let n = basis_dim(self.k as i64);
        self.basis
            .iter()
            .map(|v| {
                [0, 1, 2].map(|i| {
                    HomogeneousPoly::from_coefficient_vector(field, self.k, &v[i * n..(i + 1) * n])
                })
            })
            .collect()
    }

    /// Multiplies every triple back against the partials.
    pub fn verify(&self, engine: &CurveEngine<F>) -> bool {
        let field = engine.field();
        let parts = engine.jacobian().parts();
        self.triples(field).iter().all(|t| {
            let mut sum = HomogeneousPoly::zero(self.k + engine.degree() - 1);
            for (g, p) in t.iter().zip(parts) {
                sum = sum.add(field, &g.mul(field, p));
            }
            sum.is_zero()
        })
    }
}

/// `(1-t)^3 HS(M(f))` as integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertNumerator {
    coefficients: Vec<i64>,
}

impl HilbertNumerator {
    /// The Hilbert function is `m(f)_k` up to `T+2` and `τ` after.
    pub fn from_milnor(milnor: &MilnorHilbert) -> Self {
        let len = milnor.values().len() + 3;
        let h = |k: i64| milnor.value(k) as i64;
        let coefficients = (0..len as i64)
            .map(|n| h(n) - 3 * h(n - 1) + 3 * h(n - 2) - h(n - 3))
            .collect();
        Self::from_coefficients(coefficients)
    }

    /// `1 - 3t^{d-1} + Σ t^{d-1+d_i} - Σ t^{e_j}`.
    pub fn from_resolution(d: usize, exponents: &[usize], second: &[usize]) -> Self {
        let mut c = vec![0i64; 1];
        let mut bump = |n: usize, by: i64| {
            if c.len() <= n {
                c.resize(n + 1, 0);
            }
            c[n] += by;
        };
        bump(0, 1);
        bump(d - 1, -3);
        for &di in exponents {
            bump(d - 1 + di, 1);
        }
        for &e in second {
            bump(e, -1);
        }
        Self::from_coefficients(c)
    }

    fn from_coefficients(mut coefficients: Vec<i64>) -> Self {
        while coefficients.len() > 1 && coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn coefficient(&self, n: usize) -> i64 {
        self.coefficients.get(n).copied().unwrap_or(0)
    }

    /// `P(1)`, `P'(1)` and `P''(1)/2`; for a reduced curve these are `0`, `0`, `τ`.
    pub fn moments(&self) -> (i64, i64, i64) {
        let mut out = (0, 0, 0);
        for (n, &c) in self.coefficients.iter().enumerate() {
            let n = n as i64;
            out.0 += c;
            out.1 += c * n;
            out.2 += c * n * (n - 1);
        }
        (out.0, out.1, out.2 / 2)
    }
}

/// Tjurina number implied by a resolution with the given degrees.
pub fn tau_from_resolution(d: usize, exponents: &[usize], second: &[usize]) -> Result<usize, AnalysisError> {
    let (p0, p1, tau) = HilbertNumerator::from_resolution(d, exponents, second).moments();
    if p0 != 0 || p1 != 0 || tau < 0 {
        return Err(AnalysisError::BalanceViolation(format!(
            "degrees d = {d}, exponents {exponents:?}, second syzygies {second:?} do not describe a reduced curve"
        )));
    }
    Ok(tau as usize)
}

/// Tjurina number of a curve with exactly three generators, using `e = d₁+d₂+d₃`.
pub fn tau_from_three_exponents(d: usize, exponents: [usize; 3]) -> Result<usize, AnalysisError> {
    let e = exponents.iter().sum::<usize>();
    tau_from_resolution(d, &exponents, &[e])
}

/// Second syzygy degrees `e_j` and excesses `ε_j = e_j - (d + d_{j+2} - 1)`.
///
/// `exponents` must be sorted. Fails unless the balance difference has
/// nonnegative coefficients, exactly `m - 2` terms and every `ε_j >= 1`.
pub fn second_syzygy_degrees(
    d: usize,
    exponents: &[usize],
    numerator: &HilbertNumerator,
) -> Result<(Vec<usize>, Vec<usize>), AnalysisError> {
    let m = exponents.len();
    if m < 2 {
        return Err(AnalysisError::BalanceViolation(format!(
            "{m} generator(s); at least two are needed"
        )));
    }
    let ideal = HilbertNumerator::from_resolution(d, exponents, &[]);
    let len = ideal.coefficients().len().max(numerator.coefficients().len());
    let mut e = Vec::new();
    for n in 0..len {
        let q = ideal.coefficient(n) - numerator.coefficient(n);
        if q < 0 {
            return Err(AnalysisError::BalanceViolation(format!(
                "coefficient of t^{n} is {q} for exponents {exponents:?}"
            )));
        }
        e.extend(std::iter::repeat_n(n, q as usize));
    }
    if e.len() != m - 2 {
        return Err(AnalysisError::BalanceViolation(format!(
            "exponents {exponents:?} leave {} second syzygies, expected {}",
            e.len(),
            m - 2
        )));
    }
    let mut eps = Vec::with_capacity(e.len());
    for (j, &ej) in e.iter().enumerate() {
        let floor = d + exponents[j + 2] - 1;
        if ej <= floor {
            return Err(AnalysisError::BalanceViolation(format!(
                "e_{} = {ej} but it must exceed d + d_{} - 1 = {floor}",
                j + 1,
                j + 3
            )));
        }
        eps.push(ej - floor);
    }
    Ok((e, eps))
}

/// `σ(C) = 3(d-1) - e_{m-2}`; `None` for `m < 3`.
pub fn sigma_from_resolution(d: usize, second: &[usize]) -> Option<i64> {
    second.last().map(|&e| 3 * (d as i64 - 1) - e as i64)
}

/// What is known in advance about `N(f)`; bounds how far the generator search must go.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchHint {
    Unknown,
    /// `N(f) = 0`: two generators.
    Free,
    /// `N(f) != 0` starting in this degree; then `d_m <= 2d - 3 - σ`.
    Sigma(usize),
}

/// Degrees of the generator search: the usual window `[mdr, W1]` and the
/// extended one up to `W2`.
pub fn search_window(d: usize) -> (usize, usize) {
    let w1 = (2 * d).saturating_sub(4).max(d - 1);
    let w2 = (3 * d).saturating_sub(6).max(w1);
    (w1, w2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionProfile {
    pub d: usize,
    pub m: usize,
    pub exponents: Vec<usize>,
    pub ell: Vec<usize>,
    pub second: Vec<usize>,
    pub eps: Vec<usize>,
    pub tau: usize,
    /// Last syzygy degree examined.
    pub searched_to: usize,
    /// The search went past the usual window.
    pub extended: bool,
}

impl ResolutionProfile {
    pub fn mdr(&self) -> usize {
        self.exponents[0]
    }

    pub fn sigma(&self) -> Option<i64> {
        sigma_from_resolution(self.d, &self.second)
    }
}

impl<F: Field> CurveEngine<F> {
    /// `Syz(J_f)_k`: the left kernel of the multiplication matrix into `S_{k+d-1}`.
    pub fn syzygy_piece(&self, k: usize) -> SyzygyPiece<F> {
        let m = self.jacobian_matrix(k + self.degree() - 1);
        let basis = linalg::kernel_basis(self.field(), &m.transpose(), self.strategy());
        SyzygyPiece { k, basis }
    }

    /// `dim Syz(J_f)_k`, read from `m(f)` inside its window.
    pub fn syzygy_dimension(&self, milnor: &MilnorHilbert, k: usize) -> usize {
        let target = k + self.degree() - 1;
        let rank = if target < milnor.values().len() {
            milnor.jacobian_dim(target as i64)
        } else {
            self.jacobian_rank(target)
        };
        3 * basis_dim(k as i64) - rank
    }

    /// Least degree of a nonzero syzygy; at most `d-1` because of the Koszul relations.
    pub fn mdr(&self, milnor: &MilnorHilbert) -> usize {
        (0..self.degree())
            .find(|&k| self.syzygy_dimension(milnor, k) > 0)
            .unwrap_or(self.degree() - 1)
    }

    /// Exponents `d_1 <= ... <= d_m` with second syzygy degrees, searching
    /// degree by degree until the balance identity holds.
    pub fn resolution(
        &self,
        milnor: &MilnorHilbert,
        hint: SearchHint,
    ) -> Result<ResolutionProfile, AnalysisError> {
        let d = self.degree();
        let mdr = self.mdr(milnor);
        if mdr == 0 {
            return Err(AnalysisError::PencilOfLines);
        }
        let (w1, w2) = search_window(d);
        let certified_from = match hint {
            SearchHint::Sigma(s) => (2 * d).saturating_sub(3 + s).min(w1).max(mdr),
            SearchHint::Free | SearchHint::Unknown => mdr,
        };
        let numerator = HilbertNumerator::from_milnor(milnor);
        let mut exponents = Vec::new();
        let mut previous: Option<SyzygyPiece<F>> = None;
        for k in mdr..=w2 {
            let piece = self.syzygy_piece(k);
            let generated = previous
                .as_ref()
                .map_or(0, |p| image_rank(self, p));
            if generated > piece.dimension() {
                return Err(AnalysisError::Inconsistent(format!(
                    "S_1 * Syz_{} has rank {generated} > dim Syz_{k} = {}",
                    k - 1,
                    piece.dimension()
                )));
            }
            exponents.extend(std::iter::repeat_n(k, piece.dimension() - generated));
            if k >= certified_from {
                if let Ok((second, eps)) = second_syzygy_degrees(d, &exponents, &numerator) {
                    let consistent = match hint {
                        SearchHint::Free => exponents.len() == 2,
                        _ => true,
                    };
                    if consistent {
                        return Ok(ResolutionProfile {
                            d,
                            m: exponents.len(),
                            ell: exponents.iter().map(|&di| d - 1 + di).collect(),
                            exponents,
                            second,
                            eps,
                            tau: milnor.tau(),
                            searched_to: k,
                            extended: k > w1,
                        });
                    }
                }
            }
            previous = Some(piece);
        }
        Err(AnalysisError::IncompleteResolution { searched_to: w2 })
    }
}

/// Rank of `{x v, y v, z v}` for `v` running over a basis of `Syz_{k-1}`,
/// as vectors of `S_k^3`.
fn image_rank<F: Field>(engine: &CurveEngine<F>, lower: &SyzygyPiece<F>) -> usize {
    if lower.dimension() == 0 {
        return 0;
    }
    let field = engine.field();
    let k = lower.degree() + 1;
    let (n_low, n) = (basis_dim(k as i64 - 1), basis_dim(k as i64));
    let shifts: Vec<Vec<usize>> = Var::ALL
        .iter()
        .map(|&v| {
            monomial_basis(k - 1)
                .into_iter()
                .map(|mu| (mu * Monomial::var(v)).index())
                .collect()
        })
        .collect();
    let mut vectors = Vec::with_capacity(3 * lower.dimension());
    for v in lower.vectors() {
        for shift in &shifts {
            let mut out = vec![field.zero(); 3 * n];
            for i in 0..3 {
                for (j, c) in v[i * n_low..(i + 1) * n_low].iter().enumerate() {
                    out[i * n + shift[j]] = c.clone();
                }
            }
            vectors.push(out);
        }
    }
    let span: RrefResult<F> = linalg::span(field, 3 * n, vectors, engine.strategy());
    span.rank()
}
