//! Graded pieces of the Jacobian ideal `J_f = (f_x, f_y, f_z)`, of its
//! saturation, and the Hilbert functions of `M(f) = S/J_f` and
//! `N(f) = Ĵ_f / J_f`.
//!
//! Everything happens in the degrees `0..=T+2` with `T = 3(d-2)`. The
//! saturation test in degree `k <= T+1` multiplies by `x^N, y^N, z^N` with
//! `N = T+1-k` and reduces modulo `(J_f)_{T+1}`, so one reduced echelon form
//! of `(J_f)_{T+1}` serves every degree.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::field::Field;
use crate::hilbert::{HilbertVector, Source};
use crate::linalg::{self, DenseMatrix, RrefResult, Strategy};
use crate::par::map_collect;
use crate::poly::{basis_dim, monomial_basis, HomogeneousPoly, JacobianTriple, Monomial, Var};

/// `T = 3(d-2)`, the socle degree of `M(f_s)` for a smooth `f_s` of degree `d`.
pub fn top_degree(d: usize) -> usize {
    3 * d.saturating_sub(2)
}

/// Hilbert function of `M(f)` on `0..=T+2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilnorHilbert {
    d: usize,
    values: Vec<usize>,
    tau: usize,
}

impl MilnorHilbert {
    /// Builds from `m(f)_k`, `k = 0..=T+2`, and checks the stabilization sentinel.
    pub fn from_values(d: usize, values: Vec<usize>) -> Result<Self, AnalysisError> {
        let t = top_degree(d);
        assert_eq!(values.len(), t + 3, "need m(f)_k for k = 0..=T+2");
        let (a, b) = (values[t + 1], values[t + 2]);
        if a != b {
            return Err(AnalysisError::NotReduced {
                t,
                at_t_plus_1: a,
                at_t_plus_2: b,
            });
        }
        Ok(Self { d, values, tau: a })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> usize {
        top_degree(self.d)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `m(f)_k`; beyond the window this is the stable value `τ`.
    pub fn value(&self, k: i64) -> usize {
        if k < 0 {
            0
        } else {
            self.values.get(k as usize).copied().unwrap_or(self.tau)
        }
    }

    /// `dim (J_f)_k`.
    pub fn jacobian_dim(&self, k: i64) -> usize {
        basis_dim(k) - self.value(k)
    }
}

/// Coefficients of `((1 - t^{d-1}) / (1 - t))^3`: the Hilbert function of
/// the Milnor algebra of any smooth curve of degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothReferenceHilbert {
    d: usize,
    coefficients: Vec<usize>,
}

impl SmoothReferenceHilbert {
    pub fn new(d: usize) -> Self {
        assert!(d >= 2);
        let base = vec![1usize; d - 1];
        let mut coefficients = vec![1usize];
        for _ in 0..3 {
            let mut next = vec![0usize; coefficients.len() + base.len() - 1];
            for (i, a) in coefficients.iter().enumerate() {
                for (j, b) in base.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            coefficients = next;
        }
        Self { d, coefficients }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Coefficients in degrees `0..=T`.
    pub fn coefficients(&self) -> &[usize] {
        &self.coefficients
    }

    pub fn value(&self, k: i64) -> usize {
        if k < 0 {
            0
        } else {
            self.coefficients.get(k as usize).copied().unwrap_or(0)
        }
    }
}

/// Hilbert function of `N(f)` on `0..=T` with `σ(C)` and `ν(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianModuleVector {
    d: usize,
    values: Vec<usize>,
    sigma: Option<usize>,
    nu: usize,
}

impl JacobianModuleVector {
    /// Checks nonnegativity, symmetry and unimodality; a failure means the
    /// arithmetic was not faithful to characteristic zero.
    pub fn from_values(d: usize, values: Vec<usize>) -> Result<Self, AnalysisError> {
        let t = top_degree(d);
        assert_eq!(values.len(), t + 1, "need n(f)_k for k = 0..=T");
        for j in 0..=t {
            if values[j] != values[t - j] {
                return Err(AnalysisError::Inconsistent(format!(
                    "n(f) is not symmetric: n_{j} = {} but n_{} = {}",
                    values[j],
                    t - j,
                    values[t - j]
                )));
            }
        }
        for k in 1..=t / 2 {
            if values[k] < values[k - 1] {
                return Err(AnalysisError::Inconsistent(format!(
                    "n(f) is not unimodal: n_{} = {} > n_{k} = {}",
                    k - 1,
                    values[k - 1],
                    values[k]
                )));
            }
        }
        let sigma = values.iter().position(|&v| v != 0);
        if let Some(s) = sigma {
            if let Some(k) = (s..=t - s).find(|&k| values[k] == 0) {
                return Err(AnalysisError::Inconsistent(format!(
                    "n(f) vanishes at {k} inside [{s}, {}]",
                    t - s
                )));
            }
        }
        let nu = values[t / 2];
        Ok(Self {
            d,
            values,
            sigma,
            nu,
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> usize {
        top_degree(self.d)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, k: i64) -> usize {
        if k < 0 {
            0
        } else {
            self.values.get(k as usize).copied().unwrap_or(0)
        }
    }

    /// First degree with `n(f)_k != 0`; `None` when `N(f) = 0` (free curves).
    pub fn sigma(&self) -> Option<usize> {
        self.sigma
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn is_zero(&self) -> bool {
        self.sigma.is_none()
    }

    pub fn to_hilbert_vector(&self) -> HilbertVector {
        HilbertVector::from_values(self.values.iter().map(|&v| v as i64).collect(), Source::Oracle)
    }
}

/// Result of comparing `m(f)` with the smooth reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Coincidence {
    /// Largest `q` with `m(f)_k = m(f_s)_k` for all `k <= q`.
    Threshold(usize),
    /// Equal on the whole window `0..=T+2`.
    BeyondRange,
}

/// Normal forms modulo `(J_f)_{T+1}`: each monomial of `S_{T+1}` as a
/// vector in the `τ`-dimensional quotient, expressed on the free columns of
/// the reduced echelon form.
#[derive(Debug, Clone)]
pub struct SaturationOracle<F: Field> {
    field: F,
    t: usize,
    tau: usize,
    normal_forms: Vec<F::Elem>,
}

impl<F: Field> SaturationOracle<F> {
    /// Builds from the reduced echelon form of `(J_f)_{T+1}`.
    pub fn new(field: &F, t: usize, top: &RrefResult<F>) -> Self {
        let n = top.cols();
        assert_eq!(n, basis_dim(t as i64 + 1));
        let mut pivot_row = vec![None; n];
        for (i, &p) in top.pivots().iter().enumerate() {
            pivot_row[p] = Some(i);
        }
        let free: Vec<usize> = (0..n).filter(|&c| pivot_row[c].is_none()).collect();
        let tau = free.len();
        let mut normal_forms = vec![field.zero(); n * tau];
        for c in 0..n {
            let out = &mut normal_forms[c * tau..(c + 1) * tau];
            match pivot_row[c] {
                Some(i) => {
                    let row = top.matrix().row(i);
                    for (slot, &f) in out.iter_mut().zip(&free) {
                        *slot = field.neg(&row[f]);
                    }
                }
                None => {
                    let j = free.binary_search(&c).expect("free column");
                    out[j] = field.one();
                }
            }
        }
        Self {
            field: field.clone(),
            t,
            tau,
            normal_forms,
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    fn normal_form(&self, m: Monomial) -> &[F::Elem] {
        let i = m.index();
        &self.normal_forms[i * self.tau..(i + 1) * self.tau]
    }

    /// Rows indexed by the monomials `μ` of `S_k`, row `μ` holding the normal
    /// forms of `x^N μ`, `y^N μ`, `z^N μ`. Its left kernel is `(Ĵ_f)_k`.
    pub fn test_matrix(&self, k: usize) -> DenseMatrix<F> {
        assert!(k <= self.t + 1);
        let n = (self.t + 1 - k) as u32;
        let cols = 3 * self.tau;
        let rows = monomial_basis(k)
            .into_iter()
            .map(|mu| {
                let mut row = Vec::with_capacity(cols);
                for v in Var::ALL {
                    row.extend_from_slice(self.normal_form(mu * Monomial::pow_var(v, n)));
                }
                row
            })
            .collect();
        DenseMatrix::from_rows(cols, rows)
    }

    /// `codim (Ĵ_f)_k` in `S_k`, for `k <= T+1`.
    pub fn codim(&self, k: usize, strategy: Strategy) -> usize {
        if self.tau == 0 {
            return 0;
        }
        linalg::rank(&self.field, self.test_matrix(k), strategy)
    }

    /// Basis of `(Ĵ_f)_k` in coordinates of `S_k`, for `k <= T+1`.
    pub fn basis(&self, k: usize, strategy: Strategy) -> Vec<Vec<F::Elem>> {
        let dim = basis_dim(k as i64);
        if self.tau == 0 {
            return (0..dim)
                .map(|i| {
                    let mut v = vec![self.field.zero(); dim];
                    v[i] = self.field.one();
                    v
                })
                .collect();
        }
        linalg::kernel_basis(&self.field, &self.test_matrix(k).transpose(), strategy)
    }

    /// Whether `g` (coordinates in `S_k`, `k <= T+1`) lies in `(Ĵ_f)_k`.
    pub fn contains(&self, k: usize, g: &[F::Elem]) -> bool {
        assert_eq!(g.len(), basis_dim(k as i64));
        let m = self.test_matrix(k);
        let mut acc = vec![self.field.zero(); m.cols()];
        for (i, c) in g.iter().enumerate() {
            if !self.field.is_zero(c) {
                let minus = self.field.neg(c);
                self.field.sub_mul_assign(&mut acc, &minus, m.row(i));
            }
        }
        acc.iter().all(|x| self.field.is_zero(x))
    }
}

/// Everything the oracle computes for one curve over one field.
#[derive(Debug, Clone)]
pub struct OracleResult<F: Field> {
    pub milnor: MilnorHilbert,
    pub module: JacobianModuleVector,
    pub saturation: SaturationOracle<F>,
}

/// A reduced plane curve `f = 0` over a fixed field.
#[derive(Debug, Clone)]
pub struct CurveEngine<F: Field> {
    field: F,
    poly: HomogeneousPoly<F>,
    jacobian: JacobianTriple<F>,
    strategy: Strategy,
}

impl<F: Field> CurveEngine<F> {
    /// Requires `d >= 2` and characteristic zero or larger than `3d`.
    pub fn new(field: F, poly: HomogeneousPoly<F>) -> Result<Self, AnalysisError> {
        let d = poly.degree();
        if d < 2 {
            return Err(AnalysisError::DegreeTooSmall(d));
        }
        let p = field.characteristic();
        if p != 0 && p <= 3 * d as u64 {
            return Err(AnalysisError::SmallCharacteristic {
                characteristic: p,
                degree: d,
            });
        }
        let jacobian = JacobianTriple::of(&field, &poly);
        Ok(Self {
            field,
            poly,
            jacobian,
            strategy: Strategy::default(),
        })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn poly(&self) -> &HomogeneousPoly<F> {
        &self.poly
    }

    pub fn jacobian(&self) -> &JacobianTriple<F> {
        &self.jacobian
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn t(&self) -> usize {
        top_degree(self.degree())
    }

    /// Rows `μ·f_x, μ·f_y, μ·f_z` (variable-major, `μ` over `S_{k-d+1}`) in the
    /// basis of `S_k`. Zero rows when `k < d-1`.
    pub fn jacobian_matrix(&self, k: usize) -> DenseMatrix<F> {
        let cols = basis_dim(k as i64);
        let Some(shift) = k.checked_sub(self.degree() - 1) else {
            return DenseMatrix::zeros(&self.field, 0, cols);
        };
        let multipliers = monomial_basis(shift);
        let mut m = DenseMatrix::zeros(&self.field, 3 * multipliers.len(), cols);
        for (i, part) in self.jacobian.parts().into_iter().enumerate() {
            for (j, mu) in multipliers.iter().enumerate() {
                let row = m.row_mut(i * multipliers.len() + j);
                for (mono, c) in part.terms() {
                    row[(*mu * *mono).index()] = c.clone();
                }
            }
        }
        m
    }

    /// Reduced echelon form of `(J_f)_k` in the basis of `S_k`.
    pub fn jacobian_piece(&self, k: usize) -> RrefResult<F> {
        let m = self.jacobian_matrix(k);
        if m.rows() == 0 {
            return RrefResult::empty(m.cols());
        }
        linalg::rref(&self.field, m, self.strategy)
    }

    pub fn jacobian_rank(&self, k: usize) -> usize {
        let m = self.jacobian_matrix(k);
        if m.rows() == 0 {
            return 0;
        }
        linalg::rank(&self.field, m, self.strategy)
    }

    /// `m(f)_k` for `k = 0..=T+2` plus the echelon form of `(J_f)_{T+1}`.
    fn milnor_with_top(&self) -> Result<(MilnorHilbert, RrefResult<F>), AnalysisError> {
        let t = self.t();
        let degrees: Vec<usize> = (0..=t + 2).collect();
        // The degree T+1 form is needed in full; the others only for rank.
        let pieces = map_collect(degrees, self.strategy, |k| {
            if k == t + 1 {
                let piece = self.jacobian_piece(k);
                (piece.rank(), Some(piece))
            } else {
                (self.jacobian_rank(k), None)
            }
        });
        let mut top = None;
        let mut values = Vec::with_capacity(t + 3);
        for (k, (rank, piece)) in pieces.into_iter().enumerate() {
            values.push(basis_dim(k as i64) - rank);
            if piece.is_some() {
                top = piece;
            }
        }
        let milnor = MilnorHilbert::from_values(self.degree(), values)?;
        Ok((milnor, top.expect("degree T+1 computed")))
    }

    pub fn milnor_hilbert(&self) -> Result<MilnorHilbert, AnalysisError> {
        let t = self.t();
        let degrees: Vec<usize> = (0..=t + 2).collect();
        let values = map_collect(degrees, self.strategy, |k| {
            basis_dim(k as i64) - self.jacobian_rank(k)
        });
        MilnorHilbert::from_values(self.degree(), values)
    }

    pub fn tjurina(&self) -> Result<usize, AnalysisError> {
        Ok(self.milnor_hilbert()?.tau())
    }

    pub fn saturation(&self) -> Result<SaturationOracle<F>, AnalysisError> {
        let (_, top) = self.milnor_with_top()?;
        Ok(SaturationOracle::new(&self.field, self.t(), &top))
    }

    /// Reduced echelon form of `(Ĵ_f)_k`; equal to `(J_f)_k` above `T+1`.
    pub fn saturation_piece(
        &self,
        saturation: &SaturationOracle<F>,
        k: usize,
    ) -> RrefResult<F> {
        if k > self.t() + 1 {
            return self.jacobian_piece(k);
        }
        linalg::span(
            &self.field,
            basis_dim(k as i64),
            saturation.basis(k, self.strategy),
            self.strategy,
        )
    }

    /// Milnor Hilbert function, `n(f)` and the saturation oracle in one pass.
    pub fn oracle(&self) -> Result<OracleResult<F>, AnalysisError> {
        let (milnor, top) = self.milnor_with_top()?;
        let t = self.t();
        let saturation = SaturationOracle::new(&self.field, t, &top);
        let degrees: Vec<usize> = (0..=t).collect();
        let codims = map_collect(degrees, self.strategy, |k| saturation.codim(k, self.strategy));
        let mut values = Vec::with_capacity(t + 1);
        for (k, codim) in codims.into_iter().enumerate() {
            let m = milnor.value(k as i64);
            if codim > m {
                return Err(AnalysisError::Inconsistent(format!(
                    "saturation has codimension {codim} > m(f)_{k} = {m}"
                )));
            }
            values.push(m - codim);
        }
        let module = JacobianModuleVector::from_values(self.degree(), values)?;
        Ok(OracleResult {
            milnor,
            module,
            saturation,
        })
    }

    pub fn jacobian_module_vector(&self) -> Result<JacobianModuleVector, AnalysisError> {
        Ok(self.oracle()?.module)
    }

    pub fn coincidence_threshold(&self) -> Result<Coincidence, AnalysisError> {
        Ok(coincidence_threshold(&self.milnor_hilbert()?))
    }
}

/// Compares `m(f)` with the smooth reference of the same degree on `0..=T+2`.
pub fn coincidence_threshold(milnor: &MilnorHilbert) -> Coincidence {
    let reference = SmoothReferenceHilbert::new(milnor.degree());
    match (0..milnor.values().len()).find(|&k| milnor.value(k as i64) != reference.value(k as i64)) {
        None => Coincidence::BeyondRange,
        // m(f)_k = C(k+2,2) = m(f_s)_k for k < d-1, so the first mismatch is positive.
        Some(k) => Coincidence::Threshold(k - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, RationalField};
    use crate::parse::{parse_poly, parse_poly_in};

    fn gfp() -> PrimeField {
        PrimeField::new(1_000_003).unwrap()
    }

    fn engine(text: &str) -> CurveEngine<PrimeField> {
        let field = gfp();
        let f = parse_poly_in(text, &field).unwrap();
        CurveEngine::new(field, f).unwrap()
    }

    #[test]
    fn fermat_cubic_pieces() {
        let e = engine("x^3+y^3+z^3");
        assert_eq!(e.jacobian_rank(1), 0);
        assert_eq!(e.jacobian_rank(2), 3);
        assert_eq!(e.jacobian_rank(3), 9);
        let milnor = e.milnor_hilbert().unwrap();
        assert_eq!(milnor.values(), &[1, 3, 3, 1, 0, 0]);
        assert_eq!(milnor.tau(), 0);
        let module = e.jacobian_module_vector().unwrap();
        assert_eq!(module.values(), &[1, 3, 3, 1]);
        assert_eq!(module.sigma(), Some(0));
        assert_eq!(module.nu(), 3);
        assert_eq!(e.coincidence_threshold().unwrap(), Coincidence::BeyondRange);
    }

    #[test]
    fn rational_engine_agrees() {
        let f = parse_poly("x^3+y^3+z^3").unwrap();
        let e = CurveEngine::new(RationalField, f).unwrap();
        assert_eq!(e.jacobian_rank(3), 9);
        assert_eq!(e.jacobian_module_vector().unwrap().values(), &[1, 3, 3, 1]);
    }

    #[test]
    fn triangle_is_free() {
        let e = engine("x*y*z");
        assert_eq!(e.jacobian_rank(3), 7);
        let r = e.oracle().unwrap();
        assert_eq!(r.milnor.values(), &[1, 3, 3, 3, 3, 3]);
        assert_eq!(r.milnor.tau(), 3);
        assert!(r.module.is_zero());
        assert_eq!(r.module.nu(), 0);
        for k in 2..=4 {
            assert_eq!(r.saturation.codim(k.min(e.t() + 1), Strategy::Sequential), 3.min(basis_dim(k as i64)));
        }
        assert_eq!(e.coincidence_threshold().unwrap(), Coincidence::Threshold(2));
    }

    #[test]
    fn non_reduced_is_rejected() {
        let e = engine("x^2*y*z");
        assert!(matches!(e.milnor_hilbert(), Err(AnalysisError::NotReduced { .. })));
    }

    #[test]
    fn small_degree_and_characteristic_rejected() {
        let f = parse_poly_in("x", &gfp()).unwrap();
        assert_eq!(
            CurveEngine::new(gfp(), f).unwrap_err(),
            AnalysisError::DegreeTooSmall(1)
        );
        let small = PrimeField::new(11).unwrap();
        let f = parse_poly_in("x^4+y^4+z^4", &small).unwrap();
        assert!(matches!(
            CurveEngine::new(small, f),
            Err(AnalysisError::SmallCharacteristic { characteristic: 11, degree: 4 })
        ));
    }

    #[test]
    fn conic_pair_module() {
        let e = engine("(x^2-y*z)*(y^2-x*z)");
        let r = e.oracle().unwrap();
        assert_eq!(r.milnor.tau(), 4);
        assert_eq!(r.module.values(), &[0, 0, 2, 3, 2, 0, 0]);
        assert_eq!(r.module.sigma(), Some(2));
        assert_eq!(r.module.nu(), 3);
    }

    #[test]
    fn nearly_free_quartic_module() {
        // One E6 point; a linear syzygy z*f_z - 3y*f_y = 0 but tau = 6 < 7.
        let r = engine("x^4+y*z^3").oracle().unwrap();
        assert_eq!(r.milnor.tau(), 6);
        assert_eq!(r.module.values(), &[0, 0, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn saturation_contains_jacobian_and_stabilizes() {
        for text in ["(x^2-y*z)*(y^2-x*z)", "x*y*z*(x+y+z)", "y^2*z-x^3-x^2*z"] {
            let e = engine(text);
            let r = e.oracle().unwrap();
            let t = e.t();
            for k in 0..=t + 1 {
                let piece = e.jacobian_piece(k);
                for row in piece.matrix().row_vectors() {
                    assert!(r.saturation.contains(k, &row), "{text}: J not in saturation at {k}");
                }
            }
            let mut previous = 0;
            for k in 0..=t {
                let d = r.milnor.value(k as i64) - r.module.value(k as i64);
                assert!(d >= previous);
                previous = d;
            }
            assert_eq!(r.milnor.value(t as i64 + 1), r.milnor.tau());
        }
    }

    #[test]
    fn saturation_piece_matches_codimension() {
        let e = engine("(x^2-y*z)*(y^2-x*z)");
        let sat = e.saturation().unwrap();
        let piece = e.saturation_piece(&sat, 2);
        assert_eq!(basis_dim(2) - piece.rank(), sat.codim(2, Strategy::Sequential));
        assert_eq!(piece.rank(), 2);
        let above = e.saturation_piece(&sat, e.t() + 2);
        assert_eq!(above.rank(), e.jacobian_rank(e.t() + 2));
    }

    #[test]
    fn smooth_reference_shape() {
        for d in 2..9 {
            let r = SmoothReferenceHilbert::new(d);
            let c = r.coefficients();
            assert_eq!(c.len(), top_degree(d) + 1);
            assert_eq!(c.iter().sum::<usize>(), (d - 1).pow(3));
            assert!(c.iter().eq(c.iter().rev()));
        }
        assert_eq!(SmoothReferenceHilbert::new(4).coefficients(), &[1, 3, 6, 7, 6, 3, 1]);
    }

    #[test]
    fn module_vector_rejects_asymmetry() {
        assert!(matches!(
            JacobianModuleVector::from_values(4, vec![0, 0, 1, 2, 2, 0, 0]),
            Err(AnalysisError::Inconsistent(_))
        ));
        assert!(matches!(
            JacobianModuleVector::from_values(4, vec![0, 2, 1, 2, 1, 2, 0]),
            Err(AnalysisError::Inconsistent(_))
        ));
    }
}
