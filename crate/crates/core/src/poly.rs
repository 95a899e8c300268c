//! Monomials and homogeneous forms in `x, y, z`.
//!
//! Monomials of a fixed degree are ordered graded-lexicographically with
//! `x > y > z`; the basis of `S_k` lists them from largest to smallest, so
//! `x^k` has index 0 and `z^k` the last index. Every matrix built in this
//! crate uses that column order.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldError, RationalField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn symbol(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

/// `x^a y^b z^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn new(a: u32, b: u32, c: u32) -> Self {
        Monomial([a, b, c])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exponents(self) -> [u32; 3] {
        self.0
    }

    pub fn exponent(self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn degree(self) -> usize {
        (self.0[0] + self.0[1] + self.0[2]) as usize
    }

    pub fn pow_var(v: Var, n: u32) -> Monomial {
        let mut e = [0; 3];
        e[v.index()] = n;
        Monomial(e)
    }

    /// Position of this monomial in [`monomial_basis`] of its degree.
    #[inline]
    pub fn index(self) -> usize {
        let s = (self.0[1] + self.0[2]) as usize;
        s * (s + 1) / 2 + (s - self.0[1] as usize)
    }
}

impl std::ops::Mul for Monomial {
    type Output = Monomial;

    fn mul(self, other: Monomial) -> Monomial {
        Monomial([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Monomial::ONE {
            return write!(f, "1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v.symbol())?;
            } else {
                write!(f, "{}^{}", v.symbol(), e)?;
            }
        }
        Ok(())
    }
}

/// `dim S_k = (k+1)(k+2)/2`; zero for negative degrees.
pub fn basis_dim(k: i64) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

/// All monomials of degree `k`, largest first.
pub fn monomial_basis(k: usize) -> Vec<Monomial> {
    let k = k as u32;
    let mut out = Vec::with_capacity(basis_dim(k as i64));
    for a in (0..=k).rev() {
        for b in (0..=k - a).rev() {
            out.push(Monomial([a, b, k - a - b]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("monomial {monomial} has degree {found}, expected {expected}")]
    WrongDegree {
        monomial: Monomial,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A form of fixed degree with no stored zero coefficients.
///
/// Terms are kept sorted from the largest monomial down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousPoly<F: Field> {
    degree: usize,
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> HomogeneousPoly<F> {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            terms: Vec::new(),
        }
    }

    /// Collects terms, summing repeated monomials and dropping zeros.
    pub fn from_terms(
        field: &F,
        degree: usize,
        terms: impl IntoIterator<Item = (Monomial, F::Elem)>,
    ) -> Result<Self, PolyError> {
        let mut collected: Vec<(Monomial, F::Elem)> = Vec::new();
        for (m, c) in terms {
            if m.degree() != degree {
                return Err(PolyError::WrongDegree {
                    monomial: m,
                    expected: degree,
                    found: m.degree(),
                });
            }
            collected.push((m, c));
        }
        collected.sort_by_key(|t| std::cmp::Reverse(t.0));
        let mut terms: Vec<(Monomial, F::Elem)> = Vec::with_capacity(collected.len());
        for (m, c) in collected {
            match terms.last_mut() {
                Some((last, acc)) if *last == m => *acc = field.add(acc, &c),
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|(_, c)| !field.is_zero(c));
        Ok(Self { degree, terms })
    }

    pub fn monomial(field: &F, m: Monomial, c: F::Elem) -> Self {
        Self::from_terms(field, m.degree(), [(m, c)]).expect("degree matches")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn coefficient(&self, field: &F, m: Monomial) -> F::Elem {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| field.zero())
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let terms = self.terms.iter().chain(&other.terms).cloned();
        Self::from_terms(field, self.degree, terms).expect("same degree")
    }

    pub fn sub(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.scale(field, &field.neg(&field.one())))
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        let terms = self.terms.iter().map(|(m, a)| (*m, field.mul(a, c)));
        Self::from_terms(field, self.degree, terms).expect("same degree")
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                terms.push((*m * *n, field.mul(a, b)));
            }
        }
        Self::from_terms(field, degree, terms).expect("degrees add")
    }

    pub fn mul_monomial(&self, m: Monomial) -> Self {
        Self {
            degree: self.degree + m.degree(),
            terms: self.terms.iter().map(|(t, c)| (*t * m, c.clone())).collect(),
        }
    }

    /// Formal partial derivative; a form of degree `d - 1`.
    pub fn partial_derivative(&self, field: &F, var: Var) -> Self {
        assert!(self.degree >= 1, "derivative of a constant form");
        let i = var.index();
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let mut e = m.exponents();
            if e[i] == 0 {
                return None;
            }
            let k = e[i];
            e[i] -= 1;
            Some((Monomial(e), field.mul(c, &field.embed_integer(k as i64))))
        });
        Self::from_terms(field, self.degree - 1, terms).expect("degree drops by one")
    }

    /// Dense coordinates in the basis of `S_degree`.
    pub fn coefficient_vector(&self, field: &F) -> Vec<F::Elem> {
        let mut v = vec![field.zero(); basis_dim(self.degree as i64)];
        for (m, c) in &self.terms {
            v[m.index()] = c.clone();
        }
        v
    }

    pub fn from_coefficient_vector(field: &F, degree: usize, coords: &[F::Elem]) -> Self {
        assert_eq!(coords.len(), basis_dim(degree as i64));
        let basis = monomial_basis(degree);
        let terms = basis
            .into_iter()
            .zip(coords.iter().cloned())
            .filter(|(_, c)| !field.is_zero(c));
        Self::from_terms(field, degree, terms).expect("basis monomials")
    }

    /// Canonical text, e.g. `x^3 - 2*y*z^2`; parses back to the same form.
    pub fn to_text(&self, field: &F) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut coeff = field.format(c);
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if *m == Monomial::ONE {
                out.push_str(&coeff);
            } else if coeff == "1" {
                out.push_str(&m.to_string());
            } else {
                out.push_str(&format!("{coeff}*{m}"));
            }
        }
        out
    }
}

impl HomogeneousPoly<RationalField> {
    /// Reduces exact coefficients into another field.
    pub fn reduce<G: Field>(&self, target: &G) -> Result<HomogeneousPoly<G>, FieldError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((*m, target.embed_rational(c)?));
        }
        Ok(HomogeneousPoly::from_terms(target, self.degree, terms).expect("same degree"))
    }
}

/// The three partial derivatives of a form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianTriple<F: Field> {
    pub fx: HomogeneousPoly<F>,
    pub fy: HomogeneousPoly<F>,
    pub fz: HomogeneousPoly<F>,
}

impl<F: Field> JacobianTriple<F> {
    pub fn of(field: &F, f: &HomogeneousPoly<F>) -> Self {
        Self {
            fx: f.partial_derivative(field, Var::X),
            fy: f.partial_derivative(field, Var::Y),
            fz: f.partial_derivative(field, Var::Z),
        }
    }

    pub fn parts(&self) -> [&HomogeneousPoly<F>; 3] {
        [&self.fx, &self.fy, &self.fz]
    }

    /// Degree of the partials, `d - 1`.
    pub fn degree(&self) -> usize {
        self.fx.degree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(monomial_basis(0), vec![Monomial::ONE]);
        assert_eq!(monomial_basis(2).len(), 6);
        assert_eq!(monomial_basis(31).len(), 528);
        let b2: Vec<String> = monomial_basis(2).iter().map(|m| m.to_string()).collect();
        assert_eq!(b2, ["x^2", "x*y", "x*z", "y^2", "y*z", "z^2"]);
        for k in 0..12 {
            let basis = monomial_basis(k);
            assert!(basis.windows(2).all(|w| w[0] > w[1]));
            for (i, m) in basis.iter().enumerate() {
                assert_eq!(m.index(), i);
            }
        }
    }

    #[test]
    fn derivatives() {
        let f = parse_poly("x^3+y^3+z^3").unwrap();
        let fx = f.partial_derivative(&RationalField, Var::X);
        assert_eq!(fx.to_text(&RationalField), "3*x^2");
        let g = parse_poly("x*y*z").unwrap();
        assert_eq!(
            g.partial_derivative(&RationalField, Var::Z).to_text(&RationalField),
            "x*y"
        );
    }

    #[test]
    fn printing() {
        let f = parse_poly("-1/2*z^3 + 3*x^2*y - x*y*z").unwrap();
        assert_eq!(f.to_text(&RationalField), "3*x^2*y - x*y*z - 1/2*z^3");
        let gf = PrimeField::new(7).unwrap();
        let g = f.reduce(&gf).unwrap();
        assert_eq!(g.to_text(&gf), "3*x^2*y + 6*x*y*z + 3*z^3");
    }

    fn euler_defect<F: Field>(field: &F, f: &HomogeneousPoly<F>) -> HomogeneousPoly<F> {
        let jac = JacobianTriple::of(field, f);
        let lhs = jac
            .fx
            .mul_monomial(Monomial::var(Var::X))
            .add(field, &jac.fy.mul_monomial(Monomial::var(Var::Y)))
            .add(field, &jac.fz.mul_monomial(Monomial::var(Var::Z)));
        lhs.sub(field, &f.scale(field, &field.embed_integer(f.degree() as i64)))
    }

    fn arb_form(degree: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
        let n = basis_dim(degree as i64);
        prop::collection::vec((0..n, -9i64..10), 1..8)
    }

    fn build(field: &RationalField, degree: usize, raw: &[(usize, i64)]) -> HomogeneousPoly<RationalField> {
        let basis = monomial_basis(degree);
        HomogeneousPoly::from_terms(
            field,
            degree,
            raw.iter().map(|&(i, c)| (basis[i], field.embed_integer(c))),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn euler_relation_holds(raw in arb_form(5)) {
            let f = build(&RationalField, 5, &raw);
            prop_assert!(euler_defect(&RationalField, &f).is_zero());
            let gf = PrimeField::new(1_000_003).unwrap();
            prop_assert!(euler_defect(&gf, &f.reduce(&gf).unwrap()).is_zero());
        }

        #[test]
        fn multiplication_is_commutative_and_degree_additive(a in arb_form(2), b in arb_form(3)) {
            let q = RationalField;
            let (f, g) = (build(&q, 2, &a), build(&q, 3, &b));
            let fg = f.mul(&q, &g);
            prop_assert_eq!(fg.degree(), 5);
            prop_assert_eq!(&fg, &g.mul(&q, &f));
        }

        #[test]
        fn print_then_parse_is_identity(raw in arb_form(4)) {
            let f = build(&RationalField, 4, &raw);
            prop_assume!(!f.is_zero());
            let text = f.to_text(&RationalField);
            prop_assert_eq!(parse_poly(&text).unwrap(), f);
        }

        #[test]
        fn coefficient_vectors_round_trip(raw in arb_form(6)) {
            let f = build(&RationalField, 6, &raw);
            let v = f.coefficient_vector(&RationalField);
            prop_assert_eq!(HomogeneousPoly::from_coefficient_vector(&RationalField, 6, &v), f);
        }
    }
}
