//! Exact coefficient fields.
//!
//! Two backends sit behind the [`Field`] trait: [`PrimeField`] (word-sized
//! GF(p), the fast path for every large elimination) and [`RationalField`]
//! (arbitrary-precision fractions, used to certify small cases). Elements are
//! plain values; the field object carries the context needed to combine them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("bad prime {modulus}: a coefficient denominator vanishes modulo p")]
    BadPrime { modulus: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {modulus} must lie in (3*{degree_cap}, 2^31)")]
    ModulusOutOfRange { modulus: u64, degree_cap: usize },
}

/// A field with exact arithmetic.
///
/// Elements do not know their field; every operation goes through `&self`.
/// Implementations must be reentrant: the elimination code calls them from
/// several worker threads at once.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;

    /// Image of an integer under the canonical ring homomorphism.
    fn embed_integer(&self, n: i64) -> Self::Elem;
    /// Image of a rational number; fails when the denominator vanishes.
    fn embed_rational(&self, q: &BigRational) -> Result<Self::Elem, FieldError>;
    /// Canonical integer-or-fraction text of an element.
    fn format(&self, a: &Self::Elem) -> String;
    /// Short human-readable name, e.g. `GF(1073741827)` or `Q`.
    fn name(&self) -> String;
    /// `p` for GF(p), 0 for the rationals.
    fn characteristic(&self) -> u64;

    /// `dst[i] -= factor * src[i]` for all `i`.
    fn sub_mul_assign(&self, dst: &mut [Self::Elem], factor: &Self::Elem, src: &[Self::Elem]) {
        debug_assert_eq!(dst.len(), src.len());
        for (d, s) in dst.iter_mut().zip(src) {
            if !self.is_zero(s) {
                *d = self.sub(d, &self.mul(factor, s));
            }
        }
    }

    fn scale_assign(&self, row: &mut [Self::Elem], factor: &Self::Elem) {
        for x in row.iter_mut() {
            if !self.is_zero(x) {
                *x = self.mul(x, factor);
            }
        }
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

/// Element of a prime field, stored as its representative in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
#[repr(transparent)]
pub struct Fp(u32);

impl Fp {
    pub fn value(self) -> u32 {
        self.0
    }
}

/// GF(p) for a prime `p < 2^31`.
///
/// Products are reduced with Shoup's precomputed-quotient trick inside the
/// row kernels, which keeps the inner loop free of divisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 31 {
            return Err(FieldError::ModulusOutOfRange {
                modulus: p,
                degree_cap: 0,
            });
        }
        Ok(Self { p: p as u32 })
    }

    pub fn modulus(&self) -> u64 {
        self.p as u64
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp((v % self.p as u64) as u32)
    }

    #[inline]
    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = Fp;

    fn zero(&self) -> Fp {
        Fp(0)
    }
    fn one(&self) -> Fp {
        Fp(1)
    }
    #[inline]
    fn is_zero(&self, a: &Fp) -> bool {
        a.0 == 0
    }
    #[inline]
    fn add(&self, a: &Fp, b: &Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }
    #[inline]
    fn sub(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.p - b.0
        })
    }
    #[inline]
    fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(self.mul_raw(a.0, b.0))
    }
    fn neg(&self, a: &Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }
    fn inv(&self, a: &Fp) -> Result<Fp, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Fp(self.pow(a.0, self.p as u64 - 2)))
    }

    fn embed_integer(&self, n: i64) -> Fp {
        let p = self.p as i64;
        Fp(n.rem_euclid(p) as u32)
    }

    fn embed_rational(&self, q: &BigRational) -> Result<Fp, FieldError> {
        let p = BigInt::from(self.p);
        let num = q.numer().mod_floor(&p).to_u32().expect("reduced below p");
        let den = q.denom().mod_floor(&p).to_u32().expect("reduced below p");
        if den == 0 {
            return Err(FieldError::BadPrime {
                modulus: self.p as u64,
            });
        }
        Ok(self.mul(&Fp(num), &self.inv(&Fp(den))?))
    }

    fn format(&self, a: &Fp) -> String {
        a.0.to_string()
    }

    fn name(&self) -> String {
        format!("GF({})", self.p)
    }

    fn characteristic(&self) -> u64 {
        self.p as u64
    }

    fn sub_mul_assign(&self, dst: &mut [Fp], factor: &Fp, src: &[Fp]) {
        debug_assert_eq!(dst.len(), src.len());
        if factor.0 == 0 {
            return;
        }
        let p = self.p;
        // dst += w * src with w = -factor; Shoup: w' = floor(w * 2^32 / p).
        let w = p - factor.0;
        let w_shoup = (((w as u64) << 32) / p as u64) as u32;
        for (d, s) in dst.iter_mut().zip(src) {
            let a = s.0;
            let q = ((a as u64 * w_shoup as u64) >> 32) as u32;
            let mut t = a.wrapping_mul(w).wrapping_sub(q.wrapping_mul(p));
            if t >= p {
                t -= p;
            }
            let mut r = d.0 + t;
            if r >= p {
                r -= p;
            }
            d.0 = r;
        }
    }

    fn scale_assign(&self, row: &mut [Fp], factor: &Fp) {
        let p = self.p;
        let w = factor.0;
        let w_shoup = (((w as u64) << 32) / p as u64) as u32;
        for x in row.iter_mut() {
            let a = x.0;
            let q = ((a as u64 * w_shoup as u64) >> 32) as u32;
            let mut t = a.wrapping_mul(w).wrapping_sub(q.wrapping_mul(p));
            if t >= p {
                t -= p;
            }
            x.0 = t;
        }
    }
}

/// The rational numbers, backed by `num-rational`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn embed_integer(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
    fn embed_rational(&self, q: &BigRational) -> Result<BigRational, FieldError> {
        Ok(q.clone())
    }
    fn format(&self, a: &BigRational) -> String {
        format_rational(a)
    }
    fn name(&self) -> String {
        "Q".to_string()
    }

    fn characteristic(&self) -> u64 {
        0
    }
}

pub(crate) fn format_rational(a: &BigRational) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Which backend an analysis runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    PrimeField,
    Rational,
}

/// Field selection as given on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldConfig {
    pub kind: FieldKind,
    /// Fixed modulus; `None` means draw random primes from `seed`.
    pub modulus: Option<u64>,
    pub seed: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            kind: FieldKind::PrimeField,
            modulus: None,
            seed: 0,
        }
    }
}

impl FieldConfig {
    /// Parses `gfp`, `gfp:PRIME` or `rational`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self, String> {
        let spec = spec.trim();
        if spec == "rational" || spec == "q" || spec == "Q" {
            return Ok(Self {
                kind: FieldKind::Rational,
                modulus: None,
                seed,
            });
        }
        let rest = spec
            .strip_prefix("gfp")
            .ok_or_else(|| format!("unknown field '{spec}', expected gfp[:PRIME] or rational"))?;
        let modulus = match rest.strip_prefix(':') {
            Some(p) => Some(
                p.parse::<u64>()
                    .map_err(|_| format!("invalid prime '{p}'"))?,
            ),
            None if rest.is_empty() => None,
            None => return Err(format!("unknown field '{spec}'")),
        };
        Ok(Self {
            kind: FieldKind::PrimeField,
            modulus,
            seed,
        })
    }

    /// Checks the fixed modulus (if any) against a degree cap.
    pub fn validate(&self, degree_cap: usize) -> Result<(), FieldError> {
        if let Some(p) = self.modulus {
            if !is_prime(p) {
                return Err(FieldError::NotPrime(p));
            }
            if p <= 3 * degree_cap as u64 || p >= 1 << 31 {
                return Err(FieldError::ModulusOutOfRange {
                    modulus: p,
                    degree_cap,
                });
            }
        }
        Ok(())
    }

    /// Deterministic stream of distinct primes for this configuration.
    ///
    /// A fixed modulus comes first; the rest are random primes in
    /// `[2^30, 2^31)` drawn from `seed`.
    pub fn primes(&self) -> PrimeStream {
        PrimeStream {
            fixed: self.modulus,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            issued: Vec::new(),
        }
    }
}

pub struct PrimeStream {
    fixed: Option<u64>,
    rng: ChaCha8Rng,
    issued: Vec<u64>,
}

impl Iterator for PrimeStream {
    type Item = PrimeField;

    fn next(&mut self) -> Option<PrimeField> {
        if let Some(p) = self.fixed.take() {
            self.issued.push(p);
            return PrimeField::new(p).ok();
        }
        loop {
            let p = random_prime(&mut self.rng);
            if !self.issued.contains(&p) {
                self.issued.push(p);
                return Some(PrimeField::new(p).expect("sampled prime"));
            }
        }
    }
}

/// A uniformly drawn prime in `[2^30, 2^31)`.
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}

/// Deterministic Miller-Rabin, exact for all `n < 3.4e14`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn inverses() {
        let f = gf7();
        assert_eq!(f.inv(&f.elem(3)), Ok(f.elem(5)));
        assert_eq!(f.inv(&f.elem(0)), Err(FieldError::DivisionByZero));
        assert_eq!(RationalField.inv(&q(2, 3)), Ok(q(3, 2)));
        assert_eq!(
            RationalField.inv(&q(0, 1)),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn embedding_integers() {
        let f = gf7();
        assert_eq!(f.embed_integer(10), f.elem(3));
        assert_eq!(f.embed_integer(-1), f.elem(6));
        assert_eq!(f.embed_integer(7), f.elem(0));
    }

    #[test]
    fn embedding_rationals_detects_bad_primes() {
        let f = gf7();
        assert_eq!(f.embed_rational(&q(1, 2)), Ok(f.elem(4)));
        assert_eq!(f.embed_rational(&q(-3, 4)), Ok(f.elem(1)));
        assert_eq!(
            f.embed_rational(&q(1, 14)),
            Err(FieldError::BadPrime { modulus: 7 })
        );
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
        // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn prime_stream_is_reproducible_and_distinct() {
        let cfg = FieldConfig {
            seed: 42,
            ..FieldConfig::default()
        };
        let a: Vec<u64> = cfg.primes().take(3).map(|f| f.modulus()).collect();
        let b: Vec<u64> = cfg.primes().take(3).map(|f| f.modulus()).collect();
        assert_eq!(a, b);
        assert!(a[0] != a[1] && a[1] != a[2]);
        assert!(a.iter().all(|&p| (1 << 30..1 << 31).contains(&p)));
    }

    #[test]
    fn config_parsing() {
        assert_eq!(
            FieldConfig::parse("gfp:7", 1).unwrap().modulus,
            Some(7)
        );
        assert_eq!(
            FieldConfig::parse("rational", 1).unwrap().kind,
            FieldKind::Rational
        );
        assert!(FieldConfig::parse("gf7", 1).is_err());
        let cfg = FieldConfig::parse("gfp:7", 1).unwrap();
        assert!(cfg.validate(3).is_err());
        assert!(cfg.validate(2).is_ok());
        assert!(FieldConfig::parse("gfp:9", 0).unwrap().validate(1).is_err());
    }

    #[test]
    fn row_kernels_match_scalar_arithmetic() {
        let f = PrimeField::new(2_147_483_629).unwrap();
        let src: Vec<Fp> = (0..50u64).map(|i| f.elem(i * 912_367_123 + 5)).collect();
        let mut dst: Vec<Fp> = (0..50u64).map(|i| f.elem(i * 77_777_777 + 1)).collect();
        let factor = f.elem(1_999_999_999);
        let expect: Vec<Fp> = dst
            .iter()
            .zip(&src)
            .map(|(d, s)| f.sub(d, &f.mul(&factor, s)))
            .collect();
        f.sub_mul_assign(&mut dst, &factor, &src);
        assert_eq!(dst, expect);
        let expect: Vec<Fp> = dst.iter().map(|d| f.mul(d, &factor)).collect();
        f.scale_assign(&mut dst, &factor);
        assert_eq!(dst, expect);
    }

    const P: u64 = 1_000_000_007;

    proptest! {
        #[test]
        fn prime_field_axioms(a in 0..P, b in 0..P, c in 0..P) {
            let f = PrimeField::new(P).unwrap();
            let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            prop_assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
            if !f.is_zero(&a) {
                prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
            }
        }

        #[test]
        fn rational_field_axioms(
            (an, ad) in (-50i64..50, 1i64..20),
            (bn, bd) in (-50i64..50, 1i64..20),
            (cn, cd) in (-50i64..50, 1i64..20),
        ) {
            let f = RationalField;
            let (a, b, c) = (q(an, ad), q(bn, bd), q(cn, cd));
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            if !f.is_zero(&a) {
                prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
                prop_assert!(f.inv(&a).unwrap().denom() > &BigInt::zero());
            }
        }

        #[test]
        fn reduction_is_a_ring_homomorphism(a in -1000i64..1000, b in -1000i64..1000) {
            let f = PrimeField::new(P).unwrap();
            prop_assert_eq!(f.embed_integer(a * b), f.mul(&f.embed_integer(a), &f.embed_integer(b)));
            prop_assert_eq!(f.embed_integer(a + b), f.add(&f.embed_integer(a), &f.embed_integer(b)));
        }
    }
}
