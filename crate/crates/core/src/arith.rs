//! Coefficient arithmetic: big integers, reduced rationals and prime-field residues.
//!
//! Every polynomial carries a [`Ring`] and stores its coefficients as
//! [`Scalar`] values of the matching variant. Prime-field residues are kept in
//! machine words; products go through `u128`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

/// Deterministic trial division up to `sqrt(p)`.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of `Z/pZ` for a prime `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    residue: u64,
    modulus: u64,
}

impl Fp {
    /// `modulus` must already be known prime; use [`Ring::prime_field`] to check.
    pub fn new(value: u64, modulus: u64) -> Self {
        Fp { residue: value % modulus, modulus }
    }

    pub fn from_i64(value: i64, modulus: u64) -> Self {
        let r = (value as i128).rem_euclid(modulus as i128);
        Fp::new(r as u64, modulus)
    }

    pub fn from_integer(value: &BigInt, modulus: u64) -> Self {
        let m = BigInt::from(modulus);
        let r = value.mod_floor(&m);
        Fp::new(r.to_u64().expect("residue fits in u64"), modulus)
    }

    pub fn residue(self) -> u64 {
        self.residue
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    fn check(self, other: Fp) {
        assert_eq!(
            self.modulus, other.modulus,
            "prime field elements of different characteristic"
        );
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::new(1, self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Inverse via Fermat; `p` is prime.
    pub fn inv(self) -> Result<Fp> {
        if self.residue == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.modulus - 2))
    }
}

impl std::ops::Add for Fp {
    type Output = Fp;

    fn add(self, other: Fp) -> Fp {
        self.check(other);
        let s = (self.residue as u128 + other.residue as u128) % self.modulus as u128;
        Fp { residue: s as u64, modulus: self.modulus }
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;

    fn neg(self) -> Fp {
        if self.residue == 0 {
            self
        } else {
            Fp { residue: self.modulus - self.residue, modulus: self.modulus }
        }
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;

    fn sub(self, other: Fp) -> Fp {
        self + (-other)
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;

    fn mul(self, other: Fp) -> Fp {
        self.check(other);
        let s = (self.residue as u128 * other.residue as u128) % self.modulus as u128;
        Fp { residue: s as u64, modulus: self.modulus }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// Coefficient ring of a polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Ring> {
        if is_prime(p) {
            Ok(Ring::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Integers)
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Ring::PrimeField(p) => p,
            _ => 0,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Ring::Integers => Scalar::Int(BigInt::from(v)),
            Ring::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            Ring::PrimeField(p) => Scalar::Mod(Fp::from_i64(v, p)),
        }
    }

    pub fn from_integer(self, v: &BigInt) -> Scalar {
        match self {
            Ring::Integers => Scalar::Int(v.clone()),
            Ring::Rationals => Scalar::Rat(BigRational::from_integer(v.clone())),
            Ring::PrimeField(p) => Scalar::Mod(Fp::from_integer(v, p)),
        }
    }

    /// Image of a rational number in this ring, if it has one.
    pub fn from_rational(self, q: &BigRational) -> Result<Scalar> {
        match self {
            Ring::Integers => {
                if q.is_integer() {
                    Ok(Scalar::Int(q.to_integer()))
                } else {
                    Err(Error::CoefficientNotInRing(q.to_string(), self.to_string()))
                }
            }
            Ring::Rationals => Ok(Scalar::Rat(q.clone())),
            Ring::PrimeField(p) => project_mod_p(q, p).map(Scalar::Mod),
        }
    }

    /// Image of a scalar from another ring under the canonical map
    /// `Z -> Q`, `Z -> F_p` or `Q -> F_p` (partial on denominators).
    pub fn coerce(self, s: &Scalar) -> Result<Scalar> {
        match (self, s) {
            (Ring::PrimeField(p), Scalar::Mod(x)) if x.modulus == p => Ok(s.clone()),
            (_, Scalar::Mod(x)) => Err(Error::RingMismatch(
                Ring::PrimeField(x.modulus).to_string(),
                self.to_string(),
            )),
            (_, Scalar::Int(v)) => Ok(self.from_integer(v)),
            (_, Scalar::Rat(q)) => self.from_rational(q),
        }
    }

    pub fn contains(self, s: &Scalar) -> bool {
        matches!(
            (self, s),
            (Ring::Integers, Scalar::Int(_)) | (Ring::Rationals, Scalar::Rat(_))
        ) || matches!((self, s), (Ring::PrimeField(p), Scalar::Mod(x)) if x.modulus == p)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// A ring element. The variant determines the ring; arithmetic between
/// different variants panics (callers validate rings at API boundaries).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Mod(Fp),
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Int(_) => Ring::Integers,
            Scalar::Rat(_) => Ring::Rationals,
            Scalar::Mod(x) => Ring::PrimeField(x.modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Mod(v) => v.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Int(v) => v.is_one(),
            Scalar::Rat(v) => v.is_one(),
            Scalar::Mod(v) => v.residue == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a + b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod(a), Scalar::Mod(b)) => Scalar::Mod(*a + *b),
            _ => panic!("ring mismatch: {} + {}", self.ring(), other.ring()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(-a),
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod(a) => Scalar::Mod(-*a),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod(a), Scalar::Mod(b)) => Scalar::Mod(*a * *b),
            _ => panic!("ring mismatch: {} * {}", self.ring(), other.ring()),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(num_traits::pow(a.clone(), e as usize)),
            Scalar::Rat(a) => Scalar::Rat(num_traits::pow(a.clone(), e as usize)),
            Scalar::Mod(a) => Scalar::Mod(a.pow(e as u64)),
        }
    }

    /// Multiplicative inverse; integers only invert `±1`.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Int(a) => {
                if a.abs().is_one() {
                    Ok(self.clone())
                } else {
                    Err(Error::InexactDivision { dividend: "1".into(), divisor: a.to_string() })
                }
            }
            Scalar::Rat(a) => Ok(Scalar::Rat(a.recip())),
            Scalar::Mod(a) => a.inv().map(Scalar::Mod),
        }
    }

    /// Field division, or exact division in the integers.
    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring().to_string(), other.ring().to_string()));
        }
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => exact_div(a, b).map(Scalar::Int),
            _ => Ok(self.mul(&other.inv()?)),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring().to_string(), other.ring().to_string()));
        }
        Ok(self.add(other))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring().to_string(), other.ring().to_string()));
        }
        Ok(self.mul(other))
    }

    /// The value as a rational number (prime-field residues map to `[0, p)`).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Int(a) => BigRational::from_integer(a.clone()),
            Scalar::Rat(a) => a.clone(),
            Scalar::Mod(a) => BigRational::from_integer(BigInt::from(a.residue)),
        }
    }

    /// True when the printed form needs a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Int(a) => a.is_negative(),
            Scalar::Rat(a) => a.is_negative(),
            Scalar::Mod(_) => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(a) => write!(f, "{a}"),
            Scalar::Rat(a) => write!(f, "{a}"),
            Scalar::Mod(a) => write!(f, "{a}"),
        }
    }
}

pub fn exact_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::InexactDivision { dividend: a.to_string(), divisor: b.to_string() })
    }
}

/// gcd of absolute values; zero only when every entry is zero.
pub fn content(values: &[BigInt]) -> Result<BigInt> {
    if values.is_empty() {
        return Err(Error::EmptyContent);
    }
    let mut g = BigInt::zero();
    for v in values {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    Ok(g)
}

/// `num * den^{-1} mod p`.
pub fn project_mod_p(q: &BigRational, p: u64) -> Result<Fp> {
    let den = Fp::from_integer(q.denom(), p);
    if den.is_zero() {
        return Err(Error::DenominatorVanishesModP(q.to_string(), p));
    }
    Ok(Fp::from_integer(q.numer(), p) * den.inv()?)
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_sum_is_reduced() {
        let s = Scalar::Rat(q(1, 2)).add(&Scalar::Rat(q(1, 3)));
        assert_eq!(s, Scalar::Rat(q(5, 6)));
        assert_eq!(s.to_string(), "5/6");
    }

    #[test]
    fn inverse_in_f5() {
        let three = Ring::prime_field(5).unwrap().from_i64(3);
        assert_eq!(three.inv().unwrap(), Ring::PrimeField(5).from_i64(2));
        assert_eq!(Ring::PrimeField(5).zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn integer_exact_division() {
        let z = Ring::Integers;
        assert_eq!(z.from_i64(6).div(&z.from_i64(3)).unwrap(), z.from_i64(2));
        assert!(matches!(
            z.from_i64(7).div(&z.from_i64(3)),
            Err(Error::InexactDivision { .. })
        ));
        assert_eq!(z.from_i64(7).div(&z.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Ring::Integers.one();
        let b = Ring::Rationals.one();
        assert!(matches!(a.checked_add(&b), Err(Error::RingMismatch(..))));
        assert!(matches!(a.div(&b), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn primality() {
        assert!(Ring::prime_field(4).is_err());
        assert!(Ring::prime_field(1).is_err());
        assert!(Ring::prime_field(0).is_err());
        let primes: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2_147_483_647));
    }

    #[test]
    fn content_examples() {
        let v = |xs: &[i64]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(content(&v(&[2, 4, 6])).unwrap(), BigInt::from(2));
        assert_eq!(content(&v(&[0, 0])).unwrap(), BigInt::from(0));
        assert_eq!(content(&v(&[2, 2, 4, 4, 2, 2])).unwrap(), BigInt::from(2));
        assert_eq!(content(&v(&[-6, 9])).unwrap(), BigInt::from(3));
        assert_eq!(content(&[]), Err(Error::EmptyContent));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_mod_p(&q(3, 2), 5).unwrap().residue(), 4);
        assert_eq!(project_mod_p(&q(7, 1), 7).unwrap().residue(), 0);
        assert_eq!(project_mod_p(&q(-1, 3), 7).unwrap().residue(), 2);
        assert!(matches!(
            project_mod_p(&q(1, 2), 2),
            Err(Error::DenominatorVanishesModP(_, 2))
        ));
    }

    #[test]
    fn coercions() {
        let f3 = Ring::PrimeField(3);
        assert_eq!(f3.coerce(&Scalar::Int((-1).into())).unwrap(), f3.from_i64(2));
        assert!(Ring::Integers.coerce(&Scalar::Rat(q(1, 2))).is_err());
        assert!(Ring::Rationals.coerce(&f3.one()).is_err());
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn field_inverse(n in 1u64..1000, p in prop::sample::select(vec![2u64, 3, 5, 7, 101])) {
            let a = Fp::new(n, p);
            prop_assume!(!a.is_zero());
            prop_assert_eq!((a * a.inv().unwrap()).residue(), 1);
        }

        #[test]
        fn rational_inverse(a in small_rational()) {
            prop_assume!(!a.is_zero());
            let s = Scalar::Rat(a);
            prop_assert!(s.mul(&s.inv().unwrap()).is_one());
        }

        #[test]
        fn normalization_is_idempotent(n in -1000i64..1000, d in 1i64..1000) {
            let r = q(n, d);
            let again = BigRational::new(r.numer().clone(), r.denom().clone());
            prop_assert_eq!(&again, &r);
            prop_assert!(r.denom() > &BigInt::zero());
            prop_assert!(r.numer().gcd(r.denom()).is_one());
        }

        #[test]
        fn content_divides_inputs(xs in prop::collection::vec(-1000i64..1000, 1..8)) {
            let v: Vec<BigInt> = xs.iter().map(|&x| x.into()).collect();
            let c = content(&v).unwrap();
            prop_assert!(c >= BigInt::zero());
            for x in &v {
                if c.is_zero() {
                    prop_assert!(x.is_zero());
                } else {
                    prop_assert!(exact_div(x, &c).is_ok());
                }
            }
        }
    }

    #[test]
    fn projection_is_a_ring_homomorphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5, 7] {
            let mut checked = 0;
            while checked < 1000 {
                let a = q(rng.gen_range(-40..40), rng.gen_range(1..30));
                let b = q(rng.gen_range(-40..40), rng.gen_range(1..30));
                let (Ok(pa), Ok(pb)) = (project_mod_p(&a, p), project_mod_p(&b, p)) else {
                    continue;
                };
                assert_eq!(project_mod_p(&(&a + &b), p).unwrap(), pa + pb);
                assert_eq!(project_mod_p(&(&a * &b), p).unwrap(), pa * pb);
                checked += 1;
            }
        }
    }
}
