//! Sparse multivariate polynomials over [`Ring`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{content, exact_div, Ring, Scalar};
use crate::error::{Error, Result};

/// Ordered list of distinct variable names.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VariableSet(Arc<[String]>);

impl VariableSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(Error::Invalid(format!("`{n}` is not a valid variable name")));
            }
            if !seen.insert(n) {
                return Err(Error::DuplicateVariable(n.to_string()));
            }
        }
        Ok(VariableSet(names.iter().map(|n| n.as_ref().to_string()).collect()))
    }

    /// Parses a comma separated list such as `x,y,z`.
    pub fn parse_list(list: &str) -> Result<Self> {
        let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        VariableSet::new(&names)
    }

    /// `x, y` / `x, y, z` for small `n`, else `x1..xn`.
    pub fn standard(n: usize) -> Self {
        let names: Vec<String> = match n {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            _ => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        VariableSet(names.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// This set followed by `extra`.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut all: Vec<String> = self.0.to_vec();
        all.extend(extra.iter().map(|s| s.as_ref().to_string()));
        VariableSet::new(&all)
    }
}

impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(","))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector. The derived `Ord` is plain lexicographic and is only used
/// for map keys; use [`MonomialOrder`] for term orders.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub enum MonomialOrder {
    #[default]
    GradedReverseLex,
    Lex,
    GradedLex,
}

impl MonomialOrder {
    pub fn compare(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GradedLex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                da.cmp(&db).then_with(|| a.cmp(b))
            }
            MonomialOrder::GradedReverseLex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.iter().zip(b).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MonomialOrder::GradedReverseLex => "grevlex",
            MonomialOrder::Lex => "lex",
            MonomialOrder::GradedLex => "deglex",
        }
    }
}

impl std::str::FromStr for MonomialOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grevlex" => Ok(MonomialOrder::GradedReverseLex),
            "lex" => Ok(MonomialOrder::Lex),
            "deglex" | "grlex" => Ok(MonomialOrder::GradedLex),
            _ => Err(Error::Invalid(format!("unknown monomial order `{s}`"))),
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    ring: Ring,
    vars: VariableSet,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(ring: Ring, vars: &VariableSet) -> Self {
        Polynomial { ring, vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: Ring, vars: &VariableSet, c: Scalar) -> Self {
        let mut p = Polynomial::zero(ring, vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn one(ring: Ring, vars: &VariableSet) -> Self {
        Polynomial::constant(ring, vars, ring.one())
    }

    pub fn from_i64(ring: Ring, vars: &VariableSet, c: i64) -> Self {
        Polynomial::constant(ring, vars, ring.from_i64(c))
    }

    pub fn var(ring: Ring, vars: &VariableSet, i: usize) -> Self {
        let mut p = Polynomial::zero(ring, vars);
        p.add_term(Monomial::var(vars.len(), i), ring.one());
        p
    }

    pub fn var_named(ring: Ring, vars: &VariableSet, name: &str) -> Result<Self> {
        let i = vars.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Polynomial::var(ring, vars, i))
    }

    pub fn from_terms<I>(ring: Ring, vars: &VariableSet, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Polynomial::zero(ring, vars);
        for (m, c) in terms {
            if m.0.len() != vars.len() {
                return Err(Error::ArityMismatch { expected: vars.len(), got: m.0.len() });
            }
            let c = ring.coerce(&c)?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    /// Terms keyed by exponent vector (lexicographic iteration order).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    /// Terms sorted descending in `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.compare(&b.0 .0, &a.0 .0));
        v
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| order.compare(&a.0 .0, &b.0 .0))
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Total degree counting only the variables with index `< k`.
    pub fn degree_in_leading(&self, k: usize) -> u32 {
        self.terms.keys().map(|m| m.0[..k].iter().sum()).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn compatible(&self, other: &Polynomial) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.neg());
        }
        Ok(r)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let c = c1.mul(c2);
                match acc.get_mut(&m) {
                    Some(v) => *v = v.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Polynomial { ring: self.ring, vars: self.vars.clone(), terms })
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let c = self.ring.coerce(c).expect("scalar from a compatible ring");
        let mut r = Polynomial::zero(self.ring, &self.vars);
        for (m, v) in &self.terms {
            r.add_term(m.clone(), v.mul(&c));
        }
        r
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        let terms = self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect();
        Polynomial { ring: self.ring, vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.ring, &self.vars);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal derivative with respect to variable `i`.
    pub fn partial_derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars(), "variable index {i} out of range");
        let mut r = Polynomial::zero(self.ring, &self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            r.add_term(Monomial(exps), c.mul(&self.ring.from_i64(e as i64)));
        }
        r
    }

    /// Evaluates at a point. Coefficients are mapped into the ring of the point
    /// (for example an integer polynomial at an `F_p` point).
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), got: point.len() });
        }
        let target = point.first().map(Scalar::ring).unwrap_or(self.ring);
        if let Some(bad) = point.iter().find(|s| s.ring() != target) {
            return Err(Error::RingMismatch(target.to_string(), bad.ring().to_string()));
        }
        let mut powers: HashMap<(usize, u32), Scalar> = HashMap::new();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.coerce(c)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers.entry((i, e)).or_insert_with(|| point[i].pow(e));
                t = t.mul(pw);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Ring homomorphism sending variable `i` to `images[i]`. Coefficients are
    /// mapped into the ring of the images.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), got: images.len() });
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        for g in images {
            first.compatible(g)?;
        }
        let (ring, vars) = (first.ring, first.vars.clone());
        let mut powers: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut acc = Polynomial::zero(ring, &vars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(ring, &vars, ring.coerce(c)?);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 || t.is_zero() {
                    continue;
                }
                let pw = powers.entry((i, e)).or_insert_with(|| images[i].pow(e));
                t = &t * pw;
            }
            for (k, v) in t.terms {
                acc.add_term(k, v);
            }
        }
        Ok(acc)
    }

    /// Writes `f = (content / denominator_lcm) * primitive` with `primitive`
    /// an integer polynomial of content 1. The returned content is positive.
    pub fn integer_normalize(&self) -> Result<(BigInt, BigInt, Polynomial)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let rationals: Vec<_> = match self.ring {
            Ring::Integers | Ring::Rationals => {
                self.terms.values().map(Scalar::to_rational).collect()
            }
            Ring::PrimeField(_) => return Err(Error::NotAField("integer normalization over F_p".into())),
        };
        let den = rationals.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let scaled: Vec<BigInt> =
            rationals.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        let c = content(&scaled)?;
        let terms = self
            .terms
            .keys()
            .zip(&scaled)
            .map(|(m, v)| (m.clone(), Scalar::Int(exact_div(v, &c).expect("content divides"))))
            .collect();
        let primitive = Polynomial { ring: Ring::Integers, vars: self.vars.clone(), terms };
        Ok((den, c, primitive))
    }

    /// Integer content of an integer polynomial (0 for the zero polynomial).
    pub fn integer_content(&self) -> BigInt {
        let v: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| match c {
                Scalar::Int(v) => v.clone(),
                other => other.to_rational().numer().clone(),
            })
            .collect();
        if v.is_empty() {
            BigInt::zero()
        } else {
            content(&v).expect("nonempty")
        }
    }

    /// Maps every coefficient into `ring` via the canonical map.
    pub fn to_ring(&self, ring: Ring) -> Result<Polynomial> {
        if ring == self.ring {
            return Ok(self.clone());
        }
        let mut r = Polynomial::zero(ring, &self.vars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), ring.coerce(c)?);
        }
        Ok(r)
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<Polynomial> {
        self.to_ring(Ring::prime_field(p)?)
    }

    /// Same coefficients over a different variable set of equal length.
    pub fn relabel(&self, vars: &VariableSet) -> Result<Polynomial> {
        if vars.len() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), got: vars.len() });
        }
        Ok(Polynomial { ring: self.ring, vars: vars.clone(), terms: self.terms.clone() })
    }

    /// Embeds into `vars`, sending variable `i` to `vars[positions[i]]`.
    pub fn embed(&self, vars: &VariableSet, positions: &[usize]) -> Result<Polynomial> {
        if positions.len() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), got: positions.len() });
        }
        let mut r = Polynomial::zero(self.ring, vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &k) in positions.iter().enumerate() {
                e[k] += m.0[i];
            }
            r.add_term(Monomial(e), c.clone());
        }
        Ok(r)
    }

    /// Embeds into a variable set that starts with this one.
    pub fn extend_to(&self, vars: &VariableSet) -> Result<Polynomial> {
        if vars.len() < self.nvars() || vars.names()[..self.nvars()] != self.vars.names()[..] {
            return Err(Error::VariableMismatch);
        }
        let positions: Vec<usize> = (0..self.nvars()).collect();
        self.embed(vars, &positions)
    }

    /// Groups terms by the exponents of the variables with index `< k`; each
    /// group is returned as a polynomial in the remaining variables.
    pub fn split_leading(&self, k: usize, rest: &VariableSet) -> Result<BTreeMap<Monomial, Polynomial>> {
        if rest.len() != self.nvars() - k {
            return Err(Error::ArityMismatch { expected: self.nvars() - k, got: rest.len() });
        }
        let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let head = Monomial(m.0[..k].to_vec());
            let tail = Monomial(m.0[k..].to_vec());
            out.entry(head)
                .or_insert_with(|| Polynomial::zero(self.ring, rest))
                .add_term(tail, c.clone());
        }
        Ok(out)
    }

    /// Keeps the terms whose monomials satisfy `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Polynomial {
        let terms = self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect();
        Polynomial { ring: self.ring, vars: self.vars.clone(), terms }
    }

    /// Exact quotient `self / divisor`; errors unless the division is exact.
    pub fn exact_div(&self, divisor: &Polynomial) -> Result<Polynomial> {
        self.compatible(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let order = MonomialOrder::GradedReverseLex;
        let (dm, dc) = divisor.leading_term(order).map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.ring, &self.vars);
        while let Some((m, c)) = rem.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
            let inexact = || Error::InexactDivision { dividend: self.to_string(), divisor: divisor.to_string() };
            if !dm.divides(&m) {
                return Err(inexact());
            }
            let qc = c.div(&dc).map_err(|_| inexact())?;
            let qm = dm.quotient_of(&m);
            let mut t = Polynomial::zero(self.ring, &self.vars);
            t.add_term(qm, qc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Ok(quot)
    }

    /// Largest absolute value of a coefficient (rationals rounded up).
    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| match c {
                Scalar::Int(v) => v.abs(),
                Scalar::Rat(q) => q.abs().ceil().to_integer(),
                Scalar::Mod(x) => BigInt::from(x.residue()),
            })
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &VariableSet, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(vars.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text form: terms in descending graded reverse lexicographic order.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.sorted_terms(MonomialOrder::GradedReverseLex).into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.neg() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write_monomial(f, &self.vars, m)?;
            } else {
                write!(f, "{abs}*")?;
                write_monomial(f, &self.vars, m)?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("polynomials over the same ring and variables")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        Polynomial { ring: self.ring, vars: self.vars.clone(), terms }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
