//! Polynomial endomorphisms.
//!
//! A [`PolyMap`] of dimension `n` acts on the first `n` variables of its
//! [`VariableSet`]. Any further variables are parameters: they are carried
//! through composition unchanged and do not count towards degrees.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::Rng;

use crate::arith::{Ring, Scalar};
use crate::error::{Error, Result};
use crate::parse::parse_components;
use crate::poly::{Monomial, Polynomial, VariableSet};
use crate::sample::{random_polynomial_in, rng_from_seed, SampleRng};

/// Default cap on the number of points enumerated by [`PolyMap::is_injective_on_points`].
pub const DEFAULT_POINT_CAP: u128 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMap {
    components: Vec<Polynomial>,
}

impl PolyMap {
    /// All components must share ring and variables, and there must be at most
    /// as many components as variables.
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::Invalid("a map needs at least one component".into()))?;
        for c in &components[1..] {
            if c.ring() != first.ring() {
                return Err(Error::RingMismatch(first.ring().to_string(), c.ring().to_string()));
            }
            if c.vars() != first.vars() {
                return Err(Error::VariableMismatch);
            }
        }
        if components.len() > first.nvars() {
            return Err(Error::ArityMismatch { expected: first.nvars(), got: components.len() });
        }
        Ok(PolyMap { components })
    }

    pub fn identity(ring: Ring, vars: &VariableSet, n: usize) -> Self {
        PolyMap { components: (0..n).map(|i| Polynomial::var(ring, vars, i)).collect() }
    }

    /// Parses `[p1; ...; pn]`.
    pub fn parse(text: &str, vars: &VariableSet, ring: Ring) -> Result<Self> {
        PolyMap::new(parse_components(text, vars, ring)?)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn ring(&self) -> Ring {
        self.components[0].ring()
    }

    pub fn vars(&self) -> &VariableSet {
        self.components[0].vars()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    pub fn jacobian(&self) -> PolyMatrix {
        let n = self.dim();
        PolyMatrix {
            rows: self
                .components
                .iter()
                .map(|f| (0..n).map(|j| f.partial_derivative(j)).collect())
                .collect(),
        }
    }

    pub fn det_jacobian(&self) -> Polynomial {
        self.jacobian().determinant()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.dim() != other.dim() {
            return Err(Error::ArityMismatch { expected: self.dim(), got: other.dim() });
        }
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring().to_string(), other.ring().to_string()));
        }
        if self.vars() != other.vars() {
            return Err(Error::VariableMismatch);
        }
        let images = other.images();
        let components = self.components.iter().map(|f| f.substitute(&images)).collect::<Result<_>>()?;
        Ok(PolyMap { components })
    }

    /// Components followed by the parameter variables, ready for substitution.
    fn images(&self) -> Vec<Polynomial> {
        let mut images = self.components.clone();
        for k in self.dim()..self.vars().len() {
            images.push(Polynomial::var(self.ring(), self.vars(), k));
        }
        images
    }

    /// Maximal total degree in the map variables.
    pub fn degree(&self) -> u32 {
        let n = self.dim();
        self.components.iter().map(|f| f.degree_in_leading(n)).max().unwrap_or(0)
    }

    /// Terms of degree at most 1 in the map variables.
    pub fn affine_part(&self) -> PolyMap {
        let n = self.dim();
        let components = self
            .components
            .iter()
            .map(|f| f.filter_terms(|m| m.exponents()[..n].iter().sum::<u32>() <= 1))
            .collect();
        PolyMap { components }
    }

    pub fn has_identity_affine_part(&self) -> bool {
        self.affine_part() == PolyMap::identity(self.ring(), self.vars(), self.dim())
    }

    /// Splits the affine part into `(matrix, translation)`. Fails when a
    /// coefficient depends on a parameter.
    pub fn affine_data(&self) -> Result<(Vec<Vec<Scalar>>, Vec<Scalar>)> {
        let n = self.dim();
        let aff = self.affine_part();
        let mut matrix = vec![vec![self.ring().zero(); n]; n];
        let mut translation = vec![self.ring().zero(); n];
        for (i, f) in aff.components.iter().enumerate() {
            for (m, c) in f.terms() {
                let e = m.exponents();
                if e[n..].iter().any(|&x| x > 0) {
                    return Err(Error::Unsupported("affine part depends on parameters".into()));
                }
                match e[..n].iter().position(|&x| x == 1) {
                    Some(j) => matrix[i][j] = c.clone(),
                    None => translation[i] = c.clone(),
                }
            }
        }
        Ok((matrix, translation))
    }

    /// The affine map `x ↦ matrix·x + translation` in the first `n` variables.
    pub fn affine(ring: Ring, vars: &VariableSet, matrix: &[Vec<Scalar>], translation: &[Scalar]) -> PolyMap {
        let n = matrix.len();
        let components = (0..n)
            .map(|i| {
                let mut f = Polynomial::constant(ring, vars, translation[i].clone());
                for (j, c) in matrix[i].iter().enumerate() {
                    f.add_term(Monomial::var(vars.len(), j), c.clone());
                }
                f
            })
            .collect();
        PolyMap { components }
    }

    /// Inverse of the affine part, as a map.
    pub fn affine_inverse(&self) -> Result<PolyMap> {
        let (m, b) = self.affine_data()?;
        let minv = invert_matrix(self.ring(), &m)?;
        let shift: Vec<Scalar> = (0..self.dim())
            .map(|i| (0..self.dim()).fold(self.ring().zero(), |acc, j| acc.sub(&minv[i][j].mul(&b[j]))))
            .collect();
        Ok(PolyMap::affine(self.ring(), self.vars(), &minv, &shift))
    }

    /// `A⁻¹ ∘ self` where `A` is the affine part; the result has identity affine part.
    pub fn normalize_affine(&self) -> Result<PolyMap> {
        self.affine_inverse()?.compose(self)
    }

    pub fn to_ring(&self, ring: Ring) -> Result<PolyMap> {
        Ok(PolyMap { components: self.components.iter().map(|f| f.to_ring(ring)).collect::<Result<_>>()? })
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<PolyMap> {
        self.to_ring(Ring::prime_field(p)?)
    }

    /// Searches for `G` with `deg G <= bound` and `F∘G = G∘F = id`.
    ///
    /// After normalising to `x + H` the inverse `x + K` satisfies
    /// `K = -H(x + K)`, whose degree-`k` part only involves parts of `K` of
    /// degree below `k`. The candidate is accepted only if both compositions
    /// are the identity. Over `Z` the search runs over `Q` and succeeds only
    /// if the inverse has integer coefficients.
    pub fn formal_inverse(&self, bound: u32) -> Result<Option<PolyMap>> {
        if self.ring() == Ring::Integers {
            let Some(g) = self.to_ring(Ring::Rationals)?.formal_inverse(bound)? else {
                return Ok(None);
            };
            return match g.to_ring(Ring::Integers) {
                Ok(g) => Ok(Some(g)),
                Err(Error::CoefficientNotInRing(..)) => Ok(None),
                Err(e) => Err(e),
            };
        }
        if !self.ring().is_field() {
            return Err(Error::NotAField(self.ring().to_string()));
        }
        let linv = self.affine_inverse()?;
        let normalized = linv.compose(self)?;
        let (ring, vars, n) = (self.ring(), self.vars().clone(), self.dim());
        let x = PolyMap::identity(ring, &vars, n);
        let h: Vec<Polynomial> = normalized.components.iter().zip(&x.components).map(|(f, xi)| f - xi).collect();
        let bound = bound.max(1);
        let mut k: Vec<Polynomial> = vec![Polynomial::zero(ring, &vars); n];
        for deg in 2..=bound {
            let mut images: Vec<Polynomial> = x.components.iter().zip(&k).map(|(xi, ki)| xi + ki).collect();
            images.extend((n..vars.len()).map(|j| Polynomial::var(ring, &vars, j)));
            for (i, hi) in h.iter().enumerate() {
                let value = substitute_truncated(hi, &images, n, deg)?;
                let part = value.filter_terms(|m| leading_degree(m, n) == deg);
                k[i] = &k[i] - &part;
            }
        }
        let g_normal = PolyMap { components: x.components.iter().zip(&k).map(|(xi, ki)| xi + ki).collect() };
        let g = g_normal.compose(&linv)?;
        if self.compose(&g)? == x && g.compose(self)? == x {
            Ok(Some(g))
        } else {
            Ok(None)
        }
    }

    /// [`formal_inverse`](Self::formal_inverse) with bound `deg(F)^(n-1)`.
    pub fn is_invertible(&self) -> Result<Option<PolyMap>> {
        let d = self.degree().max(1);
        let bound = d.checked_pow(self.dim() as u32 - 1).unwrap_or(u32::MAX);
        self.formal_inverse(bound)
    }

    /// Evaluates `F` at every point of `F_p^n` and reports whether two points collide.
    pub fn is_injective_on_points(&self, cap: u128) -> Result<bool> {
        let Ring::PrimeField(p) = self.ring() else {
            return Err(Error::Unsupported("point enumeration needs a prime field".into()));
        };
        if self.vars().len() != self.dim() {
            return Err(Error::Unsupported("point enumeration needs a map without parameters".into()));
        }
        let n = self.dim();
        let size = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        let ring = self.ring();
        let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(size as usize);
        let mut point = vec![0u64; n];
        loop {
            let scalars: Vec<Scalar> = point.iter().map(|&v| ring.from_i64(v as i64)).collect();
            let image = self
                .components
                .iter()
                .map(|f| match f.evaluate(&scalars)? {
                    Scalar::Mod(r) => Ok(r.residue()),
                    other => Err(Error::RingMismatch(ring.to_string(), other.ring().to_string())),
                })
                .collect::<Result<Vec<u64>>>()?;
            if !seen.insert(image) {
                return Ok(false);
            }
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(true);
                }
                point[i] += 1;
                if point[i] < p {
                    break;
                }
                point[i] = 0;
                i += 1;
            }
        }
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

fn leading_degree(m: &Monomial, n: usize) -> u32 {
    m.exponents()[..n].iter().sum()
}

/// `f(images)` keeping only terms of degree at most `max_deg` in the first `n` variables.
fn substitute_truncated(f: &Polynomial, images: &[Polynomial], n: usize, max_deg: u32) -> Result<Polynomial> {
    let truncate = |p: Polynomial| p.filter_terms(|m| leading_degree(m, n) <= max_deg);
    let ring = images[0].ring();
    let vars = images[0].vars().clone();
    let mut powers: HashMap<(usize, u32), Polynomial> = HashMap::new();
    let mut acc = Polynomial::zero(ring, &vars);
    for (m, c) in f.terms() {
        let mut t = Polynomial::constant(ring, &vars, ring.coerce(c)?);
        for (i, &e) in m.exponents().iter().enumerate() {
            if e == 0 || t.is_zero() {
                continue;
            }
            let pw = powers.entry((i, e)).or_insert_with(|| {
                let mut pw = Polynomial::one(ring, &vars);
                for _ in 0..e {
                    pw = truncate(&pw * &images[i]);
                }
                pw
            });
            t = truncate(&t * pw);
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Inverse of a square scalar matrix. Integer matrices are inverted over `Q`
/// and must have an integral inverse.
pub fn invert_matrix(ring: Ring, m: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = m.len();
    let work_ring = if ring == Ring::Integers { Ring::Rationals } else { ring };
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .map(|row| row.iter().map(|c| work_ring.coerce(c)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { work_ring.one() } else { work_ring.zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::NonInvertibleAffinePart)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pinv = a[col][col].inv()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&pinv);
            inv[col][j] = inv[col][j].mul(&pinv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].sub(&factor.mul(&a[col][j]));
                inv[r][j] = inv[r][j].sub(&factor.mul(&inv[col][j]));
            }
        }
    }
    if ring == Ring::Integers {
        inv.iter()
            .map(|row| {
                row.iter()
                    .map(|c| ring.from_rational(&c.to_rational()).map_err(|_| Error::NonInvertibleAffinePart))
                    .collect()
            })
            .collect()
    } else {
        Ok(inv)
    }
}

/// Square matrix of polynomials over a common ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        Ok(PolyMatrix { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Polynomial>] {
        &self.rows
    }

    /// Cofactor expansion up to size 4, fraction-free Bareiss elimination above.
    pub fn determinant(&self) -> Polynomial {
        if self.size() <= 4 {
            self.cofactor_determinant()
        } else {
            self.bareiss_determinant()
        }
    }

    pub fn cofactor_determinant(&self) -> Polynomial {
        let cols: Vec<usize> = (0..self.size()).collect();
        cofactor(&self.rows, 0, &cols)
    }

    pub fn bareiss_determinant(&self) -> Polynomial {
        let n = self.size();
        let mut a = self.rows.clone();
        let (ring, vars) = (a[0][0].ring(), a[0][0].vars().clone());
        let mut prev = Polynomial::one(ring, &vars);
        let mut negate = false;
        for k in 0..n.saturating_sub(1) {
            let Some(pivot) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Polynomial::zero(ring, &vars);
            };
            if pivot != k {
                a.swap(pivot, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.exact_div(&prev).expect("Bareiss quotient is exact");
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if negate {
            -det
        } else {
            det
        }
    }
}

fn cofactor(rows: &[Vec<Polynomial>], row: usize, cols: &[usize]) -> Polynomial {
    if cols.len() == 1 {
        return rows[row][cols[0]].clone();
    }
    let (ring, vars) = (rows[0][0].ring(), rows[0][0].vars().clone());
    let mut acc = Polynomial::zero(ring, &vars);
    for (k, &c) in cols.iter().enumerate() {
        if rows[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &rows[row][c] * &cofactor(rows, row + 1, &rest);
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// One factor of a tame automorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TameFactor {
    /// `x ↦ matrix·x + translation` with `det matrix = 1`.
    Affine { matrix: Vec<Vec<Scalar>>, translation: Vec<Scalar> },
    /// `x_index ↦ x_index + poly`, `poly` depending only on later variables.
    Triangular { index: usize, poly: Polynomial },
}

/// Factors listed outermost first: the map is `factors[0] ∘ factors[1] ∘ ...`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TameRecipe {
    pub factors: Vec<TameFactor>,
}

impl TameFactor {
    pub fn to_map(&self, ring: Ring, vars: &VariableSet, n: usize) -> PolyMap {
        match self {
            TameFactor::Affine { matrix, translation } => PolyMap::affine(ring, vars, matrix, translation),
            TameFactor::Triangular { index, poly } => {
                let mut m = PolyMap::identity(ring, vars, n);
                m.components[*index] = &m.components[*index] + poly;
                m
            }
        }
    }

    pub fn inverse(&self, ring: Ring) -> Result<TameFactor> {
        Ok(match self {
            TameFactor::Affine { matrix, translation } => {
                let minv = invert_matrix(ring, matrix)?;
                let n = matrix.len();
                let shift = (0..n)
                    .map(|i| (0..n).fold(ring.zero(), |acc, j| acc.sub(&minv[i][j].mul(&translation[j]))))
                    .collect();
                TameFactor::Affine { matrix: minv, translation: shift }
            }
            TameFactor::Triangular { index, poly } => TameFactor::Triangular { index: *index, poly: -poly },
        })
    }
}

impl TameRecipe {
    pub fn to_map(&self, ring: Ring, vars: &VariableSet, n: usize) -> Result<PolyMap> {
        let mut acc = PolyMap::identity(ring, vars, n);
        for f in &self.factors {
            acc = acc.compose(&f.to_map(ring, vars, n))?;
        }
        Ok(acc)
    }

    /// The recipe of the inverse map: inverted factors in reverse order.
    pub fn inverse(&self, ring: Ring) -> Result<TameRecipe> {
        Ok(TameRecipe { factors: self.factors.iter().rev().map(|f| f.inverse(ring)).collect::<Result<_>>()? })
    }
}

/// Samples a tame map with determinant-one Jacobian over `ring` in the
/// standard variables, from `factors` random affine and triangular factors.
/// Triangular factors that would push the degree past `degree_budget` are
/// truncated to their affine part.
pub fn sample_tame(ring: Ring, n: usize, degree_budget: u32, factors: usize, seed: u64) -> Result<(PolyMap, TameRecipe)> {
    let mut rng = rng_from_seed(seed);
    sample_tame_with(&mut rng, ring, n, degree_budget, factors)
}

pub fn sample_tame_with(
    rng: &mut SampleRng,
    ring: Ring,
    n: usize,
    degree_budget: u32,
    factors: usize,
) -> Result<(PolyMap, TameRecipe)> {
    if degree_budget == 0 {
        return Err(Error::Invalid("degree budget must be at least 1".into()));
    }
    let vars = VariableSet::standard(n);
    let mut map = PolyMap::identity(ring, &vars, n);
    let mut recipe = TameRecipe { factors: Vec::new() };
    for _ in 0..factors {
        let factor = if rng.gen_bool(0.5) {
            random_sl_affine(rng, ring, n)
        } else {
            let index = rng.gen_range(0..n);
            let later: Vec<usize> = (index + 1..n).collect();
            let poly = random_polynomial_in(rng, ring, &vars, &later, degree_budget, 3, 3);
            let candidate = TameFactor::Triangular { index, poly: poly.clone() };
            if map.compose(&candidate.to_map(ring, &vars, n))?.degree() <= degree_budget {
                candidate
            } else {
                let linear = poly.filter_terms(|m| m.degree() <= 1);
                TameFactor::Triangular { index, poly: linear }
            }
        };
        map = map.compose(&factor.to_map(ring, &vars, n))?;
        recipe.factors.push(factor);
    }
    Ok((map, recipe))
}

/// A product of elementary matrices with entries in `[-3, 3]`, plus a translation.
fn random_sl_affine(rng: &mut SampleRng, ring: Ring, n: usize) -> TameFactor {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n > 1 {
        for _ in 0..rng.gen_range(1..=2) {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = rng.gen_range(-3..=3);
            let row_j = m[j].clone();
            for (a, b) in m[i].iter_mut().zip(&row_j) {
                *a += c * b;
            }
        }
    }
    let matrix = m.iter().map(|row| row.iter().map(|&v| ring.from_i64(v)).collect()).collect();
    let translation = (0..n).map(|_| ring.from_i64(rng.gen_range(-3..=3))).collect();
    TameFactor::Affine { matrix, translation }
}
