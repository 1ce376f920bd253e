//! Universal maps with identity affine part and their Keller ideals.
//!
//! The universal map of degree `d` in `n` variables is
//! `F_i = x_i + Σ c_{i,α} x^α` over `2 <= |α| <= d`. Its coefficient
//! variables are named `c_<i>_<α_1>_..._<α_n>` (component `i` counted from 1)
//! and ordered by component, then degree ascending, then grevlex descending.
//! The coefficients `E_α` of `det Jac(F) - 1` generate the Keller ideal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{lcm, Ring, Scalar};
use crate::error::{Error, Result};
use crate::groebner::Ideal;
use crate::poly::{Monomial, MonomialOrder, Polynomial, VariableSet};
use crate::polymap::PolyMap;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CoeffIndex {
    /// Component, counted from 0.
    pub component: usize,
    pub exponents: Vec<u32>,
}

impl CoeffIndex {
    pub fn canonical_name(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(u32::to_string).collect();
        format!("c_{}_{}", self.component + 1, exps.join("_"))
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Exponent vectors of total degree `deg` in `n` variables, grevlex descending.
pub fn monomials_of_degree(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, deg, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| MonomialOrder::GradedReverseLex.compare(b, a));
    out
}

/// Alias names for the two-variable systems of degree 2 and 3, in canonical order.
fn alias_names(n: usize, d: u32, index: &[CoeffIndex]) -> Option<Vec<String>> {
    if n != 2 || !(2..=3).contains(&d) {
        return None;
    }
    let letter = |e: &[u32]| -> &'static str {
        match (d, e[0], e[1]) {
            (2, 2, 0) => "1",
            (2, 1, 1) => "2",
            (2, 0, 2) => "3",
            (3, 2, 0) => "A",
            (3, 0, 2) => "B",
            (3, 1, 1) => "C",
            (3, 3, 0) => "D",
            (3, 0, 3) => "E",
            (3, 2, 1) => "F",
            (3, 1, 2) => "G",
            _ => unreachable!(),
        }
    };
    Some(
        index
            .iter()
            .map(|c| {
                let l = letter(&c.exponents);
                match (d, c.component) {
                    (2, 0) => format!("a{l}"),
                    (2, _) => format!("b{l}"),
                    (_, 0) => l.to_string(),
                    _ => format!("{l}1"),
                }
            })
            .collect(),
    )
}

/// One Keller equation: the coefficient of `x^alpha` in `det Jac(F) - 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KellerEquation {
    pub alpha: Monomial,
    pub poly: Polynomial,
}

pub struct KellerSystem {
    n: usize,
    d: u32,
    index: Vec<CoeffIndex>,
    coeff_vars: VariableSet,
    alias_vars: Option<VariableSet>,
    map: PolyMap,
    equations: Vec<KellerEquation>,
    ideal: Arc<Ideal>,
}

impl KellerSystem {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if n == 0 || d < 2 {
            return Err(Error::Unsupported(format!("n = {n}, d = {d}; need n >= 1 and d >= 2")));
        }
        let mut index = Vec::new();
        for component in 0..n {
            for deg in 2..=d {
                for exponents in monomials_of_degree(n, deg) {
                    index.push(CoeffIndex { component, exponents });
                }
            }
        }
        let names: Vec<String> = index.iter().map(CoeffIndex::canonical_name).collect();
        let coeff_vars = VariableSet::new(&names)?;
        let alias_vars = alias_names(n, d, &index).map(|a| VariableSet::new(&a)).transpose()?;
        let map_vars = VariableSet::standard(n).extended(&names)?;
        let ring = Ring::Rationals;
        let total = map_vars.len();
        let mut components: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(ring, &map_vars, i)).collect();
        for (k, c) in index.iter().enumerate() {
            let mut e = c.exponents.clone();
            e.resize(total, 0);
            e[n + k] = 1;
            let term = Polynomial::from_terms(ring, &map_vars, [(Monomial::from_exponents(e), ring.one())])?;
            components[c.component] = &components[c.component] + &term;
        }
        let map = PolyMap::new(components)?;
        let det = &map.det_jacobian() - &Polynomial::one(ring, &map_vars);
        let groups: BTreeMap<Monomial, Polynomial> = det.split_leading(n, &coeff_vars)?;
        let mut equations: Vec<KellerEquation> = groups
            .into_iter()
            .filter(|(alpha, p)| !alpha.is_one() && !p.is_zero())
            .map(|(alpha, poly)| KellerEquation { alpha, poly })
            .collect();
        equations.sort_by(|a, b| {
            a.alpha
                .degree()
                .cmp(&b.alpha.degree())
                .then_with(|| MonomialOrder::GradedReverseLex.compare(b.alpha.exponents(), a.alpha.exponents()))
        });
        let gens = equations.iter().map(|e| e.poly.clone()).collect();
        let ideal = Arc::new(Ideal::new(ring, &coeff_vars, gens)?);
        Ok(KellerSystem { n, d, index, coeff_vars, alias_vars, map, equations, ideal })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn coeff_index(&self) -> &[CoeffIndex] {
        &self.index
    }

    /// Number of coefficient variables.
    pub fn coeff_dimension(&self) -> usize {
        self.index.len()
    }

    pub fn coeff_vars(&self) -> &VariableSet {
        &self.coeff_vars
    }

    /// Short names (`a1..b3`, `A..G1`) where available, else the canonical ones.
    pub fn display_vars(&self) -> &VariableSet {
        self.alias_vars.as_ref().unwrap_or(&self.coeff_vars)
    }

    pub fn has_aliases(&self) -> bool {
        self.alias_vars.is_some()
    }

    /// The universal map over `Q[x][c]`.
    pub fn universal_map(&self) -> &PolyMap {
        &self.map
    }

    /// The equations `E_α`, ordered by `α` degree ascending and grevlex
    /// descending within a degree.
    pub fn equations(&self) -> &[KellerEquation] {
        &self.equations
    }

    pub fn generators(&self) -> Vec<Polynomial> {
        self.equations.iter().map(|e| e.poly.clone()).collect()
    }

    /// The Keller ideal in `Q[c]`.
    pub fn ideal(&self) -> &Arc<Ideal> {
        &self.ideal
    }

    /// Replaces the ideal, for example to attach a disk cache or options.
    pub fn set_ideal(&mut self, ideal: Ideal) {
        self.ideal = Arc::new(ideal);
    }

    /// Rebuilds the ideal with an on-disk basis cache in `dir` (`None` disables it).
    pub fn with_disk_cache(mut self, dir: Option<std::path::PathBuf>) -> Result<Self> {
        let ideal = Ideal::new(Ring::Rationals, &self.coeff_vars, self.generators())?.with_disk_cache(dir);
        self.set_ideal(ideal);
        Ok(self)
    }

    /// Rewrites a polynomial in coefficient variables with display names.
    pub fn to_display(&self, f: &Polynomial) -> Result<Polynomial> {
        f.relabel(self.display_vars())
    }

    /// Parses text written with display or canonical names.
    pub fn parse(&self, text: &str, ring: Ring) -> Result<Polynomial> {
        match Polynomial::parse(text, self.display_vars(), ring) {
            Ok(p) => p.relabel(&self.coeff_vars),
            Err(Error::UnknownVariable(_)) if self.alias_vars.is_some() => Polynomial::parse(text, &self.coeff_vars, ring),
            Err(e) => Err(e),
        }
    }

    /// The coefficient vector `v(F)` of a map of degree at most `d` with
    /// identity affine part, in the ring of `F`.
    pub fn coefficient_vector(&self, f: &PolyMap) -> Result<Vec<Scalar>> {
        if f.dim() != self.n || f.vars().len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: f.dim() });
        }
        let deg = f.degree();
        if deg > self.d {
            return Err(Error::DegreeExceeded { degree: deg, bound: self.d });
        }
        if !f.has_identity_affine_part() {
            return Err(Error::NonIdentityAffinePart);
        }
        Ok(self
            .index
            .iter()
            .map(|c| f.component(c.component).coefficient(&Monomial::from_exponents(c.exponents.clone())))
            .collect())
    }

    /// The map with coefficient vector `v` over `ring`, in the standard variables.
    pub fn map_from_vector(&self, v: &[Scalar], ring: Ring) -> Result<PolyMap> {
        if v.len() != self.index.len() {
            return Err(Error::ArityMismatch { expected: self.index.len(), got: v.len() });
        }
        let vars = VariableSet::standard(self.n);
        let mut comps: Vec<Polynomial> = (0..self.n).map(|i| Polynomial::var(ring, &vars, i)).collect();
        for (c, value) in self.index.iter().zip(v) {
            let t = Polynomial::from_terms(ring, &vars, [(Monomial::from_exponents(c.exponents.clone()), ring.coerce(value)?)])?;
            comps[c.component] = &comps[c.component] + &t;
        }
        PolyMap::new(comps)
    }

    /// Embeds a coefficient vector of a lower-degree system (zeros elsewhere).
    pub fn embed_vector(&self, from: &KellerSystem, v: &[Scalar], ring: Ring) -> Result<Vec<Scalar>> {
        if from.n != self.n || from.d > self.d {
            return Err(Error::Unsupported("embedding needs equal n and a smaller degree".into()));
        }
        let lookup: BTreeMap<&CoeffIndex, &Scalar> = from.index.iter().zip(v).collect();
        Ok(self.index.iter().map(|c| lookup.get(c).map(|s| (*s).clone()).unwrap_or_else(|| ring.zero())).collect())
    }
}

/// Generator index, multiple of the generator, and its cofactor parts.
type TableRow = (usize, Polynomial, Vec<(usize, Polynomial)>);

/// lcm of a list of denominators (1 for the empty list).
pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| lcm(&acc, v))
}

/// How a generator is known to vanish on Keller maps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CertificateKind {
    /// `g = Σ cofactor_k · E_k` exactly, over `Q`.
    Cofactors(Vec<(usize, Polynomial)>),
    /// Normal form of `g` against a Gröbner basis of the ideal is zero.
    NormalForm,
    /// `g` lies in the radical (checked by the slack-variable test); when
    /// `not_in_ideal` is set, `g` is additionally claimed not to lie in the ideal.
    InRadical { not_in_ideal: bool },
    /// Recorded without machine verification.
    Asserted(String),
}

impl CertificateKind {
    pub fn label(&self) -> &'static str {
        match self {
            CertificateKind::Cofactors(_) | CertificateKind::NormalForm => "in_ideal",
            CertificateKind::InRadical { .. } => "in_radical",
            CertificateKind::Asserted(_) => "asserted",
        }
    }
}

/// An integer polynomial in the coefficient variables vanishing on every
/// Keller map of the system, with the evidence for it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorCertificate {
    /// Primitive integer polynomial over the canonical coefficient variables.
    pub generator: Polynomial,
    pub kind: CertificateKind,
    /// Smallest `N` found with `N·g` in the ideal generated by the `E_α` over
    /// `Z`; `None` for radical-only certificates.
    pub denominator: Option<BigInt>,
    pub source: String,
}

impl GeneratorCertificate {
    /// Re-checks the certificate against `system`.
    pub fn verify(&self, system: &KellerSystem) -> Result<bool> {
        let g = self.generator.to_ring(Ring::Rationals)?;
        match &self.kind {
            CertificateKind::Cofactors(parts) => {
                let mut acc = Polynomial::zero(Ring::Rationals, system.coeff_vars());
                for (k, c) in parts {
                    let e = &system.equations().get(*k).ok_or_else(|| Error::Invalid(format!("no equation {k}")))?.poly;
                    acc = &acc + &(c * e);
                }
                Ok(acc == g)
            }
            CertificateKind::NormalForm => system.ideal().ideal_member(&g),
            CertificateKind::InRadical { not_in_ideal } => {
                let rad = system.ideal().radical_member(&g)?;
                Ok(rad && (!not_in_ideal || !system.ideal().ideal_member(&g)?))
            }
            CertificateKind::Asserted(_) => Ok(true),
        }
    }
}

fn same_up_to_sign(a: &Polynomial, b: &Polynomial) -> bool {
    a == b || (a + b).is_zero()
}

/// Primitive form of a nonzero rational polynomial together with the factor
/// `f = factor · primitive`.
fn primitive_of(f: &Polynomial) -> Result<(Polynomial, Scalar)> {
    let (den, content, prim) = f.integer_normalize()?;
    Ok((prim, Scalar::Rat(num_rational::BigRational::new(content, den))))
}

/// Least common multiple of the coefficient denominators of the cofactors.
fn cofactor_denominator(parts: &[(usize, Polynomial)]) -> BigInt {
    let dens: Vec<BigInt> = parts
        .iter()
        .flat_map(|(_, c)| c.terms().map(|(_, s)| s.to_rational().denom().clone()).collect::<Vec<_>>())
        .collect();
    lcm_all(&dens)
}

/// Bounds for the combination search in [`KellerSystem::integer_candidates`].
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    /// Largest number of generators combined (2 or 3).
    pub max_combination: usize,
    /// Results with more terms than this are discarded.
    pub max_terms: usize,
    pub max_results: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_combination: 3, max_terms: 2, max_results: 64 }
    }
}

impl KellerSystem {
    /// Primitive parts of the `E_α`, each certified by its single cofactor.
    pub fn primitive_generators(&self) -> Result<Vec<GeneratorCertificate>> {
        self.equations
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let (prim, factor) = primitive_of(&e.poly)?;
                let cof = Polynomial::constant(Ring::Rationals, &self.coeff_vars, factor.inv()?);
                let parts = vec![(k, cof)];
                Ok(GeneratorCertificate {
                    generator: prim,
                    denominator: Some(cofactor_denominator(&parts)),
                    kind: CertificateKind::Cofactors(parts),
                    source: format!("primitive part of E at {}", alpha_text(&e.alpha)),
                })
            })
            .collect()
    }

    /// Integer generators found by combining up to three primitive
    /// generators with multipliers `±1` or `±c` for a coefficient variable.
    /// A combination is kept when some of its terms cancel and the result is
    /// short; every result carries its cofactor representation.
    pub fn integer_candidates(&self, limits: SearchLimits) -> Result<Vec<GeneratorCertificate>> {
        let prims = self.primitive_generators()?;
        let ring = Ring::Rationals;
        let vars = &self.coeff_vars;
        let mut multipliers = vec![Polynomial::one(ring, vars)];
        multipliers.extend((0..vars.len()).map(|i| Polynomial::var(ring, vars, i)));
        // Each primitive as a rational combination of the E_α.
        let base: Vec<(Polynomial, Vec<(usize, Polynomial)>)> = prims
            .iter()
            .map(|c| {
                let CertificateKind::Cofactors(parts) = &c.kind else { unreachable!() };
                (c.generator.to_ring(ring).expect("integers embed"), parts.clone())
            })
            .collect();

        let mut found: Vec<GeneratorCertificate> = Vec::new();
        let known: Vec<Polynomial> = prims.iter().map(|c| c.generator.clone()).collect();
        let consider = |sum: &Polynomial, parts: Vec<(usize, Polynomial)>, found: &mut Vec<GeneratorCertificate>| -> Result<()> {
            if sum.is_zero() || sum.num_terms() > limits.max_terms || found.len() >= limits.max_results {
                return Ok(());
            }
            let (prim, factor) = primitive_of(sum)?;
            if known.iter().any(|k| same_up_to_sign(k, &prim)) {
                return Ok(());
            }
            let inv = factor.inv()?;
            let mut merged: BTreeMap<usize, Polynomial> = BTreeMap::new();
            for (k, c) in parts {
                let e = merged.entry(k).or_insert_with(|| Polynomial::zero(ring, vars));
                *e = &*e + &c.scale(&inv);
            }
            let parts: Vec<(usize, Polynomial)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            let den = cofactor_denominator(&parts);
            if let Some(existing) = found.iter_mut().find(|c| same_up_to_sign(&c.generator, &prim)) {
                if existing.denominator.as_ref().is_some_and(|d| &den < d) {
                    existing.generator = prim;
                    existing.denominator = Some(den);
                    existing.kind = CertificateKind::Cofactors(parts);
                }
                return Ok(());
            }
            found.push(GeneratorCertificate {
                generator: prim,
                kind: CertificateKind::Cofactors(parts),
                denominator: Some(den),
                source: "combination of primitive generators".into(),
            });
            Ok(())
        };

        // Every generator times every multiplier, with a monomial index for
        // finding overlapping partners.
        let mut table: Vec<TableRow> = Vec::new();
        let mut index: HashMap<Monomial, Vec<usize>> = HashMap::new();
        for (k, (g, parts)) in base.iter().enumerate() {
            for m in &multipliers {
                let id = table.len();
                let sg = m * g;
                for (mono, _) in sg.terms() {
                    index.entry(mono.clone()).or_default().push(id);
                }
                table.push((k, sg, parts.iter().map(|(i, c)| (*i, m * c)).collect()));
            }
        }
        let neighbours = |p: &Polynomial| -> BTreeSet<usize> {
            p.terms().flat_map(|(m, _)| index.get(m).into_iter().flatten().copied()).collect()
        };
        let negated = |parts: &[(usize, Polynomial)]| -> Vec<(usize, Polynomial)> {
            parts.iter().map(|(i, c)| (*i, -c)).collect()
        };

        for a in 0..table.len() {
            let (ka, ga, pa) = &table[a];
            let na = neighbours(ga);
            // The overall sign is irrelevant, so the first part enters positively.
            for b in (a + 1)..table.len() {
                let (kb, gb, pb) = &table[b];
                if kb <= ka {
                    continue;
                }
                let linked = na.contains(&b);
                let nb = if limits.max_combination >= 3 { Some(neighbours(gb)) } else { None };
                for sb in [false, true] {
                    let (gb_s, pb_s) = if sb { (-gb, negated(pb)) } else { (gb.clone(), pb.clone()) };
                    let s2 = ga + &gb_s;
                    let parts2: Vec<_> = pa.iter().chain(&pb_s).cloned().collect();
                    if linked {
                        consider(&s2, parts2.clone(), &mut found)?;
                    }
                    let Some(nb) = &nb else { continue };
                    let partners: Vec<usize> = if linked {
                        na.union(nb).copied().collect()
                    } else {
                        na.intersection(nb).copied().collect()
                    };
                    for c in partners {
                        let (kc, gc, pc) = &table[c];
                        if kc <= kb {
                            continue;
                        }
                        for sc in [false, true] {
                            let s3 = if sc { &s2 - gc } else { &s2 + gc };
                            let pc_s = if sc { negated(pc) } else { pc.clone() };
                            let parts3: Vec<_> = parts2.iter().chain(&pc_s).cloned().collect();
                            consider(&s3, parts3, &mut found)?;
                        }
                    }
                }
            }
        }
        Ok(found)
    }
}

fn alpha_text(alpha: &Monomial) -> String {
    let names = ["x", "y", "z"];
    let e = alpha.exponents();
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| {
            let v = if e.len() <= 3 { names[i].to_string() } else { format!("x{}", i + 1) };
            if x == 1 {
                v
            } else {
                format!("{v}^{x}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Two-term members of the degree-3 ideal listed in the literature as
/// obtainable by elementary manipulation.
pub const DEGREE3_LISTED_MEMBERS: [&str; 21] = [
    "F1+3*D", "A*C1-A1*C", "G1+F", "A*B1-A1*B", "3*E1+G", "C*B1-B*C1", "A*E1-A1*E", "B1*F-B*F1",
    "C*G1-C1*G", "D*B1-D1*B", "A*G1-A1*G", "F*C1-F1*C", "D*E1-D1*E", "F*G1-F1*G", "F*A1-F1*A",
    "D*C1-D1*C", "C*E1-C1*E", "B1*G-B*G1", "D*G1-G*D1", "F*E1-E*F1", "D*F1-D1*F",
];

/// Members of the degree-3 ideal with short integer forms.
pub const DEGREE3_IDEAL_MEMBERS: [&str; 3] = ["C1+2*A", "C+2*B1", "G*E1-E*G1"];

/// Members of the radical of the degree-3 ideal that are not in the ideal.
pub const DEGREE3_RADICAL_MEMBERS: [&str; 2] = ["A^3*E1^2-B^3*D1^2", "A^3*E^2-B^3*D^2"];

/// A list of certified integer generators for one system.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub certificates: Vec<GeneratorCertificate>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }

    /// Lcm of the recorded denominators. A lower bound for the true lcm
    /// bound, since the set is not known to generate the integer ideal.
    pub fn nd_bound(&self) -> BigInt {
        lcm_all(self.certificates.iter().filter_map(|c| c.denominator.as_ref()))
    }

    /// Hex sha256 of the generators in canonical text, one per line.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for c in &self.certificates {
            h.update(c.generator.to_string().as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// Adds `cert` unless its generator is already present up to sign.
    pub fn push(&mut self, cert: GeneratorCertificate) -> bool {
        if self.certificates.iter().any(|c| same_up_to_sign(&c.generator, &cert.generator)) {
            return false;
        }
        self.certificates.push(cert);
        true
    }
}

/// Lcm of the denominators recorded by `certs`.
pub fn nd_bound(certs: &[GeneratorCertificate]) -> BigInt {
    lcm_all(certs.iter().filter_map(|c| c.denominator.as_ref()))
}

impl KellerSystem {
    /// Primitive parts of the `E_α` followed by the results of the bounded
    /// combination search.
    pub fn searched_generators(&self, limits: SearchLimits) -> Result<GeneratorSet> {
        let mut set = GeneratorSet { certificates: self.primitive_generators()? };
        for c in self.integer_candidates(limits)? {
            set.push(c);
        }
        Ok(set)
    }

    /// Certifies an integer polynomial given in display names: by normal form
    /// when it lies in the ideal, otherwise by the radical test. Returns
    /// `None` when it is not even in the radical.
    pub fn certify(&self, text: &str, source: &str) -> Result<Option<GeneratorCertificate>> {
        self.certify_poly(&self.parse(text, Ring::Integers)?, source)
    }

    /// [`certify`](Self::certify) for a polynomial over the canonical variables.
    pub fn certify_poly(&self, g: &Polynomial, source: &str) -> Result<Option<GeneratorCertificate>> {
        let (_, _, prim) = g.integer_normalize()?;
        let q = prim.to_ring(Ring::Rationals)?;
        let kind = if self.ideal.ideal_member(&q)? {
            CertificateKind::NormalForm
        } else if self.ideal.radical_member(&q)? {
            CertificateKind::InRadical { not_in_ideal: true }
        } else {
            return Ok(None);
        };
        Ok(Some(GeneratorCertificate { generator: prim, kind, denominator: None, source: source.to_string() }))
    }
}

/// The curated generator sets for `(n, d)` in `{(2, 2), (2, 3)}`.
pub fn builtin_radical_generators(n: usize, d: u32) -> Result<(KellerSystem, GeneratorSet)> {
    let system = KellerSystem::new(n, d)?;
    let set = builtin_generators_for(&system)?;
    Ok((system, set))
}

/// The curated generator set for an already built system.
pub fn builtin_generators_for(system: &KellerSystem) -> Result<GeneratorSet> {
    match (system.n(), system.d()) {
        (2, 2) => system.searched_generators(SearchLimits::default()),
        (2, 3) => {
            let mut set = system.searched_generators(SearchLimits::default())?;
            let lists: [(&[&str], &str); 3] = [
                (&DEGREE3_LISTED_MEMBERS, "listed two-term member"),
                (&DEGREE3_IDEAL_MEMBERS, "short ideal member"),
                (&DEGREE3_RADICAL_MEMBERS, "radical member"),
            ];
            for (texts, label) in lists {
                for t in texts {
                    let cert = system
                        .certify(t, &format!("{label} {t}"))?
                        .ok_or_else(|| Error::Invalid(format!("{t} is not in the radical of the Keller ideal")))?;
                    // A certified search result is kept, but a weaker one is replaced.
                    if let Some(existing) =
                        set.certificates.iter_mut().find(|c| same_up_to_sign(&c.generator, &cert.generator))
                    {
                        if matches!(existing.kind, CertificateKind::InRadical { .. }) {
                            *existing = cert;
                        }
                    } else {
                        set.certificates.push(cert);
                    }
                }
            }
            // Degree-2 generators through the inclusion of coefficient rings.
            let small = KellerSystem::new(2, 2)?;
            let positions: Vec<usize> = small
                .coeff_vars()
                .names()
                .iter()
                .map(|name| system.coeff_vars().index_of(name).ok_or_else(|| Error::UnknownVariable(name.clone())))
                .collect::<Result<_>>()?;
            for c in small.searched_generators(SearchLimits::default())?.certificates {
                let g = c.generator.embed(system.coeff_vars(), &positions)?;
                if set.certificates.iter().any(|e| same_up_to_sign(&e.generator, &g)) {
                    continue;
                }
                let text = small.to_display(&c.generator)?;
                if let Some(cert) = system.certify_poly(&g, &format!("degree-2 generator {text}"))? {
                    set.certificates.push(cert);
                }
            }
            Ok(set)
        }
        (n, d) => Err(Error::Unsupported(format!("no curated generators for n = {n}, d = {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::sample_tame;

    fn display(sys: &KellerSystem, f: &Polynomial) -> String {
        sys.to_display(f).unwrap().to_string()
    }

    #[test]
    fn coefficient_dimensions() {
        assert_eq!(KellerSystem::new(2, 2).unwrap().coeff_dimension(), 6);
        assert_eq!(KellerSystem::new(2, 3).unwrap().coeff_dimension(), 14);
        assert_eq!(KellerSystem::new(1, 2).unwrap().coeff_dimension(), 1);
        assert_eq!(KellerSystem::new(3, 2).unwrap().coeff_dimension(), 18);
    }

    #[test]
    fn one_variable_system() {
        let sys = KellerSystem::new(1, 2).unwrap();
        let eqs: Vec<String> = sys.equations().iter().map(|e| e.poly.to_string()).collect();
        assert_eq!(eqs, ["2*c_1_2"]);
        let set = sys.searched_generators(SearchLimits::default()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.certificates[0].generator.to_string(), "c_1_2");
        assert_eq!(set.nd_bound(), BigInt::from(2));
    }

    #[test]
    fn degree2_equations() {
        let sys = KellerSystem::new(2, 2).unwrap();
        let eqs: Vec<String> = sys.equations().iter().map(|e| display(&sys, &e.poly)).collect();
        assert_eq!(eqs.len(), 5);
        let expected = ["2*a1 + b2", "a2 + 2*b3", "2*a1*b2 - 2*a2*b1", "4*a1*b3 - 4*a3*b1", "2*a2*b3 - 2*a3*b2"];
        for (got, want) in eqs.iter().zip(expected) {
            let w = sys.parse(want, Ring::Rationals).unwrap();
            assert_eq!(got, &display(&sys, &w));
        }
    }

    #[test]
    fn degree2_builtin_certificates_verify() {
        let (sys, set) = builtin_radical_generators(2, 2).unwrap();
        for c in &set.certificates {
            assert!(c.verify(&sys).unwrap(), "{}", display(&sys, &c.generator));
        }
        for want in ["a1^2 - b1*b3", "b3^2 - a1*a3", "a1*b3 - a3*b1", "a1*b2 - a2*b1"] {
            let w = sys.parse(want, Ring::Integers).unwrap();
            assert!(set.certificates.iter().any(|c| same_up_to_sign(&c.generator, &w)), "{want} missing");
        }
    }

    #[test]
    fn degree3_builtin_contains_listed_members() {
        let (sys, set) = builtin_radical_generators(2, 3).unwrap();
        let find = |t: &str| {
            let w = sys.parse(t, Ring::Integers).unwrap();
            set.certificates.iter().find(|c| same_up_to_sign(&c.generator, &w)).cloned()
        };
        for t in DEGREE3_LISTED_MEMBERS.iter().chain(&DEGREE3_IDEAL_MEMBERS) {
            assert!(find(t).is_some(), "{t} missing");
        }
        for t in DEGREE3_IDEAL_MEMBERS {
            assert_ne!(find(t).unwrap().kind.label(), "in_radical", "{t}");
        }
        for t in DEGREE3_RADICAL_MEMBERS {
            assert_eq!(find(t).unwrap().kind, CertificateKind::InRadical { not_in_ideal: true });
        }
        assert!(builtin_radical_generators(3, 2).is_err());
    }

    #[test]
    fn embedding_preserves_shared_equations() {
        let small = KellerSystem::new(2, 2).unwrap();
        let big = KellerSystem::new(2, 3).unwrap();
        let ring = Ring::Integers;
        for seed in 0..20u64 {
            let v: Vec<Scalar> = (0..6).map(|i| ring.from_i64(((seed * 7 + i * 3) % 7) as i64 - 3)).collect();
            let w = big.embed_vector(&small, &v, ring).unwrap();
            assert_eq!(w.len(), 14);
            let f_small = small.map_from_vector(&v, ring).unwrap();
            let f_big = big.map_from_vector(&w, ring).unwrap();
            assert_eq!(f_small.to_string(), f_big.to_string());
            for e in small.equations() {
                let other = big.equations().iter().find(|o| o.alpha == e.alpha).unwrap();
                let a = e.poly.to_ring(ring).unwrap().evaluate(&v).unwrap();
                let b = other.poly.to_ring(ring).unwrap().evaluate(&w).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn generators_vanish_on_tame_samples() {
        for (d, set) in [(2u32, builtin_radical_generators(2, 2)), (3, builtin_radical_generators(2, 3))] {
            let (sys, set) = set.unwrap();
            let mut checked = 0;
            for seed in 0..60u64 {
                let (f, _) = sample_tame(Ring::Integers, 2, d, 3, seed).unwrap();
                let Ok(g) = f.normalize_affine() else { continue };
                if g.degree() > d {
                    continue;
                }
                let v = sys.coefficient_vector(&g).unwrap();
                for c in &set.certificates {
                    assert!(c.generator.evaluate(&v).unwrap().is_zero(), "seed {seed}: {}", display(&sys, &c.generator));
                }
                checked += 1;
            }
            assert!(checked > 10);
        }
    }

    #[test]
    fn coefficient_vector_examples() {
        let sys = KellerSystem::new(2, 2).unwrap();
        let vars = VariableSet::standard(2);
        let f = PolyMap::parse("[x+x^2; y]", &vars, Ring::Integers).unwrap();
        let v: Vec<String> = sys.coefficient_vector(&f).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(v, ["1", "0", "0", "0", "0", "0"]);
        let id = PolyMap::identity(Ring::Integers, &vars, 2);
        assert!(sys.coefficient_vector(&id).unwrap().iter().all(|s| s.is_zero()));
        let bad = PolyMap::parse("[2*x; y]", &vars, Ring::Integers).unwrap();
        assert_eq!(sys.coefficient_vector(&bad), Err(Error::NonIdentityAffinePart));
        let deep = PolyMap::parse("[x+y^3; y]", &vars, Ring::Integers).unwrap();
        assert!(matches!(sys.coefficient_vector(&deep), Err(Error::DegreeExceeded { .. })));
    }

    #[test]
    fn generator_set_hash_is_stable() {
        let (_, a) = builtin_radical_generators(2, 2).unwrap();
        let (_, b) = builtin_radical_generators(2, 2).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
