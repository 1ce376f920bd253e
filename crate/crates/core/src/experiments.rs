//! Reproduction reports for the degree-2 and degree-3 systems, randomized
//! trials over prime fields, and point-injectivity scans.
//!
//! Trial `i` of a run with seed `s` draws from `trial_seed(s, i)`, so reports
//! do not depend on scheduling. Trials run on the rayon pool and are merged by
//! index.

use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{Ring, Scalar};
use crate::error::{Error, Result};
use crate::keller::{
    builtin_generators_for, CertificateKind, GeneratorCertificate, GeneratorSet, KellerSystem, DEGREE3_IDEAL_MEMBERS,
    DEGREE3_LISTED_MEMBERS, DEGREE3_RADICAL_MEMBERS,
};
use crate::poly::{Monomial, Polynomial, VariableSet};
use crate::polymap::{sample_tame, PolyMap};
use crate::sample::{rng_from_seed, trial_seed};
use crate::skeller::{bounded_lift, keller_check, strong_keller_check, LiftOptions, Outcome};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationLine {
    pub alpha: String,
    pub poly: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateLine {
    pub generator: String,
    pub kind: String,
    pub denominator: Option<String>,
    pub source: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproReport {
    pub experiment: String,
    pub n: usize,
    pub d: u32,
    pub coeff_dimension: usize,
    pub equations: Vec<EquationLine>,
    pub certificates: Vec<CertificateLine>,
    pub nd_lcm_lower_bound: String,
    pub checks: Vec<Check>,
}

impl ReproReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Equations as displayed in the literature for the degree-2 system, by `α`.
pub const DEGREE2_DISPLAYED: [(&str, &str); 5] = [
    ("x", "2*a1+b2"),
    ("y", "a2+2*b3"),
    ("x^2", "2*a1*b2+2*a2*b1"),
    ("x*y", "2*b2*a2+4*a1*b3+4*a3*b1"),
    ("y^2", "2*a2*b3+2*a3*b2"),
];

/// Nonconstant coefficients displayed in the literature for the degree-3 system.
pub const DEGREE3_DISPLAYED: [(&str, &str); 7] = [
    ("x", "C1+2*A"),
    ("y", "2*B1+C"),
    ("x^2", "F1+3*D+2*A*C1-2*A1*C"),
    ("x*y", "2*G1+2*F+4*A*B1-4*A1*B"),
    ("y^2", "3*E1+G+2*C*B1-2*B*C1"),
    ("x*y^2", "6*A*E1-6*A1*E+4*B1*F-4*B*F1+C*G1-C1*G"),
    ("x^2*y", "6*D*B1-6*D1*B+4*A*G1-4*A1*G+F*C1-F1*C"),
];

/// Equations in display names, one line per `α`.
pub fn equation_lines(system: &KellerSystem) -> Result<Vec<EquationLine>> {
    system
        .equations()
        .iter()
        .map(|e| Ok(EquationLine { alpha: alpha_name(&e.alpha), poly: system.to_display(&e.poly)?.to_string() }))
        .collect()
}

fn alpha_name(alpha: &Monomial) -> String {
    let vars = VariableSet::standard(alpha.exponents().len());
    Polynomial::from_terms(Ring::Integers, &vars, [(alpha.clone(), Ring::Integers.one())])
        .map(|p| p.to_string())
        .unwrap_or_default()
}

/// Certificates of `set` in display names.
pub fn certificate_lines(system: &KellerSystem, set: &GeneratorSet) -> Result<Vec<CertificateLine>> {
    set.certificates
        .iter()
        .map(|c| {
            Ok(CertificateLine {
                generator: system.to_display(&c.generator)?.to_string(),
                kind: c.kind.label().to_string(),
                denominator: c.denominator.as_ref().map(|d| d.to_string()),
                source: c.source.clone(),
            })
        })
        .collect()
}

/// Compares computed equations with displayed ones, literally and up to the
/// signs of individual terms.
fn compare_displayed(system: &KellerSystem, displayed: &[(&str, &str)]) -> Result<(Check, Check)> {
    let mut literal = Vec::new();
    let mut unsigned = Vec::new();
    let lines = equation_lines(system)?;
    for (alpha, text) in displayed {
        let want = system.parse(text, Ring::Rationals)?;
        let got = system.equations().iter().find(|e| alpha_name(&e.alpha) == *alpha).map(|e| e.poly.clone());
        let Some(got) = got else {
            literal.push(format!("{alpha}: no computed coefficient"));
            unsigned.push(format!("{alpha}: no computed coefficient"));
            continue;
        };
        if got != want {
            let shown = lines.iter().find(|l| l.alpha == *alpha).map(|l| l.poly.clone()).unwrap_or_default();
            literal.push(format!("{alpha}: computed {shown}, displayed {}", system.to_display(&want)?));
        }
        if abs_terms(&got) != abs_terms(&want) {
            unsigned.push(format!("{alpha}: terms differ beyond signs"));
        }
    }
    let count = displayed.len();
    Ok((
        Check::new(
            "displayed coefficients (literal)",
            literal.is_empty(),
            if literal.is_empty() { format!("{count} of {count} equal") } else { literal.join("; ") },
        ),
        Check::new(
            "displayed coefficients (up to term signs)",
            unsigned.is_empty(),
            if unsigned.is_empty() { format!("{count} of {count} agree") } else { unsigned.join("; ") },
        ),
    ))
}

fn abs_terms(p: &Polynomial) -> Vec<(Monomial, BigRational)> {
    let mut v: Vec<_> = p.terms().map(|(m, c)| (m.clone(), num_traits::Signed::abs(&c.to_rational()))).collect();
    v.sort();
    v
}

fn find_certificate<'a>(system: &KellerSystem, set: &'a GeneratorSet, text: &str) -> Result<Option<&'a GeneratorCertificate>> {
    let g = system.parse(text, Ring::Integers)?;
    let (_, _, prim) = g.integer_normalize()?;
    Ok(set.certificates.iter().find(|c| c.generator == prim || (&c.generator + &prim).is_zero()))
}

/// Checks that `text` is certified in the ideal, searching the set first
/// and falling back to a fresh membership test.
fn ideal_check(system: &KellerSystem, set: &GeneratorSet, text: &str) -> Result<Check> {
    let name = format!("{text} in ideal");
    if let Some(c) = find_certificate(system, set, text)? {
        if c.kind.label() == "in_ideal" {
            return Ok(Check::new(name, true, format!("{} certificate", certificate_kind_name(&c.kind))));
        }
    }
    let q = system.parse(text, Ring::Rationals)?;
    if system.ideal().ideal_member(&q)? {
        return Ok(Check::new(name, true, "normal form is zero"));
    }
    let rad = system.ideal().radical_member(&q)?;
    Ok(Check::new(name, false, if rad { "only in the radical" } else { "not in the radical" }))
}

fn certificate_kind_name(kind: &CertificateKind) -> &'static str {
    match kind {
        CertificateKind::Cofactors(_) => "cofactor",
        CertificateKind::NormalForm => "normal-form",
        CertificateKind::InRadical { .. } => "radical",
        CertificateKind::Asserted(_) => "asserted",
    }
}

/// Degree-2 reproduction: equations, certificates and the `(x + x^2, y)` verdict.
pub fn repro_degree2() -> Result<ReproReport> {
    repro_degree2_with(None)
}

/// As [`repro_degree2`], with bases cached in `cache_dir`.
pub fn repro_degree2_with(cache_dir: Option<PathBuf>) -> Result<ReproReport> {
    let system = KellerSystem::new(2, 2)?.with_disk_cache(cache_dir)?;
    let set = builtin_generators_for(&system)?;
    let mut checks = vec![Check::new(
        "five nonconstant coefficients",
        system.equations().len() == 5,
        format!("{} computed", system.equations().len()),
    )];
    let (literal, unsigned) = compare_displayed(&system, &DEGREE2_DISPLAYED)?;
    checks.push(literal);
    checks.push(unsigned);
    for text in ["a1*b2 + a2*b1", "a1*b2 - a2*b1", "a1^2 + b1*b3", "a1^2 - b1*b3", "b3^2 - a1*a3", "a1*b3 - a3*b1"] {
        checks.push(ideal_check(&system, &set, text)?);
    }
    let f = PolyMap::parse("[x + x^2; y]", &VariableSet::standard(2), Ring::prime_field(2)?)?;
    let verdict = strong_keller_check(&f, &system, &set)?;
    let detail = serde_json::to_string(&verdict.outcome).unwrap_or_default();
    checks.push(Check::new("(x + x^2, y) fails at p = 2", verdict.fails(), detail));
    Ok(ReproReport {
        experiment: "degree2".into(),
        n: 2,
        d: 2,
        coeff_dimension: system.coeff_dimension(),
        equations: equation_lines(&system)?,
        certificates: certificate_lines(&system, &set)?,
        nd_lcm_lower_bound: set.nd_bound().to_string(),
        checks,
    })
}

/// Options for [`repro_degree3_with`].
#[derive(Clone, Debug)]
pub struct Degree3Options {
    /// Primes for the exhaustive check of the degenerate families.
    pub enumeration_primes: Vec<u64>,
    /// Seed for the rational specializations and points.
    pub seed: u64,
    /// Directory of the on-disk basis cache, if any.
    pub cache_dir: Option<PathBuf>,
}

impl Default for Degree3Options {
    fn default() -> Self {
        Degree3Options { enumeration_primes: vec![2, 3], seed: 3, cache_dir: None }
    }
}

pub fn repro_degree3() -> Result<ReproReport> {
    repro_degree3_with(&Degree3Options::default())
}

/// Degree-3 reproduction: displayed coefficients, listed members, the short
/// ideal and radical members, the tame factorization of the solved family,
/// the generic tame form, and an exhaustive check of small fields.
pub fn repro_degree3_with(options: &Degree3Options) -> Result<ReproReport> {
    let system = KellerSystem::new(2, 3)?.with_disk_cache(options.cache_dir.clone())?;
    let set = builtin_generators_for(&system)?;
    let mut checks = Vec::new();
    let det_constant = system.universal_map().det_jacobian().filter_terms(|m| m.exponents()[..2].iter().all(|&e| e == 0));
    checks.push(Check::new(
        "constant coefficient is 1",
        det_constant.is_one(),
        format!("constant term {det_constant}"),
    ));
    let (literal, unsigned) = compare_displayed(&system, &DEGREE3_DISPLAYED)?;
    checks.push(literal);
    checks.push(unsigned);

    let mut listed_fail = Vec::new();
    for text in DEGREE3_LISTED_MEMBERS {
        let c = ideal_check(&system, &set, text)?;
        if !c.passed {
            listed_fail.push(format!("{text} ({})", c.detail));
        }
    }
    checks.push(Check::new(
        "listed two-term members in ideal",
        listed_fail.is_empty(),
        if listed_fail.is_empty() { "21 of 21".to_string() } else { listed_fail.join(", ") },
    ));
    let mut listed_rad = Vec::new();
    for text in DEGREE3_LISTED_MEMBERS {
        if find_certificate(&system, &set, text)?.is_none() {
            listed_rad.push(text.to_string());
        }
    }
    checks.push(Check::new(
        "listed two-term members in radical",
        listed_rad.is_empty(),
        if listed_rad.is_empty() { "21 of 21 certified".to_string() } else { listed_rad.join(", ") },
    ));
    for text in DEGREE3_IDEAL_MEMBERS {
        checks.push(ideal_check(&system, &set, text)?);
    }
    for text in DEGREE3_RADICAL_MEMBERS {
        let q = system.parse(text, Ring::Rationals)?;
        let rad = system.ideal().radical_member(&q)?;
        let ideal = system.ideal().ideal_member(&q)?;
        checks.push(Check::new(
            format!("{text} in radical, not in ideal"),
            rad && !ideal,
            format!("radical member: {rad}, ideal member: {ideal}"),
        ));
    }
    checks.extend(part1_checks(&system, &set, options.seed)?);
    checks.extend(part2_checks(&system, &set, options.seed)?);
    let displayed = displayed_degree3_set(&set);
    for &p in &options.enumeration_primes {
        let mut c = enumerate_small_field(&system, &displayed, p)?;
        c.name = format!("{} (displayed equations only)", c.name);
        checks.push(c);
        checks.push(enumerate_small_field(&system, &set, p)?);
    }
    Ok(ReproReport {
        experiment: "degree3".into(),
        n: 2,
        d: 3,
        coeff_dimension: system.coeff_dimension(),
        equations: equation_lines(&system)?,
        certificates: certificate_lines(&system, &set)?,
        nd_lcm_lower_bound: set.nd_bound().to_string(),
        checks,
    })
}

/// The certificates of the degree-3 set that come from displayed equations.
pub fn displayed_degree3_set(set: &GeneratorSet) -> GeneratorSet {
    let prefixes = ["listed two-term member", "short ideal member", "radical member"];
    GeneratorSet {
        certificates: set.certificates.iter().filter(|c| prefixes.iter().any(|p| c.source.starts_with(p))).cloned().collect(),
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn random_nonzero_rational(rng: &mut crate::sample::SampleRng) -> BigRational {
    loop {
        let n = rng.gen_range(-6i64..=6);
        if n != 0 {
            return rat(n, rng.gen_range(1i64..=4));
        }
    }
}

/// A map over `Q` in `x, y` from `(coefficient, exponent of x, exponent of y)` triples.
fn qmap(components: &[Vec<(BigRational, u32, u32)>]) -> Result<PolyMap> {
    let vars = VariableSet::standard(2);
    let comps = components
        .iter()
        .map(|terms| {
            Polynomial::from_terms(
                Ring::Rationals,
                &vars,
                terms.iter().map(|(c, a, b)| (Monomial::from_exponents(vec![*a, *b]), Scalar::Rat(c.clone()))),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    PolyMap::new(comps)
}

/// The solved degree-3 family at `A, A1, E`, in the expanded form.
pub fn part1_closed_form(a: &BigRational, a1: &BigRational, e: &BigRational) -> Result<PolyMap> {
    let one = BigRational::one();
    let r = |k: i64| BigRational::from_integer(BigInt::from(k));
    let pw = |q: &BigRational, k: i32| num_traits::pow::Pow::pow(q, k);
    let first = vec![
        (one.clone(), 1, 0),
        (a.clone(), 2, 0),
        (pw(a, 3) / pw(a1, 2), 0, 2),
        (-r(2) * pw(a, 2) / a1, 1, 1),
        (-pw(a1, 3) * e / pw(a, 3), 3, 0),
        (e.clone(), 0, 3),
        (r(3) * pw(a1, 2) * e / pw(a, 2), 2, 1),
        (-r(3) * a1 * e / a, 1, 2),
    ];
    let second = vec![
        (one, 0, 1),
        (a1.clone(), 2, 0),
        (pw(a, 2) / a1, 0, 2),
        (-r(2) * a, 1, 1),
        (-pw(a1, 4) * e / pw(a, 4), 3, 0),
        (a1 * e / a, 0, 3),
        (r(3) * pw(a1, 3) * e / pw(a, 3), 2, 1),
        (-r(3) * pw(a1, 2) * e / pw(a, 2), 1, 2),
    ];
    qmap(&[first, second])
}

/// `(x + r y, y) ∘ (x, y + a1 x^2 + k x^3) ∘ (x - r y, y)` with `r = A/A1`.
pub fn part1_factorization(a: &BigRational, a1: &BigRational, k: &BigRational) -> Result<PolyMap> {
    let r = a / a1;
    let one = BigRational::one();
    let outer = qmap(&[vec![(one.clone(), 1, 0), (r.clone(), 0, 1)], vec![(one.clone(), 0, 1)]])?;
    let middle = qmap(&[vec![(one.clone(), 1, 0)], vec![(one.clone(), 0, 1), (a1.clone(), 2, 0), (k.clone(), 3, 0)]])?;
    let inner = qmap(&[vec![(one.clone(), 1, 0), (-r, 0, 1)], vec![(one, 0, 1)]])?;
    outer.compose(&middle)?.compose(&inner)
}

fn evaluate_map(f: &PolyMap, point: &[Scalar]) -> Result<Vec<Scalar>> {
    f.components().iter().map(|c| c.evaluate(point)).collect()
}

/// Counts points among `points` where `f` and `g` differ.
fn mismatches(f: &PolyMap, g: &PolyMap, points: &[Vec<Scalar>]) -> Result<usize> {
    let mut bad = 0;
    for p in points {
        if evaluate_map(f, p)? != evaluate_map(g, p)? {
            bad += 1;
        }
    }
    Ok(bad)
}

fn vanishes_on(system: &KellerSystem, set: &GeneratorSet, v: &[Scalar]) -> Result<Option<String>> {
    for c in &set.certificates {
        let g = c.generator.to_ring(Ring::Rationals)?;
        if !g.evaluate(v)?.is_zero() {
            return Ok(Some(system.to_display(&c.generator)?.to_string()));
        }
    }
    Ok(None)
}

/// Number of specializations of `(A, A1, E)` and of points per specialization.
pub const PART1_SPECIALIZATIONS: usize = 5;
pub const PART1_POINTS: usize = 25;

fn part1_checks(system: &KellerSystem, set: &GeneratorSet, seed: u64) -> Result<Vec<Check>> {
    let mut rng = rng_from_seed(seed);
    let pw = |q: &BigRational, k: i32| num_traits::pow::Pow::pow(q, k);
    let mut literal_bad = 0;
    let mut corrected_bad = 0;
    let mut keller_bad = Vec::new();
    let mut generator_bad = Vec::new();
    let mut solved_bad = Vec::new();
    let mut total = 0;
    for _ in 0..PART1_SPECIALIZATIONS {
        let (a, a1, e) = (random_nonzero_rational(&mut rng), random_nonzero_rational(&mut rng), random_nonzero_rational(&mut rng));
        let t = part1_closed_form(&a, &a1, &e)?;
        let points: Vec<Vec<Scalar>> = (0..PART1_POINTS)
            .map(|_| vec![Scalar::Rat(random_nonzero_rational(&mut rng)), Scalar::Rat(random_nonzero_rational(&mut rng))])
            .collect();
        total += points.len();
        let literal = part1_factorization(&a, &a1, &(-pw(&a1, 3) * &e / pw(&a, 3)))?;
        literal_bad += mismatches(&literal, &t, &points)?;
        let corrected = part1_factorization(&a, &a1, &(-pw(&a1, 4) * &e / pw(&a, 4)))?;
        corrected_bad += mismatches(&corrected, &t, &points)?;
        if corrected != t {
            corrected_bad += 1;
        }
        if !keller_check(&t) {
            keller_bad.push(format!("A={a}, A1={a1}, E={e}"));
        }
        let v = system.coefficient_vector(&t)?;
        if let Some(g) = vanishes_on(system, set, &v)? {
            generator_bad.push(format!("{g} at A={a}, A1={a1}, E={e}"));
        }
        let solved: [(&str, BigRational); 8] = [
            ("C1", -BigRational::from_integer(2.into()) * &a),
            ("C", -BigRational::from_integer(2.into()) * pw(&a, 2) / &a1),
            ("B1", pw(&a, 2) / &a1),
            ("B", pw(&a, 3) / pw(&a1, 2)),
            ("G", -BigRational::from_integer(3.into()) * &a1 * &e / &a),
            ("G1", -BigRational::from_integer(3.into()) * pw(&a1, 2) * &e / pw(&a, 2)),
            ("D", -pw(&a1, 3) * &e / pw(&a, 3)),
            ("D1", pw(&a1, 4) * &e / pw(&a, 4)),
        ];
        for (name, value) in solved {
            let idx = system.display_vars().index_of(name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
            if v[idx].to_rational() != value && !solved_bad.contains(&name.to_string()) {
                solved_bad.push(name.to_string());
            }
        }
    }
    let spec = format!("{PART1_SPECIALIZATIONS} specializations, {total} points");
    Ok(vec![
        Check::new(
            "part 1 closed form is a Keller map",
            keller_bad.is_empty(),
            if keller_bad.is_empty() { spec.clone() } else { keller_bad.join("; ") },
        ),
        Check::new(
            "part 1 closed form satisfies the certified generators",
            generator_bad.is_empty(),
            if generator_bad.is_empty() { spec.clone() } else { generator_bad.join("; ") },
        ),
        Check::new(
            "part 1 solved coefficients match the closed form",
            solved_bad.is_empty(),
            if solved_bad.is_empty() { spec.clone() } else { format!("differs at {}", solved_bad.join(", ")) },
        ),
        Check::new(
            "part 1 factorization with cubic coefficient -E*A1^3/A^3",
            literal_bad == 0,
            format!("{literal_bad} mismatches over {spec}"),
        ),
        Check::new(
            "part 1 factorization with cubic coefficient -E*A1^4/A^4",
            corrected_bad == 0,
            format!("{corrected_bad} mismatches over {spec}"),
        ),
    ])
}

/// The coefficients of the affine part of a map of dimension 2 whose other
/// variables are parameters: `(matrix, translation)` over the parameters.
fn parametric_affine(f: &PolyMap, params: &VariableSet) -> Result<(Vec<Vec<Polynomial>>, Vec<Polynomial>)> {
    let zero = Polynomial::zero(f.ring(), params);
    let mut matrix = vec![vec![zero.clone(); 2]; 2];
    let mut shift = vec![zero.clone(); 2];
    for i in 0..2 {
        let groups = f.component(i).split_leading(2, params)?;
        let get = |e: [u32; 2]| groups.get(&Monomial::from_exponents(e.to_vec())).cloned().unwrap_or_else(|| zero.clone());
        matrix[i][0] = get([1, 0]);
        matrix[i][1] = get([0, 1]);
        shift[i] = get([0, 0]);
    }
    Ok((matrix, shift))
}

/// The generic tame form `α ∘ (x, y + f(x)) ∘ β` with `β = (x + b y + c, y)`
/// and `α` solved so that the affine part is the identity.
pub fn part2_generic_map() -> Result<(PolyMap, VariableSet)> {
    let names = ["x", "y", "b", "c", "f1", "f2", "f3"];
    let vars = VariableSet::new(&names)?;
    let params = VariableSet::new(&names[2..])?;
    let ring = Ring::Rationals;
    let beta = PolyMap::parse("[x + b*y + c; y]", &vars, ring)?;
    let tri = PolyMap::parse("[x; y + f1*x + f2*x^2 + f3*x^3]", &vars, ring)?;
    let m = tri.compose(&beta)?;
    let (lin, shift) = parametric_affine(&m, &params)?;
    let det = &(&lin[0][0] * &lin[1][1]) - &(&lin[0][1] * &lin[1][0]);
    if !det.is_one() {
        return Err(Error::Invalid(format!("generic affine part has determinant {det}")));
    }
    let positions: Vec<usize> = (2..names.len()).collect();
    let lift = |p: &Polynomial| p.embed(&vars, &positions);
    let adj = [[lift(&lin[1][1])?, lift(&-&lin[0][1])?], [lift(&-&lin[1][0])?, lift(&lin[0][0])?]];
    let z: Vec<Polynomial> = (0..2).map(|j| Ok(&Polynomial::var(ring, &vars, j) - &lift(&shift[j])?)).collect::<Result<_>>()?;
    let alpha = PolyMap::new(vec![&(&adj[0][0] * &z[0]) + &(&adj[0][1] * &z[1]), &(&adj[1][0] * &z[0]) + &(&adj[1][1] * &z[1])])?;
    Ok((alpha.compose(&m)?, params))
}

fn part2_checks(system: &KellerSystem, set: &GeneratorSet, seed: u64) -> Result<Vec<Check>> {
    let (t, params) = part2_generic_map()?;
    let mut problems = Vec::new();
    if !t.has_identity_affine_part() {
        problems.push("affine part is not the identity".to_string());
    }
    if t.degree() > 3 {
        problems.push(format!("degree {}", t.degree()));
    }
    let zero = Polynomial::zero(Ring::Rationals, &params);
    let groups: Vec<_> = (0..2).map(|i| t.component(i).split_leading(2, &params)).collect::<Result<_>>()?;
    let images: Vec<Polynomial> = system
        .coeff_index()
        .iter()
        .map(|c| groups[c.component].get(&Monomial::from_exponents(c.exponents.clone())).cloned().unwrap_or_else(|| zero.clone()))
        .collect();
    let mut symbolic_bad = Vec::new();
    for c in &set.certificates {
        let g = c.generator.to_ring(Ring::Rationals)?;
        if !g.substitute(&images)?.is_zero() {
            symbolic_bad.push(system.to_display(&c.generator)?.to_string());
        }
    }
    problems.extend(symbolic_bad);

    // β = (a x + b y + c, y) with a ≠ 0 at random rational values.
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    let vars = VariableSet::standard(2);
    let mut numeric_bad = Vec::new();
    const SPECIALIZATIONS: usize = 20;
    for _ in 0..SPECIALIZATIONS {
        let q = |rng: &mut crate::sample::SampleRng| random_nonzero_rational(rng);
        let (a, b, c) = (q(&mut rng), q(&mut rng), q(&mut rng));
        let (f1, f2, f3) = (q(&mut rng), q(&mut rng), q(&mut rng));
        let one = BigRational::one();
        let zero_q = BigRational::zero();
        let beta = qmap(&[vec![(a, 1, 0), (b, 0, 1), (c, 0, 0)], vec![(one.clone(), 0, 1)]])?;
        let tri = qmap(&[vec![(one.clone(), 1, 0)], vec![(one, 0, 1), (f1, 1, 0), (f2, 2, 0), (f3, 3, 0), (zero_q, 0, 0)]])?;
        let m = tri.compose(&beta)?;
        let t = m.normalize_affine()?;
        debug_assert_eq!(t.vars(), &vars);
        let v = system.coefficient_vector(&t)?;
        if let Some(g) = vanishes_on(system, set, &v)? {
            numeric_bad.push(g);
        }
    }
    Ok(vec![
        Check::new(
            "part 2 generic tame form satisfies the certified generators",
            problems.is_empty(),
            if problems.is_empty() {
                format!("{} generators vanish identically in b, c, f1, f2, f3", set.len())
            } else {
                problems.join(", ")
            },
        ),
        Check::new(
            "part 2 tame form with a != 1 satisfies the certified generators",
            numeric_bad.is_empty(),
            if numeric_bad.is_empty() { format!("{SPECIALIZATIONS} rational specializations") } else { numeric_bad.join(", ") },
        ),
    ])
}

/// Integer polynomial compiled for fast evaluation modulo `p`.
struct CompiledPoly {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn new(poly: &Polynomial, p: u64) -> Result<Self> {
        let reduced = poly.reduce_mod_p(p)?;
        let terms = reduced
            .terms()
            .map(|(m, c)| {
                let Scalar::Mod(c) = c else { unreachable!() };
                let vars = m.exponents().iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                (c.residue(), vars)
            })
            .collect();
        Ok(CompiledPoly { terms })
    }

    fn vanishes(&self, point: &[u64], p: u64) -> bool {
        let mut acc = 0u64;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(i, e) in vars {
                for _ in 0..e {
                    t = t * point[i] % p;
                }
                if t == 0 {
                    break;
                }
            }
            acc = (acc + t) % p;
        }
        acc == 0
    }
}

/// Points of `F_p^14` enumerated by [`enumerate_small_field`] at most.
pub const ENUMERATION_CAP: u128 = 20_000_000;

/// Every point of `F_p^N` annihilated by the equations and the certified
/// generators gives a map that is checked for a polynomial inverse. Points
/// are reported by family: all of `A, A1, E` nonzero, or one of them zero.
pub fn enumerate_small_field(system: &KellerSystem, set: &GeneratorSet, p: u64) -> Result<Check> {
    let ring = Ring::prime_field(p)?;
    let dim = system.coeff_dimension();
    let size = (p as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if size > ENUMERATION_CAP {
        return Err(Error::CapExceeded { size, cap: ENUMERATION_CAP });
    }
    let mut polys: Vec<&Polynomial> = system.equations().iter().map(|e| &e.poly).collect();
    polys.extend(set.certificates.iter().map(|c| &c.generator));
    let mut compiled = polys.into_iter().map(|g| CompiledPoly::new(g, p)).collect::<Result<Vec<_>>>()?;
    compiled.sort_by_key(|c| c.terms.iter().map(|(_, v)| v.len()).sum::<usize>());
    let idx = |name: &str| system.display_vars().index_of(name).ok_or_else(|| Error::UnknownVariable(name.into()));
    let watched = [("A", idx("A")?), ("A1", idx("A1")?), ("E", idx("E")?)];
    // Counts of (points, invertible) for the generic family and each zero family.
    let mut families = [(0u64, 0u64); 4];
    let mut point = vec![0u64; dim];
    let mut failures = Vec::new();
    for _ in 0..size {
        if compiled.iter().all(|c| c.vanishes(&point, p)) {
            let v: Vec<Scalar> = point.iter().map(|&x| ring.from_i64(x as i64)).collect();
            let f = system.map_from_vector(&v, ring)?;
            let invertible = f.formal_inverse(3)?.is_some();
            let mut slots = vec![];
            for (k, (_, i)) in watched.iter().enumerate() {
                if point[*i] == 0 {
                    slots.push(k + 1);
                }
            }
            if slots.is_empty() {
                slots.push(0);
            }
            for s in slots {
                families[s].0 += 1;
                families[s].1 += u64::from(invertible);
            }
            if !invertible && failures.len() < 5 {
                failures.push(f.to_string());
            }
        }
        for x in point.iter_mut() {
            *x += 1;
            if *x < p {
                break;
            }
            *x = 0;
        }
    }
    let labels = ["A, A1, E nonzero", "A = 0", "A1 = 0", "E = 0"];
    let summary: Vec<String> = labels
        .iter()
        .zip(&families)
        .map(|(l, (pts, inv))| format!("{l}: {inv} of {pts} invertible"))
        .collect();
    let mut detail = summary.join("; ");
    if !failures.is_empty() {
        detail.push_str(&format!("; not invertible: {}", failures.join(", ")));
    }
    Ok(Check::new(format!("points over F_{p} satisfying the generators are invertible"), failures.is_empty(), detail))
}

/// Parameters of a randomized trial run.
#[derive(Clone, Debug, Serialize)]
pub struct TrialParameters {
    pub n: usize,
    pub d: u32,
    pub p: u64,
    pub trials: u64,
    pub bound: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialCounts {
    pub pass: u64,
    pub fail: u64,
    pub error: u64,
    /// Samples rejected before the test (coefficients beyond the bound).
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub trial: u64,
    pub seed: u64,
    pub maps: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub experiment: String,
    pub seed: u64,
    pub parameters: TrialParameters,
    pub counts: TrialCounts,
    pub witnesses: Vec<Witness>,
    /// Free-form facts about the run, such as whether `p` exceeds the lcm bound.
    pub notes: Vec<String>,
    pub wall_ms: u128,
}

enum TrialOutcome {
    Pass,
    Fail(Witness),
    Error(Witness),
    Skipped,
}

fn merge(experiment: &str, seed: u64, parameters: TrialParameters, outcomes: Vec<TrialOutcome>, notes: Vec<String>, start: Instant) -> TrialReport {
    let mut counts = TrialCounts::default();
    let mut witnesses = Vec::new();
    for o in outcomes {
        match o {
            TrialOutcome::Pass => counts.pass += 1,
            TrialOutcome::Fail(w) => {
                counts.fail += 1;
                witnesses.push(w);
            }
            TrialOutcome::Error(w) => {
                counts.error += 1;
                witnesses.push(w);
            }
            TrialOutcome::Skipped => counts.skipped += 1,
        }
    }
    TrialReport {
        experiment: experiment.into(),
        seed,
        parameters,
        counts,
        witnesses,
        notes,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// Generators used for a system: the curated set where one exists, else the
/// primitive parts of the `E_α`.
pub fn generators_for(system: &KellerSystem) -> Result<GeneratorSet> {
    match builtin_generators_for(system) {
        Err(Error::Unsupported(_)) => Ok(GeneratorSet { certificates: system.primitive_generators()? }),
        other => other,
    }
}

/// Number of factors in sampled tame maps.
pub const TAME_FACTORS: usize = 4;

/// A sampled integer Keller map of degree at most `d` with identity affine part.
pub fn sample_keller(n: usize, d: u32, seed: u64) -> Result<PolyMap> {
    let (f, _) = sample_tame(Ring::Integers, n, d, TAME_FACTORS, seed)?;
    f.normalize_affine()
}

fn max_coefficient(f: &PolyMap) -> BigInt {
    f.components().iter().map(|c| c.max_abs_coefficient()).max().unwrap_or_default()
}

/// Samples pairs of integer Keller maps with coefficients in `[-C, C]`,
/// reduces them mod `p`, and checks the composition against the degree-`d^2`
/// system. Pairs whose factors fail the degree-`d` check count as errors.
pub fn conjecture_composition(p: u64, n: usize, d: u32, trials: u64, seed: u64, bound: u64) -> Result<TrialReport> {
    let start = Instant::now();
    let parameters = TrialParameters { n, d, p, trials, bound };
    if trials == 0 {
        return Ok(merge("composition", seed, parameters, Vec::new(), Vec::new(), start));
    }
    Ring::prime_field(p)?;
    let small = KellerSystem::new(n, d)?;
    let small_set = generators_for(&small)?;
    let big = KellerSystem::new(n, d * d)?;
    let big_set = generators_for(&big)?;
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<TrialOutcome> {
            let s = trial_seed(seed, i);
            let f = sample_keller(n, d, s)?;
            let g = sample_keller(n, d, s ^ 0xa5a5_a5a5)?;
            if max_coefficient(&f) > BigInt::from(bound) || max_coefficient(&g) > BigInt::from(bound) {
                return Ok(TrialOutcome::Skipped);
            }
            let (fp, gp) = (f.reduce_mod_p(p)?, g.reduce_mod_p(p)?);
            for (name, m) in [("f", &fp), ("g", &gp)] {
                let v = strong_keller_check(m, &small, &small_set)?;
                if v.fails() {
                    let detail = format!("factor {name} fails the degree-{d} check: {:?}", v.outcome);
                    return Ok(TrialOutcome::Error(Witness { trial: i, seed: s, maps: vec![fp.to_string(), gp.to_string()], detail }));
                }
            }
            let h = fp.compose(&gp)?;
            let v = strong_keller_check(&h, &big, &big_set)?;
            Ok(match v.outcome {
                Outcome::Fails { witness, value } => TrialOutcome::Fail(Witness {
                    trial: i,
                    seed: s,
                    maps: vec![fp.to_string(), gp.to_string(), h.to_string()],
                    detail: format!("{witness} = {value}"),
                }),
                _ => TrialOutcome::Pass,
            })
        })
        .collect::<Result<_>>()?;
    let nd = big_set.nd_bound();
    let notes = vec![
        format!("degree-{} generators: {} ({})", d * d, big_set.len(), if big.d() <= 3 && big.n() == 2 { "curated" } else { "primitive parts of E" }),
        format!("p = {p} {} the recorded lcm bound {nd} for degree {}", if BigInt::from(p) > nd { "exceeds" } else { "does not exceed" }, d * d),
    ];
    Ok(merge("composition", seed, parameters, outcomes, notes, start))
}

/// Default node budget per lift attempt.
pub const LIFT_BUDGET: u64 = 200_000;

/// Samples integer Keller maps with coefficients in `[-C, C]`, reduces them
/// mod `p`, and searches for a Keller lift with coefficients in `[-C, C]`. A pass is a lift found; a
/// fail is an exhausted search (inconclusive); an error is an exceeded budget.
pub fn conjecture_lift(p: u64, n: usize, d: u32, bound: u64, trials: u64, seed: u64) -> Result<TrialReport> {
    let start = Instant::now();
    let parameters = TrialParameters { n, d, p, trials, bound };
    if trials == 0 {
        return Ok(merge("lift", seed, parameters, Vec::new(), Vec::new(), start));
    }
    let system = KellerSystem::new(n, d)?;
    let set = generators_for(&system)?;
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<TrialOutcome> {
            let s = trial_seed(seed, i);
            let integer = sample_keller(n, d, s)?;
            if max_coefficient(&integer) > BigInt::from(bound) {
                return Ok(TrialOutcome::Skipped);
            }
            let f = integer.reduce_mod_p(p)?;
            if strong_keller_check(&f, &system, &set)?.fails() {
                return Ok(TrialOutcome::Skipped);
            }
            let w = |detail: &str| Witness { trial: i, seed: s, maps: vec![f.to_string()], detail: detail.into() };
            match bounded_lift(&f, LiftOptions { bound, budget: LIFT_BUDGET }) {
                Ok(Some(_)) => Ok(TrialOutcome::Pass),
                Ok(None) => Ok(TrialOutcome::Fail(w("no lift within the bound"))),
                Err(Error::BudgetExceeded(b)) => Ok(TrialOutcome::Error(w(&format!("budget of {b} nodes exceeded")))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let notes = vec!["a missing lift is not a proof that none exists".to_string()];
    Ok(merge("lift", seed, parameters, outcomes, notes, start))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityRow {
    pub p: u64,
    pub injective: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub map: String,
    pub rows: Vec<InjectivityRow>,
}

/// Tabulates injectivity of `F mod p` on `F_p^n` for each prime.
pub fn injectivity_scan(f: &PolyMap, primes: &[u64], cap: u128) -> Result<InjectivityReport> {
    let rows = primes
        .iter()
        .map(|&p| {
            let res = f.reduce_mod_p(p).and_then(|g| g.is_injective_on_points(cap));
            match res {
                Ok(b) => InjectivityRow { p, injective: Some(b), error: None },
                Err(e) => InjectivityRow { p, injective: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(InjectivityReport { map: f.to_string(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::DEFAULT_POINT_CAP;

    #[test]
    fn degree2_report() {
        let r = repro_degree2().unwrap();
        assert_eq!(r.equations.len(), 5);
        assert!(r.check("five nonconstant coefficients").unwrap().passed);
        // The displayed x*y coefficient keeps a2*b2 terms that cancel.
        assert!(!r.check("displayed coefficients (up to term signs)").unwrap().passed);
        assert!(!r.check("displayed coefficients (literal)").unwrap().passed);
        assert!(!r.check("a1^2 + b1*b3 in ideal").unwrap().passed);
        assert!(r.check("a1*b2 - a2*b1 in ideal").unwrap().passed);
        assert!(r.check("a1^2 - b1*b3 in ideal").unwrap().passed);
        assert!(r.check("(x + x^2, y) fails at p = 2").unwrap().passed);
    }

    #[test]
    fn part1_factorization_identity() {
        let (a, a1, e) = (rat(2, 3), rat(-5, 2), rat(7, 4));
        let pw = |q: &BigRational, k: i32| num_traits::pow::Pow::pow(q, k);
        let t = part1_closed_form(&a, &a1, &e).unwrap();
        assert!(keller_check(&t));
        let corrected = part1_factorization(&a, &a1, &(-pw(&a1, 4) * &e / pw(&a, 4))).unwrap();
        assert_eq!(corrected, t);
        let literal = part1_factorization(&a, &a1, &(-pw(&a1, 3) * &e / pw(&a, 3))).unwrap();
        assert_ne!(literal, t);
    }

    #[test]
    fn part2_generic_form_has_identity_affine_part() {
        let (t, _) = part2_generic_map().unwrap();
        assert!(t.has_identity_affine_part());
        assert!(t.degree() <= 3);
        assert!(keller_check(&t));
    }

    #[test]
    fn trials_are_reproducible() {
        let a = conjecture_composition(7, 2, 2, 6, 11, 50).unwrap();
        let b = conjecture_composition(7, 2, 2, 6, 11, 50).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.witnesses, b.witnesses);
        assert_eq!(a.counts.fail, 0);
        let empty = conjecture_composition(7, 2, 2, 0, 11, 50).unwrap();
        assert_eq!(empty.counts, TrialCounts::default());
    }

    #[test]
    fn lifts_of_reductions_are_found() {
        let r = conjecture_lift(101, 2, 2, 40, 8, 5).unwrap();
        assert_eq!(r.counts.fail + r.counts.error, 0, "{:?}", r.witnesses);
        let again = conjecture_lift(101, 2, 2, 40, 8, 5).unwrap();
        assert_eq!(r.counts, again.counts);
    }

    #[test]
    fn injectivity_examples() {
        let vars = VariableSet::standard(2);
        let auto = PolyMap::parse("[x + y^2; y]", &vars, Ring::Integers).unwrap();
        let r = injectivity_scan(&auto, &[2, 3, 5], DEFAULT_POINT_CAP).unwrap();
        assert!(r.rows.iter().all(|row| row.injective == Some(true)));
        let f = PolyMap::parse("[x + x^2; y]", &vars, Ring::Integers).unwrap();
        let r = injectivity_scan(&f, &[2, 3], DEFAULT_POINT_CAP).unwrap();
        assert_eq!(r.rows[0].injective, Some(false));
        assert!(injectivity_scan(&f, &[], DEFAULT_POINT_CAP).unwrap().rows.is_empty());
    }
}
