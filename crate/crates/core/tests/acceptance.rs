//! One line per acceptance criterion. Runtime limits are pinned below; the
//! process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use keller_core::experiments::{part1_closed_form, part1_factorization, repro_degree2, repro_degree3_with, sample_keller, Degree3Options};
use keller_core::polymap::sample_tame;
use keller_core::sample::{random_polynomial, rng_from_seed, trial_seed, SampleRng};
use keller_core::{
    builtin_radical_generators, strong_keller_check, Ideal, KellerSystem, Monomial, Outcome, PolyMap, Polynomial, Ring,
    Scalar, VariableSet,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

const DEGREE2_LIMIT: Duration = Duration::from_secs(1);
const DEGREE3_LIMIT: Duration = Duration::from_secs(5);
const IDEAL_LIMIT: Duration = Duration::from_secs(600);
const RADICAL_LIMIT: Duration = Duration::from_secs(3600);
const PART1_LIMIT: Duration = Duration::from_secs(10);
const OBVIOUS_LIMIT: Duration = Duration::from_secs(1);
const CHAIN_RULE_LIMIT: Duration = Duration::from_secs(60);
const MOD_P_LIMIT: Duration = Duration::from_secs(60);
const INVERSE_LIMIT: Duration = Duration::from_secs(300);

struct Line {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: u32, name: &'static str, limit: Option<Duration>, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (ok, mut detail) = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    if let Some(l) = limit {
        detail.push_str(&format!(" [{:.2}s, limit {}s]", elapsed.as_secs_f64(), l.as_secs()));
    } else {
        detail.push_str(&format!(" [{:.2}s]", elapsed.as_secs_f64()));
    }
    Line { id, name, passed: ok && in_time, detail, elapsed }
}

fn main() -> ExitCode {
    let lines = vec![
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(),
        criterion9(),
        criterion10(),
        criterion11(),
    ];
    let mut total = Duration::ZERO;
    for l in &lines {
        println!("criterion {:>2} {}: {} {}", l.id, if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail);
        total += l.elapsed;
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("acceptance: {} of {} passed in {:.1}s", lines.len() - failed, lines.len(), total.as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn criterion1() -> Line {
    timed(1, "degree-2 coefficients equal the displayed ones", Some(DEGREE2_LIMIT), || {
        let r = repro_degree2().expect("degree-2 report");
        let c = r.check("displayed coefficients (literal)").expect("literal check");
        let count = r.equations.len();
        (c.passed && count == 5, format!("{count} coefficients; {}", c.detail))
    })
}

fn criterion2() -> Line {
    timed(2, "degree-3 constant and displayed coefficients", Some(DEGREE3_LIMIT), || {
        let options = Degree3Options { enumeration_primes: Vec::new(), ..Degree3Options::default() };
        let r = repro_degree3_with(&options).expect("degree-3 report");
        let constant = r.check("constant coefficient is 1").expect("constant check");
        let literal = r.check("displayed coefficients (literal)").expect("literal check");
        let system = KellerSystem::new(2, 3).expect("system");
        let want = system.parse("6*D*B1-6*D1*B+4*A*G1-4*A1*G+F*C1-F1*C", Ring::Rationals).expect("parse");
        let x2y = Monomial::from_exponents(vec![2, 1]);
        let got = system.equations().iter().find(|e| e.alpha == x2y).map(|e| e.poly.clone());
        let x2y_ok = got.as_ref() == Some(&want);
        (constant.passed && literal.passed && x2y_ok, format!("{}; {}; x^2*y equal: {x2y_ok}", constant.detail, literal.detail))
    })
}

fn criterion3() -> Line {
    timed(3, "C1+2A, C+2B1, GE1-EG1 reduce to 0", Some(IDEAL_LIMIT), || {
        let system = KellerSystem::new(2, 3).expect("system");
        let mut results = Vec::new();
        for text in ["C1+2*A", "C+2*B1", "G*E1-E*G1"] {
            let q = system.parse(text, Ring::Rationals).expect("parse");
            results.push((text, system.ideal().ideal_member(&q).expect("membership")));
        }
        let ok = results.iter().all(|(_, m)| *m);
        (ok, results.iter().map(|(t, m)| format!("{t}: {m}")).collect::<Vec<_>>().join(", "))
    })
}

fn criterion4() -> Line {
    timed(4, "A^3E1^2-B^3D1^2 and A^3E^2-B^3D^2 in radical, not in ideal", Some(RADICAL_LIMIT), || {
        let system = KellerSystem::new(2, 3).expect("system");
        let mut ok = true;
        let mut detail = Vec::new();
        for text in ["A^3*E1^2-B^3*D1^2", "A^3*E^2-B^3*D^2"] {
            let q = system.parse(text, Ring::Rationals).expect("parse");
            let rad = system.ideal().radical_member(&q).expect("radical");
            let ideal = system.ideal().ideal_member(&q).expect("ideal");
            ok &= rad && !ideal;
            detail.push(format!("{text}: radical {rad}, ideal {ideal}"));
        }
        (ok, detail.join(", "))
    })
}

fn nonzero_rational(rng: &mut SampleRng) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=9);
        if n != 0 {
            return BigRational::new(BigInt::from(n), BigInt::from(d));
        }
    }
}

fn evaluate(f: &PolyMap, point: &[Scalar]) -> Vec<Scalar> {
    f.components().iter().map(|c| c.evaluate(point).expect("evaluate")).collect()
}

fn criterion5() -> Line {
    timed(5, "tame factorization of the solved family", Some(PART1_LIMIT), || {
        let mut rng = rng_from_seed(5);
        let pw = |q: &BigRational, k: i32| num_traits::pow::Pow::pow(q, k);
        let (mut literal, mut corrected, mut points) = (0, 0, 0);
        for _ in 0..5 {
            let (a, a1, e) = (nonzero_rational(&mut rng), nonzero_rational(&mut rng), nonzero_rational(&mut rng));
            let t = part1_closed_form(&a, &a1, &e).expect("closed form");
            let as_printed = part1_factorization(&a, &a1, &(-pw(&a1, 3) * &e / pw(&a, 3))).expect("factorization");
            let fixed = part1_factorization(&a, &a1, &(-pw(&a1, 4) * &e / pw(&a, 4))).expect("factorization");
            for _ in 0..25 {
                let pt = vec![Scalar::Rat(nonzero_rational(&mut rng)), Scalar::Rat(nonzero_rational(&mut rng))];
                let want = evaluate(&t, &pt);
                literal += usize::from(evaluate(&as_printed, &pt) != want);
                corrected += usize::from(evaluate(&fixed, &pt) != want);
                points += 1;
            }
        }
        (
            literal == 0,
            format!("cubic coefficient -E*A1^3/A^3: {literal} of {points} points differ; -E*A1^4/A^4: {corrected} differ"),
        )
    })
}

fn criterion6() -> Line {
    timed(6, "(x + x^2, y) fails at p = 2", Some(OBVIOUS_LIMIT), || {
        let (system, set) = builtin_radical_generators(2, 2).expect("generators");
        let f = PolyMap::parse("[x + x^2; y]", &VariableSet::standard(2), Ring::PrimeField(2)).expect("map");
        let v = strong_keller_check(&f, &system, &set).expect("check");
        match v.outcome {
            Outcome::Fails { witness, value } => (witness == "a1^2 + b1*b3" && value == 1, format!("witness {witness}, value {value}")),
            other => (false, format!("{other:?}")),
        }
    })
}

fn random_map(rng: &mut SampleRng, ring: Ring, n: usize) -> PolyMap {
    let vars = VariableSet::standard(n);
    PolyMap::new((0..n).map(|_| random_polynomial(rng, ring, &vars, 2, 4, 3)).collect()).expect("map")
}

fn criterion7() -> Line {
    timed(7, "chain rule for det Jac", Some(CHAIN_RULE_LIMIT), || {
        let rings = [Ring::Integers, Ring::PrimeField(2), Ring::PrimeField(3), Ring::PrimeField(5)];
        let (mut failures, mut cases) = (0, 0);
        for n in [2, 3] {
            for ring in rings {
                let mut rng = rng_from_seed(700 + n as u64 * 10 + ring.characteristic());
                for _ in 0..100 {
                    let f = random_map(&mut rng, ring, n);
                    let g = random_map(&mut rng, ring, n);
                    let lhs = f.compose(&g).expect("compose").det_jacobian();
                    let outer = f.det_jacobian().substitute(g.components()).expect("substitute");
                    let rhs = outer.checked_mul(&g.det_jacobian()).expect("product");
                    failures += usize::from(lhs != rhs);
                    cases += 1;
                }
            }
        }
        (failures == 0, format!("{failures} failures in {cases} pairs (100 per n and ring)"))
    })
}

fn criterion8() -> Line {
    timed(8, "reduction mod p commutes with det Jac and composition", Some(MOD_P_LIMIT), || {
        let (mut failures, mut cases) = (0, 0);
        for p in [2u64, 3, 5] {
            let mut rng = rng_from_seed(800 + p);
            for i in 0..200 {
                let n = 2 + i % 2;
                let f = random_map(&mut rng, Ring::Integers, n);
                let g = random_map(&mut rng, Ring::Integers, n);
                let fp = f.reduce_mod_p(p).expect("reduce");
                let gp = g.reduce_mod_p(p).expect("reduce");
                let det_ok = f.det_jacobian().reduce_mod_p(p).expect("reduce") == fp.det_jacobian();
                let comp_ok = f.compose(&g).expect("compose").reduce_mod_p(p).expect("reduce") == fp.compose(&gp).expect("compose");
                failures += usize::from(!det_ok) + usize::from(!comp_ok);
                cases += 2;
            }
        }
        (failures == 0, format!("{failures} failures in {cases} comparisons"))
    })
}

fn criterion9() -> Line {
    timed(9, "inverse round trip on tame maps", Some(INVERSE_LIMIT), || {
        let (mut failures, mut cases) = (0, 0);
        for (n, budget) in [(2usize, 3u32), (3, 2)] {
            let vars = VariableSet::standard(n);
            let id = PolyMap::identity(Ring::Integers, &vars, n);
            for i in 0..50 {
                let (f, _) = sample_tame(Ring::Integers, n, budget, 4, trial_seed(900 + n as u64, i)).expect("sample");
                let ok = match f.is_invertible().expect("inverse") {
                    Some(g) => f.compose(&g).expect("compose") == id && g.compose(&f).expect("compose") == id,
                    None => false,
                };
                failures += usize::from(!ok);
                cases += 1;
            }
        }
        (failures == 0, format!("{failures} failures in {cases} maps"))
    })
}

fn criterion10() -> Line {
    timed(10, "reductions of integer Keller maps pass the check", None, || {
        let (system, set) = builtin_radical_generators(2, 2).expect("generators");
        let mut failures = Vec::new();
        let mut cases = 0;
        for p in [2u64, 3, 5, 7] {
            for i in 0..50 {
                let f = sample_keller(2, 2, trial_seed(1000 + p, i)).expect("sample");
                assert!(f.det_jacobian().is_one() && f.degree() <= 2);
                let v = strong_keller_check(&f.reduce_mod_p(p).expect("reduce"), &system, &set).expect("check");
                if v.fails() {
                    failures.push(format!("p={p}: {f}"));
                }
                cases += 1;
            }
        }
        (failures.is_empty(), format!("{} fails in {cases} maps {}", failures.len(), failures.join(" ")))
    })
}

/// Divisibility oracle: a polynomial lies in a monomial ideal iff each of its
/// terms is divisible by a generator.
fn in_monomial_ideal(gens: &[Monomial], f: &Polynomial) -> bool {
    f.terms().all(|(m, _)| gens.iter().any(|g| g.divides(m)))
}

fn random_exponents(rng: &mut SampleRng, n: usize, min: u32, max: u32) -> Monomial {
    loop {
        let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max)).collect();
        let d: u32 = e.iter().sum();
        if (min..=max).contains(&d) {
            return Monomial::from_exponents(e);
        }
    }
}

fn monomial_poly(vars: &VariableSet, m: &Monomial) -> Polynomial {
    Polynomial::from_terms(Ring::Rationals, vars, [(m.clone(), Ring::Rationals.one())]).expect("monomial")
}

fn criterion11() -> Line {
    timed(11, "membership agrees with independent oracles", None, || {
        let mut rng = rng_from_seed(11);
        let mut disagreements = Vec::new();
        let mut members = 0;
        for case in 0..100 {
            let n = rng.gen_range(1..=3);
            let vars = VariableSet::standard(n);
            let gens: Vec<Monomial> = (0..rng.gen_range(1..=4)).map(|_| random_exponents(&mut rng, n, 1, 4)).collect();
            let polys: Vec<Polynomial> = gens.iter().map(|g| monomial_poly(&vars, g)).collect();
            let ideal = Ideal::new(Ring::Rationals, &vars, polys).expect("ideal");
            let mut f = random_polynomial(&mut rng, Ring::Rationals, &vars, 6, 4, 5);
            if case % 2 == 0 {
                // Bias half the cases towards members.
                let g = monomial_poly(&vars, &gens[rng.gen_range(0..gens.len())]);
                f = f.checked_mul(&g).expect("product");
            }
            let oracle = in_monomial_ideal(&gens, &f);
            members += usize::from(oracle);
            if ideal.ideal_member(&f).expect("membership") != oracle {
                disagreements.push(format!("ideal case {case}"));
            }
        }
        let radical_cases = radical_cases();
        let mut radical_members = 0;
        for (i, (ideal, f, power)) in radical_cases.iter().enumerate() {
            let search = (1..=*power).any(|k| ideal.ideal_member(&f.pow(k)).expect("membership"));
            radical_members += usize::from(search);
            if ideal.radical_member(f).expect("radical") != search {
                disagreements.push(format!("radical case {i}"));
            }
        }
        (
            disagreements.is_empty(),
            format!(
                "{} disagreements; 100 monomial ideals ({members} members), {} radical cases ({radical_members} members) {}",
                disagreements.len(),
                radical_cases.len(),
                disagreements.join(" ")
            ),
        )
    })
}

/// Thirty ideals with a candidate and a power bound large enough that any
/// radical member has a power in the ideal at or below it.
fn radical_cases() -> Vec<(Ideal, Polynomial, u32)> {
    let mut rng = rng_from_seed(12);
    let mut cases = Vec::new();
    // Monomial ideals and monomials: a power at most the largest generator
    // exponent suffices when the support condition holds.
    for _ in 0..15 {
        let n = rng.gen_range(1..=3);
        let vars = VariableSet::standard(n);
        let gens: Vec<Polynomial> =
            (0..rng.gen_range(1..=3)).map(|_| monomial_poly(&vars, &random_exponents(&mut rng, n, 1, 4))).collect();
        let f = monomial_poly(&vars, &random_exponents(&mut rng, n, 1, 2));
        cases.push((Ideal::new(Ring::Rationals, &vars, gens).expect("ideal"), f, 4));
    }
    // (u^a, v^b) with u, v vanishing at the origin: combinations of u and v
    // are radical members with (s u + t v)^(a+b-1) in the ideal, while
    // adding 1 gives a polynomial equal to 1 at the origin.
    let vars = VariableSet::standard(3);
    for i in 0..15 {
        let u = loop {
            let u = random_polynomial(&mut rng, Ring::Rationals, &vars, 2, 3, 3);
            if !u.is_zero() && u.constant_term().is_zero() {
                break u;
            }
        };
        let v = loop {
            let v = random_polynomial(&mut rng, Ring::Rationals, &vars, 2, 3, 3);
            if !v.is_zero() && v.constant_term().is_zero() && v != u {
                break v;
            }
        };
        let (a, b) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let s = Polynomial::from_i64(Ring::Rationals, &vars, rng.gen_range(1..=3));
        let t = Polynomial::from_i64(Ring::Rationals, &vars, rng.gen_range(-3..=3));
        let mut f = s.checked_mul(&u).unwrap().checked_add(&t.checked_mul(&v).unwrap()).unwrap();
        if i % 3 == 2 {
            f = f.checked_add(&Polynomial::one(Ring::Rationals, &vars)).unwrap();
        }
        if f.is_zero() {
            f = u.clone();
        }
        let ideal = Ideal::new(Ring::Rationals, &vars, vec![u.pow(a), v.pow(b)]).expect("ideal");
        cases.push((ideal, f, a + b - 1));
    }
    cases
}
