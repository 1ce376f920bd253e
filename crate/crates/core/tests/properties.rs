use keller_core::experiments::sample_keller;
use keller_core::keller::builtin_generators_for;
use keller_core::sample::{random_polynomial, rng_from_seed, trial_seed};
use keller_core::{
    strong_keller_check, Ideal, KellerSystem, MonomialOrder, PolyMap, Polynomial, Ring, Scalar, VariableSet,
};
use rand::Rng;

fn values(system: &KellerSystem, polys: &[Polynomial], f: &PolyMap) -> Vec<Scalar> {
    let v = system.coefficient_vector(f).unwrap();
    polys.iter().map(|g| g.to_ring(f.ring()).unwrap().evaluate(&v).unwrap()).collect()
}

/// Identity plus random terms of degree 2 and 3 with small coefficients.
fn random_identity_map(seed: u64) -> PolyMap {
    let mut rng = rng_from_seed(seed);
    let vars = VariableSet::standard(2);
    let comps = (0..2)
        .map(|i| {
            let h = random_polynomial(&mut rng, Ring::Rationals, &vars, 3, 3, 2).filter_terms(|m| m.degree() >= 2);
            &Polynomial::var(Ring::Rationals, &vars, i) + &h
        })
        .collect();
    PolyMap::new(comps).unwrap()
}

#[test]
fn keller_iff_equations_iff_generators_vanish() {
    let system = KellerSystem::new(2, 3).unwrap();
    let set = builtin_generators_for(&system).unwrap();
    let equations: Vec<Polynomial> = system.equations().iter().map(|e| e.poly.clone()).collect();
    let generators: Vec<Polynomial> = set.certificates.iter().map(|c| c.generator.clone()).collect();
    let vanish = |xs: &[Scalar]| xs.iter().all(Scalar::is_zero);

    for i in 0..100 {
        let f = sample_keller(2, 3, trial_seed(43, i)).unwrap().to_ring(Ring::Rationals).unwrap();
        assert!(f.det_jacobian().is_one());
        assert!(vanish(&values(&system, &equations, &f)), "equations at {f}");
        assert!(vanish(&values(&system, &generators, &f)), "generators at {f}");
    }
    let mut non_keller = 0;
    let mut seed = 0;
    while non_keller < 100 {
        seed += 1;
        let f = random_identity_map(seed);
        let keller = f.det_jacobian().is_one();
        let e = vanish(&values(&system, &equations, &f));
        let g = vanish(&values(&system, &generators, &f));
        assert_eq!(keller, e, "{f}");
        assert_eq!(keller, g, "{f}");
        non_keller += usize::from(!keller);
    }
}

/// `F_p[t]/(m)` for a monic irreducible quadratic `m = t^2 - c`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Quadratic {
    a: u64,
    b: u64,
    p: u64,
    c: u64,
}

impl Quadratic {
    fn embed(x: u64, p: u64, c: u64) -> Self {
        Quadratic { a: x % p, b: 0, p, c }
    }

    fn add(self, o: Self) -> Self {
        Quadratic { a: (self.a + o.a) % self.p, b: (self.b + o.b) % self.p, ..self }
    }

    fn mul(self, o: Self) -> Self {
        let p = self.p;
        let a = (self.a * o.a + self.c * (self.b * o.b % p)) % p;
        let b = (self.a * o.b + self.b * o.a) % p;
        Quadratic { a, b, ..self }
    }

    fn eval(poly: &Polynomial, point: &[Quadratic], p: u64, c: u64) -> Quadratic {
        let mut acc = Quadratic::embed(0, p, c);
        for (m, coeff) in poly.terms() {
            let Scalar::Mod(r) = coeff else { panic!("expected F_p coefficients") };
            let mut term = Quadratic::embed(r.residue(), p, c);
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    term = term.mul(*x);
                }
            }
            acc = acc.add(term);
        }
        acc
    }
}

#[test]
fn generator_values_commute_with_field_extension() {
    // t^2 - c is irreducible when c is a non-residue mod p.
    let fields = [(3u64, 2u64), (5, 2), (7, 3)];
    let system = KellerSystem::new(2, 2).unwrap();
    let set = builtin_generators_for(&system).unwrap();
    for (p, c) in fields {
        assert!((1..p).all(|x| x * x % p != c), "{c} is a square mod {p}");
        for i in 0..40 {
            let mut rng = rng_from_seed(trial_seed(p, i));
            let vars = VariableSet::standard(2);
            let ring = Ring::PrimeField(p);
            let comps = (0..2)
                .map(|j| {
                    let h = random_polynomial(&mut rng, ring, &vars, 2, 3, 3).filter_terms(|m| m.degree() == 2);
                    &Polynomial::var(ring, &vars, j) + &h
                })
                .collect();
            let f = PolyMap::new(comps).unwrap();
            let v = system.coefficient_vector(&f).unwrap();
            let lifted: Vec<Quadratic> = v
                .iter()
                .map(|s| match s {
                    Scalar::Mod(r) => Quadratic::embed(r.residue(), p, c),
                    _ => panic!("expected F_p"),
                })
                .collect();
            let mut first_nonzero_base = None;
            let mut first_nonzero_ext = None;
            for (k, cert) in set.certificates.iter().enumerate() {
                let g = cert.generator.reduce_mod_p(p).unwrap();
                let Scalar::Mod(base) = g.evaluate(&v).unwrap() else { unreachable!() };
                let ext = Quadratic::eval(&g, &lifted, p, c);
                assert_eq!(ext, Quadratic::embed(base.residue(), p, c));
                if base.residue() != 0 && first_nonzero_base.is_none() {
                    first_nonzero_base = Some(k);
                }
                if ext != Quadratic::embed(0, p, c) && first_nonzero_ext.is_none() {
                    first_nonzero_ext = Some(k);
                }
            }
            assert_eq!(first_nonzero_base, first_nonzero_ext);
            let verdict = strong_keller_check(&f, &system, &set).unwrap();
            let equations_vanish = system
                .equations()
                .iter()
                .all(|e| e.poly.reduce_mod_p(p).unwrap().evaluate(&v).unwrap().is_zero());
            assert_eq!(verdict.fails(), !equations_vanish || first_nonzero_base.is_some());
        }
    }
}

#[test]
fn membership_does_not_depend_on_the_order() {
    let mut rng = rng_from_seed(77);
    let vars = VariableSet::standard(3);
    let orders = [MonomialOrder::GradedReverseLex, MonomialOrder::Lex, MonomialOrder::GradedLex];
    let mut members = 0;
    for case in 0..50 {
        let gens: Vec<Polynomial> =
            (0..rng.gen_range(1..=3)).map(|_| random_polynomial(&mut rng, Ring::Rationals, &vars, 2, 3, 3)).collect();
        let mut f = random_polynomial(&mut rng, Ring::Rationals, &vars, 2, 3, 3);
        if case % 2 == 0 {
            // A combination of the generators.
            f = Polynomial::zero(Ring::Rationals, &vars);
            for g in &gens {
                let m = random_polynomial(&mut rng, Ring::Rationals, &vars, 1, 2, 2);
                f = f.checked_add(&g.checked_mul(&m).unwrap()).unwrap();
            }
        }
        let ideal = Ideal::new(Ring::Rationals, &vars, gens).unwrap();
        let answers: Vec<bool> = orders.iter().map(|&o| ideal.ideal_member_in(&f, o).unwrap()).collect();
        assert!(answers.iter().all(|&a| a == answers[0]), "case {case}: {answers:?}");
        members += usize::from(answers[0]);
    }
    assert!(members > 0);
}
