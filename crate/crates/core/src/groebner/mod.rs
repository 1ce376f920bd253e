//! Gröbner bases, normal forms, ideal and radical membership.
//!
//! Over `Q` the engine works fraction-free with primitive integer
//! polynomials; over `F_p` with word-sized residues. Returned bases are
//! reduced, monic, and sorted by leading monomial ascending.

mod cache;
mod engine;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{Fp, Ring, Scalar};
use crate::error::{Error, Result};
use crate::poly::{Monomial, MonomialOrder, Polynomial, VariableSet};

pub use cache::{cache_key, default_cache_dir};
pub use engine::Progress;
use engine::{IntDomain, ModDomain, Mon, Poly, RatDomain};

pub type ProgressFn = Arc<dyn Fn(&Progress) + Send + Sync>;

#[derive(Clone, Default)]
pub struct GroebnerOptions {
    /// Use the Gebauer–Möller pair update instead of the plain criteria.
    pub gebauer_moller: bool,
    /// Abort with [`Error::BudgetExceeded`] after this many S-pair reductions.
    pub max_reductions: Option<u64>,
    pub progress: Option<ProgressFn>,
}

impl std::fmt::Debug for GroebnerOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroebnerOptions")
            .field("gebauer_moller", &self.gebauer_moller)
            .field("max_reductions", &self.max_reductions)
            .finish_non_exhaustive()
    }
}

fn field_of(ring: Ring) -> Ring {
    match ring {
        Ring::Integers => Ring::Rationals,
        other => other,
    }
}

fn to_mon(m: &Monomial) -> Result<Mon> {
    let e = m
        .exponents()
        .iter()
        .map(|&x| u16::try_from(x).map_err(|_| Error::Unsupported(format!("exponent {x} too large"))))
        .collect::<Result<_>>()?;
    Ok(Mon::new(e))
}

fn from_mon(m: &Mon) -> Monomial {
    Monomial::from_exponents(m.e.iter().map(|&x| u32::from(x)).collect())
}

fn sort_desc<C>(order: MonomialOrder, mut p: Poly<C>) -> Poly<C> {
    p.sort_by(|a, b| engine::compare(order, &b.0, &a.0));
    p
}

fn to_int(order: MonomialOrder, f: &Polynomial) -> Result<Poly<BigInt>> {
    if f.is_zero() {
        return Ok(Vec::new());
    }
    let (_, _, prim) = f.integer_normalize()?;
    let terms = prim
        .terms()
        .map(|(m, c)| match c {
            Scalar::Int(v) => Ok((to_mon(m)?, v.clone())),
            _ => unreachable!("integer normalization yields integers"),
        })
        .collect::<Result<_>>()?;
    Ok(sort_desc(order, terms))
}

fn to_rat(order: MonomialOrder, f: &Polynomial) -> Result<Poly<BigRational>> {
    let terms = f.terms().map(|(m, c)| Ok((to_mon(m)?, c.to_rational()))).collect::<Result<_>>()?;
    Ok(sort_desc(order, terms))
}

fn to_mod(order: MonomialOrder, f: &Polynomial, p: u64) -> Result<Poly<u64>> {
    let ring = Ring::PrimeField(p);
    let terms = f
        .terms()
        .map(|(m, c)| match ring.coerce(c)? {
            Scalar::Mod(x) => Ok((to_mon(m)?, x.residue())),
            _ => unreachable!(),
        })
        .collect::<Result<_>>()?;
    Ok(sort_desc(order, terms))
}

fn from_rat(vars: &VariableSet, p: &Poly<BigRational>) -> Polynomial {
    Polynomial::from_terms(Ring::Rationals, vars, p.iter().map(|(m, c)| (from_mon(m), Scalar::Rat(c.clone()))))
        .expect("consistent arity")
}

fn from_mod(vars: &VariableSet, p: &Poly<u64>, prime: u64) -> Polynomial {
    Polynomial::from_terms(
        Ring::PrimeField(prime),
        vars,
        p.iter().map(|(m, c)| (from_mon(m), Scalar::Mod(Fp::new(*c, prime)))),
    )
    .expect("consistent arity")
}

/// Monic rational form of a primitive integer polynomial.
fn int_to_monic(vars: &VariableSet, p: &Poly<BigInt>) -> Polynomial {
    let lc = p[0].1.clone();
    let terms: Poly<BigRational> = p.iter().map(|(m, c)| (m.clone(), BigRational::new(c.clone(), lc.clone()))).collect();
    from_rat(vars, &terms)
}

fn check_inputs(ring: Ring, vars: &VariableSet, gens: &[Polynomial]) -> Result<Vec<Polynomial>> {
    gens.iter()
        .map(|g| {
            if g.vars() != vars {
                return Err(Error::VariableMismatch);
            }
            g.to_ring(ring)
        })
        .collect()
}

/// Runs Buchberger's algorithm. The first `known_gb` generators must already
/// form a Gröbner basis (of the ideal they generate) under `order`.
fn compute(
    ring: Ring,
    vars: &VariableSet,
    gens: &[Polynomial],
    known_gb: usize,
    order: MonomialOrder,
    options: &GroebnerOptions,
) -> Result<Vec<Polynomial>> {
    let cfg = engine::Config {
        order,
        gebauer_moller: options.gebauer_moller,
        max_reductions: options.max_reductions,
        progress: options.progress.as_deref().map(|f| f as &(dyn Fn(&Progress) + Sync)),
    };
    match ring {
        Ring::PrimeField(p) => {
            let input = gens.iter().map(|g| to_mod(order, g, p)).collect::<Result<_>>()?;
            let out = engine::buchberger(&ModDomain(p), &cfg, input, known_gb)?;
            Ok(out.iter().map(|g| from_mod(vars, g, p)).collect())
        }
        _ => {
            let input = gens.iter().map(|g| to_int(order, g)).collect::<Result<_>>()?;
            let out = engine::buchberger(&IntDomain, &cfg, input, known_gb)?;
            Ok(out.iter().map(|g| int_to_monic(vars, g)).collect())
        }
    }
}

/// A reduced Gröbner basis together with its order, ring and variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    ring: Ring,
    vars: VariableSet,
    polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    fn prepare(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.vars() != &self.vars {
            return Err(Error::VariableMismatch);
        }
        f.to_ring(self.ring)
    }

    /// Remainder of multivariate division by the basis; zero iff `f` is in the ideal.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        let f = self.prepare(f)?;
        let order = self.order;
        let usable = vec![true; self.polys.len()];
        Ok(match self.ring {
            Ring::PrimeField(p) => {
                let basis: Vec<_> = self.polys.iter().map(|g| to_mod(order, g, p)).collect::<Result<_>>()?;
                from_mod(&self.vars, &engine::reduce(&ModDomain(p), order, to_mod(order, &f, p)?, &basis, &usable), p)
            }
            _ => {
                let basis: Vec<_> = self.polys.iter().map(|g| to_rat(order, g)).collect::<Result<_>>()?;
                from_rat(&self.vars, &engine::reduce(&RatDomain, order, to_rat(order, &f)?, &basis, &usable))
            }
        })
    }

    /// Checks the remainder only up to a scalar, which is cheaper over `Q`.
    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        let f = self.prepare(f)?;
        if f.is_zero() {
            return Ok(true);
        }
        let order = self.order;
        let usable = vec![true; self.polys.len()];
        Ok(match self.ring {
            Ring::PrimeField(p) => {
                let basis: Vec<_> = self.polys.iter().map(|g| to_mod(order, g, p)).collect::<Result<_>>()?;
                engine::reduce(&ModDomain(p), order, to_mod(order, &f, p)?, &basis, &usable).is_empty()
            }
            _ => {
                let basis: Vec<_> = self.polys.iter().map(|g| to_int(order, g)).collect::<Result<_>>()?;
                engine::reduce(&IntDomain, order, to_int(order, &f)?, &basis, &usable).is_empty()
            }
        })
    }

    /// Like [`normal_form`](Self::normal_form) but insists on a matching order.
    pub fn normal_form_in(&self, f: &Polynomial, order: MonomialOrder) -> Result<Polynomial> {
        if order != self.order {
            return Err(Error::OrderMismatch { basis: self.order.to_string(), requested: order.to_string() });
        }
        self.normal_form(f)
    }

    /// Re-checks that every S-polynomial reduces to zero.
    pub fn verify(&self) -> Result<bool> {
        let order = self.order;
        Ok(match self.ring {
            Ring::PrimeField(p) => {
                let basis: Vec<_> = self.polys.iter().map(|g| to_mod(order, g, p)).collect::<Result<_>>()?;
                engine::is_groebner(&ModDomain(p), order, &basis)
            }
            _ => {
                let basis: Vec<_> = self.polys.iter().map(|g| to_int(order, g)).collect::<Result<_>>()?;
                engine::is_groebner(&IntDomain, order, &basis)
            }
        })
    }
}


/// Reduced Gröbner basis of the ideal generated by `gens` (all over the same
/// variables). Integer generators are read over `Q`.
pub fn groebner_basis(gens: &[Polynomial], order: MonomialOrder, options: &GroebnerOptions) -> Result<GroebnerBasis> {
    let first = gens.first().ok_or_else(|| Error::Invalid("no generators".into()))?;
    let (ring, vars) = (field_of(first.ring()), first.vars().clone());
    let gens = check_inputs(ring, &vars, gens)?;
    let polys = compute(ring, &vars, &gens, 0, order, options)?;
    Ok(GroebnerBasis { order, ring, vars, polys })
}

/// An ideal in a polynomial ring over `Q` or `F_p`, with bases cached per order.
pub struct Ideal {
    ring: Ring,
    vars: VariableSet,
    generators: Vec<Polynomial>,
    options: GroebnerOptions,
    cache_dir: Option<PathBuf>,
    bases: Mutex<HashMap<MonomialOrder, Arc<GroebnerBasis>>>,
}

impl Ideal {
    /// Integer generators are read over `Q`.
    pub fn new(ring: Ring, vars: &VariableSet, generators: Vec<Polynomial>) -> Result<Self> {
        let ring = field_of(ring);
        let generators = check_inputs(ring, vars, &generators)?;
        Ok(Ideal {
            ring,
            vars: vars.clone(),
            generators,
            options: GroebnerOptions::default(),
            cache_dir: None,
            bases: Mutex::new(HashMap::new()),
        })
    }

    /// Ideal generated by a nonempty list; ring and variables are taken from it.
    pub fn from_generators(generators: Vec<Polynomial>) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::Invalid("no generators".into()))?;
        let (ring, vars) = (first.ring(), first.vars().clone());
        Ideal::new(ring, &vars, generators)
    }

    pub fn with_options(mut self, options: GroebnerOptions) -> Self {
        self.options = options;
        self
    }

    /// Enables the on-disk basis cache in `dir`; `None` disables it.
    pub fn with_disk_cache(mut self, dir: Option<PathBuf>) -> Self {
        self.cache_dir = dir;
        self
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    fn cached_compute(
        &self,
        tag: &str,
        vars: &VariableSet,
        gens: &[Polynomial],
        known_gb: usize,
        order: MonomialOrder,
    ) -> Result<Vec<Polynomial>> {
        let key = self.cache_dir.as_ref().map(|_| cache_key(tag, order, self.ring, vars, gens));
        if let (Some(dir), Some(key)) = (&self.cache_dir, &key) {
            if let Some(polys) = cache::load(dir, key, order, self.ring, vars)? {
                return Ok(polys);
            }
        }
        let polys = if gens.iter().all(Polynomial::is_zero) {
            Vec::new()
        } else {
            compute(self.ring, vars, gens, known_gb, order, &self.options)?
        };
        if let (Some(dir), Some(key)) = (&self.cache_dir, &key) {
            cache::store(dir, key, order, self.ring, vars, &polys)?;
        }
        Ok(polys)
    }

    /// Reduced Gröbner basis under `order`, computed once and then shared.
    pub fn basis(&self, order: MonomialOrder) -> Result<Arc<GroebnerBasis>> {
        if let Some(b) = self.bases.lock().expect("basis cache").get(&order) {
            return Ok(b.clone());
        }
        let polys = self.cached_compute("basis", &self.vars, &self.generators, 0, order)?;
        let basis = Arc::new(GroebnerBasis { order, ring: self.ring, vars: self.vars.clone(), polys });
        self.bases.lock().expect("basis cache").insert(order, basis.clone());
        Ok(basis)
    }

    pub fn normal_form(&self, f: &Polynomial, order: MonomialOrder) -> Result<Polynomial> {
        self.basis(order)?.normal_form(f)
    }

    pub fn ideal_member(&self, f: &Polynomial) -> Result<bool> {
        self.ideal_member_in(f, MonomialOrder::GradedReverseLex)
    }

    pub fn ideal_member_in(&self, f: &Polynomial, order: MonomialOrder) -> Result<bool> {
        self.basis(order)?.contains(f)
    }

    /// `f ∈ rad(I)` iff `1 ∈ I + (1 - t·f)` with a fresh variable `t`. The
    /// cached basis of `I` seeds the extended computation.
    pub fn radical_member(&self, f: &Polynomial) -> Result<bool> {
        let order = MonomialOrder::GradedReverseLex;
        let f = f.to_ring(self.ring)?;
        if f.vars() != &self.vars {
            return Err(Error::VariableMismatch);
        }
        let base = self.basis(order)?;
        if base.is_unit() || base.contains(&f)? {
            return Ok(true);
        }
        let t = fresh_name(&self.vars);
        let ext = self.vars.extended(&[t.as_str()])?;
        let mut gens: Vec<Polynomial> = base.polys().iter().map(|g| g.extend_to(&ext)).collect::<Result<_>>()?;
        let known = gens.len();
        let tv = Polynomial::var(self.ring, &ext, ext.len() - 1);
        gens.push(&Polynomial::one(self.ring, &ext) - &(&tv * &f.extend_to(&ext)?));
        let polys = self.cached_compute("rabinowitsch", &ext, &gens, known, order)?;
        Ok(polys.len() == 1 && polys[0].is_constant() && !polys[0].is_zero())
    }
}

fn fresh_name(vars: &VariableSet) -> String {
    let mut name = "t".to_string();
    let mut k = 0;
    while vars.index_of(&name).is_some() {
        name = format!("t_{k}");
        k += 1;
    }
    name
}
