//! Keller and strong Keller predicates.
//!
//! A map over `F_p` is tested against a finite list of integer polynomials
//! known to vanish on every integer Keller map. A nonzero value refutes the
//! strong Keller property; vanishing on a partial list does not establish it,
//! which is why [`Outcome`] has three values.

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{Ring, Scalar};
use crate::error::{Error, Result};
use crate::keller::{GeneratorSet, KellerSystem};
use crate::poly::{Monomial, Polynomial};
use crate::polymap::PolyMap;

/// `det Jac(F) = 1` exactly in the ring of `F`.
pub fn keller_check(f: &PolyMap) -> bool {
    f.det_jacobian().is_one()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// `witness` (in display names) takes the nonzero `value` at `v(F)`.
    Fails { witness: String, value: u64 },
    /// Every equation and every generator of the set vanishes.
    PassesKnownGenerators { generators: usize },
    /// As above, with `p` beyond the recorded lcm bound.
    Certified { generators: usize },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub p: u64,
    pub n: usize,
    pub d: u32,
    pub generator_hash: String,
    pub nd_bound: String,
    /// The map actually checked, after normalising the affine part.
    pub normalized_map: String,
}

impl Verdict {
    pub fn fails(&self) -> bool {
        matches!(self.outcome, Outcome::Fails { .. })
    }
}

/// Checks `f` over `F_p` against the `E_α` of `system` and the generators of `set`.
///
/// A map whose affine part is invertible but not the identity is replaced by
/// `A⁻¹∘F` first. The outcome is [`Outcome::Certified`] when everything
/// vanishes and `p` exceeds the lcm of the recorded denominators.
pub fn strong_keller_check(f: &PolyMap, system: &KellerSystem, set: &GeneratorSet) -> Result<Verdict> {
    let Ring::PrimeField(p) = f.ring() else {
        return Err(Error::Unsupported(format!("strong Keller check needs a prime field, got {}", f.ring())));
    };
    if f.dim() != system.n() || f.vars().len() != system.n() {
        return Err(Error::ArityMismatch { expected: system.n(), got: f.dim() });
    }
    if f.degree() > system.d() {
        return Err(Error::DegreeExceeded { degree: f.degree(), bound: system.d() });
    }
    let g = if f.has_identity_affine_part() { f.clone() } else { f.normalize_affine()? };
    let v = system.coefficient_vector(&g)?;
    let nd = set.nd_bound();
    let verdict = |outcome| Verdict {
        outcome,
        p,
        n: system.n(),
        d: system.d(),
        generator_hash: set.hash(),
        nd_bound: nd.to_string(),
        normalized_map: g.to_string(),
    };
    let equations = system.equations().iter().map(|e| &e.poly);
    let generators = set.certificates.iter().map(|c| &c.generator);
    for poly in equations.chain(generators) {
        let value = evaluate_mod_p(poly, &v, p)?;
        if value != 0 {
            let witness = system.to_display(&poly.reduce_mod_p(p)?)?.to_string();
            return Ok(verdict(Outcome::Fails { witness, value }));
        }
    }
    let generators = system.equations().len() + set.len();
    if BigInt::from(p) > nd {
        Ok(verdict(Outcome::Certified { generators }))
    } else {
        Ok(verdict(Outcome::PassesKnownGenerators { generators }))
    }
}

fn evaluate_mod_p(poly: &Polynomial, point: &[Scalar], p: u64) -> Result<u64> {
    match poly.reduce_mod_p(p)?.evaluate(point)? {
        Scalar::Mod(x) => Ok(x.residue()),
        other => Err(Error::RingMismatch(other.ring().to_string(), format!("F_{p}"))),
    }
}

/// Search parameters for [`bounded_lift`].
#[derive(Clone, Copy, Debug)]
pub struct LiftOptions {
    /// Coefficients of the lift lie in `[-bound, bound]`.
    pub bound: u64,
    /// Maximum number of search nodes before [`Error::BudgetExceeded`].
    pub budget: u64,
}

struct Slot {
    component: usize,
    monomial: Monomial,
    /// Integers congruent to the coefficient, by absolute value.
    candidates: Vec<i64>,
    /// Whether the coefficient bound and the search level apply.
    bounded: bool,
}

/// Searches for `F` over `Z` with `F mod p = f` and `det Jac F = 1`,
/// supported on monomials of degree at most `deg f`. Coefficients of degree
/// at least 2 lie in `[-C, C]`; affine coefficients in `[-max(C,1), max(C,1)]`.
///
/// Candidates are tried by increasing max-norm. Slots are filled in order of
/// monomial degree; once all slots of degree at most `k + 1` are fixed, the
/// part of `det Jac F` of degree at most `k` is final and is checked.
/// `Ok(None)` means the search space was exhausted.
pub fn bounded_lift(f: &PolyMap, options: LiftOptions) -> Result<Option<PolyMap>> {
    let Ring::PrimeField(p) = f.ring() else {
        return Err(Error::Unsupported("bounded lift needs a map over a prime field".into()));
    };
    let c = i64::try_from(options.bound).map_err(|_| Error::Invalid("coefficient bound too large".into()))?;
    let n = f.dim();
    let vars = f.vars().clone();
    let deg = f.degree().max(1);
    let mut slots = Vec::new();
    for d in 0..=deg {
        for component in 0..n {
            for exps in crate::keller::monomials_of_degree(vars.len(), d) {
                let monomial = Monomial::from_exponents(exps);
                let Scalar::Mod(r) = f.component(component).coefficient(&monomial) else { unreachable!() };
                let r = r.residue() as i64;
                let p = p as i64;
                let range = if d >= 2 { c } else { c.max(1) };
                let mut candidates: Vec<i64> = (-range..=range).filter(|v| v.rem_euclid(p) == r).collect();
                candidates.sort_by_key(|v| (v.abs(), *v < 0));
                if candidates.is_empty() {
                    return Ok(None);
                }
                slots.push(Slot { component, monomial, candidates, bounded: d >= 2 });
            }
        }
    }
    // End index of each degree layer, with that degree.
    let mut layer_end: Vec<(usize, u32)> = Vec::new();
    for (i, s) in slots.iter().enumerate() {
        if i + 1 == slots.len() || slots[i + 1].monomial.degree() != s.monomial.degree() {
            layer_end.push((i + 1, s.monomial.degree()));
        }
    }
    let mut search = LiftSearch { slots: &slots, layer_end: &layer_end, vars: &vars, n, budget: options.budget, nodes: 0 };
    let floor = slots.iter().filter(|s| s.bounded).map(|s| s.candidates[0].abs()).max().unwrap_or(0);
    for level in floor..=c {
        let mut chosen = Vec::with_capacity(slots.len());
        if let Some(found) = search.descend(level, &mut chosen)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

struct LiftSearch<'a> {
    slots: &'a [Slot],
    layer_end: &'a [(usize, u32)],
    vars: &'a crate::poly::VariableSet,
    n: usize,
    budget: u64,
    nodes: u64,
}

impl LiftSearch<'_> {
    fn build(&self, chosen: &[i64]) -> Result<PolyMap> {
        let ring = Ring::Integers;
        let mut comps = vec![Polynomial::zero(ring, self.vars); self.n];
        for (slot, &v) in self.slots.iter().zip(chosen) {
            if v != 0 {
                let t = Polynomial::from_terms(ring, self.vars, [(slot.monomial.clone(), ring.from_i64(v))])?;
                comps[slot.component] = &comps[slot.component] + &t;
            }
        }
        PolyMap::new(comps)
    }

    /// Whether the part of `det Jac` of degree at most `upto` equals 1.
    fn low_part_ok(&self, chosen: &[i64], upto: u32) -> Result<bool> {
        let det = self.build(chosen)?.det_jacobian();
        let ok = det.terms().filter(|(m, _)| m.degree() <= upto).all(|(m, s)| if m.is_one() { s.is_one() } else { s.is_zero() });
        Ok(ok && !det.constant_term().is_zero())
    }

    fn descend(&mut self, level: i64, chosen: &mut Vec<i64>) -> Result<Option<PolyMap>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let i = chosen.len();
        if let Some(&(_, d)) = self.layer_end.iter().find(|(end, _)| *end == i) {
            if d >= 1 && !self.low_part_ok(chosen, d - 1)? {
                return Ok(None);
            }
        }
        if i == self.slots.len() {
            // Each level only reports lifts that reach it, so no lift is seen twice.
            let reached = self.slots.iter().zip(chosen.iter()).any(|(s, v)| s.bounded && v.abs() == level);
            if reached || level == 0 {
                let map = self.build(chosen)?;
                if keller_check(&map) {
                    return Ok(Some(map));
                }
            }
            return Ok(None);
        }
        let slot = &self.slots[i];
        for &v in &slot.candidates {
            if slot.bounded && v.abs() > level {
                break;
            }
            chosen.push(v);
            let found = self.descend(level, chosen)?;
            chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}
