//! Buchberger's algorithm on a compact internal representation.
//!
//! Polynomials are vectors of `(Mon, C)` sorted strictly descending in the
//! active order, with no zero coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::poly::MonomialOrder;

pub(crate) type Exps = SmallVec<[u16; 16]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Mon {
    pub deg: u32,
    pub mask: u64,
    pub e: Exps,
}

impl Mon {
    pub fn new(e: Exps) -> Mon {
        let mut deg = 0;
        let mut mask = 0u64;
        for (i, &x) in e.iter().enumerate() {
            deg += u32::from(x);
            if x > 0 {
                mask |= 1 << (i % 64);
            }
        }
        Mon { deg, mask, e }
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn divides(&self, other: &Mon) -> bool {
        self.deg <= other.deg
            && self.mask & !other.mask == 0
            && self.e.iter().zip(&other.e).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Mon) -> Mon {
        Mon {
            deg: self.deg + other.deg,
            mask: self.mask | other.mask,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect(),
        }
    }

    /// `other / self`; `self` must divide `other`.
    pub fn quotient_of(&self, other: &Mon) -> Mon {
        Mon::new(other.e.iter().zip(&self.e).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Mon) -> Mon {
        Mon::new(self.e.iter().zip(&other.e).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Mon) -> bool {
        self.mask & other.mask == 0 || self.e.iter().zip(&other.e).all(|(a, b)| *a == 0 || *b == 0)
    }
}

pub(crate) fn compare(order: MonomialOrder, a: &Mon, b: &Mon) -> Ordering {
    match order {
        MonomialOrder::Lex => a.e.cmp(&b.e),
        MonomialOrder::GradedLex => a.deg.cmp(&b.deg).then_with(|| a.e.cmp(&b.e)),
        MonomialOrder::GradedReverseLex => a.deg.cmp(&b.deg).then_with(|| {
            for (x, y) in a.e.iter().zip(&b.e).rev() {
                if x != y {
                    return y.cmp(x);
                }
            }
            Ordering::Equal
        }),
    }
}

/// A key whose lexicographic order agrees with `order` on monomials.
fn sort_key(order: MonomialOrder, m: &Mon) -> Vec<i32> {
    let mut k = Vec::with_capacity(m.e.len() + 1);
    match order {
        MonomialOrder::Lex => k.extend(m.e.iter().map(|&x| i32::from(x))),
        MonomialOrder::GradedLex => {
            k.push(m.deg as i32);
            k.extend(m.e.iter().map(|&x| i32::from(x)));
        }
        MonomialOrder::GradedReverseLex => {
            k.push(m.deg as i32);
            k.extend(m.e.iter().rev().map(|&x| -i32::from(x)));
        }
    }
    k
}

pub(crate) type Poly<C> = Vec<(Mon, C)>;

/// Coefficient arithmetic used by the engine.
pub(crate) trait Domain {
    type C: Clone + PartialEq + Debug;

    fn is_zero(&self, c: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    /// `(s, t)` with `s·a = t·b`; `None` stands for `s = 1`.
    fn cancel(&self, a: &Self::C, b: &Self::C) -> (Option<Self::C>, Self::C);
    /// Scales `p` to its canonical associate.
    fn normalize(&self, p: &mut Poly<Self::C>);
    /// Optionally divides `a` and `b` by a common scalar.
    fn shrink(&self, _a: &mut Poly<Self::C>, _b: &mut Poly<Self::C>) {}
}

/// Fraction-free integer coefficients; polynomials are kept primitive.
pub(crate) struct IntDomain;

impl Domain for IntDomain {
    type C = BigInt;

    fn is_zero(&self, c: &BigInt) -> bool {
        c.is_zero()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn cancel(&self, a: &BigInt, b: &BigInt) -> (Option<BigInt>, BigInt) {
        let g = a.gcd(b);
        let (mut s, mut t) = (b / &g, a / &g);
        if s.is_negative() {
            s = -s;
            t = -t;
        }
        (if s.is_one() { None } else { Some(s) }, t)
    }

    fn normalize(&self, p: &mut Poly<BigInt>) {
        let Some(first) = p.first() else { return };
        let negative = first.1.is_negative();
        let mut g = BigInt::zero();
        for (_, c) in p.iter() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if negative {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in p.iter_mut() {
                *c = &*c / &g;
            }
        }
    }

    fn shrink(&self, a: &mut Poly<BigInt>, b: &mut Poly<BigInt>) {
        let mut g = BigInt::zero();
        for (_, c) in a.iter().chain(b.iter()) {
            g = g.gcd(c);
            if g.is_one() {
                return;
            }
        }
        if g.is_zero() {
            return;
        }
        for (_, c) in a.iter_mut().chain(b.iter_mut()) {
            *c = &*c / &g;
        }
    }
}

/// Residues modulo a word-sized prime; polynomials are kept monic.
pub(crate) struct ModDomain(pub u64);

impl ModDomain {
    fn inv(&self, a: u64) -> u64 {
        let p = self.0;
        let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = ((acc as u128 * base as u128) % p as u128) as u64;
            }
            base = ((base as u128 * base as u128) % p as u128) as u64;
            e >>= 1;
        }
        acc
    }
}

impl Domain for ModDomain {
    type C = u64;

    fn is_zero(&self, c: &u64) -> bool {
        *c == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.0 as u128) as u64
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    fn cancel(&self, a: &u64, b: &u64) -> (Option<u64>, u64) {
        (None, self.mul(a, &self.inv(*b)))
    }

    fn normalize(&self, p: &mut Poly<u64>) {
        let Some(first) = p.first() else { return };
        if first.1 == 1 {
            return;
        }
        let inv = self.inv(first.1);
        for (_, c) in p.iter_mut() {
            *c = self.mul(c, &inv);
        }
    }
}

/// Rational coefficients; polynomials are kept monic.
pub(crate) struct RatDomain;

impl Domain for RatDomain {
    type C = BigRational;

    fn is_zero(&self, c: &BigRational) -> bool {
        c.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn cancel(&self, a: &BigRational, b: &BigRational) -> (Option<BigRational>, BigRational) {
        (None, a / b)
    }

    fn normalize(&self, p: &mut Poly<BigRational>) {
        let Some(first) = p.first() else { return };
        if first.1.is_one() {
            return;
        }
        let inv = first.1.recip();
        for (_, c) in p.iter_mut() {
            *c = &*c * &inv;
        }
    }
}

/// `s·f - t·m·g`, merging two descending term lists.
fn combine<D: Domain>(
    d: &D,
    order: MonomialOrder,
    f: &[(Mon, D::C)],
    s: Option<&D::C>,
    t: &D::C,
    m: &Mon,
    g: &[(Mon, D::C)],
) -> Poly<D::C> {
    let mut out = Vec::with_capacity(f.len() + g.len());
    let neg_t = d.neg(t);
    let scale_f = |c: &D::C| match s {
        Some(s) => d.mul(s, c),
        None => c.clone(),
    };
    let mut gi = g.iter().map(|(gm, gc)| (m.mul(gm), d.mul(&neg_t, gc))).peekable();
    let mut fi = f.iter().peekable();
    loop {
        match (fi.peek(), gi.peek()) {
            (None, None) => break,
            (Some(_), None) => {
                let (fm, fc) = fi.next().unwrap();
                out.push((fm.clone(), scale_f(fc)));
            }
            (None, Some(_)) => out.push(gi.next().unwrap()),
            (Some((fm, _)), Some((gm, _))) => match compare(order, fm, gm) {
                Ordering::Greater => {
                    let (fm, fc) = fi.next().unwrap();
                    out.push((fm.clone(), scale_f(fc)));
                }
                Ordering::Less => out.push(gi.next().unwrap()),
                Ordering::Equal => {
                    let (fm, fc) = fi.next().unwrap();
                    let (_, gc) = gi.next().unwrap();
                    let c = d.add(&scale_f(fc), &gc);
                    if !d.is_zero(&c) {
                        out.push((fm.clone(), c));
                    }
                }
            },
        }
    }
    out
}

/// Picks the shortest basis element whose leading monomial divides `m`.
fn find_reducer<'a, C>(m: &Mon, basis: &'a [Poly<C>], usable: &[bool]) -> Option<&'a Poly<C>> {
    let mut best: Option<&Poly<C>> = None;
    for (g, &ok) in basis.iter().zip(usable) {
        if ok && g[0].0.divides(m) && best.is_none_or(|b| g.len() < b.len()) {
            best = Some(g);
        }
    }
    best
}

/// Full reduction of `f` modulo `basis` (entries with `usable[i]` only).
/// Over a field with the domain's `cancel` never scaling `f`, this is the
/// exact remainder; over the integers it is correct up to a nonzero scalar.
pub(crate) fn reduce<D: Domain>(
    d: &D,
    order: MonomialOrder,
    f: Poly<D::C>,
    basis: &[Poly<D::C>],
    usable: &[bool],
) -> Poly<D::C> {
    let mut rem: Poly<D::C> = Vec::new();
    let mut f = f;
    let mut start = 0;
    let mut steps = 0u32;
    while start < f.len() {
        let (m, a) = &f[start];
        match find_reducer(m, basis, usable) {
            Some(g) => {
                let (s, t) = d.cancel(a, &g[0].1);
                let q = g[0].0.quotient_of(m);
                let next = combine(d, order, &f[start + 1..], s.as_ref(), &t, &q, &g[1..]);
                if let Some(s) = &s {
                    for (_, c) in rem.iter_mut() {
                        *c = d.mul(s, c);
                    }
                }
                f = next;
                start = 0;
                steps += 1;
                if steps.is_multiple_of(16) {
                    d.shrink(&mut rem, &mut f);
                }
            }
            None => {
                rem.push(f[start].clone());
                start += 1;
            }
        }
    }
    rem
}

pub(crate) fn s_polynomial<D: Domain>(d: &D, order: MonomialOrder, f: &Poly<D::C>, g: &Poly<D::C>) -> Poly<D::C> {
    let l = f[0].0.lcm(&g[0].0);
    let mf = f[0].0.quotient_of(&l);
    let mg = g[0].0.quotient_of(&l);
    let (s, t) = d.cancel(&f[0].1, &g[0].1);
    let sf: Poly<D::C> = f[1..]
        .iter()
        .map(|(m, c)| (mf.mul(m), match &s {
            Some(s) => d.mul(s, c),
            None => c.clone(),
        }))
        .collect();
    combine(d, order, &sf, None, &t, &mg, &g[1..])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Progress {
    pub basis_size: usize,
    pub pending_pairs: usize,
    pub reductions: u64,
    pub zero_reductions: u64,
}

pub(crate) struct Config<'a> {
    pub order: MonomialOrder,
    pub gebauer_moller: bool,
    pub max_reductions: Option<u64>,
    pub progress: Option<&'a (dyn Fn(&Progress) + Sync)>,
}

struct State<D: Domain> {
    basis: Vec<Poly<D::C>>,
    /// Elements still used to form new pairs.
    active: Vec<bool>,
    queue: BTreeSet<(Vec<i32>, usize, usize)>,
    pending: HashSet<(usize, usize)>,
}

impl<D: Domain> State<D> {
    fn push_pair(&mut self, order: MonomialOrder, i: usize, j: usize) {
        let l = self.basis[i][0].0.lcm(&self.basis[j][0].0);
        let (i, j) = (i.min(j), i.max(j));
        self.queue.insert((sort_key(order, &l), j, i));
        self.pending.insert((i, j));
    }

    fn is_pending(&self, i: usize, j: usize) -> bool {
        self.pending.contains(&(i.min(j), i.max(j)))
    }

    /// Buchberger's chain criterion for the pair `(i, j)`.
    fn chain_criterion(&self, i: usize, j: usize) -> bool {
        let l = self.basis[i][0].0.lcm(&self.basis[j][0].0);
        (0..self.basis.len()).any(|k| {
            k != i
                && k != j
                && self.basis[k][0].0.divides(&l)
                && !self.is_pending(i, k)
                && !self.is_pending(j, k)
        })
    }

    fn insert_plain(&mut self, order: MonomialOrder, h: Poly<D::C>) {
        let idx = self.basis.len();
        self.basis.push(h);
        self.active.push(true);
        for i in 0..idx {
            if !self.basis[i][0].0.coprime(&self.basis[idx][0].0) {
                self.push_pair(order, i, idx);
            }
        }
    }

    /// The Gebauer–Möller update.
    fn insert_gm(&mut self, order: MonomialOrder, h: Poly<D::C>) {
        let idx = self.basis.len();
        let lh = h[0].0.clone();
        self.basis.push(h);
        self.active.push(true);
        let cands: Vec<(usize, Mon)> = (0..idx)
            .filter(|&i| self.active[i])
            .map(|i| (i, self.basis[i][0].0.lcm(&lh)))
            .collect();
        let mut kept: Vec<(usize, Mon)> = Vec::new();
        for (pos, (i, l)) in cands.iter().enumerate() {
            let coprime = self.basis[*i][0].0.coprime(&lh);
            let dominated = cands[pos + 1..].iter().any(|(_, l2)| l2.divides(l))
                || kept.iter().any(|(_, l2)| l2.divides(l));
            if coprime || !dominated {
                kept.push((*i, l.clone()));
            }
        }
        let old: Vec<(Vec<i32>, usize, usize)> = self.queue.iter().cloned().collect();
        for entry in old {
            let (_, j, i) = entry;
            let l = self.basis[i][0].0.lcm(&self.basis[j][0].0);
            if lh.divides(&l)
                && self.basis[i][0].0.lcm(&lh) != l
                && self.basis[j][0].0.lcm(&lh) != l
            {
                self.queue.remove(&entry);
                self.pending.remove(&(i, j));
            }
        }
        for (i, _) in kept {
            if !self.basis[i][0].0.coprime(&lh) {
                self.push_pair(order, i, idx);
            }
        }
        for i in 0..idx {
            if self.active[i] && lh.divides(&self.basis[i][0].0) {
                self.active[i] = false;
            }
        }
    }
}

/// Computes a Gröbner basis of the ideal generated by `gens`. The first
/// `known_gb` entries are assumed to form a Gröbner basis already, so pairs
/// among them are skipped. Returns the reduced basis, sorted by leading
/// monomial ascending.
pub(crate) fn buchberger<D: Domain>(
    d: &D,
    cfg: &Config<'_>,
    gens: Vec<Poly<D::C>>,
    known_gb: usize,
) -> Result<Vec<Poly<D::C>>> {
    let order = cfg.order;
    let mut st: State<D> =
        State { basis: Vec::new(), active: Vec::new(), queue: BTreeSet::new(), pending: HashSet::new() };
    let mut progress = Progress::default();
    let mut rest = Vec::new();
    for (k, mut g) in gens.into_iter().enumerate() {
        if g.is_empty() {
            continue;
        }
        d.normalize(&mut g);
        if k < known_gb {
            st.basis.push(g);
            st.active.push(true);
        } else {
            rest.push(g);
        }
    }
    for g in rest {
        let all = vec![true; st.basis.len()];
        let mut h = reduce(d, order, g, &st.basis, &all);
        if h.is_empty() {
            continue;
        }
        d.normalize(&mut h);
        if h[0].0.is_one() {
            return Ok(vec![h]);
        }
        if cfg.gebauer_moller {
            st.insert_gm(order, h);
        } else {
            st.insert_plain(order, h);
        }
    }
    while let Some(entry) = st.queue.pop_first() {
        let (_, j, i) = entry;
        st.pending.remove(&(i, j));
        if !cfg.gebauer_moller && st.chain_criterion(i, j) {
            continue;
        }
        if let Some(max) = cfg.max_reductions {
            if progress.reductions >= max {
                return Err(Error::BudgetExceeded(max));
            }
        }
        let s = s_polynomial(d, order, &st.basis[i], &st.basis[j]);
        let all = vec![true; st.basis.len()];
        let mut h = reduce(d, order, s, &st.basis, &all);
        d.normalize(&mut h);
        progress.reductions += 1;
        if h.is_empty() {
            progress.zero_reductions += 1;
        } else if h[0].0.is_one() {
            return Ok(vec![h]);
        } else if cfg.gebauer_moller {
            st.insert_gm(order, h);
        } else {
            st.insert_plain(order, h);
        }
        if let Some(cb) = cfg.progress {
            progress.basis_size = st.basis.len();
            progress.pending_pairs = st.queue.len();
            cb(&progress);
        }
    }
    Ok(reduce_basis(d, order, st.basis))
}

/// Minimalises and interreduces a Gröbner basis.
pub(crate) fn reduce_basis<D: Domain>(d: &D, order: MonomialOrder, basis: Vec<Poly<D::C>>) -> Vec<Poly<D::C>> {
    let mut basis: Vec<Poly<D::C>> = basis.into_iter().filter(|g| !g.is_empty()).collect();
    basis.sort_by(|a, b| compare(order, &a[0].0, &b[0].0).then_with(|| a.len().cmp(&b.len())));
    let mut minimal: Vec<Poly<D::C>> = Vec::new();
    for g in basis {
        if !minimal.iter().any(|m| m[0].0.divides(&g[0].0)) {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let usable: Vec<bool> = (0..minimal.len()).map(|i| i != k).collect();
        let mut g = minimal[k].clone();
        let head = g.remove(0);
        let mut tail = reduce_tail(d, order, g, &minimal, &usable);
        let mut full = vec![head];
        if let Some(s) = tail.0 {
            full[0].1 = d.mul(&s, &full[0].1);
        }
        full.append(&mut tail.1);
        d.normalize(&mut full);
        out.push(full);
    }
    out
}

/// Reduces a tail, returning the scalar it was multiplied by (integers only)
/// so that the head can be rescaled consistently.
fn reduce_tail<D: Domain>(
    d: &D,
    order: MonomialOrder,
    f: Poly<D::C>,
    basis: &[Poly<D::C>],
    usable: &[bool],
) -> (Option<D::C>, Poly<D::C>) {
    let mut rem: Poly<D::C> = Vec::new();
    let mut factor: Option<D::C> = None;
    let mut f = f;
    let mut start = 0;
    while start < f.len() {
        let (m, a) = &f[start];
        match find_reducer(m, basis, usable) {
            Some(g) => {
                let (s, t) = d.cancel(a, &g[0].1);
                let q = g[0].0.quotient_of(m);
                let next = combine(d, order, &f[start + 1..], s.as_ref(), &t, &q, &g[1..]);
                if let Some(s) = &s {
                    for (_, c) in rem.iter_mut() {
                        *c = d.mul(s, c);
                    }
                    factor = Some(match factor {
                        Some(fac) => d.mul(&fac, s),
                        None => s.clone(),
                    });
                }
                f = next;
                start = 0;
            }
            None => {
                rem.push(f[start].clone());
                start += 1;
            }
        }
    }
    (factor, rem)
}

/// Checks that every S-polynomial of `basis` reduces to zero.
pub(crate) fn is_groebner<D: Domain>(d: &D, order: MonomialOrder, basis: &[Poly<D::C>]) -> bool {
    let all = vec![true; basis.len()];
    for j in 0..basis.len() {
        for i in 0..j {
            if basis[i][0].0.coprime(&basis[j][0].0) {
                continue;
            }
            let s = s_polynomial(d, order, &basis[i], &basis[j]);
            if !reduce(d, order, s, basis, &all).is_empty() {
                return false;
            }
        }
    }
    true
}
