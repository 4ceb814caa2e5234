//! Exact elements of Q(ζ_{p^∞}) ⊗ T, used for values of the additive character ψ.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::lfactor_symbolic::LaurentRational;
use crate::padic_base::{qpow, residue_mod, val, Q};

/// Coefficient ring for phase sums.
pub trait Coef: Clone + PartialEq + std::fmt::Debug {
    fn zero_c() -> Self;
    fn one_c() -> Self;
    fn is_zero_c(&self) -> bool;
    fn add_c(&self, o: &Self) -> Self;
    fn mul_c(&self, o: &Self) -> Self;
    fn neg_c(&self) -> Self;
    fn from_q(x: &Q) -> Self;
}

impl Coef for Q {
    fn zero_c() -> Self {
        Q::zero()
    }
    fn one_c() -> Self {
        Q::one()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
}

impl Coef for LaurentRational {
    fn zero_c() -> Self {
        LaurentRational::zero()
    }
    fn one_c() -> Self {
        LaurentRational::one()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn mul_c(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_c(&self) -> Self {
        self.neg()
    }
    fn from_q(x: &Q) -> Self {
        LaurentRational::constant(x.clone())
    }
}

/// Σ_r c_r ζ^r with ζ = exp(2πi/p^level), kept in the canonical basis
/// {ζ^r : r < (p−1)p^{level−1}} at the smallest possible level.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSum<T: Coef> {
    pub p: u64,
    pub level: u32,
    pub terms: BTreeMap<u64, T>,
}

pub type Cyclo = PhaseSum<Q>;

fn pp(p: u64, k: u32) -> u64 {
    p.pow(k)
}

impl<T: Coef> PhaseSum<T> {
    pub fn zero(p: u64) -> Self {
        Self { p, level: 0, terms: BTreeMap::new() }
    }

    pub fn constant(p: u64, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero_c() {
            terms.insert(0, c);
        }
        Self { p, level: 0, terms }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, T::one_c())
    }

    /// ψ(x)·c, where ψ is trivial on Z_p and ψ(p^{−k}) = exp(2πi/p^k).
    pub fn psi_times(p: u64, x: &Q, c: T) -> Self {
        let v = val(x, p);
        if v >= 0 {
            return Self::constant(p, c);
        }
        let level = (-v) as u32;
        let r = residue_mod(&(x * qpow(p, -v)), p, level);
        let mut terms = BTreeMap::new();
        terms.insert(r, c);
        Self { p, level, terms }.canonical()
    }

    pub fn psi(p: u64, x: &Q) -> Self {
        Self::psi_times(p, x, T::one_c())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is a plain element of T.
    pub fn as_base(&self) -> Option<T> {
        if self.level == 0 {
            Some(self.terms.get(&0).cloned().unwrap_or_else(T::zero_c))
        } else {
            None
        }
    }

    fn lift(&self, level: u32) -> BTreeMap<u64, T> {
        let f = pp(self.p, level - self.level);
        self.terms.iter().map(|(r, c)| (r * f, c.clone())).collect()
    }

    fn canonical(mut self) -> Self {
        loop {
            if self.level == 0 {
                self.terms.retain(|_, c| !c.is_zero_c());
                return self;
            }
            let p = self.p;
            let big = pp(p, self.level - 1);
            let bound = (p - 1) * big;
            let mut out: BTreeMap<u64, T> = BTreeMap::new();
            for (r, c) in std::mem::take(&mut self.terms) {
                if r < bound {
                    add_into(&mut out, r, &c);
                } else {
                    let s = r - bound;
                    let nc = c.neg_c();
                    for k in 0..p - 1 {
                        add_into(&mut out, s + k * big, &nc);
                    }
                }
            }
            out.retain(|_, c| !c.is_zero_c());
            if out.keys().all(|r| r % p == 0) {
                self.terms = out.into_iter().map(|(r, c)| (r / p, c)).collect();
                self.level -= 1;
            } else {
                self.terms = out;
                return self;
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let level = self.level.max(o.level);
        let mut terms = self.lift(level);
        for (r, c) in o.lift(level) {
            add_into(&mut terms, r, &c);
        }
        Self { p: self.p, level, terms }.canonical()
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            level: self.level,
            terms: self.terms.iter().map(|(r, c)| (*r, c.neg_c())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let level = self.level.max(o.level);
        let modulus = pp(self.p, level);
        let a = self.lift(level);
        let b = o.lift(level);
        let mut terms = BTreeMap::new();
        for (r, c) in &a {
            for (s, d) in &b {
                add_into(&mut terms, (r + s) % modulus, &c.mul_c(d));
            }
        }
        Self { p: self.p, level, terms }.canonical()
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero_c() {
            return Self::zero(self.p);
        }
        Self {
            p: self.p,
            level: self.level,
            terms: self.terms.iter().map(|(r, x)| (*r, x.mul_c(c))).collect(),
        }
        .canonical()
    }

    /// Apply a coefficient map that respects the ring structure.
    pub fn map<U: Coef>(&self, mut f: impl FnMut(&T) -> U) -> PhaseSum<U> {
        PhaseSum {
            p: self.p,
            level: self.level,
            terms: self.terms.iter().map(|(r, c)| (*r, f(c))).collect(),
        }
        .canonical()
    }
}

fn add_into<T: Coef>(m: &mut BTreeMap<u64, T>, r: u64, c: &T) {
    match m.get_mut(&r) {
        Some(x) => *x = x.add_c(c),
        None => {
            m.insert(r, c.clone());
        }
    }
}

impl Cyclo {
    pub fn rational(p: u64, x: Q) -> Self {
        Self::constant(p, x)
    }

    pub fn to_laurent(&self) -> PhaseSum<LaurentRational> {
        self.map(|c| LaurentRational::constant(c.clone()))
    }

    /// Real and imaginary parts as floats; for display only.
    pub fn approx(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let n = pp(self.p, self.level) as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (r, c) in &self.terms {
            let th = 2.0 * std::f64::consts::PI * (*r as f64) / n;
            let cf = c.to_f64().unwrap_or(f64::NAN);
            re += cf * th.cos();
            im += cf * th.sin();
        }
        (re, im)
    }
}

impl PhaseSum<LaurentRational> {
    pub fn times_cyclo(&self, c: &Cyclo) -> Self {
        self.mul(&c.to_laurent())
    }
}

impl std::fmt::Display for Cyclo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.level == 0 {
            let c = self.as_base().unwrap();
            return write!(f, "{}", crate::padic_base::q_to_string(&c));
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, c)| format!("{}*z{}^{}", crate::padic_base::q_to_string(c), pp(self.p, self.level), r))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
