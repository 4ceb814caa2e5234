//! The base field Q_p modelled by rationals, the quadratic étale algebra E,
//! and unramified characters.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `p^k` for any integer `k`.
pub fn qpow(p: u64, k: i64) -> Q {
    let base = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Q::from_integer(base)
    } else {
        Q::new(BigInt::one(), base)
    }
}

pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Schema(format!("bad rational '{s}'")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::Schema(format!("zero denominator in '{s}'")));
            }
            Ok(Q::new(parse_int(a)?, den))
        }
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn int_val(n: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (d, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        n = d;
        k += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }
}

pub fn valuation(x: &Q, p: u64) -> Valuation {
    if x.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(int_val(x.numer(), p) - int_val(x.denom(), p))
    }
}

/// Valuation with zero sent to a large sentinel, for internal comparisons.
pub const VAL_INF: i64 = i64::MAX / 4;

pub fn val(x: &Q, p: u64) -> i64 {
    valuation(x, p).finite().unwrap_or(VAL_INF)
}

pub fn vmin<'a>(xs: impl IntoIterator<Item = &'a Q>, p: u64) -> i64 {
    xs.into_iter().map(|x| val(x, p)).min().unwrap_or(VAL_INF)
}

/// Unit part `x / p^{v(x)}` reduced mod `p^k`, as a residue in `[0, p^k)`.
pub fn unit_residue(x: &Q, p: u64, k: u32) -> u64 {
    let v = val(x, p);
    let u = x / qpow(p, v);
    residue_mod(&u, p, k)
}

/// Residue of a p-integral rational modulo `p^k`.
pub fn residue_mod(x: &Q, p: u64, k: u32) -> u64 {
    let m = BigInt::from(p).pow(k);
    let num = x.numer().mod_floor(&m);
    let den = x.denom().mod_floor(&m);
    let inv = mod_inverse(&den, &m).expect("denominator must be prime to p");
    ((num * inv).mod_floor(&m)).to_u64().unwrap()
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Legendre symbol (a/p) for odd prime p, with 0 for multiples of p.
pub fn legendre(a: i64, p: u64) -> i64 {
    let pi = p as i64;
    let a = a.rem_euclid(pi);
    if a == 0 {
        return 0;
    }
    let e = (p - 1) / 2;
    let mut r: u128 = 1;
    let mut b = a as u128;
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p as u128;
        }
        b = b * b % p as u128;
        k >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaleType {
    Split,
    Inert,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseField {
    pub p: u64,
    pub etale: EtaleType,
    /// Smallest positive quadratic non-residue mod p; E = Q(√d) when inert.
    pub d: i64,
}

impl BaseField {
    pub fn new(p: u64, etale: EtaleType) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Config(format!("p = {p} is not prime")));
        }
        if p == 2 {
            return Err(Error::Config("p = 2 is not supported; choose an odd prime".into()));
        }
        let d = (2..p as i64).find(|&a| legendre(a, p) == -1).unwrap();
        Ok(BaseField { p, etale, d })
    }

    pub fn inert(p: u64) -> Result<Self> {
        Self::new(p, EtaleType::Inert)
    }

    pub fn split(p: u64) -> Result<Self> {
        Self::new(p, EtaleType::Split)
    }

    pub fn eta(&self) -> UnramifiedCharacter {
        UnramifiedCharacter::eta(self)
    }

    pub fn eta_sign(&self) -> i64 {
        match self.etale {
            EtaleType::Split => 1,
            EtaleType::Inert => -1,
        }
    }

    pub fn val(&self, x: &Q) -> i64 {
        val(x, self.p)
    }

    pub fn ppow(&self, k: i64) -> Q {
        qpow(self.p, k)
    }

    pub fn etale_kind(&self) -> EtaleKind {
        match self.etale {
            EtaleType::Split => EtaleKind::Split,
            EtaleType::Inert => EtaleKind::Inert(self.d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharLabel {
    Xi,
    Eta,
    Mu,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnramifiedCharacter {
    pub value_at_p: Q,
    pub label: CharLabel,
}

impl UnramifiedCharacter {
    pub fn new(value_at_p: Q, label: CharLabel) -> Result<Self> {
        if value_at_p.is_zero() {
            return Err(Error::Config("character value at p must be nonzero".into()));
        }
        Ok(Self { value_at_p, label })
    }

    pub fn trivial() -> Self {
        Self { value_at_p: Q::one(), label: CharLabel::Xi }
    }

    pub fn eta(base: &BaseField) -> Self {
        Self { value_at_p: q(base.eta_sign()), label: CharLabel::Eta }
    }

    /// χ(x) = value_at_p^{v_p(x)}.
    pub fn eval_at(&self, x: &Q, p: u64) -> Result<Q> {
        match valuation(x, p) {
            Valuation::Infinite => Err(Error::Domain("character undefined at zero".into())),
            Valuation::Finite(k) => Ok(self.at_valuation(k)),
        }
    }

    pub fn at_valuation(&self, k: i64) -> Q {
        qpow_q(&self.value_at_p, k)
    }

    pub fn pow(&self, k: i64) -> Self {
        Self { value_at_p: qpow_q(&self.value_at_p, k), label: CharLabel::Derived }
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { value_at_p: &self.value_at_p * &other.value_at_p, label: CharLabel::Derived }
    }
}

pub fn qpow_q(x: &Q, k: i64) -> Q {
    let mut r = Q::one();
    for _ in 0..k.unsigned_abs() {
        r *= x;
    }
    if k < 0 {
        r.recip()
    } else {
        r
    }
}

pub fn char_eval(chi: &UnramifiedCharacter, x: &Q, base: &BaseField) -> Result<Q> {
    chi.eval_at(x, base.p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EtaleKind {
    Split,
    /// E = Q(√d)
    Inert(i64),
}

/// Element of E: `(a, b)` is the pair `(x1, x2)` when split and `a + b√d` when inert.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EtaleScalar {
    pub a: Q,
    pub b: Q,
    pub kind: EtaleKind,
}

impl EtaleScalar {
    pub fn new(a: Q, b: Q, kind: EtaleKind) -> Self {
        Self { a, b, kind }
    }

    pub fn from_q(x: Q, kind: EtaleKind) -> Self {
        match kind {
            EtaleKind::Split => Self::new(x.clone(), x, kind),
            EtaleKind::Inert(_) => Self::new(x, Q::zero(), kind),
        }
    }

    pub fn zero(kind: EtaleKind) -> Self {
        Self::from_q(Q::zero(), kind)
    }

    pub fn one(kind: EtaleKind) -> Self {
        Self::from_q(Q::one(), kind)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.a + &o.a, &self.b + &o.b, self.kind)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.a - &o.a, &self.b - &o.b, self.kind)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, self.kind)
    }

    pub fn mul(&self, o: &Self) -> Self {
        match self.kind {
            EtaleKind::Split => Self::new(&self.a * &o.a, &self.b * &o.b, self.kind),
            EtaleKind::Inert(d) => Self::new(
                &self.a * &o.a + q(d) * &self.b * &o.b,
                &self.a * &o.b + &self.b * &o.a,
                self.kind,
            ),
        }
    }

    pub fn scale(&self, x: &Q) -> Self {
        Self::new(&self.a * x, &self.b * x, self.kind)
    }

    pub fn conj(&self) -> Self {
        match self.kind {
            EtaleKind::Split => Self::new(self.b.clone(), self.a.clone(), self.kind),
            EtaleKind::Inert(_) => Self::new(self.a.clone(), -&self.b, self.kind),
        }
    }

    pub fn norm(&self) -> Q {
        match self.kind {
            EtaleKind::Split => &self.a * &self.b,
            EtaleKind::Inert(d) => &self.a * &self.a - q(d) * &self.b * &self.b,
        }
    }

    pub fn trace(&self) -> Q {
        match self.kind {
            EtaleKind::Split => &self.a + &self.b,
            EtaleKind::Inert(_) => q(2) * &self.a,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.kind {
            EtaleKind::Split => {
                if self.a.is_zero() || self.b.is_zero() {
                    Err(Error::Domain(format!(
                        "zero divisor ({}, {}) is not invertible",
                        q_to_string(&self.a),
                        q_to_string(&self.b)
                    )))
                } else {
                    Ok(Self::new(self.a.recip(), self.b.recip(), self.kind))
                }
            }
            EtaleKind::Inert(_) => {
                let n = self.norm();
                if n.is_zero() {
                    Err(Error::Domain("zero is not invertible".into()))
                } else {
                    Ok(self.conj().scale(&n.recip()))
                }
            }
        }
    }

    /// The rational value when the element lies in the diagonal copy of F.
    pub fn as_rational(&self) -> Option<Q> {
        match self.kind {
            EtaleKind::Split => (self.a == self.b).then(|| self.a.clone()),
            EtaleKind::Inert(_) => self.b.is_zero().then(|| self.a.clone()),
        }
    }

    /// √d (inert) or (1, −1) (split): a fixed purely imaginary unit.
    pub fn imaginary_unit(kind: EtaleKind) -> Self {
        match kind {
            EtaleKind::Split => Self::new(Q::one(), -Q::one(), kind),
            EtaleKind::Inert(_) => Self::new(Q::zero(), Q::one(), kind),
        }
    }
}

impl fmt::Display for EtaleScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EtaleKind::Split => write!(f, "({}, {})", q_to_string(&self.a), q_to_string(&self.b)),
            EtaleKind::Inert(d) => {
                write!(f, "{} + {}·√{}", q_to_string(&self.a), q_to_string(&self.b), d)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaleOp {
    Add,
    Mul,
    Conj,
    Norm,
    Inv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaleValue {
    Scalar(EtaleScalar),
    Rational(Q),
}

pub fn etale_ops(a: &EtaleScalar, b: &EtaleScalar, op: EtaleOp) -> Result<EtaleValue> {
    Ok(match op {
        EtaleOp::Add => EtaleValue::Scalar(a.add(b)),
        EtaleOp::Mul => EtaleValue::Scalar(a.mul(b)),
        EtaleOp::Conj => EtaleValue::Scalar(a.conj()),
        EtaleOp::Norm => EtaleValue::Rational(a.norm()),
        EtaleOp::Inv => EtaleValue::Scalar(a.inv()?),
    })
}

pub fn is_integral(x: &Q, p: u64) -> bool {
    val(x, p) >= 0
}

pub fn sign_of(x: &Q) -> i64 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
