//! Rational functions in t = p^{-s} and the local L- and γ-factors built from them.

use crate::error::{Error, Result};
use crate::exact_linalg::Poly;
use crate::invariant_geometry::{Sign, TildeGl};
use crate::orbit_descent::{classify_type, descend, residue_degrees, DescentData};
use crate::padic_base::{q, q_parse, q_to_string, qpow, qpow_q, BaseField, UnramifiedCharacter, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `t^shift · num / den` with num(0) ≠ 0, den(0) = 1 and gcd(num, den) = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentRational {
    shift: i64,
    num: Poly,
    den: Poly,
}

fn strip_low(p: &Poly) -> (usize, Poly) {
    let z = p.c.iter().take_while(|c| c.is_zero()).count();
    (z, Poly::new(p.c[z..].to_vec()))
}

fn shift_poly(p: &Poly, k: usize) -> Poly {
    let mut c = vec![Q::zero(); k];
    c.extend(p.c.iter().cloned());
    Poly::new(c)
}

/// P(t^f) as `t^s · P'` for nonzero f.
fn subst_poly(p: &Poly, f: i64) -> (i64, Poly) {
    if p.is_zero() {
        return (0, Poly::zero());
    }
    let d = p.c.len() - 1;
    let a = f.unsigned_abs() as usize;
    let mut c = vec![Q::zero(); d * a + 1];
    for (i, x) in p.c.iter().enumerate() {
        let idx = if f > 0 { i * a } else { (d - i) * a };
        c[idx] = x.clone();
    }
    let s = if f > 0 { 0 } else { f * d as i64 };
    (s, Poly::new(c))
}

impl LaurentRational {
    pub fn zero() -> Self {
        Self { shift: 0, num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Q, k: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { shift: k, num: Poly::constant(c), den: Poly::one() }
    }

    pub fn t() -> Self {
        Self::monomial(Q::one(), 1)
    }

    /// Builds `t^shift · num / den`; fails when den is zero.
    pub fn from_parts(shift: i64, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self::canon(shift, num, den))
    }

    /// Laurent polynomial Σ c·t^e.
    pub fn from_terms(terms: &[(i64, Q)]) -> Self {
        let (num_shift, num) = laurent_poly(terms);
        Self::canon(num_shift, num, Poly::one())
    }

    fn canon(shift: i64, num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (zn, num) = strip_low(&num);
        let (zd, den) = strip_low(&den);
        let shift = shift + zn as i64 - zd as i64;
        let g = num.gcd(&den);
        let (num, den) = if g.deg() > 0 {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        } else {
            (num, den)
        };
        let c = den.c[0].recip();
        Self { shift, num: num.scale(&c), den: den.scale(&c) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.deg() == 0
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Returns the constant when the function is one.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        (self.shift == 0 && self.num.deg() == 0 && self.den.deg() == 0).then(|| self.num.c[0].clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(o.shift);
        let a = shift_poly(&self.num, (self.shift - m) as usize).mul(&o.den);
        let b = shift_poly(&o.num, (o.shift - m) as usize).mul(&self.den);
        Self::canon(m, a.add(&b), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        Self { shift: self.shift, num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::canon(self.shift + o.shift, self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { shift: self.shift, num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of the zero rational function".into()));
        }
        Ok(Self::canon(-self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut r = Self::one();
        for _ in 0..k.unsigned_abs() {
            r = r.mul(&base);
        }
        Ok(r)
    }

    /// Substitution t ↦ t^f for nonzero integer f.
    pub fn subst_power(&self, f: i64) -> Result<Self> {
        if f == 0 {
            return Err(Error::Domain("substitution t -> t^0 is not invertible".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (sn, n) = subst_poly(&self.num, f);
        let (sd, d) = subst_poly(&self.den, f);
        Ok(Self::canon(self.shift * f + sn - sd, n, d))
    }

    /// Substitution t ↦ c·t for nonzero rational c.
    pub fn subst_scale(&self, c: &Q) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Domain("substitution t -> 0·t".into()));
        }
        let sc = |p: &Poly| {
            let mut f = Q::one();
            let mut out = Vec::with_capacity(p.c.len());
            for x in &p.c {
                out.push(x * &f);
                f *= c;
            }
            Poly::new(out)
        };
        Ok(Self::canon(self.shift, sc(&self.num).scale(&qpow_q(c, self.shift)), sc(&self.den)))
    }

    pub fn eval(&self, t0: &Q) -> Result<Q> {
        if self.is_zero() {
            return Ok(Q::zero());
        }
        if t0.is_zero() && self.shift < 0 {
            return Err(Error::Domain("pole at t = 0".into()));
        }
        let d = self.den.eval(t0);
        if d.is_zero() {
            return Err(Error::Domain(format!("pole at t = {}", q_to_string(t0))));
        }
        Ok(qpow_q(t0, self.shift) * self.num.eval(t0) / d)
    }

    /// Laurent expansion around t = 0; coefficients of t^lo ..= t^hi.
    pub fn series(&self, lo: i64, hi: i64) -> Vec<Q> {
        let len = (hi - lo + 1).max(0) as usize;
        let mut out = vec![Q::zero(); len];
        if self.is_zero() || hi < self.shift {
            return out;
        }
        let m = (hi - self.shift) as usize + 1;
        // power series of num/den, den(0) = 1
        let mut s: Vec<Q> = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = self.num.coeff(k);
            for j in 1..=k.min(self.den.c.len().saturating_sub(1)) {
                acc -= &self.den.c[j] * &s[k - j];
            }
            s.push(acc);
        }
        for (k, c) in s.into_iter().enumerate() {
            let e = self.shift + k as i64;
            if e >= lo && e <= hi {
                out[(e - lo) as usize] = c;
            }
        }
        out
    }

    pub fn to_json(&self) -> LaurentJson {
        let terms = |p: &Poly, s: i64| -> Vec<(i64, String)> {
            p.c.iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 + s, q_to_string(c)))
                .collect()
        };
        LaurentJson { num: terms(&self.num, self.shift), den: terms(&self.den, 0) }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let parse = |ts: &[(i64, String)]| -> Result<Vec<(i64, Q)>> {
            ts.iter().map(|(e, c)| Ok((*e, q_parse(c)?))).collect()
        };
        let (sn, n) = laurent_poly(&parse(&j.num)?);
        let (sd, d) = laurent_poly(&parse(&j.den)?);
        if d.is_zero() {
            return Err(Error::Schema("LaurentRational with zero denominator".into()));
        }
        Ok(Self::canon(sn - sd, n, d))
    }
}

/// Σ c·t^e as `t^s · P`.
fn laurent_poly(terms: &[(i64, Q)]) -> (i64, Poly) {
    let nz: Vec<&(i64, Q)> = terms.iter().filter(|(_, c)| !c.is_zero()).collect();
    let Some(lo) = nz.iter().map(|(e, _)| *e).min() else {
        return (0, Poly::zero());
    };
    let hi = nz.iter().map(|(e, _)| *e).max().unwrap();
    let mut c = vec![Q::zero(); (hi - lo + 1) as usize];
    for (e, x) in nz {
        c[(e - lo) as usize] += x;
    }
    (lo, Poly::new(c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub num: Vec<(i64, String)>,
    pub den: Vec<(i64, String)>,
}

impl Serialize for LaurentRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LaurentJson::deserialize(d)?;
        Self::from_json(&j).map_err(serde::de::Error::custom)
    }
}

fn fmt_poly(p: &Poly, shift: i64) -> String {
    let mut parts = Vec::new();
    for (i, c) in p.c.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let e = i as i64 + shift;
        let mono = match e {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{e}"),
        };
        let cs = q_to_string(c);
        parts.push(match (mono.is_empty(), cs.as_str()) {
            (true, _) => cs.clone(),
            (false, "1") => mono,
            (false, "-1") => format!("-{mono}"),
            _ => format!("{cs}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for LaurentRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = fmt_poly(&self.num, self.shift);
        if self.is_laurent_polynomial() {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({})", fmt_poly(&self.den, 0))
        }
    }
}

/// L(c₁s + c₀, χ) for an unramified χ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LFactorSpec {
    pub character: UnramifiedCharacter,
    pub s_coefficient: i64,
    pub s_offset: Q,
}

impl LFactorSpec {
    pub fn new(character: UnramifiedCharacter, s_coefficient: i64, s_offset: Q) -> Self {
        Self { character, s_coefficient, s_offset }
    }
}

fn integral_offset(c0: &Q) -> Result<i64> {
    if !c0.is_integer() {
        return Err(Error::Domain(format!(
            "non-integer s-offset {} would need fractional powers of p",
            q_to_string(c0)
        )));
    }
    c0.to_integer().try_into().map_err(|_| Error::Domain("s-offset out of range".into()))
}

/// (1 − χ(p)·q^{−c₀}·t^{f·c₁})^{−1} with q = p^f: the factor at a place of residue degree f.
pub fn local_l(chi_at_p: &Q, c1: i64, c0: &Q, p: u64, f: u32) -> Result<LaurentRational> {
    let c0 = integral_offset(c0)?;
    let f64_ = f as i64;
    let coef = qpow_q(chi_at_p, f64_) * qpow(p, -c0 * f64_);
    let d = LaurentRational::one().sub(&LaurentRational::monomial(coef, c1 * f64_));
    d.inv().map_err(|_| Error::Domain("L-factor is identically infinite".into()))
}

pub fn build_l(spec: &LFactorSpec, base: &BaseField) -> Result<LaurentRational> {
    local_l(&spec.character.value_at_p, spec.s_coefficient, &spec.s_offset, base.p, 1)
}

/// γ(c₁s + c₀, χ) = L(1 − c₁s − c₀, χ^{−1}) / L(c₁s + c₀, χ).
pub fn gamma_factor(chi: &UnramifiedCharacter, c1: i64, c0: &Q, base: &BaseField) -> Result<LaurentRational> {
    let top = build_l(&LFactorSpec::new(chi.inverse(), -c1, Q::one() - c0), base)?;
    let bottom = build_l(&LFactorSpec::new(chi.clone(), c1, c0.clone()), base)?;
    top.div(&bottom)
}

/// Order of R at t = p^{−s₀} (positive means a pole) and its value when finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoloValue {
    pub pole_order: i64,
    pub value: Option<Q>,
}

fn root_multiplicity(p: &Poly, t0: &Q) -> (usize, Poly) {
    let lin = Poly::linear(t0);
    let mut m = 0;
    let mut cur = p.clone();
    while !cur.is_zero() && cur.eval(t0).is_zero() {
        cur = cur.exact_div(&lin).unwrap();
        m += 1;
    }
    (m, cur)
}

pub fn holo_at(r: &LaurentRational, s0: &Q, p: u64) -> Result<HoloValue> {
    let s = integral_offset(s0)?;
    let t0 = qpow(p, -s);
    if r.is_zero() {
        return Ok(HoloValue { pole_order: 0, value: Some(Q::zero()) });
    }
    let (mn, n) = root_multiplicity(&r.num, &t0);
    let (md, d) = root_multiplicity(&r.den, &t0);
    let order = md as i64 - mn as i64;
    let value = match order {
        0 => Some(qpow_q(&t0, r.shift) * n.eval(&t0) / d.eval(&t0)),
        o if o < 0 => Some(Q::zero()),
        _ => None,
    };
    Ok(HoloValue { pole_order: order, value })
}

/// ∏_{j=1}^{n} L(∓js − j + 1, χ^{∓j}) at a place of residue degree f; χ = ξη given by χ(p).
pub fn central_l(n: usize, sign: Sign, chi_at_p: &Q, p: u64, f: u32) -> Result<LaurentRational> {
    let mut acc = LaurentRational::one();
    for j in 1..=n as i64 {
        let (c1, e) = match sign {
            Sign::Plus => (-j, -j),
            Sign::Minus => (j, j),
        };
        acc = acc.mul(&local_l(&qpow_q(chi_at_p, e), c1, &q(1 - j), p, f)?);
    }
    Ok(acc)
}

/// L-factor attached to descent data with a sign per central factor.
pub fn l_for_orbit(
    dd: &DescentData,
    eps: &[Sign],
    xi: &UnramifiedCharacter,
    base: &BaseField,
) -> Result<LaurentRational> {
    if eps.len() != dd.factors.len() {
        return Err(Error::Inconsistent(format!(
            "sign vector has {} entries for {} central factors",
            eps.len(),
            dd.factors.len()
        )));
    }
    let chi = &xi.value_at_p * q(base.eta_sign());
    let mut acc = LaurentRational::one();
    for (fac, &s) in dd.factors.iter().zip(eps) {
        for f in residue_degrees(&fac.poly, base.p)? {
            acc = acc.mul(&central_l(fac.mult, s, &chi, base.p, f)?);
        }
    }
    Ok(acc)
}

/// L_X for a regular element, via its descent data and type.
pub fn l_for_element(x: &TildeGl, xi: &UnramifiedCharacter, base: &BaseField) -> Result<LaurentRational> {
    let dd = descend(&x.quotient_point(), None)?;
    let eps = classify_type(x, &dd)?;
    l_for_orbit(&dd, &eps, xi, base)
}
