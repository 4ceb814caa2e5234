//! Unitary side: Hermitian classes, semisimple orbit tags, transfer constants,
//! orbital integrals on ũ^V at n = 1 and the singular transfer identities.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_linalg::{EMat, MonicPolynomial, QMat};
use crate::invariant_geometry::{QuotientPoint, Sign, TildeGl};
use crate::lfactor_symbolic::{holo_at, l_for_element};
use crate::orbit_descent::{
    assemble, central_component, classify_type, descend, direct_sum, iota, realize_a0, residue_degrees,
    AssemblyOptions, DescentData,
};
use crate::orbital_engine::general::conjugator;
use crate::orbital_engine::{orbital_central, orbital_rs, Ambient, Lcf};
use crate::padic_base::{
    q, q_to_string, qpow, residue_mod, val, BaseField, EtaleKind, EtaleScalar, EtaleType, UnramifiedCharacter, Q,
};

/// Isometry class of a nondegenerate Hermitian space over E_w/F_w.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HermitianClass {
    pub dim: usize,
    /// disc lies in the norm group.
    pub disc_norm: bool,
    pub over_field: String,
    /// E ⊗ F_w is split at this place, so η′ is trivial.
    pub split_place: bool,
    /// Diagonal Gram representative.
    pub gram: Vec<Q>,
}

impl HermitianClass {
    fn build(dim: usize, disc_norm: bool, over_field: String, split_place: bool, p: u64) -> Self {
        let mut gram = vec![Q::one(); dim];
        if !disc_norm {
            if let Some(last) = gram.last_mut() {
                *last = q(p as i64);
            }
        }
        Self { dim, disc_norm, over_field, split_place, gram }
    }

    /// η′(disc).
    pub fn eta_disc(&self) -> Q {
        if self.split_place || self.disc_norm {
            Q::one()
        } else {
            -Q::one()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "disc_class": if self.disc_norm { "norm" } else { "non_norm" },
            "over_field": self.over_field,
            "gram": self.gram.iter().map(q_to_string).collect::<Vec<_>>(),
        })
    }
}

fn place_classes(dim: usize, split_place: bool, over_field: String, p: u64) -> Vec<HermitianClass> {
    if split_place {
        vec![HermitianClass::build(dim, true, over_field, true, p)]
    } else {
        vec![
            HermitianClass::build(dim, true, over_field.clone(), false, p),
            HermitianClass::build(dim, false, over_field, false, p),
        ]
    }
}

pub fn hermitian_classes(base: &BaseField, dim: usize) -> Result<Vec<HermitianClass>> {
    if dim == 0 {
        return Err(Error::Domain("Hermitian spaces need positive dimension".into()));
    }
    Ok(place_classes(dim, base.etale == EtaleType::Split, "F".into(), base.p))
}

fn eta_of(x: &Q, base: &BaseField) -> Result<Q> {
    base.eta().eval_at(x, base.p)
}

/// Norm class of d_n(X), the disc class of the space carrying the matching orbit.
pub fn matching_disc(x: &TildeGl, base: &BaseField) -> Result<bool> {
    if !x.quotient_point().is_regular_semisimple() {
        return Err(Error::Domain("matching needs a regular semisimple element".into()));
    }
    Ok(eta_of(&x.dn(), base)?.is_one())
}

/// (A, v) ∈ ũ^V with h(x, y) = xᵗ G y^c.
#[derive(Debug, Clone, PartialEq)]
pub struct UTildeElement {
    pub n: usize,
    pub gram: EMat,
    pub a: EMat,
    pub v: Vec<EtaleScalar>,
}

fn emat_conj(m: &EMat) -> EMat {
    m.map(|x| x.conj())
}

impl UTildeElement {
    pub fn new(gram: EMat, a: EMat, v: Vec<EtaleScalar>) -> Result<Self> {
        let n = gram.rows;
        if !gram.is_square() || a.rows != n || a.cols != n || v.len() != n {
            return Err(Error::Schema("Gram matrix, A and v have mismatched sizes".into()));
        }
        if n == 0 {
            return Err(Error::Domain("ũ^V needs n ≥ 1".into()));
        }
        let kind = gram.get(0, 0).kind;
        if gram.transpose() != emat_conj(&gram) {
            return Err(Error::Domain("Gram matrix is not Hermitian".into()));
        }
        if gram.det_with(&EtaleScalar::one(kind)).is_zero() {
            return Err(Error::Domain("Gram matrix is degenerate".into()));
        }
        if a.transpose().mul(&gram) != gram.mul(&emat_conj(&a)) {
            return Err(Error::Domain("A is not self-adjoint for the Gram matrix".into()));
        }
        Ok(Self { n, gram, a, v })
    }

    /// (a, w) on E with h(x, y) = gram·x·y^c.
    pub fn n1(gram: &Q, a: &Q, w: EtaleScalar) -> Result<Self> {
        let k = w.kind;
        let m = |x: EtaleScalar| EMat::from_rows(vec![vec![x]]).unwrap();
        Self::new(m(EtaleScalar::from_q(gram.clone(), k)), m(EtaleScalar::from_q(a.clone(), k)), vec![w])
    }

    pub fn kind(&self) -> EtaleKind {
        self.gram.get(0, 0).kind
    }

    pub fn herm(&self, x: &[EtaleScalar], y: &[EtaleScalar]) -> EtaleScalar {
        let yc: Vec<EtaleScalar> = y.iter().map(EtaleScalar::conj).collect();
        let gy = self.gram.mul_vec(&yc);
        x.iter().zip(&gy).fold(EtaleScalar::zero(self.kind()), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    /// Characteristic polynomial of A and the moments h(A^i v, v), all in F.
    pub fn quotient_point(&self) -> Result<QuotientPoint> {
        let kind = self.kind();
        let cp = self.a.charpoly_coeffs(&EtaleScalar::one(kind));
        let charpoly = cp[..self.n]
            .iter()
            .map(|c| c.as_rational().ok_or_else(|| Error::Inconsistent("characteristic polynomial not over F".into())))
            .collect::<Result<Vec<_>>>()?;
        let mut moments = Vec::with_capacity(self.n);
        let mut w = self.v.clone();
        for _ in 0..self.n {
            let m = self.herm(&w, &self.v);
            moments.push(m.as_rational().ok_or_else(|| Error::Inconsistent("moment not over F".into()))?);
            w = self.a.mul_vec(&w);
        }
        QuotientPoint::new(charpoly, moments)
    }

    pub fn disc_norm(&self, base: &BaseField) -> Result<bool> {
        let d = self.gram.det_with(&EtaleScalar::one(self.kind()));
        let d = d.as_rational().ok_or_else(|| Error::Inconsistent("Hermitian determinant not in F".into()))?;
        Ok(eta_of(&d, base)?.is_one())
    }

    fn n1_parts(&self) -> Result<(Q, Q, EtaleScalar)> {
        if self.n != 1 {
            return Err(Error::DeskLimit(format!("unitary orbital integrals need n = 1, got n = {}", self.n)));
        }
        let g = self.gram.get(0, 0).as_rational().unwrap();
        let a = self.a.get(0, 0).as_rational().unwrap();
        Ok((g, a, self.v[0].clone()))
    }

    /// Coordinates (a, w₁, w₂) in the n = 1 ambient.
    pub fn coords_n1(&self) -> Result<Vec<Q>> {
        let (_, a, w) = self.n1_parts()?;
        Ok(vec![a, w.a, w.b])
    }

    pub fn ambient_n1(&self) -> Result<Ambient> {
        let (g, _, _) = self.n1_parts()?;
        Ok(Ambient::UnitaryLie { kind: self.kind(), gram: g })
    }
}

/// The element X = (a, 1, gram·N(w)) of gl̃₁ matching (a, w).
pub fn gl_partner_n1(x: &UTildeElement) -> Result<TildeGl> {
    let (g, a, w) = x.n1_parts()?;
    TildeGl::new(QMat::from_rows(vec![vec![a]])?, vec![Q::one()], vec![g * w.norm()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOrbital {
    pub value: Q,
    /// Raw congruence sums (depth, value) before comparison.
    pub raw: Vec<(u32, Q)>,
    pub central: bool,
}

fn mod_pow(p: u64, k: u32) -> i128 {
    (p as i128).pow(k)
}

/// Representatives (x, y) of E¹(𝒪/p^k) for inert E = F(√d), x² − d y² ≡ 1.
fn norm_one_residues(p: u64, d: i64, k: u32) -> Vec<(i128, i128)> {
    let pi = p as i128;
    let d = d as i128;
    let mut sols: Vec<(i128, i128)> = Vec::new();
    for x in 0..pi {
        for y in 0..pi {
            if (x * x - d * y * y - 1).rem_euclid(pi) == 0 {
                sols.push((x, y));
            }
        }
    }
    for j in 1..k {
        let m = mod_pow(p, j);
        let m1 = m * pi;
        let mut next = Vec::with_capacity(sols.len() * p as usize);
        for &(x, y) in &sols {
            for s in 0..pi {
                for t in 0..pi {
                    let (x1, y1) = (x + m * s, y + m * t);
                    if (x1 * x1 - d * y1 * y1 - 1).rem_euclid(m1) == 0 {
                        next.push((x1, y1));
                    }
                }
            }
        }
        sols = next;
    }
    sols
}

const UNITARY_BUDGET: usize = 2_000_000;

fn rational_eval(phi: &Lcf, x: &[Q]) -> Result<Q> {
    phi.eval(x)
        .as_base()
        .ok_or_else(|| Error::Unsupported("unitary integrals need rational function values".into()))
}

/// J_{X^V}(φ^V) = ∫_{E¹} φ^V(X^V·g) dg with vol(E¹(𝒪)) = 1.
pub fn unitary_orbital_n1(x: &UTildeElement, phi: &Lcf, base: &BaseField) -> Result<UnitaryOrbital> {
    let (_, a, w) = x.n1_parts()?;
    let amb = x.ambient_n1()?;
    if phi.ambient != amb || phi.p != base.p {
        return Err(Error::Inconsistent("φ^V lives on a different Hermitian space".into()));
    }
    if x.kind() != base.etale_kind() {
        return Err(Error::Inconsistent("element and base field disagree on E".into()));
    }
    let p = base.p;
    if w.is_zero() {
        let v = rational_eval(phi, &[a, Q::zero(), Q::zero()])?;
        return Ok(UnitaryOrbital { value: v.clone(), raw: vec![(0, v)], central: true });
    }
    let stab = phi.stability_depth();
    let mut raw = Vec::new();
    match x.kind() {
        EtaleKind::Inert(d) => {
            let vw = val(&w.a, p).min(val(&w.b, p));
            let k0 = (stab - vw).max(1) as u32;
            let l1 = Q::from_integer((p as i64).into()) / q(p as i64 + 1);
            for k in k0..k0 + 3 {
                let reps = norm_one_residues(p, d, k);
                if reps.len() > UNITARY_BUDGET {
                    return Err(Error::DeskLimit(format!("{} residues of E¹ at depth {k}", reps.len())));
                }
                let mut acc = Q::zero();
                for (gx, gy) in reps {
                    let gc = EtaleScalar::new(Q::from_integer(gx.into()), -Q::from_integer(gy.into()), x.kind());
                    let y = gc.mul(&w);
                    acc += rational_eval(phi, &[a.clone(), y.a, y.b])?;
                }
                raw.push((k, acc * &l1 * qpow(p, -(k as i64))));
            }
        }
        EtaleKind::Split => {
            if w.a.is_zero() || w.b.is_zero() {
                return Err(Error::Domain("(a, w) with N(w) = 0 and w ≠ 0 is not semisimple".into()));
            }
            let f = phi.support_floor();
            let (v1, v2) = (val(&w.a, p), val(&w.b, p));
            let k0 = (stab - f).max(1) as u32;
            let l1 = q(p as i64) / q(p as i64 - 1);
            for k in k0..k0 + 3 {
                let m = mod_pow(p, k);
                let count = (f - v2..=v1 - f).count() as i128 * m;
                if count as usize > UNITARY_BUDGET {
                    return Err(Error::DeskLimit(format!("{count} split torus residues at depth {k}")));
                }
                let mut acc = Q::zero();
                for j in f - v2..=v1 - f {
                    for e in 1..m {
                        if e % p as i128 == 0 {
                            continue;
                        }
                        let e = Q::from_integer(e.into());
                        let y1 = &w.a * qpow(p, -j) / &e;
                        let y2 = &w.b * qpow(p, j) * &e;
                        acc += rational_eval(phi, &[a.clone(), y1, y2])?;
                    }
                }
                raw.push((k, acc * &l1 * qpow(p, -(k as i64))));
            }
        }
    }
    if raw.iter().any(|(_, v)| *v != raw[0].1) {
        return Err(Error::Inconsistent(format!(
            "E¹ congruence sums did not stabilize: {}",
            raw.iter().map(|(k, v)| format!("depth {k}: {}", q_to_string(v))).collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(UnitaryOrbital { value: raw[0].1.clone(), raw, central: false })
}

/// w ∈ E with N(w) = c up to a factor in 1 + p^prec 𝒪.
pub fn norm_preimage(c: &Q, base: &BaseField, prec: u32) -> Result<EtaleScalar> {
    let p = base.p;
    let kind = base.etale_kind();
    if c.is_zero() {
        return Ok(EtaleScalar::zero(kind));
    }
    let d = match kind {
        EtaleKind::Split => return Ok(EtaleScalar::new(c.clone(), Q::one(), kind)),
        EtaleKind::Inert(d) => d as i128,
    };
    let e = val(c, p);
    if e % 2 != 0 {
        return Err(Error::Domain(format!("{} is not a norm from the unramified extension", q_to_string(c))));
    }
    let unit = c * qpow(p, -e);
    let pi = p as i128;
    let m = mod_pow(p, prec);
    let target = residue_mod(&unit, p, prec) as i128;
    let start = (0..pi)
        .flat_map(|x| (0..pi).map(move |y| (x, y)))
        .find(|&(x, y)| (x * x - d * y * y - target).rem_euclid(pi) == 0 && (x != 0 || y != 0))
        .ok_or_else(|| Error::Inconsistent("no norm preimage modulo p".into()))?;
    let (mut x, mut y) = start;
    let inv = |a: i128, m: i128| -> i128 {
        let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, m, a.rem_euclid(m));
        while nr != 0 {
            let qq = r / nr;
            (t, nt) = (nt, t - qq * nt);
            (r, nr) = (nr, r - qq * nr);
        }
        t.rem_euclid(m)
    };
    for _ in 0..prec + 1 {
        let f = (x * x - d * y * y - target).rem_euclid(m);
        if f == 0 {
            break;
        }
        if x % pi != 0 {
            x = (x - f * inv(2 * x, m)).rem_euclid(m);
        } else {
            y = (y + f * inv(2 * d * y, m)).rem_euclid(m);
        }
    }
    let w = EtaleScalar::new(Q::from_integer(x.into()), Q::from_integer(y.into()), kind);
    Ok(w.scale(&qpow(p, e / 2)))
}

/// The ũ^V partner of a regular semisimple X ∈ gl̃₁, on the space of the matching class.
pub fn unitary_partner_n1(x: &TildeGl, base: &BaseField, prec: u32) -> Result<(HermitianClass, UTildeElement)> {
    if x.n != 1 {
        return Err(Error::DeskLimit("unitary partners are built at n = 1 only".into()));
    }
    let norm = matching_disc(x, base)?;
    let class = hermitian_classes(base, 1)?.into_iter().find(|c| c.disc_norm == norm).unwrap();
    let c = &x.u[0] * &x.v[0];
    let gram = class.gram[0].clone();
    let w = norm_preimage(&(c / &gram), base, prec)?;
    let y = UTildeElement::n1(&gram, x.a.get(0, 0), w)?;
    Ok((class, y))
}

/// A test function on each Hermitian space; spaces absent from the list carry 0.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFamily {
    pub parts: Vec<(HermitianClass, Lcf)>,
}

impl UnitaryFamily {
    pub fn get(&self, class: &HermitianClass, base: &BaseField) -> Lcf {
        self.parts
            .iter()
            .find(|(c, _)| c.disc_norm == class.disc_norm && c.dim == class.dim)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(|| {
                Lcf::zero(Ambient::UnitaryLie { kind: base.etale_kind(), gram: class.gram[0].clone() }, base.p)
            })
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self { parts: self.parts.iter().map(|(k, f)| (k.clone(), f.scale(c))).collect() }
    }

    /// (φ^V) ↦ (η(disc V)·φ^V).
    pub fn flip(&self) -> Self {
        Self { parts: self.parts.iter().map(|(k, f)| (k.clone(), f.scale(&k.eta_disc()))).collect() }
    }

    /// (φ^V) ↦ (η(disc V)^n ℱφ^V) with ε ≡ 1.
    pub fn fourier(&self) -> Self {
        Self {
            parts: self
                .parts
                .iter()
                .map(|(k, f)| {
                    let c = (0..k.dim).fold(Q::one(), |acc, _| acc * k.eta_disc());
                    (k.clone(), f.fourier().scale(&c))
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchFailure {
    pub class: HermitianClass,
    pub a: Q,
    pub w: EtaleScalar,
    pub gl_side: Q,
    pub unitary_side: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub sign: Sign,
    pub depth: i64,
    pub checked: usize,
    pub nonzero: usize,
    pub first_failure: Option<MatchFailure>,
}

impl MatchReport {
    pub fn matched(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sign": self.sign.symbol().to_string(),
            "depth": self.depth,
            "checked": self.checked,
            "nonzero": self.nonzero,
            "verdict": if self.matched() { "matched" } else { "unmatched" },
            "first_failure": self.first_failure.as_ref().map(|f| json!({
                "space": f.class.to_json(),
                "a": q_to_string(&f.a),
                "w": f.w.to_string(),
                "gl_side": q_to_string(&f.gl_side),
                "unitary_side": q_to_string(&f.unitary_side),
            })),
        })
    }
}

/// (a, w) samples covering the rs orbits at n = 1 through valuation `depth`.
pub fn rs_grid_n1(base: &BaseField, depth: i64) -> Vec<(Q, EtaleScalar)> {
    let p = base.p as i64;
    let kind = base.etale_kind();
    let mut avals = vec![Q::zero()];
    for j in -1..depth {
        for x in [1, 2, p - 1] {
            let a = q(x) * qpow(base.p, j);
            if !avals.contains(&a) {
                avals.push(a);
            }
        }
    }
    let mut ws = Vec::new();
    for k in -1..=depth {
        let s = qpow(base.p, k);
        match kind {
            EtaleKind::Inert(_) => {
                for x in 0..p {
                    for y in 0..p {
                        if x != 0 || y != 0 {
                            ws.push(EtaleScalar::new(q(x), q(y), kind).scale(&s));
                        }
                    }
                }
            }
            EtaleKind::Split => {
                for x in 1..p {
                    ws.push(EtaleScalar::new(q(x) * &s, Q::one(), kind));
                    ws.push(EtaleScalar::new(q(x), s.clone(), kind));
                }
            }
        }
    }
    avals.iter().flat_map(|a| ws.iter().map(move |w| (a.clone(), w.clone()))).collect()
}

/// ω^±(X) = η(δ^±(X)).
pub fn transfer_factor(x: &TildeGl, sign: Sign, base: &BaseField) -> Result<Q> {
    eta_of(&x.delta(sign), base)
}

/// Compares J_{X^V}(φ^V) with ω^±(X)·I_X(φ)|_{s=0, ξ=1} on the rs grid.
pub fn verify_matched_n1(phi: &Lcf, family: &UnitaryFamily, sign: Sign, depth: i64, base: &BaseField) -> Result<MatchReport> {
    if phi.ambient != (Ambient::TildeGl { n: 1 }) {
        return Err(Error::DeskLimit("matching is verified for φ on gl̃₁".into()));
    }
    let xi = UnramifiedCharacter::trivial();
    let mut checked = 0;
    let mut nonzero = 0;
    for class in hermitian_classes(base, 1)? {
        let phi_v = family.get(&class, base);
        for (a, w) in rs_grid_n1(base, depth) {
            let y = UTildeElement::n1(&class.gram[0], &a, w.clone())?;
            let x = gl_partner_n1(&y)?;
            let gl = orbital_rs(&x, phi, &xi, base)?.eval(&Q::one())? * transfer_factor(&x, sign, base)?;
            let un = unitary_orbital_n1(&y, &phi_v, base)?.value;
            checked += 1;
            if !un.is_zero() {
                nonzero += 1;
            }
            if gl != un {
                let failure = MatchFailure { class, a, w, gl_side: gl, unitary_side: un };
                return Ok(MatchReport { sign, depth, checked, nonzero, first_failure: Some(failure) });
            }
        }
    }
    Ok(MatchReport { sign, depth, checked, nonzero, first_failure: None })
}

/// One descent slot: a Hermitian class on a place of F_i, or on F for the rs part.
#[derive(Debug, Clone, PartialEq)]
pub struct SemisimpleOrbitTag {
    pub h_flat: Vec<HermitianClass>,
    /// None for h₀, otherwise the index of the central factor.
    pub factor: Vec<Option<usize>>,
    pub assembled_v: HermitianClass,
}

impl SemisimpleOrbitTag {
    pub fn to_json(&self) -> Value {
        json!({
            "h": self.h_flat.iter().zip(&self.factor).map(|(h, f)| {
                let mut j = h.to_json();
                j["factor"] = f.map_or(Value::Null, |i| json!(i));
                j
            }).collect::<Vec<_>>(),
            "V": self.assembled_v.to_json(),
        })
    }
}

/// Orbits over a ∈ 𝒜(F): tuples (h_i) with h₀ fixed, grouped by the class of their orthogonal sum.
pub fn semisimple_orbits(a: &QuotientPoint, dd: &DescentData, base: &BaseField) -> Result<Vec<(HermitianClass, SemisimpleOrbitTag)>> {
    let p = base.p;
    let split = base.etale == EtaleType::Split;
    let mut slots: Vec<(Option<usize>, Vec<HermitianClass>)> = Vec::new();
    if dd.r > 0 {
        let d_r = dd.a0.d_values().last().cloned().unwrap_or_else(Q::one);
        if d_r.is_zero() {
            return Err(Error::Domain("rs part of the descent has d_r = 0".into()));
        }
        let norm = split || val(&d_r, p) % 2 == 0;
        slots.push((None, vec![HermitianClass::build(dd.r, norm, "F".into(), split, p)]));
    }
    for (i, fac) in dd.factors.iter().enumerate() {
        for (w, f) in residue_degrees(&fac.poly, p)?.into_iter().enumerate() {
            let label = format!("F_{i}[{}] place {w} (f = {f})", poly_label(&fac.poly));
            slots.push((Some(i), place_classes(fac.mult, split || f % 2 == 0, label, p)));
        }
    }
    let n = a.n();
    let mut out = Vec::new();
    let mut idx = vec![0usize; slots.len()];
    loop {
        let h_flat: Vec<HermitianClass> = slots.iter().zip(&idx).map(|((_, c), &j)| c[j].clone()).collect();
        let odd = h_flat.iter().filter(|h| !h.split_place && !h.disc_norm).count();
        let v = HermitianClass::build(n, split || odd % 2 == 0, "F".into(), split, p);
        let factor = slots.iter().map(|(f, _)| *f).collect();
        out.push((v.clone(), SemisimpleOrbitTag { h_flat, factor, assembled_v: v }));
        let mut pos = slots.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < slots[pos].1.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn poly_label(poly: &MonicPolynomial) -> String {
    let mut s = String::from("x^") + &poly.coeffs.len().to_string();
    for (k, c) in poly.coeffs.iter().enumerate().rev() {
        if !c.is_zero() {
            s += &format!(" + ({})x^{k}", q_to_string(c));
        }
    }
    s
}

/// ε-factor inputs for a ramified configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonInputs {
    /// ε(1 − i, η′^i, ψ′) for i = 1, 2, …
    pub eps_shifted: Vec<Q>,
    pub eps_half: Q,
    pub eta_minus_one: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstantMode {
    Unramified,
    Supplied(EpsilonInputs),
}

/// (c^+_{V′}, c^-_{V′}).
pub fn space_constants(class: &HermitianClass, mode: &ConstantMode) -> Result<(Q, Q)> {
    let n = class.dim;
    let eta = class.eta_disc();
    let powq = |x: &Q, k: usize| (0..k).fold(Q::one(), |acc, _| acc * x);
    let mut c = powq(&eta, n + 1);
    if let ConstantMode::Supplied(e) = mode {
        if e.eps_shifted.len() < n {
            return Err(Error::Config(format!("need {n} shifted ε values, got {}", e.eps_shifted.len())));
        }
        for x in &e.eps_shifted[..n] {
            if x.is_zero() {
                return Err(Error::Config("ε values must be nonzero".into()));
            }
            c /= x;
        }
        c *= powq(&e.eps_half, n * (n + 1) / 2) * powq(&e.eta_minus_one, n * (n - 1) / 2);
    }
    let minus = &c * &eta;
    Ok((c, minus))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitConstant {
    pub tag: SemisimpleOrbitTag,
    /// c_𝔬^ε.
    pub c_o: Q,
    /// c_{X,𝔬}.
    pub c_x_o: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferConstants {
    pub c_plus: Q,
    pub c_minus: Q,
    pub eta_g: Q,
    pub omega_x0: Q,
    pub c_x: Q,
    pub epsilon: Vec<Sign>,
    pub orbits: Vec<OrbitConstant>,
}

impl TransferConstants {
    pub fn to_json(&self) -> Value {
        json!({
            "c_plus": q_to_string(&self.c_plus),
            "c_minus": q_to_string(&self.c_minus),
            "eta_g": q_to_string(&self.eta_g),
            "omega_x0": q_to_string(&self.omega_x0),
            "c_x": q_to_string(&self.c_x),
            "epsilon": self.epsilon.iter().map(|s| s.symbol().to_string()).collect::<String>(),
            "orbits": self.orbits.iter().map(|o| json!({
                "tag": o.tag.to_json(),
                "c_o": q_to_string(&o.c_o),
                "c_x_o": q_to_string(&o.c_x_o),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Rs sample of 𝔥̃ near a_H: each plus component gets u = p^N e₁^*.
fn slice_sample(dd: &DescentData, n_pert: i64, base: &BaseField) -> Result<(TildeGl, Q, Q)> {
    let p = base.p;
    let x0 = realize_a0(dd);
    let mut om_plus = if dd.r > 0 { transfer_factor(&x0, Sign::Plus, base)? } else { Q::one() };
    let mut om_minus = if dd.r > 0 { transfer_factor(&x0, Sign::Minus, base)? } else { Q::one() };
    let mut comps = Vec::new();
    let small = qpow(p, n_pert);
    for fac in &dd.factors {
        let mut c = central_component(fac, Sign::Plus, false);
        let d = fac.deg();
        let m = fac.mult;
        if d == 1 {
            c.u[0] = small.clone();
            om_plus *= transfer_factor(&c, Sign::Plus, base)?;
            om_minus *= transfer_factor(&c, Sign::Minus, base)?;
        } else {
            let alpha = crate::exact_linalg::QuotientRingElement::generator(fac.poly.clone());
            let mut pw = crate::exact_linalg::QuotientRingElement::new(fac.poly.clone(), crate::exact_linalg::Poly::one());
            for j in 0..d {
                c.u[j] = &small * pw.trace();
                pw = pw.mul(&alpha);
            }
            // over F_i: δ⁺ = ±1 and δ⁻ = ±p^{N m}, so ω⁻ = η(p)^{N m d}
            om_minus *= base.eta().at_valuation(n_pert * (m * d) as i64);
        }
        comps.push(c);
    }
    let x = iota(&x0, &direct_sum(&comps))?;
    if !x.quotient_point().is_regular_semisimple() {
        return Err(Error::Inconsistent("slice sample is not regular semisimple".into()));
    }
    Ok((x, om_plus, om_minus))
}

/// c^± with ω^±(ι(X_H)) = c^± ω^±(X_H), from two rs samples near a_H.
pub fn c_pm(dd: &DescentData, base: &BaseField) -> Result<(Q, Q)> {
    let mut found: Option<(Q, Q)> = None;
    for n_pert in [6, 7] {
        let (x, op, om) = slice_sample(dd, n_pert, base)?;
        let cp = transfer_factor(&x, Sign::Plus, base)? / op;
        let cm = transfer_factor(&x, Sign::Minus, base)? / om;
        match &found {
            None => found = Some((cp, cm)),
            Some(prev) if *prev != (cp.clone(), cm.clone()) => {
                return Err(Error::Inconsistent("c^± differs between slice samples".into()));
            }
            _ => {}
        }
    }
    Ok(found.unwrap())
}

pub fn transfer_constants(x: &TildeGl, base: &BaseField, mode: &ConstantMode) -> Result<TransferConstants> {
    if !x.is_regular() {
        return Err(Error::Domain("transfer constants need a regular element".into()));
    }
    let a = x.quotient_point();
    let dd = descend(&a, None)?;
    let eps = classify_type(x, &dd)?;
    let rep = assemble(&dd, &eps, AssemblyOptions::default())?;
    let g = conjugator(&rep.x, x)?;
    let eta_g = eta_of(&g.det(), base)?;
    let omega_x0 = if dd.r > 0 { transfer_factor(&rep.x0, Sign::Plus, base)? } else { Q::one() };
    let (c_plus, c_minus) = c_pm(&dd, base)?;
    let c_x = &c_plus * &eta_g * &omega_x0;
    let mut orbits = Vec::new();
    for (_, tag) in semisimple_orbits(&a, &dd, base)? {
        let mut c_o = Q::one();
        for (h, f) in tag.h_flat.iter().zip(&tag.factor) {
            if let Some(i) = f {
                let (cp, cm) = space_constants(h, mode)?;
                c_o *= if eps[*i] == Sign::Plus { cp } else { cm };
            }
        }
        let c_x_o = &c_x * &c_o;
        orbits.push(OrbitConstant { tag, c_o, c_x_o });
    }
    Ok(TransferConstants { c_plus, c_minus, eta_g, omega_x0, c_x, epsilon: eps, orbits })
}

/// c_{γ,𝒪} at n = 1 from c_{X,𝔬}; μ enters through the E-valuations of its arguments.
pub fn c_gamma_o_n1(c_x_o: &Q, mu: &UnramifiedCharacter, v_x: i64, v_h: i64, v_sigma_tau: i64, v_cayley: i64) -> Q {
    c_x_o * mu.at_valuation(v_x) * mu.at_valuation(-v_h) * mu.at_valuation(-v_sigma_tau) * mu.at_valuation(-v_cayley)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMode {
    /// Central X of any n ≤ 2 with φ^V(Z_λ) supplied per space; matching is taken as given.
    LieCentral,
    /// n = 1 with the matching verified on the rs grid.
    FullN1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferTerm {
    pub space: HermitianClass,
    pub c_x_o: Q,
    pub j: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub mode: TransferMode,
    pub lhs: Option<Q>,
    pub rhs: Q,
    pub terms: Vec<TransferTerm>,
    pub matching: Option<MatchReport>,
}

impl TransferReport {
    pub fn holds(&self) -> bool {
        self.matching.as_ref().is_none_or(MatchReport::matched) && self.lhs.as_ref() == Some(&self.rhs)
    }

    pub fn verdict(&self) -> &'static str {
        match (&self.matching, self.holds()) {
            (Some(m), _) if !m.matched() => "unmatched",
            (_, true) => "equal",
            _ => "discrepancy",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": match self.mode { TransferMode::LieCentral => "lie_n_any_central", TransferMode::FullN1 => "full_n1" },
            "verdict": self.verdict(),
            "lhs": self.lhs.as_ref().map(q_to_string),
            "rhs": q_to_string(&self.rhs),
            "terms": self.terms.iter().map(|t| json!({
                "space": t.space.to_json(),
                "c": q_to_string(&t.c_x_o),
                "J": q_to_string(&t.j),
            })).collect::<Vec<_>>(),
            "matching": self.matching.as_ref().map(MatchReport::to_json),
        })
    }
}

/// I♮_X(φ) at s = 0 and ξ = 1.
pub fn natural_at_zero(x: &TildeGl, phi: &Lcf, base: &BaseField) -> Result<Option<Q>> {
    let xi = UnramifiedCharacter::trivial();
    let a = x.quotient_point();
    let value = if a.is_regular_semisimple() {
        orbital_rs(x, phi, &xi, base)?
    } else {
        orbital_central(x, phi, &xi, base)?
    };
    let l = l_for_element(x, &xi, base)?;
    Ok(holo_at(&value.div(&l)?, &Q::zero(), base.p)?.value)
}

fn central_point(x: &TildeGl) -> Result<Q> {
    let dd = descend(&x.quotient_point(), None)?;
    if dd.r != 0 || dd.factors.len() != 1 || dd.factors[0].deg() != 1 {
        return Err(Error::Unsupported("central transfer needs X over a single rational eigenvalue".into()));
    }
    Ok(-dd.factors[0].poly.coeffs[0].clone())
}

/// Both sides of I♮_X(φ) = Σ c_{X,𝔬} J_𝔬(φ^V) in the full n = 1 setting.
pub fn singular_transfer_check_n1(
    phi: &Lcf,
    family: &UnitaryFamily,
    x: &TildeGl,
    depth: i64,
    base: &BaseField,
) -> Result<TransferReport> {
    if x.n != 1 {
        return Err(Error::DeskLimit("full transfer checks run at n = 1".into()));
    }
    let matching = verify_matched_n1(phi, family, Sign::Plus, depth, base)?;
    if !matching.matched() {
        return Ok(TransferReport { mode: TransferMode::FullN1, lhs: None, rhs: Q::zero(), terms: vec![], matching: Some(matching) });
    }
    let mut rep = transfer_identity_n1(phi, family, x, base)?;
    rep.matching = Some(matching);
    Ok(rep)
}

/// Both sides of the identity for a pair already known to be matched.
pub fn transfer_identity_n1(phi: &Lcf, family: &UnitaryFamily, x: &TildeGl, base: &BaseField) -> Result<TransferReport> {
    if x.n != 1 {
        return Err(Error::DeskLimit("full transfer checks run at n = 1".into()));
    }
    let lhs = natural_at_zero(x, phi, base)?;
    let consts = transfer_constants(x, base, &ConstantMode::Unramified)?;
    let mut terms = Vec::new();
    if x.quotient_point().is_regular_semisimple() {
        let fam_depth = family.parts.iter().map(|(_, f)| f.stability_depth() - f.support_floor()).max().unwrap_or(0);
        let prec = fam_depth.max(0) as u32 + val(&x.dn(), base.p).unsigned_abs() as u32 + 4;
        let (class, y) = unitary_partner_n1(x, base, prec)?;
        let j = unitary_orbital_n1(&y, &family.get(&class, base), base)?.value;
        terms.push(TransferTerm { space: class, c_x_o: consts.c_x.clone(), j });
    } else {
        let lambda = central_point(x)?;
        for o in &consts.orbits {
            let v = &o.tag.assembled_v;
            let phi_v = family.get(v, base);
            let y = UTildeElement::n1(&v.gram[0], &lambda, EtaleScalar::zero(base.etale_kind()))?;
            let j = unitary_orbital_n1(&y, &phi_v, base)?.value;
            terms.push(TransferTerm { space: v.clone(), c_x_o: o.c_x_o.clone(), j });
        }
    }
    let rhs = terms.iter().fold(Q::zero(), |acc, t| acc + &t.c_x_o * &t.j);
    Ok(TransferReport { mode: TransferMode::FullN1, lhs, rhs, terms, matching: None })
}

/// Central case for any n ≤ 2: I♮_{Z_λ^±}(φ) against Σ_V c_V^± φ^V(Z_λ) with the values supplied.
pub fn central_transfer_check(
    phi: &Lcf,
    values: &[(HermitianClass, Q)],
    x: &TildeGl,
    base: &BaseField,
) -> Result<TransferReport> {
    central_point(x)?;
    let lhs = natural_at_zero(x, phi, base)?;
    let consts = transfer_constants(x, base, &ConstantMode::Unramified)?;
    let mut terms = Vec::new();
    for o in &consts.orbits {
        let v = &o.tag.assembled_v;
        let j = values
            .iter()
            .find(|(c, _)| c.disc_norm == v.disc_norm && c.dim == v.dim)
            .map(|(_, j)| j.clone())
            .unwrap_or_else(Q::zero);
        terms.push(TransferTerm { space: v.clone(), c_x_o: o.c_x_o.clone(), j });
    }
    let rhs = terms.iter().fold(Q::zero(), |acc, t| acc + &t.c_x_o * &t.j);
    Ok(TransferReport { mode: TransferMode::LieCentral, lhs, rhs, terms, matching: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRatio {
    pub class: HermitianClass,
    pub a_depth: i64,
    /// c₀ = gram·N(w₀), the center of the moment box c₀(1 + p^K 𝒪).
    pub c0: Q,
    pub k: u32,
    pub vol_gl: Q,
    pub vol_u: Q,
    pub ratio: Q,
    pub expected: Q,
}

/// vol(M) on the quotient computed from gl̃₁ and from ũ^V, for M = (p^j 𝒪) × c₀(1 + p^K 𝒪).
pub fn measure_ratio_n1(class: &HermitianClass, a_depth: i64, w0: &EtaleScalar, k: u32, base: &BaseField) -> Result<MeasureRatio> {
    let p = base.p;
    let gram = class.gram[0].clone();
    let c0 = &gram * w0.norm();
    if c0.is_zero() || val(&c0, p) < 0 {
        return Err(Error::Domain("measure boxes need an integral nonzero moment".into()));
    }
    let e = val(&c0, p);
    let modulus = e as u32 + k;
    let m = mod_pow(p, modulus);
    if (m * m) as usize > 4 * UNITARY_BUDGET {
        return Err(Error::DeskLimit(format!("measure box needs {} residues", m * m)));
    }
    let target = residue_mod(&c0, p, modulus) as i128;
    let pairs = (0..m).flat_map(|v| (0..m).map(move |u| (u, v))).filter(|&(u, v)| (u * v - target).rem_euclid(m) == 0).count();
    let vol_a = qpow(p, -a_depth);
    let mm = Q::from_integer(m.into());
    // integrand on the gl side: I_X(1_Λ₀) at χ = 1, s = 0, which is e + 1 on M
    let vol_gl = &vol_a * q(pairs as i64) / (&mm * &mm) / q(e + 1);
    let g_res = residue_mod(&gram, p, modulus) as i128;
    let (count, j_unit) = match base.etale_kind() {
        EtaleKind::Inert(d) => {
            let d = d as i128;
            let c = (0..m)
                .flat_map(|x| (0..m).map(move |y| (x, y)))
                .filter(|&(x, y)| (g_res * (x * x - d * y * y) - target).rem_euclid(m) == 0)
                .count();
            (c, Q::one())
        }
        EtaleKind::Split => (pairs, q(e + 1)),
    };
    let vol_w = q(count as i64) / (&mm * &mm) * qpow(p, -val(&gram, p));
    let vol_u = &vol_a * vol_w / j_unit;
    let ratio = &vol_gl / &vol_u;
    let pinv = qpow(p, -1);
    let expected = (Q::one() - &pinv) / (Q::one() - q(base.eta_sign()) * &pinv);
    Ok(MeasureRatio { class: class.clone(), a_depth, c0, k, vol_gl, vol_u, ratio, expected })
}

/// Functions on gl̃₁ whose orbital integrals vanish identically in s on every orbit.
pub fn unstable_examples_n1(base: &BaseField) -> Result<Vec<(String, Lcf)>> {
    let p = base.p;
    let amb = Ambient::TildeGl { n: 1 };
    let unit = |x: Q| QMat::from_rows(vec![vec![x]]);
    let coset = |c: Vec<i64>, m: i64| Lcf::coset(amb.clone(), p, c.into_iter().map(q).collect(), m, Q::one());
    let boxed = |c: Vec<Q>, d: Vec<i64>, w: Q| Lcf::boxed(amb.clone(), p, c, d, w);
    let f1 = coset(vec![0, 1, 0], 1)?;
    let twist = f1.sub(&f1.right_translate(&unit(q(2))?)?)?;
    let f3 = coset(vec![0, 1, 1], 2)?;
    let deep = f3.sub(&f3.right_translate(&unit(q(1 + p as i64))?)?)?;
    let units_minus = |a: Q, da: i64| -> Result<Lcf> {
        let whole = boxed(vec![a.clone(), Q::zero(), Q::zero()], vec![da, 0, 1], Q::one())?
            .sub(&boxed(vec![a.clone(), Q::zero(), Q::zero()], vec![da, 1, 1], Q::one())?)?;
        whole.sub(&boxed(vec![a, Q::one(), Q::zero()], vec![da, 1, 1], q(p as i64 - 1))?)
    };
    let shell = units_minus(Q::zero(), 0)?;
    let shifted = units_minus(Q::one(), 1)?;
    Ok(vec![
        ("unit_twist".into(), twist),
        ("unit_shell".into(), shell.clone()),
        ("deep_twist".into(), deep),
        ("shifted_shell".into(), shifted),
        ("fourier_shell".into(), shell.fourier()),
    ])
}

/// Every rs orbital integral on the grid vanishes as a function of s, for ξ = 1 and ξ(p) = 2.
pub fn rs_profile_vanishes(phi: &Lcf, depth: i64, base: &BaseField) -> Result<bool> {
    let xis = [UnramifiedCharacter::trivial(), UnramifiedCharacter::new(q(2), crate::padic_base::CharLabel::Xi)?];
    for class in hermitian_classes(base, 1)? {
        for (a, w) in rs_grid_n1(base, depth) {
            let x = gl_partner_n1(&UTildeElement::n1(&class.gram[0], &a, w)?)?;
            for xi in &xis {
                if !orbital_rs(&x, phi, xi, base)?.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
