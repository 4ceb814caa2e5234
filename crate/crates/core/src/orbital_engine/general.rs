//! Orbital integrals of general regular elements via descent, and the
//! group-side pullback through the Cayley transform at n = 1.

use num_traits::{One, Zero};

use super::lcf::{Ambient, Lcf};
use super::rs::orbital_rs;
use super::tate::{chi_at_p, orbital_central, tate_1d, twist_factor};
use crate::error::{Error, Result};
use crate::exact_linalg::{solve_linear, EMat, MonicPolynomial, Poly, QMat};
use crate::invariant_geometry::{
    cayley_to_group, cayley_to_lie, CayleyParams, GlNext, SElement, Sign, TildeGl,
};
use crate::lfactor_symbolic::{holo_at, l_for_element, LaurentRational};
use crate::orbit_descent::{assemble, classify_type, descend, residue_degrees, AssemblyOptions, DescentData};
use crate::padic_base::{q, qpow, qpow_q, val, BaseField, EtaleScalar, UnramifiedCharacter, Q};

/// Test functions accepted on general regular orbits.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// Any coset function; only rs and central-type elements accept a general one.
    Plain(Lcf),
    /// φ₀ ⊗ φ₁ ⊗ … along the descent slice, one factor per component over F_i = Q.
    SliceProduct { rs_part: Option<Lcf>, components: Vec<Lcf> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralValue {
    pub value: LaurentRational,
    pub l_x: LaurentRational,
    /// I♮ = I / L_X.
    pub normalized: LaurentRational,
    /// I♮ is a Laurent polynomial in t.
    pub entire: bool,
    /// No pole of I♮ at the integer points s ∈ [−3, 3].
    pub holomorphic_on_grid: bool,
    pub epsilon: Vec<Sign>,
    pub route: &'static str,
}

fn lattice_weight(phi: &Lcf) -> Option<Q> {
    let n = match phi.ambient {
        Ambient::TildeGl { n } => n,
        _ => return None,
    };
    let w = phi.terms.first()?.weight.as_base()?;
    (phi.scale(&w.recip()) == Lcf::lattice(Ambient::TildeGl { n }, phi.p, 0) && phi.terms.len() == 1).then_some(w)
}

/// g with X = rep·g, i.e. A_rep g = g A_X, g v_X = v_rep, u_rep g = u_X.
pub fn conjugator(rep: &TildeGl, x: &TildeGl) -> Result<QMat> {
    let n = x.n;
    let idx = |i: usize, j: usize| i * n + j;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Q::zero(); n * n];
            for k in 0..n {
                row[idx(k, j)] += rep.a.get(i, k);
                row[idx(i, k)] -= x.a.get(k, j);
            }
            rows.push(row);
            rhs.push(Q::zero());
        }
    }
    for i in 0..n {
        let mut row = vec![Q::zero(); n * n];
        for k in 0..n {
            row[idx(i, k)] = x.v[k].clone();
        }
        rows.push(row);
        rhs.push(rep.v[i].clone());
    }
    for j in 0..n {
        let mut row = vec![Q::zero(); n * n];
        for k in 0..n {
            row[idx(k, j)] = rep.u[k].clone();
        }
        rows.push(row);
        rhs.push(x.u[j].clone());
    }
    let sol = solve_linear(&QMat::from_rows(rows)?, &rhs);
    let g = sol
        .solution
        .map(|s| QMat { rows: n, cols: n, data: s })
        .ok_or_else(|| Error::Inconsistent("X is not in the orbit of its assembled representative".into()))?;
    if g.det().is_zero() || &rep.act(&g)? != x {
        return Err(Error::Inconsistent("failed to conjugate the assembled representative onto X".into()));
    }
    Ok(g)
}

fn resultant(a: &Poly, b: &Poly) -> Q {
    let (m, n) = (a.deg().max(0) as usize, b.deg().max(0) as usize);
    let size = m + n;
    if size == 0 {
        return Q::one();
    }
    let syl = QMat::from_fn(size, size, |i, j| {
        if i < n {
            let k = j as i64 - i as i64;
            if (0..=m as i64).contains(&k) { a.coeff(m - k as usize) } else { Q::zero() }
        } else {
            let k = j as i64 - (i - n) as i64;
            if (0..=n as i64).contains(&k) { b.coeff(n - k as usize) } else { Q::zero() }
        }
    });
    syl.det()
}

/// Integrality and pairwise coprimality mod p of the descent polynomials.
pub fn check_unramified(dd: &DescentData, rep: &TildeGl, p: u64) -> Result<()> {
    let mut polys: Vec<Poly> = dd.factors.iter().map(|f| f.poly.to_poly()).collect();
    if dd.r > 0 {
        polys.push(dd.q0.to_poly());
    }
    for f in &dd.factors {
        residue_degrees(&f.poly, p)?;
    }
    for (i, a) in polys.iter().enumerate() {
        if (0..=a.deg().max(0) as usize).any(|k| val(&a.coeff(k), p) < 0) {
            return Err(Error::Unsupported("descent data is not unramified: non-integral polynomial".into()));
        }
        for b in &polys[i + 1..] {
            if val(&resultant(a, b), p) != 0 {
                return Err(Error::Unsupported(
                    "descent data is not unramified: components meet modulo p".into(),
                ));
            }
        }
    }
    if !rep.is_integral(p) {
        return Err(Error::Unsupported("descent data is not unramified: representative not integral".into()));
    }
    Ok(())
}

/// I over F_w of residue degree f for the lattice function: ∏_i Σ_{b ∈ 𝒪_w} ρ_i^{v(b)}.
pub fn central_lattice_closed(mult: usize, sign: Sign, chi: &Q, p: u64, f: u32) -> Result<LaurentRational> {
    let fi = f as i64;
    let qf = p.pow(f);
    let mut acc = LaurentRational::one();
    for i in 1..=mult as i64 {
        let e = match sign {
            Sign::Plus => -i * fi,
            Sign::Minus => i * fi,
        };
        let rho = LaurentRational::monomial(qpow_q(chi, e) * qpow(qf, i - 1), e);
        let v = tate_1d(&Q::zero(), 0, &Q::zero(), &rho, qf)?;
        acc = acc.mul(&v.as_base().ok_or_else(|| Error::Inconsistent("lattice Tate series is not rational".into()))?);
    }
    Ok(acc)
}

fn rational_root(poly: &MonicPolynomial) -> Option<Q> {
    (poly.degree() == 1).then(|| -poly.coeffs[0].clone())
}

fn finish(value: LaurentRational, x: &TildeGl, xi: &UnramifiedCharacter, base: &BaseField, eps: Vec<Sign>, route: &'static str) -> Result<GeneralValue> {
    let l_x = l_for_element(x, xi, base)?;
    let normalized = value.div(&l_x)?;
    let entire = normalized.is_laurent_polynomial();
    let mut holo = true;
    for s0 in -3..=3 {
        if holo_at(&normalized, &q(s0), base.p)?.pole_order > 0 {
            holo = false;
        }
    }
    Ok(GeneralValue { value, l_x, normalized, entire, holomorphic_on_grid: holo, epsilon: eps, route })
}

/// I_X(φ, ξ, s) for regular X via descent: the g-twist times the product over the slice.
pub fn orbital_general(x: &TildeGl, phi: &TestFunction, xi: &UnramifiedCharacter, base: &BaseField) -> Result<GeneralValue> {
    if !x.is_regular() {
        return Err(Error::Domain("orbital_general requires a regular element".into()));
    }
    let p = base.p;
    let dd = descend(&x.quotient_point(), None)?;
    let eps = classify_type(x, &dd)?;
    let single_central = dd.r == 0 && dd.factors.len() == 1 && dd.factors[0].poly.degree() == 1;
    if let TestFunction::Plain(f) = phi {
        if dd.k() == 0 {
            return finish(orbital_rs(x, f, xi, base)?, x, xi, base, eps, "rs");
        }
        if single_central {
            return finish(orbital_central(x, f, xi, base)?, x, xi, base, eps, "central");
        }
    }
    let rep = assemble(&dd, &eps, AssemblyOptions::default())?;
    let g = conjugator(&rep.x, x)?;
    let chi = chi_at_p(xi, base);
    let mut value = twist_factor(&g, &chi, p);
    match phi {
        TestFunction::Plain(f) => {
            let w = lattice_weight(f).ok_or_else(|| Error::Unsupported("general Schwartz descent not supported".into()))?;
            check_unramified(&dd, &rep.x, p)?;
            value = value.scale(&w);
            if dd.r > 0 {
                let lat = Lcf::lattice(Ambient::TildeGl { n: dd.r }, p, 0);
                value = value.mul(&orbital_rs(&rep.x0, &lat, xi, base)?);
            }
            for (fac, &s) in dd.factors.iter().zip(&eps) {
                match rational_root(&fac.poly) {
                    Some(lambda) => {
                        let z = TildeGl::central_rep(fac.mult, &lambda, s);
                        let lat = Lcf::lattice(Ambient::TildeGl { n: fac.mult }, p, 0);
                        value = value.mul(&orbital_central(&z, &lat, xi, base)?);
                    }
                    None => {
                        for f in residue_degrees(&fac.poly, p)? {
                            value = value.mul(&central_lattice_closed(fac.mult, s, &chi, p, f)?);
                        }
                    }
                }
            }
        }
        TestFunction::SliceProduct { rs_part, components } => {
            if components.len() != dd.factors.len() {
                return Err(Error::Schema(format!(
                    "slice product has {} components for {} central factors",
                    components.len(),
                    dd.factors.len()
                )));
            }
            if dd.r > 0 {
                let f0 = rs_part.as_ref().ok_or_else(|| Error::Schema("slice product lacks the rs factor".into()))?;
                value = value.mul(&orbital_rs(&rep.x0, f0, xi, base)?);
            }
            for ((fac, &s), fi) in dd.factors.iter().zip(&eps).zip(components) {
                let lambda = rational_root(&fac.poly)
                    .ok_or_else(|| Error::Unsupported("general Schwartz descent not supported".into()))?;
                let z = TildeGl::central_rep(fac.mult, &lambda, s);
                value = value.mul(&orbital_central(&z, fi, xi, base)?);
            }
        }
    }
    finish(value, x, xi, base, eps, "descent")
}

// ---- group side, n = 1 ----

fn e_integral(z: &EtaleScalar, p: u64) -> bool {
    val(&z.a, p) >= 0 && val(&z.b, p) >= 0
}

fn e_unit(z: &EtaleScalar, p: u64) -> bool {
    e_integral(z, p) && val(&z.norm(), p) == 0
}

fn emat_integral(m: &EMat, p: u64) -> bool {
    m.data.iter().all(|z| e_integral(z, p))
}

fn conj_emat(m: &EMat) -> EMat {
    EMat { rows: m.rows, cols: m.cols, data: m.data.iter().map(EtaleScalar::conj).collect() }
}

/// ν(h) = h (h^c)^{−1}.
pub fn nu(h: &EMat) -> Result<SElement> {
    let one = EtaleScalar::one(h.data[0].kind);
    let hc = conj_emat(h).inverse_with(&one).ok_or_else(|| Error::Domain("h is singular".into()))?;
    SElement::new(h.mul(&hc))
}

/// An integral h with unit determinant and ν(h) = x, via h = y + x y^c.
pub fn hilbert90_integral(x: &SElement, p: u64) -> Option<EMat> {
    let kind = x.kind();
    let one = EtaleScalar::one(kind);
    let n = x.x.rows;
    let w = EtaleScalar::imaginary_unit(kind);
    for a in 0..p as i64 {
        for b in 0..p as i64 {
            let c = EtaleScalar::from_q(q(a), kind).add(&w.scale(&q(b)));
            let y = EMat::identity(n, &c);
            let h = y.add(&x.x.mul(&conj_emat(&y)));
            let d = h.det_with(&one);
            if emat_integral(&h, p) && e_unit(&d, p) {
                return Some(h);
            }
        }
    }
    None
}

/// f^S = 1_{S(𝒪)} for f = 1_{G′(𝒪)}, with ξ, μ unramified: h₁ is forced into 𝒪^× and h₂ into GL(𝒪).
pub fn f_s_unit(x: &SElement, p: u64) -> Result<Q> {
    if !emat_integral(&x.x, p) {
        return Ok(Q::zero());
    }
    hilbert90_integral(x, p)
        .map(|_| Q::one())
        .ok_or_else(|| Error::Inconsistent("no integral Hilbert-90 lift found for an integral point of S".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPullback {
    pub l_gamma: LaurentRational,
    pub value: LaurentRational,
    pub x: SElement,
    pub lie: GlNext,
    /// Grid points where f^S∘𝔠_σ = 1_{gl₂(𝒪)} was checked.
    pub certified_points: usize,
    /// 𝔠_σ⁻¹(x) is ι(X_H)·g with X_H integral, unramified descent data and g ∈ GL_n(𝒪).
    pub unramified_form: bool,
}

fn has_unramified_form(x: &TildeGl, p: u64) -> bool {
    let check = || -> Result<bool> {
        let dd = descend(&x.quotient_point(), None)?;
        let eps = classify_type(x, &dd)?;
        let rep = assemble(&dd, &eps, AssemblyOptions::default())?;
        check_unramified(&dd, &rep.x, p)?;
        Ok(super::kgroup::is_integral_unimodular(&conjugator(&rep.x, x)?, p))
    };
    check().unwrap_or(false)
}

/// det(x − σ) ∈ 𝒪_E^×: the neighbourhood of b cut out by the bump u.
fn near_sigma_free(x: &SElement, params: &CayleyParams, p: u64) -> bool {
    let one = EtaleScalar::one(params.kind());
    let d = x.x.sub(&EMat::identity(x.x.rows, &params.sigma)).det_with(&one);
    e_unit(&d, p)
}

/// X on a small grid of gl₂(F) near 𝒪, for certifying the pullback of f^S.
fn certification_grid(p: u64) -> Vec<GlNext> {
    let vals = [q(0), q(1), q(-1), q(p as i64), Q::new(1.into(), (p as i64).into())];
    let mut out = Vec::new();
    for a in &vals {
        for b in &vals {
            for c in &vals {
                for d in [q(0), q(1), Q::new(1.into(), (p as i64).into())] {
                    let m = QMat { rows: 2, cols: 2, data: vec![a.clone(), b.clone(), c.clone(), d] };
                    out.push(GlNext { m });
                }
            }
        }
    }
    out
}

/// I^σ_γ(w·1_{G′(𝒪)}, ξ, s) and L_γ for γ = (γ₁, γ₂) ∈ GL₁(E) × GL₂(E).
pub fn group_pullback(
    gamma1: &EtaleScalar,
    gamma2: &EMat,
    weight: &Q,
    params: &CayleyParams,
    xi: &UnramifiedCharacter,
    mu: &UnramifiedCharacter,
    base: &BaseField,
) -> Result<GroupPullback> {
    if gamma2.rows != 2 || gamma2.cols != 2 {
        return Err(Error::DeskLimit("group-side desk-scale limit: only n = 1 is supported".into()));
    }
    let p = base.p;
    let kind = params.kind();
    if base.etale_kind() != kind {
        return Err(Error::Inconsistent("Cayley parameters and base field disagree on E".into()));
    }
    let one = EtaleScalar::one(kind);
    let two_tau_sigma = params.tau.mul(&params.sigma).scale(&q(2));
    if !e_unit(&two_tau_sigma, p) {
        return Err(Error::Unsupported("2τσ is not a unit".into()));
    }
    if !e_unit(gamma1, p) || !emat_integral(gamma2, p) || !e_unit(&gamma2.det_with(&one), p) {
        return Err(Error::Unsupported("γ is not in G′(𝒪)".into()));
    }
    let h = gamma2.scale(&gamma1.inv()?);
    let x = nu(&h)?;
    if !near_sigma_free(&x, params, p) {
        return Err(Error::Unsupported("x − σ is not invertible modulo p: 𝔠_σ^{−1}(x) is not integral".into()));
    }
    let mut certified = 0;
    for y in certification_grid(p) {
        let Ok(s) = cayley_to_group(&y, params) else { continue };
        if !near_sigma_free(&s, params, p) {
            continue;
        }
        let lhs = f_s_unit(&s, p)?;
        let rhs = if y.m.data.iter().all(|z| val(z, p) >= 0) { Q::one() } else { Q::zero() };
        if lhs != rhs {
            return Err(Error::Inconsistent(format!("f^S∘𝔠_σ differs from 1_gl(𝒪) at {:?}", y.m.data)));
        }
        certified += 1;
    }
    let lie = cayley_to_lie(&x, params)?;
    let (xt, d) = lie.split();
    let l_gamma = l_for_element(&xt, xi, base)?;
    let value = if val(&d, p) >= 0 {
        let lat = Lcf::lattice(Ambient::TildeGl { n: 1 }, p, 0).scale(weight);
        // n odd: the factor μ(γ₁γ₂^{−1}) at a unit
        orbital_general(&xt, &TestFunction::Plain(lat), xi, base)?.value.scale(&mu.at_valuation(0))
    } else {
        LaurentRational::zero()
    };
    let unramified_form = val(&d, p) >= 0 && has_unramified_form(&xt, p);
    Ok(GroupPullback { l_gamma, value, x, lie, certified_points: certified, unramified_form })
}

/// γ = (1, h) with ν(h) = 𝔠_σ(Y) for Y ∈ gl₂(𝒪), so that 𝔠_σ^{−1}(x) = Y.
pub fn gamma_from_lie(y: &GlNext, params: &CayleyParams, p: u64) -> Result<(EtaleScalar, EMat)> {
    let x = cayley_to_group(y, params)?;
    let h = hilbert90_integral(&x, p).ok_or_else(|| Error::Domain("no integral Hilbert-90 lift".into()))?;
    Ok((EtaleScalar::one(params.kind()), h))
}

/// I^σ_γ for several σ with σσ^c = 1, reported rather than asserted equal.
pub fn sigma_survey(
    gamma1: &EtaleScalar,
    gamma2: &EMat,
    sigmas: &[EtaleScalar],
    tau: &EtaleScalar,
    xi: &UnramifiedCharacter,
    base: &BaseField,
) -> Vec<(EtaleScalar, Result<LaurentRational>)> {
    sigmas
        .iter()
        .map(|s| {
            let r = CayleyParams::new(tau.clone(), s.clone()).and_then(|params| {
                group_pullback(gamma1, gamma2, &Q::one(), &params, xi, xi, base).map(|g| g.value)
            });
            (s.clone(), r)
        })
        .collect()
}
