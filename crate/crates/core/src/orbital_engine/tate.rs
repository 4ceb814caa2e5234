//! Closed-form routes for central-type elements: the Tate-integral reduction
//! and the Fourier/γ-factor expression.

use num_traits::{One, Zero};

use super::cyclo::{Cyclo, PhaseSum};
use super::kgroup::{k_reps, upper_borel_reps};
use super::lcf::{Ambient, Lcf, Term};
use crate::error::{Error, Result};
use crate::exact_linalg::QMat;
use crate::invariant_geometry::{Sign, TildeGl};
use crate::lfactor_symbolic::{gamma_factor, LaurentRational};
use crate::padic_base::{q, qpow, qpow_q, val, BaseField, CharLabel, UnramifiedCharacter, Q};

/// Exact value of an orbital integral: a cyclotomic combination of rational functions of t.
pub type LValue = PhaseSum<LaurentRational>;

/// Role of a coordinate of gl̃_n along an integration slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Fixed,
    Free,
    Var(usize),
}

/// χ(p) for χ = ξη.
pub fn chi_at_p(xi: &UnramifiedCharacter, base: &BaseField) -> Q {
    &xi.value_at_p * q(base.eta_sign())
}

pub fn rational_value(v: &LValue) -> Result<LaurentRational> {
    v.as_base().ok_or_else(|| Error::Domain("orbital integral has a non-rational cyclotomic value".into()))
}

/// The covector β with ⟨B, Z⟩ = Σ β_i Z_i.
pub fn covector(amb: &Ambient, b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); amb.dim()];
    for (j, bj) in b.iter().enumerate() {
        let (pj, k) = amb.pairing_slot(j);
        out[pj] += k * bj;
    }
    out
}

/// Average over `reps` of ∫ φ((X₀ + free + vars)·k) d(free), as a function of the variables.
pub fn slice_reduce(phi: &Lcf, x0: &[Q], slots: &[Slot], reps: &[QMat]) -> Result<Lcf> {
    let p = phi.p;
    let r = slots.iter().filter(|s| matches!(s, Slot::Var(_))).count();
    let amb = Ambient::Affine { n: r };
    let share = Q::new(1.into(), (reps.len() as i64).into());
    let mut terms = Vec::new();
    for k in reps {
        let pk = phi.right_translate(k)?;
        'term: for t in &pk.terms {
            let beta = match &t.phase {
                Some(b) => covector(&phi.ambient, b),
                None => vec![Q::zero(); slots.len()],
            };
            let mut w = t.weight.clone();
            let mut scalar = share.clone();
            let mut center = vec![Q::zero(); r];
            let mut phase = vec![Q::zero(); r];
            let mut depth = vec![0; r];
            for (j, s) in slots.iter().enumerate() {
                let m = t.depth[j];
                match s {
                    Slot::Fixed => {
                        let d = &x0[j] - &t.center[j];
                        if val(&d, p) < m {
                            continue 'term;
                        }
                        if !beta[j].is_zero() {
                            w = w.mul(&Cyclo::psi(p, &(&beta[j] * &d)));
                        }
                    }
                    Slot::Free => {
                        if val(&beta[j], p) + m < 0 {
                            continue 'term;
                        }
                        scalar *= qpow(p, -m);
                    }
                    Slot::Var(i) => {
                        center[*i] = t.center[j].clone();
                        depth[*i] = m;
                        phase[*i] = beta[j].clone();
                    }
                }
            }
            let phase = phase.iter().any(|x| !x.is_zero()).then_some(phase);
            terms.push(Term {
                weight: w.mul(&Cyclo::rational(p, scalar)),
                center,
                depth,
                phase,
            });
        }
    }
    Ok(Lcf { ambient: amb, p, terms }.canonical())
}

/// ∫_{F^×} 1[b ∈ c + p^m𝒪] ψ(β(b − c)) ρ^{v(b)} d^×b with vol(𝒪^×) = 1.
pub fn tate_1d(c: &Q, m: i64, beta: &Q, rho: &LaurentRational, p: u64) -> Result<LValue> {
    let vb = val(beta, p);
    let vc = val(c, p);
    let pq = q(p as i64);
    if vc < m {
        if vb + m < 0 {
            return Ok(LValue::zero(p));
        }
        let coef = &pq / (&pq - Q::one()) * qpow(p, vc - m);
        return Ok(LValue::constant(p, rho.pow(vc)?.scale(&coef)));
    }
    let geom = |e: i64| -> Result<LaurentRational> { rho.pow(e)?.div(&LaurentRational::one().sub(rho)) };
    if vb + m >= 0 {
        return Ok(LValue::constant(p, geom(m)?));
    }
    let e = -vb;
    let corr = rho.pow(e - 1)?.scale(&(Q::one() / (&pq - Q::one())));
    let body = geom(e)?.sub(&corr);
    Ok(PhaseSum::psi_times(p, &-(beta * c), body))
}

/// Σ over terms of f of ∏_i tate_1d in coordinate i with ratio ρ_i.
pub fn tate_integral(f: &Lcf, rhos: &[LaurentRational]) -> Result<LValue> {
    let p = f.p;
    let mut acc = LValue::zero(p);
    for t in &f.terms {
        let mut prod = t.weight.to_laurent();
        for (i, rho) in rhos.iter().enumerate() {
            let beta = t.phase.as_ref().map(|b| b[i].clone()).unwrap_or_else(Q::zero);
            prod = prod.mul(&tate_1d(&t.center[i], t.depth[i], &beta, rho, p)?);
            if prod.is_zero() {
                break;
            }
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

fn tilde_dim(phi: &Lcf) -> Result<usize> {
    match phi.ambient {
        Ambient::TildeGl { n } if (1..=2).contains(&n) => Ok(n),
        Ambient::TildeGl { n } => Err(Error::DeskLimit(format!("orbital integrals for n = {n} are beyond desk scale (n ≤ 2)"))),
        _ => Err(Error::Inconsistent("test function must live on gl̃_n".into())),
    }
}

fn plus_slice(n: usize, lambda: &Q) -> (Vec<Q>, Vec<Slot>) {
    let mut x0 = vec![Q::zero(); n * n + 2 * n];
    for i in 0..n {
        x0[i * n + i] = lambda.clone();
    }
    let slots = if n == 1 {
        vec![Slot::Fixed, Slot::Var(0), Slot::Fixed]
    } else {
        vec![
            Slot::Fixed,
            Slot::Var(0),
            Slot::Fixed,
            Slot::Fixed,
            Slot::Free,
            Slot::Var(1),
            Slot::Fixed,
            Slot::Fixed,
        ]
    };
    (x0, slots)
}

/// f_φ(b) = ∫_K ∫_{ñ′} φ((X_λ(b) + N)·k) dN dk as a function on F^n.
pub fn f_phi(phi: &Lcf, lambda: &Q, _chi: &UnramifiedCharacter) -> Result<Lcf> {
    let n = tilde_dim(phi)?;
    let (x0, slots) = plus_slice(n, lambda);
    let reps = k_reps(phi.p, n, phi.invariance_depth())?;
    slice_reduce(phi, &x0, &slots, &reps)
}

/// I_{Z_λ^+}(φ) for χ(p) = chi via the Tate-integral reduction.
pub fn tate_plus(phi: &Lcf, lambda: &Q, chi: &Q) -> Result<LValue> {
    let n = tilde_dim(phi)?;
    let p = phi.p;
    let (x0, slots) = plus_slice(n, lambda);
    let reps = upper_borel_reps(p, n, phi.invariance_depth())?;
    let f = slice_reduce(phi, &x0, &slots, &reps)?;
    let rhos: Vec<LaurentRational> = (1..=n as i64)
        .map(|i| LaurentRational::monomial(qpow_q(chi, -i) * qpow(p, i - 1), -i))
        .collect();
    tate_integral(&f, &rhos)
}

/// I_{Z_λ^+}(φ) for χ(p) = chi via γ^+(s)^{−1} ∫ ℱφ_λ ω^−.
pub fn gamma_plus(phi: &Lcf, lambda: &Q, chi: &Q) -> Result<LValue> {
    let n = tilde_dim(phi)?;
    let p = phi.p;
    let d = n * n + 2 * n;
    let mut shift = vec![Q::zero(); d];
    for i in 0..n {
        shift[i * n + i] = lambda.clone();
    }
    let ft = phi.translate(&shift).fourier();
    let slots = if n == 1 {
        vec![Slot::Free, Slot::Free, Slot::Var(0)]
    } else {
        vec![
            Slot::Free,
            Slot::Free,
            Slot::Var(0),
            Slot::Free,
            Slot::Free,
            Slot::Free,
            Slot::Fixed,
            Slot::Var(1),
        ]
    };
    let reps = upper_borel_reps(p, n, ft.invariance_depth())?;
    let g = slice_reduce(&ft, &vec![Q::zero(); d], &slots, &reps)?;
    let rhos: Vec<LaurentRational> = (1..=n as i64)
        .map(|i| LaurentRational::monomial(qpow_q(chi, i) * qpow(p, -i), i))
        .collect();
    let i1 = tate_integral(&g, &rhos)?;
    let base = BaseField { p, etale: crate::padic_base::EtaleType::Split, d: 0 };
    let mut gamma = LaurentRational::one();
    for i in 1..=n as i64 {
        let ch = UnramifiedCharacter { value_at_p: qpow_q(chi, -i), label: CharLabel::Derived };
        gamma = gamma.mul(&gamma_factor(&ch, -i, &q(1 - i), &base)?);
    }
    Ok(i1.scale(&gamma.inv()?))
}

/// X = Z_λ^ε · g.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralForm {
    pub lambda: Q,
    pub sign: Sign,
    pub g: QMat,
}

pub fn central_decomposition(x: &TildeGl) -> Result<CentralForm> {
    let n = x.n;
    if n == 0 {
        return Err(Error::Domain("n = 0 has no central orbits".into()));
    }
    let lambda = x.a.data.iter().step_by(n + 1).fold(Q::zero(), |a, b| a + b) / q(n as i64);
    let shifted = x.a.sub(&QMat::eye(n).scale(&lambda));
    if !shifted.pow(n, &Q::one()).data.iter().all(Zero::is_zero) {
        return Err(Error::Domain("element is not of central type: A has more than one eigenvalue".into()));
    }
    let not_central = || Error::Domain("element is not of central type".into());
    let (sign, g) = if !x.delta(Sign::Plus).is_zero() && x.u.iter().all(Zero::is_zero) {
        let z = TildeGl::central_rep(n, &lambda, Sign::Plus);
        let rx = x.krylov().inverse().ok_or_else(not_central)?;
        (Sign::Plus, z.krylov().mul(&rx))
    } else if !x.delta(Sign::Minus).is_zero() && x.v.iter().all(Zero::is_zero) {
        let z = TildeGl::central_rep(n, &lambda, Sign::Minus);
        let kz = z.row_krylov().inverse().ok_or_else(not_central)?;
        (Sign::Minus, kz.mul(&x.row_krylov()))
    } else {
        return Err(not_central());
    };
    let z = TildeGl::central_rep(n, &lambda, sign);
    if &z.act(&g)? != x {
        return Err(Error::Inconsistent("failed to conjugate the central representative onto X".into()));
    }
    Ok(CentralForm { lambda, sign, g })
}

/// I_{Z·g} = χ(p)^{−v} t^{−v} I_Z with v = v(det g).
pub fn twist_factor(g: &QMat, chi: &Q, p: u64) -> LaurentRational {
    let v = val(&g.det(), p);
    LaurentRational::monomial(qpow_q(chi, -v), -v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentralRoute {
    Tate,
    Gamma,
}

fn flip_t(v: &LValue) -> Result<LValue> {
    let mut err = None;
    let out = v.map(|c| match c.subst_power(-1) {
        Ok(x) => x,
        Err(e) => {
            err = Some(e);
            LaurentRational::zero()
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

pub fn central_by_route(
    x: &TildeGl,
    phi: &Lcf,
    xi: &UnramifiedCharacter,
    base: &BaseField,
    route: CentralRoute,
) -> Result<LValue> {
    let n = tilde_dim(phi)?;
    if n != x.n || phi.p != base.p {
        return Err(Error::Inconsistent("element and test function disagree on n or p".into()));
    }
    let cf = central_decomposition(x)?;
    let chi = chi_at_p(xi, base);
    let run = |f: &Lcf, c: &Q| match route {
        CentralRoute::Tate => tate_plus(f, &cf.lambda, c),
        CentralRoute::Gamma => gamma_plus(f, &cf.lambda, c),
    };
    let core = match cf.sign {
        Sign::Plus => run(phi, &chi)?,
        Sign::Minus => flip_t(&run(&phi.transpose_dual()?, &chi.recip())?)?,
    };
    Ok(core.scale(&twist_factor(&cf.g, &chi, base.p)))
}

pub fn orbital_central_cyclo(
    x: &TildeGl,
    phi: &Lcf,
    xi: &UnramifiedCharacter,
    base: &BaseField,
) -> Result<LValue> {
    central_by_route(x, phi, xi, base, CentralRoute::Tate)
}

pub fn orbital_central(x: &TildeGl, phi: &Lcf, xi: &UnramifiedCharacter, base: &BaseField) -> Result<LaurentRational> {
    rational_value(&orbital_central_cyclo(x, phi, xi, base)?)
}

pub fn orbital_via_gamma(x: &TildeGl, phi: &Lcf, xi: &UnramifiedCharacter, base: &BaseField) -> Result<LaurentRational> {
    rational_value(&central_by_route(x, phi, xi, base, CentralRoute::Gamma)?)
}
