//! Brute-force evaluation of orbital integrals: an Iwasawa-cell sum with
//! exact p-adic ball integration, independent of the closed-form routes.

use num_traits::Zero;

use super::cyclo::Cyclo;
use super::kgroup::{lower_borel_reps, torus_reps, upper_borel_reps};
use super::lcf::Lcf;
use super::rs::{action_matrix, check_rs, orbit_window};
use super::tate::{central_decomposition, chi_at_p, rational_value, twist_factor, LValue};
use crate::error::{Error, Result};
use crate::exact_linalg::QMat;
use crate::invariant_geometry::{Sign, TildeGl};
use crate::lfactor_symbolic::LaurentRational;
use crate::padic_base::{q, qpow, qpow_q, val, BaseField, UnramifiedCharacter, Q, VAL_INF};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleParams {
    /// Torus valuations are enumerated in [−window, window]; beyond it, exact geometric tails.
    pub window: i64,
    /// Maximal refinement of a starting ball.
    pub max_refine: i64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self { window: 6, max_refine: 40 }
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub value: LValue,
    pub cells: usize,
    pub balls: usize,
}

/// h(x) = avg_g φ((P₀ + P₁x + P₂x²)·g), integrated over x ∈ x₀ + p^r 𝒪.
struct CurveIntegrator<'a> {
    phi: &'a Lcf,
    maps: Vec<QMat>,
    max_refine: i64,
    balls: usize,
}

enum BallState {
    Inside(Cyclo),
    Split,
}

impl<'a> CurveIntegrator<'a> {
    fn new(phi: &'a Lcf, n: usize, group: &[QMat], max_refine: i64) -> Result<Self> {
        let maps = group.iter().map(|g| action_matrix(n, g)).collect::<Result<Vec<_>>>()?;
        Ok(Self { phi, maps, max_refine, balls: 0 })
    }

    fn point(&self, p0: &[Q]) -> Cyclo {
        let p = self.phi.p;
        let mut acc = Cyclo::zero(p);
        for m in &self.maps {
            acc = acc.add(&self.phi.eval(&m.mul_vec(p0)));
        }
        acc.mul(&Cyclo::rational(p, Q::new(1.into(), (self.maps.len() as i64).into())))
    }

    fn classify(&self, q0: &[Q], q1: &[Q], q2: &[Q], r: i64) -> BallState {
        let p = self.phi.p;
        let amb = &self.phi.ambient;
        let mut acc = Cyclo::zero(p);
        for t in &self.phi.terms {
            let mut inside = true;
            for j in 0..q0.len() {
                let m = t.depth[j];
                let lead = val(&(&q0[j] - &t.center[j]), p);
                let spread = sat_add(r, val(&q1[j], p)).min(sat_add(2 * r, val(&q2[j], p)));
                if lead < m.min(spread) {
                    inside = false;
                    break;
                }
                if lead < m || spread < m {
                    return BallState::Split;
                }
            }
            if !inside {
                continue;
            }
            let mut w = t.weight.clone();
            if let Some(b) = &t.phase {
                let s1 = sat_add(r, val(&amb.pairing(b, q1), p));
                let s2 = sat_add(2 * r, val(&amb.pairing(b, q2), p));
                if s1.min(s2) < 0 {
                    return BallState::Split;
                }
                let diff: Vec<Q> = q0.iter().zip(&t.center).map(|(a, c)| a - c).collect();
                w = w.mul(&Cyclo::psi(p, &amb.pairing(b, &diff)));
            }
            acc = acc.add(&w);
        }
        BallState::Inside(acc)
    }

    fn integrate(&mut self, curve: &[Vec<Q>; 3], start: i64) -> Result<Cyclo> {
        let p = self.phi.p;
        let share = Q::new(1.into(), (self.maps.len() as i64).into());
        let mut total = Cyclo::zero(p);
        let mut stack = vec![(Q::zero(), start)];
        while let Some((x0, r)) = stack.pop() {
            self.balls += 1;
            if r - start > self.max_refine {
                return Err(Error::DeskLimit(format!("ball refinement exceeded {} levels", self.max_refine)));
            }
            let px: Vec<Q> = (0..curve[0].len())
                .map(|j| &curve[0][j] + &curve[1][j] * &x0 + &curve[2][j] * &x0 * &x0)
                .collect();
            let dx: Vec<Q> = (0..curve[0].len()).map(|j| &curve[1][j] + q(2) * &curve[2][j] * &x0).collect();
            let mut sum = Cyclo::zero(p);
            let mut split = false;
            for m in &self.maps {
                match self.classify(&m.mul_vec(&px), &m.mul_vec(&dx), &m.mul_vec(&curve[2]), r) {
                    BallState::Inside(c) => sum = sum.add(&c),
                    BallState::Split => {
                        split = true;
                        break;
                    }
                }
            }
            if split {
                for j in 0..p as i64 {
                    stack.push((&x0 + q(j) * qpow(p, r), r + 1));
                }
            } else {
                total = total.add(&sum.mul(&Cyclo::rational(p, &share * qpow(p, -r))));
            }
        }
        Ok(total)
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if b >= VAL_INF {
        VAL_INF
    } else {
        a + b
    }
}

fn mono(c: &Q, e: i64) -> LaurentRational {
    LaurentRational::monomial(c.clone(), e)
}

/// r^{M+1}/(1 − r) for a monomial ratio r.
fn tail(r: &LaurentRational, from: i64) -> Result<LaurentRational> {
    r.pow(from)?.div(&LaurentRational::one().sub(r))
}

fn window_check(phi: &Lcf, params: &OracleParams) -> Result<(i64, i64)> {
    let lo = phi.support_floor();
    let d = phi.stability_depth();
    if params.window + 1 < d {
        return Err(Error::Window(format!(
            "window M = {} is below the stability depth {} of φ",
            params.window, d
        )));
    }
    if lo < -params.window {
        return Err(Error::Window(format!("support floor {lo} lies outside the window ±{}", params.window)));
    }
    Ok((lo, params.window))
}

/// I_{Z_λ^±}(φ) by the chart sum with geometric tails.
fn oracle_central(phi: &Lcf, lambda: &Q, sign: Sign, chi: &Q, params: &OracleParams, rep: &mut OracleReport) -> Result<LValue> {
    let p = phi.p;
    let n = match phi.ambient {
        super::lcf::Ambient::TildeGl { n } => n,
        _ => return Err(Error::Inconsistent("test function must live on gl̃_n".into())),
    };
    let (lo, hi) = window_check(phi, params)?;
    let nd = phi.invariance_depth();
    let e = if sign == Sign::Plus { -1 } else { 1 };
    let mut group = Vec::new();
    let bor = if sign == Sign::Plus { upper_borel_reps(p, n, nd)? } else { lower_borel_reps(p, n, nd)? };
    for eps in torus_reps(p, n, nd)? {
        for k in &bor {
            group.push(eps.mul(k));
        }
    }
    let mut integ = CurveIntegrator::new(phi, n, &group, params.max_refine)?;
    let chi_t = |k: i64| mono(&qpow_q(chi, k), k);
    let pv = |b: Option<i64>| b.map(|j| qpow(p, j)).unwrap_or_else(Q::zero);
    let mut total = LValue::zero(p);
    let range: Vec<Option<i64>> = (lo..=hi).map(Some).chain(std::iter::once(None)).collect();
    if n == 1 {
        let r = chi_t(e);
        let t_inf = tail(&r, hi + 1)?;
        for j in &range {
            let pt = if sign == Sign::Plus {
                vec![lambda.clone(), pv(*j), Q::zero()]
            } else {
                vec![lambda.clone(), Q::zero(), pv(*j)]
            };
            rep.cells += 1;
            let v = integ.point(&pt);
            let w = match j {
                Some(j) => r.pow(*j)?,
                None => t_inf.clone(),
            };
            total = total.add(&v.to_laurent().scale(&w));
        }
    } else {
        let r1 = chi_t(e);
        let r2 = chi_t(2 * e).mul(&LaurentRational::constant(q(p as i64)));
        let (t1, t2) = (tail(&r1, hi + 1)?, tail(&r2, hi + 1)?);
        for j1 in &range {
            for j2 in &range {
                let (b1, b2) = (pv(*j1), pv(*j2));
                let z = Q::zero();
                let curve = if sign == Sign::Plus {
                    [
                        vec![lambda.clone(), b1, z.clone(), lambda.clone(), z.clone(), b2, z.clone(), z.clone()],
                        vec![z.clone(), z.clone(), z.clone(), z.clone(), q(1), z.clone(), z.clone(), z.clone()],
                        vec![z.clone(); 8],
                    ]
                } else {
                    [
                        vec![lambda.clone(), z.clone(), b1, lambda.clone(), z.clone(), z.clone(), z.clone(), b2],
                        vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), q(1), z.clone()],
                        vec![z.clone(); 8],
                    ]
                };
                rep.cells += 1;
                let v = integ.integrate(&curve, lo)?;
                if v.is_zero() {
                    continue;
                }
                let w1 = match j1 {
                    Some(j) => r1.pow(*j)?,
                    None => t1.clone(),
                };
                let w2 = match j2 {
                    Some(j) => r2.pow(*j)?,
                    None => t2.clone(),
                };
                total = total.add(&v.to_laurent().scale(&w1.mul(&w2)));
            }
        }
    }
    rep.balls += integ.balls;
    Ok(total)
}

/// Σ_k (χt)^{k₁+k₂} ∫_F avg φ(X·p^k n(x) ε k̄) dx over the finite window of torus cells.
fn oracle_rs(x: &TildeGl, phi: &Lcf, chi: &Q, params: &OracleParams, rep: &mut OracleReport) -> Result<LValue> {
    let p = phi.p;
    let n = x.n;
    let w = orbit_window(x, phi.support_floor(), p)?;
    let (lo, hi) = (w.lo_g, -w.lo_ginv);
    if lo <= hi && (lo < -params.window || hi > params.window) {
        return Err(Error::Window(format!(
            "torus cells [{lo}, {hi}] exceed the window ±{}",
            params.window
        )));
    }
    let nd = phi.invariance_depth();
    let mut group = Vec::new();
    let bor = upper_borel_reps(p, n, nd)?;
    for eps in torus_reps(p, n, nd)? {
        for k in &bor {
            group.push(eps.mul(k));
        }
    }
    let mut integ = CurveIntegrator::new(phi, n, &group, params.max_refine)?;
    let mut total = LValue::zero(p);
    let add = |v: Cyclo, e: i64, total: &mut LValue| {
        if !v.is_zero() {
            *total = total.add(&v.to_laurent().scale(&mono(&qpow_q(chi, e), e)));
        }
    };
    if n == 1 {
        for k in lo..=hi {
            rep.cells += 1;
            let g = QMat::from_fn(1, 1, |_, _| qpow(p, k));
            let v = integ.point(&x.act(&g)?.coords());
            add(v, k, &mut total);
        }
    } else {
        for k1 in lo..=hi {
            for k2 in lo..=hi {
                rep.cells += 1;
                let at = |s: i64| -> Result<Vec<Q>> {
                    let g = QMat::from_fn(2, 2, |r, c| match (r, c) {
                        (0, 0) => qpow(p, k1),
                        (0, 1) => qpow(p, k1) * q(s),
                        (1, 1) => qpow(p, k2),
                        _ => Q::zero(),
                    });
                    Ok(x.act(&g)?.coords())
                };
                let (c0, cp, cm) = (at(0)?, at(1)?, at(-1)?);
                let half = Q::new(1.into(), 2.into());
                let c1: Vec<Q> = cp.iter().zip(&cm).map(|(a, b)| (a - b) * &half).collect();
                let c2: Vec<Q> = (0..c0.len()).map(|j| (&cp[j] + &cm[j]) * &half - &c0[j]).collect();
                let start = (lo - k1).max(w.lo_ginv + k2);
                let v = integ.integrate(&[c0, c1, c2], start)?;
                add(v, k1 + k2, &mut total);
            }
        }
    }
    rep.balls += integ.balls;
    Ok(total)
}

/// Independent evaluation of I_X(φ, ξ, s) for X of central type or regular semisimple, n ≤ 2.
pub fn oracle_report(
    x: &TildeGl,
    phi: &Lcf,
    xi: &UnramifiedCharacter,
    base: &BaseField,
    params: &OracleParams,
) -> Result<OracleReport> {
    let mut rep = OracleReport { value: LValue::zero(base.p), cells: 0, balls: 0 };
    if !(1..=2).contains(&x.n) {
        return Err(Error::DeskLimit(format!("oracle integration for n = {} is beyond desk scale", x.n)));
    }
    if phi.ambient != (super::lcf::Ambient::TildeGl { n: x.n }) || phi.p != base.p {
        return Err(Error::Inconsistent("element and test function disagree on n or p".into()));
    }
    let chi = chi_at_p(xi, base);
    if phi.is_zero() {
        return Ok(rep);
    }
    rep.value = match central_decomposition(x) {
        Ok(cf) => {
            let core = oracle_central(phi, &cf.lambda, cf.sign, &chi, params, &mut rep)?;
            core.scale(&twist_factor(&cf.g, &chi, base.p))
        }
        Err(_) => {
            check_rs(x, phi, base)?;
            oracle_rs(x, phi, &chi, params, &mut rep)?
        }
    };
    Ok(rep)
}

pub fn oracle_integrate(
    x: &TildeGl,
    phi: &Lcf,
    xi: &UnramifiedCharacter,
    base: &BaseField,
    params: &OracleParams,
) -> Result<LaurentRational> {
    rational_value(&oracle_report(x, phi, xi, base, params)?.value)
}
