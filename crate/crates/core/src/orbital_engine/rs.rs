//! Closed-orbit integrals for regular semisimple X, summed over GL_n(F)/K.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::cyclo::Cyclo;
use super::kgroup::{k_reps, DESK_LIMIT};
use super::lcf::{Ambient, Lcf};
use super::tate::{chi_at_p, rational_value, LValue};
use crate::error::{Error, Result};
use crate::exact_linalg::QMat;
use crate::invariant_geometry::TildeGl;
use crate::lfactor_symbolic::LaurentRational;
use crate::padic_base::{q, qpow, qpow_q, vmin, BaseField, UnramifiedCharacter, Q};

/// Linear map on gl̃_n coordinates induced by X ↦ X·g.
pub fn action_matrix(n: usize, g: &QMat) -> Result<QMat> {
    let d = n * n + 2 * n;
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![Q::zero(); d];
        e[j] = q(1);
        cols.push(TildeGl::from_coords(n, &e).act(g)?.coords());
    }
    Ok(QMat::from_cols(&cols, d))
}

/// Valuation bounds for g with X·g supported in p^μ Λ₀: entries of g are ≥ lo_g, entries of g⁻¹ ≥ lo_ginv.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitWindow {
    pub lo_g: i64,
    pub lo_ginv: i64,
}

pub fn orbit_window(x: &TildeGl, floor: i64, p: u64) -> Result<OrbitWindow> {
    let n = x.n as i64;
    let nu = floor + (n - 1) * floor.min(0);
    let rinv = x.krylov().inverse().ok_or_else(|| Error::Domain("X is not regular semisimple (δ⁺ = 0)".into()))?;
    let kinv = x.row_krylov().inverse().ok_or_else(|| Error::Domain("X is not regular semisimple (δ⁻ = 0)".into()))?;
    Ok(OrbitWindow { lo_g: vmin(&kinv.data, p) + nu, lo_ginv: vmin(&rinv.data, p) + nu })
}

pub fn check_rs(x: &TildeGl, phi: &Lcf, base: &BaseField) -> Result<usize> {
    let n = x.n;
    if !(1..=2).contains(&n) {
        return Err(Error::DeskLimit(format!("orbital integrals for n = {n} are beyond desk scale (n ≤ 2)")));
    }
    if phi.ambient != (Ambient::TildeGl { n }) || phi.p != base.p {
        return Err(Error::Inconsistent("element and test function disagree on n or p".into()));
    }
    if x.dn().is_zero() || !x.quotient_point().is_regular_semisimple() {
        return Err(Error::Domain("X is not regular semisimple (d_n(X) = 0)".into()));
    }
    Ok(n)
}

/// φ^K(Y) = ∫_K φ(Y·k) dk as an exact average over K/K(p^N).
pub struct KAverager {
    maps: Vec<QMat>,
}

impl KAverager {
    pub fn new(phi: &Lcf, n: usize) -> Result<Self> {
        let reps = k_reps(phi.p, n, phi.invariance_depth())?;
        let maps = reps.iter().map(|k| action_matrix(n, k)).collect::<Result<Vec<_>>>()?;
        Ok(Self { maps })
    }

    pub fn eval(&self, phi: &Lcf, y: &[Q]) -> Cyclo {
        let p = phi.p;
        let mut acc = Cyclo::zero(p);
        for m in &self.maps {
            acc = acc.add(&phi.eval(&m.mul_vec(y)));
        }
        acc.mul(&Cyclo::rational(p, Q::new(1.into(), (self.maps.len() as i64).into())))
    }
}

/// Σ_{h ∈ GL_n(F)/K} χ(det h)|det h|^s φ^K(X·h) over upper-triangular Hermite representatives.
pub fn orbital_rs_cyclo(x: &TildeGl, phi: &Lcf, xi: &UnramifiedCharacter, base: &BaseField) -> Result<LValue> {
    let n = check_rs(x, phi, base)?;
    let p = base.p;
    if phi.is_zero() {
        return Ok(LValue::zero(p));
    }
    let w = orbit_window(x, phi.support_floor(), p)?;
    let (lo, hi) = (w.lo_g, -w.lo_ginv);
    let avg = KAverager::new(phi, n)?;
    let mut by_exp: BTreeMap<i64, Cyclo> = BTreeMap::new();
    let mut count = 0usize;
    let mut visit = |h: QMat, e: i64| -> Result<()> {
        count += 1;
        if count > DESK_LIMIT {
            return Err(Error::DeskLimit(format!("more than {DESK_LIMIT} Hermite cells")));
        }
        let val_ = avg.eval(phi, &x.act(&h)?.coords());
        if !val_.is_zero() {
            let slot = by_exp.entry(e).or_insert_with(|| Cyclo::zero(p));
            *slot = slot.add(&val_);
        }
        Ok(())
    };
    if n == 1 {
        for k in lo..=hi {
            visit(QMat::from_fn(1, 1, |_, _| qpow(p, k)), k)?;
        }
    } else {
        for a in lo..=hi {
            for b in lo..=hi {
                let l = lo.max(a + b + w.lo_ginv);
                let count_x = if l >= a { 1 } else { (p as i64).pow((a - l) as u32) };
                for j in 0..count_x {
                    let xq = if l >= a { Q::zero() } else { q(j) * qpow(p, l) };
                    let h = QMat::from_fn(2, 2, |r, c| match (r, c) {
                        (0, 0) => qpow(p, a),
                        (0, 1) => xq.clone(),
                        (1, 1) => qpow(p, b),
                        _ => Q::zero(),
                    });
                    visit(h, a + b)?;
                }
            }
        }
    }
    let chi = chi_at_p(xi, base);
    let mut acc = LValue::zero(p);
    for (e, c) in by_exp {
        acc = acc.add(&c.to_laurent().scale(&LaurentRational::monomial(qpow_q(&chi, e), e)));
    }
    Ok(acc)
}

pub fn orbital_rs(x: &TildeGl, phi: &Lcf, xi: &UnramifiedCharacter, base: &BaseField) -> Result<LaurentRational> {
    rational_value(&orbital_rs_cyclo(x, phi, xi, base)?)
}
