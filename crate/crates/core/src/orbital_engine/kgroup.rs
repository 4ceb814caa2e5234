//! Finite coset representatives in K = GL_n(𝒪) for n ≤ 2.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_linalg::QMat;
use crate::padic_base::{q, Q};

/// Enumeration beyond this many representatives is refused.
pub const DESK_LIMIT: usize = 50_000;

fn pw(p: u64, k: i64) -> i64 {
    (p as i64).pow(k.max(0) as u32)
}

fn m2(a: i64, b: i64, c: i64, d: i64) -> QMat {
    QMat::from_ints(&[&[a, b], &[c, d]])
}

/// Representatives of B(𝒪)\K/K(p^N) for the upper Borel B, i.e. P¹(𝒪/p^N) via bottom rows.
pub fn upper_borel_reps(p: u64, n: usize, depth: i64) -> Result<Vec<QMat>> {
    match n {
        0 | 1 => Ok(vec![QMat::eye(n)]),
        2 => {
            if depth <= 0 {
                return Ok(vec![QMat::eye(2)]);
            }
            let count = (pw(p, depth) + pw(p, depth - 1)) as usize;
            guard(count)?;
            let mut out = Vec::with_capacity(count);
            for c in 0..pw(p, depth) {
                out.push(m2(1, 0, c, 1));
            }
            for d in 0..pw(p, depth - 1) {
                out.push(m2(0, -1, 1, p as i64 * d));
            }
            Ok(out)
        }
        _ => Err(Error::DeskLimit(format!("coset enumeration for n = {n} is beyond desk scale (n ≤ 2)"))),
    }
}

/// Representatives of B⁻(𝒪)\K/K(p^N) for the lower Borel, via top rows.
pub fn lower_borel_reps(p: u64, n: usize, depth: i64) -> Result<Vec<QMat>> {
    Ok(upper_borel_reps(p, n, depth)?.iter().map(|k| k.transpose().inverse().unwrap()).collect())
}

/// Units of 𝒪 modulo 1 + p^N.
pub fn unit_reps(p: u64, depth: i64) -> Vec<i64> {
    if depth <= 0 {
        return vec![1];
    }
    (1..pw(p, depth)).filter(|x| x % p as i64 != 0).collect()
}

/// Diagonal torus A(𝒪) modulo A(1 + p^N).
pub fn torus_reps(p: u64, n: usize, depth: i64) -> Result<Vec<QMat>> {
    let units = unit_reps(p, depth);
    let count = units.len().pow(n as u32);
    guard(count)?;
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for &e in &units {
                let mut v: Vec<i64> = prefix.clone();
                v.push(e);
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out
        .into_iter()
        .map(|d| QMat::from_fn(n, n, |i, j| if i == j { q(d[i]) } else { Q::zero() }))
        .collect())
}

/// Representatives of K/K(p^N), each carrying equal volume.
pub fn k_reps(p: u64, n: usize, depth: i64) -> Result<Vec<QMat>> {
    if depth <= 0 {
        return Ok(vec![QMat::eye(n)]);
    }
    match n {
        0 => Ok(vec![QMat::eye(0)]),
        1 => Ok(unit_reps(p, depth).into_iter().map(|e| QMat::from_ints(&[&[e]])).collect()),
        2 => {
            let tor = torus_reps(p, 2, depth)?;
            let bor = upper_borel_reps(p, 2, depth)?;
            let count = tor.len() * bor.len() * pw(p, depth) as usize;
            guard(count)?;
            let mut out = Vec::with_capacity(count);
            for e in &tor {
                for o in 0..pw(p, depth) {
                    let eo = e.mul(&m2(1, o, 0, 1));
                    for k in &bor {
                        out.push(eo.mul(k));
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::DeskLimit(format!("K-average for n = {n} is beyond desk scale (n ≤ 2)"))),
    }
}

fn guard(count: usize) -> Result<()> {
    if count > DESK_LIMIT {
        return Err(Error::DeskLimit(format!(
            "{count} coset representatives exceed the desk limit of {DESK_LIMIT}"
        )));
    }
    Ok(())
}

pub fn is_integral_unimodular(k: &QMat, p: u64) -> bool {
    use crate::padic_base::val;
    k.data.iter().all(|x| val(x, p) >= 0) && val(&k.det(), p) == 0 && !k.det().is_zero()
}
