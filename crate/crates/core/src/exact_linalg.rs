//! Dense exact linear algebra over Q and E, polynomials over Q, and the
//! Hankel / minimal-recurrence machinery.

use crate::error::{Error, Result};
use crate::padic_base::{q, EtaleKind, EtaleScalar, Q};
use num_traits::{One, Zero};
use std::fmt::Debug;

pub trait Scalar: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_s(&self) -> bool;
    fn add_s(&self, o: &Self) -> Self;
    fn sub_s(&self, o: &Self) -> Self;
    fn mul_s(&self, o: &Self) -> Self;
    fn neg_s(&self) -> Self;
    fn try_inv(&self) -> Option<Self>;
}

impl Scalar for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn add_s(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_s(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_s(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl Scalar for EtaleScalar {
    fn zero_like(&self) -> Self {
        EtaleScalar::zero(self.kind)
    }
    fn one_like(&self) -> Self {
        EtaleScalar::one(self.kind)
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn add_s(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_s(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_s(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_s(&self) -> Self {
        self.neg()
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

pub type QMat = Matrix<Q>;
pub type EMat = Matrix<EtaleScalar>;

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Schema("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn filled(rows: usize, cols: usize, x: &T) -> Self {
        Matrix { rows, cols, data: vec![x.clone(); rows * cols] }
    }

    pub fn identity(n: usize, one: &T) -> Self {
        let zero = one.zero_like();
        Self::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn from_cols(cols: &[Vec<T>], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_s(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_s(b)).collect(),
        }
    }

    pub fn scale(&self, x: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul_s(x)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let zero = self.data.first().or(o.data.first()).map(|x| x.zero_like());
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = zero.clone().unwrap();
            for k in 0..self.cols {
                acc = acc.add_s(&self.get(i, k).mul_s(o.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for k in 0..self.cols {
                    acc = acc.add_s(&self.get(i, k).mul_s(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn vec_mul(&self, u: &[T]) -> Vec<T> {
        assert_eq!(self.rows, u.len());
        (0..self.cols)
            .map(|j| {
                let mut acc = u[0].zero_like();
                for k in 0..self.rows {
                    acc = acc.add_s(&u[k].mul_s(self.get(k, j)));
                }
                acc
            })
            .collect()
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Characteristic polynomial det(x − A), constant term first, leading 1 included.
    /// Berkowitz's algorithm: division-free, valid over any commutative ring.
    pub fn charpoly_coeffs(&self, one: &T) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let zero = one.zero_like();
        // coefficients highest degree first during the recursion
        let mut cur: Vec<T> = vec![one.clone()];
        for k in 0..n {
            // leading principal submatrix of size k+1: [[A_k, c],[r, a]]
            let a = self.get(k, k).clone();
            let col: Vec<T> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let row: Vec<T> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let sub = self.submatrix(0, 0, k, k);
            // Toeplitz column: 1, -a, -r c, -r A c, -r A^2 c, ...
            let mut t = vec![one.clone(), a.neg_s()];
            let mut w = col.clone();
            for _ in 0..k {
                let mut dot = zero.clone();
                for i in 0..k {
                    dot = dot.add_s(&row[i].mul_s(&w[i]));
                }
                t.push(dot.neg_s());
                if k > 0 {
                    w = sub.mul_vec(&w);
                }
            }
            let mut next = vec![zero.clone(); k + 2];
            for (i, ti) in t.iter().enumerate().take(k + 2) {
                for (j, cj) in cur.iter().enumerate() {
                    if i + j < k + 2 {
                        next[i + j] = next[i + j].add_s(&ti.mul_s(cj));
                    }
                }
            }
            cur = next;
        }
        cur.reverse();
        cur
    }

    pub fn det_with(&self, one: &T) -> T {
        let c = self.charpoly_coeffs(one);
        if self.rows.is_multiple_of(2) {
            c[0].clone()
        } else {
            c[0].neg_s()
        }
    }

    /// Inverse through Cayley–Hamilton; works over rings with zero divisors.
    pub fn inverse_with(&self, one: &T) -> Option<Self> {
        let n = self.rows;
        let c = self.charpoly_coeffs(one);
        let c0inv = c[0].try_inv()?;
        // A^{-1} = -(A^{n-1} + c_{n-1} A^{n-2} + ... + c_1) / c_0
        let mut acc = Self::identity(n, one);
        for k in (1..n).rev() {
            acc = self.mul(&acc).add(&Self::identity(n, one).scale(&c[k]));
        }
        Some(acc.scale(&c0inv.neg_s()))
    }

    pub fn pow(&self, k: usize, one: &T) -> Self {
        let mut r = Self::identity(self.rows, one);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, &Q::zero())
    }

    pub fn eye(n: usize) -> Self {
        Self::identity(n, &Q::one())
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    pub fn det(&self) -> Q {
        self.det_with(&Q::one())
    }

    pub fn inverse(&self) -> Option<Self> {
        self.inverse_with(&Q::one())
    }

    pub fn to_etale(&self, kind: EtaleKind) -> EMat {
        self.map(|x| EtaleScalar::from_q(x.clone(), kind))
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    /// Basis of {x : A x = 0}.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = rref(self);
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Q::zero(); self.cols];
                x[f] = Q::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = -r.get(i, f).clone();
                }
                x
            })
            .collect()
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &QMat) -> (QMat, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row >= m.rows {
            break;
        }
        let Some(piv) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else { continue };
        if piv != row {
            for j in 0..m.cols {
                m.data.swap(piv * m.cols + j, row * m.cols + j);
            }
        }
        let inv = m.get(row, col).recip();
        for j in 0..m.cols {
            let x = m.get(row, j) * &inv;
            m.set(row, j, x);
        }
        for i in 0..m.rows {
            if i != row && !m.get(i, col).is_zero() {
                let f = m.get(i, col).clone();
                for j in 0..m.cols {
                    let x = m.get(i, j) - &f * m.get(row, j);
                    m.set(i, j, x);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub rank: usize,
    pub solution: Option<Vec<Q>>,
    pub nullspace: Vec<Vec<Q>>,
}

/// Solve A x = b exactly; inconsistency is reported through `solution = None`.
pub fn solve_linear(a: &QMat, b: &[Q]) -> SolveOutcome {
    assert_eq!(a.rows, b.len());
    let aug = Matrix::from_fn(a.rows, a.cols + 1, |i, j| {
        if j < a.cols {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let (r, pivots) = rref(&aug);
    let rank = pivots.iter().filter(|&&c| c < a.cols).count();
    let nullspace = a.nullspace();
    if pivots.contains(&a.cols) {
        return SolveOutcome { rank, solution: None, nullspace };
    }
    let mut x = vec![Q::zero(); a.cols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = r.get(i, a.cols).clone();
    }
    SolveOutcome { rank, solution: Some(x), nullspace }
}

/// Polynomial over Q, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly { c: vec![Q::one()] }
    }

    pub fn constant(x: Q) -> Self {
        Self::new(vec![x])
    }

    /// x − a
    pub fn linear(a: &Q) -> Self {
        Self::new(vec![-a.clone(), Q::one()])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = Q::one();
        Poly { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, x: &Q) -> Self {
        Self::new(self.c.iter().map(|a| a * x).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        let lead_inv = d.lead().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let f = &r[k + dd] * &lead_inv;
            if !f.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &f * dj;
                }
            }
            quo[k] = f;
        }
        r.truncate(dd);
        (Self::new(quo), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (quo, r) = self.divrem(d);
        r.is_zero().then_some(quo)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·self + t·o = g monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let s = s0.sub(&qq.mul(&s1));
            s0 = s1;
            s1 = s;
            let t = t0.sub(&qq.mul(&t1));
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_matrix(&self, a: &QMat) -> QMat {
        let n = a.rows;
        let mut acc = QMat::zeros(n, n);
        for coef in self.c.iter().rev() {
            acc = acc.mul(a).add(&QMat::eye(n).scale(coef));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * q(i as i64)).collect())
    }

    /// Reverse coefficients: x^deg · P(1/x).
    pub fn reversed(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self::new(c)
    }
}

/// Monic polynomial; `coeffs` excludes the leading 1, so degree = coeffs.len().
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonicPolynomial {
    pub coeffs: Vec<Q>,
}

impl MonicPolynomial {
    pub fn from_poly(p: &Poly) -> Result<Self> {
        if p.is_zero() || !p.lead().is_one() {
            return Err(Error::Domain("polynomial is not monic".into()));
        }
        Ok(Self { coeffs: p.c[..p.c.len() - 1].to_vec() })
    }

    pub fn to_poly(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.push(Q::one());
        Poly::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn one() -> Self {
        Self { coeffs: vec![] }
    }

    /// Upper companion matrix: ones on the subdiagonal, −coeffs in the last column.
    /// Its characteristic polynomial is `self`, and e_1 is cyclic.
    pub fn companion(&self) -> QMat {
        let r = self.degree();
        QMat::from_fn(r, r, |i, j| {
            if j == r - 1 {
                -self.coeffs[i].clone()
            } else if i == j + 1 {
                Q::one()
            } else {
                Q::zero()
            }
        })
    }
}

pub fn charpoly(a: &QMat) -> MonicPolynomial {
    let c = a.charpoly_coeffs(&Q::one());
    MonicPolynomial { coeffs: c[..c.len() - 1].to_vec() }
}

pub fn hankel(moments: &[Q], r: usize) -> QMat {
    QMat::from_fn(r, r, |i, j| moments[i + j].clone())
}

pub fn hankel_det(moments: &[Q], r: usize) -> Q {
    if r == 0 {
        Q::one()
    } else {
        hankel(moments, r).det()
    }
}

/// Minimal monic recurrence of order `r` (or the largest nonsingular Hankel
/// order within the window when `r` is `None`).
pub fn minimal_recurrence(moments: &[Q], r: Option<usize>) -> Result<MonicPolynomial> {
    let len = moments.len();
    let r = match r {
        Some(r) => r,
        None => (0..=len / 2).rev().find(|&k| hankel_det(moments, k) != Q::zero()).unwrap_or(0),
    };
    if r == 0 {
        if let Some(k) = moments.iter().position(|m| !m.is_zero()) {
            return Err(Error::Inconsistent(format!(
                "Hankel order 1 is nonsingular (moment {k} nonzero) but r = 0 was requested"
            )));
        }
        return Ok(MonicPolynomial::one());
    }
    if len < 2 * r {
        return Err(Error::Inconsistent(format!(
            "moment window of length {len} is too short for Hankel order {r}"
        )));
    }
    let h = hankel(moments, r);
    if h.det().is_zero() {
        return Err(Error::Inconsistent(format!("Hankel matrix of order {r} is singular")));
    }
    let rhs: Vec<Q> = (0..r).map(|i| -moments[r + i].clone()).collect();
    let c = solve_linear(&h, &rhs).solution.expect("nonsingular Hankel system");
    for i in 0..len - r {
        let mut s = moments[i + r].clone();
        for j in 0..r {
            s += &c[j] * &moments[i + j];
        }
        if !s.is_zero() {
            return Err(Error::Inconsistent(format!(
                "Hankel order {} is nonsingular: recurrence of order {r} fails at index {}",
                r + 1,
                i + r
            )));
        }
    }
    if len > 2 * r && hankel_det(moments, r + 1) != Q::zero() {
        return Err(Error::Inconsistent(format!("Hankel order {} is nonsingular", r + 1)));
    }
    Ok(MonicPolynomial { coeffs: c })
}

/// Berlekamp–Massey over Q: the shortest monic recurrence generating the window.
pub fn berlekamp_massey(s: &[Q]) -> MonicPolynomial {
    // connection polynomial C(z) = 1 + c1 z + ... ; recurrence s_k + Σ c_i s_{k-i} = 0
    let mut c = vec![Q::one()];
    let mut b = vec![Q::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Q::one();
    for k in 0..s.len() {
        let mut d = s[k].clone();
        for i in 1..=l {
            if i < c.len() {
                d += &c[i] * &s[k - i];
            }
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let t = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Q::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] -= &coef * bi;
        }
        if 2 * l <= k {
            l = k + 1 - l;
            b = t;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.resize(l + 1, Q::zero());
    // reciprocal: x^l + c1 x^{l-1} + ... + c_l
    let coeffs: Vec<Q> = (0..l).map(|j| c[l - j].clone()).collect();
    MonicPolynomial { coeffs }
}

/// F_i = Q[x]/(P): element represented by a polynomial of degree < deg P.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientRingElement {
    pub modulus: MonicPolynomial,
    pub rep: Poly,
}

impl QuotientRingElement {
    pub fn new(modulus: MonicPolynomial, rep: Poly) -> Self {
        let rep = rep.rem(&modulus.to_poly());
        Self { modulus, rep }
    }

    /// The class of x.
    pub fn generator(modulus: MonicPolynomial) -> Self {
        Self::new(modulus, Poly::monomial(1))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.modulus.clone(), self.rep.add(&o.rep))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.modulus.clone(), self.rep.mul(&o.rep))
    }

    pub fn inv(&self) -> Result<Self> {
        let (g, s, _) = self.rep.ext_gcd(&self.modulus.to_poly());
        if g.degree() != Some(0) {
            return Err(Error::Domain("element is not invertible in the quotient ring".into()));
        }
        Ok(Self::new(self.modulus.clone(), s))
    }

    /// Matrix of multiplication on the power basis 1, x, …, x^{d-1} (columns = images).
    pub fn mult_matrix(&self) -> QMat {
        let d = self.modulus.degree();
        let cols: Vec<Vec<Q>> = (0..d)
            .map(|j| {
                let img = self.rep.mul(&Poly::monomial(j)).rem(&self.modulus.to_poly());
                (0..d).map(|i| img.coeff(i)).collect()
            })
            .collect();
        QMat::from_cols(&cols, d)
    }

    pub fn trace(&self) -> Q {
        let m = self.mult_matrix();
        (0..m.rows).fold(Q::zero(), |acc, i| acc + m.get(i, i))
    }

    pub fn norm(&self) -> Q {
        self.mult_matrix().det()
    }
}

/// Trace form matrix T_{ij} = tr(x^{i+j}) of Q[x]/(P).
pub fn trace_matrix(p: &MonicPolynomial) -> QMat {
    let d = p.degree();
    let alpha = QuotientRingElement::generator(p.clone());
    let mut powers = vec![QuotientRingElement::new(p.clone(), Poly::one())];
    for _ in 1..2 * d {
        let next = powers.last().unwrap().mul(&alpha);
        powers.push(next);
    }
    let tr: Vec<Q> = powers.iter().map(|e| e.trace()).collect();
    QMat::from_fn(d, d, |i, j| tr[i + j].clone())
}

pub fn discriminant(p: &MonicPolynomial) -> Q {
    trace_matrix(p).det()
}

/// Rational roots of a polynomial with rational coefficients.
pub fn rational_roots(p: &Poly) -> Vec<Q> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    if p.is_zero() {
        return vec![];
    }
    let mut lcm = BigInt::one();
    for c in &p.c {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p.c.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let mut shift = 0;
    while ints[shift].is_zero() {
        shift += 1;
        if !roots.contains(&Q::zero()) {
            roots.push(Q::zero());
        }
    }
    let a0 = ints[shift].clone();
    let an = ints.last().unwrap().clone();
    let divs = |n: &BigInt| -> Vec<BigInt> {
        let n = if n < &BigInt::zero() { -n } else { n.clone() };
        let mut out = Vec::new();
        let mut d = BigInt::one();
        while &d * &d <= n {
            if (&n % &d).is_zero() {
                out.push(d.clone());
                out.push(&n / &d);
            }
            d += 1;
        }
        out
    };
    for num in divs(&a0) {
        for den in divs(&an) {
            for sgn in [1, -1] {
                let r = Q::new(num.clone() * sgn, den.clone());
                if p.eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

/// Irreducibility over Q for degree ≤ 3; `None` above that.
pub fn is_irreducible_small(p: &Poly) -> Option<bool> {
    match p.degree() {
        None | Some(0) => Some(false),
        Some(1) => Some(true),
        Some(2) | Some(3) => Some(rational_roots(p).is_empty()),
        _ => None,
    }
}
