//! Invariants of the GL_n actions on gl̃_n, gl_{n+1} and S: δ±, Δ±, the
//! quotient map, Hankel strata, regularity, and the Cayley transform.

use crate::error::{Error, Result};
use crate::exact_linalg::{charpoly, hankel_det, EMat, Matrix, QMat, Scalar};
use crate::padic_base::{q, EtaleKind, EtaleScalar, Q};
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(Error::Schema(format!("bad sign '{c}'"))),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// X = (A, v, u) ∈ gl̃_n with right action (A, v, u)·g = (g⁻¹Ag, g⁻¹v, ug).
#[derive(Debug, Clone, PartialEq)]
pub struct TildeGl {
    pub n: usize,
    pub a: QMat,
    pub v: Vec<Q>,
    pub u: Vec<Q>,
}

impl TildeGl {
    pub fn new(a: QMat, v: Vec<Q>, u: Vec<Q>) -> Result<Self> {
        let n = a.rows;
        if !a.is_square() || v.len() != n || u.len() != n {
            return Err(Error::Schema(format!(
                "inconsistent dimensions: A is {}x{}, |v| = {}, |u| = {}",
                a.rows,
                a.cols,
                v.len(),
                u.len()
            )));
        }
        Ok(Self { n, a, v, u })
    }

    pub fn from_ints(a: &[&[i64]], v: &[i64], u: &[i64]) -> Self {
        Self::new(
            QMat::from_ints(a),
            v.iter().map(|&x| q(x)).collect(),
            u.iter().map(|&x| q(x)).collect(),
        )
        .unwrap()
    }

    pub fn zero(n: usize) -> Self {
        Self { n, a: QMat::zeros(n, n), v: vec![Q::zero(); n], u: vec![Q::zero(); n] }
    }

    /// Z_λ^+ = (J_λ, e_n, 0) with J_λ the upper Jordan block; Z_λ^- = (J_λᵗ, 0, e_nᵗ).
    pub fn central_rep(n: usize, lambda: &Q, sign: Sign) -> Self {
        let jordan = QMat::from_fn(n, n, |i, j| {
            if i == j {
                lambda.clone()
            } else if j == i + 1 {
                Q::one()
            } else {
                Q::zero()
            }
        });
        let mut e_last = vec![Q::zero(); n];
        if n > 0 {
            e_last[n - 1] = Q::one();
        }
        let plus = Self { n, a: jordan, v: e_last, u: vec![Q::zero(); n] };
        match sign {
            Sign::Plus => plus,
            Sign::Minus => plus.transpose_dual(),
        }
    }

    pub fn act(&self, g: &QMat) -> Result<Self> {
        let gi = g.inverse().ok_or_else(|| Error::Domain("g is not invertible".into()))?;
        Ok(Self {
            n: self.n,
            a: gi.mul(&self.a).mul(g),
            v: gi.mul_vec(&self.v),
            u: g.vec_mul(&self.u),
        })
    }

    /// Transpose duality (A, v, u) ↦ (Aᵗ, uᵗ, vᵗ).
    pub fn transpose_dual(&self) -> Self {
        Self { n: self.n, a: self.a.transpose(), v: self.u.clone(), u: self.v.clone() }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            n: self.n,
            a: self.a.scale(c),
            v: self.v.iter().map(|x| x * c).collect(),
            u: self.u.iter().map(|x| x * c).collect(),
        }
    }

    /// Columns v, Av, …, A^{n-1}v.
    pub fn krylov(&self) -> QMat {
        let mut cols = Vec::with_capacity(self.n);
        let mut w = self.v.clone();
        for _ in 0..self.n {
            cols.push(w.clone());
            w = self.a.mul_vec(&w);
        }
        QMat::from_cols(&cols, self.n)
    }

    /// Rows u, uA, …, uA^{n-1}.
    pub fn row_krylov(&self) -> QMat {
        let mut rows = Vec::with_capacity(self.n);
        let mut w = self.u.clone();
        for _ in 0..self.n {
            rows.push(w.clone());
            w = self.a.vec_mul(&w);
        }
        QMat::from_rows(rows).unwrap_or_else(|_| QMat::zeros(0, 0))
    }

    pub fn delta(&self, sign: Sign) -> Q {
        if self.n == 0 {
            return Q::one();
        }
        match sign {
            Sign::Plus => self.krylov().det(),
            Sign::Minus => self.row_krylov().det(),
        }
    }

    /// uA^i v for i < count.
    pub fn moments(&self, count: usize) -> Vec<Q> {
        let mut out = Vec::with_capacity(count);
        let mut w = self.v.clone();
        for _ in 0..count {
            out.push(self.u.iter().zip(&w).fold(Q::zero(), |acc, (a, b)| acc + a * b));
            if self.n > 0 {
                w = self.a.mul_vec(&w);
            }
        }
        out
    }

    pub fn quotient_point(&self) -> QuotientPoint {
        QuotientPoint {
            charpoly: charpoly(&self.a).coeffs,
            moments: self.moments(self.n),
            d: None,
        }
    }

    /// d_n(X) = δ⁺(X)·δ⁻(X).
    pub fn dn(&self) -> Q {
        self.quotient_point().d_values().last().cloned().unwrap_or_else(Q::one)
    }

    pub fn is_regular(&self) -> bool {
        is_regular(self)
    }

    pub fn is_integral(&self, p: u64) -> bool {
        use crate::padic_base::val;
        self.a.data.iter().chain(&self.v).chain(&self.u).all(|x| val(x, p) >= 0)
    }

    /// Flattened coordinates (A row-major, then v, then u).
    pub fn coords(&self) -> Vec<Q> {
        self.a.data.iter().chain(&self.v).chain(&self.u).cloned().collect()
    }

    pub fn from_coords(n: usize, c: &[Q]) -> Self {
        let a = QMat { rows: n, cols: n, data: c[..n * n].to_vec() };
        Self { n, a, v: c[n * n..n * n + n].to_vec(), u: c[n * n + n..n * n + 2 * n].to_vec() }
    }
}

/// Image in the GIT quotient: monic characteristic polynomial (constant term
/// first, leading 1 omitted) and the moments uA^i v, i < n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientPoint {
    pub charpoly: Vec<Q>,
    pub moments: Vec<Q>,
    /// corner coordinate when the point comes from gl_{n+1}
    pub d: Option<Q>,
}

impl QuotientPoint {
    pub fn new(charpoly: Vec<Q>, moments: Vec<Q>) -> Result<Self> {
        if charpoly.len() != moments.len() {
            return Err(Error::Schema(format!(
                "charpoly has {} coefficients but {} moments were given",
                charpoly.len(),
                moments.len()
            )));
        }
        Ok(Self { charpoly, moments, d: None })
    }

    pub fn n(&self) -> usize {
        self.charpoly.len()
    }

    pub fn charpoly_poly(&self) -> crate::exact_linalg::Poly {
        crate::exact_linalg::MonicPolynomial { coeffs: self.charpoly.clone() }.to_poly()
    }

    /// Moments extended through the Cayley–Hamilton recurrence.
    pub fn extended_moments(&self, count: usize) -> Vec<Q> {
        let n = self.n();
        let mut m = self.moments.clone();
        while m.len() < count {
            let i = m.len() - n;
            let mut s = Q::zero();
            for j in 0..n {
                s -= &self.charpoly[j] * &m[i + j];
            }
            m.push(s);
        }
        m.truncate(count.max(n));
        m
    }

    /// Hankel determinants d_1, …, d_n.
    pub fn d_values(&self) -> Vec<Q> {
        let n = self.n();
        let m = self.extended_moments(2 * n);
        (1..=n).map(|r| hankel_det(&m, r)).collect()
    }

    /// Largest r with d_r ≠ 0 (0 when none).
    pub fn stratum(&self) -> usize {
        self.d_values().iter().rposition(|d| !d.is_zero()).map_or(0, |i| i + 1)
    }

    pub fn is_regular_semisimple(&self) -> bool {
        self.n() == 0 || self.stratum() == self.n()
    }
}

/// Regularity through the infinitesimal stabilizer {M : [A,M]=0, Mv=0, uM=0}.
pub fn is_regular(x: &TildeGl) -> bool {
    let n = x.n;
    if n == 0 {
        return true;
    }
    let unknowns = n * n;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let idx = |i: usize, j: usize| i * n + j;
    // (MA − AM)_{ij} = Σ_k M_ik A_kj − A_ik M_kj
    for i in 0..n {
        for j in 0..n {
            let mut r = vec![Q::zero(); unknowns];
            for k in 0..n {
                r[idx(i, k)] += x.a.get(k, j);
                r[idx(k, j)] -= x.a.get(i, k);
            }
            rows.push(r);
        }
    }
    for i in 0..n {
        let mut r = vec![Q::zero(); unknowns];
        for k in 0..n {
            r[idx(i, k)] += &x.v[k];
        }
        rows.push(r);
    }
    for j in 0..n {
        let mut r = vec![Q::zero(); unknowns];
        for k in 0..n {
            r[idx(k, j)] += &x.u[k];
        }
        rows.push(r);
    }
    QMat::from_rows(rows).unwrap().rank() == unknowns
}

/// Element of gl_{n+1} split as [[A, v], [u, d]].
#[derive(Debug, Clone, PartialEq)]
pub struct GlNext {
    pub m: QMat,
}

impl GlNext {
    pub fn new(m: QMat) -> Result<Self> {
        if !m.is_square() || m.rows == 0 {
            return Err(Error::Schema("gl_{n+1} element must be a nonempty square matrix".into()));
        }
        Ok(Self { m })
    }

    pub fn split(&self) -> (TildeGl, Q) {
        let n = self.m.rows - 1;
        let a = self.m.submatrix(0, 0, n, n);
        let v = (0..n).map(|i| self.m.get(i, n).clone()).collect();
        let u = (0..n).map(|j| self.m.get(n, j).clone()).collect();
        (TildeGl { n, a, v, u }, self.m.get(n, n).clone())
    }

    pub fn join(x: &TildeGl, d: &Q) -> Self {
        let n = x.n;
        let m = QMat::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => x.a.get(i, j).clone(),
            (true, false) => x.v[i].clone(),
            (false, true) => x.u[j].clone(),
            (false, false) => d.clone(),
        });
        Self { m }
    }

    /// g⁻¹ X g with g ∈ GL_n embedded as diag(g, 1).
    pub fn act(&self, g: &QMat) -> Result<Self> {
        let (x, d) = self.split();
        Ok(Self::join(&x.act(g)?, &d))
    }

    pub fn delta(&self, sign: Sign) -> Q {
        self.split().0.delta(sign)
    }

    /// (−1)^n det(e, Xe, …, X^n e) resp. the row version, with e = e_{n+1}.
    pub fn delta_via_powers(&self, sign: Sign) -> Q {
        delta_via_powers(&self.m, sign, &Q::one())
    }

    pub fn quotient_point(&self) -> QuotientPoint {
        let (x, d) = self.split();
        let mut qp = x.quotient_point();
        qp.d = Some(d);
        qp
    }
}

fn delta_via_powers<T: Scalar>(m: &Matrix<T>, sign: Sign, one: &T) -> T {
    let n1 = m.rows;
    let zero = one.zero_like();
    let mut e = vec![zero; n1];
    e[n1 - 1] = one.clone();
    let mut vecs = Vec::with_capacity(n1);
    let mut w = e;
    for _ in 0..n1 {
        vecs.push(w.clone());
        w = match sign {
            Sign::Plus => m.mul_vec(&w),
            Sign::Minus => m.vec_mul(&w),
        };
    }
    let mat = match sign {
        Sign::Plus => Matrix::from_cols(&vecs, n1),
        Sign::Minus => Matrix::from_rows(vecs).unwrap(),
    };
    let d = mat.det_with(one);
    if (n1 - 1) % 2 == 1 {
        d.neg_s()
    } else {
        d
    }
}

/// x ∈ S: an (n+1)×(n+1) matrix over E with x·x^c = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SElement {
    pub x: EMat,
}

pub fn conj_matrix(x: &EMat) -> EMat {
    x.map(|a| a.conj())
}

impl SElement {
    pub fn new(x: EMat) -> Result<Self> {
        if !x.is_square() || x.rows == 0 {
            return Err(Error::Schema("S element must be a nonempty square matrix".into()));
        }
        let kind = x.data[0].kind;
        let prod = x.mul(&conj_matrix(&x));
        if prod != EMat::identity(x.rows, &EtaleScalar::one(kind)) {
            return Err(Error::Domain("x·x^c ≠ 1: not a point of S".into()));
        }
        Ok(Self { x })
    }

    pub fn kind(&self) -> EtaleKind {
        self.x.data[0].kind
    }

    pub fn n(&self) -> usize {
        self.x.rows - 1
    }

    pub fn delta(&self, sign: Sign) -> EtaleScalar {
        let n = self.n();
        let one = EtaleScalar::one(self.kind());
        if n == 0 {
            return one;
        }
        let a = self.x.submatrix(0, 0, n, n);
        let vecs: Vec<Vec<EtaleScalar>> = match sign {
            Sign::Plus => {
                let mut w: Vec<EtaleScalar> = (0..n).map(|i| self.x.get(i, n).clone()).collect();
                let mut out = Vec::new();
                for _ in 0..n {
                    out.push(w.clone());
                    w = a.mul_vec(&w);
                }
                out
            }
            Sign::Minus => {
                let mut w: Vec<EtaleScalar> = (0..n).map(|j| self.x.get(n, j).clone()).collect();
                let mut out = Vec::new();
                for _ in 0..n {
                    out.push(w.clone());
                    w = a.vec_mul(&w);
                }
                out
            }
        };
        let mat = match sign {
            Sign::Plus => Matrix::from_cols(&vecs, n),
            Sign::Minus => Matrix::from_rows(vecs).unwrap(),
        };
        mat.det_with(&one)
    }

    pub fn delta_via_powers(&self, sign: Sign) -> EtaleScalar {
        delta_via_powers(&self.x, sign, &EtaleScalar::one(self.kind()))
    }

    pub fn act(&self, g: &QMat) -> Result<Self> {
        let n = self.n();
        let kind = self.kind();
        let big = QMat::from_fn(n + 1, n + 1, |i, j| {
            if i < n && j < n {
                g.get(i, j).clone()
            } else if i == j {
                Q::one()
            } else {
                Q::zero()
            }
        });
        let gi = big.inverse().ok_or_else(|| Error::Domain("g is not invertible".into()))?;
        Ok(Self { x: gi.to_etale(kind).mul(&self.x).mul(&big.to_etale(kind)) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CayleyParams {
    pub tau: EtaleScalar,
    pub sigma: EtaleScalar,
}

impl CayleyParams {
    pub fn new(tau: EtaleScalar, sigma: EtaleScalar) -> Result<Self> {
        if tau.conj() != tau.neg() {
            return Err(Error::Config("τ must satisfy τ^c = −τ".into()));
        }
        if tau.inv().is_err() {
            return Err(Error::Config("τ must be invertible".into()));
        }
        if sigma.norm() != Q::one() || sigma.mul(&sigma.conj()) != EtaleScalar::one(sigma.kind) {
            return Err(Error::Config("σ must satisfy σσ^c = 1".into()));
        }
        if tau.kind != sigma.kind {
            return Err(Error::Config("τ and σ live in different algebras".into()));
        }
        Ok(Self { tau, sigma })
    }

    /// τ = √d (resp. (1, −1)), σ = 1.
    pub fn standard(kind: EtaleKind) -> Self {
        Self { tau: EtaleScalar::imaginary_unit(kind), sigma: EtaleScalar::one(kind) }
    }

    pub fn kind(&self) -> EtaleKind {
        self.tau.kind
    }
}

/// 𝔠_σ(Y) = −σ(1 + τ⁻¹Y)(1 − τ⁻¹Y)⁻¹ = σ − 2σ(1 − τ⁻¹Y)⁻¹.
pub fn cayley_to_group(y: &GlNext, params: &CayleyParams) -> Result<SElement> {
    let kind = params.kind();
    let one = EtaleScalar::one(kind);
    let n1 = y.m.rows;
    let tinv = params.tau.inv()?;
    let z = y.m.to_etale(kind).scale(&tinv);
    let m = EMat::identity(n1, &one).sub(&z);
    let minv = m
        .inverse_with(&one)
        .ok_or_else(|| Error::Domain("outside Cayley chart: 1 − τ⁻¹Y is singular".into()))?;
    let two_sigma = params.sigma.scale(&q(2));
    let x = EMat::identity(n1, &params.sigma).sub(&minv.scale(&two_sigma));
    SElement::new(x)
}

/// Inverse Cayley map: Y = τ(x − σ)⁻¹(x + σ), which must be rational.
pub fn cayley_to_lie(x: &SElement, params: &CayleyParams) -> Result<GlNext> {
    let kind = params.kind();
    let one = EtaleScalar::one(kind);
    let n1 = x.x.rows;
    let s = EMat::identity(n1, &params.sigma);
    let minus = x.x.sub(&s);
    let inv = minus
        .inverse_with(&one)
        .ok_or_else(|| Error::Domain("outside Cayley chart: x − σ is singular".into()))?;
    let y = inv.mul(&x.x.add(&s)).scale(&params.tau);
    let data: Option<Vec<Q>> = y.data.iter().map(|e| e.as_rational()).collect();
    let data = data.ok_or_else(|| Error::Domain("inverse Cayley image is not rational".into()))?;
    GlNext::new(QMat { rows: n1, cols: n1, data })
}

/// Right-hand side factor (−2στ⁻¹)^{n(n+1)/2} det(1 − τ⁻¹Y)^{−n} of the Δ±/δ± identity.
pub fn cayley_delta_factor(y: &GlNext, params: &CayleyParams) -> Result<EtaleScalar> {
    let kind = params.kind();
    let one = EtaleScalar::one(kind);
    let n1 = y.m.rows;
    let n = n1 - 1;
    let tinv = params.tau.inv()?;
    let m = EMat::identity(n1, &one).sub(&y.m.to_etale(kind).scale(&tinv));
    let det = m.det_with(&one);
    let detinv = det.inv().map_err(|_| Error::Domain("outside Cayley chart".into()))?;
    let base = params.sigma.mul(&tinv).scale(&q(-2));
    let mut r = one.clone();
    for _ in 0..n * (n + 1) / 2 {
        r = r.mul(&base);
    }
    for _ in 0..n {
        r = r.mul(&detinv);
    }
    Ok(r)
}
