//! Descent of quotient points and the classification of regular orbits by ε-type.

use crate::error::{Error, Result};
use crate::exact_linalg::{
    discriminant, is_irreducible_small, minimal_recurrence, rational_roots, MonicPolynomial, Poly,
    QMat, QuotientRingElement,
};
use crate::invariant_geometry::{QuotientPoint, Sign, TildeGl};
use crate::padic_base::{residue_mod, val, Q};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct Stratification {
    pub r: usize,
    pub a0: QuotientPoint,
    pub q0: MonicPolynomial,
    pub residual: MonicPolynomial,
}

pub fn stratify(a: &QuotientPoint) -> Result<Stratification> {
    let n = a.n();
    let r = a.stratum();
    let m = a.extended_moments(2 * n);
    let q0 = minimal_recurrence(&m, Some(r))?;
    let (quo, rem) = a.charpoly_poly().divrem(&q0.to_poly());
    if !rem.is_zero() {
        return Err(Error::Inconsistent(
            "inconsistent quotient point: recurrence polynomial does not divide the characteristic polynomial".into(),
        ));
    }
    let a0 = QuotientPoint::new(q0.coeffs.clone(), m[..r].to_vec())?;
    Ok(Stratification { r, a0, q0, residual: MonicPolynomial::from_poly(&quo)? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub poly: MonicPolynomial,
    pub mult: usize,
}

impl Factor {
    pub fn deg(&self) -> usize {
        self.poly.degree()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentData {
    pub n: usize,
    pub r: usize,
    pub a0: QuotientPoint,
    pub q0: MonicPolynomial,
    pub factors: Vec<Factor>,
    pub alpha: Vec<QuotientRingElement>,
}

impl DescentData {
    pub fn k(&self) -> usize {
        self.factors.len()
    }
}

/// Factor a polynomial whose irreducible factors are linear except possibly
/// one squarefree remainder of degree ≤ 3.
pub fn factor_small(p: &MonicPolynomial) -> Result<Vec<Factor>> {
    let mut rest = p.to_poly();
    let mut out: Vec<Factor> = Vec::new();
    for root in rational_roots(&rest) {
        let lin = Poly::linear(&root);
        let mut mult = 0;
        while let Some(qq) = rest.exact_div(&lin) {
            rest = qq;
            mult += 1;
        }
        out.push(Factor { poly: MonicPolynomial::from_poly(&lin)?, mult });
    }
    if rest.deg() > 0 {
        // remaining part has no rational roots; split off its squarefree kernel
        let g = rest.gcd(&rest.derivative());
        let core = rest.exact_div(&g).unwrap().monic();
        match is_irreducible_small(&core) {
            Some(true) => {
                let mut mult = 0;
                while let Some(qq) = rest.exact_div(&core) {
                    rest = qq;
                    mult += 1;
                }
                if rest.deg() > 0 {
                    return Err(Error::Unsupported("factorization beyond small degree".into()));
                }
                out.push(Factor { poly: MonicPolynomial::from_poly(&core)?, mult });
            }
            _ => {
                return Err(Error::Unsupported(
                    "automatic factorization only handles degree ≤ 3 irreducible parts; supply a certificate"
                        .into(),
                ))
            }
        }
    }
    out.sort_by(|a, b| {
        (a.deg(), format!("{:?}", a.poly.coeffs)).cmp(&(b.deg(), format!("{:?}", b.poly.coeffs)))
    });
    Ok(out)
}

pub fn descend(a: &QuotientPoint, factors: Option<Vec<Factor>>) -> Result<DescentData> {
    let st = stratify(a)?;
    let factors = match factors {
        Some(f) => f,
        None => factor_small(&st.residual)?,
    };
    let mut failures = Vec::new();
    let mut prod = Poly::one();
    for f in &factors {
        prod = prod.mul(&f.poly.to_poly().pow(f.mult));
        if f.mult == 0 {
            failures.push(format!("factor {:?} has multiplicity 0", f.poly.coeffs));
        }
        match is_irreducible_small(&f.poly.to_poly()) {
            Some(false) => failures.push(format!("factor {:?} is reducible", f.poly.coeffs)),
            Some(true) => {}
            None => {} // accepted as certified input
        }
    }
    for (i, f) in factors.iter().enumerate() {
        for g in &factors[i + 1..] {
            if f.poly.to_poly().gcd(&g.poly.to_poly()).deg() > 0 {
                failures.push(format!("factors {:?} and {:?} are not coprime", f.poly.coeffs, g.poly.coeffs));
            }
        }
    }
    if prod != st.residual.to_poly() {
        failures.push("product of factors differs from the residual characteristic polynomial".into());
    }
    if !failures.is_empty() {
        return Err(Error::Inconsistent(format!("bad factorization certificate: {}", failures.join("; "))));
    }
    let alpha = factors.iter().map(|f| QuotientRingElement::generator(f.poly.clone())).collect();
    Ok(DescentData { n: a.n(), r: st.r, a0: st.a0, q0: st.q0, factors, alpha })
}

/// X₀ = (companion of Q₀, e₁, first r moments): Krylov matrix is the identity.
pub fn realize_a0(dd: &DescentData) -> TildeGl {
    let r = dd.r;
    if r == 0 {
        return TildeGl::zero(0);
    }
    let a = dd.q0.companion();
    let mut v = vec![Q::zero(); r];
    v[0] = Q::one();
    TildeGl::new(a, v, dd.a0.moments.clone()).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssemblyOptions {
    pub reverse_power_basis: bool,
    pub reverse_components: bool,
}

/// Restriction of scalars of Z^ε_α over F_i = Q[x]/(P_i), size n_i, to Q^{n_i d_i}
/// with basis e_k α^j (k-major), u through the trace form.
pub fn central_component(factor: &Factor, sign: Sign, reverse_power_basis: bool) -> TildeGl {
    let d = factor.deg();
    let ni = factor.mult;
    let m = ni * d;
    let alpha = QuotientRingElement::generator(factor.poly.clone());
    let ma = alpha.mult_matrix();
    let mut a = QMat::zeros(m, m);
    let idx = |k: usize, j: usize| k * d + if reverse_power_basis { d - 1 - j } else { j };
    // Jordan block over F_i: α on the diagonal, 1 above (Z⁺) or below (Z⁻)
    for k in 0..ni {
        for i in 0..d {
            for j in 0..d {
                a.set(idx(k, i), idx(k, j), ma.get(i, j).clone());
            }
        }
        if k + 1 < ni {
            for j in 0..d {
                let (r, c) = match sign {
                    Sign::Plus => (idx(k, j), idx(k + 1, j)),
                    Sign::Minus => (idx(k + 1, j), idx(k, j)),
                };
                a.set(r, c, Q::one());
            }
        }
    }
    let mut v = vec![Q::zero(); m];
    let mut u = vec![Q::zero(); m];
    match sign {
        Sign::Plus => v[idx(ni - 1, 0)] = Q::one(),
        Sign::Minus => {
            let mut pw = QuotientRingElement::new(factor.poly.clone(), Poly::one());
            for j in 0..d {
                u[idx(ni - 1, j)] = pw.trace();
                pw = pw.mul(&alpha);
            }
        }
    }
    TildeGl { n: m, a, v, u }
}

/// Direct sum of components.
pub fn direct_sum(parts: &[TildeGl]) -> TildeGl {
    let n: usize = parts.iter().map(|x| x.n).sum();
    let mut a = QMat::zeros(n, n);
    let mut v = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut off = 0;
    for x in parts {
        for i in 0..x.n {
            for j in 0..x.n {
                a.set(off + i, off + j, x.a.get(i, j).clone());
            }
        }
        v.extend(x.v.iter().cloned());
        u.extend(x.u.iter().cloned());
        off += x.n;
    }
    TildeGl { n, a, v, u }
}

/// ι((A₁,v₁,u₁),(A₂,v₂,u₂)) = ([[A₁, v′u₂],[v₂u′, A₂]], (v₁,0), (u₁,0)).
pub fn iota(x0: &TildeGl, x2: &TildeGl) -> Result<TildeGl> {
    let r = x0.n;
    let s = x2.n;
    if r == 0 {
        return Ok(x2.clone());
    }
    // u′ A₁^i v₁ = δ_{i,r−1}: u′ K = e_r with K the Krylov matrix
    let k = x0.krylov();
    let mut e = vec![Q::zero(); r];
    e[r - 1] = Q::one();
    let kinv = k.inverse().ok_or_else(|| Error::Domain("X₀ is not in the + locus".into()))?;
    let uprime = kinv.vec_mul(&e);
    // u₁ A₁^i v′ = δ_{i,r−1}: R v′ = e_r
    let rk = x0.row_krylov();
    let rinv = rk.inverse().ok_or_else(|| Error::Domain("X₀ is not in the − locus".into()))?;
    let vprime = rinv.mul_vec(&e);
    let n = r + s;
    let mut a = QMat::zeros(n, n);
    for i in 0..r {
        for j in 0..r {
            a.set(i, j, x0.a.get(i, j).clone());
        }
        for j in 0..s {
            a.set(i, r + j, &vprime[i] * &x2.u[j]);
        }
    }
    for i in 0..s {
        for j in 0..r {
            a.set(r + i, j, &x2.v[i] * &uprime[j]);
        }
        for j in 0..s {
            a.set(r + i, r + j, x2.a.get(i, j).clone());
        }
    }
    let mut v = x0.v.clone();
    v.extend(std::iter::repeat_n(Q::zero(), s));
    let mut u = x0.u.clone();
    u.extend(std::iter::repeat_n(Q::zero(), s));
    Ok(TildeGl { n, a, v, u })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRep {
    pub epsilon: Vec<Sign>,
    pub x: TildeGl,
    pub x0: TildeGl,
    pub components: Vec<TildeGl>,
}

impl OrbitRep {
    pub fn epsilon_string(&self) -> String {
        self.epsilon.iter().map(|s| s.symbol()).collect()
    }
}

pub fn assemble(dd: &DescentData, eps: &[Sign], opts: AssemblyOptions) -> Result<OrbitRep> {
    if eps.len() != dd.k() {
        return Err(Error::Schema(format!("expected {} signs, got {}", dd.k(), eps.len())));
    }
    let x0 = realize_a0(dd);
    let comps: Vec<TildeGl> = dd
        .factors
        .iter()
        .zip(eps)
        .map(|(f, &s)| central_component(f, s, opts.reverse_power_basis))
        .collect();
    let mut order: Vec<usize> = (0..comps.len()).collect();
    if opts.reverse_components {
        order.reverse();
    }
    let ordered: Vec<TildeGl> = order.iter().map(|&i| comps[i].clone()).collect();
    let x = iota(&x0, &direct_sum(&ordered))?;
    Ok(OrbitRep { epsilon: eps.to_vec(), x, x0, components: comps })
}

pub fn all_sign_vectors(k: usize) -> Vec<Vec<Sign>> {
    (0..1usize << k)
        .map(|mask| {
            (0..k).map(|i| if mask >> (k - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect()
        })
        .collect()
}

pub fn orbit_representatives(dd: &DescentData) -> Result<Vec<OrbitRep>> {
    orbit_representatives_with(dd, AssemblyOptions::default())
}

pub fn orbit_representatives_with(dd: &DescentData, opts: AssemblyOptions) -> Result<Vec<OrbitRep>> {
    all_sign_vectors(dd.k()).iter().map(|eps| assemble(dd, eps, opts)).collect()
}

fn column_space_contains(basis: &QMat, vectors: &[Vec<Q>]) -> bool {
    let r0 = basis.rank();
    let mut cols: Vec<Vec<Q>> = (0..basis.cols).map(|j| basis.col(j)).collect();
    cols.extend(vectors.iter().cloned());
    QMat::from_cols(&cols, basis.rows).rank() == r0
}

/// ε-type: '+' at i iff the P_i-primary subspace lies in the Krylov space of (A, v).
pub fn classify_type(x: &TildeGl, dd: &DescentData) -> Result<Vec<Sign>> {
    if !x.is_regular() {
        return Err(Error::Domain("classify_type requires a regular element".into()));
    }
    let cp = MonicPolynomial { coeffs: x.quotient_point().charpoly }.to_poly();
    let mut k = x.krylov();
    if x.n == 0 {
        k = QMat::zeros(0, 0);
    }
    dd.factors
        .iter()
        .map(|f| {
            let pi = f.poly.to_poly();
            let mut mult = 0;
            let mut rest = cp.clone();
            while let Some(qq) = rest.exact_div(&pi) {
                rest = qq;
                mult += 1;
            }
            let primary = pi.pow(mult).eval_matrix(&x.a).nullspace();
            Ok(if column_space_contains(&k, &primary) { Sign::Plus } else { Sign::Minus })
        })
        .collect()
}

// --- local structure of F_i ⊗ Q_p ---

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % p;
        }
    }
    fp_rem(&fp_trim(c), m, p)
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let li = fp_inv(*m.last().unwrap(), p);
    while r.len() > dm && !r.is_empty() {
        let k = r.len() - 1 - dm;
        let f = r.last().unwrap() * li % p;
        for (j, mj) in m.iter().enumerate() {
            r[k + j] = (r[k + j] + p * p - f * mj % p) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_div(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let li = fp_inv(*b.last().unwrap(), p);
    let mut quo = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let f = r.last().unwrap() * li % p;
        quo[k] = f;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p * p - f * bj % p) % p;
        }
        r = fp_trim(r);
        if r.len() <= db {
            break;
        }
    }
    fp_trim(quo)
}

/// Residue degrees f_w of the places of F_i = Q[x]/(P) above p, for unramified P.
pub fn residue_degrees(poly: &MonicPolynomial, p: u64) -> Result<Vec<u32>> {
    if poly.coeffs.iter().any(|c| val(c, p) < 0) {
        return Err(Error::Unsupported(
            "ramified descent field unsupported: P_i is not p-integral".into(),
        ));
    }
    let disc = discriminant(poly);
    if val(&disc, p) != 0 {
        return Err(Error::Unsupported(format!(
            "ramified descent field unsupported: p divides disc(P_i) = {}",
            crate::padic_base::q_to_string(&disc)
        )));
    }
    let mut f: Vec<u64> = poly.coeffs.iter().map(|c| residue_mod(c, p, 1)).collect();
    f.push(1);
    let mut degs = Vec::new();
    let mut xpow = vec![0, 1];
    let mut d = 1u32;
    while f.len() > 1 {
        // x^{p^d} mod f
        let mut acc = vec![1u64];
        let mut base = fp_rem(&xpow, &f, p);
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(&acc, &base, &f, p);
            }
            base = fp_mulmod(&base, &base, &f, p);
            e >>= 1;
        }
        xpow = acc.clone();
        let mut h = acc;
        if h.len() < 2 {
            h.resize(2, 0);
        }
        h[1] = (h[1] + p - 1) % p;
        let g = fp_gcd(&fp_trim(h), &f, p);
        let gdeg = g.len() - 1;
        for _ in 0..gdeg / d as usize {
            degs.push(d);
        }
        if gdeg > 0 {
            f = fp_div(&f, &g, p);
            xpow = fp_rem(&xpow, &f, p);
        }
        d += 1;
        if d > 64 {
            break;
        }
    }
    degs.sort();
    Ok(degs)
}
