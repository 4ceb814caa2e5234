//! Finite combinations of (phase-decorated) lattice-coset indicators.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::exact_linalg::QMat;
use crate::invariant_geometry::TildeGl;
use crate::padic_base::{q_parse, q_to_string, qpow, residue_mod, val, EtaleKind, Q, VAL_INF};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// gl̃_n = gl_n × F^n × F_n, coordinates (A row-major, v, u).
    TildeGl { n: usize },
    /// gl_{n+1}, row-major.
    GlNext { n: usize },
    /// F^n.
    Affine { n: usize },
    /// ũ^V at n = 1 for V = E with h(x, y) = gram·x·y^c; coordinates (A, w₁, w₂).
    UnitaryLie { kind: EtaleKind, gram: Q },
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::TildeGl { n } => n * n + 2 * n,
            Ambient::GlNext { n } => (n + 1) * (n + 1),
            Ambient::Affine { n } => *n,
            Ambient::UnitaryLie { .. } => 3,
        }
    }

    /// Partner coordinate π(j) and coefficient κ_j with ⟨X, Y⟩ = Σ κ_j X_j Y_{π(j)}.
    pub fn pairing_slot(&self, j: usize) -> (usize, Q) {
        match self {
            Ambient::TildeGl { n } => {
                let n = *n;
                if j < n * n {
                    ((j % n) * n + j / n, Q::one())
                } else if j < n * n + n {
                    (j + n, Q::one())
                } else {
                    (j - n, Q::one())
                }
            }
            Ambient::GlNext { n } => {
                let m = n + 1;
                ((j % m) * m + j / m, Q::one())
            }
            Ambient::Affine { .. } => (j, Q::one()),
            Ambient::UnitaryLie { kind, gram } => match (kind, j) {
                (_, 0) => (0, Q::one()),
                (EtaleKind::Inert(_), 1) => (1, gram * Q::from_integer(2.into())),
                (EtaleKind::Inert(d), _) => (2, -gram * Q::from_integer((2 * d).into())),
                (EtaleKind::Split, 1) => (2, gram.clone()),
                (EtaleKind::Split, _) => (1, gram.clone()),
            },
        }
    }

    pub fn pairing(&self, x: &[Q], y: &[Q]) -> Q {
        (0..self.dim()).fold(Q::zero(), |acc, j| {
            let (pj, k) = self.pairing_slot(j);
            acc + k * &x[j] * &y[pj]
        })
    }

    /// Self-dual volume of the standard lattice.
    pub fn lattice_volume(&self, p: u64) -> Q {
        match self {
            Ambient::UnitaryLie { gram, .. } => qpow(p, -val(gram, p)),
            _ => Q::one(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Ambient::TildeGl { n } => json!({"space": "tilde_gl", "n": n}),
            Ambient::GlNext { n } => json!({"space": "gl_next", "n": n}),
            Ambient::Affine { n } => json!({"space": "affine", "n": n}),
            Ambient::UnitaryLie { kind, gram } => json!({
                "space": "unitary_lie",
                "etale": match kind { EtaleKind::Split => "split", EtaleKind::Inert(_) => "inert" },
                "gram": q_to_string(gram),
            }),
        }
    }

    pub fn from_json(v: &Value, inert_d: i64) -> Result<Self> {
        let space = v.get("space").and_then(Value::as_str).ok_or_else(|| schema("ambient.space"))?;
        let n = || v.get("n").and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| schema("ambient.n"));
        Ok(match space {
            "tilde_gl" => Ambient::TildeGl { n: n()? },
            "gl_next" => Ambient::GlNext { n: n()? },
            "affine" => Ambient::Affine { n: n()? },
            "unitary_lie" => {
                let kind = match v.get("etale").and_then(Value::as_str) {
                    Some("split") => EtaleKind::Split,
                    Some("inert") => EtaleKind::Inert(inert_d),
                    _ => return Err(schema("ambient.etale")),
                };
                let gram = q_parse(v.get("gram").and_then(Value::as_str).ok_or_else(|| schema("ambient.gram"))?)?;
                if gram.is_zero() {
                    return Err(Error::Domain("Gram entry must be nonzero".into()));
                }
                Ambient::UnitaryLie { kind, gram }
            }
            other => return Err(Error::Schema(format!("unknown ambient space '{other}'"))),
        })
    }
}

fn schema(field: &str) -> Error {
    Error::Schema(format!("missing or malformed field {field}"))
}

/// w·ψ(⟨B, X − c⟩)·1[X_j − c_j ∈ p^{m_j}𝒪 for all j].
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub weight: Cyclo,
    pub center: Vec<Q>,
    pub depth: Vec<i64>,
    pub phase: Option<Vec<Q>>,
}

impl Term {
    pub fn uniform_depth(&self) -> Option<i64> {
        let m = *self.depth.first()?;
        self.depth.iter().all(|&x| x == m).then_some(m)
    }

    pub fn contains(&self, x: &[Q], p: u64) -> bool {
        x.iter().zip(&self.center).zip(&self.depth).all(|((a, c), &m)| val(&(a - c), p) >= m)
    }

    /// Smallest valuation of any point of the support, coordinatewise minimum.
    pub fn floor(&self, p: u64) -> i64 {
        self.center.iter().zip(&self.depth).map(|(c, &m)| val(c, p).min(m)).min().unwrap_or(0)
    }

    pub fn phase_vmin(&self, p: u64) -> i64 {
        self.phase.as_ref().map(|b| b.iter().map(|x| val(x, p)).min().unwrap_or(VAL_INF)).unwrap_or(VAL_INF)
    }
}

/// p-adic fractional part: the rational r/p^e in [0, 1) with x − r/p^e ∈ ℤ_p.
pub fn frac_p(x: &Q, p: u64) -> Q {
    let v = val(x, p);
    if v >= 0 {
        return Q::zero();
    }
    let e = (-v) as u32;
    let r = residue_mod(&(x * qpow(p, -v)), p, e);
    Q::from_integer(r.into()) * qpow(p, v)
}

/// Canonical representative of x modulo p^m𝒪.
pub fn reduce_mod(x: &Q, m: i64, p: u64) -> Q {
    if val(x, p) >= m {
        return Q::zero();
    }
    frac_p(&(x * qpow(p, -m)), p) * qpow(p, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lcf {
    pub ambient: Ambient,
    pub p: u64,
    pub terms: Vec<Term>,
}

impl Lcf {
    pub fn zero(ambient: Ambient, p: u64) -> Self {
        Self { ambient, p, terms: vec![] }
    }

    /// w·∏_j 1_{c_j + p^{m_j} 𝒪}.
    pub fn boxed(ambient: Ambient, p: u64, center: Vec<Q>, depth: Vec<i64>, w: Q) -> Result<Self> {
        let d = ambient.dim();
        if center.len() != d || depth.len() != d {
            return Err(Error::Schema(format!("box needs {d} centers and depths")));
        }
        let t = Term { weight: Cyclo::rational(p, w), center, depth, phase: None };
        Ok(Self { ambient, p, terms: vec![t] }.canonical())
    }

    /// w·1_{c + p^m Λ₀}.
    pub fn coset(ambient: Ambient, p: u64, center: Vec<Q>, m: i64, w: Q) -> Result<Self> {
        let d = ambient.dim();
        if center.len() != d {
            return Err(Error::Schema(format!("center has {} coordinates, ambient needs {d}", center.len())));
        }
        let t = Term { weight: Cyclo::rational(p, w), center, depth: vec![m; d], phase: None };
        Ok(Self { ambient, p, terms: vec![t] }.canonical())
    }

    /// 1_{p^m Λ₀}.
    pub fn lattice(ambient: Ambient, p: u64, m: i64) -> Self {
        let d = ambient.dim();
        Self::coset(ambient, p, vec![Q::zero(); d], m, Q::one()).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn canonical(&self) -> Self {
        let p = self.p;
        let mut out: Vec<Term> = Vec::new();
        for t in &self.terms {
            if t.weight.is_zero() {
                continue;
            }
            let center: Vec<Q> = t.center.iter().zip(&t.depth).map(|(c, &m)| reduce_mod(c, m, p)).collect();
            let mut weight = t.weight.clone();
            let mut phase = None;
            if let Some(b) = &t.phase {
                let diff: Vec<Q> = center.iter().zip(&t.center).map(|(a, c)| a - c).collect();
                weight = weight.mul(&Cyclo::psi(p, &self.ambient.pairing(b, &diff)));
                let reduced: Vec<Q> = (0..b.len())
                    .map(|j| {
                        let (pj, k) = self.ambient.pairing_slot(j);
                        reduce_mod(&b[j], -t.depth[pj] - val(&k, p), p)
                    })
                    .collect();
                if reduced.iter().any(|x| !x.is_zero()) {
                    phase = Some(reduced);
                }
            }
            let nt = Term { weight, center, depth: t.depth.clone(), phase };
            match out.iter_mut().find(|o| o.center == nt.center && o.depth == nt.depth && o.phase == nt.phase) {
                Some(o) => o.weight = o.weight.add(&nt.weight),
                None => out.push(nt),
            }
        }
        out.retain(|t| !t.weight.is_zero());
        out.sort_by_key(term_key);
        Self { ambient: self.ambient.clone(), p, terms: out }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.ambient != o.ambient || self.p != o.p {
            return Err(Error::Inconsistent("adding functions on different spaces".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(Self { ambient: self.ambient.clone(), p: self.p, terms }.canonical())
    }

    pub fn scale_cyclo(&self, c: &Cyclo) -> Self {
        let terms = self.terms.iter().map(|t| Term { weight: t.weight.mul(c), ..t.clone() }).collect();
        Self { ambient: self.ambient.clone(), p: self.p, terms }.canonical()
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.scale_cyclo(&Cyclo::rational(self.p, c.clone()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn eval(&self, x: &[Q]) -> Cyclo {
        let p = self.p;
        let mut acc = Cyclo::zero(p);
        for t in &self.terms {
            if !t.contains(x, p) {
                continue;
            }
            let mut w = t.weight.clone();
            if let Some(b) = &t.phase {
                let diff: Vec<Q> = x.iter().zip(&t.center).map(|(a, c)| a - c).collect();
                w = w.mul(&Cyclo::psi(p, &self.ambient.pairing(b, &diff)));
            }
            acc = acc.add(&w);
        }
        acc
    }

    /// x ↦ φ(x + s).
    pub fn translate(&self, s: &[Q]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { center: t.center.iter().zip(s).map(|(c, a)| c - a).collect(), ..t.clone() })
            .collect();
        Self { ambient: self.ambient.clone(), p: self.p, terms }.canonical()
    }

    /// ℱφ(Y) = ∫ φ(X) ψ(⟨X, Y⟩) dX for the self-dual measure.
    pub fn fourier(&self) -> Self {
        let p = self.p;
        let amb = &self.ambient;
        let d = amb.dim();
        let base_vol = amb.lattice_volume(p);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let depth: Vec<i64> = (0..d)
                    .map(|j| {
                        let (pj, k) = amb.pairing_slot(j);
                        -t.depth[pj] - val(&k, p)
                    })
                    .collect();
                let vol = t.depth.iter().fold(base_vol.clone(), |acc, &m| acc * qpow(p, -m));
                let b = t.phase.clone().unwrap_or_else(|| vec![Q::zero(); d]);
                let cross = amb.pairing(&t.center, &b);
                let weight = t.weight.mul(&Cyclo::psi_times(p, &-cross, vol));
                let center = b.iter().map(|x| -x).collect();
                let phase = t.center.iter().any(|x| !x.is_zero()).then(|| t.center.clone());
                Term { weight, center, depth, phase }
            })
            .collect();
        Self { ambient: amb.clone(), p, terms }.canonical()
    }

    /// Precomposition with a coordinate permutation: x ↦ φ(x∘perm), (x∘perm)_j = x_{perm[j]}.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let d = perm.len();
        let mut inv = vec![0; d];
        for (j, &k) in perm.iter().enumerate() {
            inv[k] = j;
        }
        let pull = |v: &Vec<Q>| (0..d).map(|k| v[inv[k]].clone()).collect::<Vec<Q>>();
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                weight: t.weight.clone(),
                center: pull(&t.center),
                depth: (0..d).map(|k| t.depth[inv[k]]).collect(),
                phase: t.phase.as_ref().map(pull),
            })
            .collect();
        Self { ambient: self.ambient.clone(), p: self.p, terms }.canonical()
    }

    /// φ∘τ for the transpose duality τ(A, v, u) = (Aᵗ, uᵗ, vᵗ) on gl̃_n.
    pub fn transpose_dual(&self) -> Result<Self> {
        let n = match self.ambient {
            Ambient::TildeGl { n } => n,
            _ => return Err(Error::Unsupported("transpose duality needs gl̃_n".into())),
        };
        let perm: Vec<usize> = (0..n * n + 2 * n)
            .map(|j| {
                if j < n * n {
                    (j % n) * n + j / n
                } else if j < n * n + n {
                    j + n
                } else {
                    j - n
                }
            })
            .collect();
        Ok(self.permute(&perm))
    }

    /// x ↦ φ(x·k) on gl̃_n for k ∈ GL_n(𝒪); non-uniform depths need k diagonal.
    pub fn right_translate(&self, k: &QMat) -> Result<Self> {
        let n = match self.ambient {
            Ambient::TildeGl { n } => n,
            _ => return Err(Error::Unsupported("group translation needs gl̃_n".into())),
        };
        let kinv = k.inverse().ok_or_else(|| Error::Domain("k is singular".into()))?;
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || k.get(i, j).is_zero()));
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.uniform_depth().is_none() && !diagonal {
                return Err(Error::Unsupported("group translation of a non-uniform coset".into()));
            }
            let c = TildeGl::from_coords(n, &t.center).act(&kinv)?.coords();
            let phase = match &t.phase {
                Some(b) => Some(TildeGl::from_coords(n, b).act(&kinv)?.coords()),
                None => None,
            };
            terms.push(Term { weight: t.weight.clone(), center: c, depth: t.depth.clone(), phase });
        }
        Ok(Self { ambient: self.ambient.clone(), p: self.p, terms }.canonical())
    }

    /// Congruence depth N such that φ(·k) = φ for every k ≡ 1 mod p^N.
    pub fn invariance_depth(&self) -> i64 {
        let p = self.p;
        self.terms
            .iter()
            .map(|t| {
                let f = t.floor(p);
                let m = t.depth.iter().copied().max().unwrap_or(0);
                let a = m - f.min(m);
                let b = if t.phase.is_some() { -f - t.phase_vmin(p) } else { 0 };
                a.max(b).max(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Every point of the support has all coordinates of valuation ≥ this.
    pub fn support_floor(&self) -> i64 {
        self.terms.iter().map(|t| t.floor(self.p)).min().unwrap_or(0)
    }

    /// Translation by p^D Λ₀ leaves φ unchanged.
    pub fn stability_depth(&self) -> i64 {
        let p = self.p;
        self.terms
            .iter()
            .map(|t| {
                let m = t.depth.iter().copied().max().unwrap_or(0);
                let b = if t.phase.is_some() { -t.phase_vmin(p) } else { i64::MIN };
                m.max(b)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|t| t.weight.level == 0 && t.phase.is_none())
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let uniform = t.uniform_depth();
                json!({
                    "weight": cyclo_to_json(&t.weight),
                    "center": t.center.iter().map(q_to_string).collect::<Vec<_>>(),
                    "depth": match uniform { Some(m) => json!(m), None => json!(t.depth) },
                    "phase": t.phase.as_ref().map(|b| b.iter().map(q_to_string).collect::<Vec<_>>()),
                })
            })
            .collect();
        json!({"ambient": self.ambient.to_json(), "p": self.p, "terms": terms})
    }

    pub fn from_json(v: &Value, p: u64, inert_d: i64) -> Result<Self> {
        let ambient = Ambient::from_json(v.get("ambient").ok_or_else(|| schema("ambient"))?, inert_d)?;
        if let Some(pp) = v.get("p").and_then(Value::as_u64) {
            if pp != p {
                return Err(Error::Inconsistent(format!("function is over p = {pp}, configuration has p = {p}")));
            }
        }
        let d = ambient.dim();
        let arr = v.get("terms").and_then(Value::as_array).ok_or_else(|| schema("terms"))?;
        let mut terms = Vec::new();
        for t in arr {
            let weight = match t.get("weight") {
                None => Cyclo::rational(p, Q::one()),
                Some(w) => cyclo_from_json(w, p)?,
            };
            let center = qvec(t.get("center").ok_or_else(|| schema("terms.center"))?, d)?;
            let depth = match t.get("depth") {
                Some(Value::Number(n)) => vec![n.as_i64().ok_or_else(|| schema("terms.depth"))?; d],
                Some(Value::Array(a)) => {
                    let r: Option<Vec<i64>> = a.iter().map(Value::as_i64).collect();
                    let r = r.ok_or_else(|| schema("terms.depth"))?;
                    if r.len() != d {
                        return Err(schema("terms.depth"));
                    }
                    r
                }
                _ => return Err(schema("terms.depth")),
            };
            let phase = match t.get("phase") {
                None | Some(Value::Null) => None,
                Some(b) => Some(qvec(b, d)?),
            };
            terms.push(Term { weight, center, depth, phase });
        }
        Ok(Self { ambient, p, terms }.canonical())
    }
}

fn term_key(t: &Term) -> (Vec<i64>, Vec<String>, Vec<String>) {
    (
        t.depth.clone(),
        t.center.iter().map(q_to_string).collect(),
        t.phase.iter().flatten().map(q_to_string).collect(),
    )
}

fn qvec(v: &Value, d: usize) -> Result<Vec<Q>> {
    let a = v.as_array().ok_or_else(|| schema("vector"))?;
    if a.len() != d {
        return Err(Error::Schema(format!("vector has {} entries, expected {d}", a.len())));
    }
    a.iter()
        .map(|x| match x {
            Value::String(s) => q_parse(s),
            Value::Number(n) => n.as_i64().map(|i| Q::from_integer(i.into())).ok_or_else(|| schema("vector entry")),
            _ => Err(schema("vector entry")),
        })
        .collect()
}

pub fn cyclo_to_json(c: &Cyclo) -> Value {
    if c.level == 0 {
        return json!(q_to_string(&c.as_base().unwrap()));
    }
    let terms: Vec<Value> = c.terms.iter().map(|(r, x)| json!([r, q_to_string(x)])).collect();
    json!({"level": c.level, "terms": terms})
}

pub fn cyclo_from_json(v: &Value, p: u64) -> Result<Cyclo> {
    match v {
        Value::String(s) => Ok(Cyclo::rational(p, q_parse(s)?)),
        Value::Number(n) => Ok(Cyclo::rational(p, Q::from_integer(n.as_i64().ok_or_else(|| schema("weight"))?.into()))),
        Value::Object(_) => {
            let level = v.get("level").and_then(Value::as_u64).ok_or_else(|| schema("weight.level"))? as u32;
            let arr = v.get("terms").and_then(Value::as_array).ok_or_else(|| schema("weight.terms"))?;
            let mut acc = Cyclo::zero(p);
            let unit = qpow(p, -(level as i64));
            for e in arr {
                let r = e.get(0).and_then(Value::as_u64).ok_or_else(|| schema("weight.terms"))?;
                let c = q_parse(e.get(1).and_then(Value::as_str).ok_or_else(|| schema("weight.terms"))?)?;
                acc = acc.add(&Cyclo::psi_times(p, &(Q::from_integer(r.into()) * &unit), c));
            }
            Ok(acc)
        }
        _ => Err(schema("weight")),
    }
}
