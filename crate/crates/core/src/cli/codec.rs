//! JSON codecs for the workbench payloads.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_linalg::{EMat, MonicPolynomial, QMat};
use crate::invariant_geometry::{GlNext, QuotientPoint, Sign, TildeGl};
use crate::orbit_descent::{DescentData, OrbitRep};
use crate::padic_base::{q_parse, q_to_string, EtaleKind, EtaleScalar, Q};

pub fn schema(field: &str) -> Error {
    Error::Schema(format!("missing or malformed field '{field}'"))
}

pub fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| schema(name))
}

pub fn q_from(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => q_parse(s),
        Value::Number(n) => n.as_i64().map(|i| Q::from_integer(i.into())).ok_or_else(|| schema("rational")),
        _ => Err(schema("rational")),
    }
}

pub fn qs(xs: &[Q]) -> Value {
    json!(xs.iter().map(q_to_string).collect::<Vec<_>>())
}

pub fn qvec_from(v: &Value) -> Result<Vec<Q>> {
    v.as_array().ok_or_else(|| schema("vector"))?.iter().map(q_from).collect()
}

pub fn qmat_from(v: &Value) -> Result<QMat> {
    let rows = v.as_array().ok_or_else(|| schema("matrix"))?;
    let rows: Vec<Vec<Q>> = rows.iter().map(qvec_from).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(QMat::zeros(0, 0));
    }
    QMat::from_rows(rows)
}

pub fn qmat_json(m: &QMat) -> Value {
    json!(m.to_rows().iter().map(|r| qs(r)).collect::<Vec<_>>())
}

pub fn sign_from(v: &Value) -> Result<Sign> {
    let s = v.as_str().ok_or_else(|| schema("sign"))?;
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Sign::from_char(c),
        _ => Err(schema("sign")),
    }
}

pub fn signs_json(s: &[Sign]) -> Value {
    json!(s.iter().map(|x| x.symbol()).collect::<String>())
}

pub fn tildegl_json(x: &TildeGl) -> Value {
    json!({"a": qmat_json(&x.a), "v": qs(&x.v), "u": qs(&x.u)})
}

pub fn tildegl_from(v: &Value) -> Result<TildeGl> {
    let a = qmat_from(field(v, "a")?)?;
    TildeGl::new(a, qvec_from(field(v, "v")?)?, qvec_from(field(v, "u")?)?)
}

pub fn quotient_json(a: &QuotientPoint) -> Value {
    json!({"charpoly": qs(&a.charpoly), "moments": qs(&a.moments)})
}

pub fn quotient_from(v: &Value) -> Result<QuotientPoint> {
    QuotientPoint::new(qvec_from(field(v, "charpoly")?)?, qvec_from(field(v, "moments")?)?)
}

pub fn monic_json(m: &MonicPolynomial) -> Value {
    qs(&m.coeffs)
}

pub fn descent_json(dd: &DescentData) -> Value {
    json!({
        "n": dd.n,
        "r": dd.r,
        "k": dd.k(),
        "a0": quotient_json(&dd.a0),
        "q0": monic_json(&dd.q0),
        "factors": dd.factors.iter().map(|f| json!({"poly": monic_json(&f.poly), "mult": f.mult})).collect::<Vec<_>>(),
    })
}

pub fn orbit_rep_json(r: &OrbitRep) -> Value {
    json!({"epsilon": r.epsilon_string(), "x": tildegl_json(&r.x)})
}

pub fn etale_from(v: &Value, kind: EtaleKind) -> Result<EtaleScalar> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(EtaleScalar::new(q_from(&a[0])?, q_from(&a[1])?, kind)),
        other => Ok(EtaleScalar::from_q(q_from(other)?, kind)),
    }
}

pub fn etale_json(x: &EtaleScalar) -> Value {
    json!([q_to_string(&x.a), q_to_string(&x.b)])
}

pub fn emat_json(m: &EMat) -> Value {
    json!((0..m.rows).map(|i| (0..m.cols).map(|j| etale_json(m.get(i, j))).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn emat_from(v: &Value, kind: EtaleKind) -> Result<EMat> {
    let rows = v.as_array().ok_or_else(|| schema("matrix"))?;
    let rows: Vec<Vec<EtaleScalar>> = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(|| schema("matrix row"))?.iter().map(|x| etale_from(x, kind)).collect())
        .collect::<Result<_>>()?;
    EMat::from_rows(rows)
}

pub fn glnext_from(v: &Value) -> Result<GlNext> {
    GlNext::new(qmat_from(v)?)
}
