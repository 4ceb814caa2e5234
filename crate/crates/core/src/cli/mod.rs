//! The `jrw` workbench: configuration, verb dispatch and JSON results.

pub mod codec;
pub mod report;
pub mod verify;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::invariant_geometry::{cayley_delta_factor, cayley_to_group, cayley_to_lie, CayleyParams, SElement, Sign, TildeGl};
use crate::lfactor_symbolic::{build_l, central_l, l_for_element, l_for_orbit, LFactorSpec, LaurentRational};
use crate::orbit_descent::{classify_type, descend, orbit_representatives, stratify};
use crate::orbital_engine::general::gamma_from_lie;
use crate::orbital_engine::tate::{central_by_route, chi_at_p, CentralRoute, LValue};
use crate::orbital_engine::{
    group_pullback, oracle_report, orbital_general, orbital_rs_cyclo, Lcf, OracleParams, TestFunction,
};
use crate::padic_base::{q_to_string, BaseField, CharLabel, EtaleKind, EtaleScalar, EtaleType, UnramifiedCharacter, Q};
use crate::unitary_transfer::{
    central_transfer_check, hermitian_classes, semisimple_orbits, singular_transfer_check_n1, transfer_constants,
    unitary_orbital_n1, unitary_partner_n1, verify_matched_n1, ConstantMode, EpsilonInputs, HermitianClass,
    UTildeElement, UnitaryFamily,
};
use codec::*;

pub const VERBS: [&str; 16] = [
    "invariants",
    "quotient",
    "stratify",
    "descend",
    "orbits",
    "classify",
    "cayley",
    "lfactor",
    "integrate",
    "integrate-oracle",
    "fourier",
    "match",
    "orbits-unitary",
    "constants",
    "transfer-check",
    "verify",
];

#[derive(Debug, Clone, PartialEq)]
pub struct WorkbenchConfig {
    pub base: BaseField,
    pub xi: UnramifiedCharacter,
    pub mu: UnramifiedCharacter,
    pub cayley: CayleyParams,
    pub oracle: OracleParams,
    pub seed: u64,
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        let base = BaseField::inert(3).unwrap();
        let cayley = CayleyParams::standard(base.etale_kind());
        Self {
            base,
            xi: UnramifiedCharacter::trivial(),
            mu: UnramifiedCharacter { value_at_p: Q::from_integer(1.into()), label: CharLabel::Mu },
            cayley,
            oracle: OracleParams::default(),
            seed: 1,
        }
    }
}

fn character(v: Option<&Value>, label: CharLabel, name: &str) -> Result<UnramifiedCharacter> {
    let value = match v {
        None => Q::from_integer(1.into()),
        Some(x) => q_from(x).map_err(|_| Error::Config(format!("{name} must be its value at p, a nonzero rational")))?,
    };
    UnramifiedCharacter::new(value, label).map_err(|_| Error::Config(format!("{name}(p) must be nonzero")))
}

impl WorkbenchConfig {
    pub fn from_json(v: &Value) -> Result<Self> {
        let p = match v.get("p") {
            None => 3,
            Some(x) => x.as_u64().ok_or_else(|| Error::Config("p must be an odd prime".into()))?,
        };
        let etale = match v.get("etale").and_then(Value::as_str).unwrap_or("inert") {
            "inert" => EtaleType::Inert,
            "split" => EtaleType::Split,
            "ramified" => return Err(Error::Config("ramified E/F is not supported; use inert or split".into())),
            other => return Err(Error::Config(format!("unknown etale type '{other}'; use inert or split"))),
        };
        let base = BaseField::new(p, etale)?;
        let kind = base.etale_kind();
        let xi = character(v.get("xi"), CharLabel::Xi, "xi")?;
        let mu = character(v.get("mu"), CharLabel::Mu, "mu")?;
        let cayley = match v.get("cayley") {
            None => CayleyParams::standard(kind),
            Some(c) => {
                let std = CayleyParams::standard(kind);
                let tau = c.get("tau").map(|t| etale_from(t, kind)).transpose()?.unwrap_or(std.tau);
                let sigma = c.get("sigma").map(|s| etale_from(s, kind)).transpose()?.unwrap_or(std.sigma);
                CayleyParams::new(tau, sigma)?
            }
        };
        let mut oracle = OracleParams::default();
        if let Some(o) = v.get("oracle") {
            let get = |k: &str, d: i64| o.get(k).map_or(Some(d), Value::as_i64);
            oracle.window = get("window", oracle.window).ok_or_else(|| Error::Config("oracle.window must be an integer".into()))?;
            oracle.max_refine =
                get("max_refine", oracle.max_refine).ok_or_else(|| Error::Config("oracle.max_refine must be an integer".into()))?;
        }
        if !(1..=64).contains(&oracle.window) {
            return Err(Error::Config("oracle.window must lie in 1..=64".into()));
        }
        if !(1..=200).contains(&oracle.max_refine) {
            return Err(Error::Config("oracle.max_refine must lie in 1..=200".into()));
        }
        let seed = match v.get("seed") {
            None => 1,
            Some(s) => s.as_u64().ok_or_else(|| Error::Config("seed must be a nonnegative integer".into()))?,
        };
        Ok(Self { base, xi, mu, cayley, oracle, seed })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.base.p,
            "etale": if self.base.etale == EtaleType::Inert { "inert" } else { "split" },
            "xi": q_to_string(&self.xi.value_at_p),
            "mu": q_to_string(&self.mu.value_at_p),
            "cayley": {"tau": etale_json(&self.cayley.tau), "sigma": etale_json(&self.cayley.sigma)},
            "oracle": {"window": self.oracle.window, "max_refine": self.oracle.max_refine},
            "seed": self.seed,
        })
    }

    fn kind(&self) -> EtaleKind {
        self.base.etale_kind()
    }

    fn inert_d(&self) -> i64 {
        self.base.d
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub route: Option<String>,
    pub seed: Option<u64>,
}

pub fn error_json(e: &Error) -> Value {
    json!({"error": {"code": e.code(), "message": e.to_string()}})
}

fn laurent(r: &LaurentRational) -> Value {
    serde_json::to_value(r.to_json()).unwrap()
}

pub fn lvalue_json(v: &LValue) -> Value {
    match v.as_base() {
        Some(r) => laurent(&r),
        None => json!({
            "level": v.level,
            "phases": v.terms.iter().map(|(r, c)| json!([r, laurent(c)])).collect::<Vec<_>>(),
        }),
    }
}

fn element(payload: &Value) -> Result<TildeGl> {
    tildegl_from(field(payload, "x")?)
}

fn quotient_of(payload: &Value) -> Result<crate::invariant_geometry::QuotientPoint> {
    match payload.get("a") {
        Some(a) => quotient_from(a),
        None => Ok(element(payload)?.quotient_point()),
    }
}

fn lcf(payload: &Value, key: &str, cfg: &WorkbenchConfig) -> Result<Lcf> {
    Lcf::from_json(field(payload, key)?, cfg.base.p, cfg.inert_d())
}

fn sign_or_plus(payload: &Value) -> Result<Sign> {
    payload.get("sign").map_or(Ok(Sign::Plus), sign_from)
}

fn class_by_name(name: &str, cfg: &WorkbenchConfig) -> Result<HermitianClass> {
    let classes = hermitian_classes(&cfg.base, 1)?;
    let want = match name {
        "norm" => true,
        "non_norm" => false,
        other => return Err(Error::Schema(format!("unknown disc class '{other}'; use norm or non_norm"))),
    };
    classes
        .into_iter()
        .find(|c| c.disc_norm == want)
        .ok_or_else(|| Error::Domain(format!("no Hermitian line with {name} discriminant over split E")))
}

fn family_from(v: &Value, cfg: &WorkbenchConfig) -> Result<UnitaryFamily> {
    let parts = v
        .as_array()
        .ok_or_else(|| schema("family"))?
        .iter()
        .map(|e| {
            let class = class_by_name(field(e, "class")?.as_str().ok_or_else(|| schema("family.class"))?, cfg)?;
            Ok((class, lcf(e, "phi", cfg)?))
        })
        .collect::<Result<_>>()?;
    Ok(UnitaryFamily { parts })
}

pub fn family_json(f: &UnitaryFamily) -> Value {
    json!(f
        .parts
        .iter()
        .map(|(c, phi)| json!({"class": if c.disc_norm { "norm" } else { "non_norm" }, "phi": phi.to_json()}))
        .collect::<Vec<_>>())
}

fn utilde_json(y: &UTildeElement) -> Value {
    json!({"gram": emat_json(&y.gram), "a": emat_json(&y.a), "v": y.v.iter().map(etale_json).collect::<Vec<_>>()})
}

fn utilde_from(v: &Value, cfg: &WorkbenchConfig) -> Result<UTildeElement> {
    let k = cfg.kind();
    let vs = field(v, "v")?.as_array().ok_or_else(|| schema("v"))?.iter().map(|x| etale_from(x, k)).collect::<Result<_>>()?;
    UTildeElement::new(emat_from(field(v, "gram")?, k)?, emat_from(field(v, "a")?, k)?, vs)
}

fn selement_json(s: &SElement) -> Value {
    emat_json(&s.x)
}

fn invariants(payload: &Value) -> Result<Value> {
    let (x, extra) = match payload.get("gl_next") {
        Some(m) => {
            let y = glnext_from(m)?;
            let (x, d) = y.split();
            (x, json!({"d": q_to_string(&d)}))
        }
        None => (element(payload)?, json!({})),
    };
    let a = x.quotient_point();
    let mut out = json!({
        "delta_plus": q_to_string(&x.delta(Sign::Plus)),
        "delta_minus": q_to_string(&x.delta(Sign::Minus)),
        "quotient": quotient_json(&a),
        "d": qs(&a.d_values()),
        "r": a.stratum(),
        "regular": x.is_regular(),
        "regular_semisimple": a.is_regular_semisimple(),
    });
    if let Some(d) = extra.get("d") {
        out["corner"] = d.clone();
    }
    Ok(out)
}

fn cayley(payload: &Value, cfg: &WorkbenchConfig) -> Result<Value> {
    let params = &cfg.cayley;
    let direction = payload.get("direction").and_then(Value::as_str).unwrap_or("to_group");
    match direction {
        "to_group" => {
            let y = glnext_from(field(payload, "y")?)?;
            let s = cayley_to_group(&y, params)?;
            let factor = cayley_delta_factor(&y, params)?;
            let identity = [Sign::Plus, Sign::Minus]
                .iter()
                .all(|&sg| s.delta(sg) == factor.mul(&EtaleScalar::from_q(y.delta(sg), params.kind())));
            Ok(json!({
                "s": selement_json(&s),
                "delta_plus": etale_json(&s.delta(Sign::Plus)),
                "delta_minus": etale_json(&s.delta(Sign::Minus)),
                "delta_factor": etale_json(&factor),
                "identity_holds": identity,
            }))
        }
        "to_lie" => {
            let s = SElement::new(emat_from(field(payload, "s")?, cfg.kind())?)?;
            let y = cayley_to_lie(&s, params)?;
            Ok(json!({"y": qmat_json(&y.m)}))
        }
        other => Err(Error::Schema(format!("unknown direction '{other}'; use to_group or to_lie"))),
    }
}

fn lfactor(payload: &Value, cfg: &WorkbenchConfig) -> Result<Value> {
    let base = &cfg.base;
    let r = if let Some(c) = payload.get("character") {
        let chi = match c.as_str() {
            Some("xi") => cfg.xi.clone(),
            Some("eta") => base.eta(),
            Some("mu") => cfg.mu.clone(),
            _ => UnramifiedCharacter::new(q_from(c)?, CharLabel::Derived)?,
        };
        let c1 = payload.get("s_coefficient").map_or(Some(1), Value::as_i64).ok_or_else(|| schema("s_coefficient"))?;
        let c0 = payload.get("s_offset").map_or(Ok(Q::zero()), q_from)?;
        build_l(&LFactorSpec::new(chi, c1, c0), base)?
    } else if payload.get("x").is_some() {
        l_for_element(&element(payload)?, &cfg.xi, base)?
    } else if let Some(a) = payload.get("a") {
        let dd = descend(&quotient_from(a)?, None)?;
        let eps = signs_from(field(payload, "epsilon")?)?;
        l_for_orbit(&dd, &eps, &cfg.xi, base)?
    } else {
        let n = field(payload, "n")?.as_u64().ok_or_else(|| schema("n"))? as usize;
        let f = payload.get("residue_degree").map_or(Some(1), Value::as_u64).ok_or_else(|| schema("residue_degree"))?;
        central_l(n, sign_or_plus(payload)?, &chi_at_p(&cfg.xi, base), base.p, f as u32)?
    };
    Ok(laurent(&r))
}

fn signs_from(v: &Value) -> Result<Vec<Sign>> {
    v.as_str().ok_or_else(|| schema("epsilon"))?.chars().map(Sign::from_char).collect()
}

fn integrate(payload: &Value, cfg: &WorkbenchConfig, route: &str) -> Result<Value> {
    let base = &cfg.base;
    if route == "group" || payload.get("gamma").is_some() || payload.get("y").is_some() {
        let (g1, g2) = match payload.get("gamma") {
            Some(g) => (etale_from(field(g, "gamma1")?, cfg.kind())?, emat_from(field(g, "gamma2")?, cfg.kind())?),
            None => gamma_from_lie(&glnext_from(field(payload, "y")?)?, &cfg.cayley, base.p)?,
        };
        let w = payload.get("weight").map_or(Ok(Q::from_integer(1.into())), q_from)?;
        let r = group_pullback(&g1, &g2, &w, &cfg.cayley, &cfg.xi, &cfg.mu, base)?;
        return Ok(json!({
            "route": "group",
            "value": laurent(&r.value),
            "l_gamma": laurent(&r.l_gamma),
            "lie": qmat_json(&r.lie.m),
            "certified_points": r.certified_points,
            "unramified_form": r.unramified_form,
        }));
    }
    if route == "unitary" || payload.get("unitary").is_some() {
        let y = utilde_from(field(payload, "unitary")?, cfg)?;
        let j = unitary_orbital_n1(&y, &lcf(payload, "phi", cfg)?, base)?;
        return Ok(json!({
            "route": "unitary",
            "value": q_to_string(&j.value),
            "central": j.central,
            "stabilization": j.raw.iter().map(|(k, v)| json!([k, q_to_string(v)])).collect::<Vec<_>>(),
        }));
    }
    let x = element(payload)?;
    let phi = lcf(payload, "phi", cfg)?;
    let xi = &cfg.xi;
    let value = match route {
        "central" | "tate" => central_by_route(&x, &phi, xi, base, CentralRoute::Tate)?,
        "gamma" => central_by_route(&x, &phi, xi, base, CentralRoute::Gamma)?,
        "rs" => orbital_rs_cyclo(&x, &phi, xi, base)?,
        "oracle" => oracle_report(&x, &phi, xi, base, &cfg.oracle)?.value,
        "auto" | "descent" => {
            let g = orbital_general(&x, &TestFunction::Plain(phi), xi, base)?;
            return Ok(json!({
                "route": g.route,
                "value": laurent(&g.value),
                "l_x": laurent(&g.l_x),
                "normalized": laurent(&g.normalized),
                "entire": g.entire,
                "epsilon": signs_json(&g.epsilon),
            }));
        }
        other => return Err(Error::Config(format!("unknown route '{other}'; use auto (descent), central (tate), gamma, rs, oracle, group or unitary"))),
    };
    Ok(json!({"route": route, "value": lvalue_json(&value)}))
}

fn match_verb(payload: &Value, cfg: &WorkbenchConfig) -> Result<Value> {
    let base = &cfg.base;
    if payload.get("family").is_none() {
        let x = element(payload)?;
        let prec = payload.get("precision").map_or(Some(8), Value::as_u64).ok_or_else(|| schema("precision"))?;
        let (class, y) = unitary_partner_n1(&x, base, prec as u32)?;
        return Ok(json!({"class": class.to_json(), "partner": utilde_json(&y)}));
    }
    let phi = lcf(payload, "phi", cfg)?;
    let fam = family_from(field(payload, "family")?, cfg)?;
    let depth = payload.get("depth").map_or(Some(3), Value::as_i64).ok_or_else(|| schema("depth"))?;
    Ok(verify_matched_n1(&phi, &fam, sign_or_plus(payload)?, depth, base)?.to_json())
}

fn orbits_unitary(payload: &Value, cfg: &WorkbenchConfig) -> Result<Value> {
    let a = quotient_of(payload)?;
    let dd = descend(&a, None)?;
    let orbits = semisimple_orbits(&a, &dd, &cfg.base)?;
    Ok(json!({
        "count": orbits.len(),
        "orbits": orbits.iter().map(|(v, tag)| json!({"space": v.to_json(), "tag": tag.to_json()})).collect::<Vec<_>>(),
    }))
}

fn constants(payload: &Value, cfg: &WorkbenchConfig) -> Result<Value> {
    let mode = match payload.get("epsilon_inputs") {
        None => ConstantMode::Unramified,
        Some(e) => ConstantMode::Supplied(EpsilonInputs {
            eps_shifted: qvec_from(field(e, "eps_shifted")?)?,
            eps_half: q_from(field(e, "eps_half")?)?,
            eta_minus_one: q_from(field(e, "eta_minus_one")?)?,
        }),
    };
    Ok(transfer_constants(&element(payload)?, &cfg.base, &mode)?.to_json())
}

fn transfer_check(payload: &Value, cfg: &WorkbenchConfig) -> Result<Value> {
    let x = element(payload)?;
    let phi = lcf(payload, "phi", cfg)?;
    let rep = if let Some(vals) = payload.get("values") {
        let vals = vals
            .as_array()
            .ok_or_else(|| schema("values"))?
            .iter()
            .map(|e| {
                let name = field(e, "class")?.as_str().ok_or_else(|| schema("values.class"))?;
                let dim = e.get("dim").map_or(Some(x.n as u64), Value::as_u64).ok_or_else(|| schema("values.dim"))?;
                let class = hermitian_classes(&cfg.base, dim as usize)?
                    .into_iter()
                    .find(|c| c.disc_norm == (name == "norm"))
                    .ok_or_else(|| Error::Domain(format!("no Hermitian space with {name} discriminant")))?;
                Ok((class, q_from(field(e, "value")?)?))
            })
            .collect::<Result<Vec<_>>>()?;
        central_transfer_check(&phi, &vals, &x, &cfg.base)?
    } else {
        let fam = family_from(field(payload, "family")?, cfg)?;
        let depth = payload.get("depth").map_or(Some(3), Value::as_i64).ok_or_else(|| schema("depth"))?;
        singular_transfer_check_n1(&phi, &fam, &x, depth, &cfg.base)?
    };
    Ok(rep.to_json())
}

/// Runs one verb; `verify` is handled by [`report::run_verify`].
pub fn run(verb: &str, payload: &Value, cfg: &WorkbenchConfig, opts: &RunOptions) -> Result<Value> {
    let base = &cfg.base;
    match verb {
        "invariants" => invariants(payload),
        "quotient" => {
            let a = match payload.get("gl_next") {
                Some(m) => glnext_from(m)?.quotient_point(),
                None => element(payload)?.quotient_point(),
            };
            Ok(quotient_json(&a))
        }
        "stratify" => {
            let s = stratify(&quotient_of(payload)?)?;
            Ok(json!({"r": s.r, "a0": quotient_json(&s.a0), "q0": monic_json(&s.q0), "residual": monic_json(&s.residual)}))
        }
        "descend" => Ok(descent_json(&descend(&quotient_of(payload)?, None)?)),
        "orbits" => {
            let dd = descend(&quotient_of(payload)?, None)?;
            let reps = orbit_representatives(&dd)?;
            Ok(json!({"k": dd.k(), "count": reps.len(), "representatives": reps.iter().map(orbit_rep_json).collect::<Vec<_>>()}))
        }
        "classify" => {
            let x = element(payload)?;
            let a = x.quotient_point();
            let dd = descend(&a, None)?;
            let eps = classify_type(&x, &dd)?;
            Ok(json!({"k": dd.k(), "epsilon": signs_json(&eps), "regular_semisimple": a.is_regular_semisimple()}))
        }
        "cayley" => cayley(payload, cfg),
        "lfactor" => lfactor(payload, cfg),
        "integrate" => integrate(payload, cfg, opts.route.as_deref().unwrap_or("auto")),
        "integrate-oracle" => {
            let x = element(payload)?;
            let phi = lcf(payload, "phi", cfg)?;
            let r = oracle_report(&x, &phi, &cfg.xi, base, &cfg.oracle)?;
            Ok(json!({"value": lvalue_json(&r.value), "cells": r.cells, "balls": r.balls}))
        }
        "fourier" => Ok(lcf(payload, "phi", cfg)?.fourier().to_json()),
        "match" => match_verb(payload, cfg),
        "orbits-unitary" => orbits_unitary(payload, cfg),
        "constants" => constants(payload, cfg),
        "transfer-check" => transfer_check(payload, cfg),
        "verify" => {
            let suite = payload.get("suite").and_then(Value::as_str).unwrap_or("all");
            let seed = opts.seed.unwrap_or(cfg.seed);
            Ok(report::build_report(suite, seed)?.json)
        }
        other => Err(Error::Schema(format!("unknown verb '{other}'; expected one of {}", VERBS.join(", ")))),
    }
}
