use jrlocal::invariant_geometry::{Sign, TildeGl};
use jrlocal::lfactor_symbolic::*;
use jrlocal::orbit_descent::descend;
use jrlocal::padic_base::{q, qf, BaseField, CharLabel, UnramifiedCharacter, Q};
use num_traits::One;
use proptest::prelude::*;

mod common;
use common::{runner, SEEDS};

fn t() -> LaurentRational {
    LaurentRational::t()
}

fn one() -> LaurentRational {
    LaurentRational::one()
}

/// t/(t+1)
fn t_over_t_plus_1() -> LaurentRational {
    t().div(&t().add(&one())).unwrap()
}

#[test]
fn abelian_factors() {
    let inert = BaseField::inert(3).unwrap();
    let eta = inert.eta();
    assert_eq!(build_l(&LFactorSpec::new(eta.clone(), -1, q(0)), &inert).unwrap(), t_over_t_plus_1());
    let triv = UnramifiedCharacter::trivial();
    assert_eq!(build_l(&LFactorSpec::new(triv.clone(), 1, q(0)), &inert).unwrap(), one().div(&one().sub(&t())).unwrap());
    let expect = one().sub(&LaurentRational::monomial(q(3), -2)).inv().unwrap();
    assert_eq!(build_l(&LFactorSpec::new(eta.pow(2), -2, q(-1)), &inert).unwrap(), expect);
}

#[test]
fn central_orbit_factors() {
    let inert = BaseField::inert(3).unwrap();
    let xi = UnramifiedCharacter::trivial();
    let chi = q(-1);
    assert_eq!(central_l(1, Sign::Plus, &chi, 3, 1).unwrap(), t_over_t_plus_1());
    let two = t_over_t_plus_1().mul(&one().sub(&LaurentRational::monomial(q(3), -2)).inv().unwrap());
    assert_eq!(central_l(2, Sign::Plus, &chi, 3, 1).unwrap(), two);
    assert_eq!(l_for_element(&TildeGl::central_rep(2, &q(0), Sign::Plus), &xi, &inert).unwrap(), two);
    let rs = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[1, 1], &[1, 1]);
    assert_eq!(l_for_element(&rs, &xi, &inert).unwrap(), one());
    let dd = descend(&TildeGl::central_rep(1, &q(0), Sign::Minus).quotient_point(), None).unwrap();
    assert_eq!(l_for_orbit(&dd, &[Sign::Minus], &xi, &inert).unwrap(), central_l(1, Sign::Minus, &chi, 3, 1).unwrap());
    assert!(l_for_orbit(&dd, &[], &xi, &inert).is_err());
}

#[test]
fn gamma_factors() {
    let base = BaseField::split(5).unwrap();
    let triv = UnramifiedCharacter::trivial();
    let g = gamma_factor(&triv, 1, &q(0), &base).unwrap();
    // (1 − t)/(1 − p^{−1}t^{−1})
    let expect = one().sub(&t()).div(&one().sub(&LaurentRational::monomial(qf(1, 5), -1))).unwrap();
    assert_eq!(g, expect);
    let l = build_l(&LFactorSpec::new(triv.clone(), 1, q(0)), &base).unwrap();
    let dual = build_l(&LFactorSpec::new(triv, -1, q(1)), &base).unwrap();
    assert_eq!(g.mul(&l), dual);
}

#[test]
fn holomorphy_at_points() {
    let h = holo_at(&t_over_t_plus_1(), &q(0), 3).unwrap();
    assert_eq!(h, HoloValue { pole_order: 0, value: Some(qf(1, 2)) });
    let pole = holo_at(&one().div(&one().sub(&t())).unwrap(), &q(0), 3).unwrap();
    assert_eq!(pole.pole_order, 1);
    assert_eq!(pole.value, None);
    assert_eq!(holo_at(&one(), &q(2), 3).unwrap().value, Some(Q::one()));
    assert!(holo_at(&one(), &qf(1, 2), 3).is_err());
}

#[test]
fn canonical_json() {
    let j = serde_json::to_string(&t_over_t_plus_1()).unwrap();
    assert_eq!(j, r#"{"num":[[1,"1"]],"den":[[1,"1"],[0,"1"]]}"#);
    let back: LaurentRational = serde_json::from_str(&j).unwrap();
    assert_eq!(back, t_over_t_plus_1());
}

fn laurent() -> impl Strategy<Value = LaurentRational> {
    (prop::collection::vec(-4i64..5, 1..4), prop::collection::vec(-4i64..5, 1..3), -3i64..4).prop_filter_map(
        "nonzero denominator",
        |(n, d, s)| {
            let num = LaurentRational::from_terms(&n.iter().enumerate().map(|(i, &c)| (i as i64 + s, q(c))).collect::<Vec<_>>());
            let mut dt: Vec<(i64, Q)> = d.iter().enumerate().map(|(i, &c)| (i as i64 + 1, q(c))).collect();
            dt.push((0, q(1)));
            num.div(&LaurentRational::from_terms(&dt)).ok()
        },
    )
}

#[test]
fn field_laws_and_canonical_form() {
    for seed in SEEDS {
        runner(seed, 64)
            .run(&(laurent(), laurent(), laurent()), |(a, b, c)| {
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                prop_assert_eq!(a.sub(&a), LaurentRational::zero());
                if !a.is_zero() {
                    prop_assert_eq!(a.div(&a).unwrap(), one());
                }
                let j = serde_json::to_value(&a).unwrap();
                prop_assert_eq!(serde_json::from_value::<LaurentRational>(j).unwrap(), a.clone());
                for t0 in [q(2), qf(1, 3)] {
                    if let (Ok(x), Ok(y), Ok(z)) = (a.eval(&t0), b.eval(&t0), a.mul(&b).eval(&t0)) {
                        prop_assert_eq!(z, x * y);
                    }
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn gamma_functional_identity() {
    for seed in SEEDS {
        runner(seed, 24)
            .run(&(-3i64..4, prop::sample::select(vec![-2i64, -1, 1, 2]), -2i64..3), |(chi, c1, c0)| {
                prop_assume!(chi != 0);
                let base = BaseField::inert(3).unwrap();
                let x = UnramifiedCharacter::new(q(chi), CharLabel::Xi).unwrap();
                let g = gamma_factor(&x, c1, &q(c0), &base).unwrap();
                let l = build_l(&LFactorSpec::new(x.clone(), c1, q(c0)), &base).unwrap();
                let dual = build_l(&LFactorSpec::new(x.inverse(), -c1, q(1 - c0)), &base).unwrap();
                prop_assert_eq!(g.mul(&l), dual);
                Ok(())
            })
            .unwrap();
    }
}
