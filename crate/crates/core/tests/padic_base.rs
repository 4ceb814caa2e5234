use jrlocal::padic_base::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

mod common;
use common::{runner, SEEDS};

#[test]
fn valuations() {
    assert_eq!(valuation(&q(1), 5), Valuation::Finite(0));
    assert_eq!(valuation(&q(50), 5), Valuation::Finite(2));
    assert_eq!(valuation(&qf(3, 25), 5), Valuation::Finite(-2));
    assert_eq!(valuation(&q(0), 5), Valuation::Infinite);
}

#[test]
fn quadratic_character() {
    let inert = BaseField::inert(5).unwrap();
    let split = BaseField::split(5).unwrap();
    assert_eq!(inert.eta().eval_at(&q(5), 5).unwrap(), q(-1));
    assert_eq!(inert.eta().eval_at(&q(7), 5).unwrap(), q(1));
    assert_eq!(split.eta().eval_at(&q(125), 5).unwrap(), q(1));
}

#[test]
fn etale_arithmetic() {
    let s = EtaleKind::Split;
    let x = EtaleScalar::new(q(3), q(7), s);
    assert_eq!(x.conj(), EtaleScalar::new(q(7), q(3), s));
    let k = BaseField::inert(5).unwrap().etale_kind();
    let EtaleKind::Inert(d) = k else { unreachable!() };
    let z = EtaleScalar::new(q(2), q(3), k);
    assert_eq!(z.norm(), q(4) - q(d) * q(9));
    assert_eq!(EtaleScalar::new(q(1), q(0), k).inv().unwrap(), EtaleScalar::one(k));
    assert!(EtaleScalar::zero(k).inv().is_err());
    assert_eq!(etale_ops(&z, &z, EtaleOp::Norm).unwrap(), EtaleValue::Rational(z.norm()));
}

#[test]
fn config_rejections() {
    assert_eq!(BaseField::inert(2).unwrap_err().code(), "E_CONFIG");
    assert_eq!(BaseField::inert(9).unwrap_err().code(), "E_CONFIG");
    assert!(UnramifiedCharacter::new(q(0), CharLabel::Xi).is_err());
}

#[test]
fn rational_text_round_trip() {
    for x in [q(0), q(-7), qf(3, 25), qf(-22, 6)] {
        assert_eq!(q_parse(&q_to_string(&x)).unwrap(), x);
    }
    assert!(q_parse("1/0").is_err());
}

fn rational() -> impl Strategy<Value = Q> {
    (-500i64..500, 1i64..200).prop_map(|(a, b)| qf(a, b))
}

#[test]
fn valuation_is_multiplicative_and_ultrametric() {
    for seed in SEEDS {
        runner(seed, 64)
            .run(&(rational(), rational(), prop::sample::select(vec![3u64, 5, 7])), |(x, y, p)| {
                if !x.is_zero() && !y.is_zero() {
                    prop_assert_eq!(val(&(&x * &y), p), val(&x, p) + val(&y, p));
                }
                let s = &x + &y;
                if !s.is_zero() {
                    prop_assert!(val(&s, p) >= val(&x, p).min(val(&y, p)));
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn norm_is_multiplicative_and_conj_is_involutive() {
    for seed in SEEDS {
        for kind in [EtaleKind::Split, BaseField::inert(3).unwrap().etale_kind()] {
            runner(seed, 64)
                .run(&(rational(), rational(), rational(), rational()), |(a, b, c, d)| {
                    let x = EtaleScalar::new(a, b, kind);
                    let y = EtaleScalar::new(c, d, kind);
                    prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
                    prop_assert_eq!(x.conj().conj(), x.clone());
                    if !x.norm().is_zero() {
                        prop_assert_eq!(x.mul(&x.inv().unwrap()), EtaleScalar::one(kind));
                    }
                    Ok(())
                })
                .unwrap();
        }
    }
}

#[test]
fn unramified_characters_ignore_units() {
    let chi = UnramifiedCharacter::new(q(2), CharLabel::Xi).unwrap();
    for seed in SEEDS {
        runner(seed, 64)
            .run(&(1i64..1000, 0i64..4), |(u, k)| {
                prop_assume!(u % 3 != 0);
                let x = q(u) * qpow(3, k);
                prop_assert_eq!(chi.eval_at(&x, 3).unwrap(), qpow_q(&q(2), k));
                Ok(())
            })
            .unwrap();
    }
    assert!(chi.eval_at(&q(1), 3).unwrap().is_one());
}
