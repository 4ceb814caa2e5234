use jrlocal::exact_linalg::{EMat, QMat};
use jrlocal::invariant_geometry::*;
use jrlocal::padic_base::{q, BaseField, EtaleKind, EtaleScalar, Q};
use num_traits::Zero;
use proptest::prelude::*;

mod common;
use common::{runner, SEEDS};

fn qs(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

#[test]
fn deltas() {
    assert_eq!(TildeGl::central_rep(1, &q(0), Sign::Plus).delta(Sign::Plus), q(1));
    assert_eq!(TildeGl::central_rep(2, &q(0), Sign::Plus).delta(Sign::Plus), q(-1));
    let x = TildeGl::from_ints(&[&[1, 1], &[0, 2]], &[1, 0], &[1, 0]);
    assert_eq!(x.delta(Sign::Plus), q(0));
}

#[test]
fn quotient_points_and_strata() {
    let x = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[1, 1], &[1, 1]);
    let a = x.quotient_point();
    assert_eq!(a.charpoly, qs(&[2, -3]));
    assert_eq!(a.moments, qs(&[2, 3]));
    assert_eq!(a.d_values(), qs(&[2, 1]));
    assert_eq!(a.stratum(), 2);

    let z = TildeGl { n: 2, a: QMat::eye(2).scale(&q(5)), v: qs(&[0, 0]), u: qs(&[0, 0]) };
    assert_eq!(z.quotient_point().charpoly, qs(&[25, -10]));
    assert_eq!(z.quotient_point().moments, qs(&[0, 0]));
    assert_eq!(z.quotient_point().stratum(), 0);

    let y = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[1, 0], &[1, 0]);
    assert_eq!(y.quotient_point().moments, qs(&[1, 1]));
    assert_eq!(y.quotient_point().d_values()[1], q(0));
    assert_eq!(y.quotient_point().stratum(), 1);
}

#[test]
fn regularity() {
    for n in 1..=3 {
        for s in [Sign::Plus, Sign::Minus] {
            assert!(TildeGl::central_rep(n, &q(2), s).is_regular());
        }
        assert!(!TildeGl::zero(n).is_regular());
    }
}

#[test]
fn cayley_basics() {
    let kind = BaseField::inert(3).unwrap().etale_kind();
    let params = CayleyParams::standard(kind);
    let s = cayley_to_group(&GlNext::new(QMat::zeros(2, 2)).unwrap(), &params).unwrap();
    assert_eq!(s.x, EMat::identity(2, &params.sigma.neg()));
    let y = GlNext::new(QMat::from_ints(&[&[1, 2], &[0, -1]])).unwrap();
    let x = cayley_to_group(&y, &params).unwrap();
    assert_eq!(cayley_to_lie(&x, &params).unwrap(), y);
    let f = cayley_delta_factor(&y, &params).unwrap();
    assert_eq!(x.delta(Sign::Plus), f.mul(&EtaleScalar::from_q(y.delta(Sign::Plus), kind)));
}

#[test]
fn cayley_chart_boundary() {
    // 1 − τ⁻¹Y is singular when Y has eigenvalue τ; for split τ = (1, −1) take Y = 1
    let params = CayleyParams::standard(EtaleKind::Split);
    let y = GlNext::new(QMat::eye(2)).unwrap();
    let err = cayley_to_group(&y, &params).unwrap_err();
    assert_eq!(err.code(), "E_DOMAIN");
}

fn tilde(n: usize) -> impl Strategy<Value = TildeGl> {
    prop::collection::vec(-3i64..4, n * n + 2 * n).prop_map(move |c| TildeGl::from_coords(n, &qs(&c)))
}

fn invertible(n: usize) -> impl Strategy<Value = QMat> {
    prop::collection::vec(-3i64..4, n * n)
        .prop_map(move |c| QMat::from_fn(n, n, |i, j| q(c[i * n + j])))
        .prop_filter("invertible", |g| !g.det().is_zero())
}

#[test]
fn equivariance_of_invariants() {
    for seed in SEEDS {
        for n in 1..=3 {
            runner(seed, 40)
                .run(&(tilde(n), invertible(n)), |(x, g)| {
                    let y = x.act(&g).unwrap();
                    prop_assert_eq!(y.delta(Sign::Plus), x.delta(Sign::Plus) / g.det());
                    prop_assert_eq!(y.delta(Sign::Minus), g.det() * x.delta(Sign::Minus));
                    prop_assert_eq!(y.quotient_point(), x.quotient_point());
                    prop_assert_eq!(y.is_regular(), x.is_regular());
                    if !x.delta(Sign::Plus).is_zero() {
                        prop_assert!(x.is_regular());
                    }
                    Ok(())
                })
                .unwrap();
        }
    }
}

#[test]
fn cayley_round_trip_and_delta_identity() {
    for seed in SEEDS {
        for base in [BaseField::inert(3).unwrap(), BaseField::split(5).unwrap()] {
            let kind = base.etale_kind();
            let params = CayleyParams::standard(kind);
            for n1 in 2..=3 {
                runner(seed, 20)
                    .run(&prop::collection::vec(-3i64..4, n1 * n1), |c| {
                        let y = GlNext::new(QMat::from_fn(n1, n1, |i, j| q(c[i * n1 + j]))).unwrap();
                        let Ok(s) = cayley_to_group(&y, &params) else { return Ok(()) };
                        prop_assert_eq!(cayley_to_lie(&s, &params).unwrap(), y.clone());
                        let f = cayley_delta_factor(&y, &params).unwrap();
                        for sg in [Sign::Plus, Sign::Minus] {
                            prop_assert_eq!(s.delta(sg), f.mul(&EtaleScalar::from_q(y.delta(sg), kind)));
                        }
                        Ok(())
                    })
                    .unwrap();
            }
        }
    }
}
