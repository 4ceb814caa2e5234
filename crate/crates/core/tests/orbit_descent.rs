use jrlocal::cli::verify::classification_points;
use jrlocal::exact_linalg::MonicPolynomial;
use jrlocal::invariant_geometry::{QuotientPoint, Sign, TildeGl};
use jrlocal::orbit_descent::*;
use jrlocal::padic_base::{q, Q};
use num_traits::Zero;

mod common;
use common::SEEDS;

fn qs(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn monic(c: &[i64]) -> MonicPolynomial {
    MonicPolynomial { coeffs: qs(c) }
}

fn point(charpoly: &[i64], moments: &[i64]) -> QuotientPoint {
    QuotientPoint::new(qs(charpoly), qs(moments)).unwrap()
}

#[test]
fn stratifications() {
    let s = stratify(&point(&[2, -3], &[2, 3])).unwrap();
    assert_eq!((s.r, s.residual.clone()), (2, MonicPolynomial::one()));
    assert_eq!(s.a0, point(&[2, -3], &[2, 3]));

    let s = stratify(&point(&[4, -4], &[0, 0])).unwrap();
    assert_eq!(s.r, 0);
    assert_eq!(s.residual, monic(&[4, -4]));

    let s = stratify(&point(&[2, -3], &[1, 1])).unwrap();
    assert_eq!(s.r, 1);
    assert_eq!(s.a0, point(&[-1], &[1]));
    assert_eq!(s.residual, monic(&[-2]));
}

#[test]
fn factorizations() {
    let f = factor_small(&monic(&[-2])).unwrap();
    assert_eq!(f, vec![Factor { poly: monic(&[-2]), mult: 1 }]);
    let f = factor_small(&monic(&[1, 0, 2, 0])).unwrap();
    assert_eq!(f, vec![Factor { poly: monic(&[1, 0]), mult: 2 }]);
    let f = factor_small(&monic(&[0, -1])).unwrap();
    assert_eq!(f.len(), 2);
    assert!(f.iter().all(|x| x.mult == 1 && x.deg() == 1));
}

#[test]
fn worked_representatives() {
    let a = point(&[2, -3], &[1, 1]);
    let dd = descend(&a, None).unwrap();
    assert_eq!(dd.k(), 1);
    assert_eq!(realize_a0(&dd), TildeGl::from_ints(&[&[1]], &[1], &[1]));
    let reps = orbit_representatives(&dd).unwrap();
    assert_eq!(reps[0].x, TildeGl::from_ints(&[&[1, 0], &[1, 2]], &[1, 0], &[1, 0]));
    assert_eq!(reps[1].x, TildeGl::from_ints(&[&[1, 1], &[0, 2]], &[1, 0], &[1, 0]));
    assert_eq!(classify_type(&reps[0].x, &dd).unwrap(), vec![Sign::Plus]);
    assert_eq!(classify_type(&reps[1].x, &dd).unwrap(), vec![Sign::Minus]);
}

#[test]
fn central_and_semisimple_points() {
    for n in 1..=3 {
        let z = TildeGl::central_rep(n, &q(3), Sign::Plus);
        let dd = descend(&z.quotient_point(), None).unwrap();
        let reps = orbit_representatives(&dd).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[0].x, z);
        assert_eq!(reps[1].x, TildeGl::central_rep(n, &q(3), Sign::Minus));
        assert_eq!(classify_type(&z, &dd).unwrap(), vec![Sign::Plus]);
    }
    let rs = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[1, 1], &[1, 1]);
    let dd = descend(&rs.quotient_point(), None).unwrap();
    assert_eq!(orbit_representatives(&dd).unwrap().len(), 1);
}

#[test]
fn descent_rejects_unfactorable_residuals() {
    // x⁴ − 2 has no rational roots and degree above the small-factor range
    let a = point(&[-2, 0, 0, 0], &[0, 0, 0, 0]);
    assert_eq!(descend(&a, None).unwrap_err().code(), "E_UNSUPPORTED");
}

/// Representatives and classification on seeded points with k up to 3.
#[test]
fn representatives_invert_classification() {
    for seed in SEEDS {
        for (k, x) in classification_points(seed, 3) {
            let a = x.quotient_point();
            let dd = descend(&a, None).unwrap();
            assert_eq!(dd.k(), k);
            let reps = orbit_representatives(&dd).unwrap();
            assert_eq!(reps.len(), 1 << k);
            assert_eq!(reps.iter().filter(|r| !r.x.delta(Sign::Plus).is_zero()).count(), 1);
            assert_eq!(reps.iter().filter(|r| !r.x.delta(Sign::Minus).is_zero()).count(), 1);
            for r in &reps {
                assert!(r.x.is_regular());
                assert_eq!(r.x.quotient_point(), a);
                assert_eq!(classify_type(&r.x, &dd).unwrap(), r.epsilon);
            }
            let alt = orbit_representatives_with(&dd, AssemblyOptions { reverse_power_basis: true, reverse_components: true }).unwrap();
            for (r, s) in reps.iter().zip(&alt) {
                assert_eq!(classify_type(&s.x, &dd).unwrap(), r.epsilon);
            }
        }
    }
}

#[test]
fn types_are_orbit_invariants() {
    let g = jrlocal::exact_linalg::QMat::from_ints(&[&[2, 1, 0], &[0, 1, 0], &[1, 0, 3]]);
    for seed in SEEDS {
        for (_, x) in classification_points(seed, 5) {
            if x.n != 3 {
                continue;
            }
            let dd = descend(&x.quotient_point(), None).unwrap();
            for r in orbit_representatives(&dd).unwrap() {
                assert_eq!(classify_type(&r.x.act(&g).unwrap(), &dd).unwrap(), r.epsilon);
            }
        }
    }
}
