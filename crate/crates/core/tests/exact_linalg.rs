use jrlocal::exact_linalg::*;
use jrlocal::padic_base::{q, Q};
use num_traits::Zero;
use proptest::prelude::*;

mod common;
use common::{runner, SEEDS};

fn monic(c: &[i64]) -> MonicPolynomial {
    MonicPolynomial { coeffs: c.iter().map(|&x| q(x)).collect() }
}

#[test]
fn characteristic_polynomials() {
    assert_eq!(charpoly(&QMat::from_ints(&[&[1, 0], &[0, 2]])), monic(&[2, -3]));
    assert_eq!(charpoly(&QMat::from_ints(&[&[0, 1], &[0, 0]])), monic(&[0, 0]));
    assert_eq!(charpoly(&QMat::from_ints(&[&[1, 0], &[1, 2]])), monic(&[2, -3]));
}

#[test]
fn minimal_recurrences() {
    let ms = |v: &[i64]| v.iter().map(|&x| q(x)).collect::<Vec<Q>>();
    assert_eq!(minimal_recurrence(&ms(&[2, 3, 5, 9]), None).unwrap(), monic(&[2, -3]));
    assert_eq!(minimal_recurrence(&ms(&[1, 1, 1, 1]), Some(1)).unwrap(), monic(&[-1]));
    assert_eq!(minimal_recurrence(&ms(&[0]), Some(0)).unwrap(), MonicPolynomial::one());
    assert_eq!(berlekamp_massey(&ms(&[2, 3, 5, 9])), monic(&[2, -3]));
    assert!(minimal_recurrence(&ms(&[1, 2, 3, 5]), Some(1)).is_err());
}

#[test]
fn linear_solves() {
    let out = solve_linear(&QMat::eye(2), &[q(1), q(0)]);
    assert_eq!(out.solution, Some(vec![q(1), q(0)]));
    assert_eq!(out.rank, 2);
    let u = solve_linear(&QMat::from_ints(&[&[1]]), &[q(1)]);
    assert_eq!(u.solution, Some(vec![q(1)]));
    let bad = solve_linear(&QMat::from_ints(&[&[1, 1], &[1, 1]]), &[q(1), q(2)]);
    assert_eq!(bad.solution, None);
    assert_eq!(bad.rank, 1);
    assert_eq!(bad.nullspace.len(), 1);
}

#[test]
fn hankel_determinants() {
    let m = [q(2), q(3), q(5)];
    assert_eq!(hankel_det(&m, 1), q(2));
    assert_eq!(hankel_det(&m, 2), q(1));
}

fn small_matrix(n: usize) -> impl Strategy<Value = QMat> {
    prop::collection::vec(-4i64..5, n * n).prop_map(move |v| QMat::from_fn(n, n, |i, j| q(v[i * n + j])))
}

#[test]
fn charpoly_is_a_similarity_invariant() {
    for seed in SEEDS {
        runner(seed, 48)
            .run(&(small_matrix(3), small_matrix(3)), |(a, g)| {
                prop_assume!(!g.det().is_zero());
                let gi = g.inverse().unwrap();
                prop_assert_eq!(charpoly(&gi.mul(&a).mul(&g)), charpoly(&a));
                // Cayley–Hamilton
                let p = charpoly(&a).to_poly();
                prop_assert!(p.eval_matrix(&a).data.iter().all(Zero::is_zero));
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn solutions_satisfy_the_system() {
    for seed in SEEDS {
        runner(seed, 48)
            .run(&(small_matrix(3), prop::collection::vec(-5i64..6, 3)), |(a, b)| {
                let b: Vec<Q> = b.into_iter().map(q).collect();
                let out = solve_linear(&a, &b);
                prop_assert_eq!(out.rank, a.rank());
                if let Some(x) = out.solution {
                    prop_assert_eq!(a.mul_vec(&x), b);
                }
                for z in &out.nullspace {
                    prop_assert!(a.mul_vec(z).iter().all(Zero::is_zero));
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn recurrence_recovers_power_moments() {
    for seed in SEEDS {
        runner(seed, 32)
            .run(&(small_matrix(2), prop::collection::vec(-3i64..4, 4)), |(a, uv)| {
                let v = vec![q(uv[0]), q(uv[1])];
                let u = [q(uv[2]), q(uv[3])];
                let mut w = v.clone();
                let mut m = Vec::new();
                for _ in 0..4 {
                    m.push(u.iter().zip(&w).fold(Q::zero(), |s, (x, y)| s + x * y));
                    w = a.mul_vec(&w);
                }
                if hankel_det(&m, 2) != Q::zero() {
                    prop_assert_eq!(minimal_recurrence(&m, None).unwrap(), charpoly(&a));
                }
                Ok(())
            })
            .unwrap();
    }
}
