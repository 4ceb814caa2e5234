use jrlocal::exact_linalg::QMat;
use jrlocal::invariant_geometry::{Sign, TildeGl};
use jrlocal::lfactor_symbolic::{central_l, LaurentRational};
use jrlocal::orbital_engine::tate::{chi_at_p, f_phi, twist_factor};
use jrlocal::orbital_engine::*;
use jrlocal::padic_base::{q, qpow, BaseField, UnramifiedCharacter, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::{runner, SEEDS};

fn t() -> LaurentRational {
    LaurentRational::t()
}

fn gl(n: usize) -> Ambient {
    Ambient::TildeGl { n }
}

fn inert() -> BaseField {
    BaseField::inert(3).unwrap()
}

fn triv() -> UnramifiedCharacter {
    UnramifiedCharacter::trivial()
}

#[test]
fn central_lattice_values() {
    let base = inert();
    for n in 1..=2 {
        let z = TildeGl::central_rep(n, &q(0), Sign::Plus);
        let i = orbital_central(&z, &Lcf::lattice(gl(n), 3, 0), &triv(), &base).unwrap();
        assert_eq!(i, central_l(n, Sign::Plus, &q(-1), 3, 1).unwrap());
    }
    let z = TildeGl::central_rep(1, &q(0), Sign::Plus);
    let i = orbital_central(&z, &Lcf::lattice(gl(1), 3, 0), &triv(), &base).unwrap();
    assert_eq!(i, t().div(&t().add(&LaurentRational::one())).unwrap());
}

/// (0, p, 0) = Z·p⁻¹; summing χ(h)|h|^s over v(h) ≤ 1 gives χt·t/(t+1).
#[test]
fn twisted_central_value() {
    let base = inert();
    let x = TildeGl::from_ints(&[&[0]], &[3], &[0]);
    let phi = Lcf::lattice(gl(1), 3, 0);
    let i = orbital_central(&x, &phi, &triv(), &base).unwrap();
    let expect = t().mul(&t()).neg().div(&t().add(&LaurentRational::one())).unwrap();
    assert_eq!(i, expect);
    let g = QMat::from_ints(&[&[3]]);
    let z = TildeGl::central_rep(1, &q(0), Sign::Plus);
    let moved = orbital_central(&z.act(&g).unwrap(), &phi, &triv(), &base).unwrap();
    let plain = orbital_central(&z, &phi, &triv(), &base).unwrap();
    assert_eq!(moved, plain.mul(&twist_factor(&g, &q(-1), 3)));
    assert_eq!(twist_factor(&g, &q(-1), 3), LaurentRational::monomial(q(-1), -1));
}

#[test]
fn unit_discriminant_gives_one() {
    let base = inert();
    let x = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[1, 1], &[1, 1]);
    let v = orbital_rs(&x, &Lcf::lattice(gl(2), 3, 0), &triv(), &base).unwrap();
    assert_eq!(v, LaurentRational::one());
    let w = orbital_rs(&x, &Lcf::lattice(gl(2), 3, 0).scale(&q(5)), &triv(), &base).unwrap();
    assert_eq!(w, LaurentRational::constant(q(5)));
}

#[test]
fn slice_reduction_of_the_lattice() {
    let f = f_phi(&Lcf::lattice(gl(1), 3, 0), &q(0), &triv()).unwrap();
    assert_eq!(f, Lcf::lattice(f.ambient.clone(), 3, 0));
    let f2 = f_phi(&Lcf::lattice(gl(2), 3, 0), &q(0), &triv()).unwrap();
    assert_eq!(f2, Lcf::lattice(f2.ambient.clone(), 3, 0));
    assert_eq!(f2.ambient.dim(), 2);
    // no ñ′ directions at n = 1; one free slot of volume p⁻¹ at n = 2
    let f = f_phi(&Lcf::lattice(gl(1), 3, 1), &q(0), &triv()).unwrap();
    assert_eq!(f, Lcf::lattice(f.ambient.clone(), 3, 1));
    let f2 = f_phi(&Lcf::lattice(gl(2), 3, 1), &q(0), &triv()).unwrap();
    assert_eq!(f2, Lcf::lattice(f2.ambient.clone(), 3, 1).scale(&qpow(3, -1)));
    for n in 1..=2 {
        let z = TildeGl::central_rep(n, &q(0), Sign::Plus);
        let phi = Lcf::lattice(gl(n), 3, 1);
        let o = oracle_integrate(&z, &phi, &triv(), &inert(), &OracleParams::default()).unwrap();
        assert_eq!(orbital_central(&z, &phi, &triv(), &inert()).unwrap(), o);
    }
}

#[test]
fn fourier_of_lattices() {
    for n in 1..=2 {
        let amb = gl(n);
        let l0 = Lcf::lattice(amb.clone(), 3, 0);
        assert_eq!(l0.fourier(), l0);
        let dim = amb.dim() as i64;
        let l1 = Lcf::lattice(amb.clone(), 3, 1);
        assert_eq!(l1.fourier(), Lcf::lattice(amb, 3, -1).scale(&qpow(3, -dim)));
    }
}

#[test]
fn oracle_agrees_on_closed_forms() {
    let base = inert();
    let params = OracleParams::default();
    for n in 1..=2 {
        for s in [Sign::Plus, Sign::Minus] {
            let z = TildeGl::central_rep(n, &q(1), s);
            let phi = Lcf::lattice(gl(n), 3, 0);
            let o = oracle_integrate(&z, &phi, &triv(), &base, &params).unwrap();
            assert_eq!(o, orbital_central(&z, &phi, &triv(), &base).unwrap());
        }
    }
    let small = OracleParams { window: 4, ..OracleParams::default() };
    let z = TildeGl::central_rep(2, &q(0), Sign::Plus);
    let o = oracle_integrate(&z, &Lcf::lattice(gl(2), 3, 0), &triv(), &base, &small).unwrap();
    assert_eq!(o, central_l(2, Sign::Plus, &q(-1), 3, 1).unwrap());
    // uv = p: a finite orbit sum
    let x = TildeGl::from_ints(&[&[0]], &[1], &[3]);
    let phi = Lcf::lattice(gl(1), 3, 0);
    let o = oracle_integrate(&x, &phi, &triv(), &base, &params).unwrap();
    assert_eq!(o, orbital_rs(&x, &phi, &triv(), &base).unwrap());
    assert!(o.is_laurent_polynomial());
}

#[test]
fn general_regular_orbit_is_normalized_to_one() {
    let base = inert();
    for (x, eps) in [
        (TildeGl::from_ints(&[&[1, 0], &[1, 2]], &[1, 0], &[1, 0]), Sign::Plus),
        (TildeGl::from_ints(&[&[1, 1], &[0, 2]], &[1, 0], &[1, 0]), Sign::Minus),
    ] {
        let g = orbital_general(&x, &TestFunction::Plain(Lcf::lattice(gl(2), 3, 0)), &triv(), &base).unwrap();
        assert_eq!(g.epsilon, vec![eps]);
        assert_eq!(g.normalized, LaurentRational::one());
        assert!(g.entire && g.holomorphic_on_grid);
    }
    let bad = orbital_general(&TildeGl::zero(2), &TestFunction::Plain(Lcf::lattice(gl(2), 3, 0)), &triv(), &base);
    assert_eq!(bad.unwrap_err().code(), "E_DOMAIN");
}

#[test]
fn unstable_functions_vanish() {
    let base = inert();
    let z = TildeGl::central_rep(1, &q(0), Sign::Plus);
    let phi = Lcf::lattice(gl(1), 3, 0).sub(&Lcf::lattice(gl(1), 3, 0)).unwrap();
    assert!(orbital_central(&z, &phi, &triv(), &base).unwrap().is_zero());
    // equal-volume difference 1_Λ₀ − p³·1_{pΛ₀}
    let phi = Lcf::lattice(gl(1), 3, 0).sub(&Lcf::lattice(gl(1), 3, 1).scale(&q(27))).unwrap();
    let i = orbital_central(&z, &phi, &triv(), &base).unwrap();
    let o = oracle_integrate(&z, &phi, &triv(), &base, &OracleParams::default()).unwrap();
    assert_eq!(i, o);
}

fn phi_strategy(n: usize, p: u64) -> impl Strategy<Value = (Q, Sign, Lcf)> {
    (any::<u64>(), 0i64..=1, any::<bool>()).prop_map(move |(s, lam, plus)| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let lambda = q(lam);
        let phi = jrlocal::cli::verify::random_central_lcf(&mut rng, n, &lambda, p);
        (lambda, if plus { Sign::Plus } else { Sign::Minus }, phi)
    })
}

#[test]
fn twist_equivariance_and_gamma_route() {
    for seed in SEEDS {
        for base in [inert(), BaseField::split(3).unwrap()] {
            let chi = chi_at_p(&triv(), &base);
            runner(seed, 6)
                .run(&(phi_strategy(1, 3), -2i64..=2, 1i64..=2), |((lambda, s, phi), k, u)| {
                    let x = TildeGl::central_rep(1, &lambda, s);
                    let g = QMat::from_rows(vec![vec![q(u) * qpow(3, k)]]).unwrap();
                    let i = orbital_central(&x, &phi, &triv(), &base).unwrap();
                    let moved = orbital_central(&x.act(&g).unwrap(), &phi, &triv(), &base).unwrap();
                    prop_assert_eq!(moved, i.mul(&twist_factor(&g, &chi, 3)));
                    prop_assert_eq!(orbital_via_gamma(&x, &phi, &triv(), &base).unwrap(), i);
                    Ok(())
                })
                .unwrap();
        }
    }
}

#[test]
fn fourier_is_an_involution_up_to_reflection() {
    for seed in SEEDS {
        runner(seed, 12)
            .run(&(phi_strategy(1, 3), prop::collection::vec(-9i64..10, 3), -1i64..=1), |((_, _, phi), c, k)| {
                let y: Vec<Q> = c.iter().map(|&v| q(v) * qpow(3, k)).collect();
                let neg: Vec<Q> = y.iter().map(|v| -v.clone()).collect();
                prop_assert_eq!(phi.fourier().fourier().eval(&y), phi.eval(&neg));
                let lin = phi.add(&phi.scale(&q(2))).unwrap();
                let base = inert();
                let z = TildeGl::central_rep(1, &q(0), Sign::Plus);
                let one = orbital_central(&z, &phi, &triv(), &base).unwrap();
                prop_assert_eq!(orbital_central(&z, &lin, &triv(), &base).unwrap(), one.scale(&q(3)));
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn group_side_pullback() {
    use jrlocal::invariant_geometry::{CayleyParams, GlNext};
    use jrlocal::orbital_engine::general::gamma_from_lie;
    let base = inert();
    let params = CayleyParams::standard(base.etale_kind());
    let run = |m: &[&[i64]], w: i64| {
        let (g1, g2) = gamma_from_lie(&GlNext { m: QMat::from_ints(m) }, &params, 3).unwrap();
        group_pullback(&g1, &g2, &q(w), &params, &triv(), &triv(), &base).unwrap()
    };
    let r = run(&[&[1, 1], &[0, 2]], 1);
    assert!(r.unramified_form && r.certified_points > 0);
    assert_eq!(r.value, r.l_gamma);
    assert_eq!(run(&[&[1, 1], &[0, 2]], 4).value, r.l_gamma.scale(&q(4)));
    // (0, p, 0) is conjugate to the unit orbit only through det g = p
    let off = run(&[&[0, 3], &[0, 0]], 1);
    assert!(!off.unramified_form);
}
