use jrlocal::cli::verify::matched_pairs_n1;
use jrlocal::invariant_geometry::{Sign, TildeGl};
use jrlocal::orbit_descent::descend;
use jrlocal::orbital_engine::{Ambient, Lcf};
use jrlocal::padic_base::{q, BaseField, EtaleScalar, Q};
use jrlocal::unitary_transfer::*;
use num_traits::One;
use proptest::prelude::*;

mod common;
use common::{runner, SEEDS};

fn inert() -> BaseField {
    BaseField::inert(3).unwrap()
}

fn split() -> BaseField {
    BaseField::split(3).unwrap()
}

#[test]
fn hermitian_class_counts() {
    assert_eq!(hermitian_classes(&inert(), 1).unwrap().len(), 2);
    assert_eq!(hermitian_classes(&inert(), 2).unwrap().len(), 2);
    assert_eq!(hermitian_classes(&split(), 1).unwrap().len(), 1);
    let cls = hermitian_classes(&inert(), 1).unwrap();
    assert_eq!(cls[1].gram, vec![q(3)]);
    assert_eq!(cls[1].eta_disc(), q(-1));
    assert!(hermitian_classes(&inert(), 0).is_err());
}

#[test]
fn matching_discriminants() {
    let base = inert();
    let unit = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[1, 1], &[1, 1]);
    assert!(matching_disc(&unit, &base).unwrap());
    let x = TildeGl::from_ints(&[&[0]], &[1], &[3]);
    assert!(!matching_disc(&x, &base).unwrap());
    assert!(matching_disc(&x, &split()).unwrap());
    let z = TildeGl::central_rep(1, &q(0), Sign::Plus);
    assert_eq!(matching_disc(&z, &base).unwrap_err().code(), "E_DOMAIN");
}

#[test]
fn semisimple_orbit_counts() {
    let base = inert();
    for (n, expect) in [(1, 2), (2, 2)] {
        let a = TildeGl::central_rep(n, &q(0), Sign::Plus).quotient_point();
        let dd = descend(&a, None).unwrap();
        assert_eq!(semisimple_orbits(&a, &dd, &base).unwrap().len(), expect);
    }
    // two distinct rational eigenvalues, each with zero moments: four tuples
    let x = TildeGl::from_ints(&[&[1, 0], &[0, 2]], &[0, 0], &[0, 0]);
    let a = x.quotient_point();
    let dd = descend(&a, None).unwrap();
    assert_eq!(dd.k(), 2);
    assert_eq!(semisimple_orbits(&a, &dd, &base).unwrap().len(), 4);
    let a = TildeGl::central_rep(1, &q(0), Sign::Plus).quotient_point();
    let dd = descend(&a, None).unwrap();
    assert_eq!(semisimple_orbits(&a, &dd, &split()).unwrap().len(), 1);
}

#[test]
fn transfer_constant_signs() {
    for base in [inert(), split(), BaseField::inert(5).unwrap()] {
        for class in hermitian_classes(&base, 1).unwrap() {
            let (cp, cm) = space_constants(&class, &ConstantMode::Unramified).unwrap();
            assert_eq!(cp, Q::one());
            assert_eq!(cm / cp, class.eta_disc());
        }
        let dd = descend(&TildeGl::central_rep(1, &q(0), Sign::Plus).quotient_point(), None).unwrap();
        let (cp, _) = c_pm(&dd, &base).unwrap();
        assert_eq!(cp, Q::one());
    }
}

#[test]
fn central_unitary_integral_is_the_value() {
    let base = inert();
    for class in hermitian_classes(&base, 1).unwrap() {
        let amb = Ambient::UnitaryLie { kind: base.etale_kind(), gram: class.gram[0].clone() };
        let phi = Lcf::lattice(amb.clone(), 3, 0).scale(&q(7));
        let y = UTildeElement::n1(&class.gram[0], &q(1), EtaleScalar::zero(base.etale_kind())).unwrap();
        let j = unitary_orbital_n1(&y, &phi, &base).unwrap();
        assert!(j.central);
        assert_eq!(j.value, q(7));
    }
}

#[test]
fn matched_pairs_and_transfer_identity() {
    for base in [inert(), split()] {
        for (name, phi, fam) in matched_pairs_n1(&base, true) {
            let rep = verify_matched_n1(&phi, &fam, Sign::Plus, 3, &base).unwrap();
            assert!(rep.matched(), "{name}");
            let flipped = verify_matched_n1(&phi, &fam.flip(), Sign::Minus, 3, &base).unwrap();
            assert!(flipped.matched(), "{name} flip");
            for s in [Sign::Plus, Sign::Minus] {
                let x = TildeGl::central_rep(1, &q(0), s);
                let t = singular_transfer_check_n1(&phi, &fam, &x, 3, &base).unwrap();
                assert_eq!(t.verdict(), "equal", "{name}");
            }
        }
    }
}

#[test]
fn mismatched_family_is_reported() {
    let base = inert();
    let (_, phi, fam) = matched_pairs_n1(&base, false).remove(0);
    let doubled = fam.scale(&q(2));
    let rep = verify_matched_n1(&phi, &doubled, Sign::Plus, 3, &base).unwrap();
    assert!(!rep.matched());
    let t = singular_transfer_check_n1(&phi, &doubled, &TildeGl::central_rep(1, &q(0), Sign::Plus), 3, &base).unwrap();
    assert_eq!(t.verdict(), "unmatched");
}

#[test]
fn unstable_functions_have_vanishing_profiles() {
    for base in [inert(), split()] {
        for (name, phi) in unstable_examples_n1(&base).unwrap() {
            assert!(rs_profile_vanishes(&phi, 3, &base).unwrap(), "{name}");
            for s in [Sign::Plus, Sign::Minus] {
                let x = TildeGl::central_rep(1, &q(0), s);
                assert_eq!(natural_at_zero(&x, &phi, &base).unwrap(), Some(q(0)), "{name}");
            }
        }
    }
}

#[test]
fn measure_ratios() {
    for base in [inert(), split()] {
        for class in hermitian_classes(&base, 1).unwrap() {
            let w = EtaleScalar::new(q(1), q(1), base.etale_kind());
            let m = measure_ratio_n1(&class, 0, &w, 1, &base).unwrap();
            assert_eq!(m.ratio, m.expected);
        }
    }
}

/// Scaling a matched pair keeps it matched and scales both sides.
#[test]
fn scaled_pairs_stay_matched() {
    for seed in SEEDS {
        runner(seed, 4)
            .run(&(-3i64..=3).prop_filter("nonzero", |c| *c != 0), |c| {
                let base = inert();
                let (_, phi, fam) = matched_pairs_n1(&base, false).remove(0);
                let phi = phi.scale(&q(c));
                let fam = fam.scale(&q(c));
                prop_assert!(verify_matched_n1(&phi, &fam, Sign::Plus, 2, &base).unwrap().matched());
                let x = TildeGl::central_rep(1, &q(1), Sign::Plus);
                let t = transfer_identity_n1(&phi, &fam, &x, &base).unwrap();
                prop_assert!(t.holds());
                prop_assert_eq!(t.lhs, Some(q(c)));
                Ok(())
            })
            .unwrap();
    }
}
