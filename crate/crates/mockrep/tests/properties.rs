use approx::assert_relative_eq;
use mockrep::admissibility::dilation_transfer;
use mockrep::quadrature::{pairwise_sum, Rule1d};
use mockrep::representation::{conjugation_residual, homomorphism_residual};
use mockrep::system::{apply_d, apply_n, compose, h_distance, h_mul, inverse, phi_of, sample_group, sample_h, sample_x, GroupElement};
use mockrep::systems::{build_example, named_eta, ExampleId};
use mockrep::{Field, SystemRef};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn systems() -> Vec<SystemRef> {
    let mut v: Vec<SystemRef> = ExampleId::all_default().into_iter().map(|id| build_example(id).unwrap()).collect();
    for g in [0.2, 1.8] {
        v.push(build_example(ExampleId::Shearlet { gamma: g }).unwrap());
    }
    v
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

fn same_group(sys: &SystemRef, g1: &GroupElement, g2: &GroupElement) -> bool {
    close(&g1.a, &g2.a, 1e-9) && h_distance(sys.as_ref(), &g1.h, &g2.h) <= 1e-9
}

fn probe() -> Field {
    Field::new("probe", |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::new(1.0, 0.3 * x[0]) * (-r2).exp()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_law_is_associative_with_inverses(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sys in systems() {
            let s = sys.as_ref();
            let (g1, g2, g3) = (sample_group(s, &mut rng), sample_group(s, &mut rng), sample_group(s, &mut rng));
            let left = compose(s, &compose(s, &g1, &g2), &g3);
            let right = compose(s, &g1, &compose(s, &g2, &g3));
            prop_assert!(same_group(&sys, &left, &right), "{}: associativity", s.id());
            let e = GroupElement::identity(s);
            prop_assert!(same_group(&sys, &compose(s, &g1, &inverse(s, &g1)), &e), "{}: right inverse", s.id());
            prop_assert!(same_group(&sys, &compose(s, &inverse(s, &g1), &g1), &e), "{}: left inverse", s.id());
            prop_assert!(same_group(&sys, &compose(s, &e, &g2), &g2));
        }
    }

    #[test]
    fn actions_are_homomorphisms_and_phi_intertwines(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sys in systems() {
            let s = sys.as_ref();
            let (h1, h2) = (sample_h(s, &mut rng, 1.0), sample_h(s, &mut rng, 1.0));
            let x = sample_x(s, &mut rng);
            let lhs = apply_d(s, &h_mul(s, &h1, &h2), &x);
            let rhs = apply_d(s, &h1, &apply_d(s, &h2, &x));
            prop_assert!(close(&lhs, &rhs, 1e-10), "{}: d-action", s.id());
            let y = phi_of(s, &x);
            prop_assert!(close(&apply_n(s, &h_mul(s, &h1, &h2), &y), &apply_n(s, &h1, &apply_n(s, &h2, &y)), 1e-10), "{}: n-action", s.id());
            prop_assert!(close(&phi_of(s, &apply_d(s, &h1, &x)), &apply_n(s, &h1, &y), 1e-10), "{}: intertwining", s.id());
            prop_assert!((s.alpha(&h_mul(s, &h1, &h2)) - s.alpha(&h1) * s.alpha(&h2)).abs() <= 1e-10 * s.alpha(&h1) * s.alpha(&h2));
        }
    }

    #[test]
    fn representation_is_a_homomorphism(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sys in systems() {
            let s = sys.as_ref();
            let (g1, g2) = (sample_group(s, &mut rng), sample_group(s, &mut rng));
            let probes: Vec<Vec<f64>> = (0..6).map(|_| sample_x(s, &mut rng)).collect();
            let r = homomorphism_residual(&sys, &g1, &g2, &probe(), &probes).unwrap();
            prop_assert!(r <= 1e-10, "{}: {r}", s.id());
            let r = conjugation_residual(&sys, &g1.a, &g2.h, &probe(), &probes).unwrap();
            prop_assert!(r <= 1e-10, "{}: conjugation {r}", s.id());
        }
    }

    #[test]
    fn gauss_legendre_exact_on_random_polynomials(n in 1usize..40, lo in -3.0f64..0.0, len in 0.1f64..4.0, coef in prop::collection::vec(-2.0f64..2.0, 1..80)) {
        let hi = lo + len;
        let deg = (2 * n).min(coef.len());
        let c = &coef[..deg];
        let rule = Rule1d::gauss(n, lo, hi);
        let got = rule.integrate(|x| c.iter().rev().fold(0.0, |acc, &a| acc * x + a));
        let anti = |x: f64| c.iter().enumerate().map(|(k, &a)| a * x.powi(k as i32 + 1) / (k as f64 + 1.0)).sum::<f64>();
        let exact = anti(hi) - anti(lo);
        let scale: f64 = c.iter().map(|a| a.abs()).sum::<f64>() * lo.abs().max(hi.abs()).max(1.0).powi(deg as i32) * len;
        prop_assert!((got - exact).abs() <= 1e-11 * scale.max(1.0), "n={n} deg={deg} got={got} exact={exact}");
    }

    #[test]
    fn pairwise_sum_matches_sorted_sum(v in prop::collection::vec(-1e3f64..1e3, 0..2000)) {
        let mut s = v.clone();
        s.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
        let naive: f64 = s.iter().sum();
        let bound = 1e-12 * v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&v) - naive).abs() <= bound);
    }

    #[test]
    fn shearlet_dilation_prefactor_is_delta(delta in 0.1f64..10.0, x1 in -3.0f64..3.0, x2 in -3.0f64..3.0) {
        // Φ homogeneous of degree 2 on ℝ² → ℝ², so (np − d)/2 = 1
        let id = ExampleId::Shearlet { gamma: 0.5 };
        let sys = build_example(id).unwrap();
        let eta = named_eta(id, "smooth").unwrap();
        let moved = dilation_transfer(sys.as_ref(), &eta, delta).unwrap();
        let want = eta.eval(&[x1 / delta, x2 / delta]) * delta;
        let got = moved.eval(&[x1, x2]);
        prop_assert!((got - want).norm() <= 1e-12 * (1.0 + want.norm()));
    }
}

#[test]
fn dilation_transfer_explicit_values() {
    let id = ExampleId::Shearlet { gamma: 0.5 };
    let sys = build_example(id).unwrap();
    let eta = named_eta(id, "smooth").unwrap();
    let moved = dilation_transfer(sys.as_ref(), &eta, 2.0).unwrap();
    let x = [2.4, -0.6];
    assert_relative_eq!(moved.eval(&x).re, 2.0 * eta.eval(&[1.2, -0.3]).re, max_relative = 1e-14);
    // the same vector comes back for δ = 1
    let same = dilation_transfer(sys.as_ref(), &eta, 1.0).unwrap();
    assert_relative_eq!(same.eval(&x).re, eta.eval(&x).re, max_relative = 1e-15);
    assert!(dilation_transfer(sys.as_ref(), &eta, 0.0).is_err());
    assert!(dilation_transfer(sys.as_ref(), &eta, f64::NAN).is_err());
}

#[test]
fn dilation_transfer_needs_homogeneous_linear_system() {
    // translations in the d-action of transdil2d make it affine
    let sys = build_example(ExampleId::Transdil2d).unwrap();
    let err = dilation_transfer(sys.as_ref(), &Field::zero(), 2.0).unwrap_err();
    assert!(matches!(err, mockrep::Error::Unsupported(_)), "{err}");
}
