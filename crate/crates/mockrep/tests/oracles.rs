//! Closed-form values checked against the library, each computed here by an
//! independent route (hand antiderivatives or a separate composite rule).

use approx::{assert_abs_diff_eq, assert_relative_eq};
use mockrep::admissibility::{classify, classify_example, example_criterion, fiber_criterion_residual, explicit_repr, zero_repr, Conclusion, DimensionRelation, EtaRepr, TAG_DIMENSION, TAG_EQUAL_DIM};
use mockrep::cli::linear_fit;
use mockrep::orbit::{stabilizer_volume, StabilizerVolume};
use mockrep::system::{modular_g, GroupElement};
use mockrep::systems::{build_example, criterion_setup, default_setup, named_eta, transdil2d, ExampleId};
use mockrep::transform::{energy_direct, energy_via_density};
use mockrep::Field;
use std::f64::consts::PI;

/// Composite Simpson on [a, b] with m (even) panels, written out here so it shares nothing with the crate.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn wavelet_calderon_integral_is_one() {
    // ∫₀^∞ (2a e^{-a²})² da/a = 4 ∫₀^∞ a e^{-2a²} da = 1
    let oracle = simpson(|a| 4.0 * a * (-2.0 * a * a).exp(), 0.0, 8.0, 40000);
    assert_abs_diff_eq!(oracle, 1.0, epsilon = 1e-12);
    let rep = example_criterion(ExampleId::Wavelet1d, &explicit_repr(ExampleId::Wavelet1d).unwrap()).unwrap();
    for e in &rep.criterion {
        assert_abs_diff_eq!(e.value, oracle, epsilon = 1e-9);
    }
    assert!(rep.satisfied);
}

#[test]
fn dilrot_modes_integrate_to_one_over_pi() {
    // ∫₀^∞ (2t e^{-t²}/√π)² dt/t = (4/π)·(1/4)
    let oracle = simpson(|t| 4.0 * t * (-2.0 * t * t).exp() / PI, 0.0, 8.0, 40000);
    assert_abs_diff_eq!(oracle, 1.0 / PI, epsilon = 1e-12);
    let rep = example_criterion(ExampleId::Dilrot2d, &explicit_repr(ExampleId::Dilrot2d).unwrap()).unwrap();
    assert_eq!(rep.criterion.len(), 9);
    for e in &rep.criterion {
        assert_abs_diff_eq!(e.value, oracle, epsilon = 1e-9);
    }
}

#[test]
fn shearlet_indicator_halves() {
    // in ω = (x₁²/2, x₁x₂/2): |η|² = 2ω₁ on [1,2]×[0,1] against dω/(2ω₁³), so ∫₁² ω⁻² dω = 1/2
    let oracle = simpson(|w| 2.0 * w / (2.0 * w * w * w), 1.0, 2.0, 2000);
    assert_abs_diff_eq!(oracle, 0.5, epsilon = 1e-12);
    for gamma in [0.5, 1.0, 2.0] {
        let id = ExampleId::Shearlet { gamma };
        let rep = example_criterion(id, &explicit_repr(id).unwrap()).unwrap();
        assert_abs_diff_eq!(rep.residuals["positive_half"], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(rep.residuals["negative_half"], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(rep.residuals["cross_term"], 0.0, epsilon = 1e-12);
    }
}

#[test]
fn shearlet_smooth_vector_is_admissible() {
    // g(w) = 2w²e^{-w}: ∫ g² w dw/(2w³) = 2∫ w e^{-2w} dw = 1/2, and ∫ k₊² = ∫ k₋² = 1
    let g = simpson(|w| (2.0 * w * w * (-w).exp()).powi(2) * w / (2.0 * w * w * w), 1e-9, 60.0, 20000);
    assert_abs_diff_eq!(g, 0.5, epsilon = 1e-9);
    let c = (2.0 / PI).sqrt();
    assert_abs_diff_eq!(simpson(|v| c * (-2.0 * v * v).exp(), -8.0, 8.0, 4000), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(simpson(|v| c * 4.0 * v * v * (-2.0 * v * v).exp(), -8.0, 8.0, 4000), 1.0, epsilon = 1e-12);
    let id = ExampleId::Shearlet { gamma: 0.5 };
    let rep = example_criterion(id, &EtaRepr::Spatial(named_eta(id, "smooth").unwrap())).unwrap();
    assert!(rep.satisfied, "{:?}", rep.residuals);
}

#[test]
fn transdil_partial_fourier_normalisation() {
    // |η̂|²/|y| = e^{-y²/2σ²}/(√(2π)σ), a normal density in y
    for w in [-3.0, 0.0, 0.9, 4.0] {
        let s = transdil2d::sigma(w);
        assert_relative_eq!(s, 4.0 * (-0.5 * w * w).exp(), max_relative = 1e-15);
        let oracle = simpson(|y| (-y * y / (2.0 * s * s)).exp() / ((2.0 * PI).sqrt() * s), -12.0 * s, 12.0 * s, 6000);
        assert_abs_diff_eq!(oracle, 1.0, epsilon = 1e-10);
    }
    let rep = example_criterion(ExampleId::Transdil2d, &explicit_repr(ExampleId::Transdil2d).unwrap()).unwrap();
    assert!(rep.satisfied);
    assert_eq!(rep.criterion.len(), 10);
}

#[test]
fn transdil_table_matches_direct_quadrature() {
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let xi = -7.0 + 0.37 * i as f64;
        for y in [2e-4, 3e-3, 0.05, 0.31, 0.75, 1.3, 4.2, 17.0] {
            worst = worst.max((transdil2d::eta_value(xi, y) - transdil2d::eta_reference(xi, y)).abs());
        }
    }
    assert!(worst < 1e-6, "table error {worst:e}");
    assert_eq!(transdil2d::eta_value(1.0, 0.0), 0.0);
    assert_eq!(transdil2d::eta_value(17.0, 1.0), 0.0);
}

#[test]
fn criteria_reject_zero_and_mismatched_vectors() {
    for id in [ExampleId::Wavelet1d, ExampleId::Shearlet { gamma: 0.5 }, ExampleId::Dilrot2d, ExampleId::Transdil2d] {
        let rep = example_criterion(id, &zero_repr(id).unwrap()).unwrap();
        assert!(!rep.satisfied, "{id}");
    }
    let err = example_criterion(ExampleId::Dilrot2d, &EtaRepr::Spatial(Field::zero())).unwrap_err();
    assert!(matches!(err, mockrep::Error::Precondition(_)));
    assert!(explicit_repr(ExampleId::Heisenberg).is_err());
}

#[test]
fn scaled_vector_scales_the_criterion_by_c_squared() {
    let id = ExampleId::Wavelet1d;
    let eta = named_eta(id, "explicit").unwrap().scaled(0.5);
    let rep = example_criterion(id, &EtaRepr::Spatial(eta)).unwrap();
    for e in &rep.criterion {
        assert_abs_diff_eq!(e.value, 0.25, epsilon = 1e-9);
    }
}

#[test]
fn energy_is_quadratic_in_eta_and_routes_agree() {
    let s = default_setup(ExampleId::Wavelet1d).unwrap();
    let sys = s.sys.as_ref();
    let e1 = energy_direct(sys, &s.f, &s.eta, &s.grid, &s.quad).unwrap();
    let e2 = energy_direct(sys, &s.f, &s.eta.scaled(0.5), &s.grid, &s.quad).unwrap();
    assert_relative_eq!(e2, 0.25 * e1, max_relative = 1e-12);
    let nf = s.quad.norm_sq(&s.f);
    assert_relative_eq!(e1 / nf, 1.0, max_relative = 0.02);
    let ed = energy_via_density(sys, &s.f, &s.eta, &s.grid.h, s.ygrid.as_ref().unwrap()).unwrap();
    assert_relative_eq!(ed, e1, max_relative = 0.02);
    let zero = energy_direct(sys, &s.f, &Field::zero(), &s.grid, &s.quad).unwrap();
    assert_eq!(zero, 0.0);
}

#[test]
fn zero_eta_gives_unit_fiber_residual() {
    for id in [ExampleId::Shearlet { gamma: 0.5 }, ExampleId::Dilrot2d] {
        let sys = build_example(id).unwrap();
        let cs = criterion_setup(id).unwrap();
        let r = fiber_criterion_residual(sys.as_ref(), &Field::zero(), &cs.y, &cs.tests, &cs.hgrid, cs.resolution, cs.radius).unwrap();
        for (res, skip) in r.residuals.iter().zip(&r.skipped) {
            assert!(!skip);
            assert_eq!(*res, 1.0);
        }
    }
    // a vanishing test vector is skipped, not divided by
    let sys = build_example(ExampleId::Dilrot2d).unwrap();
    let cs = criterion_setup(ExampleId::Dilrot2d).unwrap();
    let eta = named_eta(ExampleId::Dilrot2d, "explicit").unwrap();
    let r = fiber_criterion_residual(sys.as_ref(), &eta, &cs.y, &[Field::zero()], &cs.hgrid, cs.resolution, cs.radius).unwrap();
    assert!(r.skipped[0] && r.residuals[0].is_nan());
    assert_eq!(r.max_residual, 0.0);
}

#[test]
fn dilrot_stabilizer_volume_is_half() {
    // stabilizer is the circle of angles, mass 2π against dθ/(4π)
    let sys = build_example(ExampleId::Dilrot2d).unwrap();
    match stabilizer_volume(sys.as_ref(), 0, &|y: &[f64]| (-y[0].ln().powi(2)).exp()).unwrap() {
        StabilizerVolume::Finite { volume } => assert_abs_diff_eq!(volume, 2.0 * PI / (4.0 * PI), epsilon = 1e-9),
        other => panic!("{other:?}"),
    }
}

#[test]
fn modular_function_examples() {
    // wavelet1d: ℝ ⋊ ℝ₊, ax+b group, Δ_G(a) is a power of a and not 1
    let sys = build_example(ExampleId::Wavelet1d).unwrap();
    let s = sys.as_ref();
    let d2 = modular_g(s, &GroupElement::dilation(s, vec![2.0]));
    let d4 = modular_g(s, &GroupElement::dilation(s, vec![4.0]));
    assert_relative_eq!(d4, d2 * d2, max_relative = 1e-13);
    assert!((d2 - 1.0).abs() > 0.1);
    // dilrot2d is non-unimodular, heisenberg is unimodular
    let sys = build_example(ExampleId::Heisenberg).unwrap();
    let s = sys.as_ref();
    for h in [vec![0.3], vec![-2.0], vec![5.0]] {
        assert_relative_eq!(modular_g(s, &GroupElement::dilation(s, h)), 1.0, max_relative = 1e-14);
    }
}

#[test]
fn verdicts() {
    let h = classify(build_example(ExampleId::Heisenberg).unwrap().as_ref(), 200).unwrap();
    assert_eq!(h.n_vs_d, DimensionRelation::Greater);
    assert_eq!(h.conclusion, Conclusion::NotReproducing);
    assert!(h.cited.iter().any(|c| c == TAG_DIMENSION));

    let id = ExampleId::Shearlet { gamma: 0.5 };
    let v = classify_example(id, build_example(id).unwrap().as_ref(), 200).unwrap();
    assert_eq!(v.effective(), Conclusion::Reproducing);
    assert!(!v.unimodular);
    assert!(v.cited.iter().any(|c| c == TAG_EQUAL_DIM));
    assert!(v.critical_fraction < 1e-2);

    let t = classify_example(ExampleId::Transdil2d, build_example(ExampleId::Transdil2d).unwrap().as_ref(), 200).unwrap();
    assert_eq!(t.conclusion, Conclusion::Conditional);
    assert_eq!(t.resolved, Some(Conclusion::Reproducing));

    assert!(classify(build_example(ExampleId::Wavelet1d).unwrap().as_ref(), 10).is_err());
}

#[test]
fn shearlet_rejects_non_positive_gamma() {
    assert!(build_example(ExampleId::Shearlet { gamma: 0.0 }).is_err());
    assert!(build_example(ExampleId::Shearlet { gamma: -1.0 }).is_err());
}

#[test]
fn linear_fit_recovers_a_line() {
    let x = [1.0, 2.0, 4.0, 8.0];
    let y: Vec<f64> = x.iter().map(|t| 3.25 * t - 0.5).collect();
    let (m, c, r2) = linear_fit(&x, &y);
    assert_relative_eq!(m, 3.25, max_relative = 1e-14);
    assert_abs_diff_eq!(c, -0.5, epsilon = 1e-13);
    assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-15);
    let (_, _, r2) = linear_fit(&x, &[1.0, -1.0, 1.0, -1.0]);
    assert!(r2 < 0.5);
}
