//! U_g f(x) = β(h)^{-1/2} e^{-2πi⟨Φ(x),a⟩} f(h⁻¹.x), realised as closure composition.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::quadrature::pairwise_sum;
use crate::system::{compose, contragredient, h_inv, image_box, GroupElement, SystemRef};
use crate::transform::InnerRule;
use num_complex::Complex64;
use std::f64::consts::PI;

pub fn apply_rep(sys: &SystemRef, g: &GroupElement, f: &Field) -> Field {
    let s = sys.clone();
    let hi = h_inv(sys.as_ref(), &g.h);
    let a = g.a.clone();
    let scale = sys.beta(&g.h).powf(-0.5);
    let inner = f.clone();
    let (n, d) = (sys.n(), sys.d());
    let mut out = Field::new(format!("U{:?}{}", g, f.label), move |x: &[f64]| {
        let mut y = vec![0.0; n];
        s.phi(x, &mut y);
        let mut hx = vec![0.0; d];
        s.act_d(&hi, x, &mut hx);
        let phase: f64 = y.iter().zip(&a).map(|(p, q)| p * q).sum();
        inner.eval(&hx) * Complex64::from_polar(scale, -2.0 * PI * phase)
    });
    // a pure translation only changes the phase, so the support stays put
    let moves = g.h != sys.h_identity();
    out.support_hint = f.support_hint.as_ref().map(|b| if moves { image_box(sys.as_ref(), &g.h, b) } else { b.clone() });
    out.norm_hint = f.norm_hint;
    out
}

/// max over probes of |U_{g1 g2} f − U_{g1} U_{g2} f|
pub fn homomorphism_residual(sys: &SystemRef, g1: &GroupElement, g2: &GroupElement, f: &Field, probes: &[Vec<f64>]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::Precondition("no probe points".into()));
    }
    let g12 = compose(sys.as_ref(), g1, g2);
    let lhs = apply_rep(sys, &g12, f);
    let rhs = apply_rep(sys, g1, &apply_rep(sys, g2, f));
    Ok(probes.iter().map(|x| (lhs.eval(x) - rhs.eval(x)).norm()).fold(0.0, f64::max))
}

/// max over probes of |U_h U_a U_{h⁻¹} f − U_{h†[a]} f|
pub fn conjugation_residual(sys: &SystemRef, a: &[f64], h: &[f64], f: &Field, probes: &[Vec<f64>]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::Precondition("no probe points".into()));
    }
    let s = sys.as_ref();
    let gh = GroupElement::dilation(s, h.to_vec());
    let ga = GroupElement::translation(s, a.to_vec());
    let ghi = GroupElement::dilation(s, h_inv(s, h));
    let lhs = apply_rep(sys, &gh, &apply_rep(sys, &ga, &apply_rep(sys, &ghi, f)));
    let rhs = apply_rep(sys, &GroupElement::translation(s, contragredient(s, h, a)), f);
    Ok(probes.iter().map(|x| (lhs.eval(x) - rhs.eval(x)).norm()).fold(0.0, f64::max))
}

/// |‖U_g f‖² − ‖f‖²| with both norms from the same rule.
pub fn unitarity_residual(sys: &SystemRef, g: &GroupElement, f: &Field, quad: &InnerRule) -> Result<f64> {
    let u = apply_rep(sys, g, f);
    quad.check_coverage(f)?;
    quad.check_coverage(&u)?;
    let n2 = |fl: &Field| {
        let v: Vec<f64> = (0..quad.len()).map(|k| quad.weights[k] * fl.eval(quad.point(k)).norm_sqr()).collect();
        pairwise_sum(&v)
    };
    Ok((n2(&u) - n2(f)).abs())
}
