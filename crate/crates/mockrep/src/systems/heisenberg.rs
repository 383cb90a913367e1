//! Schrödinger-type realisation: H = ℝ acting by translations, n = 2 > d = 1.

use crate::field::Field;
use crate::quadrature::{Rule1d, TensorRule};
use crate::system::{AxisKind, ChartAxis, SemidirectSystem};
use crate::transform::{AGrid, HAxis, HGrid, InnerRule};

#[derive(Default)]
pub struct Heisenberg;

impl SemidirectSystem for Heisenberg {
    fn id(&self) -> String {
        "heisenberg".into()
    }
    fn n(&self) -> usize {
        2
    }
    fn d(&self) -> usize {
        1
    }
    fn chart(&self) -> Vec<ChartAxis> {
        vec![ChartAxis::new("q", AxisKind::Line)]
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        out[0] = y[0] - h[0] * y[1];
        out[1] = y[1];
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        out[0] = x[0] + h[0];
    }
    fn alpha(&self, _h: &[f64]) -> f64 {
        1.0
    }
    fn beta(&self, _h: &[f64]) -> f64 {
        1.0
    }
    fn delta_h(&self, _h: &[f64]) -> f64 {
        1.0
    }
    fn haar_density(&self, _h: &[f64]) -> f64 {
        1.0
    }
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]) {
        out[0] = h1[0] + h2[0];
    }
    fn h_inverse(&self, h: &[f64], out: &mut [f64]) {
        out[0] = -h[0];
    }
    fn h_identity(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn phi(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -x[0];
        out[1] = 1.0;
    }
    fn jphi_analytic(&self, _x: &[f64]) -> Option<f64> {
        // the differential has rank 1 < n
        Some(0.0)
    }
    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }
    fn in_y(&self, y: &[f64]) -> bool {
        y[1] == 1.0
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-4.0, 4.0)]
    }
}

pub fn f_gaussian() -> Field {
    Field::real("gaussian", |x| (-x[0] * x[0]).exp()).with_support(vec![(-6.0, 6.0)])
}

pub fn eta_gaussian() -> Field {
    Field::real("shifted gaussian", |x| (-2.0 * (x[0] - 0.3) * (x[0] - 0.3)).exp())
}

pub fn inner_rule(sys: &dyn SemidirectSystem) -> InnerRule {
    InnerRule::tensor(sys, &TensorRule::new(vec![Rule1d::gauss(128, -6.0, 6.0)]), "Gauss-Legendre 128 on [-6,6]")
}

/// p ∈ [-8, 8] and the central coordinate t ∈ [0, T].
pub fn agrid(t_max: f64) -> AGrid {
    let nt = (8.0 * t_max).ceil().max(1.0) as usize;
    AGrid::from_axes(vec![Rule1d::midpoint(256, -8.0, 8.0), Rule1d::midpoint(nt, 0.0, t_max)], format!("p in [-8,8] x 256, t in [0,{t_max}] x {nt}"))
}

pub fn hgrid(sys: &dyn SemidirectSystem) -> HGrid {
    HGrid::tensor(sys, &[HAxis::Uniform { lo: -6.0, hi: 6.0, count: 48 }]).expect("static grid")
}
