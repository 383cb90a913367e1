//! ax+b group on the frequency line: H = ℝ₊ acting by dilations, Φ = id.

use crate::coarea::FiberMeasure;
use crate::error::Result;
use crate::field::Field;
use crate::orbit::{FiberKind, OrbitInfo, OrbitMetadata, Stabilizer};
use crate::quadrature::{Domain1d, Rule1d, TensorRule};
use crate::system::{AxisKind, ChartAxis, SemidirectSystem, Structure};
use crate::transform::{AGrid, HAxis, HGrid, InnerRule};
use num_complex::Complex64;
use std::f64::consts::PI;

pub struct Wavelet1d {
    meta: OrbitMetadata,
}

impl Default for Wavelet1d {
    fn default() -> Self {
        Self::new()
    }
}

impl Wavelet1d {
    pub fn new() -> Self {
        let half = |label, origin: f64, region| OrbitInfo {
            label,
            origin: vec![origin],
            lambda_weight: 1.0,
            region: vec![region],
            stabilizer: Stabilizer::Trivial { mass: 1.0 },
        };
        Wavelet1d {
            meta: OrbitMetadata {
                orbits: vec![half("+", 1.0, Domain1d::Above(0.0)), half("-", -1.0, Domain1d::Below(0.0))],
                fiber_kind: FiberKind::Finite(1),
                y_domain: vec![Domain1d::Line],
                label_of: |y| {
                    if y[0] > 0.0 {
                        Some(0)
                    } else if y[0] < 0.0 {
                        Some(1)
                    } else {
                        None
                    }
                },
                section: |y| vec![1.0 / y[0].abs()],
            },
        }
    }
}

impl SemidirectSystem for Wavelet1d {
    fn id(&self) -> String {
        "wavelet1d".into()
    }
    fn n(&self) -> usize {
        1
    }
    fn d(&self) -> usize {
        1
    }
    fn chart(&self) -> Vec<ChartAxis> {
        vec![ChartAxis::new("a", AxisKind::Positive)]
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        out[0] = y[0] / h[0];
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        out[0] = x[0] / h[0];
    }
    fn alpha(&self, h: &[f64]) -> f64 {
        h[0]
    }
    fn beta(&self, h: &[f64]) -> f64 {
        1.0 / h[0]
    }
    fn delta_h(&self, _h: &[f64]) -> f64 {
        1.0
    }
    fn haar_density(&self, h: &[f64]) -> f64 {
        1.0 / h[0]
    }
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]) {
        out[0] = h1[0] * h2[0];
    }
    fn h_inverse(&self, h: &[f64], out: &mut [f64]) {
        out[0] = 1.0 / h[0];
    }
    fn h_identity(&self) -> Vec<f64> {
        vec![1.0]
    }
    fn phi(&self, x: &[f64], out: &mut [f64]) {
        out[0] = x[0];
    }
    fn jphi_analytic(&self, _x: &[f64]) -> Option<f64> {
        Some(1.0)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] != 0.0
    }
    fn in_y(&self, y: &[f64]) -> bool {
        y[0] != 0.0 && y[0].is_finite()
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-4.0, 4.0)]
    }
    fn structure(&self) -> Structure {
        Structure { homogeneous_degree: Some(1.0), linear_action: true }
    }
    fn orbits(&self) -> Option<&OrbitMetadata> {
        Some(&self.meta)
    }
    fn fiber(&self, y: &[f64], _resolution: usize, _radius: Option<f64>) -> Result<FiberMeasure> {
        Ok(FiberMeasure { y: y.to_vec(), d: 1, nodes: vec![y[0]], weights: vec![1.0], chart_desc: "single point".into(), truncation: None })
    }
}

/// η(s) = 2|s| e^{-s²}; ∫₀^∞ |η(±s)|² ds/s = 1.
pub fn eta_explicit() -> Field {
    Field::real("wavelet 2|s|exp(-s^2)", |x| 2.0 * x[0].abs() * (-x[0] * x[0]).exp()).with_support(vec![(-7.0, 7.0)])
}

/// Two Gaussian lobes, one modulated, on both half-lines.
pub fn f_gaussian() -> Field {
    Field::new("gaussian pair", |x| {
        let s = x[0];
        Complex64::from_polar((-2.0 * (s - 2.0) * (s - 2.0)).exp(), PI * s) + 0.5 * (-2.0 * (s + 1.5) * (s + 1.5)).exp()
    })
    .with_support(vec![(-5.0, 6.5)])
}

pub fn inner_rule(sys: &dyn SemidirectSystem) -> InnerRule {
    InnerRule::tensor(sys, &TensorRule::new(vec![Rule1d::gauss(384, -5.0, 6.5)]), "Gauss-Legendre 384 on [-5,6.5]")
}

pub fn agrid() -> AGrid {
    AGrid::symmetric(1, 16.0, 1.0 / 16.0)
}

pub fn hgrid(sys: &dyn SemidirectSystem) -> HGrid {
    HGrid::tensor(sys, &[HAxis::Log { lo: 1.0 / 64.0, hi: 64.0, count: 96 }]).expect("static grid")
}
