//! Plugging in a new system: dilations of ℝ² alone, H = ℝ₊, with Φ(x) = |x|².
//! The group is non-unimodular and the stabilizers are trivial, so the structural
//! verdict is REPRODUCING even though every fiber is a whole circle.
//!
//!     cargo run --release --example custom_system

use mockrep::admissibility::classify;
use mockrep::coarea::FiberMeasure;
use mockrep::orbit::{weil_residual, FiberKind, OrbitInfo, OrbitMetadata, Stabilizer};
use mockrep::quadrature::Domain1d;
use mockrep::system::{validate_system, AxisKind, ChartAxis, SemidirectSystem, Structure};
use std::f64::consts::PI;

struct Dilations {
    meta: OrbitMetadata,
}

impl Dilations {
    fn new() -> Self {
        Dilations {
            meta: OrbitMetadata {
                orbits: vec![OrbitInfo {
                    label: "Y",
                    origin: vec![1.0],
                    lambda_weight: 1.0,
                    region: vec![Domain1d::Above(0.0)],
                    // ∫φ(t) t dt = c ∫φ(√y) dy = 2c ∫φ(t) t dt
                    stabilizer: Stabilizer::Trivial { mass: 0.5 },
                }],
                fiber_kind: FiberKind::Compact,
                y_domain: vec![Domain1d::Above(0.0)],
                label_of: |y| (y[0] > 0.0).then_some(0),
                section: |y| vec![y[0].sqrt()],
            },
        }
    }
}

impl SemidirectSystem for Dilations {
    fn id(&self) -> String {
        "dilations2d".into()
    }
    fn n(&self) -> usize {
        1
    }
    fn d(&self) -> usize {
        2
    }
    fn chart(&self) -> Vec<ChartAxis> {
        vec![ChartAxis::new("t", AxisKind::Positive)]
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        out[0] = h[0] * h[0] * y[0];
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        out[0] = h[0] * x[0];
        out[1] = h[0] * x[1];
    }
    fn alpha(&self, h: &[f64]) -> f64 {
        1.0 / (h[0] * h[0])
    }
    fn beta(&self, h: &[f64]) -> f64 {
        h[0] * h[0]
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
        out[0] = x[0] * x[0] + x[1] * x[1];
    }
    fn jphi_analytic(&self, x: &[f64]) -> Option<f64> {
        Some(2.0 * x[0].hypot(x[1]))
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] != 0.0 || x[1] != 0.0
    }
    fn in_y(&self, y: &[f64]) -> bool {
        y[0] > 0.0
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-3.0, 3.0), (-3.0, 3.0)]
    }
    fn structure(&self) -> Structure {
        Structure { homogeneous_degree: Some(2.0), linear_action: true }
    }
    fn orbits(&self) -> Option<&OrbitMetadata> {
        Some(&self.meta)
    }
    fn fiber(&self, y: &[f64], resolution: usize, _radius: Option<f64>) -> mockrep::Result<FiberMeasure> {
        let r = y[0].sqrt();
        let nodes = (0..resolution)
            .flat_map(|k| {
                let (s, c) = (2.0 * PI * k as f64 / resolution as f64).sin_cos();
                [r * c, r * s]
            })
            .collect();
        Ok(FiberMeasure { y: y.to_vec(), d: 2, nodes, weights: vec![PI / resolution as f64; resolution], chart_desc: "circle".into(), truncation: None })
    }
}

fn main() -> mockrep::Result<()> {
    let sys = Dilations::new();
    let rep = validate_system(&sys, 200)?;
    for c in &rep.checks {
        println!("{:<16} {:.1e} {}", c.tag, c.max_residual, if c.passed { "ok" } else { "FAIL" });
    }
    let w = weil_residual(&sys, 0, &|h: &[f64]| (-h[0].ln().powi(2)).exp())?;
    println!("Weil residual with point mass 1/2: {:.1e}", w.residual);
    let v = classify(&sys, 1000)?;
    println!("verdict {:?} ({})", v.conclusion, v.cited.join("; "));
    Ok(())
}
