//! Similitude group ℝ₊ × SO(2) on ℝ², with the radial moment map Φ(x) = |x|².
//! Chart (t, θ).

use crate::coarea::FiberMeasure;
use crate::error::Result;
use crate::field::Field;
use crate::orbit::{FiberKind, OrbitInfo, OrbitMetadata, Stabilizer, StabilizerChart};
use crate::quadrature::{Domain1d, Rule1d};
use crate::system::{AxisKind, ChartAxis, SemidirectSystem, Structure};
use crate::transform::{AGrid, HAxis, HGrid, InnerRule};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Highest angular mode carried by `eta_explicit`.
pub const ETA_MODES: i32 = 4;

pub struct DilRot2d {
    meta: OrbitMetadata,
}

impl Default for DilRot2d {
    fn default() -> Self {
        Self::new()
    }
}

impl DilRot2d {
    pub fn new() -> Self {
        DilRot2d {
            meta: OrbitMetadata {
                orbits: vec![OrbitInfo {
                    label: "Y",
                    origin: vec![1.0],
                    lambda_weight: 1.0,
                    region: vec![Domain1d::Above(0.0)],
                    stabilizer: Stabilizer::Compact(StabilizerChart {
                        desc: "rotations, dθ/4π",
                        domain: Domain1d::Interval(0.0, 2.0 * PI),
                        haar_density: 1.0 / (4.0 * PI),
                        embed: |s| vec![1.0, s],
                    }),
                }],
                fiber_kind: FiberKind::Compact,
                y_domain: vec![Domain1d::Above(0.0)],
                label_of: |y| if y[0] > 0.0 { Some(0) } else { None },
                section: |y| vec![y[0].sqrt(), 0.0],
            },
        }
    }
}

impl SemidirectSystem for DilRot2d {
    fn id(&self) -> String {
        "dilrot2d".into()
    }
    fn n(&self) -> usize {
        1
    }
    fn d(&self) -> usize {
        2
    }
    fn chart(&self) -> Vec<ChartAxis> {
        vec![ChartAxis::new("t", AxisKind::Positive), ChartAxis::new("theta", AxisKind::Angle)]
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        out[0] = h[0] * h[0] * y[0];
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        let (s, c) = h[1].sin_cos();
        out[0] = h[0] * (c * x[0] - s * x[1]);
        out[1] = h[0] * (s * x[0] + c * x[1]);
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
        1.0 / (2.0 * PI * h[0])
    }
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]) {
        out[0] = h1[0] * h2[0];
        out[1] = (h1[1] + h2[1]).rem_euclid(2.0 * PI);
    }
    fn h_inverse(&self, h: &[f64], out: &mut [f64]) {
        out[0] = 1.0 / h[0];
        out[1] = (-h[1]).rem_euclid(2.0 * PI);
    }
    fn h_identity(&self) -> Vec<f64> {
        vec![1.0, 0.0]
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
        y[0] > 0.0 && y[0].is_finite()
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
    fn fiber(&self, y: &[f64], resolution: usize, _radius: Option<f64>) -> Result<FiberMeasure> {
        let r = y[0].sqrt();
        let mut nodes = Vec::with_capacity(2 * resolution);
        for k in 0..resolution {
            let (s, c) = (2.0 * PI * k as f64 / resolution as f64).sin_cos();
            nodes.push(r * c);
            nodes.push(r * s);
        }
        Ok(FiberMeasure {
            y: y.to_vec(),
            d: 2,
            nodes,
            weights: vec![PI / resolution as f64; resolution],
            chart_desc: format!("circle of radius sqrt(y), {resolution} equispaced angles"),
            truncation: None,
        })
    }
}

fn radial_profile(s: f64) -> f64 {
    2.0 * s * (-s * s).exp() / PI.sqrt()
}

/// cos φ of the polar angle of x, and |x|
fn polar(x: &[f64]) -> (f64, f64) {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        (1.0, 0.0)
    } else {
        (x[0] / r, r)
    }
}

/// η(r, φ) = P(r)(1 + 2Σ_{n≤4} cos nφ), P(s) = 2s e^{-s²}/√π.
/// Admissible for inputs whose angular modes stay in |n| ≤ 4.
pub fn eta_explicit() -> Field {
    Field::real("dilrot band-limited", |x| {
        let (c, r) = polar(x);
        // Chebyshev recursion for cos nφ
        let (mut t0, mut t1) = (1.0, c);
        let mut sum = 1.0;
        for _ in 0..ETA_MODES {
            sum += 2.0 * t1;
            let t2 = 2.0 * c * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        radial_profile(r) * sum
    })
    .with_support(vec![(-7.0, 7.0), (-7.0, 7.0)])
}

/// Ring with angular modes 0, 1, -2.
pub fn f_ring() -> Field {
    Field::new("ring", |x| {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let rho = (-(r - 2.0) * (r - 2.0) / 0.125).exp();
        let e1 = Complex64::new(x[0] / r, x[1] / r);
        rho * (1.0 + 0.5 * e1 + 0.3 * e1.conj() * e1.conj())
    })
    .with_support(vec![(-3.6, 3.6), (-3.6, 3.6)])
}

/// Polar rule: Gauss-Legendre in r, equispaced angles.
pub fn polar_rule(sys: &dyn SemidirectSystem, nr: usize, r: (f64, f64), nphi: usize) -> InnerRule {
    let rr = Rule1d::gauss(nr, r.0, r.1);
    let mut pts = Vec::with_capacity(2 * nr * nphi);
    let mut wts = Vec::with_capacity(nr * nphi);
    for (&rad, &w) in rr.nodes.iter().zip(&rr.weights) {
        for k in 0..nphi {
            let (s, c) = (2.0 * PI * k as f64 / nphi as f64).sin_cos();
            pts.push(rad * c);
            pts.push(rad * s);
            wts.push(w * rad * 2.0 * PI / nphi as f64);
        }
    }
    InnerRule::from_points(sys, pts, wts, format!("polar: Gauss-Legendre {nr} on [{},{}] x {nphi} angles", r.0, r.1)).with_bounds(vec![(-r.1, r.1); 2])
}

pub fn inner_rule(sys: &dyn SemidirectSystem) -> InnerRule {
    polar_rule(sys, 352, (0.4, 3.6), 32)
}

pub fn agrid() -> AGrid {
    AGrid::symmetric(1, 4.0, 1.0 / 16.0)
}

pub fn hgrid(sys: &dyn SemidirectSystem) -> HGrid {
    HGrid::tensor(sys, &[HAxis::Log { lo: 1.0 / 64.0, hi: 64.0, count: 96 }, HAxis::Periodic { count: 16 }]).expect("static grid")
}

/// Angular Fourier coefficient of η at radius r: η̂_n(r) = (1/2π)∫η(r,φ)e^{-inφ}dφ.
pub fn angular_mode(eta: &Field, r: f64, n: i32, nphi: usize) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..nphi {
        let p = 2.0 * PI * k as f64 / nphi as f64;
        let v = eta.eval(&[r * p.cos(), r * p.sin()]);
        s += v * Complex64::from_polar(1.0, -(n as f64) * p);
    }
    s / nphi as f64
}

