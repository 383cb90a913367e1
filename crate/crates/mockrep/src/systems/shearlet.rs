//! Shearlet group acting on ℝ² through S_ℓ A_t, with Φ(x) = -(x₁², x₁x₂)/2.
//! Chart (ℓ, t), t > 0.

use crate::coarea::FiberMeasure;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::orbit::{FiberKind, OrbitInfo, OrbitMetadata, Stabilizer};
use crate::quadrature::{Domain1d, Rule1d};
use crate::system::{AxisKind, ChartAxis, SemidirectSystem, Structure};
use crate::transform::{AGrid, HAxis, HGrid, InnerRule};
use num_complex::Complex64;
use std::f64::consts::PI;

pub struct Shearlet {
    pub gamma: f64,
    meta: OrbitMetadata,
}

impl Shearlet {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Parameter(format!("shearlet needs gamma > 0, got {gamma}")));
        }
        Ok(Shearlet {
            gamma,
            meta: OrbitMetadata {
                orbits: vec![OrbitInfo {
                    label: "Y",
                    origin: vec![-0.5, 0.0],
                    lambda_weight: 1.0,
                    region: vec![Domain1d::Below(0.0), Domain1d::Line],
                    // y(ℓ,t) = (-1/(2t), ℓ/(2t)) has Jacobian 1/(4t³) against α(h⁻¹)dh = t⁻³ dℓ dt
                    stabilizer: Stabilizer::Trivial { mass: 4.0 },
                }],
                fiber_kind: FiberKind::Finite(2),
                y_domain: vec![Domain1d::Below(0.0), Domain1d::Line],
                label_of: |y| if y[0] < 0.0 { Some(0) } else { None },
                section: |y| vec![-y[1] / y[0], -0.5 / y[0]],
            },
        })
    }
}

impl SemidirectSystem for Shearlet {
    fn id(&self) -> String {
        format!("shearlet(gamma={})", self.gamma)
    }
    fn n(&self) -> usize {
        2
    }
    fn d(&self) -> usize {
        2
    }
    fn chart(&self) -> Vec<ChartAxis> {
        vec![ChartAxis::new("l", AxisKind::Line), ChartAxis::new("t", AxisKind::Positive)]
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        let (l, t) = (h[0], h[1]);
        out[0] = y[0] / t;
        out[1] = -l * y[0] / t + t.powf(-self.gamma) * y[1];
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        let (l, t) = (h[0], h[1]);
        let s = t.powf(-0.5);
        out[0] = s * x[0];
        out[1] = -l * s * x[0] + t.powf(0.5 - self.gamma) * x[1];
    }
    fn alpha(&self, h: &[f64]) -> f64 {
        h[1].powf(1.0 + self.gamma)
    }
    fn beta(&self, h: &[f64]) -> f64 {
        h[1].powf(-self.gamma)
    }
    fn delta_h(&self, h: &[f64]) -> f64 {
        h[1].powf(self.gamma - 1.0)
    }
    fn haar_density(&self, h: &[f64]) -> f64 {
        h[1].powf(self.gamma - 2.0)
    }
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]) {
        out[0] = h1[0] + h1[1].powf(1.0 - self.gamma) * h2[0];
        out[1] = h1[1] * h2[1];
    }
    fn h_inverse(&self, h: &[f64], out: &mut [f64]) {
        out[0] = -h[1].powf(self.gamma - 1.0) * h[0];
        out[1] = 1.0 / h[1];
    }
    fn h_identity(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
    fn phi(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -0.5 * x[0] * x[0];
        out[1] = -0.5 * x[0] * x[1];
    }
    fn jphi_analytic(&self, x: &[f64]) -> Option<f64> {
        Some(0.5 * x[0] * x[0])
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] != 0.0
    }
    fn in_y(&self, y: &[f64]) -> bool {
        y[0] < 0.0 && y[1].is_finite()
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
    fn fiber(&self, y: &[f64], _resolution: usize, _radius: Option<f64>) -> Result<FiberMeasure> {
        let s = (-2.0 * y[0]).sqrt();
        let w = 1.0 / (-y[0]);
        Ok(FiberMeasure {
            y: y.to_vec(),
            d: 2,
            nodes: vec![s, -2.0 * y[1] / s, -s, 2.0 * y[1] / s],
            weights: vec![w, w],
            chart_desc: "two points ±(sqrt(-2y1), -2y2/x1)".into(),
            truncation: None,
        })
    }
}

/// Indicator construction: η = √2·1_{[1,2]×[0,1]}(-Φ(x))√JΦ on x₁ > 0 and
/// √2·1_{[-2,-1]×[0,1]}(Φ(x))√JΦ on x₁ < 0.
pub fn eta_indicator() -> Field {
    Field::real("shearlet indicator", |x| {
        let (x1, x2) = (x[0], x[1]);
        let w1 = 0.5 * x1 * x1;
        let w2 = 0.5 * x1 * x2;
        let inside = if x1 > 0.0 {
            (1.0..=2.0).contains(&w1) && (0.0..=1.0).contains(&w2)
        } else if x1 < 0.0 {
            (1.0..=2.0).contains(&w1) && (0.0..=1.0).contains(&(-w2))
        } else {
            false
        };
        if inside {
            (2.0 * w1).sqrt()
        } else {
            0.0
        }
    })
    .with_support(vec![(-2.0, 2.0), (-2.0, 2.0)])
}

/// Smooth admissible vector: g(ω₁)k±(ω₂)√JΦ with g(w) = 2w²e^{-w}, k₊ an even and k₋ an odd
/// normalised Gaussian profile, in the coordinates ω = (x₁²/2, x₁x₂/2).
pub fn eta_smooth() -> Field {
    let c = (2.0 / PI).powf(0.25);
    Field::real("shearlet smooth", move |x| {
        let (x1, x2) = (x[0], x[1]);
        if x1 == 0.0 {
            return 0.0;
        }
        let w = 0.5 * x1 * x1;
        let v = 0.5 * x1 * x2;
        let g = 2.0 * w * w * (-w).exp();
        let k = if x1 > 0.0 { c * (-v * v).exp() } else { c * 2.0 * v * (-v * v).exp() };
        g * k * w.sqrt()
    })
}

pub fn f_gaussian() -> Field {
    Field::new("gaussian pair", |x| {
        let (x1, x2) = (x[0], x[1]);
        let a = (-(x1 - 1.4).powi(2) / 0.08 - x2 * x2 / 0.125).exp();
        let b = (-(x1 + 1.2).powi(2) / 0.08 - (x2 - 0.3).powi(2) / 0.125).exp();
        Complex64::new(a, 0.0) + Complex64::from_polar(0.6 * b, 0.5 * PI * x2)
    })
    .with_support(vec![(-2.4, 2.6), (-1.5, 1.8)])
}

/// Pull-back of a Gauss-Legendre grid on the y-box [y1lo, y1hi] × [-y2max, y2max]:
/// every y carries the two points of its fiber with weight w_y / JΦ.
pub fn pullback_rule(sys: &dyn SemidirectSystem, y1: (f64, f64, usize), y2max: f64, n2: usize) -> InnerRule {
    let r1 = Rule1d::gauss(y1.2, y1.0, y1.1);
    let r2 = Rule1d::gauss(n2, -y2max, y2max);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (a, wa) in r1.nodes.iter().zip(&r1.weights) {
        for (b, wb) in r2.nodes.iter().zip(&r2.weights) {
            let s = (-2.0 * a).sqrt();
            let w = wa * wb / (-a);
            pts.extend_from_slice(&[s, -2.0 * b / s, -s, 2.0 * b / s]);
            wts.extend_from_slice(&[w, w]);
        }
    }
    InnerRule::from_points(
        sys,
        pts,
        wts,
        format!("fiber pull-back of Gauss-Legendre {}x{} on [{},{}]x[-{y2max},{y2max}]", y1.2, n2, y1.0, y1.1),
    )
}

pub fn inner_rule(sys: &dyn SemidirectSystem) -> InnerRule {
    pullback_rule(sys, (-3.4, -0.02, 64), 2.2, 76)
}

pub fn agrid() -> AGrid {
    AGrid::symmetric(2, 4.0, 0.2)
}

pub fn hgrid(sys: &dyn SemidirectSystem) -> HGrid {
    HGrid::tensor(sys, &[HAxis::Uniform { lo: -16.0, hi: 16.0, count: 128 }, HAxis::Log { lo: 1.0 / 64.0, hi: 64.0, count: 64 }]).expect("static grid")
}

/// Fine grid for the point-fiber criterion; t-cells have edges at 2 and 4.
pub fn criterion_hgrid(sys: &dyn SemidirectSystem) -> HGrid {
    HGrid::tensor(sys, &[HAxis::Uniform { lo: -4.0, hi: 4.0, count: 1024 }, HAxis::Log { lo: 1.0 / 64.0, hi: 64.0, count: 240 }]).expect("static grid")
}

/// Eight vectors on the fiber {(±1, 0)}, constant on each half-plane.
pub fn fiber_test_vectors() -> Vec<Field> {
    let pairs = [
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)),
        (Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(0.5, 0.5), Complex64::new(-1.0, 2.0)),
    ];
    pairs
        .iter()
        .enumerate()
        .map(|(i, &(p, m))| Field::new(format!("u{i}"), move |x| if x[0] > 0.0 { p } else { m }))
        .collect()
}
