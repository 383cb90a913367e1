//! ℝ* × ℝ acting on ℝ² by (x₁ + b, t x₂), with the linear moment map Φ(x) = x₂.
//! Chart (t, b). The stabilizer of every y is the translation subgroup {(1, b)}.

use crate::coarea::FiberMeasure;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::orbit::{FiberKind, OrbitInfo, OrbitMetadata, Stabilizer, StabilizerChart};
use crate::quadrature::{Domain1d, Rule1d, TensorRule};
use crate::system::{AxisKind, ChartAxis, SemidirectSystem, Structure};
use crate::transform::{AGrid, HAxis, HGrid, InnerRule};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub struct TransDil2d {
    meta: OrbitMetadata,
}

impl Default for TransDil2d {
    fn default() -> Self {
        Self::new()
    }
}

impl TransDil2d {
    pub fn new() -> Self {
        TransDil2d {
            meta: OrbitMetadata {
                orbits: vec![OrbitInfo {
                    label: "Y",
                    origin: vec![1.0],
                    lambda_weight: 1.0,
                    region: vec![Domain1d::Line],
                    stabilizer: Stabilizer::Noncompact(StabilizerChart {
                        desc: "translations {(1,b)}, db",
                        domain: Domain1d::Line,
                        haar_density: 1.0,
                        embed: |b| vec![1.0, b],
                    }),
                }],
                fiber_kind: FiberKind::Unbounded,
                y_domain: vec![Domain1d::Line],
                label_of: |y| if y[0] != 0.0 { Some(0) } else { None },
                section: |y| vec![y[0], 0.0],
            },
        }
    }
}

impl SemidirectSystem for TransDil2d {
    fn id(&self) -> String {
        "transdil2d".into()
    }
    fn n(&self) -> usize {
        1
    }
    fn d(&self) -> usize {
        2
    }
    fn chart(&self) -> Vec<ChartAxis> {
        vec![ChartAxis::new("t", AxisKind::NonZero), ChartAxis::new("b", AxisKind::Line)]
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        out[0] = h[0] * y[0];
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        out[0] = x[0] + h[1];
        out[1] = h[0] * x[1];
    }
    fn alpha(&self, h: &[f64]) -> f64 {
        1.0 / h[0].abs()
    }
    fn beta(&self, h: &[f64]) -> f64 {
        h[0].abs()
    }
    fn delta_h(&self, _h: &[f64]) -> f64 {
        1.0
    }
    fn haar_density(&self, h: &[f64]) -> f64 {
        1.0 / h[0].abs()
    }
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]) {
        out[0] = h1[0] * h2[0];
        out[1] = h1[1] + h2[1];
    }
    fn h_inverse(&self, h: &[f64], out: &mut [f64]) {
        out[0] = 1.0 / h[0];
        out[1] = -h[1];
    }
    fn h_identity(&self) -> Vec<f64> {
        vec![1.0, 0.0]
    }
    fn phi(&self, x: &[f64], out: &mut [f64]) {
        out[0] = x[1];
    }
    fn jphi_analytic(&self, _x: &[f64]) -> Option<f64> {
        Some(1.0)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[1] != 0.0
    }
    fn in_y(&self, y: &[f64]) -> bool {
        y[0] != 0.0 && y[0].is_finite()
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-3.0, 3.0), (-3.0, 3.0)]
    }
    fn structure(&self) -> Structure {
        Structure { homogeneous_degree: Some(1.0), linear_action: false }
    }
    fn orbits(&self) -> Option<&OrbitMetadata> {
        Some(&self.meta)
    }
    fn fiber(&self, y: &[f64], resolution: usize, radius: Option<f64>) -> Result<FiberMeasure> {
        let r = radius.ok_or_else(|| Error::Config("the fibers of transdil2d are lines; a truncation radius is required".into()))?;
        if !(r > 0.0) {
            return Err(Error::Config(format!("fiber radius must be positive, got {r}")));
        }
        let g = Rule1d::gauss(resolution, -r, r);
        let mut nodes = Vec::with_capacity(2 * resolution);
        for &xi in &g.nodes {
            nodes.push(xi);
            nodes.push(y[0]);
        }
        Ok(FiberMeasure {
            y: y.to_vec(),
            d: 2,
            nodes,
            weights: g.weights,
            chart_desc: format!("line x2 = y, Gauss-Legendre {resolution} on [-{r},{r}]"),
            truncation: Some(r),
        })
    }
}

/// σ(ω) = 4e^{-ω²/2}
pub fn sigma(omega: f64) -> f64 {
    4.0 * (-0.5 * omega * omega).exp()
}

/// Partial Fourier transform of η in x₁: η̂(y, ω) = (|y| e^{-y²/2σ²} / (√(2π) σ))^{1/2}.
/// For every ω, ∫ |η̂(y, ω)|² dy/|y| = 1.
pub fn eta_hat(y: f64, omega: f64) -> f64 {
    let s = sigma(omega);
    if s == 0.0 {
        return 0.0;
    }
    let v = y.abs() * (-y * y / (2.0 * s * s)).exp() / ((2.0 * PI).sqrt() * s);
    v.sqrt()
}

const OMEGA_MAX: f64 = 7.0;
const OMEGA_STEP: f64 = 1.0 / 32.0;
const XI_MAX: f64 = 16.0;
const XI_STEP: f64 = 0.01;
const U_STEP: f64 = 0.01;
const Y_MIN: f64 = 1e-4;
const Y_MAX: f64 = 60.0;

fn omega_nodes() -> Vec<f64> {
    let m = (OMEGA_MAX / OMEGA_STEP).round() as i64;
    (-m..=m).map(|j| j as f64 * OMEGA_STEP).collect()
}

/// η(ξ, y) = ∫ η̂(y, ω) cos(2πωξ) dω by the trapezoid rule on [-7, 7].
/// η̂ is even in ω and negligible at the ends for |y| ≥ 1e-4, so the rule is spectrally accurate.
fn eta_direct(xi: f64, y: f64) -> f64 {
    omega_nodes().iter().map(|&w| eta_hat(y, w) * (2.0 * PI * w * xi).cos()).sum::<f64>() * OMEGA_STEP
}

struct EtaTable {
    nxi: usize,
    nu: usize,
    u0: f64,
    /// row per u, column per ξ
    vals: Vec<f64>,
}

fn table() -> &'static EtaTable {
    static T: OnceLock<EtaTable> = OnceLock::new();
    T.get_or_init(|| {
        let om = omega_nodes();
        let nxi = (XI_MAX / XI_STEP).round() as usize + 1;
        let u0 = Y_MIN.ln();
        let nu = ((Y_MAX.ln() - u0) / U_STEP).ceil() as usize + 1;
        let cos: Vec<f64> = (0..nxi)
            .flat_map(|i| {
                let xi = i as f64 * XI_STEP;
                om.iter().map(move |&w| (2.0 * PI * w * xi).cos())
            })
            .collect();
        let m = om.len();
        let vals: Vec<f64> = (0..nu)
            .into_par_iter()
            .flat_map_iter(|j| {
                let y = (u0 + j as f64 * U_STEP).exp();
                let hat: Vec<f64> = om.iter().map(|&w| eta_hat(y, w) * OMEGA_STEP).collect();
                let cos = &cos;
                (0..nxi).map(move |i| cos[i * m..(i + 1) * m].iter().zip(&hat).map(|(c, h)| c * h).sum::<f64>()).collect::<Vec<_>>()
            })
            .collect();
        EtaTable { nxi, nu, u0, vals }
    })
}

/// 4-point Lagrange stencil: first index and weights.
fn stencil(p: f64, n: usize) -> (usize, [f64; 4]) {
    let k = (p.floor() as isize).clamp(1, n as isize - 3) as usize;
    let t = p - k as f64;
    let w = [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ];
    (k - 1, w)
}

/// Spatial η, even in both variables: tabulated on ξ ∈ [0, 16] × ln|y| ∈ [ln 1e-4, ln 60]
/// with bicubic Lagrange interpolation, direct quadrature below |y| = 1e-4, 0 beyond |ξ| = 16 or |y| = 60.
pub fn eta_value(xi: f64, y: f64) -> f64 {
    let xi = xi.abs();
    let y = y.abs();
    // past Y_MAX, η̂ ≤ e^{-56}
    if xi > XI_MAX || y == 0.0 || y > Y_MAX {
        return 0.0;
    }
    if y < Y_MIN {
        return eta_direct(xi, y);
    }
    let t = table();
    let (i0, wi) = stencil(xi / XI_STEP, t.nxi);
    let (j0, wj) = stencil((y.ln() - t.u0) / U_STEP, t.nu);
    let mut s = 0.0;
    for (a, wa) in wj.iter().enumerate() {
        let row = &t.vals[(j0 + a) * t.nxi..];
        s += wa * (wi[0] * row[i0] + wi[1] * row[i0 + 1] + wi[2] * row[i0 + 2] + wi[3] * row[i0 + 3]);
    }
    s
}

pub fn eta_explicit() -> Field {
    Field::real("transdil partial-Fourier vector", |x| eta_value(x[0], x[1])).with_support(vec![(-XI_MAX, XI_MAX), (-Y_MAX, Y_MAX)])
}

/// Direct-quadrature η, for checking the table.
pub fn eta_reference(xi: f64, y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        eta_direct(xi.abs(), y.abs())
    }
}

pub fn f_gaussian() -> Field {
    Field::real("gaussian", |x| (-0.5 * x[0] * x[0] - (x[1] - 0.75).powi(2) / (2.0 * 0.0144)).exp()).with_support(vec![(-6.5, 6.5), (0.03, 1.47)])
}

pub fn inner_rule(sys: &dyn SemidirectSystem) -> InnerRule {
    InnerRule::tensor(sys, &TensorRule::new(vec![Rule1d::gauss(160, -6.5, 6.5), Rule1d::gauss(64, 0.03, 1.47)]), "Gauss-Legendre 160 on [-6.5,6.5] x 64 on [0.03,1.47]")
}

pub fn agrid() -> AGrid {
    AGrid::symmetric(1, 8.0, 0.25)
}

pub fn hgrid(sys: &dyn SemidirectSystem) -> HGrid {
    HGrid::tensor(sys, &[HAxis::Log { lo: 1.0 / 64.0, hi: 64.0, count: 64 }, HAxis::Uniform { lo: -8.0, hi: 8.0, count: 96 }]).expect("static grid")
}
