//! The system trait, group-level operations on G = ℝⁿ ⋊ H and structural validation.

use crate::coarea::FiberMeasure;
use crate::error::{Error, Result};
use crate::orbit::OrbitMetadata;
use crate::quadrature::{Rule1d, TensorRule};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Kind of a coordinate of the H chart. Drives sampling, grids and distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// (0, ∞), multiplicative
    Positive,
    /// ℝ∖{0}, multiplicative with sign
    NonZero,
    /// ℝ, additive
    Line,
    /// ℝ/2πℤ
    Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartAxis {
    pub name: &'static str,
    pub kind: AxisKind,
}

impl ChartAxis {
    pub const fn new(name: &'static str, kind: AxisKind) -> Self {
        ChartAxis { name, kind }
    }
}

/// Metadata used by the dilation transfer and the homogeneous obstruction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Structure {
    /// Φ(δx) = δ^p Φ(x)
    pub homogeneous_degree: Option<f64>,
    /// act_d(h, ·) is linear for every h
    pub linear_action: bool,
}

pub trait SemidirectSystem: Send + Sync {
    /// Identifier plus parameters, e.g. `shearlet(gamma=0.5)`.
    fn id(&self) -> String;
    fn n(&self) -> usize;
    fn d(&self) -> usize;
    fn chart(&self) -> Vec<ChartAxis>;
    fn h_dim(&self) -> usize {
        self.chart().len()
    }

    /// h[y], linear in y.
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]);
    /// h.x
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]);
    fn alpha(&self, h: &[f64]) -> f64;
    fn beta(&self, h: &[f64]) -> f64;
    fn delta_h(&self, h: &[f64]) -> f64;
    /// density of dh against Lebesgue measure on the chart
    fn haar_density(&self, h: &[f64]) -> f64;
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]);
    fn h_inverse(&self, h: &[f64], out: &mut [f64]);
    fn h_identity(&self) -> Vec<f64>;

    fn phi(&self, x: &[f64], out: &mut [f64]);
    fn jphi_analytic(&self, _x: &[f64]) -> Option<f64> {
        None
    }
    /// membership in the open invariant set X
    fn in_domain(&self, x: &[f64]) -> bool;
    /// membership in Y = Φ(X)
    fn in_y(&self, _y: &[f64]) -> bool {
        true
    }
    /// reference box in ℝᵈ used for sampling points of X
    fn sample_box(&self) -> Vec<(f64, f64)>;

    fn structure(&self) -> Structure {
        Structure::default()
    }
    fn orbits(&self) -> Option<&OrbitMetadata> {
        None
    }
    /// Analytic fiber parametrization; `radius` truncates unbounded fibers.
    fn fiber(&self, _y: &[f64], _resolution: usize, _radius: Option<f64>) -> Result<FiberMeasure> {
        Err(Error::Unsupported(format!("{} has no fiber parametrization", self.id())))
    }
}

pub type SystemRef = Arc<dyn SemidirectSystem>;

/// Point (a, h) of G.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: Vec<f64>,
    pub h: Vec<f64>,
}

impl GroupElement {
    pub fn new(a: Vec<f64>, h: Vec<f64>) -> Self {
        GroupElement { a, h }
    }

    pub fn identity(sys: &dyn SemidirectSystem) -> Self {
        GroupElement { a: vec![0.0; sys.n()], h: sys.h_identity() }
    }

    pub fn translation(sys: &dyn SemidirectSystem, a: Vec<f64>) -> Self {
        GroupElement { a, h: sys.h_identity() }
    }

    pub fn dilation(sys: &dyn SemidirectSystem, h: Vec<f64>) -> Self {
        GroupElement { a: vec![0.0; sys.n()], h }
    }
}

/// JΦ(x), analytic when available, otherwise central differences with step 1e-6(1+‖x‖).
pub fn jphi(sys: &dyn SemidirectSystem, x: &[f64]) -> f64 {
    if let Some(j) = sys.jphi_analytic(x) {
        return j;
    }
    jphi_numeric(sys, x)
}

pub fn jphi_numeric(sys: &dyn SemidirectSystem, x: &[f64]) -> f64 {
    let (n, d) = (sys.n(), sys.d());
    let step = 1e-6 * (1.0 + norm(x));
    // rows of the n×d differential
    let mut jac = vec![0.0; n * d];
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for j in 0..d {
        xp[j] = x[j] + step;
        sys.phi(&xp, &mut fp);
        xp[j] = x[j] - step;
        sys.phi(&xp, &mut fm);
        xp[j] = x[j];
        for i in 0..n {
            jac[i * d + j] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    // det(J Jᵗ)
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            g[i * n + k] = (0..d).map(|j| jac[i * d + j] * jac[k * d + j]).sum();
        }
    }
    determinant(&mut g, n).max(0.0).sqrt()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `m`).
pub fn determinant(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i * n + c].abs().partial_cmp(&m[j * n + c].abs()).unwrap()).unwrap();
        if m[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                m.swap(p * n + k, c * n + k);
            }
            det = -det;
        }
        let piv = m[c * n + c];
        det *= piv;
        for r in (c + 1)..n {
            let f = m[r * n + c] / piv;
            for k in c..n {
                m[r * n + k] -= f * m[c * n + k];
            }
        }
    }
    det
}

/// Matrix of y ↦ h[y], column j = h[e_j], row-major n×n.
pub fn act_n_matrix(sys: &dyn SemidirectSystem, h: &[f64]) -> Vec<f64> {
    let n = sys.n();
    let mut m = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        sys.act_n(h, &e, &mut col);
        for i in 0..n {
            m[i * n + j] = col[i];
        }
    }
    m
}

pub fn h_inv(sys: &dyn SemidirectSystem, h: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; h.len()];
    sys.h_inverse(h, &mut out);
    out
}

pub fn h_mul(sys: &dyn SemidirectSystem, h1: &[f64], h2: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; h1.len()];
    sys.h_compose(h1, h2, &mut out);
    out
}

pub fn apply_n(sys: &dyn SemidirectSystem, h: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    sys.act_n(h, y, &mut out);
    out
}

pub fn apply_d(sys: &dyn SemidirectSystem, h: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    sys.act_d(h, x, &mut out);
    out
}

pub fn phi_of(sys: &dyn SemidirectSystem, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; sys.n()];
    sys.phi(x, &mut out);
    out
}

/// h†[a]: transpose of the matrix of y ↦ h⁻¹[y] applied to a.
pub fn contragredient(sys: &dyn SemidirectSystem, h: &[f64], a: &[f64]) -> Vec<f64> {
    let n = sys.n();
    let m = act_n_matrix(sys, &h_inv(sys, h));
    (0..n).map(|j| (0..n).map(|i| m[i * n + j] * a[i]).sum()).collect()
}

/// (a₁ + h₁†[a₂], h₁h₂)
pub fn compose(sys: &dyn SemidirectSystem, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    let ta = contragredient(sys, &g1.h, &g2.a);
    GroupElement {
        a: g1.a.iter().zip(&ta).map(|(x, y)| x + y).collect(),
        h: h_mul(sys, &g1.h, &g2.h),
    }
}

pub fn inverse(sys: &dyn SemidirectSystem, g: &GroupElement) -> GroupElement {
    let hi = h_inv(sys, &g.h);
    let a = contragredient(sys, &hi, &g.a).into_iter().map(|v| -v).collect();
    GroupElement { a, h: hi }
}

/// Density of dg = α(h)⁻¹ da dh against the chart's Lebesgue measure.
pub fn haar_weight(sys: &dyn SemidirectSystem, g: &GroupElement) -> f64 {
    sys.haar_density(&g.h) / sys.alpha(&g.h)
}

pub fn modular_g(sys: &dyn SemidirectSystem, g: &GroupElement) -> f64 {
    sys.delta_h(&g.h) / sys.alpha(&g.h)
}

/// Chart distance that wraps angle coordinates.
pub fn h_distance(sys: &dyn SemidirectSystem, h1: &[f64], h2: &[f64]) -> f64 {
    sys.chart()
        .iter()
        .zip(h1.iter().zip(h2))
        .map(|(ax, (a, b))| {
            let d = a - b;
            let d = if ax.kind == AxisKind::Angle { wrap_angle(d) } else { d };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Representative in (-π, π].
pub fn wrap_angle(d: f64) -> f64 {
    let r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

pub fn sample_h(sys: &dyn SemidirectSystem, rng: &mut impl Rng, spread: f64) -> Vec<f64> {
    sys.chart()
        .iter()
        .map(|ax| match ax.kind {
            AxisKind::Positive => rng.gen_range(-spread..spread).exp(),
            AxisKind::NonZero => {
                let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                s * rng.gen_range(-spread..spread).exp()
            }
            AxisKind::Line => rng.gen_range(-2.0 * spread..2.0 * spread),
            AxisKind::Angle => rng.gen_range(0.0..2.0 * PI),
        })
        .collect()
}

pub fn sample_x(sys: &dyn SemidirectSystem, rng: &mut impl Rng) -> Vec<f64> {
    let b = sys.sample_box();
    loop {
        let x: Vec<f64> = b.iter().map(|(lo, hi)| rng.gen_range(*lo..*hi)).collect();
        if sys.in_domain(&x) {
            return x;
        }
    }
}

pub fn sample_group(sys: &dyn SemidirectSystem, rng: &mut impl Rng) -> GroupElement {
    let a = (0..sys.n()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    GroupElement { a, h: sample_h(sys, rng, 1.5) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// relative tolerance for the sampled-bump β check
    pub monte_carlo: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-8, rel: 1e-8, monte_carlo: 1e-5 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub tag: String,
    pub description: String,
    pub samples: usize,
    /// residual at the worst sample
    pub max_residual: f64,
    /// abs + rel·scale at the worst sample
    pub threshold: f64,
    pub passed: bool,
    pub worst_sample: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub system: String,
    pub tolerance: Tolerance,
    pub sample_budget: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn check(&self, tag: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.tag == tag)
    }
}

struct Sample {
    residual: f64,
    scale: f64,
    point: Vec<f64>,
}

fn summarize(tag: &str, desc: &str, abs: f64, rel: f64, samples: Vec<Sample>) -> CheckResult {
    let mut worst: Option<(f64, &Sample)> = None;
    let mut passed = true;
    for s in &samples {
        let thr = abs + rel * s.scale;
        let ratio = if s.residual.is_nan() { f64::INFINITY } else { s.residual / thr };
        if ratio > 1.0 {
            passed = false;
        }
        if worst.is_none_or(|(r, _)| ratio > r) {
            worst = Some((ratio, s));
        }
    }
    let (ws, thr) = worst.map(|(_, s)| (s, abs + rel * s.scale)).map_or((None, abs), |(s, t)| (Some(s), t));
    CheckResult {
        tag: tag.to_string(),
        description: desc.to_string(),
        samples: samples.len(),
        max_residual: ws.map_or(0.0, |s| s.residual),
        threshold: thr,
        passed,
        worst_sample: ws.map_or(vec![], |s| s.point.clone()),
    }
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Checks every structural identity assumed of a system at random samples.
pub fn validate_system(sys: &dyn SemidirectSystem, sample_budget: usize) -> Result<ValidationReport> {
    validate_system_with(sys, sample_budget, Tolerance::default(), 7)
}

pub fn validate_system_with(sys: &dyn SemidirectSystem, sample_budget: usize, tol: Tolerance, seed: u64) -> Result<ValidationReport> {
    if sample_budget == 0 {
        return Err(Error::Parameter("sample_budget must be at least 1".into()));
    }
    let (n, d) = (sys.n(), sys.d());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // linearity of act_n
    type Lin = (Vec<f64>, Vec<f64>, Vec<f64>, f64);
    let lin: Vec<Lin> = (0..sample_budget)
        .map(|_| {
            let h = sample_h(sys, &mut rng, 1.5);
            let y1: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y2: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            (h, y1, y2, rng.gen_range(-2.0..2.0))
        })
        .collect();
    let s = lin
        .par_iter()
        .map(|(h, y1, y2, c)| {
            let sum: Vec<f64> = y1.iter().zip(y2).map(|(a, b)| a + c * b).collect();
            let l = apply_n(sys, h, &sum);
            let r1 = apply_n(sys, h, y1);
            let r2 = apply_n(sys, h, y2);
            let diff: Vec<f64> = (0..n).map(|i| l[i] - r1[i] - c * r2[i]).collect();
            let mut point = h.clone();
            point.extend(y1);
            Sample { residual: norm(&diff), scale: norm(&r1) + c.abs() * norm(&r2), point }
        })
        .collect();
    checks.push(summarize("LINEARITY", "h[y1 + c y2] - h[y1] - c h[y2]", tol.abs, tol.rel, s));

    // intertwining Φ(h.x) = h[Φ(x)]
    let pts: Vec<(Vec<f64>, Vec<f64>)> = (0..sample_budget).map(|_| (sample_h(sys, &mut rng, 1.5), sample_x(sys, &mut rng))).collect();
    let s = pts
        .par_iter()
        .map(|(h, x)| {
            let lhs = phi_of(sys, &apply_d(sys, h, x));
            let rhs = apply_n(sys, h, &phi_of(sys, x));
            let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            let mut point = h.clone();
            point.extend(x);
            Sample { residual: norm(&diff), scale: norm(&rhs), point }
        })
        .collect();
    checks.push(summarize("PHI", "Phi(h.x) - h[Phi(x)]", tol.abs, tol.rel, s));

    // α(h) = |det(y ↦ h⁻¹[y])|
    let hs: Vec<Vec<f64>> = (0..sample_budget).map(|_| sample_h(sys, &mut rng, 1.5)).collect();
    let s = hs
        .par_iter()
        .map(|h| {
            let mut m = act_n_matrix(sys, &h_inv(sys, h));
            let det = determinant(&mut m, n).abs();
            let a = sys.alpha(h);
            Sample { residual: (det - a).abs(), scale: a, point: h.clone() }
        })
        .collect();
    checks.push(summarize("ALPHA_DET", "alpha(h) - |det h^-1[.]|", tol.abs, tol.rel, s));

    // α is a character; Δ_G is multiplicative
    let pairs: Vec<(GroupElement, GroupElement)> = (0..sample_budget).map(|_| (sample_group(sys, &mut rng), sample_group(sys, &mut rng))).collect();
    let s = pairs
        .par_iter()
        .map(|(g1, g2)| {
            let a12 = sys.alpha(&h_mul(sys, &g1.h, &g2.h));
            let prod = sys.alpha(&g1.h) * sys.alpha(&g2.h);
            Sample { residual: (a12 - prod).abs(), scale: prod, point: [g1.h.clone(), g2.h.clone()].concat() }
        })
        .collect();
    checks.push(summarize("ALPHA_CHARACTER", "alpha(h1 h2) - alpha(h1) alpha(h2)", tol.abs, tol.rel, s));
    let s = pairs
        .par_iter()
        .map(|(g1, g2)| {
            let m12 = modular_g(sys, &compose(sys, g1, g2));
            let prod = modular_g(sys, g1) * modular_g(sys, g2);
            Sample { residual: (m12 - prod).abs(), scale: prod, point: [g1.h.clone(), g2.h.clone()].concat() }
        })
        .collect();
    checks.push(summarize("MODULAR_G", "Delta_G(g1 g2) - Delta_G(g1) Delta_G(g2)", tol.abs, tol.rel, s));

    // group axioms on H and on G
    let triples: Vec<[GroupElement; 3]> = (0..sample_budget)
        .map(|_| [sample_group(sys, &mut rng), sample_group(sys, &mut rng), sample_group(sys, &mut rng)])
        .collect();
    let e = sys.h_identity();
    let s = triples
        .par_iter()
        .map(|[g1, g2, g3]| {
            let l = h_mul(sys, &h_mul(sys, &g1.h, &g2.h), &g3.h);
            let r = h_mul(sys, &g1.h, &h_mul(sys, &g2.h, &g3.h));
            let gl = compose(sys, &compose(sys, g1, g2), g3);
            let gr = compose(sys, g1, &compose(sys, g2, g3));
            let da = norm(&gl.a.iter().zip(&gr.a).map(|(x, y)| x - y).collect::<Vec<_>>());
            Sample {
                residual: h_distance(sys, &l, &r).max(da),
                scale: norm(&l).max(norm(&gl.a)),
                point: [g1.h.clone(), g2.h.clone(), g3.h.clone()].concat(),
            }
        })
        .collect();
    checks.push(summarize("GROUP_ASSOC", "(h1 h2) h3 - h1 (h2 h3), also on G", tol.abs, tol.rel, s));
    let s = triples
        .par_iter()
        .map(|[g1, _, _]| {
            let l = h_mul(sys, &e, &g1.h);
            let r = h_mul(sys, &g1.h, &e);
            Sample { residual: h_distance(sys, &l, &g1.h).max(h_distance(sys, &r, &g1.h)), scale: norm(&g1.h), point: g1.h.clone() }
        })
        .collect();
    checks.push(summarize("GROUP_IDENTITY", "e h - h and h e - h", tol.abs, tol.rel, s));
    let s = triples
        .par_iter()
        .map(|[g1, _, _]| {
            let hi = h_inv(sys, &g1.h);
            let l = h_mul(sys, &g1.h, &hi);
            let r = h_mul(sys, &hi, &g1.h);
            let gi = compose(sys, g1, &inverse(sys, g1));
            let da = norm(&gi.a);
            Sample {
                residual: h_distance(sys, &l, &e).max(h_distance(sys, &r, &e)).max(da),
                scale: norm(&g1.h).max(norm(&g1.a)),
                point: g1.h.clone(),
            }
        })
        .collect();
    checks.push(summarize("GROUP_INVERSE", "h h^-1 - e, h^-1 h - e, g g^-1 - e", tol.abs, tol.rel, s));

    // β-constancy over randomly placed bumps
    let sbox = sys.sample_box();
    let bumps: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..sample_budget.min(64))
        .map(|_| {
            let h = sample_h(sys, &mut rng, 1.0);
            let c = loop {
                let c = sample_x(sys, &mut rng);
                // keep the bump inside X for the systems that remove a hyperplane
                let r: Vec<f64> = sbox.iter().map(|(lo, hi)| 0.1 * (hi - lo)).collect();
                let ok = (0..d).all(|i| {
                    let mut p = c.clone();
                    p[i] = c[i] + r[i];
                    let mut q = c.clone();
                    q[i] = c[i] - r[i];
                    sys.in_domain(&p) && sys.in_domain(&q)
                });
                if ok {
                    break c;
                }
            };
            let r: Vec<f64> = sbox.iter().map(|(lo, hi)| rng.gen_range(0.03..0.1) * (hi - lo)).collect();
            (h, c, r)
        })
        .collect();
    let s = bumps
        .par_iter()
        .map(|(h, c, r)| {
            let phi = |x: &[f64]| (0..d).map(|i| bump((x[i] - c[i]) / r[i])).product::<f64>();
            let base_box: Vec<(f64, f64)> = (0..d).map(|i| (c[i] - r[i], c[i] + r[i])).collect();
            let i0 = box_integral(&phi, &base_box);
            let hinv = h_inv(sys, h);
            let img = image_box(sys, h, &base_box);
            let moved = |x: &[f64]| phi(&apply_d(sys, &hinv, x));
            let i1 = box_integral(&moved, &img);
            let b = sys.beta(h);
            let mut point = h.clone();
            point.extend(c);
            Sample { residual: ((i1 - b * i0) / (b * i0)).abs(), scale: 0.0, point }
        })
        .collect();
    checks.push(summarize("BETA", "int phi(h^-1.x) dx / (beta(h) int phi) - 1 over sampled bumps", tol.monte_carlo, 0.0, s));

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { system: sys.id(), tolerance: tol, sample_budget, passed, checks })
}

fn box_integral(f: &dyn Fn(&[f64]) -> f64, b: &[(f64, f64)]) -> f64 {
    // composite Gauss-Legendre, 24 panels of 16 nodes per axis; sheared images need the panels
    let axes: Vec<Rule1d> = b
        .iter()
        .map(|(lo, hi)| {
            let h = (hi - lo) / 24.0;
            (0..24).map(|k| Rule1d::gauss(16, lo + k as f64 * h, lo + (k + 1) as f64 * h)).reduce(|a, b| a.concat(&b)).unwrap()
        })
        .collect();
    let t = TensorRule::new(axes);
    let mut x = vec![0.0; b.len()];
    let v: Vec<f64> = (0..t.len())
        .map(|i| {
            let w = t.point(i, &mut x);
            w * f(&x)
        })
        .collect();
    crate::quadrature::pairwise_sum(&v)
}

/// Bounding box of h.B from a 9-point-per-axis lattice (exact for affine actions), padded by 1%.
pub fn image_box(sys: &dyn SemidirectSystem, h: &[f64], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let d = b.len();
    let axes: Vec<Rule1d> = b.iter().map(|(lo, hi)| Rule1d::from_nodes((0..9).map(|k| lo + (hi - lo) * k as f64 / 8.0).collect(), vec![1.0; 9])).collect();
    let t = TensorRule::new(axes);
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let mut x = vec![0.0; d];
    for i in 0..t.len() {
        t.point(i, &mut x);
        let y = apply_d(sys, h, &x);
        for k in 0..d {
            lo[k] = lo[k].min(y[k]);
            hi[k] = hi[k].max(y[k]);
        }
    }
    (0..d)
        .map(|k| {
            let pad = 0.01 * (hi[k] - lo[k]) + 1e-12;
            (lo[k] - pad, hi[k] + pad)
        })
        .collect()
}
