//! One-dimensional rules, tensor products, pairwise sums and an adaptive
//! Gauss-Kronrod integrator for the closed-form checks.

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// interval the rule integrates over
    pub span: (f64, f64),
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Gauss-Legendre with `n` nodes on [a, b].
    pub fn gauss(n: usize, a: f64, b: f64) -> Self {
        let (x, w) = gauss_legendre(n);
        let c = 0.5 * (b - a);
        let m = 0.5 * (b + a);
        Rule1d {
            nodes: x.iter().map(|t| m + c * t).collect(),
            weights: w.iter().map(|v| v * c).collect(),
            span: (a, b),
        }
    }

    /// Composite midpoint rule, `n` equal cells on [a, b].
    pub fn midpoint(n: usize, a: f64, b: f64) -> Self {
        let h = (b - a) / n as f64;
        Rule1d {
            nodes: (0..n).map(|k| a + (k as f64 + 0.5) * h).collect(),
            weights: vec![h; n],
            span: (a, b),
        }
    }

    /// Trapezoid rule for a periodic integrand on [a, a + period).
    pub fn periodic(n: usize, a: f64, period: f64) -> Self {
        let h = period / n as f64;
        Rule1d {
            nodes: (0..n).map(|k| a + k as f64 * h).collect(),
            weights: vec![h; n],
            span: (a, a + period),
        }
    }

    /// Midpoint cells uniform in log t on [lo, hi]; weights integrate dt.
    pub fn log_midpoint(n: usize, lo: f64, hi: f64) -> Self {
        assert!(lo > 0.0 && hi > lo);
        let (u0, u1) = (lo.ln(), hi.ln());
        let du = (u1 - u0) / n as f64;
        let nodes: Vec<f64> = (0..n).map(|k| (u0 + (k as f64 + 0.5) * du).exp()).collect();
        let weights = nodes.iter().map(|t| t * du).collect();
        Rule1d { nodes, weights, span: (lo, hi) }
    }

    /// Gauss-Legendre in log t on [lo, hi]; weights integrate dt.
    pub fn log_gauss(n: usize, lo: f64, hi: f64) -> Self {
        assert!(lo > 0.0 && hi > lo);
        let r = Rule1d::gauss(n, lo.ln(), hi.ln());
        let nodes: Vec<f64> = r.nodes.iter().map(|u| u.exp()).collect();
        let weights = nodes.iter().zip(&r.weights).map(|(t, w)| t * w).collect();
        Rule1d { nodes, weights, span: (lo, hi) }
    }

    /// Same rule reflected to negative values (for the ℝ* charts).
    pub fn negated(&self) -> Self {
        Rule1d {
            nodes: self.nodes.iter().rev().map(|x| -x).collect(),
            weights: self.weights.iter().rev().copied().collect(),
            span: (-self.span.1, -self.span.0),
        }
    }

    pub fn concat(&self, other: &Rule1d) -> Self {
        let mut r = self.clone();
        r.nodes.extend_from_slice(&other.nodes);
        r.weights.extend_from_slice(&other.weights);
        r.span = (self.span.0.min(other.span.0), self.span.1.max(other.span.1));
        r
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let v: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).collect();
        pairwise_sum(&v)
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.span
    }

    /// Rule from explicit nodes and weights; the span is the node range.
    pub fn from_nodes(nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Rule1d { nodes, weights, span: (lo, hi) }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Tensor product of 1D rules; points are stored row-major, last axis fastest.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub axes: Vec<Rule1d>,
}

impl TensorRule {
    pub fn new(axes: Vec<Rule1d>) -> Self {
        TensorRule { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point and weight for a flat index.
    pub fn point(&self, mut idx: usize, out: &mut [f64]) -> f64 {
        let mut w = 1.0;
        for k in (0..self.axes.len()).rev() {
            let ax = &self.axes[k];
            let i = idx % ax.len();
            idx /= ax.len();
            out[k] = ax.nodes[i];
            w *= ax.weights[i];
        }
        w
    }

    pub fn points(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let n = self.len();
        let mut pts = vec![0.0; n * d];
        let mut ws = vec![0.0; n];
        for i in 0..n {
            ws[i] = self.point(i, &mut pts[i * d..(i + 1) * d]);
        }
        (pts, ws)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(|a| a.bounds()).collect()
    }
}

/// Pairwise (cascade) summation; the result does not depend on thread count.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_c(v: &[Complex64]) -> Complex64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_c(&v[..mid]) + pairwise_sum_c(&v[mid..])
}

/// Integration domain for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain1d {
    Interval(f64, f64),
    /// [a, ∞)
    Above(f64),
    /// (-∞, b]
    Below(f64),
    Line,
}

// Gauss-Kronrod 7-15 abscissae and weights, as tabulated
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) with global bisection of the worst interval.
/// Infinite ranges are mapped to (0, 1) or (-1, 1).
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, dom: Domain1d, abs_tol: f64, rel_tol: f64) -> f64 {
    match dom {
        Domain1d::Interval(a, b) => adapt(f, a, b, abs_tol, rel_tol),
        Domain1d::Above(a) => {
            let g = |s: f64| {
                let x = a + s / (1.0 - s);
                let j = 1.0 / ((1.0 - s) * (1.0 - s));
                let v = f(x) * j;
                if v.is_finite() { v } else { 0.0 }
            };
            adapt(&g, 0.0, 1.0, abs_tol, rel_tol)
        }
        Domain1d::Below(b) => {
            let g = |s: f64| {
                let x = b - s / (1.0 - s);
                let j = 1.0 / ((1.0 - s) * (1.0 - s));
                let v = f(x) * j;
                if v.is_finite() { v } else { 0.0 }
            };
            adapt(&g, 0.0, 1.0, abs_tol, rel_tol)
        }
        Domain1d::Line => {
            let g = |s: f64| {
                let x = s / (1.0 - s * s);
                let j = (1.0 + s * s) / ((1.0 - s * s) * (1.0 - s * s));
                let v = f(x) * j;
                if v.is_finite() { v } else { 0.0 }
            };
            adapt(&g, -1.0, 1.0, abs_tol, rel_tol)
        }
    }
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let mut parts: Vec<(f64, f64, f64, f64)> = Vec::new();
    // seed with a few panels so narrow features are not missed
    let seeds = 8;
    let h = (b - a) / seeds as f64;
    for k in 0..seeds {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == seeds { b } else { lo + h };
        let (v, e) = gk15(f, lo, hi);
        parts.push((lo, hi, v, e));
    }
    for _ in 0..4000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let v: Vec<f64> = parts.iter().map(|p| p.2).collect();
    pairwise_sum(&v)
}

/// Iterated adaptive integration over a product of 1D domains.
pub fn integrate_nested(f: &dyn Fn(&[f64]) -> f64, doms: &[Domain1d], abs_tol: f64, rel_tol: f64) -> f64 {
    nested(f, doms, &[], abs_tol, rel_tol)
}

fn nested(f: &dyn Fn(&[f64]) -> f64, doms: &[Domain1d], prefix: &[f64], abs_tol: f64, rel_tol: f64) -> f64 {
    let k = prefix.len();
    if k == doms.len() {
        return f(prefix);
    }
    let g = |x: f64| {
        let mut p = prefix.to_vec();
        p.push(x);
        nested(f, doms, &p, abs_tol * 1e-2, rel_tol * 1e-1)
    };
    integrate_adaptive(&g, doms[k], abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let r = Rule1d::gauss(n, -1.0, 2.0);
            for p in 0..(2 * n) {
                let exact = (2f64.powi(p as i32 + 1) - (-1f64).powi(p as i32 + 1)) / (p as f64 + 1.0);
                let got = r.integrate(|x| x.powi(p as i32));
                assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn large_gauss_rule_weights_sum() {
        let (x, w) = gauss_legendre(512);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        let r = Rule1d::periodic(32, 0.0, 2.0 * PI);
        let got = r.integrate(|x| (x.cos()).exp());
        // 2π I0(1)
        assert!((got - 2.0 * PI * 1.2660658777520082).abs() < 1e-13);
    }

    #[test]
    fn log_rules_integrate_dt() {
        let r = Rule1d::log_gauss(80, 1e-3, 1e3);
        let got = r.integrate(|t| t * (-t * t).exp());
        assert!((got - 0.5).abs() < 1e-6);
        let m = Rule1d::log_midpoint(400, 1e-4, 1e2);
        assert!((m.integrate(|t| t * (-t * t).exp()) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn adaptive_handles_infinite_ranges() {
        let g = |x: f64| (-x * x).exp();
        let v = integrate_adaptive(&g, Domain1d::Line, 1e-14, 1e-12);
        assert!((v - PI.sqrt()).abs() < 1e-11);
        let v = integrate_adaptive(&|x: f64| (-x).exp(), Domain1d::Above(0.0), 1e-14, 1e-12);
        assert!((v - 1.0).abs() < 1e-11);
        let v = integrate_adaptive(&|x: f64| x.exp(), Domain1d::Below(0.0), 1e-14, 1e-12);
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn nested_gaussian_plane() {
        let v = integrate_nested(&|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &[Domain1d::Line, Domain1d::Line], 1e-12, 1e-11);
        assert!((v - PI).abs() < 1e-9);
    }

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-12);
    }
}
