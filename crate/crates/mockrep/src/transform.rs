//! Voice transform on truncated group grids, its energy by two routes and
//! the weak reconstruction.
//!
//! For a fixed h the coefficient a ↦ ⟨f, U_{(a,h)}η⟩ is a Fourier sum over the
//! values of Φ. When the inner rule is organised in level sets of Φ lying on a
//! tensor grid in Y, that sum factorises into one small matrix product per
//! coordinate of ℝⁿ.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::quadrature::{pairwise_sum, pairwise_sum_c, Rule1d, TensorRule};
use crate::coarea::fiber_quadrature_with;
use crate::system::{apply_d, h_inv, h_mul, phi_of, AxisKind, GroupElement, SemidirectSystem};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Level structure: Φ(x_k) = (axes[0][i_0], …, axes[n-1][i_{n-1}]) with flat index `index[k]`.
#[derive(Debug, Clone)]
pub struct Levels {
    pub axes: Vec<Vec<f64>>,
    pub index: Vec<usize>,
}

impl Levels {
    pub fn count(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }
}

/// Quadrature on ℝᵈ used for inner products ⟨f, U_g η⟩.
#[derive(Debug, Clone)]
pub struct InnerRule {
    pub d: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub levels: Option<Levels>,
    pub bounds: Vec<(f64, f64)>,
    pub desc: String,
}

impl InnerRule {
    /// Builds a rule from raw points, dropping points outside X, and detects level sets of Φ.
    pub fn from_points(sys: &dyn SemidirectSystem, points: Vec<f64>, weights: Vec<f64>, desc: impl Into<String>) -> Self {
        let d = sys.d();
        let mut p = Vec::with_capacity(points.len());
        let mut w = Vec::with_capacity(weights.len());
        for (k, wk) in weights.iter().enumerate() {
            let x = &points[k * d..(k + 1) * d];
            if sys.in_domain(x) {
                p.extend_from_slice(x);
                w.push(*wk);
            }
        }
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
        for k in 0..w.len() {
            for j in 0..d {
                bounds[j].0 = bounds[j].0.min(p[k * d + j]);
                bounds[j].1 = bounds[j].1.max(p[k * d + j]);
            }
        }
        let levels = detect_levels(sys, &p, w.len());
        InnerRule { d, points: p, weights: w, levels, bounds, desc: desc.into() }
    }

    pub fn tensor(sys: &dyn SemidirectSystem, rule: &TensorRule, desc: impl Into<String>) -> Self {
        let (p, w) = rule.points();
        let mut r = InnerRule::from_points(sys, p, w, desc);
        r.bounds = rule.bounds();
        r
    }

    /// Overrides the declared region covered by the rule.
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = bounds;
        self
    }

    /// Tensor Gauss-Legendre, 256 points per axis on [-8, 8]ᵈ.
    pub fn default_for(sys: &dyn SemidirectSystem) -> Self {
        let axes = vec![Rule1d::gauss(256, -8.0, 8.0); sys.d()];
        InnerRule::tensor(sys, &TensorRule::new(axes), "tensor Gauss-Legendre 256/axis on [-8,8]^d")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.d..(k + 1) * self.d]
    }

    pub fn covers(&self, support: &[(f64, f64)]) -> bool {
        support.iter().zip(&self.bounds).all(|((lo, hi), (blo, bhi))| {
            let pad = 1e-9 * (1.0 + blo.abs().max(bhi.abs()));
            *lo >= blo - pad && *hi <= bhi + pad
        })
    }

    pub fn check_coverage(&self, f: &Field) -> Result<()> {
        if let Some(s) = &f.support_hint {
            if !self.covers(s) {
                return Err(Error::Coverage(format!("support {:?} of {} escapes rule bounds {:?}", s, f.label, self.bounds)));
            }
        }
        Ok(())
    }

    pub fn norm_sq(&self, f: &Field) -> f64 {
        let v: Vec<f64> = (0..self.len()).map(|k| self.weights[k] * f.eval(self.point(k)).norm_sqr()).collect();
        pairwise_sum(&v)
    }
}

fn detect_levels(sys: &dyn SemidirectSystem, points: &[f64], count: usize) -> Option<Levels> {
    let (n, d) = (sys.n(), sys.d());
    if count == 0 {
        return None;
    }
    let ys: Vec<Vec<f64>> = (0..count).map(|k| phi_of(sys, &points[k * d..(k + 1) * d])).collect();
    let mut axes = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<f64> = ys.iter().map(|y| y[j]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut uniq: Vec<f64> = Vec::new();
        for x in v {
            match uniq.last() {
                Some(&u) if (x - u).abs() <= 1e-11 * (1.0 + u.abs()) => {}
                _ => uniq.push(x),
            }
        }
        axes.push(uniq);
    }
    let total: usize = axes.iter().map(|a| a.len()).product();
    if total > 8 * count + 64 {
        return None;
    }
    let mut index = Vec::with_capacity(count);
    for y in &ys {
        let mut flat = 0;
        for j in 0..n {
            let a = &axes[j];
            let pos = a.partition_point(|u| *u < y[j] - 1e-11 * (1.0 + y[j].abs()));
            let pos = pos.min(a.len() - 1);
            flat = flat * a.len() + pos;
        }
        index.push(flat);
    }
    Some(Levels { axes, index })
}

/// Uniform midpoint grid on the normal factor ℝⁿ.
#[derive(Debug, Clone, Serialize)]
pub struct AGrid {
    #[serde(skip)]
    pub axes: Vec<Rule1d>,
    pub desc: String,
}

impl AGrid {
    /// [-extent, extent]ⁿ with spacing `step`.
    pub fn symmetric(n: usize, extent: f64, step: f64) -> Self {
        let m = (2.0 * extent / step).round() as usize;
        AGrid { axes: vec![Rule1d::midpoint(m, -extent, extent); n], desc: format!("[-{extent},{extent}]^{n}, step {step}") }
    }

    pub fn from_axes(axes: Vec<Rule1d>, desc: impl Into<String>) -> Self {
        AGrid { axes, desc: desc.into() }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> f64 {
        self.axes.iter().map(|a| a.weights.iter().sum::<f64>()).product()
    }

    pub fn point(&self, mut i: usize, out: &mut [f64]) -> f64 {
        let mut w = 1.0;
        for k in (0..self.axes.len()).rev() {
            let ax = &self.axes[k];
            let j = i % ax.len();
            i /= ax.len();
            out[k] = ax.nodes[j];
            w *= ax.weights[j];
        }
        w
    }

    fn tensor(&self) -> TensorRule {
        TensorRule::new(self.axes.clone())
    }
}

/// Nodes on the H chart with weights (chart weight × Haar density).
#[derive(Debug, Clone, Serialize)]
pub struct HGrid {
    pub dim: usize,
    #[serde(skip)]
    pub nodes: Vec<f64>,
    #[serde(skip)]
    pub weights: Vec<f64>,
    pub desc: String,
}

/// One axis of a tensor H grid.
#[derive(Debug, Clone)]
pub enum HAxis {
    /// log-uniform midpoint cells on [lo, hi] (both signs for ℝ*)
    Log { lo: f64, hi: f64, count: usize },
    /// Gauss-Legendre in log coordinates on [lo, hi] (both signs for ℝ*)
    LogGauss { lo: f64, hi: f64, count: usize },
    /// midpoint cells on [lo, hi]
    Uniform { lo: f64, hi: f64, count: usize },
    /// Gauss-Legendre on [lo, hi]
    Gauss { lo: f64, hi: f64, count: usize },
    /// periodic trapezoid on [0, 2π)
    Periodic { count: usize },
    /// explicit rule
    Rule(Rule1d),
}

impl HAxis {
    fn rule(&self, kind: AxisKind) -> Rule1d {
        let r = match self {
            HAxis::Log { lo, hi, count } => Rule1d::log_midpoint(*count, *lo, *hi),
            HAxis::LogGauss { lo, hi, count } => Rule1d::log_gauss(*count, *lo, *hi),
            HAxis::Uniform { lo, hi, count } => Rule1d::midpoint(*count, *lo, *hi),
            HAxis::Gauss { lo, hi, count } => Rule1d::gauss(*count, *lo, *hi),
            HAxis::Periodic { count } => Rule1d::periodic(*count, 0.0, 2.0 * PI),
            HAxis::Rule(r) => r.clone(),
        };
        if kind == AxisKind::NonZero && matches!(self, HAxis::Log { .. } | HAxis::LogGauss { .. }) {
            r.negated().concat(&r)
        } else {
            r
        }
    }

    fn describe(&self) -> String {
        match self {
            HAxis::Log { lo, hi, count } => format!("log-uniform {count} on [{lo},{hi}]"),
            HAxis::LogGauss { lo, hi, count } => format!("log-Gauss {count} on [{lo},{hi}]"),
            HAxis::Uniform { lo, hi, count } => format!("uniform {count} on [{lo},{hi}]"),
            HAxis::Gauss { lo, hi, count } => format!("Gauss {count} on [{lo},{hi}]"),
            HAxis::Periodic { count } => format!("periodic {count} on [0,2pi)"),
            HAxis::Rule(r) => format!("explicit {} nodes", r.len()),
        }
    }
}

impl HGrid {
    pub fn tensor(sys: &dyn SemidirectSystem, axes: &[HAxis]) -> Result<Self> {
        let chart = sys.chart();
        if axes.len() != chart.len() {
            return Err(Error::Config(format!("H grid has {} axes, chart has {}", axes.len(), chart.len())));
        }
        for ax in axes {
            let c = match ax {
                HAxis::Log { count, .. } | HAxis::LogGauss { count, .. } | HAxis::Uniform { count, .. } | HAxis::Gauss { count, .. } | HAxis::Periodic { count } => *count,
                HAxis::Rule(r) => r.len(),
            };
            if c == 0 {
                return Err(Error::Config("empty H axis".into()));
            }
            if let HAxis::Log { lo, hi, .. } | HAxis::LogGauss { lo, hi, .. } = ax {
                if !(*lo > 0.0 && hi > lo) {
                    return Err(Error::Config(format!("log axis needs 0 < lo < hi, got [{lo},{hi}]")));
                }
            }
            if let HAxis::Uniform { lo, hi, .. } | HAxis::Gauss { lo, hi, .. } = ax {
                if !(hi > lo) {
                    return Err(Error::Config(format!("axis bounds out of order: [{lo},{hi}]")));
                }
            }
        }
        let rules: Vec<Rule1d> = axes.iter().zip(&chart).map(|(a, c)| a.rule(c.kind)).collect();
        let t = TensorRule::new(rules);
        let (nodes, cw) = t.points();
        let k = chart.len();
        let weights = (0..cw.len()).map(|i| cw[i] * sys.haar_density(&nodes[i * k..(i + 1) * k])).collect();
        let desc = axes.iter().zip(&chart).map(|(a, c)| format!("{}: {}", c.name, a.describe())).collect::<Vec<_>>().join("; ");
        Ok(HGrid { dim: k, nodes, weights, desc })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    /// Left translate h ↦ h₀h. Haar weights are unchanged by left invariance.
    pub fn transported(&self, sys: &dyn SemidirectSystem, h0: &[f64]) -> HGrid {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for i in 0..self.len() {
            nodes.extend(h_mul(sys, h0, self.node(i)));
        }
        HGrid { dim: self.dim, nodes, weights: self.weights.clone(), desc: format!("{} translated by {:?}", self.desc, h0) }
    }
}

/// Truncated region of G with weights da dh / α(h); nodes are h-major.
#[derive(Debug, Clone, Serialize)]
pub struct GroupGrid {
    pub a: AGrid,
    pub h: HGrid,
}

impl GroupGrid {
    pub fn new(a: AGrid, h: HGrid) -> Self {
        GroupGrid { a, h }
    }

    pub fn len(&self) -> usize {
        self.a.len() * self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, sys: &dyn SemidirectSystem, i: usize) -> (GroupElement, f64) {
        let na = self.a.len();
        let (ih, ia) = (i / na, i % na);
        let mut a = vec![0.0; self.a.axes.len()];
        let wa = self.a.point(ia, &mut a);
        let h = self.h.node(ih).to_vec();
        let w = wa * self.h.weights[ih] / sys.alpha(&h);
        (GroupElement { a, h }, w)
    }
}

#[derive(Debug, Clone)]
pub struct Coefficients {
    pub grid: GroupGrid,
    /// h-major, same order as `GroupGrid::node`
    pub values: Vec<Complex64>,
}

impl Coefficients {
    /// CSV with header a_1..a_n,h_1..h_m,re,im,weight
    pub fn write_csv<W: Write>(&self, sys: &dyn SemidirectSystem, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=sys.n()).map(|i| format!("a_{i}")).collect();
        header.extend((1..=sys.h_dim()).map(|i| format!("h_{i}")));
        header.extend(["re", "im", "weight"].iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for i in 0..self.values.len() {
            let (g, wt) = self.grid.node(sys, i);
            let mut rec: Vec<String> = g.a.iter().chain(&g.h).map(|v| format!("{v:.17e}")).collect();
            rec.push(format!("{:.17e}", self.values[i].re));
            rec.push(format!("{:.17e}", self.values[i].im));
            rec.push(format!("{wt:.17e}"));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn energy(&self, sys: &dyn SemidirectSystem) -> f64 {
        let v: Vec<f64> = (0..self.values.len()).map(|i| self.grid.node(sys, i).1 * self.values[i].norm_sqr()).collect();
        pairwise_sum(&v)
    }
}

/// Precomputed per-rule data for the h-sweep.
struct Engine<'a> {
    sys: &'a dyn SemidirectSystem,
    rule: &'a InnerRule,
    eta: &'a Field,
    /// w_k f(x_k)
    wf: Vec<Complex64>,
    levels: Option<&'a Levels>,
    /// per coordinate j: e^{2πi y_l a} laid out [l][a]
    fwd: Vec<Vec<Complex64>>,
    /// per coordinate j: e^{-2πi y_l a} laid out [a][l]
    adj: Vec<Vec<Complex64>>,
    a_axes: Vec<Rule1d>,
    /// y-values of the nodes when the rule has no level structure
    ys: Vec<Vec<f64>>,
    a_points: Vec<Vec<f64>>,
    a_weights: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(sys: &'a dyn SemidirectSystem, f: &Field, eta: &'a Field, agrid: &AGrid, rule: &'a InnerRule) -> Self {
        let wf: Vec<Complex64> = (0..rule.len()).map(|k| f.eval(rule.point(k)) * rule.weights[k]).collect();
        let levels = rule.levels.as_ref();
        let mut fwd = Vec::new();
        let mut adj = Vec::new();
        let mut ys = Vec::new();
        if let Some(lv) = levels {
            for (j, ax) in agrid.axes.iter().enumerate() {
                let yl = &lv.axes[j];
                let mut m = Vec::with_capacity(yl.len() * ax.len());
                for y in yl {
                    for a in &ax.nodes {
                        m.push(Complex64::from_polar(1.0, 2.0 * PI * y * a));
                    }
                }
                let mut t = Vec::with_capacity(yl.len() * ax.len());
                for a in &ax.nodes {
                    for y in yl {
                        t.push(Complex64::from_polar(1.0, -2.0 * PI * y * a));
                    }
                }
                fwd.push(m);
                adj.push(t);
            }
        } else {
            ys = (0..rule.len()).map(|k| phi_of(sys, rule.point(k))).collect();
        }
        let at = agrid.tensor();
        let (ap, aw) = at.points();
        let n = agrid.axes.len();
        let a_points = (0..aw.len()).map(|i| ap[i * n..(i + 1) * n].to_vec()).collect();
        Engine { sys, rule, eta, wf, levels, fwd, adj, a_axes: agrid.axes.clone(), ys, a_points, a_weights: aw }
    }

    /// η(h⁻¹.x_k) for all nodes
    fn eta_values(&self, h: &[f64]) -> Vec<Complex64> {
        let hi = h_inv(self.sys, h);
        let d = self.rule.d;
        let mut buf = vec![0.0; d];
        (0..self.rule.len())
            .map(|k| {
                self.sys.act_d(&hi, self.rule.point(k), &mut buf);
                self.eta.eval(&buf)
            })
            .collect()
    }

    /// coefficients over the a-grid (without β^{-1/2}), plus Σ|W| for the skip bound
    fn forward(&self, etas: &[Complex64]) -> (Vec<Complex64>, f64) {
        match self.levels {
            Some(lv) => {
                let mut w = vec![Complex64::new(0.0, 0.0); lv.count()];
                for (k, e) in etas.iter().enumerate() {
                    w[lv.index[k]] += self.wf[k] * e.conj();
                }
                let s: f64 = w.iter().map(|c| c.norm()).sum();
                if s == 0.0 {
                    return (vec![], 0.0);
                }
                let mut shape: Vec<usize> = lv.axes.iter().map(|a| a.len()).collect();
                let mut t = w;
                for j in (0..shape.len()).rev() {
                    let na = self.a_axes[j].len();
                    t = contract(&t, &shape, j, &self.fwd[j], na);
                    shape[j] = na;
                }
                (t, s)
            }
            None => {
                let terms: Vec<Complex64> = etas.iter().enumerate().map(|(k, e)| self.wf[k] * e.conj()).collect();
                let s: f64 = terms.iter().map(|c| c.norm()).sum();
                if s == 0.0 {
                    return (vec![], 0.0);
                }
                let c = self
                    .a_points
                    .iter()
                    .map(|a| {
                        let v: Vec<Complex64> = terms
                            .iter()
                            .zip(&self.ys)
                            .map(|(t, y)| t * Complex64::from_polar(1.0, 2.0 * PI * dot(y, a)))
                            .collect();
                        pairwise_sum_c(&v)
                    })
                    .collect();
                (c, s)
            }
        }
    }

    /// D(y_l) = Σ_a w_a c(a) e^{-2πi⟨y_l, a⟩}, on levels (or on nodes without levels)
    fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        let wc: Vec<Complex64> = c.iter().zip(&self.a_weights).map(|(v, w)| v * *w).collect();
        match self.levels {
            Some(lv) => {
                let mut shape: Vec<usize> = self.a_axes.iter().map(|a| a.len()).collect();
                let mut t = wc;
                for j in (0..shape.len()).rev() {
                    let nl = lv.axes[j].len();
                    t = contract(&t, &shape, j, &self.adj[j], nl);
                    shape[j] = nl;
                }
                t
            }
            None => self
                .ys
                .iter()
                .map(|y| {
                    let v: Vec<Complex64> = wc.iter().zip(&self.a_points).map(|(c, a)| c * Complex64::from_polar(1.0, -2.0 * PI * dot(y, a))).collect();
                    pairwise_sum_c(&v)
                })
                .collect(),
        }
    }

    fn level_of(&self, k: usize) -> usize {
        match self.levels {
            Some(lv) => lv.index[k],
            None => k,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// out[o, b, i] = Σ_l t[o, l, i] m[l, b] where `shape[axis]` = L and m is L × nb row-major.
fn contract(t: &[Complex64], shape: &[usize], axis: usize, m: &[Complex64], nb: usize) -> Vec<Complex64> {
    let l = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * nb * inner];
    for o in 0..outer {
        for li in 0..l {
            let src = &t[(o * l + li) * inner..(o * l + li + 1) * inner];
            if inner == 1 {
                let v = src[0];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let row = &m[li * nb..(li + 1) * nb];
                let dst = &mut out[o * nb..(o + 1) * nb];
                for (d, e) in dst.iter_mut().zip(row) {
                    *d += v * e;
                }
            } else {
                for b in 0..nb {
                    let e = m[li * nb + b];
                    let dst = &mut out[(o * nb + b) * inner..(o * nb + b + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s * e;
                    }
                }
            }
        }
    }
    out
}

const BLOCK: usize = 16;

struct Sweep {
    energy_terms: Vec<f64>,
    recon: Option<Vec<Complex64>>,
    skipped: usize,
}

/// Single pass over H: energy per h and optionally the reconstruction at the rule's nodes.
#[allow(clippy::too_many_arguments)]
fn sweep(sys: &dyn SemidirectSystem, f: &Field, eta: &Field, grid: &GroupGrid, rule: &InnerRule, with_recon: bool, norm_sq: f64, fmax: f64) -> Sweep {
    let eng = Engine::new(sys, f, eta, &grid.a, rule);
    let nh = grid.h.len();
    let wa_total = grid.a.total_weight();
    let blocks: Vec<(Vec<f64>, Option<Vec<Complex64>>, usize)> = (0..nh.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut terms = Vec::with_capacity(BLOCK);
            let mut recon = if with_recon { Some(vec![Complex64::new(0.0, 0.0); rule.len()]) } else { None };
            let mut skipped = 0;
            for ih in b * BLOCK..((b + 1) * BLOCK).min(nh) {
                let h = grid.h.node(ih);
                let wh = grid.h.weights[ih] / sys.alpha(h);
                let beta = sys.beta(h);
                let etas = eng.eta_values(h);
                let (c, s) = eng.forward(&etas);
                if c.is_empty() {
                    terms.push(0.0);
                    continue;
                }
                // |c(a)| ≤ β^{-1/2} s: skip h when its total contribution is provably negligible
                let emax = etas.iter().map(|e| e.norm()).fold(0.0, f64::max);
                let e_bound = wh * s * s / beta * wa_total;
                let r_bound = wh * emax * s / beta * wa_total;
                if e_bound <= 1e-16 * norm_sq / nh as f64 && r_bound <= 1e-10 * fmax / nh as f64 {
                    terms.push(0.0);
                    skipped += 1;
                    continue;
                }
                let inv_beta = 1.0 / beta;
                let e: f64 = c.iter().zip(&eng.a_weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>() * inv_beta;
                terms.push(wh * e);
                if let Some(r) = recon.as_mut() {
                    let dl = eng.adjoint(&c);
                    let coef = wh * inv_beta;
                    for k in 0..rule.len() {
                        let e = etas[k];
                        if e.re != 0.0 || e.im != 0.0 {
                            r[k] += e * dl[eng.level_of(k)] * coef;
                        }
                    }
                }
            }
            (terms, recon, skipped)
        })
        .collect();
    let mut energy_terms = Vec::with_capacity(nh);
    let mut recon = if with_recon { Some(vec![Complex64::new(0.0, 0.0); rule.len()]) } else { None };
    let mut skipped = 0;
    for (t, r, s) in blocks {
        energy_terms.extend(t);
        skipped += s;
        if let (Some(acc), Some(r)) = (recon.as_mut(), r) {
            for (a, v) in acc.iter_mut().zip(r) {
                *a += v;
            }
        }
    }
    Sweep { energy_terms, recon, skipped }
}

/// values[i] = ⟨f, U_{g_i} η⟩ on the whole grid (materialised; use for small grids).
pub fn analyze(sys: &dyn SemidirectSystem, f: &Field, eta: &Field, grid: &GroupGrid, quad: &InnerRule) -> Result<Coefficients> {
    quad.check_coverage(f)?;
    let eng = Engine::new(sys, f, eta, &grid.a, quad);
    let na = grid.a.len();
    let per_h: Vec<Vec<Complex64>> = (0..grid.h.len())
        .into_par_iter()
        .map(|ih| {
            let h = grid.h.node(ih);
            let (c, _) = eng.forward(&eng.eta_values(h));
            if c.is_empty() {
                return vec![Complex64::new(0.0, 0.0); na];
            }
            let s = 1.0 / sys.beta(h).sqrt();
            c.into_iter().map(|v| v * s).collect()
        })
        .collect();
    Ok(Coefficients { grid: grid.clone(), values: per_h.concat() })
}

/// Σ_i weight_i |⟨f, U_{g_i}η⟩|²
pub fn energy_direct(sys: &dyn SemidirectSystem, f: &Field, eta: &Field, grid: &GroupGrid, quad: &InnerRule) -> Result<f64> {
    quad.check_coverage(f)?;
    let norm_sq = quad.norm_sq(f);
    let s = sweep(sys, f, eta, grid, quad, false, norm_sq, 0.0);
    Ok(pairwise_sum(&s.energy_terms))
}

/// Points of Y with weights, and the fiber resolution used for ω_h(y).
#[derive(Debug, Clone, Serialize)]
pub struct YGrid {
    pub n: usize,
    #[serde(skip)]
    pub points: Vec<f64>,
    #[serde(skip)]
    pub weights: Vec<f64>,
    pub fiber_resolution: usize,
    pub fiber_radius: Option<f64>,
    pub desc: String,
}

impl YGrid {
    pub fn tensor(rule: &TensorRule, fiber_resolution: usize, fiber_radius: Option<f64>, desc: impl Into<String>) -> Self {
        let (points, weights) = rule.points();
        YGrid { n: rule.dim(), points, weights, fiber_resolution, fiber_radius, desc: desc.into() }
    }

    pub fn from_points(n: usize, points: Vec<f64>, weights: Vec<f64>, fiber_resolution: usize, fiber_radius: Option<f64>, desc: impl Into<String>) -> Self {
        assert_eq!(points.len(), n * weights.len());
        YGrid { n, points, weights, fiber_resolution, fiber_radius, desc: desc.into() }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// ∫_H ∫_Y |ω_h(y)|² dy dh/(α(h)β(h))
pub fn energy_via_density(sys: &dyn SemidirectSystem, f: &Field, eta: &Field, hgrid: &HGrid, ygrid: &YGrid) -> Result<f64> {
    let n = ygrid.n;
    // flatten all fibers into one rule with y-weights folded in
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    let mut owner = Vec::new();
    for i in 0..ygrid.len() {
        let y = &ygrid.points[i * n..(i + 1) * n];
        if !sys.in_y(y) {
            continue;
        }
        let fib = fiber_quadrature_with(sys, y, ygrid.fiber_resolution, ygrid.fiber_radius)?;
        for k in 0..fib.len() {
            pts.extend_from_slice(fib.node(k));
            wts.push(fib.weights[k]);
            owner.push(i);
        }
    }
    let d = sys.d();
    let fw: Vec<Complex64> = (0..wts.len()).map(|k| f.eval(&pts[k * d..(k + 1) * d]) * wts[k]).collect();
    let ny = ygrid.len();
    let terms: Vec<f64> = (0..hgrid.len())
        .into_par_iter()
        .map(|ih| {
            let h = hgrid.node(ih);
            let hi = h_inv(sys, h);
            let mut buf = vec![0.0; d];
            let mut omega = vec![Complex64::new(0.0, 0.0); ny];
            for k in 0..wts.len() {
                if fw[k].re == 0.0 && fw[k].im == 0.0 {
                    continue;
                }
                sys.act_d(&hi, &pts[k * d..(k + 1) * d], &mut buf);
                omega[owner[k]] += fw[k] * eta.eval(&buf).conj();
            }
            let s: f64 = omega.iter().zip(&ygrid.weights).map(|(o, w)| o.norm_sqr() * w).sum();
            s * hgrid.weights[ih] / (sys.alpha(h) * sys.beta(h))
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// f̃(x) = Σ_i weight_i values_i (U_{g_i}η)(x), evaluated directly at each point.
pub fn synthesize(sys: &dyn SemidirectSystem, coeffs: &Coefficients, eta: &Field, eval_points: &[f64]) -> Vec<Complex64> {
    let d = sys.d();
    let np = eval_points.len() / d;
    let nodes: Vec<(GroupElement, f64)> = (0..coeffs.values.len()).map(|i| coeffs.grid.node(sys, i)).collect();
    (0..np)
        .into_par_iter()
        .map(|p| {
            let x = &eval_points[p * d..(p + 1) * d];
            let y = phi_of(sys, x);
            let v: Vec<Complex64> = nodes
                .iter()
                .zip(&coeffs.values)
                .map(|((g, w), c)| {
                    if c.re == 0.0 && c.im == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let hx = apply_d(sys, &h_inv(sys, &g.h), x);
                    let u = eta.eval(&hx) * Complex64::from_polar(sys.beta(&g.h).powf(-0.5), -2.0 * PI * dot(&y, &g.a));
                    c * u * *w
                })
                .collect();
            pairwise_sum_c(&v)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub energy_direct: f64,
    pub energy_density: Option<f64>,
    pub norm_f: f64,
    pub energy_ratio: f64,
    pub l2_error: f64,
    pub grid: GridSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub a: String,
    pub h: String,
    pub inner_rule: String,
    pub a_nodes: usize,
    pub h_nodes: usize,
    pub inner_nodes: usize,
    pub level_structured: bool,
    pub h_nodes_skipped: usize,
}

/// Energy ratio and relative L² reconstruction error, evaluated on the inner rule's nodes.
pub fn reproduction_report(sys: &dyn SemidirectSystem, f: &Field, eta: &Field, grid: &GroupGrid, quad: &InnerRule) -> Result<ReproductionReport> {
    quad.check_coverage(f)?;
    let norm_sq = quad.norm_sq(f);
    let fmax = (0..quad.len()).map(|k| f.eval(quad.point(k)).norm()).fold(0.0, f64::max);
    let s = sweep(sys, f, eta, grid, quad, true, norm_sq, fmax);
    let energy = pairwise_sum(&s.energy_terms);
    let recon = s.recon.unwrap();
    let errs: Vec<f64> = (0..quad.len()).map(|k| quad.weights[k] * (recon[k] - f.eval(quad.point(k))).norm_sqr()).collect();
    let err = pairwise_sum(&errs).sqrt();
    let nf = norm_sq.sqrt();
    Ok(ReproductionReport {
        energy_direct: energy,
        energy_density: None,
        norm_f: nf,
        energy_ratio: if norm_sq > 0.0 { energy / norm_sq } else { 0.0 },
        l2_error: if nf > 0.0 { err / nf } else { 0.0 },
        grid: GridSummary {
            a: grid.a.desc.clone(),
            h: grid.h.desc.clone(),
            inner_rule: quad.desc.clone(),
            a_nodes: grid.a.len(),
            h_nodes: grid.h.len(),
            inner_nodes: quad.len(),
            level_structured: quad.levels.is_some(),
            h_nodes_skipped: s.skipped,
        },
    })
}
