//! Command-line front end: config handling, the commands, and the JSON envelope.
//!
//! Exit codes are 0 when every check passes, 1 when a check fails or the system
//! does not support the command, and 2 for usage, config, and I/O errors.

use crate::admissibility::{
    classify, classify_example, example_criterion, fiber_criterion_residual, fiber_criterion_transported, explicit_repr, zero_repr, CriterionReport, EtaRepr, FiberCriterion,
};
use crate::coarea::{coarea_residual, covariance_residual};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::orbit::section_consistency;
use crate::quadrature::{Rule1d, TensorRule};
use crate::system::{phi_of, sample_h, sample_x, validate_system_with, AxisKind, CheckResult, SemidirectSystem, SystemRef, Tolerance};
use crate::systems::{self, build_example, criterion_setup, default_setup, heisenberg, named_eta, named_f, ExampleId, Setup};
use crate::transform::{analyze, energy_direct, energy_via_density, reproduction_report, AGrid, GroupGrid, HAxis, HGrid, InnerRule, YGrid};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const VERSION: &str = env!("MOCKREP_VERSION");

#[derive(Parser, Debug)]
#[command(name = "mockrep", version = VERSION, about = "Voice transforms and admissibility checks for mock metaplectic representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the structural identities of a system
    Validate(CommonArgs),
    /// Structural verdict from the dimension, modular function and stabilizers
    Classify(CommonArgs),
    /// Compare ∫_X f against the fiber disintegration ∫_Y ∫ f dν_y dy
    Coarea(CommonArgs),
    /// Write voice-transform coefficients as CSV
    Transform(CommonArgs),
    /// Energy of the coefficients, with its dependence on the H truncation
    Energy(CommonArgs),
    /// Energy ratio and reconstruction error
    Reproduce(CommonArgs),
    /// Closed-form admissibility integrals and the fiber criterion
    Admissible(CommonArgs),
}

impl Command {
    fn split(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Validate(a) => ("validate", a),
            Command::Classify(a) => ("classify", a),
            Command::Coarea(a) => ("coarea", a),
            Command::Transform(a) => ("transform", a),
            Command::Energy(a) => ("energy", a),
            Command::Reproduce(a) => ("reproduce", a),
            Command::Admissible(a) => ("admissible", a),
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// wavelet1d, heisenberg, shearlet, dilrot2d or transdil2d
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// JSON run configuration; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// write the report (CSV for transform) here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// named input field
    #[arg(long = "f")]
    pub f_spec: Option<String>,
    /// named analysing vector
    #[arg(long = "eta")]
    pub eta_spec: Option<String>,
}

/// Full run configuration. Every field is optional; missing values fall back to
/// the example's documented defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<String>,
    pub gamma: Option<f64>,
    /// adds c·x₁ to the first component of Φ
    pub phi_perturbation: Option<f64>,
    pub f_spec: Option<String>,
    pub eta_spec: Option<String>,
    /// multiplies η
    pub eta_scale: Option<f64>,
    pub sample_budget: Option<usize>,
    pub probe_budget: Option<usize>,
    pub tolerance: Option<Tolerance>,
    /// absolute tolerance for the coarea comparison
    pub coarea_tolerance: Option<f64>,
    /// fiber-criterion tolerance
    pub criterion_tolerance: Option<f64>,
    pub energy_band: Option<[f64; 2]>,
    pub grids: Option<GridOverrides>,
    /// central truncations for the Heisenberg divergence fit
    pub heisenberg_t: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub a: Option<ASpec>,
    pub h: Option<Vec<AxisSpec>>,
    /// Gauss-Legendre tensor rule on X
    pub inner: Option<Vec<IntervalSpec>>,
    /// Gauss-Legendre tensor rule on Y for the density route
    pub y: Option<Vec<IntervalSpec>>,
    pub fiber_resolution: Option<usize>,
    pub fiber_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ASpec {
    pub extent: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AxisSpec {
    Log { lo: f64, hi: f64, count: usize },
    LogGauss { lo: f64, hi: f64, count: usize },
    Uniform { lo: f64, hi: f64, count: usize },
    Gauss { lo: f64, hi: f64, count: usize },
    Periodic { count: usize },
}

impl AxisSpec {
    fn to_axis(self) -> HAxis {
        match self {
            AxisSpec::Log { lo, hi, count } => HAxis::Log { lo, hi, count },
            AxisSpec::LogGauss { lo, hi, count } => HAxis::LogGauss { lo, hi, count },
            AxisSpec::Uniform { lo, hi, count } => HAxis::Uniform { lo, hi, count },
            AxisSpec::Gauss { lo, hi, count } => HAxis::Gauss { lo, hi, count },
            AxisSpec::Periodic { count } => HAxis::Periodic { count },
        }
    }

    fn count(&self) -> usize {
        match *self {
            AxisSpec::Log { count, .. } | AxisSpec::LogGauss { count, .. } | AxisSpec::Uniform { count, .. } | AxisSpec::Gauss { count, .. } | AxisSpec::Periodic { count } => count,
        }
    }

    fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            AxisSpec::Log { lo, hi, .. } | AxisSpec::LogGauss { lo, hi, .. } | AxisSpec::Uniform { lo, hi, .. } | AxisSpec::Gauss { lo, hi, .. } => Some((lo, hi)),
            AxisSpec::Periodic { .. } => None,
        }
    }
}

const MIN_RESOLUTION: usize = 8;

fn check_resolution(what: &str, n: usize) -> Result<()> {
    if n < MIN_RESOLUTION {
        return Err(Error::Config(format!("{what} resolution {n} is below {MIN_RESOLUTION}")));
    }
    Ok(())
}

fn check_bounds(what: &str, lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("{what} bounds [{lo}, {hi}] are not ordered")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_path(p: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
        Self::from_json(&s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    /// Command-line flags override file values.
    pub fn merge_args(mut self, a: &CommonArgs) -> Self {
        if a.system.is_some() {
            self.system = a.system.clone();
        }
        if a.gamma.is_some() {
            self.gamma = a.gamma;
        }
        if a.out.is_some() {
            self.out = a.out.clone();
        }
        if a.f_spec.is_some() {
            self.f_spec = a.f_spec.clone();
        }
        if a.eta_spec.is_some() {
            self.eta_spec = a.eta_spec.clone();
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.grids {
            if let Some(a) = g.a {
                if !(a.extent > 0.0 && a.step > 0.0 && a.step < a.extent) {
                    return Err(Error::Config(format!("a grid needs 0 < step < extent, got {a:?}")));
                }
                check_resolution("a", (2.0 * a.extent / a.step).round() as usize)?;
            }
            for ax in g.h.iter().flatten() {
                check_resolution("h axis", ax.count())?;
                if let Some((lo, hi)) = ax.bounds() {
                    check_bounds("h axis", lo, hi)?;
                }
            }
            for iv in g.inner.iter().flatten().chain(g.y.iter().flatten()) {
                check_resolution("quadrature axis", iv.count)?;
                check_bounds("quadrature axis", iv.lo, iv.hi)?;
            }
            if let Some(r) = g.fiber_resolution {
                check_resolution("fiber", r)?;
            }
            if let Some(r) = g.fiber_radius {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::Config(format!("fiber_radius must be positive, got {r}")));
                }
            }
        }
        if let Some(b) = self.energy_band {
            check_bounds("energy_band", b[0], b[1])?;
        }
        if let Some(ts) = &self.heisenberg_t {
            if ts.len() < 2 || ts.iter().any(|t| !(*t > 0.0)) {
                return Err(Error::Config("heisenberg_t needs at least two positive truncations".into()));
            }
        }
        if let Some(c) = self.eta_scale {
            if !c.is_finite() {
                return Err(Error::Config("eta_scale must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn example(&self) -> Result<ExampleId> {
        let name = self.system.as_deref().ok_or_else(|| Error::Config("missing `system` (use --system or the config key)".into()))?;
        ExampleId::parse(name, self.gamma)
    }

    /// The configuration with every default filled in, as embedded in reports.
    pub fn effective(&self, id: ExampleId) -> RunConfig {
        let mut c = self.clone();
        c.system = Some(id.name().into());
        if let ExampleId::Shearlet { gamma } = id {
            c.gamma = Some(gamma);
        }
        c.f_spec.get_or_insert_with(|| "gaussian".into());
        c.eta_spec.get_or_insert_with(|| systems::default_eta_name(id).into());
        c.eta_scale.get_or_insert(1.0);
        c.sample_budget.get_or_insert(200);
        c.probe_budget.get_or_insert(1000);
        c.tolerance.get_or_insert_with(Tolerance::default);
        c.coarea_tolerance.get_or_insert(1e-6);
        c.criterion_tolerance.get_or_insert(1e-2);
        c.energy_band.get_or_insert([0.98, 1.02]);
        c.seed.get_or_insert(7);
        if id == ExampleId::Heisenberg {
            c.heisenberg_t.get_or_insert_with(|| vec![1.0, 2.0, 4.0, 8.0]);
        }
        c
    }
}

/// What a command produces: a JSON report, whether it passed, and possibly CSV.
pub struct Outcome {
    pub report: serde_json::Value,
    pub passed: bool,
    pub csv: Option<Vec<u8>>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    report: &'a serde_json::Value,
    passed: bool,
}

fn system_for(cfg: &RunConfig, id: ExampleId) -> Result<SystemRef> {
    let base = build_example(id)?;
    Ok(match cfg.phi_perturbation {
        Some(c) if c != 0.0 => Arc::new(systems::perturbed::PerturbedPhi::new(base, c)),
        _ => base,
    })
}

fn setup_for(cfg: &RunConfig, id: ExampleId) -> Result<Setup> {
    let mut s = default_setup(id)?;
    s.sys = system_for(cfg, id)?;
    let sys = s.sys.clone();
    let sr = sys.as_ref();
    s.f = named_f(id, cfg.f_spec.as_deref().unwrap_or("gaussian"))?;
    let eta = named_eta(id, cfg.eta_spec.as_deref().unwrap_or(systems::default_eta_name(id)))?;
    s.eta = match cfg.eta_scale {
        Some(c) if c != 1.0 => eta.scaled(c),
        _ => eta,
    };
    if let Some(g) = &cfg.grids {
        if let Some(a) = g.a {
            s.grid.a = if id == ExampleId::Heisenberg {
                let m = (2.0 * a.extent / a.step).round() as usize;
                let mut axes = heisenberg::agrid(1.0).axes;
                axes[0] = Rule1d::midpoint(m, -a.extent, a.extent);
                AGrid::from_axes(axes, format!("p in [-{0},{0}] step {1}, t in [0,1]", a.extent, a.step))
            } else {
                AGrid::symmetric(sr.n(), a.extent, a.step)
            };
        }
        if let Some(h) = &g.h {
            s.grid.h = HGrid::tensor(sr, &h.iter().map(|a| a.to_axis()).collect::<Vec<_>>())?;
        }
        if let Some(inner) = &g.inner {
            if inner.len() != sr.d() {
                return Err(Error::Config(format!("inner rule needs {} axes", sr.d())));
            }
            let rule = TensorRule::new(inner.iter().map(|iv| Rule1d::gauss(iv.count, iv.lo, iv.hi)).collect());
            s.quad = InnerRule::tensor(sr, &rule, "Gauss-Legendre tensor from config");
        }
        if let Some(yg) = &mut s.ygrid {
            if let Some(y) = &g.y {
                if y.len() != sr.n() {
                    return Err(Error::Config(format!("y grid needs {} axes", sr.n())));
                }
                let rule = TensorRule::new(y.iter().map(|iv| Rule1d::gauss(iv.count, iv.lo, iv.hi)).collect());
                *yg = YGrid::tensor(&rule, yg.fiber_resolution, yg.fiber_radius, "Gauss-Legendre tensor from config");
            }
            if let Some(r) = g.fiber_resolution {
                yg.fiber_resolution = r;
            }
            if g.fiber_radius.is_some() {
                yg.fiber_radius = g.fiber_radius;
            }
        }
    }
    Ok(s)
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn check(tag: &str, description: &str, samples: usize, residual: f64, threshold: f64) -> CheckResult {
    CheckResult { tag: tag.into(), description: description.into(), samples, max_residual: residual, threshold, passed: residual <= threshold, worst_sample: vec![] }
}

fn cmd_validate(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let sys = system_for(cfg, id)?;
    let s = sys.as_ref();
    let budget = cfg.sample_budget.unwrap_or(200);
    let tol = cfg.tolerance.unwrap_or_default();
    let seed = cfg.seed.unwrap_or(7);
    let mut rep = validate_system_with(s, budget, tol, seed)?;
    if s.orbits().is_some() {
        let sc = section_consistency(s, budget, seed + 1)?;
        rep.checks.push(check("SECTION", "h(y)[o(z)] = y for sampled y", sc.samples, sc.max_section_residual, tol.abs + tol.rel));
        rep.checks.push(check("ORBIT_LABEL", "orbit label constant along H-orbits", sc.samples, sc.label_mismatches as f64, 0.0));
    }
    // fiber covariance where the system has fibers
    let probe = Field::new("gaussian probe", |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::new(1.0, 0.5 * x[0]) * (-r2).exp()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 2);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut supported = true;
    for _ in 0..budget.min(50) {
        let y = phi_of(s, &sample_x(s, &mut rng));
        let h = sample_h(s, &mut rng, 1.0);
        match covariance_residual(s, &y, &h, &probe, 256) {
            Ok(r) => {
                worst = worst.max(r);
                count += 1;
            }
            Err(Error::Unsupported(_)) | Err(Error::Domain(_)) => {
                supported = false;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if supported {
        rep.checks.push(check("FIBER_COVARIANCE", "int phi(h^-1.x) d nu_{h[y]} = alpha(h) beta(h) int phi d nu_y", count, worst, 1e-6));
    }
    rep.passed = rep.checks.iter().all(|c| c.passed);
    Ok(Outcome { passed: rep.passed, report: to_value(&rep)?, csv: None })
}

fn cmd_classify(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let sys = system_for(cfg, id)?;
    let budget = cfg.probe_budget.unwrap_or(1000);
    let v = if cfg.phi_perturbation.is_some_and(|c| c != 0.0) { classify(sys.as_ref(), budget)? } else { classify_example(id, sys.as_ref(), budget)? };
    Ok(Outcome { report: to_value(&v)?, passed: true, csv: None })
}

/// X rule and Y grid for the coarea comparison with f = e^{-|x|²}.
pub fn coarea_grids(id: ExampleId, cfg: &RunConfig) -> Result<(TensorRule, YGrid)> {
    let g = cfg.grids.clone().unwrap_or_default();
    let (x, y) = match id {
        ExampleId::Wavelet1d => (
            TensorRule::new(vec![Rule1d::gauss(256, -7.0, 7.0)]),
            YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(256, -7.0, 7.0)]), 1, None, "Gauss-Legendre 256 on [-7,7]"),
        ),
        ExampleId::Heisenberg => return Err(Error::Unsupported("heisenberg: Φ has rank 1 < n everywhere, so there are no fibers".into())),
        ExampleId::Shearlet { .. } => {
            // y = (-s²/2, -s v/2) with s > 0 covers Y once; dy = s²/2 ds dv
            let s = Rule1d::gauss(160, 0.0, 7.0);
            let v = Rule1d::gauss(160, -7.0, 7.0);
            let (mut pts, mut w) = (Vec::new(), Vec::new());
            for (si, sw) in s.nodes.iter().zip(&s.weights) {
                for (vi, vw) in v.nodes.iter().zip(&v.weights) {
                    pts.extend([-0.5 * si * si, -0.5 * si * vi]);
                    w.push(sw * vw * 0.5 * si * si);
                }
            }
            (
                TensorRule::new(vec![Rule1d::gauss(256, -7.0, 7.0), Rule1d::gauss(256, -7.0, 7.0)]),
                YGrid::from_points(2, pts, w, 2, None, "y = (-s^2/2, -s v/2), Gauss-Legendre 160 x 160"),
            )
        }
        ExampleId::Dilrot2d => (
            TensorRule::new(vec![Rule1d::gauss(256, -7.0, 7.0), Rule1d::gauss(256, -7.0, 7.0)]),
            YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(512, 0.0, 49.0)]), g.fiber_resolution.unwrap_or(256), None, "Gauss-Legendre 512 on [0,49]"),
        ),
        ExampleId::Transdil2d => (
            TensorRule::new(vec![Rule1d::gauss(192, -7.0, 7.0), Rule1d::gauss(192, -7.0, 7.0)]),
            YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(192, -7.0, 7.0)]), g.fiber_resolution.unwrap_or(192), Some(g.fiber_radius.unwrap_or(12.0)), "Gauss-Legendre 192 on [-7,7]"),
        ),
    };
    Ok((x, y))
}

#[derive(Serialize)]
struct CoareaReport {
    system: String,
    f: String,
    x_side: f64,
    y_side: f64,
    residual: f64,
    tolerance: f64,
    y_grid: String,
    fiber_resolution: usize,
}

fn cmd_coarea(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let sys = system_for(cfg, id)?;
    let f = match cfg.f_spec.as_deref().unwrap_or("gaussian") {
        "gaussian" => Field::real("exp(-|x|^2)", |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp()),
        "zero" => Field::zero(),
        other => return Err(Error::Config(format!("unknown f_spec `{other}` for coarea (gaussian or zero)"))),
    };
    let (x, y) = coarea_grids(id, cfg)?;
    let r = coarea_residual(sys.as_ref(), &f, &x, &y)?;
    let tol = cfg.coarea_tolerance.unwrap_or(1e-6);
    let rep = CoareaReport { system: sys.id(), f: f.label.clone(), x_side: r.lhs, y_side: r.rhs, residual: r.residual, tolerance: tol, y_grid: y.desc.clone(), fiber_resolution: y.fiber_resolution };
    Ok(Outcome { passed: r.residual <= tol, report: to_value(&rep)?, csv: None })
}

#[derive(Serialize)]
struct TransformReport {
    system: String,
    coefficients: usize,
    a_grid: String,
    h_grid: String,
    inner_rule: String,
    energy: f64,
}

fn cmd_transform(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let s = setup_for(cfg, id)?;
    let sys = s.sys.as_ref();
    let c = analyze(sys, &s.f, &s.eta, &s.grid, &s.quad)?;
    let mut buf = Vec::new();
    c.write_csv(sys, &mut buf)?;
    let rep = TransformReport { system: sys.id(), coefficients: c.values.len(), a_grid: s.grid.a.desc.clone(), h_grid: s.grid.h.desc.clone(), inner_rule: s.quad.desc.clone(), energy: c.energy(sys) };
    Ok(Outcome { report: to_value(&rep)?, passed: true, csv: Some(buf) })
}

/// Sub-grid keeping nodes whose log-scale (multiplicative axes) or offset (line axes)
/// is within `frac` of the grid's largest.
fn truncated_h(sys: &dyn SemidirectSystem, h: &HGrid, frac: f64) -> HGrid {
    let chart = sys.chart();
    let k = h.dim;
    let coord = |i: usize, j: usize| -> f64 {
        let v = h.nodes[i * k + j];
        match chart[j].kind {
            AxisKind::Positive | AxisKind::NonZero => v.abs().ln().abs(),
            AxisKind::Line => v.abs(),
            AxisKind::Angle => 0.0,
        }
    };
    let maxes: Vec<f64> = (0..k).map(|j| (0..h.len()).map(|i| coord(i, j)).fold(0.0, f64::max)).collect();
    let keep: Vec<usize> = (0..h.len()).filter(|&i| (0..k).all(|j| coord(i, j) <= frac * maxes[j] + 1e-12)).collect();
    HGrid {
        dim: k,
        nodes: keep.iter().flat_map(|&i| h.nodes[i * k..(i + 1) * k].to_vec()).collect(),
        weights: keep.iter().map(|&i| h.weights[i]).collect(),
        desc: format!("{} restricted to {frac} of each axis", h.desc),
    }
}

#[derive(Serialize)]
struct TruncationPoint {
    fraction: f64,
    h_nodes: usize,
    energy: f64,
}

#[derive(Serialize)]
struct EnergyReport {
    system: String,
    energy_direct: f64,
    energy_density: Option<f64>,
    norm_f: f64,
    energy_ratio: f64,
    band: [f64; 2],
    /// energies on nested H truncations; a ratio that keeps moving means the truncation decides the number
    truncation_profile: Vec<TruncationPoint>,
    a_grid: String,
    h_grid: String,
}

fn cmd_energy(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let s = setup_for(cfg, id)?;
    let sys = s.sys.as_ref();
    s.quad.check_coverage(&s.f)?;
    let norm_sq = s.quad.norm_sq(&s.f);
    let e = energy_direct(sys, &s.f, &s.eta, &s.grid, &s.quad)?;
    let dens = match &s.ygrid {
        Some(yg) if cfg.phi_perturbation.is_none() => Some(energy_via_density(sys, &s.f, &s.eta, &s.grid.h, yg)?),
        _ => None,
    };
    let mut profile = Vec::new();
    for frac in [0.25, 0.5] {
        let h = truncated_h(sys, &s.grid.h, frac);
        let g = GroupGrid::new(s.grid.a.clone(), h);
        profile.push(TruncationPoint { fraction: frac, h_nodes: g.h.len(), energy: energy_direct(sys, &s.f, &s.eta, &g, &s.quad)? });
    }
    profile.push(TruncationPoint { fraction: 1.0, h_nodes: s.grid.h.len(), energy: e });
    let band = cfg.energy_band.unwrap_or([0.98, 1.02]);
    let ratio = if norm_sq > 0.0 { e / norm_sq } else { 0.0 };
    let rep = EnergyReport {
        system: sys.id(),
        energy_direct: e,
        energy_density: dens,
        norm_f: norm_sq.sqrt(),
        energy_ratio: ratio,
        band,
        truncation_profile: profile,
        a_grid: s.grid.a.desc.clone(),
        h_grid: s.grid.h.desc.clone(),
    };
    Ok(Outcome { passed: ratio >= band[0] && ratio <= band[1], report: to_value(&rep)?, csv: None })
}

#[derive(Serialize)]
pub struct DivergenceReport {
    pub system: String,
    pub truncations: Vec<f64>,
    pub energies: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub norm_f: f64,
    pub verdict: crate::admissibility::Conclusion,
}

/// Least-squares line through (x, y): slope, intercept, R².
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// Heisenberg energies over central truncations t ∈ [0, T].
pub fn heisenberg_divergence(s: &Setup, ts: &[f64]) -> Result<DivergenceReport> {
    let sys = s.sys.as_ref();
    let mut energies = Vec::new();
    for &t in ts {
        let mut a = heisenberg::agrid(t);
        a.axes[0] = s.grid.a.axes[0].clone();
        let g = GroupGrid::new(a, s.grid.h.clone());
        energies.push(energy_direct(sys, &s.f, &s.eta, &g, &s.quad)?);
    }
    let (slope, intercept, r2) = linear_fit(ts, &energies);
    Ok(DivergenceReport {
        system: sys.id(),
        truncations: ts.to_vec(),
        energies,
        slope,
        intercept,
        r_squared: r2,
        norm_f: s.quad.norm_sq(&s.f).sqrt(),
        verdict: crate::admissibility::Conclusion::NotReproducing,
    })
}

fn cmd_reproduce(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let s = setup_for(cfg, id)?;
    if id == ExampleId::Heisenberg {
        let ts = cfg.heisenberg_t.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
        let d = heisenberg_divergence(&s, &ts)?;
        return Ok(Outcome { report: to_value(&d)?, passed: false, csv: None });
    }
    let sys = s.sys.as_ref();
    let mut rep = reproduction_report(sys, &s.f, &s.eta, &s.grid, &s.quad)?;
    if let (Some(yg), None) = (&s.ygrid, cfg.phi_perturbation) {
        rep.energy_density = Some(energy_via_density(sys, &s.f, &s.eta, &s.grid.h, yg)?);
    }
    let band = cfg.energy_band.unwrap_or([0.98, 1.02]);
    let passed = rep.energy_ratio >= band[0] && rep.energy_ratio <= band[1];
    Ok(Outcome { report: to_value(&rep)?, passed, csv: None })
}

fn scaled_repr(r: EtaRepr, c: f64) -> EtaRepr {
    if c == 1.0 {
        return r;
    }
    match r {
        EtaRepr::Spatial(f) => EtaRepr::Spatial(f.scaled(c)),
        EtaRepr::AngularFourier { coeff, modes } => EtaRepr::AngularFourier { coeff: Arc::new(move |t, n| coeff(t, n) * c), modes },
        EtaRepr::PartialFourier { hat, omegas } => EtaRepr::PartialFourier { hat: Arc::new(move |y, w| hat(y, w) * c), omegas },
    }
}

fn repr_for(id: ExampleId, name: &str, scale: f64) -> Result<EtaRepr> {
    let r = match (name, id) {
        ("explicit" | "paper", _) => explicit_repr(id)?,
        ("zero", _) => zero_repr(id)?,
        (_, ExampleId::Wavelet1d | ExampleId::Shearlet { .. }) => EtaRepr::Spatial(named_eta(id, name)?),
        (_, ExampleId::Dilrot2d) => EtaRepr::angular_from_field(&named_eta(id, name)?, (-4..=4).collect(), 64),
        _ => return Err(Error::Config(format!("eta_spec `{name}` has no closed-form representation for {id}"))),
    };
    Ok(scaled_repr(r, scale))
}

#[derive(Serialize)]
struct AdmissibleReport {
    closed_form: CriterionReport,
    fiber_criterion: FiberCriterion,
    transported: FiberCriterion,
    transport: Vec<f64>,
    criterion_tolerance: f64,
}

fn cmd_admissible(cfg: &RunConfig, id: ExampleId) -> Result<Outcome> {
    let name = cfg.eta_spec.clone().unwrap_or_else(|| "explicit".into());
    let scale = cfg.eta_scale.unwrap_or(1.0);
    let closed = example_criterion(id, &repr_for(id, &name, scale)?)?;
    let sys = system_for(cfg, id)?;
    let cs = criterion_setup(id)?;
    let mut eta = named_eta(id, &name)?;
    if scale != 1.0 {
        eta = eta.scaled(scale);
    }
    let fiber = fiber_criterion_residual(sys.as_ref(), &eta, &cs.y, &cs.tests, &cs.hgrid, cs.resolution, cs.radius)?;
    let moved = fiber_criterion_transported(&sys, &eta, &cs.y, &cs.tests, &cs.hgrid, cs.resolution, cs.radius, &cs.transport)?;
    let tol = cfg.criterion_tolerance.unwrap_or(1e-2);
    let passed = closed.satisfied && fiber.max_residual <= tol && moved.max_residual <= fiber.max_residual + 1e-6;
    let rep = AdmissibleReport { closed_form: closed, fiber_criterion: fiber, transported: moved, transport: cs.transport, criterion_tolerance: tol };
    Ok(Outcome { report: to_value(&rep)?, passed, csv: None })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 2,
        _ => 1,
    }
}

/// Runs one command on a merged config; returns the effective config with the outcome.
pub fn execute(kind: &str, cfg: &RunConfig) -> Result<(RunConfig, Outcome)> {
    cfg.validate()?;
    let id = cfg.example()?;
    let eff = cfg.effective(id);
    let out = match kind {
        "validate" => cmd_validate(&eff, id)?,
        "classify" => cmd_classify(&eff, id)?,
        "coarea" => cmd_coarea(&eff, id)?,
        "transform" => cmd_transform(&eff, id)?,
        "energy" => cmd_energy(&eff, id)?,
        "reproduce" => cmd_reproduce(&eff, id)?,
        "admissible" => cmd_admissible(&eff, id)?,
        other => return Err(Error::Config(format!("unknown command `{other}`"))),
    };
    Ok((eff, out))
}

/// Deterministic JSON envelope for a finished command.
pub fn envelope(command: &str, config: &RunConfig, out: &Outcome) -> Result<String> {
    let e = Envelope { command, version: VERSION, config, report: &out.report, passed: out.passed };
    Ok(serde_json::to_string_pretty(&e)?)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn set_threads() -> Result<()> {
    if let Ok(v) = std::env::var("MOCKREP_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("MOCKREP_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Config("MOCKREP_THREADS must be positive".into()));
        }
        // a second call in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run_inner(cli: &Cli) -> Result<i32> {
    set_threads()?;
    let (kind, args) = cli.command.split();
    let file = match &args.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    let cfg = file.merge_args(args);
    let (eff, out) = match execute(kind, &cfg) {
        Ok(r) => r,
        Err(e) if exit_code(&e) == 1 => {
            // the system cannot do this; still say so in a report
            let id = cfg.example()?;
            let eff = cfg.effective(id);
            let o = Outcome { report: serde_json::json!({ "error": e.to_string() }), passed: false, csv: None };
            (eff, o)
        }
        Err(e) => return Err(e),
    };
    let json = envelope(kind, &eff, &out)? + "\n";
    match &out.csv {
        Some(csv) => {
            emit(eff.out.as_deref(), csv)?;
            if eff.out.is_some() {
                emit(None, json.as_bytes())?;
            }
        }
        None => emit(eff.out.as_deref(), json.as_bytes())?,
    }
    Ok(if out.passed { 0 } else { 1 })
}

/// Entry point for the binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match run_inner(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("mockrep: {e}");
            exit_code(&e)
        }
    }
}
