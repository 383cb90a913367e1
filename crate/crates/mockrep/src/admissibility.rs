//! Admissibility: structural verdicts, the fiber criterion, the dilation lemma
//! and the closed-form conditions of the built-in examples.

use crate::coarea::fiber_quadrature_with;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::orbit::{FiberKind, Stabilizer};
use crate::quadrature::{integrate_adaptive, integrate_nested, pairwise_sum, Domain1d};
use crate::system::{apply_d, apply_n, h_inv, jphi, modular_g, sample_h, GroupElement, SemidirectSystem, SystemRef};
use crate::systems::{transdil2d, ExampleId};
use crate::transform::HGrid;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    Reproducing,
    NotReproducing,
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DimensionRelation {
    #[serde(rename = "n<d")]
    Less,
    #[serde(rename = "n=d")]
    Equal,
    #[serde(rename = "n>d")]
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerClass {
    CompactAe,
    Noncompact,
    Mixed,
    /// no orbit metadata (e.g. Y is null)
    Unknown,
}

// Descriptive tags for the results a verdict rests on.
pub const TAG_DIMENSION: &str = "DIMENSION_BOUND: n > d excludes admissible vectors";
pub const TAG_CRITICAL: &str = "CRITICAL_SET_NULL: the critical set of Φ must be Lebesgue-null";
pub const TAG_EQUAL_DIM: &str = "EQUAL_DIMENSION: for n = d, reproducing iff G is non-unimodular";
pub const TAG_UNIMODULAR: &str = "UNIMODULAR_CASE: unimodular with compact stabilizers forces finite fibers, hence n = d";
pub const TAG_NONUNIMODULAR: &str = "NONUNIMODULAR_CASE: non-unimodular with compact stabilizers a.e. is reproducing";
pub const TAG_HOMOGENEOUS: &str = "HOMOGENEOUS_OBSTRUCTION: homogeneous Φ, linear action and unimodular G admit no admissible vector";
pub const TAG_NONCOMPACT: &str = "NONCOMPACT_STABILIZER: admissibility decided by an explicit vector";

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub system: String,
    pub unimodular: bool,
    pub max_modular_deviation: f64,
    pub n_vs_d: DimensionRelation,
    pub critical_fraction: f64,
    pub stabilizers: StabilizerClass,
    pub conclusion: Conclusion,
    /// set when a CONDITIONAL verdict was settled by an explicit admissible vector
    pub resolved: Option<Conclusion>,
    pub cited: Vec<String>,
    pub probe_budget: usize,
}

impl Verdict {
    /// The conclusion after resolution, if any.
    pub fn effective(&self) -> Conclusion {
        self.resolved.unwrap_or(self.conclusion)
    }
}

/// Sampled |Δ_G − 1| over `budget` chart points.
pub fn modular_deviation(sys: &dyn SemidirectSystem, budget: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..budget)
        .map(|_| {
            let h = sample_h(sys, &mut rng, 2.0);
            (modular_g(sys, &GroupElement::dilation(sys, h)) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

fn stabilizer_class(sys: &dyn SemidirectSystem) -> StabilizerClass {
    match sys.orbits() {
        None => StabilizerClass::Unknown,
        Some(m) => {
            let c = m.orbits.iter().filter(|o| o.stabilizer.is_compact()).count();
            if c == m.orbits.len() {
                StabilizerClass::CompactAe
            } else if c == 0 {
                StabilizerClass::Noncompact
            } else {
                StabilizerClass::Mixed
            }
        }
    }
}

pub fn classify(sys: &dyn SemidirectSystem, probe_budget: usize) -> Result<Verdict> {
    if probe_budget < 100 {
        return Err(Error::Parameter(format!("probe_budget must be at least 100, got {probe_budget}")));
    }
    let dev = modular_deviation(sys, probe_budget, 23);
    let unimodular = dev < 1e-9;
    let (n, d) = (sys.n(), sys.d());
    let n_vs_d = match n.cmp(&d) {
        std::cmp::Ordering::Less => DimensionRelation::Less,
        std::cmp::Ordering::Equal => DimensionRelation::Equal,
        std::cmp::Ordering::Greater => DimensionRelation::Greater,
    };
    let bx = sys.sample_box();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut critical = 0usize;
    for _ in 0..probe_budget {
        let x: Vec<f64> = bx.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        if !sys.in_domain(&x) || jphi(sys, &x) < 1e-8 {
            critical += 1;
        }
    }
    let critical_fraction = critical as f64 / probe_budget as f64;
    let stabilizers = stabilizer_class(sys);
    let st = sys.structure();
    let homogeneous = st.homogeneous_degree.is_some() && st.linear_action;
    let mut cited = Vec::new();
    let conclusion = if n_vs_d == DimensionRelation::Greater {
        cited.push(TAG_DIMENSION);
        Conclusion::NotReproducing
    } else if critical_fraction > 1e-2 {
        cited.push(TAG_CRITICAL);
        Conclusion::NotReproducing
    } else if homogeneous && unimodular {
        cited.push(TAG_HOMOGENEOUS);
        Conclusion::NotReproducing
    } else if n_vs_d == DimensionRelation::Equal {
        cited.push(TAG_EQUAL_DIM);
        if unimodular {
            Conclusion::NotReproducing
        } else {
            Conclusion::Reproducing
        }
    } else {
        match (unimodular, stabilizers) {
            (false, StabilizerClass::CompactAe) => {
                cited.push(TAG_NONUNIMODULAR);
                Conclusion::Reproducing
            }
            (true, StabilizerClass::CompactAe) => {
                cited.push(TAG_UNIMODULAR);
                Conclusion::NotReproducing
            }
            _ => {
                cited.push(TAG_NONCOMPACT);
                Conclusion::Conditional
            }
        }
    };
    Ok(Verdict {
        system: sys.id(),
        unimodular,
        max_modular_deviation: dev,
        n_vs_d,
        critical_fraction,
        stabilizers,
        conclusion,
        resolved: None,
        cited: cited.into_iter().map(String::from).collect(),
        probe_budget,
    })
}

/// Settle a CONDITIONAL verdict with a closed-form criterion report.
pub fn resolve(v: &mut Verdict, report: &CriterionReport) {
    if v.conclusion == Conclusion::Conditional && report.satisfied {
        v.resolved = Some(Conclusion::Reproducing);
    }
}

/// classify, plus resolution through the example's own admissible vector when needed.
pub fn classify_example(id: ExampleId, sys: &dyn SemidirectSystem, probe_budget: usize) -> Result<Verdict> {
    let mut v = classify(sys, probe_budget)?;
    if v.conclusion == Conclusion::Conditional {
        if let Ok(repr) = explicit_repr(id) {
            let rep = example_criterion(id, &repr)?;
            resolve(&mut v, &rep);
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberCriterion {
    pub y: Vec<f64>,
    pub h_nodes: usize,
    pub fiber_nodes: usize,
    pub norms: Vec<f64>,
    /// NaN for skipped vectors
    pub residuals: Vec<f64>,
    pub skipped: Vec<bool>,
    pub max_residual: f64,
}

/// For each u: |‖u‖² − ∫_H |⟨u, η^h⟩|² dh/(αβ)| / ‖u‖², all inner products on ν_y.
#[allow(clippy::too_many_arguments)]
pub fn fiber_criterion_residual(
    sys: &dyn SemidirectSystem,
    eta: &Field,
    y: &[f64],
    tests: &[Field],
    hgrid: &HGrid,
    resolution: usize,
    radius: Option<f64>,
) -> Result<FiberCriterion> {
    let fib = fiber_quadrature_with(sys, y, resolution, radius)?;
    let m = fib.len();
    let d = sys.d();
    let uw: Vec<Vec<Complex64>> = tests.iter().map(|u| (0..m).map(|k| u.eval(fib.node(k)) * fib.weights[k]).collect()).collect();
    let norms: Vec<f64> = tests.iter().map(|u| fib.integrate_real(|x| u.eval(x).norm_sqr())).collect();
    let per_h: Vec<Vec<f64>> = (0..hgrid.len())
        .into_par_iter()
        .map(|i| {
            let h = hgrid.node(i);
            let hi = h_inv(sys, h);
            let mut buf = vec![0.0; d];
            let e: Vec<Complex64> = (0..m)
                .map(|k| {
                    sys.act_d(&hi, fib.node(k), &mut buf);
                    eta.eval(&buf).conj()
                })
                .collect();
            let scale = hgrid.weights[i] / (sys.alpha(h) * sys.beta(h));
            uw.iter().map(|u| u.iter().zip(&e).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr() * scale).collect()
        })
        .collect();
    let mut residuals = Vec::with_capacity(tests.len());
    let mut skipped = Vec::with_capacity(tests.len());
    for (j, &nrm) in norms.iter().enumerate() {
        if nrm == 0.0 {
            residuals.push(f64::NAN);
            skipped.push(true);
            continue;
        }
        let col: Vec<f64> = per_h.iter().map(|r| r[j]).collect();
        let e = pairwise_sum(&col);
        residuals.push((nrm - e).abs() / nrm);
        skipped.push(false);
    }
    let max_residual = residuals.iter().filter(|r| !r.is_nan()).fold(0.0, |a: f64, &b| a.max(b));
    Ok(FiberCriterion { y: y.to_vec(), h_nodes: hgrid.len(), fiber_nodes: m, norms, residuals, skipped, max_residual })
}

/// The same criterion at h₀[y], with u ∘ h₀⁻¹ and the grid left-translated by h₀.
#[allow(clippy::too_many_arguments)]
pub fn fiber_criterion_transported(
    sys: &SystemRef,
    eta: &Field,
    y: &[f64],
    tests: &[Field],
    hgrid: &HGrid,
    resolution: usize,
    radius: Option<f64>,
    h0: &[f64],
) -> Result<FiberCriterion> {
    let s = sys.as_ref();
    let y1 = apply_n(s, h0, y);
    let hi = Arc::new(h_inv(s, h0));
    let moved: Vec<Field> = tests
        .iter()
        .map(|u| {
            let (u, sys, hi) = (u.clone(), sys.clone(), hi.clone());
            Field::new(format!("{} transported", u.label), move |x| u.eval(&apply_d(sys.as_ref(), &hi, x)))
        })
        .collect();
    let grid = hgrid.transported(s, h0);
    fiber_criterion_residual(s, eta, &y1, &moved, &grid, resolution, radius)
}

/// x ↦ δ^{(np−d)/2} η(x/δ) for a homogeneous Φ of degree p and a linear action.
pub fn dilation_transfer(sys: &dyn SemidirectSystem, eta: &Field, delta: f64) -> Result<Field> {
    let st = sys.structure();
    let p = match (st.homogeneous_degree, st.linear_action) {
        (Some(p), true) => p,
        _ => return Err(Error::Unsupported(format!("{} does not declare a homogeneous Φ with a linear action", sys.id()))),
    };
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("dilation must be positive, got {delta}")));
    }
    let q = sys.n() as f64 * p - sys.d() as f64;
    let c = delta.powf(0.5 * q);
    let e = eta.clone();
    let mut out = Field::new(format!("{} dilated by {delta}", eta.label), move |x| {
        let xs: Vec<f64> = x.iter().map(|v| v / delta).collect();
        e.eval(&xs) * c
    });
    if let Some(b) = &eta.support_hint {
        out = out.with_support(b.iter().map(|&(lo, hi)| (lo * delta, hi * delta)).collect());
    }
    Ok(out)
}

/// Representations of η in the form each closed-form criterion reads.
#[derive(Clone)]
pub enum EtaRepr {
    Spatial(Field),
    /// (t, n) ↦ η̂(t, n), the n-th angular Fourier coefficient at radius t
    AngularFourier { coeff: Arc<dyn Fn(f64, i32) -> Complex64 + Send + Sync>, modes: Vec<i32> },
    /// (y, ω) ↦ η̂(y, ω), Fourier transform in x₁
    PartialFourier { hat: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>, omegas: Vec<f64> },
}

impl EtaRepr {
    fn kind(&self) -> &'static str {
        match self {
            EtaRepr::Spatial(_) => "spatial",
            EtaRepr::AngularFourier { .. } => "angular-fourier",
            EtaRepr::PartialFourier { .. } => "partial-fourier",
        }
    }

    /// Angular coefficients of a spatial field on ℝ², by the trapezoid rule with `nphi` angles.
    pub fn angular_from_field(eta: &Field, modes: Vec<i32>, nphi: usize) -> EtaRepr {
        let e = eta.clone();
        EtaRepr::AngularFourier {
            coeff: Arc::new(move |t, n| {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..nphi {
                    let p = 2.0 * PI * k as f64 / nphi as f64;
                    s += e.eval(&[t * p.cos(), t * p.sin()]) * Complex64::from_polar(1.0, -(n as f64) * p);
                }
                s / nphi as f64
            }),
            modes,
        }
    }
}

/// Default ω samples for the partial-Fourier criterion.
pub fn default_omegas() -> Vec<f64> {
    vec![-3.0, -1.7, -0.6, 0.0, 0.25, 0.9, 1.5, 2.2, 3.1, 4.0]
}

/// The closed-form representation of each example's own vector.
pub fn explicit_repr(id: ExampleId) -> Result<EtaRepr> {
    use crate::systems::named_eta;
    Ok(match id {
        ExampleId::Wavelet1d | ExampleId::Shearlet { .. } => EtaRepr::Spatial(named_eta(id, "explicit")?),
        ExampleId::Dilrot2d => EtaRepr::AngularFourier {
            coeff: Arc::new(|t, n| {
                if n.abs() <= crate::systems::dilrot2d::ETA_MODES {
                    Complex64::new(2.0 * t * (-t * t).exp() / PI.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            modes: (-crate::systems::dilrot2d::ETA_MODES..=crate::systems::dilrot2d::ETA_MODES).collect(),
        },
        ExampleId::Transdil2d => EtaRepr::PartialFourier { hat: Arc::new(transdil2d::eta_hat), omegas: default_omegas() },
        ExampleId::Heisenberg => return Err(Error::Unsupported("heisenberg has no admissibility criterion".into())),
    })
}

/// Zero vector in the representation the example expects.
pub fn zero_repr(id: ExampleId) -> Result<EtaRepr> {
    Ok(match id {
        ExampleId::Wavelet1d | ExampleId::Shearlet { .. } => EtaRepr::Spatial(Field::zero()),
        ExampleId::Dilrot2d => EtaRepr::AngularFourier { coeff: Arc::new(|_, _| Complex64::new(0.0, 0.0)), modes: (-4..=4).collect() },
        ExampleId::Transdil2d => EtaRepr::PartialFourier { hat: Arc::new(|_, _| 0.0), omegas: default_omegas() },
        ExampleId::Heisenberg => return Err(Error::Unsupported("heisenberg has no admissibility criterion".into())),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionEntry {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub example: String,
    pub representation: String,
    pub criterion: Vec<CriterionEntry>,
    pub satisfied: bool,
    pub residuals: BTreeMap<String, f64>,
}

fn entry(name: String, value: f64, target: f64, tol: f64) -> CriterionEntry {
    let residual = (value - target).abs();
    CriterionEntry { name, value, target, residual, tolerance: tol, passed: residual <= tol }
}

const ABS: f64 = 1e-14;
const REL: f64 = 1e-12;

/// Evaluates the example's displayed admissibility integrals by adaptive quadrature.
pub fn example_criterion(id: ExampleId, repr: &EtaRepr) -> Result<CriterionReport> {
    let wrong = || Error::Precondition(format!("{id} expects a different representation of η than {}", repr.kind()));
    let entries = match (id, repr) {
        (ExampleId::Wavelet1d, EtaRepr::Spatial(eta)) => {
            // ∫_H |η(h⁻¹[±1])|² dh with h⁻¹[y] = a y and dh = da/a
            let side = |sgn: f64| integrate_adaptive(&|a: f64| eta.eval(&[sgn * a]).norm_sqr() / a, Domain1d::Above(0.0), ABS, REL);
            vec![entry("calderon_plus".into(), side(1.0), 1.0, 1e-8), entry("calderon_minus".into(), side(-1.0), 1.0, 1e-8)]
        }
        (ExampleId::Shearlet { .. }, EtaRepr::Spatial(eta)) => {
            // (t, ℓ) ↦ ω = (t/2, t^γ ℓ/2) turns dt dℓ/t^{3−γ} into dω/(2ω₁³), for every γ
            let xp = |w: &[f64]| {
                let s = (2.0 * w[0]).sqrt();
                [s, 2.0 * w[1] / s]
            };
            let dom = [Domain1d::Above(0.0), Domain1d::Line];
            let meas = |w: &[f64]| 1.0 / (2.0 * w[0] * w[0] * w[0]);
            let s1 = integrate_nested(&|w| eta.eval(&xp(w)).norm_sqr() * meas(w), &dom, ABS, REL);
            let s2 = integrate_nested(
                &|w| {
                    let p = xp(w);
                    eta.eval(&[-p[0], -p[1]]).norm_sqr() * meas(w)
                },
                &dom,
                ABS,
                REL,
            );
            let cross = |part: fn(Complex64) -> f64| {
                integrate_nested(
                    &|w| {
                        let p = xp(w);
                        part(eta.eval(&p) * eta.eval(&[-p[0], -p[1]]).conj()) * meas(w)
                    },
                    &dom,
                    ABS,
                    REL,
                )
            };
            let s3 = Complex64::new(cross(|z| z.re), cross(|z| z.im)).norm();
            vec![entry("positive_half".into(), s1, 0.5, 1e-8), entry("negative_half".into(), s2, 0.5, 1e-8), entry("cross_term".into(), s3, 0.0, 1e-12)]
        }
        (ExampleId::Dilrot2d, EtaRepr::AngularFourier { coeff, modes }) => modes
            .iter()
            .map(|&n| {
                let v = integrate_adaptive(&|t: f64| coeff(t, n).norm_sqr() / t, Domain1d::Above(0.0), ABS, REL);
                entry(format!("mode_{n}"), v, 1.0 / PI, 1e-8)
            })
            .collect(),
        (ExampleId::Transdil2d, EtaRepr::PartialFourier { hat, omegas }) => omegas
            .iter()
            .map(|&w| {
                let g = |y: f64| hat(y, w).powi(2) / y.abs();
                let v = integrate_adaptive(&g, Domain1d::Below(0.0), ABS, REL) + integrate_adaptive(&g, Domain1d::Above(0.0), ABS, REL);
                entry(format!("omega_{w}"), v, 1.0, 1e-6)
            })
            .collect(),
        (ExampleId::Heisenberg, _) => return Err(Error::Unsupported("heisenberg has no admissibility criterion".into())),
        _ => return Err(wrong()),
    };
    let satisfied = entries.iter().all(|e| e.passed);
    let residuals = entries.iter().map(|e| (e.name.clone(), e.residual)).collect();
    Ok(CriterionReport { example: id.to_string(), representation: repr.kind().into(), criterion: entries, satisfied, residuals })
}

#[derive(Debug, Clone, Serialize)]
pub struct FinitenessReport {
    pub orbit: usize,
    pub fiber_finite: bool,
    pub stabilizer_compact: bool,
    pub unimodular: bool,
    pub consistent: bool,
}

/// (i) finite fiber ⇒ compact stabilizer; (ii) unimodular ∧ compact stabilizer ⇒ finite fiber.
pub fn finiteness_check(sys: &dyn SemidirectSystem, z: usize) -> Result<FinitenessReport> {
    let m = sys.orbits().ok_or_else(|| Error::Unsupported(format!("{} has no orbit metadata", sys.id())))?;
    let o = m.orbits.get(z).ok_or_else(|| Error::Parameter(format!("orbit label {z} out of range")))?;
    let fiber_finite = matches!(m.fiber_kind, FiberKind::Finite(_));
    let stabilizer_compact = !matches!(o.stabilizer, Stabilizer::Noncompact(_));
    let unimodular = modular_deviation(sys, 200, 31) < 1e-9;
    let i = !fiber_finite || stabilizer_compact;
    let ii = !(unimodular && stabilizer_compact) || fiber_finite;
    Ok(FinitenessReport { orbit: z, fiber_finite, stabilizer_compact, unimodular, consistent: i && ii })
}
