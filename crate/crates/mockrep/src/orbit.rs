//! H-orbits in Y: labels, origins, sections, stabilizers, the measures τ_z
//! and the Mackey/Weil disintegrations.

use crate::coarea::fiber_quadrature;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, integrate_nested, Domain1d};
use crate::system::{apply_d, apply_n, h_inv, h_mul, modular_g, norm, phi_of, sample_h, sample_x, AxisKind, GroupElement, SemidirectSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// One-parameter chart of a stabilizer subgroup with its Haar density.
#[derive(Debug, Clone)]
pub struct StabilizerChart {
    pub desc: &'static str,
    pub domain: Domain1d,
    pub haar_density: f64,
    pub embed: fn(f64) -> Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Stabilizer {
    /// H_z = {e}; `mass` is the point mass making the Weil formula hold
    Trivial { mass: f64 },
    Compact(StabilizerChart),
    Noncompact(StabilizerChart),
}

impl Stabilizer {
    pub fn is_compact(&self) -> bool {
        !matches!(self, Stabilizer::Noncompact(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Stabilizer::Trivial { .. } => "trivial",
            Stabilizer::Compact(_) => "compact",
            Stabilizer::Noncompact(_) => "noncompact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitInfo {
    pub label: &'static str,
    pub origin: Vec<f64>,
    /// λ({z})
    pub lambda_weight: f64,
    /// τ_z is Lebesgue measure on this product region (up to a null set)
    pub region: Vec<Domain1d>,
    pub stabilizer: Stabilizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberKind {
    Finite(usize),
    Compact,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct OrbitMetadata {
    pub orbits: Vec<OrbitInfo>,
    pub fiber_kind: FiberKind,
    /// closure of Y as a product region, for integrals over Y
    pub y_domain: Vec<Domain1d>,
    pub label_of: fn(&[f64]) -> Option<usize>,
    /// h(y) with h(y)[o(π(y))] = y
    pub section: fn(&[f64]) -> Vec<f64>,
}

fn meta(sys: &dyn SemidirectSystem) -> Result<&OrbitMetadata> {
    sys.orbits().ok_or_else(|| Error::Unsupported(format!("{} has no orbit metadata", sys.id())))
}

fn orbit(sys: &dyn SemidirectSystem, z: usize) -> Result<&OrbitInfo> {
    meta(sys)?.orbits.get(z).ok_or_else(|| Error::Parameter(format!("orbit label {z} out of range")))
}

const ABS: f64 = 1e-14;
const REL: f64 = 1e-11;

/// ∫_H F(h) dh over the whole chart; multiplicative axes are integrated in log coordinates.
/// Line axes are cut to [-line_cut, line_cut] when given.
pub fn integrate_h(sys: &dyn SemidirectSystem, f: &dyn Fn(&[f64]) -> f64, line_cut: Option<f64>) -> f64 {
    let chart = sys.chart();
    let k = chart.len();
    let signs: Vec<usize> = chart.iter().enumerate().filter(|(_, a)| a.kind == AxisKind::NonZero).map(|(i, _)| i).collect();
    let mut total = 0.0;
    for mask in 0..(1usize << signs.len()) {
        let doms: Vec<Domain1d> = chart
            .iter()
            .map(|a| match a.kind {
                AxisKind::Positive | AxisKind::NonZero => Domain1d::Line,
                AxisKind::Line => line_cut.map_or(Domain1d::Line, |c| Domain1d::Interval(-c, c)),
                AxisKind::Angle => Domain1d::Interval(0.0, 2.0 * PI),
            })
            .collect();
        let g = |u: &[f64]| {
            let mut h = vec![0.0; k];
            let mut jac = 1.0;
            for i in 0..k {
                match chart[i].kind {
                    AxisKind::Positive | AxisKind::NonZero => {
                        let t = u[i].exp();
                        jac *= t;
                        let neg = signs.iter().position(|&s| s == i).is_some_and(|p| mask & (1 << p) != 0);
                        h[i] = if neg { -t } else { t };
                    }
                    _ => h[i] = u[i],
                }
            }
            let v = f(&h) * sys.haar_density(&h) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        total += integrate_nested(&g, &doms, ABS, REL);
    }
    total
}

fn integrate_region(f: &dyn Fn(&[f64]) -> f64, region: &[Domain1d]) -> f64 {
    integrate_nested(f, region, ABS, REL)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilizerVolume {
    Finite { volume: f64 },
    /// H-integral restricted to |b| ≤ B along the translation axes, per B
    Infinite { growth: Vec<(f64, f64)> },
}

/// vol(H_y) = ∫_H probe(h[y]) α(h⁻¹) dh / ∫_Y probe dτ_z, at the origin of z.
pub fn stabilizer_volume(sys: &dyn SemidirectSystem, z: usize, probe: &dyn Fn(&[f64]) -> f64) -> Result<StabilizerVolume> {
    let o = orbit(sys, z)?.origin.clone();
    stabilizer_volume_at(sys, z, &o, probe)
}

/// Same ratio with an arbitrary base point y of the orbit z.
pub fn stabilizer_volume_at(sys: &dyn SemidirectSystem, z: usize, y: &[f64], probe: &dyn Fn(&[f64]) -> f64) -> Result<StabilizerVolume> {
    let info = orbit(sys, z)?;
    check_positive(sys, probe)?;
    let num = |cut: Option<f64>| {
        integrate_h(
            sys,
            &|h: &[f64]| {
                let hy = apply_n(sys, h, y);
                probe(&hy) / sys.alpha(h)
            },
            cut,
        )
    };
    match &info.stabilizer {
        Stabilizer::Noncompact(_) => {
            let growth = [2.0, 4.0, 8.0, 16.0].iter().map(|&b| (b, num(Some(b)))).collect();
            Ok(StabilizerVolume::Infinite { growth })
        }
        _ => {
            let den = integrate_region(probe, &info.region);
            Ok(StabilizerVolume::Finite { volume: num(None) / den })
        }
    }
}

fn check_positive(sys: &dyn SemidirectSystem, probe: &dyn Fn(&[f64]) -> f64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..256 {
        let y = phi_of(sys, &sample_x(sys, &mut rng));
        let v = probe(&y);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("probe is not strictly positive at {y:?}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeilResult {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// ∫_H φ(h)α(h⁻¹)dh against ∫_Y (∫_{H_z} φ(h(y)s) ds) dτ_z(y).
pub fn weil_residual(sys: &dyn SemidirectSystem, z: usize, phi: &dyn Fn(&[f64]) -> f64) -> Result<WeilResult> {
    let m = meta(sys)?;
    let info = orbit(sys, z)?;
    let lhs = integrate_h(sys, &|h: &[f64]| phi(h) / sys.alpha(h), None);
    let section = m.section;
    let rhs = match &info.stabilizer {
        Stabilizer::Trivial { mass } => mass * integrate_region(&|y: &[f64]| phi(&section(y)), &info.region),
        Stabilizer::Compact(c) | Stabilizer::Noncompact(c) => {
            let inner = |y: &[f64]| {
                let hy = section(y);
                let g = |s: f64| phi(&h_mul(sys, &hy, &(c.embed)(s))) * c.haar_density;
                integrate_adaptive(&g, c.domain, ABS * 1e-2, REL * 1e-1)
            };
            integrate_region(&inner, &info.region)
        }
    };
    Ok(WeilResult { lhs, rhs, residual: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MackeyResult {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// ∫_Y ψ dy against Σ_z λ_z ∫ ψ dτ_z.
pub fn mackey_residual(sys: &dyn SemidirectSystem, psi: &dyn Fn(&[f64]) -> f64) -> Result<MackeyResult> {
    let m = meta(sys)?;
    let lhs = integrate_region(psi, &m.y_domain);
    let rhs: f64 = m.orbits.iter().map(|o| o.lambda_weight * integrate_region(psi, &o.region)).sum();
    Ok(MackeyResult { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// |∫φ(h⁻¹[y])dτ_z − α(h)⁻¹∫φ dτ_z|
pub fn tau_invariance_residual(sys: &dyn SemidirectSystem, z: usize, h: &[f64], phi: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let info = orbit(sys, z)?;
    let hi = h_inv(sys, h);
    let lhs = integrate_region(&|y: &[f64]| phi(&apply_n(sys, &hi, y)), &info.region);
    let rhs = integrate_region(phi, &info.region) / sys.alpha(h);
    Ok((lhs - rhs).abs())
}

/// |∫φ(h⁻¹.x)dμ_z − β(h)∫φ dμ_z| with μ_z = ∫ ν_y dτ_z(y); the fiber integrals use `resolution`.
pub fn mu_z_residual(sys: &dyn SemidirectSystem, z: usize, h: &[f64], phi: &dyn Fn(&[f64]) -> f64, resolution: usize) -> Result<f64> {
    let info = orbit(sys, z)?;
    let hi = h_inv(sys, h);
    let fiber_int = |y: &[f64], moved: bool| -> f64 {
        match fiber_quadrature(sys, y, resolution) {
            Ok(fib) => fib.integrate_real(|x| if moved { phi(&apply_d(sys, &hi, x)) } else { phi(x) }),
            Err(_) => 0.0,
        }
    };
    let tol = (1e-12, 1e-9);
    let lhs = integrate_nested(&|y: &[f64]| fiber_int(y, true), &info.region, tol.0, tol.1);
    let rhs = sys.beta(h) * integrate_nested(&|y: &[f64]| fiber_int(y, false), &info.region, tol.0, tol.1);
    Ok((lhs - rhs).abs())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SectionCheck {
    pub samples: usize,
    pub max_section_residual: f64,
    pub label_mismatches: usize,
}

/// h(y)[o(π(y))] = y and π(h[y]) = π(y) over sampled y = Φ(x).
pub fn section_consistency(sys: &dyn SemidirectSystem, samples: usize, seed: u64) -> Result<SectionCheck> {
    let m = meta(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut mism = 0;
    for _ in 0..samples {
        let y = phi_of(sys, &sample_x(sys, &mut rng));
        let z = (m.label_of)(&y).ok_or_else(|| Error::Domain(format!("no orbit label for {y:?}")))?;
        let back = apply_n(sys, &(m.section)(&y), &m.orbits[z].origin);
        let r = norm(&back.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>()) / (1.0 + norm(&y));
        worst = worst.max(r);
        let h = sample_h(sys, &mut rng, 1.5);
        if (m.label_of)(&apply_n(sys, &h, &y)) != Some(z) {
            mism += 1;
        }
    }
    Ok(SectionCheck { samples, max_section_residual: worst, label_mismatches: mism })
}

/// |vol(H_{h[y0]}) Δ_G(h) − vol(H_{y0})| for a compact stabilizer.
pub fn volume_covariance_residual(sys: &dyn SemidirectSystem, z: usize, h: &[f64], probe: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let o = orbit(sys, z)?.origin.clone();
    let v0 = stabilizer_volume_at(sys, z, &o, probe)?;
    let v1 = stabilizer_volume_at(sys, z, &apply_n(sys, h, &o), probe)?;
    match (v0, v1) {
        (StabilizerVolume::Finite { volume: a }, StabilizerVolume::Finite { volume: b }) => {
            let dg = modular_g(sys, &GroupElement::dilation(sys, h.to_vec()));
            Ok((b * dg - a).abs())
        }
        _ => Err(Error::Precondition("stabilizer is not compact".into())),
    }
}
