//! The five built-in systems, their test fields and default grids.

pub mod dilrot2d;
pub mod heisenberg;
pub mod perturbed;
pub mod shearlet;
pub mod transdil2d;
pub mod wavelet1d;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::quadrature::{Rule1d, TensorRule};
use crate::system::SystemRef;
use crate::transform::{GroupGrid, HAxis, HGrid, InnerRule, YGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ExampleId {
    Wavelet1d,
    Heisenberg,
    Shearlet { gamma: f64 },
    Dilrot2d,
    Transdil2d,
}

impl ExampleId {
    pub const NAMES: [&'static str; 5] = ["wavelet1d", "heisenberg", "shearlet", "dilrot2d", "transdil2d"];

    /// `gamma` is only read for the shearlet and defaults to 1/2.
    pub fn parse(name: &str, gamma: Option<f64>) -> Result<Self> {
        let id = match name {
            "wavelet1d" => ExampleId::Wavelet1d,
            "heisenberg" => ExampleId::Heisenberg,
            "shearlet" => ExampleId::Shearlet { gamma: gamma.unwrap_or(0.5) },
            "dilrot2d" => ExampleId::Dilrot2d,
            "transdil2d" => ExampleId::Transdil2d,
            other => return Err(Error::Config(format!("unknown system `{other}` (expected one of {})", Self::NAMES.join(", ")))),
        };
        if let ExampleId::Shearlet { gamma } = id {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::Parameter(format!("shearlet needs gamma > 0, got {gamma}")));
            }
        }
        Ok(id)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExampleId::Wavelet1d => "wavelet1d",
            ExampleId::Heisenberg => "heisenberg",
            ExampleId::Shearlet { .. } => "shearlet",
            ExampleId::Dilrot2d => "dilrot2d",
            ExampleId::Transdil2d => "transdil2d",
        }
    }

    pub fn all_default() -> Vec<ExampleId> {
        vec![ExampleId::Wavelet1d, ExampleId::Heisenberg, ExampleId::Shearlet { gamma: 0.5 }, ExampleId::Dilrot2d, ExampleId::Transdil2d]
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::Shearlet { gamma } => write!(f, "shearlet(gamma={gamma})"),
            other => f.write_str(other.name()),
        }
    }
}

pub fn build_example(id: ExampleId) -> Result<SystemRef> {
    Ok(match id {
        ExampleId::Wavelet1d => Arc::new(wavelet1d::Wavelet1d::new()),
        ExampleId::Heisenberg => Arc::new(heisenberg::Heisenberg),
        ExampleId::Shearlet { gamma } => Arc::new(shearlet::Shearlet::new(gamma)?),
        ExampleId::Dilrot2d => Arc::new(dilrot2d::DilRot2d::new()),
        ExampleId::Transdil2d => Arc::new(transdil2d::TransDil2d::new()),
    })
}

/// Named input fields: `gaussian` (the example's Gaussian-class test signal) and `zero`.
pub fn named_f(id: ExampleId, name: &str) -> Result<Field> {
    match (name, id) {
        ("zero", _) => Ok(Field::zero()),
        ("gaussian", ExampleId::Wavelet1d) => Ok(wavelet1d::f_gaussian()),
        ("gaussian", ExampleId::Heisenberg) => Ok(heisenberg::f_gaussian()),
        ("gaussian", ExampleId::Shearlet { .. }) => Ok(shearlet::f_gaussian()),
        ("gaussian", ExampleId::Dilrot2d) => Ok(dilrot2d::f_ring()),
        ("gaussian", ExampleId::Transdil2d) => Ok(transdil2d::f_gaussian()),
        _ => Err(Error::Config(format!("unknown f_spec `{name}` for {id}"))),
    }
}

/// Named analysing vectors. `explicit` (alias `paper`) is the example's closed-form construction;
/// the shearlet also has `indicator` (same as `explicit`) and `smooth`.
pub fn named_eta(id: ExampleId, name: &str) -> Result<Field> {
    match (name, id) {
        ("zero", _) => Ok(Field::zero()),
        ("explicit" | "paper", ExampleId::Wavelet1d) => Ok(wavelet1d::eta_explicit()),
        ("explicit" | "paper" | "gaussian", ExampleId::Heisenberg) => Ok(heisenberg::eta_gaussian()),
        ("explicit" | "paper" | "indicator", ExampleId::Shearlet { .. }) => Ok(shearlet::eta_indicator()),
        ("smooth", ExampleId::Shearlet { .. }) => Ok(shearlet::eta_smooth()),
        ("explicit" | "paper", ExampleId::Dilrot2d) => Ok(dilrot2d::eta_explicit()),
        ("explicit" | "paper", ExampleId::Transdil2d) => Ok(transdil2d::eta_explicit()),
        _ => Err(Error::Config(format!("unknown eta_spec `{name}` for {id}"))),
    }
}

/// η used for reproduction runs. The shearlet indicator has jumps along curves,
/// which the finite translation grid cannot resolve, so its smooth sibling is used.
pub fn default_eta_name(id: ExampleId) -> &'static str {
    match id {
        ExampleId::Shearlet { .. } => "smooth",
        _ => "explicit",
    }
}

/// Everything needed for a transform run with documented defaults.
pub struct Setup {
    pub id: ExampleId,
    pub sys: SystemRef,
    pub f: Field,
    pub eta: Field,
    pub quad: InnerRule,
    pub grid: GroupGrid,
    pub ygrid: Option<YGrid>,
}

pub fn default_setup(id: ExampleId) -> Result<Setup> {
    let sys = build_example(id)?;
    let s = sys.as_ref();
    let (quad, a, h) = match id {
        ExampleId::Wavelet1d => (wavelet1d::inner_rule(s), wavelet1d::agrid(), wavelet1d::hgrid(s)),
        ExampleId::Heisenberg => (heisenberg::inner_rule(s), heisenberg::agrid(1.0), heisenberg::hgrid(s)),
        ExampleId::Shearlet { .. } => (shearlet::inner_rule(s), shearlet::agrid(), shearlet::hgrid(s)),
        ExampleId::Dilrot2d => (dilrot2d::inner_rule(s), dilrot2d::agrid(), dilrot2d::hgrid(s)),
        ExampleId::Transdil2d => (transdil2d::inner_rule(s), transdil2d::agrid(), transdil2d::hgrid(s)),
    };
    Ok(Setup {
        id,
        f: named_f(id, "gaussian")?,
        eta: named_eta(id, default_eta_name(id))?,
        quad,
        grid: GroupGrid::new(a, h),
        ygrid: default_ygrid(id),
        sys,
    })
}

/// Y-grids for the density route, matched to the inner rules.
pub fn default_ygrid(id: ExampleId) -> Option<YGrid> {
    match id {
        ExampleId::Wavelet1d => Some(YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(384, -5.0, 6.5)]), 1, None, "Gauss-Legendre 384 on [-5,6.5]")),
        ExampleId::Heisenberg => None,
        ExampleId::Shearlet { .. } => Some(YGrid::tensor(
            &TensorRule::new(vec![Rule1d::gauss(64, -3.4, -0.02), Rule1d::gauss(76, -2.2, 2.2)]),
            2,
            None,
            "Gauss-Legendre 64 on [-3.4,-0.02] x 76 on [-2.2,2.2]",
        )),
        ExampleId::Dilrot2d => Some(YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(96, 0.16, 12.96)]), 32, None, "Gauss-Legendre 96 on [0.16,12.96], fibers of 32")),
        ExampleId::Transdil2d => Some(YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(48, 0.03, 1.47)]), 256, Some(12.0), "Gauss-Legendre 48 on [0.03,1.47], fibers GL 256 on [-12,12]")),
    }
}

/// Inputs of the fiber criterion at one base point.
pub struct CriterionSetup {
    pub y: Vec<f64>,
    pub tests: Vec<Field>,
    pub hgrid: HGrid,
    pub resolution: usize,
    pub radius: Option<f64>,
    /// element used for the transported-point check
    pub transport: Vec<f64>,
}

fn angular(label: String, modes: Vec<(i32, Complex64)>) -> Field {
    Field::new(label, move |x| {
        let r = x[0].hypot(x[1]);
        let e = if r == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(x[0] / r, x[1] / r) };
        modes.iter().map(|&(n, c)| c * e.powi(n)).sum()
    })
}

fn hermite_function(k: usize) -> Field {
    Field::real(format!("hermite{k}"), move |x| {
        let s = x[0];
        let (mut h0, mut h1) = (1.0, 2.0 * s);
        if k == 0 {
            return (-0.5 * s * s).exp();
        }
        for j in 1..k {
            let h2 = 2.0 * s * h1 - 2.0 * j as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1 * (-0.5 * s * s).exp()
    })
}

pub fn criterion_setup(id: ExampleId) -> Result<CriterionSetup> {
    let sys = build_example(id)?;
    let s = sys.as_ref();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    Ok(match id {
        ExampleId::Wavelet1d => CriterionSetup {
            y: vec![1.0],
            tests: (0..8).map(|k| Field::new(format!("u{k}"), move |_| c(1.0 + k as f64, 0.5 * k as f64))).collect(),
            hgrid: HGrid::tensor(s, &[HAxis::LogGauss { lo: 1.0 / 256.0, hi: 256.0, count: 256 }])?,
            resolution: 1,
            radius: None,
            transport: vec![3.0],
        },
        ExampleId::Heisenberg => return Err(Error::Unsupported("heisenberg has no fibers: Φ is nowhere a submersion".into())),
        ExampleId::Shearlet { .. } => CriterionSetup {
            y: vec![-0.5, 0.0],
            tests: shearlet::fiber_test_vectors(),
            hgrid: shearlet::criterion_hgrid(s),
            resolution: 2,
            radius: None,
            transport: vec![0.7, 1.9],
        },
        ExampleId::Dilrot2d => {
            let sets: Vec<Vec<(i32, Complex64)>> = vec![
                vec![(0, c(1.0, 0.0))],
                vec![(1, c(1.0, 0.0))],
                vec![(-1, c(0.0, 1.0))],
                vec![(2, c(1.0, 0.0)), (-2, c(0.5, 0.0))],
                vec![(3, c(1.0, -1.0))],
                vec![(4, c(1.0, 0.0)), (-4, c(0.0, -1.0))],
                vec![(0, c(1.0, 0.0)), (1, c(0.5, 0.0)), (-2, c(0.3, 0.0))],
                vec![(-3, c(2.0, 0.0)), (2, c(0.0, 1.0)), (0, c(-1.0, 0.0))],
            ];
            CriterionSetup {
                y: vec![1.0],
                tests: sets.into_iter().enumerate().map(|(i, m)| angular(format!("modes{i}"), m)).collect(),
                hgrid: HGrid::tensor(s, &[HAxis::Log { lo: 1.0 / 64.0, hi: 64.0, count: 192 }, HAxis::Periodic { count: 16 }])?,
                resolution: 32,
                radius: None,
                transport: vec![1.7, 0.9],
            }
        }
        ExampleId::Transdil2d => CriterionSetup {
            y: vec![1.0],
            tests: (0..8).map(hermite_function).collect(),
            hgrid: HGrid::tensor(s, &[HAxis::Log { lo: 1.0 / 64.0, hi: 4096.0, count: 168 }, HAxis::Uniform { lo: -12.0, hi: 12.0, count: 192 }])?,
            resolution: 256,
            radius: Some(12.0),
            transport: vec![-2.5, 0.5],
        },
    })
}
