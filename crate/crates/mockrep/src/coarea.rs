//! Fiber measures ν_y = (fiber volume element)/JΦ and the disintegration identities.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::quadrature::{pairwise_sum, pairwise_sum_c, TensorRule};
use crate::system::{apply_d, apply_n, h_inv, norm, phi_of, SemidirectSystem};
use crate::transform::YGrid;
use rayon::prelude::*;
use num_complex::Complex64;
use serde::Serialize;

/// Truncation radius for unbounded fibers. For Gaussian-class integrands
/// e^{-|x|²} the discarded tail is below erfc(12) ≈ 1e-64.
pub const DEFAULT_FIBER_RADIUS: f64 = 12.0;

#[derive(Debug, Clone, Serialize)]
pub struct FiberMeasure {
    pub y: Vec<f64>,
    pub d: usize,
    /// flat, `len() * d`
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub chart_desc: String,
    pub truncation: Option<f64>,
}

impl FiberMeasure {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.d..(i + 1) * self.d]
    }

    pub fn mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        let v: Vec<Complex64> = (0..self.len()).map(|i| f(self.node(i)) * self.weights[i]).collect();
        pairwise_sum_c(&v)
    }

    pub fn integrate_real(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let v: Vec<f64> = (0..self.len()).map(|i| f(self.node(i)) * self.weights[i]).collect();
        pairwise_sum(&v)
    }

    /// max ‖Φ(node) − y‖
    pub fn membership_residual(&self, sys: &dyn SemidirectSystem) -> f64 {
        (0..self.len())
            .map(|i| {
                let p = phi_of(sys, self.node(i));
                norm(&p.iter().zip(&self.y).map(|(a, b)| a - b).collect::<Vec<_>>())
            })
            .fold(0.0, f64::max)
    }
}

pub fn fiber_quadrature(sys: &dyn SemidirectSystem, y: &[f64], resolution: usize) -> Result<FiberMeasure> {
    fiber_quadrature_with(sys, y, resolution, Some(DEFAULT_FIBER_RADIUS))
}

pub fn fiber_quadrature_with(sys: &dyn SemidirectSystem, y: &[f64], resolution: usize, radius: Option<f64>) -> Result<FiberMeasure> {
    if y.len() != sys.n() || !sys.in_y(y) {
        return Err(Error::Domain(format!("{:?} is not a point of Y for {}", y, sys.id())));
    }
    if resolution == 0 {
        return Err(Error::Parameter("fiber resolution must be positive".into()));
    }
    sys.fiber(y, resolution, radius)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoareaResult {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// ∫_X f dx against ∫_Y (∫ f dν_y) dy. `xrule` integrates over X, `ygrid` over Y
/// and carries the fiber resolution and truncation.
pub fn coarea_residual(sys: &dyn SemidirectSystem, f: &Field, xrule: &TensorRule, ygrid: &YGrid) -> Result<CoareaResult> {
    let d = sys.d();
    let mut x = vec![0.0; d];
    let lv: Vec<f64> = (0..xrule.len())
        .map(|i| {
            let w = xrule.point(i, &mut x);
            if sys.in_domain(&x) {
                w * f.eval(&x).re
            } else {
                0.0
            }
        })
        .collect();
    let lhs = pairwise_sum(&lv);
    let n = ygrid.n;
    let rv: Vec<f64> = (0..ygrid.len())
        .into_par_iter()
        .map(|i| {
            let y = &ygrid.points[i * n..(i + 1) * n];
            if !sys.in_y(y) {
                return Ok(0.0);
            }
            let fib = fiber_quadrature_with(sys, y, ygrid.fiber_resolution, ygrid.fiber_radius)?;
            Ok(ygrid.weights[i] * fib.integrate_real(|p| f.eval(p).re))
        })
        .collect::<Result<Vec<f64>>>()?;
    let rhs = pairwise_sum(&rv);
    Ok(CoareaResult { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// |∫φ(h⁻¹.x)dν_{h[y]} − α(h)β(h)∫φ dν_y|
pub fn covariance_residual(sys: &dyn SemidirectSystem, y: &[f64], h: &[f64], phi: &Field, resolution: usize) -> Result<f64> {
    let hy = apply_n(sys, h, y);
    let hi = h_inv(sys, h);
    let moved = fiber_quadrature(sys, &hy, resolution)?;
    let base = fiber_quadrature(sys, y, resolution)?;
    let lhs = moved.integrate(|x| phi.eval(&apply_d(sys, &hi, x)));
    let rhs = base.integrate(|x| phi.eval(x)) * (sys.alpha(h) * sys.beta(h));
    Ok((lhs - rhs).norm())
}

/// ω_h(y) = ∫ f(x) conj(η(h⁻¹.x)) dν_y(x)
pub fn omega_density(sys: &dyn SemidirectSystem, f: &Field, eta: &Field, h: &[f64], fiber: &FiberMeasure) -> Complex64 {
    let hi = h_inv(sys, h);
    let mut buf = vec![0.0; sys.d()];
    let v: Vec<Complex64> = (0..fiber.len())
        .map(|i| {
            let x = fiber.node(i);
            sys.act_d(&hi, x, &mut buf);
            f.eval(x) * eta.eval(&buf).conj() * fiber.weights[i]
        })
        .collect();
    pairwise_sum_c(&v)
}
