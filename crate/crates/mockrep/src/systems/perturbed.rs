//! A built-in system whose Φ is shifted by c·x₁ in the first component.
//! Used to confirm that validation catches a broken intertwining map.

use crate::system::{ChartAxis, SemidirectSystem, SystemRef};

pub struct PerturbedPhi {
    base: SystemRef,
    coeff: f64,
}

impl PerturbedPhi {
    pub fn new(base: SystemRef, coeff: f64) -> Self {
        PerturbedPhi { base, coeff }
    }
}

impl SemidirectSystem for PerturbedPhi {
    fn id(&self) -> String {
        format!("{}+phi_x1({})", self.base.id(), self.coeff)
    }
    fn n(&self) -> usize {
        self.base.n()
    }
    fn d(&self) -> usize {
        self.base.d()
    }
    fn chart(&self) -> Vec<ChartAxis> {
        self.base.chart()
    }
    fn act_n(&self, h: &[f64], y: &[f64], out: &mut [f64]) {
        self.base.act_n(h, y, out)
    }
    fn act_d(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        self.base.act_d(h, x, out)
    }
    fn alpha(&self, h: &[f64]) -> f64 {
        self.base.alpha(h)
    }
    fn beta(&self, h: &[f64]) -> f64 {
        self.base.beta(h)
    }
    fn delta_h(&self, h: &[f64]) -> f64 {
        self.base.delta_h(h)
    }
    fn haar_density(&self, h: &[f64]) -> f64 {
        self.base.haar_density(h)
    }
    fn h_compose(&self, h1: &[f64], h2: &[f64], out: &mut [f64]) {
        self.base.h_compose(h1, h2, out)
    }
    fn h_inverse(&self, h: &[f64], out: &mut [f64]) {
        self.base.h_inverse(h, out)
    }
    fn h_identity(&self) -> Vec<f64> {
        self.base.h_identity()
    }
    fn phi(&self, x: &[f64], out: &mut [f64]) {
        self.base.phi(x, out);
        out[0] += self.coeff * x[0];
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.base.in_domain(x)
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        self.base.sample_box()
    }
}
