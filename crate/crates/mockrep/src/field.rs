use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

pub type EvalFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A complex-valued function on a subset of ℝᵈ, evaluated pointwise.
#[derive(Clone)]
pub struct Field {
    eval: Arc<EvalFn>,
    pub label: String,
    /// Box outside of which the field is negligible (below 1e-14 relative).
    pub support_hint: Option<Vec<(f64, f64)>>,
    pub norm_hint: Option<f64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("label", &self.label)
            .field("support_hint", &self.support_hint)
            .field("norm_hint", &self.norm_hint)
            .finish()
    }
}

impl Field {
    pub fn new(label: impl Into<String>, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Field { eval: Arc::new(f), label: label.into(), support_hint: None, norm_hint: None }
    }

    pub fn real(label: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Field::new(label, move |x| Complex64::new(f(x), 0.0))
    }

    pub fn zero() -> Self {
        let mut z = Field::new("zero", |_| Complex64::new(0.0, 0.0));
        z.norm_hint = Some(0.0);
        z
    }

    pub fn with_support(mut self, b: Vec<(f64, f64)>) -> Self {
        self.support_hint = Some(b);
        self
    }

    pub fn with_norm(mut self, n: f64) -> Self {
        self.norm_hint = Some(n);
        self
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.eval)(x)
    }

    pub fn scaled(&self, c: f64) -> Field {
        let inner = self.clone();
        let mut out = Field::new(format!("{}*{}", c, self.label), move |x| inner.eval(x) * c);
        out.support_hint = self.support_hint.clone();
        out.norm_hint = self.norm_hint.map(|n| n * c.abs());
        out
    }

    pub fn is_zero_hint(&self) -> bool {
        self.norm_hint == Some(0.0)
    }
}
