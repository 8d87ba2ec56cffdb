//! Nonlinearity functions `f(n)` of the number operator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real function of the Fock index, `n -> f(n)`.
///
/// Cloning is cheap; the evaluator is shared.
#[derive(Clone)]
pub struct NonlinearFn {
    label: String,
    eval: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    unit: bool,
}

impl NonlinearFn {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.into(), eval: Arc::new(eval), unit: false }
    }

    /// `f ≡ 1`, the linear case.
    pub fn unit() -> Self {
        Self { label: "unit".into(), eval: Arc::new(|_| 1.0), unit: true }
    }

    /// `f(n) = 1/√(n+1)`.
    pub fn inv_sqrt() -> Self {
        Self::new("inv-sqrt", |n| 1.0 / ((n + 1) as f64).sqrt())
    }

    /// Look up one of the shipped nonlinearities by label.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "unit" => Some(Self::unit()),
            "inv-sqrt" => Some(Self::inv_sqrt()),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    #[inline]
    pub fn eval(&self, n: usize) -> f64 {
        (self.eval)(n)
    }

    /// Evaluate and reject zero or non-finite values.
    pub fn checked(&self, n: usize) -> Result<f64> {
        let v = self.eval(n);
        if !v.is_finite() {
            Err(Error::NonFiniteFactor { n })
        } else if v == 0.0 {
            Err(Error::ZeroFactorValue { n })
        } else {
            Ok(v)
        }
    }
}

impl fmt::Debug for NonlinearFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearFn").field("label", &self.label).finish()
    }
}

impl Default for NonlinearFn {
    fn default() -> Self {
        Self::unit()
    }
}
