use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Lipschitz function on a closed interval `[lower, upper]` (`upper` may be
/// `+∞`), with its Lipschitz constant `K` and sup norm `‖f‖∞`.
///
/// Arguments outside the interval are clamped to the nearest endpoint.
#[derive(Clone)]
pub struct FunctionDescriptor {
    lower: f64,
    upper: f64,
    lipschitz: f64,
    sup_norm: f64,
    label: String,
    evaluator: Evaluator,
}

impl fmt::Debug for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionDescriptor")
            .field("label", &self.label)
            .field("domain", &(self.lower, self.upper))
            .field("lipschitz", &self.lipschitz)
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

impl FunctionDescriptor {
    pub fn new(
        label: impl Into<String>,
        lower: f64,
        upper: f64,
        lipschitz: f64,
        sup_norm: f64,
        evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY {
            return Err(Error::InvalidParameter(format!(
                "[{lower}, {upper}] is not a valid domain"
            )));
        }
        if !(lipschitz >= 0.0 && sup_norm >= 0.0 && lipschitz.is_finite() && sup_norm.is_finite()) {
            return Err(Error::InvalidParameter(
                "Lipschitz constant and sup norm must be finite and ≥ 0".into(),
            ));
        }
        Ok(Self {
            lower,
            upper,
            lipschitz,
            sup_norm,
            label: label.into(),
            evaluator: Arc::new(evaluator),
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(
            format!("const({c})"),
            f64::NEG_INFINITY,
            f64::INFINITY,
            0.0,
            c.abs(),
            move |_| c,
        )
        .expect("constant function is valid")
    }

    /// `x^m` on `[−radius, radius]`: `‖f‖∞ = radius^m`, `K = m·radius^{m−1}`.
    pub fn power(m: u32, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius {radius} must be positive")));
        }
        let k = if m == 0 {
            0.0
        } else {
            f64::from(m) * radius.powi(m as i32 - 1)
        };
        Self::new(format!("x^{m}"), -radius, radius, k, radius.powi(m as i32), move |x| {
            x.powi(m as i32)
        })
    }

    /// `e^{−x·rate}` on `[lower, ∞)` with `rate ≥ 0`: `‖f‖∞ = e^{−lower·rate}`,
    /// `K = rate·e^{−lower·rate}`.
    pub fn decay(rate: f64, lower: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite() && lower.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bad decay rate {rate} or bound {lower}"
            )));
        }
        let top = (-lower * rate).exp();
        Self::new(
            format!("exp(-{rate}x)"),
            lower,
            f64::INFINITY,
            rate * top,
            top,
            move |x| (-x * rate).exp(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    /// `f(clamp(x))`.
    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(self.clamp(x))
    }

    /// Checks `|f(x) − f(y)| ≤ K|x − y|` and `|f(x)| ≤ ‖f‖∞` on random points of
    /// the domain intersected with `[−window, window]`.
    pub fn spot_check(&self, samples: usize, window: f64, seed: u64) -> Result<()> {
        let lo = self.lower.max(-window);
        let hi = self.upper.min(window);
        if lo > hi {
            return Ok(());
        }
        let slack = |v: f64| 1e-12 * v.abs().max(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = lo + (hi - lo) * rng.random::<f64>();
            let y = lo + (hi - lo) * rng.random::<f64>();
            let (fx, fy) = (self.eval(x), self.eval(y));
            if fx.abs() > self.sup_norm + slack(self.sup_norm) {
                return Err(Error::InvalidParameter(format!(
                    "{}: |f({x})| = {} exceeds the sup norm {}",
                    self.label,
                    fx.abs(),
                    self.sup_norm
                )));
            }
            let bound = self.lipschitz * (x - y).abs();
            if (fx - fy).abs() > bound + slack(bound) {
                return Err(Error::InvalidParameter(format!(
                    "{}: Lipschitz constant {} violated between {x} and {y}",
                    self.label, self.lipschitz
                )));
            }
        }
        Ok(())
    }
}
