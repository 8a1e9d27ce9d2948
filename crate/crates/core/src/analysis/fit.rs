//! Least-squares power-law fits on `(ln n, ln value)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub slope: T,
    pub intercept: T,
    /// Euclidean norm of the residuals in log space.
    pub residual_norm: T,
    pub points: usize,
}

impl<T: Real> FitResult<T> {
    /// Fitted `value` at `n`.
    pub fn predict(&self, n: T) -> T {
        (self.intercept + self.slope * n.ln()).exp()
    }
}

pub fn fit_exponent<T: Real>(points: &[(T, T)]) -> Result<FitResult<T>> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, v)) = points.iter().find(|&&(n, v)| !(n > T::zero() && v > T::zero())) {
        return Err(Error::InvalidArgument(format!(
            "fit points must be positive, got ({n}, {v})"
        )));
    }
    let k = T::from_count(points.len() as u64);
    let logs: Vec<(T, T)> = points.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let mx = logs.iter().fold(T::zero(), |s, p| s + p.0) / k;
    let my = logs.iter().fold(T::zero(), |s, p| s + p.1) / k;
    let sxx = logs.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
    let sxy = logs.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
    if sxx == T::zero() {
        return Err(Error::InvalidArgument("fit needs at least two distinct n".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = logs.iter().fold(T::zero(), |s, &(x, y)| {
        let r = y - (intercept + slope * x);
        s + r * r
    });
    Ok(FitResult {
        slope,
        intercept,
        residual_norm: rss.sqrt(),
        points: points.len(),
    })
}
