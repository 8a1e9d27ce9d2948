//! Deterministic trajectories and thresholds of the process.
//!
//! With `D = (n−1)²`, `N = n²`, `r = 4` the scaled time is
//! `t = D^{1/3} i / N`, the open fraction is `q(t) = e^{−t³}`, the open count
//! follows `n² q` and each open pair's `d₂` follows `3 n^{2/3} t² q`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exact scaled time `(n−1)^{2/3} · i / n²`.
pub fn scaled_time<T: Real>(step: u64, n: usize) -> T {
    let nf = T::from_count(n as u64);
    let d = (nf - T::one()).max(T::zero());
    d.powf(T::lit(2.0 / 3.0)) * T::from_count(step) / (nf * nf)
}

/// `q(t) = e^{−t³}`.
#[inline]
pub fn open_fraction<T: Real>(t: T) -> T {
    (-t * t * t).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictedCurves<T> {
    pub q: T,
    /// `n² q`
    pub open: T,
    /// `3 n^{2/3} t² q`
    pub d2: T,
    /// `f(t) = n^{4/3 − 5ε³} e^{t³ + t}`
    pub envelope: T,
}

pub fn predicted_curves<T: Real>(n: usize, t: T, eps: T) -> PredictedCurves<T> {
    let nf = T::from_count(n as u64);
    let q = open_fraction(t);
    let three = T::lit(3.0);
    PredictedCurves {
        q,
        open: nf * nf * q,
        d2: three * nf.powf(T::lit(2.0 / 3.0)) * t * t * q,
        envelope: envelope(n, t, eps),
    }
}

/// `f(t) = n^{4/3 − 5ε³} e^{t³ + t}`.
pub fn envelope<T: Real>(n: usize, t: T, eps: T) -> T {
    let nf = T::from_count(n as u64);
    let e3 = eps * eps * eps;
    nf.powf(T::lit(4.0 / 3.0) - T::lit(5.0) * e3) * (t * t * t + t).exp()
}

/// Side of a tracked rectangle, `⌈2 ε^{-1} n^{2/3} (ln n)^{2/3}⌉` clamped to `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RectangleSide {
    pub alpha: usize,
    pub unclamped: usize,
    pub clamped: bool,
}

pub fn rectangle_side<T: Real>(n: usize, eps: T) -> RectangleSide {
    let nf = T::from_count(n as u64);
    let two_thirds = T::lit(2.0 / 3.0);
    let raw = T::lit(2.0) / eps * nf.powf(two_thirds) * nf.ln().max(T::zero()).powf(two_thirds);
    let unclamped = raw.ceil().to_usize().unwrap_or(usize::MAX).max(1);
    RectangleSide {
        alpha: unclamped.min(n),
        unclamped,
        clamped: unclamped > n,
    }
}

/// One-step changes of `Q_I` above `n^{2/3 − 12ε³}` feed `A_I`.
pub fn large_step_threshold<T: Real>(n: usize, eps: T) -> T {
    let e3 = eps * eps * eps;
    T::from_count(n as u64).powf(T::lit(2.0 / 3.0) - T::lit(12.0) * e3)
}

/// `n^{1 + 45ε³}`, the expected ceiling of `A_I`.
pub fn large_step_budget<T: Real>(n: usize, eps: T) -> T {
    let e3 = eps * eps * eps;
    T::from_count(n as u64).powf(T::one() + T::lit(45.0) * e3)
}

/// `n^{1/3 + 3ε³}`, the expected ceiling of every degree.
pub fn degree_ceiling<T: Real>(n: usize, eps: T) -> T {
    let e3 = eps * eps * eps;
    T::from_count(n as u64).powf(T::lit(1.0 / 3.0) + T::lit(3.0) * e3)
}

/// `2 ε^{-3} max{a + b, a b n^{−2/3 + 3ε³}}`, the expected ceiling of `e(A, B)`.
pub fn density_ceiling<T: Real>(n: usize, a: usize, b: usize, eps: T) -> T {
    let e3 = eps * eps * eps;
    let nf = T::from_count(n as u64);
    let (af, bf) = (T::from_count(a as u64), T::from_count(b as u64));
    let spread = af + bf;
    let dense = af * bf * nf.powf(T::lit(-2.0 / 3.0) + T::lit(3.0) * e3);
    T::lit(2.0) / e3 * spread.max(dense)
}

/// Shape of the Zarankiewicz bound `z(n, s) = O(n^{2 − 1/s})`, unit constant.
pub fn zarankiewicz_shape<T: Real>(n: usize, s: usize) -> T {
    T::from_count(n as u64).powf(T::lit(2.0) - T::one() / T::from_count(s as u64))
}

/// Curve shapes for `b(2, t)` with unit constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceCurves<T> {
    /// `(t / ln t)^{3/2}`: previous lower-bound shape.
    pub lower_previous: T,
    /// `t^{3/2} / ln t`: lower-bound shape witnessed by the process.
    pub lower_process: T,
    /// `(t / ln t)²`: upper-bound shape.
    pub upper: T,
}

impl<T> ReferenceCurves<T> {
    pub const LABEL: &'static str = "shape only; constants unspecified";
}

pub fn reference_bounds<T: Real>(t: T) -> Result<ReferenceCurves<T>> {
    if t.is_nan() || t < T::lit(2.0) {
        return Err(Error::InvalidArgument(format!("reference curves need t >= 2, got {t}")));
    }
    let l = t.ln();
    let ratio = t / l;
    Ok(ReferenceCurves {
        lower_previous: ratio.powf(T::lit(1.5)),
        lower_process: t.powf(T::lit(1.5)) / l,
        upper: ratio * ratio,
    })
}
