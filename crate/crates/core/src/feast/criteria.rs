use crate::contour::SearchInterval;

use super::{FeastError, RitzSet};

const TINY_TRACE: f64 = 1e-300;

/// `|trace_k - trace_prev| / |trace_k|`, or `DegenerateDenominator` when
/// `|trace_k| < 1e-300`.
pub fn trace_change(trace_k: f64, trace_prev: f64) -> Result<f64, FeastError> {
    if trace_k.abs() < TINY_TRACE {
        return Err(FeastError::DegenerateDenominator);
    }
    Ok((trace_k - trace_prev).abs() / trace_k.abs())
}

/// Relative trace change below `tol`.
pub fn trace_criterion(trace_k: f64, trace_prev: f64, tol: f64) -> Result<bool, FeastError> {
    Ok(trace_change(trace_k, trace_prev)? < tol)
}

/// `eps · n · max(max(|lo|, |hi|), floor)`.
pub fn residual_bound(
    interval: &SearchInterval,
    n: usize,
    eps: f64,
    floor: Option<f64>,
) -> Result<f64, FeastError> {
    let scale = interval
        .lo
        .abs()
        .max(interval.hi.abs())
        .max(floor.unwrap_or(0.0));
    if scale == 0.0 {
        return Err(FeastError::ZeroScale);
    }
    Ok(eps * n as f64 * scale)
}

/// Per-pair flags: in the interval and residual within the bound.
pub fn residual_criterion(
    ritz: &RitzSet,
    interval: &SearchInterval,
    n: usize,
    eps: f64,
    floor: Option<f64>,
) -> Result<Vec<bool>, FeastError> {
    let bound = residual_bound(interval, n, eps, floor)?;
    Ok(ritz
        .residuals
        .iter()
        .zip(&ritz.in_interval)
        .map(|(&r, &inside)| inside && r <= bound)
        .collect())
}
