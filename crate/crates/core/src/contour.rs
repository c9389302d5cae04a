//! Quadrature discretization of the contour around the search interval.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use thiserror::Error;

pub const MAX_GAUSS_ORDER: usize = 64;
pub const DEFAULT_QUAD_NODES: usize = 8;
pub const DEFAULT_ASPECT: f64 = 1.0;
const POLE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("Gauss-Legendre order {0} outside 1..=64")]
    UnsupportedOrder(usize),
    #[error("aspect ratio {0} outside (0, 1]")]
    InvalidAspect(f64),
    #[error("invalid interval [{lo}, {hi}] with estimate {m_estimate}")]
    InvalidInterval { lo: f64, hi: f64, m_estimate: usize },
    #[error("evaluation point {0} lies on the contour")]
    PoleOnContour(f64),
}

/// `[lo, hi]` together with the eigencount estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
    pub m_estimate: usize,
}

impl SearchInterval {
    pub fn new(lo: f64, hi: f64, m_estimate: usize) -> Result<Self, ContourError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || m_estimate == 0 {
            return Err(ContourError::InvalidInterval { lo, hi, m_estimate });
        }
        Ok(Self { lo, hi, m_estimate })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Nodes and weights on the upper half of an ellipse symmetric about the
/// real axis. The lower half is implied by conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    pub half_contour: bool,
    pub aspect: f64,
    pub center: f64,
    pub radius: f64,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre points and weights on `[-1, 1]`, points ascending.
pub fn gauss_legendre(m: usize) -> Result<(Vec<f64>, Vec<f64>), ContourError> {
    if m == 0 || m > MAX_GAUSS_ORDER {
        return Err(ContourError::UnsupportedOrder(m));
    }
    let mut points = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[m - 1 - i] = x;
        points[i] = -x;
        weights[m - 1 - i] = w;
        weights[i] = w;
    }
    if m % 2 == 1 {
        points[m / 2] = 0.0;
    }
    Ok((points, weights))
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Upper half of the ellipse with semi-axes `r` and `aspect·r` around the
/// interval, `m` Gauss–Legendre nodes in the angle.
pub fn build_contour(iv: &SearchInterval, m: usize, aspect: f64) -> Result<Contour, ContourError> {
    if !(aspect > 0.0 && aspect <= 1.0) {
        return Err(ContourError::InvalidAspect(aspect));
    }
    let (t, gw) = gauss_legendre(m)?;
    let c = iv.center();
    let r = iv.radius();
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (tk, wk) in t.iter().zip(&gw) {
        let theta = FRAC_PI_2 * (1.0 + tk);
        let (s, co) = theta.sin_cos();
        nodes.push(C64::new(c + r * co, aspect * r * s));
        let dz = C64::new(-r * s, aspect * r * co);
        weights.push(dz * (wk * FRAC_PI_2));
    }
    Ok(Contour {
        nodes,
        weights,
        half_contour: true,
        aspect,
        center: c,
        radius: r,
    })
}

/// Value of the discretized indicator `(1/2πi)∮ dz/(z-λ)` at a real point,
/// i.e. the rational filter the solver applies to an eigenvalue `λ`.
///
/// The lower half contributes `-conj(w_k)/(conj(z_k)-λ)` (it is traversed
/// in the opposite direction), so the full sum is `Im(Σ w_k/(z_k-λ))/π`.
pub fn scalar_filter(contour: &Contour, lambda: f64) -> Result<f64, ContourError> {
    let mut s = C64::new(0.0, 0.0);
    for (z, w) in contour.nodes.iter().zip(&contour.weights) {
        let d = z - lambda;
        if d.norm() < POLE_TOL {
            return Err(ContourError::PoleOnContour(lambda));
        }
        s += w / d;
    }
    Ok(s.im / PI)
}
