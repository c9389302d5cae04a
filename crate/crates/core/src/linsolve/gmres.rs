//! Restarted GMRES with modified Gram–Schmidt Arnoldi and Givens rotations.

use num_complex::Complex64 as C64;

use super::{ColumnReport, LinSolveConfig, LinSolveError, Preconditioner, ShiftedOperator};
use crate::dense::{axpy, dot, norm2};

/// Right-preconditioner hook; only the identity is provided.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[C64]) -> Vec<C64> {
        r.to_vec()
    }
}

fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::new(0.0, 0.0), a);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn, C64::new(bn, 0.0));
    }
    let rho = an.hypot(bn);
    let phase = a / an;
    (an / rho, phase * b.conj() / rho, phase * rho)
}

/// Solves `op x = rhs` from `x0` (zero when absent).
pub fn gmres_solve(
    op: &ShiftedOperator<'_>,
    rhs: &[C64],
    cfg: &LinSolveConfig,
    x0: Option<&[C64]>,
) -> Result<(Vec<C64>, ColumnReport), LinSolveError> {
    gmres_solve_preconditioned(op, rhs, cfg, x0, &IdentityPreconditioner)
}

pub fn gmres_solve_preconditioned(
    op: &ShiftedOperator<'_>,
    rhs: &[C64],
    cfg: &LinSolveConfig,
    x0: Option<&[C64]>,
    precond: &dyn Preconditioner,
) -> Result<(Vec<C64>, ColumnReport), LinSolveError> {
    let n = op.n();
    if rhs.len() != n {
        return Err(LinSolveError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if rhs.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(LinSolveError::ZeroRhs);
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != n => {
            return Err(LinSolveError::DimensionMismatch {
                expected: n,
                got: x0.len(),
            })
        }
        Some(x0) => x0.to_vec(),
        None => vec![C64::new(0.0, 0.0); n],
    };
    let max_iters = cfg.max_iters_for(n);
    let restart = cfg.restart.max(1).min(n.max(1));

    let true_residual = |x: &[C64]| -> f64 {
        let ax = op.apply(x);
        ax.iter()
            .zip(rhs)
            .map(|(a, b)| (b - a).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let beta0 = true_residual(&x);
    if beta0 == 0.0 {
        return Ok((x, ColumnReport::exact()));
    }

    let mut total = 0usize;
    let mut cycles: Vec<Vec<f64>> = Vec::new();
    let mut rel;
    let mut v: Vec<Vec<C64>> = Vec::with_capacity(restart + 1);
    let mut h = vec![vec![C64::new(0.0, 0.0); restart + 1]; restart];
    let mut cs = vec![0.0f64; restart];
    let mut sn = vec![C64::new(0.0, 0.0); restart];
    let mut g = vec![C64::new(0.0, 0.0); restart + 1];

    loop {
        let ax = op.apply(&x);
        let r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm2(&r);
        rel = beta / beta0;
        let mut history = vec![rel];
        if rel <= cfg.tol || total >= max_iters {
            cycles.push(history);
            break;
        }

        v.clear();
        v.push(r.iter().map(|z| z / beta).collect());
        g.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        g[0] = C64::new(beta, 0.0);
        let mut k = 0;
        let mut breakdown = false;
        for j in 0..restart {
            if total >= max_iters {
                break;
            }
            let z = precond.apply(&v[j]);
            let mut w = op.apply(&z);
            let col = &mut h[j];
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(vi, &w);
                axpy(-hij, vi, &mut w);
                col[i] = hij;
            }
            let hnext = norm2(&w);
            col[j + 1] = C64::new(hnext, 0.0);
            for i in 0..j {
                let (a, b) = (col[i], col[i + 1]);
                col[i] = a * cs[i] + sn[i] * b;
                col[i + 1] = -sn[i].conj() * a + b * cs[i];
            }
            let (c, s, r_jj) = givens(col[j], col[j + 1]);
            cs[j] = c;
            sn[j] = s;
            col[j] = r_jj;
            col[j + 1] = C64::new(0.0, 0.0);
            let gj = g[j];
            g[j] = gj * c;
            g[j + 1] = -s.conj() * gj;

            total += 1;
            k = j + 1;
            let est = g[j + 1].norm() / beta0;
            history.push(est);
            if hnext <= f64::EPSILON * beta * 1e-3 {
                breakdown = true;
                break;
            }
            if est <= cfg.tol {
                break;
            }
            v.push(w.iter().map(|z| z / hnext).collect());
        }
        cycles.push(history);
        if k == 0 {
            break;
        }

        // Back substitution on the rotated Hessenberg system.
        let mut y = vec![C64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
                s -= h[l][i] * yl;
            }
            y[i] = s / h[i][i];
        }
        let mut update = vec![C64::new(0.0, 0.0); n];
        for (vi, yi) in v.iter().zip(&y) {
            axpy(*yi, vi, &mut update);
        }
        let update = precond.apply(&update);
        for (xi, ui) in x.iter_mut().zip(&update) {
            *xi += ui;
        }

        if breakdown {
            let after = true_residual(&x) / beta0;
            if after > cfg.tol && after >= rel {
                return Err(LinSolveError::Breakdown { iteration: total });
            }
        }
    }

    let achieved = true_residual(&x) / beta0;
    Ok((
        x,
        ColumnReport {
            iterations: total,
            residual: achieved,
            converged: achieved <= cfg.tol,
            history: cycles,
        },
    ))
}
