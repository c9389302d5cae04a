//! Property suites over the module invariants. Shared by the `properties`
//! test target and the acceptance runner.

#![allow(dead_code)]

use feast_core::contour::{build_contour, scalar_filter, SearchInterval};
use feast_core::dense::{
    cholesky_posdef_check, generalized_eigensolve, hermitian_eigensolve, principal_angle,
    rank_revealing_basis, DenseMatrix,
};
use feast_core::feast::{
    build_subspace, residual_bound, trace_change, trace_criterion, FeastConfig, FeastError,
    FeastSolver, RankStrategy, RitzSet, StartingBasis,
};
use feast_core::linsolve::{direct_dense_solve, gmres_solve, LinSolveConfig, ShiftedOperator};
use feast_core::multi::{solve_partitioned, Partition};
use feast_core::sparse::{
    parse_matrix_market, synthesize_test_matrix, write_matrix_market_to, SparseHermitianPencil,
    SparseMatrixCsr, TestMatrixKind,
};
use feast_core::C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const CASES: u32 = 64;

pub struct Suite {
    pub name: &'static str,
    pub run: fn(u32) -> Result<(), String>,
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(r: &mut ChaCha8Rng, rows: usize, cols: usize, complex: bool) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = r.sample(StandardNormal);
        let im: f64 = if complex {
            r.sample(StandardNormal)
        } else {
            0.0
        };
        C64::new(re, im)
    })
}

fn random_hermitian(r: &mut ChaCha8Rng, n: usize, complex: bool) -> DenseMatrix {
    let g = gauss(r, n, n, complex);
    let mut h = g.clone();
    let gh = g.adjoint();
    for j in 0..n {
        for i in 0..n {
            h[(i, j)] = (g[(i, j)] + gh[(i, j)]) * 0.5;
        }
    }
    h
}

fn diag_pencil(d: &[f64]) -> SparseHermitianPencil {
    SparseHermitianPencil::standard(SparseMatrixCsr::from_diag(d)).unwrap()
}

fn unit_columns(n: usize, idx: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(n, idx.len(), |i, j| {
        if i == idx[j] {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Diagonal spectrum with `m` values inside `[-inner, inner]` (of the
/// interval `[-1, 1]`) and the rest at `outer_lo <= |λ| <= outer_hi`.
fn split_spectrum(
    r: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    inner: f64,
    outer_lo: f64,
    outer_hi: f64,
) -> (Vec<f64>, Vec<usize>) {
    let mut d: Vec<f64> = (0..m).map(|_| r.random_range(-inner..inner)).collect();
    for k in m..n {
        let x = r.random_range(outer_lo..outer_hi);
        d.push(if k % 2 == 0 { x } else { -x });
    }
    let inside = (0..m).collect();
    (d, inside)
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn ok_or_fail<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| fail(e.to_string()))
}

// ---- contour

/// Nodes and weights for `[lo, hi]` are the affine image of those for `[-1, 1]`.
pub fn contour_affine_covariance(cases: u32) -> Result<(), String> {
    let s = (-50.0f64..50.0, 1e-3f64..40.0, 1usize..=64, 0.05f64..=1.0);
    check(cases, s, |(c, r, m, aspect)| {
        let unit = ok_or_fail(build_contour(
            &SearchInterval::new(-1.0, 1.0, 1).unwrap(),
            m,
            aspect,
        ))?;
        let iv = ok_or_fail(SearchInterval::new(c - r, c + r, 1))?;
        let mapped = ok_or_fail(build_contour(&iv, m, aspect))?;
        let scale = c.abs() + r;
        for k in 0..m {
            let z = unit.nodes[k] * iv.radius() + iv.center();
            prop_assert!((mapped.nodes[k] - z).norm() <= 1e-13 * scale, "node {k}");
            let w = unit.weights[k] * iv.radius();
            prop_assert!(
                (mapped.weights[k] - w).norm() <= 1e-13 * r.max(1.0),
                "weight {k}"
            );
        }
        Ok(())
    })
}

/// Filter within 1e-8 of the indicator at m = 32, at least 5% of the width
/// from the boundary.
pub fn filter_limit(cases: u32) -> Result<(), String> {
    let s = (0.05f64..0.5, any::<bool>(), 0.05f64..3.0);
    check(cases, s, |(inside_frac, outside, away)| {
        let iv = SearchInterval::new(0.0, 1.0, 1).unwrap();
        let c = build_contour(&iv, 32, 1.0).unwrap();
        let (lam, target) = if outside {
            (1.0 + away, 0.0)
        } else {
            (inside_frac, 1.0)
        };
        let f = ok_or_fail(scalar_filter(&c, lam))?;
        prop_assert!((f - target).abs() <= 1e-8, "λ = {lam}: filter {f}");
        Ok(())
    })
}

/// Real symmetric pencils give a numerically real subspace on the complex
/// assembly path.
pub fn real_subspace(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 6usize..30, 1usize..4),
        |(seed, n, m)| {
            let mut r = rng(seed);
            let a = random_hermitian(&mut r, n, false);
            let pencil =
                SparseHermitianPencil::standard(SparseMatrixCsr::from_dense(&a).unwrap()).unwrap();
            let mut cfg = FeastConfig::new(SearchInterval::new(-1.0, 1.0, m).unwrap());
            cfg.force_complex = true;
            let solver = ok_or_fail(FeastSolver::new(&pencil, cfg))?;
            let y = gauss(&mut r, n, m, false);
            let (u, _) = ok_or_fail(solver.build_subspace(&y))?;
            prop_assert!(u.max_imag_abs() <= 1e-12 * u.frobenius_norm());
            Ok(())
        },
    )
}

// ---- dense

pub fn generalized_matches_standard(cases: u32) -> Result<(), String> {
    check(cases, (any::<u64>(), any::<bool>()), |(seed, complex)| {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, 10, complex);
        let std = ok_or_fail(hermitian_eigensolve(&a))?;
        let gen = ok_or_fail(generalized_eigensolve(
            &a,
            &DenseMatrix::identity(10),
            1e-12,
        ))?;
        prop_assert_eq!(gen.values.len(), 10);
        for (x, y) in gen.values.iter().zip(&std.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-12 * a.max_abs().max(1.0), "{x} vs {y}");
        }
        Ok(())
    })
}

pub fn rank_reveal_contract(cases: u32) -> Result<(), String> {
    let s = (
        any::<u64>(),
        8usize..40,
        1usize..8,
        0usize..8,
        any::<bool>(),
    );
    check(cases, s, |(seed, n, r_true, extra, complex)| {
        let mut r = rng(seed);
        let cols = (r_true + extra).min(n);
        let u = gauss(&mut r, n, r_true.min(cols), complex).matmul(&gauss(
            &mut r,
            r_true.min(cols),
            cols,
            complex,
        ));
        let tol = 1e-8;
        let rr = ok_or_fail(rank_revealing_basis(&u, tol))?;
        prop_assert_eq!(rr.rank, r_true.min(cols));
        let q = &rr.basis;
        prop_assert!(
            q.adjoint_mul(q)
                .sub(&DenseMatrix::identity(rr.rank))
                .max_abs()
                <= 1e-12
        );
        let resid = u.sub(&q.matmul(&q.adjoint_mul(&u))).frobenius_norm();
        let smax = rr.singular_values[0];
        prop_assert!(resid <= tol * smax * (cols as f64).sqrt(), "{resid}");
        Ok(())
    })
}

/// Symmetric in its arguments and invariant under invertible mixing.
pub fn principal_angle_invariance(cases: u32) -> Result<(), String> {
    let s = (any::<u64>(), 6usize..30, 1usize..5, any::<bool>());
    check(cases, s, |(seed, n, k, complex)| {
        let mut r = rng(seed);
        let x1 = gauss(&mut r, n, k, complex);
        let x2 = x1.sub(&gauss(&mut r, n, k, complex).matmul(&DenseMatrix::identity(k)));
        let x2 = {
            // Mix of a nearby and a random subspace so angles cover (0°, 90°).
            let mut m = x2;
            m.scale(C64::new(r.random_range(0.01..1.0), 0.0));
            m.sub(&x1)
        };
        let a12 = ok_or_fail(principal_angle(&x1, &x2))?;
        let a21 = ok_or_fail(principal_angle(&x2, &x1))?;
        prop_assert!((a12 - a21).abs() <= 1e-9, "{a12} vs {a21}");
        let mut mix1 = gauss(&mut r, k, k, complex);
        let mut mix2 = gauss(&mut r, k, k, complex);
        for j in 0..k {
            mix1[(j, j)] += C64::new(4.0, 0.0);
            mix2[(j, j)] += C64::new(4.0, 0.0);
        }
        let b = ok_or_fail(principal_angle(&x1.matmul(&mix1), &x2.matmul(&mix2)))?;
        prop_assert!((a12 - b).abs() <= 1e-8 * a12.max(1.0), "{a12} vs {b}");
        let self_angle = ok_or_fail(principal_angle(&x1, &x1.matmul(&mix1)))?;
        prop_assert!(self_angle <= 1e-6);
        Ok(())
    })
}

/// The Cholesky probe rejects Gram matrices of rank-deficient blocks.
pub fn rank_strategies_agree(cases: u32) -> Result<(), String> {
    let s = (
        any::<u64>(),
        10usize..40,
        1usize..6,
        1usize..6,
        any::<bool>(),
    );
    check(cases, s, |(seed, n, r_true, deficit, complex)| {
        let mut r = rng(seed);
        let cols = r_true + deficit;
        let u = gauss(&mut r, n, r_true, complex).matmul(&gauss(&mut r, r_true, cols, complex));
        let rr = ok_or_fail(rank_revealing_basis(&u, 1e-8))?;
        prop_assert!(rr.rank < cols);
        prop_assert!(!cholesky_posdef_check(&u.adjoint_mul(&u)));
        Ok(())
    })
}

// ---- sparse

fn random_sparse(
    r: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    hermitian: bool,
    complex: bool,
) -> SparseMatrixCsr {
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if hermitian && j > i {
                continue;
            }
            if i == j || r.random_bool(density) {
                let re: f64 = r.sample(StandardNormal);
                let im: f64 = if complex && i != j {
                    r.sample(StandardNormal)
                } else {
                    0.0
                };
                t.push((i, j, C64::new(re, im)));
                if hermitian && i != j {
                    t.push((j, i, C64::new(re, -im)));
                }
            }
        }
    }
    SparseMatrixCsr::from_triplets(n, &t).unwrap()
}

pub fn spmv_unit_columns(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 1usize..=200, any::<bool>()),
        |(seed, n, complex)| {
            let mut r = rng(seed);
            let s = random_sparse(&mut r, n, 0.05, false, complex);
            let d = s.to_dense();
            for j in 0..n {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                let y = ok_or_fail(s.spmv(&e))?;
                prop_assert!(y.iter().zip(d.col(j)).all(|(a, b)| a == b), "column {j}");
            }
            Ok(())
        },
    )
}

pub fn matrix_market_round_trip(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 1usize..60, any::<bool>()),
        |(seed, n, complex)| {
            let mut r = rng(seed);
            let s = random_sparse(&mut r, n, 0.1, true, complex);
            let mut buf = Vec::new();
            ok_or_fail(write_matrix_market_to(&s, &mut buf))?;
            let back = ok_or_fail(parse_matrix_market(std::str::from_utf8(&buf).unwrap()))?;
            prop_assert_eq!(back, s);
            Ok(())
        },
    )
}

fn kind_strategy() -> impl Strategy<Value = TestMatrixKind> {
    prop_oneof![
        (5usize..80, 0.02f64..0.3)
            .prop_map(|(n, edge_density)| TestMatrixKind::GraphLaplacian { n, edge_density }),
        (1usize..80).prop_map(|n| TestMatrixKind::SymmetricSpectrum { n }),
        (20usize..80, 2usize..6, 1e-12f64..1e-6).prop_map(|(n, cluster_size, cluster_gap)| {
            TestMatrixKind::ClusteredTridiagonal {
                n,
                cluster_size,
                cluster_gap,
            }
        }),
        (10usize..60, -5.0f64..5.0).prop_map(|(n, eigenvalue)| TestMatrixKind::Multifold {
            n,
            eigenvalue,
            multiplicity: n / 3 + 1,
        }),
        (5usize..80, any::<bool>())
            .prop_map(|(n, b_random_diag)| TestMatrixKind::DiagPencil { n, b_random_diag }),
        prop::collection::vec(-10.0f64..10.0, 1..40)
            .prop_map(|eigenvalues| TestMatrixKind::PlantedSpectrum { eigenvalues }),
    ]
}

/// Same seed, same bits; every output is a Hermitian-definite pencil.
pub fn generators_reproducible_hermitian(cases: u32) -> Result<(), String> {
    check(cases, (kind_strategy(), any::<u64>()), |(kind, seed)| {
        let p1 = ok_or_fail(synthesize_test_matrix(&kind, seed))?;
        let p2 = ok_or_fail(synthesize_test_matrix(&kind, seed))?;
        prop_assert_eq!(p1.pencil.a(), p2.pencil.a());
        prop_assert_eq!(p1.pencil.b().to_csr(), p2.pencil.b().to_csr());
        prop_assert_eq!(&p1.planted, &p2.planted);
        prop_assert!(p1.pencil.a().is_hermitian(0.0));
        prop_assert!(p1.pencil.b().to_csr().is_hermitian(0.0));
        Ok(())
    })
}

// ---- linsolve

fn shifted_case(seed: u64, n: usize) -> (SparseHermitianPencil, C64, Vec<C64>) {
    let mut r = rng(seed);
    let complex = r.random_bool(0.5);
    let a = random_sparse(&mut r, n, 0.2, true, complex);
    let pencil = SparseHermitianPencil::standard(a).unwrap();
    let shift = C64::new(r.random_range(-2.0..2.0), r.random_range(0.05..2.0));
    let rhs = (0..n)
        .map(|_| C64::new(r.sample(StandardNormal), 0.0))
        .collect();
    (pencil, shift, rhs)
}

/// Residual estimates never increase within a restart cycle; the reported
/// residual equals a recomputation; repeated solves are bit-identical.
pub fn gmres_monotone_residual(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 4usize..60, 2usize..20),
        |(seed, n, restart)| {
            let (pencil, shift, rhs) = shifted_case(seed, n);
            let op = ShiftedOperator::new(&pencil, shift);
            let cfg = LinSolveConfig {
                restart,
                ..LinSolveConfig::gmres(1e-10)
            };
            let (x, rep) = ok_or_fail(gmres_solve(&op, &rhs, &cfg, None))?;
            for cycle in &rep.history {
                for w in cycle.windows(2) {
                    prop_assert!(w[1] <= w[0], "cycle {:?}", cycle);
                }
            }
            let ax = op.apply(&x);
            let num: f64 = ax
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let den: f64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(
                (rep.residual - num / den).abs() <= 1e-14,
                "{} vs {}",
                rep.residual,
                num / den
            );
            let (x2, rep2) = ok_or_fail(gmres_solve(&op, &rhs, &cfg, None))?;
            prop_assert!(x == x2 && rep == rep2);
            Ok(())
        },
    )
}

/// `V(z̄) = conj(V(z))` for real `A`, `B = I` and a real right-hand side.
pub fn conjugate_shift_symmetry(cases: u32) -> Result<(), String> {
    check(cases, (any::<u64>(), 2usize..40), |(seed, n)| {
        let mut r = rng(seed);
        let a = random_sparse(&mut r, n, 0.2, true, false);
        let pencil = SparseHermitianPencil::standard(a).unwrap();
        let z = C64::new(r.random_range(-2.0..2.0), r.random_range(0.05..2.0));
        let rhs = gauss(&mut r, n, 2, false);
        let v = ok_or_fail(direct_dense_solve(&ShiftedOperator::new(&pencil, z), &rhs))?;
        let w = ok_or_fail(direct_dense_solve(
            &ShiftedOperator::new(&pencil, z.conj()),
            &rhs,
        ))?;
        prop_assert!(w.sub(&v.conj()).max_abs() <= 1e-12 * v.max_abs().max(1.0));
        Ok(())
    })
}

// ---- feast

/// Two filter passes move the span by no more than the single-pass leakage,
/// i.e. the angle between the once-filtered span and the exact eigenspace.
/// Angles in radians.
pub fn projector_idempotence(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 20usize..60, 1usize..6),
        |(seed, n, m)| {
            let mut r = rng(seed);
            let (d, inside) = split_spectrum(&mut r, n, m, 0.5, 6.0, 40.0);
            let pencil = diag_pencil(&d);
            let iv = SearchInterval::new(-1.0, 1.0, m).unwrap();
            let contour = build_contour(&iv, 8, 1.0).unwrap();
            let y = gauss(&mut r, n, m, false);
            let lin = LinSolveConfig::default();
            let (u, _) = ok_or_fail(build_subspace(&pencil, &contour, &y, &lin))?;
            let (u2, _) = ok_or_fail(build_subspace(&pencil, &contour, &u, &lin))?;
            let exact = unit_columns(n, &inside);
            let rad = |a: &DenseMatrix, b: &DenseMatrix| principal_angle(a, b).map(f64::to_radians);
            let leak = ok_or_fail(rad(&u, &exact))?;
            let leak2 = ok_or_fail(rad(&u2, &exact))?;
            let moved = ok_or_fail(rad(&u, &u2))?;
            prop_assert!(leak <= 1e-6, "leakage {leak}");
            prop_assert!(
                moved <= leak + leak2 + 1e-13,
                "moved {moved}, leakage {leak}"
            );
            Ok(())
        },
    )
}

/// Exact start with direct solves: Ritz values exact after one iteration.
pub fn one_shot_exactness(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 10usize..60, 1usize..6),
        |(seed, n, m)| {
            let mut r = rng(seed);
            let (d, inside) = split_spectrum(&mut r, n, m, 0.9, 1.2, 10.0);
            let pencil = diag_pencil(&d);
            let mut cfg = FeastConfig::new(SearchInterval::new(-1.0, 1.0, m).unwrap());
            cfg.max_feast_iters = 1;
            let mut mix = gauss(&mut r, m, m, false);
            for j in 0..m {
                mix[(j, j)] += C64::new(3.0, 0.0);
            }
            let y = unit_columns(n, &inside).matmul(&mix);
            let out = ok_or_fail(
                FeastSolver::new(&pencil, cfg).and_then(|s| s.solve(&StartingBasis::user(y)?)),
            )?;
            let mut got = out.ritz.in_interval_values();
            got.sort_by(f64::total_cmp);
            let mut want: Vec<f64> = d[..m].to_vec();
            want.sort_by(f64::total_cmp);
            prop_assert_eq!(got.len(), m);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() <= 1e-10, "{g} vs {w}");
            }
            Ok(())
        },
    )
}

/// Angle to the exact eigenspace never grows (1e-10° slack) for M̃ >= M.
pub fn monotone_filter_effect(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 20usize..60, 1usize..6, 0usize..4),
        |(seed, n, m, extra)| {
            let mut r = rng(seed);
            let (d, inside) = split_spectrum(&mut r, n, m, 0.8, 1.3, 5.0);
            let pencil = diag_pencil(&d);
            let mut cfg = FeastConfig::new(SearchInterval::new(-1.0, 1.0, m + extra).unwrap());
            cfg.max_feast_iters = 6;
            cfg.stop_on_convergence = false;
            let solver = ok_or_fail(FeastSolver::new(&pencil, cfg))?
                .with_reference(unit_columns(n, &inside));
            let out = ok_or_fail(solver.solve(&StartingBasis::random(n, m + extra, seed)))?;
            let angles: Vec<f64> = out
                .trace
                .records
                .iter()
                .filter_map(|r| r.angle_to_reference)
                .collect();
            prop_assert_eq!(angles.len(), out.trace.len());
            for w in angles.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-10, "{:?}", angles);
            }
            Ok(())
        },
    )
}

/// With M̃ > M the revealed rank equals the enclosed count.
pub fn revealed_rank_is_count(cases: u32) -> Result<(), String> {
    check(
        cases,
        (any::<u64>(), 30usize..60, 1usize..8, 1usize..8),
        |(seed, n, m, extra)| {
            let mut r = rng(seed);
            let (d, _) = split_spectrum(&mut r, n, m, 0.5, 4.0, 20.0);
            let pencil = diag_pencil(&d);
            let mut cfg = FeastConfig::new(SearchInterval::new(-1.0, 1.0, m + extra).unwrap());
            cfg.rank_strategy = RankStrategy::SvdReveal { tol: 1e-6 };
            cfg.max_feast_iters = 1;
            let out = ok_or_fail(
                FeastSolver::new(&pencil, cfg)
                    .and_then(|s| s.solve(&StartingBasis::random(n, m + extra, seed))),
            )?;
            prop_assert_eq!(out.trace.records[0].revealed_rank, Some(m));
            Ok(())
        },
    )
}

/// Degenerate inputs of the stopping tests.
pub fn criterion_degenerate_cases(cases: u32) -> Result<(), String> {
    let s = (-1e6f64..1e6, 1e-300f64..1.0, 1usize..10_000, 1e-20f64..1e-3);
    check(cases, s, |(t, tol, n, eps)| {
        // Unchanged trace always fires; a (near-)zero trace is degenerate.
        if t.abs() >= 1e-300 {
            prop_assert!(ok_or_fail(trace_criterion(t, t, tol))?);
            prop_assert_eq!(ok_or_fail(trace_change(t, t))?, 0.0);
        }
        prop_assert!(matches!(
            trace_change(0.0, t),
            Err(FeastError::DegenerateDenominator)
        ));
        prop_assert!(matches!(
            trace_change(1e-301, t),
            Err(FeastError::DegenerateDenominator)
        ));
        // Sign flip of the whole trace is a relative change of 2.
        if t != 0.0 {
            prop_assert!((ok_or_fail(trace_change(t, -t))? - 2.0).abs() <= 1e-15);
        }
        // Zero interval scale is rejected unless a floor is given.
        let iv = SearchInterval {
            lo: 0.0,
            hi: 0.0,
            m_estimate: 1,
        };
        prop_assert!(matches!(
            residual_bound(&iv, n, eps, None),
            Err(FeastError::ZeroScale)
        ));
        let floored = ok_or_fail(residual_bound(&iv, n, eps, Some(2.0)))?;
        prop_assert!((floored - 2.0 * eps * n as f64).abs() <= 1e-15 * floored);
        // The bound is symmetric in the interval sign and linear in eps·n.
        let a = t.abs().max(1e-3);
        let b1 = ok_or_fail(residual_bound(
            &SearchInterval::new(-a, a / 2.0, 1).unwrap(),
            n,
            eps,
            None,
        ))?;
        let b2 = ok_or_fail(residual_bound(
            &SearchInterval::new(-a / 2.0, a, 1).unwrap(),
            n,
            eps,
            None,
        ))?;
        prop_assert!((b1 - b2).abs() <= 1e-15 * b1);
        prop_assert!((b1 - eps * n as f64 * a).abs() <= 1e-14 * b1);
        // No in-interval pairs: the residual test has nothing to accept.
        let ritz = RitzSet {
            values: vec![t],
            vectors: DenseMatrix::zeros(1, 1),
            residuals: vec![0.0],
            in_interval: vec![false],
            converged: vec![false],
        };
        let flags = ok_or_fail(feast_core::feast::residual_criterion(
            &ritz,
            &SearchInterval::new(-1.0, 1.0, 1).unwrap(),
            n,
            eps,
            None,
        ))?;
        prop_assert_eq!(flags, vec![false]);
        Ok(())
    })
}

// ---- multi

/// Global orthogonality dominates the local levels, equals it for K = 1,
/// merged counts never exceed the local counts, provenance is a function.
pub fn partition_merge(cases: u32) -> Result<(), String> {
    check(cases, (any::<u64>(), 1usize..5), |(seed, k)| {
        let mut r = rng(seed);
        let n = 40;
        let mut d: Vec<f64> = (0..12).map(|_| r.random_range(0.0..1.0)).collect();
        d.extend((12..n).map(|i| {
            if i % 2 == 0 {
                r.random_range(3.0..8.0)
            } else {
                r.random_range(-8.0..-2.0)
            }
        }));
        let pencil = diag_pencil(&d);
        let part = ok_or_fail(Partition::uniform(-0.05, 1.05, k, 12))?;
        let template = FeastConfig::new(SearchInterval::new(-0.05, 1.05, 1).unwrap());
        let merged = ok_or_fail(solve_partitioned(&pencil, &part, &template, seed))?;
        prop_assert!(merged.orth_global >= merged.max_orth_local());
        if k == 1 {
            prop_assert_eq!(merged.orth_global, merged.orth_local[0]);
        }
        let local_total: usize = merged
            .runs
            .iter()
            .map(|r| r.ritz.as_ref().map_or(0, |x| x.in_interval_count()))
            .sum();
        prop_assert!(merged.len() <= local_total);
        prop_assert_eq!(merged.provenance.len(), merged.len());
        for (i, &p) in merged.provenance.iter().enumerate() {
            prop_assert!(p < k);
            let iv = merged.runs[p].interval;
            prop_assert!(iv.contains(merged.values[i]));
        }
        Ok(())
    })
}

pub fn all() -> Vec<Suite> {
    vec![
        Suite {
            name: "contour_affine_covariance",
            run: contour_affine_covariance,
        },
        Suite {
            name: "real_subspace",
            run: real_subspace,
        },
        Suite {
            name: "generalized_matches_standard",
            run: generalized_matches_standard,
        },
        Suite {
            name: "rank_reveal_contract",
            run: rank_reveal_contract,
        },
        Suite {
            name: "principal_angle_invariance",
            run: principal_angle_invariance,
        },
        Suite {
            name: "rank_strategies_agree",
            run: rank_strategies_agree,
        },
        Suite {
            name: "spmv_unit_columns",
            run: spmv_unit_columns,
        },
        Suite {
            name: "matrix_market_round_trip",
            run: matrix_market_round_trip,
        },
        Suite {
            name: "generators_reproducible_hermitian",
            run: generators_reproducible_hermitian,
        },
        Suite {
            name: "gmres_monotone_residual",
            run: gmres_monotone_residual,
        },
        Suite {
            name: "conjugate_shift_symmetry",
            run: conjugate_shift_symmetry,
        },
        Suite {
            name: "projector_idempotence",
            run: projector_idempotence,
        },
        Suite {
            name: "one_shot_exactness",
            run: one_shot_exactness,
        },
        Suite {
            name: "monotone_filter_effect",
            run: monotone_filter_effect,
        },
        Suite {
            name: "revealed_rank_is_count",
            run: revealed_rank_is_count,
        },
        Suite {
            name: "criterion_degenerate_cases",
            run: criterion_degenerate_cases,
        },
        Suite {
            name: "partition_merge",
            run: partition_merge,
        },
    ]
}
