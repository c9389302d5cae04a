//! Seeded generators for test pencils with known or partly known spectra.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BMatrix, SparseError, SparseHermitianPencil, SparseMatrixCsr};

/// Generator selection with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum TestMatrixKind {
    /// Weighted Erdős–Rényi graph Laplacian, `B = I`.
    GraphLaplacian { n: usize, edge_density: f64 },
    /// Spectrum `{±c_j}` (plus a zero when `n` is odd), `B = I`.
    SymmetricSpectrum { n: usize },
    /// Random tridiagonal matrix with a planted tight cluster, `B = I`.
    ClusteredTridiagonal {
        n: usize,
        cluster_size: usize,
        cluster_gap: f64,
    },
    /// `eigenvalue` with the given multiplicity, the remaining spectrum
    /// uniform random over `eigenvalue ± 2·max(1, |eigenvalue|)`, `B = I`.
    Multifold {
        n: usize,
        eigenvalue: f64,
        multiplicity: usize,
    },
    /// Normalized graph Laplacian with a random positive diagonal `B`
    /// (or `B = I` when `b_random_diag` is false).
    DiagPencil { n: usize, b_random_diag: bool },
    /// Exactly the given spectrum, `B = I`.
    PlantedSpectrum { eigenvalues: Vec<f64> },
}

/// Location of the planted cluster of a clustered tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterInfo {
    pub center: f64,
    /// Cluster eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Nearest eigenvalue of the remaining spectrum below the cluster.
    pub below: f64,
    /// Nearest eigenvalue of the remaining spectrum above the cluster.
    pub above: f64,
}

#[derive(Debug, Clone)]
pub struct SyntheticPencil {
    pub pencil: SparseHermitianPencil,
    /// Full spectrum, ascending, when the construction determines it.
    pub planted: Option<Vec<f64>>,
    pub cluster: Option<ClusterInfo>,
}

fn invalid(msg: impl Into<String>) -> SparseError {
    SparseError::InvalidParams(msg.into())
}

/// Builds the requested pencil; bit-reproducible for a fixed seed.
pub fn synthesize_test_matrix(
    kind: &TestMatrixKind,
    seed: u64,
) -> Result<SyntheticPencil, SparseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        &TestMatrixKind::GraphLaplacian { n, edge_density } => {
            if n < 2 || !(edge_density > 0.0 && edge_density <= 1.0) {
                return Err(invalid(
                    "graph_laplacian needs n >= 2 and 0 < edge_density <= 1",
                ));
            }
            let a = graph_laplacian(n, edge_density, false, &mut rng)?;
            Ok(SyntheticPencil {
                pencil: SparseHermitianPencil::standard(a)?,
                planted: None,
                cluster: None,
            })
        }
        &TestMatrixKind::SymmetricSpectrum { n } => {
            if n < 2 {
                return Err(invalid("symmetric_spectrum needs n >= 2"));
            }
            symmetric_spectrum(n, &mut rng)
        }
        &TestMatrixKind::ClusteredTridiagonal {
            n,
            cluster_size,
            cluster_gap,
        } => {
            if cluster_size < 2 || n < cluster_size + 10 {
                return Err(invalid(
                    "clustered_tridiagonal needs cluster_size >= 2 and n >= cluster_size + 10",
                ));
            }
            if !(cluster_gap > 0.0 && cluster_gap < 1e-2) {
                return Err(invalid("cluster_gap must lie in (0, 1e-2)"));
            }
            clustered_tridiagonal(n, cluster_size, cluster_gap, &mut rng)
        }
        &TestMatrixKind::Multifold {
            n,
            eigenvalue,
            multiplicity,
        } => {
            if multiplicity == 0 || multiplicity > n || !eigenvalue.is_finite() {
                return Err(invalid(
                    "multifold needs 1 <= multiplicity <= n and a finite eigenvalue",
                ));
            }
            let spread = 2.0 * eigenvalue.abs().max(1.0);
            let mut values = vec![eigenvalue; multiplicity];
            // Random placement: an evenly spaced set would be symmetric
            // about the multifold value and tie the filter on pairs.
            while values.len() < n {
                let x = eigenvalue + rng.random_range(-spread..spread);
                if (x - eigenvalue).abs() >= 1e-3 * spread {
                    values.push(x);
                }
            }
            values.sort_by(f64::total_cmp);
            planted_spectrum(&values, &mut rng)
        }
        &TestMatrixKind::DiagPencil { n, b_random_diag } => {
            if n < 2 {
                return Err(invalid("diag_pencil needs n >= 2"));
            }
            let density = (6.0 / (n - 1) as f64).min(1.0);
            let a = graph_laplacian(n, density, true, &mut rng)?;
            let b = if b_random_diag {
                let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
                BMatrix::Sparse(SparseMatrixCsr::from_diag(&d))
            } else {
                BMatrix::Identity(n)
            };
            Ok(SyntheticPencil {
                pencil: SparseHermitianPencil::new(a, b)?,
                planted: None,
                cluster: None,
            })
        }
        TestMatrixKind::PlantedSpectrum { eigenvalues } => {
            if eigenvalues.is_empty() || eigenvalues.iter().any(|v| !v.is_finite()) {
                return Err(invalid("planted spectrum must be nonempty and finite"));
            }
            planted_spectrum(eigenvalues, &mut rng)
        }
    }
}

/// `L = D - W`, optionally normalized to `I - D^{-1/2} W D^{-1/2}`.
fn graph_laplacian(
    n: usize,
    density: f64,
    normalized: bool,
    rng: &mut ChaCha8Rng,
) -> Result<SparseMatrixCsr, SparseError> {
    let mut edges = Vec::new();
    let mut degree = vec![0.0f64; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                let w: f64 = rng.random_range(0.5..1.5);
                edges.push((i, j, w));
                degree[i] += w;
                degree[j] += w;
            }
        }
    }
    let mut t = Vec::with_capacity(2 * edges.len() + n);
    for (i, &d) in degree.iter().enumerate() {
        let diag = if normalized {
            if d > 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            d
        };
        t.push((i, i, diag));
    }
    for &(i, j, w) in &edges {
        let v = if normalized {
            -w / (degree[i] * degree[j]).sqrt()
        } else {
            -w
        };
        t.push((i, j, v));
        t.push((j, i, v));
    }
    SparseMatrixCsr::from_real_triplets(n, &t)
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn symmetric_spectrum(n: usize, rng: &mut ChaCha8Rng) -> Result<SyntheticPencil, SparseError> {
    let perm = random_permutation(n, rng);
    let mut t = Vec::new();
    let mut values = Vec::with_capacity(n);
    for b in 0..n / 2 {
        let c: f64 = rng.random_range(0.1..1.0);
        let (i, j) = (perm[2 * b], perm[2 * b + 1]);
        t.push((i, j, c));
        t.push((j, i, c));
        values.push(c);
        values.push(-c);
    }
    if n % 2 == 1 {
        values.push(0.0);
    }
    values.sort_by(f64::total_cmp);
    let a = SparseMatrixCsr::from_real_triplets(n, &t)?;
    Ok(SyntheticPencil {
        pencil: SparseHermitianPencil::standard(a)?,
        planted: Some(values),
        cluster: None,
    })
}

/// Randomly paired eigenvalues placed in rotated 2x2 blocks, then
/// symmetrically permuted.
fn planted_spectrum(values: &[f64], rng: &mut ChaCha8Rng) -> Result<SyntheticPencil, SparseError> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let perm = random_permutation(n, rng);
    let mut t = Vec::with_capacity(2 * n);
    let mut k = 0;
    while k + 1 < n {
        let (a, b) = (values[order[k]], values[order[k + 1]]);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let (s, c) = phi.sin_cos();
        let (i, j) = (perm[k], perm[k + 1]);
        t.push((i, i, a * c * c + b * s * s));
        t.push((j, j, a * s * s + b * c * c));
        let off = (a - b) * c * s;
        t.push((i, j, off));
        t.push((j, i, off));
        k += 2;
    }
    if k < n {
        t.push((perm[k], perm[k], values[order[k]]));
    }
    let a = SparseMatrixCsr::from_real_triplets(n, &t)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(SyntheticPencil {
        pencil: SparseHermitianPencil::standard(a)?,
        planted: Some(sorted),
        cluster: None,
    })
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        if q.abs() < tiny {
            q = -tiny;
        }
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric tridiagonal matrix by bisection on
/// Sturm counts, ascending.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            while b - a > 2.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(d, e, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

fn clustered_tridiagonal(
    n: usize,
    k: usize,
    gap: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SyntheticPencil, SparseError> {
    let g = n - k;
    let gd: Vec<f64> = (0..g).map(|_| rng.random_range(-1.0..1.0)).collect();
    let ge: Vec<f64> = (0..g - 1).map(|_| rng.random_range(0.2..0.6)).collect();
    let generic = tridiagonal_eigenvalues(&gd, &ge);

    // Centre the cluster in the widest gap among the eigenvalues around the
    // 0.91 quantile so it stays isolated from the rest of the spectrum.
    let q = ((0.91 * g as f64) as usize).min(g - 2);
    let window = (g / 20).max(2);
    let lo_i = q.saturating_sub(window);
    let hi_i = (q + window).min(g - 1);
    let widest = (lo_i..hi_i)
        .max_by(|&i, &j| (generic[i + 1] - generic[i]).total_cmp(&(generic[j + 1] - generic[j])))
        .unwrap();
    let (below, above) = (generic[widest], generic[widest + 1]);
    let mu = 0.5 * (below + above);
    let delta = gap * mu.abs() * (k as f64 - 1.0) / 4.0;
    if 4.0 * delta >= 0.25 * (above - below) {
        return Err(invalid(
            "cluster_gap too wide for the generated spectrum gap",
        ));
    }

    let mut t = Vec::with_capacity(3 * n);
    for i in 0..g {
        t.push((i, i, gd[i]));
        if i + 1 < g {
            t.push((i, i + 1, ge[i]));
            t.push((i + 1, i, ge[i]));
        }
    }
    // Cluster block; the coupling to the generic block has size delta.
    for j in 0..k {
        let i = g + j;
        t.push((i, i, mu));
        t.push((i - 1, i, delta));
        t.push((i, i - 1, delta));
    }
    let a = SparseMatrixCsr::from_real_triplets(n, &t)?;

    let mut values: Vec<f64> = (1..=k)
        .map(|j| mu + 2.0 * delta * (j as f64 * std::f64::consts::PI / (k as f64 + 1.0)).cos())
        .collect();
    values.sort_by(f64::total_cmp);
    let mut all = generic;
    all.extend_from_slice(&values);
    all.sort_by(f64::total_cmp);
    Ok(SyntheticPencil {
        pencil: SparseHermitianPencil::standard(a)?,
        planted: Some(all),
        cluster: Some(ClusterInfo {
            center: mu,
            values,
            below,
            above,
        }),
    })
}
