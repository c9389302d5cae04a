use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::{
    read_matrix_market, synthesize_test_matrix, BMatrix, ClusterInfo, SparseHermitianPencil,
    TestMatrixKind,
};

use super::{Config, ExperimentError};

/// Pencil under study plus whatever its generator knows about the spectrum.
#[derive(Debug, Clone)]
pub struct Input {
    pub pencil: SparseHermitianPencil,
    pub planted: Option<Vec<f64>>,
    pub cluster: Option<ClusterInfo>,
}

/// `lo:hi:count` bands separated by commas; each band gets `count` values
/// drawn uniformly from `[lo, hi]`. Sorted ascending.
pub fn planted_bands(spec: &str, seed: u64) -> Result<Vec<f64>, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for band in spec.split(',') {
        let parts: Vec<&str> = band.trim().split(':').collect();
        let parsed = match parts.as_slice() {
            [lo, hi, c] => lo
                .trim()
                .parse::<f64>()
                .ok()
                .zip(hi.trim().parse::<f64>().ok())
                .zip(c.trim().parse::<usize>().ok()),
            _ => None,
        };
        let Some(((lo, hi), count)) = parsed.filter(|((lo, hi), _)| lo < hi) else {
            return Err(ExperimentError::Config(format!(
                "band '{band}': expected lo:hi:count with lo < hi"
            )));
        };
        out.extend((0..count).map(|_| rng.random_range(lo..hi)));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Reads `matrix`/`mass` Matrix Market paths or a `generator` with its
/// parameters. `gen_seed` defaults to `seed`.
pub fn load_input(cfg: &mut Config) -> Result<Input, ExperimentError> {
    if let Some(path) = cfg.opt_str("matrix") {
        let a = read_matrix_market(&path)?;
        let b = match cfg.opt_str("mass") {
            Some(p) => BMatrix::Sparse(read_matrix_market(&p)?),
            None => BMatrix::Identity(a.n()),
        };
        return Ok(Input {
            pencil: SparseHermitianPencil::new(a, b)?,
            planted: None,
            cluster: None,
        });
    }
    let seed = cfg.req_u64("seed")?;
    let gen_seed = cfg.u64_or("gen_seed", seed)?;
    let generator = cfg.req_str("generator")?;
    let kind = match generator.as_str() {
        "graph_laplacian" => TestMatrixKind::GraphLaplacian {
            n: cfg.req_usize("n")?,
            edge_density: cfg.f64_or("edge_density", 0.05)?,
        },
        "symmetric_spectrum" => TestMatrixKind::SymmetricSpectrum {
            n: cfg.req_usize("n")?,
        },
        "clustered_tridiagonal" => TestMatrixKind::ClusteredTridiagonal {
            n: cfg.req_usize("n")?,
            cluster_size: cfg.req_usize("cluster_size")?,
            cluster_gap: cfg.f64_or("cluster_gap", 1e-12)?,
        },
        "multifold" => TestMatrixKind::Multifold {
            n: cfg.req_usize("n")?,
            eigenvalue: cfg.f64_or("eigenvalue", 1.0)?,
            multiplicity: cfg.req_usize("multiplicity")?,
        },
        "diag_pencil" => TestMatrixKind::DiagPencil {
            n: cfg.req_usize("n")?,
            b_random_diag: cfg.bool_or("b_random_diag", true)?,
        },
        "planted" => {
            let bands = cfg.req_str("bands")?;
            let spectrum_seed = cfg.u64_or("spectrum_seed", gen_seed)?;
            TestMatrixKind::PlantedSpectrum {
                eigenvalues: planted_bands(&bands, spectrum_seed)?,
            }
        }
        other => {
            return Err(ExperimentError::Config(format!(
                "unknown generator {other}"
            )))
        }
    };
    let s = synthesize_test_matrix(&kind, gen_seed)?;
    Ok(Input {
        pencil: s.pencil,
        planted: s.planted,
        cluster: s.cluster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_are_seeded_and_bounded() {
        let v = planted_bands("2:8:5, 20:60:3", 4).unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v.iter().filter(|x| (2.0..8.0).contains(*x)).count(), 5);
        assert_eq!(v, planted_bands("2:8:5,20:60:3", 4).unwrap());
        assert!(planted_bands("8:2:5", 4).is_err());
        assert!(planted_bands("1:2", 4).is_err());
    }

    #[test]
    fn generator_from_config() {
        let mut c =
            Config::from_pairs(&[("seed", "1"), ("generator", "planted"), ("bands", "1:2:4")]);
        let inp = load_input(&mut c).unwrap();
        assert_eq!(inp.pencil.n(), 4);
        assert_eq!(inp.planted.unwrap().len(), 4);
        c.finish().unwrap();
        let mut c = Config::from_pairs(&[("seed", "1"), ("generator", "nope")]);
        assert!(load_input(&mut c).is_err());
    }
}
