use nalgebra::linalg::Schur;
use serde::{Deserialize, Serialize};

use super::{
    c, check_finite, check_square, op_norm, smallest_singular_subspace, CMatrix, CVector, C64,
};
use crate::error::Result;

/// Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

/// Multiplies `v` by a unit phase so that its largest-magnitude component
/// (first one on ties) is real and positive.
pub(crate) fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
        let phase = pivot.conj() / c(pivot.norm(), 0.0);
        *v *= phase;
    }
}

pub fn herm_eig(h: &super::HermitianOperator) -> HermEig {
    herm_eig_matrix(h.matrix())
}

pub(crate) fn herm_eig_matrix(m: &CMatrix) -> HermEig {
    let n = m.nrows();
    if n == 0 {
        return HermEig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<CVector> = order
        .iter()
        .map(|&k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            fix_phase(&mut v);
            v
        })
        .collect();
    HermEig {
        values,
        vectors: CMatrix::from_columns(&cols),
    }
}

/// Ascending eigenvalues of a matrix assumed Hermitian.
pub fn herm_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// A group of eigenvalues closer to each other than the clustering threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigCluster {
    pub indices: Vec<usize>,
    pub center: C64,
    /// Geometric multiplicity below the cluster size.
    pub defective: bool,
}

#[derive(Debug, Clone)]
pub struct GeneralEig {
    pub values: Vec<C64>,
    /// Unit right eigenvectors as columns. Inside a defective cluster these
    /// are not independent.
    pub vectors: CMatrix,
    /// Clusters with more than one member.
    pub clusters: Vec<EigCluster>,
    pub norm: f64,
}

impl GeneralEig {
    pub fn has_defective(&self) -> bool {
        self.clusters.iter().any(|cl| cl.defective)
    }

    /// The cluster containing eigenvalue `k`, if it is clustered.
    pub fn cluster_of(&self, k: usize) -> Option<&EigCluster> {
        self.clusters.iter().find(|cl| cl.indices.contains(&k))
    }
}

pub const DEFAULT_CLUSTER_REL: f64 = 1e-7;

/// Complex Schur based eigen-solver with clustering at the default threshold.
pub fn general_eig(m: &CMatrix) -> Result<GeneralEig> {
    general_eig_with(m, DEFAULT_CLUSTER_REL)
}

/// Groups indices whose values lie within `gap` of each other (single linkage).
pub(crate) fn cluster_indices(values: &[C64], gap: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if (values[a] - values[b]).norm() < gap {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for k in 0..n {
        let r = find(&mut parent, k);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(k);
    }
    groups
}

pub fn general_eig_with(m: &CMatrix, cluster_rel: f64) -> Result<GeneralEig> {
    let n = check_square(m)?;
    check_finite(m)?;
    let norm = op_norm(m)?;
    if n == 0 {
        return Ok(GeneralEig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
            clusters: vec![],
            norm,
        });
    }
    let (q, t) = Schur::new(m.clone()).unpack();
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();

    let small = (f64::EPSILON * norm).max(f64::MIN_POSITIVE);
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let mut y = CVector::zeros(n);
        y[k] = c(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C64 = ((j + 1)..=k).map(|l| t[(j, l)] * y[l]).sum();
            let mut denom = t[(j, j)] - values[k];
            if denom.norm() < small {
                denom = c(small, 0.0);
            }
            y[j] = -s / denom;
        }
        let mut x = &q * y;
        let xn = x.norm();
        x /= c(xn, 0.0);
        super::eig::fix_phase(&mut x);
        cols.push(x);
    }
    let vectors = CMatrix::from_columns(&cols);

    let gap = cluster_rel * norm.max(f64::MIN_POSITIVE);
    let null_tol = 10.0 * gap;
    let clusters = cluster_indices(&values, gap)
        .into_iter()
        .filter(|g| g.len() > 1)
        .map(|indices| {
            let center =
                indices.iter().map(|&k| values[k]).sum::<C64>() / c(indices.len() as f64, 0.0);
            let shifted = m - CMatrix::identity(n, n) * center;
            let (_, worst) = smallest_singular_subspace(&shifted, indices.len());
            EigCluster {
                defective: worst > null_tol,
                indices,
                center,
            }
        })
        .collect();
    Ok(GeneralEig {
        values,
        vectors,
        clusters,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted_re(v: &[C64]) -> Vec<f64> {
        let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn pauli_spectra() {
        let z = herm_eig(&HermitianOperator::new(pauli_z(), 1e-12).unwrap());
        assert_eq!(z.values, vec![-1.0, 1.0]);
        let x = herm_eig(&HermitianOperator::new(pauli_x(), 1e-12).unwrap());
        assert!((x.values[0] + 1.0).abs() < 1e-14 && (x.values[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = x.vectors.column(0);
        assert!((minus[0] - c(s, 0.0)).norm() < 1e-14 && (minus[1] - c(-s, 0.0)).norm() < 1e-14);
        let plus = x.vectors.column(1);
        assert!((plus[0] - c(s, 0.0)).norm() < 1e-14 && (plus[1] - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let g = CMatrix::from_fn(4, 4, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&g + g.adjoint()) * c(0.5, 0.0);
        let eig = herm_eig(&HermitianOperator::new(h.clone(), 1e-12).unwrap());
        let rebuilt = &eig.vectors * real_diag(&eig.values) * eig.vectors.adjoint();
        assert!(op_norm(&(&h - rebuilt)).unwrap() <= 1e-10 * op_norm(&h).unwrap());
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_general_spectrum() {
        let m = diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        let e = general_eig(&m).unwrap();
        for target in [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)] {
            assert!(e.values.iter().any(|z| (z - target).norm() < 1e-12));
        }
        assert!(e.clusters.is_empty());
        for k in 0..3 {
            let v = e.vectors.column(k).into_owned();
            assert!((&m * &v - &v * e.values[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn jordan_block_flagged_defective() {
        let e = general_eig(&matrix_unit(2, 0, 1)).unwrap();
        assert_eq!(sorted_re(&e.values), vec![0.0, 0.0]);
        assert_eq!(e.clusters.len(), 1);
        assert!(e.has_defective());
    }

    #[test]
    fn semisimple_double_eigenvalue_not_defective() {
        let e = general_eig(&real_diag(&[0.0, 0.0, -2.0])).unwrap();
        assert_eq!(e.clusters.len(), 1);
        assert!(!e.has_defective());
    }

    #[test]
    fn random_nonnormal_eigenpairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = CMatrix::from_fn(6, 6, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let e = general_eig(&m).unwrap();
        for k in 0..6 {
            let v = e.vectors.column(k).into_owned();
            assert!((&m * &v - &v * e.values[k]).norm() < 1e-9 * e.norm);
        }
    }
}
