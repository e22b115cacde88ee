//! Symmetric tridiagonal eigensolver (implicit-shift QL with eigenvectors).
//!
//! The sourced and approximating Hamiltonians couple occupation states only
//! through the ground mode, so after grouping by the excited-mode tail every
//! block is tridiagonal. Solving those blocks directly skips the dense
//! Householder phase entirely; correctness is pinned against nalgebra's
//! dense solver in the tests.

use crate::error::{Error, Result};

pub(crate) struct TridiagEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// vectors[j] is the unit eigenvector for values[j].
    pub vectors: Vec<Vec<f64>>,
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (off[i] couples i and i+1).
pub(crate) fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n-1");
    if n == 1 {
        return Ok(TridiagEigen {
            values: vec![diag[0]],
            vectors: vec![vec![1.0]],
        });
    }

    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z[k][j]: row k, column j; columns become eigenvectors.
    let mut z = vec![vec![0.0f64; n]; n];
    for (k, row) in z.iter_mut().enumerate() {
        row[k] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    iterations: 60,
                    context: "tridiagonal QL sweep".into(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut aborted = false;
            let mut i = m - 1;
            loop {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    aborted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zk in z.iter_mut() {
                    let f = zk[i + 1];
                    zk[i + 1] = s * zk[i] + c * f;
                    zk[i] = c * zk[i] - s * f;
                }
                if i == l {
                    break;
                }
                i -= 1;
            }
            if aborted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order
        .iter()
        .map(|&j| z.iter().map(|row| row[j]).collect())
        .collect();
    Ok(TridiagEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    /// xorshift, deterministic across runs
    struct Rng(u64);
    impl Rng {
        fn next_f64(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        }
    }

    #[test]
    fn single_element() {
        let r = eigh_tridiagonal(&[3.5], &[]).unwrap();
        assert_eq!(r.values, vec![3.5]);
        assert_eq!(r.vectors, vec![vec![1.0]]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[0, t], [t, 1]]: lambda = 1/2 -+ sqrt(1/4 + t^2)
        let t = 0.7;
        let r = eigh_tridiagonal(&[0.0, 1.0], &[t]).unwrap();
        let disc = (0.25f64 + t * t).sqrt();
        assert!((r.values[0] - (0.5 - disc)).abs() < 1e-14);
        assert!((r.values[1] - (0.5 + disc)).abs() < 1e-14);
    }

    #[test]
    fn matches_nalgebra_on_random_matrices() {
        let mut rng = Rng(0x9e3779b97f4a7c15);
        for n in [2usize, 3, 5, 11, 24, 40] {
            let diag: Vec<f64> = (0..n).map(|_| 3.0 * rng.next_f64()).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| 2.0 * rng.next_f64()).collect();
            let r = eigh_tridiagonal(&diag, &off).unwrap();

            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = diag[i];
                if i + 1 < n {
                    m[(i, i + 1)] = off[i];
                    m[(i + 1, i)] = off[i];
                }
            }
            let mut dense: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone())
                .eigenvalues
                .iter()
                .copied()
                .collect();
            dense.sort_by(f64::total_cmp);
            let scale = dense.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
            for (a, b) in r.values.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-12 * scale, "n={n}: {a} vs {b}");
            }
            // residual and normalization per eigenpair
            for (val, vec) in r.values.iter().zip(&r.vectors) {
                let norm: f64 = vec.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-12);
                for i in 0..n {
                    let mut mv = diag[i] * vec[i];
                    if i > 0 {
                        mv += off[i - 1] * vec[i - 1];
                    }
                    if i + 1 < n {
                        mv += off[i] * vec[i + 1];
                    }
                    assert!((mv - val * vec[i]).abs() < 1e-11 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn zero_coupling_is_diagonal() {
        let r = eigh_tridiagonal(&[2.0, -1.0, 0.5], &[0.0, 0.0]).unwrap();
        assert_eq!(r.values, vec![-1.0, 0.5, 2.0]);
    }
}
