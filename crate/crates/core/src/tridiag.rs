//! Eigendecomposition of real symmetric tridiagonal matrices.
//!
//! Implicit QL iteration with Wilkinson-style shifts, accumulating the plane
//! rotations into the eigenvector matrix (the classic `tql2`/`tqli` scheme).

use nalgebra::DMatrix;

const MAX_SWEEPS_PER_VALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct SymTridiagEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belongs to `values[i]`.
    pub vectors: DMatrix<f64>,
}

/// Diagonalize the symmetric tridiagonal matrix with main diagonal `diag`
/// and sub/super-diagonal `off` (`off.len() + 1 == diag.len()`).
///
/// Returns `None` if some eigenvalue fails to converge, which does not happen
/// for finite input in practice.
pub fn sym_tridiag_eigen(diag: &[f64], off: &[f64]) -> Option<SymTridiagEigen> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1), "off-diagonal length must be n - 1");
    let mut d = diag.to_vec();
    // e[i] couples rows i and i + 1; e[n - 1] is scratch.
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    let mut z = DMatrix::<f64>::identity(n, n);

    for l in 0..n {
        let mut sweeps = 0;
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
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_VALUE {
                return None;
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| z[(r, order[c])]);
    Some(SymTridiagEigen { values, vectors })
}
