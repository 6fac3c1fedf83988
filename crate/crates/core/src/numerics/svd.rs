//! One-sided Jacobi (Hestenes) singular value decomposition.
//!
//! The columns of the working matrix are orthogonalized in place by plane
//! rotations derived from 2×2 Gram blocks. Unlike Gram-matrix squaring, this
//! computes small singular values to near machine precision, which keeps
//! Schmidt-rank thresholds and nullspace rank cutoffs trustworthy.

use super::cmatrix::{C64, CMatrix};

/// Factorization `a = U · diag(σ) · V†` with σ descending. `u` is m×n with
/// orthonormal columns for every σ above roundoff (columns for σ ≈ 0 are
/// zero); `v` is n×n unitary.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

const MAX_SWEEPS: usize = 60;

/// Decompose an arbitrary complex matrix (no shape restrictions).
pub fn svd(a: &CMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    assert!(m > 0 && n > 0, "svd of an empty matrix");
    let mut work = a.clone();
    let mut v = CMatrix::identity(n);
    let scale = work.frobenius_norm();

    if scale > 0.0 {
        // Columns below the deflation threshold are numerically zero;
        // rotating them against live columns would never converge.
        let deflate_sq = (1e-15 * scale).powi(2);
        for _sweep in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotated |= orthogonalize_pair(&mut work, &mut v, p, q, deflate_sq);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    // Column norms are the singular values; sort descending.
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| work[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    norms.sort_by(|x, y| y.total_cmp(x));

    let u = CMatrix::from_fn(m, n, |i, j| {
        let col = order[j];
        if norms[j] > 0.0 {
            work[(i, col)] / norms[j]
        } else {
            C64::ZERO
        }
    });
    let v_sorted = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Svd { singular_values: norms, u, v: v_sorted }
}

/// Rotate columns p and q of the working matrix (and of v) so they become
/// orthogonal. Returns false when the pair already was, within tolerance,
/// or when either column is deflated (numerically zero).
fn orthogonalize_pair(
    work: &mut CMatrix,
    v: &mut CMatrix,
    p: usize,
    q: usize,
    deflate_sq: f64,
) -> bool {
    let m = work.rows();
    let mut app = 0.0f64;
    let mut aqq = 0.0f64;
    let mut apq = C64::ZERO;
    for i in 0..m {
        let wp = work[(i, p)];
        let wq = work[(i, q)];
        app += wp.norm_sqr();
        aqq += wq.norm_sqr();
        apq += wp.conj() * wq;
    }
    if app <= deflate_sq || aqq <= deflate_sq {
        return false;
    }
    let abs_apq = apq.norm();
    if abs_apq <= 1e-15 * (app * aqq).sqrt() {
        return false;
    }
    let phase = apq / abs_apq;

    // Same plane rotation as the Hermitian Jacobi step, applied to the
    // implicit Gram block [[app, apq], [apq*, aqq]].
    let tau = (app - aqq) / (2.0 * abs_apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sf = phase * s;
    let sb = phase.conj() * s;

    for i in 0..m {
        let wp = work[(i, p)];
        let wq = work[(i, q)];
        work[(i, p)] = wp * c + wq * sb;
        work[(i, q)] = wq * c - wp * sf;
    }
    let n = v.rows();
    for i in 0..n {
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * c + vq * sb;
        v[(i, q)] = vq * c - vp * sf;
    }
    true
}

/// Singular values only, descending, truncated to min(rows, cols).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    // Fewer columns means fewer rotation pairs; work on the transpose when wide.
    let dec = if a.cols() > a.rows() { svd(&a.transpose()) } else { svd(a) };
    let k = a.rows().min(a.cols());
    dec.singular_values.into_iter().take(k).collect()
}
