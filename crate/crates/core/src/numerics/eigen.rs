//! Eigendecomposition of Hermitian matrices by cyclic complex Jacobi rotations.
//!
//! Jacobi is quadratically convergent and delivers small eigenvalues to high
//! accuracy, which matters here: positive-semidefiniteness verdicts hang on
//! the sign of eigenvalues near zero.

use super::cmatrix::{C64, CMatrix};

/// Eigenvalues (ascending) and matching eigenvectors (columns) of a
/// Hermitian matrix, so that `a = V · diag(λ) · V†`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

const MAX_SWEEPS: usize = 60;

/// Diagonalize a Hermitian matrix.
///
/// Tiny Hermiticity violations are symmetrized away before the sweep so that
/// rounding in upstream arithmetic cannot bias the rotations.
pub fn eigh(a: &CMatrix) -> EigenDecomposition {
    assert!(a.is_square(), "eigh requires a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate_pair(&mut m, &mut v, p, q, tol);
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    EigenDecomposition { values, vectors }
}

/// Zero m[(p,q)] with the plane unitary R = [[c, −s·e^{iβ}], [s·e^{−iβ}, c]]
/// where m[(p,q)] = ∣m[(p,q)]∣·e^{iβ}: m ← R†·m·R, v ← v·R.
fn rotate_pair(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, tol: f64) {
    let n = m.rows();
    let apq = m[(p, q)];
    let abs_apq = apq.norm();
    if abs_apq <= tol / (n as f64) {
        m[(p, q)] = C64::ZERO;
        m[(q, p)] = C64::ZERO;
        return;
    }
    let phase = apq / abs_apq;

    // tan(2t) = 2∣apq∣/(app − aqq); smaller-angle root for stability.
    let tau = (m[(p, p)].re - m[(q, q)].re) / (2.0 * abs_apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sf = phase * s; // s·e^{iβ}
    let sb = phase.conj() * s; // s·e^{−iβ}

    // m ← m·R  (columns p, q).
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c + mkq * sb;
        m[(k, q)] = mkq * c - mkp * sf;
    }
    // m ← R†·m  (rows p, q).
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c + mqk * sf;
        m[(q, k)] = mqk * c - mpk * sb;
    }
    // v ← v·R.
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * sb;
        v[(k, q)] = vkq * c - vkp * sf;
    }

    m[(p, q)] = C64::ZERO;
    m[(q, p)] = C64::ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
}
