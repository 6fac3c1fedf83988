//! Self-contained dense complex linear algebra.
//!
//! Schmidt/singular-value analysis, Gram matrices, the real-linear geometry
//! of Hermitian operator spaces, and PSD-cone feasibility. No external BLAS:
//! everything is Jacobi-based and tuned for operator dimensions ≤ ~16.

pub mod cmatrix;
pub mod dykstra;
pub mod eigen;
pub mod hermitian;
pub mod svd;

pub use cmatrix::{C64, CMatrix, vdot, vnorm};
pub use dykstra::psd_feasible;
pub use eigen::{EigenDecomposition, eigh};
pub use hermitian::{
    HERMITICITY_TOL, HermitianFunctional, HermitianOperator, HermitianSubspace, MatrixDoc,
    ORTHONORMALITY_TOL, gram_matrix, hermitian_basis, hermitian_nullspace, project_psd,
    unvectorize, vectorize,
};
pub use svd::{Svd, singular_values, svd};

/// Singular values of a state's amplitude matrix, descending: the Schmidt
/// coefficients of the corresponding bipartite pure state.
pub fn schmidt_singular_values(m: &CMatrix) -> crate::error::Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(crate::error::Error::Dimension(
            "Schmidt analysis of an empty matrix".into(),
        ));
    }
    if let Some(idx) = m.first_non_finite() {
        return Err(crate::error::Error::Validation(format!(
            "non-finite amplitude at flat index {idx}"
        )));
    }
    Ok(singular_values(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn schmidt_rank_one_identity_case() {
        let m = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let s = schmidt_singular_values(&m).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15);
        assert!(s[1].abs() < 1e-15);
    }

    #[test]
    fn schmidt_diagonal_values_read_off() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMatrix::from_real(2, 2, &[r, 0.0, 0.0, r]);
        let s = schmidt_singular_values(&m).unwrap();
        assert!((s[0] - r).abs() < 1e-15);
        assert!((s[1] - r).abs() < 1e-15);
    }

    #[test]
    fn schmidt_values_match_reduced_eigenvalue_oracle() {
        // 2×3 normalized matrix: σ² must equal the eigenvalues of the 2×2
        // reduced matrix M·M†, computed here by the quadratic formula —
        // a route independent of the Jacobi sweeps.
        let raw = [
            c(0.31, -0.12),
            c(-0.44, 0.09),
            c(0.25, 0.33),
            c(0.15, 0.41),
            c(-0.22, -0.18),
            c(0.38, 0.27),
        ];
        let norm = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let m = CMatrix::from_vec(2, 3, raw.iter().map(|x| x / norm).collect());

        let red = m.matmul(&m.adjoint());
        let tr = red.trace().re;
        let det = (red[(0, 0)] * red[(1, 1)] - red[(0, 1)] * red[(1, 0)]).re;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let lam_hi = tr / 2.0 + disc;
        let lam_lo = tr / 2.0 - disc;

        let s = schmidt_singular_values(&m).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0] * s[0] - lam_hi).abs() < 1e-12);
        assert!((s[1] * s[1] - lam_lo).abs() < 1e-12);

        // Sum of squares equals the squared Frobenius norm.
        let sq: f64 = s.iter().map(|x| x * x).sum();
        assert!((sq - m.frobenius_norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn schmidt_invariant_under_unitaries() {
        // Left/right multiplication by fixed unitaries preserves σ.
        let m = CMatrix::from_fn(2, 3, |i, j| c((i + j) as f64 * 0.21 - 0.3, (i as f64) * 0.4 - (j as f64) * 0.1));
        let theta: f64 = 0.7;
        let u = CMatrix::from_vec(
            2,
            2,
            vec![
                c(theta.cos(), 0.0),
                c(-theta.sin(), 0.0),
                c(theta.sin(), 0.0),
                c(theta.cos(), 0.0),
            ],
        );
        let w = {
            // 3×3 unitary: permutation composed with a phase.
            let mut w = CMatrix::zeros(3, 3);
            w[(0, 2)] = c(0.0, 1.0);
            w[(1, 0)] = C64::ONE;
            w[(2, 1)] = c(0.6, 0.8);
            w
        };
        assert!(w.unitarity_defect() < 1e-15);
        let s0 = schmidt_singular_values(&m).unwrap();
        let s1 = schmidt_singular_values(&u.matmul(&m).matmul(&w)).unwrap();
        for (a, b) in s0.iter().zip(&s1) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn schmidt_rejects_empty_and_non_finite() {
        assert!(schmidt_singular_values(&CMatrix::zeros(0, 3)).is_err());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(schmidt_singular_values(&m).is_err());
    }
}
