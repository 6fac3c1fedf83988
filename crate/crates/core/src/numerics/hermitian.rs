//! Hermitian operators, their real vectorization, and constraint nullspaces.
//!
//! Hermitian d×d matrices form a d²-dimensional *real* vector space. The
//! canonical orthonormal basis used throughout is, in fixed order:
//! diagonal units E_ii (i = 0..d), then symmetric units (E_ij + E_ji)/√2 for
//! i < j row-major, then antisymmetric units i(E_ij − E_ji)/√2 in the same
//! pair order. Linear constraint systems on POVM elements are solved in these
//! coordinates and mapped back.

use serde::{Deserialize, Serialize};

use super::cmatrix::{C64, CMatrix};
use super::eigen::{EigenDecomposition, eigh};
use super::svd::svd;
use crate::error::{Error, Result};

/// Absolute entry-wise tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Pairwise tolerance for orthonormality of subspace bases.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for rank decisions in nullspace extraction.
pub const RANK_REL_CUTOFF: f64 = 1e-10;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A d×d Hermitian matrix, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Wrap a matrix, requiring H = H† within [`HERMITICITY_TOL`] per entry.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian operator must be square, got {}×{}",
                mat.rows(),
                mat.cols()
            )));
        }
        if let Some(idx) = mat.first_non_finite() {
            return Err(Error::Validation(format!(
                "non-finite entry at flat index {idx} in Hermitian operator"
            )));
        }
        let defect = mat.sub(&mat.adjoint()).max_abs();
        if defect > 2.0 * HERMITICITY_TOL {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian: ‖H − H†‖_max = {defect:.3e}"
            )));
        }
        Ok(Self { mat: symmetrize(&mat) })
    }

    /// Wrap a matrix that is Hermitian by construction, symmetrizing rounding noise.
    pub fn from_symmetrized(mat: &CMatrix) -> Self {
        Self { mat: symmetrize(mat) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: CMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn eigh(&self) -> EigenDecomposition {
        eigh(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().min_eigenvalue()
    }

    /// tr(H), which is real for Hermitian H.
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    /// Real Frobenius inner product ⟨A, B⟩ = Re tr(A†B).
    pub fn frobenius_inner(&self, other: &Self) -> f64 {
        self.mat.frobenius_inner(&other.mat).re
    }

    /// Frobenius distance from this operator to its projection onto span{I};
    /// zero exactly when the operator is a multiple of the identity.
    pub fn distance_from_scalar(&self) -> f64 {
        let d = self.dim() as f64;
        let shift = CMatrix::identity(self.dim()).scale(C64::new(self.trace() / d, 0.0));
        self.mat.frobenius_dist(&shift)
    }

    pub fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        Self::from_symmetrized(&self.mat.add(&other.mat.scale(C64::new(factor, 0.0))))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { mat: self.mat.scale(C64::new(factor, 0.0)) }
    }
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    m.add(&m.adjoint()).scale(C64::new(0.5, 0.0))
}

/// An orthonormal set of Hermitian operators spanning a real-linear subspace.
#[derive(Debug, Clone)]
pub struct HermitianSubspace {
    dim_operators: usize,
    basis: Vec<HermitianOperator>,
}

impl HermitianSubspace {
    pub fn new(dim_operators: usize, basis: Vec<HermitianOperator>) -> Result<Self> {
        for (k, b) in basis.iter().enumerate() {
            if b.dim() != dim_operators {
                return Err(Error::Dimension(format!(
                    "basis element {k} has dimension {} ≠ {dim_operators}",
                    b.dim()
                )));
            }
        }
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = basis[i].frobenius_inner(&basis[j]);
                if (got - want).abs() > ORTHONORMALITY_TOL {
                    return Err(Error::Validation(format!(
                        "basis pair ({i},{j}) has Frobenius inner product {got:.3e}, expected {want}"
                    )));
                }
            }
        }
        Ok(Self { dim_operators, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim_operators
    }

    /// Number of basis elements (the subspace dimension over ℝ).
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[HermitianOperator] {
        &self.basis
    }

    /// Orthogonal projection of an operator onto the subspace.
    pub fn project(&self, h: &HermitianOperator) -> HermitianOperator {
        let mut acc = CMatrix::zeros(self.dim_operators, self.dim_operators);
        for b in &self.basis {
            let coeff = b.frobenius_inner(h);
            acc = acc.add(&b.matrix().scale(C64::new(coeff, 0.0)));
        }
        HermitianOperator::from_symmetrized(&acc)
    }

    /// Distance of an operator from the subspace.
    pub fn distance(&self, h: &HermitianOperator) -> f64 {
        self.project(h).matrix().frobenius_dist(h.matrix())
    }
}

/// The canonical orthonormal Hermitian basis of dimension d², in fixed order.
pub fn hermitian_basis(d: usize) -> Vec<HermitianOperator> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = C64::ONE;
        out.push(HermitianOperator { mat: m });
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(i, j)] = C64::new(SQRT_HALF, 0.0);
            m[(j, i)] = C64::new(SQRT_HALF, 0.0);
            out.push(HermitianOperator { mat: m });
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(i, j)] = C64::new(0.0, SQRT_HALF);
            m[(j, i)] = C64::new(0.0, -SQRT_HALF);
            out.push(HermitianOperator { mat: m });
        }
    }
    out
}

/// Coordinates of a Hermitian operator in the canonical basis (an isometry).
pub fn vectorize(h: &HermitianOperator) -> Vec<f64> {
    let d = h.dim();
    let m = h.matrix();
    let mut v = Vec::with_capacity(d * d);
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        v.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            v.push(m[(i, j)].re * sqrt2);
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            v.push(m[(i, j)].im * sqrt2);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(d: usize, v: &[f64]) -> HermitianOperator {
    assert_eq!(v.len(), d * d, "coordinate vector length must be d²");
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = d;
    let pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        m[(i, j)] += C64::new(v[k] * SQRT_HALF, 0.0);
        m[(j, i)] += C64::new(v[k] * SQRT_HALF, 0.0);
        k += 1;
    }
    for &(i, j) in &pairs {
        m[(i, j)] += C64::new(0.0, v[k] * SQRT_HALF);
        m[(j, i)] += C64::new(0.0, -v[k] * SQRT_HALF);
        k += 1;
    }
    HermitianOperator { mat: m }
}

/// A real-linear functional H ↦ Re tr(H·G) on Hermitian matrices.
///
/// Every real-linear functional on the Hermitian space takes this form;
/// `Im tr(H·K)` is covered via G = −iK.
#[derive(Debug, Clone)]
pub struct HermitianFunctional {
    g: CMatrix,
}

impl HermitianFunctional {
    /// Functional H ↦ Re tr(H·G).
    pub fn re_trace(g: CMatrix) -> Self {
        assert!(g.is_square());
        Self { g }
    }

    /// Functional H ↦ Im tr(H·K).
    pub fn im_trace(k: CMatrix) -> Self {
        assert!(k.is_square());
        Self { g: k.scale(C64::new(0.0, -1.0)) }
    }

    pub fn evaluate(&self, h: &HermitianOperator) -> f64 {
        self.evaluate_matrix(h.matrix())
    }

    pub fn evaluate_matrix(&self, h: &CMatrix) -> f64 {
        h.matmul(&self.g).trace().re
    }

    /// Coefficient row of the functional in the canonical Hermitian basis.
    pub fn coefficients(&self) -> Vec<f64> {
        let d = self.g.rows();
        let g = &self.g;
        let mut row = Vec::with_capacity(d * d);
        // Re tr(E_ii G) = Re G[i][i]
        for i in 0..d {
            row.push(g[(i, i)].re);
        }
        // Re tr(S_ij G) = (Re G[j][i] + Re G[i][j])/√2
        for i in 0..d {
            for j in (i + 1)..d {
                row.push((g[(j, i)].re + g[(i, j)].re) * SQRT_HALF);
            }
        }
        // Re tr(A_ij G) = −(Im G[j][i] − Im G[i][j])/√2
        for i in 0..d {
            for j in (i + 1)..d {
                row.push((g[(i, j)].im - g[(j, i)].im) * SQRT_HALF);
            }
        }
        row
    }
}

/// Orthonormal basis of the joint kernel of real-linear constraints on the
/// Hermitian d×d space. With no constraints the full d²-dimensional canonical
/// basis is returned; an empty kernel yields an empty basis.
///
/// Rank is decided by singular values with relative cutoff
/// [`RANK_REL_CUTOFF`] × σ_max of the stacked coefficient matrix.
pub fn hermitian_nullspace(d: usize, constraints: &[HermitianFunctional]) -> HermitianSubspace {
    let n = d * d;
    if constraints.is_empty() {
        return HermitianSubspace { dim_operators: d, basis: hermitian_basis(d) };
    }
    let rows: Vec<Vec<f64>> = constraints.iter().map(|f| f.coefficients()).collect();
    let mut flat = Vec::with_capacity(rows.len() * n);
    for r in &rows {
        assert_eq!(r.len(), n, "constraint dimension mismatch");
        flat.extend(r.iter().map(|&x| C64::new(x, 0.0)));
    }
    let a = CMatrix::from_vec(rows.len(), n, flat);
    let dec = svd(&a);
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = RANK_REL_CUTOFF * sigma_max;
    let rank = dec.singular_values.iter().filter(|&&s| s > cutoff).count();

    let mut basis = Vec::with_capacity(n - rank);
    for j in rank..n {
        let coords: Vec<f64> = (0..n).map(|i| dec.v[(i, j)].re).collect();
        // Right singular vectors of a real matrix stay real through the
        // rotations; any imaginary leakage would signal a bug upstream.
        debug_assert!((0..n).all(|i| dec.v[(i, j)].im.abs() < 1e-12));
        basis.push(unvectorize(d, &coords));
    }
    HermitianSubspace { dim_operators: d, basis }
}

/// Frobenius-nearest positive-semidefinite operator (eigenvalue clipping).
pub fn project_psd(h: &HermitianOperator) -> HermitianOperator {
    let dec = h.eigh();
    if dec.min_eigenvalue() >= 0.0 {
        return h.clone();
    }
    let clipped: Vec<C64> = dec.values.iter().map(|&l| C64::new(l.max(0.0), 0.0)).collect();
    let lam = CMatrix::diagonal(&clipped);
    let m = dec.vectors.matmul(&lam).matmul(&dec.vectors.adjoint());
    HermitianOperator::from_symmetrized(&m)
}

/// Gram matrix `G[i][j]` = ⟨v_i∣v_j⟩ of a family of complex vectors.
pub fn gram_matrix(vectors: &[Vec<C64>]) -> Result<CMatrix> {
    let l = vectors.len();
    if l == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let dim = vectors[0].len();
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::Dimension(format!(
                "vector {k} has length {} ≠ {dim}",
                v.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(l, l, |i, j| {
        super::cmatrix::vdot(&vectors[i], &vectors[j])
    }))
}

/// Serialization shim: complex matrices as row-major [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "matrix document claims {}×{} but carries {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        Ok(CMatrix::from_vec(
            self.rows,
            self.cols,
            self.entries.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        ))
    }
}

impl Serialize for HermitianOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDoc::from_matrix(&self.mat).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(deserializer)?;
        let mat = doc.to_matrix().map_err(serde::de::Error::custom)?;
        HermitianOperator::new(mat).map_err(serde::de::Error::custom)
    }
}
