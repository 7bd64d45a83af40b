//! Small dense linear-algebra helpers shared across modules.

use crate::{C64, CMatrix};

/// tr(A B) without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// (A + A^H) / 2.
pub(crate) fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue(a: &CMatrix) -> f64 {
    if a.nrows() == 1 {
        return a[(0, 0)].re;
    }
    nalgebra::SymmetricEigen::new(a.clone()).eigenvalues.min()
}

/// Frobenius distance from Hermitian symmetry, `||A - A^H||_F`.
pub(crate) fn hermitian_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}
