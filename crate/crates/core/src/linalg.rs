//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{Cholesky, DMatrix, Dyn};

/// Log-determinant of a symmetric positive-definite matrix via Cholesky.
/// Returns `None` when the factorization fails (matrix not PD).
pub(crate) fn logdet_pd(matrix: &DMatrix<f64>) -> Option<f64> {
    let chol = Cholesky::new(matrix.clone())?;
    Some(logdet_from_cholesky(&chol))
}

pub(crate) fn logdet_from_cholesky(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.ln())
        .sum::<f64>()
}

/// `tr(A * B)` for symmetric `B`, computed as the entrywise product sum.
pub(crate) fn trace_product_sym(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// `tr(H * S * H^T)`: total signal variance of the measurement model.
pub(crate) fn signal_trace(h: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let hs = h * s;
    hs.component_mul(h).sum()
}
