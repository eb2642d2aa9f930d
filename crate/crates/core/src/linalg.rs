//! Small complex linear-algebra helpers shared across the crate.
//!
//! Everything here works on dynamically sized `nalgebra` matrices over
//! `Complex<f64>`; the problem sizes are tiny (n ≤ 8), so clarity wins
//! over blocking or allocation tricks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
///
/// Wraps `nalgebra`'s symmetric eigendecomposition and sorts the output;
/// columns of `vectors` match `values` by position.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Decompose a Hermitian matrix. The caller is responsible for `m`
/// actually being Hermitian; the decomposition only reads one triangle.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> HermitianEigen {
    let se = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// Least eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue_sym(m: &DMatrix<f64>) -> f64 {
    let se = m.clone().symmetric_eigen();
    se.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Complete a unit vector to a unitary matrix whose first column is `v`.
///
/// Uses a Householder reflection mapping e₁ to `v`, so the result is
/// exactly unitary up to rounding.
pub fn unitary_from_first_column(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = v.len();
    let mut u = DMatrix::identity(n, n);
    // Phase so that the pivot entry is real nonnegative, then reflect.
    let alpha = if v[0].norm() > 1e-300 {
        v[0] / v[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let w = v.map(|z| z / alpha);
    // w is unit with w[0] real >= 0. Householder: H = I - 2 q q* with
    // q ∝ (w - e1) sends e1 to w.
    let mut q = w.clone();
    q[0] -= Complex64::new(1.0, 0.0);
    let qn = q.norm();
    if qn > 1e-14 {
        let q = q / Complex64::new(qn, 0.0);
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] -= 2.0 * q[i] * q[j].conj();
            }
        }
    }
    // Undo the phase on the first column only (multiply on the right by
    // diag(alpha, 1, ..., 1)); the other columns stay an orthonormal
    // completion.
    for i in 0..n {
        u[(i, 0)] *= alpha;
    }
    u
}

/// Orthonormal basis of Hermitian n×n matrices under ⟨A,B⟩ = Re tr(A B†).
///
/// Order: n diagonal units E_ii, then for each i<j the symmetric pair
/// (E_ij+E_ji)/√2 and the antisymmetric pair i(E_ij−E_ji)/√2.
pub fn hermitian_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut m = DMatrix::zeros(n, n);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(m);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::zeros(n, n);
            m[(i, j)] = Complex64::new(s, 0.0);
            m[(j, i)] = Complex64::new(s, 0.0);
            basis.push(m);
            let mut m = DMatrix::zeros(n, n);
            m[(i, j)] = Complex64::new(0.0, s);
            m[(j, i)] = Complex64::new(0.0, -s);
            basis.push(m);
        }
    }
    basis
}

/// Orthonormal basis of the trace-free Hermitian matrices (n²−1 of them).
///
/// Diagonal part uses the standard nested combinations
/// d_k ∝ E_11 + … + E_kk − k·E_{k+1,k+1}; off-diagonal part is shared
/// with [`hermitian_basis`].
pub fn traceless_hermitian_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..k {
            m[(i, i)] = Complex64::new(norm, 0.0);
        }
        m[(k, k)] = Complex64::new(-(k as f64) * norm, 0.0);
        basis.push(m);
    }
    for b in hermitian_basis(n).into_iter().skip(n) {
        basis.push(b);
    }
    basis
}
