//! Dense complex helpers shared by the model, receiver and solver code.
//!
//! Everything here is small (matrices of order ≤ 8 in practice), so the
//! routines favour clarity over blocking or in-place tricks.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Tolerance on `‖M − Mᴴ‖_F / max(1, ‖M‖_F)` accepted when symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `h hᴴ`.
pub fn outer(h: &CVec) -> CMat {
    h * h.adjoint()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace_re(m: &CMat) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Returns `(M + Mᴴ)/2` and the Frobenius norm of the correction `(M − Mᴴ)/2`.
pub fn hermitian_part(m: &CMat) -> (CMat, f64) {
    let mh = m.adjoint();
    let sym = (m + &mh).scale(0.5);
    let corr = frobenius(&(m - &mh).scale(0.5));
    (sym, corr)
}

/// Symmetrizes `m`, failing if the anti-Hermitian part is not negligible.
pub fn enforce_hermitian(m: &CMat, what: &str) -> Result<CMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::contract(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::contract(format!("{what} has non-finite entries")));
    }
    let (sym, corr) = hermitian_part(m);
    let scale = frobenius(m).max(1.0);
    if corr > HERMITIAN_TOL * scale {
        return Err(Error::contract(format!(
            "{what} is not Hermitian (anti-Hermitian norm {corr:.3e})"
        )));
    }
    Ok(sym)
}

/// `hᴴ M h` for Hermitian `M`; the imaginary residue must vanish to 1e-12
/// relative to `‖h‖² ‖M‖_F`.
pub fn quad_form(h: &CVec, m: &CMat) -> Result<f64> {
    if m.nrows() != h.len() || m.ncols() != h.len() {
        return Err(Error::contract(format!(
            "quadratic form dimension mismatch: vector {} vs matrix {}x{}",
            h.len(),
            m.nrows(),
            m.ncols()
        )));
    }
    let z = h.dotc(&(m * h));
    let scale = h.norm_squared() * frobenius(m);
    if z.im.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) && z.im.abs() > 1e-300 {
        return Err(Error::contract(format!(
            "quadratic form has imaginary part {:.3e} (scale {:.3e}); matrix not Hermitian",
            z.im, scale
        )));
    }
    Ok(z.re)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub fn principal_eigenpair(m: &CMat) -> (f64, CVec) {
    let eig = SymmetricEigen::new(m.clone());
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("non-empty matrix");
    (val, eig.eigenvectors.column(idx).into_owned())
}

/// Cholesky factorization of a Hermitian positive definite matrix.
pub fn cholesky(m: &CMat) -> Result<Cholesky<C64, Dyn>> {
    Cholesky::new(m.clone())
        .ok_or_else(|| Error::numerical("matrix is not positive definite (Cholesky failed)"))
}

/// Projects a Hermitian matrix onto the PSD cone by clipping negative
/// eigenvalues.
pub fn psd_projection(m: &CMat) -> CMat {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut out = zeros(n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 0.0 {
            let u = eig.eigenvectors.column(k);
            out += (&u * u.adjoint()).scale(lam);
        }
    }
    hermitian_part(&out).0
}

/// Fixes the global phase so the largest-magnitude entry is real positive.
pub fn canonical_phase(v: &CVec) -> CVec {
    let Some((_, pivot)) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    else {
        return v.clone();
    };
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    let rot = pivot.conj() / pivot.norm();
    v.map(|z| z * rot)
}

pub fn is_finite_vec(v: &CVec) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Hermitian matrix ↔ real coordinates: `n` diagonal entries followed by
/// `(re, im)` of each strictly upper entry in row-major order.
pub fn herm_to_coords(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

pub fn coords_to_herm(x: &[f64], n: usize) -> CMat {
    debug_assert_eq!(x.len(), n * n);
    let mut m = zeros(n);
    for i in 0..n {
        m[(i, i)] = c(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c(x[k], x[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Coefficients of the linear functional `M ↦ Tr(A M)` in Hermitian
/// coordinates, for Hermitian `A`.
pub fn trace_functional_coords(a: &CMat) -> Vec<f64> {
    let n = a.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(a[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            // Tr(A (E_ij + E_ji)) = 2 Re A_ij ; Tr(A (i E_ij − i E_ji)) = 2 Im A_ij
            // (A Hermitian, so A_ji = conj(A_ij)).
            out.push(2.0 * a[(j, i)].re);
            out.push(-2.0 * a[(j, i)].im);
        }
    }
    out
}

/// Inverse of [`trace_functional_coords`]: the Hermitian `A` whose trace
/// functional has coefficients `a`.
pub fn functional_from_coords(a: &[f64]) -> CMat {
    let n = (a.len() as f64).sqrt().round() as usize;
    debug_assert_eq!(n * n, a.len());
    let mut m = zeros(n);
    for i in 0..n {
        m[(i, i)] = c(a[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c(0.5 * a[k], 0.5 * a[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

pub fn real_matrix_is_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}
