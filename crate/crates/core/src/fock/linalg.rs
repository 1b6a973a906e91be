//! Dense complex matrix helpers shared by every module.

use ndarray::{Array1, Array2, ArrayView2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

/// Dense complex matrix, row-major.
pub type CMatrix = Array2<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, ONE)
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().sum()
}

/// Largest absolute entry.
pub fn max_abs(m: ArrayView2<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// max |M - M†| over entries.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

/// (M + M†)/2.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    let d = dagger(m);
    (m + &d).mapv(|z| z * 0.5)
}

/// Kronecker product `a ⊗ b`; the left factor is the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let s = a[[i, j]];
            if s == ZERO {
                continue;
            }
            let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.zip_mut_with(b, |o, &x| *o = s * x);
        }
    }
    out
}

pub fn kron_vec(a: &Array1<C64>, b: &Array1<C64>) -> Array1<C64> {
    let mut out = Array1::zeros(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

fn check_square(m: &CMatrix, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c || r == 0 {
        return Err(Error::Shape(format!("{what} must be square and nonempty, got {r}x{c}")));
    }
    Ok(r)
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    let scale = max_abs(h.view()).max(1.0);
    let defect = hermiticity_defect(h);
    if defect > tol::HERM * scale {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary whose columns are the eigenvectors.
pub fn hermitian_eigh(h: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    check_square(h, "Hermitian operator")?;
    check_hermitian(h)?;
    // LAPACK works in column-major order; handing it a row-major complex
    // matrix yields the eigenvectors of the conjugate.
    let mut col_major = Array2::zeros(h.raw_dim().f());
    col_major.assign(&hermitize(h));
    let (vals, vecs) = col_major.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Applies a scalar function to a Hermitian matrix through its spectrum.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> C64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigh(h)?;
    Ok(spectral_compose(&vals, &vecs, f))
}

/// `V diag(f(λ)) V†`.
pub fn spectral_compose(vals: &Array1<f64>, vecs: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let fv: Array1<C64> = vals.mapv(f);
    let scaled = vecs * &fv.insert_axis(Axis(0));
    scaled.dot(&dagger(vecs))
}

/// Propagator `exp(-i H t)` of a Hermitian generator.
pub fn hermitian_expm(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    if t == 0.0 {
        check_square(h, "Hermitian operator")?;
        check_hermitian(h)?;
        return Ok(identity(h.nrows()));
    }
    hermitian_function(h, |e| C64::from_polar(1.0, -e * t))
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(h: &CMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigh(h)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

/// Deviation of `U†U` from identity restricted to the leading `inner` levels.
pub fn unitarity_defect(u: &CMatrix, inner: usize) -> f64 {
    let n = inner.min(u.ncols());
    let cols = u.slice(ndarray::s![.., ..n]);
    let gram = cols.t().mapv(|z| z.conj()).dot(&cols);
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[[i, j]] - target).norm());
        }
    }
    worst
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        // small LCG keeps the test free of extra dependencies
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = C64::new(next(), next());
            }
        }
        hermitize(&m)
    }

    #[test]
    fn expm_at_zero_time_is_identity() {
        let h = random_hermitian(5, 3);
        assert!(max_abs_diff(&hermitian_expm(&h, 0.0).unwrap(), &identity(5)) < 1e-15);
    }

    #[test]
    fn integer_spectrum_is_periodic() {
        let h = Array2::from_diag(&ndarray::arr1(&[ZERO, ONE, C64::new(2.0, 0.0)]));
        let u = hermitian_expm(&h, 2.0 * PI).unwrap();
        assert!(max_abs_diff(&u, &identity(3)) < 1e-12);
    }

    #[test]
    fn group_law() {
        let h = random_hermitian(8, 11);
        let a = hermitian_expm(&h, 0.37).unwrap();
        let b = hermitian_expm(&h, 1.21).unwrap();
        let ab = hermitian_expm(&h, 1.58).unwrap();
        assert!(max_abs_diff(&a.dot(&b), &ab) < 1e-11);
        assert!(unitarity_defect(&ab, 8) < 1e-12);
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let h = random_hermitian(6, 23);
        let (vals, vecs) = hermitian_eigh(&h).unwrap();
        for (k, &lam) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let hv = h.dot(&v);
            for i in 0..6 {
                assert!((hv[i] - v[i] * lam).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = random_hermitian(4, 5);
        h[[0, 1]] += C64::new(1e-3, 0.0);
        assert!(matches!(hermitian_expm(&h, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn kron_of_identities() {
        assert!(max_abs_diff(&kron(&identity(2), &identity(2)), &identity(4)) == 0.0);
    }
}
