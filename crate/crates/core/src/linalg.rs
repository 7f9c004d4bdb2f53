//! Dense complex linear algebra: Pfaffians, determinants, inverses.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pfaffian of a skew-symmetric matrix by Parlett-Reid style elimination with
/// partial pivoting. Only the strictly lower triangle is read.
pub fn pfaffian(m: &CMat) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "pfaffian needs a square matrix");
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut a = m.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let mut piv = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for i in k + 2..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k + 1 {
            a.swap_rows(k + 1, piv);
            a.swap_columns(k + 1, piv);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let rest = n - k - 2;
            let tau: Vec<Complex64> = (0..rest).map(|j| a[(k, k + 2 + j)] / pivot).collect();
            let col: Vec<Complex64> = (0..rest).map(|j| a[(k + 2 + j, k + 1)]).collect();
            for i in 0..rest {
                for j in 0..rest {
                    a[(k + 2 + i, k + 2 + j)] += tau[i] * col[j] - col[i] * tau[j];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Pfaffian of a real skew-symmetric matrix given as a complex matrix whose
/// imaginary parts are negligible.
pub fn pfaffian_real(m: &CMat) -> f64 {
    pfaffian(m).re
}

pub fn det(m: &CMat) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone().lu().try_inverse().ok_or(Error::Singular)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Principal submatrix on the given index list (in order).
pub fn principal(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Submatrix with the given indices removed from rows and columns.
pub fn complement_minor(m: &CMat, removed: &[usize]) -> CMat {
    let keep: Vec<usize> = (0..m.nrows()).filter(|i| !removed.contains(i)).collect();
    principal(m, &keep)
}

/// Largest relative deviation between two complex numbers, scaled by the larger modulus.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
