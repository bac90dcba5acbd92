//! Floating-point linear algebra on complex matrices (nalgebra-backed).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::dense::Dense;
use crate::error::{Error, Result};

pub type C = Complex64;

/// Relative singular-value threshold for numeric null spaces and ranks.
pub const SVD_REL_TOL: f64 = 1e-9;

pub fn to_na(m: &Dense<C>) -> DMatrix<C> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

pub fn from_na(m: &DMatrix<C>) -> Dense<C> {
    Dense::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn max_abs(m: &Dense<C>) -> f64 {
    m.data().iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn padded(m: &DMatrix<C>) -> DMatrix<C> {
    // The thin SVD of a wide matrix drops null directions; pad to square.
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut p = DMatrix::zeros(m.ncols(), m.ncols());
    p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    p
}

/// Orthonormal basis of the right null space with singular values below
/// `rel_tol * sigma_max`, plus the full list of singular values (descending).
pub fn nullspace(m: &Dense<C>, rel_tol: f64) -> (Vec<Vec<C>>, Vec<f64>) {
    nullspace_scaled(m, rel_tol, None)
}

/// As [`nullspace`], measuring singular values against `scale` instead of
/// the largest one (needed when the matrix may have a single column).
pub fn nullspace_scaled(m: &Dense<C>, rel_tol: f64, scale: Option<f64>) -> (Vec<Vec<C>>, Vec<f64>) {
    let a = padded(&to_na(m));
    let n = a.ncols();
    if n == 0 {
        return (vec![], vec![]);
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = scale.unwrap_or_else(|| sv.iter().copied().fold(0.0, f64::max));
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());
    let mut basis = Vec::new();
    for &i in &idx {
        if sv[i] <= rel_tol * smax.max(f64::MIN_POSITIVE) {
            basis.push((0..n).map(|k| vt[(i, k)].conj()).collect());
        }
    }
    let sorted = idx.iter().map(|&i| sv[i]).collect();
    (basis, sorted)
}

pub fn rank(m: &Dense<C>, rel_tol: f64) -> usize {
    let (ns, _) = nullspace(m, rel_tol);
    m.cols() - ns.len()
}

pub fn inverse(m: &Dense<C>) -> Result<Dense<C>> {
    if !m.is_square() {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let a = to_na(m);
    let inv = a.try_inverse().ok_or(Error::Singular)?;
    Ok(from_na(&inv))
}

/// Least-squares solution of `a x ≈ b`.
pub fn lstsq(a: &Dense<C>, b: &[C]) -> Result<Vec<C>> {
    let m = to_na(a);
    let rhs = DVector::from_column_slice(b);
    let svd = m.svd(true, true);
    let x = svd.solve(&rhs, 1e-14).map_err(|e| Error::Inconsistent(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

/// Eigenvalues and (unit-norm) right eigenvectors via complex Schur form.
pub fn eig(m: &Dense<C>) -> Result<(Vec<C>, Vec<Vec<C>>)> {
    if !m.is_square() {
        return Err(Error::Shape("eigen-decomposition of a non-square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let schur = to_na(m).schur();
    let (q, t) = schur.unpack();
    let scale = t.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    let tiny = 1e-14 * scale;
    let vals: Vec<C> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vecs = Vec::with_capacity(n);
    for k in 0..n {
        // Solve (T - λ_k) y = 0 with y_k = 1, y_j = 0 for j > k.
        let mut y = vec![C::new(0.0, 0.0); n];
        y[k] = C::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - vals[k];
            if d.norm() < tiny {
                d = C::new(tiny, 0.0);
            }
            y[i] = -s / d;
        }
        let yv = DVector::from_column_slice(&y);
        let v = &q * yv;
        let nrm = v.norm();
        vecs.push(v.iter().map(|x| x / nrm).collect());
    }
    Ok((vals, vecs))
}

/// Roots of `sum c_k x^k` (ascending coefficients), polished by Newton.
pub fn poly_roots(coeffs: &[C]) -> Result<Vec<C>> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = c[deg];
    let comp = Dense::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / lead
        } else if i == j + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let (mut roots, _) = eig(&comp)?;
    for r in roots.iter_mut() {
        for _ in 0..50 {
            let (p, dp) = horner_with_derivative(&c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() <= 1e-16 * r.norm().max(1.0) {
                break;
            }
        }
    }
    Ok(roots)
}

pub fn horner(c: &[C], x: C) -> C {
    c.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * x + a)
}

fn horner_with_derivative(c: &[C], x: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn nullspace_of_all_ones() {
        let m = Dense::new(2, 2, vec![c(1.0); 4]).unwrap();
        let (ns, _) = nullspace(&m, SVD_REL_TOL);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert_eq!(rank(&m, SVD_REL_TOL), 1);
    }

    #[test]
    fn wide_matrix_keeps_null_directions() {
        let m = Dense::new(1, 3, vec![c(1.0), c(2.0), c(3.0)]).unwrap();
        let (ns, _) = nullspace(&m, SVD_REL_TOL);
        assert_eq!(ns.len(), 2);
    }

    #[test]
    fn eigenpairs_and_roots() {
        let m = Dense::new(2, 2, vec![c(2.0), c(1.0), c(0.0), c(3.0)]).unwrap();
        let (vals, vecs) = eig(&m).unwrap();
        for (l, v) in vals.iter().zip(&vecs) {
            let mv = m.mul_vec(v).unwrap();
            for k in 0..2 {
                assert!((mv[k] - l * v[k]).norm() < 1e-12);
            }
        }
        let roots = poly_roots(&[c(6.0), c(-5.0), c(1.0)]).unwrap();
        let mut re: Vec<f64> = roots.iter().map(|r| r.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - 2.0).abs() < 1e-12 && (re[1] - 3.0).abs() < 1e-12);
    }
}
