//! Exact linear algebra over the rational-function field.

use rayon::prelude::*;

use super::dense::Dense;
use super::gcd::lcm;
use super::poly::MPoly;
use super::ratfun::RatFun;
use crate::error::{Error, Result};

/// Rows scaled by the lcm of their denominators, giving a polynomial
/// matrix; returns the polynomial rows and the scale factors.
fn clear_denominators(m: &Dense<RatFun>) -> (Vec<Vec<MPoly>>, Vec<MPoly>) {
    let mut rows = Vec::with_capacity(m.rows());
    let mut scales = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut l = MPoly::one();
        for x in m.row(i) {
            if !x.den().is_one() {
                l = lcm(&l, x.den());
            }
        }
        rows.push(
            m.row(i)
                .iter()
                .map(|x| if l.is_one() { x.num().clone() } else { x.num().mul(&l.div_exact(x.den()).unwrap()) })
                .collect(),
        );
        scales.push(l);
    }
    (rows, scales)
}

/// Fraction-free (Bareiss) Gauss-Jordan elimination on polynomial rows over
/// the first `ncols` columns. Every division is exact. Returns pivot columns
/// and the final pivot (a determinant of the pivot minor, up to sign).
fn bareiss(a: &mut [Vec<MPoly>], ncols: usize, jordan: bool) -> (Vec<usize>, MPoly, i32) {
    let rows = a.len();
    let width = a.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut prev = MPoly::one();
    let mut sign = 1;
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        // Sparsest pivot limits growth.
        let Some(p) = (r..rows).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].num_terms()) else {
            continue;
        };
        if p != r {
            a.swap(r, p);
            sign = -sign;
        }
        let piv = a[r][c].clone();
        let targets: Vec<usize> =
            if jordan { (0..rows).filter(|&i| i != r).collect() } else { ((r + 1)..rows).collect() };
        for i in targets {
            let f = a[i][c].clone();
            for j in 0..width {
                if j == c {
                    continue;
                }
                if !jordan && j < c {
                    continue;
                }
                let t = piv.mul(&a[i][j]);
                let t = if f.is_zero() || a[r][j].is_zero() { t } else { t.sub(&f.mul(&a[r][j])) };
                a[i][j] = if prev.is_one() { t } else { t.div_exact(&prev).expect("Bareiss division is exact") };
            }
            a[i][c] = MPoly::zero();
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    (pivots, prev, sign)
}

/// Inverse by fraction-free Gauss-Jordan on the polynomial matrix obtained by
/// clearing row denominators.
pub fn inverse(m: &Dense<RatFun>) -> Result<Dense<RatFun>> {
    if !m.is_square() {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let n = m.rows();
    let (mut rows, scales) = clear_denominators(m);
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..n {
            row.push(if i == j { MPoly::one() } else { MPoly::zero() });
        }
    }
    let (pivots, _, _) = bareiss(&mut rows, n, true);
    if pivots.len() < n {
        return Err(Error::Singular);
    }
    // Row i now reads d·e_i | d·(M')^{-1}_i, and M^{-1} = (M')^{-1} D.
    let out = rows;
    let entries: Vec<RatFun> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let d = &out[i][i];
            RatFun::new(out[i][n + j].mul(&scales[j]), d.clone()).expect("pivot is nonzero")
        })
        .collect();
    Dense::new(n, n, entries)
}

/// Fraction-free row echelon form of the denominator-cleared matrix.
/// Returns the rows and the pivot columns.
pub fn bareiss_echelon(m: &Dense<RatFun>) -> (Vec<Vec<MPoly>>, Vec<usize>) {
    let (mut rows, _) = clear_denominators(m);
    let (pivots, _, _) = bareiss(&mut rows, m.cols(), false);
    (rows, pivots)
}

pub fn rank(m: &Dense<RatFun>) -> usize {
    bareiss_echelon(m).1.len()
}

pub fn determinant(m: &Dense<RatFun>) -> Result<RatFun> {
    if !m.is_square() {
        return Err(Error::Shape("determinant of a non-square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(RatFun::one());
    }
    let (mut rows, scales) = clear_denominators(m);
    let (pivots, last, sign) = bareiss(&mut rows, n, false);
    if pivots.len() < n {
        return Ok(RatFun::zero());
    }
    let mut den = MPoly::one();
    for s in &scales {
        den = den.mul(s);
    }
    let num = if sign < 0 { last.neg() } else { last };
    RatFun::new(num, den)
}

/// Basis of the right null space, one vector per free column; each vector
/// has a one in its free coordinate.
pub fn nullspace(m: &Dense<RatFun>) -> Vec<Vec<RatFun>> {
    let cols = m.cols();
    let (ech, pivots) = bareiss_echelon(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut x = vec![RatFun::zero(); cols];
        x[f] = RatFun::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let mut s = RatFun::zero();
            for j in (pc + 1)..cols {
                if !ech[k][j].is_zero() && !x[j].is_zero() {
                    s = s.add_ref(&RatFun::from_poly(ech[k][j].clone()).mul_ref(&x[j]));
                }
            }
            x[pc] = (-s).div_ref(&RatFun::from_poly(ech[k][pc].clone())).expect("pivot is nonzero");
        }
        basis.push(x);
    }
    basis
}

/// Solves `m x = b` for square invertible `m`.
pub fn solve(m: &Dense<RatFun>, b: &[RatFun]) -> Result<Vec<RatFun>> {
    let inv = inverse(m)?;
    inv.mul_vec(b)
}
