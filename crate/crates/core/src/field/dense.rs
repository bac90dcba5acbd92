use rayon::prelude::*;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Dense { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Dense { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Dense { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Flip `P(x⊗y) = y⊗x` on `C^d ⊗ C^d`.
    pub fn permutation(d: usize) -> Self {
        Self::from_fn(d * d, d * d, |r, c| {
            let (i, j) = (c / d, c % d);
            if r == j * d + i {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Dense<U> {
        Dense { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Dense<U>> {
        Ok(Dense { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.shape() != o.shape() {
            return Err(Error::Shape(format!("{:?} vs {:?}", self.shape(), o.shape())));
        }
        Ok(())
    }

    /// Product skipping structural zeros; rows are computed in parallel.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("cannot multiply {:?} by {:?}", self.shape(), o.shape())));
        }
        let n = o.cols;
        let rows: Vec<Vec<T>> = (0..self.rows)
            .into_par_iter()
            .map(|i| {
                let mut acc: Vec<Option<T>> = vec![None; n];
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    for (j, slot) in acc.iter_mut().enumerate() {
                        let b = o.get(k, j);
                        if b.is_zero() {
                            continue;
                        }
                        let t = a.mul(b);
                        *slot = Some(match slot.take() {
                            Some(s) => s.add(&t),
                            None => t,
                        });
                    }
                }
                acc.into_iter().map(|x| x.unwrap_or_else(T::zero)).collect()
            })
            .collect();
        Ok(Dense { rows: self.rows, cols: n, data: rows.into_iter().flatten().collect() })
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn kron(&self, o: &Self) -> Self {
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        Self::from_fn(r, c, |i, j| {
            let a = self.get(i / o.rows, j / o.cols);
            if a.is_zero() {
                return T::zero();
            }
            a.mul(o.get(i % o.rows, j % o.cols))
        })
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Traces out tensor factor `slot` of a square operator on
    /// `⊗ C^{dims[k]}` (first factor most significant).
    pub fn partial_trace(&self, slot: usize, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !self.is_square() || self.rows != total || slot >= dims.len() {
            return Err(Error::Shape(format!("partial trace over slot {slot} of dims {dims:?}")));
        }
        let d = dims[slot];
        let inner: usize = dims[slot + 1..].iter().product();
        let outer: usize = dims[..slot].iter().product();
        let m = outer * inner;
        let idx = |o: usize, k: usize, i: usize| (o * d + k) * inner + i;
        Ok(Self::from_fn(m, m, |r, c| {
            let (ro, ri) = (r / inner, r % inner);
            let (co, ci) = (c / inner, c % inner);
            let mut acc = T::zero();
            for k in 0..d {
                acc = acc.add(self.get(idx(ro, k, ri), idx(co, k, ci)));
            }
            acc
        }))
    }

    /// Embeds a `d²×d²` operator acting on tensor slots `a`, `b` (in that
    /// order) of `(C^d)^{⊗n}`.
    pub fn embed_two_site(op: &Self, a: usize, b: usize, d: usize, n: usize) -> Result<Self> {
        let mut out = Self::identity(d.pow(n as u32));
        out = out.apply_two_site_left(op, a, b, d, n)?;
        Ok(out)
    }

    /// Computes `op_{ab} · self` without forming the embedded operator.
    pub fn apply_two_site_left(&self, op: &Self, a: usize, b: usize, d: usize, n: usize) -> Result<Self> {
        let dim = d.pow(n as u32);
        if op.shape() != (d * d, d * d) || self.rows != dim || a == b || a >= n || b >= n {
            return Err(Error::Shape(format!("two-site operator on slots ({a},{b}) of {n} sites")));
        }
        let sa = d.pow((n - 1 - a) as u32);
        let sb = d.pow((n - 1 - b) as u32);
        let mut out = Self::zeros(self.rows, self.cols);
        for r in 0..dim {
            let (ia, ib) = ((r / sa) % d, (r / sb) % d);
            let base = r - ia * sa - ib * sb;
            let orow = ia * d + ib;
            for ja in 0..d {
                for jb in 0..d {
                    let coef = op.get(orow, ja * d + jb);
                    if coef.is_zero() {
                        continue;
                    }
                    let src = base + ja * sa + jb * sb;
                    for c in 0..self.cols {
                        let x = self.get(src, c);
                        if x.is_zero() {
                            continue;
                        }
                        let v = out.get(r, c).add(&coef.mul(x));
                        out.set(r, c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn hstack(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows {
            return Err(Error::Shape("hstack row mismatch".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}
