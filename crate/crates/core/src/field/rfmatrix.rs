use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::Dense;
use super::ratfun::RatFun;
use super::{exact_linalg, numeric};
use crate::error::{Error, Result};

/// Matrix over rational functions or, in numeric mode, complex doubles.
#[derive(Clone, Debug, PartialEq)]
pub enum RfMatrix {
    Exact(Dense<RatFun>),
    Numeric(Dense<Complex64>),
}

/// Null-space basis in the mode of the input.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    Exact(Vec<Vec<RatFun>>),
    Numeric(Vec<Vec<Complex64>>),
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::Exact(b) => b.len(),
            Basis::Numeric(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RfMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            RfMatrix::Exact(m) => m.shape(),
            RfMatrix::Numeric(m) => m.shape(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RfMatrix::Exact(_))
    }

    pub fn as_exact(&self) -> Result<&Dense<RatFun>> {
        match self {
            RfMatrix::Exact(m) => Ok(m),
            RfMatrix::Numeric(_) => Err(Error::MixedMode),
        }
    }

    pub fn as_numeric(&self) -> Result<&Dense<Complex64>> {
        match self {
            RfMatrix::Numeric(m) => Ok(m),
            RfMatrix::Exact(_) => Err(Error::MixedMode),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (RfMatrix::Exact(a), RfMatrix::Exact(b)) => Ok(RfMatrix::Exact(a.mul(b)?)),
            (RfMatrix::Numeric(a), RfMatrix::Numeric(b)) => Ok(RfMatrix::Numeric(a.mul(b)?)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (RfMatrix::Exact(a), RfMatrix::Exact(b)) => Ok(RfMatrix::Exact(a.add(b)?)),
            (RfMatrix::Numeric(a), RfMatrix::Numeric(b)) => Ok(RfMatrix::Numeric(a.add(b)?)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (RfMatrix::Exact(a), RfMatrix::Exact(b)) => Ok(RfMatrix::Exact(a.sub(b)?)),
            (RfMatrix::Numeric(a), RfMatrix::Numeric(b)) => Ok(RfMatrix::Numeric(a.sub(b)?)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn kron(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (RfMatrix::Exact(a), RfMatrix::Exact(b)) => Ok(RfMatrix::Exact(a.kron(b))),
            (RfMatrix::Numeric(a), RfMatrix::Numeric(b)) => Ok(RfMatrix::Numeric(a.kron(b))),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            RfMatrix::Exact(a) => RfMatrix::Exact(a.transpose()),
            RfMatrix::Numeric(a) => RfMatrix::Numeric(a.transpose()),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match self {
            RfMatrix::Exact(a) => Ok(RfMatrix::Exact(exact_linalg::inverse(a)?)),
            RfMatrix::Numeric(a) => Ok(RfMatrix::Numeric(numeric::inverse(a)?)),
        }
    }

    /// Rank over the fraction field (exact) or by singular-value threshold.
    pub fn rank(&self) -> usize {
        match self {
            RfMatrix::Exact(a) => exact_linalg::rank(a),
            RfMatrix::Numeric(a) => numeric::rank(a, numeric::SVD_REL_TOL),
        }
    }

    pub fn partial_trace(&self, slot: usize, dims: &[usize]) -> Result<Self> {
        match self {
            RfMatrix::Exact(a) => Ok(RfMatrix::Exact(a.partial_trace(slot, dims)?)),
            RfMatrix::Numeric(a) => Ok(RfMatrix::Numeric(a.partial_trace(slot, dims)?)),
        }
    }

    pub fn nullspace(&self) -> Basis {
        match self {
            RfMatrix::Exact(a) => Basis::Exact(exact_linalg::nullspace(a)),
            RfMatrix::Numeric(a) => Basis::Numeric(numeric::nullspace(a, numeric::SVD_REL_TOL).0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RfMatrix::Exact(a) => a.is_zero(),
            RfMatrix::Numeric(a) => a.is_zero(),
        }
    }

    /// Rows of entry strings: RatFun grammar, or `re+im*i` for numeric mode.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        match self {
            RfMatrix::Exact(a) => a.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            RfMatrix::Numeric(a) => {
                a.to_rows().iter().map(|r| r.iter().map(|x| format_complex(*x)).collect()).collect()
            }
        }
    }

    pub fn from_exact_strings(rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| s.parse::<RatFun>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(RfMatrix::Exact(Dense::from_rows(parsed)?))
    }
}

pub fn format_complex(x: Complex64) -> String {
    if x.im == 0.0 {
        format!("{}", x.re)
    } else if x.im < 0.0 {
        format!("{}-{}*i", x.re, -x.im)
    } else {
        format!("{}+{}*i", x.re, x.im)
    }
}

/// Serializable form of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub mode: String,
    pub rows: Vec<Vec<String>>,
}

impl From<&RfMatrix> for MatrixJson {
    fn from(m: &RfMatrix) -> Self {
        MatrixJson { mode: if m.is_exact() { "exact" } else { "numeric" }.into(), rows: m.to_strings() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_mode_is_rejected() {
        let a = RfMatrix::Exact(Dense::identity(2));
        let b = RfMatrix::Numeric(Dense::identity(2));
        assert_eq!(a.mul(&b), Err(Error::MixedMode));
        assert_eq!(a.kron(&b), Err(Error::MixedMode));
        assert!(a.add(&a).is_ok());
    }

    #[test]
    fn string_round_trip() {
        let rows = vec![vec!["(z^2 - 1)/(z - 1)".to_string(), "q^-1".into()], vec!["0".into(), "1/2*h".into()]];
        let m = RfMatrix::from_exact_strings(&rows).unwrap();
        assert_eq!(m.to_strings(), vec![vec!["z + 1".to_string(), "1/q".into()], vec!["0".into(), "1/2*h".into()]]);
        assert_eq!(RfMatrix::from_exact_strings(&m.to_strings()).unwrap(), m);
    }
}
