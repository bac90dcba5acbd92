//! XXZ chains built from two-dimensional fundamental evaluation modules.

pub mod baxter;
pub mod monodromy;
pub mod spectrum;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::parse::parse_complex;
use crate::field::{RatFun, Scalar};

pub use baxter::{bethe_check, bethe_solve, solve_q, BetheData, QPolynomial, TqPairing};
pub use monodromy::{
    check_commute, check_commute_with, check_multiplicativity, check_rtt, check_rtt_with, monodromy, transfer,
    vacuum_eigs, Monodromy,
};
pub use spectrum::{spectrum, spectrum_with_samples, Branch, SpectrumResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Numeric,
}

/// Serialized chain description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    #[serde(rename = "L")]
    pub l: usize,
    pub site_params: Vec<String>,
    pub aux_param: String,
    pub twist: String,
    pub q: String,
    pub mode: Mode,
    /// Seed for sample points in numeric procedures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parsed scalars of a chain over a field `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain<T> {
    pub sites: Vec<T>,
    pub aux: T,
    pub twist: T,
    pub q: T,
}

pub type C = Complex64;

impl ChainSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn check_shape(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidSpec("L must be at least 1".into()));
        }
        if self.site_params.len() != self.l {
            return Err(Error::InvalidSpec(format!("{} site parameters for L = {}", self.site_params.len(), self.l)));
        }
        Ok(())
    }

    pub fn exact(&self) -> Result<Chain<RatFun>> {
        self.check_shape()?;
        if self.mode != Mode::Exact {
            return Err(Error::MixedMode);
        }
        let parse = |s: &str| s.parse::<RatFun>();
        let c = Chain {
            sites: self.site_params.iter().map(|s| parse(s)).collect::<Result<_>>()?,
            aux: parse(&self.aux_param)?,
            twist: parse(&self.twist)?,
            q: parse(&self.q)?,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn numeric(&self) -> Result<Chain<C>> {
        self.check_shape()?;
        let c = match self.mode {
            Mode::Numeric => Chain {
                sites: self.site_params.iter().map(|s| parse_complex(s)).collect::<Result<_>>()?,
                aux: parse_complex(&self.aux_param)?,
                twist: parse_complex(&self.twist)?,
                q: parse_complex(&self.q)?,
            },
            // Exact specs with numeric values can be run numerically too.
            Mode::Exact => {
                let e = self.exact()?;
                let f = |x: &RatFun| -> Result<C> {
                    x.constant_value()
                        .map(|r| C::new(crate::field::poly::rat_to_f64(&r), 0.0))
                        .ok_or_else(|| Error::InvalidSpec(format!("`{x}` is not a number")))
                };
                Chain {
                    sites: e.sites.iter().map(f).collect::<Result<_>>()?,
                    aux: f(&e.aux)?,
                    twist: f(&e.twist)?,
                    q: f(&e.q)?,
                }
            }
        };
        c.validate()?;
        c.check_generic_q(self.l)?;
        Ok(c)
    }

    /// Seeded numeric chain with generic `q` and twist. Site parameters are
    /// all one when `homogeneous`, otherwise pairwise distinct.
    pub fn random_numeric(l: usize, seed: u64, homogeneous: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut unit = |lo: f64, hi: f64| -> C {
            let r = rng.random_range(lo..hi);
            let t = rng.random_range(0.2..1.2);
            C::from_polar(r, t)
        };
        let q = unit(0.75, 0.95);
        let twist = unit(0.6, 1.6);
        let sites: Vec<C> = (0..l).map(|_| if homogeneous { C::new(1.0, 0.0) } else { unit(0.5, 1.5) }).collect();
        ChainSpec {
            l,
            site_params: sites.iter().map(|c| crate::field::rfmatrix::format_complex(*c)).collect(),
            aux_param: "1".into(),
            twist: crate::field::rfmatrix::format_complex(twist),
            q: crate::field::rfmatrix::format_complex(q),
            mode: Mode::Numeric,
            seed: Some(seed),
        }
    }
}

impl<T: Scalar> Chain<T> {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.twist.is_zero() {
            return Err(Error::InvalidSpec("twist must be nonzero".into()));
        }
        if self.q.is_zero() || self.aux.is_zero() || self.sites.iter().any(|b| b.is_zero()) {
            return Err(Error::InvalidSpec("q and evaluation parameters must be nonzero".into()));
        }
        Ok(())
    }

    /// `z·a/b_l`.
    pub fn site_arg(&self, z: &T, l: usize) -> Result<T> {
        Ok(z.mul(&self.aux).mul(&self.sites[l].inv()?))
    }
}

impl Chain<C> {
    fn check_generic_q(&self, l: usize) -> Result<()> {
        let mut p = C::new(1.0, 0.0);
        for k in 1..=(2 * l + 4) {
            p *= self.q;
            if (p - 1.0).norm() <= 1e-6 {
                return Err(Error::Genericity(format!("q is within 1e-6 of a root of unity of order {k}")));
            }
        }
        Ok(())
    }

    /// Zeros of the transfer-matrix denominator: `z = b_l q^{-2} / a`.
    pub fn pole_points(&self) -> Vec<C> {
        let qi2 = 1.0 / (self.q * self.q);
        self.sites.iter().map(|b| b * qi2 / self.aux).collect()
    }

    /// Denominator `∏_l (z a/b_l - q^{-2})`.
    pub fn denominator(&self, z: C) -> C {
        let qi2 = 1.0 / (self.q * self.q);
        self.sites.iter().map(|b| z * self.aux / b - qi2).product()
    }

    /// Vacuum eigenvalue of `D`: `∏_l q^{-1}(z a/b_l - 1)/(z a/b_l - q^{-2})`.
    pub fn vacuum_d(&self, z: C) -> C {
        let qi = 1.0 / self.q;
        let num: C = self.sites.iter().map(|b| qi * (z * self.aux / b - 1.0)).product();
        num / self.denominator(z)
    }

    /// Numerator of the vacuum `D` eigenvalue.
    pub fn vacuum_d_numerator(&self, z: C) -> C {
        let qi = 1.0 / self.q;
        self.sites.iter().map(|b| qi * (z * self.aux / b - 1.0)).product()
    }

    /// `count` seeded sample points at distance at least `1e-2` (relative)
    /// from every pole.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c4a1);
        let poles = self.pole_points();
        let mut out: Vec<C> = Vec::with_capacity(count);
        while out.len() < count {
            let z = C::from_polar(rng.random_range(0.6..1.6), rng.random_range(0.0..std::f64::consts::TAU));
            let far = poles.iter().all(|p| (z - p).norm() > 1e-2 * p.norm().max(1.0));
            let distinct = out.iter().all(|w| (z - w).norm() > 1e-3);
            if far && distinct {
                out.push(z);
            }
        }
        out
    }
}
