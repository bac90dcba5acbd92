//! Transfer-matrix spectra by sampling, diagonalization and numerator fitting.

use rayon::prelude::*;
use serde::Serialize;

use super::monodromy::sector_indices;
use super::{Chain, C};
use crate::error::{Error, Result};
use crate::field::{numeric, Dense};
use crate::rmatrix::trig_r;

/// One eigenvalue branch `λ(z) = N(z) / ∏_l (z a/b_l − q⁻²)`.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    /// Coefficients of `N`, ascending, degree ≤ L.
    pub numerator: Vec<C>,
    /// Unit eigenvector in the sector basis.
    pub eigenvector: Vec<C>,
    /// Relative residual of the numerator fit on the samples.
    pub fit_residual: f64,
    /// Another branch coincides with this one at the reference sample.
    pub degenerate: bool,
}

impl Branch {
    pub fn numerator_at(&self, z: C) -> C {
        numeric::horner(&self.numerator, z)
    }

    pub fn eval(&self, chain: &Chain<C>, z: C) -> C {
        self.numerator_at(z) / chain.denominator(z)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    /// Number of lowered spins.
    pub sector: usize,
    /// Basis indices of the sector inside `W`.
    pub indices: Vec<usize>,
    pub branches: Vec<Branch>,
    pub samples: Vec<C>,
}

/// Default number of sample points.
pub fn default_samples(l: usize) -> usize {
    2 * l + 8
}

/// Block of `T(z)` on the sector spanned by `idx`, computed by applying the
/// monodromy only to the needed columns.
pub fn transfer_block(chain: &Chain<C>, z: C, idx: &[usize]) -> Result<Dense<C>> {
    let l = chain.len();
    let n = l + 1;
    let dim = 1usize << l;
    let k = idx.len();
    // Columns e_1⊗e_s then e_2⊗e_s.
    let mut m = Dense::from_fn(2 * dim, 2 * k, |r, c| {
        let (aux, s) = (c / k, idx[c % k]);
        if r == aux * dim + s {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    for s in 0..l {
        let x = z * chain.aux / chain.sites[s];
        let r = trig_r(&x, &chain.q).map_err(|_| Error::NearPole { magnitude: f64::INFINITY })?;
        m = m.apply_two_site_left(&r, 0, 1 + s, 2, n)?;
    }
    let u = chain.twist;
    Ok(Dense::from_fn(k, k, |i, j| u * m.get(idx[i], j) + m.get(dim + idx[i], k + j) / u))
}

/// Eigenvalue branches of the twisted transfer matrix in sector `m`.
pub fn spectrum(chain: &Chain<C>, m: usize, seed: u64) -> Result<SpectrumResult> {
    spectrum_with_samples(chain, m, seed, default_samples(chain.len()))
}

/// As [`spectrum`] with an explicit number of sample points (at least L+2,
/// so the degree-L numerator fit is overdetermined).
pub fn spectrum_with_samples(chain: &Chain<C>, m: usize, seed: u64, count: usize) -> Result<SpectrumResult> {
    let l = chain.len();
    if m > l {
        return Err(Error::Shape(format!("sector {m} exceeds L = {l}")));
    }
    if count < l + 2 {
        return Err(Error::InvalidSpec(format!("need at least {} samples for L = {l}", l + 2)));
    }
    let idx = sector_indices(l, m);
    let k = idx.len();
    let samples = chain.sample_points(count, seed);
    let decomps: Vec<(Vec<C>, Vec<Vec<C>>)> =
        samples.par_iter().map(|&z| numeric::eig(&transfer_block(chain, z, &idx)?)).collect::<Result<_>>()?;

    let (ref_vals, ref_vecs) = &decomps[0];
    let scale = ref_vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let degenerate: Vec<bool> =
        (0..k).map(|i| (0..k).any(|j| j != i && (ref_vals[i] - ref_vals[j]).norm() < 1e-8 * scale)).collect();

    // values[b][s]: branch b at sample s.
    let mut values = vec![vec![C::new(0.0, 0.0); samples.len()]; k];
    for (s, (vals, vecs)) in decomps.iter().enumerate() {
        let mut used = vec![false; k];
        for b in 0..k {
            let (best, ov) = (0..k)
                .filter(|&j| !used[j])
                .map(|j| (j, overlap(&ref_vecs[b], &vecs[j])))
                .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if ov < 0.5 {
                return Err(Error::BranchMatch { overlap: ov });
            }
            used[best] = true;
            values[b][s] = vals[best];
        }
    }

    let vander = Dense::from_fn(samples.len(), l + 1, |s, j| samples[s].powi(j as i32));
    let mut branches = Vec::with_capacity(k);
    for b in 0..k {
        let nums: Vec<C> = samples.iter().zip(&values[b]).map(|(&z, &v)| v * chain.denominator(z)).collect();
        let coeffs = numeric::lstsq(&vander, &nums)?;
        let top = nums.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
        let fit_residual = samples
            .iter()
            .zip(&nums)
            .map(|(&z, &n)| (numeric::horner(&coeffs, z) - n).norm() / top)
            .fold(0.0, f64::max);
        branches.push(Branch {
            numerator: coeffs,
            eigenvector: ref_vecs[b].clone(),
            fit_residual,
            degenerate: degenerate[b],
        });
    }
    Ok(SpectrumResult { sector: m, indices: idx, branches, samples })
}

fn overlap(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainSpec;

    #[test]
    fn single_site_vacuum_branch() {
        let ch = ChainSpec::random_numeric(1, 3, true).numeric().unwrap();
        let sp = spectrum(&ch, 0, 0).unwrap();
        assert_eq!(sp.branches.len(), 1);
        let z = C::new(0.3, 1.1);
        let expect = ch.twist + ch.vacuum_d(z) / ch.twist;
        assert!((sp.branches[0].eval(&ch, z) - expect).norm() < 1e-10);
    }

    #[test]
    fn block_matches_full_transfer() {
        let ch = ChainSpec::random_numeric(3, 5, false).numeric().unwrap();
        let z = C::new(0.4, -0.9);
        let full = crate::chain::transfer(&ch, &z).unwrap();
        let idx = sector_indices(3, 2);
        let blk = transfer_block(&ch, z, &idx).unwrap();
        let sub = full.submatrix(&idx, &idx);
        assert!(numeric::max_abs(&blk.sub(&sub).unwrap()) < 1e-12);
    }
}
