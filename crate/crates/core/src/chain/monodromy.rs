//! Monodromy and twisted transfer matrices, and the identities between them.
//!
//! Tensor slots are ordered auxiliary space(s) first, then sites `1..L`;
//! the basis vector `e1` is spin up. The monodromy is `R_{0L} ⋯ R_{01}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Chain, C};
use crate::error::{Error, Result};
use crate::field::{numeric, Dense, RatFun, Scalar, Var};
use crate::rmatrix::trig_r;
use crate::verdict::{combine, Verdict};

/// Residual tolerance for numeric linear identities.
pub const NUMERIC_TOL: f64 = 1e-10;

/// Field of a chain computation: how to pick spectral parameters and how to
/// compare two operators.
pub trait ChainScalar: Scalar {
    /// The `k`-th spectral parameter: a symbol in exact mode, a seeded
    /// random point in numeric mode.
    fn spectral(k: usize, seed: u64) -> Self;
    fn compare(check: &str, lhs: &Dense<Self>, rhs: &Dense<Self>) -> Result<Verdict>;
}

impl ChainScalar for RatFun {
    fn spectral(k: usize, _seed: u64) -> Self {
        RatFun::var([Var::Z, Var::W, Var::V][k % 3])
    }

    fn compare(check: &str, lhs: &Dense<Self>, rhs: &Dense<Self>) -> Result<Verdict> {
        Ok(Verdict::exact(check, &lhs.sub(rhs)?).with("mode", "exact"))
    }
}

impl ChainScalar for C {
    fn spectral(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(k as u64));
        C::from_polar(rng.random_range(0.7..1.4), rng.random_range(0.0..std::f64::consts::TAU))
    }

    fn compare(check: &str, lhs: &Dense<Self>, rhs: &Dense<Self>) -> Result<Verdict> {
        let scale = numeric::max_abs(lhs).max(numeric::max_abs(rhs)).max(1.0);
        let res = numeric::max_abs(&lhs.sub(rhs)?) / scale;
        Ok(Verdict::numeric(check, res, NUMERIC_TOL).with("mode", "numeric"))
    }
}

/// The `2^{L+1}`-dimensional monodromy with its auxiliary blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Monodromy<T> {
    pub matrix: Dense<T>,
}

impl<T: Scalar> Monodromy<T> {
    fn block(&self, r: usize, c: usize) -> Dense<T> {
        let n = self.matrix.rows() / 2;
        let rows: Vec<usize> = (r * n..(r + 1) * n).collect();
        let cols: Vec<usize> = (c * n..(c + 1) * n).collect();
        self.matrix.submatrix(&rows, &cols)
    }

    pub fn a(&self) -> Dense<T> {
        self.block(0, 0)
    }
    pub fn b(&self) -> Dense<T> {
        self.block(0, 1)
    }
    pub fn c(&self) -> Dense<T> {
        self.block(1, 0)
    }
    pub fn d(&self) -> Dense<T> {
        self.block(1, 1)
    }
}

/// Left-multiplies `m` (on `n` slots) by the monodromy with auxiliary slot
/// `aux` whose sites occupy slots `first..first+L`.
fn apply_monodromy<T: Scalar>(
    chain: &Chain<T>,
    z: &T,
    aux_param: &T,
    aux: usize,
    first: usize,
    n: usize,
    mut m: Dense<T>,
) -> Result<Dense<T>> {
    for l in 0..chain.len() {
        let x = z.mul(aux_param).mul(&chain.sites[l].inv()?);
        let r = trig_r(&x, &chain.q).map_err(near_pole)?;
        m = m.apply_two_site_left(&r, aux, first + l, 2, n)?;
    }
    Ok(m)
}

fn near_pole(e: Error) -> Error {
    match e {
        Error::DivisionByZero => Error::NearPole { magnitude: f64::INFINITY },
        e => e,
    }
}

pub fn monodromy<T: Scalar>(chain: &Chain<T>, z: &T) -> Result<Monodromy<T>> {
    let n = chain.len() + 1;
    let id = Dense::identity(1 << n);
    Ok(Monodromy { matrix: apply_monodromy(chain, z, &chain.aux, 0, 1, n, id)? })
}

/// `T(z) = u·A(z) + u⁻¹·D(z)`.
pub fn transfer<T: Scalar>(chain: &Chain<T>, z: &T) -> Result<Dense<T>> {
    let m = monodromy(chain, z)?;
    let u = &chain.twist;
    m.a().scale(u).add(&m.d().scale(&u.inv()?))
}

/// `R_{12}(z) T_{13}(zw) T_{23}(w) = T_{23}(w) T_{13}(zw) R_{12}(z)` on
/// `aux ⊗ aux ⊗ W`.
pub fn check_rtt<T: ChainScalar>(chain: &Chain<T>, seed: u64) -> Result<Verdict> {
    check_rtt_with(chain, seed, false)
}

/// With `control` the intertwiner is replaced by `P R(z) P`, which must fail.
pub fn check_rtt_with<T: ChainScalar>(chain: &Chain<T>, seed: u64, control: bool) -> Result<Verdict> {
    let z = T::spectral(0, seed);
    let w = T::spectral(1, seed);
    let zw = z.mul(&w);
    let n = chain.len() + 2;
    let mut r12 = trig_r(&z, &chain.q).map_err(near_pole)?;
    if control {
        let p = Dense::permutation(2);
        r12 = p.mul(&r12)?.mul(&p)?;
    }
    let a = &chain.aux;
    let id = Dense::identity(1 << n);

    let lhs = apply_monodromy(chain, &w, a, 1, 2, n, id.clone())?;
    let lhs = apply_monodromy(chain, &zw, a, 0, 2, n, lhs)?;
    let lhs = lhs.apply_two_site_left(&r12, 0, 1, 2, n)?;

    let rhs = id.apply_two_site_left(&r12, 0, 1, 2, n)?;
    let rhs = apply_monodromy(chain, &zw, a, 0, 2, n, rhs)?;
    let rhs = apply_monodromy(chain, &w, a, 1, 2, n, rhs)?;
    let name = if control { "rtt-control" } else { "rtt" };
    Ok(T::compare(name, &lhs, &rhs)?.with("L", chain.len()))
}

/// Total `S^z` weight (number of up spins minus down spins) of each basis
/// vector of `W`.
pub fn weights(l: usize) -> Vec<i32> {
    (0..1usize << l).map(|i| l as i32 - 2 * i.count_ones() as i32).collect()
}

/// Basis indices of `W` with exactly `m` lowered spins.
pub fn sector_indices(l: usize, m: usize) -> Vec<usize> {
    (0..1usize << l).filter(|i| i.count_ones() as usize == m).collect()
}

/// `[T(z₁), T(z₂)] = 0` and `[T(z₁), S^z] = 0`.
pub fn check_commute<T: ChainScalar>(chain: &Chain<T>, seed: u64) -> Result<Verdict> {
    check_commute_with(chain, seed, false)
}

/// With `control` the second transfer matrix is replaced by the single
/// block `A(z₂)`, which does not commute with `T(z₁)`.
pub fn check_commute_with<T: ChainScalar>(chain: &Chain<T>, seed: u64, control: bool) -> Result<Verdict> {
    let z1 = T::spectral(0, seed);
    let z2 = T::spectral(1, seed);
    let t1 = transfer(chain, &z1)?;
    let t2 = if control { monodromy(chain, &z2)?.a() } else { transfer(chain, &z2)? };
    let comm = T::compare("transfer-commute", &t1.mul(&t2)?, &t2.mul(&t1)?)?;
    let w = weights(chain.len());
    let sz = Dense::from_fn(w.len(), w.len(), |i, j| if i == j { T::from_i64(w[i] as i64) } else { T::zero() });
    let weight = T::compare("weight-commute", &t1.mul(&sz)?, &sz.mul(&t1)?)?;
    let name = if control { "commute-control" } else { "commute" };
    Ok(combine(name, vec![comm, weight]).with("L", chain.len()))
}

/// Transfer matrix with auxiliary space `V₁(a)⊗V₁(a′)`, twisted by
/// `diag(u,u⁻¹)` on each factor (only the first when `control`), compared
/// with `T_{V₁(a)}(z)·T_{V₁(a′)}(z)`.
pub fn check_multiplicativity<T: ChainScalar>(chain: &Chain<T>, aux2: &T, control: bool, seed: u64) -> Result<Verdict> {
    let z = T::spectral(0, seed);
    let l = chain.len();
    let n = l + 2;
    let big = apply_monodromy(chain, &z, aux2, 1, 2, n, Dense::identity(1 << n))?;
    let big = apply_monodromy(chain, &z, &chain.aux, 0, 2, n, big)?;
    let u = chain.twist.clone();
    let ui = u.inv()?;
    let tw = [u.clone(), ui.clone()];
    let tw2 = if control { [T::one(), T::one()] } else { [u, ui] };
    let dim = 1usize << l;
    let mut lhs = Dense::zeros(dim, dim);
    for (i, t1) in tw.iter().enumerate() {
        for (j, t2) in tw2.iter().enumerate() {
            let off = (2 * i + j) * dim;
            let f = t1.mul(t2);
            lhs = lhs.add(&Dense::from_fn(dim, dim, |r, c| big.get(off + r, off + c).mul(&f)))?;
        }
    }
    let second = Chain { aux: aux2.clone(), ..chain.clone() };
    let rhs = transfer(chain, &z)?.mul(&transfer(&second, &z)?)?;
    let name = if control { "multiplicativity-control" } else { "multiplicativity" };
    Ok(T::compare(name, &lhs, &rhs)?.with("L", l))
}

/// Eigenvalues `(a(z), d(z))` of `A`, `D` on the all-up vacuum, computed
/// from the monodromy; errors if the vacuum is not an eigenvector.
pub fn vacuum_eigs(chain: &Chain<RatFun>) -> Result<(RatFun, RatFun)> {
    let z = RatFun::var(Var::Z);
    let m = monodromy(chain, &z)?;
    let mut out = Vec::new();
    for blk in [m.a(), m.d()] {
        let col: Vec<RatFun> = (0..blk.rows()).map(|i| blk.get(i, 0).clone()).collect();
        if col[1..].iter().any(|x| !x.is_zero()) {
            return Err(Error::Inconsistent("all-up vector is not an eigenvector".into()));
        }
        out.push(col[0].clone());
    }
    let d = out.pop().unwrap();
    let a = out.pop().unwrap();
    Ok((a, d))
}

/// Closed form `∏_l q⁻¹(z a/b_l − 1)/(z a/b_l − q⁻²)`.
pub fn vacuum_d_formula(chain: &Chain<RatFun>, z: &RatFun) -> Result<RatFun> {
    let qi = chain.q.inv()?;
    let qi2 = qi.mul_ref(&qi);
    let mut d = RatFun::one();
    for l in 0..chain.len() {
        let x = chain.site_arg(z, l)?;
        d = d.mul_ref(&qi.mul_ref(&(&x - &RatFun::one())).div_ref(&(&x - &qi2))?);
    }
    Ok(d)
}
