//! The trigonometric R-matrix on two fundamental sl2 evaluation modules and
//! the identities it satisfies.
//!
//! Basis order is `(e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2)`. For evaluation
//! parameters `a`, `b` the spectral argument is `z·a/b`.

use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{exact_linalg, leading_form_ratio, Degeneration, Dense, MPoly, RatFun, Scalar, Var};
use crate::verdict::{combine, Verdict};

/// 4×4 trigonometric R-matrix with its spectral argument.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigR {
    pub matrix: Dense<RatFun>,
    pub spectral_arg: RatFun,
}

/// Entries of the trigonometric R-matrix at spectral argument `x`, over any
/// field containing `x` and `q`.
pub fn trig_r<T: Scalar>(x: &T, q: &T) -> Result<Dense<T>> {
    let qi = q.inv()?;
    let qi2 = qi.mul(&qi);
    let den = x.sub(&qi2).inv()?;
    let one = T::one();
    let diag = qi.mul(&x.sub(&one)).mul(&den);
    let upper = one.sub(&qi2).mul(&den);
    let lower = x.mul(&one.sub(&qi2)).mul(&den);
    let z = T::zero();
    Dense::from_rows(vec![
        vec![one.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), diag.clone(), upper, z.clone()],
        vec![z.clone(), lower, diag, z.clone()],
        vec![z.clone(), z.clone(), z, one],
    ])
}

pub fn build_trig_r(spectral_arg: &RatFun) -> Result<TrigR> {
    if spectral_arg.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(TrigR { matrix: trig_r(spectral_arg, &RatFun::var(Var::Q))?, spectral_arg: spectral_arg.clone() })
}

/// `z·a/b`, the argument of `R_{V1(a),V1(b)}(z)`.
pub fn evaluation_arg(z: &RatFun, a: &RatFun, b: &RatFun) -> Result<RatFun> {
    z.mul_ref(a).div_ref(b)
}

/// `R_{V1(a),V1(b)}(z)`.
pub fn r_ab(z: &RatFun, a: &RatFun, b: &RatFun) -> Result<Dense<RatFun>> {
    trig_r(&evaluation_arg(z, a, b)?, &RatFun::var(Var::Q))
}

/// Yang matrix `(u + hP)/(u + h)`.
pub fn yang_r(u: &RatFun) -> Result<Dense<RatFun>> {
    let h = RatFun::var(Var::H);
    let s = u.add_ref(&h).inv()?;
    let id: Dense<RatFun> = Dense::identity(4);
    let p: Dense<RatFun> = Dense::permutation(2);
    Ok(id.scale(u).add(&p.scale(&h))?.scale(&s))
}

pub fn flip() -> Dense<RatFun> {
    Dense::permutation(2)
}

/// Which R-matrix family a Yang-Baxter check runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YbeModel {
    /// Multiplicative spectral parameters `(z, zw, w)`.
    Trigonometric,
    /// Additive parameters `(u, u+v, v)`.
    Yang,
    /// Trigonometric matrix with entry (2,3) doubled; must fail.
    PerturbedTrigonometric,
}

fn perturbed(x: &RatFun) -> Result<Dense<RatFun>> {
    let mut m = trig_r(x, &RatFun::var(Var::Q))?;
    let e = m.get(1, 2).scale(&crate::field::rat_int(2));
    m.set(1, 2, e);
    Ok(m)
}

/// `R12(x) R13(xy) R23(y) - R23(y) R13(xy) R12(x)` on `(C^2)^{⊗3}`.
pub fn ybe_difference(
    builder: impl Fn(&RatFun) -> Result<Dense<RatFun>>,
    x: &RatFun,
    xy: &RatFun,
    y: &RatFun,
) -> Result<Dense<RatFun>> {
    let (r12, r13, r23) = (builder(x)?, builder(xy)?, builder(y)?);
    let id: Dense<RatFun> = Dense::identity(8);
    let lhs = id
        .apply_two_site_left(&r23, 1, 2, 2, 3)?
        .apply_two_site_left(&r13, 0, 2, 2, 3)?
        .apply_two_site_left(&r12, 0, 1, 2, 3)?;
    let rhs = id
        .apply_two_site_left(&r12, 0, 1, 2, 3)?
        .apply_two_site_left(&r13, 0, 2, 2, 3)?
        .apply_two_site_left(&r23, 1, 2, 2, 3)?;
    lhs.sub(&rhs)
}

pub fn check_ybe(model: YbeModel) -> Result<Verdict> {
    let (z, w) = (RatFun::var(Var::Z), RatFun::var(Var::W));
    let (u, v) = (RatFun::var(Var::U), RatFun::var(Var::V));
    let q = RatFun::var(Var::Q);
    let diff = match model {
        YbeModel::Trigonometric => ybe_difference(|x| trig_r(x, &q), &z, &z.mul_ref(&w), &w)?,
        YbeModel::PerturbedTrigonometric => ybe_difference(perturbed, &z, &z.mul_ref(&w), &w)?,
        YbeModel::Yang => ybe_difference(yang_r, &u, &u.add_ref(&v), &v)?,
    };
    let name = match model {
        YbeModel::Trigonometric => "ybe",
        YbeModel::Yang => "ybe-yang",
        YbeModel::PerturbedTrigonometric => "ybe-perturbed",
    };
    Ok(Verdict::exact(name, &diff))
}

/// Entrywise leading-form ratio of the middle block, giving the Yang matrix
/// `(1/(u+h))[[u,h],[h,u]]` for the trigonometric R-matrix at argument `z`.
pub fn yang_limit(r: &TrigR, subs: Degeneration, order: usize) -> Result<Dense<RatFun>> {
    if r.spectral_arg != RatFun::var(Var::Z) {
        return Err(Error::InvalidSpec("the Yang limit needs spectral argument z".into()));
    }
    let block = r.matrix.submatrix(&[1, 2], &[1, 2]);
    block.try_map(|e| leading_form_ratio(e, subs, order))
}

/// `f` with `(f·R)(e1⊗e1) = e1⊗e1` and the normalized matrix `f·R`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationResult {
    pub f: RatFun,
    pub normalized: Dense<RatFun>,
}

pub fn normalize(m: &Dense<RatFun>) -> Result<NormalizationResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Shape("empty matrix".into()));
    }
    let c = m.get(0, 0).clone();
    if c.is_zero() || (1..m.rows()).any(|i| !m.get(i, 0).is_zero()) {
        return Err(Error::NotNormalizable);
    }
    let f = c.inv()?;
    Ok(NormalizationResult { normalized: m.scale(&f), f })
}

fn eval_at(p: &MPoly, point: &RatFun) -> Result<RatFun> {
    RatFun::from_poly(p.clone()).substitute_one(Var::Z, point)
}

/// Multiplicity of `z = point` as a root of `p`.
fn root_multiplicity(p: &MPoly, point: &RatFun) -> Result<(usize, RatFun)> {
    let mut d = p.clone();
    let mut k = 0;
    loop {
        if d.is_zero() {
            return Err(Error::Inconsistent("zero polynomial has no finite root multiplicity".into()));
        }
        let v = eval_at(&d, point)?;
        if !v.is_zero() {
            return Ok((k, v));
        }
        d = d.derivative(Var::Z);
        k += 1;
    }
}

/// Largest multiplicity of `z = point` in the canonical denominators.
pub fn pole_order_at(m: &Dense<RatFun>, point: &RatFun) -> Result<usize> {
    let mut best = 0;
    for x in m.data() {
        if x.is_zero() {
            continue;
        }
        best = best.max(root_multiplicity(x.den(), point)?.0);
    }
    Ok(best)
}

/// A pole limit `lim_{z→p} (z-p)^R M` and the normalized R-matrix `P∘` of it.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleLimit {
    pub point: RatFun,
    pub order: usize,
    pub limit: Dense<RatFun>,
    pub normalized: Dense<RatFun>,
}

fn factorial(n: usize) -> RatFun {
    RatFun::int((1..=n as i64).product::<i64>().max(1))
}

/// Exact `lim_{z→point} (z-point)^order · M`; an entry whose denominator
/// vanishes to order exactly `order` contributes `num(p)·order!/den^{(order)}(p)`.
pub fn residue_limit(m: &Dense<RatFun>, point: &RatFun, order: usize) -> Result<PoleLimit> {
    let mut out = Vec::with_capacity(m.data().len());
    for x in m.data() {
        if x.is_zero() {
            out.push(RatFun::zero());
            continue;
        }
        let (mult, _) = root_multiplicity(x.den(), point)?;
        if mult > order {
            return Err(Error::PoleTooHigh { order, found: mult });
        }
        if mult < order {
            out.push(RatFun::zero());
            continue;
        }
        let mut d = x.den().clone();
        for _ in 0..order {
            d = d.derivative(Var::Z);
        }
        let num = eval_at(x.num(), point)?;
        let den = eval_at(&d, point)?;
        out.push(num.mul_ref(&factorial(order)).div_ref(&den)?);
    }
    let limit = Dense::new(m.rows(), m.cols(), out)?;
    if limit.is_zero() {
        return Err(Error::OrderMismatch { order });
    }
    let normalized = if limit.shape() == (4, 4) { flip().mul(&limit)? } else { limit.clone() };
    Ok(PoleLimit { point: point.clone(), order, limit, normalized })
}

/// `(f R_{V,W}(z))·(f_{W,V}(z^{-1}) P R_{W,V}(z^{-1}) P) = Id` for
/// `V = V1(a)`, `W = V1(b)`.
pub fn check_inverse_identity(a: &RatFun, b: &RatFun) -> Result<Verdict> {
    let z = RatFun::var(Var::Z);
    let zi = z.inv()?;
    let vw = normalize(&r_ab(&z, a, b)?)?;
    let wv = normalize(&r_ab(&zi, b, a)?)?;
    let p = flip();
    let inv = p.mul(&wv.normalized)?.mul(&p)?;
    let prod = vw.normalized.mul(&inv)?;
    let diff = prod.sub(&Dense::identity(4))?;
    Ok(Verdict::exact("inverse", &diff).with("a", a.to_string()).with("b", b.to_string()))
}

/// The two composites of the hexagon `U⊗V⊗W → W⊗V⊗U` with
/// `U = V1(a)`, `V = V1(b)`, `W = V1(c)`. With `control` the `U,V` factor
/// uses the transposed R-matrix and the identity must fail.
pub fn hexagon_paths(a: &RatFun, b: &RatFun, c: &RatFun, control: bool) -> Result<(Dense<RatFun>, Dense<RatFun>)> {
    let (z, w) = (RatFun::var(Var::Z), RatFun::var(Var::W));
    let zw = z.mul_ref(&w);
    let p = flip();
    let pr = |x: &RatFun, s: &RatFun, t: &RatFun| -> Result<Dense<RatFun>> { p.mul(&r_ab(x, s, t)?) };
    let uv = if control { p.mul(&r_ab(&z, a, b)?.transpose())? } else { pr(&z, a, b)? };
    let uw = pr(&zw, a, c)?;
    let vw = pr(&w, b, c)?;
    let id: Dense<RatFun> = Dense::identity(8);
    let top = id
        .apply_two_site_left(&uv, 0, 1, 2, 3)?
        .apply_two_site_left(&uw, 1, 2, 2, 3)?
        .apply_two_site_left(&vw, 0, 1, 2, 3)?;
    let bottom = id
        .apply_two_site_left(&vw, 1, 2, 2, 3)?
        .apply_two_site_left(&uw, 0, 1, 2, 3)?
        .apply_two_site_left(&uv, 1, 2, 2, 3)?;
    Ok((top, bottom))
}

pub fn check_hexagon(a: &RatFun, b: &RatFun, c: &RatFun, control: bool) -> Result<Verdict> {
    let (top, bottom) = hexagon_paths(a, b, c, control)?;
    let name = if control { "hexagon-control" } else { "hexagon" };
    Ok(Verdict::exact(name, &top.sub(&bottom)?)
        .with("a", a.to_string())
        .with("b", b.to_string())
        .with("c", c.to_string()))
}

/// Coproduct conventions for the finite quantum group on `C^2 ⊗ C^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coproduct {
    /// `Δ(E) = E⊗K + 1⊗E`, `Δ(F) = F⊗1 + K⁻¹⊗F`.
    Standard,
    /// The opposite coproduct `E⊗1 + K⊗E`, `F⊗K⁻¹ + 1⊗F`.
    Opposite,
}

impl Coproduct {
    pub fn name(self) -> &'static str {
        match self {
            Coproduct::Standard => "standard",
            Coproduct::Opposite => "opposite",
        }
    }
}

/// `Δ(E)`, `Δ(F)`, `Δ(K)` on the 4-dimensional module.
pub fn coproduct_generators(conv: Coproduct) -> Result<[Dense<RatFun>; 3]> {
    let q = RatFun::var(Var::Q);
    let z0 = RatFun::zero;
    let o = RatFun::one;
    let k = Dense::from_rows(vec![vec![q.clone(), z0()], vec![z0(), q.inv()?]])?;
    let ki = Dense::from_rows(vec![vec![q.inv()?, z0()], vec![z0(), q.clone()]])?;
    let e = Dense::from_rows(vec![vec![z0(), o()], vec![z0(), z0()]])?;
    let f = Dense::from_rows(vec![vec![z0(), z0()], vec![o(), z0()]])?;
    let id: Dense<RatFun> = Dense::identity(2);
    let (de, df) = match conv {
        Coproduct::Standard => (e.kron(&k).add(&id.kron(&e))?, f.kron(&id).add(&ki.kron(&f))?),
        Coproduct::Opposite => (e.kron(&id).add(&k.kron(&e))?, f.kron(&ki).add(&id.kron(&f))?),
    };
    Ok([de, df, k.kron(&k)])
}

fn commutator(a: &Dense<RatFun>, b: &Dense<RatFun>) -> Result<Dense<RatFun>> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Checks that `P∘R(z·a/b)` commutes with `Δ(E), Δ(F), Δ(K)`. Both coproduct
/// conventions are tried; the verdict records which one intertwines. With
/// `control` the bare flip `P` is tested instead and must fail.
pub fn check_zero_mode_intertwiner(a: &RatFun, b: &RatFun, control: bool) -> Result<Verdict> {
    let op = if control { flip() } else { flip().mul(&r_ab(&RatFun::var(Var::Z), a, b)?)? };
    let mut results = Vec::new();
    for conv in [Coproduct::Standard, Coproduct::Opposite] {
        let gens = coproduct_generators(conv)?;
        let mut parts = Vec::new();
        for (name, g) in ["E", "F", "K"].iter().zip(gens.iter()) {
            parts.push(Verdict::exact(format!("{}:{name}", conv.name()), &commutator(&op, g)?));
        }
        results.push((conv, combine(conv.name(), parts)));
    }
    let selected = results.iter().find(|(_, v)| v.passed()).map(|(c, _)| c.name());
    let name = if control { "intertwine-control" } else { "intertwine" };
    let mut v = Verdict::pass_if(name, selected.is_some())
        .with("a", a.to_string())
        .with("b", b.to_string())
        .with("selected_convention", selected.map(|s| json!(s)).unwrap_or(json!(null)));
    for (conv, r) in results {
        v = v.with(conv.name(), serde_json::to_value(r).unwrap());
    }
    Ok(v)
}

/// Exact rank over the fraction field.
pub fn rank(m: &Dense<RatFun>) -> usize {
    exact_linalg::rank(m)
}
