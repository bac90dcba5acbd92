//! Equivariant cohomology of `T*P^n`, chambers of the torus `A = (C*)^n`,
//! stable envelopes from the support/diagonal/degree axioms, and geometric
//! R-matrices from wall-crossing.
//!
//! Fixed points are `p_0..p_n`; the tautological class `c` restricts to
//! `χ_0 = 0` at `p_0` and to `χ_i = u_i` at `p_i`. At `p_j` the normal weights
//! are, for every `k ≠ j`, the tangent weight `χ_j − χ_k` and the cotangent
//! weight `h − (χ_j − χ_k)`. For `n = 1` the single parameter is `u`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{exact_linalg, Dense, MPoly, RatFun, Rational, Var};
use crate::verdict::{combine, Verdict};

type Monomial = Vec<(Var, u32)>;

/// The equivariant parameter attached to coordinate `i ≥ 1`.
pub fn u_var(n: usize, i: usize) -> Var {
    debug_assert!(i >= 1 && i <= n);
    if n == 1 {
        Var::U
    } else {
        Var::Ui(i as u8)
    }
}

/// Restriction of `c` to `p_i`.
pub fn chi(n: usize, i: usize) -> MPoly {
    if i == 0 {
        MPoly::zero()
    } else {
        MPoly::var(u_var(n, i))
    }
}

fn u_vars(n: usize) -> Vec<Var> {
    (1..=n).map(|i| u_var(n, i)).collect()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidSpec(format!("n must be in 1..=8, got {n}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cohomology ring

/// `H_T(T*P^n) = Q[c, u, h] / (c·∏(c − u_i))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HtRing {
    pub n: usize,
}

/// Element `Σ_k a_k c^k`, `k ≤ n`. Coefficients may be localized (rational
/// in `u, h`); an honest class has polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtClass {
    pub n: usize,
    pub coeffs: Vec<RatFun>,
}

impl HtRing {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(HtRing { n })
    }

    /// The monic relation `c·∏(c − u_i)` as coefficients in `c`, low first.
    pub fn relation(&self) -> Vec<MPoly> {
        let mut p = vec![MPoly::zero(), MPoly::one()];
        for i in 1..=self.n {
            let root = chi(self.n, i);
            let mut next = vec![MPoly::zero(); p.len() + 1];
            for (k, a) in p.iter().enumerate() {
                next[k + 1] = next[k + 1].add(a);
                next[k] = next[k].sub(&a.mul(&root));
            }
            p = next;
        }
        p
    }

    /// Reduces an arbitrary expression in `c` (denominators free of `c`).
    pub fn reduce(&self, e: &RatFun) -> Result<HtClass> {
        if e.den().contains_var(Var::C) {
            return Err(Error::InvalidSpec("denominator depends on c".into()));
        }
        let den = RatFun::from_poly(e.den().clone());
        let mut coeffs: Vec<RatFun> = e
            .num()
            .to_univariate(Var::C)
            .into_iter()
            .map(|p| RatFun::from_poly(p).div_ref(&den).expect("nonzero denominator"))
            .collect();
        let rel = self.relation();
        let top = self.n + 1;
        while coeffs.len() > top {
            let lead = coeffs.pop().unwrap();
            let shift = coeffs.len() - top;
            for (k, r) in rel.iter().take(top).enumerate() {
                coeffs[shift + k] = coeffs[shift + k].sub_ref(&lead.mul_ref(&RatFun::from_poly(r.clone())));
            }
        }
        coeffs.resize(top, RatFun::zero());
        Ok(HtClass { n: self.n, coeffs })
    }

    /// The unique class of `c`-degree ≤ n with the given restrictions
    /// (Lagrange interpolation through `c = χ_i`).
    pub fn from_restrictions(&self, values: &[RatFun]) -> Result<HtClass> {
        if values.len() != self.n + 1 {
            return Err(Error::Shape(format!("expected {} restrictions", self.n + 1)));
        }
        let mut total = RatFun::zero();
        for (i, v) in values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            total = total.add_ref(&v.mul_ref(&lagrange(self.n, i)));
        }
        self.reduce(&total)
    }
}

/// `L_i(c) = ∏_{m≠i} (c − χ_m)/(χ_i − χ_m)`.
fn lagrange(n: usize, i: usize) -> RatFun {
    let c = MPoly::var(Var::C);
    let mut num = MPoly::one();
    let mut den = MPoly::one();
    for m in (0..=n).filter(|&m| m != i) {
        num = num.mul(&c.sub(&chi(n, m)));
        den = den.mul(&chi(n, i).sub(&chi(n, m)));
    }
    RatFun::new(num, den).expect("distinct fixed-point weights")
}

impl HtClass {
    pub fn to_ratfun(&self) -> RatFun {
        let c = RatFun::var(Var::C);
        self.coeffs.iter().rev().fold(RatFun::zero(), |acc, a| acc.mul_ref(&c).add_ref(a))
    }

    pub fn restrict(&self, i: usize) -> RatFun {
        let c = RatFun::from_poly(chi(self.n, i));
        self.coeffs.iter().rev().fold(RatFun::zero(), |acc, a| acc.mul_ref(&c).add_ref(a))
    }

    pub fn restrictions(&self) -> Vec<RatFun> {
        (0..=self.n).map(|i| self.restrict(i)).collect()
    }

    /// `true` iff the class lies in the non-localized ring.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(RatFun::is_polynomial)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        HtRing { n: self.n }.reduce(&self.to_ratfun().mul_ref(&o.to_ratfun()))
    }
}

impl fmt::Display for HtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ratfun())
    }
}

/// Localized fixed-point basis. `[p_i]` restricts to `−1` at `p_i` and to
/// zero elsewhere, so that `[p_0] = (c−u)/u`, `[p_1] = −c/u` for `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedBasis {
    pub n: usize,
}

impl FixedBasis {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(FixedBasis { n })
    }

    pub fn class(&self, i: usize) -> HtClass {
        let mut vals = vec![RatFun::zero(); self.n + 1];
        vals[i] = RatFun::int(-1);
        HtRing { n: self.n }.from_restrictions(&vals).expect("shape")
    }

    /// Coordinates of a class on `[p_0..p_n]`.
    pub fn coordinates(&self, x: &HtClass) -> Vec<RatFun> {
        x.restrictions().into_iter().map(|r| -r).collect()
    }

    pub fn from_coordinates(&self, coords: &[RatFun]) -> Result<HtClass> {
        let vals: Vec<RatFun> = coords.iter().map(|r| -r).collect();
        HtRing { n: self.n }.from_restrictions(&vals)
    }

    /// Column `i` holds the `c`-coefficients of `[p_i]`.
    pub fn to_chern_matrix(&self) -> Dense<RatFun> {
        let cols: Vec<HtClass> = (0..=self.n).map(|i| self.class(i)).collect();
        Dense::from_fn(self.n + 1, self.n + 1, |k, i| cols[i].coeffs[k].clone())
    }
}

// ---------------------------------------------------------------------------
// Roots, chambers, attracting orders

/// Roots of `A`: the distinct `A`-parts of the normal weights at all fixed
/// points.
pub fn roots(n: usize) -> Result<Vec<MPoly>> {
    check_n(n)?;
    let mut out: Vec<MPoly> = Vec::new();
    for j in 0..=n {
        for k in (0..=n).filter(|&k| k != j) {
            let t = chi(n, j).sub(&chi(n, k));
            for w in [t.clone(), t.neg()] {
                if !out.contains(&w) {
                    out.push(w);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// A chamber, stored as the ascending order of fixed-point weight values
/// `χ_i(σ)` for any cocharacter `σ` inside it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Chamber {
    order: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Chamber {
    type Error = Error;
    fn try_from(order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort();
        if order.len() < 2 || sorted != (0..order.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidChamber(format!("{order:?} is not an ordering of p0..pn")));
        }
        Ok(Chamber { order })
    }
}

impl From<Chamber> for Vec<usize> {
    fn from(c: Chamber) -> Self {
        c.order
    }
}

impl Chamber {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        Self::try_from(order)
    }

    /// `C_+` (`u > 0`) for `n = 1`.
    pub fn plus() -> Self {
        Chamber { order: vec![0, 1] }
    }

    /// `C_−` (`u < 0`) for `n = 1`.
    pub fn minus() -> Self {
        Chamber { order: vec![1, 0] }
    }

    /// The chamber containing the generic cocharacter `σ = (σ_1..σ_n)`.
    pub fn from_cocharacter(sigma: &[i64]) -> Result<Self> {
        let mut vals: Vec<(i64, usize)> = vec![(0, 0)];
        vals.extend(sigma.iter().enumerate().map(|(i, &s)| (s, i + 1)));
        vals.sort();
        if vals.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidChamber(format!("cocharacter {sigma:?} lies on a wall")));
        }
        Self::new(vals.into_iter().map(|v| v.1).collect())
    }

    /// Parses `plus`/`minus` (n = 1), or a comma separated ascending order.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let c = match s.trim() {
            "plus" | "+" | "C+" => Chamber::plus(),
            "minus" | "-" | "C-" => Chamber::minus(),
            t => {
                let order = t
                    .trim_matches(|c| c == '[' || c == ']')
                    .split(',')
                    .map(|x| x.trim().trim_start_matches('p').parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidChamber(format!("{s}: {e}")))?;
                Chamber::new(order)?
            }
        };
        if c.n() != n {
            return Err(Error::InvalidChamber(format!("{s} is not a chamber for n = {n}")));
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.order.len() - 1
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of `p_i` in the ascending order.
    pub fn rank(&self, i: usize) -> usize {
        self.order.iter().position(|&x| x == i).expect("index in range")
    }

    pub fn opposite(&self) -> Self {
        Chamber { order: self.order.iter().rev().copied().collect() }
    }

    /// A generic cocharacter in the chamber.
    pub fn cocharacter(&self) -> Vec<i64> {
        let base = self.rank(0) as i64;
        (1..=self.n()).map(|i| self.rank(i) as i64 - base).collect()
    }

    /// Sign of the root `χ_a − χ_b` on the chamber.
    pub fn sign(&self, a: usize, b: usize) -> i8 {
        match self.rank(a).cmp(&self.rank(b)) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        }
    }

    /// Chambers separated by exactly one wall: orders differing by one
    /// adjacent transposition.
    pub fn is_adjacent(&self, o: &Self) -> bool {
        if self.order.len() != o.order.len() {
            return false;
        }
        let diff: Vec<usize> = (0..self.order.len()).filter(|&k| self.order[k] != o.order[k]).collect();
        diff.len() == 2
            && diff[1] == diff[0] + 1
            && self.order[diff[0]] == o.order[diff[1]]
            && self.order[diff[1]] == o.order[diff[0]]
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(|i| format!("p{i}")).collect();
        write!(f, "{}", parts.join(" < "))
    }
}

/// All `(n+1)!` chambers, lexicographic in the order vector.
pub fn chambers(n: usize) -> Result<Vec<Chamber>> {
    check_n(n)?;
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Chamber>) {
        if left.is_empty() {
            out.push(Chamber { order: prefix.clone() });
            return;
        }
        for k in 0..left.len() {
            let x = left.remove(k);
            prefix.push(x);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(k, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..=n).collect(), &mut out);
    Ok(out)
}

/// Attracting order `≼_C`: for `T*P^n` a total order, highest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttrOrder {
    pub descending: Vec<usize>,
}

impl AttrOrder {
    /// `a ≻ b`.
    pub fn above(&self, a: usize, b: usize) -> bool {
        let pos = |x| self.descending.iter().position(|&y| y == x).unwrap();
        pos(a) < pos(b)
    }
}

impl fmt::Display for AttrOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.descending.iter().map(|i| format!("p{i}")).collect();
        write!(f, "{}", parts.join(" > "))
    }
}

pub fn attr_order(chamber: &Chamber) -> AttrOrder {
    AttrOrder { descending: chamber.order.iter().rev().copied().collect() }
}

// ---------------------------------------------------------------------------
// Stable envelopes

/// Per-fixed-point signs relative to the reference polarization
/// `ε_j = ∏_{k≠j} (χ_j − χ_k)` in `H_A(p_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polarization(pub Vec<i8>);

impl Polarization {
    pub fn standard(n: usize) -> Self {
        Polarization(vec![1; n + 1])
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.0.len() != n + 1 || self.0.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpec(format!("polarization must be {} signs ±1", n + 1)));
        }
        Ok(())
    }
}

/// Reference polarization class at `p_j`.
pub fn epsilon(n: usize, j: usize) -> MPoly {
    (0..=n).filter(|&k| k != j).fold(MPoly::one(), |acc, k| acc.mul(&chi(n, j).sub(&chi(n, k))))
}

/// Euler class of the repelling part of the normal bundle at `p_j`.
pub fn euler_negative(chamber: &Chamber, j: usize) -> MPoly {
    let n = chamber.n();
    let h = MPoly::var(Var::H);
    let mut e = MPoly::one();
    for k in (0..=n).filter(|&k| k != j) {
        let t = chi(n, j).sub(&chi(n, k));
        // Exactly one of t, h − t has negative A-part on the chamber.
        e = e.mul(&if chamber.sign(j, k) < 0 { t } else { h.sub(&t) });
    }
    e
}

/// The diagonal restriction `± e(N₋)` with sign fixed by the polarization.
pub fn diagonal(chamber: &Chamber, pol: &Polarization, j: usize) -> MPoly {
    let n = chamber.n();
    let e = euler_negative(chamber, j);
    let reference = epsilon(n, j);
    let at_h0 = e.substitute_poly(Var::H, &MPoly::zero());
    let s = if at_h0 == reference {
        1
    } else {
        debug_assert_eq!(at_h0, reference.neg());
        -1
    };
    if s * pol.0[j] > 0 {
        e
    } else {
        e.neg()
    }
}

/// `A`-degree: `u`'s graded 1, `h` graded 0.
pub fn deg_a(p: &MPoly, n: usize) -> u32 {
    p.degree_in_set(&u_vars(n))
}

/// Restriction matrix `M[i][j] = Stab(p_j)|_{p_i}`; equivalently the
/// matrix of `Stab` in the basis `([p_0]..[p_n])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabMatrix {
    pub chamber: Chamber,
    pub polarization: Polarization,
    pub matrix: Dense<RatFun>,
    /// Exact residual of the solver's own constraint system, per column.
    pub constraint_residual_zero: bool,
}

/// JSON input form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabSpec {
    pub n: usize,
    pub chamber: Chamber,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<Vec<i8>>,
}

impl StabSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: StabSpec = serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        if spec.chamber.n() != spec.n {
            return Err(Error::InvalidChamber(format!("chamber {} does not match n = {}", spec.chamber, spec.n)));
        }
        Ok(spec)
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization.clone().map(Polarization).unwrap_or_else(|| Polarization::standard(self.n))
    }

    pub fn solve(&self) -> Result<StabMatrix> {
        stab_matrix(&self.chamber, &self.polarization())
    }
}

/// Homogeneous monomials of degree `d` in `u_1..u_n, h` with `u`-degree < d.
fn unknown_monomials(n: usize, d: usize) -> Vec<MPoly> {
    let mut vars = u_vars(n);
    vars.push(Var::H);
    let mut out = Vec::new();
    let mut exp = vec![0u32; vars.len()];
    fn rec(pos: usize, left: u32, exp: &mut Vec<u32>, vars: &[Var], out: &mut Vec<MPoly>) {
        if pos + 1 == vars.len() {
            exp[pos] = left;
            if left >= 1 {
                let powers: Vec<(Var, u32)> = vars.iter().copied().zip(exp.iter().copied()).collect();
                out.push(MPoly::monomial(Rational::one(), &powers));
            }
            return;
        }
        for e in 0..=left {
            exp[pos] = e;
            rec(pos + 1, left - e, exp, vars, out);
        }
        exp[pos] = 0;
    }
    rec(0, d as u32, &mut exp, &vars, &mut out);
    out
}

/// Weights at `p_i` of the invariant curves through `p_i` that leave the
/// full attracting set of `p_j` (`i ≺ j`): zero-section lines towards
/// points above `p_j` and cotangent lines towards points below `p_i`. The
/// full attracting set is the union of conormal bundles to the linear
/// subspaces spanned by the points below each `p_m ≼ p_j`.
pub fn leaving_weights(chamber: &Chamber, i: usize, j: usize) -> Vec<MPoly> {
    let n = chamber.n();
    let h = MPoly::var(Var::H);
    let mut out = Vec::new();
    for k in (0..=n).filter(|&k| k != i) {
        let t = chi(n, i).sub(&chi(n, k));
        if chamber.sign(k, j) > 0 {
            out.push(t);
        } else if chamber.sign(k, i) < 0 {
            out.push(h.sub(&t));
        }
    }
    out
}

fn coefficient_map(p: &MPoly) -> BTreeMap<Vec<(Var, u32)>, Rational> {
    let vars = p.vars();
    p.terms()
        .iter()
        .map(|(e, c)| {
            let key = vars.iter().copied().zip(e.iter().copied()).filter(|x| x.1 > 0).collect();
            (key, c.clone())
        })
        .collect()
}

/// Interpolation weights `W[i][k] = V·[c^k] L_i(c)` (polynomials), with
/// `V = ∏_{a<b} (χ_b − χ_a)`.
fn interpolation_weights(n: usize) -> Vec<Vec<MPoly>> {
    let mut v = MPoly::one();
    for a in 0..=n {
        for b in (a + 1)..=n {
            v = v.mul(&chi(n, b).sub(&chi(n, a)));
        }
    }
    (0..=n)
        .map(|i| {
            let mut num = vec![MPoly::one()];
            let mut den = MPoly::one();
            for m in (0..=n).filter(|&m| m != i) {
                let root = chi(n, m);
                let mut next = vec![MPoly::zero(); num.len() + 1];
                for (k, a) in num.iter().enumerate() {
                    next[k + 1] = next[k + 1].add(a);
                    next[k] = next[k].sub(&a.mul(&root));
                }
                num = next;
                den = den.mul(&chi(n, i).sub(&root));
            }
            let scale = v.div_exact(&den).expect("Vandermonde factor");
            num.iter().map(|a| a.mul(&scale)).collect()
        })
        .collect()
}

/// Substitutions realizing each wall `χ_a = χ_b`, `a < b`.
fn walls(n: usize) -> Vec<(Var, MPoly)> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in (a + 1)..=n {
            out.push((u_var(n, b), chi(n, a)));
        }
    }
    out
}

/// Solves axioms (i)-(iii) plus integrality for every column.
pub fn stab_matrix(chamber: &Chamber, pol: &Polarization) -> Result<StabMatrix> {
    let n = chamber.n();
    check_n(n)?;
    pol.validate(n)?;
    let weights = interpolation_weights(n);
    let walls = walls(n);
    let columns: Vec<(Vec<RatFun>, bool)> =
        (0..=n).into_par_iter().map(|j| solve_column(chamber, pol, j, &weights, &walls)).collect::<Result<_>>()?;
    let ok = columns.iter().all(|c| c.1);
    let matrix = Dense::from_fn(n + 1, n + 1, |i, j| columns[j].0[i].clone());
    Ok(StabMatrix { chamber: chamber.clone(), polarization: pol.clone(), matrix, constraint_residual_zero: ok })
}

fn solve_column(
    chamber: &Chamber,
    pol: &Polarization,
    j: usize,
    weights: &[Vec<MPoly>],
    walls: &[(Var, MPoly)],
) -> Result<(Vec<RatFun>, bool)> {
    let n = chamber.n();
    let diag = diagonal(chamber, pol, j);
    // γ_i = D_i · Σ x·m over monomials m of the complementary degree.
    let mut basis: Vec<(usize, MPoly)> = Vec::new();
    for i in (0..=n).filter(|&i| chamber.sign(i, j) < 0) {
        let lw = leaving_weights(chamber, i, j);
        let d = lw.iter().fold(MPoly::one(), |acc, w| acc.mul(w));
        for m in unknown_monomials(n, n - lw.len()) {
            basis.push((i, m.mul(&d)));
        }
    }
    let nu = basis.len();
    // Keyed by (wall, restriction point, monomial of the reduced restriction).
    let mut rows: BTreeMap<(usize, usize, Monomial), Vec<Rational>> = BTreeMap::new();
    for (w, (var, value)) in walls.iter().enumerate() {
        for k in 0..=n {
            let mut push = |col: usize, p: MPoly| {
                for (key, c) in coefficient_map(&p.substitute_poly(*var, value)) {
                    rows.entry((w, k, key)).or_insert_with(|| vec![Rational::zero(); nu + 1])[col] += c;
                }
            };
            push(nu, diag.mul(&weights[j][k]));
            for (col, (i, b)) in basis.iter().enumerate() {
                push(col, b.mul(&weights[*i][k]));
            }
        }
    }
    let rows: Vec<Vec<Rational>> = rows.into_values().filter(|r| r.iter().any(|c| !c.is_zero())).collect();
    let null = if rows.is_empty() {
        (0..=nu).map(|f| (0..=nu).map(|c| RatFun::int((c == f) as i64)).collect()).collect()
    } else {
        let m = Dense::from_fn(rows.len(), nu + 1, |r, c| RatFun::constant(rows[r][c].clone()));
        exact_linalg::nullspace(&m)
    };
    if null.len() != 1 || null[0][nu].is_zero() {
        return Err(Error::Uniqueness { column: j, dim: null.len() });
    }
    let scale = null[0][nu].inv()?;
    let x: Vec<Rational> =
        null[0][..nu].iter().map(|r| r.mul_ref(&scale).constant_value().expect("rational solution")).collect();
    let mut col = vec![MPoly::zero(); n + 1];
    col[j] = diag;
    for ((i, b), xi) in basis.iter().zip(&x) {
        col[*i] = col[*i].add(&b.scale(xi));
    }
    let residual_zero = rows.iter().all(|r| {
        let s = r[..nu].iter().zip(&x).fold(r[nu].clone(), |acc, (a, b)| acc + a * b);
        s.is_zero()
    });
    Ok((col.into_iter().map(RatFun::from_poly).collect(), residual_zero))
}

impl StabMatrix {
    pub fn n(&self) -> usize {
        self.chamber.n()
    }

    /// `Stab([p_j])` in the Chern basis.
    pub fn chern_class(&self, j: usize) -> Result<HtClass> {
        let col: Vec<RatFun> = (0..=self.n()).map(|i| self.matrix.get(i, j).clone()).collect();
        FixedBasis { n: self.n() }.from_coordinates(&col)
    }

    /// Independent post-hoc check of the axioms on the restriction data.
    pub fn check_axioms(&self) -> Verdict {
        let n = self.n();
        let ring = HtRing { n };
        let order = attr_order(&self.chamber);
        let mut support = true;
        let mut diag = true;
        let mut degree = true;
        let mut integral = true;
        let mut local = true;
        let mut failures: Vec<String> = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                let g = self.matrix.get(i, j);
                if order.above(i, j) && !g.is_zero() {
                    support = false;
                    failures.push(format!("support: p{j} at p{i}"));
                }
                if i == j {
                    let e = euler_negative(&self.chamber, j);
                    let ok = g.is_polynomial()
                        && (g.num() == &e || g.num() == &e.neg())
                        && deg_a(g.num(), n) == n as u32
                        && g.num().substitute_poly(Var::H, &MPoly::zero())
                            == epsilon(n, j).scale(&Rational::from_integer(self.polarization.0[j].into()));
                    if !ok {
                        diag = false;
                        failures.push(format!("diagonal: p{j}"));
                    }
                } else if !g.is_zero() && !(g.is_polynomial() && deg_a(g.num(), n) < n as u32) {
                    degree = false;
                    failures.push(format!("degree: p{j} at p{i}"));
                }
                if order.above(j, i)
                    && !leaving_weights(&self.chamber, i, j)
                        .iter()
                        .all(|w| g.div_ref(&RatFun::from_poly(w.clone())).map(|x| x.is_polynomial()).unwrap_or(false))
                {
                    local = false;
                    failures.push(format!("local support: p{j} at p{i}"));
                }
            }
            let col: Vec<RatFun> = (0..=n).map(|i| self.matrix.get(i, j).clone()).collect();
            match ring.from_restrictions(&col) {
                Ok(cl) if cl.is_integral() => {}
                _ => {
                    integral = false;
                    failures.push(format!("integrality: p{j}"));
                }
            }
        }
        let mut v = combine(
            format!("stab_axioms[{}]", self.chamber),
            vec![
                Verdict::pass_if("support", support),
                Verdict::pass_if("local_support", local),
                Verdict::pass_if("diagonal", diag),
                Verdict::pass_if("degree", degree),
                Verdict::pass_if("integrality", integral),
                Verdict::pass_if("solver_residual", self.constraint_residual_zero),
            ],
        );
        if !failures.is_empty() {
            v = v.with("failures", failures);
        }
        v
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

/// `R_{C′,C} = Stab_{C′}⁻¹ · Stab_C` from solved matrices.
pub fn r_from(stab_c: &StabMatrix, stab_cp: &StabMatrix) -> Result<Dense<RatFun>> {
    let inv = exact_linalg::inverse(&stab_cp.matrix)?;
    inv.mul(&stab_c.matrix)
}

/// Geometric R-matrix `R_{C′,C}` with the standard polarization.
pub fn geometric_r(c: &Chamber, c_prime: &Chamber) -> Result<Dense<RatFun>> {
    if c.n() != c_prime.n() {
        return Err(Error::InvalidChamber("chambers for different n".into()));
    }
    let pol = Polarization::standard(c.n());
    r_from(&stab_matrix(c, &pol)?, &stab_matrix(c_prime, &pol)?)
}

/// A face of the arrangement: blocks of fixed points whose weights coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl Face {
    /// Parses equalities such as `u1=u2=0` or `u1=u2;u3=0`. For `n = 2` a
    /// single wall such as `u1=u2` names the one codimension-2 face it
    /// contains, the origin.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        check_n(n)?;
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for eq in s.split([';', ',']).map(str::trim).filter(|e| !e.is_empty()) {
            let idx: Vec<usize> = eq
                .split('=')
                .map(|t| match t.trim() {
                    "0" => Ok(0),
                    t => t
                        .strip_prefix('u')
                        .and_then(|x| x.parse::<usize>().ok())
                        .filter(|&i| i >= 1 && i <= n)
                        .ok_or_else(|| Error::InvalidSpec(format!("bad face term {t:?}"))),
                })
                .collect::<Result<_>>()?;
            for w in idx.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..=n {
            let r = find(&mut parent, i);
            blocks.entry(r).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = blocks.into_values().filter(|b| b.len() > 1).collect();
        blocks.sort();
        let mut face = Face { n, blocks };
        if face.codim() == 1 && n == 2 {
            face.blocks = vec![vec![0, 1, 2]];
        }
        if face.codim() != 2 {
            return Err(Error::InvalidSpec(format!("face {s:?} has codimension {}, expected 2", face.codim())));
        }
        Ok(face)
    }

    pub fn codim(&self) -> usize {
        self.blocks.iter().map(|b| b.len() - 1).sum()
    }

    fn contains(&self, c: &Chamber) -> bool {
        self.blocks.iter().all(|b| {
            let mut r: Vec<usize> = b.iter().map(|&i| c.rank(i)).collect();
            r.sort();
            r.windows(2).all(|w| w[1] == w[0] + 1)
        })
    }

    /// Collapses each block to its smallest member: chambers around the
    /// same face agree on this.
    fn quotient(&self, c: &Chamber) -> Vec<usize> {
        let rep = |i: usize| self.blocks.iter().find(|b| b.contains(&i)).map(|b| b[0]).unwrap_or(i);
        let mut out: Vec<usize> = Vec::new();
        for &i in c.order() {
            let r = rep(i);
            if out.last() != Some(&r) {
                out.push(r);
            }
        }
        out
    }

    /// The full cycle of chambers around the face starting at `base`,
    /// crossing one wall at a time.
    pub fn cycle(&self, base: &Chamber) -> Result<Vec<Chamber>> {
        if base.n() != self.n || !self.contains(base) {
            return Err(Error::InvalidChamber(format!("{base} is not adjacent to the face")));
        }
        // Positions swapped in turn: within a triple (p, p+1), (p+1, p+2);
        // for two pairs, alternate between the pairs.
        let swaps: Vec<usize> = match self.blocks.as_slice() {
            [b] if b.len() == 3 => {
                let p = b.iter().map(|&i| base.rank(i)).min().unwrap();
                vec![p, p + 1]
            }
            [a, b] if a.len() == 2 && b.len() == 2 => {
                let pa = a.iter().map(|&i| base.rank(i)).min().unwrap();
                let pb = b.iter().map(|&i| base.rank(i)).min().unwrap();
                vec![pa, pb]
            }
            _ => return Err(Error::InvalidSpec("unsupported face".into())),
        };
        let len = if swaps[0] + 1 == swaps[1] || swaps[1] + 1 == swaps[0] { 6 } else { 4 };
        let mut out = vec![base.clone()];
        let mut cur = base.order.clone();
        for k in 0..len - 1 {
            let p = swaps[k % 2];
            cur.swap(p, p + 1);
            out.push(Chamber { order: cur.clone() });
        }
        Ok(out)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |i: usize| if i == 0 { "0".to_string() } else { format!("u{i}") };
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_by_key(|&i| if i == 0 { usize::MAX } else { i });
                b.into_iter().map(name).collect::<Vec<_>>().join("=")
            })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// `R_{C_0,C_1} R_{C_1,C_2} ⋯ R_{C_{N−1},C_0} = Id` around a face.
pub fn check_cycle_identity(face: &Face, cycle: &[Chamber]) -> Result<Verdict> {
    if cycle.len() < 2 {
        return Err(Error::InvalidChamber("a cycle needs at least two chambers".into()));
    }
    let q0 = face.quotient(&cycle[0]);
    for (k, c) in cycle.iter().enumerate() {
        if c.n() != face.n || !face.contains(c) || face.quotient(c) != q0 {
            return Err(Error::InvalidChamber(format!("{c} does not contain the face {face} in its closure")));
        }
        let next = &cycle[(k + 1) % cycle.len()];
        if !c.is_adjacent(next) {
            return Err(Error::InvalidChamber(format!("{c} and {next} are not adjacent")));
        }
    }
    let mut distinct: Vec<&Chamber> = cycle.iter().collect();
    distinct.sort();
    distinct.dedup();
    let pol = Polarization::standard(face.n);
    let stabs: BTreeMap<&Chamber, StabMatrix> =
        distinct.par_iter().map(|c| stab_matrix(c, &pol).map(|s| (*c, s))).collect::<Result<_>>()?;
    let mut product = Dense::<RatFun>::identity(face.n + 1);
    let mut nontrivial = 0usize;
    for k in 0..cycle.len() {
        let (a, b) = (&cycle[k], &cycle[(k + 1) % cycle.len()]);
        let r = r_from(&stabs[b], &stabs[a])?;
        if r != Dense::identity(face.n + 1) {
            nontrivial += 1;
        }
        product = product.mul(&r)?;
    }
    let diff = product.sub(&Dense::identity(face.n + 1))?;
    let names: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
    Ok(Verdict::exact(format!("cycle_identity[{face}]"), &diff)
        .with("chambers", names)
        .with("nontrivial_walls", nontrivial))
}

/// Every rotation and both orientations of the cycle around `face`.
pub fn check_all_cycles(face: &Face) -> Result<Verdict> {
    let base = chambers(face.n)?.into_iter().find(|c| face.contains(c)).expect("face has chambers");
    let cycle = face.cycle(&base)?;
    let mut parts = Vec::new();
    for start in 0..cycle.len() {
        let mut rot: Vec<Chamber> = cycle[start..].iter().chain(&cycle[..start]).cloned().collect();
        parts.push(check_cycle_identity(face, &rot)?);
        rot.reverse();
        parts.push(check_cycle_identity(face, &rot)?);
    }
    Ok(combine(format!("cycle_identity[{face}]"), parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RatFun {
        s.parse().unwrap()
    }

    fn m(rows: &[&[&str]]) -> Dense<RatFun> {
        Dense::from_rows(rows.iter().map(|row| row.iter().map(|s| r(s)).collect()).collect()).unwrap()
    }

    #[test]
    fn n1_fixed_classes() {
        let b = FixedBasis::new(1).unwrap();
        assert_eq!(b.class(0).to_ratfun(), r("(c - u)/u"));
        assert_eq!(b.class(1).to_ratfun(), r("-c/u"));
    }

    #[test]
    fn relation_vanishes_at_fixed_points() {
        let ring = HtRing::new(3).unwrap();
        let c4 = ring.reduce(&r("c^4")).unwrap();
        for i in 0..=3 {
            let w = RatFun::from_poly(chi(3, i));
            assert_eq!(c4.restrict(i), w.pow(4).unwrap());
        }
    }

    #[test]
    fn n1_golden() {
        let pol = Polarization::standard(1);
        assert_eq!(stab_matrix(&Chamber::plus(), &pol).unwrap().matrix, m(&[&["-u", "-h"], &["0", "u - h"]]));
        assert_eq!(stab_matrix(&Chamber::minus(), &pol).unwrap().matrix, m(&[&["-u - h", "0"], &["-h", "u"]]));
        let rr = geometric_r(&Chamber::plus(), &Chamber::minus()).unwrap();
        assert_eq!(rr, m(&[&["u/(u + h)", "h/(u + h)"], &["h/(u + h)", "u/(u + h)"]]));
    }

    #[test]
    fn counts() {
        assert_eq!(roots(1).unwrap().len(), 2);
        assert_eq!(roots(2).unwrap().len(), 6);
        assert_eq!(chambers(1).unwrap(), vec![Chamber::plus(), Chamber::minus()]);
        assert_eq!(chambers(2).unwrap().len(), 6);
        assert_eq!(chambers(3).unwrap().len(), 24);
    }

    #[test]
    fn attr_orders_n1() {
        assert!(attr_order(&Chamber::plus()).above(1, 0));
        assert!(attr_order(&Chamber::minus()).above(0, 1));
        assert_eq!(Chamber::from_cocharacter(&[1]).unwrap(), Chamber::plus());
        assert_eq!(Chamber::from_cocharacter(&[-1]).unwrap(), Chamber::minus());
    }

    #[test]
    fn face_parsing() {
        assert_eq!(Face::parse("u1=u2", 2).unwrap().blocks, vec![vec![0, 1, 2]]);
        assert_eq!(Face::parse("u1=u2=0", 2).unwrap().blocks, vec![vec![0, 1, 2]]);
        assert!(Face::parse("u1=u2", 3).is_err());
        assert_eq!(Face::parse("u1=u2;u3=0", 3).unwrap().blocks, vec![vec![0, 3], vec![1, 2]]);
    }
}
