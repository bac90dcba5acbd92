//! Quiver and seed mutation, breadth-first exploration of mutation classes.
//!
//! Vertices are zero-based in the API and one-based in JSON and in the
//! variable names `X1..Xr`.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{RatFun, Var};
use crate::verdict::Verdict;

/// Skew-symmetric exchange matrix: `b[i][j]` is the number of arrows
/// `i→j` minus the number `j→i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    b: Vec<Vec<i64>>,
    frozen: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuiverJson {
    pub r: usize,
    #[serde(default)]
    pub frozen: Vec<usize>,
    pub arrows: Vec<(usize, usize, i64)>,
}

impl Quiver {
    pub fn new(r: usize, arrows: &[(usize, usize, i64)], frozen: &[usize]) -> Result<Self> {
        let mut b = vec![vec![0i64; r]; r];
        let mut seen = HashSet::new();
        for &(i, j, m) in arrows {
            if i >= r || j >= r {
                return Err(Error::InvalidQuiver(format!("arrow ({i}, {j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidQuiver(format!("loop at vertex {i}")));
            }
            if m < 0 || seen.contains(&(j, i)) {
                return Err(Error::InvalidQuiver(format!("2-cycle or negative multiplicity between {i} and {j}")));
            }
            if m > 0 {
                seen.insert((i, j));
            }
            b[i][j] += m;
            b[j][i] -= m;
        }
        if frozen.iter().any(|&f| f >= r) {
            return Err(Error::InvalidQuiver("frozen vertex out of range".into()));
        }
        Ok(Quiver { b, frozen: frozen.iter().copied().collect() })
    }

    pub fn from_matrix(b: Vec<Vec<i64>>, frozen: &[usize]) -> Result<Self> {
        let r = b.len();
        let skew = b.iter().all(|row| row.len() == r) && (0..r).all(|i| (0..r).all(|j| b[i][j] == -b[j][i]));
        if !skew || frozen.iter().any(|&f| f >= r) {
            return Err(Error::InvalidQuiver("matrix is not skew-symmetric".into()));
        }
        Ok(Quiver { b, frozen: frozen.iter().copied().collect() })
    }

    pub fn from_json(j: &QuiverJson) -> Result<Self> {
        let one_based =
            |v: usize| v.checked_sub(1).ok_or_else(|| Error::InvalidQuiver("vertices are numbered from 1".into()));
        let arrows =
            j.arrows.iter().map(|&(i, k, m)| Ok((one_based(i)?, one_based(k)?, m))).collect::<Result<Vec<_>>>()?;
        let frozen = j.frozen.iter().map(|&f| one_based(f)).collect::<Result<Vec<_>>>()?;
        Self::new(j.r, &arrows, &frozen)
    }

    pub fn to_json(&self) -> QuiverJson {
        let r = self.r();
        let mut arrows = Vec::new();
        for i in 0..r {
            for j in 0..r {
                if self.b[i][j] > 0 {
                    arrows.push((i + 1, j + 1, self.b[i][j]));
                }
            }
        }
        QuiverJson { r, frozen: self.frozen.iter().map(|f| f + 1).collect(), arrows }
    }

    pub fn r(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn frozen(&self) -> &BTreeSet<usize> {
        &self.frozen
    }

    pub fn is_frozen(&self, k: usize) -> bool {
        self.frozen.contains(&k)
    }

    pub fn mutable(&self) -> Vec<usize> {
        (0..self.r()).filter(|k| !self.is_frozen(*k)).collect()
    }

    /// Arrows `(i, j, multiplicity)` with positive multiplicity.
    pub fn arrows(&self) -> Vec<(usize, usize, i64)> {
        self.to_json().arrows.into_iter().map(|(i, j, m)| (i - 1, j - 1, m)).collect()
    }
}

/// Matrix mutation at `k`: composites through `k` are added, arrows at `k`
/// reversed, and 2-cycles cancel in the sum.
pub fn mutate_quiver(q: &Quiver, k: usize) -> Result<Quiver> {
    if k >= q.r() {
        return Err(Error::InvalidQuiver(format!("vertex {k} out of range")));
    }
    if q.is_frozen(k) {
        return Err(Error::FrozenVertex(k));
    }
    let r = q.r();
    let b = &q.b;
    let nb = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i == k || j == k {
                        -b[i][j]
                    } else {
                        b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
                    }
                })
                .collect()
        })
        .collect();
    Ok(Quiver { b: nb, frozen: q.frozen.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub variables: Vec<RatFun>,
    pub names: Vec<String>,
    pub quiver: Quiver,
}

/// `new·old = rhs`, recorded when a mutation is performed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExchangeRelation {
    pub old: RatFun,
    pub new: RatFun,
    pub rhs: RatFun,
    /// The relation written with variable names, e.g. `X1p*X1 = X2 + X3`.
    pub display: String,
}

impl Seed {
    /// `(X1, …, Xr, Q)`; frozen vertices must be the last ones.
    pub fn initial(quiver: Quiver) -> Result<Self> {
        let r = quiver.r();
        let n = r - quiver.frozen.len();
        if quiver.frozen.iter().any(|&f| f < n) || r > u8::MAX as usize {
            return Err(Error::InvalidQuiver("frozen vertices must be the last ones".into()));
        }
        let variables = (1..=r).map(|i| RatFun::var(Var::X(i as u8))).collect();
        let names = (1..=r).map(|i| format!("X{i}")).collect();
        Ok(Seed { variables, names, quiver })
    }

    /// Mutable variables sorted by their printed form, frozen ones pinned,
    /// and the quiver relabeled by the induced permutation.
    pub fn canonical_key(&self) -> (Vec<String>, Vec<Vec<i64>>) {
        let mutable = self.quiver.mutable();
        let mut order: Vec<(String, usize)> = mutable.iter().map(|&i| (self.variables[i].to_string(), i)).collect();
        order.sort();
        let perm: Vec<usize> = order.iter().map(|(_, i)| *i).chain(self.quiver.frozen.iter().copied()).collect();
        let b = &self.quiver.b;
        let relabeled = perm.iter().map(|&i| perm.iter().map(|&j| b[i][j]).collect()).collect();
        let vars = perm.iter().map(|&i| self.variables[i].to_string()).collect();
        (vars, relabeled)
    }
}

fn monomial(seed: &Seed, k: usize, sign: i64) -> (RatFun, String) {
    let mut val = RatFun::one();
    let mut parts = Vec::new();
    for (j, &e) in seed.quiver.b[k].iter().enumerate() {
        if e * sign > 0 {
            let e = (e * sign) as i32;
            val = val.mul_ref(&seed.variables[j].pow(e).expect("positive power"));
            parts.push(if e == 1 { seed.names[j].clone() } else { format!("{}^{e}", seed.names[j]) });
        }
    }
    let name = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
    (val, name)
}

/// `z_k' = (∏_{k→j} z_j + ∏_{j→k} z_j) / z_k` and the mutated quiver.
pub fn mutate_seed(seed: &Seed, k: usize) -> Result<(Seed, ExchangeRelation)> {
    let quiver = mutate_quiver(&seed.quiver, k)?;
    let (out, out_name) = monomial(seed, k, 1);
    let (inc, inc_name) = monomial(seed, k, -1);
    let rhs = out.add_ref(&inc);
    let old = seed.variables[k].clone();
    let new = rhs.div_ref(&old)?;
    let new_name = format!("{}p", seed.names[k]);
    let display = format!("{new_name}*{} = {out_name} + {inc_name}", seed.names[k]);
    let mut variables = seed.variables.clone();
    let mut names = seed.names.clone();
    variables[k] = new.clone();
    names[k] = new_name;
    Ok((Seed { variables, names, quiver }, ExchangeRelation { old, new, rhs, display }))
}

/// Seeds, variables and relations reached by iterated mutation.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub seeds: Vec<Seed>,
    /// Distinct cluster variables with the first name they were given.
    pub variables: Vec<(String, RatFun)>,
    pub relations: Vec<ExchangeRelation>,
    /// No new seed appeared at the last explored frontier.
    pub closed: bool,
    pub depth: usize,
}

/// Breadth-first mutation closure up to `depth`.
pub fn explore(seed: &Seed, depth: usize) -> Result<Atlas> {
    let mut keys = HashSet::new();
    keys.insert(seed.canonical_key());
    let mut atlas = Atlas { seeds: vec![seed.clone()], variables: vec![], relations: vec![], closed: false, depth: 0 };
    let mut var_keys = HashSet::new();
    for (name, v) in seed.names.iter().zip(&seed.variables) {
        if var_keys.insert(v.to_string()) {
            atlas.variables.push((name.clone(), v.clone()));
        }
    }
    let mut rel_keys = HashSet::new();
    let mut frontier = vec![seed.clone()];
    for level in 1..=depth {
        let expanded: Vec<Vec<(Seed, ExchangeRelation)>> = frontier
            .par_iter()
            .map(|s| s.quiver.mutable().into_iter().map(|k| mutate_seed(s, k)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (s, rel) in expanded.into_iter().flatten() {
            let (a, b) = (rel.old.to_string(), rel.new.to_string());
            let rk = if a < b { (a, b) } else { (b, a) };
            if rel_keys.insert(rk) {
                atlas.relations.push(rel);
            }
            if keys.insert(s.canonical_key()) {
                for (name, v) in s.names.iter().zip(&s.variables) {
                    if var_keys.insert(v.to_string()) {
                        atlas.variables.push((name.clone(), v.clone()));
                    }
                }
                atlas.seeds.push(s.clone());
                next.push(s);
            }
        }
        atlas.depth = level;
        if next.is_empty() {
            atlas.closed = true;
            break;
        }
        frontier = next;
    }
    if seed.quiver.mutable().is_empty() {
        atlas.closed = true;
    }
    Ok(atlas)
}

/// Passes iff the canonical denominator is a monomial in the `X_i`.
pub fn laurent_check(v: &RatFun) -> Verdict {
    let den = v.den();
    let ok = den.is_monomial() && den.vars().iter().all(|x| matches!(x, Var::X(_)));
    Verdict::pass_if("laurent", ok).with("denominator", den.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RatFun {
        s.parse().unwrap()
    }

    fn frozen_path_quiver() -> Quiver {
        // 3 → 1 → 2 with 2, 3 frozen.
        Quiver::new(3, &[(2, 0, 1), (0, 1, 1)], &[1, 2]).unwrap()
    }

    #[test]
    fn arrow_rule_on_worked_example() {
        let m = mutate_quiver(&frozen_path_quiver(), 0).unwrap();
        let mut arrows = m.arrows();
        arrows.sort();
        // Reversed at 1 and the composite 3 → 2 added.
        assert_eq!(arrows, vec![(0, 2, 1), (1, 0, 1), (2, 1, 1)]);
        assert_eq!(mutate_quiver(&m, 0).unwrap(), frozen_path_quiver());
        assert_eq!(mutate_quiver(&frozen_path_quiver(), 1), Err(Error::FrozenVertex(1)));
    }

    #[test]
    fn isolated_vertex() {
        let q = Quiver::new(2, &[], &[]).unwrap();
        assert_eq!(mutate_quiver(&q, 0).unwrap(), q);
        let s = Seed::initial(q).unwrap();
        let (m, _) = mutate_seed(&s, 0).unwrap();
        assert_eq!(m.variables[0], r("2/X1"));
    }

    #[test]
    fn frozen_path_exchange_relation() {
        let s = Seed::initial(frozen_path_quiver()).unwrap();
        let (m, rel) = mutate_seed(&s, 0).unwrap();
        assert_eq!(m.variables[0], r("(X2 + X3)/X1"));
        assert_eq!(rel.display, "X1p*X1 = X2 + X3");
        assert_eq!(rel.new.mul_ref(&rel.old), rel.rhs);
        let (back, _) = mutate_seed(&m, 0).unwrap();
        assert_eq!(back.canonical_key(), s.canonical_key());
    }

    #[test]
    fn invalid_quivers() {
        assert!(matches!(Quiver::new(2, &[(0, 0, 1)], &[]), Err(Error::InvalidQuiver(_))));
        assert!(matches!(Quiver::new(2, &[(0, 1, 1), (1, 0, 1)], &[]), Err(Error::InvalidQuiver(_))));
        assert!(matches!(Seed::initial(Quiver::new(2, &[(0, 1, 1)], &[0]).unwrap()), Err(Error::InvalidQuiver(_))));
    }

    #[test]
    fn json_round_trip() {
        let j = QuiverJson { r: 3, frozen: vec![2, 3], arrows: vec![(3, 1, 1), (1, 2, 1)] };
        let q = Quiver::from_json(&j).unwrap();
        assert_eq!(q, frozen_path_quiver());
        assert_eq!(Quiver::from_json(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn laurent() {
        assert!(laurent_check(&r("(1 + X1 + X2)/(X1*X2)")).passed());
        assert!(laurent_check(&r("X1")).passed());
        assert!(!laurent_check(&r("(1 + X1)/(1 + X2)")).passed());
    }
}
