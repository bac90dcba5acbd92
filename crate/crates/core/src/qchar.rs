//! Laurent polynomials in `Y_{i,a}`, the sl2 fundamental q-character and
//! its Baxter substitution.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64 as C;
use serde_json::{json, Value};

use crate::chain::baxter::{tq_residual, TqPairing, TQ_TOL};
use crate::chain::{solve_q, spectrum, Chain, QPolynomial};
use crate::error::{Error, Result};
use crate::field::{RatFun, Var};
use crate::verdict::{combine, Verdict};

/// `Y_{index, label}^{exp}`; the label is an exact multiplicative expression.
#[derive(Clone, Debug, PartialEq)]
pub struct YFactor {
    pub index: usize,
    pub label: RatFun,
    pub exp: i32,
}

pub type YMonomial = Vec<YFactor>;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct YLaurent {
    terms: Vec<(YMonomial, u64)>,
}

fn normalize_monomial(m: YMonomial) -> YMonomial {
    let mut acc: Vec<YFactor> = Vec::new();
    for f in m {
        match acc.iter_mut().find(|g| g.index == f.index && g.label == f.label) {
            Some(g) => g.exp += f.exp,
            None => acc.push(f),
        }
    }
    acc.retain(|f| f.exp != 0);
    acc.sort_by_key(|f| (f.index, f.label.to_string()));
    acc
}

impl YLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn y(index: usize, label: RatFun, exp: i32) -> Self {
        let mut out = Self::zero();
        out.add_term(vec![YFactor { index, label, exp }], 1);
        out
    }

    pub fn add_term(&mut self, m: YMonomial, coeff: u64) {
        if coeff == 0 {
            return;
        }
        let m = normalize_monomial(m);
        match self.terms.iter_mut().find(|(k, _)| *k == m) {
            Some((_, c)) => *c += coeff,
            None => self.terms.push((m, coeff)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn terms(&self) -> &[(YMonomial, u64)] {
        &self.terms
    }

    /// Sum of coefficients: the dimension of the represented module.
    pub fn dimension(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c).sum()
    }

    pub fn indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().flat_map(|(m, _)| m.iter().map(|f| f.index)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let mono: Vec<Value> =
                        m.iter().map(|f| json!(["Y", f.index, f.label.to_string(), f.exp])).collect();
                    json!({ "monomial": mono, "coeff": c })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidSpec(format!("q-character JSON: {msg}"));
        let mut out = Self::zero();
        for t in v.as_array().ok_or_else(|| bad("expected a list"))? {
            let coeff =
                t["coeff"].as_u64().filter(|&c| c > 0).ok_or_else(|| bad("coefficients must be positive integers"))?;
            let mut mono = Vec::new();
            for f in t["monomial"].as_array().ok_or_else(|| bad("missing monomial"))? {
                let a = f
                    .as_array()
                    .filter(|a| a.len() == 4 && a[0] == "Y")
                    .ok_or_else(|| bad("factor must be [\"Y\", i, a, e]"))?;
                let index = a[1].as_u64().filter(|&i| i >= 1).ok_or_else(|| bad("index must be ≥ 1"))? as usize;
                let label: RatFun = a[2].as_str().ok_or_else(|| bad("label must be a string"))?.parse()?;
                let exp = a[3].as_i64().ok_or_else(|| bad("exponent must be an integer"))? as i32;
                mono.push(YFactor { index, label, exp });
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

impl std::fmt::Display for YLaurent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *c != 1 || m.is_empty() {
                write!(f, "{c}")?;
            }
            for (j, y) in m.iter().enumerate() {
                if j > 0 || *c != 1 {
                    write!(f, "*")?;
                }
                write!(f, "Y[{},{}]", y.index, y.label)?;
                if y.exp != 1 {
                    write!(f, "^({})", y.exp)?;
                }
            }
        }
        Ok(())
    }
}

/// `Y_{1,aq⁻¹} + Y_{1,aq}^{−1}`.
pub fn chi_fund_sl2(a: &RatFun) -> YLaurent {
    let q = RatFun::var(Var::Q);
    let down = a.div_ref(&q).expect("q is nonzero");
    let up = a.mul_ref(&q);
    YLaurent::y(1, down, 1).add(&YLaurent::y(1, up, -1))
}

/// Value of `F_i(a z)` given the index, the exact label `a`, and `z`.
pub type Prefactor = Arc<dyn Fn(usize, &RatFun, C) -> Result<C> + Send + Sync>;

/// Per-index Baxter polynomial and prefactor; `q_i = q` for sl2.
#[derive(Clone)]
pub struct SubstitutionSpec {
    pub q: C,
    /// Values of the non-`q` variables appearing in labels.
    pub params: HashMap<Var, C>,
    pub entries: BTreeMap<usize, (QPolynomial, Prefactor)>,
}

impl SubstitutionSpec {
    pub fn point(&self) -> HashMap<Var, C> {
        let mut p = self.params.clone();
        p.insert(Var::Q, self.q);
        p
    }
}

pub fn constant_prefactor(value: C) -> Prefactor {
    Arc::new(move |_, _, _| Ok(value))
}

/// Replaces each `Y_{i,a}` by `F_i(az) q^{deg Q_i} Q_i(z a q⁻¹)/Q_i(z a q)`
/// and evaluates at `z`.
pub fn baxter_substitute(chi: &YLaurent, sub: &SubstitutionSpec, z: C) -> Result<C> {
    let point = sub.point();
    let mut total = C::new(0.0, 0.0);
    for (m, c) in chi.terms() {
        let mut term = C::new(*c as f64, 0.0);
        for y in m {
            let (qpoly, f) = sub.entries.get(&y.index).ok_or(Error::UncoveredIndex(y.index))?;
            let a = y.label.eval_complex(&point, 1e-14)?;
            let val = f(y.index, &y.label, z)? * sub.q.powi(qpoly.degree as i32) * qpoly.eval(z * a / sub.q)
                / qpoly.eval(z * a * sub.q);
            term *= val.powi(y.exp);
        }
        total += term;
    }
    Ok(total)
}

/// Exact substitution with `F ≡ 1` and polynomial `Q_i` in `z`, with `q`
/// symbolic.
pub fn baxter_substitute_symbolic(chi: &YLaurent, qs: &BTreeMap<usize, RatFun>) -> Result<RatFun> {
    let z = RatFun::var(Var::Z);
    let q = RatFun::var(Var::Q);
    let mut total = RatFun::zero();
    for (m, c) in chi.terms() {
        let mut term = RatFun::int(*c as i64);
        for y in m {
            let qp = qs.get(&y.index).ok_or(Error::UncoveredIndex(y.index))?;
            let deg = qp.num().degree_in(Var::Z) as i32;
            let za = z.mul_ref(&y.label);
            let top = qp.substitute_one(Var::Z, &za.div_ref(&q)?)?;
            let bottom = qp.substitute_one(Var::Z, &za.mul_ref(&q))?;
            let val = q.pow(deg)?.mul_ref(&top.div_ref(&bottom)?);
            term = term.mul_ref(&val.pow(y.exp)?);
        }
        total = total.add_ref(&term);
    }
    Ok(total)
}

/// Prefactor read off from the vacuum: `F(z q⁻¹) = u·a(z)` and
/// `1/F(z q) = u⁻¹·d(z)`, stored as a table keyed by the label.
pub fn vacuum_prefactor(chain: &Chain<C>) -> Prefactor {
    let chain = chain.clone();
    let q = RatFun::var(Var::Q);
    let down = q.inv().expect("q is nonzero");
    Arc::new(move |_, label, z| {
        if *label == down {
            Ok(chain.twist)
        } else if *label == q {
            Ok(chain.twist / chain.vacuum_d(z))
        } else {
            Err(Error::InvalidSpec(format!("no prefactor for label {label}")))
        }
    })
}

/// For every eigenvalue branch, the substituted fundamental q-character with
/// that branch's Q and the vacuum prefactors reproduces `λ(z)` at 20 random
/// points. With `control`, the Q of the first two sector-one branches are
/// swapped.
pub fn check_conjecture_sl2(chain: &Chain<C>, seed: u64, control: bool) -> Result<Verdict> {
    let chi = chi_fund_sl2(&RatFun::one());
    let f = vacuum_prefactor(chain);
    let points = chain.sample_points(20, seed.wrapping_add(0xc0ff));
    let mut parts = Vec::new();
    for m in 0..=chain.len() {
        let sp = spectrum(chain, m, seed)?;
        let mut qs: Vec<QPolynomial> =
            sp.branches.iter().map(|b| solve_q(chain, b, m, TqPairing::FROZEN, seed)).collect::<Result<_>>()?;
        if control && m == 1 && qs.len() >= 2 {
            qs.swap(0, 1);
        }
        for (k, (b, qp)) in sp.branches.iter().zip(&qs).enumerate() {
            let sub = SubstitutionSpec {
                q: chain.q,
                params: HashMap::new(),
                entries: BTreeMap::from([(1, (qp.clone(), f.clone()))]),
            };
            let mut worst = 0.0f64;
            for &z in &points {
                let lam = b.eval(chain, z);
                let got = baxter_substitute(&chi, &sub, z)?;
                worst = worst.max((got - lam).norm() / lam.norm().max(1e-300));
            }
            let v = Verdict::numeric(format!("sector {m} branch {k}"), worst, TQ_TOL)
                .with("tq_residual", tq_residual(chain, b, qp, TqPairing::FROZEN, &points));
            parts.push(v);
        }
    }
    let name = if control { "qchar-conjecture-control" } else { "qchar-conjecture" };
    Ok(combine(name, parts).with("branches", 1usize << chain.len()).with("q_character", chi.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RatFun {
        s.parse().unwrap()
    }

    #[test]
    fn fundamental_character() {
        let chi = chi_fund_sl2(&RatFun::one());
        assert_eq!(chi, YLaurent::y(1, r("1/q"), 1).add(&YLaurent::y(1, r("q"), -1)));
        assert_eq!(chi.dimension(), 2);
        let shifted = chi_fund_sl2(&r("q^2"));
        assert_eq!(shifted, YLaurent::y(1, r("q"), 1).add(&YLaurent::y(1, r("q^3"), -1)));
        assert!(chi.terms().iter().all(|(_, c)| *c > 0));
    }

    #[test]
    fn json_round_trip() {
        let chi = chi_fund_sl2(&r("q^2*u1"));
        let back = YLaurent::from_json(&chi.to_json()).unwrap();
        assert_eq!(back, chi);
        assert_eq!(chi.to_json()[1]["monomial"][0], json!(["Y", 1, "q^3*u1", -1]));
        assert!(YLaurent::from_json(&json!([{ "monomial": [], "coeff": 0 }])).is_err());
    }

    #[test]
    fn trivial_substitution_counts_terms() {
        let chi = chi_fund_sl2(&RatFun::one());
        let qs = BTreeMap::from([(1, RatFun::one())]);
        assert_eq!(baxter_substitute_symbolic(&chi, &qs).unwrap(), RatFun::int(2));
        let sub = SubstitutionSpec {
            q: C::new(0.8, 0.3),
            params: HashMap::new(),
            entries: BTreeMap::from([(1, (QPolynomial::from_roots(&[]), constant_prefactor(C::new(1.0, 0.0))))]),
        };
        assert!((baxter_substitute(&chi, &sub, C::new(0.4, 0.1)).unwrap() - 2.0).norm() < 1e-14);
    }

    #[test]
    fn substitution_has_two_term_baxter_shape() {
        let chi = chi_fund_sl2(&RatFun::one());
        let qs = BTreeMap::from([(1, r("z - c"))]);
        let got = baxter_substitute_symbolic(&chi, &qs).unwrap();
        let expect = r("(q*(z/q^2 - c) + (q^2*z - c)/q)/(z - c)");
        assert_eq!(got, expect);
    }

    #[test]
    fn single_inverse_term_and_uncovered_index() {
        let chi = YLaurent::y(1, r("q"), -1);
        let qs = BTreeMap::from([(1, r("z - c"))]);
        assert_eq!(baxter_substitute_symbolic(&chi, &qs).unwrap(), r("(q^2*z - c)/(q*(z - c))"));
        let chi2 = YLaurent::y(2, r("q"), 1);
        assert_eq!(baxter_substitute_symbolic(&chi2, &qs), Err(Error::UncoveredIndex(2)));
    }
}
