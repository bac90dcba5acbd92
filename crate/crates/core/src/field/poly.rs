use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::var::Var;
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles big numerators and denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exponent vector over the owning polynomial's variable list.
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are kept sorted ascending in lex order (first variable most
/// significant) with no zero coefficients, and the variable list only holds
/// variables that actually occur. Structural equality is therefore
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MPoly {
    vars: Vec<Var>,
    terms: Vec<(Exponents, Rational)>,
}

impl MPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MPoly { vars: vec![], terms: vec![(vec![], c)] }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Self {
        MPoly { vars: vec![v], terms: vec![(vec![1], Rational::one())] }
    }

    /// `coeff * prod(v^e)`.
    pub fn monomial(coeff: Rational, powers: &[(Var, u32)]) -> Self {
        let mut vars: Vec<Var> = powers.iter().map(|p| p.0).collect();
        vars.sort();
        vars.dedup();
        let mut exp = vec![0u32; vars.len()];
        for (v, e) in powers {
            let i = vars.binary_search(v).unwrap();
            exp[i] += e;
        }
        Self::from_terms(vars, vec![(exp, coeff)])
    }

    /// Builds a canonical polynomial from arbitrary (possibly duplicated,
    /// unsorted, zero) terms. `vars` must be sorted and duplicate free.
    pub fn from_terms(vars: Vec<Var>, terms: Vec<(Exponents, Rational)>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        let mut acc: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), vars.len());
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&e) {
                Some(x) => *x += c,
                None => {
                    acc.insert(e, c);
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let mut p = MPoly { vars, terms };
        p.prune();
        p
    }

    /// Sorted terms without zero coefficients; only drops unused variables.
    fn from_sorted(vars: Vec<Var>, terms: Vec<(Exponents, Rational)>) -> Self {
        let mut p = MPoly { vars, terms };
        p.prune();
        p
    }

    fn prune(&mut self) {
        if self.vars.is_empty() {
            return;
        }
        let n = self.vars.len();
        let used: Vec<bool> = (0..n).map(|i| self.terms.iter().any(|(e, _)| e[i] != 0)).collect();
        if used.iter().all(|&u| u) {
            return;
        }
        self.vars = self.vars.iter().zip(&used).filter(|(_, &u)| u).map(|(v, _)| *v).collect();
        for (e, _) in self.terms.iter_mut() {
            *e = e.iter().zip(&used).filter(|(_, &u)| u).map(|(x, _)| *x).collect();
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn terms(&self) -> &[(Exponents, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.terms.len() == 1 && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Rational::zero))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.vars.binary_search(&v).is_ok()
    }

    /// Lex-leading coefficient (zero for the zero polynomial).
    pub fn leading_coeff(&self) -> Rational {
        self.terms.last().map(|t| t.1.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        match self.vars.binary_search(&v) {
            Ok(i) => self.terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0),
            Err(_) => 0,
        }
    }

    /// Largest total degree in the given subset of variables.
    pub fn degree_in_set(&self, set: &[Var]) -> u32 {
        let idx: Vec<usize> = self.vars.iter().enumerate().filter(|(_, v)| set.contains(v)).map(|(i, _)| i).collect();
        self.terms.iter().map(|(e, _)| idx.iter().map(|&i| e[i]).sum::<u32>()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.iter().map(|(e, _)| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Coefficient of the monomial `prod(v^e)`.
    pub fn coeff_of(&self, powers: &[(Var, u32)]) -> Rational {
        let mut exp = vec![0u32; self.vars.len()];
        for (v, e) in powers {
            if *e == 0 {
                continue;
            }
            match self.vars.binary_search(v) {
                Ok(i) => exp[i] = *e,
                Err(_) => return Rational::zero(),
            }
        }
        match self.terms.binary_search_by(|t| t.0.cmp(&exp)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Terms re-expressed over `vars`, which must be a sorted superset.
    pub fn terms_over(&self, vars: &[Var]) -> Vec<(Exponents, Rational)> {
        if vars == self.vars.as_slice() {
            return self.terms.clone();
        }
        let map: Vec<usize> = self.vars.iter().map(|v| vars.binary_search(v).unwrap()).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0u32; vars.len()];
                for (i, &x) in e.iter().enumerate() {
                    ne[map[i]] = x;
                }
                (ne, c.clone())
            })
            .collect()
    }

    fn union_vars(a: &[Var], b: &[Var]) -> Vec<Var> {
        if a == b {
            return a.to_vec();
        }
        let mut v: Vec<Var> = a.iter().chain(b.iter()).copied().collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn neg(&self) -> Self {
        MPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        MPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let vars = Self::union_vars(&self.vars, &other.vars);
        let a = self.terms_over(&vars);
        let b = other.terms_over(&vars);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take = if i == a.len() {
                std::cmp::Ordering::Greater
            } else if j == b.len() {
                std::cmp::Ordering::Less
            } else {
                a[i].0.cmp(&b[j].0)
            };
            match take {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Self::from_sorted(vars, out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let vars = Self::union_vars(&self.vars, &other.vars);
        let a = self.terms_over(&vars);
        let b = other.terms_over(&vars);
        let mut acc: HashMap<Exponents, Rational> = HashMap::with_capacity(a.len() * b.len());
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|x, y| x.0.cmp(&y.0));
        Self::from_sorted(vars, terms)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Scales so the lex-leading coefficient is one.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.leading_coeff();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.recip())
    }

    /// Smallest exponent of each variable across all terms, as a monomial
    /// (coefficient one) over this polynomial's variables.
    pub fn monomial_content(&self) -> Exponents {
        let n = self.vars.len();
        let mut m = vec![u32::MAX; n];
        for (e, _) in &self.terms {
            for i in 0..n {
                m[i] = m[i].min(e[i]);
            }
        }
        if self.terms.is_empty() {
            m.iter_mut().for_each(|x| *x = 0);
        }
        m
    }

    /// Divides every term by the monomial `exp` (over this polynomial's vars).
    pub fn shift_down(&self, exp: &[u32]) -> Self {
        let terms =
            self.terms.iter().map(|(e, c)| (e.iter().zip(exp).map(|(a, b)| a - b).collect(), c.clone())).collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if other.vars.iter().any(|v| !self.contains_var(*v)) {
            return None;
        }
        let vars = self.vars.clone();
        let div_terms = other.terms_over(&vars);
        let (lt_e, lt_c) = div_terms.last().unwrap().clone();
        let divisor = MPoly { vars: vars.clone(), terms: div_terms };
        let mut rem = self.clone();
        let mut quot: Vec<(Exponents, Rational)> = Vec::new();
        while !rem.is_zero() {
            let rt = rem.terms_over(&vars);
            let (re, rc) = rt.last().unwrap();
            if re.iter().zip(&lt_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponents = re.iter().zip(&lt_e).map(|(a, b)| a - b).collect();
            let qc = rc / &lt_c;
            let t = MPoly { vars: vars.clone(), terms: vec![(qe.clone(), qc.clone())] };
            rem = rem.sub(&t.mul(&divisor));
            quot.push((qe, qc));
        }
        Some(Self::from_terms(vars, quot))
    }

    pub fn derivative(&self, v: Var) -> Self {
        let Ok(i) = self.vars.binary_search(&v) else {
            return Self::zero();
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, c)| {
                let mut ne = e.clone();
                ne[i] -= 1;
                (ne, c * rat_int(e[i] as i64))
            })
            .collect();
        Self::from_terms(self.vars.clone(), terms)
    }

    /// Coefficients as a polynomial in `v`: entry `k` multiplies `v^k`.
    pub fn to_univariate(&self, v: Var) -> Vec<MPoly> {
        let Ok(i) = self.vars.binary_search(&v) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(v) as usize;
        let mut rest_vars = self.vars.clone();
        rest_vars.remove(i);
        let mut buckets: Vec<Vec<(Exponents, Rational)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne.remove(i) as usize;
            buckets[k].push((ne, c.clone()));
        }
        buckets.into_iter().map(|t| Self::from_terms(rest_vars.clone(), t)).collect()
    }

    pub fn from_univariate(v: Var, coeffs: &[MPoly]) -> Self {
        let x = MPoly::var(v);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        acc
    }

    /// Evaluates with every variable mapped through `f` into a commutative ring.
    pub fn eval_with<T, F>(&self, mut f: F, from_rat: impl Fn(&Rational) -> T) -> Result<T>
    where
        T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
        F: FnMut(Var) -> Result<T>,
    {
        let vals: Vec<T> = self.vars.iter().map(|v| f(*v)).collect::<Result<_>>()?;
        let mut acc = from_rat(&Rational::zero());
        for (e, c) in &self.terms {
            let mut t = from_rat(c);
            for (k, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = t * vals[k].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn eval_complex(&self, point: &HashMap<Var, Complex64>) -> Result<Complex64> {
        let vals: Vec<Complex64> = self
            .vars
            .iter()
            .map(|v| point.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.name())))
            .collect::<Result<_>>()?;
        let mut acc = Complex64::zero();
        for (e, c) in &self.terms {
            let mut t = Complex64::new(rat_to_f64(c), 0.0);
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    t *= vals[k].powu(p);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Sum of absolute values of the evaluated terms (scale for relative tests).
    pub fn eval_abs_scale(&self, point: &HashMap<Var, Complex64>) -> Result<f64> {
        let vals: Vec<Complex64> = self
            .vars
            .iter()
            .map(|v| point.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.name())))
            .collect::<Result<_>>()?;
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = rat_to_f64(c).abs();
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    t *= vals[k].norm().powi(p as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Polynomial substitution of one variable.
    pub fn substitute_poly(&self, v: Var, value: &MPoly) -> Self {
        if !self.contains_var(v) {
            return self.clone();
        }
        let coeffs = self.to_univariate(v);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    /// `true` iff every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    fn fmt_monomial(&self, e: &[u32], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &p) in self.vars.iter().zip(e) {
            if p == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if p == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{p}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let is_const = e.iter().all(|&x| x == 0);
            if is_const {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                self.fmt_monomial(e, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}
