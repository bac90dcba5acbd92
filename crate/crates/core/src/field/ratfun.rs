use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{rat_int, MPoly, Rational};
use super::var::Var;
use crate::error::{Error, Result};

/// Rational function in canonical form: numerator and denominator coprime,
/// denominator with lex-leading coefficient one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun {
    num: MPoly,
    den: MPoly,
}

impl RatFun {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = gcd(&num, &den);
        let (n, d) = if g.is_one() { (num, den) } else { (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap()) };
        Ok(Self::normalized(n, d))
    }

    /// Assumes `num` and `den` are coprime; only fixes the scale.
    fn normalized(num: MPoly, den: MPoly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatFun { num, den }
        } else {
            let s = lc.recip();
            RatFun { num: num.scale(&s), den: den.scale(&s) }
        }
    }

    pub fn from_poly(p: MPoly) -> Self {
        RatFun { num: p, den: MPoly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(MPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(MPoly::var(v))
    }

    pub fn zero() -> Self {
        Self::from_poly(MPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MPoly::one())
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.num.vars().iter().chain(self.den.vars()).copied().collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    fn combine(&self, o: &Self, negate: bool) -> Self {
        let c = if negate { o.num.neg() } else { o.num.clone() };
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RatFun { num: c, den: o.den.clone() };
        }
        if self.den == o.den {
            let n = self.num.add(&c);
            return Self::new(n, self.den.clone()).unwrap();
        }
        // (a + c b)/b is already reduced when a/b is.
        if o.den.is_one() {
            return RatFun { num: self.num.add(&c.mul(&self.den)), den: self.den.clone() };
        }
        if self.den.is_one() {
            return RatFun { num: self.num.mul(&o.den).add(&c), den: o.den.clone() };
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            let n = self.num.mul(&o.den).add(&c.mul(&self.den));
            return Self::normalized(n, self.den.mul(&o.den));
        }
        let b1 = self.den.div_exact(&g).unwrap();
        let d1 = o.den.div_exact(&g).unwrap();
        let n = self.num.mul(&d1).add(&c.mul(&b1));
        if n.is_zero() {
            return Self::zero();
        }
        // Only factors of g can survive in gcd(n, b1 d1 g).
        let h = gcd(&n, &g);
        let (n, g) = if h.is_one() { (n, g) } else { (n.div_exact(&h).unwrap(), g.div_exact(&h).unwrap()) };
        Self::normalized(n, b1.mul(&d1).mul(&g))
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), o.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), o.den.div_exact(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (o.num.clone(), self.den.clone())
        } else {
            (o.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        Self::normalized(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, o: &Self) -> Result<Self> {
        Ok(self.mul_ref(&o.inv()?))
    }

    pub fn pow(&self, n: i32) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let n = n as u32;
        // Powers of a reduced fraction stay reduced.
        Ok(Self::normalized(self.num.pow(n), self.den.pow(n)))
    }

    /// Simultaneous substitution `v -> value` for every entry of `map`.
    pub fn substitute(&self, map: &HashMap<Var, RatFun>) -> Result<Self> {
        let n = subst_poly(&self.num, map)?;
        let d = subst_poly(&self.den, map)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        n.div_ref(&d)
    }

    pub fn substitute_one(&self, v: Var, value: &RatFun) -> Result<Self> {
        let mut m = HashMap::new();
        m.insert(v, value.clone());
        self.substitute(&m)
    }

    /// Numeric evaluation; fails with `NearPole` when `|den| < eps` relative
    /// to the size of its terms.
    pub fn eval_complex(&self, point: &HashMap<Var, Complex64>, eps: f64) -> Result<Complex64> {
        let d = self.den.eval_complex(point)?;
        let scale = self.den.eval_abs_scale(point)?.max(f64::MIN_POSITIVE);
        if d.norm() < eps * scale {
            return Err(Error::NearPole { magnitude: d.norm() });
        }
        Ok(self.num.eval_complex(point)? / d)
    }

    pub fn derivative(&self, v: Var) -> Self {
        let n = self.num.derivative(v).mul(&self.den).sub(&self.num.mul(&self.den.derivative(v)));
        Self::new(n, self.den.mul(&self.den)).unwrap()
    }
}

fn subst_poly(p: &MPoly, map: &HashMap<Var, RatFun>) -> Result<RatFun> {
    if !p.vars().iter().any(|v| map.contains_key(v)) {
        return Ok(RatFun::from_poly(p.clone()));
    }
    // Horner in each substituted variable keeps intermediate sizes small.
    let mut powers: HashMap<(Var, u32), RatFun> = HashMap::new();
    let mut acc = RatFun::zero();
    let vars = p.vars().to_vec();
    for (e, c) in p.terms() {
        let mut t = RatFun::constant(c.clone());
        for (v, &k) in vars.iter().zip(e) {
            if k == 0 {
                continue;
            }
            let f = match map.get(v) {
                Some(val) => {
                    if let Some(x) = powers.get(&(*v, k)) {
                        x.clone()
                    } else {
                        let x = val.pow(k as i32)?;
                        powers.insert((*v, k), x.clone());
                        x
                    }
                }
                None => RatFun::from_poly(MPoly::var(*v).pow(k)),
            };
            t = t.mul_ref(&f);
        }
        acc = acc.add_ref(&t);
    }
    Ok(acc)
}

impl Default for RatFun {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.num_terms() > 1 || self.den.vars().len() > 1 {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun({self})")
    }
}

impl FromStr for RatFun {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::parse::parse_ratfun(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&RatFun> for &RatFun {
            type Output = RatFun;
            fn $m(self, o: &RatFun) -> RatFun {
                self.$imp(o)
            }
        }
        impl $tr<RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, o: RatFun) -> RatFun {
                self.$imp(&o)
            }
        }
        impl $tr<&RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, o: &RatFun) -> RatFun {
                self.$imp(o)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den }
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }
}
