//! Truncated bivariate power series in `(u, h)` and the degeneration of
//! trigonometric entries to their rational (Yang-type) limits.

use num_traits::{One, Zero};

use super::poly::{rat, MPoly, Rational};
use super::ratfun::RatFun;
use super::var::Var;
use crate::error::{Error, Result};

/// Series in `u`, `h` modulo total degree `> order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries2 {
    order: usize,
    // coeffs[d][i] multiplies u^(d-i) h^i
    coeffs: Vec<Vec<Rational>>,
}

impl TruncSeries2 {
    pub fn zero(order: usize) -> Self {
        let coeffs = (0..=order).map(|d| vec![Rational::zero(); d + 1]).collect();
        TruncSeries2 { order, coeffs }
    }

    pub fn constant(order: usize, c: Rational) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0][0] = c;
        s
    }

    /// `a*u + b*h`.
    pub fn linear(order: usize, a: Rational, b: Rational) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1][0] = a;
            s.coeffs[1][1] = b;
        }
        s
    }

    /// `exp(a*u + b*h)`.
    pub fn exp_linear(order: usize, a: Rational, b: Rational) -> Self {
        let x = Self::linear(order, a, b);
        let mut term = Self::constant(order, Rational::one());
        let mut acc = term.clone();
        for k in 1..=order {
            term = term.mul(&x).scale(&rat(1, k as i64));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `u^i h^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        let d = i + j;
        if d > self.order {
            return Rational::zero();
        }
        self.coeffs[d][j].clone()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        assert_eq!(self.order, o.order);
        let coeffs =
            self.coeffs.iter().zip(&o.coeffs).map(|(x, y)| x.iter().zip(y).map(|(a, b)| f(a, b)).collect()).collect();
        TruncSeries2 { order: self.order, coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.iter().map(|a| a * c).collect()).collect();
        TruncSeries2 { order: self.order, coeffs }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.order, o.order);
        let mut out = Self::zero(self.order);
        for d1 in 0..=self.order {
            for (j1, a) in self.coeffs[d1].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for d2 in 0..=(self.order - d1) {
                    for (j2, b) in o.coeffs[d2].iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        out.coeffs[d1 + d2][j1 + j2] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeffs[0][0].clone();
        if c0.is_zero() {
            return Err(Error::SeriesNotUnit);
        }
        // 1/(c0 (1 + x)) = (1/c0) sum (-x)^k
        let c0i = c0.recip();
        let mut x = self.scale(&c0i);
        x.coeffs[0][0] = Rational::zero();
        let mx = x.scale(&-Rational::one());
        let mut term = Self::constant(self.order, Rational::one());
        let mut acc = term.clone();
        for _ in 1..=self.order {
            term = term.mul(&mx);
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c0i))
    }

    pub fn pow(&self, n: i32) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut acc = Self::constant(self.order, Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Lowest nonvanishing total degree and its homogeneous form in `u`, `h`.
    pub fn lowest_form(&self) -> Option<(usize, MPoly)> {
        for d in 0..=self.order {
            if self.coeffs[d].iter().any(|c| !c.is_zero()) {
                let mut p = MPoly::zero();
                for (j, c) in self.coeffs[d].iter().enumerate() {
                    if !c.is_zero() {
                        let m = MPoly::monomial(c.clone(), &[(Var::U, (d - j) as u32), (Var::H, j as u32)]);
                        p = p.add(&m);
                    }
                }
                return Some((d, p));
            }
        }
        None
    }
}

/// How spectral and quantum parameters approach the rational limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Degeneration {
    /// `z = e^u`, `q = e^{h/2}`.
    #[default]
    Exponential,
    /// `z = 1 + u`, `q = 1 + h/2`; agrees with the exponential map to first order.
    Linear,
}

impl Degeneration {
    fn z_series(self, k: usize) -> TruncSeries2 {
        match self {
            Degeneration::Exponential => TruncSeries2::exp_linear(k, Rational::one(), Rational::zero()),
            Degeneration::Linear => TruncSeries2::constant(k, Rational::one()).add(&TruncSeries2::linear(
                k,
                Rational::one(),
                Rational::zero(),
            )),
        }
    }

    fn q_series(self, k: usize) -> TruncSeries2 {
        match self {
            Degeneration::Exponential => TruncSeries2::exp_linear(k, Rational::zero(), rat(1, 2)),
            Degeneration::Linear => {
                TruncSeries2::constant(k, Rational::one()).add(&TruncSeries2::linear(k, Rational::zero(), rat(1, 2)))
            }
        }
    }
}

fn poly_series(p: &MPoly, zs: &TruncSeries2, qs: &TruncSeries2) -> Result<TruncSeries2> {
    let k = zs.order();
    let mut acc = TruncSeries2::zero(k);
    let vars = p.vars();
    for v in vars {
        if *v != Var::Z && *v != Var::Q {
            return Err(Error::UnexpectedVariable(v.name()));
        }
    }
    let mut zpow: Vec<TruncSeries2> = vec![TruncSeries2::constant(k, Rational::one())];
    let mut qpow: Vec<TruncSeries2> = vec![TruncSeries2::constant(k, Rational::one())];
    for (e, c) in p.terms() {
        let mut t = TruncSeries2::constant(k, c.clone());
        for (v, &n) in vars.iter().zip(e) {
            let (tab, base) = if *v == Var::Z { (&mut zpow, zs) } else { (&mut qpow, qs) };
            while tab.len() <= n as usize {
                let next = tab.last().unwrap().mul(base);
                tab.push(next);
            }
            t = t.mul(&tab[n as usize]);
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// Ratio of the lowest homogeneous forms of numerator and denominator of
/// `f(z, q)` after substituting the degeneration map, as a function of
/// `(u, h)`.
pub fn leading_form_ratio(f: &RatFun, subs: Degeneration, order: usize) -> Result<RatFun> {
    let order = order.max(2);
    let zs = subs.z_series(order);
    let qs = subs.q_series(order);
    let ns = poly_series(f.num(), &zs, &qs)?;
    let ds = poly_series(f.den(), &zs, &qs)?;
    let (Some((_, n)), Some((_, d))) = (ns.lowest_form(), ds.lowest_form()) else {
        return Err(Error::IncreaseOrder { order });
    };
    RatFun::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RatFun {
        s.parse().unwrap()
    }

    #[test]
    fn yang_entries() {
        for subs in [Degeneration::Exponential, Degeneration::Linear] {
            assert_eq!(leading_form_ratio(&p("q^-1*(z-1)/(z-q^-2)"), subs, 4).unwrap(), p("u/(u+h)"));
            assert_eq!(leading_form_ratio(&p("(1-q^-2)/(z-q^-2)"), subs, 4).unwrap(), p("h/(u+h)"));
            assert_eq!(leading_form_ratio(&p("z*(1-q^-2)/(z-q^-2)"), subs, 4).unwrap(), p("h/(u+h)"));
            assert_eq!(leading_form_ratio(&RatFun::one(), subs, 2).unwrap(), RatFun::one());
        }
    }

    #[test]
    fn inverse_and_exp() {
        let q = Degeneration::Exponential.q_series(5);
        let qi = q.inv().unwrap();
        assert_eq!(q.mul(&qi), TruncSeries2::constant(5, Rational::one()));
        assert_eq!(qi, TruncSeries2::exp_linear(5, Rational::zero(), rat(-1, 2)));
        assert!(matches!(TruncSeries2::linear(3, rat(1, 1), rat(0, 1)).inv(), Err(Error::SeriesNotUnit)));
    }

    #[test]
    fn vanishing_to_order_is_an_error() {
        // (z-1)^3 vanishes to degree 3, invisible at order 2.
        let f = p("(z-1)^3/(z-q)^3");
        assert!(matches!(leading_form_ratio(&f, Degeneration::Linear, 2), Err(Error::IncreaseOrder { .. })));
        assert!(leading_form_ratio(&f, Degeneration::Linear, 3).is_ok());
    }
}
