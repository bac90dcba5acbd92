//! Multivariate gcd over the rationals by recursive primitive remainder
//! sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{MPoly, Rational};
use super::var::Var;

/// Monic gcd (lex-leading coefficient one). `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a == b {
        return a.monic();
    }
    let (ma, a1) = split_monomial(a);
    let (mb, b1) = split_monomial(b);
    let gm = common_monomial(&ma, &mb);
    if a1.is_constant() || b1.is_constant() {
        return gm;
    }
    let common: Vec<Var> = a1.vars().iter().filter(|v| b1.contains_var(**v)).copied().collect();
    if common.is_empty() || provably_coprime(&a1, &b1, &common) {
        return gm;
    }
    // Cheap divisibility shortcuts keep the common case (one divides the
    // other) out of the remainder sequence.
    if b1.num_terms() <= a1.num_terms() {
        if a1.div_exact(&b1).is_some() {
            return gm.mul(&b1).monic();
        }
    } else if b1.div_exact(&a1).is_some() {
        return gm.mul(&a1).monic();
    }
    if let Some(h) = heuristic_gcd(&a1, &b1) {
        return gm.mul(&h).monic();
    }
    let x = *common.iter().min_by_key(|v| (a1.degree_in(**v).max(b1.degree_in(**v)), **v)).unwrap();
    let ua = a1.to_univariate(x);
    let ub = b1.to_univariate(x);
    let ca = content(&ua);
    let cb = content(&ub);
    let gc = gcd(&ca, &cb);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let gp = prs(pa, pb);
    gm.mul(&gc).mul(&MPoly::from_univariate(x, &gp)).monic()
}

pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero();
    }
    let g = gcd(a, b);
    a.div_exact(&g).expect("gcd divides").mul(b).monic()
}

fn split_monomial(p: &MPoly) -> (Vec<(Var, u32)>, MPoly) {
    let m = p.monomial_content();
    if m.iter().all(|&e| e == 0) {
        return (vec![], p.clone());
    }
    let mono = p.vars().iter().copied().zip(m.iter().copied()).filter(|(_, e)| *e > 0).collect();
    (mono, p.shift_down(&m))
}

fn common_monomial(a: &[(Var, u32)], b: &[(Var, u32)]) -> MPoly {
    let powers: Vec<(Var, u32)> =
        a.iter().filter_map(|(v, e)| b.iter().find(|(w, _)| w == v).map(|(_, f)| (*v, (*e).min(*f)))).collect();
    MPoly::monomial(Rational::one(), &powers)
}

fn content(coeffs: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    // Start from the sparsest coefficient to reach 1 early.
    let mut order: Vec<&MPoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    order.sort_by_key(|c| (c.num_terms(), c.total_degree()));
    for c in order {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_coeffs(coeffs: &[MPoly], d: &MPoly) -> Vec<MPoly> {
    if d.is_one() {
        return coeffs.to_vec();
    }
    coeffs.iter().map(|c| c.div_exact(d).expect("content divides")).collect()
}

fn trim(p: &mut Vec<MPoly>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

fn degree(p: &[MPoly]) -> usize {
    p.len() - 1
}

/// Primitive part with a normalized rational scale.
fn primitive(p: &[MPoly]) -> Vec<MPoly> {
    let c = content(p);
    let mut out = divide_coeffs(p, &c);
    let lc = out.last().unwrap().leading_coeff();
    if !lc.is_one() && !lc.is_zero() {
        let s = lc.recip();
        out = out.iter().map(|x| x.scale(&s)).collect();
    }
    out
}

fn prem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let db = degree(b);
    let lcb = b.last().unwrap().clone();
    let mut r = a.to_vec();
    trim(&mut r);
    while !(r.len() == 1 && r[0].is_zero()) && degree(&r) >= db {
        let dr = degree(&r);
        let lcr = r.last().unwrap().clone();
        let shift = dr - db;
        let mut next: Vec<MPoly> = r.iter().map(|c| c.mul(&lcb)).collect();
        for (k, bk) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&bk.mul(&lcr));
        }
        debug_assert!(next[dr].is_zero());
        next.pop();
        if next.is_empty() {
            next.push(MPoly::zero());
        }
        trim(&mut next);
        r = next;
    }
    r
}

/// Gcd of two primitive univariate polynomials with multivariate
/// coefficients.
fn prs(a: Vec<MPoly>, b: Vec<MPoly>) -> Vec<MPoly> {
    let (mut a, mut b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    loop {
        if b.len() == 1 {
            return if b[0].is_zero() { primitive(&a) } else { vec![MPoly::one()] };
        }
        let r = prem(&a, &b);
        if r.len() == 1 && r[0].is_zero() {
            return primitive(&b);
        }
        if r.len() == 1 {
            return vec![MPoly::one()];
        }
        a = b;
        b = primitive(&r);
    }
}

/// Scales a rational polynomial to a primitive integer polynomial.
fn integer_primitive(p: &MPoly) -> MPoly {
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        l = l.lcm(c.denom());
    }
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = g.gcd(&(c.numer() * (&l / c.denom())));
    }
    p.scale(&Rational::new(l, g))
}

fn int_content(p: &MPoly) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = g.gcd(c.numer());
    }
    g
}

fn max_norm(p: &MPoly) -> BigInt {
    p.terms().iter().map(|(_, c)| c.numer().abs()).max().unwrap_or_else(BigInt::zero)
}

fn eval_main(p: &MPoly, x: Var, xi: &BigInt) -> MPoly {
    let coeffs = p.to_univariate(x);
    let s = Rational::from_integer(xi.clone());
    let mut acc = MPoly::zero();
    for c in coeffs.iter().rev() {
        acc = acc.scale(&s).add(c);
    }
    acc
}

/// Inverse of `eval_main`: reads each integer coefficient in symmetric
/// base-`xi` digits as a polynomial in `x`.
fn interpolate(h: &MPoly, x: Var, xi: &BigInt) -> MPoly {
    let half = xi / 2;
    let mut out = MPoly::zero();
    let vars = h.vars().to_vec();
    for (e, c) in h.terms() {
        let mut n = c.numer().clone();
        let mut k = 0u32;
        while !n.is_zero() {
            let mut d = n.mod_floor(xi);
            if d > half {
                d -= xi;
            }
            if !d.is_zero() {
                let mut powers: Vec<(Var, u32)> = vars.iter().copied().zip(e.iter().copied()).collect();
                powers.push((x, k));
                out = out.add(&MPoly::monomial(Rational::from_integer(d.clone()), &powers));
            }
            n = (n - d) / xi;
            k += 1;
        }
    }
    out
}

fn normalize_int(p: &MPoly) -> MPoly {
    let c = int_content(p);
    let p = if c.is_one() { p.clone() } else { p.scale(&Rational::new(BigInt::one(), c)) };
    if p.leading_coeff() < Rational::zero() {
        p.neg()
    } else {
        p
    }
}

/// Heuristic gcd by integer evaluation and reconstruction; `None` when all
/// evaluation points fail (the caller then falls back to remainder sequences).
fn heuristic_gcd(a: &MPoly, b: &MPoly) -> Option<MPoly> {
    let f = integer_primitive(a);
    let g = integer_primitive(b);
    heu(&f, &g)
}

/// Each level evaluates away one variable, so the recursion depth is bounded
/// by the number of variables.
fn heu(f: &MPoly, g: &MPoly) -> Option<MPoly> {
    if f.is_constant() || g.is_constant() {
        let c = int_content(f).gcd(&int_content(g));
        return Some(MPoly::constant(Rational::from_integer(c)));
    }
    let cf = int_content(f);
    let cg = int_content(g);
    let gc = cf.gcd(&cg);
    let f = normalize_int(f);
    let g = normalize_int(g);
    let mut vars: Vec<Var> = f.vars().iter().chain(g.vars()).copied().collect();
    vars.sort();
    vars.dedup();
    let x = vars[0];
    let nf = max_norm(&f);
    let ng = max_norm(&g);
    let b = BigInt::from(2) * nf.clone().min(ng.clone()) + BigInt::from(29);
    let mut xi = b.max(BigInt::from(2) * nf.max(ng) + BigInt::from(2));
    let gcf = Rational::from_integer(gc);
    for _ in 0..6 {
        let ff = eval_main(&f, x, &xi);
        let gg = eval_main(&g, x, &xi);
        if !ff.is_zero() && !gg.is_zero() {
            let h = heu(&ff, &gg)?;
            let cand = normalize_int(&interpolate(&h, x, &xi));
            if !cand.is_zero() && f.div_exact(&cand).is_some() && g.div_exact(&cand).is_some() {
                return Some(cand.scale(&gcf));
            }
            // Cofactor route.
            if let Some(cff) = ff.div_exact(&h) {
                let cofactor = interpolate(&cff, x, &xi);
                if !cofactor.is_zero() {
                    if let Some(cand) = f.div_exact(&cofactor) {
                        let cand = normalize_int(&cand);
                        if g.div_exact(&cand).is_some() {
                            return Some(cand.scale(&gcf));
                        }
                    }
                }
            }
        }
        xi = &xi * BigInt::from(73794) * xi.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

// Modular coprimality certificate. If, after sending every variable but `x`
// to a point where both leading coefficients in `x` survive, the images are
// coprime mod p, then no common factor can involve `x`.
const PRIMES: [u64; 3] = [2305843009213693951, 4611686018427387847, 1152921504606846883];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn rat_mod(r: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb).to_u64().unwrap();
    let d = r.denom().mod_floor(&pb).to_u64().unwrap();
    if d == 0 {
        return None;
    }
    Some(mulmod(n, invmod(d, p), p))
}

/// Image of `f` in F_p[x] with the other variables evaluated at `point`.
fn image(f: &MPoly, x: Var, point: &[(Var, u64)], p: u64) -> Option<Vec<u64>> {
    let xi = f.vars().iter().position(|v| *v == x)?;
    let vals: Vec<u64> =
        f.vars().iter().map(|v| point.iter().find(|(w, _)| w == v).map(|t| t.1).unwrap_or(0)).collect();
    let mut out = vec![0u64; f.degree_in(x) as usize + 1];
    for (e, c) in f.terms() {
        let mut t = rat_mod(c, p)?;
        for (k, &n) in e.iter().enumerate() {
            if k != xi && n > 0 {
                t = mulmod(t, powmod(vals[k], n as u64, p), p);
            }
        }
        let slot = &mut out[e[xi] as usize];
        *slot = (*slot + t) % p;
    }
    Some(out)
}

fn deg_mod(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    loop {
        let Some(db) = deg_mod(&b) else {
            return deg_mod(&a).unwrap_or(0);
        };
        if db == 0 {
            return 0;
        }
        // a <- a mod b
        let inv = invmod(b[db], p);
        while let Some(da) = deg_mod(&a) {
            if da < db {
                break;
            }
            let f = mulmod(a[da], inv, p);
            for k in 0..=db {
                let s = mulmod(f, b[k], p);
                a[da - db + k] = (a[da - db + k] + p - s) % p;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

fn provably_coprime(a: &MPoly, b: &MPoly, common: &[Var]) -> bool {
    let mut others: Vec<Var> = a.vars().iter().chain(b.vars()).copied().collect();
    others.sort();
    others.dedup();
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = |p: u64| {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        2 + (seed >> 11) % (p - 3)
    };
    'vars: for &x in common {
        for attempt in 0..4 {
            let p = PRIMES[attempt % PRIMES.len()];
            let point: Vec<(Var, u64)> = others.iter().filter(|v| **v != x).map(|v| (*v, next(p))).collect();
            let (Some(ia), Some(ib)) = (image(a, x, &point, p), image(b, x, &point, p)) else {
                continue;
            };
            if deg_mod(&ia) != Some(ia.len() - 1) || deg_mod(&ib) != Some(ib.len() - 1) {
                continue;
            }
            if gcd_degree_mod(ia, ib, p) == 0 {
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::poly::rat;

    fn v(x: Var) -> MPoly {
        MPoly::var(x)
    }

    #[test]
    fn univariate_gcd() {
        let z = v(Var::Z);
        let a = z.pow(2).sub(&MPoly::one());
        let b = z.sub(&MPoly::one()).mul(&z.add(&MPoly::int(3)));
        assert_eq!(gcd(&a, &b), z.sub(&MPoly::one()));
    }

    #[test]
    fn multivariate_gcd() {
        let (q, z, w) = (v(Var::Q), v(Var::Z), v(Var::W));
        let f = z.mul(&q).sub(&w.pow(2));
        let g1 = z.add(&q.pow(3)).mul(&w);
        let g2 = q.mul(&w).sub(&MPoly::int(2)).mul(&z);
        let a = f.mul(&g1).scale(&rat(3, 7));
        let b = f.mul(&g2).scale(&rat(-5, 2));
        assert_eq!(gcd(&a, &b), f.monic());
        assert!(gcd(&g1, &g2).is_one());
    }

    #[test]
    fn coprime_and_constants() {
        let (q, z) = (v(Var::Q), v(Var::Z));
        assert!(gcd(&q.add(&z), &q.sub(&z)).is_one());
        assert!(gcd(&MPoly::int(6), &z).is_one());
        assert_eq!(gcd(&MPoly::zero(), &z.scale(&rat(2, 1))), z);
    }
}
