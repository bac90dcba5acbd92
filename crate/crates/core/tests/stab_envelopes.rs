use proptest::prelude::*;
use qaffine_core::field::{Dense, RatFun, Var};
use qaffine_core::rmatrix::{yang_r, ybe_difference};
use qaffine_core::stab::*;

fn r(s: &str) -> RatFun {
    s.parse().unwrap()
}

fn m(rows: &[&[&str]]) -> Dense<RatFun> {
    Dense::from_rows(rows.iter().map(|row| row.iter().map(|s| r(s)).collect()).collect()).unwrap()
}

/// Honest-class test by Newton divided differences, independent of the
/// library's interpolation.
fn divided_differences_polynomial(n: usize, vals: &[RatFun]) -> bool {
    let x: Vec<RatFun> = (0..=n).map(|i| RatFun::from_poly(chi(n, i))).collect();
    let mut level: Vec<RatFun> = vals.to_vec();
    for k in 1..=n {
        let next: Vec<RatFun> = (0..level.len() - 1)
            .map(|i| level[i + 1].sub_ref(&level[i]).div_ref(&x[i + k].sub_ref(&x[i])).unwrap())
            .collect();
        if !next[0].is_polynomial() {
            return false;
        }
        level = next;
    }
    vals[0].is_polynomial()
}

#[test]
fn n1_matrices_and_r() {
    let pol = Polarization::standard(1);
    let plus = stab_matrix(&Chamber::plus(), &pol).unwrap();
    let minus = stab_matrix(&Chamber::minus(), &pol).unwrap();
    assert_eq!(plus.matrix, m(&[&["-u", "-h"], &["0", "u - h"]]));
    assert_eq!(minus.matrix, m(&[&["-u - h", "0"], &["-h", "u"]]));
    assert!(plus.check_axioms().passed());
    assert!(minus.check_axioms().passed());
    let rr = geometric_r(&Chamber::plus(), &Chamber::minus()).unwrap();
    assert_eq!(rr, m(&[&["u/(u + h)", "h/(u + h)"], &["h/(u + h)", "u/(u + h)"]]));
}

#[test]
fn n1_r_is_yang_block() {
    let rr = geometric_r(&Chamber::plus(), &Chamber::minus()).unwrap();
    let y = yang_r(&RatFun::var(Var::U)).unwrap();
    assert_eq!(y.submatrix(&[1, 2], &[1, 2]), rr);
    // Embedding the weight-one block into C^2 ⊗ C^2 satisfies the additive YBE.
    let embed = |x: &RatFun| {
        let b = rr.try_map(|e| e.substitute_one(Var::U, x))?;
        let mut full = Dense::identity(4);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            full.set(i + 1, j + 1, b.get(i, j).clone());
        }
        Ok(full)
    };
    let (u, v) = (RatFun::var(Var::U), RatFun::var(Var::V));
    assert!(ybe_difference(embed, &u, &u.add_ref(&v), &v).unwrap().is_zero());
}

#[test]
fn n1_chern_forms() {
    let plus = stab_matrix(&Chamber::plus(), &Polarization::standard(1)).unwrap();
    assert_eq!(plus.chern_class(0).unwrap().to_ratfun(), r("u - c"));
    assert_eq!(plus.chern_class(1).unwrap().to_ratfun(), r("h - c"));
}

#[test]
fn n2_all_chambers_satisfy_axioms() {
    let cs = chambers(2).unwrap();
    assert_eq!(cs.len(), 6);
    for c in &cs {
        let s = stab_matrix(c, &Polarization::standard(2)).unwrap();
        let v = s.check_axioms();
        assert!(v.passed(), "{c}: {v:?}");
        for j in 0..=2 {
            let col: Vec<RatFun> = (0..=2).map(|i| s.matrix.get(i, j).clone()).collect();
            assert!(divided_differences_polynomial(2, &col), "{c} column {j}");
            assert_eq!(s.matrix.get(j, j).num(), &diagonal(c, &Polarization::standard(2), j));
        }
    }
}

#[test]
fn opposite_reverses_order() {
    for n in 1..=3 {
        for c in chambers(n).unwrap() {
            let a = attr_order(&c);
            let b = attr_order(&c.opposite());
            for i in 0..=n {
                for j in (0..=n).filter(|&j| j != i) {
                    assert_eq!(a.above(i, j), b.above(j, i));
                }
            }
        }
    }
}

#[test]
fn r_same_chamber_and_inverse_pairs() {
    let cs = chambers(2).unwrap();
    let id = Dense::<RatFun>::identity(3);
    assert_eq!(geometric_r(&cs[0], &cs[0]).unwrap(), id);
    for a in &cs {
        for b in cs.iter().filter(|b| a.is_adjacent(b)) {
            let p = geometric_r(a, b).unwrap().mul(&geometric_r(b, a).unwrap()).unwrap();
            assert_eq!(p, id, "{a} / {b}");
        }
    }
}

#[test]
fn cycle_around_origin_n2() {
    let face = Face::parse("u1=u2=0", 2).unwrap();
    let v = check_all_cycles(&face).unwrap();
    assert!(v.passed(), "{v:?}");
    let base = chambers(2).unwrap().remove(0);
    let cycle = face.cycle(&base).unwrap();
    assert_eq!(cycle.len(), 6);
    let single = check_cycle_identity(&face, &cycle).unwrap();
    assert_eq!(single.details["nontrivial_walls"], 6);
    // Two-cycle across one wall.
    assert!(check_cycle_identity(&face, &cycle[..2]).unwrap().passed());
}

#[test]
fn non_adjacent_cycle_rejected() {
    let face = Face::parse("u1=u2=0", 2).unwrap();
    let cs = chambers(2).unwrap();
    let bad = vec![cs[0].clone(), cs[0].opposite()];
    assert!(check_cycle_identity(&face, &bad).is_err());
}

#[test]
fn two_pair_face_in_n3() {
    let face = Face::parse("u1=u2;u3=0", 3).unwrap();
    let base = chambers(3).unwrap().into_iter().find(|c| face.cycle(c).is_ok()).unwrap();
    let cycle = face.cycle(&base).unwrap();
    assert_eq!(cycle.len(), 4);
    assert!(check_cycle_identity(&face, &cycle).unwrap().passed());
}

#[test]
fn json_round_trip() {
    let spec = StabSpec::from_json(r#"{"n": 2, "chamber": [2, 0, 1], "polarization": [1, -1, 1]}"#).unwrap();
    let s = spec.solve().unwrap();
    assert!(s.check_axioms().passed());
    assert!(StabSpec::from_json(r#"{"n": 2, "chamber": [0, 0, 1]}"#).is_err());
    assert!(StabSpec::from_json(r#"{"n": 1, "chamber": [2, 0, 1]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn axioms_hold_for_any_chamber_and_polarization(
        n in 1usize..=3,
        pick in 0usize..24,
        signs in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 4),
    ) {
        let cs = chambers(n).unwrap();
        let c = &cs[pick % cs.len()];
        let pol = Polarization(signs[..=n].to_vec());
        let s = stab_matrix(c, &pol).unwrap();
        prop_assert!(s.check_axioms().passed());
        // Flipping one sign flips exactly that column.
        let mut flipped = pol.0.clone();
        flipped[0] = -flipped[0];
        let t = stab_matrix(c, &Polarization(flipped)).unwrap();
        for i in 0..=n {
            prop_assert_eq!(t.matrix.get(i, 0), &-s.matrix.get(i, 0));
        }
    }
}

/// Closed-form candidate `∏_{k below j} (c − χ_k − h) · ∏_{k above j} (c − χ_k)`,
/// restricted to every fixed point and rescaled to the solver's diagonal sign.
fn factorized_column(c: &Chamber, j: usize, diag: &RatFun) -> Vec<RatFun> {
    let n = c.n();
    let h = RatFun::var(Var::H);
    let at = |i: usize| {
        let x = RatFun::from_poly(chi(n, i));
        (0..=n).filter(|&k| k != j).fold(RatFun::one(), |acc, k| {
            let xk = RatFun::from_poly(chi(n, k));
            let f = if c.sign(k, j) < 0 { x.sub_ref(&xk).sub_ref(&h) } else { x.sub_ref(&xk) };
            acc.mul_ref(&f)
        })
    };
    let s = diag.div_ref(&at(j)).unwrap();
    assert!(s == RatFun::one() || s == RatFun::int(-1));
    (0..=n).map(|i| at(i).mul_ref(&s)).collect()
}

#[test]
fn matches_factorized_classes() {
    for n in [2, 3] {
        for c in chambers(n).unwrap() {
            let s = stab_matrix(&c, &Polarization::standard(n)).unwrap();
            for j in 0..=n {
                let want = factorized_column(&c, j, s.matrix.get(j, j));
                let got: Vec<RatFun> = (0..=n).map(|i| s.matrix.get(i, j).clone()).collect();
                assert_eq!(got, want, "{c} column {j}");
            }
        }
    }
}
