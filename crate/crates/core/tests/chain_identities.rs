use std::time::Instant;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use qaffine_core::chain::baxter::{calibrate, tq_residual, TQ_TOL};
use qaffine_core::chain::monodromy::sector_indices;
use qaffine_core::chain::*;
use qaffine_core::field::{numeric, Dense, RatFun};
use qaffine_core::{Error, Status};

fn exact_spec(sites: &[&str], q: &str, twist: &str) -> ChainSpec {
    ChainSpec {
        l: sites.len(),
        site_params: sites.iter().map(|s| s.to_string()).collect(),
        aux_param: "1".into(),
        twist: twist.into(),
        q: q.into(),
        mode: Mode::Exact,
        seed: None,
    }
}

/// Transfer matrix built from explicit index arithmetic, without the
/// library's two-site application.
fn transfer_oracle(ch: &Chain<C>, z: C) -> Dense<C> {
    let l = ch.len();
    let dim = 1usize << l;
    let q = ch.q;
    let qi2 = 1.0 / (q * q);
    // Monodromy entries as a 2×2 matrix of operators, built site by site.
    let mut blocks: Vec<Dense<C>> =
        vec![Dense::identity(dim), Dense::zeros(dim, dim), Dense::zeros(dim, dim), Dense::identity(dim)];
    for s in 0..l {
        let x = z * ch.aux / ch.sites[s];
        let den = x - qi2;
        let diag = (x - 1.0) / (q * den);
        let up = (1.0 - qi2) / den;
        let lo = x * (1.0 - qi2) / den;
        let bit = 1usize << (l - 1 - s);
        // Local L-operator: aux (i,j) → 2×2 site matrix.
        let local = |i: usize, j: usize| -> [[C; 2]; 2] {
            let o = C::new(0.0, 0.0);
            let e = C::new(1.0, 0.0);
            match (i, j) {
                (0, 0) => [[e, o], [o, diag]],
                (0, 1) => [[o, o], [up, o]],
                (1, 0) => [[o, lo], [o, o]],
                _ => [[diag, o], [o, e]],
            }
        };
        let site_op = |m: [[C; 2]; 2]| {
            Dense::from_fn(dim, dim, |r, c| {
                if (r & !bit) != (c & !bit) {
                    return C::new(0.0, 0.0);
                }
                m[usize::from(r & bit != 0)][usize::from(c & bit != 0)]
            })
        };
        let mut next = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Dense::zeros(dim, dim);
                for k in 0..2 {
                    acc = acc.add(&site_op(local(i, k)).mul(&blocks[2 * k + j]).unwrap()).unwrap();
                }
                next.push(acc);
            }
        }
        blocks = next;
    }
    blocks[0].scale(&ch.twist).add(&blocks[3].scale(&(1.0 / ch.twist))).unwrap()
}

#[test]
fn transfer_agrees_with_index_oracle() {
    for (l, seed) in [(1, 1), (3, 2), (4, 3)] {
        let ch = ChainSpec::random_numeric(l, seed, false).numeric().unwrap();
        let z = C::new(0.7, 0.4);
        let t = transfer(&ch, &z).unwrap();
        assert!(numeric::max_abs(&t.sub(&transfer_oracle(&ch, z)).unwrap()) < 1e-12);
    }
}

#[test]
fn rtt_exact_two_sites() {
    let ch = exact_spec(&["1", "2"], "3/5", "t").exact().unwrap();
    let v = check_rtt(&ch, 0).unwrap();
    assert!(v.passed(), "{v:?}");
}

#[test]
fn rtt_numeric_l4_l6() {
    for l in [4, 6] {
        let start = Instant::now();
        let ch = ChainSpec::random_numeric(l, 11 + l as u64, false).numeric().unwrap();
        let v = check_rtt(&ch, 5).unwrap();
        assert!(v.passed(), "{v:?}");
        assert!(v.residual.unwrap() < 1e-10);
        assert!(start.elapsed().as_secs_f64() < 30.0);
    }
}

#[test]
fn commute_exact_small() {
    for sites in [&["1", "2"][..], &["1", "2", "1/2"][..]] {
        let ch = exact_spec(sites, "3/5", "3").exact().unwrap();
        let v = check_commute(&ch, 0).unwrap();
        assert!(v.passed(), "{v:?}");
    }
}

#[test]
fn commute_numeric_l8() {
    let ch = ChainSpec::random_numeric(8, 8, false).numeric().unwrap();
    let v = check_commute(&ch, 3).unwrap();
    assert!(v.passed(), "{v:?}");
    assert!(v.residual.unwrap() < 1e-10);
}

#[test]
fn rtt_and_commute_controls_fail() {
    let ch = exact_spec(&["1", "2"], "3/5", "3").exact().unwrap();
    assert!(!check_rtt_with(&ch, 0, true).unwrap().passed());
    assert!(!check_commute_with(&ch, 0, true).unwrap().passed());
    let ch = ChainSpec::random_numeric(4, 3, false).numeric().unwrap();
    let v = check_rtt_with(&ch, 1, true).unwrap();
    assert!(!v.passed() && v.residual.unwrap() > 1e-6, "{v:?}");
    let v = check_commute_with(&ch, 1, true).unwrap();
    assert!(!v.passed() && v.residual.unwrap() > 1e-6, "{v:?}");
}

#[test]
fn multiplicativity_and_control() {
    for l in 1..=5 {
        let ch = ChainSpec::random_numeric(l, 20 + l as u64, false).numeric().unwrap();
        for a2 in [ch.aux, C::new(0.6, 0.3)] {
            let v = check_multiplicativity(&ch, &a2, false, 1).unwrap();
            assert!(v.passed() && v.residual.unwrap() < 1e-10, "{v:?}");
        }
        assert!(!check_multiplicativity(&ch, &ch.aux, true, 1).unwrap().passed());
    }
}

#[test]
fn vacuum_branch_matches_vacuum_eigenvalues() {
    let ch = ChainSpec::random_numeric(3, 4, false).numeric().unwrap();
    let sp = spectrum(&ch, 0, 0).unwrap();
    for z in [C::new(0.2, 0.9), C::new(-1.3, 0.1)] {
        let expect = ch.twist + ch.vacuum_d(z) / ch.twist;
        assert!((sp.branches[0].eval(&ch, z) - expect).norm() < 1e-9);
    }
}

#[test]
fn spectrum_matches_direct_diagonalization() {
    for (l, m, homogeneous) in [(2, 1, true), (3, 1, false), (4, 2, false)] {
        let ch = ChainSpec::random_numeric(l, 40 + l as u64, homogeneous).numeric().unwrap();
        let sp = spectrum(&ch, m, 1).unwrap();
        assert_eq!(sp.branches.len(), sector_indices(l, m).len());
        let z = C::new(1.7, -0.6);
        let full = transfer_oracle(&ch, z);
        let idx = sector_indices(l, m);
        let (vals, _) = numeric::eig(&full.submatrix(&idx, &idx)).unwrap();
        for b in &sp.branches {
            assert!(b.numerator.len() <= l + 1);
            let lam = b.eval(&ch, z);
            let best = vals.iter().map(|v| (v - lam).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8 * lam.norm().max(1.0), "L={l} m={m}: {best}");
        }
    }
}

#[test]
fn tq_pairing_is_unique_on_two_sites() {
    let ch = ChainSpec::random_numeric(2, 7, true).numeric().unwrap();
    assert_eq!(calibrate(&ch, 1, 0).unwrap(), vec![TqPairing::FROZEN]);
}

#[test]
fn tq_completeness_two_and_three_sites() {
    let start = Instant::now();
    for l in [2, 3] {
        for seed in [1, 2] {
            let ch = ChainSpec::random_numeric(l, seed, true).numeric().unwrap();
            let mut count = 0;
            for m in 0..=l {
                let sp = spectrum(&ch, m, seed).unwrap();
                for b in &sp.branches {
                    let q = solve_q(&ch, b, m, TqPairing::FROZEN, seed).unwrap();
                    assert_eq!(q.degree, m);
                    assert!(q.tq_residual < TQ_TOL, "L={l} m={m}: {}", q.tq_residual);
                    let v = bethe_check(&q, &ch, TqPairing::FROZEN).unwrap();
                    assert_eq!(v.status, Status::Pass, "{v:?}");
                    count += 1;
                }
            }
            assert_eq!(count, 1 << l);
        }
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn vacuum_q_is_one_and_wrong_degree_has_no_solution() {
    let ch = ChainSpec::random_numeric(2, 3, true).numeric().unwrap();
    let vac = spectrum(&ch, 0, 0).unwrap();
    let q = solve_q(&ch, &vac.branches[0], 0, TqPairing::FROZEN, 0).unwrap();
    assert_eq!(q.coefficients, vec![C::new(1.0, 0.0)]);
    assert!(bethe_check(&q, &ch, TqPairing::FROZEN).unwrap().passed());

    let sp = spectrum(&ch, 1, 0).unwrap();
    for b in &sp.branches {
        assert_eq!(solve_q(&ch, b, 0, TqPairing::FROZEN, 0).unwrap_err(), Error::NoQ { degree: 0 });
    }
}

#[test]
fn perturbed_root_fails_bethe() {
    let ch = ChainSpec::random_numeric(2, 5, true).numeric().unwrap();
    let sp = spectrum(&ch, 1, 0).unwrap();
    for b in &sp.branches {
        let q = solve_q(&ch, b, 1, TqPairing::FROZEN, 0).unwrap();
        let r = q.roots().unwrap();
        let bad = QPolynomial::from_roots(&[r[0] + 1e-3]);
        assert_eq!(bethe_check(&bad, &ch, TqPairing::FROZEN).unwrap().status, Status::Fail);
    }
}

#[test]
fn bethe_solve_recovers_roots() {
    for (l, m) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        let ch = ChainSpec::random_numeric(l, 9, true).numeric().unwrap();
        let sp = spectrum(&ch, m, 0).unwrap();
        for b in &sp.branches {
            let q = solve_q(&ch, b, m, TqPairing::FROZEN, 0).unwrap();
            let roots = q.roots().unwrap();
            // Fixed point of the Newton map.
            let fixed = bethe_solve(&ch, m, &roots, TqPairing::FROZEN).unwrap();
            assert!(same_set(&fixed.roots, &roots, 1e-6));
            let seeds: Vec<C> = roots.iter().map(|r| r + C::new(1e-2, -1e-2) * r.norm()).collect();
            let sol = bethe_solve(&ch, m, &seeds, TqPairing::FROZEN).unwrap();
            assert!(same_set(&sol.roots, &roots, 1e-6), "L={l} m={m}: {:?} vs {roots:?}", sol.roots);
            assert_eq!(sol.cartan, 2);
        }
    }
    let ch = ChainSpec::random_numeric(2, 9, true).numeric().unwrap();
    assert!(bethe_solve(&ch, 0, &[], TqPairing::FROZEN).unwrap().roots.is_empty());
}

fn same_set(a: &[C], b: &[C], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| (x - y).norm() < tol * y.norm().max(1.0)))
}

#[test]
fn bethe_term_ratio_is_minus_one() {
    let ch = ChainSpec::random_numeric(3, 2, true).numeric().unwrap();
    let sp = spectrum(&ch, 2, 0).unwrap();
    let q = solve_q(&ch, &sp.branches[0], 2, TqPairing::FROZEN, 0).unwrap();
    let v = bethe_check(&q, &ch, TqPairing::FROZEN).unwrap();
    for r in v.details["term_ratios"].as_array().unwrap() {
        let x = qaffine_core::field::parse::parse_complex(r.as_str().unwrap()).unwrap();
        assert!((x + 1.0).norm() < 1e-7);
    }
    assert!(tq_residual(&ch, &sp.branches[0], &q, TqPairing::FROZEN, &[C::new(0.3, 0.3)]) < TQ_TOL);
}

#[test]
fn exact_vacuum_matches_closed_form() {
    let ch = exact_spec(&["1", "1"], "q", "t").exact().unwrap();
    let (a, d) = vacuum_eigs(&ch).unwrap();
    assert!(a.is_one());
    assert_eq!(d, "(z-1)^2/(q*z-1/q)^2".parse::<RatFun>().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rtt_and_commute_random_numeric(l in 1usize..=4, seed in 0u64..1000) {
        let ch = ChainSpec::random_numeric(l, seed, false).numeric().unwrap();
        prop_assert!(check_rtt(&ch, seed).unwrap().passed());
        prop_assert!(check_commute(&ch, seed).unwrap().passed());
    }
}
