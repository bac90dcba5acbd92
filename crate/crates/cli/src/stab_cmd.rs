use clap::ValueEnum;
use qaffine_core::field::{Dense, RatFun, Var};
use qaffine_core::stab::{
    attr_order, chambers, check_all_cycles, check_cycle_identity, r_from, roots, stab_matrix, Chamber, Face,
    Polarization, StabSpec,
};
use qaffine_core::verdict::combine;
use qaffine_core::{Error, Result, Verdict};
use serde_json::json;

use crate::report::RunReport;
use crate::rmat_cmd::strings;
use crate::{read_file, Flags, StabArgs};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabSub {
    /// Torus roots and the chambers they cut out.
    Roots,
    /// Attracting order of a chamber.
    Order,
    /// Stable-envelope matrix in the fixed-point basis (control: h^n added to an entry that must vanish).
    Matrix,
    /// Geometric R-matrix between two chambers (control: chambers swapped, or R squared).
    Rmatrix,
    /// Cyclic products of R-matrices around a face (control: closing envelope with one sign flipped).
    Cycle,
}

fn name(s: StabSub) -> &'static str {
    match s {
        StabSub::Roots => "roots",
        StabSub::Order => "order",
        StabSub::Matrix => "matrix",
        StabSub::Rmatrix => "rmatrix",
        StabSub::Cycle => "cycle",
    }
}

fn m(rows: &[&[&str]]) -> Dense<RatFun> {
    Dense::from_rows(rows.iter().map(|r| r.iter().map(|s| s.parse().expect("literal")).collect()).collect())
        .expect("literal")
}

fn polarization(s: &Option<String>, n: usize) -> Result<Polarization> {
    let Some(s) = s else { return Ok(Polarization::standard(n)) };
    let signs = s
        .split(',')
        .map(|t| match t.trim() {
            "1" | "+1" | "+" => Ok(1i8),
            "-1" | "-" => Ok(-1i8),
            t => Err(Error::InvalidSpec(format!("polarization entry `{t}` is not ±1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if signs.len() != n + 1 {
        return Err(Error::InvalidSpec(format!("polarization needs {} signs, got {}", n + 1, signs.len())));
    }
    Ok(Polarization(signs))
}

fn chamber_or(s: &Option<String>, n: usize, default: Chamber) -> Result<Chamber> {
    match s {
        Some(s) => Chamber::parse(s, n),
        None => Ok(default),
    }
}

fn identity_chamber(n: usize) -> Result<Chamber> {
    Chamber::new((0..=n).collect())
}

pub fn run(a: &StabArgs, flags: &Flags) -> Result<RunReport> {
    let control = flags.control;
    let mut rep = RunReport::new(format!("stab {}", name(a.sub)));
    let (n, chamber, pol) = match &a.spec {
        Some(path) => {
            let spec = StabSpec::from_json(&read_file(path)?)?;
            rep.input("spec", serde_json::to_value(&spec).expect("spec serializes"));
            (spec.n, Some(spec.chamber.clone()), spec.polarization())
        }
        None => {
            if a.n == 0 {
                return Err(Error::InvalidSpec("n must be at least 1".into()));
            }
            let c = a.chamber.as_deref().map(|s| Chamber::parse(s, a.n)).transpose()?;
            (a.n, c, polarization(&a.polarization, a.n)?)
        }
    };
    rep.input("n", n).input("polarization", pol.0.clone()).input("negative_control", control);
    match a.sub {
        StabSub::Roots | StabSub::Order => {
            if control {
                return Err(Error::InvalidSpec(format!("stab {} performs no check to perturb", name(a.sub))));
            }
            if a.sub == StabSub::Roots {
                let rs: Vec<String> = roots(n)?.iter().map(|r| r.to_string()).collect();
                let cs: Vec<String> = chambers(n)?.iter().map(|c| c.to_string()).collect();
                rep.output("roots", rs).output("chambers", cs);
            } else {
                let c = match chamber {
                    Some(c) => c,
                    None => identity_chamber(n)?,
                };
                rep.input("chamber", c.to_string());
                rep.output("order", attr_order(&c).to_string()).output("cocharacter", c.cocharacter());
            }
        }
        StabSub::Matrix => {
            let c = match chamber {
                Some(c) => c,
                None => identity_chamber(n)?,
            };
            rep.input("chamber", c.to_string());
            let mut s = stab_matrix(&c, &pol)?;
            if control {
                let slot = (0..=n)
                    .flat_map(|i| (0..=n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && s.matrix.get(i, j).is_zero())
                    .expect("support forces a zero entry");
                let hn = RatFun::var(Var::H).pow(n as i32)?;
                let e = s.matrix.get(slot.0, slot.1).add_ref(&hn);
                s.matrix.set(slot.0, slot.1, e);
            }
            let chern: Vec<String> = (0..=n).map(|j| s.chern_class(j).map(|x| x.to_string())).collect::<Result<_>>()?;
            rep.output("matrix", strings(&s.matrix)).output("chern_classes", chern);
            rep.verdict(s.check_axioms());
            if n == 1 && pol == Polarization::standard(1) {
                let want = if c == Chamber::plus() {
                    m(&[&["-u", "-h"], &["0", "u - h"]])
                } else {
                    m(&[&["-u - h", "0"], &["-h", "u"]])
                };
                rep.verdict(Verdict::exact("reference-matrix", &s.matrix.sub(&want)?));
            }
        }
        StabSub::Rmatrix => {
            let from = chamber_or(&a.from, n, if n == 1 { Chamber::plus() } else { identity_chamber(n)? })?;
            let to = chamber_or(&a.to, n, if n == 1 { Chamber::minus() } else { identity_chamber(n)?.opposite() })?;
            rep.input("from", from.to_string()).input("to", to.to_string());
            let (from, to) = if control && n == 1 { (to, from) } else { (from, to) };
            let sf = stab_matrix(&from, &pol)?;
            let st = stab_matrix(&to, &pol)?;
            let mut r = r_from(&sf, &st)?;
            let back = r_from(&st, &sf)?;
            if control && n > 1 {
                r = r.mul(&r)?;
            }
            rep.output("rmatrix", strings(&r));
            let mut parts = vec![Verdict::exact("inverse-pair", &r.mul(&back)?.sub(&Dense::identity(n + 1))?)];
            let reference = n == 1 && a.from.is_none() && a.to.is_none() && pol == Polarization::standard(1);
            if reference {
                let want = m(&[&["u/(u + h)", "h/(u + h)"], &["h/(u + h)", "u/(u + h)"]]);
                parts.push(Verdict::exact("reference-rmatrix", &r.sub(&want)?));
            }
            rep.verdict(combine("geometric-r", parts));
        }
        StabSub::Cycle => {
            let face_s = a.face.clone().unwrap_or_else(|| if n == 2 { "u1=u2".into() } else { "u1=u2=0".into() });
            let face = Face::parse(&face_s, n)?;
            rep.input("face", face.to_string());
            if pol != Polarization::standard(n) {
                return Err(Error::InvalidSpec("cycle checks use the standard polarization".into()));
            }
            if control {
                rep.verdict(flipped_closing_factor(&face)?);
            } else {
                let base = chambers(n)?.into_iter().find(|c| face.cycle(c).is_ok());
                let base = base.ok_or_else(|| Error::InvalidChamber(format!("no chamber contains {face}")))?;
                let cycle = face.cycle(&base)?;
                rep.output("cycle", cycle.iter().map(|c| c.to_string()).collect::<Vec<_>>());
                let one = check_cycle_identity(&face, &cycle)?;
                rep.output("nontrivial_walls", one.details["nontrivial_walls"].clone());
                rep.verdict(check_all_cycles(&face)?);
            }
        }
    }
    Ok(rep)
}

/// The cycle product with the closing envelope's first polarization sign
/// flipped: one factor is no longer a wall-crossing of the same family.
fn flipped_closing_factor(face: &Face) -> Result<Verdict> {
    let base = chambers(face.n)?.into_iter().find(|c| face.cycle(c).is_ok());
    let base = base.ok_or_else(|| Error::InvalidChamber(format!("no chamber contains {face}")))?;
    let cycle = face.cycle(&base)?;
    let pol = Polarization::standard(face.n);
    let mut flipped = pol.0.clone();
    flipped[0] = -flipped[0];
    let stabs = cycle.iter().map(|c| stab_matrix(c, &pol)).collect::<Result<Vec<_>>>()?;
    let closing = stab_matrix(&cycle[0], &Polarization(flipped))?;
    let id = Dense::<RatFun>::identity(face.n + 1);
    let mut product = id.clone();
    for k in 0..cycle.len() {
        let next = if k + 1 == cycle.len() { &closing } else { &stabs[k + 1] };
        product = product.mul(&r_from(next, &stabs[k])?)?;
    }
    Ok(Verdict::exact(format!("cycle_identity-control[{face}]"), &product.sub(&id)?)
        .with("chambers", json!(cycle.iter().map(|c| c.to_string()).collect::<Vec<_>>())))
}
