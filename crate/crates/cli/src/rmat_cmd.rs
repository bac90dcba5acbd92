use clap::{Subcommand, ValueEnum};
use qaffine_core::field::{Degeneration, Dense, RatFun, Var};
use qaffine_core::rmatrix::{self, YbeModel};
use qaffine_core::verdict::combine;
use qaffine_core::{Result, Verdict};
use serde_json::{json, Value};

use crate::report::RunReport;
use crate::Flags;

#[derive(Subcommand, Debug)]
pub enum RmatCmd {
    /// Yang-Baxter equation, exact (control: one entry of R doubled).
    Ybe {
        #[arg(long, value_enum, default_value_t = Model::Trig)]
        model: Model,
    },
    /// Yang degeneration of the middle block (control: perturbed R).
    Yang {
        #[arg(long, value_enum, default_value_t = Degen::Exponential)]
        degeneration: Degen,
        /// Expansion order of the leading-form computation.
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Rational normalization and unitarity of `R_{V1(a),V1(b)}` (control: perturbed R).
    Normalize {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "q^2")]
        b: String,
    },
    /// Limit of the normalized matrix at a pole (control: perturbed R).
    Limit {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "q^2")]
        b: String,
        #[arg(long, default_value = "1")]
        point: String,
        /// Pole order; detected when omitted.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Inverse identity (control: perturbed R).
    Inverse {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "q^2")]
        b: String,
    },
    /// Hexagon relation (control: transposed factor).
    Hexagon {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "2")]
        b: String,
        #[arg(long, default_value = "5")]
        c: String,
    },
    /// `P∘R` intertwines the finite quantum group (control: bare flip).
    Intertwine {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "q^2")]
        b: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Model {
    Trig,
    Yang,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Degen {
    Exponential,
    Linear,
}

pub fn strings(m: &Dense<RatFun>) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn parse(s: &str) -> Result<RatFun> {
    s.parse()
}

/// The documented perturbation: entry (2,3) (1-based) doubled.
fn perturb(mut m: Dense<RatFun>) -> Dense<RatFun> {
    let e = m.get(1, 2).scale(&qaffine_core::field::rat_int(2));
    m.set(1, 2, e);
    m
}

fn r_ab(z: &RatFun, a: &RatFun, b: &RatFun, control: bool) -> Result<Dense<RatFun>> {
    let m = rmatrix::r_ab(z, a, b)?;
    Ok(if control { perturb(m) } else { m })
}

fn yang_golden() -> Dense<RatFun> {
    let (u, h) = (RatFun::var(Var::U), RatFun::var(Var::H));
    let s = u.add_ref(&h);
    let d = u.div_ref(&s).unwrap();
    let o = h.div_ref(&s).unwrap();
    Dense::from_rows(vec![vec![d.clone(), o.clone()], vec![o, d]]).unwrap()
}

/// `(f R_{V,W}(z))·P (f R_{W,V}(z⁻¹)) P − Id`.
fn unitarity(a: &RatFun, b: &RatFun, control: bool) -> Result<Dense<RatFun>> {
    let z = RatFun::var(Var::Z);
    let vw = rmatrix::normalize(&r_ab(&z, a, b, control)?)?;
    let wv = rmatrix::normalize(&rmatrix::r_ab(&z.inv()?, b, a)?)?;
    let p = rmatrix::flip();
    vw.normalized.mul(&p.mul(&wv.normalized)?.mul(&p)?)?.sub(&Dense::identity(4))
}

pub fn run(cmd: RmatCmd, flags: &Flags) -> Result<RunReport> {
    let control = flags.control;
    let mut rep;
    match cmd {
        RmatCmd::Ybe { model } => {
            rep = RunReport::new("rmat ybe");
            rep.input("model", format!("{model:?}").to_lowercase());
            let m = match (model, control) {
                (Model::Trig, false) => YbeModel::Trigonometric,
                (Model::Trig, true) => YbeModel::PerturbedTrigonometric,
                (Model::Yang, false) => YbeModel::Yang,
                (Model::Yang, true) => {
                    let (u, v) = (RatFun::var(Var::U), RatFun::var(Var::V));
                    let bad = |x: &RatFun| rmatrix::yang_r(x).map(perturb);
                    let diff = rmatrix::ybe_difference(bad, &u, &u.add_ref(&v), &v)?;
                    rep.verdict(Verdict::exact("ybe-yang-control", &diff)).input("negative_control", control);
                    return Ok(rep);
                }
            };
            rep.verdict(rmatrix::check_ybe(m)?);
        }
        RmatCmd::Yang { degeneration, order } => {
            rep = RunReport::new("rmat yang");
            let subs = match degeneration {
                Degen::Exponential => Degeneration::Exponential,
                Degen::Linear => Degeneration::Linear,
            };
            rep.input("degeneration", format!("{degeneration:?}").to_lowercase()).input("order", order);
            let mut r = rmatrix::build_trig_r(&RatFun::var(Var::Z))?;
            if control {
                r.matrix = perturb(r.matrix);
            }
            let y = rmatrix::yang_limit(&r, subs, order)?;
            rep.output("block", strings(&y));
            rep.output("yang_r", strings(&rmatrix::yang_r(&RatFun::var(Var::U))?));
            rep.verdict(Verdict::exact("yang-limit", &y.sub(&yang_golden())?));
        }
        RmatCmd::Normalize { a, b } => {
            rep = RunReport::new("rmat normalize");
            rep.input("a", a.clone()).input("b", b.clone());
            let (a, b) = (parse(&a)?, parse(&b)?);
            let n = rmatrix::normalize(&r_ab(&RatFun::var(Var::Z), &a, &b, control)?)?;
            rep.output("f", n.f.to_string()).output("normalized", strings(&n.normalized));
            let first = n.normalized.get(0, 0).is_one();
            rep.verdict(combine(
                "normalize",
                vec![Verdict::pass_if("unit-vacuum", first), Verdict::exact("unitarity", &unitarity(&a, &b, control)?)],
            ));
        }
        RmatCmd::Limit { a, b, point, order } => {
            rep = RunReport::new("rmat limit");
            rep.input("a", a.clone()).input("b", b.clone()).input("point", point.clone());
            let (a, b, p) = (parse(&a)?, parse(&b)?, parse(&point)?);
            let n = rmatrix::normalize(&r_ab(&RatFun::var(Var::Z), &a, &b, control)?)?;
            let order = match order {
                Some(o) => o,
                None => rmatrix::pole_order_at(&n.normalized, &p)?,
            };
            rep.output("order", order);
            if order == 0 {
                let value = n.normalized.try_map(|x| x.substitute_one(Var::Z, &p))?;
                rep.output("rank", rmatrix::rank(&value))
                    .output("limit", strings(&value))
                    .input("negative_control", control);
                return Ok(rep);
            }
            let lim = rmatrix::residue_limit(&n.normalized, &p, order)?;
            let rank = rmatrix::rank(&lim.limit);
            rep.output("limit", strings(&lim.limit))
                .output("normalized", strings(&lim.normalized))
                .output("rank", rank);
            // The limit of an intertwiner is an intertwiner: P·limit commutes
            // with the finite quantum group and is not invertible.
            let gens = rmatrix::coproduct_generators(rmatrix::Coproduct::Opposite)?;
            let mut parts = vec![Verdict::pass_if("rank-deficient", rank < 4)];
            for (name, g) in ["E", "F", "K"].iter().zip(gens.iter()) {
                let c = lim.normalized.mul(g)?.sub(&g.mul(&lim.normalized)?)?;
                parts.push(Verdict::exact(format!("commutes:{name}"), &c));
            }
            rep.verdict(combine("pole-limit", parts));
        }
        RmatCmd::Inverse { a, b } => {
            rep = RunReport::new("rmat inverse");
            rep.input("a", a.clone()).input("b", b.clone());
            let (a, b) = (parse(&a)?, parse(&b)?);
            if control {
                rep.verdict(Verdict::exact("inverse-control", &unitarity(&a, &b, true)?));
            } else {
                rep.verdict(rmatrix::check_inverse_identity(&a, &b)?);
            }
        }
        RmatCmd::Hexagon { a, b, c } => {
            rep = RunReport::new("rmat hexagon");
            rep.input("a", a.clone()).input("b", b.clone()).input("c", c.clone());
            rep.verdict(rmatrix::check_hexagon(&parse(&a)?, &parse(&b)?, &parse(&c)?, control)?);
        }
        RmatCmd::Intertwine { a, b } => {
            rep = RunReport::new("rmat intertwine");
            rep.input("a", a.clone()).input("b", b.clone());
            rep.verdict(rmatrix::check_zero_mode_intertwiner(&parse(&a)?, &parse(&b)?, control)?);
        }
    }
    rep.input("negative_control", control);
    Ok(rep)
}
