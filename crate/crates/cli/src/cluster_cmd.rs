use clap::ValueEnum;
use qaffine_core::cluster::{explore, laurent_check, mutate_seed, ExchangeRelation, Quiver, QuiverJson, Seed};
use qaffine_core::field::{RatFun, Var};
use qaffine_core::verdict::combine;
use qaffine_core::{Error, Result, Verdict};
use serde_json::json;

use crate::report::RunReport;
use crate::{read_file, ClusterArgs, Flags};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterSub {
    /// Mutate at the `--at` vertices in order (control: relations checked against rhs + 1).
    Mutate,
    /// Breadth-first mutation closure up to `--depth` (control: as for mutate).
    Explore,
    /// Laurent check of every explored variable (control: variables divided by 1 + X1).
    Laurent,
}

fn relation(r: &ExchangeRelation, control: bool) -> Result<Verdict> {
    let rhs = if control { r.rhs.add_ref(&RatFun::one()) } else { r.rhs.clone() };
    let diff = r.new.mul_ref(&r.old).sub_ref(&rhs);
    let mut v = Verdict::pass_if(format!("relation[{}]", r.display), diff.is_zero());
    if !diff.is_zero() {
        v = v.with("difference", diff.to_string());
    }
    Ok(v)
}

fn seed_json(s: &Seed) -> serde_json::Value {
    json!({
        "variables": s.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "names": s.names,
        "quiver": s.quiver.to_json(),
    })
}

pub fn run(a: &ClusterArgs, flags: &Flags) -> Result<RunReport> {
    let qj: QuiverJson =
        serde_json::from_str(&read_file(&a.quiver)?).map_err(|e| Error::InvalidQuiver(format!("{}: {e}", a.quiver)))?;
    let seed = Seed::initial(Quiver::from_json(&qj)?)?;
    let control = flags.control;
    let name = match a.sub {
        ClusterSub::Mutate => "mutate",
        ClusterSub::Explore => "explore",
        ClusterSub::Laurent => "laurent",
    };
    let mut rep = RunReport::new(format!("cluster {name}"));
    rep.input("quiver", serde_json::to_value(&qj).expect("quiver serializes")).input("negative_control", control);
    match a.sub {
        ClusterSub::Mutate => {
            if a.at.is_empty() {
                return Err(Error::InvalidQuiver("mutate needs at least one --at vertex".into()));
            }
            rep.input("at", a.at.clone());
            let mut s = seed;
            let mut rels = Vec::new();
            for &k in &a.at {
                if k == 0 || k > s.quiver.r() {
                    return Err(Error::InvalidQuiver(format!("vertex {k} out of range 1..={}", s.quiver.r())));
                }
                let (next, rel) = mutate_seed(&s, k - 1)?;
                rep.verdict(relation(&rel, control)?);
                rels.push(rel.display.clone());
                s = next;
            }
            rep.output("seed", seed_json(&s)).output("relations", rels);
        }
        ClusterSub::Explore | ClusterSub::Laurent => {
            rep.input("depth", a.depth);
            let atlas = explore(&seed, a.depth)?;
            rep.output("clusters", atlas.seeds.len())
                .output("variables", atlas.variables.len())
                .output("relations", atlas.relations.iter().map(|r| r.display.clone()).collect::<Vec<_>>())
                .output("closed", atlas.closed);
            if a.sub == ClusterSub::Explore {
                rep.output(
                    "variable_list",
                    atlas.variables.iter().map(|(n, v)| json!({"name": n, "value": v.to_string()})).collect::<Vec<_>>(),
                );
                let parts = atlas.relations.iter().map(|r| relation(r, control)).collect::<Result<Vec<_>>>()?;
                rep.verdict(combine("exchange-relations", parts));
            }
            let shift = RatFun::one().add_ref(&RatFun::var(Var::X(1)));
            let parts = atlas
                .variables
                .iter()
                .map(|(n, v)| {
                    let v = if control && a.sub == ClusterSub::Laurent { v.div_ref(&shift)? } else { v.clone() };
                    let mut c = laurent_check(&v);
                    c.check = format!("laurent[{n}]");
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?;
            rep.verdict(combine("laurent", parts));
        }
    }
    Ok(rep)
}
