//! JSON job inputs, mode dispatch and result documents for the command line.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::abelian::{AbelianGroup, SubgroupA};
use crate::brauer::{
    brnral_char0, brnral_fq, brnral_local_unramified, brnral_real, BrauerResult, Certificates,
};
use crate::cohomology::{character_module_finite, character_module_frobenius, h1_finite, h1_frobenius, sha1_cyc};
use crate::corpus::{automorphism_from_images, named_group, Action, Char0Case, CorpusCase};
use crate::error::{Error, Result};
use crate::galois::{real_data, validate_frobenius, FiniteGaloisData, FrobeniusData};
use crate::group::{
    abelian_from_invariants, close_generators, demarche_group, direct_product, element_from_json,
    inner_automorphism, semidirect_product, ElementId, Group,
};
use crate::norms::{GroupContext, NormTable};
use crate::oracle::{finite_reports, frobenius_report, OracleReport};

/// Reads an argument that is inline JSON, `@path`, or a path to an existing
/// file. Anything else is passed through as a bare string.
pub fn read_input(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        return std::fs::read_to_string(path)
            .map_err(|e| Error::argument(format!("cannot read {path}: {e}")));
    }
    let trimmed = arg.trim_start();
    if trimmed.starts_with(['{', '[', '"']) || !Path::new(arg).is_file() {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::argument(format!("cannot read {arg}: {e}")))
}

/// Parses JSON text; a bare word is read as a string so that named groups can
/// be given without quotes.
pub fn parse_json(text: &str) -> Result<Value> {
    let t = text.trim();
    if !t.is_empty() && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(Value::String(t.to_string()));
    }
    Ok(serde_json::from_str(text)?)
}

fn schema<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::argument(format!("{what}: {e}")))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GroupSpec {
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    Demarche {
        l: u64,
        m: u32,
    },
    Abelian {
        invariants: Vec<u64>,
    },
    DirectProduct {
        factors: Vec<Value>,
    },
    Semidirect {
        normal: Value,
        acting: Value,
        action: Vec<Vec<Value>>,
    },
    Named {
        name: String,
    },
}

/// Builds a group from its JSON description or name.
pub fn build_group(v: &Value, cap: usize) -> Result<Group> {
    if let Value::String(name) = v {
        return named_group(name, cap);
    }
    match schema::<GroupSpec>(v, "group")? {
        GroupSpec::Permutation { degree, generators } => close_generators(degree, &generators, cap),
        GroupSpec::Demarche { l, m } => demarche_group(l, m, cap),
        GroupSpec::Abelian { invariants } => abelian_from_invariants(&invariants, cap),
        GroupSpec::DirectProduct { factors } => {
            let mut it = factors.iter();
            let first = it
                .next()
                .ok_or_else(|| Error::argument("direct_product needs at least one factor"))?;
            let mut g = build_group(first, cap)?;
            for f in it {
                g = direct_product(g, build_group(f, cap)?, cap)?;
            }
            Ok(g)
        }
        GroupSpec::Semidirect {
            normal,
            acting,
            action,
        } => {
            let n = build_group(&normal, cap)?;
            let h = build_group(&acting, cap)?;
            let images: Vec<Vec<ElementId>> = action
                .iter()
                .map(|imgs| imgs.iter().map(|x| element_from_json(n.as_ref(), x)).collect())
                .collect::<Result<_>>()?;
            semidirect_product(n, h, &images, cap)
        }
        GroupSpec::Named { name } => named_group(&name, cap),
    }
}

/// An automorphism: `"trivial"`, a list of generator images, `{"inner": x}`
/// or `{"table": [...]}` with the image of every element id.
pub fn parse_action(g: &Group, v: Option<&Value>) -> Result<Option<Vec<ElementId>>> {
    let Some(v) = v else { return Ok(None) };
    match v {
        Value::Null => Ok(None),
        Value::String(s) if s == "trivial" => Ok(None),
        Value::Array(items) => {
            let images: Vec<ElementId> = items
                .iter()
                .map(|x| element_from_json(g.as_ref(), x))
                .collect::<Result<_>>()?;
            automorphism_from_images(g, &images).map(Some)
        }
        Value::Object(map) => {
            if let Some(c) = map.get("inner") {
                let c = element_from_json(g.as_ref(), c)?;
                Ok(Some(inner_automorphism(g, c)))
            } else if let Some(t) = map.get("table") {
                let table: Vec<ElementId> = schema(t, "action table")?;
                crate::group::check_automorphism(g, &table)?;
                Ok(Some(table))
            } else {
                Err(Error::argument("action object needs an 'inner' or 'table' entry"))
            }
        }
        _ => Err(Error::argument(format!("unrecognised action {v}"))),
    }
}

#[derive(Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum GaloisSpec {
    Fq {
        q: u64,
        #[serde(default)]
        action: Option<Value>,
    },
    LocalUnramified {
        q: u64,
        #[serde(default)]
        action: Option<Value>,
    },
    Char0 {
        gamma: Value,
        #[serde(default)]
        action: BTreeMap<String, Value>,
        #[serde(default)]
        cyclo: BTreeMap<String, i64>,
    },
    Real {
        #[serde(default)]
        action: Option<Value>,
    },
}

/// Validated Galois input.
#[derive(Debug, Clone)]
pub enum Galois {
    Fq(FrobeniusData),
    LocalUnramified(FrobeniusData),
    Char0(FiniteGaloisData),
    Real(FiniteGaloisData),
}

fn gamma_element(gamma: &Group, key: &str) -> Result<ElementId> {
    let v = serde_json::from_str::<Value>(key).unwrap_or_else(|_| Value::String(key.to_string()));
    element_from_json(gamma.as_ref(), &v)
}

pub fn build_galois(ctx: &GroupContext, v: &Value, cap: usize) -> Result<Galois> {
    let g = &ctx.group;
    Ok(match schema::<GaloisSpec>(v, "galois")? {
        GaloisSpec::Fq { q, action } => Galois::Fq(validate_frobenius(g, q, parse_action(g, action.as_ref())?)?),
        GaloisSpec::LocalUnramified { q, action } => {
            Galois::LocalUnramified(validate_frobenius(g, q, parse_action(g, action.as_ref())?)?)
        }
        GaloisSpec::Char0 {
            gamma,
            action,
            cyclo,
        } => {
            let gamma = build_group(&gamma, cap)?;
            let mut acts = vec![None; gamma.order()];
            let mut cyc = vec![None; gamma.order()];
            for (k, a) in &action {
                acts[gamma_element(&gamma, k)?] = parse_action(g, Some(a))?;
            }
            for (k, &u) in &cyclo {
                cyc[gamma_element(&gamma, k)?] = Some(u);
            }
            Galois::Char0(FiniteGaloisData::new(g, ctx.exponent, gamma, &acts, &cyc)?)
        }
        GaloisSpec::Real { action } => Galois::Real(real_data(g, ctx.exponent, parse_action(g, action.as_ref())?)?),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub oracle: bool,
    pub witnesses: bool,
}

fn invariants_json(a: &AbelianGroup) -> Value {
    json!({ "invariants": a.invariants() })
}

fn subgroup_json(s: &SubgroupA) -> Value {
    json!(s.canonical_generators())
}

fn frobenius_witnesses(ctx: &GroupContext, data: &FrobeniusData) -> Result<Value> {
    let table = NormTable::compute(ctx, &data.twist(&ctx.group))?;
    let classes: Vec<Value> = ctx
        .classes
        .reps()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            json!({
                "rep": ctx.group.label(b),
                "size": ctx.classes.members(i).len(),
                "n_b": table.lengths[i],
                "norm": table.norms[i],
            })
        })
        .collect();
    Ok(json!({
        "q": data.q(),
        "twist_order_on_classes": table.lcm_lengths(),
        "classes": classes,
    }))
}

fn common_witnesses(ctx: &GroupContext, r: &BrauerResult) -> Value {
    let per_sigma: Vec<Value> = r
        .per_sigma
        .iter()
        .map(|w| {
            json!({
                "sigma": w.sigma,
                "fixed": invariants_json(w.fixed.group()),
                "norms": invariants_json(w.norms.group()),
            })
        })
        .collect();
    json!({
        "group_order": ctx.group.order(),
        "exponent": ctx.exponent,
        "conjugacy_classes": ctx.classes.len(),
        "derived_order": ctx.ab.derived().order(),
        "abelianization": invariants_json(ctx.ab.group()),
        "fixed": invariants_json(r.fixed_subgroup.group()),
        "norms": invariants_json(r.norm_subgroup.group()),
        "surviving_classes": r.surviving_classes,
        "per_sigma": per_sigma,
    })
}

fn certificates_json(c: &Certificates) -> Value {
    match c {
        Certificates::None => json!({}),
        Certificates::Local(certs) => {
            let list: Vec<Value> = certs
                .iter()
                .map(|c| {
                    json!({
                        "m": c.m,
                        "relevable": c.relevable.len(),
                        "sums_checked": c.sums_checked,
                    })
                })
                .collect();
            json!({ "relevable": list })
        }
        Certificates::Real(c) => json!({
            "real": {
                "fixed_points": c.fixed_points,
                "images_checked": c.images_checked,
                "classes_checked": c.classes_checked,
            }
        }),
    }
}

fn oracle_json(reports: &[OracleReport]) -> Value {
    let agreement = reports.iter().all(|r| r.agreement);
    let list: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "check": r.check,
                "agreement": r.agreement,
                "skipped": r.is_skipped(),
                "main_result": r.main_result,
                "oracle_result": r.oracle_result,
                "divergence": r.divergence,
            })
        })
        .collect();
    json!({ "agreement": agreement, "reports": list })
}

/// Outcome of a command: the JSON document and whether every oracle check
/// agreed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Value,
    pub agreement: bool,
}

pub fn run_compute(ctx: &GroupContext, galois: &Galois, opts: Options) -> Result<Outcome> {
    let result = match galois {
        Galois::Fq(d) => brnral_fq(ctx, d)?,
        Galois::LocalUnramified(d) => brnral_local_unramified(ctx, d)?,
        Galois::Char0(d) => brnral_char0(ctx, d)?,
        Galois::Real(d) => brnral_real(ctx, d)?,
    };
    let mut doc = json!({
        "mode": result.mode.as_str(),
        "brnral": invariants_json(&result.invariants),
        "h1": invariants_json(&result.h1_invariants),
        "fixed_subgroup": subgroup_json(&result.fixed_subgroup),
        "norm_subgroup": subgroup_json(&result.norm_subgroup),
        "certificates": certificates_json(&result.certificates),
    });
    if let Some(sha) = &result.sha1cyc {
        doc["sha1cyc"] = invariants_json(sha);
    }
    if opts.witnesses {
        let mut w = common_witnesses(ctx, &result);
        if let Galois::Fq(d) | Galois::LocalUnramified(d) = galois {
            w["frobenius"] = frobenius_witnesses(ctx, d)?;
        }
        doc["witnesses"] = w;
    }
    let mut agreement = true;
    if opts.oracle {
        let reports = match galois {
            Galois::Fq(d) | Galois::LocalUnramified(d) => {
                vec![frobenius_report(ctx, "job".into(), d, None)]
            }
            Galois::Char0(d) => finite_reports(ctx, "job", d, false),
            Galois::Real(d) => finite_reports(ctx, "job", d, true),
        };
        let o = oracle_json(&reports);
        agreement = o["agreement"] == json!(true);
        doc["oracle"] = o;
    }
    Ok(Outcome {
        document: doc,
        agreement,
    })
}

/// `H¹` and `Sha¹_cyc` only. Over a finite or local field `Γ` is procyclic
/// and `Sha¹_cyc` vanishes.
pub fn run_h1(ctx: &GroupContext, galois: &Galois) -> Result<Value> {
    let (mode, h1, sha) = match galois {
        Galois::Fq(d) | Galois::LocalUnramified(d) => {
            let m = character_module_frobenius(ctx, d);
            let h = h1_frobenius(&m);
            let mode = if matches!(galois, Galois::Fq(_)) { "fq" } else { "local_unramified" };
            (mode, h.group().clone(), AbelianGroup::trivial())
        }
        Galois::Char0(d) | Galois::Real(d) => {
            let m = character_module_finite(ctx, d)?;
            let h = h1_finite(d.gamma(), &m)?;
            let sha = sha1_cyc(&h).group().clone();
            let mode = if matches!(galois, Galois::Char0(_)) { "char0" } else { "real" };
            (mode, h.group().clone(), sha)
        }
    };
    Ok(json!({
        "mode": mode,
        "h1": invariants_json(&h1),
        "sha1cyc": invariants_json(&sha),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrobeniusEntry {
    q: u64,
    #[serde(default)]
    action: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Char0Entry {
    gamma: Vec<u64>,
    cyclo: Vec<i64>,
    #[serde(default)]
    action: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseEntry {
    name: String,
    group: Value,
    #[serde(default)]
    frobenius: Vec<FrobeniusEntry>,
    #[serde(default)]
    char0: Vec<Char0Entry>,
    #[serde(default)]
    real: Vec<Value>,
}

fn corpus_action(g: &Group, v: Option<&Value>) -> Result<Action> {
    Ok(match parse_action(g, v)? {
        None => Action::Trivial,
        Some(t) => Action::Table(v.map(|v| v.to_string()).unwrap_or_default(), t),
    })
}

/// A corpus file: a list of cases, each with a group, Frobenius choices
/// `{"q", "action"}`, characteristic-zero data `{"gamma": [d…], "cyclo": [u…],
/// "action": [a…]}` over `⊕ Z/dᵢ`, and real actions.
pub fn corpus_from_json(v: &Value, cap: usize) -> Result<Vec<CorpusCase>> {
    let entries: Vec<CaseEntry> = schema(v, "corpus")?;
    entries
        .into_iter()
        .map(|e| {
            let group = build_group(&e.group, cap)?;
            let frobenius = e
                .frobenius
                .iter()
                .map(|f| Ok((f.q, corpus_action(&group, f.action.as_ref())?)))
                .collect::<Result<_>>()?;
            let char0 = e
                .char0
                .iter()
                .map(|c| {
                    if c.cyclo.len() != c.gamma.len() || c.action.len() > c.gamma.len() {
                        return Err(Error::argument("char0 entry: gamma, cyclo and action lengths differ"));
                    }
                    let action = (0..c.gamma.len())
                        .map(|i| corpus_action(&group, c.action.get(i)))
                        .collect::<Result<_>>()?;
                    Ok(Char0Case {
                        gamma: c.gamma.clone(),
                        cyclo: c.cyclo.clone(),
                        action,
                    })
                })
                .collect::<Result<_>>()?;
            let real = e
                .real
                .iter()
                .map(|a| corpus_action(&group, Some(a)))
                .collect::<Result<_>>()?;
            Ok(CorpusCase {
                name: e.name,
                group,
                frobenius,
                char0,
                real,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ELEMENT_CAP;

    fn compute(group: &str, galois: &str) -> Result<Value> {
        let g = build_group(&parse_json(group)?, DEFAULT_ELEMENT_CAP)?;
        let ctx = GroupContext::new(g);
        let gal = build_galois(&ctx, &parse_json(galois)?, DEFAULT_ELEMENT_CAP)?;
        Ok(run_compute(&ctx, &gal, Options { oracle: true, witnesses: true })?.document)
    }

    #[test]
    fn demarche_job() {
        let doc = compute(
            r#"{"kind":"demarche","l":3,"m":1}"#,
            r#"{"mode":"fq","q":4,"action":"trivial"}"#,
        )
        .unwrap();
        assert_eq!(doc["brnral"]["invariants"], json!([3]));
        assert_eq!(doc["oracle"]["agreement"], json!(true));
        assert_eq!(doc["witnesses"]["abelianization"]["invariants"], json!([3, 9, 9]));
    }

    #[test]
    fn characteristic_divides_order() {
        let err = compute(
            r#"{"kind":"demarche","l":3,"m":1}"#,
            r#"{"mode":"fq","q":3,"action":"trivial"}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("characteristic divides group order"));
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = parse_json("{\"kind\":\n  \"demarche\",}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn element_forms() {
        let g = build_group(&json!("s3"), DEFAULT_ELEMENT_CAP).unwrap();
        let a = parse_action(&g, Some(&json!({"inner": [1, 0, 2]}))).unwrap().unwrap();
        let label = g.label(g.generators()[0]);
        let b = parse_action(&g, Some(&json!({ "inner": label }))).unwrap().unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(b.len(), 6);
        let semi = json!({
            "kind": "semidirect",
            "normal": {"kind": "abelian", "invariants": [7]},
            "acting": {"kind": "abelian", "invariants": [3]},
            "action": [[[2]]]
        });
        assert_eq!(build_group(&semi, DEFAULT_ELEMENT_CAP).unwrap().order(), 21);
    }

    #[test]
    fn char0_job_keys() {
        let doc = compute(
            "demarche",
            r#"{"mode":"char0","gamma":{"kind":"abelian","invariants":[3]},"cyclo":{"[1]":4}}"#,
        )
        .unwrap();
        assert_eq!(doc["brnral"]["invariants"], json!([3]));
        assert_eq!(doc["sha1cyc"]["invariants"], json!([]));
    }
}
