//! Subcommand handlers. Each returns a JSON object; text output is rendered
//! from the same object.

use std::path::Path;
use std::sync::Arc;

use log::{debug, warn};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use klab_core::abelian::{Group, Order};
use klab_core::krull::{direct_sum_model, localize, Inversion, KrullPresentation, PresentationRecord};
use klab_core::lengths::{
    aamp::{aamp_check, minimal_bound, AampWitness},
    delta_of_monoid, delta_star, half_factorial_check, length_set, length_set_with_factorizations,
    max_delta_star_formula, LengthReport,
};
use klab_core::realize::{aamp_survey, witness_search, RealizationTask};
use klab_core::zerosum::{atoms, AtomSet, Sequence, Support};

use crate::args::{CacheAction, Command, LocalizeArgs, ModelArgs, RealizeArgs, SupportArgs};
use crate::cache::{AtomCache, CacheKey};
use crate::config::RunConfig;
use crate::CliError;

pub type Outcome = Result<Map<String, Value>, CliError>;

pub fn run(cmd: &Command, cfg: &RunConfig) -> Outcome {
    match cmd {
        Command::Group { spec } => group(spec),
        Command::Quotient { group, relations } => quotient(group, relations),
        Command::Model(a) => model(a),
        Command::Localize(a) => localize_cmd(a),
        Command::Atoms { target, cap } => atoms_cmd(target, *cap, cfg),
        Command::Lengths { target, sequence, cap, factorizations } => {
            lengths_cmd(target, sequence, *cap, *factorizations, cfg)
        }
        Command::Delta { target, cap } => delta_cmd(target, *cap, cfg),
        Command::DeltaStar { group, cap, guard } => delta_star_cmd(group, *cap, *guard, cfg),
        Command::Aamp { set, d, bound } => aamp_cmd(set, *d, *bound),
        Command::AampSurvey { group, cap, guard } => survey_cmd(group, *cap, *guard, cfg),
        Command::Halffactorial { target, cap } => halffactorial_cmd(target, *cap, cfg),
        Command::Realize(a) => realize_cmd(a),
        Command::Cache { action } => cache_cmd(action, cfg),
    }
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("handlers build objects"),
    }
}

/// Integers that fit in 64 bits become JSON numbers, larger ones strings.
pub fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn parse_group(s: &str) -> Result<Group, CliError> {
    Ok(s.parse::<Group>()?)
}

fn group_fields(g: &Group) -> Value {
    json!({
        "group": g.to_string(),
        "free_rank": g.free_rank(),
        "invariant_factors": g.invariant_factors().iter().map(big).collect::<Vec<_>>(),
        "order": g.order().as_ref().map_or(Value::Null, big),
        "exponent": match g.exponent() {
            Order::Finite(e) => big(&e),
            Order::Infinite => json!("infinite"),
        },
        "rank": g.rank(),
    })
}

fn group(spec: &str) -> Outcome {
    let g = parse_group(spec)?;
    Ok(obj(group_fields(&g)))
}

fn quotient(spec: &str, rels: &[String]) -> Outcome {
    let g = parse_group(spec)?;
    let relations = rels.iter().map(|r| g.parse_element(r)).collect::<Result<Vec<_>, _>>()?;
    let (q, proj) = g.quotient(&relations)?;
    let images: Vec<Value> = g
        .generators()
        .iter()
        .map(|x| Ok(json!({ "generator": g.format_element(x), "image": q.format_element(&proj.apply(x)?) })))
        .collect::<Result<_, CliError>>()?;
    let mut out = obj(json!({
        "source": g.to_string(),
        "relations": relations.iter().map(|x| g.format_element(x)).collect::<Vec<_>>(),
    }));
    out.extend(obj(group_fields(&q)));
    out.insert("generator_images".into(), json!(images));
    Ok(out)
}

fn presentation_json(p: &KrullPresentation) -> Value {
    json!({
        "class_group": p.class_group().to_string(),
        "classes": p.classes().len(),
        "unpopulated_classes": p.unpopulated_classes(),
        "all_counts_omega": p.all_counts_omega(),
        "presentation": p.to_record(),
    })
}

fn parse_groups(specs: &[String]) -> Result<Vec<Group>, CliError> {
    specs.iter().map(|s| parse_group(s)).collect()
}

fn model(a: &ModelArgs) -> Outcome {
    let comps = parse_groups(&a.groups)?;
    let m = direct_sum_model(&comps, a.coordinate_box)?;
    let cg = m.presentation.class_group().clone();
    let components: Vec<Value> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let gens = m.component_generator_classes(i)?;
            Ok(json!({
                "index": i,
                "group": c.to_string(),
                "generator_classes": gens.iter().map(|x| cg.format_element(x)).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = obj(json!({
        "summands": comps.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "coordinate_box": a.coordinate_box,
        "order": cg.order().as_ref().map_or(Value::Null, big),
    }));
    out.extend(obj(presentation_json(&m.presentation)));
    out.insert("components".into(), json!(components));
    if let Some(i) = a.component {
        if i >= comps.len() {
            return Err(CliError::Input(format!("component {i} out of range (have {})", comps.len())));
        }
        let loc = m.localize_to_component(i)?;
        let mut l = obj(presentation_json(&loc));
        l.insert("component".into(), json!(i));
        l.insert("matches_summand".into(), json!(loc.class_group() == &comps[i]));
        out.insert("localized".into(), Value::Object(l));
    }
    Ok(out)
}

fn read_presentation(path: &Path) -> Result<KrullPresentation, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let rec: PresentationRecord =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(KrullPresentation::from_record(&rec)?)
}

fn parse_inversion(p: &KrullPresentation, s: &str) -> Result<Inversion, CliError> {
    if let Some(e) = s.strip_prefix("class=") {
        Ok(Inversion::Class(p.class_group().parse_element(e)?))
    } else if let Some(l) = s.strip_prefix("prime=") {
        Ok(Inversion::Prime(l.to_string()))
    } else {
        Err(CliError::Input(format!("`{s}` is neither class=<elt> nor prime=<label>")))
    }
}

fn localize_cmd(a: &LocalizeArgs) -> Outcome {
    let p = match (&a.presentation, &a.groups) {
        (Some(path), _) => read_presentation(path)?,
        (None, Some(specs)) => direct_sum_model(&parse_groups(specs)?, a.coordinate_box)?.presentation,
        (None, None) => unreachable!("clap requires one source"),
    };
    let inv = a.inversions.iter().map(|s| parse_inversion(&p, s)).collect::<Result<Vec<_>, _>>()?;
    let loc = localize(&p, &inv)?;
    let mut out = obj(json!({
        "source_class_group": p.class_group().to_string(),
        "inverted": a.inversions,
    }));
    out.extend(obj(presentation_json(&loc)));
    Ok(out)
}

fn resolve_support(t: &SupportArgs) -> Result<Arc<Support>, CliError> {
    let g = parse_group(&t.group)?;
    Ok(match &t.support {
        Some(s) => Support::parse(&g, s)?,
        None => Support::full(&g)?,
    })
}

/// Atom set through the cache when enabled.
pub fn cached_atoms(support: &Arc<Support>, cap: Option<u64>, cfg: &RunConfig) -> Result<AtomSet, CliError> {
    if !cfg.cache_enabled {
        return Ok(atoms(support, cap)?);
    }
    let cache = AtomCache::new(&cfg.cache_dir);
    let key = CacheKey::new(support, cap);
    if let Some(set) = cache.get(&key) {
        debug!("atom cache hit {}", cache.path_for(&key).display());
        return Ok(set);
    }
    let set = atoms(support, cap)?;
    if let Err(e) = cache.put(&key, &set) {
        warn!("cannot write atom cache in {}: {e}", cache.dir().display());
    }
    Ok(set)
}

fn support_fields(s: &Support) -> Map<String, Value> {
    obj(json!({ "group": s.group().to_string(), "support": s.to_string() }))
}

fn atoms_cmd(t: &SupportArgs, cap: Option<u64>, cfg: &RunConfig) -> Outcome {
    let support = resolve_support(t)?;
    let set = cached_atoms(&support, cap, cfg)?;
    let mut out = support_fields(&support);
    out.extend(obj(json!({
        "cap": cap,
        "cap_used": set.cap_used,
        "complete": set.complete,
        "count": set.atoms.len(),
        "max_len": set.max_len(),
        "atoms": set.atoms.iter().map(Sequence::to_string).collect::<Vec<_>>(),
    })));
    Ok(out)
}

fn length_fields(r: &LengthReport, set: &AtomSet) -> Map<String, Value> {
    let counts: Map<String, Value> = r.factorization_counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let mut out = obj(json!({
        "sequence": r.target.to_string(),
        "length_set": r.length_set,
        "delta_set": r.delta_set,
        "factorization_counts": counts,
        "complete": r.complete,
        "cap_used": set.cap_used,
    }));
    if let Some(fs) = &r.factorizations {
        let lists: Vec<Vec<String>> =
            fs.iter().map(|f| f.atoms.iter().map(|&i| set.atoms[i].to_string()).collect()).collect();
        out.insert("factorizations".into(), json!(lists));
    }
    out
}

fn lengths_cmd(t: &SupportArgs, seq: &str, cap: Option<u64>, list: bool, cfg: &RunConfig) -> Outcome {
    let support = resolve_support(t)?;
    let s = Sequence::parse(support.clone(), seq)?;
    let cap = cap.or(if support.group().is_finite() { None } else { cfg.default_cap });
    let set = cached_atoms(&support, cap, cfg)?;
    let r = if list { length_set_with_factorizations(&s, &set)? } else { length_set(&s, &set)? };
    let mut out = support_fields(&support);
    out.insert("cap".into(), json!(cap));
    out.extend(length_fields(&r, &set));
    Ok(out)
}

/// Flag, then config default, then `3·|G|`.
fn sweep_cap(g: &Group, flag: Option<u64>, cfg: &RunConfig) -> Result<u64, CliError> {
    if let Some(c) = flag.or(cfg.default_cap) {
        return Ok(c);
    }
    g.order_u64().map(|n| 3 * n).ok_or_else(|| klab_core::Error::NeedsCap.into())
}

fn delta_cmd(t: &SupportArgs, cap: Option<u64>, cfg: &RunConfig) -> Outcome {
    let support = resolve_support(t)?;
    let cap = sweep_cap(support.group(), cap, cfg)?;
    let r = delta_of_monoid(&support, cap)?;
    let mut out = support_fields(&support);
    out.extend(obj(json!({
        "element_cap": r.element_cap,
        "exhaustive": r.exhaustive,
        "sequences_checked": r.sequences_checked,
        "deltas": r.deltas,
        "min_delta": r.deltas.first(),
    })));
    Ok(out)
}

fn delta_star_cmd(spec: &str, cap: Option<u64>, guard: Option<u64>, cfg: &RunConfig) -> Outcome {
    let g = parse_group(spec)?;
    let cap = sweep_cap(&g, cap, cfg)?;
    let guard = guard.unwrap_or(cfg.sweep_guard);
    let r = delta_star(&g, cap, guard)?;
    Ok(obj(json!({
        "group": r.group,
        "element_cap": r.element_cap,
        "guard": guard,
        "values": r.values,
        "max": r.max(),
        "formula_max": max_delta_star_formula(&g).ok(),
        "subsets": r.subsets,
    })))
}

fn witness_json(w: &AampWitness) -> Value {
    serde_json::to_value(w).expect("witness serializes")
}

fn aamp_cmd(set: &[i64], d: u64, bound: Option<u64>) -> Outcome {
    let l: std::collections::BTreeSet<i64> = set.iter().copied().collect();
    let mut out = obj(json!({ "set": l, "d": d }));
    match bound {
        Some(b) => {
            let w = aamp_check(&l, d, b)?;
            out.insert("bound".into(), json!(b));
            out.insert("holds".into(), json!(w.is_some()));
            out.insert("witness".into(), w.as_ref().map_or(Value::Null, witness_json));
        }
        None => {
            let (b, w) = minimal_bound(&l, d)?;
            out.insert("bound".into(), json!(b));
            out.insert("minimal".into(), json!(true));
            out.insert("holds".into(), json!(true));
            out.insert("witness".into(), witness_json(&w));
        }
    }
    Ok(out)
}

fn survey_cmd(spec: &str, cap: Option<u64>, guard: Option<u64>, cfg: &RunConfig) -> Outcome {
    let g = parse_group(spec)?;
    let cap = sweep_cap(&g, cap, cfg)?;
    let guard = guard.unwrap_or(cfg.sweep_guard);
    let r = aamp_survey(&g, cap, guard)?;
    let mut out = obj(serde_json::to_value(&r).expect("survey serializes"));
    out.insert("guard".into(), json!(guard));
    Ok(out)
}

fn halffactorial_cmd(t: &SupportArgs, cap: Option<u64>, cfg: &RunConfig) -> Outcome {
    let support = resolve_support(t)?;
    let cap = sweep_cap(support.group(), cap, cfg)?;
    let r = half_factorial_check(&support, cap)?;
    let mut out = support_fields(&support);
    out.extend(obj(json!({
        "element_cap": r.element_cap,
        "half_factorial": r.verdict,
        "sequences_checked": r.sequences_checked,
        "counterexample": r.counterexample.as_ref().map(|(s, l)| json!({ "sequence": s.to_string(), "length_set": l })),
    })));
    Ok(out)
}

fn realize_cmd(a: &RealizeArgs) -> Outcome {
    let mult = a.mult.clone().unwrap_or_else(|| vec![1; a.lengths.len()]);
    let mut task = RealizationTask::new(a.lengths.clone(), mult);
    if let Some(f) = &a.family {
        task.group_family = parse_groups(f)?;
    }
    task.max_support_size = a.max_support;
    task.max_element_length = a.max_length;
    let r = witness_search(&task)?;
    let witness = match &r.witness {
        Some(w) => {
            let set = atoms(&w.support, None)?;
            let mut m = obj(json!({ "group": w.group.to_string(), "support": w.support.to_string() }));
            m.extend(length_fields(&w.report, &set));
            Value::Object(m)
        }
        None => Value::Null,
    };
    Ok(obj(json!({
        "target_lengths": task.target_lengths,
        "multiplicities": task.multiplicities,
        "family": task.group_family.iter().map(Group::to_string).collect::<Vec<_>>(),
        "max_support": task.max_support_size,
        "max_length": task.max_element_length,
        "found": r.witness.is_some(),
        "groups_searched": r.groups_searched.iter().map(Group::to_string).collect::<Vec<_>>(),
        "candidates_checked": r.candidates_checked,
        "witness": witness,
    })))
}

fn cache_cmd(action: &CacheAction, cfg: &RunConfig) -> Outcome {
    let cache = AtomCache::new(&cfg.cache_dir);
    let dir = cfg.cache_dir.display().to_string();
    let io = |e: std::io::Error| CliError::Io(format!("{dir}: {e}"));
    let exists = cfg.cache_dir.is_dir();
    Ok(match action {
        CacheAction::Path => obj(json!({ "cache_dir": dir, "format_version": crate::cache::FORMAT_VERSION })),
        CacheAction::Stats => {
            let (entries, bytes) = if exists { cache.stats().map_err(io)? } else { (0, 0) };
            obj(json!({ "cache_dir": dir, "entries": entries, "bytes": bytes }))
        }
        CacheAction::Clear => {
            let removed = if exists { cache.clear().map_err(io)? } else { 0 };
            obj(json!({ "cache_dir": dir, "removed": removed }))
        }
    })
}
