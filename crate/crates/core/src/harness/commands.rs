use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::report::{Assertion, Report, ReportBody, TableRow, VERSION};
use super::table_io::{emit_graded_family, emit_multiplier_table, parse_graded_family, parse_multiplier_table};
use crate::error::{Error, Result};
use crate::filtration::square_function_norm;
use crate::hardy::{is_hardy_last, sample_hardy_martingale};
use crate::harmonics::{GroupFunction, GroupSpec};
use crate::multiplier::{
    adapted_multiplier_norm, fefferman_norm, hardy_last_multiplier_norm, martingale_hardy_multiplier_norm,
    GradedMultiplierFamily, MultiplierTable,
};
use crate::oracles::davis_garsia::{davis_garsia_objective, davis_garsia_solve, DavisGarsiaOptions};
use crate::oracles::equivalence::{equivalence_report, muller_pair, Equivalence, EquivalenceConfig};
use crate::oracles::primal::{necessity_probe, primal_ratio_search, RatioProblem, SamplerConfig};
use crate::oracles::prop1::{DualFieldBuilder, SignStrategy};
use crate::oracles::samplers::{random_cone_table, random_graded_family};
use crate::rng::{complex_gaussian, derive_seed, seeded};

pub const COMMANDS: [&str; 8] =
    ["fnorm", "adapted-norm", "corollary-norm", "hardylast-norm", "prop1-verify", "dg-solve", "equiv-report", "hardy-ineq"];

#[derive(Default)]
struct Outcome {
    inputs: Value,
    results: Value,
    rows: Vec<TableRow>,
    assertions: Vec<Assertion>,
}

/// Runs one command. Input problems are errors; failed checks are recorded
/// in the report and make [`Report::passed`] false.
pub fn run_command(config: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut cfg = config.clone();
    let outcome = match cfg.command.as_str() {
        "fnorm" => fnorm(&mut cfg)?,
        "adapted-norm" => adapted_norm(&mut cfg)?,
        "corollary-norm" => corollary_norm(&mut cfg)?,
        "hardylast-norm" => hardylast_norm(&mut cfg)?,
        "prop1-verify" => prop1_verify(&mut cfg)?,
        "dg-solve" => dg_solve(&mut cfg)?,
        "equiv-report" => equiv_report(&mut cfg)?,
        "hardy-ineq" => hardy_ineq(&mut cfg)?,
        other => return Err(Error::UnknownCommand(other.to_string())),
    };
    cfg.out = None;
    let passed = outcome.assertions.iter().all(|a| a.passed);
    Ok(Report {
        body: ReportBody {
            version: VERSION,
            command: cfg.command.clone(),
            config: cfg,
            inputs: outcome.inputs,
            results: outcome.results,
            assertions: outcome.assertions,
            passed,
        },
        rows: outcome.rows,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

fn table_document(cfg: &ExperimentConfig) -> Result<Value> {
    match &cfg.table {
        None => Err(Error::InvalidArgument(format!("`{}` needs a multiplier table (--table)", cfg.command))),
        Some(Value::String(path)) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
        }
        Some(doc) => Ok(doc.clone()),
    }
}

fn load_table(cfg: &ExperimentConfig) -> Result<MultiplierTable> {
    parse_multiplier_table(&table_document(cfg)?)
}

fn load_family(cfg: &ExperimentConfig) -> Result<GradedMultiplierFamily> {
    parse_graded_family(&table_document(cfg)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn fnorm(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let table = load_table(cfg)?;
    if table.channels() != 1 {
        return Err(Error::InvalidArgument("fnorm takes a scalar table".into()));
    }
    let mut lambda = Vec::new();
    for (idx, _, v) in table.iter() {
        let n = match idx.entries() {
            [] => 0,
            [n] if *n >= 0 => *n as usize,
            other => return Err(Error::InvalidArgument(format!("fnorm takes indices [n] with n >= 0, got {other:?}"))),
        };
        if lambda.len() <= n {
            lambda.resize(n + 1, 0.0);
        }
        lambda[n] = v;
    }
    let f = fefferman_norm(&lambda)?;
    Ok(Outcome {
        inputs: json!({"table": emit_multiplier_table(&table)}),
        results: to_value(&f),
        rows: vec![
            TableRow::new("fnorm", "value", f.value),
            TableRow::new("fnorm", "maximizing_a", f.maximizing_a.map_or(f64::NAN, |a| a as f64)),
            TableRow::new("fnorm", "block_energy", f.block_energy),
        ],
        assertions: vec![],
    })
}

fn adapted_norm(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let family = load_family(cfg)?;
    let group = cfg.group_spec(2, 1)?;
    let n = adapted_multiplier_norm(&family, &group)?;
    let mut rows = vec![TableRow::new("adapted-norm", "value", n.value)];
    rows.extend(n.per_level.iter().enumerate().map(|(k, v)| TableRow::new(format!("level{k}"), "value", *v)));
    Ok(Outcome {
        inputs: json!({"group": group.to_string(), "table": emit_graded_family(&family)}),
        results: to_value(&n),
        rows,
        assertions: vec![],
    })
}

fn two_term_rows(item: &str, n: &crate::multiplier::TwoTermNorm) -> Vec<TableRow> {
    vec![TableRow::new(item, "value", n.value), TableRow::new(item, "t1", n.t1), TableRow::new(item, "t2", n.t2)]
}

fn corollary_norm(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let table = load_table(cfg)?;
    let group = cfg.group_spec(2, 1)?;
    let n = martingale_hardy_multiplier_norm(&table, &group)?;
    Ok(Outcome {
        inputs: json!({"group": group.to_string(), "table": emit_multiplier_table(&table)}),
        results: to_value(&n),
        rows: two_term_rows("corollary-norm", &n),
        assertions: vec![],
    })
}

/// Ratio cap for sampled `primal_pairing / ||f||` against the Hardy-last norm.
pub const HARDYLAST_RATIO_CAP: f64 = 50.0;
/// Necessity probes must reach `T1 / HARDYLAST_PROBE_FACTOR`.
pub const HARDYLAST_PROBE_FACTOR: f64 = 10.0;

fn hardylast_norm(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let group = cfg.group_spec(8, 2)?;
    let samples = *cfg.samples.get_or_insert(100);
    let degree = *cfg.degree.get_or_insert(2);
    let (tables, inputs) = if cfg.table.is_some() {
        let t = load_table(cfg)?;
        let doc = emit_multiplier_table(&t);
        (vec![t], json!({"group": group.to_string(), "table": doc}))
    } else {
        let trials = *cfg.trials.get_or_insert(20);
        let support = *cfg.support.get_or_insert(6);
        let tables: Vec<_> = (0..trials as u64)
            .map(|i| random_cone_table(&group, support, derive_seed(cfg.seed, i)))
            .collect::<Result<_>>()?;
        let docs: Vec<_> = tables.iter().map(emit_multiplier_table).collect();
        (tables, json!({"group": group.to_string(), "tables": docs}))
    };
    let mut out = Outcome { inputs, ..Default::default() };
    let mut results = Vec::new();
    let (mut worst_ratio, mut worst_probe, mut bound_ok) = (0.0f64, f64::INFINITY, true);
    for (i, table) in tables.iter().enumerate() {
        let norm = hardy_last_multiplier_norm(table)?;
        let search = primal_ratio_search(
            RatioProblem::HardyLast { table, group: &group },
            &SamplerConfig { degree },
            samples,
            derive_seed(cfg.seed ^ 0x5eed, i as u64),
        )?;
        let probe = necessity_probe(table, &group)?;
        let item = format!("table{i}");
        out.rows.extend(two_term_rows(&item, &norm));
        out.rows.push(TableRow::new(&item, "max_ratio", search.max_ratio));
        out.rows.push(TableRow::new(&item, "probe_sup", probe.sup_ratio));
        if norm.value > 0.0 {
            worst_ratio = worst_ratio.max(search.max_ratio / norm.value);
        }
        if norm.t1 > 0.0 {
            worst_probe = worst_probe.min(probe.sup_ratio / norm.t1);
        }
        bound_ok &= search.bound_respected;
        results.push(json!({"norm": to_value(&norm), "search": to_value(&search), "probe": to_value(&probe)}));
    }
    out.assertions.push(Assertion::at_most("sampled ratio / norm", worst_ratio, HARDYLAST_RATIO_CAP));
    if worst_probe.is_finite() {
        out.assertions.push(Assertion::at_least("probe sup / T1", worst_probe, 1.0 / HARDYLAST_PROBE_FACTOR));
    }
    out.assertions.push(Assertion::at_least("elementary bound respected", bound_ok as u8 as f64, 1.0));
    out.results = json!({"per_table": results, "max_ratio_over_norm": worst_ratio, "min_probe_over_t1": worst_probe.is_finite().then_some(worst_probe)});
    Ok(out)
}

fn prop1_verify(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let group = cfg.group_spec(2, 2)?;
    let tol = *cfg.tol.get_or_insert(1e-9);
    let (families, inputs) = if cfg.table.is_some() {
        let f = load_family(cfg)?;
        let doc = emit_graded_family(&f);
        (vec![f], json!({"group": group.to_string(), "table": doc}))
    } else {
        let trials = *cfg.trials.get_or_insert(50);
        let support = *cfg.support.get_or_insert(12);
        let channels = *cfg.channels.get_or_insert(2);
        let families: Vec<_> = (0..trials as u64)
            .map(|i| {
                let s = derive_seed(cfg.seed, i);
                let size = 1 + seeded(s).random_range(0..support.max(1));
                random_graded_family(&group, channels, size, s)
            })
            .collect::<Result<_>>()?;
        let docs: Vec<_> = families.iter().map(emit_graded_family).collect();
        (families, json!({"group": group.to_string(), "tables": docs}))
    };
    let restarts = SignStrategy::RandomRestarts { restarts: 64, seed: cfg.seed };
    let per: Vec<Value> = families
        .iter()
        .map(|fam| {
            let formula = adapted_multiplier_norm(fam, &group)?.value;
            let builder = DualFieldBuilder::new(fam, &group)?;
            let opt = builder.search(SignStrategy::OptimalCharacter);
            let exhaustive = builder.search(SignStrategy::ExhaustiveRealSigns);
            let random = builder.search(restarts);
            Ok(json!({
                "support": fam.support_size(),
                "formula": formula,
                "optimal_character": opt.value,
                "exhaustive_real_signs": exhaustive.value,
                "exhaustive_strategy": to_value(&exhaustive.strategy),
                "random_restarts": random.value,
            }))
        })
        .collect::<Result<_>>()?;
    let mut out = Outcome { inputs, ..Default::default() };
    let (mut dev_opt, mut dev_exh, mut excess) = (0.0f64, 0.0f64, 0.0f64);
    for (i, r) in per.iter().enumerate() {
        let get = |k: &str| r[k].as_f64().unwrap_or(f64::NAN);
        let formula = get("formula");
        let scale = formula.max(1.0);
        dev_opt = dev_opt.max((get("optimal_character") - formula).abs() / scale);
        if r["support"].as_u64().unwrap_or(u64::MAX) <= 12 {
            dev_exh = dev_exh.max((get("exhaustive_real_signs") - formula).abs() / scale);
        }
        for k in ["optimal_character", "exhaustive_real_signs", "random_restarts"] {
            excess = excess.max((get(k) - formula) / scale);
        }
        let item = format!("instance{i}");
        for k in ["formula", "optimal_character", "exhaustive_real_signs", "random_restarts"] {
            out.rows.push(TableRow::new(&item, k, get(k)));
        }
    }
    out.assertions.push(Assertion::at_most("optimal-character deviation", dev_opt, tol));
    out.assertions.push(Assertion::at_most("exhaustive real-sign deviation (support <= 12)", dev_exh, tol));
    out.assertions.push(Assertion::at_most("sign search above formula", excess, tol));
    out.results = json!({"instances": per, "max_deviation": dev_opt.max(dev_exh)});
    Ok(out)
}

/// Cap on the constrained / unconstrained Davis–Garsia ratio.
pub const MULLER_CAP: f64 = 20.0;

fn dg_solve(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let group = cfg.group_spec(8, 3)?;
    let trials = *cfg.trials.get_or_insert(50);
    let tol = *cfg.tol.get_or_insert(1e-6);
    let budget = *cfg.budget.get_or_insert(2000);
    let torus = group.all_torus();
    if torus {
        cfg.degree.get_or_insert(2);
    }
    let degree = cfg.degree.unwrap_or(0);
    let seed = cfg.seed;
    let per: Vec<Value> = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Result<Value> {
            let s = derive_seed(seed, i);
            let f = if torus {
                sample_hardy_martingale(&group, degree, s)?
            } else {
                let mut rng = seeded(s);
                let mut v: Vec<Complex64> = (0..group.size()).map(|_| complex_gaussian(&mut rng)).collect();
                let mean = v.iter().sum::<Complex64>() / v.len() as f64;
                v.iter_mut().for_each(|z| *z -= mean);
                GroupFunction::scalar(group.clone(), v)?
            };
            let zero = GroupFunction::zeros(group.clone(), 1);
            let pure = {
                let (a, b) = davis_garsia_objective(&f, &zero)?;
                let (c, d) = davis_garsia_objective(&zero, &f)?;
                (a + b).min(c + d)
            };
            let unc = davis_garsia_solve(&f, &DavisGarsiaOptions::new(false, tol, budget))?;
            let residual = unc.g.add(&unc.h)?.max_abs_diff(&f);
            let mut row = json!({
                "seed": s,
                "unconstrained": unc.objective,
                "pure_choice_bound": pure,
                "residual": residual,
                "iterations": unc.iterations,
                "status": to_value(&unc.status),
                "square_function": square_function_norm(&f),
            });
            if group.depth() == 1 {
                row["closed_form"] = json!(f.l1_norm());
            }
            if torus && is_hardy_last(&f)? {
                let (con, unc_warm) = muller_pair(&f, tol, budget)?;
                row["constrained"] = json!(con);
                row["unconstrained_warm"] = json!(unc_warm);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut out = Outcome { inputs: json!({"group": group.to_string()}), ..Default::default() };
    let (mut residual, mut over_pure, mut closed, mut gap, mut ratio_max, mut ratio_min) =
        (0.0f64, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY, 0.0f64, f64::INFINITY);
    for (i, r) in per.iter().enumerate() {
        let get = |k: &str| r[k].as_f64();
        let item = format!("sample{i}");
        let unc = get("unconstrained").unwrap_or(f64::NAN);
        residual = residual.max(get("residual").unwrap_or(f64::NAN));
        over_pure = over_pure.max(unc - get("pure_choice_bound").unwrap_or(f64::NAN));
        out.rows.push(TableRow::new(&item, "unconstrained", unc));
        if let Some(c) = get("closed_form") {
            closed = closed.max((unc - c).abs() / c.max(f64::MIN_POSITIVE));
            out.rows.push(TableRow::new(&item, "closed_form", c));
        }
        if let (Some(con), Some(warm)) = (get("constrained"), get("unconstrained_warm")) {
            gap = gap.max(warm - con);
            let ratio = con / warm;
            ratio_max = ratio_max.max(ratio);
            ratio_min = ratio_min.min(ratio);
            out.rows.push(TableRow::new(&item, "constrained", con));
            out.rows.push(TableRow::new(&item, "ratio", ratio));
        }
    }
    out.assertions.push(Assertion::at_most("feasibility residual", residual, 1e-9));
    out.assertions.push(Assertion::at_most("objective above pure choices", over_pure, 1e-12));
    if group.depth() == 1 {
        out.assertions.push(Assertion::at_most("one-step closed-form deviation", closed, 1e-3));
    }
    if ratio_min.is_finite() {
        out.assertions.push(Assertion::at_most("unconstrained above constrained", gap, 1e-9));
        out.assertions.push(Assertion::at_most("constrained / unconstrained", ratio_max, MULLER_CAP));
    }
    out.results = json!({
        "samples": per,
        "bracket": ratio_min.is_finite().then(|| json!({"min": ratio_min, "max": ratio_max})),
    });
    Ok(out)
}

fn default_cap(e: Equivalence) -> (f64, Option<f64>) {
    match e {
        Equivalence::SquareFunctionVsL1 | Equivalence::DavisGarsiaVsSquareFunction => (1.0 / 20.0, Some(20.0)),
        Equivalence::MullerConstrainedVsUnconstrained => (1.0 - 1e-9, Some(MULLER_CAP)),
        Equivalence::WeiszVsExactDual | Equivalence::LepingleProjection => (1.0 / 10.0, Some(10.0)),
        Equivalence::CorollarySecondSummand => (1.0, None),
    }
}

fn equiv_report(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let tag = cfg
        .equivalence
        .clone()
        .ok_or_else(|| Error::InvalidArgument("equiv-report needs --equivalence".into()))?;
    let which: Equivalence = tag.parse()?;
    let depth = *cfg.depth.get_or_insert(3);
    let trials = *cfg.trials.get_or_insert(100);
    let groups: Vec<GroupSpec> = (1..=depth)
        .map(|m| {
            let mut c = cfg.clone();
            c.depth = Some(m);
            c.group_spec(8, m)
        })
        .collect::<Result<_>>()?;
    let mut ecfg = EquivalenceConfig::new(groups);
    ecfg.degree = *cfg.degree.get_or_insert(2);
    ecfg.channels = *cfg.channels.get_or_insert(1);
    ecfg.support = *cfg.support.get_or_insert(4);
    if let Some(t) = cfg.tol {
        ecfg.dg_tolerance = t;
    }
    if let Some(b) = cfg.budget {
        ecfg.dg_budget = b;
        ecfg.dual_budget = b;
    }
    let report = equivalence_report(which, &ecfg, trials, cfg.seed)?;
    let (lower, upper) = match cfg.cap {
        Some(c) => (1.0 / c, Some(c)),
        None => default_cap(which),
    };
    let mut out = Outcome {
        inputs: json!({"groups": ecfg.groups.iter().map(|g| g.to_string()).collect::<Vec<_>>()}),
        ..Default::default()
    };
    out.rows = report.rows.iter().map(|r| TableRow::new(format!("trial{}", r.trial), "ratio", r.ratio)).collect();
    out.assertions.push(Assertion::at_least("min ratio", report.min_ratio, lower));
    if let Some(u) = upper {
        out.assertions.push(Assertion::at_most("max ratio", report.max_ratio, u));
    }
    out.results = to_value(&report);
    Ok(out)
}

/// Relative change allowed between the `T` and `2T` truncations of `1/j`.
pub const TRUNCATION_TOL: f64 = 0.01;
/// Cap on the sampled ratio as a multiple of the F-norm.
pub const HARDY_INEQ_FACTOR: f64 = 10.0;

pub fn harmonic_weights(cutoff: usize) -> Vec<f64> {
    (0..=cutoff).map(|j| if j == 0 { 0.0 } else { 1.0 / j as f64 }).collect()
}

fn hardy_ineq(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    cfg.depth.get_or_insert(1);
    let group = cfg.group_spec(256, 1)?;
    if group.depth() != 1 {
        return Err(Error::InvalidArgument("hardy-ineq runs on a single torus (--depth 1)".into()));
    }
    let cutoff = *cfg.support.get_or_insert(64);
    let trials = *cfg.trials.get_or_insert(200);
    let degree = *cfg.degree.get_or_insert(group.order(1) / 2);
    let truncation = 1usize << 12;
    let short = fefferman_norm(&harmonic_weights(truncation))?;
    let long = fefferman_norm(&harmonic_weights(2 * truncation))?;
    let rel = (long.value - short.value).abs() / long.value;
    let lambda = harmonic_weights(cutoff);
    let f = fefferman_norm(&lambda)?;
    let search = primal_ratio_search(RatioProblem::HardyTorus { lambda: &lambda, group: &group }, &SamplerConfig { degree }, trials, cfg.seed)?;
    let mut out = Outcome { inputs: json!({"group": group.to_string(), "cutoff": cutoff}), ..Default::default() };
    out.rows = vec![
        TableRow::new(format!("truncation{truncation}"), "fnorm", short.value),
        TableRow::new(format!("truncation{}", 2 * truncation), "fnorm", long.value),
        TableRow::new(format!("cutoff{cutoff}"), "fnorm", f.value),
        TableRow::new(format!("cutoff{cutoff}"), "max_ratio", search.max_ratio),
    ];
    out.assertions.push(Assertion::at_most("truncation relative change", rel, TRUNCATION_TOL));
    out.assertions.push(Assertion::at_most("max ratio / fnorm", search.max_ratio / f.value, HARDY_INEQ_FACTOR));
    out.assertions.push(Assertion::at_most("max ratio above elementary bound", search.max_ratio - search.proven_upper_bound, 1e-9));
    out.results = json!({
        "truncations": {"short": to_value(&short), "long": to_value(&long), "relative_change": rel},
        "fnorm": to_value(&f),
        "search": to_value(&search),
    });
    Ok(out)
}
