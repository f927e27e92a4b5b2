//! Subcommand dispatch. Every command yields JSON outputs, one CSV table and
//! the sets it produced; nothing here touches the output directory.

use std::path::Path;
use std::time::Instant;

use apxgrp_core::covering::{self, CoverResult};
use apxgrp_core::dimcmp::{self, DimReport};
use apxgrp_core::families::{self, FamilySpec};
use apxgrp_core::probes::{self, PerfectnessOptions};
use apxgrp_core::setalg::{self, GrowthRatio, GrowthStatistic};
use apxgrp_core::tower::{self, SeedFamily, TowerReport, VerifyOptions};
use apxgrp_core::{Error, FinSet, GroupCtx};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::config::{BackendBlock, Command, InputSpec, RunConfig, SeedFamilyName};
use crate::error::{CliError, CliResult};
use crate::report::{RunReport, SetDigest, Table};

/// Products in a corpus growth summary stop past this many pairs; later columns stay empty.
pub const CORPUS_PAIR_BUDGET: u64 = 100_000_000;

pub struct RunOutput {
    pub report: RunReport,
    /// Sets written as `.finset` files next to the report.
    pub sets: Vec<(String, FinSet)>,
}

struct Loaded {
    set: FinSet,
    label: String,
}

fn backend_ctx(backend: Option<&BackendBlock>) -> CliResult<Option<GroupCtx>> {
    backend
        .map(|b| GroupCtx::from_descriptor(&b.group).map_err(|e| CliError::Config(format!("backend: {e}"))))
        .transpose()
}

fn load(spec: &InputSpec, backend: Option<&GroupCtx>, cache: &Cache) -> CliResult<Loaded> {
    if let Some(f) = &spec.family {
        let set = cache.family(f)?;
        return Ok(Loaded {
            set,
            label: f.to_string(),
        });
    }
    if let Some(path) = &spec.file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let set = FinSet::from_text(&text)?;
        if let Some(ctx) = backend {
            if set.ctx() != ctx {
                return Err(CliError::Config(format!(
                    "{}: set is over `{}`, backend block says `{}`",
                    path.display(),
                    set.ctx().descriptor(),
                    ctx.descriptor()
                )));
            }
        }
        let name = Path::new(path)
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(Loaded {
            set,
            label: format!("file:{name}"),
        });
    }
    let lits = spec.elements.as_ref().expect("validated input source");
    let ctx = backend.expect("validated backend");
    let set = FinSet::parse(ctx, lits.iter().map(String::as_str))?;
    Ok(Loaded {
        label: format!("elements[{}]", lits.len()),
        set,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// The serde name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> String {
    match to_value(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn float(x: f64) -> String {
    format!("{x:.6}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn check_cover(c: &CoverResult) -> CliResult<()> {
    let ctx = c.tile.ctx();
    if let Some(e) = c.uncovered()? {
        return Err(Error::Invariant(format!("cover misses {}", ctx.format(&e))).into());
    }
    if let Some(b) = c.certified_bound {
        if Ratio::from_integer(c.count() as u64) > b {
            return Err(Error::Invariant(format!("{} translates exceed the bound {}", c.count(), ratio(b))).into());
        }
    }
    Ok(())
}

fn cover_json(c: &CoverResult) -> Value {
    json!({
        "side": c.side,
        "target_size": c.target.len(),
        "tile_size": c.tile.len(),
        "count": c.count(),
        "certified_bound": c.certified_bound,
        "translates": c.translate_literals(),
    })
}

fn pass_counts(r: &TowerReport) -> Vec<String> {
    r.pass_counts().iter().map(|(k, t)| format!("{k}/{t}")).collect()
}

const TOWER_COLUMNS: [&str; 15] = [
    "backend",
    "family",
    "size",
    "n",
    "e",
    "c",
    "verified_depth",
    "levels",
    "p1",
    "p2",
    "p3",
    "p4",
    "p5",
    "p6",
    "p7",
];

fn tower_row(prefix: &[String], r: &TowerReport) -> Vec<String> {
    let mut row = prefix.to_vec();
    row.extend([
        r.n.to_string(),
        opt(r.e()),
        r.c.to_string(),
        r.verified_depth.to_string(),
        r.level_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
    ]);
    row.extend(pass_counts(r));
    row
}

fn dim_table(prefix: &[String], r: &DimReport) -> Table {
    let mut t = Table::new(&[
        "backend",
        "family",
        "size",
        "variety",
        "dim",
        "count",
        "ratio",
        "bound",
        "slack",
        "pass",
        "unbalanced",
    ]);
    for row in &r.rows {
        let mut v = prefix.to_vec();
        v.extend([
            row.variety.to_string(),
            row.dim.to_string(),
            row.count.to_string(),
            opt(row.ratio.map(float)),
            float(row.bound),
            opt(row.slack.map(float)),
            row.pass.to_string(),
            row.unbalanced.to_string(),
        ]);
        t.push(v);
    }
    t
}

/// `|X^k|` for `k = 2..=powers`, stopping once the next product would pass the pair budget.
/// With `1 ∈ X` only the newest shell `X^k \ X^(k-1)` is multiplied.
fn power_sizes(x: &FinSet, powers: usize) -> CliResult<Vec<Option<usize>>> {
    let with_one = x.contains_identity();
    let mut out = Vec::with_capacity(powers - 1);
    let mut acc = x.clone();
    let mut shell = x.clone();
    for _ in 2..=powers {
        let left = if with_one { &shell } else { &acc };
        if (left.len() as u64).saturating_mul(x.len() as u64) > CORPUS_PAIR_BUDGET {
            out.resize(powers - 1, None);
            break;
        }
        let next = if with_one && shell.is_empty() {
            acc.clone()
        } else if with_one {
            acc.union(&setalg::product(&shell, x)?)?
        } else {
            setalg::product(&acc, x)?
        };
        if with_one {
            shell = next.difference(&acc)?;
        }
        acc = next;
        out.push(Some(acc.len()));
    }
    Ok(out)
}

fn corpus_row(spec: &FamilySpec, powers: usize, cache: &Cache) -> CliResult<(Vec<String>, Value)> {
    let x = cache.family(spec)?;
    let symmetric = x.is_symmetric()?;
    let sizes = power_sizes(&x, powers)?;
    let growth = |statistic, numerator: usize, cube| GrowthRatio {
        statistic,
        size: x.len(),
        numerator,
        ratio: Ratio::new(numerator as u64, x.len() as u64),
        cube,
    };
    let doubling = sizes[0].map(|n| growth(GrowthStatistic::Doubling, n, None));
    // For symmetric X, X X^-1 X is the cube.
    let tripling = match sizes.get(1).copied().flatten() {
        Some(n) if symmetric => Some(growth(GrowthStatistic::Tripling, n, Some(n))),
        _ if (x.len() as u64).pow(2) <= CORPUS_PAIR_BUDGET => Some(setalg::tripling(&x)?),
        _ => None,
    };
    let mut row = vec![
        x.ctx().descriptor(),
        spec.to_string(),
        x.len().to_string(),
        symmetric.to_string(),
    ];
    row.extend(sizes.iter().map(|s| opt(*s)));
    row.push(opt(doubling.as_ref().map(|g| float(g.as_f64()))));
    row.push(opt(tripling.as_ref().map(|g| float(g.as_f64()))));
    let value = json!({
        "spec": spec,
        "label": spec.to_string(),
        "backend": x.ctx().descriptor(),
        "size": x.len(),
        "symmetric": symmetric,
        "powers": sizes,
        "doubling": doubling,
        "tripling": tripling,
        "digest": SetDigest::of(&spec.to_string(), &x),
    });
    Ok((row, value))
}

struct Computed {
    outputs: Value,
    table: Table,
    sets: Vec<(String, FinSet)>,
}

fn computed(outputs: Value, table: Table) -> Computed {
    Computed {
        outputs,
        table,
        sets: Vec::new(),
    }
}

/// Runs a validated config. The report's checksum is filled in; nothing is written.
pub fn run(cfg: &RunConfig, cache: &Cache) -> CliResult<RunOutput> {
    let start = Instant::now();
    let backend = backend_ctx(cfg.backend.as_ref())?;
    let input = cfg
        .input
        .as_ref()
        .map(|i| load(i, backend.as_ref(), cache))
        .transpose()?;
    let (family, input_digest) = match &input {
        Some(l) => (l.label.clone(), Some(SetDigest::of("input", &l.set))),
        None => (String::new(), None),
    };
    let prefix = input
        .as_ref()
        .map(|l| vec![l.set.ctx().descriptor(), l.label.clone(), l.set.len().to_string()])
        .unwrap_or_default();
    let x = || &input.as_ref().expect("validated input").set;

    let c = match &cfg.command {
        Command::Tripling {} => {
            let x = x();
            let t = setalg::tripling(x)?;
            let d = setalg::growth_ratio(x, GrowthStatistic::Doubling)?;
            let mut table = Table::new(&["backend", "family", "size", "xx", "xxinvx", "doubling", "tripling"]);
            let mut row = prefix.clone();
            row.extend([
                d.numerator.to_string(),
                t.numerator.to_string(),
                float(d.as_f64()),
                float(t.as_f64()),
            ]);
            table.push(row);
            computed(json!({ "doubling": d, "tripling": t }), table)
        }
        Command::Cover {
            tile,
            side,
            ruzsa,
            budget,
        } => {
            let z = load(tile, backend.as_ref(), cache)?;
            let result = if *ruzsa {
                covering::ruzsa_cover_on(x(), &z.set, *side)?
            } else {
                covering::greedy_cover(x(), &z.set, *side, *budget)?.ok_or(Error::BudgetExceeded {
                    what: "cover translates",
                    limit: budget.unwrap_or(usize::MAX) as u64,
                })?
            };
            check_cover(&result)?;
            let mut table = Table::new(&[
                "backend",
                "family",
                "size",
                "tile",
                "tile_size",
                "side",
                "method",
                "translates",
                "certified_bound",
            ]);
            let mut row = prefix.clone();
            row.extend([
                z.label.clone(),
                z.set.len().to_string(),
                tag(side),
                if *ruzsa { "ruzsa" } else { "greedy" }.to_string(),
                result.count().to_string(),
                opt(result.certified_bound.map(ratio)),
            ]);
            table.push(row);
            let mut out = computed(json!({ "tile": z.label, "cover": cover_json(&result) }), table);
            out.sets.push(("tile".into(), z.set));
            out
        }
        Command::Commens { other, budget } => {
            let b = load(other, backend.as_ref(), cache)?;
            let (ab, ba) = covering::commensurability(x(), &b.set, *budget)?;
            let e = ab.zip(ba).map(|(p, q)| p.max(q));
            let mut table = Table::new(&[
                "backend",
                "family",
                "size",
                "other",
                "other_size",
                "a_by_b",
                "b_by_a",
                "e",
            ]);
            let mut row = prefix.clone();
            row.extend([b.label.clone(), b.set.len().to_string(), opt(ab), opt(ba), opt(e)]);
            table.push(row);
            let mut out = computed(
                json!({ "other": b.label, "budget": budget, "a_by_b": ab, "b_by_a": ba, "e": e }),
                table,
            );
            out.sets.push(("other".into(), b.set));
            out
        }
        Command::ApproxK {} => {
            let k = covering::approx_constant(x())?;
            let mut table = Table::new(&["backend", "family", "size", "k_upper", "k_lower"]);
            let mut row = prefix.clone();
            row.extend([k.k_upper.to_string(), ratio(k.k_lower)]);
            table.push(row);
            computed(to_value(&k), table)
        }
        Command::Tower { levels, pair_budget } => {
            let ls = tower::build_tower(x(), *levels)?;
            let opts = VerifyOptions {
                seed: cfg.seed,
                pair_budget: *pair_budget,
                ..VerifyOptions::default()
            };
            let r = tower::verify_tower_with(&ls, &opts)?;
            let mut table = Table::new(&TOWER_COLUMNS);
            table.push(tower_row(&prefix, &r));
            computed(to_value(&r), table)
        }
        Command::SeedSearch {
            levels,
            family,
            pair_budget,
        } => {
            let fam = match family {
                SeedFamilyName::Default => SeedFamily::Default,
                SeedFamilyName::DerivedSquare => SeedFamily::DerivedSquare,
                SeedFamilyName::Dilates => SeedFamily::Dilates,
                SeedFamilyName::CayleyBalls => SeedFamily::CayleyBalls,
            };
            let opts = VerifyOptions {
                seed: cfg.seed,
                pair_budget: *pair_budget,
                ..VerifyOptions::default()
            };
            let r = tower::seed_search(x(), &fam, *levels, &opts)?;
            let mut header = TOWER_COLUMNS.to_vec();
            header.insert(3, "seed");
            let mut table = Table::new(&header);
            let mut row = tower_row(&prefix, &r.report);
            row.insert(3, r.label.clone());
            table.push(row);
            let mut out = computed(to_value(&r), table);
            out.sets.push(("seed".into(), r.x1));
            out
        }
        Command::Closure { max_size } => {
            let r = probes::group_closure(x(), *max_size)?;
            let mut table = Table::new(&["backend", "family", "size", "closure_size", "exceeded", "steps"]);
            let mut row = prefix.clone();
            row.extend([r.size.to_string(), r.exceeded.to_string(), r.steps.to_string()]);
            table.push(row);
            let mut out = computed(to_value(&probes::ProbeReport::Closure(r.clone())), table);
            if let Some(s) = r.closure {
                out.sets.push(("closure".into(), s));
            }
            out
        }
        Command::NearSubgroup {} => {
            let r = probes::near_subgroup_probe(x())?;
            let mut table = Table::new(&[
                "backend",
                "family",
                "size",
                "verdict",
                "s_size",
                "cosets",
                "defect",
                "normalized_by_x",
            ]);
            let mut row = prefix.clone();
            row.extend([
                tag(&r.verdict),
                r.s_size.to_string(),
                opt(r.cosets),
                opt(r.defect),
                r.normalized_by_x.to_string(),
            ]);
            table.push(row);
            let s = r.s.clone();
            let mut out = computed(to_value(&probes::ProbeReport::NearSubgroup(r)), table);
            out.sets.push(("derived-square".into(), s));
            out
        }
        Command::Perfectness { l, m, samples, variant } => {
            let opts = PerfectnessOptions {
                variant: *variant,
                ..PerfectnessOptions::default()
            };
            let r = probes::perfectness_stat_with(x(), *l, *m, *samples, cfg.seed, &opts)?;
            let mut table = Table::new(&[
                "backend",
                "family",
                "size",
                "l",
                "m",
                "variant",
                "exhaustive",
                "trials",
                "successes",
                "p_hat",
                "radius",
            ]);
            let mut row = prefix.clone();
            row.extend([
                l.to_string(),
                m.to_string(),
                tag(variant),
                r.exhaustive.to_string(),
                r.trials.to_string(),
                r.successes.to_string(),
                float(r.p_hat),
                float(r.radius),
            ]);
            table.push(row);
            computed(to_value(&probes::ProbeReport::Perfectness(r)), table)
        }
        Command::WordDepth { a, n_max, cap } => {
            let ctx = x().ctx();
            let a_list = a.iter().map(|s| ctx.parse(s)).collect::<Result<Vec<_>, _>>()?;
            let r = probes::word_depth(x(), &a_list, *n_max, *cap)?;
            let mut table = Table::new(&["backend", "family", "size", "a_count", "depth", "exact_b_search"]);
            let mut row = prefix.clone();
            row.extend([r.a_count.to_string(), opt(r.depth), r.exact_b_search.to_string()]);
            table.push(row);
            computed(to_value(&probes::ProbeReport::WordDepth(r)), table)
        }
        Command::Freiman { e_budget } => {
            let r = probes::freiman_exponent_probe(x(), *e_budget)?;
            let mut table = Table::new(&[
                "backend",
                "family",
                "size",
                "exponent",
                "verdict",
                "subgroup_size",
                "x_by_s",
                "s_by_x",
                "e",
            ]);
            let mut row = prefix.clone();
            row.extend([
                r.exponent.to_string(),
                tag(&r.verdict),
                opt(r.subgroup_size),
                opt(r.x_by_s),
                opt(r.s_by_x),
                opt(r.e),
            ]);
            table.push(row);
            let s = r.subgroup.clone();
            let mut out = computed(to_value(&probes::ProbeReport::Freiman(r)), table);
            if let Some(s) = s {
                out.sets.push(("subgroup".into(), s));
            }
            out
        }
        Command::Dimcmp {
            epsilon,
            varieties,
            full,
        } => {
            let (r, prefix) = if *full {
                let ctx = backend.as_ref().expect("validated backend");
                let r = dimcmp::lp_report_full(ctx, varieties, *epsilon)?;
                let prefix = vec![ctx.descriptor(), "full-group".to_string(), r.group_size.to_string()];
                (r, prefix)
            } else {
                (dimcmp::lp_report(x(), varieties, *epsilon)?, prefix.clone())
            };
            let table = dim_table(&prefix, &r);
            computed(to_value(&r), table)
        }
        Command::Dichotomy { max_p } => {
            let r = dimcmp::linear_dichotomy_probe(x(), *max_p)?;
            let mut table = Table::new(&[
                "backend",
                "family",
                "size",
                "p",
                "verdict",
                "closure_size",
                "points",
                "split",
                "cosets",
                "square_size",
            ]);
            let mut row = prefix.clone();
            row.extend([
                r.p.to_string(),
                tag(&r.verdict),
                r.closure_size.to_string(),
                r.points.join(" "),
                opt(r.split),
                opt(r.cosets),
                opt(r.saturation.map(|s| s.0)),
            ]);
            table.push(row);
            computed(to_value(&probes::ProbeReport::Dichotomy(r)), table)
        }
        Command::Gen {} => {
            let x = x();
            let d = SetDigest::of("set", x);
            let mut table = Table::new(&["backend", "family", "size", "sha256"]);
            let mut row = prefix.clone();
            row.push(d.sha256.clone());
            table.push(row);
            let mut out = computed(json!({ "set": d }), table);
            out.sets.push(("set".into(), x.clone()));
            out
        }
        Command::CorpusRun { corpus, powers } => {
            let specs = families::corpus(corpus)?;
            let rows = specs
                .par_iter()
                .map(|s| corpus_row(s, *powers, cache))
                .collect::<CliResult<Vec<_>>>()?;
            let mut header: Vec<String> = ["backend", "family", "size", "symmetric"].map(String::from).to_vec();
            header.extend((2..=*powers).map(|k| format!("x{k}")));
            header.extend(["doubling".to_string(), "tripling".to_string()]);
            let mut table = Table {
                header,
                rows: Vec::new(),
            };
            let mut entries = Vec::new();
            for (row, value) in rows {
                table.push(row);
                entries.push(value);
            }
            computed(json!({ "corpus": corpus, "powers": powers, "entries": entries }), table)
        }
    };

    let mut report = RunReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_ms: 0,
        config: cfg.clone(),
        command: cfg.command.name().to_string(),
        input: input_digest,
        family,
        outputs: c.outputs,
        table: c.table,
        sets: c.sets.iter().map(|(n, s)| SetDigest::of(n, s)).collect(),
        checksum: String::new(),
    };
    report.checksum = report.compute_checksum()?;
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(RunOutput { report, sets: c.sets })
}

/// Runs a config and writes its artifacts to the output directory.
pub fn execute(cfg: &RunConfig) -> CliResult<RunOutput> {
    let cache = Cache::from_output(&cfg.output);
    let out = run(cfg, &cache)?;
    out.report.write(&cfg.output.dir, &cfg.output.formats, &out.sets)?;
    Ok(out)
}
