//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use catsp_core::field::{load_field, save_field};
use catsp_core::instance::{load_histories, load_instance, load_route, save_histories, save_instance, save_route, RouteFile};
use catsp_core::pareto::{pareto_solve, HbsConfig};
use catsp_core::scoring::{score_ids, score_with, ScoringRule};
use catsp_core::{
    build_field, generate_synthetic, solve, validate_solution, HistoricalRoute, Instance, Mode, RouteContext,
    SearchConfig, VectorField, Weights,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{BenchArgs, Cli, Command, GenArgs, HbsArgs, HistorySource, MineArgs, ParetoArgs, ScoreArgs, SearchArgs, SolveArgs};
use crate::output::{front_svg, write_csv, write_front_csv, write_json, Manifest};
use crate::stats::{SizeHistogram, Summary, GAP_MINUTES};

/// How a run ended when no usage or I/O error stopped it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some instances failed; the others were written.
    Partial { failed: usize },
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Partial { .. } => 1,
        }
    }

    fn from_failures(failed: usize) -> Self {
        if failed == 0 {
            Outcome::Success
        } else {
            Outcome::Partial { failed }
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a),
        Command::Mine(a) => cmd_mine(cli, a),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Pareto(a) => cmd_pareto(cli, a),
        Command::Score(a) => cmd_score(a),
        Command::Bench(a) => cmd_bench(cli, a),
    }
}

// ---------------------------------------------------------------- inputs

/// Expands glob patterns; literal paths must exist. Sorted, no duplicates.
pub fn expand(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in patterns {
        if p.contains(['*', '?', '[']) {
            for entry in glob::glob(p).with_context(|| format!("bad pattern `{p}`"))? {
                out.push(entry?);
            }
        } else {
            let path = PathBuf::from(p);
            if !path.exists() {
                bail!("{} does not exist", path.display());
            }
            out.push(path);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn read_histories(patterns: &[String]) -> Result<Vec<HistoricalRoute>> {
    let mut all = Vec::new();
    for path in expand(patterns)? {
        all.extend(load_histories(&path).with_context(|| format!("reading {}", path.display()))?);
    }
    Ok(all)
}

fn history_field(src: &HistorySource) -> Result<Option<VectorField>> {
    if let Some(path) = &src.field {
        return Ok(Some(load_field(path).with_context(|| format!("reading {}", path.display()))?));
    }
    if src.histories.is_empty() {
        return Ok(None);
    }
    let routes = read_histories(&src.histories)?;
    if routes.is_empty() {
        bail!("history files hold no routes");
    }
    Ok(Some(build_field(
        &routes,
        catsp_core::field::DEFAULT_BETA,
        catsp_core::field::DEFAULT_ALPHA,
    )))
}

/// `X.route.json` next to `X.instance.json`, else `X.route.json` next to `X.json`.
pub fn route_path_for(instance: &Path) -> PathBuf {
    let name = instance.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let stem = name
        .strip_suffix(".instance.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(name);
    instance.with_file_name(format!("{stem}.route.json"))
}

/// One instance with its held-out executed route, if any.
pub struct Case {
    pub name: String,
    pub instance: Instance,
    pub executed: Option<Vec<String>>,
}

fn load_case(path: &Path) -> Result<Case> {
    let instance = load_instance(path).with_context(|| format!("reading {}", path.display()))?;
    let rp = route_path_for(path);
    let executed = if rp.exists() {
        Some(load_route(&rp).with_context(|| format!("reading {}", rp.display()))?.order)
    } else {
        None
    };
    Ok(Case {
        name: instance.id().to_owned(),
        instance,
        executed,
    })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '-' })
        .collect()
}

fn needs_history(modes: &[Mode]) -> bool {
    modes.contains(&Mode::Dm)
}

// ---------------------------------------------------------------- gen

fn cmd_gen(cli: &Cli, a: &GenArgs) -> Result<Outcome> {
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let seeds: Vec<u64> = (a.seed..a.seed + a.count).collect();
    for &seed in &seeds {
        let case = generate_synthetic(seed, a.zones, a.stops_per_zone, a.policy)?;
        write_case(&a.out, &case)?;
    }
    write_json(&a.out.join("manifest.json"), &Manifest::new(cli, seeds, vec![]))?;
    Ok(Outcome::Success)
}

fn write_case(dir: &Path, case: &catsp_core::SyntheticCase) -> Result<PathBuf> {
    let id = case.instance.id();
    let inst_path = dir.join(format!("{id}.instance.json"));
    save_instance(&case.instance, &inst_path)?;
    save_histories(&case.histories, dir.join(format!("{id}.histories.json")))?;
    save_route(
        &RouteFile {
            instance_id: Some(id.to_owned()),
            order: case.executed.clone(),
        },
        dir.join(format!("{id}.route.json")),
    )?;
    Ok(inst_path)
}

// ---------------------------------------------------------------- mine

fn cmd_mine(cli: &Cli, a: &MineArgs) -> Result<Outcome> {
    if !(a.beta > 0.0) || !(a.alpha > 0.0) {
        bail!("beta and alpha must be positive");
    }
    let paths = expand(&a.histories)?;
    let mut routes = Vec::new();
    for p in &paths {
        routes.extend(load_histories(p).with_context(|| format!("reading {}", p.display()))?);
    }
    if routes.is_empty() {
        bail!("no historical routes in the given files");
    }
    let field = build_field(&routes, a.beta, a.alpha);
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    save_field(&field, &a.out)?;
    let inputs = paths.iter().map(|p| p.display().to_string()).collect();
    write_json(&a.out.with_extension("manifest.json"), &Manifest::new(cli, vec![], inputs))?;
    println!("{} step vectors from {} routes", field.len(), routes.len());
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- solve

/// One solved instance under one mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveRow {
    pub instance: String,
    pub mode: String,
    pub seed: u64,
    pub score: Option<f64>,
    pub sd: Option<f64>,
    pub erp_norm: Option<f64>,
    pub erp_e: Option<usize>,
    pub f1_seconds: f64,
    pub tau: f64,
    pub eta: f64,
    pub phi: f64,
    pub lam: f64,
    pub wall_ms: Option<f64>,
}

/// Search settings shared by every instance of a run.
#[derive(Clone, Copy, Debug)]
pub struct SearchOpts {
    pub seed: u64,
    pub iterations: usize,
    pub weights: Option<Weights>,
    pub timing: bool,
}

impl From<&SearchArgs> for SearchOpts {
    fn from(a: &SearchArgs) -> Self {
        SearchOpts {
            seed: a.seed,
            iterations: a.iters,
            weights: a.weights,
            timing: a.timing,
        }
    }
}

impl SearchOpts {
    pub fn config(&self, mode: Mode) -> SearchConfig {
        let cfg = SearchConfig::new(mode).with_seed(self.seed).with_iterations(self.iterations);
        match self.weights {
            Some(w) => cfg.with_weights(w),
            None => cfg,
        }
    }
}

/// Solves `case` under every mode and scores against its executed route.
pub fn solve_case(
    case: &Case,
    field: Option<&VectorField>,
    modes: &[Mode],
    opts: &SearchOpts,
    rule: ScoringRule,
) -> Result<(Vec<SolveRow>, Vec<(Mode, Vec<String>)>)> {
    let ctx = RouteContext::prepare(&case.instance, field)?;
    let executed = match &case.executed {
        Some(ids) => Some(case.instance.nodes_of(ids)?),
        None => None,
    };
    let mut rows = Vec::with_capacity(modes.len());
    let mut routes = Vec::with_capacity(modes.len());
    for &mode in modes {
        let start = Instant::now();
        let sol = solve(&ctx, &opts.config(mode))?;
        let wall = start.elapsed().as_secs_f64() * 1e3;
        if !validate_solution(ctx.instance(), &sol) {
            bail!("solver produced an invalid tour for mode {mode}");
        }
        let report = match &executed {
            Some(b) => Some(score_with(&sol.order, b, case.instance.travel_times(), rule)?),
            None => None,
        };
        rows.push(SolveRow {
            instance: case.name.clone(),
            mode: mode.to_string(),
            seed: opts.seed,
            score: report.map(|r| r.score),
            sd: report.map(|r| r.sd),
            erp_norm: report.map(|r| r.erp_norm),
            erp_e: report.map(|r| r.erp_e),
            f1_seconds: sol.total_time,
            tau: sol.components.tau,
            eta: sol.components.eta,
            phi: sol.components.phi,
            lam: sol.components.lam,
            wall_ms: opts.timing.then_some(wall),
        });
        routes.push((mode, case.instance.ids_of(&sol.order)));
    }
    Ok((rows, routes))
}

#[derive(Serialize)]
struct SummaryRow {
    mode: String,
    count: usize,
    mean: f64,
    std: f64,
    min: f64,
    median: f64,
    max: f64,
}

/// Score summary per mode, in the order the modes were requested.
pub fn summarize(rows: &[SolveRow], modes: &[Mode]) -> Vec<(String, Summary)> {
    modes
        .iter()
        .filter_map(|m| {
            let name = m.to_string();
            let scores: Vec<f64> = rows.iter().filter(|r| r.mode == name).filter_map(|r| r.score).collect();
            Summary::of(&scores).map(|s| (name, s))
        })
        .collect()
}

fn print_summary(summary: &[(String, Summary)]) {
    if summary.is_empty() {
        return;
    }
    println!("{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}", "mode", "mean", "std", "min", "median", "max");
    for (m, s) in summary {
        println!(
            "{:<12} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            m, s.mean, s.std, s.min, s.median, s.max
        );
    }
}

/// Runs every case, writes the tables, returns the number of failures.
fn solve_suite(
    cases: &[Result<Case>],
    field: Option<&VectorField>,
    modes: &[Mode],
    opts: &SearchOpts,
    rule: ScoringRule,
    jobs: usize,
    out: &Path,
) -> Result<usize> {
    let results: Vec<Result<(Vec<SolveRow>, Vec<(Mode, Vec<String>)>)>> = pool(jobs)?.install(|| {
        cases
            .par_iter()
            .map(|c| match c {
                Ok(case) => solve_case(case, field, modes, opts, rule)
                    .with_context(|| format!("instance {}", case.name)),
                Err(e) => Err(anyhow::anyhow!("{e:#}")),
            })
            .collect()
    });
    let routes_dir = out.join("routes");
    std::fs::create_dir_all(&routes_dir)?;
    let mut rows = Vec::new();
    let mut failed = 0;
    for res in results {
        match res {
            Ok((r, routes)) => {
                let name = &r.first().map(|x| x.instance.clone()).unwrap_or_default();
                for (mode, order) in routes {
                    let file = routes_dir.join(format!("{}.{}.json", file_safe(name), file_safe(&mode.to_string())));
                    save_route(
                        &RouteFile {
                            instance_id: Some(name.clone()),
                            order,
                        },
                        file,
                    )?;
                }
                rows.extend(r);
            }
            Err(e) => {
                failed += 1;
                eprintln!("error: {e:#}");
            }
        }
    }
    write_csv(&out.join("results.csv"), &rows)?;
    let summary = summarize(&rows, modes);
    let table: Vec<SummaryRow> = summary
        .iter()
        .map(|(m, s)| SummaryRow {
            mode: m.clone(),
            count: s.count,
            mean: s.mean,
            std: s.std,
            min: s.min,
            median: s.median,
            max: s.max,
        })
        .collect();
    write_csv(&out.join("summary.csv"), &table)?;
    write_json(&out.join("summary.json"), &table)?;
    print_summary(&summary);
    Ok(failed)
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> Result<Outcome> {
    let paths = expand(&a.instances)?;
    if paths.is_empty() {
        bail!("no instance matched");
    }
    let field = history_field(&a.history)?;
    if needs_history(&a.mode) && field.is_none() {
        bail!("mode dm needs --field or --histories");
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let started = Instant::now();
    let cases: Vec<Result<Case>> = paths.iter().map(|p| load_case(p)).collect();
    let opts = SearchOpts::from(&a.search);
    let failed = solve_suite(&cases, field.as_ref(), &a.mode, &opts, a.scoring.into(), a.search.jobs, &a.out)?;
    let mut manifest = Manifest::new(cli, vec![opts.seed], paths.iter().map(|p| p.display().to_string()).collect());
    if a.search.timing {
        manifest.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(Outcome::from_failures(failed))
}

// ---------------------------------------------------------------- pareto

/// One front approximation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoRow {
    pub instance: String,
    pub seed: u64,
    pub size: usize,
    pub f1_min: f64,
    pub f1_max: f64,
    pub gap_seconds: f64,
    pub f2_min: f64,
    pub f2_max: f64,
    pub roh_calls: usize,
    pub iterations: usize,
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapStats {
    /// Mean over runs of the spread of travel time within one archive.
    pub mean_seconds: f64,
    pub max_seconds: f64,
    /// Instances whose largest spread over their runs exceeds each limit.
    pub instances_over_minutes: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoAggregate {
    pub runs: usize,
    pub instances: usize,
    pub sizes: SizeHistogram,
    pub share_at_least_two: f64,
    pub mean_size: f64,
    pub gap: GapStats,
}

pub fn aggregate(rows: &[ParetoRow]) -> ParetoAggregate {
    let mut sizes = SizeHistogram::default();
    for r in rows {
        sizes.add(r.size);
    }
    let runs = rows.len();
    let n = runs.max(1) as f64;
    let mut per_instance: BTreeMap<&str, f64> = BTreeMap::new();
    for r in rows {
        let e = per_instance.entry(&r.instance).or_insert(0.0);
        *e = e.max(r.gap_seconds);
    }
    let instances_over_minutes = GAP_MINUTES
        .iter()
        .map(|&m| {
            let limit = f64::from(m) * 60.0;
            (m.to_string(), per_instance.values().filter(|&&g| g > limit).count())
        })
        .collect();
    ParetoAggregate {
        runs,
        instances: per_instance.len(),
        sizes,
        share_at_least_two: rows.iter().filter(|r| r.size >= 2).count() as f64 / n,
        mean_size: rows.iter().map(|r| r.size as f64).sum::<f64>() / n,
        gap: GapStats {
            mean_seconds: rows.iter().map(|r| r.gap_seconds).sum::<f64>() / n,
            max_seconds: rows.iter().map(|r| r.gap_seconds).fold(0.0, f64::max),
            instances_over_minutes,
        },
    }
}

pub fn hbs_config(a: &HbsArgs) -> HbsConfig {
    HbsConfig {
        n_max: a.n_max,
        f1_max: a.f1_max.0,
        f2_min: catsp_core::pareto::DEFAULT_F2_MIN,
        delta_min: a.delta_min,
    }
}

/// Runs the front approximation on `case` for each seed and writes the
/// archive files.
fn pareto_case(
    case: &Case,
    field: &VectorField,
    opts: &SearchOpts,
    hbs: &HbsConfig,
    seeds: &[u64],
    fronts: &Path,
) -> Result<Vec<ParetoRow>> {
    let ctx = RouteContext::prepare(&case.instance, Some(field))?;
    let mut rows = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = SearchConfig::new(Mode::Base)
            .with_seed(seed)
            .with_iterations(opts.iterations)
            .with_weights(opts.weights.unwrap_or(Weights::BI_OBJECTIVE));
        let start = Instant::now();
        let arch = pareto_solve(&ctx, &cfg, hbs)?;
        let wall = start.elapsed().as_secs_f64() * 1e3;
        let sorted = arch.sorted();
        for e in &sorted {
            if !validate_solution(ctx.instance(), &e.solution) {
                bail!("archive holds an invalid tour");
            }
        }
        let stem = format!("{}.s{seed}", file_safe(&case.name));
        let with_ids: Vec<_> = sorted
            .iter()
            .map(|e| (*e, case.instance.ids_of(&e.solution.order).join("-")))
            .collect();
        write_front_csv(&fronts.join(format!("{stem}.csv")), &with_ids)?;
        let pts: Vec<(f64, f64)> = sorted.iter().map(|e| (e.point.f1, e.point.f2)).collect();
        std::fs::write(
            fronts.join(format!("{stem}.svg")),
            front_svg(&format!("{} seed {seed}", case.name), &pts),
        )?;
        let f1 = pts.iter().map(|p| p.0);
        let f2 = pts.iter().map(|p| p.1);
        let (f1_min, f1_max) = (f1.clone().fold(f64::INFINITY, f64::min), f1.fold(f64::NEG_INFINITY, f64::max));
        let (f2_min, f2_max) = (f2.clone().fold(f64::INFINITY, f64::min), f2.fold(f64::NEG_INFINITY, f64::max));
        rows.push(ParetoRow {
            instance: case.name.clone(),
            seed,
            size: arch.len(),
            f1_min,
            f1_max,
            gap_seconds: f1_max - f1_min,
            f2_min,
            f2_max,
            roh_calls: arch.roh_calls,
            iterations: arch.iterations,
            wall_ms: opts.timing.then_some(wall),
        });
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn pareto_suite(
    cases: &[Result<Case>],
    field: &VectorField,
    opts: &SearchOpts,
    hbs: &HbsConfig,
    seeds: &[u64],
    jobs: usize,
    out: &Path,
) -> Result<usize> {
    let fronts = out.join("fronts");
    std::fs::create_dir_all(&fronts)?;
    let results: Vec<Result<Vec<ParetoRow>>> = pool(jobs)?.install(|| {
        cases
            .par_iter()
            .map(|c| match c {
                Ok(case) => pareto_case(case, field, opts, hbs, seeds, &fronts)
                    .with_context(|| format!("instance {}", case.name)),
                Err(e) => Err(anyhow::anyhow!("{e:#}")),
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failed = 0;
    for res in results {
        match res {
            Ok(r) => rows.extend(r),
            Err(e) => {
                failed += 1;
                eprintln!("error: {e:#}");
            }
        }
    }
    write_csv(&out.join("pareto_runs.csv"), &rows)?;
    let agg = aggregate(&rows);
    write_json(&out.join("pareto_summary.json"), &agg)?;
    println!(
        "{} runs: {:.1}% with >= 2 solutions, mean archive size {:.2}",
        agg.runs,
        100.0 * agg.share_at_least_two,
        agg.mean_size
    );
    Ok(failed)
}

fn cmd_pareto(cli: &Cli, a: &ParetoArgs) -> Result<Outcome> {
    let paths = expand(&a.instances)?;
    if paths.is_empty() {
        bail!("no instance matched");
    }
    let Some(field) = history_field(&a.history)? else {
        bail!("pareto needs --field or --histories");
    };
    if a.hbs.runs == 0 {
        bail!("--runs must be at least 1");
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let started = Instant::now();
    let cases: Vec<Result<Case>> = paths.iter().map(|p| load_case(p)).collect();
    let opts = SearchOpts::from(&a.search);
    let seeds: Vec<u64> = (opts.seed..opts.seed + a.hbs.runs).collect();
    let failed = pareto_suite(&cases, &field, &opts, &hbs_config(&a.hbs), &seeds, a.search.jobs, &a.out)?;
    let mut manifest = Manifest::new(cli, seeds, paths.iter().map(|p| p.display().to_string()).collect());
    if a.search.timing {
        manifest.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(Outcome::from_failures(failed))
}

// ---------------------------------------------------------------- score

fn cmd_score(a: &ScoreArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance).with_context(|| format!("reading {}", a.instance.display()))?;
    let x = load_route(&a.route).with_context(|| format!("reading {}", a.route.display()))?;
    let b = load_route(&a.reference).with_context(|| format!("reading {}", a.reference.display()))?;
    let report = score_ids(&inst, &x.order, &b.order, a.scoring.into())?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- bench

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Result<Outcome> {
    if a.count == 0 {
        bail!("--count must be at least 1");
    }
    let inst_dir = a.out.join("instances");
    std::fs::create_dir_all(&inst_dir).with_context(|| format!("creating {}", inst_dir.display()))?;
    let started = Instant::now();
    let seeds: Vec<u64> = (a.first..a.first + a.count).collect();
    let mut cases = Vec::with_capacity(seeds.len());
    let mut histories = Vec::new();
    for &seed in &seeds {
        let case = generate_synthetic(seed, a.zones, a.stops_per_zone, a.policy)?;
        write_case(&inst_dir, &case)?;
        histories.extend(case.histories.iter().cloned());
        cases.push(Ok(Case {
            name: case.instance.id().to_owned(),
            instance: case.instance,
            executed: Some(case.executed),
        }));
    }
    // neighborhoods never overlap, so one field serves the whole suite
    let field = build_field(&histories, catsp_core::field::DEFAULT_BETA, catsp_core::field::DEFAULT_ALPHA);
    save_field(&field, a.out.join("field.json"))?;
    let opts = SearchOpts::from(&a.search);
    let mut failed = solve_suite(&cases, Some(&field), &a.mode, &opts, a.scoring.into(), a.search.jobs, &a.out)?;
    let mut run_seeds = vec![opts.seed];
    if a.pareto {
        let pseeds: Vec<u64> = (opts.seed..opts.seed + a.hbs.runs.max(1)).collect();
        failed += pareto_suite(&cases, &field, &opts, &hbs_config(&a.hbs), &pseeds, a.search.jobs, &a.out)?;
        run_seeds = pseeds;
    }
    let mut manifest = Manifest::new(cli, run_seeds, seeds.iter().map(|s| format!("syn-{s}")).collect());
    if a.search.timing {
        manifest.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(Outcome::from_failures(failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_file_sits_next_to_instance() {
        assert_eq!(route_path_for(Path::new("d/syn-1.instance.json")), Path::new("d/syn-1.route.json"));
        assert_eq!(route_path_for(Path::new("x.json")), Path::new("x.route.json"));
    }

    #[test]
    fn aggregate_counts_sizes_and_gaps() {
        let row = |inst: &str, size, gap| ParetoRow {
            instance: inst.into(),
            seed: 1,
            size,
            f1_min: 0.0,
            f1_max: gap,
            gap_seconds: gap,
            f2_min: 0.0,
            f2_max: 0.0,
            roh_calls: 1,
            iterations: 0,
            wall_ms: None,
        };
        let agg = aggregate(&[row("a", 1, 0.0), row("a", 3, 700.0), row("b", 6, 2000.0)]);
        assert_eq!(agg.runs, 3);
        assert_eq!(agg.instances, 2);
        assert_eq!((agg.sizes.one, agg.sizes.three, agg.sizes.five_plus), (1, 1, 1));
        assert!((agg.share_at_least_two - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(agg.gap.instances_over_minutes["10"], 2);
        assert_eq!(agg.gap.instances_over_minutes["30"], 1);
        assert_eq!(agg.gap.instances_over_minutes["60"], 0);
    }
}
