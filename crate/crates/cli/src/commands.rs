use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use redist_tda::analysis::{
    compare_elections as compare_features, ensemble_diagrams, filtered_district_graph, overlay, zone, AnalysisOptions,
    EnsembleAnalysis, MatchingMode, OverlayPoint,
};
use redist_tda::chains::{
    biased_chain_observed, chain_rng, recursive_tree_partition, run_chain_observed, BiasConfig, Party,
};
use redist_tda::frechet::{frechet_mean, stratified_seeds};
use redist_tda::graph::{statewide_share, DualGraph, Election, Plan};
use redist_tda::io::report::{
    point_records, zone_records, AnalysisRecord, BiasRecord, ComparisonRecord, FrechetRecord, MatchingRecord,
    SkipRecord,
};
use redist_tda::io::{
    diagram_series, read_diagram, read_ensemble, read_graph, read_plan, scatter_svg, write_diagram, write_ensemble,
    write_graph, write_heat_map, write_json, write_matrix, write_overlay, write_text, write_trace, ExperimentConfig,
};
use redist_tda::metrics::{self, distance_matrix};
use redist_tda::persistence::filtration_order;
use redist_tda::stability::{
    coefficient, flip_drift, flip_trace, geo_flip_sweep, recom_preservation_rate, vote_stability_sweep,
};
use redist_tda::synth::{synth_state_with, City, SynthOptions};
use redist_tda::Diagram;
use serde_json::json;

use crate::progress::{warn, Progress};
use crate::{AnalysisArgs, ConfigError, Context, Seeds, StabilityMode};

/// Seed offset for generating the initial plan, so it does not share a stream with the chain.
const SEEDING_STREAM: u64 = 0x5eed;

fn load_graph(cfg: &ExperimentConfig) -> Result<DualGraph> {
    let g = read_graph(&cfg.graph).with_context(|| format!("loading graph {}", cfg.graph.display()))?;
    cfg.validate(&g)?;
    Ok(g)
}

fn initial_plan(ctx: &Context, cfg: &ExperimentConfig, g: &DualGraph, plan: Option<&Path>) -> Result<Plan> {
    match plan.or(cfg.initial_plan.as_deref()) {
        Some(path) => Ok(read_plan(path, g, Some(cfg.k), cfg.epsilon)?),
        None => {
            let mut rng = chain_rng(ctx.seed ^ SEEDING_STREAM);
            Ok(recursive_tree_partition(g, cfg.k, cfg.epsilon, &mut rng, 100)?)
        }
    }
}

/// Pretty JSON summary on stdout; a closed pipe is not an error.
fn print(value: serde_json::Value) {
    let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn analysis_options(ctx: &Context, args: &AnalysisArgs) -> AnalysisOptions {
    let mut opts = ctx.config.as_ref().map(|c| c.analysis.options()).unwrap_or_default();
    if let Some(m) = args.min_persistence {
        opts.min_persistence = m;
    }
    match args.seeds {
        Some(Seeds::All) => opts.frechet_seeds = None,
        Some(Seeds::Count(n)) => opts.frechet_seeds = Some(n),
        None => {}
    }
    opts
}

pub fn ensemble(ctx: &Context, favor: Option<Party>, election: Option<&str>) -> Result<()> {
    let cfg = ctx.config()?;
    let g = load_graph(cfg)?;
    let chain = cfg
        .chain_config()
        .ok_or_else(|| ConfigError("config has no `chain` section".into()))?;
    let bias = match favor {
        Some(party) => Some(BiasConfig::new(cfg.election(election)?.clone(), party)),
        None => cfg.bias.clone(),
    };
    let start = initial_plan(ctx, cfg, &g, None)?;
    let progress = Progress::new("ensemble", chain.steps);
    let observe = |step: usize, _: &Plan| progress.tick(step);
    let ens = match &bias {
        Some(b) => biased_chain_observed(&g, &start, &chain, b, observe)?,
        None => run_chain_observed(&g, &start, &chain, cfg.chain_kind(), observe)?,
    };
    write_ensemble(&ctx.out, &g, &ens)?;
    print(json!({
        "output": ctx.out,
        "plans": ens.len(),
        "steps": ens.meta.steps,
        "changed": ens.meta.changed,
        "accepted": ens.meta.accepted,
    }));
    Ok(())
}

fn diagram_file(index: usize) -> String {
    format!("diagram_{index:06}.csv")
}

/// Diagram CSVs of a directory in file-name order.
fn read_diagram_dir(dir: &Path) -> Result<Vec<Diagram>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("diagram_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no diagram_*.csv files in {}", dir.display());
    }
    files.iter().map(|f| Ok(read_diagram(f)?)).collect()
}

pub fn persist(ctx: &Context, dir: &Path, election: Option<&str>) -> Result<()> {
    let cfg = ctx.config()?;
    let g = load_graph(cfg)?;
    let election = cfg.election(election)?;
    let (_, plans) = read_ensemble(dir, &g)?;
    let results = ensemble_diagrams(&g, &plans, election);
    let mut pooled = Vec::new();
    let mut skipped = Vec::new();
    let mut tied = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(d) => {
                // equal district shares are ordered by district index
                let dg = filtered_district_graph(&g, &plans[i], election)?;
                if filtration_order(dg.filtration().unwrap_or_default())?.ties_broken {
                    tied.push(i);
                }
                write_diagram(&ctx.out.join(diagram_file(i)), &d)?;
                pooled.extend(d.points.iter().map(|&point| OverlayPoint { plan: i, point }));
            }
            Err(e) => {
                warn("persist", "plan skipped", json!({ "plan": i, "reason": e.to_string() }));
                skipped.push(SkipRecord {
                    plan: i,
                    reason: e.to_string(),
                });
            }
        }
    }
    write_overlay(&ctx.out.join("overlay.csv"), &pooled)?;
    write_json(&ctx.out.join("skipped.json"), &skipped)?;
    if !tied.is_empty() {
        warn(
            "persist",
            "tied filtration values broken by district index",
            json!({ "plans": tied }),
        );
    }
    print(json!({
        "output": ctx.out,
        "diagrams": plans.len() - skipped.len(),
        "skipped": skipped.len(),
        "tied_filtrations": tied,
        "election": election.name,
    }));
    Ok(())
}

pub fn wasserstein(
    ctx: &Context,
    a: Option<PathBuf>,
    b: Option<PathBuf>,
    diagrams: Option<PathBuf>,
    p: f64,
) -> Result<()> {
    if let Some(dir) = diagrams {
        let ds = read_diagram_dir(&dir)?;
        let m = distance_matrix(&ds, p)?;
        write_matrix(&ctx.out.join("distances.csv"), &m)?;
        print(json!({ "output": ctx.out, "diagrams": ds.len(), "p": p.to_string() }));
        return Ok(());
    }
    let (Some(a), Some(b)) = (a, b) else {
        return Err(ConfigError("give --a and --b, or --diagrams".into()).into());
    };
    let m = metrics::wasserstein(&read_diagram(&a)?, &read_diagram(&b)?, p)?;
    let record = MatchingRecord::from(&m);
    write_json(&ctx.out.join("matching.json"), &record)?;
    print(serde_json::to_value(&record)?);
    Ok(())
}

pub fn frechet(ctx: &Context, dir: &Path, args: &AnalysisArgs) -> Result<()> {
    let diagrams = read_diagram_dir(dir)?;
    let opts = analysis_options(ctx, args);
    let result = frechet_mean(&diagrams, &opts.seeds(diagrams.len()), &opts.frechet)?;
    let record = FrechetRecord::from(&result);
    write_json(&ctx.out.join("frechet.json"), &record)?;
    write_diagram(&ctx.out.join("mean.csv"), &result.mean)?;
    let pooled: Vec<_> = overlay(&diagrams).into_iter().map(|o| o.point).collect();
    let svg = scatter_svg(
        "Frechet mean",
        &[
            diagram_series("overlay", &pooled),
            diagram_series("mean", &result.mean.points),
        ],
    );
    write_text(&ctx.out.join("mean.svg"), &svg)?;
    print(json!({
        "output": ctx.out,
        "mean": point_records(&result.mean.points),
        "functional_value": record.functional_value,
        "seed_id": result.seed_id,
        "converged": result.converged,
    }));
    Ok(())
}

fn feature_plot(title: &str, a: &EnsembleAnalysis) -> String {
    let mut series = vec![diagram_series("mean", &a.frechet.mean.points)];
    for f in 0..a.features.len() {
        let pts: Vec<_> = a
            .marked
            .feature_points(f)
            .into_iter()
            .map(|(_, l)| redist_tda::PersistencePoint {
                birth: l.birth,
                death: l.death,
                anchor: None,
            })
            .collect();
        series.push(diagram_series(&format!("feature {f}"), &pts));
    }
    scatter_svg(title, &series)
}

pub fn zoning(ctx: &Context, dir: &Path, election: Option<&str>, args: &AnalysisArgs) -> Result<()> {
    let cfg = ctx.config()?;
    let g = load_graph(cfg)?;
    let election = cfg.election(election)?;
    let (_, plans) = read_ensemble(dir, &g)?;
    let opts = analysis_options(ctx, args);
    let analysis = EnsembleAnalysis::run(&g, &plans, election, &opts)?;
    for (plan, reason) in &analysis.skipped {
        warn("zoning", "plan skipped", json!({ "plan": plan, "reason": reason }));
    }
    let kept: Vec<Plan> = analysis.kept.iter().map(|&i| plans[i].clone()).collect();
    let zones = zone(&analysis.marked, &kept, &analysis.district_graphs)?;

    let out = &ctx.out;
    write_json(
        &out.join("analysis.json"),
        &AnalysisRecord::new(&election.name, &analysis),
    )?;
    write_json(&out.join("zones.json"), &zone_records(&zones))?;
    write_diagram(&out.join("mean.csv"), &analysis.frechet.mean)?;
    for heat in &analysis.heat_maps {
        write_heat_map(&out.join(format!("heat_{:02}.csv", heat.feature)), &g, heat)?;
    }
    for z in &zones.features {
        if let Some(cluster) = &z.cluster_heat {
            let text = redist_tda::io::heat_map_to_csv(&g, cluster);
            write_text(&out.join(format!("cluster_heat_{:02}.csv", z.feature)), &text)?;
        }
    }
    write_text(
        &out.join("features.svg"),
        &feature_plot(&format!("{} features", election.name), &analysis),
    )?;
    print(json!({
        "output": out,
        "features": analysis.features.len(),
        "zones": zone_records(&zones),
    }));
    Ok(())
}

pub fn compare_elections(
    ctx: &Context,
    dir: &Path,
    name_a: &str,
    name_b: &str,
    mode: Option<MatchingMode>,
    args: &AnalysisArgs,
) -> Result<()> {
    let cfg = ctx.config()?;
    let g = load_graph(cfg)?;
    let (ea, eb): (&Election, &Election) = (cfg.election(Some(name_a))?, cfg.election(Some(name_b))?);
    let (_, plans) = read_ensemble(dir, &g)?;
    let opts = analysis_options(ctx, args);
    let a = EnsembleAnalysis::run(&g, &plans, ea, &opts)?;
    let b = EnsembleAnalysis::run(&g, &plans, eb, &opts)?;
    let swing = statewide_share(&g, eb)? - statewide_share(&g, ea)?;
    let mode = mode.unwrap_or(cfg.analysis.matching_mode);
    let comparison = compare_features(
        &a.features,
        &b.features,
        mode,
        Some((&a.heat_maps, &b.heat_maps)),
        swing,
    )?;
    let record = ComparisonRecord::from(&comparison);
    write_json(
        &ctx.out.join("comparison.json"),
        &json!({
            "election_a": ea.name,
            "election_b": eb.name,
            "analysis_a": AnalysisRecord::new(&ea.name, &a),
            "analysis_b": AnalysisRecord::new(&eb.name, &b),
            "comparison": record,
        }),
    )?;
    let svg = scatter_svg(
        &format!("{} vs {}", ea.name, eb.name),
        &[
            diagram_series(&ea.name, &a.frechet.mean.points),
            diagram_series(&eb.name, &b.frechet.mean.points),
        ],
    );
    write_text(&ctx.out.join("means.svg"), &svg)?;
    print(serde_json::to_value(&record)?);
    Ok(())
}

pub fn compare_biased(
    ctx: &Context,
    dem: &Path,
    rep: &Path,
    election: Option<&str>,
    args: &AnalysisArgs,
) -> Result<()> {
    let cfg = ctx.config()?;
    let g = load_graph(cfg)?;
    let election = cfg.election(election)?;
    let (_, dem_plans) = read_ensemble(dem, &g)?;
    let (_, rep_plans) = read_ensemble(rep, &g)?;
    let threshold = cfg.bias.as_ref().map_or(0.53, |b| b.safe_threshold);
    let opts = analysis_options(ctx, args);
    let report = redist_tda::analysis::compare_biased(&g, &dem_plans, &rep_plans, election, &opts, threshold)?;
    let record = BiasRecord::new(&election.name, &report);
    write_json(&ctx.out.join("bias.json"), &record)?;
    write_text(
        &ctx.out.join("dem_features.svg"),
        &feature_plot("Democratic-favoring", &report.dem),
    )?;
    write_text(
        &ctx.out.join("rep_features.svg"),
        &feature_plot("Republican-favoring", &report.rep),
    )?;
    print(json!({
        "output": ctx.out,
        "dem_favoring_seats": record.dem_favoring_seats,
        "rep_favoring_seats": record.rep_favoring_seats,
        "agreement": record.agreement,
    }));
    Ok(())
}

pub fn stability(ctx: &Context, mode: StabilityMode) -> Result<()> {
    match mode {
        StabilityMode::VoteCheck {
            trials,
            max_k,
            max_shift,
        } => {
            let sweep = vote_stability_sweep(trials, max_k, max_shift, ctx.seed)?;
            write_json(&ctx.out.join("vote_check.json"), &sweep)?;
            print(json!({
                "trials": sweep.trials,
                "violations": sweep.violations,
                "all_satisfied": sweep.violations == 0,
                "max_ratio": sweep.max_ratio,
            }));
        }
        StabilityMode::Geo { plan, steps, election } => {
            let cfg = ctx.config()?;
            let g = load_graph(cfg)?;
            let election = cfg.election(election.as_deref())?;
            let start = initial_plan(ctx, cfg, &g, plan.as_deref())?;
            let sweep = geo_flip_sweep(&g, &start, election, steps, ctx.seed)?;
            let cases: Vec<_> = sweep
                .bounded
                .iter()
                .map(|b| {
                    json!({
                        "moved": b.class.moved,
                        "districts": b.class.districts,
                        "alpha": b.report.alpha,
                        "coefficient": b.coefficient,
                        "share_gap": b.share_gap,
                        "bound": b.report.theoretical_bound,
                        "observed": b.report.observed_bottleneck,
                        "satisfied": b.report.satisfied,
                    })
                })
                .collect();
            let summary = json!({
                "steps": sweep.steps,
                "graph_preserving_one_way": sweep.bounded.len(),
                "not_graph_preserving": sweep.skipped_not_graph_preserving,
                "violations": sweep.violations,
                "epsilon": start.epsilon(),
                "reference_coefficient": coefficient(0.02, 0.25),
            });
            write_json(
                &ctx.out.join("geo.json"),
                &json!({ "summary": summary, "cases": cases }),
            )?;
            print(summary);
        }
        StabilityMode::FlipTrace { plan, steps, election } => {
            let cfg = ctx.config()?;
            let g = load_graph(cfg)?;
            let election = cfg.election(election.as_deref())?;
            let start = initial_plan(ctx, cfg, &g, plan.as_deref())?;
            let trace = flip_trace(&g, &start, election, steps, ctx.seed)?;
            write_trace(&ctx.out.join("trace.csv"), &trace)?;
            print(json!({ "steps": steps, "final": trace.last().map(|t| t.1) }));
        }
        StabilityMode::Drift {
            ensemble,
            starts,
            flips,
            epsilon,
            election,
        } => {
            let cfg = ctx.config()?;
            let g = load_graph(cfg)?;
            let election = cfg.election(election.as_deref())?;
            let (_, plans) = read_ensemble(&ensemble, &g)?;
            let chosen: Vec<Plan> = stratified_seeds(plans.len(), starts)
                .into_iter()
                .map(|i| match epsilon {
                    Some(e) => plans[i].with_epsilon(&g, e),
                    None => Ok(plans[i].clone()),
                })
                .collect::<Result<_, _>>()?;
            let report = flip_drift(&g, &chosen, election, flips, ctx.seed)?;
            for (i, t) in report.traces.iter().enumerate() {
                write_trace(&ctx.out.join(format!("trace_{i:03}.csv")), t)?;
            }
            let summary = json!({
                "starts": chosen.len(),
                "flips": flips,
                "final_drift": report.final_drift,
                "median_drift": report.median_drift,
                "mean_pairwise": report.mean_pairwise,
                "drift_below_baseline": report.median_drift < report.mean_pairwise,
            });
            write_json(&ctx.out.join("drift.json"), &summary)?;
            print(summary);
        }
        StabilityMode::Preservation { plan, steps } => {
            let cfg = ctx.config()?;
            let g = load_graph(cfg)?;
            let chain = cfg
                .chain_config()
                .ok_or_else(|| ConfigError("config has no `chain` section".into()))?;
            let start = initial_plan(ctx, cfg, &g, plan.as_deref())?;
            let report = recom_preservation_rate(&g, &start, steps, &chain)?;
            write_json(&ctx.out.join("preservation.json"), &report)?;
            print(serde_json::to_value(report)?);
        }
    }
    Ok(())
}

pub fn synth(
    ctx: &Context,
    rows: usize,
    cols: usize,
    cities: &[City],
    base_dem_share: Option<f64>,
    noise: Option<f64>,
) -> Result<()> {
    let mut opts = SynthOptions::default();
    if let Some(b) = base_dem_share {
        opts.base_dem_share = b;
    }
    if let Some(n) = noise {
        opts.noise = n;
    }
    if rows < 2 || cols < 2 {
        return Err(ConfigError(format!("grid must be at least 2x2, got {rows}x{cols}")).into());
    }
    let g = synth_state_with(rows, cols, cities, ctx.seed, &opts)?;
    let path = ctx.out.join("graph.json");
    write_graph(&path, &g)?;
    let election = redist_tda::synth::synth_election();
    print(json!({
        "output": path,
        "units": g.node_count(),
        "population": g.total_population(),
        "republican_share": statewide_share(&g, &election)?,
        "election": election,
    }));
    Ok(())
}
