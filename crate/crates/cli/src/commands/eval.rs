use std::path::Path;
use std::time::Duration;

use anyhow::Context as _;
use linksched_core::distributed::{gcn_lgs, gcn_lgs_it, EmbeddingSource, FeatureKind};
use linksched_core::exact::{approximation_ratio, mwis_exact, ExactBudget};
use linksched_core::gcn::{load_model, GcnModel};
use linksched_core::graph::ConflictGraph;
use linksched_core::greedy::{cgs, lgs, lgs_truncated, SolveResult};
use linksched_core::rng::subseed;
use linksched_core::search::{gcn_cgs_search, gcn_crs, gcn_crts, CrsVariant, CrtsConfig, RolloutConfig};
use rayon::prelude::*;

use crate::config::{EvalConfig, ModelPaths, TestSet};
use crate::manifest::{prepare_out_dir, ManifestBuilder};
use crate::output::{boxplot_svg, field, Csv};
use crate::Context;

pub struct LoadedModels {
    pub scalar: Option<GcnModel>,
    pub q: Option<GcnModel>,
    pub crts: Option<GcnModel>,
    pub mlp: Option<GcnModel>,
}

impl LoadedModels {
    pub fn load(paths: &ModelPaths) -> anyhow::Result<Self> {
        let get = |p: &Option<String>| -> anyhow::Result<Option<GcnModel>> {
            match p {
                Some(path) => Ok(Some(
                    load_model(path).with_context(|| format!("loading model {path}"))?,
                )),
                None => Ok(None),
            }
        };
        Ok(LoadedModels {
            scalar: get(&paths.scalar)?,
            q: get(&paths.q)?,
            crts: get(&paths.crts)?,
            mlp: get(&paths.mlp)?,
        })
    }

    fn scalar(&self) -> anyhow::Result<&GcnModel> {
        self.scalar.as_ref().ok_or_else(|| anyhow::anyhow!("solver needs models.scalar"))
    }
}

#[derive(Clone, Copy, PartialEq)]
pub enum EvalSolver {
    Cgs,
    Lgs,
    LgsN(usize),
    GcnLgs,
    GcnLgsIt,
    GcnCrs(CrsVariant),
    GcnCgs,
    GcnCrts,
    RandomLgs,
    MlpLgs,
}

pub fn parse_solver(name: &str) -> anyhow::Result<EvalSolver> {
    Ok(match name {
        "cgs" => EvalSolver::Cgs,
        "lgs" => EvalSolver::Lgs,
        "gcn-lgs" => EvalSolver::GcnLgs,
        "gcn-lgs-it" => EvalSolver::GcnLgsIt,
        "gcn-crs-v" => EvalSolver::GcnCrs(CrsVariant::Vanilla),
        "gcn-crs-e" => EvalSolver::GcnCrs(CrsVariant::Enhanced),
        "gcn-cgs" => EvalSolver::GcnCgs,
        "gcn-crts" => EvalSolver::GcnCrts,
        "random-lgs" => EvalSolver::RandomLgs,
        "mlp-lgs" => EvalSolver::MlpLgs,
        other => match other.strip_prefix("lgs-").and_then(|n| n.parse().ok()) {
            Some(n) => EvalSolver::LgsN(n),
            None => anyhow::bail!("unknown solver '{other}'"),
        },
    })
}

pub fn solve(
    solver: EvalSolver,
    graph: &ConflictGraph,
    weights: &[f64],
    models: &LoadedModels,
    config: &EvalConfig,
    instance_seed: u64,
) -> anyhow::Result<SolveResult> {
    Ok(match solver {
        EvalSolver::Cgs => cgs(graph, weights),
        EvalSolver::Lgs => lgs(graph, weights, None),
        EvalSolver::LgsN(n) => lgs_truncated(graph, weights, n),
        EvalSolver::GcnLgs => gcn_lgs(
            graph,
            weights,
            &EmbeddingSource::Gcn { model: models.scalar()?, features: FeatureKind::Ones },
            None,
        )?,
        EvalSolver::GcnLgsIt => {
            gcn_lgs_it(graph, FeatureKind::Ones, weights, models.scalar()?, None)?
        }
        EvalSolver::GcnCrs(variant) => {
            let cfg = RolloutConfig {
                branching: config.branching,
                variant,
                ..RolloutConfig::default()
            };
            gcn_crs(graph, weights, models.scalar()?, &cfg)?
        }
        EvalSolver::GcnCgs => {
            let model = models.q.as_ref().ok_or_else(|| anyhow::anyhow!("solver needs models.q"))?;
            gcn_cgs_search(graph, weights, model, 0.0, instance_seed)?
        }
        EvalSolver::GcnCrts => {
            let model =
                models.crts.as_ref().ok_or_else(|| anyhow::anyhow!("solver needs models.crts"))?;
            let branches = match model.output_kind() {
                linksched_core::gcn::OutputKind::CrtsLogits { branches } => branches,
                _ => anyhow::bail!("models.crts is not a crts-logits model"),
            };
            let cfg = CrtsConfig {
                branching: branches,
                backtrack_prob: config.crts_backtrack,
                timeout: Duration::from_secs_f64(config.crts_timeout),
                threads: 1,
                seed: instance_seed,
            };
            gcn_crts(graph, weights, model, &cfg)?.result
        }
        EvalSolver::RandomLgs => gcn_lgs(
            graph,
            weights,
            &EmbeddingSource::Random { mean: 1.0, sd: 0.2, seed: instance_seed },
            None,
        )?,
        EvalSolver::MlpLgs => {
            let model =
                models.mlp.as_ref().ok_or_else(|| anyhow::anyhow!("solver needs models.mlp"))?;
            gcn_lgs(graph, weights, &EmbeddingSource::Mlp { model }, None)?
        }
    })
}

pub fn run(ctx: Context) -> anyhow::Result<()> {
    let config: EvalConfig = serde_json::from_str(&ctx.config_text)?;
    prepare_out_dir(&ctx.out, ctx.force)?;
    let mut manifest = ManifestBuilder::start("eval", &ctx.config_text, ctx.seed);
    let instances = match &config.test_set {
        TestSet::Dir(dir) => super::load_dataset(Path::new(dir))?,
        TestSet::Spec(spec) => super::generate_instances(spec, subseed(ctx.seed, 11))?,
    };
    let solvers: Vec<(String, EvalSolver)> = config
        .solvers
        .iter()
        .map(|name| parse_solver(name).map(|s| (name.clone(), s)))
        .collect::<anyhow::Result<_>>()?;
    let models = LoadedModels::load(&config.models)?;
    let budget = ExactBudget {
        node_limit: config.oracle_node_limit,
        time_limit: Duration::from_secs_f64(config.oracle_time_limit),
    };

    struct Row {
        instance: String,
        solver: String,
        v: usize,
        e: usize,
        utility: f64,
        rounds: usize,
        messages: usize,
        optimal: bool,
        opt_utility: f64,
        ar: Option<f64>,
    }

    let rows: Vec<Row> = instances
        .par_iter()
        .enumerate()
        .map(|(idx, inst)| -> anyhow::Result<Vec<Row>> {
            let opt = mwis_exact(&inst.graph, &inst.weights, budget);
            let mut out = Vec::with_capacity(solvers.len());
            for (name, solver) in &solvers {
                let r = solve(
                    *solver,
                    &inst.graph,
                    &inst.weights,
                    &models,
                    &config,
                    subseed(ctx.seed, 7_000 + idx as u64),
                )?;
                anyhow::ensure!(
                    inst.graph.is_independent_set(&r.solution),
                    "solver {name} returned a conflicting set on {}",
                    inst.name
                );
                let ar = approximation_ratio(&r, &opt).ok();
                out.push(Row {
                    instance: inst.name.clone(),
                    solver: name.clone(),
                    v: inst.graph.vertex_count(),
                    e: inst.graph.edge_count(),
                    utility: r.utility,
                    rounds: r.rounds,
                    messages: r.messages,
                    optimal: opt.optimal,
                    opt_utility: opt.result.utility,
                    ar,
                })
            }
            Ok(out)
        })
        .collect::<anyhow::Result<Vec<Vec<Row>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let results_path = ctx.out.join("results.csv");
    let mut csv = Csv::new(
        "eval-results",
        &["instance", "solver", "v", "e", "utility", "rounds", "messages", "optimal", "opt_utility", "ar"],
    );
    for r in &rows {
        csv.row(&[
            r.instance.clone(),
            r.solver.clone(),
            field(r.v),
            field(r.e),
            field(r.utility),
            field(r.rounds),
            field(r.messages),
            field(r.optimal),
            field(r.opt_utility),
            r.ar.map(field).unwrap_or_default(),
        ]);
    }
    csv.write(&results_path)?;
    manifest.record(&results_path);

    // aggregate rows: ARs averaged only over instances solved to optimality
    let agg_path = ctx.out.join("aggregate.csv");
    let mut agg = Csv::new("eval-aggregate", &["solver", "instances", "scored", "mean_ar", "mean_rounds"]);
    for (name, _) in &solvers {
        let mine: Vec<&Row> = rows.iter().filter(|r| &r.solver == name).collect();
        let scored: Vec<f64> = mine.iter().filter_map(|r| r.ar).collect();
        let mean_ar = scored.iter().sum::<f64>() / scored.len().max(1) as f64;
        let mean_rounds =
            mine.iter().map(|r| r.rounds as f64).sum::<f64>() / mine.len().max(1) as f64;
        agg.row(&[
            name.clone(),
            field(mine.len()),
            field(scored.len()),
            field(mean_ar),
            field(mean_rounds),
        ]);
    }
    agg.write(&agg_path)?;
    manifest.record(&agg_path);

    if ctx.svg {
        let groups: Vec<(String, Vec<f64>)> = solvers
            .iter()
            .map(|(name, _)| {
                let ars = rows.iter().filter(|r| &r.solver == name).filter_map(|r| r.ar).collect();
                (name.clone(), ars)
            })
            .collect();
        let svg_path = ctx.out.join("ar_boxplot.svg");
        std::fs::write(&svg_path, boxplot_svg("approximation ratio by solver", &groups))?;
        manifest.record(&svg_path);
    }
    manifest.finish(&ctx.out)?;
    println!("scored {} instances x {} solvers", instances.len(), solvers.len());
    Ok(())
}
