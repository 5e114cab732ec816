use std::time::Duration;

use linksched_core::exact::ExactBudget;
use linksched_core::rng::subseed;
use linksched_core::search::{CrsVariant, RolloutConfig};
use linksched_core::sim::{
    gen_network, simulate, ChannelMode, LoadSpec, SimConfig, SimMetrics, SimScheduler, UtilityKind,
};
use rayon::prelude::*;

use crate::config::{LoadName, ModeName, SimulateConfig, UtilityName};
use crate::manifest::{prepare_out_dir, ManifestBuilder};
use crate::output::{curves_svg, field, Csv};
use crate::Context;

use super::eval::LoadedModels;

fn build_schedulers<'a>(
    names: &[String],
    models: &'a LoadedModels,
    config: &SimulateConfig,
) -> anyhow::Result<Vec<SimScheduler<'a>>> {
    let budget = ExactBudget {
        node_limit: config.oracle_node_limit,
        time_limit: Duration::from_secs_f64(config.oracle_time_limit),
    };
    names
        .iter()
        .map(|name| {
            let need_scalar = || {
                models
                    .scalar
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("scheduler {name} needs models.scalar"))
            };
            Ok(match name.as_str() {
                "exact" => SimScheduler::Exact { budget },
                "cgs" => SimScheduler::Cgs,
                "lgs" => SimScheduler::Lgs,
                "gcn-lgs" => SimScheduler::GcnLgs { model: need_scalar()?, reuse: false },
                "gcn-reuse-lgs" => SimScheduler::GcnLgs { model: need_scalar()?, reuse: true },
                "gcn-lgs-it" => SimScheduler::GcnLgsIt { model: need_scalar()? },
                "gcn-crs-v" => SimScheduler::GcnCrs {
                    model: need_scalar()?,
                    config: RolloutConfig {
                        branching: config.branching,
                        variant: CrsVariant::Vanilla,
                        ..Default::default()
                    },
                },
                "gcn-crs-e" => SimScheduler::GcnCrs {
                    model: need_scalar()?,
                    config: RolloutConfig {
                        branching: config.branching,
                        variant: CrsVariant::Enhanced,
                        ..Default::default()
                    },
                },
                "gcn-cgs" => SimScheduler::GcnCgsSearch {
                    model: models
                        .q
                        .as_ref()
                        .ok_or_else(|| anyhow::anyhow!("scheduler gcn-cgs needs models.q"))?,
                },
                other => match other.strip_prefix("lgs-").and_then(|n| n.parse().ok()) {
                    Some(n) => SimScheduler::LgsTruncated(n),
                    None => anyhow::bail!("unknown scheduler '{other}'"),
                },
            })
        })
        .collect()
}

fn load_label(load: LoadName) -> String {
    match load {
        LoadName::Oversaturated => "oversaturated".into(),
        LoadName::Lambda { value } => format!("lambda={value}"),
        LoadName::Utilization { value } => format!("{value}"),
        LoadName::InverseRatio { value } => format!("inv={value}"),
    }
}

pub fn run(ctx: Context) -> anyhow::Result<()> {
    let config: SimulateConfig = serde_json::from_str(&ctx.config_text)?;
    prepare_out_dir(&ctx.out, ctx.force)?;
    let mut manifest = ManifestBuilder::start("simulate", &ctx.config_text, ctx.seed);
    let models = LoadedModels::load(&config.models)?;

    struct Cell {
        network_seed: u64,
        instance: usize,
        mode: ModeName,
        load: LoadName,
        metrics: Vec<SimMetrics>,
    }

    let mut cells: Vec<(u64, usize, ModeName, LoadName)> = Vec::new();
    for n in 0..config.networks {
        let network_seed = subseed(ctx.seed, 400 + n as u64);
        for inst in 0..config.instances_per_network {
            for &mode in &config.modes {
                for &load in &config.loads {
                    cells.push((network_seed, inst, mode, load));
                }
            }
        }
    }

    let utility = match config.utility {
        UtilityName::MinQR => UtilityKind::MinQueueRate,
        UtilityName::QTimesR => UtilityKind::QueueTimesRate,
    };

    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(network_seed, instance, mode, load)| -> anyhow::Result<Cell> {
            let network = gen_network(
                config.users,
                config.area,
                config.link_radius,
                config.interf_radius,
                network_seed,
            );
            let schedulers = build_schedulers(&config.schedulers, &models, &config)?;
            let sim_config = SimConfig {
                slots: config.slots,
                channels: config.channels,
                mode: match mode {
                    ModeName::Single => ChannelMode::Single,
                    ModeName::Joint => ChannelMode::Joint,
                    ModeName::Sequential => ChannelMode::Sequential,
                },
                utility,
                load: match load {
                    LoadName::Oversaturated => LoadSpec::Oversaturated,
                    LoadName::Lambda { value } => LoadSpec::Lambda(value),
                    LoadName::Utilization { value } => LoadSpec::Utilization(value),
                    LoadName::InverseRatio { value } => LoadSpec::InverseRatio(value),
                },
                retain_prob: config.retain_prob,
                seed: subseed(network_seed, 900 + instance as u64),
            };
            let metrics = simulate(&network, &schedulers, &sim_config)?;
            Ok(Cell { network_seed, instance, mode, load, metrics })
        })
        .collect::<anyhow::Result<_>>()?;

    let mode_name = |m: ModeName| match m {
        ModeName::Single => "single",
        ModeName::Joint => "joint",
        ModeName::Sequential => "sequential",
    };

    let results_path = ctx.out.join("sim_results.csv");
    let mut csv = Csv::new(
        "sim-results",
        &["network_seed", "instance", "scheduler", "mode", "k", "load", "throughput", "median_backlog", "mean_ar", "rounds_mean"],
    );
    for cell in &results {
        let exact_utility: Option<f64> = cell
            .metrics
            .iter()
            .find(|m| m.scheduler == "exact")
            .map(|m| m.mean_slot_utility);
        for m in &cell.metrics {
            let mean_ar = exact_utility
                .filter(|&e| e > 0.0)
                .map(|e| field(m.mean_slot_utility / e))
                .unwrap_or_default();
            csv.row(&[
                field(cell.network_seed),
                field(cell.instance),
                m.scheduler.clone(),
                mode_name(cell.mode).into(),
                field(config.channels),
                load_label(cell.load),
                field(m.throughput),
                field(m.median_backlog),
                mean_ar,
                field(m.mean_rounds),
            ]);
        }
    }
    csv.write(&results_path)?;
    manifest.record(&results_path);

    if ctx.svg {
        // eCDF of normalized per-instance throughput vs the exact scheduler
        let mut series = Vec::new();
        for name in &config.schedulers {
            if name == "exact" {
                continue;
            }
            let mut ratios: Vec<f64> = results
                .iter()
                .filter_map(|cell| {
                    let exact = cell.metrics.iter().find(|m| m.scheduler == "exact")?;
                    let mine = cell.metrics.iter().find(|m| &m.scheduler == name)?;
                    (exact.throughput > 0.0).then(|| mine.throughput / exact.throughput)
                })
                .collect();
            ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if ratios.is_empty() {
                continue;
            }
            let n = ratios.len() as f64;
            let points: Vec<(f64, f64)> =
                ratios.iter().enumerate().map(|(i, &r)| (r, (i + 1) as f64 / n)).collect();
            series.push((name.clone(), points));
        }
        if !series.is_empty() {
            let svg_path = ctx.out.join("throughput_ecdf.svg");
            std::fs::write(&svg_path, curves_svg("normalized throughput eCDF", &series))?;
            manifest.record(&svg_path);
        }
    }
    manifest.finish(&ctx.out)?;
    println!("simulated {} cells x {} schedulers", results.len(), config.schedulers.len());
    Ok(())
}
