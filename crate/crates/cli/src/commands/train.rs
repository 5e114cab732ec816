use std::path::PathBuf;

use anyhow::Context as _;
use linksched_core::distributed::FeatureKind;
use linksched_core::gcn::{load_model, save_model, GcnModel, ModelArch, OutputKind};
use linksched_core::graph::ConflictGraph;
use linksched_core::train::{
    crts_label, crts_supervised_step, dpg_train, dqn_train, CrtsExample, Downstream, DqnConfig,
    TrainConfig,
};

use crate::config::{FeatureName, TrainCommandConfig, TrainerKind};
use crate::manifest::{prepare_out_dir, ManifestBuilder};
use crate::output::{field, Csv};
use crate::Context;

fn feature_kind(name: FeatureName) -> FeatureKind {
    match name {
        FeatureName::Ones => FeatureKind::Ones,
        FeatureName::Utilities => FeatureKind::Utilities,
        FeatureName::Degree => FeatureKind::Degree,
    }
}

fn initial_model(config: &TrainCommandConfig, seed: u64) -> anyhow::Result<GcnModel> {
    if config.arch.identity_start {
        anyhow::ensure!(
            config.arch.dims == [1, 1] && config.trainer == TrainerKind::Dpg,
            "identity start needs a 1-layer scalar model"
        );
        return Ok(GcnModel::identity_scalar());
    }
    let kind = match config.trainer {
        TrainerKind::Dpg => OutputKind::ScalarEmbedding,
        TrainerKind::Dqn => OutputKind::QValues,
        TrainerKind::Crts => OutputKind::CrtsLogits { branches: config.branches },
    };
    let arch = if config.arch.mlp { ModelArch::VertexMlp } else { ModelArch::Gcn };
    Ok(GcnModel::glorot_arch(&config.arch.dims, config.arch.slope, kind, arch, seed))
}

pub fn run(ctx: Context, init_override: Option<PathBuf>) -> anyhow::Result<()> {
    let config: TrainCommandConfig = serde_json::from_str(&ctx.config_text)?;
    prepare_out_dir(&ctx.out, ctx.force)?;
    let mut manifest = ManifestBuilder::start("train", &ctx.config_text, ctx.seed);
    let dataset = super::load_dataset(std::path::Path::new(&config.dataset))?;
    let graphs: Vec<ConflictGraph> = dataset.into_iter().map(|i| i.graph).collect();

    let init = match init_override.or_else(|| config.init_model.clone().map(PathBuf::from)) {
        Some(path) => load_model(&path).with_context(|| format!("loading {}", path.display()))?,
        None => initial_model(&config, ctx.seed)?,
    };

    let model_path = ctx.out.join("model.json");
    let log_path = ctx.out.join("log.csv");
    match config.trainer {
        TrainerKind::Dpg => {
            let train_config = TrainConfig {
                alpha: config.alpha,
                batch_size: config.batch_size,
                epochs: config.epochs,
                validation_fraction: config.validation_fraction,
                seed: ctx.seed,
                momentum: config.momentum,
                reset_period: config.reset_period,
                grad_clip: config.grad_clip,
            };
            let outcome = dpg_train(
                &graphs,
                &init,
                &train_config,
                &Downstream::Lgs,
                feature_kind(config.features),
            )?;
            anyhow::ensure!(outcome.model.is_finite(), "trained parameters are not finite");
            save_model(&outcome.model, &model_path)?;
            let mut csv = Csv::new("train-log", &["epoch", "mean_train_gamma", "mean_val_gamma", "skipped"]);
            for row in &outcome.log {
                csv.row(&[
                    field(row.epoch),
                    field(row.mean_train_gamma),
                    field(row.mean_val_gamma),
                    field(row.skipped),
                ]);
            }
            csv.write(&log_path)?;
            println!(
                "dpg: initial val gamma {:.4}, best val gamma {:.4}",
                outcome.initial_val_gamma, outcome.best_val_gamma
            );
        }
        TrainerKind::Crts => {
            let mut model = init;
            let mut csv = Csv::new("train-log-crts", &["epoch", "mean_train_loss"]);
            let labels: Vec<(usize, Vec<f64>, Vec<f64>)> = graphs
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let u = linksched_core::graph::VertexWeights::uniform(
                        g.vertex_count(),
                        linksched_core::rng::subseed(ctx.seed, 300 + i as u64),
                    )
                    .into_values();
                    let y = crts_label(g, &u);
                    (i, u, y)
                })
                .collect();
            for epoch in 0..config.epochs {
                let mut loss_sum = 0.0;
                let mut batches = 0;
                for chunk in labels.chunks(config.batch_size) {
                    let examples: Vec<CrtsExample> = chunk
                        .iter()
                        .map(|(i, u, y)| CrtsExample { graph: &graphs[*i], utilities: u, labels: y })
                        .collect();
                    loss_sum += crts_supervised_step(&examples, &mut model, config.alpha)?;
                    batches += 1;
                }
                anyhow::ensure!(model.is_finite(), "parameters became non-finite at epoch {epoch}");
                csv.row(&[field(epoch), field(loss_sum / batches.max(1) as f64)]);
            }
            save_model(&model, &model_path)?;
            csv.write(&log_path)?;
        }
        TrainerKind::Dqn => {
            let dqn_config = DqnConfig {
                episodes: config.episodes,
                alpha: config.alpha,
                batch_size: config.batch_size,
                seed: ctx.seed,
                ..Default::default()
            };
            let (model, rewards) = dqn_train(&graphs, &init, &dqn_config)?;
            anyhow::ensure!(model.is_finite(), "trained parameters are not finite");
            save_model(&model, &model_path)?;
            let mut csv = Csv::new("train-log-dqn", &["episode", "terminal_reward"]);
            for (i, r) in rewards.iter().enumerate() {
                csv.row(&[field(i), field(*r)]);
            }
            csv.write(&log_path)?;
        }
    }
    manifest.record(&model_path);
    manifest.record(&log_path);
    manifest.finish(&ctx.out)?;
    Ok(())
}
