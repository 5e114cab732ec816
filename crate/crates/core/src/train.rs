//! Trainers for the embedding models.
//!
//! The main scheme is a deterministic policy gradient through the
//! non-differentiable solver pipeline: the reward is the utility ratio of the
//! GCN-guided solution over the plain greedy solution, and the gradient
//! estimator credits each selected vertex with the whole reward,
//! Xi <- Xi + alpha * gamma * grad(Psi) v_hat. A supervised cross-entropy
//! trainer covers the multi-column tree-search head, and a small
//! finite-horizon Q-learning loop covers the greedy-search head.

use std::collections::VecDeque;
use std::sync::Arc;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::distributed::FeatureKind;
use crate::gcn::{
    backward, forward, forward_crts_with_tape, ForwardTape, GcnError, GcnModel, LayerGrads,
    OutputKind,
};
use crate::graph::ConflictGraph;
use crate::greedy::{cgs, lgs, utility_of};
use crate::rng::{rng_from, subseed};
use crate::search::{gcn_crs, RolloutConfig, SearchError, SearchNode};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training dataset is empty")]
    EmptyDataset,
    #[error("validation split is empty; raise validation_fraction or dataset size")]
    EmptyValidation,
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("parameters became non-finite at epoch {0}")]
    NonFinite(usize),
    #[error("embedding overflowed to non-finite values; lower the learning rate")]
    NonFiniteEmbedding,
    #[error(transparent)]
    Gcn(#[from] GcnError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Which solver consumes the embedding when computing the reward.
#[derive(Debug, Clone)]
pub enum Downstream {
    /// v_hat = LGS(G, z * u); the default pipeline.
    Lgs,
    /// v_hat = rollout search with this configuration.
    Crs(RolloutConfig),
}

/// One reward evaluation: embedding, selected set, reward, and the tape
/// needed to push gradients back through the forward pass.
pub struct TrainSample {
    pub embedding: Vec<f64>,
    pub selected: Vec<usize>,
    pub reward: f64,
    pub tape: ForwardTape,
}

/// Runs the full reward pipeline once. Returns `None` (a skipped sample) when
/// the greedy reference has zero utility and the ratio is undefined.
pub fn compute_reward(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
    downstream: &Downstream,
    features: FeatureKind,
) -> Result<Option<TrainSample>, TrainError> {
    let x0 = features.build(graph, utilities);
    let (z, tape) = forward(graph, x0.view(), model)?;
    let z = z.scalar();
    if z.iter().any(|v| !v.is_finite()) {
        return Err(TrainError::NonFiniteEmbedding);
    }
    let reference = cgs(graph, utilities);
    if reference.utility == 0.0 {
        return Ok(None);
    }
    let selected = match downstream {
        Downstream::Lgs => {
            let w: Vec<f64> = z.iter().zip(utilities).map(|(a, b)| a * b).collect();
            lgs(graph, &w, None).solution
        }
        Downstream::Crs(cfg) => gcn_crs(graph, utilities, model, cfg)?.solution,
    };
    let reward = utility_of(utilities, &selected) / reference.utility;
    Ok(Some(TrainSample { embedding: z, selected, reward, tape }))
}

/// Mean over the batch of gamma_i * grad(v_hat_i^T z_i).
pub fn dpg_gradient(samples: &[TrainSample], model: &GcnModel) -> Result<Vec<LayerGrads>, TrainError> {
    let mut total = LayerGrads::zeros_like(model);
    if samples.is_empty() {
        return Ok(total);
    }
    let scale = 1.0 / samples.len() as f64;
    for sample in samples {
        let rows = sample.tape.output().nrows();
        let mut upstream = Array2::zeros((rows, 1));
        for &v in &sample.selected {
            upstream[(v, 0)] = 1.0;
        }
        let grads = backward(&sample.tape, model, upstream.view())?;
        LayerGrads::accumulate(&mut total, &grads, scale * sample.reward);
    }
    Ok(total)
}

/// One stochastic gradient ascent step on the batch; an empty batch (all
/// samples skipped) leaves the model unchanged.
pub fn dpg_step(samples: &[TrainSample], model: &mut GcnModel, alpha: f64) -> Result<(), TrainError> {
    let grads = dpg_gradient(samples, model)?;
    model.apply_step(&grads, alpha);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub alpha: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub validation_fraction: f64,
    pub seed: u64,
    /// Momentum coefficient; `None` is plain SGD. The accumulator is zeroed
    /// every `reset_period` epochs (the periodic gradient reset), which is a
    /// no-op for plain SGD.
    pub momentum: Option<f64>,
    pub reset_period: usize,
    /// Global L2 cap on the batch gradient. The reward-weighted ascent grows
    /// parameters without bound on deep models; capping the step keeps the
    /// trajectory finite so validation selection can harvest the best model.
    pub grad_clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.001,
            batch_size: 32,
            epochs: 25,
            validation_fraction: 0.05,
            seed: 0,
            momentum: None,
            reset_period: 1,
            grad_clip: None,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), TrainError> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(TrainError::BadConfig(format!("alpha {} outside [0, 1)", self.alpha)));
        }
        if self.batch_size == 0 {
            return Err(TrainError::BadConfig("batch_size must be >= 1".into()));
        }
        if self.reset_period == 0 {
            return Err(TrainError::BadConfig("reset_period must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub mean_train_gamma: f64,
    pub mean_val_gamma: f64,
    pub skipped: usize,
}

pub struct TrainOutcome {
    /// The parameters with the best validation reward seen at any update
    /// (never worse than the initial model's).
    pub model: GcnModel,
    pub log: Vec<EpochLog>,
    pub initial_val_gamma: f64,
    pub best_val_gamma: f64,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Mean reward of `model` on a fixed validation set.
fn validation_gamma(
    val: &[(usize, Vec<f64>)],
    graphs: &[ConflictGraph],
    model: &GcnModel,
    downstream: &Downstream,
    features: FeatureKind,
) -> Result<f64, TrainError> {
    let mut total = 0.0;
    let mut count = 0;
    for (gi, u) in val {
        if let Some(sample) = compute_reward(&graphs[*gi], u, model, downstream, features)? {
            total += sample.reward;
            count += 1;
        }
    }
    if count == 0 {
        return Err(TrainError::EmptyValidation);
    }
    Ok(total / count as f64)
}

/// Deterministic-policy-gradient training with per-update validation and
/// best-on-validation model selection. Fresh uniform(0,1) utilities are drawn
/// for every training pass over a graph; the validation utilities are drawn
/// once so scores stay comparable across updates.
pub fn dpg_train(
    graphs: &[ConflictGraph],
    initial: &GcnModel,
    config: &TrainConfig,
    downstream: &Downstream,
    features: FeatureKind,
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    if graphs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..graphs.len()).collect();
    let mut split_rng = rng_from(subseed(config.seed, 1));
    order.shuffle(&mut split_rng);
    let val_count = ((graphs.len() as f64 * config.validation_fraction).ceil() as usize).max(1);
    if val_count >= graphs.len() {
        return Err(TrainError::EmptyValidation);
    }
    let (val_idx, train_idx) = order.split_at(val_count);
    let val: Vec<(usize, Vec<f64>)> = val_idx
        .iter()
        .enumerate()
        .map(|(i, &gi)| {
            let u =
                crate::graph::VertexWeights::uniform(graphs[gi].vertex_count(), subseed(config.seed, 100 + i as u64));
            (gi, u.into_values())
        })
        .collect();

    let mut model = initial.clone();
    let initial_val = validation_gamma(&val, graphs, &model, downstream, features)?;
    let mut best = (initial_val, model.clone());
    let mut velocity = LayerGrads::zeros_like(&model);
    let mut weight_rng = rng_from(subseed(config.seed, 2));
    let mut log = Vec::with_capacity(config.epochs);
    let mut used_total = 0;
    let mut skipped_total = 0;

    for epoch in 0..config.epochs {
        let mut epoch_order = train_idx.to_vec();
        epoch_order.shuffle(&mut rng_from(subseed(config.seed, 1_000 + epoch as u64)));
        let mut gamma_sum = 0.0;
        let mut gamma_count = 0usize;
        let mut skipped = 0usize;
        let mut last_val = f64::NAN;
        for chunk in epoch_order.chunks(config.batch_size) {
            let mut batch = Vec::with_capacity(chunk.len());
            for &gi in chunk {
                let u = crate::graph::VertexWeights::uniform(
                    graphs[gi].vertex_count(),
                    weight_rng.random::<u64>(),
                );
                match compute_reward(&graphs[gi], &u, &model, downstream, features)? {
                    Some(sample) => {
                        gamma_sum += sample.reward;
                        gamma_count += 1;
                        batch.push(sample);
                    }
                    None => skipped += 1,
                }
            }
            let mut grads = dpg_gradient(&batch, &model)?;
            if let Some(cap) = config.grad_clip {
                let norm = grads
                    .iter()
                    .map(|g| {
                        g.d_theta0.iter().map(|x| x * x).sum::<f64>()
                            + g.d_theta1.iter().map(|x| x * x).sum::<f64>()
                    })
                    .sum::<f64>()
                    .sqrt();
                if norm > cap {
                    let s = cap / norm;
                    for g in grads.iter_mut() {
                        g.d_theta0.mapv_inplace(|x| x * s);
                        g.d_theta1.mapv_inplace(|x| x * s);
                    }
                }
            }
            match config.momentum {
                Some(m) => {
                    for (v, g) in velocity.iter_mut().zip(&grads) {
                        v.d_theta0.mapv_inplace(|x| x * m);
                        v.d_theta1.mapv_inplace(|x| x * m);
                        v.d_theta0 += &g.d_theta0;
                        v.d_theta1 += &g.d_theta1;
                    }
                    model.apply_step(&velocity, config.alpha);
                }
                None => model.apply_step(&grads, config.alpha),
            }
            if !model.is_finite() {
                return Err(TrainError::NonFinite(epoch));
            }
            last_val = validation_gamma(&val, graphs, &model, downstream, features)?;
            if last_val > best.0 {
                best = (last_val, model.clone());
            }
        }
        if config.momentum.is_some() && (epoch + 1) % config.reset_period == 0 {
            velocity = LayerGrads::zeros_like(&model);
        }
        used_total += gamma_count;
        skipped_total += skipped;
        log.push(EpochLog {
            epoch,
            mean_train_gamma: if gamma_count > 0 { gamma_sum / gamma_count as f64 } else { f64::NAN },
            mean_val_gamma: last_val,
            skipped,
        });
    }

    Ok(TrainOutcome {
        model: best.1,
        best_val_gamma: best.0,
        initial_val_gamma: initial_val,
        log,
        samples_used: used_total,
        samples_skipped: skipped_total,
    })
}

/// Label vector for supervised tree-search training: the indicator of the
/// greedy solution.
pub fn crts_label(graph: &ConflictGraph, utilities: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; graph.vertex_count()];
    for v in cgs(graph, utilities).solution {
        y[v] = 1.0;
    }
    y
}

/// Probability clamp applied before the cross-entropy logs.
pub const CRTS_CLAMP: f64 = 1e-7;

pub struct CrtsExample<'a> {
    pub graph: &'a ConflictGraph,
    pub utilities: &'a [f64],
    pub labels: &'a [f64],
}

fn cross_entropy(y: f64, z: f64) -> f64 {
    let z = z.clamp(CRTS_CLAMP, 1.0 - CRTS_CLAMP);
    -(y * z.ln() + (1.0 - y) * (1.0 - z).ln())
}

/// Hindsight loss for one example: the minimum over columns of the mean
/// cross entropy against the labels, plus the argmin column.
pub fn crts_loss(z: &ndarray::Array2<f64>, labels: &[f64]) -> (f64, usize) {
    let v = labels.len() as f64;
    let mut best = (f64::INFINITY, 0);
    for b in 0..z.ncols() {
        let col_loss: f64 =
            labels.iter().zip(z.column(b)).map(|(&y, &p)| cross_entropy(y, p)).sum::<f64>() / v;
        if col_loss < best.0 {
            best = (col_loss, b);
        }
    }
    best
}

/// One gradient-descent step on the min-over-columns mean cross entropy;
/// only the argmin column of each example receives gradient. Returns the
/// mean loss over the batch.
pub fn crts_supervised_step(
    batch: &[CrtsExample],
    model: &mut GcnModel,
    alpha: f64,
) -> Result<f64, TrainError> {
    let branches = match model.output_kind() {
        OutputKind::CrtsLogits { branches } => branches,
        other => {
            return Err(TrainError::Gcn(GcnError::WrongKind { expected: "crts-logits", got: other }))
        }
    };
    if batch.is_empty() {
        return Ok(0.0);
    }
    let mut total = LayerGrads::zeros_like(model);
    let mut loss_sum = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for ex in batch {
        let (z, tape) = forward_crts_with_tape(ex.graph, ex.utilities, model)?;
        let (loss, col) = crts_loss(z.matrix(), ex.labels);
        loss_sum += loss;
        let rows = ex.labels.len();
        let mut upstream = Array2::zeros((rows, 2 * branches));
        for (v, &y) in ex.labels.iter().enumerate() {
            let p = z.matrix()[(v, col)];
            // clamp is active outside [eps, 1-eps]; no gradient flows there
            if !(CRTS_CLAMP..=1.0 - CRTS_CLAMP).contains(&p) {
                continue;
            }
            upstream[(v, 2 * col)] = (-y / p + (1.0 - y) / (1.0 - p)) / rows as f64;
        }
        let grads = backward(&tape, model, upstream.view())?;
        LayerGrads::accumulate(&mut total, &grads, scale);
    }
    model.apply_step(&total, -alpha);
    Ok(loss_sum * scale)
}

/// Exploration rate after `t` episodes: max(floor, decay^t), starting at 1.
pub fn epsilon_at(t: usize, floor: f64, decay: f64) -> f64 {
    floor.max(decay.powf(t as f64))
}

#[derive(Debug, Clone)]
pub struct DqnConfig {
    pub episodes: usize,
    pub alpha: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub epsilon_floor: f64,
    pub epsilon_decay: f64,
    /// Replay updates after each episode.
    pub updates_per_episode: usize,
    pub seed: u64,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            episodes: 200,
            alpha: 0.001,
            batch_size: 32,
            buffer_capacity: 10_000,
            epsilon_floor: 0.05,
            epsilon_decay: 0.999,
            updates_per_episode: 4,
            seed: 0,
        }
    }
}

/// One step of an episode: state and successor as residual masks over the
/// episode graph, the chosen vertex, and the terminal-only reward.
pub(crate) struct Transition {
    graph_idx: usize,
    utilities: Arc<Vec<f64>>,
    state: Vec<bool>,
    action: usize,
    reward: f64,
    next: Vec<bool>,
    done: bool,
}

/// Bounded FIFO of transitions.
pub struct ReplayBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayBuffer { items: VecDeque::new(), capacity }
    }

    fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Runs one epsilon-greedy episode, returning its transitions. The reward is
/// zero on non-terminal steps and the greedy utility ratio at the terminal.
pub(crate) fn run_episode(
    graph: &ConflictGraph,
    graph_idx: usize,
    utilities: Arc<Vec<f64>>,
    model: &GcnModel,
    epsilon: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Vec<Transition>, TrainError> {
    let reference = cgs(graph, &utilities);
    let mut node = SearchNode::root(graph);
    let mut transitions = Vec::new();
    while !node.is_terminal() {
        let (sub, map) = graph.induced_subgraph(node.residual_mask());
        let action = if rng.random::<f64>() < epsilon {
            map[rng.random_range(0..map.len())]
        } else {
            let u_sub: Vec<f64> = map.iter().map(|&v| utilities[v]).collect();
            let (z, _) = forward(&sub, crate::gcn::features_column(&u_sub).view(), model)?;
            let z = z.scalar();
            let best = (0..map.len())
                .max_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap().then(map[b].cmp(&map[a])))
                .unwrap();
            map[best]
        };
        let child = node.expand(graph, action)?;
        let done = child.is_terminal();
        let reward = if done {
            if reference.utility == 0.0 {
                1.0
            } else {
                utility_of(&utilities, child.partial_solution()) / reference.utility
            }
        } else {
            0.0
        };
        transitions.push(Transition {
            graph_idx,
            utilities: Arc::clone(&utilities),
            state: node.residual_mask().to_vec(),
            action,
            reward,
            next: child.residual_mask().to_vec(),
            done,
        });
        node = child;
    }
    Ok(transitions)
}

fn q_values(graph: &ConflictGraph, mask: &[bool], u: &[f64], model: &GcnModel) -> Result<(Vec<f64>, Vec<usize>), TrainError> {
    let (sub, map) = graph.induced_subgraph(mask);
    let u_sub: Vec<f64> = map.iter().map(|&v| u[v]).collect();
    let (z, _) = forward(&sub, crate::gcn::features_column(&u_sub).view(), model)?;
    Ok((z.scalar(), map))
}

/// Finite-horizon Q-learning (discount 1.0) for the greedy-search head.
pub fn dqn_train(
    graphs: &[ConflictGraph],
    initial: &GcnModel,
    config: &DqnConfig,
) -> Result<(GcnModel, Vec<f64>), TrainError> {
    if initial.output_kind() != OutputKind::QValues {
        return Err(TrainError::Gcn(GcnError::WrongKind {
            expected: "q-values",
            got: initial.output_kind(),
        }));
    }
    if graphs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut model = initial.clone();
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);
    let mut rng = rng_from(subseed(config.seed, 7));
    let mut episode_rewards = Vec::with_capacity(config.episodes);

    for episode in 0..config.episodes {
        let gi = episode % graphs.len();
        let u = Arc::new(
            crate::graph::VertexWeights::uniform(graphs[gi].vertex_count(), rng.random::<u64>())
                .into_values(),
        );
        let eps = epsilon_at(episode, config.epsilon_floor, config.epsilon_decay);
        let transitions = run_episode(&graphs[gi], gi, u, &model, eps, &mut rng)?;
        episode_rewards.push(transitions.last().map_or(1.0, |t| t.reward));
        for t in transitions {
            buffer.push(t);
        }
        for _ in 0..config.updates_per_episode {
            if buffer.is_empty() {
                break;
            }
            let n = config.batch_size.min(buffer.len());
            let mut total = LayerGrads::zeros_like(&model);
            for _ in 0..n {
                let t = &buffer.items[rng.random_range(0..buffer.len())];
                let g = &graphs[t.graph_idx];
                let (q, map) = q_values(g, &t.state, &t.utilities, &model)?;
                let pos = map.binary_search(&t.action).expect("action was residual");
                let target = if t.done {
                    t.reward
                } else {
                    let (qn, _) = q_values(g, &t.next, &t.utilities, &model)?;
                    t.reward + qn.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
                };
                let err = q[pos] - target;
                let mut upstream = Array2::zeros((map.len(), 1));
                upstream[(pos, 0)] = 2.0 * err / n as f64;
                // re-run forward to get a tape for this state
                let u_sub: Vec<f64> = map.iter().map(|&v| t.utilities[v]).collect();
                let (sub, _) = g.induced_subgraph(&t.state);
                let (_, tape) = forward(&sub, crate::gcn::features_column(&u_sub).view(), &model)?;
                let grads = backward(&tape, &model, upstream.view())?;
                LayerGrads::accumulate(&mut total, &grads, 1.0);
            }
            model.apply_step(&total, -config.alpha);
            if !model.is_finite() {
                return Err(TrainError::NonFinite(episode));
            }
        }
    }
    Ok((model, episode_rewards))
}
