//! Graph convolutional network: layer rule X^l = sigma(X^{l-1} T0 + L X^{l-1} T1)
//! on the normalized Laplacian, with dense and per-vertex (message-passing)
//! forward paths, exact reverse-mode parameter gradients, and JSON
//! serialization. No biases, no global normalizations, so every output can be
//! computed locally at a vertex from neighbor exchanges.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ConflictGraph, NormalizedLaplacian};
use crate::rng::rng_from;

#[derive(Debug, Error)]
pub enum GcnError {
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    Shape { context: &'static str, expected: String, got: String },
    #[error("model output kind {got:?} not usable here (need {expected})")]
    WrongKind { expected: &'static str, got: OutputKind },
    #[error("layer dimensions do not chain at layer {0}")]
    BrokenChain(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("unsupported model file version {0}")]
    Version(u32),
    #[error("model file field {field}: {message}")]
    Malformed { field: &'static str, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("model file does not parse: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Elementwise (or pairwise, for the 2B-logit head) activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    LeakyRelu(f64),
    Linear,
    /// Independent sigmoid per logit; the default pairing for 2B-logit heads.
    Sigmoid,
    /// Two-way softmax over consecutive logit pairs.
    PairSoftmax,
}

impl Activation {
    fn apply(&self, x: &mut Array2<f64>) {
        match *self {
            Activation::Linear => {}
            Activation::LeakyRelu(slope) => {
                x.mapv_inplace(|v| if v > 0.0 { v } else { slope * v })
            }
            Activation::Sigmoid => x.mapv_inplace(|v| 1.0 / (1.0 + (-v).exp())),
            Activation::PairSoftmax => {
                assert!(x.ncols().is_multiple_of(2), "pair softmax needs an even column count");
                for mut row in x.rows_mut() {
                    for b in 0..row.len() / 2 {
                        // exp(a)/(exp(a)+exp(b)) = sigmoid(a-b)
                        let p = 1.0 / (1.0 + (row[2 * b + 1] - row[2 * b]).exp());
                        row[2 * b] = p;
                        row[2 * b + 1] = 1.0 - p;
                    }
                }
            }
        }
    }

    fn apply_row(&self, row: &mut [f64]) {
        match *self {
            Activation::Linear => {}
            Activation::LeakyRelu(slope) => {
                for v in row {
                    if *v <= 0.0 {
                        *v *= slope;
                    }
                }
            }
            Activation::Sigmoid => {
                for v in row {
                    *v = 1.0 / (1.0 + (-*v).exp());
                }
            }
            Activation::PairSoftmax => {
                for b in 0..row.len() / 2 {
                    let p = 1.0 / (1.0 + (row[2 * b + 1] - row[2 * b]).exp());
                    row[2 * b] = p;
                    row[2 * b + 1] = 1.0 - p;
                }
            }
        }
    }

    /// Gradient through the activation, from post-activation values.
    fn backprop(&self, post: &Array2<f64>, upstream: &Array2<f64>) -> Array2<f64> {
        match *self {
            Activation::Linear => upstream.clone(),
            Activation::LeakyRelu(slope) => {
                let mut g = upstream.clone();
                g.zip_mut_with(post, |gv, &pv| {
                    if pv <= 0.0 {
                        *gv *= slope;
                    }
                });
                g
            }
            Activation::Sigmoid => {
                let mut g = upstream.clone();
                g.zip_mut_with(post, |gv, &pv| *gv *= pv * (1.0 - pv));
                g
            }
            Activation::PairSoftmax => {
                let mut g = Array2::zeros(upstream.raw_dim());
                for r in 0..upstream.nrows() {
                    for b in 0..upstream.ncols() / 2 {
                        let p = post[(r, 2 * b)];
                        let s = p * (1.0 - p);
                        let diff = upstream[(r, 2 * b)] - upstream[(r, 2 * b + 1)];
                        g[(r, 2 * b)] = s * diff;
                        g[(r, 2 * b + 1)] = -s * diff;
                    }
                }
                g
            }
        }
    }
}

/// What the final layer's output means downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// g_L = 1: per-vertex scaling factor z.
    ScalarEmbedding,
    /// g_L = 1: per-vertex Q-value for greedy search.
    QValues,
    /// g_L = 2B: B pairs of logits, first of each pair kept as Z'.
    CrtsLogits { branches: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelArch {
    Gcn,
    /// Ablation: no Laplacian mixing, a per-vertex perceptron.
    VertexMlp,
}

#[derive(Debug, Clone)]
pub struct GcnLayer {
    pub theta0: Array2<f64>,
    pub theta1: Array2<f64>,
    pub activation: Activation,
}

#[derive(Debug, Clone)]
pub struct GcnModel {
    layers: Vec<GcnLayer>,
    output: OutputKind,
    arch: ModelArch,
}

impl GcnModel {
    pub fn new(layers: Vec<GcnLayer>, output: OutputKind) -> Result<Self, GcnError> {
        Self::with_arch(layers, output, ModelArch::Gcn)
    }

    pub fn with_arch(
        layers: Vec<GcnLayer>,
        output: OutputKind,
        arch: ModelArch,
    ) -> Result<Self, GcnError> {
        if layers.is_empty() {
            return Err(GcnError::Malformed { field: "layers", message: "empty".into() });
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.theta0.raw_dim() != layer.theta1.raw_dim() {
                return Err(GcnError::BrokenChain(i));
            }
            if i > 0 && layers[i - 1].theta0.ncols() != layer.theta0.nrows() {
                return Err(GcnError::BrokenChain(i));
            }
        }
        let g_l = layers.last().unwrap().theta0.ncols();
        let expected = match output {
            OutputKind::ScalarEmbedding | OutputKind::QValues => 1,
            OutputKind::CrtsLogits { branches } => 2 * branches,
        };
        if g_l != expected {
            return Err(GcnError::Shape {
                context: "output layer",
                expected: expected.to_string(),
                got: g_l.to_string(),
            });
        }
        Ok(Self { layers, output, arch })
    }

    /// Glorot-initialized model: hidden layers leaky-ReLU, final layer linear
    /// (scalar/Q outputs) or sigmoid (CRTS logit pairs).
    pub fn glorot(dims: &[usize], slope: f64, output: OutputKind, seed: u64) -> Self {
        Self::glorot_arch(dims, slope, output, ModelArch::Gcn, seed)
    }

    pub fn glorot_arch(
        dims: &[usize],
        slope: f64,
        output: OutputKind,
        arch: ModelArch,
        seed: u64,
    ) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let mut rng = rng_from(seed);
        let n_layers = dims.len() - 1;
        let layers = (0..n_layers)
            .map(|l| {
                let (rows, cols) = (dims[l], dims[l + 1]);
                let s = (6.0 / (rows + cols) as f64).sqrt();
                let mut draw = |zero: bool| {
                    Array2::from_shape_fn((rows, cols), |_| {
                        let v = rng.random_range(-s..s);
                        if zero {
                            0.0
                        } else {
                            v
                        }
                    })
                };
                let theta0 = draw(false);
                let theta1 = draw(arch == ModelArch::VertexMlp);
                let activation = if l + 1 == n_layers {
                    match output {
                        OutputKind::CrtsLogits { .. } => Activation::Sigmoid,
                        _ => Activation::Linear,
                    }
                } else {
                    Activation::LeakyRelu(slope)
                };
                GcnLayer { theta0, theta1, activation }
            })
            .collect();
        Self::with_arch(layers, output, arch).expect("generated dims chain")
    }

    /// One linear layer with T0 = 1, T1 = 0: the embedding equals the input
    /// feature, so untrained downstream solvers reduce to their baselines.
    pub fn identity_scalar() -> Self {
        let layer = GcnLayer {
            theta0: Array2::from_elem((1, 1), 1.0),
            theta1: Array2::from_elem((1, 1), 0.0),
            activation: Activation::Linear,
        };
        Self::new(vec![layer], OutputKind::ScalarEmbedding).unwrap()
    }

    pub fn layers(&self) -> &[GcnLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [GcnLayer] {
        &mut self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].theta0.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().theta0.ncols()
    }

    pub fn output_kind(&self) -> OutputKind {
        self.output
    }

    pub fn arch(&self) -> ModelArch {
        self.arch
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_dim()];
        dims.extend(self.layers.iter().map(|l| l.theta0.ncols()));
        dims
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.theta0.iter().all(|v| v.is_finite()) && l.theta1.iter().all(|v| v.is_finite()))
    }

    /// In-place parameter update: theta += scale * grad, per layer.
    pub fn apply_step(&mut self, grads: &[LayerGrads], scale: f64) {
        assert_eq!(grads.len(), self.layers.len());
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            layer.theta0.scaled_add(scale, &g.d_theta0);
            layer.theta1.scaled_add(scale, &g.d_theta1);
        }
    }
}

/// Per-layer parameter gradients.
#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub d_theta0: Array2<f64>,
    pub d_theta1: Array2<f64>,
}

impl LayerGrads {
    pub fn zeros_like(model: &GcnModel) -> Vec<LayerGrads> {
        model
            .layers
            .iter()
            .map(|l| LayerGrads {
                d_theta0: Array2::zeros(l.theta0.raw_dim()),
                d_theta1: Array2::zeros(l.theta1.raw_dim()),
            })
            .collect()
    }

    pub fn accumulate(total: &mut [LayerGrads], part: &[LayerGrads], scale: f64) {
        for (t, p) in total.iter_mut().zip(part) {
            t.d_theta0.scaled_add(scale, &p.d_theta0);
            t.d_theta1.scaled_add(scale, &p.d_theta1);
        }
    }
}

/// Intermediate features recorded during a forward pass, enough to run the
/// exact backward pass without touching the graph again.
pub struct ForwardTape {
    /// X^0 .. X^L.
    features: Vec<Array2<f64>>,
    /// L X^{l-1} per layer (zeros for per-vertex MLP models).
    lx: Vec<Array2<f64>>,
    laplacian: Option<NormalizedLaplacian>,
}

impl ForwardTape {
    pub fn layer_count(&self) -> usize {
        self.lx.len()
    }

    pub fn output(&self) -> &Array2<f64> {
        self.features.last().unwrap()
    }
}

/// Output features of a forward pass: a V-vector (scalar kinds) or a V x B
/// matrix (CRTS kind, already reduced from the 2B logit pairs).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbedding {
    values: Array2<f64>,
}

impl NodeEmbedding {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn vertex_count(&self) -> usize {
        self.values.nrows()
    }

    pub fn columns(&self) -> usize {
        self.values.ncols()
    }

    /// The single column as a vector; panics when the embedding is not scalar.
    pub fn scalar(&self) -> Vec<f64> {
        assert_eq!(self.values.ncols(), 1, "embedding is not scalar");
        self.values.column(0).to_vec()
    }

    pub fn column(&self, b: usize) -> Array1<f64> {
        self.values.column(b).to_owned()
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        let n = values.len();
        Self { values: Array2::from_shape_vec((n, 1), values).unwrap() }
    }
}

/// Column-matrix view of a weight vector, the usual g0 = 1 input feature.
pub fn features_column(values: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap()
}

/// All-ones feature column (the featureless case).
pub fn features_ones(vertex_count: usize) -> Array2<f64> {
    Array2::ones((vertex_count, 1))
}

fn check_input(graph: &ConflictGraph, x0: &ArrayView2<f64>, model: &GcnModel) -> Result<(), GcnError> {
    if x0.nrows() != graph.vertex_count() {
        return Err(GcnError::Shape {
            context: "input rows",
            expected: graph.vertex_count().to_string(),
            got: x0.nrows().to_string(),
        });
    }
    if x0.ncols() != model.input_dim() {
        return Err(GcnError::Shape {
            context: "input columns",
            expected: model.input_dim().to_string(),
            got: x0.ncols().to_string(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(GcnError::NonFinite("input features"));
    }
    Ok(())
}

/// Full forward pass over the graph, recording a tape for [`backward`].
pub fn forward(
    graph: &ConflictGraph,
    x0: ArrayView2<f64>,
    model: &GcnModel,
) -> Result<(NodeEmbedding, ForwardTape), GcnError> {
    check_input(graph, &x0, model)?;
    let laplacian = match model.arch() {
        ModelArch::Gcn => Some(NormalizedLaplacian::new(graph)),
        ModelArch::VertexMlp => None,
    };
    let mut features = Vec::with_capacity(model.layer_count() + 1);
    let mut lx_all = Vec::with_capacity(model.layer_count());
    features.push(x0.to_owned());
    for layer in model.layers() {
        let x = features.last().unwrap();
        let lx = match &laplacian {
            Some(lap) => lap.apply(&x.view()),
            None => Array2::zeros((x.nrows(), x.ncols())),
        };
        let mut pre = x.dot(&layer.theta0);
        if laplacian.is_some() {
            pre += &lx.dot(&layer.theta1);
        }
        layer.activation.apply(&mut pre);
        lx_all.push(lx);
        features.push(pre);
    }
    let out = features.last().unwrap().clone();
    let embedding = NodeEmbedding { values: out };
    Ok((embedding, ForwardTape { features, lx: lx_all, laplacian }))
}

/// Forward pass computed purely from per-vertex neighbor exchanges: each
/// vertex aggregates its neighbors' previous-layer rows and applies its own
/// matmuls, with no global matrix operation. Agrees with [`forward`] to
/// floating-point reordering (<= 1e-12).
pub fn forward_local(
    graph: &ConflictGraph,
    x0: ArrayView2<f64>,
    model: &GcnModel,
) -> Result<NodeEmbedding, GcnError> {
    check_input(graph, &x0, model)?;
    let v = graph.vertex_count();
    let inv_sqrt: Vec<f64> = (0..v)
        .map(|x| {
            let d = graph.degree(x);
            if d == 0 {
                0.0
            } else {
                1.0 / (d as f64).sqrt()
            }
        })
        .collect();
    // rows[v] is the feature of vertex v available locally at v
    let mut rows: Vec<Vec<f64>> = (0..v).map(|r| x0.row(r).to_vec()).collect();
    for layer in model.layers() {
        let g_in = layer.theta0.nrows();
        let g_out = layer.theta0.ncols();
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(v);
        for vert in 0..v {
            // local aggregation: own row minus scaled neighbor rows, ascending
            let mut agg = rows[vert].clone();
            if model.arch() == ModelArch::Gcn {
                for &u in graph.neighbors(vert) {
                    let c = inv_sqrt[vert] * inv_sqrt[u];
                    for (a, b) in agg.iter_mut().zip(&rows[u]) {
                        *a -= c * b;
                    }
                }
            }
            let mut out = vec![0.0; g_out];
            for (j, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..g_in {
                    acc += rows[vert][i] * layer.theta0[(i, j)];
                }
                if model.arch() == ModelArch::Gcn {
                    for i in 0..g_in {
                        acc += agg[i] * layer.theta1[(i, j)];
                    }
                }
                *o = acc;
            }
            layer.activation.apply_row(&mut out);
            next.push(out);
        }
        rows = next;
    }
    let g_out = model.output_dim();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(NodeEmbedding { values: Array2::from_shape_vec((v, g_out), flat).unwrap() })
}

/// Exact reverse-mode gradients of sum(upstream . X^L) with respect to every
/// layer parameter.
pub fn backward(
    tape: &ForwardTape,
    model: &GcnModel,
    upstream: ArrayView2<f64>,
) -> Result<Vec<LayerGrads>, GcnError> {
    if tape.layer_count() != model.layer_count() {
        return Err(GcnError::Shape {
            context: "tape layers",
            expected: model.layer_count().to_string(),
            got: tape.layer_count().to_string(),
        });
    }
    let out = tape.output();
    if upstream.raw_dim() != out.raw_dim() {
        return Err(GcnError::Shape {
            context: "upstream gradient",
            expected: format!("{}x{}", out.nrows(), out.ncols()),
            got: format!("{}x{}", upstream.nrows(), upstream.ncols()),
        });
    }
    let mut grads = Vec::with_capacity(model.layer_count());
    let mut g_post = upstream.to_owned();
    for l in (0..model.layer_count()).rev() {
        let layer = &model.layers()[l];
        if tape.features[l].ncols() != layer.theta0.nrows() {
            return Err(GcnError::Shape {
                context: "tape features",
                expected: layer.theta0.nrows().to_string(),
                got: tape.features[l].ncols().to_string(),
            });
        }
        let post = &tape.features[l + 1];
        let g_pre = layer.activation.backprop(post, &g_post);
        let d_theta0 = tape.features[l].t().dot(&g_pre);
        let d_theta1 = tape.lx[l].t().dot(&g_pre);
        if l > 0 {
            let mut g_x = g_pre.dot(&layer.theta0.t());
            if let Some(lap) = &tape.laplacian {
                // L is symmetric, so the adjoint reuses the same operator
                let via = g_pre.dot(&layer.theta1.t());
                g_x += &lap.apply(&via.view());
            }
            g_post = g_x;
        }
        grads.push(LayerGrads { d_theta0, d_theta1 });
    }
    grads.reverse();
    Ok(grads)
}

/// CRTS head: forward on X0 = u' and extraction of the first element of each
/// logit pair into a V x B matrix with entries in [0, 1].
pub fn forward_crts(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
) -> Result<NodeEmbedding, GcnError> {
    forward_crts_with_tape(graph, utilities, model).map(|(z, _)| z)
}

/// CRTS forward that also returns the raw-network tape (V x 2B output) for
/// supervised training.
pub fn forward_crts_with_tape(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
) -> Result<(NodeEmbedding, ForwardTape), GcnError> {
    let branches = match model.output_kind() {
        OutputKind::CrtsLogits { branches } => branches,
        other => return Err(GcnError::WrongKind { expected: "crts-logits", got: other }),
    };
    let x0 = features_column(utilities);
    let (raw, tape) = forward(graph, x0.view(), model)?;
    let full = raw.matrix();
    let mut z = Array2::zeros((full.nrows(), branches));
    for b in 0..branches {
        z.column_mut(b).assign(&full.column(2 * b));
    }
    Ok((NodeEmbedding { values: z }, tape))
}

const MODEL_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LayerFile {
    theta0: Vec<Vec<f64>>,
    theta1: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    arch: Option<String>,
    dims: Vec<usize>,
    activations: Vec<String>,
    layers: Vec<LayerFile>,
}

fn activation_name(a: Activation) -> String {
    match a {
        Activation::Linear => "linear".into(),
        Activation::LeakyRelu(s) => format!("leaky-relu({s})"),
        Activation::Sigmoid => "sigmoid-pairs".into(),
        Activation::PairSoftmax => "pair-softmax".into(),
    }
}

fn parse_activation(s: &str) -> Result<Activation, GcnError> {
    if s == "linear" {
        return Ok(Activation::Linear);
    }
    if s == "sigmoid-pairs" || s == "sigmoid" {
        return Ok(Activation::Sigmoid);
    }
    if s == "pair-softmax" {
        return Ok(Activation::PairSoftmax);
    }
    if let Some(rest) = s.strip_prefix("leaky-relu(").and_then(|r| r.strip_suffix(')')) {
        let slope: f64 = rest
            .parse()
            .map_err(|_| GcnError::Malformed { field: "activations", message: format!("bad slope in '{s}'") })?;
        return Ok(Activation::LeakyRelu(slope));
    }
    Err(GcnError::Malformed { field: "activations", message: format!("unknown activation '{s}'") })
}

fn kind_name(kind: OutputKind) -> String {
    match kind {
        OutputKind::ScalarEmbedding => "scalar-embedding".into(),
        OutputKind::QValues => "q-values".into(),
        OutputKind::CrtsLogits { branches } => format!("crts-logits({branches})"),
    }
}

fn parse_kind(s: Option<&str>, g_l: usize) -> Result<OutputKind, GcnError> {
    match s {
        Some("scalar-embedding") => Ok(OutputKind::ScalarEmbedding),
        Some("q-values") => Ok(OutputKind::QValues),
        Some(other) => {
            if let Some(rest) = other.strip_prefix("crts-logits(").and_then(|r| r.strip_suffix(')')) {
                let branches = rest.parse().map_err(|_| GcnError::Malformed {
                    field: "kind",
                    message: format!("bad branch count in '{other}'"),
                })?;
                Ok(OutputKind::CrtsLogits { branches })
            } else {
                Err(GcnError::Malformed { field: "kind", message: format!("unknown kind '{other}'") })
            }
        }
        // Older files: infer from the output width.
        None if g_l == 1 => Ok(OutputKind::ScalarEmbedding),
        None if g_l.is_multiple_of(2) => Ok(OutputKind::CrtsLogits { branches: g_l / 2 }),
        None => Err(GcnError::Malformed {
            field: "kind",
            message: format!("cannot infer output kind from width {g_l}"),
        }),
    }
}

fn matrix_to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], r: usize, c: usize, field: &'static str) -> Result<Array2<f64>, GcnError> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(GcnError::Malformed { field, message: format!("expected {r}x{c} matrix") });
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Array2::from_shape_vec((r, c), flat).unwrap())
}

pub fn save_model(model: &GcnModel, path: impl AsRef<Path>) -> Result<(), GcnError> {
    let path = path.as_ref();
    let file = ModelFile {
        version: MODEL_FILE_VERSION,
        kind: Some(kind_name(model.output_kind())),
        arch: Some(match model.arch() {
            ModelArch::Gcn => "gcn".into(),
            ModelArch::VertexMlp => "vertex-mlp".into(),
        }),
        dims: model.dims(),
        activations: model.layers().iter().map(|l| activation_name(l.activation)).collect(),
        layers: model
            .layers()
            .iter()
            .map(|l| LayerFile { theta0: matrix_to_rows(&l.theta0), theta1: matrix_to_rows(&l.theta1) })
            .collect(),
    };
    let body = serde_json::to_string(&file)?;
    let mut f = fs::File::create(path)
        .map_err(|source| GcnError::Io { path: path.display().to_string(), source })?;
    f.write_all(body.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|source| GcnError::Io { path: path.display().to_string(), source })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GcnModel, GcnError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| GcnError::Io { path: path.display().to_string(), source })?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.version != MODEL_FILE_VERSION {
        return Err(GcnError::Version(file.version));
    }
    let n_layers = file.dims.len().saturating_sub(1);
    if n_layers == 0 || file.activations.len() != n_layers || file.layers.len() != n_layers {
        return Err(GcnError::Malformed {
            field: "dims",
            message: "dims, activations, and layers do not agree".into(),
        });
    }
    let mut layers = Vec::with_capacity(n_layers);
    for (l, lf) in file.layers.iter().enumerate() {
        let (r, c) = (file.dims[l], file.dims[l + 1]);
        layers.push(GcnLayer {
            theta0: rows_to_matrix(&lf.theta0, r, c, "theta0")?,
            theta1: rows_to_matrix(&lf.theta1, r, c, "theta1")?,
            activation: parse_activation(&file.activations[l])?,
        });
    }
    let g_l = *file.dims.last().unwrap();
    let kind = parse_kind(file.kind.as_deref(), g_l)?;
    let arch = match file.arch.as_deref() {
        None | Some("gcn") => ModelArch::Gcn,
        Some("vertex-mlp") => ModelArch::VertexMlp,
        Some(other) => {
            return Err(GcnError::Malformed { field: "arch", message: format!("unknown arch '{other}'") })
        }
    };
    GcnModel::with_arch(layers, kind, arch)
}
