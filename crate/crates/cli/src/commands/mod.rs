pub mod eval;
pub mod exact;
pub mod gen_data;
pub mod simulate;
pub mod train;

use std::path::Path;

use anyhow::Context as _;
use linksched_core::graph::{gen_ba, gen_er, load_graph, ConflictGraph, VertexWeights};
use linksched_core::rng::subseed;

use crate::config::{DatasetSpec, Family};

/// One test/training instance with a stable name.
pub struct Instance {
    pub name: String,
    pub graph: ConflictGraph,
    pub weights: VertexWeights,
}

/// Deterministic file/instance name for a dataset cell member.
pub fn cell_name(family: Family, v: usize, degree: f64, index: usize) -> String {
    let fam = match family {
        Family::Er => "er",
        Family::Ba => "ba",
    };
    format!("{fam}_v{v}_d{degree}_{index:04}")
}

/// Generates the dataset grid deterministically from the master seed. Cells
/// are sizes x degrees plus, for ER, sizes x direct edge probabilities.
pub fn generate_instances(spec: &DatasetSpec, seed: u64) -> anyhow::Result<Vec<Instance>> {
    if !spec.probs.is_empty() && spec.family != Family::Er {
        anyhow::bail!("edge probabilities only apply to the er family");
    }
    if spec.degrees.is_empty() && spec.probs.is_empty() {
        anyhow::bail!("dataset spec needs degrees or probs");
    }
    let mut out = Vec::new();
    let mut cell = 0u64;
    let mut emit = |v: usize, p: f64, degree_label: f64, cell: u64| -> anyhow::Result<()> {
        for index in 0..spec.count_per_cell {
            let gseed = subseed(seed, cell * 1_000_003 + index as u64);
            let graph = match spec.family {
                Family::Er => gen_er(v, p, gseed),
                Family::Ba => {
                    let m = (degree_label.round() as usize).clamp(1, v.saturating_sub(1).max(1));
                    gen_ba(v, m, gseed)?
                }
            };
            let weights = VertexWeights::uniform(v, subseed(gseed, 17));
            out.push(Instance { name: cell_name(spec.family, v, degree_label, index), graph, weights });
        }
        Ok(())
    };
    for &v in &spec.sizes {
        for &degree in &spec.degrees {
            let p = if v > 1 { (degree / (v - 1) as f64).clamp(0.0, 1.0) } else { 0.0 };
            emit(v, p, degree, cell)?;
            cell += 1;
        }
        for &p in &spec.probs {
            emit(v, p, p * (v.saturating_sub(1)) as f64, cell)?;
            cell += 1;
        }
    }
    Ok(out)
}

/// Loads every `*.json` graph in a directory, sorted by file name.
pub fn load_dataset(dir: &Path) -> anyhow::Result<Vec<Instance>> {
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read dataset dir {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().is_some_and(|n| n != "manifest.json")
        })
        .collect();
    names.sort();
    if names.is_empty() {
        anyhow::bail!("no graph files in {}", dir.display());
    }
    names
        .into_iter()
        .map(|path| {
            let (graph, weights) =
                load_graph(&path).with_context(|| format!("loading {}", path.display()))?;
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            Ok(Instance { name, graph, weights })
        })
        .collect()
}
