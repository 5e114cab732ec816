use std::path::Path;
use std::time::Duration;

use linksched_core::exact::{mwis_exact, ExactBudget};
use linksched_core::graph::load_graph;

pub fn run(graph_path: &Path, node_limit: u64, time_limit: f64) -> anyhow::Result<()> {
    let (graph, weights) = load_graph(graph_path)?;
    let budget =
        ExactBudget { node_limit, time_limit: Duration::from_secs_f64(time_limit) };
    let r = mwis_exact(&graph, &weights, budget);
    if !r.optimal {
        eprintln!("warning: budget exhausted after {} nodes; result may be suboptimal", r.nodes);
    }
    let set: Vec<String> = r.result.solution.iter().map(|v| v.to_string()).collect();
    println!("value {}", r.result.utility);
    println!("set {{{}}}", set.join(","));
    println!("optimal {}", r.optimal);
    Ok(())
}
