use linksched_core::graph::save_graph;

use crate::config::GenDataConfig;
use crate::manifest::{prepare_out_dir, ManifestBuilder};
use crate::Context;

pub fn run(ctx: Context) -> anyhow::Result<()> {
    let config: GenDataConfig = serde_json::from_str(&ctx.config_text)?;
    prepare_out_dir(&ctx.out, ctx.force)?;
    let mut manifest = ManifestBuilder::start("gen-data", &ctx.config_text, ctx.seed);
    let instances = super::generate_instances(&config.spec, ctx.seed)?;
    for inst in &instances {
        let path = ctx.out.join(format!("{}.json", inst.name));
        save_graph(&path, &inst.graph, &inst.weights)?;
        manifest.record(&path);
    }
    manifest.finish(&ctx.out)?;
    println!("wrote {} graphs to {}", instances.len(), ctx.out.display());
    Ok(())
}
