//! End-to-end runs of the linksched binary against temp directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linksched"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Non-manifest files of a directory, name -> bytes.
fn dir_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect()
}

#[test]
fn gen_data_zero_count_writes_manifest_only() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "c.json",
        r#"{"family":"er","sizes":[10],"degrees":[3],"count_per_cell":0}"#,
    );
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["gen-data", "--config"]).arg(&config).arg("--out").arg(&out_dir));
    let entries: Vec<_> = std::fs::read_dir(&out_dir).unwrap().collect();
    assert_eq!(entries.len(), 1);
    assert!(out_dir.join("manifest.json").exists());
}

#[test]
fn gen_data_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "c.json",
        r#"{"family":"ba","sizes":[12,20],"degrees":[2,3],"count_per_cell":3}"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(bin().args(["gen-data", "--seed", "7", "--config"]).arg(&config).arg("--out").arg(&a));
    run_ok(bin().args(["gen-data", "--seed", "7", "--config"]).arg(&config).arg("--out").arg(&b));
    let (sa, sb) = (dir_snapshot(&a), dir_snapshot(&b));
    assert_eq!(sa.len(), 2 * 2 * 3);
    assert_eq!(sa, sb);
}

#[test]
fn gen_data_refuses_to_overwrite_without_force() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "c.json",
        r#"{"family":"er","sizes":[8],"degrees":[2],"count_per_cell":1}"#,
    );
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["gen-data", "--config"]).arg(&config).arg("--out").arg(&out_dir));
    let second = bin()
        .args(["gen-data", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(1), "non-empty out dir should be a usage error");
    run_ok(bin().args(["gen-data", "--force", "--config"]).arg(&config).arg("--out").arg(&out_dir));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = bin().args(["gen-data", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

fn make_dataset(tmp: &Path, name: &str, body: &str, seed: &str) -> PathBuf {
    let config = write_config(tmp, &format!("{name}.json"), body);
    let dir = tmp.join(name);
    run_ok(bin().args(["gen-data", "--seed", seed, "--config"]).arg(&config).arg("--out").arg(&dir));
    dir
}

#[test]
fn train_epochs_zero_saves_initial_model_and_resume_reproduces_gamma() {
    let tmp = tempfile::tempdir().unwrap();
    let data = make_dataset(
        tmp.path(),
        "data",
        r#"{"family":"er","sizes":[15,25],"degrees":[4],"count_per_cell":10}"#,
        "3",
    );
    let train_body = |epochs: usize, init: &str| {
        format!(
            r#"{{"trainer":"dpg","dataset":"{}","arch":{{"dims":[1,1],"identity_start":true}},
                "alpha":0.05,"epochs":{epochs},"batch_size":8{init}}}"#,
            data.display()
        )
    };
    // epochs = 0: the initial model is saved as-is
    let c0 = write_config(tmp.path(), "t0.json", &train_body(0, ""));
    let out0 = tmp.path().join("t0");
    run_ok(bin().args(["train", "--seed", "5", "--config"]).arg(&c0).arg("--out").arg(&out0));
    let model0 = std::fs::read_to_string(out0.join("model.json")).unwrap();
    assert!(model0.contains("\"dims\":[1,1]"));
    let log0 = std::fs::read_to_string(out0.join("log.csv")).unwrap();
    assert_eq!(log0.lines().count(), 2); // schema comment + header, no rows

    // one epoch from the identity start
    let c1 = write_config(tmp.path(), "t1.json", &train_body(1, ""));
    let out1 = tmp.path().join("t1");
    run_ok(bin().args(["train", "--seed", "5", "--config"]).arg(&c1).arg("--out").arg(&out1));
    let log1 = std::fs::read_to_string(out1.join("log.csv")).unwrap();

    // resuming from the saved initial model reproduces the first-epoch gamma
    let c2 = write_config(tmp.path(), "t2.json", &train_body(1, ""));
    let out2 = tmp.path().join("t2");
    let init_path = out0.join("model.json");
    run_ok(
        bin()
            .args(["train", "--seed", "5", "--config"])
            .arg(&c2)
            .arg("--out")
            .arg(&out2)
            .arg("--init-model")
            .arg(&init_path),
    );
    let log2 = std::fs::read_to_string(out2.join("log.csv")).unwrap();
    assert_eq!(log1, log2, "resumed run must reproduce the first-epoch log");
}

#[test]
fn eval_scores_solvers_against_the_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "eval.json",
        r#"{
            "test_set": {"family":"er","sizes":[14,20],"degrees":[4],"count_per_cell":5},
            "solvers": ["cgs", "lgs", "lgs-2"]
        }"#,
    );
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["eval", "--seed", "2", "--config"]).arg(&config).arg("--out").arg(&out_dir));
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let mut per_instance: BTreeMap<(String, String), (f64, f64)> = BTreeMap::new();
    for line in results.lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        let (instance, solver) = (f[0].to_string(), f[1].to_string());
        let utility: f64 = f[4].parse().unwrap();
        let ar: f64 = f[9].parse().unwrap();
        assert!(ar > 0.0 && ar <= 1.0 + 1e-12, "ar {ar} out of range");
        per_instance.insert((solver, instance), (utility, ar));
    }
    // distinct weights: lgs and cgs agree per instance on utility and AR
    for ((solver, instance), &(utility, ar)) in per_instance.iter() {
        if solver == "cgs" {
            let lgs = per_instance.get(&("lgs".to_string(), instance.clone())).unwrap();
            assert_eq!((utility, ar), *lgs, "cgs and lgs rows differ on {instance}");
        }
    }
    assert!(out_dir.join("aggregate.csv").exists());
}

#[test]
fn eval_missing_model_is_explicit_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "eval.json",
        r#"{
            "test_set": {"family":"er","sizes":[10],"degrees":[3],"count_per_cell":2},
            "solvers": ["gcn-lgs"]
        }"#,
    );
    let out = bin()
        .args(["eval", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("models.scalar"));
}

#[test]
fn simulate_emits_replay_fair_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "sim.json",
        r#"{
            "networks": 2, "users": 30, "area": 60.0, "slots": 1,
            "modes": ["single"], "utility": "min-q-r",
            "loads": [{"kind":"oversaturated"}],
            "schedulers": ["cgs", "lgs"]
        }"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(bin().args(["simulate", "--seed", "4", "--config"]).arg(&config).arg("--out").arg(&a));
    run_ok(bin().args(["simulate", "--seed", "4", "--config"]).arg(&config).arg("--out").arg(&b));
    let csv_a = std::fs::read(a.join("sim_results.csv")).unwrap();
    let csv_b = std::fs::read(b.join("sim_results.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "identical seeds must give identical CSV bytes");
    let text = String::from_utf8(csv_a).unwrap();
    assert_eq!(text.lines().count(), 2 + 2 * 2, "one row per network x scheduler");
}

#[test]
fn simulate_three_channels_emits_both_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "sim3.json",
        r#"{
            "networks": 1, "users": 30, "area": 60.0, "slots": 3, "channels": 3,
            "modes": ["joint", "sequential"], "utility": "q-times-r",
            "loads": [{"kind":"utilization","value":0.5}],
            "schedulers": ["lgs"]
        }"#,
    );
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["simulate", "--seed", "6", "--config"]).arg(&config).arg("--out").arg(&out_dir));
    let text = std::fs::read_to_string(out_dir.join("sim_results.csv")).unwrap();
    let modes: Vec<&str> =
        text.lines().skip(2).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(modes, vec!["joint", "sequential"]);
}

#[test]
fn exact_prints_optimum_for_the_five_path() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = tmp.path().join("p5.json");
    std::fs::write(
        &graph,
        r#"{"v":5,"edges":[[0,1],[1,2],[2,3],[3,4]],"weights":[0.1,0.2,0.3,0.4,0.5]}"#,
    )
    .unwrap();
    let out = run_ok(bin().arg("exact").arg(&graph));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("value 0.9"), "{text}");
    assert!(text.contains("set {0,2,4}"), "{text}");
    assert!(text.contains("optimal true"), "{text}");
}

#[test]
fn exact_handles_empty_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = tmp.path().join("empty.json");
    std::fs::write(&graph, r#"{"v":0,"edges":[],"weights":[]}"#).unwrap();
    let out = run_ok(bin().arg("exact").arg(&graph));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("value 0"), "{text}");
    assert!(text.contains("set {}"), "{text}");
}

#[test]
fn exact_matches_enumeration_on_a_random_instance() {
    use linksched_core::graph::{gen_er, save_graph, VertexWeights};
    use linksched_core::greedy::utility_of;
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_er(18, 0.3, 91);
    let w = VertexWeights::uniform(18, 92);
    let path = tmp.path().join("g18.json");
    save_graph(&path, &g, &w).unwrap();
    let out = run_ok(bin().arg("exact").arg(&path));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("value "))
        .unwrap()
        .parse()
        .unwrap();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << 18) {
        let set: Vec<usize> = (0..18).filter(|&i| mask >> i & 1 == 1).collect();
        if g.is_independent_set(&set) {
            best = best.max(utility_of(&w, &set));
        }
    }
    assert!((value - best).abs() < 1e-9, "cli {value} vs enumeration {best}");
}
