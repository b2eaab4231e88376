use std::fs;
use std::path::Path;
use std::process::Command;

use qgraph::config::{parse_config, ExperimentSpec};
use qgraph::experiment::{
    run, BoundsTable, LocalizationSummary, MeanEntropySummary, StarAverageSummary, ENTROPY_COLUMNS,
    LOCALIZATION_COLUMNS, MEAN_ENTROPY_COLUMNS, PY_DENSITY_COLUMNS, PY_SAMPLE_COLUMNS, STAR_COLUMNS,
};
use qgraph::format::{load_graph, load_spectrum, read_csv};
use qgraph::Error;

fn spec(text: &str, out: &Path) -> ExperimentSpec {
    ExperimentSpec::from_text(&format!("{text}\noutput = {}\n", out.display())).unwrap()
}

fn config_err(text: &str) -> String {
    match ExperimentSpec::from_text(text) {
        Err(Error::Config(m)) => m,
        other => panic!("expected config error for {text:?}, got {other:?}"),
    }
}

fn assert_header(path: &Path, columns: &[&str]) {
    let t = read_csv(path).unwrap();
    assert_eq!(t.columns, columns, "{}", path.display());
    assert_eq!(t.meta("schema_version"), Some("1"));
    assert!(t.meta("spec_hash").is_some_and(|h| h.len() == 64));
    assert!(t.meta("code_version").is_some());
    assert!(!t.rows.is_empty());
}

#[test]
fn config_parsing() {
    let m = parse_config("kind = spectrum  # trailing\n\nn-eigen = 5\n# full line\n").unwrap();
    assert_eq!(m["kind"], "spectrum");
    assert_eq!(m["n_eigen"], "5");
    assert!(matches!(parse_config("a = 1\na = 2"), Err(Error::Config(_))));
    assert!(matches!(parse_config("no equals sign"), Err(Error::Config(_))));
}

#[test]
fn config_validation() {
    config_err("kind = spectrum\nsizes = 10\nn_eigen = 5\ncolour = red");
    config_err("kind = nonsense\nsizes = 10\nn_eigen = 5");
    config_err("kind = spectrum\nn_eigen = 5");
    config_err("kind = spectrum\nsizes = 10");
    config_err("kind = spectrum\nsizes = 10\nk_min = 3\nk_max = 2");
    config_err("kind = spectrum\nsizes = 10\nn_eigen = 5\ntol = 0.1");
    // odd vertex count with odd degree
    config_err("kind = spectrum\nsizes = 11\nn_eigen = 5");
    // degree - 1 = 8 is not prime
    config_err("kind = spectrum\nsizes = 12\ndegree = 9\nboundary = equitransmitting\nn_eigen = 5");
    config_err("kind = star-average\nsizes = 10\nn_eigen = 5");
    config_err("kind = star-average\nfamily = star\nboundary = equitransmitting\nsizes = 10\nn_eigen = 5");
    config_err("kind = mean-entropy-vs-size\nsizes = 10\nn_eigen = 5");
    config_err("kind = spectrum\nsizes = 10\nn_eigen = 5\nlongest = 4");

    let ok = ExperimentSpec::from_text("kind = spectrum\nsizes = 10, 12\nseeds = 1,2\nn_eigen = 5").unwrap();
    assert_eq!(ok.sizes, [10, 12]);
    assert_eq!(ok.seeds, [1, 2]);
}

#[test]
fn hash_ignores_output_and_layout() {
    let a = ExperimentSpec::from_text("kind = spectrum\nsizes = 10\nn_eigen = 5\noutput = a").unwrap();
    let b = ExperimentSpec::from_text("# comment\nn-eigen=5\noutput = b\nsizes=10\nkind=spectrum").unwrap();
    let c = ExperimentSpec::from_text("kind = spectrum\nsizes = 10\nn_eigen = 6").unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
}

#[test]
fn spectrum_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = spectrum\nsizes = 10\ndegree = 4\nboundary = equitransmitting\nseeds = 1, 2\nn_eigen = 12";
    let a = run(&spec(text, &dir.path().join("a"))).unwrap();
    std::env::set_var("QGRAPH_THREADS", "2");
    let b = run(&spec(text, &dir.path().join("b"))).unwrap();
    assert_eq!(a.files.len(), b.files.len());
    for (fa, fb) in a.files.iter().zip(&b.files) {
        assert_eq!(fa.file_name(), fb.file_name());
        // records the output directory
        if fa.ends_with("spec.txt") {
            continue;
        }
        assert_eq!(fs::read(fa).unwrap(), fs::read(fb).unwrap(), "{}", fa.display());
    }

    let out = dir.path().join("a");
    assert_header(&out.join("entropy_regular10_seed1.csv"), &ENTROPY_COLUMNS);
    let qg = load_graph(&out.join("graph_regular10_seed2.json")).unwrap();
    let (h, records) = load_spectrum(&out.join("spectrum_regular10_seed2.jsonl")).unwrap();
    assert_eq!(h.bond_count, qg.bond_count());
    assert_eq!(h.provenance.seed, Some(2));
    assert_eq!(records.len(), 12);
    let table: BoundsTable = serde_json::from_str(&fs::read_to_string(out.join("bounds_regular10_seed1.json")).unwrap()).unwrap();
    assert_eq!(table.eigen_count, 12);
    assert_eq!(table.violations(), 0);
    assert!(table.bounds.iter().any(|b| b.bound_name.contains("variance")));
    let spec_txt = fs::read_to_string(out.join("spec.txt")).unwrap();
    assert!(spec_txt.contains(&format!("spec_hash={}", h.provenance.spec_hash)));
}

#[test]
fn mean_entropy_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = mean-entropy-vs-size\nsizes = 8, 12, 16\ndegree = 3\nn_eigen = 10";
    run(&spec(text, dir.path())).unwrap();
    assert_header(&dir.path().join("mean_entropy.csv"), &MEAN_ENTROPY_COLUMNS);
    let s: MeanEntropySummary = serde_json::from_str(&fs::read_to_string(dir.path().join("mean_entropy.json")).unwrap()).unwrap();
    assert_eq!(s.points.len(), 3);
    assert!(s.points.iter().all(|p| p.mean_entropy > 0.0 && p.n_eigen == 10));
}

#[test]
fn star_average_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = star-average\nfamily = star\nsizes = 6, 9\nlength_lo = 1\nlength_hi = 4\nn_eigen = 200\nmass_per_edge = true";
    run(&spec(text, dir.path())).unwrap();
    let star = read_csv(&dir.path().join("star_star6_seed1.csv")).unwrap();
    let mut cols: Vec<String> = STAR_COLUMNS.iter().map(|s| s.to_string()).collect();
    cols.extend((0..6).map(|e| format!("mass_{e}")));
    assert_eq!(star.columns, cols);
    assert_eq!(star.rows.len(), 200);
    assert_header(&dir.path().join("py_samples_star9_seed1.csv"), &PY_SAMPLE_COLUMNS);
    assert_header(&dir.path().join("py_density.csv"), &PY_DENSITY_COLUMNS);
    let s: StarAverageSummary = serde_json::from_str(&fs::read_to_string(dir.path().join("star_average.json")).unwrap()).unwrap();
    assert_eq!(s.m_variant, "plain");
    assert_eq!(s.rows.len(), 2);
    for r in &s.rows {
        assert_eq!(r.n_eigen, 200);
        assert!(r.ks_distance > 0.0 && r.ks_distance < 1.0);
        assert!(r.weighted_average_bonds > r.weighted_average_amplitudes);
    }
}

#[test]
fn localization_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = localization\nfamily = star\nsizes = 40\nlength_lo = 2\nlength_hi = 10\nlongest = 9.9";
    run(&spec(text, dir.path())).unwrap();
    let t = read_csv(&dir.path().join("localization_star40_seed1.csv")).unwrap();
    assert_eq!(t.columns, LOCALIZATION_COLUMNS);
    assert_eq!(t.rows.len(), 40);
    let s: LocalizationSummary = serde_json::from_str(&fs::read_to_string(dir.path().join("localization.json")).unwrap()).unwrap();
    let r = &s.rows[0];
    assert_eq!(r.longest_length, 9.9);
    let total: f64 = t.rows.iter().map(|row| row[2].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(r.mass_on_longest_edge > 0.5);
}

fn qgraph(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph")).args(args).output().unwrap()
}

#[test]
fn cli_pipeline_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    let out = qgraph(&["generate", "--size", "10", "--degree", "4", "--boundary", "equitransmitting", "--seed", "3", "--output", &p("g.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qgraph(&["spectrum", "--graph", &p("g.json"), "--n-eigen", "8", "--output", &p("s.jsonl"), "--csv", &p("e.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_header(Path::new(&p("e.csv")), &ENTROPY_COLUMNS);
    let out = qgraph(&["entropy", "--graph", &p("g.json"), "--spectrum", &p("s.jsonl"), "--output", &p("e2.csv")]);
    assert!(out.status.success());
    assert_eq!(fs::read(p("e.csv")).unwrap(), fs::read(p("e2.csv")).unwrap());
    let out = qgraph(&["bounds", "--graph", &p("g.json"), "--spectrum", &p("s.jsonl"), "--output", &p("b.json")]);
    assert_eq!(out.status.code(), Some(0));

    // invalid parameters
    let out = qgraph(&["generate", "--size", "11", "--degree", "3", "--output", &p("bad.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = qgraph(&["spectrum", "--graph", &p("missing.json"), "--n-eigen", "3", "--output", &p("x.jsonl")]);
    assert_eq!(out.status.code(), Some(2));
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(p("g.json")).unwrap()).unwrap();
    doc["version"] = "9".into();
    fs::write(p("v.json"), doc.to_string()).unwrap();
    let out = qgraph(&["spectrum", "--graph", &p("v.json"), "--n-eigen", "3", "--output", &p("x.jsonl")]);
    assert_eq!(out.status.code(), Some(2));

    // a spectrum from another graph
    qgraph(&["generate", "--size", "12", "--degree", "4", "--boundary", "equitransmitting", "--output", &p("g12.json")]);
    let out = qgraph(&["bounds", "--graph", &p("g12.json"), "--spectrum", &p("s.jsonl"), "--output", &p("b.json")]);
    assert_eq!(out.status.code(), Some(2));

    let out = qgraph(&["constants", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["selected"], "plain");
}

#[test]
fn cli_run_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    fs::write(&cfg, "kind = spectrum\nsizes = 8\nn_eigen = 4\noutput = ignored\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = qgraph(&["run", "--config", &cfg.to_string_lossy(), "--output", &out_dir.to_string_lossy(), "--seeds", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("entropy_regular8_seed5.csv").exists());
    let out = qgraph(&["run", "--config", &cfg.to_string_lossy(), "--tol", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
