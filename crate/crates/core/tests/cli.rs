use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use tree_harmonic::cli::commands::run;
use tree_harmonic::cli::formats::{
    decomposition_to_json, kernel_from_csv, spectral_from_csv, spectral_to_csv, symbol_to_csv,
    tree_function_from_json, tree_function_to_json,
};
use tree_harmonic::psdo::{symbol_from_decomposition, NuclearDecomposition};
use tree_harmonic::rng::SeededRng;
use tree_harmonic::{Context, SpectralFunction, TreeFunction};

fn cli(dir: &Path, list: &[&str]) -> i32 {
    let mut args: Vec<String> = vec!["tree-harmonic".into()];
    args.extend(list.iter().map(|s| s.to_string()));
    args.extend(["--quiet".into(), "--out".into(), dir.display().to_string()]);
    run(args)
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn small() -> Context {
    Context::new(2, 2, 2, 16).unwrap()
}

const SMALL: [&str; 6] = ["--q", "2", "--R", "2", "--M", "16"];

fn with(base: &[&'static str], more: &[&str]) -> Vec<String> {
    base.iter().chain(more).map(|s| s.to_string()).collect()
}

fn cli_s(dir: &Path, list: Vec<String>) -> i32 {
    let refs: Vec<&str> = list.iter().map(String::as_str).collect();
    cli(dir, &refs)
}

#[test]
fn transform_of_root_delta_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("delta.json"), r#"{"q":2,"R":2,"values":{"0":[1.0,0.0]}}"#).unwrap();
    let code = cli_s(d, with(&SMALL, &["transform", "--input", &p(d, "delta.json"), "--output", &p(d, "hf.csv")]));
    assert_eq!(code, 0);
    let ctx = small();
    let hf = spectral_from_csv(&ctx, &std::fs::read_to_string(d.join("hf.csv")).unwrap()).unwrap();
    assert_eq!(hf.values.len(), ctx.cylinders() * 16);
    assert!(hf.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
}

#[test]
fn zero_transforms_to_zero_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("zero.json"), r#"{"q":2,"R":2,"values":{}}"#).unwrap();
    assert_eq!(cli_s(d, with(&SMALL, &["transform", "--input", &p(d, "zero.json"), "--output", &p(d, "z.csv")])), 0);
    assert_eq!(cli_s(d, with(&SMALL, &["invert", "--input", &p(d, "z.csv"), "--output", &p(d, "back.json")])), 0);
    let ctx = small();
    let hf = spectral_from_csv(&ctx, &std::fs::read_to_string(d.join("z.csv")).unwrap()).unwrap();
    assert_eq!(hf, SpectralFunction::zeros(ctx.cylinders(), 16));
    let back = tree_function_from_json(&ctx, &std::fs::read_to_string(d.join("back.json")).unwrap()).unwrap();
    assert_eq!(back, TreeFunction::zeros(ctx.vertices()));
}

#[test]
fn transform_then_invert_reproduces_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ctx = Context::new(3, 2, 2, 256).unwrap();
    let f = SeededRng::new(5).tree_function(ctx.vertices());
    std::fs::write(d.join("f.json"), tree_function_to_json(&ctx, &f)).unwrap();
    let base = ["--q", "3", "--R", "2"];
    assert_eq!(cli_s(d, with(&base, &["transform", "--input", &p(d, "f.json"), "--output", &p(d, "hf.csv")])), 0);
    assert_eq!(cli_s(d, with(&base, &["invert", "--input", &p(d, "hf.csv"), "--output", &p(d, "g.json")])), 0);
    let g = tree_function_from_json(&ctx, &std::fs::read_to_string(d.join("g.json")).unwrap()).unwrap();
    for (a, b) in f.values.iter().zip(&g.values) {
        assert!((a - b).norm() <= 1e-8 * f.max_abs());
    }
}

fn write_decomposition(ctx: &Context, path: &Path, seed: u64, rank: usize) -> NuclearDecomposition {
    let mut rng = SeededRng::new(seed);
    let n = ctx.vertices();
    let d = NuclearDecomposition::new((0..rank).map(|_| (rng.tree_function(n), rng.tree_function(n))).collect());
    std::fs::write(path, decomposition_to_json(ctx, &d)).unwrap();
    d
}

#[test]
fn operator_checks_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ctx = Context::new(2, 2, 2, 256).unwrap();
    let dec = write_decomposition(&ctx, &d.join("dec.json"), 1, 3);
    write_decomposition(&ctx, &d.join("eta.json"), 2, 2);
    let base = ["--q", "2", "--R", "2"];

    assert_eq!(cli_s(d, with(&base, &["kernel", "--input", &p(d, "dec.json"), "--output", &p(d, "k.csv")])), 0);
    let k = kernel_from_csv(&ctx, &std::fs::read_to_string(d.join("k.csv")).unwrap()).unwrap();
    let oracle = dec.outer_product_kernel(ctx.vertices());
    assert!(k.max_abs_diff(&oracle) <= 1e-10 * oracle.max_abs());

    for cmd in ["hs-check", "trace-check", "adjoint-check"] {
        assert_eq!(cli_s(d, with(&base, &[cmd, "--input", &p(d, "dec.json")])), 0, "{cmd}");
    }
    assert_eq!(
        cli_s(d, with(&base, &["product-check", "--eta", &p(d, "eta.json"), "--sigma", &p(d, "dec.json")])),
        0
    );
    let jsonl = std::fs::read_to_string(d.join("reports.jsonl")).unwrap();
    assert!(jsonl.starts_with("{\"name\":\"product\",\"anchor\":\"psdo.product\""));
    assert!(jsonl.contains("\"pass\":true"));

    assert_eq!(cli_s(d, with(&base, &["schatten", "--kernel", &p(d, "k.csv"), "--r", "0.5,1,2"])), 0);
    let jsonl = std::fs::read_to_string(d.join("reports.jsonl")).unwrap();
    assert!(jsonl.contains("\"schatten_r0.500000\":["));
    assert_eq!(cli_s(d, with(&base, &["lp-report", "--kernel", &p(d, "k.csv")])), 0);

    let sigma = symbol_from_decomposition(&ctx, &dec).unwrap();
    std::fs::write(d.join("sigma.csv"), symbol_to_csv(&ctx, &sigma)).unwrap();
    assert_eq!(cli_s(d, with(&base, &["kernel", "--symbol", &p(d, "sigma.csv"), "--output", &p(d, "k2.csv")])), 0);
    let k2 = kernel_from_csv(&ctx, &std::fs::read_to_string(d.join("k2.csv")).unwrap()).unwrap();
    assert!(k2.max_abs_diff(&k) <= 1e-12 * k.max_abs());
}

#[test]
fn seeded_defaults_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = ["--q", "3", "--R", "2", "--M", "128"];
    // Mass error is at the rounding floor for both M and M/2, so only the
    // strict-decrease requirement can fail here.
    cli_s(d, with(&base, &["plancherel"]));
    let summary = std::fs::read_to_string(d.join("summary.csv")).unwrap();
    let failing: Vec<_> = summary.lines().filter(|l| l.contains(",false,")).collect();
    assert!(failing.iter().all(|l| l.starts_with("plancherel_mass,")), "{failing:?}");
    for cmd in ["hs-check", "trace-check", "adjoint-check", "product-check", "schatten", "lp-report"] {
        assert_eq!(cli_s(d, with(&base, &[cmd])), 0, "{cmd}");
    }
    let summary = std::fs::read_to_string(d.join("summary.csv")).unwrap();
    assert!(summary.starts_with("name,anchor,pass,residual,tolerance\nlayercake,lp.layer-cake,true,"));
    assert!(d.join("timings.csv").exists());
}

#[test]
fn build_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.conf"), "# sweep\nq=3\nR=2\nM=32\n").unwrap();
    // The flag overrides the file.
    assert_eq!(cli_s(d, vec!["--config".into(), p(d, "run.conf"), "--q".into(), "2".into(), "build".into()]), 0);
    let tree = std::fs::read_to_string(d.join("tree.csv")).unwrap();
    assert_eq!(tree.lines().count(), 1 + 10);
    assert!(tree.starts_with("vertex,parent,depth\n0,,0\n1,0,1\n"));
    assert_eq!(std::fs::read_to_string(d.join("grid.csv")).unwrap().lines().count(), 1 + 32);
    assert_eq!(std::fs::read_to_string(d.join("heights.csv")).unwrap().lines().count(), 1 + 10 * 6);
}

#[test]
fn coarse_grid_fails_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(cli(d, &["--q", "3", "--R", "2", "--M", "8", "plancherel"]), 1);
    let summary = std::fs::read_to_string(d.join("summary.csv")).unwrap();
    let row = summary.lines().find(|l| l.starts_with("round_trip,")).unwrap();
    assert!(row.contains(",false,"), "{row}");
}

#[test]
fn tolerance_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(cli(d, &["--q", "3", "--R", "2", "plancherel", "--tol.round_trip", "1e-30"]), 1);
    assert_eq!(cli(d, &["--q", "3", "--R", "2", "plancherel", "--tol.round_trip=1e-3"]), 0);
    assert_eq!(cli(d, &["--q", "3", "--R", "2", "plancherel", "--tol.no_such_check=1"]), 2);
}

#[test]
fn usage_and_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(cli(d, &["--q", "1", "suite"]), 2);
    assert_eq!(cli(d, &["--R", "3", "--D", "2", "build"]), 2);
    assert_eq!(cli(d, &["--M", "1", "build"]), 2);
    assert_eq!(cli(d, &["no-such-command"]), 2);
    assert_eq!(cli(d, &["transform", "--input", &p(d, "missing.json"), "--output", &p(d, "x.csv")]), 2);

    std::fs::write(d.join("bad.json"), "{not json").unwrap();
    assert_eq!(cli_s(d, with(&SMALL, &["transform", "--input", &p(d, "bad.json"), "--output", &p(d, "x.csv")])), 2);
    std::fs::write(d.join("q3.json"), r#"{"q":3,"R":2,"values":{}}"#).unwrap();
    assert_eq!(cli_s(d, with(&SMALL, &["transform", "--input", &p(d, "q3.json"), "--output", &p(d, "x.csv")])), 2);

    // Spectral file written for another M.
    let other = Context::new(2, 2, 2, 8).unwrap();
    std::fs::write(d.join("m8.csv"), spectral_to_csv(&other, &SpectralFunction::zeros(other.cylinders(), 8))).unwrap();
    assert_eq!(cli_s(d, with(&SMALL, &["invert", "--input", &p(d, "m8.csv"), "--output", &p(d, "x.json")])), 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tree-harmonic");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let rejected = status(&["suite", "--q", "1", "--out", &out]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("q must be at least 2"));

    let failing = status(&["plancherel", "--q", "3", "--R", "1", "--M", "8", "--out", &out]);
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stderr).contains("failed: round_trip"));

    let ok = status(&["plancherel", "--q", "3", "--R", "1", "--out", &out]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS round_trip"));

    assert_eq!(status(&["--help"]).status.code(), Some(0));
    assert_eq!(status(&[]).status.code(), Some(2));
}
