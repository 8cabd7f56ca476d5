//! End-to-end tests of the `besov` binary: exit codes, output contracts,
//! determinism, and the round trips through the file formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn besov() -> Command {
    Command::new(env!("CARGO_BIN_EXE_besov"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("besov_cli_{tag}"));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    let mut cmd = besov();
    cmd.args(args).arg("--out").arg(out);
    cmd.output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_mollifier_reports_the_admissible_interval() {
    let dir = tmp_dir("analyze");
    let out = run(&["analyze-mollifier", "--set", "kernel.kind=cube"], &dir);
    let doc = stdout_json(&out);
    assert_eq!(doc["k0"]["order"], 2);
    assert_eq!(doc["admissible_interval"]["s_inf"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["admissible_interval"]["s_sup"].as_f64().unwrap(), 2.0);

    let out = run(
        &["analyze-mollifier", "--set", "kernel.kind=cube", "--set", "kernel.lo=[0.0]", "--set", "kernel.hi=[1.0]"],
        &dir,
    );
    let doc = stdout_json(&out);
    assert_eq!(doc["k0"]["order"], 1);
    assert_eq!(doc["admissible_interval"]["s_sup"].as_f64().unwrap(), 1.0);
    assert!(dir.join("analyze_mollifier.json").exists());
    assert!(dir.join("run_meta.json").exists());
}

#[test]
fn exit_codes_name_their_failure_class() {
    let dir = tmp_dir("exits");

    // unknown configuration key: config error
    let out = run(&["besov-norm", "--set", "besov.sq=1.0"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sq"));

    // mixture mass 0.5: kernel-hypothesis violation, named
    let out = run(
        &[
            "analyze-mollifier",
            "--set",
            r#"kernel={"kind":"mixture","components":[{"kind":"gaussian","weight":0.5}]}"#,
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mass") && stderr.contains("0.5"), "{stderr}");

    // a 16-point grid resolves no dyadic bands: resolution error
    let out = run(&["besov-norm", "--set", "grid.n=16"], &dir);
    assert_eq!(out.status.code(), Some(4));

    // malformed kernel descriptor: config error
    let out = run(&["analyze-mollifier", "--set", "kernel.kind=pyramid"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn besov_norm_degenerates_gracefully_on_zero() {
    let dir = tmp_dir("zero");
    let out = run(&["besov-norm", "--set", "function.kind=zero"], &dir);
    let doc = stdout_json(&out);
    assert_eq!(doc["lp_besov_norm"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["mollifier_functional"].as_f64().unwrap(), 0.0);
    assert!(doc["ratio"].is_null());
}

#[test]
fn set_overrides_reach_the_computation() {
    let dir = tmp_dir("set");
    let out = run(&["besov-norm", "--set", "besov.s=1.5", "--set", "besov.q=inf"], &dir);
    let doc = stdout_json(&out);
    assert_eq!(doc["params"]["s"].as_f64().unwrap(), 1.5);
    assert_eq!(doc["params"]["q"], "inf");
}

#[test]
fn admissibility_warning_does_not_stop_the_run() {
    let dir = tmp_dir("warn");
    let out = run(
        &["besov-norm", "--set", "kernel.kind=cube", "--set", "besov.s=2.5"],
        &dir,
    );
    let doc = stdout_json(&out);
    assert!(doc["warning"].as_str().unwrap().contains("admissible"));
    assert!(doc["lp_besov_norm"].as_f64().unwrap() > 0.0);
}

#[test]
fn rate_profile_round_trips_and_is_deterministic() {
    let dir_a = tmp_dir("profile_a");
    let dir_b = tmp_dir("profile_b");
    let args = ["rate-profile", "--set", "kernel.kind=cube"];

    let first = run(&args, &dir_a);
    let doc = stdout_json(&first);
    let slope = doc["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.15, "slope {slope}");

    // identical configuration, byte-identical payloads
    let second = run(&args, &dir_b);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(
        fs::read(dir_a.join("rate_profile.csv")).unwrap(),
        fs::read(dir_b.join("rate_profile.csv")).unwrap()
    );

    let csv = fs::read_to_string(dir_a.join("rate_profile.csv")).unwrap();
    assert!(csv.starts_with("epsilon,deviation\n"));

    // fitting the written profile reproduces the slope exactly
    let csv_path = dir_a.join("rate_profile.csv");
    let replay = run(
        &["rate-profile", "--set", "kernel.kind=cube", "--from-profile", csv_path.to_str().unwrap()],
        &dir_b,
    );
    let replay_doc = stdout_json(&replay);
    assert_eq!(doc["fit"], replay_doc["fit"]);
    assert_eq!(replay_doc["source"].as_str().unwrap(), format!("file:{}", csv_path.display()));
    // the re-written profile is the same file
    assert_eq!(
        fs::read(dir_a.join("rate_profile.csv")).unwrap(),
        fs::read(dir_b.join("rate_profile.csv")).unwrap()
    );
}

#[test]
fn eta_dichotomy_flips_with_smoothness() {
    let dir = tmp_dir("eta");
    let base = ["eta-test", "--set", "kernel.kind=battery", "--set", "kernel.id=cube_shifted"];

    let mut low = base.to_vec();
    low.extend(["--set", "besov.s=0.5"]);
    let doc = stdout_json(&run(&low, &dir));
    assert_eq!(doc["converged"], true);

    let mut high = base.to_vec();
    high.extend(["--set", "besov.s=1.5"]);
    let doc = stdout_json(&run(&high, &dir));
    assert_eq!(doc["converged"], false);
}

#[test]
fn keylem_caps_depth_at_the_grid_resolution() {
    let dir = tmp_dir("keylem");
    let out = run(&["keylem", "--set", "kernel.kind=gaussian"], &dir);
    let doc = stdout_json(&out);
    assert_eq!(doc["j_max_requested"], 7);
    let used = doc["j_max_used"].as_u64().unwrap();
    assert!(used <= 7 && used >= 3);
    let entries = doc["entries"].as_array().unwrap();
    let first = entries.first().unwrap()["l1_norm"].as_f64().unwrap();
    let last = entries.last().unwrap()["l1_norm"].as_f64().unwrap();
    assert!(last < first);
}

#[test]
fn verify_filter_selects_and_fault_injection_fails_loudly() {
    let dir = tmp_dir("verify");

    let out = run(&["verify", "--filter", "taylor"], &dir);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let passes = text.lines().filter(|l| l.starts_with("PASS taylor/")).count();
    assert_eq!(passes, 7, "{text}");
    assert!(!text.contains("schur/"));
    let xml = fs::read_to_string(dir.join("verify.xml")).unwrap();
    assert!(xml.contains("tests=\"7\" failures=\"0\""), "{xml}");
    // filtered runs carry no summary table
    assert!(!dir.join("verify_summary.csv").exists());

    let out = run(&["verify", "--filter", "injected", "--inject-fault"], &dir);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("FAIL moments/injected_mass09") && text.contains("mass"),
        "{text}"
    );
    let xml = fs::read_to_string(dir.join("verify.xml")).unwrap();
    assert!(xml.contains("failures=\"1\""));
    assert!(xml.contains("injected_mass09"));
}

#[test]
fn thread_cap_is_validated_and_results_do_not_depend_on_it() {
    let dir_a = tmp_dir("threads_a");
    let dir_b = tmp_dir("threads_b");

    let mut cmd = besov();
    cmd.args(["verify", "--filter", "moments"]).arg("--out").arg(&dir_a);
    cmd.env("BESOV_THREADS", "not_a_number");
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let mut one = besov();
    one.args(["verify", "--filter", "eta"]).arg("--out").arg(&dir_a);
    one.env("BESOV_THREADS", "1");
    let mut many = besov();
    many.args(["verify", "--filter", "eta"]).arg("--out").arg(&dir_b);
    many.env("BESOV_THREADS", "5");
    let a = one.output().unwrap();
    let b = many.output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        fs::read(dir_a.join("verify.xml")).unwrap(),
        fs::read(dir_b.join("verify.xml")).unwrap()
    );
}

/// Hand-assembled BGF1 bytes, independent of the writer in the binary.
fn bgf1_bytes(dim: u32, n: u32, extent: f64, values: &[f64]) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(b"BGF1GRID");
    buf.extend_from_slice(&1u32.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    buf.extend_from_slice(&dim.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&extent.to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

#[test]
fn grid_files_feed_functions_and_kernels() {
    let dir = tmp_dir("bgf");
    let n = 1024usize;
    let extent = 16.0;
    let h = 2.0 * extent / n as f64;

    // a sampled function: Gaussian on the configured grid
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let x = -extent + h * i as f64;
            (-0.5 * x * x).exp()
        })
        .collect();
    let f_path = dir.join("f.bgf");
    fs::write(&f_path, bgf1_bytes(1, n as u32, extent, &values)).unwrap();

    let out = run(
        &[
            "besov-norm",
            "--set",
            &format!(r#"function={{"kind":"bgf1","path":"{}"}}"#, f_path.display()),
        ],
        &dir,
    );
    let doc = stdout_json(&out);
    assert!(doc["lp_besov_norm"].as_f64().unwrap() > 0.0);

    // same file against a mismatched grid: config error
    let out = run(
        &[
            "besov-norm",
            "--set",
            &format!(r#"function={{"kind":"bgf1","path":"{}"}}"#, f_path.display()),
            "--set",
            "grid.n=512",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(2));

    // a sampled kernel with exact unit discrete mass
    let kernel_values = vec![1.0 / (2.0 * extent); n];
    let k_path = dir.join("k.bgf");
    fs::write(&k_path, bgf1_bytes(1, n as u32, extent, &kernel_values)).unwrap();
    let out = run(
        &[
            "analyze-mollifier",
            "--set",
            &format!(r#"kernel={{"kind":"sampled","path":"{}"}}"#, k_path.display()),
        ],
        &dir,
    );
    let doc = stdout_json(&out);
    assert!(doc["k0"]["order"].is_u64());

    // scaling the samples breaks the unit-mass hypothesis
    let broken: Vec<f64> = kernel_values.iter().map(|v| 0.9 * v).collect();
    let b_path = dir.join("broken.bgf");
    fs::write(&b_path, bgf1_bytes(1, n as u32, extent, &broken)).unwrap();
    let out = run(
        &[
            "analyze-mollifier",
            "--set",
            &format!(r#"kernel={{"kind":"sampled","path":"{}"}}"#, b_path.display()),
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(3));
}
