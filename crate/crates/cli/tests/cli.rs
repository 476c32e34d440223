//! End-to-end tests of the installed binary: schemas, reproducibility,
//! exit-code contract, and oracle columns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twinbeam"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twinbeam-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "args {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn schema_line(text: &str) -> &str {
    text.lines()
        .find(|l| !l.starts_with('#'))
        .expect("no schema line")
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tmpdir("repro");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "--out",
            path.to_str().unwrap(),
            "--seed",
            "7",
            "quadrature",
            "--nbar",
            "2.5",
            "--trials",
            "500",
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn parallel_sweep_is_deterministic() {
    // fig3 cells evaluate on a thread pool; row order and bytes must not
    // depend on scheduling
    let dir = tmpdir("par");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "--out",
            path.to_str().unwrap(),
            "fig3",
            "--dx",
            "0,1,2",
            "--gc-grid",
            "1e-2:1:6",
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn different_seeds_differ() {
    let dir = tmpdir("seeds");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    run_ok(&[
        "--out",
        a.to_str().unwrap(),
        "--seed",
        "1",
        "quadrature",
        "--trials",
        "50",
    ]);
    run_ok(&[
        "--out",
        b.to_str().unwrap(),
        "--seed",
        "2",
        "quadrature",
        "--trials",
        "50",
    ]);
    let (ta, tb) = (read(&a), read(&b));
    assert_ne!(
        ta.lines().nth(2).unwrap(),
        tb.lines().nth(2).unwrap(),
        "sample rows should depend on the seed"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_schemas_are_pinned() {
    let dir = tmpdir("schema");
    let cases: &[(&[&str], &str)] = &[
        (&["--out", "", "spectra", "--points", "3"], "x,s_n,s_p"),
        (
            &["--out", "", "--with-oracle", "spectra", "--points", "3"],
            "x,s_n,s_p,identity_ok",
        ),
        (
            &["--out", "", "quadrature", "--trials", "3"],
            "trial,a_s1,a_i1",
        ),
        (
            &["--out", "", "pairs", "--modes", "21"],
            "n,psi_sq,phi_sq,fidelity",
        ),
        (
            &["--out", "", "fig3", "--dx", "0", "--gc-grid", "0.5:1:2"],
            "dx,gc_over_g,sigma2",
        ),
        (
            &["--out", "", "filters", "--k", "1"],
            "k,wc_over_g,sigma2,law_1_over_2k",
        ),
    ];
    for (i, (args, schema)) in cases.iter().enumerate() {
        let path = dir.join(format!("case{i}.csv"));
        let mut argv: Vec<&str> = args.to_vec();
        argv[1] = path.to_str().unwrap();
        run_ok(&argv);
        let text = read(&path);
        assert!(
            text.starts_with("# twinbeam "),
            "missing config header: {text}"
        );
        assert_eq!(schema_line(&text), *schema, "args: {args:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn above_threshold_pump_is_rejected_with_validation_code() {
    let out = bin().args(["spectra", "--g2", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("g2"), "stderr: {err}");
}

#[test]
fn unknown_command_is_usage_error() {
    let out = bin().arg("spectrum").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_failure_uses_exit_code_4() {
    // oracle truncation for nbar ~ 1e3 needs more Fock depth than allowed
    let dir = tmpdir("trunc");
    let path = dir.join("q.csv");
    let out = bin()
        .args([
            "--out",
            path.to_str().unwrap(),
            "--with-oracle",
            "quadrature",
            "--nbar",
            "1000",
            "--trials",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn epr_demo_reports_perfect_matching() {
    let dir = tmpdir("epr");
    let path = dir.join("e.json");
    run_ok(&[
        "--out",
        path.to_str().unwrap(),
        "--seed",
        "3",
        "epr-demo",
        "--dim",
        "4",
        "--trials",
        "10000",
    ]);
    let text = read(&path);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["match_fraction"], 1.0);
    assert_eq!(v["dim"], 4);
    assert_eq!(v["offdiagonal_probability"], 0.0);
    let counts: Vec<u64> = v["outcome_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .collect();
    assert_eq!(counts.iter().sum::<u64>(), 10_000);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn filter_sweep_rows_obey_law_within_five_percent() {
    let dir = tmpdir("law");
    let path = dir.join("f.csv");
    run_ok(&["--out", path.to_str().unwrap(), "filters", "--k", "1,2,4,8"]);
    let text = read(&path);
    for line in text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let sigma2: f64 = cols[2].parse().unwrap();
        let law: f64 = cols[3].parse().unwrap();
        let ratio = sigma2 / law;
        assert!((0.95..=1.05).contains(&ratio), "row {line}: ratio {ratio}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fig3_default_grid_reaches_magic_bullet_regime() {
    let dir = tmpdir("fig3");
    let path = dir.join("f3.csv");
    run_ok(&[
        "--out",
        path.to_str().unwrap(),
        "fig3",
        "--dx",
        "0",
        "--gc-grid",
        "1e-3:1e1:7",
    ]);
    let text = read(&path);
    let first_row = text.lines().nth(2).unwrap();
    let cols: Vec<&str> = first_row.split(',').collect();
    assert_eq!(cols[0], "0");
    let sigma2: f64 = cols[2].parse().unwrap();
    assert!(sigma2 < 0.05, "sigma2 at gc=1e-3: {sigma2}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_columns_agree_on_counting_commands() {
    let dir = tmpdir("oracle");
    let f3 = dir.join("f3.csv");
    run_ok(&[
        "--out",
        f3.to_str().unwrap(),
        "--with-oracle",
        "fig3",
        "--dx",
        "0",
        "--gc-grid",
        "0.1:1:3",
    ]);
    let text = read(&f3);
    assert_eq!(
        schema_line(&text),
        "dx,gc_over_g,sigma2,sigma2_oracle,oracle_ok"
    );
    for line in text.lines().skip(2) {
        assert!(line.ends_with(",true"), "oracle disagreement: {line}");
    }

    let fl = dir.join("fl.csv");
    run_ok(&[
        "--out",
        fl.to_str().unwrap(),
        "--with-oracle",
        "filters",
        "--k",
        "1,2",
        "--wc-over-g",
        "0.1",
    ]);
    let text = read(&fl);
    assert_eq!(
        schema_line(&text),
        "k,wc_over_g,sigma2,law_1_over_2k,sigma2_oracle,oracle_ok"
    );
    for line in text.lines().skip(2) {
        assert!(line.ends_with(",true"), "oracle disagreement: {line}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_flag_rejected_where_undefined() {
    let out = bin().args(["--with-oracle", "pairs"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("with-oracle"), "stderr: {err}");
}

#[test]
fn config_file_drives_run_and_flags_override() {
    let dir = tmpdir("conf");
    let conf = dir.join("run.conf");
    let out_path = dir.join("spectra.csv");
    std::fs::write(
        &conf,
        format!(
            "g2 = 0.5\npoints = 7\nout = {}\n# comment line\n",
            out_path.display()
        ),
    )
    .unwrap();
    run_ok(&[
        "--config",
        conf.to_str().unwrap(),
        "spectra",
        "--points",
        "5",
    ]);
    let text = read(&out_path);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .contains("g2=0.5 x-max=8 points=5"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6); // schema + 5 rows
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tmpdir("badconf");
    let conf = dir.join("run.conf");
    std::fs::write(&conf, "nbar = 1\n").unwrap();
    // nbar is a quadrature key; spectra must reject it by name
    let out = bin()
        .args(["--config", conf.to_str().unwrap(), "spectra"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nbar"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_dir_env_var_sets_default_location() {
    let dir = tmpdir("envout");
    let out = bin()
        .env("TWINBEAM_OUT_DIR", &dir)
        .args(["spectra", "--points", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("spectra.csv").is_file());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gamma_hz_labels_header_only() {
    let dir = tmpdir("ghz");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    run_ok(&["--out", a.to_str().unwrap(), "spectra", "--points", "3"]);
    run_ok(&[
        "--out",
        b.to_str().unwrap(),
        "--gamma-hz",
        "1e6",
        "spectra",
        "--points",
        "3",
    ]);
    let (ta, tb) = (read(&a), read(&b));
    assert!(tb.lines().next().unwrap().contains("gamma-hz=1000000"));
    // data rows unchanged by the label
    assert_eq!(
        ta.lines().skip(1).collect::<Vec<_>>(),
        tb.lines().skip(1).collect::<Vec<_>>()
    );
    std::fs::remove_dir_all(&dir).ok();
}
