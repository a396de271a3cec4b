use std::path::Path;
use std::process::{Command, Output};

use expfun::bgamma::eval_w;
use expfun::series::{moments, neg_int_moment, SeriesOptions};
use expfun::{Bernstein, C64};
use serde_json::Value;

fn expfun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expfun")).args(args).output().expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = expfun(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok_stdout(&full)).unwrap()
}

/// Column `name` of every CSV row.
fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column present");
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn first_value(csv_text: &str, name: &str) -> f64 {
    column(csv_text, name)[0].parse().unwrap()
}

#[test]
fn moment_examples() {
    let v = first_value(&ok_stdout(&["moment", "--phi", "log1p", "--z", "-1", "--t", "1"]), "value_re");
    assert!((v - 1.644_934_066_848_226_4).abs() < 1e-9);
    let v = first_value(&ok_stdout(&["moment", "--phi", "linear:1", "--z", "0", "--t", "7"]), "value_re");
    assert_eq!(v, 1.0);
    let v = first_value(&ok_stdout(&["moment", "--phi", "log1p", "--z", "1", "--t", "1"]), "value_re");
    assert!((v - 0.721_347_520_444_481_7).abs() < 1e-10);
}

#[test]
fn moment_has_one_row_per_horizon() {
    let out = ok_stdout(&["moment", "--phi", "power:0.5", "--z", "0.5,0.25", "--t", "0.5,1,2"]);
    assert_eq!(column(&out, "t"), ["0.5", "1.0", "2.0"]);
    assert!(column(&out, "converged").iter().all(|c| c == "true"));
}

#[test]
fn other_examples() {
    let v = first_value(&ok_stdout(&["zeta", "--s", "4"]), "value");
    assert!((v - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
    let v = first_value(&ok_stdout(&["symmetric", "half-neg", "--t", "4"]), "value");
    assert_eq!(v, 0.5);
    let out = ok_stdout(&["symmetric", "cp-half-neg", "--lambda", "1", "--t", "1"]);
    assert_eq!(column(&out, "variant"), ["paper", "laplace_derived"]);
    let v = first_value(&ok_stdout(&["symmetric", "half-pos", "--sigma2", "1", "--t", "1"]), "value");
    assert!((v - 1.087_653_038_904_301_4).abs() < 1e-12);
    let out = ok_stdout(&["bgamma", "--phi", "log1p", "--z", "3"]);
    assert!((first_value(&out, "w_re") - 2f64.ln() * 3f64.ln()).abs() < 1e-14);
}

#[test]
fn json_round_trip_matches_library() {
    let doc = json(&["moment", "--phi", "log1p", "--z", "0.3,1", "--t", "1,2"]);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "moment");
    let spec = Bernstein::log1p();
    let z = C64::new(0.3, 1.0);
    let lib = moments(&spec, z, &[1.0, 2.0], &SeriesOptions::default()).unwrap().remove(1);
    let row = &doc["rows"][1];
    assert_eq!(row["value_re"].as_f64().unwrap(), lib.value.re);
    assert_eq!(row["value_im"].as_f64().unwrap(), lib.value.im);
    assert_eq!(row["terms_used"].as_u64().unwrap() as usize, lib.terms_used);

    let doc = json(&["moment", "--phi", "log1p", "--z", "-1", "--t", "3"]);
    let lib = neg_int_moment(&spec, -1, 3.0, &SeriesOptions::default()).unwrap();
    assert_eq!(doc["rows"][0]["value_re"].as_f64().unwrap(), lib.value.re);

    let doc = json(&["bgamma", "--phi", "loglog", "--z", "1.5,-2"]);
    let w = eval_w(&Bernstein::loglog(), C64::new(1.5, -2.0)).unwrap();
    assert_eq!(doc["rows"][0]["w_re"].as_f64().unwrap(), w.re);
    assert_eq!(doc["rows"][0]["w_im"].as_f64().unwrap(), w.im);
}

fn error_doc(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error line on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn domain_errors_exit_2() {
    // l = -3 is outside the strip of ln(1 + u)
    let out = expfun(&["moment", "--phi", "log1p", "--z", "-3", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = error_doc(&out);
    assert_eq!(doc["error"]["kind"], "domain");
    assert_eq!(doc["error"]["exit_code"], 2);
    assert_eq!(doc["schema_version"], 1);

    let out = expfun(&["zeta", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = expfun(&["mc", "--process", "gamma", "--z", "1", "--t", "1", "--paths", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convergence_failure_exits_3() {
    let out = expfun(&["moment", "--phi", "log1p", "--z", "0.5", "--t", "0.05", "--k-max", "200"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(error_doc(&out)["error"]["kind"], "convergence");
    let out =
        expfun(&["moment", "--phi", "log1p", "--z", "0.5", "--t", "0.05", "--k-max", "200", "--allow-unconverged"]);
    assert!(out.status.success());
    assert_eq!(column(&String::from_utf8(out.stdout).unwrap(), "converged"), ["false"]);
}

#[test]
fn io_errors_exit_4() {
    let out = expfun(&["--config", "/nonexistent/expfun.json", "zeta", "--s", "2"]);
    assert_eq!(out.status.code(), Some(4));
    let out = expfun(&["--output", "/nonexistent/dir/out.csv", "zeta", "--s", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn clap_rejects_both_psi_sources() {
    let out = expfun(&["symmetric", "half-pos", "--psi", "0.125", "--sigma2", "1", "--t", "1"]);
    assert!(!out.status.success());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"phi": "log1p", "z": -1, "t": [1, 2]}"#).unwrap();
    let cfg = cfg.to_str().unwrap();

    let out = ok_stdout(&["--config", cfg, "moment"]);
    assert_eq!(column(&out, "t"), ["1.0", "2.0"]);

    let out = expfun(&["--config", cfg, "moment", "--t", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(column(&text, "t"), ["3.0"]);
    assert!((first_value(&text, "value_re") - 1.082_323_233_711_138_2).abs() < 1e-9);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--t overrides the config file value"), "{stderr}");

    let doc = json(&["--config", cfg, "moment", "--t", "3"]);
    assert_eq!(doc["warnings"][0], "--t overrides the config file value");
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.csv");
    let out = expfun(&["-o", path.to_str().unwrap(), "zeta", "--s", "2,3"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(column(&text, "s"), ["2.0", "3.0"]);
}

fn mc_csv(threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_expfun"))
        .env("RAYON_NUM_THREADS", threads)
        .args(["mc", "--process", "cp:2:exp:1", "--z", "-0.5", "--z", "0.5,1", "--t", "0.5,1", "--paths", "5000"])
        .args(["--seed", "42"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn mc_is_reproducible_across_runs_and_threads() {
    let a = mc_csv("1");
    assert_eq!(a, mc_csv("1"));
    assert_eq!(a, mc_csv("4"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(column(&text, "n_paths"), ["5000"; 4]);
    assert_eq!(column(&text, "seed"), ["42"; 4]);
}

#[test]
fn mc_gamma_scheme_flag() {
    let out =
        ok_stdout(&["mc", "--process", "gamma", "--z", "0.5", "--t", "1", "--paths", "200", "--scheme", "grid-jumps"]);
    assert!(column(&out, "scheme")[0].starts_with("gamma-grid"), "{out}");
}

fn write_power_curve(path: &Path, span: f64, n: usize) {
    let mut text = String::from("# exponent=-0.5\nt,re\n");
    for i in 1..=n {
        let t = span * i as f64 / n as f64;
        text.push_str(&format!("{t},{}\n", t.powf(-0.5)));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn verify_conv_with_power_curves() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    let g = dir.path().join("g.csv");
    write_power_curve(&f, 2.0, 4096);
    write_power_curve(&g, 2.0, 4096);
    let doc = json(&[
        "verify-conv",
        "--z",
        "0.5",
        "--curve-f",
        f.to_str().unwrap(),
        "--curve-g",
        g.to_str().unwrap(),
        "--t",
        "1,2",
    ]);
    for row in doc["rows"].as_array().unwrap() {
        assert_eq!(row["rhs_re"].as_f64().unwrap(), std::f64::consts::PI);
        assert!(row["abs_residual"].as_f64().unwrap() < 1e-4, "{row}");
    }

    let out = expfun(&[
        "verify-conv",
        "--z",
        "1.5",
        "--curve-f",
        f.to_str().unwrap(),
        "--curve-g",
        g.to_str().unwrap(),
        "--t",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.csv");
    let out = expfun(&[
        "verify-conv",
        "--z",
        "0.5",
        "--curve-f",
        missing.to_str().unwrap(),
        "--curve-g",
        g.to_str().unwrap(),
        "--t",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}
