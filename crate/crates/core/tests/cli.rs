//! End-to-end checks of the command-line front end.

use std::path::{Path, PathBuf};
use std::process::Command;

use tact_pwm::cli::{run, EXIT_OK, EXIT_USAGE};
use tact_pwm::config::DEFAULT_CONFIG;
use tact_pwm::report::{parse_key_values, parse_vector};
use tempfile::TempDir;

const T: f64 = 300e-9;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tact-pwm").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// The default config with whole `key = ...` lines replaced.
fn config_with(edits: &[(&str, &str)]) -> String {
    DEFAULT_CONFIG
        .lines()
        .map(|line| {
            let key = line.split('=').next().unwrap_or("").trim();
            match edits.iter().find(|(k, _)| *k == key) {
                Some((k, v)) => format!("{k} = {v}"),
                None => line.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

const IDEAL: &[(&str, &str)] = &[
    ("ideal_off", "true"),
    ("sigma_vth", "\"0 mV\""),
    ("jitter_sigma", "\"0 ns\""),
];

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn kv(text: &str) -> std::collections::HashMap<String, f64> {
    parse_key_values(text).unwrap().into_iter().collect()
}

#[test]
fn neuron_zero_inputs_ideal_is_exactly_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ideal.cfg", &config_with(IDEAL));
    let r = cli(&["neuron", "--config", s(&cfg)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = kv(&r.stdout);
    assert_eq!(v["w_plus_s"], 0.0);
    assert_eq!(v["w_minus_s"], 0.0);
    assert_eq!(v["w_relu_s"], 0.0);
}

#[test]
fn neuron_zero_inputs_default_leaks_a_little() {
    let r = cli(&["neuron"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = kv(&r.stdout);
    assert!(v["w_plus_s"] > 0.0 && v["w_plus_s"] < 1e-3 * T);
    assert!(v["w_relu_s"] < 1e-3 * T);
}

#[test]
fn neuron_full_scale_single_synapse() {
    // with v_w = v_dd the on-current is i0 = 1 nA, and C = t_in * I / v_theta = 1.5 fF
    let dir = TempDir::new().unwrap();
    let mut edits = IDEAL.to_vec();
    edits.extend([("i0", "\"1 nA\""), ("v_w", "\"1 V\""), ("c_d", "\"1 fF\""), ("c_n", "\"0.5 fF\"")]);
    let cfg = write(&dir, "fs.cfg", &config_with(&edits));
    let w = write(&dir, "w.txt", "1 1\n+1\n");

    let full = cli(&["neuron", "--config", s(&cfg), "--weights", s(&w), "--inputs", "1"]);
    assert_eq!(full.code, EXIT_OK, "{}", full.stderr);
    let v = kv(&full.stdout);
    assert!((v["w_relu_s"] / T - 1.0).abs() < 1e-12, "{}", v["w_relu_s"]);

    let half = cli(&["neuron", "--config", s(&cfg), "--weights", s(&w), "--inputs", "0.5"]);
    let v = kv(&half.stdout);
    assert!((v["w_relu_s"] / T - 0.5).abs() < 1e-12);
    assert_eq!(v["saturated_plus"], 0.0);
}

#[test]
fn malformed_config_exits_with_usage_code() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("syntax.cfg", "[frame\nt_in = 3".to_string()),
        ("bare.cfg", config_with(&[("t_in", "3e-7")])),
        ("unknown.cfg", format!("{DEFAULT_CONFIG}\n[extra]\nfoo = 1\n")),
        ("range.cfg", config_with(&[("v_theta", "\"-1 V\"")])),
    ] {
        let cfg = write(&dir, name, &text);
        let r = cli(&["neuron", "--config", s(&cfg)]);
        assert_eq!(r.code, EXIT_USAGE, "{name}");
        assert!(r.stderr.starts_with("error:"), "{name}: {}", r.stderr);
    }
    let missing = cli(&["neuron", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(missing.code, EXIT_USAGE);
}

#[test]
fn binary_reports_usage_errors() {
    let st = Command::new(env!("CARGO_BIN_EXE_tact-pwm"))
        .args(["bogus-subcommand"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_USAGE));
    let ok = Command::new(env!("CARGO_BIN_EXE_tact-pwm"))
        .args(["energy"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
}

fn read_sweep(path: &Path) -> Vec<(f64, f64, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    assert_eq!(&headers, vec!["input_width", "mean_output", "std_output"]);
    r.deserialize().map(|row| row.unwrap()).collect()
}

#[test]
fn sweep_ideal_is_linear() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ideal.cfg", &config_with(IDEAL));
    let out = dir.path().join("sweep.csv");
    let r = cli(&["sweep", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let rows = read_sweep(&out);
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[0].1, 0.0);
    let slope = rows.last().unwrap().1 / rows.last().unwrap().0;
    for (x, y, sd) in rows {
        assert!((y - slope * x).abs() <= 1e-12 * T);
        assert!(sd.abs() <= 1e-12 * T);
    }
}

#[test]
fn sweep_leakage_offset_at_zero_input() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "leak.cfg",
        &config_with(&[("sigma_vth", "\"0 mV\""), ("jitter_sigma", "\"0 ns\"")]),
    );
    let out = dir.path().join("sweep.csv");
    assert_eq!(cli(&["sweep", "--config", s(&cfg), "--out", s(&out)]).code, EXIT_OK);
    let rows = read_sweep(&out);

    // 50 idle +1 synapses: the selected transistor leaks i0 into the plus rail
    // for the whole frame, the other one i0 * exp(-v_dd / slope) into minus
    let (n, i0, c, v_theta) = (50.0, 1e-12, 1.05e-12, 0.2);
    let per_rail = |i: f64| T * n * T * i / (c * v_theta);
    let want = per_rail(i0) - per_rail(i0 * (-1.0f64 / 0.036).exp());
    assert!(rows[0].0 == 0.0);
    assert!((rows[0].1 - want).abs() <= 1e-9 * want, "{} vs {want}", rows[0].1);
    assert!(rows[0].1 > 0.0);
}

#[test]
fn sweep_to_unwritable_path_fails() {
    let r = cli(&["sweep", "--out", "/nonexistent-dir/sweep.csv"]);
    assert_ne!(r.code, EXIT_OK);
    assert!(r.stderr.contains("nonexistent-dir"));
}

#[test]
fn montecarlo_ideal_has_no_error() {
    let dir = TempDir::new().unwrap();
    let mut edits = IDEAL.to_vec();
    edits.push(("n_trials", "500"));
    let cfg = write(&dir, "ideal.cfg", &config_with(&edits));
    let r = cli(&["montecarlo", "--config", s(&cfg)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = kv(&r.stdout);
    assert_eq!(v["n_trials"], 500.0);
    assert!(v["max_abs_error_pct"] < 1e-9);
}

#[test]
fn montecarlo_calibrated_mean_error() {
    let r = cli(&["montecarlo"]);
    let v = kv(&r.stdout);
    assert!((v["mean_abs_error_pct"] - 1.5).abs() <= 0.3);
}

#[test]
fn montecarlo_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "small.cfg", &config_with(&[("n_trials", "300")]));
    let csv_of = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let r = cli(&["montecarlo", "--config", s(&cfg), "--seed", seed, "--out", s(&out)]);
        assert_eq!(r.code, EXIT_OK);
        std::fs::read(out).unwrap()
    };
    let a = csv_of("7", "a.csv");
    let b = csv_of("7", "b.csv");
    let c = csv_of("8", "c.csv");
    assert_eq!(a, b);
    assert_ne!(a, c);

    let text = String::from_utf8(a).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["trial", "weighted_sum", "oracle", "simulated", "error_pct"]
    );
    assert_eq!(reader.records().count(), 300);
}

/// Deterministic pseudo-random matrix and input for the inference checks.
fn random_layer(rows: usize, cols: usize, seed: u64) -> (Vec<Vec<i8>>, Vec<f64>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = (0..rows)
        .map(|_| (0..cols).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
        .collect();
    let x = (0..cols).map(|_| rng.random_range(0.0..=1.0)).collect();
    (m, x)
}

fn weight_file(m: &[Vec<i8>]) -> String {
    let mut text = format!("{} {}\n", m.len(), m[0].len());
    for row in m {
        let toks: Vec<String> = row.iter().map(|&w| format!("{w:+}")).collect();
        text.push_str(&toks.join(" "));
        text.push('\n');
    }
    text
}

#[test]
fn infer_matches_float_reference() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ideal.cfg", &config_with(IDEAL));
    let (m, x) = random_layer(10, 100, 42);
    let w = write(&dir, "w.txt", &weight_file(&m));
    let xs: Vec<String> = x.iter().map(|v| format!("{v:e}")).collect();
    let input = write(&dir, "x.txt", &xs.join(","));

    let r = cli(&["infer", "--config", s(&cfg), "--weights", s(&w), "--input", s(&input)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let y = parse_vector(&r.stdout, Path::new("stdout")).unwrap();

    // full-scale gain t_in * I_on / (C * v_theta) with I_on = i0 * exp((v_dd - v_w) / slope)
    let i_on = 1e-12 * ((1.0f64 - 0.65) / 0.036).exp();
    let gain = T * i_on / (1.05e-12 * 0.2);
    assert_eq!(y.len(), 10);
    for (row, got) in m.iter().zip(&y) {
        let dot: f64 = row.iter().zip(&x).map(|(&w, &v)| f64::from(w) * v).sum();
        let want = (gain * dot.max(0.0)).min(1.0);
        assert!((got - want).abs() <= 1e-9 * want.max(1e-3), "{got} vs {want}");
    }

    let zeros = write(&dir, "z.txt", &vec!["0"; 100].join(" "));
    let r = cli(&["infer", "--config", s(&cfg), "--weights", s(&w), "--input", s(&zeros)]);
    let y = parse_vector(&r.stdout, Path::new("stdout")).unwrap();
    assert_eq!(y, vec![0.0; 10]);

    let json = cli(&["infer", "--config", s(&cfg), "--weights", s(&w), "--input", s(&input), "--format", "json"]);
    let from_json: Vec<f64> = serde_json::from_str(&json.stdout).unwrap();
    let text = cli(&["infer", "--config", s(&cfg), "--weights", s(&w), "--input", s(&input)]);
    assert_eq!(from_json, parse_vector(&text.stdout, Path::new("stdout")).unwrap());
}

#[test]
fn infer_dimension_mismatch_fails() {
    let dir = TempDir::new().unwrap();
    let (m, _) = random_layer(4, 6, 1);
    let (m2, _) = random_layer(3, 5, 2);
    let w = write(&dir, "w.txt", &weight_file(&m));
    let w2 = write(&dir, "w2.txt", &weight_file(&m2));
    let short = write(&dir, "x.txt", "0.1 0.2 0.3");
    let ok_input = write(&dir, "x6.txt", "0 0 0 0 0 0");
    assert_ne!(cli(&["infer", "--weights", s(&w), "--input", s(&short)]).code, EXIT_OK);
    assert_ne!(
        cli(&["infer", "--weights", s(&w), "--weights", s(&w2), "--input", s(&ok_input)]).code,
        EXIT_OK
    );
}

#[test]
fn energy_table1_conditions() {
    let table1 = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/table1.cfg");
    let r = cli(&["energy", "--config", s(&table1)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = kv(&r.stdout);
    assert_eq!(v["ops"], 2000.0);
    assert!((5.8e8..=5.9e8).contains(&v["ops_per_sec"]));
    assert!(v["efficiency_ops_per_w"] > 1e14);
    assert_eq!(v["e_total_j"], v["e_mac_j"] + v["e_vpc_j"]);
}

#[test]
fn energy_zero_activity_is_static() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "idle.cfg", &config_with(&[("workload", "0.0")]));
    let r = cli(&["energy", "--config", s(&cfg)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = kv(&r.stdout);
    // per rail: comparator power over t_in + t_out, the ramp charging c_n up
    // to v_theta, and one comparator switching event
    let rails = 10.0 * 2.0;
    let static_j = rails * 250e-9 * 2.0 * T;
    let want = static_j + rails * (50e-15 * 0.2 + 0.5e-15);
    assert!((v["e_total_j"] - want).abs() <= 1e-3 * want, "{} vs {want}", v["e_total_j"]);
    assert!(static_j / v["e_total_j"] > 0.9);
    assert!(v["e_mac_j"] < 1e-3 * v["e_total_j"]);
}

#[test]
fn energy_missing_section_warns() {
    let dir = TempDir::new().unwrap();
    let start = DEFAULT_CONFIG.find("[energy]").unwrap();
    let end = DEFAULT_CONFIG.find("[experiment]").unwrap();
    let text = format!("{}{}", &DEFAULT_CONFIG[..start], &DEFAULT_CONFIG[end..]);
    let cfg = write(&dir, "noenergy.cfg", &text);
    let r = cli(&["energy", "--config", s(&cfg)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stderr.contains("warning"), "{}", r.stderr);
    let v = kv(&r.stdout);
    assert!(v["efficiency_ops_per_w"] > 0.0);
}

#[test]
fn outputs_round_trip_through_loaders() {
    let text = cli(&["neuron", "--inputs", "0.2,0.4,0.9"]);
    assert_eq!(text.code, EXIT_OK, "{}", text.stderr);
    let v = kv(&text.stdout);
    let json = cli(&["neuron", "--inputs", "0.2,0.4,0.9", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(doc["neuron"]["w_plus"].as_f64().unwrap(), v["w_plus_s"]);
    assert_eq!(doc["energy"]["e_total"].as_f64().unwrap(), v["e_total_j"]);

    let e = cli(&["energy"]);
    let ej = cli(&["energy", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&ej.stdout).unwrap();
    assert_eq!(doc["power"].as_f64().unwrap(), kv(&e.stdout)["power_w"]);

    // repeated runs print identical bytes
    assert_eq!(cli(&["energy"]).stdout, e.stdout);
}
