use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_satnoma");

const SMALL: &str = "\
[sim]
grid_rows = 4
grid_cols = 4
n_users = 16
n_slots = 20
n_rep = 5
";

fn satnoma(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("SATNOMA_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn summary_field(json: &str, key: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v[key].as_f64().unwrap()
}

#[test]
fn probe_nine_trace_has_nine_columns_and_a_row_per_slot() {
    let o = satnoma(&["snr", "--probe-9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0].split(',').count(), 11);
    assert!(lines[0].ends_with("user_8"));
}

#[test]
fn single_slot_pass_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[sim]\nn_slots = 1\n");
    let o = satnoma(&["--config", &cfg, "snr", "--probe-9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn invalid_beamwidth_exits_two_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[gain]\npsi_b = 0.0\n");
    let o = satnoma(&["--config", &cfg, "snr"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gain.psi_b"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exits_two_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[sim]\nn_sics = 4\n");
    let o = satnoma(&["--config", &cfg, "simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_sics"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_exits_three() {
    let o = satnoma(&["--config", "/nonexistent/satnoma.toml", "snr"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_three() {
    let o = satnoma(&["--out", "/nonexistent/dir/out.csv", "snr", "--probe-9"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zero_n_sic_override_is_a_config_error() {
    let o = satnoma(&["simulate", "--n-sic", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sim.n_sic"), "{}", stderr(&o));
}

#[test]
fn simulate_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = satnoma(&[
            "--config",
            &cfg,
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
            "simulate",
            "--n-sic",
            "4",
            "--permute",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let mut summary = out.clone().into_os_string();
        summary.push(".summary.json");
        (fs::read(&out).unwrap(), fs::read(summary).unwrap())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn simulate_csv_lists_every_user() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let summary = dir.path().join("s.json");
    let o = satnoma(&[
        "--config",
        &cfg,
        "simulate",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "user,lat,lon,throughput_bps");
    assert_eq!(lines.count(), 16);
    let json = fs::read_to_string(summary).unwrap();
    assert!(summary_field(&json, "min") > 0.0);
}

#[test]
fn full_sic_simulation_meets_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let summary = dir.path().join("s.json");
    let o = satnoma(&[
        "--config",
        &cfg,
        "simulate",
        "--n-sic",
        "16",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json = fs::read_to_string(&summary).unwrap();
    let sum = summary_field(&json, "sum");
    let bound = summary_field(&json, "sum_rate_bound");
    assert!((sum - bound).abs() <= 1e-3 * bound, "{sum} vs {bound}");

    let o = satnoma(&[
        "--config",
        &cfg,
        "simulate",
        "--n-sic",
        "4",
        "--moderate",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let moderated = summary_field(&fs::read_to_string(&summary).unwrap(), "sum");
    assert!(moderated < bound);
}

#[test]
fn sweep_writes_every_combination_and_the_bound_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = satnoma(&["--config", &cfg, "sweep", "--n-sic", "2,3,16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n_sic,moderate,permute,min_bps,mean_bps,max_bps,sum_bps"
    );
    assert_eq!(lines.len(), 1 + 12 + 1);
    let bound_row: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(bound_row[0], "bound");
    let full: Vec<&str> = lines
        .iter()
        .find(|l| l.starts_with("16,false,false,"))
        .unwrap()
        .split(',')
        .collect();
    let sum: f64 = full[6].parse().unwrap();
    let bound: f64 = bound_row[6].parse().unwrap();
    assert!((sum - bound).abs() <= 1e-3 * bound);
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |threads: &str| {
        Command::new(BIN)
            .args(["--config", &cfg, "sweep", "--n-sic", "2,4"])
            .env("SATNOMA_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn bad_n_sic_list_is_a_config_error() {
    let o = satnoma(&["sweep", "--n-sic", "2,x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_with_optimal_order() {
    let o = satnoma(&["verify", "--trials", "100", "--samples", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let reports: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(reports.len() >= 4);
    assert!(reports.iter().all(|r| r["failures"].as_u64() == Some(0)));
}

#[test]
fn verify_with_zero_trials_passes() {
    let o = satnoma(&["verify", "--trials", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn verify_flags_the_ascending_negative_control() {
    let o = satnoma(&[
        "verify",
        "--trials",
        "100",
        "--samples",
        "10",
        "--policy",
        "ascending",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sic_order_optimality"));
}

#[test]
fn shipped_config_matches_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    let with = satnoma(&["--config", path.to_str().unwrap(), "snr", "--probe-9"]);
    let without = satnoma(&["snr", "--probe-9"]);
    assert!(with.status.success(), "{}", stderr(&with));
    assert_eq!(with.stdout, without.stdout);
}
