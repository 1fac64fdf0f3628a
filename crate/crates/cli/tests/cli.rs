use std::path::Path;
use std::process::{Command, Output};

use limsup_cli::{emit_plot_data, run, ExperimentConfig, Params, PlotKind};

fn limsup(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_limsup"));
    cmd.args(args).env_remove("LIMSUP_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("LIMSUP_OUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Everything but the wall-clock line.
fn payload(text: &str) -> String {
    text.lines().filter(|l| !l.contains("wall_clock_seconds")).collect::<Vec<_>>().join("\n")
}

#[test]
fn classify_khintchine_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let o = limsup(&["classify", "--series", "r^1 * (r^-2)"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Divergent ⇒ Khintchine divergence case: full measure");
    assert!(dir.path().join("classify.csv").exists());
}

#[test]
fn classify_convergence_and_gauge() {
    let o = limsup(&["classify", "--series", "r^1 * (r^-2 * log(r)^-2)"], None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Convergent ⇒ Khintchine convergence case"));
    // Σ r · ψ(r)^s with ψ(r) = r^-3 diverges below s = 2/3 and converges above
    let o = limsup(&["classify", "--series", "r^1 * f(r^-3)", "--gauge", "r^1/2"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Divergent ⇒ Jarník divergence case"));
    let o = limsup(&["classify", "--series", "r^1 * f(r^-3)", "--gauge", "r^3/4"], None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Convergent ⇒ Jarník convergence case"));
}

#[test]
fn critical_exponent_of_cubic() {
    let o = limsup(&["critical-exponent", "--psi", "r^-3", "--weight", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stderr).trim(), "2/3");
    let o = limsup(&["critical-exponent", "--omega", "2", "--dim", "3"], None);
    assert_eq!(String::from_utf8_lossy(&o.stderr).trim(), "3/2");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(limsup(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(limsup(&["stage-scan", "--psi", "r^-3"], None).status.code(), Some(1));
    assert_eq!(limsup(&["stage-scan", "--psi", "r^-3", "--k", "1", "--n-hi", "3"], None).status.code(), Some(1));
    assert_eq!(limsup(&["classify", "--series", "r^1 * (q^-2)"], None).status.code(), Some(1));
    assert_eq!(limsup(&["loglaw", "--x", "golden", "--t-max", "2"], None).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"frobnicate\"\n").unwrap();
    let o = limsup(&["run", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown command"));
}

#[test]
fn resource_cap_exits_two() {
    let o = limsup(&["stage-scan", "--psi", "r^-1", "--k", "2", "--n-hi", "40", "--cap", "1000"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource cap exceeded"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(
        &cfg,
        "command = \"stage-scan\"\n[output]\nformat = \"jsonl\"\n[params]\npsi = \"r^-3\"\nk = 2\nn-hi = 9\n",
    )
    .unwrap();
    let out = dir.path().join("scan.jsonl");
    let o = limsup(&["run", "--config", cfg.to_str().unwrap(), "--n-hi", "4", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // header, four stages, summary, wall clock
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0]["config"]["params"]["n-hi"], 4);
    assert_eq!(lines[1]["n"], 1);
    // k^0 < q <= 2: the balls of radius 1/8 around p/2 cover half of [0, 1]
    assert_eq!(lines[1]["measure"], 0.5);
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = limsup(
        &[
            "schmidt",
            "--psi",
            "1/4 * r^-1",
            "--n-max",
            "2000",
            "--samples",
            "16",
            "--seed",
            "7",
            "-o",
            first.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&first).unwrap();
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    let echo = header["config"].clone();
    let mut cfg: ExperimentConfig = serde_json::from_value(echo).unwrap();
    cfg.output.path = None;
    let mut again = Vec::new();
    run(&cfg).unwrap().write_csv(&mut again).unwrap();
    let again = String::from_utf8(again).unwrap();
    // the echo differs only by the output path
    let strip = |s: &str| payload(s).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&text), strip(&again));
}

#[test]
fn payload_is_identical_serial_and_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("t{threads}.csv"));
        let o = limsup(
            &[
                "schmidt",
                "--psi",
                "1/4 * r^-1",
                "--n-max",
                "5000",
                "--samples",
                "40",
                "--seed",
                "11",
                "--threads",
                threads,
                "-o",
                path.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(o.status.code(), Some(0));
        runs.push(payload(&std::fs::read_to_string(&path).unwrap()).replace(path.to_str().unwrap(), ""));
    }
    assert_eq!(runs[0], runs[1]);
    let o = limsup(&["cf", "--samples", "50", "--depth", "200", "--seed", "3", "--threads", "1"], None);
    let p = limsup(&["cf", "--samples", "50", "--depth", "200", "--seed", "3"], None);
    assert_eq!(payload(&stdout(&o)), payload(&stdout(&p)));
}

#[test]
fn out_dir_env_sets_default_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = limsup(&["disjointness", "--q-max", "20", "--format", "jsonl"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("disjointness.jsonl")).unwrap();
    assert!(text.contains("\"failures\":0"));
    // only the final file remains
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("scan_plot.csv");
    let o = limsup(
        &["stage-scan", "--psi", "r^-3", "--k", "2", "--n-hi", "5", "--plot", plot.to_str().unwrap()],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,measure,partial_sum");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,0.5,0.5"));

    let plot = dir.path().join("loglaw_plot.csv");
    let o = limsup(&["loglaw", "--x", "golden", "--t-max", "50", "--plot", plot.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&plot).unwrap();
    assert!(text.starts_with("log_t,running_max\n"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 50f64.ln()).abs() < 1e-12);

    let o = limsup(&["classify", "--series", "r^0 * (r^-2)", "--plot", plot.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_payload_plots_header_only() {
    // [1/5, 3/10) contains no base p/q with q <= 2
    let cfg = ExperimentConfig {
        command: limsup_cli::Command::Horoballs,
        seed: 0,
        output: Default::default(),
        params: Params {
            base: Some("1/5:3/10".into()),
            r_lo: Some("1/8".into()),
            r_hi: Some("1".into()),
            ..Params::default()
        },
    };
    let env = run(&cfg).unwrap();
    assert!(env.payload.rows.is_empty());
    assert!(emit_plot_data(&env, PlotKind::HoroballRatio, Vec::new()).is_err());
    let cfg = ExperimentConfig {
        params: Params {
            radii: Some("1".into()),
            lambda: Some("1/8".into()),
            r_lo: None,
            r_hi: None,
            ..cfg.params.clone()
        },
        ..cfg
    };
    let mut env = run(&cfg).unwrap();
    assert_eq!(env.payload.rows[0][3], 0);
    env.payload.rows.clear();
    let mut buf = Vec::new();
    emit_plot_data(&env, PlotKind::HoroballRatio, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "log_r,ratio\n");
}

#[test]
fn kind_mismatch_is_rejected() {
    let cfg = ExperimentConfig {
        command: limsup_cli::Command::CriticalExponent,
        seed: 0,
        output: Default::default(),
        params: Params { psi: Some("r^-2".into()), ..Params::default() },
    };
    let env = run(&cfg).unwrap();
    assert!(emit_plot_data(&env, PlotKind::Loglaw, Vec::new()).is_err());
}

#[test]
fn geodesic_commands() {
    let o = limsup(&["excursions", "--x", "planted:20:1000000", "--t-max", "120", "--step", "1e-4"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let deep: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[4].parse::<f64>().unwrap() > 3.0)
        .collect();
    assert_eq!(deep.len(), 1);
    assert_eq!(deep[0][6], "1000000");

    let o = limsup(&["cf", "--x", "16/113"], None);
    let text = stdout(&o);
    assert!(text.contains("\"status\":\"rational\""));
    assert!(text.contains("1,7,1,7\n2,16,16,113\n"));
}
