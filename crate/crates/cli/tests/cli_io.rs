use std::fs;
use std::process::Command;

use twomode_cli::output::read_csv;
use twomode_cli::{parse_config, parse_manifest_config, run, summarize_csv, ConfigError, Engine};
use twomode_core::Channel;

const TABLE_RUN: &str = "omega_x = 1.0\nomega_y = 0.8\ng = 0.1\nalpha = 1.0\n";

fn short(engine: &str) -> String {
    format!("{TABLE_RUN}engine = \"{engine}\"\nt_end = 5.0\nn_t = 81\n")
}

#[test]
fn runs_are_byte_identical() {
    let cfg = parse_config(&short("both")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = run(&cfg, a.path()).unwrap().files;
    let fb = run(&cfg, b.path()).unwrap().files;
    assert_eq!(fa.len(), 5);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn table_config_writes_all_files() {
    let cfg = parse_config(TABLE_RUN).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(&cfg, dir.path()).unwrap();
    for name in [
        "occupations.csv",
        "entropy.csv",
        "energies.csv",
        "heatmap.csv",
        "manifest.toml",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let hm = read_csv(fs::File::open(dir.path().join("heatmap.csv")).unwrap()).unwrap();
    assert_eq!(hm.names.len(), 8);
    assert_eq!(hm.time.len(), 801);
}

#[test]
fn gaussian_only_has_no_heatmap() {
    let cfg = parse_config(&short("gaussian")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(&cfg, dir.path()).unwrap();
    assert!(!dir.path().join("heatmap.csv").exists());
    assert!(dir.path().join("occupations.csv").exists());
}

#[test]
fn emit_limits_columns() {
    let cfg = parse_config(&format!("{}emit = \"n_y\"\n", short("both"))).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = run(&cfg, dir.path()).unwrap().files;
    let names: Vec<_> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["occupations.csv", "manifest.toml"]);
    let t = read_csv(fs::File::open(&files[0]).unwrap()).unwrap();
    assert_eq!(t.names, vec!["gaussian_n_y", "fock_n_y"]);
}

#[test]
fn manifest_round_trip() {
    let cfg = parse_config(&format!("{}n_cut = 6\ntol_occupation = 0.02\n", short("fock"))).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert_eq!(parse_manifest_config(&text).unwrap(), cfg);
    assert!(text.contains("[run]") && text.contains("[tolerances]"));
}

#[test]
fn csv_values_match_memory() {
    let cfg = parse_config(&short("both")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run(&cfg, dir.path()).unwrap();
    let t = read_csv(fs::File::open(dir.path().join("entropy.csv")).unwrap()).unwrap();
    let g = out.runs.gaussian.as_ref().unwrap();
    let f = &out.runs.fock.as_ref().unwrap().series;
    for (name, col) in t.names.iter().zip(&t.columns) {
        let (engine, channel) = name.split_once('_').unwrap();
        let series = if engine == "gaussian" { g } else { f };
        let mem = series.get(channel.parse::<Channel>().unwrap()).unwrap();
        for (a, b) in col.iter().zip(mem) {
            assert!((a - b).abs() <= 1e-15 * b.abs(), "{name}: {a} vs {b}");
        }
    }
    assert_eq!(t.time, cfg.grid().times());
}

#[test]
fn summarize_reads_emitted_csv() {
    let cfg = parse_config(&short("gaussian")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(&cfg, dir.path()).unwrap();
    let s = summarize_csv(&dir.path().join("occupations.csv")).unwrap();
    assert!(s.get("gaussian_n_x").unwrap().mean > 0.9);
    assert!(s.to_string().starts_with("quantity"));
}

#[test]
fn equal_start_and_end_rejected() {
    assert!(matches!(
        parse_config(&format!("{TABLE_RUN}t_start = 3.0\nt_end = 3.0\n")),
        Err(ConfigError::Validation(_))
    ));
    assert_eq!(parse_config(TABLE_RUN).unwrap().engine, Engine::Both);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_twomode");
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, short("gaussian")).unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "omega_x = \"abc\"\n").unwrap();

    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env_remove("TWOMODE_OUT_DIR")
            .output()
            .unwrap()
    };

    let out = dir.path().join("out");
    let ok = status(&[
        "simulate",
        "--config",
        good.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(out.join("manifest.toml").exists());

    assert_eq!(
        status(&["simulate", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("missing.csv");
    assert_eq!(status(&["summarize", missing.to_str().unwrap()]).status.code(), Some(4));
    // ω_x = ω_y with g = 0 has no modal basis
    let degenerate = status(&["modes", "--omega-x", "1", "--omega-y", "1", "-g", "0"]);
    assert_eq!(degenerate.status.code(), Some(3));

    let modes = status(&[
        "modes",
        "--omega-x",
        "1.0",
        "--omega-y",
        "0.8",
        "-g",
        "0.15",
        "--x0",
        "1.4142135623730951",
    ]);
    let text = String::from_utf8(modes.stdout).unwrap();
    assert!(text.contains("0.919499") && text.contains("-1.863325") && text.contains("det V = -1.326650"));

    let env_out = dir.path().join("from_env");
    let via_env = Command::new(bin)
        .args(["simulate", "--config", good.to_str().unwrap()])
        .env("TWOMODE_OUT_DIR", &env_out)
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(0));
    assert!(env_out.join("occupations.csv").exists());
}
