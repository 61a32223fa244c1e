use std::fs;
use std::process::Command;

fn sim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sim"))
}

const TINY: &str = "\
layout.sites = 1
array.m = 8
sim.k = 2
sim.rbs = 2
sim.drops = 3
pc.preset = nopc,fpc08
";

#[test]
fn presets_lists_all_names() {
    let out = sim().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for n in 1..=10 {
        assert!(text.lines().any(|l| l.starts_with(&format!("fig{n} "))), "fig{n}");
    }
    for n in 1..=4 {
        assert!(text.lines().any(|l| l.starts_with(&format!("desk{n} "))), "desk{n}");
    }
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let out_dir = dir.path().join("out");
    let out = sim()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--drops", "2", "--threads", "1", "--seed", "9", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(out_dir.join("kpi_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().nth(1).unwrap().contains(",2,9,nopc,"));
    for f in ["campaign_summary.csv", "drops.csv", "cdf_ue_throughput__nopc.csv", "cdf_pilot_power__fpc_p0m100_a0.8.csv", "config.txt"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}

#[test]
fn sweep_builds_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let out = sim()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--p0", "-100,-80", "--alpha", "0.5:0.7:0.1", "--include-nopc", "--drops", "1", "--out"])
        .arg(dir.path().join("sw"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(dir.path().join("sw/kpi_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 1 + 2 * 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "array.m = 7\n").unwrap();
    let out = sim().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let missing = sim().args(["run", "--config", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let unknown = sim().args(["run", "--preset", "fig99"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let usage = sim().arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    // A regular file where the output directory should go.
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = sim().args(["run", "--config"]).arg(&cfg).arg("--out").arg(blocker.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dump_channels_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let file = dir.path().join("drop.txt");
    let out = sim().args(["dump-channels", "--config"]).arg(&cfg).args(["--drop", "1", "--out"]).arg(&file).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dump = fpcsim::dump::ChannelDump::read_from(std::io::BufReader::new(fs::File::open(&file).unwrap())).unwrap();
    assert_eq!((dump.ports, dump.rbs, dump.users, dump.sectors), (8, 2, 6, 3));
    assert_eq!(dump.links.len(), 18);
    assert_eq!(dump.h.len(), 6 * 3 * 2 * 8);
    // The recorded attenuation fixes the channel's mean power scale.
    assert!(dump.links.iter().all(|l| l.attenuation_db > 0.0));
}
