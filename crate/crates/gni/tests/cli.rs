use std::process::{Command, Output};

fn gni(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gni"));
    c.args(args).env_remove("GNI_SEED");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CONFIG: &str = "
game = bilinear
n1 = 2
n2 = 2
starts = 2
init = normal
seed = 1
max_iters = 500

[solver gni]
";

#[test]
fn version_and_listings() {
    let o = gni(&["version"], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), format!("gni {}", env!("CARGO_PKG_VERSION")));
    let o = gni(&["list-games"], &[]);
    assert!(o.status.success());
    for label in ["bilinear", "quadratic", "dirac_delta", "linear_gan", "covariance"] {
        assert!(stdout(&o).contains(label));
    }
    let o = gni(&["list-presets"], &[]);
    assert!(stdout(&o).contains("bilinear-fig1") && stdout(&o).contains("dirac-multistart"));
}

#[test]
fn run_from_config_with_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("study.cfg");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = tmp.path().join("out");
    let summary = |dir: &std::path::Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
    };

    let o = gni(&["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&out)["seed"], 1);
    assert!(out.join("traces/gni_0001.csv").exists());
    assert!(!out.join("convergence.svg").exists());

    // The environment beats the file.
    let o = gni(&["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()], &[("GNI_SEED", "5")]);
    assert!(o.status.success());
    assert_eq!(summary(&out)["seed"], 5);

    // Flags beat the environment.
    let o = gni(
        &["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--seed", "7", "--svg", "--set", "gni.max_iters=20"],
        &[("GNI_SEED", "5")],
    );
    assert!(o.status.success());
    assert_eq!(summary(&out)["seed"], 7);
    assert!(out.join("convergence.svg").exists());
    let trace = std::fs::read_to_string(out.join("traces/gni_0000.csv")).unwrap();
    assert!(trace.lines().count() <= 22);
}

#[test]
fn errors_give_a_nonzero_exit() {
    let o = gni(&["run", "--preset", "no-such-preset"], &[]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown preset"));

    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "game = bilinear\n").unwrap();
    let o = gni(&["run", "--config", cfg.to_str().unwrap()], &[]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least one solver"));

    let o = gni(&["run"], &[]);
    assert!(!o.status.success());
    let o = gni(&["check", "--game", "nope"], &[]);
    assert!(!o.status.success());
}

#[test]
fn check_reports_every_diagnostic() {
    let o = gni(&["check", "--game", "bilinear", "--probes", "20"], &[]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.contains("PASS")), "{text}");
    assert!(text.contains("lemma1_sandwich") || text.contains("sandwich"), "{text}");
}
