use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ibnls(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibnls"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn energy_critical_pairs_in_dimension_six() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ibnls(&["pairs", "--lemma", "4.1", "--dim", "6", "--b", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PASS pairs:"));
    let pairs = fs::read_to_string(tmp.path().join("pairs.csv")).unwrap();
    assert!(pairs.contains("q_crit,20/3,5/2,0,true"), "{pairs}");
    let aux = fs::read_to_string(tmp.path().join("auxiliaries.csv")).unwrap();
    assert!(aux.contains("alpha,3"), "{aux}");
    assert!(tmp.path().join("manifest.txt").exists());
    assert!(fs::read_to_string(tmp.path().join("summary.txt")).unwrap().starts_with("PASS"));
}

#[test]
fn nonpositive_dt_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ibnls(&["simulate", "--dim", "1", "--b", "1/2", "--alpha", "3", "--set", "solver.dt=0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dt"), "{}", stderr(&o));
    // The manifest is written even when the run fails.
    assert!(tmp.path().join("manifest.txt").exists());
    assert!(!tmp.path().join("summary.txt").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(ibnls(&["no-such-command"], tmp.path()).status.code(), Some(2));
    assert_eq!(ibnls(&["classify", "--set", "grid.mm=3"], tmp.path()).status.code(), Some(2));
    assert_eq!(ibnls(&["classify", "--set", "grid.m"], tmp.path()).status.code(), Some(2));
    let o = ibnls(&["classify", "--dim", "3", "--b", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "missing alpha");
    assert!(stderr(&o).contains("params.alpha"), "{}", stderr(&o));
}

#[test]
fn config_errors_carry_line_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# comment\n[params]\ndim = 1\nalpha = 8/0\n").unwrap();
    let o = ibnls(&["classify", "--config", cfg.to_str().unwrap()], &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "[params]\ndim = 3\nb = 1\nalpha = 1\n").unwrap();
    let out = tmp.path().join("out");
    let o = ibnls(&["classify", "--config", cfg.to_str().unwrap(), "--alpha", "2"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("classify.csv")).unwrap();
    assert!(csv.contains("3,1,2,1,0,inf,mass-critical"), "{csv}");
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("params.alpha = 2  # flag"), "{manifest}");
    assert!(manifest.contains("params.dim = 3  # line 2"), "{manifest}");
}

#[test]
fn failing_verdict_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ibnls(
        &[
            "conserve-test", "--dim", "1", "--b", "1/2", "--alpha", "3",
            "--set", "grid.m=128", "--set", "solver.t_end=0.02", "--set", "conserve.energy_ratio=1e9",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("FAIL conserve-test:"));
    let csv = fs::read_to_string(tmp.path().join("conservation.csv")).unwrap();
    assert!(csv.starts_with("dt,t,mass,energy\n"));
}

#[test]
fn simulate_snapshots_feed_the_norm_command() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let o = ibnls(
        &["simulate", "--dim", "1", "--b", "1/2", "--alpha", "3", "--set", "grid.m=128", "--set", "solver.t_end=0.02", "--set", "solver.stride=5"],
        &run,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let snaps = fs::read_dir(run.join("fields")).unwrap().count();
    assert_eq!(snaps, 5);
    let traj = fs::read_to_string(run.join("trajectory.csv")).unwrap();
    let mass: f64 = traj.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();

    let norm = tmp.path().join("norm");
    let fields = format!("norm.fields={}", run.join("fields").display());
    let o = ibnls(&["norm", "--set", &fields, "--set", "norm.q=inf", "--set", "norm.r=2"], &norm);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(norm.join("norm.csv")).unwrap();
    let value: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - mass.sqrt()).abs() <= 1e-12 * value, "{value} vs {}", mass.sqrt());
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["strichartz-probe", "--dim", "1", "--set", "grid.m=256", "--set", "grid.l=60", "--set", "strichartz.trials=10", "--seed", "11"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(ibnls(&args, &a).status.code(), Some(0));
    assert_eq!(ibnls(&args, &b).status.code(), Some(0));
    let name = "strichartz_probe.csv";
    assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    let c = tmp.path().join("c");
    let mut other = args.to_vec();
    *other.last_mut().unwrap() = "12";
    assert_eq!(ibnls(&other, &c).status.code(), Some(0));
    assert_ne!(fs::read(a.join(name)).unwrap(), fs::read(c.join(name)).unwrap());
}

#[test]
fn long_help_lists_config_keys() {
    let o = Command::new(env!("CARGO_BIN_EXE_ibnls")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("solver.dt = 0.001"), "{text}");
    assert!(text.contains("Exit status"));
}
