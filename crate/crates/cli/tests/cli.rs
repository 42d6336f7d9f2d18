use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn occam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_occam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(occam(&["--help"]).status.code(), Some(0));
    assert_eq!(occam(&["--version"]).status.code(), Some(0));
    assert_eq!(occam(&["sweep-rho", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(occam(&[]).status.code(), Some(1));
    assert_eq!(occam(&["bogus"]).status.code(), Some(1));
    assert_eq!(occam(&["sweep-ctau", "--reps", "many"]).status.code(), Some(1));
    assert_eq!(occam(&["sweep-ctau", "--theta", "sometimes", "--reps", "1"]).status.code(), Some(1));
    assert_eq!(occam(&["sweep-rho", "--preset", "trend"]).status.code(), Some(1));
}

#[test]
fn generate_fit_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let fitted = dir.path().join("fit");
    let gen = occam(&["generate", "--n", "150", "--degree", "25", "--rho", "0.05", "--seed", "4", "--out", path(&data)]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    for file in ["edges.txt", "memberships.csv", "theta.csv", "metadata.txt"] {
        assert!(data.join(file).exists(), "{file}");
    }
    let edges = fs::read_to_string(data.join("edges.txt")).unwrap();
    let pairs: Vec<(usize, usize)> = edges
        .lines()
        .map(|l| {
            let mut it = l.split(' ').map(|s| s.parse::<usize>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert!(pairs.iter().all(|(i, j)| i < j));
    assert!(pairs.windows(2).all(|w| w[0] < w[1]));

    let fit = occam(&["fit", "--graph", path(&data.join("edges.txt")), "--k", "3", "--n", "150", "--out", path(&fitted)]);
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let z_hat = fs::read_to_string(fitted.join("z_hat.csv")).unwrap();
    assert_eq!(z_hat.lines().count(), 150);
    assert!(z_hat.lines().all(|l| l.split(',').count() == 3));
    let meta = fs::read_to_string(fitted.join("metadata.txt")).unwrap();
    assert!(meta.contains("alpha_hat=") && meta.contains("tau="));

    let eval = occam(&["eval", "--truth", path(&data.join("memberships.csv")), "--estimate", path(&fitted.join("z_hat.csv"))]);
    assert!(eval.status.success());
    let text = String::from_utf8(eval.stdout).unwrap();
    let score: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("exnvi="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(score > 0.5, "{text}");
}

#[test]
fn fit_two_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "# two triangles\n0 1\n0 2\n1 2\n3 4\n3 5\n4 5\n").unwrap();
    let out = dir.path().join("out");
    let run = occam(&["fit", "--graph", path(&graph), "--k", "2", "--out", path(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let gamma = fs::read_to_string(out.join("gamma_hat.csv")).unwrap();
    let rows: Vec<&str> = gamma.lines().collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0] == rows[1] && rows[1] == rows[2]);
    assert!(rows[3] == rows[4] && rows[4] == rows[5]);
    assert_ne!(rows[0], rows[3]);
    assert!(rows.iter().all(|r| r.split(',').filter(|x| *x == "1").count() == 1));
}

#[test]
fn malformed_graph_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.txt");
    fs::write(&graph, "0 1\na b c\n").unwrap();
    let run = occam(&["fit", "--graph", path(&graph), "--k", "1", "--out", path(&dir.path().join("o"))]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 2"));
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "sweep-ctau".to_string(),
            "--n".into(),
            "120".into(),
            "--degree".into(),
            "20".into(),
            "--grid".into(),
            "0.1,1".into(),
            "--reps".into(),
            "2".into(),
            "--restarts".into(),
            "3".into(),
            "--seed".into(),
            "5".into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
        ]
    };
    for out in [&a, &b] {
        let argv = args(out);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert_eq!(occam(&refs).status.code(), Some(0));
    }
    let first = fs::read_to_string(&a).unwrap();
    assert_eq!(first, fs::read_to_string(&b).unwrap());
    assert_eq!(first.lines().count(), 2 + 4);
    assert!(first.starts_with("# schema=1\n"));
}

#[test]
fn spec_file_drives_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.txt");
    fs::write(&spec, "kind=rho\ngrid=0,0.2\nreps=1\nn=90\ndegree=15\nrestarts=2\n").unwrap();
    let run = occam(&["sweep-rho", "--spec", path(&spec)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = String::from_utf8(run.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn failed_rows_exit_two() {
    let run = occam(&["trend-n", "--grid", "20,30", "--degree", "500", "--reps", "1"]);
    assert_eq!(run.status.code(), Some(2));
    let csv = String::from_utf8(run.stdout).unwrap();
    assert_eq!(csv.matches("failed").count(), 2);
}

#[test]
fn single_community_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "0 1\n1 2\n2 3\n3 0\n0 2\n").unwrap();
    let out = dir.path().join("out");
    let run = occam(&["fit", "--graph", path(&graph), "--k", "1", "--out", path(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let z_hat = fs::read_to_string(out.join("z_hat.csv")).unwrap();
    assert_eq!(z_hat, "1\n1\n1\n1\n");
}
