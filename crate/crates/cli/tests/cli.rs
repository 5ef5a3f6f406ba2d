use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn damrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_damrl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const EXAMPLE1: &str = "[base]\nkind = \"mrl\"\nexpr = \"1\"\n\n[covariate]\nexpr = \"exp(-t)\"\n";

fn closed_form_ce1(t: f64) -> f64 {
    let a = 2.0 + t;
    let b = 3.0 + t;
    let d = 5.0 + 2.0 * t;
    (a * a - 1.0) * b / (a * d) - a / (b * d)
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn classify_example1_shows_star_ifr() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ex1.toml", EXAMPLE1);
    let o = damrl(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o).lines().find(|l| l.starts_with("IFR ")).unwrap().to_string();
    let cols: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(cols[..3], ["IFR", "boundary", "holds"]);
}

#[test]
fn validate_flags_steep_covariate() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", "[base]\nexpr = \"1\"\n[covariate]\nexpr = \"exp(-3*t)\"\n");
    let o = damrl(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("(iii) t+c+m increasing fails"));
}

#[test]
fn validate_accepts_example1() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ex1.toml", EXAMPLE1);
    let o = damrl(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Lemma 1 for c = exp(-t): accept"));
}

#[test]
fn malformed_expression_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "p.toml", "[base]\nexpr = \"1/(2+\"\n");
    let o = damrl(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let unknown = write(dir.path(), "u.toml", "[base]\nexpr = \"1\"\ncolour = \"red\"\n");
    assert_eq!(code(&damrl(&["validate", "--config", unknown.to_str().unwrap()])), 2);
    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&damrl(&["validate", "--config", missing.to_str().unwrap()])), 2);
    let ok = write(dir.path(), "ex1.toml", EXAMPLE1);
    assert_eq!(code(&damrl(&["classify", "--config", ok.to_str().unwrap(), "--tol", "-1"])), 2);
    assert_eq!(code(&damrl(&["classify", "--config", ok.to_str().unwrap(), "--grid-t", "0"])), 2);
    assert_eq!(code(&damrl(&["theorems", "--config", ok.to_str().unwrap(), "--id", "T11"])), 2);
    assert_eq!(code(&damrl(&["classify"])), 2);
    assert_eq!(code(&damrl(&["frobnicate"])), 2);
}

#[test]
fn rejected_composition_needs_force() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", "[base]\nexpr = \"1\"\n[covariate]\nexpr = \"exp(-3*t)\"\n");
    let path = cfg.to_str().unwrap();
    assert_eq!(code(&damrl(&["classify", "--config", path])), 1);
    let forced = damrl(&["classify", "--config", path, "--force"]);
    assert_eq!(code(&forced), 0);
    assert!(stdout(&forced).contains("may not correspond to any random variable"));
}

#[test]
fn theorems_single_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ce1.toml", "[base]\nexpr = \"1/(2+t)\"\n[covariate]\nexpr = \"1/(3+t)\"\n");
    let out = dir.path().join("t1.csv");
    let o = damrl(&["theorems", "--config", cfg.to_str().unwrap(), "--id", "T1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("class holds without the hypotheses"));
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "T1,fails,holds,holds,holds,false,true,true,false"
    );
}

#[test]
fn export_example1_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ex1.toml", EXAMPLE1);
    let out = dir.path().join("curves.csv");
    let args = [
        "export",
        "--config",
        cfg.to_str().unwrap(),
        "--grid-t",
        "2",
        "--grid-points",
        "5",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(code(&damrl(&args)), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,m,r,S,m_star,r_star,S_star\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 5);
    for (k, row) in rows.iter().enumerate() {
        let t = 0.5 * k as f64;
        assert_eq!(row[0], t);
        let e = (-t).exp();
        assert!((row[5] - (1.0 - e) / (1.0 + e)).abs() < 1e-12);
    }
    // Same config, same bytes.
    let again = dir.path().join("again.csv");
    let mut args2 = args;
    args2[8] = again.to_str().unwrap();
    assert_eq!(code(&damrl(&args2)), 0);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn export_counterexample1_hazard() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ce1.toml", "[base]\nexpr = \"1/(2+t)\"\n[covariate]\nexpr = \"1/(3+t)\"\n[output]\ncsv = \"ce1.csv\"\n");
    let o = damrl(&["export", "--config", cfg.to_str().unwrap(), "--grid-t", "20", "--grid-points", "201"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&dir.path().join("ce1.csv"));
    assert_eq!(rows.len(), 201);
    for row in rows {
        assert!((row[5] - closed_form_ce1(row[0])).abs() <= 1e-8, "t = {}", row[0]);
    }
}

#[test]
fn export_identity_columns_match() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "id.toml", "[base]\nexpr = \"1+t\"\n");
    let o = damrl(&["export", "--config", cfg.to_str().unwrap(), "--grid-t", "5", "--grid-points", "11"]);
    assert_eq!(code(&o), 0);
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[1..4], f[4..7]);
    }
}

#[test]
fn catalog_verify_and_list() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("catalog.csv");
    let o = damrl(&["catalog", "verify", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 mismatches"));
    let rows = fs::read_to_string(out).unwrap().lines().count() - 1;
    assert!(rows >= 40);

    let one = damrl(&["catalog", "verify", "--entry", "example1"]);
    assert_eq!(code(&one), 0);
    assert!(stdout(&one).contains("1 entries"));
    assert_eq!(code(&damrl(&["catalog", "verify", "--entry", "no_such_entry"])), 2);
    assert!(stdout(&damrl(&["catalog", "list"])).contains("counterexample3"));
}

#[test]
fn search_is_reproducible() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "fam.toml", "name = \"inverse\"\ntemplate = \"1/({a}+t)\"\n\n[params]\na = [2.0, 5.0]\n");
    let cfg = write(
        dir.path(),
        "s.toml",
        "[base]\nexpr = \"1/(2+t)\"\n\n[search]\nid = \"T1\"\ndrop = 1\ntrials = 6\nfamily = \"fam.toml\"\n",
    );
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = damrl(&["search", "--config", cfg.to_str().unwrap(), "--seed", "5", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("c_a,lemma1,hyp1,hyp2,base_verdict,star_verdict"));
    assert!(lines.all(|l| l.ends_with(",accept,fails,holds,holds,holds")));
}

#[test]
fn search_with_no_trials_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let fam = write(dir.path(), "fam.toml", "template = \"1/({a}+t)\"\n[params]\na = [2.0, 5.0]\n");
    let cfg = write(dir.path(), "s.toml", "[base]\nexpr = \"1/(2+t)\"\n");
    let o = damrl(&[
        "search",
        "--config",
        cfg.to_str().unwrap(),
        "--id",
        "T1",
        "--drop",
        "1",
        "--trials",
        "0",
        "--family",
        fam.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("inconclusive"));
    let bad = write(dir.path(), "bad.toml", "template = \"1/({a}+t)\"\n");
    let o = damrl(&["search", "--config", cfg.to_str().unwrap(), "--id", "T1", "--drop", "1", "--family", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}
