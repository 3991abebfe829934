use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_agcodes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn new_code(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.path().join(name);
    let mut full = vec!["code", "new"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path_str(&out)]);
    let o = run(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn words(text: &str) -> Vec<u32> {
    text.split_whitespace().map(|t| t.parse().unwrap()).collect()
}

#[test]
fn code_new_descriptors() {
    let dir = TempDir::new().unwrap();
    let o = run(&["code", "new", "hermitian", "3", "14"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("[n=26, k=12, d*=12]"));
    assert!(stdout(&o).contains("m = 14"));

    let o = run(&["code", "new", "rational", "16", "6"]);
    assert!(stderr(&o).contains("[n=15, k=7, d*=9]"));

    let o = run(&["code", "new", "hermitian", "3", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2g - 1"));
    let o = run(&["code", "new", "hermitian", "3", "30"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("length n = 26"));

    let p = new_code(&dir, "x.toml", &["hermitian", "2", "4", "--exclude", "(0,0)", "--exclude", "(1,2)"]);
    let text = fs::read_to_string(p).unwrap();
    assert!(text.contains("(0,0)") && text.contains("(1,2)"));
}

#[test]
fn corrupt_is_seeded_and_exact() {
    let dir = TempDir::new().unwrap();
    let code = new_code(&dir, "h.toml", &["hermitian", "3", "14"]);
    let msg = write(&dir, "m.txt", "1 2 3 4 5 6 7 8 0 1 2 3\n");
    let o = run(&["encode", path_str(&code), path_str(&msg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cw_text = stdout(&o);
    let cw = write(&dir, "cw.txt", &cw_text);
    let sent = words(&cw_text);

    let zero = run(&["corrupt", path_str(&code), path_str(&cw), "0", "--seed", "3"]);
    assert_eq!(words(&stdout(&zero)), sent);

    for seed in 0..100 {
        let s = seed.to_string();
        let w = (seed % 7 + 1).to_string();
        let a = run(&["corrupt", path_str(&code), path_str(&cw), &w, "--seed", &s]);
        let b = run(&["corrupt", path_str(&code), path_str(&cw), &w, "--seed", &s]);
        assert_eq!(stdout(&a), stdout(&b));
        let got = words(&stdout(&a));
        let dist = got.iter().zip(&sent).filter(|(x, y)| x != y).count();
        assert_eq!(dist, seed % 7 + 1);
    }

    let o = run(&["corrupt", path_str(&code), path_str(&cw), "27"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decode_variants_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = new_code(&dir, "h.toml", &["hermitian", "3", "14"]);
    let msg = write(&dir, "m.txt", "1 2 3 4 5 6 7 8 0 1 2 3");
    let sent = stdout(&run(&["encode", path_str(&code), path_str(&msg)]));
    let cw = write(&dir, "cw.txt", &sent);
    let rx_path = dir.path().join("rx.txt");
    let o = run(&["corrupt", path_str(&code), path_str(&cw), "5", "--seed", "11", "--out", path_str(&rx_path)]);
    assert!(o.status.success());

    for backend in ["dense", "module"] {
        let o = run(&["decode", path_str(&code), path_str(&rx_path), "--e", "2", "--backend", backend]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = stdout(&o);
        assert!(text.starts_with(&format!("# backend={backend} e=2 tau=5 q_found=true entries=1")));
        assert!(text.contains(sent.trim()));
    }
    let o = run(&["decode", path_str(&code), path_str(&rx_path), "--unique"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("5\t1 2 3 4 5 6 7 8 0 1 2 3\t"));
    let o = run(&["decode", path_str(&code), path_str(&rx_path), "--adaptive"]);
    assert!(stdout(&o).contains("e=2"));

    let dump = dir.path().join("mod.txt");
    let o = run(&["decode", path_str(&code), path_str(&rx_path), "--e", "1", "--dump-module", path_str(&dump)]);
    assert!(o.status.success());
    let text = fs::read_to_string(dump).unwrap();
    assert!(text.starts_with("# weights") && text.contains("# reduced"));

    let far = dir.path().join("far.txt");
    run(&["corrupt", path_str(&code), path_str(&cw), "13", "--seed", "1", "--out", path_str(&far)]);
    let o = run(&["decode", path_str(&code), path_str(&far), "--unique"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["decode", path_str(&code), path_str(&rx_path), "--e", "2", "--tau", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let short = write(&dir, "short.txt", "1 2 3");
    let o = run(&["decode", path_str(&code), path_str(&short)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn radius_table_csv() {
    let dir = TempDir::new().unwrap();
    let code = new_code(&dir, "h.toml", &["hermitian", "3", "14"]);
    let o = run(&["radius-table", path_str(&code), "--s", "1", "--ell", "1", "--e", "0,1,2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,degG,g,p,s,ℓ,e,t*,tau,tau_classic,penalty_reduction");
    assert_eq!(lines[1], "26,14,3,3,1,1,0,1,4,5/2,0");
    assert_eq!(lines[2], "26,14,3,3,1,1,1,1,16/3,5/2,4/3");
    assert_eq!(lines[3], "26,14,3,3,1,1,2,1,52/9,5/2,16/9");

    let rs = new_code(&dir, "rs.toml", &["rational", "16", "6"]);
    let o = run(&["radius-table", path_str(&rs), "--s", "2", "--ell", "3", "--e", "0"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("15,6,0,2,2,3,0,0,19/4,19/4,0"));
}

#[test]
fn experiment_frontier_follows_radius() {
    let dir = TempDir::new().unwrap();
    let code_path = new_code(&dir, "h.toml", &["hermitian", "3", "14"]);
    let descriptor = fs::read_to_string(code_path).unwrap();
    let spec = format!(
        "seed = 42\ntrials = 100\nweight_min = 1\nweight_max = 6\ns = [1]\nell = [1]\ne = [0, 1, 2]\n\n[code]\n{descriptor}"
    );
    let spec_path = write(&dir, "spec.toml", &spec);
    let csv_path = dir.path().join("out.csv");
    let o = run(&["experiment", path_str(&spec_path), "--out", path_str(&csv_path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,ℓ,e,weight,trials,successes,mean_list_size,mean_wall_time_ms,backend"));
    let radius = [4usize, 5, 5];
    let mut frontier = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (e, w, succ): (usize, usize, u64) = (f[2].parse().unwrap(), f[3].parse().unwrap(), f[5].parse().unwrap());
        if w <= radius[e] {
            assert_eq!(succ, 100, "e={e} weight={w}");
        }
        if succ == 100 && frontier.len() == e {
            frontier.push(w);
        } else if succ == 100 {
            frontier[e] = frontier[e].max(w);
        }
        assert_eq!(f[8], "module");
    }
    assert!(frontier.windows(2).all(|p| p[0] <= p[1]));

    let again = dir.path().join("again.csv");
    run(&["experiment", path_str(&spec_path), "--out", path_str(&again)]);
    let strip = |t: &str| -> Vec<String> {
        t.lines().map(|l| l.split(',').take(7).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(strip(&csv), strip(&fs::read_to_string(again).unwrap()));

    let bad = write(&dir, "bad.toml", &spec.replace("weight_max = 6", "weight_max = 27"));
    assert_eq!(run(&["experiment", path_str(&bad)]).status.code(), Some(2));
    let zero = write(&dir, "zero.toml", &spec.replace("trials = 100", "trials = 0"));
    assert_eq!(run(&["experiment", path_str(&zero)]).status.code(), Some(2));
    let noseed = write(&dir, "noseed.toml", &spec.replace("seed = 42\n", ""));
    assert_eq!(run(&["experiment", path_str(&noseed)]).status.code(), Some(2));
}

#[test]
fn oracle_check_on_small_code() {
    let dir = TempDir::new().unwrap();
    let code = new_code(&dir, "h2.toml", &["hermitian", "2", "4"]);
    let msg = write(&dir, "m.txt", "1 0 2 3");
    let cw = write(&dir, "cw.txt", &stdout(&run(&["encode", path_str(&code), path_str(&msg)])));
    for seed in 0..10 {
        let rx = dir.path().join(format!("rx{seed}.txt"));
        let s = seed.to_string();
        run(&["corrupt", path_str(&code), path_str(&cw), "1", "--seed", &s, "--out", path_str(&rx)]);
        let o = run(&["oracle-check", path_str(&code), path_str(&rx), "--e", "1"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "ok tau=1 entries=1\n");
    }
    let big = new_code(&dir, "rs.toml", &["rational", "16", "6"]);
    let w = write(&dir, "w.txt", &["0"; 15].join(" "));
    assert_eq!(run(&["oracle-check", path_str(&big), path_str(&w)]).status.code(), Some(2));
}
