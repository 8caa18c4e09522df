use std::io::Write;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_branch-hdim");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table_subset_matches_golden_file() {
    let out = run(&["ggs-table", "--vectors", "1,0,0;1,1,0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), include_str!("golden/ggs_table_subset.md"));
}

#[test]
fn hdim_record_for_second_grigorchuk() {
    let out = run(&["hdim", "--preset", "second-grigorchuk", "--verbal", "gamma3", "--witness-level", "3", "--format", "record"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in ["hdim=43/128", "mode=exact", "tier=witness", "logs=1,3,17/2,30", "s=2,5/2,1/2"] {
        assert!(text.lines().any(|l| l == line), "missing {line} in\n{text}");
    }
}

#[test]
fn discard_exit_codes() {
    let out = run(&["discard", "--preset", "second-grigorchuk", "--witness-level", "2", "--horizon", "3"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).starts_with("refuted: s_3 = 1/2"));
    let out = run(&["discard", "--preset", "second-grigorchuk", "--witness-level", "3", "--horizon", "4", "--format", "record"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict=consistent-up-to-level-4\n"));
}

#[test]
fn usage_and_computation_errors() {
    assert_eq!(run(&["quotients", "--preset", "ggs:4:1,0,0", "--levels", "0"]).status.code(), Some(2));
    assert_eq!(run(&["quotients", "--preset", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["hdim", "--preset", "ggs:4:1,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["hdim", "--preset", "ggs:4:1,0,0", "--index", "0"]).status.code(), Some(2));
    let capped = run(&["quotients", "--preset", "ggs:4:1,0,0", "--levels", "4", "--degree-cap", "64"]);
    assert_eq!(capped.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("error"));
}

#[test]
fn definition_files() {
    let dir = std::env::temp_dir().join(format!("branch-hdim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.grp");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "name = from file\ndegree = 4\nambient = (1,2,3,4)\ngen a = (1,2,3,4) | 1,1,1,1\ngen b = () | a, 1, a, b").unwrap();
    drop(f);
    let p = path.to_str().unwrap();
    let out = run(&["sn", "--file", p, "--levels", "4", "--format", "record"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "s=2,5/2,1/2\n");
    assert_eq!(run(&["validate", "--file", p]).status.code(), Some(0));

    std::fs::write(&path, "degree = 4\nambient = (1,2,3,4)\ngen b = () | b, b\n").unwrap();
    let out = run(&["validate", "--file", p]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
