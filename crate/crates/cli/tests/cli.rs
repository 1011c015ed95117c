use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn coxpoly(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxpoly"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("COXPOLY_OUT")
        .output()
        .expect("run coxpoly")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["export", "--format", "svg"], "unknown export format"),
        (&["enumerate", "--polytopes", "2"], "heavy"),
        (&["enumerate", "--polytopes", "sweep"], "heavy"),
        (&["enumerate", "--polytopes", "abc"], "--polytopes"),
        (&["solve", "--timeout", "0"], "--timeout"),
        (&["verify"], "nothing to verify"),
    ];
    for (args, needle) in cases {
        let o = coxpoly(dir.path(), args);
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
    let o = coxpoly(dir.path(), &["enumerate", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn group_six_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let o = coxpoly(dir.path(), &["enumerate", "--polytopes", "312,319,322"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for (id, n) in [(312, 1), (319, 5), (322, 3)] {
        assert!(text.contains(&format!("P{id}: seilper {n} ")), "{text}");
    }
    assert!(dir.path().join("enumerate/P312.txt").exists());
}

#[test]
fn report_verify_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let o = coxpoly(&out, &["report", "--polytopes", "284,313"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("P284: ") && text.contains("final 1"), "{text}");
    assert!(text.contains("total 4"), "{text}");

    let v = Command::new(env!("CARGO_BIN_EXE_coxpoly"))
        .args(["verify", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(v.status.success(), "{}", stderr(&v));
    assert!(stdout(&v).contains("verified 4 certificates"));

    let first = fs::read_to_string(out.join("summary.json")).unwrap();
    let o = coxpoly(&out, &["report", "--polytopes", "284,313"]);
    assert!(o.status.success());
    assert_eq!(first, fs::read_to_string(out.join("summary.json")).unwrap());

    let other = dir.path().join("b");
    let o = coxpoly(&other, &["report", "--polytopes", "284,313"]);
    assert!(o.status.success());
    assert_eq!(first, fs::read_to_string(other.join("summary.json")).unwrap());

    let o = coxpoly(&out, &["export", "--polytopes", "284", "--format", "dot"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dot = fs::read_to_string(out.join("diagrams/dot/P284_1.dot")).unwrap();
    assert!(dot.starts_with("graph") && dot.contains("style=dotted"));
}

#[test]
fn corrupt_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = coxpoly(dir.path(), &["enumerate", "--polytopes", "312"]);
    assert!(o.status.success());
    let path = dir.path().join("enumerate/P312.txt");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[4] = lines[4].replacen('2', "3", 1);
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = coxpoly(dir.path(), &["enumerate", "--polytopes", "312"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("checkpoint"), "{}", stderr(&o));
}
