use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lambdagen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambdagen")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lambdagen"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn count() {
    let o = lambdagen(&["count", "--model", "natural", "--openness", "0", "--size", "4"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "3\n"));
    assert_eq!(stdout(&lambdagen(&["count", "--size", "0"])), "0\n");
    assert_eq!(stdout(&lambdagen(&["count", "--openness", "1", "--size", "3"])), "3\n");
    let o = lambdagen(&["count", "--size", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--size"));
    let o = lambdagen(&["count", "--size", "3", "--model", "unary:0,1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--model"));
}

#[test]
fn unique_small_term() {
    let o = lambdagen(&["sample", "--method", "recursive", "--size", "2", "--seed", "7"]);
    assert_eq!(stdout(&o), "\\ 0\n");
    let o = lambdagen(&["sample", "--method", "recursive", "--size", "2", "--format", "sexp"]);
    assert_eq!(stdout(&o), "(lam 0)\n");
}

#[test]
fn sk_support() {
    let o = lambdagen(&["sample", "--method", "sk", "--size", "1", "--count", "4", "--seed", "1"]);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| ["(S S)", "(S K)", "(K S)", "(K K)"].contains(&l.as_str())));
}

#[test]
fn boltzmann_window_and_stats() {
    let o = lambdagen(&[
        "sample", "--method", "boltzmann", "--size", "2000", "--tolerance", "0.1", "--count", "5", "--stats", "--jobs", "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    let stats: serde_json::Value = serde_json::from_str(lines[5]).unwrap();
    assert_eq!(stats["count"], 5);
    assert!(stats["min_size"].as_u64().unwrap() >= 1800 && stats["max_size"].as_u64().unwrap() <= 2200);
    assert!(stats["attempts"].as_u64().unwrap() >= 5);
}

#[test]
fn json_output_is_an_array_of_terms() {
    let o = lambdagen(&["sample", "--method", "recursive", "--size", "9", "--count", "3", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let terms = value.as_array().unwrap();
    assert_eq!(terms.len(), 3);
    for t in terms {
        let back = lambdagen::format::term_from_json(t).unwrap();
        assert!(back.is_closed());
        assert_eq!(lambdagen::SizeModel::natural().size(&back), 9);
    }
}

#[test]
fn exhausted_attempts_exit_three() {
    let o = lambdagen(&["sample", "--method", "boltzmann", "--size", "3000", "--tolerance", "0", "--max-attempts", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("AttemptsExhausted"));
    let o = lambdagen(&["sample", "--method", "recursive", "--size", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("EmptySizeClass"));
}

#[test]
fn typecheck() {
    let o = with_stdin(&["typecheck"], "\\ 0");
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "a -> a\n"));
    let o = with_stdin(&["typecheck"], "\\ (0 0)");
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "untypeable\n"));
    let o = with_stdin(&["typecheck", "--format", "sexp"], "(lam (lam 1))");
    assert_eq!(stdout(&o), "a -> b -> a\n");
    assert_eq!(with_stdin(&["typecheck"], "\\ 1").status.code(), Some(2));
    assert_eq!(with_stdin(&["typecheck"], "\\ (0").status.code(), Some(2));
}

#[test]
fn typed_samples_carry_their_types() {
    let o = lambdagen(&["sample", "--method", "typed", "--size", "10", "--count", "5", "--with-type"]);
    for line in stdout(&o).lines() {
        let (term, ty) = line.split_once(" : ").unwrap();
        let t = lambdagen::format::parse_debruijn(term).unwrap();
        assert_eq!(lambdagen::typing::infer(&t).unwrap().to_string(), ty);
    }
}

#[test]
fn tune_and_sample_tuned() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets.json");
    std::fs::write(&targets, r#"{"targets": [{"index": 0, "fraction": 0.1}, {"index": 1, "fraction": 0.1}]}"#).unwrap();
    let profile = dir.path().join("profile.json");
    let o = lambdagen(&["tune", "--targets", targets.to_str().unwrap(), "--size", "1000", "--output", profile.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&profile).unwrap()).unwrap();
    assert_eq!(value["weights"].as_array().unwrap().len(), 2);
    let o = lambdagen(&["sample", "--method", "tuned", "--profile", profile.to_str().unwrap(), "--count", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = lambdagen(&["tune", "--targets", targets.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jobs_split_deterministically() {
    let args = ["sample", "--method", "boltzmann", "--size", "300", "--count", "7", "--jobs", "3", "--seed", "9"];
    let first = stdout(&lambdagen(&args));
    assert_eq!(first.lines().count(), 7);
    assert_eq!(first, stdout(&lambdagen(&args)));
    let single = stdout(&lambdagen(&["sample", "--method", "boltzmann", "--size", "300", "--count", "3", "--seed", "9"]));
    assert!(first.starts_with(&single));
}

#[test]
fn precision_override_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_lambdagen"))
        .args(["sample", "--method", "boltzmann", "--size", "100"])
        .env("LAMBDAGEN_PRECISION", "nope")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("LAMBDAGEN_PRECISION"));
    let o = Command::new(env!("CARGO_BIN_EXE_lambdagen"))
        .args(["sample", "--method", "boltzmann", "--size", "100"])
        .env("LAMBDAGEN_PRECISION", "1e-3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
