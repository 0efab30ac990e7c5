use std::path::{Path, PathBuf};

use hygame_cli::{emit_game, parse_game, run_command};
use hygame_core::fixtures::{frozen_point_guard, worked_example};
use hygame_core::{GameBuilder, Flavor, Interval, Owner, Rational, VarId};
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hygame").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[test]
fn emitted_games_parse_back_to_the_same_game() {
    for g in [worked_example(), frozen_point_guard()] {
        let text = emit_game(&g);
        let back = parse_game(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(emit_game(&back), text);
    }
}

#[test]
fn non_canonical_rationals_are_rejected_with_their_path() {
    let text = emit_game(&worked_example()).replacen("\"4\"", "\"8/2\"", 1);
    let e = parse_game(&text).unwrap_err().to_string();
    assert!(e.contains("8/2"), "{e}");
    assert!(e.contains("edges"), "{e}");
    let text = emit_game(&worked_example()).replacen("\"2\"", "\"2/4\"", 1);
    assert!(parse_game(&text).is_err());
}

#[test]
fn unknown_fields_are_rejected() {
    let text = emit_game(&worked_example()).replacen("{", "{\n  \"colour\": \"red\",", 1);
    let e = parse_game(&text).unwrap_err().to_string();
    assert!(e.contains("colour"), "{e}");
}

#[test]
fn malformed_json_reports_a_position() {
    let e = parse_game("{\"flavor\": ").unwrap_err().to_string();
    assert!(e.contains("line 1"), "{e}");
}

#[test]
fn validate_accepts_the_worked_example() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", &emit_game(&worked_example()));
    let o = run(&["validate", s(&p)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
}

#[test]
fn validate_reports_a_broken_initialization() {
    let x: VarId = 0;
    let g = GameBuilder::new(Flavor::Isr, &["x"])
        .location("a", Owner::Pl1, "A", &[r(1)])
        .location("b", Owner::Pl1, "B", &[r(2)])
        .edge("e0", "a", "go", &[(x, Interval::new(r(0), r(5)))], &[], "b")
        .edge("e1", "b", "back", &[(x, Interval::new(r(0), r(10)))], &[(x, r(0))], "a")
        .build();
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", &emit_game(&g));
    let o = run(&["validate", s(&p)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("InitializationBroken"), "{}", o.stderr);
}

#[test]
fn missing_files_are_usage_errors() {
    let o = run(&["validate", "/nonexistent/game.json"]);
    assert_eq!(o.code, 2);
    let o = run(&["frobnicate"]);
    assert_eq!(o.code, 2);
}

#[test]
fn transformed_games_classify_as_their_target() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", &emit_game(&worked_example()));
    let o = run(&["classify", s(&p)]);
    assert_eq!(o.stdout.trim(), "isr");
    for (to, flavor) in [("stopwatch", "stopwatch"), ("updatable", "updatable"), ("timed", "timed")] {
        let out = dir.path().join(format!("{to}.json"));
        let o = run(&["transform", s(&p), "--to", to, "-o", s(&out)]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let o = run(&["classify", s(&out)]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(o.stdout.trim(), flavor);
        assert_eq!(run(&["validate", s(&out)]).code, 0);
    }
}

#[test]
fn check_bisim_passes_on_the_worked_example() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", &emit_game(&worked_example()));
    let o = run(&["check-bisim", s(&p), "--samples", "20", "--seed", "3"]);
    assert_eq!(o.code, 0, "{}\n{}", o.stdout, o.stderr);
    assert_eq!(o.stdout.lines().count(), 6);
    assert!(o.stdout.contains("\"end-to-end\""));
    assert!(o.stdout.lines().all(|l| l.contains("\"pass\"")));
}

#[test]
fn solve_pull_back_and_simulate_on_the_worked_example() {
    let dir = TempDir::new().unwrap();
    let game = write(&dir, "g.json", &emit_game(&worked_example()));
    let strat = dir.path().join("s.json");
    let o = run(&["solve", s(&game), "--objective", "reach:GOAL", "-o", s(&strat)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = std::fs::read_to_string(&strat).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(!v["entries"].as_array().unwrap().is_empty());

    let again = dir.path().join("s2.json");
    run(&["solve", s(&game), "--objective", "reach:GOAL", "-o", s(&again)]);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);

    for seed in ["0", "1", "7"] {
        let o = run(&["simulate", s(&game), s(&strat), "--seed", seed, "--steps", "30"]);
        assert_eq!(o.code, 0, "{}\n{}", o.stdout, o.stderr);
        assert!(o.stdout.contains("\"GOAL\""));
        for line in o.stdout.lines() {
            serde_json::from_str::<serde_json::Value>(line).unwrap();
        }
    }

    let table = dir.path().join("t.json");
    let o = run(&["pull-back", s(&game), s(&strat), "-o", s(&table), "--bound", "6", "--plays", "5"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let o = run(&["simulate", s(&game), s(&table), "--seed", "2", "--steps", "6"]);
    assert_eq!(o.code, 0, "{}\n{}", o.stdout, o.stderr);
}

#[test]
fn solve_rejects_a_bad_objective() {
    let dir = TempDir::new().unwrap();
    let game = write(&dir, "g.json", &emit_game(&worked_example()));
    let o = run(&["solve", s(&game), "--objective", "eventually GOAL"]);
    assert_eq!(o.code, 2);
}

#[test]
fn unsatisfiable_safety_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let game = write(&dir, "g.json", &emit_game(&worked_example()));
    let o = run(&["solve", s(&game), "--objective", "safe:GOAL"]);
    assert_eq!(o.code, 1, "{}", o.stderr);
}
