//! End-to-end runs of the `arrayprop` binary against the fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrayprop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn propagate_shared_array_reports_pruned_domains() {
    for engine in ["naive", "arrac"] {
        let out = run(&["propagate", fixture("shared_array.model").to_str().unwrap(), "--engine", engine]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains("x: {p, r}\n"), "{}: {}", engine, text);
        assert!(text.contains("y: {l}\n"), "{}: {}", engine, text);
        assert!(text.contains("status: stable\n"), "{}: {}", engine, text);
    }
}

#[test]
fn propagate_vararray_prunes_the_selected_cell() {
    let out = run(&["propagate", fixture("vararray.model").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("a[j]: {p, r}\n"), "{}", stdout(&out));
}

#[test]
fn propagate_contradiction_exits_one() {
    let out = run(&["propagate", fixture("contradiction.model").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("status: failed\n"), "{}", stdout(&out));
    assert!(stdout(&out).contains("{}"), "an empty domain must be visible: {}", stdout(&out));
}

#[test]
fn nonlinear_model_needs_the_flag() {
    let file = fixture("xor.model");
    let rejected = run(&["propagate", file.to_str().unwrap()]);
    assert_eq!(code(&rejected), 2);
    assert!(stderr(&rejected).contains("more than once"), "{}", stderr(&rejected));

    let relaxed = run(&["propagate", file.to_str().unwrap(), "--allow-nonlinear"]);
    assert_eq!(code(&relaxed), 0, "{}", stderr(&relaxed));
    assert!(stdout(&relaxed).contains("y: {0, 1}\n"), "{}", stdout(&relaxed));
}

#[test]
fn syntax_errors_are_positioned_and_exit_two() {
    let dir = std::env::temp_dir().join("arrayprop-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("broken.model");
    std::fs::write(&file, "var x in {A};\nconstraint x = a[y,];\n").unwrap();
    let out = run(&["propagate", file.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2, column 20"), "{}", stderr(&out));
}

#[test]
fn json_report_is_byte_stable() {
    let file = fixture("shared_array.model");
    let a = run(&["propagate", file.to_str().unwrap(), "--json"]);
    let b = run(&["propagate", file.to_str().unwrap(), "--json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["status"], "stable");
    assert_eq!(v["domains"]["x"], serde_json::json!(["p", "r"]));
    assert!(v["stats"]["cell_domain_reads"].as_u64().unwrap() > 0);
}

#[test]
fn solve_enumerates_the_worked_example() {
    let out = run(&["solve", fixture("worked2x3.model").to_str().unwrap(), "--all"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("solutions: 3\n"), "{}", text);
    assert!(text.contains("backtracks:"), "{}", text);
    assert!(text.contains("x=B y1=1 y2=2"), "{}", text);
}

#[test]
fn solve_unsat_exits_one() {
    let out = run(&["solve", fixture("contradiction.model").to_str().unwrap(), "--all"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("UNSAT\n"), "{}", stdout(&out));
}

#[test]
fn check_file_and_random_modes_agree() {
    let on_file = run(&["check", fixture("shared_array.model").to_str().unwrap()]);
    assert_eq!(code(&on_file), 0, "{}", stdout(&on_file));
    assert!(stdout(&on_file).starts_with("OK"), "{}", stdout(&on_file));

    let random = run(&["check", "--random", "25", "--seed", "3"]);
    assert_eq!(code(&random), 0, "{}", stdout(&random));
    assert!(stdout(&random).contains("25 random instances"), "{}", stdout(&random));
}

#[test]
fn bench_reports_both_engines() {
    // derive a model file from the toy crossword, then benchmark it
    let emitted = run(&[
        "crossword",
        fixture("toy.grid").to_str().unwrap(),
        fixture("toy.words").to_str().unwrap(),
        "--emit-model",
    ]);
    assert_eq!(code(&emitted), 0, "{}", stderr(&emitted));
    let dir = std::env::temp_dir().join("arrayprop-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("toy-crossword.model");
    std::fs::write(&file, stdout(&emitted)).unwrap();

    let out = run(&["bench", file.to_str().unwrap(), "--repeat", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let reads: Vec<u64> = ["naive", "arrac"]
        .iter()
        .map(|engine| {
            let line = text
                .lines()
                .find(|l| l.starts_with(engine))
                .unwrap_or_else(|| panic!("no {} line in: {}", engine, text));
            let field = line.split("cell_domain_reads ").nth(1).unwrap();
            field.split(',').next().unwrap().trim().parse().unwrap()
        })
        .collect();
    assert!(reads[1] <= reads[0], "one-pass read more: {}", text);
}

#[test]
fn crossword_toy_prints_a_valid_fill() {
    let out = run(&[
        "crossword",
        fixture("toy.grid").to_str().unwrap(),
        fixture("toy.words").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(rows.len(), 3, "{}", text);
    let across: String = rows[0].chars().collect();
    let down: String = rows.iter().map(|r| r.chars().nth(1).unwrap()).collect();
    let words = ["CAT", "DOG", "ACE", "OAK"];
    assert!(words.contains(&across.as_str()), "{}", text);
    assert!(words.contains(&down.as_str()), "{}", text);
    assert_eq!(across.chars().nth(1), down.chars().next(), "crossing letter");
    assert!(rows[1].starts_with('#') && rows[1].ends_with('#'), "{}", text);
}

#[test]
fn crossword_five_ring_solves_with_stats() {
    let out = run(&[
        "crossword",
        fixture("five.grid").to_str().unwrap(),
        fixture("five.words").to_str().unwrap(),
        "--stats",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.trim_end().lines().take(5).count(), 5, "{}", text);
    assert!(text.contains("backtracks:"), "{}", text);
}

#[test]
fn crossword_unsat_exits_one() {
    let dir = std::env::temp_dir().join("arrayprop-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let words = dir.join("clash.words");
    // two across candidates but nothing fits the down entry's crossings
    std::fs::write(&words, "CAT\nDOG\nTIP\n").unwrap();
    let out = run(&[
        "crossword",
        fixture("toy.grid").to_str().unwrap(),
        words.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stdout(&out).contains("UNSAT"), "{}", stdout(&out));
}

#[test]
fn emitted_crossword_model_round_trips() {
    let emitted = run(&[
        "crossword",
        fixture("toy.grid").to_str().unwrap(),
        fixture("toy.words").to_str().unwrap(),
        "--emit-model",
    ]);
    let text = stdout(&emitted);
    let model = arrayprop_cli::parse_model(&text).expect("emitted model parses");
    assert_eq!(arrayprop_cli::print_model(&model), text);
}
