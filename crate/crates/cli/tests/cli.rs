use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use msg_core::game::Player;
use msg_core::transcript::replay_transcript;

fn msg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn play_against_the_seeker_certifies_every_round() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let out = msg(&[
        "play",
        "--weights",
        "1",
        "--a",
        "1",
        "--b",
        "1",
        "--rounds",
        "6",
        "--bob",
        "rational-seeker",
        "--out",
        path_str(&path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    let t = replay_transcript(text.as_bytes()).unwrap();
    assert_eq!(t.alice_boxes().count(), 6);
    for m in t.alice_boxes() {
        assert_eq!(
            m.note.as_ref().and_then(|n| n.verified),
            Some(true),
            "round {}",
            m.round
        );
    }
    assert_eq!(t.moves.last().unwrap().player, Player::Alice);
}

#[test]
fn equal_configurations_give_identical_bytes() {
    let run = || {
        stdout(&msg(&[
            "play",
            "--weights",
            "1/2,1/2",
            "--a",
            "2",
            "--rounds",
            "4",
            "--bob",
            "seeded-random",
            "--seed",
            "17",
        ]))
    };
    let first = run();
    assert!(!first.is_empty());
    assert_eq!(first, run());
    let other = stdout(&msg(&[
        "play",
        "--weights",
        "1/2,1/2",
        "--a",
        "2",
        "--rounds",
        "4",
        "--bob",
        "seeded-random",
        "--seed",
        "18",
    ]));
    assert_ne!(first, other);
}

#[test]
fn verify_reports_the_rational_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("point.json");
    fs::write(
        &path,
        r#"{"point": ["1/3"], "weights": ["1"], "c": "1/100", "qmax": 3}"#,
    )
    .unwrap();
    let out = msg(&["verify", path_str(&path)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("witness 1/3"), "{}", stdout(&out));
    // below the denominator 3 the point is fine
    let out = msg(&["verify", path_str(&path), "--qmax", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_reads_boxes_through_an_affine_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("box.json");
    // the box around f(1) = 3/2 + 1/4 is too close to the image of p/q = 1/1
    fs::write(
        &path,
        r#"{"box": {"lo": ["111/64"], "hi": ["113/64"]}, "c": "1/8", "qmax": 1,
            "f": {"diagonal": ["3/2"], "translation": ["1/4"]}}"#,
    )
    .unwrap();
    let out = msg(&["verify", path_str(&path)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("witness 1/1"));
    assert_eq!(
        code(&msg(&[
            "verify",
            path_str(&path),
            "--f-diag",
            "1",
            "--f-shift",
            "0"
        ])),
        0
    );
}

#[test]
fn malformed_inputs_are_config_errors() {
    assert_eq!(code(&msg(&["play", "--weights", "1/2,1/3", "--a", "1"])), 4);
    assert_eq!(code(&msg(&["play", "--weights", "1", "--a", "one"])), 4);
    assert_eq!(code(&msg(&["play", "--weights", "1"])), 4);
    assert_eq!(
        code(&msg(&[
            "play",
            "--weights",
            "1",
            "--a",
            "1",
            "--bob",
            "nobody"
        ])),
        4
    );
    assert_eq!(
        code(&msg(&[
            "intersect",
            "--weights",
            "1/2,1/2",
            "--a",
            "2",
            "--subsets",
            "3"
        ])),
        4
    );
    assert_eq!(code(&msg(&["verify", "/nonexistent/file.json"])), 4);
    assert_eq!(code(&msg(&["--help"])), 0);
}

#[test]
fn tampered_transcripts_are_illegal_moves() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    assert_eq!(
        code(&msg(&[
            "play",
            "--weights",
            "1",
            "--a",
            "1",
            "--rounds",
            "3",
            "--out",
            path_str(&path)
        ])),
        0
    );
    assert_eq!(code(&msg(&["replay", path_str(&path)])), 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut bob: serde_json::Value = serde_json::from_str(&lines[3]).unwrap();
    assert_eq!(bob["player"], "bob");
    bob["center"] = serde_json::json!(["1/64"]);
    lines[3] = bob.to_string();
    fs::write(&path, lines.join("\n")).unwrap();
    let out = msg(&["replay", path_str(&path)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bob in round 2"));
}

#[test]
fn tree_writes_one_csv_row_per_level() {
    let out = msg(&["tree", "--weights", "1", "--a", "1", "--depth", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "k,count,d_k,delta_k,estimate");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("0,1,1/16,1/4,"));
    assert!(rows[4].starts_with("3,64,1/65536,,"));
}

#[test]
fn intersect_reports_each_component() {
    let out = msg(&[
        "intersect",
        "--weights",
        "1/2,1/2",
        "--a",
        "2",
        "--subsets",
        "1;2",
        "--rounds",
        "6",
        "--bob",
        "seeded-random",
        "--seed",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("1,\"{1,2}\",1/2 1/2,1/1,"));
    assert!(rows[1].ends_with(",65536,yes"));
    assert!(rows[2].starts_with("2,\"{1}\",1/1,4/3,"));
    assert!(rows[2].ends_with(",4096,yes"));
}

#[test]
fn ternary_demo_ends_on_a_word_with_zero() {
    let out = msg(&[
        "ternary-demo",
        "--seed",
        "3",
        "--rounds",
        "5",
        "--beta-exp",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text.lines()
            .filter(|l| l.ends_with("singleton yes"))
            .count(),
        5
    );
    let outcome = text.lines().last().unwrap();
    assert!(
        outcome.starts_with("outcome ") && outcome.contains('0'),
        "{outcome}"
    );
    assert_eq!(code(&msg(&["ternary-demo", "--beta-exp", "0"])), 4);
}

#[test]
fn params_prints_the_opening_constant() {
    let out = msg(&["params", "--weights", "1", "--a", "1", "--rounds", "12"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("c_prime: 1/512"), "{text}");
    assert!(text.contains("q_max after 12 rounds: 4194304"), "{text}");
    assert_eq!(code(&msg(&["params", "--weights", "1", "--a", "1/2"])), 4);
}
