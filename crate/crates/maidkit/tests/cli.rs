use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use maidkit::io::load_game;
use maidkit_core::policies::BehaviouralProfile;
use maidkit_core::text::{parse_maid, serialize_behavioural, serialize_maid};
use serde_json::Value;
use tempfile::TempDir;

const GAMES: [&str; 9] = [
    "taxi.maid",
    "forgetful_pennies.maid",
    "absentminded_pennies.maid",
    "driver.maid",
    "signaling.maid",
    "matching_pennies.maid",
    "matching_pennies.nf",
    "markov2.maid",
    "team.maid",
];

fn game(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/games").join(name).display().to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn maidkit(args: &[&str]) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_maidkit")).args(args).output().expect("binary runs");
    Run {
        code: o.status.code().expect("exited normally"),
        out: String::from_utf8(o.stdout).unwrap(),
        err: String::from_utf8(o.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn has_line(r: &Run, line: &str) -> bool {
    r.out.lines().any(|l| l == line)
}

#[test]
fn classify_taxi() {
    let r = maidkit(&["classify", "--game", &game("taxi.maid")]);
    assert_eq!(r.code, 0, "{}", r.err);
    for line in [
        "taxi.perfect_recall: true",
        "alice.perfect_recall: true",
        "perfect_information: false",
        "sufficient_information: true",
        "relevance_order: A, T",
        "subdiagrams: 4",
    ] {
        assert!(has_line(&r, line), "missing {line:?} in\n{}", r.out);
    }
}

#[test]
fn signaling_ce_values() {
    let alice = maidkit(&["solve", "ce", "--game", &game("signaling.maid"), "--objective", "agent:alice"]);
    assert_eq!(alice.code, 0);
    assert!(has_line(&alice, "value: 0"), "{}", alice.out);
    let bob = maidkit(&["solve", "ce", "--game", &game("signaling.maid"), "--objective", "agent:bob"]);
    assert!(has_line(&bob, "value: 6"), "{}", bob.out);
}

#[test]
fn maid_ce_beats_ce_for_alice() {
    let r = maidkit(&["solve", "maid-ce", "--game", &game("signaling.maid"), "--objective", "agent:alice", "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let value = v["value"].as_str().unwrap();
    let q = maidkit_core::rational::parse_rational(value).unwrap();
    assert!(q >= maidkit_core::rational::parse_rational("7/2").unwrap(), "{value}");
}

#[test]
fn empty_and_invalid_games_exit_2() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.maid", "");
    let r = maidkit(&["validate", "--game", &empty]);
    assert_eq!(r.code, 2);
    assert!(r.out.contains("valid: false"));
    let cyclic = write(
        &dir,
        "cyclic.maid",
        "chance X parents=Y domain=0,1\nchance Y parents=X domain=0,1\ncpd X | Y=0 : 1 0\ncpd X | Y=1 : 1 0\ncpd Y | X=0 : 1 0\ncpd Y | X=1 : 1 0\n",
    );
    assert_eq!(maidkit(&["validate", "--game", &cyclic]).code, 2);
    assert_eq!(maidkit(&["classify", "--game", &empty]).code, 2);
    let garbage = write(&dir, "garbage.maid", "this is not a game\n");
    let r = maidkit(&["validate", "--game", &garbage]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line 1"), "{}", r.err);
}

#[test]
fn usage_errors_exit_2() {
    let missing = maidkit(&["classify", "--game", "/nonexistent/game.maid"]);
    assert_eq!(missing.code, 2);
    assert!(missing.err.contains("cannot read"));
    assert_eq!(maidkit(&["classify"]).code, 2);
    assert_eq!(maidkit(&["frobnicate"]).code, 2);
    assert_eq!(maidkit(&["solve", "ce", "--game", &game("taxi.maid"), "--objective", "agent:nobody"]).code, 2);
    assert_eq!(maidkit(&["solve", "ce", "--game", &game("taxi.maid"), "--objective", "utopia"]).code, 2);
    assert_eq!(maidkit(&["best-response", "--game", &game("taxi.maid")]).code, 2);
    assert_eq!(maidkit(&["eu", "--game", &game("taxi.maid"), "--format", "dot"]).code, 2);
    assert_eq!(maidkit(&["eu", "--game", &game("taxi.maid"), "--epsilon", "tiny"]).code, 2);
    assert_eq!(maidkit(&["--help"]).code, 0);
}

#[test]
fn cap_errors_name_the_flag() {
    let r = maidkit(&["solve", "ce", "--game", &game("taxi.maid"), "--cap", "4"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("--cap"), "{}", r.err);
    let team = maidkit(&["solve", "maid-ce", "--game", &game("team.maid")]);
    assert_eq!(team.code, 2);
    assert!(team.err.contains("exceeds the cap") && team.err.contains("--cap"), "{}", team.err);
}

#[test]
fn expected_utility_of_the_driver() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "third.pol", "rule Pi_D : 1/3 2/3\n");
    let r = maidkit(&["eu", "--game", &game("driver.maid"), "--policy", &p]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "eu.driver: 4/3\n");
}

#[test]
fn best_response_of_the_driver() {
    let r = maidkit(&["best-response", "--game", &game("driver.maid"), "--agent", "driver"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(has_line(&r, "exact: false"));
    assert!(r.out.contains("rules: rule Pi_D : "));
    assert_eq!(maidkit(&["best-response", "--game", &game("driver.maid"), "--agent", "driver", "--above", "1"]).code, 0);
    let no = maidkit(&["best-response", "--game", &game("driver.maid"), "--agent", "driver", "--above", "3/2"]);
    assert_eq!(no.code, 1);
    assert!(has_line(&no, "improves: false"));
}

#[test]
fn best_response_of_alice_in_taxi() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "taxi.pol", "rule T | Q=0 : 0 1\nrule T | Q=1 : 0 1\n");
    let r = maidkit(&["best-response", "--game", &game("taxi.maid"), "--agent", "alice", "--policy", &p]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(has_line(&r, "value: 2"), "{}", r.out);
    assert!(has_line(&r, "exact: true"));
}

#[test]
fn nash_checks() {
    let dir = TempDir::new().unwrap();
    let ne = write(&dir, "ne.pol", "rule T | Q=0 : 0 1\nrule T | Q=1 : 0 1\nrule A | T=0 : 0 1\nrule A | T=1 : 0 1\n");
    let r = maidkit(&["is-nash", "--game", &game("taxi.maid"), "--policy", &ne]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(has_line(&r, "is_nash: true") && has_line(&r, "eu.taxi: 1") && has_line(&r, "eu.alice: 2"), "{}", r.out);
    let uniform = write(&dir, "uniform.pol", "rule A : 1/2 1/2\nrule B1 : 1/2 1/2\nrule B2 : 1/2 1/2\n");
    let r = maidkit(&["is-nash", "--game", &game("forgetful_pennies.maid"), "--policy", &uniform]);
    assert_eq!(r.code, 1);
    assert!(has_line(&r, "gap.bob: 1/2"), "{}", r.out);
    let mixed = write(
        &dir,
        "mixed.pol",
        "weight 1/2\nrule D_alice : 1 0\nweight 1/2\nrule D_alice : 0 1\nweight 1/2\nrule D_bob : 1 0\nweight 1/2\nrule D_bob : 0 1\n",
    );
    let r = maidkit(&["is-nash", "--game", &game("matching_pennies.nf"), "--policy", &mixed]);
    assert_eq!(r.code, 0, "{}\n{}", r.out, r.err);
    assert!(has_line(&r, "gap.alice: 0") && has_line(&r, "eu.bob: 0"), "{}", r.out);
    let skewed = write(&dir, "skewed.pol", "weight 1\nrule D_alice : 1 0\nweight 1/2\nrule D_bob : 1 0\nweight 1/2\nrule D_bob : 0 1\n");
    let r = maidkit(&["is-nash", "--game", &game("matching_pennies.nf"), "--policy", &skewed]);
    assert_eq!(r.code, 1);
    assert!(has_line(&r, "gap.bob: 1"), "{}", r.out);
}

#[test]
fn equilibrium_search_verbs() {
    let r = maidkit(&["solve", "pure-ne", "--game", &game("taxi.maid")]);
    assert_eq!(r.code, 0);
    assert!(has_line(&r, "eu.alice: 2"), "{}", r.out);
    let r = maidkit(&["solve", "pure-ne", "--game", &game("forgetful_pennies.maid")]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("sufficient information"));
    let r = maidkit(&["solve", "mixed-ne", "--game", &game("forgetful_pennies.maid")]);
    assert_eq!(r.code, 0);
    assert!(has_line(&r, "eu.alice: 0") && has_line(&r, "eu.bob: 0"), "{}", r.out);
    assert_eq!(maidkit(&["solve", "mixed-ne", "--game", &game("driver.maid")]).code, 2);
}

#[test]
fn non_emptiness_answers() {
    let pure = maidkit(&["non-emptiness", "pure", "--game", &game("forgetful_pennies.maid")]);
    assert_eq!(pure.code, 1);
    assert!(has_line(&pure, "answer: no"));
    let behavioural = maidkit(&["non-emptiness", "behavioural", "--game", &game("absentminded_pennies.maid")]);
    assert_eq!(behavioural.code, 0);
    assert!(has_line(&behavioural, "answer: unknown"));
    let taxi = maidkit(&["non-emptiness", "pure", "--game", &game("taxi.maid")]);
    assert!(has_line(&taxi, "answer: yes") && has_line(&taxi, "guaranteed: true"));
    let mixed = maidkit(&["non-emptiness", "mixed", "--game", &game("team.maid"), "--format", "json"]);
    let v: Value = serde_json::from_str(&mixed.out).unwrap();
    assert_eq!(v["answer"], "yes");
}

#[test]
fn mechanised_graph_report() {
    let r = maidkit(&["mech-graph", "--game", &game("taxi.maid")]);
    assert_eq!(r.out, "mechanisms: Theta_Q, Pi_T, Pi_A, Theta_U_T, Theta_U_A\nedges: Pi_A -> Pi_T, Theta_U_T -> Pi_T, Theta_U_A -> Pi_A\n");
    let dot = maidkit(&["mech-graph", "--game", &game("taxi.maid"), "--format", "dot"]);
    assert!(dot.out.contains("Pi_A -> Pi_T;"));
}

#[test]
fn import_round_trips() {
    let r = maidkit(&["import-nf", "--game", &game("matching_pennies.nf")]);
    assert_eq!(r.code, 0);
    let imported = parse_maid(&r.out).unwrap();
    let direct = load_game(game("matching_pennies.nf").as_ref()).unwrap();
    assert_eq!(serialize_maid(&imported), serialize_maid(&direct));
    assert_eq!(maidkit(&["import-nf", "--game", &game("taxi.maid")]).code, 2);
}

#[test]
fn json_reports_keep_keys_in_order() {
    let r = maidkit(&["classify", "--game", &game("taxi.maid"), "--format", "json"]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["sufficient_information"], true);
    assert_eq!(v["relevance_order"], serde_json::json!(["A", "T"]));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "taxi.perfect_recall");
}

#[test]
fn thread_count_does_not_change_answers() {
    let runs: [&[&str]; 4] = [
        &["solve", "ce", "--game", "signaling.maid", "--objective", "welfare"],
        &["best-response", "--game", "driver.maid", "--agent", "driver"],
        &["non-emptiness", "behavioural", "--game", "forgetful_pennies.maid"],
        &["solve", "pure-ne", "--game", "markov2.maid"],
    ];
    for args in runs {
        let path = game(args[args.iter().position(|a| *a == "--game").unwrap() + 1]);
        let args: Vec<&str> = args.iter().map(|a| if a.ends_with(".maid") { path.as_str() } else { a }).collect();
        let one = maidkit(&[args.as_slice(), &["--threads", "1"]].concat());
        let four = maidkit(&[args.as_slice(), &["--threads", "4"]].concat());
        assert_eq!((one.code, &one.out), (four.code, &four.out), "{args:?}");
    }
}

#[test]
fn every_verb_terminates_on_every_game() {
    let dir = TempDir::new().unwrap();
    let empty_policy = write(&dir, "empty.pol", "");
    let verbs: [&[&str]; 14] = [
        &["validate"],
        &["classify"],
        &["mech-graph"],
        &["mech-graph", "--format", "dot"],
        &["solve", "ce"],
        &["solve", "ce", "--objective", "welfare"],
        &["solve", "maid-ce"],
        &["solve", "pure-ne"],
        &["solve", "mixed-ne"],
        &["non-emptiness", "pure"],
        &["non-emptiness", "behavioural"],
        &["non-emptiness", "mixed"],
        &["eu", "--policy", &empty_policy],
        &["is-nash", "--policy", &empty_policy],
    ];
    for file in GAMES {
        let path = game(file);
        for verb in verbs {
            let start = Instant::now();
            let r = maidkit(&[verb, &["--game", path.as_str()]].concat());
            assert!((0..=2).contains(&r.code), "{file} {verb:?}");
            assert!(start.elapsed() < Duration::from_secs(60), "{file} {verb:?}");
            if r.code == 2 {
                assert!(!r.err.is_empty(), "{file} {verb:?} failed silently");
            }
        }
        let m = load_game(path.as_ref()).unwrap();
        let uniform = write(&dir, "uniform.pol", &serialize_behavioural(&m, &BehaviouralProfile::uniform(&m)));
        assert_eq!(maidkit(&["eu", "--game", &path, "--policy", &uniform]).code, 0, "{file}");
        assert!(maidkit(&["is-nash", "--game", &path, "--policy", &uniform]).code <= 1, "{file}");
        for a in m.agents() {
            let r = maidkit(&["best-response", "--game", &path, "--agent", a, "--policy", &uniform]);
            assert_eq!(r.code, 0, "{file} {a}: {}", r.err);
        }
    }
}
