use std::fs;
use std::path::PathBuf;

use maidkit::dot::{render_game, render_mechanised, render_mediated};
use maidkit::io::load_game;
use maidkit_core::correlation::{add_mediator, MediatorMode};
use maidkit_core::graphs::build_mechanised_graph;
use maidkit_core::text::parse_unvalidated;
use maidkit_core::DEFAULT_CAP;

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

fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/games")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn stem(file: &str) -> String {
    file.replace(".maid", "").replace(".nf", "_nf")
}

#[test]
fn game_drawings_match_golden_files() {
    for file in GAMES {
        let m = load_game(&games_dir().join(file)).unwrap();
        let first = render_game(&m);
        assert_eq!(first, render_game(&m));
        assert_eq!(first, golden(&format!("{}.dot", stem(file))), "{file}");
    }
}

#[test]
fn mechanised_drawings_match_golden_files() {
    for file in GAMES {
        let m = load_game(&games_dir().join(file)).unwrap();
        let g = build_mechanised_graph(&m);
        assert_eq!(render_mechanised(&m, &g), golden(&format!("{}.mech.dot", stem(file))), "{file}");
    }
}

#[test]
fn mediated_drawings_match_golden_files() {
    let m = load_game(&games_dir().join("signaling.maid")).unwrap();
    let public = add_mediator(&m, MediatorMode::Public, DEFAULT_CAP).unwrap();
    let private = add_mediator(&m, MediatorMode::Private, DEFAULT_CAP).unwrap();
    assert_eq!(render_mediated(&public), golden("signaling.public.dot"));
    let dot = render_mediated(&private);
    assert_eq!(dot, golden("signaling.private.dot"));
    assert!(dot.contains("  C -> C_A;\n"));
    assert!(dot.contains("  C -> C_B;\n"));
}

#[test]
fn taxi_mechanised_graph_has_the_rule_edge() {
    let m = load_game(&games_dir().join("taxi.maid")).unwrap();
    let dot = render_mechanised(&m, &build_mechanised_graph(&m));
    assert!(dot.contains("  Pi_A -> Pi_T;\n"));
    assert!(dot.contains("  Pi_T -> T [color=\"#7f7f7f\"];\n"));
    assert!(dot.contains("  Q -> T [style=dotted];\n"));
    assert!(dot.contains("Pi_A [shape=box, style=\"rounded,filled\""));
}

#[test]
fn single_chance_node() {
    let m = parse_unvalidated("chance X domain=0,1\ncpd X : 1/2 1/2\n").unwrap();
    let dot = render_game(&m);
    assert_eq!(dot.matches("shape=ellipse").count(), 1);
    assert!(!dot.contains("->"));
    assert_eq!(dot, "digraph maid {\n  X [shape=ellipse];\n}\n");
}

#[test]
fn shapes_follow_variable_kinds() {
    let m = load_game(&games_dir().join("signaling.maid")).unwrap();
    let dot = render_game(&m);
    assert!(dot.contains("  X [shape=ellipse];\n"));
    assert!(dot.contains("  A [shape=box, style=filled, fillcolor=\"#a6cee3\", class=\"agent-alice\"];\n"));
    assert!(dot.contains("  U_B [shape=diamond, style=filled, fillcolor=\"#fdbf6f\", class=\"agent-bob\"];\n"));
    // only edges into decisions carry information
    assert_eq!(dot.matches("dotted").count(), 2);
}
