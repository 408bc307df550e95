//! Graphviz output for games, mechanised graphs and mediated games.
//!
//! Chance nodes are ellipses, decisions boxes and utilities diamonds. Agent-owned nodes are
//! filled from a fixed palette and tagged with `class="agent-<name>"`.

use std::fmt::Write;

use maidkit_core::correlation::MediatedGame;
use maidkit_core::graphs::{MechNode, MechanisedGraph};
use maidkit_core::{Maid, VarId, VarKind};

const PALETTE: [&str; 6] = ["#a6cee3", "#fdbf6f", "#b2df8a", "#fb9a99", "#cab2d6", "#ffff99"];
const MECH_FILL: &str = "#d9d9d9";
const MECH_EDGE: &str = "#7f7f7f";

fn is_plain(s: &str) -> bool {
    let mut chars = s.chars();
    let head = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let keyword = ["node", "edge", "graph", "digraph", "subgraph", "strict"].iter().any(|k| k.eq_ignore_ascii_case(s));
    head && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !keyword
}

/// A DOT identifier, quoted unless it is a plain identifier.
pub fn id(s: &str) -> String {
    if is_plain(s) {
        s.to_owned()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn color(agent: usize) -> &'static str {
    PALETTE[agent % PALETTE.len()]
}

fn var_node(out: &mut String, m: &Maid, v: VarId, bold: bool) {
    let var = m.var(v);
    let shape = match var.kind {
        VarKind::Chance => "ellipse",
        VarKind::Decision(_) => "box",
        VarKind::Utility(_) => "diamond",
    };
    let _ = match var.kind.owner() {
        Some(a) => writeln!(
            out,
            "  {} [shape={shape}, style=filled, fillcolor=\"{}\", class={}];",
            id(&var.name),
            color(a.0),
            id(&format!("agent-{}", m.agent_name(a)))
        ),
        None if bold => writeln!(out, "  {} [shape={shape}, style=bold];", id(&var.name)),
        None => writeln!(out, "  {} [shape={shape}];", id(&var.name)),
    };
}

fn object_edges(out: &mut String, m: &Maid) {
    for v in m.var_ids() {
        let info = m.var(v).is_decision();
        for &p in &m.var(v).parents {
            let style = if info { " [style=dotted]" } else { "" };
            let _ = writeln!(out, "  {} -> {}{style};", id(m.name(p)), id(m.name(v)));
        }
    }
}

fn game_body(out: &mut String, m: &Maid, bold: Option<VarId>) {
    for v in m.var_ids() {
        var_node(out, m, v, bold == Some(v));
    }
    object_edges(out, m);
}

pub fn render_game(m: &Maid) -> String {
    let mut out = String::from("digraph maid {\n");
    game_body(&mut out, m, None);
    out.push_str("}\n");
    out
}

pub fn render_mechanised(m: &Maid, g: &MechanisedGraph) -> String {
    let mut out = String::from("digraph mechanised {\n");
    game_body(&mut out, m, None);
    for (k, node) in g.mechanisms.iter().enumerate() {
        let name = id(&g.node_name(m, k));
        let owner = match *node {
            MechNode::Rule(u) => Some(m.unit(u).owner),
            MechNode::Param(_) => None,
        };
        let class = owner.map(|a| format!(", class={}", id(&format!("agent-{}", m.agent_name(a))))).unwrap_or_default();
        let _ = writeln!(out, "  {name} [shape=box, style=\"rounded,filled\", fillcolor=\"{MECH_FILL}\"{class}];");
    }
    for &(k, v) in &g.governs {
        let _ = writeln!(out, "  {} -> {} [color=\"{MECH_EDGE}\"];", id(&g.node_name(m, k)), id(m.name(v)));
    }
    for &(a, b) in &g.mech_edges {
        let _ = writeln!(out, "  {} -> {};", id(&g.node_name(m, a)), id(&g.node_name(m, b)));
    }
    out.push_str("}\n");
    out
}

/// The mediated game with the correlation variable drawn bold.
pub fn render_mediated(mg: &MediatedGame) -> String {
    let mut out = String::from("digraph mediated {\n");
    game_body(&mut out, &mg.game, Some(mg.correlation));
    out.push_str("}\n");
    out
}
