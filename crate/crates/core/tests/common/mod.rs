#![allow(dead_code)]

pub mod oracles;

use maidkit_core::policies::{BehaviouralProfile, PureProfile};
use maidkit_core::text::parse_maid;
use maidkit_core::{AgentId, Maid, Rational, UnitId, VarId};

pub const GAMES: [&str; 8] =
    ["taxi", "forgetful_pennies", "absentminded_pennies", "driver", "signaling", "matching_pennies", "markov2", "team"];

pub fn source(name: &str) -> String {
    let path = format!("{}/games/{name}.maid", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn game(name: &str) -> Maid {
    parse_maid(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn v(m: &Maid, name: &str) -> VarId {
    m.var_by_name(name).unwrap_or_else(|| panic!("no variable {name}"))
}

pub fn agent(m: &Maid, name: &str) -> AgentId {
    m.agent_by_name(name).unwrap_or_else(|| panic!("no agent {name}"))
}

pub fn unit(m: &Maid, name: &str) -> UnitId {
    m.unit_by_name(name).unwrap_or_else(|| panic!("no rule {name}"))
}

pub fn q(s: &str) -> Rational {
    maidkit_core::rational::parse_rational(s).unwrap()
}

fn action(m: &Maid, u: UnitId, label: &str) -> usize {
    let d = m.unit(u).template();
    m.var(d).domain.iter().position(|x| x == label).unwrap_or_else(|| panic!("no action {label}"))
}

/// Pure profile from `(rule, actions per context)` pairs naming every rule.
pub fn pure(m: &Maid, rules: &[(&str, &[&str])]) -> PureProfile {
    let mut choices = vec![None; m.units().len()];
    for (name, acts) in rules {
        let u = unit(m, name);
        choices[u.0] = Some(acts.iter().map(|a| action(m, u, a)).collect());
    }
    assert!(choices.iter().all(Option::is_some), "every rule needs a choice");
    PureProfile { choices }
}

/// Behavioural rules from `(rule, rows)` pairs; rows are written as rationals.
pub fn behavioural(m: &Maid, rules: &[(&str, &[&[&str]])]) -> BehaviouralProfile {
    let mut p = BehaviouralProfile::empty(m);
    for (name, rows) in rules {
        p.set(unit(m, name), rows.iter().map(|r| r.iter().map(|x| q(x)).collect()).collect());
    }
    p
}

/// A random rational distribution with denominators up to `den`.
pub fn random_row(rng: &mut impl rand::Rng, card: usize, den: u32) -> Vec<Rational> {
    let weights: Vec<u32> = (0..card).map(|_| rng.gen_range(0..=den)).collect();
    let total: u32 = weights.iter().sum();
    if total == 0 {
        let mut row = vec![Rational::from_integer(0.into()); card];
        row[rng.gen_range(0..card)] = Rational::from_integer(1.into());
        return row;
    }
    weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect()
}

pub fn random_rule(rng: &mut impl rand::Rng, m: &Maid, u: UnitId) -> Vec<Vec<Rational>> {
    let d = m.unit(u).template();
    (0..m.context_count(d)).map(|_| random_row(rng, m.card(d), 6)).collect()
}

/// Random rules for every unit in `units`, leaving the rest of `base` as is.
pub fn randomize(rng: &mut impl rand::Rng, m: &Maid, base: &BehaviouralProfile, units: impl IntoIterator<Item = UnitId>) -> BehaviouralProfile {
    let mut p = base.clone();
    for u in units {
        p.set(u, random_rule(rng, m, u));
    }
    p
}

pub fn random_profile(rng: &mut impl rand::Rng, m: &Maid) -> BehaviouralProfile {
    let units: Vec<UnitId> = m.units().iter().map(|u| u.id).collect();
    randomize(rng, m, &BehaviouralProfile::empty(m), units)
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// A small random game: chance X, decisions D1 (agent p), D2 (agent q) and optionally D3 (agent p),
/// random observation edges along that order, and one utility per agent over random parents.
pub fn random_game(rng: &mut impl rand::Rng) -> Maid {
    use maidkit_core::model::{Table, VarKind, Variable};
    let p = AgentId(0);
    let qa = AgentId(1);
    let three = rng.gen_bool(0.5);
    let mut kinds = vec![("X", VarKind::Chance), ("D1", VarKind::Decision(p)), ("D2", VarKind::Decision(qa))];
    if three {
        kinds.push(("D3", VarKind::Decision(p)));
    }
    let mut vars: Vec<Variable> = Vec::new();
    for (i, (name, kind)) in kinds.iter().enumerate() {
        let parents = (0..i).filter(|_| rng.gen_bool(0.4)).map(VarId).collect();
        vars.push(Variable { name: name.to_string(), kind: *kind, domain: vec!["0".into(), "1".into()], parents });
    }
    let base = vars.len();
    for (name, owner) in [("U1", p), ("U2", qa)] {
        let mut parents: Vec<VarId> = (0..base).filter(|_| rng.gen_bool(0.6)).map(VarId).collect();
        if parents.is_empty() {
            parents.push(VarId(rng.gen_range(1..base)));
        }
        vars.push(Variable { name: name.into(), kind: VarKind::Utility(owner), domain: Vec::new(), parents });
    }
    let mut tables: Vec<Option<Table>> = Vec::new();
    for var in &vars {
        let contexts = 1usize << var.parents.len();
        tables.push(match var.kind {
            VarKind::Chance => Some(Table::Chance((0..contexts).map(|_| random_row(rng, 2, 4)).collect())),
            VarKind::Decision(_) => None,
            VarKind::Utility(_) => Some(Table::Utility((0..contexts).map(|_| Rational::from_integer(rng.gen_range(-3..4).into())).collect())),
        });
    }
    Maid::from_parts(vec!["p".into(), "q".into()], vars, tables, Vec::new())
}

/// The signalling mediator construction: a fair signal s shown to the hardworking type,
/// an independent fair recommendation to the lazy type, and Bob told to hire on a match.
pub fn signaling_construction(m: &Maid) -> maidkit_core::correlation::CorrelatedDist {
    let quarter = q("1/4");
    let support = vec![
        (pure(m, &[("A", &["a", "a"]), ("B", &["b", "bbar"])]), quarter.clone()),
        (pure(m, &[("A", &["a", "abar"]), ("B", &["b", "bbar"])]), quarter.clone()),
        (pure(m, &[("A", &["abar", "a"]), ("B", &["bbar", "b"])]), quarter.clone()),
        (pure(m, &[("A", &["abar", "abar"]), ("B", &["bbar", "b"])]), quarter),
    ];
    maidkit_core::correlation::CorrelatedDist { support }
}
