//! The MAID data model: agents, typed variables, rational tables and shared decision rules.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

/// A rule-bearing unit: a single decision, or a group of decisions sharing one rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Chance,
    Decision(AgentId),
    Utility(AgentId),
}

impl VarKind {
    pub fn owner(self) -> Option<AgentId> {
        match self {
            VarKind::Chance => None,
            VarKind::Decision(a) | VarKind::Utility(a) => Some(a),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// Action or outcome labels. Empty for utility variables, whose domain is
    /// the set of values in their table.
    pub domain: Vec<String>,
    pub parents: Vec<VarId>,
}

impl Variable {
    pub fn is_decision(&self) -> bool {
        matches!(self.kind, VarKind::Decision(_))
    }

    pub fn is_utility(&self) -> bool {
        matches!(self.kind, VarKind::Utility(_))
    }

    pub fn is_chance(&self) -> bool {
        matches!(self.kind, VarKind::Chance)
    }
}

/// Conditional table of a non-decision variable. Rows are indexed by parent
/// instantiation in [`Radix`] order over the parent list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table {
    Chance(Vec<Vec<Rational>>),
    Utility(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MechGroup {
    pub name: String,
    pub members: Vec<VarId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleUnit {
    pub id: UnitId,
    /// Decision name, or the group name for shared rules.
    pub name: String,
    pub owner: AgentId,
    pub members: Vec<VarId>,
    pub group: Option<usize>,
}

impl RuleUnit {
    /// The member whose parents and domain define the rule's signature.
    pub fn template(&self) -> VarId {
        self.members[0]
    }

    pub fn is_shared(&self) -> bool {
        self.group.is_some()
    }
}

/// Mixed-radix indexing over a list of cardinalities; the first digit is most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radix {
    cards: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Radix {
    pub fn new(cards: Vec<usize>) -> Self {
        let mut strides = vec![0; cards.len()];
        let mut len = 1usize;
        for i in (0..cards.len()).rev() {
            strides[i] = len;
            len = len.saturating_mul(cards[i]);
        }
        Radix { cards, strides, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = index / s;
            index %= s;
        }
        out
    }

    /// Advances `digits` to the next value in index order; false after the last one.
    pub fn increment(&self, digits: &mut [usize]) -> bool {
        for i in (0..digits.len()).rev() {
            digits[i] += 1;
            if digits[i] < self.cards[i] {
                return true;
            }
            digits[i] = 0;
        }
        false
    }
}

/// A multi-agent influence diagram.
///
/// Construction through [`Maid::from_parts`] performs no validation so that
/// faulty games can be represented and reported by [`Maid::validate`]. The
/// text parser validates before returning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Maid {
    agents: Vec<String>,
    vars: Vec<Variable>,
    tables: Vec<Option<Table>>,
    groups: Vec<MechGroup>,
    units: Vec<RuleUnit>,
    unit_of: Vec<Option<UnitId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, subject: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { subject: subject.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Maid {
    pub fn from_parts(
        agents: Vec<String>,
        vars: Vec<Variable>,
        tables: Vec<Option<Table>>,
        groups: Vec<MechGroup>,
    ) -> Self {
        let mut tables = tables;
        tables.resize(vars.len(), None);
        let mut group_of: BTreeMap<VarId, usize> = BTreeMap::new();
        for (g, group) in groups.iter().enumerate() {
            for &m in &group.members {
                group_of.entry(m).or_insert(g);
            }
        }
        let mut units: Vec<RuleUnit> = Vec::new();
        let mut unit_of = vec![None; vars.len()];
        let mut group_unit: BTreeMap<usize, UnitId> = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            let VarKind::Decision(owner) = v.kind else { continue };
            let id = VarId(i);
            match group_of.get(&id) {
                Some(&g) => {
                    if let Some(&u) = group_unit.get(&g) {
                        units[u.0].members.push(id);
                        unit_of[i] = Some(u);
                    } else {
                        let u = UnitId(units.len());
                        units.push(RuleUnit {
                            id: u,
                            name: groups[g].name.clone(),
                            owner,
                            members: vec![id],
                            group: Some(g),
                        });
                        group_unit.insert(g, u);
                        unit_of[i] = Some(u);
                    }
                }
                None => {
                    let u = UnitId(units.len());
                    units.push(RuleUnit { id: u, name: v.name.clone(), owner, members: vec![id], group: None });
                    unit_of[i] = Some(u);
                }
            }
        }
        Maid { agents, vars, tables, groups, units, unit_of }
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<Variable>, Vec<Option<Table>>, Vec<MechGroup>) {
        (self.agents, self.vars, self.tables, self.groups)
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents[a.0]
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|n| n == name).map(AgentId)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len()).map(VarId)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, v: VarId) -> &Variable {
        &self.vars[v.0]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.0].name
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn table(&self, v: VarId) -> Option<&Table> {
        self.tables[v.0].as_ref()
    }

    pub fn groups(&self) -> &[MechGroup] {
        &self.groups
    }

    pub fn units(&self) -> &[RuleUnit] {
        &self.units
    }

    pub fn unit(&self, u: UnitId) -> &RuleUnit {
        &self.units[u.0]
    }

    pub fn unit_of(&self, d: VarId) -> Option<UnitId> {
        self.unit_of[d.0]
    }

    pub fn unit_by_name(&self, name: &str) -> Option<UnitId> {
        self.units.iter().position(|u| u.name == name).map(UnitId)
    }

    pub fn units_of(&self, a: AgentId) -> impl Iterator<Item = &RuleUnit> + '_ {
        self.units.iter().filter(move |u| u.owner == a)
    }

    pub fn decisions(&self) -> impl Iterator<Item = VarId> + '_ {
        self.var_ids().filter(|&v| self.var(v).is_decision())
    }

    pub fn decisions_of(&self, a: AgentId) -> impl Iterator<Item = VarId> + '_ {
        self.var_ids().filter(move |&v| self.var(v).kind == VarKind::Decision(a))
    }

    pub fn utilities_of(&self, a: AgentId) -> impl Iterator<Item = VarId> + '_ {
        self.var_ids().filter(move |&v| self.var(v).kind == VarKind::Utility(a))
    }

    pub fn is_absent_minded(&self, a: AgentId) -> bool {
        self.units_of(a).any(|u| u.is_shared())
    }

    /// Distinct values of a utility table in ascending order.
    pub fn utility_values(&self, v: VarId) -> Vec<Rational> {
        match self.table(v) {
            Some(Table::Utility(vals)) => {
                let set: BTreeSet<Rational> = vals.iter().cloned().collect();
                set.into_iter().collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn card(&self, v: VarId) -> usize {
        let var = self.var(v);
        if var.is_utility() {
            self.utility_values(v).len().max(1)
        } else {
            var.domain.len()
        }
    }

    pub fn context_radix(&self, v: VarId) -> Radix {
        Radix::new(self.var(v).parents.iter().map(|&p| self.card(p)).collect())
    }

    pub fn context_count(&self, v: VarId) -> usize {
        self.context_radix(v).len()
    }

    /// Index of `v`'s parent instantiation within a full assignment of all variables.
    pub fn context_index(&self, v: VarId, assignment: &[usize]) -> usize {
        let radix = self.context_radix(v);
        let digits: Vec<usize> = self.var(v).parents.iter().map(|p| assignment[p.0]).collect();
        radix.index(&digits)
    }

    /// Label of a value of a chance or decision variable; utility values print as rationals.
    pub fn value_label(&self, v: VarId, value: usize) -> String {
        let var = self.var(v);
        if var.is_utility() {
            self.utility_values(v).get(value).map(format_rational).unwrap_or_default()
        } else {
            var.domain.get(value).cloned().unwrap_or_default()
        }
    }

    /// `p1=l1,p2=l2` for a context index; empty for parentless variables.
    pub fn context_label(&self, v: VarId, ctx: usize) -> String {
        let radix = self.context_radix(v);
        let digits = radix.decode(ctx);
        let parts: Vec<String> = self
            .var(v)
            .parents
            .iter()
            .zip(digits)
            .map(|(&p, d)| format!("{}={}", self.name(p), self.value_label(p, d)))
            .collect();
        parts.join(",")
    }

    pub fn children(&self, v: VarId) -> Vec<VarId> {
        self.var_ids().filter(|&c| self.var(c).parents.contains(&v)).collect()
    }

    /// Kahn's algorithm with smallest-index-first ties; `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<VarId>> {
        let n = self.vars.len();
        let mut indeg = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        for (i, v) in self.vars.iter().enumerate() {
            for p in &v.parents {
                if p.0 >= n {
                    return None;
                }
                indeg[i] += 1;
                children[p.0].push(i);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(VarId(i));
            for &c in &children[i] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Descendants of `v`, excluding `v` itself.
    pub fn descendants(&self, v: VarId) -> Vec<bool> {
        let n = self.vars.len();
        let mut children = vec![Vec::new(); n];
        for (i, var) in self.vars.iter().enumerate() {
            for p in &var.parents {
                children[p.0].push(i);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = children[v.0].clone();
        while let Some(c) = stack.pop() {
            if !seen[c] {
                seen[c] = true;
                stack.extend(children[c].iter().copied());
            }
        }
        seen
    }

    /// Parent domain labels, used to compare decision-rule signatures.
    pub fn parent_signature(&self, d: VarId) -> Vec<&[String]> {
        self.var(d).parents.iter().map(|&p| self.var(p).domain.as_slice()).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.vars.len();
        if n == 0 {
            report.push("game", "declares no variables");
            return report;
        }
        let mut seen = BTreeSet::new();
        for a in &self.agents {
            if !seen.insert(a.as_str()) {
                report.push(format!("agent {a}"), "declared more than once");
            }
        }
        let mut seen = BTreeSet::new();
        for v in &self.vars {
            if !seen.insert(v.name.as_str()) {
                report.push(format!("variable {}", v.name), "declared more than once");
            }
        }
        let mut structural_ok = true;
        for v in &self.vars {
            let subject = format!("variable {}", v.name);
            if let Some(a) = v.kind.owner() {
                if a.0 >= self.agents.len() {
                    report.push(subject.clone(), "owner is not a declared agent");
                    structural_ok = false;
                }
            }
            let mut ps = BTreeSet::new();
            for p in &v.parents {
                if p.0 >= n {
                    report.push(subject.clone(), "parent is not a declared variable");
                    structural_ok = false;
                } else if !ps.insert(*p) {
                    report.push(subject.clone(), format!("parent {} listed twice", self.name(*p)));
                }
            }
            if !v.is_utility() {
                if v.domain.len() < 2 {
                    report.push(subject.clone(), "domain must have at least 2 entries");
                }
                let labels: BTreeSet<&String> = v.domain.iter().collect();
                if labels.len() != v.domain.len() {
                    report.push(subject.clone(), "domain labels must be distinct");
                }
            }
        }
        if !structural_ok {
            return report;
        }
        if self.topological_order().is_none() {
            report.push("graph", "contains a directed cycle");
        }
        for (i, v) in self.vars.iter().enumerate() {
            for p in &v.parents {
                if self.var(*p).is_utility() {
                    report.push(format!("variable {}", self.name(*p)), format!("utility variable has a child ({})", v.name));
                }
                if p.0 == i {
                    report.push(format!("variable {}", v.name), "is its own parent");
                }
            }
        }
        for (i, v) in self.vars.iter().enumerate() {
            let id = VarId(i);
            let subject = format!("variable {}", v.name);
            let contexts = self.context_count(id);
            match (&v.kind, &self.tables[i]) {
                (VarKind::Decision(_), Some(_)) => report.push(subject, "decision variables take no table"),
                (VarKind::Decision(_), None) => {}
                (VarKind::Chance, None) => report.push(subject, "missing cpd"),
                (VarKind::Utility(_), None) => report.push(subject, "missing utility table"),
                (VarKind::Chance, Some(Table::Chance(rows))) => {
                    if rows.len() != contexts {
                        report.push(subject.clone(), format!("cpd has {} rows, expected {contexts}", rows.len()));
                    }
                    for (r, row) in rows.iter().enumerate() {
                        let label = self.context_label(id, r);
                        let row_subject =
                            if label.is_empty() { format!("variable {}", v.name) } else { format!("variable {} row {label}", v.name) };
                        if row.len() != v.domain.len() {
                            report.push(row_subject.clone(), format!("row has {} entries, expected {}", row.len(), v.domain.len()));
                        }
                        if row.iter().any(|q| q.is_negative()) {
                            report.push(row_subject.clone(), "negative probability");
                        }
                        let total = row.iter().fold(Rational::zero(), |acc, q| acc + q);
                        if total != Rational::one() {
                            report.push(row_subject, format!("row not normalized (sums to {})", format_rational(&total)));
                        }
                    }
                }
                (VarKind::Utility(_), Some(Table::Utility(vals))) => {
                    if vals.len() != contexts {
                        report.push(subject, format!("utility table has {} rows, expected {contexts}", vals.len()));
                    }
                }
                (VarKind::Chance, Some(Table::Utility(_))) => report.push(subject, "chance variable given a utility table"),
                (VarKind::Utility(_), Some(Table::Chance(_))) => report.push(subject, "utility variable given a probability table"),
            }
        }
        for a in self.agent_ids() {
            let subject = format!("agent {}", self.agent_name(a));
            if self.decisions_of(a).next().is_none() {
                report.push(subject.clone(), "owns no decision variable");
            }
            if self.utilities_of(a).next().is_none() {
                report.push(subject, "owns no utility variable");
            }
        }
        let mut grouped: BTreeMap<VarId, &str> = BTreeMap::new();
        let mut group_names = BTreeSet::new();
        for g in &self.groups {
            let subject = format!("share {}", g.name);
            if !group_names.insert(g.name.as_str()) {
                report.push(subject.clone(), "group declared more than once");
            }
            if self.var_by_name(&g.name).is_some() {
                report.push(subject.clone(), "group name collides with a variable");
            }
            if g.members.len() < 2 {
                report.push(subject.clone(), "a shared rule needs at least 2 decisions");
            }
            let mut owners = BTreeSet::new();
            for &m in &g.members {
                if m.0 >= n {
                    report.push(subject.clone(), "member is not a declared variable");
                    continue;
                }
                match self.var(m).kind {
                    VarKind::Decision(a) => {
                        owners.insert(a);
                    }
                    _ => report.push(subject.clone(), format!("member {} is not a decision", self.name(m))),
                }
                if let Some(other) = grouped.insert(m, &g.name) {
                    report.push(subject.clone(), format!("member {} already shares rule {other}", self.name(m)));
                }
            }
            if owners.len() > 1 {
                report.push(subject.clone(), "members belong to different agents");
            }
            let valid: Vec<VarId> = g.members.iter().copied().filter(|m| m.0 < n).collect();
            if let Some((&first, rest)) = valid.split_first() {
                for &m in rest {
                    if self.var(m).domain != self.var(first).domain {
                        report.push(
                            subject.clone(),
                            format!("{} and {} have different action domains; a shared rule needs equal dom(D)", self.name(first), self.name(m)),
                        );
                    }
                    if self.parent_signature(m) != self.parent_signature(first) {
                        report.push(
                            subject.clone(),
                            format!(
                                "{} and {} have different parent signatures; a shared rule needs equal dom(Pa_D)",
                                self.name(first),
                                self.name(m)
                            ),
                        );
                    }
                }
            }
        }
        report
    }

    /// Returns a copy in which every chance CPD row and utility entry is replaced.
    pub fn with_table(&self, v: VarId, table: Option<Table>) -> Maid {
        let mut tables = self.tables.clone();
        tables[v.0] = table;
        Maid::from_parts(self.agents.clone(), self.vars.clone(), tables, self.groups.clone())
    }

    pub fn tables(&self) -> &[Option<Table>] {
        &self.tables
    }
}

/// A finite normal-form game: strategies per player and one payoff tensor per player.
///
/// Tensors are flat, indexed by joint strategy in [`Radix`] order over players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormGame {
    pub players: Vec<String>,
    pub strategies: Vec<Vec<String>>,
    pub payoffs: Vec<Vec<Rational>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImportError {
    #[error("player {player} has {count} strategies; at least 2 are required")]
    TooFewStrategies { player: String, count: usize },
    #[error("payoff tensor for {player} has {found} entries, expected {expected}")]
    RaggedTensor { player: String, expected: usize, found: usize },
    #[error("{players} players but {tensors} payoff tensors")]
    TensorCount { players: usize, tensors: usize },
}

/// One parentless decision and one utility (with every decision as parent) per player.
pub fn import_normal_form(game: &NormalFormGame) -> Result<Maid, ImportError> {
    let n = game.players.len();
    if game.payoffs.len() != n || game.strategies.len() != n {
        return Err(ImportError::TensorCount { players: n, tensors: game.payoffs.len() });
    }
    for (p, s) in game.players.iter().zip(&game.strategies) {
        if s.len() < 2 {
            return Err(ImportError::TooFewStrategies { player: p.clone(), count: s.len() });
        }
    }
    let expected: usize = game.strategies.iter().map(Vec::len).product();
    for (p, t) in game.players.iter().zip(&game.payoffs) {
        if t.len() != expected {
            return Err(ImportError::RaggedTensor { player: p.clone(), expected, found: t.len() });
        }
    }
    let mut vars = Vec::with_capacity(2 * n);
    for (i, p) in game.players.iter().enumerate() {
        vars.push(Variable {
            name: format!("D_{p}"),
            kind: VarKind::Decision(AgentId(i)),
            domain: game.strategies[i].clone(),
            parents: Vec::new(),
        });
    }
    let decisions: Vec<VarId> = (0..n).map(VarId).collect();
    let mut tables: Vec<Option<Table>> = vec![None; n];
    for (i, p) in game.players.iter().enumerate() {
        vars.push(Variable {
            name: format!("U_{p}"),
            kind: VarKind::Utility(AgentId(i)),
            domain: Vec::new(),
            parents: decisions.clone(),
        });
        tables.push(Some(Table::Utility(game.payoffs[i].clone())));
    }
    Ok(Maid::from_parts(game.players.clone(), vars, tables, Vec::new()))
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
