//! Line-oriented text formats: games, policies, correlated distributions and normal forms.
//!
//! Every format uses `#` comments and one statement per line. Serializers emit
//! a canonical form, so serializing a parsed canonical file reproduces it byte for byte.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::correlation::CorrelatedDist;
use crate::model::{AgentId, Maid, MechGroup, NormalFormGame, Radix, Table, UnitId, ValidationReport, VarId, VarKind, Variable};
use crate::policies::{AgentMixture, BehaviouralProfile, MixtureProfile, PureProfile};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Undeclared(String),
    Duplicate(String),
    Invalid(ValidationReport),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based; 0 for whole-file problems.
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "{m}"),
            ParseErrorKind::Undeclared(n) => write!(f, "reference to undeclared name {n}"),
            ParseErrorKind::Duplicate(n) => write!(f, "duplicate declaration of {n}"),
            ParseErrorKind::Invalid(r) => write!(f, "invalid game:\n{r}"),
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn undeclared(line: usize, name: &str) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Undeclared(name.into()) }
}

fn duplicate(line: usize, name: &str) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Duplicate(name.into()) }
}

/// Non-empty lines with comments stripped, paired with their 1-based number.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains([',', '=', '|', ':', '#']) && !s.chars().any(char::is_whitespace)
}

fn parse_list(line: usize, s: &str) -> Result<Vec<String>, ParseError> {
    let items: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
    if let Some(bad) = items.iter().find(|x| !valid_name(x)) {
        return Err(syntax(line, format!("invalid name {bad:?} in list")));
    }
    Ok(items)
}

fn parse_q(line: usize, s: &str) -> Result<Rational, ParseError> {
    parse_rational(s).ok_or_else(|| syntax(line, format!("{s:?} is not a rational of the form n or n/d")))
}

/// Splits `[| assignment] : values` into the assignment pairs and the value tokens.
fn split_row(line: usize, rest: &str) -> Result<(Vec<(String, String)>, Vec<String>), ParseError> {
    let colon = rest.rfind(':').ok_or_else(|| syntax(line, "expected ':' before the values"))?;
    let (head, tail) = (rest[..colon].trim(), rest[colon + 1..].trim());
    let values: Vec<String> = tail.split_whitespace().map(String::from).collect();
    if values.is_empty() {
        return Err(syntax(line, "row has no values"));
    }
    let mut pairs = Vec::new();
    if !head.is_empty() {
        let body = head.strip_prefix('|').ok_or_else(|| syntax(line, "expected '|' before the parent assignment"))?.trim();
        for part in body.split(',') {
            let (k, v) = part.trim().split_once('=').ok_or_else(|| syntax(line, format!("expected parent=value, found {part:?}")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok((pairs, values))
}

struct Decl {
    line: usize,
    name: String,
    kind: u8, // 0 chance, 1 decision, 2 utility
    agent: Option<String>,
    parents: Vec<String>,
    domain: Vec<String>,
}

struct RowLine {
    line: usize,
    var: String,
    utility: bool,
    pairs: Vec<(String, String)>,
    values: Vec<String>,
}

/// Parses a game without running validation (structural resolution errors are still reported).
pub fn parse_unvalidated(text: &str) -> Result<Maid, ParseError> {
    let mut agents: Vec<(usize, String)> = Vec::new();
    let mut decls: Vec<Decl> = Vec::new();
    let mut rows: Vec<RowLine> = Vec::new();
    let mut shares: Vec<(usize, String, Vec<String>)> = Vec::new();
    for (ln, l) in lines(text) {
        let (kw, rest) = l.split_once(char::is_whitespace).map(|(a, b)| (a, b.trim())).unwrap_or((l, ""));
        match kw {
            "agent" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 1 || !valid_name(toks[0]) {
                    return Err(syntax(ln, "expected: agent <name>"));
                }
                if agents.iter().any(|(_, a)| a == toks[0]) {
                    return Err(duplicate(ln, toks[0]));
                }
                agents.push((ln, toks[0].to_string()));
            }
            "chance" | "decision" | "utility" => {
                let mut toks = rest.split_whitespace();
                let name = toks.next().filter(|n| valid_name(n)).ok_or_else(|| syntax(ln, format!("expected a variable name after {kw}")))?;
                if decls.iter().any(|d| d.name == name) {
                    return Err(duplicate(ln, name));
                }
                let mut decl = Decl {
                    line: ln,
                    name: name.to_string(),
                    kind: match kw {
                        "chance" => 0,
                        "decision" => 1,
                        _ => 2,
                    },
                    agent: None,
                    parents: Vec::new(),
                    domain: Vec::new(),
                };
                let mut seen = BTreeSet::new();
                for t in toks {
                    let (k, v) = t.split_once('=').ok_or_else(|| syntax(ln, format!("expected key=value, found {t:?}")))?;
                    if !seen.insert(k) {
                        return Err(syntax(ln, format!("{k} given twice")));
                    }
                    match (k, decl.kind) {
                        ("parents", _) => decl.parents = parse_list(ln, v)?,
                        ("domain", 0 | 1) => decl.domain = parse_list(ln, v)?,
                        ("agent", 1 | 2) => {
                            if !valid_name(v) {
                                return Err(syntax(ln, "invalid agent name"));
                            }
                            decl.agent = Some(v.to_string());
                        }
                        _ => return Err(syntax(ln, format!("unexpected key {k} for {kw}"))),
                    }
                }
                if decl.kind != 2 && !seen.contains("domain") {
                    return Err(syntax(ln, format!("{kw} {name} needs domain=")));
                }
                if decl.kind != 0 && decl.agent.is_none() {
                    return Err(syntax(ln, format!("{kw} {name} needs agent=")));
                }
                decls.push(decl);
            }
            "cpd" | "util" => {
                let (name, tail) = rest.split_once(char::is_whitespace).map(|(a, b)| (a, b.trim())).unwrap_or((rest, ""));
                if !valid_name(name) {
                    return Err(syntax(ln, format!("expected a variable name after {kw}")));
                }
                let (pairs, values) = split_row(ln, tail)?;
                rows.push(RowLine { line: ln, var: name.to_string(), utility: kw == "util", pairs, values });
            }
            "share" => {
                let (head, tail) = rest.split_once(':').ok_or_else(|| syntax(ln, "expected: share <group> : <d1> <d2> ..."))?;
                let group = head.trim();
                if !valid_name(group) {
                    return Err(syntax(ln, "invalid group name"));
                }
                if shares.iter().any(|(_, g, _)| g == group) {
                    return Err(duplicate(ln, group));
                }
                let members: Vec<String> = tail.split_whitespace().map(String::from).collect();
                shares.push((ln, group.to_string(), members));
            }
            other => return Err(syntax(ln, format!("unknown statement {other:?}"))),
        }
    }

    let agent_names: Vec<String> = agents.iter().map(|(_, a)| a.clone()).collect();
    let index: BTreeMap<&str, usize> = decls.iter().enumerate().map(|(i, d)| (d.name.as_str(), i)).collect();
    let mut vars = Vec::with_capacity(decls.len());
    for d in &decls {
        let owner = match &d.agent {
            Some(a) => Some(AgentId(agent_names.iter().position(|x| x == a).ok_or_else(|| undeclared(d.line, a))?)),
            None => None,
        };
        let kind = match d.kind {
            0 => VarKind::Chance,
            1 => VarKind::Decision(owner.unwrap()),
            _ => VarKind::Utility(owner.unwrap()),
        };
        let mut parents = Vec::with_capacity(d.parents.len());
        for p in &d.parents {
            parents.push(VarId(*index.get(p.as_str()).ok_or_else(|| undeclared(d.line, p))?));
        }
        vars.push(Variable { name: d.name.clone(), kind, domain: d.domain.clone(), parents });
    }
    let mut groups = Vec::new();
    for (ln, g, members) in &shares {
        let mut ids = Vec::new();
        for mname in members {
            ids.push(VarId(*index.get(mname.as_str()).ok_or_else(|| undeclared(*ln, mname))?));
        }
        groups.push(MechGroup { name: g.clone(), members: ids });
    }
    // Utility domains come from the table, so parents' cardinalities must be known first.
    let n = vars.len();
    let mut util_rows: Vec<BTreeMap<usize, (usize, Rational)>> = vec![BTreeMap::new(); n];
    let mut cpd_rows: Vec<BTreeMap<usize, (usize, Vec<Rational>)>> = vec![BTreeMap::new(); n];
    let skeleton = Maid::from_parts(agent_names.clone(), vars.clone(), vec![None; n], groups.clone());
    let card_of = |v: usize, util_rows: &[BTreeMap<usize, (usize, Rational)>]| -> usize {
        if vars[v].is_utility() {
            let set: BTreeSet<&Rational> = util_rows[v].values().map(|(_, q)| q).collect();
            set.len().max(1)
        } else {
            vars[v].domain.len()
        }
    };
    // an utility feeding another variable is a validation error; their rows are resolved first
    let mut ordered: Vec<&RowLine> = rows.iter().filter(|r| r.utility).collect();
    ordered.extend(rows.iter().filter(|r| !r.utility));
    for r in ordered {
        let v = *index.get(r.var.as_str()).ok_or_else(|| undeclared(r.line, &r.var))?;
        let var = &vars[v];
        match (r.utility, &var.kind) {
            (true, VarKind::Utility(_)) | (false, VarKind::Chance) => {}
            (true, _) => return Err(syntax(r.line, format!("util rows belong to utility variables; {} is not one", var.name))),
            (false, _) => return Err(syntax(r.line, format!("cpd rows belong to chance variables; {} is not one", var.name))),
        }
        let mut digits = vec![usize::MAX; var.parents.len()];
        for (k, val) in &r.pairs {
            let pos = var
                .parents
                .iter()
                .position(|p| vars[p.0].name == *k)
                .ok_or_else(|| syntax(r.line, format!("{k} is not a parent of {}", var.name)))?;
            if digits[pos] != usize::MAX {
                return Err(syntax(r.line, format!("{k} assigned twice")));
            }
            let p = var.parents[pos].0;
            let idx = if vars[p].is_utility() {
                let q = parse_q(r.line, val)?;
                let set: BTreeSet<&Rational> = util_rows[p].values().map(|(_, q)| q).collect();
                set.iter().position(|x| **x == q).ok_or_else(|| syntax(r.line, format!("{val} is not a value of {k}")))?
            } else {
                vars[p].domain.iter().position(|x| x == val).ok_or_else(|| syntax(r.line, format!("{val} is not in the domain of {k}")))?
            };
            digits[pos] = idx;
        }
        if digits.contains(&usize::MAX) {
            return Err(syntax(r.line, format!("row must assign every parent of {}", var.name)));
        }
        let cards: Vec<usize> = var.parents.iter().map(|p| card_of(p.0, &util_rows)).collect();
        let ctx = Radix::new(cards).index(&digits);
        if r.utility {
            if r.values.len() != 1 {
                return Err(syntax(r.line, "util rows take exactly one value"));
            }
            let q = parse_q(r.line, &r.values[0])?;
            if util_rows[v].insert(ctx, (r.line, q)).is_some() {
                return Err(syntax(r.line, format!("row for {} given twice", skeleton.context_label(VarId(v), ctx))));
            }
        } else {
            let qs = r.values.iter().map(|s| parse_q(r.line, s)).collect::<Result<Vec<_>, _>>()?;
            if cpd_rows[v].insert(ctx, (r.line, qs)).is_some() {
                return Err(syntax(r.line, "cpd row given twice"));
            }
        }
    }
    let mut tables = vec![None; n];
    for v in 0..n {
        let contexts: usize = vars[v].parents.iter().map(|p| card_of(p.0, &util_rows)).product();
        if !util_rows[v].is_empty() {
            if let Some(missing) = (0..contexts).find(|c| !util_rows[v].contains_key(c)) {
                return Err(syntax(decls[v].line, format!("util {} is missing row {missing} of {contexts}", vars[v].name)));
            }
            tables[v] = Some(Table::Utility(util_rows[v].values().map(|(_, q)| q.clone()).collect()));
        }
        if !cpd_rows[v].is_empty() {
            if let Some(missing) = (0..contexts).find(|c| !cpd_rows[v].contains_key(c)) {
                return Err(syntax(decls[v].line, format!("cpd {} is missing row {missing} of {contexts}", vars[v].name)));
            }
            tables[v] = Some(Table::Chance(cpd_rows[v].values().map(|(_, q)| q.clone()).collect()));
        }
    }
    Ok(Maid::from_parts(agent_names, vars, tables, groups))
}

/// Parses and validates a game file.
pub fn parse_maid(text: &str) -> Result<Maid, ParseError> {
    let m = parse_unvalidated(text)?;
    let report = m.validate();
    if report.is_ok() {
        Ok(m)
    } else {
        Err(ParseError { line: 0, kind: ParseErrorKind::Invalid(report) })
    }
}

fn assignment_text(m: &Maid, v: VarId, ctx: usize) -> String {
    if m.var(v).parents.is_empty() {
        String::new()
    } else {
        format!(" | {}", m.context_label(v, ctx))
    }
}

/// Canonical text of a game.
pub fn serialize_maid(m: &Maid) -> String {
    let mut out = String::new();
    for a in m.agents() {
        out.push_str(&format!("agent {a}\n"));
    }
    if !m.agents().is_empty() {
        out.push('\n');
    }
    for v in m.vars() {
        let parents = if v.parents.is_empty() {
            String::new()
        } else {
            let ps: Vec<&str> = v.parents.iter().map(|&p| m.name(p)).collect();
            format!(" parents={}", ps.join(","))
        };
        match v.kind {
            VarKind::Chance => out.push_str(&format!("chance {}{parents} domain={}\n", v.name, v.domain.join(","))),
            VarKind::Decision(a) => {
                out.push_str(&format!("decision {} agent={}{parents} domain={}\n", v.name, m.agent_name(a), v.domain.join(",")))
            }
            VarKind::Utility(a) => out.push_str(&format!("utility {} agent={}{parents}\n", v.name, m.agent_name(a))),
        }
    }
    if !m.groups().is_empty() {
        out.push('\n');
        for g in m.groups() {
            let ms: Vec<&str> = g.members.iter().map(|&d| m.name(d)).collect();
            out.push_str(&format!("share {} : {}\n", g.name, ms.join(" ")));
        }
    }
    for v in m.var_ids() {
        match m.table(v) {
            Some(Table::Chance(rows)) => {
                out.push('\n');
                for (ctx, row) in rows.iter().enumerate() {
                    let qs: Vec<String> = row.iter().map(format_rational).collect();
                    out.push_str(&format!("cpd {}{} : {}\n", m.name(v), assignment_text(m, v, ctx), qs.join(" ")));
                }
            }
            Some(Table::Utility(vals)) => {
                out.push('\n');
                for (ctx, q) in vals.iter().enumerate() {
                    out.push_str(&format!("util {}{} : {}\n", m.name(v), assignment_text(m, v, ctx), format_rational(q)));
                }
            }
            None => {}
        }
    }
    out
}

/// Resolves a `p=v,...` assignment against the parents of `d`.
fn context_of(m: &Maid, d: VarId, pairs: &[(String, String)], line: usize) -> Result<usize, ParseError> {
    let var = m.var(d);
    let mut digits = vec![usize::MAX; var.parents.len()];
    for (k, val) in pairs {
        let pos = var
            .parents
            .iter()
            .position(|&p| m.name(p) == k)
            .ok_or_else(|| syntax(line, format!("{k} is not a parent of {}", var.name)))?;
        if digits[pos] != usize::MAX {
            return Err(syntax(line, format!("{k} assigned twice")));
        }
        let p = var.parents[pos];
        digits[pos] = (0..m.card(p))
            .find(|&i| m.value_label(p, i) == *val)
            .ok_or_else(|| syntax(line, format!("{val} is not a value of {k}")))?;
    }
    if digits.contains(&usize::MAX) {
        return Err(syntax(line, format!("assignment must cover every parent of {}", var.name)));
    }
    Ok(m.context_radix(d).index(&digits))
}

fn resolve_unit(m: &Maid, name: &str, line: usize) -> Result<UnitId, ParseError> {
    if let Some(u) = m.unit_by_name(name) {
        return Ok(u);
    }
    if let Some(v) = m.var_by_name(name) {
        if let Some(u) = m.unit_of(v) {
            return Err(syntax(line, format!("{name} shares rule {}; give rules for {} instead", m.unit(u).name, m.unit(u).name)));
        }
        return Err(syntax(line, format!("{name} is not a decision")));
    }
    Err(undeclared(line, name))
}

/// Rules outside any `weight` block plus the weighted blocks in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyFile {
    pub base: BehaviouralProfile,
    pub blocks: Vec<(Rational, BehaviouralProfile)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedPolicy {
    Behavioural(BehaviouralProfile),
    Mixture(MixtureProfile),
}

impl PolicyFile {
    /// Without weight blocks this is a behavioural profile. Otherwise each block belongs to one
    /// agent; agents without blocks keep their base rules as a point mass.
    pub fn into_policy(self, m: &Maid) -> Result<ParsedPolicy, ParseError> {
        if self.blocks.is_empty() {
            return Ok(ParsedPolicy::Behavioural(self.base));
        }
        let mut per_agent: Vec<Vec<(BehaviouralProfile, Rational)>> = vec![Vec::new(); m.agents().len()];
        for (k, (w, p)) in self.blocks.into_iter().enumerate() {
            let owners: BTreeSet<AgentId> = m.units().iter().filter(|u| p.rule(u.id).is_some()).map(|u| u.owner).collect();
            if owners.len() != 1 {
                return Err(syntax(0, format!("weight block {} must give rules for exactly one agent", k + 1)));
            }
            let a = *owners.iter().next().unwrap();
            per_agent[a.0].push((p, w));
        }
        let agents = m
            .agent_ids()
            .map(|a| {
                let support = if per_agent[a.0].is_empty() {
                    vec![(self.base.restricted(m, a), Rational::from_integer(1.into()))]
                } else {
                    core::mem::take(&mut per_agent[a.0])
                };
                AgentMixture { agent: a, support }
            })
            .collect();
        Ok(ParsedPolicy::Mixture(MixtureProfile { agents }))
    }
}

pub fn parse_policy(m: &Maid, text: &str) -> Result<PolicyFile, ParseError> {
    let mut base = BehaviouralProfile::empty(m);
    let mut blocks: Vec<(Rational, BehaviouralProfile)> = Vec::new();
    let mut partial: BTreeMap<(usize, UnitId), BTreeMap<usize, Vec<Rational>>> = BTreeMap::new();
    let mut first_line: BTreeMap<(usize, UnitId), usize> = BTreeMap::new();
    for (ln, l) in lines(text) {
        let (kw, rest) = l.split_once(char::is_whitespace).map(|(a, b)| (a, b.trim())).unwrap_or((l, ""));
        match kw {
            "weight" => {
                let q = parse_q(ln, rest)?;
                blocks.push((q, BehaviouralProfile::empty(m)));
            }
            "rule" => {
                let (name, tail) = rest.split_once(char::is_whitespace).map(|(a, b)| (a, b.trim())).unwrap_or((rest, ""));
                let u = resolve_unit(m, name, ln)?;
                let (pairs, values) = split_row(ln, tail)?;
                let ctx = context_of(m, m.unit(u).template(), &pairs, ln)?;
                let qs = values.iter().map(|s| parse_q(ln, s)).collect::<Result<Vec<_>, _>>()?;
                let key = (blocks.len(), u);
                first_line.entry(key).or_insert(ln);
                if partial.entry(key).or_default().insert(ctx, qs).is_some() {
                    return Err(syntax(ln, format!("rule row for {name} given twice")));
                }
            }
            other => return Err(syntax(ln, format!("unknown statement {other:?}"))),
        }
    }
    for ((block, u), rows) in partial {
        let contexts = m.context_count(m.unit(u).template());
        if rows.len() != contexts {
            return Err(syntax(first_line[&(block, u)], format!("rule {} covers {} of {contexts} contexts", m.unit(u).name, rows.len())));
        }
        let rule: Vec<Vec<Rational>> = rows.into_values().collect();
        crate::policies::check_rule(m, u, &rule).map_err(|e| syntax(first_line[&(block, u)], e.to_string()))?;
        if block == 0 {
            base.set(u, rule);
        } else {
            blocks[block - 1].1.set(u, rule);
        }
    }
    Ok(PolicyFile { base, blocks })
}

fn push_rules(out: &mut String, m: &Maid, p: &BehaviouralProfile) {
    for u in m.units() {
        if let Some(rows) = p.rule(u.id) {
            let d = u.template();
            for (ctx, row) in rows.iter().enumerate() {
                let qs: Vec<String> = row.iter().map(format_rational).collect();
                out.push_str(&format!("rule {}{} : {}\n", u.name, assignment_text(m, d, ctx), qs.join(" ")));
            }
        }
    }
}

pub fn serialize_behavioural(m: &Maid, p: &BehaviouralProfile) -> String {
    let mut out = String::new();
    push_rules(&mut out, m, p);
    out
}

pub fn serialize_mixture(m: &Maid, p: &MixtureProfile) -> String {
    let mut out = String::new();
    for am in &p.agents {
        for (rules, w) in &am.support {
            out.push_str(&format!("weight {}\n", format_rational(w)));
            push_rules(&mut out, m, rules);
        }
    }
    out
}

/// `Unit=a,b ... : q` lines; every unit must be assigned one action per context.
pub fn parse_kappa(m: &Maid, text: &str) -> Result<CorrelatedDist, ParseError> {
    let mut support = Vec::new();
    for (ln, l) in lines(text) {
        let colon = l.rfind(':').ok_or_else(|| syntax(ln, "expected <profile> : <weight>"))?;
        let w = parse_q(ln, l[colon + 1..].trim())?;
        let mut choices: Vec<Option<Vec<usize>>> = vec![None; m.units().len()];
        for tok in l[..colon].split_whitespace() {
            let (name, acts) = tok.split_once('=').ok_or_else(|| syntax(ln, format!("expected Unit=actions, found {tok:?}")))?;
            let u = resolve_unit(m, name, ln)?;
            let d = m.unit(u).template();
            let idx = acts
                .split(',')
                .map(|a| (0..m.card(d)).find(|&i| m.value_label(d, i) == a).ok_or_else(|| syntax(ln, format!("{a} is not an action of {name}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if idx.len() != m.context_count(d) {
                return Err(syntax(ln, format!("{name} needs {} actions, one per context", m.context_count(d))));
            }
            if choices[u.0].replace(idx).is_some() {
                return Err(syntax(ln, format!("{name} assigned twice")));
            }
        }
        if let Some(u) = m.units().iter().find(|u| choices[u.id.0].is_none()) {
            return Err(syntax(ln, format!("profile does not assign {}", u.name)));
        }
        support.push((PureProfile { choices }, w));
    }
    Ok(CorrelatedDist { support })
}

pub fn serialize_kappa(m: &Maid, k: &CorrelatedDist) -> String {
    let mut out = String::new();
    for (p, w) in &k.support {
        if !w.is_zero() {
            out.push_str(&format!("{} : {}\n", p.assignment(m), format_rational(w)));
        }
    }
    out
}

/// `player <name> : s1 s2 ...` lines, then one `payoff <s..> : <u..>` line per joint strategy.
pub fn parse_normal_form(text: &str) -> Result<NormalFormGame, ParseError> {
    let mut players: Vec<String> = Vec::new();
    let mut strategies: Vec<Vec<String>> = Vec::new();
    let mut cells: BTreeMap<usize, (usize, Vec<Rational>)> = BTreeMap::new();
    for (ln, l) in lines(text) {
        let (kw, rest) = l.split_once(char::is_whitespace).map(|(a, b)| (a, b.trim())).unwrap_or((l, ""));
        let (head, tail) = rest.split_once(':').ok_or_else(|| syntax(ln, "expected ':'"))?;
        match kw {
            "player" => {
                if !cells.is_empty() {
                    return Err(syntax(ln, "players must be declared before payoffs"));
                }
                let name = head.trim();
                if !valid_name(name) {
                    return Err(syntax(ln, "invalid player name"));
                }
                if players.iter().any(|p| p == name) {
                    return Err(duplicate(ln, name));
                }
                let s: Vec<String> = tail.split_whitespace().map(String::from).collect();
                if s.iter().any(|x| !valid_name(x)) {
                    return Err(syntax(ln, "invalid strategy name"));
                }
                players.push(name.to_string());
                strategies.push(s);
            }
            "payoff" => {
                let s: Vec<&str> = head.split_whitespace().collect();
                if s.len() != players.len() {
                    return Err(syntax(ln, format!("expected {} strategies", players.len())));
                }
                let digits = s
                    .iter()
                    .zip(&strategies)
                    .map(|(x, ss)| ss.iter().position(|y| y == x).ok_or_else(|| syntax(ln, format!("unknown strategy {x}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let us = tail.split_whitespace().map(|q| parse_q(ln, q)).collect::<Result<Vec<_>, _>>()?;
                if us.len() != players.len() {
                    return Err(syntax(ln, format!("expected {} payoffs", players.len())));
                }
                let k = Radix::new(strategies.iter().map(Vec::len).collect()).index(&digits);
                if cells.insert(k, (ln, us)).is_some() {
                    return Err(syntax(ln, "payoff for this profile given twice"));
                }
            }
            other => return Err(syntax(ln, format!("unknown statement {other:?}"))),
        }
    }
    let total: usize = strategies.iter().map(Vec::len).product();
    if let Some(missing) = (0..total).find(|k| !cells.contains_key(k)) {
        let digits = Radix::new(strategies.iter().map(Vec::len).collect()).decode(missing);
        let names: Vec<&str> = digits.iter().zip(&strategies).map(|(&d, s)| s[d].as_str()).collect();
        return Err(syntax(0, format!("no payoff for profile {}", names.join(" "))));
    }
    let mut payoffs = vec![Vec::with_capacity(total); players.len()];
    for (_, (_, us)) in cells {
        for (i, u) in us.into_iter().enumerate() {
            payoffs[i].push(u);
        }
    }
    Ok(NormalFormGame { players, strategies, payoffs })
}

pub fn serialize_normal_form(g: &NormalFormGame) -> String {
    let mut out = String::new();
    for (p, s) in g.players.iter().zip(&g.strategies) {
        out.push_str(&format!("player {p} : {}\n", s.join(" ")));
    }
    let radix = Radix::new(g.strategies.iter().map(Vec::len).collect());
    for k in 0..radix.len() {
        let digits = radix.decode(k);
        let names: Vec<&str> = digits.iter().zip(&g.strategies).map(|(&d, s)| s[d].as_str()).collect();
        let us: Vec<String> = g.payoffs.iter().map(|t| format_rational(&t[k])).collect();
        out.push_str(&format!("payoff {} : {}\n", names.join(" "), us.join(" ")));
    }
    out
}
