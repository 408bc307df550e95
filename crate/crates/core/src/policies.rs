//! Pure, behavioural, mixed and mixture policies, enumeration and the
//! mixing-variable transform.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{cap_check, Error, Result};
use crate::inference::expected_utility;
use crate::model::{AgentId, Maid, MechGroup, Radix, UnitId, VarId, VarKind, Variable};
use crate::rational::Rational;

/// One distribution over actions per decision context.
pub type Rule = Vec<Vec<Rational>>;

/// Point-mass rule from per-context action choices.
pub fn pure_rule(card: usize, choices: &[usize]) -> Rule {
    choices
        .iter()
        .map(|&c| (0..card).map(|a| if a == c { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

/// Behavioural rules indexed by rule unit; `None` means unspecified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviouralProfile {
    rules: Vec<Option<Rule>>,
}

impl BehaviouralProfile {
    pub fn empty(m: &Maid) -> Self {
        BehaviouralProfile { rules: vec![None; m.units().len()] }
    }

    pub fn uniform(m: &Maid) -> Self {
        let mut p = Self::empty(m);
        for u in m.units() {
            let d = u.template();
            let card = m.card(d);
            let q = Rational::new(1.into(), (card as i64).into());
            p.rules[u.id.0] = Some(vec![vec![q; card]; m.context_count(d)]);
        }
        p
    }

    pub fn rule(&self, u: UnitId) -> Option<&Rule> {
        self.rules.get(u.0).and_then(Option::as_ref)
    }

    pub fn set(&mut self, u: UnitId, rule: Rule) {
        self.rules[u.0] = Some(rule);
    }

    pub fn clear(&mut self, u: UnitId) {
        self.rules[u.0] = None;
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.iter().all(Option::is_none)
    }

    pub fn is_complete(&self) -> bool {
        self.rules.iter().all(Option::is_some)
    }

    pub fn is_pure(&self) -> bool {
        self.rules
            .iter()
            .flatten()
            .flatten()
            .all(|row| row.iter().filter(|q| !q.is_zero()).count() == 1 && row.iter().all(|q| q.is_zero() || q.is_one()))
    }

    /// Rules of `other` override those of `self` where defined.
    pub fn merged(&self, other: &BehaviouralProfile) -> BehaviouralProfile {
        let rules = self.rules.iter().zip(&other.rules).map(|(a, b)| b.clone().or_else(|| a.clone())).collect();
        BehaviouralProfile { rules }
    }

    /// Only the rules of agent `a`'s units.
    pub fn restricted(&self, m: &Maid, a: AgentId) -> BehaviouralProfile {
        let rules = m.units().iter().map(|u| if u.owner == a { self.rules[u.id.0].clone() } else { None }).collect();
        BehaviouralProfile { rules }
    }

    /// Every rule except agent `a`'s.
    pub fn without(&self, m: &Maid, a: AgentId) -> BehaviouralProfile {
        let rules = m.units().iter().map(|u| if u.owner == a { None } else { self.rules[u.id.0].clone() }).collect();
        BehaviouralProfile { rules }
    }

    pub fn from_pure(m: &Maid, p: &PureProfile) -> BehaviouralProfile {
        let rules = m
            .units()
            .iter()
            .map(|u| p.choices.get(u.id.0).and_then(|c| c.as_ref()).map(|c| pure_rule(m.card(u.template()), c)))
            .collect();
        BehaviouralProfile { rules }
    }

    /// The pure profile this represents, if every specified row is a point mass.
    pub fn to_pure(&self) -> Option<PureProfile> {
        let mut choices = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            match r {
                None => choices.push(None),
                Some(rows) => {
                    let mut c = Vec::with_capacity(rows.len());
                    for row in rows {
                        let idx = row.iter().position(|q| q.is_one())?;
                        if row.iter().filter(|q| !q.is_zero()).count() != 1 {
                            return None;
                        }
                        c.push(idx);
                    }
                    choices.push(Some(c));
                }
            }
        }
        Some(PureProfile { choices })
    }

    /// Checks shape and normalization of every specified rule.
    pub fn check(&self, m: &Maid) -> Result<()> {
        for u in m.units() {
            if let Some(rows) = self.rule(u.id) {
                check_rule(m, u.id, rows)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_rule(m: &Maid, u: UnitId, rows: &Rule) -> Result<()> {
    let unit = m.unit(u);
    let d = unit.template();
    let bad = |reason: String| Error::MalformedRule { unit: unit.name.clone(), reason };
    let contexts = m.context_count(d);
    if rows.len() != contexts {
        return Err(bad(format!("{} rows, expected {contexts}", rows.len())));
    }
    let card = m.card(d);
    for (c, row) in rows.iter().enumerate() {
        if row.len() != card {
            return Err(bad(format!("row {c} has {} entries, expected {card}", row.len())));
        }
        if row.iter().any(|q| q.is_negative()) {
            return Err(bad(format!("row {c} has a negative entry")));
        }
        let total = row.iter().fold(Rational::zero(), |acc, q| acc + q);
        if !total.is_one() {
            return Err(bad(format!("row {c} sums to {total}")));
        }
    }
    Ok(())
}

/// A deterministic policy for one agent: an action per context for each of its units.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PurePolicy {
    pub agent: AgentId,
    pub choices: Vec<(UnitId, Vec<usize>)>,
}

impl PurePolicy {
    pub fn to_behavioural(&self, m: &Maid) -> BehaviouralProfile {
        let mut p = BehaviouralProfile::empty(m);
        for (u, c) in &self.choices {
            p.set(*u, pure_rule(m.card(m.unit(*u).template()), c));
        }
        p
    }

    /// Readable label: one `action_context` token per context, e.g. `b_a bbar_abar`.
    pub fn label(&self, m: &Maid) -> String {
        let mut tokens = Vec::new();
        for (u, c) in &self.choices {
            let d = m.unit(*u).template();
            let radix = m.context_radix(d);
            for (ctx, &a) in c.iter().enumerate() {
                let action = m.value_label(d, a);
                if radix.cards().is_empty() {
                    tokens.push(action);
                } else {
                    let digits = radix.decode(ctx);
                    let parts: Vec<String> = m.var(d).parents.iter().zip(digits).map(|(&p, v)| m.value_label(p, v)).collect();
                    tokens.push(format!("{action}_{}", parts.join(".")));
                }
            }
        }
        tokens.join(" ")
    }

    /// Whitespace-free label: units joined by `+`, contexts by `.`.
    pub fn compact(&self, m: &Maid) -> String {
        let units: Vec<String> = self
            .choices
            .iter()
            .map(|(u, c)| {
                let d = m.unit(*u).template();
                let acts: Vec<String> = c.iter().map(|&a| m.value_label(d, a)).collect();
                acts.join(".")
            })
            .collect();
        units.join("+")
    }

    /// `Unit=a1,a2` tokens as used by the κ file format.
    pub fn assignment(&self, m: &Maid) -> String {
        let units: Vec<String> = self
            .choices
            .iter()
            .map(|(u, c)| {
                let d = m.unit(*u).template();
                let acts: Vec<String> = c.iter().map(|&a| m.value_label(d, a)).collect();
                format!("{}={}", m.unit(*u).name, acts.join(","))
            })
            .collect();
        units.join(" ")
    }
}

/// Pure choices for every unit, indexed by unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PureProfile {
    pub choices: Vec<Option<Vec<usize>>>,
}

impl PureProfile {
    pub fn from_policies<'a>(m: &Maid, policies: impl IntoIterator<Item = &'a PurePolicy>) -> PureProfile {
        let mut choices = vec![None; m.units().len()];
        for p in policies {
            for (u, c) in &p.choices {
                choices[u.0] = Some(c.clone());
            }
        }
        PureProfile { choices }
    }

    pub fn policy_of(&self, m: &Maid, a: AgentId) -> PurePolicy {
        let choices = m
            .units_of(a)
            .filter_map(|u| self.choices[u.id.0].as_ref().map(|c| (u.id, c.clone())))
            .collect();
        PurePolicy { agent: a, choices }
    }

    pub fn to_behavioural(&self, m: &Maid) -> BehaviouralProfile {
        BehaviouralProfile::from_pure(m, self)
    }

    pub fn label(&self, m: &Maid) -> String {
        let parts: Vec<String> = m.agent_ids().map(|a| self.policy_of(m, a).label(m)).collect();
        parts.join(" ; ")
    }

    pub fn assignment(&self, m: &Maid) -> String {
        let parts: Vec<String> = m.agent_ids().map(|a| self.policy_of(m, a).assignment(m)).filter(|s| !s.is_empty()).collect();
        parts.join(" ")
    }
}

/// Π over the agent's units of |dom|^contexts, saturating.
pub fn pure_policy_count(m: &Maid, a: AgentId) -> u128 {
    m.units_of(a).fold(1u128, |acc, u| {
        let d = u.template();
        let card = m.card(d) as u128;
        let mut per = 1u128;
        for _ in 0..m.context_count(d) {
            per = per.saturating_mul(card);
        }
        acc.saturating_mul(per)
    })
}

/// Lazy lexicographic enumeration; the first unit's first context is the most significant digit.
#[derive(Clone, Debug)]
pub struct PurePolicies {
    agent: AgentId,
    units: Vec<(UnitId, usize)>,
    radix: Radix,
    digits: Option<Vec<usize>>,
}

impl Iterator for PurePolicies {
    type Item = PurePolicy;

    fn next(&mut self) -> Option<PurePolicy> {
        let digits = self.digits.as_mut()?;
        let mut choices = Vec::with_capacity(self.units.len());
        let mut at = 0;
        for &(u, contexts) in &self.units {
            choices.push((u, digits[at..at + contexts].to_vec()));
            at += contexts;
        }
        let out = PurePolicy { agent: self.agent, choices };
        if !self.radix.increment(digits) {
            self.digits = None;
        }
        Some(out)
    }
}

pub fn pure_policies(m: &Maid, a: AgentId, cap: u64) -> Result<PurePolicies> {
    cap_check(&format!("pure policies of {}", m.agent_name(a)), pure_policy_count(m, a), cap)?;
    let units: Vec<(UnitId, usize)> = m.units_of(a).map(|u| (u.id, m.context_count(u.template()))).collect();
    let mut cards = Vec::new();
    for &(u, contexts) in &units {
        cards.extend(core::iter::repeat_n(m.card(m.unit(u).template()), contexts));
    }
    let radix = Radix::new(cards);
    let digits = if radix.is_empty() { None } else { Some(vec![0; radix.cards().len()]) };
    Ok(PurePolicies { agent: a, units, radix, digits })
}

pub fn enumerate_pure_policies(m: &Maid, a: AgentId, cap: u64) -> Result<Vec<PurePolicy>> {
    Ok(pure_policies(m, a, cap)?.collect())
}

/// Every joint pure profile, agents in order, the first agent most significant.
pub fn enumerate_pure_profiles(m: &Maid, cap: u64) -> Result<Vec<PureProfile>> {
    let count = m.agent_ids().fold(1u128, |acc, a| acc.saturating_mul(pure_policy_count(m, a)));
    cap_check("joint pure profiles", count, cap)?;
    let per_agent: Vec<Vec<PurePolicy>> = m.agent_ids().map(|a| enumerate_pure_policies(m, a, cap)).collect::<Result<_>>()?;
    let radix = Radix::new(per_agent.iter().map(Vec::len).collect());
    let mut out = Vec::with_capacity(radix.len());
    for i in 0..radix.len() {
        let idx = radix.decode(i);
        out.push(PureProfile::from_policies(m, idx.iter().enumerate().map(|(a, &k)| &per_agent[a][k])));
    }
    Ok(out)
}

/// A distribution over one agent's pure policies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedPolicy {
    pub agent: AgentId,
    pub support: Vec<(PurePolicy, Rational)>,
}

/// Product-form mixed policy equivalent to a behavioural policy of a non-absent-minded agent.
///
/// The support lists every pure policy in enumeration order, zero weights included.
pub fn behavioural_to_mixed(m: &Maid, a: AgentId, b: &BehaviouralProfile, cap: u64) -> Result<MixedPolicy> {
    if m.is_absent_minded(a) {
        return Err(Error::AbsentMinded(m.agent_name(a).into()));
    }
    for u in m.units_of(a) {
        let rows = b.rule(u.id).ok_or_else(|| Error::MissingRule(u.name.clone()))?;
        check_rule(m, u.id, rows)?;
    }
    let mut support = Vec::new();
    for p in pure_policies(m, a, cap)? {
        let mut w = Rational::one();
        for (u, c) in &p.choices {
            let rows = b.rule(*u).expect("checked above");
            for (ctx, &act) in c.iter().enumerate() {
                w *= &rows[ctx][act];
            }
        }
        support.push((p, w));
    }
    Ok(MixedPolicy { agent: a, support })
}

/// One agent's randomization at the outset over behavioural policies (pure ones for a mixed policy).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentMixture {
    pub agent: AgentId,
    /// Each component carries rules for this agent's units only.
    pub support: Vec<(BehaviouralProfile, Rational)>,
}

/// Independent outset randomizations, one per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureProfile {
    pub agents: Vec<AgentMixture>,
}

impl MixtureProfile {
    /// Point masses on the behavioural rules of `p`.
    pub fn from_behavioural(m: &Maid, p: &BehaviouralProfile) -> Self {
        let agents = m
            .agent_ids()
            .map(|a| AgentMixture { agent: a, support: vec![(p.restricted(m, a), Rational::one())] })
            .collect();
        MixtureProfile { agents }
    }

    pub fn from_mixed(m: &Maid, policies: &[MixedPolicy]) -> Self {
        let agents = policies
            .iter()
            .map(|mp| AgentMixture {
                agent: mp.agent,
                support: mp.support.iter().map(|(p, w)| (p.to_behavioural(m), w.clone())).collect(),
            })
            .collect();
        MixtureProfile { agents }
    }

    /// Every component of every agent is pure.
    pub fn is_mixed(&self) -> bool {
        self.agents.iter().all(|a| a.support.iter().all(|(p, _)| p.is_pure()))
    }

    pub fn check(&self, m: &Maid) -> Result<()> {
        for am in &self.agents {
            let total = am.support.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
            if !total.is_one() || am.support.iter().any(|(_, w)| w.is_negative()) {
                return Err(Error::MalformedDistribution(format!("weights of {} sum to {total}", m.agent_name(am.agent))));
            }
            for (p, _) in &am.support {
                p.check(m)?;
            }
        }
        Ok(())
    }
}

/// Σ over the joint support of the weight product times the realized profile's EU.
pub fn mixed_expected_utility(m: &Maid, p: &MixtureProfile, i: AgentId, cap: u64) -> Result<Rational> {
    p.check(m)?;
    let supports: Vec<Vec<&(BehaviouralProfile, Rational)>> =
        p.agents.iter().map(|a| a.support.iter().filter(|(_, w)| !w.is_zero()).collect()).collect();
    let count = supports.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    cap_check("joint mixture support", count, cap)?;
    let radix = Radix::new(supports.iter().map(Vec::len).collect());
    let combos: Vec<usize> = (0..radix.len()).collect();
    let terms = crate::par::map(&combos, |&k| -> Result<Rational> {
        let idx = radix.decode(k);
        let mut profile = BehaviouralProfile::empty(m);
        let mut w = Rational::one();
        for (a, &j) in idx.iter().enumerate() {
            let (rules, wt) = supports[a][j];
            profile = profile.merged(rules);
            w *= wt;
        }
        Ok(w * expected_utility(m, &profile, i)?)
    });
    let mut total = Rational::zero();
    for t in terms {
        total += t?;
    }
    Ok(total)
}

/// Adds a parentless correlation decision `C_<agent>` whose domain is the agent's pure policies,
/// with an edge into every decision of that agent.
pub fn add_mixing_variable(m: &Maid, i: AgentId, cap: u64) -> Result<Maid> {
    let labels: Vec<String> = pure_policies(m, i, cap)?.map(|p| p.compact(m)).collect();
    let (agents, vars, tables, groups) = m.clone().into_parts();
    let c = VarId(0);
    let mut new_vars: Vec<Variable> = Vec::with_capacity(vars.len() + 1);
    new_vars.push(Variable {
        name: format!("C_{}", m.agent_name(i)),
        kind: VarKind::Decision(i),
        domain: labels,
        parents: Vec::new(),
    });
    for v in vars {
        let mut parents: Vec<VarId> = v.parents.iter().map(|p| VarId(p.0 + 1)).collect();
        if v.kind == VarKind::Decision(i) {
            parents.insert(0, c);
        }
        new_vars.push(Variable { parents, ..v });
    }
    let mut new_tables = vec![None];
    new_tables.extend(tables);
    let groups = groups
        .into_iter()
        .map(|g| MechGroup { name: g.name, members: g.members.iter().map(|d| VarId(d.0 + 1)).collect() })
        .collect();
    Ok(Maid::from_parts(agents, new_vars, new_tables, groups))
}
