//! Mediator transforms, correlated equilibria and MAID correlated equilibria.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::equilibria::{normal_form, NormalForm, SolverConfig};
use crate::error::{cap_check, Error, Result};
use crate::inference::{induced_bn, utility_in, utility_over, Bn, BnNode};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::model::{AgentId, Maid, Radix, Table, UnitId, VarId, VarKind, Variable};
use crate::policies::{enumerate_pure_profiles, BehaviouralProfile, PureProfile};
use crate::rational::Rational;

/// A distribution κ over joint pure profiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatedDist {
    pub support: Vec<(PureProfile, Rational)>,
}

impl CorrelatedDist {
    pub fn point_mass(p: PureProfile) -> Self {
        CorrelatedDist { support: vec![(p, Rational::one())] }
    }

    pub fn check(&self, m: &Maid) -> Result<()> {
        let mut total = Rational::zero();
        for (p, w) in &self.support {
            if w.is_negative() {
                return Err(Error::MalformedDistribution("negative weight".into()));
            }
            if p.choices.len() != m.units().len() {
                return Err(Error::MalformedDistribution("profile does not match the game's rules".into()));
            }
            for u in m.units() {
                let d = u.template();
                let ok = p.choices[u.id.0]
                    .as_ref()
                    .is_some_and(|c| c.len() == m.context_count(d) && c.iter().all(|&a| a < m.card(d)));
                if !ok {
                    return Err(Error::MalformedDistribution(format!("profile gives no valid rule for {}", u.name)));
                }
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::MalformedDistribution(format!("weights sum to {total}")));
        }
        Ok(())
    }

    /// Weight per joint profile index of `nf`, merging duplicates.
    fn dense(&self, m: &Maid, nf: &NormalForm) -> Result<Vec<Rational>> {
        let mut w = vec![Rational::zero(); nf.radix.len()];
        for (p, q) in &self.support {
            let k = joint_index(m, nf, p).ok_or_else(|| Error::MalformedDistribution("unknown profile".into()))?;
            w[k] += q;
        }
        Ok(w)
    }

    /// Expected utility of every agent when all follow the drawn profile.
    pub fn values(&self, m: &Maid) -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); m.agents().len()];
        for (p, w) in &self.support {
            if w.is_zero() {
                continue;
            }
            let bn = induced_bn(m, &p.to_behavioural(m))?;
            for a in m.agent_ids() {
                out[a.0] += w * utility_in(m, &bn, a, &[]);
            }
        }
        Ok(out)
    }
}

fn joint_index(m: &Maid, nf: &NormalForm, p: &PureProfile) -> Option<usize> {
    let digits: Option<Vec<usize>> =
        m.agent_ids().map(|a| nf.policies[a.0].iter().position(|q| *q == p.policy_of(m, a))).collect();
    digits.map(|d| nf.radix.index(&d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Feasible,
    /// Unweighted sum of all agents' expected utilities.
    Welfare,
    Agent(AgentId),
}

impl Objective {
    fn evaluate(&self, values: &[Rational]) -> Rational {
        match self {
            Objective::Feasible => Rational::zero(),
            Objective::Welfare => values.iter().fold(Rational::zero(), |a, b| a + b),
            Objective::Agent(a) => values[a.0].clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MediatorMode {
    /// The drawn profile is observed by every decision.
    Public,
    /// Each decision observes only its own recommendation, through a channel variable.
    Private,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MediatedGame {
    pub game: Maid,
    pub mode: MediatorMode,
    pub correlation: VarId,
    /// (decision, channel) pairs in private mode.
    pub channels: Vec<(VarId, VarId)>,
    /// Domain of the correlation variable, in value order.
    pub profiles: Vec<PureProfile>,
    base_len: usize,
}

fn profile_label(m: &Maid, p: &PureProfile) -> String {
    let parts: Vec<String> = m.agent_ids().map(|a| p.policy_of(m, a).compact(m)).collect();
    parts.join("/")
}

/// Adds a correlation variable `C` over joint pure profiles. κ starts uniform; see [`MediatedGame::with_kappa`].
pub fn add_mediator(m: &Maid, mode: MediatorMode, cap: u64) -> Result<MediatedGame> {
    let profiles = enumerate_pure_profiles(m, cap)?;
    let n = m.len();
    let (agents, mut vars, mut tables, groups) = m.clone().into_parts();
    let c = VarId(n);
    let k = profiles.len();
    vars.push(Variable {
        name: "C".into(),
        kind: VarKind::Chance,
        domain: profiles.iter().map(|p| profile_label(m, p)).collect(),
        parents: Vec::new(),
    });
    tables.push(Some(Table::Chance(vec![vec![Rational::new(1.into(), (k as i64).into()); k]])));
    let mut channels = Vec::new();
    match mode {
        MediatorMode::Public => {
            for d in m.decisions() {
                vars[d.0].parents.insert(0, c);
            }
        }
        MediatorMode::Private => {
            for d in m.decisions() {
                let u = m.unit_of(d).unwrap();
                let ch = VarId(vars.len());
                let mut parents = vec![c];
                parents.extend(m.var(d).parents.iter().copied());
                let card = m.card(d);
                let radix = m.context_radix(d);
                let mut rows = Vec::with_capacity(k * radix.len());
                for p in &profiles {
                    let rule = p.choices[u.0].as_ref().unwrap();
                    for ctx in 0..radix.len() {
                        rows.push((0..card).map(|a| if a == rule[ctx] { Rational::one() } else { Rational::zero() }).collect());
                    }
                }
                vars.push(Variable { name: format!("C_{}", m.name(d)), kind: VarKind::Chance, domain: m.var(d).domain.clone(), parents });
                tables.push(Some(Table::Chance(rows)));
                vars[d.0].parents.insert(0, ch);
                channels.push((d, ch));
            }
        }
    }
    Ok(MediatedGame { game: Maid::from_parts(agents, vars, tables, groups), mode, correlation: c, channels, profiles, base_len: n })
}

impl MediatedGame {
    /// The mediated game with C distributed according to κ.
    pub fn with_kappa(&self, base: &Maid, k: &CorrelatedDist) -> Result<Maid> {
        k.check(base)?;
        let mut row = vec![Rational::zero(); self.profiles.len()];
        for (p, w) in &k.support {
            let idx = self.profiles.iter().position(|q| q == p).ok_or_else(|| Error::MalformedDistribution("unknown profile".into()))?;
            row[idx] += w;
        }
        Ok(self.game.with_table(self.correlation, Some(Table::Chance(vec![row]))))
    }

    /// Every decision follows its recommendation.
    pub fn obedient_profile(&self) -> BehaviouralProfile {
        let g = &self.game;
        let mut p = BehaviouralProfile::empty(g);
        for u in g.units() {
            let d = u.template();
            let card = g.card(d);
            let radix = g.context_radix(d);
            let mut rows = Vec::with_capacity(radix.len());
            for ctx in 0..radix.len() {
                let digits = radix.decode(ctx);
                // the first parent is the channel (private) or C (public)
                let rec = match self.mode {
                    MediatorMode::Private => digits[0],
                    MediatorMode::Public => {
                        let prof = &self.profiles[digits[0]];
                        let inner = Radix::new(g.var(d).parents[1..].iter().map(|&q| g.card(q)).collect()).index(&digits[1..]);
                        prof.choices[u.id.0].as_ref().unwrap()[inner]
                    }
                };
                rows.push((0..card).map(|a| if a == rec { Rational::one() } else { Rational::zero() }).collect());
            }
            p.set(u.id, rows);
        }
        p
    }

    pub fn channel_of(&self, d: VarId) -> Option<VarId> {
        self.channels.iter().find(|(x, _)| *x == d).map(|(_, c)| *c)
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }
}

/// E[U^owner(d) | evidence, do(d = action)] in the mediated game under obedience and κ.
pub fn conditional_action_value(
    mg: &MediatedGame,
    base: &Maid,
    k: &CorrelatedDist,
    d: VarId,
    evidence: &[(VarId, usize)],
    action: usize,
) -> Result<Rational> {
    let g = mg.with_kappa(base, k)?;
    let VarKind::Decision(owner) = g.var(d).kind else {
        return Err(Error::NotApplicable(format!("{} is not a decision", g.name(d))));
    };
    let mut bn = induced_bn(&g, &mg.obedient_profile())?;
    bn.clamp(d.0, action);
    let ev: Vec<(usize, usize)> = evidence.iter().map(|(v, x)| (v.0, *x)).collect();
    let z = bn.probability_of(&ev);
    if z.is_zero() {
        return Err(Error::ZeroProbabilityEvidence);
    }
    Ok(utility_in(&g, &bn, owner, &ev) / z)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeSolution {
    pub kappa: CorrelatedDist,
    pub value: Rational,
    pub values: Vec<Rational>,
}

/// Builds the LP over κ, adds the objective and returns the optimum.
fn solve_kappa_lp(
    m: &Maid,
    nf: &NormalForm,
    rows: Vec<Vec<Rational>>,
    objective: Objective,
) -> Result<CeSolution> {
    let cols = nf.radix.len();
    let mut lp = LinearProgram::new(cols);
    lp.add(vec![Rational::one(); cols], Relation::Eq, Rational::one());
    for r in rows {
        lp.add(r, Relation::Ge, Rational::zero());
    }
    let obj: Vec<Rational> = (0..cols)
        .map(|k| {
            let vals: Vec<Rational> = m.agent_ids().map(|a| nf.payoffs[a.0][k].clone()).collect();
            objective.evaluate(&vals)
        })
        .collect();
    lp.maximize(obj);
    let r = solve_lp(&lp);
    if r.status != LpStatus::Optimal {
        return Err(Error::NotApplicable(format!("equilibrium program is {:?}", r.status)));
    }
    let support: Vec<(PureProfile, Rational)> =
        r.solution.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(k, w)| (nf.profile(m, k), w.clone())).collect();
    let mut values = vec![Rational::zero(); m.agents().len()];
    for (k, w) in r.solution.iter().enumerate() {
        if !w.is_zero() {
            for a in m.agent_ids() {
                values[a.0] += w * &nf.payoffs[a.0][k];
            }
        }
    }
    Ok(CeSolution { kappa: CorrelatedDist { support }, value: objective.evaluate(&values), values })
}

fn dedupe(rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut seen = BTreeSet::new();
    rows.into_iter().filter(|r| r.iter().any(|q| !q.is_zero()) && seen.insert(r.clone())).collect()
}

/// One row per agent and ordered pair (recommended, deviation) of its pure policies.
fn ce_rows(m: &Maid, nf: &NormalForm) -> Vec<(AgentId, usize, usize, Vec<Rational>)> {
    let cols = nf.radix.len();
    let mut out = Vec::new();
    for a in m.agent_ids() {
        let n_a = nf.policies[a.0].len();
        for rec in 0..n_a {
            for dev in 0..n_a {
                if rec == dev {
                    continue;
                }
                let mut row = vec![Rational::zero(); cols];
                for (k, slot) in row.iter_mut().enumerate() {
                    let mut digits = nf.radix.decode(k);
                    if digits[a.0] != rec {
                        continue;
                    }
                    digits[a.0] = dev;
                    *slot = &nf.payoffs[a.0][k] - &nf.payoffs[a.0][nf.radix.index(&digits)];
                }
                out.push((a, rec, dev, row));
            }
        }
    }
    out
}

pub fn solve_ce(m: &Maid, objective: Objective, cfg: &SolverConfig) -> Result<CeSolution> {
    let nf = normal_form(m, cfg.cap)?;
    let rows = dedupe(ce_rows(m, &nf).into_iter().map(|r| r.3).collect());
    solve_kappa_lp(m, &nf, rows, objective)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CeCheck {
    Ok,
    /// The most profitable violated inequality.
    Violated { agent: AgentId, recommended: String, deviation: String, gap: Rational },
}

pub fn verify_ce(m: &Maid, k: &CorrelatedDist, cfg: &SolverConfig) -> Result<CeCheck> {
    k.check(m)?;
    let nf = normal_form(m, cfg.cap)?;
    let w = k.dense(m, &nf)?;
    let mut worst: Option<(Rational, AgentId, usize, usize)> = None;
    for (a, rec, dev, row) in ce_rows(m, &nf) {
        let lhs = row.iter().zip(&w).fold(Rational::zero(), |acc, (r, q)| if q.is_zero() { acc } else { acc + r * q });
        let gap = -lhs;
        if gap.is_positive() && worst.as_ref().is_none_or(|(g, ..)| gap > *g) {
            worst = Some((gap, a, rec, dev));
        }
    }
    Ok(match worst {
        None => CeCheck::Ok,
        Some((gap, agent, rec, dev)) => CeCheck::Violated {
            agent,
            recommended: nf.policies[agent.0][rec].label(m),
            deviation: nf.policies[agent.0][dev].label(m),
            gap,
        },
    })
}

/// What a deviating agent knows at one of its decisions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct InfoState {
    pub context: usize,
    /// `None` once the mediator has stopped.
    pub signal: Option<usize>,
    /// Signals of earlier own decisions that are parents of this one.
    pub recalled: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDeviation {
    pub unit: UnitId,
    pub states: Vec<InfoState>,
    pub actions: Vec<usize>,
}

/// A pure strategy against the mediator: an action for every information state of every rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationStrategy {
    pub agent: AgentId,
    pub units: Vec<UnitDeviation>,
}

impl DeviationStrategy {
    fn action(&self, u: UnitId, state: &InfoState) -> Option<usize> {
        let ud = self.units.iter().find(|x| x.unit == u)?;
        let i = ud.states.binary_search(state).ok()?;
        Some(ud.actions[i])
    }

    /// Lists the information states where the strategy does not obey.
    pub fn describe(&self, m: &Maid) -> String {
        let mut parts = Vec::new();
        for ud in &self.units {
            let d = m.unit(ud.unit).template();
            for (s, &a) in ud.states.iter().zip(&ud.actions) {
                if s.signal == Some(a) {
                    continue;
                }
                let sig = s.signal.map_or_else(|| String::from("stopped"), |x| m.value_label(d, x));
                let ctx = m.context_label(d, s.context);
                let ctx = if ctx.is_empty() { String::new() } else { format!(" [{ctx}]") };
                parts.push(format!("{}{ctx} told {sig} -> {}", m.unit(ud.unit).name, m.value_label(d, a)));
            }
        }
        if parts.is_empty() {
            String::from("obedient")
        } else {
            parts.join("; ")
        }
    }
}

/// Per-agent structure shared by every deviation strategy.
struct AgentPlan {
    agent: AgentId,
    /// Agent's decisions in topological order.
    order: Vec<VarId>,
    /// For each decision in `order`, the positions of recalled earlier decisions.
    recalled: Vec<Vec<usize>>,
    states: Vec<(UnitId, Vec<InfoState>)>,
}

fn plan(m: &Maid, a: AgentId) -> AgentPlan {
    let topo = m.topological_order().expect("validated game is acyclic");
    let order: Vec<VarId> = topo.into_iter().filter(|&v| m.var(v).kind == VarKind::Decision(a)).collect();
    let shared = |d: VarId| m.unit(m.unit_of(d).unwrap()).is_shared();
    let recalled: Vec<Vec<usize>> = order
        .iter()
        .map(|&d| {
            if shared(d) {
                return Vec::new();
            }
            (0..order.len())
                .filter(|&j| order[j] != d && !shared(order[j]) && m.var(d).parents.contains(&order[j]))
                .filter(|&j| order.iter().position(|&x| x == d).unwrap() > j)
                .collect()
        })
        .collect();
    let mut states: Vec<(UnitId, BTreeSet<InfoState>)> = Vec::new();
    for (k, &d) in order.iter().enumerate() {
        let u = m.unit_of(d).unwrap();
        let card = m.card(d);
        let signals: Vec<Option<usize>> = (0..card).map(Some).chain((k > 0).then_some(None)).collect();
        let rec_domains: Vec<Vec<Option<usize>>> =
            recalled[k].iter().map(|&j| (0..m.card(order[j])).map(Some).chain(core::iter::once(None)).collect()).collect();
        let radix = m.context_radix(d);
        let rec_radix = Radix::new(rec_domains.iter().map(Vec::len).collect());
        let mut set = BTreeSet::new();
        for ctx in 0..radix.len() {
            let digits = radix.decode(ctx);
            for &s in &signals {
                for r in 0..rec_radix.len() {
                    let rd = rec_radix.decode(r);
                    let rec: Vec<Option<usize>> = rd.iter().enumerate().map(|(i, &x)| rec_domains[i][x]).collect();
                    let consistent = rec.iter().enumerate().all(|(i, rs)| match (rs, s) {
                        (None, Some(_)) => false,
                        (Some(x), Some(_)) => {
                            // an observed earlier deviation would have stopped the mediator
                            let dj = order[recalled[k][i]];
                            let pos = m.var(d).parents.iter().position(|&p| p == dj).unwrap();
                            digits[pos] == *x
                        }
                        _ => true,
                    });
                    if consistent {
                        set.insert(InfoState { context: ctx, signal: s, recalled: rec });
                    }
                }
            }
        }
        match states.iter_mut().find(|(x, _)| *x == u) {
            Some((_, s)) => s.extend(set),
            None => states.push((u, set)),
        }
    }
    AgentPlan { agent: a, order, recalled, states: states.into_iter().map(|(u, s)| (u, s.into_iter().collect())).collect() }
}

fn deviation_count(m: &Maid, p: &AgentPlan) -> u128 {
    p.states.iter().fold(1u128, |acc, (u, s)| {
        let card = m.card(m.unit(*u).template()) as u128;
        (0..s.len()).fold(acc, |x, _| x.saturating_mul(card))
    })
}

fn deviation_strategies(m: &Maid, p: &AgentPlan, cap: u64) -> Result<Vec<DeviationStrategy>> {
    cap_check(&format!("deviation strategies of {}", m.agent_name(p.agent)), deviation_count(m, p), cap)?;
    let mut cards = Vec::new();
    for (u, s) in &p.states {
        cards.extend(core::iter::repeat_n(m.card(m.unit(*u).template()), s.len()));
    }
    let radix = Radix::new(cards);
    let mut out = Vec::with_capacity(radix.len());
    for k in 0..radix.len() {
        let digits = radix.decode(k);
        let mut at = 0;
        let units = p
            .states
            .iter()
            .map(|(u, s)| {
                let actions = digits[at..at + s.len()].to_vec();
                at += s.len();
                UnitDeviation { unit: *u, states: s.clone(), actions }
            })
            .collect();
        out.push(DeviationStrategy { agent: p.agent, units });
    }
    Ok(out)
}

/// The network in which the agent plays `sigma` against recommendations drawn from `profile`,
/// with the mediator falling silent after the agent's first disobedience.
fn deviation_bn(m: &Maid, plan: &AgentPlan, profile: &PureProfile, sigma: &DeviationStrategy) -> Result<Bn> {
    let mut bn = induced_bn(m, &profile.to_behavioural(m))?;
    let mut signal_node = vec![0usize; plan.order.len()];
    let mut prev_flag: Option<usize> = None;
    for (k, &d) in plan.order.iter().enumerate() {
        let u = m.unit_of(d).unwrap();
        let rule = profile.choices[u.0].as_ref().unwrap();
        let card = m.card(d);
        let pa: Vec<usize> = m.var(d).parents.iter().map(|p| p.0).collect();
        // signal node: recommendation, or "stopped" (index card) after a deviation
        let mut s_parents = pa.clone();
        if let Some(f) = prev_flag {
            s_parents.push(f);
        }
        let s_radix = Radix::new(s_parents.iter().map(|&q| bn.nodes[q].card).collect());
        let mut s_cpt = vec![Rational::zero(); s_radix.len() * (card + 1)];
        for ctx in 0..s_radix.len() {
            let digits = s_radix.decode(ctx);
            let stopped = prev_flag.is_some() && digits[pa.len()] == 1;
            let inner = m.context_radix(d).index(&digits[..pa.len()]);
            let val = if stopped { card } else { rule[inner] };
            s_cpt[ctx * (card + 1) + val] = Rational::one();
        }
        let s = bn.push(BnNode { card: card + 1, parents: s_parents, cpt: s_cpt });
        signal_node[k] = s;
        // the decision itself
        let mut d_parents = pa.clone();
        d_parents.push(s);
        d_parents.extend(plan.recalled[k].iter().map(|&j| signal_node[j]));
        let d_radix = Radix::new(d_parents.iter().map(|&q| bn.nodes[q].card).collect());
        let mut d_cpt = vec![Rational::zero(); d_radix.len() * card];
        let shared = m.unit(u).is_shared();
        for ctx in 0..d_radix.len() {
            let digits = d_radix.decode(ctx);
            let context = m.context_radix(d).index(&digits[..pa.len()]);
            let sig = digits[pa.len()];
            let signal = (sig < card).then_some(sig);
            let recalled: Vec<Option<usize>> = if shared {
                Vec::new()
            } else {
                digits[pa.len() + 1..].iter().zip(&plan.recalled[k]).map(|(&x, &j)| (x < m.card(plan.order[j])).then_some(x)).collect()
            };
            let state = InfoState { context, signal, recalled };
            // states filtered as unreachable fall back to obedience
            let act = sigma.action(u, &state).unwrap_or_else(|| signal.unwrap_or(0));
            d_cpt[ctx * card + act] = Rational::one();
        }
        bn.nodes[d.0] = BnNode { card, parents: d_parents, cpt: d_cpt };
        // deviation flag
        let mut f_parents = vec![d.0, s];
        if let Some(f) = prev_flag {
            f_parents.push(f);
        }
        let f_radix = Radix::new(f_parents.iter().map(|&q| bn.nodes[q].card).collect());
        let mut f_cpt = vec![Rational::zero(); f_radix.len() * 2];
        for ctx in 0..f_radix.len() {
            let digits = f_radix.decode(ctx);
            let dev = digits[0] != digits[1] || (prev_flag.is_some() && digits[2] == 1);
            f_cpt[ctx * 2 + usize::from(dev)] = Rational::one();
        }
        prev_flag = Some(bn.push(BnNode { card: 2, parents: f_parents, cpt: f_cpt }));
    }
    Ok(bn)
}

/// Enumerating outcomes beats elimination while few have positive probability.
const SUPPORT_LIMIT: usize = 256;

/// Rows Σ_π κ(π)·(EU_obedient(π) − EU_σ(π)) ≥ 0, one per (agent, deviation strategy).
fn maid_ce_rows(m: &Maid, nf: &NormalForm, cap: u64) -> Result<Vec<(AgentId, DeviationStrategy, Vec<Rational>)>> {
    let cols = nf.radix.len();
    let profiles: Vec<PureProfile> = (0..cols).map(|k| nf.profile(m, k)).collect();
    let mut out = Vec::new();
    for a in m.agent_ids() {
        let p = plan(m, a);
        let sigmas = deviation_strategies(m, &p, cap)?;
        cap_check("deviation coefficients", sigmas.len() as u128 * cols as u128, cap)?;
        let rows = crate::par::map(&sigmas, |sigma| -> Result<Vec<Rational>> {
            let mut row = Vec::with_capacity(cols);
            for (k, prof) in profiles.iter().enumerate() {
                let bn = deviation_bn(m, &p, prof, sigma)?;
                let eu = match bn.support(SUPPORT_LIMIT) {
                    Some(support) => utility_over(m, &support, a),
                    None => utility_in(m, &bn, a, &[]),
                };
                row.push(&nf.payoffs[a.0][k] - eu);
            }
            Ok(row)
        });
        for (sigma, row) in sigmas.into_iter().zip(rows) {
            out.push((a, sigma, row?));
        }
    }
    Ok(out)
}

pub fn solve_maid_ce(m: &Maid, objective: Objective, cfg: &SolverConfig) -> Result<CeSolution> {
    let nf = normal_form(m, cfg.cap)?;
    let rows = dedupe(maid_ce_rows(m, &nf, cfg.cap)?.into_iter().map(|r| r.2).collect());
    solve_kappa_lp(m, &nf, rows, objective)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaidCeCheck {
    Ok,
    Violated { agent: AgentId, strategy: DeviationStrategy, description: String, gap: Rational },
}

pub fn verify_maid_ce(m: &Maid, k: &CorrelatedDist, cfg: &SolverConfig) -> Result<MaidCeCheck> {
    k.check(m)?;
    let nf = normal_form(m, cfg.cap)?;
    let w = k.dense(m, &nf)?;
    let mut worst: Option<(Rational, AgentId, DeviationStrategy)> = None;
    for (a, sigma, row) in maid_ce_rows(m, &nf, cfg.cap)? {
        let lhs = row.iter().zip(&w).fold(Rational::zero(), |acc, (r, q)| if q.is_zero() { acc } else { acc + r * q });
        let gap = -lhs;
        if gap.is_positive() && worst.as_ref().is_none_or(|(g, ..)| gap > *g) {
            worst = Some((gap, a, sigma));
        }
    }
    Ok(match worst {
        None => MaidCeCheck::Ok,
        Some((gap, agent, strategy)) => {
            let description = strategy.describe(m);
            MaidCeCheck::Violated { agent, strategy, description, gap }
        }
    })
}

/// Number of pure deviation strategies per agent.
pub fn deviation_strategy_counts(m: &Maid) -> Vec<u128> {
    m.agent_ids().map(|a| deviation_count(m, &plan(m, a))).collect()
}
