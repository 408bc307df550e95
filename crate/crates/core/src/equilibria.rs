//! Best responses, Nash checks, backward induction, two-agent mixed equilibria
//! and the non-emptiness questions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{cap_check, Error, Result};
use crate::graphs::{classify_recall, relevance_order, RelevanceOrder};
use crate::inference::{expected_utility, expected_utilities, induced_bn, utility_in};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::model::{AgentId, Maid, Radix, UnitId};
use crate::policies::{
    enumerate_pure_policies, mixed_expected_utility, pure_policies, pure_policy_count, pure_rule, AgentMixture,
    BehaviouralProfile, MixedPolicy, MixtureProfile, PurePolicy, PureProfile,
};
use crate::rational::{ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Cap on enumerated objects: pure policies, joint profiles, grid points, LP columns.
    pub cap: u64,
    /// Levels of the nested grid used for absent-minded agents.
    pub grid_depth: u32,
    /// Slack allowed in inexact Nash verdicts.
    pub epsilon: Rational,
    /// Lattice refinements (denominators 1, 2, 4, ...) tried by behavioural non-emptiness.
    pub lattice_rounds: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { cap: crate::DEFAULT_CAP, grid_depth: 6, epsilon: ratio(1, 1_000_000), lattice_rounds: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Pure(PurePolicy),
    /// Rules for the agent's units found by grid search.
    Behavioural(BehaviouralProfile),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponse {
    pub value: Rational,
    pub witness: Witness,
    pub exact: bool,
    /// Final grid step per rule coordinate for inexact results.
    pub resolution: Option<Rational>,
}

impl BestResponse {
    pub fn rules(&self, m: &Maid) -> BehaviouralProfile {
        match &self.witness {
            Witness::Pure(p) => p.to_behavioural(m),
            Witness::Behavioural(b) => b.clone(),
        }
    }
}

/// Exact argmax over pure policies; stops early once a value strictly above `above` is seen.
fn pure_best_response(
    m: &Maid,
    i: AgentId,
    opponents: &BehaviouralProfile,
    cap: u64,
    above: Option<&Rational>,
) -> Result<BestResponse> {
    let base = opponents.without(m, i);
    let policies = enumerate_pure_policies(m, i, cap)?;
    if policies.is_empty() {
        return Err(Error::NotApplicable(format!("agent {} has no decisions", m.agent_name(i))));
    }
    let mut best: Option<(Rational, usize)> = None;
    // chunks keep early exit cheap while still evaluating in parallel
    for (start, chunk) in policies.chunks(64).enumerate().map(|(k, c)| (k * 64, c)) {
        let values = crate::par::map(chunk, |p| expected_utility(m, &base.merged(&p.to_behavioural(m)), i));
        for (k, v) in values.into_iter().enumerate() {
            let v = v?;
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, start + k));
            }
        }
        if let (Some(t), Some((b, _))) = (above, &best) {
            if b > t {
                break;
            }
        }
    }
    let (value, k) = best.unwrap();
    let mut witness = policies[k].clone();
    if above.is_none() {
        settle_unreached(m, i, &base, &mut witness)?;
    }
    Ok(BestResponse { value, witness: Witness::Pure(witness), exact: true, resolution: None })
}

/// EU of `i` with the parents of `d` forced to `digits` and `d` forced to `action`.
fn forced_value(m: &Maid, bn: &crate::inference::Bn, d: crate::model::VarId, digits: &[usize], action: usize, i: AgentId) -> Rational {
    let mut forced = bn.clone();
    for (&p, &val) in m.var(d).parents.iter().zip(digits) {
        forced.clamp(p.0, val);
    }
    forced.clamp(d.0, action);
    utility_in(m, &forced, i, &[])
}

/// Replace actions in zero-probability contexts of non-shared rules by the
/// argmax of the context-forced EU. The outcome distribution is unchanged.
fn settle_unreached(m: &Maid, i: AgentId, base: &BehaviouralProfile, policy: &mut PurePolicy) -> Result<()> {
    for slot in 0..policy.choices.len() {
        let u = policy.choices[slot].0;
        let unit = m.unit(u);
        if unit.is_shared() {
            continue;
        }
        let d = unit.template();
        let radix = m.context_radix(d);
        for ctx in 0..radix.len() {
            let bn = induced_bn(m, &base.merged(&policy.to_behavioural(m)))?;
            let digits = radix.decode(ctx);
            let evidence: Vec<(usize, usize)> = m.var(d).parents.iter().map(|p| p.0).zip(digits.iter().copied()).collect();
            if !bn.probability_of(&evidence).is_zero() {
                continue;
            }
            let mut best: Option<(Rational, usize)> = None;
            for a in 0..m.card(d) {
                let v = forced_value(m, &bn, d, &digits, a, i);
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, a));
                }
            }
            policy.choices[slot].1[ctx] = best.unwrap().1;
        }
    }
    Ok(())
}

/// Pure assignments over an explicit set of units.
fn unit_assignments(m: &Maid, units: &[UnitId], cap: u64) -> Result<Vec<Vec<(UnitId, Vec<usize>)>>> {
    let mut cards = Vec::new();
    let mut spans = Vec::new();
    for &u in units {
        let d = m.unit(u).template();
        let c = m.context_count(d);
        spans.push((u, c));
        cards.extend(core::iter::repeat_n(m.card(d), c));
    }
    let count = cards.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128));
    cap_check("pure assignments of non-shared rules", count, cap)?;
    let radix = Radix::new(cards);
    let mut out = Vec::with_capacity(radix.len());
    for k in 0..radix.len() {
        let digits = radix.decode(k);
        let mut at = 0;
        let mut item = Vec::with_capacity(spans.len());
        for &(u, c) in &spans {
            item.push((u, digits[at..at + c].to_vec()));
            at += c;
        }
        out.push(item);
    }
    Ok(out)
}

/// Stick-breaking map from a unit cube coordinate block to a probability row.
fn stick_row(xs: &[Rational]) -> Vec<Rational> {
    let mut row = Vec::with_capacity(xs.len() + 1);
    let mut rest = Rational::one();
    for x in xs {
        let take = &rest * x;
        rest -= &take;
        row.push(take);
    }
    row.push(rest);
    row
}

struct Grid<'a> {
    m: &'a Maid,
    i: AgentId,
    base: BehaviouralProfile,
    shared: Vec<(UnitId, usize, usize)>, // unit, contexts, card
    others: Vec<Vec<(UnitId, Vec<usize>)>>,
}

impl Grid<'_> {
    fn dims(&self) -> usize {
        self.shared.iter().map(|&(_, c, k)| c * (k - 1)).sum()
    }

    fn rules_at(&self, point: &[Rational]) -> BehaviouralProfile {
        let mut p = BehaviouralProfile::empty(self.m);
        let mut at = 0;
        for &(u, contexts, card) in &self.shared {
            let mut rows = Vec::with_capacity(contexts);
            for _ in 0..contexts {
                rows.push(stick_row(&point[at..at + card - 1]));
                at += card - 1;
            }
            p.set(u, rows);
        }
        p
    }

    fn evaluate(&self, point: &[Rational]) -> Result<(Rational, BehaviouralProfile)> {
        let shared = self.rules_at(point);
        let mut best: Option<(Rational, BehaviouralProfile)> = None;
        for assignment in &self.others {
            let mut rules = shared.clone();
            for (u, c) in assignment {
                rules.set(*u, pure_rule(self.m.card(self.m.unit(*u).template()), c));
            }
            let v = expected_utility(self.m, &self.base.merged(&rules), self.i)?;
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, rules));
            }
        }
        Ok(best.expect("at least one assignment"))
    }
}

/// Nested uniform grid over shared-rule parameters; the agent's other rules are optimized
/// exhaustively at every grid point.
fn grid_best_response(
    m: &Maid,
    i: AgentId,
    opponents: &BehaviouralProfile,
    cfg: &SolverConfig,
    above: Option<&Rational>,
) -> Result<BestResponse> {
    let shared: Vec<(UnitId, usize, usize)> = m
        .units_of(i)
        .filter(|u| u.is_shared())
        .map(|u| (u.id, m.context_count(u.template()), m.card(u.template())))
        .collect();
    let other_units: Vec<UnitId> = m.units_of(i).filter(|u| !u.is_shared()).map(|u| u.id).collect();
    let grid = Grid { m, i, base: opponents.without(m, i), shared, others: unit_assignments(m, &other_units, cfg.cap)? };
    let dims = grid.dims();
    let mut step = ratio(1, 8);
    let mut axes: Vec<Vec<Rational>> = vec![(0..=8).map(|k| ratio(k, 8)).collect(); dims];
    let mut best: Option<(Rational, Vec<Rational>, BehaviouralProfile)> = None;
    let levels = cfg.grid_depth.max(1);
    for level in 0..levels {
        let radix = Radix::new(axes.iter().map(Vec::len).collect());
        cap_check("grid points per level", radix.len() as u128 * grid.others.len() as u128, cfg.cap)?;
        let points: Vec<Vec<Rational>> =
            (0..radix.len()).map(|k| radix.decode(k).iter().enumerate().map(|(d, &j)| axes[d][j].clone()).collect()).collect();
        for chunk in points.chunks(64) {
            let values = crate::par::map(chunk, |pt| grid.evaluate(pt));
            for (pt, v) in chunk.iter().zip(values) {
                let (v, rules) = v?;
                if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    best = Some((v, pt.clone(), rules));
                }
            }
            if let (Some(t), Some((b, _, _))) = (above, &best) {
                if b > t {
                    let (value, _, rules) = best.unwrap();
                    return Ok(BestResponse { value, witness: Witness::Behavioural(rules), exact: false, resolution: Some(step) });
                }
            }
        }
        if level + 1 == levels {
            break;
        }
        let next = &step / Rational::from_integer(8.into());
        let center = best.as_ref().unwrap().1.clone();
        axes = center
            .iter()
            .map(|c| {
                let mut axis = Vec::new();
                for j in -8i64..=8 {
                    let x = c + &next * Rational::from_integer(j.into());
                    if x >= Rational::zero() && x <= Rational::one() && axis.last() != Some(&x) {
                        axis.push(x);
                    }
                }
                axis
            })
            .collect();
        step = next;
    }
    let (value, _, rules) = best.unwrap();
    Ok(BestResponse { value, witness: Witness::Behavioural(rules), exact: false, resolution: Some(step) })
}

pub fn best_response(m: &Maid, i: AgentId, opponents: &BehaviouralProfile, cfg: &SolverConfig) -> Result<BestResponse> {
    best_response_above(m, i, opponents, cfg, None)
}

fn best_response_above(
    m: &Maid,
    i: AgentId,
    opponents: &BehaviouralProfile,
    cfg: &SolverConfig,
    above: Option<&Rational>,
) -> Result<BestResponse> {
    if m.is_absent_minded(i) {
        grid_best_response(m, i, opponents, cfg, above)
    } else {
        pure_best_response(m, i, opponents, cfg.cap, above)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub exact: bool,
}

/// Whether some policy of `i` earns strictly more than `q` against `opponents`.
pub fn is_best_response(m: &Maid, i: AgentId, opponents: &BehaviouralProfile, q: &Rational, cfg: &SolverConfig) -> Result<Verdict> {
    let br = best_response_above(m, i, opponents, cfg, Some(q))?;
    // a grid point above q is a genuine witness; failing to find one is only an approximate "no"
    let answer = br.value > *q;
    Ok(Verdict { answer, exact: br.exact || answer })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashCertificate {
    pub profile: BehaviouralProfile,
    /// Best-response value minus current EU, per agent. For grid agents a lower bound.
    pub gaps: Vec<Rational>,
    pub values: Vec<Rational>,
    pub epsilon: Rational,
    pub exact: bool,
    pub is_nash: bool,
}

/// Deviation gaps for every agent. Exact agents need gap ≤ 0; grid agents need gap ≤ epsilon.
pub fn is_nash(m: &Maid, p: &BehaviouralProfile, epsilon: &Rational, cfg: &SolverConfig) -> Result<NashCertificate> {
    let values = expected_utilities(m, p)?;
    let mut gaps = Vec::new();
    let mut exact = true;
    let mut ok = true;
    for a in m.agent_ids() {
        let grid = m.is_absent_minded(a);
        let threshold = if grid { &values[a.0] + epsilon } else { values[a.0].clone() };
        let br = best_response_above(m, a, p, cfg, Some(&threshold))?;
        let gap = &br.value - &values[a.0];
        if br.value > threshold {
            ok = false;
        } else if grid {
            exact = false;
        }
        gaps.push(gap);
    }
    Ok(NashCertificate { profile: p.clone(), gaps, values, epsilon: epsilon.clone(), exact: exact || !ok, is_nash: ok })
}

/// Backward induction along the relevance order for sufficient-information games.
pub fn find_pure_ne_sufficient_info(m: &Maid, _cfg: &SolverConfig) -> Result<PureProfile> {
    if !classify_recall(m).sufficient_information {
        return Err(Error::NotApplicable("the game does not have sufficient information".into()));
    }
    let order = match relevance_order(m) {
        RelevanceOrder::Order(o) => o,
        RelevanceOrder::Cycle(_) => return Err(Error::NotApplicable("decision rules are mutually relevant".into())),
    };
    let mut choices: Vec<Option<Vec<usize>>> =
        m.units().iter().map(|u| Some(vec![0; m.context_count(u.template())])).collect();
    for u in order {
        let unit = m.unit(u);
        let d = unit.template();
        let card = m.card(d);
        let radix = m.context_radix(d);
        for ctx in 0..radix.len() {
            let current = BehaviouralProfile::from_pure(m, &PureProfile { choices: choices.clone() });
            let bn = induced_bn(m, &current)?;
            let digits = radix.decode(ctx);
            let evidence: Vec<(usize, usize)> = m.var(d).parents.iter().map(|p| p.0).zip(digits.iter().copied()).collect();
            let reached = !bn.probability_of(&evidence).is_zero();
            let candidates: Vec<usize> = (0..card).collect();
            let values = crate::par::map(&candidates, |&a| -> Result<Rational> {
                if reached {
                    let mut trial = choices.clone();
                    trial[u.0].as_mut().unwrap()[ctx] = a;
                    expected_utility(m, &BehaviouralProfile::from_pure(m, &PureProfile { choices: trial }), unit.owner)
                } else {
                    // unreached context: value of the action if the context were forced
                    Ok(forced_value(m, &bn, d, &digits, a, unit.owner))
                }
            });
            let mut best: Option<(Rational, usize)> = None;
            for (a, v) in values.into_iter().enumerate() {
                let v = v?;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, a));
                }
            }
            choices[u.0].as_mut().unwrap()[ctx] = best.unwrap().1;
        }
    }
    Ok(PureProfile { choices })
}

/// The game's induced normal form: every agent's pure policies and the EU of every joint profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub policies: Vec<Vec<PurePolicy>>,
    /// `payoffs[agent][joint]`, joint index in agent-major radix order.
    pub payoffs: Vec<Vec<Rational>>,
    pub radix: Radix,
}

impl NormalForm {
    pub fn profile(&self, m: &Maid, joint: usize) -> PureProfile {
        let digits = self.radix.decode(joint);
        PureProfile::from_policies(m, digits.iter().enumerate().map(|(a, &k)| &self.policies[a][k]))
    }

    /// Whether no agent gains by a unilateral switch of pure policy.
    pub fn is_pure_equilibrium(&self, joint: usize) -> bool {
        let digits = self.radix.decode(joint);
        (0..self.policies.len()).all(|a| {
            let here = &self.payoffs[a][joint];
            (0..self.policies[a].len()).all(|k| {
                let mut d = digits.clone();
                d[a] = k;
                self.payoffs[a][self.radix.index(&d)] <= *here
            })
        })
    }
}

pub fn normal_form(m: &Maid, cap: u64) -> Result<NormalForm> {
    let count = m.agent_ids().fold(1u128, |acc, a| acc.saturating_mul(pure_policy_count(m, a)));
    cap_check("joint pure profiles", count, cap)?;
    let policies: Vec<Vec<PurePolicy>> = m.agent_ids().map(|a| enumerate_pure_policies(m, a, cap)).collect::<Result<_>>()?;
    let radix = Radix::new(policies.iter().map(Vec::len).collect());
    let rows = crate::par::map_range(radix.len(), |k| {
        let digits = radix.decode(k);
        let p = PureProfile::from_policies(m, digits.iter().enumerate().map(|(a, &j)| &policies[a][j]));
        expected_utilities(m, &p.to_behavioural(m))
    });
    let mut payoffs = vec![Vec::with_capacity(radix.len()); m.agents().len()];
    for r in rows {
        for (a, v) in r?.into_iter().enumerate() {
            payoffs[a].push(v);
        }
    }
    Ok(NormalForm { policies, payoffs, radix })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedEquilibrium {
    pub policies: Vec<MixedPolicy>,
    pub values: Vec<Rational>,
}

impl MixedEquilibrium {
    pub fn profile(&self, m: &Maid) -> MixtureProfile {
        MixtureProfile::from_mixed(m, &self.policies)
    }
}

fn subsets_by_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Feasibility LP for a support pair: strategies in the support are best responses.
fn support_lp(a: &[Vec<Rational>], b: &[Vec<Rational>], s1: &[usize], s2: &[usize]) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let (n1, n2) = (a.len(), a[0].len());
    // columns: x (n1), y (n2), v1, v2
    let cols = n1 + n2 + 2;
    let mut lp = LinearProgram::new(cols);
    lp.free[n1 + n2] = true;
    lp.free[n1 + n2 + 1] = true;
    let zero = || vec![Rational::zero(); cols];
    let mut row = zero();
    for x in row.iter_mut().take(n1) {
        *x = Rational::one();
    }
    lp.add(row, Relation::Eq, Rational::one());
    let mut row = zero();
    for x in row.iter_mut().skip(n1).take(n2) {
        *x = Rational::one();
    }
    lp.add(row, Relation::Eq, Rational::one());
    for i in 0..n1 {
        if !s1.contains(&i) {
            let mut row = zero();
            row[i] = Rational::one();
            lp.add(row, Relation::Eq, Rational::zero());
        }
    }
    for j in 0..n2 {
        if !s2.contains(&j) {
            let mut row = zero();
            row[n1 + j] = Rational::one();
            lp.add(row, Relation::Eq, Rational::zero());
        }
    }
    for i in 0..n1 {
        let mut row = zero();
        for j in 0..n2 {
            row[n1 + j] = a[i][j].clone();
        }
        row[n1 + n2] = -Rational::one();
        lp.add(row, if s1.contains(&i) { Relation::Eq } else { Relation::Le }, Rational::zero());
    }
    for j in 0..n2 {
        let mut row = zero();
        for i in 0..n1 {
            row[i] = b[i][j].clone();
        }
        row[n1 + n2 + 1] = -Rational::one();
        lp.add(row, if s2.contains(&j) { Relation::Eq } else { Relation::Le }, Rational::zero());
    }
    let r = solve_lp(&lp);
    (r.status == LpStatus::Optimal).then(|| (r.solution[..n1].to_vec(), r.solution[n1..n1 + n2].to_vec()))
}

/// Support enumeration on the induced bimatrix game, supports ordered by total size,
/// then the first agent's size, then lexicographically.
pub fn find_mixed_ne_two_agent(m: &Maid, cfg: &SolverConfig) -> Result<MixedEquilibrium> {
    if m.agents().len() != 2 {
        return Err(Error::Unsupported(format!("mixed equilibria need exactly 2 agents, found {}", m.agents().len())));
    }
    let nf = normal_form(m, cfg.cap)?;
    let (n1, n2) = (nf.policies[0].len(), nf.policies[1].len());
    let a: Vec<Vec<Rational>> = (0..n1).map(|i| (0..n2).map(|j| nf.payoffs[0][nf.radix.index(&[i, j])].clone()).collect()).collect();
    let b: Vec<Vec<Rational>> = (0..n1).map(|i| (0..n2).map(|j| nf.payoffs[1][nf.radix.index(&[i, j])].clone()).collect()).collect();
    for total in 2..=(n1 + n2) {
        for k1 in 1..=n1.min(total - 1) {
            let k2 = total - k1;
            if k2 > n2 {
                continue;
            }
            for s1 in subsets_by_size(n1, k1) {
                for s2 in subsets_by_size(n2, k2) {
                    if let Some((x, y)) = support_lp(&a, &b, &s1, &s2) {
                        let mut values = vec![Rational::zero(), Rational::zero()];
                        for i in 0..n1 {
                            for j in 0..n2 {
                                let w = &x[i] * &y[j];
                                if !w.is_zero() {
                                    values[0] += &w * &a[i][j];
                                    values[1] += &w * &b[i][j];
                                }
                            }
                        }
                        let policies = vec![
                            MixedPolicy { agent: AgentId(0), support: nf.policies[0].iter().cloned().zip(x).collect() },
                            MixedPolicy { agent: AgentId(1), support: nf.policies[1].iter().cloned().zip(y).collect() },
                        ];
                        return Ok(MixedEquilibrium { policies, values });
                    }
                }
            }
        }
    }
    unreachable!("every finite two-player game has a mixed equilibrium")
}

/// Deviation gaps under outset randomization; pure deviations suffice by linearity.
pub fn mixed_nash_gaps(m: &Maid, p: &MixtureProfile, cfg: &SolverConfig) -> Result<Vec<Rational>> {
    let mut gaps = Vec::new();
    for a in m.agent_ids() {
        let current = mixed_expected_utility(m, p, a, cfg.cap)?;
        let mut best: Option<Rational> = None;
        for pol in pure_policies(m, a, cfg.cap)? {
            let mut dev = p.clone();
            for am in dev.agents.iter_mut() {
                if am.agent == a {
                    *am = AgentMixture { agent: a, support: vec![(pol.to_behavioural(m), Rational::one())] };
                }
            }
            let v = mixed_expected_utility(m, &dev, a, cfg.cap)?;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        gaps.push(best.unwrap_or_else(|| current.clone()) - current);
    }
    Ok(gaps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeMode {
    Pure,
    Behavioural,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonEmptiness {
    GuaranteedYes(String),
    /// `exact` is false when the witness passed only an epsilon check.
    Yes { witness: BehaviouralProfile, exact: bool },
    No,
    Unknown(String),
}

/// Rows on the lattice {k/den} of the probability simplex, in lexicographic order.
fn simplex_lattice(card: usize, den: i64) -> Vec<Vec<Rational>> {
    fn rec(left: i64, slots: usize, den: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<Rational>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| ratio(k, den)).collect());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(left - k, slots - 1, den, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(den, card, den, &mut Vec::new(), &mut out);
    out
}

pub fn non_emptiness(m: &Maid, mode: NeMode, cfg: &SolverConfig) -> Result<NonEmptiness> {
    match mode {
        NeMode::Mixed => Ok(NonEmptiness::GuaranteedYes("every finite game has a mixed equilibrium".into())),
        NeMode::Pure => {
            if classify_recall(m).sufficient_information {
                return Ok(NonEmptiness::GuaranteedYes("the game has sufficient information".into()));
            }
            let nf = normal_form(m, cfg.cap)?;
            for k in 0..nf.radix.len() {
                if nf.is_pure_equilibrium(k) {
                    return Ok(NonEmptiness::Yes { witness: nf.profile(m, k).to_behavioural(m), exact: true });
                }
            }
            Ok(NonEmptiness::No)
        }
        NeMode::Behavioural => {
            let report = classify_recall(m);
            if report.agents.iter().all(|a| a.sufficient_recall) {
                return Ok(NonEmptiness::GuaranteedYes("every agent has sufficient recall".into()));
            }
            let slots: Vec<(UnitId, usize)> =
                m.units().iter().flat_map(|u| (0..m.context_count(u.template())).map(move |_| (u.id, m.card(u.template())))).collect();
            let mut den = 1i64;
            for _ in 0..cfg.lattice_rounds {
                let lattices: Vec<Vec<Vec<Rational>>> = slots.iter().map(|&(_, card)| simplex_lattice(card, den)).collect();
                let radix = Radix::new(lattices.iter().map(Vec::len).collect());
                cap_check("behavioural lattice candidates", radix.len() as u128, cfg.cap)?;
                for k in 0..radix.len() {
                    let digits = radix.decode(k);
                    let mut profile = BehaviouralProfile::empty(m);
                    let mut at = 0;
                    for u in m.units() {
                        let c = m.context_count(u.template());
                        profile.set(u.id, (at..at + c).map(|s| lattices[s][digits[s]].clone()).collect());
                        at += c;
                    }
                    let cert = is_nash(m, &profile, &cfg.epsilon, cfg)?;
                    if cert.is_nash {
                        return Ok(NonEmptiness::Yes { witness: profile, exact: cert.exact });
                    }
                }
                den *= 2;
            }
            Ok(NonEmptiness::Unknown(format!(
                "no equilibrium found on lattices up to denominator {}; the search cannot prove absence",
                den / 2
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        assert_eq!(simplex_lattice(2, 1).len(), 2);
        assert_eq!(simplex_lattice(2, 4).len(), 5);
        assert_eq!(simplex_lattice(3, 2).len(), 6);
    }

    #[test]
    fn stick_breaking_sums_to_one() {
        let row = stick_row(&[ratio(1, 3), ratio(1, 2)]);
        assert_eq!(row, vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
    }

    #[test]
    fn subsets_in_lexicographic_order() {
        assert_eq!(subsets_by_size(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
