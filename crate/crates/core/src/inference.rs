//! Exact inference in the Bayesian network induced by a policy profile.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{cap_check, Error, Result};
use crate::graphs::min_fill;
use crate::model::{AgentId, Maid, Radix, Table, VarId};
use crate::policies::{check_rule, BehaviouralProfile};
use crate::rational::Rational;

/// Largest factor scope before a treewidth warning is logged.
const WIDE_SCOPE: usize = 13;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BnNode {
    pub card: usize,
    pub parents: Vec<usize>,
    /// `cpt[ctx * card + value]`, contexts in parent radix order.
    pub cpt: Vec<Rational>,
}

/// A discrete Bayesian network with rational CPDs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bn {
    pub nodes: Vec<BnNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub scope: Vec<usize>,
    pub cards: Vec<usize>,
    pub table: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elimination {
    MinFill,
    /// Variables are eliminated in this order; entries that need no elimination are skipped.
    Given(Vec<usize>),
}

impl Factor {
    pub fn scalar(q: Rational) -> Self {
        Factor { scope: Vec::new(), cards: Vec::new(), table: vec![q] }
    }

    fn radix(&self) -> Radix {
        Radix::new(self.cards.clone())
    }

    pub fn total(&self) -> Rational {
        self.table.iter().fold(Rational::zero(), |acc, q| acc + q)
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (i, &v) in other.scope.iter().enumerate() {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(other.cards[i]);
            }
        }
        let radix = Radix::new(cards.clone());
        let a_str = self.radix().strides().to_vec();
        let b_str = other.radix().strides().to_vec();
        let a_pos: Vec<usize> = self.scope.iter().map(|v| scope.iter().position(|w| w == v).unwrap()).collect();
        let b_pos: Vec<usize> = other.scope.iter().map(|v| scope.iter().position(|w| w == v).unwrap()).collect();
        let mut digits = vec![0usize; scope.len()];
        let mut table = Vec::with_capacity(radix.len());
        for _ in 0..radix.len() {
            let ai: usize = a_pos.iter().zip(&a_str).map(|(&p, s)| digits[p] * s).sum();
            let bi: usize = b_pos.iter().zip(&b_str).map(|(&p, s)| digits[p] * s).sum();
            let (x, y) = (&self.table[ai], &other.table[bi]);
            table.push(if x.is_zero() || y.is_zero() { Rational::zero() } else { x * y });
            radix.increment(&mut digits);
        }
        Factor { scope, cards, table }
    }

    pub fn sum_out(&self, v: usize) -> Factor {
        let Some(pos) = self.scope.iter().position(|&w| w == v) else { return self.clone() };
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let out_radix = Radix::new(cards.clone());
        let out_str = out_radix.strides().to_vec();
        let radix = self.radix();
        let mut table = vec![Rational::zero(); out_radix.len()];
        let mut digits = vec![0usize; self.scope.len()];
        for q in &self.table {
            if !q.is_zero() {
                let mut k = 0;
                let mut j = 0;
                for (i, &d) in digits.iter().enumerate() {
                    if i != pos {
                        k += d * out_str[j];
                        j += 1;
                    }
                }
                table[k] += q;
            }
            radix.increment(&mut digits);
        }
        Factor { scope, cards, table }
    }

    /// Restricts to the evidence values, dropping the observed variables from the scope.
    pub fn reduce(&self, evidence: &[(usize, usize)]) -> Factor {
        let hits: Vec<(usize, usize)> = self
            .scope
            .iter()
            .enumerate()
            .filter_map(|(i, v)| evidence.iter().find(|e| e.0 == *v).map(|e| (i, e.1)))
            .collect();
        if hits.is_empty() {
            return self.clone();
        }
        let keep: Vec<usize> = (0..self.scope.len()).filter(|i| !hits.iter().any(|h| h.0 == *i)).collect();
        let scope: Vec<usize> = keep.iter().map(|&i| self.scope[i]).collect();
        let cards: Vec<usize> = keep.iter().map(|&i| self.cards[i]).collect();
        let out = Radix::new(cards.clone());
        let strides = self.radix().strides().to_vec();
        let base: usize = hits.iter().map(|&(i, val)| val * strides[i]).sum();
        let mut digits = vec![0usize; scope.len()];
        let mut table = Vec::with_capacity(out.len());
        for _ in 0..out.len() {
            let idx = base + keep.iter().zip(&digits).map(|(&i, d)| d * strides[i]).sum::<usize>();
            table.push(self.table[idx].clone());
            out.increment(&mut digits);
        }
        Factor { scope, cards, table }
    }

    /// Same factor with its scope permuted to `order` (which must be a permutation of the scope).
    pub fn reordered(&self, order: &[usize]) -> Factor {
        let cards: Vec<usize> = order.iter().map(|v| self.cards[self.scope.iter().position(|w| w == v).unwrap()]).collect();
        let out = Radix::new(cards.clone());
        let strides = self.radix().strides().to_vec();
        let src: Vec<usize> = order.iter().map(|v| self.scope.iter().position(|w| w == v).unwrap()).collect();
        let mut digits = vec![0usize; order.len()];
        let mut table = Vec::with_capacity(out.len());
        for _ in 0..out.len() {
            let idx: usize = src.iter().zip(&digits).map(|(&s, d)| d * strides[s]).sum();
            table.push(self.table[idx].clone());
            out.increment(&mut digits);
        }
        Factor { scope: order.to_vec(), cards, table }
    }

    pub fn normalized(&self) -> Result<Factor> {
        let z = self.total();
        if z.is_zero() {
            return Err(Error::ZeroProbabilityEvidence);
        }
        Ok(Factor { table: self.table.iter().map(|q| q / &z).collect(), ..self.clone() })
    }
}

impl Bn {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: BnNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn context_radix(&self, v: usize) -> Radix {
        Radix::new(self.nodes[v].parents.iter().map(|&p| self.nodes[p].card).collect())
    }

    /// Replaces `v`'s CPD by a point mass on `value` (an intervention).
    pub fn clamp(&mut self, v: usize, value: usize) {
        let node = &mut self.nodes[v];
        let card = node.card;
        for (i, q) in node.cpt.iter_mut().enumerate() {
            *q = if i % card == value { Rational::one() } else { Rational::zero() };
        }
    }

    fn factor_of(&self, v: usize) -> Factor {
        let node = &self.nodes[v];
        let mut scope = node.parents.clone();
        scope.push(v);
        let mut cards: Vec<usize> = node.parents.iter().map(|&p| self.nodes[p].card).collect();
        cards.push(node.card);
        Factor { scope, cards, table: node.cpt.clone() }
    }

    fn ancestors(&self, set: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = set.to_vec();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(self.nodes[v].parents.iter().copied());
            }
        }
        seen
    }

    /// Unnormalized Pr(query, evidence) as a factor over `query` in the given order.
    pub fn joint(&self, query: &[usize], evidence: &[(usize, usize)], order: &Elimination) -> Factor {
        let mut keep: Vec<usize> = query.to_vec();
        keep.extend(evidence.iter().map(|e| e.0));
        let relevant = self.ancestors(&keep);
        let mut factors: Vec<Factor> =
            (0..self.len()).filter(|&v| relevant[v]).map(|v| self.factor_of(v).reduce(evidence)).collect();
        let fixed: BTreeSet<usize> = keep.iter().copied().collect();
        let elim: Vec<usize> = match order {
            Elimination::MinFill => {
                let mut adj = vec![BTreeSet::new(); self.len()];
                for f in &factors {
                    for (i, &a) in f.scope.iter().enumerate() {
                        for &b in &f.scope[i + 1..] {
                            adj[a].insert(b);
                            adj[b].insert(a);
                        }
                    }
                }
                // only relevant, unobserved, non-query variables are eliminated
                for (v, nb) in adj.iter_mut().enumerate() {
                    if !relevant[v] || fixed.contains(&v) {
                        nb.clear();
                    }
                }
                for nb in adj.iter_mut() {
                    nb.retain(|&w| relevant[w] && !fixed.contains(&w));
                }
                min_fill(&adj).1.into_iter().filter(|&v| relevant[v] && !fixed.contains(&v)).collect()
            }
            Elimination::Given(o) => {
                let mut seen = BTreeSet::new();
                let mut out: Vec<usize> =
                    o.iter().copied().filter(|&v| v < self.len() && relevant[v] && !fixed.contains(&v) && seen.insert(v)).collect();
                out.extend((0..self.len()).filter(|&v| relevant[v] && !fixed.contains(&v) && !seen.contains(&v)));
                out
            }
        };
        let mut wide = false;
        for v in elim {
            let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&v));
            factors = without;
            let mut it = with.into_iter();
            let Some(first) = it.next() else { continue };
            let prod = it.fold(first, |acc, f| acc.product(&f));
            if prod.scope.len() > WIDE_SCOPE {
                wide = true;
            }
            factors.push(prod.sum_out(v));
        }
        if wide {
            log::warn!("variable elimination produced a factor wider than {WIDE_SCOPE} variables (treewidth above 12)");
        }
        let result = factors.into_iter().fold(Factor::scalar(Rational::one()), |acc, f| acc.product(&f));
        let mut scope_order: Vec<usize> = Vec::new();
        for &q in query {
            if !scope_order.contains(&q) {
                scope_order.push(q);
            }
        }
        if result.scope.len() == scope_order.len() {
            result.reordered(&scope_order)
        } else {
            // query variables missing from every factor can only happen for an empty query
            result
        }
    }

    /// Pr(query | evidence), normalized; errors if the evidence has probability zero.
    pub fn marginal(&self, query: &[usize], evidence: &[(usize, usize)]) -> Result<Factor> {
        self.marginal_with(query, evidence, &Elimination::MinFill)
    }

    pub fn marginal_with(&self, query: &[usize], evidence: &[(usize, usize)], order: &Elimination) -> Result<Factor> {
        if let Some(q) = query.iter().find(|q| evidence.iter().any(|e| e.0 == **q)) {
            return Err(Error::Overlap(format!("node {q}")));
        }
        self.joint(query, evidence, order).normalized()
    }

    pub fn probability_of(&self, evidence: &[(usize, usize)]) -> Rational {
        self.joint(&[], evidence, &Elimination::MinFill).total()
    }

    /// Σ over instantiations of `scope` of Pr(scope) · values[index], with optional evidence (unnormalized).
    pub fn expectation(&self, scope: &[usize], values: &[Rational], evidence: &[(usize, usize)]) -> Rational {
        if values.iter().all(Zero::is_zero) {
            return Rational::zero();
        }
        let f = self.joint(scope, evidence, &Elimination::MinFill);
        f.table.iter().zip(values).fold(Rational::zero(), |acc, (p, u)| if p.is_zero() { acc } else { acc + p * u })
    }

    /// Positive-probability full assignments, or `None` once more than `limit` are found.
    /// Cheap when nearly every node is deterministic.
    pub fn support(&self, limit: usize) -> Option<Vec<(Vec<usize>, Rational)>> {
        let order = self.topological_order();
        let mut out = Vec::new();
        let mut assignment = vec![0usize; self.len()];
        // depth-first over `order`: (position, next value to try, probability so far)
        let mut frames: Vec<(usize, usize, Rational)> = vec![(0, 0, Rational::one())];
        while let Some((pos, next, pr)) = frames.pop() {
            if pos == order.len() {
                out.push((assignment.clone(), pr));
                if out.len() > limit {
                    return None;
                }
                continue;
            }
            let v = order[pos];
            let node = &self.nodes[v];
            let ds: Vec<usize> = node.parents.iter().map(|&q| assignment[q]).collect();
            let row = self.context_radix(v).index(&ds) * node.card;
            let Some(x) = (next..node.card).find(|&x| !node.cpt[row + x].is_zero()) else { continue };
            frames.push((pos, x + 1, pr.clone()));
            assignment[v] = x;
            frames.push((pos + 1, 0, pr * &node.cpt[row + x]));
        }
        Some(out)
    }

    fn topological_order(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = self.nodes.iter().map(|n| n.parents.len()).collect();
        let mut children = vec![Vec::new(); self.len()];
        for (v, n) in self.nodes.iter().enumerate() {
            for &p in &n.parents {
                children[p].push(v);
            }
        }
        let mut ready: Vec<usize> = (0..self.len()).rev().filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = ready.pop() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        order
    }

    /// Product of CPD entries for a full assignment.
    pub fn joint_probability(&self, assignment: &[usize]) -> Rational {
        let mut p = Rational::one();
        for (v, node) in self.nodes.iter().enumerate() {
            let digits: Vec<usize> = node.parents.iter().map(|&q| assignment[q]).collect();
            let ctx = self.context_radix(v).index(&digits);
            p *= &node.cpt[ctx * node.card + assignment[v]];
            if p.is_zero() {
                break;
            }
        }
        p
    }
}

/// The BN with every decision governed by its unit's rule; node indices equal variable indices.
pub fn induced_bn(m: &Maid, p: &BehaviouralProfile) -> Result<Bn> {
    let mut nodes = Vec::with_capacity(m.len());
    let mut checked = vec![false; m.units().len()];
    for v in m.var_ids() {
        let var = m.var(v);
        let parents: Vec<usize> = var.parents.iter().map(|q| q.0).collect();
        let card = m.card(v);
        let cpt: Vec<Rational> = if let Some(u) = m.unit_of(v) {
            let rows = p.rule(u).ok_or_else(|| Error::MissingRule(m.unit(u).name.clone()))?;
            if !checked[u.0] {
                check_rule(m, u, rows)?;
                checked[u.0] = true;
            }
            rows.iter().flatten().cloned().collect()
        } else {
            match m.table(v) {
                Some(Table::Chance(rows)) => rows.iter().flatten().cloned().collect(),
                Some(Table::Utility(vals)) => {
                    let dom = m.utility_values(v);
                    let mut cpt = vec![Rational::zero(); vals.len() * card];
                    for (ctx, x) in vals.iter().enumerate() {
                        let k = dom.binary_search(x).unwrap_or(0);
                        cpt[ctx * card + k] = Rational::one();
                    }
                    cpt
                }
                None => return Err(Error::UnknownVariable(format!("{} has no table", var.name))),
            }
        };
        nodes.push(BnNode { card, parents, cpt });
    }
    Ok(Bn { nodes })
}

/// Expected utility of `i` from a list of full assignments and their probabilities.
pub fn utility_over(m: &Maid, support: &[(Vec<usize>, Rational)], i: AgentId) -> Rational {
    let mut total = Rational::zero();
    for u in m.utilities_of(i) {
        if let Some(Table::Utility(vals)) = m.table(u) {
            for (assignment, pr) in support {
                total += pr * &vals[m.context_index(u, assignment)];
            }
        }
    }
    total
}

/// Σ over `i`'s utilities of Σ_pa Pr(pa)·U(pa) in an already induced network.
pub fn utility_in(m: &Maid, bn: &Bn, i: AgentId, evidence: &[(usize, usize)]) -> Rational {
    let mut total = Rational::zero();
    for u in m.utilities_of(i) {
        let Some(Table::Utility(vals)) = m.table(u) else { continue };
        let scope: Vec<usize> = m.var(u).parents.iter().map(|p| p.0).collect();
        total += bn.expectation(&scope, vals, evidence);
    }
    total
}

pub fn expected_utility(m: &Maid, p: &BehaviouralProfile, i: AgentId) -> Result<Rational> {
    let bn = induced_bn(m, p)?;
    Ok(utility_in(m, &bn, i, &[]))
}

/// Expected utility of every agent, in agent order.
pub fn expected_utilities(m: &Maid, p: &BehaviouralProfile) -> Result<Vec<Rational>> {
    let bn = induced_bn(m, p)?;
    Ok(m.agent_ids().map(|a| utility_in(m, &bn, a, &[])).collect())
}

/// Pr(query | evidence) over Maid variables under profile `p`.
pub fn marginal(m: &Maid, p: &BehaviouralProfile, query: &[VarId], evidence: &[(VarId, usize)]) -> Result<Factor> {
    let bn = induced_bn(m, p)?;
    let q: Vec<usize> = query.iter().map(|v| v.0).collect();
    let e: Vec<(usize, usize)> = evidence.iter().map(|(v, x)| (v.0, *x)).collect();
    bn.marginal(&q, &e)
}

/// Full joint distribution over all non-utility variables, or an error beyond `cap` outcomes.
pub fn outcome_distribution(m: &Maid, p: &BehaviouralProfile, cap: u64) -> Result<Vec<(Vec<usize>, Rational)>> {
    let bn = induced_bn(m, p)?;
    let free: Vec<usize> = m.var_ids().filter(|&v| !m.var(v).is_utility()).map(|v| v.0).collect();
    let count = free.iter().fold(1u128, |acc, &v| acc.saturating_mul(bn.nodes[v].card as u128));
    cap_check("joint outcomes", count, cap)?;
    let radix = Radix::new(free.iter().map(|&v| bn.nodes[v].card).collect());
    let mut assignment = vec![0usize; m.len()];
    let mut out = Vec::with_capacity(radix.len());
    let mut digits = vec![0usize; free.len()];
    for _ in 0..radix.len() {
        for (k, &v) in free.iter().enumerate() {
            assignment[v] = digits[k];
        }
        let mut pr = Rational::one();
        for &v in &free {
            let node = &bn.nodes[v];
            let ds: Vec<usize> = node.parents.iter().map(|&q| assignment[q]).collect();
            let ctx = bn.context_radix(v).index(&ds);
            pr *= &node.cpt[ctx * node.card + assignment[v]];
            if pr.is_zero() {
                break;
            }
        }
        out.push((digits.clone(), pr));
        radix.increment(&mut digits);
    }
    Ok(out)
}

/// Oracle: sums probability times utility over every joint outcome.
pub fn expected_utility_bruteforce(m: &Maid, p: &BehaviouralProfile, i: AgentId, cap: u64) -> Result<Rational> {
    let free: Vec<usize> = m.var_ids().filter(|&v| !m.var(v).is_utility()).map(|v| v.0).collect();
    let dist = outcome_distribution(m, p, cap)?;
    let mut assignment = vec![0usize; m.len()];
    let mut total = Rational::zero();
    for (digits, pr) in dist {
        if pr.is_zero() {
            continue;
        }
        for (k, &v) in free.iter().enumerate() {
            assignment[v] = digits[k];
        }
        for u in m.utilities_of(i) {
            if let Some(Table::Utility(vals)) = m.table(u) {
                total += &pr * &vals[m.context_index(u, &assignment)];
            }
        }
    }
    Ok(total)
}
