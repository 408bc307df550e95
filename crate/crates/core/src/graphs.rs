//! Structural analysis: d-separation, s-reachability, mechanised graphs,
//! recall classification, treewidth, relevance ordering and subdiagrams.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{AgentId, Maid, Table, UnitId, VarId, VarKind, Variable};

/// Plain adjacency-list DAG over `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(n: usize) -> Self {
        Dag { parents: vec![Vec::new(); n], children: vec![Vec::new(); n] }
    }

    pub fn from_maid(m: &Maid) -> Self {
        let mut g = Dag::new(m.len());
        for v in m.var_ids() {
            for p in &m.var(v).parents {
                g.add_edge(p.0, v.0);
            }
        }
        g
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.children[from].contains(&to) {
            self.children[from].push(to);
            self.parents[to].push(from);
        }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Nodes with a directed path into `set`, including `set` itself.
    pub fn ancestors(&self, set: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = set.to_vec();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        seen
    }

    /// Nodes reachable from `set`, including `set` itself.
    pub fn descendants(&self, set: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = set.to_vec();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(self.children[v].iter().copied());
            }
        }
        seen
    }
}

/// Bayes-ball reachability: true iff no active trail joins `x` and `y` given `z`.
pub fn d_separated(g: &Dag, x: &[usize], y: &[usize], z: &[usize]) -> bool {
    let n = g.len();
    let mut observed = vec![false; n];
    for &v in z {
        observed[v] = true;
    }
    let anc_z = g.ancestors(z);
    let mut target = vec![false; n];
    for &v in y {
        target[v] = true;
    }
    // index 0: arrived from a child (moving up), 1: arrived from a parent (moving down)
    let mut visited = vec![[false; 2]; n];
    let mut queue: VecDeque<(usize, usize)> = x.iter().map(|&v| (v, 0)).collect();
    while let Some((v, dir)) = queue.pop_front() {
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if !observed[v] && target[v] {
            return false;
        }
        if dir == 0 {
            if !observed[v] {
                queue.extend(g.parents[v].iter().map(|&p| (p, 0)));
                queue.extend(g.children[v].iter().map(|&c| (c, 1)));
            }
        } else {
            if !observed[v] {
                queue.extend(g.children[v].iter().map(|&c| (c, 1)));
            }
            if anc_z[v] {
                queue.extend(g.parents[v].iter().map(|&p| (p, 0)));
            }
        }
    }
    true
}

/// d-separation on the MAID's own graph.
pub fn d_separated_vars(m: &Maid, x: &[VarId], y: &[VarId], z: &[VarId]) -> Result<bool> {
    let n = m.len();
    for v in x.iter().chain(y).chain(z) {
        if v.0 >= n {
            return Err(Error::UnknownVariable(format!("#{}", v.0)));
        }
    }
    let mut seen = BTreeSet::new();
    for s in [x, y, z] {
        let local: BTreeSet<VarId> = s.iter().copied().collect();
        for v in local {
            if !seen.insert(v) {
                return Err(Error::Overlap(m.name(v).into()));
            }
        }
    }
    let idx = |s: &[VarId]| s.iter().map(|v| v.0).collect::<Vec<_>>();
    Ok(d_separated(&Dag::from_maid(m), &idx(x), &idx(y), &idx(z)))
}

/// The MAID graph with one independent mechanism parent per variable; mechanism of `v` is `n + v`.
fn independent_mechanised(m: &Maid) -> Dag {
    let n = m.len();
    let mut g = Dag::new(2 * n);
    for v in m.var_ids() {
        for p in &m.var(v).parents {
            g.add_edge(p.0, v.0);
        }
        g.add_edge(n + v.0, v.0);
    }
    g
}

struct Reach {
    g: Dag,
    n: usize,
}

impl Reach {
    fn new(m: &Maid) -> Self {
        Reach { g: independent_mechanised(m), n: m.len() }
    }

    fn query(&self, m: &Maid, d: VarId, v: VarId) -> bool {
        let VarKind::Decision(owner) = m.var(d).kind else { return false };
        let desc = self.g.descendants(&[d.0]);
        let targets: Vec<usize> = m.utilities_of(owner).filter(|u| desc[u.0] && u.0 != d.0).map(|u| u.0).collect();
        if targets.is_empty() {
            return false;
        }
        let mut z: Vec<usize> = m.var(d).parents.iter().map(|p| p.0).collect();
        z.push(d.0);
        !d_separated(&self.g, &[self.n + v.0], &targets, &z)
    }
}

/// Whether the mechanism of `v` is strategically relevant to the rule of decision `d`.
pub fn s_reachable(m: &Maid, d: VarId, v: VarId) -> Result<bool> {
    if d.0 >= m.len() {
        return Err(Error::UnknownVariable(format!("#{}", d.0)));
    }
    if v.0 >= m.len() {
        return Err(Error::UnknownVariable(format!("#{}", v.0)));
    }
    if !m.var(d).is_decision() {
        return Err(Error::NotApplicable(format!("{} is not a decision", m.name(d))));
    }
    if d == v {
        return Err(Error::Overlap(m.name(d).into()));
    }
    Ok(Reach::new(m).query(m, d, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MechNode {
    /// Θ_V for a chance or utility variable.
    Param(VarId),
    /// Π for a decision or a shared rule.
    Rule(UnitId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MechanisedGraph {
    pub mechanisms: Vec<MechNode>,
    pub object_edges: Vec<(VarId, VarId)>,
    /// (mechanism index, governed variable)
    pub governs: Vec<(usize, VarId)>,
    /// (from mechanism, to rule mechanism), sorted.
    pub mech_edges: Vec<(usize, usize)>,
    mech_of: Vec<usize>,
}

impl MechanisedGraph {
    pub fn mechanism_of(&self, v: VarId) -> usize {
        self.mech_of[v.0]
    }

    pub fn rule_index(&self, u: UnitId) -> Option<usize> {
        self.mechanisms.iter().position(|&k| k == MechNode::Rule(u))
    }

    pub fn node_name(&self, m: &Maid, idx: usize) -> String {
        match self.mechanisms[idx] {
            MechNode::Param(v) => format!("Theta_{}", m.name(v)),
            MechNode::Rule(u) => {
                let name = &m.unit(u).name;
                format!("Pi_{}", name.strip_prefix("Pi_").unwrap_or(name))
            }
        }
    }

    /// Named mechanism edges, e.g. `("Pi_A", "Pi_T")`.
    pub fn named_mech_edges(&self, m: &Maid) -> Vec<(String, String)> {
        self.mech_edges.iter().map(|&(a, b)| (self.node_name(m, a), self.node_name(m, b))).collect()
    }

    /// Adjacency between rule units induced by mechanism edges (self-loops included).
    pub fn rule_graph(&self, m: &Maid) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); m.units().len()];
        for &(a, b) in &self.mech_edges {
            if let (MechNode::Rule(ua), MechNode::Rule(ub)) = (self.mechanisms[a], self.mechanisms[b]) {
                adj[ua.0].insert(ub.0);
            }
        }
        adj
    }
}

pub fn build_mechanised_graph(m: &Maid) -> MechanisedGraph {
    let mut mechanisms = Vec::new();
    let mut mech_of = vec![0; m.len()];
    let mut rule_mech: BTreeMap<UnitId, usize> = BTreeMap::new();
    for v in m.var_ids() {
        match m.unit_of(v) {
            Some(u) => {
                let idx = *rule_mech.entry(u).or_insert_with(|| {
                    mechanisms.push(MechNode::Rule(u));
                    mechanisms.len() - 1
                });
                mech_of[v.0] = idx;
            }
            None => {
                mechanisms.push(MechNode::Param(v));
                mech_of[v.0] = mechanisms.len() - 1;
            }
        }
    }
    let mut object_edges = Vec::new();
    for v in m.var_ids() {
        for &p in &m.var(v).parents {
            object_edges.push((p, v));
        }
    }
    let governs: Vec<(usize, VarId)> = m.var_ids().map(|v| (mech_of[v.0], v)).collect();
    let reach = Reach::new(m);
    let mut edges = BTreeSet::new();
    for d in m.decisions() {
        let to = mech_of[d.0];
        for v in m.var_ids() {
            if v != d && reach.query(m, d, v) {
                edges.insert((mech_of[v.0], to));
            }
        }
    }
    MechanisedGraph { mechanisms, object_edges, governs, mech_edges: edges.into_iter().collect(), mech_of }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentRecall {
    pub agent: AgentId,
    pub perfect_recall: bool,
    pub imperfect_recall: bool,
    pub forgetful: bool,
    pub absent_minded: bool,
    pub sufficient_recall: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecallReport {
    pub agents: Vec<AgentRecall>,
    pub perfect_information: bool,
    pub sufficient_information: bool,
}

/// `a` precedes `b` in a perfect-recall ordering: b observes a and everything a observed.
fn recalls(m: &Maid, a: VarId, b: VarId) -> bool {
    let pb = &m.var(b).parents;
    pb.contains(&a) && m.var(a).parents.iter().all(|p| pb.contains(p))
}

fn ordering_exists(m: &Maid, ds: &[VarId]) -> bool {
    // pairwise comparability is transitive, so a total ordering exists iff every pair is comparable
    ds.iter()
        .enumerate()
        .all(|(i, &a)| ds[i + 1..].iter().all(|&b| recalls(m, a, b) || recalls(m, b, a)))
}

fn acyclic(adj: &[BTreeSet<usize>], keep: &[bool]) -> bool {
    find_cycle(adj, keep).is_none()
}

/// A directed cycle among the `keep` nodes, if any (self-loops count).
fn find_cycle(adj: &[BTreeSet<usize>], keep: &[bool]) -> Option<Vec<usize>> {
    let n = adj.len();
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(v: usize, adj: &[BTreeSet<usize>], keep: &[bool], state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &w in &adj[v] {
            if !keep[w] {
                continue;
            }
            if state[w] == 1 {
                let start = stack.iter().position(|&x| x == w).unwrap_or(0);
                return Some(stack[start..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, adj, keep, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }
    for v in 0..n {
        if keep[v] && state[v] == 0 {
            if let Some(c) = dfs(v, adj, keep, &mut state, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

pub fn classify_recall(m: &Maid) -> RecallReport {
    classify_with(m, &build_mechanised_graph(m))
}

pub fn classify_with(m: &Maid, g: &MechanisedGraph) -> RecallReport {
    let adj = g.rule_graph(m);
    let mut agents = Vec::new();
    for a in m.agent_ids() {
        let ds: Vec<VarId> = m.decisions_of(a).collect();
        let perfect = ordering_exists(m, &ds);
        let forgetful = !perfect
            && ds.iter().enumerate().any(|(i, &x)| {
                ds[i + 1..].iter().any(|&y| m.unit_of(x) != m.unit_of(y) && !recalls(m, x, y) && !recalls(m, y, x))
            });
        let keep: Vec<bool> = m.units().iter().map(|u| u.owner == a).collect();
        agents.push(AgentRecall {
            agent: a,
            perfect_recall: perfect,
            imperfect_recall: !perfect,
            forgetful,
            absent_minded: m.is_absent_minded(a),
            sufficient_recall: acyclic(&adj, &keep),
        });
    }
    let all: Vec<VarId> = m.decisions().collect();
    RecallReport {
        agents,
        perfect_information: ordering_exists(m, &all),
        sufficient_information: acyclic(&adj, &vec![true; m.units().len()]),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelevanceOrder {
    Order(Vec<UnitId>),
    Cycle(Vec<UnitId>),
}

/// Topological order of the rule-relevance graph, smallest unit first on ties;
/// a rule is listed after every rule it strategically relies on.
pub fn relevance_order(m: &Maid) -> RelevanceOrder {
    let g = build_mechanised_graph(m);
    let adj = g.rule_graph(m);
    let k = adj.len();
    if let Some(c) = find_cycle(&adj, &vec![true; k]) {
        return RelevanceOrder::Cycle(c.into_iter().map(UnitId).collect());
    }
    let mut indeg = vec![0usize; k];
    for targets in &adj {
        for &t in targets {
            indeg[t] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..k).filter(|&u| indeg[u] == 0).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(&u) = ready.iter().next() {
        ready.remove(&u);
        order.push(UnitId(u));
        for &t in &adj[u] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.insert(t);
            }
        }
    }
    RelevanceOrder::Order(order)
}

/// Undirected moral graph: parents married, directions dropped.
pub fn moral_graph(m: &Maid) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); m.len()];
    for v in m.var_ids() {
        let ps = &m.var(v).parents;
        for (i, p) in ps.iter().enumerate() {
            adj[p.0].insert(v.0);
            adj[v.0].insert(p.0);
            for q in &ps[i + 1..] {
                adj[p.0].insert(q.0);
                adj[q.0].insert(p.0);
            }
        }
    }
    adj
}

/// Greedy min-fill elimination; ties go to the smallest vertex. Returns (width, order).
pub fn min_fill(adj: &[BTreeSet<usize>]) -> (usize, Vec<usize>) {
    let n = adj.len();
    let mut g: Vec<BTreeSet<usize>> = adj.to_vec();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<usize> = g[v].iter().copied().collect();
            let mut fill = 0;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !g[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            if best.is_none_or(|(f, _)| fill < f) {
                best = Some((fill, v));
            }
        }
        let Some((_, v)) = best else { break };
        let nb: Vec<usize> = g[v].iter().copied().collect();
        width = width.max(nb.len());
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                g[a].insert(b);
                g[b].insert(a);
            }
        }
        for &a in &nb {
            g[a].remove(&v);
        }
        g[v].clear();
        alive[v] = false;
        order.push(v);
    }
    (width, order)
}

/// Width of the triangulation induced by eliminating in `order`.
pub fn elimination_width(adj: &[BTreeSet<usize>], order: &[usize]) -> usize {
    let mut g: Vec<BTreeSet<usize>> = adj.to_vec();
    let mut width = 0;
    for &v in order {
        let nb: Vec<usize> = g[v].iter().copied().collect();
        width = width.max(nb.len());
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                g[a].insert(b);
                g[b].insert(a);
            }
            g[a].remove(&v);
        }
        g[v].clear();
    }
    width
}

pub fn treewidth_upper_bound(m: &Maid) -> (usize, Vec<VarId>) {
    let (w, order) = min_fill(&moral_graph(m));
    (w, order.into_iter().map(VarId).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdiagram {
    pub agents: Vec<AgentId>,
    /// Sorted in canonical order.
    pub vars: Vec<VarId>,
    pub edges: Vec<(VarId, VarId)>,
    /// Outside variables with a child inside; one subgame per instantiation of these.
    pub boundary: Vec<VarId>,
}

impl Subdiagram {
    pub fn is_proper(&self, m: &Maid) -> bool {
        self.vars.len() < m.len()
    }

    pub fn decisions(&self, m: &Maid) -> Vec<VarId> {
        self.vars.iter().copied().filter(|&v| m.var(v).is_decision()).collect()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.vars.binary_search(&v).is_ok()
    }
}

struct Closure {
    reach: Vec<Vec<bool>>,
    dag: Dag,
}

impl Closure {
    fn new(m: &Maid) -> Self {
        let r = Reach::new(m);
        let n = m.len();
        let mut reach = vec![vec![false; n]; n];
        for d in m.decisions() {
            for v in m.var_ids() {
                reach[d.0][v.0] = v != d && r.query(m, d, v);
            }
        }
        Closure { reach, dag: Dag::from_maid(m) }
    }

    fn close(&self, m: &Maid, mut set: Vec<bool>) -> Vec<bool> {
        let n = set.len();
        loop {
            let mut changed = false;
            for d in m.decisions() {
                if set[d.0] {
                    for v in 0..n {
                        if self.reach[d.0][v] && !set[v] {
                            set[v] = true;
                            changed = true;
                        }
                    }
                }
            }
            let members: Vec<usize> = (0..n).filter(|&v| set[v]).collect();
            let below = self.dag.descendants(&members);
            let above = self.dag.ancestors(&members);
            for v in 0..n {
                if !set[v] && below[v] && above[v] {
                    set[v] = true;
                    changed = true;
                }
            }
            if !changed {
                return set;
            }
        }
    }
}

fn make_subdiagram(m: &Maid, set: &[bool]) -> Subdiagram {
    let vars: Vec<VarId> = m.var_ids().filter(|v| set[v.0]).collect();
    let mut agents: Vec<AgentId> = vars
        .iter()
        .filter_map(|&v| match m.var(v).kind {
            VarKind::Decision(a) => Some(a),
            _ => None,
        })
        .collect();
    agents.sort();
    agents.dedup();
    let mut edges = Vec::new();
    let mut boundary = BTreeSet::new();
    for &v in &vars {
        for &p in &m.var(v).parents {
            if set[p.0] {
                edges.push((p, v));
            } else {
                boundary.insert(p);
            }
        }
    }
    Subdiagram { agents, vars, edges, boundary: boundary.into_iter().collect() }
}

/// Every subdiagram containing at least one decision, smallest first, the full graph last.
pub fn compute_subdiagrams(m: &Maid) -> Vec<Subdiagram> {
    let n = m.len();
    let cl = Closure::new(m);
    let mut found: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<bool>> = VecDeque::new();
    for v in 0..n {
        let mut s = vec![false; n];
        s[v] = true;
        let c = cl.close(m, s);
        if found.insert(c.clone()) {
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        for v in 0..n {
            if !c[v] {
                let mut s = c.clone();
                s[v] = true;
                let s = cl.close(m, s);
                if found.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
    }
    let mut out: Vec<Subdiagram> = found
        .into_iter()
        .filter(|s| m.decisions().any(|d| s[d.0]))
        .map(|s| make_subdiagram(m, &s))
        .collect();
    out.sort_by(|a, b| a.vars.len().cmp(&b.vars.len()).then_with(|| a.vars.cmp(&b.vars)));
    out
}

/// One subdiagram per distinct decision set, choosing the one with fewest variables.
pub fn subdiagram_representatives(m: &Maid) -> Vec<Subdiagram> {
    let mut by_decisions: BTreeMap<Vec<VarId>, Subdiagram> = BTreeMap::new();
    for sd in compute_subdiagrams(m) {
        by_decisions.entry(sd.decisions(m)).or_insert(sd);
    }
    let mut out: Vec<Subdiagram> = by_decisions.into_values().collect();
    out.sort_by(|a, b| a.vars.len().cmp(&b.vars.len()).then_with(|| a.vars.cmp(&b.vars)));
    out
}

/// The subgame on `sd` with boundary variables fixed to `z` (value indices, boundary order).
///
/// Boundary parents are dropped from every inside variable and its table rows are
/// selected at `z`. Decisions keep only their inside parents.
pub fn subgame(m: &Maid, sd: &Subdiagram, z: &[usize]) -> Result<Maid> {
    if z.len() != sd.boundary.len() {
        return Err(Error::NotApplicable(format!("expected {} boundary values, got {}", sd.boundary.len(), z.len())));
    }
    let fixed: BTreeMap<VarId, usize> = sd.boundary.iter().copied().zip(z.iter().copied()).collect();
    let new_index: BTreeMap<VarId, VarId> = sd.vars.iter().enumerate().map(|(i, &v)| (v, VarId(i))).collect();
    // utilities of agents without an inside decision keep their owner
    let owners: BTreeSet<AgentId> = sd.vars.iter().filter_map(|&v| m.var(v).kind.owner()).collect();
    let agent_index: BTreeMap<AgentId, AgentId> = owners.iter().enumerate().map(|(i, &a)| (a, AgentId(i))).collect();
    let mut vars = Vec::new();
    let mut tables = Vec::new();
    for &v in &sd.vars {
        let var = m.var(v);
        let inside: Vec<VarId> = var.parents.iter().copied().filter(|p| new_index.contains_key(p)).collect();
        let radix = m.context_radix(v);
        let new_radix = crate::model::Radix::new(inside.iter().map(|&p| m.card(p)).collect());
        let pick = |new_ctx: usize| {
            let inner = new_radix.decode(new_ctx);
            let mut it = inner.into_iter();
            let digits: Vec<usize> = var
                .parents
                .iter()
                .map(|p| match fixed.get(p) {
                    Some(&val) => val,
                    None => it.next().unwrap_or(0),
                })
                .collect();
            radix.index(&digits)
        };
        let table = match m.table(v) {
            Some(Table::Chance(rows)) => Some(Table::Chance((0..new_radix.len()).map(|c| rows[pick(c)].clone()).collect())),
            Some(Table::Utility(vals)) => Some(Table::Utility((0..new_radix.len()).map(|c| vals[pick(c)].clone()).collect())),
            None => None,
        };
        let kind = match var.kind {
            VarKind::Chance => VarKind::Chance,
            VarKind::Decision(a) => VarKind::Decision(agent_index[&a]),
            VarKind::Utility(a) => VarKind::Utility(agent_index[&a]),
        };
        vars.push(Variable {
            name: var.name.clone(),
            kind,
            domain: var.domain.clone(),
            parents: inside.iter().map(|p| new_index[p]).collect(),
        });
        tables.push(table);
    }
    let groups = m
        .groups()
        .iter()
        .filter(|g| g.members.iter().any(|d| new_index.contains_key(d)))
        .map(|g| crate::model::MechGroup {
            name: g.name.clone(),
            members: g.members.iter().filter_map(|d| new_index.get(d).copied()).collect(),
        })
        .collect();
    let agents = owners.iter().map(|&a| m.agent_name(a).into()).collect();
    Ok(Maid::from_parts(agents, vars, tables, groups))
}

/// A subgame is feasible iff its boundary instantiation has positive probability under some
/// profile; the uniform profile has full support, so it decides this.
pub fn is_feasible(m: &Maid, sd: &Subdiagram, z: &[usize]) -> Result<bool> {
    let profile = crate::policies::BehaviouralProfile::uniform(m);
    let bn = crate::inference::induced_bn(m, &profile)?;
    let evidence: Vec<(usize, usize)> = sd.boundary.iter().map(|v| v.0).zip(z.iter().copied()).collect();
    Ok(!bn.probability_of(&evidence).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Dag {
        let mut g = Dag::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    #[test]
    fn chain_is_blocked_by_middle() {
        let g = chain(3);
        assert!(d_separated(&g, &[0], &[2], &[1]));
        assert!(!d_separated(&g, &[0], &[2], &[]));
    }

    #[test]
    fn collider_opens_when_observed() {
        let mut g = Dag::new(3);
        g.add_edge(0, 2);
        g.add_edge(1, 2);
        assert!(d_separated(&g, &[0], &[1], &[]));
        assert!(!d_separated(&g, &[0], &[1], &[2]));
    }

    #[test]
    fn collider_opens_via_observed_descendant() {
        let mut g = Dag::new(4);
        g.add_edge(0, 2);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        assert!(!d_separated(&g, &[0], &[1], &[3]));
    }

    #[test]
    fn chain_width_one() {
        let mut adj = vec![BTreeSet::new(); 5];
        for i in 1..5 {
            adj[i - 1].insert(i);
            adj[i].insert(i - 1);
        }
        assert_eq!(min_fill(&adj).0, 1);
    }

    #[test]
    fn cycle_finder_sees_self_loops() {
        let mut adj = vec![BTreeSet::new(); 2];
        adj[1].insert(1);
        assert_eq!(find_cycle(&adj, &[true, true]), Some(vec![1]));
        assert!(acyclic(&adj, &[true, false]));
    }
}
