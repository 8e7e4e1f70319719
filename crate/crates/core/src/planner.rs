use crate::domain::{describe_plan, goal_satisfied, ActionStep, AgentId, Domain, Encounter, Goal, JointPlan};
use crate::error::{EngineError, Result};
use crate::num::{fmt_q, min_q, zero, Q};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

pub const DEFAULT_LABEL_BUDGET: usize = 1_000_000;
pub const BUDGET_ENV: &str = "SODNEG_BUDGET";

/// Upper bound on labels (or nodes) a single search may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_labels: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_labels: DEFAULT_LABEL_BUDGET }
    }
}

impl SearchBudget {
    pub fn new(max_labels: usize) -> Self {
        SearchBudget { max_labels }
    }

    /// The default, overridden by the environment variable when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(SearchBudget::new)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct SoloPlan<D: Domain> {
    pub cost: Q,
    pub plan: JointPlan<D::Action>,
    pub final_state: D::State,
}

/// Uniform-cost search for the cheapest plan in which only `agent` acts.
pub fn solo_search<D: Domain>(
    domain: &D,
    start: &D::State,
    agent: AgentId,
    is_target: impl Fn(&D::State) -> bool,
    budget: SearchBudget,
) -> Result<Option<SoloPlan<D>>> {
    let mut dist: HashMap<D::State, Q> = HashMap::new();
    let mut parent: HashMap<D::State, (D::State, ActionStep<D::Action>)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(start.clone(), zero());
    heap.push(Reverse((zero(), start.clone())));
    while let Some(Reverse((cost, state))) = heap.pop() {
        if dist.get(&state).is_some_and(|d| *d < cost) {
            continue;
        }
        if is_target(&state) {
            let mut steps = Vec::new();
            let mut cur = state.clone();
            while let Some((prev, step)) = parent.get(&cur) {
                steps.push(step.clone());
                cur = prev.clone();
            }
            steps.reverse();
            let plan = JointPlan { agent_count: domain.agent_count(), steps };
            return Ok(Some(SoloPlan { cost, plan, final_state: state }));
        }
        for (step, next) in domain.solo_successors(&state, agent) {
            let c = cost + domain.step_cost(&step)[agent.index()];
            if dist.get(&next).is_some_and(|d| *d <= c) {
                continue;
            }
            if dist.len() >= budget.max_labels {
                return Err(EngineError::BudgetExceeded { limit: budget.max_labels });
            }
            dist.insert(next.clone(), c);
            parent.insert(next.clone(), (state.clone(), step));
            heap.push(Reverse((c, next)));
        }
    }
    Ok(None)
}

/// Cost of the cheapest one-agent plan to the goal; `None` stands for unreachable.
pub fn stand_alone_cost<D: Domain>(
    domain: &D,
    start: &D::State,
    goal: &Goal<D::Atom>,
    agent: AgentId,
    budget: SearchBudget,
) -> Result<Option<Q>> {
    Ok(solo_search(domain, start, agent, |s| goal_satisfied(domain, goal, s), budget)?.map(|p| p.cost))
}

pub(crate) fn dominates_weakly(a: &[Q; 2], b: &[Q; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1]
}

pub(crate) fn dominates_strictly(a: &[Q; 2], b: &[Q; 2]) -> bool {
    dominates_weakly(a, b) && a != b
}

struct LabelRec<A> {
    cost: [Q; 2],
    state: usize,
    parent: Option<usize>,
    step: Option<ActionStep<A>>,
    alive: bool,
}

/// Per-state Pareto label sets produced by one multi-objective search.
pub struct LabelSpace<D: Domain> {
    pub states: Vec<D::State>,
    labels: Vec<LabelRec<D::Action>>,
    per_state: Vec<Vec<usize>>,
    agent_count: usize,
}

impl<D: Domain> LabelSpace<D> {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Surviving (label id, cost) pairs at a state.
    pub fn labels_at(&self, state: usize) -> Vec<(usize, [Q; 2])> {
        self.per_state[state]
            .iter()
            .filter(|&&l| self.labels[l].alive)
            .map(|&l| (l, self.labels[l].cost))
            .collect()
    }

    pub fn plan(&self, label: usize) -> JointPlan<D::Action> {
        let mut steps = Vec::new();
        let mut cur = Some(label);
        while let Some(l) = cur {
            let rec = &self.labels[l];
            if let Some(s) = &rec.step {
                steps.push(s.clone());
            }
            cur = rec.parent;
        }
        steps.reverse();
        JointPlan { agent_count: self.agent_count, steps }
    }
}

pub struct MoOptions<'a, S> {
    pub target: Option<&'a dyn Fn(&S) -> bool>,
    pub cost_budget: Option<Q>,
    pub budget: SearchBudget,
}

/// Bi-objective label-setting search over role costs from `start`.
/// Labels are expanded in lexicographic (total, cost of agent 1) order, so an
/// expanded label is never dominated by one found later.
pub fn mo_search<D: Domain>(domain: &D, start: &D::State, opts: MoOptions<'_, D::State>) -> Result<LabelSpace<D>> {
    if domain.agent_count() != 2 {
        return Err(EngineError::AgentCount(domain.agent_count()));
    }
    let mut space = LabelSpace::<D> {
        states: vec![start.clone()],
        labels: vec![LabelRec { cost: [zero(), zero()], state: 0, parent: None, step: None, alive: true }],
        per_state: vec![vec![0]],
        agent_count: 2,
    };
    let mut index: HashMap<D::State, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut target_front: Vec<[Q; 2]> = Vec::new();
    let is_target = |s: &D::State| opts.target.is_some_and(|t| t(s));
    if is_target(start) {
        target_front.push([zero(), zero()]);
    }
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((zero(), zero(), 0usize)));
    while let Some(Reverse((_, _, l))) = heap.pop() {
        if !space.labels[l].alive {
            continue;
        }
        let cost = space.labels[l].cost;
        if target_front.iter().any(|t| dominates_strictly(t, &cost)) {
            space.labels[l].alive = false;
            continue;
        }
        let state = space.states[space.labels[l].state].clone();
        for (step, next) in domain.joint_successors(&state) {
            let sc = domain.step_cost(&step);
            let nc = [cost[0] + sc[0], cost[1] + sc[1]];
            if let Some(b) = opts.cost_budget {
                if nc[0] + nc[1] > b {
                    continue;
                }
            }
            if target_front.iter().any(|t| dominates_strictly(t, &nc)) {
                continue;
            }
            let si = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = space.states.len();
                    index.insert(next.clone(), i);
                    space.states.push(next.clone());
                    space.per_state.push(Vec::new());
                    i
                }
            };
            let existing = &space.per_state[si];
            if existing.iter().any(|&e| space.labels[e].alive && dominates_weakly(&space.labels[e].cost, &nc)) {
                continue;
            }
            for &e in existing {
                if space.labels[e].alive && dominates_strictly(&nc, &space.labels[e].cost) {
                    space.labels[e].alive = false;
                }
            }
            if space.labels.len() >= opts.budget.max_labels {
                return Err(EngineError::BudgetExceeded { limit: opts.budget.max_labels });
            }
            let id = space.labels.len();
            space.labels.push(LabelRec { cost: nc, state: si, parent: Some(l), step: Some(step), alive: true });
            space.per_state[si].retain(|&e| space.labels[e].alive);
            space.per_state[si].push(id);
            if is_target(&next) {
                target_front.retain(|t| !dominates_strictly(&nc, t));
                if !target_front.contains(&nc) {
                    target_front.push(nc);
                }
            }
            heap.push(Reverse((nc[0] + nc[1], nc[0], id)));
        }
    }
    Ok(space)
}

#[derive(Debug, Clone)]
pub struct FrontierPoint<D: Domain> {
    pub cost: [Q; 2],
    pub plan: JointPlan<D::Action>,
    pub final_state: D::State,
}

#[derive(Debug, Clone)]
pub struct RoleFrontier<D: Domain> {
    pub target: String,
    pub points: Vec<FrontierPoint<D>>,
}

impl<D: Domain> RoleFrontier<D> {
    pub fn costs(&self) -> Vec<[Q; 2]> {
        self.points.iter().map(|p| p.cost).collect()
    }
}

/// Pareto frontier over labels at target states. Among witnesses of equal cost
/// the highest `rank` wins, then the lexicographically smallest plan text.
pub fn frontier_from_space<D: Domain>(
    domain: &D,
    space: &LabelSpace<D>,
    is_target: impl Fn(&D::State) -> bool,
    rank: impl Fn(&D::State) -> u32,
) -> Vec<FrontierPoint<D>> {
    let mut cands: Vec<(usize, [Q; 2])> = Vec::new();
    for (si, s) in space.states.iter().enumerate() {
        if is_target(s) {
            cands.extend(space.labels_at(si));
        }
    }
    let costs: Vec<[Q; 2]> = cands.iter().map(|c| c.1).collect();
    let mut best: Vec<([Q; 2], usize, u32, Option<String>)> = Vec::new();
    for (l, c) in cands {
        if costs.iter().any(|o| dominates_strictly(o, &c)) {
            continue;
        }
        let r = rank(&space.states[space.labels[l].state]);
        match best.iter_mut().find(|b| b.0 == c) {
            None => best.push((c, l, r, None)),
            Some(b) => {
                if r > b.2 {
                    *b = (c, l, r, None);
                } else if r == b.2 {
                    let text_b = b.3.get_or_insert_with(|| describe_plan(domain, &space.plan(b.1)).join(";")).clone();
                    let text_l = describe_plan(domain, &space.plan(l)).join(";");
                    if text_l < text_b {
                        *b = (c, l, r, Some(text_l));
                    }
                }
            }
        }
    }
    best.sort_by_key(|a| a.0);
    best.into_iter()
        .map(|(cost, l, _, _)| FrontierPoint {
            cost,
            plan: space.plan(l),
            final_state: space.states[space.labels[l].state].clone(),
        })
        .collect()
}

/// Complete Pareto frontier of role costs for reaching the target.
pub fn joint_frontier<D: Domain>(
    domain: &D,
    start: &D::State,
    target: &Goal<D::Atom>,
    budget: SearchBudget,
) -> Result<RoleFrontier<D>> {
    let pred = |s: &D::State| goal_satisfied(domain, target, s);
    joint_frontier_by(domain, start, &pred, &|_| 0, budget, crate::domain::describe_goal(domain, target))
}

pub fn joint_frontier_by<D: Domain>(
    domain: &D,
    start: &D::State,
    is_target: &dyn Fn(&D::State) -> bool,
    rank: &dyn Fn(&D::State) -> u32,
    budget: SearchBudget,
    label: String,
) -> Result<RoleFrontier<D>> {
    let space = mo_search(domain, start, MoOptions { target: Some(is_target), cost_budget: None, budget })?;
    let points = frontier_from_space(domain, &space, is_target, rank);
    if points.is_empty() {
        return Err(EngineError::EmptyFrontier(label));
    }
    Ok(RoleFrontier { target: label, points })
}

/// All states reachable by joint plans of total cost within `cost_budget`, each with its frontier.
pub fn reachable_states<D: Domain>(
    domain: &D,
    start: &D::State,
    cost_budget: Q,
    budget: SearchBudget,
) -> Result<Vec<(D::State, RoleFrontier<D>)>> {
    let space = mo_search(domain, start, MoOptions { target: None, cost_budget: Some(cost_budget), budget })?;
    let mut out = Vec::new();
    for (si, s) in space.states.iter().enumerate() {
        let mut labels = space.labels_at(si);
        if labels.is_empty() {
            continue;
        }
        labels.sort_by_key(|a| a.1);
        let points = labels
            .into_iter()
            .map(|(l, cost)| FrontierPoint { cost, plan: space.plan(l), final_state: s.clone() })
            .collect();
        out.push((s.clone(), RoleFrontier { target: domain.encode(s), points }));
    }
    out.sort_by_key(|a| domain.encode(&a.0));
    Ok(out)
}

/// Common knowledge of the worth game: stand-alone costs, minimal total cost T,
/// minimal role M_r among total-T plans, and the frontier of role splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicProfile {
    #[serde(with = "crate::num::vec_opt_string")]
    pub c: Vec<Option<Q>>,
    #[serde(with = "crate::num::as_string")]
    pub t: Q,
    #[serde(with = "crate::num::as_string")]
    pub m_r: Q,
    #[serde(with = "points_serde")]
    pub frontier: Vec<[Q; 2]>,
}

impl PublicProfile {
    pub fn from_points(c: [Option<Q>; 2], points: Vec<[Q; 2]>) -> Result<Self> {
        let t = points
            .iter()
            .map(|p| p[0] + p[1])
            .min()
            .ok_or_else(|| EngineError::EmptyFrontier("joint goal".into()))?;
        let m_r = points
            .iter()
            .filter(|p| p[0] + p[1] == t)
            .map(|p| min_q(p[0], p[1]))
            .min()
            .unwrap();
        Ok(PublicProfile { c: c.to_vec(), t, m_r, frontier: points })
    }

    /// A profile known only by its numbers: role splits (M_r, T − M_r) and its mirror.
    pub fn abstract_profile(c1: Q, c2: Q, t: Q, m_r: Q) -> Self {
        let mut frontier = vec![[m_r, t - m_r], [t - m_r, m_r]];
        frontier.sort();
        frontier.dedup();
        PublicProfile { c: vec![Some(c1), Some(c2)], t, m_r, frontier }
    }

    pub fn cost(&self, i: usize) -> Option<Q> {
        self.c[i]
    }

    pub fn summary(&self) -> String {
        let c: Vec<String> = self.c.iter().map(|x| x.map(|x| fmt_q(&x)).unwrap_or_else(|| "inf".into())).collect();
        let f: Vec<String> = self.frontier.iter().map(|p| format!("({},{})", fmt_q(&p[0]), fmt_q(&p[1]))).collect();
        format!("c=({}) T={} M_r={} frontier={{{}}}", c.join(","), fmt_q(&self.t), fmt_q(&self.m_r), f.join(","))
    }
}

mod points_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct P(#[serde(with = "crate::num::pair_string")] [Q; 2]);

    pub fn serialize<S: Serializer>(x: &[[Q; 2]], s: S) -> std::result::Result<S::Ok, S::Error> {
        x.iter().map(|p| P(*p)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<[Q; 2]>, D::Error> {
        Ok(Vec::<P>::deserialize(d)?.into_iter().map(|p| p.0).collect())
    }
}

pub fn public_profile<D: Domain>(domain: &D, enc: &Encounter<D>, budget: SearchBudget) -> Result<PublicProfile> {
    if enc.goals.len() != 2 {
        return Err(EngineError::AgentCount(enc.goals.len()));
    }
    let c1 = stand_alone_cost(domain, &enc.initial, &enc.goals[0], AgentId(0), budget)?;
    let c2 = stand_alone_cost(domain, &enc.initial, &enc.goals[1], AgentId(1), budget)?;
    let both = enc.goals[0].and(&enc.goals[1]);
    let frontier = joint_frontier(domain, &enc.initial, &both, budget)?;
    PublicProfile::from_points([c1, c2], frontier.costs())
}
