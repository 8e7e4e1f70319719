//! Domain-independent view of a two-agent encounter used by the mechanisms.

use crate::domain::{describe_plan, goal_satisfied, ActionStep, AgentId, Domain, Goal, JointPlan};
use crate::error::{EngineError, Result};
use crate::num::{zero, Q};
use crate::planner::{dominates_strictly, frontier_from_space, mo_search, MoOptions, SearchBudget, SoloPlan};
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Own(usize),
    Joint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub steps: Vec<String>,
    pub final_state: String,
}

/// A frontier point with flags describing where its witness ends.
#[derive(Debug, Clone)]
pub struct CandidatePoint {
    pub cost: [Q; 2],
    /// Whether the final state satisfies each agent's (declared) goal.
    pub lands: [bool; 2],
    /// Whether the final state satisfies the observer goal, when one is set.
    pub observed: bool,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiWitness {
    pub t: String,
    pub steps: Vec<String>,
    pub wins: [Vec<String>; 2],
}

/// One way to cooperate up to an intermediate state before the coin.
#[derive(Debug, Clone)]
pub struct SemiLabel {
    pub cost: [Q; 2],
    /// Stand-alone cost for each agent to finish its goal from t.
    pub remaining: [Option<Q>; 2],
    /// `spill[i]`: the final state reached when the opponent of i wins also satisfies G_i.
    pub spill: [bool; 2],
    /// `observed[k]`: the final state reached when agent k wins satisfies the observer goal.
    pub observed: [bool; 2],
    pub witness: SemiWitness,
}

impl SemiLabel {
    fn dominates(&self, other: &SemiLabel) -> bool {
        let le = |a: &Option<Q>, b: &Option<Q>| match (a, b) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x <= y,
        };
        self.cost[0] <= other.cost[0]
            && self.cost[1] <= other.cost[1]
            && le(&self.remaining[0], &other.remaining[0])
            && le(&self.remaining[1], &other.remaining[1])
            && (0..2).all(|i| self.spill[i] >= other.spill[i] && self.observed[i] >= other.observed[i])
    }

    fn key(&self) -> ([Q; 2], [Option<Q>; 2], [bool; 2], [bool; 2]) {
        (self.cost, self.remaining, self.spill, self.observed)
    }
}

/// Keeps labels not weakly dominated by an earlier-kept or strictly better label.
pub fn prune_semi(mut labels: Vec<SemiLabel>) -> Vec<SemiLabel> {
    labels.sort_by(|a, b| {
        let sa = a.cost[0] + a.cost[1];
        let sb = b.cost[0] + b.cost[1];
        sa.cmp(&sb).then_with(|| a.cost.cmp(&b.cost))
    });
    let mut kept: Vec<SemiLabel> = Vec::new();
    for l in labels {
        if kept.iter().any(|k| k.dominates(&l)) {
            continue;
        }
        kept.retain(|k| !(l.dominates(k) && l.key() != k.key()));
        kept.push(l);
    }
    kept
}

/// Planning oracle over an encounter with declared goals and an optional observer goal.
pub trait Arena {
    fn stand_alone(&self, agent: usize) -> Result<Option<Q>>;
    fn start_satisfies(&self) -> [bool; 2];
    fn start_observed(&self) -> bool;
    /// Pareto frontier of role costs; among equal costs the witness landing in more goals wins.
    fn frontier(&self, target: Target) -> Result<Vec<CandidatePoint>>;
    /// Pruned intermediate-state labels with joint cost within `cost_budget`.
    fn semi_labels(&self, cost_budget: Q) -> Result<Vec<SemiLabel>>;
    /// Some state reachable by `agent` alone satisfies both its declared goal and the observer goal.
    fn declared_meets_observer(&self, agent: usize) -> Result<bool>;
}

/// Arena over one explicit state space.
pub struct SearchArena<D: Domain> {
    pub domain: D,
    pub start: D::State,
    pub goals: [Goal<D::Atom>; 2],
    pub observer: Option<Goal<D::Atom>>,
    pub budget: SearchBudget,
}

impl<D: Domain> SearchArena<D> {
    pub fn new(domain: D, start: D::State, goals: [Goal<D::Atom>; 2], budget: SearchBudget) -> Self {
        SearchArena { domain, start, goals, observer: None, budget }
    }

    pub fn with_observer(mut self, observer: Goal<D::Atom>) -> Self {
        self.observer = Some(observer);
        self
    }

    fn sat(&self, i: usize, s: &D::State) -> bool {
        goal_satisfied(&self.domain, &self.goals[i], s)
    }

    fn obs(&self, s: &D::State) -> bool {
        self.observer.as_ref().is_some_and(|g| goal_satisfied(&self.domain, g, s))
    }

    fn witness(&self, plan: &JointPlan<D::Action>, end: &D::State) -> Witness {
        Witness { steps: describe_plan(&self.domain, plan), final_state: self.domain.encode(end) }
    }

    /// Cheapest solo plan for `agent` to `preds[0]`, plus for each further
    /// predicate (each implying the first) a plan of that same cost ending in it.
    fn solo_ties(
        &self,
        start: &D::State,
        agent: AgentId,
        preds: &[&dyn Fn(&D::State) -> bool],
    ) -> Result<Vec<Option<SoloPlan<D>>>> {
        let d = &self.domain;
        let mut found: Vec<Option<SoloPlan<D>>> = (0..preds.len()).map(|_| None).collect();
        let mut dist: HashMap<D::State, Q> = HashMap::new();
        let mut parent: HashMap<D::State, (D::State, ActionStep<D::Action>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(start.clone(), zero());
        heap.push(Reverse((zero(), start.clone())));
        let mut bound: Option<Q> = None;
        while let Some(Reverse((cost, state))) = heap.pop() {
            if dist.get(&state).is_some_and(|x| *x < cost) {
                continue;
            }
            if bound.is_some_and(|b| cost > b) {
                break;
            }
            if preds[0](&state) {
                bound.get_or_insert(cost);
                for (k, p) in preds.iter().enumerate() {
                    if found[k].is_none() && p(&state) {
                        let mut steps = Vec::new();
                        let mut cur = state.clone();
                        while let Some((prev, step)) = parent.get(&cur) {
                            steps.push(step.clone());
                            cur = prev.clone();
                        }
                        steps.reverse();
                        let plan = JointPlan { agent_count: d.agent_count(), steps };
                        found[k] = Some(SoloPlan { cost, plan, final_state: state.clone() });
                    }
                }
                if found.iter().all(Option::is_some) {
                    break;
                }
            }
            for (step, next) in d.solo_successors(&state, agent) {
                let c = cost + d.step_cost(&step)[agent.index()];
                if dist.get(&next).is_some_and(|x| *x <= c) {
                    continue;
                }
                if dist.len() >= self.budget.max_labels {
                    return Err(EngineError::BudgetExceeded { limit: self.budget.max_labels });
                }
                dist.insert(next.clone(), c);
                parent.insert(next.clone(), (state.clone(), step));
                heap.push(Reverse((c, next)));
            }
        }
        Ok(found)
    }

    /// Remaining cost, benevolent spill flag and observer flag when agent `k` wins at `t`.
    fn win_branch(&self, t: &D::State, k: usize) -> Result<(Option<Q>, bool, bool, Vec<String>)> {
        let j = 1 - k;
        let own = |s: &D::State| self.sat(k, s);
        let both = |s: &D::State| self.sat(k, s) && self.sat(j, s);
        let own_obs = |s: &D::State| self.sat(k, s) && self.obs(s);
        let both_obs = |s: &D::State| self.sat(k, s) && self.sat(j, s) && self.obs(s);
        let found = self.solo_ties(t, AgentId(k), &[&own, &both, &own_obs, &both_obs])?;
        let Some(base) = &found[0] else {
            return Ok((None, false, false, Vec::new()));
        };
        let spill = found[1].is_some();
        let pick = if spill {
            found[3].as_ref().or(found[1].as_ref())
        } else {
            found[2].as_ref().or(found[0].as_ref())
        }
        .unwrap_or(base);
        let observed = self.obs(&pick.final_state);
        Ok((Some(base.cost), spill, observed, describe_plan(&self.domain, &pick.plan)))
    }
}

impl<D: Domain> Arena for SearchArena<D> {
    fn stand_alone(&self, agent: usize) -> Result<Option<Q>> {
        let found = self.solo_ties(&self.start, AgentId(agent), &[&|s: &D::State| self.sat(agent, s)])?;
        Ok(found[0].as_ref().map(|p| p.cost))
    }

    fn start_satisfies(&self) -> [bool; 2] {
        [self.sat(0, &self.start), self.sat(1, &self.start)]
    }

    fn start_observed(&self) -> bool {
        self.obs(&self.start)
    }

    fn frontier(&self, target: Target) -> Result<Vec<CandidatePoint>> {
        let pred = |s: &D::State| match target {
            Target::Own(i) => self.sat(i, s),
            Target::Joint => self.sat(0, s) && self.sat(1, s),
        };
        let rank = |s: &D::State| 2 * (u32::from(self.sat(0, s)) + u32::from(self.sat(1, s))) + u32::from(self.obs(s));
        let space = mo_search(
            &self.domain,
            &self.start,
            MoOptions { target: Some(&pred), cost_budget: None, budget: self.budget },
        )?;
        let points = frontier_from_space(&self.domain, &space, pred, rank);
        Ok(points
            .into_iter()
            .map(|p| CandidatePoint {
                cost: p.cost,
                lands: [self.sat(0, &p.final_state), self.sat(1, &p.final_state)],
                observed: self.obs(&p.final_state),
                witness: self.witness(&p.plan, &p.final_state),
            })
            .collect())
    }

    fn declared_meets_observer(&self, agent: usize) -> Result<bool> {
        let both = |s: &D::State| self.sat(agent, s) && self.obs(s);
        Ok(self.solo_ties(&self.start, AgentId(agent), &[&both])?[0].is_some())
    }

    fn semi_labels(&self, cost_budget: Q) -> Result<Vec<SemiLabel>> {
        let space = mo_search(
            &self.domain,
            &self.start,
            MoOptions { target: None, cost_budget: Some(cost_budget), budget: self.budget },
        )?;
        let mut raw = Vec::new();
        for (si, t) in space.states.iter().enumerate() {
            let labels = space.labels_at(si);
            if labels.is_empty() {
                continue;
            }
            let (r0, s1, o0, w0) = self.win_branch(t, 0)?;
            let (r1, s0, o1, w1) = self.win_branch(t, 1)?;
            let t_text = self.domain.encode(t);
            for (l, cost) in labels {
                raw.push(SemiLabel {
                    cost,
                    remaining: [r0, r1],
                    spill: [s0, s1],
                    observed: [o0, o1],
                    witness: SemiWitness {
                        t: t_text.clone(),
                        steps: describe_plan(&self.domain, &space.plan(l)),
                        wins: [w0.clone(), w1.clone()],
                    },
                });
            }
        }
        Ok(prune_semi(raw))
    }
}

/// Independent sub-encounters played side by side; costs add and goals conjoin.
pub struct CompositeArena {
    pub parts: Vec<Box<dyn Arena>>,
}

fn tag(k: usize, steps: &[String]) -> impl Iterator<Item = String> + '_ {
    steps.iter().map(move |s| format!("[{}] {}", k + 1, s))
}

fn add_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    Some(a? + b?)
}

impl Arena for CompositeArena {
    fn stand_alone(&self, agent: usize) -> Result<Option<Q>> {
        let mut total = Some(zero());
        for p in &self.parts {
            total = add_opt(total, p.stand_alone(agent)?);
        }
        Ok(total)
    }

    fn start_satisfies(&self) -> [bool; 2] {
        let mut out = [true, true];
        for p in &self.parts {
            let s = p.start_satisfies();
            out[0] &= s[0];
            out[1] &= s[1];
        }
        out
    }

    fn start_observed(&self) -> bool {
        self.parts.iter().all(|p| p.start_observed())
    }

    fn frontier(&self, target: Target) -> Result<Vec<CandidatePoint>> {
        let rank = |c: &CandidatePoint| 2 * (u32::from(c.lands[0]) + u32::from(c.lands[1])) + u32::from(c.observed);
        let mut acc = vec![CandidatePoint {
            cost: [zero(), zero()],
            lands: [true, true],
            observed: true,
            witness: Witness { steps: Vec::new(), final_state: String::new() },
        }];
        for (k, part) in self.parts.iter().enumerate() {
            let pts = part.frontier(target)?;
            let mut next: Vec<CandidatePoint> = Vec::new();
            for a in &acc {
                for b in &pts {
                    let mut steps = a.witness.steps.clone();
                    steps.extend(tag(k, &b.witness.steps));
                    let final_state = if k == 0 {
                        b.witness.final_state.clone()
                    } else {
                        format!("{} || {}", a.witness.final_state, b.witness.final_state)
                    };
                    next.push(CandidatePoint {
                        cost: [a.cost[0] + b.cost[0], a.cost[1] + b.cost[1]],
                        lands: [a.lands[0] && b.lands[0], a.lands[1] && b.lands[1]],
                        observed: a.observed && b.observed,
                        witness: Witness { steps, final_state },
                    });
                }
            }
            let costs: Vec<[Q; 2]> = next.iter().map(|c| c.cost).collect();
            let mut kept: Vec<CandidatePoint> = Vec::new();
            for c in next {
                if costs.iter().any(|o| dominates_strictly(o, &c.cost)) {
                    continue;
                }
                match kept.iter_mut().find(|x| x.cost == c.cost) {
                    Some(x) => {
                        if rank(&c) > rank(x) {
                            *x = c;
                        }
                    }
                    None => kept.push(c),
                }
            }
            kept.sort_by_key(|a| a.cost);
            acc = kept;
        }
        Ok(acc)
    }

    fn declared_meets_observer(&self, agent: usize) -> Result<bool> {
        for p in &self.parts {
            if !p.declared_meets_observer(agent)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn semi_labels(&self, cost_budget: Q) -> Result<Vec<SemiLabel>> {
        let mut acc = vec![SemiLabel {
            cost: [zero(), zero()],
            remaining: [Some(zero()), Some(zero())],
            spill: [true, true],
            observed: [true, true],
            witness: SemiWitness { t: String::new(), steps: Vec::new(), wins: [Vec::new(), Vec::new()] },
        }];
        for (k, part) in self.parts.iter().enumerate() {
            let labels = part.semi_labels(cost_budget)?;
            let mut next = Vec::new();
            for a in &acc {
                for b in &labels {
                    let cost = [a.cost[0] + b.cost[0], a.cost[1] + b.cost[1]];
                    if cost[0] + cost[1] > cost_budget {
                        continue;
                    }
                    let mut steps = a.witness.steps.clone();
                    steps.extend(tag(k, &b.witness.steps));
                    let wins = [0, 1].map(|i| {
                        let mut w = a.witness.wins[i].clone();
                        w.extend(tag(k, &b.witness.wins[i]));
                        w
                    });
                    let t = if k == 0 { b.witness.t.clone() } else { format!("{} || {}", a.witness.t, b.witness.t) };
                    next.push(SemiLabel {
                        cost,
                        remaining: [add_opt(a.remaining[0], b.remaining[0]), add_opt(a.remaining[1], b.remaining[1])],
                        spill: [a.spill[0] && b.spill[0], a.spill[1] && b.spill[1]],
                        observed: [a.observed[0] && b.observed[0], a.observed[1] && b.observed[1]],
                        witness: SemiWitness { t, steps, wins },
                    });
                }
            }
            acc = prune_semi(next);
        }
        Ok(acc)
    }
}
