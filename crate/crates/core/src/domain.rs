use crate::error::{EngineError, Result};
use crate::num::{zero, Q};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::hash::Hash;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub usize);

impl AgentId {
    pub fn index(self) -> usize {
        self.0
    }

    /// Opponent in a two-agent encounter.
    pub fn other(self) -> AgentId {
        AgentId(1 - self.0)
    }
}

pub type CostVector = Vec<Q>;

/// One step of a joint plan. `None` is an explicit no-op.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionStep<A> {
    pub slots: Vec<Option<A>>,
}

impl<A: Clone> ActionStep<A> {
    pub fn solo(agent_count: usize, agent: AgentId, action: A) -> Self {
        let mut slots = vec![None; agent_count];
        slots[agent.index()] = Some(action);
        ActionStep { slots }
    }

    pub fn all(actions: Vec<A>) -> Self {
        ActionStep { slots: actions.into_iter().map(Some).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointPlan<A> {
    pub agent_count: usize,
    pub steps: Vec<ActionStep<A>>,
}

impl<A: Clone> JointPlan<A> {
    /// The empty plan.
    pub fn empty(agent_count: usize) -> Self {
        JointPlan { agent_count, steps: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn then(mut self, other: &JointPlan<A>) -> Self {
        self.steps.extend(other.steps.iter().cloned());
        self
    }
}

/// A state oriented domain: states, per-agent actions with costs, and goal atoms.
pub trait Domain {
    type State: Clone + Eq + Hash + Ord + Debug;
    type Action: Clone + Eq + Hash + Ord + Debug;
    type Atom: Clone + PartialEq + Debug;

    fn agent_count(&self) -> usize;

    fn action_cost(&self, action: &Self::Action) -> Q;

    /// Executes one step or explains which precondition fails.
    fn apply_step(
        &self,
        state: &Self::State,
        step: &ActionStep<Self::Action>,
    ) -> std::result::Result<Self::State, String>;

    fn joint_successors(&self, state: &Self::State) -> Vec<(ActionStep<Self::Action>, Self::State)>;

    /// Steps in which only `agent` does anything costly.
    fn solo_successors(
        &self,
        state: &Self::State,
        agent: AgentId,
    ) -> Vec<(ActionStep<Self::Action>, Self::State)>;

    fn holds(&self, atom: &Self::Atom, state: &Self::State) -> bool;

    fn encode(&self, state: &Self::State) -> String;

    fn describe_action(&self, action: &Self::Action) -> String;

    fn describe_atom(&self, atom: &Self::Atom) -> String;

    fn step_cost(&self, step: &ActionStep<Self::Action>) -> CostVector {
        step.slots
            .iter()
            .map(|a| a.as_ref().map(|a| self.action_cost(a)).unwrap_or_else(zero))
            .collect()
    }

    fn describe_step(&self, step: &ActionStep<Self::Action>) -> String {
        let parts: Vec<String> = step
            .slots
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.as_ref().map(|a| format!("A{}:{}", i + 1, self.describe_action(a))))
            .collect();
        if parts.is_empty() {
            "idle".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// A goal in disjunctive normal form. The empty conjunction is always true;
/// an empty disjunction is never satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct Goal<T> {
    pub any: Vec<Vec<T>>,
}

impl<T: Clone> Goal<T> {
    pub fn all(atoms: Vec<T>) -> Self {
        Goal { any: vec![atoms] }
    }

    pub fn anything() -> Self {
        Goal { any: vec![Vec::new()] }
    }

    pub fn nothing() -> Self {
        Goal { any: Vec::new() }
    }

    pub fn or(goals: Vec<Goal<T>>) -> Self {
        Goal { any: goals.into_iter().flat_map(|g| g.any).collect() }
    }

    /// Conjunction of two goals, distributed back into normal form.
    pub fn and(&self, other: &Goal<T>) -> Self {
        let mut any = Vec::new();
        for a in &self.any {
            for b in &other.any {
                let mut c = a.clone();
                c.extend(b.iter().cloned());
                any.push(c);
            }
        }
        Goal { any }
    }
}

pub fn goal_satisfied<D: Domain>(domain: &D, goal: &Goal<D::Atom>, state: &D::State) -> bool {
    goal.any.iter().any(|conj| conj.iter().all(|a| domain.holds(a, state)))
}

pub fn describe_goal<D: Domain>(domain: &D, goal: &Goal<D::Atom>) -> String {
    if goal.any.is_empty() {
        return "false".to_string();
    }
    let conj: Vec<String> = goal
        .any
        .iter()
        .map(|c| {
            if c.is_empty() {
                "true".to_string()
            } else {
                c.iter().map(|a| domain.describe_atom(a)).collect::<Vec<_>>().join(" & ")
            }
        })
        .collect();
    if conj.len() == 1 {
        conj.into_iter().next().unwrap()
    } else {
        conj.iter().map(|c| format!("({c})")).collect::<Vec<_>>().join(" | ")
    }
}

#[derive(Debug, Clone)]
pub struct Encounter<D: Domain> {
    pub initial: D::State,
    pub goals: Vec<Goal<D::Atom>>,
    pub worths: Vec<Option<Q>>,
}

impl<D: Domain> Encounter<D> {
    pub fn new(initial: D::State, goals: Vec<Goal<D::Atom>>) -> Self {
        let n = goals.len();
        Encounter { initial, goals, worths: vec![None; n] }
    }

    pub fn with_worths(mut self, worths: Vec<Q>) -> Self {
        self.worths = worths.into_iter().map(Some).collect();
        self
    }
}

pub fn apply_plan<D: Domain>(
    domain: &D,
    start: &D::State,
    plan: &JointPlan<D::Action>,
) -> Result<D::State> {
    let mut state = start.clone();
    for (i, step) in plan.steps.iter().enumerate() {
        if step.slots.len() != plan.agent_count || plan.agent_count != domain.agent_count() {
            return Err(EngineError::InvalidPlan {
                step: i,
                reason: format!("step has {} slots for {} agents", step.slots.len(), domain.agent_count()),
            });
        }
        state = domain
            .apply_step(&state, step)
            .map_err(|reason| EngineError::InvalidPlan { step: i, reason })?;
    }
    Ok(state)
}

pub fn plan_cost<D: Domain>(domain: &D, plan: &JointPlan<D::Action>) -> CostVector {
    let mut total = vec![zero(); plan.agent_count];
    for step in &plan.steps {
        for (t, c) in total.iter_mut().zip(domain.step_cost(step)) {
            *t += c;
        }
    }
    total
}

/// Exchanges the two agents' slots in every step.
pub fn swap_roles<A: Clone>(plan: &JointPlan<A>) -> Result<JointPlan<A>> {
    if plan.agent_count != 2 {
        return Err(EngineError::RoleSwapUnsupported(plan.agent_count));
    }
    let steps = plan
        .steps
        .iter()
        .map(|s| ActionStep { slots: vec![s.slots[1].clone(), s.slots[0].clone()] })
        .collect();
    Ok(JointPlan { agent_count: 2, steps })
}

pub fn describe_plan<D: Domain>(domain: &D, plan: &JointPlan<D::Action>) -> Vec<String> {
    plan.steps.iter().map(|s| domain.describe_step(s)).collect()
}
