use crate::domain::{ActionStep, AgentId, Domain};
use crate::error::{EngineError, Result};
use crate::num::{q, zero, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Use,
    Wait,
    Nop,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Use => "Use",
            Op::Wait => "Wait",
            Op::Nop => "NOP",
        }
    }
}

/// Each agent's current operation and the resource units it has completed.
/// A unit counts once the tick that used it is over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SharedState {
    pub ops: Vec<Op>,
    pub usage: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SharedAtom {
    /// Target usage reached and currently idle.
    Done(usize),
}

#[derive(Debug, Clone)]
pub struct SharedResource {
    pub capacity: usize,
    pub targets: Vec<u32>,
}

impl SharedResource {
    pub fn new(capacity: usize, targets: Vec<u32>) -> Self {
        SharedResource { capacity, targets }
    }

    pub fn start(&self) -> SharedState {
        let n = self.targets.len();
        SharedState { ops: vec![Op::Nop; n], usage: vec![0; n] }
    }

    /// Advances one synchronous tick.
    pub fn tick(&self, state: &SharedState, ops: &[Op]) -> Result<(Vec<Q>, SharedState)> {
        self.try_tick(state, ops).map_err(|e| match e {
            TickError::Capacity(used) => EngineError::CapacityViolation { used, capacity: self.capacity },
            TickError::Other(reason) => EngineError::InvalidPlan { step: 0, reason },
        })
    }

    fn try_tick(&self, state: &SharedState, ops: &[Op]) -> std::result::Result<(Vec<Q>, SharedState), TickError> {
        let n = self.targets.len();
        if ops.len() != n {
            return Err(TickError::Other(format!("{} operations for {} agents", ops.len(), n)));
        }
        let used = ops.iter().filter(|o| **o == Op::Use).count();
        if used > self.capacity {
            return Err(TickError::Capacity(used));
        }
        let mut next = state.clone();
        let mut cost = vec![zero(); n];
        for i in 0..n {
            if state.ops[i] == Op::Use {
                next.usage[i] += 1;
            }
            if ops[i] != Op::Nop && next.usage[i] >= self.targets[i] {
                return Err(TickError::Other(format!("A{} has reached its target and may only NOP", i + 1)));
            }
            if ops[i] == Op::Wait {
                cost[i] = q(1);
            }
            next.ops[i] = ops[i];
        }
        Ok((cost, next))
    }

    fn legal_ops(&self, state: &SharedState, agent: usize) -> Vec<Op> {
        let done_after = state.usage[agent] + u32::from(state.ops[agent] == Op::Use) >= self.targets[agent];
        if done_after {
            vec![Op::Nop]
        } else {
            vec![Op::Use, Op::Wait, Op::Nop]
        }
    }
}

enum TickError {
    Capacity(usize),
    Other(String),
}

impl Domain for SharedResource {
    type State = SharedState;
    type Action = Op;
    type Atom = SharedAtom;

    fn agent_count(&self) -> usize {
        self.targets.len()
    }

    fn action_cost(&self, action: &Op) -> Q {
        if *action == Op::Wait {
            q(1)
        } else {
            zero()
        }
    }

    fn apply_step(&self, state: &SharedState, step: &ActionStep<Op>) -> std::result::Result<SharedState, String> {
        let ops: Vec<Op> = step.slots.iter().map(|o| o.unwrap_or(Op::Nop)).collect();
        match self.try_tick(state, &ops) {
            Ok((_, s)) => Ok(s),
            Err(TickError::Capacity(used)) => Err(format!("{used} agents use a resource of capacity {}", self.capacity)),
            Err(TickError::Other(r)) => Err(r),
        }
    }

    fn joint_successors(&self, state: &SharedState) -> Vec<(ActionStep<Op>, SharedState)> {
        let n = self.agent_count();
        let mut combos: Vec<Vec<Op>> = vec![Vec::new()];
        for i in 0..n {
            let legal = self.legal_ops(state, i);
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    legal.iter().map(move |o| {
                        let mut c = c.clone();
                        c.push(*o);
                        c
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .filter_map(|ops| self.try_tick(state, &ops).ok().map(|(_, s)| (ActionStep::all(ops), s)))
            .collect()
    }

    fn solo_successors(&self, state: &SharedState, agent: AgentId) -> Vec<(ActionStep<Op>, SharedState)> {
        let n = self.agent_count();
        self.legal_ops(state, agent.index())
            .into_iter()
            .filter_map(|o| {
                let mut ops = vec![Op::Nop; n];
                ops[agent.index()] = o;
                self.try_tick(state, &ops).ok().map(|(_, s)| (ActionStep::all(ops), s))
            })
            .collect()
    }

    fn holds(&self, atom: &SharedAtom, state: &SharedState) -> bool {
        match atom {
            SharedAtom::Done(i) => state.ops[*i] == Op::Nop && state.usage[*i] == self.targets[*i],
        }
    }

    fn encode(&self, state: &SharedState) -> String {
        state
            .ops
            .iter()
            .zip(&state.usage)
            .map(|(o, u)| format!("({},{})", o.name(), u))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn describe_action(&self, action: &Op) -> String {
        action.name().to_string()
    }

    fn describe_atom(&self, atom: &SharedAtom) -> String {
        match atom {
            SharedAtom::Done(i) => format!("Done(A{})", i + 1),
        }
    }

    fn describe_step(&self, step: &ActionStep<Op>) -> String {
        step.slots
            .iter()
            .map(|o| o.unwrap_or(Op::Nop).name())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
