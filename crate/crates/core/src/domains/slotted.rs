use crate::domain::{ActionStep, AgentId, Domain};
use crate::error::{EngineError, Result};
use crate::num::{q, Q};

/// Blocks are identified by name; blocks sharing a name are interchangeable.
pub type BlockId = u8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlottedState {
    pub slots: Vec<Vec<BlockId>>,
    pub held: Vec<Option<BlockId>>,
}

impl SlottedState {
    pub fn block_count(&self) -> usize {
        self.slots.iter().map(Vec::len).sum::<usize>() + self.held.iter().flatten().count()
    }

    pub fn hands_empty(&self) -> bool {
        self.held.iter().all(Option::is_none)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlottedAction {
    PickUp(usize),
    PutDown(usize),
}

/// Goal atoms. Slot indices are zero-based here and printed one-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlottedAtom {
    On(BlockId, BlockId),
    At(BlockId, usize),
    InSlot(BlockId, usize),
    Raised(BlockId, usize),
    Clear(BlockId),
    SlotEmpty(usize),
    Stack(usize, Vec<BlockId>),
    StartsWith(usize, Vec<BlockId>),
    HandsEmpty,
}

#[derive(Debug, Clone)]
pub struct SlottedBlocks {
    names: Vec<String>,
    slot_count: usize,
    agents: usize,
}

impl SlottedBlocks {
    pub fn new(names: Vec<String>, slot_count: usize, agents: usize) -> Self {
        SlottedBlocks { names, slot_count, agents }
    }

    /// Builds the domain and a hands-empty state from named stacks.
    pub fn from_layout<S: AsRef<str>>(layout: &[Vec<S>], agents: usize) -> (Self, SlottedState) {
        let mut names: Vec<String> = Vec::new();
        for stack in layout {
            for b in stack {
                if !names.iter().any(|n| n == b.as_ref()) {
                    names.push(b.as_ref().to_string());
                }
            }
        }
        let domain = SlottedBlocks::new(names, layout.len(), agents);
        let slots = layout
            .iter()
            .map(|s| s.iter().map(|b| domain.block(b.as_ref()).unwrap()).collect())
            .collect();
        let state = SlottedState { slots, held: vec![None; agents] };
        (domain, state)
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn block(&self, name: &str) -> Result<BlockId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as BlockId)
            .ok_or_else(|| EngineError::Scenario(format!("unknown block {name:?}")))
    }

    pub fn name(&self, b: BlockId) -> &str {
        &self.names[b as usize]
    }

    pub fn slot(&self, one_based: usize) -> Result<usize> {
        if one_based == 0 || one_based > self.slot_count {
            return Err(EngineError::Scenario(format!("slot {one_based} out of range 1..={}", self.slot_count)));
        }
        Ok(one_based - 1)
    }

    /// Every legal PickUp and PutDown for one agent.
    pub fn successors(&self, state: &SlottedState, agent: AgentId) -> Vec<(SlottedAction, SlottedState)> {
        let a = agent.index();
        let mut out = Vec::new();
        match state.held[a] {
            None => {
                for (i, stack) in state.slots.iter().enumerate() {
                    if let Some(&top) = stack.last() {
                        let mut next = state.clone();
                        next.slots[i].pop();
                        next.held[a] = Some(top);
                        out.push((SlottedAction::PickUp(i), next));
                    }
                }
            }
            Some(b) => {
                for i in 0..self.slot_count {
                    let mut next = state.clone();
                    next.slots[i].push(b);
                    next.held[a] = None;
                    out.push((SlottedAction::PutDown(i), next));
                }
            }
        }
        out
    }

    fn apply_action(&self, state: &SlottedState, agent: usize, action: SlottedAction) -> std::result::Result<SlottedState, String> {
        let mut next = state.clone();
        match action {
            SlottedAction::PickUp(i) => {
                if i >= self.slot_count {
                    return Err(format!("no slot {}", i + 1));
                }
                if next.held[agent].is_some() {
                    return Err(format!("A{} already holds a block", agent + 1));
                }
                let b = next.slots[i].pop().ok_or_else(|| format!("slot {} is empty", i + 1))?;
                next.held[agent] = Some(b);
            }
            SlottedAction::PutDown(i) => {
                if i >= self.slot_count {
                    return Err(format!("no slot {}", i + 1));
                }
                let b = next.held[agent].take().ok_or_else(|| format!("A{} holds nothing", agent + 1))?;
                next.slots[i].push(b);
            }
        }
        Ok(next)
    }

    fn names_of(&self, blocks: &[BlockId]) -> String {
        blocks.iter().map(|&b| self.name(b)).collect::<Vec<_>>().join(",")
    }
}

impl Domain for SlottedBlocks {
    type State = SlottedState;
    type Action = SlottedAction;
    type Atom = SlottedAtom;

    fn agent_count(&self) -> usize {
        self.agents
    }

    fn action_cost(&self, _action: &SlottedAction) -> Q {
        q(1)
    }

    fn apply_step(&self, state: &SlottedState, step: &ActionStep<SlottedAction>) -> std::result::Result<SlottedState, String> {
        let acting: Vec<(usize, SlottedAction)> =
            step.slots.iter().enumerate().filter_map(|(i, a)| a.map(|a| (i, a))).collect();
        if acting.len() > 1 {
            return Err("more than one agent acts in a single step".to_string());
        }
        match acting.first() {
            None => Ok(state.clone()),
            Some(&(agent, action)) => self.apply_action(state, agent, action),
        }
    }

    fn joint_successors(&self, state: &SlottedState) -> Vec<(ActionStep<SlottedAction>, SlottedState)> {
        (0..self.agents).flat_map(|a| self.solo_successors(state, AgentId(a))).collect()
    }

    fn solo_successors(&self, state: &SlottedState, agent: AgentId) -> Vec<(ActionStep<SlottedAction>, SlottedState)> {
        self.successors(state, agent)
            .into_iter()
            .map(|(a, s)| (ActionStep::solo(self.agents, agent, a), s))
            .collect()
    }

    fn holds(&self, atom: &SlottedAtom, state: &SlottedState) -> bool {
        match atom {
            SlottedAtom::On(x, y) => state
                .slots
                .iter()
                .any(|s| s.windows(2).any(|w| w[0] == *y && w[1] == *x)),
            SlottedAtom::At(x, n) => state.slots[*n].first() == Some(x),
            SlottedAtom::InSlot(x, n) => state.slots[*n].contains(x),
            SlottedAtom::Raised(x, n) => state.slots[*n].iter().skip(1).any(|b| b == x),
            SlottedAtom::Clear(x) => state.slots.iter().any(|s| s.last() == Some(x)),
            SlottedAtom::SlotEmpty(n) => state.slots[*n].is_empty(),
            SlottedAtom::Stack(n, blocks) => &state.slots[*n] == blocks,
            SlottedAtom::StartsWith(n, blocks) => state.slots[*n].starts_with(blocks),
            SlottedAtom::HandsEmpty => state.hands_empty(),
        }
    }

    fn encode(&self, state: &SlottedState) -> String {
        let slots: Vec<String> = state.slots.iter().map(|s| format!("[{}]", self.names_of(s))).collect();
        let held: Vec<String> = state
            .held
            .iter()
            .enumerate()
            .map(|(i, h)| format!("A{}:{}", i + 1, h.map(|b| self.name(b).to_string()).unwrap_or_else(|| "-".into())))
            .collect();
        format!("{} | {}", slots.join(" "), held.join(" "))
    }

    fn describe_action(&self, action: &SlottedAction) -> String {
        match action {
            SlottedAction::PickUp(i) => format!("PickUp({})", i + 1),
            SlottedAction::PutDown(i) => format!("PutDown({})", i + 1),
        }
    }

    fn describe_atom(&self, atom: &SlottedAtom) -> String {
        match atom {
            SlottedAtom::On(x, y) => format!("On({},{})", self.name(*x), self.name(*y)),
            SlottedAtom::At(x, n) => format!("At({},{})", self.name(*x), n + 1),
            SlottedAtom::InSlot(x, n) => format!("InSlot({},{})", self.name(*x), n + 1),
            SlottedAtom::Raised(x, n) => format!("Raised({},{})", self.name(*x), n + 1),
            SlottedAtom::Clear(x) => format!("Clear({})", self.name(*x)),
            SlottedAtom::SlotEmpty(n) => format!("SlotEmpty({})", n + 1),
            SlottedAtom::Stack(n, b) => format!("Stack({},[{}])", n + 1, self.names_of(b)),
            SlottedAtom::StartsWith(n, b) => format!("StartsWith({},[{}])", n + 1, self.names_of(b)),
            SlottedAtom::HandsEmpty => "HandsEmpty".to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{apply_plan, JointPlan};

    #[test]
    fn hand_rules() {
        let (d, s) = SlottedBlocks::from_layout(&[vec!["White", "Black"], vec![], vec!["Gray"]], 2);
        let succ = d.successors(&s, AgentId(0));
        assert_eq!(succ.len(), 2);
        assert!(succ.iter().all(|(a, _)| matches!(a, SlottedAction::PickUp(_))));
        let held = &succ[0].1;
        let puts = d.successors(held, AgentId(0));
        assert_eq!(puts.len(), 3);
        assert!(puts.iter().all(|(a, _)| matches!(a, SlottedAction::PutDown(_))));
    }

    #[test]
    fn cooperative_swap_takes_four_operations() {
        let (d, s) = SlottedBlocks::from_layout(&[vec!["White", "Black"], vec![]], 2);
        let step = |a: usize, act| ActionStep::solo(2, AgentId(a), act);
        let plan = JointPlan {
            agent_count: 2,
            steps: vec![
                step(0, SlottedAction::PickUp(0)),
                step(1, SlottedAction::PickUp(0)),
                step(0, SlottedAction::PutDown(0)),
                step(1, SlottedAction::PutDown(0)),
            ],
        };
        let end = apply_plan(&d, &s, &plan).unwrap();
        let b = d.block("Black").unwrap();
        let w = d.block("White").unwrap();
        assert_eq!(end.slots[0], vec![b, w]);
    }

    #[test]
    fn pick_then_put_restores() {
        let (d, s) = SlottedBlocks::from_layout(&[vec!["White", "Black"], vec!["Gray"]], 1);
        for (a, t) in d.successors(&s, AgentId(0)) {
            let SlottedAction::PickUp(i) = a else { unreachable!() };
            let back = d.apply_action(&t, 0, SlottedAction::PutDown(i)).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn encoding_is_canonical() {
        let (d, s) = SlottedBlocks::from_layout(&[vec!["White"], vec!["Gray", "Gray"]], 2);
        assert_eq!(d.encode(&s), "[White] [Gray,Gray] | A1:- A2:-");
    }
}
