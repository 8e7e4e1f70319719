use crate::domain::{ActionStep, AgentId, Domain};
use crate::domains::slotted::BlockId;
use crate::error::{EngineError, Result};
use crate::num::{q, Q};

/// Stacks on an unbounded table, kept sorted so equal worlds compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlocksState {
    pub stacks: Vec<Vec<BlockId>>,
}

impl BlocksState {
    pub fn new(mut stacks: Vec<Vec<BlockId>>) -> Self {
        stacks.retain(|s| !s.is_empty());
        stacks.sort();
        BlocksState { stacks }
    }

    pub fn block_count(&self) -> usize {
        self.stacks.iter().map(Vec::len).sum()
    }
}

/// Move the top of stack `from` onto the top of stack `to`, or onto the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub block: BlockId,
    pub from: usize,
    pub to: Option<(usize, BlockId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlocksAtom {
    On(BlockId, BlockId),
    OnTable(BlockId),
    Clear(BlockId),
}

#[derive(Debug, Clone)]
pub struct Blocks {
    names: Vec<String>,
    agents: usize,
}

impl Blocks {
    pub fn from_stacks<S: AsRef<str>>(stacks: &[Vec<S>], agents: usize) -> (Self, BlocksState) {
        let mut names: Vec<String> = Vec::new();
        for s in stacks {
            for b in s {
                if !names.iter().any(|n| n == b.as_ref()) {
                    names.push(b.as_ref().to_string());
                }
            }
        }
        let d = Blocks { names, agents };
        let st = stacks
            .iter()
            .map(|s| s.iter().map(|b| d.block(b.as_ref()).unwrap()).collect())
            .collect();
        (d, BlocksState::new(st))
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

    /// Every Move(x, y) between distinct clear blocks and every Move(x, Table) for stacked x.
    pub fn successors(&self, state: &BlocksState) -> Vec<(Move, BlocksState)> {
        let mut out = Vec::new();
        for (i, s) in state.stacks.iter().enumerate() {
            let x = *s.last().unwrap();
            for (j, t) in state.stacks.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mv = Move { block: x, from: i, to: Some((j, *t.last().unwrap())) };
                out.push((mv, self.perform(state, mv).unwrap()));
            }
            if s.len() > 1 {
                let mv = Move { block: x, from: i, to: None };
                out.push((mv, self.perform(state, mv).unwrap()));
            }
        }
        out
    }

    fn perform(&self, state: &BlocksState, mv: Move) -> std::result::Result<BlocksState, String> {
        let mut stacks = state.stacks.clone();
        let src = stacks.get_mut(mv.from).ok_or("no such stack")?;
        if src.last() != Some(&mv.block) {
            return Err(format!("{} is not clear", self.name(mv.block)));
        }
        src.pop();
        match mv.to {
            Some((j, y)) => {
                if j == mv.from {
                    return Err("cannot move a block onto itself".into());
                }
                let dst = stacks.get_mut(j).ok_or("no such stack")?;
                if dst.last() != Some(&y) {
                    return Err(format!("{} is not clear", self.name(y)));
                }
                dst.push(mv.block);
            }
            None => {
                if state.stacks[mv.from].len() == 1 {
                    return Err(format!("{} is already on the table", self.name(mv.block)));
                }
                stacks.push(vec![mv.block]);
            }
        }
        Ok(BlocksState::new(stacks))
    }
}

impl Domain for Blocks {
    type State = BlocksState;
    type Action = Move;
    type Atom = BlocksAtom;

    fn agent_count(&self) -> usize {
        self.agents
    }

    fn action_cost(&self, _action: &Move) -> Q {
        q(2)
    }

    fn apply_step(&self, state: &BlocksState, step: &ActionStep<Move>) -> std::result::Result<BlocksState, String> {
        let acting: Vec<&Move> = step.slots.iter().flatten().collect();
        match acting.as_slice() {
            [] => Ok(state.clone()),
            [mv] => self.perform(state, **mv),
            _ => Err("more than one agent acts in a single step".into()),
        }
    }

    fn joint_successors(&self, state: &BlocksState) -> Vec<(ActionStep<Move>, BlocksState)> {
        (0..self.agents).flat_map(|a| self.solo_successors(state, AgentId(a))).collect()
    }

    fn solo_successors(&self, state: &BlocksState, agent: AgentId) -> Vec<(ActionStep<Move>, BlocksState)> {
        self.successors(state)
            .into_iter()
            .map(|(m, s)| (ActionStep::solo(self.agents, agent, m), s))
            .collect()
    }

    fn holds(&self, atom: &BlocksAtom, state: &BlocksState) -> bool {
        match atom {
            BlocksAtom::On(x, y) => state.stacks.iter().any(|s| s.windows(2).any(|w| w[0] == *y && w[1] == *x)),
            BlocksAtom::OnTable(x) => state.stacks.iter().any(|s| s[0] == *x),
            BlocksAtom::Clear(x) => state.stacks.iter().any(|s| s.last() == Some(x)),
        }
    }

    fn encode(&self, state: &BlocksState) -> String {
        state
            .stacks
            .iter()
            .map(|s| format!("[{}]", s.iter().map(|&b| self.name(b)).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn describe_action(&self, mv: &Move) -> String {
        match mv.to {
            Some((_, y)) => format!("Move({},{})", self.name(mv.block), self.name(y)),
            None => format!("Move({},Table)", self.name(mv.block)),
        }
    }

    fn describe_atom(&self, atom: &BlocksAtom) -> String {
        match atom {
            BlocksAtom::On(x, y) => format!("On({},{})", self.name(*x), self.name(*y)),
            BlocksAtom::OnTable(x) => format!("On({},Table)", self.name(*x)),
            BlocksAtom::Clear(x) => format!("Clear({})", self.name(*x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tower_top_block_only() {
        let (d, s) = Blocks::from_stacks(&[vec!["A", "B", "C"]], 1);
        let succ = d.successors(&s);
        assert_eq!(succ.len(), 1);
        assert_eq!(d.describe_action(&succ[0].0), "Move(C,Table)");
    }

    #[test]
    fn all_on_table_count() {
        for k in 1..=5usize {
            let names: Vec<Vec<String>> = (0..k).map(|i| vec![format!("b{i}")]).collect();
            let (d, s) = Blocks::from_stacks(&names, 1);
            assert_eq!(d.successors(&s).len(), k * (k - 1));
        }
    }

    #[test]
    fn moves_conserve_blocks() {
        let (d, s) = Blocks::from_stacks(&[vec!["A", "B"], vec!["C"], vec!["D", "E", "F"]], 1);
        for (_, t) in d.successors(&s) {
            assert_eq!(t.block_count(), 6);
            for (_, u) in d.successors(&t) {
                assert_eq!(u.block_count(), 6);
            }
        }
    }
}
