//! JSON scenario documents and their translation into arenas.

use crate::arena::{Arena, CompositeArena, SearchArena, Target};
use crate::domain::{apply_plan, plan_cost, ActionStep, Domain, Goal, JointPlan};
use crate::domains::{
    Blocks, BlocksAtom, BlocksState, Op, SharedAtom, SharedResource, SharedState, SlottedAction, SlottedAtom,
    SlottedBlocks, SlottedState,
};
use crate::error::{EngineError, Result};
use crate::num::Q;
use crate::planner::{PublicProfile, SearchBudget};
use serde::{Deserialize, Serialize};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub goals: Vec<GoalSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::num::vec_opt_string_opt")]
    pub worths: Option<Vec<Option<Q>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lies: Vec<LieSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plans: Vec<PlanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    SlottedBlocks {
        #[serde(default = "two")]
        agents: usize,
    },
    Blocks {
        #[serde(default = "two")]
        agents: usize,
    },
    SharedResource {
        capacity: usize,
        targets: Vec<u32>,
    },
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(default = "one_copy")]
    pub repeat: usize,
    pub domain: DomainSpec,
    #[serde(default)]
    pub initial: Vec<Vec<String>>,
    pub goals: Vec<GoalSpec>,
}

fn one_copy() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum GoalSpec {
    All(Vec<AtomSpec>),
    Any(Vec<GoalSpec>),
}

/// Slot numbers are one-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum AtomSpec {
    On(String, String),
    OnTable(String),
    At(String, usize),
    InSlot(String, usize),
    Raised(String, usize),
    Clear(String),
    SlotEmpty(usize),
    Stack(usize, Vec<String>),
    StartsWith(usize, Vec<String>),
    /// The slot holds its initial stack reversed.
    Swapped(usize),
    /// The slot holds its initial stack unchanged.
    Unchanged(usize),
    HandsEmpty,
    /// Agent (one-based) reached its target usage and is idle.
    Done(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(with = "crate::num::as_string")]
    pub c1: Q,
    #[serde(with = "crate::num::as_string")]
    pub c2: Q,
    #[serde(with = "crate::num::as_string")]
    pub t: Q,
    #[serde(with = "crate::num::as_string")]
    pub m_r: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSpec {
    pub name: String,
    /// One-based agent number.
    pub agent: usize,
    pub goal: GoalSpec,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::num::opt_string")]
    pub worth: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub name: String,
    /// Per step, one entry per agent; "-" is a no-op.
    pub steps: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deal_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanism: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::num::opt_string")]
    pub semi_budget: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::num::opt_string")]
    pub grid_step: Option<Q>,
}

impl ScenarioDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ScenarioDocument =
            serde_json::from_str(text).map_err(|e| EngineError::Scenario(e.to_string()))?;
        if doc.version != SCENARIO_VERSION {
            return Err(EngineError::Scenario(format!("unsupported version {}", doc.version)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn options(&self) -> OptionsSpec {
        self.options.clone().unwrap_or_default()
    }

    pub fn worth(&self, agent: usize) -> Option<Q> {
        self.worths.as_ref().and_then(|w| w.get(agent).copied().flatten())
    }

    pub fn has_world(&self) -> bool {
        self.domain.is_some() || !self.components.is_empty()
    }

    fn single(&self) -> Result<World> {
        let domain = self
            .domain
            .as_ref()
            .ok_or_else(|| EngineError::Scenario("scenario has no single domain".into()))?;
        World::build(domain, self.initial.as_deref().unwrap_or(&[]))
    }

    pub fn world(&self) -> Result<World> {
        self.single()
    }

    fn goal_pair(&self, goals: &[GoalSpec]) -> Result<[GoalSpec; 2]> {
        match goals {
            [a, b] => Ok([a.clone(), b.clone()]),
            _ => Err(EngineError::AgentCount(goals.len())),
        }
    }

    /// Arena over the truthful encounter.
    pub fn arena(&self, budget: SearchBudget) -> Result<Box<dyn Arena>> {
        if !self.components.is_empty() {
            let mut parts: Vec<Box<dyn Arena>> = Vec::new();
            for c in &self.components {
                let world = World::build(&c.domain, &c.initial)?;
                let goals = self.goal_pair(&c.goals)?;
                for _ in 0..c.repeat {
                    parts.push(world.arena(&goals, None, budget)?);
                }
            }
            return Ok(Box::new(CompositeArena { parts }));
        }
        let goals = self.goal_pair(&self.goals)?;
        self.single()?.arena(&goals, None, budget)
    }

    /// Public numbers: the abstract profile when given, otherwise computed from the world.
    pub fn public_profile(&self, budget: SearchBudget) -> Result<PublicProfile> {
        if let Some(p) = &self.profile {
            return Ok(PublicProfile::abstract_profile(p.c1, p.c2, p.t, p.m_r));
        }
        let arena = self.arena(budget)?;
        let c = [arena.stand_alone(0)?, arena.stand_alone(1)?];
        let points = arena.frontier(Target::Joint)?.into_iter().map(|x| x.cost).collect();
        PublicProfile::from_points(c, points)
    }

    /// Arena where `agent` declares `goal` instead of its true goal, observed against the truth.
    pub fn lie_arena(&self, agent: usize, goal: &GoalSpec, budget: SearchBudget) -> Result<Box<dyn Arena>> {
        if !self.components.is_empty() {
            return Err(EngineError::Scenario("lies are supported for single-domain scenarios only".into()));
        }
        let truth = self.goal_pair(&self.goals)?;
        let mut declared = truth.clone();
        declared[agent] = goal.clone();
        self.single()?.arena(&declared, Some(&truth[agent]), budget)
    }
}

/// A concrete domain with its initial state.
pub enum World {
    Slotted(SlottedBlocks, SlottedState),
    Blocks(Blocks, BlocksState),
    Shared(SharedResource, SharedState),
}

impl World {
    pub fn build(spec: &DomainSpec, initial: &[Vec<String>]) -> Result<World> {
        Ok(match spec {
            DomainSpec::SlottedBlocks { agents } => {
                if initial.is_empty() {
                    return Err(EngineError::Scenario("slotted blocks need at least one slot".into()));
                }
                let (d, s) = SlottedBlocks::from_layout(initial, *agents);
                World::Slotted(d, s)
            }
            DomainSpec::Blocks { agents } => {
                let (d, s) = Blocks::from_stacks(initial, *agents);
                World::Blocks(d, s)
            }
            DomainSpec::SharedResource { capacity, targets } => {
                if *capacity == 0 {
                    return Err(EngineError::Scenario("capacity must be positive".into()));
                }
                let d = SharedResource::new(*capacity, targets.clone());
                let s = d.start();
                World::Shared(d, s)
            }
        })
    }

    pub fn agent_count(&self) -> usize {
        match self {
            World::Slotted(d, _) => d.agent_count(),
            World::Blocks(d, _) => d.agent_count(),
            World::Shared(d, _) => d.agent_count(),
        }
    }

    pub fn encode_initial(&self) -> String {
        match self {
            World::Slotted(d, s) => d.encode(s),
            World::Blocks(d, s) => d.encode(s),
            World::Shared(d, s) => d.encode(s),
        }
    }

    pub fn arena(
        &self,
        goals: &[GoalSpec; 2],
        observer: Option<&GoalSpec>,
        budget: SearchBudget,
    ) -> Result<Box<dyn Arena>> {
        match self {
            World::Slotted(d, s) => {
                let g = [slotted_goal(d, s, &goals[0])?, slotted_goal(d, s, &goals[1])?];
                let mut a = SearchArena::new(d.clone(), s.clone(), g, budget);
                if let Some(o) = observer {
                    a = a.with_observer(slotted_goal(d, s, o)?);
                }
                Ok(Box::new(a))
            }
            World::Blocks(d, s) => {
                let g = [blocks_goal(d, &goals[0])?, blocks_goal(d, &goals[1])?];
                let mut a = SearchArena::new(d.clone(), s.clone(), g, budget);
                if let Some(o) = observer {
                    a = a.with_observer(blocks_goal(d, o)?);
                }
                Ok(Box::new(a))
            }
            World::Shared(d, s) => {
                let g = [shared_goal(d, &goals[0])?, shared_goal(d, &goals[1])?];
                let mut a = SearchArena::new(d.clone(), s.clone(), g, budget);
                if let Some(o) = observer {
                    a = a.with_observer(shared_goal(d, o)?);
                }
                Ok(Box::new(a))
            }
        }
    }

    /// Replays a written plan, returning per-agent costs and the encoded final state.
    pub fn replay(&self, plan: &PlanSpec) -> Result<(Vec<Q>, String)> {
        match self {
            World::Slotted(d, s) => {
                let p = parse_plan(plan, d.agent_count(), parse_slotted_action)?;
                let end = apply_plan(d, s, &p)?;
                Ok((plan_cost(d, &p), d.encode(&end)))
            }
            World::Shared(d, s) => {
                let p = parse_plan(plan, d.agent_count(), parse_op)?;
                let end = apply_plan(d, s, &p)?;
                Ok((plan_cost(d, &p), d.encode(&end)))
            }
            World::Blocks(d, s) => {
                let mut state = s.clone();
                let mut plan_out = JointPlan::empty(d.agent_count());
                for (i, row) in plan.steps.iter().enumerate() {
                    let step = parse_step(row, d.agent_count(), |t| blocks_move(d, &state, t))
                        .map_err(|reason| EngineError::InvalidPlan { step: i, reason })?;
                    state = d.apply_step(&state, &step).map_err(|reason| EngineError::InvalidPlan { step: i, reason })?;
                    plan_out.steps.push(step);
                }
                Ok((plan_cost(d, &plan_out), d.encode(&state)))
            }
        }
    }
}

fn parse_step<A: Clone>(
    row: &[String],
    agents: usize,
    parse: impl Fn(&str) -> std::result::Result<A, String>,
) -> std::result::Result<ActionStep<A>, String> {
    if row.len() != agents {
        return Err(format!("step lists {} entries for {} agents", row.len(), agents));
    }
    let slots = row
        .iter()
        .map(|t| if t.trim() == "-" { Ok(None) } else { parse(t.trim()).map(Some) })
        .collect::<std::result::Result<_, _>>()?;
    Ok(ActionStep { slots })
}

fn parse_plan<A: Clone>(
    plan: &PlanSpec,
    agents: usize,
    parse: impl Fn(&str) -> std::result::Result<A, String>,
) -> Result<JointPlan<A>> {
    let steps = plan
        .steps
        .iter()
        .enumerate()
        .map(|(i, row)| parse_step(row, agents, &parse).map_err(|reason| EngineError::InvalidPlan { step: i, reason }))
        .collect::<Result<_>>()?;
    Ok(JointPlan { agent_count: agents, steps })
}

fn call_arg<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

fn parse_slotted_action(text: &str) -> std::result::Result<SlottedAction, String> {
    let slot = |a: &str| a.trim().parse::<usize>().ok().filter(|n| *n > 0).map(|n| n - 1);
    if let Some(a) = call_arg(text, "PickUp") {
        return slot(a).map(SlottedAction::PickUp).ok_or_else(|| format!("bad slot in {text}"));
    }
    if let Some(a) = call_arg(text, "PutDown") {
        return slot(a).map(SlottedAction::PutDown).ok_or_else(|| format!("bad slot in {text}"));
    }
    Err(format!("unknown slotted action {text:?}"))
}

fn parse_op(text: &str) -> std::result::Result<Op, String> {
    match text {
        "Use" => Ok(Op::Use),
        "Wait" => Ok(Op::Wait),
        "NOP" | "Nop" => Ok(Op::Nop),
        _ => Err(format!("unknown operation {text:?}")),
    }
}

fn blocks_move(d: &Blocks, state: &BlocksState, text: &str) -> std::result::Result<crate::domains::Move, String> {
    let args = call_arg(text, "Move").ok_or_else(|| format!("unknown blocks action {text:?}"))?;
    let (x, y) = args.split_once(',').ok_or_else(|| format!("bad move {text:?}"))?;
    let (x, y) = (x.trim(), y.trim());
    let block = d.block(x).map_err(|e| e.to_string())?;
    let from = state
        .stacks
        .iter()
        .position(|s| s.last() == Some(&block))
        .ok_or_else(|| format!("{x} is not clear"))?;
    let to = if y == "Table" {
        None
    } else {
        let target = d.block(y).map_err(|e| e.to_string())?;
        let j = state
            .stacks
            .iter()
            .enumerate()
            .position(|(j, s)| j != from && s.last() == Some(&target))
            .ok_or_else(|| format!("{y} is not clear"))?;
        Some((j, target))
    };
    Ok(crate::domains::Move { block, from, to })
}

fn slot_of(d: &SlottedBlocks, n: usize) -> Result<usize> {
    d.slot(n)
}

fn names_to_ids(d: &SlottedBlocks, names: &[String]) -> Result<Vec<u8>> {
    names.iter().map(|n| d.block(n)).collect()
}

pub fn slotted_goal(d: &SlottedBlocks, initial: &SlottedState, spec: &GoalSpec) -> Result<Goal<SlottedAtom>> {
    match spec {
        GoalSpec::Any(gs) => Ok(Goal::or(gs.iter().map(|g| slotted_goal(d, initial, g)).collect::<Result<_>>()?)),
        GoalSpec::All(atoms) => {
            let mut out = Vec::new();
            for a in atoms {
                out.push(match a {
                    AtomSpec::On(x, y) => SlottedAtom::On(d.block(x)?, d.block(y)?),
                    AtomSpec::At(x, n) => SlottedAtom::At(d.block(x)?, slot_of(d, *n)?),
                    AtomSpec::InSlot(x, n) => SlottedAtom::InSlot(d.block(x)?, slot_of(d, *n)?),
                    AtomSpec::Raised(x, n) => SlottedAtom::Raised(d.block(x)?, slot_of(d, *n)?),
                    AtomSpec::Clear(x) => SlottedAtom::Clear(d.block(x)?),
                    AtomSpec::SlotEmpty(n) => SlottedAtom::SlotEmpty(slot_of(d, *n)?),
                    AtomSpec::Stack(n, b) => SlottedAtom::Stack(slot_of(d, *n)?, names_to_ids(d, b)?),
                    AtomSpec::StartsWith(n, b) => SlottedAtom::StartsWith(slot_of(d, *n)?, names_to_ids(d, b)?),
                    AtomSpec::Swapped(n) => {
                        let i = slot_of(d, *n)?;
                        let mut s = initial.slots[i].clone();
                        s.reverse();
                        SlottedAtom::Stack(i, s)
                    }
                    AtomSpec::Unchanged(n) => {
                        let i = slot_of(d, *n)?;
                        SlottedAtom::Stack(i, initial.slots[i].clone())
                    }
                    AtomSpec::HandsEmpty => SlottedAtom::HandsEmpty,
                    other => return Err(unsupported("slotted-blocks", other)),
                });
            }
            Ok(Goal::all(out))
        }
    }
}

pub fn blocks_goal(d: &Blocks, spec: &GoalSpec) -> Result<Goal<BlocksAtom>> {
    match spec {
        GoalSpec::Any(gs) => Ok(Goal::or(gs.iter().map(|g| blocks_goal(d, g)).collect::<Result<_>>()?)),
        GoalSpec::All(atoms) => {
            let mut out = Vec::new();
            for a in atoms {
                out.push(match a {
                    AtomSpec::On(x, y) => BlocksAtom::On(d.block(x)?, d.block(y)?),
                    AtomSpec::OnTable(x) => BlocksAtom::OnTable(d.block(x)?),
                    AtomSpec::Clear(x) => BlocksAtom::Clear(d.block(x)?),
                    other => return Err(unsupported("blocks", other)),
                });
            }
            Ok(Goal::all(out))
        }
    }
}

pub fn shared_goal(d: &SharedResource, spec: &GoalSpec) -> Result<Goal<SharedAtom>> {
    match spec {
        GoalSpec::Any(gs) => Ok(Goal::or(gs.iter().map(|g| shared_goal(d, g)).collect::<Result<_>>()?)),
        GoalSpec::All(atoms) => {
            let mut out = Vec::new();
            for a in atoms {
                out.push(match a {
                    AtomSpec::Done(i) if *i >= 1 && *i <= d.agent_count() => SharedAtom::Done(i - 1),
                    other => return Err(unsupported("shared-resource", other)),
                });
            }
            Ok(Goal::all(out))
        }
    }
}

fn unsupported(domain: &str, atom: &AtomSpec) -> EngineError {
    EngineError::Scenario(format!("atom {atom:?} is not valid in the {domain} domain"))
}
