//! Deal types, their utilities, individual rationality and interaction classification.

use crate::error::{EngineError, Result};
use crate::num::{min_q, one, zero, Q};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    StandAlone,
    Worth,
}

/// Resolves per-agent utility baselines. A missing worth falls back to the stand-alone cost
/// only when `default_to_cost` is set.
pub fn baselines(
    baseline: Baseline,
    worths: [Option<Q>; 2],
    stand_alone: [Option<Q>; 2],
    default_to_cost: bool,
) -> Result<[Q; 2]> {
    let mut out = [zero(); 2];
    for i in 0..2 {
        let v = match baseline {
            Baseline::StandAlone => stand_alone[i],
            Baseline::Worth if default_to_cost => worths[i].or(stand_alone[i]),
            Baseline::Worth => worths[i],
        };
        out[i] = v.ok_or(EngineError::MissingWorth(i))?;
    }
    Ok(out)
}

/// A joint plan reaching both goals, with agent 1 taking role 1 with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedDeal {
    pub roles: [Q; 2],
    pub p: Q,
}

pub fn mixed_cost(roles: &[Q; 2], p: Q, agent: usize) -> Q {
    let k = 1 - agent;
    p * roles[agent] + (one() - p) * roles[k]
}

impl MixedDeal {
    pub fn cost(&self, agent: usize) -> Q {
        mixed_cost(&self.roles, self.p, agent)
    }
}

pub fn mixed_utility(deal: &MixedDeal, baselines: [Q; 2]) -> [Q; 2] {
    [baselines[0] - deal.cost(0), baselines[1] - deal.cost(1)]
}

/// Cooperate to t under a mixed plan, then a coin gives agent 1 the win with probability `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiCoopDeal {
    pub roles: [Q; 2],
    pub p: Q,
    pub q: Q,
    /// c(t → G_i) for each agent.
    pub remaining: [Q; 2],
    /// `spill[i]`: the final state after the opponent wins still satisfies G_i.
    pub spill: [bool; 2],
}

impl SemiCoopDeal {
    pub fn win_probability(&self, agent: usize) -> Q {
        if agent == 0 {
            self.q
        } else {
            one() - self.q
        }
    }
}

pub fn semicoop_utility(deal: &SemiCoopDeal, worths: [Q; 2]) -> [Q; 2] {
    [0, 1].map(|i| {
        let qi = deal.win_probability(i);
        let lose = if deal.spill[i] { worths[i] } else { zero() };
        qi * (worths[i] - deal.remaining[i]) + (one() - qi) * lose - mixed_cost(&deal.roles, deal.p, i)
    })
}

/// One of the two mixed plans in a multi-plan deal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanLeg {
    pub roles: [Q; 2],
    pub p: Q,
    /// Whether the leg's final state satisfies each agent's goal.
    pub lands: [bool; 2],
}

/// Performs `legs[0]` with probability `q`, otherwise `legs[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiPlanDeal {
    pub legs: [PlanLeg; 2],
    pub q: Q,
}

pub fn multiplan_utility(deal: &MultiPlanDeal, worths: [Q; 2]) -> [Q; 2] {
    [0, 1].map(|i| {
        let leg_value = |leg: &PlanLeg| {
            let w = if leg.lands[i] { worths[i] } else { zero() };
            w - mixed_cost(&leg.roles, leg.p, i)
        };
        deal.q * leg_value(&deal.legs[0]) + (one() - deal.q) * leg_value(&deal.legs[1])
    })
}

pub fn is_individual_rational(u: &[Q]) -> bool {
    u.iter().all(|x| *x >= zero())
}

/// Componentwise at least as good and strictly better somewhere.
pub fn dominates(u: &[Q], v: &[Q]) -> bool {
    u.len() == v.len() && u.iter().zip(v).all(|(a, b)| a >= b) && u.iter().zip(v).any(|(a, b)| a > b)
}

/// Indices of candidates that are individual rational and undominated by any candidate.
pub fn negotiation_set(candidates: &[[Q; 2]]) -> Vec<usize> {
    (0..candidates.len())
        .filter(|&i| is_individual_rational(&candidates[i]))
        .filter(|&i| !candidates.iter().any(|o| dominates(o, &candidates[i])))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NsConditions {
    pub sum: bool,
    pub min: bool,
    /// Cheapest-total role split that satisfies both conditions on its own.
    #[serde(with = "crate::num::opt_pair")]
    pub witness: Option<[Q; 2]>,
}

impl NsConditions {
    pub fn nonempty(&self) -> bool {
        self.witness.is_some()
    }
}

/// Whether a single role split admits an individual rational mixing probability.
pub fn plan_admits(roles: &[Q; 2], b: &[Q; 2]) -> bool {
    b[0] + b[1] >= roles[0] + roles[1] && min_q(b[0], b[1]) >= min_q(roles[0], roles[1])
}

pub fn ns_conditions(frontier: &[[Q; 2]], b: [Q; 2]) -> Result<NsConditions> {
    let t = frontier
        .iter()
        .map(|x| x[0] + x[1])
        .min()
        .ok_or_else(|| EngineError::EmptyFrontier("both goals cannot be reached together".into()))?;
    let m_r = frontier
        .iter()
        .filter(|x| x[0] + x[1] == t)
        .map(|x| min_q(x[0], x[1]))
        .min()
        .expect("frontier is non-empty");
    let witness = frontier
        .iter()
        .filter(|x| plan_admits(x, &b))
        .min_by(|x, y| (x[0] + x[1]).cmp(&(y[0] + y[1])).then_with(|| x.cmp(y)))
        .copied();
    Ok(NsConditions { sum: b[0] + b[1] >= t, min: min_q(b[0], b[1]) >= m_r, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentView {
    Cooperative,
    Compromise,
    Conflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionTag {
    SymmetricCooperative,
    SymmetricCompromise,
    NonsymmetricCoopCompromise,
    Conflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InteractionType {
    pub tag: InteractionTag,
    pub views: [AgentView; 2],
}

impl InteractionTag {
    pub fn name(self) -> &'static str {
        match self {
            InteractionTag::SymmetricCooperative => "symmetric-cooperative",
            InteractionTag::SymmetricCompromise => "symmetric-compromise",
            InteractionTag::NonsymmetricCoopCompromise => "nonsymmetric-coop-compromise",
            InteractionTag::Conflict => "conflict",
        }
    }
}

/// Classifies from the joint frontier, stand-alone costs and worths.
/// An empty frontier is a conflict.
pub fn classify_interaction(frontier: &[[Q; 2]], c: [Q; 2], w: [Q; 2]) -> InteractionType {
    let ns = |b: [Q; 2]| frontier.iter().any(|x| plan_admits(x, &b));
    if !ns(w) {
        return InteractionType { tag: InteractionTag::Conflict, views: [AgentView::Conflict; 2] };
    }
    let views = [0, 1].map(|i| {
        if w[i] <= c[i] {
            return AgentView::Cooperative;
        }
        let mut starred = w;
        starred[i] = c[i];
        if ns(starred) {
            AgentView::Cooperative
        } else {
            AgentView::Compromise
        }
    });
    let tag = match views {
        [AgentView::Cooperative, AgentView::Cooperative] => InteractionTag::SymmetricCooperative,
        [AgentView::Compromise, AgentView::Compromise] => InteractionTag::SymmetricCompromise,
        _ => InteractionTag::NonsymmetricCoopCompromise,
    };
    InteractionType { tag, views }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qr};

    #[test]
    fn mixed_cost_on_unequal_roles() {
        let roles = [q(2), q(6)];
        assert_eq!(mixed_cost(&roles, qr(7, 8), 0), qr(5, 2));
        assert_eq!(mixed_cost(&roles, qr(1, 2), 0), q(4));
        assert_eq!(mixed_cost(&roles, one(), 1), q(6));
    }

    #[test]
    fn negotiation_set_filters() {
        let c = [[q(0), q(0)], [q(1), q(0)], [q(-1), q(5)]];
        assert_eq!(negotiation_set(&c), vec![1]);
        assert_eq!(negotiation_set(&[[q(0), q(0)]]), vec![0]);
    }

    #[test]
    fn conditions_fail_at_zero() {
        let t = ns_conditions(&[[q(1), q(1)]], [q(0), q(0)]).unwrap();
        assert!(!t.sum && !t.min && !t.nonempty());
    }
}
