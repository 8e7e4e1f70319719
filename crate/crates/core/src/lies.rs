//! Goal and worth misrepresentation experiments.

use crate::error::{EngineError, Result};
use crate::mechanisms::{negotiate, resolve_worths, DealType, NegotiationOutcome, Observer, SelectionRule, Setup};
use crate::num::Q;
use crate::planner::SearchBudget;
use crate::scenario::{LieSpec, ScenarioDocument};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieReport {
    pub name: String,
    /// Zero-based.
    pub agent: usize,
    #[serde(with = "crate::num::as_string")]
    pub declared_worth: Q,
    #[serde(with = "crate::num::as_string")]
    pub true_worth: Q,
    #[serde(with = "crate::num::pair_string")]
    pub apparent: [Q; 2],
    #[serde(with = "crate::num::pair_string")]
    pub actual: [Q; 2],
    /// Per executed branch, whether it ends in the liar's true goal.
    pub true_goal_achieved: Vec<bool>,
    /// Some plan to the declared goal also ends in the true goal.
    pub declared_meets_truth: bool,
    pub outcome: NegotiationOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieSearch {
    pub truth: LieReport,
    pub candidates: Vec<LieReport>,
    /// Name of the candidate with the highest actual utility, when it beats the truth.
    pub best: Option<String>,
}

fn true_worth(doc: &ScenarioDocument, agent: usize, budget: SearchBudget) -> Result<Q> {
    let arena = doc.arena(budget)?;
    let w = resolve_worths(arena.as_ref(), [doc.worth(0), doc.worth(1)])?;
    Ok(w[agent])
}

/// Negotiates with `lie.agent` declaring `lie.goal`; the opponent is truthful.
pub fn evaluate_lie(
    doc: &ScenarioDocument,
    lie: &LieSpec,
    deal_type: DealType,
    rule: SelectionRule,
    budget: SearchBudget,
    semi_budget: Option<Q>,
) -> Result<LieReport> {
    if lie.agent == 0 || lie.agent > 2 {
        return Err(EngineError::Scenario(format!("lie agent {} out of range", lie.agent)));
    }
    let k = lie.agent - 1;
    let truth = true_worth(doc, k, budget)?;
    let arena = doc.lie_arena(k, &lie.goal, budget)?;
    let mut declared = [doc.worth(0), doc.worth(1)];
    declared[k] = lie.worth;
    let worths = resolve_worths(arena.as_ref(), declared)?;
    let mut setup = Setup::new(arena.as_ref(), worths, rule);
    setup.observer = Some(Observer { agent: k, worth: truth });
    setup.semi_budget = semi_budget;
    let outcome = negotiate(&setup, deal_type)?;
    let declared_meets_truth = arena.declared_meets_observer(k)?;
    Ok(LieReport {
        name: lie.name.clone(),
        agent: k,
        declared_worth: worths[k],
        true_worth: truth,
        apparent: outcome.apparent,
        actual: outcome.actual,
        true_goal_achieved: outcome.true_goal_branches.clone().unwrap_or_default(),
        declared_meets_truth,
        outcome,
    })
}

/// Evaluates the truthful declaration and every candidate for `agent` (zero-based).
pub fn lie_search(
    doc: &ScenarioDocument,
    agent: usize,
    candidates: &[LieSpec],
    deal_type: DealType,
    rule: SelectionRule,
    budget: SearchBudget,
    semi_budget: Option<Q>,
) -> Result<LieSearch> {
    let goal = doc.goals.get(agent).ok_or(EngineError::AgentCount(doc.goals.len()))?.clone();
    let truthful = LieSpec { name: "truth".into(), agent: agent + 1, goal, worth: doc.worth(agent) };
    let truth = evaluate_lie(doc, &truthful, deal_type, rule, budget, semi_budget)?;
    let mut reports = Vec::new();
    for c in candidates.iter().filter(|c| c.agent == agent + 1) {
        reports.push(evaluate_lie(doc, c, deal_type, rule, budget, semi_budget)?);
    }
    let best = reports
        .iter()
        .filter(|r| r.actual[agent] > truth.actual[agent])
        .fold(None::<&LieReport>, |acc, r| match acc {
            Some(a) if a.actual[agent] >= r.actual[agent] => Some(a),
            _ => Some(r),
        })
        .map(|r| r.name.clone());
    Ok(LieSearch { truth, candidates: reports, best })
}
