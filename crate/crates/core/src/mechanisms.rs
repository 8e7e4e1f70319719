//! Deal selection over every level of the deal hierarchy.

use crate::arena::{Arena, CandidatePoint, SemiLabel, Target};
use crate::deals::{
    mixed_cost, multiplan_utility, semicoop_utility, MultiPlanDeal, PlanLeg, SemiCoopDeal,
};
use crate::error::{EngineError, Result};
use crate::num::{abs, half, one, zero, Q};
use serde::Serialize;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    NashProduct,
    EqualSplit,
}

impl SelectionRule {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "nash-product" => Some(SelectionRule::NashProduct),
            "equal-split" => Some(SelectionRule::EqualSplit),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::NashProduct => "nash-product",
            SelectionRule::EqualSplit => "equal-split",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DealType {
    Mixed,
    SemiCoop,
    MultiPlan,
}

impl DealType {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "mixed" => Some(DealType::Mixed),
            "semi-coop" => Some(DealType::SemiCoop),
            "multi-plan" => Some(DealType::MultiPlan),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DealType::Mixed => "mixed",
            DealType::SemiCoop => "semi-coop",
            DealType::MultiPlan => "multi-plan",
        }
    }
}

/// One vertex of a lottery family: parameters, declared utilities and utilities under the truth.
#[derive(Debug, Clone)]
pub struct Corner {
    pub params: Vec<Q>,
    pub apparent: [Q; 2],
    pub actual: [Q; 2],
}

/// A point picked inside some family.
#[derive(Debug, Clone)]
pub struct Choice {
    pub family: usize,
    pub params: Vec<Q>,
    pub apparent: [Q; 2],
    pub actual: [Q; 2],
}

struct Scored {
    choice: Choice,
    gains: [Q; 2],
    order: usize,
}

impl Scored {
    fn product(&self) -> Q {
        self.gains[0] * self.gains[1]
    }

    fn sum(&self) -> Q {
        self.gains[0] + self.gains[1]
    }

    fn spread(&self) -> Q {
        abs(self.gains[0] - self.gains[1])
    }

    fn watched(&self, observer: Option<usize>) -> Q {
        observer.map_or(zero(), |k| self.choice.actual[k])
    }
}

fn lerp(a: Q, b: Q, t: Q) -> Q {
    a + (b - a) * t
}

fn point_on(family: usize, a: &Corner, b: &Corner, t: Q) -> Choice {
    Choice {
        family,
        params: a.params.iter().zip(&b.params).map(|(x, y)| lerp(*x, *y, t)).collect(),
        apparent: [0, 1].map(|k| lerp(a.apparent[k], b.apparent[k], t)),
        actual: [0, 1].map(|k| lerp(a.actual[k], b.actual[k], t)),
    }
}

/// Individual rational candidates on the segment between two corners.
/// Returns `(endpoints, interior)` where interior holds the rule-specific optimum, if any.
fn segment(a: &Corner, b: &Corner, d: [Q; 2], rule: SelectionRule) -> Option<(Vec<Q>, Vec<Q>)> {
    let alpha = [0, 1].map(|k| a.apparent[k] - d[k]);
    let beta = [0, 1].map(|k| b.apparent[k] - a.apparent[k]);
    let (mut lo, mut hi) = (zero(), one());
    for k in 0..2 {
        if beta[k] > zero() {
            lo = lo.max(-alpha[k] / beta[k]);
        } else if beta[k] < zero() {
            hi = hi.min(-alpha[k] / beta[k]);
        } else if alpha[k] < zero() {
            return None;
        }
    }
    if lo > hi {
        return None;
    }
    let mut inner = Vec::new();
    let inside = |t: Q| t >= lo && t <= hi;
    if beta == [zero(); 2] && a.actual == b.actual {
        return Some((vec![(lo + hi) * half(), lo, hi], inner));
    }
    match rule {
        SelectionRule::NashProduct => {
            let curv = beta[0] * beta[1];
            if curv < zero() {
                let t = -(alpha[0] * beta[1] + alpha[1] * beta[0]) / (curv + curv);
                if inside(t) {
                    inner.push(t);
                }
            }
        }
        SelectionRule::EqualSplit => {
            if beta[0] != beta[1] {
                let t = (alpha[1] - alpha[0]) / (beta[0] - beta[1]);
                if inside(t) {
                    inner.push(t);
                }
            }
        }
    }
    Some((vec![lo, hi], inner))
}

fn better_nash(a: &Scored, b: &Scored, observer: Option<usize>) -> Ordering {
    a.product()
        .cmp(&b.product())
        .then_with(|| a.sum().cmp(&b.sum()))
        .then_with(|| a.watched(observer).cmp(&b.watched(observer)))
        .then_with(|| b.order.cmp(&a.order))
}

fn better_equal_within(a: &Scored, b: &Scored, observer: Option<usize>) -> Ordering {
    let eq_a = a.gains[0] == a.gains[1];
    let eq_b = b.gains[0] == b.gains[1];
    eq_a.cmp(&eq_b)
        .then_with(|| if eq_a { a.gains[0].cmp(&b.gains[0]) } else { b.spread().cmp(&a.spread()) })
        .then_with(|| a.product().cmp(&b.product()))
        .then_with(|| a.sum().cmp(&b.sum()))
        .then_with(|| a.watched(observer).cmp(&b.watched(observer)))
        .then_with(|| b.order.cmp(&a.order))
}

fn better_equal_across(a: &Scored, b: &Scored, observer: Option<usize>) -> Ordering {
    a.product()
        .cmp(&b.product())
        .then_with(|| a.sum().cmp(&b.sum()))
        .then_with(|| b.spread().cmp(&a.spread()))
        .then_with(|| a.watched(observer).cmp(&b.watched(observer)))
        .then_with(|| b.order.cmp(&a.order))
}

/// Picks the best individual rational lottery over a list of families, each the convex hull of
/// its corners. Gains are measured from the disagreement point `d`.
pub fn optimize(families: &[Vec<Corner>], d: [Q; 2], rule: SelectionRule, observer: Option<usize>) -> Option<Choice> {
    let mut order = 0usize;
    let mut best: Option<Scored> = None;
    for (fi, corners) in families.iter().enumerate() {
        let mut local: Option<Scored> = None;
        let n = corners.len();
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).chain((0..n).map(|i| (i, i)));
        {
            for (i, j) in pairs {
                let (a, b) = (&corners[i], &corners[j]);
                let Some((ends, inner)) = segment(a, b, d, rule) else { continue };
                for t in ends.into_iter().chain(inner) {
                    let choice = point_on(fi, a, b, t);
                    let gains = [0, 1].map(|k| choice.apparent[k] - d[k]);
                    let s = Scored { choice, gains, order };
                    order += 1;
                    let cmp = |x: &Scored, y: &Scored| match rule {
                        SelectionRule::NashProduct => better_nash(x, y, observer),
                        SelectionRule::EqualSplit => better_equal_within(x, y, observer),
                    };
                    if local.as_ref().is_none_or(|l| cmp(&s, l) == Ordering::Greater) {
                        local = Some(s);
                    }
                }
            }
        }
        if let Some(l) = local {
            let cmp = |x: &Scored, y: &Scored| match rule {
                SelectionRule::NashProduct => better_nash(x, y, observer),
                SelectionRule::EqualSplit => better_equal_across(x, y, observer),
            };
            if best.as_ref().is_none_or(|b| cmp(&l, b) == Ordering::Greater) {
                best = Some(l);
            }
        }
    }
    best.map(|s| s.choice)
}

/// The lying agent, scored against its true goal and worth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observer {
    pub agent: usize,
    pub worth: Q,
}

/// Everything a mechanism needs about a (possibly declared) encounter.
pub struct Setup<'a> {
    pub arena: &'a dyn Arena,
    pub worths: [Q; 2],
    pub observer: Option<Observer>,
    pub rule: SelectionRule,
    /// Joint cost bound for intermediate states; defaults to the worth sum.
    pub semi_budget: Option<Q>,
}

impl<'a> Setup<'a> {
    pub fn new(arena: &'a dyn Arena, worths: [Q; 2], rule: SelectionRule) -> Self {
        Setup { arena, worths, observer: None, rule, semi_budget: None }
    }

    fn disagreement(&self) -> ([Q; 2], [Q; 2]) {
        let s = self.arena.start_satisfies();
        let apparent = [0, 1].map(|i| if s[i] { self.worths[i] } else { zero() });
        let mut actual = apparent;
        if let Some(o) = self.observer {
            actual[o.agent] = if self.arena.start_observed() { o.worth } else { zero() };
        }
        (apparent, actual)
    }

    fn true_value(&self, agent: usize, declared_hit: bool, observed_hit: bool) -> Q {
        match self.observer {
            Some(o) if o.agent == agent => {
                if observed_hit {
                    o.worth
                } else {
                    zero()
                }
            }
            _ => {
                if declared_hit {
                    self.worths[agent]
                } else {
                    zero()
                }
            }
        }
    }
}

/// Worths with missing entries replaced by stand-alone costs.
pub fn resolve_worths(arena: &dyn Arena, worths: [Option<Q>; 2]) -> Result<[Q; 2]> {
    let mut out = [zero(); 2];
    for i in 0..2 {
        out[i] = match worths[i] {
            Some(w) => w,
            None => arena.stand_alone(i)?.ok_or(EngineError::MissingWorth(i))?,
        };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegReport {
    #[serde(with = "crate::num::pair_string")]
    pub roles: [Q; 2],
    #[serde(with = "crate::num::as_string")]
    pub p: Q,
    pub lands: [bool; 2],
    pub steps: Vec<String>,
    pub final_state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DealReport {
    Mixed {
        #[serde(with = "crate::num::pair_string")]
        roles: [Q; 2],
        #[serde(with = "crate::num::as_string")]
        p: Q,
        steps: Vec<String>,
        final_state: String,
    },
    SemiCoop {
        t: String,
        #[serde(with = "crate::num::pair_string")]
        roles: [Q; 2],
        #[serde(with = "crate::num::as_string")]
        p: Q,
        #[serde(with = "crate::num::as_string")]
        q: Q,
        #[serde(with = "crate::num::pair_string")]
        remaining: [Q; 2],
        spill: [bool; 2],
        steps: Vec<String>,
        wins: [Vec<String>; 2],
    },
    MultiPlan {
        legs: [LegReport; 2],
        #[serde(with = "crate::num::as_string")]
        q: Q,
    },
    /// Conflict with a symmetric coin at the start state.
    Coin {
        #[serde(with = "crate::num::as_string")]
        q: Q,
    },
    /// Conflict where the world stays at the start state.
    StayAtStart,
}

impl DealReport {
    /// The deciding lottery parameter: `q` when there is a coin, otherwise `p`.
    pub fn weight(&self) -> Option<Q> {
        match self {
            DealReport::Mixed { p, .. } => Some(*p),
            DealReport::SemiCoop { q, .. } | DealReport::MultiPlan { q, .. } | DealReport::Coin { q } => Some(*q),
            DealReport::StayAtStart => None,
        }
    }

    pub fn summary(&self) -> String {
        use crate::num::fmt_q;
        match self {
            DealReport::Mixed { roles, p, .. } => {
                format!("mixed roles ({},{}) p={}", fmt_q(&roles[0]), fmt_q(&roles[1]), fmt_q(p))
            }
            DealReport::SemiCoop { roles, p, q, remaining, .. } => format!(
                "semi-coop to t with roles ({},{}) p={} then q={} (remaining {},{})",
                fmt_q(&roles[0]),
                fmt_q(&roles[1]),
                fmt_q(p),
                fmt_q(q),
                fmt_q(&remaining[0]),
                fmt_q(&remaining[1])
            ),
            DealReport::MultiPlan { legs, q } => format!(
                "multi-plan ({},{}):{} / ({},{}):{} with q={}",
                fmt_q(&legs[0].roles[0]),
                fmt_q(&legs[0].roles[1]),
                fmt_q(&legs[0].p),
                fmt_q(&legs[1].roles[0]),
                fmt_q(&legs[1].roles[1]),
                fmt_q(&legs[1].p),
                fmt_q(q)
            ),
            DealReport::Coin { q } => format!("conflict; coin q={} at s", fmt_q(q)),
            DealReport::StayAtStart => "conflict; world stays at s".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub families: usize,
    #[serde(skip_serializing_if = "Option::is_none", with = "crate::num::opt_string")]
    pub semi_budget: Option<Q>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegotiationOutcome {
    pub deal_type: DealType,
    pub rule: SelectionRule,
    /// `None` when no individual rational deal exists at this level.
    pub deal: Option<DealReport>,
    #[serde(with = "crate::num::pair_string")]
    pub apparent: [Q; 2],
    #[serde(with = "crate::num::pair_string")]
    pub actual: [Q; 2],
    /// With an observer: whether each executed branch ends in the observer's true goal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_goal_branches: Option<Vec<bool>>,
    pub diagnostics: Diagnostics,
}

impl NegotiationOutcome {
    pub fn is_agreement(&self) -> bool {
        matches!(
            self.deal,
            Some(DealReport::Mixed { .. } | DealReport::SemiCoop { .. } | DealReport::MultiPlan { .. })
        )
    }

    pub fn product(&self) -> Q {
        self.apparent[0] * self.apparent[1]
    }
}

fn mixed_corners(setup: &Setup, pt: &CandidatePoint) -> Vec<Corner> {
    [one(), zero()]
        .into_iter()
        .map(|p| {
            let cost = [0, 1].map(|i| mixed_cost(&pt.cost, p, i));
            Corner {
                params: vec![p],
                apparent: [0, 1].map(|i| setup.worths[i] - cost[i]),
                actual: [0, 1].map(|i| setup.true_value(i, true, pt.observed) - cost[i]),
            }
        })
        .collect()
}

fn no_deal(setup: &Setup, deal_type: DealType, families: usize, semi_budget: Option<Q>) -> NegotiationOutcome {
    let (apparent, actual) = setup.disagreement();
    NegotiationOutcome {
        deal_type,
        rule: setup.rule,
        deal: None,
        apparent,
        actual,
        true_goal_branches: None,
        diagnostics: Diagnostics { families, semi_budget, note: None },
    }
}

/// Product maximizing selection over mixed joint plans that reach both goals.
pub fn pmm_mixed(setup: &Setup) -> Result<NegotiationOutcome> {
    let points = setup.arena.frontier(Target::Joint)?;
    let families: Vec<Vec<Corner>> = points.iter().map(|pt| mixed_corners(setup, pt)).collect();
    let (d, _) = setup.disagreement();
    let Some(choice) = optimize(&families, d, setup.rule, setup.observer.map(|o| o.agent)) else {
        return Ok(no_deal(setup, DealType::Mixed, families.len(), None));
    };
    let pt = &points[choice.family];
    Ok(NegotiationOutcome {
        deal_type: DealType::Mixed,
        rule: setup.rule,
        deal: Some(DealReport::Mixed {
            roles: pt.cost,
            p: choice.params[0],
            steps: pt.witness.steps.clone(),
            final_state: pt.witness.final_state.clone(),
        }),
        apparent: choice.apparent,
        actual: choice.actual,
        true_goal_branches: setup.observer.map(|_| vec![pt.observed]),
        diagnostics: Diagnostics { families: families.len(), semi_budget: None, note: None },
    })
}

/// Mixed-deal selection on bare role splits, used where no witness plans exist.
pub fn best_mixed_split(points: &[[Q; 2]], baselines: [Q; 2], rule: SelectionRule) -> Option<([Q; 2], Q, [Q; 2])> {
    let families: Vec<Vec<Corner>> = points
        .iter()
        .map(|roles| {
            [one(), zero()]
                .into_iter()
                .map(|p| {
                    let u = [0, 1].map(|i| baselines[i] - mixed_cost(roles, p, i));
                    Corner { params: vec![p], apparent: u, actual: u }
                })
                .collect()
        })
        .collect();
    optimize(&families, [zero(), zero()], rule, None).map(|c| (points[c.family], c.params[0], c.apparent))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoinOutcome {
    Coin {
        #[serde(with = "crate::num::as_string")]
        q: Q,
        #[serde(with = "crate::num::pair_string")]
        utilities: [Q; 2],
    },
    StayAtStart {
        #[serde(with = "crate::num::pair_string")]
        utilities: [Q; 2],
    },
}

/// Weight maximizing the product of `q * gains[0]` and `(1 - q) * gains[1]`.
pub fn coin_weight(gains: [Q; 2]) -> Option<Q> {
    let corners = vec![
        Corner { params: vec![one()], apparent: [gains[0], zero()], actual: [gains[0], zero()] },
        Corner { params: vec![zero()], apparent: [zero(), gains[1]], actual: [zero(), gains[1]] },
    ];
    optimize(&[corners], [zero(), zero()], SelectionRule::NashProduct, None).map(|c| c.params[0])
}

/// Symmetric coin at the start state, unless the start already satisfies someone.
pub fn conflict_coin(start_satisfies: [bool; 2], worths: [Q; 2], stand_alone: [Q; 2]) -> CoinOutcome {
    if start_satisfies.iter().any(|x| *x) {
        let utilities = [0, 1].map(|i| if start_satisfies[i] { worths[i] } else { zero() });
        return CoinOutcome::StayAtStart { utilities };
    }
    let q = half();
    CoinOutcome::Coin { q, utilities: [0, 1].map(|i| q * (worths[i] - stand_alone[i])) }
}

/// Conflict coin for an arena, reported as a negotiation outcome.
pub fn coin_outcome(setup: &Setup, deal_type: DealType) -> Result<NegotiationOutcome> {
    let mut out = no_deal(setup, deal_type, 0, None);
    out.diagnostics.note = Some("coin fallback".into());
    if setup.arena.start_satisfies().iter().any(|x| *x) {
        out.deal = Some(DealReport::StayAtStart);
        return Ok(out);
    }
    let labels = setup.arena.semi_labels(zero())?;
    let Some((label, corners)) = labels.iter().find_map(|l| semi_corners(setup, l).map(|c| (l, c))) else {
        return Ok(out);
    };
    out.true_goal_branches = setup.observer.map(|_| label.observed.to_vec());
    // Corners run (p, q) = (1,1), (1,0), ...; at s the roles cost nothing, so p is irrelevant.
    let mid = point_on(0, &corners[0], &corners[1], half());
    let (apparent, actual) = (mid.apparent, mid.actual);
    out.deal = Some(DealReport::Coin { q: half() });
    out.apparent = apparent;
    out.actual = actual;
    Ok(out)
}

fn semi_corners(setup: &Setup, l: &SemiLabel) -> Option<Vec<Corner>> {
    let remaining = [l.remaining[0]?, l.remaining[1]?];
    let mut out = Vec::new();
    for p in [one(), zero()] {
        for q in [one(), zero()] {
            let deal = SemiCoopDeal { roles: l.cost, p, q, remaining, spill: l.spill };
            let apparent = semicoop_utility(&deal, setup.worths);
            let actual = [0, 1].map(|i| {
                let j = 1 - i;
                let qi = deal.win_probability(i);
                let win = setup.true_value(i, true, l.observed[i]);
                let lose = setup.true_value(i, l.spill[i], l.observed[j]);
                qi * (win - remaining[i]) + (one() - qi) * lose - mixed_cost(&l.cost, p, i)
            });
            out.push(Corner { params: vec![p, q], apparent, actual });
        }
    }
    Some(out)
}

/// Product maximizing selection over semi-cooperative deals.
pub fn unp_semicoop(setup: &Setup) -> Result<NegotiationOutcome> {
    let budget = setup.semi_budget.unwrap_or(setup.worths[0] + setup.worths[1]).max(zero());
    let labels = setup.arena.semi_labels(budget)?;
    let mut kept = Vec::new();
    let mut families = Vec::new();
    for l in &labels {
        if let Some(c) = semi_corners(setup, l) {
            kept.push(l);
            families.push(c);
        }
    }
    let (d, _) = setup.disagreement();
    let Some(choice) = optimize(&families, d, setup.rule, setup.observer.map(|o| o.agent)) else {
        return Ok(no_deal(setup, DealType::SemiCoop, families.len(), Some(budget)));
    };
    let l = kept[choice.family];
    let remaining = [l.remaining[0].unwrap_or_default(), l.remaining[1].unwrap_or_default()];
    Ok(NegotiationOutcome {
        deal_type: DealType::SemiCoop,
        rule: setup.rule,
        deal: Some(DealReport::SemiCoop {
            t: l.witness.t.clone(),
            roles: l.cost,
            p: choice.params[0],
            q: choice.params[1],
            remaining,
            spill: l.spill,
            steps: l.witness.steps.clone(),
            wins: l.witness.wins.clone(),
        }),
        apparent: choice.apparent,
        actual: choice.actual,
        true_goal_branches: setup.observer.map(|_| l.observed.to_vec()),
        diagnostics: Diagnostics { families: families.len(), semi_budget: Some(budget), note: None },
    })
}

fn multi_corners(setup: &Setup, a: &CandidatePoint, b: &CandidatePoint) -> Vec<Corner> {
    // Lifted parameters (q, q*p1, (1-q)*p2).
    let lifted = [
        (one(), one(), zero()),
        (one(), zero(), zero()),
        (zero(), zero(), one()),
        (zero(), zero(), zero()),
    ];
    lifted
        .into_iter()
        .map(|(q, x1, x2)| {
            let p1 = if q > zero() { x1 / q } else { zero() };
            let p2 = if q < one() { x2 / (one() - q) } else { zero() };
            let deal = MultiPlanDeal {
                legs: [
                    PlanLeg { roles: a.cost, p: p1, lands: a.lands },
                    PlanLeg { roles: b.cost, p: p2, lands: b.lands },
                ],
                q,
            };
            let apparent = multiplan_utility(&deal, setup.worths);
            let actual = [0, 1].map(|i| {
                let va = setup.true_value(i, a.lands[i], a.observed) - mixed_cost(&a.cost, p1, i);
                let vb = setup.true_value(i, b.lands[i], b.observed) - mixed_cost(&b.cost, p2, i);
                q * va + (one() - q) * vb
            });
            Corner { params: vec![q, x1, x2], apparent, actual }
        })
        .collect()
}

/// Product maximizing selection over multi-plan deals. Each leg ranges over the frontier to its
/// goal together with the frontier to both goals.
pub fn unp_multiplan(setup: &Setup) -> Result<NegotiationOutcome> {
    let joint = setup.arena.frontier(Target::Joint)?;
    let mut legs: [Vec<CandidatePoint>; 2] = [setup.arena.frontier(Target::Own(0))?, setup.arena.frontier(Target::Own(1))?];
    for (i, l) in legs.iter_mut().enumerate() {
        if l.is_empty() {
            return Err(EngineError::EmptyFrontier(format!("goal of agent {} is unreachable", i + 1)));
        }
        l.extend(joint.iter().cloned());
    }
    let mut pairs = Vec::new();
    let mut families = Vec::new();
    for a in &legs[0] {
        for b in &legs[1] {
            families.push(multi_corners(setup, a, b));
            pairs.push((a, b));
        }
    }
    let (d, _) = setup.disagreement();
    let Some(choice) = optimize(&families, d, setup.rule, setup.observer.map(|o| o.agent)) else {
        return Ok(no_deal(setup, DealType::MultiPlan, families.len(), None));
    };
    let (a, b) = pairs[choice.family];
    let q = choice.params[0];
    let p1 = if q > zero() { choice.params[1] / q } else { one() };
    let p2 = if q < one() { choice.params[2] / (one() - q) } else { one() };
    let leg = |pt: &CandidatePoint, p: Q| LegReport {
        roles: pt.cost,
        p,
        lands: pt.lands,
        steps: pt.witness.steps.clone(),
        final_state: pt.witness.final_state.clone(),
    };
    Ok(NegotiationOutcome {
        deal_type: DealType::MultiPlan,
        rule: setup.rule,
        deal: Some(DealReport::MultiPlan { legs: [leg(a, p1), leg(b, p2)], q }),
        apparent: choice.apparent,
        actual: choice.actual,
        true_goal_branches: setup.observer.map(|_| vec![a.observed, b.observed]),
        diagnostics: Diagnostics { families: families.len(), semi_budget: None, note: None },
    })
}

pub fn negotiate(setup: &Setup, deal_type: DealType) -> Result<NegotiationOutcome> {
    match deal_type {
        DealType::Mixed => pmm_mixed(setup),
        DealType::SemiCoop => unp_semicoop(setup),
        DealType::MultiPlan => unp_multiplan(setup),
    }
}

/// Declarations a tidy agent would make: T minus the opponent's stand-alone cost.
pub fn tidy_declarations(c: [Q; 2], t: Q) -> [Q; 2] {
    [(t - c[1]).max(zero()), (t - c[0]).max(zero())]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyRow {
    pub deal_type: DealType,
    /// Best outcome using only this deal type.
    pub native: NegotiationOutcome,
    /// Best outcome using this deal type or any type below it.
    pub effective: NegotiationOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyReport {
    pub rows: Vec<HierarchyRow>,
    /// Effective products never decrease up the hierarchy.
    pub monotone: bool,
    /// Native products never decrease up the hierarchy.
    pub native_monotone: bool,
}

fn score(o: &NegotiationOutcome) -> (Q, Q) {
    (o.product(), o.apparent[0] + o.apparent[1])
}

/// Runs every deal type on the same encounter. A mixed level without agreement falls back to
/// the conflict coin.
pub fn hierarchy_report(setup: &Setup) -> Result<HierarchyReport> {
    let mut rows: Vec<HierarchyRow> = Vec::new();
    for dt in [DealType::Mixed, DealType::SemiCoop, DealType::MultiPlan] {
        let mut native = negotiate(setup, dt)?;
        if dt == DealType::Mixed && native.deal.is_none() {
            native = coin_outcome(setup, dt)?;
        }
        let effective = match rows.last() {
            Some(prev) if score(&prev.effective) > score(&native) => {
                NegotiationOutcome { deal_type: dt, ..prev.effective.clone() }
            }
            _ => native.clone(),
        };
        rows.push(HierarchyRow { deal_type: dt, native, effective });
    }
    let monotone = rows.windows(2).all(|w| w[0].effective.product() <= w[1].effective.product());
    let native_monotone = rows.windows(2).all(|w| w[0].native.product() <= w[1].native.product());
    Ok(HierarchyReport { rows, monotone, native_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qr};

    #[test]
    fn coin_weight_is_half() {
        assert_eq!(coin_weight([q(3), q(17)]), Some(half()));
        assert_eq!(coin_weight([qr(1, 9), q(2)]), Some(half()));
    }

    #[test]
    fn mixed_split_on_unequal_roles() {
        let (roles, p, u) = best_mixed_split(&[[q(2), q(6)], [q(6), q(2)]], [q(3), q(6)], SelectionRule::NashProduct).unwrap();
        assert_eq!(roles, [q(2), q(6)]);
        assert_eq!(p, qr(7, 8));
        assert_eq!(u, [half(), half()]);
    }

    #[test]
    fn equal_split_matches_nash_on_constant_sum() {
        let pts = [[q(2), q(6)], [q(6), q(2)]];
        let a = best_mixed_split(&pts, [q(3), q(6)], SelectionRule::NashProduct).unwrap();
        let b = best_mixed_split(&pts, [q(3), q(6)], SelectionRule::EqualSplit).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tidy_values() {
        assert_eq!(tidy_declarations([q(2), q(2)], q(8)), [q(6), q(6)]);
        assert_eq!(tidy_declarations([q(3), q(5)], q(8)), [q(3), q(5)]);
    }
}
