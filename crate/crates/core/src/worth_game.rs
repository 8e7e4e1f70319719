//! Private-worth declaration game with strict and tolerant resolution.

use crate::deals::{mixed_cost, plan_admits};
use crate::error::{EngineError, Result};
use crate::mechanisms::{best_mixed_split, SelectionRule};
use crate::num::{half, max_q, min_q, one, zero, Q};
use crate::planner::PublicProfile;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    Strict,
    Tolerant,
}

impl Mechanism {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "strict" => Some(Mechanism::Strict),
            "tolerant" => Some(Mechanism::Tolerant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    MinSufficient,
    MinConcession,
    Combined,
    Tidy,
    GridBestResponse,
}

impl Strategy {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "min-sufficient" => Some(Strategy::MinSufficient),
            "min-concession" => Some(Strategy::MinConcession),
            "combined" => Some(Strategy::Combined),
            "tidy" => Some(Strategy::Tidy),
            "grid-best-response" => Some(Strategy::GridBestResponse),
            _ => None,
        }
    }
}

pub fn min_sufficient(w: Q, c: Q, m_r: Q) -> Q {
    min_q(w, max_q(c, m_r))
}

pub fn min_concession(w: Q, c_self: Q, c_other: Q, t: Q) -> Q {
    min_q(w, c_self + (t - c_self - c_other) * half())
}

/// Interaction type visible from public information alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PublicType {
    SymmetricCooperative,
    NonSymmetric,
    SymmetricCompromise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseLabel {
    BothAchievable,
    OneAchievable,
    NeitherAchievable,
    CompromiseSufficient,
    CompromiseInsufficient,
    NoCompromiseNeeded,
    EqualCompromise,
    UnequalCompromise,
    OneCannotCompromise,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 9] = [
        CaseLabel::BothAchievable,
        CaseLabel::OneAchievable,
        CaseLabel::NeitherAchievable,
        CaseLabel::CompromiseSufficient,
        CaseLabel::CompromiseInsufficient,
        CaseLabel::NoCompromiseNeeded,
        CaseLabel::EqualCompromise,
        CaseLabel::UnequalCompromise,
        CaseLabel::OneCannotCompromise,
    ];

    /// One-based row in the summary table.
    pub fn row(self) -> usize {
        CaseLabel::ALL.iter().position(|c| *c == self).expect("listed") + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseLabel::BothAchievable => "both-achievable",
            CaseLabel::OneAchievable => "one-achievable",
            CaseLabel::NeitherAchievable => "neither-achievable",
            CaseLabel::CompromiseSufficient => "compromise-sufficient",
            CaseLabel::CompromiseInsufficient => "compromise-insufficient",
            CaseLabel::NoCompromiseNeeded => "no-compromise-needed",
            CaseLabel::EqualCompromise => "equal-compromise",
            CaseLabel::UnequalCompromise => "unequal-compromise",
            CaseLabel::OneCannotCompromise => "one-cannot-compromise",
        }
    }

    /// Expected (strict efficient, strict stable, tolerant efficient, tolerant stable).
    pub fn expected(self) -> [bool; 4] {
        match self {
            CaseLabel::NeitherAchievable => [false, true, true, false],
            CaseLabel::CompromiseInsufficient => [false, true, false, true],
            CaseLabel::UnequalCompromise => [false; 4],
            _ => [true; 4],
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeclarationGame {
    pub c: [Q; 2],
    pub t: Q,
    pub m_r: Q,
    pub frontier: Vec<[Q; 2]>,
    pub worths: [Q; 2],
    pub mechanism: Mechanism,
    pub grid_step: Q,
}

impl DeclarationGame {
    pub fn new(profile: &PublicProfile, worths: [Q; 2], mechanism: Mechanism) -> Result<Self> {
        let c0 = profile.cost(0).ok_or(EngineError::MissingWorth(0))?;
        let c1 = profile.cost(1).ok_or(EngineError::MissingWorth(1))?;
        if profile.frontier.is_empty() {
            return Err(EngineError::EmptyFrontier("the worth game needs a joint plan".into()));
        }
        Ok(DeclarationGame {
            c: [c0, c1],
            t: profile.t,
            m_r: profile.m_r,
            frontier: profile.frontier.clone(),
            worths,
            mechanism,
            grid_step: half(),
        })
    }

    pub fn with_mechanism(&self, mechanism: Mechanism) -> Self {
        DeclarationGame { mechanism, ..self.clone() }
    }

    pub fn delta(&self) -> Q {
        (self.t - self.c[0] - self.c[1]) * half()
    }

    pub fn public_type(&self) -> PublicType {
        if plan_admits_any(&self.frontier, self.c) {
            PublicType::SymmetricCooperative
        } else if self.c[0] + self.c[1] >= self.t {
            PublicType::NonSymmetric
        } else {
            PublicType::SymmetricCompromise
        }
    }

    /// Declaration grid for one agent; `clipped` keeps only values up to the true worth.
    pub fn grid(&self, agent: usize, clipped: bool) -> Vec<Q> {
        let (i, j) = (agent, 1 - agent);
        let mut pts: BTreeSet<Q> = [
            zero(),
            self.c[i],
            self.m_r,
            self.worths[i],
            self.t - self.c[j],
            self.c[i] + self.delta(),
            self.t - self.worths[j],
            self.t - self.m_r,
        ]
        .into_iter()
        .filter(|x| *x >= zero())
        .collect();
        let top = pts.iter().copied().max().unwrap_or_default() + self.grid_step;
        if self.grid_step > zero() {
            let mut x = zero();
            while x <= top {
                pts.insert(x);
                x += self.grid_step;
            }
        }
        pts.into_iter().filter(|x| !clipped || *x <= self.worths[i]).collect()
    }
}

fn plan_admits_any(frontier: &[[Q; 2]], b: [Q; 2]) -> bool {
    frontier.iter().any(|x| plan_admits(x, &b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Both declared at least their stand-alone cost.
    BothAchievable,
    /// Only this agent (zero-based) declared at least its cost.
    OneAchievable(usize),
    /// Neither did.
    NeitherAchievable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Resolution {
    Deal {
        #[serde(with = "crate::num::pair_string")]
        roles: [Q; 2],
        #[serde(with = "crate::num::as_string")]
        p: Q,
    },
    Alone {
        agent: usize,
    },
    Conflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorthOutcome {
    #[serde(with = "crate::num::pair_string")]
    pub declared: [Q; 2],
    pub branch: Branch,
    pub resolution: Resolution,
    #[serde(with = "crate::num::pair_string")]
    pub apparent: [Q; 2],
    #[serde(with = "crate::num::pair_string")]
    pub actual: [Q; 2],
}

impl WorthOutcome {
    pub fn total(&self) -> Q {
        self.actual[0] + self.actual[1]
    }
}

fn conflict(declared: [Q; 2], branch: Branch) -> WorthOutcome {
    WorthOutcome { declared, branch, resolution: Resolution::Conflict, apparent: [zero(); 2], actual: [zero(); 2] }
}

/// Resolves one pair of declarations. Actual utilities use true worths.
pub fn resolve(game: &DeclarationGame, declared: [Q; 2]) -> WorthOutcome {
    let ok = [0, 1].map(|i| declared[i] >= game.c[i]);
    let branch = match ok {
        [true, true] => Branch::BothAchievable,
        [true, false] => Branch::OneAchievable(0),
        [false, true] => Branch::OneAchievable(1),
        [false, false] => Branch::NeitherAchievable,
    };
    match branch {
        Branch::NeitherAchievable if game.mechanism == Mechanism::Strict => conflict(declared, branch),
        Branch::BothAchievable | Branch::NeitherAchievable => {
            match best_mixed_split(&game.frontier, declared, SelectionRule::NashProduct) {
                Some((roles, p, apparent)) => WorthOutcome {
                    declared,
                    branch,
                    resolution: Resolution::Deal { roles, p },
                    apparent,
                    actual: [0, 1].map(|i| game.worths[i] - mixed_cost(&roles, p, i)),
                },
                None => conflict(declared, branch),
            }
        }
        Branch::OneAchievable(i) => controller_choice(game, declared, branch, i),
    }
}

/// The agent able to act alone either does so or makes the offer best for itself that the
/// opponent would still accept on its declaration.
fn controller_choice(game: &DeclarationGame, declared: [Q; 2], branch: Branch, i: usize) -> WorthOutcome {
    let j = 1 - i;
    let mut offer: Option<([Q; 2], Q, Q)> = None;
    for roles in &game.frontier {
        // cost_j(p) = p*roles[j] + (1-p)*roles[i] must not exceed declared[j].
        let (a, b) = (roles[i], roles[j]);
        let (mut lo, mut hi) = (zero(), one());
        let slope = b - a;
        let slack = declared[j] - a;
        if slope > zero() {
            hi = min_q(hi, slack / slope);
        } else if slope < zero() {
            lo = max_q(lo, slack / slope);
        } else if slack < zero() {
            continue;
        }
        if lo > hi {
            continue;
        }
        for p in [lo, hi] {
            let cost_i = mixed_cost(roles, p, i);
            if offer.is_none_or(|(_, _, c)| cost_i < c) {
                offer = Some((*roles, p, cost_i));
            }
        }
    }
    let alone = game.worths[i] - game.c[i];
    match offer {
        Some((roles, p, cost_i)) if game.worths[i] - cost_i >= alone => {
            let mut apparent = [zero(); 2];
            apparent[i] = declared[i] - cost_i;
            apparent[j] = declared[j] - mixed_cost(&roles, p, j);
            WorthOutcome {
                declared,
                branch,
                resolution: Resolution::Deal { roles, p },
                apparent,
                actual: [0, 1].map(|k| game.worths[k] - mixed_cost(&roles, p, k)),
            }
        }
        _ => {
            let mut actual = [zero(); 2];
            actual[i] = alone;
            let mut apparent = [zero(); 2];
            apparent[i] = declared[i] - game.c[i];
            WorthOutcome { declared, branch, resolution: Resolution::Alone { agent: i }, apparent, actual }
        }
    }
}

/// Declaration for `agent` under a fixed (non-iterative) strategy.
pub fn declaration(game: &DeclarationGame, agent: usize, strategy: Strategy) -> Q {
    let (i, j) = (agent, 1 - agent);
    let w = game.worths[i];
    match strategy {
        Strategy::MinSufficient => min_sufficient(w, game.c[i], game.m_r),
        Strategy::MinConcession => min_concession(w, game.c[i], game.c[j], game.t),
        Strategy::Combined => combined_strategy(game, agent),
        Strategy::Tidy => min_q(w, max_q(game.t - game.c[j], zero())),
        Strategy::GridBestResponse => grid_equilibrium(game).0[agent],
    }
}

/// Min-concession in symmetric compromise situations, min-sufficient otherwise.
pub fn combined_strategy(game: &DeclarationGame, agent: usize) -> Q {
    let (i, j) = (agent, 1 - agent);
    match game.public_type() {
        PublicType::SymmetricCompromise => min_concession(game.worths[i], game.c[i], game.c[j], game.t),
        _ => min_sufficient(game.worths[i], game.c[i], game.m_r),
    }
}

fn set(declared: [Q; 2], agent: usize, x: Q) -> [Q; 2] {
    let mut d = declared;
    d[agent] = x;
    d
}

/// Best declaration on the clipped grid against a fixed opponent declaration; ties go low.
pub fn best_response(game: &DeclarationGame, agent: usize, opponent: Q) -> Q {
    let mut best: Option<(Q, Q)> = None;
    for x in game.grid(agent, true) {
        let u = resolve(game, set([opponent, opponent], agent, x)).actual[agent];
        if best.is_none_or(|(_, bu)| u > bu) {
            best = Some((x, u));
        }
    }
    best.map(|(x, _)| x).unwrap_or_default()
}

/// Alternating best responses from truthful declarations. Returns the final pair and whether it
/// reached a fixed point.
pub fn grid_equilibrium(game: &DeclarationGame) -> ([Q; 2], bool) {
    let mut d = game.worths;
    for _ in 0..64 {
        let a = best_response(game, 0, d[1]);
        let b = best_response(game, 1, a);
        let next = [a, b];
        if next == d {
            return (d, true);
        }
        d = next;
    }
    (d, false)
}

pub fn classify_case(game: &DeclarationGame) -> CaseLabel {
    let (c, w) = (game.c, game.worths);
    match game.public_type() {
        PublicType::SymmetricCooperative => match (w[0] >= c[0], w[1] >= c[1]) {
            (true, true) => CaseLabel::BothAchievable,
            (false, false) => CaseLabel::NeitherAchievable,
            _ => CaseLabel::OneAchievable,
        },
        PublicType::NonSymmetric => {
            let j = if c[0] <= c[1] { 0 } else { 1 };
            let i = 1 - j;
            if w[i] < c[i] {
                CaseLabel::NoCompromiseNeeded
            } else if w[j] >= game.m_r {
                CaseLabel::CompromiseSufficient
            } else {
                CaseLabel::CompromiseInsufficient
            }
        }
        PublicType::SymmetricCompromise => {
            let d = game.delta();
            if w[0] < c[0] || w[1] < c[1] {
                CaseLabel::OneCannotCompromise
            } else if w[0] >= c[0] + d && w[1] >= c[1] + d {
                CaseLabel::EqualCompromise
            } else {
                CaseLabel::UnequalCompromise
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileEvaluation {
    pub mechanism: Mechanism,
    pub strategy: Strategy,
    pub case: CaseLabel,
    pub outcome: WorthOutcome,
    pub efficient: bool,
    pub stable: bool,
    #[serde(with = "crate::num::as_string")]
    pub best_total: Q,
    /// Profitable unilateral deviations found, as (agent, declaration).
    pub deviations: Vec<(usize, String)>,
}

pub fn evaluate_profile(game: &DeclarationGame, strategy: Strategy) -> ProfileEvaluation {
    let declared = match strategy {
        Strategy::GridBestResponse => grid_equilibrium(game).0,
        s => [declaration(game, 0, s), declaration(game, 1, s)],
    };
    let outcome = resolve(game, declared);
    let mut best_total: Option<Q> = None;
    for a in game.grid(0, false) {
        for b in game.grid(1, false) {
            let t = resolve(game, [a, b]).total();
            best_total = Some(best_total.map_or(t, |x: Q| x.max(t)));
        }
    }
    let best_total = best_total.unwrap_or_default().max(outcome.total());
    let mut deviations = Vec::new();
    for agent in 0..2 {
        for x in game.grid(agent, true) {
            if resolve(game, set(declared, agent, x)).actual[agent] > outcome.actual[agent] {
                deviations.push((agent, crate::num::fmt_q(&x)));
            }
        }
    }
    ProfileEvaluation {
        mechanism: game.mechanism,
        strategy,
        case: classify_case(game),
        efficient: outcome.total() == best_total,
        stable: deviations.is_empty(),
        outcome,
        best_total,
        deviations,
    }
}
