use crate::{Failure, Report};
use serde_json::{json, Value};
use sodneg::arena::{Arena, Target};
use sodneg::deals::{classify_interaction, ns_conditions, NsConditions};
use sodneg::lies::{lie_search, LieReport};
use sodneg::mechanisms::{
    coin_outcome, hierarchy_report, negotiate as run_mechanism, resolve_worths, DealType, NegotiationOutcome,
    SelectionRule, Setup,
};
use sodneg::num::{fmt_q, Q};
use sodneg::planner::SearchBudget;
use sodneg::scenario::ScenarioDocument;
use sodneg::worth_game::{evaluate_profile, DeclarationGame, Mechanism, Resolution, Strategy};
use std::fmt::Write;

fn pair(x: &[Q; 2]) -> String {
    format!("({},{})", fmt_q(&x[0]), fmt_q(&x[1]))
}

fn qs(x: &[Q]) -> Vec<String> {
    x.iter().map(fmt_q).collect()
}

fn opt(x: Option<Q>) -> String {
    x.map(|v| fmt_q(&v)).unwrap_or_else(|| "inf".into())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

#[derive(Clone, Copy)]
pub struct MechanismOptions {
    pub deal_type: DealType,
    pub rule: SelectionRule,
    pub semi_budget: Option<Q>,
}

pub fn mechanism_options(
    doc: &ScenarioDocument,
    deal_type: Option<&str>,
    rule: Option<&str>,
) -> Result<MechanismOptions, Failure> {
    let o = doc.options();
    let dt = deal_type.map(String::from).or(o.deal_type).unwrap_or_else(|| "mixed".into());
    let rl = rule.map(String::from).or(o.rule).unwrap_or_else(|| "nash-product".into());
    Ok(MechanismOptions {
        deal_type: DealType::parse(&dt).ok_or_else(|| Failure::Engine(format!("unknown deal type {dt:?}")))?,
        rule: SelectionRule::parse(&rl).ok_or_else(|| Failure::Engine(format!("unknown rule {rl:?}")))?,
        semi_budget: o.semi_budget,
    })
}

fn stand_alone(arena: &dyn Arena) -> Result<[Option<Q>; 2], Failure> {
    Ok([arena.stand_alone(0)?, arena.stand_alone(1)?])
}

fn check_json(t: &NsConditions) -> Value {
    json!({ "sum": t.sum, "min": t.min, "witness": t.witness.map(|w| qs(&w)) })
}

fn check_line(label: &str, t: &NsConditions) -> String {
    format!(
        "{label}: sum condition {}, min condition {}, negotiation set {}\n",
        holds(t.sum),
        holds(t.min),
        if t.nonempty() { "non-empty" } else { "empty" }
    )
}

fn replays(doc: &ScenarioDocument, text: &mut String) -> Result<Vec<Value>, Failure> {
    let mut out = Vec::new();
    if doc.plans.is_empty() {
        return Ok(out);
    }
    let world = doc.world()?;
    for p in &doc.plans {
        let (cost, end) = world.replay(p)?;
        writeln!(text, "replay {}: cost=({}) final {}", p.name, qs(&cost).join(","), end).unwrap();
        out.push(json!({ "name": p.name, "cost": qs(&cost), "final_state": end }));
    }
    Ok(out)
}

pub fn plan(doc: &ScenarioDocument, budget: SearchBudget) -> Result<Report, Failure> {
    let mut text = format!("scenario: {}\n", doc.name);
    let mut body = json!({ "command": "plan", "scenario": doc.name });
    if doc.goals.len() == 2 || !doc.components.is_empty() {
        let arena = doc.arena(budget)?;
        let c = stand_alone(arena.as_ref())?;
        let points = arena.frontier(Target::Joint)?;
        let costs: Vec<[Q; 2]> = points.iter().map(|p| p.cost).collect();
        let frontier = costs.iter().map(pair).collect::<Vec<_>>().join(",");
        match ns_conditions(&costs, [c[0].unwrap_or_default(), c[1].unwrap_or_default()]) {
            Ok(_) if c.iter().any(Option::is_none) => {
                writeln!(text, "c=({},{}) frontier={{{}}}", opt(c[0]), opt(c[1]), frontier).unwrap();
                text.push_str("an agent cannot reach its goal alone\n");
            }
            Ok(check) => {
                let profile = doc.public_profile(budget)?;
                writeln!(text, "{}", profile.summary()).unwrap();
                text.push_str(&check_line("stand-alone baselines", &check));
                body["t"] = json!(fmt_q(&profile.t));
                body["m_r"] = json!(fmt_q(&profile.m_r));
                body["stand_alone_check"] = check_json(&check);
            }
            Err(_) => {
                writeln!(text, "c=({},{}) T=inf frontier={{}}", opt(c[0]), opt(c[1])).unwrap();
                text.push_str("the goals cannot be reached together\n");
            }
        }
        for p in &points {
            writeln!(text, "witness {}: {} -> {}", pair(&p.cost), p.witness.steps.join("; "), p.witness.final_state)
                .unwrap();
        }
        body["c"] = json!([c[0].map(|x| fmt_q(&x)), c[1].map(|x| fmt_q(&x))]);
        body["frontier"] = points
            .iter()
            .map(|p| {
                json!({
                    "cost": qs(&p.cost),
                    "lands": p.lands,
                    "steps": p.witness.steps,
                    "final_state": p.witness.final_state,
                })
            })
            .collect();
    }
    body["replays"] = json!(replays(doc, &mut text)?);
    Ok(Report { text, json: body })
}

pub fn classify(doc: &ScenarioDocument, budget: SearchBudget) -> Result<Report, Failure> {
    let arena = doc.arena(budget)?;
    let c = stand_alone(arena.as_ref())?;
    let w = resolve_worths(arena.as_ref(), [doc.worth(0), doc.worth(1)])?;
    let costs: Vec<[Q; 2]> = arena.frontier(Target::Joint)?.iter().map(|p| p.cost).collect();
    let c_or_w = [0, 1].map(|i| c[i].unwrap_or(w[i]));
    let kind = classify_interaction(&costs, c_or_w, w);
    let mut text = format!("scenario: {}\n", doc.name);
    writeln!(text, "c=({},{}) w={}", opt(c[0]), opt(c[1]), pair(&w)).unwrap();
    text.push_str(&format!("classification: {}\n", kind.tag.name()));
    let mut body = json!({
        "command": "classify",
        "scenario": doc.name,
        "c": [c[0].map(|x| fmt_q(&x)), c[1].map(|x| fmt_q(&x))],
        "worths": qs(&w),
        "classification": kind,
    });
    if let Ok(t) = ns_conditions(&costs, w) {
        text.push_str(&check_line("worth baselines", &t));
        body["worth_check"] = check_json(&t);
    }
    if let (Some(a), Some(b)) = (c[0], c[1]) {
        if let Ok(t) = ns_conditions(&costs, [a, b]) {
            text.push_str(&check_line("stand-alone baselines", &t));
            body["stand_alone_check"] = check_json(&t);
        }
    }
    Ok(Report { text, json: body })
}

fn outcome_lines(o: &NegotiationOutcome, text: &mut String) {
    match &o.deal {
        Some(d) => writeln!(text, "outcome: {}", d.summary()).unwrap(),
        None => text.push_str("outcome: no individual rational deal\n"),
    }
    writeln!(text, "utilities {}, {}", fmt_q(&o.apparent[0]), fmt_q(&o.apparent[1])).unwrap();
    if o.actual != o.apparent {
        writeln!(text, "actual utilities {}, {}", fmt_q(&o.actual[0]), fmt_q(&o.actual[1])).unwrap();
    }
}

fn hierarchy_lines(setup: &Setup, text: &mut String) -> Result<Value, Failure> {
    let h = hierarchy_report(setup)?;
    text.push_str("deal type   native                 effective\n");
    for row in &h.rows {
        writeln!(
            text,
            "{:<11} {:<22} {}",
            row.deal_type.name(),
            pair(&row.native.apparent),
            pair(&row.effective.apparent)
        )
        .unwrap();
    }
    writeln!(text, "monotone: {}, native monotone: {}", yes(h.monotone), yes(h.native_monotone)).unwrap();
    Ok(serde_json::to_value(&h).expect("hierarchy serializes"))
}

pub fn negotiate(
    doc: &ScenarioDocument,
    budget: SearchBudget,
    opts: MechanismOptions,
    hierarchy: bool,
    seed: Option<u64>,
) -> Result<Report, Failure> {
    let arena = doc.arena(budget)?;
    let worths = resolve_worths(arena.as_ref(), [doc.worth(0), doc.worth(1)])?;
    let c = stand_alone(arena.as_ref())?;
    let costs: Vec<[Q; 2]> = arena.frontier(Target::Joint)?.iter().map(|p| p.cost).collect();
    let kind = classify_interaction(&costs, [0, 1].map(|i| c[i].unwrap_or(worths[i])), worths);
    let mut setup = Setup::new(arena.as_ref(), worths, opts.rule);
    setup.semi_budget = opts.semi_budget;
    let mut outcome = run_mechanism(&setup, opts.deal_type)?;
    if outcome.deal.is_none() && opts.deal_type == DealType::Mixed {
        outcome = coin_outcome(&setup, opts.deal_type)?;
    }
    let mut text = format!("scenario: {}\n", doc.name);
    writeln!(text, "deal type: {}, rule: {}", opts.deal_type.name(), opts.rule.name()).unwrap();
    writeln!(text, "worths {}, classification: {}", pair(&worths), kind.tag.name()).unwrap();
    outcome_lines(&outcome, &mut text);
    let mut body = json!({
        "command": "negotiate",
        "scenario": doc.name,
        "worths": qs(&worths),
        "classification": kind,
        "outcome": outcome,
    });
    if hierarchy {
        body["hierarchy"] = hierarchy_lines(&setup, &mut text)?;
    }
    if let (Some(seed), Some(deal)) = (seed, &outcome.deal) {
        let s = crate::sample::realize(deal, seed);
        writeln!(text, "sampled (seed {seed}): {s}").unwrap();
        body["sampled"] = json!({ "seed": seed, "branch": s });
    }
    Ok(Report { text, json: body })
}

pub fn hierarchy(doc: &ScenarioDocument, budget: SearchBudget, opts: MechanismOptions) -> Result<Report, Failure> {
    let arena = doc.arena(budget)?;
    let worths = resolve_worths(arena.as_ref(), [doc.worth(0), doc.worth(1)])?;
    let mut setup = Setup::new(arena.as_ref(), worths, opts.rule);
    setup.semi_budget = opts.semi_budget;
    let mut text = format!("scenario: {}\nrule: {}\n", doc.name, opts.rule.name());
    let h = hierarchy_lines(&setup, &mut text)?;
    Ok(Report { text, json: json!({ "command": "hierarchy", "scenario": doc.name, "hierarchy": h }) })
}

pub fn worth_game(
    doc: &ScenarioDocument,
    budget: SearchBudget,
    mechanism: Option<&str>,
    strategy: Option<&str>,
) -> Result<Report, Failure> {
    let o = doc.options();
    let m = mechanism.map(String::from).or(o.mechanism).unwrap_or_else(|| "strict".into());
    let s = strategy.map(String::from).or(o.strategy).unwrap_or_else(|| "combined".into());
    let m = Mechanism::parse(&m).ok_or_else(|| Failure::Engine(format!("unknown mechanism {m:?}")))?;
    let s = Strategy::parse(&s).ok_or_else(|| Failure::Engine(format!("unknown strategy {s:?}")))?;
    let profile = doc.public_profile(budget)?;
    let w = [0, 1].map(|i| doc.worth(i).or(profile.cost(i)));
    let w = [0, 1]
        .map(|i| w[i].ok_or(sodneg::error::EngineError::MissingWorth(i)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut game = DeclarationGame::new(&profile, [w[0], w[1]], m)?;
    if let Some(step) = o.grid_step {
        game.grid_step = step;
    }
    let e = evaluate_profile(&game, s);
    let mut text = format!("scenario: {}\n{}\n", doc.name, profile.summary());
    writeln!(text, "case: row {} {}", e.case.row(), e.case.name()).unwrap();
    writeln!(text, "mechanism: {}, strategy: {}", json_name(&m), json_name(&s)).unwrap();
    text.push_str("agent  true  declared\n");
    for i in 0..2 {
        writeln!(text, "{:<6} {:<5} {}", i + 1, fmt_q(&game.worths[i]), fmt_q(&e.outcome.declared[i])).unwrap();
    }
    let res = match &e.outcome.resolution {
        Resolution::Deal { roles, p } => format!("deal roles {} p={}", pair(roles), fmt_q(p)),
        Resolution::Alone { agent } => format!("agent {} acts alone", agent + 1),
        Resolution::Conflict => "conflict".into(),
    };
    writeln!(text, "outcome: {res}; efficient: {}; stable: {}", yes(e.efficient), yes(e.stable)).unwrap();
    writeln!(text, "utilities {}, {}", fmt_q(&e.outcome.actual[0]), fmt_q(&e.outcome.actual[1])).unwrap();
    let body = json!({
        "command": "worth-game",
        "scenario": doc.name,
        "profile": profile,
        "worths": qs(&game.worths),
        "evaluation": e,
    });
    Ok(Report { text, json: body })
}

fn json_name<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn lie_row(r: &LieReport, text: &mut String) {
    let hit = if r.true_goal_achieved.is_empty() {
        "-".to_string()
    } else {
        r.true_goal_achieved.iter().map(|b| if *b { "y" } else { "n" }).collect::<Vec<_>>().join("")
    };
    writeln!(
        text,
        "{:<16} {:<8} {:<14} {:<14} {}",
        r.name,
        fmt_q(&r.declared_worth),
        pair(&r.apparent),
        pair(&r.actual),
        hit
    )
    .unwrap();
}

pub fn lie_eval(doc: &ScenarioDocument, budget: SearchBudget, opts: MechanismOptions) -> Result<Report, Failure> {
    let mut text = format!("scenario: {}\n", doc.name);
    writeln!(text, "deal type: {}, rule: {}", opts.deal_type.name(), opts.rule.name()).unwrap();
    let mut searches = Vec::new();
    for agent in 0..2 {
        if !doc.lies.iter().any(|l| l.agent == agent + 1) {
            continue;
        }
        let s = lie_search(doc, agent, &doc.lies, opts.deal_type, opts.rule, budget, opts.semi_budget)?;
        writeln!(text, "liar: agent {}", agent + 1).unwrap();
        text.push_str("name             worth    apparent       actual         true goal\n");
        lie_row(&s.truth, &mut text);
        for r in &s.candidates {
            lie_row(r, &mut text);
        }
        let truth = s.truth.actual[agent];
        match s.best.as_ref().and_then(|b| s.candidates.iter().find(|r| &r.name == b)) {
            Some(r) => {
                writeln!(text, "best: {} actual {} vs truth {}", r.name, fmt_q(&r.actual[agent]), fmt_q(&truth)).unwrap()
            }
            None => writeln!(text, "best: truth ({})", fmt_q(&truth)).unwrap(),
        }
        searches.push(s);
    }
    if searches.is_empty() {
        text.push_str("no lie candidates\n");
    }
    let body = json!({ "command": "lie-eval", "scenario": doc.name, "searches": searches });
    Ok(Report { text, json: body })
}
