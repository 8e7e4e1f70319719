#![allow(dead_code)]

use proptest::prelude::*;
use sodneg::arena::{Arena, Target};
use sodneg::deals::{mixed_cost, mixed_utility, ns_conditions, MixedDeal};
use sodneg::domain::{goal_satisfied, Domain};
use sodneg::mechanisms::*;
use sodneg::num::{q, qr, zero, Q};
use sodneg::planner::SearchBudget;
use sodneg::scenario::{AtomSpec, GoalSpec, ScenarioDocument, World};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

pub fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 200, max_global_rejects: 20_000, ..ProptestConfig::default() }
}

const NAMES: [&str; 3] = ["White", "Black", "Gray"];

/// Slots 1-3 with two or three blocks.
pub fn layout() -> impl Strategy<Value = Vec<Vec<String>>> {
    (2usize..=3, prop::collection::vec(0usize..3, 3)).prop_map(|(n, slots)| {
        let mut out = vec![Vec::new(); 3];
        for b in 0..n {
            out[slots[b]].push(NAMES[b].to_string());
        }
        out
    })
}

pub fn atom(blocks: usize) -> impl Strategy<Value = AtomSpec> {
    let b = move || (0..blocks).prop_map(|i| NAMES[i].to_string());
    prop_oneof![
        (b(), 1usize..=3).prop_map(|(x, n)| AtomSpec::InSlot(x, n)),
        b().prop_map(AtomSpec::Clear),
        (1usize..=3).prop_map(AtomSpec::SlotEmpty),
        (b(), b()).prop_filter("distinct", |(x, y)| x != y).prop_map(|(x, y)| AtomSpec::On(x, y)),
    ]
}

pub fn goal(blocks: usize) -> impl Strategy<Value = GoalSpec> {
    prop::collection::vec(atom(blocks), 1..=2).prop_map(|mut a| {
        a.push(AtomSpec::HandsEmpty);
        GoalSpec::All(a)
    })
}

pub fn world() -> impl Strategy<Value = ScenarioDocument> {
    layout().prop_flat_map(|l| {
        let n = l.iter().map(Vec::len).sum::<usize>();
        (Just(l), goal(n), goal(n)).prop_map(|(l, g1, g2)| ScenarioDocument {
            version: 1,
            name: "random".into(),
            description: None,
            domain: Some(sodneg::scenario::DomainSpec::SlottedBlocks { agents: 2 }),
            initial: Some(l),
            goals: vec![g1, g2],
            components: vec![],
            worths: None,
            profile: None,
            lies: vec![],
            plans: vec![],
            options: None,
        })
    })
}

pub fn budget() -> SearchBudget {
    SearchBudget::new(200_000)
}

/// Arena plus stand-alone costs, when both agents can act alone.
pub fn solvable(doc: &ScenarioDocument) -> Option<(Box<dyn Arena>, [Q; 2])> {
    let a = doc.arena(budget()).ok()?;
    let c = [a.stand_alone(0).ok()??, a.stand_alone(1).ok()??];
    Some((a, c))
}

pub fn brute_force_ns(frontier: &[[Q; 2]], b: [Q; 2]) -> bool {
    frontier.iter().any(|r| {
        let mut ps: Vec<Q> = (0..=60).map(|k| qr(k, 60)).collect();
        if r[0] != r[1] {
            ps.push((b[0] - r[1]) / (r[0] - r[1]));
            ps.push((b[1] - r[0]) / (r[1] - r[0]));
        }
        ps.into_iter()
            .filter(|p| *p >= zero() && *p <= q(1))
            .any(|p| (0..2).all(|i| b[i] - mixed_cost(r, p, i) >= zero()))
    })
}

pub fn split() -> impl Strategy<Value = [Q; 2]> {
    (0i64..=10, 0i64..=10).prop_map(|(a, b)| [q(a), q(b)])
}


pub fn doc(name: &str) -> ScenarioDocument {
    let path = format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
    ScenarioDocument::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub type Check = Result<(), TestCaseError>;

pub fn conditions_vs_brute_force(frontier: Vec<[Q; 2]>, b: [Q; 2]) -> Check {
    let t = ns_conditions(&frontier, b).unwrap();
    let brute = brute_force_ns(&frontier, b);
    prop_assert_eq!(t.nonempty(), brute);
    prop_assert_eq!(best_mixed_split(&frontier, b, SelectionRule::NashProduct).is_some(), brute);
    Ok(())
}

pub fn conditions_symmetric(m: i64, extra: i64, b: [Q; 2]) -> Check {
    let (m, t) = (q(m), q(2 * m + extra));
    let frontier = vec![[m, t - m], [t - m, m]];
    let th = ns_conditions(&frontier, b).unwrap();
    prop_assert_eq!(th.sum && th.min, brute_force_ns(&frontier, b));
    Ok(())
}

pub fn constant_sum(r: [Q; 2], b: [Q; 2], k: i64, j: i64) -> Check {
    let at = |p: Q| {
        let u = mixed_utility(&MixedDeal { roles: r, p }, b);
        u[0] + u[1]
    };
    prop_assert_eq!(at(qr(k, 24)), at(qr(j, 24)));
    prop_assert_eq!(at(qr(k, 24)), b[0] + b[1] - r[0] - r[1]);
    Ok(())
}

pub fn nash_equal_split(frontier: Vec<[Q; 2]>, b: [Q; 2]) -> Check {
    let n = best_mixed_split(&frontier, b, SelectionRule::NashProduct);
    let e = best_mixed_split(&frontier, b, SelectionRule::EqualSplit);
    if let Some((_, _, u)) = n {
        if u[0] == u[1] {
            prop_assert_eq!(e.map(|x| x.2), Some(u));
        }
    }
    Ok(())
}

fn with_worths(doc: &ScenarioDocument, extra: (i64, i64)) -> Result<(Box<dyn Arena>, [Q; 2]), TestCaseError> {
    let (arena, c) = solvable(doc).ok_or_else(|| TestCaseError::reject("an agent cannot act alone"))?;
    Ok((arena, [c[0] + q(extra.0), c[1] + q(extra.1)]))
}

pub fn semi_coop_nonempty(doc: ScenarioDocument, extra: (i64, i64)) -> Check {
    let (arena, w) = with_worths(&doc, extra)?;
    let setup = Setup::new(arena.as_ref(), w, SelectionRule::NashProduct);
    let o = unp_semicoop(&setup).unwrap();
    prop_assert!(o.deal.is_some());
    prop_assert!(o.apparent.iter().all(|u| *u >= zero()));
    Ok(())
}

pub fn mixed_equivalent(doc: ScenarioDocument, extra: (i64, i64)) -> Check {
    let (arena, w) = with_worths(&doc, extra)?;
    let setup = Setup::new(arena.as_ref(), w, SelectionRule::NashProduct);
    let o = unp_semicoop(&setup).unwrap();
    let Some(DealReport::SemiCoop { spill: [true, true], roles, remaining, .. }) = o.deal else { return Ok(()) };
    // The cooperative part followed by the winner's completion, finished from either role.
    let mut splits: Vec<[Q; 2]> = arena.frontier(Target::Joint).unwrap().iter().map(|p| p.cost).collect();
    for r in remaining {
        splits.push([roles[0] + r, roles[1]]);
        splits.push([roles[0], roles[1] + r]);
    }
    let cost = [w[0] - o.apparent[0], w[1] - o.apparent[1]];
    let found = splits.iter().any(|r| {
        if r[0] == r[1] {
            return cost == *r;
        }
        let p = (cost[0] - r[1]) / (r[0] - r[1]);
        p >= zero() && p <= q(1) && mixed_utility(&MixedDeal { roles: *r, p }, w) == o.apparent
    });
    prop_assert!(found, "no mixed deal matches {:?}", o.apparent);
    Ok(())
}

pub fn hierarchy(doc: ScenarioDocument, extra: (i64, i64)) -> Check {
    let (arena, w) = with_worths(&doc, extra)?;
    let setup = Setup::new(arena.as_ref(), w, SelectionRule::NashProduct);
    let h = hierarchy_report(&setup).unwrap();
    prop_assert!(h.monotone);
    prop_assert!(h.rows[1].native.product() >= h.rows[0].native.product());
    Ok(())
}

pub fn frontier_vs_dijkstra(doc: ScenarioDocument, weights: (i64, i64)) -> Check {
    let Ok(World::Slotted(d, s)) = doc.world() else { unreachable!() };
    let g = [0, 1].map(|i| sodneg::scenario::slotted_goal(&d, &s, &doc.goals[i]).unwrap());
    let both = g[0].and(&g[1]);
    let frontier = match sodneg::planner::joint_frontier(&d, &s, &both, budget()) {
        Ok(f) => f.costs(),
        Err(sodneg::error::EngineError::EmptyFrontier(_)) => vec![],
        Err(e) => panic!("{e}"),
    };
    let wv = [q(weights.0), q(weights.1)];
    // Weighted single-objective search over joint steps.
    let mut dist: HashMap<_, Q> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(s.clone(), zero());
    heap.push(Reverse((zero(), s.clone())));
    let mut best = None;
    while let Some(Reverse((cost, st))) = heap.pop() {
        if dist.get(&st).is_some_and(|x| *x < cost) {
            continue;
        }
        if goal_satisfied(&d, &both, &st) {
            best = Some(cost);
            break;
        }
        for (step, next) in d.joint_successors(&st) {
            let c = d.step_cost(&step);
            let nc = cost + wv[0] * c[0] + wv[1] * c[1];
            if dist.get(&next).is_none_or(|x| nc < *x) {
                dist.insert(next.clone(), nc);
                heap.push(Reverse((nc, next)));
            }
        }
    }
    let from_frontier = frontier.iter().map(|x| wv[0] * x[0] + wv[1] * x[1]).min();
    prop_assert_eq!(from_frontier, best);
    Ok(())
}
