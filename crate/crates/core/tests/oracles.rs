use sodneg::arena::Target;
use sodneg::deals::{classify_interaction, ns_conditions, InteractionTag};
use sodneg::lies::lie_search;
use sodneg::mechanisms::*;
use sodneg::num::{q, qr, Q};
use sodneg::planner::SearchBudget;
use sodneg::scenario::ScenarioDocument;

fn doc(name: &str) -> ScenarioDocument {
    let path = format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
    ScenarioDocument::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(name: &str, dt: DealType, rule: SelectionRule) -> NegotiationOutcome {
    let d = doc(name);
    let arena = d.arena(SearchBudget::default()).unwrap();
    let w = resolve_worths(arena.as_ref(), [d.worth(0), d.worth(1)]).unwrap();
    let setup = Setup::new(arena.as_ref(), w, rule);
    negotiate(&setup, dt).unwrap()
}

fn both(x: Q) -> [Q; 2] {
    [x, x]
}

#[test]
fn gray_pedestals_profile() {
    let p = doc("gray-pedestals").public_profile(SearchBudget::default()).unwrap();
    assert_eq!(p.c, vec![Some(q(2)), Some(q(2))]);
    assert_eq!((p.t, p.m_r), (q(8), q(2)));
    assert!(p.frontier.contains(&[q(2), q(6)]) && p.frontier.contains(&[q(6), q(2)]));
    let t = ns_conditions(&p.frontier, [q(2), q(2)]).unwrap();
    assert!(!t.sum && !t.nonempty());
}

#[test]
fn exchange_slots_mixed() {
    let o = run("exchange-slots", DealType::Mixed, SelectionRule::NashProduct);
    match o.deal.unwrap() {
        DealReport::Mixed { roles, p, .. } => assert_eq!((roles, p), (both(q(2)), qr(1, 2))),
        d => panic!("{d:?}"),
    }
    assert_eq!(o.apparent, both(q(2)));
    let p = doc("exchange-slots").public_profile(SearchBudget::default()).unwrap();
    assert_eq!(p.t, q(4));
    let k = classify_interaction(&p.frontier, [q(4), q(4)], [q(4), q(4)]);
    assert_eq!(k.tag, InteractionTag::SymmetricCooperative);
}

#[test]
fn gray_pedestals_with_worths() {
    let o = run("gray-pedestals-worths", DealType::Mixed, SelectionRule::NashProduct);
    match o.deal.unwrap() {
        DealReport::Mixed { roles, p, .. } => assert_eq!((roles, p), ([q(2), q(6)], qr(7, 8))),
        d => panic!("{d:?}"),
    }
    assert_eq!(o.apparent, both(qr(1, 2)));
}

#[test]
fn crossed_towers_is_a_coin() {
    let d = doc("crossed-towers");
    let arena = d.arena(SearchBudget::default()).unwrap();
    assert!(arena.frontier(Target::Joint).unwrap().is_empty());
    let w = resolve_worths(arena.as_ref(), [None, None]).unwrap();
    let setup = Setup::new(arena.as_ref(), w, SelectionRule::NashProduct);
    assert!(negotiate(&setup, DealType::Mixed).unwrap().deal.is_none());
    let c = coin_outcome(&setup, DealType::Mixed).unwrap();
    assert_eq!(c.deal.unwrap().summary(), "conflict; coin q=1/2 at s");
}

#[test]
fn shared_swap_semi_coop() {
    let d = doc("shared-swap");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let setup = Setup::new(arena.as_ref(), both(q(12)), SelectionRule::NashProduct);
    assert_eq!(coin_outcome(&setup, DealType::SemiCoop).unwrap().apparent, both(q(1)));
    let o = negotiate(&setup, DealType::SemiCoop).unwrap();
    match o.deal.unwrap() {
        DealReport::SemiCoop { roles, q: qq, .. } => assert_eq!((roles, qq), (both(q(2)), qr(1, 2))),
        d => panic!("{d:?}"),
    }
    assert_eq!(o.apparent, both(q(3)));
    assert_eq!(run("shared-swap-low-worth", DealType::SemiCoop, SelectionRule::NashProduct).apparent, both(q(1)));
}

#[test]
fn decoupled_swaps_levels() {
    assert_eq!(run("decoupled-swaps", DealType::SemiCoop, SelectionRule::NashProduct).apparent, both(q(1)));
    let m = run("decoupled-swaps", DealType::MultiPlan, SelectionRule::NashProduct);
    assert_eq!(m.apparent, both(q(3)));
    assert_eq!(m.deal.unwrap().weight(), Some(qr(1, 2)));
}

#[test]
fn five_pedestals_hierarchy() {
    let d = doc("five-pedestals-two-swaps");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let w = resolve_worths(arena.as_ref(), [d.worth(0), d.worth(1)]).unwrap();
    let setup = Setup::new(arena.as_ref(), w, SelectionRule::NashProduct);
    let h = hierarchy_report(&setup).unwrap();
    assert_eq!(h.rows[0].native.apparent, both(q(2)));
    assert_eq!(h.rows[1].native.apparent, both(q(4)));
    assert!(h.monotone);
}

#[test]
fn goal_lies() {
    let d = doc("gray-bases-lies");
    let s = lie_search(&d, 0, &d.lies, DealType::Mixed, SelectionRule::NashProduct, SearchBudget::default(), None).unwrap();
    assert_eq!(s.truth.actual, both(q(4)));
    let by = |n: &str| s.candidates.iter().find(|r| r.name == n).unwrap().clone();
    assert_eq!((by("relaxed").apparent, by("relaxed").actual[0]), ([q(0), q(2)], q(6)));
    assert_eq!((by("fabricated").apparent, by("fabricated").actual[0]), (both(q(2)), q(6)));
}

#[test]
fn worth_lies() {
    for (name, dt) in [("hidden-subgoal", DealType::SemiCoop), ("interference-decoy", DealType::MultiPlan)] {
        let d = doc(name);
        let s = lie_search(&d, 0, &d.lies, dt, SelectionRule::EqualSplit, SearchBudget::default(), None).unwrap();
        let r = &s.candidates[0];
        assert_eq!(r.outcome.deal.as_ref().unwrap().weight(), Some(qr(4, 7)), "{name}");
        assert_eq!(r.apparent, both(qr(10, 7)), "{name}");
        assert_eq!(r.actual[0], qr(18, 7), "{name}");
        assert_eq!(s.truth.actual[0], q(2), "{name}");
        assert_eq!(s.best.as_deref(), Some(r.name.as_str()));
    }
}
