//! One line per acceptance criterion. Exits non-zero when any criterion fails.

mod support;

use proptest::prelude::*;
use proptest::test_runner::{RngSeed, TestRunner};
use sodneg::deals::{classify_interaction, ns_conditions, InteractionTag};
use sodneg::lies::lie_search;
use sodneg::mechanisms::*;
use sodneg::num::{fmt_q, q, qr, Q};
use sodneg::planner::SearchBudget;
use sodneg::worth_game::{evaluate_profile, CaseLabel, DeclarationGame, Mechanism, Strategy as Play};
use support::doc;

type Outcome = Result<(), String>;

fn ensure(ok: bool, what: impl Into<String>) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn pair(x: [Q; 2]) -> String {
    format!("({},{})", fmt_q(&x[0]), fmt_q(&x[1]))
}

fn setup_for<'a>(arena: &'a dyn sodneg::arena::Arena, d: &sodneg::scenario::ScenarioDocument) -> Setup<'a> {
    let w = resolve_worths(arena, [d.worth(0), d.worth(1)]).unwrap();
    Setup::new(arena, w, SelectionRule::NashProduct)
}

fn c1_gray_pedestals() -> Outcome {
    let p = doc("gray-pedestals").public_profile(SearchBudget::default()).map_err(|e| e.to_string())?;
    ensure(p.c == vec![Some(q(2)), Some(q(2))], format!("c = {:?}", p.c))?;
    ensure(p.t == q(8), format!("T = {}", p.t))?;
    let t = ns_conditions(&p.frontier, [q(2), q(2)]).unwrap();
    ensure(!t.nonempty(), "negotiation set should be empty")
}

fn c2_exchange_slots() -> Outcome {
    let d = doc("exchange-slots");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let p = d.public_profile(SearchBudget::default()).unwrap();
    ensure(p.t == q(4), format!("T = {}", p.t))?;
    let o = pmm_mixed(&setup_for(arena.as_ref(), &d)).unwrap();
    match o.deal {
        Some(DealReport::Mixed { roles, p: pp, .. }) => {
            ensure(roles == [q(2), q(2)] && pp == qr(1, 2), format!("roles {} p {}", pair(roles), pp))?
        }
        other => return Err(format!("{other:?}")),
    }
    ensure(o.apparent == [q(2), q(2)], pair(o.apparent))?;
    let k = classify_interaction(&p.frontier, [q(4), q(4)], [q(4), q(4)]);
    ensure(k.tag == InteractionTag::SymmetricCooperative, k.tag.name())
}

fn c3_gray_pedestals_worths() -> Outcome {
    let d = doc("gray-pedestals-worths");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let o = pmm_mixed(&setup_for(arena.as_ref(), &d)).unwrap();
    ensure(o.deal.as_ref().and_then(|x| x.weight()) == Some(qr(7, 8)), format!("{:?}", o.deal))?;
    ensure(o.apparent == [qr(1, 2), qr(1, 2)], pair(o.apparent))
}

fn c4_conflict_coin() -> Outcome {
    let mut runner = TestRunner::new(ProptestConfig { cases: 100, rng_seed: RngSeed::Fixed(4), failure_persistence: None, ..ProptestConfig::default() });
    let gain = (1i64..=500, 1i64..=60).prop_map(|(n, d)| qr(n, d));
    runner
        .run(&(gain.clone(), gain), |(a, b)| {
            prop_assert_eq!(coin_weight([a, b]), Some(qr(1, 2)));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    match conflict_coin([true, false], [q(5), q(4)], [q(2), q(2)]) {
        CoinOutcome::StayAtStart { utilities } => ensure(utilities == [q(5), q(0)], pair(utilities)),
        other => Err(format!("{other:?}")),
    }
}

fn c5_shared_swap() -> Outcome {
    let d = doc("shared-swap");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let setup = setup_for(arena.as_ref(), &d);
    let coin = coin_outcome(&setup, DealType::SemiCoop).unwrap();
    ensure(coin.apparent == [q(1), q(1)], format!("coin {}", pair(coin.apparent)))?;
    let o = unp_semicoop(&setup).unwrap();
    ensure(matches!(o.deal, Some(DealReport::SemiCoop { q: h, .. }) if h == qr(1, 2)), format!("{:?}", o.deal))?;
    ensure(o.apparent == [q(3), q(3)], format!("semi {}", pair(o.apparent)))?;
    let d8 = doc("shared-swap-low-worth");
    let arena8 = d8.arena(SearchBudget::default()).unwrap();
    let o8 = unp_semicoop(&setup_for(arena8.as_ref(), &d8)).unwrap();
    ensure(o8.apparent == [q(1), q(1)], format!("w=8 {}", pair(o8.apparent)))
}

fn c6_five_pedestals() -> Outcome {
    let d = doc("five-pedestals-two-swaps");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let h = hierarchy_report(&setup_for(arena.as_ref(), &d)).unwrap();
    ensure(h.rows[0].native.apparent == [q(2), q(2)], format!("mixed {}", pair(h.rows[0].native.apparent)))?;
    ensure(h.rows[1].native.apparent == [q(4), q(4)], format!("semi {}", pair(h.rows[1].native.apparent)))?;
    ensure(h.rows[1].effective.product() > h.rows[0].effective.product() && h.monotone, "semi-coop should dominate")
}

fn c7_decoupled_swaps() -> Outcome {
    let d = doc("decoupled-swaps");
    let arena = d.arena(SearchBudget::default()).unwrap();
    let setup = setup_for(arena.as_ref(), &d);
    let s = unp_semicoop(&setup).unwrap();
    let m = unp_multiplan(&setup).unwrap();
    ensure(s.apparent == [q(1), q(1)], format!("semi {}", pair(s.apparent)))?;
    ensure(m.apparent == [q(3), q(3)], format!("multi {}", pair(m.apparent)))?;
    ensure(m.apparent[0] + m.apparent[1] == q(6) && s.apparent[0] + s.apparent[1] == q(2), "totals")
}

fn c8_goal_lies() -> Outcome {
    let d = doc("gray-bases-lies");
    let s = lie_search(&d, 0, &d.lies, DealType::Mixed, SelectionRule::NashProduct, SearchBudget::default(), None)
        .map_err(|e| e.to_string())?;
    for (name, app) in [("relaxed", [q(0), q(2)]), ("fabricated", [q(2), q(2)])] {
        let r = s.candidates.iter().find(|r| r.name == name).ok_or(name)?;
        ensure(r.apparent == app && r.actual[0] == q(6), format!("{name}: {} {}", pair(r.apparent), pair(r.actual)))?;
    }
    Ok(())
}

fn c9_worth_lies() -> Outcome {
    for (name, dt) in [("hidden-subgoal", DealType::SemiCoop), ("interference-decoy", DealType::MultiPlan)] {
        let d = doc(name);
        let s = lie_search(&d, 0, &d.lies, dt, SelectionRule::EqualSplit, SearchBudget::default(), None)
            .map_err(|e| e.to_string())?;
        let r = &s.candidates[0];
        let w = r.outcome.deal.as_ref().and_then(|x| x.weight());
        ensure(w == Some(qr(4, 7)), format!("{name}: q {w:?}"))?;
        ensure(r.actual[0] == qr(18, 7), format!("{name}: actual {}", pair(r.actual)))?;
        if name == "hidden-subgoal" {
            ensure(r.apparent == [qr(10, 7), qr(10, 7)], format!("{name}: apparent {}", pair(r.apparent)))?;
        }
    }
    Ok(())
}

fn c10_worth_game_table() -> Outcome {
    for (k, label) in CaseLabel::ALL.iter().enumerate() {
        let d = doc(&format!("worth-{}", label.name()));
        let p = d.public_profile(SearchBudget::default()).unwrap();
        let w = [d.worth(0).unwrap(), d.worth(1).unwrap()];
        let mut got = Vec::new();
        for m in [Mechanism::Strict, Mechanism::Tolerant] {
            let e = evaluate_profile(&DeclarationGame::new(&p, w, m).unwrap(), Play::Combined);
            ensure(e.case == *label, format!("row {} classified as {}", k + 1, e.case.name()))?;
            got.extend([e.efficient, e.stable]);
        }
        ensure(got == label.expected(), format!("row {}: {got:?}", k + 1))?;
    }
    Ok(())
}

fn suite<S: Strategy>(name: &str, s: S, f: impl Fn(S::Value) -> support::Check) -> Outcome {
    let mut runner = TestRunner::new(ProptestConfig { rng_seed: RngSeed::Fixed(11), failure_persistence: None, ..support::cfg() });
    runner.run(&s, f).map_err(|e| format!("{name}: {e}"))
}

fn c11_properties() -> Outcome {
    use support::*;
    let frontier = || prop::collection::vec(split(), 1..=4);
    suite("sum and min conditions", (frontier(), split()), |(f, b)| conditions_vs_brute_force(f, b))?;
    suite("conditions on symmetric profiles", (0i64..=6, 0i64..=6, split()), |(m, e, b)| conditions_symmetric(m, e, b))?;
    suite("semi-coop non-empty", (world(), (0i64..=4, 0i64..=4)), |(d, e)| semi_coop_nonempty(d, e))?;
    suite("mixed equivalent", (world(), (0i64..=6, 0i64..=6)), |(d, e)| mixed_equivalent(d, e))?;
    suite("constant sum", (split(), split(), 0i64..=24, 0i64..=24), |(r, b, k, j)| constant_sum(r, b, k, j))?;
    suite("nash vs equal split", (frontier(), split()), |(f, b)| nash_equal_split(f, b))?;
    suite("hierarchy", (world(), (0i64..=4, 0i64..=4)), |(d, e)| hierarchy(d, e))?;
    suite("frontier vs dijkstra", (world(), (1i64..=3, 1i64..=3)), |(d, w)| frontier_vs_dijkstra(d, w))
}

fn c12_shared_resource() -> Outcome {
    let d = doc("shared-resource");
    let world = d.world().unwrap();
    let (cost, end) = world.replay(&d.plans[0]).map_err(|e| e.to_string())?;
    ensure(cost == vec![q(0), q(0), q(2)], format!("third-waits cost {cost:?}"))?;
    ensure(end == "(NOP,2) (NOP,3) (NOP,2)", format!("final {end}"))?;
    let (cost, _) = world.replay(&d.plans[1]).map_err(|e| e.to_string())?;
    ensure(cost == vec![q(0), q(2), q(0)], format!("second-waits cost {cost:?}"))?;
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("gray pedestals: c=(2,2), T=8, empty negotiation set", c1_gray_pedestals),
        ("exchange slots: T=4, p=1/2, utilities (2,2), symmetric-cooperative", c2_exchange_slots),
        ("gray pedestals with worths (3,6): p=7/8, utilities (1/2,1/2)", c3_gray_pedestals_worths),
        ("conflict coin weight 1/2 and stay-at-start", c4_conflict_coin),
        ("shared swap: coin 1, semi-coop q=1/2 utility 3, low worth 1", c5_shared_swap),
        ("five pedestals: mixed 2, semi-coop 4, hierarchy", c6_five_pedestals),
        ("decoupled swaps: semi-coop 1, multi-plan 3", c7_decoupled_swaps),
        ("goal lies: relaxed and fabricated", c8_goal_lies),
        ("worth lies: hidden subgoal and decoy", c9_worth_lies),
        ("worth game table, strict and tolerant", c10_worth_game_table),
        ("property suites, 200 cases each", c11_properties),
        ("shared resource replays", c12_shared_resource),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {label}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {label}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
