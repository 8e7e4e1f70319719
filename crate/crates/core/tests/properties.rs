mod support;

use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn conditions_match_brute_force(frontier in prop::collection::vec(split(), 1..=4), b in split()) {
        conditions_vs_brute_force(frontier, b)?;
    }

    #[test]
    fn conditions_on_symmetric_profiles(m in 0i64..=6, extra in 0i64..=6, b in split()) {
        conditions_symmetric(m, extra, b)?;
    }

    #[test]
    fn mixed_deals_are_constant_sum(r in split(), b in split(), k in 0i64..=24, j in 0i64..=24) {
        constant_sum(r, b, k, j)?;
    }

    #[test]
    fn nash_and_equal_split_agree_on_mixed(frontier in prop::collection::vec(split(), 1..=4), b in split()) {
        nash_equal_split(frontier, b)?;
    }

    #[test]
    fn semi_coop_nonempty_when_worth_covers_cost(doc in world(), extra in (0i64..=4, 0i64..=4)) {
        semi_coop_nonempty(doc, extra)?;
    }

    #[test]
    fn semi_coop_has_mixed_equivalent(doc in world(), extra in (0i64..=6, 0i64..=6)) {
        mixed_equivalent(doc, extra)?;
    }

    #[test]
    fn hierarchy_is_monotone(doc in world(), extra in (0i64..=4, 0i64..=4)) {
        hierarchy(doc, extra)?;
    }

    #[test]
    fn frontier_matches_dijkstra(doc in world(), weights in (1i64..=3, 1i64..=3)) {
        frontier_vs_dijkstra(doc, weights)?;
    }
}
