use sodneg::num::q;
use sodneg::planner::SearchBudget;
use sodneg::scenario::ScenarioDocument;

fn all() -> Vec<(String, String)> {
    let dir = format!("{}/scenarios", env!("CARGO_MANIFEST_DIR"));
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn every_scenario_round_trips() {
    let docs = all();
    assert!(docs.len() >= 20);
    for (name, text) in docs {
        let a = ScenarioDocument::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let b = ScenarioDocument::parse(&a.to_json()).unwrap();
        assert_eq!(a, b, "{name}");
        assert_eq!(a.to_json(), b.to_json(), "{name}");
    }
}

#[test]
fn unknown_fields_are_located() {
    let err = ScenarioDocument::parse("{\"version\": 1,\n \"name\": \"x\",\n \"colour\": 3}").unwrap_err().to_string();
    assert!(err.contains("colour") && err.contains("line 3"), "{err}");
    let err = ScenarioDocument::parse(r#"{"version": 1, "name": "x", "goals": [{"all": [{"levitate": "White"}]}]}"#)
        .unwrap_err()
        .to_string();
    assert!(err.contains("levitate"), "{err}");
    assert!(ScenarioDocument::parse(r#"{"version": 2, "name": "x"}"#).is_err());
}

#[test]
fn shared_resource_replays() {
    let (_, text) = all().into_iter().find(|(n, _)| n == "shared-resource").unwrap();
    let doc = ScenarioDocument::parse(&text).unwrap();
    let world = doc.world().unwrap();
    let (cost, end) = world.replay(&doc.plans[0]).unwrap();
    assert_eq!(cost, vec![q(0), q(0), q(2)]);
    assert_eq!(end, "(NOP,2) (NOP,3) (NOP,2)");
    let (cost, _) = world.replay(&doc.plans[1]).unwrap();
    assert_eq!(cost, vec![q(0), q(2), q(0)]);
}

#[test]
fn start_in_both_goals_has_zero_total() {
    let doc = ScenarioDocument::parse(
        r#"{"version":1,"name":"done","domain":{"kind":"slotted-blocks"},"initial":[["White"],[]],
            "goals":[{"all":[{"in-slot":["White",1]}]},{"all":[{"slot-empty":2}]}]}"#,
    )
    .unwrap();
    let p = doc.public_profile(SearchBudget::default()).unwrap();
    assert_eq!(p.t, q(0));
}

#[test]
fn budget_is_enforced() {
    let (_, text) = all().into_iter().find(|(n, _)| n == "gray-pedestals").unwrap();
    let doc = ScenarioDocument::parse(&text).unwrap();
    assert!(doc.public_profile(SearchBudget::new(5)).is_err());
}
