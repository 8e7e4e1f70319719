//! Browser bindings for the demo page. Every function takes rationals as strings and returns JSON.

use serde_json::{json, Value};
use sodneg::deals::{mixed_utility, semicoop_utility, MixedDeal, SemiCoopDeal};
use sodneg::mechanisms::{best_mixed_split, SelectionRule};
use sodneg::num::{fmt_q, parse_q, qr, Q};
use sodneg::planner::PublicProfile;
use sodneg::worth_game::{evaluate_profile, resolve, DeclarationGame, Mechanism, Resolution, Strategy};
use wasm_bindgen::prelude::*;

fn num(name: &str, text: &str) -> Result<Q, String> {
    parse_q(text).map_err(|_| format!("{name}: not a rational: {text:?}"))
}

fn s(x: &Q) -> String {
    fmt_q(x)
}

fn finish(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn steps(n: i64) -> impl Iterator<Item = Q> {
    (0..=n).map(move |k| qr(k, n))
}

/// Best mixed deal over the role split (r1, r2) and its mirror, plus agent utilities along p.
#[wasm_bindgen]
pub fn mixed_deal(r1: &str, r2: &str, b1: &str, b2: &str, rule: &str) -> String {
    finish((|| {
        let roles = [num("r1", r1)?, num("r2", r2)?];
        let b = [num("b1", b1)?, num("b2", b2)?];
        let rule = SelectionRule::parse(rule).ok_or_else(|| format!("unknown rule {rule:?}"))?;
        let curve: Vec<Value> = steps(20)
            .map(|p| {
                let u = mixed_utility(&MixedDeal { roles, p }, b);
                json!({ "p": s(&p), "u": [s(&u[0]), s(&u[1])] })
            })
            .collect();
        let best = best_mixed_split(&[roles, [roles[1], roles[0]]], b, rule).map(|(r, p, u)| {
            json!({ "roles": [s(&r[0]), s(&r[1])], "p": s(&p), "u": [s(&u[0]), s(&u[1])] })
        });
        Ok(json!({ "curve": curve, "best": best }))
    })())
}

/// Resolved outcome for every pair of declarations on the game grid, and the strategy profile.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn worth_grid(c1: &str, c2: &str, t: &str, m_r: &str, w1: &str, w2: &str, mechanism: &str, strategy: &str) -> String {
    finish((|| {
        let profile = PublicProfile::abstract_profile(num("c1", c1)?, num("c2", c2)?, num("T", t)?, num("M_r", m_r)?);
        let m = Mechanism::parse(mechanism).ok_or_else(|| format!("unknown mechanism {mechanism:?}"))?;
        let st = Strategy::parse(strategy).ok_or_else(|| format!("unknown strategy {strategy:?}"))?;
        let game = DeclarationGame::new(&profile, [num("w1", w1)?, num("w2", w2)?], m).map_err(|e| e.to_string())?;
        let (xs, ys) = (game.grid(0, true), game.grid(1, true));
        let cells: Vec<Vec<Value>> = xs
            .iter()
            .map(|a| {
                ys.iter()
                    .map(|b| {
                        let o = resolve(&game, [*a, *b]);
                        let kind = match o.resolution {
                            Resolution::Deal { .. } => "deal".to_string(),
                            Resolution::Alone { agent } => format!("alone {}", agent + 1),
                            Resolution::Conflict => "conflict".to_string(),
                        };
                        json!({ "u": [s(&o.actual[0]), s(&o.actual[1])], "kind": kind })
                    })
                    .collect()
            })
            .collect();
        let e = evaluate_profile(&game, st);
        Ok(json!({
            "rows": xs.iter().map(s).collect::<Vec<_>>(),
            "cols": ys.iter().map(s).collect::<Vec<_>>(),
            "cells": cells,
            "case": { "row": e.case.row(), "name": e.case.name() },
            "declared": [s(&e.outcome.declared[0]), s(&e.outcome.declared[1])],
            "actual": [s(&e.outcome.actual[0]), s(&e.outcome.actual[1])],
            "efficient": e.efficient,
            "stable": e.stable,
        }))
    })())
}

/// Expected utilities of a cooperate-then-coin deal as the coin weight q varies.
#[wasm_bindgen]
pub fn semicoop_curve(w1: &str, w2: &str, r1: &str, r2: &str, rem1: &str, rem2: &str, p: &str) -> String {
    finish((|| {
        let w = [num("w1", w1)?, num("w2", w2)?];
        let deal = |q: Q| -> Result<SemiCoopDeal, String> {
            Ok(SemiCoopDeal {
                roles: [num("r1", r1)?, num("r2", r2)?],
                p: num("p", p)?,
                q,
                remaining: [num("rem1", rem1)?, num("rem2", rem2)?],
                spill: [false, false],
            })
        };
        let mut best: Option<(Q, [Q; 2])> = None;
        let mut curve = Vec::new();
        for q in steps(40) {
            let u = semicoop_utility(&deal(q)?, w);
            if u[0] >= Q::default() && u[1] >= Q::default() && best.is_none_or(|(_, b)| u[0] * u[1] > b[0] * b[1]) {
                best = Some((q, u));
            }
            curve.push(json!({ "q": s(&q), "u": [s(&u[0]), s(&u[1])] }));
        }
        Ok(json!({
            "curve": curve,
            "best": best.map(|(q, u)| json!({ "q": s(&q), "u": [s(&u[0]), s(&u[1])] })),
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: String) -> Value {
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn mixed_deal_matches_engine() {
        let v = parse(mixed_deal("2", "6", "3", "6", "nash-product"));
        assert_eq!(v["best"]["p"], "7/8");
        assert_eq!(v["best"]["u"], json!(["1/2", "1/2"]));
        assert_eq!(v["curve"].as_array().unwrap().len(), 21);
    }

    #[test]
    fn worth_grid_reports_case() {
        let v = parse(worth_grid("2", "2", "8", "2", "7", "3", "strict", "combined"));
        assert_eq!(v["case"]["row"], 8);
        assert_eq!(v["efficient"], false);
        assert!(!v["cells"].as_array().unwrap().is_empty());
    }

    #[test]
    fn semicoop_curve_peaks_at_half() {
        let v = parse(semicoop_curve("12", "12", "2", "2", "2", "2", "1/2"));
        assert_eq!(v["best"]["q"], "1/2");
        assert_eq!(v["best"]["u"], json!(["3", "3"]));
    }

    #[test]
    fn bad_input_is_reported() {
        let v = parse(mixed_deal("x", "6", "3", "6", "nash-product"));
        assert!(v["error"].as_str().unwrap().contains("r1"));
    }
}
