use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sodneg::mechanisms::DealReport;
use sodneg::num::Q;

fn draw(rng: &mut ChaCha8Rng, p: Q) -> bool {
    match (u32::try_from(*p.numer()), u32::try_from(*p.denom())) {
        (Ok(n), Ok(d)) if n <= d => rng.gen_ratio(n, d),
        _ => rng.gen_bool(*p.numer() as f64 / *p.denom() as f64),
    }
}

fn roles(rng: &mut ChaCha8Rng, p: Q) -> &'static str {
    if draw(rng, p) {
        "agent 1 takes role 1"
    } else {
        "agent 1 takes role 2"
    }
}

/// One concrete branch of the deal's lotteries; reports never depend on it.
pub fn realize(deal: &DealReport, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match deal {
        DealReport::Mixed { p, .. } => roles(&mut rng, *p).to_string(),
        DealReport::SemiCoop { p, q, .. } => {
            let r = roles(&mut rng, *p);
            let winner = if draw(&mut rng, *q) { 1 } else { 2 };
            format!("{r}, coin picks agent {winner}")
        }
        DealReport::MultiPlan { legs, q } => {
            let k = if draw(&mut rng, *q) { 0 } else { 1 };
            format!("plan {} chosen, {}", k + 1, roles(&mut rng, legs[k].p))
        }
        DealReport::Coin { q } => {
            let winner = if draw(&mut rng, *q) { 1 } else { 2 };
            format!("coin picks agent {winner}")
        }
        DealReport::StayAtStart => "world stays at the start state".into(),
    }
}
