//! Many runs of one template with fresh seeds and starting points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use rendezvous::engine::{claims_suir_any, run_any, AnyScenario, EngineError, Expectation};
use rendezvous::geometry::{Coord1, Point, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub template: String,
    pub seeds: u64,
    pub gathered: u64,
    /// Largest gathering round among the runs that gathered.
    pub max_rounds: Option<u64>,
    pub mean_rounds: Option<f64>,
    pub violations: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOutcome {
    pub gathered: Option<u64>,
    pub violation: bool,
}

/// Whether a finished run contradicts the scenario's claim or stated expectation.
pub fn is_violation(scenario: &AnyScenario, gathered: bool) -> bool {
    let expected = match scenario.expect() {
        Some(Expectation::Gather) => gathered,
        Some(Expectation::NoGather) => !gathered,
        None => true,
    };
    !expected || (claims_suir_any(scenario) && !gathered)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn template_distance<P: Point>(positions: [P; 2]) -> f64 {
    let d = positions[0].distance(positions[1]);
    if d > 0.0 {
        d
    } else {
        1.0
    }
}

/// The `index`-th variant: new seed, first robot jittered around its
/// template position, second robot at a log-uniform distance from it within
/// a factor 10 of the template distance.
pub fn variant(template: &AnyScenario, master: u64, index: u64) -> AnyScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    let mut s = template.clone();
    match &mut s {
        AnyScenario::Line(s) => {
            let d = template_distance(s.initial_positions);
            let a = s.initial_positions[0].0 + rng.gen_range(-d..d);
            let len = log_uniform(&mut rng, d / 10.0, d * 10.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            s.initial_positions = [Coord1(a), Coord1(a + sign * len)];
            s.seed = rng.gen();
        }
        AnyScenario::Plane(s) => {
            let d = template_distance(s.initial_positions);
            let p = s.initial_positions[0];
            let a = Vec2::new(p.x + rng.gen_range(-d..d), p.y + rng.gen_range(-d..d));
            let len = log_uniform(&mut rng, d / 10.0, d * 10.0);
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            s.initial_positions = [a, a + Vec2::new(angle.cos(), angle.sin()) * len];
            s.seed = rng.gen();
        }
    }
    s
}

pub fn run_one(scenario: &AnyScenario) -> Result<RunOutcome, EngineError> {
    let gathered = run_any(scenario)?.status().gathered();
    Ok(RunOutcome {
        gathered,
        violation: is_violation(scenario, gathered.is_some()),
    })
}

pub fn sweep(
    name: &str,
    template: &AnyScenario,
    seeds: u64,
    master: u64,
) -> Result<SweepSummary, EngineError> {
    let outcomes = (0..seeds)
        .into_par_iter()
        .map(|i| run_one(&variant(template, master, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let rounds: Vec<u64> = outcomes.iter().filter_map(|o| o.gathered).collect();
    Ok(SweepSummary {
        template: name.to_string(),
        seeds,
        gathered: rounds.len() as u64,
        max_rounds: rounds.iter().copied().max(),
        mean_rounds: (!rounds.is_empty())
            .then(|| rounds.iter().sum::<u64>() as f64 / rounds.len() as f64),
        violations: outcomes.iter().filter(|o| o.violation).count() as u64,
    })
}
