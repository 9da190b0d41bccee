//! Executable forms of the correctness lemmas.
//!
//! Each check either answers a single question (`check_f_bound`,
//! `case_table_common`, ...) or scans traces and fuzz samples and returns a
//! [`LemmaReport`] listing every offending input.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::{CrashPlan, RobotSet};
use crate::engine::{run, run_protocol, EngineError, Scenario, Trace};
use crate::geometry::{
    level, lex_positive, line_frame, to_line, AgreementMode, Conformal, Coord1, LineSimilarity,
    Point, Vec2,
};
use crate::precise;
use crate::protocols::{Protocol, ProtocolId, ProtocolSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error(
        "(x, y) = ({x}, {y}) is outside the lemma's domain for d = {d}, δ = {delta}: {reason}"
    )]
    Inadmissible {
        d: f64,
        x: f64,
        y: f64,
        delta: f64,
        reason: &'static str,
    },
    #[error("{0}")]
    Precondition(String),
    #[error("simulation failed: {0}")]
    Engine(String),
}

impl From<EngineError> for CheckError {
    fn from(e: EngineError) -> Self {
        CheckError::Engine(e.to_string())
    }
}

/// Outcome of one lemma check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub samples: u64,
    pub violations: Vec<String>,
    /// Largest `lhs - rhs` seen for an inequality `lhs ≤ rhs`; positive
    /// means violated. Zero when the check is not an inequality.
    #[serde(serialize_with = "precise::serialize")]
    pub max_slack: f64,
}

impl LemmaReport {
    fn new(lemma: &str) -> Self {
        LemmaReport {
            lemma: lemma.to_owned(),
            samples: 0,
            violations: Vec::new(),
            max_slack: f64::NEG_INFINITY,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn observe(&mut self, slack: f64) {
        self.max_slack = self.max_slack.max(slack);
    }

    fn merge(mut self, other: LemmaReport) -> Self {
        self.samples += other.samples;
        self.violations.extend(other.violations);
        self.max_slack = self.max_slack.max(other.max_slack);
        self
    }

    fn finish(mut self) -> Self {
        if self.max_slack == f64::NEG_INFINITY {
            self.max_slack = 0.0;
        }
        self
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: {} samples, {} violations, max slack {:e}",
            self.lemma,
            self.samples,
            self.violations.len(),
            self.max_slack
        )
    }
}

// ---------------------------------------------------------------------------
// Distance bound

/// Whether `|d - x - y| ≤ d - min(δ, d/2)` when one robot travels `x` and
/// the other `y` towards each other, at least one of them heading for the
/// middle.
pub fn check_f_bound(d: f64, x: f64, y: f64, delta: f64) -> Result<bool, CheckError> {
    let inadmissible = |reason| {
        Err(CheckError::Inadmissible {
            d,
            x,
            y,
            delta,
            reason,
        })
    };
    if !(d > 0.0 && delta > 0.0 && d.is_finite() && delta.is_finite()) {
        return inadmissible("d and δ must be positive");
    }
    if !(x >= 0.0 && y >= 0.0) {
        return inadmissible("distances travelled are non-negative");
    }
    if x == 0.0 && y == 0.0 {
        return inadmissible("someone must move");
    }
    let sum = x + y;
    if sum < (d / 2.0).min(delta) || sum > 1.5 * d {
        return inadmissible("x + y must lie in [min(d/2, δ), 3d/2]");
    }
    if x > d / 2.0 && y > d / 2.0 {
        return inadmissible("one robot must head for the middle");
    }
    Ok(f_bound_slack(d, x, y, delta) <= 0.0)
}

fn f_bound_slack(d: f64, x: f64, y: f64, delta: f64) -> f64 {
    (d - x - y).abs() - (d - delta.min(d / 2.0))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Draws `samples` admissible tuples and checks the bound on each. Work is
/// split into chunks with their own RNG stream, so the result does not
/// depend on the thread count.
pub fn fuzz_f_bound(samples: u64, seed: u64) -> LemmaReport {
    const CHUNK: u64 = 4096;
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut report = LemmaReport::new("distance bound f(d,x,y)");
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let d = log_uniform(&mut rng, 1e-3, 1e3);
                let delta = log_uniform(&mut rng, 1e-3, 1e3);
                let floor = (d / 2.0).min(delta);
                // the robot heading for the middle travels at most d/2
                let (x, y) = if rng.gen_bool(0.1) {
                    // extreme corner: middle reached, other robot overshoots fully
                    (d / 2.0, d)
                } else {
                    let x = rng.gen_range(0.0..=d / 2.0);
                    let y = rng.gen_range((floor - x).max(0.0)..=1.5 * d - x);
                    (x, y)
                };
                let (x, y) = if rng.gen_bool(0.5) { (x, y) } else { (y, x) };
                report.samples += 1;
                match check_f_bound(d, x, y, delta) {
                    Ok(true) => report.observe(f_bound_slack(d, x, y, delta)),
                    Ok(false) => {
                        report.observe(f_bound_slack(d, x, y, delta));
                        report
                            .violations
                            .push(format!("d={d:e} x={x:e} y={y:e} δ={delta:e}"));
                    }
                    Err(e) => report.violations.push(format!("sampler produced {e}")),
                }
            }
            report
        })
        .reduce(
            || LemmaReport::new("distance bound f(d,x,y)"),
            LemmaReport::merge,
        )
        .finish()
}

// ---------------------------------------------------------------------------
// Two-round decrease

/// Slack allowed for round-off in the two-round decrease.
pub const DECREASE_SLACK: f64 = 1e-12;

/// Scans `d_t` for windows where `d_{t+2} > d_t - min(δ, d_t/2)`, skipping
/// windows that end gathered (`d_{t+2} ≤ ε`).
pub fn two_round_decrease(distances: &[f64], delta: f64, epsilon: f64) -> LemmaReport {
    let mut report = LemmaReport::new("two-round decrease");
    for (t, w) in distances.windows(3).enumerate() {
        let (d0, d2) = (w[0], w[2]);
        if d2 <= epsilon {
            continue;
        }
        report.samples += 1;
        let slack = d2 - (d0 - delta.min(d0 / 2.0));
        report.observe(slack);
        if slack > DECREASE_SLACK {
            report.violations.push(format!(
                "d_{t} = {d0:e}, d_{} = {d2:e}, δ = {delta:e}",
                t + 2
            ));
        }
    }
    report.finish()
}

pub fn check_two_round_decrease<P: Point>(trace: &Trace<P>, delta: f64) -> LemmaReport {
    two_round_decrease(&trace.distances(), delta, trace.scenario.epsilon)
}

// ---------------------------------------------------------------------------
// Congruence tables

/// How the robots orient the line: common, both see themselves on the
/// left, or both on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    Common,
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseOutcome {
    RendezvousInOneRound,
    Reaches {
        orientation: Orientation,
        residues: (u8, u8),
    },
}

impl fmt::Display for CaseOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseOutcome::RendezvousInOneRound => f.write_str("RendezvousInOneRound"),
            CaseOutcome::Reaches {
                orientation,
                residues: (i, j),
            } => {
                let prefix = match orientation {
                    Orientation::Common => "",
                    Orientation::L => "L",
                    Orientation::R => "R",
                };
                write!(f, "Reaches {prefix}({i},{j})")
            }
        }
    }
}

fn residue(level: i32) -> u8 {
    level.rem_euclid(4) as u8
}

fn reaches(orientation: Orientation, i: u8, j: u8) -> CaseOutcome {
    CaseOutcome::Reaches {
        orientation,
        residues: (i, j),
    }
}

/// Expected outcomes for robots sharing the line orientation, indexed by
/// `(left level, right level) mod 4`.
pub fn expected_common(i: u8, j: u8) -> CaseOutcome {
    use Orientation::Common;
    match (i, j) {
        (0, 1) => reaches(Common, 2, 1),
        (1, 1) => reaches(Common, 2, 2),
        (2, 1) => reaches(Common, 2, 3),
        (3, 0) => reaches(Common, 1, 0),
        (3, 1) => reaches(Common, 1, 3),
        (3, 2) => reaches(Common, 3, 0),
        (3, 3) => reaches(Common, 0, 0),
        _ => CaseOutcome::RendezvousInOneRound,
    }
}

/// Expected outcomes for robots with opposite orientations, `i ≤ j`.
pub fn expected_opposite(kind: Orientation, i: u8, j: u8) -> CaseOutcome {
    use Orientation::{L, R};
    match (kind, i, j) {
        (L, 0, 3) => reaches(R, 0, 1),
        (L, 1, 3) => reaches(R, 0, 2),
        (L, 2, 3) => reaches(R, 0, 3),
        (L, 3, 3) => reaches(R, 3, 3),
        (R, 0, 1) => reaches(L, 1, 2),
        (R, 1, 1) => reaches(L, 1, 1),
        (R, 1, 2) => reaches(L, 2, 3),
        (R, 1, 3) => reaches(L, 0, 2),
        _ => CaseOutcome::RendezvousInOneRound,
    }
}

/// One rigid FSYNC round from robots at `0` and `1` on the line, where robot
/// `r` measures distance `measured[r]` and sees the other robot on the
/// positive side iff `left[r]`. Returns the outcome as seen after the round.
fn simulate_round(
    protocol: &dyn Protocol<Coord1>,
    measured: [f64; 2],
    left: [bool; 2],
) -> Result<CaseOutcome, CheckError> {
    // robot 1 sits at +1: robot 0 sees it on the positive side unflipped,
    // robot 1 sees robot 0 there only when flipped
    let frame = |scale: f64, flip: bool| {
        LineSimilarity::new(scale, flip).map_err(|e| CheckError::Precondition(e.to_string()))
    };
    let h = [frame(measured[0], !left[0])?, frame(measured[1], left[1])?];
    let mut scenario = Scenario::new(
        AgreementMode::Line1DDisoriented,
        [Coord1(0.0), Coord1(1.0)],
        protocol.id(),
    );
    scenario.similarities = h;
    scenario.max_rounds = 1;
    let trace = run_protocol(&scenario, protocol)?;
    let after = trace.records[0].after;
    if after[0].distance(after[1]) <= scenario.epsilon {
        return Ok(CaseOutcome::RendezvousInOneRound);
    }
    let mut seen = [(false, 0u8); 2];
    for r in 0..2 {
        let b = h[r].apply(after[1 - r] - after[r]);
        let lvl = level(b.0.abs()).map_err(|e| CheckError::Engine(e.to_string()))?;
        seen[r] = (b.0 > 0.0, residue(lvl));
    }
    Ok(match (seen[0].0, seen[1].0) {
        (true, true) => {
            let (a, b) = (seen[0].1.min(seen[1].1), seen[0].1.max(seen[1].1));
            reaches(Orientation::L, a, b)
        }
        (false, false) => {
            let (a, b) = (seen[0].1.min(seen[1].1), seen[0].1.max(seen[1].1));
            reaches(Orientation::R, a, b)
        }
        (true, false) => reaches(Orientation::Common, seen[0].1, seen[1].1),
        (false, true) => reaches(Orientation::Common, seen[1].1, seen[0].1),
    })
}

/// Distance a robot at level `lvl` measures, with mantissa `m ∈ [1, 2)`.
fn at_level(lvl: i32, m: f64) -> f64 {
    m * 2f64.powi(-lvl)
}

pub const REPRESENTATIVE_MANTISSA: f64 = 1.5;

/// Outcome of one round for robots sharing the orientation, left robot at
/// level `i`, right robot at level `j`.
pub fn case_common_with(
    protocol: &dyn Protocol<Coord1>,
    i: i32,
    j: i32,
    mantissas: (f64, f64),
) -> Result<CaseOutcome, CheckError> {
    simulate_round(
        protocol,
        [at_level(i, mantissas.0), at_level(j, mantissas.1)],
        [true, false],
    )
}

/// Outcome of one round for robots that both see themselves on the same
/// side (`kind` L or R), at levels `i` and `j`.
pub fn case_opposite_with(
    protocol: &dyn Protocol<Coord1>,
    kind: Orientation,
    i: i32,
    j: i32,
    mantissas: (f64, f64),
) -> Result<CaseOutcome, CheckError> {
    let left = match kind {
        Orientation::L => true,
        Orientation::R => false,
        Orientation::Common => {
            return Err(CheckError::Precondition(
                "opposite orientations are L or R".into(),
            ))
        }
    };
    simulate_round(
        protocol,
        [at_level(i, mantissas.0), at_level(j, mantissas.1)],
        [left, left],
    )
}

fn mod4() -> Box<dyn Protocol<Coord1>> {
    Coord1::resolve(&ProtocolId::Mod4Disoriented).expect("built in")
}

pub fn case_table_common(i: u8, j: u8) -> Result<CaseOutcome, CheckError> {
    let m = REPRESENTATIVE_MANTISSA;
    case_common_with(mod4().as_ref(), i.into(), j.into(), (m, m))
}

pub fn case_table_opposite(kind: Orientation, i: u8, j: u8) -> Result<CaseOutcome, CheckError> {
    let m = REPRESENTATIVE_MANTISSA;
    case_opposite_with(mod4().as_ref(), kind, i.into(), j.into(), (m, m))
}

/// Every case of both tables: the representative distance plus
/// `fuzz_per_class` random levels and mantissas from each residue class.
pub fn verify_case_tables(
    protocol: &dyn Protocol<Coord1>,
    fuzz_per_class: usize,
    seed: u64,
) -> LemmaReport {
    let mut report = LemmaReport::new("congruence tables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = |i: u8, j: u8| {
        let mut v = vec![(i32::from(i), i32::from(j), (1.5, 1.5))];
        for _ in 0..fuzz_per_class {
            let li = i32::from(i) + 4 * rng.gen_range(-4..=4);
            let lj = i32::from(j) + 4 * rng.gen_range(-4..=4);
            v.push((li, lj, (rng.gen_range(1.0..2.0), rng.gen_range(1.0..2.0))));
        }
        v
    };
    let mut record = |label: String, got: Result<CaseOutcome, CheckError>, want: CaseOutcome| {
        report.samples += 1;
        match got {
            Ok(got) if got == want => {}
            Ok(got) => report
                .violations
                .push(format!("{label}: got {got}, expected {want}")),
            Err(e) => report.violations.push(format!("{label}: {e}")),
        }
    };
    for i in 0..4u8 {
        for j in 0..4u8 {
            for (li, lj, m) in draws(i, j) {
                let got = case_common_with(protocol, li, lj, m);
                record(format!("({li},{lj}) m={m:?}"), got, expected_common(i, j));
            }
        }
    }
    for kind in [Orientation::L, Orientation::R] {
        for i in 0..4u8 {
            for j in i..4u8 {
                for (li, lj, m) in draws(i, j) {
                    let got = case_opposite_with(protocol, kind, li, lj, m);
                    record(
                        format!("{kind:?}{{{li},{lj}}} m={m:?}"),
                        got,
                        expected_opposite(kind, i, j),
                    );
                }
            }
        }
    }
    report.max_slack = 0.0;
    report
}

// ---------------------------------------------------------------------------
// Crashes

/// Rounds a lone correct robot needs to join a robot crashed at round 0,
/// with rigid FSYNC moves. The correct robot measures distance
/// `1.5 · 2^-residue` and sees itself on `correct_side`.
pub fn check_crash_bound(
    protocol: &ProtocolId,
    correct_left: bool,
    residue: u8,
) -> Result<u64, CheckError> {
    let d = at_level(residue.into(), REPRESENTATIVE_MANTISSA);
    crash_rounds(protocol, correct_left, d, 1.0)
}

/// Rounds for the correct robot 0 to reach robot 1, crashed at round 0,
/// starting `d` apart in the global frame, with robot 0 using `scale`.
pub fn crash_rounds(
    protocol: &ProtocolId,
    correct_left: bool,
    d: f64,
    scale: f64,
) -> Result<u64, CheckError> {
    let other = if correct_left { d } else { -d };
    let mut scenario = Scenario::new(
        AgreementMode::Line1DOriented,
        [Coord1(0.0), Coord1(other)],
        protocol.clone(),
    );
    scenario.similarities[0] =
        LineSimilarity::new(scale, false).map_err(|e| CheckError::Precondition(e.to_string()))?;
    scenario.crash = CrashPlan::at_start(1);
    scenario.max_rounds = 200;
    run(&scenario)?
        .status
        .gathered()
        .ok_or_else(|| CheckError::Engine(format!("{protocol} did not gather from d = {d}")))
}

// ---------------------------------------------------------------------------
// Reduction to the line

/// The 1D frame `ā ↦ σ·s·ā` a robot with planar frame `h` effectively uses
/// on the oriented line with unit direction `v`: `σ = +1` iff `h(v)` is
/// lexicographically positive.
pub fn reduced_similarity(h: &crate::geometry::Similarity, v: Vec2) -> LineSimilarity {
    let flip = !lex_positive(h.apply(v));
    LineSimilarity::new(h.scale(), flip).expect("similarity scales are positive")
}

/// Tolerance for matching a planar execution against its line image.
pub const REDUCTION_TOLERANCE: f64 = 1e-9;

/// Runs a lifted scenario and the matching line scenario side by side and
/// compares the line image of every planar configuration with the line run.
pub fn check_reduction_commutes(scenario: &Scenario<Vec2>) -> Result<LemmaReport, CheckError> {
    let ProtocolId::Lift(inner) = &scenario.protocol else {
        return Err(CheckError::Precondition(format!(
            "{} is not a lifted protocol",
            scenario.protocol
        )));
    };
    let frame = line_frame(scenario.initial_positions)
        .map_err(|e| CheckError::Precondition(e.to_string()))?;
    let project = |p: Vec2| to_line(&frame, p);
    let mut line = Scenario::new(
        AgreementMode::Line1DDisoriented,
        [
            project(scenario.initial_positions[0]).expect("on its own line"),
            project(scenario.initial_positions[1]).expect("on its own line"),
        ],
        (**inner).clone(),
    );
    line.similarities = scenario
        .similarities
        .map(|h| reduced_similarity(&h, frame.direction));
    line.initial_lights = scenario.initial_lights;
    line.scheduler = scenario.scheduler.clone();
    line.crash = scenario.crash;
    line.delta = scenario.delta;
    line.truncation = scenario.truncation.clone();
    line.epsilon = scenario.epsilon;
    line.max_rounds = scenario.max_rounds;
    line.seed = scenario.seed;

    let plane = run(scenario)?;
    let reduced = run(&line)?;
    let mut report = LemmaReport::new("reduction commutes with execution");
    if plane.records.len() != reduced.records.len() || plane.status != reduced.status {
        report.violations.push(format!(
            "planar run ended {:?} after {} rounds, line run {:?} after {}",
            plane.status,
            plane.records.len(),
            reduced.status,
            reduced.records.len()
        ));
    }
    for (a, b) in plane.records.iter().zip(&reduced.records) {
        if a.activated != b.activated {
            report.violations.push(format!(
                "round {}: activations {:?} vs {:?}",
                a.round, a.activated, b.activated
            ));
        }
        for r in 0..2 {
            report.samples += 1;
            match project(a.after[r]) {
                Ok(m) => {
                    let gap = (m.0 - b.after[r].0).abs();
                    report.observe(gap - REDUCTION_TOLERANCE);
                    if gap > REDUCTION_TOLERANCE {
                        report.violations.push(format!(
                            "round {} robot {r}: m(C) = {:e}, line run {:e}",
                            a.round, m.0, b.after[r].0
                        ));
                    }
                }
                Err(e) => report
                    .violations
                    .push(format!("round {} robot {r} left the line: {e}", a.round)),
            }
        }
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Fairness

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FairnessAudit {
    /// Longest run of rounds without activation; `None` for a robot that
    /// crashes during the trace.
    pub max_idle: [Option<u64>; 2],
    pub activations: [u64; 2],
}

/// Longest idle run per correct robot over a sequence of rounds.
pub fn audit_activations(rounds: &[(RobotSet, [bool; 2])]) -> FairnessAudit {
    let mut streak = [0u64; 2];
    let mut max_idle = [Some(0u64); 2];
    let mut activations = [0u64; 2];
    for (active, crashed) in rounds {
        for r in 0..2 {
            if crashed[r] {
                max_idle[r] = None;
                continue;
            }
            if active.contains(r) {
                activations[r] += 1;
                streak[r] = 0;
            } else {
                streak[r] += 1;
                if let Some(m) = &mut max_idle[r] {
                    *m = (*m).max(streak[r]);
                }
            }
        }
    }
    FairnessAudit {
        max_idle,
        activations,
    }
}

pub fn audit_fairness<P: Point>(trace: &Trace<P>) -> FairnessAudit {
    let rounds: Vec<_> = trace
        .records
        .iter()
        .map(|r| (r.activated, r.crashed))
        .collect();
    audit_activations(&rounds)
}

/// Every correct robot activated at least once, and never idle for more
/// than `max_idle` consecutive rounds.
pub fn check_fairness(audit: &FairnessAudit, max_idle: u64) -> LemmaReport {
    let mut report = LemmaReport::new("fair activation");
    for r in 0..2 {
        let Some(idle) = audit.max_idle[r] else {
            continue;
        };
        report.samples += 1;
        report.observe(idle as f64 - max_idle as f64);
        if audit.activations[r] == 0 {
            report.violations.push(format!("robot {r} never activated"));
        }
        if idle > max_idle {
            report.violations.push(format!(
                "robot {r} idle for {idle} rounds (allowed {max_idle})"
            ));
        }
    }
    report.finish()
}

// ---------------------------------------------------------------------------
// Symmetric one-axis case

pub const SYMMETRIC_TOLERANCE: f64 = 1e-12;

/// While `d_t > 2δ`, each round must shrink the distance by exactly `δ`.
pub fn check_symmetric_decrease(trace: &Trace<Vec2>, delta: f64) -> LemmaReport {
    let mut report = LemmaReport::new("symmetric decrease by δ");
    let d = trace.distances();
    for (t, w) in d.windows(2).enumerate() {
        if w[0] <= 2.0 * delta {
            break;
        }
        report.samples += 1;
        let err = (w[1] - (w[0] - delta)).abs();
        report.observe(err - SYMMETRIC_TOLERANCE);
        if err > SYMMETRIC_TOLERANCE {
            report.violations.push(format!(
                "round {}: {:e} -> {:e}, δ = {delta}",
                t + 1,
                w[0],
                w[1]
            ));
        }
    }
    if trace.status.gathered().is_none() {
        report
            .violations
            .push(format!("did not gather: {:?}", trace.status));
    }
    report.finish()
}

// ---------------------------------------------------------------------------
// Everything

/// Number of random scenarios drawn per fuzzed check in [`verify_all`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyBudget {
    pub f_bound_samples: u64,
    pub case_fuzz: usize,
    pub decrease_traces: u64,
    pub reduction_runs: u64,
}

impl Default for VerifyBudget {
    fn default() -> Self {
        VerifyBudget {
            f_bound_samples: 100_000,
            case_fuzz: 32,
            decrease_traces: 200,
            reduction_runs: 100,
        }
    }
}

/// Draws a planar similarity admissible under `mode`.
pub fn random_similarity(rng: &mut ChaCha8Rng, mode: AgreementMode) -> crate::geometry::Similarity {
    use crate::geometry::Similarity;
    let scale = log_uniform(rng, 1e-2, 1e2);
    let rotation = rng.gen_range(0.0..std::f64::consts::TAU);
    let reflect = rng.gen_bool(0.5);
    let s = match mode {
        AgreementMode::BothAxesCommonUnit => Similarity::new(1.0, 0.0, false),
        AgreementMode::BothAxesAnyUnit => Similarity::new(scale, 0.0, false),
        AgreementMode::OneCommonAxis => Similarity::new(scale, 0.0, reflect),
        _ => Similarity::new(scale, rotation, reflect),
    };
    s.expect("scale is positive")
}

/// A random lifted scenario on a random line.
pub fn random_lifted_scenario(rng: &mut ChaCha8Rng, inner: ProtocolId) -> Scenario<Vec2> {
    let a = Vec2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let d = log_uniform(rng, 1e-2, 50.0);
    let b = a + Vec2::new(angle.cos(), angle.sin()) * d;
    let mut s = Scenario::new(AgreementMode::Disoriented, [a, b], ProtocolId::lift(inner));
    s.similarities = [
        random_similarity(rng, AgreementMode::Disoriented),
        random_similarity(rng, AgreementMode::Disoriented),
    ];
    s
}

/// Runs the whole suite with a fixed budget.
pub fn verify_all(seed: u64, budget: VerifyBudget) -> Result<Vec<LemmaReport>, CheckError> {
    use crate::adversary::{SchedulerSpec, TruncationStrategy};

    let mut reports = vec![
        verify_case_tables(mod4().as_ref(), budget.case_fuzz, seed),
        fuzz_f_bound(budget.f_bound_samples, seed),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut decrease = LemmaReport::new("two-round decrease");
    for n in 0..budget.decrease_traces {
        let protocol = if n % 2 == 0 {
            ProtocolId::Mod3BothAxes
        } else {
            ProtocolId::Mod4Disoriented
        };
        let delta = [0.01, 0.1, 1.0][(n as usize / 2) % 3];
        let d0 = log_uniform(&mut rng, 0.1, 10.0);
        let mut s = Scenario::new(
            AgreementMode::Line1DOriented,
            [Coord1(0.0), Coord1(d0)],
            protocol,
        );
        s.similarities = [0, 1].map(|_| {
            LineSimilarity::new(log_uniform(&mut rng, 1e-2, 1e2), false).expect("positive")
        });
        s.delta = delta;
        s.truncation = if n % 4 < 2 {
            TruncationStrategy::MinimalDelta
        } else {
            TruncationStrategy::UniformRandom {
                seed: Some(rng.gen()),
            }
        };
        let trace = run(&s)?;
        let bound = 2 * (d0 / delta).ceil() as u64 + 4;
        let mut r = check_two_round_decrease(&trace, delta);
        match trace.status.gathered() {
            Some(t) if t <= bound => {}
            other => r.violations.push(format!(
                "{} from d0 = {d0}, δ = {delta}: {other:?}, bound {bound}",
                s.protocol
            )),
        }
        decrease = decrease.merge(r);
    }
    reports.push(decrease.finish());

    let mut crashes = LemmaReport::new("crash bounds");
    for (protocol, bound) in [
        (ProtocolId::Mod4Disoriented, 4),
        (ProtocolId::Mod3BothAxes, 3),
    ] {
        for left in [true, false] {
            for residue in 0..4u8 {
                crashes.samples += 1;
                let t = check_crash_bound(&protocol, left, residue)?;
                crashes.observe(t as f64 - bound as f64);
                if t > bound {
                    crashes.violations.push(format!(
                        "{protocol}, correct left={left}, i≡{residue}: {t} rounds"
                    ));
                }
            }
        }
    }
    reports.push(crashes.finish());

    let mut reduction = LemmaReport::new("reduction commutes with execution");
    for n in 0..budget.reduction_runs {
        let inner = if n % 2 == 0 {
            ProtocolId::Mod4Disoriented
        } else {
            ProtocolId::GotoOther
        };
        let mut s = random_lifted_scenario(&mut rng, inner);
        s.max_rounds = 50;
        s.seed = rng.gen();
        if n % 3 == 1 {
            s.truncation = TruncationStrategy::UniformRandom { seed: None };
            s.delta = 0.1;
        }
        if n % 5 == 2 {
            s.crash = CrashPlan::at_start(rng.gen_range(0..2));
        }
        reduction = reduction.merge(check_reduction_commutes(&s)?);
    }
    reports.push(reduction.finish());

    let mut fairness = LemmaReport::new("fair activation");
    for (scheduler, allowed) in [
        (SchedulerSpec::Fsync, 0),
        (SchedulerSpec::SsyncFair { k: 4, seed: None }, 3),
    ] {
        let mut s = Scenario::new(
            AgreementMode::Line1DDisoriented,
            [Coord1(0.0), Coord1(1.0)],
            ProtocolId::GotoOther,
        );
        s.scheduler = scheduler;
        s.max_rounds = 1000;
        s.seed = seed;
        fairness = fairness.merge(check_fairness(&audit_fairness(&run(&s)?), allowed));
    }
    reports.push(fairness.finish());

    let mut symmetric = Scenario::new(
        AgreementMode::OneCommonAxis,
        [Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0)],
        ProtocolId::OneAxisSuir,
    );
    symmetric.delta = 0.25;
    symmetric.truncation = TruncationStrategy::SymmetryPreserving;
    reports.push(check_symmetric_decrease(&run(&symmetric)?, 0.25));

    Ok(reports)
}
