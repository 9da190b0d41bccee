use proptest::prelude::*;

use rendezvous::adversary::{CrashPlan, SchedulerSpec, TruncationStrategy};
use rendezvous::engine::{claims_suir, run, Scenario, Space, Trace};
use rendezvous::geometry::{
    line_frame, to_line, AgreementMode, Conformal, Coord1, LineSimilarity, Similarity, Vec2,
};
use rendezvous::protocols::ProtocolId;

fn scheduler() -> impl Strategy<Value = SchedulerSpec> {
    prop_oneof![
        3 => Just(SchedulerSpec::Fsync),
        1 => (1u64..6).prop_map(|k| SchedulerSpec::SsyncFair { k, seed: None }),
        1 => Just(SchedulerSpec::Impossibility),
    ]
}

fn truncation() -> impl Strategy<Value = TruncationStrategy> {
    prop_oneof![
        Just(TruncationStrategy::Rigid),
        Just(TruncationStrategy::MinimalDelta),
        Just(TruncationStrategy::SymmetryPreserving),
        Just(TruncationStrategy::UniformRandom { seed: None }),
        proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..4).prop_map(|v| {
            TruncationStrategy::Custom {
                fractions: v.into_iter().map(|(a, b)| [a, b]).collect(),
            }
        }),
    ]
}

fn crash() -> impl Strategy<Value = CrashPlan> {
    prop_oneof![
        Just(CrashPlan::none()),
        (0usize..2, 0u64..5).prop_map(|(v, round)| CrashPlan {
            victim: Some(v),
            round
        }),
    ]
}

fn line_scenario() -> impl Strategy<Value = Scenario<Coord1>> {
    (
        prop_oneof![
            Just(ProtocolId::Mod4Disoriented),
            Just(ProtocolId::Mod3BothAxes),
            Just(ProtocolId::RigidCommon),
            Just(ProtocolId::GotoOther),
            Just(ProtocolId::LuminousSsync),
        ],
        -100.0..100.0f64,
        -100.0..100.0f64,
        [
            (0.01..100.0f64, any::<bool>()),
            (0.01..100.0f64, any::<bool>()),
        ],
        (scheduler(), truncation(), crash()),
        (0.01..2.0f64, any::<u64>()),
    )
        .prop_map(
            |(protocol, a, b, frames, (scheduler, truncation, crash), (delta, seed))| {
                let mut s = Scenario::new(
                    AgreementMode::Line1DDisoriented,
                    [Coord1(a), Coord1(b)],
                    protocol,
                );
                s.similarities =
                    frames.map(|(scale, flip)| LineSimilarity::new(scale, flip).unwrap());
                s.scheduler = scheduler;
                s.truncation = truncation;
                s.crash = crash;
                s.delta = delta;
                s.seed = seed;
                s.max_rounds = 200;
                s
            },
        )
}

fn plane_scenario() -> impl Strategy<Value = Scenario<Vec2>> {
    (
        prop_oneof![
            Just(("lift:mod4_disoriented", AgreementMode::Disoriented)),
            Just(("lift:goto_other", AgreementMode::Disoriented)),
            Just(("one_axis_suir", AgreementMode::OneCommonAxis)),
            Just(("one_axis_fault_free", AgreementMode::OneCommonAxis)),
            Just(("luminous_ssync", AgreementMode::Disoriented)),
        ],
        [
            (-100.0..100.0f64, -100.0..100.0f64),
            (-100.0..100.0f64, -100.0..100.0f64),
        ],
        any::<bool>(),
        [
            (0.01..100.0f64, 0.0..std::f64::consts::TAU, any::<bool>()),
            (0.01..100.0f64, 0.0..std::f64::consts::TAU, any::<bool>()),
        ],
        (scheduler(), truncation(), crash()),
        (0.01..2.0f64, any::<u64>()),
    )
        .prop_map(
            |(
                (protocol, mode),
                pts,
                level,
                frames,
                (scheduler, truncation, crash),
                (delta, seed),
            )| {
                let a = Vec2::new(pts[0].0, pts[0].1);
                // level starts exercise the symmetric branch
                let b = Vec2::new(pts[1].0, if level { pts[0].1 } else { pts[1].1 });
                let mut s = Scenario::new(mode, [a, b], protocol.parse().unwrap());
                s.similarities = frames.map(|(scale, rot, flip)| {
                    let rot = if mode == AgreementMode::OneCommonAxis {
                        0.0
                    } else {
                        rot
                    };
                    Similarity::new(scale, rot, flip).unwrap()
                });
                s.scheduler = scheduler;
                s.truncation = truncation;
                s.crash = crash;
                s.delta = delta;
                s.seed = seed;
                s.max_rounds = 200;
                s
            },
        )
}

/// Invariants every trace must satisfy, whatever the algorithm.
fn check_trace<P: Space>(trace: &Trace<P>) -> Result<(), TestCaseError> {
    let s = &trace.scenario;
    prop_assert!(trace.records.len() as u64 <= s.max_rounds);
    let mut prev = s.initial_positions;
    for rec in &trace.records {
        prop_assert_eq!(rec.before, prev);
        prop_assert!(!rec.activated.is_empty());
        for r in 0..2 {
            if rec.crashed[r] {
                prop_assert!(!rec.activated.contains(r));
                prop_assert!(rec.intents[r].is_none());
            }
            if !rec.activated.contains(r) {
                prop_assert_eq!(rec.after[r], rec.before[r]);
                continue;
            }
            // the stop lies on the segment towards the dictated destination
            let target = rec.intents[r].as_ref().unwrap().global_destination;
            let len = rec.before[r].distance(target);
            let travelled = rec.before[r].distance(rec.after[r]);
            let off = rec.after[r].distance(target) + travelled - len;
            let tol = 1e-9 * len.max(1.0);
            prop_assert!(
                off <= tol,
                "round {} robot {r} off segment by {off:e}",
                rec.round
            );
            prop_assert!(travelled >= s.delta.min(len) - tol);
        }
        prev = rec.after;
    }
    if let Some(victim) = s.crash.victim {
        for rec in trace.records.iter().filter(|r| r.round > s.crash.round) {
            prop_assert_eq!(rec.after[victim], rec.before[victim]);
        }
    }
    if let Some(t) = trace.status.gathered() {
        if claims_suir(s) {
            for rec in trace.records.iter().filter(|r| r.round > t) {
                prop_assert!(rec.after[0].distance(rec.after[1]) <= s.epsilon);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn line_traces_obey_the_model(s in line_scenario()) {
        let trace = run(&s).unwrap();
        check_trace(&trace)?;
        prop_assert_eq!(&run(&s).unwrap(), &trace);
    }

    #[test]
    fn plane_traces_obey_the_model(s in plane_scenario()) {
        let trace = run(&s).unwrap();
        check_trace(&trace)?;
        prop_assert_eq!(&run(&s).unwrap(), &trace);
    }

    #[test]
    fn lifted_runs_stay_on_the_initial_line(s in plane_scenario()) {
        prop_assume!(matches!(s.protocol, ProtocolId::Lift(_)));
        prop_assume!(s.initial_positions[0] != s.initial_positions[1]);
        let frame = line_frame(s.initial_positions).unwrap();
        for rec in run(&s).unwrap().records {
            for p in rec.after {
                prop_assert!(to_line(&frame, p).is_ok(), "{p:?} left the line");
            }
        }
    }

    #[test]
    fn claimed_fsync_runs_gather_and_stay_gathered(s in line_scenario()) {
        let mut s = s;
        s.scheduler = SchedulerSpec::Fsync;
        s.max_rounds = 10_000;
        if s.protocol == ProtocolId::RigidCommon {
            s.mode = AgreementMode::Line1DOriented;
            s.similarities = [LineSimilarity::new(1.0, false).unwrap(); 2];
            s.truncation = TruncationStrategy::Rigid;
        }
        if s.protocol == ProtocolId::Mod3BothAxes {
            s.mode = AgreementMode::Line1DOriented;
            s.similarities = s.similarities.map(|h| LineSimilarity::new(h.scale(), false).unwrap());
        }
        prop_assume!(claims_suir(&s));
        let trace = run(&s).unwrap();
        prop_assert!(trace.status.gathered().is_some(), "{:?}", trace.status);
        check_trace(&trace)?;
    }
}
