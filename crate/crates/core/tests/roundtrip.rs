//! Planted camera instances: project a random polynomial space curve with a random camera
//! and check that the decider finds a verified witness.

mod common;

use common::*;
use curveproj::projection::{
    decide_with, verify_witness, Answer, BranchResult, CameraClass, DecideError, DecideOptions,
};

#[test]
fn planted_finite_cameras() {
    assert_eq!(suites::planted_curves(CameraClass::Finite, 11, 25), 25);
}

#[test]
fn planted_affine_cameras() {
    assert_eq!(suites::planted_curves(CameraClass::Affine, 12, 25), 25);
}

/// With the camera fit disabled the witness has to come from the parameter systems.
fn run_reparameterized(class: CameraClass, seed: u64, count: usize) -> usize {
    let mut r = rng(seed);
    let mut ok = 0;
    for i in 0..count {
        let g = space_curve(&mut r, [1, 2, 3]);
        let p = camera(&mut r, class);
        let Some(gamma) = p.apply(&g) else { continue };
        let phi = curveproj::curves::parse::parse_expr(&mobius_text(&mut r)).unwrap();
        let gamma = gamma.compose(&phi).unwrap();
        let started = std::time::Instant::now();
        let opts = DecideOptions {
            camera_fit: false,
            ..DecideOptions::default()
        };
        let d = decide_with(&g, &gamma, class, &opts).unwrap_or_else(|e| panic!("{i}: {e}"));
        eprintln!(
            "{class:?} reparam #{i} {:?} in {:?}: {:?}",
            d.verdict,
            started.elapsed(),
            d.trace.last().unwrap()
        );
        if d.verdict == Answer::Yes {
            let w = d.witness.as_ref().unwrap();
            assert!(
                verify_witness(&g, &gamma, w.family, &w.params)
                    .unwrap()
                    .passed
            );
            ok += 1;
        }
    }
    ok
}

#[test]
fn reparameterized_finite_targets() {
    assert_eq!(run_reparameterized(CameraClass::Finite, 21, 5), 5);
}

#[test]
fn reparameterized_affine_targets() {
    assert_eq!(run_reparameterized(CameraClass::Affine, 22, 5), 5);
}

#[test]
fn caps_never_produce_a_false_no() {
    let mut r = rng(31);
    for i in 0..4 {
        let g = space_curve(&mut r, [2, 3, 4]);
        let p = camera(&mut r, CameraClass::Affine);
        let Some(gamma) = p.apply(&g) else { continue };
        let phi = curveproj::curves::parse::parse_expr(&mobius_text(&mut r)).unwrap();
        let gamma = gamma.compose(&phi).unwrap();
        // tight caps push every generic branch onto the fallback path
        let opts = DecideOptions {
            camera_fit: false,
            max_degree: 8,
            fallback_budget: 2,
            ..DecideOptions::default()
        };
        let res = decide_with(&g, &gamma, CameraClass::Affine, &opts);
        eprintln!(
            "caps #{i}: {:?}",
            res.as_ref().map(|d| d
                .trace
                .iter()
                .map(|b| (b.family, b.result))
                .collect::<Vec<_>>())
        );
        match res {
            Ok(d) => assert_eq!(d.verdict, Answer::Yes, "{i}"),
            Err(DecideError::LimitExceeded { trace, .. }) => {
                assert_eq!(trace.last().unwrap().result, BranchResult::Undecided)
            }
            Err(e) => panic!("{i}: {e}"),
        }
    }
}
