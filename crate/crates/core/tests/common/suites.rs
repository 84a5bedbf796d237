//! Planted-instance runners shared by the round-trip suites and the acceptance report.

use super::*;
use curveproj::points::{
    decide_affine_points, decide_finite_points, dlt_oracle, PointList2D, PointList3D,
};
use curveproj::projection::{decide_with, verify_witness, Answer, DecideOptions};

/// Projects random space curves of degrees 1, 2, 3 with random cameras of `class` and counts
/// the instances that come back Yes with a witness passing verification.
pub fn planted_curves(class: CameraClass, seed: u64, count: usize) -> usize {
    let mut r = rng(seed);
    let mut ok = 0;
    for i in 0..count {
        let g = space_curve(&mut r, [1, 2, 3]);
        let p = camera(&mut r, class);
        let Some(gamma) = p.apply(&g) else { continue };
        let started = std::time::Instant::now();
        let d = decide_with(&g, &gamma, class, &DecideOptions::default())
            .unwrap_or_else(|e| panic!("{i}: {e}"));
        eprintln!(
            "{class:?} #{i} {:?} in {:?}: {gamma}",
            d.verdict,
            started.elapsed()
        );
        if d.verdict == Answer::Yes {
            let w = d.witness.as_ref().unwrap();
            if verify_witness(&g, &gamma, w.family, &w.params)
                .unwrap()
                .passed
            {
                ok += 1;
            }
        }
    }
    ok
}

pub fn random_points(rng: &mut ChaCha8Rng, m: usize) -> PointList3D {
    PointList3D::new(
        (0..m)
            .map(|_| [q(small(rng, 5)), q(small(rng, 5)), q(small(rng, 5))])
            .collect(),
    )
}

/// Random points and a camera of the given class that sees all of them.
pub fn planted_points(
    rng: &mut ChaCha8Rng,
    m: usize,
    class: CameraClass,
) -> (PointList3D, ProjectionMatrix, PointList2D) {
    loop {
        let z = random_points(rng, m);
        let p = camera(rng, class);
        if let Some(x) = z.project(&p) {
            return (z, p, x);
        }
    }
}

pub fn reproduces(p: &ProjectionMatrix, z: &PointList3D, x: &PointList2D) -> bool {
    z.points
        .iter()
        .zip(&x.points)
        .all(|(a, b)| p.apply_point(a).as_ref() == Some(b))
}

/// Planted point lists whose decider verdict, witness camera and DLT recovery all agree.
pub fn planted_point_agreement(class: CameraClass, seed: u64, count: usize) -> usize {
    let mut r = rng(seed);
    let mut ok = 0;
    for _ in 0..count {
        let (z, p, x) = planted_points(&mut r, 7, class);
        let d = match class {
            CameraClass::Finite => decide_finite_points(&z, &x),
            CameraClass::Affine => decide_affine_points(&z, &x),
        }
        .unwrap();
        let oracle = dlt_oracle(&z, &x);
        let agrees = d.verdict == Answer::Yes
            && d.witness
                .as_ref()
                .is_some_and(|w| w.camera.class == class && reproduces(&w.camera, &z, &x))
            && oracle.as_ref() == Some(&p.normalized());
        ok += agrees as usize;
    }
    ok
}
