//! Symbolic invariants evaluated in floating point against nested finite differences.

mod common;

use common::fd::{max_rel_error, params, rel_error, Oracle, REL_TOL};
use curveproj::curves::parse_planar;
use curveproj::invariants::{mu_restricted, GroupTag};

fn check(text: &str, group: GroupTag, seed: u64) {
    let e = max_rel_error(text, group, seed);
    assert!(e <= REL_TOL, "{text} {group:?}: relative error {e:e}");
}

#[test]
fn equiaffine_invariants_match_differences() {
    check("(t, t^3 + t^2 + 1)", GroupTag::EquiAffine, 61);
    check("(t^2 + 1, t^3 - t)", GroupTag::EquiAffine, 62);
}

#[test]
fn affine_invariants_match_differences() {
    check("(t, t^4 + t^2)", GroupTag::Affine, 63);
    check("(t^2 + t, t^3 - 2*t)", GroupTag::Affine, 64);
    check("(t/(t^2 + 2), t^3/(t^2 + 2))", GroupTag::Affine, 65);
}

#[test]
fn projective_invariants_match_differences() {
    check("(t^2 + t, t^3 - 2*t)", GroupTag::Projective, 66);
    check("(t, t^4 + t^2)", GroupTag::Projective, 67);
}

#[test]
fn graded_mu_matches_differences() {
    let text = "(t^2 + t, t^3 - 2*t)";
    let c = parse_planar(text).unwrap();
    let (chain, mu) = mu_restricted(&c).unwrap();
    let oracle = Oracle::new(&c);
    let mu_num = oracle.mu_chain()[0].clone();
    for t in params(68, &c, GroupTag::EquiAffine) {
        let got = mu.eval_f64(t.to_f64(), &chain.table).unwrap();
        assert!(rel_error(got, mu_num(&t).to_f64()) <= REL_TOL, "mu at {t}");
    }
}
