#![allow(dead_code)]

pub mod fd;
pub mod suites;

use curveproj::curves::{parse_planar, parse_spatial, PlanarCurve, SpatialCurve};
use curveproj::projection::{CameraClass, ProjectionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(rng: &mut ChaCha8Rng, r: i64) -> i64 {
    rng.gen_range(-r..=r)
}

pub fn nonzero(rng: &mut ChaCha8Rng, r: i64) -> i64 {
    loop {
        let k = small(rng, r);
        if k != 0 {
            return k;
        }
    }
}

pub fn q(n: i64) -> Rational {
    Rational::from(n)
}

/// A random polynomial in `s` of exact degree `deg` with small integer coefficients.
pub fn poly_text(rng: &mut ChaCha8Rng, var: &str, deg: u32) -> String {
    let mut terms = vec![format!("({})*{var}^{deg}", nonzero(rng, 3))];
    for k in (0..deg).rev() {
        terms.push(format!("({})*{var}^{k}", small(rng, 3)));
    }
    terms.join(" + ")
}

/// Space curve with components of distinct degrees `degs`, so it is never planar.
pub fn space_curve(rng: &mut ChaCha8Rng, degs: [u32; 3]) -> SpatialCurve {
    let c: Vec<String> = degs.iter().map(|&d| poly_text(rng, "s", d)).collect();
    parse_spatial(&format!("({}, {}, {})", c[0], c[1], c[2])).unwrap()
}

pub fn planar_curve(rng: &mut ChaCha8Rng, degs: [u32; 2]) -> PlanarCurve {
    let c: Vec<String> = degs.iter().map(|&d| poly_text(rng, "t", d)).collect();
    parse_planar(&format!("({}, {})", c[0], c[1])).unwrap()
}

pub fn camera(rng: &mut ChaCha8Rng, class: CameraClass) -> ProjectionMatrix {
    loop {
        let mut e: [[Rational; 4]; 3] = Default::default();
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = match class {
                    CameraClass::Affine if i == 2 => q((j == 3) as i64 * nonzero(rng, 3)),
                    _ => q(small(rng, 3)),
                };
            }
        }
        if let Ok(p) = ProjectionMatrix::new(e) {
            if p.class == class {
                return p;
            }
        }
    }
}

pub fn affine_map(rng: &mut ChaCha8Rng) -> ([[Rational; 2]; 2], [Rational; 2]) {
    loop {
        let a = [
            [q(small(rng, 4)), q(small(rng, 4))],
            [q(small(rng, 4)), q(small(rng, 4))],
        ];
        let det = Rational::from(&a[0][0] * &a[1][1]) - Rational::from(&a[0][1] * &a[1][0]);
        if det != 0 {
            return (a, [q(small(rng, 5)), q(small(rng, 5))]);
        }
    }
}

pub fn projective_map(rng: &mut ChaCha8Rng) -> [[Rational; 3]; 3] {
    loop {
        let h = [0, 1, 2].map(|_| [0, 1, 2].map(|_| q(small(rng, 3))));
        if curveproj::algebra::linalg::det3(&h) != 0 {
            return h;
        }
    }
}

/// `(a t + b) / (c t + d)` with `ad - bc != 0`.
pub fn mobius_text(rng: &mut ChaCha8Rng) -> String {
    loop {
        let (a, b, c, d) = (small(rng, 3), small(rng, 3), small(rng, 2), small(rng, 3));
        if a * d - b * c != 0 {
            return format!("(({a})*t + ({b}))/(({c})*t + ({d}))");
        }
    }
}
