//! Dense exact linear algebra over the rationals.

use rug::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c].cmp0().is_ne()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::from(1) / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && m[i][c].cmp0().is_ne() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, p) in m[i][c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    *x -= Rational::from(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right nullspace.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::new(); cols];
            v[f] = Rational::from(1);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = Rational::from(-&a[r][f]);
            }
            v
        })
        .collect()
}

/// Unique solution of the square system `m x = b`, if `m` is nonsingular.
pub fn solve(m: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(a.iter().map(|r| r[n].clone()).collect())
}

pub fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    let t = |a: &Rational, b: &Rational, c: &Rational| Rational::from(a * b) * c;
    t(&m[0][0], &m[1][1], &m[2][2])
        + t(&m[0][1], &m[1][2], &m[2][0])
        + t(&m[0][2], &m[1][0], &m[2][1])
        - t(&m[0][2], &m[1][1], &m[2][0])
        - t(&m[0][0], &m[1][2], &m[2][1])
        - t(&m[0][1], &m[1][0], &m[2][2])
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map(Vec::len).unwrap_or(0));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Rational::new();
                    for l in 0..k {
                        s += Rational::from(&a[i][l] * &b[l][j]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        for row in &a {
            let s: Rational = row.iter().zip(v).map(|(x, y)| Rational::from(x * y)).sum();
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn square_solve() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[Rational::from(3), Rational::from(5)]).unwrap();
        assert_eq!(x, vec![Rational::from((4, 5)), Rational::from((7, 5))]);
        assert!(solve(
            &m(&[&[1, 2], &[2, 4]]),
            &[Rational::from(1), Rational::from(1)]
        )
        .is_none());
    }
}
