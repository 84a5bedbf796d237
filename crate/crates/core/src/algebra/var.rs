//! Variables and monomials.
//!
//! Every polynomial in this crate lives in one fixed ring `Z[t, c1, c2, c3, b, c, f, J, K, y]`.
//! The order of the variables below is the lexicographic order used everywhere: `t` is the
//! most significant variable, which makes it the main variable of every rational function.

use std::fmt;

/// Number of variables in the fixed universe.
pub const NVARS: usize = 10;

/// A variable of the fixed polynomial universe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

const NAMES: [&str; NVARS] = ["t", "c1", "c2", "c3", "b", "c", "f", "J", "K", "y"];

impl Var {
    /// Curve parameter. Planar curves, spatial curves and families all use it.
    pub const T: Var = Var(0);
    pub const C1: Var = Var(1);
    pub const C2: Var = Var(2);
    pub const C3: Var = Var(3);
    pub const B: Var = Var(4);
    pub const C: Var = Var(5);
    pub const F: Var = Var(6);
    /// First signature coordinate.
    pub const J: Var = Var(7);
    /// Second signature coordinate.
    pub const K: Var = Var(8);
    /// Scratch variable.
    pub const Y: Var = Var(9);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Var {
        assert!(i < NVARS, "variable index {i} out of range");
        Var(i as u8)
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Var> {
        NAMES.iter().position(|n| *n == name).map(Var::from_index)
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS).map(Var::from_index)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector. The derived `Ord` is lexicographic with `t` most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [u16; NVARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; NVARS]);

    pub fn var(v: Var, e: u16) -> Mono {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Mono(m)
    }

    #[inline]
    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    #[inline]
    pub fn with_exp(mut self, v: Var, e: u16) -> Mono {
        self.0[v.index()] = e;
        self
    }

    #[inline]
    pub fn mul(&self, other: &Mono) -> Mono {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("monomial exponent overflow");
        }
        Mono(m)
    }

    /// `self / other` when `other` divides `self`.
    #[inline]
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= *b;
        }
        Some(Mono(m))
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Bit set of the variables with a positive exponent.
    pub fn support(&self) -> u16 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u16, |acc, (i, _)| acc | (1 << i))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in Var::all() {
            let e = self.exp(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}
