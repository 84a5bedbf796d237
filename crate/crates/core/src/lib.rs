//! Exact decision procedures for projecting rational space curves and point lists onto
//! planar ones under finite and affine cameras.

pub mod algebra;
pub mod cli;
pub mod curves;
pub mod extension;
pub mod invariants;
pub mod points;
pub mod projection;
pub mod signatures;
