//! Symbolic and numeric verification of symmetries of semi-linear Schrödinger
//! and diffusion equations in one space dimension.
//!
//! * [`expr`] is a small computer-algebra kernel with canonical forms.
//! * [`liealg`] holds vector fields with scalar parts, brackets and structure tables.
//! * [`catalog`] builds the concrete generator representations and invariant operators.
//! * [`invariance`] tests (conditional) invariance of second-order linear operators.
//! * [`potentials`] prolongs generators to field space and checks invariant potentials.
//! * [`numerics`] cross-checks finite symmetry transformations on numerical solutions.

pub mod expr;
pub mod liealg;
pub mod linsolve;
pub mod invariance;
pub mod catalog;
pub mod potentials;
pub mod numerics;
pub mod survey;
