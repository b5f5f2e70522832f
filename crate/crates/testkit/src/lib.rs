//! Brute-force oracles and deterministic fixture generators for the test
//! suites.
//!
//! Everything here is written from first principles against the published
//! definitions, deliberately NOT reusing the main library's code or types
//! (planes are bare `&[f64]` slices, masks bare `Vec<u8>`), so that a bug
//! in the library cannot hide inside its own oracle. The generators are
//! seeded and fully deterministic.

pub mod gen;
pub mod msssim_ref;
pub mod quadtree;
