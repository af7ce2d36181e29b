//! Deterministic integer factorization built on rank-3 lattices.
//!
//! The crate combines a baby-step/giant-step collision search with
//! Coppersmith-style lattice constructions: giant steps are derived from the
//! *second* vector of an LLL-reduced rank-3 basis, whose nonzero quadratic
//! coefficient turns a collision into a solvable integer equation for the
//! unknown prime factor.
//!
//! Module layout:
//!
//! - [`arith`] - exact integer and modular arithmetic primitives
//! - [`znpoly`] - polynomial arithmetic over Z/NZ (product tree, Bluestein
//!   evaluation at geometric progressions)
//! - [`lattice`] - exact integer LLL, the rank-3 basis constructions, and a
//!   dim-3 enumeration oracle
//! - [`coppersmith`] - small roots of f(x) = 0 mod an unknown divisor, and
//!   the halving-interval sweep for r-power divisors
//! - [`primesel`] - prime-product modulus construction for the loglog speedup
//! - [`order`] - bounded order finding and the high-order element search
//! - [`bsgs`] - sort-and-match plus the batched collision finder
//! - [`search`] - the three main searches (balanced, with modulo, p^r*q)
//! - [`drivers`] - top-level factoring entry points
//! - [`report`] - run reports, JSON/CSV emission, bench harness

pub mod arith;
pub mod bsgs;
pub mod coppersmith;
pub mod drivers;
pub mod lattice;
pub mod order;
pub mod primesel;
pub mod report;
pub mod search;
pub mod znpoly;

