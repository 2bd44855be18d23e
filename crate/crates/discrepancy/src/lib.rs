//! Exact discrete discrepancy of finite point sets.
//!
//! Given `N` points in the unit cube (or on the torus), this crate computes
//! the discrete `l2` and `l-inf` norms of the discrepancy function over three
//! finite families of test sets:
//!
//! * **corners** — anchored boxes `[0, j1/M) x ... x [0, jd/M)` with the
//!   upper-right vertex on an `M x ... x M` grid, `M = b^(nu+tau)`;
//! * **cubes** — Z^d-periodized cubes `x + [-s, s)^d` with grid centers
//!   `x = j/M`, `j` in `J_M = {-M/2, ..., M/2-1}`, and discrete half-sides
//!   `s` in `S_M = {1/M, ..., 1/2 - 1/M}`;
//! * **balls** — periodized open balls `x + B_r` and `x + B_2r` with grid
//!   centers and a fixed radius `r < 1/4`.
//!
//! Counting terms, Haar coefficients and corner/cube norms are computed in
//! exact integer or rational arithmetic; only final square roots and the
//! genuinely transcendental quantities (trigonometric sums, Bessel values)
//! are floating point.
//!
//! On top of the raw norms, the crate carries the machinery needed to verify
//! three universal lower bounds on generated point sets:
//!
//! 1. a Roth-type bound for the corner grid `l2` norm, via a `b`-adic Haar
//!    test function, plus a stronger `d = 2` `l-inf` bound via a Riesz-type
//!    product ([`corner::theorem1_verify`], [`corner::build_g`]);
//! 2. a Halasz-type bound for the cube ensemble at `M >= 18 d N`, via
//!    discrete Fourier transforms of cube indicators
//!    ([`torus_cube::theorem2_verify`]);
//! 3. a Montgomery-type two-radius bound for balls when `d != 1 (mod 4)`,
//!    via Bessel asymptotics ([`torus_ball::theorem3_verify`]).
//!
//! Every verdict is returned as a [`bounds::BoundReport`] that records the
//! computed left-hand side, the explicit right-hand side, and the provenance
//! of every constant involved.
//!
//! The `examples/` directory demonstrates each capability end to end; the
//! `discrepancy` binary exposes the same operations as subcommands.

pub mod bounds;
pub mod cli;
pub mod corner;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod haar;
pub mod kahan;
pub mod spectral;
pub mod torus_ball;
pub mod torus_cube;

pub use error::{Error, Result};
pub use geometry::{GridSpec, Mode, PointSet, SnappedSet};
