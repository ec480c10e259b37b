//! Piecewise-constant weak solutions of scalar conservation laws
//! `u_t + f(u)_x = 0` on the unit torus, and the entropy-production
//! cost functionals that price them.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command
//! line front end and diagram output live in the `shockcost` crate.
//!
//! Layout:
//!
//! - [`flux`]: the flux/diffusion/mobility triple and the closed-form
//!   kernels built on it (shock speeds, the `rho` kernel, shock cost
//!   rates, Einstein entropies, convexity windows).
//! - [`profile`]: piecewise-constant densities on the torus.
//! - [`riemann`]: local fan solvers (entropic envelope, M-way splitting).
//! - [`tracker`]: event-driven front tracking, slab storage, costs,
//!   time reversal.
//! - [`constructions`]: the explicit low-cost paths (splitting
//!   evolution, two-shock absorber, connector, entropic decay and the
//!   full quasi-potential path).

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod constructions;
mod error;
pub mod flux;
pub(crate) mod math;
pub mod poly;
pub mod profile;
pub mod quadrature;
pub mod riemann;
pub mod tracker;

pub use error::{Error, Result};
pub use flux::{ConvexityCase, ConvexityWindow, Curve, EinsteinEntropy, EntropyPair, FluxModel};
pub use poly::Polynomial;
pub use profile::PiecewiseConstantProfile;
pub use riemann::RiemannFan;
pub use tracker::{
    CostReport, Front, FrontKind, Policy, Slab, SpaceTimeSolution, WeakSolutionReport,
};
