//! Simulation and verification toolkit for reflected self-stabilizing
//! (McKean-Vlasov type) diffusions on convex domains.
//!
//! The crate is organised around the objects of the underlying dynamics:
//!
//! * [`geometry`] — convex domains, exact Euclidean projection and the
//!   one-step boundary decomposition (position inside the domain plus a
//!   local-time push along an outward normal) used by every integrator.
//! * [`model`] — drift/diffusion/interaction coefficients, their potentials,
//!   growth constants, and numerical probes that try to falsify the standing
//!   assumptions on sampled point pairs.
//! * [`engine`] — projected Euler-Maruyama stepping for a single reflected
//!   SDE and for the N-particle interacting system, with exact domain
//!   residence and local-time accounting.
//! * [`meanfield`] — the decoupled fixed-point construction: candidate
//!   interaction fields represented by stored particle clouds, the
//!   self-consistency map, and the growth-weighted sup norm.
//! * [`metrics`] — Wasserstein-2 distances between empirical measures
//!   (exact 1-D, exact assignment, sliced), moment functionals, and the
//!   chaos-rate regression.
//! * [`ldp`] — small-noise machinery: the noiseless reflected flow, the
//!   controlled skeleton path, its coarse-mesh Euler variant, the quadratic
//!   action of a control, and the concentration diagnostic.
//! * [`exit`] — exit-time laboratory: stopping-time estimators, the moment
//!   convergence clock with its closed-form bounds, the frozen-kernel
//!   coupling, exit costs and the Kramers-law slope fit.
//!
//! All operations are deterministic given a seed: noise comes from
//! counter-based streams keyed by `(seed, particle, step)` (see [`rng`]),
//! and every parallel reduction runs in a fixed order, so results are
//! bitwise independent of the worker count.

pub mod engine;
pub mod exit;
pub mod geometry;
pub mod ldp;
pub mod meanfield;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod vecn;

pub use geometry::{ConvexDomain, GeometryError, ReflectionStep};
