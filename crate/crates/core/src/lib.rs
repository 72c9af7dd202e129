//! Random-graph models of homophily and triadic closure.
//!
//! Three formation processes are implemented, each with a simulator and the
//! closed-form predictions for how closing wedges changes the fraction of
//! bichromatic links:
//!
//! * [`sbm`]: stochastic block model, wedge closure after formation.
//! * [`jr`]: network growth with initial and friend-of-friend links,
//!   including the intervention planner.
//! * [`fixed_node`]: constant node/edge count rewiring with random or
//!   triadic candidates.
//!
//! [`estimation`] fits the growth model to citation-style data and
//! [`verify`] regenerates the simulation-versus-theory experiments.
//!
//! Closed forms are generic over the scalar type; the `*64` aliases below
//! fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod fixed_node;
pub mod graph;
pub mod graph_io;
pub mod jr;
pub mod rng;
pub mod sbm;
pub mod scalar;
pub mod sign;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Color, EdgeStats, TypedGraph, WedgeStats};
pub use rng::SeedStream;
pub use scalar::{Real, Scalar};

pub type SbmParams64 = sbm::SbmParams<f64>;
pub type ExpectedCounts64 = sbm::ExpectedCounts<f64>;
pub type RelativeBounds64 = sbm::RelativeBounds<f64>;
pub type CentralityReport64 = sbm::CentralityReport<f64>;
pub type JrParams64 = jr::JrParams<f64>;
pub type InterventionPlan64 = jr::InterventionPlan<f64>;
pub type OptimalPlan64 = jr::OptimalPlan<f64>;
pub type FixedNodeParams64 = fixed_node::FixedNodeParams<f64>;
pub type FixedPoint64 = fixed_node::FixedPoint<f64>;
