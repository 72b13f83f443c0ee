//! Analysis of convex monotone additively homogeneous maps `f: R^n → R^n`:
//! eigenvalues and eigenvectors, critical graphs and classes, cyclicity,
//! spectral projectors, periodic orbits, and the eigenspace of a
//! piecewise-affine map as a finite union of polyhedra.
//!
//! Maps are given coordinate-wise as a maximum of affine functions with
//! (sub)stochastic slopes, or as a weighted log-sum-exp. Every analysis is
//! generic over [`Scalar`]: exact rationals or `f64`.
//!
//! Node indices are 0-based throughout this crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod critical;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod markov;
pub mod maxplus;
pub mod mdp;
pub mod model;
pub mod polyhedra;
pub mod scalar;
pub mod spectral;
pub mod vector;

pub use error::{Error, Result};
pub use graph::DiGraph;
pub use model::{compose, power, Coordinate, Generator, Homogeneity, MapModel, RectangularSet};
pub use scalar::{Mode, Rational, Scalar};
