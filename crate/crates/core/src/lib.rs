//! Linear-convergence certification for Davis-Yin splitting (DYS) on
//! three-function convex problems.
//!
//! The pieces fit together like this: [`classes`] turns a function class
//! F(mu, L) into the circle its resolvent or gradient traces in the complex
//! plane; [`symbol`] evaluates the DYS symbol polynomial over those circles
//! and estimates its sup-modulus (the tight Lipschitz constant of the
//! operator over the class); [`rates`] computes the closed-form contraction
//! factors and an r-optimized bound that should touch the sampled cloud;
//! [`engine`] runs the actual operator on diagonal quadratic instances,
//! where it reduces exactly to coordinatewise multiplication by the symbol;
//! [`verify`] cross-checks all of the above against each other on
//! randomized parameter sweeps.

pub mod classes;
pub mod engine;
pub mod error;
pub mod golden;
pub mod rates;
pub mod symbol;
pub mod util;
pub mod verify;

pub use classes::{AlgoParams, CircleSpec, FunctionClassParams, Smoothness};
pub use error::Error;
