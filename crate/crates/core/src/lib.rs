//! Delta shocks of the damped generalized pressureless system.
//!
//! The kernels are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the common `f64` case.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fv;
pub mod io;
pub mod profile;
pub mod quadrature;
pub mod riemann;
pub mod scalar;
pub mod test_function;
pub mod vanishing;
pub mod weak;

pub use error::{Category, Error, Result};
pub use scalar::Scalar;

pub type Problem = riemann::RiemannProblem<f64>;
pub type Params = riemann::DeltaShockParams<f64>;
pub type State = riemann::ShockState<f64>;
pub type Profile = profile::ViscousProfile<f64>;
pub type ProfileConfig = profile::ProfileConfig<f64>;
