//! Traveling fronts for a Fisher-KPP equation with a nonlinear advection
//! term, in local and nonlocal (Helmholtz-potential) form.
//!
//! The local model reduces to a planar ODE whose critical speed is found by
//! shooting ([`shooting`]) and bracketed by closed-form bounds ([`bounds`]).
//! The nonlocal model is solved on a truncated domain with a cutoff on the
//! reaction ([`nonlocal`]), using a fast convolution for the potential
//! ([`helmholtz`]).

// NaN must fail validation, so `!(x > 0.0)` is used on purpose
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

pub mod bounds;
pub mod error;
pub mod grid;
pub mod helmholtz;
pub mod interp;
pub mod io;
pub mod model;
pub mod nonlocal;
pub mod ode;
pub mod profile;
pub mod shooting;
pub mod sweep;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use model::{Mode, ModelParams, PhaseState};
pub use profile::{Theta, WaveProfile};
