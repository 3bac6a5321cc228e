//! Numerical toolkit for the focusing nonlinear Schrödinger equation
//!
//! ```text
//! i u_t + Δu + |u|^{p-1} u = 0,   4/N < p - 1 < 4/(N-2)
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`params_well`] derives the exponent system attached to `(N, p)` and
//!   implements the potential-well geometry as pure functions of scalar
//!   field statistics.
//! * [`groundstate`] computes the radial ground state `Q` by shooting, its
//!   integral norms and the sharp Gagliardo–Nirenberg constant.
//! * [`spectral`] is the periodic-box Fourier kernel: norms, the free
//!   propagator and the high-frequency cutoff.
//! * [`evolution`] is the Strang split-step integrator with its diagnostics.
//! * [`virial`] samples the localized virial quantities.
//! * [`gronwall`] verifies instances of the Gronwall-type lemma.

pub mod error;
pub mod evolution;
pub mod field_io;
pub mod gronwall;
pub mod groundstate;
pub mod ode;
pub mod params_well;
pub mod quadrature;
pub mod spectral;
pub mod virial;

pub use error::{Error, Result};
pub use params_well::{ExponentSet, FieldStats, Thresholds, Verdict, WellStatus};
