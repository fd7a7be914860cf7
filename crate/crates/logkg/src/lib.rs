//! Numerical laboratory for the 3-D radially symmetric logarithmic
//! Klein-Gordon equation
//!
//! ```text
//! u_tt - Lap(u) + u = |u|^(p-1) u ln|u|^2,    2 < p < 4,
//! ```
//!
//! built around three pillars:
//!
//! * ground-state standing-wave profiles computed two independent ways
//!   (radial shooting and constrained minimization over the Nehari-type
//!   set `K_w = 0`), cross-certified through the variational identities,
//! * an exactly energy-conserving discrete-gradient time integrator for
//!   the radial Cauchy problem, and
//! * scripted experiments that certify membership in the invariant set
//!   `{E < d(0), K_0 < 0, u != 0}` and track the H^1 growth of dilated
//!   ground states.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod ground_state;
pub mod io;
pub mod radial;

pub use error::{Error, Result};
pub use functionals::ModelParams;
pub use radial::{RadialField, RadialGrid};
