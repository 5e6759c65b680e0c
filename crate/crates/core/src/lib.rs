//! Numerical tools for non-commutative Schur-class functions on polynomial
//! polyhedra `G_δ = { x : ‖δ(x)‖ < 1 }`, and for their behaviour at the
//! boundary.
//!
//! - [`freepoly`]: free polynomials, matrix tuples, a parser and a formatter.
//! - [`domain`]: `δ`, membership, the distinguished boundary, inward
//!   directions, approach sequences.
//! - [`realization`]: transfer-function realizations and the model identity.
//! - [`boundary`]: Julia quotients, B-points, `W`, `u_T`, the Julia inequality.
//! - [`derivative`]: one-sided directional derivatives at B-points.
//! - [`fixtures`]: built-in domains and the bidisk example with closed forms.
//!
//! ```
//! use ncjulia::boundary::estimate_alpha;
//! use ncjulia::domain::{ApproachSequence, DEFAULT_RADIAL_STEPS};
//! use ncjulia::fixtures::example_h1;
//! use ncjulia::freepoly::MatrixTuple;
//!
//! let h = example_h1();
//! let t = MatrixTuple::real_scalars(&[1.0, 1.0]);
//! let a = estimate_alpha(&h, &ApproachSequence::radial(t, DEFAULT_RADIAL_STEPS)).unwrap();
//! assert!((a.alpha - 1.0).abs() < 1e-8);
//! ```

pub mod boundary;
pub mod derivative;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod freepoly;
pub mod numerics;
pub mod random;
pub mod realization;

pub use error::{Error, Result};
