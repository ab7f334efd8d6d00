//! Carathéodory geometry of finite-dimensional type-I JB*-triples and
//! their unit balls.
//!
//! - [`triple`], [`spectral`]: spaces, the triple product, spectral frames.
//! - [`peirce`], [`opnorm`]: Peirce projections, Bergman operators, Möbius
//!   maps, induced operator norms.
//! - [`metric_d`]: the Carathéodory distance, horofunctions, geodesics and
//!   detour costs on the ball.
//! - [`horo_v`]: horofunctions, parts and detour costs of the normed space.
//! - [`compactify`]: the dual-ball model.
//! - [`exp_bridge`]: `tanh` and its boundary extension.
//! - [`verify`]: seeded verification suites.
//!
//! ```
//! use jbh::metric_d::{horofunction_d_eval, BoundaryDatumD, HoroMethod};
//! use jbh::triple::{Element, C64};
//!
//! let d = BoundaryDatumD::new(vec![Element::scalar(C64::new(1.0, 0.0))], vec![1.0])?;
//! let z = Element::scalar(C64::new(0.5, 0.0));
//! let h = horofunction_d_eval(&d, &z, HoroMethod::InducedNorm)?;
//! assert!((h - 0.5 * (0.25f64 / 0.75).ln()).abs() < 1e-9);
//! # Ok::<(), jbh::error::JbhError>(())
//! ```

pub mod compactify;
pub mod error;
pub mod exp_bridge;
pub mod extended;
pub mod extrapolate;
pub mod horo_v;
pub mod json;
pub mod linalg;
pub mod metric_d;
pub mod opnorm;
pub mod peirce;
pub mod random;
pub mod spectral;
pub mod triple;
pub mod verify;
