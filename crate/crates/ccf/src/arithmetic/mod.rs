//! Point backends: exact quadratic surds and rigorous balls, plus the exact and interval
//! number types they are built on.

pub mod ball;
pub mod finterval;
pub mod interval;
pub mod locate;
pub mod qsqrt;
pub mod surd;

pub use ball::{ball_inv, parse_ball, BallComplex, BallSource, CirclePoint, FixedBall};
pub use finterval::FInterval;
pub use interval::DyInterval;
pub use locate::{Locatable, Quadric};
pub use qsqrt::{Qsqrt, Real2};
pub use surd::{embed, surd_equals, surd_from_poly, surd_step, Branch, LElem, QuadraticSurd, SurdField};
