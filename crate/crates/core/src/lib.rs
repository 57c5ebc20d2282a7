//! Planar Steiner trees through an m-sheeted covering of the plane.
//!
//! Sets of finite perimeter on the covering are represented as sheet labels on
//! the faces of a polygonal arrangement, and candidate minimizers are certified
//! by piecewise-constant calibration fields.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod calib;
pub mod covering;
pub mod families;
pub mod fixtures;
pub mod geom;
pub mod math;
pub mod sampling;
pub mod sheets;
pub mod steiner;

pub use geom::{Point2, Vec2, EPS_GEO};
