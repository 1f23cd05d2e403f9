//! Scheduling of morphing edge drawings.
//!
//! Edges of a straight-line drawing are shown as stub pairs that repeatedly
//! stretch and shrink. This crate decides when each edge starts morphing so
//! that stubs do not cross, or cross only a bounded number of times per edge,
//! and shortens the repeating cycle by overlapping cycles, duplicating morphs
//! and allowing crossings.

pub mod geometry;
pub mod harness;
pub mod render;
pub mod scheduler;
pub mod timeline;
pub mod validator;

pub use timeline::{Bound, Millis, TimePeriod, TimelineError};
