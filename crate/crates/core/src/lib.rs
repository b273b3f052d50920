//! Infinite time Turing machines: ordinals, tapes, programs and a
//! transfinite simulator.

mod bouncer;
pub mod analysis;
pub mod clockables;
mod clock_limit;
pub mod compiler;
pub mod engine;
pub mod machine;
pub mod ordinal;
pub mod program;
pub mod samples;
mod segment;
pub mod tape;
