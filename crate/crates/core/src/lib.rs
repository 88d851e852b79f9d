//! Hiking-route retrieval pipeline.
//!
//! Routes are turned into attribute records ([`geo`]), rendered as short
//! English descriptions ([`describe`]), embedded and ranked against free-text
//! queries ([`embed`]), and scored with cumulative-mean curves ([`eval`]).
//! [`synth`] builds desk-scale corpora whose attributes are known by
//! construction.

pub mod describe;
pub mod embed;
pub mod eval;
pub mod exec;
pub mod geo;
pub mod rng;
pub mod synth;

pub use exec::Execution;
