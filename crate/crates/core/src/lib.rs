//! Deterministic dwell-scheduling simulator for a phased-array radar.
//!
//! The crate models a radar timeline as a stream of dwell requests (transmit,
//! wait, receive) competing for one beam under a time budget and a transmitter
//! energy ceiling. It provides:
//!
//! - a synthesis priority that blends static importance, deadline urgency, and
//!   a quadratic timeliness weight ([`priority`]);
//! - two-mode pulse interleaving that hides guest dwells inside a host dwell's
//!   wait ([`interleave`]);
//! - a first-order transmitter heating model with closed-form cooling times
//!   ([`energy`]);
//! - seeded scenario generation, scheduling policies, benchmark metrics, and
//!   Monte Carlo sweep drivers (the remaining modules).
//!
//! All times are milliseconds; the simulation clock starts at zero. Everything
//! is deterministic given a seed: same inputs, same bytes out.

pub mod energy;
pub mod error;
pub mod interleave;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod priority;
pub mod scenario;
pub mod scheduler;
pub mod sweep;

pub use error::{Error, Result};
