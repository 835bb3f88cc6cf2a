//! Cooperative-jamming secrecy simulator with mobile multi-antenna helpers.
//!
//! Helpers transmit noise confined to the null space of their channel to Bob,
//! so only Eve is jammed, and move under a decentralized gradient controller
//! that trades Eve-side jamming gain against collision avoidance. The
//! [`harness`] module runs seeded batch experiments of secrecy rate versus
//! motion step.

pub mod channel;
pub mod controller;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod jamming;
pub mod scenario;
pub mod secrecy;

pub use error::{Error, Result};
pub use scenario::Scenario;
