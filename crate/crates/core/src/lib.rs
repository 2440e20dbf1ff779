//! Repeated spectrum auctions for cognitive radio networks.
//!
//! Secondary users (SUs) compete every slot for idle channels through a
//! sealed-bid auction run by a coordinator. Each SU pays a monitoring fee
//! every slot and an entry fee whenever it bids; the winner pays the
//! auction price. The crate provides
//!
//! * the radio model that turns path loss and Rayleigh fading into rates
//!   ([`channel`]),
//! * the valuation-distribution math used to seed participation
//!   thresholds ([`valuation`]),
//! * the coordinator: allocation, settlement and the public broadcast
//!   ([`auction`]),
//! * the SU policies: myopic, threshold learning, regret-matching channel
//!   selection and the best-channel / genie-aided baselines ([`agents`]),
//! * a deterministic slot-driven engine with utility and fairness metrics
//!   ([`sim`]),
//! * scenario configuration, presets and CSV reporting ([`config`],
//!   [`report`]).

pub mod agents;
pub mod auction;
pub mod channel;
pub mod config;
mod error;
pub mod report;
pub mod rng;
pub mod sim;
pub mod valuation;

pub use error::{ConfigError, Error, Result};
