//! Slot-driven simulation of the repeated auction game.

mod engine;
mod metrics;

pub use engine::{run, Agent, SlotOutcome, World};
pub use metrics::{jain_fairness, utility, AgentSlot, MetricsSeries};
