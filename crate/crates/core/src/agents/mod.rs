//! SU decision policies.
//!
//! Every policy splits a slot's decision into picking a channel and then
//! deciding whether to bid there. Only the picking step differs between
//! the multi-channel schemes; once a channel is chosen the threshold rule
//! of [`threshold_act`] decides participation (except for [`Strategy::Myopic`],
//! which always bids).

mod assignment;
mod baselines;
mod ledger;
mod regret;

use std::fmt;
use std::str::FromStr;

pub use assignment::ga_assign;
pub use baselines::{bcb_act, myopic_act};
pub use ledger::{threshold_act, threshold_update, AgentLedger};
pub use regret::{counterfactual_reward, RegretState, SlotRecord};

/// Fees in force for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fees {
    /// Charged for submitting a bid.
    pub entry: f64,
    /// Charged every slot for observing the broadcast.
    pub monitor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Always bids its valuation.
    Myopic,
    /// Threshold learning on the best channel.
    Threshold,
    /// Regret-matching channel choice, threshold learning on the chosen channel.
    Nrl,
    /// Best-channel bidding: the channel with the highest valuation.
    Bcb,
    /// Genie-aided: the channel from the welfare-maximizing assignment.
    Ga,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Myopic,
        Strategy::Threshold,
        Strategy::Nrl,
        Strategy::Bcb,
        Strategy::Ga,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Myopic => "myopic",
            Strategy::Threshold => "threshold",
            Strategy::Nrl => "nrl",
            Strategy::Bcb => "bcb",
            Strategy::Ga => "ga",
        }
    }

    pub fn learns_threshold(self) -> bool {
        self != Strategy::Myopic
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown strategy `{s}` (expected myopic, threshold, nrl, bcb or ga)")
            })
    }
}
