use super::Fees;
use crate::auction::{Action, ChannelReport};

/// Running totals and learned thresholds of one SU.
///
/// Reward and cost both start at 1 so the utility `reward / cost` is defined
/// from the first slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentLedger {
    pub accum_reward: f64,
    pub accum_cost: f64,
    /// Participation threshold per channel.
    pub thresholds: Vec<f64>,
    /// Weight of the newest broadcast payment in the threshold average.
    pub alpha: f64,
}

impl AgentLedger {
    pub fn new(num_channels: usize, initial_threshold: f64, alpha: f64) -> Self {
        Self {
            accum_reward: 1.0,
            accum_cost: 1.0,
            thresholds: vec![initial_threshold; num_channels],
            alpha,
        }
    }

    pub fn utility(&self) -> f64 {
        self.accum_reward / self.accum_cost
    }

    pub fn credit(&mut self, reward: f64) {
        self.accum_reward += reward;
    }

    pub fn charge(&mut self, cost: f64) {
        self.accum_cost += cost;
    }
}

/// Participation rule for one channel.
///
/// Compares the utility after staying out, `r / (c + e)`, against the
/// estimate after bidding, `(r + v - t) / (c + e + entry)`, where `t` is the
/// channel's threshold. Stays out only when the former is strictly larger;
/// otherwise bids the valuation truthfully.
pub fn threshold_act(ledger: &AgentLedger, channel: usize, valuation: f64, fees: Fees) -> Action {
    let r = ledger.accum_reward;
    let c = ledger.accum_cost;
    let stay = r / (c + fees.monitor);
    let enter = (r + valuation - ledger.thresholds[channel]) / (c + fees.monitor + fees.entry);
    if stay > enter {
        Action::StayOut
    } else {
        Action::Bid(valuation)
    }
}

/// Moves the channel's threshold toward the broadcast winner payment `p`.
///
/// Fires when the SU stayed out and `p` undercut the threshold, or when it
/// bid and either lost or `p` reached the threshold. Rounds without a winner
/// carry no payment and leave the threshold alone.
pub fn threshold_update(
    ledger: &mut AgentLedger,
    channel: usize,
    own_action: Action,
    won: bool,
    report: &ChannelReport,
) {
    let Some(payment) = report.winner_payment else {
        return;
    };
    let threshold = &mut ledger.thresholds[channel];
    let fire = match own_action {
        Action::StayOut => payment < *threshold,
        Action::Bid(_) => !won || payment >= *threshold,
    };
    if fire {
        *threshold = ledger.alpha * payment + (1.0 - ledger.alpha) * *threshold;
    }
}
