//! The coordinator: per-channel sealed-bid auctions.
//!
//! Each slot every SU submits one [`Action`] per channel. On a channel free
//! of primary-user activity the highest bidder wins (ties broken uniformly
//! at random); stay-outs never win. Settlement charges the winner either its
//! own bid (first price) or the highest opposing bid (second price, zero for
//! a sole bidder). The [`Broadcast`] published afterwards is all SUs learn
//! about each other.

use rand::Rng;

use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    StayOut,
    Bid(f64),
}

impl Action {
    pub fn bid(self) -> Option<f64> {
        match self {
            Action::Bid(v) => Some(v),
            Action::StayOut => None,
        }
    }

    pub fn is_bid(self) -> bool {
        matches!(self, Action::Bid(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AuctionRule {
    FirstPrice,
    #[default]
    SecondPrice,
}

/// Winner per channel, `None` when nobody is allocated.
///
/// `actions[i][k]` is SU `i`'s action on channel `k`.
pub fn allocate(
    actions: &[Vec<Action>],
    pu_active: &[bool],
    rng: &mut RandomStream,
) -> Vec<Option<usize>> {
    let mut leaders = Vec::new();
    pu_active
        .iter()
        .enumerate()
        .map(|(k, &pu)| {
            if pu {
                return None;
            }
            leaders.clear();
            let mut best = f64::NEG_INFINITY;
            for (i, row) in actions.iter().enumerate() {
                if let Action::Bid(v) = row[k] {
                    if v > best {
                        best = v;
                        leaders.clear();
                        leaders.push(i);
                    } else if v == best {
                        leaders.push(i);
                    }
                }
            }
            match leaders.len() {
                0 => None,
                1 => Some(leaders[0]),
                n => Some(leaders[rng.random_range(0..n)]),
            }
        })
        .collect()
}

/// Payment due from each channel's winner (0 where there is none).
pub fn settle(actions: &[Vec<Action>], winners: &[Option<usize>], rule: AuctionRule) -> Vec<f64> {
    winners
        .iter()
        .enumerate()
        .map(|(k, winner)| {
            let Some(w) = *winner else { return 0.0 };
            match rule {
                AuctionRule::FirstPrice => actions[w][k].bid().unwrap_or(0.0),
                AuctionRule::SecondPrice => actions
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != w)
                    .filter_map(|(_, row)| row[k].bid())
                    .fold(0.0, f64::max),
            }
        })
        .collect()
}

/// Everything the coordinator decided in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionRound {
    pub slot: u64,
    pub actions: Vec<Vec<Action>>,
    pub winners: Vec<Option<usize>>,
    /// Winner's payment per channel.
    pub payments: Vec<f64>,
    pub pu_active: Vec<bool>,
    pub rule: AuctionRule,
}

impl AuctionRound {
    pub fn resolve(
        slot: u64,
        actions: Vec<Vec<Action>>,
        pu_active: Vec<bool>,
        rule: AuctionRule,
        rng: &mut RandomStream,
    ) -> Self {
        let winners = allocate(&actions, &pu_active, rng);
        let payments = settle(&actions, &winners, rule);
        Self {
            slot,
            actions,
            winners,
            payments,
            pu_active,
            rule,
        }
    }

    pub fn num_channels(&self) -> usize {
        self.winners.len()
    }

    pub fn is_allocated(&self, su: usize, channel: usize) -> bool {
        self.winners[channel] == Some(su)
    }

    /// What SU `su` owes on `channel` (zero unless it won there).
    pub fn payment(&self, su: usize, channel: usize) -> f64 {
        if self.is_allocated(su, channel) {
            self.payments[channel]
        } else {
            0.0
        }
    }

    /// The channel `su` won, if any.
    pub fn won_channel(&self, su: usize) -> Option<usize> {
        self.winners.iter().position(|w| *w == Some(su))
    }
}

/// Public outcome of one channel's auction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    pub max_bid: Option<f64>,
    pub winner_payment: Option<f64>,
    pub pu_active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Broadcast {
    pub channels: Vec<ChannelReport>,
}

pub fn publish(round: &AuctionRound) -> Broadcast {
    let channels = (0..round.num_channels())
        .map(|k| match round.winners[k] {
            Some(w) => ChannelReport {
                max_bid: round.actions[w][k].bid(),
                winner_payment: Some(round.payments[k]),
                pu_active: round.pu_active[k],
            },
            None => ChannelReport {
                max_bid: None,
                winner_payment: None,
                pu_active: round.pu_active[k],
            },
        })
        .collect();
    Broadcast { channels }
}
