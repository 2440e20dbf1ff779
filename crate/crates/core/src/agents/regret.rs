use std::collections::VecDeque;

use rand::Rng;

use crate::auction::ChannelReport;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// What an SU remembers about one past slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    /// Channel the SU selected (whether or not it then bid).
    pub channel: usize,
    pub own_bid: Option<f64>,
    pub won: bool,
    /// Own valuation on every channel.
    pub valuations: Vec<f64>,
    /// Reward actually collected in the slot.
    pub realized: f64,
    pub reports: Vec<ChannelReport>,
}

/// Reward the SU would have collected over `records` by bidding its
/// valuation on `alt` every slot, with every opponent action held fixed.
///
/// A counterfactual bid wins when it strictly beats the highest opposing bid
/// and no primary user held the channel. The broadcast maximum is the
/// opposing maximum unless the SU itself won `alt`, in which case the
/// second-price payment is.
pub fn counterfactual_reward<'a>(
    records: impl IntoIterator<Item = &'a SlotRecord>,
    alt: usize,
) -> f64 {
    records
        .into_iter()
        .map(|rec| {
            let report = &rec.reports[alt];
            if report.pu_active {
                return 0.0;
            }
            let opposing = if rec.won && rec.channel == alt {
                report.winner_payment
            } else {
                report.max_bid
            };
            let value = rec.valuations[alt];
            match opposing {
                Some(m) if value <= m => 0.0,
                _ => value,
            }
        })
        .sum()
}

/// Turns a row of regrets into channel-choice probabilities.
///
/// Every alternative gets `regret / kappa`; the current channel keeps the
/// remainder. Fails when the remainder would be negative.
pub fn choice_probabilities(regrets: &[f64], current: usize, kappa: f64) -> Result<Vec<f64>> {
    let mut probs = vec![0.0; regrets.len()];
    let mut moved = 0.0;
    for (k, &r) in regrets.iter().enumerate() {
        if k != current && r > 0.0 {
            probs[k] = r / kappa;
            moved += probs[k];
        }
    }
    let stay = 1.0 - moved;
    if stay.is_nan() || stay < 0.0 {
        return Err(Error::Normalization { kappa });
    }
    probs[current] = stay;
    Ok(probs)
}

/// Sliding-window regret matching over channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretState {
    num_channels: usize,
    window: usize,
    buffer: VecDeque<SlotRecord>,
    /// Row-major `[played][alternative]`.
    regret: Vec<f64>,
    probs: Vec<f64>,
    kappa: f64,
    max_regret: f64,
    current: usize,
}

impl RegretState {
    /// Starts from uniform choice probabilities.
    pub fn new(num_channels: usize, window: usize, kappa_init: f64) -> Self {
        assert!(num_channels >= 1 && window >= 1);
        Self {
            num_channels,
            window,
            buffer: VecDeque::with_capacity(window + 1),
            regret: vec![0.0; num_channels * num_channels],
            probs: vec![1.0 / num_channels as f64; num_channels],
            kappa: kappa_init,
            max_regret: 0.0,
            current: 0,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn window(&self) -> impl Iterator<Item = &SlotRecord> {
        self.buffer.iter()
    }

    pub fn regret(&self, played: usize, alt: usize) -> f64 {
        self.regret[played * self.num_channels + alt]
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regret
    }

    pub fn select_channel(&self, rng: &mut RandomStream) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        // rounding left u above the final cumulative sum
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(self.num_channels - 1)
    }

    /// Appends a slot to the window, then refreshes regrets and
    /// probabilities.
    pub fn observe(&mut self, record: SlotRecord) {
        self.current = record.channel;
        self.buffer.push_back(record);
        while self.buffer.len() > self.window {
            self.buffer.pop_front();
        }
        self.regret_update();
        self.probability_update();
    }

    /// Recomputes the row of the current channel:
    /// `R(m, alt) = max(0, (1/window) * sum(counterfactual(alt) - realized))`.
    pub fn regret_update(&mut self) {
        if self.buffer.is_empty() {
            return;
        }
        let m = self.current;
        let realized: f64 = self.buffer.iter().map(|r| r.realized).sum();
        for alt in 0..self.num_channels {
            let value = if alt == m {
                0.0
            } else {
                let d = (counterfactual_reward(&self.buffer, alt) - realized) / self.window as f64;
                d.max(0.0)
            };
            self.max_regret = self.max_regret.max(value);
            self.regret[m * self.num_channels + alt] = value;
        }
    }

    /// Sets `P(alt) = R(m, alt) / kappa` and gives the rest to `m`.
    ///
    /// `kappa` never drops below `2 K` times the largest regret seen so far,
    /// and is doubled until the current channel's share is nonnegative.
    pub fn probability_update(&mut self) {
        let floor = 2.0 * self.num_channels as f64 * self.max_regret;
        if floor > self.kappa {
            self.kappa = floor;
        }
        let m = self.current;
        let row = &self.regret[m * self.num_channels..(m + 1) * self.num_channels];
        loop {
            match choice_probabilities(row, m, self.kappa) {
                Ok(p) => {
                    self.probs = p;
                    return;
                }
                Err(_) => self.kappa *= 2.0,
            }
        }
    }
}
