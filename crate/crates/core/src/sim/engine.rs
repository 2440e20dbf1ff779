use crate::agents::{
    bcb_act, ga_assign, myopic_act, threshold_act, threshold_update, AgentLedger, Fees, RegretState,
    SlotRecord, Strategy,
};
use crate::auction::{publish, Action, AuctionRound, AuctionRule, Broadcast};
use crate::channel::{rate, ChannelState, RadioParams, Topology};
use crate::config::{FeeSchedule, PuSchedule, ScenarioConfig, Scheme, TopologySpec};
use crate::error::Result;
use crate::rng::{stream, Component, RandomStream};
use crate::valuation::{initial_threshold, RayleighRateCdf, ValuationCdf};

use super::metrics::{jain_fairness, AgentSlot, MetricsSeries};

/// One SU: its policy, books and (for regret matching) channel-choice state.
#[derive(Debug, Clone)]
pub struct Agent {
    pub strategy: Strategy,
    pub ledger: AgentLedger,
    pub regret: Option<RegretState>,
    rng: RandomStream,
}

/// What happened in one slot, as seen by the engine.
#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub round: AuctionRound,
    pub broadcast: Broadcast,
    pub fees: Fees,
    /// `valuations[i][k]`.
    pub valuations: Vec<Vec<f64>>,
    pub choices: Vec<Option<usize>>,
    pub rewards: Vec<f64>,
    /// Everything charged to each SU this slot.
    pub charges: Vec<f64>,
}

/// Complete state of one replication.
#[derive(Debug, Clone)]
pub struct World {
    slot: u64,
    radio: RadioParams,
    rho: f64,
    rule: AuctionRule,
    fees: FeeSchedule,
    pu: PuSchedule,
    monitor_fee_per_channel: bool,
    topology: Topology,
    channel: ChannelState,
    agents: Vec<Agent>,
    fading_rng: RandomStream,
    pu_rng: RandomStream,
    tie_rng: RandomStream,
}

impl World {
    pub fn new(config: &ScenarioConfig, scheme: &Scheme, replication: u32) -> Result<Self> {
        config.validate()?;
        let n = config.num_sus;
        let k = config.num_channels;
        let seed = config.seed;
        let exponent = config.radio.pathloss_exponent;
        let topology = match &config.topology {
            TopologySpec::Random {
                area_side,
                bs_distance,
            } => Topology::random(
                n,
                *area_side,
                *bs_distance,
                exponent,
                &mut stream(seed, replication, Component::Topology),
            )?,
            TopologySpec::Explicit {
                positions,
                basestation,
            } => Topology::new(positions.clone(), *basestation, exponent)?,
        };
        let mut fading_rng = stream(seed, replication, Component::Fading);
        let pu_prob = (0..k).map(|ch| config.pu.prob_at(0, ch)).collect();
        let channel = ChannelState::new(n, pu_prob, &mut fading_rng);

        let first = effective_fees(config.fees.at(0), k, config.monitor_fee_per_channel);
        let agents = (0..n)
            .map(|i| {
                let strategy = scheme.strategy_of(i);
                let cdf = RayleighRateCdf::new(topology.gains[i], &config.radio);
                let threshold = first_threshold(first, n, &cdf)?;
                Ok(Agent {
                    strategy,
                    ledger: AgentLedger::new(k, threshold, config.alpha),
                    regret: (strategy == Strategy::Nrl)
                        .then(|| RegretState::new(k, config.nu, config.kappa_init)),
                    rng: stream(seed, replication, Component::Agent(i as u32)),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            slot: 0,
            rho: config.radio.fading_correlation(),
            radio: config.radio.clone(),
            rule: config.rule,
            fees: config.fees.clone(),
            pu: config.pu.clone(),
            monitor_fee_per_channel: config.monitor_fee_per_channel,
            topology,
            channel,
            agents,
            fading_rng,
            pu_rng: stream(seed, replication, Component::PrimaryUser),
            tie_rng: stream(seed, replication, Component::TieBreak),
        })
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn channel(&self) -> &ChannelState {
        &self.channel
    }

    pub fn num_channels(&self) -> usize {
        self.channel.num_channels()
    }

    /// Advances one slot: channel evolution, decisions, auction, then
    /// bookkeeping and learning.
    pub fn step(&mut self) -> SlotOutcome {
        let n = self.agents.len();
        let k = self.num_channels();

        for ch in 0..k {
            self.channel.pu_prob[ch] = self.pu.prob_at(self.slot, ch);
        }
        self.channel.step_fading(self.rho, &mut self.fading_rng);
        self.channel.step_pu(&mut self.pu_rng);
        let pu = self.channel.pu_active.clone();

        let fees = effective_fees(self.fees.at(self.slot), k, self.monitor_fee_per_channel);
        let valuations: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..k)
                    .map(|ch| rate(self.topology.gains[i], self.channel.fading(i, ch), &self.radio))
                    .collect()
            })
            .collect();

        let genie = self
            .agents
            .iter()
            .any(|a| a.strategy == Strategy::Ga)
            .then(|| ga_assign(&valuations, &pu));

        let mut choices = Vec::with_capacity(n);
        let mut actions = Vec::with_capacity(n);
        for (i, agent) in self.agents.iter_mut().enumerate() {
            let vals = &valuations[i];
            let choice = match agent.strategy {
                _ if k == 1 => Some(0),
                Strategy::Myopic | Strategy::Threshold | Strategy::Bcb => Some(bcb_act(vals)),
                Strategy::Nrl => agent
                    .regret
                    .as_ref()
                    .map(|r| r.select_channel(&mut agent.rng)),
                Strategy::Ga => genie.as_ref().and_then(|g| g[i]),
            };
            let mut row = vec![Action::StayOut; k];
            if let Some(ch) = choice {
                row[ch] = match agent.strategy {
                    Strategy::Myopic => myopic_act(vals[ch], pu[ch]),
                    _ if pu[ch] => Action::StayOut,
                    _ => threshold_act(&agent.ledger, ch, vals[ch], fees),
                };
            }
            choices.push(choice);
            actions.push(row);
        }

        let round = AuctionRound::resolve(self.slot, actions, pu, self.rule, &mut self.tie_rng);
        let broadcast = publish(&round);

        let mut rewards = Vec::with_capacity(n);
        let mut charges = Vec::with_capacity(n);
        for (i, agent) in self.agents.iter_mut().enumerate() {
            let won = round.won_channel(i);
            let reward = won.map_or(0.0, |ch| valuations[i][ch]);
            let payment = won.map_or(0.0, |ch| round.payment(i, ch));
            let bids = round.actions[i].iter().filter(|a| a.is_bid()).count() as f64;
            let charge = payment + fees.entry * bids + fees.monitor;
            agent.ledger.credit(reward);
            agent.ledger.charge(charge);

            if agent.strategy.learns_threshold() {
                for ch in 0..k {
                    threshold_update(
                        &mut agent.ledger,
                        ch,
                        round.actions[i][ch],
                        won == Some(ch),
                        &broadcast.channels[ch],
                    );
                }
            }
            if let (Some(regret), Some(ch)) = (agent.regret.as_mut(), choices[i]) {
                regret.observe(SlotRecord {
                    channel: ch,
                    own_bid: round.actions[i][ch].bid(),
                    won: won == Some(ch),
                    valuations: valuations[i].clone(),
                    realized: reward,
                    reports: broadcast.channels.clone(),
                });
            }
            rewards.push(reward);
            charges.push(charge);
        }

        self.slot += 1;
        SlotOutcome {
            round,
            broadcast,
            fees,
            valuations,
            choices,
            rewards,
            charges,
        }
    }
}

/// Folds the per-channel monitoring option into the fee actually charged
/// each slot.
fn effective_fees(fees: Fees, num_channels: usize, per_channel: bool) -> Fees {
    if per_channel {
        Fees {
            entry: fees.entry,
            monitor: fees.monitor * num_channels as f64,
        }
    } else {
        fees
    }
}

/// First-slot threshold from the SU's own rate distribution. A lone SU has
/// no opponents, so the highest-opponent CDF is identically one.
fn first_threshold(fees: Fees, num_sus: usize, cdf: &RayleighRateCdf) -> Result<f64> {
    if num_sus == 1 {
        let target = fees.monitor / (1.0 + fees.entry);
        return Ok(target.min(cdf.support_max()));
    }
    initial_threshold(fees.entry, fees.monitor, num_sus, cdf)
}

/// Runs `config.horizon` slots of one replication under `scheme`.
pub fn run(config: &ScenarioConfig, scheme: &Scheme, replication: u32) -> Result<MetricsSeries> {
    let mut world = World::new(config, scheme, replication)?;
    let n = config.num_sus;
    let horizon = config.horizon as usize;
    let mut series = MetricsSeries::new(n, horizon);
    let mut gammas = vec![0.0; n];
    for _ in 0..horizon {
        let out = world.step();
        for (i, agent) in world.agents.iter().enumerate() {
            let ledger = &agent.ledger;
            gammas[i] = ledger.utility();
            let channel = out.choices[i];
            series.agents.push(AgentSlot {
                gamma: gammas[i],
                reward: ledger.accum_reward,
                cost: ledger.accum_cost,
                channel,
                action: channel.map_or(Action::StayOut, |ch| out.round.actions[i][ch]),
                payment: channel.map_or(0.0, |ch| out.round.payment(i, ch)),
                valuation: channel.map_or(0.0, |ch| out.valuations[i][ch]),
            });
        }
        series
            .jain
            .push(jain_fairness(&gammas).unwrap_or(f64::NAN));
    }
    Ok(series)
}
