use crate::agents::AgentLedger;
use crate::auction::Action;
use crate::error::{Error, Result};

/// Accumulated reward over accumulated cost.
pub fn utility(ledger: &AgentLedger) -> f64 {
    ledger.utility()
}

/// Jain's index `(sum x)^2 / (n sum x^2)`, in `[1/n, 1]`.
pub fn jain_fairness(values: &[f64]) -> Result<f64> {
    let sum: f64 = values.iter().sum();
    let sum_sq: f64 = values.iter().map(|x| x * x).sum();
    if values.is_empty() || sum_sq == 0.0 {
        return Err(Error::UndefinedFairness);
    }
    Ok(sum * sum / (values.len() as f64 * sum_sq))
}

/// One SU's view of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSlot {
    pub gamma: f64,
    pub reward: f64,
    pub cost: f64,
    /// Channel the SU considered (bid there or stayed out after sensing).
    pub channel: Option<usize>,
    pub action: Action,
    pub payment: f64,
    pub valuation: f64,
}

/// Per-slot record of a run, row-major `[slot][su]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSeries {
    pub num_sus: usize,
    pub initial_gamma: Vec<f64>,
    pub agents: Vec<AgentSlot>,
    pub jain: Vec<f64>,
}

impl MetricsSeries {
    pub fn new(num_sus: usize, horizon: usize) -> Self {
        Self {
            num_sus,
            initial_gamma: vec![1.0; num_sus],
            agents: Vec::with_capacity(num_sus * horizon),
            jain: Vec::with_capacity(horizon),
        }
    }

    pub fn len(&self) -> usize {
        self.jain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jain.is_empty()
    }

    pub fn slot(&self, t: usize) -> &[AgentSlot] {
        &self.agents[t * self.num_sus..(t + 1) * self.num_sus]
    }

    pub fn gamma(&self, t: usize, su: usize) -> f64 {
        self.agents[t * self.num_sus + su].gamma
    }

    /// Utilities after the last slot (the initial ones for an empty run).
    pub fn final_gamma(&self) -> Vec<f64> {
        match self.len() {
            0 => self.initial_gamma.clone(),
            t => self.slot(t - 1).iter().map(|a| a.gamma).collect(),
        }
    }

    pub fn final_jain(&self) -> f64 {
        self.jain
            .last()
            .copied()
            .unwrap_or_else(|| jain_fairness(&self.initial_gamma).unwrap_or(f64::NAN))
    }
}
