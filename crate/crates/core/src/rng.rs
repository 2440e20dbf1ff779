//! Seeded random streams.
//!
//! Every stochastic component of a replication draws from its own ChaCha
//! stream. All streams share the key derived from the scenario seed and are
//! told apart by a 64-bit stream id built from the replication index and a
//! component tag, so adding replications or agents never shifts the numbers
//! seen by existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RandomStream = ChaCha8Rng;

/// Which part of the simulation a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Topology,
    Fading,
    PrimaryUser,
    TieBreak,
    /// Per-agent channel sampling (regret matching).
    Agent(u32),
}

impl Component {
    fn tag(self) -> u64 {
        match self {
            Component::Topology => 0,
            Component::Fading => 1,
            Component::PrimaryUser => 2,
            Component::TieBreak => 3,
            Component::Agent(i) => 16 + u64::from(i),
        }
    }
}

pub fn stream(seed: u64, replication: u32, component: Component) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(replication) << 32) | component.tag());
    rng
}
