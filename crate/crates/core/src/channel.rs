//! Radio model: path loss, time-correlated Rayleigh fading, primary-user
//! activity and the per-slot achievable rate that serves as each SU's
//! valuation.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Physical-layer constants shared by every SU and channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    /// Per-channel bandwidth in Hz.
    pub bandwidth: f64,
    /// Common transmit power in W.
    pub tx_power: f64,
    /// Thermal noise power at the base station in W.
    pub noise_power: f64,
    pub pathloss_exponent: f64,
    /// Slot (frame) duration in s.
    pub frame_length: f64,
    /// Maximum Doppler shift in Hz.
    pub doppler_freq: f64,
    /// Multiply the SNR by the transmit power. When false the SNR is
    /// `G h / noise`, i.e. the gain is taken to already include power.
    pub snr_includes_power: bool,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            bandwidth: 1.0,
            tx_power: 0.1,
            noise_power: dbm_to_watts(-90.0),
            pathloss_exponent: 3.0,
            frame_length: 100e-6,
            doppler_freq: 100.0,
            snr_includes_power: true,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bandwidth", self.bandwidth),
            ("tx_power", self.tx_power),
            ("noise_power", self.noise_power),
            ("pathloss_exponent", self.pathloss_exponent),
            ("frame_length", self.frame_length),
            ("doppler_freq", self.doppler_freq),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(crate::ConfigError::for_key(name, "must be finite and > 0").into());
            }
        }
        if self.pathloss_exponent < 2.0 {
            return Err(crate::ConfigError::for_key("pathloss_exponent", "must be >= 2").into());
        }
        Ok(())
    }

    /// Factor that turns `G h` into an SNR.
    pub fn snr_scale(&self) -> f64 {
        if self.snr_includes_power {
            self.tx_power / self.noise_power
        } else {
            1.0 / self.noise_power
        }
    }

    /// Slot-to-slot correlation of the complex fading gain under Clarke's
    /// model: `J0(2 pi f_d T)`.
    pub fn fading_correlation(&self) -> f64 {
        libm::j0(2.0 * PI * self.doppler_freq * self.frame_length)
    }
}

/// `distance^-exponent`.
pub fn pathloss(distance: f64, exponent: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "distance must be positive, got {distance}"
        )));
    }
    Ok(distance.powf(-exponent))
}

/// Achievable rate `W log2(1 + G h snr_scale)` in bits/s.
pub fn rate(gain: f64, fading: f64, params: &RadioParams) -> f64 {
    params.bandwidth * (gain * fading * params.snr_scale()).ln_1p() / std::f64::consts::LN_2
}

pub type Point = [f64; 2];

/// SU placement relative to the base station.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub su_positions: Vec<Point>,
    pub basestation: Point,
    pub gains: Vec<f64>,
}

impl Topology {
    pub fn new(su_positions: Vec<Point>, basestation: Point, exponent: f64) -> Result<Self> {
        let gains = su_positions
            .iter()
            .map(|p| pathloss(distance(*p, basestation), exponent))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            su_positions,
            basestation,
            gains,
        })
    }

    /// Drops `n` SUs uniformly in a square of side `area_side` centred on the
    /// origin, with the base station at `(bs_distance, 0)`.
    pub fn random(
        n: usize,
        area_side: f64,
        bs_distance: f64,
        exponent: f64,
        rng: &mut RandomStream,
    ) -> Result<Self> {
        let half = area_side / 2.0;
        let positions = (0..n)
            .map(|_| {
                [
                    rng.random_range(-half..=half),
                    rng.random_range(-half..=half),
                ]
            })
            .collect();
        Self::new(positions, [bs_distance, 0.0], exponent)
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Fading and primary-user occupancy for one slot.
///
/// Fading is tracked through the underlying circular complex Gaussian
/// `g = x + j y` with `x, y ~ N(0, 1/2)`; the power factor is `|g|^2`, which
/// is unit-mean exponential (Rayleigh amplitude).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    num_sus: usize,
    num_channels: usize,
    gaussian: Vec<[f64; 2]>,
    fading: Vec<f64>,
    pub pu_active: Vec<bool>,
    pub pu_prob: Vec<f64>,
}

impl ChannelState {
    /// Draws fading from its stationary distribution; no PU is active until
    /// the first [`step_pu`](Self::step_pu).
    pub fn new(num_sus: usize, pu_prob: Vec<f64>, rng: &mut RandomStream) -> Self {
        let num_channels = pu_prob.len();
        let gaussian: Vec<[f64; 2]> = (0..num_sus * num_channels)
            .map(|_| complex_gaussian(rng))
            .collect();
        let fading = gaussian.iter().map(|g| power(*g)).collect();
        Self {
            num_sus,
            num_channels,
            gaussian,
            fading,
            pu_active: vec![false; num_channels],
            pu_prob,
        }
    }

    pub fn num_sus(&self) -> usize {
        self.num_sus
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn fading(&self, su: usize, channel: usize) -> f64 {
        self.fading[su * self.num_channels + channel]
    }

    /// First-order Gauss-Markov update `g' = rho g + sqrt(1 - rho^2) w`,
    /// applied independently to every (SU, channel) pair.
    pub fn step_fading(&mut self, rho: f64, rng: &mut RandomStream) {
        let innovation = (1.0 - rho * rho).max(0.0).sqrt();
        for (g, h) in self.gaussian.iter_mut().zip(self.fading.iter_mut()) {
            let w = complex_gaussian(rng);
            g[0] = rho * g[0] + innovation * w[0];
            g[1] = rho * g[1] + innovation * w[1];
            *h = power(*g);
        }
    }

    /// Independent Bernoulli(`pu_prob[k]`) draw per channel.
    pub fn step_pu(&mut self, rng: &mut RandomStream) {
        for (active, &p) in self.pu_active.iter_mut().zip(&self.pu_prob) {
            *active = rng.random::<f64>() < p;
        }
    }
}

fn complex_gaussian(rng: &mut RandomStream) -> [f64; 2] {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    [x * std::f64::consts::FRAC_1_SQRT_2, y * std::f64::consts::FRAC_1_SQRT_2]
}

fn power(g: [f64; 2]) -> f64 {
    g[0] * g[0] + g[1] * g[1]
}
