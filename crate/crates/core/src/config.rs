//! Scenario configuration.
//!
//! A scenario is described by a flat TOML document whose keys override the
//! defaults (and, optionally, a named preset). Every key is a scalar or a
//! simple array; there are no tables. Diagnostics carry the line of the
//! offending key.
//!
//! ```toml
//! preset = "fig2"
//! entry_fee = 8
//! schemes = ["threshold", "myopic"]
//! ```

use std::fmt::Write as _;

use toml::{Table, Value};

use crate::agents::{Fees, Strategy};
use crate::auction::AuctionRule;
use crate::channel::{Point, RadioParams};
use crate::error::ConfigError;

pub const PRESETS: [&str; 5] = ["fig2", "fig3", "fig4", "fig56", "fig7"];

/// Piecewise-constant fees: each segment applies from `start` until the next
/// segment begins.
#[derive(Debug, Clone, PartialEq)]
pub struct FeeSchedule {
    segments: Vec<FeeSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeeSegment {
    pub start: u64,
    pub entry: f64,
    pub monitor: f64,
}

impl FeeSchedule {
    pub fn constant(entry: f64, monitor: f64) -> Self {
        Self {
            segments: vec![FeeSegment {
                start: 0,
                entry,
                monitor,
            }],
        }
    }

    pub fn from_segments(mut segments: Vec<FeeSegment>) -> Result<Self, ConfigError> {
        segments.sort_by_key(|s| s.start);
        if segments.first().map(|s| s.start) != Some(0) {
            return Err(ConfigError::for_key("fee_schedule", "first segment must start at slot 0"));
        }
        if segments.windows(2).any(|w| w[0].start == w[1].start) {
            return Err(ConfigError::for_key("fee_schedule", "duplicate segment start"));
        }
        for s in &segments {
            if !(s.entry.is_finite() && s.monitor.is_finite() && s.entry >= 0.0 && s.monitor >= 0.0) {
                return Err(ConfigError::for_key("fee_schedule", "fees must be finite and >= 0"));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[FeeSegment] {
        &self.segments
    }

    pub fn at(&self, slot: u64) -> Fees {
        let idx = self.segments.partition_point(|s| s.start <= slot) - 1;
        let s = self.segments[idx];
        Fees {
            entry: s.entry,
            monitor: s.monitor,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.segments.len() == 1
    }
}

/// Primary-user activity: a Bernoulli probability per channel plus scripted
/// windows `[start, end)` during which every channel is occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct PuSchedule {
    /// One entry (shared by all channels) or one per channel.
    pub prob: Vec<f64>,
    pub windows: Vec<(u64, u64)>,
}

impl Default for PuSchedule {
    fn default() -> Self {
        Self {
            prob: vec![0.0],
            windows: Vec::new(),
        }
    }
}

impl PuSchedule {
    pub fn in_window(&self, slot: u64) -> bool {
        self.windows.iter().any(|&(s, e)| s <= slot && slot < e)
    }

    pub fn prob_at(&self, slot: u64, channel: usize) -> f64 {
        if self.in_window(slot) {
            1.0
        } else if self.prob.len() == 1 {
            self.prob[0]
        } else {
            self.prob[channel]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    /// SUs dropped uniformly in a square of side `area_side` centred on the
    /// origin; the base station sits `bs_distance` from the centre.
    Random { area_side: f64, bs_distance: f64 },
    Explicit {
        positions: Vec<Point>,
        basestation: Point,
    },
}

/// Strategy assignment for one arm of a comparison: either one strategy for
/// every SU or one per SU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme(Vec<Strategy>);

impl Scheme {
    pub fn uniform(strategy: Strategy) -> Self {
        Self(vec![strategy])
    }

    pub fn per_su(strategies: Vec<Strategy>) -> Self {
        Self(strategies)
    }

    pub fn strategy_of(&self, su: usize) -> Strategy {
        if self.0.len() == 1 {
            self.0[0]
        } else {
            self.0[su]
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.0.len() == 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self) -> String {
        self.0
            .iter()
            .map(|s| s.name())
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let strategies = text
            .split('/')
            .map(str::parse)
            .collect::<Result<Vec<Strategy>, _>>()?;
        Ok(Self(strategies))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sweep {
    pub num_sus: Vec<usize>,
    pub entry_fee: Vec<f64>,
    pub monitor_fee: Vec<f64>,
}

impl Sweep {
    pub fn is_empty(&self) -> bool {
        self.num_sus.is_empty() && self.entry_fee.is_empty() && self.monitor_fee.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_sus: usize,
    pub num_channels: usize,
    pub horizon: u64,
    pub fees: FeeSchedule,
    pub radio: RadioParams,
    pub topology: TopologySpec,
    pub pu: PuSchedule,
    /// Strategy arms compared under common random numbers.
    pub schemes: Vec<Scheme>,
    pub alpha: f64,
    /// Regret window in slots.
    pub nu: usize,
    pub kappa_init: f64,
    pub rule: AuctionRule,
    /// Charge the monitoring fee once per channel instead of once per slot.
    pub monitor_fee_per_channel: bool,
    pub seed: u64,
    pub replications: u32,
    pub write_trace: bool,
    pub sweep: Sweep,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_sus: 2,
            num_channels: 1,
            horizon: 10_000,
            fees: FeeSchedule::constant(10.0, 1.0),
            radio: RadioParams::default(),
            topology: TopologySpec::Random {
                area_side: 100.0,
                bs_distance: 1000.0,
            },
            pu: PuSchedule::default(),
            schemes: vec![
                Scheme::uniform(Strategy::Threshold),
                Scheme::uniform(Strategy::Myopic),
            ],
            alpha: 0.05,
            nu: 10,
            kappa_init: 1.0,
            rule: AuctionRule::SecondPrice,
            monitor_fee_per_channel: false,
            seed: 1,
            replications: 1,
            write_trace: true,
            sweep: Sweep::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        match name {
            "fig2" => {
                c.pu.windows = vec![(4000, 6000)];
                c.replications = 20;
            }
            "fig3" => {
                c.sweep.monitor_fee = vec![1.0, 5.0, 10.0];
                c.sweep.entry_fee = (1..=10).map(f64::from).collect();
                c.replications = 20;
                c.write_trace = false;
            }
            "fig4" => {
                c.num_sus = 16;
                c.fees = FeeSchedule::constant(5.0, 5.0);
            }
            "fig56" => {
                c.sweep.num_sus = vec![2, 4, 8, 16];
                c.replications = 20;
                c.write_trace = false;
            }
            "fig7" => {
                c.num_channels = 2;
                c.fees = FeeSchedule::constant(5.0, 5.0);
                c.schemes = vec![
                    Scheme::uniform(Strategy::Bcb),
                    Scheme::uniform(Strategy::Ga),
                    Scheme::uniform(Strategy::Nrl),
                ];
                c.replications = 20;
                c.write_trace = false;
            }
            other => {
                return Err(ConfigError::for_key(
                    "preset",
                    format!("unknown preset `{other}` (expected one of {})", PRESETS.join(", ")),
                ))
            }
        }
        Ok(c)
    }

    pub fn fees_at(&self, slot: u64) -> Fees {
        self.fees.at(slot)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |key: &str, msg: &str| Err(ConfigError::for_key(key, msg));
        if self.num_sus < 1 {
            return fail("num_sus", "must be >= 1");
        }
        if self.num_channels < 1 {
            return fail("num_channels", "must be >= 1");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail("alpha", "must be in (0, 1]");
        }
        if self.nu < 1 {
            return fail("nu", "must be >= 1");
        }
        if !(self.kappa_init.is_finite() && self.kappa_init >= 0.0) {
            return fail("kappa_init", "must be finite and >= 0");
        }
        self.radio.validate().map_err(|e| match e {
            crate::Error::Config(c) => c,
            other => ConfigError::new(other.to_string()),
        })?;
        match &self.topology {
            TopologySpec::Random {
                area_side,
                bs_distance,
            } => {
                if !(area_side.is_finite() && *area_side >= 0.0) {
                    return fail("area_side", "must be finite and >= 0");
                }
                if !(bs_distance.is_finite() && *bs_distance > area_side / 2.0 * 2f64.sqrt()) {
                    return fail("bs_distance", "base station must lie outside the SU area");
                }
            }
            TopologySpec::Explicit {
                positions,
                basestation,
            } => {
                if positions.len() != self.num_sus {
                    return fail("positions", "need exactly one position per SU");
                }
                if positions.iter().any(|p| p == basestation) {
                    return fail("positions", "an SU coincides with the base station");
                }
                if !self.sweep.num_sus.is_empty() {
                    return fail("sweep_num_sus", "cannot sweep N with explicit positions");
                }
            }
        }
        if self.pu.prob.len() != 1 && self.pu.prob.len() != self.num_channels {
            return fail("pu_prob", "give one probability or one per channel");
        }
        if self.pu.prob.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return fail("pu_prob", "probabilities must lie in [0, 1]");
        }
        if self.pu.windows.iter().any(|(s, e)| s >= e) {
            return fail("pu_windows", "each window needs start < end");
        }
        if self.schemes.is_empty() {
            return fail("schemes", "at least one scheme is required");
        }
        for s in &self.schemes {
            if s.is_empty() {
                return fail("schemes", "empty scheme");
            }
            if !s.is_uniform() {
                if s.len() != self.num_sus {
                    return fail("schemes", "per-SU schemes need one strategy per SU");
                }
                if !self.sweep.num_sus.is_empty() {
                    return fail("schemes", "per-SU schemes cannot be combined with sweep_num_sus");
                }
            }
        }
        if self.sweep.num_sus.contains(&0) {
            return fail("sweep_num_sus", "counts must be >= 1");
        }
        let bad_fee = |v: &f64| !(v.is_finite() && *v >= 0.0);
        for seg in self.fees.segments() {
            if bad_fee(&seg.entry) {
                return fail("entry_fee", "must be finite and >= 0");
            }
            if bad_fee(&seg.monitor) {
                return fail("monitor_fee", "must be finite and >= 0");
            }
        }
        if self.sweep.entry_fee.iter().any(bad_fee) {
            return fail("sweep_entry_fee", "fees must be finite and >= 0");
        }
        if self.sweep.monitor_fee.iter().any(bad_fee) {
            return fail("sweep_monitor_fee", "fees must be finite and >= 0");
        }
        if !self.fees.is_constant()
            && (!self.sweep.entry_fee.is_empty() || !self.sweep.monitor_fee.is_empty())
        {
            return fail("fee_schedule", "fee sweeps need constant fees");
        }
        Ok(())
    }

    /// Cartesian product of the sweep axes (N outermost, entry fee
    /// innermost). A config without sweeps expands to itself with an empty
    /// label.
    pub fn expand(&self) -> Vec<(String, ScenarioConfig)> {
        let base = {
            let mut b = self.clone();
            b.sweep = Sweep::default();
            b
        };
        let ns: Vec<Option<usize>> = axis(&self.sweep.num_sus);
        let es: Vec<Option<f64>> = axis(&self.sweep.monitor_fee);
        let cs: Vec<Option<f64>> = axis(&self.sweep.entry_fee);
        let mut out = Vec::new();
        for n in &ns {
            for e in &es {
                for c in &cs {
                    let mut cfg = base.clone();
                    let mut label = Vec::new();
                    if let Some(n) = n {
                        cfg.num_sus = *n;
                        label.push(format!("num_sus={n}"));
                    }
                    if e.is_some() || c.is_some() {
                        let current = cfg.fees.at(0);
                        let entry = c.unwrap_or(current.entry);
                        let monitor = e.unwrap_or(current.monitor);
                        cfg.fees = FeeSchedule::constant(entry, monitor);
                        if c.is_some() {
                            label.push(format!("entry_fee={entry}"));
                        }
                        if e.is_some() {
                            label.push(format!("monitor_fee={monitor}"));
                        }
                    }
                    out.push((label.join(" "), cfg));
                }
            }
        }
        out
    }

    /// Renders the config as a flat TOML document accepted by
    /// [`parse_config`].
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("num_sus", self.num_sus.to_string());
        kv("num_channels", self.num_channels.to_string());
        kv("horizon", self.horizon.to_string());
        if self.fees.is_constant() {
            let f = self.fees.at(0);
            kv("entry_fee", float(f.entry));
            kv("monitor_fee", float(f.monitor));
        } else {
            let segs: Vec<String> = self
                .fees
                .segments()
                .iter()
                .map(|s| format!("[{}, {}, {}]", s.start, float(s.entry), float(s.monitor)))
                .collect();
            kv("fee_schedule", format!("[{}]", segs.join(", ")));
        }
        let r = &self.radio;
        kv("bandwidth", float(r.bandwidth));
        kv("tx_power", float(r.tx_power));
        kv("noise_power", float(r.noise_power));
        kv("pathloss_exponent", float(r.pathloss_exponent));
        kv("frame_length", float(r.frame_length));
        kv("doppler_freq", float(r.doppler_freq));
        kv("snr_includes_power", r.snr_includes_power.to_string());
        match &self.topology {
            TopologySpec::Random {
                area_side,
                bs_distance,
            } => {
                kv("area_side", float(*area_side));
                kv("bs_distance", float(*bs_distance));
            }
            TopologySpec::Explicit {
                positions,
                basestation,
            } => {
                let ps: Vec<String> = positions
                    .iter()
                    .map(|p| format!("[{}, {}]", float(p[0]), float(p[1])))
                    .collect();
                kv("positions", format!("[{}]", ps.join(", ")));
                kv(
                    "basestation",
                    format!("[{}, {}]", float(basestation[0]), float(basestation[1])),
                );
            }
        }
        kv("pu_prob", float_list(&self.pu.prob));
        let ws: Vec<String> = self
            .pu
            .windows
            .iter()
            .map(|(a, b)| format!("[{a}, {b}]"))
            .collect();
        kv("pu_windows", format!("[{}]", ws.join(", ")));
        let schemes: Vec<String> = self.schemes.iter().map(|s| format!("\"{}\"", s.name())).collect();
        kv("schemes", format!("[{}]", schemes.join(", ")));
        kv("alpha", float(self.alpha));
        kv("nu", self.nu.to_string());
        kv("kappa_init", float(self.kappa_init));
        kv(
            "auction_rule",
            match self.rule {
                AuctionRule::FirstPrice => "\"first\"",
                AuctionRule::SecondPrice => "\"second\"",
            }
            .to_string(),
        );
        kv("monitor_fee_per_channel", self.monitor_fee_per_channel.to_string());
        // TOML integers are signed 64-bit; larger seeds go out as strings
        kv(
            "seed",
            if i64::try_from(self.seed).is_ok() {
                self.seed.to_string()
            } else {
                format!("\"{}\"", self.seed)
            },
        );
        kv("replications", self.replications.to_string());
        kv("write_trace", self.write_trace.to_string());
        let ns: Vec<String> = self.sweep.num_sus.iter().map(|n| n.to_string()).collect();
        kv("sweep_num_sus", format!("[{}]", ns.join(", ")));
        kv("sweep_entry_fee", float_list(&self.sweep.entry_fee));
        kv("sweep_monitor_fee", float_list(&self.sweep.monitor_fee));
        s
    }
}

fn axis<T: Copy>(values: &[T]) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

fn float(v: f64) -> String {
    // Debug gives the shortest round-tripping form and always marks floats
    // (`1.0`, `1e-12`), both valid TOML.
    format!("{v:?}")
}

fn float_list(vs: &[f64]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| float(*v)).collect();
    format!("[{}]", parts.join(", "))
}

/// Parses an override document on top of the defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_config_with_preset(text, None)
}

/// Like [`parse_config`]; a `preset` argument takes precedence over a
/// `preset` key in the document.
pub fn parse_config_with_preset(
    text: &str,
    preset: Option<&str>,
) -> Result<ScenarioConfig, ConfigError> {
    let table: Table = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|span| line_of_offset(text, span.start));
        ConfigError::new(e.message().trim().to_string()).at_line(line)
    })?;
    let doc_preset = match table.get("preset") {
        Some(Value::String(s)) => Some(s.as_str()),
        Some(_) => return Err(ConfigError::for_key("preset", "expected a string").at_line(key_line(text, "preset"))),
        None => None,
    };
    let mut cfg = match preset.or(doc_preset) {
        Some(name) => ScenarioConfig::preset(name).map_err(|e| e.at_line(key_line(text, "preset")))?,
        None => ScenarioConfig::default(),
    };
    let mut random_topology = match &cfg.topology {
        TopologySpec::Random {
            area_side,
            bs_distance,
        } => (*area_side, *bs_distance),
        TopologySpec::Explicit { .. } => unreachable!("presets use random topologies"),
    };
    let mut positions: Option<Vec<Point>> = None;
    let mut basestation: Option<Point> = None;
    let mut entry_fee: Option<f64> = None;
    let mut monitor_fee: Option<f64> = None;
    let mut schedule: Option<Vec<FeeSegment>> = None;

    for (key, value) in &table {
        let at = |e: ConfigError| e.at_line(key_line(text, key));
        let k = key.as_str();
        match k {
            "preset" => {}
            "num_sus" => cfg.num_sus = get_usize(k, value).map_err(at)?,
            "num_channels" => cfg.num_channels = get_usize(k, value).map_err(at)?,
            "horizon" => cfg.horizon = get_u64(k, value).map_err(at)?,
            "entry_fee" => entry_fee = Some(get_f64(k, value).map_err(at)?),
            "monitor_fee" => monitor_fee = Some(get_f64(k, value).map_err(at)?),
            "fee_schedule" => {
                let rows = get_rows(k, value, 3).map_err(at)?;
                let segs = rows
                    .into_iter()
                    .map(|r| {
                        if r[0] < 0.0 || r[0].fract() != 0.0 {
                            return Err(ConfigError::for_key(k, "segment start must be a slot index"));
                        }
                        Ok(FeeSegment {
                            start: r[0] as u64,
                            entry: r[1],
                            monitor: r[2],
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(at)?;
                schedule = Some(segs);
            }
            "bandwidth" => cfg.radio.bandwidth = get_f64(k, value).map_err(at)?,
            "tx_power" => cfg.radio.tx_power = get_f64(k, value).map_err(at)?,
            "noise_power" => cfg.radio.noise_power = get_f64(k, value).map_err(at)?,
            "pathloss_exponent" => cfg.radio.pathloss_exponent = get_f64(k, value).map_err(at)?,
            "frame_length" => cfg.radio.frame_length = get_f64(k, value).map_err(at)?,
            "doppler_freq" => cfg.radio.doppler_freq = get_f64(k, value).map_err(at)?,
            "snr_includes_power" => cfg.radio.snr_includes_power = get_bool(k, value).map_err(at)?,
            "area_side" => random_topology.0 = get_f64(k, value).map_err(at)?,
            "bs_distance" => random_topology.1 = get_f64(k, value).map_err(at)?,
            "positions" => {
                let rows = get_rows(k, value, 2).map_err(at)?;
                positions = Some(rows.into_iter().map(|r| [r[0], r[1]]).collect());
            }
            "basestation" => {
                let v = get_f64_list(k, value).map_err(at)?;
                if v.len() != 2 {
                    return Err(at(ConfigError::for_key(k, "expected [x, y]")));
                }
                basestation = Some([v[0], v[1]]);
            }
            "pu_prob" => {
                cfg.pu.prob = match value {
                    Value::Array(_) => get_f64_list(k, value).map_err(at)?,
                    _ => vec![get_f64(k, value).map_err(at)?],
                }
            }
            "pu_windows" => {
                let rows = get_rows(k, value, 2).map_err(at)?;
                cfg.pu.windows = rows
                    .into_iter()
                    .map(|r| {
                        if r.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
                            Err(ConfigError::for_key(k, "window bounds must be slot indices"))
                        } else {
                            Ok((r[0] as u64, r[1] as u64))
                        }
                    })
                    .collect::<Result<_, _>>()
                    .map_err(at)?;
            }
            "schemes" => {
                let Value::Array(items) = value else {
                    return Err(at(ConfigError::for_key(k, "expected an array of strings")));
                };
                cfg.schemes = items
                    .iter()
                    .map(|item| match item {
                        Value::String(s) => Scheme::parse(s).map_err(|m| ConfigError::for_key(k, m)),
                        _ => Err(ConfigError::for_key(k, "expected an array of strings")),
                    })
                    .collect::<Result<_, _>>()
                    .map_err(at)?;
            }
            "alpha" => cfg.alpha = get_f64(k, value).map_err(at)?,
            "nu" => cfg.nu = get_usize(k, value).map_err(at)?,
            "kappa_init" => cfg.kappa_init = get_f64(k, value).map_err(at)?,
            "auction_rule" => {
                cfg.rule = match value.as_str() {
                    Some("first") => AuctionRule::FirstPrice,
                    Some("second") => AuctionRule::SecondPrice,
                    _ => return Err(at(ConfigError::for_key(k, "expected \"first\" or \"second\""))),
                }
            }
            "monitor_fee_per_channel" => cfg.monitor_fee_per_channel = get_bool(k, value).map_err(at)?,
            "seed" => cfg.seed = get_seed(k, value).map_err(at)?,
            "replications" => {
                let n = get_u64(k, value).map_err(at)?;
                cfg.replications = u32::try_from(n)
                    .map_err(|_| at(ConfigError::for_key(k, "too many replications")))?;
            }
            "write_trace" => cfg.write_trace = get_bool(k, value).map_err(at)?,
            "sweep_num_sus" => {
                let Value::Array(items) = value else {
                    return Err(at(ConfigError::for_key(k, "expected an array of integers")));
                };
                cfg.sweep.num_sus = items
                    .iter()
                    .map(|v| get_usize(k, v))
                    .collect::<Result<_, _>>()
                    .map_err(at)?;
            }
            "sweep_entry_fee" => cfg.sweep.entry_fee = get_f64_list(k, value).map_err(at)?,
            "sweep_monitor_fee" => cfg.sweep.monitor_fee = get_f64_list(k, value).map_err(at)?,
            _ => return Err(at(ConfigError::for_key(k, "unknown key"))),
        }
    }

    if let Some(segs) = schedule {
        if entry_fee.is_some() || monitor_fee.is_some() {
            return Err(ConfigError::for_key("fee_schedule", "conflicts with entry_fee/monitor_fee")
                .at_line(key_line(text, "fee_schedule")));
        }
        cfg.fees = FeeSchedule::from_segments(segs).map_err(|e| e.at_line(key_line(text, "fee_schedule")))?;
    } else if entry_fee.is_some() || monitor_fee.is_some() {
        let current = cfg.fees.at(0);
        cfg.fees = FeeSchedule::constant(
            entry_fee.unwrap_or(current.entry),
            monitor_fee.unwrap_or(current.monitor),
        );
        if !(cfg.fees.at(0).entry.is_finite() && cfg.fees.at(0).entry >= 0.0) {
            return Err(ConfigError::for_key("entry_fee", "must be finite and >= 0")
                .at_line(key_line(text, "entry_fee")));
        }
        if !(cfg.fees.at(0).monitor.is_finite() && cfg.fees.at(0).monitor >= 0.0) {
            return Err(ConfigError::for_key("monitor_fee", "must be finite and >= 0")
                .at_line(key_line(text, "monitor_fee")));
        }
    }

    cfg.topology = match positions {
        Some(positions) => TopologySpec::Explicit {
            positions,
            basestation: basestation.unwrap_or([random_topology.1, 0.0]),
        },
        None => {
            if basestation.is_some() {
                return Err(ConfigError::for_key("basestation", "only valid together with positions")
                    .at_line(key_line(text, "basestation")));
            }
            TopologySpec::Random {
                area_side: random_topology.0,
                bs_distance: random_topology.1,
            }
        }
    };

    cfg.validate().map_err(|e| {
        let line = e.key.as_deref().and_then(|k| key_line(text, k));
        e.at_line(line)
    })?;
    Ok(cfg)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line on which `key` is assigned, if it appears in the document.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|line| {
        let t = line.trim_start();
        let t = t.strip_prefix(key).or_else(|| {
            t.strip_prefix('"')
                .and_then(|r| r.strip_prefix(key))
                .and_then(|r| r.strip_prefix('"'))
        });
        t.is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn get_f64(key: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::for_key(key, "expected a number")),
    }
}

fn get_u64(key: &str, v: &Value) -> Result<u64, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Integer(_) => Err(ConfigError::for_key(key, "must be >= 0")),
        _ => Err(ConfigError::for_key(key, "expected an integer")),
    }
}

/// Seeds may also be given as decimal strings to reach the full `u64` range.
fn get_seed(key: &str, v: &Value) -> Result<u64, ConfigError> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|_| ConfigError::for_key(key, "expected an unsigned 64-bit integer")),
        other => get_u64(key, other),
    }
}

fn get_usize(key: &str, v: &Value) -> Result<usize, ConfigError> {
    get_u64(key, v).and_then(|n| usize::try_from(n).map_err(|_| ConfigError::for_key(key, "too large")))
}

fn get_bool(key: &str, v: &Value) -> Result<bool, ConfigError> {
    v.as_bool().ok_or_else(|| ConfigError::for_key(key, "expected true or false"))
}

fn get_f64_list(key: &str, v: &Value) -> Result<Vec<f64>, ConfigError> {
    match v {
        Value::Array(items) => items.iter().map(|x| get_f64(key, x)).collect(),
        _ => Err(ConfigError::for_key(key, "expected an array of numbers")),
    }
}

fn get_rows(key: &str, v: &Value, width: usize) -> Result<Vec<Vec<f64>>, ConfigError> {
    let Value::Array(rows) = v else {
        return Err(ConfigError::for_key(key, "expected an array of arrays"));
    };
    rows.iter()
        .map(|row| {
            let r = get_f64_list(key, row)?;
            if r.len() != width {
                return Err(ConfigError::for_key(key, format!("each entry needs {width} numbers")));
            }
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.radio.pathloss_exponent, 3.0);
        assert_eq!(cfg.radio.tx_power, 0.1);
        assert!((cfg.radio.noise_power - 1e-12).abs() < 1e-24);
        assert_eq!(cfg.radio.bandwidth, 1.0);
        assert_eq!(cfg.radio.frame_length, 100e-6);
        assert_eq!(cfg.radio.doppler_freq, 100.0);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.nu, 10);
    }

    #[test]
    fn alpha_out_of_range() {
        let err = parse_config("seed = 3\nalpha = 1.5\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.key.as_deref(), Some("alpha"));
    }

    #[test]
    fn sixteen_users_equal_fig4() {
        let cfg = parse_config("num_sus = 16\nentry_fee = 5\nmonitor_fee = 5\n").unwrap();
        assert_eq!(cfg, ScenarioConfig::preset("fig4").unwrap());
    }

    #[test]
    fn unknown_key_is_line_addressed() {
        let err = parse_config("# comment\nnum_sus = 3\nbogus = 1\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.to_string().contains("unknown key"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_config("num_sus = 3\nalpha = = 2\n").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn type_errors() {
        assert!(parse_config("num_sus = \"two\"").is_err());
        assert!(parse_config("num_sus = -1").is_err());
        assert!(parse_config("num_sus = 0").is_err());
        assert!(parse_config("entry_fee = -1").is_err());
        assert!(parse_config("pu_prob = 1.5").is_err());
        assert!(parse_config("schemes = [\"greedy\"]").is_err());
        assert!(parse_config("auction_rule = \"third\"").is_err());
    }

    #[test]
    fn preset_key_and_override() {
        let cfg = parse_config("preset = \"fig7\"\nreplications = 3\n").unwrap();
        assert_eq!(cfg.num_channels, 2);
        assert_eq!(cfg.replications, 3);
        let cfg = parse_config_with_preset("", Some("fig2")).unwrap();
        assert_eq!(cfg.pu.windows, vec![(4000, 6000)]);
        assert!(parse_config("preset = \"fig9\"").is_err());
    }

    #[test]
    fn fee_schedule_lookup() {
        let cfg = parse_config("fee_schedule = [[0, 10, 1], [100, 2, 3]]").unwrap();
        assert_eq!(cfg.fees_at(99), Fees { entry: 10.0, monitor: 1.0 });
        assert_eq!(cfg.fees_at(100), Fees { entry: 2.0, monitor: 3.0 });
        assert!(parse_config("fee_schedule = [[5, 10, 1]]").is_err());
        assert!(parse_config("fee_schedule = [[0, 10, 1]]\nentry_fee = 3").is_err());
    }

    #[test]
    fn explicit_positions() {
        let cfg = parse_config("num_sus = 2\npositions = [[0, 0], [10, 0]]\nbasestation = [500, 0]").unwrap();
        assert_eq!(
            cfg.topology,
            TopologySpec::Explicit {
                positions: vec![[0.0, 0.0], [10.0, 0.0]],
                basestation: [500.0, 0.0]
            }
        );
        assert!(parse_config("num_sus = 3\npositions = [[0, 0], [10, 0]]").is_err());
    }

    #[test]
    fn per_su_schemes() {
        let cfg = parse_config("schemes = [\"threshold/myopic\", \"myopic\"]").unwrap();
        assert_eq!(cfg.schemes[0].strategy_of(1), Strategy::Myopic);
        assert_eq!(cfg.schemes[0].name(), "threshold/myopic");
        assert!(parse_config("schemes = [\"threshold/myopic/nrl\"]").is_err());
    }

    #[test]
    fn pu_windows() {
        let p = PuSchedule {
            prob: vec![0.2, 0.4],
            windows: vec![(10, 20)],
        };
        assert_eq!(p.prob_at(9, 1), 0.4);
        assert_eq!(p.prob_at(10, 0), 1.0);
        assert_eq!(p.prob_at(20, 0), 0.2);
    }

    #[test]
    fn sweeps_expand_in_order() {
        let cfg = ScenarioConfig::preset("fig3").unwrap();
        let runs = cfg.expand();
        assert_eq!(runs.len(), 30);
        assert_eq!(runs[0].0, "entry_fee=1 monitor_fee=1");
        assert_eq!(runs[1].1.fees_at(0), Fees { entry: 2.0, monitor: 1.0 });
        assert_eq!(runs[29].1.fees_at(0), Fees { entry: 10.0, monitor: 10.0 });
        let single = ScenarioConfig::default().expand();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].0, "");
    }

    #[test]
    fn every_preset_round_trips() {
        for name in PRESETS {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(parse_config(&cfg.to_toml_string()).unwrap(), cfg, "{name}");
        }
    }
}
