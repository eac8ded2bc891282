//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::channel::{ChannelModel, ChannelParams, Dimension, ReleaseMode};
use crate::error::{Error, Result};

/// Transmission scheme and detector pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    TsPrecoder,
    CskNoMemory,
    CskGenie,
    McskNoMemory,
    McskGenie,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::TsPrecoder,
        SchemeKind::CskNoMemory,
        SchemeKind::CskGenie,
        SchemeKind::McskNoMemory,
        SchemeKind::McskGenie,
    ];
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "TS_precoder" => Ok(SchemeKind::TsPrecoder),
            "CSK_nomem" => Ok(SchemeKind::CskNoMemory),
            "CSK_genie" => Ok(SchemeKind::CskGenie),
            "MCSK_nomem" => Ok(SchemeKind::McskNoMemory),
            "MCSK_genie" => Ok(SchemeKind::McskGenie),
            _ => Err(Error::Config(format!("unknown scheme '{s}'"))),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::TsPrecoder => "TS_precoder",
            SchemeKind::CskNoMemory => "CSK_nomem",
            SchemeKind::CskGenie => "CSK_genie",
            SchemeKind::McskNoMemory => "MCSK_nomem",
            SchemeKind::McskGenie => "MCSK_genie",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerRule {
    None,
    Lloyd,
    Uniform,
}

impl FromStr for QuantizerRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(QuantizerRule::None),
            "lloyd" => Ok(QuantizerRule::Lloyd),
            "uniform" => Ok(QuantizerRule::Uniform),
            _ => Err(Error::Config(format!("unknown quantizer '{s}'"))),
        }
    }
}

impl fmt::Display for QuantizerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantizerRule::None => "none",
            QuantizerRule::Lloyd => "lloyd",
            QuantizerRule::Uniform => "uniform",
        })
    }
}

/// How the counting-noise variance is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactionMode {
    Full,
    None,
    Fdm,
}

impl FromStr for ReactionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ReactionMode::Full),
            "none" => Ok(ReactionMode::None),
            "fdm" => Ok(ReactionMode::Fdm),
            _ => Err(Error::Config(format!("unknown reaction mode '{s}'"))),
        }
    }
}

/// Minimum number of Monte Carlo trials per point.
pub const MIN_TRIALS: usize = 1_000;

/// Every experiment setting. Field names match the configuration keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    pub dimension: Dimension,
    /// Diffusion coefficient of species A (m²/s).
    pub diffusion: f64,
    /// Diffusion coefficient of species B (m²/s).
    pub diffusion_b: f64,
    /// Transmitter-receiver distance (m).
    pub distance: f64,
    /// Rectangular release width in seconds; 0 selects impulse release.
    pub release_width: f64,
    /// Receiver volume in cm³.
    pub receiver_volume_cm3: f64,
    /// Released amount per slot, averaged over symbols (power axis).
    pub powers: Vec<f64>,
    /// Channel memory `L`; when absent `epsilon` selects it.
    pub memory: Option<usize>,
    pub epsilon: f64,
    /// Scale amplitudes so every scheme releases `power` per slot on average.
    pub normalize_power: bool,
    pub quantizer: QuantizerRule,
    pub levels: Vec<usize>,
    /// Precoder outputs used to train quantizers.
    pub training: usize,
    pub reaction: ReactionMode,
    /// Dimensionless medium reaction rate for FDM runs.
    pub zeta: f64,
    pub ratios: Vec<f64>,
    /// Local reaction strengths `zeta * lambda * delta * T_r` at the receiver.
    pub products: Vec<f64>,
    /// Local reaction window `T_r` (s).
    pub reaction_time: f64,
    /// Slot length for the reaction experiment (s).
    pub slot: f64,
    /// Differential concentration targeted at the receiver in the reaction experiment.
    pub target: f64,
    /// Random frames averaged in the reaction experiment.
    pub frames: usize,
    /// Slots per frame in the reaction experiment.
    pub frame_slots: usize,
    /// Counted symbols per trial.
    pub frame_length: usize,
    pub trials: usize,
    /// Channel memory used by FDM-driven BER runs.
    pub fdm_memory: usize,
    pub fdm_dx: f64,
    pub receiver_width: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::TsPrecoder,
            dimension: Dimension::One,
            diffusion: 2.2e-9,
            diffusion_b: 2.2e-9,
            distance: 2.15e-7,
            release_width: 0.0,
            receiver_volume_cm3: 5e-16,
            powers: vec![3e14, 1e15, 2e15, 4e15, 8e15],
            memory: Some(10),
            epsilon: 1e-3,
            normalize_power: true,
            quantizer: QuantizerRule::None,
            levels: vec![2, 3, 4, 5, 8, 16, 64],
            training: 100_000,
            reaction: ReactionMode::Full,
            zeta: 10.0,
            ratios: vec![1.0, 0.9, 1.1, 0.8],
            products: vec![0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            reaction_time: 1e-5,
            slot: 6e-5,
            target: 9e4,
            frames: 1000,
            frame_slots: 3,
            frame_length: 10_000,
            trials: 1_000,
            fdm_memory: 2,
            fdm_dx: 2.5e-9,
            receiver_width: 1e-8,
            seed: 1,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for key '{key}'")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Reads a configuration file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_with_defaults(&text)
    }

    pub fn from_str_with_defaults(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `key=value` overrides, then validates.
    pub fn apply_overrides<'a, I: IntoIterator<Item = &'a str>>(
        &mut self,
        overrides: I,
    ) -> Result<()> {
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{item}' is not key=value")))?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scheme" => self.scheme = value.parse()?,
            "dimension" => {
                self.dimension = match value {
                    "1" => Dimension::One,
                    "3" => Dimension::Three,
                    _ => {
                        return Err(Error::Config(format!(
                            "dimension must be 1 or 3, got '{value}'"
                        )))
                    }
                }
            }
            "diffusion" => self.diffusion = parse(key, value)?,
            "diffusion_b" => self.diffusion_b = parse(key, value)?,
            "distance" => self.distance = parse(key, value)?,
            "release_width" => self.release_width = parse(key, value)?,
            "receiver_volume_cm3" => self.receiver_volume_cm3 = parse(key, value)?,
            "powers" => self.powers = parse_list(key, value)?,
            "memory" => {
                self.memory = match value {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "epsilon" => self.epsilon = parse(key, value)?,
            "normalize_power" => self.normalize_power = parse(key, value)?,
            "quantizer" => self.quantizer = value.parse()?,
            "levels" => self.levels = parse_list(key, value)?,
            "training" => self.training = parse(key, value)?,
            "reaction" => self.reaction = value.parse()?,
            "zeta" => self.zeta = parse(key, value)?,
            "ratios" => self.ratios = parse_list(key, value)?,
            "products" => self.products = parse_list(key, value)?,
            "reaction_time" => self.reaction_time = parse(key, value)?,
            "slot" => self.slot = parse(key, value)?,
            "target" => self.target = parse(key, value)?,
            "frames" => self.frames = parse(key, value)?,
            "frame_slots" => self.frame_slots = parse(key, value)?,
            "frame_length" => self.frame_length = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "fdm_memory" => self.fdm_memory = parse(key, value)?,
            "fdm_dx" => self.fdm_dx = parse(key, value)?,
            "receiver_width" => self.receiver_width = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("diffusion", self.diffusion)?;
        positive("diffusion_b", self.diffusion_b)?;
        positive("distance", self.distance)?;
        positive("receiver_volume_cm3", self.receiver_volume_cm3)?;
        positive("reaction_time", self.reaction_time)?;
        positive("slot", self.slot)?;
        positive("target", self.target)?;
        positive("fdm_dx", self.fdm_dx)?;
        positive("receiver_width", self.receiver_width)?;
        if !(self.release_width.is_finite() && self.release_width >= 0.0) {
            return Err(Error::Config("release_width must be >= 0".into()));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(Error::Config("zeta must be >= 0".into()));
        }
        if self.powers.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return Err(Error::Config("powers must be > 0".into()));
        }
        if self.ratios.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
            return Err(Error::Config("ratios must be > 0".into()));
        }
        if self.products.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(Error::Config("products must be >= 0".into()));
        }
        if self.levels.contains(&0) {
            return Err(Error::Config("quantizer levels must be >= 1".into()));
        }
        if self.memory == Some(0) {
            return Err(Error::Config("memory must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config("epsilon must lie in (0, 1)".into()));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::Config(format!(
                "trials must be >= {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        if self.frame_length == 0 || self.frames == 0 || self.frame_slots == 0 {
            return Err(Error::Config("frame sizes must be >= 1".into()));
        }
        if self.fdm_memory == 0 || self.fdm_memory > 10 {
            return Err(Error::Config("fdm_memory must lie in 1..=10".into()));
        }
        if self.frame_slots > 12 {
            return Err(Error::Config("frame_slots must be <= 12".into()));
        }
        Ok(())
    }

    /// Receiver volume converted to m³.
    pub fn receiver_volume(&self) -> f64 {
        self.receiver_volume_cm3 * 1e-6
    }

    pub fn release(&self) -> ReleaseMode<f64> {
        if self.release_width > 0.0 {
            ReleaseMode::Rectangular {
                width: self.release_width,
            }
        } else {
            ReleaseMode::Impulse
        }
    }

    pub fn channel(&self) -> Result<ChannelModel<f64>> {
        ChannelModel::new(ChannelParams {
            dimension: self.dimension,
            diffusion: self.diffusion,
            receiver_distance: self.distance,
            velocity: 0.0,
            release: self.release(),
        })
    }
}
