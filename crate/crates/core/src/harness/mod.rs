//! Monte Carlo experiments and CSV output.

mod config;

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{ExperimentConfig, QuantizerRule, ReactionMode, SchemeKind, MIN_TRIALS};

use crate::channel::{
    channel_taps, channel_taps_at, memory_length, pulse_response, sampling_interval, Dimension,
    TapVector,
};
use crate::error::{Error, Result};
use crate::modulation::{normalize_power, Scheme};
use crate::precoder::{PrecoderFilter, Stability};
use crate::quantizer::{
    distortion, lloyd, uniform_quantizer, Quantizer, LLOYD_MAX_ITER, LLOYD_TOL,
};
use crate::reaction_fdm::{
    frame_response, reaction_rate, simulate, slow_reaction_ode, FdmParams, FrameGeometry, Probe,
    Release, SimulationSpec, SlowReactionState, Species, Trace,
};
use crate::receiver::{csk_threshold, map_detect_genie, observe, ts_detect, NoiseModel, Regime};
use crate::rng::{stream, SimRng};

const TAG_BER: u64 = 1;
const TAG_POWER: u64 = 2;
const TAG_TRAIN: u64 = 3;
const TAG_REACTION: u64 = 4;

/// Samples used to estimate the precoder's mean absolute output per unit amplitude.
const POWER_SAMPLES: usize = 100_000;

/// 95% normal-approximation half-width of a binomial proportion.
pub fn binomial_ci95(errors: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = errors as f64 / n as f64;
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// A CSV-serialisable result row with a fixed header.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerPoint {
    pub power: f64,
    pub ber: f64,
    pub ci95: f64,
    pub errors: u64,
    pub trials: u64,
}

impl CsvRow for BerPoint {
    const HEADER: &'static [&'static str] = &["power", "ber", "ci95", "errors", "trials"];
}

impl BerPoint {
    fn new(power: f64, errors: u64, trials: u64, symbols_per_trial: u64) -> Self {
        let n = trials * symbols_per_trial;
        Self {
            power,
            ber: errors as f64 / n as f64,
            ci95: binomial_ci95(errors, n),
            errors,
            trials,
        }
    }

    /// Counted symbols behind the estimate.
    pub fn symbols(&self) -> f64 {
        if self.ber > 0.0 {
            self.errors as f64 / self.ber
        } else {
            f64::NAN
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MismatchRow {
    pub ratio: f64,
    pub power: f64,
    pub ber: f64,
    pub ci95: f64,
    pub errors: u64,
    pub trials: u64,
}

impl CsvRow for MismatchRow {
    const HEADER: &'static [&'static str] = &["ratio", "power", "ber", "ci95", "errors", "trials"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizerRow {
    pub rule: String,
    pub levels: usize,
    pub distortion: f64,
    pub power: f64,
    pub ber: f64,
    pub ci95: f64,
    pub errors: u64,
    pub trials: u64,
    pub bound_violations: u64,
}

impl CsvRow for QuantizerRow {
    const HEADER: &'static [&'static str] = &[
        "rule",
        "levels",
        "distortion",
        "power",
        "ber",
        "ci95",
        "errors",
        "trials",
        "bound_violations",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReactionRow {
    pub product: f64,
    pub mean_limiting: f64,
    pub mean_sum: f64,
    pub mean_abs_diff: f64,
}

impl CsvRow for ReactionRow {
    const HEADER: &'static [&'static str] =
        &["product", "mean_limiting", "mean_sum", "mean_abs_diff"];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TapRow {
    pub index: usize,
    pub time: f64,
    pub tap: f64,
}

impl CsvRow for TapRow {
    const HEADER: &'static [&'static str] = &["index", "time", "tap"];
}

/// Writes the header followed by one record per row.
pub fn emit_csv<R: CsvRow, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(R::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv_file<R: CsvRow>(rows: &[R], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    emit_csv(rows, std::io::BufWriter::new(file))
}

/// Channel taps for the configured memory rule.
pub fn link_taps(cfg: &ExperimentConfig) -> Result<TapVector<f64>> {
    let model = cfg.channel()?;
    let memory = match cfg.memory {
        Some(l) => l,
        None => memory_length(&model, cfg.epsilon)?,
    };
    channel_taps(&model, memory)
}

pub fn run_taps(cfg: &ExperimentConfig) -> Result<Vec<TapRow>> {
    let taps = link_taps(cfg)?;
    Ok(taps
        .taps()
        .iter()
        .enumerate()
        .map(|(j, &tap)| TapRow {
            index: j,
            time: (j + 1) as f64 * taps.ts(),
            tap,
        })
        .collect())
}

fn certified_precoder(taps: &TapVector<f64>) -> Result<PrecoderFilter<f64>> {
    let filter = PrecoderFilter::invert_channel(taps)?;
    if let Stability::BoundOnly {
        min_ratio,
        max_ratio,
    } = filter.stability()
    {
        return Err(Error::Numerics(format!(
            "precoder stability not certified (pole bounds {min_ratio}..{max_ratio})"
        )));
    }
    Ok(filter)
}

/// Mean `|X|` of the precoder output per unit input amplitude.
fn precoder_gain(cfg: &ExperimentConfig, taps: &TapVector<f64>) -> Result<f64> {
    let mut rng = stream(cfg.seed, &[TAG_POWER]);
    let scale = normalize_power(Scheme::Ts, taps, 1.0, 1.0, POWER_SAMPLES, &mut rng)?;
    Ok(1.0 / scale)
}

/// Per-symbol amplitude that releases `power` per slot on average.
fn amplitude(cfg: &ExperimentConfig, scheme: SchemeKind, power: f64, ts_gain: f64) -> f64 {
    match (cfg.normalize_power, scheme) {
        (false, _) => power,
        (true, SchemeKind::TsPrecoder) => power / ts_gain,
        (true, _) => 2.0 * power,
    }
}

struct FrameOutcome {
    errors: u64,
    bound_violations: u64,
}

fn random_bits(rng: &mut SimRng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// One TS frame: precoder, optional quantizer, channel, counting noise, sign detector.
fn ts_frame(
    taps: &TapVector<f64>,
    beta: f64,
    noise: &NoiseModel<f64>,
    quantizer: Option<&Quantizer<f64>>,
    frame_length: usize,
    rng: &mut SimRng,
) -> Result<FrameOutcome> {
    let p = taps.taps();
    let l = taps.memory();
    let n = l + frame_length;
    let bits = random_bits(rng, n);
    let mut filter = certified_precoder(taps)?;
    let mut sent = Vec::with_capacity(n);
    let mut err = Vec::with_capacity(n);
    for &b in &bits {
        let x = filter.step(if b { beta } else { -beta });
        let q = quantizer.map_or(x, |q| q.quantize(x));
        sent.push(q);
        err.push(x - q);
    }
    let e_max = err.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let bound = p.iter().sum::<f64>() * e_max;
    let mut window = vec![0.0; l + 1];
    let mut out = FrameOutcome {
        errors: 0,
        bound_violations: 0,
    };
    for j in 0..n {
        for (k, w) in window.iter_mut().enumerate() {
            *w = if j >= k { sent[j - k] } else { 0.0 };
        }
        let mean: f64 = p.iter().zip(&window).map(|(a, b)| a * b).sum();
        if quantizer.is_some() {
            let isi_err: f64 = (0..=l.min(j)).map(|k| p[k] * err[j - k]).sum();
            if isi_err.abs() > bound * (1.0 + 1e-12) {
                out.bound_violations += 1;
            }
        }
        let g = noise.g(p, &window, j)?;
        let y = observe(mean, g, noise, rng)?;
        if j >= l && ts_detect(y) != bits[j] {
            out.errors += 1;
        }
    }
    Ok(out)
}

/// One on-off keying frame with a single species (CSK) or alternating species (MCSK).
fn onoff_frame(
    taps: &TapVector<f64>,
    scheme: SchemeKind,
    a: f64,
    volume: f64,
    frame_length: usize,
    rng: &mut SimRng,
) -> Result<FrameOutcome> {
    let p = taps.taps();
    let l = taps.memory();
    let n = l + frame_length;
    let bits = random_bits(rng, n);
    let x: Vec<f64> = bits.iter().map(|&b| if b { a } else { 0.0 }).collect();
    let alternating = matches!(scheme, SchemeKind::McskGenie | SchemeKind::McskNoMemory);
    let genie = matches!(scheme, SchemeKind::CskGenie | SchemeKind::McskGenie);
    let noise = NoiseModel::new(volume, Regime::NoReaction)?;
    let threshold = csk_threshold(p[0], a);
    let mut errors = 0;
    for j in 0..n {
        // Same-species lags only: every lag for CSK, even lags for MCSK.
        let isi: f64 = (1..=l.min(j))
            .filter(|k| !alternating || k % 2 == 0)
            .map(|k| p[k] * x[j - k])
            .sum();
        let mean = isi + p[0] * x[j];
        let y = observe(mean, mean, &noise, rng)?;
        let decided = if genie {
            map_detect_genie(y, isi, p[0], a, volume)?
        } else {
            y >= threshold
        };
        if j >= l && decided != bits[j] {
            errors += 1;
        }
    }
    Ok(FrameOutcome {
        errors,
        bound_violations: 0,
    })
}

fn sum_trials<F>(trials: usize, run: F) -> Result<(u64, u64)>
where
    F: Fn(usize) -> Result<FrameOutcome> + Sync,
{
    let outcomes: Vec<FrameOutcome> = (0..trials)
        .into_par_iter()
        .map(&run)
        .collect::<Result<_>>()?;
    Ok(outcomes
        .iter()
        .fold((0, 0), |(e, v), o| (e + o.errors, v + o.bound_violations)))
}

/// BER versus power for the configured scheme.
pub fn run_ber(cfg: &ExperimentConfig) -> Result<Vec<BerPoint>> {
    cfg.validate()?;
    if cfg.reaction == ReactionMode::Fdm {
        if cfg.scheme != SchemeKind::TsPrecoder {
            return Err(Error::Config(
                "reaction = fdm is only available for TS_precoder".into(),
            ));
        }
        let ratio = cfg.diffusion_b / cfg.diffusion;
        return FdmLink::build(cfg, ratio)?.ber(cfg);
    }
    let taps = link_taps(cfg)?;
    let volume = cfg.receiver_volume();
    let gain = if cfg.scheme == SchemeKind::TsPrecoder {
        certified_precoder(&taps)?;
        precoder_gain(cfg, &taps)?
    } else {
        1.0
    };
    let regime = match cfg.reaction {
        ReactionMode::Full => Regime::FullReaction,
        _ => Regime::NoReaction,
    };
    let noise = NoiseModel::new(volume, regime)?;
    cfg.powers
        .iter()
        .enumerate()
        .map(|(i, &power)| {
            let amp = amplitude(cfg, cfg.scheme, power, gain);
            let (errors, _) = sum_trials(cfg.trials, |t| {
                let mut rng = stream(cfg.seed, &[TAG_BER, i as u64, t as u64]);
                match cfg.scheme {
                    SchemeKind::TsPrecoder => {
                        ts_frame(&taps, amp, &noise, None, cfg.frame_length, &mut rng)
                    }
                    s => onoff_frame(&taps, s, amp, volume, cfg.frame_length, &mut rng),
                }
            })?;
            Ok(BerPoint::new(
                power,
                errors,
                cfg.trials as u64,
                cfg.frame_length as u64,
            ))
        })
        .collect()
}

/// Quantized TS precoding: distortion and BER per rule and level count, preceded by the
/// unquantized reference (`rule = none`) at each power.
pub fn run_quantizer(cfg: &ExperimentConfig) -> Result<Vec<QuantizerRow>> {
    cfg.validate()?;
    let taps = link_taps(cfg)?;
    certified_precoder(&taps)?;
    let gain = precoder_gain(cfg, &taps)?;
    let noise = NoiseModel::new(
        cfg.receiver_volume(),
        match cfg.reaction {
            ReactionMode::None => Regime::NoReaction,
            _ => Regime::FullReaction,
        },
    )?;
    let mut rows = Vec::new();
    for (i, &power) in cfg.powers.iter().enumerate() {
        let beta = amplitude(cfg, SchemeKind::TsPrecoder, power, gain);
        let training = training_samples(cfg, &taps, beta, i)?;
        let mut candidates: Vec<(QuantizerRule, usize, Option<Quantizer<f64>>)> =
            vec![(QuantizerRule::None, 0, None)];
        let rules: Vec<QuantizerRule> = match cfg.quantizer {
            QuantizerRule::None => vec![QuantizerRule::Lloyd, QuantizerRule::Uniform],
            r => vec![r],
        };
        for rule in rules {
            for &m in &cfg.levels {
                candidates.push((rule, m, Some(train_quantizer(rule, &training, m)?)));
            }
        }
        for (rule, m, q) in candidates {
            let d = match &q {
                Some(q) => distortion(q, &training)?,
                None => 0.0,
            };
            let (errors, violations) = sum_trials(cfg.trials, |t| {
                let mut rng = stream(cfg.seed, &[TAG_BER, i as u64, t as u64]);
                ts_frame(&taps, beta, &noise, q.as_ref(), cfg.frame_length, &mut rng)
            })?;
            let point = BerPoint::new(power, errors, cfg.trials as u64, cfg.frame_length as u64);
            rows.push(QuantizerRow {
                rule: rule.to_string(),
                levels: m,
                distortion: d,
                power,
                ber: point.ber,
                ci95: point.ci95,
                errors,
                trials: point.trials,
                bound_violations: violations,
            });
        }
    }
    Ok(rows)
}

/// Precoder outputs after a transient of `8 (L + 1)` symbols.
fn training_samples(
    cfg: &ExperimentConfig,
    taps: &TapVector<f64>,
    beta: f64,
    point: usize,
) -> Result<Vec<f64>> {
    let mut rng = stream(cfg.seed, &[TAG_TRAIN, point as u64]);
    let mut filter = certified_precoder(taps)?;
    let warm = 8 * (taps.memory() + 1);
    let mut out = Vec::with_capacity(cfg.training);
    for k in 0..warm + cfg.training {
        let x = filter.step(if rng.random::<bool>() { beta } else { -beta });
        if k >= warm {
            out.push(x);
        }
    }
    Ok(out)
}

fn train_quantizer(rule: QuantizerRule, samples: &[f64], m: usize) -> Result<Quantizer<f64>> {
    match rule {
        QuantizerRule::Lloyd => lloyd(samples, m, LLOYD_TOL, LLOYD_MAX_ITER),
        QuantizerRule::Uniform | QuantizerRule::None => {
            let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            uniform_quantizer(lo, hi, m)
        }
    }
}

/// Precoded levels of one pattern and the probe `(rho_A, rho_B)` at each slot end.
type SolvedPattern = (Vec<f64>, Vec<(f64, f64)>);

/// Received probe concentrations for every bit pattern of a short precoded frame, computed
/// by the reaction-diffusion solver at unit amplitude.
///
/// With the medium reaction rate expressed relative to the received level, the fields
/// scale linearly with the amplitude, so one solve per pattern serves every power.
pub struct FdmLink {
    slots: usize,
    /// Mean `|X|` per unit amplitude over all patterns and slots.
    gain: f64,
    diff: Vec<Vec<f64>>,
    sum: Vec<Vec<f64>>,
}

impl FdmLink {
    pub fn build(cfg: &ExperimentConfig, ratio: f64) -> Result<Self> {
        if cfg.dimension != Dimension::One {
            return Err(Error::Config(
                "the FDM solver is one-dimensional; set dimension = 1".into(),
            ));
        }
        let l = cfg.fdm_memory;
        let slots = l + 1;
        let model = cfg.channel()?;
        let ts = sampling_interval(&model)?;
        let calibration = FdmParams::new(cfg.diffusion, cfg.diffusion, 0.0, cfg.fdm_dx)?;
        let unit = frame_geometry(cfg, calibration, ts);
        let mut impulse = vec![0.0; slots];
        impulse[0] = 1.0;
        let response = frame_response(&impulse, &unit)?;
        let taps = TapVector::new(response.iter().map(|&(a, _)| a).collect(), ts)?;
        let zeta = reaction_rate(cfg.zeta, 1.0, ts)?;
        let params = FdmParams::new(cfg.diffusion, cfg.diffusion * ratio, zeta, cfg.fdm_dx)?;
        let geometry = frame_geometry(cfg, params, ts);

        let patterns = 1usize << slots;
        let frames: Vec<SolvedPattern> = (0..patterns)
            .into_par_iter()
            .map(|code| {
                let mut filter = certified_precoder(&taps)?;
                let x: Vec<f64> = (0..slots)
                    .map(|k| filter.step(if code >> k & 1 == 1 { 1.0 } else { -1.0 }))
                    .collect();
                let r = frame_response(&x, &geometry)?;
                Ok((x, r))
            })
            .collect::<Result<_>>()?;
        let gain = frames
            .iter()
            .flat_map(|(x, _)| x.iter().map(|v| v.abs()))
            .sum::<f64>()
            / (patterns * slots) as f64;
        Ok(Self {
            slots,
            gain,
            diff: frames
                .iter()
                .map(|(_, r)| r.iter().map(|&(a, b)| a - b).collect())
                .collect(),
            sum: frames
                .iter()
                .map(|(_, r)| r.iter().map(|&(a, b)| a + b).collect())
                .collect(),
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Received `(rho_A - rho_B, rho_A + rho_B)` per slot for the pattern `code`.
    pub fn pattern(&self, code: usize) -> (&[f64], &[f64]) {
        (&self.diff[code], &self.sum[code])
    }

    pub fn ber(&self, cfg: &ExperimentConfig) -> Result<Vec<BerPoint>> {
        let volume = cfg.receiver_volume();
        let noise = NoiseModel::new(volume, Regime::NoReaction)?;
        cfg.powers
            .iter()
            .enumerate()
            .map(|(i, &power)| {
                let beta = amplitude(cfg, SchemeKind::TsPrecoder, power, self.gain);
                let (errors, _) = sum_trials(cfg.trials, |t| {
                    let mut rng = stream(cfg.seed, &[TAG_BER, i as u64, t as u64]);
                    let mut errors = 0;
                    let mut counted = 0;
                    while counted < cfg.frame_length {
                        let code = rng.random_range(0..1usize << self.slots);
                        let (diff, sum) = self.pattern(code);
                        for k in 0..self.slots {
                            let y = observe(beta * diff[k], beta * sum[k], &noise, &mut rng)?;
                            if counted < cfg.frame_length && ts_detect(y) != (code >> k & 1 == 1) {
                                errors += 1;
                            }
                            counted += 1;
                        }
                    }
                    Ok(FrameOutcome {
                        errors,
                        bound_violations: 0,
                    })
                })?;
                Ok(BerPoint::new(
                    power,
                    errors,
                    cfg.trials as u64,
                    cfg.frame_length as u64,
                ))
            })
            .collect()
    }
}

fn frame_geometry(cfg: &ExperimentConfig, params: FdmParams<f64>, ts: f64) -> FrameGeometry<f64> {
    FrameGeometry {
        params,
        receiver_distance: cfg.distance,
        probe_width: cfg.receiver_width,
        ts,
    }
}

/// BER per diffusion ratio `D_B / D_A` with the reaction-diffusion solver in the loop.
pub fn run_mismatch(cfg: &ExperimentConfig) -> Result<Vec<MismatchRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &ratio in &cfg.ratios {
        let link = FdmLink::build(cfg, ratio)?;
        for p in link.ber(cfg)? {
            rows.push(MismatchRow {
                ratio,
                power: p.power,
                ber: p.ber,
                ci95: p.ci95,
                errors: p.errors,
                trials: p.trials,
            });
        }
    }
    Ok(rows)
}

/// Limiting-reactant level after the local receiver reaction, averaged over random
/// precoded frames, for each reaction strength.
pub fn run_reaction(cfg: &ExperimentConfig) -> Result<Vec<ReactionRow>> {
    cfg.validate()?;
    if cfg.dimension != Dimension::One {
        return Err(Error::Config(
            "the FDM solver is one-dimensional; set dimension = 1".into(),
        ));
    }
    let slots = cfg.frame_slots;
    let model = cfg.channel()?;
    let taps = channel_taps_at(&model, cfg.slot, slots.max(2) - 1)?;
    let zeta = reaction_rate(cfg.zeta, cfg.target, cfg.slot)?;
    let params = FdmParams::new(cfg.diffusion, cfg.diffusion_b, zeta, cfg.fdm_dx)?;
    let geometry = frame_geometry(cfg, params, cfg.slot);

    let mut rng = stream(cfg.seed, &[TAG_REACTION]);
    let codes: Vec<usize> = (0..cfg.frames)
        .map(|_| rng.random_range(0..1usize << slots))
        .collect();
    let mut distinct: Vec<usize> = codes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let solved: HashMap<usize, Vec<(f64, f64)>> = distinct
        .par_iter()
        .map(|&code| {
            let mut filter = certified_precoder(&taps)?;
            let x: Vec<f64> = (0..slots)
                .map(|k| {
                    let b = if code >> k & 1 == 1 {
                        cfg.target
                    } else {
                        -cfg.target
                    };
                    filter.step(b)
                })
                .collect();
            Ok((code, frame_response(&x, &geometry)?))
        })
        .collect::<Result<_>>()?;

    let samples: Vec<(f64, f64)> = codes
        .iter()
        .flat_map(|c| solved[c].iter().copied())
        .collect();
    let n = samples.len() as f64;
    cfg.products
        .iter()
        .map(|&product| {
            let zeta_lambda = product / (cfg.target * cfg.reaction_time);
            let (mut limiting, mut total, mut diff) = (0.0, 0.0, 0.0);
            for &(a, b) in &samples {
                let state = SlowReactionState::new(a, b, zeta_lambda)?;
                let (a, b) = slow_reaction_ode(&state, cfg.reaction_time)?;
                limiting += a.min(b);
                total += a + b;
                diff += (a - b).abs();
            }
            Ok(ReactionRow {
                product,
                mean_limiting: limiting / n,
                mean_sum: total / n,
                mean_abs_diff: diff / n,
            })
        })
        .collect()
}

/// Probe trace for one type-A release at `t = 0` followed by one type-B release one slot
/// later, each of `amount` molecules, over three slots.
pub fn reaction_trace(cfg: &ExperimentConfig, amount: f64) -> Result<Trace<f64>> {
    cfg.validate()?;
    if cfg.dimension != Dimension::One {
        return Err(Error::Config(
            "the FDM solver is one-dimensional; set dimension = 1".into(),
        ));
    }
    let model = cfg.channel()?;
    let peak = pulse_response(&model, sampling_interval(&model)?)?;
    let zeta = reaction_rate(cfg.zeta, amount * peak, cfg.slot)?;
    let params = FdmParams::new(cfg.diffusion, cfg.diffusion_b, zeta, cfg.fdm_dx)?;
    let schedule = [
        Release::impulse(0.0, Species::A, 0.0, amount),
        Release::impulse(cfg.slot, Species::B, 0.0, amount),
    ];
    let spec = SimulationSpec {
        t_end: 3.0 * cfg.slot,
        sample_interval: cfg.slot / 60.0,
        probe: Probe {
            center: cfg.distance,
            width: cfg.receiver_width,
        },
        x_max: None,
    };
    simulate(&schedule, &params, &spec)
}
