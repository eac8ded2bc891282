//! Bit-to-symbol encoders and the signed-to-nonnegative release split.

use rand::Rng;

use crate::channel::TapVector;
use crate::error::{invalid, Error, Result};
use crate::precoder::PrecoderFilter;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Signed differential concentration (two species, one per sign).
    Ts,
    /// On-off keying with a single species.
    Csk,
    /// On-off keying alternating two species across slots.
    Mcsk,
}

/// Transmission levels `X_k` for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame<T> {
    pub symbols: Vec<T>,
    pub scheme: Scheme,
    pub beta: T,
}

/// Nonnegative release levels of species A and B.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRelease<T> {
    pub s_a: Vec<T>,
    pub s_b: Vec<T>,
}

impl<T: Real> DualRelease<T> {
    /// `s_A[k] - s_B[k]`.
    pub fn difference(&self) -> Vec<T> {
        self.s_a
            .iter()
            .zip(&self.s_b)
            .map(|(&a, &b)| a - b)
            .collect()
    }
}

/// Bit 1 maps to `+beta`, bit 0 to `-beta`.
pub fn ts_encode<T: Real>(bits: &[bool], beta: T) -> Result<SymbolFrame<T>> {
    if !(beta > T::zero()) {
        return Err(invalid(format!("beta must be > 0, got {beta}")));
    }
    Ok(SymbolFrame {
        symbols: bits.iter().map(|&b| if b { beta } else { -beta }).collect(),
        scheme: Scheme::Ts,
        beta,
    })
}

/// `s_A = max(X, 0)`, `s_B = max(-X, 0)`.
pub fn split_signed<T: Real>(symbols: &[T]) -> Result<DualRelease<T>> {
    if let Some(x) = symbols.iter().find(|x| !x.is_finite()) {
        return Err(invalid(format!("non-finite transmission level {x}")));
    }
    Ok(DualRelease {
        s_a: symbols.iter().map(|&x| x.max(T::zero())).collect(),
        s_b: symbols.iter().map(|&x| (-x).max(T::zero())).collect(),
    })
}

fn on_off<T: Real>(bits: &[bool], amplitude: T) -> Vec<T> {
    bits.iter()
        .map(|&b| if b { amplitude } else { T::zero() })
        .collect()
}

pub fn csk_encode<T: Real>(bits: &[bool], amplitude: T) -> SymbolFrame<T> {
    SymbolFrame {
        symbols: on_off(bits, amplitude),
        scheme: Scheme::Csk,
        beta: amplitude,
    }
}

/// Even slots use species A, odd slots species B. Returns `(A frame, B frame)`.
pub fn mcsk_encode<T: Real>(bits: &[bool], amplitude: T) -> (SymbolFrame<T>, SymbolFrame<T>) {
    let levels = on_off(bits, amplitude);
    let pick = |parity: usize| SymbolFrame {
        symbols: levels
            .iter()
            .enumerate()
            .map(|(k, &x)| if k % 2 == parity { x } else { T::zero() })
            .collect(),
        scheme: Scheme::Mcsk,
        beta: amplitude,
    };
    (pick(0), pick(1))
}

/// Taps seen by one MCSK species: every other tap of the full channel, spacing `2 Ts`.
pub fn mcsk_taps<T: Real>(taps: &TapVector<T>) -> Result<TapVector<T>> {
    taps.subsample(2)
}

/// Minimum Monte Carlo sample count accepted by [`normalize_power`].
pub const MIN_POWER_TRIALS: usize = 10_000;
const MAX_POWER_TRIALS: usize = 10_000_000;
const TARGET_REL_SE: f64 = 2.5e-3;

/// Scale `s` such that the mean absolute released level per slot of the scheme driven at
/// `amplitude`, multiplied by `s`, equals `beta_target`.
///
/// On-off schemes have the closed form `2 beta_target / amplitude`. For TS the mean of
/// `|X_k|` after the precoder is estimated by Monte Carlo, doubling the sample count from
/// `trials` until the relative standard error drops below 0.25%.
pub fn normalize_power<T: Real, R: Rng + ?Sized>(
    scheme: Scheme,
    taps: &TapVector<T>,
    amplitude: T,
    beta_target: T,
    trials: usize,
    rng: &mut R,
) -> Result<T> {
    if !(amplitude > T::zero() && beta_target > T::zero()) {
        return Err(invalid("amplitude and beta_target must be > 0"));
    }
    if trials < MIN_POWER_TRIALS {
        return Err(invalid(format!(
            "normalize_power needs at least {MIN_POWER_TRIALS} trials, got {trials}"
        )));
    }
    match scheme {
        Scheme::Csk | Scheme::Mcsk => Ok(T::lit(2.0) * beta_target / amplitude),
        Scheme::Ts => {
            let mean = mean_abs_precoded(taps, amplitude.to_f64_lossy(), trials, rng)?;
            Ok(beta_target / T::lit(mean))
        }
    }
}

fn mean_abs_precoded<T: Real, R: Rng + ?Sized>(
    taps: &TapVector<T>,
    beta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let f64_taps: Vec<f64> = taps.taps().iter().map(|p| p.to_f64_lossy()).collect();
    let tv = TapVector::new(f64_taps, taps.ts().to_f64_lossy())?;
    let mut filter = PrecoderFilter::invert_channel(&tv)?;
    for _ in 0..8 * (tv.memory() + 1) {
        filter.step(if rng.random::<bool>() { beta } else { -beta });
    }
    let (mut n, mut sum, mut sum_sq) = (0usize, 0.0f64, 0.0f64);
    let mut target = trials;
    loop {
        while n < target {
            let x = filter
                .step(if rng.random::<bool>() { beta } else { -beta })
                .abs();
            sum += x;
            sum_sq += x * x;
            n += 1;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        // Samples are serially correlated through the filter; the i.i.d. standard
        // error is inflated by the filter's memory as a conservative margin.
        let se = (var * (tv.memory() + 1) as f64 / n as f64).sqrt();
        if se <= TARGET_REL_SE * mean {
            return Ok(mean);
        }
        if target >= MAX_POWER_TRIALS {
            return Err(Error::Estimation(format!(
                "mean |X| relative standard error {:.3e} after {n} samples",
                se / mean
            )));
        }
        target = (target * 2).min(MAX_POWER_TRIALS);
    }
}
