//! Counting-noise observation model and bit detectors.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// How the variance of the counting noise depends on the recent transmissions.
#[derive(Debug, Clone, PartialEq)]
pub enum Regime<T> {
    /// Species annihilate instantly: `g = |sum p_k x_{j-k}|`.
    FullReaction,
    /// Species do not interact: `g = sum p_k |x_{j-k}|`.
    NoReaction,
    /// Externally supplied `g` values, e.g. from the reaction-diffusion solver.
    Empirical(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel<T> {
    volume: T,
    regime: Regime<T>,
}

impl<T: Real> NoiseModel<T> {
    /// `volume` is the receiver volume `V_R` in m³.
    pub fn new(volume: T, regime: Regime<T>) -> Result<Self> {
        if !(volume.is_finite() && volume > T::zero()) {
            return Err(invalid(format!(
                "receiver volume must be > 0, got {volume}"
            )));
        }
        Ok(Self { volume, regime })
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn regime(&self) -> &Regime<T> {
        &self.regime
    }

    /// `g` for slot `slot` given the window `[x_j, x_{j-1}, ..., x_{j-L}]`.
    pub fn g(&self, taps: &[T], window: &[T], slot: usize) -> Result<T> {
        match &self.regime {
            Regime::FullReaction => g_full_reaction(taps, window),
            Regime::NoReaction => g_no_reaction(taps, window),
            Regime::Empirical(table) => table
                .get(slot)
                .copied()
                .ok_or_else(|| invalid(format!("empirical g table has no entry for slot {slot}"))),
        }
    }
}

fn check_window<T>(taps: &[T], window: &[T]) -> Result<()> {
    if taps.len() != window.len() {
        return Err(invalid(format!(
            "window length {} does not match {} taps",
            window.len(),
            taps.len()
        )));
    }
    Ok(())
}

/// `|sum_k p_k x_{j-k}|` with `window[k] = x_{j-k}`.
pub fn g_full_reaction<T: Real>(taps: &[T], window: &[T]) -> Result<T> {
    check_window(taps, window)?;
    Ok(taps
        .iter()
        .zip(window)
        .map(|(&p, &x)| p * x)
        .sum::<T>()
        .abs())
}

/// `sum_k p_k |x_{j-k}|` with `window[k] = x_{j-k}`.
pub fn g_no_reaction<T: Real>(taps: &[T], window: &[T]) -> Result<T> {
    check_window(taps, window)?;
    Ok(taps.iter().zip(window).map(|(&p, &x)| p * x.abs()).sum())
}

/// `Y = mean + sqrt(g / V_R) z` with `z` standard normal.
pub fn observe<T: Real, R: Rng + ?Sized>(
    mean: T,
    g: T,
    noise: &NoiseModel<T>,
    rng: &mut R,
) -> Result<T> {
    if !(g >= T::zero()) {
        return Err(Error::Contract(format!(
            "noise variance factor g = {g} is negative"
        )));
    }
    let z: f64 = StandardNormal.sample(rng);
    if g == T::zero() {
        return Ok(mean);
    }
    Ok(mean + (g / noise.volume).sqrt() * T::lit(z))
}

/// Sign detector: `Y >= 0` decides bit 1.
pub fn ts_detect<T: Real>(y: T) -> bool {
    y >= T::zero()
}

/// Equal-prior MAP decision between `N(I, I/V_R)` (bit 0) and
/// `N(I + p0 a, (I + p0 a)/V_R)` (bit 1) with the ISI mean `I` known.
pub fn map_detect_genie<T: Real>(y: T, isi: T, p0: T, amplitude: T, volume: T) -> Result<bool> {
    if !(isi >= T::zero()) {
        return Err(Error::Contract(format!("ISI mean {isi} must be >= 0")));
    }
    if !(p0 > T::zero() && amplitude > T::zero() && volume > T::zero()) {
        return Err(Error::Contract("p0, amplitude and V_R must be > 0".into()));
    }
    let s = p0 * amplitude;
    let m1 = isi + s;
    if isi == T::zero() {
        // Bit 0 is a point mass at zero.
        return Ok(y >= T::lit(1e-12) * s);
    }
    // Compare log N(y; m, m/V) = -(V/2)(y - m)^2/m - ln(m)/2 for both hypotheses.
    let half = T::lit(0.5);
    let ll = |m: T| -half * volume * (y - m) * (y - m) / m - half * m.ln();
    Ok(ll(m1) >= ll(isi))
}

/// Decision threshold of the zero-ISI MAP rule for on-off keying with unknown memory.
pub fn csk_threshold<T: Real>(p0: T, amplitude: T) -> T {
    T::lit(1e-12) * p0 * amplitude
}
