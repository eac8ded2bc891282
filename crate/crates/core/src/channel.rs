//! Deterministic macroscopic diffusion channel in an unbounded, drift-free medium.
//!
//! The receiver sees the transmitted waveform convolved with the diffusion Green's
//! function. Symbols are released at the start of each slot of length `Ts`, where `Ts`
//! is the peak time of the pulse response, and tap `j` is the response `(j + 1) * Ts`
//! after release. With that indexing the taps of every accepted model are positive and
//! strictly decreasing.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Spatial dimension of the medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    One,
    Three,
}

impl Dimension {
    pub fn n(self) -> u32 {
        match self {
            Dimension::One => 1,
            Dimension::Three => 3,
        }
    }
}

/// Shape of the per-symbol release waveform `w(t)`, normalised to unit released amount.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReleaseMode<T> {
    Impulse,
    /// Constant release rate over `width` seconds.
    Rectangular {
        width: T,
    },
}

/// Unvalidated channel parameters, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    pub dimension: Dimension,
    /// Diffusion coefficient in m²/s.
    pub diffusion: T,
    /// Transmitter-receiver distance in m.
    pub receiver_distance: T,
    /// Medium drift in m/s. Only zero is supported.
    pub velocity: T,
    pub release: ReleaseMode<T>,
}

/// Validated diffusion channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel<T> {
    dimension: Dimension,
    diffusion: T,
    receiver_distance: T,
    release: ReleaseMode<T>,
}

impl<T: Real> ChannelModel<T> {
    pub fn new(params: ChannelParams<T>) -> Result<Self> {
        let ChannelParams {
            dimension,
            diffusion,
            receiver_distance,
            velocity,
            release,
        } = params;
        if !(diffusion.is_finite() && diffusion > T::zero()) {
            return Err(invalid(format!(
                "diffusion coefficient must be > 0, got {diffusion}"
            )));
        }
        if !(receiver_distance.is_finite() && receiver_distance > T::zero()) {
            return Err(invalid(format!(
                "receiver distance must be > 0, got {receiver_distance}"
            )));
        }
        if velocity != T::zero() {
            return Err(invalid(format!(
                "drift velocity {velocity} is not supported; use 0"
            )));
        }
        if let ReleaseMode::Rectangular { width } = release {
            if !(width.is_finite() && width > T::zero()) {
                return Err(invalid(format!(
                    "rectangular release width must be > 0, got {width}"
                )));
            }
        }
        Ok(Self {
            dimension,
            diffusion,
            receiver_distance,
            release,
        })
    }

    /// Impulse-release model with zero drift.
    pub fn impulse(dimension: Dimension, diffusion: T, receiver_distance: T) -> Result<Self> {
        Self::new(ChannelParams {
            dimension,
            diffusion,
            receiver_distance,
            velocity: T::zero(),
            release: ReleaseMode::Impulse,
        })
    }

    pub fn with_release(self, release: ReleaseMode<T>) -> Result<Self> {
        Self::new(ChannelParams {
            dimension: self.dimension,
            diffusion: self.diffusion,
            receiver_distance: self.receiver_distance,
            velocity: T::zero(),
            release,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn diffusion(&self) -> T {
        self.diffusion
    }

    pub fn receiver_distance(&self) -> T {
        self.receiver_distance
    }

    pub fn release(&self) -> ReleaseMode<T> {
        self.release
    }

    /// Analytic peak time of the impulse response, `r² / (2 n D)`.
    pub fn impulse_peak_time(&self) -> T {
        let r = self.receiver_distance;
        r * r / (T::lit(2.0 * self.dimension.n() as f64) * self.diffusion)
    }
}

/// Ordered channel taps `p_0 > p_1 > ... > p_L > 0` with their sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TapVector<T> {
    taps: Vec<T>,
    ts: T,
}

impl<T: Real> TapVector<T> {
    /// Validates positivity and strict decrease of `taps`.
    pub fn new(taps: Vec<T>, ts: T) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Tap("tap vector must contain at least p_0".into()));
        }
        if !(ts.is_finite() && ts > T::zero()) {
            return Err(invalid(format!("sampling interval must be > 0, got {ts}")));
        }
        for (j, &p) in taps.iter().enumerate() {
            if !(p.is_finite() && p > T::zero()) {
                return Err(Error::Tap(format!("tap p_{j} = {p} is not positive")));
            }
        }
        if let Some(j) = taps.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::Tap(format!(
                "taps not strictly decreasing at j = {}: p_{} = {} <= p_{} = {}",
                j + 1,
                j,
                taps[j],
                j + 1,
                taps[j + 1]
            )));
        }
        Ok(Self { taps, ts })
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    pub fn ts(&self) -> T {
        self.ts
    }

    /// Channel memory `L`; the vector holds `L + 1` taps.
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn p0(&self) -> T {
        self.taps[0]
    }

    pub fn sum(&self) -> T {
        self.taps.iter().copied().sum()
    }

    /// Taps `p_0, p_stride, p_2*stride, ...` within the memory, sampled at `stride * Ts`.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(invalid("stride must be >= 1"));
        }
        let taps = self.taps.iter().step_by(stride).copied().collect();
        Self::new(taps, self.ts * T::from_usize_lossy(stride))
    }

    /// Causal convolution `y_j = sum_k p_k x_{j-k}` with zero initial state.
    pub fn convolve(&self, x: &[T]) -> Vec<T> {
        (0..x.len())
            .map(|j| {
                self.taps
                    .iter()
                    .take(j + 1)
                    .enumerate()
                    .map(|(k, &p)| p * x[j - k])
                    .sum()
            })
            .collect()
    }
}

/// Unbounded-medium Green's function `1[t>0] (4 pi D t)^(-n/2) exp(-r² / (4 D t))`.
pub fn green_function<T: Real>(model: &ChannelModel<T>, t: T, r: T) -> Result<T> {
    if !t.is_finite() || !r.is_finite() {
        return Err(invalid(format!(
            "green_function needs finite t and r, got t={t}, r={r}"
        )));
    }
    Ok(green_unchecked(model.dimension, model.diffusion, t, r))
}

pub(crate) fn green_unchecked<T: Real>(dimension: Dimension, d: T, t: T, r: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    let four_dt = T::lit(4.0) * d * t;
    let norm = match dimension {
        Dimension::One => (T::PI() * four_dt).sqrt().recip(),
        Dimension::Three => (T::PI() * four_dt).powf(T::lit(-1.5)),
    };
    norm * (-(r * r) / four_dt).exp()
}

/// Pulse response `p(t)` at the receiver for a unit release starting at `t = 0`.
pub fn pulse_response<T: Real>(model: &ChannelModel<T>, t: T) -> Result<T> {
    if !t.is_finite() {
        return Err(invalid(format!("pulse_response needs finite t, got {t}")));
    }
    Ok(pulse_unchecked(model, t))
}

fn pulse_unchecked<T: Real>(model: &ChannelModel<T>, t: T) -> T {
    let (dim, d, r) = (model.dimension, model.diffusion, model.receiver_distance);
    match model.release {
        ReleaseMode::Impulse => green_unchecked(dim, d, t, r),
        ReleaseMode::Rectangular { width } => {
            if t <= T::zero() {
                return T::zero();
            }
            let lo = (t - width).max(T::zero());
            integrate(|u| green_unchecked(dim, d, u, r), lo, t) / width
        }
    }
}

/// Noiseless receiver trace for a set of `(release_time, amount)` pairs.
pub fn superpose<T: Real>(model: &ChannelModel<T>, releases: &[(T, T)], t: T) -> Result<T> {
    releases
        .iter()
        .map(|&(t0, amount)| pulse_response(model, t - t0).map(|p| amount * p))
        .sum()
}

/// Composite adaptive Simpson quadrature with an absolute tolerance taken relative to a
/// coarse estimate of the whole integral.
fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> T {
    if b <= a {
        return T::zero();
    }
    const PANELS: usize = 16;
    let h = (b - a) / T::from_usize_lossy(PANELS);
    let half = T::lit(0.5);
    let six = T::lit(6.0);
    let panels: Vec<[T; 6]> = (0..PANELS)
        .map(|i| {
            let x0 = a + h * T::from_usize_lossy(i);
            let x1 = x0 + h;
            let (f0, f1) = (f(x0), f(x1));
            let fm = f((x0 + x1) * half);
            let whole = (x1 - x0) / six * (f0 + T::lit(4.0) * fm + f1);
            [x0, x1, f0, fm, f1, whole]
        })
        .collect();
    let coarse: T = panels.iter().map(|p| p[5].abs()).sum();
    if coarse == T::zero() {
        return T::zero();
    }
    let tol = T::epsilon().sqrt() * T::lit(1e-3) * coarse / T::from_usize_lossy(PANELS);
    panels
        .into_iter()
        .map(|[x0, x1, f0, fm, f1, whole]| simpson_step(&f, x0, x1, f0, fm, f1, whole, tol, 24))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let half = T::lit(0.5);
    let six = T::lit(6.0);
    let m = (a + b) * half;
    let (lm, rm) = ((a + m) * half, (m + b) * half);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / six * (fa + T::lit(4.0) * flm + fm);
    let right = (b - m) / six * (fm + T::lit(4.0) * frm + fb);
    let delta = left + right - whole;
    let roundoff = T::lit(64.0) * T::epsilon() * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol || delta.abs() <= roundoff {
        return left + right + delta / T::lit(15.0);
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol * half, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol * half, depth - 1)
}

const SCAN_POINTS: usize = 10_000;

/// Sampling interval `Ts = argmax_t p(t)`.
///
/// A log-spaced scan over `[t0 / 100, 100 t0]` (with `t0` the analytic impulse peak
/// shifted by half the release width) checks unimodality and brackets the peak, which
/// golden-section search then refines.
pub fn sampling_interval<T: Real>(model: &ChannelModel<T>) -> Result<T> {
    let mut t0 = model.impulse_peak_time();
    if let ReleaseMode::Rectangular { width } = model.release {
        t0 = t0 + width * T::lit(0.5);
    }
    let (lo, hi) = (t0.to_f64_lossy() / 100.0, t0.to_f64_lossy() * 100.0);
    let ratio = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let grid: Vec<T> = (0..SCAN_POINTS)
        .map(|i| T::lit(lo * (ratio * i as f64).exp()))
        .collect();
    let values: Vec<T> = grid.iter().map(|&t| pulse_unchecked(model, t)).collect();

    let (imax, &pmax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::Model("empty scan".into()))?;
    if !(pmax > T::zero()) {
        return Err(Error::Model(
            "pulse response vanishes on the scan grid".into(),
        ));
    }
    if imax == 0 || imax == SCAN_POINTS - 1 {
        return Err(Error::Model(
            "pulse response peak lies outside the scan window".into(),
        ));
    }

    // Count rising-to-falling transitions, ignoring steps below the noise floor.
    let floor = pmax * T::lit(1e-9);
    let mut peaks = 0usize;
    let mut rising = false;
    for w in values.windows(2) {
        let step = w[1] - w[0];
        if step > floor {
            rising = true;
        } else if step < -floor {
            if rising {
                peaks += 1;
            }
            rising = false;
        }
    }
    if peaks != 1 {
        return Err(Error::Model(format!(
            "pulse response is not unimodal ({peaks} local maxima on the scan grid)"
        )));
    }

    Ok(golden_max(
        |t| pulse_unchecked(model, t),
        grid[imax - 1],
        grid[imax + 1],
    ))
}

fn golden_max<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T) -> T {
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let tol = T::epsilon().sqrt() * T::lit(0.1);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= tol * (a + b).abs() {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    (a + b) * T::lit(0.5)
}

/// Taps `p_j = p((j + 1) Ts)` for `j = 0..=L` with `Ts` from [`sampling_interval`].
pub fn channel_taps<T: Real>(model: &ChannelModel<T>, memory: usize) -> Result<TapVector<T>> {
    let ts = sampling_interval(model)?;
    channel_taps_at(model, ts, memory)
}

/// Taps for an explicitly chosen slot length `ts`.
pub fn channel_taps_at<T: Real>(
    model: &ChannelModel<T>,
    ts: T,
    memory: usize,
) -> Result<TapVector<T>> {
    if memory < 1 {
        return Err(invalid("channel memory L must be >= 1"));
    }
    if !(ts.is_finite() && ts > T::zero()) {
        return Err(invalid(format!("sampling interval must be > 0, got {ts}")));
    }
    let taps = (0..=memory)
        .map(|j| pulse_unchecked(model, ts * T::from_usize_lossy(j + 1)))
        .collect();
    TapVector::new(taps, ts)
}

/// Hard cap on the channel memory search.
pub const MAX_MEMORY: usize = 10_000;

/// Smallest `L` with `p((L + 1) Ts) / p_0 < epsilon`.
pub fn memory_length<T: Real>(model: &ChannelModel<T>, epsilon: T) -> Result<usize> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let ts = sampling_interval(model)?;
    let p0 = pulse_unchecked(model, ts);
    (1..=MAX_MEMORY)
        .find(|&l| pulse_unchecked(model, ts * T::from_usize_lossy(l + 1)) / p0 < epsilon)
        .ok_or_else(|| {
            Error::Divergence(format!(
                "relative tail stays above {epsilon} up to L = {MAX_MEMORY}"
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: f64 = 2.2e-9;
    const R: f64 = 2.15e-7;

    fn model(dim: Dimension) -> ChannelModel<f64> {
        ChannelModel::impulse(dim, D, R).unwrap()
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(ChannelModel::impulse(Dimension::One, 0.0, R).is_err());
        assert!(ChannelModel::impulse(Dimension::One, D, -1.0).is_err());
        let drift = ChannelParams {
            dimension: Dimension::Three,
            diffusion: D,
            receiver_distance: R,
            velocity: 1e-6,
            release: ReleaseMode::Impulse,
        };
        assert!(matches!(
            ChannelModel::new(drift),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn green_is_causal_and_checks_arguments() {
        let m = model(Dimension::Three);
        assert_eq!(green_function(&m, -1.0, R).unwrap(), 0.0);
        assert_eq!(green_function(&m, 0.0, 0.0).unwrap(), 0.0);
        assert!(green_function(&m, f64::NAN, R).is_err());
        assert!(green_function(&m, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn green_at_origin_is_normalisation() {
        let m = model(Dimension::Three);
        let t = 3e-6;
        let expected = (4.0 * std::f64::consts::PI * D * t).powf(-1.5);
        let got = green_function(&m, t, 0.0).unwrap();
        assert!((got - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn green_three_dim_peak_matches_dense_scan() {
        let m = model(Dimension::Three);
        let analytic = R * R / (6.0 * D);
        // Brute-force argmax over a fine linear grid around the region of interest.
        let n = 200_000;
        let (lo, hi) = (0.2 * analytic, 5.0 * analytic);
        let step = (hi - lo) / n as f64;
        let best = (0..=n)
            .map(|i| lo + step * i as f64)
            .max_by(|a, b| {
                let fa = green_function(&m, *a, R).unwrap();
                let fb = green_function(&m, *b, R).unwrap();
                fa.partial_cmp(&fb).unwrap()
            })
            .unwrap();
        assert!((best - analytic).abs() <= step);
    }

    #[test]
    fn mass_is_conserved() {
        // Trapezoid over +-12 sigma in 1-D and radial shells in 3-D.
        let t = 1e-5;
        let sigma = (2.0 * D * t).sqrt();
        let n = 200_000;
        let one = model(Dimension::One);
        let h = 24.0 * sigma / n as f64;
        let mass1: f64 = (0..=n)
            .map(|i| {
                let x = -12.0 * sigma + h * i as f64;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * green_function(&one, t, x).unwrap()
            })
            .sum::<f64>()
            * h;
        assert!((mass1 - 1.0).abs() < 1e-6, "1-D mass {mass1}");

        let three = model(Dimension::Three);
        let h = 12.0 * sigma / n as f64;
        let mass3: f64 = (0..=n)
            .map(|i| {
                let r = h * i as f64;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * 4.0 * std::f64::consts::PI * r * r * green_function(&three, t, r).unwrap()
            })
            .sum::<f64>()
            * h;
        assert!((mass3 - 1.0).abs() < 1e-6, "3-D mass {mass3}");
    }

    #[test]
    fn impulse_pulse_equals_green() {
        let m = model(Dimension::One);
        for i in 0..100 {
            let t = 1e-7 * i as f64;
            assert_eq!(
                pulse_response(&m, t).unwrap(),
                green_function(&m, t, R).unwrap()
            );
        }
    }

    #[test]
    fn superposition_is_linear_in_amount() {
        let m = model(Dimension::One);
        let t = 2.5e-5;
        for i in 1..=100 {
            let x = 1e3 * i as f64 - 3.7e4;
            assert_eq!(
                superpose(&m, &[(0.0, x)], t).unwrap(),
                x * pulse_response(&m, t).unwrap()
            );
        }
    }

    #[test]
    fn narrow_rectangle_converges_to_impulse() {
        let m = model(Dimension::One);
        let ts = sampling_interval(&m).unwrap();
        let probe = [0.5 * ts, ts, 2.0 * ts, 5.0 * ts];
        let err = |width: f64| {
            let rect = m.with_release(ReleaseMode::Rectangular { width }).unwrap();
            probe
                .iter()
                .map(|&t| {
                    let a = pulse_response(&rect, t).unwrap();
                    let b = pulse_response(&m, t).unwrap();
                    (a - b).abs() / b
                })
                .fold(0.0, f64::max)
        };
        let coarse = err(ts / 100.0);
        let fine = err(ts / 1000.0);
        assert!(fine < coarse / 5.0, "coarse {coarse}, fine {fine}");
        assert!(fine < 1e-3, "fine {fine}");
    }

    #[test]
    fn default_geometry_trace_is_positive_and_unimodal() {
        let m = model(Dimension::One);
        let ts = sampling_interval(&m).unwrap();
        let trace: Vec<f64> = (1..=5000)
            .map(|i| pulse_response(&m, ts * 0.002 * i as f64).unwrap())
            .collect();
        assert!(trace.iter().all(|&v| v > 0.0));
        let turns = trace
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] > w[2])
            .count();
        assert_eq!(turns, 1);
    }

    #[test]
    fn sampling_interval_matches_stationary_points() {
        for (dim, k) in [(Dimension::One, 2.0), (Dimension::Three, 6.0)] {
            let ts = sampling_interval(&model(dim)).unwrap();
            let analytic = R * R / (k * D);
            assert!(
                (ts - analytic).abs() <= 1e-6 * analytic,
                "{dim:?}: {ts} vs {analytic}"
            );
        }
    }

    #[test]
    fn sampling_interval_is_argmax() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rect = model(Dimension::Three)
            .with_release(ReleaseMode::Rectangular { width: 2e-6 })
            .unwrap();
        for m in [model(Dimension::One), model(Dimension::Three), rect] {
            let ts = sampling_interval(&m).unwrap();
            let peak = pulse_response(&m, ts).unwrap();
            for _ in 0..1000 {
                let t = rng.random_range(0.0..50.0 * ts);
                assert!(pulse_response(&m, t).unwrap() <= peak * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn three_dim_first_tap_closed_form() {
        let m = model(Dimension::Three);
        let taps = channel_taps(&m, 4).unwrap();
        let ts = R * R / (6.0 * D);
        let expected = (4.0 * std::f64::consts::PI * D * ts).powf(-1.5) * (-1.5f64).exp();
        assert!((taps.p0() - expected).abs() <= 1e-9 * expected);
        assert!(taps.taps().windows(2).all(|w| w[1] < w[0]));
        assert_eq!(taps.memory(), 4);
    }

    #[test]
    fn taps_reject_memory_zero_and_bad_vectors() {
        let m = model(Dimension::One);
        assert!(channel_taps(&m, 0).is_err());
        assert!(matches!(
            TapVector::new(vec![1.0, 1.0], 1.0),
            Err(Error::Tap(_))
        ));
        assert!(matches!(
            TapVector::new(vec![1.0, -0.1], 1.0),
            Err(Error::Tap(_))
        ));
        assert!(matches!(
            TapVector::new(Vec::<f64>::new(), 1.0),
            Err(Error::Tap(_))
        ));
        // Slot shorter than the peak time yields an increasing first pair.
        let ts = sampling_interval(&m).unwrap();
        assert!(matches!(
            channel_taps_at(&m, ts / 4.0, 3),
            Err(Error::Tap(_))
        ));
    }

    #[test]
    fn memory_length_rules() {
        let three = model(Dimension::Three);
        assert_eq!(memory_length(&three, 0.999).unwrap(), 1);
        // Direct scan oracle.
        let ts = R * R / (6.0 * D);
        let p = |k: f64| green_function(&three, k * ts, R).unwrap();
        let oracle = (1..).find(|&l| p((l + 1) as f64) / p(1.0) < 1e-3).unwrap();
        let l = memory_length(&three, 1e-3).unwrap();
        assert_eq!(l, oracle);
        let taps = channel_taps(&three, l).unwrap();
        assert!(taps.taps()[l] / taps.p0() < 1e-3);
        assert!(memory_length(&three, 1e-4).unwrap() >= l);
        assert!(memory_length(&three, 1.5).is_err());
        // The 1-D tail decays like t^(-1/2) and never reaches 1e-3 within the cap.
        assert!(matches!(
            memory_length(&model(Dimension::One), 1e-3),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn f32_models_work() {
        let m = ChannelModel::<f32>::impulse(Dimension::Three, 2.2e-9, 2.15e-7).unwrap();
        let ts = sampling_interval(&m).unwrap();
        let analytic = 2.15e-7f32 * 2.15e-7 / (6.0 * 2.2e-9);
        assert!((ts - analytic).abs() <= 1e-3 * analytic);
        let taps = channel_taps(&m, 3).unwrap();
        assert_eq!(taps.taps().len(), 4);
    }

    #[test]
    fn convolve_and_subsample() {
        let taps = TapVector::new(vec![1.0, 0.5, 0.25], 1.0).unwrap();
        assert_eq!(
            taps.convolve(&[1.0, 0.0, 0.0, 2.0]),
            vec![1.0, 0.5, 0.25, 2.0]
        );
        let even = taps.subsample(2).unwrap();
        assert_eq!(even.taps(), &[1.0, 0.25]);
        assert_eq!(even.ts(), 2.0);
    }
}
