//! Causal inverse-channel precoder and its stability checks.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use crate::channel::TapVector;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stability<T> {
    /// Every pole lies strictly inside the unit disk.
    Certified,
    /// Only the Eneström–Kakeya annulus is known and it reaches the unit circle.
    BoundOnly { min_ratio: T, max_ratio: T },
}

/// Recursive filter `X_j = (B_j - sum_{k>=1} p_k X_{j-k}) / p_0` with zero initial state.
#[derive(Debug, Clone)]
pub struct PrecoderFilter<T> {
    coefficients: Vec<T>,
    /// Ring buffer of the last `L` outputs; `history[head]` is the most recent.
    history: Vec<T>,
    head: usize,
    stability: Stability<T>,
}

impl<T: Real> PrecoderFilter<T> {
    pub fn invert_channel(taps: &TapVector<T>) -> Result<Self> {
        Self::from_coefficients(taps.taps().to_vec())
    }

    /// Builds the inverse of an arbitrary FIR response `coefficients[0] + ... z^-L`.
    pub fn from_coefficients(coefficients: Vec<T>) -> Result<Self> {
        let Some(&p0) = coefficients.first() else {
            return Err(invalid("precoder needs at least one coefficient"));
        };
        if p0 == T::zero() {
            return Err(Error::SingularChannel("p_0 = 0".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite channel coefficient"));
        }
        let stability = classify(&coefficients);
        let l = coefficients.len() - 1;
        Ok(Self {
            coefficients,
            history: vec![T::zero(); l],
            head: 0,
            stability,
        })
    }

    pub fn stability(&self) -> Stability<T> {
        self.stability
    }

    pub fn memory(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn reset(&mut self) {
        self.history.iter_mut().for_each(|x| *x = T::zero());
        self.head = 0;
    }

    /// Advances one slot and returns the unquantized `X_j`.
    pub fn step(&mut self, b: T) -> T {
        let l = self.history.len();
        let mut acc = b;
        for k in 1..=l {
            acc = acc - self.coefficients[k] * self.history[(self.head + k - 1) % l];
        }
        let x = acc / self.coefficients[0];
        if l > 0 {
            self.head = (self.head + l - 1) % l;
            self.history[self.head] = x;
        }
        x
    }

    pub fn run(&mut self, b: &[T]) -> Vec<T> {
        b.iter().map(|&v| self.step(v)).collect()
    }
}

fn classify<T: Real>(coefficients: &[T]) -> Stability<T> {
    if coefficients.len() == 1 {
        return Stability::Certified;
    }
    if let Ok((min_ratio, max_ratio)) = ratio_bounds(coefficients) {
        if max_ratio < T::one() {
            return Stability::Certified;
        }
        if let Ok(moduli) = pole_moduli(coefficients) {
            if moduli.first().is_some_and(|&m| m < 1.0 - 1e-12) {
                return Stability::Certified;
            }
        }
        return Stability::BoundOnly {
            min_ratio,
            max_ratio,
        };
    }
    match pole_moduli(coefficients) {
        Ok(m) if m.first().is_some_and(|&m| m < 1.0 - 1e-12) => Stability::Certified,
        _ => Stability::BoundOnly {
            min_ratio: T::nan(),
            max_ratio: T::nan(),
        },
    }
}

fn ratio_bounds<T: Real>(coefficients: &[T]) -> Result<(T, T)> {
    if coefficients.len() < 2 {
        return Err(Error::Precondition(
            "Eneström–Kakeya bounds need L >= 1".into(),
        ));
    }
    if let Some(k) = coefficients.iter().position(|&p| !(p > T::zero())) {
        return Err(Error::Precondition(format!("tap p_{k} is not positive")));
    }
    // With c_i = p_{L-i}, the ratios c_{i-1} / c_i are p_{k+1} / p_k.
    let ratios = coefficients.windows(2).map(|w| w[1] / w[0]);
    Ok(
        ratios.fold((T::infinity(), T::neg_infinity()), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        }),
    )
}

/// Annulus `(min_ratio, max_ratio)` containing every pole of the inverse filter.
pub fn enestrom_kakeya_bounds<T: Real>(taps: &TapVector<T>) -> Result<(T, T)> {
    ratio_bounds(taps.taps())
}

/// Pole moduli of the inverse filter, sorted in descending order.
pub fn verify_poles<T: Real>(taps: &TapVector<T>) -> Result<Vec<T>> {
    if taps.memory() < 1 {
        return Err(Error::Precondition("pole computation needs L >= 1".into()));
    }
    Ok(pole_moduli(taps.taps())?.into_iter().map(T::lit).collect())
}

fn pole_moduli<T: Real>(coefficients: &[T]) -> Result<Vec<f64>> {
    let p: Vec<f64> = coefficients.iter().map(|c| c.to_f64_lossy()).collect();
    let l = p.len() - 1;
    // Monic polynomial z^L + (p_1/p_0) z^(L-1) + ... + p_L/p_0.
    let a: Vec<f64> = p.iter().map(|&c| c / p[0]).collect();
    let mut companion = DMatrix::<f64>::zeros(l, l);
    for j in 0..l {
        companion[(0, j)] = -a[j + 1];
    }
    for i in 1..l {
        companion[(i, i - 1)] = 1.0;
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, 1e-14, 10_000 * l.max(1))
        .ok_or_else(|| Error::Numerics("companion eigensolver did not converge".into()))?;
    let mut moduli = Vec::with_capacity(l);
    for z in schur.complex_eigenvalues().iter() {
        let root = polish(&a, *z);
        let (value, scale) = horner(&a, root);
        if value.norm() > 1e-8 * scale {
            return Err(Error::Numerics(format!(
                "pole residual {:.3e} exceeds tolerance",
                value.norm() / scale
            )));
        }
        moduli.push(root.norm());
    }
    moduli.sort_by(|x, y| y.total_cmp(x));
    Ok(moduli)
}

/// Polynomial value and the magnitude scale `sum |a_k| |z|^(L-k)`.
fn horner(a: &[f64], z: Complex<f64>) -> (Complex<f64>, f64) {
    let r = z.norm();
    a.iter().fold((Complex::new(0.0, 0.0), 0.0), |(v, s), &c| {
        (v * z + c, s * r + c.abs())
    })
}

fn polish(a: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    for _ in 0..3 {
        let (mut v, mut d) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        for &c in a {
            d = d * z + v;
            v = v * z + c;
        }
        if d.norm() == 0.0 {
            break;
        }
        let next = z - v / d;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        if horner(a, next).0.norm() >= horner(a, z).0.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Transmit power statistics of the precoder driven by i.i.d. `+-beta` symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate<T> {
    pub mean_abs: T,
    pub mean_square: T,
}

pub const MIN_POWER_HORIZON: usize = 1_000;
const MEAN_ABS_SAMPLES: usize = 1_000_000;

/// `E[X^2]` from the energy of the inverse impulse response and `E|X|` by Monte Carlo.
pub fn estimate_power<T: Real, R: Rng + ?Sized>(
    taps: &TapVector<T>,
    beta: T,
    horizon: usize,
    rng: &mut R,
) -> Result<PowerEstimate<T>> {
    if horizon < MIN_POWER_HORIZON {
        return Err(invalid(format!("horizon must be >= {MIN_POWER_HORIZON}")));
    }
    let coeffs: Vec<f64> = taps.taps().iter().map(|p| p.to_f64_lossy()).collect();
    let mut filter = PrecoderFilter::from_coefficients(coeffs)?;
    if filter.stability() != Stability::Certified {
        return Err(Error::Precondition(
            "precoder stability is not certified".into(),
        ));
    }
    let beta64 = beta.to_f64_lossy();
    let window = filter.memory() + 1;

    let mut energy = 0.0f64;
    let mut recent = std::collections::VecDeque::with_capacity(window);
    let mut converged = false;
    for k in 0..=horizon {
        let h = filter.step(if k == 0 { 1.0 } else { 0.0 });
        let e = h * h;
        energy += e;
        recent.push_back(e);
        if recent.len() > window {
            recent.pop_front();
        }
        if k + 1 >= window && recent.iter().sum::<f64>() < 1e-12 * energy {
            converged = true;
            break;
        }
    }
    if !converged || !energy.is_finite() {
        return Err(Error::Numerics(format!(
            "inverse impulse response energy not converged within horizon {horizon}"
        )));
    }

    filter.reset();
    let draw = |rng: &mut R| {
        if rng.random::<bool>() {
            beta64
        } else {
            -beta64
        }
    };
    for _ in 0..8 * window {
        filter.step(draw(rng));
    }
    let abs_sum: f64 = (0..MEAN_ABS_SAMPLES)
        .map(|_| filter.step(draw(rng)).abs())
        .sum();
    Ok(PowerEstimate {
        mean_abs: T::lit(abs_sum / MEAN_ABS_SAMPLES as f64),
        mean_square: T::lit(beta64 * beta64 * energy),
    })
}
