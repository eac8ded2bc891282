//! Explicit finite-difference solver for two diffusing species annihilating via
//! `A + B -> 0`, the closed-form local reaction ODE, and the empirical variance map `g`.
//!
//! The 1-D grid is cell centred with a cell on the origin: cell `i` covers
//! `[(i - n - 1/2) dx, (i - n + 1/2) dx]` for `i = 0..=2n`. Ghost cells beyond the domain
//! hold zero concentration. Each step applies the FTCS diffusion stencil plus sources,
//! then the bimolecular reaction with forward-Euler sub-steps per cell.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::modulation::split_signed;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    A,
    B,
}

/// Release of `amount` molecules at `location`, either instantaneous (`duration == 0`) or
/// at a constant rate over `[time, time + duration)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Release<T> {
    pub time: T,
    pub species: Species,
    pub location: T,
    pub amount: T,
    pub duration: T,
}

impl<T: Real> Release<T> {
    pub fn impulse(time: T, species: Species, location: T, amount: T) -> Self {
        Self {
            time,
            species,
            location,
            amount,
            duration: T::zero(),
        }
    }
}

/// Default diffusion number `D dt / dx²`.
pub const DEFAULT_CFL: f64 = 0.4;
/// Default bound on `zeta * max(rho_A, rho_B) * h` for one reaction sub-step.
pub const DEFAULT_REACTION_LIMIT: f64 = 0.1;

/// Physical parameters and discretisation of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdmParams<T> {
    pub d_a: T,
    pub d_b: T,
    /// Reaction rate in (concentration · s)⁻¹.
    pub zeta: T,
    pub dx: T,
    /// Diffusion number used to pick the time step, at most 0.5.
    pub cfl: T,
    pub reaction_limit: T,
}

impl<T: Real> FdmParams<T> {
    pub fn new(d_a: T, d_b: T, zeta: T, dx: T) -> Result<Self> {
        let p = Self {
            d_a,
            d_b,
            zeta,
            dx,
            cfl: T::lit(DEFAULT_CFL),
            reaction_limit: T::lit(DEFAULT_REACTION_LIMIT),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_cfl(mut self, cfl: T) -> Result<Self> {
        self.cfl = cfl;
        self.validate()?;
        Ok(self)
    }

    pub fn with_reaction_limit(mut self, limit: T) -> Result<Self> {
        self.reaction_limit = limit;
        self.validate()?;
        Ok(self)
    }

    pub fn with_zeta(mut self, zeta: T) -> Result<Self> {
        self.zeta = zeta;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let nonneg = |v: T| v.is_finite() && v >= T::zero();
        if !(nonneg(self.d_a) && nonneg(self.d_b)) {
            return Err(invalid("diffusion coefficients must be finite and >= 0"));
        }
        if !nonneg(self.zeta) {
            return Err(invalid(format!(
                "reaction rate must be >= 0, got {}",
                self.zeta
            )));
        }
        if !(self.dx.is_finite() && self.dx > T::zero()) {
            return Err(invalid(format!(
                "grid spacing must be > 0, got {}",
                self.dx
            )));
        }
        if !(self.cfl > T::zero() && self.cfl <= T::lit(0.5)) {
            return Err(Error::Config(format!(
                "CFL number {} outside (0, 0.5]",
                self.cfl
            )));
        }
        if !(self.reaction_limit > T::zero()
            && self.reaction_limit <= T::lit(DEFAULT_REACTION_LIMIT))
        {
            return Err(Error::Config(format!(
                "reaction sub-step limit {} outside (0, 0.1]",
                self.reaction_limit
            )));
        }
        Ok(())
    }

    pub fn d_max(&self) -> T {
        self.d_a.max(self.d_b)
    }

    /// Largest stable step for the configured diffusion number, infinite without diffusion.
    pub fn dt_limit(&self) -> T {
        let d = self.d_max();
        if d == T::zero() {
            T::infinity()
        } else {
            self.cfl * self.dx * self.dx / d
        }
    }
}

/// Physical reaction rate for a dimensionless rate `kappa` relative to the reference
/// concentration `c_ref` and time scale `ts`.
pub fn reaction_rate<T: Real>(kappa: T, c_ref: T, ts: T) -> Result<T> {
    if !(kappa >= T::zero() && c_ref > T::zero() && ts > T::zero()) {
        return Err(invalid(
            "reaction_rate needs kappa >= 0, c_ref > 0 and ts > 0",
        ));
    }
    Ok(kappa / (c_ref * ts))
}

/// Per-cell injection rates (concentration per second) for one step.
#[derive(Debug, Clone, Copy)]
pub struct Sources<'a, T> {
    pub a: &'a [T],
    pub b: &'a [T],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Support {
    lo: usize,
    hi: usize,
}

/// Concentration fields of both species on the grid.
#[derive(Debug, Clone)]
pub struct ReactionField<T> {
    params: FdmParams<T>,
    half_cells: usize,
    rho_a: Vec<T>,
    rho_b: Vec<T>,
    scratch: Vec<T>,
    support_a: Option<Support>,
    support_b: Option<Support>,
    steps: u64,
    elapsed: T,
    injected: T,
    leaked: T,
    peak_deposit: T,
}

const RELATIVE_FLUSH: f64 = 1e-30;

impl<T: Real> ReactionField<T> {
    /// Empty field on `[-x_max, x_max]`.
    pub fn new(params: FdmParams<T>, x_max: T) -> Result<Self> {
        params.validate()?;
        if !(x_max.is_finite() && x_max >= T::zero()) {
            return Err(invalid(format!(
                "domain half-width must be >= 0, got {x_max}"
            )));
        }
        let half_cells = (x_max / params.dx)
            .ceil()
            .to_usize()
            .ok_or_else(|| invalid("domain too large"))?;
        let cells = 2 * half_cells + 1;
        Ok(Self {
            params,
            half_cells,
            rho_a: vec![T::zero(); cells],
            rho_b: vec![T::zero(); cells],
            scratch: vec![T::zero(); cells],
            support_a: None,
            support_b: None,
            steps: 0,
            elapsed: T::zero(),
            injected: T::zero(),
            leaked: T::zero(),
            peak_deposit: T::zero(),
        })
    }

    pub fn params(&self) -> &FdmParams<T> {
        &self.params
    }

    pub fn cells(&self) -> usize {
        self.rho_a.len()
    }

    pub fn position(&self, i: usize) -> T {
        (T::from_usize_lossy(i) - T::from_usize_lossy(self.half_cells)) * self.params.dx
    }

    pub fn rho_a(&self) -> &[T] {
        &self.rho_a
    }

    pub fn rho_b(&self) -> &[T] {
        &self.rho_b
    }

    pub fn rho(&self, species: Species) -> &[T] {
        match species {
            Species::A => &self.rho_a,
            Species::B => &self.rho_b,
        }
    }

    /// Simulated time, accumulated over steps.
    pub fn time(&self) -> T {
        self.elapsed
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Total amount deposited by releases and sources.
    pub fn injected(&self) -> T {
        self.injected
    }

    /// Amount that has left through the domain boundaries.
    pub fn leaked(&self) -> T {
        self.leaked
    }

    /// Amount of one species on the grid.
    pub fn mass(&self, species: Species) -> T {
        self.rho(species).iter().copied().sum::<T>() * self.params.dx
    }

    /// Cell index containing `x`.
    pub fn cell_of(&self, x: T) -> Result<usize> {
        let idx = (x / self.params.dx).round() + T::from_usize_lossy(self.half_cells);
        match idx.to_usize() {
            Some(i) if idx >= T::zero() && i < self.cells() => Ok(i),
            _ => Err(invalid(format!("location {x} lies outside the grid"))),
        }
    }

    /// Adds `amount` molecules spread uniformly over the cell containing `x`.
    pub fn deposit(&mut self, species: Species, x: T, amount: T) -> Result<()> {
        if !(amount.is_finite() && amount >= T::zero()) {
            return Err(invalid(format!(
                "release amount must be >= 0, got {amount}"
            )));
        }
        if amount == T::zero() {
            return Ok(());
        }
        let i = self.cell_of(x)?;
        let conc = amount / self.params.dx;
        let (rho, support) = match species {
            Species::A => (&mut self.rho_a, &mut self.support_a),
            Species::B => (&mut self.rho_b, &mut self.support_b),
        };
        rho[i] = rho[i] + conc;
        *support = Some(match *support {
            None => Support { lo: i, hi: i },
            Some(s) => Support {
                lo: s.lo.min(i),
                hi: s.hi.max(i),
            },
        });
        self.injected = self.injected + amount;
        self.peak_deposit = self.peak_deposit.max(rho[i]);
        Ok(())
    }

    fn flush_floor(&self) -> T {
        let subnormal_guard = T::min_positive_value() / T::epsilon();
        (self.peak_deposit * T::lit(RELATIVE_FLUSH)).max(subnormal_guard)
    }

    /// One explicit step of length `dt`.
    pub fn step(&mut self, dt: T, sources: Option<Sources<'_, T>>) -> Result<()> {
        let p = self.params;
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(invalid(format!("time step must be > 0, got {dt}")));
        }
        let dx2 = p.dx * p.dx;
        let (lam_a, lam_b) = (p.d_a * dt / dx2, p.d_b * dt / dx2);
        if lam_a.max(lam_b) > T::lit(0.5) {
            return Err(Error::Config(format!(
                "CFL violated: max(D) dt / dx^2 = {} > 0.5",
                lam_a.max(lam_b)
            )));
        }
        if let Some(s) = sources {
            if s.a.len() != self.cells() || s.b.len() != self.cells() {
                return Err(invalid("source arrays must cover the grid"));
            }
            if s.a
                .iter()
                .chain(s.b)
                .any(|&v| !(v.is_finite() && v >= T::zero()))
            {
                return Err(invalid("source rates must be finite and >= 0"));
            }
        }
        let floor = self.flush_floor();

        let leak_a = diffuse(
            &mut self.rho_a,
            &mut self.scratch,
            &mut self.support_a,
            lam_a,
        );
        let leak_b = diffuse(
            &mut self.rho_b,
            &mut self.scratch,
            &mut self.support_b,
            lam_b,
        );
        self.leaked = self.leaked + (leak_a + leak_b) * p.dx;

        if let Some(s) = sources {
            let added_a = add_sources(&mut self.rho_a, &mut self.support_a, s.a, dt);
            let added_b = add_sources(&mut self.rho_b, &mut self.support_b, s.b, dt);
            self.injected = self.injected + (added_a + added_b) * p.dx;
            for &c in self.rho_a.iter().chain(self.rho_b.iter()) {
                self.peak_deposit = self.peak_deposit.max(c);
            }
        }

        if p.zeta > T::zero() {
            if let (Some(sa), Some(sb)) = (self.support_a, self.support_b) {
                let (lo, hi) = (sa.lo.max(sb.lo), sa.hi.min(sb.hi));
                let zdt = p.zeta * dt;
                let single = p.reaction_limit / zdt;
                if lo <= hi {
                    let cells = self.rho_a[lo..=hi].iter_mut().zip(&mut self.rho_b[lo..=hi]);
                    for (a, b) in cells {
                        if a.max(*b) <= single {
                            let r = zdt * *a * *b;
                            *a = *a - r;
                            *b = *b - r;
                        } else {
                            (*a, *b) = react_cell(*a, *b, p.zeta, dt, p.reaction_limit)?;
                        }
                    }
                }
            }
        }

        shrink(&mut self.rho_a, &mut self.support_a, floor);
        shrink(&mut self.rho_b, &mut self.support_b, floor);
        self.steps += 1;
        self.elapsed = self.elapsed + dt;
        Ok(())
    }

    /// Mean over `[center - width/2, center + width/2]` of the piecewise-linear interpolant
    /// through the cell centres; the point value when `width == 0`.
    pub fn probe(&self, species: Species, center: T, width: T) -> Result<T> {
        interp_average(
            self.rho(species),
            self.params.dx,
            self.half_cells,
            center,
            width,
        )
    }
}

/// Advances `species` by the FTCS stencil in convex form and returns the boundary outflow
/// in concentration units.
fn diffuse<T: Real>(rho: &mut [T], scratch: &mut [T], support: &mut Option<Support>, lam: T) -> T {
    let Some(s) = *support else {
        return T::zero();
    };
    if lam == T::zero() {
        return T::zero();
    }
    let last = rho.len() - 1;
    let mut leak = T::zero();
    if s.lo == 0 {
        leak = leak + lam * rho[0];
    }
    if s.hi == last {
        leak = leak + lam * rho[last];
    }
    let lo = s.lo.saturating_sub(1);
    let hi = (s.hi + 1).min(last);
    let centre = T::one() - T::lit(2.0) * lam;
    let at = |i: usize| if i <= last { rho[i] } else { T::zero() };
    // Boundary-aware ends, branch-free interior.
    let first_interior = lo.max(1);
    let last_interior = hi.min(last.saturating_sub(1));
    if lo == 0 {
        scratch[0] = centre * rho[0] + lam * at(1);
    }
    if first_interior <= last_interior {
        let out = &mut scratch[first_interior..=last_interior];
        let src = &rho[first_interior - 1..=last_interior + 1];
        for (o, w) in out.iter_mut().zip(src.windows(3)) {
            *o = centre * w[1] + lam * (w[0] + w[2]);
        }
    }
    if hi == last && last > 0 {
        scratch[last] = centre * rho[last] + lam * rho[last - 1];
    }
    rho[lo..=hi].copy_from_slice(&scratch[lo..=hi]);
    *support = Some(Support { lo, hi });
    leak
}

fn add_sources<T: Real>(rho: &mut [T], support: &mut Option<Support>, rates: &[T], dt: T) -> T {
    let mut added = T::zero();
    for (i, &r) in rates.iter().enumerate() {
        if r > T::zero() {
            rho[i] = rho[i] + r * dt;
            added = added + r * dt;
            *support = Some(match *support {
                None => Support { lo: i, hi: i },
                Some(s) => Support {
                    lo: s.lo.min(i),
                    hi: s.hi.max(i),
                },
            });
        }
    }
    added
}

fn shrink<T: Real>(rho: &mut [T], support: &mut Option<Support>, floor: T) {
    let Some(mut s) = *support else {
        return;
    };
    while s.lo < s.hi && rho[s.lo] < floor {
        rho[s.lo] = T::zero();
        s.lo += 1;
    }
    while s.hi > s.lo && rho[s.hi] < floor {
        rho[s.hi] = T::zero();
        s.hi -= 1;
    }
    if s.lo == s.hi && rho[s.lo] < floor {
        rho[s.lo] = T::zero();
        *support = None;
    } else {
        *support = Some(s);
    }
}

/// Forward-Euler integration of `a' = b' = -zeta a b` over `dt` with enough sub-steps that
/// `zeta * max(a, b) * h <= limit`.
pub fn react_cell<T: Real>(a: T, b: T, zeta: T, dt: T, limit: T) -> Result<(T, T)> {
    if !(a > T::zero() && b > T::zero() && zeta > T::zero()) {
        return Ok((a, b));
    }
    let load = zeta * a.max(b) * dt / limit;
    if load <= T::one() {
        // One sub-step removes at most `limit * min(a, b)`, so both stay positive.
        let r = zeta * a * b * dt;
        return Ok((a - r, b - r));
    }
    let steps = load.ceil();
    let n = steps
        .to_u64()
        .filter(|&n| n <= 1 << 40)
        .ok_or_else(|| Error::Numerics(format!("reaction needs {steps} sub-steps")))?;
    let h = dt / steps;
    let (mut a, mut b) = (a, b);
    for _ in 0..n {
        let r = zeta * a * b * h;
        a = a - r;
        b = b - r;
    }
    let band = T::lit(-1e-12) * a.abs().max(b.abs());
    for v in [&mut a, &mut b] {
        if *v < T::zero() {
            if *v >= band {
                *v = T::zero();
            } else {
                return Err(Error::Numerics(format!(
                    "negative concentration {} after reaction; time step too large",
                    *v
                )));
            }
        }
    }
    Ok((a, b))
}

/// Public entry point matching the single-step contract.
pub fn fdm_step<T: Real>(
    field: &mut ReactionField<T>,
    dt: T,
    sources: Option<Sources<'_, T>>,
) -> Result<()> {
    field.step(dt, sources)
}

fn interp_average<T: Real>(rho: &[T], dx: T, half_cells: usize, center: T, width: T) -> Result<T> {
    if !(width.is_finite() && width >= T::zero() && center.is_finite()) {
        return Err(invalid("probe needs finite center and width >= 0"));
    }
    let n = T::from_usize_lossy(half_cells);
    let last = rho.len() - 1;
    // Window ends in fractional node coordinates.
    let ua = (center - width * T::lit(0.5)) / dx + n;
    let ub = (center + width * T::lit(0.5)) / dx + n;
    if ua < T::zero() || ub > T::from_usize_lossy(last) {
        return Err(invalid("probe window extends beyond the grid"));
    }
    if last == 0 {
        return Ok(rho[0]);
    }
    let segment = |u: T| u.floor().to_usize().unwrap_or(0).min(last - 1);
    let lin = |i: usize, u: T| {
        let f = u - T::from_usize_lossy(i);
        rho[i] * (T::one() - f) + rho[i + 1] * f
    };
    if width == T::zero() {
        return Ok(lin(segment(ua), ua));
    }
    let mut total = T::zero();
    let mut s = ua;
    while s < ub {
        let i = segment(s);
        let e = T::from_usize_lossy(i + 1).min(ub);
        total = total + (e - s) * (lin(i, s) + lin(i, e)) * T::lit(0.5);
        s = e;
    }
    Ok(total / (ub - ua))
}

/// Probe placement for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe<T> {
    pub center: T,
    pub width: T,
}

/// Sampling and domain settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSpec<T> {
    pub t_end: T,
    /// Trace spacing; release times and `t_end` must be multiples of it.
    pub sample_interval: T,
    pub probe: Probe<T>,
    /// Domain half-width; `None` picks `10 sqrt(2 D_max t_end)` padded to cover the probe
    /// and every release.
    pub x_max: Option<T>,
}

/// Probe traces sampled every `sample_interval`, before releases at the same instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace<T> {
    pub t: Vec<T>,
    pub rho_a: Vec<T>,
    pub rho_b: Vec<T>,
    pub diff: Vec<T>,
}

impl<T: Real> Trace<T> {
    /// CSV with columns `t,rho_A_probe,rho_B_probe,diff`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "rho_A_probe", "rho_B_probe", "diff"])?;
        for i in 0..self.t.len() {
            w.write_record([
                format!("{:e}", self.t[i].to_f64_lossy()),
                format!("{:e}", self.rho_a[i].to_f64_lossy()),
                format!("{:e}", self.rho_b[i].to_f64_lossy()),
                format!("{:e}", self.diff[i].to_f64_lossy()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn multiple_of<T: Real>(t: T, unit: T, what: &str) -> Result<usize> {
    let k = (t / unit).round();
    if !(t >= T::zero()) || (k * unit - t).abs() > T::lit(1e-9) * unit.max(t) {
        return Err(invalid(format!(
            "{what} {t} is not a nonnegative multiple of the sample interval {unit}"
        )));
    }
    k.to_usize()
        .ok_or_else(|| invalid(format!("{what} {t} out of range")))
}

/// Number of solver steps per sample interval and the resulting step length.
pub fn step_plan<T: Real>(params: &FdmParams<T>, sample_interval: T) -> Result<(usize, T)> {
    let limit = params.dt_limit();
    let per = if limit.is_finite() {
        (sample_interval / limit)
            .ceil()
            .max(T::one())
            .to_usize()
            .ok_or_else(|| invalid("too many steps per sample"))?
    } else {
        1
    };
    Ok((per, sample_interval / T::from_usize_lossy(per)))
}

/// Default domain half-width for a run of length `t_end`.
pub fn default_x_max<T: Real>(params: &FdmParams<T>, t_end: T) -> T {
    T::lit(10.0) * (T::lit(2.0) * params.d_max() * t_end).sqrt()
}

/// Runs the solver over a release schedule and records the probe traces.
pub fn simulate<T: Real>(
    schedule: &[Release<T>],
    params: &FdmParams<T>,
    spec: &SimulationSpec<T>,
) -> Result<Trace<T>> {
    let (field, trace) = simulate_field(schedule, params, spec)?;
    let _ = field;
    Ok(trace)
}

/// As [`simulate`], also returning the final field.
pub fn simulate_field<T: Real>(
    schedule: &[Release<T>],
    params: &FdmParams<T>,
    spec: &SimulationSpec<T>,
) -> Result<(ReactionField<T>, Trace<T>)> {
    params.validate()?;
    if !(spec.sample_interval.is_finite() && spec.sample_interval > T::zero()) {
        return Err(invalid("sample interval must be > 0"));
    }
    let samples = multiple_of(spec.t_end, spec.sample_interval, "end time")?;
    let (per, dt) = step_plan(params, spec.sample_interval)?;

    let mut reach = spec.probe.center.abs() + spec.probe.width;
    for r in schedule {
        if !(r.amount.is_finite() && r.amount >= T::zero()) {
            return Err(invalid(format!(
                "release amount must be >= 0, got {}",
                r.amount
            )));
        }
        if !(r.duration.is_finite() && r.duration >= T::zero()) {
            return Err(invalid("release duration must be >= 0"));
        }
        multiple_of(r.time, spec.sample_interval, "release time")?;
        reach = reach.max(r.location.abs());
    }
    let x_max = match spec.x_max {
        Some(x) => x,
        None => default_x_max(params, spec.t_end).max(reach) + T::lit(4.0) * params.dx,
    };
    let mut field = ReactionField::new(*params, x_max)?;

    let impulses: Vec<(usize, &Release<T>)> = schedule
        .iter()
        .filter(|r| r.duration == T::zero())
        .map(|r| {
            Ok((
                multiple_of(r.time, spec.sample_interval, "release time")?,
                r,
            ))
        })
        .collect::<Result<_>>()?;
    let continuous: Vec<(usize, T, &Release<T>)> = schedule
        .iter()
        .filter(|r| r.duration > T::zero())
        .map(|r| {
            Ok((
                field.cell_of(r.location)?,
                r.amount / (r.duration * params.dx),
                r,
            ))
        })
        .collect::<Result<_>>()?;
    let mut src_a = vec![T::zero(); field.cells()];
    let mut src_b = vec![T::zero(); field.cells()];

    let mut trace = Trace::default();
    let mut global_step = 0usize;
    for k in 0..=samples {
        let t = spec.sample_interval * T::from_usize_lossy(k);
        let a = field.probe(Species::A, spec.probe.center, spec.probe.width)?;
        let b = field.probe(Species::B, spec.probe.center, spec.probe.width)?;
        trace.t.push(t);
        trace.rho_a.push(a);
        trace.rho_b.push(b);
        trace.diff.push(a - b);
        for (_, r) in impulses.iter().filter(|(idx, _)| *idx == k) {
            field.deposit(r.species, r.location, r.amount)?;
        }
        if k == samples {
            break;
        }
        for _ in 0..per {
            let start = dt * T::from_usize_lossy(global_step);
            let mut active = false;
            src_a
                .iter_mut()
                .chain(src_b.iter_mut())
                .for_each(|v| *v = T::zero());
            for &(cell, rate, r) in &continuous {
                let tol = T::lit(1e-9) * dt;
                if start + tol >= r.time && start + tol < r.time + r.duration {
                    let target = match r.species {
                        Species::A => &mut src_a,
                        Species::B => &mut src_b,
                    };
                    target[cell] = target[cell] + rate;
                    active = true;
                }
            }
            let sources = active.then_some(Sources {
                a: &src_a,
                b: &src_b,
            });
            field.step(dt, sources)?;
            global_step += 1;
        }
    }
    check_leak(&field)?;
    Ok((field, trace))
}

fn check_leak<T: Real>(field: &ReactionField<T>) -> Result<()> {
    if field.leaked() > T::lit(1e-4) * field.injected() {
        return Err(Error::Numerics(format!(
            "boundary leakage {} exceeds 1e-4 of injected {}; enlarge the domain",
            field.leaked(),
            field.injected()
        )));
    }
    Ok(())
}

/// Initial concentrations and effective rate of the local reaction near the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowReactionState<T> {
    rho_bar_a: T,
    rho_bar_b: T,
    zeta_lambda: T,
    delta: T,
}

impl<T: Real> SlowReactionState<T> {
    pub fn new(rho_bar_a: T, rho_bar_b: T, zeta_lambda: T) -> Result<Self> {
        let ok = |v: T| v.is_finite() && v >= T::zero();
        if !(ok(rho_bar_a) && ok(rho_bar_b) && ok(zeta_lambda)) {
            return Err(invalid(
                "slow reaction state needs finite nonnegative inputs",
            ));
        }
        Ok(Self {
            rho_bar_a,
            rho_bar_b,
            zeta_lambda,
            delta: rho_bar_a - rho_bar_b,
        })
    }

    pub fn rho_bar_a(&self) -> T {
        self.rho_bar_a
    }

    pub fn rho_bar_b(&self) -> T {
        self.rho_bar_b
    }

    pub fn zeta_lambda(&self) -> T {
        self.zeta_lambda
    }

    pub fn delta(&self) -> T {
        self.delta
    }
}

/// Exact solution of `a' = b' = -zeta_lambda a b` at time `t`, returned as `(rho_A, rho_B)`.
pub fn slow_reaction_ode<T: Real>(state: &SlowReactionState<T>, t: T) -> Result<(T, T)> {
    if !(t.is_finite() && t >= T::zero()) {
        return Err(invalid(format!("time must be >= 0, got {t}")));
    }
    let (a0, b0, k) = (state.rho_bar_a, state.rho_bar_b, state.zeta_lambda);
    if state.delta == T::zero() {
        let v = b0 / (T::one() + k * b0 * t);
        return Ok((v, v));
    }
    // Solve with the larger species as A so the exponent is negative.
    let (big, small, swapped) = if state.delta > T::zero() {
        (a0, b0, false)
    } else {
        (b0, a0, true)
    };
    let delta = big - small;
    let x = k * delta * t;
    let e = (-x).exp();
    let one_minus_e = -(-x).exp_m1();
    let s = delta * small * e / (delta + small * one_minus_e);
    let l = s + delta;
    Ok(if swapped { (s, l) } else { (l, s) })
}

/// Geometry and solver settings for [`frame_response`] and [`empirical_g`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry<T> {
    pub params: FdmParams<T>,
    pub receiver_distance: T,
    pub probe_width: T,
    /// Slot length; symbol `k` is released at `k * ts` from the origin.
    pub ts: T,
}

impl<T: Real> FrameGeometry<T> {
    fn check(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.ts > T::zero() && self.receiver_distance > T::zero()) {
            return Err(invalid("slot length and receiver distance must be > 0"));
        }
        if !(self.probe_width >= T::lit(4.0) * self.params.dx * T::lit(1.0 - 1e-9)) {
            return Err(Error::Config(format!(
                "receiver width {} spans fewer than 4 grid cells of {}",
                self.probe_width, self.params.dx
            )));
        }
        Ok(())
    }
}

/// Probe concentrations `(rho_A, rho_B)` at each slot end `(k + 1) ts` for a frame of
/// signed levels released from rest, positive parts as species A and negative as B.
pub fn frame_response<T: Real>(symbols: &[T], geometry: &FrameGeometry<T>) -> Result<Vec<(T, T)>> {
    geometry.check()?;
    let split = split_signed(symbols)?;
    let mut schedule = Vec::with_capacity(2 * symbols.len());
    for (k, (&a, &b)) in split.s_a.iter().zip(&split.s_b).enumerate() {
        let t = geometry.ts * T::from_usize_lossy(k);
        if a > T::zero() {
            schedule.push(Release::impulse(t, Species::A, T::zero(), a));
        }
        if b > T::zero() {
            schedule.push(Release::impulse(t, Species::B, T::zero(), b));
        }
    }
    let spec = SimulationSpec {
        t_end: geometry.ts * T::from_usize_lossy(symbols.len()),
        sample_interval: geometry.ts,
        probe: Probe {
            center: geometry.receiver_distance,
            width: geometry.probe_width,
        },
        x_max: None,
    };
    let trace = simulate(&schedule, &geometry.params, &spec)?;
    Ok(trace
        .rho_a
        .iter()
        .zip(&trace.rho_b)
        .skip(1)
        .map(|(&a, &b)| (a, b))
        .collect())
}

/// `rho_A + rho_B` at the receiver for the window `[x_j, x_{j-1}, ..., x_{j-L}]`, with
/// `x_{j-L}` released at `t = 0` and the sample taken at `(L + 1) ts`.
pub fn empirical_g<T: Real>(window: &[T], geometry: &FrameGeometry<T>) -> Result<T> {
    if window.is_empty() {
        return Err(invalid("window must hold at least one symbol"));
    }
    let chronological: Vec<T> = window.iter().rev().copied().collect();
    let response = frame_response(&chronological, geometry)?;
    let (a, b) = response[response.len() - 1];
    Ok(a + b)
}
