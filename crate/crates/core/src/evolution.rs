//! Strang split-step integration of `i u_t + Δu + μ|u|^{p-1}u = e`.
//!
//! One step is a half free flow, the exact nonlinear phase rotation
//! `u ↦ e^{iμ|u|^{p-1}τ} u` (the modulus is invariant under that flow), an
//! optional forcing kick, and another half free flow. With `μ = 1` and
//! `e = 0` this is the focusing equation; `μ = 0` gives the free flow.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groundstate::RadialProfile;
use crate::params_well::{
    well_membership, ExponentSet, FieldStats, Thresholds, Verdict, WellStatus,
};
use crate::spectral::{lebesgue_norm, lebesgue_norm_values, FieldState, GridSpec, Spectral};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveControls {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between checkpoints.
    pub checkpoint_every: usize,
    /// Gradient guard: stop once `‖∇u(t)‖ ≥ factor·‖∇u(0)‖`.
    pub blowup_gradient_factor: f64,
    /// Resolution guard: stop once the energy fraction above 2/3 of the
    /// Nyquist frequency exceeds this.
    pub resolution_fraction: f64,
    /// If set, a step is split into substeps so the nonlinear phase turned
    /// per substep stays below this many radians.
    pub max_phase_per_step: Option<f64>,
}

impl Default for EvolveControls {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            checkpoint_every: 100,
            blowup_gradient_factor: 10.0,
            resolution_fraction: 1e-3,
            max_phase_per_step: None,
        }
    }
}

impl EvolveControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be ≥ 0, got {}",
                self.t_end
            )));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::InvalidArgument(
                "checkpoint_every must be ≥ 1".into(),
            ));
        }
        if !(self.blowup_gradient_factor > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "blowup_gradient_factor must exceed 1, got {}",
                self.blowup_gradient_factor
            )));
        }
        if !(self.resolution_fraction > 0.0 && self.resolution_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "resolution_fraction must lie in (0, 1), got {}",
                self.resolution_fraction
            )));
        }
        if let Some(m) = self.max_phase_per_step {
            if !(m > 0.0) {
                return Err(Error::InvalidArgument(
                    "max_phase_per_step must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// Number of base steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Equation parameters: exponents and the coupling `μ` of the power term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub exps: ExponentSet,
    pub coupling: f64,
}

impl Model {
    pub fn focusing(exps: ExponentSet) -> Self {
        Self {
            exps,
            coupling: 1.0,
        }
    }

    pub fn free(exps: ExponentSet) -> Self {
        Self {
            exps,
            coupling: 0.0,
        }
    }
}

/// Spectral quantities available for free at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub grad2: f64,
    pub tail_fraction: f64,
}

/// Split-step integrator bound to one grid and model.
#[derive(Debug, Clone)]
pub struct SplitStep {
    pub spec: Spectral,
    pub model: Model,
    tail_mask: Vec<bool>,
}

impl SplitStep {
    pub fn new(grid: GridSpec, model: Model) -> Result<Self> {
        if grid.dim != model.exps.dim {
            return Err(Error::InvalidGrid(format!(
                "grid dimension {} differs from model dimension {}",
                grid.dim, model.exps.dim
            )));
        }
        let spec = Spectral::new(grid)?;
        let cut = 2.0 / 3.0 * grid.nyquist();
        let tail_mask = (0..grid.len())
            .map(|i| {
                let ix = grid.unflatten(i);
                (0..grid.dim).any(|a| grid.axis_freq(ix[a]).abs() > cut)
            })
            .collect();
        Ok(Self {
            spec,
            model,
            tail_mask,
        })
    }

    fn half_free(&self, c: &mut [Complex64], tau: f64) {
        for (ci, &k2) in c.iter_mut().zip(self.spec.ksq()) {
            *ci *= Complex64::from_polar(1.0, -tau * k2);
        }
    }

    fn nonlinear(&self, u: &mut [Complex64], tau: f64) {
        let mu = self.model.coupling;
        if mu == 0.0 {
            return;
        }
        let pm1 = self.model.exps.p - 1.0;
        for v in u.iter_mut() {
            let phase = mu * v.norm_sqr().powf(pm1 / 2.0) * tau;
            *v *= Complex64::from_polar(1.0, phase);
        }
    }

    /// One Strang step of size `dt`, with an optional forcing term `e`
    /// sampled at the midpoint.
    pub fn strang_step_forced(
        &self,
        field: &mut FieldState,
        dt: f64,
        forcing: Option<&[Complex64]>,
    ) -> StepInfo {
        let u = &mut field.values;
        self.spec.forward_in_place(u);
        self.half_free(u, dt / 2.0);
        self.spec.inverse_in_place(u);
        match forcing {
            None => self.nonlinear(u, dt),
            Some(e) => {
                // i u_t = e over the full step, wrapped in nonlinear halves
                self.nonlinear(u, dt / 2.0);
                for (v, ei) in u.iter_mut().zip(e) {
                    *v += Complex64::new(0.0, -dt) * ei;
                }
                self.nonlinear(u, dt / 2.0);
            }
        }
        self.spec.forward_in_place(u);
        self.half_free(u, dt / 2.0);
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut g2 = 0.0;
        for ((ci, &k2), &hi) in u.iter().zip(self.spec.ksq()).zip(&self.tail_mask) {
            let a = ci.norm_sqr();
            g2 += k2 * a;
            let e = (1.0 + k2) * a;
            total += e;
            if hi {
                tail += e;
            }
        }
        self.spec.inverse_in_place(u);
        field.time += dt;
        StepInfo {
            grad2: self.spec.grid.volume() * g2,
            tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
        }
    }

    pub fn strang_step(&self, field: &mut FieldState, dt: f64) -> StepInfo {
        self.strang_step_forced(field, dt, None)
    }

    /// Substep count keeping the nonlinear phase per substep bounded.
    pub fn substeps(&self, field: &FieldState, dt: f64, max_phase: Option<f64>) -> usize {
        let Some(limit) = max_phase else { return 1 };
        if self.model.coupling == 0.0 {
            return 1;
        }
        let amax = field
            .values
            .iter()
            .map(|v| v.norm_sqr())
            .fold(0.0, f64::max);
        let phase = self.model.coupling.abs() * amax.powf((self.model.exps.p - 1.0) / 2.0) * dt;
        ((phase / limit).ceil() as usize).clamp(1, 1 << 20)
    }

    /// Advances by `dt` honoring the substep rule; fails on non-finite data.
    pub fn advance(
        &self,
        field: &mut FieldState,
        dt: f64,
        max_phase: Option<f64>,
    ) -> Result<StepInfo> {
        let m = self.substeps(field, dt, max_phase);
        let start = field.time;
        let mut info = StepInfo {
            grad2: 0.0,
            tail_fraction: 0.0,
        };
        for _ in 0..m {
            info = self.strang_step(field, dt / m as f64);
        }
        field.time = start + dt;
        if !info.grad2.is_finite() || !field.is_finite() {
            return Err(Error::NonFiniteField { t: field.time });
        }
        Ok(info)
    }

    /// Plain propagation over `duration` in steps of `controls.dt`.
    pub fn propagate(
        &self,
        field: &mut FieldState,
        duration: f64,
        controls: &EvolveControls,
    ) -> Result<()> {
        let n = (duration / controls.dt).round().max(1.0) as usize;
        let dt = duration / n as f64;
        for _ in 0..n {
            self.advance(field, dt, controls.max_phase_per_step)?;
        }
        Ok(())
    }

    /// `M`, `‖∇u‖²`, `‖u‖^{p+1}_{p+1}`, the focusing energy and momentum.
    pub fn conserved(&self, field: &FieldState) -> FieldStats {
        conserved_with(&self.spec, field, &self.model.exps)
    }
}

/// Conserved quantities computed spectrally on the field's grid.
pub fn conserved_with(spec: &Spectral, field: &FieldState, exps: &ExponentSet) -> FieldStats {
    let mass = field.mass();
    let grad2 = spec.grad_norm_sq(field);
    let pot = lebesgue_norm(field, exps.p + 1.0).powf(exps.p + 1.0);
    FieldStats::new(mass, grad2, pot, exps.p, spec.momentum(field))
}

pub fn conserved(field: &FieldState, exps: &ExponentSet) -> Result<FieldStats> {
    Ok(conserved_with(&Spectral::new(field.grid)?, field, exps))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub stats: FieldStats,
    /// `‖∇u‖‖u‖^σ`.
    pub grad_product: f64,
    pub omega: f64,
    pub grad_ratio: f64,
    /// `‖u‖_{L^r}` with `r = p + 1`.
    pub lr_norm: f64,
    /// `∫_0^t ‖u‖^a_{L^r} dτ` (trapezoid over steps).
    pub accumulator: f64,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Event {
    BlowUpGuard {
        t: f64,
        gradient_ratio: f64,
        non_finite: bool,
    },
    ResolutionLoss {
        t: f64,
        tail_fraction: f64,
    },
    Completed {
        t: f64,
    },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::BlowUpGuard { t, .. }
            | Event::ResolutionLoss { t, .. }
            | Event::Completed { t } => t,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Event::BlowUpGuard { .. } => "BlowUpGuard",
            Event::ResolutionLoss { .. } => "ResolutionLoss",
            Event::Completed { .. } => "Completed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    GlobalInWell,
    BlowUpDetected,
    Undecided,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::GlobalInWell => "GlobalInWell",
            Classification::BlowUpDetected => "BlowUpDetected",
            Classification::Undecided => "Undecided",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub dim: usize,
    pub p: f64,
    pub grid: GridSpec,
    pub controls: EvolveControls,
    pub initial: WellStatus,
    pub checkpoints: Vec<Checkpoint>,
    pub events: Vec<Event>,
    pub classification: Classification,
    pub steps: usize,
}

impl TrajectoryRecord {
    pub fn terminal_event(&self) -> &Event {
        self.events
            .last()
            .expect("record always ends with an event")
    }

    /// Largest relative change of mass, energy and momentum norm against the
    /// first checkpoint.
    pub fn drifts(&self) -> (f64, f64, f64) {
        let s0 = &self.checkpoints[0].stats;
        let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale;
        let p_scale = s0
            .momentum_norm()
            .max(s0.mass.sqrt() * s0.grad2.sqrt())
            .max(f64::MIN_POSITIVE);
        let mut out = (0.0f64, 0.0f64, 0.0f64);
        for c in &self.checkpoints {
            out.0 = out.0.max(rel(c.stats.mass, s0.mass, s0.mass));
            out.1 = out.1.max(rel(
                c.stats.energy,
                s0.energy,
                s0.energy.abs().max(f64::MIN_POSITIVE),
            ));
            let dp: f64 = c
                .stats
                .momentum
                .iter()
                .zip(&s0.momentum)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            out.2 = out.2.max(dp / p_scale);
        }
        out
    }

    pub fn csv_header(dim: usize) -> String {
        let mut cols = vec!["t".to_string(), "mass".into(), "energy".into()];
        for a in 0..dim {
            cols.push(format!("momentum_{a}"));
        }
        cols.extend(
            [
                "grad_norm",
                "grad_product",
                "omega",
                "grad_ratio",
                "lr_norm",
                "accumulator",
                "tail_fraction",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        cols.join(",")
    }

    pub fn csv_row(c: &Checkpoint) -> String {
        let mut cols = vec![fmt(c.t), fmt(c.stats.mass), fmt(c.stats.energy)];
        cols.extend(c.stats.momentum.iter().map(|&x| fmt(x)));
        cols.extend(
            [
                c.stats.grad2.sqrt(),
                c.grad_product,
                c.omega,
                c.grad_ratio,
                c.lr_norm,
                c.accumulator,
                c.tail_fraction,
            ]
            .iter()
            .map(|&x| fmt(x)),
        );
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::csv_header(self.dim))?;
        for c in &self.checkpoints {
            writeln!(w, "{}", Self::csv_row(c))?;
        }
        Ok(())
    }
}

/// Shortest round-trip representation; stable across runs.
pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// Evolves `field` under the model, recording checkpoints and stopping at
/// the first guard. `observer` sees the field at every checkpoint.
pub fn evolve(
    stepper: &SplitStep,
    field: &mut FieldState,
    controls: &EvolveControls,
    thresholds: &Thresholds,
    mut observer: impl FnMut(&FieldState, &Checkpoint),
) -> Result<TrajectoryRecord> {
    controls.validate()?;
    let exps = &stepper.model.exps;
    let r = exps.r;
    let a = exps.a;
    let make_checkpoint = |f: &FieldState, acc: f64, tail: f64| {
        let stats = stepper.conserved(f);
        let status = well_membership(&stats, thresholds, exps);
        Checkpoint {
            t: f.time,
            grad_product: stats.scaled_gradient(exps),
            omega: status.omega,
            grad_ratio: status.grad_ratio,
            lr_norm: lebesgue_norm(f, r),
            accumulator: acc,
            tail_fraction: tail,
            stats,
        }
    };

    let t0 = field.time;
    let initial_stats = stepper.conserved(field);
    let initial = well_membership(&initial_stats, thresholds, exps);
    let grad0 = initial_stats.grad2.sqrt();
    let first = make_checkpoint(field, 0.0, stepper.spec.tail_fraction(field));
    observer(field, &first);
    let mut checkpoints = vec![first];
    let mut acc = 0.0;
    let mut prev_la = lebesgue_norm(field, r).powf(a);
    let cell = field.grid.cell_volume();
    let nsteps = controls.steps();
    let mut event = None;
    let mut steps_done = 0;

    for step in 1..=nsteps {
        let info = match stepper.advance(field, controls.dt, controls.max_phase_per_step) {
            Ok(info) => info,
            Err(Error::NonFiniteField { t }) => {
                event = Some(Event::BlowUpGuard {
                    t,
                    gradient_ratio: f64::INFINITY,
                    non_finite: true,
                });
                break;
            }
            Err(e) => return Err(e),
        };
        field.time = t0 + step as f64 * controls.dt;
        steps_done = step;
        let la = lebesgue_norm_values(&field.values, cell, r).powf(a);
        acc += 0.5 * controls.dt * (la + prev_la);
        prev_la = la;

        let ratio = if grad0 > 0.0 {
            info.grad2.sqrt() / grad0
        } else {
            0.0
        };
        let guard = if info.tail_fraction > controls.resolution_fraction {
            Some(Event::ResolutionLoss {
                t: field.time,
                tail_fraction: info.tail_fraction,
            })
        } else if grad0 > 0.0 && ratio >= controls.blowup_gradient_factor {
            Some(Event::BlowUpGuard {
                t: field.time,
                gradient_ratio: ratio,
                non_finite: false,
            })
        } else {
            None
        };
        if guard.is_some() || step % controls.checkpoint_every == 0 || step == nsteps {
            let c = make_checkpoint(field, acc, info.tail_fraction);
            observer(field, &c);
            checkpoints.push(c);
        }
        if guard.is_some() {
            event = guard;
            break;
        }
    }
    let event = event.unwrap_or(Event::Completed { t: field.time });

    let classification = match &event {
        Event::BlowUpGuard {
            non_finite: false, ..
        } => Classification::BlowUpDetected,
        Event::Completed { .. }
            if initial.verdict == Verdict::InsideWell
                && checkpoints
                    .iter()
                    .all(|c| c.omega < 1.0 && c.grad_ratio < 1.0) =>
        {
            Classification::GlobalInWell
        }
        _ => Classification::Undecided,
    };

    Ok(TrajectoryRecord {
        dim: exps.dim,
        p: exps.p,
        grid: field.grid,
        controls: *controls,
        initial,
        checkpoints,
        events: vec![event],
        classification,
        steps: steps_done,
    })
}

/// `H¹` norm `(‖u‖² + ‖∇u‖²)^{1/2}` of a coefficient vector.
fn h1_norm_coeffs(spec: &Spectral, c: &[Complex64]) -> f64 {
    (spec.sobolev_norm_coeffs(c, 0.0).powi(2) + spec.sobolev_norm_coeffs(c, 1.0).powi(2)).sqrt()
}

pub fn h1_distance(spec: &Spectral, a: &FieldState, b: &FieldState) -> f64 {
    h1_norm_coeffs(spec, &spec.forward(&a.sub(b).values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub times: Vec<f64>,
    /// `‖v(t_{i+1}) − v(t_i)‖_{H¹}` with `v(t) = e^{-itΔ}u(t)`.
    pub cauchy: Vec<f64>,
    /// `‖v(t_i) − v(t_last)‖_{H¹}`.
    pub to_last: Vec<f64>,
    pub lr_norms: Vec<f64>,
    /// Running `∫‖u‖^a_{L^r}` by the trapezoid rule over checkpoints.
    pub accumulation: Vec<f64>,
}

/// Pulls checkpoint fields back by the free flow and measures how close
/// they are to one another.
pub fn scattering_diagnostic(
    spec: &Spectral,
    fields: &[FieldState],
    exps: &ExponentSet,
) -> Result<ScatteringReport> {
    if fields.len() < 3 {
        return Err(Error::InsufficientCheckpoints {
            needed: 3,
            got: fields.len(),
        });
    }
    let pulled: Vec<Vec<Complex64>> = fields
        .iter()
        .map(|f| {
            let mut c = spec.forward(&f.values);
            for (ci, &k2) in c.iter_mut().zip(spec.ksq()) {
                *ci *= Complex64::from_polar(1.0, f.time * k2);
            }
            c
        })
        .collect();
    let diff = |a: &[Complex64], b: &[Complex64]| {
        let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        h1_norm_coeffs(spec, &d)
    };
    let cauchy = pulled.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    let last = pulled.last().unwrap();
    let to_last = pulled.iter().map(|c| diff(c, last)).collect();
    let lr_norms: Vec<f64> = fields.iter().map(|f| lebesgue_norm(f, exps.r)).collect();
    let mut accumulation = vec![0.0];
    for i in 1..fields.len() {
        let dt = fields[i].time - fields[i - 1].time;
        let inc = 0.5 * dt * (lr_norms[i].powf(exps.a) + lr_norms[i - 1].powf(exps.a));
        accumulation.push(accumulation[i - 1] + inc);
    }
    Ok(ScatteringReport {
        times: fields.iter().map(|f| f.time).collect(),
        cauchy,
        to_last,
        lr_norms,
        accumulation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveOperatorOptions {
    /// Target level `ω < 1` in `½‖∇ψ‖² M(ψ)^σ ≤ ω E(Q) M(Q)^σ`.
    pub omega: f64,
    /// Required ratio `‖e^{-iTΔ}ψ‖_{L^{p+1}} / ‖ψ‖_{L^{p+1}}`.
    pub dispersal_fraction: f64,
}

impl Default for WaveOperatorOptions {
    fn default() -> Self {
        Self {
            omega: 0.5,
            dispersal_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveOperatorReport {
    pub u0: FieldState,
    /// `‖Sol(−T)u₀ − e^{−iTΔ}ψ‖_{H¹}`.
    pub h1_error: f64,
    pub dispersal_ratio: f64,
    /// `|E(u₀) − ½‖∇ψ‖²|`.
    pub energy_gap: f64,
    pub status: WellStatus,
}

/// Approximates the data at time 0 whose solution behaves like `e^{itΔ}ψ`
/// as `t → −∞`: start from `e^{−iTΔ}ψ` at `t = −T` and run forward.
pub fn wave_operator_approx(
    stepper: &SplitStep,
    psi: &FieldState,
    horizon: f64,
    controls: &EvolveControls,
    thresholds: &Thresholds,
    opts: &WaveOperatorOptions,
) -> Result<WaveOperatorReport> {
    let exps = &stepper.model.exps;
    let psi_stats = stepper.conserved(psi);
    let free_energy = 0.5 * psi_stats.grad2;
    let lhs = free_energy * psi_stats.mass.powf(exps.sigma);
    if lhs > opts.omega * thresholds.energy {
        return Err(Error::PreconditionViolated(format!(
            "½‖∇ψ‖² M(ψ)^σ = {lhs:e} exceeds ω·E(Q)M(Q)^σ = {:e}",
            opts.omega * thresholds.energy
        )));
    }
    let mut start = stepper.spec.free_propagate(psi, -horizon);
    let psi_lr = lebesgue_norm(psi, exps.r);
    let ratio = if psi_lr > 0.0 {
        lebesgue_norm(&start, exps.r) / psi_lr
    } else {
        0.0
    };
    if ratio > opts.dispersal_fraction {
        return Err(Error::DispersalInsufficient {
            ratio,
            limit: opts.dispersal_fraction,
        });
    }
    start.time = -horizon;
    let reference = start.clone();
    let mut u = start;
    stepper.propagate(&mut u, horizon, controls)?;
    u.time = 0.0;

    // Sol(−T)u₀ through time reversal: conj ∘ Sol(T) ∘ conj
    let mut back = u.conj();
    stepper.propagate(&mut back, horizon, controls)?;
    let back = back.conj();
    let h1_error = h1_distance(&stepper.spec, &back, &reference);

    let stats = stepper.conserved(&u);
    Ok(WaveOperatorReport {
        h1_error,
        dispersal_ratio: ratio,
        energy_gap: (stats.energy - free_energy).abs(),
        status: well_membership(&stats, thresholds, exps),
        u0: u,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// `(∫‖u − ũ‖^a_{L^r} dt)^{1/a}`.
    pub difference: f64,
    /// `‖e‖` in `L^{b'}_t L^{r'}_x`.
    pub forcing_norm: f64,
    /// `‖e^{itΔ}(u₀ − ũ₀)‖` in `L^a_t L^r_x`.
    pub free_difference: f64,
    /// `forcing_norm + free_difference`.
    pub epsilon: f64,
    /// `difference / epsilon` (0 when both vanish).
    pub ratio: f64,
}

/// Runs `u` (unforced) and `ũ` (forced by the time-independent profile
/// `e`) side by side over `[0, t_end]`.
pub fn perturbation_experiment(
    stepper: &SplitStep,
    u0: &FieldState,
    ut0: &FieldState,
    forcing: Option<&FieldState>,
    controls: &EvolveControls,
) -> Result<PerturbationReport> {
    controls.validate()?;
    let exps = &stepper.model.exps;
    let (a, r) = (exps.a, exps.r);
    let cell = u0.grid.cell_volume();
    let n = controls.steps().max(1);
    let dt = controls.t_end / n as f64;

    let mut u = u0.clone();
    let mut ut = ut0.clone();
    let mut free = u0.sub(ut0);
    let free_free = Model::free(exps.clone());
    let free_stepper = SplitStep {
        spec: stepper.spec.clone(),
        model: free_free,
        tail_mask: stepper.tail_mask.clone(),
    };
    let diff_la = |x: &FieldState, y: &FieldState| {
        let d: Vec<Complex64> = x.values.iter().zip(&y.values).map(|(p, q)| p - q).collect();
        lebesgue_norm_values(&d, cell, r).powf(a)
    };
    let mut prev = diff_la(&u, &ut);
    let mut prev_free = lebesgue_norm(&free, r).powf(a);
    let mut acc = 0.0;
    let mut acc_free = 0.0;
    let e_vals = forcing.map(|e| e.values.as_slice());
    for _ in 0..n {
        stepper.advance(&mut u, dt, controls.max_phase_per_step)?;
        let m = stepper.substeps(&ut, dt, controls.max_phase_per_step);
        for _ in 0..m {
            stepper.strang_step_forced(&mut ut, dt / m as f64, e_vals);
        }
        if !ut.is_finite() {
            return Err(Error::NonFiniteField { t: ut.time });
        }
        free_stepper.strang_step(&mut free, dt);
        let cur = diff_la(&u, &ut);
        let cur_free = lebesgue_norm(&free, r).powf(a);
        acc += 0.5 * dt * (cur + prev);
        acc_free += 0.5 * dt * (cur_free + prev_free);
        prev = cur;
        prev_free = cur_free;
    }
    let r_conj = r / (r - 1.0);
    let b_conj = exps.b / (exps.b - 1.0);
    let forcing_norm = forcing.map_or(0.0, |e| {
        lebesgue_norm(e, r_conj) * controls.t_end.powf(1.0 / b_conj)
    });
    let difference = acc.powf(1.0 / a);
    let free_difference = acc_free.powf(1.0 / a);
    let epsilon = forcing_norm + free_difference;
    Ok(PerturbationReport {
        difference,
        forcing_norm,
        free_difference,
        epsilon,
        ratio: if epsilon > 0.0 {
            difference / epsilon
        } else {
            0.0
        },
    })
}

/// `e^{ix·y₀}u` with `y₀ = −P(u)/M(u)`, removing the momentum.
pub fn galilean_boost(spec: &Spectral, field: &FieldState) -> Result<FieldState> {
    let mass = field.mass();
    if mass == 0.0 {
        return Err(Error::ZeroMass);
    }
    let p = spec.momentum(field);
    let y0: Vec<f64> = p.iter().map(|pi| -pi / mass).collect();
    let grid = field.grid;
    let values = field
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = grid.coords(i);
            let phase: f64 = (0..grid.dim).map(|a| x[a] * y0[a]).sum();
            v * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(FieldState {
        grid,
        values,
        time: field.time,
    })
}

/// `λ^{N/2} Q(λ|x|)`: the mass-preserving dilation of the ground state.
pub fn dilated_ground_state(grid: GridSpec, profile: &RadialProfile, lambda: f64) -> FieldState {
    let amp = lambda.powf(grid.dim as f64 / 2.0);
    FieldState::from_fn(grid, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        Complex64::new(amp * profile.eval(lambda * r).0, 0.0)
    })
}

/// `λ^{2/(p-1)} Q(λ|x|)`: the scaling that leaves the equation invariant.
pub fn natural_scaled_ground_state(
    grid: GridSpec,
    profile: &RadialProfile,
    lambda: f64,
) -> FieldState {
    let amp = lambda.powf(2.0 / (profile.p - 1.0));
    FieldState::from_fn(grid, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        Complex64::new(amp * profile.eval(lambda * r).0, 0.0)
    })
}

/// `amp · e^{-|x|²/w²} e^{ik·x}`.
pub fn gaussian(grid: GridSpec, amp: f64, width: f64, k: [f64; 3]) -> FieldState {
    FieldState::from_fn(grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
        Complex64::from_polar(amp * (-r2 / (width * width)).exp(), phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params_well::derive_exponents;

    fn setup(n: usize, l: f64, coupling: f64) -> SplitStep {
        let exps = derive_exponents(1, 7.0).unwrap();
        let grid = GridSpec::new(1, l, n).unwrap();
        SplitStep::new(grid, Model { exps, coupling }).unwrap()
    }

    #[test]
    fn controls_validation() {
        let mut c = EvolveControls::default();
        assert!(c.validate().is_ok());
        c.blowup_gradient_factor = 1.0;
        assert!(c.validate().is_err());
        c = EvolveControls {
            resolution_fraction: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c = EvolveControls {
            dt: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_field_stays_zero() {
        let s = setup(64, 5.0, 1.0);
        let mut f = FieldState::zeros(s.spec.grid);
        s.strang_step(&mut f, 0.01);
        assert!(f.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn free_model_matches_propagator() {
        let s = setup(128, 8.0, 0.0);
        let f = gaussian(s.spec.grid, 1.0, 1.0, [0.7, 0.0, 0.0]);
        let mut g = f.clone();
        s.strang_step(&mut g, 0.05);
        let h = s.spec.free_propagate(&f, 0.05);
        let err = g
            .values
            .iter()
            .zip(&h.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn momentum_of_modulated_real_field() {
        let s = setup(256, 10.0, 1.0);
        let f = gaussian(s.spec.grid, 1.0, 1.5, [1.25, 0.0, 0.0]);
        let st = s.conserved(&f);
        assert!((st.momentum[0] - 1.25 * st.mass).abs() < 1e-10 * st.mass);
        let even = gaussian(s.spec.grid, 1.0, 1.5, [0.0; 3]);
        assert!(s.conserved(&even).momentum[0].abs() < 1e-12);
    }

    #[test]
    fn boost_removes_momentum() {
        let s = setup(256, 10.0, 1.0);
        let f = gaussian(s.spec.grid, 0.8, 1.2, [0.9, 0.0, 0.0]);
        let b = galilean_boost(&s.spec, &f).unwrap();
        let (sf, sb) = (s.conserved(&f), s.conserved(&b));
        assert!(sb.momentum[0].abs() < 1e-10);
        assert!((sf.grad2 - sb.grad2 - sf.momentum[0].powi(2) / sf.mass).abs() < 1e-10);
        assert!((sf.mass - sb.mass).abs() < 1e-12 * sf.mass);
        assert!(matches!(
            galilean_boost(&s.spec, &FieldState::zeros(s.spec.grid)),
            Err(Error::ZeroMass)
        ));
    }

    #[test]
    fn evolve_records_single_terminal_event() {
        let s = setup(128, 10.0, 1.0);
        let mut f = gaussian(s.spec.grid, 0.2, 1.0, [0.0; 3]);
        let thr = Thresholds {
            energy: 1.0,
            grad: 1.0,
        };
        let controls = EvolveControls {
            dt: 1e-2,
            t_end: 0.5,
            checkpoint_every: 7,
            ..Default::default()
        };
        let rec = evolve(&s, &mut f, &controls, &thr, |_, _| {}).unwrap();
        assert_eq!(rec.events.len(), 1);
        assert!(matches!(rec.terminal_event(), Event::Completed { .. }));
        for w in rec.checkpoints.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        assert!((rec.checkpoints.last().unwrap().t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn csv_has_one_row_per_checkpoint() {
        let s = setup(64, 8.0, 1.0);
        let mut f = gaussian(s.spec.grid, 0.2, 1.0, [0.0; 3]);
        let thr = Thresholds {
            energy: 1.0,
            grad: 1.0,
        };
        let controls = EvolveControls {
            dt: 1e-2,
            t_end: 0.1,
            checkpoint_every: 5,
            ..Default::default()
        };
        let rec = evolve(&s, &mut f, &controls, &thr, |_, _| {}).unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), rec.checkpoints.len() + 1);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 11);
    }
}
