//! Periodic-box Fourier kernel.
//!
//! Grid nodes sit at `x_j = -L + j·dx`, `dx = 2L/n`, so the origin is node
//! `n/2` on every axis. Samples are stored with axis 0 slowest:
//! `index = (i0·n + i1)·n + i2`.
//!
//! Fourier coefficients are normalised as `c_k = DFT(u)_k / n^N`, which makes
//! Plancherel read `∫|u|² = V Σ|c_k|²` with `V = (2L)^N`. The angular
//! frequency of index `k` is `ξ = (π/L)·k̃` with `k̃` the signed index.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params_well::ExponentSet;
use crate::quadrature::{simpson, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    /// Box half-width `L`.
    pub extent: f64,
    /// Samples per axis.
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        let g = Self {
            dim,
            extent,
            points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {} not in 1..=3",
                self.dim
            )));
        }
        if self.points < 8 || !self.points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two ≥ 8, got {}",
                self.points
            )));
        }
        if !(self.extent.is_finite() && self.extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "extent must be positive, got {}",
                self.extent
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.extent).powi(self.dim as i32)
    }

    /// Coordinate of node `j` along one axis.
    pub fn axis_coord(&self, j: usize) -> f64 {
        -self.extent + j as f64 * self.spacing()
    }

    /// Angular frequency of DFT index `k` along one axis (Nyquist negative).
    pub fn axis_freq(&self, k: usize) -> f64 {
        let n = self.points as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        std::f64::consts::PI / self.extent * signed as f64
    }

    /// Largest resolved angular frequency `π n / (2L)`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.points as f64 / (2.0 * self.extent)
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.points;
        let mut out = [0; 3];
        let mut rest = idx;
        for a in (0..self.dim).rev() {
            out[a] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flatten(&self, ix: [usize; 3]) -> usize {
        let mut idx = 0;
        for &i in ix.iter().take(self.dim) {
            idx = idx * self.points + i;
        }
        idx
    }

    /// Coordinates of a flat index (unused axes are 0).
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let ix = self.unflatten(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.axis_coord(ix[a]);
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.coords(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Flat index of the node at the origin.
    pub fn origin_index(&self) -> usize {
        self.flatten([self.points / 2; 3])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl FieldState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            time: 0.0,
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>, time: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(_) = values
            .iter()
            .find(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFiniteField { t: time });
        }
        Ok(Self { grid, values, time })
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self {
            grid,
            values,
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            time: self.time,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            time: self.time,
        }
    }

    /// `∫|u|²` by the rectangle rule (exact for trigonometric polynomials).
    pub fn mass(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// FFT plans and frequency tables for one grid.
#[derive(Clone)]
pub struct Spectral {
    pub grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed angular frequency per axis index.
    xi: Vec<f64>,
    /// Same with the Nyquist entry zeroed (first-derivative symbol).
    xi_odd: Vec<f64>,
    /// `|ξ|²` per flat index.
    ksq: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("grid", &self.grid)
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let mut planner = FftPlanner::new();
        let n = grid.points;
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let xi: Vec<f64> = (0..n).map(|k| grid.axis_freq(k)).collect();
        let mut xi_odd = xi.clone();
        xi_odd[n / 2] = 0.0;
        let ksq = (0..grid.len())
            .map(|i| {
                let ix = grid.unflatten(i);
                (0..grid.dim).map(|a| xi[ix[a]] * xi[ix[a]]).sum()
            })
            .collect();
        Ok(Self {
            grid,
            fwd,
            inv,
            xi,
            xi_odd,
            ksq,
        })
    }

    pub fn ksq(&self) -> &[f64] {
        &self.ksq
    }

    /// `|ξ|` at a flat Fourier index.
    pub fn freq_norm(&self, idx: usize) -> f64 {
        self.ksq[idx].sqrt()
    }

    /// First-derivative symbol along `axis` at a flat Fourier index.
    pub fn deriv_symbol(&self, axis: usize, idx: usize) -> f64 {
        self.xi_odd[self.grid.unflatten(idx)[axis]]
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points;
        let dim = self.grid.dim;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // last axis is contiguous
        plan.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..dim.saturating_sub(1) {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }

    /// Normalised Fourier coefficients `c_k`.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut c = values.to_vec();
        self.forward_in_place(&mut c);
        c
    }

    pub fn forward_in_place(&self, c: &mut [Complex64]) {
        self.transform(c, &self.fwd);
        let s = 1.0 / self.grid.len() as f64;
        for v in c.iter_mut() {
            *v *= s;
        }
    }

    /// Inverse of [`forward`](Self::forward).
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut u = coeffs.to_vec();
        self.inverse_in_place(&mut u);
        u
    }

    pub fn inverse_in_place(&self, u: &mut [Complex64]) {
        self.transform(u, &self.inv);
    }

    /// Applies the real Fourier multiplier `m(idx)` to the field values.
    pub fn apply_multiplier(&self, values: &mut [Complex64], m: impl Fn(usize) -> Complex64) {
        self.forward_in_place(values);
        for (i, v) in values.iter_mut().enumerate() {
            *v *= m(i);
        }
        self.inverse_in_place(values);
    }

    /// `(Σ|ξ|^{2s}|c|² V)^{1/2}`; the zero mode counts only at `s = 0`.
    pub fn sobolev_norm_coeffs(&self, coeffs: &[Complex64], s: f64) -> f64 {
        let v = self.grid.volume();
        let sum: f64 = coeffs
            .iter()
            .zip(&self.ksq)
            .map(|(c, &k2)| {
                let w = if s == 0.0 { 1.0 } else { k2.powf(s) };
                w * c.norm_sqr()
            })
            .sum();
        (v * sum).sqrt()
    }

    pub fn sobolev_norm(&self, field: &FieldState, s: f64) -> f64 {
        self.sobolev_norm_coeffs(&self.forward(&field.values), s)
    }

    /// `‖∇u‖²` spectrally.
    pub fn grad_norm_sq(&self, field: &FieldState) -> f64 {
        self.sobolev_norm(field, 1.0).powi(2)
    }

    /// Spectral gradient, one array per axis.
    pub fn gradient(&self, field: &FieldState) -> Vec<Vec<Complex64>> {
        let c = self.forward(&field.values);
        (0..self.grid.dim)
            .map(|axis| {
                let mut d: Vec<Complex64> = c
                    .iter()
                    .enumerate()
                    .map(|(i, &ci)| ci * Complex64::new(0.0, self.deriv_symbol(axis, i)))
                    .collect();
                self.inverse_in_place(&mut d);
                d
            })
            .collect()
    }

    /// Momentum `P = Im ∫ ū ∇u` from the coefficients: `V Σ ξ |c|²`.
    pub fn momentum(&self, field: &FieldState) -> Vec<f64> {
        let c = self.forward(&field.values);
        let v = self.grid.volume();
        (0..self.grid.dim)
            .map(|axis| {
                v * c
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| self.deriv_symbol(axis, i) * ci.norm_sqr())
                    .sum::<f64>()
            })
            .collect()
    }

    /// `e^{itΔ}u`: multiplies `c_k` by `e^{-it|ξ|²}`.
    pub fn free_propagate(&self, field: &FieldState, t: f64) -> FieldState {
        let mut out = field.clone();
        self.free_propagate_in_place(&mut out, t);
        out
    }

    pub fn free_propagate_in_place(&self, field: &mut FieldState, t: f64) {
        if t != 0.0 {
            self.apply_multiplier(&mut field.values, |i| {
                Complex64::from_polar(1.0, -t * self.ksq[i])
            });
        }
        field.time += t;
    }

    /// Fraction of `Σ(1+|ξ|²)|c|²` carried by modes with
    /// `|ξ_a| > (2/3)·nyquist` on some axis.
    pub fn tail_fraction(&self, field: &FieldState) -> f64 {
        let c = self.forward(&field.values);
        let cut = 2.0 / 3.0 * self.grid.nyquist();
        let mut total = 0.0;
        let mut tail = 0.0;
        for (i, ci) in c.iter().enumerate() {
            let e = (1.0 + self.ksq[i]) * ci.norm_sqr();
            total += e;
            let ix = self.grid.unflatten(i);
            if (0..self.grid.dim).any(|a| self.xi[ix[a]].abs() > cut) {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

/// `(Σ|u|^q dx^N)^{1/q}`, or the max modulus for `q = ∞`.
pub fn lebesgue_norm(field: &FieldState, q: f64) -> f64 {
    lebesgue_norm_values(&field.values, field.grid.cell_volume(), q)
}

pub fn lebesgue_norm_values(values: &[Complex64], cell: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let sum: f64 = values.iter().map(|v| v.norm().powf(q)).sum();
    (cell * sum).powf(1.0 / q)
}

/// Homogeneous Sobolev norm (plans a transform for this call).
pub fn sobolev_norm(field: &FieldState, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "Sobolev index {s} outside [0, 1]"
        )));
    }
    Ok(Spectral::new(field.grid)?.sobolev_norm(field, s))
}

pub fn free_propagate(field: &FieldState, t: f64) -> Result<FieldState> {
    Ok(Spectral::new(field.grid)?.free_propagate(field, t))
}

/// The bump `ζ(ρ)`: 1 on `ρ ≤ 1`, 0 on `ρ ≥ 2`, smooth monotone between.
pub fn zeta(rho: f64) -> f64 {
    if rho <= 1.0 {
        1.0
    } else if rho >= 2.0 {
        0.0
    } else {
        let a = (-1.0 / (2.0 - rho)).exp();
        let b = (-1.0 / (rho - 1.0)).exp();
        a / (a + b)
    }
}

/// Derivative of [`zeta`].
pub fn zeta_prime(rho: f64) -> f64 {
    if rho <= 1.0 || rho >= 2.0 {
        return 0.0;
    }
    let a = (-1.0 / (2.0 - rho)).exp();
    let b = (-1.0 / (rho - 1.0)).exp();
    let da = -a / (2.0 - rho).powi(2);
    let db = b / (rho - 1.0).powi(2);
    (da * b - a * db) / (a + b).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    /// Cutoff scale `r`: multiplier is `ζ(|ξ|/r)`.
    pub r: f64,
}

impl CutoffProfile {
    pub fn multiplier(&self, xi_norm: f64) -> f64 {
        zeta(xi_norm / self.r)
    }
}

/// `χ_r ⋆ u` as the multiplier `ζ(ξ/r)`.
pub fn cutoff_apply(
    spec: &Spectral,
    field: &FieldState,
    profile: &CutoffProfile,
) -> Result<FieldState> {
    if !(profile.r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff scale must be positive, got {}",
            profile.r
        )));
    }
    let mut out = field.clone();
    spec.apply_multiplier(&mut out.values, |i| {
        Complex64::new(profile.multiplier(spec.freq_norm(i)), 0.0)
    });
    Ok(out)
}

/// `κ = (∫_{|ξ|<2} |ξ|^{-2Λ} dξ)^{1/2}` by radial quadrature.
///
/// With `β = N - 1 - 2Λ > -1` the radial integrand `ρ^β` is singular at 0
/// when `β < 0`; the substitution `ρ = 2 s^k` makes it `C³` before Simpson.
pub fn kappa(dim: usize, lambda: f64) -> Result<f64> {
    let beta = dim as f64 - 1.0 - 2.0 * lambda;
    if beta <= -1.0 {
        return Err(Error::PreconditionViolated(format!(
            "Λ = {lambda} ≥ N/2: |ξ|^(-2Λ) not integrable"
        )));
    }
    let k = (4.0 / (beta + 1.0)).ceil().max(1.0);
    let n = 4096;
    let h = 1.0 / n as f64;
    let vals: Vec<f64> = (0..=n)
        .map(|i| {
            let s = i as f64 * h;
            if s == 0.0 {
                0.0
            } else {
                2f64.powf(beta + 1.0) * k * s.powf(k * (beta + 1.0) - 1.0)
            }
        })
        .collect();
    Ok((sphere_area(dim) * simpson(&vals, h)).sqrt())
}

/// Closed form of [`kappa`] used as its oracle.
pub fn kappa_closed_form(dim: usize, lambda: f64) -> f64 {
    let beta = dim as f64 - 1.0 - 2.0 * lambda;
    (sphere_area(dim) * 2f64.powf(beta + 1.0) / (beta + 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffInequalities {
    /// `‖χ_r⋆u‖_{Ḣ^λ}` vs `‖u‖_{Ḣ^λ}`.
    pub contraction: (f64, f64),
    /// `‖u − χ_r⋆u‖_{Ḣ^λ}` vs `r^{-(1-λ)}‖∇u‖`.
    pub remainder: (f64, f64),
}

impl CutoffInequalities {
    pub fn hold(&self, slack: f64) -> bool {
        self.contraction.0 <= self.contraction.1 * (1.0 + slack) + slack
            && self.remainder.0 <= self.remainder.1 * (1.0 + slack) + slack
    }
}

/// Both sides of the contraction and remainder estimates at index `λ`.
pub fn cutoff_inequalities(
    spec: &Spectral,
    field: &FieldState,
    profile: &CutoffProfile,
    lambda: f64,
) -> Result<CutoffInequalities> {
    let c = spec.forward(&field.values);
    let cut: Vec<Complex64> = c
        .iter()
        .enumerate()
        .map(|(i, &ci)| ci * profile.multiplier(spec.freq_norm(i)))
        .collect();
    let rest: Vec<Complex64> = c.iter().zip(&cut).map(|(a, b)| a - b).collect();
    Ok(CutoffInequalities {
        contraction: (
            spec.sobolev_norm_coeffs(&cut, lambda),
            spec.sobolev_norm_coeffs(&c, lambda),
        ),
        remainder: (
            spec.sobolev_norm_coeffs(&rest, lambda),
            profile.r.powf(-(1.0 - lambda)) * spec.sobolev_norm_coeffs(&c, 1.0),
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseBound {
    /// `|(χ_r⋆u)(0)|`.
    pub lhs: f64,
    /// `κ r^{(N-2Λ)/2} ‖u‖_{Ḣ^Λ}`.
    pub rhs: f64,
    pub kappa: f64,
    pub lambda_index: f64,
}

impl PointwiseBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-300
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Value of the cut-off field at the origin against its Ḣ^Λ bound,
/// `Λ = N(p-1)/(2(p+1))`.
pub fn cutoff_pointwise_bound(
    spec: &Spectral,
    field: &FieldState,
    profile: &CutoffProfile,
    exps: &ExponentSet,
) -> Result<PointwiseBound> {
    let lam = exps.cutoff_index();
    let dim = spec.grid.dim;
    if lam >= dim as f64 / 2.0 {
        return Err(Error::PreconditionViolated(format!("Λ = {lam} ≥ N/2")));
    }
    let cut = cutoff_apply(spec, field, profile)?;
    let lhs = cut.values[spec.grid.origin_index()].norm();
    let k = kappa(dim, lam)?;
    let rhs = k * profile.r.powf((dim as f64 - 2.0 * lam) / 2.0) * spec.sobolev_norm(field, lam);
    Ok(PointwiseBound {
        lhs,
        rhs,
        kappa: k,
        lambda_index: lam,
    })
}

/// Random trigonometric polynomial with modes `0 < |ξ| ≤ band`, amplitudes
/// decaying like `(1+|ξ|²)^{-1}`. The zero mode is left empty: the Ḣ^s
/// seminorms on the torus cannot see it.
pub fn random_band_limited<R: Rng + ?Sized>(
    grid: GridSpec,
    band: f64,
    rng: &mut R,
) -> Result<FieldState> {
    let spec = Spectral::new(grid)?;
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, ci) in c.iter_mut().enumerate() {
        let k = spec.freq_norm(i);
        if k > 0.0 && k <= band {
            let amp = 1.0 / (1.0 + k * k);
            *ci = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * amp;
        }
    }
    let values = spec.inverse(&c);
    Ok(FieldState {
        grid,
        values,
        time: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussian_1d(l: f64, n: usize) -> FieldState {
        let g = GridSpec::new(1, l, n).unwrap();
        FieldState::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0))
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(4, 1.0, 16).is_err());
        assert!(GridSpec::new(1, 1.0, 12).is_err());
        assert!(GridSpec::new(1, 1.0, 4).is_err());
        assert!(GridSpec::new(1, -1.0, 16).is_err());
        let g = GridSpec::new(2, 3.0, 16).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.coords(g.origin_index()), [0.0, 0.0, 0.0]);
        assert_eq!(g.flatten(g.unflatten(77)), 77);
    }

    #[test]
    fn round_trip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..=3 {
            let g = GridSpec::new(dim, 4.0, 16).unwrap();
            let spec = Spectral::new(g).unwrap();
            let u: Vec<Complex64> = (0..g.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let back = spec.inverse(&spec.forward(&u));
            let err = u
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-13, "dim {dim}: {err}");
        }
    }

    #[test]
    fn gaussian_l2_norm() {
        let f = gaussian_1d(10.0, 256);
        let expect = (std::f64::consts::PI / 2.0).powf(0.25);
        assert!((lebesgue_norm(&f, 2.0) - expect).abs() < 1e-8);
        assert!((lebesgue_norm(&f, f64::INFINITY) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_field_norm() {
        let g = GridSpec::new(2, 1.5, 8).unwrap();
        let f = FieldState::from_fn(g, |_| Complex64::new(0.0, 2.0));
        assert!((lebesgue_norm(&f, 2.0) - 2.0 * g.volume().sqrt()).abs() < 1e-12);
        let z = FieldState::zeros(g);
        for q in [1.0, 2.0, 5.5, f64::INFINITY] {
            assert_eq!(lebesgue_norm(&z, q), 0.0);
        }
    }

    #[test]
    fn single_mode_sobolev() {
        let g = GridSpec::new(2, std::f64::consts::PI, 16).unwrap();
        let spec = Spectral::new(g).unwrap();
        let f = FieldState::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * x[1]));
        let l2 = lebesgue_norm(&f, 2.0);
        for s in [0.0, 0.3, 0.5, 1.0] {
            let expect = 13f64.powf(s / 2.0) * l2;
            assert!((spec.sobolev_norm(&f, s) - expect).abs() < 1e-11 * expect);
        }
    }

    #[test]
    fn zeta_shape() {
        assert_eq!(zeta(0.5), 1.0);
        assert_eq!(zeta(1.0), 1.0);
        assert_eq!(zeta(2.0), 0.0);
        assert!((zeta(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let z = zeta(1.0 + i as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&z) && z <= prev);
            prev = z;
        }
        let h = 1e-6;
        for rho in [1.2, 1.5, 1.8] {
            let fd = (zeta(rho + h) - zeta(rho - h)) / (2.0 * h);
            assert!((fd - zeta_prime(rho)).abs() < 1e-7);
        }
    }

    #[test]
    fn kappa_matches_closed_form() {
        for (dim, lam) in [(1, 0.375), (2, 0.6666), (3, 0.75), (3, 1.4), (1, 0.49)] {
            let q = kappa(dim, lam).unwrap();
            let c = kappa_closed_form(dim, lam);
            assert!((q - c).abs() < 1e-9 * c, "N={dim}, Λ={lam}: {q} vs {c}");
        }
        assert!(kappa(1, 0.5).is_err());
    }

    #[test]
    fn propagator_semigroup() {
        let f = gaussian_1d(8.0, 128);
        let spec = Spectral::new(f.grid).unwrap();
        let a = spec.free_propagate(&spec.free_propagate(&f, 0.3), 0.45);
        let b = spec.free_propagate(&f, 0.75);
        let err = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!((a.time - 0.75).abs() < 1e-15);
    }
}
