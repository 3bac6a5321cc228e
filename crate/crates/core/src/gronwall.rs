//! A Gronwall-type inequality in Lebesgue norms.
//!
//! For `1 ≤ β < γ ≤ ∞` and `1/ρ = 1/β − 1/γ`: if
//! `‖φ‖_{L^γ(0,t)} ≤ η + ‖fφ‖_{L^β(0,t)}` for all `t`, then
//! `‖φ‖_{L^γ(0,t)} ≤ η Φ(‖f‖_{L^ρ(0,t)})` with `Φ(s) = 2Γ(3+2s)`.
//!
//! Sampled functions are read as their piecewise-linear interpolants on a
//! uniform grid; integrals of powers are taken cell by cell with Simpson's
//! rule. All weights are positive, so Hölder's inequality holds exactly for
//! the discrete norms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Φ(s) = 2Γ(3+2s)`.
pub fn phi_big(s: f64) -> f64 {
    2.0 * libm::tgamma(3.0 + 2.0 * s)
}

/// `ρ` from `1/ρ = 1/β − 1/γ` (`γ = ∞` gives `ρ = β`).
pub fn rho_of(beta: f64, gamma: f64) -> Result<f64> {
    if !(beta >= 1.0 && gamma > beta) {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ β < γ, got β={beta}, γ={gamma}"
        )));
    }
    Ok(if gamma.is_infinite() {
        beta
    } else {
        1.0 / (1.0 / beta - 1.0 / gamma)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallInstance {
    pub beta: f64,
    /// `f64::INFINITY` for the sup norm.
    pub gamma: f64,
    pub horizon: f64,
    /// Samples of `f` at `t_i = i·T/n`, `i = 0..=n`.
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
    pub eta: f64,
}

impl GronwallInstance {
    pub fn rho(&self) -> Result<f64> {
        rho_of(self.beta, self.gamma)
    }

    pub fn step(&self) -> f64 {
        self.horizon / (self.f.len() - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        self.rho()?;
        if self.f.len() < 2 || self.f.len() != self.phi.len() {
            return Err(Error::InvalidArgument(
                "f and φ need equal length ≥ 2".into(),
            ));
        }
        if !(self.horizon > 0.0) || !(self.eta >= 0.0) {
            return Err(Error::InvalidArgument(
                "horizon must be positive and η ≥ 0".into(),
            ));
        }
        if self
            .f
            .iter()
            .chain(&self.phi)
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidArgument(
                "samples must be finite and ≥ 0".into(),
            ));
        }
        Ok(())
    }
}

/// `∫_{a}^{b} g^q` for the linear interpolant through `(0, g0)`, `(1, g1)`
/// on a cell of width `h`, with `0 ≤ a ≤ b ≤ 1` in local coordinates.
fn cell_power(g0: f64, g1: f64, a: f64, b: f64, q: f64, h: f64) -> f64 {
    let lin = |s: f64| g0 + (g1 - g0) * s;
    let m = 0.5 * (a + b);
    (b - a) * h / 6.0 * (lin(a).powf(q) + 4.0 * lin(m).powf(q) + lin(b).powf(q))
}

/// `∫ (fφ)^q` over one cell, products of the two interpolants.
fn cell_product_power(f0: f64, f1: f64, p0: f64, p1: f64, q: f64, h: f64) -> f64 {
    let fm = 0.5 * (f0 + f1);
    let pm = 0.5 * (p0 + p1);
    h / 6.0 * ((f0 * p0).powf(q) + 4.0 * (fm * pm).powf(q) + (f1 * p1).powf(q))
}

/// `‖g‖_{L^q(0, t_i)}` for every grid time `t_i` (entry 0 is 0).
pub fn prefix_norms(g: &[f64], h: f64, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.len());
    out.push(0.0);
    if q.is_infinite() {
        let mut m = g[0];
        for &v in &g[1..] {
            m = m.max(v);
            out.push(m);
        }
        return out;
    }
    let mut acc = 0.0;
    for w in g.windows(2) {
        acc += cell_power(w[0], w[1], 0.0, 1.0, q, h);
        out.push(acc.powf(1.0 / q));
    }
    out
}

/// `‖fφ‖_{L^q(0, t_i)}` for every grid time.
pub fn prefix_product_norms(f: &[f64], phi: &[f64], h: f64, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    out.push(0.0);
    let mut acc = 0.0;
    for i in 1..f.len() {
        acc += cell_product_power(f[i - 1], f[i], phi[i - 1], phi[i], q, h);
        out.push(acc.powf(1.0 / q));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// `τ_0 = 0 < τ_1 < … < τ_ℓ = T`.
    pub breakpoints: Vec<f64>,
    /// `‖f‖^ρ_{L^ρ(τ_{k−1}, τ_k)}` per piece.
    pub piece_powers: Vec<f64>,
    /// `‖f‖_{L^ρ(0,T)}`.
    pub total_norm: f64,
}

impl Partition {
    pub fn pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Largest piece count the construction can produce: every piece but
    /// the last carries `2^{-ρ}` of `‖f‖^ρ`, so `ℓ ≤ (2‖f‖)^ρ + 1`.
    pub fn piece_bound(&self, rho: f64) -> f64 {
        (2.0 * self.total_norm).powf(rho) + 1.0
    }
}

/// Splits `[0, T]` so that `‖f‖_{L^ρ} = 1/2` on every piece but the last,
/// which carries at most `1/2`.
pub fn partition(f: &[f64], rho: f64, horizon: f64) -> Result<Partition> {
    if f.len() < 2 || !(rho >= 1.0 && rho.is_finite()) || !(horizon > 0.0) {
        return Err(Error::InvalidArgument(
            "partition needs ≥ 2 samples, 1 ≤ ρ < ∞, T > 0".into(),
        ));
    }
    let h = horizon / (f.len() - 1) as f64;
    let quota = 0.5f64.powf(rho);
    let mut breakpoints = vec![0.0];
    let mut piece_powers = Vec::new();
    let mut current = 0.0;
    let mut total = 0.0;
    for i in 0..f.len() - 1 {
        let (g0, g1) = (f[i], f[i + 1]);
        let mut a = 0.0;
        loop {
            let rest = cell_power(g0, g1, a, 1.0, rho, h);
            if current + rest < quota {
                current += rest;
                total += rest;
                break;
            }
            // the partial integral is increasing in the right endpoint
            let need = quota - current;
            let (mut lo, mut hi) = (a, 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cell_power(g0, g1, a, mid, rho, h) < need {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
            }
            let piece = cell_power(g0, g1, a, hi, rho, h);
            total += piece;
            piece_powers.push(current + piece);
            breakpoints.push((i as f64 + hi) * h);
            current = 0.0;
            a = hi;
            if a >= 1.0 {
                break;
            }
        }
    }
    let last = *breakpoints.last().unwrap();
    if horizon - last > 1e-12 * horizon {
        breakpoints.push(horizon);
        piece_powers.push(current);
    } else {
        *breakpoints.last_mut().unwrap() = horizon;
    }
    Ok(Partition {
        breakpoints,
        piece_powers,
        total_norm: total.powf(1.0 / rho),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    /// `min_t (η + ‖fφ‖_β − ‖φ‖_γ)`.
    pub hypothesis_margin: f64,
    /// `min_t (ηΦ(‖f‖_{L^ρ(0,t)}) − ‖φ‖_γ)`.
    pub conclusion_margin: f64,
    /// Time of the smallest conclusion margin.
    pub worst_time: f64,
    /// `max_t ‖φ‖_γ / (ηΦ(‖f‖_ρ))`, 0 where both vanish.
    pub worst_ratio: f64,
    pub conclusion_holds: bool,
    pub f_norm: f64,
}

/// Checks the hypothesis at every grid time and, when it holds throughout,
/// measures the conclusion.
pub fn verify_instance(inst: &GronwallInstance) -> Result<GronwallReport> {
    inst.validate()?;
    let rho = inst.rho()?;
    let h = inst.step();
    let phi_n = prefix_norms(&inst.phi, h, inst.gamma);
    let fphi_n = prefix_product_norms(&inst.f, &inst.phi, h, inst.beta);
    let f_n = prefix_norms(&inst.f, h, rho);

    let mut hyp_margin = f64::INFINITY;
    for i in 1..phi_n.len() {
        let rhs = inst.eta + fphi_n[i];
        let margin = rhs - phi_n[i];
        if margin < -1e-12 * rhs.max(1e-300) {
            return Err(Error::HypothesisFails {
                t: i as f64 * h,
                margin,
            });
        }
        hyp_margin = hyp_margin.min(margin);
    }
    let mut margin = f64::INFINITY;
    let mut worst_time = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for i in 1..phi_n.len() {
        let bound = inst.eta * phi_big(f_n[i]);
        let m = bound - phi_n[i];
        if m < margin {
            margin = m;
            worst_time = i as f64 * h;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(phi_n[i] / bound);
        } else if phi_n[i] > 0.0 {
            worst_ratio = f64::INFINITY;
        }
    }
    Ok(GronwallReport {
        hypothesis_margin: hyp_margin,
        conclusion_margin: margin,
        worst_time,
        worst_ratio,
        conclusion_holds: worst_ratio <= 1.0,
        f_norm: *f_n.last().unwrap(),
    })
}

/// Settings for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSampler {
    pub intervals: usize,
    /// Range of `‖f‖_{L^ρ(0,T)}`.
    pub f_norm: (f64, f64),
    /// Probability of `γ = ∞`.
    pub sup_norm_share: f64,
}

impl Default for InstanceSampler {
    fn default() -> Self {
        Self {
            intervals: 400,
            f_norm: (0.05, 3.0),
            sup_norm_share: 0.2,
        }
    }
}

fn random_profile<R: Rng + ?Sized>(rng: &mut R, horizon: f64, n: usize, floor: f64) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64)> = (0..rng.random_range(1..=4))
        .map(|_| {
            (
                rng.random_range(0.0..horizon),
                rng.random_range(0.05..0.5) * horizon,
                rng.random_range(0.1..2.0),
            )
        })
        .collect();
    (0..=n)
        .map(|i| {
            let t = i as f64 * horizon / n as f64;
            floor
                + bumps
                    .iter()
                    .map(|&(c, w, a)| a * (-((t - c) / w).powi(2)).exp())
                    .sum::<f64>()
        })
        .collect()
}

/// Draws `β, γ, T, f, φ`, then takes the smallest `η` for which the
/// hypothesis holds on the grid.
///
/// Draws are rejected until every grid cell carries `‖f‖_{L^ρ} < 1/2`:
/// coarser sampling hides the short-time regime where the hypothesis forces
/// `η > 0`, and the grid could no longer place the partition breakpoints.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    sampler: &InstanceSampler,
) -> GronwallInstance {
    loop {
        if let Some(inst) = draw_instance(rng, sampler) {
            return inst;
        }
    }
}

fn draw_instance<R: Rng + ?Sized>(
    rng: &mut R,
    sampler: &InstanceSampler,
) -> Option<GronwallInstance> {
    let beta = rng.random_range(1.0..4.0);
    let gamma = if rng.random_bool(sampler.sup_norm_share) {
        f64::INFINITY
    } else {
        beta + rng.random_range(0.5..6.0)
    };
    let rho = rho_of(beta, gamma).expect("β < γ by construction");
    let horizon = rng.random_range(0.5..3.0);
    let n = sampler.intervals;
    let h = horizon / n as f64;
    let f_floor = rng.random_range(0.0..0.3);
    let mut f = random_profile(rng, horizon, n, f_floor);
    let target = rng.random_range(sampler.f_norm.0..sampler.f_norm.1);
    let norm = *prefix_norms(&f, h, rho).last().unwrap();
    for v in &mut f {
        *v *= target / norm;
    }
    let quota = 0.5f64.powf(rho);
    if f.windows(2)
        .any(|w| cell_power(w[0], w[1], 0.0, 1.0, rho, h) >= quota)
    {
        return None;
    }
    let phi_floor = rng.random_range(0.05..1.0);
    let phi = random_profile(rng, horizon, n, phi_floor);
    let phi_n = prefix_norms(&phi, h, gamma);
    let fphi_n = prefix_product_norms(&f, &phi, h, beta);
    let eta = phi_n
        .iter()
        .zip(&fphi_n)
        .skip(1)
        .map(|(a, b)| a - b)
        .fold(0.0, f64::max);
    Some(GronwallInstance {
        beta,
        gamma,
        horizon,
        f,
        phi,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn phi_spot_values() {
        assert!((phi_big(0.0) - 4.0).abs() < 1e-12 * 4.0);
        assert!((phi_big(0.5) - 12.0).abs() < 1e-12 * 12.0);
        assert!((phi_big(1.0) - 48.0).abs() < 1e-12 * 48.0);
    }

    #[test]
    fn phi_increasing_log_convex() {
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.05).collect();
        let logs: Vec<f64> = xs.iter().map(|&s| phi_big(s).ln()).collect();
        for w in logs.windows(3) {
            assert!(w[1] > w[0]);
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-12);
        }
    }

    #[test]
    fn zero_weight_single_piece() {
        let p = partition(&[0.0; 11], 2.0, 1.0).unwrap();
        assert_eq!(p.breakpoints, vec![0.0, 1.0]);
    }

    #[test]
    fn constant_weight_equal_pieces() {
        let c = 3.0;
        let rho = 1.5;
        let p = partition(&vec![c; 1001], rho, 2.0).unwrap();
        let len = (1.0 / (2.0 * c)).powf(rho);
        for w in p.breakpoints.windows(2).take(p.pieces() - 1) {
            assert!(((w[1] - w[0]) - len).abs() < 1e-10);
        }
        assert!(p.pieces() as f64 <= p.piece_bound(rho));
    }

    #[test]
    fn rho_from_exponents() {
        assert_eq!(rho_of(2.0, f64::INFINITY).unwrap(), 2.0);
        assert!((rho_of(2.0, 4.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(rho_of(3.0, 2.0).is_err());
    }

    #[test]
    fn zero_phi_always_fine() {
        let inst = GronwallInstance {
            beta: 1.5,
            gamma: 3.0,
            horizon: 1.0,
            f: vec![2.0; 101],
            phi: vec![0.0; 101],
            eta: 0.0,
        };
        let r = verify_instance(&inst).unwrap();
        assert!(r.conclusion_holds);
    }

    #[test]
    fn violated_hypothesis_reported() {
        let inst = GronwallInstance {
            beta: 1.0,
            gamma: f64::INFINITY,
            horizon: 1.0,
            f: vec![0.0; 11],
            phi: vec![1.0; 11],
            eta: 0.5,
        };
        assert!(matches!(
            verify_instance(&inst),
            Err(Error::HypothesisFails { .. })
        ));
    }

    #[test]
    fn sampled_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, &InstanceSampler::default());
            inst.validate().unwrap();
            assert!(inst.eta > 0.0);
            assert!(verify_instance(&inst).unwrap().conclusion_holds);
        }
    }

    /// For ρ > 1 the pieces only force `‖f‖_{L^ρ(0,τ_k)} = k^{1/ρ}/2`, and
    /// the bound genuinely fails once `‖f‖` is large: with `β = 2`,
    /// `γ = ∞`, `f ≡ c` and `φ = e^{κt}`, `κ = 0.45c²`, the hypothesis holds
    /// with `η = 1` but `e^{0.45 s²}` outgrows `2Γ(3+2s)`, `s = c√t`.
    #[test]
    fn bound_fails_for_heavy_weight_when_rho_exceeds_one() {
        let c = 15.0;
        let kappa = 0.45 * c * c;
        let n = 40_000;
        let inst = GronwallInstance {
            beta: 2.0,
            gamma: f64::INFINITY,
            horizon: 1.0,
            f: vec![c; n + 1],
            phi: (0..=n)
                .map(|i| (kappa * i as f64 / n as f64).exp())
                .collect(),
            eta: 1.0,
        };
        let r = verify_instance(&inst).unwrap();
        assert!(!r.conclusion_holds);
        assert!(r.worst_ratio > 10.0);
    }
}
