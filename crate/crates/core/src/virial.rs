//! Localized virial quantities.
//!
//! `χ_R(r) = R² χ(r/R)` with `χ(s) = s²` on `[0, 1]`, `0` on `[2, ∞)` and a
//! septic Hermite patch on `[1, 2]` that matches `s²` to third order at
//! `s = 1` and vanishes to third order at `s = 2`. The patch is `C³`, so
//! `Δ²χ_R` is bounded and piecewise continuous.
//!
//! `θ_R(r) = ζ(r/R)` reuses the frequency bump of the cutoff, whose slope
//! never exceeds 2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Model;
use crate::params_well::ExponentSet;
use crate::spectral::{zeta, zeta_prime, FieldState, GridSpec, Spectral};

/// Coefficients of the patch in `u = s - 1`, lowest degree first.
const PATCH: [f64; 8] = [1.0, 2.0, 1.0, 0.0, -85.0, 194.0, -157.0, 44.0];

fn patch_derivs(u: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (d, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in (d..PATCH.len()).rev() {
            let mut c = PATCH[k];
            for j in 0..d {
                c *= (k - j) as f64;
            }
            acc = acc * u + c;
        }
        *slot = acc;
    }
    out
}

/// `χ` and its first four derivatives at `s ≥ 0`.
pub fn chi_derivs(s: f64) -> [f64; 5] {
    if s <= 1.0 {
        [s * s, 2.0 * s, 2.0, 0.0, 0.0]
    } else if s >= 2.0 {
        [0.0; 5]
    } else {
        patch_derivs(s - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirialWeights {
    pub radius: f64,
    pub grid: GridSpec,
    pub r: Vec<f64>,
    pub chi: Vec<f64>,
    /// `χ_R'`.
    pub dchi: Vec<f64>,
    /// `χ_R'/r`, equal to 2 on `r ≤ R` (including the origin).
    pub chi_over_r: Vec<f64>,
    pub d2chi: Vec<f64>,
    pub lap_chi: Vec<f64>,
    pub bilap_chi: Vec<f64>,
    pub theta: Vec<f64>,
    /// `θ_R'`.
    pub dtheta: Vec<f64>,
}

/// Samples the weights on every grid node.
pub fn make_weights(radius: f64, grid: GridSpec) -> Result<VirialWeights> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if 2.0 * radius > grid.extent {
        return Err(Error::RadiusExceedsBox {
            radius,
            extent: grid.extent,
        });
    }
    let nm1 = grid.dim as f64 - 1.0;
    let nm3 = grid.dim as f64 - 3.0;
    let len = grid.len();
    let mut w = VirialWeights {
        radius,
        grid,
        r: Vec::with_capacity(len),
        chi: Vec::with_capacity(len),
        dchi: Vec::with_capacity(len),
        chi_over_r: Vec::with_capacity(len),
        d2chi: Vec::with_capacity(len),
        lap_chi: Vec::with_capacity(len),
        bilap_chi: Vec::with_capacity(len),
        theta: Vec::with_capacity(len),
        dtheta: Vec::with_capacity(len),
    };
    for i in 0..len {
        let r = grid.radius(i);
        let s = r / radius;
        let d = chi_derivs(s);
        let (f, f1, f2, f3, f4) = (
            radius * radius * d[0],
            radius * d[1],
            d[2],
            d[3] / radius,
            d[4] / (radius * radius),
        );
        let (over_r, lap, bilap) = if s <= 1.0 {
            (2.0, 2.0 * grid.dim as f64, 0.0)
        } else {
            let q = f1 / r;
            (
                q,
                f2 + nm1 * q,
                f4 + 2.0 * nm1 * f3 / r + nm1 * nm3 * (f2 - q) / (r * r),
            )
        };
        w.r.push(r);
        w.chi.push(f);
        w.dchi.push(f1);
        w.chi_over_r.push(over_r);
        w.d2chi.push(f2);
        w.lap_chi.push(lap);
        w.bilap_chi.push(bilap);
        w.theta.push(zeta(s));
        w.dtheta.push(zeta_prime(s) / radius);
    }
    Ok(w)
}

impl VirialWeights {
    /// `C` with `|Z_R'| ≤ C R ‖u‖‖∇u‖`, i.e. `2 sup|χ'|` sampled finely.
    pub fn derivative_bound_constant() -> f64 {
        let m = (0..=20_000)
            .map(|i| chi_derivs(2.0 * i as f64 / 20_000.0)[1].abs())
            .fold(0.0, f64::max);
        2.0 * m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialSample {
    pub t: f64,
    /// `∫ x θ_R |u|²`.
    pub z_r: Vec<f64>,
    /// `d/dt z_R = 2 Im∫{(θ_R − 1) ū∇u + x θ_R' ū ∂_r u} + 2P`.
    pub z_r_prime: Vec<f64>,
    /// The same without the momentum term.
    pub z_r_prime_local: Vec<f64>,
    pub big_z: f64,
    pub big_z_prime: f64,
    pub big_z_second: f64,
    /// `8‖∇u‖² − 4N(p−1)/(p+1) ‖u‖^{p+1}_{p+1}`.
    pub r_functional: f64,
    pub mass: f64,
    pub grad2: f64,
}

/// Quadrature of the localized virial quantities. The nonlinear terms of
/// `Z_R''` carry the model's coupling.
pub fn sample_virial(
    spec: &Spectral,
    field: &FieldState,
    weights: &VirialWeights,
    model: &Model,
) -> Result<VirialSample> {
    if weights.grid != field.grid {
        return Err(Error::InvalidGrid(
            "weights sampled on a different grid".into(),
        ));
    }
    let grid = field.grid;
    let dim = grid.dim;
    let exps = &model.exps;
    let mu = model.coupling;
    let cell = grid.cell_volume();
    let grad = spec.gradient(field);
    let mut lap = field.values.clone();
    let ksq = spec.ksq();
    spec.apply_multiplier(&mut lap, |i| Complex64::new(-ksq[i], 0.0));

    let mut z_r = vec![0.0; dim];
    let mut zp_local = vec![0.0; dim];
    let mut momentum = vec![0.0; dim];
    let (mut big_z, mut big_zp) = (0.0, 0.0);
    let (mut mass, mut grad2, mut pot) = (0.0, 0.0, 0.0);
    let (mut corr_grad, mut corr_radial, mut corr_pot, mut corr_bilap) = (0.0, 0.0, 0.0, 0.0);
    for (i, &u) in field.values.iter().enumerate() {
        let x = grid.coords(i);
        let r = weights.r[i];
        let a2 = u.norm_sqr();
        let g: [Complex64; 3] = std::array::from_fn(|a| {
            if a < dim {
                grad[a][i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let g2: f64 = g.iter().map(|c| c.norm_sqr()).sum();
        // ∂_r u; its weights all vanish at the origin node
        let dr = if r > 0.0 {
            (0..dim).map(|a| g[a] * (x[a] / r)).sum::<Complex64>()
        } else {
            Complex64::new(0.0, 0.0)
        };
        let ubar_dr = (u.conj() * dr).im;
        let pw = a2.powf((exps.p + 1.0) / 2.0);

        mass += a2;
        grad2 += g2;
        pot += pw;
        for a in 0..dim {
            let ubar_ga = (u.conj() * g[a]).im;
            z_r[a] += x[a] * weights.theta[i] * a2;
            zp_local[a] += (weights.theta[i] - 1.0) * ubar_ga + x[a] * weights.dtheta[i] * ubar_dr;
            momentum[a] += ubar_ga;
        }
        big_z += weights.chi[i] * a2;
        big_zp += weights.dchi[i] * ubar_dr;
        corr_grad += (weights.chi_over_r[i] - 2.0) * g2;
        corr_radial += (weights.d2chi[i] - weights.chi_over_r[i]) * dr.norm_sqr();
        corr_pot += (2.0 * dim as f64 - weights.lap_chi[i]) * pw;
        // ∫|u|²Δ²χ after two integrations by parts: Δχ is C¹ where Δ²χ
        // jumps, so the quadrature stays second order across r = R
        corr_bilap += 2.0 * ((u.conj() * lap[i]).re + g2) * weights.lap_chi[i];
    }
    let scale = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x *= cell);
    scale(&mut z_r);
    scale(&mut zp_local);
    scale(&mut momentum);
    let zp_local: Vec<f64> = zp_local.iter().map(|x| 2.0 * x).collect();
    let z_r_prime = zp_local
        .iter()
        .zip(&momentum)
        .map(|(a, p)| a + 2.0 * p)
        .collect();
    let (mass, grad2, pot) = (mass * cell, grad2 * cell, pot * cell);
    let alpha = exps.p - 1.0;
    let k = exps.virial_potential_coefficient();
    let big_z_second = 8.0 * grad2 - mu * k * pot
        + cell
            * (4.0 * corr_grad + 4.0 * corr_radial + mu * 2.0 * alpha / (exps.p + 1.0) * corr_pot
                - corr_bilap);
    Ok(VirialSample {
        t: field.time,
        z_r,
        z_r_prime,
        z_r_prime_local: zp_local,
        big_z: big_z * cell,
        big_z_prime: 2.0 * big_zp * cell,
        big_z_second,
        r_functional: 8.0 * grad2 - k * pot,
        mass,
        grad2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    /// `max|FD(Z) − Z'| / max|Z'|` over interior samples.
    pub first: f64,
    /// `max|FD(Z') − Z''| / max|Z''|`.
    pub second: f64,
    pub samples: usize,
}

/// Central differences of sampled `Z_R` and `Z_R'` against the formulas.
pub fn fd_crosscheck(samples: &[VirialSample]) -> Result<FdReport> {
    if samples.len() < 5 {
        return Err(Error::InsufficientCheckpoints {
            needed: 5,
            got: samples.len(),
        });
    }
    let h = samples[1].t - samples[0].t;
    let uniform = samples
        .windows(2)
        .all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !(h > 0.0) || !uniform {
        return Err(Error::InvalidArgument(
            "checkpoints must be uniformly spaced".into(),
        ));
    }
    let rel = |vals: &dyn Fn(usize) -> f64, derivs: &dyn Fn(usize) -> f64| {
        let scale = (1..samples.len() - 1)
            .map(|i| derivs(i).abs())
            .fold(0.0, f64::max);
        let worst = (1..samples.len() - 1)
            .map(|i| ((vals(i + 1) - vals(i - 1)) / (2.0 * h) - derivs(i)).abs())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    };
    Ok(FdReport {
        first: rel(&|i| samples[i].big_z, &|i| samples[i].big_z_prime),
        second: rel(&|i| samples[i].big_z_prime, &|i| samples[i].big_z_second),
        samples: samples.len(),
    })
}

/// `η = 8[1 − ω^{(N(p−1)−4)/4}]` for `ω = E M^σ / (E(Q) M(Q)^σ)`.
pub fn coercivity_eta(omega: f64, exps: &ExponentSet) -> f64 {
    8.0 * (1.0 - omega.max(0.0).powf((exps.n_alpha() - 4.0) / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityCheck {
    pub t: f64,
    pub z_second: f64,
    /// `2ηE(u₀)`.
    pub floor: f64,
    pub holds: bool,
}

pub fn coercivity_check(sample: &VirialSample, eta: f64, energy0: f64) -> CoercivityCheck {
    let floor = 2.0 * eta * energy0;
    CoercivityCheck {
        t: sample.t,
        z_second: sample.big_z_second,
        floor,
        holds: sample.big_z_second >= floor,
    }
}

/// `(∫|x|²|u|² / M)^{1/2}`.
pub fn rms_radius(field: &FieldState) -> f64 {
    let grid = field.grid;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, u) in field.values.iter().enumerate() {
        let r = grid.radius(i);
        num += r * r * u.norm_sqr();
        den += u.norm_sqr();
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// `∫_{|x|>R} (|∇u|² + |u|²)`.
pub fn outer_energy(spec: &Spectral, field: &FieldState, radius: f64) -> f64 {
    let grid = field.grid;
    let grad = spec.gradient(field);
    let mut acc = 0.0;
    for (i, u) in field.values.iter().enumerate() {
        if grid.radius(i) > radius {
            acc += u.norm_sqr() + grad.iter().map(|g| g[i].norm_sqr()).sum::<f64>();
        }
    }
    acc * grid.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params_well::derive_exponents;

    #[test]
    fn patch_joins_smoothly() {
        let inner = [1.0, 2.0, 2.0, 0.0];
        let at1 = patch_derivs(0.0);
        let at2 = patch_derivs(1.0);
        for d in 0..4 {
            assert!((at1[d] - inner[d]).abs() < 1e-12, "derivative {d} at s = 1");
            assert!(at2[d].abs() < 1e-9, "derivative {d} at s = 2: {}", at2[d]);
        }
    }

    #[test]
    fn patch_derivatives_match_differences() {
        let h = 1e-5;
        for s in [1.1, 1.37, 1.5, 1.9] {
            let d = chi_derivs(s);
            for k in 0..4 {
                let fd = (chi_derivs(s + h)[k] - chi_derivs(s - h)[k]) / (2.0 * h);
                assert!(
                    (fd - d[k + 1]).abs() < 1e-5 * (1.0 + d[k + 1].abs()),
                    "s={s} k={k}"
                );
            }
        }
    }

    #[test]
    fn weights_plateau_and_support() {
        for dim in 1..=3 {
            let g = GridSpec::new(dim, 8.0, 16).unwrap();
            let w = make_weights(2.5, g).unwrap();
            for i in 0..g.len() {
                if w.r[i] <= 2.5 {
                    assert_eq!(w.lap_chi[i], 2.0 * dim as f64);
                    assert_eq!(w.bilap_chi[i], 0.0);
                    assert_eq!(w.chi_over_r[i], 2.0);
                }
                if w.r[i] >= 5.0 {
                    assert_eq!(w.chi[i], 0.0);
                    assert_eq!(w.dchi[i], 0.0);
                    assert_eq!(w.theta[i], 0.0);
                    assert_eq!(w.dtheta[i], 0.0);
                    assert_eq!(w.bilap_chi[i], 0.0);
                }
            }
        }
        let g = GridSpec::new(1, 4.0, 16).unwrap();
        assert!(matches!(
            make_weights(2.5, g),
            Err(Error::RadiusExceedsBox { .. })
        ));
    }

    #[test]
    fn theta_bounds_in_transition() {
        let radius = 3.0;
        for i in 0..=10_000 {
            let r = radius * (1.0 + i as f64 / 10_000.0);
            let s = r / radius;
            let lhs = (zeta(s) - 1.0).abs() + r * (zeta_prime(s) / radius).abs();
            assert!(lhs <= 5.0);
            assert!(r * zeta(s) <= 2.0 * radius);
        }
    }

    #[test]
    fn real_field_has_no_flux() {
        let exps = derive_exponents(2, 5.0).unwrap();
        let g = GridSpec::new(2, 8.0, 32).unwrap();
        let spec = Spectral::new(g).unwrap();
        let f = FieldState::from_fn(g, |x| {
            Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp(), 0.0)
        });
        let w = make_weights(3.0, g).unwrap();
        let s = sample_virial(&spec, &f, &w, &Model::focusing(exps)).unwrap();
        assert!(s.big_z_prime.abs() < 1e-14);
        assert!(s.z_r_prime.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn eta_vanishes_on_threshold() {
        let exps = derive_exponents(3, 3.0).unwrap();
        assert_eq!(coercivity_eta(1.0, &exps), 0.0);
        assert_eq!(coercivity_eta(0.0, &exps), 8.0);
    }

    #[test]
    fn few_samples_rejected() {
        assert!(matches!(
            fd_crosscheck(&[]),
            Err(Error::InsufficientCheckpoints { needed: 5, got: 0 })
        ));
    }
}
