//! Exponent system, potential-well geometry and the energy inequalities that
//! hold below the ground-state gradient threshold.
//!
//! Everything here works on scalar statistics ([`FieldStats`]) so it can be
//! exercised without any grid or solver.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative band inside which a well ratio is reported as [`Verdict::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-6;

/// Relative slack used when comparing the two sides of an inequality that
/// may hold with equality.
pub const COMPARISON_SLACK: f64 = 1e-8;

/// Hölder conjugate `x / (x - 1)`.
pub fn conjugate(x: f64) -> f64 {
    x / (x - 1.0)
}

fn conjugate_exact(x: Rational64) -> Rational64 {
    x / (x - Rational64::from_integer(1))
}

/// Exact rational counterpart of [`ExponentSet`], available when `p` is rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactExponents {
    pub p: Rational64,
    pub sigma: Rational64,
    pub s_c: Rational64,
    pub a: Rational64,
    pub b: Rational64,
    pub gamma: Rational64,
    pub q: Rational64,
    pub r: Rational64,
}

impl ExactExponents {
    fn new(n: usize, p: Rational64) -> Self {
        let one = Rational64::from_integer(1);
        let two = Rational64::from_integer(2);
        let four = Rational64::from_integer(4);
        let nn = Rational64::from_integer(n as i64);
        let alpha = p - one;
        let sigma = (four - (nn - two) * alpha) / (nn * alpha - four);
        let s_c = nn / two - two / alpha;
        let a = two * alpha * (p + one) / (four - (nn - two) * alpha);
        let b = two * alpha * (p + one) / (nn * alpha * alpha + (nn - two) * alpha - four);
        let gamma = two * (nn + two) / nn;
        let q = four * (p + one) / (nn * alpha);
        let r = p + one;
        Self {
            p,
            sigma,
            s_c,
            a,
            b,
            gamma,
            q,
            r,
        }
    }

    /// `p r' = r` and `p b' = a`, checked in exact arithmetic.
    pub fn conjugate_identities_hold(&self) -> bool {
        self.p * conjugate_exact(self.r) == self.r && self.p * conjugate_exact(self.b) == self.a
    }
}

/// All indices attached to a dimension `N` and a power `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub dim: usize,
    pub p: f64,
    pub sigma: f64,
    pub s_c: f64,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub q: f64,
    pub r: f64,
    /// Present when `p` was recognised as a rational with small denominator.
    pub exact: Option<ExactExponents>,
}

fn admissible(n: usize, alpha: f64) -> bool {
    if n == 0 || !alpha.is_finite() {
        return false;
    }
    let lower = 4.0 / n as f64;
    if n <= 2 {
        alpha > lower
    } else {
        alpha > lower && alpha < 4.0 / (n as f64 - 2.0)
    }
}

fn admissible_exact(n: usize, alpha: Rational64) -> bool {
    if n == 0 {
        return false;
    }
    let nn = Rational64::from_integer(n as i64);
    let four = Rational64::from_integer(4);
    let lower = four / nn;
    if n <= 2 {
        alpha > lower
    } else {
        alpha > lower && alpha < four / (nn - Rational64::from_integer(2))
    }
}

fn recognise_rational(p: f64) -> Option<Rational64> {
    for den in 1..=64i64 {
        let num = p * den as f64;
        if (num - num.round()).abs() < 1e-12 * num.abs().max(1.0) && num.abs() < 1e12 {
            return Some(Rational64::new(num.round() as i64, den));
        }
    }
    None
}

/// Derive the exponent set for `(N, p)`. Fails with
/// [`Error::PowerOutOfRange`] outside the mass-supercritical,
/// energy-subcritical range.
pub fn derive_exponents(n: usize, p: f64) -> Result<ExponentSet> {
    if let Some(exact) = recognise_rational(p) {
        return derive_exponents_exact(n, exact);
    }
    if !admissible(n, p - 1.0) {
        return Err(Error::PowerOutOfRange { n, p });
    }
    let nf = n as f64;
    let alpha = p - 1.0;
    Ok(ExponentSet {
        dim: n,
        p,
        sigma: (4.0 - (nf - 2.0) * alpha) / (nf * alpha - 4.0),
        s_c: nf / 2.0 - 2.0 / alpha,
        a: 2.0 * alpha * (p + 1.0) / (4.0 - (nf - 2.0) * alpha),
        b: 2.0 * alpha * (p + 1.0) / (nf * alpha * alpha + (nf - 2.0) * alpha - 4.0),
        gamma: 2.0 * (nf + 2.0) / nf,
        q: 4.0 * (p + 1.0) / (nf * alpha),
        r: p + 1.0,
        exact: None,
    })
}

/// Exact-rational entry point; floating values are evaluated from the rationals.
pub fn derive_exponents_exact(n: usize, p: Rational64) -> Result<ExponentSet> {
    let to_f = |x: Rational64| *x.numer() as f64 / *x.denom() as f64;
    if !admissible_exact(n, p - Rational64::from_integer(1)) {
        return Err(Error::PowerOutOfRange { n, p: to_f(p) });
    }
    let e = ExactExponents::new(n, p);
    Ok(ExponentSet {
        dim: n,
        p: to_f(e.p),
        sigma: to_f(e.sigma),
        s_c: to_f(e.s_c),
        a: to_f(e.a),
        b: to_f(e.b),
        gamma: to_f(e.gamma),
        q: to_f(e.q),
        r: to_f(e.r),
        exact: Some(e),
    })
}

impl ExponentSet {
    /// `N (p - 1)`, the quantity every energy inequality is phrased in.
    pub fn n_alpha(&self) -> f64 {
        self.dim as f64 * (self.p - 1.0)
    }

    /// Gradient power in the Gagliardo–Nirenberg inequality, `N(p-1)/2`.
    pub fn gn_gradient_power(&self) -> f64 {
        self.n_alpha() / 2.0
    }

    /// Mass-norm power in the Gagliardo–Nirenberg inequality, `(4-(N-2)(p-1))/2`.
    pub fn gn_mass_power(&self) -> f64 {
        (4.0 - (self.dim as f64 - 2.0) * (self.p - 1.0)) / 2.0
    }

    /// Coefficient `(N(p-1) - 4) / (2 N (p-1))` of the energy lower bound.
    pub fn energy_floor_coefficient(&self) -> f64 {
        (self.n_alpha() - 4.0) / (2.0 * self.n_alpha())
    }

    /// Coefficient of the potential term in `R(u) = 8|∇u|² - c |u|^{p+1}_{p+1}`.
    pub fn virial_potential_coefficient(&self) -> f64 {
        4.0 * self.n_alpha() / (self.p + 1.0)
    }

    /// Sobolev index `Λ = N(p-1) / (2(p+1))` used by the frequency cutoff bound.
    pub fn cutoff_index(&self) -> f64 {
        self.n_alpha() / (2.0 * (self.p + 1.0))
    }
}

/// Scalar statistics of a field: mass, kinetic and potential norms, energy
/// and momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    pub mass: f64,
    pub grad2: f64,
    pub pot: f64,
    pub energy: f64,
    pub momentum: Vec<f64>,
}

impl FieldStats {
    /// Builds statistics, computing the energy `grad2/2 - pot/(p+1)`.
    pub fn new(mass: f64, grad2: f64, pot: f64, p: f64, momentum: Vec<f64>) -> Self {
        Self {
            mass,
            grad2,
            pot,
            energy: grad2 / 2.0 - pot / (p + 1.0),
            momentum,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            mass: 0.0,
            grad2: 0.0,
            pot: 0.0,
            energy: 0.0,
            momentum: vec![0.0; dim],
        }
    }

    /// `E M^σ`.
    pub fn scaled_energy(&self, exps: &ExponentSet) -> f64 {
        self.energy * self.mass.powf(exps.sigma)
    }

    /// `|∇u|_2 |u|_2^σ`.
    pub fn scaled_gradient(&self, exps: &ExponentSet) -> f64 {
        self.grad2.sqrt() * self.mass.powf(exps.sigma / 2.0)
    }

    /// `R(u) = 8|∇u|² - 4N(p-1)/(p+1) |u|^{p+1}_{p+1}`.
    pub fn virial_functional(&self, exps: &ExponentSet) -> f64 {
        8.0 * self.grad2 - exps.virial_potential_coefficient() * self.pot
    }

    pub fn momentum_norm(&self) -> f64 {
        self.momentum.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Ground-state thresholds `E(Q) M(Q)^σ` and `|∇Q|_2 |Q|_2^σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub energy: f64,
    pub grad: f64,
}

impl Thresholds {
    pub fn from_stats(q: &FieldStats, exps: &ExponentSet) -> Self {
        Self {
            energy: q.scaled_energy(exps),
            grad: q.scaled_gradient(exps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    InsideWell,
    OutsideWellAboveGradient,
    AboveEnergyThreshold,
    Boundary,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::InsideWell => "InsideWell",
            Verdict::OutsideWellAboveGradient => "OutsideWellAboveGradient",
            Verdict::AboveEnergyThreshold => "AboveEnergyThreshold",
            Verdict::Boundary => "Boundary",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellStatus {
    pub omega: f64,
    pub grad_ratio: f64,
    pub verdict: Verdict,
}

/// Locate a field relative to the scale-invariant potential well.
pub fn well_membership(stats: &FieldStats, thr: &Thresholds, exps: &ExponentSet) -> WellStatus {
    well_membership_with_band(stats, thr, exps, BOUNDARY_BAND)
}

pub fn well_membership_with_band(
    stats: &FieldStats,
    thr: &Thresholds,
    exps: &ExponentSet,
    band: f64,
) -> WellStatus {
    let omega = stats.scaled_energy(exps) / thr.energy;
    let grad_ratio = stats.scaled_gradient(exps) / thr.grad;
    let verdict = if omega >= 1.0 + band {
        Verdict::AboveEnergyThreshold
    } else if (omega - 1.0).abs() < band || (grad_ratio - 1.0).abs() < band {
        Verdict::Boundary
    } else if grad_ratio < 1.0 {
        Verdict::InsideWell
    } else {
        Verdict::OutsideWellAboveGradient
    };
    WellStatus {
        omega,
        grad_ratio,
        verdict,
    }
}

/// `f(x) = x²/2 - C x^{N(p-1)/2} / (p+1)`.
pub fn gn_functional(x: f64, c_gn: f64, exps: &ExponentSet) -> f64 {
    0.5 * x * x - c_gn * x.powf(exps.gn_gradient_power()) / (exps.p + 1.0)
}

/// Maximizer `x₁ = (C N(p-1) / (2(p+1)))^{-2/(N(p-1)-4)}` of [`gn_functional`].
pub fn gn_maximizer(c_gn: f64, exps: &ExponentSet) -> f64 {
    (c_gn * exps.n_alpha() / (2.0 * (exps.p + 1.0))).powf(-2.0 / (exps.n_alpha() - 4.0))
}

/// One side-by-side comparison `lhs ≥ rhs` (or `≤`, per the field docs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl InequalityCheck {
    fn at_least(lhs: f64, rhs: f64) -> Self {
        let slack = COMPARISON_SLACK * lhs.abs().max(rhs.abs());
        Self {
            lhs,
            rhs,
            satisfied: lhs >= rhs - slack,
        }
    }

    fn at_most(lhs: f64, rhs: f64) -> Self {
        let slack = COMPARISON_SLACK * lhs.abs().max(rhs.abs());
        Self {
            lhs,
            rhs,
            satisfied: lhs <= rhs + slack,
        }
    }

    /// Strict version: holds with a margin beyond the comparison slack.
    pub fn strict(&self) -> bool {
        let slack = COMPARISON_SLACK * self.lhs.abs().max(self.rhs.abs());
        (self.lhs - self.rhs).abs() > slack && self.satisfied
    }
}

/// The three energy inequalities valid below the gradient threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBounds {
    /// `E ≥ (N(p-1)-4)/(2N(p-1)) |∇u|²`.
    pub energy_floor: InequalityCheck,
    /// `|∇u||u|^σ ≤ (E M^σ / E(Q) M(Q)^σ)^{1/2} |∇Q||Q|^σ`.
    pub gradient: InequalityCheck,
    /// `R(u) ≥ 8 [1 - ω^{(N(p-1)-4)/4}] |∇u|²`.
    pub virial: InequalityCheck,
}

impl EnergyBounds {
    pub fn all_satisfied(&self) -> bool {
        self.energy_floor.satisfied && self.gradient.satisfied && self.virial.satisfied
    }
}

/// Evaluate the three energy inequalities. Requires the gradient hypothesis
/// `|∇u||u|^σ ≤ |∇Q||Q|^σ`.
pub fn lemma31_bounds(
    stats: &FieldStats,
    thr: &Thresholds,
    exps: &ExponentSet,
) -> Result<EnergyBounds> {
    let x = stats.scaled_gradient(exps);
    if x > thr.grad * (1.0 + COMPARISON_SLACK) {
        return Err(Error::PreconditionViolated(format!(
            "gradient ratio {} exceeds 1",
            x / thr.grad
        )));
    }
    let omega = (stats.scaled_energy(exps) / thr.energy).max(0.0);
    let energy_floor =
        InequalityCheck::at_least(stats.energy, exps.energy_floor_coefficient() * stats.grad2);
    let gradient = InequalityCheck::at_most(x, omega.sqrt() * thr.grad);
    let virial = InequalityCheck::at_least(
        stats.virial_functional(exps),
        8.0 * (1.0 - omega.powf((exps.n_alpha() - 4.0) / 4.0)) * stats.grad2,
    );
    Ok(EnergyBounds {
        energy_floor,
        gradient,
        virial,
    })
}

/// λ-exponents of each statistic under `u ↦ λ^{2/(p-1)} u(λ·)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    pub mass: f64,
    pub grad2: f64,
    pub pot: f64,
    pub momentum: f64,
}

pub fn scaling_exponents(exps: &ExponentSet) -> ScalingExponents {
    let nf = exps.dim as f64;
    let base = 4.0 / (exps.p - 1.0) - nf;
    ScalingExponents {
        mass: base,
        grad2: base + 2.0,
        pot: base + 2.0,
        momentum: base + 1.0,
    }
}

/// Statistics of the natural rescaling `u_λ(x) = λ^{2/(p-1)} u(λx)`.
pub fn scaling_transform(stats: &FieldStats, lambda: f64, exps: &ExponentSet) -> FieldStats {
    let e = scaling_exponents(exps);
    let grad_factor = lambda.powf(e.grad2);
    FieldStats {
        mass: stats.mass * lambda.powf(e.mass),
        grad2: stats.grad2 * grad_factor,
        pot: stats.pot * lambda.powf(e.pot),
        energy: stats.energy * grad_factor,
        momentum: stats
            .momentum
            .iter()
            .map(|m| m * lambda.powf(e.momentum))
            .collect(),
    }
}

/// Statistics of the mass-preserving dilation `λ^{N/2} u(λx)`. Unlike
/// [`scaling_transform`] this moves the well ratios: for `u = Q` the
/// gradient ratio is exactly `λ`.
pub fn mass_preserving_dilation(stats: &FieldStats, lambda: f64, exps: &ExponentSet) -> FieldStats {
    let mut out = FieldStats::new(
        stats.mass,
        stats.grad2 * lambda * lambda,
        stats.pot * lambda.powf(exps.gn_gradient_power()),
        exps.p,
        stats.momentum.iter().map(|m| m * lambda).collect(),
    );
    if stats.mass == 0.0 {
        out.mass = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn cubic_3d_exponents() {
        let e = derive_exponents(3, 3.0).unwrap();
        assert_eq!(e.sigma, 1.0);
        assert_eq!(e.s_c, 0.5);
        assert_eq!(e.r, 4.0);
        assert!(close(e.gamma, 10.0 / 3.0, 1e-15));
        assert!(close(e.q, 8.0 / 3.0, 1e-15));
        assert_eq!(e.a, 8.0);
        assert!(close(e.b, 8.0 / 5.0, 1e-15));
        let x = e.exact.unwrap();
        assert_eq!(x.gamma, Rational64::new(10, 3));
        assert!(x.conjugate_identities_hold());
    }

    #[test]
    fn septic_1d_exponents() {
        let e = derive_exponents(1, 7.0).unwrap();
        assert_eq!(e.sigma, 5.0);
        assert!(close(e.s_c, 1.0 / 6.0, 1e-15));
        assert_eq!(e.r, 8.0);
        assert_eq!(e.gamma, 6.0);
        assert!(close(e.q, 16.0 / 3.0, 1e-15));
        assert!(close(e.a, 48.0 / 5.0, 1e-15));
        assert!(close(e.b, 48.0 / 13.0, 1e-15));
        let x = e.exact.unwrap();
        assert_eq!(x.a, Rational64::new(48, 5));
        assert_eq!(x.b, Rational64::new(48, 13));
    }

    #[test]
    fn boundary_power_rejected() {
        assert!(matches!(
            derive_exponents(2, 3.0),
            Err(Error::PowerOutOfRange { n: 2, .. })
        ));
        // energy-critical endpoint in 3D
        assert!(derive_exponents(3, 5.0).is_err());
        assert!(derive_exponents(1, 4.9).is_err());
        assert!(derive_exponents(0, 3.0).is_err());
        // irrational powers go through the floating path
        let e = derive_exponents(3, 1.0 + std::f64::consts::SQRT_2).unwrap();
        assert!(e.exact.is_none());
    }

    #[test]
    fn gn_functional_at_zero() {
        let e = derive_exponents(3, 3.0).unwrap();
        assert_eq!(gn_functional(0.0, 0.7, &e), 0.0);
    }

    #[test]
    fn gn_functional_shape_and_peak() {
        for (n, p, c) in [(3, 3.0, 0.3), (1, 7.0, 1.7), (2, 5.0, 0.05)] {
            let e = derive_exponents(n, p).unwrap();
            let x1 = gn_maximizer(c, &e);
            let f = |x| gn_functional(x, c, &e);
            let k = 400;
            for i in 1..k {
                let a = x1 * i as f64 / k as f64;
                let b = x1 * (i + 1) as f64 / k as f64;
                assert!(f(b) > f(a), "not increasing below x1");
                let a = x1 * (1.0 + i as f64 / k as f64);
                let b = x1 * (1.0 + (i + 1) as f64 / k as f64);
                assert!(f(b) < f(a), "not decreasing above x1");
            }
            let peak = e.energy_floor_coefficient() * x1 * x1;
            assert!(close(f(x1), peak, 1e-12), "{} vs {}", f(x1), peak);
        }
    }

    fn q_like_stats(e: &ExponentSet) -> FieldStats {
        // Statistics obeying the Pohozaev ratios exactly, with |∇Q|² = 1.
        let g = 1.0;
        let mass = (4.0 - (e.dim as f64 - 2.0) * (e.p - 1.0)) / e.n_alpha() * g;
        let pot = 2.0 * (e.p + 1.0) / e.n_alpha() * g;
        FieldStats::new(mass, g, pot, e.p, vec![0.0; e.dim])
    }

    #[test]
    fn membership_of_ground_state_and_dilations() {
        let e = derive_exponents(1, 7.0).unwrap();
        let q = q_like_stats(&e);
        let thr = Thresholds::from_stats(&q, &e);
        assert_eq!(well_membership(&q, &thr, &e).verdict, Verdict::Boundary);
        let inside = mass_preserving_dilation(&q, 0.9, &e);
        let s = well_membership(&inside, &thr, &e);
        assert_eq!(s.verdict, Verdict::InsideWell);
        assert!(s.omega < 1.0 && s.grad_ratio < 1.0);
        let outside = mass_preserving_dilation(&q, 1.1, &e);
        let s = well_membership(&outside, &thr, &e);
        assert_eq!(s.verdict, Verdict::OutsideWellAboveGradient);
        assert!(close(s.grad_ratio, 1.1, 1e-14));
        // the natural scaling leaves both ratios at the threshold
        let natural = scaling_transform(&q, 0.9, &e);
        assert_eq!(
            well_membership(&natural, &thr, &e).verdict,
            Verdict::Boundary
        );
        // doubled amplitude has E < 0 and a large gradient ratio
        let big = FieldStats::new(4.0 * q.mass, 4.0 * q.grad2, 256.0 * q.pot, e.p, vec![0.0]);
        assert_eq!(
            well_membership(&big, &thr, &e).verdict,
            Verdict::OutsideWellAboveGradient
        );
    }

    #[test]
    fn energy_threshold_exceeded() {
        let e = derive_exponents(3, 3.0).unwrap();
        let q = q_like_stats(&e);
        let thr = Thresholds::from_stats(&q, &e);
        let s = FieldStats::new(q.mass, q.grad2, 0.0, e.p, vec![0.0; 3]);
        assert_eq!(
            well_membership(&s, &thr, &e).verdict,
            Verdict::AboveEnergyThreshold
        );
    }

    #[test]
    fn lemma31_on_threshold_and_inside() {
        let e = derive_exponents(3, 3.0).unwrap();
        let q = q_like_stats(&e);
        let thr = Thresholds::from_stats(&q, &e);
        let b = lemma31_bounds(&q, &thr, &e).unwrap();
        assert!(b.all_satisfied());
        assert!(close(b.gradient.lhs, b.gradient.rhs, 1e-12));
        // pointwise half of Q: every norm scales by a power of 1/2
        let half = FieldStats::new(
            q.mass / 4.0,
            q.grad2 / 4.0,
            q.pot / 2f64.powf(e.p + 1.0),
            e.p,
            vec![0.0; 3],
        );
        let b = lemma31_bounds(&half, &thr, &e).unwrap();
        assert!(b.energy_floor.strict() && b.gradient.strict() && b.virial.strict());
    }

    #[test]
    fn lemma31_zero_field_and_precondition() {
        let e = derive_exponents(2, 5.0).unwrap();
        let q = q_like_stats(&e);
        let thr = Thresholds::from_stats(&q, &e);
        let z = FieldStats::zero(2);
        let b = lemma31_bounds(&z, &thr, &e).unwrap();
        assert!(b.all_satisfied());
        assert_eq!(z.virial_functional(&e), 0.0);
        let above = mass_preserving_dilation(&q, 1.2, &e);
        assert!(matches!(
            lemma31_bounds(&above, &thr, &e),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn scaling_identity_and_invariance() {
        let e = derive_exponents(2, 4.5).unwrap();
        let s = FieldStats::new(1.3, 2.7, 0.9, e.p, vec![0.2, -0.1]);
        let same = scaling_transform(&s, 1.0, &e);
        assert_eq!(same, s);
        for lambda in [0.3, 0.9, 1.7, 12.0] {
            let t = scaling_transform(&s, lambda, &e);
            assert!(close(t.scaled_energy(&e), s.scaled_energy(&e), 1e-10));
            assert!(close(t.scaled_gradient(&e), s.scaled_gradient(&e), 1e-10));
        }
    }

    #[test]
    fn critical_sobolev_norm_is_scale_free() {
        for (n, p) in [(1, 7.0), (2, 5.0), (3, 3.0), (3, 4.2)] {
            let e = derive_exponents(n, p).unwrap();
            let x = scaling_exponents(&e);
            assert!((e.s_c * x.grad2 + (1.0 - e.s_c) * x.mass).abs() < 1e-12);
        }
    }
}
