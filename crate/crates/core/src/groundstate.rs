//! Radial ground state of `-ΔQ + Q = Q^p` by shooting on `Q(0)`.
//!
//! For a trial value `Q(0)` the radial ODE
//! `Q'' + (N-1)/r Q' = Q - Q^p` is integrated outward. Too large a start
//! value makes `Q` cross zero (overshoot); too small a value makes it turn
//! back up while still positive (undershoot). Bisection on this dichotomy
//! pins down `Q(0)`. The two trajectories bounding the final bracket agree
//! until the exponentially growing mode separates them; past that point the
//! profile is continued with the decaying solution of the linearised
//! equation, `r^{-ν} K_ν(r)` with `ν = N/2 - 1`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Dopri5, Solution, Stop};
use crate::params_well::{derive_exponents, ExponentSet, FieldStats, Thresholds};
use crate::quadrature::{simpson, sphere_area};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ShootingOptions {
    /// Truncation radius of the output mesh.
    pub r_max: f64,
    /// Number of mesh intervals on `[0, r_max]` (even).
    pub mesh_intervals: usize,
    /// Radius at which the series start hands over to the integrator.
    pub r_start: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Relative bracket width at which bisection stops.
    pub bisection_tol: f64,
    pub max_iterations: usize,
    /// Required bound on `|Q(r_max)|`.
    pub decay_floor: f64,
    /// Relative disagreement between the bracketing trajectories tolerated
    /// before the linear tail takes over.
    pub match_tol: f64,
    /// Optional user bracket `(undershoot, overshoot)` for `Q(0)`.
    pub bracket: Option<(f64, f64)>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            r_max: 20.0,
            mesh_intervals: 4000,
            r_start: 1e-3,
            rtol: 1e-12,
            atol: 1e-16,
            bisection_tol: 1e-15,
            max_iterations: 200,
            decay_floor: 1e-6,
            match_tol: 1e-6,
            bracket: None,
        }
    }
}

/// Outcome of one trial integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shot {
    /// `Q` crossed zero.
    Overshoot,
    /// `Q'` became positive while `Q > 0`.
    Undershoot,
    /// Neither happened before the integration limit.
    Undecided,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RadialProfile {
    pub dim: usize,
    pub p: f64,
    pub r_max: f64,
    pub r: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    /// Shooting value `Q(0)`.
    pub q0: f64,
    pub converged: bool,
    /// Radius where the linear tail takes over.
    pub match_radius: f64,
    /// Successive bracket widths during bisection.
    pub bracket_widths: Vec<f64>,
}

/// Taylor start `Q = q0 + c2 r^2 + c4 r^4` of the regular solution.
fn series_start(dim: usize, p: f64, q0: f64, r: f64) -> [f64; 2] {
    let nf = dim as f64;
    let c2 = (q0 - q0.powf(p)) / (2.0 * nf);
    let c4 = (1.0 - p * q0.powf(p - 1.0)) * c2 / (4.0 * (nf + 2.0));
    let r2 = r * r;
    [
        q0 + c2 * r2 + c4 * r2 * r2,
        2.0 * c2 * r + 4.0 * c4 * r2 * r,
    ]
}

fn rhs(dim: usize, p: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let nm1 = dim as f64 - 1.0;
    move |r, y| {
        let q = y[0];
        let nl = q.abs().powf(p - 1.0) * q;
        [y[1], q - nl - nm1 * y[1] / r]
    }
}

fn shoot(dim: usize, p: f64, q0: f64, opts: &ShootingOptions) -> (Shot, Solution<2>) {
    let solver = Dopri5 {
        rtol: opts.rtol,
        atol: opts.atol,
        max_steps: 2_000_000,
        h_max: 0.05,
    };
    let limit = 3.0 * opts.r_max;
    let y0 = series_start(dim, p, q0, opts.r_start);
    let sol = solver.integrate(rhs(dim, p), opts.r_start, y0, limit, |_, y| {
        y[0] <= 0.0 || y[1] > 0.0
    });
    let shot = match sol.stop {
        Stop::Event if sol.y_end[0] <= 0.0 => Shot::Overshoot,
        Stop::Event => Shot::Undershoot,
        _ => Shot::Undecided,
    };
    (shot, sol)
}

/// Classifies a trial start value (exposed for monotonicity checks).
pub fn classify_start(dim: usize, p: f64, q0: f64, opts: &ShootingOptions) -> Shot {
    shoot(dim, p, q0, opts).0
}

/// Linear-tail shape `r^{-ν} K_ν(r)` and its derivative, both stripped of
/// the common factor `sqrt(π/2) e^{-r}`.
fn tail_shape(dim: usize, r: f64) -> (f64, f64) {
    let nu = dim as f64 / 2.0 - 1.0;
    let k_nu = bessel_k_scaled(nu, r);
    let k_next = bessel_k_scaled(nu + 1.0, r);
    let w = r.powf(-nu);
    (w * k_nu, -w * k_next)
}

/// `K_μ(r) e^{r} / sqrt(π/2)` from its large-argument expansion, truncated
/// at the smallest term (exact for half-integer μ).
fn bessel_k_scaled(mu: f64, r: f64) -> f64 {
    let m4 = 4.0 * mu * mu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kk = k as f64;
        let next = term * (m4 - (2.0 * kk - 1.0).powi(2)) / (8.0 * kk * r);
        if next == 0.0 {
            break;
        }
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
    }
    sum / r.sqrt()
}

/// Solves for the ground state of `-ΔQ + Q = Q^p` in dimension `dim`.
pub fn solve_ground_state(dim: usize, p: f64, opts: &ShootingOptions) -> Result<RadialProfile> {
    derive_exponents(dim, p)?;
    if opts.mesh_intervals < 2 || opts.mesh_intervals % 2 != 0 {
        return Err(Error::InvalidArgument(
            "mesh_intervals must be even and ≥ 2".into(),
        ));
    }
    let (mut lo, mut hi) = match opts.bracket {
        Some((lo, hi)) => {
            if classify_start(dim, p, lo, opts) != Shot::Undershoot
                || classify_start(dim, p, hi, opts) != Shot::Overshoot
            {
                return Err(Error::NoBracketFound(format!(
                    "[{lo}, {hi}] does not bracket Q(0)"
                )));
            }
            (lo, hi)
        }
        None => auto_bracket(dim, p, opts)?,
    };

    let mut widths = vec![hi - lo];
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        if hi - lo <= opts.bisection_tol * hi {
            converged = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        match classify_start(dim, p, mid, opts) {
            Shot::Overshoot => hi = mid,
            Shot::Undershoot => lo = mid,
            Shot::Undecided => {
                // both neighbours are indistinguishable at double precision
                lo = mid;
                hi = mid;
                widths.push(0.0);
                converged = true;
                break;
            }
        }
        widths.push(hi - lo);
    }
    if !converged {
        return Err(Error::NotConverged(format!(
            "bracket width {} after {} iterations",
            hi - lo,
            opts.max_iterations
        )));
    }

    let profile = assemble_profile(dim, p, lo, hi, widths, opts)?;
    Ok(profile)
}

fn auto_bracket(dim: usize, p: f64, opts: &ShootingOptions) -> Result<(f64, f64)> {
    let lo = 1.0 + 1e-3;
    if classify_start(dim, p, lo, opts) != Shot::Undershoot {
        return Err(Error::NoBracketFound(format!(
            "Q(0) = {lo} does not undershoot"
        )));
    }
    let mut hi = 2.0;
    let mut last_under = lo;
    for _ in 0..40 {
        match classify_start(dim, p, hi, opts) {
            Shot::Overshoot => return Ok((last_under, hi)),
            Shot::Undershoot => {
                last_under = hi;
                hi *= 2.0;
            }
            Shot::Undecided => hi *= 1.5,
        }
    }
    Err(Error::NoBracketFound(
        "no overshooting start value below 2^40".into(),
    ))
}

fn assemble_profile(
    dim: usize,
    p: f64,
    lo: f64,
    hi: f64,
    widths: Vec<f64>,
    opts: &ShootingOptions,
) -> Result<RadialProfile> {
    let (_, sol_lo) = shoot(dim, p, lo, opts);
    let (_, sol_hi) = shoot(dim, p, hi, opts);
    let n = opts.mesh_intervals;
    let h = opts.r_max / n as f64;
    let r: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let q0 = 0.5 * (lo + hi);

    let mut q = vec![0.0; n + 1];
    let mut dq = vec![0.0; n + 1];
    let mut match_idx = None;
    for (i, &ri) in r.iter().enumerate() {
        if ri <= opts.r_start {
            let y = series_start(dim, p, q0, ri);
            q[i] = y[0];
            dq[i] = y[1];
            continue;
        }
        let (Some(a), Some(b)) = (sol_lo.eval(ri), sol_hi.eval(ri)) else {
            break;
        };
        let mean = 0.5 * (a[0] + b[0]);
        if mean <= 0.0
            || (a[0] - b[0]).abs() > opts.match_tol * mean.abs()
            || a[1] >= 0.0
            || b[1] >= 0.0
        {
            break;
        }
        q[i] = mean;
        dq[i] = 0.5 * (a[1] + b[1]);
        match_idx = Some(i);
        // the nonlinearity is negligible once Q^{p-1} is this small
        if ri >= 8.0 && mean.powf(p - 1.0) <= 1e-10 {
            break;
        }
    }
    let Some(m) = match_idx else {
        return Err(Error::NotConverged(
            "bracketing trajectories disagree immediately".into(),
        ));
    };
    let rm = r[m];
    let qm = q[m];
    let (gm, _) = tail_shape(dim, rm);
    for i in m + 1..=n {
        let (g, dg) = tail_shape(dim, r[i]);
        let decay = (rm - r[i]).exp();
        q[i] = qm * decay * g / gm;
        dq[i] = qm * decay * dg / gm;
    }
    let tail_ok = q[n].abs() < opts.decay_floor;
    Ok(RadialProfile {
        dim,
        p,
        r_max: opts.r_max,
        r,
        q,
        dq,
        q0,
        converged: tail_ok,
        match_radius: rm,
        bracket_widths: widths,
    })
}

impl RadialProfile {
    pub fn spacing(&self) -> f64 {
        self.r[1] - self.r[0]
    }

    /// `(Q(r), Q'(r))` by cubic Hermite interpolation on the mesh; beyond
    /// `r_max` the linear tail is continued.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        let n = self.r.len() - 1;
        let h = self.spacing();
        if r >= self.r_max {
            let (g0, _) = tail_shape(self.dim, self.r_max);
            let (g, dg) = tail_shape(self.dim, r);
            let decay = (self.r_max - r).exp();
            return (self.q[n] * decay * g / g0, self.q[n] * decay * dg / g0);
        }
        let i = ((r / h).floor() as usize).min(n - 1);
        let t = (r - self.r[i]) / h;
        let (y0, y1) = (self.q[i], self.q[i + 1]);
        let (m0, m1) = (self.dq[i] * h, self.dq[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let dval = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (val, dval)
    }

    /// Maximum residual of `Q'' + (N-1)/r Q' - Q + Q^p` at interior mesh
    /// points, with `Q''` from centered differences of `Q'`.
    pub fn ode_residual(&self) -> f64 {
        let h = self.spacing();
        let nm1 = self.dim as f64 - 1.0;
        let mut worst: f64 = 0.0;
        for i in 1..self.r.len() - 1 {
            let d2 = (self.dq[i + 1] - self.dq[i - 1]) / (2.0 * h);
            let res = d2 + nm1 * self.dq[i] / self.r[i] - self.q[i] + self.q[i].abs().powf(self.p);
            worst = worst.max(res.abs());
        }
        worst
    }

    /// Writes `r,Q,dQ` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,Q,dQ")?;
        for i in 0..self.r.len() {
            writeln!(w, "{},{},{}", self.r[i], self.q[i], self.dq[i])?;
        }
        Ok(())
    }

    /// Reads the mesh written by [`write_csv`](Self::write_csv); metadata
    /// comes from the caller (usually a cached [`QNorms`] summary).
    pub fn read_csv<R: BufRead>(
        reader: R,
        dim: usize,
        p: f64,
        q0: f64,
        match_radius: f64,
    ) -> Result<Self> {
        let mut r = Vec::new();
        let mut q = Vec::new();
        let mut dq = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Io(format!(
                    "line {}: expected 3 columns",
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("line {}: {e}", lineno + 1)))
            };
            r.push(parse(cols[0])?);
            q.push(parse(cols[1])?);
            dq.push(parse(cols[2])?);
        }
        if r.len() < 3 {
            return Err(Error::Io("profile too short".into()));
        }
        Ok(Self {
            dim,
            p,
            r_max: *r.last().unwrap(),
            r,
            q,
            dq,
            q0,
            converged: true,
            match_radius,
            bracket_widths: Vec::new(),
        })
    }
}

/// Integral norms of the ground state and derived thresholds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct QNorms {
    pub mass: f64,
    pub grad2: f64,
    pub pot: f64,
    pub energy: f64,
    pub c_gn: f64,
    pub thr_energy: f64,
    pub thr_grad: f64,
}

/// Relative residuals of the three ground-state norm identities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PohozaevResiduals {
    pub gradient: f64,
    pub potential: f64,
    pub energy: f64,
}

impl PohozaevResiduals {
    pub fn max(&self) -> f64 {
        self.gradient.max(self.potential).max(self.energy)
    }
}

impl QNorms {
    pub fn stats(&self, dim: usize) -> FieldStats {
        FieldStats {
            mass: self.mass,
            grad2: self.grad2,
            pot: self.pot,
            energy: self.energy,
            momentum: vec![0.0; dim],
        }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            energy: self.thr_energy,
            grad: self.thr_grad,
        }
    }

    pub fn pohozaev_residuals(&self, exps: &ExponentSet) -> PohozaevResiduals {
        let nf = exps.dim as f64;
        let alpha = exps.p - 1.0;
        let top = 4.0 - (nf - 2.0) * alpha;
        let rel = |rhs: f64| (self.mass - rhs).abs() / self.mass.abs();
        PohozaevResiduals {
            gradient: rel(top / (nf * alpha) * self.grad2),
            potential: rel(top / (2.0 * (exps.p + 1.0)) * self.pot),
            energy: rel((8.0 - 2.0 * (nf - 2.0) * alpha) / (nf * alpha - 4.0) * self.energy),
        }
    }
}

/// Radial quadrature of the mass, kinetic and potential norms.
pub fn profile_norms(profile: &RadialProfile) -> Result<QNorms> {
    if !profile.converged {
        return Err(Error::NotConverged("profile tail above decay floor".into()));
    }
    let exps = derive_exponents(profile.dim, profile.p)?;
    let h = profile.spacing();
    let area = sphere_area(profile.dim);
    let weight = |i: usize| area * profile.r[i].powi(profile.dim as i32 - 1);
    let n = profile.r.len();
    let m: Vec<f64> = (0..n)
        .map(|i| weight(i) * profile.q[i] * profile.q[i])
        .collect();
    let g: Vec<f64> = (0..n)
        .map(|i| weight(i) * profile.dq[i] * profile.dq[i])
        .collect();
    let v: Vec<f64> = (0..n)
        .map(|i| weight(i) * profile.q[i].abs().powf(profile.p + 1.0))
        .collect();
    let stats = FieldStats::new(
        simpson(&m, h),
        simpson(&g, h),
        simpson(&v, h),
        profile.p,
        vec![],
    );
    let thr = Thresholds::from_stats(&stats, &exps);
    let mut norms = QNorms {
        mass: stats.mass,
        grad2: stats.grad2,
        pot: stats.pot,
        energy: stats.energy,
        c_gn: 0.0,
        thr_energy: thr.energy,
        thr_grad: thr.grad,
    };
    norms.c_gn = gn_constant(&norms, &exps).0;
    Ok(norms)
}

/// Gagliardo–Nirenberg quotient `|f|^{p+1}_{p+1} / (|f|_2^{(4-(N-2)(p-1))/2} |∇f|_2^{N(p-1)/2})`.
pub fn gn_quotient(mass: f64, grad2: f64, pot: f64, exps: &ExponentSet) -> f64 {
    pot / (mass.powf(exps.gn_mass_power() / 2.0) * grad2.powf(exps.gn_gradient_power() / 2.0))
}

/// Sharp constant two ways: the quotient at `Q`, and the closed form in
/// terms of `|∇Q||Q|^σ`.
pub fn gn_constant(norms: &QNorms, exps: &ExponentSet) -> (f64, f64) {
    let direct = gn_quotient(norms.mass, norms.grad2, norms.pot, exps);
    let x = norms.grad2.sqrt() * norms.mass.powf(exps.sigma / 2.0);
    let identity = 2.0 * (exps.p + 1.0) / exps.n_alpha() * x.powf(-(exps.n_alpha() - 4.0) / 2.0);
    (direct, identity)
}

/// Ground state plus everything derived from it.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub exps: ExponentSet,
    pub profile: RadialProfile,
    pub norms: QNorms,
}

impl GroundState {
    pub fn compute(dim: usize, p: f64, opts: &ShootingOptions) -> Result<Self> {
        let exps = derive_exponents(dim, p)?;
        let profile = solve_ground_state(dim, p, opts)?;
        let norms = profile_norms(&profile)?;
        Ok(Self {
            exps,
            profile,
            norms,
        })
    }

    pub fn thresholds(&self) -> Thresholds {
        self.norms.thresholds()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sech_profile(x: f64) -> f64 {
        4f64.powf(1.0 / 6.0) / (3.0 * x).cosh().powf(1.0 / 3.0)
    }

    #[test]
    fn closed_form_solves_the_ode() {
        // Q = A sech^{1/3}(3x) with finite-difference second derivative
        let h = 1e-4;
        for i in 1..200 {
            let x = i as f64 * 0.05;
            let d2 = (sech_profile(x + h) - 2.0 * sech_profile(x) + sech_profile(x - h)) / (h * h);
            let res = d2 - sech_profile(x) + sech_profile(x).powi(7);
            assert!(res.abs() < 1e-6, "x = {x}: {res}");
        }
    }

    #[test]
    fn septic_1d_matches_sech() {
        let prof = solve_ground_state(1, 7.0, &ShootingOptions::default()).unwrap();
        assert!(prof.converged);
        assert!(
            (prof.q0 - 4f64.powf(1.0 / 6.0)).abs() < 1e-10,
            "{}",
            prof.q0
        );
        let err = prof
            .r
            .iter()
            .zip(&prof.q)
            .map(|(&r, &q)| (q - sech_profile(r)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "max pointwise error {err}");
    }

    #[test]
    fn positive_decreasing_regular() {
        for (n, p) in [(1, 7.0), (2, 5.0), (3, 3.0)] {
            let prof = solve_ground_state(n, p, &ShootingOptions::default()).unwrap();
            assert_eq!(prof.dq[0], 0.0);
            for i in 1..prof.r.len() {
                assert!(prof.q[i] > 0.0, "N={n}: Q <= 0 at r = {}", prof.r[i]);
                assert!(prof.dq[i] < 0.0, "N={n}: Q' >= 0 at r = {}", prof.r[i]);
            }
            assert!(prof.q.last().unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn bisection_bracket_shrinks() {
        let prof = solve_ground_state(3, 3.0, &ShootingOptions::default()).unwrap();
        for w in prof.bracket_widths.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn shot_verdict_is_monotone_in_start_value() {
        let opts = ShootingOptions::default();
        let prof = solve_ground_state(3, 3.0, &opts).unwrap();
        let mut seen_over = false;
        for k in -20..=20 {
            if k == 0 {
                continue;
            }
            let q0 = prof.q0 * (1.0 + 0.01 * k as f64);
            let shot = classify_start(3, 3.0, q0, &opts);
            if seen_over {
                assert_eq!(shot, Shot::Overshoot);
            }
            if shot == Shot::Overshoot {
                seen_over = true;
            }
            assert_eq!(shot == Shot::Overshoot, k > 0, "q0 = {q0}");
        }
    }

    #[test]
    fn bad_bracket_rejected() {
        let opts = ShootingOptions {
            bracket: Some((3.0, 3.5)),
            ..Default::default()
        };
        assert!(matches!(
            solve_ground_state(1, 7.0, &opts),
            Err(Error::NoBracketFound(_))
        ));
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let opts = ShootingOptions {
            max_iterations: 3,
            ..Default::default()
        };
        assert!(matches!(
            solve_ground_state(1, 7.0, &opts),
            Err(Error::NotConverged(_))
        ));
    }

    #[test]
    fn unconverged_profile_has_no_norms() {
        let mut prof = solve_ground_state(1, 7.0, &ShootingOptions::default()).unwrap();
        prof.converged = false;
        assert!(matches!(profile_norms(&prof), Err(Error::NotConverged(_))));
    }

    #[test]
    fn hermite_eval_reproduces_mesh() {
        let prof = solve_ground_state(1, 7.0, &ShootingOptions::default()).unwrap();
        for x in [0.0, 0.0123, 0.5, 1.77, 7.3] {
            let e = (prof.eval(x).0 - sech_profile(x)).abs();
            assert!(e < 1e-9, "x = {x}: {e}");
        }
        assert!(prof.eval(25.0).0 > 0.0 && prof.eval(25.0).0 < prof.eval(20.0).0);
    }

    #[test]
    fn half_integer_bessel_is_exact() {
        // K_{1/2}(r) = sqrt(π/2r) e^{-r}
        assert!((bessel_k_scaled(0.5, 3.0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        // K_{3/2}(r) = sqrt(π/2r) e^{-r} (1 + 1/r)
        assert!((bessel_k_scaled(1.5, 2.0) - 1.5 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let prof = solve_ground_state(1, 7.0, &ShootingOptions::default()).unwrap();
        let mut buf = Vec::new();
        prof.write_csv(&mut buf).unwrap();
        let back = RadialProfile::read_csv(&buf[..], 1, 7.0, prof.q0, prof.match_radius).unwrap();
        assert_eq!(back.q, prof.q);
        assert_eq!(back.dq, prof.dq);
    }
}
