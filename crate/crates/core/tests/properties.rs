use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nls_core::evolution::{gaussian, Model, SplitStep};
use nls_core::field_io::{read_field, write_field};
use nls_core::gronwall::{partition, random_instance, verify_instance, InstanceSampler};
use nls_core::groundstate::{gn_quotient, GroundState, ShootingOptions};
use nls_core::params_well::{
    derive_exponents, derive_exponents_exact, mass_preserving_dilation, scaling_transform,
    FieldStats,
};
use nls_core::spectral::{
    cutoff_inequalities, cutoff_pointwise_bound, kappa, kappa_closed_form, random_band_limited,
    CutoffProfile, FieldState, GridSpec, Spectral,
};
use nls_core::Error;

fn lower(n: usize) -> f64 {
    1.0 + 4.0 / n as f64
}

fn upper(n: usize) -> f64 {
    if n <= 2 {
        20.0
    } else {
        1.0 + 4.0 / (n as f64 - 2.0)
    }
}

fn admissible_p() -> impl Strategy<Value = (usize, f64)> {
    (1usize..=3, 0.02f64..0.98).prop_map(|(n, t)| (n, lower(n) + t * (upper(n) - lower(n))))
}

/// `p = 1 + 4/N + k/(N d)` strictly inside the admissible interval.
fn rational_p() -> impl Strategy<Value = (usize, Rational64)> {
    (1usize..=3, 1i64..60).prop_flat_map(|(n, d)| {
        let n_i = n as i64;
        // for N = 3 the gap is 2/3 = 2d/(3d)
        let k_max = if n == 3 { 2 * d - 1 } else { 40 * d };
        (Just(n), 1..=k_max).prop_map(move |(n, k)| {
            (
                n,
                Rational64::new(n_i + 4, n_i) + Rational64::new(k, n_i * d),
            )
        })
    })
}

fn stats() -> impl Strategy<Value = FieldStats> {
    (0.1f64..10.0, 0.1f64..10.0, 0.1f64..10.0, -2.0f64..2.0)
        .prop_map(|(m, g, pot, mom)| FieldStats::new(m, g, pot, 7.0, vec![mom]))
}

fn max_abs_diff(a: &FieldState, b: &FieldState) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn sigma_is_one_minus_sc_over_sc((n, p) in admissible_p()) {
        let e = derive_exponents(n, p).unwrap();
        prop_assert!(e.s_c > 0.0 && e.s_c < 1.0);
        prop_assert!((e.sigma - (1.0 - e.s_c) / e.s_c).abs() < 1e-9 * e.sigma.max(1.0));
        prop_assert!(e.energy_floor_coefficient() > 0.0);
        prop_assert!(e.cutoff_index() < n as f64 / 2.0);
    }

    #[test]
    fn endpoints_and_beyond_are_rejected(n in 1usize..=3, d in 0.0f64..0.5) {
        let below = derive_exponents(n, lower(n) - d);
        prop_assert!(matches!(below, Err(Error::PowerOutOfRange { .. })), "{below:?}");
        if n >= 3 {
            prop_assert!(derive_exponents(n, upper(n) + d).is_err());
        }
    }

    #[test]
    fn exact_conjugates_for_rational_powers((n, p) in rational_p()) {
        let e = derive_exponents_exact(n, p).unwrap();
        prop_assert!(e.exact.unwrap().conjugate_identities_hold());
    }

    #[test]
    fn natural_scaling_leaves_well_coordinates_fixed(s in stats(), lambda in 0.2f64..5.0) {
        let e = derive_exponents(1, 7.0).unwrap();
        let t = scaling_transform(&s, lambda, &e);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
        prop_assert!(rel(t.scaled_gradient(&e), s.scaled_gradient(&e)) < 1e-10);
        prop_assert!((t.scaled_energy(&e) - s.scaled_energy(&e)).abs() < 1e-10 * s.scaled_energy(&e).abs().max(1.0));
    }

    #[test]
    fn dilation_moves_gradient_coordinate_linearly(s in stats(), lambda in 0.2f64..5.0) {
        let e = derive_exponents(1, 7.0).unwrap();
        let d = mass_preserving_dilation(&s, lambda, &e);
        prop_assert!((d.scaled_gradient(&e) / s.scaled_gradient(&e) - lambda).abs() < 1e-12 * lambda);
        prop_assert_eq!(d.mass, s.mass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn free_flow_is_an_isometry_and_a_group(seed in any::<u64>(), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0, dim in 1usize..=2) {
        let points = if dim == 1 { 256 } else { 32 };
        let grid = GridSpec::new(dim, 8.0, points).unwrap();
        let spec = Spectral::new(grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_band_limited(grid, 6.0, &mut rng).unwrap();
        let v = spec.free_propagate(&u, t1);
        prop_assert!((v.mass() - u.mass()).abs() < 1e-12 * u.mass());
        prop_assert!((spec.sobolev_norm(&v, 1.0) - spec.sobolev_norm(&u, 1.0)).abs() < 1e-10 * spec.sobolev_norm(&u, 1.0));
        let w = spec.free_propagate(&v, t2);
        let direct = spec.free_propagate(&u, t1 + t2);
        prop_assert!(max_abs_diff(&w, &direct) < 1e-11);
    }

    #[test]
    fn cutoff_estimates_hold_on_random_fields(seed in any::<u64>(), dim in 1usize..=3, r in 0.3f64..4.0, lam in 0.05f64..0.95) {
        let (extent, points) = [(10.0, 256), (8.0, 64), (6.0, 32)][dim - 1];
        let grid = GridSpec::new(dim, extent, points).unwrap();
        let spec = Spectral::new(grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_band_limited(grid, spec.grid.nyquist() * 0.6, &mut rng).unwrap();
        let profile = CutoffProfile { r };
        let ineq = cutoff_inequalities(&spec, &u, &profile, lam).unwrap();
        prop_assert!(ineq.hold(1e-12), "{ineq:?}");
        let p = [7.0, 5.0, 3.0][dim - 1];
        let exps = derive_exponents(dim, p).unwrap();
        let pw = cutoff_pointwise_bound(&spec, &u, &profile, &exps).unwrap();
        prop_assert!(pw.holds(), "{pw:?}");
    }

    #[test]
    fn kappa_quadrature_matches_closed_form(dim in 1usize..=3, t in 0.01f64..0.95) {
        let lam = t * dim as f64 / 2.0;
        let k = kappa(dim, lam).unwrap();
        let c = kappa_closed_form(dim, lam);
        prop_assert!((k - c).abs() < 1e-6 * c, "{k} vs {c}");
    }

    #[test]
    fn field_files_round_trip(seed in any::<u64>(), dim in 1usize..=3, time in -5.0f64..5.0) {
        let points = [64, 16, 8][dim - 1];
        let grid = GridSpec::new(dim, 7.5, points).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = random_band_limited(grid, 3.0, &mut rng).unwrap();
        u.time = time;
        let mut buf = Vec::new();
        write_field(&mut buf, &u).unwrap();
        let back = read_field(buf.as_slice()).unwrap();
        prop_assert_eq!(back.grid, u.grid);
        prop_assert_eq!(back.time.to_bits(), u.time.to_bits());
        prop_assert!(back.values.iter().zip(&u.values).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn gronwall_conclusion_holds_on_sampled_instances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &InstanceSampler { intervals: 200, ..Default::default() });
        let rep = verify_instance(&inst).unwrap();
        prop_assert!(rep.hypothesis_margin >= -1e-12);
        prop_assert!(rep.conclusion_holds, "{rep:?}");
    }

    #[test]
    fn partition_pieces_add_up(seed in any::<u64>(), rho in 1.0f64..8.0, horizon in 0.2f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..=400).map(|_| rand::Rng::random_range(&mut rng, 0.0..3.0)).collect();
        let part = partition(&f, rho, horizon).unwrap();
        let total: f64 = part.piece_powers.iter().sum();
        prop_assert!((total - part.total_norm.powf(rho)).abs() < 1e-9 * total.max(1.0));
        prop_assert!((part.pieces() as f64) <= part.piece_bound(rho) + 1e-9);
        prop_assert_eq!(part.breakpoints[0], 0.0);
        prop_assert!((part.breakpoints.last().unwrap() - horizon).abs() < 1e-12);
        prop_assert!(part.breakpoints.windows(2).all(|w| w[0] < w[1]));
        for &pw in &part.piece_powers {
            prop_assert!(pw <= 0.5f64.powf(rho) * (1.0 + 1e-9));
        }
    }
}

#[test]
fn free_gaussian_matches_closed_form() {
    let grid = GridSpec::new(1, 40.0, 2048).unwrap();
    let spec = Spectral::new(grid).unwrap();
    let u0 = FieldState::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
    for t in [0.1, 0.5, 1.0] {
        let u = spec.free_propagate(&u0, t);
        let s = Complex64::new(1.0, 4.0 * t);
        let exact = FieldState::from_fn(grid, |x| (-(x[0] * x[0]) / s).exp() / s.sqrt());
        assert!(max_abs_diff(&u, &exact) < 1e-10, "t = {t}");
    }
}

#[test]
fn gn_quotient_peaks_at_ground_state() {
    let gs = GroundState::compute(1, 7.0, &ShootingOptions::default()).unwrap();
    let at_q = gn_quotient(gs.norms.mass, gs.norms.grad2, gs.norms.pot, &gs.exps);
    let grid = GridSpec::new(1, 20.0, 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let u = random_band_limited(grid, 4.0, &mut rng).unwrap();
        let spec = Spectral::new(grid).unwrap();
        let s = nls_core::evolution::conserved_with(&spec, &u, &gs.exps);
        assert!(gn_quotient(s.mass, s.grad2, s.pot, &gs.exps) < at_q);
    }
}

fn focusing_setup() -> (SplitStep, FieldState) {
    let exps = derive_exponents(1, 7.0).unwrap();
    let grid = GridSpec::new(1, 20.0, 1024).unwrap();
    let stepper = SplitStep::new(grid, Model::focusing(exps)).unwrap();
    (stepper, gaussian(grid, 0.8, 1.0, [0.5, 0.0, 0.0]))
}

fn run(stepper: &SplitStep, u0: &FieldState, dt: f64, steps: usize) -> FieldState {
    let mut u = u0.clone();
    for _ in 0..steps {
        stepper.strang_step(&mut u, dt);
    }
    u
}

#[test]
fn strang_is_second_order() {
    let (stepper, u0) = focusing_setup();
    let reference = run(&stepper, &u0, 1e-4, 2000);
    let e1 = max_abs_diff(&run(&stepper, &u0, 4e-3, 50), &reference);
    let e2 = max_abs_diff(&run(&stepper, &u0, 2e-3, 100), &reference);
    let order = (e1 / e2).log2();
    assert!(
        (order - 2.0).abs() < 0.2,
        "observed order {order} ({e1:e}, {e2:e})"
    );
}

#[test]
fn strang_step_is_time_reversible() {
    let (stepper, u0) = focusing_setup();
    let forward = run(&stepper, &u0, 1e-3, 200);
    let back = run(&stepper, &forward.conj(), 1e-3, 200).conj();
    assert!(
        max_abs_diff(&back, &u0) < 1e-10,
        "{}",
        max_abs_diff(&back, &u0)
    );
}

#[test]
fn mass_and_energy_drift_stay_small() {
    let (stepper, u0) = focusing_setup();
    let before = stepper.conserved(&u0);
    let after = stepper.conserved(&run(&stepper, &u0, 1e-4, 5000));
    assert!((after.mass - before.mass).abs() < 1e-10 * before.mass);
    assert!((after.energy - before.energy).abs() < 1e-6 * before.energy.abs().max(1.0));
    assert!((after.momentum[0] - before.momentum[0]).abs() < 1e-8);
}
