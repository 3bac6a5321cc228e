//! Composite quadrature on uniform meshes.

/// Composite Simpson rule for samples on a uniform mesh with spacing `h`.
/// An even number of samples is handled by closing the last interval with
/// the 3/8 rule.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ if n % 2 == 1 => {
            let mut acc = values[0] + values[n - 1];
            for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            acc * h / 3.0
        }
        _ => {
            let head = simpson(&values[..n - 3], h);
            let t = &values[n - 4..];
            head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
        }
    }
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}

/// Surface area of the unit sphere `S^{N-1}` (2 for N = 1).
pub fn sphere_area(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / libm::tgamma(half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        for n in [5usize, 6, 9, 12] {
            let h = 2.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n)
                .map(|i| {
                    let x = i as f64 * h;
                    x * x * x - 2.0 * x + 1.0
                })
                .collect();
            assert!((simpson(&v, h) - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }
}
