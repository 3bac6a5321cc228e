//! Adaptive Dormand–Prince 5(4) integrator with fourth-order dense output.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep<const D: usize> {
    pub t0: f64,
    pub h: f64,
    coeffs: [[f64; D]; 5],
}

impl<const D: usize> DenseStep<D> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.coeffs;
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        }
        out
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    Reached,
    Event,
    StepLimit,
}

#[derive(Debug, Clone)]
pub struct Solution<const D: usize> {
    pub steps: Vec<DenseStep<D>>,
    pub t_end: f64,
    pub y_end: [f64; D],
    pub stop: Stop,
}

impl<const D: usize> Solution<D> {
    /// Dense-output value; `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<[f64; D]> {
        let first = self.steps.first()?;
        if t < first.t0 || t > self.t_end {
            return None;
        }
        let idx = self
            .steps
            .partition_point(|s| s.t1() < t)
            .min(self.steps.len() - 1);
        Some(self.steps[idx].eval(t))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
            h_max: f64::INFINITY,
        }
    }
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0` to `t_end`, stopping early at the
    /// end of the first accepted step for which `event(t, y)` is true.
    pub fn integrate<const D: usize, F, E>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; D],
        t_end: f64,
        mut event: E,
    ) -> Solution<D>
    where
        F: FnMut(f64, &[f64; D]) -> [f64; D],
        E: FnMut(f64, &[f64; D]) -> bool,
    {
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&y, &k1, t_end - t0);
        let mut steps = Vec::new();
        let mut stop = Stop::StepLimit;
        let mut err_prev: f64 = 1e-4;
        let mut attempts = 0usize;
        while attempts < self.max_steps {
            attempts += 1;
            if t >= t_end {
                stop = Stop::Reached;
                break;
            }
            h = h.min(t_end - t).min(self.h_max);
            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y1 = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h, &y1);

            let mut err = 0.0;
            for i in 0..D {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / D as f64).sqrt();
            if !err.is_finite() {
                h *= 0.1;
                continue;
            }
            if err <= 1.0 {
                let mut coeffs = [[0.0; D]; 5];
                for i in 0..D {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    coeffs[0][i] = y[i];
                    coeffs[1][i] = ydiff;
                    coeffs[2][i] = bspl;
                    coeffs[3][i] = ydiff - h * k7[i] - bspl;
                    coeffs[4][i] = h
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                steps.push(DenseStep { t0: t, h, coeffs });
                t += h;
                y = y1;
                k1 = k7;
                // PI step-size controller
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                err_prev = err.max(1e-4);
                h *= fac.clamp(0.2, 10.0);
                if event(t, &y) {
                    stop = Stop::Event;
                    break;
                }
            } else {
                h *= (0.9 * err.powf(-0.2)).max(0.2);
            }
        }
        if t >= t_end && stop == Stop::StepLimit {
            stop = Stop::Reached;
        }
        Solution {
            steps,
            t_end: t,
            y_end: y,
            stop,
        }
    }

    fn initial_step<const D: usize>(&self, y: &[f64; D], dy: &[f64; D], span: f64) -> f64 {
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for i in 0..D {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 += (y[i] / sc).powi(2);
            d1 += (dy[i] / sc).powi(2);
        }
        let h = if d0 < 1e-10 || d1 < 1e-10 {
            1e-6
        } else {
            0.01 * (d0 / d1).sqrt()
        };
        h.min(span.abs()).min(self.h_max).max(1e-12)
    }
}
