//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

// Butcher tableau of the Dormand–Prince pair.
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

// Error coefficients: fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Accepted/rejected step counters of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            ..Self::default()
        }
    }

    /// Integrates `dy/dt = f(t, y)` from `(t0, y0)` and returns the state at each
    /// time of `t_out`, which must be sorted and not precede `t0`. Steps are
    /// clipped so every output time is hit exactly.
    pub fn integrate<F, const N: usize>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        t_out: &[f64],
    ) -> Result<(Vec<[f64; N]>, StepStats)>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut stats = StepStats::default();
        let mut out = Vec::with_capacity(t_out.len());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&f, t, &y, &k1);

        for &target in t_out {
            if target < t {
                return Err(Error::Integrator(format!(
                    "output time {target} precedes current time {t}"
                )));
            }
            while t < target {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::Integrator("maximum step count exceeded".into()));
                }
                let remaining = target - t;
                let clipped = h >= remaining;
                let step = if clipped { remaining } else { h };

                let k2 = f(t + C2 * step, &axpy(&y, &[(A21, &k1)], step));
                let k3 = f(t + C3 * step, &axpy(&y, &[(A31, &k1), (A32, &k2)], step));
                let k4 = f(
                    t + C4 * step,
                    &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step),
                );
                let k5 = f(
                    t + C5 * step,
                    &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step),
                );
                let k6 = f(
                    t + step,
                    &axpy(
                        &y,
                        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                        step,
                    ),
                );
                let y_new = axpy(
                    &y,
                    &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                    step,
                );
                let k7 = f(t + step, &y_new);

                let mut err_sq = 0.0;
                for i in 0..N {
                    let e = step
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                            + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err_sq += (e / sc).powi(2);
                }
                let err = (err_sq / N as f64).sqrt();
                if !err.is_finite() {
                    return Err(Error::Integrator("non-finite state".into()));
                }

                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 {
                    stats.accepted += 1;
                    t = if clipped { target } else { t + step };
                    y = y_new;
                    k1 = k7;
                    // a clipped step says nothing about the natural step size
                    if !clipped || factor < 1.0 {
                        h = step * factor;
                    }
                } else {
                    stats.rejected += 1;
                    h = step * factor.min(1.0);
                }
            }
            out.push(y);
        }
        Ok((out, stats))
    }

    fn initial_step<F, const N: usize>(&self, f: &F, t: f64, y: &[f64; N], k1: &[f64; N]) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let scale = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = (0..N).map(|i| (y[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..N).map(|i| (k1[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(y, &[(1.0, k1)], h0);
        let k2 = f(t + h0, &y1);
        let d2 = (0..N)
            .map(|i| ((k2[i] - k1[i]) / scale(i)).powi(2))
            .sum::<f64>()
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }
}
