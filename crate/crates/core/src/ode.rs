//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4), FSAL).
//!
//! One integrator serves every dynamics level in the crate: the mean-field
//! 3-vector, the joint mean-field + covariance system, and complex density
//! matrices evolved directly in matrix form. States plug in through
//! [`OdeState`]; samples are taken by landing steps exactly on the requested
//! grid times, so output grids are reproduced bit-for-bit.

use faer::{c64, Mat};
use nalgebra::SVector;

use crate::{Error, Result};

/// Minimal state interface for the embedded RK integrator.
pub trait OdeState: Clone {
    /// self += a·x
    fn axpy(&mut self, a: f64, x: &Self);
    /// self *= a
    fn scale(&mut self, a: f64);
    /// Scaled RMS norm of `err` against atol + rtol·max(|y0|, |y1|),
    /// elementwise. A return value ≤ 1 accepts the step.
    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64;
}

/// Integrator controls. Defaults follow the crate-wide tolerances
/// (rtol 1e-9, atol 1e-11).
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial trial step; chosen from the grid span when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            h_init: None,
            max_steps: 10_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rtol.is_finite() || self.rtol <= 0.0 || !self.atol.is_finite() || self.atol < 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "invalid tolerances rtol = {}, atol = {}",
                self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau. The last row of A holds the 5th-order
// weights, so the 7th stage is evaluated at the solution (FSAL).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Integrate dy/dt = f(t, y) and sample the solution at every grid time.
///
/// `t_grid` must be strictly increasing; the first entry is the initial time.
/// `on_sample(t, y)` fires at each grid time (including the first);
/// `on_accept` runs after every accepted step and may project the state
/// (e.g. re-Hermitize a density matrix). Returns the final state.
pub fn integrate<S, F, G, H>(
    mut rhs: F,
    y0: S,
    t_grid: &[f64],
    opts: &OdeOptions,
    mut on_sample: G,
    mut on_accept: H,
) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S, &mut S),
    G: FnMut(f64, &S),
    H: FnMut(&mut S),
{
    opts.validate()?;
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "time grid must be strictly increasing".into(),
            ));
        }
    }

    let mut t = t_grid[0];
    let mut y = y0;
    on_sample(t, &y);
    if t_grid.len() == 1 {
        return Ok(y);
    }
    let span = *t_grid.last().unwrap() - t;

    // Stage derivatives; k[6] doubles as the FSAL slot.
    let mut k: Vec<S> = vec![y.clone(); 7];
    let mut y_new = y.clone();

    rhs(t, &y, &mut k[0]);

    let mut h = opts.h_init.unwrap_or_else(|| (span * 1e-4).min(1e-3));
    let mut next_sample = 1usize;
    let mut steps = 0usize;

    while next_sample < t_grid.len() {
        if steps >= opts.max_steps {
            return Err(Error::IntegrationFailed {
                t_last: t,
                reason: format!("exceeded {} steps", opts.max_steps),
            });
        }
        steps += 1;

        // Land exactly on the next sample time.
        let t_target = t_grid[next_sample];
        let mut h_step = h;
        let mut clipped = false;
        if t + h_step >= t_target {
            h_step = t_target - t;
            clipped = true;
        }
        if h_step < 1e-14 * t.abs().max(1.0) {
            return Err(Error::IntegrationFailed {
                t_last: t,
                reason: "step size underflow".into(),
            });
        }

        for stage in 1..7 {
            let mut y_stage = y.clone();
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage - 1][j];
                if a != 0.0 {
                    y_stage.axpy(h_step * a, kj);
                }
            }
            if stage == 6 {
                y_new = y_stage;
                rhs(t + h_step, &y_new, &mut k[6]);
            } else {
                let (_, tail) = k.split_at_mut(stage);
                rhs(t + C[stage - 1] * h_step, &y_stage, &mut tail[0]);
            }
        }

        // Error estimate h·Σ (b_i − b̂_i)·k_i.
        let mut y_err = k[0].clone();
        y_err.scale(h_step * E[0]);
        for (i, ki) in k.iter().enumerate().skip(1) {
            if E[i] != 0.0 {
                y_err.axpy(h_step * E[i], ki);
            }
        }

        let err = S::error_norm(&y_err, &y, &y_new, opts.rtol, opts.atol);

        if err.is_finite() && err <= 1.0 {
            std::mem::swap(&mut y, &mut y_new);
            on_accept(&mut y);
            k.swap(0, 6); // FSAL: k7 becomes next k1

            if clipped {
                t = t_target;
                on_sample(t_target, &y);
                next_sample += 1;
            } else {
                t += h_step;
            }

            let grow = if err == 0.0 {
                MAX_SCALE
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
            };
            let proposal = h_step * grow;
            // A clipped step says nothing about the natural step size.
            h = if clipped { h.max(proposal) } else { proposal };
        } else {
            let shrink = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 0.9)
            } else {
                MIN_SCALE
            };
            h = h_step * shrink;
            // k[0] still holds f(t, y); nothing else to restore.
        }
    }

    Ok(y)
}

impl<const D: usize> OdeState for SVector<f64, D> {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }

    fn scale(&mut self, a: f64) {
        *self *= a;
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..D {
            let scale = atol + rtol * y0[i].abs().max(y1[i].abs());
            let r = err[i] / scale;
            acc += r * r;
        }
        (acc / D as f64).sqrt()
    }
}

impl OdeState for Mat<c64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        let s = c64::new(a, 0.0);
        faer::zip!(self.as_mut(), x.as_ref()).for_each(|faer::unzip!(dst, src)| *dst += s * *src);
    }

    fn scale(&mut self, a: f64) {
        let s = c64::new(a, 0.0);
        faer::zip!(self.as_mut()).for_each(|faer::unzip!(dst)| *dst *= s);
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        let (rows, cols) = (err.nrows(), err.ncols());
        let mut acc = 0.0;
        for j in 0..cols {
            for i in 0..rows {
                let scale = atol + rtol * y0[(i, j)].norm().max(y1[(i, j)].norm());
                let r = err[(i, j)].norm() / scale;
                acc += r * r;
            }
        }
        (acc / (rows * cols) as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector2;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::default();
        let grid = [0.0, 1.0, 2.5, 5.0];
        let mut samples = Vec::new();
        let y = integrate(
            |_t, y: &SVector<f64, 1>, dy: &mut SVector<f64, 1>| {
                dy[0] = -y[0];
            },
            SVector::<f64, 1>::new(1.0),
            &grid,
            &opts,
            |t, y| samples.push((t, y[0])),
            |_| {},
        )
        .unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
        for (t, v) in samples {
            assert!((v - (-t).exp()).abs() < 1e-10, "bad sample at t = {t}");
        }
    }

    #[test]
    fn harmonic_oscillator_long_run() {
        let omega = 2.0;
        let opts = OdeOptions::with_tolerances(1e-10, 1e-12);
        let grid: Vec<f64> = (0..=500).map(|i| i as f64 * 0.1).collect();
        let mut worst = 0.0f64;
        integrate(
            |_t, y: &Vector2<f64>, dy: &mut Vector2<f64>| {
                dy[0] = y[1];
                dy[1] = -omega * omega * y[0];
            },
            Vector2::new(1.0, 0.0),
            &grid,
            &opts,
            |t, y| {
                worst = worst.max((y[0] - (omega * t).cos()).abs());
            },
            |_| {},
        )
        .unwrap();
        assert!(worst < 1e-7, "max deviation {worst:.3e} over 50 time units");
    }

    #[test]
    fn matrix_coherence_rotation() {
        // dρ/dt = −i[H, ρ] with H = diag(1/2, −1/2): ρ01(t) = e^{−it} ρ01(0).
        let h = {
            let mut m = Mat::<c64>::zeros(2, 2);
            m[(0, 0)] = c64::new(0.5, 0.0);
            m[(1, 1)] = c64::new(-0.5, 0.0);
            m
        };
        let mut rho0 = Mat::<c64>::zeros(2, 2);
        rho0[(0, 0)] = c64::new(0.5, 0.0);
        rho0[(1, 1)] = c64::new(0.5, 0.0);
        rho0[(0, 1)] = c64::new(0.5, 0.0);
        rho0[(1, 0)] = c64::new(0.5, 0.0);

        let opts = OdeOptions::with_tolerances(1e-11, 1e-13);
        let grid = [0.0, 1.0, 3.0, 7.0];
        let rho = integrate(
            |_t, r: &Mat<c64>, dr: &mut Mat<c64>| {
                let comm = &h * r - r * &h;
                faer::zip!(dr.as_mut(), comm.as_ref())
                    .for_each(|faer::unzip!(d, c)| *d = c64::new(0.0, -1.0) * *c);
            },
            rho0,
            &grid,
            &opts,
            |_, _| {},
            |_| {},
        )
        .unwrap();
        let want = c64::new(0.0, -7.0).exp() * 0.5;
        assert!((rho[(0, 1)] - want).norm() < 1e-9);
    }

    #[test]
    fn reports_failure_time_on_blowup() {
        // dy/dt = y² from y(0) = 1 diverges at t = 1.
        let opts = OdeOptions::default();
        let res = integrate(
            |_t, y: &SVector<f64, 1>, dy: &mut SVector<f64, 1>| {
                dy[0] = y[0] * y[0];
            },
            SVector::<f64, 1>::new(1.0),
            &[0.0, 2.0],
            &opts,
            |_, _| {},
            |_| {},
        );
        match res {
            Err(Error::IntegrationFailed { t_last, .. }) => {
                assert!(t_last <= 1.0 + 1e-6, "failure reported at t = {t_last}");
            }
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let opts = OdeOptions::default();
        let res = integrate(
            |_t, _y: &SVector<f64, 1>, dy: &mut SVector<f64, 1>| dy[0] = 0.0,
            SVector::<f64, 1>::new(1.0),
            &[0.0, 1.0, 1.0],
            &opts,
            |_, _| {},
            |_| {},
        );
        assert!(res.is_err());
    }
}
