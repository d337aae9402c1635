//! Mean-field dynamics of the magnetization in the thermodynamic limit.
//!
//! The magnetization m = (⟨m_x⟩, ⟨m_y⟩, ⟨m_z⟩) obeys the closed system
//!
//!   ∂t⟨m_x⟩ = Γ⟨m_x⟩⟨m_z⟩
//!   ∂t⟨m_y⟩ = −2Ω⟨m_z⟩ + Γκ⟨m_y⟩⟨m_z⟩
//!   ∂t⟨m_z⟩ = 2Ω⟨m_y⟩ − Γ⟨m_x⟩² − Γκ⟨m_y⟩²
//!
//! which conserves |m| and, away from κ = 0, the combination
//! C_κ = Γ⟨m_x⟩^κ / (Γκ⟨m_y⟩ − 2Ω). On the C = 0 manifold (m_x = 0) the
//! flow reduces to two variables and supports either persistent
//! oscillations (time-crystal phase, Ω > |κ|Γ/4) or relaxation to a
//! stationary state with ⟨m_z⟩_ss = −sign(κ)·√(1/4 − 4Ω²/(Γκ)²).

use nalgebra::Vector3;

use crate::ode::{integrate as ode_integrate, OdeOptions};
use crate::{Error, Result, SystemParams};

/// Mean-field order parameter (⟨m_x⟩, ⟨m_y⟩, ⟨m_z⟩).
pub type Magnetization = Vector3<f64>;

/// Canonical initial condition: all emitters in the ground state.
pub fn canonical_m0() -> Magnetization {
    Vector3::new(0.0, 0.0, -0.5)
}

/// Right-hand side of the mean-field equations.
pub fn mf_rhs(m: &Magnetization, params: &SystemParams) -> Magnetization {
    let gamma = params.gamma_total;
    let kappa = params.kappa();
    let two_omega = 2.0 * params.omega;
    Vector3::new(
        gamma * m.x * m.z,
        -two_omega * m.z + gamma * kappa * m.y * m.z,
        two_omega * m.y - gamma * m.x * m.x - gamma * kappa * m.y * m.y,
    )
}

/// Jacobian of [`mf_rhs`] at `m`.
pub fn mf_jacobian(m: &Magnetization, params: &SystemParams) -> nalgebra::Matrix3<f64> {
    let gamma = params.gamma_total;
    let kappa = params.kappa();
    let two_omega = 2.0 * params.omega;
    nalgebra::Matrix3::new(
        gamma * m.z,
        0.0,
        gamma * m.x,
        0.0,
        gamma * kappa * m.z,
        gamma * kappa * m.y - two_omega,
        -2.0 * gamma * m.x,
        two_omega - 2.0 * gamma * kappa * m.y,
        0.0,
    )
}

/// Reduced flow on the C = 0 manifold (m_x ≡ 0): returns (dm_y/dt, dm_z/dt).
pub fn reduced_rhs(my: f64, mz: f64, params: &SystemParams) -> (f64, f64) {
    let gamma = params.gamma_total;
    let kappa = params.kappa();
    let two_omega = 2.0 * params.omega;
    (
        -two_omega * mz + gamma * kappa * my * mz,
        two_omega * my - gamma * kappa * my * my,
    )
}

/// Which conserved quantity applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantBranch {
    /// C_κ = Γ m_x^κ / (Γκ m_y − 2Ω), κ ≠ 0.
    Kappa,
    /// C_0 = m_x · exp(Γ m_y / (2Ω)), κ = 0.
    KappaZero,
}

/// Value of the constant of motion together with the branch that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantOfMotion {
    pub value: f64,
    pub branch: ConstantBranch,
}

const KAPPA_INTEGER_TOL: f64 = 1e-9;

/// Evaluate C_κ (κ ≠ 0) or C_0 (κ = 0) at a phase-space point.
///
/// Domain violations (m_x < 0 with non-integer κ, vanishing denominator,
/// Ω = 0 on the κ = 0 branch) are reported as errors rather than silent NaN.
pub fn constant_of_motion(m: &Magnetization, params: &SystemParams) -> Result<ConstantOfMotion> {
    let gamma = params.gamma_total;
    let kappa = params.kappa();

    if kappa == 0.0 {
        if params.omega <= 0.0 {
            return Err(Error::Domain(
                "C_0 requires a nonzero drive (Omega > 0)".into(),
            ));
        }
        let value = m.x * (gamma * m.y / (2.0 * params.omega)).exp();
        return Ok(ConstantOfMotion {
            value,
            branch: ConstantBranch::KappaZero,
        });
    }

    let denom = gamma * kappa * m.y - 2.0 * params.omega;
    if denom.abs() < 1e-14 * gamma.max(params.omega).max(1.0) {
        return Err(Error::Domain(format!(
            "C_kappa denominator vanishes (Gamma*kappa*m_y - 2*Omega = {denom:.3e})"
        )));
    }

    let rounded = kappa.round();
    let mx_pow = if (kappa - rounded).abs() <= KAPPA_INTEGER_TOL {
        if m.x == 0.0 && rounded < 0.0 {
            return Err(Error::Domain(
                "m_x = 0 with negative kappa: m_x^kappa diverges".into(),
            ));
        }
        m.x.powi(rounded as i32)
    } else {
        if m.x < 0.0 {
            return Err(Error::Domain(format!(
                "m_x = {} < 0 with non-integer kappa = {kappa}",
                m.x
            )));
        }
        if m.x == 0.0 && kappa < 0.0 {
            return Err(Error::Domain(
                "m_x = 0 with negative kappa: m_x^kappa diverges".into(),
            ));
        }
        m.x.powf(kappa)
    };

    Ok(ConstantOfMotion {
        value: gamma * mx_pow / denom,
        branch: ConstantBranch::Kappa,
    })
}

/// One sampled point of a mean-field trajectory.
#[derive(Debug, Clone, Copy)]
pub struct MeanFieldSample {
    pub t: f64,
    pub m: Magnetization,
    /// Constant of motion at this point, when its domain conditions hold.
    pub c: Option<f64>,
}

/// Mean-field trajectory on a caller-supplied time grid.
#[derive(Debug, Clone)]
pub struct MeanFieldTrajectory {
    pub samples: Vec<MeanFieldSample>,
}

impl MeanFieldTrajectory {
    pub fn final_m(&self) -> Magnetization {
        self.samples.last().expect("non-empty trajectory").m
    }
}

/// Norm drift allowed along a trajectory: | |m(t)|² − |m(0)|² |.
pub const NORM_DRIFT_TOL: f64 = 1e-9;
/// Allowed drift of the constant of motion where it is defined.
pub const CONSTANT_DRIFT_TOL: f64 = 1e-7;

/// Default tolerances for mean-field integrations; tight enough that the
/// conservation checks hold over Γt = 500.
pub fn default_ode_options() -> OdeOptions {
    OdeOptions::with_tolerances(1e-11, 1e-13)
}

/// Integrate the mean-field equations over `t_grid`, enforcing
/// norm conservation within [`NORM_DRIFT_TOL`] and drift of the constant
/// of motion within [`CONSTANT_DRIFT_TOL`] where the constant is defined.
pub fn integrate(
    m0: &Magnetization,
    params: &SystemParams,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<MeanFieldTrajectory> {
    params.validate()?;
    let norm0 = m0.norm_squared();
    let c0 = constant_of_motion(m0, params).ok().map(|c| c.value);

    let mut samples = Vec::with_capacity(t_grid.len());
    ode_integrate(
        |_t, m: &Magnetization, dm: &mut Magnetization| *dm = mf_rhs(m, params),
        *m0,
        t_grid,
        opts,
        |t, m| {
            let c = constant_of_motion(m, params).ok().map(|c| c.value);
            samples.push(MeanFieldSample { t, m: *m, c });
        },
        |_| {},
    )?;

    for s in &samples {
        let drift = (s.m.norm_squared() - norm0).abs();
        if drift > NORM_DRIFT_TOL {
            return Err(Error::IntegrationFailed {
                t_last: s.t,
                reason: format!("|m|^2 drift {drift:.3e} exceeds {NORM_DRIFT_TOL:.1e}"),
            });
        }
        if let (Some(c0), Some(c)) = (c0, s.c) {
            let drift = (c - c0).abs();
            if drift > CONSTANT_DRIFT_TOL {
                return Err(Error::IntegrationFailed {
                    t_last: s.t,
                    reason: format!(
                        "constant of motion drift {drift:.3e} exceeds {CONSTANT_DRIFT_TOL:.1e}"
                    ),
                });
            }
        }
    }

    Ok(MeanFieldTrajectory { samples })
}

/// Dynamical phase of a parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseLabel {
    TimeCrystal,
    Stationary { mz_ss: f64 },
}

impl PhaseLabel {
    pub fn is_time_crystal(&self) -> bool {
        matches!(self, PhaseLabel::TimeCrystal)
    }
}

/// Analytic phase classification: time crystal iff Ω > |κ|Γ/4.
///
/// The boundary itself is assigned to the stationary phase with mz_ss = 0,
/// continuing the stationary branch.
pub fn classify_phase(params: &SystemParams) -> PhaseLabel {
    let kappa = params.kappa();
    let omega_c = 0.25 * kappa.abs() * params.gamma_total;
    if params.omega > omega_c {
        PhaseLabel::TimeCrystal
    } else if params.omega == omega_c {
        PhaseLabel::Stationary { mz_ss: 0.0 }
    } else {
        // Strictly inside the stationary phase; κ ≠ 0 here since Ω ≥ 0.
        let ratio = 2.0 * params.omega / (params.gamma_total * kappa);
        let mz_ss = -kappa.signum() * (0.25 - ratio * ratio).sqrt();
        PhaseLabel::Stationary { mz_ss }
    }
}

/// Stationary magnetization on the C = 0 manifold, by 1-D root finding.
///
/// The fixed-point condition of the reduced flow on the |m| = 1/2 circle is
/// solved by bisection for m_y; m_x = 0 and m_z follows from the norm.
/// Only defined inside the stationary phase.
pub fn stationary_point(params: &SystemParams) -> Result<Magnetization> {
    let kappa = params.kappa();
    let gamma = params.gamma_total;
    if params.omega == 0.0 {
        // No drive: the ground state is stationary.
        return Ok(Vector3::new(0.0, 0.0, -0.5));
    }
    if classify_phase(params).is_time_crystal() || kappa == 0.0 {
        return Err(Error::Domain(
            "no stationary mean-field solution at these parameters".into(),
        ));
    }

    let sign = kappa.signum();
    let mz_of = |my: f64| -sign * (0.25 - my * my).max(0.0).sqrt();
    let f = |my: f64| mz_of(my) * (gamma * kappa * my - 2.0 * params.omega);

    let mut lo = 0.0;
    let mut hi = sign * 0.5 * (1.0 - 1e-12);
    if f(lo) * f(hi) > 0.0 {
        return Err(Error::Domain(
            "stationary root not bracketed on the C = 0 circle".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let my = 0.5 * (lo + hi);
    let m = Vector3::new(0.0, my, mz_of(my));

    let residual = mf_rhs(&m, params).norm();
    if residual > 1e-10 {
        return Err(Error::Domain(format!(
            "stationary residual {residual:.3e} after root finding"
        )));
    }
    Ok(m)
}

/// Options for the numeric phase classifier.
#[derive(Debug, Clone, Copy)]
pub struct PhaseScanOptions {
    /// Integration horizon in units of 1/Γ.
    pub horizon: f64,
    /// Peak-to-peak amplitude of m_z (over the last 20% of the window)
    /// above which the point is labelled a time crystal.
    pub amplitude_threshold: f64,
    pub ode: OdeOptions,
}

impl Default for PhaseScanOptions {
    fn default() -> Self {
        Self {
            horizon: 500.0,
            amplitude_threshold: 1e-3,
            ode: default_ode_options(),
        }
    }
}

/// Outcome of the numeric classifier.
#[derive(Debug, Clone, Copy)]
pub struct NumericClassification {
    pub label: PhaseLabel,
    /// Mean of m_z over the last 20% of the window.
    pub mz_late_mean: f64,
    /// Peak-to-peak amplitude of m_z over the same window.
    pub mz_peak_to_peak: f64,
}

/// Classify a parameter point by integrating the mean-field flow.
///
/// `m0` must lie on the C = 0 manifold (m_x = 0). The label is
/// `TimeCrystal` when m_z still oscillates above the amplitude threshold
/// at the end of the horizon; otherwise `Stationary` carrying the
/// late-time mean of m_z.
pub fn verify_phase_numerically(
    params: &SystemParams,
    opts: &PhaseScanOptions,
    m0: &Magnetization,
) -> Result<NumericClassification> {
    if m0.x != 0.0 {
        return Err(Error::InvalidParameter(
            "numeric classifier requires m_x(0) = 0 (C = 0 manifold)".into(),
        ));
    }
    let window_start = 0.8 * opts.horizon;
    let dt = 0.05;
    let n_tail = ((opts.horizon - window_start) / dt).round() as usize;
    let mut grid = Vec::with_capacity(n_tail + 2);
    grid.push(0.0);
    for i in 0..=n_tail {
        grid.push(window_start + i as f64 * dt);
    }

    let mut mz_min = f64::INFINITY;
    let mut mz_max = f64::NEG_INFINITY;
    let mut mz_sum = 0.0;
    let mut count = 0usize;
    ode_integrate(
        |_t, m: &Magnetization, dm: &mut Magnetization| *dm = mf_rhs(m, params),
        *m0,
        &grid,
        &opts.ode,
        |t, m| {
            if t >= window_start {
                mz_min = mz_min.min(m.z);
                mz_max = mz_max.max(m.z);
                mz_sum += m.z;
                count += 1;
            }
        },
        |_| {},
    )?;

    let peak_to_peak = mz_max - mz_min;
    let mean = mz_sum / count as f64;
    let label = if peak_to_peak > opts.amplitude_threshold {
        PhaseLabel::TimeCrystal
    } else {
        PhaseLabel::Stationary { mz_ss: mean }
    };
    Ok(NumericClassification {
        label,
        mz_late_mean: mean,
        mz_peak_to_peak: peak_to_peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(omega: f64, g: f64) -> SystemParams {
        SystemParams::with_unit_gamma(omega, g).unwrap()
    }

    fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
    }

    #[test]
    fn rhs_at_canonical_start() {
        // m = (0, 0, −1/2), g = 1/2, Ω = 0.3Γ → (0, 0.3Γ, 0)
        let p = params(0.3, 0.5);
        let d = mf_rhs(&canonical_m0(), &p);
        assert_eq!(d.x, 0.0);
        assert_abs_diff_eq!(d.y, 0.3, epsilon = 1e-15);
        assert_eq!(d.z, 0.0);

        // m_x stays zero from the canonical start for any parameters.
        let p2 = params(0.9, -1.3);
        assert_eq!(mf_rhs(&canonical_m0(), &p2).x, 0.0);
    }

    #[test]
    fn rhs_is_harmonic_at_kappa_zero() {
        let p = params(0.4, -0.5);
        let (a, b) = (0.21, -0.37);
        let d = mf_rhs(&Vector3::new(0.0, a, b), &p);
        assert_abs_diff_eq!(d.y, -2.0 * p.omega * b, epsilon = 1e-15);
        assert_abs_diff_eq!(d.z, 2.0 * p.omega * a, epsilon = 1e-15);
    }

    #[test]
    fn kappa_zero_oscillates_as_cosine() {
        // m_z(t) = −cos(2Ωt)/2 for κ = 0 from the canonical start.
        let p = params(0.3, -0.5);
        let grid = uniform_grid(50.0, 800);
        let traj = integrate(&canonical_m0(), &p, &grid, &default_ode_options()).unwrap();
        for s in &traj.samples {
            let want = -(2.0 * p.omega * s.t).cos() / 2.0;
            assert!(
                (s.m.z - want).abs() < 1e-7,
                "t = {}: mz = {}, want {}",
                s.t,
                s.m.z,
                want
            );
        }
    }

    #[test]
    fn stationary_value_matches_closed_form() {
        // g = 1/2, Ω = 0.3Γ → mz_ss = −0.4.
        let p = params(0.3, 0.5);
        let grid = uniform_grid(200.0, 100);
        let traj = integrate(&canonical_m0(), &p, &grid, &default_ode_options()).unwrap();
        assert_abs_diff_eq!(traj.final_m().z, -0.4, epsilon = 1e-4);
    }

    #[test]
    fn time_crystal_keeps_oscillating() {
        let p = params(0.75, 0.5);
        let grid = uniform_grid(200.0, 2000);
        let traj = integrate(&canonical_m0(), &p, &grid, &default_ode_options()).unwrap();
        let tail: Vec<f64> = traj
            .samples
            .iter()
            .filter(|s| s.t >= 160.0)
            .map(|s| s.m.z)
            .collect();
        let ptp = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - tail.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(ptp > 0.1, "peak-to-peak {ptp} too small for a time crystal");
    }

    #[test]
    fn norm_is_conserved() {
        for (omega, g) in [(0.3, 0.5), (0.75, 0.5), (0.3, -0.5), (0.6, -1.2)] {
            let p = params(omega, g);
            let grid = uniform_grid(500.0, 50);
            let traj = integrate(&canonical_m0(), &p, &grid, &default_ode_options()).unwrap();
            for s in &traj.samples {
                assert!((s.m.norm_squared() - 0.25).abs() <= NORM_DRIFT_TOL);
            }
        }
    }

    #[test]
    fn constant_of_motion_zero_cases() {
        let p = params(0.3, 0.5); // κ = 2
        let c = constant_of_motion(&canonical_m0(), &p).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.branch, ConstantBranch::Kappa);

        let p0 = params(0.3, -0.5); // κ = 0
        let c0 = constant_of_motion(&Vector3::new(0.0, 0.31, -0.1), &p0).unwrap();
        assert_eq!(c0.value, 0.0);
        assert_eq!(c0.branch, ConstantBranch::KappaZero);
    }

    #[test]
    fn constant_of_motion_domain_errors() {
        // Negative m_x with non-integer κ.
        let p = params(0.3, 0.25); // κ = 1.5
        let res = constant_of_motion(&Vector3::new(-0.1, 0.0, 0.4), &p);
        assert!(matches!(res, Err(Error::Domain(_))));

        // Vanishing denominator: Γκ m_y = 2Ω with κ = 2, m_y = 0.3, Ω = 0.3.
        let p = params(0.3, 0.5);
        let res = constant_of_motion(&Vector3::new(0.1, 0.3, 0.3), &p);
        assert!(matches!(res, Err(Error::Domain(_))));

        // κ = 0 requires a drive.
        let p = SystemParams::with_unit_gamma(0.0, -0.5).unwrap();
        let res = constant_of_motion(&Vector3::new(0.1, 0.1, 0.1), &p);
        assert!(matches!(res, Err(Error::Domain(_))));
    }

    #[test]
    fn constant_is_conserved_off_manifold() {
        // Start with m_x ≠ 0 so C_κ ≠ 0; κ = 2 keeps the power integer.
        // Ω = 1 keeps the denominator away from zero along the flow.
        let p = params(1.0, 0.5);
        let m0 = Vector3::new(0.3, 0.2, (0.25f64 - 0.09 - 0.04).sqrt());
        let grid = uniform_grid(20.0, 200);
        let traj = integrate(&m0, &p, &grid, &default_ode_options()).unwrap();
        let c0 = traj.samples[0].c.unwrap();
        assert_abs_diff_eq!(c0, 0.09 / (2.0 * 0.2 - 2.0), epsilon = 1e-15);
        for s in &traj.samples {
            let c = s.c.expect("constant defined along this trajectory");
            assert!(
                (c - c0).abs() <= CONSTANT_DRIFT_TOL,
                "C drift {:.3e} at t = {}",
                (c - c0).abs(),
                s.t
            );
        }
    }

    #[test]
    fn reduced_rhs_matches_full_flow() {
        let p = params(0.3, 0.5);
        let (dy, dz) = reduced_rhs(0.0, -0.5, &p);
        assert_abs_diff_eq!(dy, 0.3, epsilon = 1e-15);
        assert_eq!(dz, 0.0);

        for (my, mz) in [(0.1, -0.3), (-0.2, 0.4), (0.45, 0.05)] {
            let full = mf_rhs(&Vector3::new(0.0, my, mz), &p);
            let (ry, rz) = reduced_rhs(my, mz, &p);
            assert_eq!(full.y, ry);
            assert_eq!(full.z, rz);
        }
    }

    #[test]
    fn second_derivative_has_newton_form() {
        // Numerically differentiate m_z twice along a reduced trajectory and
        // compare with −4Ω²(1 − Γκ m_y/Ω)(1 − Γκ m_y/(2Ω)) m_z.
        let p = params(0.6, 0.5);
        let dt = 1e-3;
        let n = 4000;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let traj = integrate(&canonical_m0(), &p, &grid, &default_ode_options()).unwrap();
        let gamma_kappa = p.gamma_total * p.kappa();
        let mut checked = 0;
        for w in traj.samples.windows(3) {
            let (prev, mid, next) = (&w[0], &w[1], &w[2]);
            let d2 = (next.m.z - 2.0 * mid.m.z + prev.m.z) / (dt * dt);
            let want = -4.0 * p.omega * p.omega
                * (1.0 - gamma_kappa * mid.m.y / p.omega)
                * (1.0 - gamma_kappa * mid.m.y / (2.0 * p.omega))
                * mid.m.z;
            assert!(
                (d2 - want).abs() < 1e-4,
                "t = {}: d2 = {d2}, want {want}",
                mid.t
            );
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn classify_phase_examples() {
        assert_eq!(
            classify_phase(&params(0.3, 0.5)),
            PhaseLabel::Stationary { mz_ss: -0.4 }
        );
        assert!(classify_phase(&params(0.6, 0.5)).is_time_crystal());
        // κ = −2 flips the sign of the stationary magnetization.
        match classify_phase(&params(0.3, -1.5)) {
            PhaseLabel::Stationary { mz_ss } => assert_abs_diff_eq!(mz_ss, 0.4, epsilon = 1e-15),
            other => panic!("expected stationary, got {other:?}"),
        }
        // Boundary point goes to the stationary side with mz_ss = 0.
        assert_eq!(
            classify_phase(&params(0.5, 0.5)),
            PhaseLabel::Stationary { mz_ss: 0.0 }
        );
    }

    #[test]
    fn stationary_point_is_a_fixed_point() {
        for (omega, g) in [(0.3, 0.5), (0.1, 0.5), (0.3, -1.5), (0.45, 1.0)] {
            let p = params(omega, g);
            let m = stationary_point(&p).unwrap();
            assert!(mf_rhs(&m, &p).norm() <= 1e-10);
            assert_abs_diff_eq!(m.norm(), 0.5, epsilon = 1e-12);
            match classify_phase(&p) {
                PhaseLabel::Stationary { mz_ss } => {
                    assert_abs_diff_eq!(m.z, mz_ss, epsilon = 1e-10)
                }
                _ => panic!("expected stationary parameters"),
            }
        }
        assert!(stationary_point(&params(0.75, 0.5)).is_err());
    }

    #[test]
    fn numeric_classifier_agrees_on_representative_points() {
        let opts = PhaseScanOptions::default();
        // κ = 0: time crystal for any Ω > 0.
        let res = verify_phase_numerically(&params(0.1, -0.5), &opts, &canonical_m0()).unwrap();
        assert!(res.label.is_time_crystal());

        // Stationary point relaxes to the closed-form value.
        let res = verify_phase_numerically(&params(0.25, 0.5), &opts, &canonical_m0()).unwrap();
        assert!(!res.label.is_time_crystal());
        let want = -(0.25f64 - 4.0 * 0.0625 / 4.0).sqrt();
        assert!(
            (res.mz_late_mean - want).abs() < 1e-4,
            "late mean {} vs {}",
            res.mz_late_mean,
            want
        );

        let res = verify_phase_numerically(&params(0.75, 0.5), &opts, &canonical_m0()).unwrap();
        assert!(res.label.is_time_crystal());
    }

    #[test]
    fn numeric_classifier_rejects_off_manifold_start() {
        let res = verify_phase_numerically(
            &params(0.3, 0.5),
            &PhaseScanOptions::default(),
            &Vector3::new(0.1, 0.0, -0.4),
        );
        assert!(res.is_err());
    }
}
