//! Gaussian dynamics of quantum fluctuation operators.
//!
//! Fluctuations F_α = (J_α − ⟨J_α⟩)/√N become bosonic modes in the
//! thermodynamic limit, with symplectic structure s_{αβ} = Σ_δ ε_{αβδ}⟨m_δ⟩
//! and covariance Σ_{αβ} = ½⟨{F_α, F_β}⟩. The covariance propagates as
//!
//!   dΣ/dt = −sAs + GΣ + ΣGᵀ
//!
//! with s and G evaluated at the running magnetization m(t), which is
//! co-integrated. Rotating the frame so that the z-axis follows
//! n = m/|m| isolates a canonical pair (x̂, p̂); the spin squeezing in the
//! large-N limit is ξ = 2·min eigenvalue of their 2×2 covariance.
//!
//! The drift matrix G splits into generator contributions
//! D^L, D^C, D^B (linear in ω, h, B) and Q^C = s(h + hᵀ), Q^B = sB; their
//! sum reproduces the closed form of G used by the propagation.

use nalgebra::{Matrix2, Matrix3, SVector, Vector3};
use rayon::prelude::*;

use crate::meanfield::{canonical_m0, mf_rhs, Magnetization};
use crate::ode::{integrate as ode_integrate, OdeOptions};
use crate::{Error, Result, SystemParams};

/// ε_{abc} on indices 0, 1, 2.
#[inline]
fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Model matrices entering the fluctuation generator.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrices {
    /// Diffusion kernel A = (Γ/2)·diag(1+κ², 2, 0); positive semidefinite.
    pub a: Matrix3<f64>,
    /// Antisymmetric dissipative kernel, B₁₂ = −(Γ/2)(κ+1).
    pub b: Matrix3<f64>,
    /// Collective Hamiltonian kernel h = −(gΓ/2)(e₁e₂ᵀ + e₂e₁ᵀ).
    pub h: Matrix3<f64>,
    /// Local drive vector ω = (2Ω, 0, 0).
    pub omega_vec: Vector3<f64>,
}

impl StructureMatrices {
    pub fn new(params: &SystemParams) -> Self {
        let gamma = params.gamma_total;
        let kappa = params.kappa();
        let g = params.feedback_g;

        let a = Matrix3::from_diagonal(&Vector3::new(
            0.5 * gamma * (1.0 + kappa * kappa),
            gamma,
            0.0,
        ));
        let mut b = Matrix3::zeros();
        b[(0, 1)] = -0.5 * gamma * (kappa + 1.0);
        b[(1, 0)] = 0.5 * gamma * (kappa + 1.0);

        let mut h = Matrix3::zeros();
        h[(0, 1)] = -0.5 * g * gamma;
        h[(1, 0)] = -0.5 * g * gamma;

        Self {
            a,
            b,
            h,
            omega_vec: Vector3::new(2.0 * params.omega, 0.0, 0.0),
        }
    }
}

/// Symplectic matrix of the fluctuation algebra: s_{αβ} = Σ_δ ε_{αβδ} m_δ.
pub fn s_matrix(m: &Magnetization) -> Matrix3<f64> {
    Matrix3::new(
        0.0, m.z, -m.y, //
        -m.z, 0.0, m.x, //
        m.y, -m.x, 0.0,
    )
}

/// Drift matrix of the covariance flow, in closed form.
pub fn g_matrix(m: &Magnetization, params: &SystemParams) -> Matrix3<f64> {
    let gamma = params.gamma_total;
    let kappa = params.kappa();
    let two_omega = 2.0 * params.omega;
    Matrix3::new(
        gamma * m.z,
        0.0,
        gamma * m.x,
        0.0,
        kappa * gamma * m.z,
        kappa * gamma * m.y - two_omega,
        -2.0 * gamma * m.x,
        two_omega - 2.0 * kappa * gamma * m.y,
        0.0,
    )
}

/// The five generator contributions whose sum is [`g_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorDecomposition {
    pub d_l: Matrix3<f64>,
    pub d_c: Matrix3<f64>,
    pub d_b: Matrix3<f64>,
    pub q_c: Matrix3<f64>,
    pub q_b: Matrix3<f64>,
}

impl GeneratorDecomposition {
    pub fn sum(&self) -> Matrix3<f64> {
        self.d_l + self.d_c + self.d_b + self.q_c + self.q_b
    }
}

/// Assemble D^L, D^C, D^B, Q^C, Q^B from the structure matrices at a given
/// magnetization.
pub fn generator_decomposition(
    m: &Magnetization,
    params: &SystemParams,
) -> GeneratorDecomposition {
    let sm = StructureMatrices::new(params);
    let s = s_matrix(m);
    let h_sym = sm.h + sm.h.transpose();

    // D^L_{αδ} = −Σ_μ ω_μ ε_{μαδ}
    let mut d_l = Matrix3::zeros();
    for alpha in 0..3 {
        for delta in 0..3 {
            let mut acc = 0.0;
            for mu in 0..3 {
                acc -= sm.omega_vec[mu] * levi_civita(mu, alpha, delta);
            }
            d_l[(alpha, delta)] = acc;
        }
    }

    // D^C_{αγ} = −Σ_{μν} (h + hᵀ)_{μν} ε_{ναγ} ⟨m_μ⟩
    let mut d_c = Matrix3::zeros();
    // D^B_{αγ} = −Σ_{μν} B_{μν} ⟨m_ν⟩ ε_{μαγ}
    let mut d_b = Matrix3::zeros();
    for alpha in 0..3 {
        for gamma_idx in 0..3 {
            let mut acc_c = 0.0;
            let mut acc_b = 0.0;
            for mu in 0..3 {
                for nu in 0..3 {
                    acc_c -= h_sym[(mu, nu)] * levi_civita(nu, alpha, gamma_idx) * m[mu];
                    acc_b -= sm.b[(mu, nu)] * m[nu] * levi_civita(mu, alpha, gamma_idx);
                }
            }
            d_c[(alpha, gamma_idx)] = acc_c;
            d_b[(alpha, gamma_idx)] = acc_b;
        }
    }

    let q_c = s * h_sym;
    let q_b = s * sm.b;

    GeneratorDecomposition {
        d_l,
        d_c,
        d_b,
        q_c,
        q_b,
    }
}

/// Fluctuation covariance attached to the magnetization that defines its
/// symplectic structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub sigma: Matrix3<f64>,
    pub m: Magnetization,
}

impl CovarianceState {
    pub const SYMMETRY_TOL: f64 = 1e-10;
    pub const PSD_TOL: f64 = 1e-8;

    pub fn try_new(sigma: Matrix3<f64>, m: Magnetization) -> Result<Self> {
        let asym = (sigma - sigma.transpose()).abs().max();
        if asym > Self::SYMMETRY_TOL {
            return Err(Error::InvalidParameter(format!(
                "covariance not symmetric: residual {asym:.3e}"
            )));
        }
        let min_eig = sigma
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -Self::PSD_TOL {
            return Err(Error::InvalidParameter(format!(
                "covariance not positive semidefinite: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { sigma, m })
    }

    /// Symplectic matrix implied by the attached magnetization.
    pub fn s(&self) -> Matrix3<f64> {
        s_matrix(&self.m)
    }
}

/// Covariance of the collective ground state ⊗|g⟩: Σ(0) = diag(1/4, 1/4, 0)
/// with m = (0, 0, −1/2).
pub fn initial_covariance() -> CovarianceState {
    CovarianceState {
        sigma: Matrix3::from_diagonal(&Vector3::new(0.25, 0.25, 0.0)),
        m: canonical_m0(),
    }
}

/// Magnetization below which the principal direction is undefined.
pub const DIRECTION_TOL: f64 = 1e-10;

/// Rotation that aligns the magnetization with the z-axis, plus the
/// rescaled 2×2 covariance of the canonical pair (x̂, p̂).
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalFrame {
    /// Proper rotation with R·n = e_z.
    pub rotation: Matrix3<f64>,
    /// Magnetization length j = |m|.
    pub j: f64,
    /// (1/j) × upper-left 2×2 block of RΣRᵀ.
    pub sigma_hat: Matrix2<f64>,
    /// Variance of the rotated F̃_z, a classical degree of freedom.
    /// Reported for diagnostics only.
    pub fz_variance: f64,
}

/// Rotate into the frame of the magnetization direction.
///
/// Convention: R rotates about u = n×e_z by arccos(n·e_z); n = +e_z gives
/// the identity and n = −e_z a π-rotation about x. Any composition with a
/// rotation about e_z would leave the eigenvalues of `sigma_hat` unchanged.
pub fn principal_frame(m: &Magnetization, sigma: &Matrix3<f64>) -> Result<PrincipalFrame> {
    let j = m.norm();
    if j <= DIRECTION_TOL {
        return Err(Error::UndefinedDirection { magnitude: j });
    }
    let n = m / j;
    let e_z = Vector3::z();
    let cos_theta = n.dot(&e_z);

    let rotation: Matrix3<f64> = if cos_theta >= 1.0 - 1e-14 {
        Matrix3::identity()
    } else if cos_theta <= -1.0 + 1e-14 {
        // π about the x-axis.
        Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))
    } else {
        let axis = nalgebra::Unit::new_normalize(n.cross(&e_z));
        *nalgebra::Rotation3::from_axis_angle(&axis, cos_theta.acos()).matrix()
    };

    let rotated = rotation * sigma * rotation.transpose();
    let sigma_hat = rotated.fixed_view::<2, 2>(0, 0) / j;

    // The rotated symplectic form must be canonical: ((0, j), (−j, 0)) ⊕ 0.
    debug_assert!({
        let s_rot = rotation * s_matrix(m) * rotation.transpose();
        (s_rot[(0, 1)] - j).abs() < 1e-10
            && (s_rot[(1, 0)] + j).abs() < 1e-10
            && s_rot[(0, 2)].abs() < 1e-10
            && s_rot[(2, 2)].abs() < 1e-10
    });

    Ok(PrincipalFrame {
        rotation,
        j,
        sigma_hat: sigma_hat.into_owned(),
        fz_variance: rotated[(2, 2)],
    })
}

/// Thermodynamic-limit spin squeezing: twice the smaller eigenvalue of the
/// canonical-pair covariance.
pub fn squeezing_xi(frame: &PrincipalFrame) -> f64 {
    let s = &frame.sigma_hat;
    let half_trace = 0.5 * (s[(0, 0)] + s[(1, 1)]);
    let half_gap = 0.5 * (s[(0, 0)] - s[(1, 1)]);
    let disc = (half_gap * half_gap + s[(0, 1)] * s[(1, 0)]).max(0.0).sqrt();
    2.0 * (half_trace - disc)
}

/// ξ straight from a magnetization and covariance.
pub fn xi_of(m: &Magnetization, sigma: &Matrix3<f64>) -> Result<f64> {
    Ok(squeezing_xi(&principal_frame(m, sigma)?))
}

/// One sample of the joint mean-field + covariance flow.
#[derive(Debug, Clone, Copy)]
pub struct FluctuationSample {
    pub t: f64,
    pub m: Magnetization,
    pub sigma: Matrix3<f64>,
    /// Squeezing parameter, when the magnetization direction is defined.
    pub xi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FluctuationTrajectory {
    pub samples: Vec<FluctuationSample>,
}

impl FluctuationTrajectory {
    pub fn final_sample(&self) -> &FluctuationSample {
        self.samples.last().expect("non-empty trajectory")
    }
}

// State packing: [m_x, m_y, m_z, Σxx, Σxy, Σxz, Σyy, Σyz, Σzz].
type JointState = SVector<f64, 9>;

fn pack(m: &Magnetization, sigma: &Matrix3<f64>) -> JointState {
    SVector::<f64, 9>::from([
        m.x,
        m.y,
        m.z,
        sigma[(0, 0)],
        sigma[(0, 1)],
        sigma[(0, 2)],
        sigma[(1, 1)],
        sigma[(1, 2)],
        sigma[(2, 2)],
    ])
}

fn unpack(y: &JointState) -> (Magnetization, Matrix3<f64>) {
    let m = Vector3::new(y[0], y[1], y[2]);
    let sigma = Matrix3::new(
        y[3], y[4], y[5], //
        y[4], y[6], y[7], //
        y[5], y[7], y[8],
    );
    (m, sigma)
}

/// Co-integrate the magnetization and the six independent covariance
/// entries: dm/dt from the mean-field flow, dΣ/dt = −sAs + GΣ + ΣGᵀ with
/// s and G at the running m(t).
pub fn evolve_covariance(
    m0: &Magnetization,
    sigma0: &Matrix3<f64>,
    params: &SystemParams,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<FluctuationTrajectory> {
    params.validate()?;
    let a = StructureMatrices::new(params).a;

    let rhs = |_t: f64, y: &JointState, dy: &mut JointState| {
        let (m, sigma) = unpack(y);
        let dm = mf_rhs(&m, params);
        let s = s_matrix(&m);
        let g = g_matrix(&m, params);
        let noise = -s * a * s;
        debug_assert!((noise - noise.transpose()).abs().max() < 1e-12 * noise.abs().max().max(1.0));
        let dsigma = noise + g * sigma + sigma * g.transpose();
        *dy = pack(&dm, &dsigma);
    };

    let mut samples = Vec::with_capacity(t_grid.len());
    ode_integrate(
        rhs,
        pack(m0, sigma0),
        t_grid,
        opts,
        |t, y| {
            let (m, sigma) = unpack(y);
            let xi = xi_of(&m, &sigma).ok();
            samples.push(FluctuationSample { t, m, sigma, xi });
        },
        |_| {},
    )?;

    Ok(FluctuationTrajectory { samples })
}

/// One grid point of the squeezing landscape.
#[derive(Debug, Clone)]
pub struct LandscapePoint {
    pub omega_over_gamma: f64,
    pub g: f64,
    pub xi: Result<f64>,
}

/// ξ at Γt = `t_eval` over a grid of (Ω/Γ, g), evolved from the collective
/// ground state. Points are computed in parallel; per-point failures are
/// carried in the result rather than aborting the sweep.
pub fn squeezing_landscape(
    omegas: &[f64],
    gs: &[f64],
    gamma_total: f64,
    t_eval: f64,
    opts: &OdeOptions,
) -> Vec<LandscapePoint> {
    let points: Vec<(f64, f64)> = omegas
        .iter()
        .flat_map(|&w| gs.iter().map(move |&g| (w, g)))
        .collect();

    points
        .into_par_iter()
        .map(|(omega, g)| {
            let xi = SystemParams::new(omega * gamma_total, gamma_total, g).and_then(|params| {
                let init = initial_covariance();
                let traj = evolve_covariance(
                    &init.m,
                    &init.sigma,
                    &params,
                    &[0.0, t_eval * gamma_total],
                    opts,
                )?;
                let last = traj.final_sample();
                xi_of(&last.m, &last.sigma)
            });
            LandscapePoint {
                omega_over_gamma: omega,
                g,
                xi,
            }
        })
        .collect()
}
