//! Finite-N master equation in the Dicke basis.
//!
//! The feedback-modified master equation is
//!
//!   ∂tρ = −i[2Ω J_x − (gγ/2){J_x, J_y}, ρ]
//!         + (γ/2)·D((2g+1)J_x − iJ_y)ρ + (γ/2)·D(J_x − iJ_y)ρ
//!
//! with D(L)ρ = LρL† − ½{L†L, ρ} and the single-emitter rate γ = Γ/N, so
//! that sweeps at fixed Γ are comparable across N. Time evolution
//! integrates ρ directly as an (N+1)×(N+1) matrix; spectra and steady
//! states go through a dense superoperator representation whose size
//! (N+1)² is guarded by a configurable cap.

use faer::{c64, Mat};
use nalgebra::{Matrix3, Vector3};

use crate::ode::{integrate as ode_integrate, OdeOptions};
use crate::spin::{
    hermiticity_residual, hermitize, trace, trace_product, DickeDensityMatrix,
    SpinOperators,
};
use crate::{Error, Result, SystemParams};

/// Finite-N model: Hamiltonian and the two collective jump operators.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    params: SystemParams,
    n_emitters: usize,
    ops: SpinOperators,
    hamiltonian: Mat<c64>,
    jump_right: Mat<c64>,
    jump_left: Mat<c64>,
    master: MasterEquation,
    observables: ObservableSet,
}

impl LindbladModel {
    /// Assemble H = 2Ω J_x − (gγ/2){J_x, J_y} and the jumps
    /// √(γ/2)·(κJ_x − iJ_y), √(γ/2)·(J_x − iJ_y) with γ = Γ/N.
    pub fn build(params: &SystemParams, n_emitters: usize) -> Result<Self> {
        params.validate()?;
        let ops = SpinOperators::new(n_emitters)?;
        let gamma_single = params.gamma_total / n_emitters as f64;
        let kappa = params.kappa();

        let anti = &ops.jx * &ops.jy + &ops.jy * &ops.jx;
        let hamiltonian = scaled(&ops.jx, c64::new(2.0 * params.omega, 0.0))
            - scaled(&anti, c64::new(0.5 * params.feedback_g * gamma_single, 0.0));

        let amp = (gamma_single / 2.0).sqrt();
        let jump_right = scaled(&ops.jx, c64::new(amp * kappa, 0.0))
            + scaled(&ops.jy, c64::new(0.0, -amp));
        let jump_left =
            scaled(&ops.jx, c64::new(amp, 0.0)) + scaled(&ops.jy, c64::new(0.0, -amp));

        let master = MasterEquation::new(
            &hamiltonian,
            vec![jump_right.clone(), jump_left.clone()],
        );
        let observables = ObservableSet::new(&ops);

        Ok(Self {
            params: *params,
            n_emitters,
            ops,
            hamiltonian,
            jump_right,
            jump_left,
            master,
            observables,
        })
    }

    #[inline]
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    #[inline]
    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n_emitters + 1
    }

    pub fn spin_ops(&self) -> &SpinOperators {
        &self.ops
    }

    pub fn hamiltonian(&self) -> &Mat<c64> {
        &self.hamiltonian
    }

    pub fn jump_right(&self) -> &Mat<c64> {
        &self.jump_right
    }

    pub fn jump_left(&self) -> &Mat<c64> {
        &self.jump_left
    }

    /// Master-equation right-hand side, dρ/dt = L[ρ].
    pub fn rhs_into(&self, rho: &Mat<c64>, out: &mut Mat<c64>) {
        self.master.rhs_into(rho, out);
    }
}

/// Shared master-equation machinery: dρ = Kρ + ρK† + Σ_k L_k ρ L_k†
/// with K = −iH − ½ Σ_k L_k†L_k.
#[derive(Debug, Clone)]
pub(crate) struct MasterEquation {
    k: Mat<c64>,
    k_dag: Mat<c64>,
    jumps: Vec<Mat<c64>>,
    jump_dags: Vec<Mat<c64>>,
}

impl MasterEquation {
    pub(crate) fn new(hamiltonian: &Mat<c64>, jumps: Vec<Mat<c64>>) -> Self {
        let dim = hamiltonian.nrows();
        let mut k = scaled(hamiltonian, c64::new(0.0, -1.0));
        let mut jump_dags = Vec::with_capacity(jumps.len());
        for l in &jumps {
            let l_dag = dagger(l);
            let ldl = &l_dag * l;
            k -= scaled(&ldl, c64::new(0.5, 0.0));
            jump_dags.push(l_dag);
        }
        let k_dag = dagger(&k);
        debug_assert_eq!(k.nrows(), dim);
        Self {
            k,
            k_dag,
            jumps,
            jump_dags,
        }
    }

    pub(crate) fn rhs_into(&self, rho: &Mat<c64>, out: &mut Mat<c64>) {
        *out = &self.k * rho + rho * &self.k_dag;
        for (l, l_dag) in self.jumps.iter().zip(&self.jump_dags) {
            *out += l * rho * l_dag;
        }
    }

    /// Effective non-Hermitian generator K (for the superoperator build).
    pub(crate) fn k(&self) -> &Mat<c64> {
        &self.k
    }

    pub(crate) fn jumps(&self) -> &[Mat<c64>] {
        &self.jumps
    }
}

/// Symmetrized second moments ½⟨{J_α, J_β}⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub xx: f64,
    pub xy: f64,
    pub xz: f64,
    pub yy: f64,
    pub yz: f64,
    pub zz: f64,
}

impl SecondMoments {
    pub fn as_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.xx, self.xy, self.xz, //
            self.xy, self.yy, self.yz, //
            self.xz, self.yz, self.zz,
        )
    }
}

/// Collective observables measured along trajectories: the three J_α and
/// the six symmetrized products ½{J_α, J_β}.
#[derive(Debug, Clone)]
pub(crate) struct ObservableSet {
    jx: Mat<c64>,
    jy: Mat<c64>,
    jz: Mat<c64>,
    sym: [Mat<c64>; 6],
}

impl ObservableSet {
    pub(crate) fn new(ops: &SpinOperators) -> Self {
        Self::from_components(ops.jx.clone(), ops.jy.clone(), ops.jz.clone())
    }

    pub(crate) fn from_components(jx: Mat<c64>, jy: Mat<c64>, jz: Mat<c64>) -> Self {
        let half = c64::new(0.5, 0.0);
        let pairs = [
            (&jx, &jx),
            (&jx, &jy),
            (&jx, &jz),
            (&jy, &jy),
            (&jy, &jz),
            (&jz, &jz),
        ];
        let sym = pairs.map(|(a, b)| faer::Scale(half) * (a * b + b * a));
        Self { jx, jy, jz, sym }
    }

    /// (⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩) and ½⟨{J_α, J_β}⟩ in one pass over ρ.
    pub(crate) fn measure(&self, rho: &Mat<c64>) -> (Vector3<f64>, SecondMoments) {
        let j_exp = Vector3::new(
            trace_product(rho, &self.jx).re,
            trace_product(rho, &self.jy).re,
            trace_product(rho, &self.jz).re,
        );
        let v: Vec<f64> = self
            .sym
            .iter()
            .map(|op| trace_product(rho, op).re)
            .collect();
        (
            j_exp,
            SecondMoments {
                xx: v[0],
                xy: v[1],
                xz: v[2],
                yy: v[3],
                yz: v[4],
                zz: v[5],
            },
        )
    }
}

/// One sampled point of a finite-N trajectory.
#[derive(Debug, Clone, Copy)]
pub struct FiniteNSample {
    pub t: f64,
    /// Magnetization ⟨J_α⟩/N.
    pub m: Vector3<f64>,
    /// Symmetrized second moments ½⟨{J_α, J_β}⟩ (unnormalized).
    pub smom: SecondMoments,
    /// Finite-N fluctuation covariance, Σ_{αβ} = (½⟨{J_α,J_β}⟩ − ⟨J_α⟩⟨J_β⟩)/N.
    pub sigma: Matrix3<f64>,
    /// Spin squeezing ξ_N, when the magnetization direction is defined.
    pub xi_n: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FiniteNTrajectory {
    pub n_emitters: usize,
    pub samples: Vec<FiniteNSample>,
}

/// Trajectory plus the final density matrix.
#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub trajectory: FiniteNTrajectory,
    pub final_state: DickeDensityMatrix,
}

/// Allowed trace / Hermiticity drift along a trajectory.
pub const EVOLVE_DRIFT_TOL: f64 = 1e-8;

pub(crate) fn sample_observables(
    obs: &ObservableSet,
    rho: &Mat<c64>,
    n_emitters: usize,
    t: f64,
) -> FiniteNSample {
    let n = n_emitters as f64;
    let (j_exp, smom) = obs.measure(rho);
    let m = j_exp / n;
    let sigma = (smom.as_matrix() - j_exp * j_exp.transpose()) / n;
    let xi_n = xi_from_moments(n_emitters, &j_exp, &smom).ok();
    FiniteNSample {
        t,
        m,
        smom,
        sigma,
        xi_n,
    }
}

/// Propagate ρ through the master equation, sampling collective
/// observables at every grid time. The grid must start at 0. The state is
/// re-Hermitized after each accepted step; trace and Hermiticity are
/// checked against [`EVOLVE_DRIFT_TOL`] at every sample.
pub fn evolve(
    model: &LindbladModel,
    rho0: &DickeDensityMatrix,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<EvolveResult> {
    if rho0.n_emitters() != model.n_emitters {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: rho0.dim(),
        });
    }
    if t_grid.first() != Some(&0.0) {
        return Err(Error::InvalidParameter(
            "trajectory time grid must start at 0".into(),
        ));
    }

    let mut samples = Vec::with_capacity(t_grid.len());
    let mut drift_error: Option<(f64, String)> = None;
    let final_mat = ode_integrate(
        |_t, rho: &Mat<c64>, out: &mut Mat<c64>| model.rhs_into(rho, out),
        rho0.matrix().clone(),
        t_grid,
        opts,
        |t, rho| {
            if drift_error.is_none() {
                let tr = trace(rho);
                let herm = hermiticity_residual(rho);
                if (tr.re - 1.0).abs() > EVOLVE_DRIFT_TOL
                    || tr.im.abs() > EVOLVE_DRIFT_TOL
                    || herm > EVOLVE_DRIFT_TOL
                {
                    drift_error = Some((
                        t,
                        format!("trace {tr} / hermiticity {herm:.3e} drifted beyond tolerance"),
                    ));
                }
            }
            samples.push(sample_observables(&model.observables, rho, model.n_emitters, t));
        },
        |rho| hermitize(rho),
    )?;
    if let Some((t_last, reason)) = drift_error {
        return Err(Error::IntegrationFailed { t_last, reason });
    }

    Ok(EvolveResult {
        trajectory: FiniteNTrajectory {
            n_emitters: model.n_emitters,
            samples,
        },
        final_state: DickeDensityMatrix::from_raw(model.n_emitters, final_mat),
    })
}

/// Spin squeezing ξ_N = 2·min Δ²J_⊥ / (N·j) from first and second moments.
///
/// `j_exp` is the unnormalized ⟨J⟩; `smom` holds ½⟨{J_α,J_β}⟩. The minimal
/// transverse variance is the smaller eigenvalue of the 2×2 covariance in
/// any orthonormal basis of the plane perpendicular to ⟨J⟩; the result is
/// independent of that basis choice.
pub fn xi_from_moments(
    n_emitters: usize,
    j_exp: &Vector3<f64>,
    smom: &SecondMoments,
) -> Result<f64> {
    let n = n_emitters as f64;
    let j_len = j_exp.norm();
    if j_len / n <= crate::fluctuations::DIRECTION_TOL {
        return Err(Error::UndefinedDirection { magnitude: j_len });
    }
    let dir = j_exp / j_len;

    // Transverse frame: start from the coordinate axis least aligned with n.
    let mut seed_axis = 0;
    for axis in 1..3 {
        if dir[axis].abs() < dir[seed_axis].abs() {
            seed_axis = axis;
        }
    }
    let mut e1 = Vector3::zeros();
    e1[seed_axis] = 1.0;
    e1 -= dir * dir[seed_axis];
    e1.normalize_mut();
    let e2 = dir.cross(&e1);

    let s2 = smom.as_matrix();
    let cov = |a: &Vector3<f64>, b: &Vector3<f64>| {
        (a.transpose() * s2 * b)[(0, 0)] - a.dot(j_exp) * b.dot(j_exp)
    };
    let c11 = cov(&e1, &e1);
    let c22 = cov(&e2, &e2);
    let c12 = cov(&e1, &e2);

    let half_trace = 0.5 * (c11 + c22);
    let disc = (0.25 * (c11 - c22) * (c11 - c22) + c12 * c12).max(0.0).sqrt();
    let min_var = half_trace - disc;

    let j_per_emitter = j_len / n;
    Ok(2.0 * min_var / (n * j_per_emitter))
}

/// ξ_N of a state, building the required operator moments on the fly.
pub fn finite_size_squeezing(rho: &DickeDensityMatrix) -> Result<f64> {
    let ops = SpinOperators::new(rho.n_emitters())?;
    let obs = ObservableSet::new(&ops);
    let (j_exp, smom) = obs.measure(rho.matrix());
    xi_from_moments(rho.n_emitters(), &j_exp, &smom)
}

/// Column-stacking vectorization: vec(ρ)[i + j·d] = ρ_{ij}.
pub fn vec_col(m: &Mat<c64>) -> Vec<c64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &[c64], dim: usize) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] = v[i + j * dim];
        }
    }
    m
}

/// Controls for dense superoperator work.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Largest N for which a dense (N+1)²-dimensional Liouvillian is built.
    pub dense_cap: usize,
    /// Zero-mode ball radius as a fraction of max|Re λ|.
    pub zero_tol_factor: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            dense_cap: 80,
            zero_tol_factor: 1e-8,
        }
    }
}

/// Dense Liouvillian in the column-stacking convention:
/// L = I⊗K + conj(K)⊗I + Σ_k conj(L_k)⊗L_k, so that vec(∂tρ) = L·vec(ρ).
pub fn build_liouvillian(model: &LindbladModel, opts: &SpectrumOptions) -> Result<Mat<c64>> {
    if model.n_emitters > opts.dense_cap {
        return Err(Error::DenseCapExceeded {
            n: model.n_emitters,
            cap: opts.dense_cap,
        });
    }
    let d = model.dim();
    let k = model.master.k();
    let mut l = Mat::<c64>::zeros(d * d, d * d);

    // I ⊗ K: d diagonal blocks of K.
    for blk in 0..d {
        for i in 0..d {
            for j in 0..d {
                l[(blk * d + i, blk * d + j)] += k[(i, j)];
            }
        }
    }
    // conj(K) ⊗ I.
    for ia in 0..d {
        for ja in 0..d {
            let val = k[(ia, ja)].conj();
            if val != c64::new(0.0, 0.0) {
                for ib in 0..d {
                    l[(ia * d + ib, ja * d + ib)] += val;
                }
            }
        }
    }
    // Σ conj(L_k) ⊗ L_k.
    for jump in model.master.jumps() {
        for ia in 0..d {
            for ja in 0..d {
                let val = jump[(ia, ja)].conj();
                if val == c64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..d {
                    for jb in 0..d {
                        l[(ia * d + ib, ja * d + jb)] += val * jump[(ib, jb)];
                    }
                }
            }
        }
    }
    Ok(l)
}

/// Liouvillian eigenvalue set with the identified zero mode and gap.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<c64>,
    /// Λ = min |Re λ| over the nonzero modes.
    pub gap: f64,
    pub zero_mode_index: usize,
}

/// Largest admissible positive real part of any Liouvillian eigenvalue.
pub const SPECTRUM_REAL_TOL: f64 = 1e-8;

fn locate_zero_mode(eigenvalues: &[c64], zero_tol_factor: f64) -> Result<(usize, f64, f64)> {
    let max_re = eigenvalues
        .iter()
        .map(|l| l.re.abs())
        .fold(0.0f64, f64::max);
    for l in eigenvalues {
        if l.re > SPECTRUM_REAL_TOL {
            return Err(Error::SpectrumInvariant(format!(
                "eigenvalue with positive real part: {l}"
            )));
        }
    }
    let ztol = zero_tol_factor * max_re;
    let inside: Vec<usize> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.norm() <= ztol)
        .map(|(i, _)| i)
        .collect();
    if inside.len() != 1 {
        return Err(Error::SpectrumInvariant(format!(
            "{} eigenvalues inside the zero-tolerance ball (radius {ztol:.3e})",
            inside.len()
        )));
    }
    let zero_idx = inside[0];
    let gap = eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != zero_idx)
        .map(|(_, l)| l.re.abs())
        .fold(f64::INFINITY, f64::min);
    Ok((zero_idx, gap, ztol))
}

/// Full dense spectrum of the Liouvillian and the spectral gap Λ.
pub fn spectral_gap(model: &LindbladModel, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let l = build_liouvillian(model, opts)?;
    let eigenvalues = l
        .eigenvalues()
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let (zero_mode_index, gap, _) = locate_zero_mode(&eigenvalues, opts.zero_tol_factor)?;
    Ok(SpectrumResult {
        eigenvalues,
        gap,
        zero_mode_index,
    })
}

/// Residual bound ‖L·vec(ρ_ss)‖₂ accepted for a steady state.
pub const STEADY_STATE_RESIDUAL_TOL: f64 = 1e-10;

/// Steady state as the null vector of the dense Liouvillian.
///
/// The full eigendecomposition identifies the zero mode (erroring out with
/// the multiplicity if the null space is degenerate at tolerance); the
/// eigenvector is Hermitized and trace-normalized, then polished by a
/// bordered linear solve if the residual demands it.
pub fn steady_state(model: &LindbladModel, opts: &SpectrumOptions) -> Result<DickeDensityMatrix> {
    let l = build_liouvillian(model, opts)?;
    let d = model.dim();

    let eigen = l.eigen().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let eigenvalues: Vec<c64> = eigen.S().column_vector().iter().cloned().collect();

    let max_re = eigenvalues
        .iter()
        .map(|lam| lam.re.abs())
        .fold(0.0f64, f64::max);
    let ztol = opts.zero_tol_factor * max_re;
    let inside: Vec<usize> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, lam)| lam.norm() <= ztol)
        .map(|(i, _)| i)
        .collect();
    if inside.len() > 1 {
        return Err(Error::DegenerateSteadyState {
            multiplicity: inside.len(),
        });
    }
    // Fall back to the eigenvalue closest to zero if the ball came up empty.
    let zero_idx = inside.first().copied().unwrap_or_else(|| {
        eigenvalues
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.norm().total_cmp(&b.norm()))
            .map(|(i, _)| i)
            .unwrap()
    });

    let u = eigen.U();
    let vec: Vec<c64> = (0..d * d).map(|r| u[(r, zero_idx)]).collect();
    let mut rho = unvec_col(&vec, d);
    hermitize(&mut rho);
    let tr = trace(&rho);
    if tr.norm() < 1e-14 {
        return Err(Error::Linalg(
            "null vector has vanishing trace; cannot normalize".into(),
        ));
    }
    let inv = c64::new(1.0, 0.0) / tr;
    rho = scaled(&rho, inv);

    let mut residual = liouvillian_residual(&l, &rho);
    if residual > STEADY_STATE_RESIDUAL_TOL {
        rho = bordered_null_solve(&l, d)?;
        hermitize(&mut rho);
        let tr = trace(&rho);
        rho = scaled(&rho, c64::new(1.0, 0.0) / tr);
        residual = liouvillian_residual(&l, &rho);
    }
    if residual > STEADY_STATE_RESIDUAL_TOL {
        return Err(Error::Linalg(format!(
            "steady-state residual {residual:.3e} exceeds {STEADY_STATE_RESIDUAL_TOL:.1e}"
        )));
    }

    DickeDensityMatrix::try_new(model.n_emitters, rho)
}

fn liouvillian_residual(l: &Mat<c64>, rho: &Mat<c64>) -> f64 {
    let v = vec_col(rho);
    let n = l.nrows();
    let mut acc = 0.0;
    for r in 0..n {
        let mut s = c64::new(0.0, 0.0);
        for c in 0..n {
            s += l[(r, c)] * v[c];
        }
        acc += s.norm_sqr();
    }
    acc.sqrt()
}

/// Solve L·x = 0 with the trace constraint by replacing the first row of L
/// with the trace functional and solving against e₀.
fn bordered_null_solve(l: &Mat<c64>, d: usize) -> Result<Mat<c64>> {
    let n = l.nrows();
    let mut bordered = l.clone();
    for c in 0..n {
        bordered[(0, c)] = c64::new(0.0, 0.0);
    }
    for i in 0..d {
        bordered[(0, i * (d + 1))] = c64::new(1.0, 0.0);
    }
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(0, 0)] = c64::new(1.0, 0.0);
    let lu = bordered.partial_piv_lu();
    let x = faer::linalg::solvers::Solve::solve(&lu, &rhs);
    let v: Vec<c64> = (0..n).map(|r| x[(r, 0)]).collect();
    Ok(unvec_col(&v, d))
}

pub(crate) fn scaled(m: &Mat<c64>, z: c64) -> Mat<c64> {
    faer::Scale(z) * m
}

pub(crate) fn dagger(m: &Mat<c64>) -> Mat<c64> {
    m.adjoint().to_owned()
}
