//! Collective spin operators on the Dicke ladder.
//!
//! The ensemble of N two-level emitters is restricted to the maximal-spin
//! sector j = N/2, an (N+1)-dimensional ladder closed under the collective
//! dynamics. Basis ordering is fixed crate-wide: row 0 is |j, +j⟩ (fully
//! excited), row N is |j, −j⟩ (fully ground).

use faer::{c64, Mat};

use crate::{Error, Result};

/// Dense matrix representations of J_x, J_y, J_z and the lowering operator
/// J = J_x − iJ_y on the j = N/2 ladder.
///
/// All matrices are (N+1)×(N+1); jx, jy, jz are Hermitian and satisfy
/// [J_x, J_y] = iJ_z (and cyclic) and J_x² + J_y² + J_z² = j(j+1)·1.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    n_emitters: usize,
    pub jx: Mat<c64>,
    pub jy: Mat<c64>,
    pub jz: Mat<c64>,
    pub j_minus: Mat<c64>,
}

impl SpinOperators {
    /// Build the ladder matrices from ⟨j,m∓1|J∓|j,m⟩ = √(j(j+1) − m(m∓1)).
    pub fn new(n_emitters: usize) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::InvalidParameter(
                "emitter count must be at least 1".into(),
            ));
        }
        let dim = n_emitters + 1;
        let j = n_emitters as f64 / 2.0;

        let mut jx = Mat::<c64>::zeros(dim, dim);
        let mut jy = Mat::<c64>::zeros(dim, dim);
        let mut jz = Mat::<c64>::zeros(dim, dim);
        let mut j_minus = Mat::<c64>::zeros(dim, dim);

        for row in 0..dim {
            // m runs from +j (row 0) down to −j (row N).
            let m = j - row as f64;
            jz[(row, row)] = c64::new(m, 0.0);
            if row + 1 < dim {
                // J₋|j,m⟩ = c|j,m−1⟩ with c = √(j(j+1) − m(m−1)).
                let c = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
                j_minus[(row + 1, row)] = c64::new(c, 0.0);
                // J₊ = J₋†, so jx and jy are tridiagonal.
                jx[(row, row + 1)] = c64::new(c / 2.0, 0.0);
                jx[(row + 1, row)] = c64::new(c / 2.0, 0.0);
                jy[(row, row + 1)] = c64::new(0.0, -c / 2.0);
                jy[(row + 1, row)] = c64::new(0.0, c / 2.0);
            }
        }

        Ok(Self {
            n_emitters,
            jx,
            jy,
            jz,
            j_minus,
        })
    }

    #[inline]
    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    /// Hilbert-space dimension N + 1.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n_emitters + 1
    }

    /// Total spin length j = N/2.
    #[inline]
    pub fn spin_length(&self) -> f64 {
        self.n_emitters as f64 / 2.0
    }
}

/// Density matrix on the j = N/2 Dicke sector.
#[derive(Debug, Clone)]
pub struct DickeDensityMatrix {
    n_emitters: usize,
    rho: Mat<c64>,
}

impl DickeDensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-9;

    /// Validate Hermiticity, unit trace and positivity before wrapping.
    pub fn try_new(n_emitters: usize, rho: Mat<c64>) -> Result<Self> {
        let dim = n_emitters + 1;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.nrows(),
            });
        }
        let herm_res = hermiticity_residual(&rho);
        if herm_res > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian: residual {herm_res:.3e}"
            )));
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let eigs = rho
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Linalg(format!("{e:?}")))?;
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not positive: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { n_emitters, rho })
    }

    /// Wrap a matrix produced by a propagation step without re-validating.
    pub(crate) fn from_raw(n_emitters: usize, rho: Mat<c64>) -> Self {
        Self { n_emitters, rho }
    }

    /// Pure state |j,−j⟩⟨j,−j|: all emitters in the ground state.
    pub fn ground_state(n_emitters: usize) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::InvalidParameter(
                "emitter count must be at least 1".into(),
            ));
        }
        let dim = n_emitters + 1;
        let mut rho = Mat::<c64>::zeros(dim, dim);
        rho[(dim - 1, dim - 1)] = c64::new(1.0, 0.0);
        Ok(Self { n_emitters, rho })
    }

    #[inline]
    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n_emitters + 1
    }

    #[inline]
    pub fn matrix(&self) -> &Mat<c64> {
        &self.rho
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.rho
    }

    /// Smallest eigenvalue (positivity diagnostic).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eigs = self
            .rho
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Linalg(format!("{e:?}")))?;
        Ok(eigs.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

/// Tr(ρ·op). The imaginary part stays ≤ 1e-10 for Hermitian `op`.
pub fn expectation(rho: &DickeDensityMatrix, op: &Mat<c64>) -> Result<c64> {
    let dim = rho.dim();
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: op.nrows(),
        });
    }
    Ok(trace_product(rho.matrix(), op))
}

/// Tr(a·b) without forming the product.
pub fn trace_product(a: &Mat<c64>, b: &Mat<c64>) -> c64 {
    let n = a.nrows();
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn trace(a: &Mat<c64>) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        acc += a[(i, i)];
    }
    acc
}

/// max_{ij} |a_{ij} − conj(a_{ji})|.
pub fn hermiticity_residual(a: &Mat<c64>) -> f64 {
    let mut res: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            res = res.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    res
}

/// a ← (a + a†)/2.
pub fn hermitize(a: &mut Mat<c64>) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = c64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}
