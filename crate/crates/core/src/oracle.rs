//! Brute-force verification oracle on the full 2^N tensor-product space.
//!
//! Builds J_α = ½Σ_k σ_α^(k) from single-site Pauli matrices, assembles the
//! same Hamiltonian and jump operators as the Dicke-basis engine, and
//! evolves the full 2^N master equation. Restricted to N ≤ 4; the Dicke
//! engine must reproduce its observables to high precision since the
//! collective dynamics never leaves the j = N/2 sector.

use faer::{c64, Mat};

use crate::lindblad::{
    sample_observables, FiniteNSample, FiniteNTrajectory, MasterEquation, ObservableSet,
};
use crate::ode::{integrate as ode_integrate, OdeOptions};
use crate::spin::hermitize;
use crate::{Error, Result, SystemParams};

/// Largest emitter count the oracle accepts.
pub const MAX_ORACLE_N: usize = 4;

fn pauli(alpha: usize) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(2, 2);
    match alpha {
        0 => {
            m[(0, 1)] = c64::new(1.0, 0.0);
            m[(1, 0)] = c64::new(1.0, 0.0);
        }
        1 => {
            m[(0, 1)] = c64::new(0.0, -1.0);
            m[(1, 0)] = c64::new(0.0, 1.0);
        }
        _ => {
            m[(0, 0)] = c64::new(1.0, 0.0);
            m[(1, 1)] = c64::new(-1.0, 0.0);
        }
    }
    m
}

/// I_{2^k} ⊗ op ⊗ I_{2^(n−1−k)}.
fn single_site(op: &Mat<c64>, site: usize, n: usize) -> Mat<c64> {
    let left = Mat::<c64>::identity(1 << site, 1 << site);
    let right = Mat::<c64>::identity(1 << (n - 1 - site), 1 << (n - 1 - site));
    left.as_ref().kron(op.as_ref().kron(right.as_ref()))
}

/// Collective spin components on the full tensor-product space.
fn collective_ops(n: usize) -> [Mat<c64>; 3] {
    let dim = 1 << n;
    [0, 1, 2].map(|alpha| {
        let sigma = pauli(alpha);
        let mut acc = Mat::<c64>::zeros(dim, dim);
        for site in 0..n {
            acc += single_site(&sigma, site, n);
        }
        faer::Scale(c64::new(0.5, 0.0)) * &acc
    })
}

/// Evolve the full 2^N master equation from ⊗|g⟩ and report the same
/// collective observables as the Dicke-basis engine.
pub fn brute_force_oracle(
    params: &SystemParams,
    n_emitters: usize,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<FiniteNTrajectory> {
    if n_emitters == 0 {
        return Err(Error::InvalidParameter(
            "emitter count must be at least 1".into(),
        ));
    }
    if n_emitters > MAX_ORACLE_N {
        return Err(Error::OracleSizeExceeded { n: n_emitters });
    }
    params.validate()?;
    if t_grid.first() != Some(&0.0) {
        return Err(Error::InvalidParameter(
            "trajectory time grid must start at 0".into(),
        ));
    }

    let [jx, jy, jz] = collective_ops(n_emitters);
    let gamma_single = params.gamma_total / n_emitters as f64;
    let kappa = params.kappa();

    let anti = &jx * &jy + &jy * &jx;
    let hamiltonian = faer::Scale(c64::new(2.0 * params.omega, 0.0)) * &jx
        - faer::Scale(c64::new(0.5 * params.feedback_g * gamma_single, 0.0)) * &anti;
    let amp = (gamma_single / 2.0).sqrt();
    let jump_right = faer::Scale(c64::new(amp * kappa, 0.0)) * &jx
        + faer::Scale(c64::new(0.0, -amp)) * &jy;
    let jump_left =
        faer::Scale(c64::new(amp, 0.0)) * &jx + faer::Scale(c64::new(0.0, -amp)) * &jy;

    let master = MasterEquation::new(&hamiltonian, vec![jump_right, jump_left]);
    let observables = ObservableSet::from_components(jx, jy, jz);

    // ⊗|g⟩ is the last computational basis state.
    let dim = 1 << n_emitters;
    let mut rho0 = Mat::<c64>::zeros(dim, dim);
    rho0[(dim - 1, dim - 1)] = c64::new(1.0, 0.0);

    let mut samples: Vec<FiniteNSample> = Vec::with_capacity(t_grid.len());
    ode_integrate(
        |_t, rho: &Mat<c64>, out: &mut Mat<c64>| master.rhs_into(rho, out),
        rho0,
        t_grid,
        opts,
        |t, rho| samples.push(sample_observables(&observables, rho, n_emitters, t)),
        |rho| hermitize(rho),
    )?;

    Ok(FiniteNTrajectory {
        n_emitters,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{evolve, LindbladModel};
    use crate::spin::DickeDensityMatrix;

    fn params(omega: f64, g: f64) -> SystemParams {
        SystemParams::with_unit_gamma(omega, g).unwrap()
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
    }

    fn max_sample_deviation(a: &FiniteNTrajectory, b: &FiniteNTrajectory) -> f64 {
        let mut worst = 0.0f64;
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            worst = worst.max((sa.m - sb.m).abs().max());
            let da = sa.smom.as_matrix() - sb.smom.as_matrix();
            worst = worst.max(da.abs().max());
        }
        worst
    }

    #[test]
    fn refuses_large_n() {
        let res = brute_force_oracle(&params(0.3, 0.5), 5, &[0.0, 1.0], &OdeOptions::default());
        assert!(matches!(res, Err(Error::OracleSizeExceeded { n: 5 })));
    }

    #[test]
    fn n1_matches_dicke_engine_exactly() {
        let p = params(0.4, 0.5);
        let t = grid(10.0, 50);
        let opts = OdeOptions::default();
        let oracle = brute_force_oracle(&p, 1, &t, &opts).unwrap();
        let model = LindbladModel::build(&p, 1).unwrap();
        let rho0 = DickeDensityMatrix::ground_state(1).unwrap();
        let dicke = evolve(&model, &rho0, &t, &opts).unwrap().trajectory;
        // Same dimension, same operators: agreement is limited only by the
        // integrator tolerance.
        assert!(max_sample_deviation(&oracle, &dicke) < 1e-10);
    }

    #[test]
    fn n2_magnetization_agrees() {
        let p = params(0.4, 0.5);
        let t = grid(20.0, 80);
        let opts = OdeOptions::default();
        let oracle = brute_force_oracle(&p, 2, &t, &opts).unwrap();
        let model = LindbladModel::build(&p, 2).unwrap();
        let rho0 = DickeDensityMatrix::ground_state(2).unwrap();
        let dicke = evolve(&model, &rho0, &t, &opts).unwrap().trajectory;
        assert!(max_sample_deviation(&oracle, &dicke) < 1e-8);
    }

    #[test]
    fn n3_kappa_zero_agrees() {
        let p = params(0.3, -0.5);
        let t = grid(20.0, 80);
        let opts = OdeOptions::default();
        let oracle = brute_force_oracle(&p, 3, &t, &opts).unwrap();
        let model = LindbladModel::build(&p, 3).unwrap();
        let rho0 = DickeDensityMatrix::ground_state(3).unwrap();
        let dicke = evolve(&model, &rho0, &t, &opts).unwrap().trajectory;
        assert!(max_sample_deviation(&oracle, &dicke) < 1e-8);
    }
}
