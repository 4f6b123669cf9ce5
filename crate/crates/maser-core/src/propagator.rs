//! The exact one-interaction propagator on the truncated Fock space, in the
//! 2x2 block form over (ground, excited) atom components, plus a dense
//! matrix-exponential oracle for cross-checking it.
//!
//! Block entries follow the convention Delta = omega0 - omega >= 0 for the
//! overall phases; the channel built downstream is insensitive to those
//! phases either way.

use num_complex::Complex64;
use thiserror::Error;

use crate::dense::{CMatrix, DenseError};
use crate::params::{ModelParams, rabi_angle};

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("oracle limited to n_max <= {max}, got {got}")]
    OracleScale { max: usize, got: usize },
    #[error(transparent)]
    Dense(#[from] DenseError),
}

/// Largest truncation the dense oracle accepts.
pub const ORACLE_N_MAX: usize = 64;

/// e^{-i tau H} in blocks over H_S (+) H_S.
///
/// `gg[n]` and `ee[n]` are the diagonal blocks at photon number n; `eg[n]`
/// is the amplitude |n,-> -> |n-1,+> (valid n >= 1) and `ge[n]` the
/// amplitude |n,+> -> |n+1,-> (valid n <= n_max-1). Hard truncation: the
/// transition out of |n_max,+> is dropped.
#[derive(Debug, Clone)]
pub struct BlockPropagator {
    pub n_max: usize,
    pub omega_tau: f64,
    pub eta: f64,
    pub xi: f64,
    gg: Vec<Complex64>,
    ee: Vec<Complex64>,
    ge: Vec<Complex64>,
    eg: Vec<Complex64>,
}

fn phase(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), -theta.sin()) // e^{-i theta}
}

pub fn build_propagator(params: &ModelParams) -> BlockPropagator {
    let n_max = params.n_max;
    let (eta, xi) = params.dimensionless();
    let wt = params.omega_tau();
    let global = std::f64::consts::PI * eta.sqrt();
    let minus_i = Complex64::new(0.0, -1.0);

    let gg = (0..=n_max)
        .map(|n| phase(wt * n as f64 + global) * params.c(n))
        .collect();
    let ee = (0..=n_max)
        .map(|n| phase(wt * (n + 1) as f64 + global) * params.c(n + 1).conj())
        .collect();
    // |n,+> -> |n+1,->, amplitude -i e^{-i(wt(n+1)+global)} S~(n+1)
    let ge = (0..n_max)
        .map(|n| minus_i * phase(wt * (n + 1) as f64 + global) * params.s_tilde(n + 1))
        .collect();
    // |n,-> -> |n-1,+>, amplitude -i e^{-i(wt n+global)} S~(n)
    let eg = (1..=n_max)
        .map(|n| minus_i * phase(wt * n as f64 + global) * params.s_tilde(n))
        .collect();
    BlockPropagator { n_max, omega_tau: wt, eta, xi, gg, ee, ge, eg }
}

impl BlockPropagator {
    pub fn gg(&self) -> &[Complex64] {
        &self.gg
    }

    pub fn ee(&self) -> &[Complex64] {
        &self.ee
    }

    /// 2x2 restriction to the invariant subspace of total quantum number m,
    /// ordered (|m,->, |m-1,+>). For m = 0 only the first basis vector
    /// exists and the second row/column is zero.
    pub fn subspace_matrix(&self, m: usize) -> [[Complex64; 2]; 2] {
        assert!(m <= self.n_max);
        let zero = Complex64::default();
        if m == 0 {
            return [[self.gg[0], zero], [zero, zero]];
        }
        [
            [self.gg[m], self.ge[m - 1]],
            [self.eg[m - 1], self.ee[m - 1]],
        ]
    }

    /// Max |U*U - 1| over every invariant subspace m <= n_max.
    pub fn unitarity_defect_interior(&self) -> f64 {
        let mut worst = (self.gg[0].norm_sqr() - 1.0).abs();
        for m in 1..=self.n_max {
            let u = self.subspace_matrix(m);
            // columns of U*U - I
            let c00 = u[0][0].conj() * u[0][0] + u[1][0].conj() * u[1][0] - 1.0;
            let c11 = u[0][1].conj() * u[0][1] + u[1][1].conj() * u[1][1] - 1.0;
            let c01 = u[0][0].conj() * u[0][1] + u[1][0].conj() * u[1][1];
            worst = worst.max(c00.norm()).max(c11.norm()).max(c01.norm());
        }
        worst
    }

    /// Unitarity defect of the truncated matrix on the cut subspace
    /// m = n_max + 1: 1 - |ee(n_max)|^2, equal to S~(n_max+1)^2.
    pub fn truncation_defect(&self) -> f64 {
        (1.0 - self.ee[self.n_max].norm_sqr()).abs()
    }

    /// Dense matrix in the blocked layout (ground rows first).
    pub fn to_dense(&self) -> CMatrix {
        let s = self.n_max + 1;
        let mut m = CMatrix::zeros(2 * s);
        for n in 0..=self.n_max {
            m.set(n, n, self.gg[n]);
            m.set(s + n, s + n, self.ee[n]);
        }
        for n in 0..self.n_max {
            // ge: |n,+> -> |n+1,->
            m.set(n + 1, s + n, self.ge[n]);
            // eg: |n+1,-> -> |n,+>
            m.set(s + n, n + 1, self.eg[n]);
        }
        m
    }
}

/// Assemble the interaction-pair Hamiltonian on the truncated blocked space.
pub fn hamiltonian_dense(params: &ModelParams) -> CMatrix {
    let s = params.n_max + 1;
    let mut h = CMatrix::zeros(2 * s);
    for n in 0..=params.n_max {
        h.set(n, n, Complex64::new(params.omega * n as f64, 0.0));
        h.set(s + n, s + n, Complex64::new(params.omega * n as f64 + params.omega0, 0.0));
    }
    // (lambda/2)(a* (x) b + a (x) b*): couples |n,+> and |n+1,->
    for n in 0..params.n_max {
        let v = Complex64::new(params.lambda / 2.0 * ((n + 1) as f64).sqrt(), 0.0);
        h.set(n + 1, s + n, v);
        h.set(s + n, n + 1, v);
    }
    h
}

/// e^{-i tau H} computed by scaling and squaring of the assembled H.
/// Hermiticity of H is asserted before exponentiating.
pub fn dense_exponential_oracle(params: &ModelParams) -> Result<CMatrix, PropagatorError> {
    if params.n_max > ORACLE_N_MAX {
        return Err(PropagatorError::OracleScale { max: ORACLE_N_MAX, got: params.n_max });
    }
    let h = hamiltonian_dense(params);
    let defect = h.hermiticity_defect();
    if defect > 0.0 {
        return Err(PropagatorError::Dense(DenseError::NotHermitian(defect)));
    }
    let a = h.scale(Complex64::new(0.0, -params.tau));
    Ok(a.expm()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_blocks_are_pure_phases() {
        let p = ModelParams::from_physical(1.0, 1.4, 0.0, 2.0, 1.0, 24).unwrap();
        let u = build_propagator(&p);
        for n in 0..=24 {
            assert!((u.gg[n].norm() - 1.0).abs() < 1e-14);
            assert!((u.ee[n].norm() - 1.0).abs() < 1e-14);
        }
        for n in 0..24 {
            assert!(u.ge[n].norm() < 1e-14);
            assert!(u.eg[n].norm() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_subspace_is_unitary() {
        let p = ModelParams::from_dimensionless(0.3, 1.7, 1.0, 2.0, 32).unwrap();
        let u = build_propagator(&p);
        assert!(u.unitarity_defect_interior() <= 1e-12);
        // singular values of the m=1 block are both 1: check via U*U = I
        let b = u.subspace_matrix(1);
        let g = b[0][0].norm_sqr() + b[1][0].norm_sqr();
        assert!((g - 1.0).abs() < 1e-13);
    }

    #[test]
    fn truncation_defect_matches_formula() {
        let p = ModelParams::from_dimensionless(0.25, 0.5, 1.0, 2.0, 40).unwrap();
        let u = build_propagator(&p);
        let expect = p.s_tilde(41).powi(2);
        assert!((u.truncation_defect() - expect).abs() < 1e-12);
        // and it is the only defect of the full truncated matrix
        let m = u.to_dense();
        let gram = m.adjoint().mul(&m);
        let dev = gram.max_abs_diff(&CMatrix::identity(m.dim()));
        assert!((dev - expect).abs() < 1e-12, "dev {dev} expect {expect}");
    }

    #[test]
    fn oracle_identity_at_tau_zero_limit() {
        // tau -> 0 is outside the valid domain; use a tiny tau instead
        let p = ModelParams::from_physical(1.0, 1.2, 0.7, 1e-9, 1.0, 8).unwrap();
        let e = dense_exponential_oracle(&p).unwrap();
        assert!(e.max_abs_diff(&CMatrix::identity(18)) < 1e-8);
    }

    #[test]
    fn oracle_uncoupled_diagonal_phases() {
        let p = ModelParams::from_physical(1.0, 1.3, 0.0, 2.0, 1.0, 10).unwrap();
        let e = dense_exponential_oracle(&p).unwrap();
        let s = 11;
        for n in 0..s {
            let th = p.omega * p.tau * n as f64;
            let expect = Complex64::new(th.cos(), -th.sin());
            assert!((e.get(n, n) - expect).norm() < 1e-12);
            let th2 = (p.omega * n as f64 + p.omega0) * p.tau;
            let expect2 = Complex64::new(th2.cos(), -th2.sin());
            assert!((e.get(s + n, s + n) - expect2).norm() < 1e-12);
        }
    }

    #[test]
    fn blocks_agree_with_oracle_on_interior() {
        let p = ModelParams::from_dimensionless(0.3, 1.7, 1.0, 2.0, 16).unwrap();
        let u = build_propagator(&p).to_dense();
        let e = dense_exponential_oracle(&p).unwrap();
        let s = 17;
        let mut worst = 0.0f64;
        for r in 0..2 * s {
            for c in 0..2 * s {
                let (rf, cf) = (r % s, c % s); // field indices
                if rf <= 14 && cf <= 14 {
                    worst = worst.max((u.get(r, c) - e.get(r, c)).norm());
                }
            }
        }
        assert!(worst <= 1e-10, "interior disagreement {worst}");
    }

    #[test]
    fn oracle_rejects_large_truncation() {
        let p = ModelParams::from_dimensionless(0.1, 0.5, 1.0, 2.0, 65).unwrap();
        assert!(matches!(
            dense_exponential_oracle(&p),
            Err(PropagatorError::OracleScale { .. })
        ));
    }

    #[test]
    fn rabi_angle_shared_helper_consistency() {
        // the propagator entries are built from the same scalar helpers
        let p = ModelParams::from_dimensionless(0.2, 0.9, 1.0, 2.0, 12).unwrap();
        let u = build_propagator(&p);
        let n = 5;
        let expect = (rabi_angle(n, 0.2, 0.9)).cos();
        assert!((u.gg[n].norm_sqr().sqrt() - p.c(n).norm()).abs() < 1e-15);
        assert!((p.c(n).re - expect).abs() < 1e-15);
    }
}
