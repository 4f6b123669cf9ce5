//! Model parameters, dimensionless reductions, and the scalar coefficient
//! functions every other module is built from.
//!
//! The dynamics depends on the physical constants only through the
//! dimensionless triple (eta, xi, beta*omega0) plus the free-rotation angle
//! omega*tau. Both parametrizations are accepted; the dimensionless one is
//! stored verbatim so that runs configured either way are bit-reproducible.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("no normalizable thermal state for beta* <= 0 (got beta*omega = {0})")]
    NonThermal(f64),
}

/// Shared evaluation of pi*sqrt(xi*n + eta). Everything downstream goes
/// through this one helper so all modules see bit-identical values.
#[inline]
pub fn rabi_angle(n: usize, eta: f64, xi: f64) -> f64 {
    PI * (xi * n as f64 + eta).sqrt()
}

/// sin(pi*sqrt(u))/sqrt(u), continued by its limit pi at u = 0.
#[inline]
pub fn sinc_pi_sqrt(u: f64) -> f64 {
    if u <= 0.0 {
        PI
    } else {
        let r = u.sqrt();
        (PI * r).sin() / r
    }
}

/// Diagonal amplitude C(n) = cos(pi*sqrt(xi*n+eta)) + i*sqrt(eta)*sin(..)/sqrt(..).
#[inline]
pub fn c_coeff(n: usize, eta: f64, xi: f64) -> Complex64 {
    let u = xi * n as f64 + eta;
    Complex64::new((PI * u.sqrt()).cos(), eta.sqrt() * sinc_pi_sqrt(u))
}

/// Transition amplitude S(n) = sqrt(xi)*sin(pi*sqrt(xi*n+eta))/sqrt(xi*n+eta).
///
/// At xi*n+eta = 0 the ratio is continued by pi, so S(0) = sqrt(xi)*pi when
/// eta = 0.
#[inline]
pub fn s_coeff(n: usize, eta: f64, xi: f64) -> f64 {
    let u = xi * n as f64 + eta;
    xi.sqrt() * sinc_pi_sqrt(u)
}

/// sqrt(n)*S(n), the matrix element actually appearing next to a and a*.
#[inline]
pub fn s_tilde(n: usize, eta: f64, xi: f64) -> f64 {
    (n as f64).sqrt() * s_coeff(n, eta, xi)
}

/// Hopping profile D(n) = sin^2(pi*sqrt(xi*n+eta)) * xi*n / ((xi*n+eta) * Z).
///
/// Evaluated as n*S(n)^2/Z so it shares every floating-point operation with
/// `s_coeff`; D(0) = 0 exactly, and D vanishes exactly at Rabi resonances.
#[inline]
pub fn damping(n: usize, eta: f64, xi: f64, beta_omega0: f64) -> f64 {
    let s = s_coeff(n, eta, xi);
    n as f64 * s * s / z_beta(beta_omega0)
}

/// D0(n): the hopping profile with the quasi-resonance entries zeroed out.
/// `quasi` must be sorted ascending.
#[inline]
pub fn damping_modified(n: usize, eta: f64, xi: f64, beta_omega0: f64, quasi: &[usize]) -> f64 {
    if quasi.binary_search(&n).is_ok() {
        0.0
    } else {
        damping(n, eta, xi, beta_omega0)
    }
}

/// Atom partition function Z = 1 + e^{-beta*omega0}.
#[inline]
pub fn z_beta(beta_omega0: f64) -> f64 {
    1.0 + (-beta_omega0).exp()
}

/// Physical and dimensionless parameters of one interaction cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    pub tau: f64,
    pub beta: f64,
    pub n_max: usize,
    // cached reductions; stored verbatim when constructed dimensionless
    eta: f64,
    xi: f64,
    beta_omega0: f64,
}

impl ModelParams {
    pub fn from_physical(
        omega: f64,
        omega0: f64,
        lambda: f64,
        tau: f64,
        beta: f64,
        n_max: usize,
    ) -> Result<Self, ParamsError> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(ParamsError::Invalid(format!("omega must be > 0, got {omega}")));
        }
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(ParamsError::Invalid(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(ParamsError::Invalid(format!("tau must be > 0, got {tau}")));
        }
        if !lambda.is_finite() || !beta.is_finite() {
            return Err(ParamsError::Invalid("lambda and beta must be finite".into()));
        }
        if n_max < 2 {
            return Err(ParamsError::Invalid(format!("n_max must be >= 2, got {n_max}")));
        }
        let eta = ((omega0 - omega) * tau / (2.0 * PI)).powi(2);
        let xi = (lambda * tau / (2.0 * PI)).powi(2);
        Ok(Self { omega, omega0, lambda, tau, beta, n_max, eta, xi, beta_omega0: beta * omega0 })
    }

    /// Construct from the dimensionless triple plus the rotation angle
    /// omega*tau. The physical fields are reconstructed with omega = 1 and
    /// omega0 >= omega; the cached (eta, xi, beta*omega0) keep the inputs
    /// bit-for-bit.
    pub fn from_dimensionless(
        eta: f64,
        xi: f64,
        beta_omega0: f64,
        omega_tau: f64,
        n_max: usize,
    ) -> Result<Self, ParamsError> {
        if !(eta >= 0.0) || !(xi >= 0.0) || !eta.is_finite() || !xi.is_finite() {
            return Err(ParamsError::Invalid(format!("eta, xi must be >= 0, got ({eta}, {xi})")));
        }
        if !(omega_tau > 0.0) || !omega_tau.is_finite() {
            return Err(ParamsError::Invalid(format!("omega*tau must be > 0, got {omega_tau}")));
        }
        if !beta_omega0.is_finite() {
            return Err(ParamsError::Invalid("beta*omega0 must be finite".into()));
        }
        if n_max < 2 {
            return Err(ParamsError::Invalid(format!("n_max must be >= 2, got {n_max}")));
        }
        let omega = 1.0;
        let tau = omega_tau;
        let omega0 = omega + 2.0 * PI * eta.sqrt() / tau;
        let lambda = 2.0 * PI * xi.sqrt() / tau;
        let beta = beta_omega0 / omega0;
        Ok(Self { omega, omega0, lambda, tau, beta, n_max, eta, xi, beta_omega0 })
    }

    /// Dimensionless detuning (eta) and coupling (xi).
    pub fn dimensionless(&self) -> (f64, f64) {
        (self.eta, self.xi)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn beta_omega0(&self) -> f64 {
        self.beta_omega0
    }

    /// Renormalized inverse temperature of the limiting cavity state.
    pub fn beta_star(&self) -> f64 {
        self.beta * self.omega0 / self.omega
    }

    pub fn omega_tau(&self) -> f64 {
        self.omega * self.tau
    }

    pub fn z_beta(&self) -> f64 {
        z_beta(self.beta_omega0)
    }

    /// Atom Gibbs weights (w_minus, w_plus): ground and excited occupation.
    pub fn atom_weights(&self) -> (f64, f64) {
        let z = self.z_beta();
        (1.0 / z, (-self.beta_omega0).exp() / z)
    }

    pub fn c(&self, n: usize) -> Complex64 {
        c_coeff(n, self.eta, self.xi)
    }

    pub fn s(&self, n: usize) -> f64 {
        s_coeff(n, self.eta, self.xi)
    }

    pub fn s_tilde(&self, n: usize) -> f64 {
        s_tilde(n, self.eta, self.xi)
    }

    pub fn damping(&self, n: usize) -> f64 {
        damping(n, self.eta, self.xi, self.beta_omega0)
    }

    pub fn thermal_state(&self) -> Result<DiagonalState, ParamsError> {
        thermal_state(self.beta_star(), self.omega, self.n_max)
    }
}

/// A diagonal state: occupation probabilities over photon numbers 0..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    values: Vec<f64>,
}

impl DiagonalState {
    pub fn new(values: Vec<f64>) -> Result<Self, ParamsError> {
        if values.is_empty() {
            return Err(ParamsError::Invalid("empty diagonal state".into()));
        }
        if values.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(ParamsError::Invalid("occupations must be finite and >= 0".into()));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ParamsError::Invalid(format!("occupations sum to {sum}, not 1")));
        }
        Ok(Self { values })
    }

    /// Normalize a nonnegative weight vector into a state.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self, ParamsError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(ParamsError::Invalid("weights sum to zero".into()));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Self::new(weights)
    }

    pub fn ground(n_max: usize) -> Self {
        let mut values = vec![0.0; n_max + 1];
        values[0] = 1.0;
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.values.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Trace distance (1/2)*sum |p_n - q_n|; exact for commuting diagonals.
    pub fn trace_distance(&self, other: &DiagonalState) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "dimension mismatch");
        0.5 * self
            .values
            .iter()
            .zip(&other.values)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// Truncated thermal state with weights e^{-beta*_*omega*n}.
///
/// Rejects beta* <= 0: on the full ladder there is nothing to normalize
/// against in that regime.
pub fn thermal_state(beta_star: f64, omega: f64, n_max: usize) -> Result<DiagonalState, ParamsError> {
    let b = beta_star * omega;
    if !(b > 0.0) {
        return Err(ParamsError::NonThermal(b));
    }
    let weights: Vec<f64> = (0..=n_max).map(|n| (-b * n as f64).exp()).collect();
    DiagonalState::from_weights(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = 1.618033988749894848;

    #[test]
    fn dimensionless_reductions() {
        // zero detuning, lambda*tau = 2*pi
        let p = ModelParams::from_physical(1.0, 1.0, 2.0 * PI, 1.0, 1.0, 8).unwrap();
        let (eta, xi) = p.dimensionless();
        assert_eq!(eta, 0.0);
        assert!((xi - 1.0).abs() < 1e-15);

        // uncoupled
        let p = ModelParams::from_physical(1.0, 1.3, 0.0, 2.0, 1.0, 8).unwrap();
        assert_eq!(p.xi(), 0.0);

        // Delta*tau = pi, lambda*tau = 4*pi -> (1/4, 4)
        let p = ModelParams::from_physical(1.0, 1.0 + PI / 2.0, 2.0 * PI, 2.0, 1.0, 8).unwrap();
        let (eta, xi) = p.dimensionless();
        assert!((eta - 0.25).abs() < 1e-15, "eta = {eta}");
        assert!((xi - 4.0).abs() < 1e-14, "xi = {xi}");
    }

    #[test]
    fn dimensionless_roundtrip_is_verbatim() {
        let p = ModelParams::from_dimensionless(0.3, 2.0 - PHI, 1.0, 2.0, 64).unwrap();
        assert_eq!(p.eta(), 0.3);
        assert_eq!(p.xi(), 2.0 - PHI);
        assert_eq!(p.beta_omega0(), 1.0);
        assert_eq!(p.omega_tau(), 2.0);
        assert!(p.omega0 >= p.omega);
    }

    #[test]
    fn c_at_resonance_is_real_sign_alternating() {
        // eta = 0, xi*n = k^2 -> C = (-1)^k, S = 0
        for (n, k) in [(1usize, 1i32), (4, 2), (9, 3), (16, 4)] {
            let c = c_coeff(n, 0.0, 1.0);
            assert!((c.re - (-1.0f64).powi(k)).abs() < 1e-12, "n={n} c={c}");
            assert!(c.im.abs() < 1e-12);
            assert!(s_coeff(n, 0.0, 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn c_s_convention_at_zero_argument() {
        // xi*n + eta = 0 cases follow the continued limit
        assert_eq!(c_coeff(0, 0.0, 1.7), Complex64::new(1.0, 0.0));
        let s0 = s_coeff(0, 0.0, 0.25);
        assert!((s0 - 0.5 * PI).abs() < 1e-15, "S(0) = {s0}");
    }

    #[test]
    fn c_s_d_frozen_values() {
        // direct evaluation oracles
        let c = c_coeff(1, 0.25, 0.0);
        assert!(c.re.abs() < 1e-15 && (c.im - 1.0).abs() < 1e-15, "C(1,1/4,0) = {c}");
        assert!((s_coeff(1, 0.0, 0.25) - 1.0).abs() < 1e-15);
        let d = damping(1, 0.0, 0.25, 2.0f64.ln());
        assert!((d - 2.0 / 3.0).abs() < 1e-15, "D = {d}");
    }

    #[test]
    fn damping_zero_cases_and_bound() {
        let b = 0.7;
        assert_eq!(damping(0, 0.3, 1.7, b), 0.0);
        // resonance: eta=0, xi=1, n=k^2
        assert!(damping(9, 0.0, 1.0, b) < 1e-25);
        let cap = 1.0 / (1.0 + (-b).exp());
        for n in 0..2000 {
            let d = damping(n, 0.3, 1.7, b);
            assert!(d >= 0.0 && d <= cap + 1e-15);
        }
    }

    #[test]
    fn damping_modified_zeroes_quasi_entries() {
        let quasi = vec![3, 10, 24];
        let b = 1.0;
        assert_eq!(damping_modified(10, 0.0, 2.0 - PHI, b, &quasi), 0.0);
        let n = 11;
        assert_eq!(
            damping_modified(n, 0.0, 2.0 - PHI, b, &quasi),
            damping(n, 0.0, 2.0 - PHI, b)
        );
    }

    #[test]
    fn unitarity_identity_large_n() {
        // |C(n)|^2 + n*S(n)^2 = 1 up to 1e-14, out to n = 1e6
        for &(eta, xi) in &[(0.0, 1.0), (0.3, 1.7), (0.25, 0.5), (0.3, 2.0 - PHI)] {
            for &n in &[0usize, 1, 2, 17, 1000, 99_991, 1_000_000] {
                let c = c_coeff(n, eta, xi);
                let v = c.norm_sqr() + n as f64 * s_coeff(n, eta, xi).powi(2);
                assert!((v - 1.0).abs() < 1e-14, "({eta},{xi}) n={n}: {v}");
            }
        }
    }

    #[test]
    fn thermal_state_examples() {
        // beta*omega0 = ln 2, n_max = 2 -> (4/7, 2/7, 1/7)
        let t = thermal_state(2.0f64.ln(), 1.0, 2).unwrap();
        let v = t.values();
        assert!((v[0] - 4.0 / 7.0).abs() < 1e-15);
        assert!((v[1] - 2.0 / 7.0).abs() < 1e-15);
        assert!((v[2] - 1.0 / 7.0).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[0] >= w[1]), "monotone decreasing");

        // beta -> large: ground state
        let t = thermal_state(800.0, 1.0, 4).unwrap();
        assert!((t.values()[0] - 1.0).abs() < 1e-300);

        // mean photon number matches the geometric distribution
        let b = 1.0;
        let t = thermal_state(b, 1.0, 60).unwrap();
        let expect = 1.0 / (b.exp() - 1.0);
        assert!((t.mean_photon_number() - expect).abs() < 1e-12);
    }

    #[test]
    fn thermal_state_rejects_nonpositive_beta() {
        assert!(matches!(thermal_state(0.0, 1.0, 4), Err(ParamsError::NonThermal(_))));
        assert!(matches!(thermal_state(-1.0, 1.0, 4), Err(ParamsError::NonThermal(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::from_physical(0.0, 1.0, 1.0, 1.0, 1.0, 8).is_err());
        assert!(ModelParams::from_physical(1.0, 1.0, 1.0, -1.0, 1.0, 8).is_err());
        assert!(ModelParams::from_physical(1.0, 1.0, 1.0, 1.0, 1.0, 1).is_err());
        assert!(ModelParams::from_dimensionless(-0.1, 1.0, 1.0, 1.0, 8).is_err());
    }
}
