//! Small dense complex-matrix kernels used by the oracle paths and by exact
//! trace-norm evaluation: multiplication, scaling-and-squaring exponential,
//! Hermitian eigenvalues via Householder reduction to a real tridiagonal.
//!
//! These run at oracle scale (a few hundred rows); the production paths stay
//! banded.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::tridiag::SymTridiag;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("norm too large for the squaring budget (needed {0} squarings)")]
    SquaringOverflow(u32),
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, a: vec![Complex64::default(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.a[r * self.dim + c] = v;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: Complex64) {
        self.a[r * self.dim + c] += v;
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (d, s) in out.a.iter_mut().zip(&other.a) {
            *d += s;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (d, s) in out.a.iter_mut().zip(&other.a) {
            *d -= s;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for v in out.a.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Maximum column absolute sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|c| (0..n).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// exp(self) by scaling and squaring with a Taylor series on the scaled
    /// matrix. Errors out if the required squaring depth exceeds 64.
    pub fn expm(&self) -> Result<CMatrix, DenseError> {
        let norm = self.one_norm();
        let mut s: u32 = 0;
        let mut scaled_norm = norm;
        while scaled_norm > 0.5 {
            s += 1;
            scaled_norm *= 0.5;
            if s > 64 {
                return Err(DenseError::SquaringOverflow(s));
            }
        }
        let scaled = self.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));
        let mut sum = CMatrix::identity(self.dim);
        let mut term = CMatrix::identity(self.dim);
        for k in 1..=60u32 {
            term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.one_norm() <= 1e-18 * sum.one_norm() {
                break;
            }
        }
        let mut out = sum;
        for _ in 0..s {
            out = out.mul(&out);
        }
        Ok(out)
    }

    /// Householder reduction of a Hermitian matrix to a real symmetric
    /// tridiagonal with the same spectrum (off-diagonal moduli).
    pub fn hermitian_tridiagonalize(&self) -> Result<SymTridiag, DenseError> {
        let defect = self.hermiticity_defect();
        if defect > 1e-10 * self.max_abs().max(1.0) {
            return Err(DenseError::NotHermitian(defect));
        }
        let n = self.dim;
        let mut a = self.clone();
        let mut off = vec![0.0; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(2) {
            // column below the diagonal
            let mut norm_sq = 0.0;
            for r in k + 1..n {
                norm_sq += a.get(r, k).norm_sqr();
            }
            let norm = norm_sq.sqrt();
            if norm == 0.0 {
                off[k] = 0.0;
                continue;
            }
            let x0 = a.get(k + 1, k);
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
            let alpha = -phase * norm;
            // u = (x - alpha e1)/||..||
            let mut u = vec![Complex64::default(); n];
            for r in k + 1..n {
                u[r] = a.get(r, k);
            }
            u[k + 1] -= alpha;
            let unorm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if unorm == 0.0 {
                off[k] = norm;
                continue;
            }
            for c in u.iter_mut() {
                *c /= unorm;
            }
            // v = B u on the trailing block, then rank-two update
            let mut v = vec![Complex64::default(); n];
            for r in k + 1..n {
                let mut acc = Complex64::default();
                for c in k + 1..n {
                    acc += a.get(r, c) * u[c];
                }
                v[r] = acc;
            }
            let udotv: Complex64 = u[k + 1..].iter().zip(&v[k + 1..]).map(|(x, y)| x.conj() * y).sum();
            // w = 2v - 2(u.v)u so that B' = B - u w^* - w u^*
            let mut w = vec![Complex64::default(); n];
            for r in k + 1..n {
                w[r] = 2.0 * v[r] - 2.0 * udotv * u[r];
            }
            for r in k + 1..n {
                for c in k + 1..n {
                    let upd = u[r] * w[c].conj() + w[r] * u[c].conj();
                    a.add_to(r, c, -upd);
                }
            }
            a.set(k + 1, k, alpha);
            a.set(k, k + 1, alpha.conj());
            for r in k + 2..n {
                a.set(r, k, Complex64::default());
                a.set(k, r, Complex64::default());
            }
            off[k] = norm;
        }
        if n >= 2 {
            off[n - 2] = a.get(n - 1, n - 2).norm();
        }
        let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        SymTridiag::new(diag, off).map_err(|_| DenseError::NotHermitian(0.0))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, DenseError> {
        if self.dim == 1 {
            return Ok(vec![self.get(0, 0).re]);
        }
        Ok(self.hermitian_tridiagonalize()?.eigenvalues())
    }

    /// Trace norm of a Hermitian matrix.
    pub fn trace_norm_hermitian(&self) -> Result<f64, DenseError> {
        Ok(self.hermitian_eigenvalues()?.iter().map(|l| l.abs()).sum())
    }

    /// Random density matrix supported on the leading `support` indices,
    /// embedded in a dim x dim matrix.
    pub fn random_density<R: Rng + ?Sized>(dim: usize, support: usize, rng: &mut R) -> CMatrix {
        assert!(support <= dim && support > 0);
        let mut g = vec![Complex64::default(); support * support];
        for v in g.iter_mut() {
            // Box-Muller pairs keep the distribution isotropic
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            let r = (-2.0 * u1.ln()).sqrt();
            *v = Complex64::new(
                r * (2.0 * std::f64::consts::PI * u2).cos(),
                r * (2.0 * std::f64::consts::PI * u2).sin(),
            );
        }
        let mut rho = CMatrix::zeros(dim);
        for r in 0..support {
            for c in 0..support {
                let mut acc = Complex64::default();
                for k in 0..support {
                    acc += g[r * support + k] * g[c * support + k].conj();
                }
                rho.set(r, c, acc);
            }
        }
        let tr = rho.trace().re;
        rho.scale(Complex64::new(1.0 / tr, 0.0))
    }
}

/// Partial trace over the two-level subsystem of a blocked 2s x 2s matrix
/// (rows 0..s ground component, s..2s excited component).
pub fn partial_trace_atom(m: &CMatrix) -> CMatrix {
    let two_s = m.dim();
    assert!(two_s % 2 == 0);
    let s = two_s / 2;
    let mut out = CMatrix::zeros(s);
    for r in 0..s {
        for c in 0..s {
            out.set(r, c, m.get(r, c) + m.get(s + r, s + c));
        }
    }
    out
}

/// rho (x) diag(w_minus, w_plus) in the blocked layout.
pub fn tensor_with_atom(rho: &CMatrix, w_minus: f64, w_plus: f64) -> CMatrix {
    let s = rho.dim();
    let mut out = CMatrix::zeros(2 * s);
    for r in 0..s {
        for c in 0..s {
            let v = rho.get(r, c);
            out.set(r, c, v * w_minus);
            out.set(s + r, s + c, v * w_plus);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expm_of_zero_and_diagonal() {
        let z = CMatrix::zeros(4);
        let e = z.expm().unwrap();
        assert!(e.max_abs_diff(&CMatrix::identity(4)) < 1e-15);

        let mut d = CMatrix::zeros(3);
        for (i, v) in [0.3, -1.2, 2.5].iter().enumerate() {
            d.set(i, i, c(0.0, *v));
        }
        let e = d.expm().unwrap();
        for (i, v) in [0.3, -1.2, 2.5].iter().enumerate() {
            let expect = c(v.cos(), v.sin());
            assert!((e.get(i, i) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_pauli_rotation_closed_form() {
        // exp(-i theta sx) = cos(theta) I - i sin(theta) sx
        let theta = 0.7;
        let mut sx = CMatrix::zeros(2);
        sx.set(0, 1, c(1.0, 0.0));
        sx.set(1, 0, c(1.0, 0.0));
        let e = sx.scale(c(0.0, -theta)).expm().unwrap();
        assert!((e.get(0, 0) - c(theta.cos(), 0.0)).norm() < 1e-14);
        assert!((e.get(0, 1) - c(0.0, -theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_frozen_reference() {
        // 8x8 Hermitian matrix with externally computed spectrum
        let re: [[f64; 8]; 8] = [
            [-4.0, -0.5, 0.5, 1.0, -2.5, 0.0, -1.0, 1.0],
            [-0.5, -4.0, -1.5, 2.5, 1.0, 2.0, 2.5, 0.0],
            [0.5, -1.5, 3.0, -0.5, 1.5, 0.5, -0.5, 3.0],
            [1.0, 2.5, -0.5, 3.0, -2.0, -1.0, -1.5, 0.0],
            [-2.5, 1.0, 1.5, -2.0, 3.0, -0.5, -1.5, 2.5],
            [0.0, 2.0, 0.5, -1.0, -0.5, 4.0, 0.0, 3.0],
            [-1.0, 2.5, -0.5, -1.5, -1.5, 0.0, 0.0, -2.5],
            [1.0, 0.0, 3.0, 0.0, 2.5, 3.0, -2.5, 4.0],
        ];
        let im: [[f64; 8]; 8] = [
            [0.0, -1.0, 0.0, -1.5, -1.0, -1.5, 1.0, -1.0],
            [1.0, 0.0, 1.5, -1.5, -2.0, -2.5, 0.5, 0.0],
            [0.0, -1.5, 0.0, 2.0, 0.0, -0.5, -2.0, -1.5],
            [1.5, 1.5, -2.0, 0.0, 3.0, -1.0, 1.5, -1.0],
            [1.0, 2.0, 0.0, -3.0, 0.0, -1.5, 3.5, -3.5],
            [1.5, 2.5, 0.5, 1.0, 1.5, 0.0, 0.5, 1.0],
            [-1.0, -0.5, 2.0, -1.5, -3.5, -0.5, 0.0, 0.5],
            [1.0, 0.0, 1.5, 1.0, 3.5, -1.0, -0.5, 0.0],
        ];
        let mut h = CMatrix::zeros(8);
        for r in 0..8 {
            for col in 0..8 {
                h.set(r, col, c(re[r][col], im[r][col]));
            }
        }
        let expect = [
            -8.969854793946304,
            -6.801068020710586,
            -2.511854053697540,
            -0.3174697863109844,
            1.214156955037522,
            6.001905064706322,
            8.056390118137388,
            12.32779451678418,
        ];
        let eig = h.hermitian_eigenvalues().unwrap();
        for (a, b) in eig.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        let tn = h.trace_norm_hermitian().unwrap();
        assert!((tn - 46.20049330933083).abs() < 1e-9);
    }

    #[test]
    fn trace_norm_of_band_pair_is_twice_l1() {
        // X + X^* with X a single far band: eigenvalues come in +-|x| pairs
        let n = 9;
        let d = 6;
        let mut m = CMatrix::zeros(n);
        let vals = [c(0.3, -0.4), c(-1.1, 0.2), c(0.0, 0.9)];
        let mut l1 = 0.0;
        for (j, &v) in vals.iter().enumerate() {
            m.set(j, j + d, v);
            m.set(j + d, j, v.conj());
            l1 += v.norm();
        }
        let tn = m.trace_norm_hermitian().unwrap();
        assert!((tn - 2.0 * l1).abs() < 1e-12, "{tn} vs {}", 2.0 * l1);
    }

    #[test]
    fn partial_trace_and_tensor() {
        let mut rho = CMatrix::zeros(2);
        rho.set(0, 0, c(0.7, 0.0));
        rho.set(1, 1, c(0.3, 0.0));
        rho.set(0, 1, c(0.1, 0.05));
        rho.set(1, 0, c(0.1, -0.05));
        let total = tensor_with_atom(&rho, 0.6, 0.4);
        assert!((total.trace().re - 1.0).abs() < 1e-15);
        let back = partial_trace_atom(&total);
        assert!(back.max_abs_diff(&rho) < 1e-15);
    }
}
