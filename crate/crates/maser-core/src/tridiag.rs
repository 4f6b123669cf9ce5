//! Real tridiagonal kernels: Sturm-sequence bisection for symmetric
//! matrices, inverse iteration for selected eigenvectors, and a similarity
//! reduction for the non-symmetric (but sign-regular) trace-picture case.

use thiserror::Error;

use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum TridiagError {
    #[error("off-diagonal length {off} does not match diagonal length {diag}")]
    ShapeMismatch { diag: usize, off: usize },
    #[error("sub*sup product negative at index {0}; no symmetric reduction")]
    NotSymmetrizable(usize),
    #[error("inverse iteration failed to reach residual {target:.1e} (got {got:.1e})")]
    InverseIteration { target: f64, got: f64 },
}

/// Absolute bisection tolerance for eigenvalues.
pub const BISECTION_TOL: f64 = 1e-12;
/// Residual acceptance for inverse-iteration eigenvectors.
pub const INVIT_RESIDUAL: f64 = 1e-10;
const INVIT_MAX_STEPS: usize = 50;

/// Symmetric tridiagonal matrix (diag of length n, off of length n-1).
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, TridiagError> {
        if off.len() + 1 != diag.len() {
            return Err(TridiagError::ShapeMismatch { diag: diag.len(), off: off.len() });
        }
        Ok(Self { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing all eigenvalues.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo - BISECTION_TOL, hi + BISECTION_TOL)
    }

    /// Number of eigenvalues strictly below x (Sturm sequence via LDL^T
    /// pivots, with a guard against vanishing pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(1.0f64, |m, v| m.max(v.abs()));
        let guard = f64::MIN_POSITIVE.max(1e-300 * scale);
        let mut count = 0usize;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let qs = if q.abs() < guard { if q < 0.0 { -guard } else { guard } } else { q };
            q = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / qs;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th eigenvalue in ascending order (k in 0..n), to BISECTION_TOL.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            if hi - lo <= BISECTION_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues, ascending. Brackets are disjoint so the per-index
    /// bisections run in parallel.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n();
        par::map_indexed(n, |k| self.eigenvalue(k))
    }

    /// The two largest eigenvalues (lambda_{n-2}, lambda_{n-1}).
    pub fn top_two(&self) -> (f64, f64) {
        let n = self.n();
        assert!(n >= 2);
        (self.eigenvalue(n - 2), self.eigenvalue(n - 1))
    }

    /// Multiplicity of the cluster of eigenvalues within `radius` of the top.
    pub fn top_cluster_multiplicity(&self, radius: f64) -> usize {
        let n = self.n();
        let top = self.eigenvalue(n - 1);
        n - self.count_below(top - radius)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Solve (T - sigma) x = b by tridiagonal LU with partial pivoting
    /// (one fill-in band), the standard gttrf/gtts2 scheme.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - sigma).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut dl: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        let mut x: Vec<f64> = b.to_vec();

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let piv = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
                let fact = dl[i] / piv;
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
                // no fill-in in this branch
            } else {
                swap[i] = true;
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
            }
        }
        for i in 0..n - 1 {
            if swap[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= dl[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= du2[i] * x[i + 2];
            }
            let piv = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
            x[i] = v / piv;
        }
        x
    }

    /// Inverse iteration for the eigenvector of the eigenvalue nearest
    /// `lambda`. Returns the unit vector and its residual ||Tv - lambda v||.
    pub fn eigenvector(&self, lambda: f64) -> Result<(Vec<f64>, f64), TridiagError> {
        let n = self.n();
        // deterministic start with a mild profile
        let mut v: Vec<f64> =
            (0..n).map(|i| 1.0 + 0.5 * ((i.wrapping_mul(2654435761)) % 97) as f64 / 97.0).collect();
        normalize(&mut v);
        let shift = lambda + BISECTION_TOL * 0.5;
        let mut res = f64::INFINITY;
        for _ in 0..INVIT_MAX_STEPS {
            let mut w = self.solve_shifted(shift, &v);
            normalize(&mut w);
            v = w;
            res = self.residual(&v, lambda);
            if res <= INVIT_RESIDUAL {
                return Ok((v, res));
            }
        }
        Err(TridiagError::InverseIteration { target: INVIT_RESIDUAL, got: res })
    }

    pub fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        let tv = self.apply(v);
        let num: f64 = tv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let den: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        num / den
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in v.iter_mut() {
            *a /= norm;
        }
    }
}

/// Real non-symmetric tridiagonal matrix with separate sub/super diagonals,
/// as produced by the trace-picture diagonal sector.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    /// sub[i] multiplies x_{i-1} in row i; sub[0] is unused and zero.
    pub sub: Vec<f64>,
    /// sup[i] multiplies x_{i+1} in row i; sup[n-1] is unused and zero.
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    pub fn apply_in_place(&self, x: &mut Vec<f64>) {
        *x = self.apply(x);
    }

    /// Diagonal similarity to a symmetric tridiagonal with off-diagonal
    /// sqrt(sub*sup); requires every product nonnegative. A vanishing
    /// product decouples the blocks on both sides, matching the behavior of
    /// the original operator when both one-sided couplings vanish.
    pub fn symmetrized(&self) -> Result<SymTridiag, TridiagError> {
        let n = self.n();
        let mut off = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let p = self.sup[i] * self.sub[i + 1];
            if p < 0.0 {
                return Err(TridiagError::NotSymmetrizable(i));
            }
            off.push(p.sqrt());
        }
        SymTridiag::new(self.diag.clone(), off)
    }

    /// Index ranges of the blocks delimited by vanishing couplings
    /// (|sup[i]| and |sub[i+1]| both at or below `tol`).
    pub fn decoupled_blocks(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        let n = self.n();
        let mut blocks = Vec::new();
        let mut start = 0usize;
        for i in 0..n - 1 {
            if self.sup[i].abs() <= tol && self.sub[i + 1].abs() <= tol {
                blocks.push(start..i + 1);
                start = i + 1;
            }
        }
        blocks.push(start..n);
        blocks
    }

    pub fn block(&self, r: std::ops::Range<usize>) -> Tridiag {
        let diag = self.diag[r.clone()].to_vec();
        let mut sub = self.sub[r.clone()].to_vec();
        let mut sup = self.sup[r].to_vec();
        sub[0] = 0.0;
        *sup.last_mut().unwrap() = 0.0;
        Tridiag { diag, sub, sup }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_spectrum() {
        let t = SymTridiag::new(vec![3.0, -1.0, 0.5, 2.0], vec![0.0; 3]).unwrap();
        let mut eig = t.eigenvalues();
        let mut expect = vec![3.0, -1.0, 0.5, 2.0];
        expect.sort_by(f64::total_cmp);
        eig.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_laplacian_cosine_spectrum() {
        // constant-band matrix: eigenvalues a + 2b cos(k pi/(n+1))
        let n = 40;
        let (a, b) = (0.3, -0.7);
        let t = SymTridiag::new(vec![a; n], vec![b; n - 1]).unwrap();
        let eig = t.eigenvalues();
        let mut expect: Vec<f64> = (1..=n)
            .map(|k| a + 2.0 * b * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (x, y) in eig.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-11, "{x} vs {y}");
        }
    }

    #[test]
    fn eigenvalue_count_is_exact() {
        let n = 200;
        let t = SymTridiag::new(
            (0..n).map(|i| (i as f64 * 0.37).sin()).collect(),
            (0..n - 1).map(|i| 0.5 + 0.3 * (i as f64).cos()).collect(),
        )
        .unwrap();
        let (lo, hi) = t.gershgorin();
        assert_eq!(t.count_below(lo), 0);
        assert_eq!(t.count_below(hi), n);
        let eig = t.eigenvalues();
        assert_eq!(eig.len(), n);
        for w in eig.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn inverse_iteration_residual() {
        let n = 120;
        let t = SymTridiag::new(
            (0..n).map(|i| 2.0 + (i as f64 * 0.11).cos()).collect(),
            (0..n - 1).map(|i| -0.4 + 0.2 * (i as f64 * 0.7).sin()).collect(),
        )
        .unwrap();
        let lam = t.eigenvalue(n - 1);
        let (v, res) = t.eigenvector(lam).unwrap();
        assert!(res <= INVIT_RESIDUAL, "residual {res}");
        assert!((v.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_solver_solves() {
        let n = 50;
        let t = SymTridiag::new(
            (0..n).map(|i| 0.1 * (i as f64 * 1.3).sin()).collect(),
            (0..n - 1).map(|i| 1.0 + 0.9 * (i as f64 * 0.5).cos()).collect(),
        )
        .unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.77).cos()).collect();
        let sigma = 0.123;
        let x = t.solve_shifted(sigma, &b);
        let tx = t.apply(&x);
        for i in 0..n {
            let r = tx[i] - sigma * x[i] - b[i];
            assert!(r.abs() < 1e-9, "row {i} residual {r}");
        }
    }

    #[test]
    fn symmetrization_preserves_spectrum() {
        let n = 60;
        let diag: Vec<f64> = (0..n).map(|i| 1.0 - 0.01 * i as f64).collect();
        let mut sub = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n - 1 {
            sup[i] = 0.1 + 0.05 * (i as f64 * 0.3).sin().abs();
            sub[i + 1] = 0.5 * sup[i];
        }
        let t = Tridiag { diag: diag.clone(), sub, sup };
        let s = t.symmetrized().unwrap();
        // power iteration on the nonsymmetric form must agree with the top
        // symmetric eigenvalue
        let top = s.eigenvalue(n - 1);
        let mut x = vec![1.0; n];
        let mut lam = 0.0;
        for _ in 0..4000 {
            let y = t.apply(&x);
            lam = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = y.iter().map(|v| v / lam).collect();
        }
        assert!((lam - top).abs() < 1e-8, "{lam} vs {top}");
    }

    #[test]
    fn decoupled_blocks_split() {
        let t = Tridiag {
            diag: vec![1.0; 6],
            sub: vec![0.0, 0.2, 0.0, 0.0, 0.1, 0.3],
            sup: vec![0.2, 0.0, 0.0, 0.1, 0.3, 0.0],
        };
        let blocks = t.decoupled_blocks(0.0);
        assert_eq!(blocks, vec![0..2, 2..3, 3..6]);
    }
}
