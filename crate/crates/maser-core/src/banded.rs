//! Banded operators and banded states on the truncated Fock space.
//!
//! A band is indexed by its offset `off = col - row`; the coefficient vector
//! of a band stores entries (row, row+off) for the rows where both indices
//! are in range. A state rho = sum_d sum_n x^(d)_n |n><n+d| therefore keeps
//! its d-th gauge component in the band with offset d.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dense::CMatrix;
use crate::params::DiagonalState;

/// Length of the band with the given offset on a dim x dim matrix.
#[inline]
fn band_len(dim: usize, off: i64) -> usize {
    dim - off.unsigned_abs() as usize
}

/// Row index of the j-th entry of a band.
#[inline]
fn band_row(off: i64, j: usize) -> usize {
    j + if off < 0 { (-off) as usize } else { 0 }
}

/// A banded complex matrix stored as a map offset -> diagonal vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOp {
    dim: usize,
    diags: BTreeMap<i64, Vec<Complex64>>,
}

impl BandedOp {
    pub fn zero(dim: usize) -> Self {
        Self { dim, diags: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        op.diags.insert(0, vec![Complex64::new(1.0, 0.0); dim]);
        op
    }

    /// Single-band operator. `coeffs` must have length `dim - |off|`.
    pub fn from_band(dim: usize, off: i64, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), band_len(dim, off), "band length mismatch");
        let mut op = Self::zero(dim);
        if coeffs.iter().any(|c| c.norm_sqr() != 0.0) {
            op.diags.insert(off, coeffs);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        self.diags.keys().copied()
    }

    pub fn band(&self, off: i64) -> Option<&[Complex64]> {
        self.diags.get(&off).map(|v| v.as_slice())
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let off = col as i64 - row as i64;
        match self.diags.get(&off) {
            Some(v) => v[row - band_row(off, 0)],
            None => Complex64::default(),
        }
    }

    /// Conjugate transpose: band off -> band -off, entries conjugated.
    pub fn adjoint(&self) -> Self {
        let mut diags = BTreeMap::new();
        for (&off, v) in &self.diags {
            diags.insert(-off, v.iter().map(|c| c.conj()).collect());
        }
        Self { dim: self.dim, diags }
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in self.diags.values_mut() {
            for c in v.iter_mut() {
                *c *= s;
            }
        }
    }

    pub fn add_assign(&mut self, other: &BandedOp) {
        assert_eq!(self.dim, other.dim);
        for (&off, v) in &other.diags {
            let dst = self
                .diags
                .entry(off)
                .or_insert_with(|| vec![Complex64::default(); band_len(other.dim, off)]);
            for (d, s) in dst.iter_mut().zip(v) {
                *d += s;
            }
        }
    }

    /// Structural banded product: offsets add, entries accumulate along the
    /// shared index.
    pub fn mul(&self, other: &BandedOp) -> BandedOp {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let dim = self.dim as i64;
        let mut out = BandedOp::zero(self.dim);
        for (&o1, v1) in &self.diags {
            for (&o2, v2) in &other.diags {
                let off = o1 + o2;
                if off.unsigned_abs() as usize >= self.dim {
                    continue;
                }
                // rows r with r, r+o1, r+o1+o2 all in [0, dim)
                let lo = 0.max(-o1).max(-off);
                let hi = (dim - 1).min(dim - 1 - o1).min(dim - 1 - off);
                if lo > hi {
                    continue;
                }
                let dst = out
                    .diags
                    .entry(off)
                    .or_insert_with(|| vec![Complex64::default(); band_len(self.dim, off)]);
                let base1 = band_row(o1, 0) as i64;
                let base2 = band_row(o2, 0) as i64;
                let base = band_row(off, 0) as i64;
                for r in lo..=hi {
                    let a = v1[(r - base1) as usize];
                    let b = v2[(r + o1 - base2) as usize];
                    dst[(r - base) as usize] += a * b;
                }
            }
        }
        out.diags.retain(|_, v| v.iter().any(|c| c.norm_sqr() != 0.0));
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.diags
            .values()
            .flat_map(|v| v.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for (&off, v) in &self.diags {
            for (j, &c) in v.iter().enumerate() {
                let r = band_row(off, j);
                m.set(r, (r as i64 + off) as usize, c);
            }
        }
        m
    }
}

/// A density-matrix-like object in gauge-sector form.
///
/// Hermiticity (band -d equals the conjugate of band d) is maintained by the
/// constructors and by channel application.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedState {
    n_max: usize,
    bands: BTreeMap<i64, Vec<Complex64>>,
}

impl BandedState {
    pub fn zero(n_max: usize) -> Self {
        Self { n_max, bands: BTreeMap::new() }
    }

    pub fn from_diagonal(diag: &DiagonalState) -> Self {
        let n_max = diag.n_max();
        let mut bands = BTreeMap::new();
        bands.insert(0, diag.values().iter().map(|&p| Complex64::new(p, 0.0)).collect());
        Self { n_max, bands }
    }

    pub fn fock(n_max: usize, n: usize) -> Self {
        assert!(n <= n_max);
        let mut band0 = vec![Complex64::default(); n_max + 1];
        band0[n] = Complex64::new(1.0, 0.0);
        let mut bands = BTreeMap::new();
        bands.insert(0, band0);
        Self { n_max, bands }
    }

    /// Pure superposition (|a> + |b>)/sqrt(2) as a state; populates band 0
    /// and bands +-(b-a).
    pub fn superposition_pair(n_max: usize, a: usize, b: usize) -> Self {
        assert!(a < b && b <= n_max);
        let mut st = Self::zero(n_max);
        let half = Complex64::new(0.5, 0.0);
        let d = (b - a) as i64;
        let mut band0 = vec![Complex64::default(); n_max + 1];
        band0[a] = half;
        band0[b] = half;
        st.bands.insert(0, band0);
        let mut up = vec![Complex64::default(); band_len(n_max + 1, d)];
        up[a] = half;
        st.bands.insert(d, up.clone());
        st.bands.insert(-d, up);
        st
    }

    /// Truncated coherent state |alpha><alpha| with coherences kept up to
    /// `d_max`; renormalized to unit trace on the truncated space.
    pub fn coherent(n_max: usize, alpha: f64, d_max: usize) -> Self {
        let mut amps = Vec::with_capacity(n_max + 1);
        let mut a = (-alpha * alpha / 2.0).exp();
        amps.push(a);
        for n in 1..=n_max {
            a *= alpha / (n as f64).sqrt();
            amps.push(a);
        }
        let norm: f64 = amps.iter().map(|a| a * a).sum();
        let scale = 1.0 / norm;
        let mut bands = BTreeMap::new();
        for d in 0..=d_max.min(n_max) as i64 {
            let len = band_len(n_max + 1, d);
            let v: Vec<Complex64> = (0..len)
                .map(|n| Complex64::new(amps[n] * amps[n + d as usize] * scale, 0.0))
                .collect();
            if d == 0 {
                bands.insert(0, v);
            } else {
                bands.insert(d, v.clone());
                bands.insert(-d, v);
            }
        }
        Self { n_max, bands }
    }

    /// Build from a dense Hermitian matrix, keeping bands |d| <= d_max.
    /// Returns the state and the l1 mass dropped beyond the cutoff.
    pub fn from_dense(m: &CMatrix, d_max: usize) -> (Self, f64) {
        let dim = m.dim();
        let n_max = dim - 1;
        let mut bands = BTreeMap::new();
        let mut dropped = 0.0;
        for off in -(n_max as i64)..=(n_max as i64) {
            let len = band_len(dim, off);
            let v: Vec<Complex64> = (0..len)
                .map(|j| {
                    let r = band_row(off, j);
                    m.get(r, (r as i64 + off) as usize)
                })
                .collect();
            let l1: f64 = v.iter().map(|c| c.norm()).sum();
            if off.unsigned_abs() as usize > d_max {
                dropped += l1;
            } else if l1 > 0.0 {
                bands.insert(off, v);
            }
        }
        (Self { n_max, bands }, dropped)
    }

    pub(crate) fn from_bands(n_max: usize, bands: BTreeMap<i64, Vec<Complex64>>) -> Self {
        Self { n_max, bands }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn offsets(&self) -> Vec<i64> {
        self.bands.keys().copied().collect()
    }

    pub fn band(&self, d: i64) -> Option<&[Complex64]> {
        self.bands.get(&d).map(|v| v.as_slice())
    }

    pub fn band_mut(&mut self, d: i64) -> Option<&mut Vec<Complex64>> {
        self.bands.get_mut(&d)
    }

    pub fn set_band(&mut self, d: i64, v: Vec<Complex64>) {
        assert_eq!(v.len(), band_len(self.dim(), d));
        self.bands.insert(d, v);
    }

    pub fn is_diagonal(&self) -> bool {
        self.bands.keys().all(|&d| d == 0)
    }

    pub fn trace(&self) -> Complex64 {
        self.bands
            .get(&0)
            .map(|v| v.iter().sum())
            .unwrap_or_default()
    }

    pub fn band_l1(&self, d: i64) -> f64 {
        self.bands
            .get(&d)
            .map(|v| v.iter().map(|c| c.norm()).sum())
            .unwrap_or(0.0)
    }

    /// Largest Hermiticity defect max |x^(-d) - conj(x^(d))|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (&d, v) in &self.bands {
            if d < 0 {
                continue;
            }
            match self.bands.get(&-d) {
                Some(w) => {
                    for (a, b) in v.iter().zip(w) {
                        worst = worst.max((a.conj() - b).norm());
                    }
                }
                None => {
                    worst = worst.max(v.iter().map(|c| c.norm()).fold(0.0, f64::max));
                }
            }
        }
        worst
    }

    /// Diagonal band as real occupations (imaginary parts must be noise).
    pub fn diagonal_real(&self) -> Vec<f64> {
        match self.bands.get(&0) {
            Some(v) => v.iter().map(|c| c.re).collect(),
            None => vec![0.0; self.dim()],
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim());
        for (&off, v) in &self.bands {
            for (j, &c) in v.iter().enumerate() {
                let r = band_row(off, j);
                m.set(r, (r as i64 + off) as usize, c);
            }
        }
        m
    }

    /// l1 norms of all bands, keyed by offset.
    pub fn band_norms(&self) -> BTreeMap<i64, f64> {
        self.bands
            .iter()
            .map(|(&d, v)| (d, v.iter().map(|c| c.norm()).sum()))
            .collect()
    }

    /// Lower and upper bounds on the trace norm of (self - diag(q)).
    ///
    /// Lower: l1 of the diagonal difference (dephasing bound). Upper: sum of
    /// band l1 norms, each band being a shifted diagonal of known trace norm.
    pub fn trace_norm_bounds_vs_diagonal(&self, q: &[f64]) -> (f64, f64) {
        assert_eq!(q.len(), self.dim());
        let diag_l1: f64 = match self.bands.get(&0) {
            Some(v) => v
                .iter()
                .zip(q)
                .map(|(c, &p)| (c - Complex64::new(p, 0.0)).norm())
                .sum(),
            None => q.iter().map(|p| p.abs()).sum(),
        };
        let mut upper = diag_l1;
        for (&d, _) in &self.bands {
            if d != 0 {
                upper += self.band_l1(d);
            }
        }
        (diag_l1, upper)
    }

    /// Multiply band d by phase^d (diagonal-unitary conjugation).
    pub fn apply_gauge_phase(&mut self, phase: Complex64) {
        for (&d, v) in self.bands.iter_mut() {
            if d == 0 {
                continue;
            }
            let f = phase.powi(d as i32);
            for c in v.iter_mut() {
                *c *= f;
            }
        }
    }
}
