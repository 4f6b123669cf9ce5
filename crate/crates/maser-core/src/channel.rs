//! The reduced cavity dynamics and its gauge-sector decomposition.
//!
//! Two independent routes to the same map guard each other:
//!
//! * `apply_channel` conjugates the state through the four Kraus operators
//!   with generic banded matrix products (no model-specific index
//!   bookkeeping);
//! * `sector_operator_*` build the closed-form tridiagonals acting on a
//!   single gauge band.
//!
//! The pictures: the trace picture evolves states (rho -> sum V rho V*),
//! optionally with the free rotation factored out (interaction variant);
//! the Hilbert-Schmidt picture evolves embedded observables
//! (X -> sum V^* X V) and is self-adjoint on the diagonal sector.

use num_complex::Complex64;

use crate::banded::{BandedOp, BandedState};
use crate::params::{z_beta, ModelParams};
use crate::tridiag::{SymTridiag, Tridiag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// States, physical phases included.
    Trace,
    /// States with the free cavity rotation factored out.
    TraceInteraction,
    /// Embedded observables in the Hilbert-Schmidt space.
    Hs,
}

/// The four Kraus operators of one picture, as banded matrices.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub picture: Picture,
    pub n_max: usize,
    pub w_minus: f64,
    pub w_plus: f64,
    /// Order: (ground->ground, excited->ground via a*, ground->excited via a,
    /// excited->excited).
    ops: [BandedOp; 4],
}

fn diag_phase(n_max: usize, omega_tau: f64) -> Vec<Complex64> {
    (0..=n_max)
        .map(|n| {
            let th = omega_tau * n as f64;
            Complex64::new(th.cos(), -th.sin())
        })
        .collect()
}

/// Kraus operators of the trace picture, physical phases e^{-i omega tau N}
/// included.
pub fn kraus_trace_picture(params: &ModelParams) -> KrausSet {
    build_kraus(params, Picture::Trace)
}

/// Trace-picture Kraus operators with the free rotation factored out.
pub fn kraus_trace_interaction(params: &ModelParams) -> KrausSet {
    build_kraus(params, Picture::TraceInteraction)
}

/// Hilbert-Schmidt picture Kraus operators.
pub fn kraus_hs_picture(params: &ModelParams) -> KrausSet {
    build_kraus(params, Picture::Hs)
}

fn build_kraus(params: &ModelParams, picture: Picture) -> KrausSet {
    let n_max = params.n_max;
    let dim = n_max + 1;
    let (w_minus, w_plus) = params.atom_weights();
    let b = params.beta_omega0();
    let z = params.z_beta();

    // per-picture scalar prefactors of the four operators
    let (f_gg, f_up, f_dn, f_ee) = match picture {
        Picture::Trace | Picture::TraceInteraction => {
            (w_minus.sqrt(), w_plus.sqrt(), w_minus.sqrt(), w_plus.sqrt())
        }
        Picture::Hs => {
            let zs = z.sqrt();
            (1.0 / zs, (-b / 4.0).exp() / zs, (-b / 4.0).exp() / zs, (-b / 2.0).exp() / zs)
        }
    };
    let phases: Vec<Complex64> = match picture {
        Picture::Trace => diag_phase(n_max, params.omega_tau()),
        _ => vec![Complex64::new(1.0, 0.0); dim],
    };

    // V_gg = f * phase(N) * C(N): diagonal
    let v_gg = BandedOp::from_band(
        dim,
        0,
        (0..dim).map(|n| phases[n] * params.c(n) * f_gg).collect(),
    );
    // V_up = f * phase(N) * S(N) a*: maps n -> n+1, band offset -1
    let v_up = BandedOp::from_band(
        dim,
        -1,
        (0..n_max)
            .map(|n| phases[n + 1] * params.s_tilde(n + 1) * f_up)
            .collect(),
    );
    // V_dn = f * phase(N) * S(N+1) a: maps n -> n-1, band offset +1
    let v_dn = BandedOp::from_band(
        dim,
        1,
        (1..dim)
            .map(|n| phases[n - 1] * params.s_tilde(n) * f_dn)
            .collect(),
    );
    // V_ee = f * phase(N) * C(N+1)^*: diagonal
    let v_ee = BandedOp::from_band(
        dim,
        0,
        (0..dim).map(|n| phases[n] * params.c(n + 1).conj() * f_ee).collect(),
    );
    KrausSet { picture, n_max, w_minus, w_plus, ops: [v_gg, v_up, v_dn, v_ee] }
}

impl KrausSet {
    pub fn ops(&self) -> &[BandedOp; 4] {
        &self.ops
    }

    /// sum V* V as a banded operator (completeness check material).
    pub fn completeness_sum(&self) -> BandedOp {
        let mut acc = BandedOp::zero(self.n_max + 1);
        for v in &self.ops {
            acc.add_assign(&v.adjoint().mul(v));
        }
        acc
    }
}

/// Result bookkeeping for one channel application.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepInfo {
    /// Trace lost to the hard truncation in this application.
    pub leakage: f64,
}

/// One application of the channel: sum V rho V* (trace pictures) or
/// sum V* X V (Hilbert-Schmidt picture).
///
/// Bands are independent; with the `parallel` feature they are processed
/// concurrently. Band offsets are preserved exactly (the Kraus sandwich
/// returns every contribution to the band it came from).
pub fn apply_channel(state: &BandedState, kraus: &KrausSet) -> (BandedState, StepInfo) {
    assert_eq!(state.n_max(), kraus.n_max, "state/kraus dimension mismatch");
    let dim = state.dim();
    let offsets = state.offsets();
    let trace_in = state.trace().re;

    let bands_out = crate::par::map_items(offsets, |d| {
        let x = state.band(d).expect("offset listed");
        let band_op = band_as_op(dim, d, x);
        let mut acc = BandedOp::zero(dim);
        for v in kraus.ops() {
            let term = match kraus.picture {
                Picture::Trace | Picture::TraceInteraction => v.mul(&band_op).mul(&v.adjoint()),
                Picture::Hs => v.adjoint().mul(&band_op).mul(v),
            };
            acc.add_assign(&term);
        }
        debug_assert!(acc.offsets().all(|o| o == d), "cross-band write");
        let out = acc
            .band(d)
            .map(|v| v.to_vec())
            .unwrap_or_else(|| vec![Complex64::default(); dim - d.unsigned_abs() as usize]);
        (d, out)
    });

    let mut out = BandedState::zero(state.n_max());
    for (d, v) in bands_out {
        out.set_band(d, v);
    }
    let trace_out = out.trace().re;
    let leakage = if kraus.picture == Picture::Hs { 0.0 } else { trace_in - trace_out };
    (out, StepInfo { leakage })
}

fn band_as_op(dim: usize, d: i64, x: &[Complex64]) -> BandedOp {
    BandedOp::from_band(dim, d, x.to_vec())
}

/// A tridiagonal gauge-sector operator: the action of the channel on the
/// coefficients of one band.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub d: i64,
    pub picture: Picture,
    pub n_max: usize,
    /// Photon index of the first coefficient (max(0, -d)).
    pub n_start: usize,
    diag: Vec<Complex64>,
    /// sub[j] multiplies x_{j-1} in row j (sub[0] = 0).
    sub: Vec<Complex64>,
    /// sup[j] multiplies x_{j+1} in row j (last entry 0).
    sup: Vec<Complex64>,
}

impl SectorOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn entries(&self) -> (&[Complex64], &[Complex64], &[Complex64]) {
        (&self.diag, &self.sub, &self.sup)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        let mut y = vec![Complex64::default(); n];
        for j in 0..n {
            let mut v = self.diag[j] * x[j];
            if j > 0 {
                v += self.sub[j] * x[j - 1];
            }
            if j + 1 < n {
                v += self.sup[j] * x[j + 1];
            }
            y[j] = v;
        }
        y
    }

    /// Entry-wise max modulus difference against another sector operator.
    pub fn max_entry_diff(&self, other: &SectorOperator) -> f64 {
        assert_eq!(self.len(), other.len());
        let mut worst = 0.0f64;
        for j in 0..self.len() {
            worst = worst.max((self.diag[j] - other.diag[j]).norm());
            worst = worst.max((self.sub[j] - other.sub[j]).norm());
            worst = worst.max((self.sup[j] - other.sup[j]).norm());
        }
        worst
    }

    /// Conjugate by the embedding weights W = diag(e^{-b(2n+d)/4}) and take
    /// the entry-wise complex conjugate: maps the Hilbert-Schmidt sector to
    /// the interaction trace sector.
    pub fn embedding_conjugated(&self, beta_omega0: f64) -> SectorOperator {
        // W T W^{-1} scales sub by e^{-b/2} and sup by e^{+b/2}
        let f = (-beta_omega0 / 2.0).exp();
        let n = self.len();
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n);
        let mut sup = Vec::with_capacity(n);
        for j in 0..n {
            diag.push(self.diag[j].conj());
            sub.push((self.sub[j] * f).conj());
            sup.push((self.sup[j] / f).conj());
        }
        SectorOperator {
            d: self.d,
            picture: Picture::TraceInteraction,
            n_max: self.n_max,
            n_start: self.n_start,
            diag,
            sub,
            sup,
        }
    }
}

/// Closed-form trace-picture sector operator for band d (physical phases:
/// the whole band picks up e^{+i omega tau d} per step).
pub fn sector_operator_trace(params: &ModelParams, d: i64) -> SectorOperator {
    let mut op = sector_operator_trace_interaction(params, d);
    let th = params.omega_tau() * d as f64;
    let ph = Complex64::new(th.cos(), th.sin());
    for v in op.diag.iter_mut().chain(op.sub.iter_mut()).chain(op.sup.iter_mut()) {
        *v *= ph;
    }
    op.picture = Picture::Trace;
    op
}

/// Interaction-picture trace sector operator: phase-free tridiagonal.
pub fn sector_operator_trace_interaction(params: &ModelParams, d: i64) -> SectorOperator {
    let n_max = params.n_max;
    let n_start = if d < 0 { (-d) as usize } else { 0 };
    let len = n_max + 1 - d.unsigned_abs() as usize;
    let (w_minus, w_plus) = params.atom_weights();
    let mut diag = Vec::with_capacity(len);
    let mut sub = Vec::with_capacity(len);
    let mut sup = Vec::with_capacity(len);
    for j in 0..len {
        let n = (n_start + j) as i64;
        let nd = (n + d) as usize;
        let n = n as usize;
        diag.push(
            params.c(n) * params.c(nd).conj() * w_minus
                + params.c(n + 1).conj() * params.c(nd + 1) * w_plus,
        );
        sub.push(Complex64::new(
            if j > 0 { w_plus * params.s_tilde(n) * params.s_tilde(nd) } else { 0.0 },
            0.0,
        ));
        sup.push(Complex64::new(
            if j + 1 < len { w_minus * params.s_tilde(n + 1) * params.s_tilde(nd + 1) } else { 0.0 },
            0.0,
        ));
    }
    SectorOperator { d, picture: Picture::TraceInteraction, n_max, n_start, diag, sub, sup }
}

/// Closed-form Hilbert-Schmidt sector operator for band d.
pub fn sector_operator_hs(params: &ModelParams, d: i64) -> SectorOperator {
    let n_max = params.n_max;
    let n_start = if d < 0 { (-d) as usize } else { 0 };
    let len = n_max + 1 - d.unsigned_abs() as usize;
    let z = params.z_beta();
    let b = params.beta_omega0();
    let ehalf = (-b / 2.0).exp();
    let eb = (-b).exp();
    let mut diag = Vec::with_capacity(len);
    let mut sub = Vec::with_capacity(len);
    let mut sup = Vec::with_capacity(len);
    for j in 0..len {
        let n = (n_start + j) as i64;
        let nd = (n + d) as usize;
        let n = n as usize;
        diag.push(
            (params.c(n).conj() * params.c(nd) + params.c(n + 1) * params.c(nd + 1).conj() * eb)
                / z,
        );
        sub.push(Complex64::new(
            if j > 0 { ehalf * params.s_tilde(n) * params.s_tilde(nd) / z } else { 0.0 },
            0.0,
        ));
        sup.push(Complex64::new(
            if j + 1 < len { ehalf * params.s_tilde(n + 1) * params.s_tilde(nd + 1) / z } else { 0.0 },
            0.0,
        ));
    }
    SectorOperator { d, picture: Picture::Hs, n_max, n_start, diag, sub, sup }
}

/// The diagonal Hilbert-Schmidt sector as a real symmetric tridiagonal:
/// 1 - grad_b^* D(N) grad_b.
pub fn l0_sym_tridiag(params: &ModelParams) -> SymTridiag {
    l0_sym_tridiag_sized(params, params.n_max)
}

pub fn l0_sym_tridiag_sized(params: &ModelParams, n_max: usize) -> SymTridiag {
    let b = params.beta_omega0();
    let eb = (-b).exp();
    let ehalf = (-b / 2.0).exp();
    let (eta, xi) = params.dimensionless();
    let diag: Vec<f64> = (0..=n_max)
        .map(|n| {
            1.0 - crate::params::damping(n, eta, xi, b)
                - eb * crate::params::damping(n + 1, eta, xi, b)
        })
        .collect();
    let off: Vec<f64> = (0..n_max)
        .map(|n| ehalf * crate::params::damping(n + 1, eta, xi, b))
        .collect();
    SymTridiag::new(diag, off).expect("lengths consistent")
}

/// The diagonal trace-picture sector as a real tridiagonal:
/// 1 - grad_0^* D(N) grad_2b.
pub fn cl0_tridiag(params: &ModelParams) -> Tridiag {
    cl0_tridiag_with_damping(params, |n| params.damping(n))
}

/// Same, with the hopping profile zeroed on the quasi-resonance set.
pub fn cl0_modified_tridiag(params: &ModelParams, quasi: &[usize]) -> Tridiag {
    let (eta, xi) = params.dimensionless();
    let b = params.beta_omega0();
    cl0_tridiag_with_damping(params, |n| crate::params::damping_modified(n, eta, xi, b, quasi))
}

fn cl0_tridiag_with_damping<F: Fn(usize) -> f64>(params: &ModelParams, dmp: F) -> Tridiag {
    let n_max = params.n_max;
    let eb = (-params.beta_omega0()).exp();
    let n = n_max + 1;
    let mut diag = Vec::with_capacity(n);
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for i in 0..n {
        diag.push(1.0 - dmp(i) - eb * dmp(i + 1));
        if i > 0 {
            sub[i] = eb * dmp(i);
        }
        if i + 1 < n {
            sup[i] = dmp(i + 1);
        }
    }
    Tridiag { diag, sub, sup }
}

/// Embedding weights: band entries of rho^{1/4} X rho^{1/4} pick up
/// e^{-b(2n+d)/4} / Z_S^{1/2}, with Z_S the truncated thermal normalization.
pub fn hs_embed_state(x: &BandedState, beta_omega0: f64) -> BandedState {
    let n_max = x.n_max();
    let zs: f64 = (0..=n_max).map(|n| (-beta_omega0 * n as f64).exp()).sum();
    let scale = 1.0 / zs.sqrt();
    let mut out = BandedState::zero(n_max);
    for d in x.offsets() {
        let v = x.band(d).unwrap();
        let n_start = if d < 0 { (-d) as usize } else { 0 };
        let w: Vec<Complex64> = v
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let n = (n_start + j) as f64;
                c * ((-beta_omega0 * (2.0 * n + d as f64) / 4.0).exp() * scale)
            })
            .collect();
        out.set_band(d, w);
    }
    out
}

/// Dual of the interaction-picture channel on observables:
/// A -> sum V~^* A V~ (phase-free Kraus operators).
pub fn apply_dual_interaction(a: &BandedState, params: &ModelParams) -> BandedState {
    let kraus = kraus_trace_interaction(params);
    // the dual sandwich has the adjoint on the left, same as the HS apply
    let hs_like = KrausSet { picture: Picture::Hs, ..kraus };
    apply_channel(a, &hs_like).0
}

/// Per-step gauge phase of band d in the physical picture relative to the
/// interaction picture: e^{+i omega tau d n} after n steps.
pub fn interaction_phase(omega_tau: f64, d: i64, steps: usize) -> Complex64 {
    let th = omega_tau * d as f64 * steps as f64;
    Complex64::new(th.cos(), th.sin())
}

/// Convenience: thermal state of the truncated model as a banded state.
pub fn thermal_banded(params: &ModelParams) -> BandedState {
    BandedState::from_diagonal(&params.thermal_state().expect("beta > 0"))
}
