//! End-to-end transfer functions in S and Z representations, structural
//! scattering, and a direct power-wave network solver used as the
//! ground-truth oracle.

use crate::error::{Error, Result};
use crate::linalg::{solve_capped, CMatrix, CVector, Lu, DEFAULT_COND_CAP};
use crate::netparams::{
    z_to_s, FullNetworkMatrix, ImpedanceBlocks, MatrixKind, PortPartition, ScatteringBlocks,
};
use num_complex::Complex64;

/// Port terminations: diagonal reflection-coefficient matrices (stored as
/// their diagonals) and the source power-wave vector.
#[derive(Clone, Debug)]
pub struct Termination {
    pub p: PortPartition,
    pub gamma_t: CVector,
    pub gamma_s: CVector,
    pub gamma_r: CVector,
    pub a_g: CVector,
}

impl Termination {
    /// Matched transmitter and receiver, reflectionless RIS loads.
    pub fn matched(p: PortPartition, a_g: CVector) -> Result<Self> {
        if a_g.len() != p.n_t {
            return Err(Error::DimensionMismatch {
                context: "source vector length vs transmitter ports",
                expected: p.n_t,
                got: a_g.len(),
            });
        }
        Ok(Self {
            p,
            gamma_t: CVector::zeros(p.n_t),
            gamma_s: CVector::zeros(p.n_s),
            gamma_r: CVector::zeros(p.n_r),
            a_g,
        })
    }

    pub fn with_gamma_s(mut self, gamma_s: CVector) -> Result<Self> {
        if gamma_s.len() != self.p.n_s {
            return Err(Error::DimensionMismatch {
                context: "gamma_s length vs RIS ports",
                expected: self.p.n_s,
                got: gamma_s.len(),
            });
        }
        self.gamma_s = gamma_s;
        Ok(self)
    }
}

/// Incident/reflected power waves of a terminated network.
#[derive(Clone, Debug)]
pub struct NetworkSolution {
    pub p: PortPartition,
    pub a: CVector,
    pub b: CVector,
}

impl NetworkSolution {
    pub fn a_t(&self) -> CVector {
        let (t, _, _) = self.p.ranges();
        self.a.rows(t.start, t.len()).into_owned()
    }
    pub fn a_s(&self) -> CVector {
        let (_, s, _) = self.p.ranges();
        self.a.rows(s.start, s.len()).into_owned()
    }
    pub fn a_r(&self) -> CVector {
        let (_, _, r) = self.p.ranges();
        self.a.rows(r.start, r.len()).into_owned()
    }
    pub fn b_t(&self) -> CVector {
        let (t, _, _) = self.p.ranges();
        self.b.rows(t.start, t.len()).into_owned()
    }
    pub fn b_s(&self) -> CVector {
        let (_, s, _) = self.p.ranges();
        self.b.rows(s.start, s.len()).into_owned()
    }
    pub fn b_r(&self) -> CVector {
        let (_, _, r) = self.p.ranges();
        self.b.rows(r.start, r.len()).into_owned()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    SParam,
    ZParamMatched,
}

/// End-to-end channel matrix (receiver ports × transmitter ports).
#[derive(Clone, Debug)]
pub struct EndToEndChannel {
    pub h: CMatrix,
    pub representation: Representation,
    /// Scene-family normalization constant, when estimated.
    pub normalization: Option<Complex64>,
}

impl EndToEndChannel {
    /// The single entry of a SISO channel.
    pub fn scalar(&self) -> Complex64 {
        assert!(
            self.h.nrows() == 1 && self.h.ncols() == 1,
            "scalar() requires a SISO channel"
        );
        self.h[(0, 0)]
    }
}

/// Received power gain G = ‖Ĥ‖²_F.
pub fn gain(h: &EndToEndChannel) -> f64 {
    h.h.iter().map(|v| v.norm_sqr()).sum()
}

/// S-representation end-to-end channel
/// Ĥ = S_RT + S_RS Γ_S (U − S_SS Γ_S)⁻¹ S_ST
/// with Γ_S given by its diagonal. Matched transmitter and receiver are
/// assumed by the closed form.
pub fn e2e_s(blocks: &ScatteringBlocks, gamma_s: &CVector) -> Result<EndToEndChannel> {
    let n_s = blocks.p.n_s;
    if gamma_s.len() != n_s {
        return Err(Error::DimensionMismatch {
            context: "gamma_s length vs RIS ports",
            expected: n_s,
            got: gamma_s.len(),
        });
    }
    // (U − S_SS Γ) where Γ scales columns of S_SS
    let mut sys = CMatrix::identity(n_s, n_s);
    for j in 0..n_s {
        for i in 0..n_s {
            sys[(i, j)] -= blocks.ss[(i, j)] * gamma_s[j];
        }
    }
    let x = solve_capped(&sys, &blocks.st, DEFAULT_COND_CAP, |cond, cap| {
        Error::ResonantConfiguration {
            context: "(U − S_SS·Γ_S) in e2e_s",
            cond,
            cap,
        }
    })?;
    let gx = CMatrix::from_fn(n_s, x.ncols(), |i, j| gamma_s[i] * x[(i, j)]);
    let h = &blocks.rt + &blocks.rs * gx;
    Ok(EndToEndChannel {
        h,
        representation: Representation::SParam,
        normalization: None,
    })
}

/// Z-representation channel for RIS ports terminated at the reference
/// impedance: Z_RT − Z_RS (Z_SS + Z₀U)⁻¹ Z_ST, up to a scene-family
/// normalization constant (not applied here).
pub fn e2e_z_matched(zb: &ImpedanceBlocks, z0: f64) -> Result<EndToEndChannel> {
    let n_s = zb.p.n_s;
    let sys = &zb.ss + CMatrix::identity(n_s, n_s) * Complex64::new(z0, 0.0);
    let x = solve_capped(&sys, &zb.st, DEFAULT_COND_CAP, |cond, cap| {
        Error::SingularConversion {
            context: "(Z_SS + Z0·U) in e2e_z_matched",
            cond,
            cap,
        }
    })?;
    let h = &zb.rt - &zb.rs * x;
    Ok(EndToEndChannel {
        h,
        representation: Representation::ZParamMatched,
        normalization: None,
    })
}

/// Structural-scattering value of a SISO scene: the Z-form channel with
/// the direct path removed and RIS ports matched, which collapses to the
/// closed form −(Z_RS·Z_ST)/(2Z₀). Computed as the direct product sum, no
/// linear solve involved.
pub fn structural_scattering(zb: &ImpedanceBlocks, z0: f64) -> Result<Complex64> {
    if zb.p.n_t != 1 || zb.p.n_r != 1 {
        return Err(Error::InvalidConfig(
            "structural_scattering requires a SISO partition".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..zb.p.n_s {
        acc += zb.rs[(0, k)] * zb.st[(k, 0)];
    }
    Ok(-acc / Complex64::new(2.0 * z0, 0.0))
}

/// Ratio of the two representations on one scene: the family normalization
/// constant ĉ with e2e_z_matched = ĉ · e2e_s(z_to_s(Z), 0).
pub fn estimate_normalization(zb: &ImpedanceBlocks, z0: f64) -> Result<Complex64> {
    if zb.p.n_t != 1 || zb.p.n_r != 1 {
        return Err(Error::InvalidConfig(
            "normalization estimate requires a SISO partition".into(),
        ));
    }
    let h_z = e2e_z_matched(zb, z0)?.scalar();
    let full = zb.reassemble();
    let s = z_to_s(&full, z0)?;
    let sb = ScatteringBlocks::partition(&s, zb.p)?;
    let h_s = e2e_s(&sb, &CVector::zeros(zb.p.n_s))?.scalar();
    if h_s.norm() == 0.0 {
        return Err(Error::InvalidConfig(
            "normalization undefined: S-form channel is zero".into(),
        ));
    }
    Ok(h_z / h_s)
}

/// Direct solver for the terminated network: stacks b = S·a with the
/// termination relations a = Γ̃·b + ã_g into one dense 2N×2N system in
/// (a, b). Shares no code path with the closed-form channel expressions.
pub fn solve_network(s: &FullNetworkMatrix, t: &Termination) -> Result<NetworkSolution> {
    if s.kind() != MatrixKind::Scattering {
        return Err(Error::InvalidConfig(
            "solve_network expects a scattering matrix".into(),
        ));
    }
    let n = s.n();
    if n != t.p.total() {
        return Err(Error::DimensionMismatch {
            context: "network size vs termination partition",
            expected: t.p.total(),
            got: n,
        });
    }
    let mut gamma_diag = CVector::zeros(n);
    let (tr, sr, rr) = t.p.ranges();
    for (i, idx) in tr.clone().enumerate() {
        gamma_diag[idx] = t.gamma_t[i];
    }
    for (i, idx) in sr.clone().enumerate() {
        gamma_diag[idx] = t.gamma_s[i];
    }
    for (i, idx) in rr.clone().enumerate() {
        gamma_diag[idx] = t.gamma_r[i];
    }

    // rows 0..n:   S·a − b = 0
    // rows n..2n:  a − Γ̃·b = ã_g
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(s.entries());
    for i in 0..n {
        m[(i, n + i)] = Complex64::new(-1.0, 0.0);
        m[(n + i, i)] = Complex64::new(1.0, 0.0);
        m[(n + i, n + i)] = -gamma_diag[i];
    }
    let mut rhs = CVector::zeros(2 * n);
    for (i, idx) in tr.clone().enumerate() {
        rhs[n + idx] = t.a_g[i];
    }

    let lu = Lu::new(&m);
    let u = lu.solve_vec(&rhs).ok_or(Error::SingularNetwork)?;
    let a = u.rows(0, n).into_owned();
    let b = u.rows(n, n).into_owned();

    // residual guard: both stacked equations must hold tightly
    let scale = t.a_g.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let r1 = s.entries() * &a - &b;
    let mut r2 = &a - &rhs.rows(n, n).into_owned();
    for i in 0..n {
        r2[i] -= gamma_diag[i] * b[i];
    }
    let worst = r1
        .iter()
        .chain(r2.iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if worst > 1e-12 * scale * (n as f64).sqrt() {
        return Err(Error::SingularNetwork);
    }
    Ok(NetworkSolution { p: t.p, a, b })
}
