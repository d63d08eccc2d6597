//! S/Z network-parameter algebra: conversions, reflection coefficients,
//! and T/S/R block partitioning of full network matrices.
//!
//! Port convention everywhere: transmitter ports first, then RIS ports,
//! then receiver ports. A single shared real reference impedance applies
//! to all ports.

use crate::error::{Error, Result};
use crate::linalg::{solve_capped, CMatrix, DEFAULT_COND_CAP};
use num_complex::Complex64;

/// Port counts in T/S/R order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PortPartition {
    pub n_t: usize,
    pub n_s: usize,
    pub n_r: usize,
}

impl PortPartition {
    pub fn new(n_t: usize, n_s: usize, n_r: usize) -> Result<Self> {
        if n_t < 1 || n_s < 1 || n_r < 1 {
            return Err(Error::InvalidConfig(format!(
                "port counts must all be >= 1, got ({n_t}, {n_s}, {n_r})"
            )));
        }
        Ok(Self { n_t, n_s, n_r })
    }

    pub fn total(&self) -> usize {
        self.n_t + self.n_s + self.n_r
    }

    /// Index ranges of the three port groups.
    pub fn ranges(
        &self,
    ) -> (
        std::ops::Range<usize>,
        std::ops::Range<usize>,
        std::ops::Range<usize>,
    ) {
        let t = 0..self.n_t;
        let s = self.n_t..self.n_t + self.n_s;
        let r = self.n_t + self.n_s..self.total();
        (t, s, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Scattering,
    Impedance,
}

/// A full N×N network matrix with its reference impedance.
#[derive(Clone, Debug)]
pub struct FullNetworkMatrix {
    kind: MatrixKind,
    m: CMatrix,
    z0: f64,
}

impl FullNetworkMatrix {
    pub fn new(kind: MatrixKind, m: CMatrix, z0: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                context: "network matrix must be square",
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if !z0.is_finite() || z0 <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "reference impedance must be positive and finite, got {z0}"
            )));
        }
        if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidConfig(
                "network matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { kind, m, z0 })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_entries(self) -> CMatrix {
        self.m
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }
}

/// S = (Z − Z₀U)(Z + Z₀U)⁻¹, computed as the solve (Z + Z₀U)·S = (Z − Z₀U);
/// the two factors commute because both are polynomials in Z.
pub fn z_to_s(z: &FullNetworkMatrix, z0: f64) -> Result<FullNetworkMatrix> {
    z_to_s_capped(z, z0, DEFAULT_COND_CAP)
}

pub fn z_to_s_capped(z: &FullNetworkMatrix, z0: f64, cap: f64) -> Result<FullNetworkMatrix> {
    if z.kind() != MatrixKind::Impedance {
        return Err(Error::InvalidConfig(
            "z_to_s expects an impedance matrix".into(),
        ));
    }
    let n = z.n();
    let u = CMatrix::identity(n, n);
    let zs = z.entries();
    let a = zs + &u * Complex64::new(z0, 0.0);
    let b = zs - &u * Complex64::new(z0, 0.0);
    let s = solve_capped(&a, &b, cap, |cond, cap| Error::SingularConversion {
        context: "(Z + Z0·U) in z_to_s",
        cond,
        cap,
    })?;
    FullNetworkMatrix::new(MatrixKind::Scattering, s, z0)
}

/// Z = Z₀(U + S)(U − S)⁻¹, computed as the solve (U − S)·(Z/Z₀) = (U + S).
pub fn s_to_z(s: &FullNetworkMatrix, z0: f64) -> Result<FullNetworkMatrix> {
    s_to_z_capped(s, z0, DEFAULT_COND_CAP)
}

pub fn s_to_z_capped(s: &FullNetworkMatrix, z0: f64, cap: f64) -> Result<FullNetworkMatrix> {
    if s.kind() != MatrixKind::Scattering {
        return Err(Error::InvalidConfig(
            "s_to_z expects a scattering matrix".into(),
        ));
    }
    let n = s.n();
    let u = CMatrix::identity(n, n);
    let ss = s.entries();
    let a = &u - ss;
    let b = &u + ss;
    let z_over_z0 = solve_capped(&a, &b, cap, |cond, cap| Error::SingularConversion {
        context: "(U − S) in s_to_z",
        cond,
        cap,
    })?;
    FullNetworkMatrix::new(
        MatrixKind::Impedance,
        z_over_z0 * Complex64::new(z0, 0.0),
        z0,
    )
}

/// Γ = (Z_L − Z₀)/(Z_L + Z₀).
pub fn reflection_coefficient(z_load: Complex64, z0: f64) -> Result<Complex64> {
    let den = z_load + Complex64::new(z0, 0.0);
    if den.norm() == 0.0 {
        return Err(Error::DegenerateLoad);
    }
    Ok((z_load - Complex64::new(z0, 0.0)) / den)
}

/// The nine T/S/R submatrices of a scattering matrix.
#[derive(Clone, Debug)]
pub struct ScatteringBlocks {
    pub p: PortPartition,
    pub z0: f64,
    pub tt: CMatrix,
    pub ts: CMatrix,
    pub tr: CMatrix,
    pub st: CMatrix,
    pub ss: CMatrix,
    pub sr: CMatrix,
    pub rt: CMatrix,
    pub rs: CMatrix,
    pub rr: CMatrix,
}

/// The nine T/S/R submatrices of an impedance matrix.
#[derive(Clone, Debug)]
pub struct ImpedanceBlocks {
    pub p: PortPartition,
    pub z0: f64,
    pub tt: CMatrix,
    pub ts: CMatrix,
    pub tr: CMatrix,
    pub st: CMatrix,
    pub ss: CMatrix,
    pub sr: CMatrix,
    pub rt: CMatrix,
    pub rs: CMatrix,
    pub rr: CMatrix,
}

pub enum Blocks {
    Scattering(ScatteringBlocks),
    Impedance(ImpedanceBlocks),
}

fn slice_blocks(m: &CMatrix, p: PortPartition) -> [CMatrix; 9] {
    let (t, s, r) = p.ranges();
    let cut = |rows: &std::ops::Range<usize>, cols: &std::ops::Range<usize>| {
        m.view((rows.start, cols.start), (rows.len(), cols.len()))
            .into_owned()
    };
    [
        cut(&t, &t),
        cut(&t, &s),
        cut(&t, &r),
        cut(&s, &t),
        cut(&s, &s),
        cut(&s, &r),
        cut(&r, &t),
        cut(&r, &s),
        cut(&r, &r),
    ]
}

fn check_dim(m: &FullNetworkMatrix, p: PortPartition) -> Result<()> {
    if m.n() != p.total() {
        return Err(Error::DimensionMismatch {
            context: "partition does not tile the matrix",
            expected: p.total(),
            got: m.n(),
        });
    }
    Ok(())
}

impl ScatteringBlocks {
    pub fn partition(m: &FullNetworkMatrix, p: PortPartition) -> Result<Self> {
        if m.kind() != MatrixKind::Scattering {
            return Err(Error::InvalidConfig("expected a scattering matrix".into()));
        }
        check_dim(m, p)?;
        let [tt, ts, tr, st, ss, sr, rt, rs, rr] = slice_blocks(m.entries(), p);
        Ok(Self {
            p,
            z0: m.z0(),
            tt,
            ts,
            tr,
            st,
            ss,
            sr,
            rt,
            rs,
            rr,
        })
    }

    pub fn reassemble(&self) -> FullNetworkMatrix {
        let m = reassemble_blocks(
            self.p,
            [
                &self.tt, &self.ts, &self.tr, &self.st, &self.ss, &self.sr, &self.rt, &self.rs,
                &self.rr,
            ],
        );
        FullNetworkMatrix::new(MatrixKind::Scattering, m, self.z0)
            .expect("blocks came from a valid matrix")
    }
}

impl ImpedanceBlocks {
    pub fn partition(m: &FullNetworkMatrix, p: PortPartition) -> Result<Self> {
        if m.kind() != MatrixKind::Impedance {
            return Err(Error::InvalidConfig("expected an impedance matrix".into()));
        }
        check_dim(m, p)?;
        let [tt, ts, tr, st, ss, sr, rt, rs, rr] = slice_blocks(m.entries(), p);
        Ok(Self {
            p,
            z0: m.z0(),
            tt,
            ts,
            tr,
            st,
            ss,
            sr,
            rt,
            rs,
            rr,
        })
    }

    pub fn reassemble(&self) -> FullNetworkMatrix {
        let m = reassemble_blocks(
            self.p,
            [
                &self.tt, &self.ts, &self.tr, &self.st, &self.ss, &self.sr, &self.rt, &self.rs,
                &self.rr,
            ],
        );
        FullNetworkMatrix::new(MatrixKind::Impedance, m, self.z0)
            .expect("blocks came from a valid matrix")
    }
}

fn reassemble_blocks(p: PortPartition, b: [&CMatrix; 9]) -> CMatrix {
    let n = p.total();
    let (t, s, r) = p.ranges();
    let mut m = CMatrix::zeros(n, n);
    let rows = [&t, &s, &r];
    let cols = [&t, &s, &r];
    for (bi, block) in b.iter().enumerate() {
        let rr = rows[bi / 3];
        let cc = cols[bi % 3];
        m.view_mut((rr.start, cc.start), (rr.len(), cc.len()))
            .copy_from(*block);
    }
    m
}

/// Partition a full matrix into its nine T/S/R blocks, preserving kind.
pub fn partition(m: &FullNetworkMatrix, p: PortPartition) -> Result<Blocks> {
    match m.kind() {
        MatrixKind::Scattering => Ok(Blocks::Scattering(ScatteringBlocks::partition(m, p)?)),
        MatrixKind::Impedance => Ok(Blocks::Impedance(ImpedanceBlocks::partition(m, p)?)),
    }
}
