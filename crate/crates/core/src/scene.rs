//! Physical dipole scenes and impedance-matrix assembly.
//!
//! All radiators are z-directed thin wire dipoles with an assumed
//! sinusoidal current distribution. Mutual impedances come from the
//! induced-EMF integral evaluated with Gauss-Legendre quadrature split at
//! the current-profile kink; self impedances use the wire radius as the
//! field-point offset.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::netparams::{FullNetworkMatrix, MatrixKind, PortPartition};
use crate::{C0, ETA0, Z0_DEFAULT};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x) by upward recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// A z-directed thin wire dipole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dipole {
    pub center: [f64; 3],
    pub length: f64,
    pub radius: f64,
    /// Fixed z orientation, recorded for generality.
    pub orientation: [f64; 3],
}

impl Dipole {
    pub fn new(center: [f64; 3], length: f64, radius: f64) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(length) || !positive(radius) {
            return Err(Error::InvalidGeometry(format!(
                "dipole length and radius must be positive, got L={length}, r={radius}"
            )));
        }
        if radius / length > 0.05 {
            return Err(Error::InvalidGeometry(format!(
                "thin-wire model requires radius/length <= 0.05, got {}",
                radius / length
            )));
        }
        Ok(Self {
            center,
            length,
            radius,
            orientation: [0.0, 0.0, 1.0],
        })
    }

    fn half_length(&self) -> f64 {
        self.length / 2.0
    }
}

/// Horizontal (xy-plane) distance and vertical offset from a to b.
fn pair_geometry(a: &Dipole, b: &Dipole) -> (f64, f64) {
    let dx = b.center[0] - a.center[0];
    let dy = b.center[1] - a.center[1];
    let dz = b.center[2] - a.center[2];
    (dx.hypot(dy), dz)
}

fn overlaps(a: &Dipole, b: &Dipole) -> bool {
    let (d, h) = pair_geometry(a, b);
    d < a.radius + b.radius && h.abs() < a.half_length() + b.half_length()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmfMethod {
    InducedEmfSinusoidal,
}

/// Quadrature configuration for the induced-EMF integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutualImpedanceModel {
    pub method: EmfMethod,
    pub integration_points: usize,
}

impl MutualImpedanceModel {
    pub fn new(integration_points: usize) -> Result<Self> {
        if integration_points < 64 {
            return Err(Error::InvalidConfig(format!(
                "integration_points must be >= 64, got {integration_points}"
            )));
        }
        Ok(Self {
            method: EmfMethod::InducedEmfSinusoidal,
            integration_points,
        })
    }

    /// Nodes per half-interval; the total is split at the current kink.
    fn points_per_side(&self) -> usize {
        self.integration_points.div_ceil(2)
    }
}

impl Default for MutualImpedanceModel {
    fn default() -> Self {
        Self {
            method: EmfMethod::InducedEmfSinusoidal,
            integration_points: 128,
        }
    }
}

/// Induced-EMF integral for parallel z-directed sinusoidal dipoles.
///
/// `rho` is the horizontal field-point offset, `h` the vertical offset of
/// b's center above a's. The integrand kernel is the exact E_z of a
/// sinusoidal filament; the integral is split at z' = 0 where the test
/// current's derivative is discontinuous.
fn emf_integral(
    k: f64,
    la: f64,
    lb: f64,
    rho: f64,
    h: f64,
    nodes: &[f64],
    weights: &[f64],
) -> Complex64 {
    let j = Complex64::new(0.0, 1.0);
    let cos_kla = (k * la).cos();
    let mut acc = Complex64::new(0.0, 0.0);
    for (lo, hi) in [(-lb, 0.0), (0.0, lb)] {
        let mid = 0.5 * (hi + lo);
        let half = 0.5 * (hi - lo);
        let mut part = Complex64::new(0.0, 0.0);
        for (&x, &w) in nodes.iter().zip(weights) {
            let zp = mid + half * x;
            let z = h + zp;
            let r1 = rho.hypot(z - la);
            let r2 = rho.hypot(z + la);
            let r = rho.hypot(z);
            let f = (-j * k * r1).exp() / r1 + (-j * k * r2).exp() / r2
                - 2.0 * cos_kla * (-j * k * r).exp() / r;
            part += w * f * (k * (lb - zp.abs())).sin();
        }
        acc += half * part;
    }
    j * ETA0 / (4.0 * std::f64::consts::PI) / ((k * la).sin() * (k * lb).sin()) * acc
}

fn mutual_with_nodes(
    a: &Dipole,
    b: &Dipole,
    f_hz: f64,
    nodes: &[f64],
    weights: &[f64],
) -> Result<Complex64> {
    if overlaps(a, b) {
        return Err(Error::OverlappingDipoles { a: 0, b: 1 });
    }
    let k = 2.0 * std::f64::consts::PI * f_hz / C0;
    let (d, h) = pair_geometry(a, b);
    // collinear pairs integrate along the axis; keep the wire radius as a
    // floor so the kernel stays regular if segments nearly touch
    let rho = d.max(b.radius);
    Ok(emf_integral(
        k,
        a.half_length(),
        b.half_length(),
        rho,
        h,
        nodes,
        weights,
    ))
}

/// Mutual impedance between two distinct parallel dipoles.
pub fn mutual_impedance(
    a: &Dipole,
    b: &Dipole,
    f_hz: f64,
    model: &MutualImpedanceModel,
) -> Result<Complex64> {
    let (nodes, weights) = gauss_legendre(model.points_per_side());
    mutual_with_nodes(a, b, f_hz, &nodes, &weights)
}

/// Self impedance: the same integral with the field point on the wire
/// surface (offset = radius, no vertical shift).
pub fn self_impedance(a: &Dipole, f_hz: f64, model: &MutualImpedanceModel) -> Complex64 {
    let (nodes, weights) = gauss_legendre(model.points_per_side());
    self_with_nodes(a, f_hz, &nodes, &weights)
}

fn self_with_nodes(a: &Dipole, f_hz: f64, nodes: &[f64], weights: &[f64]) -> Complex64 {
    let k = 2.0 * std::f64::consts::PI * f_hz / C0;
    let l = a.half_length();
    emf_integral(k, l, l, a.radius, 0.0, nodes, weights)
}

/// Scene configuration as read from a TOML file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub frequency_ghz: f64,
    pub tx_position: [f64; 3],
    pub rx_position: [f64; 3],
    pub ris_center: [f64; 3],
    /// Column spacing divisor: d_y = lambda / q_divisor.
    pub q_divisor: f64,
    #[serde(default = "default_dz_over_lambda")]
    pub dz_over_lambda: f64,
    #[serde(default = "default_length_over_lambda")]
    pub dipole_length_over_lambda: f64,
    #[serde(default = "default_radius_over_lambda")]
    pub dipole_radius_over_lambda: f64,
    /// Row count override; defaults to 3.
    #[serde(default)]
    pub n_rows: Option<usize>,
    /// Column count override; defaults to 2·q_divisor rounded to nearest.
    #[serde(default)]
    pub n_cols: Option<usize>,
    #[serde(default = "default_integration_points")]
    pub integration_points: usize,
}

fn default_dz_over_lambda() -> f64 {
    0.75
}
fn default_length_over_lambda() -> f64 {
    0.46
}
fn default_radius_over_lambda() -> f64 {
    1.0 / 500.0
}
fn default_integration_points() -> usize {
    128
}

impl SceneConfig {
    /// The 28 GHz reference scenario with the given column divisor.
    pub fn reference(q_divisor: f64) -> Self {
        Self {
            frequency_ghz: 28.0,
            tx_position: [4.0, 0.0, 3.0],
            rx_position: [0.7, 4.0, 1.0],
            ris_center: [0.0, 0.0, 2.0],
            q_divisor,
            dz_over_lambda: default_dz_over_lambda(),
            dipole_length_over_lambda: default_length_over_lambda(),
            dipole_radius_over_lambda: default_radius_over_lambda(),
            n_rows: None,
            n_cols: None,
            integration_points: default_integration_points(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("frequency_ghz", self.frequency_ghz),
            ("q_divisor", self.q_divisor),
            ("dz_over_lambda", self.dz_over_lambda),
            ("dipole_length_over_lambda", self.dipole_length_over_lambda),
            ("dipole_radius_over_lambda", self.dipole_radius_over_lambda),
        ];
        for (name, v) in positives {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.integration_points < 64 {
            return Err(Error::InvalidConfig(format!(
                "integration_points must be >= 64, got {}",
                self.integration_points
            )));
        }
        if self.n_rows == Some(0) || self.n_cols == Some(0) {
            return Err(Error::InvalidConfig("n_rows/n_cols must be >= 1".into()));
        }
        Ok(())
    }
}

/// A built scene: one dipole list per port group.
#[derive(Clone, Debug)]
pub struct DipoleScene {
    pub frequency_hz: f64,
    pub wavelength: f64,
    pub tx: Vec<Dipole>,
    pub ris: Vec<Dipole>,
    pub rx: Vec<Dipole>,
    pub model: MutualImpedanceModel,
}

impl DipoleScene {
    pub fn partition(&self) -> PortPartition {
        PortPartition {
            n_t: self.tx.len(),
            n_s: self.ris.len(),
            n_r: self.rx.len(),
        }
    }

    fn all_dipoles(&self) -> impl Iterator<Item = &Dipole> {
        self.tx.iter().chain(self.ris.iter()).chain(self.rx.iter())
    }
}

/// Build the scene: single tx and rx dipoles plus a planar RIS grid in the
/// y-z plane centered on `ris_center`, rows spaced d_z and columns d_y.
pub fn build_scene(config: &SceneConfig) -> Result<DipoleScene> {
    config.validate()?;
    let f_hz = config.frequency_ghz * 1e9;
    let lambda = C0 / f_hz;
    let length = config.dipole_length_over_lambda * lambda;
    let radius = config.dipole_radius_over_lambda * lambda;

    let n_rows = config.n_rows.unwrap_or(3);
    let n_cols = config
        .n_cols
        .unwrap_or(((2.0 * config.q_divisor).round() as usize).max(1));
    let d_y = lambda / config.q_divisor;
    let d_z = config.dz_over_lambda * lambda;

    let tx = vec![Dipole::new(config.tx_position, length, radius)?];
    let rx = vec![Dipole::new(config.rx_position, length, radius)?];
    let mut ris = Vec::with_capacity(n_rows * n_cols);
    for iz in 0..n_rows {
        for iy in 0..n_cols {
            let c = config.ris_center;
            let center = [
                c[0],
                c[1] + (iy as f64 - (n_cols as f64 - 1.0) / 2.0) * d_y,
                c[2] + (iz as f64 - (n_rows as f64 - 1.0) / 2.0) * d_z,
            ];
            ris.push(Dipole::new(center, length, radius)?);
        }
    }

    let scene = DipoleScene {
        frequency_hz: f_hz,
        wavelength: lambda,
        tx,
        ris,
        rx,
        model: MutualImpedanceModel::new(config.integration_points)?,
    };

    let all: Vec<&Dipole> = scene.all_dipoles().collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if overlaps(all[i], all[j]) {
                return Err(Error::InvalidGeometry(format!(
                    "dipoles {i} and {j} overlap"
                )));
            }
        }
    }
    Ok(scene)
}

/// Assemble the full N×N impedance matrix in T/S/R port order. The upper
/// triangle is computed and mirrored, so the result is symmetric exactly.
pub fn assemble_z_matrix(
    scene: &DipoleScene,
    model: &MutualImpedanceModel,
) -> Result<FullNetworkMatrix> {
    let dipoles: Vec<&Dipole> = scene.all_dipoles().collect();
    let n = dipoles.len();
    let (nodes, weights) = gauss_legendre(model.points_per_side());
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = self_with_nodes(dipoles[i], scene.frequency_hz, &nodes, &weights);
        for jj in i + 1..n {
            let v = mutual_with_nodes(
                dipoles[i],
                dipoles[jj],
                scene.frequency_hz,
                &nodes,
                &weights,
            )
            .map_err(|e| match e {
                Error::OverlappingDipoles { .. } => Error::OverlappingDipoles { a: i, b: jj },
                other => other,
            })?;
            m[(i, jj)] = v;
            m[(jj, i)] = v;
        }
    }
    FullNetworkMatrix::new(MatrixKind::Impedance, m, Z0_DEFAULT)
}
