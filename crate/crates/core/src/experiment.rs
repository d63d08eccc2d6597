//! Experiment orchestration: build a scene, assemble its network matrices,
//! run one optimizer (or the brute-force oracle), and package the results
//! as a trace plus a machine-readable summary.

use crate::channel::{e2e_s, estimate_normalization, gain};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::netparams::{
    z_to_s, FullNetworkMatrix, ImpedanceBlocks, PortPartition, ScatteringBlocks,
};
use crate::optimizer::{
    brute_force_phases, sopt_run, zopt_run, OptimizerTrace, RisLoadState, StepSchedule,
    StoppingRule, TraceRecord,
};
use crate::scene::{assemble_z_matrix, build_scene, SceneConfig};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    SOpt,
    ZOpt,
    /// Exhaustive grid search over `levels` phases per element.
    Brute {
        levels: usize,
    },
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::SOpt => "s-opt",
            Algorithm::ZOpt => "z-opt",
            Algorithm::Brute { .. } => "brute",
        }
    }
}

/// Everything one run needs. Schedule fields override the per-algorithm
/// defaults when set. The seed is consumed only by randomized features
/// (multi-start); the standard runs are deterministic without it.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub scene: SceneConfig,
    pub algorithm: Algorithm,
    pub delta0: Option<f64>,
    pub decay: Option<f64>,
    pub min_delta: Option<f64>,
    pub stop: StoppingRule,
    pub seed: u64,
    /// Zero the tx-rx coupling before conversion, modeling a blocked
    /// direct path.
    pub remove_direct_link: bool,
}

impl ExperimentSpec {
    pub fn new(scene: SceneConfig, algorithm: Algorithm) -> Self {
        Self {
            scene,
            algorithm,
            delta0: None,
            decay: None,
            min_delta: None,
            stop: StoppingRule::default(),
            seed: 0,
            remove_direct_link: false,
        }
    }

    fn schedule(&self) -> StepSchedule {
        let mut s = match self.algorithm {
            Algorithm::ZOpt => StepSchedule::reactance_default(),
            _ => StepSchedule::phase_default(),
        };
        if let Some(d) = self.delta0 {
            s.delta0 = d;
        }
        if let Some(d) = self.decay {
            s.decay = d;
        }
        if let Some(d) = self.min_delta {
            s.min_delta = d;
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub algorithm: &'static str,
    pub final_gain: f64,
    pub final_gain_db: f64,
    pub iterations: usize,
    pub wall_time_seconds: f64,
    /// SHA-256 of the assembled impedance matrix (dims plus row-major
    /// little-endian entry bytes).
    pub scene_fingerprint: String,
    pub normalization_estimate: [f64; 2],
    pub final_phases: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: OptimizerTrace,
    pub summary: RunSummary,
    pub partition: PortPartition,
}

/// SHA-256 fingerprint of a network matrix: dimensions then row-major
/// (re, im) little-endian bytes.
pub fn scene_fingerprint(m: &FullNetworkMatrix) -> String {
    let e = m.entries();
    let mut hasher = Sha256::new();
    hasher.update((e.nrows() as u64).to_le_bytes());
    hasher.update((e.ncols() as u64).to_le_bytes());
    for i in 0..e.nrows() {
        for j in 0..e.ncols() {
            hasher.update(e[(i, j)].re.to_le_bytes());
            hasher.update(e[(i, j)].im.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Zero the tx-rx coupling blocks of an impedance matrix.
pub fn remove_direct_link(z: &FullNetworkMatrix, p: PortPartition) -> Result<FullNetworkMatrix> {
    let mut m = z.entries().clone();
    let (t, _, r) = p.ranges();
    let zero = Complex64::new(0.0, 0.0);
    for i in t.clone() {
        for j in r.clone() {
            m[(i, j)] = zero;
            m[(j, i)] = zero;
        }
    }
    FullNetworkMatrix::new(z.kind(), m, z.z0())
}

/// Assembled network matrices of a configured scene.
pub struct AssembledScene {
    pub partition: PortPartition,
    pub z: FullNetworkMatrix,
    pub s: FullNetworkMatrix,
    pub zb: ImpedanceBlocks,
    pub sb: ScatteringBlocks,
}

pub fn assemble(config: &SceneConfig, without_direct_link: bool) -> Result<AssembledScene> {
    let scene = build_scene(config)?;
    let p = scene.partition();
    let mut z = assemble_z_matrix(&scene, &scene.model)?;
    if without_direct_link {
        z = remove_direct_link(&z, p)?;
    }
    let s = z_to_s(&z, z.z0())?;
    let zb = ImpedanceBlocks::partition(&z, p)?;
    let sb = ScatteringBlocks::partition(&s, p)?;
    Ok(AssembledScene {
        partition: p,
        z,
        s,
        zb,
        sb,
    })
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutput> {
    let assembled = assemble(&spec.scene, spec.remove_direct_link)?;
    let n_s = assembled.partition.n_s;
    let schedule = spec.schedule();

    let trace = match spec.algorithm {
        Algorithm::SOpt => sopt_run(
            &assembled.sb,
            &RisLoadState::zero_phases(n_s),
            &schedule,
            &spec.stop,
        )?,
        Algorithm::ZOpt => zopt_run(
            &assembled.zb,
            &RisLoadState::short_circuit(n_s),
            &schedule,
            &spec.stop,
        )?,
        Algorithm::Brute { levels } => {
            let started = Instant::now();
            let initial = gain(&e2e_s(
                &assembled.sb,
                &CVector::from_element(n_s, Complex64::new(1.0, 0.0)),
            )?);
            let (gamma, best) = brute_force_phases(&assembled.sb, levels)?;
            let phases: Vec<f64> = gamma.iter().map(|g| g.arg()).collect();
            OptimizerTrace {
                initial_gain: initial,
                records: vec![TraceRecord {
                    iteration: 1,
                    gain: best,
                    delta: 0.0,
                    accepted: true,
                }],
                final_state: RisLoadState::from_phases(phases),
                final_gain: best,
                budget_exhausted: false,
                wall_time: started.elapsed(),
            }
        }
    };

    let normalization = estimate_normalization(&assembled.zb, assembled.z.z0())?;
    let summary = RunSummary {
        algorithm: spec.algorithm.id(),
        final_gain: trace.final_gain,
        final_gain_db: 10.0 * trace.final_gain.log10(),
        iterations: trace.iterations(),
        wall_time_seconds: trace.wall_time.as_secs_f64(),
        scene_fingerprint: scene_fingerprint(&assembled.z),
        normalization_estimate: [normalization.re, normalization.im],
        final_phases: trace.final_state.phases().to_vec(),
    };
    Ok(RunOutput {
        trace,
        summary,
        partition: assembled.partition,
    })
}

pub fn write_summary_json(path: &Path, summary: &RunSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::InvalidConfig(format!("summary serialization: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// One cell of the convergence-comparison grid.
pub struct GridCell {
    pub q_divisor: f64,
    pub output: RunOutput,
}

/// The full comparison grid: column spacings λ/4, λ/8, λ/16 for both
/// iterative algorithms on the reference scene with the direct link
/// removed. Cells appear in (q, algorithm) order.
pub fn convergence_grid(stop: &StoppingRule) -> Result<Vec<GridCell>> {
    let mut cells = Vec::with_capacity(6);
    for q in [4.0, 8.0, 16.0] {
        for algo in [Algorithm::SOpt, Algorithm::ZOpt] {
            let mut spec = ExperimentSpec::new(SceneConfig::reference(q), algo);
            spec.stop = *stop;
            spec.remove_direct_link = true;
            let output = run_experiment(&spec)?;
            cells.push(GridCell {
                q_divisor: q,
                output,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_scene() -> SceneConfig {
        // three RIS elements keep assembly and optimization fast
        let mut c = SceneConfig::reference(4.0);
        c.n_rows = Some(1);
        c.n_cols = Some(3);
        c
    }

    #[test]
    fn sopt_run_produces_consistent_summary() {
        let mut spec = ExperimentSpec::new(tiny_scene(), Algorithm::SOpt);
        spec.stop = StoppingRule {
            max_iters: 50,
            window: 0,
            rel_improvement: 0.0,
        };
        let out = run_experiment(&spec).unwrap();
        assert_eq!(out.summary.algorithm, "s-opt");
        assert_eq!(out.summary.iterations, 50);
        let last = out.trace.records.last().unwrap();
        assert_eq!(out.summary.final_gain, last.gain);
        assert_eq!(out.summary.final_phases.len(), 3);
        assert_eq!(out.summary.scene_fingerprint.len(), 64);
        assert_eq!(out.partition.n_s, 3);
    }

    #[test]
    fn reruns_are_identical_and_direct_link_matters() {
        let mut spec = ExperimentSpec::new(tiny_scene(), Algorithm::SOpt);
        spec.stop = StoppingRule {
            max_iters: 30,
            window: 0,
            rel_improvement: 0.0,
        };
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.summary.scene_fingerprint, b.summary.scene_fingerprint);
        assert_eq!(a.trace.records, b.trace.records);
        assert_eq!(a.trace.final_gain.to_bits(), b.trace.final_gain.to_bits());

        spec.remove_direct_link = true;
        let c = run_experiment(&spec).unwrap();
        assert_ne!(a.summary.scene_fingerprint, c.summary.scene_fingerprint);
        assert!(c.trace.initial_gain < a.trace.initial_gain);
    }

    #[test]
    fn brute_force_beats_initial_state() {
        let mut spec = ExperimentSpec::new(tiny_scene(), Algorithm::Brute { levels: 8 });
        spec.remove_direct_link = true;
        let out = run_experiment(&spec).unwrap();
        assert!(out.trace.final_gain >= out.trace.initial_gain);
        assert_eq!(out.summary.algorithm, "brute");
    }

    #[test]
    fn zopt_runs_on_scene() {
        let mut spec = ExperimentSpec::new(tiny_scene(), Algorithm::ZOpt);
        spec.stop = StoppingRule {
            max_iters: 40,
            window: 0,
            rel_improvement: 0.0,
        };
        spec.remove_direct_link = true;
        let out = run_experiment(&spec).unwrap();
        assert!(out.trace.final_gain >= out.trace.initial_gain);
        assert_eq!(out.summary.algorithm, "z-opt");
    }

    #[test]
    fn direct_link_removal_zeros_only_tr_blocks() {
        let assembled = assemble(&tiny_scene(), false).unwrap();
        let cut = remove_direct_link(&assembled.z, assembled.partition).unwrap();
        let p = assembled.partition;
        let n = p.total();
        let (t, _, r) = p.ranges();
        let orig = assembled.z.entries();
        let new = cut.entries();
        for i in 0..n {
            for j in 0..n {
                let in_cut =
                    (t.contains(&i) && r.contains(&j)) || (r.contains(&i) && t.contains(&j));
                if in_cut {
                    assert_eq!(new[(i, j)], Complex64::new(0.0, 0.0));
                } else {
                    assert_eq!(new[(i, j)], orig[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn fingerprint_tracks_content() {
        let assembled = assemble(&tiny_scene(), false).unwrap();
        let f1 = scene_fingerprint(&assembled.z);
        let f2 = scene_fingerprint(&assembled.z);
        assert_eq!(f1, f2);
        let cut = remove_direct_link(&assembled.z, assembled.partition).unwrap();
        assert_ne!(f1, scene_fingerprint(&cut));
    }
}
