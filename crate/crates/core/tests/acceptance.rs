//! Acceptance suite. Each test prints one pass/fail line for its criterion
//! and asserts it, so `cargo test --test acceptance` doubles as a report.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use risnet::channel::{
    e2e_s, e2e_z_matched, estimate_normalization, solve_network, structural_scattering, Termination,
};
use risnet::experiment::{assemble, remove_direct_link};
use risnet::linalg::{norm1, rel_asymmetry, CMatrix, CVector};
use risnet::netparams::{
    s_to_z, z_to_s, FullNetworkMatrix, ImpedanceBlocks, MatrixKind, PortPartition, ScatteringBlocks,
};
use risnet::optimizer::{
    brute_force_phases, finite_diff_gradient, first_order, sopt_multistart, sopt_run, zopt_run,
    RisLoadState, StepSchedule, StoppingRule,
};
use risnet::scene::{
    assemble_z_matrix, build_scene, Dipole, DipoleScene, MutualImpedanceModel, SceneConfig,
};
use risnet::{C0, Z0_DEFAULT};
use std::f64::consts::PI;
use std::time::Instant;

fn report(num: u32, desc: &str, pass: bool, detail: &str) {
    use std::io::Write;
    let verdict = if pass { "PASS" } else { "FAIL" };
    // write straight to stdout so the line shows even without --nocapture
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance criterion {num}: {verdict} - {desc} ({detail})");
    let _ = out.flush();
    assert!(pass, "criterion {num} failed: {detail}");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_complex(rng: &mut StdRng, scale: f64) -> Complex64 {
    c(
        scale * rng.gen_range(-1.0..1.0),
        scale * rng.gen_range(-1.0..1.0),
    )
}

/// Random matrix with spectral radius at most 0.9 (via the 2-norm bound
/// sqrt(norm1 * norminf)).
fn random_passive(n: usize, rng: &mut StdRng) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| random_complex(rng, 1.0));
    let bound = (norm1(&m) * norm1(&m.transpose())).sqrt();
    m * c(0.9 / bound, 0.0)
}

fn rel_fro(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    (num / den).sqrt()
}

#[test]
fn criterion_01_conversion_round_trip() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=30);
        let s = random_passive(n, &mut rng);
        let sm = FullNetworkMatrix::new(MatrixKind::Scattering, s.clone(), Z0_DEFAULT).unwrap();
        let z = s_to_z(&sm, Z0_DEFAULT).unwrap();
        let back = z_to_s(&z, Z0_DEFAULT).unwrap();
        worst = worst.max(rel_fro(back.entries(), &s));
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        1,
        "S->Z->S round-trip on 1000 passive matrices, sizes 2-30",
        worst <= 1e-10 && elapsed < 10.0,
        &format!("worst relative error {worst:.3e}, {elapsed:.2} s"),
    );
}

#[test]
fn criterion_02_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n_s = rng.gen_range(1..=20);
        let p = PortPartition::new(1, n_s, 1).unwrap();
        let n = p.total();
        let s = random_passive(n, &mut rng);
        let sm = FullNetworkMatrix::new(MatrixKind::Scattering, s, Z0_DEFAULT).unwrap();
        let blocks = ScatteringBlocks::partition(&sm, p).unwrap();
        // unit-modulus loads, with sub-unit magnitudes mixed in
        let gamma = CVector::from_fn(n_s, |_, _| {
            let mag = if k % 3 == 0 {
                rng.gen_range(0.0..1.0)
            } else {
                1.0
            };
            Complex64::from_polar(mag, rng.gen_range(-PI..PI))
        });
        let h = e2e_s(&blocks, &gamma).unwrap().scalar();
        let t = Termination::matched(p, CVector::from_element(1, c(1.0, 0.0)))
            .unwrap()
            .with_gamma_s(gamma)
            .unwrap();
        let sol = solve_network(&sm, &t).unwrap();
        let oracle = sol.b_r()[0];
        let rel = (h - oracle).norm() / oracle.norm();
        worst = worst.max(rel);
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        2,
        "e2e channel matches the power-wave network solver on 200 instances",
        worst <= 1e-10 && elapsed < 10.0,
        &format!("worst relative mismatch {worst:.3e}, {elapsed:.2} s"),
    );
}

/// Family with no feedback into the transmitter and fixed antenna
/// self-impedances, for which the two-representation ratio is an exact
/// constant.
fn unilateral_blocks(n_s: usize, rng: &mut StdRng) -> ImpedanceBlocks {
    let p = PortPartition::new(1, n_s, 1).unwrap();
    let ss = {
        let m = CMatrix::from_fn(n_s, n_s, |_, _| random_complex(rng, 8.0));
        (&m + m.transpose()) * c(0.5, 0.0) + CMatrix::identity(n_s, n_s) * c(60.0, -15.0)
    };
    ImpedanceBlocks {
        p,
        z0: Z0_DEFAULT,
        tt: CMatrix::from_element(1, 1, c(73.0, 40.0)),
        ts: CMatrix::zeros(1, n_s),
        tr: CMatrix::zeros(1, 1),
        st: CMatrix::from_fn(n_s, 1, |_, _| random_complex(rng, 2.0)),
        ss,
        sr: CMatrix::zeros(n_s, 1),
        rt: CMatrix::from_element(1, 1, random_complex(rng, 1.0)),
        rs: CMatrix::from_fn(1, n_s, |_, _| random_complex(rng, 2.0)),
        rr: CMatrix::from_element(1, 1, c(73.0, 40.0)),
    }
}

#[test]
fn criterion_03_representation_equivalence() {
    let mut rng = StdRng::seed_from_u64(303);
    let mut ratios = Vec::new();
    for _ in 0..10 {
        let n_s = rng.gen_range(2..=8);
        let zb = unilateral_blocks(n_s, &mut rng);
        let h_z = e2e_z_matched(&zb, Z0_DEFAULT).unwrap().scalar();
        let full_s = z_to_s(&zb.reassemble(), Z0_DEFAULT).unwrap();
        let sb = ScatteringBlocks::partition(&full_s, zb.p).unwrap();
        let h_s = e2e_s(&sb, &CVector::zeros(n_s)).unwrap().scalar();
        ratios.push(h_z / h_s);
    }
    let mean = ratios.iter().sum::<Complex64>() / c(ratios.len() as f64, 0.0);
    let spread = ratios
        .iter()
        .map(|r| (r - mean).norm())
        .fold(0.0f64, f64::max)
        / mean.norm();
    report(
        3,
        "Z-form/S-form channel ratio is a scene-independent constant",
        spread <= 1e-8,
        &format!("relative spread {spread:.3e} over 10 scenes"),
    );
}

#[test]
fn criterion_04_structural_scattering() {
    let started = Instant::now();
    let assembled = assemble(&SceneConfig::reference(4.0), false).unwrap();
    let p = assembled.partition;

    // physics: direct link blocked, matched RIS loads, signal still arrives
    let z_cut = remove_direct_link(&assembled.z, p).unwrap();
    let s_cut = z_to_s(&z_cut, Z0_DEFAULT).unwrap();
    let sb_cut = ScatteringBlocks::partition(&s_cut, p).unwrap();
    let h_blocked = e2e_s(&sb_cut, &CVector::zeros(p.n_s)).unwrap().scalar();

    // closed form: the specular term equals the Z-route with the direct
    // link removed and the load-side self-block forced to z0
    let zb_cut = ImpedanceBlocks::partition(&z_cut, p).unwrap();
    let closed = structural_scattering(&zb_cut, Z0_DEFAULT).unwrap();
    let mut zb_spec = zb_cut.clone();
    zb_spec.ss = CMatrix::identity(p.n_s, p.n_s) * c(Z0_DEFAULT, 0.0);
    let full_spec = zb_spec.reassemble();
    let s_spec = z_to_s(&full_spec, Z0_DEFAULT).unwrap();
    let sb_spec = ScatteringBlocks::partition(&s_spec, p).unwrap();
    let h_spec = e2e_s(&sb_spec, &CVector::zeros(p.n_s)).unwrap().scalar();
    let norm_const = estimate_normalization(&zb_spec, Z0_DEFAULT).unwrap();
    let predicted = norm_const * h_spec;
    let rel = (closed - predicted).norm() / predicted.norm();

    let elapsed = started.elapsed().as_secs_f64();
    report(
        4,
        "structural scattering: blocked direct link still carries signal; closed form matches the S-route",
        h_blocked.norm() > 0.0 && closed.norm() > 0.0 && rel <= 1e-8,
        &format!(
            "|H_blocked| = {:.3e}, closed-vs-S relative {rel:.3e}, {elapsed:.2} s",
            h_blocked.norm()
        ),
    );
}

fn random_siso_scene(n_s: usize, scale: f64, rng: &mut StdRng) -> ScatteringBlocks {
    let p = PortPartition::new(1, n_s, 1).unwrap();
    let ss = {
        let m = CMatrix::from_fn(n_s, n_s, |_, _| random_complex(rng, scale));
        (&m + m.transpose()) * c(0.5, 0.0)
    };
    ScatteringBlocks {
        p,
        z0: Z0_DEFAULT,
        tt: CMatrix::zeros(1, 1),
        ts: CMatrix::zeros(1, n_s),
        tr: CMatrix::zeros(1, 1),
        st: CMatrix::from_fn(n_s, 1, |_, _| random_complex(rng, 0.3)),
        ss,
        sr: CMatrix::zeros(n_s, 1),
        rt: CMatrix::from_element(1, 1, random_complex(rng, 0.1)),
        rs: CMatrix::from_fn(1, n_s, |_, _| random_complex(rng, 0.3)),
        rr: CMatrix::zeros(1, 1),
    }
}

#[test]
fn criterion_05_gradient_correctness() {
    let mut rng = StdRng::seed_from_u64(505);
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for _ in 0..50 {
        let n_s = rng.gen_range(2..=16);
        let blocks = random_siso_scene(n_s, 0.15, &mut rng);
        let state = RisLoadState::from_phases((0..n_s).map(|_| rng.gen_range(-PI..PI)).collect());
        let grad = first_order(&blocks, &state).unwrap().c();
        let fd = finite_diff_gradient(&blocks, &state, 1e-6).unwrap();
        for k in 0..n_s {
            let rel = (grad[k] - fd[k]).norm() / fd[k].norm();
            worst = worst.max(rel);
        }
        // truncation-dominated regime: halving h should shrink the
        // mismatch about 4x (second-order differences)
        let err = |h: f64| {
            let f = finite_diff_gradient(&blocks, &state, h).unwrap();
            (0..n_s).map(|k| (grad[k] - f[k]).norm()).sum::<f64>()
        };
        ratios.push(err(1e-3) / err(5e-4));
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = ratios[ratios.len() / 2];
    report(
        5,
        "sign-resolved per-element derivative matches central finite differences",
        worst <= 1e-6 && (3.0..=5.5).contains(&median),
        &format!("worst relative {worst:.3e}, median halving ratio {median:.2}"),
    );
}

/// Small physical scene: three coupled surface elements in a row plus far
/// transmitter and receiver dipoles, all geometry drawn from the rng.
fn mini_scene(rng: &mut StdRng) -> ScatteringBlocks {
    let f_hz = 28e9;
    let lambda = C0 / f_hz;
    let length = 0.46 * lambda;
    let radius = lambda / 500.0;
    let spacing = lambda * rng.gen_range(1.0 / 16.0..0.25);
    let mut ris = Vec::new();
    for k in 0..3 {
        ris.push(Dipole::new([0.0, k as f64 * spacing, 0.0], length, radius).unwrap());
    }
    let mut far = || {
        [
            lambda * rng.gen_range(20.0..60.0),
            lambda * rng.gen_range(-10.0..10.0),
            lambda * rng.gen_range(-10.0..10.0),
        ]
    };
    let mut tx_pos = far();
    let mut rx_pos = far();
    rx_pos[0] = -rx_pos[0];
    tx_pos[0] = tx_pos[0].max(20.0 * lambda);
    let scene = DipoleScene {
        frequency_hz: f_hz,
        wavelength: lambda,
        tx: vec![Dipole::new(tx_pos, length, radius).unwrap()],
        ris,
        rx: vec![Dipole::new(rx_pos, length, radius).unwrap()],
        model: MutualImpedanceModel::default(),
    };
    let z = assemble_z_matrix(&scene, &scene.model).unwrap();
    let s = z_to_s(&z, Z0_DEFAULT).unwrap();
    ScatteringBlocks::partition(&s, scene.partition()).unwrap()
}

#[test]
fn criterion_06_global_optimum_proximity() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(606);
    let schedule = StepSchedule {
        decay: 0.995,
        ..StepSchedule::phase_default()
    };
    let mut worst = f64::INFINITY;
    for k in 0u64..20 {
        let blocks = mini_scene(&mut rng);
        let (_, g_brute) = brute_force_phases(&blocks, 64).unwrap();
        let trace =
            sopt_multistart(&blocks, &schedule, &StoppingRule::default(), 3, 1000 + k).unwrap();
        let ratio = trace.final_gain / g_brute;
        worst = worst.min(ratio);
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        6,
        "iterative ascent reaches the 64-level brute-force optimum on coupled scenes",
        worst >= 0.99 && elapsed < 120.0,
        &format!("worst final/brute ratio {worst:.4} over 20 scenes, {elapsed:.1} s"),
    );
}

#[test]
fn criterion_07_uncoupled_closed_form_optimum() {
    let mut rng = StdRng::seed_from_u64(707);
    let schedule = StepSchedule {
        decay: 0.995,
        ..StepSchedule::phase_default()
    };
    let mut worst = f64::INFINITY;
    let mut details = Vec::new();
    for n_s in [4usize, 16, 64] {
        let mut blocks = random_siso_scene(n_s, 0.0, &mut rng);
        blocks.ss = CMatrix::zeros(n_s, n_s);
        let g_star = {
            let mut sum = blocks.rt[(0, 0)].norm();
            for k in 0..n_s {
                sum += (blocks.rs[(0, k)] * blocks.st[(k, 0)]).norm();
            }
            sum * sum
        };
        let trace = sopt_run(
            &blocks,
            &RisLoadState::zero_phases(n_s),
            &schedule,
            &StoppingRule::fixed_budget(2000),
        )
        .unwrap();
        let ratio = trace.final_gain / g_star;
        details.push(format!("n={n_s}: {ratio:.6}"));
        worst = worst.min(ratio);
    }
    report(
        7,
        "uncoupled scenes reach the alignment optimum within 2000 iterations",
        worst >= 0.999,
        &details.join(", "),
    );
}

#[test]
fn criterion_08_convergence_comparison() {
    let started = Instant::now();
    let budget = StoppingRule::fixed_budget(2000);
    let mut pass = true;
    let mut details = Vec::new();
    for q in [4.0, 8.0, 16.0] {
        let assembled = assemble(&SceneConfig::reference(q), true).unwrap();
        let n_s = assembled.partition.n_s;
        let s_trace = sopt_run(
            &assembled.sb,
            &RisLoadState::zero_phases(n_s),
            &StepSchedule::phase_default(),
            &budget,
        )
        .unwrap();
        let z_trace = zopt_run(
            &assembled.zb,
            &RisLoadState::short_circuit(n_s),
            &StepSchedule::reactance_default(),
            &budget,
        )
        .unwrap();
        // both runs race to the same level: 90% of the phase-domain
        // final gain, so "faster" is measured on a shared scale
        let target = 0.9 * s_trace.final_gain;
        let s90 = s_trace.iterations_to_level(target);
        let z90 = z_trace.iterations_to_level(target);
        let final_ok = s_trace.final_gain >= z_trace.final_gain;
        let speed_ok = match (s90, z90) {
            (Some(s), Some(z)) => s < z,
            (Some(_), None) => true,
            _ => false,
        };
        pass = pass && final_ok && speed_ok;
        let fmt = |v: Option<usize>| v.map_or("never".to_string(), |n| n.to_string());
        details.push(format!(
            "q={q}: final {:.3e} vs {:.3e}, target hit at {} vs {}",
            s_trace.final_gain,
            z_trace.final_gain,
            fmt(s90),
            fmt(z90)
        ));
    }
    let elapsed = started.elapsed().as_secs_f64();
    pass = pass && elapsed < 300.0;
    details.push(format!("{elapsed:.1} s"));
    report(
        8,
        "phase-domain ascent beats the reactance-domain baseline at equal budget",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_09_em_model_sanity() {
    let started = Instant::now();
    // symmetry of the assembled impedance matrix
    let scene = build_scene(&SceneConfig::reference(4.0)).unwrap();
    let z = assemble_z_matrix(&scene, &scene.model).unwrap();
    let asym = rel_asymmetry(z.entries());

    // half-wave self-impedance vs the frozen high-resolution quadrature
    // oracle value (adaptive integration, 1e-12 target accuracy)
    let lambda = scene.wavelength;
    let dipole = Dipole::new([0.0, 0.0, 0.0], 0.5 * lambda, lambda / 500.0).unwrap();
    let z_self = risnet::scene::self_impedance(&dipole, scene.frequency_hz, &scene.model);
    let oracle = c(73.076643239386, 41.762414147533);
    let self_rel = (z_self - oracle).norm() / oracle.norm();

    // quadrature refinement stability on the full scene
    let mut config_hi = SceneConfig::reference(4.0);
    config_hi.integration_points = 256;
    let scene_hi = build_scene(&config_hi).unwrap();
    let z_hi = assemble_z_matrix(&scene_hi, &scene_hi.model).unwrap();
    let mut worst_change = 0.0f64;
    for (a, b) in z.entries().iter().zip(z_hi.entries().iter()) {
        worst_change = worst_change.max((a - b).norm() / b.norm());
    }

    let elapsed = started.elapsed().as_secs_f64();
    report(
        9,
        "impedance assembly: symmetric, oracle-accurate self term, quadrature-converged",
        asym <= 1e-9 && self_rel <= 0.10 && worst_change <= 1e-3,
        &format!(
            "asymmetry {asym:.1e}, self-impedance off by {:.2}%, doubling quadrature moves entries {worst_change:.1e}, {elapsed:.2} s",
            100.0 * self_rel
        ),
    );
}

#[test]
fn criterion_10_run_determinism() {
    let bin = env!("CARGO_BIN_EXE_risnet");
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scene.toml");
    std::fs::write(
        &config_path,
        "frequency_ghz = 28.0\ntx_position = [4.0, 0.0, 3.0]\nrx_position = [0.7, 4.0, 1.0]\nris_center = [0.0, 0.0, 2.0]\nq_divisor = 4.0\nn_rows = 1\nn_cols = 4\n",
    )
    .unwrap();
    let run = |out: &str| {
        let out_dir = dir.path().join(out);
        let status = std::process::Command::new(bin)
            .args([
                "run",
                "--config",
                config_path.to_str().unwrap(),
                "--algo",
                "s-opt",
                "--max-iters",
                "60",
                "--seed",
                "7",
                "--no-direct-link",
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        assert!(status.status.success(), "run failed: {status:?}");
        std::fs::read(out_dir.join("trace_scene_s-opt.csv")).unwrap()
    };
    let first = run("a");
    let second = run("b");
    report(
        10,
        "identical seeds produce bitwise-identical trace files",
        first == second && !first.is_empty(),
        &format!("{} bytes each", first.len()),
    );
}
