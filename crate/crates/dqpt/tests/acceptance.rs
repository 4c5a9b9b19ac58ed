//! Acceptance suite: one test per acceptance criterion, each printing a
//! single summary line on success (visible with `--nocapture`).
//!
//! 1. keystone closed-form-vs-reference equivalence on random quenches
//! 2. triad equivalence on dense momentum grids
//! 3. TFI critical values (k*, t*_0, echo zero, entropy ln 2, flat OTOC)
//! 4. SSH critical values (same pattern)
//! 5. rate-function cusps and their sharpening with system size
//! 6. DQPT existence map against the equilibrium-crossing criterion
//! 7. structural invariants over random (spec, k, t) samples
//! 8. byte-level determinism of the CLI across thread counts

use std::f64::consts::{LN_2, PI};
use std::fs;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dqpt::criticality::{critical_condition, critical_times, find_critical_momenta};
use dqpt::diagnostics::{entropy, loschmidt_echo, otoc};
use dqpt::models::{mode_angles, Model, ModeGrid, SshParams, TfiParams};
use dqpt::oracle::{oracle_entropy, oracle_loschmidt, oracle_otoc};
use dqpt::quench::{ssh_mode_state, tfi_mode_state, QuenchSpec};
use dqpt::sweep::{detect_cusps, run_sweep, Outputs, SweepConfig};

fn tfi(h_pre: f64, h_post: f64) -> QuenchSpec<f64> {
    QuenchSpec::Tfi {
        pre: TfiParams::new(1.0, h_pre).unwrap(),
        post: TfiParams::new(1.0, h_post).unwrap(),
    }
}

fn ssh(t2_pre: f64, t2_post: f64) -> QuenchSpec<f64> {
    QuenchSpec::Ssh {
        pre: SshParams::new(1.0, t2_pre).unwrap(),
        post: SshParams::new(1.0, t2_post).unwrap(),
    }
}

/// sin^2 of the post-quench rotation-generator angle: the momentum-dependent
/// prefactor of the OTOC. Where it vanishes the butterfly operator commutes
/// with the post-quench Hamiltonian for kinematic reasons unrelated to
/// criticality.
fn otoc_kinematic_factor(k: f64, spec: &QuenchSpec<f64>) -> f64 {
    let angles = mode_angles(k, spec).unwrap();
    match spec.model() {
        Model::Tfi => (2.0 * angles.theta_post).sin().powi(2),
        Model::Ssh => angles.theta_post.sin().powi(2),
    }
}

/// Largest OTOC value over one full period sampled at 200 points.
fn otoc_sup_over_period(k: f64, spec: &QuenchSpec<f64>) -> f64 {
    let period = PI / mode_angles(k, spec).unwrap().energy_post;
    (0..200)
        .map(|j| otoc(k, spec, period * j as f64 / 199.0).unwrap())
        .fold(0.0_f64, f64::max)
}

/// Numerically locate the echo minimum on a unimodal bracket: golden-section
/// down to 1e-6, then one parabolic refinement on well-separated points so
/// the vertex is not limited by cancellation noise at the bottom.
fn argmin_echo(spec: &QuenchSpec<f64>, k: f64, mut lo: f64, mut hi: f64) -> f64 {
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| loschmidt_echo(k, spec, t).unwrap();
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-6 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let h = 1e-2;
    let (f1, f2, f3) = (f(mid - h), f(mid), f(mid + h));
    let denom = f1 - 2.0 * f2 + f3;
    assert!(denom > 0.0, "echo minimum is not locally convex");
    mid + h * (f1 - f3) / (2.0 * denom)
}

#[test]
fn criterion_1_keystone_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20260816);
    let mut devs = [[0.0_f64; 3]; 2];
    for (mi, model) in [Model::Tfi, Model::Ssh].into_iter().enumerate() {
        for _ in 0..5 {
            let spec = match model {
                Model::Tfi => tfi(rng.gen_range(0.1..2.5), rng.gen_range(0.1..2.5)),
                Model::Ssh => ssh(rng.gen_range(0.2..2.2), rng.gen_range(0.2..2.2)),
            };
            // 40 momenta x 40 times covering t in [0, 10].
            let n_cells = match model {
                Model::Tfi => 80,
                Model::Ssh => 40,
            };
            let grid = ModeGrid::new(model, n_cells).unwrap();
            assert_eq!(grid.momenta().len(), 40);
            for &k in grid.momenta() {
                for j in 0..40 {
                    let t = 10.0 * j as f64 / 39.0;
                    let closed = [
                        entropy(k, &spec).unwrap(),
                        loschmidt_echo(k, &spec, t).unwrap(),
                        otoc(k, &spec, t).unwrap(),
                    ];
                    let reference = [
                        oracle_entropy(k, &spec, t).unwrap(),
                        oracle_loschmidt(k, &spec, t).unwrap(),
                        oracle_otoc(k, &spec, t).unwrap(),
                    ];
                    for d in 0..3 {
                        devs[mi][d] = devs[mi][d].max((closed[d] - reference[d]).abs());
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    for (mi, name) in ["tfi", "ssh"].iter().enumerate() {
        for (d, diag) in ["entropy", "echo", "otoc"].iter().enumerate() {
            assert!(
                devs[mi][d] < 1e-10,
                "{name} {diag}: max |closed - reference| = {:.3e}",
                devs[mi][d]
            );
        }
    }
    assert!(elapsed < 10.0, "keystone run took {elapsed:.1} s");
    println!(
        "[PASS] criterion 1: keystone equivalence on 5 random quenches per model, 40x40 grids — \
         max deviations (entropy/echo/otoc) tfi {:.1e}/{:.1e}/{:.1e}, ssh {:.1e}/{:.1e}/{:.1e}, {elapsed:.1} s",
        devs[0][0], devs[0][1], devs[0][2], devs[1][0], devs[1][1], devs[1][2]
    );
}

#[test]
fn criterion_2_triad_equivalence_on_dense_grids() {
    let mut summary = String::new();
    for (name, spec) in [("tfi", tfi(0.5, 1.5)), ("ssh", ssh(0.5, 2.0))] {
        let model = spec.model();
        let grid = ModeGrid::new(model, 2000).unwrap();
        let mut kinematic_zeros = 0_usize;
        let mut checked = 0_usize;
        for &k in grid.momenta() {
            // Modes whose OTOC prefactor vanishes kinematically say nothing
            // about criticality; they are tallied and must match the known
            // count exactly (k = 0 and k = -pi on the SSH grid, none on the
            // TFI grid).
            if otoc_kinematic_factor(k, &spec) < 1e-12 {
                kinematic_zeros += 1;
                continue;
            }
            let p_condition = critical_condition(k, &spec).unwrap().abs() < 1e-10;
            let p_entropy = (entropy(k, &spec).unwrap() - LN_2).abs() < 1e-10;
            let p_otoc = otoc_sup_over_period(k, &spec) < 1e-10;
            assert_eq!(
                p_condition, p_entropy,
                "{name}: condition/entropy disagree at k = {k}"
            );
            assert_eq!(
                p_entropy, p_otoc,
                "{name}: entropy/OTOC disagree at k = {k}"
            );
            checked += 1;
        }
        let expected_zeros = match model {
            Model::Tfi => 0,
            Model::Ssh => 2,
        };
        assert_eq!(kinematic_zeros, expected_zeros, "{name} kinematic zeros");

        // The equivalence must also hold in the affirmative: at the located
        // critical momentum all three predicates are simultaneously true.
        let roots = find_critical_momenta(&spec, &grid).unwrap();
        assert_eq!(roots.len(), 1, "{name}: one critical momentum");
        let k_star = roots[0];
        assert!(critical_condition(k_star, &spec).unwrap().abs() < 1e-10);
        assert!((entropy(k_star, &spec).unwrap() - LN_2).abs() < 1e-10);
        assert!(otoc_sup_over_period(k_star, &spec) < 1e-10);
        summary.push_str(&format!(
            "{name} {checked} modes + k* (excl. {kinematic_zeros} kinematic OTOC zeros); "
        ));
    }
    println!("[PASS] criterion 2: triad equivalence, zero disagreements — {summary}");
}

#[test]
fn criterion_3_tfi_critical_values() {
    let spec = tfi(0.5, 1.5);
    let grid = ModeGrid::new(Model::Tfi, 2000).unwrap();
    let roots = find_critical_momenta(&spec, &grid).unwrap();
    assert_eq!(roots.len(), 1);
    let k_star = roots[0];
    let k_exact = (-0.875_f64).acos();
    assert!(
        (k_star - k_exact).abs() < 1e-10,
        "k* = {k_star}, expected {k_exact}"
    );

    let t0 = critical_times(k_star, &spec, 0).unwrap()[0];
    // Independent oracle: locate the first echo minimum numerically.
    let t0_numeric = argmin_echo(&spec, k_star, 0.5, 3.5);
    assert!(
        (t0 - t0_numeric).abs() < 1e-9,
        "t*_0 = {t0}, numeric echo minimum at {t0_numeric}"
    );
    assert!((t0 - 1.986918).abs() < 1e-6, "t*_0 = {t0}");

    let echo = loschmidt_echo(k_star, &spec, t0).unwrap();
    assert!(echo < 1e-18, "echo at (k*, t*_0) = {echo:.3e}");

    let s_dev = (entropy(k_star, &spec).unwrap() - LN_2).abs();
    assert!(s_dev < 1e-10, "|S - ln 2| = {s_dev:.3e}");

    let max_otoc = (0..4000)
        .map(|j| otoc(k_star, &spec, 20.0 * j as f64 / 3999.0).unwrap())
        .fold(0.0_f64, f64::max);
    assert!(max_otoc < 1e-10, "max OTOC = {max_otoc:.3e}");

    println!(
        "[PASS] criterion 3: TFI critical values — |k* - arccos(-0.875)| = {:.1e}, \
         |t*_0 - echo argmin| = {:.1e} (t*_0 = {t0:.6}), echo = {echo:.1e}, \
         |S - ln 2| = {s_dev:.1e}, max OTOC on [0,20] = {max_otoc:.1e}",
        (k_star - k_exact).abs(),
        (t0 - t0_numeric).abs()
    );
}

#[test]
fn criterion_4_ssh_critical_values() {
    let spec = ssh(0.5, 2.0);
    let grid = ModeGrid::new(Model::Ssh, 2000).unwrap();
    let roots = find_critical_momenta(&spec, &grid).unwrap();
    assert_eq!(roots.len(), 1);
    let k_star = roots[0];
    let k_exact = (-0.8_f64).acos();
    assert!(
        (k_star - k_exact).abs() < 1e-10,
        "k* = {k_star}, expected {k_exact}"
    );

    // First return time. The post-quench energy at k* is sqrt(1.8), and the
    // first zero of the echo 1 - sin^2(dth) sin^2(E t) sits at E t = pi/2,
    // i.e. t*_0 = pi / (2 sqrt(1.8)) ~ 1.170802. (A published table lists
    // pi / sqrt(1.8) ~ 2.341605 for this quench; that instant is a full
    // revival — the echo returns to ~1 there — so the echo-vanishing
    // requirement of this criterion itself pins the halved value, which is
    // what the numeric minimization below confirms.)
    let t0 = critical_times(k_star, &spec, 0).unwrap()[0];
    let t0_exact = PI / (2.0 * 1.8_f64.sqrt());
    assert!((t0 - t0_exact).abs() < 1e-9, "t*_0 = {t0}");
    let t0_numeric = argmin_echo(&spec, k_star, 0.5, 2.0);
    assert!(
        (t0 - t0_numeric).abs() < 1e-9,
        "t*_0 = {t0}, numeric echo minimum at {t0_numeric}"
    );

    let echo = loschmidt_echo(k_star, &spec, t0).unwrap();
    assert!(echo < 1e-18, "echo at (k*, t*_0) = {echo:.3e}");
    let echo_at_doubled = loschmidt_echo(k_star, &spec, 2.0 * t0).unwrap();
    assert!(
        echo_at_doubled > 0.99,
        "echo at 2 t*_0 = {echo_at_doubled} (expected a revival)"
    );

    let s_dev = (entropy(k_star, &spec).unwrap() - LN_2).abs();
    assert!(s_dev < 1e-10, "|S - ln 2| = {s_dev:.3e}");

    let max_otoc = (0..4000)
        .map(|j| otoc(k_star, &spec, 20.0 * j as f64 / 3999.0).unwrap())
        .fold(0.0_f64, f64::max);
    assert!(max_otoc < 1e-10, "max OTOC = {max_otoc:.3e}");

    println!(
        "[PASS] criterion 4: SSH critical values — |k* - arccos(-0.8)| = {:.1e}, \
         t*_0 = {t0:.6} = pi/(2 sqrt(1.8)) (echo argmin dev {:.1e}; the doubled time \
         pi/sqrt(1.8) is a revival, echo {echo_at_doubled:.3}), echo = {echo:.1e}, \
         |S - ln 2| = {s_dev:.1e}, max OTOC on [0,20] = {max_otoc:.1e}",
        (k_star - k_exact).abs(),
        (t0 - t0_numeric).abs()
    );
}

/// Envelope-floor sharpness of the echo landscape on a momentum grid: the
/// closest approach of any grid mode to the critical manifold, expressed as
/// N / (2 ln(1/c_N)) so that larger = sharper cusps.
fn grid_sharpness(spec: &QuenchSpec<f64>, grid: &ModeGrid<f64>) -> f64 {
    let floor = grid
        .momenta()
        .iter()
        .filter_map(|&k| critical_condition(k, spec).ok())
        .map(f64::abs)
        .fold(f64::INFINITY, f64::min);
    let c = floor.max(1e-300);
    grid.n_cells() as f64 / (2.0 * (1.0 / c).ln())
}

#[test]
fn criterion_5_cusps_and_sharpness() {
    let dt = 0.002;
    let mut summary = String::new();
    for (name, spec) in [("tfi", tfi(0.5, 1.5)), ("ssh", ssh(0.5, 2.0))] {
        // Detection at the stated size N = 2000, dt = 0.002, t in [0, 10].
        let cfg = SweepConfig {
            spec,
            n_cells: 2000,
            t_min: 0.0,
            t_max: 10.0,
            n_time: 5001,
            outputs: Outputs {
                rate: true,
                ..Outputs::default()
            },
            n_max_critical_times: 3,
        };
        let result = run_sweep(&cfg).unwrap();
        let grid = ModeGrid::new(spec.model(), 2000).unwrap();
        let report = detect_cusps(&result.rate, &grid).unwrap();

        let k_star = find_critical_momenta(&spec, &grid).unwrap()[0];
        let exact: Vec<f64> = critical_times(k_star, &spec, 8)
            .unwrap()
            .into_iter()
            .filter(|&t| t <= 10.0)
            .collect();
        assert_eq!(
            report.times.len(),
            exact.len(),
            "{name}: expected cusps at {exact:?}, detected {:?}",
            report.times
        );
        let mut worst = 0.0_f64;
        for (detected, analytic) in report.times.iter().zip(&exact) {
            let dev = (detected - analytic).abs();
            assert!(
                dev <= 2.0 * dt,
                "{name}: cusp {detected} vs analytic {analytic} (dev {dev:.2e})"
            );
            worst = worst.max(dev);
        }

        // Sharpness must grow strictly with the momentum-grid size.
        let s: Vec<f64> = [500_usize, 1000, 2000]
            .iter()
            .map(|&n| grid_sharpness(&spec, &ModeGrid::new(spec.model(), n).unwrap()))
            .collect();
        assert!(
            s[0] < s[1] && s[1] < s[2],
            "{name}: sharpness not strictly increasing: {s:?}"
        );
        summary.push_str(&format!(
            "{name} {} cusps, worst dev {worst:.4} <= {:.3}, sharpness {:.0}/{:.0}/{:.0}; ",
            exact.len(),
            2.0 * dt,
            s[0],
            s[1],
            s[2]
        ));
    }
    println!("[PASS] criterion 5: rate-function cusps — {summary}");
}

#[test]
fn criterion_6_dqpt_existence_map() {
    let grid_tfi = ModeGrid::new(Model::Tfi, 400).unwrap();
    let grid_ssh = ModeGrid::new(Model::Ssh, 400).unwrap();
    let value = |i: usize| 0.2 + 1.6 * i as f64 / 19.0;
    let mut with_dqpt = 0_usize;
    let mut without = 0_usize;
    for i in 0..20 {
        for j in 0..20 {
            let (a, b) = (value(i), value(j));

            let spec = tfi(a, b);
            let predicted = (a - 1.0) * (b - 1.0) < 0.0;
            let found = !find_critical_momenta(&spec, &grid_tfi).unwrap().is_empty();
            assert_eq!(found, predicted, "tfi misclassified at h ({a}, {b})");
            if found {
                with_dqpt += 1;
            } else {
                without += 1;
            }

            let spec = ssh(a, b);
            let predicted = (1.0 - a) * (1.0 - b) < 0.0;
            let found = !find_critical_momenta(&spec, &grid_ssh).unwrap().is_empty();
            assert_eq!(found, predicted, "ssh misclassified at t2 ({a}, {b})");
            if found {
                with_dqpt += 1;
            } else {
                without += 1;
            }
        }
    }
    println!(
        "[PASS] criterion 6: existence map — 800 quenches on a 20x20 parameter scan per model, \
         {with_dqpt} with DQPT, {without} without, zero misclassifications"
    );
}

#[test]
fn criterion_7_structural_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(7_202_608);
    let samples_per_model = 1200_usize;
    for model in [Model::Tfi, Model::Ssh] {
        for _ in 0..samples_per_model {
            let spec = match model {
                Model::Tfi => tfi(rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0)),
                Model::Ssh => ssh(rng.gen_range(0.1..2.5), rng.gen_range(0.1..2.5)),
            };
            let k = match model {
                Model::Tfi => rng.gen_range(1e-3..PI - 1e-3),
                Model::Ssh => rng.gen_range(-PI + 1e-6..PI),
            };
            let t = rng.gen_range(0.0..12.0);
            let angles = mode_angles(k, &spec).unwrap();

            // Normalization of the evolved mode state.
            let state = match model {
                Model::Tfi => tfi_mode_state(k, &spec, t).unwrap(),
                Model::Ssh => ssh_mode_state(k, &spec, t).unwrap(),
            };
            let norm = state.amp0.norm_sqr() + state.amp1.norm_sqr();
            assert!((norm - 1.0).abs() < 1e-12, "norm = {norm} at k = {k}");

            // Entropy range [0, ln 2].
            let s = entropy(k, &spec).unwrap();
            assert!((-1e-15..=LN_2 + 1e-12).contains(&s), "S = {s}");

            // Echo range [0, 1].
            let echo = loschmidt_echo(k, &spec, t).unwrap();
            assert!((0.0..=1.0).contains(&echo), "echo = {echo}");

            // OTOC non-negative and periodic with pi / energy_post.
            let c = otoc(k, &spec, t).unwrap();
            assert!(c >= 0.0, "OTOC = {c}");
            let c_shifted = otoc(k, &spec, t + PI / angles.energy_post).unwrap();
            assert!(
                (c - c_shifted).abs() < 1e-10,
                "OTOC not periodic at k = {k}: {c} vs {c_shifted}"
            );

            // Post-quench eigenmode occupations do not depend on time.
            let t_other = rng.gen_range(0.0..12.0);
            let other = match model {
                Model::Tfi => tfi_mode_state(k, &spec, t_other).unwrap(),
                Model::Ssh => ssh_mode_state(k, &spec, t_other).unwrap(),
            };
            assert!((state.amp0.norm() - other.amp0.norm()).abs() < 1e-12);
            assert!((state.amp1.norm() - other.amp1.norm()).abs() < 1e-12);
        }
    }
    println!(
        "[PASS] criterion 7: structural invariants — {} random (spec, k, t) samples per model: \
         normalization, entropy/echo ranges, OTOC sign and period, occupation constancy",
        samples_per_model
    );
}

#[test]
fn criterion_8_cli_determinism_across_threads() {
    let configs = [
        concat!(env!("CARGO_MANIFEST_DIR"), "/configs/tfi_fig1.conf"),
        concat!(env!("CARGO_MANIFEST_DIR"), "/configs/ssh_fig1.conf"),
    ];
    for config in configs {
        let dir = tempfile::tempdir().unwrap();
        let out_1 = dir.path().join("one");
        let out_8 = dir.path().join("eight");
        for (out, threads) in [(&out_1, "1"), (&out_8, "8")] {
            let status = Command::new(env!("CARGO_BIN_EXE_dqpt"))
                .args(["sweep", "--config", config, "--out"])
                .arg(out)
                .args(["--threads", threads])
                .status()
                .expect("run dqpt sweep");
            assert!(status.success(), "{config} with --threads {threads}");
        }
        for name in ["samples.csv", "rate.csv"] {
            assert_eq!(
                fs::read(out_1.join(name)).unwrap(),
                fs::read(out_8.join(name)).unwrap(),
                "{name} differs between --threads 1 and 8 for {config}"
            );
        }
    }
    println!(
        "[PASS] criterion 8: determinism — both shipped sweep configs produce byte-identical \
         CSVs at --threads 1 and --threads 8"
    );
}
