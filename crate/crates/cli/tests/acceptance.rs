//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ssgd_cli::checks::{self, Lemma2Options, SurveyOptions, VarianceOptions};
use ssgd_cli::experiment::{build_generators, run_sweep_with, Model};
use ssgd_cli::output::comparison_table;
use ssgd_cli::{prepare_metastable_tfim, run_basis_sweep, run_comparison, ExperimentConfig, Label, ModelConfig, SweepMode};
use ssgd_core::random::{random_density, random_hermitian, stream};
use ssgd_core::ssgd::hessian_matrix;
use ssgd_core::verification::oracle::{fd_gradient, fd_hessian};
use ssgd_core::{
    attach_ancilla, build_standard, ground_state, system_direction, Boundary, DenseOperator, DensityMatrix, GeneratorSet,
    Optimizer, PauliString, RegisterLayout, SsgdConfig, TfimParams,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&configs().join(name)).expect("shipped config")
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

/// Random subset (never empty) of the 2-local system words on `n` sites.
fn random_instance(n: usize, seed: u64, i: u64) -> (DenseOperator, DensityMatrix, GeneratorSet, Vec<PauliString>) {
    let mut r = stream(seed, i);
    let h = random_hermitian(n, &mut r).extend_with_ancilla(1).unwrap();
    let rho = attach_ancilla(&random_density(n, &mut r), 1).unwrap();
    let gens = build_standard(2, RegisterLayout::new(n, 1).unwrap(), Boundary::Open).unwrap();
    let mut subset: Vec<PauliString> = gens
        .system()
        .iter()
        .filter(|_| rand::Rng::random_bool(&mut r, 0.5))
        .cloned()
        .collect();
    if subset.is_empty() {
        subset.push(gens.system()[0].clone());
    }
    (h, rho, gens, subset)
}

fn gradient_oracle() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let (h, rho, _, words) = random_instance(2 + (i % 2) as usize, 101, i);
        let (_, clean) = system_direction(&h, &rho, &words, 0.0, &mut stream(0, 0)).unwrap();
        let fd = fd_gradient(h.matrix(), rho.matrix(), &words, 1e-5);
        for (g, d) in clean.iter().zip(&fd) {
            // g_S is the descent direction, -dE/dθ
            worst = worst.max((g + d).abs());
        }
    }
    let el = t.elapsed();
    outcome(
        worst <= 1e-7 && within(el, 30),
        format!("max |g + dE/dθ| = {worst:.2e} over 50 instances, {:.1}s", el.as_secs_f64()),
    )
}

fn hessian_oracle() -> Outcome {
    let t = Instant::now();
    let (mut worst, mut asym): (f64, f64) = (0.0, 0.0);
    for i in 0..50u64 {
        let (h, rho, gens, subset) = random_instance(2 + (i % 2) as usize, 102, i);
        let words: Vec<PauliString> = gens.ancilla().iter().chain(&subset).cloned().collect();
        let k = hessian_matrix(&h, &rho, &words).unwrap();
        let fd = fd_hessian(h.matrix(), rho.matrix(), &words, 1e-4);
        for a in 0..words.len() {
            for b in 0..words.len() {
                worst = worst.max((k[(a, b)] - fd[a][b]).abs());
                asym = asym.max((k[(a, b)] - k[(b, a)]).abs());
            }
        }
    }
    let el = t.elapsed();
    outcome(
        worst <= 1e-5 && asym <= 1e-12 && within(el, 60),
        format!("max |K - K_fd| = {worst:.2e}, max asymmetry {asym:.1e}, {:.1}s", el.as_secs_f64()),
    )
}

fn lemma2_identity() -> Outcome {
    let t = Instant::now();
    let rep = checks::lemma2(&Lemma2Options::default()).unwrap();
    let el = t.elapsed();
    let field = |key: &str| -> f64 {
        rep.body
            .lines()
            .find_map(|l| l.strip_prefix(key)?.strip_prefix('\t')?.parse().ok())
            .unwrap_or(f64::NAN)
    };
    outcome(
        rep.passed && within(el, 60),
        format!(
            "max |dE/dt - quadratic form| = {:.1e}, max block error {:.1e}, {:.1}s",
            field("max_abs_error"),
            field("max_block_error"),
            el.as_secs_f64()
        ),
    )
}

fn fixed_point() -> Outcome {
    let p = TfimParams::new(6, 1.0, 0.25, 0.25);
    let h = ssgd_core::build_tfim(&p).unwrap();
    let (e0, psi) = ground_state(&h);
    let gens = build_standard(2, RegisterLayout::new(6, 1).unwrap(), Boundary::Open).unwrap();
    let cfg = SsgdConfig::default().noiseless();
    let window = cfg.convergence_window;
    let tr = Optimizer::new(&h, &gens, cfg)
        .run(&DensityMatrix::pure(&psi, *h.layout()).unwrap())
        .unwrap();
    let last = tr.records.last().unwrap().iter;
    let err = (tr.final_energy() - e0).abs();
    outcome(
        tr.converged && last <= window && err <= 1e-8,
        format!("stopped after iteration {last} (window {window}), |E - E0| = {err:.1e}"),
    )
}

struct ClusterStats {
    n: usize,
    mean: f64,
    sd: f64,
}

fn cluster(values: &[f64]) -> ClusterStats {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n.max(1) as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    ClusterStats { n, mean, sd }
}

fn fig2_pipeline() -> Outcome {
    let t = Instant::now();
    let base = load("tfim_sweep.toml");
    let mut ok = true;
    let mut parts = Vec::new();
    for hx in [0.0, 0.25, 0.5] {
        let mut cfg = base.clone();
        let ModelConfig::Tfim(p) = cfg.model else { unreachable!() };
        cfg.model = ModelConfig::Tfim(TfimParams { h_x: hx, ..p });
        cfg.sweep.mode = SweepMode::AllBasisStates;
        let r = run_basis_sweep(&cfg).unwrap();
        let pick = |l: Label| -> Vec<f64> {
            r.entries.iter().filter(|e| e.label == l).map(|e| e.final_energy).collect()
        };
        let (g, m) = (cluster(&pick(Label::Ground)), cluster(&pick(Label::Metastable)));
        let labelled = (g.n + m.n) as f64 / r.entries.len() as f64;
        let spread = g.sd.max(m.sd);
        let sep = (g.mean - m.mean).abs();
        let pass = labelled >= 0.9 && g.n > 0 && m.n > 0 && sep > 5.0 * spread;
        ok &= pass;
        parts.push(format!(
            "h_x={hx}: {}/{} labelled, ground {:.3}±{:.3} (n={}), metastable {:.3}±{:.3} (n={}), sep/sd={:.1} ref={:.3}",
            g.n + m.n,
            r.entries.len(),
            g.mean,
            g.sd,
            g.n,
            m.mean,
            m.sd,
            m.n,
            sep / spread,
            r.references.metastable.unwrap_or(f64::NAN)
        ));
    }
    let el = t.elapsed();
    ok &= within(el, 30 * 60);
    parts.push(format!("{:.0}s", el.as_secs_f64()));
    outcome(ok, parts.join("; "))
}

fn quench_consistency() -> Outcome {
    let p = TfimParams::new(6, 1.0, 0.0, 0.25);
    let mut cfg = load("tfim_sweep.toml");
    cfg.model = ModelConfig::Tfim(p);
    let gens = build_generators(&cfg).unwrap();
    let q = prepare_metastable_tfim(&p, &gens, &SsgdConfig { max_iters: cfg.quench.max_iters, ..cfg.ssgd.clone() }).unwrap();
    let expected = -p.j * 5.0 - p.h_z * 6.0;
    let up = DensityMatrix::from_bitstring("000000").unwrap();
    let dist = ssgd_core::linalg::max_abs(&(q.state.matrix() - up.matrix()));
    let err = (q.energy - expected).abs();
    outcome(
        dist <= 1e-12 && err <= 1e-9,
        format!("max |ρ - |000000><000000|| = {dist:.1e}, E = {} (expected {expected})", q.energy),
    )
}

fn rydberg_classification() -> Outcome {
    let t = Instant::now();
    let mut cfg = load("rydberg_ring.toml");
    cfg.sweep.mode = SweepMode::ListedStates;
    cfg.sweep.states = vec!["010101".into(), "101010".into()];
    let model = Model::build(&cfg.model).unwrap();
    let gens = build_generators(&cfg).unwrap();
    let refs = ssgd_cli::experiment::references(&cfg, &model, &gens).unwrap();
    let r = run_sweep_with(&cfg, &model, &gens, refs, &cfg.sweep.states).unwrap();
    let anti = &r.entries[0];
    let neel = &r.entries[1];
    let e0 = model.ground_energy;
    let rel = (neel.final_energy - e0).abs() / e0.abs();
    let el = t.elapsed();
    let pass = anti.final_neel > 0.5
        && anti.final_energy > e0
        && neel.final_neel < -0.5
        && rel <= 0.05
        && within(el, 600);
    outcome(
        pass,
        format!(
            "010101 -> N_e={:.3}, E={:.3}; 101010 -> N_e={:.3}, rel err {:.4}; E0={e0:.3}, {:.0}s",
            anti.final_neel,
            anti.final_energy,
            neel.final_neel,
            rel,
            el.as_secs_f64()
        ),
    )
}

fn ablation_pipeline() -> Outcome {
    let tfim = load("tfim_compare.toml");
    let ryd = load("rydberg_ring.toml");
    let mut ok = true;
    let mut parts = Vec::new();
    for (cfg, initial) in [(&tfim, "000111"), (&tfim, "111001"), (&ryd, "010111"), (&ryd, "011100")] {
        let a = run_comparison(cfg, initial).unwrap();
        let b = run_comparison(cfg, initial).unwrap();
        let rows = a.aligned();
        let contiguous = |recs: &[ssgd_core::TrajectoryRecord]| recs.iter().enumerate().all(|(i, r)| r.iter == i);
        let complete = !rows.is_empty()
            && rows.iter().all(|(_, x, y)| x.is_some() || y.is_some())
            && rows[0].1 == rows[0].2
            && contiguous(&a.with_ancilla)
            && contiguous(&a.unitary_only)
            && a.with_ancilla.iter().chain(&a.unitary_only).all(|r| r.energy.is_finite());
        let same = comparison_table(&a) == comparison_table(&b);
        ok &= complete && same;
        parts.push(format!("{initial}: {} rows, complete={complete}, deterministic={same}", rows.len()));
    }
    outcome(ok, parts.join("; "))
}

fn barren_plateau_bound() -> Outcome {
    let t = Instant::now();
    let (rep, est) = checks::bp_variance(&VarianceOptions::default()).unwrap();
    let el = t.elapsed();
    let mut parts: Vec<String> = est
        .iter()
        .zip([4, 6])
        .map(|(e, n)| format!("n={n}: var={:.4}±{:.4} bound={:.2e}", e.variance, e.std_error, e.bound))
        .collect();
    if est.len() == 2 {
        parts.push(format!("ratio={:.3}", est[1].variance / est[0].variance));
    }
    parts.push(format!("{:.0}s", el.as_secs_f64()));
    outcome(rep.passed && within(el, 20 * 60), parts.join(", "))
}

fn haar_survey() -> Outcome {
    let rep = checks::haar_survey(&SurveyOptions::default()).unwrap();
    let medians: Vec<String> = rep
        .body
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            format!("n={}: {:.4}", c[0], c[2].parse::<f64>().unwrap())
        })
        .collect();
    outcome(rep.passed, format!("median max-gradient {}", medians.join(", ")))
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.clone(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let cfg_path = root.path().join("small.toml");
    fs::write(
        &cfg_path,
        "[model]\nkind = \"tfim\"\nn_sites = 4\nj = 1.0\nh_x = 0.25\nh_z = 0.25\n\
         [ssgd]\nmax_iters = 20\nseed = 17\n[sweep]\nablation = \"both\"\n",
    )
    .unwrap();
    let out = root.path().join("out");
    let cfg = cfg_path.to_str().unwrap();
    let o = out.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["sweep", "--config", cfg],
        vec!["run", "--config", cfg, "--initial", "0110", "--ablation", "both"],
        vec!["quench", "--config", cfg],
        vec!["compare", "--config", cfg, "--initial", "0011"],
        vec!["check-lemma2", "--draws", "10", "--seed", "3", "--out", o],
        vec!["haar-survey", "--n-min", "3", "--n-max", "5", "--samples", "20", "--out", o],
        vec!["bp-variance", "--sizes", "2,4", "--samples", "40", "--out", o],
    ];
    let mut failures = Vec::new();
    for args in &commands {
        let mut runs = Vec::new();
        for _ in 0..2 {
            let _ = fs::remove_dir_all(&out);
            let res = Command::new(env!("CARGO_BIN_EXE_ssgd"))
                .args(args)
                .env("SSGD_OUTPUT_DIR", &out)
                .output()
                .unwrap();
            runs.push((res.status.code(), res.stdout, snapshot(&out)));
        }
        // exit code 1 is a check verdict, 2 a usage or I/O error
        let same = runs[0] == runs[1] && !runs[0].2.is_empty() && matches!(runs[0].0, Some(0 | 1));
        if !same {
            failures.push(args[0]);
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} commands re-run twice, differing: {:?}", commands.len(), failures),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gradient oracle", gradient_oracle),
        ("hessian oracle", hessian_oracle),
        ("lindbladian identity", lemma2_identity),
        ("ground state fixed point", fixed_point),
        ("tfim basis sweep clustering", fig2_pipeline),
        ("quench consistency", quench_consistency),
        ("rydberg classification", rydberg_classification),
        ("ablation pipeline", ablation_pipeline),
        ("brickwall variance bound", barren_plateau_bound),
        ("haar gradient survey", haar_survey),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
