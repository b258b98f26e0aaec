//! Numerical checks exposed as subcommands. Each returns a report whose
//! first line is the verdict, followed by the raw numbers.

use std::fmt::Write as _;

use ssgd_core::random::{gaussian_matrix, random_density, random_hermitian, stream};
use ssgd_core::ssgd::sign_convention_check;
use ssgd_core::verification::{
    ad_g_block_error, brickwall_variance, check_lemma2, haar_gradient_survey, LindbladOp, VarianceEstimate,
};
use ssgd_core::{build_brickwall, build_standard, build_tfim, Boundary, RegisterLayout, TfimParams};

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub body: String,
}

impl CheckReport {
    fn new(name: &'static str, passed: bool, body: String) -> Self {
        Self { name, passed, body }
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn render(&self) -> String {
        format!("check\t{}\nstatus\t{}\n{}", self.name, self.verdict(), self.body)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Options {
    pub draws: usize,
    pub n_system: usize,
    pub seed: u64,
    pub tol: f64,
    pub block_tol: f64,
    pub e_tol: f64,
}

impl Default for Lemma2Options {
    fn default() -> Self {
        Self {
            draws: 100,
            n_system: 2,
            seed: 0,
            tol: 1e-8,
            block_tol: 1e-12,
            e_tol: 1e-3,
        }
    }
}

/// Random `(L, ρ, H)` draws with `k = 2`: `L` acts on one system site.
pub fn lemma2(opts: &Lemma2Options) -> CliResult<CheckReport> {
    let n = opts.n_system;
    let gens = build_standard(2, RegisterLayout::new(n, 1)?, Boundary::Open)?;
    let mut body = String::from("draw\tsite\tlindblad_derivative\tquadratic_form\tabs_error\tblock_error\tcorollary\n");
    let (mut worst, mut worst_block, mut corollary) = (0.0_f64, 0.0_f64, true);
    for d in 0..opts.draws {
        let mut r = stream(opts.seed, d as u64);
        let h = random_hermitian(n, &mut r);
        let rho = random_density(n, &mut r);
        let site = d % n;
        let lb = LindbladOp::new(gaussian_matrix(2, &mut r), site)?;
        let rep = check_lemma2(&h, &rho, &lb, gens.ancilla(), opts.e_tol)?;
        let block = ad_g_block_error(&rho, &lb)?;
        worst = worst.max(rep.abs_error);
        worst_block = worst_block.max(block);
        corollary &= rep.corollary_holds;
        let _ = writeln!(
            body,
            "{d}\t{site}\t{}\t{}\t{}\t{}\t{}",
            rep.lindblad_derivative, rep.quadratic_form, rep.abs_error, block, rep.corollary_holds
        );
    }
    let passed = worst <= opts.tol && worst_block <= opts.block_tol && corollary;
    let head = format!(
        "max_abs_error\t{worst}\ntolerance\t{}\nmax_block_error\t{worst_block}\nblock_tolerance\t{}\n\n",
        opts.tol, opts.block_tol
    );
    Ok(CheckReport::new("lemma2", passed, head + &body))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyOptions {
    pub n_min: usize,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub h_x: f64,
    pub h_z: f64,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        Self {
            n_min: 4,
            n_max: 8,
            samples: 200,
            seed: 0,
            h_x: 0.25,
            h_z: 0.25,
        }
    }
}

/// Median over Haar states of the largest unitary gradient over 2-local
/// words, for each chain length; passes if it strictly decreases with `n`.
pub fn haar_survey(opts: &SurveyOptions) -> CliResult<CheckReport> {
    let mut body = String::from("n\tsamples\tmedian_max_gradient\tmean_max_gradient\n");
    let mut medians = Vec::new();
    for n in opts.n_min..=opts.n_max {
        let h = build_tfim(&TfimParams::new(n, 1.0, opts.h_x, opts.h_z))?;
        let words = build_standard(2, RegisterLayout::new(n, 1)?, Boundary::Open)?.system_only_words()?;
        let s = haar_gradient_survey(&h, &words, opts.samples, &mut stream(opts.seed, n as u64))?;
        let _ = writeln!(body, "{n}\t{}\t{}\t{}", opts.samples, s.median, s.mean);
        medians.push(s.median);
    }
    let passed = medians.len() >= 2 && medians.windows(2).all(|w| w[1] < w[0]);
    Ok(CheckReport::new("haar_survey", passed, body))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceOptions {
    pub sizes: Vec<usize>,
    pub layers: usize,
    pub samples: usize,
    pub seed: u64,
    pub h_x: f64,
    pub h_z: f64,
    /// Margin in standard errors for the one-sided bound comparison.
    pub sigmas: f64,
    /// Largest size must keep at least this fraction of the smallest size's variance.
    pub min_ratio: f64,
}

impl Default for VarianceOptions {
    fn default() -> Self {
        Self {
            sizes: vec![4, 6],
            layers: 8,
            samples: 500,
            seed: 0,
            h_x: 0.25,
            h_z: 0.25,
            sigmas: 3.0,
            min_ratio: 0.5,
        }
    }
}

/// Brickwall circuits with resets on TFIM chains: empirical energy variance
/// against `‖H‖²_HS / 5^12`.
pub fn bp_variance(opts: &VarianceOptions) -> CliResult<(CheckReport, Vec<VarianceEstimate>)> {
    let mut body = String::from("n\tlayers\tsamples\tmean\tvariance\tstd_error\tbound\tabove_bound\n");
    let mut estimates = Vec::new();
    let mut passed = !opts.sizes.is_empty();
    for &n in &opts.sizes {
        let h = build_tfim(&TfimParams::new(n, 1.0, opts.h_x, opts.h_z))?;
        let schedule = build_brickwall(n, Boundary::Open)?;
        let est = brickwall_variance(&h, &schedule, opts.layers, opts.samples, &mut stream(opts.seed, n as u64))?;
        let above = est.above_bound(opts.sigmas);
        passed &= above;
        let _ = writeln!(
            body,
            "{n}\t{}\t{}\t{}\t{}\t{}\t{}\t{above}",
            opts.layers, opts.samples, est.mean, est.variance, est.std_error, est.bound
        );
        estimates.push(est);
    }
    if let (Some(first), Some(last)) = (estimates.first(), estimates.last()) {
        let ratio = last.variance / first.variance;
        passed &= ratio >= opts.min_ratio;
        let _ = writeln!(body, "\nvariance_ratio_last_to_first\t{ratio}\nmin_ratio\t{}", opts.min_ratio);
    }
    Ok((CheckReport::new("bp_variance", passed, body), estimates))
}

/// Descent-sign check on random two-qubit instances.
pub fn sign_check(trials: usize, seed: u64) -> CliResult<CheckReport> {
    let v = sign_convention_check(seed, trials)?;
    let body = format!(
        "trials\t{}\ndescending\t{}\nworst_delta\t{}\n",
        v.trials, v.descending, v.worst_delta
    );
    Ok(CheckReport::new("sign_convention", v.passed(), body))
}
