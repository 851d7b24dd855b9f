//! Batch experiment runner: parse a config, instantiate the problem and
//! algorithm, execute runs (optionally in parallel), and emit CSV traces,
//! JSON summaries, and rate tables.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Config;
use crate::dynamics::run_dynamic;
use crate::error::{Error, Result};
use crate::geometry::{Composite, Domain};
use crate::linalg::{log_spaced_eigs, random_orthogonal, Matrix};
use crate::optimizers::{self, HyperParams, Optimizer, OptimizerRun, RunSetup};
use crate::point::Point;
use crate::problems::Problem;
use crate::trace::{DynamicTrace, RunStatus};
use crate::verify::{check_equivalence, fit_rate, RateModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BAD_KEY: i32 = 2;
pub const EXIT_ORACLE_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fgnrd", about = "no-regret game dynamics experiment runner")]
pub struct Args {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// output directory (falls back to FGNRD_OUT, then the working directory)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// overrides the config's problem seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker threads for sweeps
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// equivalence tolerance override
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// run the configured algorithm and write trace + summary files
    Run { config: PathBuf },
    /// run the algorithm and its matching dynamic, report the max deviation
    Equiv { config: PathBuf },
    /// sweep T over a geometric grid and fit the convergence rate
    Rates { config: PathBuf },
}

/// Entry point; returns a process exit code.
pub fn main_with(args: Args) -> i32 {
    if let Some(k) = args.parallel {
        // a failed pool build means one was already installed; that is fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global();
    }
    let result = match &args.cmd {
        Cmd::Run { config } => cmd_run(config, &args),
        Cmd::Equiv { config } => cmd_equiv(config, &args),
        Cmd::Rates { config } => cmd_rates(config, &args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnknownAlgorithm(_) | Error::UnknownProblem(_) | Error::Config(_) => {
                    EXIT_BAD_KEY
                }
                Error::OracleUnavailable(_)
                | Error::InsufficientStrongConvexity { .. }
                | Error::GapUnavailable => EXIT_ORACLE_MISMATCH,
                _ => EXIT_FAILURE,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// experiment assembly
// ---------------------------------------------------------------------------

struct Experiment {
    name: String,
    setup: RunSetup,
    algorithm: Box<dyn Optimizer>,
    algorithm_name: String,
    seed: u64,
    tol: f64,
}

fn build_experiment(cfg: &Config, args: &Args) -> Result<Experiment> {
    let seed = args.seed.or(cfg.get_u64("problem", "seed")?).unwrap_or(0);
    let dim = cfg.get_usize("problem", "dim")?.unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let kind = cfg.require("problem", "kind")?;
    let mut composite = None;
    let problem = match kind {
        "quadratic" => {
            let l = cfg.get_f64("problem", "l")?.unwrap_or(1.0);
            let cond = cfg.get_f64("problem", "cond")?.unwrap_or(10.0);
            Problem::quadratic_random(dim, l, cond, &mut rng)
        }
        "half_sq_norm" => Problem::half_sq_norm(dim),
        "least_squares" | "lasso" => {
            let l = cfg.get_f64("problem", "l")?.unwrap_or(1.0);
            let cond = cfg.get_f64("problem", "cond")?.unwrap_or(1.0);
            let q = random_orthogonal(dim, &mut rng);
            let eigs = log_spaced_eigs(dim, l / cond, l);
            let mut m = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    m.set(i, j, eigs[i].sqrt() * q.get(i, j));
                }
            }
            use rand::Rng;
            let target = Point::from(
                &(0..dim)
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect::<Vec<_>>(),
            );
            let p = Problem::least_squares(&m, &target)?;
            if kind == "lasso" {
                let c = cfg.get_f64("problem", "l1_coeff")?.unwrap_or(0.1);
                composite = Some(Composite::L1 { coeff: c });
            }
            p
        }
        "logsumexp" => {
            let tau = cfg.get_f64("problem", "temperature")?.unwrap_or(1.0);
            Problem::sym_log_sum_exp(dim, tau)
        }
        "abs_sum" => Problem::abs_sum(dim),
        "finite_sum_quadratic" => {
            let n = cfg.get_usize("problem", "components")?.unwrap_or(10);
            let l = cfg.get_f64("problem", "l")?.unwrap_or(1.0);
            Problem::finite_sum_quadratic(dim, n, l, &mut rng)
        }
        other => return Err(Error::UnknownProblem(other.into())),
    };

    let domain = match cfg.get("problem", "domain").unwrap_or("unconstrained") {
        "unconstrained" => Domain::Unconstrained { dim },
        "box" => {
            let b = cfg.get_f64("problem", "box_halfwidth")?.unwrap_or(1.0);
            Domain::symmetric_box(dim, b)
        }
        "l2_ball" => {
            let r = cfg.get_f64("problem", "radius")?.unwrap_or(1.0);
            Domain::L2Ball { radius: r, dim }
        }
        "lp_ball" => {
            let r = cfg.get_f64("problem", "radius")?.unwrap_or(1.0);
            let p = cfg.get_f64("problem", "p")?.unwrap_or(1.5);
            Domain::LpBall { p, radius: r, dim }
        }
        "simplex" => Domain::Simplex { dim },
        other => return Err(Error::UnknownProblem(format!("domain {other}"))),
    };

    let rounds = cfg.get_usize("run", "rounds")?.unwrap_or(100);
    let init = match cfg.get("run", "init").unwrap_or("zeros") {
        "zeros" => crate::geometry::project(&domain, &Point::zeros(dim))?,
        "ones" => crate::geometry::project(&domain, &Point::from(&vec![1.0; dim]))?,
        list => {
            let coords: std::result::Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let coords = coords.map_err(|_| Error::Config(format!("bad init list: {list}")))?;
            Point::new(coords)?
        }
    };

    let mut setup = RunSetup::new(Arc::new(problem), domain, init, rounds);
    if let Some(psi) = composite {
        setup = setup.with_composite(psi);
    }

    let algo_name = cfg.require("algorithm", "name")?.to_string();
    let params = HyperParams {
        gamma: cfg.get_f64("algorithm", "gamma")?,
        eta: cfg.get_f64("algorithm", "eta")?,
        mu: cfg.get_f64("algorithm", "mu")?,
        smooth: cfg.get_bool("algorithm", "smooth")?,
        radius: cfg.get_f64("algorithm", "radius")?,
    };
    let algorithm = optimizers::build(&algo_name, &params)?;

    let name = cfg.get("run", "name").unwrap_or("run").to_string();
    let tol = args.tol.or(cfg.get_f64("run", "tol")?).unwrap_or(1e-10);
    Ok(Experiment {
        name,
        setup,
        algorithm,
        algorithm_name: algo_name,
        seed,
        tol,
    })
}

fn out_dir(cfg: &Config, args: &Args) -> PathBuf {
    args.out
        .clone()
        .or_else(|| cfg.get("run", "out").map(PathBuf::from))
        .or_else(|| std::env::var("FGNRD_OUT").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_run(config: &Path, args: &Args) -> Result<i32> {
    let cfg = Config::load(config)?;
    let exp = build_experiment(&cfg, args)?;
    let dir = out_dir(&cfg, args);
    std::fs::create_dir_all(&dir)?;
    let run = exp.algorithm.run(&exp.setup)?;

    let csv = run_to_csv(&run, &exp.setup);
    std::fs::write(dir.join(format!("{}_trace.csv", exp.name)), csv)?;
    let summary = run_summary_json(&exp, &run)?;
    std::fs::write(dir.join(format!("{}_summary.json", exp.name)), summary)?;
    println!(
        "{}: {} rounds, final value {:.6e}",
        exp.name,
        run.rounds(),
        exp.setup.objective(&run.output)
    );
    Ok(EXIT_OK)
}

fn cmd_equiv(config: &Path, args: &Args) -> Result<i32> {
    let cfg = Config::load(config)?;
    let exp = build_experiment(&cfg, args)?;
    let run = exp.algorithm.run(&exp.setup)?;
    let game = exp.algorithm.matching_game(&exp.setup)?;
    let trace = run_dynamic(&game)?;
    let report = check_equivalence(&run, &trace, exp.tol)?;
    println!(
        "{}: max deviation {:.3e} over {} rounds (tol {:.1e}) -> {}",
        exp.algorithm_name,
        report.max_deviation,
        report.rounds_compared,
        exp.tol,
        if report.pass { "PASS" } else { "FAIL" }
    );
    let pass = report.pass;
    let verification = crate::verify::VerificationReport {
        algorithm: exp.algorithm_name.clone(),
        problem: exp.setup.problem.name().to_string(),
        rounds: exp.setup.rounds,
        seed: exp.seed,
        equivalence: Some(report),
        regret_certificates: vec![],
        rate: None,
    };
    let dir = out_dir(&cfg, args);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(
        dir.join(format!("{}_verification.json", exp.name)),
        verification.to_json(),
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_rates(config: &Path, args: &Args) -> Result<i32> {
    let cfg = Config::load(config)?;
    let dir = out_dir(&cfg, args);
    std::fs::create_dir_all(&dir)?;
    let t_min = cfg.get_usize("run", "t_min")?.unwrap_or(16);
    let t_max = cfg.get_usize("run", "t_max")?.unwrap_or(1024);
    let factor = cfg.get_f64("run", "t_factor")?.unwrap_or(2.0_f64.sqrt());
    let mut grid = Vec::new();
    let mut t = t_min as f64;
    while (t as usize) <= t_max {
        if grid.last() != Some(&(t as usize)) {
            grid.push(t as usize);
        }
        t *= factor;
    }

    let gaps: Result<Vec<(f64, f64)>> = grid
        .par_iter()
        .map(|&rounds| {
            let exp = build_experiment(&cfg, args)?;
            let mut setup = exp.setup.clone();
            setup.rounds = rounds;
            let run = exp.algorithm.run(&setup)?;
            let gap = final_gap(&setup, &run).ok_or(Error::GapUnavailable)?;
            Ok((run.rounds() as f64, gap))
        })
        .collect();
    let gaps = gaps?;

    let exp = build_experiment(&cfg, args)?;
    let (model, expected) = expected_rate(&exp)?;
    let fit = fit_rate(&gaps, model)?;
    // pass when the fitted decay is at least 80% of the expected exponent
    let pass = match model {
        RateModel::Power => fit.rate <= 0.8 * expected + 0.2,
        RateModel::Exponential => fit.rate <= 0.8 * expected,
    };
    let mut csv = String::from("algorithm,model,rate,r_squared,expected,pass\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{}\n",
        exp.algorithm_name,
        match model {
            RateModel::Power => "power",
            RateModel::Exponential => "exponential",
        },
        fmt_f64(fit.rate),
        fmt_f64(fit.r_squared),
        fmt_f64(expected),
        pass
    ));
    std::fs::write(dir.join("rates.csv"), csv)?;
    println!(
        "{}: fitted rate {:.4} (R^2 {:.4}), expected {:.4} -> {}",
        exp.algorithm_name,
        fit.rate,
        fit.r_squared,
        expected,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { EXIT_OK } else { EXIT_FAILURE })
}

fn final_gap(setup: &RunSetup, run: &OptimizerRun) -> Option<f64> {
    if setup.composite.is_some() {
        return None;
    }
    let (x_star, f_star) = setup.problem.known_min()?;
    if !setup.domain.contains(x_star) {
        return None;
    }
    Some(setup.problem.value(&run.output) - f_star)
}

/// The rate each algorithm's guarantee predicts, as a fit target.
fn expected_rate(exp: &Experiment) -> Result<(RateModel, f64)> {
    let name = exp.algorithm_name.as_str();
    Ok(match name {
        "frank_wolfe"
        | "heavy_ball"
        | "extragradient"
        | "boundary_frank_wolfe"
        | "incremental_frank_wolfe" => (RateModel::Power, -1.0),
        "gd_averaging" | "cumulative_gd" => {
            if exp.setup.problem.is_smooth() {
                (RateModel::Power, -1.0)
            } else {
                (RateModel::Power, -0.5)
            }
        }
        "nesterov_1mem"
        | "nesterov_infmem"
        | "nesterov_unconstrained"
        | "accelerated_proximal"
        | "gauge_frank_wolfe"
        | "optimistic_md_averaging" => (RateModel::Power, -2.0),
        "accelerated_linear" => {
            let l = exp.setup.problem.smoothness().unwrap_or(1.0);
            let mu = exp.setup.problem.strong_convexity().unwrap_or(l);
            let kappa = l / mu;
            (
                RateModel::Exponential,
                -1.0 / (2.0 * (2.0_f64).sqrt() * kappa.sqrt()),
            )
        }
        "gauge_frank_wolfe_sc" | "adaptive_frank_wolfe" => {
            // exponential with an instance-dependent constant; fit target is
            // qualitative (negative rate with high R^2)
            (RateModel::Exponential, -1e-3)
        }
        other => return Err(Error::UnknownAlgorithm(other.into())),
    })
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

/// 17 significant digits; bit-stable across runs.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

pub const TRACE_CSV_HEADER: &str = "t,alpha,f_avg,primal_gap,reg_x,reg_y,x_step_norm,y_step_norm";

/// Per-round CSV for an iterative run; identical schema to the dynamic trace.
pub fn run_to_csv(run: &OptimizerRun, setup: &RunSetup) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    let known = setup
        .problem
        .known_min()
        .filter(|(x, _)| setup.domain.contains(x) && setup.composite.is_none())
        .map(|(_, f)| f);
    let mut prev: Option<&Point> = None;
    for (i, w) in run.iterates.iter().enumerate() {
        let f = setup.objective(w);
        let gap = known.map(|fs| f - fs);
        let step = prev.map(|p| w.dist(p));
        out.push_str(&format!(
            "{},{},{},{},,,{},\n",
            i + 1,
            fmt_f64(run.alphas.get(i).copied().unwrap_or(f64::NAN)),
            fmt_f64(f),
            gap.map(fmt_f64).unwrap_or_default(),
            step.map(fmt_f64).unwrap_or_default(),
        ));
        prev = Some(w);
    }
    out
}

/// Per-round CSV for a dynamic trace.
pub fn trace_to_csv(trace: &DynamicTrace, base: &Problem) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    let summary = trace.summary.as_ref();
    let mut prev_x: Option<&Point> = None;
    let mut prev_y: Option<&Point> = None;
    for (i, r) in trace.rounds.iter().enumerate() {
        let f = crate::dynamics::primal_value(trace, base, &r.x_avg);
        let gap = summary
            .and_then(|s| s.gap_history.get(i))
            .copied()
            .unwrap_or(f64::NAN);
        let reg_x = summary
            .and_then(|s| s.reg_x_history.get(i))
            .copied()
            .unwrap_or(f64::NAN);
        let reg_y = summary
            .and_then(|s| s.reg_y_history.get(i))
            .copied()
            .unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.t,
            fmt_f64(r.alpha),
            fmt_f64(f),
            fmt_f64(gap),
            fmt_f64(reg_x),
            fmt_f64(reg_y),
            prev_x.map(|p| fmt_f64(r.x.dist(p))).unwrap_or_default(),
            prev_y.map(|p| fmt_f64(r.y.dist(p))).unwrap_or_default(),
        ));
        prev_x = Some(&r.x);
        prev_y = Some(&r.y);
    }
    out
}

fn run_summary_json(exp: &Experiment, run: &OptimizerRun) -> Result<String> {
    let final_value = exp.setup.objective(&run.output);
    let gap = final_gap(&exp.setup, run);
    let status = match run.status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::Converged { round } => format!("converged@{round}"),
    };
    let summary = serde_json::json!({
        "name": exp.name,
        "algorithm": exp.algorithm_name,
        "problem": exp.setup.problem.name(),
        "dim": exp.setup.problem.dim(),
        "rounds": run.rounds(),
        "seed": exp.seed,
        "status": status,
        "final_value": final_value,
        "final_gap": gap,
        "gradient_calls": run.gradient_calls,
        "component_gradient_calls": run.component_gradient_calls,
        "scalars": run.scalars.iter().cloned().collect::<std::collections::BTreeMap<String, f64>>(),
    });
    Ok(serde_json::to_string_pretty(&summary).expect("summary serializes"))
}
