//! Verification harness: iterate-equivalence checking between iterative runs
//! and game traces, per-run regret-bound certification, convergence-rate
//! regression, and finite-difference oracles.

use serde::Serialize;

use crate::dynamics::StrategyKind;
use crate::error::{Error, Result};
use crate::geometry::{bregman, Domain};
use crate::learners::Regularizer;
use crate::loss::{weighted_regret, Side};
use crate::optimizers::OptimizerRun;
use crate::point::Point;
use crate::problems::Problem;
use crate::trace::{hindsight_comparators, DynamicTrace, RunStatus};

// ---------------------------------------------------------------------------
// iterate equivalence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub algorithm: String,
    pub rounds_compared: usize,
    /// max over rounds of ||w_t - x_avg_t||
    pub max_deviation: f64,
    /// max deviation of the dual actions y_t from the gradients at the
    /// iterative side's anchors, when both are recorded
    pub max_dual_deviation: Option<f64>,
    /// max deviation of the iterative side's inner actions (vertices,
    /// leaders, descent steps) from the game's x_t, when recorded
    pub max_action_deviation: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

/// Compares an iterative run against the trace of its matching dynamic.
/// The sequences must have equal length unless one of the two stopped early
/// as converged, in which case the common prefix is compared.
pub fn check_equivalence(
    run: &OptimizerRun,
    trace: &DynamicTrace,
    tol: f64,
) -> Result<EquivalenceReport> {
    if run.iterates.is_empty() || trace.is_empty() {
        return Err(Error::NoIterates);
    }
    if run.iterates[0].dim() != trace.rounds[0].x.dim() {
        return Err(Error::ShapeMismatch("dimension mismatch".into()));
    }
    let n = if run.iterates.len() == trace.len() {
        trace.len()
    } else {
        let early_stop = !matches!(run.status, RunStatus::Completed)
            || !matches!(trace.status, RunStatus::Completed);
        if !early_stop {
            return Err(Error::ShapeMismatch(format!(
                "round counts differ: {} vs {}",
                run.iterates.len(),
                trace.len()
            )));
        }
        run.iterates.len().min(trace.len())
    };
    let mut max_dev: f64 = 0.0;
    for t in 0..n {
        max_dev = max_dev.max(run.iterates[t].dist(&trace.rounds[t].x_avg));
    }
    let max_dual_deviation = run.aux_series("anchor").map(|anchors| {
        let mut dev: f64 = 0.0;
        for t in 0..n.min(anchors.len()) {
            let expected_y = if trace.problem.is_smooth() {
                trace.problem.grad(&anchors[t])
            } else {
                Ok(trace.problem.subgrad(&anchors[t]))
            };
            if let Ok(y) = expected_y {
                dev = dev.max(y.dist(&trace.rounds[t].y));
            }
        }
        dev
    });
    let max_action_deviation = ["vertex", "leader", "inner"]
        .iter()
        .find_map(|name| run.aux_series(name))
        .map(|actions| {
            let mut dev: f64 = 0.0;
            for t in 0..n.min(actions.len()) {
                dev = dev.max(actions[t].dist(&trace.rounds[t].x));
            }
            dev
        });
    let pass = max_dev <= tol
        && max_dual_deviation.map(|d| d <= tol).unwrap_or(true)
        && max_action_deviation.map(|d| d <= tol).unwrap_or(true);
    Ok(EquivalenceReport {
        algorithm: run.algorithm.clone(),
        rounds_compared: n,
        max_deviation: max_dev,
        max_dual_deviation,
        max_action_deviation,
        tol,
        pass,
    })
}

// ---------------------------------------------------------------------------
// regret-bound certification
// ---------------------------------------------------------------------------

pub const CERT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct RegretCertificate {
    pub learner: String,
    pub side: String,
    pub realized: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Evaluates the per-run regret bound the strategy's lemma guarantees, from
/// the trace's own quantities, and checks the realized weighted regret
/// (against the hindsight comparator) does not exceed it.
pub fn certify_regret_bounds(
    trace: &DynamicTrace,
    side: Side,
    strategy: &StrategyKind,
) -> Result<RegretCertificate> {
    if trace.is_empty() {
        return Err(Error::NoIterates);
    }
    let (x_star, y_star) = hindsight_comparators(trace, &trace.problem, &trace.domain)?;
    let (actions, losses, comparator, decision_set) = match side {
        Side::YPlayer => (
            trace.y_actions(),
            trace.y_losses(),
            y_star,
            Domain::Unconstrained {
                dim: trace.domain.dim(),
            },
        ),
        Side::XPlayer => (
            trace.x_actions(),
            trace.x_losses(),
            x_star,
            trace.domain.clone(),
        ),
    };
    let realized = weighted_regret(
        &trace.problem,
        &losses,
        &actions,
        &comparator,
        &decision_set,
    )?;

    let alphas = trace.alphas();
    // strong convexity of the per-round losses in this player's seat
    let mu_loss = match side {
        Side::YPlayer => trace.problem.smoothness().map(|l| 1.0 / l).unwrap_or(0.0),
        Side::XPlayer => trace
            .extras
            .shift
            .as_ref()
            .map(|(c, phi)| {
                if matches!(phi, crate::problems::ShiftPhi::HalfSqNorm) {
                    *c
                } else {
                    0.0
                }
            })
            .unwrap_or(0.0),
    };

    let bound = match strategy {
        StrategyKind::BestResponse => 0.0,
        StrategyKind::Btl => {
            // -(mu/2) sum A_{t-1} ||z_{t-1} - z_t||^2 <= 0
            let mut b = 0.0;
            let mut cum = 0.0;
            for t in 1..actions.len() {
                cum += alphas[t - 1];
                b -= mu_loss * cum / 2.0 * actions[t - 1].dist(&actions[t]).powi(2);
            }
            b
        }
        StrategyKind::Ftl { init } | StrategyKind::Aftl { init } => match side {
            Side::YPlayer => ftl_fenchel_bound(trace, mu_loss, init)?,
            Side::XPlayer => ftl_strongly_convex_set_bound(trace)?,
        },
        StrategyKind::LazyFtl { .. } => {
            return Err(Error::OracleUnavailable(
                "lazy FTL regret is certified through its convergence test".into(),
            ))
        }
        StrategyKind::Ftrl { reg, eta } => {
            let (beta, r_first, r_star) =
                reg_terms(reg, *eta, &trace.domain, &actions[0], &comparator)?;
            let mut b = (r_star - r_first) / eta;
            let mut cum_mu = 0.0;
            for t in 0..actions.len() {
                cum_mu += alphas[t] * mu_loss;
                let delta = loss_grad_at(trace, side, t, &actions[t])?;
                b += 2.0 * alphas[t] * alphas[t] * delta.norm_sq() / (cum_mu + beta);
            }
            b
        }
        StrategyKind::Btrl { reg, eta } => {
            let reg = resolve_reg(reg, &trace.domain)?;
            let z0 = reg.argmin(&trace.domain)?;
            let beta = 1.0;
            let mut b = (reg.value(&comparator)? - reg.value(&z0)?) / eta;
            let mut cum = 0.0;
            for t in 1..actions.len() {
                cum += alphas[t - 1];
                b -= (mu_loss * cum / 2.0 + beta / (2.0 * eta))
                    * actions[t - 1].dist(&actions[t]).powi(2);
            }
            b
        }
        StrategyKind::Oftl { init } => oftl_bound(trace, side, init)?,
        StrategyKind::Oftrl { .. } => {
            return Err(Error::OracleUnavailable(
                "certify the master bound on generic histories via certify_oftrl_generic".into(),
            ))
        }
        StrategyKind::Omd { dgf, gamma, .. } => {
            // (1/gamma) V_{z_1}(z*) + (gamma/(2 beta)) sum ||alpha_t delta_t||^2
            let beta = dgf.strong_convexity();
            let mut b = bregman(dgf, &actions[0], &comparator)? / gamma;
            for t in 0..actions.len() {
                let delta = loss_grad_at(trace, side, t, &actions[t])?;
                b += gamma / (2.0 * beta) * (alphas[t] * delta.norm()).powi(2);
            }
            b
        }
        StrategyKind::Md { dgf, gamma, init } => {
            let beta = dgf.strong_convexity();
            let mut b = bregman(dgf, init, &comparator)? / gamma;
            let mut prev = init.clone();
            for action in &actions {
                b -= beta / (2.0 * gamma) * prev.dist(action).powi(2);
                prev = action.clone();
            }
            b
        }
        StrategyKind::OptimisticMd { dgf, gamma, init } => {
            let beta = dgf.strong_convexity();
            let mut b = bregman(dgf, init, &comparator)? / gamma;
            // hints are the previous round's loss gradient; m_1 = grad f(w_0)
            let mut hint = if trace.problem.is_smooth() {
                trace.problem.grad(init)?
            } else {
                trace.problem.subgrad(init)
            };
            for t in 0..actions.len() {
                let delta = loss_grad_at(trace, side, t, &actions[t])?;
                b += gamma / (2.0 * beta) * alphas[t] * alphas[t] * delta.dist(&hint).powi(2);
                hint = delta;
            }
            b
        }
    };

    Ok(RegretCertificate {
        learner: strategy_name(strategy).into(),
        side: format!("{side:?}"),
        realized,
        bound,
        pass: realized <= bound + CERT_SLACK,
    })
}

fn strategy_name(s: &StrategyKind) -> &'static str {
    match s {
        StrategyKind::BestResponse => "br",
        StrategyKind::Ftl { .. } => "ftl",
        StrategyKind::Btl => "btl",
        StrategyKind::Aftl { .. } => "aftl",
        StrategyKind::LazyFtl { .. } => "lazy_ftl",
        StrategyKind::Ftrl { .. } => "ftrl",
        StrategyKind::Btrl { .. } => "btrl",
        StrategyKind::Oftl { .. } => "oftl",
        StrategyKind::Oftrl { .. } => "oftrl",
        StrategyKind::Omd { .. } => "omd",
        StrategyKind::Md { .. } => "md",
        StrategyKind::OptimisticMd { .. } => "optmd",
    }
}

/// Gradient of the player's round-t loss at a point, from trace anchors:
/// y-side: grad f*(y_t) - x_t = witness_t - x_t; x-side: y_t (+ shift grad).
fn loss_grad_at(trace: &DynamicTrace, side: Side, t: usize, at: &Point) -> Result<Point> {
    let r = &trace.rounds[t];
    match side {
        Side::YPlayer => {
            let witness = r
                .y_witness
                .as_ref()
                .ok_or_else(|| Error::OracleUnavailable("no primal witness for y_t".into()))?;
            Ok(witness.sub(&r.x))
        }
        Side::XPlayer => {
            let mut g = r.y.clone();
            if let Some((coeff, phi)) = &trace.extras.shift {
                g = g.axpy(*coeff, &phi.grad(at));
            }
            Ok(g)
        }
    }
}

fn resolve_reg(reg: &crate::dynamics::RegSpec, domain: &Domain) -> Result<Regularizer> {
    Ok(match reg {
        crate::dynamics::RegSpec::Zero => Regularizer::Zero,
        crate::dynamics::RegSpec::SquaredL2 => Regularizer::SquaredL2,
        crate::dynamics::RegSpec::SquaredGauge { coeff } => Regularizer::SquaredGauge {
            gset: crate::geometry::GaugeSet::new(domain.clone())?,
            coeff: *coeff,
        },
        crate::dynamics::RegSpec::Entropy => Regularizer::Entropy,
    })
}

fn reg_terms(
    reg: &crate::dynamics::RegSpec,
    _eta: f64,
    domain: &Domain,
    first_action: &Point,
    comparator: &Point,
) -> Result<(f64, f64, f64)> {
    let reg = resolve_reg(reg, domain)?;
    let beta = match reg {
        Regularizer::Zero => 0.0,
        _ => 1.0,
    };
    Ok((beta, reg.value(first_action)?, reg.value(comparator)?))
}

/// Lemma bound for FTL on the 1/L-strongly-convex Fenchel losses:
/// sum_t 2 alpha_t^2 ||delta_t||^2 / (mu A_t), delta_t = witness_t - x_t.
fn ftl_fenchel_bound(trace: &DynamicTrace, mu: f64, _init: &Point) -> Result<f64> {
    if mu <= 0.0 {
        return Err(Error::OracleUnavailable(
            "FTL bound needs strongly convex losses".into(),
        ));
    }
    let mut b = 0.0;
    for r in &trace.rounds {
        let witness = r
            .y_witness
            .as_ref()
            .ok_or_else(|| Error::OracleUnavailable("no primal witness for y_t".into()))?;
        let delta = witness.sub(&r.x);
        b += 2.0 * r.alpha * r.alpha * delta.norm_sq() / (r.cum_weight * mu);
    }
    Ok(b)
}

/// Lemma bound for FTL with linear losses over a strongly convex set:
/// (2 G^2 / (lambda nu_T)) (1 + log T), nu_T the smallest cumulative-loss norm.
fn ftl_strongly_convex_set_bound(trace: &DynamicTrace) -> Result<f64> {
    let lambda = trace.domain.strong_convexity_of_set();
    if lambda <= 0.0 {
        return Err(Error::OracleUnavailable(
            "set is not strongly convex".into(),
        ));
    }
    let mut cum = Point::zeros(trace.domain.dim());
    let mut nu = f64::INFINITY;
    let mut g_max: f64 = 0.0;
    for r in &trace.rounds {
        g_max = g_max.max(r.y.norm());
        cum = cum.axpy(r.alpha, &r.y);
        nu = nu.min(cum.norm());
    }
    if nu <= 0.0 {
        return Err(Error::OracleUnavailable(
            "cumulative gradient vanished".into(),
        ));
    }
    let t = trace.len() as f64;
    Ok(2.0 * g_max * g_max / (lambda * nu) * (1.0 + t.ln()))
}

/// OFTL bound, term (A) of the master lemma with previous-loss hints:
/// sum_t alpha_t <anchor_{t-1} - anchor_t, z_t - w_{t+1}>, where w_{t+1} is
/// the FTL leader of the first t losses.
fn oftl_bound(trace: &DynamicTrace, side: Side, init: &Point) -> Result<f64> {
    if side != Side::YPlayer {
        return Err(Error::OracleUnavailable(
            "OFTL certification is y-side".into(),
        ));
    }
    let mut b = 0.0;
    let mut prev_anchor = init.clone();
    for r in &trace.rounds {
        // the FTL leader after round t is grad f at the running average
        let w_next = if trace.problem.is_smooth() {
            trace.problem.grad(&r.x_avg)?
        } else {
            trace.problem.subgrad(&r.x_avg)
        };
        let diff = prev_anchor.sub(&r.x);
        b += r.alpha * diff.dot(&r.y.sub(&w_next));
        prev_anchor = r.x.clone();
    }
    Ok(b)
}

/// Master OFTRL bound on a generic linear-loss history with the squared-l2
/// regularizer: terms (A) + (B) + (C) + (D), with the FTRL path w_t computed
/// by replaying the same history.
#[allow(clippy::too_many_arguments)]
pub fn certify_oftrl_generic(
    domain: &Domain,
    losses: &[(f64, Point)],
    hints: &[Point],
    actions: &[Point],
    eta: f64,
    comparator: &Point,
) -> Result<RegretCertificate> {
    if losses.len() != actions.len() || hints.len() != actions.len() {
        return Err(Error::ShapeMismatch("history lengths differ".into()));
    }
    // realized regret of the actions
    let mut realized = 0.0;
    for ((alpha, g), z) in losses.iter().zip(actions) {
        realized += alpha * (g.dot(z) - g.dot(comparator));
    }
    // FTRL path: w_t = argmin sum_{s<t} alpha_s <g_s, z> + ||z||^2/(2 eta)
    let dim = comparator.dim();
    let mut w: Vec<Point> = Vec::with_capacity(actions.len() + 1);
    let mut cum = Point::zeros(dim);
    w.push(crate::geometry::project(domain, &Point::zeros(dim))?);
    for (alpha, g) in losses {
        cum = cum.axpy(*alpha, g);
        w.push(crate::geometry::project(domain, &cum.scale(-eta))?);
    }
    let beta = 1.0;
    let mut bound = 0.0;
    // (A): sum alpha_t [ (l_t - m_t)(z_t) - (l_t - m_t)(w_{t+1}) ]
    for (t, ((alpha, g), z)) in losses.iter().zip(actions).enumerate() {
        let diff = g.sub(&hints[t]);
        bound += alpha * diff.dot(&z.sub(&w[t + 1]));
    }
    // (B): (R(z*) - R(w_1)) / eta
    bound += (0.5 * comparator.norm_sq() - 0.5 * w[0].norm_sq()) / eta;
    // (C) and (D): negative stability terms (linear losses: mu_s = 0)
    for (t, z) in actions.iter().enumerate() {
        bound -= 0.5 * (beta / eta) * z.dist(&w[t]).powi(2);
        bound -= 0.5 * (beta / eta) * z.dist(&w[t + 1]).powi(2);
    }
    Ok(RegretCertificate {
        learner: "oftrl".into(),
        side: "generic".into(),
        realized,
        bound,
        pass: realized <= bound + CERT_SLACK,
    })
}

/// Shifts each of a player's actions by `magnitude` along its own round's
/// loss-ascent direction (the steepest per-round regret increase at that
/// sup-norm budget); used as a calibrated negative control for the
/// certification suite.
pub fn perturb_trace(trace: &DynamicTrace, side: Side, magnitude: f64) -> DynamicTrace {
    let mut out = trace.clone();
    for (t, r) in out.rounds.iter_mut().enumerate() {
        let action = match side {
            Side::YPlayer => r.y.clone(),
            Side::XPlayer => r.x.clone(),
        };
        let g = match side {
            Side::YPlayer => match loss_grad_at(trace, side, t, &action) {
                Ok(g) => g,
                Err(_) => continue,
            },
            Side::XPlayer => {
                let mut g = trace.rounds[t].y.clone();
                if let Some((coeff, phi)) = &trace.extras.shift {
                    g = g.axpy(*coeff, &phi.grad(&action));
                }
                g
            }
        };
        let norm = g.norm();
        if norm == 0.0 {
            continue;
        }
        let step = g.scale(magnitude / norm);
        match side {
            Side::YPlayer => r.y = r.y.add(&step),
            Side::XPlayer => r.x = r.x.add(&step),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// rate fitting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateModel {
    /// gap ~ c * T^slope: regress log gap on log T
    Power,
    /// gap ~ c * exp(rate * T): regress log gap on T
    Exponential,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub model: RateModel,
    /// slope (power) or per-round rate (exponential)
    pub rate: f64,
    pub r_squared: f64,
    pub samples_used: usize,
}

/// Least-squares fit of log(gap) against log(T) or T. The first 10% of
/// rounds are dropped as transient, and gaps at the floor are excluded so
/// saturation cannot corrupt the slope.
pub fn fit_rate(samples: &[(f64, f64)], model: RateModel) -> Result<RateFit> {
    let finite: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, g)| t.is_finite() && g.is_finite())
        .cloned()
        .collect();
    if finite.len() < 8 {
        return Err(Error::RateFit(format!(
            "only {} usable samples",
            finite.len()
        )));
    }
    let t_max = finite.iter().map(|(t, _)| *t).fold(0.0, f64::max);
    let t_min = finite.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    if t_max / t_min < 16.0 {
        return Err(Error::RateFit(format!(
            "T range {t_min}..{t_max} narrower than 16x"
        )));
    }
    let floor = match model {
        RateModel::Power => 1e-13,
        RateModel::Exponential => 100.0 * f64::EPSILON,
    };
    let kept: Vec<(f64, f64)> = finite
        .into_iter()
        .filter(|(t, g)| *t >= 0.1 * t_max && *g > floor)
        .collect();
    if kept.len() < 4 {
        return Err(Error::RateFit(format!(
            "only {} samples survive burn-in and floor filters",
            kept.len()
        )));
    }
    let xs: Vec<f64> = kept
        .iter()
        .map(|(t, _)| match model {
            RateModel::Power => t.ln(),
            RateModel::Exponential => *t,
        })
        .collect();
    let ys: Vec<f64> = kept.iter().map(|(_, g)| g.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::RateFit("degenerate T samples".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(RateFit {
        model,
        rate: slope,
        r_squared: r2,
        samples_used: kept.len(),
    })
}

// ---------------------------------------------------------------------------
// oracle validation
// ---------------------------------------------------------------------------

/// Max relative error between the analytic gradient and central finite
/// differences over all coordinates. Nonsmooth problems are flagged via the
/// oracle-unavailable error and skipped by callers.
pub fn finite_diff_check(problem: &Problem, point: &Point, h: f64) -> Result<f64> {
    let g = problem.grad(point)?;
    let mut worst: f64 = 0.0;
    for i in 0..point.dim() {
        let mut plus = point.coords().to_vec();
        let mut minus = point.coords().to_vec();
        plus[i] += h;
        minus[i] -= h;
        let fd =
            (problem.value(&Point::from(&plus)) - problem.value(&Point::from(&minus))) / (2.0 * h);
        let denom = 1.0_f64.max(g[i].abs());
        worst = worst.max((g[i] - fd).abs() / denom);
    }
    Ok(worst)
}

/// JSON verification record keyed by (algorithm, problem, rounds, seed).
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub algorithm: String,
    pub problem: String,
    pub rounds: usize,
    pub seed: u64,
    pub equivalence: Option<EquivalenceReport>,
    pub regret_certificates: Vec<RegretCertificate>,
    pub rate: Option<RateFit>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}


#[cfg(test)]
mod equivalence_tests {
    use super::*;
    use crate::dynamics::{run_dynamic, GameSpec, Order, Payoff, StrategyKind};
    use crate::geometry::Domain;
    use crate::optimizers::{FrankWolfe, Optimizer, RunSetup};
    use crate::point::Point;
    use crate::weights::WeightSchedule;
    use std::sync::Arc;

    #[test]
    fn identical_runs_have_zero_deviation() {
        let setup = RunSetup::new(
            Arc::new(Problem::half_sq_norm(2)),
            Domain::symmetric_box(2, 1.0),
            Point::from(&[1.0, 1.0]),
            30,
        );
        let run = FrankWolfe.run(&setup).unwrap();
        let trace = run_dynamic(&FrankWolfe.matching_game(&setup).unwrap()).unwrap();
        let report = check_equivalence(&run, &trace, 1e-12).unwrap();
        assert!(report.pass);
        assert!(report.max_deviation < 1e-12);
    }

    #[test]
    fn wrong_weights_are_detected() {
        // negative control: the conditional-gradient dynamic with uniform
        // instead of linear weights deviates visibly from the boxed recursion
        let setup = RunSetup::new(
            Arc::new(Problem::half_sq_norm(2)),
            Domain::symmetric_box(2, 1.0),
            Point::from(&[1.0, 1.0]),
            50,
        );
        let run = FrankWolfe.run(&setup).unwrap();
        let mut game = FrankWolfe.matching_game(&setup).unwrap();
        game.weights = WeightSchedule::Uniform;
        let trace = run_dynamic(&game).unwrap();
        let report = check_equivalence(&run, &trace, 1e-10).unwrap();
        assert!(!report.pass);
        assert!(
            report.max_deviation > 0.01,
            "deviation {}",
            report.max_deviation
        );
    }

    #[test]
    fn mismatched_shapes_error() {
        let setup = RunSetup::new(
            Arc::new(Problem::half_sq_norm(2)),
            Domain::symmetric_box(2, 1.0),
            Point::from(&[1.0, 1.0]),
            30,
        );
        let run = FrankWolfe.run(&setup).unwrap();
        let mut short = FrankWolfe.matching_game(&setup).unwrap();
        short.rounds = 10;
        let trace = run_dynamic(&short).unwrap();
        assert!(matches!(
            check_equivalence(&run, &trace, 1e-10),
            Err(Error::ShapeMismatch(_))
        ));
        // different dimension
        let other = GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds: 30,
            problem: Arc::new(Problem::half_sq_norm(3)),
            domain: Domain::symmetric_box(3, 1.0),
            y_strategy: StrategyKind::Ftl {
                init: Point::from(&[1.0, 1.0, 1.0]),
            },
            x_strategy: StrategyKind::BestResponse,
        };
        let trace = run_dynamic(&other).unwrap();
        assert!(matches!(
            check_equivalence(&run, &trace, 1e-10),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn verification_report_serializes() {
        let report = VerificationReport {
            algorithm: "frank_wolfe".into(),
            problem: "half_sq_norm".into(),
            rounds: 30,
            seed: 7,
            equivalence: None,
            regret_certificates: vec![],
            rate: None,
        };
        let json = report.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["algorithm"], "frank_wolfe");
        assert_eq!(parsed["rounds"], 30);
    }
}
