//! Descent-side methods: averaged (sub)gradient descent, cumulative gradient
//! descent with its last-iterate guarantee, the single-call extra-gradient
//! method, and optimistic mirror descent with weighted averaging.

use crate::dynamics::{GameSpec, Order, Payoff, StrategyKind};
use crate::error::{Error, Result};
use crate::geometry::{bregman_step, project, DistanceGenerator};
use crate::point::Point;
use crate::weights::WeightSchedule;

use super::{Optimizer, OptimizerRun, RunSetup, CONVERGENCE_GAP};

fn radius_to_optimum(setup: &RunSetup, override_r: Option<f64>) -> Result<f64> {
    if let Some(r) = override_r {
        return Ok(r);
    }
    setup
        .problem
        .known_min()
        .map(|(x_star, _)| setup.init.dist(x_star))
        .filter(|r| *r > 0.0)
        .ok_or_else(|| {
            Error::OracleUnavailable("step size needs ||w0 - w*||; provide radius".into())
        })
}

fn grad_bound(setup: &RunSetup) -> Result<f64> {
    setup
        .problem
        .grad_bound(&setup.domain)
        .ok_or_else(|| Error::OracleUnavailable("subgradient bound G required".into()))
}

/// (Sub)gradient descent with averaging: w_t = Proj(w_{t-1} - eta d_{t-1}),
/// reported through the running average that the equivalent dynamic outputs.
/// eta = R/(G sqrt(T)) in the nonsmooth mode, 1/(2L) in the smooth mode.
#[derive(Debug, Clone, Default)]
pub struct GdAveraging {
    /// None: infer from the problem (smooth when a smoothness constant exists)
    pub smooth_mode: Option<bool>,
    pub eta_override: Option<f64>,
    pub radius_override: Option<f64>,
}

impl GdAveraging {
    fn eta(&self, setup: &RunSetup) -> Result<f64> {
        if let Some(e) = self.eta_override {
            return Ok(e);
        }
        let smooth = self
            .smooth_mode
            .unwrap_or_else(|| setup.problem.is_smooth());
        if smooth {
            Ok(1.0 / (2.0 * setup.smoothness()?))
        } else {
            let r = radius_to_optimum(setup, self.radius_override)?;
            let g = grad_bound(setup)?;
            Ok(r / (g * (setup.rounds as f64).sqrt()))
        }
    }
}

impl Optimizer for GdAveraging {
    fn name(&self) -> &'static str {
        "gd_averaging"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let eta = self.eta(setup)?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut avg = Point::zeros(w.dim());
        let mut inner = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            // round t plays the pre-step iterate w_{t-1}, then steps
            avg = avg
                .scale((t - 1) as f64 / t as f64)
                .axpy(1.0 / t as f64, &w);
            inner.push(w.clone());
            let d = setup.problem.subgrad(&w);
            w = project(&setup.domain, &w.axpy(-eta, &d))?;
            run.iterates.push(avg.clone());
            run.alphas.push(1.0);
            if setup
                .gap(&avg)
                .map(|g| g < CONVERGENCE_GAP)
                .unwrap_or(false)
            {
                run.status = crate::trace::RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), inner.clone()));
        run.aux.push(("inner".into(), inner));
        run.output = avg;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let eta = self.eta(setup)?;
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::BestResponse,
            x_strategy: StrategyKind::Omd {
                dgf: DistanceGenerator::SquaredL2,
                gamma: eta,
                init: setup.init.clone(),
            },
        })
    }
}

/// Cumulative gradient descent: the inner iterate descends along the sum of
/// past subgradients taken at the running averages, and the averaged iterate
/// itself carries the guarantee (a last-iterate method).
#[derive(Debug, Clone, Default)]
pub struct CumulativeGd {
    pub eta_override: Option<f64>,
    pub radius_override: Option<f64>,
}

impl CumulativeGd {
    fn eta(&self, setup: &RunSetup) -> Result<f64> {
        if let Some(e) = self.eta_override {
            return Ok(e);
        }
        let r = radius_to_optimum(setup, self.radius_override)?;
        let g = grad_bound(setup)?;
        Ok(r / (g * (setup.rounds as f64).sqrt()))
    }
}

impl Optimizer for CumulativeGd {
    fn name(&self) -> &'static str {
        "cumulative_gd"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let eta = self.eta(setup)?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut x = setup.init.clone();
        let mut w = setup.init.clone();
        let mut inner = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            if t > 1 {
                // subgradient at the previous round's average
                let d = setup.problem.subgrad(&w);
                x = project(&setup.domain, &x.axpy(-eta, &d))?;
                w = w.scale((t - 1) as f64 / t as f64).axpy(1.0 / t as f64, &x);
            }
            inner.push(x.clone());
            run.iterates.push(w.clone());
            run.alphas.push(1.0);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = crate::trace::RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), run.iterates.clone()));
        run.aux.push(("inner".into(), inner));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let eta = self.eta(setup)?;
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Btl,
            x_strategy: StrategyKind::Omd {
                dgf: DistanceGenerator::SquaredL2,
                gamma: eta,
                init: setup.init.clone(),
            },
        })
    }
}

/// Single-gradient-call extra-gradient with averaging: both Bregman steps
/// anchor at the running half-iterate; the action step reuses the previous
/// round's gradient, so each round costs one new gradient.
#[derive(Debug, Clone, Default)]
pub struct SingleCallExtraGradient {
    /// defaults to 1/(8L)
    pub gamma_override: Option<f64>,
    pub dgf: Option<DistanceGenerator>,
}

impl SingleCallExtraGradient {
    fn gamma(&self, setup: &RunSetup) -> Result<f64> {
        match self.gamma_override {
            Some(g) => Ok(g),
            None => Ok(1.0 / (8.0 * setup.smoothness()?)),
        }
    }
}

impl Optimizer for SingleCallExtraGradient {
    fn name(&self) -> &'static str {
        "extragradient"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let gamma = self.gamma(setup)?;
        let dgf = self.dgf.unwrap_or(DistanceGenerator::SquaredL2);
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut half = setup.init.clone();
        let mut prev_grad = setup.problem.grad(&setup.init)?;
        let mut avg = Point::zeros(setup.init.dim());
        let mut inner = Vec::with_capacity(setup.rounds);
        let mut halves = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let w = bregman_step(&dgf, &setup.domain, &half, &prev_grad, gamma)?;
            let g = setup.problem.grad(&w)?;
            half = bregman_step(&dgf, &setup.domain, &half, &g, gamma)?;
            prev_grad = g;
            avg = avg
                .scale((t - 1) as f64 / t as f64)
                .axpy(1.0 / t as f64, &w);
            inner.push(w);
            halves.push(half.clone());
            run.iterates.push(avg.clone());
            run.alphas.push(1.0);
            if setup
                .gap(&avg)
                .map(|g| g < CONVERGENCE_GAP)
                .unwrap_or(false)
            {
                run.status = crate::trace::RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), inner.clone()));
        run.aux.push(("inner".into(), inner));
        run.aux.push(("half".into(), halves));
        run.output = avg;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let gamma = self.gamma(setup)?;
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::BestResponse,
            x_strategy: StrategyKind::OptimisticMd {
                dgf: self.dgf.unwrap_or(DistanceGenerator::SquaredL2),
                gamma,
                init: setup.init.clone(),
            },
        })
    }
}

/// Optimistic mirror descent with weighted averaging: the gradients are taken
/// at the running weighted averages, which upgrades the rate to 1/T^2.
#[derive(Debug, Clone, Default)]
pub struct OptimisticMdAveraging {
    /// defaults to 1/(2L)
    pub gamma_override: Option<f64>,
    pub dgf: Option<DistanceGenerator>,
}

impl OptimisticMdAveraging {
    fn gamma(&self, setup: &RunSetup) -> Result<f64> {
        match self.gamma_override {
            Some(g) => Ok(g),
            None => Ok(1.0 / (2.0 * setup.smoothness()?)),
        }
    }
}

impl Optimizer for OptimisticMdAveraging {
    fn name(&self) -> &'static str {
        "optimistic_md_averaging"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let gamma = self.gamma(setup)?;
        let dgf = self.dgf.unwrap_or(DistanceGenerator::SquaredL2);
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut half = setup.init.clone();
        // gradient anchors are the running weighted averages; the first hint
        // is grad f at the initial average w_0
        let mut prev_grad = setup.problem.grad(&setup.init)?;
        let mut avg: Option<Point> = None;
        let mut cum = 0.0;
        let mut inner = Vec::with_capacity(setup.rounds);
        let mut anchors = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let alpha = t as f64;
            let w = bregman_step(&dgf, &setup.domain, &half, &prev_grad.scale(alpha), gamma)?;
            let new_cum = cum + alpha;
            let new_avg = match &avg {
                Some(a) => a.scale(cum / new_cum).axpy(alpha / new_cum, &w),
                None => w.clone(),
            };
            avg = Some(new_avg.clone());
            cum = new_cum;
            let g = setup.problem.grad(&new_avg)?;
            half = bregman_step(&dgf, &setup.domain, &half, &g.scale(alpha), gamma)?;
            prev_grad = g;
            inner.push(w);
            anchors.push(new_avg.clone());
            run.iterates.push(new_avg.clone());
            run.alphas.push(alpha);
            if setup
                .gap(&new_avg)
                .map(|g| g < CONVERGENCE_GAP)
                .unwrap_or(false)
            {
                run.status = crate::trace::RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("inner".into(), inner));
        run.aux.push(("anchor".into(), anchors));
        run.output = avg.expect("at least one round");
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let gamma = self.gamma(setup)?;
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Linear,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Btl,
            x_strategy: StrategyKind::OptimisticMd {
                dgf: self.dgf.unwrap_or(DistanceGenerator::SquaredL2),
                gamma,
                init: setup.init.clone(),
            },
        })
    }
}
