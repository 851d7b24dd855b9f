//! The Frank-Wolfe family: the classic conditional-gradient method, its
//! adaptive-weight and incremental variants, the boundary variant for
//! strongly convex sets, and the gauge-regularized accelerated variants.

use crate::dynamics::{GameSpec, Order, Payoff, RegSpec, StrategyKind};
use crate::error::{Error, Result};
use crate::geometry::{gauge_reg_argmin, lmo, GaugeSet};
use crate::point::Point;
use crate::trace::RunStatus;
use crate::weights::WeightSchedule;

use super::{Optimizer, OptimizerRun, RunSetup, CONVERGENCE_GAP, DEGENERACY_TOL};

/// Classic conditional gradient: v_t = LMO(grad f(w_{t-1})),
/// w_t = (1 - gamma_t) w_{t-1} + gamma_t v_t with gamma_t = 2/(t+1).
#[derive(Debug, Clone, Default)]
pub struct FrankWolfe;

impl Optimizer for FrankWolfe {
    fn name(&self) -> &'static str {
        "frank_wolfe"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut vs = Vec::with_capacity(setup.rounds);
        let mut anchors = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            anchors.push(w.clone());
            let g = setup.problem.grad(&w)?;
            let v = if g.norm() < DEGENERACY_TOL {
                run.degenerate_rounds.push(t);
                w.clone()
            } else {
                lmo(&setup.domain, &g)?
            };
            let gamma = 2.0 / (t as f64 + 1.0);
            w = w.scale(1.0 - gamma).axpy(gamma, &v);
            vs.push(v);
            run.iterates.push(w.clone());
            run.alphas.push(t as f64);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("vertex".into(), vs));
        run.aux.push(("anchor".into(), anchors));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Ftl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::BestResponse,
        })
    }
}

/// Conditional gradient with data-dependent weights
/// alpha_t = 1 / ||x_t - w_{t-1}||^2; linear rate over strongly convex sets
/// when gradients stay bounded away from zero.
#[derive(Debug, Clone)]
pub struct AdaptiveFrankWolfe {
    pub degeneracy_tol: f64,
}

impl Default for AdaptiveFrankWolfe {
    fn default() -> Self {
        AdaptiveFrankWolfe {
            degeneracy_tol: 1e-12,
        }
    }
}

impl Optimizer for AdaptiveFrankWolfe {
    fn name(&self) -> &'static str {
        "adaptive_frank_wolfe"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut cum = 0.0;
        let mut anchors = Vec::with_capacity(setup.rounds);
        let mut vertices = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let g = setup.problem.grad(&w)?;
            let x = lmo(&setup.domain, &g)?;
            let step = x.dist(&w);
            if step < self.degeneracy_tol {
                run.status = RunStatus::Converged { round: t };
                break;
            }
            anchors.push(w.clone());
            vertices.push(x.clone());
            let alpha = 1.0 / (step * step);
            let new_cum = cum + alpha;
            w = w.scale(cum / new_cum).axpy(alpha / new_cum, &x);
            cum = new_cum;
            run.iterates.push(w.clone());
            run.alphas.push(alpha);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), anchors));
        run.aux.push(("vertex".into(), vertices));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Adaptive,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Aftl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::BestResponse,
        })
    }
}

/// Incremental conditional gradient over finite sums: refresh one scaled
/// component gradient per round (cycling) at the running average and take the
/// LMO of the cache sum.
#[derive(Debug, Clone, Default)]
pub struct IncrementalFrankWolfe;

impl Optimizer for IncrementalFrankWolfe {
    fn name(&self) -> &'static str {
        "incremental_frank_wolfe"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let n = setup
            .problem
            .n_components()
            .ok_or_else(|| Error::OracleUnavailable("finite-sum oracle required".into()))?;
        if n == 0 {
            return Err(Error::InvalidSpec("finite sum with zero components".into()));
        }
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut cache: Vec<Point> = (0..n)
            .map(|i| setup.problem.component_grad(i, &w))
            .collect::<Result<_>>()?;
        let mut vs = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let i = (t - 1) % n;
            cache[i] = setup.problem.component_grad(i, &w)?;
            let mut g = Point::zeros(w.dim());
            for c in &cache {
                g = g.add(c);
            }
            let v = if g.norm() < DEGENERACY_TOL {
                run.degenerate_rounds.push(t);
                w.clone()
            } else {
                lmo(&setup.domain, &g)?
            };
            let gamma = 1.0 / t as f64;
            w = w.scale(1.0 - gamma).axpy(gamma, &v);
            vs.push(v);
            run.iterates.push(w.clone());
            run.alphas.push(1.0);
        }
        run.aux.push(("vertex".into(), vs));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        run.component_gradient_calls = setup.problem.component_grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Uniform,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::LazyFtl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::BestResponse,
        })
    }
}

/// Boundary variant for possibly nonsmooth objectives over strongly convex
/// sets: z_t is the leader of the past subgradients' linear losses, so every
/// gradient is computed on the boundary. Tracks L_T, the smallest
/// averaged-subgradient norm, which governs the rate.
#[derive(Debug, Clone, Default)]
pub struct BoundaryFrankWolfe;

impl Optimizer for BoundaryFrankWolfe {
    fn name(&self) -> &'static str {
        "boundary_frank_wolfe"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut cum_grad = Point::zeros(setup.domain.dim());
        let mut w = Point::zeros(setup.domain.dim());
        let mut l_t = f64::INFINITY;
        let mut zs = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let z = if t == 1 {
                setup.init.clone()
            } else {
                lmo(&setup.domain, &cum_grad)?
            };
            let delta = setup.problem.subgrad(&z);
            cum_grad = cum_grad.add(&delta);
            l_t = l_t.min(cum_grad.norm() / t as f64);
            w = if t == 1 {
                z.clone()
            } else {
                w.scale((t - 1) as f64 / t as f64).axpy(1.0 / t as f64, &z)
            };
            zs.push(z);
            run.iterates.push(w.clone());
            run.alphas.push(1.0);
        }
        run.aux.push(("leader".into(), zs));
        run.scalars.push(("min_avg_grad_norm".into(), l_t));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::BestResponse,
            x_strategy: StrategyKind::Ftl {
                init: setup.init.clone(),
            },
        })
    }
}

/// Accelerated projection-free method for smooth objectives over gauge sets:
/// the leader step is regularized by the squared gauge, solved by the
/// boundary LMO plus a scalar clamp.
#[derive(Debug, Clone, Default)]
pub struct GaugeFrankWolfeSmooth {
    /// eta in the regularized leader; defaults to 1/(4L)
    pub eta_override: Option<f64>,
}

impl Optimizer for GaugeFrankWolfeSmooth {
    fn name(&self) -> &'static str {
        "gauge_frank_wolfe"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let gset = GaugeSet::new(setup.domain.clone())?;
        let l = setup.smoothness()?;
        let eta = self.eta_override.unwrap_or(1.0 / (4.0 * l));
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut v = setup.init.clone();
        let mut zeta = Point::zeros(setup.domain.dim());
        let mut zs = Vec::with_capacity(setup.rounds);
        let mut vs = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let beta = 2.0 / (t as f64 + 1.0);
            let z = w.scale(1.0 - beta).axpy(beta, &v);
            let g = setup.problem.grad(&z)?;
            zeta = zeta.axpy(eta * t as f64, &g);
            let (vnew, degenerate) = gauge_reg_argmin(&gset, &zeta, 1.0)?;
            if degenerate {
                run.degenerate_rounds.push(t);
            }
            v = vnew;
            w = w.scale(1.0 - beta).axpy(beta, &v);
            zs.push(z);
            vs.push(v.clone());
            run.iterates.push(w.clone());
            run.alphas.push(t as f64);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), zs));
        run.aux.push(("leader".into(), vs));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let l = setup.smoothness()?;
        let eta = self.eta_override.unwrap_or(1.0 / (4.0 * l));
        Ok(GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Oftl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::Btrl {
                reg: RegSpec::SquaredGauge { coeff: 1.0 },
                eta,
            },
        })
    }
}

/// The linear-rate gauge variant for smooth strongly convex objectives:
/// exponential weights, the shifted objective f - (mu/lambda) gauge^2, and a
/// weight-dependent clamp denominator.
#[derive(Debug, Clone, Default)]
pub struct GaugeFrankWolfeStronglyConvex {
    /// strong-convexity modulus in the gauge geometry; derived from the
    /// problem's l2 modulus by default
    pub mu_override: Option<f64>,
}

impl GaugeFrankWolfeStronglyConvex {
    /// mu in the sense of the gauge-Bregman strong convexity: for an l2 ball
    /// of radius r with lambda = 1/r, V_x(z) = ||z - x||^2/(lambda r^2), so a
    /// mu_l2-strongly-convex f has modulus mu_l2 * lambda * r^2 / 2.
    fn resolve_mu(&self, setup: &RunSetup, gset: &GaugeSet) -> Result<f64> {
        if let Some(m) = self.mu_override {
            return Ok(m);
        }
        let mu_l2 = setup
            .problem
            .strong_convexity()
            .filter(|m| *m > 0.0)
            .ok_or_else(|| Error::OracleUnavailable("strong convexity required".into()))?;
        let r = match &gset.base {
            crate::geometry::Domain::L2Ball { radius, .. } => *radius,
            _ => {
                return Err(Error::OracleUnavailable(
                    "default mu needs an l2-ball gauge set".into(),
                ))
            }
        };
        Ok(mu_l2 * gset.lambda * r * r / 2.0)
    }

    pub fn schedule(&self, setup: &RunSetup) -> Result<(f64, WeightSchedule, f64)> {
        let gset = GaugeSet::new(setup.domain.clone())?;
        let l = setup.smoothness()?;
        let l_phi = gset
            .gauge_sq_smoothness()
            .ok_or_else(|| Error::OracleUnavailable("gauge smoothness unknown".into()))?;
        let mu = self.resolve_mu(setup, &gset)?;
        let lambda = gset.lambda;
        let beta = 0.5 * (mu / (l * (1.0 + l_phi / lambda))).sqrt();
        let alpha1 = 1.0 / (2.0 * l * (1.0 + l_phi / lambda));
        Ok((mu, WeightSchedule::ExpRatio { alpha1, beta }, beta))
    }
}

impl Optimizer for GaugeFrankWolfeStronglyConvex {
    fn name(&self) -> &'static str {
        "gauge_frank_wolfe_sc"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let gset = GaugeSet::new(setup.domain.clone())?;
        let (mu, schedule, _beta) = self.schedule(setup)?;
        let lambda = gset.lambda;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut v = setup.init.clone();
        let mut zeta = Point::zeros(setup.domain.dim());
        let mut seq = schedule.sequence();
        let mut cum_prev = 0.0;
        let mut anchors = Vec::with_capacity(setup.rounds);
        let mut leaders = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let (alpha, cum) = seq.next_weight()?;
            // exact mixing ratio alpha_t/A_t (the boxed constant from t >= 2)
            let z = w.scale(cum_prev / cum).axpy(alpha / cum, &v);
            let g_shift = setup
                .problem
                .grad(&z)?
                .axpy(-mu / lambda, &gset.gauge_sq_grad(&z));
            zeta = zeta.axpy(alpha, &g_shift);
            let scale = (1.0 / mu + cum) * (mu / lambda);
            let (vnew, degenerate) = gauge_reg_argmin(&gset, &zeta, scale)?;
            if degenerate {
                run.degenerate_rounds.push(t);
            }
            v = vnew;
            w = w.scale(cum_prev / cum).axpy(alpha / cum, &v);
            cum_prev = cum;
            anchors.push(z);
            leaders.push(v.clone());
            run.iterates.push(w.clone());
            run.alphas.push(alpha);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), anchors));
        run.aux.push(("leader".into(), leaders));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let gset = GaugeSet::new(setup.domain.clone())?;
        let (mu, schedule, _) = self.schedule(setup)?;
        let lambda = gset.lambda;
        Ok(GameSpec {
            payoff: Payoff::GaugeShift {
                coeff: mu / lambda,
                gset,
            },
            order: Order::YFirst,
            weights: schedule,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Oftl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::Btrl {
                reg: RegSpec::SquaredGauge {
                    coeff: 1.0 / lambda,
                },
                eta: 1.0,
            },
        })
    }
}
