//! Momentum and accelerated methods: unconstrained Nesterov descent, Heavy
//! Ball, the 1-memory and infinite-memory accelerated schemes, the
//! accelerated proximal method, and the accelerated linear-rate scheme.

use crate::dynamics::{GameSpec, Order, Payoff, RegSpec, StrategyKind};
use crate::error::{Error, Result};
use crate::geometry::{bregman_step, project, prox, Composite, DistanceGenerator};
use crate::point::Point;
use crate::trace::RunStatus;
use crate::weights::WeightSchedule;

use super::{Optimizer, OptimizerRun, RunSetup, CONVERGENCE_GAP};

/// Unconstrained accelerated gradient descent in its classical momentum form:
/// theta_t = t/(2(t+1)L), beta_t = (t-2)/(t+1) (negative at t = 1, as boxed).
#[derive(Debug, Clone, Default)]
pub struct NesterovUnconstrained;

impl Optimizer for NesterovUnconstrained {
    fn name(&self) -> &'static str {
        "nesterov_unconstrained"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        if setup.domain.is_bounded() {
            return Err(Error::InvalidSpec("this variant is unconstrained".into()));
        }
        let l = setup.smoothness()?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w_prev = setup.init.clone();
        let mut z = setup.init.clone();
        let mut anchors = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let tf = t as f64;
            let theta = tf / (2.0 * (tf + 1.0) * l);
            let beta = (tf - 2.0) / (tf + 1.0);
            anchors.push(z.clone());
            let g = setup.problem.grad(&z)?;
            let w = z.axpy(-theta, &g);
            z = w.add(&w.sub(&w_prev).scale(beta));
            w_prev = w.clone();
            run.iterates.push(w);
            run.alphas.push(tf);
            if setup
                .gap(&w_prev)
                .map(|g| g < CONVERGENCE_GAP)
                .unwrap_or(false)
            {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), anchors));
        run.output = w_prev;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        // same dynamic family as the 1-memory scheme with the squared-l2 link
        Nesterov1Mem::default().matching_game(setup)
    }
}

/// Heavy Ball: gradient step plus momentum on the previous displacement. The
/// constrained variant averages projected inner steps.
#[derive(Debug, Clone, Default)]
pub struct HeavyBall {
    /// base step scale; defaults to 1/(8L)
    pub gamma_override: Option<f64>,
}

impl HeavyBall {
    fn gamma(&self, setup: &RunSetup) -> Result<f64> {
        match self.gamma_override {
            Some(g) => Ok(g),
            None => Ok(1.0 / (8.0 * setup.smoothness()?)),
        }
    }
}

impl Optimizer for HeavyBall {
    fn name(&self) -> &'static str {
        "heavy_ball"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let gamma = self.gamma(setup)?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        if setup.domain.is_bounded() {
            // w_t = (1 - 2/(t+1)) w_{t-1} + (2/(t+1)) x_t,
            // x_t = Proj[x_{t-1} - gamma t grad f(w_{t-1})]
            let mut x = setup.init.clone();
            let mut w = setup.init.clone();
            let mut inner = Vec::with_capacity(setup.rounds);
            for t in 1..=setup.rounds {
                let tf = t as f64;
                let g = setup.problem.grad(&w)?;
                x = project(&setup.domain, &x.axpy(-gamma * tf, &g))?;
                let beta = 2.0 / (tf + 1.0);
                w = w.scale(1.0 - beta).axpy(beta, &x);
                inner.push(x.clone());
                run.iterates.push(w.clone());
                run.alphas.push(tf);
                if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                    run.status = RunStatus::Converged { round: t };
                    break;
                }
            }
            run.aux.push(("inner".into(), inner));
            run.output = w;
        } else {
            // eta_t = 2 gamma t/(t+1) (= t/(4(t+1)L) at the default step),
            // v_t = w_{t-1} - w_{t-2}
            let mut w_prevprev = setup.init.clone();
            let mut w_prev = setup.init.clone();
            let mut anchors = Vec::with_capacity(setup.rounds);
            for t in 1..=setup.rounds {
                let tf = t as f64;
                let eta = 2.0 * gamma * tf / (tf + 1.0);
                let beta = (tf - 2.0) / (tf + 1.0);
                anchors.push(w_prev.clone());
                let g = setup.problem.grad(&w_prev)?;
                let v = w_prev.sub(&w_prevprev);
                let w = w_prev.axpy(-eta, &g).axpy(beta, &v);
                w_prevprev = w_prev;
                w_prev = w.clone();
                run.iterates.push(w);
                run.alphas.push(tf);
                if setup
                    .gap(&w_prev)
                    .map(|g| g < CONVERGENCE_GAP)
                    .unwrap_or(false)
                {
                    run.status = RunStatus::Converged { round: t };
                    break;
                }
            }
            run.aux.push(("anchor".into(), anchors));
            run.output = w_prev;
        }
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let gamma = self.gamma(setup)?;
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
            x_strategy: StrategyKind::Md {
                dgf: DistanceGenerator::SquaredL2,
                gamma,
                init: setup.init.clone(),
            },
        })
    }
}

/// Nesterov's 1-memory method: extrapolate, take one Bregman step against the
/// gradient at the extrapolation, and average.
#[derive(Debug, Clone, Default)]
pub struct Nesterov1Mem {
    /// defaults to 1/(4L); the per-round step is gamma_t = t * gamma
    pub gamma_override: Option<f64>,
    pub dgf: Option<DistanceGenerator>,
}

impl Nesterov1Mem {
    fn gamma(&self, setup: &RunSetup) -> Result<f64> {
        match self.gamma_override {
            Some(g) => Ok(g),
            None => Ok(1.0 / (4.0 * setup.smoothness()?)),
        }
    }
}

impl Optimizer for Nesterov1Mem {
    fn name(&self) -> &'static str {
        "nesterov_1mem"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let gamma = self.gamma(setup)?;
        let dgf = self.dgf.unwrap_or(DistanceGenerator::SquaredL2);
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut v = setup.init.clone();
        let mut anchors = Vec::with_capacity(setup.rounds);
        let mut vs = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let tf = t as f64;
            let beta = 2.0 / (tf + 1.0);
            let z = w.scale(1.0 - beta).axpy(beta, &v);
            let g = setup.problem.grad(&z)?;
            v = bregman_step(&dgf, &setup.domain, &v, &g, gamma * tf)?;
            w = w.scale(1.0 - beta).axpy(beta, &v);
            anchors.push(z);
            vs.push(v.clone());
            run.iterates.push(w.clone());
            run.alphas.push(tf);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), anchors));
        run.aux.push(("leader".into(), vs));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let gamma = self.gamma(setup)?;
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
            x_strategy: StrategyKind::Md {
                dgf: self.dgf.unwrap_or(DistanceGenerator::SquaredL2),
                gamma,
                init: setup.init.clone(),
            },
        })
    }
}

/// Nesterov's infinite-memory method: the inner point minimizes the full
/// weighted history of linearizations plus a 1-strongly-convex regularizer.
#[derive(Debug, Clone, Default)]
pub struct NesterovInfMem {
    /// defaults to 1/(4L)
    pub eta_override: Option<f64>,
}

impl NesterovInfMem {
    fn eta(&self, setup: &RunSetup) -> Result<f64> {
        match self.eta_override {
            Some(e) => Ok(e),
            None => Ok(1.0 / (4.0 * setup.smoothness()?)),
        }
    }
}

impl Optimizer for NesterovInfMem {
    fn name(&self) -> &'static str {
        "nesterov_infmem"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let eta = self.eta(setup)?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut v = setup.init.clone();
        // zeta = sum_s gamma_s grad f(z_s), gamma_s = eta * s
        let mut zeta = Point::zeros(setup.init.dim());
        let mut anchors = Vec::with_capacity(setup.rounds);
        let mut vs = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let tf = t as f64;
            let beta = 2.0 / (tf + 1.0);
            let z = w.scale(1.0 - beta).axpy(beta, &v);
            let g = setup.problem.grad(&z)?;
            zeta = zeta.axpy(eta * tf, &g);
            // argmin <zeta, x> + (1/2)||x||^2 over the domain
            v = project(&setup.domain, &zeta.scale(-1.0))?;
            w = w.scale(1.0 - beta).axpy(beta, &v);
            anchors.push(z);
            vs.push(v.clone());
            run.iterates.push(w.clone());
            run.alphas.push(tf);
            if setup.gap(&w).map(|g| g < CONVERGENCE_GAP).unwrap_or(false) {
                run.status = RunStatus::Converged { round: t };
                break;
            }
        }
        run.aux.push(("anchor".into(), anchors));
        run.aux.push(("leader".into(), vs));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let eta = self.eta(setup)?;
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
                reg: RegSpec::SquaredL2,
                eta,
            },
        })
    }
}

/// Accelerated proximal method for composite objectives f + psi:
/// v_t = prox_{t gamma psi}(v_{t-1} - t gamma grad f(z_t)).
#[derive(Debug, Clone, Default)]
pub struct AcceleratedProximal {
    /// defaults to 1/(4L)
    pub gamma_override: Option<f64>,
}

impl AcceleratedProximal {
    fn gamma(&self, setup: &RunSetup) -> Result<f64> {
        match self.gamma_override {
            Some(g) => Ok(g),
            None => Ok(1.0 / (4.0 * setup.smoothness()?)),
        }
    }
}

impl Optimizer for AcceleratedProximal {
    fn name(&self) -> &'static str {
        "accelerated_proximal"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        if setup.domain.is_bounded() {
            return Err(Error::InvalidSpec(
                "the proximal variant is unconstrained".into(),
            ));
        }
        let psi = setup.composite.unwrap_or(Composite::Zero);
        let gamma = self.gamma(setup)?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut v = setup.init.clone();
        let mut anchors = Vec::with_capacity(setup.rounds);
        let mut leaders = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let tf = t as f64;
            let beta = 2.0 / (tf + 1.0);
            let z = w.scale(1.0 - beta).axpy(beta, &v);
            let g = setup.problem.grad(&z)?;
            v = prox(&psi, tf * gamma, &v.axpy(-tf * gamma, &g))?;
            w = w.scale(1.0 - beta).axpy(beta, &v);
            anchors.push(z);
            leaders.push(v.clone());
            run.iterates.push(w.clone());
            run.alphas.push(tf);
        }
        run.aux.push(("anchor".into(), anchors));
        run.aux.push(("leader".into(), leaders));
        run.output = w;
        run.gradient_calls = setup.problem.grad_call_count();
        Ok(run)
    }

    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec> {
        let psi = setup.composite.unwrap_or(Composite::Zero);
        let gamma = self.gamma(setup)?;
        Ok(GameSpec {
            payoff: Payoff::Composite(psi),
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Oftl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::Md {
                dgf: DistanceGenerator::SquaredL2,
                gamma,
                init: setup.init.clone(),
            },
        })
    }
}

/// Accelerated gradient with a linear rate for smooth strongly convex
/// objectives: exponentially growing weights against the shifted objective
/// f~ = f - mu (1/2)||.||^2, with the accumulated quadratic solved in closed
/// form.
#[derive(Debug, Clone, Default)]
pub struct AcceleratedLinear {
    /// strong convexity used by the reformulation; defaults to the problem's
    pub mu_override: Option<f64>,
}

impl AcceleratedLinear {
    /// smoothness constant of the distance generator phi = (1/2)||.||^2
    const L_PHI: f64 = 1.0;

    pub fn schedule(&self, setup: &RunSetup) -> Result<(f64, WeightSchedule, f64)> {
        let l = setup.smoothness()?;
        let mu = match self.mu_override {
            Some(m) => m,
            None => setup
                .problem
                .strong_convexity()
                .filter(|m| *m > 0.0)
                .ok_or_else(|| Error::OracleUnavailable("strong convexity required".into()))?,
        };
        let beta = 0.5 * (mu / (l * (1.0 + Self::L_PHI))).sqrt();
        let alpha1 = 1.0 / (2.0 * l * (1.0 + Self::L_PHI));
        Ok((mu, WeightSchedule::ExpRatio { alpha1, beta }, beta))
    }
}

impl Optimizer for AcceleratedLinear {
    fn name(&self) -> &'static str {
        "accelerated_linear"
    }

    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun> {
        setup.check()?;
        let (mu, schedule, _beta) = self.schedule(setup)?;
        setup.problem.reset_counters();
        let mut run = OptimizerRun::new(self.name());
        let mut w = setup.init.clone();
        let mut v = setup.init.clone();
        let mut zeta = Point::zeros(setup.init.dim());
        let mut seq = schedule.sequence();
        let mut cum_prev = 0.0;
        let mut anchors = Vec::with_capacity(setup.rounds);
        let mut leaders = Vec::with_capacity(setup.rounds);
        for t in 1..=setup.rounds {
            let (alpha, cum) = seq.next_weight()?;
            // the boxed constant beta equals alpha_t/A_t only from t = 2 on;
            // the averaging identity needs the exact ratio, which is 1 at t=1
            let z = w.scale(cum_prev / cum).axpy(alpha / cum, &v);
            // grad of the shifted objective f~ = f - mu phi
            let g = setup.problem.grad(&z)?.axpy(-mu, &z);
            zeta = zeta.axpy(alpha, &g);
            // argmin <zeta, x> + (1 + mu A_t) phi(x)
            v = project(&setup.domain, &zeta.scale(-1.0 / (1.0 + mu * cum)))?;
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
        let (mu, schedule, _) = self.schedule(setup)?;
        Ok(GameSpec {
            payoff: Payoff::StronglyConvexShift { mu },
            order: Order::YFirst,
            weights: schedule,
            rounds: setup.rounds,
            problem: setup.problem.clone(),
            domain: setup.domain.clone(),
            y_strategy: StrategyKind::Oftl {
                init: setup.init.clone(),
            },
            x_strategy: StrategyKind::Btrl {
                reg: RegSpec::SquaredL2,
                eta: 1.0,
            },
        })
    }
}



#[cfg(test)]
mod heavy_ball_rate_tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::problems::Problem;
    use std::sync::Arc;

    #[test]
    fn projected_heavy_ball_rate_is_inverse_in_rounds() {
        // constrained momentum claim: gap * T stays bounded by a constant of
        // the order L * diam^2. (The unconstrained counterpart is untested on
        // purpose: its trajectory terms need not cancel.)
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let dim = 6;
        let eigs = crate::linalg::log_spaced_eigs(dim, 0.05, 1.0);
        let a = crate::linalg::spd_with_spectrum(&eigs, &mut rng);
        use rand::Rng;
        let dir = Point::from(
            &(0..dim)
                .map(|_| rng.gen_range(0.3..1.0))
                .collect::<Vec<_>>(),
        );
        // keep the minimizer inside the box so the known minimum applies
        let x_star = dir.scale(0.5 / dir.norm_inf());
        let b = a.matvec(&x_star);
        let problem = Arc::new(Problem::quadratic(a, b, 1.0, 0.05).unwrap());
        let f_star = problem.known_min().unwrap().1;
        let boxd = Domain::symmetric_box(dim, 1.0);
        let l = problem.smoothness().unwrap();
        let diam_sq = boxd.diameter_sq().unwrap();
        let setup = RunSetup::new(problem.clone(), boxd, Point::from(&vec![-1.0; dim]), 2048);
        let run = HeavyBall::default().run(&setup).unwrap();
        let mut t = 16usize;
        while t <= run.rounds() {
            let gap = problem.value(&run.iterates[t - 1]) - f_star;
            let ratio = gap * t as f64 / (l * diam_sq);
            assert!(ratio <= 8.0, "T={t}: normalized ratio {ratio}");
            t *= 2;
        }
    }
}
