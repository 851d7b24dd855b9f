//! Leader strategies: follow-the-leader, be-the-leader, the adaptive-weight
//! variant, and the lazy finite-sum variant.

use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::point::Point;

use super::{leader_solve, Action, Aggregate, History, Learner, LearnerCtx, Mode, Regularizer};

/// FTL: play the minimizer of the cumulative weighted loss seen so far; the
/// first action is the configured initial one. On Fenchel y-losses this is
/// the gradient at the weighted average of the opponent's iterates.
pub struct FollowTheLeader {
    ctx: LearnerCtx,
    init: Action,
    history: History,
}

impl FollowTheLeader {
    pub fn new(ctx: LearnerCtx, init: Action) -> Self {
        FollowTheLeader {
            ctx,
            init,
            history: History::default(),
        }
    }
}

impl Learner for FollowTheLeader {
    fn name(&self) -> &'static str {
        "ftl"
    }

    fn mode(&self) -> Mode {
        Mode::Standard
    }

    fn act(&mut self, _t: usize, _alpha: f64) -> Result<Action> {
        if self.history.count == 0 {
            return Ok(self.init.clone());
        }
        leader_solve(
            &self.ctx,
            &Aggregate {
                history: &self.history,
                extra: None,
            },
            &Regularizer::Zero,
            1.0,
        )
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.history.push(alpha, loss)
    }
}

/// BTL: like FTL but the cumulative loss includes the current round.
pub struct BeTheLeader {
    ctx: LearnerCtx,
    history: History,
}

impl BeTheLeader {
    pub fn new(ctx: LearnerCtx) -> Self {
        BeTheLeader {
            ctx,
            history: History::default(),
        }
    }
}

impl Learner for BeTheLeader {
    fn name(&self) -> &'static str {
        "btl"
    }

    fn mode(&self) -> Mode {
        Mode::Prescient
    }

    fn act_prescient(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<Action> {
        leader_solve(
            &self.ctx,
            &Aggregate {
                history: &self.history,
                extra: Some((alpha, loss)),
            },
            &Regularizer::Zero,
            1.0,
        )
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.history.push(alpha, loss)
    }

    fn needs_weight_at_act(&self) -> bool {
        true
    }
}

/// AFTL: follow-the-leader whose round weight is chosen adaptively as
/// alpha_t = 1 / ||grad l_t(y_t)||^2 = 1 / ||x_t - x_avg_{t-1}||^2. When the
/// step direction degenerates the dynamic is stationary and stops.
pub struct AdaptiveFollowTheLeader {
    ctx: LearnerCtx,
    /// x_avg_{t-1}; starts at the dynamic's initial point.
    avg: Point,
    cum_weight: f64,
    converged: bool,
    pub degeneracy_tol: f64,
}

impl AdaptiveFollowTheLeader {
    pub fn new(ctx: LearnerCtx, initial_average: Point) -> Self {
        AdaptiveFollowTheLeader {
            ctx,
            avg: initial_average,
            cum_weight: 0.0,
            converged: false,
            degeneracy_tol: 1e-12,
        }
    }

    pub fn current_average(&self) -> &Point {
        &self.avg
    }
}

impl Learner for AdaptiveFollowTheLeader {
    fn name(&self) -> &'static str {
        "aftl"
    }

    fn mode(&self) -> Mode {
        Mode::Standard
    }

    fn act(&mut self, _t: usize, _alpha: f64) -> Result<Action> {
        let g = if self.ctx.problem.is_smooth() {
            self.ctx.problem.grad(&self.avg)?
        } else {
            Ok::<_, Error>(self.ctx.problem.subgrad(&self.avg))?
        };
        Ok(Action {
            point: g,
            witness: Some(self.avg.clone()),
        })
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        let anchor = match loss {
            Loss::FenchelY { anchor } => anchor,
            _ => {
                return Err(Error::Learner(
                    "adaptive FTL is a Fenchel-game strategy".into(),
                ))
            }
        };
        let new_cum = self.cum_weight + alpha;
        self.avg = self
            .avg
            .scale(self.cum_weight / new_cum)
            .axpy(alpha / new_cum, anchor);
        self.cum_weight = new_cum;
        Ok(())
    }

    fn adaptive_weight(&mut self, loss: &Loss) -> Result<Option<f64>> {
        let anchor = match loss {
            Loss::FenchelY { anchor } => anchor,
            _ => {
                return Err(Error::Learner(
                    "adaptive FTL is a Fenchel-game strategy".into(),
                ))
            }
        };
        let step = anchor.dist(&self.avg);
        if step < self.degeneracy_tol {
            self.converged = true;
            return Ok(None);
        }
        Ok(Some(1.0 / (step * step)))
    }

    fn is_adaptive(&self) -> bool {
        true
    }

    fn converged(&self) -> bool {
        self.converged
    }
}

/// Lazy FTL over a finite-sum objective: keeps one cached scaled component
/// gradient per sample, refreshes exactly one (cycling) at the current
/// average each round, and plays the cache sum.
pub struct LazyFollowTheLeader {
    ctx: LearnerCtx,
    caches: Vec<Point>,
    /// round index of each component's last refresh (0 = initialization)
    refresh_round: Vec<usize>,
    /// average at which each component was last refreshed
    refresh_anchor: Vec<Point>,
    cursor: usize,
    avg: Point,
    cum_weight: f64,
}

impl LazyFollowTheLeader {
    pub fn new(ctx: LearnerCtx, w0: Point) -> Result<Self> {
        let n = ctx
            .problem
            .n_components()
            .ok_or_else(|| Error::OracleUnavailable("lazy FTL needs a finite-sum oracle".into()))?;
        if n == 0 {
            return Err(Error::InvalidSpec("finite sum with zero components".into()));
        }
        let mut caches = Vec::with_capacity(n);
        for i in 0..n {
            caches.push(ctx.problem.component_grad(i, &w0)?);
        }
        Ok(LazyFollowTheLeader {
            ctx,
            caches,
            refresh_round: vec![0; n],
            refresh_anchor: vec![w0.clone(); n],
            cursor: 0,
            avg: w0,
            cum_weight: 0.0,
        })
    }

    pub fn cache(&self) -> &[Point] {
        &self.caches
    }

    pub fn refresh_rounds(&self) -> &[usize] {
        &self.refresh_round
    }

    pub fn refresh_anchors(&self) -> &[Point] {
        &self.refresh_anchor
    }

    pub fn current_average(&self) -> &Point {
        &self.avg
    }
}

impl Learner for LazyFollowTheLeader {
    fn name(&self) -> &'static str {
        "lazy_ftl"
    }

    fn mode(&self) -> Mode {
        Mode::Standard
    }

    fn act(&mut self, t: usize, _alpha: f64) -> Result<Action> {
        let i = self.cursor;
        self.caches[i] = self.ctx.problem.component_grad(i, &self.avg)?;
        self.refresh_round[i] = t;
        self.refresh_anchor[i] = self.avg.clone();
        self.cursor = (self.cursor + 1) % self.caches.len();
        let mut sum = Point::zeros(self.avg.dim());
        for g in &self.caches {
            sum = sum.add(g);
        }
        Ok(Action::bare(sum))
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        let anchor = match loss {
            Loss::FenchelY { anchor } => anchor,
            _ => return Err(Error::Learner("lazy FTL is a Fenchel-game strategy".into())),
        };
        let new_cum = self.cum_weight + alpha;
        self.avg = self
            .avg
            .scale(self.cum_weight / new_cum)
            .axpy(alpha / new_cum, anchor);
        self.cum_weight = new_cum;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::problems::Problem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn y_ctx(p: Problem) -> LearnerCtx {
        let dim = p.dim();
        LearnerCtx::new(Arc::new(p), Domain::Unconstrained { dim })
    }

    #[test]
    fn ftl_first_action_is_initial_point() {
        let ctx = y_ctx(Problem::half_sq_norm(2));
        let w0 = Point::from(&[0.3, -0.4]);
        let init = Action {
            point: ctx.problem.grad(&w0).unwrap(),
            witness: Some(w0.clone()),
        };
        let mut ftl = FollowTheLeader::new(ctx, init);
        let a = ftl.act(1, 1.0).unwrap();
        assert!(a.point.dist(&w0) < 1e-15);
    }

    #[test]
    fn ftl_fenchel_plays_gradient_at_average() {
        let ctx = y_ctx(Problem::half_sq_norm(2));
        let mut ftl = FollowTheLeader::new(ctx, Action::bare(Point::zeros(2)));
        ftl.receive(
            1,
            1.0,
            &Loss::FenchelY {
                anchor: Point::from(&[0.2, 0.4]),
            },
        )
        .unwrap();
        let a = ftl.act(2, 2.0).unwrap();
        assert!(a.point.dist(&Point::from(&[0.2, 0.4])) < 1e-15);
        assert!(a.witness.unwrap().dist(&Point::from(&[0.2, 0.4])) < 1e-15);
    }

    #[test]
    fn ftl_generic_quadratic_mean() {
        // l_s(z) = (z - s)^2 for s = 1,2,3: leader at t=4 is their mean
        let ctx = y_ctx(Problem::half_sq_norm(1));
        let mut ftl = FollowTheLeader::new(ctx, Action::bare(Point::zeros(1)));
        for s in 1..=3 {
            ftl.receive(
                s,
                1.0,
                &Loss::Quadratic {
                    diag: vec![2.0],
                    center: Point::from(&[s as f64]),
                },
            )
            .unwrap();
        }
        let a = ftl.act(4, 1.0).unwrap();
        assert!((a.point[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn btl_fenchel_plays_gradient_at_current_average() {
        let ctx = y_ctx(Problem::half_sq_norm(2));
        let mut btl = BeTheLeader::new(ctx);
        btl.receive(
            1,
            1.0,
            &Loss::FenchelY {
                anchor: Point::from(&[2.0, 0.0]),
            },
        )
        .unwrap();
        let a = btl
            .act_prescient(
                2,
                1.0,
                &Loss::FenchelY {
                    anchor: Point::from(&[0.0, 0.0]),
                },
            )
            .unwrap();
        assert!(a.point.dist(&Point::from(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn btl_nonpositive_regret_on_quadratic_sequences() {
        // realized regret <= 0 on random strongly convex sequences
        use crate::loss::{weighted_regret, WeightedLoss};
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let ctx = y_ctx(Problem::half_sq_norm(2));
            let problem = ctx.problem.clone();
            let mut btl = BeTheLeader::new(ctx);
            let mut wls = Vec::new();
            let mut actions = Vec::new();
            for t in 1..=6 {
                let loss = Loss::Quadratic {
                    diag: vec![rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)],
                    center: Point::from(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]),
                };
                let alpha = rng.gen_range(0.5..2.0);
                let a = btl.act_prescient(t, alpha, &loss).unwrap();
                btl.receive(t, alpha, &loss).unwrap();
                actions.push(a.point);
                wls.push(WeightedLoss { alpha, loss });
            }
            // brute-force comparator on a grid
            let mut best = f64::INFINITY;
            let mut best_comp = Point::zeros(2);
            let dom = Domain::Unconstrained { dim: 2 };
            let mut u = -1.5;
            while u <= 1.5 {
                let mut v = -1.5;
                while v <= 1.5 {
                    let c = Point::from(&[u, v]);
                    let val: f64 = wls
                        .iter()
                        .map(|wl| wl.alpha * wl.loss.eval(&problem, &c).unwrap())
                        .sum();
                    if val < best {
                        best = val;
                        best_comp = c;
                    }
                    v += 0.05;
                }
                u += 0.05;
            }
            let reg = weighted_regret(&problem, &wls, &actions, &best_comp, &dom).unwrap();
            assert!(reg <= 1e-9, "BTL regret {reg} > 0");
        }
    }

    #[test]
    fn aftl_weights() {
        let ctx = y_ctx(Problem::half_sq_norm(2));
        let mut aftl = AdaptiveFollowTheLeader::new(ctx, Point::zeros(2));
        let w = aftl
            .adaptive_weight(&Loss::FenchelY {
                anchor: Point::from(&[1.0, 0.0]),
            })
            .unwrap();
        assert_eq!(w, Some(1.0));
        let w = aftl
            .adaptive_weight(&Loss::FenchelY {
                anchor: Point::from(&[0.5, 0.0]),
            })
            .unwrap();
        assert_eq!(w, Some(4.0));
        // degenerate direction flags convergence
        let w = aftl
            .adaptive_weight(&Loss::FenchelY {
                anchor: Point::from(&[1e-13, 0.0]),
            })
            .unwrap();
        assert_eq!(w, None);
        assert!(aftl.converged());
    }

    #[test]
    fn lazy_ftl_single_component_is_ftl_on_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = Problem::finite_sum_quadratic(2, 1, 1.0, &mut rng);
        let w0 = Point::from(&[0.5, -0.5]);
        let ctx = LearnerCtx::new(Arc::new(p), Domain::Unconstrained { dim: 2 });
        let problem = ctx.problem.clone();
        let mut lazy = LazyFollowTheLeader::new(ctx, w0.clone()).unwrap();
        // round 1: y_1 = grad f(w0)
        let a1 = lazy.act(1, 1.0).unwrap();
        let expect = problem.grad(&w0).unwrap();
        assert!(a1.point.dist(&expect) < 1e-12);
        // after receiving x_1, round 2 refreshes at the new average
        let x1 = Point::from(&[1.0, 1.0]);
        lazy.receive(1, 1.0, &Loss::FenchelY { anchor: x1.clone() })
            .unwrap();
        let a2 = lazy.act(2, 1.0).unwrap();
        let expect = problem.grad(&x1).unwrap();
        assert!(a2.point.dist(&expect) < 1e-12);
    }

    #[test]
    fn lazy_ftl_two_component_cache_matches_hand_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let p = Arc::new(Problem::finite_sum_quadratic(2, 2, 1.0, &mut rng));
        let w0 = Point::from(&[0.4, 0.1]);
        let ctx = LearnerCtx::new(p.clone(), Domain::Unconstrained { dim: 2 });
        let mut lazy = LazyFollowTheLeader::new(ctx, w0.clone()).unwrap();

        // hand simulation with an explicit cache
        let mut cache = vec![
            p.component_grad(0, &w0).unwrap(),
            p.component_grad(1, &w0).unwrap(),
        ];
        let mut avg = w0.clone();
        let mut cum = 0.0;
        let xs = [
            Point::from(&[1.0, 0.0]),
            Point::from(&[0.0, 1.0]),
            Point::from(&[-1.0, 0.5]),
            Point::from(&[0.2, 0.2]),
        ];
        for (t, x) in xs.iter().enumerate() {
            let t = t + 1;
            let i = (t - 1) % 2;
            cache[i] = p.component_grad(i, &avg).unwrap();
            let expect = cache[0].add(&cache[1]);
            let got = lazy.act(t, 1.0).unwrap();
            assert!(got.point.dist(&expect) < 1e-12, "round {t}");
            lazy.receive(t, 1.0, &Loss::FenchelY { anchor: x.clone() })
                .unwrap();
            let new_cum = cum + 1.0;
            avg = avg.scale(cum / new_cum).axpy(1.0 / new_cum, x);
            cum = new_cum;
        }
    }

    #[test]
    fn lazy_ftl_staleness_bound() {
        // ||y_t - grad f(avg_t)|| <= sum over components of the per-component
        // smoothness times the average drift since that component's refresh
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 3;
        let p = Arc::new(Problem::finite_sum_quadratic(2, n, 1.0, &mut rng));
        let w0 = Point::from(&[0.9, -0.3]);
        let ctx = LearnerCtx::new(p.clone(), Domain::Unconstrained { dim: 2 });
        let mut lazy = LazyFollowTheLeader::new(ctx, w0.clone()).unwrap();
        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        use rand::Rng;
        for t in 1..=12 {
            let y = lazy.act(t, 1.0).unwrap().point;
            let avg = lazy.current_average().clone();
            let full = p.grad(&avg).unwrap();
            let mut bound = 0.0;
            for i in 0..n {
                // cache error per component: gradient drift since its refresh
                let fresh = p.component_grad(i, &avg).unwrap();
                let anchor = lazy.refresh_anchors()[i].clone();
                let stale = p.component_grad(i, &anchor).unwrap();
                bound += stale.dist(&fresh);
            }
            assert!(y.dist(&full) <= bound + 1e-10, "round {t}");
            let x = Point::from(&[rng2.gen_range(-1.0..1.0), rng2.gen_range(-1.0..1.0)]);
            lazy.receive(t, 1.0, &Loss::FenchelY { anchor: x }).unwrap();
        }
    }
}
