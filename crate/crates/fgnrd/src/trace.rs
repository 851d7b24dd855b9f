//! Per-round records of a dynamic: both players' actions, weighted averages,
//! losses, and the regret accounting derived from them.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{gauge_reg_argmin, lmo, project, Composite, Domain};
use crate::loss::{Loss, WeightedLoss, XExtras};
use crate::point::Point;
use crate::problems::{Problem, ShiftPhi};
use crate::weights::WeightSchedule;

/// Weighted average of the first `t` points under a schedule.
pub fn weighted_average(points: &[Point], weights: &WeightSchedule, t: usize) -> Result<Point> {
    if points.is_empty() || t == 0 {
        return Err(Error::NoIterates);
    }
    if points.len() < t {
        return Err(Error::ShapeMismatch(format!(
            "need {t} points, have {}",
            points.len()
        )));
    }
    let mut seq = weights.sequence();
    let mut avg = Point::zeros(points[0].dim());
    let mut cum = 0.0;
    for point in points.iter().take(t) {
        let (alpha, a_t) = seq.next_weight()?;
        // incremental recursion: (A_{t-1} avg + alpha x) / A_t
        avg = avg.scale(cum / a_t).axpy(alpha / a_t, point);
        cum = a_t;
    }
    Ok(avg)
}

/// Same, with explicitly materialized weights (realized adaptive schedules).
pub fn weighted_average_explicit(points: &[Point], alphas: &[f64], t: usize) -> Result<Point> {
    if points.is_empty() || t == 0 {
        return Err(Error::NoIterates);
    }
    if points.len() < t || alphas.len() < t {
        return Err(Error::ShapeMismatch("not enough points or weights".into()));
    }
    let mut avg = Point::zeros(points[0].dim());
    let mut cum = 0.0;
    for (point, &alpha) in points.iter().zip(alphas).take(t) {
        let a_t = cum + alpha;
        avg = avg.scale(cum / a_t).axpy(alpha / a_t, point);
        cum = a_t;
    }
    Ok(avg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Completed,
    /// Stopped early because the first mover signalled a vanishing step.
    Converged {
        round: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Round {
    pub t: usize,
    pub alpha: f64,
    /// A_t, the cumulative weight through this round.
    pub cum_weight: f64,
    pub x: Point,
    pub y: Point,
    pub x_avg: Point,
    pub y_avg: Point,
    /// Primal point p with y = grad f(p), when the y-strategy knows it.
    pub y_witness: Option<Point>,
    /// alpha_t * l_t(y_t); NaN when the conjugate oracle is unavailable.
    pub y_loss: f64,
    /// alpha_t * h_t(x_t); NaN likewise.
    pub x_loss: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub reg_x: Option<f64>,
    pub reg_y: Option<f64>,
    pub avg_reg_x: Option<f64>,
    pub avg_reg_y: Option<f64>,
    /// F(x_avg_t) - F* per round, when the minimum is known.
    pub gap_history: Vec<f64>,
    /// Cumulative weighted regrets through round t against the round-t
    /// hindsight comparators; NaN where the oracles are unavailable.
    pub reg_x_history: Vec<f64>,
    pub reg_y_history: Vec<f64>,
    pub primal_gap: Option<f64>,
}

/// Full record of one dynamic. The problem handle is the y-side problem
/// (already shifted for reformulated payoffs); `extras` describes the
/// x-player's additional loss terms.
#[derive(Debug, Clone)]
pub struct DynamicTrace {
    pub rounds: Vec<Round>,
    pub status: RunStatus,
    pub problem: Arc<Problem>,
    pub domain: Domain,
    pub extras: XExtras,
    pub summary: Option<TraceSummary>,
}

impl DynamicTrace {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn final_x_avg(&self) -> Result<&Point> {
        self.rounds
            .last()
            .map(|r| &r.x_avg)
            .ok_or(Error::NoIterates)
    }

    pub fn final_y_avg(&self) -> Result<&Point> {
        self.rounds
            .last()
            .map(|r| &r.y_avg)
            .ok_or(Error::NoIterates)
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.alpha).collect()
    }

    pub fn x_actions(&self) -> Vec<Point> {
        self.rounds.iter().map(|r| r.x.clone()).collect()
    }

    pub fn y_actions(&self) -> Vec<Point> {
        self.rounds.iter().map(|r| r.y.clone()).collect()
    }

    pub fn x_averages(&self) -> Vec<Point> {
        self.rounds.iter().map(|r| r.x_avg.clone()).collect()
    }

    /// Reconstructs the y-player's weighted losses (anchored at x_t).
    pub fn y_losses(&self) -> Vec<WeightedLoss> {
        self.rounds
            .iter()
            .map(|r| WeightedLoss {
                alpha: r.alpha,
                loss: Loss::FenchelY {
                    anchor: r.x.clone(),
                },
            })
            .collect()
    }

    /// Reconstructs the x-player's weighted losses (anchored at y_t).
    pub fn x_losses(&self) -> Vec<WeightedLoss> {
        self.rounds
            .iter()
            .map(|r| WeightedLoss {
                alpha: r.alpha,
                loss: Loss::FenchelX {
                    anchor: r.y.clone(),
                    extras: self.extras.clone(),
                },
            })
            .collect()
    }

    /// Total weight A_T.
    pub fn total_weight(&self) -> f64 {
        self.rounds.last().map(|r| r.cum_weight).unwrap_or(0.0)
    }

    /// Recomputes x_avg at round t from scratch; the incremental and direct
    /// routes must agree to high precision.
    pub fn recompute_x_avg(&self, t: usize) -> Result<Point> {
        let pts = self.x_actions();
        let alphas = self.alphas();
        weighted_average_explicit(&pts, &alphas, t)
    }
}

/// Exact best-in-hindsight comparators for both players' cumulative losses.
///
/// The y-side cumulative loss sum alpha_t (f*(y) - <x_t, y>) is minimized at
/// y = grad f(x_avg_T) by conjugacy. The x-side cumulative loss is linear
/// (plus any shift term), so the minimizer comes from the LMO or the
/// shift-regularized closed form.
pub fn hindsight_comparators(
    trace: &DynamicTrace,
    problem: &Problem,
    domain: &Domain,
) -> Result<(Point, Point)> {
    let x_avg = trace.final_x_avg()?;
    let y_star = if problem.is_smooth() {
        problem.grad(x_avg)?
    } else {
        problem.subgrad(x_avg)
    };

    // cumulative linear coefficient of the x losses
    let mut zeta = Point::zeros(domain.dim());
    let mut cum_weight = 0.0;
    for r in &trace.rounds {
        zeta = zeta.axpy(r.alpha, &r.y);
        cum_weight += r.alpha;
    }

    let x_star = match (&trace.extras.shift, &trace.extras.composite) {
        (None, None) | (None, Some(Composite::Zero)) => {
            if domain.is_bounded() {
                lmo(domain, &zeta)?
            } else {
                return Err(Error::ComparatorUnavailable);
            }
        }
        (Some((coeff, ShiftPhi::HalfSqNorm)), None) => {
            // argmin <x, zeta> + cum_weight * coeff * (1/2)||x||^2
            let unconstrained = zeta.scale(-1.0 / (cum_weight * coeff));
            match domain {
                Domain::Unconstrained { .. } | Domain::L2Ball { .. } | Domain::Box { .. } => {
                    project(domain, &unconstrained)?
                }
                _ => return Err(Error::ComparatorUnavailable),
            }
        }
        (Some((coeff, ShiftPhi::GaugeSq(gset))), None) => {
            gauge_reg_argmin(gset, &zeta, cum_weight * coeff)?.0
        }
        (None, Some(Composite::L1 { coeff })) => {
            // separable: coordinate i minimized at 0 iff |zeta_i| <= A_T c,
            // otherwise the infimum is -infinity and no comparator exists
            if !matches!(domain, Domain::Unconstrained { .. }) {
                return Err(Error::ComparatorUnavailable);
            }
            let bound = cum_weight * coeff;
            if zeta.iter().any(|&c| c.abs() > bound + 1e-12) {
                return Err(Error::ComparatorUnavailable);
            }
            Point::zeros(domain.dim())
        }
        (None, Some(Composite::SquaredL2 { coeff })) => {
            let unconstrained = zeta.scale(-1.0 / (cum_weight * coeff));
            project(domain, &unconstrained)?
        }
        _ => return Err(Error::ComparatorUnavailable),
    };
    Ok((x_star, y_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::weighted_regret;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weighted_average_examples() {
        let pts = vec![Point::from(&[1.0, 1.0]), Point::from(&[-1.0, -1.0])];
        let avg = weighted_average(&pts, &WeightSchedule::Linear, 2).unwrap();
        assert!(avg.dist(&Point::from(&[-1.0 / 3.0, -1.0 / 3.0])) < 1e-15);

        let one = vec![Point::from(&[0.4, 0.7])];
        let avg = weighted_average(
            &one,
            &WeightSchedule::ExpRatio {
                alpha1: 2.0,
                beta: 0.5,
            },
            1,
        )
        .unwrap();
        assert!(avg.dist(&one[0]) < 1e-15);

        let pts = vec![
            Point::from(&[1.0, 0.0]),
            Point::from(&[0.0, 1.0]),
            Point::from(&[1.0, 1.0]),
        ];
        let avg = weighted_average(&pts, &WeightSchedule::Uniform, 3).unwrap();
        assert!(avg.dist(&Point::from(&[2.0 / 3.0, 2.0 / 3.0])) < 1e-15);

        assert!(matches!(
            weighted_average(&[], &WeightSchedule::Uniform, 1),
            Err(Error::NoIterates)
        ));
    }

    #[test]
    fn incremental_average_matches_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts: Vec<Point> = (0..60)
            .map(|_| Point::from(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
            .collect();
        for schedule in [
            WeightSchedule::Uniform,
            WeightSchedule::Linear,
            WeightSchedule::ExpRatio {
                alpha1: 0.3,
                beta: 0.2,
            },
        ] {
            for t in 1..=60 {
                let inc = weighted_average(&pts, &schedule, t).unwrap();
                // from-scratch: sum alpha_s x_s / A_t
                let mut seq = schedule.sequence();
                let mut num = Point::zeros(2);
                let mut den = 0.0;
                for point in pts.iter().take(t) {
                    let (a, c) = seq.next_weight().unwrap();
                    num = num.axpy(a, point);
                    den = c;
                }
                let scratch = num.scale(1.0 / den);
                let rel = inc.dist(&scratch) / scratch.norm().max(1.0);
                assert!(rel < 1e-12, "t={t}: {rel}");
            }
        }
    }

    #[test]
    fn hindsight_regret_dominates_sampled_comparators() {
        // regret vs the hindsight comparator >= regret vs 100 random feasible points
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let problem = Arc::new(Problem::half_sq_norm(2));
        let domain = Domain::symmetric_box(2, 1.0);
        let rounds: Vec<Round> = (1..=6)
            .map(|t| {
                let x = Point::from(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                let y = Point::from(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                Round {
                    t,
                    alpha: 1.0,
                    cum_weight: t as f64,
                    x: x.clone(),
                    y: y.clone(),
                    x_avg: x.clone(),
                    y_avg: y.clone(),
                    y_witness: None,
                    y_loss: f64::NAN,
                    x_loss: f64::NAN,
                }
            })
            .collect();
        let trace = DynamicTrace {
            rounds,
            status: RunStatus::Completed,
            problem: problem.clone(),
            domain: domain.clone(),
            extras: XExtras::none(),
            summary: None,
        };
        let (x_star, _) = hindsight_comparators(&trace, &problem, &domain).unwrap();
        let losses = trace.x_losses();
        let actions = trace.x_actions();
        let best = weighted_regret(&problem, &losses, &actions, &x_star, &domain).unwrap();
        for _ in 0..100 {
            let cand = Point::from(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let reg = weighted_regret(&problem, &losses, &actions, &cand, &domain).unwrap();
            assert!(best >= reg - 1e-12);
        }
    }

    #[test]
    fn hindsight_y_comparator_is_gradient_at_average() {
        // f quadratic: y* = A x_avg - b, checked against a dense line search
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let problem = Arc::new(Problem::quadratic_random(2, 1.0, 4.0, &mut rng));
        let domain = Domain::Unconstrained { dim: 2 };
        let xs: Vec<Point> = (0..4)
            .map(|_| Point::from(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
            .collect();
        let rounds: Vec<Round> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| Round {
                t: i + 1,
                alpha: 1.0,
                cum_weight: (i + 1) as f64,
                x: x.clone(),
                y: Point::zeros(2),
                x_avg: weighted_average(&xs, &WeightSchedule::Uniform, i + 1).unwrap(),
                y_avg: Point::zeros(2),
                y_witness: None,
                y_loss: f64::NAN,
                x_loss: f64::NAN,
            })
            .collect();
        let trace = DynamicTrace {
            rounds,
            status: RunStatus::Completed,
            problem: problem.clone(),
            domain: domain.clone(),
            extras: XExtras::none(),
            summary: None,
        };
        // x-comparator unavailable on an unbounded plain game, y* still exact
        assert!(matches!(
            hindsight_comparators(&trace, &problem, &domain),
            Err(Error::ComparatorUnavailable)
        ));
        let y_star = problem.grad(trace.final_x_avg().unwrap()).unwrap();
        // line search cross-check: cumulative y loss at y* beats all probes
        let cum = |y: &Point| -> f64 {
            trace
                .y_losses()
                .iter()
                .map(|wl| wl.alpha * wl.loss.eval(&problem, y).unwrap())
                .sum()
        };
        let base = cum(&y_star);
        for dim in 0..2 {
            let mut t = -0.3;
            while t <= 0.3 {
                let mut c = y_star.coords().to_vec();
                c[dim] += t;
                assert!(cum(&Point::from(&c)) >= base - 1e-10);
                t += 1e-3;
            }
        }
    }

    #[test]
    fn trivial_hindsight_cases() {
        // f = (1/2)||x||^2 with x_avg = (0.5, 0) gives y* = (0.5, 0);
        // constant y = (1,1) over the sup-norm box gives x* = (-1,-1)
        let problem = Arc::new(Problem::half_sq_norm(2));
        let domain = Domain::symmetric_box(2, 1.0);
        let x_avg = Point::from(&[0.5, 0.0]);
        let rounds = vec![Round {
            t: 1,
            alpha: 1.0,
            cum_weight: 1.0,
            x: x_avg.clone(),
            y: Point::from(&[1.0, 1.0]),
            x_avg: x_avg.clone(),
            y_avg: Point::from(&[1.0, 1.0]),
            y_witness: None,
            y_loss: f64::NAN,
            x_loss: f64::NAN,
        }];
        let trace = DynamicTrace {
            rounds,
            status: RunStatus::Completed,
            problem: problem.clone(),
            domain: domain.clone(),
            extras: XExtras::none(),
            summary: None,
        };
        let (x_star, y_star) = hindsight_comparators(&trace, &problem, &domain).unwrap();
        assert!(y_star.dist(&Point::from(&[0.5, 0.0])) < 1e-15);
        assert!(x_star.dist(&Point::from(&[-1.0, -1.0])) < 1e-15);
    }
}

#[cfg(test)]
mod comparator_error_tests {
    use super::*;
    use crate::geometry::Composite;

    #[test]
    fn composite_losses_without_minimizer_oracle_report_unavailable() {
        let problem = Arc::new(Problem::half_sq_norm(2));
        // a composite x-loss over a bounded set has no closed-form leader
        let extras = XExtras {
            composite: Some(Composite::L1 { coeff: 0.1 }),
            shift: None,
        };
        let r = Round {
            t: 1,
            alpha: 1.0,
            cum_weight: 1.0,
            x: Point::zeros(2),
            y: Point::from(&[1.0, 0.0]),
            x_avg: Point::zeros(2),
            y_avg: Point::from(&[1.0, 0.0]),
            y_witness: None,
            y_loss: f64::NAN,
            x_loss: f64::NAN,
        };
        let domain = Domain::symmetric_box(2, 1.0);
        let trace = DynamicTrace {
            rounds: vec![r],
            status: RunStatus::Completed,
            problem: problem.clone(),
            domain: domain.clone(),
            extras,
            summary: None,
        };
        assert!(matches!(
            hindsight_comparators(&trace, &problem, &domain),
            Err(Error::ComparatorUnavailable)
        ));
        // the l1 composite over an unconstrained domain is unbounded below
        // once the linear pull exceeds the threshold
        let free = Domain::Unconstrained { dim: 2 };
        let mut unbounded = trace.clone();
        unbounded.domain = free.clone();
        unbounded.rounds[0].y = Point::from(&[5.0, 0.0]);
        assert!(matches!(
            hindsight_comparators(&unbounded, &problem, &free),
            Err(Error::ComparatorUnavailable)
        ));
    }
}
