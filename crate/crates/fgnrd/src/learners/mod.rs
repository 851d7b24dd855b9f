//! Weighted online-learning strategies. Each strategy implements the common
//! [`Learner`] trait and is selected by name at runtime; batch-style leaders
//! share one closed-form aggregate solver.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    bregman_step, gauge_reg_argmin, lmo, project, DistanceGenerator, Domain, GaugeSet,
};
use crate::loss::Loss;
use crate::point::Point;
use crate::problems::{Problem, ShiftPhi};

mod best_response;
mod leaders;
mod mirror;
mod regularized;

pub use best_response::BestResponse;
pub use leaders::{AdaptiveFollowTheLeader, BeTheLeader, FollowTheLeader, LazyFollowTheLeader};
pub use mirror::{MirrorDescent, OnlineMirrorDescent, OptimisticMirrorDescent};
pub use regularized::{
    BeTheRegularizedLeader, FollowTheRegularizedLeader, OptimisticFollowTheLeader, OptimisticFtrl,
};

/// When a strategy is allowed to see the round's loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Acts before seeing the round's loss.
    Standard,
    /// Sees (alpha_t, l_t) before acting; only valid for the second mover.
    Prescient,
    /// Acts on a hint m_t approximating the upcoming loss.
    Optimistic,
}

/// How an optimistic strategy forms its hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HintRule {
    /// m_t = l_{t-1}; the round-1 hint comes from the configured initial loss.
    PreviousLoss,
    /// m_t = <grad l_{t-1}(z_{t-1}), .>, the previous loss linearized at the
    /// previous action. Matches PreviousLoss on linear histories.
    PreviousGradient,
    /// m_t = 0 (degenerates to the non-optimistic variant).
    Zero,
}

/// A strategy's emitted point, plus the primal witness for dual actions
/// (the point p with y = grad f(p)) when the strategy knows it.
#[derive(Debug, Clone)]
pub struct Action {
    pub point: Point,
    pub witness: Option<Point>,
}

impl Action {
    pub fn bare(point: Point) -> Self {
        Action {
            point,
            witness: None,
        }
    }
}

/// Shared context handed to every learner: the problem whose oracles Fenchel
/// losses refer to (already shifted for reformulated payoffs) and the
/// learner's decision set.
#[derive(Clone)]
pub struct LearnerCtx {
    pub problem: Arc<Problem>,
    pub domain: Domain,
}

impl LearnerCtx {
    pub fn new(problem: Arc<Problem>, domain: Domain) -> Self {
        LearnerCtx { problem, domain }
    }

    fn grad_or_subgrad(&self, x: &Point) -> Result<Point> {
        if self.problem.is_smooth() {
            self.problem.grad(x)
        } else {
            Ok(self.problem.subgrad(x))
        }
    }
}

/// Uniform receive/act interface of Protocol-style weighted online learning.
///
/// The driver calls exactly one of `act` / `act_prescient` per round
/// (depending on the strategy's mode), then `receive` with the same round's
/// weighted loss.
pub trait Learner {
    fn name(&self) -> &'static str;
    fn mode(&self) -> Mode;

    /// Standard/Optimistic action. `alpha` is the round weight, known in
    /// advance for non-adaptive schedules; strategies that do not need it
    /// must tolerate NaN (adaptive schedules).
    fn act(&mut self, t: usize, alpha: f64) -> Result<Action> {
        let _ = (t, alpha);
        Err(Error::Learner(format!(
            "{} is prescient and must see the loss first",
            self.name()
        )))
    }

    /// Prescient action: sees the current round's loss before committing.
    fn act_prescient(&mut self, t: usize, alpha: f64, loss: &Loss) -> Result<Action> {
        let _ = (t, alpha, loss);
        Err(Error::Learner(format!(
            "{} does not take prescient actions",
            self.name()
        )))
    }

    /// Observes the round's weighted loss; called once per round after acting.
    fn receive(&mut self, t: usize, alpha: f64, loss: &Loss) -> Result<()>;

    /// True when the action depends on the round weight (adaptive schedules
    /// cannot supply it at act time).
    fn needs_weight_at_act(&self) -> bool {
        false
    }

    /// Adaptive schedules: the realized weight for this round, reported after
    /// seeing the induced loss. `Ok(None)` from an adaptive strategy means the
    /// step degenerated and the dynamic should stop as converged.
    fn adaptive_weight(&mut self, loss: &Loss) -> Result<Option<f64>> {
        let _ = loss;
        Err(Error::Learner(format!(
            "{} does not produce adaptive weights",
            self.name()
        )))
    }

    fn is_adaptive(&self) -> bool {
        false
    }

    fn converged(&self) -> bool {
        false
    }
}

/// Regularization terms with closed-form leaders.
#[derive(Debug, Clone)]
pub enum Regularizer {
    Zero,
    /// (1/2)||x||^2
    SquaredL2,
    /// coeff * gauge^2(x)
    SquaredGauge {
        gset: GaugeSet,
        coeff: f64,
    },
    /// negative entropy over the simplex
    Entropy,
}

impl Regularizer {
    /// argmin of R over the domain; the starting action of regularized leaders.
    pub fn argmin(&self, domain: &Domain) -> Result<Point> {
        match self {
            Regularizer::Zero => Err(Error::NoClosedFormLeader),
            Regularizer::SquaredL2 => project(domain, &Point::zeros(domain.dim())),
            Regularizer::SquaredGauge { .. } => Ok(Point::zeros(domain.dim())),
            Regularizer::Entropy => match domain {
                Domain::Simplex { dim } => Ok(Point::from(&vec![1.0 / *dim as f64; *dim])),
                _ => Err(Error::NoClosedFormLeader),
            },
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        match self {
            Regularizer::Zero => Ok(0.0),
            Regularizer::SquaredL2 => Ok(0.5 * x.norm_sq()),
            Regularizer::SquaredGauge { gset, coeff } => Ok(coeff * gset.gauge_sq(x)),
            Regularizer::Entropy => {
                if x.iter().any(|&c| c < 0.0) {
                    return Err(Error::EntropyDomain);
                }
                Ok(x.iter()
                    .map(|&c| if c > 0.0 { c * c.ln() } else { 0.0 })
                    .sum())
            }
        }
    }
}

/// Running aggregate of a homogeneous weighted loss history.
#[derive(Debug, Clone, Default)]
pub(crate) struct History {
    pub count: usize,
    pub cum_weight: f64,
    /// Weighted average of Fenchel anchors (the opponent's actions).
    pub anchor_avg: Option<Point>,
    /// Cumulative linear coefficient: sum of alpha * (linear gradient).
    pub lin_sum: Option<Point>,
    /// Cumulative shift coefficient: sum of alpha * shift coeff.
    pub shift_sum: f64,
    pub shift_phi: Option<ShiftPhi>,
    /// Cumulative diagonal quadratic: sum alpha*diag and sum alpha*diag*center.
    pub quad_diag: Option<Vec<f64>>,
    pub quad_lin: Option<Point>,
    /// Most recent (alpha, loss).
    pub last: Option<(f64, Loss)>,
}

impl History {
    pub fn push(&mut self, alpha: f64, loss: &Loss) -> Result<()> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidHyperparameter(format!(
                "round weight {alpha}"
            )));
        }
        let new_cum = self.cum_weight + alpha;
        match loss {
            Loss::FenchelY { anchor } => {
                let avg = match &self.anchor_avg {
                    Some(a) => a
                        .scale(self.cum_weight / new_cum)
                        .axpy(alpha / new_cum, anchor),
                    None => anchor.clone(),
                };
                self.anchor_avg = Some(avg);
            }
            Loss::FenchelX { anchor, extras } => {
                let sum = match &self.lin_sum {
                    Some(s) => s.axpy(alpha, anchor),
                    None => anchor.scale(alpha),
                };
                self.lin_sum = Some(sum);
                if let Some((coeff, phi)) = &extras.shift {
                    self.shift_sum += alpha * coeff;
                    self.shift_phi = Some(phi.clone());
                }
                if extras.composite.is_some() {
                    return Err(Error::NoClosedFormLeader);
                }
            }
            Loss::Linear { grad } => {
                let sum = match &self.lin_sum {
                    Some(s) => s.axpy(alpha, grad),
                    None => grad.scale(alpha),
                };
                self.lin_sum = Some(sum);
            }
            Loss::Quadratic { diag, center } => {
                let d = match self.quad_diag.take() {
                    Some(mut acc) => {
                        for (a, b) in acc.iter_mut().zip(diag) {
                            *a += alpha * b;
                        }
                        acc
                    }
                    None => diag.iter().map(|b| alpha * b).collect(),
                };
                let lin_add = Point::new(
                    diag.iter()
                        .zip(center.iter())
                        .map(|(d, c)| alpha * d * c)
                        .collect(),
                )?;
                let l = match &self.quad_lin {
                    Some(s) => s.add(&lin_add),
                    None => lin_add,
                };
                self.quad_diag = Some(d);
                self.quad_lin = Some(l);
            }
        }
        self.count += 1;
        self.cum_weight = new_cum;
        self.last = Some((alpha, loss.clone()));
        Ok(())
    }
}

/// Aggregate of cumulative losses (+ optional extra weighted loss for
/// prescient/optimistic variants) handed to the closed-form leader solver.
pub(crate) struct Aggregate<'a> {
    pub history: &'a History,
    /// (alpha, loss) to add on top of the history: the current loss for
    /// be-the-leader variants, the hint for optimistic ones.
    pub extra: Option<(f64, &'a Loss)>,
}

impl Aggregate<'_> {
    fn total_weight(&self) -> f64 {
        self.history.cum_weight + self.extra.map(|(a, _)| a).unwrap_or(0.0)
    }
}

/// Solves argmin over the domain of the aggregated weighted losses plus
/// R(x)/eta, in the closed-form cases the artifact supports:
/// Fenchel y-losses (gradient at the weighted anchor average), linear losses
/// (LMO / regularized closed forms), and diagonal quadratics.
pub(crate) fn leader_solve(
    ctx: &LearnerCtx,
    agg: &Aggregate<'_>,
    reg: &Regularizer,
    eta: f64,
) -> Result<Action> {
    let hist = agg.history;

    // Fenchel y-side: cumulative loss sum alpha (f*(y) - <x_s, y>) minimized
    // at grad f of the weighted anchor average; regularizers have no closed
    // form on this side.
    let fenchel_y =
        hist.anchor_avg.is_some() || matches!(agg.extra, Some((_, Loss::FenchelY { .. })));
    if fenchel_y {
        if !matches!(reg, Regularizer::Zero) {
            return Err(Error::NoClosedFormLeader);
        }
        let avg = match (agg_fenchel_anchor(agg)?, &hist.anchor_avg) {
            (Some((alpha, anchor)), Some(avg)) => {
                let total = hist.cum_weight + alpha;
                avg.scale(hist.cum_weight / total)
                    .axpy(alpha / total, anchor)
            }
            (Some((_, anchor)), None) => anchor.clone(),
            (None, Some(avg)) => avg.clone(),
            (None, None) => return Err(Error::NoIterates),
        };
        let g = ctx.grad_or_subgrad(&avg)?;
        return Ok(Action {
            point: g,
            witness: Some(avg),
        });
    }

    // Diagonal quadratic aggregates.
    if hist.quad_diag.is_some() || matches!(agg.extra, Some((_, Loss::Quadratic { .. }))) {
        let mut diag = hist.quad_diag.clone().unwrap_or_default();
        let mut lin = hist.quad_lin.clone();
        match agg.extra {
            Some((alpha, Loss::Quadratic { diag: d2, center })) => {
                if diag.is_empty() {
                    diag = vec![0.0; d2.len()];
                }
                for (a, b) in diag.iter_mut().zip(d2) {
                    *a += alpha * b;
                }
                let add = Point::new(
                    d2.iter()
                        .zip(center.iter())
                        .map(|(d, c)| alpha * d * c)
                        .collect(),
                )?;
                lin = Some(match lin {
                    Some(s) => s.add(&add),
                    None => add,
                });
            }
            // a linear hint on top of a quadratic history shifts the target
            Some((alpha, Loss::Linear { grad })) => {
                lin = Some(match lin {
                    Some(s) => s.axpy(-alpha, grad),
                    None => grad.scale(-alpha),
                });
            }
            None => {}
            Some(_) => return Err(Error::Learner("mixed loss kinds in one history".into())),
        }
        let lin = lin.ok_or(Error::NoIterates)?;
        let ridge = match reg {
            Regularizer::Zero => 0.0,
            Regularizer::SquaredL2 => 1.0 / eta,
            _ => return Err(Error::NoClosedFormLeader),
        };
        let coords: Vec<f64> = lin
            .iter()
            .zip(&diag)
            .map(|(l, d)| {
                let denom = d + ridge;
                if denom <= 0.0 {
                    f64::NAN
                } else {
                    l / denom
                }
            })
            .collect();
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Learner(
                "unbounded cumulative quadratic minimum".into(),
            ));
        }
        let x = Point::new(coords)?;
        return match &ctx.domain {
            Domain::Unconstrained { .. } | Domain::Box { .. } => {
                Ok(Action::bare(project(&ctx.domain, &x)?))
            }
            _ => Err(Error::NoClosedFormLeader),
        };
    }

    // Linear aggregates (generic linear losses and Fenchel x-losses).
    let mut zeta = hist
        .lin_sum
        .clone()
        .unwrap_or_else(|| Point::zeros(ctx.domain.dim()));
    let mut shift_sum = hist.shift_sum;
    let mut shift_phi = hist.shift_phi.clone();
    match agg.extra {
        Some((alpha, Loss::Linear { grad })) => {
            zeta = zeta.axpy(alpha, grad);
        }
        Some((alpha, Loss::FenchelX { anchor, extras })) => {
            zeta = zeta.axpy(alpha, anchor);
            if let Some((coeff, phi)) = &extras.shift {
                shift_sum += alpha * coeff;
                shift_phi = Some(phi.clone());
            }
            if extras.composite.is_some() {
                return Err(Error::NoClosedFormLeader);
            }
        }
        None => {}
        _ => unreachable!("handled above"),
    }
    if agg.total_weight() == 0.0 {
        return Err(Error::NoIterates);
    }

    match (shift_phi, reg) {
        // pure linear + no regularizer: the LMO is the exact leader
        (None, Regularizer::Zero) => {
            if !ctx.domain.is_bounded() {
                return Err(Error::Learner("unbounded cumulative linear minimum".into()));
            }
            Ok(Action::bare(lmo(&ctx.domain, &zeta)?))
        }
        // linear + squared-l2 regularizer: shrink then project
        (None, Regularizer::SquaredL2) => {
            let x = zeta.scale(-eta);
            Ok(Action::bare(project(&ctx.domain, &x)?))
        }
        // linear + squared-gauge regularizer: boundary reparametrization
        (None, Regularizer::SquaredGauge { gset, coeff }) => {
            let (x, _) = gauge_reg_argmin(gset, &zeta, coeff / eta)?;
            Ok(Action::bare(x))
        }
        // linear + entropy over the simplex: softmax
        (None, Regularizer::Entropy) => match &ctx.domain {
            Domain::Simplex { .. } => {
                let m = zeta.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                let unnorm: Vec<f64> = zeta.iter().map(|&c| (-eta * (c - m)).exp()).collect();
                let z: f64 = unnorm.iter().sum();
                Ok(Action::bare(Point::new(
                    unnorm.into_iter().map(|u| u / z).collect(),
                )?))
            }
            _ => Err(Error::NoClosedFormLeader),
        },
        // shifted payoffs: the shift term accumulates into the regularizer
        (Some(ShiftPhi::HalfSqNorm), Regularizer::SquaredL2) => {
            let denom = shift_sum + 1.0 / eta;
            let x = zeta.scale(-1.0 / denom);
            Ok(Action::bare(project(&ctx.domain, &x)?))
        }
        (Some(ShiftPhi::HalfSqNorm), Regularizer::Zero) => {
            if shift_sum <= 0.0 {
                return Err(Error::NoClosedFormLeader);
            }
            let x = zeta.scale(-1.0 / shift_sum);
            Ok(Action::bare(project(&ctx.domain, &x)?))
        }
        (Some(ShiftPhi::GaugeSq(gset)), Regularizer::SquaredGauge { coeff, .. }) => {
            let (x, _) = gauge_reg_argmin(&gset, &zeta, shift_sum + coeff / eta)?;
            Ok(Action::bare(x))
        }
        (Some(ShiftPhi::GaugeSq(gset)), Regularizer::Zero) => {
            if shift_sum <= 0.0 {
                return Err(Error::NoClosedFormLeader);
            }
            let (x, _) = gauge_reg_argmin(&gset, &zeta, shift_sum)?;
            Ok(Action::bare(x))
        }
        _ => Err(Error::NoClosedFormLeader),
    }
}

// small helper: the extra loss's anchor when it is a Fenchel y-loss
fn agg_fenchel_anchor<'a>(agg: &'a Aggregate<'_>) -> Result<Option<(f64, &'a Point)>> {
    match agg.extra {
        Some((alpha, Loss::FenchelY { anchor })) => Ok(Some((alpha, anchor))),
        Some(_) => Err(Error::Learner("mixed loss kinds in one history".into())),
        None => Ok(None),
    }
}

/// Single Bregman/prox step used by the mirror-descent family: argmin over
/// the domain of alpha*(<g, z> [+ psi(z)]) + (1/gamma) V_center(z).
pub(crate) fn mirror_step(
    ctx: &LearnerCtx,
    dgf: &DistanceGenerator,
    center: &Point,
    alpha: f64,
    loss: &Loss,
    gamma: f64,
) -> Result<Point> {
    if gamma <= 0.0 {
        return Err(Error::InvalidHyperparameter("gamma must be > 0".into()));
    }
    match loss {
        Loss::Linear { grad } => bregman_step(dgf, &ctx.domain, center, &grad.scale(alpha), gamma),
        Loss::FenchelX { anchor, extras } => {
            let mut shift_coeff = 0.0;
            if let Some((coeff, phi)) = &extras.shift {
                if !matches!(phi, ShiftPhi::HalfSqNorm) {
                    return Err(Error::NoClosedFormLeader);
                }
                shift_coeff = *coeff;
            }
            match (&extras.composite, dgf) {
                (None, _) if shift_coeff == 0.0 => {
                    bregman_step(dgf, &ctx.domain, center, &anchor.scale(alpha), gamma)
                }
                (None, DistanceGenerator::SquaredL2) => {
                    // argmin alpha gamma (<x,a> + c/2 ||x||^2) + 1/2||x - z||^2
                    let x = center
                        .axpy(-alpha * gamma, anchor)
                        .scale(1.0 / (1.0 + alpha * gamma * shift_coeff));
                    project(&ctx.domain, &x)
                }
                (Some(psi), DistanceGenerator::SquaredL2) if shift_coeff == 0.0 => {
                    if !matches!(ctx.domain, Domain::Unconstrained { .. }) {
                        return Err(Error::NoClosedFormLeader);
                    }
                    crate::geometry::prox(psi, alpha * gamma, &center.axpy(-alpha * gamma, anchor))
                }
                _ => Err(Error::NoClosedFormLeader),
            }
        }
        Loss::Quadratic { diag, center: c } => match dgf {
            DistanceGenerator::SquaredL2 => {
                let coords: Vec<f64> = center
                    .iter()
                    .zip(diag.iter().zip(c.iter()))
                    .map(|(z, (d, ci))| (z + alpha * gamma * d * ci) / (1.0 + alpha * gamma * d))
                    .collect();
                let x = Point::new(coords)?;
                match &ctx.domain {
                    Domain::Unconstrained { .. } | Domain::Box { .. } => project(&ctx.domain, &x),
                    _ => Err(Error::NoClosedFormLeader),
                }
            }
            _ => Err(Error::NoClosedFormLeader),
        },
        Loss::FenchelY { .. } => Err(Error::NoClosedFormLeader),
    }
}
