//! Structured loss descriptors. Losses are passed to learners as data, never
//! as opaque closures, so leaders can use their gradient-at-average closed
//! forms and equivalence tests stay exact.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Composite;
use crate::point::Point;
use crate::problems::{Problem, ShiftPhi};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    YPlayer,
    XPlayer,
}

/// Extra terms a game payoff adds to the x-player's per-round loss.
#[derive(Debug, Clone)]
pub struct XExtras {
    /// composite term psi(x), from payoffs of the form <x,y> - f*(y) + psi(x)
    pub composite: Option<Composite>,
    /// strongly-convex term coeff * phi(x)
    pub shift: Option<(f64, ShiftPhi)>,
}

impl XExtras {
    pub fn none() -> Self {
        XExtras {
            composite: None,
            shift: None,
        }
    }

    pub fn value(&self, x: &Point) -> f64 {
        let mut v = 0.0;
        if let Some(c) = &self.composite {
            v += c.value(x);
        }
        if let Some((coeff, phi)) = &self.shift {
            v += coeff * phi.value(x);
        }
        v
    }
}

/// One round's loss, before weighting by alpha_t.
#[derive(Debug, Clone)]
pub enum Loss {
    /// y-player loss in the Fenchel game: f*(y) - <anchor, y>, where `anchor`
    /// is the opponent's action x_t and f is the (possibly shifted) problem.
    FenchelY { anchor: Point },
    /// x-player loss: <x, anchor> - f*(anchor) + extras, where `anchor` = y_t.
    FenchelX { anchor: Point, extras: XExtras },
    /// Generic linear loss <grad, z>.
    Linear { grad: Point },
    /// Generic diagonal quadratic loss (1/2) sum_i diag_i (z_i - center_i)^2.
    Quadratic { diag: Vec<f64>, center: Point },
}

impl Loss {
    pub fn linear(grad: Point) -> Self {
        Loss::Linear { grad }
    }

    pub fn isotropic_quadratic(scale: f64, center: Point) -> Self {
        Loss::Quadratic {
            diag: vec![scale; center.dim()],
            center,
        }
    }

    pub fn fenchel_x_plain(anchor: Point) -> Self {
        Loss::FenchelX {
            anchor,
            extras: XExtras::none(),
        }
    }

    /// Evaluates the unweighted loss at z. Fenchel losses need the problem's
    /// conjugate oracle; callers that lack it degrade to gap-only reporting.
    pub fn eval(&self, problem: &Problem, z: &Point) -> Result<f64> {
        match self {
            Loss::FenchelY { anchor } => Ok(problem.conjugate_value(z)? - anchor.dot(z)),
            Loss::FenchelX { anchor, extras } => {
                Ok(z.dot(anchor) - problem.conjugate_value(anchor)? + extras.value(z))
            }
            Loss::Linear { grad } => Ok(grad.dot(z)),
            Loss::Quadratic { diag, center } => Ok(0.5
                * diag
                    .iter()
                    .zip(z.iter().zip(center.iter()))
                    .map(|(d, (zi, ci))| d * (zi - ci) * (zi - ci))
                    .sum::<f64>()),
        }
    }

    /// Gradient of the differentiable part at z. For FenchelY this needs the
    /// conjugate gradient unless the caller tracked the primal witness.
    pub fn grad_at(&self, problem: &Problem, z: &Point) -> Result<Point> {
        match self {
            Loss::FenchelY { anchor } => Ok(problem.conjugate_grad(z)?.sub(anchor)),
            Loss::FenchelX { anchor, extras } => {
                let mut g = anchor.clone();
                if let Some((coeff, phi)) = &extras.shift {
                    g = g.axpy(*coeff, &phi.grad(z));
                }
                match &extras.composite {
                    None | Some(Composite::Zero) => Ok(g),
                    Some(Composite::SquaredL2 { coeff }) => Ok(g.axpy(*coeff, z)),
                    // the l1 part is handled by prox steps, not gradients
                    Some(Composite::L1 { .. }) => Err(Error::OracleUnavailable(
                        "composite l1 term has no gradient".into(),
                    )),
                }
            }
            Loss::Linear { grad } => Ok(grad.clone()),
            Loss::Quadratic { diag, center } => Ok(Point::new(
                diag.iter()
                    .zip(z.iter().zip(center.iter()))
                    .map(|(d, (zi, ci))| d * (zi - ci))
                    .collect(),
            )?),
        }
    }

    /// Strong-convexity modulus of the loss, given the game problem.
    /// Fenchel y-losses inherit 1/L from an L-smooth f.
    pub fn strong_convexity(&self, problem: &Problem) -> f64 {
        match self {
            Loss::FenchelY { .. } => problem.smoothness().map(|l| 1.0 / l).unwrap_or(0.0),
            Loss::FenchelX { extras, .. } => {
                let mut mu = 0.0;
                if let Some((coeff, phi)) = &extras.shift {
                    if matches!(phi, ShiftPhi::HalfSqNorm) {
                        mu += coeff;
                    }
                }
                if let Some(Composite::SquaredL2 { coeff }) = &extras.composite {
                    mu += coeff;
                }
                mu
            }
            Loss::Linear { .. } => 0.0,
            Loss::Quadratic { diag, .. } => diag.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Loss::FenchelY { anchor } => anchor.dim(),
            Loss::FenchelX { anchor, .. } => anchor.dim(),
            Loss::Linear { grad } => grad.dim(),
            Loss::Quadratic { center, .. } => center.dim(),
        }
    }
}

/// A weighted loss as received by a learner in one round.
#[derive(Debug, Clone)]
pub struct WeightedLoss {
    pub alpha: f64,
    pub loss: Loss,
}

/// Sum of weighted losses evaluated along a sequence of actions, minus the
/// same sum at a fixed comparator. The comparator must be feasible.
pub fn weighted_regret(
    problem: &Arc<Problem>,
    losses: &[WeightedLoss],
    actions: &[Point],
    comparator: &Point,
    decision_set: &crate::geometry::Domain,
) -> Result<f64> {
    if losses.len() != actions.len() {
        return Err(Error::ShapeMismatch(
            "losses and actions must have equal length".into(),
        ));
    }
    if !decision_set.contains(comparator) {
        return Err(Error::OutsideSet(format!(
            "comparator {comparator} not in decision set"
        )));
    }
    let mut reg = 0.0;
    for (wl, z) in losses.iter().zip(actions) {
        reg += wl.alpha * (wl.loss.eval(problem, z)? - wl.loss.eval(problem, comparator)?);
    }
    Ok(reg)
}
