//! Best response: play the per-round minimizer of the current loss.

use crate::error::{Error, Result};
use crate::geometry::{lmo, project, Domain};
use crate::loss::Loss;
use crate::point::Point;

use super::{Action, Learner, LearnerCtx, Mode};

/// Prescient strategy z_t = argmin of the current loss over the decision set.
/// In the Fenchel game the y-side response is the (sub)gradient at the
/// opponent's action; the x-side response on a linear loss is the LMO output.
pub struct BestResponse {
    ctx: LearnerCtx,
}

impl BestResponse {
    pub fn new(ctx: LearnerCtx) -> Self {
        BestResponse { ctx }
    }
}

impl Learner for BestResponse {
    fn name(&self) -> &'static str {
        "br"
    }

    fn mode(&self) -> Mode {
        Mode::Prescient
    }

    fn act_prescient(&mut self, _t: usize, _alpha: f64, loss: &Loss) -> Result<Action> {
        match loss {
            Loss::FenchelY { anchor } => {
                let g = if self.ctx.problem.is_smooth() {
                    self.ctx.problem.grad(anchor)?
                } else {
                    self.ctx.problem.subgrad(anchor)
                };
                Ok(Action {
                    point: g,
                    witness: Some(anchor.clone()),
                })
            }
            Loss::FenchelX { anchor, extras } => {
                if extras.composite.is_some() || extras.shift.is_some() {
                    return Err(Error::NoClosedFormLeader);
                }
                if !self.ctx.domain.is_bounded() {
                    if anchor.norm() > 0.0 {
                        return Err(Error::LmoUnbounded);
                    }
                    return Ok(Action::bare(Point::zeros(anchor.dim())));
                }
                Ok(Action::bare(lmo(&self.ctx.domain, anchor)?))
            }
            Loss::Linear { grad } => Ok(Action::bare(lmo(&self.ctx.domain, grad)?)),
            Loss::Quadratic { center, .. } => match &self.ctx.domain {
                Domain::Unconstrained { .. } | Domain::Box { .. } | Domain::L2Ball { .. } => {
                    Ok(Action::bare(project(&self.ctx.domain, center)?))
                }
                _ => Err(Error::NoClosedFormLeader),
            },
        }
    }

    fn receive(&mut self, _t: usize, _alpha: f64, _loss: &Loss) -> Result<()> {
        Ok(())
    }
}
