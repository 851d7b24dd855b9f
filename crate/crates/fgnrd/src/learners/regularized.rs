//! Regularized and optimistic leader strategies: FTRL, BTRL, OFTL, OFTRL.
//! OFTRL is the master form; the others wire its pieces differently and the
//! specialization identities are covered by tests.

use crate::error::{Error, Result};
use crate::loss::Loss;

use super::{
    leader_solve, Action, Aggregate, HintRule, History, Learner, LearnerCtx, Mode, Regularizer,
};

/// FTRL[R, eta]: minimizer of the cumulative weighted loss plus R/eta.
pub struct FollowTheRegularizedLeader {
    ctx: LearnerCtx,
    reg: Regularizer,
    eta: f64,
    history: History,
}

impl FollowTheRegularizedLeader {
    pub fn new(ctx: LearnerCtx, reg: Regularizer, eta: f64) -> Result<Self> {
        if eta <= 0.0 {
            return Err(Error::InvalidHyperparameter("eta must be > 0".into()));
        }
        Ok(FollowTheRegularizedLeader {
            ctx,
            reg,
            eta,
            history: History::default(),
        })
    }
}

impl Learner for FollowTheRegularizedLeader {
    fn name(&self) -> &'static str {
        "ftrl"
    }

    fn mode(&self) -> Mode {
        Mode::Standard
    }

    fn act(&mut self, _t: usize, _alpha: f64) -> Result<Action> {
        if self.history.count == 0 {
            return Ok(Action::bare(self.reg.argmin(&self.ctx.domain)?));
        }
        leader_solve(
            &self.ctx,
            &Aggregate {
                history: &self.history,
                extra: None,
            },
            &self.reg,
            self.eta,
        )
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.history.push(alpha, loss)
    }
}

/// BTRL[R, eta]: the regularized leader including the current round's loss.
pub struct BeTheRegularizedLeader {
    ctx: LearnerCtx,
    reg: Regularizer,
    eta: f64,
    history: History,
}

impl BeTheRegularizedLeader {
    pub fn new(ctx: LearnerCtx, reg: Regularizer, eta: f64) -> Result<Self> {
        if eta <= 0.0 {
            return Err(Error::InvalidHyperparameter("eta must be > 0".into()));
        }
        Ok(BeTheRegularizedLeader {
            ctx,
            reg,
            eta,
            history: History::default(),
        })
    }

    /// z_0 = argmin R, the comparator anchor in the BTRL regret bound.
    pub fn base_point(&self) -> Result<crate::point::Point> {
        self.reg.argmin(&self.ctx.domain)
    }
}

impl Learner for BeTheRegularizedLeader {
    fn name(&self) -> &'static str {
        "btrl"
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
            &self.reg,
            self.eta,
        )
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.history.push(alpha, loss)
    }

    fn needs_weight_at_act(&self) -> bool {
        true
    }
}

/// OFTL: follow-the-leader biased by a hint for the upcoming loss, weighted by
/// alpha_t. With previous-loss hints in the Fenchel game the action is
/// grad f at (alpha_t x_{t-1} + sum_{s<t} alpha_s x_s) / A_t.
pub struct OptimisticFollowTheLeader {
    ctx: LearnerCtx,
    hint: HintRule,
    /// stands in for l_0; anchors the round-1 hint
    initial_loss: Loss,
    history: History,
    last_action: Option<crate::point::Point>,
}

impl OptimisticFollowTheLeader {
    pub fn new(ctx: LearnerCtx, hint: HintRule, initial_loss: Loss) -> Self {
        OptimisticFollowTheLeader {
            ctx,
            hint,
            initial_loss,
            history: History::default(),
            last_action: None,
        }
    }

    fn hint_loss(&self) -> Result<Option<Loss>> {
        let prev = || {
            self.history
                .last
                .as_ref()
                .map(|(_, l)| l.clone())
                .unwrap_or_else(|| self.initial_loss.clone())
        };
        Ok(match self.hint {
            HintRule::Zero => None,
            HintRule::PreviousLoss => Some(prev()),
            HintRule::PreviousGradient => {
                let loss = prev();
                match (&loss, &self.last_action) {
                    // before any action the hint degenerates to the loss itself
                    (_, None) => Some(loss),
                    (Loss::Linear { .. }, _) | (Loss::Quadratic { .. }, _) => {
                        let at = self.last_action.as_ref().expect("checked");
                        Some(Loss::linear(loss.grad_at(&self.ctx.problem, at)?))
                    }
                    _ => return Err(Error::NoClosedFormLeader),
                }
            }
        })
    }
}

impl Learner for OptimisticFollowTheLeader {
    fn name(&self) -> &'static str {
        "oftl"
    }

    fn mode(&self) -> Mode {
        Mode::Optimistic
    }

    fn act(&mut self, _t: usize, alpha: f64) -> Result<Action> {
        let hint = self.hint_loss()?;
        let action = match &hint {
            Some(h) => leader_solve(
                &self.ctx,
                &Aggregate {
                    history: &self.history,
                    extra: Some((alpha, h)),
                },
                &Regularizer::Zero,
                1.0,
            ),
            None => leader_solve(
                &self.ctx,
                &Aggregate {
                    history: &self.history,
                    extra: None,
                },
                &Regularizer::Zero,
                1.0,
            ),
        }?;
        self.last_action = Some(action.point.clone());
        Ok(action)
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.history.push(alpha, loss)
    }

    fn needs_weight_at_act(&self) -> bool {
        true
    }
}

/// OFTRL[R, eta]: the master strategy; hint plus cumulative loss plus R/eta.
pub struct OptimisticFtrl {
    ctx: LearnerCtx,
    hint: HintRule,
    initial_loss: Option<Loss>,
    reg: Regularizer,
    eta: f64,
    history: History,
    last_action: Option<crate::point::Point>,
}

impl OptimisticFtrl {
    pub fn new(
        ctx: LearnerCtx,
        hint: HintRule,
        initial_loss: Option<Loss>,
        reg: Regularizer,
        eta: f64,
    ) -> Result<Self> {
        if eta <= 0.0 {
            return Err(Error::InvalidHyperparameter("eta must be > 0".into()));
        }
        Ok(OptimisticFtrl {
            ctx,
            hint,
            initial_loss,
            reg,
            eta,
            history: History::default(),
            last_action: None,
        })
    }
}

impl Learner for OptimisticFtrl {
    fn name(&self) -> &'static str {
        "oftrl"
    }

    fn mode(&self) -> Mode {
        Mode::Optimistic
    }

    fn act(&mut self, _t: usize, alpha: f64) -> Result<Action> {
        let prev = self
            .history
            .last
            .as_ref()
            .map(|(_, l)| l.clone())
            .or_else(|| self.initial_loss.clone());
        let hint = match self.hint {
            HintRule::Zero => None,
            HintRule::PreviousLoss => prev,
            HintRule::PreviousGradient => match (prev, &self.last_action) {
                (None, _) => None,
                (Some(l), None) => Some(l),
                (Some(l @ Loss::Linear { .. }), _) => Some(l),
                (Some(l), Some(at)) => Some(Loss::linear(l.grad_at(&self.ctx.problem, at)?)),
            },
        };
        let action = match &hint {
            Some(h) => leader_solve(
                &self.ctx,
                &Aggregate {
                    history: &self.history,
                    extra: Some((alpha, h)),
                },
                &self.reg,
                self.eta,
            ),
            None => {
                if self.history.count == 0 {
                    return Ok(Action::bare(self.reg.argmin(&self.ctx.domain)?));
                }
                leader_solve(
                    &self.ctx,
                    &Aggregate {
                        history: &self.history,
                        extra: None,
                    },
                    &self.reg,
                    self.eta,
                )
            }
        }?;
        self.last_action = Some(action.point.clone());
        Ok(action)
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.history.push(alpha, loss)
    }

    fn needs_weight_at_act(&self) -> bool {
        true
    }
}
