//! Mirror-descent family: online mirror descent (acts on the previous loss),
//! prescient mirror descent (acts on the current one), and optimistic mirror
//! descent with its half-iterate state.

use crate::error::{Error, Result};
use crate::geometry::{bregman_step, DistanceGenerator};
use crate::loss::Loss;
use crate::point::Point;

use super::{mirror_step, Action, Learner, LearnerCtx, Mode};

/// OMD[phi, z0, gamma]: z_t = argmin alpha_{t-1} l_{t-1}(z) + (1/gamma) V_{z_{t-1}}(z),
/// with the l_0 := 0 convention, so z_1 = z_0.
pub struct OnlineMirrorDescent {
    ctx: LearnerCtx,
    dgf: DistanceGenerator,
    gamma: f64,
    current: Point,
    pending: Option<(f64, Loss)>,
}

impl OnlineMirrorDescent {
    pub fn new(ctx: LearnerCtx, dgf: DistanceGenerator, z0: Point, gamma: f64) -> Result<Self> {
        if gamma <= 0.0 {
            return Err(Error::InvalidHyperparameter("gamma must be > 0".into()));
        }
        Ok(OnlineMirrorDescent {
            ctx,
            dgf,
            gamma,
            current: z0,
            pending: None,
        })
    }

    pub fn first_action(&self) -> &Point {
        &self.current
    }
}

impl Learner for OnlineMirrorDescent {
    fn name(&self) -> &'static str {
        "omd"
    }

    fn mode(&self) -> Mode {
        Mode::Standard
    }

    fn act(&mut self, _t: usize, _alpha: f64) -> Result<Action> {
        if let Some((alpha_prev, loss_prev)) = self.pending.take() {
            self.current = mirror_step(
                &self.ctx,
                &self.dgf,
                &self.current,
                alpha_prev,
                &loss_prev,
                self.gamma,
            )?;
        }
        Ok(Action::bare(self.current.clone()))
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        self.pending = Some((alpha, loss.clone()));
        Ok(())
    }
}

/// MD[phi, z0, gamma]: the prescient variant, z_t = argmin alpha_t l_t(z) +
/// (1/gamma) V_{z_{t-1}}(z). Composite x-losses turn the step into a prox.
pub struct MirrorDescent {
    ctx: LearnerCtx,
    dgf: DistanceGenerator,
    gamma: f64,
    current: Point,
}

impl MirrorDescent {
    pub fn new(ctx: LearnerCtx, dgf: DistanceGenerator, z0: Point, gamma: f64) -> Result<Self> {
        if gamma <= 0.0 {
            return Err(Error::InvalidHyperparameter("gamma must be > 0".into()));
        }
        Ok(MirrorDescent {
            ctx,
            dgf,
            gamma,
            current: z0,
        })
    }
}

impl Learner for MirrorDescent {
    fn name(&self) -> &'static str {
        "md"
    }

    fn mode(&self) -> Mode {
        Mode::Prescient
    }

    fn act_prescient(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<Action> {
        self.current = mirror_step(&self.ctx, &self.dgf, &self.current, alpha, loss, self.gamma)?;
        Ok(Action::bare(self.current.clone()))
    }

    fn receive(&mut self, _t: usize, _alpha: f64, _loss: &Loss) -> Result<()> {
        Ok(())
    }

    fn needs_weight_at_act(&self) -> bool {
        true
    }
}

/// OPTMD[phi, z0, gamma]: two Bregman steps per round, both anchored at the
/// previous half-iterate. The action step uses the hint vector m_t; the
/// half-iterate step uses the realized loss gradient at z_t.
pub struct OptimisticMirrorDescent {
    ctx: LearnerCtx,
    dgf: DistanceGenerator,
    gamma: f64,
    /// z_{t-1/2}; starts at z_0
    half: Point,
    /// m_1, the hint before any loss is seen
    initial_hint: Point,
    prev_grad: Option<Point>,
    last_action: Option<Point>,
}

impl OptimisticMirrorDescent {
    pub fn new(
        ctx: LearnerCtx,
        dgf: DistanceGenerator,
        z0: Point,
        gamma: f64,
        initial_hint: Point,
    ) -> Result<Self> {
        if gamma <= 0.0 {
            return Err(Error::InvalidHyperparameter("gamma must be > 0".into()));
        }
        Ok(OptimisticMirrorDescent {
            ctx,
            dgf,
            gamma,
            half: z0,
            initial_hint,
            prev_grad: None,
            last_action: None,
        })
    }

    pub fn half_iterate(&self) -> &Point {
        &self.half
    }

    pub fn hint(&self) -> Point {
        self.prev_grad
            .clone()
            .unwrap_or_else(|| self.initial_hint.clone())
    }
}

impl Learner for OptimisticMirrorDescent {
    fn name(&self) -> &'static str {
        "optmd"
    }

    fn mode(&self) -> Mode {
        Mode::Optimistic
    }

    fn act(&mut self, _t: usize, alpha: f64) -> Result<Action> {
        let m = self.hint();
        let z = bregman_step(
            &self.dgf,
            &self.ctx.domain,
            &self.half,
            &m.scale(alpha),
            self.gamma,
        )?;
        self.last_action = Some(z.clone());
        Ok(Action::bare(z))
    }

    fn receive(&mut self, _t: usize, alpha: f64, loss: &Loss) -> Result<()> {
        let z_t = self
            .last_action
            .take()
            .ok_or_else(|| Error::Learner("optimistic MD received a loss before acting".into()))?;
        let delta = loss.grad_at(&self.ctx.problem, &z_t)?;
        self.half = bregman_step(
            &self.dgf,
            &self.ctx.domain,
            &self.half,
            &delta.scale(alpha),
            self.gamma,
        )?;
        self.prev_grad = Some(delta);
        Ok(())
    }

    fn needs_weight_at_act(&self) -> bool {
        true
    }
}
