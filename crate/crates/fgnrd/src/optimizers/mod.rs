//! Direct iterative-form implementations of the derived first-order methods,
//! independent of the game driver so iterate equivalence can be tested rather
//! than assumed. Each algorithm sits behind the [`Optimizer`] trait and is
//! selected by name from the registry.

use std::sync::Arc;

use crate::dynamics::GameSpec;
use crate::error::{Error, Result};
use crate::geometry::{Composite, Domain};
use crate::point::Point;
use crate::problems::Problem;
use crate::trace::RunStatus;

mod accelerated;
mod frank_wolfe;
mod gradient;

pub use accelerated::{
    AcceleratedLinear, AcceleratedProximal, HeavyBall, Nesterov1Mem, NesterovInfMem,
    NesterovUnconstrained,
};
pub use frank_wolfe::{
    AdaptiveFrankWolfe, BoundaryFrankWolfe, FrankWolfe, GaugeFrankWolfeSmooth,
    GaugeFrankWolfeStronglyConvex, IncrementalFrankWolfe,
};
pub use gradient::{CumulativeGd, GdAveraging, OptimisticMdAveraging, SingleCallExtraGradient};

/// Primal gap below which a run stops early as converged.
pub const CONVERGENCE_GAP: f64 = 1e-14;

/// Step directions shorter than this are treated as degenerate: the previous
/// iterate is kept and the round is flagged.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Inputs shared by every run: the objective, the constraint set, the initial
/// point, and the round budget. The composite term only applies to proximal
/// methods.
#[derive(Clone)]
pub struct RunSetup {
    pub problem: Arc<Problem>,
    pub domain: Domain,
    pub init: Point,
    pub rounds: usize,
    pub composite: Option<Composite>,
}

impl RunSetup {
    pub fn new(problem: Arc<Problem>, domain: Domain, init: Point, rounds: usize) -> Self {
        RunSetup {
            problem,
            domain,
            init,
            rounds,
            composite: None,
        }
    }

    pub fn with_composite(mut self, psi: Composite) -> Self {
        self.composite = Some(psi);
        self
    }

    pub(crate) fn smoothness(&self) -> Result<f64> {
        self.problem
            .smoothness()
            .ok_or_else(|| Error::OracleUnavailable("smoothness constant required".into()))
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidSpec("rounds must be >= 1".into()));
        }
        if self.init.dim() != self.domain.dim() || self.problem.dim() != self.domain.dim() {
            return Err(Error::InvalidSpec("dimension mismatch".into()));
        }
        if !self.domain.contains(&self.init) {
            return Err(Error::OutsideSet("initial point outside the domain".into()));
        }
        Ok(())
    }

    /// Primal objective including the composite term.
    pub fn objective(&self, x: &Point) -> f64 {
        self.problem.value(x) + self.composite.as_ref().map(|c| c.value(x)).unwrap_or(0.0)
    }

    /// Gap vs the known minimum, when available and feasible.
    pub(crate) fn gap(&self, x: &Point) -> Option<f64> {
        if self.composite.is_some() {
            return None;
        }
        let (x_star, f_star) = self.problem.known_min()?;
        if !self.domain.contains(x_star) {
            return None;
        }
        Some(self.problem.value(x) - f_star)
    }
}

/// The record of one optimizer run. `iterates[t-1]` is the round-t point the
/// algorithm would output if stopped there (the averaged iterate for
/// averaging methods), which is also the sequence compared against the game's
/// weighted averages.
#[derive(Debug, Clone)]
pub struct OptimizerRun {
    pub algorithm: String,
    pub iterates: Vec<Point>,
    /// named auxiliary sequences (inner iterates, dual anchors, ...)
    pub aux: Vec<(String, Vec<Point>)>,
    pub alphas: Vec<f64>,
    pub output: Point,
    pub status: RunStatus,
    pub gradient_calls: usize,
    pub component_gradient_calls: usize,
    /// named scalar diagnostics (e.g. the smallest averaged-gradient norm)
    pub scalars: Vec<(String, f64)>,
    pub degenerate_rounds: Vec<usize>,
}

impl OptimizerRun {
    pub(crate) fn new(algorithm: &str) -> Self {
        OptimizerRun {
            algorithm: algorithm.into(),
            iterates: Vec::new(),
            aux: Vec::new(),
            alphas: Vec::new(),
            output: Point::zeros(1),
            status: RunStatus::Completed,
            gradient_calls: 0,
            component_gradient_calls: 0,
            scalars: Vec::new(),
            degenerate_rounds: Vec::new(),
        }
    }

    pub fn aux_series(&self, name: &str) -> Option<&[Point]> {
        self.aux
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn rounds(&self) -> usize {
        self.iterates.len()
    }
}

/// A first-order method in its boxed iterative form.
pub trait Optimizer {
    fn name(&self) -> &'static str;
    fn run(&self, setup: &RunSetup) -> Result<OptimizerRun>;
    /// The no-regret dynamic this method is equivalent to.
    fn matching_game(&self, setup: &RunSetup) -> Result<GameSpec>;
}

/// Builds an optimizer by registry name. Hyperparameters not provided fall
/// back to each algorithm's defaults.
pub fn build(name: &str, params: &HyperParams) -> Result<Box<dyn Optimizer>> {
    Ok(match name {
        "frank_wolfe" => Box::new(FrankWolfe),
        "adaptive_frank_wolfe" => Box::new(AdaptiveFrankWolfe::default()),
        "incremental_frank_wolfe" => Box::new(IncrementalFrankWolfe),
        "boundary_frank_wolfe" => Box::new(BoundaryFrankWolfe),
        "gauge_frank_wolfe" => Box::new(GaugeFrankWolfeSmooth {
            eta_override: params.eta,
        }),
        "gauge_frank_wolfe_sc" => Box::new(GaugeFrankWolfeStronglyConvex {
            mu_override: params.mu,
        }),
        "gd_averaging" => Box::new(GdAveraging {
            smooth_mode: params.smooth,
            eta_override: params.eta,
            radius_override: params.radius,
        }),
        "extragradient" => Box::new(SingleCallExtraGradient {
            gamma_override: params.gamma,
            ..Default::default()
        }),
        "cumulative_gd" => Box::new(CumulativeGd {
            eta_override: params.eta,
            radius_override: params.radius,
        }),
        "nesterov_unconstrained" => Box::new(NesterovUnconstrained),
        "heavy_ball" => Box::new(HeavyBall {
            gamma_override: params.gamma,
        }),
        "nesterov_1mem" => Box::new(Nesterov1Mem {
            gamma_override: params.gamma,
            dgf: None,
        }),
        "nesterov_infmem" => Box::new(NesterovInfMem {
            eta_override: params.eta,
        }),
        "accelerated_proximal" => Box::new(AcceleratedProximal {
            gamma_override: params.gamma,
        }),
        "accelerated_linear" => Box::new(AcceleratedLinear {
            mu_override: params.mu,
        }),
        "optimistic_md_averaging" => Box::new(OptimisticMdAveraging {
            gamma_override: params.gamma,
            ..Default::default()
        }),
        other => return Err(Error::UnknownAlgorithm(other.into())),
    })
}

pub fn names() -> &'static [&'static str] {
    &[
        "frank_wolfe",
        "adaptive_frank_wolfe",
        "incremental_frank_wolfe",
        "boundary_frank_wolfe",
        "gauge_frank_wolfe",
        "gauge_frank_wolfe_sc",
        "gd_averaging",
        "extragradient",
        "cumulative_gd",
        "nesterov_unconstrained",
        "heavy_ball",
        "nesterov_1mem",
        "nesterov_infmem",
        "accelerated_proximal",
        "accelerated_linear",
        "optimistic_md_averaging",
    ]
}

/// Optional hyperparameter overrides, as parsed from configs.
#[derive(Debug, Clone, Default)]
pub struct HyperParams {
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub mu: Option<f64>,
    pub smooth: Option<bool>,
    pub radius: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::Problem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_knows_every_name() {
        let params = HyperParams::default();
        for name in names() {
            assert!(build(name, &params).is_ok(), "{name}");
        }
        assert!(matches!(
            build("gradient_teleport", &params),
            Err(Error::UnknownAlgorithm(_))
        ));
    }

    #[test]
    fn constrained_methods_stay_feasible_and_respect_gradient_budgets() {
        let dim = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let problem = Arc::new(Problem::quadratic_random(dim, 1.0, 10.0, &mut rng));
        let ball = Domain::L2Ball { radius: 0.5, dim };
        let w0 = Point::from(&[0.3, -0.2, 0.1, 0.05]);
        let rounds = 40;
        let setup = RunSetup::new(problem, ball.clone(), w0, rounds);
        let params = HyperParams::default();
        for name in [
            "frank_wolfe",
            "adaptive_frank_wolfe",
            "gauge_frank_wolfe",
            "gauge_frank_wolfe_sc",
            "boundary_frank_wolfe",
            "gd_averaging",
            "heavy_ball",
            "nesterov_1mem",
            "nesterov_infmem",
            "accelerated_linear",
            "optimistic_md_averaging",
        ] {
            let opt = build(name, &params).unwrap();
            let run = opt.run(&setup).unwrap_or_else(|e| panic!("{name}: {e}"));
            for (t, w) in run.iterates.iter().enumerate() {
                assert!(
                    ball.contains(w),
                    "{name}: infeasible iterate at round {}",
                    t + 1
                );
            }
            // the projection-free family spends exactly one full gradient per
            // round (plus the one that detects a degenerate converged step)
            if name.contains("frank_wolfe") && name != "boundary_frank_wolfe" {
                match run.status {
                    crate::trace::RunStatus::Completed => {
                        assert_eq!(run.gradient_calls, run.rounds(), "{name}")
                    }
                    crate::trace::RunStatus::Converged { .. } => {
                        assert!(run.gradient_calls <= run.rounds() + 1, "{name}")
                    }
                }
            }
        }
    }
}
