//! Benchmark convex objectives exposing exactly the oracles each algorithm
//! needs: values, (sub)gradients, closed-form conjugates where they exist,
//! smoothness/strong-convexity constants, and known minimizers.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Domain, GaugeSet};
use crate::linalg::{log_spaced_eigs, spd_with_spectrum, Matrix, SpdMatrix};
use crate::point::Point;

/// Tag for the function subtracted off by a strongly-convex-shift reformulation.
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftPhi {
    /// phi(x) = (1/2)||x||^2
    HalfSqNorm,
    /// phi(x) = gauge^2(x) of the given set
    GaugeSq(GaugeSet),
}

impl ShiftPhi {
    pub fn value(&self, x: &Point) -> f64 {
        match self {
            ShiftPhi::HalfSqNorm => 0.5 * x.norm_sq(),
            ShiftPhi::GaugeSq(g) => g.gauge_sq(x),
        }
    }

    pub fn grad(&self, x: &Point) -> Point {
        match self {
            ShiftPhi::HalfSqNorm => x.clone(),
            ShiftPhi::GaugeSq(g) => g.gauge_sq_grad(x),
        }
    }

    /// Hessian of phi as a multiple of the identity, when it is one.
    fn identity_scale(&self) -> Option<f64> {
        match self {
            ShiftPhi::HalfSqNorm => Some(1.0),
            ShiftPhi::GaugeSq(g) => match &g.base {
                Domain::L2Ball { radius, .. } => Some(2.0 / (radius * radius)),
                _ => None,
            },
        }
    }
}

#[derive(Debug)]
enum Kind {
    /// f(x) = (1/2) x^T A x - b^T x + offset
    Quadratic { a: SpdMatrix, b: Point, offset: f64 },
    /// f(x) = tau * log sum_i (exp(x_i/tau) + exp(-x_i/tau)); smooth, L = 1/tau
    SymLogSumExp { dim: usize, temperature: f64 },
    /// f(x) = ||x||_1; nonsmooth, G = sqrt(d)
    AbsSum { dim: usize },
    /// f(x) = (1/n) sum_i [(1/2) x^T A_i x - b_i^T x]; full oracle plus
    /// per-component gradients for incremental methods
    FiniteSumQuadratic {
        comps: Vec<(SpdMatrix, Point)>,
        full_a: SpdMatrix,
        full_b: Point,
    },
    /// f~(x) = base(x) - coeff * phi(x) for non-quadratic combinations
    Shifted {
        base: Box<Problem>,
        coeff: f64,
        phi: ShiftPhi,
    },
}

/// A convex objective with its oracle set. Gradient calls are counted so
/// tests can assert per-round oracle budgets.
#[derive(Debug)]
pub struct Problem {
    name: String,
    kind: Kind,
    smoothness: Option<f64>,
    strong_convexity: Option<f64>,
    known_min: Option<(Point, f64)>,
    grad_calls: AtomicUsize,
    component_grad_calls: AtomicUsize,
}

impl Clone for Problem {
    fn clone(&self) -> Self {
        Problem {
            name: self.name.clone(),
            kind: match &self.kind {
                Kind::Quadratic { a, b, offset } => Kind::Quadratic {
                    a: a.clone(),
                    b: b.clone(),
                    offset: *offset,
                },
                Kind::SymLogSumExp { dim, temperature } => Kind::SymLogSumExp {
                    dim: *dim,
                    temperature: *temperature,
                },
                Kind::AbsSum { dim } => Kind::AbsSum { dim: *dim },
                Kind::FiniteSumQuadratic {
                    comps,
                    full_a,
                    full_b,
                } => Kind::FiniteSumQuadratic {
                    comps: comps.clone(),
                    full_a: full_a.clone(),
                    full_b: full_b.clone(),
                },
                Kind::Shifted { base, coeff, phi } => Kind::Shifted {
                    base: base.clone(),
                    coeff: *coeff,
                    phi: phi.clone(),
                },
            },
            smoothness: self.smoothness,
            strong_convexity: self.strong_convexity,
            known_min: self.known_min.clone(),
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        }
    }
}

impl Problem {
    // ---- constructors -----------------------------------------------------

    /// f(x) = (1/2) x^T A x - b^T x. Constants come from the supplied spectrum bounds.
    pub fn quadratic(a: SpdMatrix, b: Point, l: f64, mu: f64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let known_min = if a.is_positive_definite() {
            let x_star = a.solve(&b)?;
            let f_star = -0.5 * b.dot(&x_star);
            Some((x_star, f_star))
        } else {
            None
        };
        Ok(Problem {
            name: "quadratic".into(),
            kind: Kind::Quadratic { a, b, offset: 0.0 },
            smoothness: Some(l),
            strong_convexity: Some(mu),
            known_min,
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        })
    }

    /// Seeded quadratic with condition number `kappa` and top eigenvalue `l`.
    pub fn quadratic_random(dim: usize, l: f64, kappa: f64, rng: &mut impl Rng) -> Self {
        let eigs = log_spaced_eigs(dim, l / kappa, l);
        let a = spd_with_spectrum(&eigs, rng);
        let b = Point::from(
            &(0..dim)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect::<Vec<_>>(),
        );
        Problem::quadratic(a, b, l, l / kappa).expect("well-formed quadratic")
    }

    /// f(x) = (1/2)||x||^2; self-conjugate.
    pub fn half_sq_norm(dim: usize) -> Self {
        let a = SpdMatrix::new(Matrix::identity(dim)).unwrap();
        let mut p = Problem::quadratic(a, Point::zeros(dim), 1.0, 1.0).unwrap();
        p.name = "half_sq_norm".into();
        p
    }

    /// f(x) = (1/2)||M x - target||^2, folded into quadratic form.
    pub fn least_squares(m: &Matrix, target: &Point) -> Result<Self> {
        let gram = SpdMatrix::new(m.gram())?;
        let b = m.transpose_matvec(target);
        let offset = 0.5 * target.norm_sq();
        let (l, mu) = extremal_eigs(&gram);
        let known_min = if gram.is_positive_definite() {
            let x_star = gram.solve(&b)?;
            let f_star = 0.5 * gram.quadratic_form(&x_star) - b.dot(&x_star) + offset;
            Some((x_star, f_star))
        } else {
            None
        };
        Ok(Problem {
            name: "least_squares".into(),
            kind: Kind::Quadratic { a: gram, b, offset },
            smoothness: Some(l),
            strong_convexity: Some(mu.max(0.0)),
            known_min,
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        })
    }

    /// Smooth symmetric log-sum-exp with minimizer at the origin.
    pub fn sym_log_sum_exp(dim: usize, temperature: f64) -> Self {
        let f_min = temperature * ((2 * dim) as f64).ln();
        Problem {
            name: "logsumexp".into(),
            kind: Kind::SymLogSumExp { dim, temperature },
            smoothness: Some(1.0 / temperature),
            strong_convexity: None,
            known_min: Some((Point::zeros(dim), f_min)),
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        }
    }

    /// f(x) = ||x||_1.
    pub fn abs_sum(dim: usize) -> Self {
        Problem {
            name: "abs_sum".into(),
            kind: Kind::AbsSum { dim },
            smoothness: None,
            strong_convexity: None,
            known_min: Some((Point::zeros(dim), 0.0)),
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        }
    }

    /// Seeded finite-sum quadratic with n components; the full objective is
    /// the component mean.
    pub fn finite_sum_quadratic(dim: usize, n: usize, l: f64, rng: &mut impl Rng) -> Self {
        assert!(n >= 1, "finite sum needs at least one component");
        let mut comps = Vec::with_capacity(n);
        let mut full_a = Matrix::zeros(dim, dim);
        let mut full_b = Point::zeros(dim);
        for _ in 0..n {
            let eigs = log_spaced_eigs(dim, 0.2 * l, l);
            let a = spd_with_spectrum(&eigs, rng);
            let b = Point::from(
                &(0..dim)
                    .map(|_| rng.gen_range(-0.5..0.5))
                    .collect::<Vec<_>>(),
            );
            full_a = full_a.add(a.matrix());
            full_b = full_b.add(&b);
            comps.push((a, b));
        }
        let full_a = SpdMatrix::new(full_a.scale(1.0 / n as f64)).unwrap();
        let full_b = full_b.scale(1.0 / n as f64);
        let (l_full, mu_full) = extremal_eigs(&full_a);
        let known_min = full_a.solve(&full_b).ok().map(|x_star| {
            let f_star = 0.5 * full_a.quadratic_form(&x_star) - full_b.dot(&x_star);
            (x_star, f_star)
        });
        Problem {
            name: "finite_sum_quadratic".into(),
            kind: Kind::FiniteSumQuadratic {
                comps,
                full_a,
                full_b,
            },
            smoothness: Some(l_full),
            strong_convexity: Some(mu_full.max(0.0)),
            known_min,
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        }
    }

    pub fn with_known_min(mut self, x_star: Point, f_star: f64) -> Self {
        self.known_min = Some((x_star, f_star));
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    // ---- oracles ----------------------------------------------------------

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Quadratic { b, .. } => b.dim(),
            Kind::SymLogSumExp { dim, .. } => *dim,
            Kind::AbsSum { dim } => *dim,
            Kind::FiniteSumQuadratic { full_b, .. } => full_b.dim(),
            Kind::Shifted { base, .. } => base.dim(),
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, Kind::AbsSum { .. })
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    pub fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }

    pub fn known_min(&self) -> Option<(&Point, f64)> {
        self.known_min.as_ref().map(|(x, f)| (x, *f))
    }

    pub fn value(&self, x: &Point) -> f64 {
        match &self.kind {
            Kind::Quadratic { a, b, offset } => 0.5 * a.quadratic_form(x) - b.dot(x) + offset,
            Kind::SymLogSumExp { temperature, .. } => {
                let tau = *temperature;
                let m = x.iter().fold(0.0_f64, |acc, &c| acc.max(c.abs())) / tau;
                let s: f64 = x
                    .iter()
                    .map(|&c| (c / tau - m).exp() + (-c / tau - m).exp())
                    .sum();
                tau * (m + s.ln())
            }
            Kind::AbsSum { .. } => x.norm_l1(),
            Kind::FiniteSumQuadratic { full_a, full_b, .. } => {
                0.5 * full_a.quadratic_form(x) - full_b.dot(x)
            }
            Kind::Shifted { base, coeff, phi } => base.value(x) - coeff * phi.value(x),
        }
    }

    /// Gradient of a smooth objective. Counted.
    pub fn grad(&self, x: &Point) -> Result<Point> {
        if !self.is_smooth() {
            return Err(Error::OracleUnavailable(format!(
                "{} is not differentiable",
                self.name
            )));
        }
        self.grad_calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.grad_uncounted(x))
    }

    fn grad_uncounted(&self, x: &Point) -> Point {
        match &self.kind {
            Kind::Quadratic { a, b, .. } => a.matvec(x).sub(b),
            Kind::SymLogSumExp { temperature, .. } => {
                let tau = *temperature;
                let m = x.iter().fold(0.0_f64, |acc, &c| acc.max(c.abs())) / tau;
                let s: f64 = x
                    .iter()
                    .map(|&c| (c / tau - m).exp() + (-c / tau - m).exp())
                    .sum();
                x.map(|c| {
                    let plus = (c / tau - m).exp();
                    let minus = (-c / tau - m).exp();
                    (plus - minus) / s
                })
            }
            Kind::AbsSum { .. } => unreachable!("guarded by is_smooth"),
            Kind::FiniteSumQuadratic { full_a, full_b, .. } => full_a.matvec(x).sub(full_b),
            Kind::Shifted { base, coeff, phi } => {
                base.grad_uncounted(x).axpy(-*coeff, &phi.grad(x))
            }
        }
    }

    /// Deterministic subgradient. For ||x||_1 the kink at 0 maps to 0, which is
    /// a valid subgradient and keeps runs reproducible. Counted.
    pub fn subgrad(&self, x: &Point) -> Point {
        match &self.kind {
            Kind::AbsSum { .. } => {
                self.grad_calls.fetch_add(1, Ordering::Relaxed);
                x.map(|c| {
                    if c > 0.0 {
                        1.0
                    } else if c < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                })
            }
            _ => {
                self.grad_calls.fetch_add(1, Ordering::Relaxed);
                self.grad_uncounted(x)
            }
        }
    }

    /// Closed-form conjugate f*(y). Used for regret accounting only, never
    /// inside optimizer updates.
    pub fn conjugate_value(&self, y: &Point) -> Result<f64> {
        match &self.kind {
            Kind::Quadratic { a, b, offset } => {
                // linear objective (zero quadratic part): the conjugate is the
                // indicator of the single subgradient -b
                if a.is_zero() {
                    return if y.add(b).norm() <= 1e-9 * (1.0 + b.norm()) {
                        Ok(-offset)
                    } else {
                        Ok(f64::INFINITY)
                    };
                }
                let shifted = y.add(b);
                let x_hat = a.solve(&shifted).map_err(|_| {
                    Error::OracleUnavailable("conjugate needs a positive definite matrix".into())
                })?;
                Ok(0.5 * shifted.dot(&x_hat) - offset)
            }
            Kind::AbsSum { .. } => {
                if y.norm_inf() <= 1.0 + 1e-9 {
                    Ok(0.0)
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Kind::FiniteSumQuadratic { full_a, full_b, .. } => {
                let shifted = y.add(full_b);
                let x_hat = full_a.solve(&shifted).map_err(|_| {
                    Error::OracleUnavailable("conjugate needs a positive definite matrix".into())
                })?;
                Ok(0.5 * shifted.dot(&x_hat))
            }
            _ => Err(Error::OracleUnavailable(format!(
                "no closed-form conjugate for {}",
                self.name
            ))),
        }
    }

    /// grad f*(y), i.e. the primal point whose gradient is y.
    pub fn conjugate_grad(&self, y: &Point) -> Result<Point> {
        match &self.kind {
            Kind::Quadratic { a, b, .. } => a.solve(&y.add(b)).map_err(|_| {
                Error::OracleUnavailable(
                    "conjugate gradient needs a positive definite matrix".into(),
                )
            }),
            Kind::FiniteSumQuadratic { full_a, full_b, .. } => {
                full_a.solve(&y.add(full_b)).map_err(|_| {
                    Error::OracleUnavailable(
                        "conjugate gradient needs a positive definite matrix".into(),
                    )
                })
            }
            _ => Err(Error::OracleUnavailable(format!(
                "no closed-form conjugate gradient for {}",
                self.name
            ))),
        }
    }

    pub fn has_conjugate(&self) -> bool {
        matches!(
            &self.kind,
            Kind::Quadratic { a, .. } if a.is_positive_definite() || a.is_zero()
        ) || matches!(&self.kind, Kind::AbsSum { .. })
            || matches!(&self.kind, Kind::FiniteSumQuadratic { full_a, .. } if full_a.is_positive_definite())
    }

    /// Over-estimate of max ||subgrad f|| over a bounded domain. Boxes in low
    /// dimension use exact vertex enumeration (the max of a convex function
    /// over a box sits at a vertex); everything else uses a norm bound.
    pub fn grad_bound(&self, domain: &Domain) -> Option<f64> {
        match &self.kind {
            Kind::AbsSum { dim } => Some((*dim as f64).sqrt()),
            _ => {
                let l = self.smoothness?;
                match domain {
                    Domain::Box { lo, hi } if lo.len() <= 16 => {
                        let d = lo.len();
                        let mut best: f64 = 0.0;
                        for mask in 0..(1usize << d) {
                            let v = Point::from(
                                &(0..d)
                                    .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                                    .collect::<Vec<_>>(),
                            );
                            best = best.max(self.grad_uncounted(&v).norm());
                        }
                        Some(best)
                    }
                    Domain::Box { lo, hi } => {
                        let corner = Point::from(
                            &lo.iter()
                                .zip(hi)
                                .map(|(l, h)| l.abs().max(h.abs()))
                                .collect::<Vec<_>>(),
                        );
                        Some(l * corner.norm() + self.grad_norm_at_origin())
                    }
                    Domain::L2Ball { radius, .. } | Domain::LpBall { radius, .. } => {
                        Some(l * radius + self.grad_norm_at_origin())
                    }
                    Domain::Simplex { .. } => Some(l * 1.0 + self.grad_norm_at_origin()),
                    Domain::Unconstrained { .. } => None,
                }
            }
        }
    }

    fn grad_norm_at_origin(&self) -> f64 {
        if self.is_smooth() {
            self.grad_uncounted(&Point::zeros(self.dim())).norm()
        } else {
            0.0
        }
    }

    // ---- finite-sum oracles -----------------------------------------------

    pub fn n_components(&self) -> Option<usize> {
        match &self.kind {
            Kind::FiniteSumQuadratic { comps, .. } => Some(comps.len()),
            _ => None,
        }
    }

    /// Scaled component gradient (1/n) grad f_i(x), so the components sum to
    /// the full gradient. Counted separately from full gradient calls.
    pub fn component_grad(&self, i: usize, x: &Point) -> Result<Point> {
        match &self.kind {
            Kind::FiniteSumQuadratic { comps, .. } => {
                let n = comps.len();
                let (a, b) = &comps[i];
                self.component_grad_calls.fetch_add(1, Ordering::Relaxed);
                Ok(a.matvec(x).sub(b).scale(1.0 / n as f64))
            }
            _ => Err(Error::OracleUnavailable("not a finite-sum problem".into())),
        }
    }

    // ---- counters ----------------------------------------------------------

    pub fn grad_call_count(&self) -> usize {
        self.grad_calls.load(Ordering::Relaxed)
    }

    pub fn component_grad_call_count(&self) -> usize {
        self.component_grad_calls.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.grad_calls.store(0, Ordering::Relaxed);
        self.component_grad_calls.store(0, Ordering::Relaxed);
    }
}

/// f~ = f - mu * phi, the strongly-convex-shift reformulation. Requires the
/// base problem to carry at least mu of strong convexity in phi's geometry.
/// mu = 0 returns the problem unchanged.
pub fn shifted_problem(p: &Problem, phi: ShiftPhi, mu: f64) -> Result<Problem> {
    if mu < 0.0 {
        return Err(Error::InvalidHyperparameter("shift mu must be >= 0".into()));
    }
    if mu == 0.0 {
        return Ok(p.clone());
    }
    // curvature removed from the quadratic form per unit of l2 identity
    let id_scale = phi.identity_scale();
    if let (Kind::Quadratic { a, b, offset }, Some(s)) = (&p.kind, id_scale) {
        let removed = mu * s;
        let available = p.strong_convexity.unwrap_or(0.0);
        if removed > available + 1e-12 {
            return Err(Error::InsufficientStrongConvexity {
                requested: removed,
                available,
            });
        }
        let new_a = SpdMatrix::new(a.matrix().sub_scaled_identity(removed))?;
        let known_min = if new_a.is_positive_definite() {
            let x_star = new_a.solve(b)?;
            let f_star = -0.5 * b.dot(&x_star) + offset;
            Some((x_star, f_star))
        } else {
            None
        };
        return Ok(Problem {
            name: format!("{}_shifted", p.name),
            kind: Kind::Quadratic {
                a: new_a,
                b: b.clone(),
                offset: *offset,
            },
            smoothness: p.smoothness.map(|l| (l - removed).max(0.0)),
            strong_convexity: Some((p.strong_convexity.unwrap_or(0.0) - removed).max(0.0)),
            known_min,
            grad_calls: AtomicUsize::new(0),
            component_grad_calls: AtomicUsize::new(0),
        });
    }
    if let (ShiftPhi::HalfSqNorm, Some(declared)) = (&phi, p.strong_convexity) {
        if mu > declared + 1e-12 {
            return Err(Error::InsufficientStrongConvexity {
                requested: mu,
                available: declared,
            });
        }
    }
    Ok(Problem {
        name: format!("{}_shifted", p.name),
        kind: Kind::Shifted {
            base: Box::new(p.clone()),
            coeff: mu,
            phi,
        },
        smoothness: p.smoothness,
        strong_convexity: None,
        known_min: None,
        grad_calls: AtomicUsize::new(0),
        component_grad_calls: AtomicUsize::new(0),
    })
}

fn extremal_eigs(a: &SpdMatrix) -> (f64, f64) {
    let n = a.dim();
    let lmax = power_iteration(|v| a.matvec(v), n);
    // smallest eigenvalue via the spectrum of lmax*I - A
    let lmin = lmax - power_iteration(|v| v.scale(lmax).sub(&a.matvec(v)), n);
    (lmax, lmin.max(0.0))
}

fn power_iteration(apply: impl Fn(&Point) -> Point, dim: usize) -> f64 {
    let mut v = Point::from(
        &(0..dim)
            .map(|i| 1.0 + (i as f64) * 0.01)
            .collect::<Vec<_>>(),
    );
    let mut lam = 0.0;
    for _ in 0..500 {
        let w = apply(&v);
        let n = w.norm();
        if n < 1e-300 {
            return 0.0;
        }
        v = w.scale(1.0 / n);
        lam = v.dot(&apply(&v));
    }
    lam
}
