//! Constraint sets and their oracles: linear minimization, Euclidean
//! projection, Bregman machinery, gauge functions of strongly convex sets,
//! and closed-form proximal operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Unconstrained {
        dim: usize,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    L2Ball {
        radius: f64,
        dim: usize,
    },
    /// lp ball with p in (1, 2].
    LpBall {
        p: f64,
        radius: f64,
        dim: usize,
    },
    Simplex {
        dim: usize,
    },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Unconstrained { dim } => *dim,
            Domain::Box { lo, .. } => lo.len(),
            Domain::L2Ball { dim, .. } => *dim,
            Domain::LpBall { dim, .. } => *dim,
            Domain::Simplex { dim } => *dim,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Domain::Unconstrained { .. })
    }

    /// Symmetric box [-b, b]^d.
    pub fn symmetric_box(dim: usize, b: f64) -> Domain {
        Domain::Box {
            lo: vec![-b; dim],
            hi: vec![b; dim],
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            Domain::Unconstrained { .. } => true,
            Domain::Box { lo, hi } => x
                .iter()
                .enumerate()
                .all(|(i, &c)| c >= lo[i] - MEMBERSHIP_TOL && c <= hi[i] + MEMBERSHIP_TOL),
            Domain::L2Ball { radius, .. } => x.norm() <= radius + MEMBERSHIP_TOL,
            Domain::LpBall { p, radius, .. } => x.norm_p(*p) <= radius + MEMBERSHIP_TOL,
            Domain::Simplex { .. } => {
                x.iter().all(|&c| c >= -MEMBERSHIP_TOL)
                    && (x.iter().sum::<f64>() - 1.0).abs() <= MEMBERSHIP_TOL
            }
        }
    }

    /// lambda such that the set is lambda-strongly convex (0 when it is not).
    /// lp balls: lambda = (p-1)/r; the l2 ball is the p = 2 case.
    pub fn strong_convexity_of_set(&self) -> f64 {
        match self {
            Domain::L2Ball { radius, .. } => 1.0 / radius,
            Domain::LpBall { p, radius, .. } => (p - 1.0) / radius,
            _ => 0.0,
        }
    }

    /// Exact squared Euclidean diameter where it is finite.
    pub fn diameter_sq(&self) -> Option<f64> {
        match self {
            Domain::Unconstrained { .. } => None,
            Domain::Box { lo, hi } => Some(lo.iter().zip(hi).map(|(l, h)| (h - l) * (h - l)).sum()),
            Domain::L2Ball { radius, .. } => Some(4.0 * radius * radius),
            // For p <= 2 the l2 norm is dominated by the lp norm, so the
            // Euclidean diameter is still 2r.
            Domain::LpBall { radius, .. } => Some(4.0 * radius * radius),
            Domain::Simplex { .. } => Some(2.0),
        }
    }
}

/// Linear minimization oracle: argmin over the set of <x, direction>.
/// Ties broken toward the lexicographically smallest minimizer, so the
/// oracle is a deterministic function of its inputs.
pub fn lmo(domain: &Domain, direction: &Point) -> Result<Point> {
    if !direction.is_finite() {
        return Err(Error::NonFinite);
    }
    if direction.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: direction.dim(),
        });
    }
    match domain {
        Domain::Unconstrained { .. } => Err(Error::LmoUnbounded),
        Domain::Box { lo, hi } => {
            let coords: Vec<f64> = direction
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    if d > 0.0 {
                        lo[i]
                    } else if d < 0.0 {
                        hi[i]
                    } else {
                        lo[i]
                    }
                })
                .collect();
            Point::new(coords)
        }
        Domain::L2Ball { radius, dim } => {
            let n = direction.norm();
            if n == 0.0 {
                // Zero direction: every point minimizes; pick the
                // lexicographically smallest boundary point.
                let mut coords = vec![0.0; *dim];
                coords[0] = -radius;
                return Point::new(coords);
            }
            Ok(direction.scale(-radius / n))
        }
        Domain::LpBall { p, radius, dim } => {
            // Dual-norm scaling: x_i proportional to -sign(d_i) |d_i|^(q-1),
            // with 1/p + 1/q = 1, normalized to the lp boundary.
            let q = p / (p - 1.0);
            let qnorm = direction.norm_p(q);
            if qnorm == 0.0 {
                let mut coords = vec![0.0; *dim];
                coords[0] = -radius;
                return Point::new(coords);
            }
            let coords: Vec<f64> = direction
                .iter()
                .map(|&d| -radius * d.signum() * (d.abs() / qnorm).powf(q - 1.0))
                .collect();
            let x = Point::new(coords)?;
            // Renormalize to kill powf rounding so membership holds exactly.
            let np = x.norm_p(*p);
            Ok(x.scale(radius / np))
        }
        Domain::Simplex { dim } => {
            let mut best = 0usize;
            for i in 1..*dim {
                // >= prefers the later index; e_j with larger j is the
                // lexicographically smaller vertex.
                if direction[i] <= direction[best] {
                    best = i;
                }
            }
            let mut coords = vec![0.0; *dim];
            coords[best] = 1.0;
            Point::new(coords)
        }
    }
}

/// Euclidean projection onto the set (identity on the unconstrained domain).
pub fn project(domain: &Domain, point: &Point) -> Result<Point> {
    if !point.is_finite() {
        return Err(Error::NonFinite);
    }
    if point.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: point.dim(),
        });
    }
    match domain {
        Domain::Unconstrained { .. } => Ok(point.clone()),
        Domain::Box { lo, hi } => {
            let coords: Vec<f64> = point
                .iter()
                .enumerate()
                .map(|(i, &c)| c.clamp(lo[i], hi[i]))
                .collect();
            Point::new(coords)
        }
        Domain::L2Ball { radius, .. } => {
            let n = point.norm();
            if n <= *radius {
                Ok(point.clone())
            } else {
                Ok(point.scale(radius / n))
            }
        }
        Domain::LpBall { p, radius, .. } => {
            if point.norm_p(*p) <= *radius {
                return Ok(point.clone());
            }
            project_lp_ball(point, *p, *radius)
        }
        Domain::Simplex { dim } => {
            // Sort-based water-filling; exact in O(d log d).
            let mut sorted: Vec<f64> = point.coords().to_vec();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let mut cum = 0.0;
            let mut theta = 0.0;
            let mut found = false;
            for (k, &v) in sorted.iter().enumerate() {
                cum += v;
                let cand = (cum - 1.0) / (k + 1) as f64;
                if v - cand > 0.0 {
                    theta = cand;
                } else {
                    found = true;
                    break;
                }
            }
            let _ = found;
            let coords: Vec<f64> = point.iter().map(|&c| (c - theta).max(0.0)).collect();
            let _ = dim;
            Point::new(coords)
        }
    }
}

/// Projection onto an lp ball by a KKT bisection on the multiplier.
/// The stationarity condition x_i + theta * p * sign(x_i) |x_i|^(p-1) = v_i
/// is solved per coordinate (monotone in x_i), and theta is bisected until
/// the lp norm matches the radius.
fn project_lp_ball(v: &Point, p: f64, radius: f64) -> Result<Point> {
    let solve_coord = |vi: f64, theta: f64| -> f64 {
        let target = vi.abs();
        if target == 0.0 {
            return 0.0;
        }
        let g = |x: f64| x + theta * p * x.powf(p - 1.0) - target;
        let (mut lo, mut hi) = (0.0_f64, target);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi) * vi.signum()
    };
    let norm_at = |theta: f64| -> f64 {
        let coords: Vec<f64> = v.iter().map(|&vi| solve_coord(vi, theta)).collect();
        Point::from(&coords).norm_p(p)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while norm_at(hi) > radius {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let coords: Vec<f64> = v.iter().map(|&vi| solve_coord(vi, theta)).collect();
    let x = Point::new(coords)?;
    let np = x.norm_p(p);
    if np > radius {
        Ok(x.scale(radius / np))
    } else {
        Ok(x)
    }
}

/// Distance-generating functions for Bregman divergences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceGenerator {
    /// phi(x) = (1/2)||x||^2; 1-strongly convex and 1-smooth in l2.
    SquaredL2,
    /// phi(x) = sum x_i log x_i; 1-strongly convex w.r.t. l1 on the simplex.
    Entropy,
}

impl DistanceGenerator {
    /// Strong-convexity modulus beta w.r.t. the generator's norm.
    pub fn strong_convexity(&self) -> f64 {
        1.0
    }

    /// Smoothness constant of phi when finite.
    pub fn smoothness(&self) -> Option<f64> {
        match self {
            DistanceGenerator::SquaredL2 => Some(1.0),
            DistanceGenerator::Entropy => None,
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        match self {
            DistanceGenerator::SquaredL2 => Ok(0.5 * x.norm_sq()),
            DistanceGenerator::Entropy => {
                if x.iter().any(|&c| c <= 0.0) {
                    return Err(Error::EntropyDomain);
                }
                Ok(x.iter().map(|&c| c * c.ln()).sum())
            }
        }
    }

    pub fn grad(&self, x: &Point) -> Result<Point> {
        match self {
            DistanceGenerator::SquaredL2 => Ok(x.clone()),
            DistanceGenerator::Entropy => {
                if x.iter().any(|&c| c <= 0.0) {
                    return Err(Error::EntropyDomain);
                }
                Ok(x.map(|c| c.ln() + 1.0))
            }
        }
    }
}

/// Bregman divergence V_center(x) = phi(x) - <grad phi(center), x - center> - phi(center).
pub fn bregman(gen: &DistanceGenerator, center: &Point, x: &Point) -> Result<f64> {
    match gen {
        DistanceGenerator::SquaredL2 => Ok(0.5 * x.sub(center).norm_sq()),
        DistanceGenerator::Entropy => {
            if center.iter().any(|&c| c <= 0.0) || x.iter().any(|&c| c < 0.0) {
                return Err(Error::EntropyDomain);
            }
            // Generalized KL; reduces to KL(x || center) on the simplex.
            let mut s = 0.0;
            for (xi, zi) in x.iter().zip(center.iter()) {
                if *xi > 0.0 {
                    s += xi * (xi / zi).ln();
                }
                s += zi - xi;
            }
            Ok(s)
        }
    }
}

/// Single Bregman step: argmin over the domain of <g, z> + (1/gamma) V_center(z).
pub fn bregman_step(
    gen: &DistanceGenerator,
    domain: &Domain,
    center: &Point,
    g: &Point,
    gamma: f64,
) -> Result<Point> {
    if gamma <= 0.0 {
        return Err(Error::InvalidHyperparameter(
            "step size gamma must be > 0".into(),
        ));
    }
    match gen {
        DistanceGenerator::SquaredL2 => project(domain, &center.axpy(-gamma, g)),
        DistanceGenerator::Entropy => {
            if !matches!(domain, Domain::Simplex { .. }) {
                return Err(Error::NoClosedFormLeader);
            }
            // Multiplicative-weights update, normalized on the simplex.
            let m = g.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let unnorm: Vec<f64> = center
                .iter()
                .zip(g.iter())
                .map(|(&c, &gi)| c * (-gamma * (gi - m)).exp())
                .collect();
            let z: f64 = unnorm.iter().sum();
            Point::new(unnorm.into_iter().map(|u| u / z).collect())
        }
    }
}

/// A centrally symmetric strongly convex set containing the origin, together
/// with its gauge (Minkowski functional) oracles. Only vector lp balls are
/// supported; Schatten-p and group-(s,p) matrix balls share the same
/// strong-convexity constants but are out of scope here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeSet {
    pub base: Domain,
    pub lambda: f64,
}

impl GaugeSet {
    pub fn new(base: Domain) -> Result<Self> {
        let lambda = base.strong_convexity_of_set();
        if lambda <= 0.0 {
            return Err(Error::InvalidSpec(
                "gauge set requires a strongly convex base set".into(),
            ));
        }
        Ok(GaugeSet { base, lambda })
    }

    /// gauge(x) = inf { c >= 0 : x/c in the set }.
    pub fn gauge(&self, x: &Point) -> f64 {
        match &self.base {
            Domain::L2Ball { radius, .. } => x.norm() / radius,
            Domain::LpBall { p, radius, .. } => x.norm_p(*p) / radius,
            _ => unreachable!("gauge sets are built over lp balls"),
        }
    }

    pub fn gauge_sq(&self, x: &Point) -> f64 {
        let g = self.gauge(x);
        g * g
    }

    /// Gradient of gauge^2 (smooth for p in (1, 2]).
    pub fn gauge_sq_grad(&self, x: &Point) -> Point {
        match &self.base {
            Domain::L2Ball { radius, .. } => x.scale(2.0 / (radius * radius)),
            Domain::LpBall { p, radius, .. } => {
                let np = x.norm_p(*p);
                if np == 0.0 {
                    return Point::zeros(x.dim());
                }
                // d/dx ||x||_p^2 = 2 ||x||_p^(2-p) sign(x) |x|^(p-1)
                let s = 2.0 * np.powf(2.0 - *p) / (radius * radius);
                x.map(|c| s * c.signum() * c.abs().powf(p - 1.0))
            }
            _ => unreachable!(),
        }
    }

    /// Smoothness constant of gauge^2 w.r.t. l2 where known.
    pub fn gauge_sq_smoothness(&self) -> Option<f64> {
        match &self.base {
            Domain::L2Ball { radius, .. } => Some(2.0 / (radius * radius)),
            _ => None,
        }
    }

    /// Boundary linear minimization: argmin over the boundary of <x, dir>.
    /// For nonzero directions the set LMO already lands on the boundary.
    pub fn boundary_lmo(&self, direction: &Point) -> Result<Point> {
        lmo(&self.base, direction)
    }
}

/// Minimizes <zeta, x> + scale * gauge^2(x) over the gauge set, via the
/// boundary reparametrization x = rho * z with rho in [0, 1]:
/// rho* = clamp(-<zeta, z*> / (2 scale)) at z* = argmin over the boundary.
/// Returns the minimizer and a flag marking the degenerate zero-direction case.
pub fn gauge_reg_argmin(gset: &GaugeSet, zeta: &Point, scale: f64) -> Result<(Point, bool)> {
    if !zeta.is_finite() {
        return Err(Error::NonFinite);
    }
    if scale <= 0.0 {
        return Err(Error::InvalidHyperparameter(
            "gauge regularization scale must be > 0".into(),
        ));
    }
    if zeta.norm() == 0.0 {
        return Ok((Point::zeros(zeta.dim()), true));
    }
    let z_star = gset.boundary_lmo(zeta)?;
    let rho = (-zeta.dot(&z_star) / (2.0 * scale)).clamp(0.0, 1.0);
    Ok((z_star.scale(rho), false))
}

/// Composite (possibly non-differentiable) terms with closed-form proximal maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Composite {
    Zero,
    /// c * ||x||_1
    L1 {
        coeff: f64,
    },
    /// c * (1/2) ||x||^2
    SquaredL2 {
        coeff: f64,
    },
}

impl Composite {
    pub fn value(&self, x: &Point) -> f64 {
        match self {
            Composite::Zero => 0.0,
            Composite::L1 { coeff } => coeff * x.norm_l1(),
            Composite::SquaredL2 { coeff } => coeff * 0.5 * x.norm_sq(),
        }
    }
}

/// prox_{lambda psi}(v) = argmin_x psi(x) + (1/(2 lambda)) ||x - v||^2.
pub fn prox(psi: &Composite, lambda: f64, v: &Point) -> Result<Point> {
    if lambda <= 0.0 {
        return Err(Error::InvalidHyperparameter(
            "prox scale lambda must be > 0".into(),
        ));
    }
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    match psi {
        Composite::Zero => Ok(v.clone()),
        Composite::L1 { coeff } => {
            let thr = lambda * coeff;
            Ok(v.map(|c| {
                if c > thr {
                    c - thr
                } else if c < -thr {
                    c + thr
                } else {
                    0.0
                }
            }))
        }
        Composite::SquaredL2 { coeff } => Ok(v.scale(1.0 / (1.0 + lambda * coeff))),
    }
}
