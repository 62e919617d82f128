//! Closed-form harmonic measure on balls.
//!
//! For the ball `B(c, r)` in `R^d` the exit law from `x` has density
//!
//! ```text
//! K(x, y) = Γ(d/2) / (2 π^{d/2} r) · (r² − ‖x − c‖²) / ‖x − y‖^d
//! ```
//!
//! with respect to unnormalised surface measure on the sphere. Its mean is
//! `x` (true on any regular bounded domain), the trace of its covariance is
//! `r² − ‖x − c‖²`, and the mean Brownian exit time is that trace over `d`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{distance, distance_sq, Ball, Domain, Point};
use crate::sampler::{ExitSample, Method};
use crate::sampling::{sphere_point_into, RngStream};

/// Tolerance on `|‖y − c‖ − r| / r` for a kernel argument to count as a
/// boundary point.
pub const KERNEL_BOUNDARY_TOL: f64 = 1e-9;

/// Largest `ρ/r` accepted by the rejection sampler.
pub const MAX_REJECTION_RHO: f64 = 1.0 - 1e-9;

/// `Γ(k/2)` by the recurrence `Γ(s + 1) = s Γ(s)` from `Γ(1/2) = √π`, `Γ(1) = 1`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "Γ(0) is undefined");
    let (mut g, mut s) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while s < target {
        g *= s;
        s += 1.0;
    }
    g
}

/// Surface area of the radius-`r` sphere in `R^d`: `2 π^{d/2} r^{d−1} / Γ(d/2)`.
/// For `d = 1` this is the counting measure of `{c − r, c + r}`, i.e. 2.
pub fn sphere_area(dim: usize, r: f64) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) * r.powi(dim as i32 - 1) / gamma_half(dim as u32)
}

/// A validated Poisson-kernel argument: `x` strictly inside, `y` on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelQuery {
    ball: Ball,
    x: Point,
    y: Point,
}

impl KernelQuery {
    pub fn new(ball: Ball, x: Point, y: Point) -> Result<Self> {
        x.check_dim(ball.dim())?;
        y.check_dim(ball.dim())?;
        if x.distance(ball.center()) >= ball.radius() {
            return Err(Error::NotInterior);
        }
        let off = (y.distance(ball.center()) - ball.radius()).abs() / ball.radius();
        if off > KERNEL_BOUNDARY_TOL {
            return Err(Error::OffBoundary(off));
        }
        Ok(KernelQuery { ball, x, y })
    }
}

pub fn poisson_kernel(q: &KernelQuery) -> f64 {
    kernel(&q.ball, q.x.coords(), q.y.coords())
}

fn kernel(ball: &Ball, x: &[f64], y: &[f64]) -> f64 {
    let d = ball.dim();
    let r = ball.radius();
    let rho_sq = distance_sq(x, ball.center().coords());
    let norm_const = gamma_half(d as u32) / (2.0 * PI.powf(d as f64 / 2.0) * r);
    norm_const * (r * r - rho_sq) / distance(x, y).powi(d as i32)
}

fn check_interior(ball: &Ball, x: &Point) -> Result<f64> {
    x.check_dim(ball.dim())?;
    let rho = x.distance(ball.center());
    if rho >= ball.radius() {
        return Err(Error::NotInterior);
    }
    Ok(rho)
}

/// Point at angle `phi` on a circle (d = 2).
fn circle_point(ball: &Ball, phi: f64) -> [f64; 2] {
    let c = ball.center().coords();
    let r = ball.radius();
    [c[0] + r * phi.cos(), c[1] + r * phi.sin()]
}

fn require_plane(ball: &Ball) -> Result<()> {
    if ball.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ball.dim(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Exact sum over the two boundary points (d = 1).
    TwoPoint,
    /// Equispaced trapezoid rule in the angle (d = 2).
    Trapezoid,
    /// Mean of `K · area` over uniform sphere draws (d ≥ 3).
    MonteCarlo,
}

impl QuadratureRule {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureRule::TwoPoint => "two-point",
            QuadratureRule::Trapezoid => "trapezoid",
            QuadratureRule::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationEstimate {
    pub value: f64,
    /// Zero for deterministic rules.
    pub std_error: f64,
    pub rule: QuadratureRule,
    pub resolution: usize,
}

/// Numerical total mass of the Poisson kernel over the sphere. `seed` is only
/// consumed by the Monte Carlo rule.
pub fn kernel_normalization(
    ball: &Ball,
    x: &Point,
    resolution: usize,
    seed: u64,
) -> Result<NormalizationEstimate> {
    check_interior(ball, x)?;
    if resolution == 0 {
        return Err(Error::invalid("resolution", "must be positive"));
    }
    let xs = x.coords();
    let c = ball.center().coords();
    let r = ball.radius();
    let estimate = |value, std_error, rule| NormalizationEstimate {
        value,
        std_error,
        rule,
        resolution,
    };
    match ball.dim() {
        1 => {
            let total = kernel(ball, xs, &[c[0] - r]) + kernel(ball, xs, &[c[0] + r]);
            Ok(estimate(total, 0.0, QuadratureRule::TwoPoint))
        }
        2 => {
            let h = 2.0 * PI / resolution as f64;
            let total: f64 = (0..resolution)
                .map(|j| kernel(ball, xs, &circle_point(ball, j as f64 * h)))
                .sum();
            Ok(estimate(total * h * r, 0.0, QuadratureRule::Trapezoid))
        }
        d => {
            let area = sphere_area(d, r);
            let mut stream = RngStream::new(seed, 0);
            let mut y = vec![0.0; d];
            let (mut mean, mut m2) = (0.0, 0.0);
            for k in 1..=resolution {
                sphere_point_into(&mut stream, c, r, &mut y);
                let w = kernel(ball, xs, &y) * area;
                let delta = w - mean;
                mean += delta / k as f64;
                m2 += delta * (w - mean);
            }
            let se = if resolution > 1 {
                (m2 / (resolution - 1) as f64 / resolution as f64).sqrt()
            } else {
                f64::INFINITY
            };
            Ok(estimate(mean, se, QuadratureRule::MonteCarlo))
        }
    }
}

/// Trapezoid quadrature of `‖y − θ‖² K(θ, y)` over the circle (d = 2). The
/// integrand reduces to the constant `(r² − ‖θ − c‖²)/(2πr)`, so the result
/// equals the covariance trace up to rounding.
pub fn second_moment_quadrature(ball: &Ball, theta: &Point, resolution: usize) -> Result<f64> {
    require_plane(ball)?;
    check_interior(ball, theta)?;
    if resolution == 0 {
        return Err(Error::invalid("resolution", "must be positive"));
    }
    let t = theta.coords();
    let h = 2.0 * PI / resolution as f64;
    let total: f64 = (0..resolution)
        .map(|j| {
            let y = circle_point(ball, j as f64 * h);
            distance_sq(&y, t) * kernel(ball, t, &y)
        })
        .sum();
    Ok(total * h * ball.radius())
}

/// Harmonic-measure mass of `bins` equal arcs `[2πk/bins, 2π(k+1)/bins)` of
/// the circle (d = 2), by the trapezoid rule with `nodes_per_bin` panels each.
pub fn arc_probabilities(ball: &Ball, theta: &Point, bins: usize, nodes_per_bin: usize) -> Result<Vec<f64>> {
    require_plane(ball)?;
    check_interior(ball, theta)?;
    if bins == 0 || nodes_per_bin == 0 {
        return Err(Error::invalid("bins", "bins and nodes_per_bin must be positive"));
    }
    let t = theta.coords();
    let width = 2.0 * PI / bins as f64;
    let h = width / nodes_per_bin as f64;
    Ok((0..bins)
        .map(|k| {
            let start = k as f64 * width;
            let f = |j: usize| kernel(ball, t, &circle_point(ball, start + j as f64 * h));
            let inner: f64 = (1..nodes_per_bin).map(f).sum();
            (0.5 * (f(0) + f(nodes_per_bin)) + inner) * h * ball.radius()
        })
        .collect())
}

/// Rejection envelope `M = sup K / u` for uniform proposals `u = 1/area`:
/// `M = r^{d−2} (r + ρ) / (r − ρ)^{d−1}`, attained at the boundary point
/// nearest `θ`. The acceptance rate is `1/M`.
pub fn rejection_envelope(ball: &Ball, theta: &Point) -> Result<f64> {
    let rho = check_interior(ball, theta)?;
    let r = ball.radius();
    let d = ball.dim() as i32;
    Ok(r.powi(d - 2) * (r + rho) / (r - rho).powi(d - 1))
}

/// Exact draw from the harmonic measure of a ball by rejection from uniform
/// proposals. A proposal `y` is accepted with probability
/// `K(θ, y) / (M u) = ((r − ρ)/‖θ − y‖)^d`. `steps` counts proposals.
pub fn sample_exact(ball: &Ball, theta: &Point, stream: &mut RngStream) -> Result<ExitSample> {
    let rho = check_interior(ball, theta)?;
    let r = ball.radius();
    if rho / r > MAX_REJECTION_RHO {
        return Err(Error::NearBoundary(rho / r));
    }
    let d = ball.dim() as i32;
    let t = theta.coords();
    let gap = r - rho;
    let mut y = vec![0.0; ball.dim()];
    let mut proposals = 0u64;
    loop {
        sphere_point_into(stream, ball.center().coords(), r, &mut y);
        proposals += 1;
        let accept = (gap / distance(t, &y)).powi(d);
        if stream.next_uniform() < accept {
            return Ok(ExitSample {
                exit_point: Point::from_vec_unchecked(y),
                exit_time: None,
                steps: proposals,
                method: Method::Exact,
            });
        }
    }
}

/// Mean of harmonic measure: the start point itself, on any supported domain.
pub fn theoretical_mean(domain: &Domain, theta: &Point) -> Result<Point> {
    if !domain.contains(theta)? {
        return Err(Error::NotInterior);
    }
    Ok(theta.clone())
}

/// `tr(Σ) = r² − ‖θ − c‖²`.
pub fn theoretical_trace(ball: &Ball, theta: &Point) -> Result<f64> {
    check_interior(ball, theta)?;
    let r = ball.radius();
    Ok(r * r - distance_sq(theta.coords(), ball.center().coords()))
}

/// `E[τ] = (r² − ‖θ − c‖²) / d` for standard Brownian motion.
pub fn expected_exit_time(ball: &Ball, theta: &Point) -> Result<f64> {
    Ok(theoretical_trace(ball, theta)? / ball.dim() as f64)
}

/// Empirical `E‖Y − θ‖²`, a consistent estimator of the covariance trace
/// since `E[Y] = θ`.
pub fn second_moment_identity_check(samples: &[ExitSample], theta: &Point) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut total = 0.0;
    for s in samples {
        s.exit_point.check_dim(theta.dim())?;
        total += distance_sq(s.exit_point.coords(), theta.coords());
    }
    Ok(total / samples.len() as f64)
}
