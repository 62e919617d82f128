//! Walk-on-spheres: a timestep-free sampler of harmonic measure.
//!
//! From `Y_n`, jump to a uniform point on the sphere of radius
//! `step_fraction · dist(Y_n, ∂D)`. The chain is a martingale converging to
//! the Brownian exit point; it is stopped once within `epsilon · diameter` of
//! the boundary and projected onto it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampler::{ExitSample, Method};
use crate::sampling::{sphere_point_into, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WosConfig {
    /// Absorption-shell width as a fraction of the domain diameter.
    pub epsilon: f64,
    /// Jump radius as a fraction of the boundary distance. `0.5` halves the
    /// distance each hop; `1.0` is the classical, faster variant.
    pub step_fraction: f64,
    pub max_hops: u64,
}

impl Default for WosConfig {
    fn default() -> Self {
        WosConfig {
            epsilon: 1e-6,
            step_fraction: 0.5,
            max_hops: 1_000_000,
        }
    }
}

impl WosConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::invalid(
                "step_fraction",
                format!("must lie in (0, 1], got {}", self.step_fraction),
            ));
        }
        if self.max_hops == 0 {
            return Err(Error::invalid("max_hops", "must be at least 1"));
        }
        Ok(())
    }
}

pub fn wos_exit(
    domain: &Domain,
    theta: &Point,
    cfg: &WosConfig,
    stream: &mut RngStream,
) -> Result<ExitSample> {
    cfg.validate()?;
    if !domain.contains(theta)? {
        return Err(Error::NotInterior);
    }
    let shell = cfg.epsilon * domain.diameter();
    let mut y = theta.coords().to_vec();
    let mut next = vec![0.0; y.len()];
    let mut hops = 0u64;
    loop {
        let dist = domain.distance_to_boundary_slice(&y);
        if dist < shell {
            return Ok(finish(domain.project_interior_slice(&y), hops));
        }
        if hops == cfg.max_hops {
            return Err(Error::MaxHopsExceeded {
                max_hops: cfg.max_hops,
                distance: dist,
                position: Point::from_vec_unchecked(y),
            });
        }
        sphere_point_into(stream, &y, cfg.step_fraction * dist, &mut next);
        hops += 1;
        if !domain.contains_slice(&next) {
            // only reachable through rounding when the sphere is tangent to
            // the boundary (step_fraction = 1)
            let (q, _) = domain.intersect_slice(&y, &next);
            return Ok(finish(q, hops));
        }
        std::mem::swap(&mut y, &mut next);
    }
}

fn finish(exit_point: Vec<f64>, hops: u64) -> ExitSample {
    ExitSample {
        exit_point: Point::from_vec_unchecked(exit_point),
        exit_time: None,
        steps: hops,
        method: Method::Wos,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopProfile {
    pub n: usize,
    pub mean: f64,
    pub p95: u64,
    pub max: u64,
}

/// Hop-count statistics over `n_samples` walks drawn from streams
/// `0..n_samples` of `seed`.
pub fn hop_count_profile(
    domain: &Domain,
    theta: &Point,
    cfg: &WosConfig,
    n_samples: usize,
    seed: u64,
) -> Result<HopProfile> {
    if n_samples == 0 {
        return Err(Error::EmptySample);
    }
    let mut hops: Vec<u64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| wos_exit(domain, theta, cfg, &mut RngStream::new(seed, i)).map(|s| s.steps))
        .collect::<Result<_>>()?;
    let mean = hops.iter().sum::<u64>() as f64 / n_samples as f64;
    hops.sort_unstable();
    // nearest-rank percentile
    let rank = ((0.95 * n_samples as f64).ceil() as usize).clamp(1, n_samples);
    Ok(HopProfile {
        n: n_samples,
        mean,
        p95: hops[rank - 1],
        max: hops[n_samples - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, BoxDomain};

    fn disc() -> Domain {
        Ball::unit(2).into()
    }

    #[test]
    fn config_validation() {
        assert!(WosConfig::default().validate().is_ok());
        for (eps, frac, hops) in [(0.0, 0.5, 10), (1e-6, 0.0, 10), (1e-6, 1.1, 10), (1e-6, 0.5, 0)] {
            let cfg = WosConfig {
                epsilon: eps,
                step_fraction: frac,
                max_hops: hops,
            };
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn first_hop_from_center_lands_at_half_radius() {
        let cfg = WosConfig {
            max_hops: 1,
            epsilon: 0.4,
            ..Default::default()
        };
        // shell 0.8 from a diameter of 2: stop right after the first hop
        let s = wos_exit(&disc(), &Point::origin(2), &cfg, &mut RngStream::new(3, 0)).unwrap();
        assert_eq!(s.steps, 1);
        let mut stream = RngStream::new(3, 0);
        let mut first = vec![0.0; 2];
        sphere_point_into(&mut stream, &[0.0, 0.0], 0.5, &mut first);
        assert!((crate::geometry::norm(&first) - 0.5).abs() < 1e-15);
        // and the projection of that hop is the returned exit
        let expect: Vec<f64> = first.iter().map(|v| v / 0.5).collect();
        assert!(crate::geometry::distance(s.exit_point.coords(), &expect) < 1e-12);
    }

    #[test]
    fn exits_are_on_boundary_and_hops_stay_interior() {
        let rect: Domain = BoxDomain::new(Point::origin(2), Point::new(vec![2.0, 1.0]).unwrap())
            .unwrap()
            .into();
        for domain in [disc(), rect] {
            for frac in [0.5, 1.0] {
                let cfg = WosConfig {
                    step_fraction: frac,
                    ..Default::default()
                };
                let theta = Point::new(vec![0.4, 0.3]).unwrap();
                for i in 0..500 {
                    let s = wos_exit(&domain, &theta, &cfg, &mut RngStream::new(8, i)).unwrap();
                    assert!(domain.boundary_residual(&s.exit_point).unwrap() <= 1e-9);
                    assert!(s.exit_time.is_none());
                    assert!(s.steps >= 1);
                }
            }
        }
    }

    #[test]
    fn hop_cap_is_an_error() {
        let cfg = WosConfig {
            epsilon: 1e-12,
            max_hops: 1,
            ..Default::default()
        };
        let err = wos_exit(&disc(), &Point::origin(2), &cfg, &mut RngStream::new(0, 0)).unwrap_err();
        assert!(matches!(err, Error::MaxHopsExceeded { max_hops: 1, .. }));
        assert!(hop_count_profile(&disc(), &Point::origin(2), &cfg, 10, 0).is_err());
    }

    #[test]
    fn start_inside_the_shell_needs_no_hops() {
        let cfg = WosConfig {
            epsilon: 0.01,
            ..Default::default()
        };
        let s = wos_exit(&disc(), &Point::on_axis(2, 0.99), &cfg, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(s.steps, 0);
        assert_eq!(s.exit_point, Point::on_axis(2, 1.0));
    }

    #[test]
    fn hop_profile_scales_with_log_epsilon() {
        let theta = Point::on_axis(2, 0.3);
        let profile = |epsilon, step_fraction| {
            let cfg = WosConfig {
                epsilon,
                step_fraction,
                ..Default::default()
            };
            hop_count_profile(&disc(), &theta, &cfg, 4000, 5).unwrap()
        };
        let m4 = profile(1e-4, 0.5).mean;
        let m6 = profile(1e-6, 0.5).mean;
        let m8 = profile(1e-8, 0.5).mean;
        let (gap1, gap2) = (m6 - m4, m8 - m6);
        assert!(gap1 > 0.0 && gap2 > 0.0);
        assert!((gap1 / gap2 - 1.0).abs() < 0.25, "{m4} {m6} {m8}");

        let classical = profile(1e-6, 1.0);
        assert!(classical.mean < m6);
        assert!(classical.p95 as f64 >= classical.mean && classical.max >= classical.p95);
    }
}
