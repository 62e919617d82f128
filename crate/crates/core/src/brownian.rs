//! Discretised Brownian motion run until it leaves the domain.
//!
//! `X_{k+1} = X_k + √dt · Z_k` with `Z_k` standard Gaussian vectors. The
//! first step that leaves the open domain is cut back to where the segment
//! `[X_k, X_{k+1}]` meets the boundary, and the exit time is interpolated to
//! `(k + t*)·dt` with `t*` the crossing parameter on that segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampler::{ExitSample, Method};
use crate::sampling::{NormalSource, RngStream};

/// How the overshooting step is turned into a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overshoot {
    /// Segment–boundary intersection with interpolated exit time.
    #[default]
    Intersect,
    /// Closest boundary point to the first outside position; exit time is
    /// `steps · dt`. Kept for comparison, it carries an O(√dt) bias.
    ProjectFirstOutside,
}

impl std::str::FromStr for Overshoot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersect" => Ok(Overshoot::Intersect),
            "project-first-outside" | "project_first_outside" => Ok(Overshoot::ProjectFirstOutside),
            other => Err(Error::invalid(
                "overshoot",
                format!("{other:?} (expected intersect or project-first-outside)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianConfig {
    pub dt: f64,
    pub max_steps: u64,
    #[serde(default)]
    pub overshoot: Overshoot,
}

impl Default for BrownianConfig {
    fn default() -> Self {
        BrownianConfig {
            dt: 1e-4,
            max_steps: 1_000_000_000,
            overshoot: Overshoot::Intersect,
        }
    }
}

impl BrownianConfig {
    pub fn with_dt(dt: f64) -> Self {
        BrownianConfig {
            dt,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        Ok(())
    }
}

pub fn simulate_exit(
    domain: &Domain,
    theta: &Point,
    cfg: &BrownianConfig,
    stream: &mut RngStream,
) -> Result<ExitSample> {
    cfg.validate()?;
    if !domain.contains(theta)? {
        return Err(Error::NotInterior);
    }
    let sigma = cfg.dt.sqrt();
    let mut x = theta.coords().to_vec();
    let mut next = vec![0.0; x.len()];
    let mut steps = 0u64;
    loop {
        if steps == cfg.max_steps {
            return Err(Error::MaxStepsExceeded {
                max_steps: cfg.max_steps,
                elapsed: steps as f64 * cfg.dt,
                position: Point::from_vec_unchecked(x),
            });
        }
        stream.fill_gaussian(&mut next);
        next.iter_mut().zip(&x).for_each(|(n, x)| *n = x + sigma * *n);
        steps += 1;
        if domain.contains_slice(&next) {
            std::mem::swap(&mut x, &mut next);
            continue;
        }
        let (exit_point, exit_time) = match cfg.overshoot {
            Overshoot::Intersect => {
                let (q, t) = domain.intersect_slice(&x, &next);
                (q, ((steps - 1) as f64 + t) * cfg.dt)
            }
            Overshoot::ProjectFirstOutside => {
                (domain.closest_boundary_slice(&next), steps as f64 * cfg.dt)
            }
        };
        return Ok(ExitSample {
            exit_point: Point::from_vec_unchecked(exit_point),
            exit_time: Some(exit_time),
            steps,
            method: Method::Brownian,
        });
    }
}
