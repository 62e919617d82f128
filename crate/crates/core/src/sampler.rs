//! Method dispatch and parallel batches of exit samples.
//!
//! Sample `i` of a batch with seed `s` is always drawn from
//! `RngStream::new(s, i)`, so a batch is a pure function of its arguments
//! and independent of the rayon pool size.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball_exact::sample_exact;
use crate::brownian::{simulate_exit, BrownianConfig};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampling::RngStream;
use crate::wos::{wos_exit, WosConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brownian,
    Wos,
    Exact,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Brownian, Method::Wos, Method::Exact];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brownian => "brownian",
            Method::Wos => "wos",
            Method::Exact => "exact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brownian" => Ok(Method::Brownian),
            "wos" => Ok(Method::Wos),
            "exact" => Ok(Method::Exact),
            other => Err(Error::invalid(
                "method",
                format!("{other:?} (expected brownian, wos or exact)"),
            )),
        }
    }
}

/// One sampled boundary exit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitSample {
    pub exit_point: Point,
    /// Brownian exit time; `None` for methods without a time axis.
    pub exit_time: Option<f64>,
    /// Timesteps (brownian), hops (wos) or proposals (exact).
    pub steps: u64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    pub method: Method,
    pub brownian: BrownianConfig,
    pub wos: WosConfig,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings {
            method: Method::Brownian,
            brownian: BrownianConfig::default(),
            wos: WosConfig::default(),
        }
    }
}

impl SamplerSettings {
    pub fn with_method(method: Method) -> Self {
        SamplerSettings {
            method,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.brownian.validate()?;
        self.wos.validate()
    }
}

pub fn draw_exit(
    domain: &Domain,
    theta: &Point,
    settings: &SamplerSettings,
    stream: &mut RngStream,
) -> Result<ExitSample> {
    match settings.method {
        Method::Brownian => simulate_exit(domain, theta, &settings.brownian, stream),
        Method::Wos => wos_exit(domain, theta, &settings.wos, stream),
        Method::Exact => {
            let ball = domain.as_ball().ok_or(Error::RequiresBall("exact sampling"))?;
            sample_exact(ball, theta, stream)
        }
    }
}

/// `n` exits from streams `0..n` of `seed`, in index order.
pub fn sample_batch(
    domain: &Domain,
    theta: &Point,
    settings: &SamplerSettings,
    seed: u64,
    n: usize,
) -> Result<Vec<ExitSample>> {
    sample_range(domain, theta, settings, seed, 0, n as u64)
}

/// Exits from streams `first..first + count` of `seed`, in index order.
pub fn sample_range(
    domain: &Domain,
    theta: &Point,
    settings: &SamplerSettings,
    seed: u64,
    first: u64,
    count: u64,
) -> Result<Vec<ExitSample>> {
    settings.validate()?;
    if !domain.contains(theta)? {
        return Err(Error::NotInterior);
    }
    (first..first + count)
        .into_par_iter()
        .map(|i| draw_exit(domain, theta, settings, &mut RngStream::new(seed, i)))
        .collect()
}
