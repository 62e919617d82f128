//! Spatial-cloaking attack on a hidden start location.
//!
//! Trips start at the user's house and are observed only after they leave a
//! privacy region, so each trip reveals one exit point. The attacker
//! estimates the house by the sample mean of those exits. The estimate is
//! unbiased, and on a ball its mean squared error is
//! `E‖θ̂ − θ‖² = (r² − ‖θ − c‖²) / trips`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ball_exact::theoretical_trace;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::report::{fmt_opt, Table};
use crate::sampler::{draw_exit, SamplerSettings};
use crate::sampling::{derive_seed, RngStream};
use crate::stats::MomentAccumulator;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloakScenario {
    house: Point,
    region: Domain,
    trips: usize,
    settings: SamplerSettings,
}

impl CloakScenario {
    pub fn new(house: Point, region: Domain, trips: usize, settings: SamplerSettings) -> Result<Self> {
        if !region.contains(&house)? {
            return Err(Error::NotInterior);
        }
        if trips == 0 {
            return Err(Error::invalid("trips", "must be at least 1"));
        }
        settings.validate()?;
        Ok(CloakScenario {
            house,
            region,
            trips,
            settings,
        })
    }

    pub fn house(&self) -> &Point {
        &self.house
    }

    pub fn region(&self) -> &Domain {
        &self.region
    }

    pub fn trips(&self) -> usize {
        self.trips
    }

    pub fn settings(&self) -> &SamplerSettings {
        &self.settings
    }

    pub fn with_trips(&self, trips: usize) -> Result<Self> {
        Self::new(self.house.clone(), self.region.clone(), trips, self.settings)
    }

    /// `√(tr Σ / trips)` on balls; `None` for boxes, where no closed form exists.
    pub fn predicted_rmse(&self) -> Option<f64> {
        let ball = self.region.as_ball()?;
        let trace = theoretical_trace(ball, &self.house).ok()?;
        Some((trace / self.trips as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyReport {
    pub estimate: Point,
    pub error: f64,
    pub predicted_rmse: Option<f64>,
    /// `error / predicted_rmse`.
    pub ratio: Option<f64>,
}

/// One attack using streams `0..trips` of `seed`.
pub fn run_attack(scenario: &CloakScenario, seed: u64) -> Result<PrivacyReport> {
    attack(scenario, seed, 0)
}

fn attack(scenario: &CloakScenario, seed: u64, first_stream: u64) -> Result<PrivacyReport> {
    let mut acc = MomentAccumulator::new(scenario.house.dim());
    for k in 0..scenario.trips as u64 {
        let mut stream = RngStream::new(seed, first_stream + k);
        let exit = draw_exit(&scenario.region, &scenario.house, &scenario.settings, &mut stream)?;
        acc.push(exit.exit_point.coords())?;
    }
    let estimate = Point::from_vec_unchecked(acc.mean().to_vec());
    let error = estimate.distance(&scenario.house);
    let predicted_rmse = scenario.predicted_rmse();
    Ok(PrivacyReport {
        estimate,
        error,
        predicted_rmse,
        ratio: predicted_rmse.map(|p| error / p),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub trips: usize,
    pub replications: usize,
    /// `√(mean error²)` over the replications.
    pub empirical_rmse: f64,
    /// Delta-method standard error of `empirical_rmse`.
    pub rmse_se: f64,
    pub predicted_rmse: Option<f64>,
    pub ratio: Option<f64>,
    /// Mean of the attacker's estimates across replications.
    pub mean_estimate: Point,
    pub estimate_se: Vec<f64>,
}

/// Attack error against the number of observed trips. Grid point `g` uses
/// seed `derive_seed(seed, g)`; replication `j` consumes streams
/// `j·trips .. (j+1)·trips` of it.
pub fn privacy_curve(
    base: &CloakScenario,
    trips_grid: &[usize],
    replications: usize,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    if replications == 0 {
        return Err(Error::invalid("replications", "must be at least 1"));
    }
    trips_grid
        .iter()
        .enumerate()
        .map(|(g, &trips)| {
            let scenario = base.with_trips(trips)?;
            let grid_seed = derive_seed(seed, g as u64);
            let reports: Vec<PrivacyReport> = (0..replications as u64)
                .into_par_iter()
                .map(|j| attack(&scenario, grid_seed, j * trips as u64))
                .collect::<Result<_>>()?;
            Ok(curve_row(&scenario, &reports))
        })
        .collect()
}

fn curve_row(scenario: &CloakScenario, reports: &[PrivacyReport]) -> CurveRow {
    let r = reports.len();
    let mut sq = MomentAccumulator::new(1);
    let mut est = MomentAccumulator::new(scenario.house.dim());
    for rep in reports {
        sq.push(&[rep.error * rep.error]).expect("scalar");
        est.push(rep.estimate.coords()).expect("dimension checked by the scenario");
    }
    let mean_sq = sq.mean()[0];
    let empirical_rmse = mean_sq.sqrt();
    let rmse_se = match sq.variances() {
        Some(v) if empirical_rmse > 0.0 => (v[0] / r as f64).sqrt() / (2.0 * empirical_rmse),
        _ => f64::INFINITY,
    };
    let estimate_se = match est.variances() {
        Some(v) => v.iter().map(|v| (v / r as f64).sqrt()).collect(),
        None => vec![f64::INFINITY; scenario.house.dim()],
    };
    let predicted_rmse = scenario.predicted_rmse();
    CurveRow {
        trips: scenario.trips,
        replications: r,
        empirical_rmse,
        rmse_se,
        predicted_rmse,
        ratio: predicted_rmse.map(|p| empirical_rmse / p),
        mean_estimate: Point::from_vec_unchecked(est.mean().to_vec()),
        estimate_se,
    }
}

/// Columns `trips,empirical_rmse,predicted_rmse,ratio`.
pub fn curve_table(rows: &[CurveRow]) -> Table {
    let header = ["trips", "empirical_rmse", "predicted_rmse", "ratio"]
        .map(String::from)
        .to_vec();
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.trips.to_string(),
                r.empirical_rmse.to_string(),
                fmt_opt(r.predicted_rmse),
                fmt_opt(r.ratio),
            ]
        })
        .collect();
    Table::new(header, body)
}
