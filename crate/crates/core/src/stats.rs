//! Empirical mean and covariance trace of exit samples, their standard
//! errors, and z-score comparisons against the closed forms.

use serde::Serialize;

use crate::ball_exact::theoretical_trace;
use crate::error::{Error, Result};
use crate::geometry::{distance_sq, Domain, Point};
use crate::report::{fmt_exact, fmt_opt, Table};
use crate::sampler::{sample_batch, ExitSample, Method, SamplerSettings};
use crate::sampling::derive_seed;

/// Rows with any `|z|` above this are flagged as failures.
pub const Z_THRESHOLD: f64 = 4.0;

/// Welford/Chan accumulator of per-coordinate means and centred second
/// moments. Batches can be merged in any grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        MomentAccumulator {
            n: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if other.n == 0 {
            return Ok(());
        }
        if self.n == 0 {
            *self = other.clone();
            return Ok(());
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for i in 0..self.dim() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.n += other.n;
        Ok(())
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased per-coordinate variances; `None` below two observations.
    pub fn variances(&self) -> Option<Vec<f64>> {
        (self.n >= 2).then(|| self.m2.iter().map(|s| s / (self.n - 1) as f64).collect())
    }

    /// Sum of the unbiased per-coordinate variances.
    pub fn trace(&self) -> Option<f64> {
        self.variances().map(|v| v.iter().sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: Point,
    /// Sum of unbiased coordinate variances. Zero when `n = 1`.
    pub trace: f64,
    /// Infinite when `n = 1`.
    pub mean_se: Vec<f64>,
    /// Infinite when `n = 1`.
    pub trace_se: f64,
    pub trace_se_method: &'static str,
}

pub fn summarize(samples: &[ExitSample]) -> Result<SummaryStats> {
    summarize_points(samples.iter().map(|s| &s.exit_point))
}

/// Two passes: accumulate moments, then the delta-method standard error of
/// the trace, `sd(‖y_k − ȳ‖²)/√n`.
pub fn summarize_points<'a, I>(points: I) -> Result<SummaryStats>
where
    I: IntoIterator<Item = &'a Point>,
    I::IntoIter: Clone,
{
    let points = points.into_iter();
    let mut acc: Option<MomentAccumulator> = None;
    for p in points.clone() {
        acc.get_or_insert_with(|| MomentAccumulator::new(p.dim()))
            .push(p.coords())?;
    }
    let acc = acc.ok_or(Error::EmptySample)?;
    let n = acc.count() as usize;
    let mean = acc.mean().to_vec();
    let (trace, mean_se, trace_se) = match acc.variances() {
        None => (0.0, vec![f64::INFINITY; acc.dim()], f64::INFINITY),
        Some(vars) => {
            let trace: f64 = vars.iter().sum();
            let mean_se = vars.iter().map(|v| (v / n as f64).sqrt()).collect();
            let mut spread = MomentAccumulator::new(1);
            for p in points {
                spread.push(&[distance_sq(p.coords(), &mean)])?;
            }
            let z_var = spread.variances().map_or(0.0, |v| v[0]);
            (trace, mean_se, (z_var / n as f64).sqrt())
        }
    };
    Ok(SummaryStats {
        n,
        mean: Point::from_vec_unchecked(mean),
        trace,
        mean_se,
        trace_se,
        trace_se_method: "delta",
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// Some standard error is unavailable (n < 2) and nothing failed.
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undetermined => "NA",
        }
    }
}

/// Which sampler produced a summary, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowLabel {
    pub method: Method,
    pub dt: Option<f64>,
    pub epsilon: Option<f64>,
}

impl RowLabel {
    pub fn from_settings(settings: &SamplerSettings) -> Self {
        RowLabel {
            method: settings.method,
            dt: (settings.method == Method::Brownian).then_some(settings.brownian.dt),
            epsilon: (settings.method == Method::Wos).then_some(settings.wos.epsilon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub dim: usize,
    pub theta: Point,
    pub label: RowLabel,
    /// `None` for non-ball domains.
    pub theoretical_trace: Option<f64>,
    pub summary: SummaryStats,
    pub z_mean: Vec<Option<f64>>,
    pub z_trace: Option<f64>,
    pub verdict: Verdict,
}

fn z_score(empirical: f64, theoretical: f64, se: f64) -> Option<f64> {
    if !se.is_finite() {
        return None;
    }
    let diff = empirical - theoretical;
    if se == 0.0 {
        return Some(if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY });
    }
    Some(diff / se)
}

/// z-scores of the empirical mean against `θ` and, on balls, of the
/// empirical trace against `r² − ‖θ − c‖²`.
pub fn compare(summary: &SummaryStats, domain: &Domain, theta: &Point, label: RowLabel) -> Result<ComparisonRow> {
    summary.mean.check_dim(domain.dim())?;
    theta.check_dim(domain.dim())?;
    let theoretical_trace = match domain {
        Domain::Ball(b) => Some(theoretical_trace(b, theta)?),
        Domain::Box(_) => {
            if !domain.contains(theta)? {
                return Err(Error::NotInterior);
            }
            None
        }
    };
    let z_mean: Vec<Option<f64>> = (0..domain.dim())
        .map(|i| z_score(summary.mean[i], theta[i], summary.mean_se[i]))
        .collect();
    let z_trace = theoretical_trace.and_then(|t| z_score(summary.trace, t, summary.trace_se));
    let mut scores = z_mean.clone();
    if theoretical_trace.is_some() {
        scores.push(z_trace);
    }
    let verdict = if scores.iter().flatten().any(|z| !(z.abs() <= Z_THRESHOLD)) {
        Verdict::Fail
    } else if scores.iter().any(Option::is_none) {
        Verdict::Undetermined
    } else {
        Verdict::Pass
    };
    Ok(ComparisonRow {
        dim: domain.dim(),
        theta: theta.clone(),
        label,
        theoretical_trace,
        summary: summary.clone(),
        z_mean,
        z_trace,
        verdict,
    })
}

/// The nine `(d, ρ)` settings of the reference table, in row order: exits
/// from the unit ball started at `ρ e₁`.
pub const TABLE1_SETTINGS: [(usize, f64); 9] = [
    (2, 0.2),
    (2, 0.5),
    (2, 0.8),
    (3, 0.2),
    (3, 0.5),
    (3, 0.8),
    (4, 0.2),
    (4, 0.5),
    (4, 0.8),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Config {
    pub settings: SamplerSettings,
    pub n: usize,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config {
            settings: SamplerSettings::default(),
            n: 500,
        }
    }
}

/// Runs every reference setting; row `k` draws from seed `derive_seed(seed, k)`.
pub fn reproduce_table1(cfg: &Table1Config, seed: u64) -> Result<Vec<ComparisonRow>> {
    if cfg.n == 0 {
        return Err(Error::EmptySample);
    }
    let label = RowLabel::from_settings(&cfg.settings);
    TABLE1_SETTINGS
        .iter()
        .enumerate()
        .map(|(k, &(d, rho))| {
            let domain: Domain = crate::geometry::Ball::unit(d).into();
            let theta = Point::on_axis(d, rho);
            let samples = sample_batch(&domain, &theta, &cfg.settings, derive_seed(seed, k as u64), cfg.n)?;
            compare(&summarize(&samples)?, &domain, &theta, label)
        })
        .collect()
}

/// Columns `d,method,n,dt,epsilon,theta_*,mean_*,trace_theory,trace_hat,trace_se,z_trace,pass`,
/// with at least four coordinate columns; unused ones are left empty.
pub fn comparison_table(rows: &[ComparisonRow]) -> Table {
    let width = rows.iter().map(|r| r.dim).max().unwrap_or(0).max(4);
    let mut header: Vec<String> = ["d", "method", "n", "dt", "epsilon"].map(String::from).to_vec();
    header.extend((1..=width).map(|i| format!("theta_{i}")));
    header.extend((1..=width).map(|i| format!("mean_{i}")));
    header.extend(["trace_theory", "trace_hat", "trace_se", "z_trace", "pass"].map(String::from));
    let coords = |p: &Point| -> Vec<String> {
        (0..width)
            .map(|i| if i < p.dim() { p[i].to_string() } else { String::new() })
            .collect()
    };
    let body = rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                r.dim.to_string(),
                r.label.method.to_string(),
                r.summary.n.to_string(),
                fmt_opt(r.label.dt),
                fmt_opt(r.label.epsilon),
            ];
            cells.extend(coords(&r.theta));
            cells.extend(coords(&r.summary.mean));
            cells.push(fmt_exact(r.theoretical_trace));
            cells.push(r.summary.trace.to_string());
            cells.push(fmt_opt(r.summary.trace_se.is_finite().then_some(r.summary.trace_se)));
            cells.push(fmt_opt(r.z_trace));
            cells.push(r.verdict.as_str().to_string());
            cells
        })
        .collect();
    Table::new(header, body)
}
