//! The Weyl function as a power series in the disc variable,
//!
//! ```text
//! m(lambda) = -(1/a0) Σ_{t>=1} z^t r_{t-1},   lambda = z + 1/z,
//! ```
//!
//! with a truncation bound derived from the amplitude envelope
//! `M_t <= (3B + 1)^t` of the delta-driven wave field.

use crate::dynamics::{response_vector, simulate, ControlSequence, Geometry, ResponseVector};
use crate::error::{Error, Result};
use crate::jacobi::{assemble_finite, Complex, JacobiCoefficients};
use crate::recursion::{weyl_resolvent, ResolventMode};
use crate::takagi::{response_sequence_from_measure, spectral_data, takagi_factorize};
use crate::transform::{in_region_d, lambda_to_z, s_sequence, RegionD};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Resolvent,
    Series,
    Measure,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Resolvent => "resolvent",
            Method::Series => "series",
            Method::Measure => "measure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylEvaluation {
    pub lambda: Complex,
    pub value: Complex,
    pub method: Method,
    /// Last `t` included in the sum (zero for non-series methods).
    pub truncation_t: usize,
    pub tail_bound: f64,
    pub in_region_d: bool,
}

/// `M_t <= (3B + 1)^t`.
#[derive(Debug, Clone, Copy)]
pub struct GrowthEnvelope {
    pub bound_b: f64,
}

impl GrowthEnvelope {
    pub fn new(bound_b: f64) -> Self {
        Self { bound_b }
    }

    pub fn rate(&self) -> f64 {
        3.0 * self.bound_b + 1.0
    }

    pub fn envelope(&self, t: usize) -> f64 {
        self.rate().powi(t as i32)
    }

    /// First `t` (1-based) where a measured `M_t` profile exceeds the
    /// envelope scaled by `max(1, |a0|)`.
    pub fn first_violation(&self, profile: &[f64], a0: Complex) -> Option<usize> {
        let scale = a0.norm().max(1.0);
        profile
            .iter()
            .enumerate()
            .find(|(i, m)| **m > scale * self.envelope(i + 1) * (1.0 + 1e-12))
            .map(|(i, _)| i + 1)
    }
}

fn contraction_checked(region: &RegionD, lambda: Complex) -> Result<f64> {
    let q = region.contraction(lambda);
    if q < 1.0 {
        Ok(q)
    } else {
        Err(Error::OutsideRegionD { z_times_r: q })
    }
}

/// `Σ_{t > from_t} (|z| R)^t = (|z| R)^{from_t + 1} / (1 - |z| R)`.
///
/// Since `|r_{t-1}| / |a0| <= R^{t-1}`, this dominates the modulus of the
/// dropped part of the series after `t = from_t`.
pub fn tail_bound(region: &RegionD, lambda: Complex, from_t: usize) -> Result<f64> {
    let q = contraction_checked(region, lambda)?;
    Ok(q.powi(from_t as i32 + 1) / (1.0 - q))
}

/// Sums the series until the tail bound drops below `tol`.
///
/// Returns [`Error::HorizonTooShort`] carrying the partial sum when `r`
/// runs out first.
pub fn weyl_series(
    r: &ResponseVector,
    lambda: Complex,
    region: &RegionD,
    tol: f64,
) -> Result<WeylEvaluation> {
    let q = contraction_checked(region, lambda)?;
    let z = lambda_to_z(lambda).value();
    let mut sum = Complex::new(0.0, 0.0);
    let mut zt = Complex::new(1.0, 0.0);
    let mut bound = 1.0 / (1.0 - q);
    let mut t = 0;
    while bound >= tol && t < r.len() {
        t += 1;
        zt *= z;
        sum += zt * r.r[t - 1];
        bound = q.powi(t as i32 + 1) / (1.0 - q);
    }
    let eval = WeylEvaluation {
        lambda,
        value: -sum / r.a0,
        method: Method::Series,
        truncation_t: t,
        tail_bound: bound,
        in_region_d: true,
    };
    if bound >= tol {
        return Err(Error::HorizonTooShort {
            partial: Box::new(eval),
        });
    }
    Ok(eval)
}

/// Plain partial sum `-(1/a0) Σ_{t=1}^{terms} z^t r_{t-1}` with no region check.
pub fn series_partial_sum(r: &ResponseVector, lambda: Complex, terms: usize) -> Complex {
    let z = lambda_to_z(lambda).value();
    let mut zt = Complex::new(1.0, 0.0);
    let mut sum = Complex::new(0.0, 0.0);
    for x in r.r.iter().take(terms) {
        zt *= z;
        sum += zt * x;
    }
    -sum / r.a0
}

/// `û_n(lambda) = Σ_t S_t(lambda) u^δ_{n,t}` for `n = 0..=n_max`, from a
/// half-line simulation of length `horizon`.
pub fn transformed_field(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n_max: usize,
    horizon: usize,
) -> Result<Vec<Complex>> {
    let field = simulate(coeffs, &ControlSequence::delta(horizon)?, Geometry::HalfLine)?;
    let s = s_sequence(lambda, horizon);
    Ok((0..=n_max)
        .map(|n| {
            (0..=horizon)
                .map(|t| s[t] * field.get(n, t as isize))
                .sum()
        })
        .collect())
}

/// Majorant of `Σ_{n<=n_max} |û_n(lambda)|^2`.
///
/// With the envelope `M_t <= max(1,|a0|) R^t` one has
/// `|û_n| <= max(1,|a0|) (|z|R)^n K`, `K = Σ_t (|z|R)^t = 1/(1 - |z|R)`.
pub fn l2_certificate(coeffs: &JacobiCoefficients, lambda: Complex, n_max: usize) -> Result<f64> {
    let region = RegionD::new(coeffs.effective_bound().max(f64::MIN_POSITIVE))?;
    let q = contraction_checked(&region, lambda)?;
    let k = 1.0 / (1.0 - q);
    let scale = coeffs.a0().norm().max(1.0);
    let sum: f64 = (0..=n_max).map(|n| q.powi(2 * n as i32)).sum();
    Ok(scale * scale * k * k * sum)
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    /// Block size of the finite problem.
    pub n: usize,
    /// Length of the half-line and interval response vectors.
    pub horizon: usize,
    /// Truncation for the semi-infinite resolvent.
    pub n_trunc: usize,
    pub trunc_tol: f64,
    pub series_tol: f64,
    /// Bound `B` for the region; defaults to the coefficients' effective bound.
    pub bound_b: Option<f64>,
}

impl CompareOptions {
    pub fn new(n: usize, horizon: usize) -> Self {
        Self {
            n,
            horizon,
            n_trunc: 60,
            trunc_tol: 1e-10,
            series_tol: 1e-12,
            bound_b: None,
        }
    }
}

/// One method's outcome at one `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Value { value: Complex, tail_bound: f64 },
    /// Series ran out of terms; value is the partial sum.
    Partial { value: Complex, tail_bound: f64 },
    Failed(String),
}

impl Outcome {
    pub fn value(&self) -> Option<Complex> {
        match self {
            Outcome::Value { value, .. } | Outcome::Partial { value, .. } => Some(*value),
            Outcome::Failed(_) => None,
        }
    }

    fn from_series(res: Result<WeylEvaluation>) -> Self {
        match res {
            Ok(e) => Outcome::Value {
                value: e.value,
                tail_bound: e.tail_bound,
            },
            Err(Error::HorizonTooShort { partial }) => Outcome::Partial {
                value: partial.value,
                tail_bound: partial.tail_bound,
            },
            Err(e) => Outcome::Failed(e.to_string()),
        }
    }

    fn from_plain(res: Result<Complex>) -> Self {
        match res {
            Ok(value) => Outcome::Value {
                value,
                tail_bound: 0.0,
            },
            Err(e) => Outcome::Failed(e.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub lambda: Complex,
    pub z: Complex,
    /// `|z| R`.
    pub contraction: f64,
    pub in_region_d: bool,
    pub resolvent_finite: Outcome,
    pub series_interval: Outcome,
    pub series_measure: Outcome,
    pub resolvent_semiinfinite: Outcome,
    pub series_halfline: Outcome,
}

fn deviation(a: &Outcome, b: &Outcome) -> Option<(f64, f64)> {
    let (x, y) = (a.value()?, b.value()?);
    let abs = (x - y).norm();
    Some((abs, abs / x.norm().max(f64::MIN_POSITIVE)))
}

impl ComparisonRow {
    /// `(abs, rel)` deviation of each finite-block route from the finite resolvent.
    pub fn finite_deviations(&self) -> [Option<(f64, f64)>; 2] {
        [
            deviation(&self.resolvent_finite, &self.series_interval),
            deviation(&self.resolvent_finite, &self.series_measure),
        ]
    }

    /// `(abs, rel)` deviation of the half-line series from the truncated resolvent.
    pub fn semiinfinite_deviation(&self) -> Option<(f64, f64)> {
        deviation(&self.resolvent_semiinfinite, &self.series_halfline)
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub n: usize,
    pub horizon: usize,
    pub bound_b: f64,
    pub r_big: f64,
    pub rows: Vec<ComparisonRow>,
    /// Both readings of the series index, recorded for the report header.
    pub index_note: &'static str,
}

pub const INDEX_NOTE: &str = "series evaluated as m = -(1/a0) sum_{t>=1} z^t r_{t-1} with r_t = u_{1,t+1}; \
equivalently m = -sum_{t>=0} z^{t+1} rr_t if rr denotes the response shifted to start at u_{1,1}";

/// Evaluates every route at every `lambda` and collects per-route outcomes.
pub fn compare_methods(
    coeffs: &JacobiCoefficients,
    lambdas: &[Complex],
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    let bound_b = opts.bound_b.unwrap_or_else(|| coeffs.effective_bound());
    let region = RegionD::new(bound_b.max(f64::MIN_POSITIVE))?;
    let interval = response_vector(coeffs, opts.horizon, Geometry::Interval(opts.n));
    let halfline = response_vector(coeffs, opts.horizon, Geometry::HalfLine);
    let measure = assemble_finite(coeffs, opts.n)
        .and_then(|m| takagi_factorize(&m))
        .and_then(|f| spectral_data(&f, coeffs.a0()))
        .map(|data| ResponseVector {
            r: response_sequence_from_measure(&data, opts.horizon),
            a0: coeffs.a0(),
        });

    let series = |r: &Result<ResponseVector>, lambda| match r {
        Ok(r) => Outcome::from_series(weyl_series(r, lambda, &region, opts.series_tol)),
        Err(e) => Outcome::Failed(e.to_string()),
    };

    let rows = lambdas
        .iter()
        .map(|&lambda| ComparisonRow {
            lambda,
            z: lambda_to_z(lambda).value(),
            contraction: region.contraction(lambda),
            in_region_d: in_region_d(lambda, &region),
            resolvent_finite: Outcome::from_plain(weyl_resolvent(
                coeffs,
                lambda,
                ResolventMode::Finite(opts.n),
            )),
            series_interval: series(&interval, lambda),
            series_measure: series(&measure, lambda),
            resolvent_semiinfinite: Outcome::from_plain(weyl_resolvent(
                coeffs,
                lambda,
                ResolventMode::SemiInfinite {
                    n_trunc: opts.n_trunc,
                    tol: opts.trunc_tol,
                },
            )),
            series_halfline: series(&halfline, lambda),
        })
        .collect();

    Ok(ComparisonReport {
        n: opts.n,
        horizon: opts.horizon,
        bound_b,
        r_big: region.r_big(),
        rows,
        index_note: INDEX_NOTE,
    })
}
