//! Rectangular parameter-grid sweeps of scalar observables.
//!
//! Grid points are evaluated concurrently on a worker pool; the output row
//! order is the deterministic row-major order of the spec regardless of
//! scheduling. Per-point failures are flagged in the status column and the
//! sweep completes.

use crate::analysis::{self, KindSelector, ParamAxis};
use crate::correlators::OperatorKind;
use crate::error::{Error, Result};
use crate::model::{self, ModelParams, WINDING_DEFAULT_RESOLUTION};
use crate::output::{Cell, Table};
use serde::{Deserialize, Serialize};

/// One sweep axis: a parameter name and an inclusive linear range.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AxisSpec {
    pub param: ParamAxis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn value(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }
}

/// The scalar observable evaluated at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    FisherDensityBest,
    FisherDensity(OperatorKind),
    BExponent,
    CPrefactor,
    Winding,
    ChiMu,
    ChiDelta,
    ChiAlpha,
    Gap,
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::FisherDensityBest => "fisher_density_best".into(),
            Observable::FisherDensity(k) => format!("fisher_density_{k}"),
            Observable::BExponent => "b_exponent".into(),
            Observable::CPrefactor => "c_prefactor".into(),
            Observable::Winding => "winding".into(),
            Observable::ChiMu => "chi_mu".into(),
            Observable::ChiDelta => "chi_delta".into(),
            Observable::ChiAlpha => "chi_alpha".into(),
            Observable::Gap => "gap".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fisher_density_best" | "fisher_best" | "fq_best" => Some(Observable::FisherDensityBest),
            "b_exponent" | "b" => Some(Observable::BExponent),
            "c_prefactor" | "c" => Some(Observable::CPrefactor),
            "winding" => Some(Observable::Winding),
            "chi_mu" => Some(Observable::ChiMu),
            "chi_delta" => Some(Observable::ChiDelta),
            "chi_alpha" => Some(Observable::ChiAlpha),
            "gap" => Some(Observable::Gap),
            other => other
                .strip_prefix("fisher_density_")
                .or_else(|| other.strip_prefix("fq_"))
                .and_then(OperatorKind::parse)
                .map(Observable::FisherDensity),
        }
    }

    fn needs_sizes(&self) -> bool {
        matches!(self, Observable::BExponent | Observable::CPrefactor)
    }
}

/// Full description of a two-axis sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    /// Remaining model parameters; the axis fields are overwritten per point.
    pub fixed: ModelParams,
    pub observable: Observable,
    /// Size ladder, required when the observable is a scaling coefficient.
    pub sizes: Vec<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for ax in [&self.axis1, &self.axis2] {
            if ax.steps < 2 {
                return Err(Error::Sweep(format!(
                    "axis {} needs at least 2 steps",
                    ax.param.label()
                )));
            }
            if !(ax.min < ax.max) {
                return Err(Error::Sweep(format!(
                    "axis {} must be nondegenerate (min < max)",
                    ax.param.label()
                )));
            }
        }
        if self.axis1.param == self.axis2.param {
            return Err(Error::Sweep("axes must name distinct parameters".into()));
        }
        if self.observable.needs_sizes() && self.sizes.len() < 4 {
            return Err(Error::Sweep(format!(
                "observable {} needs a size ladder of at least 4 entries",
                self.observable.label()
            )));
        }
        self.fixed.validate()?;
        Ok(())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub axis1: f64,
    pub axis2: f64,
    /// NaN when the point failed; see `status`.
    pub value: f64,
    pub status: String,
}

/// Evaluated sweep with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub grid: Vec<GridPoint>,
    pub version: String,
    pub unix_time: u64,
}

impl SweepResult {
    pub fn any_failed(&self) -> bool {
        self.grid.iter().any(|p| p.status != "ok")
    }

    /// Renders the grid with the standard provenance comments.
    pub fn to_table(&self) -> Table {
        let f = &self.spec.fixed;
        let mut t = Table::new(&[
            self.spec.axis1.param.label(),
            self.spec.axis2.param.label(),
            &self.spec.observable.label(),
            "status",
        ]);
        t.comment(format!("generated_unix {}", self.unix_time));
        t.comment(format!(
            "fixed J={} mu={} delta={} alpha={} L={}",
            f.j, f.mu, f.delta, f.alpha, f.l
        ));
        if !self.spec.sizes.is_empty() {
            let sizes: Vec<String> = self.spec.sizes.iter().map(|s| s.to_string()).collect();
            t.comment(format!("sizes {}", sizes.join(";")));
        }
        t.comment(format!("observable {}", self.spec.observable.label()));
        for p in &self.grid {
            t.push_row(vec![
                Cell::Num(p.axis1),
                Cell::Num(p.axis2),
                Cell::Num(p.value),
                Cell::Text(p.status.clone()),
            ]);
        }
        t
    }
}

fn evaluate_point(spec: &SweepSpec, params: &ModelParams) -> Result<f64> {
    match spec.observable {
        Observable::FisherDensityBest => {
            analysis::fisher_density_for(params, KindSelector::Best)
        }
        Observable::FisherDensity(kind) => {
            analysis::fisher_density_for(params, KindSelector::Fixed(kind))
        }
        Observable::BExponent => {
            Ok(analysis::fit_scaling_for(params, &spec.sizes, KindSelector::Best)?.b)
        }
        Observable::CPrefactor => {
            Ok(analysis::fit_scaling_for(params, &spec.sizes, KindSelector::Best)?.c)
        }
        Observable::Winding => {
            Ok(model::winding(params, WINDING_DEFAULT_RESOLUTION)?.snapped)
        }
        Observable::ChiMu => Ok(analysis::susceptibility(params)?.chi_mu),
        Observable::ChiDelta => Ok(analysis::susceptibility(params)?.chi_delta),
        Observable::ChiAlpha => Ok(analysis::susceptibility(params)?.chi_alpha),
        Observable::Gap => Ok(model::solve(params)?.gap()),
    }
}

/// Runs the sweep on `workers` threads.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    use rayon::prelude::*;
    spec.validate()?;
    if workers < 1 {
        return Err(Error::Sweep("workers must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Sweep(e.to_string()))?;
    let n1 = spec.axis1.steps;
    let n2 = spec.axis2.steps;
    let grid: Vec<GridPoint> = pool.install(|| {
        (0..n1 * n2)
            .into_par_iter()
            .map(|idx| {
                let i = idx / n2;
                let j = idx % n2;
                let v1 = spec.axis1.value(i);
                let v2 = spec.axis2.value(j);
                let params = spec
                    .axis2
                    .param
                    .with_value(&spec.axis1.param.with_value(&spec.fixed, v1), v2);
                match params
                    .validate()
                    .and_then(|_| evaluate_point(spec, &params))
                {
                    Ok(v) => GridPoint { axis1: v1, axis2: v2, value: v, status: "ok".into() },
                    Err(e) => GridPoint {
                        axis1: v1,
                        axis2: v2,
                        value: f64::NAN,
                        status: e.to_string(),
                    },
                }
            })
            .collect()
    });
    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(SweepResult { spec: spec.clone(), grid, version: crate::VERSION.into(), unix_time })
}
