use rayon::prelude::*;

use super::{evaluate_gate, GateReport, GateSettings};
use crate::error::{Error, Result};
use crate::trap::TrapSpec;

/// A failed grid point, kept so the scan can continue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowFailure {
    pub message: String,
    pub exit_code: i32,
}

impl RowFailure {
    pub fn to_error(&self) -> Error {
        Error::ScanFailed { message: self.message.clone(), code: self.exit_code }
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub eta: f64,
    pub n_bar_c: f64,
    pub outcome: std::result::Result<GateReport, RowFailure>,
}

/// Evaluates every `(η, n̄_c)` point of `grid` with `base` settings.
///
/// Rows run on a pool of `jobs` threads (all cores when `None`) and come
/// back in grid order.
pub fn scan(spec: &TrapSpec, grid: &[(f64, f64)], base: &GateSettings, jobs: Option<usize>) -> Result<Vec<ScanRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("scan grid is empty".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Numeric(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        grid.par_iter()
            .map(|&(eta, n_bar_c)| {
                let settings = GateSettings { eta, n_bar_c, ..base.clone() };
                let outcome = evaluate_gate(spec, &settings).map_err(|e| {
                    log::warn!("scan point eta={eta}, n_bar_c={n_bar_c} failed: {e}");
                    RowFailure { message: e.to_string(), exit_code: e.exit_code() }
                });
                ScanRow { eta, n_bar_c, outcome }
            })
            .collect()
    });
    Ok(rows)
}
