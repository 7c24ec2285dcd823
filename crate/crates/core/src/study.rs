//! Error measurement, convergence studies and long-run boundedness checks.

use std::time::Instant;

use crate::adi::{advance, AdvanceOptions, FieldState, Scheme, Stepper};
use crate::cases::ExampleCase;
use crate::error::{Error, Result};
use crate::geometry::{classify_nodes, Grid2D, Side};

/// `(L_inf, L2)` with L2 the root mean square over all nodes.
pub fn field_error(grid: &Grid2D, sides: &[Side], case: &ExampleCase, state: &FieldState) -> (f64, f64) {
    let n = grid.n();
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for (p, &v) in state.u.iter().enumerate() {
        let exact = case.exact.value(sides[p], grid.x(p % n), grid.y(p / n), state.t);
        let e = (v - exact).abs();
        if e.is_nan() {
            return (f64::NAN, f64::NAN);
        }
        max = max.max(e);
        sum += e * e;
    }
    (max, (sum / state.u.len() as f64).sqrt())
}

pub fn exact_error(case: &ExampleCase, grid: &Grid2D, state: &FieldState) -> (f64, f64) {
    let sides = classify_nodes(grid, &case.interface);
    field_error(grid, &sides, case, state)
}

/// Exact solution sampled at the nodes.
pub fn exact_field(case: &ExampleCase, grid: &Grid2D, t: f64) -> FieldState {
    let n = grid.n();
    let sides = classify_nodes(grid, &case.interface);
    let u = (0..n * n)
        .map(|p| case.exact.value(sides[p], grid.x(p % n), grid.y(p / n), t))
        .collect();
    FieldState { u, t }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub linf: f64,
    pub l2: f64,
    pub wall_seconds: f64,
}

/// Run one case to its final time and measure the error.
pub fn run_case(case: &ExampleCase, n: usize, dt: f64, t_final: f64, scheme: Scheme) -> Result<(FieldState, ErrorRecord)> {
    let problem = case.problem(n)?;
    let start = Instant::now();
    let (state, _) = advance(&problem, scheme, dt, t_final, AdvanceOptions::default())?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let (linf, l2) = exact_error(case, &problem.grid, &state);
    Ok((
        state,
        ErrorRecord {
            n,
            dt,
            t_final,
            linf,
            l2,
            wall_seconds,
        },
    ))
}

/// `log(e_coarse / e_fine) / log(refinement)` between consecutive records.
pub fn pairwise_orders(errors: &[f64], steps: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for k in 1..errors.len() {
        let ratio = steps[k - 1] / steps[k];
        let o = (errors[k - 1] / errors[k]).ln() / ratio.ln();
        out.push(o.is_finite().then_some(o));
    }
    out.truncate(errors.len());
    out
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::FitUnderdetermined { points: pts.len() });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitUnderdetermined { points: 1 });
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub records: Vec<ErrorRecord>,
    pub order_linf: Vec<Option<f64>>,
    pub order_l2: Vec<Option<f64>>,
}

/// Mesh refinement study at a fixed step size.
pub fn spatial_convergence(case: &ExampleCase, meshes: &[usize], dt: f64, t_final: f64) -> Result<ConvergenceTable> {
    let mut records = Vec::with_capacity(meshes.len());
    for &n in meshes {
        let (_, rec) = run_case(case, n, dt, t_final, Scheme::Douglas)?;
        log::info!("{} N={n}: Linf {:.3e} L2 {:.3e} ({:.1}s)", case.id, rec.linf, rec.l2, rec.wall_seconds);
        records.push(rec);
    }
    let h: Vec<f64> = records.iter().map(|r| 1.0 / (r.n as f64 - 1.0)).collect();
    let order_linf = pairwise_orders(&records.iter().map(|r| r.linf).collect::<Vec<_>>(), &h);
    let order_l2 = pairwise_orders(&records.iter().map(|r| r.l2).collect::<Vec<_>>(), &h);
    Ok(ConvergenceTable {
        records,
        order_linf,
        order_l2,
    })
}

impl ConvergenceTable {
    /// Least-squares spatial order from `(h, error)` pairs.
    pub fn fitted_spatial_order(&self) -> Result<(f64, f64)> {
        let h: Vec<f64> = self.records.iter().map(|r| 1.0 / (r.n as f64 - 1.0)).collect();
        let linf: Vec<f64> = self.records.iter().map(|r| r.linf).collect();
        let l2: Vec<f64> = self.records.iter().map(|r| r.l2).collect();
        Ok((log_log_slope(&h, &linf)?, log_log_slope(&h, &l2)?))
    }
}

/// Fitted temporal rates for one norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalFit {
    /// Slope over records above the spatial-precision plateau.
    pub rate: f64,
    /// Indices of the records used for `rate`.
    pub fitted: Vec<usize>,
    /// Slope over the whole sweep.
    pub full_rate: Option<f64>,
    /// Slope over the descending branch that follows a polluted region at large steps.
    pub descending_rate: Option<f64>,
    pub descending: Vec<usize>,
    /// Leading records whose errors stay near the largest one.
    pub polluted: Vec<usize>,
    /// The polluted records span at least `POLLUTION_SPAN` in step size.
    pub plateau_detected: bool,
}

/// Errors within this factor of the sweep minimum count as the spatial plateau.
pub const PLATEAU_FACTOR: f64 = 1.5;
/// Leading errors within this factor of the largest count as polluted.
pub const POLLUTION_FACTOR: f64 = 10.0;
/// Ratio of step sizes a polluted run must cover to count as a plateau.
pub const POLLUTION_SPAN: f64 = 10.0;

/// Fit temporal rates; `dts` must be in decreasing order.
pub fn fit_temporal(dts: &[f64], errors: &[f64]) -> Result<TemporalFit> {
    let min = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    // Records from the first one that reaches the plateau onwards are excluded.
    let cut = errors.iter().position(|&e| e <= PLATEAU_FACTOR * min).unwrap_or(errors.len());
    let fitted: Vec<usize> = (0..cut).collect();
    let pick = |idx: &[usize], v: &[f64]| idx.iter().map(|&k| v[k]).collect::<Vec<f64>>();
    let rate = log_log_slope(&pick(&fitted, dts), &pick(&fitted, errors))?;
    let full_rate = log_log_slope(dts, errors).ok();

    // Polluted region: the leading run of errors within POLLUTION_FACTOR of the
    // largest pre-plateau error. The descending branch is what follows it.
    let peak = errors[..cut.max(1)].iter().cloned().fold(0.0, f64::max);
    let run = errors[..cut]
        .iter()
        .position(|&e| e <= peak / POLLUTION_FACTOR)
        .unwrap_or(cut);
    let polluted: Vec<usize> = (0..run).collect();
    let descending: Vec<usize> = (run..cut).collect();
    let descending_rate = if descending.len() >= 2 {
        log_log_slope(&pick(&descending, dts), &pick(&descending, errors)).ok()
    } else {
        None
    };
    let plateau_detected = run >= 2 && dts[0] / dts[run - 1] >= POLLUTION_SPAN;
    Ok(TemporalFit {
        rate,
        fitted,
        full_rate,
        descending_rate,
        descending,
        polluted,
        plateau_detected,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalStudy {
    pub records: Vec<ErrorRecord>,
    pub order_linf: Vec<Option<f64>>,
    pub order_l2: Vec<Option<f64>>,
    pub fit_linf: Option<TemporalFit>,
    pub fit_l2: Option<TemporalFit>,
}

/// Step-size sweep on a fixed mesh; `dts` are sorted into decreasing order.
pub fn temporal_convergence(case: &ExampleCase, dts: &[f64], n: usize, t_final: f64) -> Result<TemporalStudy> {
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    let mut records = Vec::with_capacity(dts.len());
    for &dt in &dts {
        let (_, rec) = run_case(case, n, dt, t_final, Scheme::Douglas)?;
        log::info!("{} dt={dt:e}: Linf {:.3e} L2 {:.3e} ({:.1}s)", case.id, rec.linf, rec.l2, rec.wall_seconds);
        records.push(rec);
    }
    let linf: Vec<f64> = records.iter().map(|r| r.linf).collect();
    let l2: Vec<f64> = records.iter().map(|r| r.l2).collect();
    Ok(TemporalStudy {
        order_linf: pairwise_orders(&linf, &dts),
        order_l2: pairwise_orders(&l2, &dts),
        fit_linf: fit_temporal(&dts, &linf).ok(),
        fit_l2: fit_temporal(&dts, &l2).ok(),
        records,
    })
}

/// Decade-spaced default sweep `1, 0.5, 0.1, 0.05, ..., 1e-6`.
pub fn default_dt_sweep() -> Vec<f64> {
    let mut out = Vec::new();
    for e in 0..=6 {
        let base = 10f64.powi(-e);
        out.push(base);
        if e < 6 {
            out.push(base / 2.0);
        }
    }
    out
}

/// Threshold on growth relative to the error after ten steps.
pub const BLOWUP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundednessRecord {
    pub dt: f64,
    pub steps: usize,
    /// `L_inf` error after every step (index 0 is the initial error).
    pub history: Vec<f64>,
    pub max_error: f64,
    pub reference_error: f64,
    pub bounded: bool,
}

/// Long run with `steps` steps per step size; records the running error.
pub fn boundedness_run(case: &ExampleCase, n: usize, dts: &[f64], steps: usize) -> Result<Vec<BoundednessRecord>> {
    let problem = case.problem(n)?;
    let sides = classify_nodes(&problem.grid, &problem.interface);
    let mut out = Vec::with_capacity(dts.len());
    for &dt in dts {
        let mut stepper = Stepper::new(&problem, dt)?;
        let mut state = stepper.initial_state();
        let mut history = Vec::with_capacity(steps + 1);
        history.push(field_error(&problem.grid, &sides, case, &state).0);
        for k in 0..steps {
            stepper.douglas_step_in_place(&mut state)?;
            state.t = (k + 1) as f64 * dt;
            let e = field_error(&problem.grid, &sides, case, &state).0;
            history.push(e);
            if !e.is_finite() {
                break;
            }
        }
        let max_error = history.iter().cloned().fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        let reference_error = history.get(10).copied().unwrap_or(*history.last().expect("initial error recorded"));
        let finite = history.iter().all(|e| e.is_finite());
        let bounded = finite && history.iter().all(|&e| e <= BLOWUP_FACTOR * reference_error.max(f64::MIN_POSITIVE));
        log::info!("{} N={n} dt={dt}: max error {max_error:.3e} over {steps} steps", case.id);
        out.push(BoundednessRecord {
            dt,
            steps,
            history,
            max_error,
            reference_error,
            bounded,
        });
    }
    Ok(out)
}
