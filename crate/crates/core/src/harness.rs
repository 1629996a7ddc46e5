//! Closed-loop scenario execution, time-series recording and run metrics.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::attitude_error;
use crate::control::{
    benchmark_control, modified_benchmark_control, pdav_control, ultimate_bounds, upsilon,
    BenchmarkGains, ModelEstimate, PdavGains,
};
use crate::error::{Error, Result};
use crate::rigid_body::{pointing, step, BodyState, RigidBodyParams, StepSize};
use crate::so3::{RotationMatrix, Vector3};
use crate::trajectory::{PdavTrajectory, Reference, SetpointSchedule, TiltCoefficients};

/// Threshold on `Ψ` used for settling times.
pub const SETTLE_PSI: f64 = 0.01;
/// Start of the post-transient window for the tracking bound, seconds.
pub const POST_TRANSIENT_START: f64 = 2.0;
/// Default window for the `ln V` slope fit, seconds.
pub const LYAPUNOV_FIT_WINDOW: (f64, f64) = (0.1, 1.0);
/// Smallest `V` accepted by the slope fit.
pub const LYAPUNOV_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    StabilizeCompare,
    Pdav,
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::StabilizeCompare => "stabilize-compare",
            Self::Pdav => "pdav",
        })
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub params: RigidBodyParams,
    /// Estimates handed to the tracking law when `perturbed` is set.
    pub estimate: ModelEstimate,
    pub perturbed: bool,
    pub pdav_gains: PdavGains,
    pub benchmark_gains: BenchmarkGains,
    pub step: StepSize,
    pub t_end: f64,
    pub initial: BodyState,
    pub switch_time: f64,
    pub tilt: TiltCoefficients,
    /// Keep every `stride`-th sample.
    pub stride: usize,
    pub output: Option<PathBuf>,
}

/// Default `Ĵ / J`.
pub const INERTIA_ESTIMATE_SCALE: f64 = 1.14;
/// Default `ĉ / c`.
pub const FRICTION_ESTIMATE_SCALE: f64 = 1.03;

impl ScenarioConfig {
    /// Reference parameters, gains, and initial state `Q = I`,
    /// `ᵇω = [0, 0.3, 0]`, with a 20 s horizon at `h = 1e−3`.
    pub fn reference(kind: ScenarioKind) -> Self {
        let params = RigidBodyParams::reference();
        Self {
            kind,
            params,
            estimate: ModelEstimate::scaled(
                &params,
                INERTIA_ESTIMATE_SCALE,
                FRICTION_ESTIMATE_SCALE,
            )
            .expect("reference estimates are valid"),
            perturbed: false,
            pdav_gains: PdavGains::reference(),
            benchmark_gains: BenchmarkGains::reference(),
            step: StepSize::DEFAULT,
            t_end: 20.0,
            initial: BodyState::new(RotationMatrix::identity(), Vector3::new(0.0, 0.3, 0.0)),
            switch_time: crate::trajectory::DEFAULT_SWITCH_TIME,
            tilt: TiltCoefficients::default(),
            stride: 1,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        if !(self.switch_time.is_finite() && self.switch_time > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "switch_time must be positive, got {}",
                self.switch_time
            )));
        }
        RotationMatrix::new(*self.initial.attitude.matrix())?;
        Ok(())
    }

    /// Estimates actually used by the tracking law.
    pub fn controller_estimate(&self) -> ModelEstimate {
        if self.perturbed {
            self.estimate
        } else {
            ModelEstimate::perfect(&self.params)
        }
    }

    fn step_count(&self) -> usize {
        (self.t_end / self.step.get()).round() as usize
    }
}

/// One recorded instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q: Vector3,
    pub q_d: Vector3,
    pub psi: f64,
    pub psi_r: f64,
    pub e_q: Vector3,
    pub e_omega: Vector3,
    pub omega: Vector3,
    pub omega_d: Vector3,
    pub u: Vector3,
    pub s: Vector3,
    pub v: f64,
    pub upsilon: Vector3,
    pub bound: Vector3,
    pub attitude: RotationMatrix,
    pub desired_attitude: RotationMatrix,
}

const VECTOR_COLUMNS: [(&str, usize); 16] = [
    ("t", 1),
    ("q", 3),
    ("q_d", 3),
    ("psi", 1),
    ("psi_r", 1),
    ("e_q", 3),
    ("e_omega", 3),
    ("omega", 3),
    ("omega_d", 3),
    ("u", 3),
    ("s", 3),
    ("V", 1),
    ("upsilon", 3),
    ("bound", 3),
    ("Q", 9),
    ("Q_d", 9),
];

/// Column names, in CSV order. Matrices are row-major (`Q_11, Q_12, …`).
pub fn column_names() -> Vec<String> {
    let mut names = Vec::new();
    for (base, width) in VECTOR_COLUMNS {
        match width {
            1 => names.push(base.to_string()),
            3 => names.extend((1..=3).map(|i| format!("{base}_{i}"))),
            _ => {
                for r in 1..=3 {
                    names.extend((1..=3).map(|c| format!("{base}_{r}{c}")));
                }
            }
        }
    }
    names
}

impl Sample {
    fn values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(54);
        v.push(self.t);
        v.extend(self.q.iter());
        v.extend(self.q_d.iter());
        v.push(self.psi);
        v.push(self.psi_r);
        for x in [
            &self.e_q,
            &self.e_omega,
            &self.omega,
            &self.omega_d,
            &self.u,
            &self.s,
        ] {
            v.extend(x.iter());
        }
        v.push(self.v);
        v.extend(self.upsilon.iter());
        v.extend(self.bound.iter());
        for m in [&self.attitude, &self.desired_attitude] {
            let m = m.matrix();
            for r in 0..3 {
                for c in 0..3 {
                    v.push(m[(r, c)]);
                }
            }
        }
        v
    }

    fn from_values(v: &[f64]) -> Result<Self> {
        let vec3 = |i: usize| Vector3::new(v[i], v[i + 1], v[i + 2]);
        let mat = |i: usize| -> Result<RotationMatrix> {
            RotationMatrix::new(nalgebra::Matrix3::from_row_slice(&v[i..i + 9]))
        };
        Ok(Self {
            t: v[0],
            q: vec3(1),
            q_d: vec3(4),
            psi: v[7],
            psi_r: v[8],
            e_q: vec3(9),
            e_omega: vec3(12),
            omega: vec3(15),
            omega_d: vec3(18),
            u: vec3(21),
            s: vec3(24),
            v: v[27],
            upsilon: vec3(28),
            bound: vec3(31),
            attitude: mat(34)?,
            desired_attitude: mat(43)?,
        })
    }

    /// Value of the named column.
    pub fn get(&self, column: &str) -> Option<f64> {
        let idx = column_names().iter().position(|c| c == column)?;
        Some(self.values()[idx])
    }
}

/// Recorded trajectory of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub rows: Vec<Sample>,
}

impl TimeSeries {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// Values of a named column, or `None` if no such column exists.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = column_names().iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values()[idx]).collect())
    }

    /// Rows with `start ≤ t < end`.
    pub fn window(&self, start: f64, end: f64) -> TimeSeries {
        TimeSeries {
            rows: self
                .rows
                .iter()
                .filter(|r| r.t >= start && r.t < end)
                .copied()
                .collect(),
        }
    }

    /// CSV text: a header row, then one row per sample with 17 significant
    /// digits so values round-trip exactly.
    pub fn to_csv(&self) -> String {
        let mut out = column_names().join(",");
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for x in row.values() {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{x:.16e}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let expected = column_names();
        match lines.next() {
            Some((_, header)) if header.split(',').eq(expected.iter().map(String::as_str)) => {}
            _ => {
                return Err(Error::Config {
                    line: 1,
                    message: "unexpected CSV header".into(),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let values: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let values = values.map_err(|e| Error::Config {
                line: i + 1,
                message: e.to_string(),
            })?;
            if values.len() != expected.len() {
                return Err(Error::Config {
                    line: i + 1,
                    message: format!("expected {} fields, got {}", expected.len(), values.len()),
                });
            }
            rows.push(Sample::from_values(&values)?);
        }
        Ok(Self { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&fs::read_to_string(path)?)
    }

    /// Settling time of a named column, see [`time_to_threshold`].
    pub fn time_to_threshold(&self, column: &str, threshold: f64) -> Result<f64> {
        let values = self
            .column(column)
            .ok_or_else(|| Error::InvalidParameter(format!("no column named `{column}`")))?;
        Ok(time_to_threshold(&self.times(), &values, threshold))
    }

    /// Per-axis `(max |s_j|, max bound_j)` over the final `fraction` of the
    /// run.
    pub fn final_envelope(&self, fraction: f64) -> [(f64, f64); 3] {
        let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) else {
            return [(0.0, 0.0); 3];
        };
        let start = last.t - fraction * (last.t - first.t);
        let mut out = [(0.0f64, 0.0f64); 3];
        for r in self.rows.iter().filter(|r| r.t >= start) {
            for (j, o) in out.iter_mut().enumerate() {
                o.0 = o.0.max(r.s[j].abs());
                o.1 = o.1.max(r.bound[j]);
            }
        }
        out
    }
}

/// First sample time after which `values` stays strictly below `threshold`
/// through the end of the series; `+∞` if the last sample is not below.
pub fn time_to_threshold(times: &[f64], values: &[f64], threshold: f64) -> f64 {
    let mut settled = f64::INFINITY;
    for (t, v) in times.iter().zip(values).rev() {
        if *v < threshold {
            settled = *t;
        } else {
            break;
        }
    }
    settled
}

/// Least-squares slope of `ln V` against `t` over `t0 ≤ t ≤ t1`.
pub fn fit_lyapunov_rate(times: &[f64], v: &[f64], t0: f64, t1: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(v)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, v)| (*t, *v))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateWindow(format!(
            "fewer than two samples in [{t0}, {t1}]"
        )));
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| v.is_nan() || *v <= LYAPUNOV_FLOOR) {
        return Err(Error::DegenerateWindow(format!(
            "V = {v:e} at t = {t} is below {LYAPUNOV_FLOOR:e}"
        )));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in &pts {
        let dt = t - mean_t;
        sxy += dt * (v.ln() - mean_y);
        sxx += dt * dt;
    }
    Ok(sxy / sxx)
}

/// Summary numbers of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Per setpoint leg (one entry for tracking runs): time from the leg
    /// start until `Ψ` stays below [`SETTLE_PSI`].
    pub time_to_psi: Vec<f64>,
    /// `max Ψ` for `t ≥` [`POST_TRANSIENT_START`].
    pub max_psi_after: f64,
    /// `max Ψ` before [`POST_TRANSIENT_START`].
    pub transient_peak_psi: f64,
    /// Fitted `d ln V / dt` over [`LYAPUNOV_FIT_WINDOW`], if the window is
    /// usable.
    pub lyapunov_slope: Option<f64>,
    pub peak_u: f64,
    pub final_e_omega: f64,
    pub final_omega: f64,
    pub final_psi: f64,
}

impl RunMetrics {
    fn compute(series: &TimeSeries, legs: &[(f64, f64)]) -> Self {
        let times = series.times();
        let psi: Vec<f64> = series.rows.iter().map(|r| r.psi).collect();
        let v: Vec<f64> = series.rows.iter().map(|r| r.v).collect();
        let time_to_psi = legs
            .iter()
            .map(|&(a, b)| {
                let w = series.window(a, b);
                let psi: Vec<f64> = w.rows.iter().map(|r| r.psi).collect();
                time_to_threshold(&w.times(), &psi, SETTLE_PSI) - a
            })
            .collect();
        let max_over = |pred: &dyn Fn(f64) -> bool| {
            times
                .iter()
                .zip(&psi)
                .filter(|(t, _)| pred(**t))
                .map(|(_, p)| *p)
                .fold(0.0, f64::max)
        };
        let last = series.rows.last();
        Self {
            time_to_psi,
            max_psi_after: max_over(&|t| t >= POST_TRANSIENT_START),
            transient_peak_psi: max_over(&|t| t < POST_TRANSIENT_START),
            lyapunov_slope: fit_lyapunov_rate(
                &times,
                &v,
                LYAPUNOV_FIT_WINDOW.0,
                LYAPUNOV_FIT_WINDOW.1,
            )
            .ok(),
            peak_u: series.rows.iter().map(|r| r.u.norm()).fold(0.0, f64::max),
            final_e_omega: last.map_or(0.0, |r| r.e_omega.norm()),
            final_omega: last.map_or(0.0, |r| r.omega.norm()),
            final_psi: last.map_or(0.0, |r| r.psi),
        }
    }

    /// `name = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.time_to_psi.iter().enumerate() {
            writeln!(out, "leg{}_time_to_psi_{SETTLE_PSI} = {t}", i + 1).unwrap();
        }
        writeln!(
            out,
            "max_psi_after_{POST_TRANSIENT_START}s = {:e}",
            self.max_psi_after
        )
        .unwrap();
        writeln!(out, "transient_peak_psi = {:e}", self.transient_peak_psi).unwrap();
        match self.lyapunov_slope {
            Some(s) => writeln!(out, "lyapunov_slope = {s}").unwrap(),
            None => writeln!(out, "lyapunov_slope = nan").unwrap(),
        }
        writeln!(out, "peak_u = {}", self.peak_u).unwrap();
        writeln!(out, "final_e_omega = {:e}", self.final_e_omega).unwrap();
        writeln!(out, "final_omega = {:e}", self.final_omega).unwrap();
        writeln!(out, "final_psi = {:e}", self.final_psi).unwrap();
        out
    }
}

/// Control law driving a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlLaw {
    /// Tracking law with the given estimates.
    Pdav(ModelEstimate),
    /// Stabilizer on `e_r`.
    Benchmark,
    /// Stabilizer on `Q ᵇe_q`.
    ModifiedBenchmark,
}

/// Integrates the closed loop from `cfg.initial` over `[0, cfg.t_end]`.
pub fn simulate(
    cfg: &ScenarioConfig,
    reference: &dyn Reference,
    law: ControlLaw,
) -> Result<TimeSeries> {
    cfg.validate()?;
    let h = cfg.step.get();
    let n = cfg.step_count();
    let p = cfg.params;
    let control = |t: f64, s: &BodyState| -> Result<Vector3> {
        let desired = reference.desired(t);
        match law {
            ControlLaw::Pdav(est) => Ok(pdav_control(s, &desired, &cfg.pdav_gains, &est)?.u),
            ControlLaw::Benchmark => {
                Ok(benchmark_control(s, &desired.q_d, &cfg.benchmark_gains, &p))
            }
            ControlLaw::ModifiedBenchmark => {
                modified_benchmark_control(s, &desired.q_d, &cfg.benchmark_gains, &p)
            }
        }
    };
    let diagnostic_estimate = match law {
        ControlLaw::Pdav(est) => est,
        _ => ModelEstimate::perfect(&p),
    };
    let abort = |t: f64| {
        move |e: Error| Error::Aborted {
            t,
            source: Box::new(e),
        }
    };

    let mut rows = Vec::with_capacity(n / cfg.stride + 1);
    let mut state = cfg.initial;
    for k in 0..=n {
        let t = k as f64 * h;
        if k % cfg.stride == 0 || k == n {
            let u = control(t, &state).map_err(abort(t))?;
            rows.push(
                record(cfg, reference, &diagnostic_estimate, t, &state, u).map_err(abort(t))?,
            );
        }
        if k < n {
            state = step(&state, control, &p, t, cfg.step).map_err(abort(t))?;
        }
    }
    Ok(TimeSeries { rows })
}

fn record(
    cfg: &ScenarioConfig,
    reference: &dyn Reference,
    est: &ModelEstimate,
    t: f64,
    state: &BodyState,
    u: Vector3,
) -> Result<Sample> {
    let desired = reference.desired(t);
    let q = pointing(state);
    let diag = pdav_control(state, &desired, &cfg.pdav_gains, est)?;
    let ups = upsilon(state, &desired, &cfg.pdav_gains, est, &cfg.params)?;
    Ok(Sample {
        t,
        q: q.into_vector(),
        q_d: desired.q_d.into_vector(),
        psi: diag.psi,
        psi_r: attitude_error::psi_r(&q, &desired.q_d),
        e_q: diag.e_q,
        e_omega: diag.e_omega,
        omega: state.omega,
        omega_d: desired.omega,
        u,
        s: diag.s,
        v: diag.v,
        upsilon: ups,
        bound: ultimate_bounds(&ups, &cfg.params, est, &cfg.pdav_gains),
        attitude: state.attitude,
        desired_attitude: desired.attitude,
    })
}

/// Series and metrics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub metrics: RunMetrics,
}

impl RunOutput {
    /// Writes `timeseries{suffix}.csv` and `metrics{suffix}.txt` into `dir`.
    pub fn write(&self, dir: &Path, suffix: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.series
            .write_csv(&dir.join(format!("timeseries{suffix}.csv")))?;
        fs::write(
            dir.join(format!("metrics{suffix}.txt")),
            self.metrics.to_text(),
        )?;
        Ok(())
    }
}

/// Both stabilizer runs over the two setpoint legs.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutput {
    pub benchmark: RunOutput,
    pub modified: RunOutput,
}

/// Runs the `e_r` stabilizer and the `Q ᵇe_q` stabilizer through the two
/// stabilization setpoints with identical settings. The runs execute on
/// separate threads.
pub fn run_stabilize_compare(cfg: &ScenarioConfig) -> Result<CompareOutput> {
    cfg.validate()?;
    let schedule = SetpointSchedule::stabilization(cfg.switch_time)?;
    let legs: Vec<(f64, f64)> = (0..schedule.leg_count())
        .map(|i| {
            let (a, b) = schedule.leg_bounds(i);
            (a, b.min(cfg.t_end + cfg.step.get()))
        })
        .filter(|(a, _)| *a <= cfg.t_end)
        .collect();
    let run = |law| -> Result<RunOutput> {
        let series = simulate(cfg, &schedule, law)?;
        let metrics = RunMetrics::compute(&series, &legs);
        Ok(RunOutput { series, metrics })
    };
    let (benchmark, modified) = std::thread::scope(|scope| {
        let a = scope.spawn(|| run(ControlLaw::Benchmark));
        let b = run(ControlLaw::ModifiedBenchmark);
        (a.join().expect("benchmark run panicked"), b)
    });
    Ok(CompareOutput {
        benchmark: benchmark?,
        modified: modified?,
    })
}

/// Tracking run. With `use_estimates` the law receives `cfg.estimate`,
/// otherwise the true parameters.
pub fn run_pdav(cfg: &ScenarioConfig, use_estimates: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let est = if use_estimates {
        cfg.estimate
    } else {
        ModelEstimate::perfect(&cfg.params)
    };
    let trajectory = PdavTrajectory::new(cfg.tilt);
    let series = simulate(cfg, &trajectory, ControlLaw::Pdav(est))?;
    let metrics = RunMetrics::compute(&series, &[(0.0, cfg.t_end + cfg.step.get())]);
    Ok(RunOutput { series, metrics })
}
