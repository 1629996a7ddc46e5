//! Scenario configuration files.
//!
//! The format is one `key = value` per line. `#` starts a comment, blank
//! lines are ignored, vectors are comma-separated. Keys that are not given
//! keep their reference values. Recognized keys:
//!
//! | key              | value                                  |
//! |------------------|----------------------------------------|
//! | `scenario`       | `pdav` or `stabilize-compare`          |
//! | `j_diag`         | inertia diagonal, kg·m²                |
//! | `c`              | friction coefficient, N·m·s/rad        |
//! | `tau`            | external moment, N·m                   |
//! | `lambda`, `eta`, `gamma` | tracking gains                 |
//! | `k_r_diag`, `k_omega_diag` | stabilizer gain diagonals    |
//! | `j_hat_scale`, `c_hat_scale` | estimate factors (`Ĵ = s·J`) |
//! | `tau_hat`        | estimated external moment              |
//! | `perturbed`      | `true` / `false`                       |
//! | `dt`, `t_end`, `switch_time` | seconds                    |
//! | `stride`         | keep every n-th sample                 |
//! | `initial_omega`  | initial body angular velocity, rad/s   |
//! | `initial_tilt_deg` | initial rotation about body `e₁`, deg |
//! | `tilt`           | `minimum-jerk` or `printed`            |
//! | `out`            | output directory                       |

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::control::{BenchmarkGains, ModelEstimate, PdavGains};
use crate::error::{Error, Result};
use crate::harness::{ScenarioConfig, ScenarioKind};
use crate::rigid_body::{RigidBodyParams, StepSize};
use crate::so3::{rot_x, Vector3};
use crate::trajectory::TiltCoefficients;

/// A partial set of overrides. Layers are merged with [`ConfigLayer::over`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub scenario: Option<ScenarioKind>,
    pub j_diag: Option<Vector3>,
    pub c: Option<f64>,
    pub tau: Option<Vector3>,
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub k_r_diag: Option<Vector3>,
    pub k_omega_diag: Option<Vector3>,
    pub j_hat_scale: Option<f64>,
    pub c_hat_scale: Option<f64>,
    pub tau_hat: Option<Vector3>,
    pub perturbed: Option<bool>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub switch_time: Option<f64>,
    pub stride: Option<usize>,
    pub initial_omega: Option<Vector3>,
    pub initial_tilt_deg: Option<f64>,
    pub tilt: Option<TiltCoefficients>,
    pub out: Option<PathBuf>,
    /// Source line of each key, for error messages.
    pub(crate) lines: HashMap<&'static str, usize>,
}

macro_rules! merge {
    ($top:ident, $base:ident, $($f:ident),*) => {
        ConfigLayer {
            $($f: $top.$f.clone().or_else(|| $base.$f.clone()),)*
            lines: {
                let mut l = $base.lines.clone();
                $(if $top.$f.is_some() {
                    l.remove(stringify!($f));
                })*
                l.extend($top.lines.iter().map(|(k, v)| (*k, *v)));
                l
            },
        }
    };
}

impl ConfigLayer {
    /// `self` with any unset fields filled from `base`.
    pub fn over(&self, base: &ConfigLayer) -> ConfigLayer {
        let top = self;
        merge!(
            top,
            base,
            scenario,
            j_diag,
            c,
            tau,
            lambda,
            eta,
            gamma,
            k_r_diag,
            k_omega_diag,
            j_hat_scale,
            c_hat_scale,
            tau_hat,
            perturbed,
            dt,
            t_end,
            switch_time,
            stride,
            initial_omega,
            initial_tilt_deg,
            tilt,
            out
        )
    }

    /// Parses configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut layer = ConfigLayer::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            layer.set(key.trim(), value.trim(), line)?;
        }
        Ok(layer)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let bad = |what: &str| Error::Config {
            line,
            message: format!("key `{key}`: expected {what}, got `{value}`"),
        };
        let scalar = || value.parse::<f64>().map_err(|_| bad("a number"));
        let vector = || -> Result<Vector3> {
            let parts: Vec<f64> = value
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("three comma-separated numbers"))?;
            match parts.as_slice() {
                [a, b, c] => Ok(Vector3::new(*a, *b, *c)),
                _ => Err(bad("three comma-separated numbers")),
            }
        };
        let name: &'static str = match key {
            "scenario" => {
                self.scenario = Some(match value {
                    "pdav" => ScenarioKind::Pdav,
                    "stabilize-compare" => ScenarioKind::StabilizeCompare,
                    _ => return Err(bad("`pdav` or `stabilize-compare`")),
                });
                "scenario"
            }
            "j_diag" => {
                self.j_diag = Some(vector()?);
                "j_diag"
            }
            "c" => {
                self.c = Some(scalar()?);
                "c"
            }
            "tau" => {
                self.tau = Some(vector()?);
                "tau"
            }
            "lambda" => {
                self.lambda = Some(scalar()?);
                "lambda"
            }
            "eta" => {
                self.eta = Some(scalar()?);
                "eta"
            }
            "gamma" => {
                self.gamma = Some(scalar()?);
                "gamma"
            }
            "k_r_diag" => {
                self.k_r_diag = Some(vector()?);
                "k_r_diag"
            }
            "k_omega_diag" => {
                self.k_omega_diag = Some(vector()?);
                "k_omega_diag"
            }
            "j_hat_scale" => {
                self.j_hat_scale = Some(scalar()?);
                "j_hat_scale"
            }
            "c_hat_scale" => {
                self.c_hat_scale = Some(scalar()?);
                "c_hat_scale"
            }
            "tau_hat" => {
                self.tau_hat = Some(vector()?);
                "tau_hat"
            }
            "perturbed" => {
                self.perturbed = Some(
                    value
                        .parse::<bool>()
                        .map_err(|_| bad("`true` or `false`"))?,
                );
                "perturbed"
            }
            "dt" => {
                self.dt = Some(scalar()?);
                "dt"
            }
            "t_end" => {
                self.t_end = Some(scalar()?);
                "t_end"
            }
            "switch_time" => {
                self.switch_time = Some(scalar()?);
                "switch_time"
            }
            "stride" => {
                self.stride = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| bad("a positive integer"))?,
                );
                "stride"
            }
            "initial_omega" => {
                self.initial_omega = Some(vector()?);
                "initial_omega"
            }
            "initial_tilt_deg" => {
                self.initial_tilt_deg = Some(scalar()?);
                "initial_tilt_deg"
            }
            "tilt" => {
                self.tilt = Some(
                    value
                        .parse()
                        .map_err(|_| bad("`minimum-jerk` or `printed`"))?,
                );
                "tilt"
            }
            "out" => {
                self.out = Some(PathBuf::from(value));
                "out"
            }
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        };
        self.lines.insert(name, line);
        Ok(())
    }

    /// Resolves the layer against the reference configuration.
    pub fn build(&self, default_kind: ScenarioKind) -> Result<ScenarioConfig> {
        let kind = self.scenario.unwrap_or(default_kind);
        let mut cfg = ScenarioConfig::reference(kind);
        let at = |keys: &[&'static str], e: Error| -> Error {
            match keys.iter().filter_map(|k| self.lines.get(k)).max() {
                Some(&line) => Error::Config {
                    line,
                    message: e.to_string(),
                },
                None => e,
            }
        };

        let inertia = self.j_diag.unwrap_or(*cfg.params.inertia());
        let friction = self.c.unwrap_or(cfg.params.friction());
        let tau = self.tau.unwrap_or(*cfg.params.external_moment());
        crate::rigid_body::validate_inertia(&inertia).map_err(|e| at(&["j_diag"], e))?;
        cfg.params =
            RigidBodyParams::new(inertia, friction, tau).map_err(|e| at(&["c", "tau"], e))?;

        let g = cfg.pdav_gains;
        cfg.pdav_gains = PdavGains::new(
            self.lambda.unwrap_or(g.lambda()),
            self.eta.unwrap_or(g.eta()),
            self.gamma.unwrap_or(g.gamma()),
        )
        .map_err(|e| at(&["lambda", "eta", "gamma"], e))?;

        let b = cfg.benchmark_gains;
        cfg.benchmark_gains = BenchmarkGains::new(
            self.k_r_diag.unwrap_or(*b.k_r()),
            self.k_omega_diag.unwrap_or(*b.k_omega()),
        )
        .map_err(|e| at(&["k_r_diag", "k_omega_diag"], e))?;

        let est = ModelEstimate::scaled(
            &cfg.params,
            self.j_hat_scale
                .unwrap_or(crate::harness::INERTIA_ESTIMATE_SCALE),
            self.c_hat_scale
                .unwrap_or(crate::harness::FRICTION_ESTIMATE_SCALE),
        )
        .map_err(|e| at(&["j_hat_scale", "c_hat_scale"], e))?;
        cfg.estimate = match self.tau_hat {
            Some(t) => est.with_external_moment(t),
            None => est,
        };

        if let Some(p) = self.perturbed {
            cfg.perturbed = p;
        }
        if let Some(dt) = self.dt {
            cfg.step = StepSize::new(dt).map_err(|e| at(&["dt"], e))?;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(t) = self.switch_time {
            cfg.switch_time = t;
        }
        if let Some(s) = self.stride {
            cfg.stride = s;
        }
        if let Some(w) = self.initial_omega {
            cfg.initial.omega = w;
        }
        if let Some(a) = self.initial_tilt_deg {
            cfg.initial.attitude = rot_x(a.to_radians());
        }
        if let Some(t) = self.tilt {
            cfg.tilt = t;
        }
        cfg.output = self.out.clone();
        cfg.validate()
            .map_err(|e| at(&["t_end", "stride", "switch_time"], e))?;
        Ok(cfg)
    }
}

/// Reads and resolves a configuration file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    load_layer(path)?.build(ScenarioKind::Pdav)
}

/// Reads a configuration file without resolving it.
pub fn load_layer(path: &Path) -> Result<ConfigLayer> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
    ConfigLayer::parse(&text)
}
