//! Run configuration. JSON, SI units throughout.

use std::collections::BTreeMap;
use std::path::Path;

use msi_core::algebra::cis;
use msi_core::cooling::{Bath, EnergyConstraint, MechanicalMode, OptimizeOptions};
use msi_core::lumped_mode::DEFAULT_VALIDITY_THRESHOLD;
use msi_core::scattering::{InterferometerParams, PortVector, DEFAULT_DET_TOL};
use msi_core::{Complex64, C_LIGHT, HBAR};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Environment variable overriding the singularity threshold.
pub const DET_TOL_ENV: &str = "MSI_DET_TOL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub interferometer: InterferometerConfig,
    #[serde(default)]
    pub pump: PumpConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub mechanics: Option<MechanicsConfig>,
    #[serde(default)]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerConfig {
    /// Pump wavelength, m. Exactly one of `wavelength`, `k_p`.
    #[serde(default)]
    pub wavelength: Option<f64>,
    /// Pump wavenumber, 1/m.
    #[serde(default)]
    pub k_p: Option<f64>,
    /// Membrane angle θ, rad.
    pub theta_m: f64,
    /// Beamsplitter imbalance ε, rad.
    pub epsilon: f64,
    /// D.C. membrane offset κ = k_pX.
    pub kappa: f64,
    /// SRM arm.
    pub south: ArmConfig,
    /// PRM arm.
    pub west: ArmConfig,
}

/// One recycling arm: membrane distance and mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    /// One-way length, m. Exactly one of `length`, `tau`.
    #[serde(default)]
    pub length: Option<f64>,
    /// One-way travel time, s.
    #[serde(default)]
    pub tau: Option<f64>,
    /// Mirror amplitude reflectivity. Exactly one of `r`, `t`; the other
    /// follows from losslessness.
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    #[serde(default)]
    pub west: Option<PortPump>,
    #[serde(default)]
    pub south: Option<PortPump>,
}

/// Carrier injected at one port: power and phase, or a raw amplitude in
/// √(photons/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortPump {
    /// W.
    #[serde(default)]
    pub power: Option<f64>,
    /// rad.
    #[serde(default)]
    pub phase: Option<f64>,
    /// `[re, im]`.
    #[serde(default)]
    pub amplitude: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Sideband grid Ω, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsConfig {
    /// rad/s.
    pub omega_m: f64,
    /// Friction factor, kg/s.
    pub h: f64,
    /// K. Exactly one of `temperature`, `occupation`.
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub occupation: Option<f64>,
    /// kg.
    #[serde(default)]
    pub mass: Option<f64>,
}

/// Budget and grid for `cooling --optimize`. Without a budget the intracavity
/// power produced by the configured pump is used.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    /// `ħω_p(|E₊|²+|E₋|²)`, W.
    #[serde(default)]
    pub intracavity_power: Option<f64>,
    /// `ħω_p(|A_W|²+|A_S|²)`, W.
    #[serde(default)]
    pub injected_power: Option<f64>,
    #[serde(default)]
    pub chi_points: Option<usize>,
    #[serde(default)]
    pub phi_points: Option<usize>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub dir: Option<String>,
    /// File name prefix, joined with `_`.
    #[serde(default)]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub det_tol: Option<f64>,
    #[serde(default)]
    pub validity_threshold: Option<f64>,
    #[serde(default)]
    pub regime_margin: Option<f64>,
    /// Per-invariant overrides for `verify`.
    #[serde(default)]
    pub verify: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            CliError::config(field, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without building the model.
    pub fn validate(&self) -> Result<()> {
        self.interferometer_params()?;
        self.pump_amplitudes()?;
        if let Some(s) = &self.sweep {
            s.grid()?;
        }
        if let Some(m) = &self.mechanics {
            m.mode()?;
        }
        if let Some(o) = &self.optimize {
            o.check()?;
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.det_tol", t.det_tol),
            ("tolerances.validity_threshold", t.validity_threshold),
            ("tolerances.regime_margin", t.regime_margin),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        for (k, v) in &t.verify {
            positive(&format!("tolerances.verify.{k}"), *v)?;
        }
        Ok(())
    }

    pub fn interferometer_params(&self) -> Result<InterferometerParams> {
        let c = &self.interferometer;
        let k_p = match (c.wavelength, c.k_p) {
            (Some(l), None) => std::f64::consts::TAU / positive("interferometer.wavelength", l)?,
            (None, Some(k)) => positive("interferometer.k_p", k)?,
            _ => {
                return Err(CliError::config(
                    "interferometer.wavelength",
                    "give exactly one of `wavelength`, `k_p`",
                ))
            }
        };
        let (tau_s, r_s, t_s) = c.south.resolve("interferometer.south")?;
        let (tau_w, r_w, t_w) = c.west.resolve("interferometer.west")?;
        let params = InterferometerParams {
            theta_m: c.theta_m,
            epsilon: c.epsilon,
            kappa: c.kappa,
            tau_s,
            tau_w,
            r_s,
            t_s,
            r_w,
            t_w,
            k_p,
        };
        params.validate().map_err(|e| match e {
            msi_core::Error::InvalidParameter { field, reason } => {
                CliError::config(config_path(field), reason)
            }
            other => CliError::config("interferometer", other.to_string()),
        })?;
        Ok(params)
    }

    /// Port amplitudes in √(photons/s), converted with `|A| = √(P/(ħω_p))`.
    pub fn pump_amplitudes(&self) -> Result<PortVector> {
        let omega_p = C_LIGHT * self.interferometer_k_p()?;
        let port = |name: &str, p: &Option<PortPump>| -> Result<Complex64> {
            match p {
                None => Ok(Complex64::new(0.0, 0.0)),
                Some(p) => p.amplitude(&format!("pump.{name}"), omega_p),
            }
        };
        Ok(PortVector::new(
            port("west", &self.pump.west)?,
            port("south", &self.pump.south)?,
        ))
    }

    fn interferometer_k_p(&self) -> Result<f64> {
        Ok(self.interferometer_params()?.k_p)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        self.sweep
            .as_ref()
            .ok_or_else(|| CliError::config("sweep", "required for this command"))?
            .grid()
    }

    pub fn mechanical_mode(&self) -> Result<MechanicalMode> {
        self.mechanics
            .as_ref()
            .ok_or_else(|| CliError::config("mechanics", "required for this command"))?
            .mode()
    }

    /// `MSI_DET_TOL`, then the config, then the library default.
    pub fn det_tol(&self) -> Result<f64> {
        if let Ok(v) = std::env::var(DET_TOL_ENV) {
            let parsed: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::config(DET_TOL_ENV, format!("not a number: {v:?}")))?;
            return positive(DET_TOL_ENV, parsed);
        }
        Ok(self.tolerances.det_tol.unwrap_or(DEFAULT_DET_TOL))
    }

    pub fn validity_threshold(&self) -> f64 {
        self.tolerances
            .validity_threshold
            .unwrap_or(DEFAULT_VALIDITY_THRESHOLD)
    }

    pub fn regime_margin(&self) -> f64 {
        self.tolerances
            .regime_margin
            .unwrap_or(msi_core::cooling::DEFAULT_REGIME_MARGIN)
    }

    /// SHA-256 of the canonical serialisation, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(bytes))
    }
}

impl ArmConfig {
    fn resolve(&self, prefix: &str) -> Result<(f64, f64, f64)> {
        let tau = match (self.length, self.tau) {
            (Some(l), None) => positive(&format!("{prefix}.length"), l)? / C_LIGHT,
            (None, Some(t)) => positive(&format!("{prefix}.tau"), t)?,
            _ => {
                return Err(CliError::config(
                    format!("{prefix}.length"),
                    "give exactly one of `length`, `tau`",
                ))
            }
        };
        let unit = |name: &str, v: f64| -> Result<f64> {
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(CliError::config(format!("{prefix}.{name}"), "must lie in [0, 1]"))
            }
        };
        let (r, t) = match (self.r, self.t) {
            (Some(r), None) => {
                let r = unit("r", r)?;
                (r, (1.0 - r * r).sqrt())
            }
            (None, Some(t)) => {
                let t = unit("t", t)?;
                ((1.0 - t * t).sqrt(), t)
            }
            _ => {
                return Err(CliError::config(
                    format!("{prefix}.r"),
                    "give exactly one of `r`, `t`",
                ))
            }
        };
        Ok((tau, r, t))
    }
}

impl PortPump {
    fn amplitude(&self, prefix: &str, omega_p: f64) -> Result<Complex64> {
        match (self.power, self.amplitude) {
            (Some(p), None) => {
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(CliError::config(format!("{prefix}.power"), "must be finite and non-negative"));
                }
                let phase = self.phase.unwrap_or(0.0);
                if !phase.is_finite() {
                    return Err(CliError::config(format!("{prefix}.phase"), "must be finite"));
                }
                Ok(cis(phase) * (p / (HBAR * omega_p)).sqrt())
            }
            (None, Some([re, im])) => {
                if self.phase.is_some() {
                    return Err(CliError::config(
                        format!("{prefix}.phase"),
                        "only allowed together with `power`",
                    ));
                }
                if !(re.is_finite() && im.is_finite()) {
                    return Err(CliError::config(format!("{prefix}.amplitude"), "must be finite"));
                }
                Ok(Complex64::new(re, im))
            }
            _ => Err(CliError::config(
                format!("{prefix}.power"),
                "give exactly one of `power` (with optional `phase`), `amplitude`",
            )),
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(CliError::config("sweep.points", "need at least 2 points"));
        }
        for (name, v) in [("sweep.start", self.start), ("sweep.stop", self.stop)] {
            if !v.is_finite() {
                return Err(CliError::config(name, "must be finite"));
            }
        }
        let n = self.points - 1;
        let last = self.points - 1;
        let lerp = |a: f64, b: f64, i: usize| {
            if i == last {
                b
            } else {
                a + (b - a) * (i as f64 / n as f64)
            }
        };
        Ok(match self.scale {
            Scale::Linear => (0..self.points).map(|i| lerp(self.start, self.stop, i)).collect(),
            Scale::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(CliError::config(
                        "sweep.start",
                        "log grids need positive start and stop",
                    ));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..self.points)
                    .map(|i| match i {
                        0 => self.start,
                        i if i == last => self.stop,
                        i => lerp(a, b, i).exp(),
                    })
                    .collect()
            }
        })
    }
}

impl MechanicsConfig {
    pub fn mode(&self) -> Result<MechanicalMode> {
        let bath = match (self.temperature, self.occupation) {
            (Some(t), None) => Bath::Temperature(t),
            (None, Some(n)) => Bath::Occupation(n),
            _ => {
                return Err(CliError::config(
                    "mechanics.temperature",
                    "give exactly one of `temperature`, `occupation`",
                ))
            }
        };
        let mode = MechanicalMode {
            omega_m: self.omega_m,
            h: self.h,
            bath,
            mass: self.mass,
        };
        mode.validate().map_err(|e| match e {
            msi_core::Error::InvalidParameter { field, reason } => {
                let field = if field == "n_t" { "occupation" } else { field };
                CliError::config(format!("mechanics.{field}"), reason)
            }
            other => CliError::config("mechanics.temperature", other.to_string()),
        })?;
        Ok(mode)
    }
}

impl OptimizeConfig {
    fn check(&self) -> Result<()> {
        if self.intracavity_power.is_some() && self.injected_power.is_some() {
            return Err(CliError::config(
                "optimize.intracavity_power",
                "give at most one of `intracavity_power`, `injected_power`",
            ));
        }
        for (name, v) in [
            ("optimize.intracavity_power", self.intracavity_power),
            ("optimize.injected_power", self.injected_power),
            ("optimize.tolerance", self.tolerance),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        for (name, v) in [
            ("optimize.chi_points", self.chi_points),
            ("optimize.phi_points", self.phi_points),
        ] {
            if matches!(v, Some(n) if n < 2) {
                return Err(CliError::config(name, "need at least 2 points"));
            }
        }
        Ok(())
    }

    pub fn options(&self) -> OptimizeOptions {
        let d = OptimizeOptions::default();
        OptimizeOptions {
            chi_points: self.chi_points.unwrap_or(d.chi_points),
            phi_points: self.phi_points.unwrap_or(d.phi_points),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
        }
    }

    /// Budget in photons/s, or `None` to take it from the pump.
    pub fn constraint(&self, omega_p: f64) -> Option<EnergyConstraint> {
        let flux = |w: f64| w / (HBAR * omega_p);
        match (self.intracavity_power, self.injected_power) {
            (Some(p), _) => Some(EnergyConstraint::IntracavityEnergy(flux(p))),
            (None, Some(p)) => Some(EnergyConstraint::InjectedPower(flux(p))),
            (None, None) => None,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(field, format!("must be finite and positive, got {v}")))
    }
}

fn config_path(field: &str) -> &'static str {
    match field {
        "theta_m" => "interferometer.theta_m",
        "epsilon" => "interferometer.epsilon",
        "kappa" => "interferometer.kappa",
        "tau_s" => "interferometer.south.tau",
        "tau_w" => "interferometer.west.tau",
        "r_s" | "t_s" => "interferometer.south.r",
        "r_w" | "t_w" => "interferometer.west.r",
        "k_p" => "interferometer.k_p",
        _ => "interferometer",
    }
}
