//! `spectrum`: force-noise spectra and rigidity over the sweep grid.

use std::path::PathBuf;

use msi_core::lumped_mode::{from_exact, LumpedModel};
use msi_core::radiation_pressure::{noise_spectra, ForceNoiseSpectrum};
use msi_core::scattering::{Interferometer, IntracavityField, PortVector};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{extend, header, num, to_value, OutputTarget};

pub const CSV_HEADER: [&str; 7] = ["Omega", "S_tilde_pos", "S_tilde_neg", "S_sym", "Re_K", "Im_K", "H_opt"];

/// Largest fraction of the grid that may be optically singular.
pub const MAX_SINGULAR_FRACTION: f64 = 0.1;

/// Everything a command needs from the configured interferometer and pump.
pub struct Setup {
    pub ifo: Interferometer,
    pub pump: PortVector,
    pub field: IntracavityField,
    pub lumped: LumpedModel,
    pub det_tol: f64,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let params = cfg.interferometer_params()?;
        let det_tol = cfg.det_tol()?;
        let ifo = Interferometer::new(params)?.with_det_tol(det_tol);
        let pump = cfg.pump_amplitudes()?;
        let field = ifo.classical_fields(&pump).map_err(|e| match e {
            msi_core::Error::OpticalSingularity { .. } => CliError::SingularPump(e),
            other => other.into(),
        })?;
        Ok(Setup {
            ifo,
            pump,
            field,
            lumped: from_exact(&params, cfg.validity_threshold()),
            det_tol,
        })
    }

    /// Pump, field and lumped-model block shared by the sidecars.
    pub fn describe(&self) -> serde_json::Value {
        let lp = &self.lumped.params;
        json!({
            "omega_p": self.ifo.omega_p(),
            "pump": self.pump,
            "field": self.field,
            "lumped": extend(to_value(lp), json!({
                "gamma_m": lp.gamma_m(),
                "delta_m": lp.delta_m(),
                "gamma": lp.gamma(),
                "delta": lp.delta(),
            })),
            "validity": extend(to_value(&self.lumped.validity), json!({
                "valid": self.lumped.validity.is_valid(),
                "violations": self.lumped.validity.violations(),
            })),
        })
    }
}

/// Fails when more than [`MAX_SINGULAR_FRACTION`] of the grid is singular.
pub fn check_singular(singular: usize, total: usize) -> Result<()> {
    if singular as f64 > MAX_SINGULAR_FRACTION * total as f64 {
        return Err(CliError::SingularGrid {
            skipped: singular,
            total,
        });
    }
    Ok(())
}

pub fn rows(s: &ForceNoiseSpectrum) -> Vec<Vec<String>> {
    (0..s.len())
        .map(|i| {
            vec![
                num(s.omega[i]),
                num(s.s_tilde_pos[i]),
                num(s.s_tilde_neg[i]),
                num(s.s_sym[i]),
                num(s.k[i].re),
                num(s.k[i].im),
                num(s.h_opt[i]),
            ]
        })
        .collect()
}

/// Writes `<prefix>_spectrum.csv` and `<prefix>_spectrum.json`.
///
/// Files are written before a singular-grid failure is reported, so the
/// partial sweep can be inspected.
pub fn cmd_spectrum(cfg: &RunConfig, out: &OutputTarget) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let setup = Setup::new(cfg)?;
    let spectrum = noise_spectra(&setup.ifo, &setup.field, &grid);
    let singular = spectrum.skipped.iter().filter(|s| s.omega != 0.0).count();

    let csv = out.write_csv("spectrum.csv", &CSV_HEADER, &rows(&spectrum))?;
    let sidecar = extend(
        extend(header("spectrum", cfg, setup.det_tol), setup.describe()),
        json!({
            "grid": {
                "points": grid.len(),
                "rows": spectrum.len(),
                "skipped": spectrum.skipped,
            },
            "columns": CSV_HEADER,
            "units": ["rad/s", "N^2 s", "N^2 s", "N^2 s", "N/m", "N/m", "kg/s"],
        }),
    );
    let json = out.write_json("spectrum.json", &sidecar)?;
    check_singular(singular, grid.len())?;
    Ok(vec![csv, json])
}
