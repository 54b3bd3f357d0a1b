//! `cooling`: steady-state phonon number, optionally with pump optimisation.

use std::path::PathBuf;

use msi_core::cooling::{
    occupancy_for_field, occupancy_simplified, optimize_pump, CoolingResult, EnergyConstraint,
    MechanicalMode,
};
use msi_core::radiation_pressure::rigidity;
use msi_core::scattering::{Interferometer, IntracavityField};
use msi_core::HBAR;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{extend, header, num, to_value, OutputTarget};
use crate::spectrum::Setup;

pub const LANDSCAPE_HEADER: [&str; 4] = ["chi", "phi", "n_bar", "S_F_pos"];

fn report(
    ifo: &Interferometer,
    mode: &MechanicalMode,
    field: &IntracavityField,
    result: &CoolingResult,
    margin: f64,
) -> Result<Value> {
    let simplified = occupancy_simplified(mode, result.s_f_pos, result.s_f_neg, margin)?;
    let k = rigidity(ifo, field, mode.omega_m)?.k;
    Ok(json!({
        "result": result,
        "simplified": simplified,
        "rigidity": k,
        "spring_shifted_omega_m": mode.spring_shifted(k.re),
    }))
}

/// Writes `<prefix>_cooling.json`; with `optimize`, also
/// `<prefix>_cooling_landscape.csv`.
///
/// Without `optimize`, an anti-damped configured pump is an error. With it,
/// the configured pump is only reported and the optimum decides.
pub fn cmd_cooling(cfg: &RunConfig, out: &OutputTarget, optimize: bool) -> Result<Vec<PathBuf>> {
    let mode = cfg.mechanical_mode()?;
    let setup = Setup::new(cfg)?;
    let margin = cfg.regime_margin();
    let configured = occupancy_for_field(&setup.ifo, &mode, &setup.field)
        .map_err(CliError::from)
        .and_then(|r| report(&setup.ifo, &mode, &setup.field, &r, margin));
    let configured = match (configured, optimize) {
        (Ok(v), _) => v,
        (Err(CliError::Unstable(e)), true) => json!({ "unstable": e.to_string() }),
        (Err(e), _) => return Err(e),
    };

    let mut files = Vec::new();
    let mut body = json!({
        "mode": extend(to_value(&mode), json!({ "n_t": mode.n_t()? })),
        "regime_margin": margin,
        "configured": configured,
    });
    if optimize {
        let opt_cfg = cfg.optimize.unwrap_or_default();
        let omega_p = setup.ifo.omega_p();
        let constraint = opt_cfg
            .constraint(omega_p)
            .unwrap_or(EnergyConstraint::IntracavityEnergy(setup.field.energy()));
        if !matches!(constraint, EnergyConstraint::IntracavityEnergy(b) | EnergyConstraint::InjectedPower(b) if b > 0.0)
        {
            return Err(CliError::config(
                "optimize.intracavity_power",
                "needed when the configured pump is zero",
            ));
        }
        let opt = optimize_pump(&setup.ifo, &mode, constraint, &opt_cfg.options())?;
        let rows: Vec<Vec<String>> = opt
            .landscape
            .iter()
            .map(|s| {
                vec![
                    num(s.chi),
                    num(s.phi),
                    s.n_bar.map(num).unwrap_or_default(),
                    num(s.s_f_pos),
                ]
            })
            .collect();
        files.push(out.write_csv("cooling_landscape.csv", &LANDSCAPE_HEADER, &rows)?);
        let watts = |flux: f64| flux * HBAR * omega_p;
        body = extend(
            body,
            json!({
                "constraint": constraint,
                "options": opt_cfg.options(),
                "optimum": extend(
                    report(&setup.ifo, &mode, &opt.field, &opt.result, margin)?,
                    json!({
                        "chi": opt.chi,
                        "phi": opt.phi,
                        "mode_ratio": opt.mode_ratio(),
                        "field": opt.field,
                        "pump": opt.pump,
                        "pump_power": [watts(opt.pump.west.norm_sqr()), watts(opt.pump.south.norm_sqr())],
                        "intracavity_power": watts(opt.field.energy()),
                    }),
                ),
            }),
        );
    }
    let sidecar = extend(
        extend(header("cooling", cfg, setup.det_tol), setup.describe()),
        body,
    );
    files.insert(0, out.write_json("cooling.json", &sidecar)?);
    Ok(files)
}
