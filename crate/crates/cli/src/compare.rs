//! `compare`: exact model against the leading-order closed forms.

use std::path::PathBuf;

use msi_core::lumped_mode::{
    canonical_force_spectral_density, canonical_rigidity, compare_point, coupling_constants,
    fano_minimum, fano_spectrum, LumpedParams,
};
use msi_core::radiation_pressure::{force_spectral_density, rigidity};
use msi_core::scattering::{Interferometer, IntracavityField};
use msi_core::{Complex64, Result as CoreResult};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{extend, header, num, OutputTarget};
use crate::spectrum::{check_singular, Setup};

/// Relative-error columns. `rel_S_fano` is only present without a south pump.
pub const BASE_COLUMNS: [&str; 6] = [
    "rel_F",
    "rel_K_matrix",
    "rel_K",
    "rel_S",
    "rel_S_canonical",
    "rel_K_canonical",
];
pub const FANO_COLUMN: &str = "rel_S_fano";

fn rel(exact: f64, approx: f64) -> f64 {
    (exact - approx).abs() / exact.abs()
}

fn crel(exact: Complex64, approx: Complex64) -> f64 {
    (exact - approx).norm() / exact.norm()
}

struct Row {
    omega: f64,
    errors: Vec<f64>,
}

fn row(
    ifo: &Interferometer,
    lp: &LumpedParams,
    field: &IntracavityField,
    fano_amp_sq: Option<f64>,
    omega: f64,
) -> CoreResult<Row> {
    let k_p = ifo.params().k_p;
    let cmp = compare_point(ifo, lp, &field.as_vector(), omega)?;
    let common = IntracavityField::new(field.e_plus, Complex64::new(0.0, 0.0));
    let e_sq = field.e_plus.norm_sqr();
    let s_common = force_spectral_density(ifo, &common, omega)?;
    let k_common = rigidity(ifo, &common, omega)?.k;
    let mut errors = vec![
        cmp.force_transfer,
        cmp.rigidity_matrix,
        cmp.rigidity,
        cmp.spectrum,
        rel(s_common, canonical_force_spectral_density(lp, k_p, e_sq, omega)),
        crel(k_common, canonical_rigidity(lp, k_p, e_sq, omega)),
    ];
    if let Some(a_sq) = fano_amp_sq {
        let exact = force_spectral_density(ifo, field, omega)?;
        errors.push(rel(exact, fano_spectrum(lp, k_p, a_sq, &[omega])[0]));
    }
    Ok(Row { omega, errors })
}

/// Writes `<prefix>_compare.csv` and `<prefix>_compare.json`.
pub fn cmd_compare(cfg: &RunConfig, out: &OutputTarget) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let setup = Setup::new(cfg)?;
    if setup.field.energy() == 0.0 {
        return Err(CliError::config("pump", "compare needs a non-zero pump"));
    }
    let lp = setup.lumped.params;
    let fano_amp_sq = (setup.pump.south.norm_sqr() == 0.0).then(|| setup.pump.west.norm_sqr());

    let results: Vec<CoreResult<Row>> = grid
        .par_iter()
        .map(|&w| row(&setup.ifo, &lp, &setup.field, fano_amp_sq, w))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (&w, r) in grid.iter().zip(results) {
        match r {
            Ok(r) => rows.push(r),
            Err(e) => skipped.push(json!({ "omega": w, "reason": e.to_string() })),
        }
    }

    let mut columns = vec!["Omega"];
    columns.extend(BASE_COLUMNS);
    if fano_amp_sq.is_some() {
        columns.push(FANO_COLUMN);
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| std::iter::once(r.omega).chain(r.errors.iter().copied()).map(num).collect())
        .collect();
    let csv = out.write_csv("compare.csv", &columns, &table)?;

    // worst case per column, over all rows and over the rows inside the
    // near-resonance band
    let worst = |band: bool| -> Value {
        let mut m = Map::new();
        for (j, name) in columns[1..].iter().enumerate() {
            let v = rows
                .iter()
                .filter(|r| !band || setup.lumped.validity.near_resonance_at(&lp, r.omega))
                .map(|r| r.errors[j])
                .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
            m.insert(name.to_string(), json!(v));
        }
        Value::Object(m)
    };
    let couplings = coupling_constants(&lp, setup.ifo.params().k_p);
    let sidecar = extend(
        extend(header("compare", cfg, setup.det_tol), setup.describe()),
        json!({
            "couplings": couplings,
            "fano_minimum": fano_minimum(&lp),
            "grid": {
                "points": grid.len(),
                "rows": rows.len(),
                "skipped": skipped,
            },
            "columns": columns,
            "max": worst(false),
            "max_near_resonance": worst(true),
        }),
    );
    let json = out.write_json("compare.json", &sidecar)?;
    check_singular(skipped.len(), grid.len())?;
    Ok(vec![csv, json])
}
