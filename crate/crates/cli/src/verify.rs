//! `verify`: seeded invariant suite over random interferometers.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use msi_core::algebra::C2Matrix;
use msi_core::cooling::{thermal_spectra, Bath, MechanicalMode};
use msi_core::lumped_mode::{
    compare_band, coupling_constants, exact_params_for, from_exact, LumpedParams,
    DEFAULT_VALIDITY_THRESHOLD,
};
use msi_core::radiation_pressure::{force_transfer, noise_spectra};
use msi_core::scattering::{Interferometer, InterferometerParams, IntracavityField, PortVector};
use msi_core::{Complex64, HBAR};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 1;

/// Invariant names with their default tolerances.
pub const INVARIANTS: [(&str, f64); 8] = [
    ("force_displacement_symmetry", 1e-12),
    ("scattering_unitarity", 1e-10),
    ("oracle_equivalence", 1e-10),
    ("optical_kubo", 1e-8),
    ("thermal_fdt", 1e-14),
    ("lumped_convergence", 10.0),
    ("dispersive_coupling_zero", 1e-15),
    ("dissipative_coupling_zero", 1e-15),
];

const ENSEMBLE: usize = 1000;
const OMEGAS_PER_SET: usize = 5;
const ORACLE_CASES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub cases: usize,
    /// Largest deviation seen, in the invariant's own measure.
    pub worst: f64,
    pub tolerance: f64,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<InvariantCheck>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "{:<30} {:>6} {:>12} {:>10}  status", "invariant", "cases", "worst", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<30} {:>6} {:>12.3e} {:>10.1e}  {}",
                c.name,
                c.cases,
                c.worst,
                c.tolerance,
                if c.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Random lossless interferometer; power recycling on request.
pub fn random_params(rng: &mut impl Rng, power_recycling: bool) -> InterferometerParams {
    let t_s: f64 = rng.gen_range(0.01..1.0);
    let t_w: f64 = if power_recycling {
        rng.gen_range(0.01..1.0)
    } else {
        1.0
    };
    InterferometerParams {
        theta_m: rng.gen_range(0.0..FRAC_PI_2),
        epsilon: rng.gen_range(-0.7..0.7),
        kappa: rng.gen_range(-3.0..3.0),
        tau_s: rng.gen_range(1e-10..1e-8),
        tau_w: rng.gen_range(1e-10..1e-8),
        r_s: (1.0 - t_s * t_s).sqrt(),
        t_s,
        r_w: (1.0 - t_w * t_w).sqrt(),
        t_w,
        k_p: TAU / rng.gen_range(500e-9..2000e-9),
    }
}

fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn max_abs_diff(a: &C2Matrix, b: &C2Matrix) -> f64 {
    (*a - *b).max_abs()
}

/// Runs every invariant. `overrides` replaces default tolerances by name.
pub fn run_suite(seed: u64, overrides: &BTreeMap<String, f64>) -> Result<VerifyReport> {
    for key in overrides.keys() {
        if !INVARIANTS.iter().any(|(n, _)| n == key) {
            return Err(CliError::config(
                format!("tolerances.verify.{key}"),
                "unknown invariant",
            ));
        }
    }
    let tol = |name: &str| {
        overrides.get(name).copied().unwrap_or_else(|| {
            INVARIANTS
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| *t)
                .expect("known invariant")
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // 𝔾 = 𝔽† and ℝ_ifo unitary over one shared ensemble
    let (mut sym, mut unit) = (0.0f64, 0.0f64);
    for k in 0..ENSEMBLE {
        let ifo = Interferometer::new(random_params(&mut rng, k % 2 == 1))?;
        for _ in 0..OMEGAS_PER_SET {
            let w = rng.gen_range(-1e8..1e8);
            let f = force_transfer(&ifo, w)?;
            let g = ifo.displacement_transfer(w)?;
            sym = sym.max(g.max_rel_diff(&f.dagger()));
            let r = ifo.scattering_matrix(w)?;
            unit = unit.max(max_abs_diff(&(r.dagger() * r), &C2Matrix::identity()));
        }
    }
    let cases = ENSEMBLE * OMEGAS_PER_SET;
    checks.push(check("force_displacement_symmetry", cases, sym, &tol));
    checks.push(check("scattering_unitarity", cases, unit, &tol));

    // closed forms against the dense sideband solve
    let mut oracle = 0.0f64;
    for k in 0..ORACLE_CASES {
        let ifo = Interferometer::new(random_params(&mut rng, k % 2 == 1))?;
        let w = rng.gen_range(-1e8..1e8);
        let r_ifo = ifo.scattering_matrix(w)?;
        for j in 0..2 {
            let mut a = [Complex64::new(0.0, 0.0); 2];
            a[j] = Complex64::new(1.0, 0.0);
            let b = ifo
                .oracle_solve(w, &PortVector::new(a[0], a[1]), 0.0, &IntracavityField::default())?
                .b;
            for i in 0..2 {
                oracle = oracle.max((b[i] - r_ifo[(i, j)]).norm());
            }
        }
        let pump = PortVector::new(random_complex(&mut rng, 1e8), random_complex(&mut rng, 1e8));
        let e = ifo.classical_fields(&pump)?;
        let direct = ifo
            .oracle_solve(0.0, &pump, 0.0, &IntracavityField::default())?
            .e;
        let scale = e.as_vector().max_abs();
        oracle = oracle.max((direct - e.as_vector()).max_abs() / scale);

        let x = 1e-15;
        let k_p = ifo.params().k_p;
        let g = ifo.displacement_transfer(w)?;
        let expected = r_ifo * (g * e.as_vector()).scale(Complex64::new(0.0, k_p * x));
        let b = ifo.oracle_solve(w, &PortVector::default(), x, &e)?.b;
        oracle = oracle.max((b - expected).max_abs() / expected.max_abs());
    }
    checks.push(check("oracle_equivalence", ORACLE_CASES, oracle, &tol));

    // optical damping from the spectral asymmetry and from Im K
    let mut kubo = 0.0f64;
    for k in 0..ORACLE_CASES {
        let ifo = Interferometer::new(random_params(&mut rng, k % 2 == 1))?;
        let e = IntracavityField::new(random_complex(&mut rng, 1e8), random_complex(&mut rng, 1e8));
        let w = rng.gen_range(1e3..1e8);
        let s = noise_spectra(&ifo, &e, &[w]);
        if s.is_empty() {
            continue;
        }
        let from_k = -s.k[0].im / w;
        let scale = ((s.s_tilde_pos[0] + s.s_tilde_neg[0]) / (2.0 * HBAR * w)).max(from_k.abs());
        kubo = kubo.max((s.h_opt[0] - from_k).abs() / scale);
    }
    checks.push(check("optical_kubo", ORACLE_CASES, kubo, &tol));

    // thermal spectra: difference is 2ħΩH, mean is ħΩH(2n+1)
    let mut fdt = 0.0f64;
    for _ in 0..ORACLE_CASES {
        let mode = MechanicalMode {
            omega_m: rng.gen_range(1e3..1e8),
            h: rng.gen_range(1e-12..1e-3),
            bath: Bath::Temperature(rng.gen_range(1e-3..300.0)),
            mass: None,
        };
        let t = thermal_spectra(&mode)?;
        let n = mode.n_t()?;
        let a = HBAR * mode.omega_m * mode.h;
        fdt = fdt
            .max(((t.pos - t.neg) - 2.0 * a).abs() / t.pos)
            .max((0.5 * (t.pos + t.neg) - a * (2.0 * n + 1.0)).abs() / t.pos);
    }
    checks.push(check("thermal_fdt", ORACLE_CASES, fdt, &tol));

    // leading-order closed forms at p = 0.02 and 0.01, worst error over p
    let mut conv = 0.0f64;
    for p in [0.02, 0.01] {
        let tau = 1e-9;
        let lp = LumpedParams {
            gamma_s: 2.0 * p * p / tau,
            delta_s: -p * p / tau,
            tau_s: tau,
            p,
            alpha: 0.4,
            theta_m: 0.6,
        };
        let exact = exact_params_for(&lp, 1.1e-9, 281_760)?;
        let ifo = Interferometer::new(exact)?;
        let lp = from_exact(&exact, DEFAULT_VALIDITY_THRESHOLD).params;
        let e = ifo.classical_fields(&PortVector::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))?;
        let err = compare_band(&ifo, &lp, &e.as_vector(), 5.0 * lp.gamma(), 41)?;
        let worst = err
            .force_transfer
            .max(err.rigidity_matrix)
            .max(err.rigidity)
            .max(err.spectrum);
        conv = conv.max(worst / p);
    }
    checks.push(check("lumped_convergence", 2, conv, &tol));

    // coupling constants vanish exactly on their nodal lines
    let (mut disp, mut diss) = (0.0f64, 0.0f64);
    for _ in 0..ORACLE_CASES {
        let theta = rng.gen_range(0.0..FRAC_PI_2);
        let base = LumpedParams {
            gamma_s: rng.gen_range(1e3..1e7),
            delta_s: rng.gen_range(-1e7..1e7),
            tau_s: rng.gen_range(1e-10..1e-8),
            p: rng.gen_range(1e-4..0.2),
            alpha: theta - FRAC_PI_2,
            theta_m: theta,
        };
        let k_p = TAU / rng.gen_range(500e-9..2000e-9);
        disp = disp.max(coupling_constants(&base, k_p).g_disp.abs());
        let on = LumpedParams { alpha: theta, ..base };
        diss = diss.max(coupling_constants(&on, k_p).g_diss_combo.abs());
    }
    checks.push(check("dispersive_coupling_zero", ORACLE_CASES, disp, &tol));
    checks.push(check("dissipative_coupling_zero", ORACLE_CASES, diss, &tol));

    Ok(VerifyReport { seed, checks })
}

fn check(name: &'static str, cases: usize, worst: f64, tol: &impl Fn(&str) -> f64) -> InvariantCheck {
    InvariantCheck {
        name,
        cases,
        // NaN must not pass
        worst: if worst.is_nan() { f64::INFINITY } else { worst },
        tolerance: tol(name),
    }
}
