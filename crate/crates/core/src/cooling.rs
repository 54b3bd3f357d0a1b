//! Optical cooling of the mechanical mode: thermal spectra, steady-state
//! phonon number and pump optimisation under a fixed optical budget.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{cis, sin_cos, C2Matrix, C2Vector};
use crate::radiation_pressure::{damping_from_spectra, force_transfer};
use crate::scattering::{IntracavityField, Interferometer, PortVector};
use crate::{Error, Result, HBAR, K_B};

/// Default factor by which each simplifying inequality must hold.
pub const DEFAULT_REGIME_MARGIN: f64 = 10.0;

/// Bose occupation `1/(e^{ħ|Ω|/k_BT} − 1)`.
pub fn thermal_occupation(temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature(temperature));
    }
    if omega == 0.0 {
        return Err(Error::DegenerateFrequency);
    }
    Ok(1.0 / (HBAR * omega.abs() / (K_B * temperature)).exp_m1())
}

/// Mechanical heat bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bath {
    /// Temperature, K.
    Temperature(f64),
    /// Occupation number n_T.
    Occupation(f64),
}

/// Antisymmetric mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    /// Resonance frequency with the optical spring shift already included, rad/s.
    pub omega_m: f64,
    /// Friction factor H, kg/s.
    pub h: f64,
    pub bath: Bath,
    /// Effective mass, kg. Only needed by [`MechanicalMode::spring_shifted`].
    #[serde(default)]
    pub mass: Option<f64>,
}

impl MechanicalMode {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.omega_m.is_finite()) {
            return Err(Error::invalid("omega_m", "must be positive"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::invalid("h", "must be positive"));
        }
        match self.bath {
            Bath::Temperature(t) if !(t > 0.0) => return Err(Error::NonpositiveTemperature(t)),
            Bath::Occupation(n) if !(n >= 0.0 && n.is_finite()) => {
                return Err(Error::invalid("n_t", "must be finite and non-negative"))
            }
            _ => {}
        }
        if let Some(m) = self.mass {
            if !(m > 0.0) {
                return Err(Error::invalid("mass", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn n_t(&self) -> Result<f64> {
        match self.bath {
            Bath::Temperature(t) => thermal_occupation(t, self.omega_m),
            Bath::Occupation(n) => Ok(n),
        }
    }

    /// First-order spring shift `√(Ω_m² + Re K/m)`; `None` without a mass or
    /// when the shifted square is negative.
    pub fn spring_shifted(&self, re_k: f64) -> Option<f64> {
        let m = self.mass?;
        let sq = self.omega_m * self.omega_m + re_k / m;
        (sq >= 0.0).then(|| sq.sqrt())
    }
}

/// Non-symmetrized thermal force spectra at ±Ω_m, N²·s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpectra {
    pub pos: f64,
    pub neg: f64,
}

/// `S̃_T(+Ω_m) = 2ħΩ_mH(n_T+1)`, `S̃_T(−Ω_m) = 2ħΩ_mH n_T`.
pub fn thermal_spectra(mode: &MechanicalMode) -> Result<ThermalSpectra> {
    mode.validate()?;
    let n = mode.n_t()?;
    let a = 2.0 * HBAR * mode.omega_m * mode.h;
    Ok(ThermalSpectra {
        pos: a * (n + 1.0),
        neg: a * n,
    })
}

/// Which simplifying inequalities hold, each tested by `margin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeFlags {
    pub margin: f64,
    /// `S̃_T(+) − S̃_T(−) ≪ S̃_T(±)`.
    pub thermal_asymmetry_small: bool,
    /// `S̃_F(+) ≫ S̃_F(−)`.
    pub optical_asymmetry_strong: bool,
    /// `S̃_F(−) ≪ S̃_T(±)`.
    pub optical_negative_small: bool,
    /// `S̃_T(+) − S̃_T(−) ≪ S̃_F(+)`: the thermal asymmetry is negligible in
    /// the denominator as well.
    pub optical_dominates_thermal_asymmetry: bool,
}

impl RegimeFlags {
    pub fn evaluate(thermal: &ThermalSpectra, s_f_pos: f64, s_f_neg: f64, margin: f64) -> Self {
        let thermal_diff = thermal.pos - thermal.neg;
        let thermal_min = thermal.pos.min(thermal.neg);
        RegimeFlags {
            margin,
            thermal_asymmetry_small: margin * thermal_diff <= thermal_min,
            optical_asymmetry_strong: s_f_pos >= margin * s_f_neg,
            optical_negative_small: margin * s_f_neg <= thermal_min,
            optical_dominates_thermal_asymmetry: margin * thermal_diff <= s_f_pos,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.thermal_asymmetry_small
            && self.optical_asymmetry_strong
            && self.optical_negative_small
            && self.optical_dominates_thermal_asymmetry
    }
}

/// Steady-state occupancy and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingResult {
    pub n_bar: f64,
    /// Same quantity via `2n̄+1 = (S_T+S_F)/(ħΩ_m(H+H_opt))`.
    pub n_bar_fdt: f64,
    pub n_t: f64,
    pub s_t_pos: f64,
    pub s_t_neg: f64,
    pub s_f_pos: f64,
    pub s_f_neg: f64,
    pub h_opt: f64,
    pub regime: RegimeFlags,
}

/// `1/n̄ + 1 = [S̃_T(+)+S̃_F(+)] / [S̃_T(−)+S̃_F(−)]`.
pub fn occupancy(
    mode: &MechanicalMode,
    s_f_pos: f64,
    s_f_neg: f64,
    h_opt: f64,
) -> Result<CoolingResult> {
    let thermal = thermal_spectra(mode)?;
    let total_damping = mode.h + h_opt;
    if !(total_damping > 0.0) {
        return Err(Error::UnstableSystem { total_damping });
    }
    let up = thermal.pos + s_f_pos;
    let down = thermal.neg + s_f_neg;
    let n_bar = down / (up - down);
    let symmetrized = 0.5 * (up + down);
    let n_bar_fdt = 0.5 * (symmetrized / (HBAR * mode.omega_m * total_damping) - 1.0);
    Ok(CoolingResult {
        n_bar,
        n_bar_fdt,
        n_t: mode.n_t()?,
        s_t_pos: thermal.pos,
        s_t_neg: thermal.neg,
        s_f_pos,
        s_f_neg,
        h_opt,
        regime: RegimeFlags::evaluate(&thermal, s_f_pos, s_f_neg, DEFAULT_REGIME_MARGIN),
    })
}

/// Simplified occupancy `S̃_T(−Ω_m)/S̃_F(+Ω_m)` with its regime flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedOccupancy {
    pub n_bar: f64,
    pub regime: RegimeFlags,
}

pub fn occupancy_simplified(
    mode: &MechanicalMode,
    s_f_pos: f64,
    s_f_neg: f64,
    margin: f64,
) -> Result<SimplifiedOccupancy> {
    let thermal = thermal_spectra(mode)?;
    Ok(SimplifiedOccupancy {
        n_bar: thermal.neg / s_f_pos,
        regime: RegimeFlags::evaluate(&thermal, s_f_pos, s_f_neg, margin),
    })
}

/// Occupancy for intracavity field `field` using exact spectra at ±Ω_m.
pub fn occupancy_for_field(
    ifo: &Interferometer,
    mode: &MechanicalMode,
    field: &IntracavityField,
) -> Result<CoolingResult> {
    let forms = OpticalForms::new(ifo, mode.omega_m)?;
    let e = field.as_vector();
    let (s_pos, s_neg) = forms.spectra(&e);
    occupancy(mode, s_pos, s_neg, damping_from_spectra(s_pos, s_neg, mode.omega_m)?)
}

/// `ħ²k_p²𝔽(±Ω_m)𝔽†(±Ω_m)`: the spectra are Hermitian forms in E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalForms {
    pub omega_m: f64,
    pub pos: C2Matrix,
    pub neg: C2Matrix,
}

impl OpticalForms {
    pub fn new(ifo: &Interferometer, omega_m: f64) -> Result<Self> {
        let scale = (HBAR * ifo.params().k_p).powi(2);
        let form = |w: f64| -> Result<C2Matrix> {
            let f = force_transfer(ifo, w)?;
            Ok((f * f.dagger()).scale_re(scale))
        };
        Ok(OpticalForms {
            omega_m,
            pos: form(omega_m)?,
            neg: form(-omega_m)?,
        })
    }

    /// Pulls the forms back through a linear map `E = L v`.
    pub fn pulled_back(&self, l: &C2Matrix) -> Self {
        OpticalForms {
            omega_m: self.omega_m,
            pos: l.dagger() * self.pos * *l,
            neg: l.dagger() * self.neg * *l,
        }
    }

    pub fn spectra(&self, v: &C2Vector) -> (f64, f64) {
        (
            v.quad_form(&self.pos).re.max(0.0),
            v.quad_form(&self.neg).re.max(0.0),
        )
    }
}

/// Optical budget held fixed during pump optimisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyConstraint {
    /// `|E₊|² + |E₋|²`, photons/s.
    IntracavityEnergy(f64),
    /// `|A_W|² + |A_S|²`, photons/s. Not the optimum discussed for cooling;
    /// offered for comparison only.
    InjectedPower(f64),
}

impl EnergyConstraint {
    fn budget(&self) -> f64 {
        match *self {
            EnergyConstraint::IntracavityEnergy(b) | EnergyConstraint::InjectedPower(b) => b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub chi_points: usize,
    pub phi_points: usize,
    /// Golden-section stopping width in χ and φ, rad.
    pub tolerance: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            chi_points: 64,
            phi_points: 64,
            tolerance: 1e-6,
        }
    }
}

/// One landscape sample; `n_bar` is `None` where the system is anti-damped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSample {
    pub chi: f64,
    pub phi: f64,
    pub n_bar: Option<f64>,
    pub s_f_pos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpOptimum {
    pub chi: f64,
    pub phi: f64,
    pub field: IntracavityField,
    pub pump: PortVector,
    pub result: CoolingResult,
    pub landscape: Vec<LandscapeSample>,
}

impl PumpOptimum {
    /// `|E₋|/|E₊|`.
    pub fn mode_ratio(&self) -> f64 {
        self.field.e_minus.norm() / self.field.e_plus.norm()
    }
}

fn mixing_vector(budget: f64, chi: f64, phi: f64) -> C2Vector {
    let amp = budget.sqrt();
    let (s, c) = sin_cos(chi);
    C2Vector::new(Complex64::from(amp * c), cis(phi) * (amp * s))
}

/// Stationary points of `v†Av / v†Cv` for Hermitian 2×2 `A`, `C`: the
/// null vectors of `A − λC` at the roots of `det(A − λC) = 0`.
fn rayleigh_candidates(a: &C2Matrix, c: &C2Matrix) -> Vec<C2Vector> {
    let (a00, a11, a01) = (a[(0, 0)].re, a[(1, 1)].re, a[(0, 1)]);
    let (c00, c11, c01) = (c[(0, 0)].re, c[(1, 1)].re, c[(0, 1)]);
    let qa = c00 * c11 - c01.norm_sqr();
    let qb = -(a00 * c11 + a11 * c00 - 2.0 * (a01 * c01.conj()).re);
    let qc = a00 * a11 - a01.norm_sqr();
    let roots: Vec<f64> = if qa == 0.0 {
        if qb == 0.0 {
            vec![]
        } else {
            vec![-qc / qb]
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            vec![]
        } else {
            // cancellation-free pair
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            let mut r = vec![q / qa];
            if q != 0.0 {
                r.push(qc / q);
            }
            r
        }
    };
    roots
        .into_iter()
        .filter(|l| l.is_finite())
        .filter_map(|l| {
            let m = *a - c.scale_re(l);
            let u = C2Vector::new(-m[(0, 1)], m[(0, 0)]);
            let w = C2Vector::new(m[(1, 1)], -m[(1, 0)]);
            let v = if u.norm_sqr() >= w.norm_sqr() { u } else { w };
            (v.norm_sqr() > 0.0).then_some(v)
        })
        .collect()
}

/// `(χ, φ)` of the direction of `v`.
fn mixing_angles(v: &C2Vector) -> (f64, f64) {
    let chi = v[1].norm().atan2(v[0].norm());
    let phi = if v[0].norm() == 0.0 || v[1].norm() == 0.0 {
        0.0
    } else {
        (v[1].arg() - v[0].arg()).rem_euclid(TAU)
    };
    (chi, phi)
}

fn golden_section(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Minimises n̄ over `v = √B (cos χ, sin χ e^{iφ})`, where `v` is the
/// intracavity field or the injected pump depending on `constraint`.
///
/// A χ×φ grid is scanned first; the best sample is then refined by
/// alternating golden-section searches on each axis, and finally compared
/// with the closed-form stationary directions of n̄. A refined point is only
/// accepted if it improves on the best one so far.
pub fn optimize_pump(
    ifo: &Interferometer,
    mode: &MechanicalMode,
    constraint: EnergyConstraint,
    options: &OptimizeOptions,
) -> Result<PumpOptimum> {
    mode.validate()?;
    let budget = constraint.budget();
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::invalid("energy_budget", "must be positive"));
    }
    if options.chi_points < 2 || options.phi_points < 1 {
        return Err(Error::invalid("grid", "needs at least 2×1 points"));
    }
    let forms = OpticalForms::new(ifo, mode.omega_m)?;
    let pump_to_field = {
        let dyn_ = ifo.mode_dynamics(0.0)?;
        dyn_.d_e_inv * ifo.fixed_matrices(0.0).t_tilde
    };
    let forms = match constraint {
        EnergyConstraint::IntracavityEnergy(_) => forms,
        EnergyConstraint::InjectedPower(_) => forms.pulled_back(&pump_to_field),
    };
    let thermal = thermal_spectra(mode)?;
    let evaluate = |chi: f64, phi: f64| -> (Option<f64>, f64) {
        let (sp, sn) = forms.spectra(&mixing_vector(budget, chi, phi));
        let h_opt = (sp - sn) / (2.0 * HBAR * mode.omega_m);
        if mode.h + h_opt > 0.0 {
            let down = thermal.neg + sn;
            (Some(down / (thermal.pos + sp - down)), sp)
        } else {
            (None, sp)
        }
    };
    let objective = |chi: f64, phi: f64| evaluate(chi, phi).0.unwrap_or(f64::INFINITY);

    let d_chi = FRAC_PI_2 / (options.chi_points - 1) as f64;
    let d_phi = TAU / options.phi_points as f64;
    let landscape: Vec<LandscapeSample> = (0..options.chi_points * options.phi_points)
        .into_par_iter()
        .map(|k| {
            let chi = (k / options.phi_points) as f64 * d_chi;
            let phi = (k % options.phi_points) as f64 * d_phi;
            let (n_bar, s_f_pos) = evaluate(chi, phi);
            LandscapeSample {
                chi,
                phi,
                n_bar,
                s_f_pos,
            }
        })
        .collect();

    let best = landscape
        .iter()
        .filter_map(|s| s.n_bar.map(|n| (n, s.chi, s.phi)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let (mut n_best, mut chi, mut phi) = match best {
        Some(b) => b,
        None => {
            let worst = landscape
                .iter()
                .map(|s| {
                    let (sp, sn) = forms.spectra(&mixing_vector(budget, s.chi, s.phi));
                    mode.h + (sp - sn) / (2.0 * HBAR * mode.omega_m)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::UnstableSystem {
                total_damping: worst,
            });
        }
    };

    let (mut w_chi, mut w_phi) = (d_chi, d_phi);
    for _ in 0..100 {
        let (c, n) = golden_section(
            (chi - w_chi).max(0.0),
            (chi + w_chi).min(FRAC_PI_2),
            options.tolerance,
            |c| objective(c, phi),
        );
        if n < n_best {
            n_best = n;
            chi = c;
        }
        let (p, n) = golden_section(phi - w_phi, phi + w_phi, options.tolerance, |p| {
            objective(chi, p)
        });
        if n < n_best {
            n_best = n;
            phi = p;
        }
        if w_chi <= options.tolerance && w_phi <= options.tolerance {
            break;
        }
        w_chi = (w_chi * 0.5).max(options.tolerance);
        w_phi = (w_phi * 0.5).max(options.tolerance);
    }
    phi = phi.rem_euclid(TAU);

    // The axis searches cannot leave χ = 0, where φ is degenerate. With the
    // budget fixed, n̄ = v†Av / v†Cv, whose stationary directions are known
    // in closed form; they are taken when they improve on the search.
    let id = C2Matrix::identity();
    let a = forms.neg + id.scale_re(thermal.neg / budget);
    let c = forms.pos - forms.neg + id.scale_re((thermal.pos - thermal.neg) / budget);
    for v in rayleigh_candidates(&a, &c) {
        let (c_chi, c_phi) = mixing_angles(&v);
        let n = objective(c_chi, c_phi);
        if n < n_best {
            n_best = n;
            chi = c_chi;
            phi = c_phi;
        }
    }

    let v = mixing_vector(budget, chi, phi);
    let (field, pump) = match constraint {
        EnergyConstraint::IntracavityEnergy(_) => {
            let field = IntracavityField::from_vector(v);
            (field, pump_for_intracavity(ifo, &field)?)
        }
        EnergyConstraint::InjectedPower(_) => {
            let pump = PortVector::from_vector(v);
            (ifo.classical_fields(&pump)?, pump)
        }
    };
    let (sp, sn) = forms.spectra(&v);
    let result = occupancy(mode, sp, sn, damping_from_spectra(sp, sn, mode.omega_m)?)?;
    Ok(PumpOptimum {
        chi,
        phi,
        field,
        pump,
        result,
        landscape,
    })
}

/// Port amplitudes producing the intracavity field `field`:
/// `A = T̃⁻¹(ω_p) D_e(ω_p) E`.
pub fn pump_for_intracavity(ifo: &Interferometer, field: &IntracavityField) -> Result<PortVector> {
    let dyn_ = ifo.mode_dynamics(0.0)?;
    let fm = ifo.fixed_matrices(0.0);
    let y = dyn_.d_e * field.as_vector();
    let scale = y.max_abs();
    let solve = |k: usize, port: &'static str| -> Result<Complex64> {
        let t = fm.t_tilde[(k, k)];
        if t.norm() == 0.0 {
            if y[k].norm() > 1e-12 * scale {
                return Err(Error::UnreachableField { port });
            }
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(y[k] / t)
    };
    Ok(PortVector::new(solve(0, "west")?, solve(1, "south")?))
}
