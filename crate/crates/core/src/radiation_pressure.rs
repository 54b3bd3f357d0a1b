//! Radiation-pressure force on the antisymmetric membrane mode: force
//! transfer 𝔽, optical rigidity 𝕂 = 𝕂₁ + 𝕂₂, force-noise spectra and
//! optical damping.
//!
//! Spectral densities are non-symmetrized, `S̃_F(Ω) = ħ²k_p² E†𝔽(Ω)𝔽†(Ω)E`,
//! for vacuum input fields. The rigidity is `K(Ω) = ħk_p² E†𝕂(Ω)E`; its
//! imaginary part carries the optical damping, `Ω H_opt = −Im K`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{cc_close, pauli_basis, C2Matrix};
use crate::scattering::{IntracavityField, Interferometer, SidebandResponse};
use crate::{Error, Result, HBAR};

/// `𝔽(Ω) = (2R_m/D) 𝕏 [𝕄ℚ − ℚ*R̆] T̃` at ω = ω_p + Ω.
pub fn force_transfer(ifo: &Interferometer, sideband: f64) -> Result<C2Matrix> {
    let dyn_ = ifo.mode_dynamics(sideband)?;
    let fm = ifo.fixed_matrices(sideband);
    let q = ifo.mode_mixer();
    let (_, _, x, _) = pauli_basis();
    let inner = fm.m * q - q.conj() * fm.r_breve;
    let prefactor = Complex64::from(2.0 * ifo.params().r_m()) / dyn_.det;
    Ok((x * inner * fm.t_tilde).scale(prefactor))
}

/// Rigidity matrices at one sideband frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidityMatrices {
    /// Optical spring proper.
    pub k1: C2Matrix,
    /// Standing-wave attraction of the membrane, `−4R_mT_m ℤ`.
    pub k2: C2Matrix,
    pub k: C2Matrix,
}

/// Optical rigidity split into its two physical parts, N/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidityBreakdown {
    pub k1: Complex64,
    pub k2: f64,
    pub k: Complex64,
}

fn spring_generator(ifo: &Interferometer, sideband: f64) -> Result<C2Matrix> {
    let dyn_ = ifo.mode_dynamics(sideband)?;
    let fm = ifo.fixed_matrices(sideband);
    let q = ifo.mode_mixer();
    let (id, _, x, _) = pauli_basis();
    let r_m = ifo.params().r_m();
    let round_trips = fm.r_tilde[(0, 0)] * fm.r_tilde[(1, 1)];
    let inner = fm.m * q * fm.r_tilde * q.transpose() - id.scale(round_trips);
    let prefactor = Complex64::new(0.0, -4.0 * r_m * r_m) / dyn_.det;
    Ok((x * inner * x).scale(prefactor))
}

/// `𝕂₂ = −4R_mT_m ℤ`, independent of frequency.
pub fn attraction_matrix(ifo: &Interferometer) -> C2Matrix {
    let p = ifo.params();
    let (_, z, _, _) = pauli_basis();
    z.scale_re(-4.0 * p.r_m() * p.t_m())
}

/// 𝕂₁(Ω) = M₁(Ω) + M₁†(−Ω), 𝕂₂ and their sum. Needs both ω_p ± Ω regular.
pub fn rigidity_matrices(ifo: &Interferometer, sideband: f64) -> Result<RigidityMatrices> {
    let k1 = cc_close(
        &spring_generator(ifo, sideband)?,
        &spring_generator(ifo, -sideband)?,
    );
    let k2 = attraction_matrix(ifo);
    Ok(RigidityMatrices { k1, k2, k: k1 + k2 })
}

/// `K_i = ħk_p² E†𝕂_iE`.
pub fn rigidity(
    ifo: &Interferometer,
    field: &IntracavityField,
    sideband: f64,
) -> Result<RigidityBreakdown> {
    let mats = rigidity_matrices(ifo, sideband)?;
    let scale = HBAR * ifo.params().k_p.powi(2);
    let e = field.as_vector();
    let k1 = e.quad_form(&mats.k1) * scale;
    let k2 = e.quad_form(&mats.k2).re * scale;
    Ok(RigidityBreakdown { k1, k2, k: k1 + k2 })
}

/// `ħ²k_p² E†𝔽(Ω)𝔽†(Ω)E`, N²·s.
pub fn force_spectral_density(
    ifo: &Interferometer,
    field: &IntracavityField,
    sideband: f64,
) -> Result<f64> {
    let f = force_transfer(ifo, sideband)?;
    let amplitude = f.dagger() * field.as_vector();
    Ok((HBAR * ifo.params().k_p).powi(2) * amplitude.norm_sqr())
}

/// Every transfer matrix at ω = ω_p + Ω.
pub fn sideband_response(ifo: &Interferometer, sideband: f64) -> Result<SidebandResponse> {
    let f = force_transfer(ifo, sideband)?;
    Ok(SidebandResponse {
        omega: ifo.omega_p() + sideband,
        sideband,
        r_ifo: ifo.scattering_matrix(sideband)?,
        g: ifo.displacement_transfer(sideband)?,
        f,
        k_mat: rigidity_matrices(ifo, sideband)?.k,
        det: ifo.mode_dynamics(sideband)?.det,
    })
}

/// `H_opt = [S̃_F(Ω) − S̃_F(−Ω)] / (2ħΩ)`, kg/s.
pub fn damping_from_spectra(s_pos: f64, s_neg: f64, sideband: f64) -> Result<f64> {
    if sideband == 0.0 {
        return Err(Error::DegenerateFrequency);
    }
    Ok((s_pos - s_neg) / (2.0 * HBAR * sideband))
}

/// A grid point left out of a spectrum, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub omega: f64,
    pub reason: String,
}

/// Force-noise spectrum sampled at paired ±Ω points.
///
/// `omega` holds the evaluated grid points in input order; points that could
/// not be evaluated are listed in `skipped` instead.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ForceNoiseSpectrum {
    pub omega: Vec<f64>,
    pub s_tilde_pos: Vec<f64>,
    pub s_tilde_neg: Vec<f64>,
    pub s_sym: Vec<f64>,
    pub k: Vec<Complex64>,
    pub h_opt: Vec<f64>,
    pub skipped: Vec<SkippedPoint>,
}

impl ForceNoiseSpectrum {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub(crate) fn push(&mut self, omega: f64, s_pos: f64, s_neg: f64, k: Complex64) {
        self.omega.push(omega);
        self.s_tilde_pos.push(s_pos);
        self.s_tilde_neg.push(s_neg);
        self.s_sym.push(0.5 * (s_pos + s_neg));
        self.k.push(k);
        self.h_opt.push((s_pos - s_neg) / (2.0 * HBAR * omega));
    }
}

struct SpectrumPoint {
    s_pos: f64,
    s_neg: f64,
    k: Complex64,
}

fn spectrum_point(ifo: &Interferometer, field: &IntracavityField, w: f64) -> Result<SpectrumPoint> {
    if w == 0.0 {
        return Err(Error::DegenerateFrequency);
    }
    Ok(SpectrumPoint {
        s_pos: force_spectral_density(ifo, field, w)?,
        s_neg: force_spectral_density(ifo, field, -w)?,
        k: rigidity(ifo, field, w)?.k,
    })
}

/// Evaluates `S̃_F(±Ω)`, `S_F`, `K` and `H_opt` over `grid` in parallel.
///
/// Ω = 0 and optically singular points are skipped and reported; the output
/// does not depend on the number of worker threads.
pub fn noise_spectra(
    ifo: &Interferometer,
    field: &IntracavityField,
    grid: &[f64],
) -> ForceNoiseSpectrum {
    let points: Vec<Result<SpectrumPoint>> = grid
        .par_iter()
        .map(|&w| spectrum_point(ifo, field, w))
        .collect();
    let mut out = ForceNoiseSpectrum::default();
    for (&w, point) in grid.iter().zip(points) {
        match point {
            Ok(pt) => out.push(w, pt.s_pos, pt.s_neg, pt.k),
            Err(e) => out.skipped.push(SkippedPoint {
                omega: w,
                reason: e.to_string(),
            }),
        }
    }
    out
}

/// H_opt from the stored spectral asymmetry, one value per grid point.
pub fn optical_damping(spectrum: &ForceNoiseSpectrum) -> Result<Vec<f64>> {
    spectrum
        .omega
        .iter()
        .zip(spectrum.s_tilde_pos.iter().zip(&spectrum.s_tilde_neg))
        .map(|(&w, (&sp, &sn))| damping_from_spectra(sp, sn, w))
        .collect()
}
