//! Lumped-mode (high-finesse, near-resonance, small-asymmetry) closed forms
//! for the interferometer without power recycling.
//!
//! The asymmetry is written in polar form, `ε = p cos α`, `κ = p sin α`.
//! The south arm detuning is defined by the round trip,
//! `e^{2iω_pτ_S} = e^{2iδ_Sτ_S + iθ}`, so that δ_S is the distance from the
//! nearest resonance of the exact model.
//!
//! The approximate force-transfer matrix is referred to the port planes: it
//! equals the exact 𝔽 multiplied on the right by
//! `diag(e^{−iωτ_W}, e^{−iωτ_S})` (see [`port_reference`]). Spectral
//! densities are unaffected by this phase.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{cc_close, cis, C2Matrix, C2Vector};
use crate::radiation_pressure::ForceNoiseSpectrum;
use crate::scattering::{Interferometer, InterferometerParams};
use crate::{Result, HBAR};

/// Default threshold on each small parameter (t_S², |δ_S+Ω|τ_S, p²).
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.05;

/// `(p, α)` with `p = √(ε²+κ²)`, `α = atan2(κ, ε)`; α = 0 when p = 0.
pub fn asymmetry_polar(epsilon: f64, kappa: f64) -> (f64, f64) {
    let p = epsilon.hypot(kappa);
    if p == 0.0 {
        (0.0, 0.0)
    } else {
        (p, kappa.atan2(epsilon))
    }
}

fn wrap_phase(x: f64) -> f64 {
    // into (−π, π]
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Effective single-mode description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LumpedParams {
    /// South half-bandwidth γ_S = t_S²/(4τ_S), rad/s.
    pub gamma_s: f64,
    /// South detuning δ_S, rad/s.
    pub delta_s: f64,
    pub tau_s: f64,
    pub p: f64,
    pub alpha: f64,
    pub theta_m: f64,
}

impl LumpedParams {
    pub fn epsilon(&self) -> f64 {
        self.p * libm::cos(self.alpha)
    }

    pub fn kappa(&self) -> f64 {
        self.p * libm::sin(self.alpha)
    }

    pub fn r_m(&self) -> f64 {
        libm::cos(self.theta_m)
    }

    /// `γ_m = p² sin²(θ−α)/τ_S`.
    pub fn gamma_m(&self) -> f64 {
        (self.p * libm::sin(self.theta_m - self.alpha)).powi(2) / self.tau_s
    }

    /// `δ_m = p² R_m sin(θ−2α)/τ_S`.
    pub fn delta_m(&self) -> f64 {
        self.p * self.p * self.r_m() * libm::sin(self.theta_m - 2.0 * self.alpha) / self.tau_s
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_s + self.gamma_m()
    }

    pub fn delta(&self) -> f64 {
        self.delta_s + self.delta_m()
    }

    /// `ℓ(Ω) = γ − i(δ+Ω)`.
    pub fn ell(&self, omega: f64) -> Complex64 {
        Complex64::new(self.gamma(), -(self.delta() + omega))
    }

    /// `ℓ_S(Ω) = γ_S − i(δ_S+Ω)`.
    pub fn ell_s(&self, omega: f64) -> Complex64 {
        Complex64::new(self.gamma_s, -(self.delta_s + omega))
    }

    /// `2εκ/τ_S`, the static offset of the Fano dip.
    pub fn fano_offset(&self) -> f64 {
        2.0 * self.epsilon() * self.kappa() / self.tau_s
    }
}

/// `(ℓ(Ω), ℓ_S(Ω))`.
pub fn lorentzians(lp: &LumpedParams, omega: f64) -> (Complex64, Complex64) {
    (lp.ell(omega), lp.ell_s(omega))
}

/// Which small-parameter assumptions hold, with the values tested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub threshold: f64,
    /// t_S².
    pub transmissivity_sq: f64,
    /// |δ_S|τ_S.
    pub detuning_phase: f64,
    /// p².
    pub asymmetry_sq: f64,
    pub small_transmissivity: bool,
    pub near_resonance: bool,
    pub small_asymmetry: bool,
    /// The closed forms assume r_W = 0.
    pub no_power_recycling: bool,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.small_transmissivity
            && self.near_resonance
            && self.small_asymmetry
            && self.no_power_recycling
    }

    /// Whether `|δ_S + Ω|τ_S` stays below the threshold at sideband Ω.
    pub fn near_resonance_at(&self, lp: &LumpedParams, omega: f64) -> bool {
        (lp.delta_s + omega).abs() * lp.tau_s <= self.threshold
    }

    /// Names of the failed assumptions.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.small_transmissivity {
            v.push("srm_transmissivity_not_small");
        }
        if !self.near_resonance {
            v.push("south_detuning_not_small");
        }
        if !self.small_asymmetry {
            v.push("asymmetry_not_small");
        }
        if !self.no_power_recycling {
            v.push("power_recycling_present");
        }
        v
    }
}

/// Lumped parameters extracted from an exact description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LumpedModel {
    pub params: LumpedParams,
    pub validity: ValidityReport,
}

/// Maps exact parameters onto the lumped model. Violated assumptions are
/// reported, never rejected.
pub fn from_exact(params: &InterferometerParams, threshold: f64) -> LumpedModel {
    let (p, alpha) = asymmetry_polar(params.epsilon, params.kappa);
    let round_trip = 2.0 * params.pump_phase_south() - params.theta_m;
    let lp = LumpedParams {
        gamma_s: params.t_s * params.t_s / (4.0 * params.tau_s),
        delta_s: wrap_phase(round_trip) / (2.0 * params.tau_s),
        tau_s: params.tau_s,
        p,
        alpha,
        theta_m: params.theta_m,
    };
    let transmissivity_sq = params.t_s * params.t_s;
    let detuning_phase = lp.delta_s.abs() * lp.tau_s;
    let asymmetry_sq = p * p;
    LumpedModel {
        params: lp,
        validity: ValidityReport {
            threshold,
            transmissivity_sq,
            detuning_phase,
            asymmetry_sq,
            small_transmissivity: transmissivity_sq <= threshold,
            near_resonance: detuning_phase <= threshold,
            small_asymmetry: asymmetry_sq <= threshold,
            no_power_recycling: params.r_w == 0.0,
        },
    }
}

/// Returns `params` with k_p moved to the nearest pump frequency whose south
/// detuning is `delta_s`. The shift is below one half free spectral range.
pub fn tune_to_detuning(params: &InterferometerParams, delta_s: f64) -> InterferometerParams {
    let omega_p = params.omega_p();
    let target = params.theta_m + 2.0 * delta_s * params.tau_s;
    let n = ((2.0 * omega_p * params.tau_s - target) / TAU).round();
    let tuned = (target + TAU * n) / (2.0 * params.tau_s);
    InterferometerParams {
        k_p: tuned / crate::C_LIGHT,
        ..*params
    }
}

/// Dispersive and dissipative coupling constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    /// `g_disp = 2k_pR_m p cos(θ−α)/τ_S`, rad/(s·m).
    pub g_disp: f64,
    /// `g_diss/√(2γ_m) = 2k_pR_m sign(θ−α)/√τ_S`, with sign(0) = 0.
    pub g_diss_combo: f64,
}

pub fn coupling_constants(lp: &LumpedParams, k_p: f64) -> CouplingConstants {
    let delta = lp.theta_m - lp.alpha;
    // cos written as sin of the complement so that θ−α = π/2 gives an exact 0
    let cos_delta = libm::sin(std::f64::consts::FRAC_PI_2 - delta);
    let sign = if delta > 0.0 {
        1.0
    } else if delta < 0.0 {
        -1.0
    } else {
        0.0
    };
    let r_m = lp.r_m();
    CouplingConstants {
        g_disp: 2.0 * k_p * r_m * lp.p * cos_delta / lp.tau_s,
        g_diss_combo: 2.0 * k_p * r_m * sign / lp.tau_s.sqrt(),
    }
}

/// `diag(e^{−iωτ_W}, e^{−iωτ_S})` at ω = ω_p + Ω: moves the exact 𝔽 onto
/// the reference planes of the approximate one.
pub fn port_reference(ifo: &Interferometer, omega: f64) -> C2Matrix {
    let (phi_w, phi_s) = ifo.single_pass_phases(omega);
    C2Matrix::diag(cis(-phi_w), cis(-phi_s))
}

/// Leading-order force-transfer matrix.
pub fn approx_force_transfer(lp: &LumpedParams, omega: f64) -> C2Matrix {
    let tau = lp.tau_s;
    let (p, a, th) = (lp.p, lp.alpha, lp.theta_m);
    let root = (lp.gamma_s * tau).sqrt();
    let i = Complex64::i();
    let m = C2Matrix::new([
        [
            i * (p * libm::sin(a - th)),
            cis(-th) * root,
        ],
        [
            (lp.ell_s(omega) * tau + i * (0.5 * p * p * libm::sin(2.0 * a))) * cis(th),
            -cis(th - a) * (root * p),
        ],
    ]);
    m.scale(Complex64::from(2.0 * lp.r_m()) / (lp.ell(omega) * tau))
}

fn approx_spring_generator(lp: &LumpedParams, omega: f64) -> C2Matrix {
    let tau = lp.tau_s;
    let (p, a, th) = (lp.p, lp.alpha, lp.theta_m);
    let r_m = lp.r_m();
    let eps = lp.epsilon();
    let m = C2Matrix::new([
        [Complex64::from(r_m), -cis(-a) * (r_m * p)],
        [
            -cis(2.0 * th - a) * (r_m * p),
            (lp.ell_s(omega) * tau + eps * eps) * cis(th),
        ],
    ]);
    m.scale(Complex64::new(0.0, -2.0 * r_m) / (lp.ell(omega) * tau))
}

/// Leading-order rigidity matrix, closed under `M(Ω) + M†(−Ω)`.
pub fn approx_rigidity_matrix(lp: &LumpedParams, omega: f64) -> C2Matrix {
    cc_close(
        &approx_spring_generator(lp, omega),
        &approx_spring_generator(lp, -omega),
    )
}

/// `K ≈ ħk_p² E†𝕂E`, N/m.
pub fn approx_rigidity(lp: &LumpedParams, k_p: f64, omega: f64, field: &C2Vector) -> Complex64 {
    field.quad_form(&approx_rigidity_matrix(lp, omega)) * (HBAR * k_p * k_p)
}

fn canonical_scale(lp: &LumpedParams, k_p: f64, e_plus_sq: f64) -> f64 {
    4.0 * (HBAR * k_p * lp.r_m()).powi(2) * e_plus_sq / lp.tau_s
}

/// Canonical Lorentzian `S̃_F(Ω) = 4ħ²k_p²R_m²|E₊|²γ/(τ_S|ℓ(Ω)|²)`.
pub fn canonical_force_spectral_density(
    lp: &LumpedParams,
    k_p: f64,
    e_plus_sq: f64,
    omega: f64,
) -> f64 {
    canonical_scale(lp, k_p, e_plus_sq) * lp.gamma() / lp.ell(omega).norm_sqr()
}

/// Canonical symmetrized density, `∝ γ(γ²+δ²+Ω²)/(|ℓ(Ω)|²|ℓ(−Ω)|²)`.
pub fn canonical_symmetrized_density(
    lp: &LumpedParams,
    k_p: f64,
    e_plus_sq: f64,
    omega: f64,
) -> f64 {
    let (g, d) = (lp.gamma(), lp.delta());
    canonical_scale(lp, k_p, e_plus_sq) * g * (g * g + d * d + omega * omega)
        / (lp.ell(omega).norm_sqr() * lp.ell(-omega).norm_sqr())
}

/// Canonical rigidity `K = 4ħk_p²R_m²|E₊|²δ/(τ_S ℓ(Ω)ℓ*(−Ω))`.
pub fn canonical_rigidity(lp: &LumpedParams, k_p: f64, e_plus_sq: f64, omega: f64) -> Complex64 {
    let scale = 4.0 * HBAR * (k_p * lp.r_m()).powi(2) * e_plus_sq * lp.delta() / lp.tau_s;
    Complex64::from(scale) / (lp.ell(omega) * lp.ell(-omega).conj())
}

/// Canonical spectrum over `grid`; Ω = 0 is skipped as in the exact sweep.
pub fn canonical_spectra(
    lp: &LumpedParams,
    k_p: f64,
    e_plus: Complex64,
    grid: &[f64],
) -> ForceNoiseSpectrum {
    let e_sq = e_plus.norm_sqr();
    let mut out = ForceNoiseSpectrum::default();
    for &w in grid {
        if w == 0.0 {
            out.skipped.push(crate::radiation_pressure::SkippedPoint {
                omega: w,
                reason: crate::Error::DegenerateFrequency.to_string(),
            });
            continue;
        }
        out.push(
            w,
            canonical_force_spectral_density(lp, k_p, e_sq, w),
            canonical_force_spectral_density(lp, k_p, e_sq, -w),
            canonical_rigidity(lp, k_p, e_sq, w),
        );
    }
    out
}

/// Spectrum for a carrier injected through the west port only (A_S = 0,
/// A₊ = A_W), including the Fano term
/// `γ_m(2δ_S − 2εκ/τ_S + Ω)²`. `ℓ(0)` is the Lorentzian at zero offset.
pub fn fano_spectrum(lp: &LumpedParams, k_p: f64, a_plus_sq: f64, grid: &[f64]) -> Vec<f64> {
    let (gm, gs, g) = (lp.gamma_m(), lp.gamma_s, lp.gamma());
    let off = lp.fano_offset();
    let ell0 = lp.ell(0.0).norm_sqr();
    let background = gs * (g * g + (lp.delta_s - lp.delta_m() - off).powi(2));
    grid.iter()
        .map(|&w| {
            let prefactor = canonical_scale(lp, k_p, a_plus_sq) / (ell0 * lp.ell(w).norm_sqr());
            prefactor * (gm * (2.0 * lp.delta_s - off + w).powi(2) + background)
        })
        .collect()
}

/// Position of the Fano dip, `−2δ_S + 2εκ/τ_S`.
pub fn fano_minimum(lp: &LumpedParams) -> f64 {
    -2.0 * lp.delta_s + lp.fano_offset()
}

/// Relative deviations of the leading-order forms from the exact model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointComparison {
    /// Entrywise, against the port-referenced exact 𝔽.
    pub force_transfer: f64,
    /// Entrywise, 𝕂 matrices.
    pub rigidity_matrix: f64,
    /// Scalar `K = ħk_p²E†𝕂E`.
    pub rigidity: f64,
    /// `S̃_F(Ω)` for the same intracavity field.
    pub spectrum: f64,
}

impl PointComparison {
    pub fn max(&self, other: &PointComparison) -> PointComparison {
        PointComparison {
            force_transfer: self.force_transfer.max(other.force_transfer),
            rigidity_matrix: self.rigidity_matrix.max(other.rigidity_matrix),
            rigidity: self.rigidity.max(other.rigidity),
            spectrum: self.spectrum.max(other.spectrum),
        }
    }
}

/// Compares exact and leading-order quantities at sideband Ω for `field`.
pub fn compare_point(
    ifo: &Interferometer,
    lp: &LumpedParams,
    field: &C2Vector,
    omega: f64,
) -> Result<PointComparison> {
    use crate::radiation_pressure::{force_transfer, rigidity_matrices};
    let k_p = ifo.params().k_p;
    let f_exact = force_transfer(ifo, omega)?;
    let f_approx = approx_force_transfer(lp, omega);
    let k_exact = rigidity_matrices(ifo, omega)?.k;
    let k_approx = approx_rigidity_matrix(lp, omega);
    let scalar = |m: &C2Matrix| field.quad_form(m) * (HBAR * k_p * k_p);
    let spectrum = |m: &C2Matrix| (HBAR * k_p).powi(2) * (m.dagger() * *field).norm_sqr();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs();
    let (ke, ka) = (scalar(&k_exact), scalar(&k_approx));
    Ok(PointComparison {
        force_transfer: (f_exact * port_reference(ifo, omega)).max_rel_diff(&f_approx),
        rigidity_matrix: k_exact.max_rel_diff(&k_approx),
        rigidity: (ke - ka).norm() / ke.norm(),
        spectrum: rel(spectrum(&f_exact), spectrum(&f_approx)),
    })
}

/// Worst-case comparison over `points` sideband frequencies spread evenly
/// across `[-half_width, half_width]`.
pub fn compare_band(
    ifo: &Interferometer,
    lp: &LumpedParams,
    field: &C2Vector,
    half_width: f64,
    points: usize,
) -> Result<PointComparison> {
    let mut worst = PointComparison::default();
    for i in 0..points {
        let w = -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64;
        worst = worst.max(&compare_point(ifo, lp, field, w)?);
    }
    Ok(worst)
}

/// Exact model parameters reproducing `lp` with no power recycling.
///
/// The pump is placed `fsr_index` free spectral ranges above zero detuning.
pub fn exact_params_for(
    lp: &LumpedParams,
    tau_w: f64,
    fsr_index: u64,
) -> Result<InterferometerParams> {
    let t_s = (4.0 * lp.gamma_s * lp.tau_s).sqrt();
    let omega_p =
        (lp.theta_m + 2.0 * lp.delta_s * lp.tau_s + TAU * fsr_index as f64) / (2.0 * lp.tau_s);
    let params = InterferometerParams {
        theta_m: lp.theta_m,
        epsilon: lp.epsilon(),
        kappa: lp.kappa(),
        tau_s: lp.tau_s,
        tau_w,
        r_s: (1.0 - t_s * t_s).sqrt(),
        t_s,
        r_w: 0.0,
        t_w: 1.0,
        k_p: omega_p / crate::C_LIGHT,
    };
    params.validate()?;
    Ok(params)
}
