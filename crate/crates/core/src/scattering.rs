//! Exact two-port optical solution of the dual-recycled Michelson-Sagnac
//! interferometer.
//!
//! Ports are ordered `(west, south)`: the west port sits behind the power
//! recycling mirror (PRM), the south port behind the signal recycling mirror
//! (SRM). Inside the interferometer the fields are expressed in the
//! `(common, differential)` mode basis.
//!
//! Every frequency-dependent quantity is evaluated at the absolute optical
//! frequency `ω = ω_p + Ω`, where `Ω` is the sideband offset passed to the
//! methods below. Pump round-trip phases are reduced modulo 2π once, when the
//! [`Interferometer`] is built, and the sideband contribution `Ωτ` is added on
//! top; this keeps all routes through the model on an identical phase.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{cis, pauli_basis, sin_cos, solve_dense, C2Matrix, C2Vector, DenseMatrix};
use crate::{Error, Result, C_LIGHT};

/// Default relative singularity threshold for the mode determinant.
pub const DEFAULT_DET_TOL: f64 = 1e-14;

const UNIT_TOL: f64 = 1e-12;

/// Geometric and optical description of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerParams {
    /// Membrane angle θ, rad. Amplitude reflectivity `cos θ`, transmissivity `sin θ`.
    pub theta_m: f64,
    /// Beamsplitter imbalance ε, rad. Reflectivity `cos(π/4 − ε)`.
    pub epsilon: f64,
    /// Dimensionless D.C. membrane offset κ = k_p·X.
    pub kappa: f64,
    /// One-way SRM ↔ membrane path time, s.
    pub tau_s: f64,
    /// One-way PRM ↔ membrane path time, s.
    pub tau_w: f64,
    pub r_s: f64,
    pub t_s: f64,
    pub r_w: f64,
    pub t_w: f64,
    /// Pump wavenumber, 1/m.
    pub k_p: f64,
}

impl InterferometerParams {
    /// Reference configuration used throughout the test-suite: 1064 nm pump,
    /// 1 ns / 1.1 ns arms, t_S = 0.1, no power recycling, θ = 0.15π,
    /// ε = 0.02, κ = 0.01.
    pub fn reference() -> Self {
        let t_s: f64 = 0.1;
        InterferometerParams {
            theta_m: 0.15 * std::f64::consts::PI,
            epsilon: 0.02,
            kappa: 0.01,
            tau_s: 1.0e-9,
            tau_w: 1.1e-9,
            r_s: (1.0 - t_s * t_s).sqrt(),
            t_s,
            r_w: 0.0,
            t_w: 1.0,
            k_p: TAU / 1064e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("theta_m", self.theta_m),
            ("epsilon", self.epsilon),
            ("kappa", self.kappa),
            ("tau_s", self.tau_s),
            ("tau_w", self.tau_w),
            ("r_s", self.r_s),
            ("t_s", self.t_s),
            ("r_w", self.r_w),
            ("t_w", self.t_w),
            ("k_p", self.k_p),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("not finite ({value})")));
            }
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.theta_m) {
            return Err(Error::invalid("theta_m", "must lie in [0, π/2]"));
        }
        if self.epsilon.abs() >= FRAC_PI_4 {
            return Err(Error::invalid("epsilon", "|epsilon| must be below π/4"));
        }
        for (name, value) in [("tau_s", self.tau_s), ("tau_w", self.tau_w), ("k_p", self.k_p)] {
            if value <= 0.0 {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if (self.r_s * self.r_s + self.t_s * self.t_s - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid("r_s", "r_s² + t_s² must equal 1"));
        }
        if (self.r_w * self.r_w + self.t_w * self.t_w - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid("r_w", "r_w² + t_w² must equal 1"));
        }
        Ok(())
    }

    /// Membrane amplitude reflectivity R_m.
    pub fn r_m(&self) -> f64 {
        libm::cos(self.theta_m)
    }

    /// Membrane amplitude transmissivity T_m.
    pub fn t_m(&self) -> f64 {
        libm::sin(self.theta_m)
    }

    pub fn omega_p(&self) -> f64 {
        C_LIGHT * self.k_p
    }

    /// Single-pass pump phase `ω_p τ_W` reduced to `[0, 2π)`.
    pub fn pump_phase_west(&self) -> f64 {
        (self.omega_p() * self.tau_w).rem_euclid(TAU)
    }

    /// Single-pass pump phase `ω_p τ_S` reduced to `[0, 2π)`.
    pub fn pump_phase_south(&self) -> f64 {
        (self.omega_p() * self.tau_s).rem_euclid(TAU)
    }
}

/// Amplitudes at the west (PRM) and south (SRM) ports, √(photons/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PortVector {
    pub west: Complex64,
    pub south: Complex64,
}

impl PortVector {
    pub fn new(west: Complex64, south: Complex64) -> Self {
        PortVector { west, south }
    }

    pub fn as_vector(&self) -> C2Vector {
        C2Vector::new(self.west, self.south)
    }

    pub fn from_vector(v: C2Vector) -> Self {
        PortVector::new(v[0], v[1])
    }
}

/// Classical common/differential intracavity amplitudes (E₊, E₋), √(photons/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntracavityField {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
}

impl IntracavityField {
    pub fn new(e_plus: Complex64, e_minus: Complex64) -> Self {
        IntracavityField { e_plus, e_minus }
    }

    pub fn as_vector(&self) -> C2Vector {
        C2Vector::new(self.e_plus, self.e_minus)
    }

    pub fn from_vector(v: C2Vector) -> Self {
        IntracavityField::new(v[0], v[1])
    }

    /// `|E₊|² + |E₋|²`.
    pub fn energy(&self) -> f64 {
        self.e_plus.norm_sqr() + self.e_minus.norm_sqr()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        IntracavityField::new(self.e_plus * s, self.e_minus * s)
    }
}

/// Frequency-independent and single-frequency constituent matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedMatrices {
    /// Single-pass propagation `diag(e^{iωτ_W}, e^{iωτ_S})`.
    pub a: C2Matrix,
    /// Membrane phase `diag(e^{iθ}, e^{−iθ})`.
    pub m: C2Matrix,
    /// `diag(r_W, r_S)`.
    pub r: C2Matrix,
    /// `diag(t_W, t_S)`.
    pub t: C2Matrix,
    /// Round-trip reflectivity `A R A`.
    pub r_tilde: C2Matrix,
    /// `A T`.
    pub t_tilde: C2Matrix,
    /// `r_tilde` with its diagonal swapped.
    pub r_breve: C2Matrix,
}

/// Mode dynamics matrix `D_e`, its closed-form inverse and determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDynamics {
    pub d_e: C2Matrix,
    pub d_e_inv: C2Matrix,
    pub det: Complex64,
}

/// All transfer matrices of the interferometer at one sideband frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandResponse {
    /// Absolute optical frequency ω = ω_p + Ω, rad/s.
    pub omega: f64,
    /// Sideband offset Ω, rad/s.
    pub sideband: f64,
    pub r_ifo: C2Matrix,
    pub g: C2Matrix,
    pub f: C2Matrix,
    pub k_mat: C2Matrix,
    pub det: Complex64,
}

/// Internal sideband fields produced by [`Interferometer::oracle_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleFields {
    /// Output port fields.
    pub b: C2Vector,
    /// Fields arriving at the recycling mirrors from inside.
    pub c: C2Vector,
    /// Fields leaving the recycling mirrors towards the beamsplitter.
    pub d: C2Vector,
    /// Mode fields incident on the membrane.
    pub e: C2Vector,
    /// Mode fields leaving the membrane.
    pub f: C2Vector,
}

/// Validated parameters plus the cached pump phases and singularity threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferometer {
    params: InterferometerParams,
    det_tol: f64,
    phase_w: f64,
    phase_s: f64,
    mixer: C2Matrix,
}

impl Interferometer {
    pub fn new(params: InterferometerParams) -> Result<Self> {
        params.validate()?;
        Ok(Interferometer {
            params,
            det_tol: DEFAULT_DET_TOL,
            phase_w: params.pump_phase_west(),
            phase_s: params.pump_phase_south(),
            mixer: mode_mixer(&params),
        })
    }

    /// Overrides the relative threshold used to flag `|D| ≈ 0`.
    pub fn with_det_tol(mut self, det_tol: f64) -> Self {
        self.det_tol = det_tol;
        self
    }

    pub fn params(&self) -> &InterferometerParams {
        &self.params
    }

    pub fn det_tol(&self) -> f64 {
        self.det_tol
    }

    pub fn omega_p(&self) -> f64 {
        self.params.omega_p()
    }

    /// Beamsplitter/offset mixing matrix ℚ.
    pub fn mode_mixer(&self) -> C2Matrix {
        self.mixer
    }

    /// Single-pass phases `(ωτ_W, ωτ_S)` at ω = ω_p + Ω.
    pub fn single_pass_phases(&self, sideband: f64) -> (f64, f64) {
        (
            self.phase_w + sideband * self.params.tau_w,
            self.phase_s + sideband * self.params.tau_s,
        )
    }

    pub fn fixed_matrices(&self, sideband: f64) -> FixedMatrices {
        let p = &self.params;
        let (phi_w, phi_s) = self.single_pass_phases(sideband);
        let prop_w = cis(phi_w);
        let prop_s = cis(phi_s);
        let a = C2Matrix::diag(prop_w, prop_s);
        let m = C2Matrix::diag(cis(p.theta_m), cis(-p.theta_m));
        let r = C2Matrix::real([[p.r_w, 0.0], [0.0, p.r_s]]);
        let t = C2Matrix::real([[p.t_w, 0.0], [0.0, p.t_s]]);
        let rt_w = cis(2.0 * phi_w) * p.r_w;
        let rt_s = cis(2.0 * phi_s) * p.r_s;
        FixedMatrices {
            a,
            m,
            r,
            t,
            r_tilde: C2Matrix::diag(rt_w, rt_s),
            t_tilde: C2Matrix::diag(prop_w * p.t_w, prop_s * p.t_s),
            r_breve: C2Matrix::diag(rt_s, rt_w),
        }
    }

    /// `D_e = ℚ† − R̃ ℚᵀ 𝕄`, its determinant `D` and `D_e⁻¹ = (ℚ − 𝕄†ℚ*R̆)/D`.
    pub fn mode_dynamics(&self, sideband: f64) -> Result<ModeDynamics> {
        let fm = self.fixed_matrices(sideband);
        let q = self.mixer;
        let d_e = q.dagger() - fm.r_tilde * q.transpose() * fm.m;
        let det = d_e.det();
        let scale = d_e.frobenius_norm().powi(2);
        if !(det.norm() > self.det_tol * scale) {
            return Err(Error::OpticalSingularity {
                omega: self.omega_p() + sideband,
                det: det.norm(),
            });
        }
        let adj = q - fm.m.dagger() * q.conj() * fm.r_breve;
        Ok(ModeDynamics {
            d_e,
            d_e_inv: adj.scale(det.inv()),
            det,
        })
    }

    /// Output scattering matrix `ℝ_ifo = −ℝ + T̃[ℚᵀ𝕄ℚ − R̆]T̃ / D`.
    pub fn scattering_matrix(&self, sideband: f64) -> Result<C2Matrix> {
        let dyn_ = self.mode_dynamics(sideband)?;
        let fm = self.fixed_matrices(sideband);
        let q = self.mixer;
        let inner = q.transpose() * fm.m * q - fm.r_breve;
        Ok(-fm.r + (fm.t_tilde * inner * fm.t_tilde).scale(dyn_.det.inv()))
    }

    /// Displacement transfer `𝔾 = (2R_m/D*) T̃† [ℚ†𝕄† − R̆†ℚᵀ] 𝕏`.
    pub fn displacement_transfer(&self, sideband: f64) -> Result<C2Matrix> {
        let dyn_ = self.mode_dynamics(sideband)?;
        let fm = self.fixed_matrices(sideband);
        let q = self.mixer;
        let (_, _, x, _) = pauli_basis();
        let inner = q.dagger() * fm.m.dagger() - fm.r_breve.dagger() * q.transpose();
        let prefactor = Complex64::from(2.0 * self.params.r_m()) / dyn_.det.conj();
        Ok((fm.t_tilde.dagger() * inner * x).scale(prefactor))
    }

    /// Classical intracavity amplitudes `E = D_e⁻¹(ω_p) T̃(ω_p) A` for pump `A`.
    pub fn classical_fields(&self, pump: &PortVector) -> Result<IntracavityField> {
        let dyn_ = self.mode_dynamics(0.0)?;
        let fm = self.fixed_matrices(0.0);
        Ok(IntracavityField::from_vector(
            dyn_.d_e_inv * (fm.t_tilde * pump.as_vector()),
        ))
    }

    /// Solves the five coupled sideband equations
    ///
    /// ```text
    /// b = −ℝ a + 𝕋 c
    /// c = 𝔸 ℚᵀ f
    /// d = 𝕋 a + ℝ c
    /// e = ℚ 𝔸 d
    /// f = 𝕄 e + 2i k_p R_m 𝕏 E x
    /// ```
    ///
    /// as one dense 10×10 system, without using any of the closed forms.
    pub fn oracle_solve(
        &self,
        sideband: f64,
        inputs: &PortVector,
        displacement: f64,
        field: &IntracavityField,
    ) -> Result<OracleFields> {
        const B: usize = 0;
        const C: usize = 2;
        const D: usize = 4;
        const E: usize = 6;
        const F: usize = 8;

        let fm = self.fixed_matrices(sideband);
        let q = self.mixer;
        let (id, _, x, _) = pauli_basis();
        let a = inputs.as_vector();

        let mut sys = DenseMatrix::zeros(10);
        let mut rhs = vec![Complex64::new(0.0, 0.0); 10];
        let mut set_rhs = |row: usize, v: C2Vector| {
            rhs[row] = v[0];
            rhs[row + 1] = v[1];
        };

        sys.add_block(B, B, &id);
        sys.add_block(B, C, &-fm.t);
        set_rhs(B, -fm.r * a);

        sys.add_block(C, C, &id);
        sys.add_block(C, F, &-(fm.a * q.transpose()));

        sys.add_block(D, D, &id);
        sys.add_block(D, C, &-fm.r);
        set_rhs(D, fm.t * a);

        sys.add_block(E, E, &id);
        sys.add_block(E, D, &-(q * fm.a));

        sys.add_block(F, F, &id);
        sys.add_block(F, E, &-fm.m);
        let drive = Complex64::new(0.0, 2.0 * self.params.k_p * self.params.r_m() * displacement);
        set_rhs(F, (x * field.as_vector()).scale(drive));

        let sol = solve_dense(&sys, &rhs)?;
        let v = |i: usize| C2Vector::new(sol[i], sol[i + 1]);
        Ok(OracleFields {
            b: v(B),
            c: v(C),
            d: v(D),
            e: v(E),
            f: v(F),
        })
    }
}

/// ℚ = [[C, −S*], [S, C*]] with C = cos ε cos κ + i sin ε sin κ,
/// S = sin ε cos κ + i cos ε sin κ.
pub fn mode_mixer(params: &InterferometerParams) -> C2Matrix {
    let (se, ce) = sin_cos(params.epsilon);
    let (sk, ck) = sin_cos(params.kappa);
    let c = Complex64::new(ce * ck, se * sk);
    let s = Complex64::new(se * ck, ce * sk);
    C2Matrix::new([[c, -s.conj()], [s, c.conj()]])
}
