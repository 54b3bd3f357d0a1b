#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use msi_core::scattering::InterferometerParams;
use msi_core::{Complex64, HBAR};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_params<R: Rng>(rng: &mut R, power_recycling: bool) -> InterferometerParams {
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

/// Gauss-Jordan elimination with full row pivoting, kept separate from the
/// library solver.
pub fn gauss_jordan(mut a: Vec<Vec<Complex64>>, mut y: Vec<Complex64>) -> Vec<Complex64> {
    let n = y.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, pivot);
        y.swap(col, pivot);
        let inv = a[col][col].inv();
        for k in 0..n {
            a[col][k] *= inv;
        }
        y[col] *= inv;
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != c(0.0, 0.0) {
                    for k in 0..n {
                        let v = a[col][k];
                        a[row][k] -= f * v;
                    }
                    let v = y[col];
                    y[row] -= f * v;
                }
            }
        }
    }
    y
}

/// Sideband fields in the arm basis, straight from the per-mirror equations.
#[derive(Debug, Clone, Copy)]
pub struct ArmFields {
    /// Output (west, south).
    pub b: [Complex64; 2],
    /// Fields incident on the membrane (north, east).
    pub e: [Complex64; 2],
    /// Fields leaving the membrane (north, east).
    pub f: [Complex64; 2],
}

/// Solves the per-mirror relations at absolute frequency `omega`:
/// recycling mirrors, the beamsplitter with arm offsets ±κ, and the membrane
/// with reflectivity R_m, transmissivity iT_m and the displacement drive.
/// `single_pass` supplies `(e^{iωτ_W}, e^{iωτ_S})` so callers control phase
/// reduction; the arm-basis classical field is `(e_north, e_east)`.
pub fn arm_solve(
    p: &InterferometerParams,
    single_pass: (Complex64, Complex64),
    a: [Complex64; 2],
    x: f64,
    classical: [Complex64; 2],
) -> ArmFields {
    const BP: usize = 0;
    const BM: usize = 1;
    const CP: usize = 2;
    const CM: usize = 3;
    const DP: usize = 4;
    const DM: usize = 5;
    const EN: usize = 6;
    const EE: usize = 7;
    const FN: usize = 8;
    const FE: usize = 9;
    let (aw, as_) = single_pass;
    let r = (FRAC_PI_4 - p.epsilon).cos();
    let t = (FRAC_PI_4 - p.epsilon).sin();
    let (r_m, t_m) = (p.theta_m.cos(), p.theta_m.sin());
    let kp = Complex64::cis(p.kappa);
    let km = Complex64::cis(-p.kappa);
    let one = c(1.0, 0.0);
    let mut m = vec![vec![c(0.0, 0.0); 10]; 10];
    let mut y = vec![c(0.0, 0.0); 10];

    m[BP][BP] = one;
    m[BP][CP] = c(-p.t_w, 0.0);
    y[BP] = -a[0] * p.r_w;
    m[BM][BM] = one;
    m[BM][CM] = c(-p.t_s, 0.0);
    y[BM] = -a[1] * p.r_s;

    m[CP][CP] = one;
    m[CP][FN] = -kp * aw * r;
    m[CP][FE] = -km * aw * t;
    m[CM][CM] = one;
    m[CM][FN] = -kp * as_ * t;
    m[CM][FE] = km * as_ * r;

    m[DP][DP] = one;
    m[DP][CP] = c(-p.r_w, 0.0);
    y[DP] = a[0] * p.t_w;
    m[DM][DM] = one;
    m[DM][CM] = c(-p.r_s, 0.0);
    y[DM] = a[1] * p.t_s;

    m[EN][EN] = one;
    m[EN][DP] = -kp * aw * r;
    m[EN][DM] = -kp * as_ * t;
    m[EE][EE] = one;
    m[EE][DP] = -km * aw * t;
    m[EE][DM] = km * as_ * r;

    m[FN][FN] = one;
    m[FN][EN] = c(-r_m, 0.0);
    m[FN][EE] = c(0.0, -t_m);
    y[FN] = c(0.0, 2.0 * p.k_p * r_m * x) * classical[0];
    m[FE][FE] = one;
    m[FE][EE] = c(-r_m, 0.0);
    m[FE][EN] = c(0.0, -t_m);
    y[FE] = c(0.0, -2.0 * p.k_p * r_m * x) * classical[1];

    let s = gauss_jordan(m, y);
    ArmFields {
        b: [s[BP], s[BM]],
        e: [s[EN], s[EE]],
        f: [s[FN], s[FE]],
    }
}

/// `(e^{iωτ_W}, e^{iωτ_S})` at ω = ω_p + Ω with the pump phase reduced once.
pub fn propagation(p: &InterferometerParams, sideband: f64) -> (Complex64, Complex64) {
    (
        Complex64::cis(p.pump_phase_west() + sideband * p.tau_w),
        Complex64::cis(p.pump_phase_south() + sideband * p.tau_s),
    )
}

pub fn to_modes(arm: [Complex64; 2]) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [(arm[0] + arm[1]) * h, (arm[0] - arm[1]) * h]
}

pub fn to_arms(modes: [Complex64; 2]) -> [Complex64; 2] {
    to_modes(modes)
}

/// Positive-frequency part of the membrane force at ω_p + Ω:
/// `ħk_p[E_N* e_N + F_N* f_N − E_E* e_E − F_E* f_E]`.
pub fn arm_force(
    p: &InterferometerParams,
    sideband: f64,
    a: [Complex64; 2],
    x: f64,
    classical_arm: [Complex64; 2],
) -> Complex64 {
    let (r_m, t_m) = (p.theta_m.cos(), p.theta_m.sin());
    let [en, ee] = classical_arm;
    let fn_ = en * r_m + ee * c(0.0, t_m);
    let fe = ee * r_m + en * c(0.0, t_m);
    let s = arm_solve(p, propagation(p, sideband), a, x, classical_arm);
    (en.conj() * s.e[0] + fn_.conj() * s.f[0] - ee.conj() * s.e[1] - fe.conj() * s.f[1])
        * (HBAR * p.k_p)
}

/// Classical arm-basis field for pump `a` (port basis).
pub fn arm_classical(p: &InterferometerParams, a: [Complex64; 2]) -> [Complex64; 2] {
    arm_solve(p, propagation(p, 0.0), a, 0.0, [c(0.0, 0.0); 2]).e
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

pub fn crel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}
