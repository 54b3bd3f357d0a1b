//! Frozen values for the reference configuration (1064 nm, τ_S = 1 ns,
//! τ_W = 1.1 ns, t_S = 0.1, r_W = 0, θ = 0.15π, ε = 0.02, κ = 0.01,
//! A_W = 1e8 √(photons/s), A_S = 0), produced once by an independent
//! implementation and kept here unchanged.

mod common;

use std::f64::consts::TAU;

use common::*;
use msi_core::lumped_mode::{from_exact, DEFAULT_VALIDITY_THRESHOLD};
use msi_core::radiation_pressure::{force_spectral_density, rigidity};
use msi_core::scattering::{Interferometer, InterferometerParams, PortVector};
use msi_core::C_LIGHT;

const TOL: f64 = 1e-12;

fn reference() -> Interferometer {
    Interferometer::new(InterferometerParams::reference()).unwrap()
}

fn pump() -> PortVector {
    PortVector::new(c(1e8, 0.0), c(0.0, 0.0))
}

#[test]
fn pump_frequency() {
    let p = InterferometerParams::reference();
    assert_eq!(p.k_p, 5905249.348852994);
    assert_eq!(p.omega_p(), 1770349217395538.5);
    assert_eq!(p.omega_p(), C_LIGHT * p.k_p);
}

#[test]
fn lumped_parameters() {
    let m = from_exact(&InterferometerParams::reference(), DEFAULT_VALIDITY_THRESHOLD);
    let lp = m.params;
    assert!(rel(lp.gamma_s, 2500000.0000000005) <= TOL);
    assert!(rel(lp.delta_s, -1310374830.616638) <= 1e-9);
    assert!(rel(lp.p, 0.022360679774997897) <= TOL);
    assert!(rel(lp.alpha, 0.4636476090008061) <= TOL);
    assert!(rel(lp.gamma_m(), 28.813281139545833) <= TOL);
    assert!(rel(lp.delta_m(), -196204.5013022525) <= TOL);
}

#[test]
fn mode_determinant_at_pump() {
    let d = reference().mode_dynamics(0.0).unwrap().det;
    assert!(crel(d, c(1.8632461925236803, 0.4947786270212016)) <= 1e-10);
}

#[test]
fn intracavity_field() {
    let e = reference().classical_fields(&pump()).unwrap();
    assert!(crel(e.e_plus, c(37894832.49234839, -92514887.89594539)) <= 1e-10);
    assert!(crel(e.e_minus, c(1690742.7281192031, -1455645.3846162788)) <= 1e-10);
}

#[test]
fn spectra_and_rigidity_at_100_khz() {
    let ifo = reference();
    let e = ifo.classical_fields(&pump()).unwrap();
    let w = TAU * 1e5;
    assert!(rel(force_spectral_density(&ifo, &e, w).unwrap(), 5.759013015269835e-41) <= 1e-9);
    assert!(rel(force_spectral_density(&ifo, &e, -w).unwrap(), 5.756825786634009e-41) <= 1e-9);
    let k = rigidity(&ifo, &e, w).unwrap().k;
    assert!(rel(k.re, -9.047454318587005e-05) <= 1e-9);
    assert!(rel(k.im, -1.0370221358474733e-10) <= 1e-6);
}

#[test]
fn scattering_at_100_khz() {
    // phases taken as (ω_pτ mod 2π) + Ωτ
    let r = reference().scattering_matrix(TAU * 1e5).unwrap();
    let expected = [
        [c(-3.1518545226709055e-01, -9.4903009981206632e-01), c(-1.0637974042233728e-05, 1.4721505452613793e-05)],
        [c(-1.0637974042233919e-05, 1.4721505452613653e-05), c(-9.9999910016559479e-01, -1.3413940925765101e-03)],
    ];
    for i in 0..2 {
        for j in 0..2 {
            assert!((r[(i, j)] - expected[i][j]).norm() <= 1e-10, "R_ifo[{i}{j}]");
        }
    }
}

#[test]
fn reference_dark_port_leakage_is_of_order_asymmetry() {
    // far from resonance the differential field is only O(p) of the common one
    let e = reference().classical_fields(&pump()).unwrap();
    let ratio = e.e_minus.norm() / e.e_plus.norm();
    assert!((ratio - 0.0223).abs() < 2e-4);
}
