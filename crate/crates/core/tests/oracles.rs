//! Reference values. Closed forms are checked to rounding; simulator outputs
//! are frozen from a verified run.

use std::f64::consts::PI;

use hotgate::analysis::{evaluate_gate, separation_analytic, AnharmonicSettings, FlipMode, GateSettings};
use hotgate::fock::FockDim;
use hotgate::gate::conditions::{max_separation, packet_size};
use hotgate::gate::{condition_solver, pulse_train, pulses_for_eta};
use hotgate::trap::{
    equilibrium_separation, mode_frequencies, relative_mode_occupation, solve_exponent_for_ratio, ModeBasis, TrapSpec,
};

fn spec() -> TrapSpec {
    TrapSpec::calcium(1.0).unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol:e})");
}

#[test]
fn stretch_mode_is_twice_com_at_five_thirds() {
    let (nc, nr) = mode_frequencies(&spec()).unwrap();
    close(nc, 1.0, 1e-12);
    close(nr, 2.0, 1e-9);
    close(solve_exponent_for_ratio(2.0).unwrap(), 5.0 / 3.0, 1e-6);
}

#[test]
fn harmonic_trap_ratio_is_sqrt3() {
    let s = TrapSpec::with_unit_com_frequency(2.0, spec().coulomb, 1.0, 1.0).unwrap();
    let (nc, nr) = mode_frequencies(&s).unwrap();
    close(nr / nc, 3f64.sqrt(), 1e-9);
}

#[test]
fn calcium_equilibrium_spacing() {
    close(equilibrium_separation(&spec()).unwrap(), 507.287747839, 1e-6);
}

#[test]
fn separation_peak() {
    let b = ModeBasis::new(&spec(), 7.0, FockDim::new(2).unwrap(), FockDim::new(2).unwrap()).unwrap();
    let t0 = 2.0 * PI / 3.0;
    close(separation_analytic(&b, 7.0, t0), 1.5 * 3f64.sqrt() * b.x0 * 7.0, 1e-12);
    close(max_separation(b.x0, 7.0) / (b.x0 * 7.0), 2.598076211353316, 1e-12);
    close(separation_analytic(&b, 7.0, 0.0), 0.0, 1e-15);
}

#[test]
fn relative_occupation() {
    close(relative_mode_occupation(0.0), 0.0, 0.0);
    close(relative_mode_occupation(1.0), 1.0 / 3.0, 1e-15);
    close(relative_mode_occupation(3.0), 9.0 / 7.0, 1e-15);
}

#[test]
fn packet_size_at_ground_state() {
    close(packet_size(1.0, 0.0), 3f64.sqrt() / 2.0, 1e-15);
}

#[test]
fn addressing_parameters() {
    let b = ModeBasis::new(&spec(), 7.0, FockDim::new(2).unwrap(), FockDim::new(2).unwrap()).unwrap();
    let (pulse, r) = condition_solver(&b, 0.0, 3).unwrap();
    close(r.w_over_d, 12.5, 1e-12);
    close(r.pulse_area, 6.25 * PI, 1e-12);
    close(r.eta_bound, 1.0 / 3.0, 1e-12);
    close(pulse.omega0, 1030.45079419, 1e-6);
    close(pulse.center, b.x_e / 2.0 + 12.5 * r.d, 1e-9);
    assert!(r.satisfied);
}

#[test]
fn pulse_train_counts() {
    close(pulse_train(0.45, 15).unwrap(), 6.75, 1e-12);
    assert_eq!(pulses_for_eta(0.45, 7.0), 16);
}

const GRID_F: [(f64, f64, f64); 9] = [
    (2.0, 0.0, 0.948928927325),
    (2.0, 0.5, 0.914967666911),
    (4.0, 0.0, 0.986567756893),
    (4.0, 0.5, 0.976792065790),
    (7.0, 0.0, 0.995563065905),
    (7.0, 0.5, 0.992268011550),
    (2.0, 1.0, 0.882172112398),
    (4.0, 1.0, 0.966568579542),
    (7.0, 1.0, 0.988759571301),
];

#[test]
fn gaussian_gate_fidelities() {
    for &(eta, n_bar_c, f) in &GRID_F {
        let r = evaluate_gate(&spec(), &GateSettings { eta, n_bar_c, ..GateSettings::default() }).unwrap();
        close(r.fidelity, f, 1e-9);
        assert!(r.purity <= 1.0 + 1e-12 && r.purity > 0.25);
    }
}

#[test]
fn purity_and_correction_at_reference_point() {
    let settings = GateSettings {
        eta: 7.0,
        n_bar_c: 0.5,
        anharmonic: Some(AnharmonicSettings::default()),
        ..GateSettings::default()
    };
    let r = evaluate_gate(&spec(), &settings).unwrap();
    close(r.purity, 0.987238150316, 1e-9);
    close(r.f_cor.unwrap(), 0.999999400099, 1e-11);
    assert!(r.f_cor.unwrap() >= r.fidelity);
}

#[test]
fn idealized_flip_restores_motion() {
    for n_bar_c in [0.0, 1.0] {
        let s = GateSettings { eta: 4.0, n_bar_c, flip: FlipMode::Idealized, ..GateSettings::default() };
        let r = evaluate_gate(&spec(), &s).unwrap();
        close(r.fidelity, 1.0, 1e-9);
        assert!(r.restoration.unwrap() < 1e-9);
    }
}

#[test]
fn no_flip_is_identity() {
    let s = GateSettings { eta: 4.0, n_bar_c: 0.5, flip: FlipMode::Off, ..GateSettings::default() };
    close(evaluate_gate(&spec(), &s).unwrap().fidelity, 1.0, 1e-9);
}
