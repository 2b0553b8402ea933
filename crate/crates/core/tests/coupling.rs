use std::time::Instant;

use pairgen::consts::{omega_from_wavelength, VACUUM_PERMITTIVITY};
use pairgen::coupling::*;
use pairgen::modes::*;

fn modes_at(d: f64, pump_orientation: Orientation) -> (GuidedMode<f64>, GuidedMode<f64>) {
    let f = FiberSpec::silica_in_air(d).unwrap();
    let s = mode_fields(&f, ModeId::HE11, omega_from_wavelength(1.596e-6), Orientation::Even).unwrap();
    let p = mode_fields(&f, ModeId::HE12, omega_from_wavelength(0.532e-6), pump_orientation).unwrap();
    (s, p)
}

#[test]
fn design_geometry_area_is_a_few_square_microns() {
    let (s, p) = modes_at(0.7904e-6, Orientation::Even);
    let t = Instant::now();
    let a = effective_area([&s, &s, &s, &p], &Chi3Model::silica(), &AreaOptions::default()).unwrap();
    eprintln!("A = {} um^2 at {} cells in {:?}", a.value * 1e12, a.cells, t.elapsed());
    assert!((a.value * 1e12 / 4.9 - 1.0).abs() < 0.1);
}

#[test]
fn area_converges_under_grid_doubling() {
    let (s, p) = modes_at(0.7904e-6, Orientation::Even);
    let chi = Chi3Model::silica();
    let a = effective_area([&s, &s, &s, &p], &chi, &AreaOptions::default()).unwrap();
    let finer = effective_area_fixed([&s, &s, &s, &p], &chi, a.half_width, a.cells * 2).unwrap();
    assert!((a.value / finer.value - 1.0).abs() < 0.01);
}

#[test]
fn cross_polarized_pump_orientation_does_not_couple() {
    let (s, p) = modes_at(0.7904e-6, Orientation::Odd);
    let inv = inverse_area_on_grid([&s, &s, &s, &p], &Chi3Model::silica(), 1e-6, 512).unwrap();
    assert!(inv.norm() * 1e-12 < 1e-9);
}

#[test]
fn self_overlap_matches_scalar_oracle() {
    let (s, _) = modes_at(0.7904e-6, Orientation::Even);
    let chi = Chi3Model::silica();
    let half = 0.5e-6;
    let cells = 256;
    let inv = inverse_area_on_grid([&s, &s, &s, &s], &chi, half, cells).unwrap();
    // scalar form: (n̄⁴/(ε₀² n⁸)) ∫_core (d·d)* |d|² dA for isotropic χ
    let h = 2.0 * half / cells as f64;
    let n = s.solution().core_index;
    let a = s.radius();
    let mut sum = 0.0;
    for i in 0..cells {
        for j in 0..cells {
            let (x, y) = (-half + h * (i as f64 + 0.5), -half + h * (j as f64 + 0.5));
            if x.hypot(y) >= a {
                continue;
            }
            let d = s.d_field(x, y);
            let (dx, dy, dz) = (d[0].re, d[1].re, d[2].im);
            let dd = dx * dx + dy * dy - dz * dz;
            let mag = dx * dx + dy * dy + dz * dz;
            sum += dd * mag;
        }
    }
    let oracle = sum * h * h * 1.45f64.powi(4) / (VACUUM_PERMITTIVITY.powi(2) * n.powi(8));
    assert!((inv.re / oracle - 1.0).abs() < 1e-10, "{} vs {}", inv.re, oracle);
    assert!(inv.im.abs() < 1e-10 * oracle);
}

#[test]
fn fundamental_arguments_are_exchangeable() {
    let f = FiberSpec::silica_in_air(0.7904e-6).unwrap();
    let m1 = mode_fields(&f, ModeId::HE11, omega_from_wavelength(1.55e-6), Orientation::Even).unwrap();
    let m2 = mode_fields(&f, ModeId::HE11, omega_from_wavelength(1.64e-6), Orientation::Even).unwrap();
    let m3 = mode_fields(&f, ModeId::HE11, omega_from_wavelength(1.596e-6), Orientation::Even).unwrap();
    let (_, p) = modes_at(0.7904e-6, Orientation::Even);
    let chi = Chi3Model::silica();
    let base = inverse_area_on_grid([&m1, &m2, &m3, &p], &chi, 1e-6, 256).unwrap();
    for perm in [[&m2, &m1, &m3], [&m3, &m2, &m1], [&m1, &m3, &m2]] {
        let v = inverse_area_on_grid([perm[0], perm[1], perm[2], &p], &chi, 1e-6, 256).unwrap();
        assert!((v - base).norm() < 1e-10 * base.norm());
    }
}
