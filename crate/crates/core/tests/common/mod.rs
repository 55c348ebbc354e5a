#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rbswipt_core::diffraction::ComplexField;
use rbswipt_core::params::GridSpec;

/// Direct O(N⁴) evaluation of the discrete Fresnel sum
/// u₂(p) = Σ_q u₁(q) · i/(λL) · exp(-ik[L + |x_p - x_q|²/(2L)]) · Δx².
pub fn direct_fresnel(input: &ComplexField, distance_m: f64, wavelength_m: f64) -> Vec<Complex64> {
    let grid = *input.grid();
    let n = grid.samples_per_side;
    let dx = grid.spacing_m();
    let k = 2.0 * PI / wavelength_m;
    let span = 2 * n - 1;
    let prefactor = Complex64::new(0.0, dx * dx / (wavelength_m * distance_m)) * Complex64::from_polar(1.0, -k * distance_m);
    let mut table = vec![Complex64::new(0.0, 0.0); span * span];
    for a in 0..span {
        let ry = (a as f64 - (n - 1) as f64) * dx;
        for b in 0..span {
            let rx = (b as f64 - (n - 1) as f64) * dx;
            table[a * span + b] = prefactor * Complex64::from_polar(1.0, -k * (rx * rx + ry * ry) / (2.0 * distance_m));
        }
    }

    let src = input.amplitude();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for qr in 0..n {
        for qc in 0..n {
            let u = src[qr * n + qc];
            if u == Complex64::new(0.0, 0.0) {
                continue;
            }
            for pr in 0..n {
                let row = &table[(pr + n - 1 - qr) * span + (n - 1 - qc)..][..n];
                let dst = &mut out[pr * n..(pr + 1) * n];
                for (o, h) in dst.iter_mut().zip(row) {
                    *o += u * h;
                }
            }
        }
    }
    out
}

/// max |a - b| / |b| over all samples.
pub fn max_relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm() / y.norm()).fold(0.0, f64::max)
}

/// Deterministic pseudo-random complex field with full support.
pub fn random_field(grid: GridSpec, seed: u64) -> ComplexField {
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        // splitmix64
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    };
    ComplexField::from_fn(grid, |_, _| Complex64::new(next() - 0.5, next() - 0.5))
}
