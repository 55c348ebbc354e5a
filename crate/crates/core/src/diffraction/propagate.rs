//! Free-space transit between parallel planes in the Fresnel approximation.
//!
//! The output is the discrete linear convolution of the input samples with
//!
//! ```text
//! h(dx, dy) = i/(λL) · exp(-i k [L + (dx² + dy²) / (2L)]) · Δx²
//! ```
//!
//! evaluated through a zero-padded (2N × 2N) FFT so that no wrap-around occurs.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft2::Fft2;
use super::ComplexField;
use crate::error::{Error, Result};
use crate::params::GridSpec;

/// Minimum ratio of propagation distance to window half-width.
pub const PARAXIAL_RATIO: f64 = 20.0;

/// Reusable propagator for one grid, distance and wavelength. The kernel
/// spectrum is computed once, so repeated transits cost two 2-D FFTs each.
pub struct Propagator {
    grid: GridSpec,
    distance_m: f64,
    wavelength_m: f64,
    fft: Fft2,
    kernel_spectrum: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: GridSpec, distance_m: f64, wavelength_m: f64) -> Result<Self> {
        grid.validate()?;
        if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
            return Err(Error::Geometry(format!("wavelength must be positive, got {wavelength_m}")));
        }
        if !(distance_m.is_finite() && distance_m >= PARAXIAL_RATIO * grid.window_half_width_m) {
            return Err(Error::Geometry(format!(
                "distance {distance_m} m is below {PARAXIAL_RATIO} x window half-width {} m",
                grid.window_half_width_m
            )));
        }
        let n = grid.samples_per_side;
        let m = 2 * n;
        let fft = Fft2::new(m);
        let mut kernel = fresnel_kernel(&grid, distance_m, wavelength_m);
        let mut scratch = Vec::new();
        fft.forward(&mut kernel, &mut scratch, m);
        Ok(Propagator {
            grid,
            distance_m,
            wavelength_m,
            fft,
            kernel_spectrum: kernel,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    pub fn apply(&self, input: &ComplexField) -> Result<ComplexField> {
        if input.grid() != &self.grid {
            return Err(Error::Parameter("field grid differs from propagator grid".into()));
        }
        input.ensure_finite()?;
        let n = self.grid.samples_per_side;
        let m = self.fft.size();

        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        for (row, src) in input.amplitude().chunks_exact(n).enumerate() {
            buf[row * m..row * m + n].copy_from_slice(src);
        }
        let mut scratch = Vec::with_capacity(m * m);
        self.fft.forward(&mut buf, &mut scratch, n);
        for (v, k) in buf.iter_mut().zip(&self.kernel_spectrum) {
            *v *= k;
        }
        self.fft.inverse(&mut buf, &mut scratch, n);

        let norm = 1.0 / (m * m) as f64;
        let mut out = Vec::with_capacity(n * n);
        for row in buf.chunks_exact(m).take(n) {
            out.extend(row[..n].iter().map(|v| v * norm));
        }
        ComplexField::new(self.grid, out)
    }
}

/// One-shot propagation of `input` over `distance_m`.
pub fn propagate(input: &ComplexField, distance_m: f64, wavelength_m: f64) -> Result<ComplexField> {
    Propagator::new(*input.grid(), distance_m, wavelength_m)?.apply(input)
}

/// Kernel samples on the padded 2N × 2N grid, index `j` holding offset `j`
/// for `j < N` and `j - 2N` otherwise. Offset ±N is never reached.
fn fresnel_kernel(grid: &GridSpec, distance_m: f64, wavelength_m: f64) -> Vec<Complex64> {
    let n = grid.samples_per_side as i64;
    let m = 2 * n;
    let dx = grid.spacing_m();
    let prefactor = Complex64::new(0.0, dx * dx / (wavelength_m * distance_m));
    // exp(-ikL) with kL reduced modulo 2π before it loses precision.
    let cycles = distance_m / wavelength_m;
    let piston = Complex64::from_polar(1.0, -2.0 * PI * (cycles - cycles.floor()));
    let chirp = PI * dx * dx / (wavelength_m * distance_m);

    let offset = |j: i64| if j < n { j } else { j - m };
    let mut kernel = vec![Complex64::new(0.0, 0.0); (m * m) as usize];
    for r in 0..m {
        let dr = offset(r);
        for c in 0..m {
            let dc = offset(c);
            if dr.abs() == n || dc.abs() == n {
                continue;
            }
            let q = (dr * dr + dc * dc) as f64;
            kernel[(r * m + c) as usize] = prefactor * piston * Complex64::from_polar(1.0, -chirp * q);
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: GridSpec, waist: f64) -> ComplexField {
        ComplexField::from_fn(grid, |x, y| Complex64::new((-(x * x + y * y) / (waist * waist)).exp(), 0.0))
    }

    #[test]
    fn contained_gaussian_conserves_power() {
        let grid = GridSpec {
            samples_per_side: 256,
            window_half_width_m: 5e-3,
        };
        let u = gaussian(grid, 0.5e-3);
        let v = propagate(&u, 1.0, 1064e-9).unwrap();
        let rel = (v.power() / u.power() - 1.0).abs();
        assert!(rel < 1e-6, "relative power change {rel}");
    }

    #[test]
    fn point_source_spreads_as_spherical_wave() {
        let grid = GridSpec {
            samples_per_side: 64,
            window_half_width_m: 1e-3,
        };
        let (l, lambda) = (0.5, 1064e-9);
        let mut u = ComplexField::zeros(grid);
        let c = grid.center_index();
        u.amplitude_mut()[c * 64 + c] = Complex64::new(1.0, 0.0);
        let v = propagate(&u, l, lambda).unwrap();
        let dx = grid.spacing_m();
        let expected_mag = dx * dx / (lambda * l);
        let center_phase = v.at(c, c).arg();
        for row in 0..64 {
            for col in 0..64 {
                let val = v.at(row, col);
                assert!((val.norm() / expected_mag - 1.0).abs() < 1e-12);
                let x = grid.coordinate_m(col);
                let y = grid.coordinate_m(row);
                let want = -PI * (x * x + y * y) / (lambda * l);
                let got = val.arg() - center_phase;
                let diff = (got - want).rem_euclid(2.0 * PI);
                assert!(diff.min(2.0 * PI - diff) < 1e-9, "phase at ({row},{col})");
            }
        }
    }

    #[test]
    fn short_distance_is_a_geometry_error() {
        let grid = GridSpec {
            samples_per_side: 64,
            window_half_width_m: 10e-3,
        };
        let u = gaussian(grid, 1e-3);
        assert!(matches!(propagate(&u, 0.1, 1064e-9), Err(Error::Geometry(_))));
        assert!(matches!(propagate(&u, 1.0, 0.0), Err(Error::Geometry(_))));
    }

    #[test]
    fn non_finite_input_is_a_numeric_error() {
        let grid = GridSpec {
            samples_per_side: 64,
            window_half_width_m: 1e-3,
        };
        let mut u = gaussian(grid, 0.2e-3);
        u.amplitude_mut()[3] = Complex64::new(f64::INFINITY, 0.0);
        assert!(matches!(propagate(&u, 1.0, 1064e-9), Err(Error::Numeric(_))));
    }
}
