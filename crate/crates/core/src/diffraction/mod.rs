//! Scalar diffraction between the two retro-reflecting surfaces.
//!
//! Each surface is a flat, perfectly reflecting disk in an opaque plane. A
//! transit is a Fresnel propagation over the cavity length followed by the
//! far surface's circular aperture. Iterating transits from a flat start
//! converges on the lowest-loss self-reproducing mode (Fox-Li).

mod fft2;
mod field;
mod fox_li;
mod intensity;
mod propagate;

pub use field::ComplexField;
pub use fox_li::{fox_li_solve, ModeSolution, STABLE_WINDOW};
pub use intensity::{intensity_at_plane, IntensityMap};
pub use propagate::{propagate, Propagator, PARAXIAL_RATIO};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Zeroes every sample farther than `radius_m` from the axis.
pub fn apply_aperture(field: &ComplexField, radius_m: f64) -> Result<ComplexField> {
    let mut out = field.clone();
    apply_aperture_in_place(&mut out, radius_m)?;
    Ok(out)
}

pub(crate) fn apply_aperture_in_place(field: &mut ComplexField, radius_m: f64) -> Result<()> {
    if !(radius_m > 0.0) {
        return Err(Error::Geometry(format!("aperture radius must be positive, got {radius_m}")));
    }
    field.ensure_finite()?;
    let grid = *field.grid();
    let n = grid.samples_per_side;
    let r2 = radius_m * radius_m;
    let coords: Vec<f64> = (0..n).map(|i| grid.coordinate_m(i)).collect();
    for (row, line) in field.amplitude_mut().chunks_exact_mut(n).enumerate() {
        let y2 = coords[row] * coords[row];
        for (v, x) in line.iter_mut().zip(&coords) {
            if x * x + y2 > r2 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(())
}

/// Fractional power lost between two fields on the same grid.
pub fn one_pass_loss(before: &ComplexField, after: &ComplexField) -> Result<f64> {
    if before.grid() != after.grid() {
        return Err(Error::Parameter("one_pass_loss: fields are on different grids".into()));
    }
    let p0 = before.power();
    let p1 = after.power();
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(Error::Numeric(format!("input field power is {p0}")));
    }
    if !p1.is_finite() {
        return Err(Error::Numeric(format!("output field power is {p1}")));
    }
    Ok((p0 - p1) / p0)
}
