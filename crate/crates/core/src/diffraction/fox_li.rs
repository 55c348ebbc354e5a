use num_complex::Complex64;

use super::{apply_aperture_in_place, one_pass_loss, ComplexField, Propagator};
use crate::error::{Error, Result};
use crate::params::{CavityGeometry, FoxLiSettings, GridSpec};

/// Number of consecutive loss differences that must fall under tolerance.
pub const STABLE_WINDOW: usize = 5;

/// Converged (or iteration-capped) cavity mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    /// Latest unit-power field on the input surface S1.
    pub field_s1: ComplexField,
    /// Latest unit-power field on the output surface S2.
    pub field_s2: ComplexField,
    /// Loss of the final transit.
    pub one_pass_loss: f64,
    pub iterations_run: usize,
    /// Fraction of the final field's power outside the shape it had on the
    /// same surface one round trip earlier (NaN after fewer than 3 transits).
    pub reproduction_error: f64,
    /// One entry per transit; even indices are S1→S2, odd indices S2→S1.
    pub loss_history: Vec<f64>,
    pub converged: bool,
}

impl ModeSolution {
    /// Latest S1→S2 loss.
    pub fn forward_loss(&self) -> f64 {
        self.loss_history
            .iter()
            .step_by(2)
            .last()
            .copied()
            .unwrap_or(self.one_pass_loss)
    }

    /// Latest S2→S1 loss, falling back to the forward loss after a single transit.
    pub fn backward_loss(&self) -> f64 {
        self.loss_history
            .iter()
            .skip(1)
            .step_by(2)
            .last()
            .copied()
            .unwrap_or_else(|| self.forward_loss())
    }
}

/// Iterates transits S1 → S2 → S1 → ... from a flat field filling S1.
///
/// After each transit the field is rescaled to unit power; the transit's
/// attenuation is recorded in `loss_history`. Iteration stops once
/// [`STABLE_WINDOW`] successive loss differences are all below
/// `settings.tolerance` (and, if `require_field_reproduction` is set, the
/// field shape repeats to the same tolerance), or at
/// `settings.max_iterations`, in which case the solution is returned with
/// `converged == false`.
pub fn fox_li_solve(geom: &CavityGeometry, grid: &GridSpec, settings: &FoxLiSettings) -> Result<ModeSolution> {
    geom.validate()?;
    grid.validate_for(geom)?;
    settings.validate()?;

    let propagator = Propagator::new(*grid, geom.cavity_length_m, geom.wavelength_m)?;

    let mut current = ComplexField::uniform(*grid, Complex64::new(1.0, 0.0));
    apply_aperture_in_place(&mut current, geom.reflector_radius_in_m)?;
    current.normalize_power()?;

    let mut field_s1 = current.clone();
    let mut field_s2: Option<ComplexField> = None;
    let mut history = Vec::with_capacity(settings.max_iterations);
    let mut converged = false;
    let mut reproduction_error = f64::NAN;

    for transit in 0..settings.max_iterations {
        let toward_s2 = transit % 2 == 0;
        let radius = if toward_s2 {
            geom.reflector_radius_out_m
        } else {
            geom.reflector_radius_in_m
        };
        let mut next = propagator.apply(&current)?;
        apply_aperture_in_place(&mut next, radius)?;
        let loss = one_pass_loss(&current, &next)?;
        history.push(loss);
        next.normalize_power().map_err(|_| {
            Error::Numeric(format!("field fully blocked after transit {}", transit + 1))
        })?;
        // The field one round trip earlier on the surface just reached.
        let previous = if toward_s2 {
            field_s2.as_ref()
        } else {
            (transit >= 1).then_some(&field_s1)
        };
        reproduction_error = previous.map_or(f64::NAN, |p| shape_mismatch(p, &next));
        if toward_s2 {
            field_s2 = Some(next.clone());
        } else {
            field_s1 = next.clone();
        }
        current = next;

        let reproduced = !settings.require_field_reproduction || reproduction_error < settings.tolerance;
        if is_stable(&history, settings.tolerance) && reproduced {
            converged = true;
            break;
        }
    }

    let one_pass_loss = *history.last().expect("max_iterations >= 1");
    if one_pass_loss < 0.0 {
        return Err(Error::Numeric(format!(
            "negative one-pass loss {one_pass_loss}: the grid under-resolves the Fresnel kernel \
             (Fresnel number {:.3}); use more samples or a smaller window",
            geom.fresnel_number()
        )));
    }
    Ok(ModeSolution {
        field_s1,
        field_s2: field_s2.expect("at least one transit reaches S2"),
        one_pass_loss,
        iterations_run: history.len(),
        reproduction_error,
        loss_history: history,
        converged,
    })
}

/// 1 − |⟨a, b⟩|² / (‖a‖² ‖b‖²): insensitive to a global phase or scale.
fn shape_mismatch(a: &ComplexField, b: &ComplexField) -> f64 {
    let (mut cross, mut na, mut nb) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    for (x, y) in a.amplitude().iter().zip(b.amplitude()) {
        cross += x * y.conj();
        na += x.norm_sqr();
        nb += y.norm_sqr();
    }
    (1.0 - cross.norm_sqr() / (na * nb)).max(0.0)
}

fn is_stable(history: &[f64], tolerance: f64) -> bool {
    history.len() > STABLE_WINDOW
        && history[history.len() - STABLE_WINDOW - 1..]
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() < tolerance)
}
