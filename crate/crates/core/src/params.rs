//! Physical parameter records in SI units.
//!
//! Every record has public fields and a `validate` method that checks the
//! documented bounds. Operations that take a record validate it on entry.

use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};

/// Paraxial-validity floor: cavity length over the larger reflector radius.
pub const MIN_LENGTH_TO_RADIUS: f64 = 20.0;

/// Two flat, aligned retro-reflecting disks facing each other across `cavity_length_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub cavity_length_m: f64,
    /// Radius of the transmitter-side surface S1.
    pub reflector_radius_in_m: f64,
    /// Radius of the receiver-side surface S2.
    pub reflector_radius_out_m: f64,
    pub wavelength_m: f64,
}

impl CavityGeometry {
    pub fn symmetric(cavity_length_m: f64, radius_m: f64, wavelength_m: f64) -> Self {
        CavityGeometry {
            cavity_length_m,
            reflector_radius_in_m: radius_m,
            reflector_radius_out_m: radius_m,
            wavelength_m,
        }
    }

    pub fn max_radius_m(&self) -> f64 {
        self.reflector_radius_in_m.max(self.reflector_radius_out_m)
    }

    pub fn is_symmetric(&self) -> bool {
        self.reflector_radius_in_m == self.reflector_radius_out_m
    }

    /// a² / (λ L) for the input surface.
    pub fn fresnel_number(&self) -> f64 {
        self.reflector_radius_in_m.powi(2) / (self.wavelength_m * self.cavity_length_m)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.cavity_length_m > 0.0, "cavity_length_m", self.cavity_length_m, "> 0")?;
        ensure(
            self.reflector_radius_in_m > 0.0,
            "reflector_radius_in_m",
            self.reflector_radius_in_m,
            "> 0",
        )?;
        ensure(
            self.reflector_radius_out_m > 0.0,
            "reflector_radius_out_m",
            self.reflector_radius_out_m,
            "> 0",
        )?;
        ensure(self.wavelength_m > 0.0, "wavelength_m", self.wavelength_m, "> 0")?;
        if self.cavity_length_m < MIN_LENGTH_TO_RADIUS * self.max_radius_m() {
            return Err(Error::Geometry(format!(
                "cavity length {} m is below {} x reflector radius {} m",
                self.cavity_length_m,
                MIN_LENGTH_TO_RADIUS,
                self.max_radius_m()
            )));
        }
        Ok(())
    }
}

/// Square sampling grid centred on the optical axis.
///
/// Sample `i` along either axis sits at `(i - N/2) * dx`, so index `N/2` is
/// exactly on axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub samples_per_side: usize,
    pub window_half_width_m: f64,
}

impl GridSpec {
    pub const MIN_SAMPLES: usize = 64;

    /// Grid whose half-width is `window_factor` times the larger reflector radius.
    pub fn for_geometry(geom: &CavityGeometry, samples_per_side: usize, window_factor: f64) -> Self {
        GridSpec {
            samples_per_side,
            window_half_width_m: window_factor * geom.max_radius_m(),
        }
    }

    pub fn spacing_m(&self) -> f64 {
        2.0 * self.window_half_width_m / self.samples_per_side as f64
    }

    pub fn cell_area_m2(&self) -> f64 {
        self.spacing_m().powi(2)
    }

    pub fn coordinate_m(&self, index: usize) -> f64 {
        (index as f64 - (self.samples_per_side / 2) as f64) * self.spacing_m()
    }

    pub fn center_index(&self) -> usize {
        self.samples_per_side / 2
    }

    pub fn len(&self) -> usize {
        self.samples_per_side * self.samples_per_side
    }

    pub fn is_empty(&self) -> bool {
        self.samples_per_side == 0
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.samples_per_side;
        if n < Self::MIN_SAMPLES || !n.is_power_of_two() {
            return Err(Error::Validation {
                field: "samples_per_side",
                value: n as f64,
                bound: "a power of two >= 64",
            });
        }
        ensure(
            self.window_half_width_m > 0.0,
            "window_half_width_m",
            self.window_half_width_m,
            "> 0",
        )
    }

    /// Also checks the guard band against the reflectors of `geom`.
    pub fn validate_for(&self, geom: &CavityGeometry) -> Result<()> {
        self.validate()?;
        ensure(
            self.window_half_width_m >= 2.0 * geom.max_radius_m(),
            "window_half_width_m",
            self.window_half_width_m,
            ">= 2 x max reflector radius",
        )
    }
}

/// Fox-Li iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoxLiSettings {
    pub max_iterations: usize,
    /// Absolute tolerance on successive one-pass losses, and on the
    /// fraction of power outside the previous same-surface field shape.
    pub tolerance: f64,
    /// Also demand that the field shape reproduces before declaring
    /// convergence. Without it a slow beat between two low-loss modes can
    /// pass the loss test at one of its turning points.
    pub require_field_reproduction: bool,
}

impl Default for FoxLiSettings {
    fn default() -> Self {
        FoxLiSettings {
            max_iterations: 300,
            tolerance: 1e-5,
            require_field_reproduction: true,
        }
    }
}

impl FoxLiSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Validation {
                field: "max_iterations",
                value: 0.0,
                bound: ">= 1",
            });
        }
        ensure(self.tolerance > 0.0, "tolerance", self.tolerance, "> 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSpec {
    pub saturation_intensity_w_per_m2: f64,
    /// Single-pass transmittance of the gain medium.
    pub medium_transmittance: f64,
    pub excitation_efficiency: f64,
    /// Cross-section of the gain medium, used for the small-signal gain.
    pub medium_cross_section_m2: f64,
    /// Cross-section of the beam, used as the output power scale.
    pub beam_cross_section_m2: f64,
}

impl GainSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.saturation_intensity_w_per_m2 > 0.0,
            "saturation_intensity_w_per_m2",
            self.saturation_intensity_w_per_m2,
            "> 0",
        )?;
        ensure(
            self.medium_transmittance > 0.0 && self.medium_transmittance <= 1.0,
            "medium_transmittance",
            self.medium_transmittance,
            "0 < V_s <= 1",
        )?;
        ensure(
            self.excitation_efficiency > 0.0 && self.excitation_efficiency <= 1.0,
            "excitation_efficiency",
            self.excitation_efficiency,
            "0 < eta_excit <= 1",
        )?;
        ensure(
            self.medium_cross_section_m2 > 0.0,
            "medium_cross_section_m2",
            self.medium_cross_section_m2,
            "> 0",
        )?;
        ensure(
            self.beam_cross_section_m2 > 0.0,
            "beam_cross_section_m2",
            self.beam_cross_section_m2,
            "> 0",
        )
    }
}

/// Disk area for a radius, used for the default gain-medium cross-section.
pub fn disk_area_m2(radius_m: f64) -> f64 {
    PI * radius_m * radius_m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerSpec {
    pub output_reflectivity: f64,
}

impl CouplerSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.output_reflectivity > 0.0 && self.output_reflectivity < 1.0,
            "output_reflectivity",
            self.output_reflectivity,
            "0 < R < 1",
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub input_electric_power_w: f64,
    pub electro_optical_efficiency: f64,
}

impl PumpSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.input_electric_power_w > 0.0,
            "input_electric_power_w",
            self.input_electric_power_w,
            "> 0",
        )?;
        ensure(
            self.electro_optical_efficiency > 0.0 && self.electro_optical_efficiency <= 1.0,
            "electro_optical_efficiency",
            self.electro_optical_efficiency,
            "0 < eta_eo <= 1",
        )
    }
}

/// Single-diode photovoltaic panel driving a resistive load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvSpec {
    pub dark_saturation_current_a: f64,
    pub diode_quality_factor: f64,
    pub cells_in_series: u32,
    pub series_resistance_ohm: f64,
    pub shunt_resistance_ohm: f64,
    pub load_resistance_ohm: f64,
    pub conversion_responsivity_a_per_w: f64,
    pub temperature_k: f64,
    pub electron_charge_c: f64,
    pub boltzmann_j_per_k: f64,
}

impl PvSpec {
    /// Junction thermal voltage F K T / q.
    pub fn thermal_voltage_v(&self) -> f64 {
        self.diode_quality_factor * self.boltzmann_j_per_k * self.temperature_k
            / self.electron_charge_c
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dark_saturation_current_a", self.dark_saturation_current_a),
            ("series_resistance_ohm", self.series_resistance_ohm),
            ("shunt_resistance_ohm", self.shunt_resistance_ohm),
            ("load_resistance_ohm", self.load_resistance_ohm),
            ("conversion_responsivity_a_per_w", self.conversion_responsivity_a_per_w),
            ("temperature_k", self.temperature_k),
            ("electron_charge_c", self.electron_charge_c),
            ("boltzmann_j_per_k", self.boltzmann_j_per_k),
        ];
        for (field, value) in positive {
            ensure(value > 0.0, field, value, "> 0")?;
        }
        ensure(
            self.diode_quality_factor >= 1.0,
            "diode_quality_factor",
            self.diode_quality_factor,
            ">= 1",
        )?;
        ensure(
            self.cells_in_series > 0,
            "cells_in_series",
            self.cells_in_series as f64,
            ">= 1",
        )
    }
}

/// Avalanche photodiode receiver with shot and thermal noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApdSpec {
    pub conversion_efficiency_a_per_w: f64,
    pub noise_bandwidth_hz: f64,
    pub background_current_a: f64,
    pub load_resistance_ohm: f64,
    pub temperature_k: f64,
    pub electron_charge_c: f64,
    pub boltzmann_j_per_k: f64,
}

impl ApdSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.conversion_efficiency_a_per_w > 0.0 && self.conversion_efficiency_a_per_w <= 1.0,
            "conversion_efficiency_a_per_w",
            self.conversion_efficiency_a_per_w,
            "0 < eta_bi <= 1",
        )?;
        let positive = [
            ("noise_bandwidth_hz", self.noise_bandwidth_hz),
            ("background_current_a", self.background_current_a),
            ("load_resistance_ohm", self.load_resistance_ohm),
            ("temperature_k", self.temperature_k),
            ("electron_charge_c", self.electron_charge_c),
            ("boltzmann_j_per_k", self.boltzmann_j_per_k),
        ];
        for (field, value) in positive {
            ensure(value > 0.0, field, value, "> 0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Fraction of the output beam routed to the PV panel.
    pub power_splitting_ratio: f64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        validate_gamma(self.power_splitting_ratio)
    }
}

pub(crate) fn validate_gamma(gamma: f64) -> Result<()> {
    ensure(
        (0.0..=1.0).contains(&gamma),
        "power_splitting_ratio",
        gamma,
        "0 <= gamma <= 1",
    )
}
