//! TOML run configuration.
//!
//! The file stores each quantity in the unit named by its key suffix
//! (`_mm`, `_cm2`, `_w_per_cm2`, `_kohm`, ...). [`Config`] keeps those file
//! values verbatim so that writing a loaded config back out is lossless; the
//! accessor methods convert to the SI records in [`crate::params`].
//!
//! Every key is optional and falls back to the reference design below.
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    disk_area_m2, ApdSpec, CavityGeometry, CouplerSpec, FoxLiSettings, GainSpec, GridSpec,
    PumpSpec, PvSpec, SplitSpec,
};

/// Environment variable the CLI consults for a config path.
pub const CONFIG_ENV_VAR: &str = "RBSWIPT_CONFIG";

const MM: f64 = 1e-3;
const NM: f64 = 1e-9;
const CM2: f64 = 1e-4;
const W_PER_CM2: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub cavity: CavitySection,
    pub grid: GridSection,
    pub fox_li: FoxLiSection,
    pub gain: GainSection,
    pub coupler: CouplerSection,
    pub pump: PumpSection,
    pub pv: PvSection,
    pub apd: ApdSection,
    pub split: SplitSection,
    pub constants: ConstantsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavitySection {
    pub length_m: f64,
    pub reflector_radius_in_mm: f64,
    pub reflector_radius_out_mm: f64,
    pub wavelength_nm: f64,
}

impl Default for CavitySection {
    fn default() -> Self {
        CavitySection {
            length_m: 1.0,
            reflector_radius_in_mm: 5.0,
            reflector_radius_out_mm: 5.0,
            wavelength_nm: 1064.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub samples_per_side: usize,
    /// Window half-width as a multiple of the larger reflector radius.
    pub window_factor: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            samples_per_side: 256,
            window_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoxLiSection {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub require_field_reproduction: bool,
}

impl Default for FoxLiSection {
    fn default() -> Self {
        let d = FoxLiSettings::default();
        FoxLiSection {
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            require_field_reproduction: d.require_field_reproduction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainSection {
    pub saturation_intensity_w_per_cm2: f64,
    pub medium_transmittance: f64,
    pub excitation_efficiency: f64,
    /// Defaults to the input reflector's disk area.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medium_cross_section_cm2: Option<f64>,
    /// Defaults to the gain-medium cross-section.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam_cross_section_cm2: Option<f64>,
}

impl Default for GainSection {
    fn default() -> Self {
        GainSection {
            saturation_intensity_w_per_cm2: 1260.0,
            medium_transmittance: 0.99,
            excitation_efficiency: 0.5148,
            medium_cross_section_cm2: None,
            beam_cross_section_cm2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplerSection {
    pub output_reflectivity: f64,
}

impl Default for CouplerSection {
    fn default() -> Self {
        CouplerSection {
            output_reflectivity: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpSection {
    pub input_electric_power_w: f64,
    pub electro_optical_efficiency: f64,
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            input_electric_power_w: 200.0,
            electro_optical_efficiency: 0.715,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvSection {
    pub dark_saturation_current_a: f64,
    pub diode_quality_factor: f64,
    pub cells_in_series: u32,
    pub series_resistance_ohm: f64,
    pub shunt_resistance_kohm: f64,
    pub load_resistance_ohm: f64,
    pub conversion_responsivity_a_per_w: f64,
    pub temperature_k: f64,
}

impl Default for PvSection {
    fn default() -> Self {
        PvSection {
            dark_saturation_current_a: 9.89e-9,
            diode_quality_factor: 1.105,
            cells_in_series: 40,
            series_resistance_ohm: 0.93,
            shunt_resistance_kohm: 52.6,
            load_resistance_ohm: 100.0,
            conversion_responsivity_a_per_w: 0.0161,
            temperature_k: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApdSection {
    pub conversion_efficiency_a_per_w: f64,
    pub noise_bandwidth_mhz: f64,
    pub background_current_ua: f64,
    pub load_resistance_kohm: f64,
    pub temperature_k: f64,
}

impl Default for ApdSection {
    fn default() -> Self {
        ApdSection {
            conversion_efficiency_a_per_w: 0.6,
            noise_bandwidth_mhz: 811.7,
            background_current_ua: 5100.0,
            load_resistance_kohm: 10.0,
            temperature_k: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub power_splitting_ratio: f64,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            power_splitting_ratio: 0.3,
        }
    }
}

/// Rounded constants, shared by the PV and APD models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsSection {
    pub electron_charge_c: f64,
    pub boltzmann_j_per_k: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        ConstantsSection {
            electron_charge_c: 1.6e-19,
            boltzmann_j_per_k: 1.38e-23,
        }
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Config::from_toml_str(&text)
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let de = toml::Deserializer::new(text);
        let config: Config = serde_path_to_error::deserialize(de).map_err(|err| {
            let mut key = err.path().to_string();
            let message = err.inner().message().to_string();
            if let Some(field) = unknown_field_name(&message) {
                if key == "." {
                    key = field;
                } else if !key.ends_with(&field) {
                    key = format!("{key}.{field}");
                }
            }
            Error::Config { key, message }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config contains only plain numbers")
    }

    /// Checks every derived record. Errors name the config key at fault.
    pub fn validate(&self) -> Result<()> {
        let geom = self.geometry();
        rename(geom.validate(), |field| match field {
            "cavity_length_m" => "cavity.length_m",
            "reflector_radius_in_m" => "cavity.reflector_radius_in_mm",
            "reflector_radius_out_m" => "cavity.reflector_radius_out_mm",
            "wavelength_m" => "cavity.wavelength_nm",
            other => other,
        })?;
        rename(self.grid_for(&geom).validate_for(&geom), |field| match field {
            "samples_per_side" => "grid.samples_per_side",
            "window_half_width_m" => "grid.window_factor",
            other => other,
        })?;
        rename(self.fox_li().validate(), |field| match field {
            "max_iterations" => "fox_li.max_iterations",
            "tolerance" => "fox_li.tolerance",
            other => other,
        })?;
        rename(self.gain_for(&geom).validate(), |field| match field {
            "saturation_intensity_w_per_m2" => "gain.saturation_intensity_w_per_cm2",
            "medium_transmittance" => "gain.medium_transmittance",
            "excitation_efficiency" => "gain.excitation_efficiency",
            "medium_cross_section_m2" => "gain.medium_cross_section_cm2",
            "beam_cross_section_m2" => "gain.beam_cross_section_cm2",
            other => other,
        })?;
        rename(self.coupler().validate(), |_| "coupler.output_reflectivity")?;
        rename(self.pump().validate(), |field| match field {
            "input_electric_power_w" => "pump.input_electric_power_w",
            "electro_optical_efficiency" => "pump.electro_optical_efficiency",
            other => other,
        })?;
        rename(self.pv().validate(), |field| match field {
            "shunt_resistance_ohm" => "pv.shunt_resistance_kohm",
            "electron_charge_c" => "constants.electron_charge_c",
            "boltzmann_j_per_k" => "constants.boltzmann_j_per_k",
            "dark_saturation_current_a" => "pv.dark_saturation_current_a",
            "diode_quality_factor" => "pv.diode_quality_factor",
            "cells_in_series" => "pv.cells_in_series",
            "series_resistance_ohm" => "pv.series_resistance_ohm",
            "load_resistance_ohm" => "pv.load_resistance_ohm",
            "conversion_responsivity_a_per_w" => "pv.conversion_responsivity_a_per_w",
            "temperature_k" => "pv.temperature_k",
            other => other,
        })?;
        rename(self.apd().validate(), |field| match field {
            "conversion_efficiency_a_per_w" => "apd.conversion_efficiency_a_per_w",
            "noise_bandwidth_hz" => "apd.noise_bandwidth_mhz",
            "background_current_a" => "apd.background_current_ua",
            "load_resistance_ohm" => "apd.load_resistance_kohm",
            "temperature_k" => "apd.temperature_k",
            "electron_charge_c" => "constants.electron_charge_c",
            "boltzmann_j_per_k" => "constants.boltzmann_j_per_k",
            other => other,
        })?;
        rename(self.split().validate(), |_| "split.power_splitting_ratio")
    }

    pub fn geometry(&self) -> CavityGeometry {
        CavityGeometry {
            cavity_length_m: self.cavity.length_m,
            reflector_radius_in_m: self.cavity.reflector_radius_in_mm * MM,
            reflector_radius_out_m: self.cavity.reflector_radius_out_mm * MM,
            wavelength_m: self.cavity.wavelength_nm * NM,
        }
    }

    /// Symmetric cavity of the given length and radius at the configured wavelength.
    pub fn geometry_at(&self, cavity_length_m: f64, radius_m: f64) -> CavityGeometry {
        CavityGeometry::symmetric(cavity_length_m, radius_m, self.cavity.wavelength_nm * NM)
    }

    pub fn grid_for(&self, geom: &CavityGeometry) -> GridSpec {
        GridSpec::for_geometry(geom, self.grid.samples_per_side, self.grid.window_factor)
    }

    pub fn fox_li(&self) -> FoxLiSettings {
        FoxLiSettings {
            max_iterations: self.fox_li.max_iterations,
            tolerance: self.fox_li.tolerance,
            require_field_reproduction: self.fox_li.require_field_reproduction,
        }
    }

    /// Gain parameters for a cavity. Without explicit cross-sections the
    /// medium fills the input reflector and the beam fills the medium.
    pub fn gain_for(&self, geom: &CavityGeometry) -> GainSpec {
        let medium = self
            .gain
            .medium_cross_section_cm2
            .map(|a| a * CM2)
            .unwrap_or_else(|| disk_area_m2(geom.reflector_radius_in_m));
        let beam = self.gain.beam_cross_section_cm2.map(|a| a * CM2).unwrap_or(medium);
        GainSpec {
            saturation_intensity_w_per_m2: self.gain.saturation_intensity_w_per_cm2 * W_PER_CM2,
            medium_transmittance: self.gain.medium_transmittance,
            excitation_efficiency: self.gain.excitation_efficiency,
            medium_cross_section_m2: medium,
            beam_cross_section_m2: beam,
        }
    }

    pub fn coupler(&self) -> CouplerSpec {
        CouplerSpec {
            output_reflectivity: self.coupler.output_reflectivity,
        }
    }

    pub fn pump(&self) -> PumpSpec {
        PumpSpec {
            input_electric_power_w: self.pump.input_electric_power_w,
            electro_optical_efficiency: self.pump.electro_optical_efficiency,
        }
    }

    pub fn pv(&self) -> PvSpec {
        PvSpec {
            dark_saturation_current_a: self.pv.dark_saturation_current_a,
            diode_quality_factor: self.pv.diode_quality_factor,
            cells_in_series: self.pv.cells_in_series,
            series_resistance_ohm: self.pv.series_resistance_ohm,
            shunt_resistance_ohm: self.pv.shunt_resistance_kohm * 1e3,
            load_resistance_ohm: self.pv.load_resistance_ohm,
            conversion_responsivity_a_per_w: self.pv.conversion_responsivity_a_per_w,
            temperature_k: self.pv.temperature_k,
            electron_charge_c: self.constants.electron_charge_c,
            boltzmann_j_per_k: self.constants.boltzmann_j_per_k,
        }
    }

    pub fn apd(&self) -> ApdSpec {
        ApdSpec {
            conversion_efficiency_a_per_w: self.apd.conversion_efficiency_a_per_w,
            noise_bandwidth_hz: self.apd.noise_bandwidth_mhz * 1e6,
            background_current_a: self.apd.background_current_ua * 1e-6,
            load_resistance_ohm: self.apd.load_resistance_kohm * 1e3,
            temperature_k: self.apd.temperature_k,
            electron_charge_c: self.constants.electron_charge_c,
            boltzmann_j_per_k: self.constants.boltzmann_j_per_k,
        }
    }

    pub fn split(&self) -> SplitSpec {
        SplitSpec {
            power_splitting_ratio: self.split.power_splitting_ratio,
        }
    }
}

fn rename(result: Result<()>, key: impl Fn(&'static str) -> &'static str) -> Result<()> {
    result.map_err(|err| match err {
        Error::Validation {
            field,
            value,
            bound,
        } => Error::Validation {
            field: key(field),
            value,
            bound,
        },
        other => other,
    })
}

fn unknown_field_name(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest.split('`').next()?.to_string())
}

/// Commented config with every key at its default, as written by `init-config`.
pub const DEFAULT_CONFIG_TEMPLATE: &str = r#"# Resonant-beam SWIPT simulator configuration.
# Every key is optional; omitted keys take the values shown here.
# Units are given by the key suffix and converted to SI on load.

[cavity]
length_m = 1.0                  # transmitter-receiver distance L
reflector_radius_in_mm = 5.0    # input retro-reflector radius (S1)
reflector_radius_out_mm = 5.0   # output retro-reflector radius (S2)
wavelength_nm = 1064.0          # Nd:YVO4 emission line

[grid]
samples_per_side = 256          # N, power of two >= 64
window_factor = 2.0             # window half-width / larger reflector radius, >= 2

[fox_li]
max_iterations = 300
tolerance = 1e-5                # absolute, on successive one-pass losses
# Converge only once the field shape also repeats (power outside the previous
# same-surface shape < tolerance). false: loss-difference test alone.
require_field_reproduction = true

[gain]
saturation_intensity_w_per_cm2 = 1260.0
medium_transmittance = 0.99     # V_s, per pass
excitation_efficiency = 0.5148
# medium_cross_section_cm2 = 0.7853981633974483   # default: input reflector disk area
# beam_cross_section_cm2 = 0.7853981633974483     # default: medium cross-section

[coupler]
output_reflectivity = 0.95

[pump]
input_electric_power_w = 200.0
electro_optical_efficiency = 0.715

[pv]
dark_saturation_current_a = 9.89e-9
diode_quality_factor = 1.105
cells_in_series = 40
series_resistance_ohm = 0.93
shunt_resistance_kohm = 52.6
load_resistance_ohm = 100.0
conversion_responsivity_a_per_w = 0.0161
temperature_k = 300.0

[apd]
conversion_efficiency_a_per_w = 0.6
noise_bandwidth_mhz = 811.7
background_current_ua = 5100.0
load_resistance_kohm = 10.0
temperature_k = 300.0

[split]
power_splitting_ratio = 0.3     # fraction of the output beam sent to the PV panel

[constants]
electron_charge_c = 1.6e-19
boltzmann_j_per_k = 1.38e-23
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_file_gives_reference_design() {
        let c = Config::from_toml_str("").unwrap();
        assert_eq!(c, Config::default());
        let geom = c.geometry();
        let gain = c.gain_for(&geom);
        assert_eq!(gain.saturation_intensity_w_per_m2, 1.26e7);
        assert_eq!(gain.medium_transmittance, 0.99);
        assert_eq!(c.coupler().output_reflectivity, 0.95);
        assert_eq!(gain.excitation_efficiency, 0.5148);
        assert_eq!(c.pump().input_electric_power_w, 200.0);
        assert_eq!(c.fox_li().max_iterations, 300);
        assert_eq!(geom.wavelength_m, 1064e-9);
        assert_eq!(gain.beam_cross_section_m2, gain.medium_cross_section_m2);
        assert!((gain.medium_cross_section_m2 - 0.7853981633974483e-4).abs() < 1e-18);
    }

    #[test]
    fn defaults_match_reference_tables_in_si() {
        let c = Config::default();
        let pv = c.pv();
        assert_eq!(pv.shunt_resistance_ohm, 52_600.0);
        assert_eq!(pv.temperature_k, 300.0);
        let apd = c.apd();
        assert_eq!(apd.conversion_efficiency_a_per_w, 0.6);
        assert_eq!(apd.noise_bandwidth_hz, 811.7e6);
        assert!((apd.background_current_a - 5.1e-3).abs() < 1e-18);
        assert_eq!(apd.load_resistance_ohm, 10_000.0);
        assert_eq!(apd.electron_charge_c, 1.6e-19);
        assert_eq!(apd.boltzmann_j_per_k, 1.38e-23);
        assert_eq!(c.pump().electro_optical_efficiency, 0.715);
    }

    #[test]
    fn template_parses_to_defaults() {
        let c = Config::from_toml_str(DEFAULT_CONFIG_TEMPLATE).unwrap();
        assert_eq!(c, Config::default());
    }

    #[test]
    fn reflectivity_above_one_is_rejected() {
        let err = Config::from_toml_str("[coupler]\noutput_reflectivity = 1.2\n").unwrap_err();
        match err {
            Error::Validation { field, value, .. } => {
                assert_eq!(field, "coupler.output_reflectivity");
                assert_eq!(value, 1.2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pv_table_echoes() {
        let text = r#"
[pv]
dark_saturation_current_a = 9.89e-9
diode_quality_factor = 1.105
cells_in_series = 40
series_resistance_ohm = 0.93
shunt_resistance_kohm = 52.6
load_resistance_ohm = 100.0
conversion_responsivity_a_per_w = 0.0161
"#;
        let pv = Config::from_toml_str(text).unwrap().pv();
        assert_eq!(pv.dark_saturation_current_a, 9.89e-9);
        assert_eq!(pv.diode_quality_factor, 1.105);
        assert_eq!(pv.cells_in_series, 40);
        assert_eq!(pv.series_resistance_ohm, 0.93);
        assert_eq!(pv.shunt_resistance_ohm, 52.6e3);
        assert_eq!(pv.load_resistance_ohm, 100.0);
        assert_eq!(pv.conversion_responsivity_a_per_w, 0.0161);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = Config::from_toml_str("[gain]\nsaturation_intensty = 3.0\n").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "gain.saturation_intensty"),
            other => panic!("unexpected {other:?}"),
        }
        let err = Config::from_toml_str("[bogus]\nx = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "bogus"), "{err}");
    }

    #[test]
    fn wrong_type_names_key() {
        let err = Config::from_toml_str("[pump]\ninput_electric_power_w = \"lots\"\n").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "pump.input_electric_power_w"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cross_section_overrides() {
        let c = Config::from_toml_str("[gain]\nmedium_cross_section_cm2 = 2.0\n").unwrap();
        let g = c.gain_for(&c.geometry());
        assert_eq!(g.medium_cross_section_m2, 2e-4);
        assert_eq!(g.beam_cross_section_m2, 2e-4);
        let c = Config::from_toml_str("[gain]\nbeam_cross_section_cm2 = 0.5\n").unwrap();
        let g = c.gain_for(&c.geometry_at(2.0, 3e-3));
        assert!((g.medium_cross_section_m2 - disk_area_m2(3e-3)).abs() < 1e-20);
        assert_eq!(g.beam_cross_section_m2, 0.5e-4);
    }

    #[test]
    fn narrow_window_rejected() {
        let err = Config::from_toml_str("[grid]\nwindow_factor = 1.5\n").unwrap_err();
        assert!(matches!(err, Error::Validation { field: "grid.window_factor", .. }));
    }

    fn arb_config() -> impl Strategy<Value = Config> {
        (
            (0.2f64..10.0, 0.5f64..5.0, 0.5f64..5.0, 400.0f64..2000.0),
            (1.0f64..10.0, 1usize..1000, 1e-9f64..1e-3),
            (1.0f64..5000.0, 0.01f64..=1.0, 0.01f64..=1.0, proptest::option::of(0.01f64..10.0)),
            (0.01f64..0.99, 1.0f64..1000.0, 0.01f64..=1.0),
            (1e-12f64..1e-6, 1.0f64..2.0, 1u32..100, 0.01f64..10.0, 0.1f64..1e3),
            (0.001f64..1.0, 1.0f64..1e4, 1.0f64..1e4),
            0.0f64..=1.0,
        )
            .prop_map(|(cav, fl, gain, mid, pv, apd, gamma)| {
                let mut c = Config::default();
                c.cavity.length_m = cav.0;
                c.cavity.reflector_radius_in_mm = cav.1;
                c.cavity.reflector_radius_out_mm = cav.2;
                c.cavity.wavelength_nm = cav.3;
                c.grid.window_factor = 2.0 + fl.0;
                c.fox_li.max_iterations = fl.1;
                c.fox_li.tolerance = fl.2;
                c.fox_li.require_field_reproduction = fl.1 % 2 == 0;
                c.gain.saturation_intensity_w_per_cm2 = gain.0;
                c.gain.medium_transmittance = gain.1;
                c.gain.excitation_efficiency = gain.2;
                c.gain.beam_cross_section_cm2 = gain.3;
                c.coupler.output_reflectivity = mid.0;
                c.pump.input_electric_power_w = mid.1;
                c.pump.electro_optical_efficiency = mid.2;
                c.pv.dark_saturation_current_a = pv.0;
                c.pv.diode_quality_factor = pv.1;
                c.pv.cells_in_series = pv.2;
                c.pv.series_resistance_ohm = pv.3;
                c.pv.shunt_resistance_kohm = pv.4;
                c.apd.conversion_efficiency_a_per_w = apd.0;
                c.apd.noise_bandwidth_mhz = apd.1;
                c.apd.background_current_ua = apd.2;
                c.split.power_splitting_ratio = gamma;
                c
            })
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_bitwise_identity(c in arb_config()) {
            let text = c.to_toml_string();
            let back = Config::from_toml_str(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.cavity.length_m.to_bits(), c.cavity.length_m.to_bits());
            prop_assert_eq!(back.fox_li.tolerance.to_bits(), c.fox_li.tolerance.to_bits());
            prop_assert_eq!(
                back.pv.dark_saturation_current_a.to_bits(),
                c.pv.dark_saturation_current_a.to_bits()
            );
        }
    }
}
