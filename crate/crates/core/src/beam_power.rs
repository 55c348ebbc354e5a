//! Pump conversion and saturated output power of the resonant beam.

use crate::error::{Error, Result};
use crate::params::{CouplerSpec, GainSpec, PumpSpec};

/// Power budget at one cavity operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub epsilon_1: f64,
    pub epsilon_2: f64,
    pub small_signal_gain: f64,
    pub output_beam_power_w: f64,
    pub pump_optical_power_w: f64,
    pub available_pump_power_w: f64,
    pub e2e_efficiency: f64,
    pub lasing: bool,
}

/// Power reaching the upper laser level: η_excit · P_in.
pub fn available_pump_power(pump: &PumpSpec, gain: &GainSpec) -> f64 {
    gain.excitation_efficiency * pump.input_electric_power_w
}

/// g₀ℓ = η_excit · P_in / (A · I_s).
pub fn small_signal_gain(pump: &PumpSpec, gain: &GainSpec) -> f64 {
    available_pump_power(pump, gain) / (gain.medium_cross_section_m2 * gain.saturation_intensity_w_per_m2)
}

/// Round-trip loss the gain has to overcome: |ln √(R V_s² ε₁ ε₂)|.
pub fn threshold_gain(coupler: &CouplerSpec, gain: &GainSpec, eps1: f64, eps2: f64) -> f64 {
    let r = coupler.output_reflectivity;
    let v = gain.medium_transmittance;
    (0.5 * (r * v * v * eps1 * eps2).ln()).abs()
}

/// Steady-state output beam power and whether the cavity lases.
///
/// ```text
/// P_out = A_b I_s · (1 − R) ε₁ / [1 − R ε₁ε₂ + √(R ε₁ε₂) (1/(ε₁ε₂ V_s) − V_s)]
///                 · [g₀ℓ − |ln √(R V_s² ε₁ε₂)|]
/// ```
///
/// Below threshold the bracket is not positive and the result is `(0, false)`.
pub fn output_beam_power(
    gain: &GainSpec,
    coupler: &CouplerSpec,
    pump: &PumpSpec,
    eps1: f64,
    eps2: f64,
) -> Result<(f64, bool)> {
    gain.validate().map_err(to_parameter)?;
    coupler.validate().map_err(to_parameter)?;
    for (name, eps) in [("epsilon_1", eps1), ("epsilon_2", eps2)] {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Parameter(format!("{name} = {eps} outside (0, 1]")));
        }
    }
    let excess = small_signal_gain(pump, gain) - threshold_gain(coupler, gain, eps1, eps2);
    if !(excess > 0.0) {
        return Ok((0.0, false));
    }
    let r = coupler.output_reflectivity;
    let v = gain.medium_transmittance;
    let e12 = eps1 * eps2;
    let coupling = (1.0 - r) * eps1 / (1.0 - r * e12 + (r * e12).sqrt() * (1.0 / (e12 * v) - v));
    let p_out = gain.beam_cross_section_m2 * gain.saturation_intensity_w_per_m2 * coupling * excess;
    Ok((p_out, true))
}

/// Optical pump power P_gb = η_eo · P_in.
pub fn pump_optical_power(pump: &PumpSpec) -> f64 {
    pump.electro_optical_efficiency * pump.input_electric_power_w
}

/// End-to-end efficiency P_out / P_gb.
pub fn e2e_efficiency(p_out_w: f64, p_gb_w: f64) -> Result<f64> {
    if !(p_gb_w > 0.0) {
        return Err(Error::Numeric(format!("pump optical power is {p_gb_w}")));
    }
    Ok(p_out_w / p_gb_w)
}

/// Evaluates the whole power budget for one pair of transmission coefficients.
pub fn power_point(
    gain: &GainSpec,
    coupler: &CouplerSpec,
    pump: &PumpSpec,
    eps1: f64,
    eps2: f64,
) -> Result<PowerPoint> {
    let (p_out, lasing) = output_beam_power(gain, coupler, pump, eps1, eps2)?;
    let p_gb = pump_optical_power(pump);
    Ok(PowerPoint {
        epsilon_1: eps1,
        epsilon_2: eps2,
        small_signal_gain: small_signal_gain(pump, gain),
        output_beam_power_w: p_out,
        pump_optical_power_w: p_gb,
        available_pump_power_w: available_pump_power(pump, gain),
        e2e_efficiency: e2e_efficiency(p_out, p_gb)?,
        lasing,
    })
}

fn to_parameter(err: Error) -> Error {
    match err {
        Error::Validation { .. } => Error::Parameter(err.to_string()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::disk_area_m2;
    use proptest::prelude::*;

    fn gain() -> GainSpec {
        let area = disk_area_m2(5e-3);
        GainSpec {
            saturation_intensity_w_per_m2: 1.26e7,
            medium_transmittance: 0.99,
            excitation_efficiency: 0.5148,
            medium_cross_section_m2: area,
            beam_cross_section_m2: area,
        }
    }

    fn pump(p_in: f64) -> PumpSpec {
        PumpSpec {
            input_electric_power_w: p_in,
            electro_optical_efficiency: 0.715,
        }
    }

    const COUPLER: CouplerSpec = CouplerSpec {
        output_reflectivity: 0.95,
    };

    #[test]
    fn available_power() {
        assert!((available_pump_power(&pump(200.0), &gain()) - 102.96).abs() < 1e-12);
        let lossless = GainSpec { excitation_efficiency: 1.0, ..gain() };
        assert_eq!(available_pump_power(&pump(200.0), &lossless), 200.0);
        assert_eq!(available_pump_power(&pump(0.0), &gain()), 0.0);
    }

    #[test]
    fn small_signal_gain_reference() {
        // 102.96 W / (0.785398 cm² · 1260 W/cm²), evaluated by hand.
        assert!((small_signal_gain(&pump(200.0), &gain()) - 0.104_041_86).abs() < 1e-8);
        let doubled = GainSpec {
            medium_cross_section_m2: 2.0 * gain().medium_cross_section_m2,
            ..gain()
        };
        let ratio = small_signal_gain(&pump(200.0), &gain()) / small_signal_gain(&pump(200.0), &doubled);
        assert!((ratio - 2.0).abs() < 1e-14);
        assert_eq!(small_signal_gain(&pump(0.0), &gain()), 0.0);
    }

    #[test]
    fn output_power_reference_point() {
        // Term by term: coupling 0.642347, bracket 0.066243, A_b I_s 989.60 W.
        let (p, lasing) = output_beam_power(&gain(), &COUPLER, &pump(200.0), 0.9979, 0.9979).unwrap();
        assert!(lasing);
        assert!((p - 42.108_335).abs() < 1e-5, "{p}");
    }

    #[test]
    fn threshold_boundary_does_not_lase() {
        let g = gain();
        let eps = 0.99;
        let loss = threshold_gain(&COUPLER, &g, eps, eps);
        // Pump that puts g₀ℓ exactly on the loss line.
        let p_in = loss * g.medium_cross_section_m2 * g.saturation_intensity_w_per_m2 / g.excitation_efficiency;
        let (p, lasing) = output_beam_power(&g, &COUPLER, &pump(p_in), eps, eps).unwrap();
        assert!(p.abs() < 1e-9);
        if lasing {
            assert!(small_signal_gain(&pump(p_in), &g) > loss);
        }
        let (p, lasing) = output_beam_power(&g, &COUPLER, &pump(p_in * 0.999), eps, eps).unwrap();
        assert_eq!((p, lasing), (0.0, false));
        let (p, lasing) = output_beam_power(&g, &COUPLER, &pump(p_in * 1.001), eps, eps).unwrap();
        assert!(lasing && p > 0.0);
    }

    #[test]
    fn lossless_cavity_limit() {
        // With V_s = ε = 1 the coupling factor is exactly one.
        let g = GainSpec { medium_transmittance: 1.0, ..gain() };
        for r in [0.9, 0.95, 0.99] {
            let coupler = CouplerSpec { output_reflectivity: r };
            let (p, lasing) = output_beam_power(&g, &coupler, &pump(200.0), 1.0, 1.0).unwrap();
            let expected = g.beam_cross_section_m2 * g.saturation_intensity_w_per_m2
                * (small_signal_gain(&pump(200.0), &g) + 0.5 * r.ln());
            assert!(lasing);
            assert!((p - expected).abs() < 1e-9 * expected);
        }
        let (p, lasing) = output_beam_power(&g, &COUPLER, &pump(0.0), 1.0, 1.0).unwrap();
        assert_eq!((p, lasing), (0.0, false));
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = pump(200.0);
        assert!(matches!(output_beam_power(&gain(), &COUPLER, &p, 0.0, 0.9), Err(Error::Parameter(_))));
        assert!(matches!(output_beam_power(&gain(), &COUPLER, &p, 0.9, 1.1), Err(Error::Parameter(_))));
        let bad = CouplerSpec { output_reflectivity: 1.0 };
        assert!(matches!(output_beam_power(&gain(), &bad, &p, 0.9, 0.9), Err(Error::Parameter(_))));
        let bad = GainSpec { medium_transmittance: 1.5, ..gain() };
        assert!(matches!(output_beam_power(&bad, &COUPLER, &p, 0.9, 0.9), Err(Error::Parameter(_))));
    }

    #[test]
    fn pump_optical_and_efficiency() {
        assert!((pump_optical_power(&pump(200.0)) - 143.0).abs() < 1e-12);
        assert_eq!(pump_optical_power(&pump(0.0)), 0.0);
        let ideal = PumpSpec { electro_optical_efficiency: 1.0, ..pump(37.0) };
        assert_eq!(pump_optical_power(&ideal), 37.0);

        assert!((e2e_efficiency(66.94, 143.0).unwrap() - 0.4681).abs() < 1e-4);
        assert_eq!(e2e_efficiency(0.0, 143.0).unwrap(), 0.0);
        assert_eq!(e2e_efficiency(143.0, 143.0).unwrap(), 1.0);
        assert!(matches!(e2e_efficiency(1.0, 0.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn swapping_epsilons_only_moves_the_numerator() {
        let (a, _) = output_beam_power(&gain(), &COUPLER, &pump(200.0), 0.999, 0.99).unwrap();
        let (b, _) = output_beam_power(&gain(), &COUPLER, &pump(200.0), 0.99, 0.999).unwrap();
        // Everything except the ε₁ numerator depends on ε₁ε₂ only.
        assert!((a / b - 0.999 / 0.99).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn lasing_iff_gain_exceeds_loss(p_in in 1.0f64..400.0, eps1 in 0.5f64..=1.0, eps2 in 0.5f64..=1.0) {
            let g = gain();
            let (p, lasing) = output_beam_power(&g, &COUPLER, &pump(p_in), eps1, eps2).unwrap();
            let above = small_signal_gain(&pump(p_in), &g) > threshold_gain(&COUPLER, &g, eps1, eps2);
            prop_assert_eq!(lasing, above);
            prop_assert_eq!(lasing, p > 0.0);
            prop_assert!(p >= 0.0);
        }

        #[test]
        fn increasing_in_gain_decreasing_in_loss(p_in in 150.0f64..400.0, eps in 0.97f64..0.999) {
            let g = gain();
            let at = |p_in: f64, eps: f64| output_beam_power(&g, &COUPLER, &pump(p_in), eps, eps).unwrap().0;
            let base = at(p_in, eps);
            prop_assume!(base > 0.0);
            prop_assert!(at(p_in * 1.01, eps) > base);
            // Lower ε means more round-trip loss.
            prop_assert!(at(p_in, eps - 0.005) < base);
        }

        #[test]
        fn continuous_through_threshold(eps in 0.9f64..0.999, t in 1e-9f64..1e-6) {
            let g = gain();
            let loss = threshold_gain(&COUPLER, &g, eps, eps);
            let p_in = loss * (1.0 + t) * g.medium_cross_section_m2 * g.saturation_intensity_w_per_m2 / g.excitation_efficiency;
            let (p, _) = output_beam_power(&g, &COUPLER, &pump(p_in), eps, eps).unwrap();
            prop_assert!(p < 1e-3);
        }
    }
}
