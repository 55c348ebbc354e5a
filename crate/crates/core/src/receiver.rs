//! Receiver: power splitter, photovoltaic harvesting and APD link metrics.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{Error, Result};
use crate::params::{validate_gamma, ApdSpec, PvSpec};

/// Residual target for the PV current solve, in amperes.
pub const PV_TOLERANCE_A: f64 = 1e-12;

/// Exponent above which the diode term is evaluated in log space.
const EXP_GUARD: f64 = 500.0;

const MAX_SOLVER_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvOperatingPoint {
    pub photo_current_a: f64,
    pub output_current_a: f64,
    pub output_voltage_v: f64,
    pub electric_power_w: f64,
    /// |current imbalance| of the diode equation at the returned current.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub signal_power: f64,
    pub noise_power: f64,
    /// ½ ln(1 + S e / (2π N)).
    pub spectral_efficiency: f64,
}

impl LinkMetrics {
    /// The same capacity expressed with a base-2 logarithm.
    pub fn spectral_efficiency_bits(&self) -> f64 {
        self.spectral_efficiency / LN_2
    }
}

/// Splits the beam: γ to the PV panel, the rest to the photodiode.
pub fn split(p_out_w: f64, gamma: f64) -> Result<(f64, f64)> {
    validate_gamma(gamma)?;
    if !(p_out_w >= 0.0) {
        return Err(Error::Parameter(format!("beam power {p_out_w} W is negative")));
    }
    let p_pv = gamma * p_out_w;
    // The photodiode takes the remainder so the two branches sum back to p_out.
    Ok((p_pv, p_out_w - p_pv))
}

/// I_ph = ψ · P_pv.
pub fn photo_current(p_pv_w: f64, pv: &PvSpec) -> f64 {
    pv.conversion_responsivity_a_per_w * p_pv_w
}

/// Current balance of the single-diode model with `v = i · R_L` substituted:
///
/// f(i) = I_ph − I_o [exp(i (R_L + R_s) / (n_s V_t)) − 1] − i (R_L + R_s) / R_sh − i
///
/// Returns `(f, f')`. `f` falls monotonically from `I_ph` at `i = 0`.
pub fn pv_current_balance(i: f64, i_ph: f64, pv: &PvSpec) -> (f64, f64) {
    let r_total = pv.load_resistance_ohm + pv.series_resistance_ohm;
    let scale = pv.cells_in_series as f64 * pv.thermal_voltage_v();
    let arg = i * r_total / scale;
    let diode = if arg > EXP_GUARD {
        (pv.dark_saturation_current_a.ln() + arg).min(f64::MAX.ln()).exp()
    } else {
        pv.dark_saturation_current_a * arg.exp()
    };
    let f = i_ph - (diode - pv.dark_saturation_current_a) - i * r_total / pv.shunt_resistance_ohm - i;
    let df = -diode * r_total / scale - r_total / pv.shunt_resistance_ohm - 1.0;
    (f, df)
}

/// Output current of the panel into its resistive load.
///
/// Newton iteration on [`pv_current_balance`], kept inside a shrinking
/// bisection bracket `[0, I_ph]`; any step that would leave the bracket is
/// replaced by its midpoint.
pub fn solve_pv_operating_point(i_ph: f64, pv: &PvSpec) -> Result<PvOperatingPoint> {
    pv.validate()?;
    if !(i_ph >= 0.0 && i_ph.is_finite()) {
        return Err(Error::Parameter(format!("photo-current {i_ph} A is not a finite non-negative value")));
    }
    if i_ph == 0.0 {
        return Ok(PvOperatingPoint {
            photo_current_a: 0.0,
            output_current_a: 0.0,
            output_voltage_v: 0.0,
            electric_power_w: 0.0,
            residual: 0.0,
        });
    }

    let (f_low, _) = pv_current_balance(0.0, i_ph, pv);
    let (f_high, _) = pv_current_balance(i_ph, i_ph, pv);
    let solver_error = |message: &str| Error::Solver {
        message: message.to_string(),
        i_ph,
        f_low,
        f_high,
    };
    if !(f_low >= 0.0 && f_high < 0.0) {
        return Err(solver_error("no sign change on [0, I_ph]"));
    }

    let (mut lo, mut hi) = (0.0, i_ph);
    let mut i = 0.5 * i_ph;
    let mut last_step = i_ph;
    for _ in 0..MAX_SOLVER_STEPS {
        let (f, df) = pv_current_balance(i, i_ph, pv);
        if f.abs() < PV_TOLERANCE_A {
            return Ok(operating_point(i, i_ph, f.abs(), pv));
        }
        if f > 0.0 {
            lo = i;
        } else {
            hi = i;
        }
        let newton = i - f / df;
        // Bisect when Newton leaves the bracket or stalls on the steep diode wall.
        let next = if newton > lo && newton < hi && (newton - i).abs() <= 0.5 * last_step {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_step = (next - i).abs();
        i = next;
        if hi - lo <= f64::EPSILON * hi {
            let (f, _) = pv_current_balance(i, i_ph, pv);
            if f.abs() < PV_TOLERANCE_A {
                return Ok(operating_point(i, i_ph, f.abs(), pv));
            }
            return Err(solver_error("bracket collapsed above the residual tolerance"));
        }
    }
    Err(solver_error("iteration limit reached"))
}

fn operating_point(i: f64, i_ph: f64, residual: f64, pv: &PvSpec) -> PvOperatingPoint {
    let v = i * pv.load_resistance_ohm;
    PvOperatingPoint {
        photo_current_a: i_ph,
        output_current_a: i,
        output_voltage_v: v,
        electric_power_w: i * i * pv.load_resistance_ohm,
        residual,
    }
}

/// Signal, noise and spectral efficiency of the photodiode branch.
///
/// S = (P_apd η_bi)², N = 2q (P_apd η_bi + I_bc) B_n + 4 K T B_n / R_L.
pub fn spectral_efficiency(p_apd_w: f64, apd: &ApdSpec) -> Result<LinkMetrics> {
    apd.validate()?;
    if !(p_apd_w >= 0.0) {
        return Err(Error::Parameter(format!("photodiode power {p_apd_w} W is negative")));
    }
    let current = p_apd_w * apd.conversion_efficiency_a_per_w;
    let signal = current * current;
    let shot = 2.0 * apd.electron_charge_c * (current + apd.background_current_a) * apd.noise_bandwidth_hz;
    let thermal = 4.0 * apd.boltzmann_j_per_k * apd.temperature_k * apd.noise_bandwidth_hz / apd.load_resistance_ohm;
    let noise = shot + thermal;
    Ok(LinkMetrics {
        signal_power: signal,
        noise_power: noise,
        spectral_efficiency: 0.5 * (signal * E / (2.0 * PI * noise)).ln_1p(),
    })
}
