//! End-to-end model of a resonant-beam link that carries power and data
//! simultaneously (SWIPT).
//!
//! The chain has four stages:
//!
//! 1. [`diffraction`]: Fox-Li iteration between the two retro-reflecting
//!    surfaces gives the cavity mode and its one-pass loss δ.
//! 2. [`beam_power`]: pump conversion, small-signal gain and the saturated
//!    output beam power for transmission coefficients ε = 1 − δ.
//! 3. [`receiver`]: a power splitter feeding a photovoltaic panel (electric
//!    power) and an avalanche photodiode (spectral efficiency).
//! 4. [`pipeline`]: single operating points, cached parameter sweeps and
//!    CSV/JSON result tables.
//!
//! All quantities are SI internally; [`config`] converts from the file units.

pub mod beam_power;
pub mod config;
pub mod diffraction;
pub mod error;
pub mod params;
pub mod pipeline;
pub mod receiver;

pub use config::{load_config, Config};
pub use pipeline::{run_point, run_sweep, E2eRecord, SweepSpec};
pub use error::{Error, Result};
