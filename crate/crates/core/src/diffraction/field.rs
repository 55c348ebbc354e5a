use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::GridSpec;

/// Complex scalar field sampled on a [`GridSpec`], row-major with rows along y.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    amplitude: Vec<Complex64>,
    grid: GridSpec,
}

impl ComplexField {
    pub fn new(grid: GridSpec, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "field has {} samples, grid expects {}x{}",
                amplitude.len(),
                grid.samples_per_side,
                grid.samples_per_side
            )));
        }
        Ok(ComplexField { amplitude, grid })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        ComplexField {
            amplitude: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
        }
    }

    pub fn uniform(grid: GridSpec, value: Complex64) -> Self {
        ComplexField {
            amplitude: vec![value; grid.len()],
            grid,
        }
    }

    /// Samples `f(x, y)` at every grid point (metres).
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let n = grid.samples_per_side;
        let mut amplitude = Vec::with_capacity(grid.len());
        for row in 0..n {
            let y = grid.coordinate_m(row);
            for col in 0..n {
                amplitude.push(f(grid.coordinate_m(col), y));
            }
        }
        ComplexField { amplitude, grid }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples_per_side(&self) -> usize {
        self.grid.samples_per_side
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn amplitude_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitude
    }

    pub fn into_amplitude(self) -> Vec<Complex64> {
        self.amplitude
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.amplitude[row * self.grid.samples_per_side + col]
    }

    /// Σ|u|² Δx², summed in storage order.
    pub fn power(&self) -> f64 {
        self.amplitude.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area_m2()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.amplitude.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.amplitude {
            *v *= factor;
        }
    }

    /// Rescales to unit total power. Fails on a zero or non-finite field.
    pub fn normalize_power(&mut self) -> Result<f64> {
        let p = self.power();
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Numeric(format!("cannot normalize field with power {p}")));
        }
        self.scale(p.sqrt().recip());
        Ok(p)
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.amplitude.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(idx) => {
                let n = self.grid.samples_per_side;
                Err(Error::Numeric(format!(
                    "non-finite field value at row {}, column {}",
                    idx / n,
                    idx % n
                )))
            }
        }
    }
}
