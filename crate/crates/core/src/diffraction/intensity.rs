//! Peak-normalized intensity maps and their CSV / binary exports.
//!
//! CSV layout: one metadata line
//!
//! ```text
//! # samples_per_side=<N>,window_half_width_m=<W>,spacing_m=<dx>,z_m=<z>
//! ```
//!
//! followed by N rows of N comma-separated values. Row `i` is
//! y = (i - N/2)·dx, column `j` is x = (j - N/2)·dx.
//!
//! Binary layout, little-endian throughout:
//!
//! | offset | type      | content                         |
//! |--------|-----------|---------------------------------|
//! | 0      | [u8; 8]   | magic `RBSWIMAP`                |
//! | 8      | u32       | format version (1)              |
//! | 12     | u32       | N                               |
//! | 16     | f64       | window half-width (m)           |
//! | 24     | f64       | plane position z (m)            |
//! | 32     | f64 × N²  | intensities, row-major          |

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{propagate, ModeSolution};
use crate::error::{Error, Result};
use crate::params::{CavityGeometry, GridSpec};

const MAGIC: &[u8; 8] = b"RBSWIMAP";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub grid: GridSpec,
    pub z_m: f64,
    /// Row-major |u|², scaled so the largest sample is 1.
    pub values: Vec<f64>,
}

/// Relative intensity on the plane a distance `z_m` from S1 toward S2.
///
/// `z_m = 0` returns the S1 mode itself. Any other plane is reached by free
/// propagation of the S1 field, so it must also satisfy the paraxial limit
/// of [`propagate`].
pub fn intensity_at_plane(
    mode: &ModeSolution,
    z_m: f64,
    geom: &CavityGeometry,
    grid: &GridSpec,
) -> Result<IntensityMap> {
    if !(0.0..=geom.cavity_length_m).contains(&z_m) {
        return Err(Error::Geometry(format!(
            "plane z = {z_m} m lies outside the cavity [0, {}] m",
            geom.cavity_length_m
        )));
    }
    if mode.field_s1.grid() != grid {
        return Err(Error::Parameter("mode was solved on a different grid".into()));
    }
    let raw = if z_m == 0.0 {
        mode.field_s1.intensity()
    } else {
        propagate(&mode.field_s1, z_m, geom.wavelength_m)?.intensity()
    };
    IntensityMap::peak_normalized(*grid, z_m, raw)
}

impl IntensityMap {
    pub fn peak_normalized(grid: GridSpec, z_m: f64, mut values: Vec<f64>) -> Result<Self> {
        let peak = values.iter().cloned().fold(0.0, f64::max);
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::Numeric(format!("intensity peak is {peak}")));
        }
        for v in &mut values {
            *v /= peak;
        }
        Ok(IntensityMap { grid, z_m, values })
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.samples_per_side + col]
    }

    /// (row, col) of the first maximal sample.
    pub fn peak_index(&self) -> (usize, usize) {
        let n = self.grid.samples_per_side;
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best / n, best % n)
    }

    /// Bilinear interpolation at (x, y) metres; `None` outside the sampled area.
    pub fn sample(&self, x_m: f64, y_m: f64) -> Option<f64> {
        let n = self.grid.samples_per_side;
        let dx = self.grid.spacing_m();
        let fx = x_m / dx + (n / 2) as f64;
        let fy = y_m / dx + (n / 2) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (n - 1) as f64 && fy <= (n - 1) as f64) {
            return None;
        }
        let c0 = (fx.floor() as usize).min(n - 2);
        let r0 = (fy.floor() as usize).min(n - 2);
        let tx = fx - c0 as f64;
        let ty = fy - r0 as f64;
        let top = self.at(r0, c0) * (1.0 - tx) + self.at(r0, c0 + 1) * tx;
        let bottom = self.at(r0 + 1, c0) * (1.0 - tx) + self.at(r0 + 1, c0 + 1) * tx;
        Some(top * (1.0 - ty) + bottom * ty)
    }

    /// Relative intensity at radius `r_m` along +x.
    pub fn radial(&self, r_m: f64) -> Option<f64> {
        self.sample(r_m, 0.0)
    }

    /// Largest |I(r, θ) − I(r, 0)| over `rings` radii in (0, `max_radius_m`]
    /// and `angles` equally spaced angles per ring.
    pub fn azimuthal_asymmetry(&self, max_radius_m: f64, rings: usize, angles: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=rings {
            let r = max_radius_m * k as f64 / rings as f64;
            let Some(reference) = self.sample(r, 0.0) else { continue };
            for j in 1..angles {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / angles as f64;
                if let Some(v) = self.sample(r * theta.cos(), r * theta.sin()) {
                    worst = worst.max((v - reference).abs());
                }
            }
        }
        worst
    }

    pub fn to_csv_string(&self) -> String {
        let n = self.grid.samples_per_side;
        let mut out = format!(
            "# samples_per_side={},window_half_width_m={},spacing_m={},z_m={}\n",
            n,
            self.grid.window_half_width_m,
            self.grid.spacing_m(),
            self.z_m
        );
        for row in self.values.chunks_exact(n) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::format(path, "missing metadata line"))?;
        let mut n = None;
        let mut w = None;
        let mut z = None;
        for item in header.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::format(path, format!("bad metadata item `{item}`")))?;
            match key {
                "samples_per_side" => n = value.parse::<usize>().ok(),
                "window_half_width_m" => w = value.parse::<f64>().ok(),
                "z_m" => z = value.parse::<f64>().ok(),
                _ => {}
            }
        }
        let (Some(n), Some(w), Some(z)) = (n, w, z) else {
            return Err(Error::format(path, "incomplete metadata"));
        };
        let mut values = Vec::with_capacity(n * n);
        for line in lines {
            for cell in line.split(',') {
                values.push(
                    cell.parse::<f64>()
                        .map_err(|e| Error::format(path, format!("bad value `{cell}`: {e}")))?,
                );
            }
        }
        if values.len() != n * n {
            return Err(Error::format(path, format!("expected {} values, found {}", n * n, values.len())));
        }
        Ok(IntensityMap {
            grid: GridSpec {
                samples_per_side: n,
                window_half_width_m: w,
            },
            z_m: z,
            values,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.grid.samples_per_side as u32).to_le_bytes());
        out.extend_from_slice(&self.grid.window_half_width_m.to_le_bytes());
        out.extend_from_slice(&self.z_m.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(Error::format(path, "not an intensity dump"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != VERSION {
            return Err(Error::format(path, format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let w = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let z = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
        let body = &bytes[HEADER_LEN..];
        if body.len() != 8 * n * n {
            return Err(Error::format(path, "payload length does not match N"));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(IntensityMap {
            grid: GridSpec {
                samples_per_side: n,
                window_half_width_m: w,
            },
            z_m: z,
            values,
        })
    }
}
