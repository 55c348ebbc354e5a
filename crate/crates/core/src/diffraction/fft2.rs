//! Square 2-D FFT built from row transforms and a blocked transpose.
//!
//! Spectra are left in transposed layout: `forward` followed by `inverse`
//! restores the original orientation, and pointwise products between two
//! spectra from `forward` are unaffected.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

const BLOCK: usize = 32;

pub(crate) struct Fft2 {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub(crate) fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub(crate) fn size(&self) -> usize {
        self.size
    }

    /// In-place forward transform. Rows at index `nonzero_rows` and beyond
    /// must be zero on entry; they are skipped in the first pass.
    pub(crate) fn forward(&self, data: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>, nonzero_rows: usize) {
        let m = self.size;
        rows(&*self.forward, &mut data[..nonzero_rows * m], m);
        transpose(data, scratch, m);
        rows(&*self.forward, scratch, m);
        std::mem::swap(data, scratch);
    }

    /// In-place unnormalized inverse of [`Fft2::forward`]. Only the first
    /// `needed_rows` rows of the result are valid.
    pub(crate) fn inverse(&self, data: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>, needed_rows: usize) {
        let m = self.size;
        rows(&*self.inverse, data, m);
        transpose(data, scratch, m);
        rows(&*self.inverse, &mut scratch[..needed_rows * m], m);
        std::mem::swap(data, scratch);
    }
}

fn rows(fft: &dyn Fft<f64>, data: &mut [Complex64], len: usize) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(len).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(src: &[Complex64], dst: &mut Vec<Complex64>, m: usize) {
    dst.resize(m * m, Complex64::new(0.0, 0.0));
    for rb in (0..m).step_by(BLOCK) {
        for cb in (0..m).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(m) {
                for c in cb..(cb + BLOCK).min(m) {
                    dst[c * m + r] = src[r * m + c];
                }
            }
        }
    }
}
