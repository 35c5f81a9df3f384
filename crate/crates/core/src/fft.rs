//! Line-wise FFT helpers over row-major arrays whose every axis has the same length.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Clone)]
pub(crate) struct Plans {
    pub len: usize,
    pub fwd: Arc<dyn Fft<f64>>,
    pub inv: Arc<dyn Fft<f64>>,
}

impl Plans {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plans {
            len,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Sign {
    /// kernel e^{-2 pi i jk/N}
    Minus,
    /// kernel e^{+2 pi i jk/N}
    Plus,
}

/// Apply `op` to every line along `axis` of an array with `axes` axes of length `len`.
pub(crate) fn for_each_line(
    buf: &mut [C64],
    len: usize,
    axes: usize,
    axis: usize,
    mut op: impl FnMut(&mut [C64]),
) {
    debug_assert!(axis < axes);
    let stride = len.pow((axes - 1 - axis) as u32);
    let outer = len.pow(axis as u32);
    let mut line = vec![C64::new(0.0, 0.0); len];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * len * stride + i;
            for (k, v) in line.iter_mut().enumerate() {
                *v = buf[base + k * stride];
            }
            op(&mut line);
            for (k, v) in line.iter().enumerate() {
                buf[base + k * stride] = *v;
            }
        }
    }
}

/// Unnormalized DFT of one line.
pub(crate) fn dft_line(plans: &Plans, line: &mut [C64], sign: Sign) {
    match sign {
        Sign::Minus => plans.fwd.process(line),
        Sign::Plus => plans.inv.process(line),
    }
}

/// Centered DFT: out[q] = sum_i in[i] exp(-+ 2 pi i (i - N/2)(q - N/2) / N).
pub(crate) fn centered_dft_line(plans: &Plans, line: &mut [C64], sign: Sign) {
    let n = plans.len;
    for (i, v) in line.iter_mut().enumerate() {
        if i % 2 == 1 {
            *v = -*v;
        }
    }
    dft_line(plans, line, sign);
    let global = if (n / 2) % 2 == 1 { -1.0 } else { 1.0 };
    for (q, v) in line.iter_mut().enumerate() {
        let s = if q % 2 == 1 { -global } else { global };
        *v *= s;
    }
}

/// Signed frequency representative of DFT bin `q` in [-N/2, N/2).
pub(crate) fn signed_freq(q: usize, len: usize) -> i64 {
    if q < len / 2 {
        q as i64
    } else {
        q as i64 - len as i64
    }
}

/// Multipliers that move a trigonometric interpolant by `t` samples.
///
/// The Nyquist bin uses the real basis cos(pi s) + sin(pi s), which keeps the shift
/// commuting with complex conjugation and invertible at t = 1/2.
pub(crate) fn shift_twist(len: usize, t: f64) -> Vec<C64> {
    (0..len)
        .map(|q| {
            if q == len / 2 {
                let a = std::f64::consts::PI * t;
                C64::new(a.cos() + a.sin(), 0.0)
            } else {
                let p = signed_freq(q, len) as f64;
                C64::from_polar(1.0, 2.0 * std::f64::consts::PI * p * t / len as f64)
            }
        })
        .collect()
}

/// Shift a periodic line by `t` samples using trigonometric interpolation.
pub(crate) fn shift_line(plans: &Plans, line: &mut [C64], twist: &[C64]) {
    dft_line(plans, line, Sign::Minus);
    let scale = 1.0 / plans.len as f64;
    for (v, w) in line.iter_mut().zip(twist) {
        *v *= *w * scale;
    }
    dft_line(plans, line, Sign::Plus);
}

/// Transpose of [`shift_line`] with respect to the bilinear sum over the line.
pub(crate) fn shift_line_transposed(plans: &Plans, line: &mut [C64], twist: &[C64]) {
    dft_line(plans, line, Sign::Plus);
    let scale = 1.0 / plans.len as f64;
    for (v, w) in line.iter_mut().zip(twist) {
        *v *= *w * scale;
    }
    dft_line(plans, line, Sign::Minus);
}
