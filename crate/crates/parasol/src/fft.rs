//! Thin axis-wise FFT helpers over dynamically-shaped arrays.

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place complex FFT along one axis of a dynamically shaped array.
/// The inverse transform is normalized by 1/len.
pub fn fft_along_axis(data: &mut ArrayD<Complex64>, axis: usize, inverse: bool) {
    let len = data.shape()[axis];
    if len <= 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    };
    let scale = if inverse { 1.0 / len as f64 } else { 1.0 };
    let mut scratch = vec![Complex64::new(0.0, 0.0); len];
    for mut lane in data.lanes_mut(Axis(axis)) {
        for (s, v) in scratch.iter_mut().zip(lane.iter()) {
            *s = *v;
        }
        fft.process(&mut scratch);
        for (v, s) in lane.iter_mut().zip(scratch.iter()) {
            *v = *s * scale;
        }
    }
}

/// Integer frequency for FFT bin `idx` of an axis of length `len`
/// (0, 1, ..., len/2, -len/2+1, ..., -1).
pub fn freq_index(idx: usize, len: usize) -> i64 {
    if idx <= len / 2 {
        idx as i64
    } else {
        idx as i64 - len as i64
    }
}

/// Angular wavenumber of bin `idx` for a periodic axis of physical length
/// `axis_len`.
pub fn wavenumber(idx: usize, len: usize, axis_len: f64) -> f64 {
    2.0 * std::f64::consts::PI * freq_index(idx, len) as f64 / axis_len
}
