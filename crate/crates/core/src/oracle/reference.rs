//! Double-precision reference transforms and products.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `e^(sign * 2πi k / n)`, with the angle reduced modulo `n` first.
pub fn root_of_unity(n: usize, k: usize, inverse: bool) -> Complex64 {
    let k = k % n;
    let theta = 2.0 * PI * k as f64 / n as f64;
    let s = if inverse { 1.0 } else { -1.0 };
    Complex64::from_polar(1.0, s * theta)
}

pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * root_of_unity(n, (j * k) % n, false))
                .sum()
        })
        .collect()
}

pub fn naive_idft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            let s: Complex64 = x
                .iter()
                .enumerate()
                .map(|(k, &v)| v * root_of_unity(n, (j * k) % n, true))
                .sum();
            s / n as f64
        })
        .collect()
}

pub fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

fn radix2(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    assert!(n.is_power_of_two(), "radix-2 transform needs a power-of-two length");
    let bits = n.trailing_zeros();
    let mut a: Vec<Complex64> = (0..n).map(|i| x[bit_reverse(i, bits)]).collect();
    let mut half = 1;
    while half < n {
        let len = 2 * half;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let w = root_of_unity(len, j, inverse);
                let u = a[start + j];
                let t = w * a[start + j + half];
                a[start + j] = u + t;
                a[start + j + half] = u - t;
            }
        }
        half = len;
    }
    a
}

/// Iterative radix-2 decimation-in-time FFT: bit-reversal permutation
/// followed by `log2 n` butterfly stages.
pub fn host_fft(x: &[Complex64]) -> Vec<Complex64> {
    radix2(x, false)
}

pub fn host_ifft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len() as f64;
    radix2(x, true).into_iter().map(|v| v / n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvMode {
    /// Length-`n` circular convolution.
    Cyclic,
    /// Full product of length `len(a) + len(b) - 1`.
    Acyclic,
}

pub fn schoolbook_polymul(a: &[Complex64], b: &[Complex64], mode: ConvMode) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    match mode {
        ConvMode::Acyclic => {
            let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        ConvMode::Cyclic => {
            let n = a.len().max(b.len());
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[(i + j) % n] += x * y;
                }
            }
            out
        }
    }
}

pub fn schoolbook_polymul_real(a: &[f64], b: &[f64], mode: ConvMode) -> Vec<f64> {
    let ca: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let cb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    schoolbook_polymul(&ca, &cb, mode).into_iter().map(|v| v.re).collect()
}

/// `‖got - want‖₂ / ‖want‖₂` (absolute norm when `want` is zero).
pub fn rel_l2_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let num: f64 = got.iter().zip(want).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = want.iter().map(|b| b.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// `max |got - want| / max |want|` (absolute when `want` is zero).
pub fn rel_max_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let num = got.iter().zip(want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let den = want.iter().map(|b| b.norm()).fold(0.0, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
