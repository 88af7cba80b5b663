//! Internal discrete Fourier transform kernels.
//!
//! Radix-2 Cooley-Tukey when the length is a power of two, direct O(N^2)
//! summation otherwise. Both compute the unnormalized standard DFT
//! `X[j] = sum_n x[n] exp(-2*pi*i*j*n/N)` (sign flipped for the inverse);
//! callers apply their own normalization.

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Unnormalized DFT, dispatching on the length.
pub fn dft(values: &mut [Complex64], dir: Direction) {
    let n = values.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_radix2(values, dir);
    } else {
        let out = dft_naive(values, dir);
        values.copy_from_slice(&out);
    }
}

fn dft_naive(values: &[Complex64], dir: Direction) -> Vec<Complex64> {
    let n = values.len();
    let base = dir.sign() * 2.0 * PI / n as f64;
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in values.iter().enumerate() {
                // j*k mod n keeps the phase argument small.
                let angle = base * ((j * k) % n) as f64;
                acc += v * Complex64::from_polar(1.0, angle);
            }
            acc
        })
        .collect()
}

fn fft_radix2(values: &mut [Complex64], dir: Direction) {
    let n = values.len();
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = dir.sign() * 2.0 * PI / len as f64;
        let wl = Complex64::from_polar(1.0, angle);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = values[start + k];
                let v = values[start + k + len / 2] * w;
                values[start + k] = u + v;
                values[start + k + len / 2] = u - v;
                w *= wl;
            }
        }
        len <<= 1;
    }
}

/// Multidimensional unnormalized DFT over a row-major tensor (last dimension
/// fastest). Every dimension must be a power of two.
pub fn fft_nd(values: &mut [Complex64], dims: &[usize], dir: Direction) {
    let total: usize = dims.iter().product();
    assert_eq!(values.len(), total);
    let mut stride = 1usize;
    for &dim in dims.iter().rev() {
        assert!(dim.is_power_of_two());
        let mut line = vec![Complex64::new(0.0, 0.0); dim];
        let block = stride * dim;
        for base in 0..total / block {
            for offset in 0..stride {
                let start = base * block + offset;
                for i in 0..dim {
                    line[i] = values[start + i * stride];
                }
                fft_radix2(&mut line, dir);
                for i in 0..dim {
                    values[start + i * stride] = line[i];
                }
            }
        }
        stride *= dim;
    }
}

/// Circular convolution on a padded power-of-two tensor, in place on `a`.
///
/// `a <- ifft(fft(a) .* fft(b)) / total`. `b` is consumed as scratch.
#[cfg(test)]
pub fn circular_convolve_nd(a: &mut [Complex64], b: &mut [Complex64], dims: &[usize]) {
    let total: usize = dims.iter().product();
    assert!(a.len() == total && b.len() == total);
    fft_nd(a, dims, Direction::Forward);
    fft_nd(b, dims, Direction::Forward);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= y;
    }
    fft_nd(a, dims, Direction::Inverse);
    let scale = 1.0 / total as f64;
    for x in a.iter_mut() {
        *x *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_roundtrip(n: usize) {
        let vals: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let mut work = vals.clone();
        dft(&mut work, Direction::Forward);
        dft(&mut work, Direction::Inverse);
        for (w, v) in work.iter().zip(&vals) {
            assert!((w / n as f64 - v).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_pow2_and_general() {
        naive_roundtrip(16);
        naive_roundtrip(24); // non-power-of-two path
    }

    #[test]
    fn radix2_matches_naive() {
        let n = 32;
        let vals: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 1.3).cos(), (i as f64 * 0.11).sin()))
            .collect();
        let by_naive = dft_naive(&vals, Direction::Forward);
        let mut by_fft = vals.clone();
        fft_radix2(&mut by_fft, Direction::Forward);
        for (an, af) in by_naive.iter().zip(&by_fft) {
            assert!((an - af).norm() < 1e-10);
        }
    }

    #[test]
    fn nd_convolution_matches_direct() {
        // 2D circular convolution vs the direct double sum.
        let dims = [4usize, 8];
        let total = 32;
        let a: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64 * 0.4).sin(), (i as f64 * 0.9).cos()))
            .collect();
        let b: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new(1.0 / (i as f64 + 1.0), 0.1))
            .collect();
        let mut fa = a.clone();
        let mut fb = b.clone();
        circular_convolve_nd(&mut fa, &mut fb, &dims);
        for r in 0..dims[0] {
            for c in 0..dims[1] {
                let mut direct = Complex64::new(0.0, 0.0);
                for rp in 0..dims[0] {
                    for cp in 0..dims[1] {
                        let dr = (r + dims[0] - rp) % dims[0];
                        let dc = (c + dims[1] - cp) % dims[1];
                        direct += a[rp * dims[1] + cp] * b[dr * dims[1] + dc];
                    }
                }
                assert!((fa[r * dims[1] + c] - direct).norm() < 1e-10);
            }
        }
    }
}
