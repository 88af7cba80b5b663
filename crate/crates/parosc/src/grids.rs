//! Sampling grids and quadrature rules.
//!
//! The tensor grid is a uniform periodic grid in the axial variable `rho`
//! crossed with a per-axis grid in `x` (uniform with trapezoid weights, or
//! Gauss-Hermite nodes carrying Lebesgue-equivalent weights). The `rho`
//! frequencies are `tau_i = pi * i / L_rho` for `i` in `[-N/2, N/2)`, and
//! [`dft_rho`] is unitary with that bin ordering.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Quadrature family used for the `x` axes of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XRule {
    UniformTrapezoid,
    GaussHermite,
}

impl fmt::Display for XRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XRule::UniformTrapezoid => write!(f, "uniform-trapezoid"),
            XRule::GaussHermite => write!(f, "gauss-hermite"),
        }
    }
}

impl FromStr for XRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-trapezoid" => Ok(XRule::UniformTrapezoid),
            "gauss-hermite" => Ok(XRule::GaussHermite),
            other => Err(Error::Config(format!("unknown x_rule `{other}`"))),
        }
    }
}

/// Geometry of the sampling grid for functions of `(rho, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub rho_halfwidth: f64,
    pub rho_points: usize,
    pub x_halfwidth: f64,
    pub x_points: usize,
    pub dim: usize,
    pub x_rule: XRule,
}

impl GridSpec {
    pub fn new(
        rho_halfwidth: f64,
        rho_points: usize,
        x_halfwidth: f64,
        x_points: usize,
        dim: usize,
        x_rule: XRule,
    ) -> Result<Self> {
        let spec = GridSpec {
            rho_halfwidth,
            rho_points,
            x_halfwidth,
            x_points,
            dim,
            x_rule,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default resolution: Hermite functions through degree 40 are resolved
    /// and their tails fall below 1e-12 at the box boundary. The x halfwidth
    /// must sit beyond the degree-40 turning point sqrt(81) = 9; 12 leaves a
    /// comfortable decay margin.
    pub fn default_for_dim(dim: usize) -> Result<Self> {
        GridSpec::new(16.0, 256, 12.0, 128, dim, XRule::UniformTrapezoid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho_points == 0 || self.rho_points % 2 != 0 {
            return Err(Error::Config(format!(
                "rho_points must be a positive even integer, got {}",
                self.rho_points
            )));
        }
        if !(self.rho_halfwidth > 0.0) || !(self.x_halfwidth > 0.0) {
            return Err(Error::Config("halfwidths must be positive".to_string()));
        }
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::Config(format!(
                "dim must be 1 or 2, got {}",
                self.dim
            )));
        }
        if self.x_points < 2 {
            return Err(Error::Config("x_points must be at least 2".to_string()));
        }
        Ok(())
    }

    /// Frequency of the signed bin `i` in `[-N/2, N/2)`.
    pub fn tau(&self, i: i64) -> f64 {
        PI * i as f64 / self.rho_halfwidth
    }

    /// Signed bin index for storage slot `b` in `0..N`.
    pub fn bin_to_signed(&self, b: usize) -> i64 {
        b as i64 - (self.rho_points / 2) as i64
    }

    /// Storage slot for a signed bin index.
    pub fn signed_to_bin(&self, i: i64) -> Result<usize> {
        let half = (self.rho_points / 2) as i64;
        if i < -half || i >= half {
            return Err(Error::Shape(format!(
                "tau index {i} outside [-{half}, {half})"
            )));
        }
        Ok((i + half) as usize)
    }

    /// `rho` sample points: uniform on `[-L, L)` with period `2L`.
    pub fn rho_nodes(&self) -> Vec<f64> {
        let h = self.rho_step();
        (0..self.rho_points)
            .map(|n| -self.rho_halfwidth + n as f64 * h)
            .collect()
    }

    pub fn rho_step(&self) -> f64 {
        2.0 * self.rho_halfwidth / self.rho_points as f64
    }

    /// Largest `tau^2` representable on the grid.
    pub fn tau_max(&self) -> f64 {
        self.tau((self.rho_points / 2) as i64 - 1)
            .abs()
            .max(self.tau(-((self.rho_points / 2) as i64)).abs())
    }

    /// Per-axis `x` nodes and Lebesgue-measure weights.
    pub fn x_axis(&self) -> Result<XAxis> {
        match self.x_rule {
            XRule::UniformTrapezoid => {
                Ok(XAxis::uniform_trapezoid(self.x_halfwidth, self.x_points))
            }
            XRule::GaussHermite => XAxis::gauss_hermite(self.x_points),
        }
    }

    /// Number of points in the full `x` slab (all axes).
    pub fn x_len(&self) -> usize {
        self.x_points.pow(self.dim as u32)
    }

    /// Number of points in the full tensor grid.
    pub fn grid_len(&self) -> usize {
        self.rho_points * self.x_len()
    }
}

/// One `x` axis: nodes plus weights that approximate the Lebesgue integral.
///
/// For Gauss-Hermite nodes the stored weight is `w_i * exp(x_i^2)`, so that
/// `sum_i weight_i * g(x_i)` targets `int g dx` for integrands of the form
/// `polynomial * exp(-x^2)` (exactly, through the rule's degree).
#[derive(Clone, Debug)]
pub struct XAxis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl XAxis {
    pub fn uniform_trapezoid(halfwidth: f64, n: usize) -> Self {
        let h = 2.0 * halfwidth / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| -halfwidth + i as f64 * h).collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        XAxis { nodes, weights }
    }

    pub fn gauss_hermite(n: usize) -> Result<Self> {
        let rule = gauss_hermite_rule(n)?;
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| (w.ln() + x * x).exp())
            .collect();
        Ok(XAxis {
            nodes: rule.nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes and positive weights of a quadrature rule on the real line.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

const GH_MAX_NODES: usize = 256;
const NEWTON_MAX_ITER: usize = 200;

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
///
/// Nodes are the roots of the degree-`n` Hermite polynomial, located by
/// Newton iteration on the L2-normalized three-term recurrence; the weight at
/// a root `x` is `1 / (n * p_{n-1}(x)^2)`.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    if n < 1 || n > GH_MAX_NODES {
        return Err(Error::Domain(format!(
            "gauss_hermite_rule: need 1 <= n <= {GH_MAX_NODES}, got {n}"
        )));
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let half = (n + 1) / 2;
    let mut z = 0.0f64;
    let mut z_hist: Vec<f64> = Vec::with_capacity(half);
    for i in 0..half {
        // Standard initial guesses, largest root first.
        z = match i {
            0 => {
                let s = (2 * n + 1) as f64;
                s.sqrt() - 1.85575 * s.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * z_hist[0],
            3 => 1.91 * z - 0.91 * z_hist[1],
            _ => 2.0 * z - z_hist[i - 2],
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (pn, pn_minus) = hermite_ortho_pair(n, z);
            let dpn = (2.0 * n as f64).sqrt() * pn_minus;
            let dz = pn / dpn;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence(format!(
                "gauss_hermite_rule: root {i} of degree {n} did not converge"
            )));
        }
        z_hist.push(z);
        let (_, pn_minus) = hermite_ortho_pair(n, z);
        let w = 1.0 / (n as f64 * pn_minus * pn_minus);
        nodes[n - 1 - i] = z;
        weights[n - 1 - i] = w;
        nodes[i] = -z;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[half - 1] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness_degree: 2 * n - 1,
    })
}

/// Orthonormal-Hermite values `(p_n(x), p_{n-1}(x))` for the weight `exp(-x^2)`.
fn hermite_ortho_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 0.0f64;
    let mut p = PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * p - (kf / (kf + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> Result<QuadratureRule> {
    if n < 1 || n > 4096 {
        return Err(Error::Domain(format!(
            "gauss_legendre_rule: need 1 <= n <= 4096, got {n}"
        )));
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let half = (n + 1) / 2;
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let mut p_prev = 0.0f64;
            let mut p = 1.0f64;
            for k in 0..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * z * p - kf * p_prev) / (kf + 1.0);
                p_prev = p;
                p = next;
            }
            dp = n as f64 * (z * p - p_prev) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence(format!(
                "gauss_legendre_rule: root {i} of degree {n} did not converge"
            )));
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[half - 1] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness_degree: 2 * n - 1,
    })
}

/// Gauss-Legendre rule rescaled to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Result<QuadratureRule> {
    let base = gauss_legendre_rule(n)?;
    let mid = 0.5 * (a + b);
    let halfspan = 0.5 * (b - a);
    Ok(QuadratureRule {
        nodes: base.nodes.iter().map(|&x| mid + halfspan * x).collect(),
        weights: base.weights.iter().map(|&w| halfspan * w).collect(),
        exactness_degree: base.exactness_degree,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DftDirection {
    Forward,
    Inverse,
}

/// Unitary DFT along `rho` with bins ordered by increasing signed frequency.
///
/// Forward maps samples `f(rho_n)` to coefficients against `exp(i tau_i rho_n)`
/// with `1/sqrt(N)` normalization both ways, so `inverse(forward(v)) = v` and
/// the transform preserves the l2 norm.
pub fn dft_rho(spec: &GridSpec, values: &[Complex64], dir: DftDirection) -> Result<Vec<Complex64>> {
    let n = spec.rho_points;
    if values.len() != n {
        return Err(Error::Shape(format!(
            "dft_rho: expected {n} values, got {}",
            values.len()
        )));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let half = n / 2;
    // The grid starts at -L, not 0, which shows up as a (-1)^i phase on the
    // standard DFT bins.
    match dir {
        DftDirection::Forward => {
            let mut buf = values.to_vec();
            fft::dft(&mut buf, fft::Direction::Forward);
            Ok((0..n)
                .map(|b| {
                    let i = b as i64 - half as i64;
                    let idx = i.rem_euclid(n as i64) as usize;
                    let sign = if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    buf[idx] * sign * scale
                })
                .collect())
        }
        DftDirection::Inverse => {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for b in 0..n {
                let i = b as i64 - half as i64;
                let idx = i.rem_euclid(n as i64) as usize;
                let sign = if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[idx] = values[b] * sign;
            }
            fft::dft(&mut buf, fft::Direction::Inverse);
            for v in buf.iter_mut() {
                *v *= scale;
            }
            Ok(buf)
        }
    }
}

/// Allocation-free inverse of [`dft_rho`]: `line` holds signed-bin-ordered
/// coefficients on entry and grid samples on exit; `scratch` must have the
/// same length.
pub(crate) fn dft_rho_inverse_into(
    spec: &GridSpec,
    line: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    let n = spec.rho_points;
    debug_assert!(line.len() == n && scratch.len() == n);
    let half = n / 2;
    for (b, v) in line.iter().enumerate() {
        let i = b as i64 - half as i64;
        let idx = i.rem_euclid(n as i64) as usize;
        let sign = if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        scratch[idx] = v * sign;
    }
    fft::dft(scratch, fft::Direction::Inverse);
    let scale = 1.0 / (n as f64).sqrt();
    for (dst, src) in line.iter_mut().zip(scratch.iter()) {
        *dst = src * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_into_matches_public_inverse() {
        let spec = GridSpec::new(5.0, 16, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap();
        let vals: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.3).sin()))
            .collect();
        let want = dft_rho(&spec, &vals, DftDirection::Inverse).unwrap();
        let mut line = vals.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); 16];
        dft_rho_inverse_into(&spec, &mut line, &mut scratch);
        for (a, b) in line.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn gauss_hermite_small_rules() {
        let r1 = gauss_hermite_rule(1).unwrap();
        assert_relative_eq!(r1.nodes[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(r1.weights[0], PI.sqrt(), epsilon = 1e-14);

        let r2 = gauss_hermite_rule(2).unwrap();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert_relative_eq!(r2.nodes[1], inv_sqrt2, epsilon = 1e-13);
        assert_relative_eq!(r2.nodes[0], -inv_sqrt2, epsilon = 1e-13);
        assert_relative_eq!(r2.weights[0], PI.sqrt() / 2.0, epsilon = 1e-13);
        assert_relative_eq!(r2.weights[1], PI.sqrt() / 2.0, epsilon = 1e-13);
    }

    /// Exact Gaussian moments: int x^{2m} e^{-x^2} dx = sqrt(pi) (2m-1)!! / 2^m.
    fn gaussian_moment(m: usize) -> f64 {
        let mut v = PI.sqrt();
        for j in 1..=m {
            v *= (2 * j - 1) as f64 / 2.0;
        }
        v
    }

    #[test]
    fn gauss_hermite_moment_exactness() {
        for &n in &[5usize, 17, 40, 64] {
            let rule = gauss_hermite_rule(n).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, PI.sqrt(), epsilon = 1e-12);
            // Highest even moment inside the exactness degree 2n-1.
            let m = n - 1;
            let approx_val = rule.integrate(|x| x.powi(2 * m as i32));
            assert_relative_eq!(approx_val, gaussian_moment(m), max_relative = 1e-10);
        }
    }

    #[test]
    fn gauss_hermite_high_moment_n40() {
        // x^78 with n = 40 nodes (degree 78 <= 79).
        let rule = gauss_hermite_rule(40).unwrap();
        let approx_val = rule.integrate(|x| x.powi(78));
        assert_relative_eq!(approx_val, gaussian_moment(39), max_relative = 1e-10);
    }

    #[test]
    fn gauss_legendre_basics() {
        let rule = gauss_legendre_rule(12).unwrap();
        let total: f64 = rule.weights.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-13);
        // int_{-1}^{1} x^22 dx = 2/23, degree 22 <= 23.
        assert_relative_eq!(
            rule.integrate(|x| x.powi(22)),
            2.0 / 23.0,
            max_relative = 1e-12
        );
        let shifted = gauss_legendre_on(0.0, 2.0, 8).unwrap();
        assert_relative_eq!(
            shifted.integrate(|x| x * x),
            8.0 / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn dft_rho_constant_hits_zero_bin() {
        let spec = GridSpec::new(4.0, 16, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap();
        let vals = vec![Complex64::new(1.0, 0.0); 16];
        let out = dft_rho(&spec, &vals, DftDirection::Forward).unwrap();
        for b in 0..16 {
            let i = spec.bin_to_signed(b);
            if i == 0 {
                assert_relative_eq!(out[b].re, 4.0, epsilon = 1e-12);
            } else {
                assert!(out[b].norm() < 1e-12, "leak at bin {i}");
            }
        }
    }

    #[test]
    fn dft_rho_pure_tone_bin_ordering() {
        let spec = GridSpec::new(5.0, 32, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap();
        let tau3 = spec.tau(3);
        let vals: Vec<Complex64> = spec
            .rho_nodes()
            .iter()
            .map(|&r| Complex64::from_polar(1.0, tau3 * r))
            .collect();
        let out = dft_rho(&spec, &vals, DftDirection::Forward).unwrap();
        // Oracle: direct O(N^2) projection onto each exp(i tau_i rho).
        for b in 0..32 {
            let i = spec.bin_to_signed(b);
            let direct: Complex64 = spec
                .rho_nodes()
                .iter()
                .zip(&vals)
                .map(|(&r, v)| v * Complex64::from_polar(1.0, -spec.tau(i) * r))
                .sum::<Complex64>()
                / (32.0f64).sqrt();
            assert!((out[b] - direct).norm() < 1e-10);
            if i == 3 {
                assert_relative_eq!(out[b].re, (32.0f64).sqrt(), epsilon = 1e-10);
            } else {
                assert!(out[b].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn dft_rho_roundtrip_and_parseval() {
        let spec = GridSpec::new(6.0, 24, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap();
        let vals: Vec<Complex64> = (0..24)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.1).cos()))
            .collect();
        let fwd = dft_rho(&spec, &vals, DftDirection::Forward).unwrap();
        let back = dft_rho(&spec, &fwd, DftDirection::Inverse).unwrap();
        let norm_in: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
        let norm_mid: f64 = fwd.iter().map(|v| v.norm_sqr()).sum();
        assert_relative_eq!(norm_in, norm_mid, epsilon = 1e-12);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn trapezoid_axis_integrates_gaussian() {
        let axis = XAxis::uniform_trapezoid(8.0, 128);
        let total: f64 = axis
            .nodes
            .iter()
            .zip(&axis.weights)
            .map(|(&x, &w)| w * (-x * x).exp())
            .sum();
        assert_relative_eq!(total, PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn gauss_hermite_axis_lebesgue_weights() {
        // sum w_i e^{x_i^2} * (x_i^2 e^{-x_i^2}) should equal int x^2 e^{-x^2}.
        let axis = XAxis::gauss_hermite(24).unwrap();
        let total: f64 = axis
            .nodes
            .iter()
            .zip(&axis.weights)
            .map(|(&x, &w)| w * x * x * (-x * x).exp())
            .sum();
        assert_relative_eq!(total, PI.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn grid_spec_rejects_bad_input() {
        assert!(GridSpec::new(4.0, 15, 4.0, 8, 1, XRule::UniformTrapezoid).is_err());
        assert!(GridSpec::new(-1.0, 16, 4.0, 8, 1, XRule::UniformTrapezoid).is_err());
        assert!(GridSpec::new(4.0, 16, 4.0, 8, 3, XRule::UniformTrapezoid).is_err());
    }
}
