//! Littlewood-Paley square functions driven by the heat semigroup.
//!
//! `g_N(f)(z)` integrates `|d_t^N e^{-tH} f(z)|^2 t^{2N-1}` over time;
//! `g*_N(f)(z)` additionally averages `|d_t e^{-tH} f|^2` in space against
//! the weight `(1 + |z'-z|^2/t)^{-N}`. Time derivatives of the semigroup are
//! exact on the spectral side (each mode picks up `(-lambda)^N e^{-t lambda}`),
//! so the only numerics are the time quadrature, which is calibrated against
//! the closed-form Gamma integral before use, and the spatial grid.

use crate::error::{Error, Result};
use crate::fft;
use crate::grids::{dft_rho_inverse_into, GridSpec};
use crate::report::{DominationReport, LpBand, LpEquivalenceReport};
use crate::symbols::{self, Symbol};
use crate::transform::{analyze, synthesize, x_product_weights, GridFunction, MixedSpectrum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;

/// Calibration tolerance for the Gamma-integral identity.
pub const CALIBRATION_TOL: f64 = 1e-6;

/// Log-spaced quadrature in time with trapezoid weights in `ln t`.
///
/// Before use in a square function the rule must pass the self-calibration
/// gate: it reproduces
/// `int_0^inf lambda^{2N} e^{-2 t lambda} t^{2N-1} dt = 2^{-2N} (2N-1)!`
/// within [`CALIBRATION_TOL`] across the declared eigenvalue range.
#[derive(Clone, Debug)]
pub struct TimeQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    calibrated: bool,
}

/// `2^{-2N} Gamma(2N)`, the exact value of the calibration integral.
pub fn gamma_reference(n_order: usize) -> f64 {
    let gamma: f64 = (1..2 * n_order).map(|v| v as f64).product();
    0.25f64.powi(n_order as i32) * gamma
}

impl TimeQuadrature {
    /// Default node density of the standard rule (200 nodes on [1e-4, 30]).
    const LOG_DENSITY: f64 = 200.0 / 12.61;

    pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) || n < 2 {
            return Err(Error::Domain(format!(
                "log_spaced needs 0 < t_min < t_max and n >= 2, got [{t_min}, {t_max}] x {n}"
            )));
        }
        let du = (t_max / t_min).ln() / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| t_min * (i as f64 * du).exp()).collect();
        let weights: Vec<f64> = nodes
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let trap = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                t * du * trap
            })
            .collect();
        Ok(TimeQuadrature {
            nodes,
            weights,
            t_min,
            t_max,
            calibrated: false,
        })
    }

    /// The standard rule: 200 log-spaced nodes on `[1e-4, 30]`, uncalibrated.
    pub fn standard() -> Self {
        TimeQuadrature::log_spaced(1e-4, 30.0, 200).expect("standard rule is valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }

    /// Relative defect of the Gamma-integral identity at one eigenvalue.
    pub fn calibration_defect(&self, n_order: usize, lambda: f64) -> f64 {
        let exact = gamma_reference(n_order);
        let quad: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| {
                w * lambda.powi(2 * n_order as i32)
                    * (-2.0 * t * lambda).exp()
                    * t.powi(2 * n_order as i32 - 1)
            })
            .sum();
        (quad - exact).abs() / exact
    }

    /// Runs the calibration gate for all orders `1..=max_order` over the
    /// eigenvalue range. Failure aborts (the rule stays unusable) rather
    /// than degrading silently.
    pub fn calibrate(mut self, max_order: usize, lambda_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = lambda_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::Domain(format!("bad eigenvalue range [{lo}, {hi}]")));
        }
        let samples = 48;
        for n in 1..=max_order.max(1) {
            for i in 0..=samples {
                let lam = lo * (hi / lo).powf(i as f64 / samples as f64);
                let defect = self.calibration_defect(n, lam);
                if !(defect < CALIBRATION_TOL) {
                    return Err(Error::Uncalibrated(format!(
                        "order {n}, lambda {lam:.3}: defect {defect:.3e} \
                         (rule [{:.3e}, {}] x {})",
                        self.t_min,
                        self.t_max,
                        self.len()
                    )));
                }
            }
        }
        self.calibrated = true;
        Ok(self)
    }

    /// Builds a rule calibrated for the given orders and eigenvalue range,
    /// starting from the standard geometry and shrinking `t_min` as the
    /// head-truncation error of the identity demands (approximately
    /// `(2 t_min lambda)^{2N} / (2N (2N-1)!)` at order N, worst at N = 1).
    pub fn calibrated_for(max_order: usize, lambda_range: (f64, f64)) -> Result<Self> {
        let (_, hi) = lambda_range;
        let t_min = (3.5e-4 / hi).min(1e-4);
        let t_max = 30.0;
        let n = ((t_max / t_min).ln() * Self::LOG_DENSITY).ceil() as usize;
        TimeQuadrature::log_spaced(t_min, t_max, n)?.calibrate(max_order, lambda_range)
    }
}

/// Which square function a profile holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GKind {
    GN,
    GStarN,
}

/// Sampled square-function values over the grid.
#[derive(Clone, Debug)]
pub struct GProfile {
    pub which: GKind,
    pub n_order: usize,
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub time_nodes: usize,
}

impl GProfile {
    /// Grid L2 norm of the profile.
    pub fn norm_l2(&self) -> Result<f64> {
        let w = x_product_weights(&self.spec)?;
        let drho = self.spec.rho_step();
        let xl = self.spec.x_len();
        let mut total = 0.0;
        for n in 0..self.spec.rho_points {
            for (x, &wx) in w.iter().enumerate() {
                let v = self.values[n * xl + x];
                total += wx * v * v;
            }
        }
        Ok((drho * total).sqrt())
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Writes `rho,x1[,x2],value` rows in storage order.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let rho = self.spec.rho_nodes();
        let axis = self.spec.x_axis()?;
        if self.spec.dim == 1 {
            writeln!(out, "rho,x1,value")?;
        } else {
            writeln!(out, "rho,x1,x2,value")?;
        }
        let mut xbuf = vec![0.0f64; self.spec.dim];
        for (n, &r) in rho.iter().enumerate() {
            for xf in 0..self.spec.x_len() {
                crate::transform::fill_x_point(&self.spec, &axis, xf, &mut xbuf);
                let v = self.values[n * self.spec.x_len() + xf];
                if self.spec.dim == 1 {
                    writeln!(out, "{},{},{}", r, xbuf[0], v)?;
                } else {
                    writeln!(out, "{},{},{},{}", r, xbuf[0], xbuf[1], v)?;
                }
            }
        }
        Ok(())
    }
}

/// `d_t^N e^{-tH} f` as a grid function: coefficients are multiplied by
/// `(-lambda)^N e^{-t lambda}` and synthesized (no numerical `t`-derivative).
pub fn heat_time_derivative_field(
    n_order: usize,
    t: f64,
    s: &MixedSpectrum,
) -> Result<GridFunction> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat field needs t > 0, got {t}")));
    }
    let mut scaled = s.clone();
    let m_count = s.index_count();
    for bin in 0..s.spec.rho_points {
        for m in 0..m_count {
            let lam = s.lambda(bin, m);
            let factor = (-lam).powi(n_order as i32) * (-t * lam).exp();
            let v = scaled.coeff(bin, m) * factor;
            scaled.set_coeff(bin, m, v);
        }
    }
    synthesize(&scaled)
}

/// Precomputed per-(bin, level) partial synthesis, making repeated heat-field
/// evaluation at many times cheap. Layout: `partial[x][bin][level]`.
pub struct HeatFieldEngine {
    spec: GridSpec,
    shells: usize,
    lambdas: Vec<f64>, // [bin][level]
    partial: Vec<Complex64>,
}

impl HeatFieldEngine {
    pub fn new(s: &MixedSpectrum) -> Result<Self> {
        let spec = s.spec.clone();
        let shells = s.max_degree + 1;
        let axis = spec.x_axis()?;
        let table = crate::hermite::HermiteTable::build(s.max_degree, &axis.nodes)?;
        let xl = spec.x_len();
        let bins = spec.rho_points;
        let inv_scale = 1.0 / spec.rho_step().sqrt();

        // Group coefficients of one bin by shell and synthesize each group
        // on the x slab.
        let mut partial = vec![Complex64::new(0.0, 0.0); xl * bins * shells];
        let m_count = s.index_count();
        let indices = s.indices();
        for bin in 0..bins {
            for m in 0..m_count {
                let c = s.coeff(bin, m) * inv_scale;
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let mu = &indices[m];
                let k = mu.degree();
                match spec.dim {
                    1 => {
                        let row = table.row(mu.entry(0));
                        for (x, &hv) in row.iter().enumerate() {
                            partial[(x * bins + bin) * shells + k] += c * hv;
                        }
                    }
                    _ => {
                        let row1 = table.row(mu.entry(0));
                        let row2 = table.row(mu.entry(1));
                        let nx = spec.x_points;
                        for i1 in 0..nx {
                            let c1 = c * row1[i1];
                            for i2 in 0..nx {
                                let x = i1 * nx + i2;
                                partial[(x * bins + bin) * shells + k] += c1 * row2[i2];
                            }
                        }
                    }
                }
            }
        }

        let mut lambdas = Vec::with_capacity(bins * shells);
        let d = spec.dim as f64;
        for bin in 0..bins {
            let tau = spec.tau(spec.bin_to_signed(bin));
            for k in 0..shells {
                lambdas.push(tau * tau + 2.0 * k as f64 + d);
            }
        }
        Ok(HeatFieldEngine {
            spec,
            shells,
            lambdas,
            partial,
        })
    }

    /// Fills `out` (grid layout) with `d_t^N e^{-tH} f`.
    pub fn field_into(&self, n_order: usize, t: f64, out: &mut [Complex64]) {
        let bins = self.spec.rho_points;
        let xl = self.spec.x_len();
        debug_assert_eq!(out.len(), bins * xl);
        let shells = self.shells;
        // Spectral weights per (bin, level).
        let weights: Vec<f64> = self
            .lambdas
            .iter()
            .map(|&lam| (-lam).powi(n_order as i32) * (-t * lam).exp())
            .collect();

        // Work per x point: contract levels, then inverse DFT across bins.
        // Results land in out[.. ] transposed afterwards.
        let spec = &self.spec;
        let partial = &self.partial;
        let columns: Vec<Vec<Complex64>> = (0..xl)
            .into_par_iter()
            .map(|x| {
                let mut line = vec![Complex64::new(0.0, 0.0); bins];
                let mut scratch = vec![Complex64::new(0.0, 0.0); bins];
                for bin in 0..bins {
                    let base = (x * bins + bin) * shells;
                    let wbase = bin * shells;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..shells {
                        acc += partial[base + k] * weights[wbase + k];
                    }
                    line[bin] = acc;
                }
                dft_rho_inverse_into(spec, &mut line, &mut scratch);
                line
            })
            .collect();
        for (x, col) in columns.iter().enumerate() {
            for (n, v) in col.iter().enumerate() {
                out[n * xl + x] = *v;
            }
        }
    }
}

/// The Littlewood-Paley `g_N` function (pointwise over the grid):
/// `( sum_q w_q |d_t^N e^{-t_q H} f(z)|^2 t_q^{2N-1} )^{1/2}`.
pub fn g_function(
    n_order: usize,
    f: &GridFunction,
    q: &TimeQuadrature,
    k_max: usize,
) -> Result<GProfile> {
    if n_order == 0 {
        return Err(Error::Domain("g function needs N >= 1".into()));
    }
    let s = analyze(f, k_max)?;
    g_function_from_spectrum(n_order, &s, q)
}

pub fn g_function_from_spectrum(
    n_order: usize,
    s: &MixedSpectrum,
    q: &TimeQuadrature,
) -> Result<GProfile> {
    if n_order == 0 {
        return Err(Error::Domain("g function needs N >= 1".into()));
    }
    require_calibrated(q)?;
    let engine = HeatFieldEngine::new(s)?;
    let len = s.spec.grid_len();
    let mut acc = vec![0.0f64; len];
    let mut field = vec![Complex64::new(0.0, 0.0); len];
    for (&t, &w) in q.nodes.iter().zip(&q.weights) {
        engine.field_into(n_order, t, &mut field);
        let tw = w * t.powi(2 * n_order as i32 - 1);
        for (a, v) in acc.iter_mut().zip(&field) {
            *a += tw * v.norm_sqr();
        }
    }
    Ok(GProfile {
        which: GKind::GN,
        n_order,
        spec: s.spec.clone(),
        values: acc.into_iter().map(f64::sqrt).collect(),
        t_min: q.t_min,
        t_max: q.t_max,
        time_nodes: q.len(),
    })
}

fn require_calibrated(q: &TimeQuadrature) -> Result<()> {
    if !q.is_calibrated() {
        return Err(Error::Uncalibrated(
            "time quadrature has not passed the calibration gate".into(),
        ));
    }
    Ok(())
}

/// The `g*_N` function:
/// `( sum_q w_q t_q^{1-(d+1)/2} sum_{z'} W_{z'} (1+|z'-z|^2/t_q)^{-N}
///    |d_t e^{-t_q H} f(z')|^2 )^{1/2}`.
///
/// The spatial average is a convolution in `z - z'` and is evaluated by a
/// zero-padded FFT; `rho`-periodic images beyond the box are neglected (the
/// integrand decays like the spectrum's heat field).
pub fn g_star_function(
    n_order: usize,
    f: &GridFunction,
    q: &TimeQuadrature,
    k_max: usize,
) -> Result<GProfile> {
    let s = analyze(f, k_max)?;
    Ok(g_star_many(n_order, std::slice::from_ref(&s), q)?
        .pop()
        .unwrap())
}

/// `g*_N` for a whole family at once (the kernel FFT per time node is shared).
pub fn g_star_many(
    n_order: usize,
    family: &[MixedSpectrum],
    q: &TimeQuadrature,
) -> Result<Vec<GProfile>> {
    require_calibrated(q)?;
    if family.is_empty() {
        return Ok(Vec::new());
    }
    let spec = family[0].spec.clone();
    let d = spec.dim;
    let len = spec.grid_len();
    let engines: Vec<HeatFieldEngine> = family
        .iter()
        .map(HeatFieldEngine::new)
        .collect::<Result<_>>()?;

    // Geometry for the padded convolution.
    let grid_dims: Vec<usize> = match d {
        1 => vec![spec.rho_points, spec.x_points],
        _ => vec![spec.rho_points, spec.x_points, spec.x_points],
    };
    let padded: Vec<usize> = grid_dims
        .iter()
        .map(|&n| (2 * n).next_power_of_two())
        .collect();
    let padded_len: usize = padded.iter().product();
    let axis = spec.x_axis()?;
    let steps: Vec<f64> = match d {
        1 => vec![spec.rho_step(), axis.nodes[1] - axis.nodes[0]],
        _ => {
            let hx = axis.nodes[1] - axis.nodes[0];
            vec![spec.rho_step(), hx, hx]
        }
    };
    let weights = x_product_weights(&spec)?;
    let drho = spec.rho_step();

    let mut acc: Vec<Vec<f64>> = vec![vec![0.0; len]; family.len()];
    let mut field = vec![Complex64::new(0.0, 0.0); len];
    let mut kernel = vec![Complex64::new(0.0, 0.0); padded_len];
    let mut kernel_fft = vec![Complex64::new(0.0, 0.0); padded_len];
    let mut data = vec![Complex64::new(0.0, 0.0); padded_len];

    for (&t, &w) in q.nodes.iter().zip(&q.weights) {
        // Weight kernel (1 + |delta|^2 / t)^{-N} on the padded difference grid.
        build_weight_kernel(&padded, &steps, t, n_order, &mut kernel);
        kernel_fft.copy_from_slice(&kernel);
        fft::fft_nd(&mut kernel_fft, &padded, fft::Direction::Forward);

        let t_factor = w * t.powf(1.0 - (d as f64 + 1.0) / 2.0);
        for (fi, engine) in engines.iter().enumerate() {
            engine.field_into(1, t, &mut field);
            // Density |field|^2 * quadrature weight, zero padded.
            for v in data.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            for n in 0..spec.rho_points {
                for xflat in 0..spec.x_len() {
                    let density =
                        field[n * spec.x_len() + xflat].norm_sqr() * weights[xflat] * drho;
                    let p = pad_index(&padded, &grid_dims, n, xflat, spec.x_points);
                    data[p] = Complex64::new(density, 0.0);
                }
            }
            fft::fft_nd(&mut data, &padded, fft::Direction::Forward);
            for (a, b) in data.iter_mut().zip(&kernel_fft) {
                *a *= b;
            }
            fft::fft_nd(&mut data, &padded, fft::Direction::Inverse);
            let scale = t_factor / padded_len as f64;
            for n in 0..spec.rho_points {
                for xflat in 0..spec.x_len() {
                    let p = pad_index(&padded, &grid_dims, n, xflat, spec.x_points);
                    acc[fi][n * spec.x_len() + xflat] += scale * data[p].re.max(0.0);
                }
            }
        }
    }

    // Spatial-tail gate: the density of the slowest-decaying family member
    // must not pile up on the box boundary.
    check_spatial_tail(&spec, &engines, q)?;

    Ok(acc
        .into_iter()
        .map(|values| GProfile {
            which: GKind::GStarN,
            n_order,
            spec: spec.clone(),
            values: values.into_iter().map(f64::sqrt).collect(),
            t_min: q.t_min,
            t_max: q.t_max,
            time_nodes: q.len(),
        })
        .collect())
}

fn pad_index(
    padded: &[usize],
    grid_dims: &[usize],
    n: usize,
    xflat: usize,
    x_points: usize,
) -> usize {
    match grid_dims.len() {
        2 => n * padded[1] + xflat,
        _ => {
            let i1 = xflat / x_points;
            let i2 = xflat % x_points;
            (n * padded[1] + i1) * padded[2] + i2
        }
    }
}

/// Samples `(1 + |delta z|^2 / t)^{-N}` on the padded difference grid, with
/// negative offsets wrapped to the top of each axis.
fn build_weight_kernel(
    padded: &[usize],
    steps: &[f64],
    t: f64,
    n_order: usize,
    out: &mut [Complex64],
) {
    let dims = padded.len();
    let mut idx = vec![0usize; dims];
    for (flat, v) in out.iter_mut().enumerate() {
        let mut rem = flat;
        for a in (0..dims).rev() {
            idx[a] = rem % padded[a];
            rem /= padded[a];
        }
        let mut sep_sq = 0.0;
        for a in 0..dims {
            // wrap: index p encodes offset p (p < n) or p - P (p >= n/2 top half)
            let p = idx[a];
            let signed = if p <= padded[a] / 2 {
                p as f64
            } else {
                p as f64 - padded[a] as f64
            };
            let delta = signed * steps[a];
            sep_sq += delta * delta;
        }
        *v = Complex64::new((1.0 + sep_sq / t).powi(-(n_order as i32)), 0.0);
    }
}

/// Direct (quadratic-cost) evaluation of the `g*` spatial average, used to
/// cross-check the FFT path on small grids.
#[cfg(test)]
pub(crate) fn g_star_direct(
    n_order: usize,
    s: &MixedSpectrum,
    q: &TimeQuadrature,
) -> Result<GProfile> {
    require_calibrated(q)?;
    let spec = s.spec.clone();
    let engine = HeatFieldEngine::new(s)?;
    let len = spec.grid_len();
    let weights = x_product_weights(&spec)?;
    let drho = spec.rho_step();
    let axis = spec.x_axis()?;
    let rho = spec.rho_nodes();
    let d = spec.dim;
    let mut acc = vec![0.0f64; len];
    let mut field = vec![Complex64::new(0.0, 0.0); len];
    let mut xs = vec![vec![0.0f64; d]; spec.x_len()];
    for (xf, x) in xs.iter_mut().enumerate() {
        crate::transform::fill_x_point(&spec, &axis, xf, x);
    }
    for (&t, &w) in q.nodes.iter().zip(&q.weights) {
        engine.field_into(1, t, &mut field);
        let t_factor = w * t.powf(1.0 - (d as f64 + 1.0) / 2.0);
        for n in 0..spec.rho_points {
            for xf in 0..spec.x_len() {
                let z_idx = n * spec.x_len() + xf;
                let mut total = 0.0;
                for np in 0..spec.rho_points {
                    let dr = rho[n] - rho[np];
                    for xpf in 0..spec.x_len() {
                        let mut sep = dr * dr;
                        for a in 0..d {
                            let dx = xs[xf][a] - xs[xpf][a];
                            sep += dx * dx;
                        }
                        let density =
                            field[np * spec.x_len() + xpf].norm_sqr() * weights[xpf] * drho;
                        total += (1.0 + sep / t).powi(-(n_order as i32)) * density;
                    }
                }
                acc[z_idx] += t_factor * total;
            }
        }
    }
    Ok(GProfile {
        which: GKind::GStarN,
        n_order,
        spec,
        values: acc.into_iter().map(f64::sqrt).collect(),
        t_min: q.t_min,
        t_max: q.t_max,
        time_nodes: q.len(),
    })
}

/// Error when the heat-field density leaks onto the x-box boundary.
///
/// Only the `x` margins are policed: along `rho` the data is periodic (a
/// trigonometric polynomial on the box) and the neglect of periodic images
/// is a documented property of the quadrature, not a decay assumption.
fn check_spatial_tail(
    spec: &GridSpec,
    engines: &[HeatFieldEngine],
    q: &TimeQuadrature,
) -> Result<()> {
    // Probe the mid-range time node; late times spread the most but carry
    // exponentially small amplitude.
    let probe_t = q.nodes[q.len() / 2];
    let weights = x_product_weights(spec)?;
    let xl = spec.x_len();
    let margin_x = (spec.x_points / 10).max(1);
    let mut field = vec![Complex64::new(0.0, 0.0); spec.grid_len()];
    for engine in engines {
        engine.field_into(1, probe_t, &mut field);
        let mut ring = 0.0;
        let mut total = 0.0;
        for n in 0..spec.rho_points {
            for xf in 0..xl {
                let x_edge = match spec.dim {
                    1 => xf < margin_x || xf + margin_x >= spec.x_points,
                    _ => {
                        let i1 = xf / spec.x_points;
                        let i2 = xf % spec.x_points;
                        i1 < margin_x
                            || i1 + margin_x >= spec.x_points
                            || i2 < margin_x
                            || i2 + margin_x >= spec.x_points
                    }
                };
                let density = field[n * xl + xf].norm_sqr() * weights[xf];
                total += density;
                if x_edge {
                    ring += density;
                }
            }
        }
        if total > 0.0 && ring / total > 1e-4 {
            return Err(Error::TailMass(format!(
                "heat-field density puts {:.3e} of its mass on the x-box margin",
                ring / total
            )));
        }
    }
    Ok(())
}

/// Deterministic random band-limited spectrum: coefficients are supported on
/// `|signed bin| <= bin_halfband` and `|mu| <= degree_cap`.
pub fn random_band_spectrum(
    spec: &GridSpec,
    k_max: usize,
    bin_halfband: i64,
    degree_cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<MixedSpectrum> {
    let mut s = MixedSpectrum::zeros(spec.clone(), k_max)?;
    let m_count = s.index_count();
    let degrees: Vec<usize> = s.indices().iter().map(|mu| mu.degree()).collect();
    for bin in 0..spec.rho_points {
        let i = spec.bin_to_signed(bin);
        if i.abs() > bin_halfband {
            continue;
        }
        for m in 0..m_count {
            if degrees[m] > degree_cap {
                continue;
            }
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            s.set_coeff(bin, m, v);
        }
    }
    Ok(s)
}

/// Configuration of the pointwise domination probe.
#[derive(Clone, Debug)]
pub struct DominationConfig {
    pub n_order: usize,
    pub spec: GridSpec,
    pub k_max: usize,
    pub bin_halfband: i64,
    pub degree_cap: usize,
    pub family_size: usize,
    pub seed: u64,
}

/// Empirical constant in `g_{N+1}(T_m f)(z) <= C g*_N(f)(z)` over a random
/// band-limited family, with its growth under family doubling.
///
/// Points where `g*_N(f)` falls below `1e-10` of its maximum are excluded
/// from the quotient.
pub fn pointwise_domination_probe(
    cfg: &DominationConfig,
    sym: &Symbol,
    q: &TimeQuadrature,
) -> Result<DominationReport> {
    require_calibrated(q)?;
    let cert = symbols::certify(
        sym,
        cfg.spec.tau_max(),
        cfg.k_max.max(symbols::default_order(cfg.spec.dim)),
        96,
        cfg.seed,
    )?;
    if !cert.certified_through(cfg.n_order) {
        return Err(Error::Symbol(format!(
            "symbol `{}` is not certified through order {}",
            sym.name, cfg.n_order
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let full = 2 * cfg.family_size;
    let mut family = Vec::with_capacity(full);
    for _ in 0..full {
        family.push(random_band_spectrum(
            &cfg.spec,
            cfg.k_max,
            cfg.bin_halfband,
            cfg.degree_cap,
            &mut rng,
        )?);
    }
    let transformed: Vec<MixedSpectrum> = family
        .iter()
        .map(|s| symbols::apply_symbol(s, sym))
        .collect::<Result<_>>()?;

    let star = g_star_many(cfg.n_order, &family, q)?;
    let mut constant = 0.0f64;
    let mut constant_doubled = 0.0f64;
    let mut excluded = 0usize;
    let mut included = 0usize;
    for (fi, ts) in transformed.iter().enumerate() {
        let g_plus = g_function_from_spectrum(cfg.n_order + 1, ts, q)?;
        let floor = star[fi].max_value() * 1e-10;
        for (num, den) in g_plus.values.iter().zip(&star[fi].values) {
            if *den < floor {
                excluded += 1;
                continue;
            }
            included += 1;
            let ratio = num / den;
            if fi < cfg.family_size {
                constant = constant.max(ratio);
            }
            constant_doubled = constant_doubled.max(ratio);
        }
    }
    if included == 0 {
        return Err(Error::Domain(
            "domination probe: every point fell below the denominator floor".into(),
        ));
    }
    let constant_doubled = constant_doubled.max(constant);
    Ok(DominationReport {
        symbol: sym.name.clone(),
        n_order: cfg.n_order,
        dim: cfg.spec.dim,
        family_size: cfg.family_size,
        constant,
        constant_doubled,
        growth: constant_doubled / constant,
        excluded_fraction: excluded as f64 / (excluded + included) as f64,
        seed: cfg.seed,
    })
}

/// Configuration of the Littlewood-Paley norm-equivalence probe.
#[derive(Clone, Debug)]
pub struct LpProbeConfig {
    pub spec: GridSpec,
    pub k_max: usize,
    pub bin_halfband: i64,
    pub degree_cap: usize,
    pub family_size: usize,
    pub p_list: Vec<f64>,
    pub normalized: bool,
    pub seed: u64,
}

/// Ratios `|| (sum_j |block_j f|^2)^{1/2} ||_p / ||f||_p` over a random
/// band-limited family, for each p, with the family-doubling bands.
pub fn lp_equivalence_probe(cfg: &LpProbeConfig) -> Result<LpEquivalenceReport> {
    let spec = &cfg.spec;
    let lambda_max = spec.tau_max().powi(2) + 2.0 * cfg.degree_cap as f64 + spec.dim as f64;
    let blocks = symbols::blocks_covering(lambda_max);
    let block_syms: Vec<Symbol> = (0..=blocks)
        .map(|j| {
            if cfg.normalized {
                symbols::lp_block_normalized(j, spec.dim)
            } else {
                symbols::lp_block(j, spec.dim)
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let full = 2 * cfg.family_size;
    let mut ratios: Vec<Vec<f64>> = vec![Vec::with_capacity(full); cfg.p_list.len()];
    for _ in 0..full {
        let s = random_band_spectrum(spec, cfg.k_max, cfg.bin_halfband, cfg.degree_cap, &mut rng)?;
        let f = synthesize(&s)?;
        // Square function over the grid.
        let mut sq = vec![0.0f64; spec.grid_len()];
        for sym in &block_syms {
            let piece = synthesize(&symbols::apply_symbol(&s, sym)?)?;
            for (a, v) in sq.iter_mut().zip(&piece.values) {
                *a += v.norm_sqr();
            }
        }
        let sfun = GridFunction::new(
            spec.clone(),
            sq.into_iter()
                .map(|v| Complex64::new(v.sqrt(), 0.0))
                .collect(),
        )?;
        for (pi, &p) in cfg.p_list.iter().enumerate() {
            ratios[pi].push(sfun.norm_lp(p)? / f.norm_lp(p)?);
        }
    }

    let bands = cfg
        .p_list
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            let base = &ratios[pi][..cfg.family_size];
            let all = &ratios[pi][..];
            LpBand {
                p,
                ratio_min: base.iter().cloned().fold(f64::INFINITY, f64::min),
                ratio_max: base.iter().cloned().fold(0.0, f64::max),
                ratio_min_doubled: all.iter().cloned().fold(f64::INFINITY, f64::min),
                ratio_max_doubled: all.iter().cloned().fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(LpEquivalenceReport {
        dim: spec.dim,
        family_size: cfg.family_size,
        blocks,
        normalized: cfg.normalized,
        bands,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::XRule;
    use crate::hermite::eval_hermite_1d;
    use approx::assert_relative_eq;

    fn test_spec() -> GridSpec {
        GridSpec::new(8.0, 32, 8.0, 48, 1, XRule::UniformTrapezoid).unwrap()
    }

    fn calibrated_rule(spec: &GridSpec, k_max: usize, max_order: usize) -> TimeQuadrature {
        let lam_hi = spec.tau_max().powi(2) + 2.0 * k_max as f64 + spec.dim as f64;
        TimeQuadrature::calibrated_for(max_order, (spec.dim as f64, lam_hi)).unwrap()
    }

    #[test]
    fn quadrature_calibration_gate() {
        // The standard rule fails at high eigenvalues (head truncation)...
        let std_rule = TimeQuadrature::standard();
        assert!(std_rule.calibration_defect(1, 100.0) > CALIBRATION_TOL);
        assert!(std_rule.calibration_defect(1, 2.0) < CALIBRATION_TOL);
        // ...and the calibrated constructor fixes t_min accordingly.
        let rule = TimeQuadrature::calibrated_for(3, (1.0, 150.0)).unwrap();
        assert!(rule.is_calibrated());
        for &lam in &[1.0, 7.0, 40.0, 150.0] {
            for n in 1..=3 {
                assert!(rule.calibration_defect(n, lam) < CALIBRATION_TOL);
            }
        }
        assert_relative_eq!(gamma_reference(1), 0.25, epsilon = 1e-15);
        assert_relative_eq!(gamma_reference(2), 0.375, epsilon = 1e-15);
        assert_relative_eq!(gamma_reference(3), 1.875, epsilon = 1e-15);
    }

    #[test]
    fn uncalibrated_rule_is_rejected() {
        let spec = test_spec();
        let s = MixedSpectrum::zeros(spec.clone(), 4).unwrap();
        let f = synthesize(&s).unwrap();
        let raw = TimeQuadrature::standard();
        assert!(matches!(
            g_function(1, &f, &raw, 4),
            Err(Error::Uncalibrated(_))
        ));
    }

    #[test]
    fn heat_field_matches_engine_and_finite_differences() {
        let spec = test_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_band_spectrum(&spec, 8, 6, 8, &mut rng).unwrap();
        let t = 0.37;

        let direct = heat_time_derivative_field(2, t, &s).unwrap();
        let engine = HeatFieldEngine::new(&s).unwrap();
        let mut buf = vec![Complex64::new(0.0, 0.0); spec.grid_len()];
        engine.field_into(2, t, &mut buf);
        let max_err = direct
            .values
            .iter()
            .zip(&buf)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-11, "engine/synthesize mismatch {max_err}");

        // N=1 field vs Richardson differences of the N=0 field in t.
        let f1 = heat_time_derivative_field(1, t, &s).unwrap();
        let h = t * 0.03;
        let probe = |tt: f64| heat_time_derivative_field(0, tt, &s).unwrap();
        let level = |h: f64| {
            let (fp, fm) = (probe(t + h), probe(t - h));
            move |i: usize| (fp.values[i] - fm.values[i]) / (2.0 * h)
        };
        let (l1, l2, l3) = (level(h), level(h / 2.0), level(h / 4.0));
        let mut max_rel = 0.0f64;
        for i in (0..f1.values.len()).step_by(31) {
            let r1 = (l2(i) * 4.0 - l1(i)) / 3.0;
            let r2 = (l3(i) * 4.0 - l2(i)) / 3.0;
            let fd = (r2 * 16.0 - r1) / 15.0;
            let denom = f1.values[i].norm().max(1e-8);
            max_rel = max_rel.max((fd - f1.values[i]).norm() / denom);
        }
        assert!(max_rel < 1e-7, "N=1 field vs finite differences {max_rel}");

        // Semigroup continuity: N=0 at small t on a band-limited f.
        let f0 = heat_time_derivative_field(0, 1e-6, &s).unwrap();
        let f_ref = synthesize(&s).unwrap();
        let rel: f64 = f0
            .values
            .iter()
            .zip(&f_ref.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(rel < 1e-3);
    }

    #[test]
    fn eigenfunction_field_is_diagonal() {
        let spec = test_spec();
        let mut s = MixedSpectrum::zeros(spec.clone(), 4).unwrap();
        let bin = spec.signed_to_bin(3).unwrap();
        s.set_coeff(bin, 0, Complex64::new(1.0, 0.0));
        let lam = s.lambda(bin, 0);
        let t = 0.8;
        let field = heat_time_derivative_field(2, t, &s).unwrap();
        let base = synthesize(&s).unwrap();
        let factor = lam * lam * (-t * lam).exp();
        for i in (0..field.values.len()).step_by(53) {
            assert!((field.values[i] - base.values[i] * factor).norm() < 1e-12);
        }
    }

    /// Eigenfunction: the time integral factors and gives exactly
    /// `2^{-2N} Gamma(2N) |f(z)|^2` pointwise.
    #[test]
    fn g_function_on_eigenfunction() {
        let spec = test_spec();
        let mut s = MixedSpectrum::zeros(spec.clone(), 4).unwrap();
        let bin = spec.signed_to_bin(2).unwrap();
        s.set_coeff(bin, 1, Complex64::new(0.7, -0.2));
        let q = calibrated_rule(&spec, 4, 2);
        let f = synthesize(&s).unwrap();
        for n_order in [1usize, 2] {
            let prof = g_function_from_spectrum(n_order, &s, &q).unwrap();
            let c = gamma_reference(n_order).sqrt();
            let mut max_rel = 0.0f64;
            for i in (0..prof.values.len()).step_by(17) {
                let want = c * f.values[i].norm();
                if want > 1e-10 {
                    max_rel = max_rel.max((prof.values[i] - want).abs() / want);
                }
            }
            assert!(max_rel < 1e-6, "N={n_order}: pointwise defect {max_rel}");
        }

        // Zero input stays zero.
        let zero = MixedSpectrum::zeros(spec, 4).unwrap();
        let prof = g_function_from_spectrum(1, &zero, &q).unwrap();
        assert_eq!(prof.max_value(), 0.0);
    }

    /// L2 identity: ||g_N f||^2 / ||f||^2 = 2^{-2N} Gamma(2N).
    #[test]
    fn g_function_l2_identity() {
        let spec = test_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let q = calibrated_rule(&spec, 10, 3);
        for n_order in 1..=3usize {
            let s = random_band_spectrum(&spec, 10, 8, 10, &mut rng).unwrap();
            let f = synthesize(&s).unwrap();
            let prof = g_function_from_spectrum(n_order, &s, &q).unwrap();
            let ratio = prof.norm_l2().unwrap().powi(2) / f.norm_l2().unwrap().powi(2);
            let want = gamma_reference(n_order);
            assert_relative_eq!(ratio, want, max_relative = 1e-3);
        }
    }

    #[test]
    fn g_function_scales_linearly() {
        let spec = test_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = random_band_spectrum(&spec, 6, 5, 6, &mut rng).unwrap();
        let q = calibrated_rule(&spec, 6, 1);
        let base = g_function_from_spectrum(1, &s, &q).unwrap();
        let mut scaled = s.clone();
        for v in scaled.coeffs_mut() {
            *v *= 3.5;
        }
        let prof = g_function_from_spectrum(1, &scaled, &q).unwrap();
        for (a, b) in prof.values.iter().zip(&base.values) {
            assert!((a - 3.5 * b).abs() <= 1e-12 + 1e-12 * a.abs());
        }
    }

    #[test]
    fn g_star_fft_matches_direct_sum() {
        let spec = GridSpec::new(5.0, 16, 6.0, 16, 1, XRule::UniformTrapezoid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_band_spectrum(&spec, 5, 4, 5, &mut rng).unwrap();
        let q = TimeQuadrature::log_spaced(1e-5, 30.0, 130)
            .unwrap()
            .calibrate(2, (1.0, 45.0))
            .unwrap();
        let via_fft = g_star_many(2, std::slice::from_ref(&s), &q)
            .unwrap()
            .pop()
            .unwrap();
        let direct = g_star_direct(2, &s, &q).unwrap();
        let mut max_rel = 0.0f64;
        let scale = direct.max_value();
        for (a, b) in via_fft.values.iter().zip(&direct.values) {
            max_rel = max_rel.max((a - b).abs() / scale);
        }
        assert!(max_rel < 1e-10, "fft/direct g* mismatch {max_rel}");
    }

    #[test]
    fn g_star_monotone_in_weight_order() {
        let spec = test_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let s = random_band_spectrum(&spec, 6, 5, 6, &mut rng).unwrap();
        let q = calibrated_rule(&spec, 6, 2);
        let g1 = g_star_many(1, std::slice::from_ref(&s), &q)
            .unwrap()
            .pop()
            .unwrap();
        let g2 = g_star_many(2, std::slice::from_ref(&s), &q)
            .unwrap()
            .pop()
            .unwrap();
        for (a, b) in g2.values.iter().zip(&g1.values) {
            assert!(a <= &(b * (1.0 + 1e-12) + 1e-15));
        }
    }

    /// Concentrated data: g* with weight ~1 near the bulk dominates a
    /// multiple of g_1 there.
    #[test]
    fn g_star_dominates_g1_for_concentrated_data() {
        let spec = test_spec();
        let mut s = MixedSpectrum::zeros(spec.clone(), 2).unwrap();
        let bin = spec.signed_to_bin(0).unwrap();
        s.set_coeff(bin, 0, Complex64::new(1.0, 0.0));
        let q = calibrated_rule(&spec, 2, 2);
        let g1 = g_function_from_spectrum(1, &s, &q).unwrap();
        let gs = g_star_many(1, std::slice::from_ref(&s), &q)
            .unwrap()
            .pop()
            .unwrap();
        // Compare at the grid center.
        let center = (spec.rho_points / 2) * spec.x_len() + spec.x_points / 2;
        assert!(gs.values[center] > 0.05 * g1.values[center]);
    }

    #[test]
    fn semigroup_symbol_commutation() {
        // heat(t) then symbol then heat(s) equals symbol then heat(t+s).
        let spec = test_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let s = random_band_spectrum(&spec, 6, 5, 6, &mut rng).unwrap();
        let sym = symbols::parse_symbol("imaginary-power:gamma=1", 1).unwrap();
        let heat_a = symbols::parse_symbol("heat:t=0.3", 1).unwrap();
        let heat_b = symbols::parse_symbol("heat:t=0.5", 1).unwrap();
        let heat_ab = symbols::parse_symbol("heat:t=0.8", 1).unwrap();
        let lhs = symbols::apply_symbol(
            &symbols::apply_symbol(&symbols::apply_symbol(&s, &heat_a).unwrap(), &sym).unwrap(),
            &heat_b,
        )
        .unwrap();
        let rhs =
            symbols::apply_symbol(&symbols::apply_symbol(&s, &sym).unwrap(), &heat_ab).unwrap();
        let defect = lhs
            .coeffs()
            .iter()
            .zip(rhs.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(defect < 1e-12);
    }

    #[test]
    fn domination_probe_identity_symbol() {
        let spec = GridSpec::new(6.0, 32, 7.0, 32, 1, XRule::UniformTrapezoid).unwrap();
        let q = calibrated_rule(&spec, 8, 3);
        let cfg = DominationConfig {
            n_order: 2,
            spec: spec.clone(),
            k_max: 8,
            bin_halfband: 6,
            degree_cap: 8,
            family_size: 2,
            seed: 23,
        };
        let one = symbols::parse_symbol("one", 1).unwrap();
        let report = pointwise_domination_probe(&cfg, &one, &q).unwrap();
        assert!(report.constant.is_finite() && report.constant > 0.0);
        assert!(report.growth >= 1.0);
        assert!(report.excluded_fraction < 0.5);
    }

    #[test]
    fn lp_probe_p2_exactness() {
        let spec = GridSpec::new(6.0, 32, 7.0, 40, 1, XRule::UniformTrapezoid).unwrap();
        let cfg = LpProbeConfig {
            spec,
            k_max: 8,
            bin_halfband: 6,
            degree_cap: 8,
            family_size: 3,
            p_list: vec![2.0],
            normalized: true,
            seed: 3,
        };
        let report = lp_equivalence_probe(&cfg).unwrap();
        let band = &report.bands[0];
        assert!((band.ratio_min_doubled - 1.0).abs() < 1e-6);
        assert!((band.ratio_max_doubled - 1.0).abs() < 1e-6);
    }

    /// Single-block data: the square function collapses to |f| pointwise.
    #[test]
    fn lp_single_block_input() {
        let spec = GridSpec::new(6.0, 32, 7.0, 40, 1, XRule::UniformTrapezoid).unwrap();
        // One eigenfunction inside the band of block j: pick lambda with
        // sqrt(lambda) in [3/8 2^j, 3/4 2^j) for j = 3: [3, 6).
        let mut s = MixedSpectrum::zeros(spec.clone(), 8).unwrap();
        let bin = spec.signed_to_bin(4).unwrap();
        let m = 6; // mu = 6 -> lambda = tau^2 + 13
        let lam = s.lambda(bin, m);
        assert!(lam.sqrt() >= 3.0 && lam.sqrt() < 6.0);
        s.set_coeff(bin, m, Complex64::new(1.0, 0.0));
        let f = synthesize(&s).unwrap();
        let block = symbols::lp_block_normalized(3, 1);
        let piece = synthesize(&symbols::apply_symbol(&s, &block).unwrap()).unwrap();
        for (a, b) in piece.values.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn probe_reports_are_deterministic() {
        let spec = GridSpec::new(6.0, 32, 7.0, 32, 1, XRule::UniformTrapezoid).unwrap();
        let cfg = LpProbeConfig {
            spec,
            k_max: 6,
            bin_halfband: 5,
            degree_cap: 6,
            family_size: 2,
            p_list: vec![1.5, 2.0],
            normalized: true,
            seed: 8,
        };
        let a = crate::report::to_json(&lp_equivalence_probe(&cfg).unwrap());
        let b = crate::report::to_json(&lp_equivalence_probe(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn profile_csv_shape() {
        let spec = GridSpec::new(4.0, 8, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap();
        let s = MixedSpectrum::zeros(spec.clone(), 2).unwrap();
        let q = TimeQuadrature::log_spaced(1e-5, 30.0, 60)
            .unwrap()
            .calibrate(1, (1.0, 20.0))
            .unwrap();
        let prof = g_function_from_spectrum(1, &s, &q).unwrap();
        let mut buf = Vec::new();
        prof.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rho,x1,value\n"));
        assert_eq!(text.lines().count(), 1 + spec.grid_len());
    }
}
