//! Closed-form heat kernel of the partial harmonic oscillator, its
//! polylogarithm-based time-derivative calculus, multiplier kernels, and
//! sampled verification of the associated decay bounds.
//!
//! The kernel of `exp(-tH)` factors as a Gaussian in `rho` times a
//! Mehler-type kernel in `x`:
//!
//! ```text
//! K(t,z,z') = 2^{-(d+2)/2} pi^{-(d+1)/2} t^{-1/2} (sinh 2t)^{-d/2} e^{-B},
//! B(t,z,z') = (2 coth 2t - tanh t)/4 |x-x'|^2
//!           + tanh(t)/4 |x+x'|^2 + (rho-rho')^2/(4t).
//! ```
//!
//! Time derivatives of `coth`/`tanh` reduce to negative-order
//! polylogarithms, which are rational functions with Eulerian-number
//! coefficients; `d^N K / dt^N` itself is evaluated by Richardson-extrapolated
//! finite differences (the closed forms above validate the pieces).

use crate::error::{Error, Result};
use crate::grids::gauss_legendre_on;
use crate::hermite::{hermite_values_up_to, projection_kernel, DEFAULT_SHELL_BUDGET};
use crate::report::{ArgMax, BoundReport, MtIntegralCase, MtIntegralReport};
use crate::symbols::Symbol;
use num_complex::Complex64;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Exponent magnitude beyond which kernel values are handled in log space.
const LOG_SPACE_THRESHOLD: f64 = 600.0;

/// A `(t, z, z')` evaluation point with `z = (rho, x)` in d+1 coordinates.
#[derive(Clone, Debug)]
pub struct HeatKernelParams {
    pub t: f64,
    pub z: Vec<f64>,
    pub z_prime: Vec<f64>,
}

impl HeatKernelParams {
    pub fn new(t: f64, z: Vec<f64>, z_prime: Vec<f64>) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
        }
        if z.len() != z_prime.len() || z.len() < 2 {
            return Err(Error::Shape(format!(
                "points need equal length >= 2, got {} and {}",
                z.len(),
                z_prime.len()
            )));
        }
        if z.iter().chain(&z_prime).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinates".into()));
        }
        Ok(HeatKernelParams { t, z, z_prime })
    }

    pub fn dim(&self) -> usize {
        self.z.len() - 1
    }

    fn delta_rho(&self) -> f64 {
        self.z[0] - self.z_prime[0]
    }

    fn x_parts(&self) -> (&[f64], &[f64]) {
        (&self.z[1..], &self.z_prime[1..])
    }
}

/// The exponent `B(t,z,z')` split into its three coefficients.
#[derive(Clone, Copy, Debug)]
pub struct BDecomposition {
    /// `(2 coth 2t - tanh t) / 4`, multiplying `|x-x'|^2`.
    pub coeff_diff: f64,
    /// `tanh(t) / 4`, multiplying `|x+x'|^2`.
    pub coeff_sum: f64,
    /// `1 / (4t)`, multiplying `(rho-rho')^2`.
    pub coeff_rho: f64,
    pub value: f64,
}

impl BDecomposition {
    pub fn compute(p: &HeatKernelParams) -> Self {
        let t = p.t;
        let coeff_diff = (2.0 / (2.0 * t).tanh() - t.tanh()) / 4.0;
        let coeff_sum = t.tanh() / 4.0;
        let coeff_rho = 1.0 / (4.0 * t);
        let (x, xp) = p.x_parts();
        let diff_sq: f64 = x.iter().zip(xp).map(|(a, b)| (a - b) * (a - b)).sum();
        let sum_sq: f64 = x.iter().zip(xp).map(|(a, b)| (a + b) * (a + b)).sum();
        let dr = p.delta_rho();
        BDecomposition {
            coeff_diff,
            coeff_sum,
            coeff_rho,
            value: coeff_diff * diff_sq + coeff_sum * sum_sq + coeff_rho * dr * dr,
        }
    }
}

/// `ln K(t,z,z')`; finite for every valid input, so relative comparisons
/// survive even where the plain value underflows.
pub fn heat_kernel_log(p: &HeatKernelParams) -> Result<f64> {
    let d = p.dim() as f64;
    let t = p.t;
    let b = BDecomposition::compute(p);
    Ok(-(d + 2.0) / 2.0 * 2.0f64.ln()
        - (d + 1.0) / 2.0 * PI.ln()
        - 0.5 * t.ln()
        - d / 2.0 * (2.0 * t).sinh().ln()
        - b.value)
}

/// The heat kernel `K(t,z,z')`. Underflows gracefully to 0 for exponents
/// beyond the log-space threshold.
pub fn heat_kernel(p: &HeatKernelParams) -> Result<f64> {
    let lk = heat_kernel_log(p)?;
    if lk < -LOG_SPACE_THRESHOLD {
        return Ok(lk.exp()); // subnormal or zero; log form is authoritative
    }
    Ok(lk.exp())
}

/// Truncated spectral representation
/// `(4 pi t)^{-1/2} e^{-(rho-rho')^2/(4t)} sum_{k<=K} e^{-t(2k+d)} Phi_k(x,x')`
/// (the Gaussian `tau`-integral is done analytically per level).
pub fn heat_kernel_spectral_sum(p: &HeatKernelParams, k_max: usize) -> Result<f64> {
    let d = p.dim();
    let t = p.t;
    let dr = p.delta_rho();
    let gauss = (4.0 * PI * t).powf(-0.5) * (-dr * dr / (4.0 * t)).exp();
    let (x, xp) = p.x_parts();
    let mut series = 0.0;
    for k in 0..=k_max {
        series += (-t * (2.0 * k as f64 + d as f64)).exp()
            * projection_kernel(k, x, xp, DEFAULT_SHELL_BUDGET)?;
    }
    Ok(gauss * series)
}

// --- Polylogarithms of negative integer order --------------------------------

/// `Li_{-N}` value at a real argument.
#[derive(Clone, Copy, Debug)]
pub struct PolylogValue {
    /// The (nonpositive) order, stored as `-N`.
    pub order: i64,
    pub argument: f64,
    pub value: f64,
}

const POLYLOG_MAX_ORDER: usize = 30;

/// Eulerian numbers `A(n, j)` for `0 <= j <= n-1` (row `n >= 1`).
fn eulerian_row(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for m in 2..=n {
        let mut next = vec![0u128; m];
        for (j, item) in next.iter_mut().enumerate() {
            let from_same = if j < row.len() {
                (j as u128 + 1) * row[j]
            } else {
                0
            };
            let from_prev = if j >= 1 && j - 1 < row.len() {
                (m as u128 - j as u128) * row[j - 1]
            } else {
                0
            };
            *item = from_same + from_prev;
        }
        row = next;
    }
    row
}

/// `Li_{-N}(z)` by exact rational evaluation: the numerator polynomial has
/// Eulerian-number coefficients over `(1-z)^{N+1}`.
pub fn polylog_neg(order: usize, z: f64) -> Result<f64> {
    if order > POLYLOG_MAX_ORDER {
        return Err(Error::Budget(format!(
            "polylog order {order} beyond cap {POLYLOG_MAX_ORDER}"
        )));
    }
    if !z.is_finite() || (z - 1.0).abs() < 1e-9 {
        return Err(Error::Domain(format!(
            "polylog argument {z} too close to 1"
        )));
    }
    if order == 0 {
        return Ok(z / (1.0 - z));
    }
    let coeffs = eulerian_row(order);
    if z.abs() <= 2.0 {
        // numerator sum_j A(n,j) z^{n-j}, Horner from the top power.
        let mut num = 0.0f64;
        for &a in &coeffs {
            num = num * z + a as f64;
        }
        num *= z; // lowest power is z^1
        Ok(num / (1.0 - z).powi(order as i32 + 1))
    } else {
        // Scaled form for large |z|: (z/(1-z))^{n+1} sum_j A(n,j) z^{-j-1}.
        let ratio = z / (1.0 - z);
        let mut sum = 0.0f64;
        let mut zpow = 1.0 / z;
        for &a in &coeffs {
            sum += a as f64 * zpow;
            zpow /= z;
        }
        Ok(ratio.powi(order as i32 + 1) * sum)
    }
}

pub fn polylog_value(order: usize, z: f64) -> Result<PolylogValue> {
    Ok(PolylogValue {
        order: -(order as i64),
        argument: z,
        value: polylog_neg(order, z)?,
    })
}

/// `d^N coth(t) / dt^N = (-1)^N 2^{N+1} Li_{-N}(e^{-2t})` for `N >= 1`.
pub fn coth_derivative(order: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "coth derivative needs t > 0, got {t}"
        )));
    }
    if order == 0 {
        return Ok(1.0 / t.tanh());
    }
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * 2.0f64.powi(order as i32 + 1) * polylog_neg(order, (-2.0 * t).exp())?)
}

/// `d^N tanh(t) / dt^N = -2^{N+1} Li_{-N}(-e^{2t})` for `N >= 1`.
pub fn tanh_derivative(order: usize, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain("tanh derivative at non-finite t".into()));
    }
    if order == 0 {
        return Ok(t.tanh());
    }
    if t.abs() > 300.0 {
        // The polylog argument overflows; the derivative itself has decayed
        // below representability.
        return Ok(0.0);
    }
    Ok(-(2.0f64.powi(order as i32 + 1)) * polylog_neg(order, -(2.0 * t).exp())?)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// `d^N B / dt^N` for `N >= 1`, assembled from the closed forms:
/// the `|x-x'|^2` and `|x+x'|^2` coefficients via `coth`/`tanh` derivatives,
/// the `rho` term exactly as `(-1)^N N!/4 (rho-rho')^2 / t^{N+1}`.
pub fn b_time_derivative(order: usize, p: &HeatKernelParams) -> Result<f64> {
    if order == 0 {
        return Err(Error::Domain(
            "b_time_derivative: order 0 is BDecomposition::value".into(),
        ));
    }
    let t = p.t;
    // d^N/dt^N coth(2t) = 2^N coth^{(N)}(2t).
    let coth_part = 2.0f64.powi(order as i32) * coth_derivative(order, 2.0 * t)?;
    let tanh_part = tanh_derivative(order, t)?;
    let (x, xp) = p.x_parts();
    let diff_sq: f64 = x.iter().zip(xp).map(|(a, b)| (a - b) * (a - b)).sum();
    let sum_sq: f64 = x.iter().zip(xp).map(|(a, b)| (a + b) * (a + b)).sum();
    let dr = p.delta_rho();
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    let rho_term = sign * factorial(order) / 4.0 * dr * dr / t.powi(order as i32 + 1);
    Ok(0.25 * (2.0 * coth_part - tanh_part) * diff_sq + 0.25 * tanh_part * sum_sq + rho_term)
}

const MAX_KERNEL_DERIVATIVE: usize = 8;

/// `d^N K / dt^N` by Richardson-extrapolated central differences with the
/// step scaled to `t`. Exact closed forms back the `N = 0, 1` cases in tests;
/// the symbolic product expansion is deliberately not implemented.
pub fn heat_kernel_time_derivative(order: usize, p: &HeatKernelParams) -> Result<f64> {
    if order == 0 {
        return heat_kernel(p);
    }
    if order > MAX_KERNEL_DERIVATIVE {
        return Err(Error::Budget(format!(
            "kernel time derivative order {order} beyond cap {MAX_KERNEL_DERIVATIVE}"
        )));
    }
    let value_at = |t: f64| -> Result<f64> {
        heat_kernel(&HeatKernelParams {
            t,
            z: p.z.clone(),
            z_prime: p.z_prime.clone(),
        })
    };
    richardson_derivative(value_at, p.t, order)
}

/// Richardson extrapolation over iterated central differences; the base step
/// keeps every evaluation point above `0.85 t`.
fn richardson_derivative<F>(f: F, t: f64, order: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    richardson_derivative_with(f, t, order, t * 0.25 / (order as f64 + 1.0), 2)
}

/// Richardson table over the step ladder `h0, h0/2, ..., h0/2^levels`.
pub fn richardson_derivative_with<F>(
    f: F,
    x: f64,
    order: usize,
    h0: f64,
    levels: usize,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let stencil = |h: f64| -> Result<f64> {
        let mut acc = 0.0;
        for j in 0..=order {
            let sign = if (order - j) % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = sign * binomial_f64(order, j);
            acc += coeff * f(x + (j as f64 - order as f64 / 2.0) * h)?;
        }
        Ok(acc / h.powi(order as i32))
    };
    let mut vals = Vec::with_capacity(levels + 1);
    for l in 0..=levels {
        vals.push(stencil(h0 / 2.0f64.powi(l as i32))?);
    }
    let mut factor = 4.0;
    while vals.len() > 1 {
        vals = vals
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    Ok(vals[0])
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let mut v = 1.0f64;
    for j in 0..k.min(n - k) {
        v = v * (n - j) as f64 / (j + 1) as f64;
    }
    v
}

// --- Sampled kernel-bound verification ---------------------------------------

/// Configuration of the sampled kernel-decay probe.
#[derive(Clone, Debug)]
pub struct KernelBoundConfig {
    pub n_order: usize,
    pub dim: usize,
    pub samples: usize,
    pub t_range: (f64, f64),
    /// Coordinates of `z` and `z'` are drawn from `[-hw, hw]`.
    pub z_halfwidth: f64,
    /// Probe the gradient bound (one extra spatial derivative) instead.
    pub gradient: bool,
    pub seed: u64,
}

/// Latin hypercube in `[0,1)^dims`, deterministic in the seed.
fn latin_hypercube(samples: usize, dims: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(dims);
    for _ in 0..dims {
        let mut strata: Vec<usize> = (0..samples).collect();
        strata.shuffle(rng);
        columns.push(
            strata
                .into_iter()
                .map(|s| (s as f64 + rng.gen_range(0.0..1.0)) / samples as f64)
                .collect(),
        );
    }
    (0..samples)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect()
}

/// Sampled supremum of `|d_t^N K| t^{(d+1)/2+N} exp(|z-z'|^2/(16t))` (or the
/// gradient variant with `t^{(d+2)/2+N}`) over a Latin hypercube.
pub fn verify_kernel_bound(cfg: &KernelBoundConfig) -> Result<BoundReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dims = 1 + 2 * (cfg.dim + 1);
    let points = latin_hypercube(cfg.samples, dims, &mut rng);
    let (t_lo, t_hi) = cfg.t_range;
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::Domain(format!("bad t range [{t_lo}, {t_hi}]")));
    }
    let power = if cfg.gradient {
        (cfg.dim as f64 + 2.0) / 2.0 + cfg.n_order as f64
    } else {
        (cfg.dim as f64 + 1.0) / 2.0 + cfg.n_order as f64
    };

    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = ArgMax {
        t: t_lo,
        z: vec![0.0; cfg.dim + 1],
        z_prime: vec![0.0; cfg.dim + 1],
    };
    for u in &points {
        let t = t_lo * (t_hi / t_lo).powf(u[0]);
        let z: Vec<f64> = (0..cfg.dim + 1)
            .map(|a| (2.0 * u[1 + a] - 1.0) * cfg.z_halfwidth)
            .collect();
        let z_prime: Vec<f64> = (0..cfg.dim + 1)
            .map(|a| (2.0 * u[2 + cfg.dim + a] - 1.0) * cfg.z_halfwidth)
            .collect();
        let p = HeatKernelParams::new(t, z.clone(), z_prime.clone())?;
        // Values below the log-space threshold cannot influence the
        // supremum: the Gaussian majorant beats the probe weight.
        if heat_kernel_log(&p)? < -LOG_SPACE_THRESHOLD {
            continue;
        }
        let magnitude = if cfg.gradient {
            kernel_derivative_gradient_norm(cfg.n_order, &p)?
        } else {
            heat_kernel_time_derivative(cfg.n_order, &p)?.abs()
        };
        let sep_sq: f64 =
            p.z.iter()
                .zip(&p.z_prime)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        let log_ratio =
            magnitude.max(f64::MIN_POSITIVE).ln() + power * t.ln() + sep_sq / (16.0 * t);
        let ratio = log_ratio.exp();
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = ArgMax { t, z, z_prime };
        }
    }
    Ok(BoundReport {
        bound_name: if cfg.gradient {
            format!("gradient-kernel-bound:N={}", cfg.n_order)
        } else {
            format!("kernel-bound:N={}", cfg.n_order)
        },
        n_order: cfg.n_order,
        dim: cfg.dim,
        samples: cfg.samples,
        max_ratio,
        argmax,
        seed: cfg.seed,
    })
}

/// Euclidean norm of the z-gradient of `d_t^N K`, by central differences.
fn kernel_derivative_gradient_norm(order: usize, p: &HeatKernelParams) -> Result<f64> {
    let h = 1e-4 * (1.0 + p.z.iter().map(|v| v.abs()).fold(0.0, f64::max));
    let mut total = 0.0;
    for axis in 0..p.z.len() {
        let mut zp = p.z.clone();
        zp[axis] += h;
        let mut zm = p.z.clone();
        zm[axis] -= h;
        let plus = heat_kernel_time_derivative(
            order,
            &HeatKernelParams::new(p.t, zp, p.z_prime.clone())?,
        )?;
        let minus = heat_kernel_time_derivative(
            order,
            &HeatKernelParams::new(p.t, zm, p.z_prime.clone())?,
        )?;
        let g = (plus - minus) / (2.0 * h);
        total += g * g;
    }
    Ok(total.sqrt())
}

// --- Multiplier kernel M_t ----------------------------------------------------

/// Number of Gauss-Legendre nodes resolving `e^{i tau dr} e^{-t tau^2}` on
/// `[-T, T]`.
fn tau_node_count(big_t: f64, dr: f64) -> usize {
    let n = 64.0 + 0.75 * big_t * (dr.abs() + 1.5);
    (n.ceil() as usize).min(600)
}

/// Kernel of `e^{-tH} T_m`:
/// `M_t(z,z') = (2 pi)^{-1} sum_{k<=K} int e^{i tau (rho-rho')}
/// e^{-t(tau^2+2k+d)} m(tau,k) Phi_k(x,x') dtau`,
/// the `tau`-integral truncated to `[-T, T]`, `T = sqrt(40/t)`.
pub fn multiplier_kernel(
    t: f64,
    z: &[f64],
    z_prime: &[f64],
    sym: &Symbol,
    k_max: usize,
) -> Result<Complex64> {
    mt_time_derivative(0, t, z, z_prime, sym, k_max)
}

/// `d^N M_t / dt^N`, computed spectrally (each mode picks up `(-lambda)^N`).
pub fn mt_time_derivative(
    n_order: usize,
    t: f64,
    z: &[f64],
    z_prime: &[f64],
    sym: &Symbol,
    k_max: usize,
) -> Result<Complex64> {
    let p = HeatKernelParams::new(t, z.to_vec(), z_prime.to_vec())?;
    let d = p.dim();
    if d != sym.dim {
        return Err(Error::Shape(format!(
            "symbol dimension {} vs point dimension {d}",
            sym.dim
        )));
    }
    let dr = p.delta_rho();
    let big_t = (40.0 / t).sqrt();
    let rule = gauss_legendre_on(-big_t, big_t, tau_node_count(big_t, dr))?;
    let (x, xp) = p.x_parts();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..=k_max {
        let phi = projection_kernel(k, x, xp, DEFAULT_SHELL_BUDGET)?;
        if phi == 0.0 {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&tau, &w) in rule.nodes.iter().zip(&rule.weights) {
            let lam = tau * tau + 2.0 * k as f64 + d as f64;
            let sign_lam = (-lam).powi(n_order as i32);
            let mv = sym.eval(tau, k);
            if !mv.re.is_finite() || !mv.im.is_finite() {
                return Err(Error::Symbol(format!(
                    "symbol `{}` non-finite at (tau={tau}, k={k})",
                    sym.name
                )));
            }
            acc += Complex64::from_polar(1.0, tau * dr) * mv * (w * sign_lam * (-t * lam).exp());
        }
        total += acc * phi;
    }
    Ok(total / (2.0 * PI))
}

// --- Multiplier-kernel integral bounds ----------------------------------------

#[derive(Clone, Debug)]
pub struct MtIntegralConfig {
    pub n_order: usize,
    pub dim: usize,
    pub k_max: usize,
    pub t_list: Vec<f64>,
    pub z_list: Vec<Vec<f64>>,
    /// z' grid resolution per axis.
    pub rho_points: usize,
    pub x_points: usize,
    /// z' box halfwidths (rho centered at z, x centered at origin).
    pub rho_halfwidth: f64,
    pub x_halfwidth: f64,
}

/// Grid quadrature of `int |z'-z|^{2N} |d_t^N M_t(z,z')|^2 dz'` and its
/// `(1+|z'-z|^2/t)^N`-weighted variant, reported against `t^{-(d+1)/2-N}`
/// and `t^{-(d+1)/2-2N}` respectively.
pub fn verify_mt_integral_bound(cfg: &MtIntegralConfig, sym: &Symbol) -> Result<MtIntegralReport> {
    if cfg.dim != sym.dim {
        return Err(Error::Shape("symbol/config dimension mismatch".into()));
    }
    let mut cases = Vec::new();
    for &t in &cfg.t_list {
        for z in &cfg.z_list {
            cases.push(mt_integral_case(cfg, sym, t, z)?);
        }
    }
    let max_moment = cases.iter().map(|c| c.moment_ratio).fold(0.0f64, f64::max);
    let max_weighted = cases
        .iter()
        .map(|c| c.weighted_ratio)
        .fold(0.0f64, f64::max);
    Ok(MtIntegralReport {
        symbol: sym.name.clone(),
        n_order: cfg.n_order,
        dim: cfg.dim,
        k_max: cfg.k_max,
        cases,
        max_moment_ratio: max_moment,
        max_weighted_ratio: max_weighted,
    })
}

fn mt_integral_case(
    cfg: &MtIntegralConfig,
    sym: &Symbol,
    t: f64,
    z: &[f64],
) -> Result<MtIntegralCase> {
    if z.len() != cfg.dim + 1 {
        return Err(Error::Shape("probe point has wrong dimension".into()));
    }
    let d = cfg.dim;
    let n_order = cfg.n_order;
    // z' grid: trapezoid in every axis.
    let rho_axis = axis_nodes(z[0], cfg.rho_halfwidth, cfg.rho_points);
    let x_axis = axis_nodes(0.0, cfg.x_halfwidth, cfg.x_points);

    // tau integrals I_k(delta rho) on shared Gauss-Legendre nodes.
    let big_t = (40.0 / t).sqrt();
    let max_dr = cfg.rho_halfwidth;
    let rule = gauss_legendre_on(-big_t, big_t, tau_node_count(big_t, max_dr))?;
    let mut weights_lam: Vec<Vec<Complex64>> = Vec::with_capacity(cfg.k_max + 1);
    for k in 0..=cfg.k_max {
        let row: Vec<Complex64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&tau, &w)| {
                let lam = tau * tau + 2.0 * k as f64 + d as f64;
                sym.eval(tau, k) * (w * (-lam).powi(n_order as i32) * (-t * lam).exp())
            })
            .collect();
        weights_lam.push(row);
    }
    let i_k: Vec<Vec<Complex64>> = (0..=cfg.k_max)
        .map(|k| {
            rho_axis
                .nodes
                .iter()
                .map(|&rp| {
                    let dr = z[0] - rp;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (&tau, wv) in rule.nodes.iter().zip(&weights_lam[k]) {
                        acc += Complex64::from_polar(1.0, tau * dr) * wv;
                    }
                    acc / (2.0 * PI)
                })
                .collect()
        })
        .collect();

    // Phi_k(x, x') on the x' grid.
    let x = &z[1..];
    let x_len = x_axis.nodes.len().pow(d as u32);
    let mut phi: Vec<Vec<f64>> = vec![vec![0.0; x_len]; cfg.k_max + 1];
    match d {
        1 => {
            let hx = hermite_values_up_to(cfg.k_max, x[0])?;
            for (i, &xv) in x_axis.nodes.iter().enumerate() {
                let hxp = hermite_values_up_to(cfg.k_max, xv)?;
                for k in 0..=cfg.k_max {
                    phi[k][i] = hx[k] * hxp[k];
                }
            }
        }
        _ => {
            for i1 in 0..x_axis.nodes.len() {
                for i2 in 0..x_axis.nodes.len() {
                    let idx = i1 * x_axis.nodes.len() + i2;
                    let xp = [x_axis.nodes[i1], x_axis.nodes[i2]];
                    for (k, phi_k) in phi.iter_mut().enumerate() {
                        phi_k[idx] = projection_kernel(k, x, &xp, DEFAULT_SHELL_BUDGET)?;
                    }
                }
            }
        }
    }

    // Accumulate the three integrals and the boundary-ring tail proxy.
    let mut moment_integral = 0.0;
    let mut weighted_integral = 0.0;
    let mut plain_integral = 0.0;
    let mut ring_mass = 0.0;
    let mut total_mass = 0.0;
    let nx = x_axis.nodes.len();
    for (j, &rp) in rho_axis.nodes.iter().enumerate() {
        let wr = rho_axis.weights[j];
        let on_rho_edge = j < 2 || j + 2 >= rho_axis.nodes.len();
        for xi in 0..x_len {
            let (w_x, on_x_edge, sep_x_sq) = match d {
                1 => {
                    let i = xi;
                    (
                        x_axis.weights[i],
                        i < 2 || i + 2 >= nx,
                        (x[0] - x_axis.nodes[i]).powi(2),
                    )
                }
                _ => {
                    let i1 = xi / nx;
                    let i2 = xi % nx;
                    (
                        x_axis.weights[i1] * x_axis.weights[i2],
                        i1 < 2 || i1 + 2 >= nx || i2 < 2 || i2 + 2 >= nx,
                        (x[0] - x_axis.nodes[i1]).powi(2) + (x[1] - x_axis.nodes[i2]).powi(2),
                    )
                }
            };
            let mut value = Complex64::new(0.0, 0.0);
            for k in 0..=cfg.k_max {
                value += i_k[k][j] * phi[k][xi];
            }
            let dr = z[0] - rp;
            let sep_sq = dr * dr + sep_x_sq;
            let density = value.norm_sqr() * wr * w_x;
            total_mass += density;
            if on_rho_edge || on_x_edge {
                ring_mass += density;
            }
            moment_integral += sep_sq.powi(n_order as i32) * density;
            weighted_integral += (1.0 + sep_sq / t).powi(n_order as i32) * density;
            plain_integral += density;
        }
    }
    if total_mass > 0.0 && ring_mass / total_mass > 1e-6 {
        return Err(Error::TailMass(format!(
            "z' box too small at t={t}: boundary ring carries {:.3e} of the integrand",
            ring_mass / total_mass
        )));
    }
    let dplus = (d as f64 + 1.0) / 2.0;
    let chain_ratio = if n_order == 0 {
        let chain = t.powf(-0.5)
            * t.sinh().powi(-(d as i32))
            * (-t * d as f64).exp()
            * t.powf(-(d as f64) / 2.0);
        Some(plain_integral / chain)
    } else {
        None
    };
    Ok(MtIntegralCase {
        t,
        z: z.to_vec(),
        moment_ratio: moment_integral * t.powf(dplus + n_order as f64),
        weighted_ratio: weighted_integral * t.powf(dplus + 2.0 * n_order as f64),
        tail_fraction: if total_mass > 0.0 {
            ring_mass / total_mass
        } else {
            0.0
        },
        chain_ratio,
    })
}

struct TrapezoidAxis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn axis_nodes(center: f64, halfwidth: f64, n: usize) -> TrapezoidAxis {
    let h = 2.0 * halfwidth / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| center - halfwidth + i as f64 * h).collect();
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    TrapezoidAxis { nodes, weights }
}
