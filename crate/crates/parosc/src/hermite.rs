//! Hermite functions, spectral projection kernels, and Mehler's closed form.
//!
//! Everything here is built on the L2-normalized Hermite functions `h_k`,
//! evaluated by the stable three-term recurrence seeded with
//! `h_0(x) = pi^{-1/4} exp(-x^2/2)`. The unnormalized Hermite polynomial is
//! never formed outside of test oracles.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Hard cap on the degree accepted by the recurrence (index overflow guard).
pub const MAX_EVAL_DEGREE: usize = 2048;

/// Default cap on the number of terms in a `|mu| = k` shell enumeration.
pub const DEFAULT_SHELL_BUDGET: usize = 10_000;

/// A multi-index `mu = (mu_1, ..., mu_d)` with degree `|mu| = sum mu_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex { entries }
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex {
            entries: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn degree(&self) -> usize {
        self.entries.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn entry(&self, axis: usize) -> usize {
        self.entries[axis]
    }

    /// `mu + e_axis`.
    pub fn shifted_up(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::Shape(format!(
                "axis {axis} out of range for dimension {}",
                self.dim()
            )));
        }
        let mut entries = self.entries.clone();
        entries[axis] += 1;
        Ok(MultiIndex { entries })
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Number of multi-indices with `|mu| = k` in dimension `d`: C(k+d-1, d-1).
pub fn shell_size(dim: usize, k: usize) -> usize {
    match dim {
        1 => 1,
        2 => k + 1,
        _ => {
            // General binomial; dims beyond 2 only show up in guards.
            let mut num: u128 = 1;
            let mut den: u128 = 1;
            for j in 1..dim {
                num *= (k + j) as u128;
                den *= j as u128;
            }
            (num / den) as usize
        }
    }
}

/// All multi-indices with `|mu| = k`, lexicographically ordered.
pub fn shell_indices(dim: usize, k: usize, budget: usize) -> Result<Vec<MultiIndex>> {
    if shell_size(dim, k) > budget {
        return Err(Error::Budget(format!(
            "shell |mu|={k} in dimension {dim} has {} terms, budget {budget}",
            shell_size(dim, k)
        )));
    }
    let mut out = Vec::with_capacity(shell_size(dim, k));
    let mut current = vec![0usize; dim];
    fill_shell(&mut out, &mut current, 0, k);
    Ok(out)
}

fn fill_shell(out: &mut Vec<MultiIndex>, current: &mut Vec<usize>, axis: usize, remaining: usize) {
    if axis == current.len() - 1 {
        current[axis] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[axis] = v;
        fill_shell(out, current, axis + 1, remaining - v);
    }
}

/// All multi-indices with `|mu| <= max_degree`, ordered by degree then lex.
pub fn indices_up_to(dim: usize, max_degree: usize, budget: usize) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for k in 0..=max_degree {
        out.extend(shell_indices(dim, k, budget)?);
        if out.len() > budget {
            return Err(Error::Budget(format!(
                "index set |mu| <= {max_degree} in dimension {dim} exceeds budget {budget}"
            )));
        }
    }
    Ok(out)
}

/// `h_k(x)` for all `k <= k_max` in one recurrence pass.
pub fn hermite_values_up_to(k_max: usize, x: f64) -> Result<Vec<f64>> {
    if k_max > MAX_EVAL_DEGREE {
        return Err(Error::Budget(format!(
            "hermite degree {k_max} beyond cap {MAX_EVAL_DEGREE}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "hermite evaluation at non-finite x = {x}"
        )));
    }
    let mut vals = Vec::with_capacity(k_max + 1);
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    vals.push(h0);
    if k_max == 0 {
        return Ok(vals);
    }
    vals.push(2.0f64.sqrt() * x * h0);
    for k in 1..k_max {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * vals[k] - (kf / (kf + 1.0)).sqrt() * vals[k - 1];
        vals.push(next);
    }
    Ok(vals)
}

/// The 1D Hermite function `h_k(x)`.
pub fn eval_hermite_1d(k: usize, x: f64) -> Result<f64> {
    Ok(*hermite_values_up_to(k, x)?.last().unwrap())
}

/// The tensor-product Hermite function `Phi_mu(x) = prod_j h_{mu_j}(x_j)`.
pub fn eval_hermite_nd(mu: &MultiIndex, x: &[f64]) -> Result<f64> {
    if x.len() != mu.dim() {
        return Err(Error::Shape(format!(
            "point dimension {} does not match multi-index dimension {}",
            x.len(),
            mu.dim()
        )));
    }
    let mut prod = 1.0;
    for (j, &xv) in x.iter().enumerate() {
        prod *= eval_hermite_1d(mu.entry(j), xv)?;
    }
    Ok(prod)
}

/// Tabulated `h_k(x_i)` on a fixed set of nodes, one axis.
///
/// `value(k, i)` is `h_k(nodes[i])` for `0 <= k <= max_degree`.
#[derive(Clone, Debug)]
pub struct HermiteTable {
    pub max_degree: usize,
    pub nodes: Vec<f64>,
    values: Vec<f64>, // (max_degree+1) rows of nodes.len()
}

impl HermiteTable {
    pub fn build(max_degree: usize, nodes: &[f64]) -> Result<Self> {
        if max_degree > MAX_EVAL_DEGREE {
            return Err(Error::Budget(format!(
                "hermite table degree {max_degree} beyond cap {MAX_EVAL_DEGREE}"
            )));
        }
        let n = nodes.len();
        let mut values = vec![0.0; (max_degree + 1) * n];
        for (i, &x) in nodes.iter().enumerate() {
            let col = hermite_values_up_to(max_degree, x)?;
            for (k, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "non-finite hermite value at k={k}, x={x}"
                    )));
                }
                values[k * n + i] = *v;
            }
        }
        Ok(HermiteTable {
            max_degree,
            nodes: nodes.to_vec(),
            values,
        })
    }

    #[inline]
    pub fn value(&self, k: usize, node_idx: usize) -> f64 {
        self.values[k * self.nodes.len() + node_idx]
    }

    /// Row of all node values for degree `k`.
    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.nodes.len();
        &self.values[k * n..(k + 1) * n]
    }
}

/// Applies the creation operator `A_j = -d/dx_j + x_j` on the coefficient side:
/// the `Phi_{mu+e_j}` output coefficient is `sqrt(2(mu_j+1))` times the
/// `Phi_mu` input coefficient.
pub fn creation_apply(
    axis: usize,
    coeffs: &BTreeMap<MultiIndex, Complex64>,
) -> Result<BTreeMap<MultiIndex, Complex64>> {
    let mut out = BTreeMap::new();
    for (mu, &c) in coeffs {
        if mu.entry(axis) + 1 > MAX_EVAL_DEGREE {
            return Err(Error::Budget(format!(
                "creation operator pushes degree beyond cap at {mu}"
            )));
        }
        let factor = (2.0 * (mu.entry(axis) as f64 + 1.0)).sqrt();
        out.insert(mu.shifted_up(axis)?, c * factor);
    }
    Ok(out)
}

/// The degree-`k` spectral projection kernel
/// `Phi_k(x, x') = sum_{|mu| = k} Phi_mu(x) Phi_mu(x')`.
pub fn projection_kernel(k: usize, x: &[f64], x_prime: &[f64], shell_budget: usize) -> Result<f64> {
    if x.len() != x_prime.len() {
        return Err(Error::Shape(
            "projection_kernel: point dimensions differ".to_string(),
        ));
    }
    let d = x.len();
    if shell_size(d, k) > shell_budget {
        return Err(Error::Budget(format!(
            "projection kernel shell |mu|={k}, d={d} has {} terms, budget {shell_budget}",
            shell_size(d, k)
        )));
    }
    if d == 1 {
        let hk = eval_hermite_1d(k, x[0])?;
        let hk_p = eval_hermite_1d(k, x_prime[0])?;
        return Ok(hk * hk_p);
    }
    // Per-axis tables make the shell sum a cheap product lookup.
    let tab_x: Vec<Vec<f64>> = x
        .iter()
        .map(|&v| hermite_values_up_to(k, v))
        .collect::<Result<_>>()?;
    let tab_xp: Vec<Vec<f64>> = x_prime
        .iter()
        .map(|&v| hermite_values_up_to(k, v))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for mu in shell_indices(d, k, shell_budget)? {
        let mut prod = 1.0;
        for (j, &m) in mu.entries().iter().enumerate() {
            prod *= tab_x[j][m] * tab_xp[j][m];
        }
        total += prod;
    }
    Ok(total)
}

/// Natural log of the Mehler generating function
/// `sum_k r^k Phi_k(x, x')` for `0 < r < 1`.
///
/// The exponent is never positive, so the plain value underflows gracefully;
/// use this log form when a relative comparison at tiny magnitudes is needed.
pub fn mehler_log(r: f64, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!(
            "mehler: r must lie in (0,1), got {r}"
        )));
    }
    if x.len() != x_prime.len() {
        return Err(Error::Shape("mehler: point dimensions differ".to_string()));
    }
    let d = x.len() as f64;
    let norm_sum: f64 =
        x.iter().map(|v| v * v).sum::<f64>() + x_prime.iter().map(|v| v * v).sum::<f64>();
    let dot: f64 = x.iter().zip(x_prime).map(|(a, b)| a * b).sum();
    let one_minus_r2 = 1.0 - r * r;
    let exponent = -0.5 * (1.0 + r * r) / one_minus_r2 * norm_sum + 2.0 * r * dot / one_minus_r2;
    Ok(-0.5 * d * PI.ln() - 0.5 * d * one_minus_r2.ln() + exponent)
}

/// Mehler's closed form `pi^{-d/2} (1-r^2)^{-d/2} exp(...)`.
pub fn mehler_closed_form(r: f64, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    Ok(mehler_log(r, x, x_prime)?.exp())
}

/// `sum_mu exp(-t(2|mu|+d)) = (2 sinh t)^{-d}`, the diagonal heat trace.
pub fn diagonal_heat_trace(t: f64, dim: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "diagonal_heat_trace: t must be > 0, got {t}"
        )));
    }
    Ok((2.0 * t.sinh()).powi(-(dim as i32)))
}

/// The constant relating the heat trace to `(sinh t)^{-d}`.
///
/// Derived from the per-axis geometric series, not quoted from anywhere:
/// `sum_mu e^{-t(2|mu|+d)} = 2^{-d} (sinh t)^{-d}`.
pub fn heat_trace_constant(dim: usize) -> f64 {
    0.5f64.powi(dim as i32)
}
