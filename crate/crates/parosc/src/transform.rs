//! Mixed analysis/synthesis between grid samples and Fourier-Hermite
//! coefficients.
//!
//! `analyze` applies the unitary DFT along `rho` and then projects each
//! frequency slab onto the Hermite functions `Phi_mu` with `|mu| <= K`;
//! `synthesize` is its adjoint/inverse on the resolved band. Coefficients
//! carry a `sqrt(rho step)` factor so that the map is an isometry between
//! the grid L2 norm and the plain l2 norm of the coefficients.

use crate::error::{Error, Result};
use crate::grids::{dft_rho, DftDirection, GridSpec, XAxis};
use crate::hermite::{indices_up_to, HermiteTable, MultiIndex, DEFAULT_SHELL_BUDGET};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{BufRead, Write};

/// Samples of a function of `(rho, x)` on the tensor grid.
///
/// Storage is row-major with `rho` slowest: `values[n * x_len + x_flat]`,
/// where `x_flat = i1 * x_points + i2` in dimension 2.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.grid_len() {
            return Err(Error::Shape(format!(
                "grid function needs {} values, got {}",
                spec.grid_len(),
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Domain(
                "grid function contains non-finite values".into(),
            ));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let len = spec.grid_len();
        GridFunction {
            spec,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Sample a closure `f(rho, x)` on the grid.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64,
    {
        let rho = spec.rho_nodes();
        let axis = spec.x_axis()?;
        let mut values = Vec::with_capacity(spec.grid_len());
        let mut xbuf = vec![0.0f64; spec.dim];
        for &r in &rho {
            for xf in 0..spec.x_len() {
                fill_x_point(&spec, &axis, xf, &mut xbuf);
                values.push(f(r, &xbuf));
            }
        }
        GridFunction::new(spec, values)
    }

    #[inline]
    pub fn value(&self, rho_idx: usize, x_flat: usize) -> Complex64 {
        self.values[rho_idx * self.spec.x_len() + x_flat]
    }

    /// Product quadrature weights over the `x` slab.
    pub fn x_weights(&self) -> Result<Vec<f64>> {
        x_product_weights(&self.spec)
    }

    /// Grid L2 norm: `sqrt( drho * sum_n sum_x W_x |f|^2 )`.
    pub fn norm_l2(&self) -> Result<f64> {
        self.norm_lp(2.0)
    }

    /// Grid Lp norm with the grid's Lebesgue-equivalent weights.
    pub fn norm_lp(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("Lp norm needs p > 0, got {p}")));
        }
        let w = self.x_weights()?;
        let drho = self.spec.rho_step();
        let xl = self.spec.x_len();
        let mut total = 0.0;
        for n in 0..self.spec.rho_points {
            let slab = &self.values[n * xl..(n + 1) * xl];
            for (v, &wx) in slab.iter().zip(&w) {
                total += wx * v.norm().powf(p);
            }
        }
        Ok((drho * total).powf(1.0 / p))
    }

    /// Writes `rho,x1[,x2],re,im` rows in storage order.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let rho = self.spec.rho_nodes();
        let axis = self.spec.x_axis()?;
        if self.spec.dim == 1 {
            writeln!(out, "rho,x1,re,im")?;
        } else {
            writeln!(out, "rho,x1,x2,re,im")?;
        }
        let mut xbuf = vec![0.0f64; self.spec.dim];
        for (n, &r) in rho.iter().enumerate() {
            for xf in 0..self.spec.x_len() {
                fill_x_point(&self.spec, &axis, xf, &mut xbuf);
                let v = self.value(n, xf);
                if self.spec.dim == 1 {
                    writeln!(out, "{},{},{},{}", r, xbuf[0], v.re, v.im)?;
                } else {
                    writeln!(out, "{},{},{},{},{}", r, xbuf[0], xbuf[1], v.re, v.im)?;
                }
            }
        }
        Ok(())
    }

    /// Reads a CSV produced by [`GridFunction::write_csv`] against a known
    /// grid. Coordinates are checked against the grid nodes.
    pub fn read_csv<R: BufRead>(spec: GridSpec, reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty grid-function CSV".into()))??;
        let want_header = if spec.dim == 1 {
            "rho,x1,re,im"
        } else {
            "rho,x1,x2,re,im"
        };
        if header.trim() != want_header {
            return Err(Error::Config(format!(
                "grid CSV header `{header}` does not match `{want_header}`"
            )));
        }
        let rho = spec.rho_nodes();
        let axis = spec.x_axis()?;
        let mut values = Vec::with_capacity(spec.grid_len());
        let mut xbuf = vec![0.0f64; spec.dim];
        let mut row = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != spec.dim + 3 {
                return Err(Error::Config(format!("bad CSV row: `{line}`")));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad float `{s}` in CSV")))
            };
            let n = row / spec.x_len();
            let xf = row % spec.x_len();
            if n >= spec.rho_points {
                return Err(Error::Shape("grid CSV has too many rows".into()));
            }
            fill_x_point(&spec, &axis, xf, &mut xbuf);
            let r = parse(fields[0])?;
            if (r - rho[n]).abs() > 1e-9 * spec.rho_halfwidth.max(1.0) {
                return Err(Error::Shape(format!(
                    "CSV rho {} does not match grid node {}",
                    r, rho[n]
                )));
            }
            for a in 0..spec.dim {
                let xv = parse(fields[1 + a])?;
                if (xv - xbuf[a]).abs() > 1e-9 * spec.x_halfwidth.max(1.0) {
                    return Err(Error::Shape(format!(
                        "CSV x{} = {} does not match grid node {}",
                        a + 1,
                        xv,
                        xbuf[a]
                    )));
                }
            }
            let re = parse(fields[spec.dim + 1])?;
            let im = parse(fields[spec.dim + 2])?;
            values.push(Complex64::new(re, im));
            row += 1;
        }
        GridFunction::new(spec, values)
    }
}

#[inline]
pub(crate) fn fill_x_point(spec: &GridSpec, axis: &XAxis, x_flat: usize, out: &mut [f64]) {
    match spec.dim {
        1 => out[0] = axis.nodes[x_flat],
        _ => {
            out[0] = axis.nodes[x_flat / spec.x_points];
            out[1] = axis.nodes[x_flat % spec.x_points];
        }
    }
}

pub(crate) fn x_product_weights(spec: &GridSpec) -> Result<Vec<f64>> {
    let axis = spec.x_axis()?;
    match spec.dim {
        1 => Ok(axis.weights.clone()),
        _ => {
            let n = spec.x_points;
            let mut w = Vec::with_capacity(n * n);
            for i1 in 0..n {
                for i2 in 0..n {
                    w.push(axis.weights[i1] * axis.weights[i2]);
                }
            }
            Ok(w)
        }
    }
}

/// Fourier-Hermite coefficients `c(tau_i, mu)` of a grid function.
///
/// Bins are stored by increasing signed frequency index; multi-indices by
/// degree then lexicographic order, `|mu| <= max_degree`.
#[derive(Clone, Debug)]
pub struct MixedSpectrum {
    pub spec: GridSpec,
    pub max_degree: usize,
    indices: Vec<MultiIndex>,
    coeffs: Vec<Complex64>, // bin-major: [bin * indices.len() + m]
}

impl MixedSpectrum {
    pub fn zeros(spec: GridSpec, max_degree: usize) -> Result<Self> {
        let indices = indices_up_to(spec.dim, max_degree, DEFAULT_SHELL_BUDGET)?;
        let len = spec.rho_points * indices.len();
        Ok(MixedSpectrum {
            spec,
            max_degree,
            indices,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn index_count(&self) -> usize {
        self.indices.len()
    }

    /// Position of a multi-index in the storage order.
    pub fn position_of(&self, mu: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|m| m == mu)
    }

    #[inline]
    pub fn coeff(&self, bin: usize, m: usize) -> Complex64 {
        self.coeffs[bin * self.indices.len() + m]
    }

    #[inline]
    pub fn set_coeff(&mut self, bin: usize, m: usize, v: Complex64) {
        let idx = bin * self.indices.len() + m;
        self.coeffs[idx] = v;
    }

    /// Eigenvalue `lambda = tau_i^2 + 2|mu| + d` at a storage slot.
    pub fn lambda(&self, bin: usize, m: usize) -> f64 {
        let tau = self.spec.tau(self.spec.bin_to_signed(bin));
        tau * tau + 2.0 * self.indices[m].degree() as f64 + self.spec.dim as f64
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Inner product `<self, other>` over all coefficients.
    pub fn inner(&self, other: &MixedSpectrum) -> Result<Complex64> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::Shape("spectra have different shapes".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// Writes `tau_bin,mu_1[,mu_2],re,im` rows, bins outermost.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        if self.spec.dim == 1 {
            writeln!(out, "tau_bin,mu_1,re,im")?;
        } else {
            writeln!(out, "tau_bin,mu_1,mu_2,re,im")?;
        }
        for bin in 0..self.spec.rho_points {
            let i = self.spec.bin_to_signed(bin);
            for (m, mu) in self.indices.iter().enumerate() {
                let c = self.coeff(bin, m);
                if self.spec.dim == 1 {
                    writeln!(out, "{},{},{},{}", i, mu.entry(0), c.re, c.im)?;
                } else {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        i,
                        mu.entry(0),
                        mu.entry(1),
                        c.re,
                        c.im
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Hermite projection table plus weights for one grid.
struct XProjector {
    table: HermiteTable,
    weights: Vec<f64>,
}

impl XProjector {
    fn build(spec: &GridSpec, max_degree: usize) -> Result<Self> {
        let axis = spec.x_axis()?;
        let table = HermiteTable::build(max_degree, &axis.nodes)?;
        Ok(XProjector {
            table,
            weights: axis.weights,
        })
    }
}

/// Expands a grid function into Fourier-Hermite coefficients.
pub fn analyze(f: &GridFunction, max_degree: usize) -> Result<MixedSpectrum> {
    let spec = f.spec.clone();
    let mut spectrum = MixedSpectrum::zeros(spec.clone(), max_degree)?;
    let proj = XProjector::build(&spec, max_degree)?;
    let xl = spec.x_len();
    let nrho = spec.rho_points;

    // DFT along rho for every x point (strided lines).
    let mut freq = vec![Complex64::new(0.0, 0.0); f.values.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); nrho];
    for xf in 0..xl {
        for n in 0..nrho {
            line[n] = f.values[n * xl + xf];
        }
        let out = dft_rho(&spec, &line, DftDirection::Forward)?;
        for b in 0..nrho {
            freq[b * xl + xf] = out[b];
        }
    }

    let scale = spec.rho_step().sqrt();
    let m_count = spectrum.index_count();
    let indices = spectrum.indices().to_vec();
    let coeffs = spectrum.coeffs_mut();
    coeffs
        .par_chunks_mut(m_count)
        .enumerate()
        .for_each(|(b, out)| {
            let slab = &freq[b * xl..(b + 1) * xl];
            project_slab(&spec, &proj, &indices, slab, out, scale);
        });
    Ok(spectrum)
}

/// Hermite inner products of one frequency slab against all `Phi_mu`.
fn project_slab(
    spec: &GridSpec,
    proj: &XProjector,
    indices: &[MultiIndex],
    slab: &[Complex64],
    out: &mut [Complex64],
    scale: f64,
) {
    let n = spec.x_points;
    let k_max = proj.table.max_degree;
    match spec.dim {
        1 => {
            let weighted: Vec<Complex64> = slab
                .iter()
                .zip(&proj.weights)
                .map(|(v, &w)| v * w)
                .collect();
            for (m, mu) in indices.iter().enumerate() {
                let row = proj.table.row(mu.entry(0));
                let mut acc = Complex64::new(0.0, 0.0);
                for (hv, wv) in row.iter().zip(&weighted) {
                    acc += wv * hv;
                }
                out[m] = acc * scale;
            }
        }
        _ => {
            // Contract the second axis first: partial[i1][k2].
            let mut partial = vec![Complex64::new(0.0, 0.0); n * (k_max + 1)];
            for i1 in 0..n {
                let line = &slab[i1 * n..(i1 + 1) * n];
                for k2 in 0..=k_max {
                    let row = proj.table.row(k2);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i2 in 0..n {
                        acc += line[i2] * (row[i2] * proj.weights[i2]);
                    }
                    partial[i1 * (k_max + 1) + k2] = acc;
                }
            }
            for (m, mu) in indices.iter().enumerate() {
                let (k1, k2) = (mu.entry(0), mu.entry(1));
                let row = proj.table.row(k1);
                let mut acc = Complex64::new(0.0, 0.0);
                for i1 in 0..n {
                    acc += partial[i1 * (k_max + 1) + k2] * (row[i1] * proj.weights[i1]);
                }
                out[m] = acc * scale;
            }
        }
    }
}

/// Reconstructs a grid function from Fourier-Hermite coefficients.
pub fn synthesize(s: &MixedSpectrum) -> Result<GridFunction> {
    let spec = s.spec.clone();
    let proj = XProjector::build(&spec, s.max_degree)?;
    let xl = spec.x_len();
    let nrho = spec.rho_points;
    let m_count = s.index_count();

    // Per-bin x slabs, bin-major.
    let mut freq = vec![Complex64::new(0.0, 0.0); nrho * xl];
    let inv_scale = 1.0 / spec.rho_step().sqrt();
    freq.par_chunks_mut(xl).enumerate().for_each(|(b, slab)| {
        let coeffs = &s.coeffs()[b * m_count..(b + 1) * m_count];
        expand_slab(&spec, &proj, s.indices(), coeffs, slab, inv_scale);
    });

    // Inverse DFT along rho for every x point.
    let mut values = vec![Complex64::new(0.0, 0.0); nrho * xl];
    let mut line = vec![Complex64::new(0.0, 0.0); nrho];
    for xf in 0..xl {
        for b in 0..nrho {
            line[b] = freq[b * xl + xf];
        }
        let out = dft_rho(&spec, &line, DftDirection::Inverse)?;
        for n in 0..nrho {
            values[n * xl + xf] = out[n];
        }
    }
    GridFunction::new(spec, values)
}

fn expand_slab(
    spec: &GridSpec,
    proj: &XProjector,
    indices: &[MultiIndex],
    coeffs: &[Complex64],
    slab: &mut [Complex64],
    inv_scale: f64,
) {
    let n = spec.x_points;
    let k_max = proj.table.max_degree;
    match spec.dim {
        1 => {
            for v in slab.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            for (m, mu) in indices.iter().enumerate() {
                let c = coeffs[m] * inv_scale;
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let row = proj.table.row(mu.entry(0));
                for (v, hv) in slab.iter_mut().zip(row) {
                    *v += c * hv;
                }
            }
        }
        _ => {
            // partial[i1][k2] = sum_{k1} c(k1,k2) h_{k1}(x_{i1})
            let mut partial = vec![Complex64::new(0.0, 0.0); n * (k_max + 1)];
            for (m, mu) in indices.iter().enumerate() {
                let c = coeffs[m] * inv_scale;
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let (k1, k2) = (mu.entry(0), mu.entry(1));
                let row = proj.table.row(k1);
                for i1 in 0..n {
                    partial[i1 * (k_max + 1) + k2] += c * row[i1];
                }
            }
            for i1 in 0..n {
                let line = &mut slab[i1 * n..(i1 + 1) * n];
                for v in line.iter_mut() {
                    *v = Complex64::new(0.0, 0.0);
                }
                for k2 in 0..=k_max {
                    let c = partial[i1 * (k_max + 1) + k2];
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    let row = proj.table.row(k2);
                    for (v, hv) in line.iter_mut().zip(row) {
                        *v += c * hv;
                    }
                }
            }
        }
    }
}

/// Multiplies each coefficient by the eigenvalue `tau^2 + 2|mu| + d`.
pub fn apply_hpar(s: &MixedSpectrum) -> MixedSpectrum {
    let mut out = s.clone();
    let m_count = s.index_count();
    for bin in 0..s.spec.rho_points {
        for m in 0..m_count {
            let lam = s.lambda(bin, m);
            let v = out.coeff(bin, m) * lam;
            out.set_coeff(bin, m, v);
        }
    }
    out
}

/// Relative Plancherel defect `| ||f||^2 - sum |c|^2 | / ||f||^2`.
pub fn plancherel_defect(f: &GridFunction, max_degree: usize) -> Result<f64> {
    let norm_sq = f.norm_l2()?.powi(2);
    if norm_sq == 0.0 {
        return Err(Error::Domain("plancherel_defect: zero input".into()));
    }
    let s = analyze(f, max_degree)?;
    Ok((norm_sq - s.norm_sq()).abs() / norm_sq)
}
