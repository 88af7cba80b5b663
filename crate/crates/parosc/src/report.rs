//! Serializable report payloads for probes and verification runs.
//!
//! Reports are written as pretty JSON with a fixed field order (struct
//! declaration order), so identical inputs and seeds produce byte-identical
//! files.

use serde::Serialize;

/// Where a sampled supremum was attained.
#[derive(Clone, Debug, Serialize)]
pub struct ArgMax {
    pub t: f64,
    pub z: Vec<f64>,
    pub z_prime: Vec<f64>,
}

/// Result of a sampled kernel-bound probe.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    #[serde(rename = "N")]
    pub n_order: usize,
    #[serde(rename = "d")]
    pub dim: usize,
    pub samples: usize,
    pub max_ratio: f64,
    pub argmax: ArgMax,
    pub seed: u64,
}

/// One `(t, z)` case of the multiplier-kernel integral probe.
#[derive(Clone, Debug, Serialize)]
pub struct MtIntegralCase {
    pub t: f64,
    pub z: Vec<f64>,
    /// `int |z'-z|^{2N} |dt^N M_t|^2 dz'` against `t^{-(d+1)/2-N}`.
    pub moment_ratio: f64,
    /// `int (1+|z'-z|^2/t)^N |dt^N M_t|^2 dz'` against `t^{-(d+1)/2-2N}`.
    pub weighted_ratio: f64,
    /// Boundary-ring fraction of the integrand mass (tail proxy).
    pub tail_fraction: f64,
    /// For N = 0 only: the same integral against
    /// `t^{-1/2} (sinh t)^{-d} e^{-td} t^{-d/2}`.
    pub chain_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MtIntegralReport {
    pub symbol: String,
    #[serde(rename = "N")]
    pub n_order: usize,
    #[serde(rename = "d")]
    pub dim: usize,
    pub k_max: usize,
    pub cases: Vec<MtIntegralCase>,
    pub max_moment_ratio: f64,
    pub max_weighted_ratio: f64,
}

/// Result of the pointwise domination probe
/// `g_{N+1}(T_m f) <= C g*_N(f)`.
#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub symbol: String,
    #[serde(rename = "N")]
    pub n_order: usize,
    #[serde(rename = "d")]
    pub dim: usize,
    pub family_size: usize,
    pub constant: f64,
    pub constant_doubled: f64,
    pub growth: f64,
    pub excluded_fraction: f64,
    pub seed: u64,
}

/// Per-exponent band of the Littlewood-Paley equivalence probe.
#[derive(Clone, Debug, Serialize)]
pub struct LpBand {
    pub p: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_min_doubled: f64,
    pub ratio_max_doubled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpEquivalenceReport {
    #[serde(rename = "d")]
    pub dim: usize,
    pub family_size: usize,
    pub blocks: usize,
    pub normalized: bool,
    pub bands: Vec<LpBand>,
    pub seed: u64,
}

/// One pass/fail row of a verification suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    /// "<=" when measured must stay below tolerance, ">=" otherwise.
    pub comparison: &'static str,
    pub pass: bool,
}

impl CheckRecord {
    pub fn upper(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            measured,
            tolerance,
            comparison: "<=",
            pass: measured.is_finite() && measured <= tolerance,
        }
    }

    pub fn lower(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            measured,
            tolerance,
            comparison: ">=",
            pass: measured.is_finite() && measured >= tolerance,
        }
    }
}

/// A named suite of checks, printable as a table.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, records: Vec<CheckRecord>) -> Self {
        let pass = records.iter().all(|r| r.pass);
        SuiteReport {
            suite: suite.into(),
            records,
            pass,
        }
    }

    pub fn print_table(&self) {
        println!("suite: {}", self.suite);
        println!(
            "  {:<52} {:>14} {:>3} {:>12}  result",
            "check", "measured", "", "tolerance"
        );
        for r in &self.records {
            println!(
                "  {:<52} {:>14.6e} {:>3} {:>12.3e}  {}",
                r.name,
                r.measured,
                r.comparison,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        println!(
            "  => {}",
            if self.pass {
                "all checks passed"
            } else {
                "FAILURES present"
            }
        );
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}
