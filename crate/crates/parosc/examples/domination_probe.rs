//! Empirical pointwise domination: g_{N+1}(T_m f)(z) <= C g*_N(f)(z)
//! for a certified Mikhlin symbol, with the constant's stability under
//! family doubling.
//!
//! Run with: cargo run --release --example domination_probe

use parosc::grids::{GridSpec, XRule};
use parosc::report::to_json;
use parosc::squarefn::{pointwise_domination_probe, DominationConfig, TimeQuadrature};
use parosc::symbols::parse_symbol;

fn main() -> parosc::Result<()> {
    let spec = GridSpec::new(8.0, 64, 8.0, 64, 1, XRule::UniformTrapezoid)?;
    let n_order = 2; // floor((d+1)/2) + 1 for d = 1
    let halfband = 6i64;
    let deg_cap = 8usize;
    let tau_band = spec.tau(halfband);
    let lambda_hi = tau_band * tau_band + 2.0 * deg_cap as f64 + 1.0;
    let q = TimeQuadrature::calibrated_for(n_order + 1, (1.0, lambda_hi))?;

    let sym = parse_symbol("imaginary-power:gamma=1", 1)?;
    let report = pointwise_domination_probe(
        &DominationConfig {
            n_order,
            spec,
            k_max: 12,
            bin_halfband: halfband,
            degree_cap: deg_cap,
            family_size: 6,
            seed: 2718,
        },
        &sym,
        &q,
    )?;
    print!("{}", to_json(&report));
    eprintln!();
    eprintln!(
        "empirical constant {:.4}; growth under doubling {:.4} (stable if close to 1)",
        report.constant, report.growth
    );
    Ok(())
}
