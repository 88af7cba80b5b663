//! The g_N square function and its exact L2 identity
//! ||g_N f||^2 = 2^(-2N) Gamma(2N) ||f||^2.
//!
//! Run with: cargo run --release --example g_functions

use parosc::grids::{GridSpec, XRule};
use parosc::squarefn::{
    g_function_from_spectrum, g_star_many, gamma_reference, random_band_spectrum, TimeQuadrature,
};
use parosc::transform::synthesize;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> parosc::Result<()> {
    let spec = GridSpec::new(10.0, 64, 8.5, 64, 1, XRule::UniformTrapezoid)?;
    let halfband = 12i64;
    let deg_cap = 10usize;
    let tau_band = spec.tau(halfband);
    let lambda_hi = tau_band * tau_band + 2.0 * deg_cap as f64 + 1.0;

    // The time quadrature must pass its calibration gate first.
    let q = TimeQuadrature::calibrated_for(3, (1.0, lambda_hi))?;
    println!(
        "time quadrature: {} nodes on [{:.2e}, {}], calibrated",
        q.len(),
        q.t_min,
        q.t_max
    );
    for n in 1..=3usize {
        println!(
            "  worst Gamma-identity defect at order {n}: {:.3e}",
            [1.0, lambda_hi]
                .iter()
                .map(|&lam| q.calibration_defect(n, lam))
                .fold(0.0f64, f64::max)
        );
    }
    println!();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let s = random_band_spectrum(&spec, 12, halfband, deg_cap, &mut rng)?;
    let f = synthesize(&s)?;
    let f_norm_sq = f.norm_l2()?.powi(2);
    for n in 1..=3usize {
        let prof = g_function_from_spectrum(n, &s, &q)?;
        let ratio = prof.norm_l2()?.powi(2) / f_norm_sq;
        println!(
            "N={n}: ||g_N f||^2 / ||f||^2 = {ratio:.6}  (exact {:.6})",
            gamma_reference(n)
        );
    }
    println!();

    // g*_N dominates pointwise information that g_N localizes away.
    let star = g_star_many(2, std::slice::from_ref(&s), &q)?.pop().unwrap();
    println!(
        "g*_2 profile: max {:.6}, L2 norm {:.6}",
        star.max_value(),
        star.norm_l2()?
    );
    Ok(())
}
