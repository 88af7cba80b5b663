//! Sampled verification of the kernel decay bounds: the Gaussian-weighted
//! supremum of |dt^N K| and the multiplier-kernel integral bounds.
//!
//! Run with: cargo run --release --example kernel_bounds

use parosc::kernels::{
    verify_kernel_bound, verify_mt_integral_bound, KernelBoundConfig, MtIntegralConfig,
};
use parosc::report::to_json;
use parosc::symbols::parse_symbol;

fn main() -> parosc::Result<()> {
    // sup |dt^N K| t^{(d+1)/2+N} e^{|z-z'|^2/(16t)} over a Latin hypercube;
    // quadrupling the samples should barely move it.
    for n_order in 0..=2usize {
        let mk = |samples| {
            verify_kernel_bound(&KernelBoundConfig {
                n_order,
                dim: 1,
                samples,
                t_range: (0.05, 5.0),
                z_halfwidth: 3.0,
                gradient: false,
                seed: 99,
            })
        };
        let base = mk(1000)?;
        let quad = mk(4000)?;
        println!(
            "N={n_order}: max ratio {:.6} -> {:.6} under 4x samples (growth {:.3})",
            base.max_ratio,
            quad.max_ratio,
            quad.max_ratio / base.max_ratio
        );
    }
    println!();

    // Integral bounds for the multiplier kernel of a certified symbol.
    let sym = parse_symbol("imaginary-power:gamma=1", 1)?;
    let report = verify_mt_integral_bound(
        &MtIntegralConfig {
            n_order: 1,
            dim: 1,
            k_max: 24,
            t_list: vec![0.1, 0.3, 1.0, 2.0],
            z_list: vec![vec![0.0, 0.0]],
            rho_points: 64,
            x_points: 62,
            rho_halfwidth: 12.0,
            x_halfwidth: 9.0,
        },
        &sym,
    )?;
    print!("{}", to_json(&report));
    Ok(())
}
