//! Littlewood-Paley blocks: dyadic supports, the square-normalized partition,
//! and the p = 2 exactness of the block square function.
//!
//! Run with: cargo run --release --example littlewood_paley

use parosc::grids::{GridSpec, XRule};
use parosc::squarefn::{lp_equivalence_probe, LpProbeConfig};
use parosc::symbols::{blocks_covering, lp_block, lp_block_normalized, BLOCK_SUPPORT};

fn main() -> parosc::Result<()> {
    println!(
        "block j covers sqrt(lambda) in [{} * 2^j, {} * 2^j]",
        BLOCK_SUPPORT.0, BLOCK_SUPPORT.1
    );
    for j in 0..5usize {
        let lo = BLOCK_SUPPORT.0 * 2f64.powi(j as i32);
        let hi = BLOCK_SUPPORT.1 * 2f64.powi(j as i32);
        let sym = lp_block(j, 1);
        let mid = (0.5 * (lo + hi)).powi(2) - 1.0;
        let active = if mid >= 0.0 {
            sym.eval(mid.max(0.0).sqrt(), 0).re
        } else {
            0.0
        };
        println!("  j={j}: [{lo:.3}, {hi:.3}]  value at band center {active:.3}");
    }

    // The normalized family squares to one on the spectrum.
    let s = 7.3f64;
    let total: f64 = (0..=blocks_covering(s * s))
        .map(|j| {
            let b = lp_block_normalized(j, 1).eval((s * s - 1.0).sqrt(), 0).re;
            b * b
        })
        .sum();
    println!("sum_j b_j^2 at sqrt(lambda) = {s}: {total:.15}");
    println!();

    // Norm equivalence probe over a random band-limited family.
    let report = lp_equivalence_probe(&LpProbeConfig {
        spec: GridSpec::new(10.0, 64, 8.5, 64, 1, XRule::UniformTrapezoid)?,
        k_max: 12,
        bin_halfband: 12,
        degree_cap: 10,
        family_size: 4,
        p_list: vec![1.5, 2.0, 3.0],
        normalized: true,
        seed: 11,
    })?;
    for band in &report.bands {
        println!(
            "p = {:>3}: ratio in [{:.6}, {:.6}] (doubled family [{:.6}, {:.6}])",
            band.p, band.ratio_min, band.ratio_max, band.ratio_min_doubled, band.ratio_max_doubled
        );
    }
    Ok(())
}
