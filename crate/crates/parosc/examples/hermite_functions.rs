//! Hermite functions, projection kernels, and the Mehler generating function.
//!
//! Run with: cargo run --release --example hermite_functions

use parosc::grids::gauss_hermite_rule;
use parosc::hermite::{
    diagonal_heat_trace, eval_hermite_1d, heat_trace_constant, mehler_closed_form,
    projection_kernel, HermiteTable, DEFAULT_SHELL_BUDGET,
};

fn main() -> parosc::Result<()> {
    println!(
        "h_0(0)  = {:.12} (pi^(-1/4) = {:.12})",
        eval_hermite_1d(0, 0.0)?,
        std::f64::consts::PI.powf(-0.25)
    );
    println!("h_1(0)  = {:.12}", eval_hermite_1d(1, 0.0)?);
    println!("h_10(1.3) = {:.12}", eval_hermite_1d(10, 1.3)?);
    println!();

    // Orthonormality under a Gauss-Hermite rule resolving degree 24.
    let rule = gauss_hermite_rule(16)?;
    let table = HermiteTable::build(12, &rule.nodes)?;
    let mut worst = 0.0f64;
    for j in 0..=12 {
        for k in 0..=12 {
            let mut ip = 0.0;
            for (i, &w) in rule.weights.iter().enumerate() {
                let x = rule.nodes[i];
                ip += w * (x * x).exp() * table.value(j, i) * table.value(k, i);
            }
            let want = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((ip - want).abs());
        }
    }
    println!("orthonormality defect through degree 12: {worst:.3e}");

    // Truncated generating function vs the Mehler closed form.
    let (r, x, xp) = (0.5, [0.4, -0.8], [1.1, 0.3]);
    let mut series = 0.0;
    let mut rk = 1.0;
    for k in 0..=60 {
        series += rk * projection_kernel(k, &x, &xp, DEFAULT_SHELL_BUDGET)?;
        rk *= r;
    }
    let closed = mehler_closed_form(r, &x, &xp)?;
    println!("mehler series (K=60) = {series:.15}");
    println!("mehler closed form   = {closed:.15}");
    println!(
        "relative gap         = {:.3e}",
        (series - closed).abs() / closed
    );
    println!();

    // Diagonal heat trace and its geometric-series constant.
    for d in 1..=2usize {
        let t = 0.7;
        println!(
            "trace d={d}: sum e^(-t(2|mu|+d)) = {:.9} = {:.4} * sinh(t)^(-{d})",
            diagonal_heat_trace(t, d)?,
            heat_trace_constant(d),
        );
    }
    Ok(())
}
