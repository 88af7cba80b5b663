//! Symbols, Mikhlin certification, and the multiplier operator at p = 2.
//!
//! Run with: cargo run --release --example multiplier_certify

use num_complex::Complex64;
use parosc::grids::{GridSpec, XRule};
use parosc::symbols::{apply_symbol, certify, parse_symbol, Symbol};
use parosc::transform::MixedSpectrum;

fn main() -> parosc::Result<()> {
    let dim = 1;
    for name in [
        "one",
        "heat:t=0.5",
        "imaginary-power:gamma=1",
        "riesz-like:theta=1",
    ] {
        let sym = parse_symbol(name, dim)?;
        let cert = certify(&sym, 12.0, 30, 200, 7)?;
        let fmt = |v: &Option<f64>| v.map_or("unbounded".into(), |c| format!("{c:.4}"));
        println!("{name}: pass = {}", cert.pass);
        for n in 0..=cert.n_max {
            println!(
                "  order {n}: C_tau = {:<12} C_k = {}",
                fmt(&cert.c_tau[n]),
                fmt(&cert.c_k[n])
            );
        }
    }

    // An unbounded symbol is flagged rather than certified.
    let bad = Symbol::new("tau", dim, |tau, _| Complex64::new(tau, 0.0));
    let cert = certify(&bad, 12.0, 30, 200, 7)?;
    println!(
        "m = tau: pass = {} (order-0 constant grows with the domain)",
        cert.pass
    );
    println!();

    // p = 2: the operator norm on coefficients is exactly sup |m|.
    let spec = GridSpec::new(8.0, 64, 8.5, 64, 1, XRule::UniformTrapezoid)?;
    let mut s = MixedSpectrum::zeros(spec.clone(), 10)?;
    for bin in 0..spec.rho_points {
        for m in 0..s.index_count() {
            s.set_coeff(bin, m, Complex64::new(0.3, -0.1));
        }
    }
    let sym = parse_symbol("heat:t=0.5", dim)?;
    let ts = apply_symbol(&s, &sym)?;
    let ratio = (ts.norm_sq() / s.norm_sq()).sqrt();
    let sup_m = (-(0.5) * 1.0f64).exp(); // attained at lambda = d = 1
    println!("||T_m s|| / ||s|| = {ratio:.12}  <=  sup|m| = {sup_m:.12}");
    Ok(())
}
