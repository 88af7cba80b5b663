//! The mixed Fourier-Hermite transform: analysis, synthesis, Plancherel,
//! and the diagonal action of the operator.
//!
//! Run with: cargo run --release --example mixed_transform

use num_complex::Complex64;
use parosc::grids::{GridSpec, XRule};
use parosc::hermite::eval_hermite_1d;
use parosc::transform::{analyze, apply_hpar, plancherel_defect, synthesize, GridFunction};

fn main() -> parosc::Result<()> {
    let spec = GridSpec::new(10.0, 64, 8.5, 64, 1, XRule::UniformTrapezoid)?;
    let tau4 = spec.tau(4);

    // f(rho, x) = cos(tau_4 rho) h_1(x): mass splits between bins -4 and 4.
    let f = GridFunction::from_fn(spec.clone(), |r, x| {
        Complex64::new((tau4 * r).cos() * eval_hermite_1d(1, x[0]).unwrap(), 0.0)
    })?;
    let spectrum = analyze(&f, 12)?;
    let norm_sq = f.norm_l2()?.powi(2);
    for i in [-4i64, 4] {
        let bin = spec.signed_to_bin(i)?;
        let pos = spectrum
            .position_of(&parosc::MultiIndex::new(vec![1]))
            .unwrap();
        println!(
            "bin {i:+}: |c|^2 / ||f||^2 = {:.12}",
            spectrum.coeff(bin, pos).norm_sqr() / norm_sq
        );
    }
    println!("plancherel defect: {:.3e}", plancherel_defect(&f, 12)?);

    // Round trip.
    let back = synthesize(&spectrum)?;
    let worst = f
        .values
        .iter()
        .zip(&back.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("synthesize(analyze(f)) max deviation: {worst:.3e}");

    // H acts diagonally: an eigenfunction scales by tau^2 + 2k + d.
    let hf = synthesize(&apply_hpar(&spectrum))?;
    let lam = tau4 * tau4 + 2.0 + 1.0;
    let ratio = hf.value(7, 20) / f.value(7, 20);
    println!(
        "H f / f at a grid point = {:.9} (lambda = {lam:.9})",
        ratio.re
    );
    Ok(())
}
