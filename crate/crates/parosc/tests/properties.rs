//! Property tests for the structural invariants: unitarity, symmetry,
//! linearity, and the finite-difference Leibniz identity.

use num_complex::Complex64;
use parosc::grids::{dft_rho, DftDirection, GridSpec, XRule};
use parosc::hermite::mehler_closed_form;
use parosc::symbols::{difference_leibniz_check, forward_difference};
use proptest::prelude::*;

fn spec_16() -> GridSpec {
    GridSpec::new(5.0, 16, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The rho-DFT is unitary: norms are preserved and the round trip is the
    /// identity, for arbitrary complex data.
    #[test]
    fn dft_rho_is_unitary(values in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 16)) {
        let spec = spec_16();
        let v: Vec<Complex64> = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let fwd = dft_rho(&spec, &v, DftDirection::Forward).unwrap();
        let back = dft_rho(&spec, &fwd, DftDirection::Inverse).unwrap();
        let norm_in: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let norm_mid: f64 = fwd.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm_in - norm_mid).abs() <= 1e-12 * norm_in.max(1.0));
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    /// Mehler's closed form is symmetric in its two points.
    #[test]
    fn mehler_is_symmetric(
        r in 0.05f64..0.95,
        x1 in -2.5f64..2.5,
        x2 in -2.5f64..2.5,
        y1 in -2.5f64..2.5,
        y2 in -2.5f64..2.5,
    ) {
        let a = mehler_closed_form(r, &[x1, x2], &[y1, y2]).unwrap();
        let b = mehler_closed_form(r, &[y1, y2], &[x1, x2]).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    /// Forward differences are linear in the sequence.
    #[test]
    fn forward_difference_is_linear(
        seq_a in prop::collection::vec(-5.0f64..5.0, 8),
        seq_b in prop::collection::vec(-5.0f64..5.0, 8),
        alpha in -3.0f64..3.0,
        order in 0usize..4,
        k in 0usize..4,
    ) {
        let a = |i: usize| seq_a.get(i).map(|&v| Complex64::new(v, 0.0));
        let b = |i: usize| seq_b.get(i).map(|&v| Complex64::new(v, 0.0));
        let combo = |i: usize| {
            Some(Complex64::new(seq_a.get(i)? * alpha + seq_b.get(i)?, 0.0))
        };
        let lhs = forward_difference(combo, order, k).unwrap();
        let rhs = forward_difference(a, order, k).unwrap() * alpha
            + forward_difference(b, order, k).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10);
    }

    /// The triple-product Leibniz rule for forward differences is an exact
    /// identity; the defect is rounding noise.
    #[test]
    fn leibniz_rule_holds(
        fs in prop::collection::vec(-2.0f64..2.0, 10),
        gs in prop::collection::vec(-2.0f64..2.0, 10),
        hs in prop::collection::vec(-2.0f64..2.0, 10),
        order in 0usize..4,
        k in 0usize..4,
    ) {
        let f = |i: usize| fs.get(i).map(|&v| Complex64::new(v, 0.2));
        let g = |i: usize| gs.get(i).map(|&v| Complex64::new(v, -0.1));
        let h = |i: usize| hs.get(i).map(|&v| Complex64::new(v, 0.0));
        let defect = difference_leibniz_check(f, g, h, order, k).unwrap();
        prop_assert!(defect < 1e-10, "defect {defect}");
    }

    /// Gauss-Hermite rules integrate low even monomials exactly regardless
    /// of the node count.
    #[test]
    fn gauss_hermite_low_moments(n in 3usize..40) {
        let rule = parosc::grids::gauss_hermite_rule(n).unwrap();
        let total: f64 = rule.weights.iter().sum();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        prop_assert!((total - sqrt_pi).abs() < 1e-12);
        let m2 = rule.integrate(|x| x * x);
        prop_assert!((m2 - 0.5 * sqrt_pi).abs() < 1e-12);
    }
}

// --- error paths -------------------------------------------------------------

#[test]
fn dft_rho_rejects_wrong_length() {
    let spec = spec_16();
    let short = vec![Complex64::new(1.0, 0.0); 8];
    assert!(matches!(
        dft_rho(&spec, &short, DftDirection::Forward),
        Err(parosc::Error::Shape(_))
    ));
}

#[test]
fn apply_symbol_rejects_non_finite_values() {
    use parosc::symbols::{apply_symbol, Symbol};
    use parosc::transform::MixedSpectrum;
    let spec = GridSpec::new(4.0, 8, 4.0, 8, 1, XRule::UniformTrapezoid).unwrap();
    let mut s = MixedSpectrum::zeros(spec, 3).unwrap();
    s.set_coeff(0, 0, Complex64::new(1.0, 0.0));
    let bad = Symbol::new("nan-at-origin", 1, |tau, _| {
        Complex64::new(if tau.abs() < 1e-9 { f64::NAN } else { 1.0 }, 0.0)
    });
    assert!(matches!(
        apply_symbol(&s, &bad),
        Err(parosc::Error::Symbol(_))
    ));
}

/// Data held against the x-boundary trips the g* spatial-tail gate.
#[test]
fn g_star_tail_gate_fires_on_narrow_box() {
    use parosc::squarefn::{g_star_many, random_band_spectrum, TimeQuadrature};
    use rand::SeedableRng;
    // Box of halfwidth 3 cannot contain degree-8 Hermite content
    // (turning point sqrt(17) > 4).
    let spec = GridSpec::new(5.0, 16, 3.0, 24, 1, XRule::UniformTrapezoid).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let s = random_band_spectrum(&spec, 8, 4, 8, &mut rng).unwrap();
    let q = TimeQuadrature::calibrated_for(2, (1.0, 30.0)).unwrap();
    assert!(matches!(
        g_star_many(1, std::slice::from_ref(&s), &q),
        Err(parosc::Error::TailMass(_))
    ));
}
