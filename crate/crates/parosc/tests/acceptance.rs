//! Acceptance suite: every headline identity and estimate at its pinned
//! tolerance, one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

use parosc::config::RunConfig;
use parosc::grids::{GridSpec, XRule};
use parosc::kernels::{verify_kernel_bound, KernelBoundConfig};
use parosc::report::{to_json, SuiteReport};
use parosc::squarefn::{
    lp_equivalence_probe, pointwise_domination_probe, DominationConfig, LpProbeConfig,
    TimeQuadrature,
};
use parosc::symbols::parse_symbol;
use parosc::verify;
use std::time::Instant;

struct Outcome {
    criterion: usize,
    description: String,
    pass: bool,
    detail: String,
}

fn record_suite(
    outcomes: &mut Vec<Outcome>,
    criterion: usize,
    description: &str,
    report: &SuiteReport,
    extra: String,
) {
    let worst = report
        .records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: {:.3e} vs {:.1e}", r.name, r.measured, r.tolerance))
        .collect::<Vec<_>>()
        .join("; ");
    outcomes.push(Outcome {
        criterion,
        description: description.to_string(),
        pass: report.pass,
        detail: if report.pass { extra } else { worst },
    });
}

#[test]
fn acceptance() {
    let cfg = RunConfig::default();
    let mut outcomes: Vec<Outcome> = Vec::new();

    // 1. Exact g_N identity, N in {1,2,3}, d in {1,2}, 20 random band-limited
    //    inputs, ratio within 1% of 2^{-2N} Gamma(2N); under 60 s.
    let start = Instant::now();
    let g_report = verify::suite_g_identity(&cfg).expect("g-identity suite runs");
    let g_elapsed = start.elapsed().as_secs_f64();
    record_suite(
        &mut outcomes,
        1,
        "g_N L2 identity within 1% (targets 0.25, 0.375, 1.875)",
        &g_report,
        format!("{g_elapsed:.1}s"),
    );
    outcomes.push(Outcome {
        criterion: 1,
        description: "g_N identity runtime under 60 s".into(),
        pass: g_elapsed < 60.0,
        detail: format!("{g_elapsed:.1}s"),
    });

    // 2. Mehler series vs closed form at K=60, sup-normalized 1e-8; under 10 s.
    let start = Instant::now();
    let mehler = verify::suite_mehler(&cfg).expect("mehler suite runs");
    let mehler_elapsed = start.elapsed().as_secs_f64();
    record_suite(
        &mut outcomes,
        2,
        "Mehler truncated series vs closed form, rel err < 1e-8 at K=60",
        &mehler,
        format!("{mehler_elapsed:.1}s"),
    );
    outcomes.push(Outcome {
        criterion: 2,
        description: "Mehler check runtime under 10 s".into(),
        pass: mehler_elapsed < 10.0,
        detail: format!("{mehler_elapsed:.1}s"),
    });

    // 3. Heat-kernel dual representation and semigroup composition.
    let heat = verify::suite_heat_kernel(&cfg).expect("heat-kernel suite runs");
    record_suite(
        &mut outcomes,
        3,
        "heat kernel closed form vs spectral sum (1e-6); semigroup defect < 1e-5",
        &heat,
        String::new(),
    );

    // 4. Mixed-transform isometry and the stencil convergence order.
    let plancherel = verify::suite_plancherel(&cfg).expect("plancherel suite runs");
    let order_rec = plancherel
        .records
        .iter()
        .find(|r| r.name.contains("convergence order"))
        .expect("order record present");
    record_suite(
        &mut outcomes,
        4,
        "Plancherel defect < 1e-8, roundtrip 1e-10, stencil order >= 1.8",
        &plancherel,
        format!("observed order {:.2}", order_rec.measured),
    );

    // 5. Polylogarithm / derivative closed forms.
    let polylog = verify::suite_polylog(&cfg).expect("polylog suite runs");
    record_suite(
        &mut outcomes,
        5,
        "coth/tanh derivatives (N<=5) vs Richardson FD at 1e-6; Li_0, Li_{-1} exact",
        &polylog,
        String::new(),
    );

    // 6. Kernel-bound stability under sample quadrupling, N in {0,1,2}.
    let bounds = verify::suite_bounds(&cfg).expect("bounds suite runs");
    record_suite(
        &mut outcomes,
        6,
        "kernel/multiplier bound ratios finite, growth < 2x under 4x samples",
        &bounds,
        String::new(),
    );

    // 7. Multiplier p=2 sharpness (embedded in the plancherel suite records).
    let sharp_ok = plancherel
        .records
        .iter()
        .filter(|r| r.name.contains("multiplier") || r.name.contains("eigenfunction"))
        .all(|r| r.pass);
    outcomes.push(Outcome {
        criterion: 7,
        description: "||T_m f||_2/||f||_2 <= sup|m|, equality to 1e-10 on eigenfunctions".into(),
        pass: sharp_ok,
        detail: String::new(),
    });

    // 8. Littlewood-Paley p=2 exactness and p-band stability.
    let lp = verify::suite_lp_blocks(&cfg).expect("lp-blocks suite runs");
    record_suite(
        &mut outcomes,
        8,
        "normalized-block square function: p=2 within 1e-6; bands stable to 25%",
        &lp,
        String::new(),
    );

    // 9. Pointwise domination probe for the imaginary-power symbol at
    //    N = floor((d+1)/2)+1 = 2, d = 1; constant stable within 20%.
    let spec = GridSpec::new(8.0, 64, 8.0, 64, 1, XRule::UniformTrapezoid).unwrap();
    let tau_band = spec.tau(6);
    let lambda_hi = tau_band * tau_band + 2.0 * 8.0 + 1.0;
    let q = TimeQuadrature::calibrated_for(3, (1.0, lambda_hi)).unwrap();
    let sym = parse_symbol("imaginary-power:gamma=1", 1).unwrap();
    let dom = pointwise_domination_probe(
        &DominationConfig {
            n_order: 2,
            spec,
            k_max: 12,
            bin_halfband: 6,
            degree_cap: 8,
            family_size: 6,
            seed: cfg.seed,
        },
        &sym,
        &q,
    )
    .expect("domination probe runs");
    outcomes.push(Outcome {
        criterion: 9,
        description: "g_3(T_m f) <= C g*_2(f): constant finite, growth <= 20% under doubling"
            .into(),
        pass: dom.constant.is_finite() && dom.constant > 0.0 && dom.growth <= 1.2,
        detail: format!("C = {:.4}, growth {:.4}", dom.constant, dom.growth),
    });

    // 10. Determinism: byte-identical reports across two runs per seed.
    let kb_cfg = KernelBoundConfig {
        n_order: 1,
        dim: 1,
        samples: 400,
        t_range: (0.05, 5.0),
        z_halfwidth: 3.0,
        gradient: false,
        seed: 4242,
    };
    let kb_same = to_json(&verify_kernel_bound(&kb_cfg).unwrap())
        == to_json(&verify_kernel_bound(&kb_cfg).unwrap());

    let lp_cfg = LpProbeConfig {
        spec: GridSpec::new(6.0, 32, 7.0, 32, 1, XRule::UniformTrapezoid).unwrap(),
        k_max: 6,
        bin_halfband: 5,
        degree_cap: 6,
        family_size: 2,
        p_list: vec![1.5, 2.0, 3.0],
        normalized: true,
        seed: 4242,
    };
    let lp_same = to_json(&lp_equivalence_probe(&lp_cfg).unwrap())
        == to_json(&lp_equivalence_probe(&lp_cfg).unwrap());

    let dom_spec = GridSpec::new(6.0, 32, 7.0, 32, 1, XRule::UniformTrapezoid).unwrap();
    let dom_q = TimeQuadrature::calibrated_for(3, (1.0, 30.0)).unwrap();
    let dom_cfg = DominationConfig {
        n_order: 2,
        spec: dom_spec,
        k_max: 8,
        bin_halfband: 5,
        degree_cap: 6,
        family_size: 2,
        seed: 4242,
    };
    let dom_a = to_json(&pointwise_domination_probe(&dom_cfg, &sym, &dom_q).unwrap());
    let dom_b = to_json(&pointwise_domination_probe(&dom_cfg, &sym, &dom_q).unwrap());
    let cert_same = {
        let a = to_json(&parosc::symbols::certify(&sym, 8.0, 16, 64, 4242).unwrap());
        let b = to_json(&parosc::symbols::certify(&sym, 8.0, 16, 64, 4242).unwrap());
        a == b
    };
    outcomes.push(Outcome {
        criterion: 10,
        description: "probe reports byte-identical across reruns with one seed".into(),
        pass: kb_same && lp_same && dom_a == dom_b && cert_same,
        detail: format!(
            "kernel-bounds {kb_same}, lp {lp_same}, domination {}, certificate {cert_same}",
            dom_a == dom_b
        ),
    });

    // Print the table, then enforce it.
    println!();
    for o in &outcomes {
        println!(
            "ACCEPTANCE {:>2}: {} - {}{}",
            o.criterion,
            if o.pass { "PASS" } else { "FAIL" },
            o.description,
            if o.detail.is_empty() {
                String::new()
            } else {
                format!(" [{}]", o.detail)
            }
        );
    }
    let failures: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    assert!(
        failures.is_empty(),
        "{} acceptance criteria failed: {:?}",
        failures.len(),
        failures
            .iter()
            .map(|o| format!("#{} {} [{}]", o.criterion, o.description, o.detail))
            .collect::<Vec<_>>()
    );
}
