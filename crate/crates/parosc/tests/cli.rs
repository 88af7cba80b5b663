//! End-to-end checks of the `parosc` binary: exit codes, file outputs, and
//! byte-level determinism of reports.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parosc"))
}

#[test]
fn exit_codes() {
    // Usage errors.
    let status = bin().arg("verify").arg("no-such-suite").status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().arg("nonsense").status().unwrap();
    assert_eq!(status.code(), Some(2));

    // A passing suite.
    let status = bin().args(["verify", "orthonormality"]).status().unwrap();
    assert_eq!(status.code(), Some(0));

    // Certification gate: an unbounded symbol via apply --require-certificate.
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("unbounded.csv");
    // Tabulated symbol whose values grow with tau: certification flags it.
    let mut rows = String::from("tau,k,re,im\n");
    for i in -40..=40 {
        let tau = i as f64 * 0.5;
        for k in 0..6 {
            rows.push_str(&format!("{tau},{k},{tau},0.0\n"));
        }
    }
    std::fs::write(&table, rows).unwrap();
    let status = bin()
        .args([
            "apply",
            &format!("csv:{}", table.display()),
            "--require-certificate",
            "--grid.rho_points",
            "32",
            "--grid.x_points",
            "32",
            "--grid.x_halfwidth",
            "8",
            "--hermite.max_degree",
            "8",
            "--probe.samples",
            "64",
            "--out",
            dir.path().join("unused.csv").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn apply_identity_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let status = bin()
        .args([
            "apply",
            "one",
            "--input",
            "gaussian",
            "--grid.rho_points",
            "64",
            "--grid.x_points",
            "48",
            "--grid.x_halfwidth",
            "8",
            "--hermite.max_degree",
            "10",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("rho,x1,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 64 * 48);
    assert!(!text.contains('\r'), "LF line endings only");

    // Identity symbol: output equals the sampled input to 1e-10 where the
    // Gaussian has any mass (band-limit truncation is far below that).
    let mut worst = 0.0f64;
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let want = (-0.5 * (f[0] * f[0] + f[1] * f[1])).exp();
        worst = worst.max((f[2] - want).abs());
    }
    assert!(worst < 1e-10, "identity apply deviates by {worst}");
}

#[test]
fn apply_heat_scales_eigenfunction() {
    // T_{heat:t} on an eigenfunction multiplies it by e^{-t lambda}.
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("eigen.csv");
    let heated = dir.path().join("heated.csv");
    let common = [
        "--grid.rho_halfwidth",
        "8",
        "--grid.rho_points",
        "32",
        "--grid.x_points",
        "48",
        "--grid.x_halfwidth",
        "8",
        "--hermite.max_degree",
        "8",
    ];
    for (sym, out) in [("one", &base), ("heat:t=0.5", &heated)] {
        let status = bin()
            .args(["apply", sym, "--input", "eigen:i=2,k=1"])
            .args(common)
            .args(["--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let tau = std::f64::consts::PI * 2.0 / 8.0;
    let factor = (-0.5 * (tau * tau + 2.0 + 1.0)).exp();
    let parse = |s: &str| -> Vec<f64> {
        s.lines()
            .skip(1)
            .flat_map(|l| l.split(',').skip(2).map(|v| v.parse::<f64>().unwrap()))
            .collect()
    };
    let va = parse(&std::fs::read_to_string(&base).unwrap());
    let vb = parse(&std::fs::read_to_string(&heated).unwrap());
    let worst = va
        .iter()
        .zip(&vb)
        .map(|(a, b)| (a * factor - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-12, "eigenfunction scaling off by {worst:.3e}");
}

#[test]
fn probe_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = bin()
            .args([
                "probe",
                "kernel-bounds",
                "--seed",
                "31415",
                "--probe.samples",
                "500",
                "--out",
                path.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json");
    let b = run("b.json");
    assert_eq!(a, b, "kernel-bounds reports differ between identical runs");
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"seed\": 31415"));
    assert!(text.contains("\"max_ratio\""));
}

#[test]
fn verify_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite.json");
    let status = bin()
        .args([
            "verify",
            "polylog",
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed[0]["suite"], "polylog");
    assert_eq!(parsed[0]["pass"], true);
}

#[test]
fn spectrum_csv_via_apply_roundtrip() {
    // apply writes a grid CSV; feeding it back as input reproduces it.
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("f.csv");
    let second = dir.path().join("g.csv");
    let common = [
        "--grid.rho_points",
        "16",
        "--grid.x_points",
        "48",
        "--grid.x_halfwidth",
        "8",
        "--hermite.max_degree",
        "8",
    ];
    let status = bin()
        .args(["apply", "one", "--input", "random-band", "--seed", "7"])
        .args(common)
        .args(["--out", first.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = bin()
        .args(["apply", "one", "--input", first.to_str().unwrap()])
        .args(common)
        .args(["--out", second.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let fa = std::fs::read_to_string(&first).unwrap();
    let fb = std::fs::read_to_string(&second).unwrap();
    let parse = |s: &str| -> Vec<f64> {
        s.lines()
            .skip(1)
            .flat_map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()))
            .collect()
    };
    let (va, vb) = (parse(&fa), parse(&fb));
    assert_eq!(va.len(), vb.len());
    let worst = va
        .iter()
        .zip(&vb)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-9, "roundtrip through CSV drifted by {worst}");
}
