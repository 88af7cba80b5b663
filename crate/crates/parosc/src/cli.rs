//! Command-line driver.
//!
//! Subcommands: `verify`, `apply`, `certify`, `probe`, `info`. Every
//! configuration key doubles as a `--<key> <value>` flag; precedence is
//! flag > config file > default. Exit codes: 0 pass, 1 numerical failure,
//! 2 usage error, 3 certification-gate failure.

use crate::config::{OutputFormat, RunConfig, KEYS};
use crate::error::{Error, Result};
use crate::kernels::{self, KernelBoundConfig};
use crate::report;
use crate::squarefn::{self, DominationConfig, LpProbeConfig, TimeQuadrature};
use crate::symbols::{self, parse_symbol};
use crate::transform::{analyze, synthesize, GridFunction, MixedSpectrum};
use crate::verify;
use clap::{Arg, ArgAction, Command};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

/// Entry point for the binary.
pub fn main_entry() -> i32 {
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    run(&args)
}

fn command() -> Command {
    let mut cmd = Command::new("parosc")
        .about("Spectral calculus for the partial harmonic oscillator")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .global(true)
                .help("Flat key=value configuration file"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("PATH")
                .global(true)
                .help("Output path (default: stdout)"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_name("FMT")
                .value_parser(["csv", "json"])
                .global(true)
                .help("Report format where applicable"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("U64")
                .global(true)
                .help("Seed for every randomized probe"),
        )
        .arg(
            Arg::new("dim")
                .long("dim")
                .value_name("D")
                .value_parser(["1", "2"])
                .global(true)
                .help("Spatial dimension d"),
        );
    for key in KEYS {
        // --seed/--out/--format are first-class flags above.
        if matches!(*key, "seed" | "output.path" | "output.format") {
            continue;
        }
        cmd = cmd.arg(
            Arg::new(*key)
                .long(*key)
                .value_name("VALUE")
                .global(true)
                .hide(true),
        );
    }
    cmd.subcommand(
        Command::new("verify")
            .about("Run a named verification suite")
            .arg(Arg::new("suite").required(true).value_name("SUITE")),
    )
    .subcommand(
        Command::new("apply")
            .about("Apply a multiplier symbol to a grid function")
            .arg(Arg::new("symbol").required(true).value_name("SYMBOL"))
            .arg(
                Arg::new("input")
                    .long("input")
                    .value_name("SPEC")
                    .default_value("gaussian")
                    .help(
                        "Built-in family (gaussian, eigen:i=<i>,k=<k>, random-band) or a CSV path",
                    ),
            )
            .arg(
                Arg::new("require-certificate")
                    .long("require-certificate")
                    .action(ArgAction::SetTrue)
                    .help("Refuse symbols that fail Mikhlin certification"),
            )
            .arg(
                Arg::new("spectrum-out")
                    .long("spectrum-out")
                    .value_name("PATH")
                    .help("Also write the transformed coefficients as tau_bin,mu,re,im CSV"),
            ),
    )
    .subcommand(
        Command::new("certify")
            .about("Emit a Mikhlin certificate for a symbol")
            .arg(Arg::new("symbol").required(true).value_name("SYMBOL")),
    )
    .subcommand(
        Command::new("probe")
            .about("Run an empirical probe and emit its JSON report")
            .arg(Arg::new("kind").required(true).value_parser([
                "domination",
                "lp-equivalence",
                "kernel-bounds",
            ])),
    )
    .subcommand(Command::new("info").about("Print defaults, suites, and the symbol registry"))
}

pub fn run(args: &[std::ffi::OsString]) -> i32 {
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            // clap help/version are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let cfg = match build_config(&matches) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    let outcome = match matches.subcommand() {
        Some(("verify", sub)) => cmd_verify(&cfg, sub.get_one::<String>("suite").unwrap()),
        Some(("apply", sub)) => cmd_apply(
            &cfg,
            sub.get_one::<String>("symbol").unwrap(),
            sub.get_one::<String>("input").unwrap(),
            sub.get_flag("require-certificate"),
            sub.get_one::<String>("spectrum-out").map(String::as_str),
        ),
        Some(("certify", sub)) => cmd_certify(&cfg, sub.get_one::<String>("symbol").unwrap()),
        Some(("probe", sub)) => cmd_probe(&cfg, sub.get_one::<String>("kind").unwrap()),
        Some(("info", _)) => cmd_info(&cfg),
        _ => unreachable!("subcommand is required"),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_NUMERICAL,
            }
        }
    }
}

/// Precedence: defaults, then config file, then explicit flags.
fn build_config(matches: &clap::ArgMatches) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = matches.get_one::<String>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
        cfg.apply_text(&text)?;
    }
    for key in KEYS {
        if matches!(*key, "seed" | "output.path" | "output.format") {
            continue;
        }
        if let Some(value) = matches.get_one::<String>(*key) {
            cfg.set_key(key, value)?;
        }
    }
    if let Some(d) = matches.get_one::<String>("dim") {
        cfg.set_key("grid.dim", d)?;
    }
    if let Some(seed) = matches.get_one::<String>("seed") {
        cfg.set_key("seed", seed)?;
    }
    if let Some(out) = matches.get_one::<String>("out") {
        cfg.set_key("output.path", out)?;
    }
    if let Some(fmt) = matches.get_one::<String>("format") {
        cfg.set_key("output.format", fmt)?;
    }
    cfg.grid.validate()?;
    Ok(cfg)
}

fn write_output(cfg: &RunConfig, content: &str) -> Result<()> {
    match &cfg.output_path {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<i32> {
    let reports = verify::run_suite(suite, cfg)?;
    if cfg.output_format == OutputFormat::Json {
        write_output(cfg, &report::to_json(&reports))?;
    } else {
        for r in &reports {
            r.print_table();
        }
    }
    let all_pass = reports.iter().all(|r| r.pass);
    if !all_pass {
        for r in reports.iter().filter(|r| !r.pass) {
            for rec in r.records.iter().filter(|rec| !rec.pass) {
                eprintln!(
                    "FAIL [{}] {}: measured {:.6e} {} {:.3e}",
                    r.suite, rec.name, rec.measured, rec.comparison, rec.tolerance
                );
            }
        }
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

/// Band parameters for randomized inputs, scaled to the configured grid.
fn probe_band(cfg: &RunConfig) -> (i64, usize) {
    let halfband = ((cfg.grid.rho_points / 2) as i64 - 1).min(8);
    let deg_cap = cfg.max_degree().min(8);
    (halfband, deg_cap)
}

fn build_input(cfg: &RunConfig, input: &str) -> Result<GridFunction> {
    let spec = cfg.grid.clone();
    let k_max = cfg.max_degree();
    match input {
        "gaussian" => GridFunction::from_fn(spec, |r, x| {
            let e = -0.5 * (r * r + x.iter().map(|v| v * v).sum::<f64>());
            Complex64::new(e.exp(), 0.0)
        }),
        "random-band" => {
            let (halfband, deg_cap) = probe_band(cfg);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let s = squarefn::random_band_spectrum(&spec, k_max, halfband, deg_cap, &mut rng)?;
            synthesize(&s)
        }
        other => {
            if let Some(rest) = other.strip_prefix("eigen:") {
                let mut tau_index: i64 = 0;
                let mut level: usize = 0;
                for part in rest.split(',') {
                    if let Some(v) = part.strip_prefix("i=") {
                        tau_index = v
                            .parse()
                            .map_err(|_| Error::Config(format!("bad eigen index `{v}`")))?;
                    } else if let Some(v) = part.strip_prefix("k=") {
                        level = v
                            .parse()
                            .map_err(|_| Error::Config(format!("bad eigen level `{v}`")))?;
                    } else {
                        return Err(Error::Config(format!("bad eigen spec `{rest}`")));
                    }
                }
                let mut s = MixedSpectrum::zeros(spec.clone(), k_max)?;
                let bin = spec.signed_to_bin(tau_index)?;
                let mu = crate::hermite::MultiIndex::new(match spec.dim {
                    1 => vec![level],
                    _ => vec![level, 0],
                });
                let pos = s
                    .position_of(&mu)
                    .ok_or_else(|| Error::Config(format!("level {level} beyond max degree")))?;
                s.set_coeff(bin, pos, Complex64::new(1.0, 0.0));
                synthesize(&s)
            } else {
                let file = std::fs::File::open(other)
                    .map_err(|e| Error::Config(format!("cannot open input `{other}`: {e}")))?;
                GridFunction::read_csv(spec, std::io::BufReader::new(file))
            }
        }
    }
}

fn cmd_apply(
    cfg: &RunConfig,
    symbol: &str,
    input: &str,
    require_certificate: bool,
    spectrum_out: Option<&str>,
) -> Result<i32> {
    let sym = parse_symbol(symbol, cfg.grid.dim)?;
    if require_certificate {
        let cert = symbols::certify(
            &sym,
            cfg.grid.tau_max(),
            cfg.max_degree().max(symbols::default_order(cfg.grid.dim)),
            cfg.samples.min(512),
            cfg.seed,
        )?;
        if !cert.pass {
            eprintln!(
                "certification gate: symbol `{}` has unbounded Mikhlin constants",
                sym.name
            );
            return Ok(EXIT_CERTIFICATION);
        }
    }
    let f = build_input(cfg, input)?;
    let spectrum = analyze(&f, cfg.max_degree())?;
    let applied = symbols::apply_symbol(&spectrum, &sym)?;
    if let Some(path) = spectrum_out {
        let mut buf = Vec::new();
        applied.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
    }
    let transformed = synthesize(&applied)?;

    let mut csv = Vec::new();
    transformed.write_csv(&mut csv)?;
    write_output(cfg, std::str::from_utf8(&csv).expect("csv is utf-8"))?;

    for &p in &cfg.p_list {
        eprintln!(
            "||f||_{p} = {:.12e}   ||T_m f||_{p} = {:.12e}",
            f.norm_lp(p)?,
            transformed.norm_lp(p)?
        );
    }
    Ok(EXIT_OK)
}

fn cmd_certify(cfg: &RunConfig, symbol: &str) -> Result<i32> {
    let sym = parse_symbol(symbol, cfg.grid.dim)?;
    let cert = symbols::certify(
        &sym,
        cfg.grid.tau_max(),
        cfg.max_degree().max(symbols::default_order(cfg.grid.dim)),
        cfg.samples.min(2000),
        cfg.seed,
    )?;
    write_output(cfg, &report::to_json(&cert))?;
    Ok(if cert.pass {
        EXIT_OK
    } else {
        EXIT_CERTIFICATION
    })
}

fn cmd_probe(cfg: &RunConfig, kind: &str) -> Result<i32> {
    let (halfband, deg_cap) = probe_band(cfg);
    match kind {
        "domination" => {
            let sym = parse_symbol(&cfg.symbol, cfg.grid.dim)?;
            let n_order = cfg.probe_order();
            let tau_band = cfg.grid.tau(halfband);
            let lambda_hi = tau_band * tau_band + 2.0 * deg_cap as f64 + cfg.grid.dim as f64;
            let q = TimeQuadrature::calibrated_for(n_order + 1, (cfg.grid.dim as f64, lambda_hi))?;
            let rep = squarefn::pointwise_domination_probe(
                &DominationConfig {
                    n_order,
                    spec: cfg.grid.clone(),
                    k_max: cfg.max_degree(),
                    bin_halfband: halfband,
                    degree_cap: deg_cap,
                    family_size: cfg.family,
                    seed: cfg.seed,
                },
                &sym,
                &q,
            )?;
            write_output(cfg, &report::to_json(&rep))?;
            Ok(EXIT_OK)
        }
        "lp-equivalence" => {
            let rep = squarefn::lp_equivalence_probe(&LpProbeConfig {
                spec: cfg.grid.clone(),
                k_max: cfg.max_degree(),
                bin_halfband: halfband,
                degree_cap: deg_cap,
                family_size: cfg.family,
                p_list: cfg.p_list.clone(),
                normalized: true,
                seed: cfg.seed,
            })?;
            write_output(cfg, &report::to_json(&rep))?;
            Ok(EXIT_OK)
        }
        "kernel-bounds" => {
            let rep = kernels::verify_kernel_bound(&KernelBoundConfig {
                n_order: cfg.probe_order(),
                dim: cfg.grid.dim,
                samples: cfg.samples,
                t_range: (0.05, 5.0),
                z_halfwidth: 3.0,
                gradient: false,
                seed: cfg.seed,
            })?;
            write_output(cfg, &report::to_json(&rep))?;
            Ok(EXIT_OK)
        }
        other => Err(Error::Config(format!("unknown probe kind `{other}`"))),
    }
}

fn cmd_info(cfg: &RunConfig) -> Result<i32> {
    println!("parosc {}", env!("CARGO_PKG_VERSION"));
    println!();
    println!("verification suites:");
    for s in verify::SUITES {
        println!("  {s}");
    }
    println!();
    println!("symbol registry:");
    for s in symbols::REGISTRY {
        println!("  {s}");
    }
    println!();
    println!("effective configuration:");
    for line in cfg.to_text().lines() {
        println!("  {line}");
    }
    println!(
        "  (resolved hermite.max_degree = {}, probe.n = {})",
        cfg.max_degree(),
        cfg.probe_order()
    );
    Ok(EXIT_OK)
}

/// Convenience used by tests: run with string arguments including argv[0].
pub fn run_str(args: &[&str]) -> i32 {
    let os: Vec<std::ffi::OsString> = args.iter().map(|s| s.into()).collect();
    run(&os)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["parosc", "verify"]), EXIT_USAGE);
        assert_eq!(run_str(&["parosc", "bogus-subcommand"]), EXIT_USAGE);
        assert_eq!(run_str(&["parosc", "verify", "no-such-suite"]), EXIT_USAGE);
        assert_eq!(run_str(&["parosc", "probe", "no-such-kind"]), EXIT_USAGE);
    }

    #[test]
    fn info_runs() {
        assert_eq!(run_str(&["parosc", "info"]), EXIT_OK);
    }

    #[test]
    fn certify_pass_and_gate() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("cert.json");
        let code = run_str(&[
            "parosc",
            "certify",
            "one",
            "--out",
            out.to_str().unwrap(),
            "--probe.samples",
            "64",
            "--hermite.max_degree",
            "12",
        ]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("\"pass\": true"));
    }

    #[test]
    fn config_file_and_flag_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.cfg");
        std::fs::write(&cfg_path, "seed = 7\ngrid.rho_points = 32\n").unwrap();
        let out = dir.path().join("cert.json");
        let code = run_str(&[
            "parosc",
            "certify",
            "one",
            "--config",
            cfg_path.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            out.to_str().unwrap(),
            "--probe.samples",
            "64",
            "--hermite.max_degree",
            "12",
        ]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(&out).unwrap();
        // flag wins over file
        assert!(text.contains("\"seed\": 99"));
    }
}
