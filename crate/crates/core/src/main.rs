//! Command-line front end: list configurations, compute and certify delta,
//! dump decompositions, reproduce the classification table, and run the
//! verification corpus.
//!
//! Exit codes: 0 success; 1 table row failed; 2 usage error or unknown
//! name/curve; 3 delta certified only as an interval; 4 validation failure.

use clap::{Parser, Subcommand, ValueEnum};
use delta_dp3::config::{builtin, builtins, parse_config, StratumKind, SurfaceConfig};
use delta_dp3::delta::{run_corpus, DeltaEngine, LEMMA_CORPUS};
use delta_dp3::lattice::{fmt_rat, rat, rint, Rat};
use delta_dp3::report::{
    self, relative_error, render_certificate, render_decomposition, render_lemma_reports,
    render_list, render_table, ListRow, RenderOptions, ReportFormat, TableRow,
};
use delta_dp3::zariski::param_zariski;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "delta-dp3",
    about = "Delta-invariants of Du Val del Pezzo surfaces of degree 3, in exact arithmetic",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "md")]
    format: FormatArg,
    /// Annotate exact fractions with decimals of the given precision
    #[arg(long, global = true)]
    digits: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Md,
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Md => ReportFormat::Markdown,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in configurations with expected line count and delta
    List,
    /// Compute the delta certificate of a built-in or a configuration file
    Delta {
        /// Built-in name (e.g. A3A1) or path to a configuration file
        name: String,
    },
    /// Dump the parametric Zariski decomposition of -K - v*curve
    Decompose {
        /// Built-in name or path to a configuration file
        name: String,
        /// Curve id (e.g. E, E1, "L1,1")
        curve: String,
    },
    /// Reproduce the delta table for all 20 built-ins with PASS/FAIL
    Table,
    /// Run the lemma corpus, the decomposition property suites, and the
    /// floating-point quadrature oracle
    Verify {
        /// Restrict to one suite: corpus, zariski, or quadrature
        #[arg(long)]
        only: Option<String>,
        /// Grid resolution for the quadrature oracle
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
}

fn load_config(name: &str) -> Result<std::borrow::Cow<'static, SurfaceConfig>, ExitCode> {
    if let Some(cfg) = builtin(name) {
        return Ok(std::borrow::Cow::Borrowed(cfg));
    }
    if std::path::Path::new(name).exists() {
        let text = std::fs::read_to_string(name).map_err(|e| {
            eprintln!("error: cannot read {name}: {e}");
            ExitCode::from(2)
        })?;
        let cfg = parse_config(&text).map_err(|e| {
            eprintln!("error: {name} failed validation: {e}");
            ExitCode::from(4)
        })?;
        return Ok(std::borrow::Cow::Owned(cfg));
    }
    eprintln!("error: `{name}` is neither a built-in configuration nor a file");
    eprintln!(
        "built-ins: {}",
        delta_dp3::config::BUILTIN_NAMES.join(", ")
    );
    Err(ExitCode::from(2))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opt = RenderOptions {
        format: cli.format.into(),
        digits: cli.digits,
    };
    match cli.command {
        Command::List => cmd_list(&opt),
        Command::Delta { name } => cmd_delta(&name, &opt),
        Command::Decompose { name, curve } => cmd_decompose(&name, &curve, &opt),
        Command::Table => cmd_table(&opt),
        Command::Verify { only, grid } => cmd_verify(only.as_deref(), grid),
    }
}

fn cmd_list(opt: &RenderOptions) -> ExitCode {
    let rows: Vec<ListRow> = builtins()
        .iter()
        .map(|cfg| {
            let exp = cfg.expected.as_ref().expect("builtins carry expectations");
            ListRow {
                name: cfg.name.clone(),
                singularities: cfg.singularities.clone(),
                lines: exp.lines,
                delta: exp.delta.clone(),
            }
        })
        .collect();
    print!("{}", render_list(&rows, opt));
    ExitCode::SUCCESS
}

fn cmd_delta(name: &str, opt: &RenderOptions) -> ExitCode {
    let cfg = match load_config(name) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let cert = if let Some(engine) = DeltaEngine::for_builtin(&cfg.name) {
        engine.global_delta()
    } else {
        DeltaEngine::new(&cfg).and_then(|engine| engine.global_delta())
    };
    let cert = match cert {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    print!("{}", render_certificate(&cfg, &cert, opt));
    if cert.exact {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn cmd_decompose(name: &str, curve: &str, opt: &RenderOptions) -> ExitCode {
    let cfg = match load_config(name) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if cfg.curve(curve).is_err() {
        eprintln!("error: unknown curve `{curve}` in configuration {}", cfg.name);
        eprintln!(
            "curves: {}",
            cfg.curves().map(|c| c.id.clone()).collect::<Vec<_>>().join(", ")
        );
        return ExitCode::from(2);
    }
    let dec = match param_zariski(&cfg, curve) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    let vol = dec.volume_function(&cfg).expect("volume");
    let s = vol.integrate(&Rat::zero(), &dec.tau).expect("integrate") / rint(3);
    print!("{}", render_decomposition(&cfg, &dec, &s, opt));
    ExitCode::SUCCESS
}

fn cmd_table(opt: &RenderOptions) -> ExitCode {
    let mut rows = Vec::new();
    for cfg in builtins() {
        let exp = cfg.expected.as_ref().expect("builtins carry expectations");
        let engine = DeltaEngine::for_builtin(&cfg.name).expect("builtin engine");
        let cert = engine.global_delta().expect("builtin certificate");
        rows.push(TableRow {
            degree: 3,
            name: cfg.name.clone(),
            singularities: cfg.singularities.clone(),
            lines: cfg.lines().count(),
            expected_lines: exp.lines,
            delta: cert.global().cloned(),
            expected_delta: exp.delta.clone(),
            exact: cert.exact,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass());
    print!("{}", render_table(&rows, opt));
    if all_pass {
        println!("{}/{} PASS", rows.len(), rows.len());
        ExitCode::SUCCESS
    } else {
        let failed = rows.iter().filter(|r| !r.pass()).count();
        println!("{failed}/{} FAIL", rows.len());
        ExitCode::from(1)
    }
}

fn cmd_verify(only: Option<&str>, grid: usize) -> ExitCode {
    let mut clean = true;
    let run_corpus_suite = only.is_none_or(|o| o == "corpus");
    let run_zariski = only.is_none_or(|o| o == "zariski");
    let run_quadrature = only.is_none_or(|o| o == "quadrature");
    if let Some(o) = only {
        if !matches!(o, "corpus" | "zariski" | "quadrature") {
            eprintln!("error: unknown suite `{o}` (corpus, zariski, quadrature)");
            return ExitCode::from(2);
        }
    }

    if run_corpus_suite {
        println!("== lemma corpus ==");
        match run_corpus() {
            Ok(reports) => {
                print!("{}", render_lemma_reports(&reports, true));
                let bad = reports.iter().filter(|r| !r.all_match()).count();
                println!(
                    "corpus: {}/{} all-match",
                    reports.len() - bad,
                    reports.len()
                );
                clean &= bad == 0;
            }
            Err(e) => {
                println!("corpus failed to run: {e}");
                clean = false;
            }
        }
    }

    if run_zariski {
        println!("== decomposition property suite ==");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let mut checked = 0usize;
        let mut violations = 0usize;
        for cfg in builtins() {
            for c in cfg.curves() {
                let dec = match param_zariski(cfg, &c.id) {
                    Ok(d) => d,
                    Err(e) => {
                        println!("  {}/{}: {e}", cfg.name, c.id);
                        violations += 1;
                        continue;
                    }
                };
                if let Err(e) = dec.validate(cfg) {
                    println!("  {}/{}: {e}", cfg.name, c.id);
                    violations += 1;
                }
                // pointwise agreement at random rational parameters
                for _ in 0..5 {
                    let num = rng.gen_range(1..1000i64);
                    let v = &dec.tau * rat(num, 1000);
                    let d = delta_dp3::lattice::anticanonical_class()
                        .sub(&c.class.scale(&v));
                    match delta_dp3::zariski::zariski_at(&d, cfg) {
                        Ok((_, n)) => {
                            let want: std::collections::BTreeMap<String, Rat> =
                                dec.negative_part_at(&v).unwrap().into_iter().collect();
                            let got: std::collections::BTreeMap<String, Rat> =
                                n.into_iter().collect();
                            if want != got {
                                println!(
                                    "  {}/{} disagreement at v = {}",
                                    cfg.name,
                                    c.id,
                                    fmt_rat(&v)
                                );
                                violations += 1;
                            }
                        }
                        Err(e) => {
                            println!("  {}/{} pointwise failure at v = {}: {e}", cfg.name, c.id, fmt_rat(&v));
                            violations += 1;
                        }
                    }
                    checked += 1;
                }
            }
        }
        println!("zariski: {checked} pointwise checks, {violations} violations");
        clean &= violations == 0;
    }

    if run_quadrature {
        println!("== quadrature oracle (grid {grid}) ==");
        let mut worst: f64 = 0.0;
        let mut bad = 0usize;
        for case in LEMMA_CORPUS.iter() {
            let cfg = builtin(&case.config).unwrap();
            let engine = DeltaEngine::for_builtin(&case.config).expect("engine");
            let dec = engine.decomposition(&case.curve).unwrap();
            let vol = dec.volume_function(cfg).unwrap();
            let s_exact = engine.s_curve(&case.curve).unwrap();
            let s_num = report::simpson(&vol, grid) / 3.0;
            let e1 = relative_error(s_num, s_exact);
            let stratum = cfg
                .strata()
                .into_iter()
                .find(|s| s.kind == StratumKind::CurveGeneric(case.curve.clone()))
                .unwrap();
            let h = engine.h_function(&case.curve, &stratum).unwrap();
            let flag_exact = engine.s_flag(&case.curve, &stratum).unwrap();
            let flag_num = report::simpson(&h, grid) * 2.0 / 3.0;
            let e2 = relative_error(flag_num, &flag_exact);
            let err = e1.max(e2);
            worst = worst.max(err);
            if err > 1e-9 {
                println!("  {} exceeds 1e-9: {err:e}", case.key);
                bad += 1;
            }
        }
        println!("quadrature: worst relative error {worst:.3e}, {bad} over tolerance");
        clean &= bad == 0;
    }

    if clean {
        println!("verify: clean");
        ExitCode::SUCCESS
    } else {
        println!("verify: FAILURES");
        ExitCode::from(1)
    }
}
