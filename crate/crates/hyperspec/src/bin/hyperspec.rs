use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperspec::bc::pipeline::{run_bc, BcConfig};
use hyperspec::eisenstein::{constant_term_check, critical_line_sweep, eisenstein_series, reduce_to_fundamental_domain, Generator, LatticeTruncation};
use hyperspec::io::{prepare_out_dir, Check, Manifest, Report, Table};
use hyperspec::scene::{radon_scene, wave_scene, Scene};
use hyperspec::suites::{Suite, SuiteContext};
use hyperspec::{row, Error, Result, C64};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_FAILED: u8 = 2;
const EXIT_CONFIG: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "hyperspec", version, about = "Spectral transforms on hyperbolic space, modular scattering and boundary-control reconstruction")]
struct Cli {
    /// JSON configuration (BC experiment for `run`, bump scene for `radon`/`wave`)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// fewer random samples in the verification suites
    #[arg(long, global = true)]
    quick: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// boundary-control experiment from --config
    Run,
    /// run verification suites
    Verify {
        /// comma-separated suite names, or `all`
        #[arg(long)]
        suite: String,
    },
    /// Radon transform of a bump scene
    Radon,
    /// wave evolution of a bump scene
    Wave,
    /// Eisenstein series and scattering checks
    Eisenstein(EisensteinArgs),
}

#[derive(Args, Debug)]
struct EisensteinArgs {
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    s_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s_im: f64,
    #[arg(long, default_value_t = 3.0)]
    y: f64,
    /// lattice box size M
    #[arg(long, default_value_t = 200)]
    truncation: usize,
    #[arg(long, value_enum)]
    check: EisensteinCheck,
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum EisensteinCheck {
    Invariance,
    ConstantTerm,
    Unitarity,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Argument(_) | Error::Domain(_) => EXIT_CONFIG,
                _ => EXIT_FAILED,
            })
        }
    }
}

fn configure_threads() -> Result<Option<usize>> {
    let Ok(v) = std::env::var("HYPERSPEC_THREADS") else { return Ok(None) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::Config(format!("HYPERSPEC_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(Some(n))
}

/// Parses a JSON file, reporting syntax and schema errors with line and column.
fn load_json<T: DeserializeOwned>(path: &Path) -> Result<(T, Value)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let at = |e: serde_json::Error| Error::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()));
    let raw: Value = serde_json::from_str(&text).map_err(at)?;
    let parsed: T = serde_json::from_str(&text).map_err(at)?;
    Ok((parsed, raw))
}

fn need_config(cli: &Cli, what: &str) -> Result<PathBuf> {
    cli.config.clone().ok_or_else(|| Error::Config(format!("{what} needs --config PATH")))
}

fn run(cli: &Cli) -> Result<bool> {
    let threads = configure_threads()?;
    let start = Instant::now();
    // everything that can be a config error is settled before the output directory is touched
    let (name, echo, job): (&str, Value, Box<dyn FnOnce() -> Result<Report>>) = match &cli.command {
        Command::Run => {
            let (cfg, raw) = load_json::<BcConfig>(&need_config(cli, "run")?)?;
            cfg.validate()?;
            let mut cfg = cfg;
            if cli.quick {
                cfg.heat.modes = 0;
            }
            let echo = json!({ "input": raw, "effective": cfg });
            ("run", echo, Box::new(move || run_bc(&cfg, "")))
        }
        Command::Verify { suite } => {
            let suites = Suite::parse_list(suite)?;
            let ctx = SuiteContext { seed: cli.seed, quick: cli.quick };
            let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
            (
                "verify",
                json!({ "suites": names }),
                Box::new(move || {
                    let mut rep = Report::default();
                    for s in suites {
                        eprintln!("suite {s}");
                        let t0 = Instant::now();
                        match s.run(&ctx) {
                            Ok(r) => rep.absorb(r),
                            Err(e) => rep.check(Check::errored(s.name(), "suite", &e)),
                        }
                        rep.stages.push(hyperspec::io::Stage { name: format!("suite:{s}"), wall_seconds: t0.elapsed().as_secs_f64() });
                    }
                    Ok(rep)
                }),
            )
        }
        Command::Radon | Command::Wave => {
            let (scene, raw) = load_json::<Scene>(&need_config(cli, "this command")?)?;
            scene.validate()?;
            let echo = json!({ "input": raw, "effective": scene });
            if matches!(cli.command, Command::Radon) {
                ("radon", echo, Box::new(move || radon_scene(&scene)))
            } else {
                ("wave", echo, Box::new(move || wave_scene(&scene)))
            }
        }
        Command::Eisenstein(a) => {
            let s = C64::new(a.s_re, a.s_im);
            let trunc = LatticeTruncation::new(a.truncation).map_err(|e| Error::Config(e.to_string()))?;
            if !(a.y > 0.0) {
                return Err(Error::Config("--y must be positive".into()));
            }
            if !(a.t_max > 0.5) {
                return Err(Error::Config("--t-max must exceed 0.5".into()));
            }
            let echo = json!({ "s_re": a.s_re, "s_im": a.s_im, "y": a.y, "truncation": a.truncation, "check": format!("{:?}", a.check), "t_max": a.t_max });
            let (check, y, t_max) = (a.check, a.y, a.t_max);
            ("eisenstein", echo, Box::new(move || eisenstein_command(check, s, y, &trunc, t_max)))
        }
    };

    let out = cli.out.clone();
    prepare_out_dir(&out)?;
    let config = json!({ "arguments": echo, "threads": threads });
    let mut manifest = Manifest::new(name, cli.seed, cli.quick, config);
    let rep = match job() {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::Argument(_))) => return Err(e),
        Err(e) => {
            let mut r = Report::default();
            r.check(Check::errored(name, "run", &e));
            r
        }
    };
    rep.write_into(&out, &mut manifest)?;
    manifest.stages.push(hyperspec::io::Stage { name: "total".into(), wall_seconds: start.elapsed().as_secs_f64() });
    let passed = rep.passed();
    manifest.passed = passed;
    manifest.write(&out.join("manifest.json"))?;
    for c in &rep.checks {
        println!("{}", c.line());
    }
    println!("{} ({} checks), manifest at {}", if passed { "PASS" } else { "FAIL" }, rep.checks.len(), out.join("manifest.json").display());
    Ok(passed)
}

fn eisenstein_command(check: EisensteinCheck, s: C64, y: f64, trunc: &LatticeTruncation, t_max: f64) -> Result<Report> {
    const G: &str = "eisenstein";
    let mut rep = Report::default();
    rep.note("eisenstein:truncation_m", trunc.m);
    match check {
        EisensteinCheck::ConstantTerm => {
            let c = rep.time("eisenstein:constant_term", || constant_term_check(y, s, trunc))?;
            rep.note("eisenstein:residual_box_only", c.residual_box_only);
            rep.check(Check::at_most(G, "constant_term", c.residual, 1e-6));
        }
        EisensteinCheck::Invariance => {
            let z = C64::new(0.1, y);
            let e = rep.time("eisenstein:invariance", || -> Result<_> {
                let base = eisenstein_series(z, s, trunc)?.value;
                let mut worst: f64 = 0.0;
                let reduced = reduce_to_fundamental_domain(z)?.point.z;
                for w in [Generator::T(1).apply(z), Generator::T(-1).apply(z), Generator::I.apply(z), reduced] {
                    worst = worst.max((eisenstein_series(w, s, trunc)?.value - base).norm() / base.norm());
                }
                Ok(worst)
            })?;
            rep.check(Check::at_most(G, "modular_invariance", e, 1e-6));
        }
        EisensteinCheck::Unitarity => {
            let sweep = rep.time("eisenstein:unitarity", || critical_line_sweep(0.5, t_max, 50))?;
            let mut t = Table::new(&["t", "abs_s", "arg_s"]);
            let mut worst: f64 = 0.0;
            for (x, v) in &sweep {
                worst = worst.max((v.value.norm() - 1.0).abs());
                t.push(row![*x, v.value.norm(), v.value.arg()]);
            }
            rep.table("unitarity.csv", t);
            rep.check(Check::at_most(G, "unitarity", worst, 1e-9));
        }
    }
    Ok(rep)
}
