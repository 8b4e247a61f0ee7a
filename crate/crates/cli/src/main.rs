//! `rz`: command line front end for the spectrahedral relaxation toolkit.
//!
//! Subcommands cover the whole pipeline: parsing and probabilistic
//! verification (`rzcheck`, `cone`), pseudo-moment tables (`moments`),
//! relaxation pencils and the half-space relaxation (`pencil`,
//! `halfspace`, `hierarchy`), membership and gauge oracles (`member`,
//! `gauge`, `sweep`), determinantal constructions (`detrep`), real zero
//! amalgamation (`amalgamate`), shifted-family tightening (`tighten`) and
//! a plot emitter for gauge sweeps (`plot`).
//!
//! Output is deterministic given the command line and the seed: all
//! sampling flows through one splitmix generator whose seed is printed in
//! every report. Exact rationals are emitted as `p/q` strings. Exit codes:
//! 0 success, 1 negative verdict, 2 usage error, 3 numerical failure.

mod svg;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use rz_core::error::Error;
use rz_core::geometry::{self, DEFAULT_T_MAX};
use rz_core::linalg::PsdVerdict;
use rz_core::moments::{self, moment_table};
use rz_core::pencil::{self, build_hierarchy_pencil, build_pencil, build_pencil_inf};
use rz_core::poly::{parse_rat, rat_to_f64, Polynomial, Rat};
use rz_core::rng::SplitMix64;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Runtime configuration; can be loaded from `--config <file>` (JSON) and
/// partially overridden by `RZ_SEED` and `--seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct RunConfig {
    seed: u64,
    psd_tol: f64,
    root_tol: f64,
    gauge_tol: f64,
    max_vars: usize,
    max_degree: u32,
    max_cutoff: u32,
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Csv,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0x5eed,
            psd_tol: 1e-8,
            root_tol: 1e-7,
            gauge_tol: 1e-6,
            max_vars: rz_core::poly::MAX_VARS,
            max_degree: 12,
            max_cutoff: rz_core::poly::MAX_SERIES_CUTOFF,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), Error> {
        if self.psd_tol <= 0.0 || self.root_tol <= 0.0 || self.gauge_tol <= 0.0 {
            return Err(Error::Parse("tolerances must be positive".into()));
        }
        if self.max_vars > rz_core::poly::MAX_VARS {
            return Err(Error::Capacity(format!(
                "max_vars {} above module cap {}",
                self.max_vars,
                rz_core::poly::MAX_VARS
            )));
        }
        if self.max_cutoff > rz_core::poly::MAX_SERIES_CUTOFF {
            return Err(Error::Capacity(format!(
                "max_cutoff {} above module cap {}",
                self.max_cutoff,
                rz_core::poly::MAX_SERIES_CUTOFF
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "rz",
    about = "Spectrahedral relaxations of rigidly convex sets and hyperbolicity cones",
    version
)]
struct Cli {
    /// Seed for all sampling (overrides RZ_SEED and the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolyArg {
    /// Polynomial in the text grammar, e.g. "1 - x1^2 - x2^2".
    #[arg(short = 'p', long = "poly")]
    poly: String,
    /// Ambient variable count (defaults to the largest index that occurs).
    #[arg(long)]
    vars: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Probabilistic real zero check along random directions.
    Rzcheck {
        #[command(flatten)]
        poly: PolyArg,
        /// Number of random directions.
        #[arg(long, default_value_t = 64)]
        trials: u32,
        /// Use the exact discriminant certificate for quadratics.
        #[arg(long)]
        strict_quadratic: bool,
    },
    /// Pseudo-moment table of the linear form of p.
    Moments {
        #[command(flatten)]
        poly: PolyArg,
        /// Virtual degree d (defaults to deg p).
        #[arg(short = 'd', long)]
        virtual_degree: Option<u32>,
        /// Tabulation cutoff D.
        #[arg(short = 'D', long, default_value_t = 3)]
        cutoff: u32,
    },
    /// Relaxation pencil (base, infinite virtual degree, or hierarchy).
    Pencil {
        #[command(flatten)]
        poly: PolyArg,
        /// Virtual degree d (defaults to deg p).
        #[arg(short = 'd', long)]
        virtual_degree: Option<u32>,
        /// Delete the first row and column (infinite virtual degree).
        #[arg(long)]
        inf: bool,
        /// Hierarchy level (monomial basis of this degree).
        #[arg(long)]
        hierarchy: Option<u32>,
    },
    /// Half-space relaxation read off the first pencil row.
    Halfspace {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(short = 'd', long)]
        virtual_degree: Option<u32>,
    },
    /// Membership of a point in the set and its relaxation.
    Member {
        #[command(flatten)]
        poly: PolyArg,
        /// Point, comma separated.
        #[arg(long)]
        point: String,
    },
    /// Gauge of the set and of a relaxation along a direction.
    Gauge {
        #[command(flatten)]
        poly: PolyArg,
        /// Ray direction, comma separated.
        #[arg(long)]
        dir: String,
        /// Relaxation to compare against: `pencil`, `inf`, or `hierarchy:<k>`.
        #[arg(long, default_value = "pencil")]
        relax: String,
    },
    /// Gauge sweep along random rays (CSV or JSON).
    Sweep {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 32)]
        rays: u32,
        #[arg(long, default_value = "pencil")]
        relax: String,
        /// Output format override: json | csv.
        #[arg(long)]
        format: Option<String>,
    },
    /// Hierarchy gauges level by level along random rays.
    Hierarchy {
        #[command(flatten)]
        poly: PolyArg,
        /// Highest level to build.
        #[arg(short = 'k', long, default_value_t = 2)]
        level: u32,
        #[arg(long, default_value_t = 16)]
        rays: u32,
    },
    /// Hyperbolicity probe, eigenvalues, trace and cone membership.
    Cone {
        #[command(flatten)]
        poly: PolyArg,
        /// Hyperbolicity direction, comma separated.
        #[arg(long)]
        dir: String,
        /// Optional point to test.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 64)]
        trials: u32,
    },
    /// Determinantal constructions.
    Detrep {
        #[command(subcommand)]
        which: DetrepCommand,
    },
    /// Real zero amalgamation.
    Amalgamate {
        /// disjoint | quadratic | deg2
        #[arg(long)]
        mode: String,
        #[arg(short = 'p', long)]
        p: String,
        #[arg(short = 'q', long)]
        q: String,
        /// Number of shared leading variables.
        #[arg(long, default_value_t = 0)]
        shared: usize,
        /// Degree bound.
        #[arg(short = 'd', long)]
        degree: Option<u32>,
    },
    /// Shifted-pencil families: per-ray overshoot of the intersection.
    Tighten {
        #[command(flatten)]
        poly: PolyArg,
        /// JSON file with anchors (arrays of rationals as strings or
        /// numbers).
        #[arg(long)]
        anchors: String,
        #[arg(long, default_value_t = 32)]
        rays: u32,
    },
    /// Polar SVG plot of a sweep CSV.
    Plot {
        /// Input CSV (from `rz sweep --format csv`).
        #[arg(long)]
        input: String,
        /// Output SVG path (stdout if omitted).
        #[arg(long)]
        output: Option<String>,
    },
}

#[derive(Subcommand)]
enum DetrepCommand {
    /// Explicit 2x2 symmetric representation of a planar quadratic.
    Quad2 {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Linear-cofactor representation of a quadratic (size n+1).
    Lincofactor {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Derived-cone pencil of the general symmetric determinant.
    Saunderson {
        /// Matrix dimension.
        #[arg(short = 'd', long)]
        dim: usize,
    },
}

// ---------------------------------------------------------------------------
// Entry point and error mapping
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return emit_error(&e),
    };
    match dispatch(&cli.command, &config) {
        Ok(code) => code,
        Err(e) => emit_error(&e),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {path}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("bad config {path}: {e}")))?
    } else {
        RunConfig::default()
    };
    if let Ok(env_seed) = std::env::var("RZ_SEED") {
        config.seed = env_seed
            .parse()
            .map_err(|_| Error::Parse(format!("bad RZ_SEED `{env_seed}`")))?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn emit_error(e: &Error) -> ExitCode {
    let code = match e {
        Error::Parse(_)
        | Error::DimensionMismatch { .. }
        | Error::Capacity(_)
        | Error::DegreeBound { .. }
        | Error::DegreeTooSmall { .. }
        | Error::InvalidAnchor(_) => 2u8,
        _ => 3u8,
    };
    let label = match code {
        2 => "usage",
        _ => "numerical",
    };
    let payload = json!({"error": {"code": label, "message": e.to_string()}});
    println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    ExitCode::from(code)
}

fn parse_poly(arg: &PolyArg, config: &RunConfig) -> Result<Polynomial, Error> {
    let p = match arg.vars {
        Some(n) => Polynomial::parse_with_vars(&arg.poly, n)?,
        None => Polynomial::parse(&arg.poly)?,
    };
    if p.n_vars() > config.max_vars {
        return Err(Error::Capacity(format!(
            "{} variables above configured cap {}",
            p.n_vars(),
            config.max_vars
        )));
    }
    if let Some(d) = p.degree() {
        if d > config.max_degree {
            return Err(Error::Capacity(format!(
                "degree {d} above configured cap {}",
                config.max_degree
            )));
        }
    }
    Ok(p)
}

fn parse_vector(text: &str, expected: usize) -> Result<Vec<f64>, Error> {
    let values: Result<Vec<f64>, Error> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .or_else(|_| parse_rat(s).map(|r| rat_to_f64(&r)))
                .map_err(|_| Error::Parse(format!("bad coordinate `{s}`")))
        })
        .collect();
    let values = values?;
    if values.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: values.len(),
        });
    }
    Ok(values)
}

fn require_variables(p: &Polynomial) -> Result<(), Error> {
    if p.n_vars() == 0 {
        return Err(Error::Parse(
            "this command needs a polynomial with at least one variable; \
             pass --vars to widen a constant"
                .into(),
        ));
    }
    Ok(())
}

fn virtual_degree_or_default(p: &Polynomial, flag: Option<u32>) -> u32 {
    flag.unwrap_or_else(|| p.degree().unwrap_or(0))
}

/// Build the requested relaxation pencil for gauge comparisons.
fn relaxation_pencil(
    p: &Polynomial,
    spec: &str,
    virt: Option<u32>,
) -> Result<pencil::FloatPencil, Error> {
    let d = virtual_degree_or_default(p, virt);
    if spec == "pencil" {
        let table = moment_table(p, d, 3)?;
        return Ok(build_pencil(&table)?.to_float());
    }
    if spec == "inf" {
        let table = moment_table(p, d, 3)?;
        return Ok(build_pencil_inf(&table)?.to_float());
    }
    if let Some(level) = spec.strip_prefix("hierarchy:") {
        let level: u32 = level
            .parse()
            .map_err(|_| Error::Parse(format!("bad hierarchy level `{level}`")))?;
        return Ok(build_hierarchy_pencil(p, level)?.to_float());
    }
    Err(Error::Parse(format!(
        "unknown relaxation `{spec}` (expected pencil | inf | hierarchy:<k>)"
    )))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).unwrap());
}

fn opt_gauge(g: Option<f64>) -> serde_json::Value {
    match g {
        Some(v) => json!(v),
        None => json!("inf"),
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn dispatch(cmd: &Command, config: &RunConfig) -> Result<ExitCode, Error> {
    match cmd {
        Command::Rzcheck {
            poly,
            trials,
            strict_quadratic,
        } => cmd_rzcheck(poly, *trials, *strict_quadratic, config),
        Command::Moments {
            poly,
            virtual_degree,
            cutoff,
        } => cmd_moments(poly, *virtual_degree, *cutoff, config),
        Command::Pencil {
            poly,
            virtual_degree,
            inf,
            hierarchy,
        } => cmd_pencil(poly, *virtual_degree, *inf, *hierarchy, config),
        Command::Halfspace {
            poly,
            virtual_degree,
        } => cmd_halfspace(poly, *virtual_degree, config),
        Command::Member { poly, point } => cmd_member(poly, point, config),
        Command::Gauge { poly, dir, relax } => cmd_gauge(poly, dir, relax, config),
        Command::Sweep {
            poly,
            rays,
            relax,
            format,
        } => cmd_sweep(poly, *rays, relax, format.as_deref(), config),
        Command::Hierarchy { poly, level, rays } => cmd_hierarchy(poly, *level, *rays, config),
        Command::Cone {
            poly,
            dir,
            point,
            trials,
        } => cmd_cone(poly, dir, point.as_deref(), *trials, config),
        Command::Detrep { which } => cmd_detrep(which, config),
        Command::Amalgamate {
            mode,
            p,
            q,
            shared,
            degree,
        } => cmd_amalgamate(mode, p, q, *shared, *degree, config),
        Command::Tighten {
            poly,
            anchors,
            rays,
        } => cmd_tighten(poly, anchors, *rays, config),
        Command::Plot { input, output } => cmd_plot(input, output.as_deref()),
    }
}

fn cmd_rzcheck(
    arg: &PolyArg,
    trials: u32,
    strict_quadratic: bool,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    let quadratic = p.degree().unwrap_or(0) <= 2;
    if strict_quadratic && quadratic {
        let (_, verdict) = geometry::quadratic_rz_certificate(&p)?;
        let passed = verdict != PsdVerdict::NotPsd;
        print_json(&json!({
            "seed": config.seed,
            "command": "rzcheck",
            "polynomial": p.to_string(),
            "method": "exact quadratic certificate",
            "passed": passed,
            "certificate_verdict": format!("{verdict:?}"),
        }));
        return Ok(if passed {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    let verdict = geometry::real_zero_probe(&p, trials, config.root_tol, config.seed)?;
    print_json(&json!({
        "seed": config.seed,
        "command": "rzcheck",
        "polynomial": p.to_string(),
        "method": "probabilistic probe (evidence, not proof)",
        "passed": verdict.passed,
        "directions_tested": verdict.directions_tested,
        "tolerance": verdict.tolerance,
        "counterexample": verdict.counterexample.map(|(dir, root)| json!({
            "direction": dir,
            "root": {"re": root.0, "im": root.1},
        })),
    }));
    Ok(if verdict.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_moments(
    arg: &PolyArg,
    virt: Option<u32>,
    cutoff: u32,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    if cutoff > config.max_cutoff {
        return Err(Error::Capacity(format!(
            "cutoff {cutoff} above configured cap {}",
            config.max_cutoff
        )));
    }
    let d = virtual_degree_or_default(&p, virt);
    let table = moment_table(&p, d, cutoff)?;
    let rows: Vec<serde_json::Value> = table
        .entries()
        .map(|(m, v)| json!({"monomial": m.to_string(), "value": v.to_string()}))
        .collect();
    print_json(&json!({
        "seed": config.seed,
        "command": "moments",
        "polynomial": p.to_string(),
        "n_vars": table.n_vars(),
        "virtual_degree": table.virtual_degree(),
        "cutoff": table.cutoff(),
        "rows": rows,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_pencil(
    arg: &PolyArg,
    virt: Option<u32>,
    inf: bool,
    hierarchy: Option<u32>,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    let d = virtual_degree_or_default(&p, virt);
    let (kind, pencil) = if let Some(level) = hierarchy {
        ("hierarchy", build_hierarchy_pencil(&p, level)?)
    } else if inf {
        ("infinite virtual degree", {
            let table = moment_table(&p, d, 3)?;
            build_pencil_inf(&table)?
        })
    } else {
        ("base", {
            let table = moment_table(&p, d, 3)?;
            build_pencil(&table)?
        })
    };
    print_json(&json!({
        "seed": config.seed,
        "command": "pencil",
        "polynomial": p.to_string(),
        "kind": kind,
        "virtual_degree": d,
        "size": pencil.size(),
        "pencil": pencil,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_halfspace(
    arg: &PolyArg,
    virt: Option<u32>,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    let d = virtual_degree_or_default(&p, virt);
    let table = moment_table(&p, d, 3)?;
    let h = pencil::halfspace(&table)?;
    print_json(&json!({
        "seed": config.seed,
        "command": "halfspace",
        "polynomial": p.to_string(),
        "inequality": h,
        "full_space": h.is_full_space(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_member(arg: &PolyArg, point: &str, config: &RunConfig) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    let a = parse_vector(point, p.n_vars())?;
    let in_set = geometry::member_c(&p, &a)?;
    let d = p.degree().unwrap_or(0);
    let table = moment_table(&p, d, 3)?;
    let pencil = build_pencil(&table)?.to_float();
    let m = pencil.eval(&a)?;
    let lambda_min = rz_core::linalg::min_eigenvalue(&m)?;
    let scale = 1.0 + m.frobenius_norm();
    let relax_verdict = if lambda_min >= -config.psd_tol * scale {
        PsdVerdict::Psd
    } else if lambda_min < -100.0 * config.psd_tol * scale {
        PsdVerdict::NotPsd
    } else {
        PsdVerdict::Marginal
    };
    print_json(&json!({
        "seed": config.seed,
        "command": "member",
        "polynomial": p.to_string(),
        "point": a,
        "in_set": in_set,
        "relaxation_verdict": format!("{relax_verdict:?}"),
        "lambda_min": lambda_min,
    }));
    Ok(if in_set && relax_verdict != PsdVerdict::NotPsd {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gauge(
    arg: &PolyArg,
    dir: &str,
    relax: &str,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    let a = parse_vector(dir, p.n_vars())?;
    let gc = geometry::ray_gauge_c(&p, &a)?;
    let pencil = relaxation_pencil(&p, relax, None)?;
    let gs = geometry::ray_gauge_s(&pencil, &a, DEFAULT_T_MAX)?;
    let ratio = match (gc.gauge, gs.gauge) {
        (Some(c), Some(s)) => json!(s / c),
        (None, None) => json!(1.0),
        _ => json!("inf"),
    };
    // Relaxation exactness along this ray, judged at the configured gauge
    // tolerance (relative beyond the unit scale).
    let exact_here = match (gc.gauge, gs.gauge) {
        (Some(c), Some(s)) => (c - s).abs() <= config.gauge_tol * c.abs().max(1.0),
        (None, None) => true,
        _ => false,
    };
    print_json(&json!({
        "seed": config.seed,
        "command": "gauge",
        "polynomial": p.to_string(),
        "direction": a,
        "relaxation": relax,
        "gauge_c": opt_gauge(gc.gauge),
        "gauge_s": opt_gauge(gs.gauge),
        "ratio": ratio,
        "exact_within_tolerance": exact_here,
        "gauge_tolerance": config.gauge_tol,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    arg: &PolyArg,
    rays: u32,
    relax: &str,
    format: Option<&str>,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    require_variables(&p)?;
    let pencil = relaxation_pencil(&p, relax, None)?;
    let rows = geometry::sweep(&p, &pencil, rays, config.seed)?;
    let format = match format {
        Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            return Err(Error::Parse(format!("unknown format `{other}`")));
        }
        None => config.format,
    };
    match format {
        OutputFormat::Csv => {
            println!("# seed {}", config.seed);
            let n = p.n_vars();
            let dirs: Vec<String> = (1..=n).map(|i| format!("dir_{i}")).collect();
            println!("ray_index,{},gauge_C,gauge_S,ratio", dirs.join(","));
            for row in rows {
                let dir: Vec<String> = row.direction.iter().map(|x| x.to_string()).collect();
                let fmt = |g: Option<f64>| match g {
                    Some(v) => v.to_string(),
                    None => "inf".to_string(),
                };
                println!(
                    "{},{},{},{},{}",
                    row.ray_index,
                    dir.join(","),
                    fmt(row.gauge_c),
                    fmt(row.gauge_s),
                    fmt(row.ratio),
                );
            }
        }
        OutputFormat::Json => {
            print_json(&json!({
                "seed": config.seed,
                "command": "sweep",
                "polynomial": p.to_string(),
                "relaxation": relax,
                "rows": rows,
            }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_hierarchy(
    arg: &PolyArg,
    level: u32,
    rays: u32,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    require_variables(&p)?;
    let pencils: Result<Vec<_>, Error> = (1..=level)
        .map(|k| Ok(build_hierarchy_pencil(&p, k)?.to_float()))
        .collect();
    let pencils = pencils?;
    let mut rng = SplitMix64::new(config.seed);
    let mut ray_rows = Vec::new();
    for ray in 0..rays {
        let dir = rng.unit_vector(p.n_vars());
        let gc = geometry::ray_gauge_c(&p, &dir)?;
        let mut levels = Vec::new();
        for m in &pencils {
            let gs = geometry::ray_gauge_s(m, &dir, DEFAULT_T_MAX)?;
            levels.push(opt_gauge(gs.gauge));
        }
        ray_rows.push(json!({
            "ray_index": ray,
            "direction": dir,
            "gauge_c": opt_gauge(gc.gauge),
            "gauge_levels": levels,
        }));
    }
    print_json(&json!({
        "seed": config.seed,
        "command": "hierarchy",
        "polynomial": p.to_string(),
        "levels": (1..=level).collect::<Vec<u32>>(),
        "sizes": pencils.iter().map(|m| m.size()).collect::<Vec<usize>>(),
        "rays": ray_rows,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_cone(
    arg: &PolyArg,
    dir: &str,
    point: Option<&str>,
    trials: u32,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    let e = parse_vector(dir, p.n_vars())?;
    let probe = geometry::hyperbolicity_probe(&p, &e, trials, config.root_tol, config.seed)?;
    let mut result = json!({
        "seed": config.seed,
        "command": "cone",
        "polynomial": p.to_string(),
        "direction": e,
        "hyperbolic": probe.passed,
        "directions_tested": probe.directions_tested,
        "method": "probabilistic probe (evidence, not proof)",
    });
    let mut negative = !probe.passed;
    if probe.passed {
        if let Some(point) = point {
            let a = parse_vector(point, p.n_vars())?;
            let ev = geometry::eigenvalues_dir(&p, &e, &a, config.root_tol)?;
            let trace = geometry::trace_dir(&p, &e, &a, config.root_tol)?;
            let member = geometry::cone_member(&p, &e, &a, config.root_tol)?;
            negative = !member;
            result["point"] = json!(a);
            result["eigenvalues"] = json!(ev);
            result["trace"] = json!(trace);
            result["in_cone"] = json!(member);
        }
    }
    print_json(&result);
    Ok(if negative {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_detrep(which: &DetrepCommand, config: &RunConfig) -> Result<ExitCode, Error> {
    match which {
        DetrepCommand::Quad2 { poly } => {
            let p = parse_poly(poly, config)?;
            let rep = rz_core::detrep::hv2_quadratic(&p)?;
            let expansion = moments::detrep_expand(&rep)?;
            print_json(&json!({
                "seed": config.seed,
                "command": "detrep quad2",
                "polynomial": p.to_string(),
                "representation": rep,
                "expansion": expansion.to_string(),
            }));
        }
        DetrepCommand::Lincofactor { poly } => {
            let p = parse_poly(poly, config)?;
            let rep = rz_core::detrep::lincofactor_rep(&p)?;
            let expansion = moments::detrep_expand(&rep)?;
            print_json(&json!({
                "seed": config.seed,
                "command": "detrep lincofactor",
                "polynomial": p.to_string(),
                "cofactor_power": p.n_vars() - 1,
                "representation": rep,
                "expansion": expansion.to_string(),
            }));
        }
        DetrepCommand::Saunderson { dim } => {
            let sp = rz_core::detrep::saunderson_pencil(*dim)?;
            print_json(&json!({
                "seed": config.seed,
                "command": "detrep saunderson",
                "dim": sp.dim,
                "n_vars": sp.basis.len(),
                "full_blocks": sp.full.blocks(),
                "reduced_blocks": sp.reduced.blocks(),
                "basis": sp.basis,
            }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_amalgamate(
    mode: &str,
    p_text: &str,
    q_text: &str,
    shared: usize,
    degree: Option<u32>,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = Polynomial::parse(p_text)?;
    let q = Polynomial::parse(q_text)?;
    let result = match mode {
        "disjoint" => {
            let d = degree
                .unwrap_or_else(|| p.degree().unwrap_or(0).max(q.degree().unwrap_or(0)));
            rz_core::amalgam::amalgamate_disjoint(&p, &q, d)?
        }
        "quadratic" => {
            let prob = rz_core::amalgam::AmalgamProblem::new(shared, p.clone(), q.clone(), 2)?;
            rz_core::amalgam::amalgamate_quadratic(&prob)?
        }
        "deg2" => rz_core::amalgam::amalgamate_deg2_onevar(&p, &q)?,
        other => {
            return Err(Error::Parse(format!(
                "unknown mode `{other}` (expected disjoint | quadratic | deg2)"
            )));
        }
    };
    let probe = geometry::real_zero_probe(&result, 64, config.root_tol, config.seed)?;
    print_json(&json!({
        "seed": config.seed,
        "command": "amalgamate",
        "mode": mode,
        "p": p.to_string(),
        "q": q.to_string(),
        "result": result.to_string(),
        "degree": result.degree(),
        "real_zero_probe_passed": probe.passed,
    }));
    Ok(if probe.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_tighten(
    arg: &PolyArg,
    anchors_path: &str,
    rays: u32,
    config: &RunConfig,
) -> Result<ExitCode, Error> {
    let p = parse_poly(arg, config)?;
    require_variables(&p)?;
    let text = std::fs::read_to_string(anchors_path)
        .map_err(|e| Error::Parse(format!("cannot read anchors {anchors_path}: {e}")))?;
    let raw: Vec<Vec<serde_json::Value>> = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("bad anchors file: {e}")))?;
    let anchors: Result<Vec<Vec<Rat>>, Error> = raw
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => parse_rat(s),
                    serde_json::Value::Number(x) => rz_core::poly::rat_from_f64(
                        x.as_f64().ok_or(Error::NonFinite("anchor"))?,
                    ),
                    _ => Err(Error::Parse("anchor entries must be numbers".into())),
                })
                .collect()
        })
        .collect();
    let anchors = anchors?;
    let family = pencil::shifted_pencil_family(&p, &anchors)?;
    let float_family: Vec<(Vec<f64>, pencil::FloatPencil)> = family
        .iter()
        .map(|m| {
            (
                m.anchor.iter().map(rat_to_f64).collect(),
                m.pencil.to_float(),
            )
        })
        .collect();
    let mut rng = SplitMix64::new(config.seed);
    let mut rows = Vec::new();
    let mut sum_before = 0.0f64;
    let mut sum_after = 0.0f64;
    let mut counted = 0u32;
    let mut tight_rays = 0u32;
    for ray in 0..rays {
        let dir = rng.unit_vector(p.n_vars());
        let gc = geometry::ray_gauge_c(&p, &dir)?.gauge;
        // Intersection gauge: the smallest family gauge along the ray.
        let mut family_gauge: Option<f64> = None;
        let mut plain_gauge: Option<f64> = None;
        for (anchor, pencil) in &float_family {
            let offset: Vec<f64> = anchor.iter().map(|x| -x).collect();
            let g = geometry::line_gauge_s(pencil, &offset, &dir, DEFAULT_T_MAX)?.gauge;
            if anchor.iter().all(|&x| x == 0.0) {
                plain_gauge = g;
            }
            family_gauge = match (family_gauge, g) {
                (None, g) => g,
                (f, None) => f,
                (Some(f), Some(g)) => Some(f.min(g)),
            };
        }
        let overshoot = |s: Option<f64>| match (gc, s) {
            (Some(c), Some(s)) => Some(s - c),
            _ => None,
        };
        let before = overshoot(plain_gauge);
        let after = overshoot(family_gauge);
        if let (Some(b), Some(a)) = (before, after) {
            sum_before += b;
            sum_after += a;
            counted += 1;
            if a <= config.gauge_tol {
                tight_rays += 1;
            }
        }
        rows.push(json!({
            "ray_index": ray,
            "direction": dir,
            "gauge_c": opt_gauge(gc),
            "gauge_plain": opt_gauge(plain_gauge),
            "gauge_family": opt_gauge(family_gauge),
            "overshoot_plain": before,
            "overshoot_family": after,
        }));
    }
    print_json(&json!({
        "seed": config.seed,
        "command": "tighten",
        "polynomial": p.to_string(),
        "anchors": anchors
            .iter()
            .map(|a| a.iter().map(|r| r.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "rays": rows,
        "mean_overshoot_plain": if counted > 0 { json!(sum_before / counted as f64) } else { json!(null) },
        "mean_overshoot_family": if counted > 0 { json!(sum_after / counted as f64) } else { json!(null) },
        "rays_tight_within_tolerance": tight_rays,
        "gauge_tolerance": config.gauge_tol,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(input: &str, output: Option<&str>) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::Parse(format!("cannot read {input}: {e}")))?;
    let svg = svg::polar_plot_from_csv(&text)?;
    match output {
        Some(path) => std::fs::write(path, svg)
            .map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?,
        None => println!("{svg}"),
    }
    Ok(ExitCode::SUCCESS)
}
