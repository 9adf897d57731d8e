//! Command-line front end. Every number printed here comes from a library
//! call; this binary only parses flags, routes output, and maps failures to
//! exit codes: 0 success, 1 domain error (invalid classes or parameters,
//! malformed instance data, failed verification), 2 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use dys_srg::classes::{AlgoParams, FunctionClassParams};
use dys_srg::engine::{run_iteration, DysInstance, QuadraticSpec};
use dys_srg::rates::{
    compare_all, r_optimized_rate, theorem1_rates, theorem2_rate, RSearchConfig, RateResult,
};
use dys_srg::symbol::estimate_sup_modulus;
use dys_srg::util::fmt_f64;
use dys_srg::verify::{run_battery, VerifyConfig};

use dys_srg_cli::output::{params_value, rate_value, render_json, write_cloud_csv,
    write_cloud_json, write_iteration_csv, write_rates_csv};
use dys_srg_cli::svg::{write_cloud_svg, RateCircle};

#[derive(Parser)]
#[command(
    name = "dys-srg",
    version,
    about = "Certified linear rates for Davis-Yin splitting over SRG function classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every closed-form contraction bound on one class triple
    Rates {
        #[command(flatten)]
        problem: ProblemFlags,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Sample the DYS symbol over the SRG boundary circles and export the cloud
    Srg {
        #[command(flatten)]
        problem: ProblemFlags,
        /// samples per circle; the cloud has grid-n cubed points
        #[arg(long = "grid-n", default_value_t = 64)]
        grid_n: usize,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Reference-figure reproduction: closed-form rates vs. the sampled sup
    Figure1 {
        #[command(flatten)]
        problem: ProblemFlags,
        /// samples per circle for the sup estimate
        #[arg(long = "grid-n", default_value_t = 256)]
        grid_n: usize,
        /// samples per circle for the rendered cloud (csv or svg --out)
        #[arg(long = "plot-grid-n", default_value_t = 64)]
        plot_grid_n: usize,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Run the randomized cross-checking battery
    Verify {
        /// seed for every randomized draw; same seed, same report
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// samples per circle in the sampled-sup soundness check
        #[arg(long = "grid-n", default_value_t = 256)]
        grid_n: usize,
        /// also write the report to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the splitting operator on a diagonal quadratic instance
    Iterate {
        /// instance file: one "c_f c_g c_h b_f b_g b_h" row per coordinate;
        /// '#' starts a comment
        #[arg(long)]
        instance: Option<PathBuf>,
        /// f curvatures, comma-separated (inline alternative to --instance)
        #[arg(long = "c_f", value_delimiter = ',', conflicts_with = "instance")]
        c_f: Vec<f64>,
        /// g curvatures, comma-separated
        #[arg(long = "c_g", value_delimiter = ',', conflicts_with = "instance")]
        c_g: Vec<f64>,
        /// h curvatures, comma-separated
        #[arg(long = "c_h", value_delimiter = ',', conflicts_with = "instance")]
        c_h: Vec<f64>,
        /// f linear terms, comma-separated (default all zero)
        #[arg(long = "b_f", value_delimiter = ',', conflicts_with = "instance")]
        b_f: Vec<f64>,
        /// g linear terms, comma-separated (default all zero)
        #[arg(long = "b_g", value_delimiter = ',', conflicts_with = "instance")]
        b_g: Vec<f64>,
        /// h linear terms, comma-separated (default all zero)
        #[arg(long = "b_h", value_delimiter = ',', conflicts_with = "instance")]
        b_h: Vec<f64>,
        /// number of iteration steps
        #[arg(long, default_value_t = 50)]
        iters: usize,
        /// starting point, comma-separated (default all ones)
        #[arg(long, value_delimiter = ',')]
        z0: Vec<f64>,
        /// companion starting point for contraction ratios (default all zeros)
        #[arg(long, value_delimiter = ',')]
        w0: Vec<f64>,
        #[command(flatten)]
        problem: ProblemFlags,
        #[command(flatten)]
        io: IoFlags,
    },
}

/// Class bounds and algorithm parameters. Defaults reproduce the reference
/// figure. Pass "inf" for a smoothness bound to drop it.
#[derive(Args)]
struct ProblemFlags {
    /// strong-convexity modulus of f
    #[arg(long = "mu_f", default_value_t = 0.7)]
    mu_f: f64,
    /// smoothness bound of f ("inf" for none)
    #[arg(long = "L_f", default_value_t = 1.5)]
    l_f: f64,
    /// strong-convexity modulus of g
    #[arg(long = "mu_g", default_value_t = 2.0)]
    mu_g: f64,
    /// smoothness bound of g ("inf" for none)
    #[arg(long = "L_g", default_value_t = 3.0)]
    l_g: f64,
    /// strong-convexity modulus of h
    #[arg(long = "mu_h", default_value_t = 0.8)]
    mu_h: f64,
    /// smoothness bound of h ("inf" for none)
    #[arg(long = "L_h", default_value_t = 1.3)]
    l_h: f64,
    /// resolvent stepsize
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// relaxation parameter
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

#[derive(Args)]
struct IoFlags {
    /// output format (per-command default: csv for tables and clouds, json
    /// for the figure summary)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// write the primary output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

enum Failure {
    /// invalid values or data: exit 1
    Domain(String),
    /// malformed flag combinations: exit 2
    Usage(String),
}

impl Failure {
    fn domain(msg: impl Into<String>) -> Self {
        Failure::Domain(msg.into())
    }

    fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Rates { problem, io } => cmd_rates(&problem, &io),
        Command::Srg { problem, grid_n, io } => cmd_srg(&problem, grid_n, &io),
        Command::Figure1 {
            problem,
            grid_n,
            plot_grid_n,
            io,
        } => cmd_figure1(&problem, grid_n, plot_grid_n, &io),
        Command::Verify { seed, grid_n, out } => cmd_verify(seed, grid_n, out.as_deref()),
        Command::Iterate {
            instance,
            c_f,
            c_g,
            c_h,
            b_f,
            b_g,
            b_h,
            iters,
            z0,
            w0,
            problem,
            io,
        } => cmd_iterate(
            instance.as_deref(),
            InlineSpecs {
                c_f,
                c_g,
                c_h,
                b_f,
                b_g,
                b_h,
            },
            iters,
            z0,
            w0,
            &problem,
            &io,
        ),
    }
}

struct Problem {
    f: FunctionClassParams,
    g: FunctionClassParams,
    h: FunctionClassParams,
    params: AlgoParams,
}

fn build_problem(p: &ProblemFlags) -> Result<Problem, Failure> {
    let f = FunctionClassParams::from_bounds(p.mu_f, p.l_f)
        .map_err(|e| Failure::domain(format!("mu_f/L_f: {e}")))?;
    let g = FunctionClassParams::from_bounds(p.mu_g, p.l_g)
        .map_err(|e| Failure::domain(format!("mu_g/L_g: {e}")))?;
    let h = FunctionClassParams::from_bounds(p.mu_h, p.l_h)
        .map_err(|e| Failure::domain(format!("mu_h/L_h: {e}")))?;
    let params = AlgoParams::new(p.alpha, p.lambda)
        .map_err(|e| Failure::domain(format!("alpha/lambda: {e}")))?;
    Ok(Problem { f, g, h, params })
}

fn require_finite_l_h(pr: &Problem) -> Result<(), Failure> {
    if pr.h.l().is_finite() {
        Ok(())
    } else {
        Err(Failure::domain(
            "L_h: sampling the symbol needs a finite smoothness bound for h \
             (the gradient circle is unbounded otherwise)",
        ))
    }
}

fn require_grid(grid_n: usize) -> Result<(), Failure> {
    if grid_n >= 1 {
        Ok(())
    } else {
        Err(Failure::usage("--grid-n must be at least 1"))
    }
}

/// Routes a streaming writer to --out or stdout.
fn with_writer(
    out: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    let run_into = |w: &mut dyn Write| body(w).and_then(|_| w.flush());
    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| Failure::domain(format!("{}: {e}", path.display())))?;
            let mut w = io::BufWriter::new(file);
            run_into(&mut w).map_err(|e| Failure::domain(format!("{}: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            run_into(&mut w).map_err(|e| Failure::domain(format!("stdout: {e}")))
        }
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    with_writer(out, |w| w.write_all(text.as_bytes()))
}

/// Summary lines accompany a data stream: they go to stdout when the data
/// went to a file, to stderr when the data owns stdout.
fn emit_summary(out_used: bool, lines: &str) {
    if out_used {
        print!("{lines}");
        let _ = io::stdout().flush();
    } else {
        eprint!("{lines}");
        let _ = io::stderr().flush();
    }
}

/// The four headline circles (one-sided pair, two-sided, r-optimized),
/// keeping only the ones whose hypotheses hold.
fn headline_circles(results: &[&RateResult; 4]) -> Vec<RateCircle> {
    let labels = ["rho_f", "rho_g", "rho_theorem2", "rho_r_opt"];
    results
        .iter()
        .zip(labels)
        .filter_map(|(r, label)| r.rho.map(|rho| RateCircle { label, rho }))
        .collect()
}

fn cmd_rates(problem: &ProblemFlags, io_flags: &IoFlags) -> Result<(), Failure> {
    let pr = build_problem(problem)?;
    let rates = compare_all(&pr.f, &pr.g, &pr.h, &pr.params);
    match io_flags.format.unwrap_or(Format::Csv) {
        Format::Csv => with_writer(io_flags.out.as_deref(), |w| write_rates_csv(w, &rates)),
        Format::Json => {
            let mut m = serde_json::Map::new();
            m.insert("params".into(), params_value(&pr.f, &pr.g, &pr.h, &pr.params, None));
            m.insert(
                "rates".into(),
                Value::Array(rates.iter().map(rate_value).collect()),
            );
            write_text(io_flags.out.as_deref(), &render_json(&Value::Object(m)))
        }
        Format::Svg => Err(Failure::usage(
            "svg applies to the srg and figure1 commands; rates is a table",
        )),
    }
}

fn cmd_srg(problem: &ProblemFlags, grid_n: usize, io_flags: &IoFlags) -> Result<(), Failure> {
    require_grid(grid_n)?;
    let pr = build_problem(problem)?;
    require_finite_l_h(&pr)?;
    let est = estimate_sup_modulus(&pr.f, &pr.g, &pr.h, &pr.params, grid_n)
        .map_err(|e| Failure::domain(format!("L_h: {e}")))?;
    match io_flags.format.unwrap_or(Format::Csv) {
        Format::Csv => with_writer(io_flags.out.as_deref(), |w| {
            write_cloud_csv(w, &pr.f, &pr.g, &pr.h, &pr.params, grid_n)
        })?,
        Format::Json => with_writer(io_flags.out.as_deref(), |w| {
            write_cloud_json(w, &pr.f, &pr.g, &pr.h, &pr.params, grid_n, est.sup_modulus)
        })?,
        Format::Svg => {
            let (rf, rg) = theorem1_rates(&pr.f, &pr.g, &pr.h, &pr.params);
            let t2 = theorem2_rate(&pr.f, &pr.g, &pr.h, &pr.params);
            let ropt = r_optimized_rate(&pr.f, &pr.g, &pr.h, &pr.params, &RSearchConfig::default());
            let circles = headline_circles(&[&rf, &rg, &t2, &ropt]);
            with_writer(io_flags.out.as_deref(), |w| {
                write_cloud_svg(
                    w,
                    &pr.f,
                    &pr.g,
                    &pr.h,
                    &pr.params,
                    grid_n,
                    &circles,
                    est.sup_modulus,
                )
            })?
        }
    }
    emit_summary(
        io_flags.out.is_some(),
        &format!("sup_modulus = {}\n", fmt_f64(est.sup_modulus)),
    );
    Ok(())
}

fn cmd_figure1(
    problem: &ProblemFlags,
    grid_n: usize,
    plot_grid_n: usize,
    io_flags: &IoFlags,
) -> Result<(), Failure> {
    require_grid(grid_n)?;
    require_grid(plot_grid_n)?;
    if io_flags.format.is_some() && io_flags.out.is_none() {
        return Err(Failure::usage(
            "--format for figure1 selects the --out artifact; the summary always owns stdout",
        ));
    }
    let pr = build_problem(problem)?;
    require_finite_l_h(&pr)?;
    let (rf, rg) = theorem1_rates(&pr.f, &pr.g, &pr.h, &pr.params);
    let t2 = theorem2_rate(&pr.f, &pr.g, &pr.h, &pr.params);
    let ropt = r_optimized_rate(&pr.f, &pr.g, &pr.h, &pr.params, &RSearchConfig::default());
    let est = estimate_sup_modulus(&pr.f, &pr.g, &pr.h, &pr.params, grid_n)
        .map_err(|e| Failure::domain(format!("L_h: {e}")))?;

    let opt = |x: Option<f64>| x.map(Value::from).unwrap_or(Value::Null);
    let mut m = serde_json::Map::new();
    m.insert(
        "params".into(),
        params_value(&pr.f, &pr.g, &pr.h, &pr.params, Some(grid_n)),
    );
    m.insert("rho_f".into(), opt(rf.rho));
    m.insert("rho_g".into(), opt(rg.rho));
    m.insert("rho_theorem2".into(), opt(t2.rho));
    m.insert("rho_r_opt".into(), opt(ropt.rho));
    m.insert("r_star".into(), opt(ropt.breakdown.r));
    m.insert("sup_modulus".into(), Value::from(est.sup_modulus));
    m.insert("margin".into(), opt(rg.rho.map(|r| r - est.sup_modulus)));
    let summary = render_json(&Value::Object(m));
    print!("{summary}");
    let _ = io::stdout().flush();

    if let Some(path) = io_flags.out.as_deref() {
        match io_flags.format.unwrap_or(Format::Json) {
            Format::Json => write_text(Some(path), &summary)?,
            Format::Csv => with_writer(Some(path), |w| {
                write_cloud_csv(w, &pr.f, &pr.g, &pr.h, &pr.params, plot_grid_n)
            })?,
            Format::Svg => {
                let circles = headline_circles(&[&rf, &rg, &t2, &ropt]);
                with_writer(Some(path), |w| {
                    write_cloud_svg(
                        w,
                        &pr.f,
                        &pr.g,
                        &pr.h,
                        &pr.params,
                        plot_grid_n,
                        &circles,
                        est.sup_modulus,
                    )
                })?
            }
        }
    }
    Ok(())
}

fn cmd_verify(seed: u64, grid_n: usize, out: Option<&Path>) -> Result<(), Failure> {
    require_grid(grid_n)?;
    let report = run_battery(&VerifyConfig { seed, grid_n });
    let text = report.render();
    print!("{text}");
    let _ = io::stdout().flush();
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Failure::domain(format!("{}: {e}", path.display())))?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(Failure::domain(format!(
            "{failed} of {} checks failed",
            report.checks.len()
        )))
    }
}

struct InlineSpecs {
    c_f: Vec<f64>,
    c_g: Vec<f64>,
    c_h: Vec<f64>,
    b_f: Vec<f64>,
    b_g: Vec<f64>,
    b_h: Vec<f64>,
}

fn quad(name: &str, c: Vec<f64>, b: Vec<f64>) -> Result<QuadraticSpec, Failure> {
    QuadraticSpec::new(c, b).map_err(|e| Failure::domain(format!("{name}: {e}")))
}

fn build_inline_instance(specs: InlineSpecs) -> Result<(QuadraticSpec, QuadraticSpec, QuadraticSpec), Failure> {
    let dim = specs.c_f.len();
    if specs.c_g.len() != dim || specs.c_h.len() != dim {
        return Err(Failure::domain(format!(
            "curvature lists disagree on dimension: c_f has {dim} entries; c_g has {}; c_h has {}",
            specs.c_g.len(),
            specs.c_h.len()
        )));
    }
    let linear = |name: &str, v: Vec<f64>| -> Result<Vec<f64>, Failure> {
        if v.is_empty() {
            Ok(vec![0.0; dim])
        } else if v.len() == dim {
            Ok(v)
        } else {
            Err(Failure::domain(format!(
                "{name} has {} entries; the instance dimension is {dim}",
                v.len()
            )))
        }
    };
    let b_f = linear("b_f", specs.b_f)?;
    let b_g = linear("b_g", specs.b_g)?;
    let b_h = linear("b_h", specs.b_h)?;
    Ok((
        quad("f quadratic", specs.c_f, b_f)?,
        quad("g quadratic", specs.c_g, b_g)?,
        quad("h quadratic", specs.c_h, b_h)?,
    ))
}

fn parse_instance_file(path: &Path) -> Result<(QuadraticSpec, QuadraticSpec, QuadraticSpec), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::domain(format!("{}: {e}", path.display())))?;
    let mut cols: [Vec<f64>; 6] = Default::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::domain(format!("row {}: {e}", lineno + 1)))?;
        if vals.len() != 6 {
            return Err(Failure::domain(format!(
                "row {}: expected 6 values (c_f c_g c_h b_f b_g b_h); got {}",
                lineno + 1,
                vals.len()
            )));
        }
        for (col, v) in cols.iter_mut().zip(&vals) {
            col.push(*v);
        }
    }
    let [c_f, c_g, c_h, b_f, b_g, b_h] = cols;
    if c_f.is_empty() {
        return Err(Failure::domain(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok((
        quad("f quadratic", c_f, b_f)?,
        quad("g quadratic", c_g, b_g)?,
        quad("h quadratic", c_h, b_h)?,
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_iterate(
    instance: Option<&Path>,
    specs: InlineSpecs,
    iters: usize,
    z0: Vec<f64>,
    w0: Vec<f64>,
    problem: &ProblemFlags,
    io_flags: &IoFlags,
) -> Result<(), Failure> {
    if iters == 0 {
        return Err(Failure::usage("--iters must be at least 1"));
    }
    let pr = build_problem(problem)?;
    let (fq, gq, hq) = match instance {
        Some(path) => parse_instance_file(path)?,
        None => {
            if specs.c_f.is_empty() || specs.c_g.is_empty() || specs.c_h.is_empty() {
                return Err(Failure::usage(
                    "supply --instance FILE or all three of --c_f/--c_g/--c_h",
                ));
            }
            build_inline_instance(specs)?
        }
    };
    let inst = DysInstance::new(fq, gq, hq, pr.params)
        .map_err(|e| Failure::domain(e.to_string()))?;
    let dim = inst.dim();
    let start = |name: &str, v: Vec<f64>, fill: f64| -> Result<Vec<f64>, Failure> {
        if v.is_empty() {
            Ok(vec![fill; dim])
        } else if v.len() == dim {
            Ok(v)
        } else {
            Err(Failure::domain(format!(
                "{name} has {} entries; the instance dimension is {dim}",
                v.len()
            )))
        }
    };
    let z0 = start("z0", z0, 1.0)?;
    let w0 = start("w0", w0, 0.0)?;
    let log = run_iteration(&inst, &z0, &w0, iters)
        .map_err(|e| Failure::domain(e.to_string()))?;

    match io_flags.format.unwrap_or(Format::Csv) {
        Format::Csv => with_writer(io_flags.out.as_deref(), |w| {
            write_iteration_csv(w, &log.residuals, &log.pair_ratios)
        })?,
        Format::Json => {
            let row = |v: &[f64]| Value::Array(v.iter().map(|x| Value::from(*x)).collect());
            let mut m = serde_json::Map::new();
            m.insert(
                "params".into(),
                params_value(&pr.f, &pr.g, &pr.h, &pr.params, None),
            );
            m.insert(
                "iterates".into(),
                Value::Array(log.iterates.iter().map(|z| row(z)).collect()),
            );
            m.insert("residuals".into(), row(&log.residuals));
            m.insert("pair_ratios".into(), row(&log.pair_ratios));
            write_text(io_flags.out.as_deref(), &render_json(&Value::Object(m)))?
        }
        Format::Svg => {
            return Err(Failure::usage(
                "svg applies to the srg and figure1 commands; iterate emits a log",
            ))
        }
    }

    let final_residual = *log.residuals.last().expect("iters >= 1");
    let max_ratio = log.pair_ratios.iter().copied().fold(0.0f64, f64::max);
    let rates = compare_all(&pr.f, &pr.g, &pr.h, &pr.params);
    let best = rates
        .iter()
        .filter_map(|r| r.rho.map(|rho| (rho, r.name)))
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("rates are finite"));
    let in_class =
        inst.f().in_class(&pr.f) && inst.g().in_class(&pr.g) && inst.h().in_class(&pr.h);
    let mut lines = String::new();
    lines.push_str(&format!("final residual = {}\n", fmt_f64(final_residual)));
    lines.push_str(&format!("max pair ratio = {}\n", fmt_f64(max_ratio)));
    match best {
        Some((rho, name)) => {
            lines.push_str(&format!("best certified rate = {} ({name})\n", fmt_f64(rho)))
        }
        None => lines.push_str("best certified rate = none (no bound valid for these flags)\n"),
    }
    lines.push_str(&format!("instance within declared classes: {in_class}\n"));
    emit_summary(io_flags.out.is_some(), &lines);
    Ok(())
}
