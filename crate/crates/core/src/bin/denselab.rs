use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use denselab::config::{parse_config, Config, FitMethod};
use denselab::erm::{fit_kernel_ridge, fit_lipschitz_erm, fit_pairwise, ridge_residual};
use denselab::kernels::{gram_matrix, sup_kernel_norm};
use denselab::lab::{risk_convergence_check, run_study};
use denselab::linalg::{max_abs_entry, min_eigenvalue};
use denselab::metrics::validate_psi;
use denselab::report::{
    emit_report, format_float, read_report_csv, summarize, summary_csv, write_outputs, Manifest,
    SeedSource,
};
use denselab::rkhs::injectivity_probe;
use denselab::{Error, Result};

#[derive(Parser)]
#[command(name = "denselab", version, about = "Kernel methods and RKHS denseness experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix and kernel diagnostics for the [data] points.
    KernelEval(Common),
    /// Fit a kernel model to the [data] set.
    Fit(Common),
    /// Run a convergence study and write one CSV row per cell.
    Study(Common),
    /// Check the [psi] function against the metric axioms.
    ValidatePsi(Common),
    /// Summarize a study CSV per sample size.
    Report(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,
    #[arg(short, action = clap::ArgAction::Count)]
    verbose: u8,
}

struct Ctx {
    cfg: Config,
    base_dir: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    verbosity: u8,
}

impl Ctx {
    fn load(c: Common) -> Result<Ctx> {
        let cfg = parse_config(&c.config)?;
        let base_dir = c
            .config
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Ok(Ctx {
            cfg,
            base_dir,
            out: c.out,
            seed: c.seed,
            verbosity: c.verbose.min(2),
        })
    }

    fn info(&self, level: u8, msg: impl FnOnce() -> String) {
        if self.verbosity >= level {
            eprintln!("{}", msg());
        }
    }

    fn resolve_seed(&self, from_config: u64) -> (u64, SeedSource) {
        match self.seed {
            Some(s) => (s, SeedSource::CommandLine),
            None => (from_config, SeedSource::Config),
        }
    }
}

fn kernel_eval(ctx: Ctx) -> Result<()> {
    let kernel = ctx.cfg.kernel.kernel()?;
    let (pts, _) = ctx.cfg.data.load(&ctx.base_dir)?;
    if pts.is_empty() {
        return Err(Error::Config("[data] inputs must list at least one point".into()));
    }
    let gram = gram_matrix(&kernel, &pts)?;
    let n = pts.len();

    let mut w = String::new();
    let header: Vec<String> = (0..n).map(|j| format!("k{j}")).collect();
    w.push_str(&header.join(","));
    w.push('\n');
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_float(gram[(i, j)])).collect();
        w.push_str(&row.join(","));
        w.push('\n');
    }

    let mut m = Manifest::new("kernel-eval");
    m.config(&ctx.cfg.emit())
        .push("kernel", format!("{kernel:?}"))
        .push("points", n)
        .push("max_abs_entry", format_float(max_abs_entry(&gram)))
        .push("min_eigenvalue", format_float(min_eigenvalue(&gram)))
        .push("sup_kernel_norm", format_float(sup_kernel_norm(&kernel, &pts)?));
    match injectivity_probe(&kernel, &pts) {
        Ok(c) => m.push("injectivity_certified", c.certified()),
        Err(e) => m.push("injectivity_certified", format!("false ({e})")),
    };
    ctx.info(1, || m.render().trim_end().to_string());
    write_outputs(&ctx.out, w.as_bytes(), &m)
}

fn fit(mut ctx: Ctx) -> Result<()> {
    let (seed, source) = ctx.resolve_seed(ctx.cfg.fit.solver.seed);
    ctx.cfg.fit.solver.seed = seed;
    let kernel = ctx.cfg.kernel.kernel()?;
    let data = ctx.cfg.data.dataset(&ctx.base_dir)?;
    let fit = &ctx.cfg.fit;

    let mut m = Manifest::new("fit");
    m.seed(seed, source)
        .config(&ctx.cfg.emit())
        .push("method", format!("{:?}", fit.method))
        .push("loss", format!("{:?}", fit.loss))
        .push("n", data.len());
    let function = match fit.method {
        FitMethod::Ridge => {
            let f = fit_kernel_ridge(&data, &kernel, fit.solver.lambda)?;
            m.push("residual", format_float(ridge_residual(&data, &f, fit.solver.lambda)?));
            f
        }
        FitMethod::Erm | FitMethod::Pairwise => {
            let r = match (fit.loss.pointwise()?, fit.loss.pairwise()) {
                (Some(loss), _) => fit_lipschitz_erm(&data, &kernel, &loss, &fit.solver)?,
                (None, Some(pl)) => fit_pairwise(&data, &kernel, &pl, &fit.solver)?,
                (None, None) => unreachable!("every loss is pointwise or pairwise"),
            };
            m.push("objective", format_float(r.objective))
                .push("iterations", r.iterations)
                .push("grad_norm", format_float(r.grad_norm))
                .push("converged", r.converged);
            r.function
        }
    };
    ctx.info(1, || m.render().trim_end().to_string());

    let d = data.inputs()[0].dim();
    let mut w = String::new();
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.push("alpha".into());
    w.push_str(&header.join(","));
    w.push('\n');
    for (x, a) in function.centers().iter().zip(function.coefficients()) {
        let mut row: Vec<String> = x.coords().iter().map(|v| format_float(*v)).collect();
        row.push(format_float(*a));
        w.push_str(&row.join(","));
        w.push('\n');
    }
    write_outputs(&ctx.out, w.as_bytes(), &m)
}

fn study(mut ctx: Ctx) -> Result<()> {
    let (seed, source) = ctx.resolve_seed(ctx.cfg.study.seed);
    ctx.cfg.study.seed = seed;
    let cfg = ctx.cfg.study_config()?;
    ctx.info(1, || {
        format!(
            "study: {} sample sizes x {} replicates, seed {seed}",
            cfg.sample_sizes.len(),
            cfg.replicates
        )
    });
    let report = run_study(&cfg)?;
    for c in &report.cells {
        ctx.info(2, || format!("n={} replicate={}: {:?}", c.n, c.replicate, c.outcome));
    }
    let mut m = Manifest::new("study");
    m.seed(seed, source).config(&ctx.cfg.emit());
    emit_report(&report, &ctx.out, &m)?;
    if report.is_partial() {
        let failed = report.cells.iter().filter(|c| c.outcome.is_err()).count();
        return Err(Error::Numerical(format!(
            "{failed} of {} cells failed; see the manifest",
            report.cells.len()
        )));
    }
    Ok(())
}

fn validate_psi_cmd(ctx: Ctx) -> Result<()> {
    let p = &ctx.cfg.psi;
    let v = validate_psi(&p.psi, p.grid_max, p.grid_n);
    let mut w = String::from("violation\n");
    for x in &v.violations {
        w.push_str(&format!("\"{x:?}\"\n"));
    }
    let mut m = Manifest::new("validate-psi");
    m.config(&ctx.cfg.emit())
        .push("psi", format!("{:?}", p.psi))
        .push("passed", v.passed());
    write_outputs(&ctx.out, w.as_bytes(), &m)?;
    if v.passed() {
        ctx.info(1, || "psi passes all axioms".to_string());
        Ok(())
    } else {
        Err(Error::Config(format!("psi violates the metric axioms: {:?}", v.violations)))
    }
}

fn report_cmd(ctx: Ctx) -> Result<()> {
    let rel = ctx
        .cfg
        .report
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("[report] input is required".into()))?;
    let input = ctx.base_dir.join(rel);
    let report = read_report_csv(&input)?;
    let lipschitz = ctx.cfg.report.lipschitz;
    let rows = summarize(&report, lipschitz);
    let check = risk_convergence_check(&report, lipschitz);
    let mut m = Manifest::new("report");
    m.config(&ctx.cfg.emit())
        .push("cells", report.cells.len())
        .push("risk_check_passed", check.passed)
        .push("risk_worst_margin", format_float(check.worst_margin));
    ctx.info(1, || m.render().trim_end().to_string());
    write_outputs(&ctx.out, &summary_csv(&rows)?, &m)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::KernelEval(c) => kernel_eval(Ctx::load(c)?),
        Command::Fit(c) => fit(Ctx::load(c)?),
        Command::Study(c) => study(Ctx::load(c)?),
        Command::ValidatePsi(c) => validate_psi_cmd(Ctx::load(c)?),
        Command::Report(c) => report_cmd(Ctx::load(c)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are config errors; --help and --version succeed
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("denselab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
