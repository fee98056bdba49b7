//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis;
use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentSpec, Filter, ResultRow, RunOptions, Schedule, SchemeSpec};
use crate::mask::{Mask, MaskFile};
use crate::multigrid::SweepOrder;
use crate::rational;
use crate::regularity::{self, HolderReport};
use crate::schemes::{self, FamilyKind};

#[derive(Parser, Debug)]
#[command(name = "anisomg", version, about = "Anisotropic subdivision masks as multigrid transfer operators")]
pub struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a mask as an exact-rational matrix or term list.
    Mask(MaskArgs),
    /// Algebraic properties of a mask.
    Analyze(AnalyzeArgs),
    /// Holder regularity from the joint spectral radius.
    Regularity(RegularityArgs),
    /// One multigrid solve.
    Solve(SolveArgs),
    /// Reproduce a results table.
    Table(TableArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Md,
}

#[derive(Args, Debug, Clone)]
pub struct MaskSource {
    /// dd, interp, minimal, box, approx, p1, p2 or k.
    #[arg(long, required_unless_present = "mask_file", value_parser = parse_family)]
    pub family: Option<FamilyKind>,
    #[arg(long, default_value_t = 3)]
    pub m: i64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub ell: u32,
    /// JSON mask as written by `mask --format json`.
    #[arg(long, conflicts_with = "family")]
    pub mask_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MaskArgs {
    #[command(flatten)]
    pub source: MaskSource,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: MaskSource,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RegularityArgs {
    #[command(flatten)]
    pub source: MaskSource,
    /// Maximum product length in the spectral radius search.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolverOptions {
    #[arg(long, default_value = "forward", value_parser = parse_order)]
    pub sweep_order: SweepOrder,
    /// Offset of coarse nodes inside the fine grid.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub shift: i64,
}

impl SolverOptions {
    fn run_options(&self) -> RunOptions {
        RunOptions { order: self.sweep_order, shift: self.shift }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: MaskSource,
    /// Fine grid, e.g. 127x80.
    #[arg(long, value_parser = parse_dims)]
    pub grid: (usize, usize),
    /// Coarsening factor per level, e.g. 2x3. Defaults to the mask dilation.
    #[arg(long, value_parser = parse_dims)]
    pub factor: Option<(usize, usize)>,
    /// Use the mask for the first h levels only, then P1 with factor 2x2.
    #[arg(long)]
    pub mixed: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 1)]
    pub nu0: usize,
    #[arg(long, default_value_t = 1)]
    pub nu: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[command(flatten)]
    pub solver: SolverOptions,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// 2, 3 or 4.
    #[arg(long, required_unless_present = "config")]
    pub id: Option<u8>,
    #[arg(long)]
    pub case: Option<u8>,
    /// Scheme filter: label, family or short name (p1, k, am1, am1-5, b20).
    #[arg(long)]
    pub scheme: Option<String>,
    /// Include rows whose grids take minutes.
    #[arg(long)]
    pub slow: bool,
    /// JSON list of experiments to run instead of a built-in table.
    #[arg(long, conflicts_with = "id")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverOptions,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Directory for the output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_family(s: &str) -> std::result::Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_order(s: &str) -> std::result::Result<SweepOrder, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X', ',']).ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn load_mask(src: &MaskSource) -> Result<Mask> {
    if let Some(path) = &src.mask_file {
        let text = std::fs::read_to_string(path)?;
        return MaskFile::from_json(&text)?.into_mask();
    }
    let kind = src.family.ok_or_else(|| Error::Param("no mask given".into()))?;
    schemes::build(kind, src.m, src.n, src.ell)
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn mask_markdown(mask: &Mask) -> String {
    let rows = mask.to_centered_matrix();
    let w = rows.first().map_or(0, |r| r.len());
    let mut s = format!("{} for {}\n\n", mask.family, mask.dilation);
    s.push_str(&format!("|{}\n|{}\n", " |".repeat(w), "---|".repeat(w)));
    for r in rows {
        let cells: Vec<String> = r.iter().map(rational::render).collect();
        s.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    s
}

fn cmd_mask(a: &MaskArgs, stdout: &mut dyn Write) -> Result<()> {
    let mask = load_mask(&a.source)?;
    let text = match a.format {
        Format::Csv => mask.to_csv(),
        Format::Json => MaskFile::from_mask(&mask).to_json()?,
        Format::Md => mask_markdown(&mask),
    };
    emit(&with_newline(text), a.out.as_deref(), stdout)
}

fn report_markdown(r: &analysis::SchemeReport) -> String {
    let opt = |v: Option<i64>| v.map_or("-".to_string(), |d| d.to_string());
    let sb = r.support_box.map_or("-".to_string(), |(lo, hi)| format!("{lo:?}..{hi:?}"));
    format!(
        "| Property | Value |\n|---|---|\n| family | {} |\n| dilation | {} |\n| interpolatory | {} |\n| generation degree | {} |\n| reproduction degree | {} |\n| symmetric | {} |\n| support box | {} |\n| nonzeros | {} |\n| coefficient sum | {} |\n",
        r.family, r.dilation, r.is_interpolatory, r.generation_degree, opt(r.reproduction_degree), r.symmetric, sb, r.nonzeros, r.coefficient_sum
    )
}

fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    let mask = load_mask(&a.source)?;
    let r = analysis::report(&mask);
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&r)?,
        Format::Md => report_markdown(&r),
        Format::Csv => experiments::csv_text(
            "family,dilation,is_interpolatory,generation_degree,reproduction_degree,symmetric,nonzeros,coefficient_sum",
            [vec![
                r.family.clone(),
                r.dilation.clone(),
                r.is_interpolatory.to_string(),
                r.generation_degree.to_string(),
                r.reproduction_degree.map_or(String::new(), |d| d.to_string()),
                r.symmetric.to_string(),
                r.nonzeros.to_string(),
                r.coefficient_sum.clone(),
            ]],
        ),
    };
    emit(&with_newline(text), a.out.as_deref(), stdout)
}

pub const REGULARITY_HEADER: &str =
    "family,dilation,omega,rho_lo,rho_hi,rho1_lo,rho1_hi,rho2_lo,rho2_hi,alpha_lo,alpha_hi,depth";

pub fn regularity_csv(r: &HolderReport) -> String {
    let nums = [
        r.rho.lower,
        r.rho.upper,
        r.rho1.lower,
        r.rho1.upper,
        r.rho2.lower,
        r.rho2.upper,
        r.alpha.lower,
        r.alpha.upper,
    ];
    let mut rec = vec![r.family.clone(), r.dilation.clone(), r.omega_size.to_string()];
    rec.extend(nums.iter().map(|x| x.to_string()));
    rec.push(r.depth.to_string());
    experiments::csv_text(REGULARITY_HEADER, [rec])
}

fn regularity_markdown(r: &HolderReport) -> String {
    let b = |x: &regularity::Bracket| format!("[{:.6}, {:.6}]", x.lower, x.upper);
    format!(
        "| Scheme | rho(V) | rho(V1) | rho(V2) | alpha |\n|---|---|---|---|---|\n| {} | {} | {} | {} | {} |\n",
        r.family,
        b(&r.rho),
        b(&r.rho1),
        b(&r.rho2),
        b(&r.alpha)
    )
}

fn cmd_regularity(a: &RegularityArgs, stdout: &mut dyn Write) -> Result<()> {
    let mask = load_mask(&a.source)?;
    let r = regularity::holder_exponent(&mask, a.depth)?;
    let text = match a.format {
        Format::Csv => regularity_csv(&r),
        Format::Json => serde_json::to_string_pretty(&r)?,
        Format::Md => regularity_markdown(&r),
    };
    emit(&with_newline(text), a.out.as_deref(), stdout)
}

fn rows_text(rows: &[ResultRow], format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => experiments::to_csv(rows),
        Format::Json => serde_json::to_string_pretty(rows)?,
        Format::Md => experiments::to_markdown(rows),
    })
}

fn check_rows(rows: &[ResultRow]) -> Result<()> {
    match rows.iter().find_map(|r| r.error.as_ref()) {
        Some(e) => Err(Error::Domain(e.clone())),
        None => Ok(()),
    }
}

fn cmd_solve(a: &SolveArgs, stdout: &mut dyn Write) -> Result<()> {
    let mask = load_mask(&a.source)?;
    let factor = a.factor.unwrap_or((mask.dilation.m1 as usize, mask.dilation.m2 as usize));
    let schedule = match a.mixed {
        Some(h) => Schedule::Mixed { m: factor.1, h },
        None => Schedule::Uniform { m1: factor.0, m2: factor.1 },
    };
    let spec = ExperimentSpec {
        table: 0,
        scheme: SchemeSpec::reference(&mask.family.to_string()),
        case: 0,
        n0: a.grid,
        schedule,
        eps: a.eps,
        tol: a.tol,
        nu0: a.nu0,
        nu: a.nu,
        max_iter: a.max_iter,
        slow: false,
    };
    let row = experiments::run_with_mask(&spec, &mask, None, &a.solver.run_options());
    let rows = [row];
    emit(&rows_text(&rows, a.format)?, a.out.as_deref(), stdout)?;
    check_rows(&rows)
}

fn cmd_table(a: &TableArgs, stdout: &mut dyn Write, verbose: bool) -> Result<()> {
    let opts = a.solver.run_options();
    let (name, rows) = match &a.config {
        Some(path) => {
            let specs: Vec<ExperimentSpec> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let rows: Vec<ResultRow> = specs.iter().map(|s| experiments::run_spec(s, None, &opts)).collect();
            let stem = path.file_stem().map_or("config".to_string(), |s| s.to_string_lossy().into_owned());
            (stem, rows)
        }
        None => {
            let id = a.id.ok_or_else(|| Error::Param("--id is required".into()))?;
            let filter = Filter { case: a.case, scheme: a.scheme.clone(), include_slow: a.slow };
            let rows = experiments::run_table(id, &filter, &opts)?;
            if rows.is_empty() {
                return Err(Error::Param("no table rows match the filter".into()));
            }
            (format!("table{id}"), rows)
        }
    };
    if verbose {
        for r in &rows {
            eprintln!("{} {} case {}: {} iterations in {:.2}s", r.dilation, r.scheme, r.case, r.iters, r.seconds);
        }
    }
    let ext = match a.format {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Md => "md",
    };
    let out = a.out.as_ref().map(|d| d.join(format!("{name}.{ext}")));
    emit(&rows_text(&rows, a.format)?, out.as_deref(), stdout)?;
    check_rows(&rows)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Param(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Mask(a) => cmd_mask(a, stdout),
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Regularity(a) => cmd_regularity(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Table(a) => cmd_table(a, stdout, cli.verbose),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
