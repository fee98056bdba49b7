//! Problem setup, level schedules and batch runs of the Laplacian tables.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::multigrid::{
    coarse_dims, laplacian_stencil, GridVec, Level, LevelPlan, Multigrid, Dims, Stencil, SweepOrder, Transfer,
};
use crate::rational::int;
use crate::schemes::{self, FamilyKind};

pub const WORKERS_ENV: &str = "ANISOMG_WORKERS";

/// A transfer mask by family and parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub family: String,
    #[serde(default)]
    pub m: i64,
    #[serde(default)]
    pub n: u32,
    #[serde(default)]
    pub ell: u32,
}

impl SchemeSpec {
    pub fn reference(name: &str) -> Self {
        Self { family: name.into(), m: 2, n: 0, ell: 0 }
    }

    pub fn interp(m: i64, n: u32) -> Self {
        Self { family: "interp".into(), m, n, ell: 0 }
    }

    pub fn approx(n: u32, ell: u32) -> Self {
        Self { family: "approx".into(), m: 3, n, ell }
    }

    pub fn build(&self) -> Result<Mask> {
        let kind: FamilyKind = self.family.parse()?;
        schemes::build(kind, self.m, self.n, self.ell)
    }

    pub fn label(&self) -> String {
        match self.build() {
            Ok(m) => m.family.to_string(),
            Err(_) => self.family.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Schedule {
    /// The same factor on every level.
    Uniform { m1: usize, m2: usize },
    /// Factor (2, m) with the scheme mask for the first h levels, then (2, 2) with P1.
    Mixed { m: usize, h: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub table: u8,
    pub scheme: SchemeSpec,
    pub case: u8,
    pub n0: Dims,
    pub schedule: Schedule,
    /// 1 for the isotropic problem.
    pub eps: f64,
    pub tol: f64,
    /// Pre and post sweeps on the finest level.
    pub nu0: usize,
    /// Pre and post sweeps on the other levels.
    pub nu: usize,
    pub max_iter: usize,
    #[serde(default)]
    pub slow: bool,
}

impl ExperimentSpec {
    pub fn dilation_label(&self) -> String {
        match self.schedule {
            Schedule::Uniform { m1, m2 } => format!("diag({m1},{m2})"),
            Schedule::Mixed { m, .. } => format!("diag(2,{m})"),
        }
    }
}

/// Printed reference values for a row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub iters: usize,
    pub conv_rate: f64,
    pub gen_degree: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub table: u8,
    pub scheme: String,
    pub dilation: String,
    pub case: u8,
    pub n1: usize,
    pub n2: usize,
    pub iters: usize,
    pub conv_rate: f64,
    pub gen_degree: i64,
    pub seconds: f64,
    pub converged: bool,
    pub levels: usize,
    pub reference: Option<Reference>,
    pub error: Option<String>,
}

/// x(r, s) = sin(5 pi (s-1)/(n2-1)) + sin(5 pi (r-1)/(n1-1)), 1-based.
pub fn exact_solution(n0: Dims) -> GridVec {
    let (n1, n2) = n0;
    let mut x = GridVec::zeros(n0);
    let w = 5.0 * std::f64::consts::PI;
    for r in 0..n1 {
        for s in 0..n2 {
            let a = if n2 > 1 { (w * s as f64 / (n2 - 1) as f64).sin() } else { 0.0 };
            let b = if n1 > 1 { (w * r as f64 / (n1 - 1) as f64).sin() } else { 0.0 };
            x.values[r * n2 + s] = a + b;
        }
    }
    x
}

/// b = A x for the exact solution above.
pub fn build_rhs(system: &Stencil, n0: Dims) -> Result<GridVec> {
    if n0.0 < 2 || n0.1 < 2 {
        return Err(Error::Dims(format!("right-hand side needs both sizes >= 2, got {n0:?}")));
    }
    crate::multigrid::toeplitz_apply(system, &exact_solution(n0))
}

fn level_system(dims: Dims, eps: f64) -> (Stencil, f64) {
    let h1 = 1.0 / (dims.0 + 1) as f64;
    let h2 = 1.0 / (dims.1 + 1) as f64;
    (laplacian_stencil(eps, h1, h2), eps * h2 * h2 / (h1 * h1))
}

fn log_exact(n: usize, m: usize) -> Option<u32> {
    let mut k = 0;
    let mut p = 1usize;
    while p < n {
        p *= m;
        k += 1;
    }
    (p == n).then_some(k)
}

/// Full-length plan with n0 = (m1^k1 - 1, m2^k2 - 1) and min(k1, k2) levels below the finest minus one.
pub fn uniform_schedule(
    n0: Dims,
    factor: (usize, usize),
    transfer: &Stencil,
    label: &str,
    eps: f64,
    nu0: usize,
    nu: usize,
) -> Result<LevelPlan> {
    let k1 = log_exact(n0.0 + 1, factor.0).ok_or_else(|| Error::Dims(format!("{} + 1 is not a power of {}", n0.0, factor.0)))?;
    let k2 = log_exact(n0.1 + 1, factor.1).ok_or_else(|| Error::Dims(format!("{} + 1 is not a power of {}", n0.1, factor.1)))?;
    let ell = k1.min(k2).saturating_sub(1) as usize;
    let mut levels = Vec::with_capacity(ell + 1);
    let mut dims = n0;
    for j in 0..=ell {
        let (system, eps_j) = level_system(dims, eps);
        let sweeps = if j == 0 { nu0 } else { nu };
        let transfer = (j < ell).then(|| Transfer { stencil: transfer.clone(), factor, label: label.into() });
        levels.push(Level { dims, system, eps: eps_j, transfer, pre: sweeps, post: sweeps });
        if j < ell {
            dims = coarse_dims(dims, factor)?;
        }
    }
    Ok(LevelPlan { levels, order: SweepOrder::Forward, shift: 0 })
}

/// n0 = (2^k1 - 1, m^h 2^k2 - 1): factor (2, m) with `transfer` for j < h, then
/// (2, 2) with the bilinear stencil, for min(k1, h + k2) - 1 coarsenings.
pub fn mixed_schedule(
    n0: Dims,
    m: usize,
    h: usize,
    transfer: &Stencil,
    label: &str,
    eps: f64,
    nu0: usize,
    nu: usize,
) -> Result<LevelPlan> {
    let k1 = log_exact(n0.0 + 1, 2).ok_or_else(|| Error::Dims(format!("{} + 1 is not a power of 2", n0.0)))?;
    let mh = m.pow(h as u32);
    if (n0.1 + 1) % mh != 0 {
        return Err(Error::Dims(format!("{} + 1 is not divisible by {m}^{h}", n0.1)));
    }
    let k2 = log_exact((n0.1 + 1) / mh, 2).ok_or_else(|| Error::Dims(format!("({} + 1) / {mh} is not a power of 2", n0.1)))?;
    let ell = (k1 as usize).min(h + k2 as usize).saturating_sub(1);
    let bilinear = Stencil::from_mask(&schemes::p1());
    let mut levels = Vec::with_capacity(ell + 1);
    let mut dims = n0;
    for j in 0..=ell {
        let (system, eps_j) = level_system(dims, eps);
        let sweeps = if j == 0 { nu0 } else { nu };
        let t = (j < ell).then(|| {
            if j < h {
                Transfer { stencil: transfer.clone(), factor: (2, m), label: label.into() }
            } else {
                Transfer { stencil: bilinear.clone(), factor: (2, 2), label: "P1".into() }
            }
        });
        let next = t.as_ref().map(|t| t.factor);
        levels.push(Level { dims, system, eps: eps_j, transfer: t, pre: sweeps, post: sweeps });
        if let Some(f) = next {
            dims = coarse_dims(dims, f)?;
        }
    }
    Ok(LevelPlan { levels, order: SweepOrder::Forward, shift: 0 })
}

/// Premises of the V-cycle optimality result for q = 1: generation degree at
/// least 2q - 1 and p(1) = |det M|.
pub fn optimality_gate(mask: &Mask, q: u32) -> Result<i64> {
    let g = analysis::generation_degree(mask);
    if g < 2 * q as i64 - 1 {
        return Err(Error::Domain(format!("{} generates degree {g} < {}", mask.family, 2 * q - 1)));
    }
    if mask.symbol.value_at_one() != int(mask.det()) {
        return Err(Error::Domain(format!("{} has p(1) != |det M|", mask.family)));
    }
    Ok(g)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub order: SweepOrder,
    pub shift: i64,
}

pub fn plan_for(spec: &ExperimentSpec, mask: &Mask) -> Result<LevelPlan> {
    let stencil = Stencil::from_mask(mask);
    let label = mask.family.to_string();
    match spec.schedule {
        Schedule::Uniform { m1, m2 } => uniform_schedule(spec.n0, (m1, m2), &stencil, &label, spec.eps, spec.nu0, spec.nu),
        Schedule::Mixed { m, h } => mixed_schedule(spec.n0, m, h, &stencil, &label, spec.eps, spec.nu0, spec.nu),
    }
}

pub fn run_spec(spec: &ExperimentSpec, reference: Option<Reference>, opts: &RunOptions) -> ResultRow {
    match spec.scheme.build() {
        Ok(mask) => run_with_mask(spec, &mask, reference, opts),
        Err(e) => {
            let mut row = empty_row(spec, spec.scheme.label(), reference);
            row.error = Some(e.to_string());
            row
        }
    }
}

fn empty_row(spec: &ExperimentSpec, scheme: String, reference: Option<Reference>) -> ResultRow {
    ResultRow {
        table: spec.table,
        scheme,
        dilation: spec.dilation_label(),
        case: spec.case,
        n1: spec.n0.0,
        n2: spec.n0.1,
        iters: 0,
        conv_rate: f64::NAN,
        gen_degree: -1,
        seconds: 0.0,
        converged: false,
        levels: 0,
        reference,
        error: None,
    }
}

/// Runs `spec` with an explicit transfer mask; `spec.scheme` is ignored.
pub fn run_with_mask(spec: &ExperimentSpec, mask: &Mask, reference: Option<Reference>, opts: &RunOptions) -> ResultRow {
    let start = Instant::now();
    let mut row = empty_row(spec, mask.family.to_string(), reference);
    let outcome = (|| -> Result<()> {
        row.gen_degree = optimality_gate(mask, 1)?;
        let mut plan = plan_for(spec, mask)?;
        plan.order = opts.order;
        plan.shift = opts.shift;
        row.levels = plan.levels.len();
        let b = build_rhs(&plan.levels[0].system, spec.n0)?;
        let mg = Multigrid::new(plan)?;
        let (_, stats) = mg.solve(&b, spec.tol, spec.max_iter)?;
        row.iters = stats.iters;
        row.conv_rate = stats.conv_rate;
        row.converged = stats.converged;
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.seconds = start.elapsed().as_secs_f64();
    row
}

/// One table entry: the experiment and the printed values.
#[derive(Clone, Debug)]
pub struct TableEntry {
    pub spec: ExperimentSpec,
    pub reference: Reference,
}

struct Printed {
    scheme: SchemeSpec,
    gen: i64,
    case1: (usize, f64),
    case2: (usize, f64),
}

fn printed(scheme: SchemeSpec, gen: i64, case1: (usize, f64), case2: (usize, f64)) -> Printed {
    Printed { scheme, gen, case1, case2 }
}

fn reference_rows(table: u8) -> Vec<(usize, Printed)> {
    let p = |s: &str| SchemeSpec::reference(s);
    let a3 = |n| SchemeSpec::interp(3, n);
    let a5 = |n| SchemeSpec::interp(5, n);
    let b = SchemeSpec::approx;
    match table {
        2 => vec![
            (2, printed(p("P1"), 1, (9, 0.1432), (9, 0.1374))),
            (2, printed(p("P2"), 3, (13, 0.2823), (13, 0.27))),
            (2, printed(p("K"), 3, (8, 0.1224), (8, 0.1275))),
            (3, printed(a3(1), 1, (28, 0.5573), (23, 0.4958))),
            (3, printed(a3(2), 3, (26, 0.5297), (22, 0.4777))),
            (3, printed(a3(3), 5, (26, 0.5347), (23, 0.4893))),
            (3, printed(b(2, 0), 3, (33, 0.6082), (26, 0.5298))),
            (3, printed(b(2, 1), 3, (26, 0.5298), (22, 0.4477))),
            (3, printed(b(3, 0), 5, (41, 0.6718), (35, 0.6272))),
            (3, printed(b(3, 1), 5, (24, 0.5096), (22, 0.4787))),
            (3, printed(b(3, 2), 5, (26, 0.5347), (23, 0.4893))),
            (5, printed(a5(1), 1, (38, 0.6529), (45, 0.6969))),
            (5, printed(a5(2), 3, (38, 0.6532), (40, 0.6774))),
        ],
        3 => vec![
            (2, printed(p("P1"), 1, (75, 0.8571), (80, 0.8658))),
            (2, printed(p("P2"), 3, (82, 0.8686), (86, 0.8744))),
            (2, printed(p("K"), 3, (61, 0.8273), (76, 0.8585))),
            (3, printed(a3(1), 1, (14, 0.4315), (16, 0.4807))),
            (3, printed(a3(2), 3, (14, 0.4307), (16, 0.48))),
            (3, printed(a3(3), 5, (14, 0.4312), (16, 0.4806))),
            (3, printed(b(2, 0), 3, (13, 0.5145), (16, 0.4780))),
            (3, printed(b(2, 1), 3, (14, 0.4307), (16, 0.48))),
            (3, printed(b(3, 0), 5, (14, 0.4363), (17, 0.5003))),
            (3, printed(b(3, 1), 5, (13, 0.4112), (15, 0.4633))),
            (3, printed(b(3, 2), 5, (14, 0.4312), (16, 0.4806))),
            (5, printed(a5(1), 1, (20, 0.5623), (25, 0.6307))),
            (5, printed(a5(2), 3, (21, 0.5719), (26, 0.6385))),
        ],
        4 => vec![
            (2, printed(p("P1"), 1, (294, 0.9616), (284, 0.9603))),
            (2, printed(p("P2"), 3, (295, 0.9617), (281, 0.9599))),
            (2, printed(p("K"), 3, (253, 0.9555), (251, 0.9551))),
            (3, printed(a3(1), 1, (33, 0.7051), (44, 0.7694))),
            (3, printed(a3(2), 3, (33, 0.7050), (44, 0.7695))),
            (3, printed(a3(3), 5, (33, 0.7050), (44, 0.7697))),
            (3, printed(b(2, 0), 3, (30, 0.6813), (42, 0.7592))),
            (3, printed(b(2, 1), 3, (33, 0.7050), (44, 0.7695))),
            (3, printed(b(3, 0), 5, (30, 0.6807), (41, 0.7540))),
            (3, printed(b(3, 1), 5, (31, 0.6893), (43, 0.7641))),
            (3, printed(b(3, 2), 5, (33, 0.7050), (44, 0.7697))),
            (5, printed(a5(1), 1, (62, 0.8301), (69, 0.8462))),
            (5, printed(a5(2), 3, (62, 0.8304), (70, 0.8479))),
        ],
        _ => Vec::new(),
    }
}

/// Grid, schedule and slowness flag for a table, dilation parameter and case.
fn setup(table: u8, m: usize, case: u8) -> (Dims, Schedule, bool) {
    let uniform = |m2| Schedule::Uniform { m1: 2, m2 };
    match (table, m, case) {
        (_, 2, 1) => ((127, 127), uniform(2), false),
        (_, 2, _) => ((255, 255), uniform(2), false),
        (2, 3, 1) => ((127, 80), uniform(3), false),
        (2, 3, _) => ((255, 242), uniform(3), false),
        (2, 5, 1) => ((127, 124), uniform(5), false),
        (2, 5, _) => ((511, 624), uniform(5), true),
        (_, 3, 1) => ((127, 71), Schedule::Mixed { m: 3, h: 2 }, false),
        (_, 3, _) => ((255, 143), Schedule::Mixed { m: 3, h: 2 }, false),
        (_, 5, 1) => ((255, 159), Schedule::Mixed { m: 5, h: 1 }, false),
        (_, _, _) => ((255, 199), Schedule::Mixed { m: 5, h: 2 }, false),
    }
}

/// All entries of table 2, 3 or 4.
pub fn table_entries(table: u8) -> Result<Vec<TableEntry>> {
    let (eps, tol, nu0) = match table {
        2 => (1.0, 1e-7, 1),
        3 => (1e-2, 1e-5, 2),
        4 => (1e-3, 1e-5, 2),
        _ => return Err(Error::Param(format!("unknown table {table}; expected 2, 3 or 4"))),
    };
    let mut out = Vec::new();
    for (m, p) in reference_rows(table) {
        for (case, (iters, rate)) in [(1u8, p.case1), (2u8, p.case2)] {
            let (n0, schedule, slow) = setup(table, m, case);
            out.push(TableEntry {
                spec: ExperimentSpec {
                    table,
                    scheme: p.scheme.clone(),
                    case,
                    n0,
                    schedule,
                    eps,
                    tol,
                    nu0,
                    nu: 1,
                    max_iter: 2000,
                    slow,
                },
                reference: Reference { iters, conv_rate: rate, gen_degree: p.gen },
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct Filter {
    pub case: Option<u8>,
    /// Matched against the scheme label and family name, case-insensitively.
    pub scheme: Option<String>,
    pub include_slow: bool,
}

impl Filter {
    pub fn accepts(&self, e: &TableEntry) -> bool {
        if e.spec.slow && !self.include_slow {
            return false;
        }
        if self.case.is_some_and(|c| c != e.spec.case) {
            return false;
        }
        match &self.scheme {
            None => true,
            Some(s) => {
                let s = s.to_ascii_lowercase();
                let label = e.spec.scheme.label().to_ascii_lowercase();
                label == s || e.spec.scheme.family.to_ascii_lowercase() == s || short_name(&e.spec.scheme) == s
            }
        }
    }
}

/// Compact names such as p1, k, am1, am2-5, b20.
pub fn short_name(s: &SchemeSpec) -> String {
    match s.family.to_ascii_lowercase().as_str() {
        "interp" if s.m == 3 => format!("am{}", s.n),
        "interp" => format!("am{}-{}", s.n, s.m),
        "approx" => format!("b{}{}", s.n, s.ell),
        other => other.to_string(),
    }
}

pub fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0)
}

pub fn run_entries(entries: &[TableEntry], opts: &RunOptions) -> Result<Vec<ResultRow>> {
    let work = || entries.par_iter().map(|e| run_spec(&e.spec, Some(e.reference), opts)).collect::<Vec<_>>();
    match worker_count() {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Param(e.to_string()))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

pub fn run_table(table: u8, filter: &Filter, opts: &RunOptions) -> Result<Vec<ResultRow>> {
    let entries: Vec<TableEntry> = table_entries(table)?.into_iter().filter(|e| filter.accepts(e)).collect();
    run_entries(&entries, opts)
}

pub const CSV_HEADER: &str = "table,scheme,dilation,case,n1,n2,iters,conv_rate,gen_degree,seconds";

/// Writes a header and records as RFC 4180 CSV; labels such as diag(2,3) get quoted.
pub fn csv_text<I, R>(header: &str, records: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for r in records {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    csv_text(
        CSV_HEADER,
        rows.iter().map(|r| {
            vec![
                r.table.to_string(),
                r.scheme.clone(),
                r.dilation.clone(),
                r.case.to_string(),
                r.n1.to_string(),
                r.n2.to_string(),
                r.iters.to_string(),
                format!("{:.4}", r.conv_rate),
                r.gen_degree.to_string(),
                format!("{:.3}", r.seconds),
            ]
        }),
    )
}

/// One line per scheme with both cases side by side, as in the printed tables.
pub fn to_markdown(rows: &[ResultRow]) -> String {
    let mut s = String::from(
        "| Dilation | Scheme | Case 1 iter | Case 1 rate | Case 2 iter | Case 2 rate | Generation degree |\n|---|---|---|---|---|---|---|\n",
    );
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let k = (r.dilation.clone(), r.scheme.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    for (dil, scheme) in keys {
        let cell = |case: u8| {
            rows.iter()
                .find(|r| r.dilation == dil && r.scheme == scheme && r.case == case)
                .map_or(("-".to_string(), "-".to_string()), |r| (r.iters.to_string(), format!("{:.4}", r.conv_rate)))
        };
        let g = rows.iter().find(|r| r.dilation == dil && r.scheme == scheme).map_or(-1, |r| r.gen_degree);
        let (i1, r1) = cell(1);
        let (i2, r2) = cell(2);
        s.push_str(&format!("| {dil} | {scheme} | {i1} | {r1} | {i2} | {r2} | {g} |\n"));
    }
    s
}
