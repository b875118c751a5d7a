//! Command-line front end: `table`, `study` and `solve`.
//!
//! Exit status is 0 on success, 1 for malformed input and 2 for
//! mathematical failures such as poles or incompatible scheme choices.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{run_study, StudyProblem, StudySpec};
use crate::error::{Error, Result};
use crate::kernels::Scheme;
use crate::problems::{
    exact_base, exact_two_term, regularize_three_term, regularize_two_term, BaseProblem, ThreeTermProblem,
    TwoTermProblem,
};
use crate::render::{render_grid, render_report, render_table, Format, GridRow};
use crate::solvers::{recover_solution, solve_ns1, solve_regularized, SolverConfig, SolverKind};
use crate::tables::run_table;

#[derive(Debug, Parser)]
#[command(name = "fode", version, about = "Regularized finite-difference solvers for fractional ODEs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce one of the seven reference convergence tables.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=7))]
        id: u8,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convergence study over a halving step ladder.
    Study {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dump the grid solution of a single run.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    L1,
    A2,
    A4,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::L1 => Scheme::L1,
            SchemeArg::A2 => Scheme::A2,
            SchemeArg::A4 => Scheme::A4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Ns1,
    Ns2,
    Ns3,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Ns1 => SolverKind::Ns1,
            SolverArg::Ns2 => SolverKind::Ns2,
            SolverArg::Ns3 => SolverKind::Ns3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Md,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Md => Format::Md,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Equation, method and grid. Giving `--B` selects the two-term equation;
/// otherwise the three-term one, whose constants default to A=3, C=2, y0=3,
/// ya0=-4.
#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub ya0: Option<f64>,
    /// Degree of the subtracted Taylor polynomial; omit for a raw run.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "l1")]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "ns1")]
    pub solver: SolverArg,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_end: f64,
    /// Step size; repeat for a ladder, coarsest first.
    #[arg(long = "h")]
    pub h: Vec<f64>,
    /// Step count; repeat for a ladder. Converted to h = T/N.
    #[arg(long = "N")]
    pub n: Vec<usize>,
}

impl ProblemArgs {
    fn problem(&self) -> Result<StudyProblem> {
        match self.b {
            Some(b) => {
                if self.a.is_some() || self.c.is_some() || self.ya0.is_some() {
                    return Err(Error::Validation("--B cannot be combined with --A, --C or --ya0".into()));
                }
                Ok(StudyProblem::TwoTerm(TwoTermProblem::new(self.alpha, b, self.y0.unwrap_or(1.0))?))
            }
            None => Ok(StudyProblem::ThreeTerm(ThreeTermProblem::new(
                self.alpha,
                self.a.unwrap_or(3.0),
                self.c.unwrap_or(2.0),
                self.y0.unwrap_or(3.0),
                self.ya0.unwrap_or(-4.0),
            )?)),
        }
    }

    fn ladder(&self) -> Result<Vec<f64>> {
        if !self.h.is_empty() && !self.n.is_empty() {
            return Err(Error::Validation("give either --h or --N, not both".into()));
        }
        if self.n.contains(&0) {
            return Err(Error::Validation("--N must be positive".into()));
        }
        Ok(if self.n.is_empty() {
            self.h.clone()
        } else {
            self.n.iter().map(|&n| self.t_end / n as f64).collect()
        })
    }

    fn study(&self) -> Result<StudySpec> {
        Ok(StudySpec {
            problem: self.problem()?,
            solver: self.solver.into(),
            scheme: self.scheme.into(),
            m: self.m,
            t_end: self.t_end,
            h_ladder: self.ladder()?,
        })
    }

    fn steps(&self) -> Result<usize> {
        let ladder = self.ladder()?;
        let [h] = ladder[..] else {
            return Err(Error::Validation(format!("solve takes exactly one --N or --h, got {}", ladder.len())));
        };
        let n = (self.t_end / h).round();
        if !(h > 0.0) || n < 1.0 || (n * h - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(Error::Validation(format!("T = {} is not a whole number of steps h = {h}", self.t_end)));
        }
        Ok(n as usize)
    }
}

fn solve_rows(args: &ProblemArgs) -> Result<Vec<GridRow>> {
    let spec = args.study()?;
    let cfg = SolverConfig::new(args.t_end, args.steps()?, spec.scheme)?;
    let exact_or_none = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let (u, y, base) = match (&spec.problem, spec.m) {
        (StudyProblem::TwoTerm(p), None) => {
            if spec.solver != SolverKind::Ns1 {
                return Err(Error::Incompatible(format!("{} solves three-term equations", spec.solver)));
            }
            let g = solve_ns1(p, &cfg)?;
            (g.clone(), g, BaseProblem::TwoTerm(p.clone()))
        }
        (StudyProblem::ThreeTerm(_), None) => {
            return Err(Error::Validation("three-term equations are solved after regularization; pass --m".into()))
        }
        (problem, Some(m)) => {
            let r = match problem {
                StudyProblem::TwoTerm(p) => regularize_two_term(p, m)?,
                StudyProblem::ThreeTerm(p) => regularize_three_term(p, m)?,
            };
            let g = solve_regularized(spec.solver, &r, &cfg)?;
            let y = recover_solution(&g, &r);
            (g, y, r.base)
        }
    };
    (0..=u.n_steps())
        .map(|n| {
            let t = u.time(n);
            let exact = match &base {
                BaseProblem::TwoTerm(p) => exact_or_none(exact_two_term(p, t))?,
                other => exact_or_none(exact_base(other, t))?,
            };
            Ok(GridRow {
                t,
                u: u.values[n],
                y_recovered: y.values[n],
                y_exact: exact,
                error: exact.map(|e| (y.values[n] - e).abs()),
            })
        })
        .collect()
}

/// Run a parsed command and return the rendered output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Table { id, output } => render_table(&run_table(*id)?, output.format.into()),
        Command::Study { problem, output } => render_report(&run_study(&problem.study()?)?, output.format.into()),
        Command::Solve { problem, output } => render_grid(&solve_rows(problem)?, output.format.into()),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        2
    } else {
        1
    }
}

fn output_target(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Table { output, .. } | Command::Study { output, .. } | Command::Solve { output, .. } => {
            output.out.as_ref()
        }
    }
}

/// Parse `args`, run, write the output and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let text = match execute(&cli) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match output_target(&cli) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    0
}
