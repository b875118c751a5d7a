//! Parameter manifest for the seven reference convergence tables.
//!
//! Every table is run on T = 1 with N ∈ {80, 160, 320, 640, 1280}; the
//! coarsest level only feeds the first order estimate and is not printed.

use crate::analysis::{run_study, ConvergenceReport, StudyProblem, StudySpec};
use crate::error::{Error, Result};
use crate::kernels::Scheme;
use crate::problems::{ThreeTermProblem, TwoTermProblem};
use crate::solvers::SolverKind;

/// Bumped whenever a parameter tuple below changes.
pub const MANIFEST_VERSION: u32 = 1;

pub const TABLE_IDS: std::ops::RangeInclusive<u8> = 1..=7;

/// Step counts of the ladder shared by all tables.
pub const LADDER_STEPS: [usize; 5] = [80, 160, 320, 640, 1280];

pub const T_END: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnProblem {
    TwoTerm { alpha: f64, b: f64 },
    ThreeTerm { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableColumn {
    pub problem: ColumnProblem,
    pub solver: SolverKind,
    pub scheme: Scheme,
    pub m: Option<usize>,
}

impl TableColumn {
    const fn two(alpha: f64, b: f64, scheme: Scheme, m: Option<usize>) -> Self {
        Self { problem: ColumnProblem::TwoTerm { alpha, b }, solver: SolverKind::Ns1, scheme, m }
    }

    const fn three(alpha: f64, solver: SolverKind, scheme: Scheme, m: usize) -> Self {
        Self { problem: ColumnProblem::ThreeTerm { alpha }, solver, scheme, m: Some(m) }
    }

    pub fn label(&self) -> String {
        let mut s = match self.problem {
            ColumnProblem::TwoTerm { alpha, b } => format!("alpha={alpha} B={b}"),
            ColumnProblem::ThreeTerm { alpha } if self.solver == SolverKind::Ns3 => {
                format!("NS3({}) alpha={alpha}", self.scheme.tag())
            }
            ColumnProblem::ThreeTerm { alpha } => format!("alpha={alpha}"),
        };
        if let Some(m) = self.m {
            s.push_str(&format!(" m={m}"));
        }
        s
    }

    pub fn study_spec(&self) -> Result<StudySpec> {
        let problem = match self.problem {
            ColumnProblem::TwoTerm { alpha, b } => StudyProblem::TwoTerm(TwoTermProblem::new(alpha, b, 1.0)?),
            ColumnProblem::ThreeTerm { alpha } => StudyProblem::ThreeTerm(ThreeTermProblem::canonical(alpha)?),
        };
        Ok(StudySpec {
            problem,
            solver: self.solver,
            scheme: self.scheme,
            m: self.m,
            t_end: T_END,
            h_ladder: LADDER_STEPS.iter().map(|&n| T_END / n as f64).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub id: u8,
    pub title: &'static str,
    pub columns: Vec<TableColumn>,
}

/// The manifest entry for table `id`.
pub fn table_spec(id: u8) -> Result<TableSpec> {
    use Scheme::{A2, A4, L1};
    use SolverKind::{Ns2, Ns3};
    let (title, columns) = match id {
        1 => (
            "NS1(1) with alpha=0.3, 0.5 and NS1(2) with alpha=0.7 on the singular equation, order alpha",
            vec![
                TableColumn::two(0.3, 1.0, L1, None),
                TableColumn::two(0.5, 2.0, L1, None),
                TableColumn::two(0.7, 3.0, A2, None),
            ],
        ),
        2 => (
            "NS1(1) on the regularized two-term equation, order 2-alpha",
            vec![
                TableColumn::two(0.3, 1.0, L1, Some(7)),
                TableColumn::two(0.5, 2.0, L1, Some(4)),
                TableColumn::two(0.7, 3.0, L1, Some(3)),
            ],
        ),
        3 => (
            "NS1(2) on the regularized two-term equation, second order",
            vec![
                TableColumn::two(0.3, 1.0, A2, Some(8)),
                TableColumn::two(0.5, 2.0, A2, Some(5)),
                TableColumn::two(0.7, 3.0, A2, Some(2)),
            ],
        ),
        4 => (
            "NS1(4) on the regularized two-term equation, order 3-alpha",
            vec![
                TableColumn::two(0.3, 1.0, A4, Some(8)),
                TableColumn::two(0.5, 2.0, A4, Some(6)),
                TableColumn::two(0.7, 3.0, A4, Some(5)),
            ],
        ),
        5 => (
            "NS2(2) on the regularized three-term equation, order min{2, 3-2alpha}",
            vec![
                TableColumn::three(0.3, Ns2, A2, 9),
                TableColumn::three(0.4, Ns2, A2, 6),
                TableColumn::three(0.7, Ns2, A2, 5),
            ],
        ),
        6 => (
            "NS2(4) on the regularized three-term equation, order 3-2alpha",
            vec![
                TableColumn::three(0.3, Ns2, A4, 14),
                TableColumn::three(0.4, Ns2, A4, 10),
                TableColumn::three(0.7, Ns2, A4, 6),
            ],
        ),
        7 => (
            "NS3(1), order 1.5, and second-order NS3(2), NS3(4) at alpha=0.5",
            vec![
                TableColumn::three(0.5, Ns3, L1, 4),
                TableColumn::three(0.5, Ns3, A2, 3),
                TableColumn::three(0.5, Ns3, A4, 5),
            ],
        ),
        other => return Err(Error::Validation(format!("table id must be 1..=7, got {other}"))),
    };
    Ok(TableSpec { id, title, columns })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub spec: TableSpec,
    pub columns: Vec<ConvergenceReport>,
}

/// Run every column of table `id`.
pub fn run_table(id: u8) -> Result<TableReport> {
    let spec = table_spec(id)?;
    let columns = spec
        .columns
        .iter()
        .map(|c| run_study(&c.study_spec()?))
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport { spec, columns })
}
