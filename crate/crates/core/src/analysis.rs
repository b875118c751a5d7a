//! Max-norm errors, observed orders and convergence studies over step ladders.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::Scheme;
use crate::problems::{
    exact_regularized, exact_two_term, regularize_three_term, regularize_two_term, RegularizedProblem,
    ThreeTermProblem, TwoTermProblem,
};
use crate::solvers::{solve_ns1, solve_regularized, GridSolution, SolverConfig, SolverKind};

/// max_n |u_n − exact(t_n)|, including n = 0.
pub fn max_error(numeric: &GridSolution, exact: impl Fn(f64) -> f64) -> f64 {
    numeric
        .values
        .iter()
        .enumerate()
        .map(|(n, u)| (u - exact(numeric.time(n))).abs())
        .fold(0.0, f64::max)
}

/// log2(err_coarse / err_fine) for a halved step.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> Result<f64> {
    if !(err_coarse > 0.0 && err_fine > 0.0) || !err_coarse.is_finite() || !err_fine.is_finite() {
        return Err(Error::DegenerateOrder { coarse: err_coarse, fine: err_fine });
    }
    Ok((err_coarse / err_fine).log2())
}

/// The equation a study runs on.
#[derive(Debug, Clone)]
pub enum StudyProblem {
    TwoTerm(TwoTermProblem),
    ThreeTerm(ThreeTermProblem),
}

impl StudyProblem {
    pub fn alpha(&self) -> f64 {
        match self {
            StudyProblem::TwoTerm(p) => p.alpha,
            StudyProblem::ThreeTerm(p) => p.alpha,
        }
    }

    /// Short parameter label, e.g. `alpha=0.3 B=1`.
    pub fn label(&self) -> String {
        match self {
            StudyProblem::TwoTerm(p) => format!("alpha={} B={}", p.alpha, p.b),
            StudyProblem::ThreeTerm(p) => {
                if p.is_canonical() {
                    format!("alpha={}", p.alpha)
                } else {
                    format!("alpha={} A={} C={} y0={} ya0={}", p.alpha, p.a, p.c, p.y0, p.ya0)
                }
            }
        }
    }
}

/// Everything that defines one convergence study.
#[derive(Debug, Clone)]
pub struct StudySpec {
    pub problem: StudyProblem,
    pub solver: SolverKind,
    pub scheme: Scheme,
    /// Regularization degree; `None` solves the singular equation directly.
    pub m: Option<usize>,
    pub t_end: f64,
    /// Step sizes, coarsest first, each half the previous one.
    pub h_ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub h: f64,
    pub max_error: f64,
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub solver: SolverKind,
    pub scheme: Scheme,
    pub alpha: f64,
    pub m: Option<usize>,
    pub problem: String,
    pub theoretical_order: f64,
}

impl ConvergenceReport {
    /// Rows that have a coarser predecessor, i.e. the ones a published table
    /// would print.
    pub fn ordered_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.observed_order.is_some())
    }
}

/// Order the analysis predicts for a solver/kernel pair on a smooth
/// (regularized) problem, or α for raw runs whose solution is singular.
pub fn theoretical_order(solver: SolverKind, scheme: Scheme, alpha: f64, regularized: bool) -> f64 {
    if !regularized {
        return alpha;
    }
    match (solver, scheme) {
        (SolverKind::Ns1, Scheme::L1) => 2.0 - alpha,
        (SolverKind::Ns1, Scheme::A2) => 2.0,
        (SolverKind::Ns1, Scheme::A4) => 3.0 - alpha,
        (SolverKind::Ns2, Scheme::L1) => 2.0 - 2.0 * alpha,
        (SolverKind::Ns2, Scheme::A2) => f64::min(2.0, 3.0 - 2.0 * alpha),
        (SolverKind::Ns2, Scheme::A4) => 3.0 - 2.0 * alpha,
        (SolverKind::Ns3, Scheme::L1) => 1.5,
        (SolverKind::Ns3, Scheme::A2 | Scheme::A4) => 2.0,
    }
}

/// Number of steps for h, requiring T/h to be an integer.
fn steps_for(t_end: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Validation(format!("step sizes must be positive, got {h}")));
    }
    let n = (t_end / h).round();
    if (n * h - t_end).abs() > 1e-9 * t_end || n < 1.0 {
        return Err(Error::Validation(format!("T = {t_end} is not a whole number of steps h = {h}")));
    }
    Ok(n as usize)
}

fn validate_ladder(spec: &StudySpec) -> Result<Vec<usize>> {
    if spec.h_ladder.is_empty() {
        return Err(Error::Validation("the step ladder is empty".into()));
    }
    let steps = spec.h_ladder.iter().map(|&h| steps_for(spec.t_end, h)).collect::<Result<Vec<_>>>()?;
    for pair in steps.windows(2) {
        if pair[1] != 2 * pair[0] {
            return Err(Error::Validation(
                "the step ladder must be a halving sequence, coarsest first".into(),
            ));
        }
    }
    Ok(steps)
}

/// A prepared study: the (possibly regularized) problem plus how to solve
/// and score one ladder level.
pub(crate) enum Prepared {
    Raw(TwoTermProblem),
    Regularized(RegularizedProblem),
}

impl Prepared {
    pub(crate) fn new(spec: &StudySpec) -> Result<Self> {
        match (&spec.problem, spec.m) {
            (StudyProblem::TwoTerm(p), None) => {
                if spec.solver != SolverKind::Ns1 {
                    return Err(Error::Incompatible(format!("{} solves three-term equations", spec.solver)));
                }
                Ok(Prepared::Raw(p.clone()))
            }
            (StudyProblem::ThreeTerm(_), None) => Err(Error::Validation(
                "three-term equations are solved after regularization; pass m".into(),
            )),
            (StudyProblem::TwoTerm(p), Some(m)) => Ok(Prepared::Regularized(regularize_two_term(p, m)?)),
            (StudyProblem::ThreeTerm(p), Some(m)) => Ok(Prepared::Regularized(regularize_three_term(p, m)?)),
        }
    }

    pub(crate) fn solve(&self, solver: SolverKind, cfg: &SolverConfig) -> Result<GridSolution> {
        match self {
            Prepared::Raw(p) => solve_ns1(p, cfg),
            Prepared::Regularized(r) => solve_regularized(solver, r, cfg),
        }
    }

    /// Exact values of the quantity the solver approximates (y for raw runs,
    /// z = y − T_m for regularized ones).
    pub(crate) fn exact(&self, t: f64) -> Result<f64> {
        match self {
            Prepared::Raw(p) => exact_two_term(p, t),
            Prepared::Regularized(r) => exact_regularized(r, t),
        }
    }
}

fn level_error(prepared: &Prepared, spec: &StudySpec, n_steps: usize) -> Result<(f64, f64)> {
    let cfg = SolverConfig::new(spec.t_end, n_steps, spec.scheme)?;
    let g = prepared.solve(spec.solver, &cfg)?;
    let exact = g.times().map(|t| prepared.exact(t)).collect::<Result<Vec<_>>>()?;
    let err = max_error(&g, |t| exact[(t / g.h).round() as usize]);
    Ok((g.h, err))
}

/// Solve at every ladder level and tabulate errors and observed orders.
///
/// Levels run in parallel; the report is assembled in ladder order.
pub fn run_study(spec: &StudySpec) -> Result<ConvergenceReport> {
    if !(spec.t_end > 0.0) {
        return Err(Error::Validation(format!("horizon T must be positive, got {}", spec.t_end)));
    }
    let steps = validate_ladder(spec)?;
    let prepared = Prepared::new(spec)?;
    let levels = steps
        .par_iter()
        .map(|&n| level_error(&prepared, spec, n))
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<ReportRow> = Vec::with_capacity(levels.len());
    for (i, &(h, err)) in levels.iter().enumerate() {
        let observed_order = if i == 0 { None } else { Some(observed_order(levels[i - 1].1, err)?) };
        rows.push(ReportRow { h, max_error: err, observed_order });
    }
    let alpha = spec.problem.alpha();
    Ok(ConvergenceReport {
        rows,
        solver: spec.solver,
        scheme: spec.scheme,
        alpha,
        m: spec.m,
        problem: spec.problem.label(),
        theoretical_order: theoretical_order(spec.solver, spec.scheme, alpha, spec.m.is_some()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::StartupRule;

    fn grid(values: Vec<f64>, h: f64) -> GridSolution {
        GridSolution { h, values, startup: StartupRule::Direct }
    }

    #[test]
    fn max_error_examples() {
        let exact = |t: f64| t * t;
        let g = grid((0..=4).map(|n| exact(n as f64 * 0.25)).collect(), 0.25);
        assert_eq!(max_error(&g, exact), 0.0);
        let shifted = grid(g.values.iter().map(|v| v + 1e-3).collect(), 0.25);
        assert!((max_error(&shifted, exact) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn observed_order_examples() {
        assert_eq!(observed_order(4e-4, 1e-4).unwrap(), 2.0);
        assert_eq!(observed_order(std::f64::consts::E, std::f64::consts::E).unwrap(), 0.0);
        assert!((observed_order(0.1593e-5, 0.4081e-6).unwrap() - 1.9648).abs() < 5e-4);
        assert!(matches!(observed_order(0.0, 1e-3), Err(Error::DegenerateOrder { .. })));
        assert!(observed_order(1e-3, 0.0).is_err());
    }

    fn spec(ladder: Vec<f64>) -> StudySpec {
        StudySpec {
            problem: StudyProblem::TwoTerm(TwoTermProblem::new(0.5, 1.0, 1.0).unwrap()),
            solver: SolverKind::Ns1,
            scheme: Scheme::L1,
            m: Some(5),
            t_end: 1.0,
            h_ladder: ladder,
        }
    }

    #[test]
    fn single_level_has_no_order() {
        let report = run_study(&spec(vec![0.05])).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].observed_order, None);
        assert_eq!(report.ordered_rows().count(), 0);
    }

    #[test]
    fn ladder_validation() {
        assert!(matches!(run_study(&spec(vec![])), Err(Error::Validation(_))));
        assert!(matches!(run_study(&spec(vec![0.1, 0.03])), Err(Error::Validation(_))));
        assert!(matches!(run_study(&spec(vec![0.3])), Err(Error::Validation(_))));
        assert!(matches!(run_study(&spec(vec![0.025, 0.05])), Err(Error::Validation(_))));
    }

    #[test]
    fn orders_follow_adjacent_errors() {
        let report = run_study(&spec(vec![0.05, 0.025, 0.0125])).unwrap();
        for pair in report.rows.windows(2) {
            let want = (pair[0].max_error / pair[1].max_error).log2();
            assert!((pair[1].observed_order.unwrap() - want).abs() < 1e-12);
        }
        assert_eq!(report.theoretical_order, 1.5);
    }

    #[test]
    fn three_term_needs_m() {
        let mut s = spec(vec![0.05]);
        s.problem = StudyProblem::ThreeTerm(ThreeTermProblem::canonical(0.4).unwrap());
        s.m = None;
        s.solver = SolverKind::Ns2;
        assert!(matches!(run_study(&s), Err(Error::Validation(_))));
    }

    #[test]
    fn theoretical_orders() {
        assert_eq!(theoretical_order(SolverKind::Ns2, Scheme::A2, 0.3, true), 2.0);
        assert!((theoretical_order(SolverKind::Ns2, Scheme::A2, 0.7, true) - 1.6).abs() < 1e-12);
        assert_eq!(theoretical_order(SolverKind::Ns1, Scheme::L1, 0.3, false), 0.3);
        assert_eq!(theoretical_order(SolverKind::Ns3, Scheme::L1, 0.5, true), 1.5);
    }
}
