//! Time-stepping recurrences for the two- and three-term equations.
//!
//! * [`solve_ns1`]: `y^(α) + B y = F`, raw or regularized.
//! * [`solve_ns2`]: regularized three-term equation, kernels at orders α and 2α.
//! * [`solve_ns3`]: regularized three-term equation at α = 1/2, where the
//!   order-2α derivative is an ordinary first derivative.
//!
//! Each step solves the linear equation for u_n exactly; the history sum runs
//! over all previous values, so a solve costs O(N²).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::{coeffs, l1_coeffs, KernelCoefficients, Scheme};
use crate::problems::{taylor_eval, BaseProblem, RegularizedProblem, ThreeTermProblem, TwoTermProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Ns1,
    Ns2,
    Ns3,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Ns1 => "ns1",
            SolverKind::Ns2 => "ns2",
            SolverKind::Ns3 => "ns3",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ns1" => Ok(SolverKind::Ns1),
            "ns2" => Ok(SolverKind::Ns2),
            "ns3" => Ok(SolverKind::Ns3),
            other => Err(Error::Validation(format!("unknown solver {other:?} (expected ns1, ns2 or ns3)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub t_end: f64,
    pub n_steps: usize,
    pub scheme: Scheme,
    /// Overrides the number of leading values pinned to zero in regularized
    /// runs (see [`StartupRule::ZeroStart`]).
    pub zero_start: Option<usize>,
}

impl SolverConfig {
    pub fn new(t_end: f64, n_steps: usize, scheme: Scheme) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::Validation(format!("horizon T must be positive, got {t_end}")));
        }
        if n_steps < 4 {
            return Err(Error::Validation(format!("need at least 4 steps, got {n_steps}")));
        }
        Ok(Self { t_end, n_steps, scheme, zero_start: None })
    }

    pub fn with_zero_start(mut self, count: usize) -> Self {
        self.zero_start = Some(count);
        self
    }

    pub fn h(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }
}

/// How the first few grid values were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartupRule {
    /// The recurrence runs from n = 1 with the configured kernel.
    Direct,
    /// Steps 1..=steps use the L1 kernel, later steps the configured one.
    L1Startup { steps: usize },
    /// u_0..u_{count−1} are zero; the recurrence starts at n = count.
    ZeroStart { count: usize },
}

impl fmt::Display for StartupRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartupRule::Direct => f.write_str("direct"),
            StartupRule::L1Startup { steps } => write!(f, "l1 for n<={steps}"),
            StartupRule::ZeroStart { count } => write!(f, "u_0..u_{} = 0", count - 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub h: f64,
    pub values: Vec<f64>,
    pub startup: StartupRule,
}

impl GridSolution {
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.h
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|n| self.time(n))
    }
}

/// Sign of the α-kernel inside the NS2 history sum.
///
/// `Plus` follows from collecting the discretized equation; `Minus` is the
/// variant sometimes printed for the closed recurrence and is kept for
/// comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistorySign {
    #[default]
    Plus,
    Minus,
}

/// Input accepted by [`solve_ns1`].
#[derive(Debug, Clone, Copy)]
pub enum Ns1Input<'a> {
    Raw(&'a TwoTermProblem),
    Regularized(&'a RegularizedProblem),
}

impl<'a> From<&'a TwoTermProblem> for Ns1Input<'a> {
    fn from(p: &'a TwoTermProblem) -> Self {
        Ns1Input::Raw(p)
    }
}

impl<'a> From<&'a RegularizedProblem> for Ns1Input<'a> {
    fn from(r: &'a RegularizedProblem) -> Self {
        Ns1Input::Regularized(r)
    }
}

/// Σ_{k=n}^{1} λ_k u_{n−k}, highest k first.
fn history(kc: &KernelCoefficients, u: &[f64], n: usize) -> f64 {
    (1..=n).rev().map(|k| kc.scaled_weight_at_step(k, n) * u[n - k]).sum()
}

fn guard(denom: f64, step: usize) -> Result<f64> {
    if denom == 0.0 || !denom.is_finite() {
        Err(Error::SingularStep { step })
    } else {
        Ok(denom)
    }
}

fn zero_start(cfg: &SolverConfig, default: usize, minimum: usize) -> Result<usize> {
    let count = cfg.zero_start.unwrap_or(default);
    if count < minimum || count > cfg.n_steps {
        return Err(Error::Validation(format!(
            "zero-start count must lie in {minimum}..={}, got {count}",
            cfg.n_steps
        )));
    }
    Ok(count)
}

fn require_smooth_for_a4(r: &RegularizedProblem, scheme: Scheme) -> Result<()> {
    if scheme == Scheme::A4 && r.smoothness < 2 {
        return Err(Error::Incompatible(format!(
            "A4 needs z(0)=z'(0)=z''(0)=0, i.e. m*alpha > 2 (m = {}, alpha = {})",
            r.m,
            r.alpha()
        )));
    }
    Ok(())
}

/// NS1: `u_n = (h^α F_n − Σ_{k=1}^{n} λ_k u_{n−k}) / (λ_0 + B h^α)`.
///
/// Raw runs start from u_0 = y0; A2 uses L1 for the first two steps and A4
/// is rejected. Regularized runs pin the first 1 (L1), 2 (A2) or 3 (A4)
/// values to zero.
pub fn solve_ns1<'a>(input: impl Into<Ns1Input<'a>>, cfg: &SolverConfig) -> Result<GridSolution> {
    let input = input.into();
    let n_steps = cfg.n_steps;
    let h = cfg.h();

    let (alpha, b, u0, forcing, startup) = match input {
        Ns1Input::Raw(p) => {
            let startup = match cfg.scheme {
                Scheme::L1 => StartupRule::Direct,
                Scheme::A2 => StartupRule::L1Startup { steps: 2 },
                Scheme::A4 => {
                    return Err(Error::Incompatible(
                        "A4 requires zero initial data; regularize the problem first".into(),
                    ))
                }
            };
            (p.alpha, p.b, p.y0, &p.forcing, startup)
        }
        Ns1Input::Regularized(r) => {
            let BaseProblem::TwoTerm(p) = &r.base else {
                return Err(Error::Incompatible("NS1 solves two-term equations".into()));
            };
            require_smooth_for_a4(r, cfg.scheme)?;
            let count = zero_start(cfg, cfg.scheme.zero_head(), 1)?;
            (p.alpha, p.b, 0.0, &r.residual_forcing, StartupRule::ZeroStart { count })
        }
    };

    let kernel = coeffs(cfg.scheme, alpha, n_steps)?;
    let startup_kernel = match startup {
        StartupRule::L1Startup { .. } => Some(l1_coeffs(alpha, n_steps)?),
        _ => None,
    };
    let h_alpha = h.powf(alpha);

    let mut u = vec![0.0; n_steps + 1];
    u[0] = u0;
    let first = match startup {
        StartupRule::ZeroStart { count } => count,
        _ => 1,
    };
    for n in first..=n_steps {
        let kc = match (startup, &startup_kernel) {
            (StartupRule::L1Startup { steps }, Some(l1)) if n <= steps => l1,
            _ => &kernel,
        };
        let denom = guard(kc.scaled_weight_at_step(0, n) + b * h_alpha, n)?;
        u[n] = (h_alpha * forcing.eval(n as f64 * h) - history(kc, &u, n)) / denom;
    }
    Ok(GridSolution { h, values: u, startup })
}

fn three_term_base(r: &RegularizedProblem) -> Result<&ThreeTermProblem> {
    match &r.base {
        BaseProblem::ThreeTerm(p) => Ok(p),
        BaseProblem::TwoTerm(_) => Err(Error::Incompatible("expected a regularized three-term equation".into())),
    }
}

/// NS2 with the history sign derived from the discretized equation.
pub fn solve_ns2(r: &RegularizedProblem, cfg: &SolverConfig) -> Result<GridSolution> {
    solve_ns2_with_sign(r, cfg, HistorySign::Plus)
}

/// NS2: u_0 = u_1 = 0 and for n ≥ 2
///
/// ```text
/// u_n = (h^{2α} F_n − Σ_{k=1}^{n−1} (λ_k^{(2α)} ± A h^α λ_k^{(α)}) u_{n−k})
///       / (λ_0^{(2α)} + A h^α λ_0^{(α)} + C h^{2α})
/// ```
pub fn solve_ns2_with_sign(r: &RegularizedProblem, cfg: &SolverConfig, sign: HistorySign) -> Result<GridSolution> {
    let p = three_term_base(r)?;
    require_smooth_for_a4(r, cfg.scheme)?;
    let n_steps = cfg.n_steps;
    let h = cfg.h();
    let alpha = p.alpha;

    let double = coeffs(cfg.scheme, 2.0 * alpha, n_steps)?;
    let single = coeffs(cfg.scheme, alpha, n_steps)?;
    let h_alpha = h.powf(alpha);
    let h_2alpha = h.powf(2.0 * alpha);
    let a_h = match sign {
        HistorySign::Plus => p.a * h_alpha,
        HistorySign::Minus => -p.a * h_alpha,
    };

    let count = zero_start(cfg, 2, 1)?;
    let mut u = vec![0.0; n_steps + 1];
    let denom0 = double.scaled_weight_at_step(0, n_steps) + p.a * h_alpha * single.scaled_weight_at_step(0, n_steps)
        + p.c * h_2alpha;
    for n in count..=n_steps {
        let denom = guard(denom0, n)?;
        let hist: f64 = (1..n)
            .rev()
            .map(|k| {
                (double.scaled_weight_at_step(k, n) + a_h * single.scaled_weight_at_step(k, n)) * u[n - k]
            })
            .sum();
        u[n] = (h_2alpha * r.residual_forcing.eval(n as f64 * h) - hist) / denom;
    }
    Ok(GridSolution { h, values: u, startup: StartupRule::ZeroStart { count } })
}

/// NS3 (α = 1/2): the order-1 derivative uses the backward stencil, giving
///
/// ```text
/// u_n = (2h F_n + 4u_{n−1} − u_{n−2} − 2A h^{1/2} Σ_{k=1}^{n} λ_k u_{n−k})
///       / (3 + 2A λ_0 h^{1/2} + 2C h)
/// ```
pub fn solve_ns3(r: &RegularizedProblem, cfg: &SolverConfig) -> Result<GridSolution> {
    let p = three_term_base(r)?;
    if p.alpha != 0.5 {
        return Err(Error::Domain(format!("NS3 needs alpha = 0.5, got {}", p.alpha)));
    }
    require_smooth_for_a4(r, cfg.scheme)?;
    let n_steps = cfg.n_steps;
    let h = cfg.h();
    let kernel = coeffs(cfg.scheme, 0.5, n_steps)?;
    let root_h = h.sqrt();

    let count = zero_start(cfg, 2, 2)?;
    let mut u = vec![0.0; n_steps + 1];
    let denom = 3.0 + 2.0 * p.a * kernel.scaled_weight_at_step(0, n_steps) * root_h + 2.0 * p.c * h;
    for n in count..=n_steps {
        let denom = guard(denom, n)?;
        let rhs = 2.0 * h * r.residual_forcing.eval(n as f64 * h) + 4.0 * u[n - 1]
            - u[n - 2]
            - 2.0 * p.a * root_h * history(&kernel, &u, n);
        u[n] = rhs / denom;
    }
    Ok(GridSolution { h, values: u, startup: StartupRule::ZeroStart { count } })
}

/// Add the subtracted Taylor polynomial back: v_n = u_n + T_m(t_n).
pub fn recover_solution(g: &GridSolution, r: &RegularizedProblem) -> GridSolution {
    let values = g
        .values
        .iter()
        .enumerate()
        .map(|(n, u)| u + taylor_eval(&r.subtracted, g.time(n)))
        .collect();
    GridSolution { h: g.h, values, startup: g.startup }
}

/// Solve a regularized problem with the named recurrence.
pub fn solve_regularized(kind: SolverKind, r: &RegularizedProblem, cfg: &SolverConfig) -> Result<GridSolution> {
    match kind {
        SolverKind::Ns1 => solve_ns1(r, cfg),
        SolverKind::Ns2 => solve_ns2(r, cfg),
        SolverKind::Ns3 => solve_ns3(r, cfg),
    }
}
