//! Two- and three-term equations, Miller-Ross initial values, fractional
//! Taylor polynomials and the regularizing transform.
//!
//! The two-term equation is `y^(α) + B y = F`, `y(0) = y0`. The three-term
//! equation is `y^[2α] + A y^(α) + C y = F` with `y(0) = y0` and
//! `y^(α)(0) = ya0`, where `y^[2α]` is the sequential (Miller-Ross)
//! derivative.
//!
//! Regularization subtracts the fractional Taylor polynomial
//! `T_m(t) = Σ_{k≤m} a_k t^{αk} / Γ(αk + 1)` built from the Miller-Ross values
//! `a_k = y^[kα](0)`. The remainder `z = y − T_m` has zero initial data and is
//! C² once mα > 2 (C³ once mα > 3), which is what the higher-order kernels
//! need.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::specfun::{mittag_leffler_one, recip_gamma};

/// t^e for t ≥ 0, with 0^0 = 1 and 0^e = 0 for e > 0.
pub(crate) fn frac_power(t: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if t == 0.0 {
        0.0
    } else {
        (e * t.ln()).exp()
    }
}

/// A right-hand side F(t), either identically zero or an arbitrary callable.
#[derive(Clone, Default)]
pub struct Forcing(Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>);

impl Forcing {
    pub fn zero() -> Self {
        Forcing(None)
    }

    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Forcing(Some(Arc::new(f)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.as_ref().map_or(0.0, |f| f(t))
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_zero() { "Forcing(0)" } else { "Forcing(fn)" })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    // α = 1 is admitted as the classical limit; the solvers reject it.
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Validation(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

/// `y^(α)(t) + B y(t) = F(t)`, `y(0) = y0`.
#[derive(Debug, Clone)]
pub struct TwoTermProblem {
    pub alpha: f64,
    pub b: f64,
    pub y0: f64,
    pub forcing: Forcing,
}

impl TwoTermProblem {
    /// The homogeneous equation.
    pub fn new(alpha: f64, b: f64, y0: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !b.is_finite() || !y0.is_finite() {
            return Err(Error::Validation("B and y0 must be finite".into()));
        }
        Ok(Self { alpha, b, y0, forcing: Forcing::zero() })
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }
}

/// `y^[2α](t) + A y^(α)(t) + C y(t) = F(t)`, `y(0) = y0`, `y^(α)(0) = ya0`.
#[derive(Debug, Clone)]
pub struct ThreeTermProblem {
    pub alpha: f64,
    pub a: f64,
    pub c: f64,
    pub y0: f64,
    pub ya0: f64,
    pub forcing: Forcing,
}

impl ThreeTermProblem {
    pub fn new(alpha: f64, a: f64, c: f64, y0: f64, ya0: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if ![a, c, y0, ya0].iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("A, C, y0 and ya0 must be finite".into()));
        }
        Ok(Self { alpha, a, c, y0, ya0, forcing: Forcing::zero() })
    }

    /// The instance (D^α + 1)(D^α + 2) y = 0 with y(0) = 3, y^(α)(0) = −4,
    /// whose solution is 2E_α(−t^α) + E_α(−2t^α).
    pub fn canonical(alpha: f64) -> Result<Self> {
        Self::new(alpha, 3.0, 2.0, 3.0, -4.0)
    }

    pub fn is_canonical(&self) -> bool {
        self.a == 3.0 && self.c == 2.0 && self.y0 == 3.0 && self.ya0 == -4.0
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }
}

/// Miller-Ross values a_n = y^[nα](0), n = 0..=m.
#[derive(Debug, Clone, PartialEq)]
pub struct MillerRossSequence {
    pub values: Vec<f64>,
}

impl MillerRossSequence {
    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }
}

/// a_n = (−B)^n.
pub fn miller_ross_two_term(b: f64, m: usize) -> MillerRossSequence {
    let values = std::iter::successors(Some(1.0), |a| Some(-b * a)).take(m + 1).collect();
    MillerRossSequence { values }
}

/// a_0 = a0, a_1 = a1, a_{n+1} = −A a_n − C a_{n−1}.
pub fn miller_ross_three_term(a: f64, c: f64, a0: f64, a1: f64, m: usize) -> MillerRossSequence {
    let mut values = vec![a0, a1];
    for n in 1..m {
        values.push(-a * values[n] - c * values[n - 1]);
    }
    values.truncate(m + 1);
    MillerRossSequence { values }
}

/// A polynomial in t^α with Miller-Ross coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPolynomial {
    pub alpha: f64,
    pub coefficients: MillerRossSequence,
}

/// Σ_k a_k t^{αk} / Γ(αk + 1) for t ≥ 0.
pub fn taylor_eval(p: &TaylorPolynomial, t: f64) -> f64 {
    p.coefficients
        .values
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let e = p.alpha * k as f64;
            a * frac_power(t, e) * recip_gamma(e + 1.0)
        })
        .sum()
}

/// The equation a regularized problem was derived from.
#[derive(Debug, Clone)]
pub enum BaseProblem {
    TwoTerm(TwoTermProblem),
    ThreeTerm(ThreeTermProblem),
}

impl BaseProblem {
    pub fn alpha(&self) -> f64 {
        match self {
            BaseProblem::TwoTerm(p) => p.alpha,
            BaseProblem::ThreeTerm(p) => p.alpha,
        }
    }
}

/// The equation satisfied by z = y − T_m: same operator, zero initial data,
/// forcing replaced by the residual of the subtracted polynomial.
#[derive(Debug, Clone)]
pub struct RegularizedProblem {
    pub base: BaseProblem,
    pub m: usize,
    pub residual_forcing: Forcing,
    pub subtracted: TaylorPolynomial,
    /// Largest k ∈ {0,1,2,3} with mα > k: z is C^k on [0, T].
    pub smoothness: u32,
}

impl RegularizedProblem {
    pub fn alpha(&self) -> f64 {
        self.base.alpha()
    }
}

fn smoothness(alpha: f64, m: usize) -> u32 {
    let ma = alpha * m as f64;
    (0..=3).rev().find(|&k| ma > k as f64).unwrap_or(0)
}

/// Regularize the homogeneous two-term equation.
///
/// z satisfies `z^(α) + B z = y0 (−B)^{m+1} t^{αm} / Γ(αm + 1)`, `z(0) = 0`.
pub fn regularize_two_term(p: &TwoTermProblem, m: usize) -> Result<RegularizedProblem> {
    check_alpha(p.alpha)?;
    if !p.forcing.is_zero() {
        return Err(Error::Unsupported("regularization of a forced two-term equation".into()));
    }
    if m < 1 {
        return Err(Error::Validation("regularization degree m must be at least 1".into()));
    }
    let mut coefficients = miller_ross_two_term(p.b, m);
    for a in &mut coefficients.values {
        *a *= p.y0;
    }
    let (alpha, b) = (p.alpha, p.b);
    let scale = -b * coefficients.values[m];
    let e = alpha * m as f64;
    let g = recip_gamma(e + 1.0);
    let residual_forcing = Forcing::new(move |t| scale * frac_power(t, e) * g);
    Ok(RegularizedProblem {
        base: BaseProblem::TwoTerm(p.clone()),
        m,
        residual_forcing,
        subtracted: TaylorPolynomial { alpha, coefficients },
        smoothness: smoothness(alpha, m),
    })
}

/// Regularize the homogeneous three-term equation.
///
/// z satisfies `z^(2α) + A z^(α) + C z = F` with
/// `F(t) = −(C a_{m−1} + A a_m) t^{(m−1)α}/Γ((m−1)α+1) − C a_m t^{mα}/Γ(mα+1)`
/// and `z(0) = z^(α)(0) = 0`.
pub fn regularize_three_term(p: &ThreeTermProblem, m: usize) -> Result<RegularizedProblem> {
    check_alpha(p.alpha)?;
    if !p.forcing.is_zero() {
        return Err(Error::Unsupported("regularization of a forced three-term equation".into()));
    }
    if m < 2 {
        return Err(Error::Validation("three-term regularization needs m >= 2".into()));
    }
    let coefficients = miller_ross_three_term(p.a, p.c, p.y0, p.ya0, m);
    let a = &coefficients.values;
    let lower = -(p.c * a[m - 1] + p.a * a[m]);
    let upper = -p.c * a[m];
    let alpha = p.alpha;
    let (e_lo, e_hi) = (alpha * (m - 1) as f64, alpha * m as f64);
    let (g_lo, g_hi) = (recip_gamma(e_lo + 1.0), recip_gamma(e_hi + 1.0));
    let residual_forcing =
        Forcing::new(move |t| lower * frac_power(t, e_lo) * g_lo + upper * frac_power(t, e_hi) * g_hi);
    Ok(RegularizedProblem {
        base: BaseProblem::ThreeTerm(p.clone()),
        m,
        residual_forcing,
        subtracted: TaylorPolynomial { alpha, coefficients },
        smoothness: smoothness(alpha, m),
    })
}

/// Smallest m with mα > k. Advisory: published runs sometimes sit at the
/// threshold rather than strictly above it.
pub fn min_m(alpha: f64, k: u32) -> usize {
    let mut m = (k as f64 / alpha).floor() as usize;
    while alpha * (m as f64) <= k as f64 {
        m += 1;
    }
    m
}

/// y0 · E_α(−B t^α).
pub fn exact_two_term(p: &TwoTermProblem, t: f64) -> Result<f64> {
    if !p.forcing.is_zero() {
        return Err(Error::Unsupported("closed form of a forced two-term equation".into()));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    Ok(p.y0 * mittag_leffler_one(p.alpha, -p.b * frac_power(t, p.alpha))?)
}

/// 2E_α(−t^α) + E_α(−2t^α), available for the canonical constants only.
pub fn exact_three_term(p: &ThreeTermProblem, t: f64) -> Result<f64> {
    if !p.is_canonical() || !p.forcing.is_zero() {
        return Err(Error::Unsupported(
            "closed-form solution is only shipped for A=3, C=2, y0=3, ya0=-4 without forcing".into(),
        ));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    let x = frac_power(t, p.alpha);
    Ok(2.0 * mittag_leffler_one(p.alpha, -x)? + mittag_leffler_one(p.alpha, -2.0 * x)?)
}

/// Exact solution of the base problem at t.
pub fn exact_base(base: &BaseProblem, t: f64) -> Result<f64> {
    match base {
        BaseProblem::TwoTerm(p) => exact_two_term(p, t),
        BaseProblem::ThreeTerm(p) => exact_three_term(p, t),
    }
}

/// z(t) = y(t) − T_m(t).
pub fn exact_regularized(r: &RegularizedProblem, t: f64) -> Result<f64> {
    Ok(exact_base(&r.base, t)? - taylor_eval(&r.subtracted, t))
}
