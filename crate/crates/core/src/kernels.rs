//! Discrete Caputo-derivative kernels on a uniform grid.
//!
//! A kernel approximates the Caputo derivative of order α at t_n = nh by
//!
//! ```text
//! y^(α)(t_n) ≈ normalization · h^(−α) · Σ_{k=0}^{n} λ_k y_{n−k}
//! ```
//!
//! Three weight families are provided:
//!
//! * [`Scheme::L1`]: the piecewise-linear L1 weights σ_k, order 2−α.
//! * [`Scheme::A2`]: L1 with ζ(α−1) corrections on λ_0..λ_2, order 2 for
//!   0 < α < 1 and 3−α for 1 < α < 2.
//! * [`Scheme::A4`]: γ_k = k^(−1−α) with ζ-based head weights, order 3−α,
//!   accurate only for functions with z(0) = z'(0) = z''(0) = 0.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::{gamma, zeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    L1,
    A2,
    A4,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::L1, Scheme::A2, Scheme::A4];

    /// Number of leading grid values a regularized NS1 run pins to zero.
    pub(crate) fn zero_head(self) -> usize {
        match self {
            Scheme::L1 => 1,
            Scheme::A2 => 2,
            Scheme::A4 => 3,
        }
    }

    /// Tag used in scheme names such as NS1(2).
    pub fn tag(self) -> u8 {
        match self {
            Scheme::L1 => 1,
            Scheme::A2 => 2,
            Scheme::A4 => 4,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::L1 => "l1",
            Scheme::A2 => "a2",
            Scheme::A4 => "a4",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Scheme::L1),
            "a2" | "2" => Ok(Scheme::A2),
            "a4" | "4" => Ok(Scheme::A4),
            other => Err(Error::Validation(format!("unknown scheme {other:?} (expected l1, a2 or a4)"))),
        }
    }
}

/// Weights of one discrete Caputo kernel, generated for a fixed step count.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    scheme: Scheme,
    alpha: f64,
    weights: Vec<f64>,
    normalization: f64,
    order: f64,
    /// ζ(α−1), kept so A2 can rebuild its last weight at any step.
    head_correction: f64,
}

impl KernelCoefficients {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of steps covered; the weights run λ_0..λ_n.
    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Theoretical accuracy exponent β(α).
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn requires_zero_initial_data(&self) -> bool {
        self.scheme == Scheme::A4
    }

    /// Unnormalized weight λ_k as it enters a derivative evaluated at step n,
    /// for k ≤ n ≤ self.n().
    ///
    /// The L1 and A2 families use a different formula for the last index, so
    /// λ_n at step n differs from the interior λ_n stored for a longer kernel.
    pub fn weight_at_step(&self, k: usize, n: usize) -> f64 {
        debug_assert!(k <= n && n <= self.n());
        if k < n || self.scheme == Scheme::A4 {
            return self.weights[k];
        }
        let p = 1.0 - self.alpha;
        let mut w = if n == 0 { 1.0 } else { -forward_difference(p, n - 1) };
        if self.scheme == Scheme::A2 {
            w += match n {
                0 => -self.head_correction,
                1 => 2.0 * self.head_correction,
                2 => -self.head_correction,
                _ => 0.0,
            };
        }
        w
    }

    /// normalization · weight_at_step(k, n)
    pub fn scaled_weight_at_step(&self, k: usize, n: usize) -> f64 {
        self.normalization * self.weight_at_step(k, n)
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
        return Err(Error::Domain(format!(
            "kernel order must lie in (0,1) or (1,2), got {alpha}; order 1 uses the first-derivative stencil"
        )));
    }
    Ok(())
}

/// k^p with the convention 0^p = 0 (the term is absent in the L1 sums).
fn power(k: usize, p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        (p * (k as f64).ln()).exp()
    }
}

/// (k+1)^p − k^p, computed without cancellation.
fn forward_difference(p: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let x = k as f64;
    power(k, p) * (p * (1.0 / x).ln_1p()).exp_m1()
}

fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    let mut prev = forward_difference(p, 0);
    for k in 1..n {
        let next = forward_difference(p, k);
        w.push(next - prev);
        prev = next;
    }
    if n >= 1 {
        w.push(-prev);
    }
    w
}

/// L1 weights σ_0..σ_n.
pub fn l1_coeffs(alpha: f64, n: usize) -> Result<KernelCoefficients> {
    check_order(alpha)?;
    if n < 1 {
        return Err(Error::Size("L1 kernel needs n >= 1".into()));
    }
    Ok(KernelCoefficients {
        scheme: Scheme::L1,
        alpha,
        weights: l1_weights(alpha, n),
        normalization: 1.0 / gamma(2.0 - alpha)?,
        order: 2.0 - alpha,
        head_correction: 0.0,
    })
}

/// ζ-corrected second-order weights δ_0..δ_n.
pub fn a2_coeffs(alpha: f64, n: usize) -> Result<KernelCoefficients> {
    check_order(alpha)?;
    if n < 3 {
        return Err(Error::Size(format!("A2 kernel needs n >= 3, got {n}")));
    }
    let z = zeta(alpha - 1.0)?;
    let mut weights = l1_weights(alpha, n);
    weights[0] -= z;
    weights[1] += 2.0 * z;
    weights[2] -= z;
    Ok(KernelCoefficients {
        scheme: Scheme::A2,
        alpha,
        weights,
        normalization: 1.0 / gamma(2.0 - alpha)?,
        order: if alpha < 1.0 { 2.0 } else { 3.0 - alpha },
        head_correction: z,
    })
}

/// Order 3−α weights γ_0..γ_n, normalized by 1/Γ(−α).
pub fn a4_coeffs(alpha: f64, n: usize) -> Result<KernelCoefficients> {
    if alpha >= 0.0 && alpha == alpha.round() {
        return Err(Error::Pole { function: "gamma", at: -alpha });
    }
    check_order(alpha)?;
    if n < 3 {
        return Err(Error::Size(format!("A4 kernel needs n >= 3, got {n}")));
    }
    let z_a = zeta(alpha)?;
    let z_am1 = zeta(alpha - 1.0)?;
    let z_ap1 = zeta(1.0 + alpha)?;
    let p = -(1.0 + alpha);
    let mut weights = Vec::with_capacity(n + 1);
    weights.push(-z_ap1 + 1.5 * z_a - 0.5 * z_am1);
    weights.push(1.0 - 2.0 * z_a + z_am1);
    weights.push(power(2, p) + 0.5 * z_a - 0.5 * z_am1);
    weights.extend((3..=n).map(|k| power(k, p)));
    Ok(KernelCoefficients {
        scheme: Scheme::A4,
        alpha,
        weights,
        normalization: 1.0 / gamma(-alpha)?,
        order: 3.0 - alpha,
        head_correction: 0.0,
    })
}

/// Build the kernel for `scheme`.
pub fn coeffs(scheme: Scheme, alpha: f64, n: usize) -> Result<KernelCoefficients> {
    match scheme {
        Scheme::L1 => l1_coeffs(alpha, n),
        Scheme::A2 => a2_coeffs(alpha, n),
        Scheme::A4 => a4_coeffs(alpha, n),
    }
}

/// Second-order backward difference for y'(t_n).
pub fn first_derivative_stencil(y_n: f64, y_nm1: f64, y_nm2: f64, h: f64) -> f64 {
    (1.5 * y_n - 2.0 * y_nm1 + 0.5 * y_nm2) / h
}

/// Apply the kernel to samples y_0..y_n, returning the approximate Caputo
/// derivative at t_n = nh.
pub fn apply_kernel(kc: &KernelCoefficients, samples: &[f64], h: f64) -> Result<f64> {
    if samples.len() != kc.weights.len() {
        return Err(Error::LengthMismatch { expected: kc.weights.len(), got: samples.len() });
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let n = kc.n();
    // Smallest weights first.
    let sum: f64 = (0..=n).rev().map(|k| kc.weights[k] * samples[n - k]).sum();
    Ok(kc.normalization * h.powf(-kc.alpha) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn l1_weights_examples() {
        let kc = l1_coeffs(0.5, 4).unwrap();
        assert_eq!(kc.weights()[0], 1.0);
        assert_relative_eq!(kc.weights()[1], 2f64.sqrt() - 2.0, max_relative = 1e-14);
        assert_relative_eq!(kc.weights()[4], 3f64.sqrt() - 2.0, max_relative = 1e-14);
        assert!(kc.weights().iter().sum::<f64>().abs() < 1e-14);
        assert_eq!(kc.order(), 1.5);
        assert!(!kc.requires_zero_initial_data());
    }

    #[test]
    fn l1_single_step() {
        let kc = l1_coeffs(0.3, 1).unwrap();
        assert_eq!(kc.weights(), &[1.0, -1.0]);
    }

    #[test]
    fn l1_above_one_drops_zero_power() {
        // σ_1 = 2^(1−α) − 2 when 0^(1−α) is absent
        let kc = l1_coeffs(1.4, 5).unwrap();
        assert_relative_eq!(kc.weights()[1], 2f64.powf(-0.4) - 2.0, max_relative = 1e-14);
    }

    #[test]
    fn a2_weights_examples() {
        let z = -0.207_886_224_977_354_566_0; // ζ(−0.5)
        let kc = a2_coeffs(0.5, 6).unwrap();
        assert_relative_eq!(kc.weights()[0], 1.0 - z, max_relative = 1e-12);
        assert_relative_eq!(kc.weights()[0], 1.207_886_224_977_354_6, max_relative = 1e-12);
        // δ_4 = σ_4 = √5 − 2·√4 + √3
        assert_relative_eq!(kc.weights()[4], -0.031_881_214_931_333_01, max_relative = 1e-10);
        let kc5 = a2_coeffs(0.5, 5).unwrap();
        assert!(kc5.weights().iter().sum::<f64>().abs() < 1e-13);
        assert_eq!(kc.order(), 2.0);
        assert_relative_eq!(a2_coeffs(1.4, 5).unwrap().order(), 1.6);
    }

    #[test]
    fn a2_rejects_short_kernels() {
        assert!(matches!(a2_coeffs(0.5, 2), Err(Error::Size(_))));
        assert!(matches!(a4_coeffs(0.5, 2), Err(Error::Size(_))));
        assert!(matches!(l1_coeffs(0.5, 0), Err(Error::Size(_))));
    }

    #[test]
    fn domain_errors() {
        for a in [0.0, 1.0, 2.0, -0.3, 2.5] {
            assert!(l1_coeffs(a, 4).is_err());
            assert!(a2_coeffs(a, 4).is_err());
        }
        assert!(matches!(a4_coeffs(1.0, 4), Err(Error::Pole { .. })));
        assert!(matches!(l1_coeffs(1.0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn a4_weights_examples() {
        let kc = a4_coeffs(0.5, 50).unwrap();
        assert_relative_eq!(kc.weights()[0], -4.698_963_999_411_191_3, max_relative = 1e-12);
        assert_relative_eq!(kc.weights()[4], 0.125, max_relative = 1e-15);
        assert!(kc.requires_zero_initial_data());
        assert_relative_eq!(kc.normalization(), 1.0 / gamma(-0.5).unwrap());
        // tail identity, direct summation as the oracle
        let tail: f64 = (1..=50).map(|k| (k as f64).powf(-1.5)).sum();
        let sum: f64 = kc.weights().iter().sum();
        assert!((sum + (2.612_375_348_685_488_3 - tail)).abs() < 1e-12);
    }

    #[test]
    fn step_weights_use_last_index_formula() {
        let kc = l1_coeffs(0.5, 10).unwrap();
        let short = l1_coeffs(0.5, 6).unwrap();
        for k in 0..=6 {
            assert_relative_eq!(kc.weight_at_step(k, 6), short.weights()[k], max_relative = 1e-14);
        }
        let kc = a2_coeffs(0.7, 10).unwrap();
        let short = a2_coeffs(0.7, 4).unwrap();
        for k in 0..=4 {
            assert_relative_eq!(kc.weight_at_step(k, 4), short.weights()[k], max_relative = 1e-14);
        }
        let kc = a4_coeffs(0.7, 10).unwrap();
        assert_eq!(kc.weight_at_step(5, 5), kc.weights()[5]);
    }

    #[test]
    fn stencil_exact_for_quadratics() {
        assert_eq!(first_derivative_stencil(2.0, 2.0, 2.0, 0.1), 0.0);
        let h = 0.1;
        let y = |t: f64| t;
        assert_relative_eq!(first_derivative_stencil(y(1.0), y(1.0 - h), y(1.0 - 2.0 * h), h), 1.0, max_relative = 1e-13);
        let y = |t: f64| t * t;
        assert_relative_eq!(first_derivative_stencil(y(1.0), y(1.0 - h), y(1.0 - 2.0 * h), h), 2.0, max_relative = 1e-13);
    }

    #[test]
    fn apply_kernel_constant_and_errors() {
        let kc = l1_coeffs(0.5, 64).unwrap();
        let v = apply_kernel(&kc, &vec![3.0; 65], 1.0 / 64.0).unwrap();
        assert!(v.abs() < 1e-12 * 3.0 * 64.0);
        assert!(matches!(apply_kernel(&kc, &[1.0; 3], 0.1), Err(Error::LengthMismatch { .. })));
        assert!(apply_kernel(&kc, &vec![3.0; 65], 0.0).is_err());
    }

    #[test]
    fn apply_kernel_power_functions() {
        let n = 512;
        let h = 1.0 / n as f64;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();

        // D^0.5 t^0.5 = Γ(1.5)
        let kc = l1_coeffs(0.5, n).unwrap();
        let y: Vec<f64> = grid.iter().map(|t| t.sqrt()).collect();
        let got = apply_kernel(&kc, &y, h).unwrap();
        assert!((got - 0.886_226_925_452_758).abs() < 0.5 * h.powf(0.5));

        // D^0.5 t² = 2 t^1.5 / Γ(2.5)
        let kc = a2_coeffs(0.5, n).unwrap();
        let y: Vec<f64> = grid.iter().map(|t| t * t).collect();
        let got = apply_kernel(&kc, &y, h).unwrap();
        assert!((got - 1.504_505_556_127_35).abs() < h * h);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("L1".parse::<Scheme>().unwrap(), Scheme::L1);
        assert_eq!("a4".parse::<Scheme>().unwrap(), Scheme::A4);
        assert!("a3".parse::<Scheme>().is_err());
        assert_eq!(Scheme::A2.to_string(), "a2");
    }
}
