//! Closed-form stochastic separation bounds and maximal-cardinality
//! estimates.
//!
//! Everything is evaluated in log space: `r^n` underflows doubles long before
//! the dimensions of interest (n = 5000 for the cube experiment), and `M` is
//! allowed to be far beyond `u64` range. Each probability bound is returned as
//! a [`BoundResult`] carrying `ln(1 - bound)` plus the bound clamped to
//! `[0, 1]`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// `ln(sum exp(terms))` with max-shift and Neumaier-compensated summation.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &t in terms {
        let v = (t - max).exp();
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    max + (sum + comp).ln()
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    log_sum_exp(&[a, b])
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Result of evaluating `P(event) >= bound`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// `ln(1 - bound)`; `-inf` when the bound is 1 (or the raw formula exceeds 1).
    pub log_complement: f64,
    /// `max(0, 1 - exp(log_complement))`.
    pub probability_lower_bound: f64,
    /// Raw bound `<= 0`: a true but uninformative instance.
    pub vacuous: bool,
}

impl BoundResult {
    pub fn from_log_complement(log_complement: f64) -> Self {
        let vacuous = log_complement >= 0.0;
        let probability_lower_bound = if vacuous { 0.0 } else { -log_complement.exp_m1() };
        BoundResult {
            log_complement,
            probability_lower_bound,
            vacuous,
        }
    }

    /// `1 - bound`, written theta elsewhere.
    pub fn complement(&self) -> f64 {
        self.log_complement.exp()
    }

    /// Unclamped bound `1 - complement`; may be negative for vacuous results.
    pub fn raw_bound(&self) -> f64 {
        -self.log_complement.exp_m1()
    }
}

/// Parameters of the uniform-ball bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallBoundParams {
    n: u64,
    m: f64,
    r: f64,
}

impl BallBoundParams {
    /// `m` is real so that counts like `7e16` are representable; it must be `>= 1`.
    pub fn new(n: u64, m: f64, r: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(m.is_finite() && m >= 1.0) {
            return Err(invalid(format!("M = {m} must be a finite real >= 1")));
        }
        check_r(r)?;
        Ok(BallBoundParams { n, m, r })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn rho(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }

    fn ln_r_pow_n(&self) -> f64 {
        ln_r_pow_n(self.n, self.r)
    }

    fn ln_rho_pow_n(&self) -> f64 {
        ln_rho_pow_n(self.n, self.r)
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("r = {r} outside (0, 1)")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid(format!("theta = {theta} outside (0, 1)")));
    }
    Ok(())
}

fn ln_r_pow_n(n: u64, r: f64) -> f64 {
    n as f64 * r.ln()
}

fn ln_rho_pow_n(n: u64, r: f64) -> f64 {
    0.5 * n as f64 * (-r * r).ln_1p()
}

/// Single point vs the rest: `1 - r^n - 0.5 (M-1) rho^n`.
pub fn ball_single(p: &BallBoundParams) -> BoundResult {
    let terms = [
        p.ln_r_pow_n(),
        (0.5f64).ln() + ln_or_neg_inf(p.m - 1.0) + p.ln_rho_pow_n(),
    ];
    BoundResult::from_log_complement(log_sum_exp(&terms))
}

/// All ordered pairs: `1 - M r^n - 0.5 M (M-1) rho^n`.
pub fn ball_pairwise(p: &BallBoundParams) -> BoundResult {
    let ln_m = p.m.ln();
    let terms = [
        ln_m + p.ln_r_pow_n(),
        (0.5f64).ln() + ln_m + ln_or_neg_inf(p.m - 1.0) + p.ln_rho_pow_n(),
    ];
    BoundResult::from_log_complement(log_sum_exp(&terms))
}

/// All pairwise cosines below `r`: `1 - M r^n - M (M-1) rho^n`.
pub fn ball_angle(p: &BallBoundParams) -> BoundResult {
    let ln_m = p.m.ln();
    let terms = [
        ln_m + p.ln_r_pow_n(),
        ln_m + ln_or_neg_inf(p.m - 1.0) + p.ln_rho_pow_n(),
    ];
    BoundResult::from_log_complement(log_sum_exp(&terms))
}

/// A maximal admissible count: the real supremum and its saturating floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxM {
    pub value: f64,
    pub ln_value: f64,
    pub floor: u64,
}

impl MaxM {
    fn from_ln(ln_value: f64) -> Self {
        let value = ln_value.exp();
        let floor = if value >= u64::MAX as f64 {
            u64::MAX
        } else {
            value.floor() as u64
        };
        MaxM { value, ln_value, floor }
    }
}

/// `M < 2 (theta - r^n) / rho^n`.
pub fn ball_max_m_single(n: u64, r: f64, theta: f64) -> Result<MaxM> {
    check_r(r)?;
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let r_pow_n = r.powf(n as f64);
    let numerator = theta - r_pow_n;
    if numerator < 0.0 {
        return Err(Error::NoFeasibleM { theta, r_pow_n });
    }
    Ok(MaxM::from_ln(
        std::f64::consts::LN_2 + ln_or_neg_inf(numerator) - ln_rho_pow_n(n, r),
    ))
}

/// `M < (r/rho)^n (-1 + sqrt(1 + 2 theta rho^n / r^{2n}))`.
pub fn ball_max_m_pairwise(n: u64, r: f64, theta: f64) -> Result<MaxM> {
    check_r(r)?;
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let ln_ratio = ln_r_pow_n(n, r) - ln_rho_pow_n(n, r);
    let ln_x = (2.0 * theta).ln() + ln_rho_pow_n(n, r) - 2.0 * ln_r_pow_n(n, r);
    // ln(sqrt(1 + x) - 1) = ln x - ln(1 + sqrt(1 + x)), or ~ ln x / 2 for huge x
    let ln_root_term = if ln_x > 700.0 {
        0.5 * ln_x + (-(-0.5 * ln_x).exp()).ln_1p()
    } else {
        let x = ln_x.exp();
        ln_x - (1.0 + (1.0 + x).sqrt()).ln()
    };
    Ok(MaxM::from_ln(ln_ratio + ln_root_term))
}

/// The simpler sufficient condition `theta / M^2 > r^n + 0.5 rho^n`.
pub fn ball_max_m_simple(n: u64, r: f64, theta: f64) -> Result<MaxM> {
    check_r(r)?;
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let ln_denominator = ln_add_exp(ln_r_pow_n(n, r), (0.5f64).ln() + ln_rho_pow_n(n, r));
    Ok(MaxM::from_ln(0.5 * (theta.ln() - ln_denominator)))
}

/// Hoeffding tail for the mean of `n` independent `[0, 1]` variables:
/// `exp(-2 n t^2)` one-sided, `2 exp(-2 n t^2)` two-sided, clamped to `[0, 1]`.
pub fn hoeffding(n: u64, t: f64, two_sided: bool) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t = {t} must be a finite real >= 0")));
    }
    let tail = (-2.0 * n as f64 * t * t).exp();
    Ok(if two_sided { (2.0 * tail).min(1.0) } else { tail })
}

/// Parameters of the product-distribution (cube) bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeBoundParams {
    n: u64,
    m: f64,
    delta: f64,
    sigma0_sq: f64,
    r0_sq: f64,
}

impl CubeBoundParams {
    pub fn new(n: u64, m: f64, delta: f64, sigma0_sq: f64, r0_sq: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(m.is_finite() && m >= 0.0) {
            return Err(invalid(format!("M = {m} must be a finite real >= 0")));
        }
        if !(delta > 0.0 && delta < 2.0 / 3.0) {
            return Err(invalid(format!("delta = {delta} outside (0, 2/3)")));
        }
        if !(sigma0_sq > 0.0 && sigma0_sq <= 0.25) {
            return Err(invalid(format!("sigma0^2 = {sigma0_sq} outside (0, 1/4]")));
        }
        let nf = n as f64;
        let floor = nf * sigma0_sq;
        let slack = 1e-12 * nf;
        if !(r0_sq >= floor - slack && r0_sq <= nf + slack) {
            return Err(invalid(format!(
                "R0^2 = {r0_sq} outside [n sigma0^2, n] = [{floor}, {nf}]"
            )));
        }
        Ok(CubeBoundParams {
            n,
            m,
            delta,
            sigma0_sq,
            r0_sq,
        })
    }

    /// `R_0^2` at its lower estimate `n sigma0^2`.
    pub fn at_variance_floor(n: u64, m: f64, delta: f64, sigma0_sq: f64) -> Result<Self> {
        CubeBoundParams::new(n, m, delta, sigma0_sq, n as f64 * sigma0_sq)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma0_sq(&self) -> f64 {
        self.sigma0_sq
    }

    pub fn r0_sq(&self) -> f64 {
        self.r0_sq
    }

    /// Hoeffding deviation `t = delta R_0^2 / n`.
    pub fn t(&self) -> f64 {
        self.delta * self.r0_sq / self.n as f64
    }

    /// `2 delta^2 R_0^4 / n`, the layer exponent.
    fn layer_exponent(&self) -> f64 {
        2.0 * self.delta * self.delta * self.r0_sq * self.r0_sq / self.n as f64
    }

    /// `2 R_0^4 (2 - 3 delta)^2 / n`, the cap-ball exponent.
    fn cap_exponent(&self) -> f64 {
        let k = 2.0 - 3.0 * self.delta;
        2.0 * self.r0_sq * self.r0_sq * k * k / self.n as f64
    }
}

/// Lower bound on the probability that one point lands in the layer
/// `1 - delta <= |x - mean|^2 / R_0^2 <= 1 + delta`: `1 - 2 exp(-2 n t^2)`.
pub fn cube_layer_probability(p: &CubeBoundParams) -> f64 {
    let ln_tail = std::f64::consts::LN_2 - p.layer_exponent();
    if ln_tail >= 0.0 {
        0.0
    } else {
        -ln_tail.exp_m1()
    }
}

/// `1 - 2M exp(-2 delta^2 R_0^4 / n) - (M-1) exp(-2 R_0^4 (2 - 3 delta)^2 / n)`.
///
/// The `(M-1)` factor is clamped at zero so that `M = 0` gives 1.
pub fn cube_single(p: &CubeBoundParams) -> BoundResult {
    let terms = [
        ln_or_neg_inf(2.0 * p.m) - p.layer_exponent(),
        ln_or_neg_inf(p.m - 1.0) - p.cap_exponent(),
    ];
    BoundResult::from_log_complement(log_sum_exp(&terms))
}

/// `1 - 2M exp(-2 delta^2 R_0^4 / n) - M (M-1) exp(-2 R_0^4 (2 - 3 delta)^2 / n)`.
pub fn cube_pairwise(p: &CubeBoundParams) -> BoundResult {
    let terms = [
        ln_or_neg_inf(2.0 * p.m) - p.layer_exponent(),
        ln_or_neg_inf(p.m) + ln_or_neg_inf(p.m - 1.0) - p.cap_exponent(),
    ];
    BoundResult::from_log_complement(log_sum_exp(&terms))
}

fn check_cube_simple(n: u64, m: f64, sigma0_sq: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(invalid(format!("M = {m} must be a finite real >= 0")));
    }
    if !(sigma0_sq > 0.0 && sigma0_sq <= 0.25) {
        return Err(invalid(format!("sigma0^2 = {sigma0_sq} outside (0, 1/4]")));
    }
    Ok(())
}

/// Simplified single-point cube estimate `1 - 3M exp(-0.5 n sigma0^4)`
/// (delta = 1/2, `R_0^2` replaced by `n sigma0^2`).
pub fn cube_single_simplified(n: u64, m: f64, sigma0_sq: f64) -> Result<BoundResult> {
    check_cube_simple(n, m, sigma0_sq)?;
    let x = 0.5 * n as f64 * sigma0_sq * sigma0_sq;
    Ok(BoundResult::from_log_complement(ln_or_neg_inf(3.0 * m) - x))
}

/// Simplified pairwise cube estimate `1 - M (M+1) exp(-0.5 n sigma0^4)`.
pub fn cube_pairwise_simplified(n: u64, m: f64, sigma0_sq: f64) -> Result<BoundResult> {
    check_cube_simple(n, m, sigma0_sq)?;
    let x = 0.5 * n as f64 * sigma0_sq * sigma0_sq;
    Ok(BoundResult::from_log_complement(
        ln_or_neg_inf(m) + (m + 1.0).ln() - x,
    ))
}

/// `M < (1/3) theta exp(0.5 n sigma0^4)`.
pub fn cube_max_m_single(n: u64, sigma0_sq: f64, theta: f64) -> Result<MaxM> {
    check_cube_simple(n, 1.0, sigma0_sq)?;
    check_theta(theta)?;
    Ok(MaxM::from_ln((theta / 3.0).ln() + 0.5 * n as f64 * sigma0_sq * sigma0_sq))
}

/// `(M+1)^2 < (1/3) theta exp(0.5 n sigma0^4)`; clamped at zero when no
/// positive `M` qualifies.
pub fn cube_max_m_pairwise(n: u64, sigma0_sq: f64, theta: f64) -> Result<MaxM> {
    let half_ln = 0.5 * cube_max_m_single(n, sigma0_sq, theta)?.ln_value;
    if half_ln <= 0.0 {
        return Ok(MaxM::from_ln(f64::NEG_INFINITY));
    }
    // ln(e^h - 1) = h + ln(1 - e^{-h})
    Ok(MaxM::from_ln(half_ln + (-(-half_ln).exp()).ln_1p()))
}

/// `ln(1 - a) + a / (1 - a) = sum_{k >= 2} (k - 1)/k a^k`.
fn bernoulli_gap(a: f64) -> f64 {
    if a < 1e-3 {
        let mut term = a * a;
        let mut sum = 0.0;
        for k in 2..12 {
            let k = k as f64;
            sum += (k - 1.0) / k * term;
            term *= a;
        }
        sum
    } else {
        (-a).ln_1p() + a / (1.0 - a)
    }
}

/// Two-neuron (cascade) separability bound:
///
/// ```text
/// (1 - r^n) (1 - 0.5 rho^n)^{M-1} (1 - lambda^n / n!) exp(lambda),
/// lambda = 0.5 (M - n) rho^n / (1 - 0.5 rho^n)
/// ```
///
/// evaluated with `ln n!` from the log-gamma function. Requires `M > n`.
pub fn cascade_bound(n: u64, r: f64, m: f64) -> Result<BoundResult> {
    check_r(r)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let nf = n as f64;
    if !(m.is_finite() && m > nf) {
        return Err(invalid(format!("cascade bound needs M > n, got M = {m}, n = {n}")));
    }
    let ln_a = (0.5f64).ln() + ln_rho_pow_n(n, r);
    let a = ln_a.exp();
    let ln_one_minus_a = (-a).ln_1p();
    let ln_lambda = (0.5f64).ln() + (m - nf).ln() + ln_rho_pow_n(n, r) - ln_one_minus_a;

    let ln_layer = (-ln_r_pow_n(n, r).exp()).ln_1p();
    // (M-1) ln(1-a) + lambda = (M-1) g(a) - (n-1) a/(1-a), g(a) = ln(1-a) + a/(1-a);
    // regrouped because the two terms nearly cancel for large M
    let ln_rest = ln_layer + (m - 1.0) * bernoulli_gap(a) - (nf - 1.0) * a / (1.0 - a);
    let ln_pow_over_fact = nf * ln_lambda - ln_gamma(nf + 1.0);

    let log_complement = if ln_pow_over_fact < 0.0 {
        let ln_product = ln_rest + (-ln_pow_over_fact.exp()).ln_1p();
        let complement = -ln_product.exp_m1();
        ln_or_neg_inf(complement)
    } else {
        // 1 - lambda^n/n! <= 0: the product is <= 0 and the bound vacuous.
        // complement = 1 + e^{ln_rest} (lambda^n/n! - 1)
        let ln_excess = if ln_pow_over_fact > 700.0 {
            ln_pow_over_fact + (-(-ln_pow_over_fact).exp()).ln_1p()
        } else {
            ln_or_neg_inf(ln_pow_over_fact.exp_m1())
        };
        ln_add_exp(0.0, ln_rest + ln_excess)
    };
    Ok(BoundResult::from_log_complement(log_complement))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ball(n: u64, m: f64, r: f64) -> BallBoundParams {
        BallBoundParams::new(n, m, r).unwrap()
    }

    #[test]
    fn log_sum_exp_edge_cases() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn ball_single_m1_is_layer_only() {
        let b = ball_single(&ball(100, 1.0, FRAC_1_SQRT_2));
        assert!((b.complement() - 2f64.powi(-50)).abs() < 1e-28);
        assert!(!b.vacuous);
    }

    #[test]
    fn ball_single_large_m() {
        // r^n + 0.5 (M-1) rho^n with r = rho = 2^{-1/2}, n = 100
        let b = ball_single(&ball(100, 2.74e6, FRAC_1_SQRT_2));
        let expected = 2f64.powi(-50) * (1.0 + 0.5 * (2.74e6 - 1.0));
        assert!((b.complement() / expected - 1.0).abs() < 1e-12);
        assert!((b.complement() / 1.218e-9 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ball_single_near_one_is_not_vacuous() {
        let b = ball_single(&ball(10, 1.0, 0.999_999));
        assert!(!b.vacuous);
        assert!(b.probability_lower_bound > 0.0 && b.probability_lower_bound < 1e-4);
    }

    #[test]
    fn ball_pairwise_remark_value() {
        let b = ball_pairwise(&ball(100, 2.7e6, FRAC_1_SQRT_2));
        assert!(b.probability_lower_bound >= 0.9967);
        assert!((b.complement() - 3.2374e-3).abs() < 1e-7);
        let one = ball_pairwise(&ball(100, 1.0, FRAC_1_SQRT_2));
        assert_eq!(one, ball_single(&ball(100, 1.0, FRAC_1_SQRT_2)));
        let huge = ball_pairwise(&ball(100, 1e8, FRAC_1_SQRT_2));
        assert!(huge.vacuous);
        assert_eq!(huge.probability_lower_bound, 0.0);
    }

    #[test]
    fn ball_angle_doubles_second_term() {
        let p = ball(100, 2.7e6, FRAC_1_SQRT_2);
        let pair = ball_pairwise(&p).complement();
        let angle = ball_angle(&p).complement();
        let first = 2.7e6 * 2f64.powi(-50);
        assert!(((angle - first) / (pair - first) - 2.0).abs() < 1e-9);
        assert!(ball_angle(&p).probability_lower_bound <= ball_pairwise(&p).probability_lower_bound);
    }

    #[test]
    fn max_m_single() {
        let m = ball_max_m_single(100, FRAC_1_SQRT_2, 0.01).unwrap();
        assert!((m.value / (0.02 * 2f64.powi(50)) - 1.0).abs() < 1e-12);
        assert!((m.value - 2.2518e13).abs() < 1e9);
        assert!(matches!(
            ball_max_m_single(2, 0.99, 0.5),
            Err(Error::NoFeasibleM { .. })
        ));
        let zero = ball_max_m_single(2, 0.5, 0.25).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.floor, 0);
    }

    #[test]
    fn max_m_pairwise() {
        let m = ball_max_m_pairwise(100, FRAC_1_SQRT_2, 0.01).unwrap();
        let x = 0.02 * 2f64.powi(50);
        let expected = (1.0 + x).sqrt() - 1.0;
        assert!((m.value / expected - 1.0).abs() < 1e-12);
        assert!((m.value - 4.7453e6).abs() < 1e2);
        let tiny = ball_max_m_pairwise(100, FRAC_1_SQRT_2, 1e-300_f64.max(f64::MIN_POSITIVE)).unwrap();
        assert!(tiny.value < 1e-100);
    }

    #[test]
    fn max_m_simple_remark() {
        let m = ball_max_m_simple(100, FRAC_1_SQRT_2, 0.01).unwrap();
        // exact integer oracle: floor(sqrt(2^50 / 150))
        let bound = (1u128 << 50) / 150;
        let mut k = (bound as f64).sqrt() as u128;
        while k * k > bound {
            k -= 1;
        }
        while (k + 1) * (k + 1) <= bound {
            k += 1;
        }
        assert_eq!(m.floor as u128, k);
        assert_eq!(m.floor, 2_739_707);
        assert!(m.floor < 2_740_000);
        let halved = ball_max_m_simple(100, FRAC_1_SQRT_2, 0.005).unwrap();
        assert!((halved.value / m.value - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn max_m_simple_boundary_is_one() {
        let (n, r) = (2u64, 0.6f64);
        let theta = r.powi(2) + 0.5 * (1.0 - r * r);
        let m = ball_max_m_simple(n, r, theta).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hoeffding_values() {
        assert!((hoeffding(100, 0.1, false).unwrap() - (-2f64).exp()).abs() < 1e-15);
        assert_eq!(hoeffding(10, 0.0, true).unwrap(), 1.0);
        assert_eq!(hoeffding(10, 0.0, false).unwrap(), 1.0);
        let mut prev = 1.0;
        for k in 1..50 {
            let v = hoeffding(5000, k as f64 * 0.01, true).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        assert!(prev < 1e-100);
        assert!(hoeffding(0, 0.1, false).is_err());
        assert!(hoeffding(1, -0.1, false).is_err());
    }

    #[test]
    fn cube_layer_matches_hoeffding() {
        let p = CubeBoundParams::new(5000, 1.0, 0.5, 1.0 / 12.0, 5000.0 / 12.0).unwrap();
        let via_t = 1.0 - hoeffding(5000, p.t(), true).unwrap();
        assert!((cube_layer_probability(&p) - via_t).abs() < 1e-15);
        let thin = CubeBoundParams::new(100, 1.0, 1e-9, 1.0 / 12.0, 100.0 / 12.0).unwrap();
        assert_eq!(cube_layer_probability(&thin), 0.0);
        // at the variance floor the layer exponent is 0.5 n sigma0^4 at delta = 1/2
        let s = 0.05;
        let floor = CubeBoundParams::at_variance_floor(800, 1.0, 0.5, s).unwrap();
        let expected = 1.0 - 2.0 * (-0.5 * 800.0 * s * s).exp();
        assert!((cube_layer_probability(&floor) - expected).abs() < 1e-14);
    }

    #[test]
    fn cube_params_validation() {
        assert!(CubeBoundParams::new(100, 10.0, 0.9, 0.05, 10.0).is_err());
        assert!(CubeBoundParams::new(100, 10.0, 0.0, 0.05, 10.0).is_err());
        assert!(CubeBoundParams::new(100, 10.0, 0.5, 0.3, 40.0).is_err());
        assert!(CubeBoundParams::new(100, 10.0, 0.5, 0.05, 4.0).is_err());
        assert!(CubeBoundParams::new(100, 10.0, 0.5, 0.05, 101.0).is_err());
    }

    #[test]
    fn cube_single_fig2_value() {
        let b = cube_single_simplified(5000, 20_000.0, 1.0 / 12.0).unwrap();
        assert!((b.probability_lower_bound - 0.998_268_922_565_65).abs() < 1e-12);
        let zero = cube_single(&CubeBoundParams::at_variance_floor(100, 0.0, 0.5, 0.1).unwrap());
        assert_eq!(zero.probability_lower_bound, 1.0);
        let zero_pair = cube_pairwise(&CubeBoundParams::at_variance_floor(100, 0.0, 0.5, 0.1).unwrap());
        assert_eq!(zero_pair.probability_lower_bound, 1.0);
    }

    #[test]
    fn cube_max_m() {
        let single = cube_max_m_single(5000, 1.0 / 12.0, 0.01).unwrap();
        assert!((single.value - 115_534.981_873_98).abs() < 1e-4);
        let pair = cube_max_m_pairwise(5000, 1.0 / 12.0, 0.01).unwrap();
        assert!(((pair.value + 1.0).powi(2) / single.value - 1.0).abs() < 1e-12);
        let degenerate = cube_max_m_single(1, 1e-6, 0.01).unwrap();
        assert!(degenerate.value < 1.0 && degenerate.floor == 0);
        let degenerate_pair = cube_max_m_pairwise(1, 1e-6, 0.01).unwrap();
        assert_eq!(degenerate_pair.floor, 0);
    }

    #[test]
    fn cascade_reference_points() {
        let a = cascade_bound(100, FRAC_1_SQRT_2, 2.74e6).unwrap();
        assert!(a.complement() < 5e-14);
        // mpmath at 60 digits: 4.48530101945851e-14
        assert!((a.complement() / 4.485_301_019_458_5e-14 - 1.0).abs() < 1e-9);
        let b = cascade_bound(100, FRAC_1_SQRT_2, 7e16).unwrap();
        assert!(b.complement() < 5e-9);
        assert!((b.complement() / 1.935_668_466_863_1e-9 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cascade_near_n_is_layer_dominated() {
        let b = cascade_bound(100, FRAC_1_SQRT_2, 101.0).unwrap();
        let r_pow_n = 2f64.powi(-50);
        assert!(b.complement() >= r_pow_n);
        assert!(b.complement() < 60.0 * r_pow_n);
        assert!(cascade_bound(100, FRAC_1_SQRT_2, 100.0).is_err());
    }

    #[test]
    fn cascade_vacuous_when_factorial_term_dominates() {
        let b = cascade_bound(100, FRAC_1_SQRT_2, 1e18).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.probability_lower_bound, 0.0);
    }
}
