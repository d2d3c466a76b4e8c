//! Limit constants and the random variables behind them.
//!
//! `Y_d` is the coupon-collector time for `d+1` equally likely coupons, a
//! sum of independent geometric variables with success probabilities
//! `i/(d+1)`. It is the length of a full block of a uniform code, so its
//! mean `mu_d = (d+1) H(d+1)` and variance `sigma_d^2` govern the number
//! of shortcut hops along a branch. The depth of the branching tree is
//! controlled by `f_d` and its root `c~_d`; the diameter and flooding
//! constants come from maximising `alpha * beta` on the zero set of
//! `g(alpha, beta) = 1 + f_d(alpha c~) - alpha beta (c~ / mu) I_d(mu / beta)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng as _;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::QSchedule;
use crate::rng::Rng;

fn check_dim(d: u32) -> Result<()> {
    if d < 1 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok(())
}

/// `H(n) = 1 + 1/2 + ... + 1/n`, exactly.
pub fn harmonic_exact(n: u32) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, i| {
        acc + BigRational::new(BigInt::one(), BigInt::from(i))
    })
}

/// `mu_d = (d+1) H(d+1)`, exactly.
pub fn mu_exact(d: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(d + 1)) * harmonic_exact(d + 1)
}

/// `sigma_d^2 = sum_i (1 - p_i) / p_i^2` with `p_i = i/(d+1)`, exactly.
pub fn sigma2_exact(d: u32) -> BigRational {
    let m = d as i64 + 1;
    (1..=m).fold(BigRational::zero(), |acc, i| {
        acc + BigRational::new(BigInt::from(m * (m - i)), BigInt::from(i * i))
    })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

pub fn mu(d: u32) -> f64 {
    to_f64(&mu_exact(d))
}

pub fn sigma2(d: u32) -> f64 {
    to_f64(&sigma2_exact(d))
}

/// Law of `Y_d` on `0..=t_max`.
#[derive(Clone, Debug, Serialize)]
pub struct CouponLaw {
    pub d: u32,
    /// `pmf[t] = P(Y_d = t)`.
    pub pmf: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
    /// Probability still held by unfinished collections after `t_max`
    /// draws, as carried by the recursion.
    pub residual: f64,
}

impl CouponLaw {
    pub fn t_max(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn prob(&self, t: usize) -> f64 {
        self.pmf.get(t).copied().unwrap_or(0.0)
    }

    pub fn mass(&self) -> f64 {
        self.pmf.iter().sum()
    }

    /// Union bound `P(Y_d > t_max) <= (d+1) (d/(d+1))^t_max`.
    pub fn tail_bound(&self) -> f64 {
        let k = self.d as f64 + 1.0;
        k * (self.d as f64 / k).powi(self.t_max() as i32)
    }

    /// Law of `min(Y_d, k)`.
    pub fn truncated(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; k + 1];
        let mut below = 0.0;
        for (t, slot) in out.iter_mut().enumerate().take(k) {
            *slot = self.prob(t);
            below += *slot;
        }
        out[k] = 1.0 - below;
        out
    }
}

/// Distribution of `Y_d` by forward recursion on the number of distinct
/// coupons seen: from state `j` a draw is new with probability
/// `(d+1-j)/(d+1)`.
pub fn coupon_pmf(d: u32, t_max: usize) -> Result<CouponLaw> {
    check_dim(d)?;
    let k = d as usize + 1;
    if t_max < k {
        return Err(Error::invalid(format!("t_max = {t_max} must be at least d+1 = {k}")));
    }
    let kf = k as f64;
    let mut state = vec![0.0f64; k + 1];
    state[0] = 1.0;
    let mut pmf = vec![0.0; t_max + 1];
    for slot in pmf.iter_mut().skip(1) {
        let mut next = vec![0.0; k + 1];
        for j in 0..k {
            let fresh = (k - j) as f64 / kf;
            next[j] += state[j] * (1.0 - fresh);
            next[j + 1] += state[j] * fresh;
        }
        *slot = next[k];
        next[k] = 0.0;
        state = next;
    }
    Ok(CouponLaw {
        d,
        pmf,
        mu: mu(d),
        sigma2: sigma2(d),
        residual: state.iter().sum(),
    })
}

/// `ln(d+1)/d)`: the moment generating function of `Y_d` is finite
/// exactly for `lambda` below this.
pub fn mgf_boundary(d: u32) -> f64 {
    ((d as f64 + 1.0) / d as f64).ln()
}

fn check_lambda(d: u32, lambda: f64) -> Result<()> {
    check_dim(d)?;
    if lambda.is_nan() || lambda >= mgf_boundary(d) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} is not below ln((d+1)/d) = {}",
            mgf_boundary(d)
        )));
    }
    Ok(())
}

/// `ln E[exp(lambda Y_d)] = ln d! - d ln(d+1) + (d+1) lambda
///  - sum_{i=1..d} ln(1 - i e^lambda / (d+1))`.
pub fn log_mgf(d: u32, lambda: f64) -> Result<f64> {
    check_lambda(d, lambda)?;
    let k = d as f64 + 1.0;
    let ln_fact: f64 = (2..=d).map(|i| (i as f64).ln()).sum();
    let e = lambda.exp();
    let tail: f64 = (1..=d).map(|i| (-(i as f64) * e / k).ln_1p()).sum();
    Ok(ln_fact - d as f64 * k.ln() + k * lambda - tail)
}

/// First and second derivatives of [`log_mgf`] in `lambda`.
pub fn log_mgf_derivatives(d: u32, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(d, lambda)?;
    let k = d as f64 + 1.0;
    let e = lambda.exp();
    let (mut first, mut second) = (k, 0.0);
    for i in 1..=d {
        let r = i as f64 * e / k;
        first += r / (1.0 - r);
        second += r / ((1.0 - r) * (1.0 - r));
    }
    Ok((first, second))
}

/// `lambda*(x)`: the solution of `d/dlambda log_mgf = x`, by Newton steps
/// safeguarded with a shrinking bracket. `x` must exceed `d+1`.
pub fn lambda_star(d: u32, x: f64) -> Result<f64> {
    check_dim(d)?;
    let k = d as f64 + 1.0;
    if !(x > k && x.is_finite()) {
        return Err(Error::Domain(format!(
            "x = {x} outside the range (d+1, inf) of the mean map"
        )));
    }
    let mean_map = |l: f64| log_mgf_derivatives(d, l).map(|(m, _)| m);
    let boundary = mgf_boundary(d);
    let (mut lo, mut hi);
    if x >= mu(d) {
        lo = 0.0;
        hi = boundary;
    } else {
        hi = 0.0;
        lo = -1.0;
        while mean_map(lo)? > x {
            hi = lo;
            lo *= 2.0;
            if lo < -1.0e4 {
                return Err(Error::Domain(format!("x = {x} too close to d+1")));
            }
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (m, s) = log_mgf_derivatives(d, lambda)?;
        if m > x {
            hi = lambda;
        } else {
            lo = lambda;
        }
        let newton = lambda - (m - x) / s;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - lambda).abs() <= 1e-15 * (1.0 + lambda.abs()) || hi - lo <= 1e-16 {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}

/// Large-deviation rate function `I_d(x) = lambda* x - log_mgf(lambda*)`.
pub fn rate_function(d: u32, x: f64) -> Result<f64> {
    let l = lambda_star(d, x)?;
    Ok(l * x - log_mgf(d, l)?)
}

/// `I_d'(x)`, equal to `lambda*(x)` by the envelope property of the
/// Legendre transform.
pub fn rate_derivative(d: u32, x: f64) -> Result<f64> {
    lambda_star(d, x)
}

/// `f_d(c) = c - (d+1)/d - c ln(d c / (d+1))`, the exponent of
/// `P(G_m > c ln m)`.
pub fn f_d(d: u32, c: f64) -> f64 {
    let r = (d as f64 + 1.0) / d as f64;
    c - r - c * (c / r).ln()
}

/// Root of `f_d(c) = -1` above `(d+1)/d`, by bisection to `1e-10`.
pub fn c_tilde(d: u32) -> f64 {
    let r = (d as f64 + 1.0) / d as f64;
    bisect(|c| f_d(d, c) + 1.0, r + 1e-9, 20.0, 1e-12)
}

/// Root of a function that is positive at `lo` and negative at `hi`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    debug_assert!(f(lo) >= 0.0 && f(hi) <= 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Constants of one dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoryBundle {
    pub d: u32,
    pub mu: f64,
    pub sigma2: f64,
    pub c_tilde: f64,
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    pub diam_const: f64,
    pub flood_const: f64,
    pub hop_mean_coeff: f64,
    pub hop_var_coeff: f64,
}

/// The constraint of the diameter problem, with `I_d` evaluated through
/// the supplied value of `I_d(mu/beta)`.
fn constraint(d: u32, c: f64, mu: f64, alpha: f64, beta: f64, rate: f64) -> f64 {
    1.0 + f_d(d, alpha * c) - alpha * beta * c / mu * rate
}

/// `g(alpha, beta)`.
pub fn diameter_constraint(d: u32, alpha: f64, beta: f64) -> Result<f64> {
    let (c, m) = (c_tilde(d), mu(d));
    Ok(constraint(d, c, m, alpha, beta, rate_function(d, m / beta)?))
}

struct DiameterProblem {
    d: u32,
    c: f64,
    mu: f64,
}

impl DiameterProblem {
    fn rate(&self, beta: f64) -> Result<(f64, f64)> {
        let x = self.mu / beta;
        if beta <= 1.0 {
            return Ok((0.0, 0.0));
        }
        let l = lambda_star(self.d, x)?;
        Ok((l * x - log_mgf(self.d, l)?, l))
    }

    /// Largest `alpha` in `(0, 1]` with `g(alpha, beta) = 0`, if any.
    ///
    /// For fixed `beta`, `g` rises until `alpha c = (d+1)/d exp(-beta I / mu)`
    /// and decreases afterwards, with `g(1, beta) <= 0`; the wanted root
    /// lies on the decreasing branch.
    fn alpha_of(&self, beta: f64) -> Result<Option<f64>> {
        let (rate, _) = self.rate(beta)?;
        let d = self.d;
        let r = (d as f64 + 1.0) / d as f64;
        let peak = (r / self.c * (-beta * rate / self.mu).exp()).min(1.0);
        let g = |a: f64| constraint(d, self.c, self.mu, a, beta, rate);
        if g(peak) < 0.0 {
            return Ok(None);
        }
        if g(1.0) >= 0.0 {
            return Ok(Some(1.0));
        }
        Ok(Some(bisect(g, peak, 1.0, 1e-15)))
    }

    /// Derivative of `beta * alpha(beta)` along the constraint, from the
    /// implicit function theorem.
    fn objective_slope(&self, beta: f64) -> Result<Option<f64>> {
        let Some(alpha) = self.alpha_of(beta)? else {
            return Ok(None);
        };
        let (rate, lam) = self.rate(beta)?;
        let r = (self.d as f64 + 1.0) / self.d as f64;
        let (c, mu) = (self.c, self.mu);
        let g_alpha = -c * (alpha * c / r).ln() - c * beta * rate / mu;
        let g_beta = -alpha * c * (rate / mu - lam / beta);
        Ok(Some(alpha - beta * g_beta / g_alpha))
    }
}

/// Solves the diameter optimisation and fills every constant of `d`.
///
/// `beta` is scanned on a grid over `[1, mu/(d+1))`; for each `beta` the
/// constraint is solved for `alpha` by bisection. The best grid cell is
/// then refined by bisection on the derivative of `alpha(beta) beta`.
pub fn solve_diameter(d: u32) -> Result<TheoryBundle> {
    check_dim(d)?;
    let (m, s2) = (mu(d), sigma2(d));
    let c = c_tilde(d);
    let problem = DiameterProblem { d, c, mu: m };
    let beta_max = m / (d as f64 + 1.0) * (1.0 - 1e-9);
    const GRID: usize = 400;
    let mut best: Option<(f64, usize)> = None;
    let betas: Vec<f64> = (0..=GRID)
        .map(|i| 1.0 + (beta_max - 1.0) * i as f64 / GRID as f64)
        .collect();
    for (i, &beta) in betas.iter().enumerate() {
        if let Some(alpha) = problem.alpha_of(beta)? {
            let value = alpha * beta;
            if best.is_none_or(|(v, _)| value > v) {
                best = Some((value, i));
            }
        }
    }
    let (_, i) = best.ok_or_else(|| Error::Internal("diameter constraint infeasible".into()))?;
    let lo = betas[i.saturating_sub(1)];
    let hi = betas[(i + 1).min(GRID)];
    let slope = |b: f64| problem.objective_slope(b).map(|s| s.unwrap_or(f64::NEG_INFINITY));
    let beta = if slope(lo)? > 0.0 && slope(hi)? < 0.0 {
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-14 {
            let mid = 0.5 * (a + b);
            if slope(mid)? > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    } else {
        betas[i]
    };
    let alpha = problem
        .alpha_of(beta)?
        .ok_or_else(|| Error::Internal("lost feasibility while refining".into()))?;
    let r = (d as f64 + 1.0) / d as f64;
    let (mean_coeff, var_coeff) = hop_clt_constants(d);
    Ok(TheoryBundle {
        d,
        mu: m,
        sigma2: s2,
        c_tilde: c,
        alpha_tilde: alpha,
        beta_tilde: beta,
        diam_const: 2.0 * alpha * beta * c / m,
        flood_const: (r + alpha * beta * c) / m,
        hop_mean_coeff: mean_coeff,
        hop_var_coeff: var_coeff,
    })
}

/// Residuals of the two first-order conditions at a solution:
/// `alpha - (d+1)/(d c) exp(-I'(mu/beta))` and
/// `(beta/mu) I(mu/beta) - (1 + f(alpha c)) / (alpha c)`.
pub fn stationarity_residuals(b: &TheoryBundle) -> Result<(f64, f64)> {
    let d = b.d;
    let r = (d as f64 + 1.0) / d as f64;
    let x = b.mu / b.beta_tilde;
    let first = b.alpha_tilde - r / b.c_tilde * (-rate_derivative(d, x)?).exp();
    let ac = b.alpha_tilde * b.c_tilde;
    let second = b.beta_tilde / b.mu * rate_function(d, x)? - (1.0 + f_d(d, ac)) / ac;
    Ok((first, second))
}

/// Centering and variance coefficients of the hopcount CLT, per `ln n`:
/// `(2/mu)(d+1)/d` and `2 (sigma^2 + mu)/mu^3 (d+1)/d`.
pub fn hop_clt_constants(d: u32) -> (f64, f64) {
    let two = BigRational::from_integer(BigInt::from(2));
    let r = BigRational::new(BigInt::from(d + 1), BigInt::from(d));
    let m = mu_exact(d);
    let s2 = sigma2_exact(d);
    let mean = &two / &m * &r;
    let var = &two * (s2 + &m) / (&m * &m * &m) * &r;
    (to_f64(&mean), to_f64(&var))
}

/// Centering and variance of the EAN hopcount after `n` steps:
/// `(2/mu) sum q_i` and `2 (sigma^2 + mu)/mu^3 sum q_i (1 - q_i)`.
pub fn ean_hop_clt(d: u32, schedule: &QSchedule, n: u64) -> Result<(f64, f64)> {
    check_dim(d)?;
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in 1..=n {
        let q = schedule.q(i)?;
        s1 += q;
        s2 += q * (1.0 - q);
    }
    let (m, v) = (mu(d), sigma2(d));
    Ok((2.0 / m * s1, 2.0 * (v + m) / (m * m * m) * s2))
}

/// Mean generation of a uniform active clique of an evolving network:
/// `sum (d+1) q_i / (1 + d q_i)`. A split leaves `d+1` active children, so
/// a uniformly chosen lineage has split at step `i` with this probability
/// rather than `q_i`.
pub fn ean_clique_generation(d: u32, schedule: &QSchedule, n: u64) -> Result<f64> {
    check_dim(d)?;
    let k = d as f64 + 1.0;
    let mut sum = 0.0;
    for i in 1..=n {
        let q = schedule.q(i)?;
        sum += k * q / (1.0 + d as f64 * q);
    }
    Ok(sum)
}

/// `E[G_m] = sum_{i=1..m} (d+1)/(d i + 1)` and its variance.
pub fn gm_moments(d: u32, m: u64) -> (f64, f64) {
    let (mut mean, mut var) = (0.0, 0.0);
    for i in 1..=m {
        let p = (d as f64 + 1.0) / (d as f64 * i as f64 + 1.0);
        mean += p;
        var += p * (1.0 - p);
    }
    (mean, var)
}

/// Generation of the `m`-th splitting individual: a sum of independent
/// Bernoulli variables with `P(1_i = 1) = (d+1)/(d i + 1)`.
pub fn sample_gm(d: u32, m: u64, rng: &mut Rng) -> u64 {
    (1..=m)
        .filter(|&i| {
            let p = (d as f64 + 1.0) / (d as f64 * i as f64 + 1.0);
            rng.gen::<f64>() < p
        })
        .count() as u64
}

/// EAN analogue of [`sample_gm`]: a sum of Bernoulli(`q_i`), `i = 1..n`.
pub fn sample_gm_ean(schedule: &QSchedule, n: u64, rng: &mut Rng) -> Result<u64> {
    let mut total = 0;
    for i in 1..=n {
        if rng.gen::<f64>() < schedule.q(i)? {
            total += 1;
        }
    }
    Ok(total)
}

/// Sampler of `Y_d` as a sum of geometric variables on `{1, 2, ...}`.
pub struct CouponSampler {
    stages: Vec<Option<Geometric>>,
}

impl CouponSampler {
    pub fn new(d: u32) -> Result<Self> {
        check_dim(d)?;
        let k = d as f64 + 1.0;
        let stages = (1..=d + 1)
            .map(|i| {
                if i == d + 1 {
                    Ok(None)
                } else {
                    Geometric::new(i as f64 / k)
                        .map(Some)
                        .map_err(|e| Error::Internal(e.to_string()))
                }
            })
            .collect::<Result<_>>()?;
        Ok(CouponSampler { stages })
    }

    pub fn sample(&self, rng: &mut Rng) -> u64 {
        // rand_distr's geometric variable counts failures.
        self.stages
            .iter()
            .map(|g| 1 + g.as_ref().map_or(0, |g| g.sample(rng)))
            .sum()
    }
}

/// `H_k`: the number of i.i.d. copies of `Y_d` whose partial sums stay
/// within `k`.
pub fn renewal_hk(sampler: &CouponSampler, k: u64, rng: &mut Rng) -> u64 {
    let (mut total, mut count) = (0u64, 0u64);
    loop {
        total += sampler.sample(rng);
        if total > k {
            return count;
        }
        count += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn exact_moments() {
        assert_eq!(mu(2), 5.5);
        assert_eq!(sigma2(2), 6.75);
        assert_eq!(mu_exact(3), BigRational::new(BigInt::from(25), BigInt::from(3)));
        // Direct sum of (1-p)/p^2 in floating point.
        for d in 1..8u32 {
            let k = d as f64 + 1.0;
            let direct: f64 = (1..=d + 1)
                .map(|i| {
                    let p = i as f64 / k;
                    (1.0 - p) / (p * p)
                })
                .sum();
            assert!((sigma2(d) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn coupon_law_examples() {
        let law = coupon_pmf(2, 400).unwrap();
        assert!((law.prob(3) - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(law.prob(0), 0.0);
        assert_eq!(law.prob(2), 0.0);
        for d in 2..6u32 {
            let law = coupon_pmf(d, 600).unwrap();
            let fact: f64 = (1..=d + 1).map(|i| i as f64).product();
            let k = d as f64 + 1.0;
            assert!((law.prob(d as usize + 1) - fact / k.powi(d as i32 + 1)).abs() < 1e-14);
            assert!((law.mass() + law.tail_bound() - 1.0).abs() < 1e-12);
            assert!(law.residual <= law.tail_bound() + 1e-14);
            let mean: f64 = law.pmf.iter().enumerate().map(|(t, p)| t as f64 * p).sum();
            let second: f64 = law.pmf.iter().enumerate().map(|(t, p)| (t * t) as f64 * p).sum();
            assert!((mean - law.mu).abs() < 1e-10);
            assert!((second - mean * mean - law.sigma2).abs() < 1e-8);
        }
        assert!(coupon_pmf(2, 2).is_err());
    }

    #[test]
    fn log_mgf_against_pmf() {
        assert!(log_mgf(2, 0.0).unwrap().abs() < 1e-15);
        let law = coupon_pmf(2, 500).unwrap();
        for lambda in [-2.0, -0.3, 0.1, 0.25] {
            let direct: f64 = law
                .pmf
                .iter()
                .enumerate()
                .map(|(t, p)| (lambda * t as f64).exp() * p)
                .sum::<f64>()
                .ln();
            assert!((log_mgf(2, lambda).unwrap() - direct).abs() < 1e-8, "{lambda}");
        }
        assert!(log_mgf(2, mgf_boundary(2)).is_err());
        assert!(log_mgf(2, 1.0).is_err());
    }

    #[test]
    fn log_mgf_derivatives_at_zero() {
        for d in 2..6u32 {
            let h = 1e-5;
            let f = |l| log_mgf(d, l).unwrap();
            let first = (f(h) - f(-h)) / (2.0 * h);
            let second = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            assert!((first - mu(d)).abs() < 1e-6, "d={d}: {first}");
            assert!((second - sigma2(d)).abs() < 1e-4 * sigma2(d).max(1.0), "d={d}: {second}");
            let (m1, m2) = log_mgf_derivatives(d, 0.0).unwrap();
            assert!((m1 - mu(d)).abs() < 1e-12 && (m2 - sigma2(d)).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_function_basics() {
        for d in 2..6u32 {
            let m = mu(d);
            assert!(rate_function(d, m).unwrap().abs() < 1e-12);
            assert!(lambda_star(d, m).unwrap().abs() < 1e-12);
            let xs: Vec<f64> = (1..40).map(|i| d as f64 + 1.0 + 0.25 * i as f64).collect();
            let is: Vec<f64> = xs.iter().map(|&x| rate_function(d, x).unwrap()).collect();
            for (x, i) in xs.iter().zip(&is) {
                if (x - m).abs() > 1e-6 {
                    assert!(*i > 0.0);
                }
            }
            for w in is.windows(3) {
                assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12, "convexity");
            }
        }
        assert!(rate_function(2, 3.0).is_err());
        assert!(rate_function(2, 2.5).is_err());
    }

    #[test]
    fn rate_derivative_matches_finite_difference() {
        for d in 2..5u32 {
            for x in [d as f64 + 1.5, mu(d) * 0.8, mu(d) * 1.7] {
                let h = 1e-5;
                let fd = (rate_function(d, x + h).unwrap() - rate_function(d, x - h).unwrap())
                    / (2.0 * h);
                assert!((fd - rate_derivative(d, x).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn depth_constant() {
        for d in 2..8u32 {
            let r = (d as f64 + 1.0) / d as f64;
            assert!(f_d(d, r).abs() < 1e-15);
            let c = c_tilde(d);
            assert!(c > r);
            assert!((f_d(d, c) + 1.0).abs() < 1e-9);
        }
        assert!((c_tilde(2) - 3.54).abs() < 0.01);
    }

    #[test]
    fn hop_coefficients() {
        let (m, v) = hop_clt_constants(2);
        assert!((m - 6.0 / 11.0).abs() < 1e-15);
        let want = 2.0 * (6.75 + 5.5) / 5.5f64.powi(3) * 1.5;
        assert!((v - want).abs() < 1e-15);
        assert!((v - 0.2209).abs() < 1e-4);
        let tail: Vec<f64> = [2, 10, 100, 1000].iter().map(|&d| hop_clt_constants(d).0).collect();
        assert!(tail.windows(2).all(|w| w[1] < w[0]));
        assert!(tail[3] < 0.01);
    }

    #[test]
    fn ean_centering() {
        let (center, var) = ean_hop_clt(2, &QSchedule::Constant { q: 1.0 }, 50).unwrap();
        assert!((center - 2.0 / 5.5 * 50.0).abs() < 1e-12);
        assert_eq!(var, 0.0);
        let (center, _) = ean_hop_clt(2, &QSchedule::Constant { q: 0.2 }, 30).unwrap();
        assert!((center - 2.0 / 5.5 * 0.2 * 30.0).abs() < 1e-12);
        let h: f64 = (1..=10_000).map(|i| 1.0 / i as f64).sum();
        let (center, _) = ean_hop_clt(2, &QSchedule::Harmonic { c: 0.5 }, 10_000).unwrap();
        assert!((center - 2.0 / 5.5 * h / 2.0).abs() < 1e-12);
    }

    #[test]
    fn generation_samples() {
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            assert_eq!(sample_gm(2, 1, &mut rng), 1);
        }
        let (mean, _) = gm_moments(2, 10);
        let want: f64 = (1..=10).map(|i| 3.0 / (2.0 * i as f64 + 1.0)).sum();
        assert!((mean - want).abs() < 1e-15);
        let s = QSchedule::Constant { q: 1.0 };
        assert_eq!(sample_gm_ean(&s, 17, &mut rng).unwrap(), 17);
    }

    #[test]
    fn renewal_small_k() {
        let sampler = CouponSampler::new(2).unwrap();
        let mut rng = rng_from_seed(2);
        for k in 0..=2 {
            for _ in 0..50 {
                assert_eq!(renewal_hk(&sampler, k, &mut rng), 0);
            }
        }
        for _ in 0..1000 {
            assert!(sampler.sample(&mut rng) >= 3);
        }
    }
}
