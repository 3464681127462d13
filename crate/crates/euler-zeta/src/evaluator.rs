//! Numerical evaluation of Z_E, its Dirichlet-series form, the series-defined
//! logarithm, and the normalized function f_sigma, with certified truncation
//! tails.
//!
//! The logarithm is DEFINED by the prime-power Dirichlet expansion
//! sum_p sum_r sum_{l,k} (1/r) alpha_{lk}(p)^r p^{-r<c_l,s>}, not by the
//! principal branch of log(eval_product). The value-distribution
//! inequalities in `approx_analyzer` depend on this branch.

use crate::error::{Error, Result};
use crate::number_kernel::{dirichlet_coefficients, spec_primes};
use crate::parallel::map_blocks;
use crate::spec_model::{EulerProductSpec, TruncationBounds};
use num::complex::Complex64;

/// Evaluation point s = sigma + i t in C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint {
    pub sigma: Vec<f64>,
    pub t: Vec<f64>,
}

impl EvalPoint {
    pub fn new(sigma: Vec<f64>, t: Vec<f64>) -> Self {
        EvalPoint { sigma, t }
    }

    pub fn real(sigma: Vec<f64>) -> Self {
        let t = vec![0.0; sigma.len()];
        EvalPoint { sigma, t }
    }
}

/// Primes per parallel block; fixed so results do not depend on thread count.
const BLOCK: usize = 4096;

/// Checks the convergence-domain invariant for sigma.
///
/// Specs with any infinite-support rule need min_l <c_l, sigma> > 1.
/// Fully finite-support specs only need every supported factor to satisfy
/// |alpha_{lk}(p) p^{-<c_l, sigma>}| < 1.
pub fn check_point(spec: &EulerProductSpec, sigma: &[f64]) -> Result<()> {
    if sigma.len() != spec.dimension {
        return Err(Error::Domain(format!(
            "sigma has {} entries, spec dimension is {}",
            sigma.len(),
            spec.dimension
        )));
    }
    match spec.finite_support() {
        None => {
            let v = spec.min_direction_dot(sigma);
            if v > 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "min_l <c_l, sigma> = {v} must exceed 1 for infinite-support specs"
                )))
            }
        }
        Some(_) => {
            for (l, row) in spec.rules.iter().enumerate() {
                let dot = spec.directions[l].dot(sigma);
                for rule in row {
                    let Some(support) = rule.finite_support() else {
                        continue;
                    };
                    for p in support {
                        let idx = crate::number_kernel::prime_index(p).unwrap_or(1);
                        let mag = rule.value_at(p, idx).to_complex64().norm();
                        let factor = mag * (-(dot) * (p as f64).ln()).exp();
                        if factor >= 1.0 {
                            return Err(Error::Domain(format!(
                                "factor magnitude |alpha({p}) p^-<c,sigma>| = {factor} >= 1 at rank {}",
                                l + 1
                            )));
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

/// Cached per-prime data for repeated evaluations of one spec.
pub(crate) struct Prepared<'a> {
    pub spec: &'a EulerProductSpec,
    /// (prime, 1-based index), ascending.
    pub primes: Vec<(u64, usize)>,
    pub ln_p: Vec<f64>,
    /// alphas[l][k * n_primes + i] = alpha_{(l+1)(k+1)}(p_i).
    pub alphas: Vec<Vec<Complex64>>,
}

impl<'a> Prepared<'a> {
    pub fn new(spec: &'a EulerProductSpec, prime_cutoff: u64) -> Self {
        let mut primes = spec_primes(spec, prime_cutoff);
        // primes with all-zero coefficients contribute exact-identity
        // factors; dropping them leaves every result bit-identical
        primes.retain(|&(p, idx)| {
            spec.rules
                .iter()
                .flatten()
                .any(|rule| !rule.value_at(p, idx).is_zero())
        });
        let ln_p: Vec<f64> = primes.iter().map(|&(p, _)| (p as f64).ln()).collect();
        let n = primes.len();
        let mut alphas = Vec::with_capacity(spec.phi);
        for row in &spec.rules {
            let mut rank_values = vec![Complex64::new(0.0, 0.0); spec.eta * n];
            for (k, rule) in row.iter().enumerate() {
                for (i, &(p, idx)) in primes.iter().enumerate() {
                    rank_values[k * n + i] = rule.value_at(p, idx).to_complex64();
                }
            }
            alphas.push(rank_values);
        }
        Prepared {
            spec,
            primes,
            ln_p,
            alphas,
        }
    }

    /// <c_l, sigma> + i <c_l, t> for each rank.
    pub fn dots(&self, point: &EvalPoint) -> Vec<Complex64> {
        self.spec
            .directions
            .iter()
            .map(|c| Complex64::new(c.dot(&point.sigma), c.dot(&point.t)))
            .collect()
    }

    /// Product over one block of primes of prod_{l,k} (1 - alpha w_l),
    /// factors in ascending-prime then (l,k) lexicographic order.
    fn block_denominator(&self, block: usize, dots: &[Complex64]) -> Result<Complex64> {
        let n = self.primes.len();
        let lo = block * BLOCK;
        let hi = ((block + 1) * BLOCK).min(n);
        let mut denom = Complex64::new(1.0, 0.0);
        for i in lo..hi {
            for (l, dot) in dots.iter().enumerate() {
                let w = (-dot * self.ln_p[i]).exp();
                for k in 0..self.spec.eta {
                    let alpha = self.alphas[l][k * n + i];
                    let factor = Complex64::new(1.0, 0.0) - alpha * w;
                    if factor.re == 0.0 && factor.im == 0.0 {
                        return Err(Error::Domain(format!(
                            "singular factor at p = {}, rank {}, k = {}",
                            self.primes[i].0,
                            l + 1,
                            k + 1
                        )));
                    }
                    denom *= factor;
                }
            }
        }
        Ok(denom)
    }

    pub fn product_at(&self, point: &EvalPoint) -> Result<Complex64> {
        let dots = self.dots(point);
        let n_blocks = self.primes.len().div_ceil(BLOCK);
        let partials = map_blocks(n_blocks, |b| self.block_denominator(b, &dots));
        let mut denom = Complex64::new(1.0, 0.0);
        for partial in partials {
            denom *= partial?;
        }
        Ok(denom.inv())
    }

    /// One block of the log expansion: sum over p in block, r <= R ascending,
    /// then (l,k), of (1/r) alpha^r w_l^r.
    fn block_log(&self, block: usize, dots: &[Complex64], r_max: u32) -> Complex64 {
        let n = self.primes.len();
        let lo = block * BLOCK;
        let hi = ((block + 1) * BLOCK).min(n);
        let eta = self.spec.eta;
        let phi = self.spec.phi;
        let mut total = Complex64::new(0.0, 0.0);
        let mut w = vec![Complex64::new(0.0, 0.0); phi];
        let mut wr = vec![Complex64::new(0.0, 0.0); phi];
        let mut apow = vec![Complex64::new(0.0, 0.0); phi * eta];
        for i in lo..hi {
            for l in 0..phi {
                w[l] = (-dots[l] * self.ln_p[i]).exp();
                wr[l] = Complex64::new(1.0, 0.0);
                for k in 0..eta {
                    apow[l * eta + k] = Complex64::new(1.0, 0.0);
                }
            }
            for r in 1..=r_max {
                let mut term = Complex64::new(0.0, 0.0);
                let mut live = false;
                for l in 0..phi {
                    wr[l] *= w[l];
                    if wr[l].re == 0.0 && wr[l].im == 0.0 {
                        continue;
                    }
                    live = true;
                    let mut alpha_sum = Complex64::new(0.0, 0.0);
                    for k in 0..eta {
                        apow[l * eta + k] *= self.alphas[l][k * n + i];
                        alpha_sum += apow[l * eta + k];
                    }
                    term += alpha_sum * wr[l];
                }
                if !live {
                    // every w_l^r underflowed to exactly 0; the remaining
                    // terms are exact zeros
                    break;
                }
                total += term / r as f64;
            }
        }
        total
    }

    pub fn log_at(&self, point: &EvalPoint, r_max: u32) -> Complex64 {
        let dots = self.dots(point);
        let n_blocks = self.primes.len().div_ceil(BLOCK);
        let partials = map_blocks(n_blocks, |b| self.block_log(b, &dots, r_max));
        let mut total = Complex64::new(0.0, 0.0);
        for partial in partials {
            total += partial;
        }
        total
    }
}

/// Reusable evaluator caching the sieved primes and per-prime coefficient
/// values of one spec; the free functions below prepare one per call.
pub struct SpecEvaluator<'a> {
    prepared: Prepared<'a>,
    power_cutoff: u32,
}

impl<'a> SpecEvaluator<'a> {
    pub fn new(spec: &'a EulerProductSpec, bounds: &TruncationBounds) -> Self {
        SpecEvaluator {
            prepared: Prepared::new(spec, bounds.prime_cutoff),
            power_cutoff: bounds.power_cutoff,
        }
    }

    pub fn product(&self, point: &EvalPoint) -> Result<Complex64> {
        check_point(self.prepared.spec, &point.sigma)?;
        self.prepared.product_at(point)
    }

    pub fn log(&self, point: &EvalPoint) -> Result<Complex64> {
        check_point(self.prepared.spec, &point.sigma)?;
        Ok(self.prepared.log_at(point, self.power_cutoff))
    }

    pub fn normalized_cf(&self, sigma: &[f64], t: &[f64]) -> Result<Complex64> {
        let num = self.product(&EvalPoint::new(sigma.to_vec(), t.to_vec()))?;
        let den = self.product(&EvalPoint::real(sigma.to_vec()))?;
        Ok(num / den)
    }
}

/// Truncated Euler product at s = sigma + i t:
/// prod_{p <= P} prod_{l,k} (1 - alpha_{lk}(p) p^{-<c_l,s>})^{-1}.
pub fn eval_product(
    spec: &EulerProductSpec,
    point: &EvalPoint,
    bounds: &TruncationBounds,
) -> Result<Complex64> {
    check_point(spec, &point.sigma)?;
    Prepared::new(spec, bounds.prime_cutoff).product_at(point)
}

/// Series-defined logarithm truncated at p <= P, r <= R.
pub fn eval_log(
    spec: &EulerProductSpec,
    point: &EvalPoint,
    bounds: &TruncationBounds,
) -> Result<Complex64> {
    check_point(spec, &point.sigma)?;
    Ok(Prepared::new(spec, bounds.prime_cutoff).log_at(point, bounds.power_cutoff))
}

/// Dirichlet-series form prod_l sum_{n <= N} a_l(n) n^{-<c_l,s>}.
/// Requires min_l <c_l, sigma> > 1 (the series needs absolute convergence).
pub fn eval_series(
    spec: &EulerProductSpec,
    point: &EvalPoint,
    n_max: u64,
) -> Result<Complex64> {
    check_point(spec, &point.sigma)?;
    let v = spec.min_direction_dot(&point.sigma);
    if v <= 1.0 {
        return Err(Error::Domain(format!(
            "series evaluation needs min_l <c_l, sigma> > 1, got {v}"
        )));
    }
    let mut product = Complex64::new(1.0, 0.0);
    for l in 1..=spec.phi {
        let table = dirichlet_coefficients(spec, l, n_max)?;
        let dot = Complex64::new(
            spec.directions[l - 1].dot(&point.sigma),
            spec.directions[l - 1].dot(&point.t),
        );
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 1..=n_max {
            let a = table.get_complex(n);
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            sum += a * (-dot * (n as f64).ln()).exp();
        }
        product *= sum;
    }
    Ok(product)
}

/// Normalized function f_sigma(t) = Z_E(sigma + i t) / Z_E(sigma).
pub fn normalized_cf(
    spec: &EulerProductSpec,
    sigma: &[f64],
    t: &[f64],
    bounds: &TruncationBounds,
) -> Result<Complex64> {
    check_point(spec, sigma)?;
    let prepared = Prepared::new(spec, bounds.prime_cutoff);
    let num = prepared.product_at(&EvalPoint::new(sigma.to_vec(), t.to_vec()))?;
    let den = prepared.product_at(&EvalPoint::real(sigma.to_vec()))?;
    Ok(num / den)
}

/// Rigorous upper bound on |log Z_E(truncated) - log Z_E| at sigma.
///
/// Infinite-support specs: phi*eta * [2 P^{1-v}/(v-1)] for the primes
/// beyond P, plus the per-factor geometric r-tail
/// sum x^{R+1} / ((R+1)(1-x)) with x = p^{-<c_l,sigma>} over included
/// factors. Fully finite-support specs have the r-tail only.
pub fn truncation_tail_bound(
    spec: &EulerProductSpec,
    sigma: &[f64],
    bounds: &TruncationBounds,
) -> Result<f64> {
    check_point(spec, sigma)?;
    let r_next = (bounds.power_cutoff + 1) as f64;
    let mut tail = 0.0f64;
    if spec.finite_support().is_none() {
        let v = spec.min_direction_dot(sigma);
        let p = bounds.prime_cutoff as f64;
        tail += 2.0 * (spec.phi * spec.eta) as f64 * p.powf(1.0 - v) / (v - 1.0);
    }
    // r-tail over the factors actually included.
    let primes = spec_primes(spec, bounds.prime_cutoff);
    for (l, dir) in spec.directions.iter().enumerate() {
        let dot = dir.dot(sigma);
        let mut rank_sum = 0.0f64;
        for &(p, _) in &primes {
            let x = (-(dot) * (p as f64).ln()).exp();
            if x >= 1.0 {
                return Err(Error::Domain(format!(
                    "p^(-<c_{},sigma>) = {x} >= 1 inside the r-tail bound",
                    l + 1
                )));
            }
            rank_sum += x.powf(r_next) / (r_next * (1.0 - x));
        }
        tail += spec.eta as f64 * rank_sum;
    }
    Ok(tail * 1.000_000_1 + 1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_model::{builtin_spec, parse_spec};

    fn bounds(p: u64, r: u32, n: u64) -> TruncationBounds {
        TruncationBounds::new(p, r, n).unwrap()
    }

    // Partial-sum oracle: sum_{n<=1e6} n^-2 = 1.644933066848726, true value
    // within [oracle, oracle + 1e-6].
    const ZETA2_PARTIAL_1E6: f64 = 1.644933066848726;

    #[test]
    fn riemann_product_at_two() {
        let spec = builtin_spec("riemann").unwrap();
        let b = bounds(100_000, 60, 10_000);
        let z = eval_product(&spec, &EvalPoint::real(vec![2.0]), &b).unwrap();
        let tail = truncation_tail_bound(&spec, &[2.0], &b).unwrap();
        let margin = (tail.exp() - 1.0) * z.norm() + 2e-6;
        assert!(z.im.abs() < 1e-12);
        assert!(
            (z.re - ZETA2_PARTIAL_1E6).abs() <= margin,
            "zeta(2) = {} vs oracle {ZETA2_PARTIAL_1E6} (margin {margin})",
            z.re
        );
    }

    #[test]
    fn alpha_minus_one_gives_zeta4_over_zeta2() {
        // (1 + p^-s)^-1 over primes = zeta(2s)/zeta(s): 0.657974 at s=2.
        let text = r#"{
            "dimension": 1, "phi": 1, "eta": 1,
            "directions": [[1]],
            "mode": "independent",
            "rules": [[{"kind": "constant", "value": "-1"}]]
        }"#;
        let spec = parse_spec(text).unwrap();
        let z = eval_product(&spec, &EvalPoint::real(vec![2.0]), &bounds(100_000, 60, 1)).unwrap();
        assert!(
            (z.re - 0.6579736267392906).abs() < 1e-5,
            "zeta(4)/zeta(2) = {}",
            z.re
        );
    }

    #[test]
    fn zq_closed_form() {
        // Z_Q(sigma) = (1 + 2^-sigma) / (1 - 2^-4 sigma) exactly.
        let spec = builtin_spec("zq").unwrap();
        let b = bounds(1000, 300, 1);
        for sigma in [2.0, 1.0 / 3.0] {
            let z = eval_product(&spec, &EvalPoint::real(vec![sigma]), &b).unwrap();
            let x = 2f64.powf(-sigma);
            let expected = (1.0 + x) / (1.0 - x.powi(4));
            assert!(
                (z.re - expected).abs() < 1e-12 && z.im.abs() < 1e-14,
                "Z_Q({sigma}) = {z} vs {expected}"
            );
        }
    }

    #[test]
    fn zq_log_is_finite_below_one() {
        let spec = builtin_spec("zq").unwrap();
        let b = bounds(1000, 300, 1);
        let point = EvalPoint::real(vec![1.0 / 3.0]);
        let lg = eval_log(&spec, &point, &b).unwrap();
        assert!(lg.re.is_finite());
        // matches log of the closed form (real positive value, same branch)
        let z = eval_product(&spec, &point, &b).unwrap();
        assert!((lg.re - z.re.ln()).abs() < 1e-10, "{} vs {}", lg.re, z.re.ln());
    }

    #[test]
    fn exp_log_consistency_on_grid() {
        for name in ["riemann", "dedekind-qi", "zq", "dirichlet-chi4", "zeta-l2s"] {
            let spec = builtin_spec(name).unwrap();
            let b = bounds(1000, 60, 1);
            let tail = truncation_tail_bound(&spec, &[2.0], &b).unwrap();
            for t in [-7.3, -1.0, 0.0, 0.5, 12.0] {
                let point = EvalPoint::new(vec![2.0], vec![t]);
                let z = eval_product(&spec, &point, &b).unwrap();
                let lg = eval_log(&spec, &point, &b).unwrap();
                let gap = (lg.exp() - z).norm();
                assert!(
                    gap <= 2.0 * tail * z.norm() + 1e-12,
                    "{name}: |exp(log) - product| = {gap} at t = {t}"
                );
            }
        }
    }

    #[test]
    fn series_matches_product() {
        let b = bounds(100_000, 60, 10_000);
        // riemann at sigma = 2
        let spec = builtin_spec("riemann").unwrap();
        let point = EvalPoint::real(vec![2.0]);
        let zp = eval_product(&spec, &point, &b).unwrap();
        let zs = eval_series(&spec, &point, 10_000).unwrap();
        assert!((zp - zs).norm() < 2e-4, "riemann series/product gap");
        // dedekind: series equals product of riemann and chi4 series
        let dedekind = builtin_spec("dedekind-qi").unwrap();
        let zd = eval_series(&dedekind, &point, 10_000).unwrap();
        // zeta(2) * L(2) = zeta(2) * Catalan = 1.506703009922985
        assert!(
            (zd.re - 1.506703009922985).abs() < 2e-4,
            "dedekind series = {zd}"
        );
        // N = 1 gives exactly 1 for every spec
        for name in ["riemann", "dedekind-qi", "zeta-l2s"] {
            let spec = builtin_spec(name).unwrap();
            let z = eval_series(&spec, &EvalPoint::real(vec![2.0]), 1).unwrap();
            assert_eq!(z, Complex64::new(1.0, 0.0), "{name} N=1");
        }
    }

    #[test]
    fn normalized_cf_basics() {
        let spec = builtin_spec("riemann").unwrap();
        let b = bounds(10_000, 60, 1);
        let f0 = normalized_cf(&spec, &[2.0], &[0.0], &b).unwrap();
        assert!((f0 - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for t in [0.5, 1.0, 7.3] {
            let fp = normalized_cf(&spec, &[2.0], &[t], &b).unwrap();
            let fm = normalized_cf(&spec, &[2.0], &[-t], &b).unwrap();
            assert!((fp.conj() - fm).norm() < 1e-13, "hermitian symmetry at {t}");
            assert!(fp.norm() <= 1.0 + 1e-12, "|f({t})| = {} > 1", fp.norm());
        }
    }

    #[test]
    fn tail_bound_examples() {
        let spec = builtin_spec("riemann").unwrap();
        let t1 = truncation_tail_bound(&spec, &[2.0], &bounds(10_000, 40, 1)).unwrap();
        assert!(t1 < 1e-3, "riemann tail {t1}");
        let zq = builtin_spec("zq").unwrap();
        let t2 = truncation_tail_bound(&zq, &[1.0 / 3.0], &bounds(2, 200, 1)).unwrap();
        assert!(t2 < 1e-12, "zq geometric tail {t2}");
        // monotone decreasing as P doubles
        let mut last = f64::INFINITY;
        for p in [100, 1000, 10_000] {
            let t = truncation_tail_bound(&spec, &[2.0], &bounds(p, 40, 1)).unwrap();
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn domain_violations_rejected() {
        let spec = builtin_spec("riemann").unwrap();
        let b = bounds(1000, 60, 1);
        assert!(matches!(
            eval_product(&spec, &EvalPoint::real(vec![0.9]), &b),
            Err(Error::Domain(_))
        ));
        // zq below the finite-support threshold: factor magnitude >= 1 at
        // sigma = 0.
        let zq = builtin_spec("zq").unwrap();
        assert!(matches!(
            eval_product(&zq, &EvalPoint::real(vec![0.0]), &b),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn zero_freeness_at_valid_points() {
        for name in ["riemann", "dedekind-qi", "zq", "zeta3s-factored"] {
            let spec = builtin_spec(name).unwrap();
            let b = bounds(1000, 60, 1);
            for t in [0.0, 3.7, 19.3] {
                let z = eval_product(&spec, &EvalPoint::new(vec![1.5], vec![t]), &b).unwrap();
                assert!(z.norm() > 0.0, "{name} vanished at t={t}");
            }
        }
    }
}
