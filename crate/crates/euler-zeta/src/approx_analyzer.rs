//! Value-distribution machinery: characteristic-function gap inequalities,
//! the Q(t) profile, and grid searches for almost periods and shifted
//! self-approximation pairs.
//!
//! The searches replace non-constructive existence arguments with verified
//! grid witnesses: a candidate found with a cheap prescreen is accepted
//! only after re-evaluation at the caller's full truncation bounds.

use crate::error::{Error, Result};
use crate::evaluator::{
    check_point, normalized_cf, truncation_tail_bound, EvalPoint, Prepared,
};
use crate::spec_model::{EulerProductSpec, TruncationBounds};
use num::complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapKind {
    /// 4|1 - f(t1-t2)| - |f(t1) - f(t2)|^2 on the normalized function
    Plain,
    /// 4|Z(s)||Z(s) - Z(s+i(t1-t2))| - |Z(s+it1) - Z(s+it2)|^2
    Scaled,
    /// the scaled form with the series-defined log Z in place of Z
    Log,
}

impl GapKind {
    pub fn name(&self) -> &'static str {
        match self {
            GapKind::Plain => "plain",
            GapKind::Scaled => "scaled",
            GapKind::Log => "log",
        }
    }
}

/// One evaluated gap, with the evaluation tail bound recorded alongside.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub kind: GapKind,
    pub sigma: Vec<f64>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub gap: f64,
    pub tail_bound: f64,
}

pub fn gap(
    spec: &EulerProductSpec,
    kind: GapKind,
    sigma: &[f64],
    t1: &[f64],
    t2: &[f64],
    bounds: &TruncationBounds,
) -> Result<GapReport> {
    check_point(spec, sigma)?;
    let diff: Vec<f64> = t1.iter().zip(t2).map(|(a, b)| a - b).collect();
    let zero = vec![0.0; sigma.len()];
    let gap = match kind {
        GapKind::Plain => {
            let f1 = normalized_cf(spec, sigma, t1, bounds)?;
            let f2 = normalized_cf(spec, sigma, t2, bounds)?;
            let fd = normalized_cf(spec, sigma, &diff, bounds)?;
            4.0 * (Complex64::new(1.0, 0.0) - fd).norm() - (f1 - f2).norm_sqr()
        }
        GapKind::Scaled => {
            let prepared = Prepared::new(spec, bounds.prime_cutoff);
            let z0 = prepared.product_at(&EvalPoint::new(sigma.to_vec(), zero))?;
            let zd = prepared.product_at(&EvalPoint::new(sigma.to_vec(), diff))?;
            let z1 = prepared.product_at(&EvalPoint::new(sigma.to_vec(), t1.to_vec()))?;
            let z2 = prepared.product_at(&EvalPoint::new(sigma.to_vec(), t2.to_vec()))?;
            4.0 * z0.norm() * (z0 - zd).norm() - (z1 - z2).norm_sqr()
        }
        GapKind::Log => {
            let prepared = Prepared::new(spec, bounds.prime_cutoff);
            let r = bounds.power_cutoff;
            let l0 = prepared.log_at(&EvalPoint::new(sigma.to_vec(), zero), r);
            let ld = prepared.log_at(&EvalPoint::new(sigma.to_vec(), diff), r);
            let l1 = prepared.log_at(&EvalPoint::new(sigma.to_vec(), t1.to_vec()), r);
            let l2 = prepared.log_at(&EvalPoint::new(sigma.to_vec(), t2.to_vec()), r);
            4.0 * l0.norm() * (l0 - ld).norm() - (l1 - l2).norm_sqr()
        }
    };
    Ok(GapReport {
        kind,
        sigma: sigma.to_vec(),
        t1: t1.to_vec(),
        t2: t2.to_vec(),
        gap,
        tail_bound: truncation_tail_bound(spec, sigma, bounds)?,
    })
}

pub fn scaled_gap(
    spec: &EulerProductSpec,
    sigma: &[f64],
    t1: &[f64],
    t2: &[f64],
    bounds: &TruncationBounds,
) -> Result<GapReport> {
    gap(spec, GapKind::Scaled, sigma, t1, t2, bounds)
}

pub fn log_gap(
    spec: &EulerProductSpec,
    sigma: &[f64],
    t1: &[f64],
    t2: &[f64],
    bounds: &TruncationBounds,
) -> Result<GapReport> {
    gap(spec, GapKind::Log, sigma, t1, t2, bounds)
}

/// Q(t) over a grid: with F = log Z (kind Log) or Z itself,
/// Q(t) = 4 |F(s)| |F(s) - F(s + i shift)| - |F(s + it) - F(s + i(t+shift))|^2,
/// one-dimensional specs only (the profile follows the paper's setup).
pub fn q_profile(
    spec: &EulerProductSpec,
    sigma: f64,
    shift: f64,
    t_min: f64,
    t_max: f64,
    step: f64,
    kind: GapKind,
) -> Result<Vec<(f64, f64)>> {
    if spec.dimension != 1 {
        return Err(Error::Parameter(
            "q_profile is defined for one-dimensional specs".into(),
        ));
    }
    if step <= 0.0 || t_max < t_min {
        return Err(Error::Parameter("invalid q_profile grid".into()));
    }
    let bounds = TruncationBounds::new(100_000, 400, 1)?;
    check_point(spec, &[sigma])?;
    let prepared = Prepared::new(spec, bounds.prime_cutoff);
    let eval = |t: f64| -> Result<Complex64> {
        let point = EvalPoint::new(vec![sigma], vec![t]);
        match kind {
            GapKind::Log => Ok(prepared.log_at(&point, bounds.power_cutoff)),
            _ => prepared.product_at(&point),
        }
    };
    let f0 = eval(0.0)?;
    let fs = eval(shift)?;
    let head = 4.0 * f0.norm() * (f0 - fs).norm();
    let steps = ((t_max - t_min) / step).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = t_min + k as f64 * step;
        let a = eval(t)?;
        let b = eval(t + shift)?;
        out.push((t, head - (a - b).norm_sqr()));
    }
    Ok(out)
}

/// A verified search witness.
#[derive(Clone, Debug)]
pub struct SearchWitness {
    /// the grid parameter (tau or t)
    pub value: f64,
    /// |difference| re-evaluated at the caller's full bounds
    pub difference: f64,
    pub epsilon: f64,
}

/// Grid rotators: per (rank, prime) unit phases advanced by a fixed step,
/// refreshed from exact exponentials periodically to kill drift.
struct Rotators {
    /// current p^{-i <c_l, u> tau} values, rank-major
    z: Vec<Complex64>,
    /// per-step multipliers
    rot: Vec<Complex64>,
    /// base angles <c_l, u> ln p
    angle: Vec<f64>,
    n_primes: usize,
    phi: usize,
    k: u64,
    step: f64,
}

const REFRESH_INTERVAL: u64 = 4096;

impl Rotators {
    fn new(prepared: &Prepared<'_>, direction: &[f64], step: f64) -> Self {
        let phi = prepared.spec.phi;
        let n = prepared.primes.len();
        let mut angle = Vec::with_capacity(phi * n);
        let mut rot = Vec::with_capacity(phi * n);
        for l in 0..phi {
            let dot = prepared.spec.directions[l].dot(direction);
            for i in 0..n {
                let a = dot * prepared.ln_p[i];
                angle.push(a);
                rot.push(Complex64::from_polar(1.0, -step * a));
            }
        }
        Rotators {
            z: vec![Complex64::new(1.0, 0.0); phi * n],
            rot,
            angle,
            n_primes: n,
            phi,
            k: 0,
            step,
        }
    }

    fn advance(&mut self) {
        self.k += 1;
        if self.k % REFRESH_INTERVAL == 0 {
            let tau = self.k as f64 * self.step;
            for (z, a) in self.z.iter_mut().zip(&self.angle) {
                *z = Complex64::from_polar(1.0, -tau * a);
            }
        } else {
            for (z, r) in self.z.iter_mut().zip(&self.rot) {
                *z *= r;
            }
        }
    }

    fn tau(&self) -> f64 {
        self.k as f64 * self.step
    }
}

/// Truncated product evaluated from rotator state times the sigma part.
fn product_from_rotators(
    prepared: &Prepared<'_>,
    sigma_pows: &[Complex64], // p^{-<c_l, sigma>}, rank-major
    rots: &Rotators,
) -> Complex64 {
    let n = rots.n_primes;
    let eta = prepared.spec.eta;
    let mut denom = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for l in 0..rots.phi {
            let w = sigma_pows[l * n + i] * rots.z[l * n + i];
            for k in 0..eta {
                let alpha = prepared.alphas[l][k * n + i];
                denom *= Complex64::new(1.0, 0.0) - alpha * w;
            }
        }
    }
    denom.inv()
}

fn sigma_powers(prepared: &Prepared<'_>, sigma: &[f64]) -> Vec<Complex64> {
    let n = prepared.primes.len();
    let phi = prepared.spec.phi;
    let mut out = Vec::with_capacity(phi * n);
    for l in 0..phi {
        let dot = prepared.spec.directions[l].dot(sigma);
        for i in 0..n {
            out.push(Complex64::new((-dot * prepared.ln_p[i]).exp(), 0.0));
        }
    }
    out
}

/// Upper bound on |Z| over a vertical line, from the tail-free factor bound
/// prod (1 - |alpha| p^-v)^{-1} <= prod (1 - p^-v)^{-phi eta}.
fn product_upper_bound(prepared: &Prepared<'_>, sigma: &[f64]) -> f64 {
    let mut acc = 1.0f64;
    let eta = prepared.spec.eta;
    for (i, _) in prepared.primes.iter().enumerate() {
        for l in 0..prepared.spec.phi {
            let dot = prepared.spec.directions[l].dot(sigma);
            let x = (-dot * prepared.ln_p[i]).exp();
            if x >= 1.0 {
                return f64::INFINITY;
            }
            acc /= (1.0 - x).powi(eta as i32);
        }
    }
    acc * 1.5 // headroom for the tail beyond the prescreen cutoff
}

/// Searches the grid tau = step, 2 step, ..., <= tau_max for the smallest
/// tau with |Z(sigma + i tau u) - Z(sigma)| < epsilon (or the log-series
/// variant). Candidates pass a sound prescreen with few primes and are
/// verified at the full bounds; the returned witness satisfies the
/// criterion at the caller's truncation.
pub fn almost_period_search(
    spec: &EulerProductSpec,
    sigma: &[f64],
    epsilon: f64,
    tau_max: f64,
    step: f64,
    direction: &[f64],
    use_log: bool,
    bounds: &TruncationBounds,
) -> Result<Option<SearchWitness>> {
    if epsilon <= 0.0 {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    if step <= 0.0 || tau_max <= 0.0 {
        return Err(Error::Parameter("step and tau_max must be positive".into()));
    }
    check_point(spec, sigma)?;
    let direction = normalize_direction(direction, spec.dimension)?;

    let full = Prepared::new(spec, bounds.prime_cutoff);
    let reference_full = if use_log {
        full.log_at(&EvalPoint::real(sigma.to_vec()), bounds.power_cutoff)
    } else {
        full.product_at(&EvalPoint::real(sigma.to_vec()))?
    };
    let full_eval = |tau: f64| -> Result<f64> {
        let t: Vec<f64> = direction.iter().map(|u| u * tau).collect();
        let point = EvalPoint::new(sigma.to_vec(), t);
        let v = if use_log {
            full.log_at(&point, bounds.power_cutoff)
        } else {
            full.product_at(&point)?
        };
        Ok((v - reference_full).norm())
    };

    // prescreen: coarse truncation with a margin that bounds the coarse-vs-
    // full difference, so no qualifying grid point is skipped
    let coarse_cutoff = prescreen_cutoff(spec, sigma, bounds);
    let coarse = Prepared::new(spec, coarse_cutoff);
    let coarse_tail = truncation_tail_bound(
        spec,
        sigma,
        &TruncationBounds::new(coarse_cutoff, bounds.power_cutoff, 1)?,
    )?;
    let margin = if use_log {
        2.0 * coarse_tail
    } else {
        2.0 * product_upper_bound(&coarse, sigma) * coarse_tail.exp_m1()
    };
    let threshold = epsilon + margin;

    let sig_pows = sigma_powers(&coarse, sigma);
    let coarse_ref = if use_log {
        coarse.log_at(&EvalPoint::real(sigma.to_vec()), bounds.power_cutoff)
    } else {
        coarse.product_at(&EvalPoint::real(sigma.to_vec()))?
    };
    let mut rots = Rotators::new(&coarse, &direction, step);
    let total_steps = (tau_max / step).floor() as u64;
    for _ in 0..total_steps {
        rots.advance();
        let tau = rots.tau();
        let coarse_val = if use_log {
            let t: Vec<f64> = direction.iter().map(|u| u * tau).collect();
            coarse.log_at(
                &EvalPoint::new(sigma.to_vec(), t),
                bounds.power_cutoff,
            )
        } else {
            product_from_rotators(&coarse, &sig_pows, &rots)
        };
        if (coarse_val - coarse_ref).norm() < threshold {
            let difference = full_eval(tau)?;
            if difference < epsilon {
                return Ok(Some(SearchWitness {
                    value: tau,
                    difference,
                    epsilon,
                }));
            }
        }
    }
    Ok(None)
}

/// Searches the grid t for |Z(sigma + i lambda + i beta t u) -
/// Z(sigma + i t u)| < epsilon, beta != 1. t = 0 is excluded unless
/// `allow_zero` (where lambda = 0 makes it a trivial witness).
#[allow(clippy::too_many_arguments)]
pub fn shifted_pair_search(
    spec: &EulerProductSpec,
    sigma: &[f64],
    lambda: &[f64],
    beta: f64,
    epsilon: f64,
    t_max: f64,
    step: f64,
    allow_zero: bool,
    bounds: &TruncationBounds,
) -> Result<Option<SearchWitness>> {
    if beta == 1.0 {
        return Err(Error::Parameter("beta must differ from 1".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    if step <= 0.0 || t_max <= 0.0 {
        return Err(Error::Parameter("step and t_max must be positive".into()));
    }
    check_point(spec, sigma)?;
    let direction = principal_direction(spec.dimension);
    if lambda.len() != spec.dimension {
        return Err(Error::Parameter(format!(
            "lambda has {} entries, spec dimension is {}",
            lambda.len(),
            spec.dimension
        )));
    }

    let full = Prepared::new(spec, bounds.prime_cutoff);
    let full_eval = |t: f64| -> Result<f64> {
        let ta: Vec<f64> = direction
            .iter()
            .zip(lambda)
            .map(|(u, l)| l + beta * t * u)
            .collect();
        let tb: Vec<f64> = direction.iter().map(|u| t * u).collect();
        let za = full.product_at(&EvalPoint::new(sigma.to_vec(), ta))?;
        let zb = full.product_at(&EvalPoint::new(sigma.to_vec(), tb))?;
        Ok((za - zb).norm())
    };

    let coarse_cutoff = prescreen_cutoff(spec, sigma, bounds);
    let coarse = Prepared::new(spec, coarse_cutoff);
    let coarse_tail = truncation_tail_bound(
        spec,
        sigma,
        &TruncationBounds::new(coarse_cutoff, bounds.power_cutoff, 1)?,
    )?;
    let margin = 2.0 * product_upper_bound(&coarse, sigma) * coarse_tail.exp_m1();
    let threshold = epsilon + margin;

    let sig_pows = sigma_powers(&coarse, sigma);
    // moving point A: offset lambda, rate beta; moving point B: rate 1
    let lambda_phase: Vec<Complex64> = {
        let n = coarse.primes.len();
        let mut out = Vec::with_capacity(coarse.spec.phi * n);
        for l in 0..coarse.spec.phi {
            let dot = coarse.spec.directions[l].dot(lambda);
            for i in 0..n {
                out.push(Complex64::from_polar(1.0, -dot * coarse.ln_p[i]));
            }
        }
        out
    };
    let mut rots_a = Rotators::new(&coarse, &direction, step * beta);
    let mut rots_b = Rotators::new(&coarse, &direction, step);

    let eval_coarse = |rots_a: &Rotators, rots_b: &Rotators| -> f64 {
        let n = coarse.primes.len();
        let eta = coarse.spec.eta;
        let mut denom_a = Complex64::new(1.0, 0.0);
        let mut denom_b = Complex64::new(1.0, 0.0);
        for i in 0..n {
            for l in 0..coarse.spec.phi {
                let wa = sig_pows[l * n + i] * lambda_phase[l * n + i] * rots_a.z[l * n + i];
                let wb = sig_pows[l * n + i] * rots_b.z[l * n + i];
                for k in 0..eta {
                    let alpha = coarse.alphas[l][k * n + i];
                    denom_a *= Complex64::new(1.0, 0.0) - alpha * wa;
                    denom_b *= Complex64::new(1.0, 0.0) - alpha * wb;
                }
            }
        }
        (denom_a.inv() - denom_b.inv()).norm()
    };

    if allow_zero && eval_coarse(&rots_a, &rots_b) < threshold {
        let difference = full_eval(0.0)?;
        if difference < epsilon {
            return Ok(Some(SearchWitness {
                value: 0.0,
                difference,
                epsilon,
            }));
        }
    }
    let total_steps = (t_max / step).floor() as u64;
    for _ in 0..total_steps {
        rots_a.advance();
        rots_b.advance();
        if eval_coarse(&rots_a, &rots_b) < threshold {
            let t = rots_b.tau();
            let difference = full_eval(t)?;
            if difference < epsilon {
                return Ok(Some(SearchWitness {
                    value: t,
                    difference,
                    epsilon,
                }));
            }
        }
    }
    Ok(None)
}

fn prescreen_cutoff(spec: &EulerProductSpec, sigma: &[f64], bounds: &TruncationBounds) -> u64 {
    // finite-support specs are cheap at any cutoff
    if spec.finite_support().is_some() {
        return bounds.prime_cutoff.min(10_000);
    }
    let v = spec.min_direction_dot(sigma);
    // coarse tail ~ 2 phi eta P^{1-v}/(v-1): pick the smallest power of ten
    // that keeps the prescreen margin small relative to typical epsilons
    for p in [100u64, 300, 1000, 10_000] {
        let tail = 2.0 * (spec.phi * spec.eta) as f64 * (p as f64).powf(1.0 - v) / (v - 1.0);
        if tail < 2e-3 {
            return p.min(bounds.prime_cutoff);
        }
    }
    bounds.prime_cutoff.min(100_000)
}

fn normalize_direction(direction: &[f64], dimension: usize) -> Result<Vec<f64>> {
    if direction.len() != dimension {
        return Err(Error::Parameter(format!(
            "direction has {} entries, spec dimension is {}",
            direction.len(),
            dimension
        )));
    }
    let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Parameter("direction must be nonzero".into()));
    }
    Ok(direction.iter().map(|x| x / norm).collect())
}

fn principal_direction(dimension: usize) -> Vec<f64> {
    let mut u = vec![0.0; dimension];
    u[0] = 1.0;
    u
}
