//! The zeta distribution as an explicit pmf over its support points
//! -sum_l log(n_l) c_l, with reproducible inverse-CDF sampling and the
//! empirical characteristic function.

use crate::classifier::{scan_coefficients, ScanOutcome};
use crate::error::{Error, Result};
use crate::evaluator::check_point;
use crate::number_kernel::{primes_up_to, smallest_prime_factor_sieve, LocalValues};
use crate::rng::SplitMix64;
use crate::spec_model::EulerProductSpec;
use num::complex::Complex64;
use std::collections::HashMap;

/// Refuse to sample pmfs missing more than this much mass.
const DEFICIT_LIMIT: f64 = 1e-6;

/// Discrete distribution of the zeta random variable, truncated at index
/// cutoff N per rank.
#[derive(Clone, Debug)]
pub struct SupportAtomTable {
    pub dimension: usize,
    pub phi: usize,
    /// row-major index tuples (n_1..n_phi), length = len * phi
    indices: Vec<u64>,
    /// row-major support points, length = len * dimension
    points: Vec<f64>,
    masses: Vec<f64>,
    /// mass beyond the cutoff: 1 - sum(masses), bounded by the divisor
    /// majorant of the coefficient tails
    pub deficit: f64,
    pub sigma: Vec<f64>,
}

/// One view into the table.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportAtom {
    pub indices: Vec<u64>,
    pub point: Vec<f64>,
    pub mass: f64,
}

impl SupportAtomTable {
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn atom(&self, i: usize) -> SupportAtom {
        SupportAtom {
            indices: self.indices[i * self.phi..(i + 1) * self.phi].to_vec(),
            point: self.points[i * self.dimension..(i + 1) * self.dimension].to_vec(),
            mass: self.masses[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = SupportAtom> + '_ {
        (0..self.len()).map(|i| self.atom(i))
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Characteristic function of the truncated pmf at t.
    pub fn cf(&self, t: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.len() {
            let dot: f64 = self.points[i * self.dimension..(i + 1) * self.dimension]
                .iter()
                .zip(t)
                .map(|(x, ti)| x * ti)
                .sum();
            acc += Complex64::new(0.0, dot).exp() * self.masses[i];
        }
        acc
    }
}

/// Per-rank coefficient data for the pmf: a(n) as f64 for n <= cutoff,
/// verified nonnegative, plus a certified tail bound for the deficit.
struct RankSeries {
    values: Vec<f64>, // index n-1
    tail_bound: f64,
    weighted_sum: f64, // sum a(n) n^{-v}
    v: f64,
}

fn rank_series(spec: &EulerProductSpec, l: usize, sigma: &[f64], n_max: u64) -> Result<RankSeries> {
    let v = spec.directions[l - 1].dot(sigma);
    let n = n_max as usize;
    let spf = smallest_prime_factor_sieve(n_max);
    let primes = primes_up_to(n_max);
    let index_of: HashMap<u64, usize> = primes
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i + 1))
        .collect();
    let mut local: HashMap<u64, Vec<f64>> = HashMap::new();
    let mut values = vec![0.0f64; n];
    values[0] = 1.0;
    for m in 2..=n {
        let p = spf[m] as u64;
        let mut q = m;
        let mut nu = 0usize;
        while q % p as usize == 0 {
            q /= p as usize;
            nu += 1;
        }
        let h = local.entry(p).or_insert_with(|| {
            let series = crate::number_kernel::local_coefficients_indexed(
                spec,
                l,
                p,
                index_of[&p],
                (n as u64).ilog(p),
            );
            match &series.values {
                LocalValues::Exact(hs) => hs.iter().map(|x| x.to_complex64().re).collect(),
                LocalValues::Numeric(hs) => hs.iter().map(|z| z.re).collect(),
            }
        });
        values[m - 1] = values[q - 1] * h[nu];
    }
    // coefficient majorant |a(n)| <= d_eta(n): the tail beyond N is bounded
    // by zeta(v)^eta minus the accumulated partial sum of d_eta(n) n^{-v}
    let mut weighted_sum = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        weighted_sum += a * ((i + 1) as f64).powf(-v);
    }
    let tail_bound = match rank_support(spec, l) {
        Some(support) => smooth_tail_bound(spec, l, &support, v, weighted_sum, &index_of),
        None => divisor_tail_bound(spec.eta as u32, v, n_max),
    };
    Ok(RankSeries {
        values,
        tail_bound,
        weighted_sum,
        v,
    })
}

fn rank_support(spec: &EulerProductSpec, l: usize) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    for rule in &spec.rules[l - 1] {
        out.extend(rule.finite_support()?);
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// For a rank supported on finitely many primes, sum_n |a(n)| n^{-v} is the
/// finite product of the local absolute factors sum_nu |h_nu| p^{-nu v};
/// the tail beyond the cutoff is that product minus the accumulated partial
/// sum. |h_nu| <= C(nu+eta-1, eta-1) <= (nu+1)^{eta-1} controls the series
/// remainder.
fn smooth_tail_bound(
    spec: &EulerProductSpec,
    l: usize,
    support: &[u64],
    v: f64,
    partial: f64,
    index_of: &HashMap<u64, usize>,
) -> f64 {
    let eta = spec.eta as i32;
    let mut full = 1.0f64;
    const V_CUT: u32 = 400;
    for &p in support {
        let idx = index_of
            .get(&p)
            .copied()
            .unwrap_or_else(|| crate::number_kernel::prime_index(p).unwrap_or(1));
        let series =
            crate::number_kernel::local_coefficients_indexed(spec, l, p, idx, V_CUT);
        let x = (p as f64).powf(-v);
        let mut local = 0.0f64;
        for nu in 0..=V_CUT {
            let h = match &series.values {
                LocalValues::Exact(hs) => hs[nu as usize].to_complex64(),
                LocalValues::Numeric(hs) => hs[nu as usize],
            };
            local += h.norm() * x.powi(nu as i32);
        }
        // remainder: sum_{nu > V} (nu+1)^{eta-1} x^nu
        let growth = ((eta - 1) as f64 / (V_CUT as f64 + 2.0)).exp();
        let ratio = x * growth;
        let remainder = if ratio < 1.0 {
            x.powi(V_CUT as i32 + 1) * ((V_CUT as f64) + 2.0).powi(eta - 1) / (1.0 - ratio)
        } else {
            return divisor_tail_bound(spec.eta as u32, v, 10_000);
        };
        full *= local + remainder;
    }
    ((full * (1.0 + 1e-9) - partial).max(0.0)) + 1e-300
}

/// sum_{n > N} d_eta(n) n^{-v} <= zeta_upper(v)^eta - sum_{n <= N} d_eta(n) n^{-v}.
fn divisor_tail_bound(eta: u32, v: f64, n_max: u64) -> f64 {
    let n = n_max as usize;
    // d_eta by sieve: eta-fold divisor convolution of 1
    let mut d = vec![1.0f64; n + 1];
    for _ in 1..eta {
        let mut next = vec![0.0f64; n + 1];
        for m in 1..=n {
            let mut q = m;
            while q <= n {
                next[q] += d[m];
                q += m;
            }
        }
        d = next;
    }
    let mut partial = 0.0f64;
    for m in 1..=n {
        partial += d[m] * (m as f64).powf(-v);
    }
    let mut zeta_upper = 0.0f64;
    let m0 = (n_max.max(10_000)) as f64;
    let mut k = 1.0f64;
    while k <= m0 {
        zeta_upper += k.powf(-v);
        k += 1.0;
    }
    zeta_upper += m0.powf(1.0 - v) / (v - 1.0);
    let bound = zeta_upper.powi(eta as i32) * (1.0 + 1e-9) - partial;
    bound.max(0.0)
}

/// Builds the pmf: mass(n_1..n_phi) proportional to
/// prod_l a_l(n_l) n_l^{-<c_l, sigma>}, normalized so that
/// sum(mass) + deficit = 1 exactly, with the deficit certified by the
/// divisor majorant. Fails with the offending coefficient when some
/// a_l(n) is negative or non-real.
pub fn build_pmf(
    spec: &EulerProductSpec,
    sigma: &[f64],
    n_max: u64,
) -> Result<SupportAtomTable> {
    check_point(spec, sigma)?;
    let v = spec.min_direction_dot(sigma);
    if v <= 1.0 && spec.finite_support().is_none() {
        return Err(Error::Domain(format!(
            "pmf needs min_l <c_l, sigma> > 1, got {v}"
        )));
    }
    // nonnegativity precheck with a witness
    match scan_coefficients(spec, n_max)? {
        ScanOutcome::Clean { .. } => {}
        ScanOutcome::Witness { rank, n, value } => {
            return Err(Error::NegativeMass {
                rank,
                n,
                value: value.to_string(),
            });
        }
        ScanOutcome::Undecided { rank, n } => {
            return Err(Error::NegativeMass {
                rank,
                n,
                value: "numerically undecidable sign".into(),
            });
        }
    }

    let ranks: Vec<RankSeries> = (1..=spec.phi)
        .map(|l| rank_series(spec, l, sigma, n_max))
        .collect::<Result<Vec<_>>>()?;

    // per-rank normalizers S_l + tail_l; the joint deficit is
    // 1 - prod(S_l / (S_l + tail_l))
    let normalizer: f64 = ranks.iter().map(|r| r.weighted_sum + r.tail_bound).product();
    if !(normalizer.is_finite() && normalizer > 0.0) {
        return Err(Error::Domain("pmf normalizer is not positive".into()));
    }

    // enumerate nonzero entries per rank, then their product grid
    let per_rank: Vec<Vec<(u64, f64)>> = ranks
        .iter()
        .map(|r| {
            r.values
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(i, &a)| ((i + 1) as u64, a * ((i + 1) as f64).powf(-r.v)))
                .collect()
        })
        .collect();
    let total_entries: usize = per_rank.iter().map(|v| v.len()).product();
    const MAX_ENTRIES: usize = 20_000_000;
    if total_entries > MAX_ENTRIES {
        return Err(Error::Parameter(format!(
            "pmf grid has {total_entries} entries; lower the cutoff (limit {MAX_ENTRIES})"
        )));
    }

    let phi = spec.phi;
    let d = spec.dimension;
    let mut indices = Vec::with_capacity(total_entries * phi);
    let mut points = Vec::with_capacity(total_entries * d);
    let mut masses = Vec::with_capacity(total_entries);
    let mut stack = vec![0usize; phi];
    loop {
        // current tuple
        let mut mass = 1.0f64;
        for (l, &i) in stack.iter().enumerate() {
            mass *= per_rank[l][i].1;
        }
        let mass = mass / normalizer;
        if mass > 0.0 {
            let mut point = vec![0.0f64; d];
            for (l, &i) in stack.iter().enumerate() {
                let n_l = per_rank[l][i].0;
                indices.push(n_l);
                let ln = (n_l as f64).ln();
                for (j, c) in spec.directions[l].as_f64().iter().enumerate() {
                    point[j] -= ln * c;
                }
            }
            points.extend_from_slice(&point);
            masses.push(mass);
        }
        // advance odometer
        let mut pos = phi;
        loop {
            if pos == 0 {
                let deficit = (1.0 - masses.iter().sum::<f64>()).max(0.0);
                return Ok(SupportAtomTable {
                    dimension: d,
                    phi,
                    indices,
                    points,
                    masses,
                    deficit,
                    sigma: sigma.to_vec(),
                });
            }
            pos -= 1;
            stack[pos] += 1;
            if stack[pos] < per_rank[pos].len() {
                break;
            }
            stack[pos] = 0;
        }
    }
}

/// Draws `count` support points by inverse-CDF sampling with the seeded
/// SplitMix64 generator; identical seeds give identical output. Entries are
/// sorted by descending mass before the CDF is accumulated.
pub fn draw(pmf: &SupportAtomTable, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
    if pmf.deficit >= DEFICIT_LIMIT {
        return Err(Error::DeficitTooLarge {
            deficit: pmf.deficit,
            limit: DEFICIT_LIMIT,
        });
    }
    if pmf.is_empty() {
        return Err(Error::Parameter("cannot sample an empty pmf".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..pmf.len()).collect();
    order.sort_by(|&a, &b| {
        pmf.masses[b]
            .total_cmp(&pmf.masses[a])
            .then(a.cmp(&b))
    });
    let mut cdf = Vec::with_capacity(order.len());
    let mut acc = 0.0f64;
    for &i in &order {
        acc += pmf.masses[i];
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.next_f64() * total;
        let k = cdf.partition_point(|&c| c <= u).min(order.len() - 1);
        let i = order[k];
        out.push(pmf.points[i * pmf.dimension..(i + 1) * pmf.dimension].to_vec());
    }
    Ok(out)
}

/// Empirical characteristic function (1/M) sum_j e^{i <t, x_j>}.
pub fn empirical_cf(samples: &[Vec<f64>], t: &[f64]) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::Parameter(
            "empirical_cf needs a nonempty sample".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for x in samples {
        let dot: f64 = x.iter().zip(t).map(|(xi, ti)| xi * ti).sum();
        acc += Complex64::new(0.0, dot).exp();
    }
    Ok(acc / samples.len() as f64)
}
