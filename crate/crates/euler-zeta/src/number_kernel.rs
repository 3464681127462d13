//! Prime generation, factorization, power sums, and Dirichlet-coefficient
//! computation via the Newton recurrence on complete homogeneous symmetric
//! polynomials.

use crate::error::{Error, Result};
use crate::spec_model::{EulerProductSpec, ValueClass};
use crate::value::{ComplexRational, CoefficientValue};
use num::complex::Complex64;
use num::{BigInt, BigRational};
use std::collections::HashMap;

/// Primes <= limit, ascending (sieve of Eratosthenes). limit < 2 gives [].
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if is_prime[p] {
            let mut q = p * p;
            while q <= n {
                is_prime[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    is_prime
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// 1-based index of `p` among the primes (p_1 = 2), or None if not prime.
pub fn prime_index(p: u64) -> Option<usize> {
    let primes = primes_up_to(p);
    match primes.binary_search(&p) {
        Ok(i) => Some(i + 1),
        Err(_) => None,
    }
}

/// Prime factorization by trial division over sieved primes up to sqrt(n);
/// factors ascending, product of p^nu equals n. factorize(1) = [].
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut m = n;
    let root = (n as f64).sqrt() as u64 + 1;
    for p in primes_up_to(root) {
        if p * p > m {
            break;
        }
        let mut nu = 0;
        while m % p == 0 {
            m /= p;
            nu += 1;
        }
        if nu > 0 {
            out.push((p, nu));
        }
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Indicator of squarefree n for n <= limit (index n), by sieve.
pub fn squarefree_up_to(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut squarefree = vec![true; n + 1];
    if n >= 1 {
        squarefree[0] = false;
    }
    for p in primes_up_to((limit as f64).sqrt() as u64 + 1) {
        let pp = (p * p) as usize;
        if pp > n {
            break;
        }
        let mut q = pp;
        while q <= n {
            squarefree[q] = false;
            q += pp;
        }
    }
    squarefree
}

/// The primes a truncated evaluation of `spec` runs over: sieved primes
/// up to the cutoff merged with all finite-support keys (support primes
/// participate regardless of the cutoff; there are only finitely many).
/// Returns (prime, 1-based index) pairs, ascending.
pub fn spec_primes(spec: &EulerProductSpec, prime_cutoff: u64) -> Vec<(u64, usize)> {
    let mut extra: Vec<u64> = Vec::new();
    for row in &spec.rules {
        for rule in row {
            if let Some(support) = rule.finite_support() {
                extra.extend(support);
            }
        }
    }
    let max_needed = extra.iter().copied().max().unwrap_or(0).max(prime_cutoff);
    let primes = primes_up_to(max_needed);
    primes
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p <= prime_cutoff || extra.contains(&p))
        .map(|(i, &p)| (p, i + 1))
        .collect()
}

/// A power sum with its exactness class.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerSumValue {
    Exact(ComplexRational),
    Numeric(Complex64),
}

impl PowerSumValue {
    pub fn to_complex64(&self) -> Complex64 {
        match self {
            PowerSumValue::Exact(v) => v.to_complex64(),
            PowerSumValue::Numeric(z) => *z,
        }
    }
}

impl std::fmt::Display for PowerSumValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PowerSumValue::Exact(v) => write!(f, "{v}"),
            PowerSumValue::Numeric(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

/// sum_k alpha_{lk}(p)^r; exact when every value is Gaussian-rational.
pub fn power_sum(spec: &EulerProductSpec, l: usize, p: u64, r: u32) -> Result<PowerSumValue> {
    let index = prime_index(p)
        .ok_or_else(|| Error::Parameter(format!("power_sum: {p} is not prime")))?;
    Ok(power_sum_of_values(
        &(1..=spec.eta)
            .map(|k| spec.coefficient(l, k, p, index))
            .collect::<Vec<_>>(),
        r,
    ))
}

pub(crate) fn power_sum_of_values(values: &[CoefficientValue], r: u32) -> PowerSumValue {
    if values.iter().all(|v| v.is_exact()) {
        let mut acc = ComplexRational::zero();
        for v in values {
            if let CoefficientValue::Exact(x) = v {
                acc = &acc + &x.pow(r as u64);
            }
        }
        PowerSumValue::Exact(acc)
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += v.to_complex64().powu(r);
        }
        PowerSumValue::Numeric(acc)
    }
}

/// Local Dirichlet coefficients a_l(p^r) = h_r, the complete homogeneous
/// symmetric polynomials in the alpha_{lk}(p).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCoefficientSeries {
    pub rank: usize,
    pub prime: u64,
    pub values: LocalValues,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalValues {
    Exact(Vec<ComplexRational>),
    Numeric(Vec<Complex64>),
}

impl LocalCoefficientSeries {
    pub fn len(&self) -> usize {
        match &self.values {
            LocalValues::Exact(v) => v.len(),
            LocalValues::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, LocalValues::Exact(_))
    }

    pub fn get_complex(&self, r: usize) -> Complex64 {
        match &self.values {
            LocalValues::Exact(v) => v[r].to_complex64(),
            LocalValues::Numeric(v) => v[r],
        }
    }
}

/// h_0..h_{r_max} via Newton's identity r h_r = sum_{i=1..r} s_i h_{r-i},
/// where s_i is the i-th power sum of the coefficient values at (l, p).
/// O(r_max^2) against the exponential direct enumeration; the brute-force
/// expansion survives as the test oracle.
pub fn local_coefficients(
    spec: &EulerProductSpec,
    l: usize,
    p: u64,
    r_max: u32,
) -> Result<LocalCoefficientSeries> {
    let index = prime_index(p)
        .ok_or_else(|| Error::Parameter(format!("local_coefficients: {p} is not prime")))?;
    Ok(local_coefficients_indexed(spec, l, p, index, r_max))
}

pub(crate) fn local_coefficients_indexed(
    spec: &EulerProductSpec,
    l: usize,
    p: u64,
    index: usize,
    r_max: u32,
) -> LocalCoefficientSeries {
    let values: Vec<CoefficientValue> = (1..=spec.eta)
        .map(|k| spec.coefficient(l, k, p, index))
        .collect();
    let exact = values.iter().all(|v| v.is_exact());
    let values = if exact {
        let exact_vals: Vec<ComplexRational> = values
            .iter()
            .map(|v| match v {
                CoefficientValue::Exact(x) => x.clone(),
                _ => unreachable!(),
            })
            .collect();
        LocalValues::Exact(newton_exact(&exact_vals, r_max))
    } else {
        let nums: Vec<Complex64> = values.iter().map(|v| v.to_complex64()).collect();
        LocalValues::Numeric(newton_numeric(&nums, r_max))
    };
    LocalCoefficientSeries {
        rank: l,
        prime: p,
        values,
    }
}

fn newton_exact(alphas: &[ComplexRational], r_max: u32) -> Vec<ComplexRational> {
    let r_max = r_max as usize;
    let mut power_sums = Vec::with_capacity(r_max + 1);
    power_sums.push(ComplexRational::zero()); // unused s_0
    let mut powers: Vec<ComplexRational> = alphas.to_vec();
    for _ in 1..=r_max {
        let mut s = ComplexRational::zero();
        for q in &powers {
            s = &s + q;
        }
        power_sums.push(s);
        for (q, a) in powers.iter_mut().zip(alphas) {
            *q = &*q * a;
        }
    }
    let mut h = Vec::with_capacity(r_max + 1);
    h.push(ComplexRational::one());
    for r in 1..=r_max {
        let mut acc = ComplexRational::zero();
        for i in 1..=r {
            acc = &acc + &(&power_sums[i] * &h[r - i]);
        }
        let r_rat = BigRational::from_integer(BigInt::from(r as i64));
        h.push(ComplexRational::new(acc.re / &r_rat, acc.im / &r_rat));
    }
    h
}

fn newton_numeric(alphas: &[Complex64], r_max: u32) -> Vec<Complex64> {
    let r_max = r_max as usize;
    let mut power_sums = vec![Complex64::new(0.0, 0.0); r_max + 1];
    let mut powers: Vec<Complex64> = alphas.to_vec();
    for s in power_sums.iter_mut().skip(1) {
        *s = powers.iter().sum();
        for (q, a) in powers.iter_mut().zip(alphas) {
            *q *= a;
        }
    }
    let mut h = Vec::with_capacity(r_max + 1);
    h.push(Complex64::new(1.0, 0.0));
    for r in 1..=r_max {
        let acc: Complex64 = (1..=r).map(|i| power_sums[i] * h[r - i]).sum();
        h.push(acc / r as f64);
    }
    h
}

/// The Dirichlet coefficients a_l(1)..a_l(N) of one rank, assembled
/// multiplicatively from local series.
#[derive(Clone, Debug)]
pub struct DirichletCoefficientTable {
    pub rank: usize,
    pub cutoff: u64,
    pub values: CoefficientTable,
}

#[derive(Clone, Debug)]
pub enum CoefficientTable {
    Exact(Vec<ComplexRational>),
    Numeric(Vec<Complex64>),
}

impl DirichletCoefficientTable {
    /// a_l(n), 1-based.
    pub fn get_complex(&self, n: u64) -> Complex64 {
        match &self.values {
            CoefficientTable::Exact(v) => v[(n - 1) as usize].to_complex64(),
            CoefficientTable::Numeric(v) => v[(n - 1) as usize],
        }
    }

    pub fn get_exact(&self, n: u64) -> Option<&ComplexRational> {
        match &self.values {
            CoefficientTable::Exact(v) => Some(&v[(n - 1) as usize]),
            CoefficientTable::Numeric(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, CoefficientTable::Exact(_))
    }

    pub fn all_real(&self) -> bool {
        match &self.values {
            CoefficientTable::Exact(v) => v.iter().all(|x| x.is_real()),
            CoefficientTable::Numeric(v) => v.iter().all(|z| z.im == 0.0),
        }
    }
}

/// Smallest-prime-factor sieve; spf[n] = least prime dividing n (n >= 2).
pub(crate) fn smallest_prime_factor_sieve(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// a_l(n) for n <= N: multiplicative assembly over the smallest-prime-factor
/// sieve; exact when the spec's value class is exact.
pub fn dirichlet_coefficients(
    spec: &EulerProductSpec,
    l: usize,
    n_max: u64,
) -> Result<DirichletCoefficientTable> {
    if n_max < 1 {
        return Err(Error::Parameter("coefficient cutoff must be >= 1".into()));
    }
    let exact = spec.value_class() == ValueClass::Exact;
    let spf = smallest_prime_factor_sieve(n_max);
    let primes = primes_up_to(n_max);
    let index_of: HashMap<u64, usize> = primes
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i + 1))
        .collect();
    let mut local: HashMap<u64, LocalCoefficientSeries> = HashMap::new();
    let n = n_max as usize;
    macro_rules! series_for {
        ($p:expr) => {
            local.entry($p).or_insert_with(|| {
                let r_max = n.ilog($p as usize) as u32;
                local_coefficients_indexed(spec, l, $p, index_of[&$p], r_max)
            })
        };
    }
    if exact {
        let mut table: Vec<ComplexRational> = Vec::with_capacity(n);
        table.push(ComplexRational::one());
        for m in 2..=n {
            let p = spf[m] as usize;
            let mut q = m;
            let mut nu = 0usize;
            while q % p == 0 {
                q /= p;
                nu += 1;
            }
            let series = series_for!(p as u64);
            let h = match &series.values {
                LocalValues::Exact(v) => v[nu].clone(),
                _ => unreachable!("exact spec produced numeric series"),
            };
            let prev = table[q - 1].clone();
            table.push(&prev * &h);
        }
        Ok(DirichletCoefficientTable {
            rank: l,
            cutoff: n_max,
            values: CoefficientTable::Exact(table),
        })
    } else {
        let mut table: Vec<Complex64> = Vec::with_capacity(n);
        table.push(Complex64::new(1.0, 0.0));
        for m in 2..=n {
            let p = spf[m] as usize;
            let mut q = m;
            let mut nu = 0usize;
            while q % p == 0 {
                q /= p;
                nu += 1;
            }
            let h = series_for!(p as u64).get_complex(nu);
            let prev = table[q - 1];
            table.push(prev * h);
        }
        Ok(DirichletCoefficientTable {
            rank: l,
            cutoff: n_max,
            values: CoefficientTable::Numeric(table),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_model::builtin_spec;

    #[test]
    fn primes_examples() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(10_000).len(), 1229);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(32 * 343), vec![(2, 5), (7, 3)]);
        // trial-division oracle on a range
        for n in 1..=2000u64 {
            let f = factorize(n);
            let mut prod = 1u64;
            for &(p, nu) in &f {
                assert!(crate::spec_model::is_prime_u64(p));
                prod *= p.pow(nu);
            }
            assert_eq!(prod, n);
            for w in f.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn power_sum_examples() {
        // {1, 1, i, -i} at r = 2: 1 + 1 - 1 - 1 = 0.
        let spec = builtin_spec("fn:2").unwrap();
        match power_sum(&spec, 1, 2, 2).unwrap() {
            PowerSumValue::Exact(v) => assert!(v.is_zero()),
            other => panic!("expected exact, got {other:?}"),
        }
        // F_n family at p = 2, r congruent to 2 mod 4: n - 2.
        for n in 0..=4u32 {
            let spec = builtin_spec(&format!("fn:{n}")).unwrap();
            for r in [2u32, 6, 10] {
                match power_sum(&spec, 1, 2, r).unwrap() {
                    PowerSumValue::Exact(v) => {
                        assert!(v.is_real());
                        assert_eq!(
                            v.re,
                            BigRational::from_integer(BigInt::from(n as i64 - 2)),
                            "fn:{n} power sum at r={r}"
                        );
                    }
                    other => panic!("expected exact, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn degree_bound_family_power_sums() {
        // eta = 4 family from the eta >= 4 construction: {1, i, -i, 1/eta, ...}
        // power sum at r = 4j-2 equals -1 + (eta-3)/eta^{4j-2}.
        use crate::spec_model::{CoefficientRule, DependenceMode, Direction, NumberLiteral};
        for eta in [4usize, 5, 6] {
            let mut rules = vec![
                CoefficientRule::ConstantExact(ComplexRational::one()),
                CoefficientRule::ConstantExact(ComplexRational::i()),
                CoefficientRule::ConstantExact(ComplexRational::from_integers(0, -1)),
            ];
            for _ in 3..eta {
                rules.push(CoefficientRule::ConstantExact(ComplexRational::from_ratios(
                    (1, eta as i64),
                    (0, 1),
                )));
            }
            let spec = crate::spec_model::EulerProductSpec::new(
                1,
                vec![Direction(vec![NumberLiteral::from_integer(1)])],
                vec![rules],
                DependenceMode::Independent,
            )
            .unwrap();
            for j in 1..=2u32 {
                let r = 4 * j - 2;
                match power_sum(&spec, 1, 2, r).unwrap() {
                    PowerSumValue::Exact(v) => {
                        let expected = BigRational::from_integer(BigInt::from(-1))
                            + BigRational::new(
                                BigInt::from(eta as i64 - 3),
                                BigInt::from(eta as i64).pow(r),
                            );
                        assert!(v.is_real());
                        assert_eq!(v.re, expected, "eta={eta}, r={r}");
                    }
                    other => panic!("expected exact, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn local_series_examples() {
        // Z_Q at p = 2: h_0..h_5 = 1,1,0,0,1,1.
        let zq = builtin_spec("zq").unwrap();
        let series = local_coefficients(&zq, 1, 2, 5).unwrap();
        match &series.values {
            LocalValues::Exact(h) => {
                let expected = [1i64, 1, 0, 0, 1, 1];
                for (r, &e) in expected.iter().enumerate() {
                    assert_eq!(h[r], ComplexRational::from_integers(e, 0), "h_{r}");
                }
            }
            _ => panic!("zq series should be exact"),
        }
        // {1, -1}: (1-x^2)^{-1} expansion: 1, 0, 1, 0.
        use crate::spec_model::{CoefficientRule, DependenceMode, Direction, NumberLiteral};
        let spec = crate::spec_model::EulerProductSpec::new(
            1,
            vec![Direction(vec![NumberLiteral::from_integer(1)])],
            vec![vec![
                CoefficientRule::ConstantExact(ComplexRational::one()),
                CoefficientRule::ConstantExact(ComplexRational::from_integers(-1, 0)),
            ]],
            DependenceMode::Independent,
        )
        .unwrap();
        let series = local_coefficients(&spec, 1, 3, 3).unwrap();
        match &series.values {
            LocalValues::Exact(h) => {
                for (r, &e) in [1i64, 0, 1, 0].iter().enumerate() {
                    assert_eq!(h[r], ComplexRational::from_integers(e, 0), "h_{r}");
                }
            }
            _ => panic!("series should be exact"),
        }
        // zeta^2: h_3 = d_2(p^3) = 4 divisors of p^3.
        let z2 = builtin_spec("zeta-k:2").unwrap();
        let series = local_coefficients(&z2, 1, 5, 3).unwrap();
        assert_eq!(series.get_complex(3).re, 4.0);
    }

    #[test]
    fn newton_degenerate_all_zero() {
        let spec = builtin_spec("zq").unwrap();
        // off-support prime: all alpha = 0, h_0 = 1, h_r = 0.
        let series = local_coefficients(&spec, 1, 7, 6).unwrap();
        match &series.values {
            LocalValues::Exact(h) => {
                assert_eq!(h[0], ComplexRational::one());
                for r in 1..=6 {
                    assert!(h[r].is_zero(), "h_{r} should vanish");
                }
            }
            _ => panic!("expected exact"),
        }
    }

    #[test]
    fn zeta_k_binomial_oracle() {
        // a(p^r) = C(r+k-1, k-1) for zeta^k.
        fn binom(n: u64, k: u64) -> u64 {
            let mut acc = 1u64;
            for i in 0..k {
                acc = acc * (n - i) / (i + 1);
            }
            acc
        }
        for k in 1..=4usize {
            let spec = builtin_spec(&format!("zeta-k:{k}")).unwrap();
            for p in primes_up_to(20) {
                let series = local_coefficients(&spec, 1, p, 10).unwrap();
                for r in 0..=10u64 {
                    let expected = binom(r + k as u64 - 1, k as u64 - 1) as f64;
                    assert_eq!(series.get_complex(r as usize).re, expected);
                }
            }
        }
    }

    #[test]
    fn dedekind_coefficients() {
        let spec = builtin_spec("dedekind-qi").unwrap();
        let table = dirichlet_coefficients(&spec, 1, 100).unwrap();
        // divisor-sum oracle: a(n) = sum_{m|n} chi4(m)
        let chi4 = |m: u64| -> i64 {
            match m % 4 {
                1 => 1,
                3 => -1,
                _ => 0,
            }
        };
        for n in 1..=100u64 {
            let mut expected = 0i64;
            for m in 1..=n {
                if n % m == 0 {
                    expected += chi4(m);
                }
            }
            assert_eq!(
                table.get_complex(n).re,
                expected as f64,
                "a({n}) divisor-sum oracle"
            );
            assert_eq!(table.get_complex(n).im, 0.0);
        }
        assert_eq!(table.get_complex(5).re, 2.0);
        assert_eq!(table.get_complex(3).re, 0.0);
        assert_eq!(table.get_complex(1).re, 1.0);
    }

    #[test]
    fn multiplicativity_spot_check() {
        let spec = builtin_spec("dedekind-qi").unwrap();
        let table = dirichlet_coefficients(&spec, 1, 2000).unwrap();
        for m in 2..=40u64 {
            for n in 2..=40u64 {
                if crate::spec_model::gcd(m, n) == 1 && m * n <= 2000 {
                    let lhs = table.get_complex(m * n);
                    let rhs = table.get_complex(m) * table.get_complex(n);
                    assert!((lhs - rhs).norm() < 1e-12, "a({m}*{n}) != a({m})a({n})");
                }
            }
        }
    }

    #[test]
    fn squarefree_sieve_matches_factorization() {
        let flags = squarefree_up_to(500);
        for n in 1..=500u64 {
            let expected = factorize(n).iter().all(|&(_, nu)| nu == 1);
            assert_eq!(flags[n as usize], expected, "squarefree({n})");
        }
    }
}
