//! Coefficient scan: the first n with a_l(n) outside the nonnegative reals.
//!
//! The coefficients are multiplicative with a_l(1) = 1, so the smallest
//! offending n is always a prime power and the scan runs over prime powers
//! in ascending order of value.

use super::analysis::DEAD_BAND;
use crate::error::Result;
use crate::number_kernel::{local_coefficients_indexed, primes_up_to, LocalValues, PowerSumValue};
use crate::spec_model::EulerProductSpec;
use crate::value::ComplexRational;
use num::Signed;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub enum ScanOutcome {
    /// every a_l(n), n <= n_max, is certified in the nonnegative reals
    Clean { n_max: u64 },
    /// a_{rank}(n) is negative or non-real
    Witness {
        rank: usize,
        n: u64,
        value: PowerSumValue,
    },
    /// numeric value inside the dead band; never turned into a witness
    Undecided { rank: usize, n: u64 },
}

/// Scans a_l(n) for n <= n_max across all ranks, ascending by n. A definite
/// witness is reported even when a smaller n was numerically undecided; the
/// verdict it certifies is conclusive either way.
pub fn scan_coefficients(spec: &EulerProductSpec, n_max: u64) -> Result<ScanOutcome> {
    let primes = primes_up_to(n_max);
    let index_of: HashMap<u64, usize> = primes
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i + 1))
        .collect();
    // prime powers ascending by value
    let mut powers: Vec<(u64, u64, u32)> = Vec::new(); // (n, p, nu)
    for &p in &primes {
        let mut n = p;
        let mut nu = 1u32;
        loop {
            powers.push((n, p, nu));
            match n.checked_mul(p) {
                Some(next) if next <= n_max => {
                    n = next;
                    nu += 1;
                }
                _ => break,
            }
        }
    }
    powers.sort_unstable();

    let mut series: HashMap<(usize, u64), crate::number_kernel::LocalCoefficientSeries> =
        HashMap::new();
    let mut first_undecided: Option<(usize, u64)> = None;
    for &(n, p, nu) in &powers {
        for l in 1..=spec.phi {
            let entry = series.entry((l, p)).or_insert_with(|| {
                local_coefficients_indexed(spec, l, p, index_of[&p], n_max.ilog(p))
            });
            match &entry.values {
                LocalValues::Exact(h) => {
                    let v: &ComplexRational = &h[nu as usize];
                    if !v.is_real() || v.re.is_negative() {
                        return Ok(ScanOutcome::Witness {
                            rank: l,
                            n,
                            value: PowerSumValue::Exact(v.clone()),
                        });
                    }
                }
                LocalValues::Numeric(h) => {
                    let z = h[nu as usize];
                    if z.im.abs() > DEAD_BAND || z.re < -DEAD_BAND {
                        return Ok(ScanOutcome::Witness {
                            rank: l,
                            n,
                            value: PowerSumValue::Numeric(z),
                        });
                    }
                    if z.re <= DEAD_BAND && (z.re != 0.0 || z.im != 0.0) {
                        first_undecided.get_or_insert((l, n));
                    }
                }
            }
        }
    }
    if let Some((rank, n)) = first_undecided {
        return Ok(ScanOutcome::Undecided { rank, n });
    }
    Ok(ScanOutcome::Clean { n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_model::builtin_spec;

    #[test]
    fn chi4_witness_at_three() {
        let spec = builtin_spec("dirichlet-chi4").unwrap();
        match scan_coefficients(&spec, 100).unwrap() {
            ScanOutcome::Witness { rank, n, value } => {
                assert_eq!((rank, n), (1, 3));
                assert_eq!(
                    value,
                    PowerSumValue::Exact(ComplexRational::from_integers(-1, 0))
                );
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn zq_clean_to_two_to_the_twenty() {
        let spec = builtin_spec("zq").unwrap();
        match scan_coefficients(&spec, 1 << 20).unwrap() {
            ScanOutcome::Clean { n_max } => assert_eq!(n_max, 1 << 20),
            other => panic!("expected clean scan, got {other:?}"),
        }
    }

    #[test]
    fn l_zeta2s_witness_at_first_bad_prime() {
        // reduced L(s) zeta(2s): a(p) = chi4(p), first p = 3 mod 4 is 3.
        let spec = builtin_spec("l-zeta2s").unwrap();
        let reduced = crate::classifier::reduce_integer_dependent(&spec).unwrap();
        match scan_coefficients(&reduced, 1000).unwrap() {
            ScanOutcome::Witness { n, .. } => assert_eq!(n, 3),
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn fn0_witness_at_four() {
        // {i, -i}: a(2) = 0, a(4) = -1.
        let spec = builtin_spec("fn:0").unwrap();
        match scan_coefficients(&spec, 100).unwrap() {
            ScanOutcome::Witness { n, value, .. } => {
                assert_eq!(n, 4);
                assert_eq!(
                    value,
                    PowerSumValue::Exact(ComplexRational::from_integers(-1, 0))
                );
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn dedekind_clean() {
        let spec = builtin_spec("dedekind-qi").unwrap();
        assert_eq!(
            scan_coefficients(&spec, 10_000).unwrap(),
            ScanOutcome::Clean { n_max: 10_000 }
        );
    }
}
