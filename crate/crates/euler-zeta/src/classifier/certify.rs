//! Power-sum certificates: decides `sum_k alpha_{lk}(p)^r >= 0 for all r, p`
//! as far as the periodicity/decay structure permits, with explicit bounds
//! otherwise.

use super::analysis::{analyze, AnalysisValue, TupleOutcome};
use super::structure::{exceptional_primes, joint_classes};
use crate::number_kernel::{primes_up_to, PowerSumValue};
use crate::spec_model::{EulerProductSpec, TruncationBounds};
use crate::value::{CoefficientValue, ComplexRational};
use std::collections::HashMap;

/// Outcome of the global power-sum check.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerSumCertificate {
    /// No violation found. `complete` means the quantifiers over all p and
    /// r were closed by the class structure; otherwise the certificate
    /// covers the recorded bounds only.
    AllNonnegative {
        complete: bool,
        prime_cutoff: u64,
        power_cutoff: u32,
    },
    /// Certified violation: sum_k alpha_{lk}(p)^r is negative or non-real.
    Violation {
        rank: usize,
        prime: u64,
        r: u32,
        value: PowerSumValue,
    },
    /// Sign could not be decided at this point (numeric dead band).
    Undecided { rank: usize, prime: u64, r: u32 },
}

/// Explicit-scan cap for ranks without finite class structure, whose exact
/// values grow with the prime index.
const UNCLASSIFIABLE_PRIME_CAP: usize = 64;

#[derive(Hash, PartialEq, Eq)]
enum ValueKey {
    Exact(ComplexRational),
    Decay(ComplexRational, u64, Option<u64>),
    Disc(u64),
    Numeric(u64, u64),
}

fn key_of(values: &[AnalysisValue]) -> Vec<ValueKey> {
    values
        .iter()
        .map(|v| match v {
            AnalysisValue::Exact(x) => ValueKey::Exact(x.clone()),
            AnalysisValue::Decay { phase, bound, val } => ValueKey::Decay(
                phase.clone(),
                bound.to_bits(),
                val.map(f64::to_bits),
            ),
            AnalysisValue::Disc { bound } => ValueKey::Disc(bound.to_bits()),
            AnalysisValue::Numeric(z) => ValueKey::Numeric(z.re.to_bits(), z.im.to_bits()),
        })
        .collect()
}

fn concrete_values(
    spec: &EulerProductSpec,
    l: usize,
    p: u64,
    idx: usize,
) -> Vec<AnalysisValue> {
    (1..=spec.eta)
        .map(|k| match spec.coefficient(l, k, p, idx) {
            CoefficientValue::Exact(x) => AnalysisValue::Exact(x),
            CoefficientValue::PositiveReal(x) => AnalysisValue::Decay {
                phase: ComplexRational::one(),
                bound: x,
                val: Some(x),
            },
            CoefficientValue::Numeric(z) => AnalysisValue::Numeric(z),
        })
        .collect()
}

pub fn certify_power_sums(
    spec: &EulerProductSpec,
    bounds: &TruncationBounds,
) -> PowerSumCertificate {
    let r_cap = bounds.power_cutoff;
    let prime_cutoff = bounds.prime_cutoff;

    // Explicit prime set: sieved primes up to the cutoff plus every
    // exceptional prime (finite-support keys, character-modulus divisors).
    let mut extras: Vec<u64> = Vec::new();
    for row in &spec.rules {
        for rule in row {
            extras.extend(exceptional_primes(rule));
            if let Some(support) = rule.finite_support() {
                extras.extend(support);
            }
        }
    }
    extras.sort_unstable();
    extras.dedup();
    let sieve_to = prime_cutoff.max(extras.last().copied().unwrap_or(0));
    let all_primes = primes_up_to(sieve_to);
    let explicit: Vec<(u64, usize)> = all_primes
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p <= prime_cutoff || extras.binary_search(&p).is_ok())
        .map(|(i, &p)| (p, i + 1))
        .collect();

    let mut first_undecided: Option<(usize, u64, u32)> = None;
    let mut all_complete = true;

    for l in 1..=spec.phi {
        let classes = joint_classes(&spec.rules[l - 1]);
        let scan_list: Vec<(u64, usize)> = if classes.is_some() {
            explicit.clone()
        } else {
            // exact values grow with the index; keep the scan short and
            // record the reduced effective bound via `complete = false`
            explicit
                .iter()
                .copied()
                .filter(|&(p, idx)| idx <= UNCLASSIFIABLE_PRIME_CAP || extras.binary_search(&p).is_ok())
                .collect()
        };

        let mut cache: HashMap<Vec<ValueKey>, TupleOutcome> = HashMap::new();
        for &(p, idx) in &scan_list {
            let values = concrete_values(spec, l, p, idx);
            let key = key_of(&values);
            let outcome = cache
                .entry(key)
                .or_insert_with(|| analyze(&values, r_cap))
                .clone();
            match outcome {
                TupleOutcome::Violation { r, value } => {
                    return PowerSumCertificate::Violation {
                        rank: l,
                        prime: p,
                        r,
                        value,
                    };
                }
                TupleOutcome::Undecided { r } => {
                    first_undecided.get_or_insert((l, p, r));
                    all_complete = false;
                }
                TupleOutcome::NonnegativeBounded { .. } => all_complete = false,
                TupleOutcome::NonnegativeComplete => {}
            }
        }

        match classes {
            None => all_complete = false,
            Some(classes) => {
                // close the quantifier over primes beyond the cutoff; any
                // prime past the cutoff is at least prime_cutoff + 1
                let p_min = (prime_cutoff + 1) as f64;
                for class in classes {
                    let values: Vec<AnalysisValue> =
                        class.values.iter().map(|v| v.to_analysis(p_min)).collect();
                    match analyze(&values, r_cap) {
                        TupleOutcome::NonnegativeComplete => {}
                        TupleOutcome::Violation { .. } => {
                            // certain violation for every member prime; the
                            // explicit scan found none, so look just beyond
                            // the cutoff for a concrete witness
                            if let Some((p, idx)) =
                                find_class_member(&class, prime_cutoff, prime_cutoff.saturating_mul(16))
                            {
                                let values = concrete_values(spec, l, p, idx);
                                if let TupleOutcome::Violation { r, value } =
                                    analyze(&values, r_cap)
                                {
                                    return PowerSumCertificate::Violation {
                                        rank: l,
                                        prime: p,
                                        r,
                                        value,
                                    };
                                }
                            }
                            all_complete = false;
                        }
                        _ => all_complete = false,
                    }
                }
            }
        }
    }

    if let Some((rank, prime, r)) = first_undecided {
        return PowerSumCertificate::Undecided { rank, prime, r };
    }
    PowerSumCertificate::AllNonnegative {
        complete: all_complete,
        prime_cutoff,
        power_cutoff: r_cap,
    }
}

fn find_class_member(
    class: &super::structure::JointClass,
    above: u64,
    up_to: u64,
) -> Option<(u64, usize)> {
    let primes = primes_up_to(up_to);
    primes
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i + 1))
        .find(|&(p, idx)| p > above && class.contains(p, idx))
}
