//! Three-way classification of normalized Euler products: infinitely
//! divisible, quasi-infinitely divisible but not infinitely divisible, or
//! not a characteristic function, with explicit witnesses and honest
//! certification bounds.

mod analysis;
mod certify;
mod degree2;
mod reduce;
mod scan;
mod structure;

pub use certify::{certify_power_sums, PowerSumCertificate};
pub use degree2::classify_degree2;
pub use reduce::reduce_integer_dependent;
pub use scan::{scan_coefficients, ScanOutcome};

use crate::error::{Error, Result};
use crate::number_kernel::{local_coefficients_indexed, LocalValues, PowerSumValue};
use crate::spec_model::{DependenceMode, EulerProductSpec, TruncationBounds, ValueClass};
use num::Signed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    InfinitelyDivisible,
    QuasiInfinitelyDivisibleOnly,
    NotCharacteristic,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::InfinitelyDivisible => "InfinitelyDivisible",
            Verdict::QuasiInfinitelyDivisibleOnly => "QuasiInfinitelyDivisibleOnly",
            Verdict::NotCharacteristic => "NotCharacteristic",
            Verdict::Undecided => "Undecided",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// sum_k alpha_{rank,k}(prime)^r negative or non-real.
    PowerSum {
        rank: usize,
        prime: u64,
        r: u32,
        value: PowerSumValue,
    },
    /// a_rank(n) negative or non-real.
    Coefficient {
        rank: usize,
        n: u64,
        value: PowerSumValue,
    },
}

/// Bounds up to which a verdict is certified. `complete` marks verdicts
/// whose quantifiers over all r or n were closed structurally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certification {
    pub prime_cutoff: u64,
    pub power_cutoff: u32,
    pub coefficient_cutoff: u64,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub certification: Certification,
}

/// Classifies the normalized function of `spec`.
///
/// Decision tree: a coefficient witness is conclusive for NotCharacteristic;
/// an all-nonnegative power-sum certificate gives InfinitelyDivisible; a
/// power-sum violation with a clean coefficient scan gives
/// QuasiInfinitelyDivisibleOnly; anything else stays Undecided. Degree
/// eta <= 2 with exact values dispatches to the complete dichotomy.
/// Integer-dependent specs must be reduced first.
pub fn classify(
    spec: &EulerProductSpec,
    bounds: &TruncationBounds,
) -> Result<ClassificationVerdict> {
    if matches!(spec.mode, DependenceMode::IntegerDependent { .. }) {
        return Err(Error::Mode(
            "classify needs independent or scalar mode; reduce integer-dependent specs first"
                .into(),
        ));
    }
    if spec.eta <= 2 && spec.value_class() == ValueClass::Exact {
        return classify_degree2(spec);
    }

    let scan = scan_coefficients(spec, bounds.coefficient_cutoff)?;
    if let ScanOutcome::Witness { rank, n, value } = scan {
        return Ok(ClassificationVerdict {
            verdict: Verdict::NotCharacteristic,
            witness: Some(Witness::Coefficient { rank, n, value }),
            certification: Certification {
                prime_cutoff: bounds.prime_cutoff,
                power_cutoff: bounds.power_cutoff,
                coefficient_cutoff: bounds.coefficient_cutoff,
                complete: true, // the witness is conclusive
            },
        });
    }

    let certificate = certify_power_sums(spec, bounds);
    match certificate {
        PowerSumCertificate::AllNonnegative {
            complete,
            prime_cutoff,
            power_cutoff,
        } => Ok(ClassificationVerdict {
            verdict: Verdict::InfinitelyDivisible,
            witness: None,
            certification: Certification {
                prime_cutoff,
                power_cutoff,
                coefficient_cutoff: bounds.coefficient_cutoff,
                complete,
            },
        }),
        PowerSumCertificate::Violation {
            rank,
            prime,
            r,
            value,
        } => {
            let witness = Witness::PowerSum {
                rank,
                prime,
                r,
                value,
            };
            match scan {
                ScanOutcome::Clean { n_max } => Ok(ClassificationVerdict {
                    verdict: Verdict::QuasiInfinitelyDivisibleOnly,
                    witness: Some(witness),
                    certification: Certification {
                        prime_cutoff: bounds.prime_cutoff,
                        power_cutoff: bounds.power_cutoff,
                        coefficient_cutoff: n_max,
                        complete: coefficient_closure(spec, bounds),
                    },
                }),
                _ => Ok(ClassificationVerdict {
                    verdict: Verdict::Undecided,
                    witness: Some(witness),
                    certification: incomplete(bounds),
                }),
            }
        }
        PowerSumCertificate::Undecided { rank, prime, r } => Ok(ClassificationVerdict {
            verdict: Verdict::Undecided,
            witness: Some(Witness::PowerSum {
                rank,
                prime,
                r,
                value: PowerSumValue::Numeric(num::complex::Complex64::new(f64::NAN, f64::NAN)),
            }),
            certification: incomplete(bounds),
        }),
    }
}

fn incomplete(bounds: &TruncationBounds) -> Certification {
    Certification {
        prime_cutoff: bounds.prime_cutoff,
        power_cutoff: bounds.power_cutoff,
        coefficient_cutoff: bounds.coefficient_cutoff,
        complete: false,
    }
}

/// Structural closure of `a_l(n) >= 0 for all n` for fully finite-support
/// exact specs: each local coefficient sequence satisfies a linear
/// recurrence of order eta, so a repeated state vector makes it eventually
/// periodic; a nonnegative prefix then covers every n.
fn coefficient_closure(spec: &EulerProductSpec, _bounds: &TruncationBounds) -> bool {
    if spec.value_class() != ValueClass::Exact {
        return false;
    }
    let Some(support) = spec.finite_support() else {
        return false;
    };
    let window = spec.eta;
    let horizon = 512u32;
    for l in 1..=spec.phi {
        for &p in &support {
            let idx = crate::number_kernel::prime_index(p).unwrap_or(1);
            let series = local_coefficients_indexed(spec, l, p, idx, horizon);
            let LocalValues::Exact(h) = &series.values else {
                return false;
            };
            if h.iter().any(|v| !v.is_real() || v.re.is_negative()) {
                return false;
            }
            let mut seen = std::collections::HashMap::new();
            let mut periodic = false;
            for r in window..h.len() {
                let state: Vec<_> = h[r - window..r].to_vec();
                if seen.insert(state, r).is_some() {
                    periodic = true;
                    break;
                }
            }
            if !periodic {
                return false;
            }
        }
    }
    true
}
